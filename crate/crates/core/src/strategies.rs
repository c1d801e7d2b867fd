//! Trial-vector generation: the three mutation strategies, both crossover
//! operators, and ranking-based parent selection.

use serde::{Deserialize, Serialize};

use crate::constraints::sof_compare;
use crate::num::Real;
use crate::problem::Candidate;
use crate::rng::RngStream;

/// The three trial-vector generation strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyId {
    Rand1Bin,
    CurrentToRand1,
    CurrentToPBest1Bin,
}

impl StrategyId {
    pub const ALL: [StrategyId; 3] = [
        StrategyId::Rand1Bin,
        StrategyId::CurrentToRand1,
        StrategyId::CurrentToPBest1Bin,
    ];

    /// Stable code used for ledger and memory indexing.
    pub fn index(self) -> usize {
        match self {
            StrategyId::Rand1Bin => 0,
            StrategyId::CurrentToRand1 => 1,
            StrategyId::CurrentToPBest1Bin => 2,
        }
    }
}

/// Population ranking with acceptance probabilities `(NP - i) / NP` for the
/// i-th best member, best first.
#[derive(Debug, Clone)]
pub struct RankTable {
    order: Vec<usize>,
    accept_prob: Vec<f64>,
}

impl RankTable {
    pub fn build<S: Real>(population: &[Candidate<S>]) -> Self {
        let np = population.len();
        let mut order: Vec<usize> = (0..np).collect();
        order.sort_by(|&a, &b| sof_compare(&population[a], &population[b]));
        let accept_prob = (0..np).map(|i| (np - i) as f64 / np as f64).collect();
        Self { order, accept_prob }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Population indices sorted best to worst.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn accept_prob(&self) -> &[f64] {
        &self.accept_prob
    }
}

const RANK_RETRY_FACTOR: usize = 10;

/// Draw a population index biased toward better ranks: propose a uniform
/// rank among the best `pool` ranks, accept it with its rank probability.
/// Indices in `exclude` are never returned. After `10 * NP` rejected
/// proposals the draw falls back to uniform over the eligible pool.
pub fn rank_select(
    table: &RankTable,
    pool: usize,
    rng: &mut RngStream,
    exclude: &[usize],
) -> usize {
    debug_assert!(pool >= 1 && pool <= table.len());
    debug_assert!(
        table.order[..pool].iter().any(|i| !exclude.contains(i)),
        "exclusions must leave at least one selectable index"
    );
    let cap = RANK_RETRY_FACTOR * table.len();
    let mut tries = 0;
    loop {
        let rank = rng.index(pool);
        let idx = table.order[rank];
        if exclude.contains(&idx) {
            continue;
        }
        if rng.uniform::<f64>() < table.accept_prob[rank] {
            return idx;
        }
        tries += 1;
        if tries >= cap {
            loop {
                let idx = table.order[rng.index(pool)];
                if !exclude.contains(&idx) {
                    return idx;
                }
            }
        }
    }
}

/// Size of the pbest pool: `max(2, ceil(fraction * np))`, never above `np`.
pub fn pbest_pool(np: usize, fraction: f64) -> usize {
    (((fraction * np as f64).ceil() as usize).max(2)).min(np)
}

/// DE/rand/1: `v = base + F (t1 - t2)`.
pub fn mutate_rand1<S: Real>(base: &[S], term1: &[S], term2: &[S], factor: S) -> Vec<S> {
    base.iter()
        .zip(term1.iter().zip(term2))
        .map(|(&b, (&t1, &t2))| b + factor * (t1 - t2))
        .collect()
}

/// DE/current-to-rand/1: `u = x + K (r1 - x) + F (r2 - r3)`. The result is
/// used as the trial vector directly, without crossover.
pub fn mutate_current_to_rand1<S: Real>(
    current: &[S],
    r1: &[S],
    r2: &[S],
    r3: &[S],
    k: S,
    factor: S,
) -> Vec<S> {
    current
        .iter()
        .zip(r1.iter().zip(r2.iter().zip(r3)))
        .map(|(&x, (&a, (&b, &c)))| x + k * (a - x) + factor * (b - c))
        .collect()
}

/// DE/current-to-pbest/1: `v = x + F (pbest - x) + F (r1 - r2)`.
pub fn mutate_current_to_pbest1<S: Real>(
    current: &[S],
    pbest: &[S],
    r1: &[S],
    r2: &[S],
    factor: S,
) -> Vec<S> {
    current
        .iter()
        .zip(pbest.iter().zip(r1.iter().zip(r2)))
        .map(|(&x, (&p, (&a, &b)))| x + factor * (p - x) + factor * (a - b))
        .collect()
}

/// Binomial crossover: gene `j` comes from the mutant when the j-th uniform
/// draw is at most CR or `j` is the pre-drawn forced index.
pub fn binomial_crossover<S: Real>(
    target: &[S],
    mutant: &[S],
    cr: S,
    rng: &mut RngStream,
) -> Vec<S> {
    let j_rand = rng.index(target.len());
    binomial_crossover_at(target, mutant, cr, j_rand, || rng.uniform())
}

/// Deterministic binomial kernel with the forced index and the per-gene
/// draws supplied by the caller. One draw is consumed per gene.
pub fn binomial_crossover_at<S: Real>(
    target: &[S],
    mutant: &[S],
    cr: S,
    j_rand: usize,
    mut draw: impl FnMut() -> S,
) -> Vec<S> {
    debug_assert_eq!(target.len(), mutant.len());
    debug_assert!(j_rand < target.len());
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&t, &m))| if draw() <= cr || j == j_rand { m } else { t })
        .collect()
}

/// Exponential crossover: a circular block of mutant genes starting at a
/// uniform index, extended while the draw stays at or below CR.
pub fn exponential_crossover<S: Real>(
    target: &[S],
    mutant: &[S],
    cr: S,
    rng: &mut RngStream,
) -> Vec<S> {
    let start = rng.index(target.len());
    exponential_crossover_at(target, mutant, cr, start, || rng.uniform())
}

/// Deterministic exponential kernel with the block start and the extension
/// draws supplied by the caller.
pub fn exponential_crossover_at<S: Real>(
    target: &[S],
    mutant: &[S],
    cr: S,
    start: usize,
    mut draw: impl FnMut() -> S,
) -> Vec<S> {
    debug_assert_eq!(target.len(), mutant.len());
    debug_assert!(start < target.len());
    let dim = target.len();
    let mut out = target.to_vec();
    out[start] = mutant[start];
    let mut len = 1;
    while len < dim && draw() <= cr {
        let j = (start + len) % dim;
        out[j] = mutant[j];
        len += 1;
    }
    out
}
