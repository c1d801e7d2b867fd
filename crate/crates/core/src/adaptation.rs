//! Online learning: strategy win/loss bookkeeping over a sliding window and
//! success-history adaptation of the control parameters F and CR.

use std::collections::VecDeque;

use crate::config::Mode;
use crate::num::Real;
use crate::rng::RngStream;
use crate::strategies::StrategyId;

/// Additive constant of the success-rate formula; keeps every strategy at a
/// strictly positive probability.
pub const SADE_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, Default)]
struct GenBucket {
    wins: [u32; 3],
    losses: [u32; 3],
}

/// Per-strategy, per-generation win and loss counts over a sliding window of
/// `learning_period` completed generations.
///
/// In ude3 mode the probabilities follow the SaDE rule
/// `S_k = wins_k / (wins_k + losses_k) + 0.01`, normalized to sum to one; in
/// ude2 mode only wins are counted and `SR_k = wins_k / sum(wins)`.
#[derive(Debug, Clone)]
pub struct StrategyLedger {
    learning_period: usize,
    mode: Mode,
    completed: VecDeque<GenBucket>,
    current: GenBucket,
    generation: usize,
}

impl StrategyLedger {
    pub fn new(learning_period: usize, mode: Mode) -> Self {
        assert!(learning_period > 0);
        Self {
            learning_period,
            mode,
            completed: VecDeque::with_capacity(learning_period + 1),
            current: GenBucket::default(),
            generation: 0,
        }
    }

    /// Index of the generation outcomes are currently recorded into.
    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Completed generations currently inside the window.
    pub fn window_len(&self) -> usize {
        self.completed.len()
    }

    /// Roll the bookkeeping forward, completing a bucket for every
    /// generation passed over and evicting buckets older than the window.
    pub fn advance_to(&mut self, generation: usize) {
        assert!(
            generation >= self.generation,
            "ledger cannot move backwards (at {}, asked for {})",
            self.generation,
            generation
        );
        while self.generation < generation {
            self.completed.push_back(std::mem::take(&mut self.current));
            if self.completed.len() > self.learning_period {
                self.completed.pop_front();
            }
            self.generation += 1;
        }
    }

    /// Record one trial outcome in `generation`'s bucket.
    pub fn record_outcome(&mut self, strategy: StrategyId, win: bool, generation: usize) {
        self.advance_to(generation);
        if win {
            self.current.wins[strategy.index()] += 1;
        } else {
            self.current.losses[strategy.index()] += 1;
        }
    }

    fn window_totals(&self) -> ([u64; 3], [u64; 3]) {
        let mut wins = [0u64; 3];
        let mut losses = [0u64; 3];
        for bucket in &self.completed {
            for k in 0..3 {
                wins[k] += u64::from(bucket.wins[k]);
                losses[k] += u64::from(bucket.losses[k]);
            }
        }
        (wins, losses)
    }

    /// Selection probabilities for the bottom sub-population. Uniform until
    /// a full learning period has completed; the in-progress generation
    /// never contributes.
    pub fn strategy_probabilities(&self) -> [f64; 3] {
        let uniform = [1.0 / 3.0; 3];
        if self.completed.len() < self.learning_period {
            return uniform;
        }
        let (wins, losses) = self.window_totals();
        match self.mode {
            Mode::Ude3 => {
                let mut scores = [0.0f64; 3];
                for k in 0..3 {
                    let attempts = wins[k] + losses[k];
                    scores[k] = if attempts == 0 {
                        SADE_EPSILON
                    } else {
                        wins[k] as f64 / attempts as f64 + SADE_EPSILON
                    };
                }
                let total: f64 = scores.iter().sum();
                [scores[0] / total, scores[1] / total, scores[2] / total]
            }
            Mode::Ude2 => {
                let total: u64 = wins.iter().sum();
                if total == 0 {
                    return uniform;
                }
                [
                    wins[0] as f64 / total as f64,
                    wins[1] as f64 / total as f64,
                    wins[2] as f64 / total as f64,
                ]
            }
        }
    }
}

/// One successful replacement attributed to a strategy: the sampled control
/// parameters plus the improvement weight.
#[derive(Debug, Clone, Copy)]
pub struct ParamSuccess<S> {
    pub factor: S,
    pub cr: S,
    pub weight: S,
}

/// Success-history memory for one strategy: H slots for the F location and H
/// slots for the CR location, written round-robin.
#[derive(Debug, Clone)]
pub struct ParameterMemory<S> {
    mf: Vec<S>,
    mcr: Vec<S>,
    cursor: usize,
    adapt_cr: bool,
}

impl<S: Real> ParameterMemory<S> {
    pub fn new(memory_size: usize) -> Self {
        Self::with_cr(memory_size, true)
    }

    /// Memory for a strategy without crossover: CR slots are never sampled
    /// or updated.
    pub fn factor_only(memory_size: usize) -> Self {
        Self::with_cr(memory_size, false)
    }

    fn with_cr(memory_size: usize, adapt_cr: bool) -> Self {
        assert!(memory_size > 0);
        let half = S::of(0.5);
        Self {
            mf: vec![half; memory_size],
            mcr: vec![half; memory_size],
            cursor: 0,
            adapt_cr,
        }
    }

    pub fn factor_slots(&self) -> &[S] {
        &self.mf
    }

    pub fn cr_slots(&self) -> &[S] {
        &self.mcr
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Sample `(F, CR)` from a uniformly drawn slot: F from a Cauchy around
    /// the slot's F location, CR from a normal around its CR location
    /// clamped to [0, 1].
    pub fn sample_pair(&self, rng: &mut RngStream) -> (S, S) {
        let r = rng.index(self.mf.len());
        let factor = sample_factor_from(self.mf[r], || rng.standard_cauchy());
        let cr = clamp01(self.mcr[r] + S::of(0.1) * rng.standard_normal());
        (factor, cr)
    }

    /// Sample only F, for the crossover-free strategy.
    pub fn sample_factor(&self, rng: &mut RngStream) -> S {
        let r = rng.index(self.mf.len());
        sample_factor_from(self.mf[r], || rng.standard_cauchy())
    }

    /// Fold one generation's successes into the memory: the weighted Lehmer
    /// mean of the F values and the weighted arithmetic mean of the CR
    /// values land in the cursor slot, then the cursor advances. An empty
    /// success list leaves the memory untouched. Zero weights count as 1e-12.
    pub fn update(&mut self, successes: &[ParamSuccess<S>]) {
        if successes.is_empty() {
            return;
        }
        let tiny = S::of(1e-12);
        let mut factor_sq_sum = S::zero();
        let mut factor_sum = S::zero();
        let mut cr_sum = S::zero();
        let mut weight_sum = S::zero();
        for s in successes {
            let w = if s.weight > S::zero() { s.weight } else { tiny };
            factor_sq_sum = factor_sq_sum + w * s.factor * s.factor;
            factor_sum = factor_sum + w * s.factor;
            cr_sum = cr_sum + w * s.cr;
            weight_sum = weight_sum + w;
        }
        self.mf[self.cursor] = factor_sq_sum / factor_sum;
        if self.adapt_cr {
            self.mcr[self.cursor] = cr_sum / weight_sum;
        }
        self.cursor = (self.cursor + 1) % self.mf.len();
    }
}

fn clamp01<S: Real>(v: S) -> S {
    v.max(S::zero()).min(S::one())
}

/// First Cauchy(location, 0.1) variate that is strictly positive, truncated
/// to 1. `draw` yields standard Cauchy variates.
pub fn sample_factor_from<S: Real>(location: S, mut draw: impl FnMut() -> S) -> S {
    let scale = S::of(0.1);
    loop {
        let c = location + scale * draw();
        if c > S::zero() {
            return c.min(S::one());
        }
    }
}
