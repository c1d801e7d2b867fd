//! Problem definition, candidate evaluation, violation aggregation, bound
//! repair, and population initialization.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::RngStream;

/// Raw evaluator output: objective value plus inequality (`g <= 0`) and
/// equality (`h = 0`) constraint values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEval<S> {
    pub objective: S,
    pub ineq: Vec<S>,
    pub eq: Vec<S>,
}

/// Pure objective/constraint map. Must be deterministic and callable from
/// any thread.
pub type Evaluator<S> = Arc<dyn Fn(&[S]) -> Result<RawEval<S>> + Send + Sync>;

/// A constrained minimization problem over a bounded box.
#[derive(Clone)]
pub struct ProblemSpec<S: Real> {
    dimension: usize,
    lower: Vec<S>,
    upper: Vec<S>,
    n_ineq: usize,
    n_eq: usize,
    eq_tol: S,
    evaluator: Evaluator<S>,
}

impl<S: Real> fmt::Debug for ProblemSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("dimension", &self.dimension)
            .field("n_ineq", &self.n_ineq)
            .field("n_eq", &self.n_eq)
            .field("eq_tol", &self.eq_tol)
            .finish_non_exhaustive()
    }
}

impl<S: Real> ProblemSpec<S> {
    pub fn new(
        dimension: usize,
        lower: Vec<S>,
        upper: Vec<S>,
        n_ineq: usize,
        n_eq: usize,
        eq_tol: S,
        evaluator: Evaluator<S>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if lower.len() != dimension || upper.len() != dimension {
            return Err(Error::Config(format!(
                "bounds must have length {dimension} (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        for j in 0..dimension {
            // NaN bounds fail this check as well.
            let ordered = matches!(
                lower[j].partial_cmp(&upper[j]),
                Some(std::cmp::Ordering::Less)
            );
            if !ordered {
                return Err(Error::Config(format!(
                    "lower bound must be below upper bound at coordinate {j}"
                )));
            }
        }
        if eq_tol < S::zero() || eq_tol.is_nan() {
            return Err(Error::Config(
                "equality tolerance must be nonnegative".into(),
            ));
        }
        Ok(Self {
            dimension,
            lower,
            upper,
            n_ineq,
            n_eq,
            eq_tol,
            evaluator,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lower(&self) -> &[S] {
        &self.lower
    }

    pub fn upper(&self) -> &[S] {
        &self.upper
    }

    pub fn n_ineq(&self) -> usize {
        self.n_ineq
    }

    pub fn n_eq(&self) -> usize {
        self.n_eq
    }

    pub fn n_constraints(&self) -> usize {
        self.n_ineq + self.n_eq
    }

    pub fn eq_tol(&self) -> S {
        self.eq_tol
    }

    /// Run the evaluator and validate the shape of its reply.
    pub fn evaluate(&self, x: &[S]) -> Result<RawEval<S>> {
        let raw = (self.evaluator)(x)?;
        if raw.ineq.len() != self.n_ineq || raw.eq.len() != self.n_eq {
            return Err(Error::Evaluator(format!(
                "evaluator returned {} inequality and {} equality values, expected {} and {}",
                raw.ineq.len(),
                raw.eq.len(),
                self.n_ineq,
                self.n_eq
            )));
        }
        Ok(raw)
    }

    pub fn contains(&self, x: &[S]) -> bool {
        x.len() == self.dimension
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }
}

/// Aggregate degree of constraint violation:
/// `sum(max(0, g_i)) + sum(max(0, |h_j| - eq_tol))`.
///
/// Zero exactly on the feasible set. Non-finite constraint values are
/// reported with the offending constraint index.
pub fn compute_violation<S: Real>(ineq: &[S], eq: &[S], eq_tol: S) -> Result<S> {
    debug_assert!(eq_tol >= S::zero());
    let mut total = S::zero();
    for (i, &gi) in ineq.iter().enumerate() {
        if !gi.is_finite() {
            return Err(Error::NonFiniteIneq(i));
        }
        total = total + gi.max(S::zero());
    }
    for (j, &hj) in eq.iter().enumerate() {
        if !hj.is_finite() {
            return Err(Error::NonFiniteEq(j));
        }
        total = total + (hj.abs() - eq_tol).max(S::zero());
    }
    Ok(total)
}

/// A decision vector together with its full evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate<S> {
    pub x: Vec<S>,
    pub f: S,
    pub g: Vec<S>,
    pub h: Vec<S>,
    pub violation: S,
}

impl<S: Real> Candidate<S> {
    /// Evaluate `x` and bundle the result. Fails on evaluator errors and on
    /// non-finite objective or constraint values.
    pub fn evaluated(x: Vec<S>, spec: &ProblemSpec<S>) -> Result<Self> {
        let RawEval {
            objective,
            ineq,
            eq,
        } = spec.evaluate(&x)?;
        if !objective.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        let violation = compute_violation(&ineq, &eq, spec.eq_tol())?;
        Ok(Self {
            x,
            f: objective,
            g: ineq,
            h: eq,
            violation,
        })
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == S::zero()
    }
}

/// Clamp out-of-bounds genes to the midpoint of the parent gene and the
/// violated bound. The parent must lie within bounds, which makes the repair
/// idempotent.
pub fn repair_bounds<S: Real>(mut child: Vec<S>, parent: &[S], spec: &ProblemSpec<S>) -> Vec<S> {
    let half = S::of(0.5);
    for j in 0..child.len() {
        if child[j] < spec.lower()[j] {
            child[j] = (parent[j] + spec.lower()[j]) * half;
        } else if child[j] > spec.upper()[j] {
            child[j] = (parent[j] + spec.upper()[j]) * half;
        }
    }
    child
}

/// Draw and evaluate the initial population: every gene is
/// `lower + u * (upper - lower)` with a fresh uniform `u`.
///
/// Consumes exactly `np` evaluations. Evaluator failures carry the index of
/// the candidate being built.
pub fn init_population<S: Real>(
    spec: &ProblemSpec<S>,
    np: usize,
    rng: &mut RngStream,
) -> Result<Vec<Candidate<S>>> {
    if np < 4 {
        return Err(Error::Config(format!(
            "population size {np} is below the minimum of 4"
        )));
    }
    let mut population = Vec::with_capacity(np);
    for k in 0..np {
        let x: Vec<S> = (0..spec.dimension())
            .map(|j| {
                let u: S = rng.uniform();
                spec.lower()[j] + u * (spec.upper()[j] - spec.lower()[j])
            })
            .collect();
        let candidate = Candidate::evaluated(x, spec).map_err(|e| e.at_candidate(k))?;
        population.push(candidate);
    }
    Ok(population)
}
