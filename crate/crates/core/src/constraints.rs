//! Feasibility comparison rules and the shrinking epsilon threshold.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::num::Real;
use crate::problem::Candidate;

/// Floor applied when the raw decay exponent comes out nonpositive, which
/// keeps the schedule from sitting flat at eps0 and then cliff-dropping.
pub const CP_MIN: f64 = 2.0;

fn cmp_values<S: Real>(a: S, b: S) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Superiority-of-feasible comparison (Deb's rules): feasible beats
/// infeasible, two feasible compare by objective, two infeasible by
/// violation. `Less` means the first argument is better, so sorting with
/// this comparator puts the best candidate first.
pub fn sof_compare<S: Real>(a: &Candidate<S>, b: &Candidate<S>) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, true) => cmp_values(a.f, b.f),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => cmp_values(a.violation, b.violation),
    }
}

/// Epsilon-level comparison: violations at or below `eps` count as feasible
/// and are compared by objective. With `eps = 0` this coincides with
/// [`sof_compare`].
pub fn eps_compare<S: Real>(a: &Candidate<S>, b: &Candidate<S>, eps: S) -> Ordering {
    debug_assert!(eps >= S::zero());
    match (a.violation <= eps, b.violation <= eps) {
        (true, true) => cmp_values(a.f, b.f),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => cmp_values(a.violation, b.violation),
    }
}

/// Exponent of the epsilon decay schedule:
/// `cp = -(ln eps0 + lambda) / ln(1 - p)`, capped at `cp_cap` and floored at
/// [`CP_MIN`] when the raw value is nonpositive.
pub fn compute_cp<S: Real>(eps0: S, lambda: S, p: S, cp_cap: S) -> S {
    debug_assert!(eps0 > S::zero());
    debug_assert!(p > S::zero() && p < S::one());
    let raw = -((eps0.ln() + lambda) / (S::one() - p).ln());
    if raw <= S::zero() {
        S::of(CP_MIN)
    } else {
        raw.min(cp_cap)
    }
}

/// Epsilon threshold over generations:
/// `eps(G) = eps0 * (1 - G/Tc)^cp` for `G < Tc`, exactly zero afterwards.
///
/// An initial threshold of zero (fully feasible initial population)
/// degenerates to the all-zero schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule<S> {
    eps0: S,
    cp: S,
    tc: usize,
}

impl<S: Real> EpsSchedule<S> {
    pub fn new(eps0: S, lambda: S, p: S, tc: usize, cp_cap: S) -> Self {
        if eps0 <= S::zero() {
            return Self {
                eps0: S::zero(),
                cp: S::of(CP_MIN),
                tc,
            };
        }
        Self {
            eps0,
            cp: compute_cp(eps0, lambda, p, cp_cap),
            tc,
        }
    }

    pub fn eps0(&self) -> S {
        self.eps0
    }

    pub fn cp(&self) -> S {
        self.cp
    }

    pub fn tc(&self) -> usize {
        self.tc
    }

    /// True for the degenerate schedule that is zero everywhere.
    pub fn is_zero(&self) -> bool {
        self.eps0 == S::zero()
    }

    pub fn eps_at(&self, generation: usize) -> S {
        if generation >= self.tc || self.eps0 == S::zero() {
            return S::zero();
        }
        let ratio = S::one()
            - S::from_usize(generation).expect("generation fits the scalar")
                / S::from_usize(self.tc).expect("tc fits the scalar");
        self.eps0 * ratio.powf(self.cp)
    }
}
