//! Built-in constrained benchmark problems with known or oracle-verified
//! optima.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::problem::{ProblemSpec, RawEval};

/// Default equality tolerance (CEC reporting convention).
pub const DEFAULT_EQ_TOL: f64 = 1e-4;

/// Dimensions a catalog entry can be instantiated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimensionality {
    Fixed(usize),
    AtLeast(usize),
}

impl Dimensionality {
    pub fn accepts(self, dimension: usize) -> bool {
        match self {
            Dimensionality::Fixed(d) => dimension == d,
            Dimensionality::AtLeast(d) => dimension >= d,
        }
    }

    /// Dimension used when the caller does not pick one.
    pub fn default_dimension(self) -> usize {
        match self {
            Dimensionality::Fixed(d) => d,
            Dimensionality::AtLeast(d) => d.max(10),
        }
    }
}

/// Reference optimum, always stored in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum {
    pub f_star: f64,
    /// Minimizer for the default dimension, when one is pinned down.
    pub x_star: Option<Vec<f64>>,
    pub provenance: &'static str,
}

#[derive(Debug)]
pub struct ProblemCatalogEntry<S: Real> {
    pub name: &'static str,
    pub dimensionality: Dimensionality,
    pub known_optimum: Option<KnownOptimum>,
    factory: fn(usize) -> ProblemSpec<S>,
}

impl<S: Real> ProblemCatalogEntry<S> {
    pub fn build(&self, dimension: usize) -> Result<ProblemSpec<S>> {
        if !self.dimensionality.accepts(dimension) {
            let wanted = match self.dimensionality {
                Dimensionality::Fixed(d) => format!("exactly {d}"),
                Dimensionality::AtLeast(d) => format!("at least {d}"),
            };
            return Err(Error::Config(format!(
                "problem `{}` requires dimension {wanted}, got {dimension}",
                self.name
            )));
        }
        Ok((self.factory)(dimension))
    }

    pub fn build_default(&self) -> ProblemSpec<S> {
        (self.factory)(self.dimensionality.default_dimension())
    }
}

/// All built-in problems.
pub fn catalog<S: Real>() -> Vec<ProblemCatalogEntry<S>> {
    vec![
        lin_sphere_entry(),
        eq_sphere_entry(),
        rosenbrock_cd_entry(),
        g6_like_entry(),
        con_rastrigin_entry(),
    ]
}

/// Look a problem up by name; unknown names report the valid ones.
pub fn by_name<S: Real>(name: &str) -> Result<ProblemCatalogEntry<S>> {
    catalog::<S>()
        .into_iter()
        .find(|entry| entry.name == name)
        .ok_or_else(|| Error::UnknownProblem {
            name: name.to_string(),
            known: catalog::<S>()
                .iter()
                .map(|entry| entry.name)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

fn box_bounds<S: Real>(dimension: usize, lo: f64, hi: f64) -> (Vec<S>, Vec<S>) {
    (vec![S::of(lo); dimension], vec![S::of(hi); dimension])
}

/// min sum(x^2) subject to x1 + x2 >= 1. The optimum is the projection of
/// the origin onto the half-space boundary: x1 = x2 = 1/2, f* = 1/2.
fn lin_sphere_entry<S: Real>() -> ProblemCatalogEntry<S> {
    fn build<S: Real>(dimension: usize) -> ProblemSpec<S> {
        let (lower, upper) = box_bounds(dimension, -5.0, 5.0);
        ProblemSpec::new(
            dimension,
            lower,
            upper,
            1,
            0,
            S::of(DEFAULT_EQ_TOL),
            Arc::new(|x: &[S]| {
                Ok(RawEval {
                    objective: x.iter().fold(S::zero(), |acc, &v| acc + v * v),
                    ineq: vec![S::one() - x[0] - x[1]],
                    eq: vec![],
                })
            }),
        )
        .expect("catalog problem is well formed")
    }
    let mut x_star = vec![0.0; 10];
    x_star[0] = 0.5;
    x_star[1] = 0.5;
    ProblemCatalogEntry {
        name: "lin-sphere",
        dimensionality: Dimensionality::AtLeast(2),
        known_optimum: Some(KnownOptimum {
            f_star: 0.5,
            x_star: Some(x_star),
            provenance: "projection of the origin onto the half-space x1 + x2 >= 1",
        }),
        factory: build::<S>,
    }
}

/// min sum(x^2) subject to x1 + x2 = 1; same optimum as lin-sphere.
fn eq_sphere_entry<S: Real>() -> ProblemCatalogEntry<S> {
    fn build<S: Real>(dimension: usize) -> ProblemSpec<S> {
        let (lower, upper) = box_bounds(dimension, -5.0, 5.0);
        ProblemSpec::new(
            dimension,
            lower,
            upper,
            0,
            1,
            S::of(DEFAULT_EQ_TOL),
            Arc::new(|x: &[S]| {
                Ok(RawEval {
                    objective: x.iter().fold(S::zero(), |acc, &v| acc + v * v),
                    ineq: vec![],
                    eq: vec![x[0] + x[1] - S::one()],
                })
            }),
        )
        .expect("catalog problem is well formed")
    }
    let mut x_star = vec![0.0; 10];
    x_star[0] = 0.5;
    x_star[1] = 0.5;
    ProblemCatalogEntry {
        name: "eq-sphere",
        dimensionality: Dimensionality::AtLeast(2),
        known_optimum: Some(KnownOptimum {
            f_star: 0.5,
            x_star: Some(x_star),
            provenance: "projection of the origin onto the hyperplane x1 + x2 = 1",
        }),
        factory: build::<S>,
    }
}

/// 2-D Rosenbrock with a cubic and a line constraint; optimum f* = 0 at
/// (1, 1), where both constraints are active.
fn rosenbrock_cd_entry<S: Real>() -> ProblemCatalogEntry<S> {
    fn build<S: Real>(_dimension: usize) -> ProblemSpec<S> {
        ProblemSpec::new(
            2,
            vec![S::of(-1.5), S::of(-0.5)],
            vec![S::of(1.5), S::of(2.5)],
            2,
            0,
            S::of(DEFAULT_EQ_TOL),
            Arc::new(|x: &[S]| {
                let one = S::one();
                let hundred = S::of(100.0);
                let a = one - x[0];
                let b = x[1] - x[0] * x[0];
                let cube = (x[0] - one) * (x[0] - one) * (x[0] - one);
                Ok(RawEval {
                    objective: a * a + hundred * b * b,
                    ineq: vec![cube - x[1] + one, x[0] + x[1] - S::of(2.0)],
                    eq: vec![],
                })
            }),
        )
        .expect("catalog problem is well formed")
    }
    ProblemCatalogEntry {
        name: "rosenbrock-cd",
        dimensionality: Dimensionality::Fixed(2),
        known_optimum: Some(KnownOptimum {
            f_star: 0.0,
            x_star: Some(vec![1.0, 1.0]),
            provenance: "unconstrained Rosenbrock minimum; both constraints hold with equality",
        }),
        factory: build::<S>,
    }
}

/// min (x1-10)^3 + (x2-20)^3 inside a thin ring between two circles around
/// (5, 5). The optimum sits at the intersection of both circle boundaries;
/// the reference value is cross-checked by a grid-plus-refinement script
/// whose output is frozen under tests/data.
fn g6_like_entry<S: Real>() -> ProblemCatalogEntry<S> {
    fn build<S: Real>(_dimension: usize) -> ProblemSpec<S> {
        ProblemSpec::new(
            2,
            vec![S::of(13.0), S::of(0.0)],
            vec![S::of(100.0), S::of(100.0)],
            2,
            0,
            S::of(DEFAULT_EQ_TOL),
            Arc::new(|x: &[S]| {
                let five = S::of(5.0);
                let a = x[0] - S::of(10.0);
                let b = x[1] - S::of(20.0);
                let d1 = x[0] - five;
                let d2 = x[1] - five;
                let e1 = x[0] - S::of(6.0);
                Ok(RawEval {
                    objective: a * a * a + b * b * b,
                    ineq: vec![
                        S::of(100.0) - d1 * d1 - d2 * d2,
                        e1 * e1 + d2 * d2 - S::of(82.81),
                    ],
                    eq: vec![],
                })
            }),
        )
        .expect("catalog problem is well formed")
    }
    // Intersection of (x-5)^2 + (y-5)^2 = 100 and (x-6)^2 + (y-5)^2 = 82.81.
    let x1: f64 = (100.0 - 82.81 + 11.0) / 2.0;
    let x2: f64 = 5.0 - (100.0 - (x1 - 5.0) * (x1 - 5.0)).sqrt();
    let f_star = (x1 - 10.0).powi(3) + (x2 - 20.0).powi(3);
    ProblemCatalogEntry {
        name: "g6-like",
        dimensionality: Dimensionality::Fixed(2),
        known_optimum: Some(KnownOptimum {
            f_star,
            x_star: Some(vec![x1, x2]),
            provenance: "circle-boundary intersection, verified by tools/g6_oracle.py",
        }),
        factory: build::<S>,
    }
}

/// D-dimensional Rastrigin with x1 + x2 >= 1: multimodal and
/// stagnation-prone, used for the recovery-strategy ablation.
fn con_rastrigin_entry<S: Real>() -> ProblemCatalogEntry<S> {
    fn build<S: Real>(dimension: usize) -> ProblemSpec<S> {
        let (lower, upper) = box_bounds(dimension, -5.12, 5.12);
        ProblemSpec::new(
            dimension,
            lower,
            upper,
            1,
            0,
            S::of(DEFAULT_EQ_TOL),
            Arc::new(move |x: &[S]| {
                let ten = S::of(10.0);
                let two_pi = S::of(2.0) * S::PI();
                let sum = x
                    .iter()
                    .fold(S::zero(), |acc, &v| acc + v * v - ten * (two_pi * v).cos());
                Ok(RawEval {
                    objective: ten * S::from_usize(x.len()).expect("dimension fits") + sum,
                    ineq: vec![S::one() - x[0] - x[1]],
                    eq: vec![],
                })
            }),
        )
        .expect("catalog problem is well formed")
    }
    ProblemCatalogEntry {
        name: "con-rastrigin",
        dimensionality: Dimensionality::AtLeast(2),
        known_optimum: None,
        factory: build::<S>,
    }
}
