//! Engine configuration and algorithm-variant toggles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Algorithm variant. The `ude2` compatibility mode reproduces the
/// predecessor's control flow: equal sub-population split, top-only ranking
/// pool, wins-only strategy adaptation, uncapped epsilon decay exponent, and
/// no stagnation recovery.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Ude3,
    Ude2,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Ude3 => write!(f, "ude3"),
            Mode::Ude2 => write!(f, "ude2"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ude3" => Ok(Mode::Ude3),
            "ude2" => Ok(Mode::Ude2),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected ude3 or ude2)"
            ))),
        }
    }
}

/// Engine knobs. The defaults follow the reference setting for 30-D
/// benchmark work: NP = 100, T = 25, Lp = 25, SG = 35, SProp = 50%, H = 5,
/// and a budget of 20000 evaluations per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Population size NP.
    pub np: usize,
    /// Top sub-population size T (ignored in ude2 mode, which uses NP / 2).
    pub top_size: usize,
    /// Learning period Lp in generations for strategy adaptation.
    pub learning_period: usize,
    /// Generations without replacement after which an individual counts as
    /// stagnated.
    pub sg: u32,
    /// Fraction of the population that must be stagnated before the
    /// recovery step activates.
    pub sprop: f64,
    /// Total evaluation budget, including initialization.
    pub max_fes: usize,
    /// Lambda of the epsilon decay exponent formula.
    pub eps_lambda: f64,
    /// p of the epsilon decay exponent formula, in (0, 1).
    pub eps_p: f64,
    /// The epsilon threshold reaches zero after this fraction of the
    /// budget-implied generation horizon.
    pub eps_tc_fraction: f64,
    /// Cap on the epsilon decay exponent (ude3 mode only).
    pub cp_cap: f64,
    /// Fraction of the population eligible as pbest parents.
    pub pbest_fraction: f64,
    /// Success-history memory slots per strategy.
    pub memory_size: usize,
    pub mode: Mode,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            np: 100,
            top_size: 25,
            learning_period: 25,
            sg: 35,
            sprop: 0.5,
            max_fes: 200_000,
            eps_lambda: 6.0,
            eps_p: 0.5,
            eps_tc_fraction: 0.8,
            cp_cap: 33.0,
            pbest_fraction: 0.1,
            memory_size: 5,
            mode: Mode::Ude3,
        }
    }
}

impl EngineConfig {
    /// Defaults with the standard budget rule `max_fes = 20000 * dimension`.
    pub fn for_dimension(dimension: usize) -> Self {
        Self {
            max_fes: 20_000 * dimension,
            ..Self::default()
        }
    }

    /// Sub-population split actually used by the engine.
    pub fn effective_top_size(&self) -> usize {
        match self.mode {
            Mode::Ude3 => self.top_size,
            Mode::Ude2 => self.np / 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.np < 4 {
            return fail(format!("np = {} is below the minimum of 4", self.np));
        }
        if self.mode == Mode::Ude2 && self.np < 6 {
            return fail(format!(
                "np = {} is too small for ude2 mode (top half must hold at least 3 members)",
                self.np
            ));
        }
        let top = self.effective_top_size();
        if top == 0 || top >= self.np {
            return fail(format!(
                "top_size = {top} must satisfy 0 < top_size < np ({})",
                self.np
            ));
        }
        if self.learning_period == 0 {
            return fail("learning_period must be positive".into());
        }
        if self.sg == 0 {
            return fail("sg must be positive".into());
        }
        if !(self.sprop > 0.0 && self.sprop <= 1.0) {
            return fail(format!("sprop = {} must lie in (0, 1]", self.sprop));
        }
        if self.max_fes < self.np {
            return fail(format!(
                "max_fes = {} cannot cover initialization of np = {} candidates",
                self.max_fes, self.np
            ));
        }
        if !(self.eps_p > 0.0 && self.eps_p < 1.0) {
            return fail(format!("eps_p = {} must lie in (0, 1)", self.eps_p));
        }
        if !self.eps_lambda.is_finite() {
            return fail("eps_lambda must be finite".into());
        }
        if !(self.eps_tc_fraction > 0.0 && self.eps_tc_fraction <= 1.0) {
            return fail(format!(
                "eps_tc_fraction = {} must lie in (0, 1]",
                self.eps_tc_fraction
            ));
        }
        if self.cp_cap <= 0.0 || self.cp_cap.is_nan() {
            return fail(format!("cp_cap = {} must be positive", self.cp_cap));
        }
        if !(self.pbest_fraction > 0.0 && self.pbest_fraction <= 1.0) {
            return fail(format!(
                "pbest_fraction = {} must lie in (0, 1]",
                self.pbest_fraction
            ));
        }
        if self.memory_size == 0 {
            return fail("memory_size must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        EngineConfig::default().validate().unwrap();
        EngineConfig::for_dimension(30).validate().unwrap();
        assert_eq!(EngineConfig::for_dimension(30).max_fes, 600_000);
    }

    #[test]
    fn invalid_fields_are_rejected() {
        let ok = EngineConfig::default();
        for cfg in [
            EngineConfig {
                np: 3,
                ..ok.clone()
            },
            EngineConfig {
                top_size: 0,
                ..ok.clone()
            },
            EngineConfig {
                top_size: 100,
                ..ok.clone()
            },
            EngineConfig {
                sprop: 0.0,
                ..ok.clone()
            },
            EngineConfig {
                sprop: 1.5,
                ..ok.clone()
            },
            EngineConfig {
                max_fes: 99,
                ..ok.clone()
            },
            EngineConfig {
                eps_p: 1.0,
                ..ok.clone()
            },
            EngineConfig {
                cp_cap: 0.0,
                ..ok.clone()
            },
            EngineConfig {
                pbest_fraction: 0.0,
                ..ok.clone()
            },
            EngineConfig {
                memory_size: 0,
                ..ok.clone()
            },
            EngineConfig {
                learning_period: 0,
                ..ok.clone()
            },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?} should be invalid");
        }
    }

    #[test]
    fn ude2_splits_in_half() {
        let cfg = EngineConfig {
            mode: Mode::Ude2,
            ..EngineConfig::default()
        };
        assert_eq!(cfg.effective_top_size(), 50);
        cfg.validate().unwrap();
    }

    #[test]
    fn mode_round_trips_through_serde() {
        assert_eq!(serde_json::to_string(&Mode::Ude3).unwrap(), "\"ude3\"");
        assert_eq!(
            serde_json::from_str::<Mode>("\"ude2\"").unwrap(),
            Mode::Ude2
        );
        assert!("bogus".parse::<Mode>().is_err());
    }
}
