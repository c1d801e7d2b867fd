//! Seeded multi-run campaigns and their aggregate statistics.

use serde::{Deserialize, Serialize};
use ude3::{run_traced, Candidate, EngineConfig, GenTrace, Mode, ProblemSpec, RunReport};

/// What to run: problem identification plus the engine configuration.
#[derive(Debug, Clone)]
pub struct CampaignPlan {
    pub problem: String,
    pub dimension: usize,
    pub runs: usize,
    pub seed0: u64,
    pub trace: bool,
    pub config: EngineConfig,
}

/// Execute `runs` independent runs; run `i` uses seed `seed0 + i`. Results
/// are placed by run index, so the output is identical for any thread count.
pub fn run_campaign(
    spec: &ProblemSpec<f64>,
    plan: &CampaignPlan,
    threads: usize,
) -> ude3::Result<Vec<RunReport<f64>>> {
    let runs = plan.runs;
    let threads = threads.clamp(1, runs.max(1));
    let mut slots: Vec<Option<ude3::Result<RunReport<f64>>>> = Vec::new();
    slots.resize_with(runs, || None);
    if threads == 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            let seed = plan.seed0.wrapping_add(i as u64);
            *slot = Some(run_traced(spec, &plan.config, seed, plan.trace));
        }
    } else {
        let per = runs.div_ceil(threads);
        std::thread::scope(|scope| {
            for (t, chunk) in slots.chunks_mut(per).enumerate() {
                let start = t * per;
                let config = &plan.config;
                let trace = plan.trace;
                let seed0 = plan.seed0;
                scope.spawn(move || {
                    for (offset, slot) in chunk.iter_mut().enumerate() {
                        let seed = seed0.wrapping_add((start + offset) as u64);
                        *slot = Some(run_traced(spec, config, seed, trace));
                    }
                });
            }
        });
    }
    slots
        .into_iter()
        .map(|s| s.expect("run executed"))
        .collect()
}

/// Aggregate statistics in the benchmark-table format: objective statistics
/// over every run's final best, feasibility rate, mean violation, and the
/// violation buckets of the median run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    pub std: f64,
    /// Percentage of runs whose final best is feasible.
    pub sr_pct: f64,
    /// Mean over runs of the per-constraint average violation of the final
    /// best.
    pub mean_violation: f64,
    /// Constraint counts at the median run's best solution with violation
    /// above 1, in (0.01, 1], and in (eq_tol, 0.01].
    pub c: [usize; 3],
}

/// Collapse run reports into the table statistics. All reductions happen
/// over sorted copies, so the result does not depend on run order.
pub fn aggregate(reports: &[RunReport<f64>], eq_tol: f64) -> CampaignResult {
    assert!(!reports.is_empty(), "aggregate needs at least one run");
    let n = reports.len() as f64;

    let mut objectives: Vec<f64> = reports.iter().map(|r| r.best.f).collect();
    objectives.sort_by(f64::total_cmp);
    let best = objectives[0];
    let worst = *objectives.last().unwrap();
    let mean = objectives.iter().sum::<f64>() / n;
    let std = if objectives.len() < 2 {
        0.0
    } else {
        (objectives
            .iter()
            .map(|f| (f - mean) * (f - mean))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    };

    let feasible = reports.iter().filter(|r| r.best.violation == 0.0).count();
    let sr_pct = 100.0 * feasible as f64 / n;

    let mut violations: Vec<f64> = reports
        .iter()
        .map(|r| mean_constraint_violation(&r.best))
        .collect();
    violations.sort_by(f64::total_cmp);
    let mean_violation = violations.iter().sum::<f64>() / n;

    let c = violation_buckets(&median_report(reports).best, eq_tol);

    CampaignResult {
        best,
        mean,
        worst,
        std,
        sr_pct,
        mean_violation,
        c,
    }
}

/// Per-constraint average of the aggregate violation; zero for problems
/// without constraints.
fn mean_constraint_violation(candidate: &Candidate<f64>) -> f64 {
    let constraints = candidate.g.len() + candidate.h.len();
    if constraints == 0 {
        0.0
    } else {
        candidate.violation / constraints as f64
    }
}

/// Median run: among feasible runs the one with median objective, otherwise
/// the run with median violation.
fn median_report(reports: &[RunReport<f64>]) -> &RunReport<f64> {
    let mut feasible: Vec<&RunReport<f64>> =
        reports.iter().filter(|r| r.best.violation == 0.0).collect();
    if feasible.is_empty() {
        let mut all: Vec<&RunReport<f64>> = reports.iter().collect();
        all.sort_by(|a, b| {
            a.best
                .violation
                .total_cmp(&b.best.violation)
                .then(a.best.f.total_cmp(&b.best.f))
        });
        all[(all.len() - 1) / 2]
    } else {
        feasible.sort_by(|a, b| {
            a.best
                .f
                .total_cmp(&b.best.f)
                .then(a.best.violation.total_cmp(&b.best.violation))
        });
        feasible[(feasible.len() - 1) / 2]
    }
}

/// Bucket counts at one solution. Inequality violations are `max(0, g)`;
/// equality violations are `|h|`, counted once they exceed the equality
/// tolerance.
fn violation_buckets(candidate: &Candidate<f64>, eq_tol: f64) -> [usize; 3] {
    let mut buckets = [0usize; 3];
    {
        let mut tally = |v: f64| {
            if v > 1.0 {
                buckets[0] += 1;
            } else if v > 0.01 {
                buckets[1] += 1;
            } else if v > eq_tol {
                buckets[2] += 1;
            }
        };
        for &g in &candidate.g {
            tally(g.max(0.0));
        }
        for &h in &candidate.h {
            tally(h.abs());
        }
    }
    buckets
}

/// One run inside the machine-readable output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub best_f: f64,
    pub best_violation: f64,
    pub best_x: Vec<f64>,
    pub fes_used: usize,
    pub generations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<GenTrace<f64>>>,
}

impl From<RunReport<f64>> for RunSummary {
    fn from(report: RunReport<f64>) -> Self {
        Self {
            seed: report.seed,
            best_f: report.best.f,
            best_violation: report.best.violation,
            best_x: report.best.x,
            fes_used: report.fes_used,
            generations: report.generations,
            trace: report.trace,
        }
    }
}

/// Machine-readable campaign record; `parse(emit(x)) == x` round-trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutput {
    pub problem: String,
    pub dimension: usize,
    pub mode: Mode,
    pub runs: usize,
    pub seed0: u64,
    pub max_fes: usize,
    pub config: EngineConfig,
    pub aggregate: CampaignResult,
    /// Evaluations actually spent across all runs.
    pub fes_total: usize,
    pub run_reports: Vec<RunSummary>,
}

impl CampaignOutput {
    pub fn new(plan: &CampaignPlan, eq_tol: f64, reports: Vec<RunReport<f64>>) -> Self {
        let aggregate = aggregate(&reports, eq_tol);
        let fes_total = reports.iter().map(|r| r.fes_used).sum();
        Self {
            problem: plan.problem.clone(),
            dimension: plan.dimension,
            mode: plan.config.mode,
            runs: plan.runs,
            seed0: plan.seed0,
            max_fes: plan.config.max_fes,
            config: plan.config.clone(),
            aggregate,
            fes_total,
            run_reports: reports.into_iter().map(RunSummary::from).collect(),
        }
    }
}

/// Both modes side by side, produced by `--compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub ude3: CampaignOutput,
    pub ude2: CampaignOutput,
}

/// Partial engine configuration parsed from `--config` files; present
/// fields override the resolved configuration.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfigPatch {
    pub np: Option<usize>,
    pub top_size: Option<usize>,
    pub learning_period: Option<usize>,
    pub sg: Option<u32>,
    pub sprop: Option<f64>,
    pub max_fes: Option<usize>,
    pub eps_lambda: Option<f64>,
    pub eps_p: Option<f64>,
    pub eps_tc_fraction: Option<f64>,
    pub cp_cap: Option<f64>,
    pub pbest_fraction: Option<f64>,
    pub memory_size: Option<usize>,
    pub mode: Option<Mode>,
}

impl EngineConfigPatch {
    pub fn apply(&self, config: &mut EngineConfig) {
        macro_rules! patch {
            ($($field:ident),*) => {
                $(if let Some(value) = self.$field.clone() {
                    config.$field = value;
                })*
            };
        }
        patch!(
            np,
            top_size,
            learning_period,
            sg,
            sprop,
            max_fes,
            eps_lambda,
            eps_p,
            eps_tc_fraction,
            cp_cap,
            pbest_fraction,
            memory_size,
            mode
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(seed: u64, f: f64, violation: f64) -> RunReport<f64> {
        RunReport {
            seed,
            best: Candidate {
                x: vec![0.0],
                f,
                g: vec![violation],
                h: vec![],
                violation,
            },
            fes_used: 100,
            generations: 1,
            mode: Mode::Ude3,
            top_size: 25,
            eps0: 0.0,
            cp: 2.0,
            tc: 1,
            trace: None,
        }
    }

    #[test]
    fn aggregate_hand_statistics() {
        let reports = vec![
            report(1, 1.0, 0.0),
            report(2, 2.0, 0.0),
            report(3, 3.0, 0.0),
        ];
        let result = aggregate(&reports, 1e-4);
        assert_eq!(result.best, 1.0);
        assert_eq!(result.mean, 2.0);
        assert_eq!(result.worst, 3.0);
        assert_eq!(result.std, 1.0);
        assert_eq!(result.sr_pct, 100.0);
        assert_eq!(result.mean_violation, 0.0);
        assert_eq!(result.c, [0, 0, 0]);
    }

    #[test]
    fn single_run_has_zero_std() {
        let result = aggregate(&[report(1, 5.0, 0.0)], 1e-4);
        assert_eq!(result.std, 0.0);
        assert_eq!(result.best, 5.0);
        assert_eq!(result.worst, 5.0);
    }

    #[test]
    fn all_infeasible_runs() {
        let reports = vec![report(1, 1.0, 2.0), report(2, 2.0, 4.0)];
        let result = aggregate(&reports, 1e-4);
        assert_eq!(result.sr_pct, 0.0);
        // One constraint per candidate: the mean violation is the mean phi.
        assert_eq!(result.mean_violation, 3.0);
        // Median by violation is the first report; its g = 2 lands above 1.
        assert_eq!(result.c, [1, 0, 0]);
    }

    #[test]
    fn aggregation_is_permutation_invariant() {
        let base = vec![
            report(1, 3.0, 0.0),
            report(2, -1.0, 0.0),
            report(3, 7.0, 0.5),
            report(4, 0.25, 0.0),
            report(5, 4.5, 0.02),
        ];
        let reference = aggregate(&base, 1e-4);
        let permutations = [
            vec![4usize, 3, 2, 1, 0],
            vec![2, 0, 4, 1, 3],
            vec![1, 4, 0, 3, 2],
        ];
        for perm in permutations {
            let shuffled: Vec<_> = perm.iter().map(|&i| base[i].clone()).collect();
            assert_eq!(aggregate(&shuffled, 1e-4), reference);
        }
    }

    #[test]
    fn violation_buckets_split_by_threshold() {
        let candidate = Candidate {
            x: vec![],
            f: 0.0,
            g: vec![2.0, 0.5, 0.005, 1e-5, -3.0],
            h: vec![0.02, 5e-5],
            violation: 1.0,
        };
        // g: 2.0 -> big, 0.5 -> mid, 0.005 -> small, 1e-5 and -3 -> none.
        // h: |0.02| -> mid, |5e-5| below eq_tol -> none.
        assert_eq!(violation_buckets(&candidate, 1e-4), [1, 2, 1]);
    }

    #[test]
    fn median_prefers_feasible_runs() {
        let reports = vec![
            report(1, 100.0, 3.0),
            report(2, 1.0, 0.0),
            report(3, 2.0, 0.0),
            report(4, 3.0, 0.0),
        ];
        assert_eq!(median_report(&reports).seed, 3);
    }

    #[test]
    fn patch_overrides_only_present_fields() {
        let mut config = EngineConfig::for_dimension(10);
        let patch: EngineConfigPatch =
            serde_json::from_str(r#"{"np": 40, "mode": "ude2"}"#).unwrap();
        patch.apply(&mut config);
        assert_eq!(config.np, 40);
        assert_eq!(config.mode, Mode::Ude2);
        assert_eq!(config.max_fes, 200_000);
        assert!(serde_json::from_str::<EngineConfigPatch>(r#"{"bogus": 1}"#).is_err());
    }
}
