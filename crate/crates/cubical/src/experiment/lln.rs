//! Empirical law-of-large-numbers runs: normalized Betti curves and
//! lifetime sums across a ladder of window sizes.

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentError, ExperimentPlan};
use crate::cube::Window;
use crate::filtration::build_filtration;
use crate::model::sample_configuration;
use crate::persistence::{lifetime_sum_from_diagram, persistence_diagram, BettiCurve};
use crate::stats::{mean_std, StepFunction};

/// Mean and spread of the normalized Betti number at one `(n, t)` cell.
#[derive(Clone, Debug, Serialize)]
pub struct LlnCell {
    pub n: u32,
    pub t: f64,
    pub mean_norm_betti: f64,
    pub std: f64,
    pub samples: usize,
}

/// Exact sup-distance between the mean curves of two window sizes.
#[derive(Clone, Debug, Serialize)]
pub struct SupDelta {
    pub from_n: u32,
    pub to_n: u32,
    pub sup_diff: f64,
}

/// Largest observed grid jump of a mean curve next to the increment the
/// marginal laws allow per grid step (the curves' modulus of continuity).
#[derive(Clone, Debug, Serialize)]
pub struct GridJump {
    pub n: u32,
    pub max_jump: f64,
    pub modulus_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LlnResult {
    pub model: String,
    pub q: usize,
    pub cells: Vec<LlnCell>,
    pub sup_deltas: Vec<SupDelta>,
    /// Normalized mean curve of the largest window, on the plan's grid.
    pub beta_hat: Vec<(f64, f64)>,
    pub grid_jumps: Vec<GridJump>,
    #[serde(skip)]
    pub mean_curves: Vec<(u32, StepFunction)>,
}

impl LlnResult {
    pub fn mean_curve(&self, n: u32) -> Option<&StepFunction> {
        self.mean_curves.iter().find(|(m, _)| *m == n).map(|(_, f)| f)
    }
}

/// Per-window lifetime statistics.
#[derive(Clone, Debug, Serialize)]
pub struct LifetimeLlnRow {
    pub n: u32,
    pub mean_norm_lifetime: f64,
    pub std: f64,
    /// Integral of the mean normalized Betti curve; agrees with the mean
    /// lifetime up to floating-point association.
    pub curve_integral_of_mean: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LifetimeLlnResult {
    pub model: String,
    pub q: usize,
    pub rows: Vec<LifetimeLlnRow>,
}

struct SampleOutcome {
    step: StepFunction,
    lifetime_norm: f64,
}

fn normalized_step(curve: &BettiCurve, scale: f64) -> StepFunction {
    StepFunction::new(
        curve
            .points()
            .iter()
            .map(|&(t, v)| (t, v as f64 * scale))
            .collect(),
    )
}

fn sample_window(
    plan: &ExperimentPlan,
    n: u32,
) -> Result<Vec<SampleOutcome>, ExperimentError> {
    let window = Window::new(n, plan.model.ambient);
    let region = window.enlarged();
    let volume = window.volume();
    (0..plan.samples_per_n)
        .into_par_iter()
        .map(|i| {
            let cfg = sample_configuration(&plan.model, region, &plan.seed_for(n, i))?;
            let filt = build_filtration(&cfg, window)?;
            let diagram = persistence_diagram(&filt, plan.q);
            let curve = BettiCurve::from_diagram(&diagram);
            Ok(SampleOutcome {
                step: normalized_step(&curve, 1.0 / volume),
                lifetime_norm: lifetime_sum_from_diagram(&diagram).to_f64() / volume,
            })
        })
        .collect()
}

fn require_continuous(plan: &ExperimentPlan) -> Result<(), ExperimentError> {
    if plan.model.has_continuous_marginals() {
        Ok(())
    } else {
        Err(ExperimentError::DiscontinuousMarginals)
    }
}

/// Modulus allowed over one grid step: `3^d` times the total marginal mass
/// the step can sweep.
fn modulus_bound(plan: &ExperimentPlan, lo: f64, hi: f64) -> f64 {
    let d = plan.model.ambient;
    let mut sweep = 0.0;
    for k in 0..=d {
        let cdf = plan.model.marginal_cdf(k).expect("k <= d");
        sweep += cdf.eval(hi) - cdf.eval(lo);
    }
    3f64.powi(d as i32) * sweep
}

/// Monte Carlo sweep of normalized Betti curves across the window ladder.
///
/// The whole-curve statistics mirror the uniform convergence statement, so
/// binary-marginal models are refused.
pub fn run_lln(plan: &ExperimentPlan) -> Result<LlnResult, ExperimentError> {
    plan.validate()?;
    require_continuous(plan)?;

    let mut cells = Vec::new();
    let mut mean_curves: Vec<(u32, StepFunction)> = Vec::new();
    let mut grid_jumps = Vec::new();

    for &n in &plan.n_list {
        let outcomes = sample_window(plan, n)?;
        let steps: Vec<StepFunction> = outcomes.into_iter().map(|o| o.step).collect();
        for &t in &plan.t_grid {
            let values: Vec<f64> = steps.iter().map(|s| s.value_at(t)).collect();
            let (mean, std) = mean_std(&values);
            cells.push(LlnCell { n, t, mean_norm_betti: mean, std, samples: steps.len() });
        }
        let mean_curve = StepFunction::average(&steps);
        let mut max_jump = 0.0f64;
        let mut bound = 0.0f64;
        for w in plan.t_grid.windows(2) {
            let jump = (mean_curve.value_at(w[1]) - mean_curve.value_at(w[0])).abs();
            max_jump = max_jump.max(jump);
            bound = bound.max(modulus_bound(plan, w[0], w[1]));
        }
        grid_jumps.push(GridJump { n, max_jump, modulus_bound: bound });
        mean_curves.push((n, mean_curve));
    }

    let sup_deltas = mean_curves
        .windows(2)
        .map(|pair| SupDelta {
            from_n: pair[0].0,
            to_n: pair[1].0,
            sup_diff: StepFunction::sup_abs_diff(&pair[0].1, &pair[1].1),
        })
        .collect();

    let last = &mean_curves.last().expect("nonempty n_list").1;
    let beta_hat = plan.t_grid.iter().map(|&t| (t, last.value_at(t))).collect();

    Ok(LlnResult {
        model: plan.model.to_string(),
        q: plan.q,
        cells,
        sup_deltas,
        beta_hat,
        grid_jumps,
        mean_curves,
    })
}

/// Lifetime-sum companion of `run_lln`: the statistic is the normalized
/// integral of the Betti curve, and the mean lifetime is cross-checked
/// against the integral of the mean curve.
pub fn run_lifetime_lln(plan: &ExperimentPlan) -> Result<LifetimeLlnResult, ExperimentError> {
    plan.validate()?;
    require_continuous(plan)?;

    let mut rows = Vec::new();
    for &n in &plan.n_list {
        let outcomes = sample_window(plan, n)?;
        let lifetimes: Vec<f64> = outcomes.iter().map(|o| o.lifetime_norm).collect();
        let (mean, std) = mean_std(&lifetimes);
        let steps: Vec<StepFunction> = outcomes.into_iter().map(|o| o.step).collect();
        let integral = StepFunction::average(&steps).integral();
        rows.push(LifetimeLlnRow {
            n,
            mean_norm_lifetime: mean,
            std,
            curve_integral_of_mean: integral,
            samples: lifetimes.len(),
        });
    }
    Ok(LifetimeLlnResult { model: plan.model.to_string(), q: plan.q, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpec;

    fn small_plan() -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(ModelSpec::uniform(2), 0);
        plan.n_list = vec![2, 3];
        plan.samples_per_n = 4;
        plan.t_grid = (0..=20).map(|i| f64::from(i) / 20.0).collect();
        plan.seed = 11;
        plan
    }

    #[test]
    fn degenerate_single_window_plan_runs() {
        let mut plan = small_plan();
        plan.n_list = vec![1];
        plan.samples_per_n = 1;
        let result = run_lln(&plan).unwrap();
        assert!(result.sup_deltas.is_empty());
        assert_eq!(result.cells.len(), plan.t_grid.len());
        assert_eq!(result.beta_hat.len(), plan.t_grid.len());
    }

    #[test]
    fn lln_reports_cells_and_deltas() {
        let plan = small_plan();
        let result = run_lln(&plan).unwrap();
        assert_eq!(result.cells.len(), 2 * plan.t_grid.len());
        assert_eq!(result.sup_deltas.len(), 1);
        // Normalized Betti numbers never exceed the cube density 3^d.
        for cell in &result.cells {
            assert!(cell.mean_norm_betti <= 9.0);
            assert!(cell.mean_norm_betti >= 0.0);
        }
        // At t = 1 everything is present: one component.
        let volume = Window::new(3, 2).volume();
        let last = result.cells.iter().find(|c| c.n == 3 && c.t == 1.0).unwrap();
        assert!((last.mean_norm_betti - 1.0 / volume).abs() < 1e-12);
        assert_eq!(last.std, 0.0);
    }

    #[test]
    fn grid_jumps_respect_the_modulus() {
        let result = run_lln(&small_plan()).unwrap();
        for jump in &result.grid_jumps {
            assert!(
                jump.max_jump <= jump.modulus_bound + 1e-9,
                "n={}: jump {} exceeds modulus {}",
                jump.n,
                jump.max_jump,
                jump.modulus_bound,
            );
        }
    }

    #[test]
    fn lln_refuses_binary_models() {
        let model = ModelSpec::costa_farber(2, vec![1.0, 0.5, 0.25]).unwrap();
        let plan = ExperimentPlan::new(model, 0);
        assert!(matches!(
            run_lln(&plan),
            Err(ExperimentError::DiscontinuousMarginals)
        ));
        let model = ModelSpec::costa_farber(2, vec![1.0, 0.5, 0.25]).unwrap();
        let plan = ExperimentPlan::new(model, 0);
        assert!(matches!(
            run_lifetime_lln(&plan),
            Err(ExperimentError::DiscontinuousMarginals)
        ));
    }

    #[test]
    fn lifetime_mean_matches_mean_curve_integral() {
        let plan = small_plan();
        let result = run_lifetime_lln(&plan).unwrap();
        for row in &result.rows {
            assert!(
                (row.mean_norm_lifetime - row.curve_integral_of_mean).abs() < 1e-9,
                "n={}: {} vs {}",
                row.n,
                row.mean_norm_lifetime,
                row.curve_integral_of_mean,
            );
        }
    }

    #[test]
    fn all_born_at_zero_has_unit_lifetime_of_the_single_component() {
        use crate::filtration::Configuration;
        use crate::persistence::{lifetime_sum_from_diagram, persistence_diagram};
        let window = Window::new(2, 2);
        let cfg = Configuration::from_fn(window.enlarged(), |_| 0.0);
        let filt = build_filtration(&cfg, window).unwrap();
        let diagram = persistence_diagram(&filt, 0);
        let sum = lifetime_sum_from_diagram(&diagram);
        assert_eq!(sum.to_f64(), 1.0);
        assert_eq!(sum.to_f64() / window.volume(), 1.0 / window.volume());
    }

    #[test]
    fn normalized_lifetime_stabilizes_across_windows() {
        // Theta(volume) scaling: the normalized means at successive window
        // sizes sit near the same limit.
        let mut plan = ExperimentPlan::new(ModelSpec::bernoulli(2, 1).unwrap(), 1);
        plan.n_list = vec![4, 8];
        plan.samples_per_n = 10;
        plan.seed = 77;
        let result = run_lifetime_lln(&plan).unwrap();
        let (a, b) = (result.rows[0].mean_norm_lifetime, result.rows[1].mean_norm_lifetime);
        assert!(a > 0.0 && b > 0.0);
        assert!(
            (a / b - 1.0).abs() < 0.25,
            "normalized lifetimes diverge: {a} vs {b}"
        );
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let plan = small_plan();
        let a = run_lln(&plan).unwrap();
        let b = run_lln(&plan).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
