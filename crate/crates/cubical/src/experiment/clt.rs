//! Fluctuation experiments: variance scaling of Betti numbers and lifetime
//! sums, plus an empirical normality score for the standardized samples.

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentError, ExperimentPlan};
use crate::cube::Window;
use crate::filtration::build_filtration;
use crate::model::sample_configuration;
use crate::persistence::{lifetime_sum_from_diagram, persistence_diagram};
use crate::stats::{ks_distance_standard_normal, mean_std};

/// Which functional the fluctuations are taken of.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CltTarget {
    /// The Betti number of the sublevel set at a fixed time.
    Betti { t: f64 },
    /// The lifetime sum over the whole filtration.
    Lifetime,
}

#[derive(Clone, Debug, Serialize)]
pub struct CltRow {
    pub n: u32,
    /// Fixed evaluation time; absent for lifetime targets.
    pub t: Option<f64>,
    pub mean: f64,
    /// Empirical variance of the raw statistic divided by the window
    /// volume; the quantity that stabilizes as windows grow.
    pub var_over_volume: f64,
    /// Kolmogorov-Smirnov distance of the standardized samples to the
    /// standard normal law; absent when the statistic is degenerate.
    pub ks_distance: Option<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CltResult {
    pub model: String,
    pub q: usize,
    pub target: CltTarget,
    pub rows: Vec<CltRow>,
    /// Standardized samples per window size, for downstream diagnostics.
    pub standardized: Vec<(u32, Vec<f64>)>,
}

/// Monte Carlo estimate of the variance scaling and empirical normality of
/// the target statistic. Requires a product-measure model.
pub fn run_clt(plan: &ExperimentPlan, target: CltTarget) -> Result<CltResult, ExperimentError> {
    plan.validate()?;
    if !plan.model.is_product_measure() {
        return Err(ExperimentError::RequiresProductMeasure);
    }
    if let CltTarget::Betti { t } = target {
        if !(0.0..=1.0).contains(&t) {
            return Err(super::PlanError::BadTimeGrid.into());
        }
    }

    let mut rows = Vec::new();
    let mut standardized_all = Vec::new();
    for &n in &plan.n_list {
        let window = Window::new(n, plan.model.ambient);
        let region = window.enlarged();
        let values: Vec<f64> = (0..plan.samples_per_n)
            .into_par_iter()
            .map(|i| {
                let cfg = sample_configuration(&plan.model, region, &plan.seed_for(n, i))?;
                let filt = build_filtration(&cfg, window)?;
                let diagram = persistence_diagram(&filt, plan.q);
                Ok(match target {
                    CltTarget::Betti { t } => diagram.betti_at(t) as f64,
                    CltTarget::Lifetime => lifetime_sum_from_diagram(&diagram).to_f64(),
                })
            })
            .collect::<Result<_, ExperimentError>>()?;

        let (mean, std) = mean_std(&values);
        let var_over_volume = std * std / window.volume();
        let (ks, standardized) = if std == 0.0 {
            (None, Vec::new())
        } else {
            let z: Vec<f64> = values.iter().map(|v| (v - mean) / std).collect();
            (Some(ks_distance_standard_normal(&z)), z)
        };
        rows.push(CltRow {
            n,
            t: match target {
                CltTarget::Betti { t } => Some(t),
                CltTarget::Lifetime => None,
            },
            mean,
            var_over_volume,
            ks_distance: ks,
            samples: values.len(),
        });
        standardized_all.push((n, standardized));
    }

    Ok(CltResult {
        model: plan.model.to_string(),
        q: plan.q,
        target,
        rows,
        standardized: standardized_all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpec;

    #[test]
    fn degenerate_statistic_skips_normality() {
        // Bond percolation beta_0 at t = 1: everything is one component.
        let mut plan = ExperimentPlan::new(ModelSpec::bernoulli(2, 1).unwrap(), 0);
        plan.n_list = vec![2];
        plan.samples_per_n = 10;
        let result = run_clt(&plan, CltTarget::Betti { t: 1.0 }).unwrap();
        let row = &result.rows[0];
        assert_eq!(row.var_over_volume, 0.0);
        assert_eq!(row.ks_distance, None);
    }

    #[test]
    fn nondegenerate_statistic_reports_ks() {
        let mut plan = ExperimentPlan::new(ModelSpec::bernoulli(2, 1).unwrap(), 0);
        plan.n_list = vec![4];
        plan.samples_per_n = 60;
        plan.seed = 5;
        let result = run_clt(&plan, CltTarget::Betti { t: 0.5 }).unwrap();
        let row = &result.rows[0];
        assert!(row.var_over_volume > 0.0);
        let ks = row.ks_distance.unwrap();
        assert!(ks > 0.0 && ks < 0.25, "implausible KS distance {ks}");
        assert_eq!(result.standardized[0].1.len(), 60);
    }

    #[test]
    fn lifetime_target_runs() {
        let mut plan = ExperimentPlan::new(ModelSpec::uniform(2), 1);
        plan.n_list = vec![3];
        plan.samples_per_n = 30;
        let result = run_clt(&plan, CltTarget::Lifetime).unwrap();
        assert_eq!(result.rows[0].t, None);
        assert!(result.rows[0].var_over_volume > 0.0);
    }

    #[test]
    fn clt_rejects_non_product_models() {
        let model = ModelSpec::costa_farber(2, vec![1.0, 0.5, 0.0]).unwrap();
        let plan = ExperimentPlan::new(model, 0);
        assert!(matches!(
            run_clt(&plan, CltTarget::Betti { t: 0.5 }),
            Err(ExperimentError::RequiresProductMeasure)
        ));
    }

    #[test]
    fn disjoint_seed_streams_agree_on_variance() {
        let mut plan = ExperimentPlan::new(ModelSpec::bernoulli(2, 1).unwrap(), 1);
        plan.n_list = vec![8];
        plan.samples_per_n = 400;
        plan.seed = 101;
        let a = run_clt(&plan, CltTarget::Betti { t: 0.5 }).unwrap();
        plan.seed = 202;
        let b = run_clt(&plan, CltTarget::Betti { t: 0.5 }).unwrap();
        let (va, vb) = (a.rows[0].var_over_volume, b.rows[0].var_over_volume);
        // Relative noise of a variance estimate is about sqrt(2/N) per run.
        let rel_err = (2.0f64 / 400.0).sqrt();
        let gap = (va / vb - 1.0).abs();
        assert!(gap <= 4.0 * rel_err, "variance estimates {va} vs {vb} (gap {gap})");
    }

    #[test]
    fn seeded_reruns_match() {
        let mut plan = ExperimentPlan::new(ModelSpec::uniform(2), 0);
        plan.n_list = vec![2, 3];
        plan.samples_per_n = 8;
        let a = run_clt(&plan, CltTarget::Betti { t: 0.4 }).unwrap();
        let b = run_clt(&plan, CltTarget::Betti { t: 0.4 }).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
