//! Monte Carlo experiments over random cubical filtrations: empirical laws
//! of large numbers, fluctuation scaling, perturbation bounds, and the
//! positivity certificate for limiting Betti densities.
//!
//! Every run is a pure function of its plan: per-sample randomness is
//! derived from `(seed, window, sample index)`, sample batches parallelize
//! over the index, and aggregation folds in index order so outputs are
//! byte-stable.

mod checks;
mod clt;
mod emit;
mod lln;
mod positivity;

pub use checks::{
    check_additivity_bounds, check_resampling_bound, check_stabilization, AdditivityBoundsReport,
    ResamplingBoundReport, StabilizationReport,
};
pub use clt::{run_clt, CltResult, CltRow, CltTarget};
pub use emit::{
    emit_checks, emit_clt, emit_lifetime_lln, emit_lln, emit_positivity, ChecksBundle,
    OutputFormat, StabilizationSummary,
};
pub use lln::{run_lifetime_lln, run_lln, LifetimeLlnResult, LifetimeLlnRow, LlnCell, LlnResult, SupDelta};
pub use positivity::{
    count_positivity_witnesses, pattern_probability, run_positivity, PositivityReport,
    PositivityWitness,
};

use serde::Serialize;
use thiserror::Error;

use crate::filtration::FiltrationError;
use crate::model::{ModelError, ModelSpec, SampleSeed};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("degree q={q} must satisfy 0 <= q < d={d}")]
    DegreeOutOfRange { q: usize, d: usize },
    #[error("window list must be nonempty and strictly ascending")]
    BadWindowList,
    #[error("t grid must be sorted inside [0, 1]")]
    BadTimeGrid,
    #[error("at least one sample per window is required")]
    NoSamples,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error("model has discontinuous birth marginals; sup-over-t statistics refused")]
    DiscontinuousMarginals,
    #[error("fluctuation experiments require a product-measure model")]
    RequiresProductMeasure,
    #[error("positivity pattern does not fit: need 2K >= q + 2 and q + 1 <= d (q={q}, K={k}, d={d})")]
    PatternWindowMismatch { q: usize, k: u32, d: usize },
}

/// Everything needed to reproduce one experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentPlan {
    #[serde(serialize_with = "serialize_model")]
    pub model: ModelSpec,
    pub q: usize,
    pub t_grid: Vec<f64>,
    pub n_list: Vec<u32>,
    pub samples_per_n: usize,
    pub seed: u64,
}

fn serialize_model<S: serde::Serializer>(m: &ModelSpec, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&m.to_string())
}

impl ExperimentPlan {
    pub fn new(model: ModelSpec, q: usize) -> Self {
        let d = model.ambient;
        Self {
            model,
            q,
            t_grid: default_t_grid(),
            n_list: default_n_list(d),
            samples_per_n: 5,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let d = self.model.ambient;
        if self.q >= d {
            return Err(PlanError::DegreeOutOfRange { q: self.q, d });
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PlanError::BadWindowList);
        }
        let grid_ok = !self.t_grid.is_empty()
            && self.t_grid.iter().all(|t| (0.0..=1.0).contains(t))
            && self.t_grid.windows(2).all(|w| w[0] <= w[1]);
        if !grid_ok {
            return Err(PlanError::BadTimeGrid);
        }
        if self.samples_per_n == 0 {
            return Err(PlanError::NoSamples);
        }
        Ok(())
    }

    /// Stream identifier for one `(window, sample)` cell.
    pub fn seed_for(&self, n: u32, sample: usize) -> SampleSeed {
        SampleSeed::new(self.seed, stream_id(n, sample))
    }
}

pub(crate) fn stream_id(n: u32, sample: usize) -> u64 {
    (u64::from(n) << 32) | sample as u64
}

/// 101 equispaced points on `[0, 1]`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=100).map(|i| f64::from(i) / 100.0).collect()
}

/// Window ladders that finish in minutes on a desk machine.
pub fn default_n_list(d: usize) -> Vec<u32> {
    match d {
        1 => vec![16, 32, 64, 128],
        2 => vec![8, 16, 32, 64],
        3 => vec![4, 8, 12, 16],
        _ => vec![2, 3, 4],
    }
}
