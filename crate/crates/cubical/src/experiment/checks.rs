//! Structural checks behind the fluctuation theory: the bounded effect of
//! redrawing the origin block, its stabilization across growing windows,
//! and the additivity bounds relating Betti differences to cube counts.

use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentError;
use crate::complex::CubicalSet;
use crate::cube::{ElementaryCube, Window};
use crate::filtration::{build_filtration, Configuration};
use crate::homology::{betti, CoefficientField};
use crate::model::{resample_origin, sample_configuration, ModelSpec, SampleSeed};
use crate::persistence::persistence_diagram;
use crate::rng::SplitMix64;

/// Outcome of redrawing the origin block over many independent trials.
#[derive(Clone, Debug, Serialize)]
pub struct ResamplingBoundReport {
    pub model: String,
    pub q: usize,
    pub t: f64,
    pub window_n: u32,
    pub trials: usize,
    /// Largest observed `|beta_q(X) - beta_q(X*)|`.
    pub max_abs_diff: u64,
    /// The a priori bound `2^{d+1}`: each of the two complexes changes on
    /// at most the `2^d` origin-anchored cubes.
    pub bound: u64,
    pub violations: usize,
}

/// Redraws the origin block `trials` times and tracks the Betti difference
/// at a fixed time.
pub fn check_resampling_bound(
    model: &ModelSpec,
    window_n: u32,
    q: usize,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<ResamplingBoundReport, ExperimentError> {
    if !model.is_product_measure() {
        return Err(ExperimentError::RequiresProductMeasure);
    }
    let d = model.ambient;
    assert!(q < d, "degree out of range");
    let window = Window::new(window_n, d);
    let region = window.enlarged();
    let bound = 1u64 << (d + 1);

    let diffs: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = SampleSeed::new(seed, i as u64);
            let cfg = sample_configuration(model, region, &s)?;
            let stirred = resample_origin(&cfg, model, &s)?;
            let a = persistence_diagram(&build_filtration(&cfg, window)?, q).betti_at(t);
            let b = persistence_diagram(&build_filtration(&stirred, window)?, q).betti_at(t);
            Ok(a.abs_diff(b))
        })
        .collect::<Result<_, ExperimentError>>()?;

    let max_abs_diff = diffs.iter().copied().max().unwrap_or(0);
    let violations = diffs.iter().filter(|&&v| v > bound).count();
    Ok(ResamplingBoundReport {
        model: model.to_string(),
        q,
        t,
        window_n,
        trials,
        max_abs_diff,
        bound,
        violations,
    })
}

/// Betti difference of a perturbed pair across a ladder of windows.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub q: usize,
    pub t: f64,
    /// `(n, beta_q(X^n) - beta_q(X*^n))` per window.
    pub diffs: Vec<(u32, i64)>,
    /// Smallest window from which the difference stays constant to the end.
    pub n_stable: u32,
    /// Whether the constant tail spans at least the last two windows.
    pub stabilized: bool,
}

/// Tracks `beta_q(X^n(t)) - beta_q(X*^n(t))` along `n_list` for a frozen
/// pair of configurations differing on finitely many cubes.
pub fn check_stabilization(
    cfg: &Configuration,
    perturbed: &Configuration,
    q: usize,
    t: f64,
    n_list: &[u32],
) -> Result<StabilizationReport, ExperimentError> {
    assert!(!n_list.is_empty(), "window ladder must be nonempty");
    let d = cfg.region().dim();
    let mut diffs = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let window = Window::new(n, d);
        let a = persistence_diagram(&build_filtration(cfg, window)?, q).betti_at(t) as i64;
        let b = persistence_diagram(&build_filtration(perturbed, window)?, q).betti_at(t) as i64;
        diffs.push((n, a - b));
    }
    let last = diffs.last().expect("nonempty").1;
    let mut n_stable = diffs.last().expect("nonempty").0;
    for &(n, v) in diffs.iter().rev() {
        if v == last {
            n_stable = n;
        } else {
            break;
        }
    }
    let stabilized = n_list.len() >= 2 && n_stable <= n_list[n_list.len() - 2];
    Ok(StabilizationReport { q, t, diffs, n_stable, stabilized })
}

/// One violation of a cube-count bound, kept for diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct BoundViolation {
    pub trial: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityBoundsReport {
    pub nested_trials: usize,
    pub cover_trials: usize,
    pub nested_violations: Vec<BoundViolation>,
    pub cover_violations: Vec<BoundViolation>,
}

impl AdditivityBoundsReport {
    pub fn passed(&self) -> bool {
        self.nested_violations.is_empty() && self.cover_violations.is_empty()
    }
}

/// Random nested pairs and random top-cell covers exercising the two
/// additivity bounds: Betti differences of nested sets are at most the cube
/// count difference, and cube counts added under a union of `m` top cells
/// are at most `3^d m`.
pub fn check_additivity_bounds(trials: usize, seed: u64) -> AdditivityBoundsReport {
    let mut rng = SplitMix64::new(seed);
    let mut nested_violations = Vec::new();
    let mut cover_violations = Vec::new();

    for trial in 0..trials {
        let d = 1 + (rng.next_below(3) as usize);
        let n = 1 + (rng.next_below(2) as u32);
        let window = Window::new(n, d);
        let stream = rng.next_u64();
        let model = ModelSpec::uniform(d);
        let cfg = sample_configuration(&model, window.enlarged(), &SampleSeed::new(seed, stream))
            .expect("sampling cannot fail on a valid window");
        let filt = build_filtration(&cfg, window).expect("region is enlarged");

        // Nested pair via two sublevels.
        let (s, t) = {
            let a = rng.next_f64();
            let b = rng.next_f64();
            (a.min(b), a.max(b))
        };
        let x = filt.sublevel(s);
        let y = filt.sublevel(t);
        let count_gap = (y.len() - x.len()) as u64;
        for q in 0..d {
            let bx = if x.is_empty() {
                0
            } else {
                betti(&x, CoefficientField::Gf2).expect("face-closed").get(q)
            };
            let by = if y.is_empty() {
                0
            } else {
                betti(&y, CoefficientField::Gf2).expect("face-closed").get(q)
            };
            if bx.abs_diff(by) > count_gap {
                nested_violations.push(BoundViolation {
                    trial,
                    detail: format!(
                        "d={d} q={q} s={s} t={t}: |{by} - {bx}| > {count_gap}"
                    ),
                });
            }
        }

        // Cover: add all cubes underneath a handful of random top cells.
        let m = 1 + rng.next_below(4) as usize;
        let mut tops = Vec::with_capacity(m);
        let full_extent = ((1u16 << d) - 1) as u8;
        for _ in 0..m {
            let anchor: Vec<i32> = (0..d)
                .map(|_| rng.next_below(2 * u64::from(n)) as i32 - n as i32)
                .collect();
            tops.push(ElementaryCube::new(&anchor, full_extent).expect("top cell in window"));
        }
        tops.sort_unstable();
        tops.dedup();
        let z_volume = tops.len() as u64;
        let mut union: Vec<ElementaryCube> = x.cubes().to_vec();
        for top in &tops {
            union.extend(top.faces_all());
        }
        let y_cover = CubicalSet::closure_of(union).expect("tops are nonempty");
        let added = (y_cover.len() - x.len()) as u64;
        let allowed = 3u64.pow(d as u32) * z_volume;
        if added > allowed {
            cover_violations.push(BoundViolation {
                trial,
                detail: format!("d={d} m={z_volume}: added {added} > {allowed}"),
            });
        }
    }

    AdditivityBoundsReport {
        nested_trials: trials,
        cover_trials: trials,
        nested_violations,
        cover_violations,
    }
}
