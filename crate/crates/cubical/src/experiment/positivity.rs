//! A computable certificate that the limiting normalized Betti number is
//! strictly positive: an isolated hollow cube.
//!
//! The witness pattern around a `(q+1)`-cube `C` asks, in raw configuration
//! values, that every proper face of `C` is on by time `t` while `C` itself
//! and everything that could fill or touch the resulting cycle is off. Any
//! chain killing the boundary cycle of `C` would need a cell from the
//! switched-off neighborhood, so each occurrence inside a window carries an
//! independent homology class. Patterns in disjoint windows tile the
//! lattice, which turns the per-window occurrence probability into the
//! lower bound `beta_hat_q(t) >= P(pattern in Lambda_K) / (2K+2)^d`.
//!
//! The neighborhood is split off from the face set, so for product models
//! the per-position pattern probability factors exactly over marginals;
//! the Monte Carlo mean count per position is an unbiased estimate of it.

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use super::ExperimentError;
use crate::cube::{ElementaryCube, Window};
use crate::filtration::Configuration;
use crate::model::{sample_configuration, ModelSpec, SampleSeed};
use crate::stats::mean_std;

/// Witness counts for one sampled configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityWitness {
    pub window_k: u32,
    /// Number of positions whose pattern fired.
    pub count: u64,
    /// Number of candidate positions scanned.
    pub positions: u64,
}

/// The pattern neighborhood of a candidate cube: the cube itself, the
/// codimension-zero cofaces of its top-boundary cells, and every cube
/// containing any of those. Closed under taking supercubes, so switching
/// the whole set off keeps each member out of the sublevel set.
fn pattern_neighborhood(c: &ElementaryCube, q: usize) -> Vec<ElementaryCube> {
    let mut core: FxHashSet<ElementaryCube> = FxHashSet::default();
    core.insert(*c);
    for face in c.faces_all() {
        if face.dim() != q {
            continue;
        }
        for coface in face.supercubes(None) {
            if coface.dim() == q + 1 {
                core.insert(coface);
            }
        }
    }
    // Supercube closure; every member has dimension at least q+1, so the
    // set is disjoint from the proper faces of `c`.
    let mut neighborhood: FxHashSet<ElementaryCube> = FxHashSet::default();
    for cube in &core {
        for sup in cube.supercubes(None) {
            neighborhood.insert(sup);
        }
    }
    let mut out: Vec<ElementaryCube> = neighborhood.into_iter().collect();
    out.sort_unstable();
    out
}

fn pattern_fits(q: usize, k: u32, d: usize) -> bool {
    q < d && 2 * k as usize >= q + 2
}

/// Counts pattern occurrences over every `(q+1)`-cube inside `Lambda_K`.
///
/// The configuration must cover `Lambda_{K+1}` so each neighborhood value
/// exists.
pub fn count_positivity_witnesses(
    cfg: &Configuration,
    q: usize,
    t: f64,
    window_k: u32,
) -> Result<PositivityWitness, ExperimentError> {
    let d = cfg.region().dim();
    if !pattern_fits(q, window_k, d) {
        return Err(ExperimentError::PatternWindowMismatch { q, k: window_k, d });
    }
    if cfg.region().radius() < window_k + 1 {
        return Err(crate::filtration::FiltrationError::RegionTooSmall {
            need: window_k + 1,
            have: cfg.region().radius(),
        }
        .into());
    }
    let scan = Window::new(window_k, d);
    let candidates = scan.cubes_of_dim(q + 1);
    let mut count = 0u64;
    for c in &candidates {
        let faces_on = c
            .faces_all()
            .iter()
            .filter(|f| *f != c)
            .all(|f| cfg.value(f).expect("face inside region") <= t);
        if !faces_on {
            continue;
        }
        let neighborhood_off = pattern_neighborhood(c, q)
            .iter()
            .all(|n| cfg.value(n).expect("neighborhood inside enlarged region") > t);
        if neighborhood_off {
            count += 1;
        }
    }
    Ok(PositivityWitness { window_k, count, positions: candidates.len() as u64 })
}

/// Exact single-position pattern probability for a product-measure model:
/// the faces and the neighborhood are disjoint cube sets, so the event
/// probability is a product of marginal masses.
pub fn pattern_probability(
    model: &ModelSpec,
    q: usize,
    t: f64,
) -> Result<f64, ExperimentError> {
    let d = model.ambient;
    if q + 1 > d {
        return Err(ExperimentError::PatternWindowMismatch { q, k: 0, d });
    }
    if !model.is_product_measure() {
        return Err(ExperimentError::RequiresProductMeasure);
    }
    let anchor = vec![0i32; d];
    let extent = ((1u16 << (q + 1)) - 1) as u8;
    let c = ElementaryCube::new(&anchor, extent).expect("canonical cube");
    let mut p = 1.0;
    for face in c.faces_all() {
        if face == c {
            continue;
        }
        p *= model.marginal_cdf(face.dim())?.eval(t);
    }
    for n in pattern_neighborhood(&c, q) {
        p *= 1.0 - model.marginal_cdf(n.dim())?.eval(t);
    }
    Ok(p)
}

/// Monte Carlo positivity run over many sampled configurations.
#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub model: String,
    pub q: usize,
    pub t: f64,
    pub window_k: u32,
    pub samples: usize,
    pub positions_per_sample: u64,
    pub samples_with_witness: u64,
    pub total_witnesses: u64,
    /// Fraction of samples containing at least one witness: the estimate of
    /// the windowed pattern event's probability.
    pub p_hat_event: f64,
    /// `p_hat_event / (2K+2)^d`; strictly positive exactly when a witness
    /// was seen.
    pub lower_bound: f64,
    /// Mean witness count per position, an unbiased estimator of the
    /// closed-form single-position probability.
    pub p_hat_per_position: f64,
    /// Standard error of `p_hat_per_position`.
    pub per_position_se: f64,
    pub closed_form_per_position: f64,
}

pub fn run_positivity(
    model: &ModelSpec,
    q: usize,
    t: f64,
    window_k: u32,
    samples: usize,
    seed: u64,
) -> Result<PositivityReport, ExperimentError> {
    let d = model.ambient;
    if !pattern_fits(q, window_k, d) {
        return Err(ExperimentError::PatternWindowMismatch { q, k: window_k, d });
    }
    let region = Window::new(window_k + 1, d);
    let witnesses: Vec<PositivityWitness> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let cfg = sample_configuration(model, region, &SampleSeed::new(seed, i as u64))?;
            count_positivity_witnesses(&cfg, q, t, window_k)
        })
        .collect::<Result<_, ExperimentError>>()?;

    let positions = witnesses.first().map_or(0, |w| w.positions);
    let total: u64 = witnesses.iter().map(|w| w.count).sum();
    let with_witness = witnesses.iter().filter(|w| w.count > 0).count() as u64;
    let p_hat_event = with_witness as f64 / samples as f64;
    let per_position: Vec<f64> = witnesses
        .iter()
        .map(|w| w.count as f64 / positions as f64)
        .collect();
    let (p_hat_per_position, sd) = mean_std(&per_position);
    let per_position_se = sd / (samples as f64).sqrt();
    Ok(PositivityReport {
        model: model.to_string(),
        q,
        t,
        window_k,
        samples,
        positions_per_sample: positions,
        samples_with_witness: with_witness,
        total_witnesses: total,
        p_hat_event,
        lower_bound: p_hat_event / f64::from(2 * window_k + 2).powi(d as i32),
        p_hat_per_position,
        per_position_se,
        closed_form_per_position: pattern_probability(model, q, t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustc_hash::FxHashMap;

    fn cube(s: &str) -> ElementaryCube {
        s.parse().unwrap()
    }

    #[test]
    fn neighborhood_of_unit_square_in_the_plane() {
        // The square, plus its four edge-adjacent squares.
        let c = cube("2;0,0;1,1");
        let n = pattern_neighborhood(&c, 1);
        assert_eq!(n.len(), 5);
        assert!(n.contains(&c));
        assert!(n.contains(&cube("2;0,1;1,1")));
        assert!(n.contains(&cube("2;0,-1;1,1")));
        assert!(n.contains(&cube("2;1,0;1,1")));
        assert!(n.contains(&cube("2;-1,0;1,1")));
    }

    #[test]
    fn neighborhood_of_an_edge_in_the_plane_is_supercube_closed() {
        let c = cube("2;0,0;1,0");
        let n = pattern_neighborhood(&c, 0);
        for q in &n {
            for sup in q.supercubes(None) {
                assert!(n.contains(&sup), "supercube {sup} of {q} escaped");
            }
        }
        // Neither endpoint belongs to the switched-off set.
        assert!(!n.contains(&cube("2;0,0;0,0")));
        assert!(!n.contains(&cube("2;1,0;0,0")));
    }

    #[test]
    fn hand_built_isolated_hollow_square_counts_once() {
        let c = cube("2;0,0;1,1");
        let ring: Vec<ElementaryCube> =
            c.faces_all().into_iter().filter(|f| *f != c).collect();
        let region = Window::new(3, 2);
        let mut values = FxHashMap::default();
        for q in region.all_cubes() {
            values.insert(q, if ring.contains(&q) { 0.2 } else { 0.9 });
        }
        let cfg = Configuration::from_values(region, values).unwrap();
        let witness = count_positivity_witnesses(&cfg, 1, 0.5, 2).unwrap();
        assert_eq!(witness.count, 1);
        assert_eq!(witness.positions, 16);
    }

    #[test]
    fn full_complex_has_no_witnesses() {
        let region = Window::new(3, 2);
        let cfg = Configuration::from_fn(region, |_| 0.0);
        let witness = count_positivity_witnesses(&cfg, 1, 0.5, 2).unwrap();
        assert_eq!(witness.count, 0);
    }

    #[test]
    fn closed_form_matches_hand_computation_in_the_plane() {
        // Eight boundary cells on, five squares off.
        let model = ModelSpec::uniform(2);
        let t = 0.5f64;
        let p = pattern_probability(&model, 1, t).unwrap();
        let c = cube("2;0,0;1,1");
        let n_cells = pattern_neighborhood(&c, 1).len() as i32;
        assert_eq!(n_cells, 5);
        let expect = t.powi(8) * (1.0 - t).powi(n_cells);
        assert!((p - expect).abs() < 1e-15);
    }

    #[test]
    fn pattern_fit_precondition() {
        let region = Window::new(2, 2);
        let cfg = Configuration::from_fn(region, |_| 0.5);
        assert!(matches!(
            count_positivity_witnesses(&cfg, 1, 0.5, 1),
            Err(ExperimentError::PatternWindowMismatch { .. })
        ));
        // q+1 exceeding d is refused outright.
        assert!(matches!(
            pattern_probability(&ModelSpec::uniform(1), 1, 0.5),
            Err(ExperimentError::PatternWindowMismatch { .. })
        ));
    }

    #[test]
    fn every_witness_carries_a_homology_class() {
        // Force the pattern into otherwise-random configurations and check
        // the certificate's promise: the witness count is a lower bound for
        // the Betti number of the sublevel complex.
        use crate::filtration::build_filtration;
        use crate::model::{sample_configuration, ModelSpec, SampleSeed};
        use crate::persistence::persistence_diagram;
        use rustc_hash::FxHashMap;

        let model = ModelSpec::uniform(2);
        let (q, t, k) = (1usize, 0.5f64, 2u32);
        let region = Window::new(k + 2, 2);
        for i in 0..50u64 {
            let base = sample_configuration(&model, region, &SampleSeed::new(606, i)).unwrap();
            let mut values: FxHashMap<ElementaryCube, f64> =
                base.iter().map(|(c, v)| (*c, v)).collect();
            // Valid 2-cube anchors in the scan window run from -K to K-1.
            let anchor = [(i % 3) as i32 - 1, (i % 4) as i32 - 2];
            let c = ElementaryCube::new(&anchor, 0b11).unwrap();
            for face in c.faces_all() {
                if face != c {
                    values.insert(face, 0.2);
                }
            }
            for n in pattern_neighborhood(&c, q) {
                values.insert(n, 0.9);
            }
            let cfg = Configuration::from_values(region, values).unwrap();
            let witness = count_positivity_witnesses(&cfg, q, t, k).unwrap();
            assert!(witness.count >= 1);
            let filt = build_filtration(&cfg, Window::new(k + 1, 2)).unwrap();
            let beta = persistence_diagram(&filt, q).betti_at(t);
            assert!(
                beta >= witness.count,
                "sample {i}: {} witnesses but beta_1 = {beta}",
                witness.count
            );
        }
    }

    #[test]
    fn monte_carlo_mean_count_tracks_closed_form() {
        let model = ModelSpec::uniform(2);
        let report = run_positivity(&model, 1, 0.5, 2, 3000, 9090).unwrap();
        assert!(report.samples_with_witness > 0);
        assert!(report.lower_bound > 0.0);
        let gap = (report.p_hat_per_position - report.closed_form_per_position).abs();
        assert!(
            gap <= 3.0 * report.per_position_se.max(1e-9),
            "gap {gap} vs se {}",
            report.per_position_se
        );
    }
}
