//! Random cubical set models and the reproducible sampler behind them.
//!
//! Three models are provided: birth times uniform on the cubes of one fixed
//! dimension (lower skeleta always present, higher cubes never), uniform on
//! all cubes, and a binary model built by ascending dimension where a cube
//! can appear only once its whole boundary has.
//!
//! Values are derived by a counter-style hash of `(seed, stream, cube)`, so
//! a configuration is a pure function of those inputs: iteration order and
//! thread count cannot change a sample, and translated or resampled
//! configurations stay coherent cube by cube.

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::cube::{ElementaryCube, Window};
use crate::filtration::Configuration;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("skeleton degree {k} exceeds ambient dimension {d}")]
    SkeletonDegree { k: usize, d: usize },
    #[error("probability vector needs {expect} entries, got {got}")]
    ProbabilityArity { expect: usize, got: usize },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("operation requires a product measure; this model is not one")]
    NotProductMeasure,
    #[error("translated region exceeds the sampled region")]
    OutOfRegion,
    #[error("malformed model string `{0}`")]
    Parse(String),
}

/// Which random cubical set law to sample from.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// Cubes below dimension `k` are always present from `t = 0`, cubes of
    /// dimension `k` get independent uniform birth times, higher cubes only
    /// appear at `t = 1`. `k = 1` is bond percolation.
    Bernoulli { k: usize },
    /// Independent uniform birth times on every cube.
    UniformAll,
    /// Binary presence sampled by ascending dimension: a cube is eligible
    /// once all its codimension-one faces are present, and an eligible cube
    /// of dimension `k` is kept with probability `p[k]`. Present cubes get
    /// birth 0, absent ones birth 1.
    CostaFarber { p: Vec<f64> },
}

/// A model plus the ambient dimension it lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub ambient: usize,
}

impl ModelSpec {
    pub fn bernoulli(d: usize, k: usize) -> Result<Self, ModelError> {
        if k > d {
            return Err(ModelError::SkeletonDegree { k, d });
        }
        Ok(Self { kind: ModelKind::Bernoulli { k }, ambient: d })
    }

    pub fn uniform(d: usize) -> Self {
        Self { kind: ModelKind::UniformAll, ambient: d }
    }

    pub fn costa_farber(d: usize, p: Vec<f64>) -> Result<Self, ModelError> {
        if p.len() != d + 1 {
            return Err(ModelError::ProbabilityArity { expect: d + 1, got: p.len() });
        }
        if let Some(&bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ModelError::ProbabilityRange(bad));
        }
        Ok(Self { kind: ModelKind::CostaFarber { p }, ambient: d })
    }

    /// Whether the law is a product measure over cubes. Origin resampling
    /// and the fluctuation experiments require this.
    pub fn is_product_measure(&self) -> bool {
        !matches!(self.kind, ModelKind::CostaFarber { .. })
    }

    /// Whether the marginal birth distributions are continuous enough for
    /// sup-over-t statistics. The binary model concentrates all mass on
    /// `{0, 1}`, so its Betti curves are two-step functions and uniform-in-t
    /// statements about them are vacuous; the harness refuses those runs.
    pub fn has_continuous_marginals(&self) -> bool {
        !matches!(self.kind, ModelKind::CostaFarber { .. })
    }

    /// Marginal distribution function of `omega_Q` for cubes of dimension `k`.
    pub fn marginal_cdf(&self, k: usize) -> Result<MarginalCdf, ModelError> {
        if k > self.ambient {
            return Err(ModelError::SkeletonDegree { k, d: self.ambient });
        }
        Ok(match &self.kind {
            ModelKind::Bernoulli { k: level } => {
                if k < *level {
                    MarginalCdf::DiracAtZero
                } else if k == *level {
                    MarginalCdf::Uniform
                } else {
                    MarginalCdf::DiracAtOne
                }
            }
            ModelKind::UniformAll => MarginalCdf::Uniform,
            ModelKind::CostaFarber { p } => {
                // A cube is present exactly when every face of every
                // dimension passes its own independent acceptance draw, so
                // the mass at zero factors over the face counts of a k-cube.
                let mut mass = 1.0;
                for (j, pj) in p.iter().enumerate().take(k + 1) {
                    let faces = binomial(k, j) * (1u64 << (k - j));
                    mass *= pj.powi(faces as i32);
                }
                MarginalCdf::TwoPoint { mass_at_zero: mass }
            }
        })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Bernoulli { k } => write!(f, "bernoulli:d={},k={}", self.ambient, k),
            ModelKind::UniformAll => write!(f, "uniform:d={}", self.ambient),
            ModelKind::CostaFarber { p } => {
                write!(f, "costafarber:d={},p=", self.ambient)?;
                for (i, v) in p.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `bernoulli:d=3,k=2`, `uniform:d=2`, `costafarber:d=2,p=1,0.5,0.25`.
impl FromStr for ModelSpec {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::Parse(s.to_string());
        let (name, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let mut d: Option<usize> = None;
        let mut k: Option<usize> = None;
        let mut p: Option<Vec<f64>> = None;
        // `p=` consumes the remainder: probabilities are comma separated.
        let mut tokens = rest.split(',').peekable();
        while let Some(tok) = tokens.next() {
            let (key, value) = tok.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "d" => d = Some(value.trim().parse().map_err(|_| bad())?),
                "k" => k = Some(value.trim().parse().map_err(|_| bad())?),
                "p" => {
                    let mut probs = vec![value.trim().parse().map_err(|_| bad())?];
                    for next in tokens.by_ref() {
                        probs.push(next.trim().parse().map_err(|_| bad())?);
                    }
                    p = Some(probs);
                }
                _ => return Err(bad()),
            }
        }
        let d = d.ok_or_else(bad)?;
        match name.trim() {
            "bernoulli" => ModelSpec::bernoulli(d, k.ok_or_else(bad)?),
            "uniform" => Ok(ModelSpec::uniform(d)),
            "costafarber" => ModelSpec::costa_farber(d, p.ok_or_else(bad)?),
            _ => Err(bad()),
        }
    }
}

/// Closed-form marginal distribution function of a birth value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarginalCdf {
    /// `F(t) = t` on `[0, 1]`.
    Uniform,
    /// All mass at 0: `F = 1` on `[0, 1]`.
    DiracAtZero,
    /// All mass at 1: `F(t) = 0` for `t < 1`, `F(1) = 1`.
    DiracAtOne,
    /// Mass `m` at 0 and `1 - m` at 1.
    TwoPoint { mass_at_zero: f64 },
}

impl MarginalCdf {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            MarginalCdf::Uniform => t.clamp(0.0, 1.0),
            MarginalCdf::DiracAtZero => 1.0,
            MarginalCdf::DiracAtOne => {
                if t >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            MarginalCdf::TwoPoint { mass_at_zero } => {
                if t >= 1.0 {
                    1.0
                } else {
                    mass_at_zero
                }
            }
        }
    }

    /// Continuity of `F` as a function on `[0, 1]`. Point masses sitting at
    /// an endpoint of the closed interval still count as jumps when the
    /// complementary mass is positive.
    pub fn is_continuous(&self) -> bool {
        match *self {
            MarginalCdf::Uniform | MarginalCdf::DiracAtZero => true,
            MarginalCdf::DiracAtOne => false,
            MarginalCdf::TwoPoint { mass_at_zero } => mass_at_zero >= 1.0,
        }
    }
}

/// Seed and stream identifying one Monte Carlo draw.
///
/// The same `(seed, stream, model, region)` always reproduces the same
/// configuration bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSeed {
    pub seed: u64,
    pub stream: u64,
}

impl SampleSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }
}

const RESAMPLE_TAG: u64 = 0x52455341_4d504c45; // "RESAMPLE"

use crate::rng::mix64 as mix;

/// Stateless uniform draw for one cube: a short hash chain over
/// `(seed, stream, anchor, extent)` finished to 53 random bits.
fn cube_uniform(seed: &SampleSeed, cube: &ElementaryCube) -> f64 {
    let mut h = mix(seed.seed ^ 0x9e3779b97f4a7c15);
    h = mix(h ^ seed.stream);
    for &a in cube.anchor() {
        h = mix(h ^ (a as u32 as u64));
    }
    h = mix(h ^ ((cube.extent() as u64) << 8 | cube.ambient_dim() as u64));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Draws a configuration of the model on the given sampling region.
pub fn sample_configuration(
    model: &ModelSpec,
    region: Window,
    seed: &SampleSeed,
) -> Result<Configuration, ModelError> {
    if region.dim() != model.ambient {
        return Err(ModelError::SkeletonDegree { k: region.dim(), d: model.ambient });
    }
    match &model.kind {
        ModelKind::Bernoulli { k } => {
            let k = *k;
            Ok(Configuration::from_fn(region, |cube| {
                use std::cmp::Ordering::*;
                match cube.dim().cmp(&k) {
                    Less => 0.0,
                    Equal => cube_uniform(seed, cube),
                    Greater => 1.0,
                }
            }))
        }
        ModelKind::UniformAll => {
            Ok(Configuration::from_fn(region, |cube| cube_uniform(seed, cube)))
        }
        ModelKind::CostaFarber { p } => {
            // Ascending dimension; presence of lower cells decides
            // eligibility, so a single pass over dimension levels suffices.
            let mut present: FxHashMap<ElementaryCube, bool> = FxHashMap::default();
            let mut values = FxHashMap::default();
            for (k, &pk) in p.iter().enumerate() {
                for cube in region.cubes_of_dim(k) {
                    let eligible = k == 0
                        || cube
                            .boundary_faces()
                            .iter()
                            .all(|face| present.get(face).copied().unwrap_or(false));
                    let keep = eligible && cube_uniform(seed, &cube) <= pk;
                    present.insert(cube, keep);
                    values.insert(cube, if keep { 0.0 } else { 1.0 });
                }
            }
            Configuration::from_values(region, values).map_err(|_| ModelError::OutOfRegion)
        }
    }
}

/// Lattice shift of a configuration: the value of cube `Q` in the result is
/// the value of `Q - x` in the input. The region shrinks by the shift's
/// sup-norm so every needed value exists.
pub fn translate_configuration(
    cfg: &Configuration,
    x: &[i32],
) -> Result<Configuration, ModelError> {
    let d = cfg.region().dim();
    assert_eq!(x.len(), d, "translation vector dimension");
    let shift = x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let radius = cfg.region().radius();
    if shift >= radius {
        return Err(ModelError::OutOfRegion);
    }
    let new_region = Window::new(radius - shift, d);
    let neg: Vec<i32> = x.iter().map(|v| -v).collect();
    let mut values = FxHashMap::default();
    for cube in new_region.all_cubes() {
        let source = cube.translate(&neg);
        let v = cfg.value(&source).ok_or(ModelError::OutOfRegion)?;
        values.insert(cube, v);
    }
    Configuration::from_values(new_region, values).map_err(|_| ModelError::OutOfRegion)
}

/// The `2^d` cubes anchored at the origin (minimum corner the origin).
pub fn origin_anchored_cubes(d: usize) -> Vec<ElementaryCube> {
    let zero = vec![0i32; d];
    (0u8..(1 << d))
        .map(|extent| ElementaryCube::new(&zero, extent).expect("origin cube"))
        .collect()
}

/// Redraws the values of the origin-anchored cubes from the same marginal
/// law, leaving every other cube untouched. Only meaningful for product
/// measures, where the redrawn block is independent of the rest.
pub fn resample_origin(
    cfg: &Configuration,
    model: &ModelSpec,
    seed: &SampleSeed,
) -> Result<Configuration, ModelError> {
    if !model.is_product_measure() {
        return Err(ModelError::NotProductMeasure);
    }
    let resample_seed = SampleSeed::new(seed.seed ^ RESAMPLE_TAG, seed.stream);
    let mut values: FxHashMap<ElementaryCube, f64> =
        cfg.iter().map(|(c, v)| (*c, v)).collect();
    for cube in origin_anchored_cubes(model.ambient) {
        if !values.contains_key(&cube) {
            continue;
        }
        let fresh = match &model.kind {
            ModelKind::Bernoulli { k } => {
                use std::cmp::Ordering::*;
                match cube.dim().cmp(k) {
                    Less => 0.0,
                    Equal => cube_uniform(&resample_seed, &cube),
                    Greater => 1.0,
                }
            }
            ModelKind::UniformAll => cube_uniform(&resample_seed, &cube),
            ModelKind::CostaFarber { .. } => unreachable!("rejected above"),
        };
        values.insert(cube, fresh);
    }
    Configuration::from_values(cfg.region(), values).map_err(|_| ModelError::OutOfRegion)
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}
