//! Configurations of birth values and the sublevel filtration they induce.
//!
//! A configuration assigns a value in `[0, 1]` to every elementary cube of a
//! sampling region. A cube belongs to the sublevel set at `t` exactly when
//! some cube containing it has value at most `t`, so the birth time of a
//! cube is the minimum value over its supercubes. Taking the minimum makes
//! the family of sublevel sets face-closed at every `t`.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::complex::CubicalSet;
use crate::cube::{ElementaryCube, Window};

#[derive(Debug, Error, PartialEq)]
pub enum FiltrationError {
    #[error("no value for cube {0} in the sampling region")]
    MissingValue(String),
    #[error("value {value} for cube {cube} outside [0, 1]")]
    ValueOutOfRange { cube: String, value: f64 },
    #[error("sampling region radius {have} too small; analysis window needs {need}")]
    RegionTooSmall { need: u32, have: u32 },
    #[error("ambient dimension mismatch: window {0}, region {1}")]
    DimensionMismatch(usize, usize),
    #[error("malformed configuration line `{0}`")]
    Parse(String),
}

/// Birth values `omega_Q` for every cube of a sampling region.
#[derive(Clone, Debug)]
pub struct Configuration {
    region: Window,
    values: FxHashMap<ElementaryCube, f64>,
}

impl Configuration {
    /// Builds a configuration from a complete value map over the region.
    pub fn from_values(
        region: Window,
        values: FxHashMap<ElementaryCube, f64>,
    ) -> Result<Self, FiltrationError> {
        for cube in region.all_cubes() {
            match values.get(&cube) {
                None => return Err(FiltrationError::MissingValue(cube.to_string())),
                Some(&v) if !(0.0..=1.0).contains(&v) => {
                    return Err(FiltrationError::ValueOutOfRange {
                        cube: cube.to_string(),
                        value: v,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(Self { region, values })
    }

    /// Builds a configuration by evaluating `f` on every cube of the region.
    pub fn from_fn(region: Window, mut f: impl FnMut(&ElementaryCube) -> f64) -> Self {
        let values = region
            .all_cubes()
            .into_iter()
            .map(|cube| {
                let v = f(&cube);
                debug_assert!((0.0..=1.0).contains(&v), "birth value outside [0,1]");
                (cube, v)
            })
            .collect();
        Self { region, values }
    }

    pub fn region(&self) -> Window {
        self.region
    }

    pub fn value(&self, cube: &ElementaryCube) -> Option<f64> {
        self.values.get(cube).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ElementaryCube, f64)> {
        self.values.iter().map(|(c, &v)| (c, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Minimum value over the supercubes of `p` inside the sampling region.
    ///
    /// This is the time at which `p` enters the sublevel set; it never
    /// exceeds `omega_p` itself.
    pub fn birth_time(&self, p: &ElementaryCube) -> Result<f64, FiltrationError> {
        let mut best: Option<f64> = None;
        for q in p.supercubes(Some(&self.region)) {
            let v = self
                .values
                .get(&q)
                .copied()
                .ok_or_else(|| FiltrationError::MissingValue(q.to_string()))?;
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
        best.ok_or_else(|| FiltrationError::MissingValue(p.to_string()))
    }

    /// Serializes as one `cube value` pair per line, in cube order.
    pub fn dump(&self) -> String {
        let mut cubes: Vec<&ElementaryCube> = self.values.keys().collect();
        cubes.sort_unstable();
        let mut out = String::new();
        for cube in cubes {
            out.push_str(&format!("{} {}\n", cube, self.values[cube]));
        }
        out
    }

    /// Parses the `dump` format. The region must be supplied by the caller
    /// and is checked for completeness.
    pub fn parse(region: Window, text: &str) -> Result<Self, FiltrationError> {
        let mut values = FxHashMap::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || FiltrationError::Parse(line.to_string());
            let (cube_tok, value_tok) = line.split_once(char::is_whitespace).ok_or_else(bad)?;
            let cube: ElementaryCube = cube_tok.parse().map_err(|_| bad())?;
            let value: f64 = value_tok.trim().parse().map_err(|_| bad())?;
            values.insert(cube, value);
        }
        Self::from_values(region, values)
    }
}

/// One cell of a filtration: a cube plus the time it enters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilteredCell {
    pub cube: ElementaryCube,
    pub birth: f64,
}

/// Every cube of an analysis window together with its birth time, sorted by
/// `(birth, dim, cube)`. Faces never arrive after their cofaces.
#[derive(Clone, Debug)]
pub struct Filtration {
    window: Window,
    cells: Vec<FilteredCell>,
}

impl Filtration {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn cells(&self) -> &[FilteredCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn birth_of(&self, cube: &ElementaryCube) -> Option<f64> {
        self.cells
            .iter()
            .find(|cell| cell.cube == *cube)
            .map(|cell| cell.birth)
    }

    /// The face-closed cubical set of cells born at or before `t`.
    pub fn sublevel(&self, t: f64) -> CubicalSet {
        let cubes: Vec<ElementaryCube> = self
            .cells
            .iter()
            .take_while(|cell| cell.birth <= t)
            .map(|cell| cell.cube)
            .collect();
        if cubes.is_empty() {
            return CubicalSet::empty(self.window.dim());
        }
        CubicalSet::from_cubes(cubes).expect("sublevel sets are face-closed")
    }

    /// Distinct birth values in increasing order.
    pub fn birth_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.cells.iter().map(|cell| cell.birth).collect();
        out.sort_unstable_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Assembles the filtration of the analysis window from a configuration on
/// the enlarged sampling region.
///
/// Every cube of `Lambda_n` has all of its supercubes inside
/// `Lambda_{n+1}`, so the computed birth times agree with the unbounded
/// sublevel construction intersected with the window.
pub fn build_filtration(cfg: &Configuration, window: Window) -> Result<Filtration, FiltrationError> {
    if cfg.region().dim() != window.dim() {
        return Err(FiltrationError::DimensionMismatch(window.dim(), cfg.region().dim()));
    }
    if cfg.region().radius() < window.radius() + 1 {
        return Err(FiltrationError::RegionTooSmall {
            need: window.radius() + 1,
            have: cfg.region().radius(),
        });
    }
    let mut cells = Vec::new();
    for cube in window.all_cubes() {
        let birth = cfg.birth_time(&cube)?;
        cells.push(FilteredCell { cube, birth });
    }
    cells.sort_unstable_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then_with(|| a.cube.dim().cmp(&b.cube.dim()))
            .then_with(|| a.cube.cmp(&b.cube))
    });
    Ok(Filtration { window, cells })
}
