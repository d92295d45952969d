//! Face-closed finite collections of elementary cubes.

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::cube::{ElementaryCube, Window};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("empty cube collection has no ambient dimension")]
    Empty,
    #[error("mixed ambient dimensions {0} and {1}")]
    MixedAmbient(usize, usize),
    #[error("closure violation: face {face} of {cube} is missing")]
    MissingFace { cube: String, face: String },
}

/// A bounded cubical set, stored as its face-closed cube collection.
///
/// Cubes are kept sorted in cube order so downstream matrix layouts are
/// reproducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalSet {
    ambient: usize,
    cubes: Vec<ElementaryCube>,
}

impl CubicalSet {
    /// Builds a cubical set from cubes that must already be face-closed.
    pub fn from_cubes<I>(cubes: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = ElementaryCube>,
    {
        let set = Self::collect(cubes)?;
        let index: FxHashSet<ElementaryCube> = set.cubes.iter().copied().collect();
        for cube in &set.cubes {
            if cube.dim() == 0 {
                continue;
            }
            for face in cube.boundary_faces() {
                if !index.contains(&face) {
                    return Err(ComplexError::MissingFace {
                        cube: cube.to_string(),
                        face: face.to_string(),
                    });
                }
            }
        }
        Ok(set)
    }

    /// Builds the smallest cubical set containing the given cubes by adding
    /// every face.
    pub fn closure_of<I>(cubes: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = ElementaryCube>,
    {
        let mut closed: FxHashSet<ElementaryCube> = FxHashSet::default();
        for cube in cubes {
            for face in cube.faces_all() {
                closed.insert(face);
            }
        }
        Self::collect(closed)
    }

    /// The full complex on a window: every elementary cube it contains.
    pub fn full(window: &Window) -> Self {
        Self {
            ambient: window.dim(),
            cubes: window.all_cubes(),
        }
    }

    /// The empty cubical set in ambient dimension `ambient`.
    pub fn empty(ambient: usize) -> Self {
        assert!(
            (1..=crate::cube::MAX_AMBIENT).contains(&ambient),
            "ambient dimension out of range"
        );
        Self { ambient, cubes: Vec::new() }
    }

    fn collect<I>(cubes: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = ElementaryCube>,
    {
        let mut cubes: Vec<ElementaryCube> = cubes.into_iter().collect();
        let ambient = cubes.first().ok_or(ComplexError::Empty)?.ambient_dim();
        for cube in &cubes {
            if cube.ambient_dim() != ambient {
                return Err(ComplexError::MixedAmbient(ambient, cube.ambient_dim()));
            }
        }
        cubes.sort_unstable();
        cubes.dedup();
        Ok(Self { ambient, cubes })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Number of elementary cubes (all dimensions).
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn cubes(&self) -> &[ElementaryCube] {
        &self.cubes
    }

    pub fn contains(&self, cube: &ElementaryCube) -> bool {
        self.cubes.binary_search(cube).is_ok()
    }

    /// Cubes of one dimension, in cube order.
    pub fn cubes_of_dim(&self, k: usize) -> Vec<ElementaryCube> {
        self.cubes.iter().copied().filter(|c| c.dim() == k).collect()
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        self.cubes.iter().filter(|c| c.dim() == k).count()
    }

    /// Parses one cube per line, ignoring blank lines and `#` comments.
    pub fn parse_cube_list(text: &str) -> Result<Vec<ElementaryCube>, crate::cube::CubeError> {
        text.lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .map(str::parse)
            .collect()
    }
}
