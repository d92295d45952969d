//! Elementary cubes on the integer lattice and windows `[-n, n]^d`.
//!
//! An elementary cube is a product of `d` elementary intervals, each either
//! a unit interval `[l, l+1]` or a single point `[l]`. We encode a cube as
//! its minimum corner plus a bitmask marking which axes are nondegenerate.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Hard cap on the ambient dimension. Large enough for every supported
/// workload, including cubical products of pairs with `d + d' <= 8`.
pub const MAX_AMBIENT: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubeError {
    #[error("ambient dimension {0} out of range 1..={MAX_AMBIENT}")]
    AmbientOutOfRange(usize),
    #[error("extent bit {bit} set beyond ambient dimension {ambient}")]
    ExtentBeyondAmbient { bit: usize, ambient: usize },
    #[error("cannot take primary faces of a 0-dimensional cube")]
    DegenerateBoundary,
    #[error("malformed cube literal `{0}`")]
    Parse(String),
}

/// A product of elementary intervals `I_1 x ... x I_d` with integer corners.
///
/// `extent` bit `i` set means axis `i` carries `[anchor_i, anchor_i + 1]`;
/// cleared means the degenerate interval `[anchor_i]`. Two cubes are equal
/// exactly when ambient dimension, anchor, and extent all agree.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementaryCube {
    ambient: u8,
    extent: u8,
    // Unused tail entries are kept zeroed so derived Eq/Hash stay honest.
    anchor: [i32; MAX_AMBIENT],
}

impl ElementaryCube {
    /// Builds a cube from its minimum corner and nondegeneracy mask.
    pub fn new(anchor: &[i32], extent: u8) -> Result<Self, CubeError> {
        let d = anchor.len();
        if d == 0 || d > MAX_AMBIENT {
            return Err(CubeError::AmbientOutOfRange(d));
        }
        if extent >> d != 0 {
            let bit = (8 - extent.leading_zeros() as usize) - 1;
            return Err(CubeError::ExtentBeyondAmbient { bit, ambient: d });
        }
        let mut a = [0i32; MAX_AMBIENT];
        a[..d].copy_from_slice(anchor);
        Ok(Self { ambient: d as u8, extent, anchor: a })
    }

    /// A single lattice point.
    pub fn vertex(anchor: &[i32]) -> Self {
        Self::new(anchor, 0).expect("vertex anchor within ambient cap")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient as usize
    }

    /// Number of nondegenerate components.
    pub fn dim(&self) -> usize {
        self.extent.count_ones() as usize
    }

    pub fn anchor(&self) -> &[i32] {
        &self.anchor[..self.ambient as usize]
    }

    pub fn extent(&self) -> u8 {
        self.extent
    }

    pub fn is_nondegenerate(&self, axis: usize) -> bool {
        self.extent & (1 << axis) != 0
    }

    /// Interval endpoints `(lo, hi)` along one axis; `lo == hi` when degenerate.
    pub fn interval(&self, axis: usize) -> (i32, i32) {
        let lo = self.anchor[axis];
        if self.is_nondegenerate(axis) {
            (lo, lo + 1)
        } else {
            (lo, lo)
        }
    }

    /// Point-set containment of elementary cubes: every interval of `other`
    /// must contain the corresponding interval of `self`.
    pub fn is_face_of(&self, other: &Self) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        for axis in 0..self.ambient_dim() {
            let (slo, shi) = self.interval(axis);
            let (olo, ohi) = other.interval(axis);
            if slo < olo || shi > ohi {
                return false;
            }
        }
        true
    }

    /// Signed codimension-one faces of a positive-dimensional cube: for the
    /// j-th nondegenerate axis (ascending, j = 1..k) the upper face carries
    /// sign `(-1)^(j-1)` and the lower face the opposite sign.
    pub fn primary_faces(&self) -> Result<Vec<(i8, ElementaryCube)>, CubeError> {
        if self.dim() == 0 {
            return Err(CubeError::DegenerateBoundary);
        }
        let mut out = Vec::with_capacity(2 * self.dim());
        let mut sign: i8 = 1;
        for axis in 0..self.ambient_dim() {
            if !self.is_nondegenerate(axis) {
                continue;
            }
            let mut upper = *self;
            upper.extent &= !(1 << axis);
            upper.anchor[axis] += 1;
            let mut lower = *self;
            lower.extent &= !(1 << axis);
            out.push((sign, upper));
            out.push((-sign, lower));
            sign = -sign;
        }
        Ok(out)
    }

    /// All faces of `self` including itself; `3^dim` cubes.
    pub fn faces_all(&self) -> Vec<ElementaryCube> {
        let mut out = vec![*self];
        for axis in 0..self.ambient_dim() {
            if !self.is_nondegenerate(axis) {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * 3);
            for cube in &out {
                next.push(*cube);
                let mut lower = *cube;
                lower.extent &= !(1 << axis);
                let mut upper = lower;
                upper.anchor[axis] += 1;
                next.push(lower);
                next.push(upper);
            }
            out = next;
        }
        out.sort_unstable();
        out
    }

    /// Proper codimension-one faces, unsigned.
    pub fn boundary_faces(&self) -> Vec<ElementaryCube> {
        self.primary_faces()
            .map(|faces| faces.into_iter().map(|(_, face)| face).collect())
            .unwrap_or_default()
    }

    /// All elementary cubes containing `self`, optionally restricted to those
    /// contained in `region`. Each degenerate axis contributes three choices
    /// (stay, extend down, extend up), so at most `3^(d - dim)` cubes.
    pub fn supercubes(&self, region: Option<&Window>) -> Vec<ElementaryCube> {
        let mut out = vec![*self];
        for axis in 0..self.ambient_dim() {
            if self.is_nondegenerate(axis) {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * 3);
            for cube in &out {
                next.push(*cube);
                let mut up = *cube;
                up.extent |= 1 << axis;
                let mut down = up;
                down.anchor[axis] -= 1;
                next.push(up);
                next.push(down);
            }
            out = next;
        }
        if let Some(w) = region {
            out.retain(|q| w.contains_cube(q));
        }
        out.sort_unstable();
        out
    }

    /// Direct product of cubes; ambient dimensions add.
    pub fn product(&self, other: &Self) -> Result<ElementaryCube, CubeError> {
        let d = self.ambient_dim() + other.ambient_dim();
        if d > MAX_AMBIENT {
            return Err(CubeError::AmbientOutOfRange(d));
        }
        let mut anchor = [0i32; MAX_AMBIENT];
        anchor[..self.ambient_dim()].copy_from_slice(self.anchor());
        anchor[self.ambient_dim()..d].copy_from_slice(other.anchor());
        let extent = self.extent | (other.extent << self.ambient_dim());
        Ok(Self { ambient: d as u8, extent, anchor })
    }

    /// Lattice translation `x + Q`.
    pub fn translate(&self, x: &[i32]) -> ElementaryCube {
        assert_eq!(x.len(), self.ambient_dim(), "translation vector dimension");
        let mut moved = *self;
        for (axis, dx) in x.iter().enumerate() {
            moved.anchor[axis] += dx;
        }
        moved
    }
}

// Lexicographic by anchor, then extent. This is the "cube order" used for
// deterministic matrix layouts and filtration tie-breaking.
impl Ord for ElementaryCube {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then_with(|| self.anchor().cmp(other.anchor()))
            .then_with(|| self.extent.cmp(&other.extent))
    }
}

impl PartialOrd for ElementaryCube {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Text form `d;a1,...,ad;e1,...,ed` used by fixtures and the CLI.
impl fmt::Display for ElementaryCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.ambient)?;
        for (i, a) in self.anchor().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ";")?;
        for axis in 0..self.ambient_dim() {
            if axis > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(self.is_nondegenerate(axis)))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ElementaryCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Geometric rendering, e.g. [0,1]x[2].
        for axis in 0..self.ambient_dim() {
            if axis > 0 {
                write!(f, "x")?;
            }
            let (lo, hi) = self.interval(axis);
            if lo == hi {
                write!(f, "[{lo}]")?;
            } else {
                write!(f, "[{lo},{hi}]")?;
            }
        }
        Ok(())
    }
}

impl FromStr for ElementaryCube {
    type Err = CubeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CubeError::Parse(s.to_string());
        let mut parts = s.trim().split(';');
        let d: usize = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let anchors = parts.next().ok_or_else(bad)?;
        let extents = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let anchor: Vec<i32> = anchors
            .split(',')
            .map(|tok| tok.trim().parse::<i32>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let bits: Vec<u8> = extents
            .split(',')
            .map(|tok| tok.trim().parse::<u8>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if anchor.len() != d || bits.len() != d || bits.iter().any(|&b| b > 1) {
            return Err(bad());
        }
        let mut extent = 0u8;
        for (axis, &b) in bits.iter().enumerate() {
            extent |= b << axis;
        }
        ElementaryCube::new(&anchor, extent)
    }
}

/// The centered box `Lambda_n = [-n, n]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    n: u32,
    dim: usize,
}

impl Window {
    pub fn new(n: u32, dim: usize) -> Self {
        assert!(n >= 1, "window radius must be positive");
        assert!((1..=MAX_AMBIENT).contains(&dim), "window ambient dimension");
        Self { n, dim }
    }

    pub fn radius(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lebesgue volume `(2n)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * f64::from(self.n)).powi(self.dim as i32)
    }

    /// The sampling region one step larger, `Lambda_{n+1}`.
    pub fn enlarged(&self) -> Window {
        Window::new(self.n + 1, self.dim)
    }

    pub fn contains_cube(&self, cube: &ElementaryCube) -> bool {
        if cube.ambient_dim() != self.dim {
            return false;
        }
        let n = self.n as i32;
        (0..self.dim).all(|axis| {
            let (lo, hi) = cube.interval(axis);
            lo >= -n && hi <= n
        })
    }

    /// All `k`-dimensional cubes contained in the window, in cube order.
    pub fn cubes_of_dim(&self, k: usize) -> Vec<ElementaryCube> {
        assert!(k <= self.dim, "cube dimension exceeds ambient");
        let mut out = Vec::new();
        let mut anchor = vec![0i32; self.dim];
        for extent in 0u8..1 << self.dim {
            if extent.count_ones() as usize != k {
                continue;
            }
            self.collect_anchors(extent, 0, &mut anchor, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Every cube contained in the window, all dimensions, in cube order.
    pub fn all_cubes(&self) -> Vec<ElementaryCube> {
        let mut out = Vec::new();
        let mut anchor = vec![0i32; self.dim];
        for extent in 0u8..1 << self.dim {
            self.collect_anchors(extent, 0, &mut anchor, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn collect_anchors(
        &self,
        extent: u8,
        axis: usize,
        anchor: &mut Vec<i32>,
        out: &mut Vec<ElementaryCube>,
    ) {
        if axis == self.dim {
            out.push(ElementaryCube::new(anchor, extent).expect("window cube within cap"));
            return;
        }
        let n = self.n as i32;
        // Nondegenerate intervals [a, a+1] need a+1 <= n.
        let hi = if extent & (1 << axis) != 0 { n - 1 } else { n };
        for a in -n..=hi {
            anchor[axis] = a;
            self.collect_anchors(extent, axis + 1, anchor, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cube(s: &str) -> ElementaryCube {
        s.parse().unwrap()
    }

    #[test]
    fn dim_counts_nondegenerate_axes() {
        assert_eq!(cube("2;0,2;1,0").dim(), 1); // [0,1]x[2]
        assert_eq!(cube("2;0,0;0,0").dim(), 0); // [0]x[0]
        assert_eq!(cube("3;0,0,0;1,1,1").dim(), 3); // [0,1]^3
    }

    #[test]
    fn primary_faces_of_unit_interval() {
        let q = cube("1;0;1");
        let faces = q.primary_faces().unwrap();
        assert_eq!(faces, vec![(1, cube("1;1;0")), (-1, cube("1;0;0"))]);
    }

    #[test]
    fn primary_faces_of_unit_square() {
        let q = cube("2;0,0;1,1");
        let faces = q.primary_faces().unwrap();
        let expect = vec![
            (1, cube("2;1,0;0,1")),  // [1]x[0,1]
            (-1, cube("2;0,0;0,1")), // [0]x[0,1]
            (-1, cube("2;0,1;1,0")), // [0,1]x[1]
            (1, cube("2;0,0;1,0")),  // [0,1]x[0]
        ];
        assert_eq!(faces, expect);
    }

    #[test]
    fn primary_faces_single_nondegenerate_axis() {
        let q = cube("2;3,5;0,1"); // [3]x[5,6]
        let faces = q.primary_faces().unwrap();
        assert_eq!(faces, vec![(1, cube("2;3,6;0,0")), (-1, cube("2;3,5;0,0"))]);
    }

    #[test]
    fn primary_faces_rejects_points() {
        assert_eq!(cube("1;4;0").primary_faces(), Err(CubeError::DegenerateBoundary));
    }

    #[test]
    fn faces_all_counts() {
        assert_eq!(cube("1;0;1").faces_all().len(), 3);
        assert_eq!(cube("2;0,0;1,1").faces_all().len(), 9);
        let p = cube("2;7,-3;0,0");
        assert_eq!(p.faces_all(), vec![p]);
    }

    #[test]
    fn supercubes_of_a_vertex_in_dim_one() {
        let sup = cube("1;0;0").supercubes(None);
        assert_eq!(sup, vec![cube("1;-1;1"), cube("1;0;0"), cube("1;0;1")]);
    }

    #[test]
    fn supercubes_of_full_dim_cube_is_itself() {
        let q = cube("1;0;1");
        assert_eq!(q.supercubes(None), vec![q]);
    }

    #[test]
    fn supercubes_of_vertex_in_dim_two() {
        assert_eq!(cube("2;0,0;0,0").supercubes(None).len(), 9);
    }

    #[test]
    fn supercubes_respect_region() {
        let w = Window::new(1, 1);
        let sup = cube("1;1;0").supercubes(Some(&w));
        // [1,2] sticks out of [-1,1]; only [0,1] and [1] remain.
        assert_eq!(sup, vec![cube("1;0;1"), cube("1;1;0")]);
    }

    #[test]
    fn window_enumeration_small_cases() {
        let w = Window::new(1, 1);
        assert_eq!(
            w.cubes_of_dim(0),
            vec![cube("1;-1;0"), cube("1;0;0"), cube("1;1;0")]
        );
        assert_eq!(w.cubes_of_dim(1), vec![cube("1;-1;1"), cube("1;0;1")]);
        assert_eq!(Window::new(1, 2).cubes_of_dim(1).len(), 12);
    }

    #[test]
    fn window_counts_match_closed_forms() {
        fn binom(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
        }
        for d in 1..=3usize {
            for n in 1..=3u32 {
                let w = Window::new(n, d);
                let side = 2 * n as usize;
                let mut total = 0;
                for k in 0..=d {
                    let count = w.cubes_of_dim(k).len();
                    let expect = binom(d, k) * side.pow(k as u32) * (side + 1).pow((d - k) as u32);
                    assert_eq!(count, expect, "d={d} n={n} k={k}");
                    total += count;
                }
                assert_eq!(total, (2 * side + 1).pow(d as u32));
                assert_eq!(total, w.all_cubes().len());
            }
        }
    }

    #[test]
    fn supercube_face_duality_exhaustive_small_dims() {
        for d in 1..=3usize {
            let w = Window::new(1, d);
            for p in w.all_cubes() {
                for r in p.supercubes(None) {
                    assert!(r.faces_all().contains(&p), "{p} not a face of {r}");
                }
                for f in p.faces_all() {
                    assert!(f.supercubes(None).contains(&p), "{p} lost among supercubes of {f}");
                }
            }
        }
    }

    #[test]
    fn text_format_round_trips() {
        for s in ["1;0;1", "2;-3,5;1,0", "3;0,-1,2;1,1,0"] {
            let q = cube(s);
            assert_eq!(q.to_string(), s);
            assert_eq!(q.to_string().parse::<ElementaryCube>().unwrap(), q);
        }
        assert!("2;0;1,1".parse::<ElementaryCube>().is_err());
        assert!("2;0,0;1,2".parse::<ElementaryCube>().is_err());
        assert!("".parse::<ElementaryCube>().is_err());
    }

    fn arb_cube(max_d: usize) -> impl Strategy<Value = ElementaryCube> {
        (1..=max_d).prop_flat_map(|d| {
            (
                proptest::collection::vec(-4i32..=4, d),
                0u8..(1 << d),
            )
                .prop_map(move |(anchor, extent)| ElementaryCube::new(&anchor, extent).unwrap())
        })
    }

    proptest! {
        #[test]
        fn faces_all_has_three_to_the_dim(q in arb_cube(4)) {
            let faces = q.faces_all();
            prop_assert_eq!(faces.len(), 3usize.pow(q.dim() as u32));
            for f in &faces {
                prop_assert!(f.is_face_of(&q));
            }
        }

        #[test]
        fn k_face_counts_match_binomial_formula(q in arb_cube(4)) {
            let m = q.dim();
            let faces = q.faces_all();
            for k in 0..=m {
                let count = faces.iter().filter(|f| f.dim() == k).count();
                let binom = (0..k).fold(1usize, |acc, i| acc * (m - i) / (i + 1));
                prop_assert_eq!(count, binom * 2usize.pow((m - k) as u32));
            }
        }

        #[test]
        fn supercube_face_duality(p in arb_cube(3)) {
            // R is a supercube of P exactly when P is a face of R.
            for r in p.supercubes(None) {
                prop_assert!(p.is_face_of(&r));
                prop_assert!(r.faces_all().contains(&p));
            }
            prop_assert!(p.supercubes(None).len() <= 3usize.pow((p.ambient_dim() - p.dim()) as u32));
        }

        #[test]
        fn primary_faces_structure(q in arb_cube(4).prop_filter("positive dim", |q| q.dim() > 0)) {
            let faces = q.primary_faces().unwrap();
            prop_assert_eq!(faces.len(), 2 * q.dim());
            for (sign, f) in faces {
                prop_assert!(sign == 1 || sign == -1);
                prop_assert_eq!(f.dim(), q.dim() - 1);
                prop_assert!(f.is_face_of(&q));
            }
        }
    }
}
