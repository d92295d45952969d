//! Exact Betti numbers of bounded cubical sets via boundary-matrix ranks.
//!
//! Ranks are taken over GF(2) with bit-packed row elimination, or over the
//! rationals with fraction-free integer elimination. Betti numbers come out
//! of the rank-nullity bookkeeping
//! `beta_k = #K_k - rank d_k - rank d_{k+1}`; no Smith normal form is
//! computed, so integral torsion is not reported (a GF(2) vs rational
//! discrepancy check stands guard instead).

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::complex::{ComplexError, CubicalSet};
use crate::cube::ElementaryCube;

/// Coefficient choice for rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoefficientField {
    Gf2,
    Rational,
}

/// The matrix of the boundary operator restricted to a cubical set,
/// from `k`-chains to `(k-1)`-chains.
///
/// Rows index the `(k-1)`-cubes and columns the `k`-cubes, both in cube
/// order. Each column holds exactly the signed primary faces of its cube.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    k: usize,
    rows: Vec<ElementaryCube>,
    cols: Vec<ElementaryCube>,
    columns: Vec<Vec<(u32, i8)>>,
}

impl BoundaryMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_cubes(&self) -> &[ElementaryCube] {
        &self.rows
    }

    pub fn col_cubes(&self) -> &[ElementaryCube] {
        &self.cols
    }

    /// Signed entries of one column, sorted by row index.
    pub fn column(&self, j: usize) -> &[(u32, i8)] {
        &self.columns[j]
    }

    /// Matrix rank over the two-element field.
    pub fn rank_gf2(&self) -> usize {
        let columns: Vec<Vec<u32>> = self
            .columns
            .iter()
            .map(|col| col.iter().map(|&(i, _)| i).collect())
            .collect();
        rank_gf2_bitpacked(self.nrows(), self.ncols(), &columns)
    }

    /// Exact matrix rank over the rationals.
    ///
    /// Fraction-free elimination keeps every intermediate value an exact
    /// integer minor; machine-word arithmetic is tried first and the whole
    /// computation falls back to big integers if any product would overflow.
    pub fn rank_rational(&self) -> usize {
        let mut dense = vec![vec![0i128; self.ncols()]; self.nrows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, sign) in col {
                dense[i as usize][j] = i128::from(sign);
            }
        }
        match bareiss_rank_i128(&mut dense) {
            Some(rank) => rank,
            None => {
                let mut big = vec![vec![BigInt::zero(); self.ncols()]; self.nrows()];
                for (j, col) in self.columns.iter().enumerate() {
                    for &(i, sign) in col {
                        big[i as usize][j] = BigInt::from(sign);
                    }
                }
                bareiss_rank_bigint(&mut big)
            }
        }
    }

    pub fn rank(&self, field: CoefficientField) -> usize {
        match field {
            CoefficientField::Gf2 => self.rank_gf2(),
            CoefficientField::Rational => self.rank_rational(),
        }
    }
}

/// Builds the boundary matrix from `k`-chains of `x` to `(k-1)`-chains.
pub fn build_boundary_matrix(x: &CubicalSet, k: usize) -> Result<BoundaryMatrix, ComplexError> {
    assert!(k >= 1 && k <= x.ambient_dim(), "boundary degree out of range");
    let rows = x.cubes_of_dim(k - 1);
    let cols = x.cubes_of_dim(k);
    let row_index = |face: &ElementaryCube| rows.binary_search(face).ok();
    let mut columns = Vec::with_capacity(cols.len());
    for cube in &cols {
        let faces = cube.primary_faces().expect("k >= 1 cube");
        let mut column = Vec::with_capacity(faces.len());
        for (sign, face) in faces {
            let Some(i) = row_index(&face) else {
                return Err(ComplexError::MissingFace {
                    cube: cube.to_string(),
                    face: face.to_string(),
                });
            };
            column.push((i as u32, sign));
        }
        column.sort_unstable_by_key(|&(i, _)| i);
        columns.push(column);
    }
    Ok(BoundaryMatrix { k, rows, cols, columns })
}

/// The Betti numbers `beta_0 ... beta_d` of a cubical set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub values: Vec<u64>,
    pub field: CoefficientField,
}

impl BettiVector {
    pub fn get(&self, q: usize) -> u64 {
        self.values.get(q).copied().unwrap_or(0)
    }
}

/// Betti numbers via rank arithmetic over the requested field.
///
/// `beta_d` is computed and checked to vanish, in line with the fact that a
/// bounded cubical set in `R^d` carries no `d`-cycles.
pub fn betti(x: &CubicalSet, field: CoefficientField) -> Result<BettiVector, ComplexError> {
    let d = x.ambient_dim();
    if x.is_empty() {
        return Ok(BettiVector { values: vec![0; d + 1], field });
    }
    let counts: Vec<i64> = (0..=d).map(|k| x.count_of_dim(k) as i64).collect();
    let mut ranks = vec![0i64; d + 2];
    for (k, slot) in ranks.iter_mut().enumerate().skip(1).take(d) {
        *slot = build_boundary_matrix(x, k)?.rank(field) as i64;
    }
    let mut values = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let beta = counts[k] - ranks[k] - ranks[k + 1];
        assert!(beta >= 0, "negative Betti number computed: bug in rank computation");
        values.push(beta as u64);
    }
    assert_eq!(values[d], 0, "beta_d must vanish for cubical sets in R^d");
    Ok(BettiVector { values, field })
}

/// Alternating sum of cube counts. Always equals the alternating sum of
/// Betti numbers on face-closed input.
pub fn euler_characteristic(x: &CubicalSet) -> i64 {
    (0..=x.ambient_dim())
        .map(|k| {
            let count = x.count_of_dim(k) as i64;
            if k % 2 == 0 {
                count
            } else {
                -count
            }
        })
        .sum()
}

/// First dimension where GF(2) and rational Betti numbers disagree.
///
/// A disagreement would signal integral torsion interfering with the
/// rank-based Betti computation; none is expected at the scales this crate
/// targets.
pub fn torsion_alarm(x: &CubicalSet) -> Result<Option<(usize, u64, u64)>, ComplexError> {
    let gf2 = betti(x, CoefficientField::Gf2)?;
    let rational = betti(x, CoefficientField::Rational)?;
    Ok(gf2
        .values
        .iter()
        .zip(&rational.values)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(k, (&a, &b))| (k, a, b)))
}

/// Row-echelon rank over GF(2) with 64-bit packed rows.
pub(crate) fn rank_gf2_bitpacked(nrows: usize, ncols: usize, columns: &[Vec<u32>]) -> usize {
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    let words = ncols.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; nrows];
    for (j, col) in columns.iter().enumerate() {
        for &i in col {
            rows[i as usize][j / 64] ^= 1 << (j % 64);
        }
    }
    let mut rank = 0;
    for col in 0..ncols {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (rank..nrows).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (pivot_row, below) = rows[rank..].split_first_mut().expect("nonempty tail");
        for row in below {
            if row[w] >> b & 1 == 1 {
                // Rows in the active block are zero left of `col`.
                for (x, y) in row[w..].iter_mut().zip(&pivot_row[w..]) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Fraction-free elimination rank with machine integers; `None` on overflow.
fn bareiss_rank_i128(m: &mut [Vec<i128>]) -> Option<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = 1i128;
    let mut rank = 0;
    while rank < nrows.min(ncols) {
        let Some((pr, pc)) = ((rank..nrows)
            .flat_map(|i| (rank..ncols).map(move |j| (i, j))))
        .find(|&(i, j)| m[i][j] != 0) else {
            break;
        };
        m.swap(rank, pr);
        if pc != rank {
            for row in m.iter_mut() {
                row.swap(rank, pc);
            }
        }
        let pivot = m[rank][rank];
        for i in rank + 1..nrows {
            for j in rank + 1..ncols {
                let a = m[i][j].checked_mul(pivot)?;
                let b = m[i][rank].checked_mul(m[rank][j])?;
                // Exact by the Sylvester determinant identity.
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][rank] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

/// Arbitrary-precision twin of `bareiss_rank_i128`.
fn bareiss_rank_bigint(m: &mut [Vec<BigInt>]) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    while rank < nrows.min(ncols) {
        let Some((pr, pc)) = ((rank..nrows)
            .flat_map(|i| (rank..ncols).map(move |j| (i, j))))
        .find(|&(i, j)| !m[i][j].is_zero()) else {
            break;
        };
        m.swap(rank, pr);
        if pc != rank {
            for row in m.iter_mut() {
                row.swap(rank, pc);
            }
        }
        let pivot = m[rank][rank].clone();
        for i in rank + 1..nrows {
            for j in rank + 1..ncols {
                let val = (&m[i][j] * &pivot - &m[i][rank] * &m[rank][j]) / &prev;
                m[i][j] = val;
            }
            m[i][rank] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Window;

    fn cube(s: &str) -> ElementaryCube {
        s.parse().unwrap()
    }

    /// Four edges and four vertices of the unit square, no 2-cell.
    fn hollow_square() -> CubicalSet {
        CubicalSet::closure_of([
            cube("2;0,0;1,0"),
            cube("2;0,1;1,0"),
            cube("2;0,0;0,1"),
            cube("2;1,0;0,1"),
        ])
        .unwrap()
    }

    fn full_square() -> CubicalSet {
        CubicalSet::closure_of([cube("2;0,0;1,1")]).unwrap()
    }

    /// All faces of the unit 3-cube except the 3-cell itself.
    fn hollow_cube() -> CubicalSet {
        let faces = cube("3;0,0,0;1,1,1")
            .faces_all()
            .into_iter()
            .filter(|c| c.dim() < 3);
        CubicalSet::from_cubes(faces).unwrap()
    }

    #[test]
    fn boundary_matrix_of_hollow_square() {
        let m = build_boundary_matrix(&hollow_square(), 1).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (4, 4));
        for j in 0..4 {
            let col = m.column(j);
            assert_eq!(col.len(), 2);
            assert_eq!(col.iter().map(|&(_, s)| i32::from(s)).sum::<i32>(), 0);
        }
    }

    #[test]
    fn boundary_matrix_of_single_vertex() {
        let x = CubicalSet::from_cubes([cube("1;0;0")]).unwrap();
        let m = build_boundary_matrix(&x, 1).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (1, 0));
        assert_eq!(m.rank_gf2(), 0);
        assert_eq!(m.rank_rational(), 0);
    }

    #[test]
    fn boundary_matrix_of_full_square_two_cell() {
        let m = build_boundary_matrix(&full_square(), 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (4, 1));
        let signs: Vec<i8> = m.column(0).iter().map(|&(_, s)| s).collect();
        let mut sorted = signs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![-1, -1, 1, 1]);
    }

    #[test]
    fn gf2_rank_basics() {
        assert_eq!(rank_gf2_bitpacked(3, 3, &[vec![], vec![], vec![]]), 0);
        assert_eq!(rank_gf2_bitpacked(3, 3, &[vec![0], vec![1], vec![2]]), 3);
        let m = build_boundary_matrix(&hollow_square(), 1).unwrap();
        assert_eq!(m.rank_gf2(), 3);
    }

    #[test]
    fn rational_rank_matches_gf2_on_boundary_matrices() {
        for x in [hollow_square(), full_square(), hollow_cube()] {
            for k in 1..=x.ambient_dim() {
                let m = build_boundary_matrix(&x, k).unwrap();
                assert_eq!(m.rank_gf2(), m.rank_rational(), "k={k}");
            }
        }
    }

    #[test]
    fn rational_rank_of_scalar_matrix() {
        let mut m = vec![vec![2i128]];
        assert_eq!(bareiss_rank_i128(&mut m), Some(1));
    }

    #[test]
    fn rational_rank_of_hollow_cube_two_boundary() {
        let m = build_boundary_matrix(&hollow_cube(), 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (12, 6));
        assert_eq!(m.rank_rational(), 5);
    }

    #[test]
    fn bareiss_overflow_falls_back_to_bigint() {
        // A diagonal of huge values overflows i128 products immediately.
        let huge = i128::MAX / 2;
        let mut m = vec![vec![huge, 1], vec![1, huge]];
        assert_eq!(bareiss_rank_i128(&mut m), None);
        let mut big: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(huge), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(huge)],
        ];
        assert_eq!(bareiss_rank_bigint(&mut big), 2);
    }

    #[test]
    fn betti_of_known_spaces() {
        for field in [CoefficientField::Gf2, CoefficientField::Rational] {
            assert_eq!(betti(&hollow_square(), field).unwrap().values, vec![1, 1, 0]);
            assert_eq!(betti(&hollow_cube(), field).unwrap().values, vec![1, 0, 1, 0]);
            assert_eq!(betti(&full_square(), field).unwrap().values, vec![1, 0, 0]);
            for n in 1..=2 {
                let full = CubicalSet::full(&Window::new(n, 2));
                assert_eq!(betti(&full, field).unwrap().values, vec![1, 0, 0]);
            }
            let full3 = CubicalSet::full(&Window::new(1, 3));
            assert_eq!(betti(&full3, field).unwrap().values, vec![1, 0, 0, 0]);
        }
    }

    #[test]
    fn betti_of_empty_complex_is_zero() {
        let x = CubicalSet::empty(2);
        assert_eq!(betti(&x, CoefficientField::Gf2).unwrap().values, vec![0, 0, 0]);
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(euler_characteristic(&hollow_square()), 0);
        let v = CubicalSet::from_cubes([cube("1;0;0")]).unwrap();
        assert_eq!(euler_characteristic(&v), 1);
        assert_eq!(euler_characteristic(&hollow_cube()), 2);
    }

    #[test]
    fn euler_identity_on_samples() {
        for x in [hollow_square(), full_square(), hollow_cube()] {
            let b = betti(&x, CoefficientField::Rational).unwrap();
            let alt: i64 = b
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| if k % 2 == 0 { v as i64 } else { -(v as i64) })
                .sum();
            assert_eq!(euler_characteristic(&x), alt);
        }
    }

    #[test]
    fn no_torsion_alarm_on_small_spaces() {
        for x in [hollow_square(), full_square(), hollow_cube()] {
            assert_eq!(torsion_alarm(&x).unwrap(), None);
        }
    }

    #[test]
    fn no_torsion_alarm_on_random_complexes() {
        let mut rng = crate::rng::SplitMix64::new(88);
        for trial in 0..60 {
            let d = 1 + (trial % 3) as usize;
            let window = Window::new(if d == 3 { 1 } else { 2 }, d);
            let picked: Vec<ElementaryCube> = window
                .all_cubes()
                .into_iter()
                .filter(|_| rng.next_f64() < 0.4)
                .collect();
            if picked.is_empty() {
                continue;
            }
            let x = CubicalSet::closure_of(picked).unwrap();
            assert_eq!(torsion_alarm(&x).unwrap(), None, "trial {trial}");
        }
    }
}
