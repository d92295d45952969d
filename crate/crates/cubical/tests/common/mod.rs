//! Shared test oracles: dense brute-force rank computations independent of
//! the library's bit-packed and fraction-free elimination paths, plus a
//! random face-closed complex generator.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, Zero};

use cubical::chain::Chain;
use cubical::cube::Window;
use cubical::rng::SplitMix64;
use cubical::CubicalSet;

/// Plain dense Gauss-Jordan elimination over GF(2) on a boolean matrix.
pub fn dense_bool_rank(mut m: Vec<Vec<bool>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c]) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Dense Gaussian elimination with explicit fraction arithmetic; falls back
/// to arbitrary precision if a machine-word product would overflow.
pub fn dense_rational_rank(entries: &[Vec<i8>]) -> usize {
    match ratio_rank_machine(entries) {
        Some(rank) => rank,
        None => ratio_rank_big(entries),
    }
}

fn ratio_rank_machine(entries: &[Vec<i8>]) -> Option<usize> {
    type Q = Ratio<i128>;
    let rows = entries.len();
    if rows == 0 {
        return Some(0);
    }
    let cols = entries[0].len();
    let mut m: Vec<Vec<Q>> = entries
        .iter()
        .map(|row| row.iter().map(|&e| Q::from_integer(i128::from(e))).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (upper, lower) = m.split_at_mut(rank + 1);
        let pivot_row = &upper[rank];
        let pivot = pivot_row[c];
        for row in lower.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].checked_div(&pivot)?;
            for (x, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                let prod = factor.checked_mul(pv)?;
                *x = x.checked_sub(&prod)?;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn ratio_rank_big(entries: &[Vec<i8>]) -> usize {
    let rows = entries.len();
    if rows == 0 {
        return 0;
    }
    let cols = entries[0].len();
    let mut m: Vec<Vec<BigRational>> = entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|&e| BigRational::from_integer(BigInt::from(e)))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (upper, lower) = m.split_at_mut(rank + 1);
        let pivot_row = &upper[rank];
        let pivot = pivot_row[c].clone();
        for row in lower.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let factor = &row[c] / &pivot;
            for (x, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= &factor * pv;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Signed dense boundary matrix from `k`-chains to `(k-1)`-chains, built
/// through the chain algebra rather than the homology engine.
pub fn dense_boundary_entries(x: &CubicalSet, k: usize) -> Vec<Vec<i8>> {
    let rows = x.cubes_of_dim(k - 1);
    let cols = x.cubes_of_dim(k);
    let mut entries = vec![vec![0i8; cols.len()]; rows.len()];
    for (j, cube) in cols.iter().enumerate() {
        let boundary = Chain::elementary(*cube).boundary();
        for (face, coef) in boundary.iter() {
            let i = rows.binary_search(face).expect("face closure");
            let c = i64::try_from(coef.clone()).expect("small coefficient");
            entries[i][j] = c as i8;
        }
    }
    entries
}

/// Betti numbers from dense eliminations only.
pub fn oracle_betti(x: &CubicalSet, rational: bool) -> Vec<u64> {
    let d = x.ambient_dim();
    if x.is_empty() {
        return vec![0; d + 1];
    }
    let mut ranks = vec![0usize; d + 2];
    for (k, slot) in ranks.iter_mut().enumerate().skip(1).take(d) {
        let entries = dense_boundary_entries(x, k);
        *slot = if rational {
            dense_rational_rank(&entries)
        } else {
            let bools: Vec<Vec<bool>> = entries
                .iter()
                .map(|row| row.iter().map(|&e| e != 0).collect())
                .collect();
            dense_bool_rank(bools)
        };
    }
    (0..=d)
        .map(|k| (x.count_of_dim(k) - ranks[k] - ranks[k + 1]) as u64)
        .collect()
}

/// Random face-closed complex: a density-`p` Bernoulli thinning of the
/// window's cubes, closed under faces.
pub fn random_complex(window: &Window, rng: &mut SplitMix64) -> CubicalSet {
    let p = rng.next_f64();
    let picked: Vec<_> = window
        .all_cubes()
        .into_iter()
        .filter(|_| rng.next_f64() < p)
        .collect();
    if picked.is_empty() {
        CubicalSet::empty(window.dim())
    } else {
        CubicalSet::closure_of(picked).expect("nonempty pick")
    }
}
