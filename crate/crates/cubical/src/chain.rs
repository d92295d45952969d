//! Integer chains over elementary cubes, the boundary operator, the scalar
//! product, and the cubical product.
//!
//! Coefficients are arbitrary-precision integers so linearity identities can
//! be asserted exactly. Chains are kept canonical: no stored coefficient is
//! zero and every stored cube has the chain's homogeneous dimension.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::cube::ElementaryCube;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain dimension mismatch: {0} vs {1}")]
    DimensionMismatch(i32, i32),
    #[error("cube {0} has dimension {1}, expected {2}")]
    CubeDimension(String, usize, i32),
}

/// A formal integer combination of elementary cubes of one dimension.
///
/// `dim` may be `-1` (or any value) for the zero chain, which belongs to
/// every chain group.
#[derive(Clone, PartialEq, Eq)]
pub struct Chain {
    dim: i32,
    terms: BTreeMap<ElementaryCube, BigInt>,
}

impl Chain {
    /// The zero chain of dimension `k`.
    pub fn zero(k: i32) -> Self {
        Self { dim: k, terms: BTreeMap::new() }
    }

    /// The elementary chain of a single cube with coefficient one.
    pub fn elementary(cube: ElementaryCube) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(cube, BigInt::from(1));
        Self { dim: cube.dim() as i32, terms }
    }

    /// Builds a chain from cube/coefficient pairs, all of dimension `k`.
    pub fn from_terms<I>(k: i32, terms: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (ElementaryCube, BigInt)>,
    {
        let mut chain = Chain::zero(k);
        for (cube, coef) in terms {
            if cube.dim() as i32 != k {
                return Err(ChainError::CubeDimension(cube.to_string(), cube.dim(), k));
            }
            chain.add_term(cube, coef);
        }
        Ok(chain)
    }

    pub fn dim(&self) -> i32 {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, cube: &ElementaryCube) -> BigInt {
        self.terms.get(cube).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ElementaryCube, &BigInt)> {
        self.terms.iter()
    }

    fn add_term(&mut self, cube: ElementaryCube, coef: BigInt) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(cube) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coef;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// The cubical boundary, extended linearly from elementary chains.
    /// The boundary of any 0-chain is the zero chain.
    pub fn boundary(&self) -> Chain {
        let mut out = Chain::zero(self.dim - 1);
        if self.dim <= 0 {
            return out;
        }
        for (cube, coef) in &self.terms {
            for (sign, face) in cube.primary_faces().expect("positive-dimensional cube") {
                out.add_term(face, coef * sign);
            }
        }
        out
    }

    /// Scalar product `<c1, c2>`: sum of coefficient products over shared
    /// cubes. Both chains must have the same dimension.
    pub fn scalar_product(&self, other: &Chain) -> Result<BigInt, ChainError> {
        if self.dim != other.dim {
            return Err(ChainError::DimensionMismatch(self.dim, other.dim));
        }
        let mut acc = BigInt::zero();
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        for (cube, a) in &small.terms {
            if let Some(b) = large.terms.get(cube) {
                acc += a * b;
            }
        }
        Ok(acc)
    }

    /// Cubical product `c1 <> c2`: bilinear extension of the direct product
    /// of cubes. Dimensions and ambient dimensions both add.
    pub fn cubical_product(&self, other: &Chain) -> Chain {
        let mut out = Chain::zero(self.dim + other.dim);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let pq = p.product(q).expect("product ambient within cap");
                out.add_term(pq, a * b);
            }
        }
        out
    }

    pub fn scaled(&self, factor: &BigInt) -> Chain {
        if factor.is_zero() {
            return Chain::zero(self.dim);
        }
        let terms = self.terms.iter().map(|(c, a)| (*c, a * factor)).collect();
        Chain { dim: self.dim, terms }
    }
}

impl Add for &Chain {
    type Output = Chain;

    fn add(self, rhs: &Chain) -> Chain {
        assert_eq!(self.dim, rhs.dim, "chain addition requires equal dimensions");
        let mut out = self.clone();
        for (cube, coef) in &rhs.terms {
            out.add_term(*cube, coef.clone());
        }
        out
    }
}

impl Sub for &Chain {
    type Output = Chain;

    fn sub(self, rhs: &Chain) -> Chain {
        assert_eq!(self.dim, rhs.dim, "chain subtraction requires equal dimensions");
        let mut out = self.clone();
        for (cube, coef) in &rhs.terms {
            out.add_term(*cube, -coef.clone());
        }
        out
    }
}

impl Neg for &Chain {
    type Output = Chain;

    fn neg(self) -> Chain {
        let terms = self.terms.iter().map(|(c, a)| (*c, -a.clone())).collect();
        Chain { dim: self.dim, terms }
    }
}

impl Mul<&Chain> for i64 {
    type Output = Chain;

    fn mul(self, rhs: &Chain) -> Chain {
        rhs.scaled(&BigInt::from(self))
    }
}

/// One line per term: `coef cube`.
impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cube, coef) in &self.terms {
            writeln!(f, "{coef} {cube}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (dim {})", self.dim);
        }
        let mut first = true;
        for (cube, coef) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{coef}*{cube:?}")?;
            first = false;
        }
        Ok(())
    }
}
