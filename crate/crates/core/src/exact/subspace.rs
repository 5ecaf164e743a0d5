use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{kernel, RatMatrix};
use super::primitive_integer_vector;
use num_bigint::BigInt;

/// A subspace of `Q^r`, stored as the nonzero rows of its reduced row
/// echelon basis. Two subspaces are equal iff their representations are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalSubspace {
    ambient: usize,
    basis: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl RationalSubspace {
    pub fn zero(ambient: usize) -> Self {
        RationalSubspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(
            ambient,
            (0..ambient).map(|i| {
                let mut v = vec![BigRational::zero(); ambient];
                v[i] = BigRational::one();
                v
            }),
        )
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vec<BigRational>>) -> Self {
        let rows: Vec<Vec<BigRational>> = vectors.into_iter().collect();
        if rows.is_empty() {
            return Self::zero(ambient);
        }
        for v in &rows {
            assert_eq!(v.len(), ambient, "vector length differs from ambient dimension");
        }
        let m = RatMatrix::from_rows(rows).expect("equal-length rows");
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        RationalSubspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors scaled to primitive integer vectors.
    pub fn integer_basis(&self) -> Vec<Vec<BigInt>> {
        self.basis.iter().map(|v| primitive_integer_vector(v)).collect()
    }

    /// Columns not carrying a pivot; they index coordinates on `Q^r / self`.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// `v` minus its component along the basis so that it vanishes on the
    /// pivot columns.
    pub fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut out = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = out[pc].clone();
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(row) {
                *o -= &c * b;
            }
        }
        out
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        Self::span(self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    /// Orthogonal complement under the standard pairing.
    pub fn annihilator(&self) -> Self {
        if self.is_zero() {
            return Self::full(self.ambient);
        }
        let m = RatMatrix::from_rows(self.basis.clone()).expect("rectangular basis");
        kernel(&m)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// `m W ⊆ W` for `m` acting on column vectors.
    pub fn is_invariant(&self, m: &RatMatrix) -> bool {
        self.basis.iter().all(|v| self.contains(&m.mul_vec(v)))
    }

    /// Coordinates of a member of `self` in the echelon basis.
    pub fn coordinates(&self, v: &[BigRational]) -> Vec<BigRational> {
        debug_assert!(self.contains(v));
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    /// Matrix of `m` restricted to this invariant subspace, in echelon
    /// coordinates.
    pub fn restrict(&self, m: &RatMatrix) -> RatMatrix {
        let k = self.dim();
        let images: Vec<Vec<BigRational>> =
            self.basis.iter().map(|v| self.coordinates(&m.mul_vec(v))).collect();
        RatMatrix::from_fn(k, k, |i, j| images[j][i].clone())
    }

    /// Matrix of the map `m` induces on `Q^r / self`, in the coordinates
    /// given by [`free_columns`](Self::free_columns).
    pub fn quotient_matrix(&self, m: &RatMatrix) -> RatMatrix {
        let free = self.free_columns();
        let k = free.len();
        let images: Vec<Vec<BigRational>> = free
            .iter()
            .map(|&c| {
                let col = self.reduce(&m.column(c));
                free.iter().map(|&f| col[f].clone()).collect()
            })
            .collect();
        RatMatrix::from_fn(k, k, |i, j| images[j][i].clone())
    }

    /// Lifts a subspace of the quotient coordinates back to `Q^r`; the
    /// result contains `self`.
    pub fn preimage(&self, quotient_sub: &Self) -> Self {
        let free = self.free_columns();
        assert_eq!(quotient_sub.ambient, free.len());
        let lifted = quotient_sub.basis.iter().map(|u| {
            let mut v = vec![BigRational::zero(); self.ambient];
            for (&f, x) in free.iter().zip(u) {
                v[f] = x.clone();
            }
            v
        });
        Self::span(self.ambient, self.basis.iter().cloned().chain(lifted))
    }

    /// Expresses `sub` (a subspace of `self`) in echelon coordinates of `self`.
    pub fn relative(&self, sub: &Self) -> Self {
        Self::span(self.dim(), sub.basis.iter().map(|v| self.coordinates(v)))
    }

    /// Matrix of `m` on the section `self / lower`, both invariant with
    /// `lower ⊆ self`.
    pub fn induced_on_section(&self, lower: &Self, m: &RatMatrix) -> RatMatrix {
        let restricted = self.restrict(m);
        self.relative(lower).quotient_matrix(&restricted)
    }
}

impl fmt::Debug for RationalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, "}} in Q^{}", self.ambient)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient: usize,
    basis: RatMatrix,
}

impl Serialize for RationalSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let basis = if self.basis.is_empty() {
            RatMatrix::zeros(0, self.ambient)
        } else {
            RatMatrix::from_rows(self.basis.clone()).expect("rectangular basis")
        };
        SubspaceRepr { ambient: self.ambient, basis }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SubspaceRepr::deserialize(d)?;
        let rows = repr.basis.to_rows();
        if rows.iter().any(|r| r.len() != repr.ambient) {
            return Err(serde::de::Error::custom("basis vector length differs from ambient"));
        }
        Ok(RationalSubspace::span(repr.ambient, rows))
    }
}
