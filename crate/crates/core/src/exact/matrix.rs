use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{IntPoly, Poly, RatPoly};
use super::subspace::RationalSubspace;
use super::{denominator_lcm, Scalar};
use crate::error::{ExactError, ExactResult};

/// Dense row-major matrix over an exact ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn scalar(n: usize, c: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> ExactResult<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(ExactError::Ragged { row: i, expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Block-diagonal matrix with the given square blocks.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn ensure_square(&self) -> ExactResult<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(ExactError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> ExactResult<Self> {
        if self.cols != rhs.rows {
            return Err(ExactError::Dimension { expected: self.cols, found: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Evaluates a polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &Poly<T>) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::scalar(n, c.clone());
        }
        acc
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        (self * other) == (other * self)
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Scalars travel as decimal strings (`"3"`, `"-1/2"`); plain JSON integers
/// are accepted on input.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum ScalarRepr {
    Int(i64),
    Text(String),
}

impl ScalarRepr {
    pub(crate) fn parse<T: Scalar>(self) -> Option<T> {
        match self {
            ScalarRepr::Int(i) => T::parse_text(&i.to_string()),
            ScalarRepr::Text(s) => T::parse_text(&s),
        }
    }
}

impl<T: Scalar> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<Vec<ScalarRepr>> = Vec::deserialize(d)?;
        let rows = raw
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| x.parse::<T>().ok_or_else(|| D::Error::custom("bad matrix entry")))
                    .collect::<Result<Vec<T>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("ragged literal")
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> ExactResult<BigInt> {
        let n = self.ensure_square()?;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        Ok(if sign { -d } else { d })
    }

    /// Characteristic polynomial `det(xI - A)` by the division-free
    /// Berkowitz recursion.
    pub fn char_poly(&self) -> ExactResult<IntPoly> {
        let n = self.ensure_square()?;
        // high-degree-first coefficient vector of the leading k x k block
        let mut p: Vec<BigInt> = vec![BigInt::one()];
        for k in 0..n {
            let a_kk = self[(k, k)].clone();
            let r: Vec<BigInt> = (0..k).map(|j| self[(k, j)].clone()).collect();
            let mut c: Vec<BigInt> = (0..k).map(|i| self[(i, k)].clone()).collect();
            // toeplitz column: 1, -a_kk, -R C, -R A C, ...
            let mut t = Vec::with_capacity(k + 2);
            t.push(BigInt::one());
            t.push(-a_kk);
            for _ in 0..k {
                let rc: BigInt = r.iter().zip(&c).map(|(x, y)| x * y).sum();
                t.push(-rc);
                c = (0..k).map(|i| (0..k).map(|j| &self[(i, j)] * &c[j]).sum()).collect();
            }
            let mut next = vec![BigInt::zero(); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, pj) in p.iter().enumerate() {
                    if i >= j {
                        *slot += &t[i - j] * pj;
                    }
                }
            }
            p = next;
        }
        p.reverse();
        Ok(Poly::from_coeffs(p))
    }
}

impl RatMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_i64(rows).to_rat()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        self.is_integral().then(|| self.map(|x| x.to_integer()))
    }

    /// Returns `(L, N)` with `self = N / L`, `N` integral, `L >= 1` minimal.
    pub fn clear_denominators(&self) -> (BigInt, IntMatrix) {
        let l = denominator_lcm(&self.data);
        let n = self.map(|x| (x * &l).to_integer());
        (l, n)
    }

    pub fn det(&self) -> ExactResult<BigRational> {
        let n = self.ensure_square()?;
        let (l, m) = self.clear_denominators();
        let d = m.det()?;
        Ok(BigRational::new(d, num_traits::pow(l, n)))
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        let n = self.ensure_square().ok()?;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&i| !a[(i, col)].is_zero())?;
            if p != col {
                for j in 0..n {
                    a.data.swap(col * n + j, p * n + j);
                    inv.data.swap(col * n + j, p * n + j);
                }
            }
            let piv = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &piv;
                inv[(col, j)] = &inv[(col, j)] / &piv;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let s = &f * &a[(col, j)];
                    a[(i, j)] -= s;
                    let s = &f * &inv[(col, j)];
                    inv[(i, j)] -= s;
                }
            }
        }
        Some(inv)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut a = self.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else { continue };
            if p != r {
                for j in 0..cols {
                    a.data.swap(r * cols + j, p * cols + j);
                }
            }
            let piv = a[(r, c)].clone();
            for j in c..cols {
                a[(r, j)] = &a[(r, j)] / &piv;
            }
            for i in 0..rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in c..cols {
                    let s = &f * &a[(r, j)];
                    a[(i, j)] -= s;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn char_poly(&self) -> ExactResult<RatPoly> {
        char_poly(self)
    }
}

/// Monic characteristic polynomial `det(xI - m)` of a rational matrix.
///
/// Denominators are cleared first so the recursion runs over the integers:
/// with `m = N / L`, the coefficient of `x^k` is `c_k(N) * L^(k - n)`.
pub fn char_poly(m: &RatMatrix) -> ExactResult<RatPoly> {
    let n = m.ensure_square()?;
    let (l, int) = m.clear_denominators();
    let p = int.char_poly()?;
    let coeffs = (0..=n)
        .map(|k| BigRational::new(p.coeff(k), num_traits::pow(l.clone(), n - k)))
        .collect();
    Ok(Poly::from_coeffs(coeffs))
}

/// Right null space `{v : m v = 0}` in canonical reduced form.
pub fn kernel(m: &RatMatrix) -> RationalSubspace {
    let cols = m.cols();
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let vectors = free.iter().map(|&f| {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[(row, f)].clone();
        }
        v
    });
    RationalSubspace::span(cols, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn rp(c: &[i64]) -> RatPoly {
        Poly::from_coeffs(c.iter().map(|&x| rat(x)).collect())
    }

    #[test]
    fn char_poly_small_cases() {
        let id = RatMatrix::identity(2);
        assert_eq!(char_poly(&id).unwrap(), rp(&[1, -2, 1]));
        let fib = RatMatrix::from_i64(&[&[0, 1], &[1, 1]]);
        assert_eq!(char_poly(&fib).unwrap(), rp(&[-1, -1, 1]));
        let rot = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(char_poly(&rot).unwrap(), rp(&[1, 0, 1]));
    }

    #[test]
    fn char_poly_rejects_non_square() {
        let m = RatMatrix::zeros(2, 3);
        assert_eq!(char_poly(&m), Err(ExactError::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn char_poly_with_denominators_matches_cofactor_expansion() {
        // [[1/2, 1], [0, 3]] -> (x - 1/2)(x - 3) = x^2 - 7/2 x + 3/2
        let m = RatMatrix::from_rows(vec![
            vec![crate::exact::rat_frac(1, 2), rat(1)],
            vec![rat(0), rat(3)],
        ])
        .unwrap();
        let expected = Poly::from_coeffs(vec![
            crate::exact::rat_frac(3, 2),
            crate::exact::rat_frac(-7, 2),
            rat(1),
        ]);
        assert_eq!(char_poly(&m).unwrap(), expected);
    }

    #[test]
    fn kernel_examples() {
        let z = RatMatrix::zeros(2, 2);
        assert_eq!(kernel(&z), RationalSubspace::full(2));

        let n = &RatMatrix::from_i64(&[&[1, 1], &[0, 1]]) - &RatMatrix::identity(2);
        assert_eq!(kernel(&n), RationalSubspace::span(2, vec![vec![rat(1), rat(0)]]));

        let f12 = RatMatrix::from_i64(&[&[0, 1], &[1, 1]]).pow(12);
        let k = kernel(&(&f12 - &RatMatrix::identity(2)));
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn bareiss_det_and_inverse() {
        let m = IntMatrix::from_i64(&[&[2, 1, 0], &[1, 1, 0], &[1, 1, 1]]);
        assert_eq!(m.det().unwrap(), BigInt::from(1));
        let inv = m.to_rat().inverse().unwrap();
        assert!((&inv * &m.to_rat()).is_identity());
        let sing = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
        assert_eq!(sing.det().unwrap(), rat(0));
        // zero pivot forces a row swap
        let p = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(p.det().unwrap(), BigInt::from(-1));
    }
}
