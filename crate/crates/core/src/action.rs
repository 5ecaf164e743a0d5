//! Validated descriptions of the acting group and the passage to dual
//! automorphisms.
//!
//! A matrix `A` acting on `T^r` (columns mod 1) acts on characters
//! `χ ∈ Z^r` by `χ ↦ (A^T)^{-1} χ`; every engine works with these dual
//! matrices.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::fp::is_prime;
use crate::exact::laurent::Term;
use crate::exact::{LaurentPoly, RatMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    /// Automorphisms of `T^r`: integer matrices with determinant ±1.
    Toral,
    /// Automorphisms of the solenoid dual to `Q^r`: invertible rational matrices.
    Solenoid,
}

/// Unvalidated action description, as parsed from an input document.
#[derive(Debug, Clone, PartialEq)]
pub enum RawAction {
    Matrix { kind: MatrixKind, r: Option<usize>, generators: Vec<RatMatrix> },
    Laurent { p: u64, d: usize, g: Vec<Term> },
}

/// Reasons a raw description is rejected. Generator indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error")]
pub enum ValidationError {
    #[error("no generators given")]
    EmptyGenerators,
    #[error("dimension r must be at least 1")]
    ZeroDimension,
    #[error("generator {i} is {rows}x{cols}, expected {expected}x{expected}")]
    BadShape { i: usize, rows: usize, cols: usize, expected: usize },
    #[error("generator {i} has non-integer entries")]
    NonIntegral { i: usize },
    #[error("generator {i} is singular")]
    NotInvertible { i: usize },
    #[error("generator {i} has determinant {det}, expected ±1")]
    NotUnimodular { i: usize, det: String },
    #[error("generators {i} and {j} do not commute")]
    NonCommuting { i: usize, j: usize },
    #[error("modulus {p} is not prime")]
    BadModulus { p: u64 },
    #[error("number of variables must be 1 or 2, got {d}")]
    BadVariableCount { d: usize },
    #[error("term {index} has {found} exponents, expected {expected}")]
    TermArity { index: usize, expected: usize, found: usize },
    #[error("presentation g is zero")]
    ZeroPresentation,
    #[error("presentation g is a unit (monomial), so the module is trivial")]
    UnitPresentation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("expected {expected} exponents, got {found}")]
    ExponentLength { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
}

/// Finitely generated commuting group of matrix automorphisms, indexed
/// `1..=n` in reports and `0..n` in code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixAction {
    kind: MatrixKind,
    r: usize,
    generators: Vec<RatMatrix>,
    duals: Vec<RatMatrix>,
    dual_inverses: Vec<RatMatrix>,
}

/// `{α_n : n ∈ Z^d}` acting on the dual of `F_p[u^±1] / (g)` by
/// multiplication with `u^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentCyclicAction {
    p: u64,
    d: usize,
    g: LaurentPoly,
}

/// Parameters of the shift-product counterexample demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDemoSpec {
    pub box_radius: u32,
}

impl ProductDemoSpec {
    pub fn new(box_radius: u32) -> Result<Self, ValidationError> {
        if box_radius == 0 {
            return Err(ValidationError::ZeroDimension);
        }
        Ok(ProductDemoSpec { box_radius })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommutingAction {
    Matrix(MatrixAction),
    Laurent(LaurentCyclicAction),
}

/// `(A^T)^{-1}`.
pub fn dual_matrix(a: &RatMatrix) -> Result<RatMatrix, ActionError> {
    a.transpose().inverse().ok_or(ActionError::Singular)
}

/// Checks every hypothesis and reports all failures together.
pub fn validate(raw: RawAction) -> Result<CommutingAction, Vec<ValidationError>> {
    match raw {
        RawAction::Matrix { kind, r, generators } => {
            MatrixAction::new(kind, r, generators).map(CommutingAction::Matrix)
        }
        RawAction::Laurent { p, d, g } => LaurentCyclicAction::from_terms(p, d, g).map(CommutingAction::Laurent),
    }
}

impl MatrixAction {
    pub fn new(
        kind: MatrixKind,
        r: Option<usize>,
        generators: Vec<RatMatrix>,
    ) -> Result<Self, Vec<ValidationError>> {
        let mut errors = Vec::new();
        if generators.is_empty() {
            errors.push(ValidationError::EmptyGenerators);
        }
        let r = r.or_else(|| generators.first().map(RatMatrix::rows)).unwrap_or(0);
        if r == 0 {
            errors.push(ValidationError::ZeroDimension);
        }
        let mut well_shaped = vec![false; generators.len()];
        for (idx, g) in generators.iter().enumerate() {
            let i = idx + 1;
            if g.rows() != r || g.cols() != r {
                errors.push(ValidationError::BadShape { i, rows: g.rows(), cols: g.cols(), expected: r });
                continue;
            }
            if kind == MatrixKind::Toral && !g.is_integral() {
                errors.push(ValidationError::NonIntegral { i });
                continue;
            }
            let det = g.det().expect("square");
            if det.is_zero() {
                errors.push(ValidationError::NotInvertible { i });
                continue;
            }
            if kind == MatrixKind::Toral && !det.abs().is_one() {
                errors.push(ValidationError::NotUnimodular { i, det: det.to_string() });
                continue;
            }
            well_shaped[idx] = true;
        }
        for a in 0..generators.len() {
            for b in a + 1..generators.len() {
                if well_shaped[a] && well_shaped[b] && !generators[a].commutes_with(&generators[b]) {
                    errors.push(ValidationError::NonCommuting { i: a + 1, j: b + 1 });
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Self::from_valid(kind, generators))
    }

    fn from_valid(kind: MatrixKind, generators: Vec<RatMatrix>) -> Self {
        let r = generators[0].rows();
        let duals: Vec<RatMatrix> =
            generators.iter().map(|g| dual_matrix(g).expect("validated generator")).collect();
        let dual_inverses = generators.iter().map(RatMatrix::transpose).collect();
        MatrixAction { kind, r, generators, duals, dual_inverses }
    }

    pub fn toral(generators: Vec<RatMatrix>) -> Result<Self, Vec<ValidationError>> {
        Self::new(MatrixKind::Toral, None, generators)
    }

    pub fn solenoid(generators: Vec<RatMatrix>) -> Result<Self, Vec<ValidationError>> {
        Self::new(MatrixKind::Solenoid, None, generators)
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.generators
    }

    pub fn duals(&self) -> &[RatMatrix] {
        &self.duals
    }

    /// Inverses of the dual generators (the transposes of the generators).
    pub fn dual_inverses(&self) -> &[RatMatrix] {
        &self.dual_inverses
    }

    fn product(&self, exponents: &[i64], pos: &[RatMatrix], neg: impl Fn(usize) -> RatMatrix) -> Result<RatMatrix, ActionError> {
        if exponents.len() != self.generators.len() {
            return Err(ActionError::ExponentLength { expected: self.generators.len(), found: exponents.len() });
        }
        let mut acc = RatMatrix::identity(self.r);
        for (i, &e) in exponents.iter().enumerate() {
            if e > 0 {
                acc = &acc * &pos[i].pow(e as u64);
            } else if e < 0 {
                acc = &acc * &neg(i).pow(e.unsigned_abs());
            }
        }
        Ok(acc)
    }

    /// `α_1^{e_1} ⋯ α_n^{e_n}` acting on the group itself.
    pub fn element(&self, exponents: &[i64]) -> Result<RatMatrix, ActionError> {
        // A^{-1} = ((A^T)^{-1})^T
        self.product(exponents, &self.generators, |i| self.duals[i].transpose())
    }

    /// Dual of [`element`](Self::element), formed from dual generators.
    pub fn dual_element(&self, exponents: &[i64]) -> Result<RatMatrix, ActionError> {
        self.product(exponents, &self.duals, |i| self.dual_inverses[i].clone())
    }

    /// Same group with every generator replaced by `P^{-1} A P`.
    pub fn conjugate(&self, p: &RatMatrix) -> Option<Self> {
        let inv = p.inverse()?;
        let gens = self.generators.iter().map(|g| &(&inv * g) * p).collect();
        Some(Self::from_valid(self.kind, gens))
    }
}

impl LaurentCyclicAction {
    pub fn from_terms(p: u64, d: usize, terms: Vec<Term>) -> Result<Self, Vec<ValidationError>> {
        let mut errors = Vec::new();
        if !is_prime(p) {
            errors.push(ValidationError::BadModulus { p });
        }
        if !(1..=2).contains(&d) {
            errors.push(ValidationError::BadVariableCount { d });
        }
        for (index, t) in terms.iter().enumerate() {
            if t.exponents.len() != d {
                errors.push(ValidationError::TermArity { index, expected: d, found: t.exponents.len() });
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let g = LaurentPoly::from_terms(p, d, terms.into_iter().map(|t| (t.exponents, t.coefficient)))
            .expect("checked modulus and arity");
        Self::new(g).map_err(|e| vec![e])
    }

    pub fn new(g: LaurentPoly) -> Result<Self, ValidationError> {
        if !is_prime(g.modulus()) {
            return Err(ValidationError::BadModulus { p: g.modulus() });
        }
        if !(1..=2).contains(&g.nvars()) {
            return Err(ValidationError::BadVariableCount { d: g.nvars() });
        }
        if g.is_zero() {
            return Err(ValidationError::ZeroPresentation);
        }
        if g.is_unit() {
            return Err(ValidationError::UnitPresentation);
        }
        Ok(LaurentCyclicAction { p: g.modulus(), d: g.nvars(), g: g.canonical() })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.d
    }

    /// Canonical presentation polynomial.
    pub fn presentation(&self) -> &LaurentPoly {
        &self.g
    }
}
