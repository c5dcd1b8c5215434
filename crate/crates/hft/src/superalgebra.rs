//! Finite-dimensional cyclic Hodge algebras over ℚ.
//!
//! Everything is expressed in a fixed homogeneous basis `e_0 .. e_{dim-1}`.
//! Matrices are stored column-as-image: `m[i][j]` is the coefficient of `e_i`
//! in `A(e_j)`.

use crate::rational::{self, one, sign, zero, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Add;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: u8) -> Option<Parity> {
        match b {
            0 => Some(Parity::Even),
            1 => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        self + Parity::Odd
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

pub type Matrix = Vec<Vec<Rational>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    pub coeffs: Vec<Rational>,
}

impl Vector {
    pub fn zero(dim: usize) -> Vector {
        Vector { coeffs: vec![zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Vector {
        let mut v = Vector::zero(dim);
        v.coeffs[i] = one();
        v
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Vector {
        Vector { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn scaled(&self, s: &Rational) -> Vector {
        Vector { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scaled(&mut self, other: &Vector, s: &Rational) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b * s;
            }
        }
    }

    pub fn plus(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        out.add_scaled(other, &one());
        out
    }

    pub fn minus(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        out.add_scaled(other, &-one());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    pub matrix: Matrix,
    pub parity: Parity,
}

impl Operator {
    pub fn zero(dim: usize, parity: Parity) -> Operator {
        Operator { matrix: vec![vec![zero(); dim]; dim], parity }
    }

    pub fn identity(dim: usize) -> Operator {
        let mut op = Operator::zero(dim, Parity::Even);
        for i in 0..dim {
            op.matrix[i][i] = one();
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let n = self.dim();
        let mut out = Vector::zero(n);
        for (j, c) in v.support() {
            for i in 0..n {
                let m = &self.matrix[i][j];
                if !m.is_zero() {
                    out.coeffs[i] += m * c;
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector { coeffs: self.matrix.iter().map(|row| row[j].clone()).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Operator) -> Operator {
        Operator { matrix: mat_mul(&self.matrix, &other.matrix), parity: self.parity + other.parity }
    }

    pub fn plus(&self, other: &Operator) -> Operator {
        Operator { matrix: mat_lin(&self.matrix, &other.matrix, &one()), parity: self.parity }
    }

    pub fn minus(&self, other: &Operator) -> Operator {
        Operator { matrix: mat_lin(&self.matrix, &other.matrix, &-one()), parity: self.parity }
    }

    /// Graded commutator `AB - (-1)^{|A||B|} BA`.
    pub fn supercommutator(&self, other: &Operator) -> Operator {
        let ab = self.compose(other);
        let ba = other.compose(self);
        let s = -sign(self.parity.is_odd() && other.parity.is_odd());
        Operator { matrix: mat_lin(&ab.matrix, &ba.matrix, &s), parity: ab.parity }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|c| c.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bivector {
    pub components: Matrix,
}

impl Bivector {
    pub fn is_zero(&self) -> bool {
        self.components.iter().flatten().all(|c| c.is_zero())
    }

    /// Nonzero components as `(j, k, value)`, row-major.
    pub fn entries(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for (j, row) in self.components.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out.push((j, k, c.clone()));
                }
            }
        }
        out
    }
}

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                let bkj = &b[k][j];
                if !bkj.is_zero() {
                    out[i][j] += aik * bkj;
                }
            }
        }
    }
    out
}

fn mat_lin(a: &Matrix, b: &Matrix, s: &Rational) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y * s).collect())
        .collect()
}

/// Inverse by Gauss–Jordan; `None` when singular.
pub(crate) fn mat_inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a.clone();
    let mut inv: Matrix = Operator::identity(n).matrix;
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let d = &m[col][j] * &f;
                    m[r][j] -= d;
                    let d = &inv[col][j] * &f;
                    inv[r][j] -= d;
                }
            }
        }
    }
    Some(inv)
}

pub(crate) fn mat_rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for j in 0..cols {
                    let d = &m[rank][j] * &f;
                    m[r][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("malformed algebra spec: {0}")]
    Malformed(String),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("product e{i}·e{j} is not homogeneous of the expected parity")]
    NonHomogeneous { i: usize, j: usize },
    #[error("operator {0} is not odd")]
    OperatorParity(String),
    #[error("vector is not parity-homogeneous")]
    InhomogeneousVector,
    #[error("Hodge block {block:?} is inconsistent with Q and G-: {reason}")]
    BlockPattern { block: [usize; 4], reason: String },
    #[error("scalar product is degenerate")]
    SingularPairing,
}

/// On-disk description of an algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub parities: Vec<u8>,
    pub unit: usize,
    pub mul: Vec<MulEntry>,
    #[serde(with = "rational::vec_serde")]
    pub integral: Vec<Rational>,
    #[serde(rename = "Q")]
    pub q: Vec<RatRow>,
    #[serde(rename = "Gminus")]
    pub gminus: Vec<RatRow>,
    pub h0: Vec<usize>,
    pub h4_blocks: Vec<[usize; 4]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulEntry {
    pub i: usize,
    pub j: usize,
    #[serde(with = "rational::vec_serde")]
    pub out: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatRow(#[serde(with = "rational::vec_serde")] pub Vec<Rational>);

#[derive(Clone, Debug)]
pub struct Algebra {
    dim: usize,
    parities: Vec<Parity>,
    unit: usize,
    table: Vec<Vec<Vec<(usize, Rational)>>>,
    integral: Vec<Rational>,
    q: Operator,
    gminus: Operator,
    h0: Vec<usize>,
    h4_blocks: Vec<[usize; 4]>,
    eta: Matrix,
    eta_inv: Option<Matrix>,
}

fn check_index(i: usize, dim: usize) -> Result<(), AlgebraError> {
    if i >= dim {
        Err(AlgebraError::IndexOutOfRange { index: i, dim })
    } else {
        Ok(())
    }
}

fn read_matrix(name: &str, rows: &[RatRow], dim: usize) -> Result<Matrix, AlgebraError> {
    if rows.len() != dim || rows.iter().any(|r| r.0.len() != dim) {
        return Err(AlgebraError::Malformed(format!("{name} must be a {dim}x{dim} matrix")));
    }
    Ok(rows.iter().map(|r| r.0.clone()).collect())
}

pub fn load_algebra(spec: &AlgebraSpec) -> Result<Algebra, AlgebraError> {
    let dim = spec.dim;
    if dim == 0 {
        return Err(AlgebraError::Malformed("dim must be positive".into()));
    }
    if spec.parities.len() != dim || spec.integral.len() != dim {
        return Err(AlgebraError::Malformed("parities and integral must have length dim".into()));
    }
    let parities = spec
        .parities
        .iter()
        .map(|&b| Parity::from_bit(b).ok_or_else(|| AlgebraError::Malformed(format!("parity {b}"))))
        .collect::<Result<Vec<_>, _>>()?;
    check_index(spec.unit, dim)?;

    let mut table = vec![vec![Vec::new(); dim]; dim];
    let mut seen = vec![vec![false; dim]; dim];
    for e in &spec.mul {
        check_index(e.i, dim)?;
        check_index(e.j, dim)?;
        if e.out.len() != dim {
            return Err(AlgebraError::Malformed(format!("product ({}, {}) has wrong length", e.i, e.j)));
        }
        if std::mem::replace(&mut seen[e.i][e.j], true) {
            return Err(AlgebraError::Malformed(format!("duplicate product ({}, {})", e.i, e.j)));
        }
        let p = parities[e.i] + parities[e.j];
        let mut sparse = Vec::new();
        for (k, c) in e.out.iter().enumerate() {
            if !c.is_zero() {
                if parities[k] != p {
                    return Err(AlgebraError::NonHomogeneous { i: e.i, j: e.j });
                }
                sparse.push((k, c.clone()));
            }
        }
        table[e.i][e.j] = sparse;
    }

    let q = read_matrix("Q", &spec.q, dim)?;
    let gminus = read_matrix("Gminus", &spec.gminus, dim)?;
    for (name, m) in [("Q", &q), ("Gminus", &gminus)] {
        for i in 0..dim {
            for j in 0..dim {
                if !m[i][j].is_zero() && parities[i] == parities[j] {
                    return Err(AlgebraError::OperatorParity(name.to_string()));
                }
            }
        }
    }
    for &i in &spec.h0 {
        check_index(i, dim)?;
    }
    for b in &spec.h4_blocks {
        for &i in b {
            check_index(i, dim)?;
        }
    }

    let mut alg = Algebra {
        dim,
        parities,
        unit: spec.unit,
        table,
        integral: spec.integral.clone(),
        q: Operator { matrix: q, parity: Parity::Odd },
        gminus: Operator { matrix: gminus, parity: Parity::Odd },
        h0: spec.h0.clone(),
        h4_blocks: spec.h4_blocks.clone(),
        eta: Vec::new(),
        eta_inv: None,
    };
    alg.eta = (0..dim)
        .map(|i| (0..dim).map(|j| alg.integrate(&alg.basis_product(i, j))).collect())
        .collect();
    alg.eta_inv = mat_inverse(&alg.eta);
    Ok(alg)
}

impl Algebra {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn h0_indices(&self) -> &[usize] {
        &self.h0
    }

    pub fn h4_blocks(&self) -> &[[usize; 4]] {
        &self.h4_blocks
    }

    pub fn q(&self) -> &Operator {
        &self.q
    }

    pub fn gminus(&self) -> &Operator {
        &self.gminus
    }

    pub fn integral_coeffs(&self) -> &[Rational] {
        &self.integral
    }

    pub fn eta(&self) -> &Matrix {
        &self.eta
    }

    pub fn eta_inverse(&self) -> Option<&Matrix> {
        self.eta_inv.as_ref()
    }

    pub fn basis(&self, i: usize) -> Vector {
        Vector::basis(self.dim, i)
    }

    /// Sparse image of `e_i · e_j`.
    pub fn product_terms(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        let mut v = Vector::zero(self.dim);
        for (k, c) in &self.table[i][j] {
            v.coeffs[*k] = c.clone();
        }
        v
    }

    /// `None` for the zero vector.
    pub fn vector_parity(&self, v: &Vector) -> Result<Option<Parity>, AlgebraError> {
        let mut p = None;
        for (i, _) in v.support() {
            match p {
                None => p = Some(self.parities[i]),
                Some(q) if q != self.parities[i] => return Err(AlgebraError::InhomogeneousVector),
                _ => {}
            }
        }
        Ok(p)
    }

    pub fn multiply(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zero(self.dim);
        for (i, ca) in a.support() {
            for (j, cb) in b.support() {
                let s = ca * cb;
                for (k, c) in &self.table[i][j] {
                    out.coeffs[*k] += c * &s;
                }
            }
        }
        out
    }

    pub fn integrate(&self, a: &Vector) -> Rational {
        a.support().fold(zero(), |acc, (i, c)| acc + c * &self.integral[i])
    }

    pub fn scalar_product(&self, a: &Vector, b: &Vector) -> Rational {
        self.integrate(&self.multiply(a, b))
    }

    /// Left multiplication `b ↦ a·b` as an operator (parity ignored if `a` is inhomogeneous).
    pub fn left_mult(&self, a: &Vector) -> Operator {
        let parity = self.vector_parity(a).ok().flatten().unwrap_or(Parity::Even);
        let mut m = vec![vec![zero(); self.dim]; self.dim];
        for j in 0..self.dim {
            let col = self.multiply(a, &self.basis(j));
            for i in 0..self.dim {
                m[i][j] = col.coeffs[i].clone();
            }
        }
        Operator { matrix: m, parity }
    }

    pub fn supertrace(&self, op: &Operator) -> Rational {
        (0..self.dim).fold(zero(), |acc, i| acc + sign(self.parities[i].is_odd()) * &op.matrix[i][i])
    }

    /// G₊ read off the block indices alone, without checking Q and G₋.
    pub fn gplus_from_blocks(&self) -> Operator {
        let mut g = Operator::zero(self.dim, Parity::Odd);
        for b in &self.h4_blocks {
            g.matrix[b[0]][b[1]] = one();
            g.matrix[b[2]][b[3]] = one();
        }
        g
    }

    pub fn derive_gplus(&self) -> Result<Operator, AlgebraError> {
        for b in &self.h4_blocks {
            let fail = |reason: &str| AlgebraError::BlockPattern { block: *b, reason: reason.to_string() };
            let distinct = (0..4).all(|x| (0..4).all(|y| x == y || b[x] != b[y]));
            if !distinct {
                return Err(fail("indices repeat"));
            }
            let e = |i: usize| self.basis(i);
            let neg = |i: usize| self.basis(i).scaled(&-one());
            let z = Vector::zero(self.dim);
            let expect = [
                (&self.q, b[0], e(b[1]), "Q e ≠ Qe"),
                (&self.q, b[1], z.clone(), "Q Qe ≠ 0"),
                (&self.q, b[2], e(b[3]), "Q G-e ≠ QG-e"),
                (&self.q, b[3], z.clone(), "Q QG-e ≠ 0"),
                (&self.gminus, b[0], e(b[2]), "G- e ≠ G-e"),
                (&self.gminus, b[1], neg(b[3]), "G- Qe ≠ -QG-e"),
                (&self.gminus, b[2], z.clone(), "G- G-e ≠ 0"),
                (&self.gminus, b[3], z, "G- QG-e ≠ 0"),
            ];
            for (op, col, want, reason) in expect {
                if op.column(col) != want {
                    return Err(fail(reason));
                }
            }
        }
        Ok(self.gplus_from_blocks())
    }

    /// Π₄ = [Q, G₊].
    pub fn pi4(&self) -> Result<Operator, AlgebraError> {
        Ok(self.q.supercommutator(&self.derive_gplus()?))
    }

    pub fn pi0(&self) -> Result<Operator, AlgebraError> {
        Ok(Operator::identity(self.dim).minus(&self.pi4()?))
    }

    pub fn gminus_gplus(&self) -> Result<Operator, AlgebraError> {
        Ok(self.gminus.compose(&self.derive_gplus()?))
    }

    /// `[A] = A η⁻¹`.
    pub fn bivector_of(&self, op: &Operator) -> Result<Bivector, AlgebraError> {
        let inv = self.eta_inv.as_ref().ok_or(AlgebraError::SingularPairing)?;
        Ok(Bivector { components: mat_mul(&op.matrix, inv) })
    }

    pub fn operator_of(&self, b: &Bivector, parity: Parity) -> Operator {
        Operator { matrix: mat_mul(&b.components, &self.eta), parity }
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        let mut mul = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.table[i][j].is_empty() {
                    mul.push(MulEntry { i, j, out: self.basis_product(i, j).coeffs });
                }
            }
        }
        let rows = |m: &Matrix| m.iter().map(|r| RatRow(r.clone())).collect();
        AlgebraSpec {
            dim: self.dim,
            parities: self.parities.iter().map(|p| p.bit()).collect(),
            unit: self.unit,
            mul,
            integral: self.integral.clone(),
            q: rows(&self.q.matrix),
            gminus: rows(&self.gminus.matrix),
            h0: self.h0.clone(),
            h4_blocks: self.h4_blocks.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Axiom checks

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    #[serde(with = "rational")]
    pub residual: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const AXIOM_NAMES: [&str; 14] = [
    "supercommutativity",
    "associativity",
    "unit",
    "parity",
    "bicomplex",
    "hodge-decomposition",
    "leibniz",
    "seven-term",
    "one-twelfth",
    "integral-Q",
    "integral-Gminus",
    "integral-Gplus",
    "nondegeneracy",
    "orthogonality",
];

/// Collects the first nonzero residual over a sweep.
struct Sweep {
    name: &'static str,
    witness: Option<Witness>,
}

impl Sweep {
    fn new(name: &'static str) -> Sweep {
        Sweep { name, witness: None }
    }

    fn scalar(&mut self, idx: &[usize], r: Rational) {
        if self.witness.is_none() && !r.is_zero() {
            self.witness = Some(Witness { indices: idx.to_vec(), residual: r });
        }
    }

    /// Vector residual; the offending component index is appended to the witness.
    fn vector(&mut self, idx: &[usize], v: &Vector) {
        if self.witness.is_none() {
            if let Some((k, c)) = v.support().next() {
                let mut indices = idx.to_vec();
                indices.push(k);
                self.witness = Some(Witness { indices, residual: c.clone() });
            }
        }
    }

    fn flag(&mut self, idx: &[usize], bad: bool) {
        if bad {
            self.scalar(idx, one());
        }
    }

    fn done(self) -> AxiomCheck {
        AxiomCheck { name: self.name, passed: self.witness.is_none(), witness: self.witness }
    }
}

pub fn check_axioms(alg: &Algebra) -> AxiomReport {
    let n = alg.dim;
    let p = |i: usize| alg.parities[i].is_odd();
    let e = |i: usize| alg.basis(i);
    let m = |a: &Vector, b: &Vector| alg.multiply(a, b);
    let q = &alg.q;
    let g = &alg.gminus;
    let gp = alg.gplus_from_blocks();
    let mut checks = Vec::new();

    let mut s = Sweep::new("supercommutativity");
    for i in 0..n {
        for j in 0..n {
            let lhs = alg.basis_product(i, j);
            let rhs = alg.basis_product(j, i).scaled(&sign(p(i) && p(j)));
            s.vector(&[i, j], &lhs.minus(&rhs));
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("associativity");
    for i in 0..n {
        for j in 0..n {
            let ij = alg.basis_product(i, j);
            for k in 0..n {
                let lhs = m(&ij, &e(k));
                let rhs = m(&e(i), &alg.basis_product(j, k));
                s.vector(&[i, j, k], &lhs.minus(&rhs));
            }
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("unit");
    s.flag(&[alg.unit], p(alg.unit));
    for i in 0..n {
        s.vector(&[alg.unit, i], &alg.basis_product(alg.unit, i).minus(&e(i)));
    }
    checks.push(s.done());

    // Products are homogeneous and Q, G₋ odd by construction; the integral must be even.
    let mut s = Sweep::new("parity");
    for i in 0..n {
        if p(i) {
            s.scalar(&[i], alg.integral[i].clone());
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("bicomplex");
    let qq = q.compose(q);
    let gg = g.compose(g);
    let qg = q.supercommutator(g);
    for (tag, op) in [(0usize, &qq), (1, &gg), (2, &qg)] {
        for j in 0..n {
            s.vector(&[tag, j], &op.column(j));
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("hodge-decomposition");
    let mut cover = vec![0usize; n];
    for &i in &alg.h0 {
        cover[i] += 1;
        s.vector(&[i], &q.apply(&e(i)));
        s.vector(&[i], &g.apply(&e(i)));
    }
    for b in &alg.h4_blocks {
        for &i in b {
            cover[i] += 1;
        }
    }
    for (i, c) in cover.iter().enumerate() {
        s.flag(&[i], *c != 1);
    }
    s.flag(&[alg.unit], !alg.h0.contains(&alg.unit));
    if let Err(AlgebraError::BlockPattern { block, .. }) = alg.derive_gplus() {
        s.flag(&block, true);
    }
    checks.push(s.done());

    let mut s = Sweep::new("leibniz");
    for i in 0..n {
        for j in 0..n {
            let lhs = q.apply(&alg.basis_product(i, j));
            let r1 = m(&q.apply(&e(i)), &e(j));
            let r2 = m(&e(i), &q.apply(&e(j))).scaled(&sign(p(i)));
            s.vector(&[i, j], &lhs.minus(&r1).minus(&r2));
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("seven-term");
    for i in 0..n {
        for j in 0..n {
            let ab = alg.basis_product(i, j);
            for k in 0..n {
                let (a, b, c) = (e(i), e(j), e(k));
                let (pa, pb) = (p(i), p(j));
                let lhs = g.apply(&m(&ab, &c));
                let mut rhs = m(&g.apply(&ab), &c);
                rhs.add_scaled(&m(&b, &g.apply(&m(&a, &c))), &sign(pb && !pa));
                rhs.add_scaled(&m(&a, &g.apply(&m(&b, &c))), &sign(pa));
                rhs.add_scaled(&m(&m(&g.apply(&a), &b), &c), &-one());
                rhs.add_scaled(&m(&m(&a, &g.apply(&b)), &c), &-sign(pa));
                rhs.add_scaled(&m(&ab, &g.apply(&c)), &-sign(pa ^ pb));
                s.vector(&[i, j, k], &lhs.minus(&rhs));
            }
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("one-twelfth");
    for i in 0..n {
        let lhs = alg.supertrace(&g.compose(&alg.left_mult(&e(i))));
        let rhs = alg.supertrace(&alg.left_mult(&g.apply(&e(i))));
        s.scalar(&[i], lhs - rhs * rational::frac(1, 12));
    }
    checks.push(s.done());

    for (name, op, extra) in [("integral-Q", q, true), ("integral-Gminus", g, false), ("integral-Gplus", &gp, false)] {
        let mut s = Sweep::new(name);
        for i in 0..n {
            for j in 0..n {
                let lhs = alg.scalar_product(&op.apply(&e(i)), &e(j));
                let rhs = alg.scalar_product(&e(i), &op.apply(&e(j))) * sign(p(i) ^ extra);
                s.scalar(&[i, j], lhs - rhs);
            }
        }
        checks.push(s.done());
    }

    let mut s = Sweep::new("nondegeneracy");
    let rank = mat_rank(&alg.eta);
    if rank < n {
        // Witness: the first basis vector whose Gram row is dependent on earlier ones.
        let mut prefix: Matrix = Vec::new();
        for i in 0..n {
            prefix.push(alg.eta[i].clone());
            if mat_rank(&prefix) < prefix.len() {
                s.scalar(&[i], alg.eta[i].iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(one));
                break;
            }
        }
    }
    checks.push(s.done());

    let mut s = Sweep::new("orthogonality");
    for &i in &alg.h0 {
        for b in &alg.h4_blocks {
            for &j in b {
                s.scalar(&[i, j], alg.eta[i][j].clone());
            }
        }
    }
    checks.push(s.done());

    debug_assert_eq!(checks.len(), AXIOM_NAMES.len());
    AxiomReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn point() -> Algebra {
        crate::examples::point_algebra()
    }

    #[test]
    fn point_passes_everything() {
        let rep = check_axioms(&point());
        assert!(rep.passed(), "{:?}", rep.failed());
        assert_eq!(rep.checks.len(), AXIOM_NAMES.len());
    }

    #[test]
    fn perturbed_integral_breaks_pairing_only() {
        let mut spec = point().to_spec();
        spec.integral[0] = int(0);
        let rep = check_axioms(&load_algebra(&spec).unwrap());
        assert_eq!(rep.failed(), vec!["nondegeneracy"]);
        assert_eq!(rep.get("nondegeneracy").unwrap().witness.as_ref().unwrap().indices, vec![0]);
    }

    #[test]
    fn even_q_is_rejected() {
        let mut spec = crate::examples::frobenius_truncated_poly(2).unwrap().to_spec();
        spec.q[0].0[0] = int(1);
        assert_eq!(load_algebra(&spec).unwrap_err(), AlgebraError::OperatorParity("Q".into()));
    }

    #[test]
    fn inhomogeneous_product_is_rejected() {
        let mut spec = point().to_spec();
        spec.dim = 2;
        spec.parities = vec![0, 1];
        spec.integral = vec![int(1), int(0)];
        spec.q = vec![RatRow(vec![int(0); 2]); 2];
        spec.gminus = spec.q.clone();
        spec.mul = vec![MulEntry { i: 0, j: 0, out: vec![int(1), int(1)] }];
        assert_eq!(load_algebra(&spec).unwrap_err(), AlgebraError::NonHomogeneous { i: 0, j: 0 });
    }

    #[test]
    fn index_out_of_range() {
        let mut spec = point().to_spec();
        spec.h0 = vec![3];
        assert!(matches!(load_algebra(&spec), Err(AlgebraError::IndexOutOfRange { index: 3, .. })));
    }

    #[test]
    fn frobenius_products_and_pairing() {
        let a = crate::examples::frobenius_truncated_poly(3).unwrap();
        let x = a.basis(1);
        assert_eq!(a.multiply(&x, &x), a.basis(2));
        assert!(a.multiply(&a.basis(2), &a.basis(2)).is_zero());
        assert_eq!(a.integrate(&a.basis(2)), int(1));
        assert_eq!(a.scalar_product(&x, &x), int(1));
        assert_eq!(a.scalar_product(&a.basis(0), &x), int(0));
        assert_eq!(a.scalar_product(&x, &Vector::zero(3)), int(0));
    }

    #[test]
    fn bivector_round_trip_and_identity() {
        let a = crate::examples::frobenius_truncated_poly(3).unwrap();
        let id = Operator::identity(3);
        let b = a.bivector_of(&id).unwrap();
        assert_eq!(a.operator_of(&b, Parity::Even), id);
        let p = point();
        assert_eq!(p.bivector_of(&Operator::identity(1)).unwrap().components, vec![vec![int(1)]]);
        assert!(p.bivector_of(&p.gminus_gplus().unwrap()).unwrap().is_zero());
    }
}
