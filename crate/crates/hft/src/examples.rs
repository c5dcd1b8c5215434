//! Example algebras, fixture loading, and the block-algebra search.

use crate::rational::{int, one, zero, Rational};
use crate::strata::{Relation, StableDualGraph, StrataError};
use crate::superalgebra::{load_algebra, Algebra, AlgebraError, AlgebraSpec, MulEntry, RatRow};
use std::path::{Path, PathBuf};

pub use crate::search::{search_block_algebra, SearchOutcome, SearchSpace};

/// Environment variable overriding the fixture directory.
pub const FIXTURE_ENV: &str = "HFT_FIXTURES";

fn zero_matrix(dim: usize) -> Vec<RatRow> {
    vec![RatRow(vec![zero(); dim]); dim]
}

/// H = ⟨e₁⟩, ∫e₁ = 1, Q = G₋ = 0.
pub fn point_algebra() -> Algebra {
    let spec = AlgebraSpec {
        dim: 1,
        parities: vec![0],
        unit: 0,
        mul: vec![MulEntry { i: 0, j: 0, out: vec![one()] }],
        integral: vec![one()],
        q: zero_matrix(1),
        gminus: zero_matrix(1),
        h0: vec![0],
        h4_blocks: vec![],
    };
    load_algebra(&spec).expect("point algebra is well formed")
}

/// ℚ[x]/xⁿ with ∫x^{n−1} = 1 and Q = G₋ = 0.
pub fn frobenius_truncated_poly(n: usize) -> Result<Algebra, AlgebraError> {
    if n < 2 {
        return Err(AlgebraError::SingularPairing);
    }
    let mut mul = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                let mut out = vec![zero(); n];
                out[i + j] = one();
                mul.push(MulEntry { i, j, out });
            }
        }
    }
    let mut integral = vec![zero(); n];
    integral[n - 1] = int(1);
    load_algebra(&AlgebraSpec {
        dim: n,
        parities: vec![0; n],
        unit: 0,
        mul,
        integral,
        q: zero_matrix(n),
        gminus: zero_matrix(n),
        h0: (0..n).collect(),
        h4_blocks: vec![],
    })
}

/// `a ⊗ b` for `b` even with Q = G₋ = 0; basis `(i, k)` sits at `i·dim(b) + k`.
pub fn tensor_product(a: &Algebra, b: &Algebra) -> Result<Algebra, AlgebraError> {
    if b.parities().iter().any(|p| p.is_odd()) || !b.q().is_zero() || !b.gminus().is_zero() {
        return Err(AlgebraError::Malformed("right factor must be even with Q = G₋ = 0".into()));
    }
    let (da, db) = (a.dim(), b.dim());
    let at = |i: usize, k: usize| i * db + k;
    let dim = da * db;
    let mut mul = Vec::new();
    for i in 0..da {
        for k in 0..db {
            for j in 0..da {
                for l in 0..db {
                    let (x, y) = (a.product_terms(i, j), b.product_terms(k, l));
                    if x.is_empty() || y.is_empty() {
                        continue;
                    }
                    let mut out = vec![zero(); dim];
                    for (p, c) in x {
                        for (q, d) in y {
                            out[at(*p, *q)] += c * d;
                        }
                    }
                    mul.push(MulEntry { i: at(i, k), j: at(j, l), out });
                }
            }
        }
    }
    let lift = |m: &[Vec<Rational>]| {
        let mut rows = zero_matrix(dim);
        for r in 0..da {
            for c in 0..da {
                for k in 0..db {
                    rows[at(r, k)].0[at(c, k)] = m[r][c].clone();
                }
            }
        }
        rows
    };
    let mut integral = vec![zero(); dim];
    for i in 0..da {
        for k in 0..db {
            integral[at(i, k)] = &a.integral_coeffs()[i] * &b.integral_coeffs()[k];
        }
    }
    let mut parities = Vec::with_capacity(dim);
    for i in 0..da {
        parities.extend(std::iter::repeat(a.parity(i).bit()).take(db));
    }
    let h0 = a.h0_indices().iter().flat_map(|&i| (0..db).map(move |k| at(i, k))).collect();
    let h4_blocks = a
        .h4_blocks()
        .iter()
        .flat_map(|blk| (0..db).map(move |k| blk.map(|i| at(i, k))))
        .collect();
    load_algebra(&AlgebraSpec {
        dim,
        parities,
        unit: at(a.unit_index(), b.unit_index()),
        mul,
        integral,
        q: lift(&a.q().matrix),
        gminus: lift(&a.gminus().matrix),
        h0,
        h4_blocks,
    })
}

pub fn fixture_dir() -> PathBuf {
    if let Ok(dir) = std::env::var(FIXTURE_ENV) {
        return PathBuf::from(dir);
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Algebra { path: String, source: AlgebraError },
}

pub fn read_spec(path: &Path) -> Result<AlgebraSpec, FixtureError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io { path: p.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| FixtureError::Json { path: p, source })
}

pub fn load_algebra_file(path: &Path) -> Result<Algebra, FixtureError> {
    let spec = read_spec(path)?;
    load_algebra(&spec).map_err(|source| FixtureError::Algebra { path: path.display().to_string(), source })
}

/// Loads `<fixture_dir>/<name>.json`.
pub fn fixture(name: &str) -> Result<Algebra, FixtureError> {
    load_algebra_file(&fixture_dir().join(format!("{name}.json")))
}

/// Fixtures expected to pass every axiom.
pub const GOOD_FIXTURES: [&str; 5] = ["point", "frobenius2", "frobenius3", "block6", "block12"];

/// Broken fixtures and the single check each one must fail.
pub const NEGATIVE_FIXTURES: [(&str, &str); 7] = [
    ("broken-supercommutativity", "supercommutativity"),
    ("broken-associativity", "associativity"),
    ("broken-leibniz", "leibniz"),
    ("broken-seven-term", "seven-term"),
    ("broken-integral-gminus", "integral-Gminus"),
    ("broken-nondegeneracy", "nondegeneracy"),
    ("broken-unit", "unit"),
];

/// Shipped strata with one or two edges, all of dimension 0.
pub const STRATA_FIXTURES: [&str; 6] =
    ["boundary-12-34", "irreducible-1-1", "psi-edge-0-5", "kappa-edge-1-3", "chain-0-5", "banana-1-2"];

pub fn stratum_fixture(name: &str) -> Result<StableDualGraph, StrataError> {
    StableDualGraph::from_json_file(&fixture_dir().join("strata").join(format!("{name}.json")))
}

/// Loads `<fixture_dir>/relations/<name>.json`; the files mirror `strata::catalog()`.
pub fn relation_fixture(name: &str) -> Result<Relation, StrataError> {
    Relation::from_json_file(&fixture_dir().join("relations").join(format!("{name}.json")))
}

/// Fixture text: one product or matrix row per line.
pub fn spec_json(alg: &Algebra) -> String {
    let spec = alg.to_spec();
    let c = |v: &dyn erased::Json| v.compact();
    let rows = |m: &[RatRow]| m.iter().map(|r| format!("    {}", c(r))).collect::<Vec<_>>().join(",\n");
    let mul = spec.mul.iter().map(|e| format!("    {}", c(e))).collect::<Vec<_>>().join(",\n");
    format!(
        "{{\n  \"dim\": {},\n  \"parities\": {},\n  \"unit\": {},\n  \"mul\": [\n{}\n  ],\n  \"integral\": {},\n  \"Q\": [\n{}\n  ],\n  \"Gminus\": [\n{}\n  ],\n  \"h0\": {},\n  \"h4_blocks\": {}\n}}\n",
        spec.dim,
        c(&spec.parities),
        spec.unit,
        mul,
        c(&RatRow(spec.integral.clone())),
        rows(&spec.q),
        rows(&spec.gminus),
        c(&spec.h0),
        c(&spec.h4_blocks),
    )
}

mod erased {
    pub trait Json {
        fn compact(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn compact(&self) -> String {
            serde_json::to_string(self).expect("serializable").replace(',', ", ").replace(":", ": ")
        }
    }
}

pub(crate) fn small_values() -> Vec<Rational> {
    vec![zero(), one(), -one()]
}
