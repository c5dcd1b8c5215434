//! One-vertex stars: Φ(A,B,C,D) and the small vanishing pictures.
//!
//! A star is a single vertex with some loops (each carrying a bivector) and
//! some legs fed with vectors. Its value is the signed contraction of the
//! vertex form `∫ x₁⋯x_k` against everything attached.

use crate::graph::{pair_input, vector_input, VertexForms};
use crate::network::Network;
use crate::rational::Rational;
use crate::superalgebra::{Algebra, AlgebraError, Bivector, Operator, Vector};

/// Legs occupy the first slots, then two slots per loop.
pub fn star_value(alg: &Algebra, loops: &[&Bivector], legs: &[Vector]) -> Rational {
    let mut inputs: Vec<_> = legs.iter().enumerate().map(|(s, v)| vector_input(s, v)).collect();
    for (k, b) in loops.iter().enumerate() {
        let s = legs.len() + 2 * k;
        inputs.push(pair_input(s, s + 1, b));
    }
    let odd: Vec<bool> = alg.parities().iter().map(|p| p.is_odd()).collect();
    let net = Network { odd: &odd, arity: vec![legs.len() + 2 * loops.len()], inputs };
    let mut forms = VertexForms::new(alg);
    net.evaluate(|_, idx| forms.eval(idx))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhiShape {
    pub empty_loops: usize,
    pub heavy_loops: usize,
    pub heavy_edges: usize,
    pub leaves: usize,
}

/// Φ(A,B,C,D) on basis inputs: the first `C` indices feed the far ends of the
/// external heavy edges (so the vertex sees `G₋G₊ e_j`), the rest are leaves.
pub fn phi(alg: &Algebra, shape: PhiShape, inputs: &[usize]) -> Result<Rational, AlgebraError> {
    assert_eq!(inputs.len(), shape.heavy_edges + shape.leaves, "one input per heavy edge and leaf");
    let gg = alg.gminus_gplus()?;
    let empty = alg.bivector_of(&Operator::identity(alg.dim()))?;
    let heavy = alg.bivector_of(&gg)?;
    let mut loops = vec![&empty; shape.empty_loops];
    loops.extend(std::iter::repeat(&heavy).take(shape.heavy_loops));
    let legs: Vec<Vector> = inputs
        .iter()
        .enumerate()
        .map(|(k, &j)| if k < shape.heavy_edges { gg.apply(&alg.basis(j)) } else { alg.basis(j) })
        .collect();
    Ok(star_value(alg, &loops, &legs))
}

/// The four small pictures that vanish for any cyclic Hodge algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Picture {
    /// Vertex with one empty loop, its leg fed through G₋ (a vector).
    HandleGminus,
    /// Vertex with one loop carrying [G₋] and one leg (a vector).
    GminusLoop,
    /// Vertex with two empty loops, legs `x` and `G₋w` (a bivector).
    TwoHandlesGminus,
    /// Vertex with one empty loop and one [G₋] loop, one leg (a vector).
    HandleAndGminusLoop,
}

impl Picture {
    pub const ALL: [Picture; 4] = [Picture::HandleGminus, Picture::GminusLoop, Picture::TwoHandlesGminus, Picture::HandleAndGminusLoop];

    pub fn name(self) -> &'static str {
        match self {
            Picture::HandleGminus => "handle-gminus",
            Picture::GminusLoop => "gminus-loop",
            Picture::TwoHandlesGminus => "two-handles-gminus",
            Picture::HandleAndGminusLoop => "handle-and-gminus-loop",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Picture::TwoHandlesGminus => 2,
            _ => 1,
        }
    }

    pub fn evaluate(self, alg: &Algebra, inputs: &[usize]) -> Result<Rational, AlgebraError> {
        assert_eq!(inputs.len(), self.arity());
        let empty = alg.bivector_of(&Operator::identity(alg.dim()))?;
        let gm = alg.bivector_of(alg.gminus())?;
        let e = |i: usize| alg.basis(i);
        let gme = |i: usize| alg.gminus().apply(&alg.basis(i));
        Ok(match self {
            Picture::HandleGminus => star_value(alg, &[&empty], &[gme(inputs[0])]),
            Picture::GminusLoop => star_value(alg, &[&gm], &[e(inputs[0])]),
            Picture::TwoHandlesGminus => star_value(alg, &[&empty, &empty], &[e(inputs[0]), gme(inputs[1])]),
            Picture::HandleAndGminusLoop => star_value(alg, &[&empty, &gm], &[e(inputs[0])]),
        })
    }
}

/// Every basis input tuple of the given length.
pub fn basis_tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..dim).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Nonzero values of a picture, with their inputs.
pub fn picture_residuals(alg: &Algebra, p: Picture) -> Result<Vec<(Vec<usize>, Rational)>, AlgebraError> {
    let mut bad = Vec::new();
    for t in basis_tuples(alg.dim(), p.arity()) {
        let v = p.evaluate(alg, &t)?;
        if !num_traits::Zero::is_zero(&v) {
            bad.push((t, v));
        }
    }
    Ok(bad)
}

/// Nonzero values of Φ over all basis inputs.
pub fn phi_residuals(alg: &Algebra, shape: PhiShape) -> Result<Vec<(Vec<usize>, Rational)>, AlgebraError> {
    let mut bad = Vec::new();
    for t in basis_tuples(alg.dim(), shape.heavy_edges + shape.leaves) {
        let v = phi(alg, shape, &t)?;
        if !num_traits::Zero::is_zero(&v) {
            bad.push((t, v));
        }
    }
    Ok(bad)
}
