//! Correlators as graph sums, the truncated potential, the action, and the
//! string / dilaton / Main Lemma verifiers.

use crate::graph::{contract_t_with, contract_tensor, enumerate_graphs, heavy_edge_count, weight_p, weight_v, EdgeTensors, Graph, GraphError, Leaf};
use crate::rational::{self, frac, int, one, sign, zero, Rational};
use crate::superalgebra::{Algebra, AlgebraError, Vector};
use num_traits::Zero;
use parking_lot::Mutex;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub psi: u32,
    pub vector: Vector,
}

impl Insertion {
    pub fn new(psi: u32, vector: Vector) -> Insertion {
        Insertion { psi, vector }
    }

    pub fn basis(alg: &Algebra, psi: u32, i: usize) -> Insertion {
        Insertion { psi, vector: alg.basis(i) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrelatorError {
    #[error("unstable (g, n) = ({g}, {n})")]
    Unstable { g: u32, n: usize },
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A graph with its weight V·P.
#[derive(Clone, Debug)]
pub struct GraphTerm {
    pub graph: Graph,
    pub weight: Rational,
}

type TermCache = Mutex<HashMap<(u32, Vec<u32>), Arc<Vec<GraphTerm>>>>;

fn term_cache() -> &'static TermCache {
    static CACHE: OnceLock<TermCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Graphs with nonzero V·P for the given leaf ψ-powers, cached on the sorted
/// powers and relabeled to the requested leaf order.
pub fn graph_terms(g: u32, psi: &[u32]) -> Result<Arc<Vec<GraphTerm>>, GraphError> {
    let mut order: Vec<usize> = (0..psi.len()).collect();
    order.sort_by_key(|&i| (psi[i], i));
    let sorted: Vec<u32> = order.iter().map(|&i| psi[i]).collect();
    let key = (g, sorted.clone());
    let cached = term_cache().lock().get(&key).cloned();
    let base = match cached {
        Some(t) => t,
        None => {
            let terms: Vec<GraphTerm> = enumerate_graphs(g, &sorted)?
                .into_iter()
                .filter_map(|graph| {
                    let weight = weight_v(&graph) * weight_p(&graph);
                    (!weight.is_zero()).then_some(GraphTerm { graph, weight })
                })
                .collect();
            let terms = Arc::new(terms);
            term_cache().lock().insert(key, terms.clone());
            terms
        }
    };
    if order.iter().enumerate().all(|(k, &i)| k == i) {
        return Ok(base);
    }
    // Sorted position k holds original leaf order[k].
    let relabeled = base
        .iter()
        .map(|t| {
            let mut graph = t.graph.clone();
            for l in &mut graph.leaves {
                l.label = order[l.label - 1] + 1;
            }
            graph.leaves.sort_by_key(|l| l.label);
            GraphTerm { graph, weight: t.weight.clone() }
        })
        .collect();
    Ok(Arc::new(relabeled))
}

fn single_vertex(g: u32, psi: &[u32]) -> Graph {
    Graph {
        vertices: vec![g],
        heavy_edges: vec![],
        leaves: psi.iter().enumerate().map(|(i, &p)| Leaf { vertex: 0, psi: p, label: i + 1 }).collect(),
    }
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// ⟨τ_{a₁}(v₁)…τ_{aₙ}(vₙ)⟩_g = Σ_Γ V(Γ)P(Γ)T(Γ).
pub fn correlator(alg: &Algebra, g: u32, ins: &[Insertion]) -> Result<Rational, CorrelatorError> {
    let tensors = EdgeTensors::new(alg)?;
    correlator_with(alg, &tensors, g, ins)
}

fn correlator_with(alg: &Algebra, tensors: &EdgeTensors, g: u32, ins: &[Insertion]) -> Result<Rational, CorrelatorError> {
    let n = ins.len();
    if !stable(g, n) {
        return Err(CorrelatorError::Unstable { g, n });
    }
    for i in ins {
        alg.vector_parity(&i.vector)?;
    }
    let psi: Vec<u32> = ins.iter().map(|i| i.psi).collect();
    if heavy_edge_count(g, &psi) < 0 {
        return Ok(zero());
    }
    let vectors: Vec<Vector> = ins.iter().map(|i| i.vector.clone()).collect();
    if tensors.heavy.is_zero() {
        // Only the heavy-edge-free graph can contribute.
        if heavy_edge_count(g, &psi) != 0 {
            return Ok(zero());
        }
        let graph = single_vertex(g, &psi);
        let w = weight_v(&graph) * weight_p(&graph);
        return Ok(w * contract_t_with(alg, tensors, &graph, &vectors)?);
    }
    let terms = graph_terms(g, &psi)?;
    let parts: Result<Vec<Rational>, GraphError> = terms
        .par_iter()
        .map(|t| Ok(&t.weight * contract_t_with(alg, tensors, &t.graph, &vectors)?))
        .collect();
    Ok(parts?.into_iter().fold(zero(), |a, b| a + b))
}

/// Graph sum with pruning of genus ≥ 2 vertices switched off.
pub fn correlator_unpruned(alg: &Algebra, g: u32, ins: &[Insertion]) -> Result<Rational, CorrelatorError> {
    let tensors = EdgeTensors::new(alg)?;
    let n = ins.len();
    if !stable(g, n) {
        return Err(CorrelatorError::Unstable { g, n });
    }
    let psi: Vec<u32> = ins.iter().map(|i| i.psi).collect();
    let vectors: Vec<Vector> = ins.iter().map(|i| i.vector.clone()).collect();
    let mut acc = zero();
    for graph in crate::graph::enumerate_graphs_with(g, &psi, false)? {
        let w = weight_v(&graph) * weight_p(&graph);
        if !w.is_zero() {
            acc += w * contract_t_with(alg, &tensors, &graph, &vectors)?;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Memoized basis correlators

/// Correlator evaluation with a cache of basis-vector correlators.
///
/// Keys are sorted insertion lists; graded symmetry supplies the sign.
pub struct Correlators<'a> {
    alg: &'a Algebra,
    tensors: EdgeTensors,
    memo: Mutex<HashMap<(u32, Vec<u32>), Arc<HashMap<Vec<usize>, Rational>>>>,
}

impl<'a> Correlators<'a> {
    pub fn new(alg: &'a Algebra) -> Result<Correlators<'a>, CorrelatorError> {
        Ok(Correlators { alg, tensors: EdgeTensors::new(alg)?, memo: Mutex::new(HashMap::new()) })
    }

    pub fn algebra(&self) -> &Algebra {
        self.alg
    }

    /// Sorts `(ψ, basis index)` pairs, returning the Koszul sign of the permutation.
    pub fn sort_with_sign(&self, ins: &[(u32, usize)]) -> (Vec<(u32, usize)>, bool) {
        let mut v = ins.to_vec();
        let mut flip = false;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                if self.alg.parity(v[j - 1].1).is_odd() && self.alg.parity(v[j].1).is_odd() {
                    flip = !flip;
                }
                v.swap(j - 1, j);
                j -= 1;
            }
        }
        (v, flip)
    }

    /// Basis correlator; unstable or odd-total inputs give 0.
    pub fn basis(&self, g: u32, ins: &[(u32, usize)]) -> Result<Rational, CorrelatorError> {
        if !stable(g, ins.len()) {
            return Ok(zero());
        }
        let odd = ins.iter().filter(|(_, i)| self.alg.parity(*i).is_odd()).count();
        let psi: Vec<u32> = ins.iter().map(|x| x.0).collect();
        if odd % 2 == 1 || heavy_edge_count(g, &psi) < 0 {
            return Ok(zero());
        }
        let (key, flip) = self.sort_with_sign(ins);
        let psi_key: Vec<u32> = key.iter().map(|x| x.0).collect();
        let idx: Vec<usize> = key.iter().map(|x| x.1).collect();
        let table = self.psi_table(g, psi_key)?;
        let v = table.get(&idx).cloned().unwrap_or_else(zero);
        Ok(if flip { -v } else { v })
    }

    /// Every basis correlator with the given (sorted) ψ-powers.
    fn psi_table(&self, g: u32, psi: Vec<u32>) -> Result<Arc<HashMap<Vec<usize>, Rational>>, CorrelatorError> {
        let key = (g, psi);
        let cached = self.memo.lock().get(&key).cloned();
        if let Some(t) = cached {
            return Ok(t);
        }
        let (g, psi) = &key;
        let terms: Vec<GraphTerm> = if self.tensors.heavy.is_zero() {
            if heavy_edge_count(*g, psi) != 0 {
                vec![]
            } else {
                let graph = single_vertex(*g, psi);
                let weight = weight_v(&graph) * weight_p(&graph);
                vec![GraphTerm { graph, weight }]
            }
        } else {
            graph_terms(*g, psi)?.as_ref().clone()
        };
        let parts: Vec<HashMap<Vec<usize>, Rational>> =
            terms.par_iter().map(|t| contract_tensor(self.alg, &self.tensors, &t.graph)).collect();
        let mut table: HashMap<Vec<usize>, Rational> = HashMap::new();
        for (t, part) in terms.iter().zip(parts) {
            for (k, v) in part {
                *table.entry(k).or_insert_with(zero) += &t.weight * v;
            }
        }
        table.retain(|_, v| !v.is_zero());
        let table = Arc::new(table);
        self.memo.lock().insert(key, table.clone());
        Ok(table)
    }

    /// Multilinear expansion over basis components; 0 when unstable.
    pub fn eval(&self, g: u32, ins: &[Insertion]) -> Result<Rational, CorrelatorError> {
        for i in ins {
            self.alg.vector_parity(&i.vector)?;
        }
        self.eval_loose(g, ins)
    }

    /// As `eval`, without requiring homogeneous vectors.
    fn eval_loose(&self, g: u32, ins: &[Insertion]) -> Result<Rational, CorrelatorError> {
        if !stable(g, ins.len()) {
            return Ok(zero());
        }
        let comps: Vec<Vec<(usize, Rational)>> =
            ins.iter().map(|i| i.vector.support().map(|(k, c)| (k, c.clone())).collect()).collect();
        let mut acc = zero();
        let mut cur = Vec::with_capacity(ins.len());
        self.expand(g, ins, &comps, &mut cur, one(), &mut acc)?;
        Ok(acc)
    }

    fn expand(
        &self,
        g: u32,
        ins: &[Insertion],
        comps: &[Vec<(usize, Rational)>],
        cur: &mut Vec<(u32, usize)>,
        coeff: Rational,
        acc: &mut Rational,
    ) -> Result<(), CorrelatorError> {
        let k = cur.len();
        if k == ins.len() {
            let v = self.basis(g, cur)?;
            if !v.is_zero() {
                *acc += coeff * v;
            }
            return Ok(());
        }
        for (i, c) in &comps[k] {
            cur.push((ins[k].psi, *i));
            self.expand(g, ins, comps, cur, &coeff * c, acc)?;
            cur.pop();
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Potential

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PotentialBounds {
    pub max_n: usize,
    pub max_psi: u32,
    pub max_genus: u32,
}

/// `T_{a₁,i₁}⋯T_{aₙ,iₙ}` at genus g (ħ^{g−1}); variables sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial {
    pub genus: u32,
    pub vars: Vec<(u32, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub bounds: PotentialBounds,
    pub terms: BTreeMap<Monomial, Rational>,
}

#[derive(Serialize)]
struct PotentialTermJson {
    genus: u32,
    hbar_power: i64,
    vars: Vec<(u32, usize)>,
    coeff: String,
}

#[derive(Serialize)]
struct PotentialJson {
    bounds: PotentialBounds,
    terms: Vec<PotentialTermJson>,
}

impl Potential {
    pub fn coefficient(&self, genus: u32, vars: &[(u32, usize)]) -> Rational {
        let mut v = vars.to_vec();
        v.sort_unstable();
        self.terms.get(&Monomial { genus, vars: v }).cloned().unwrap_or_else(zero)
    }

    pub fn to_json(&self) -> String {
        let j = PotentialJson {
            bounds: self.bounds,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| PotentialTermJson {
                    genus: m.genus,
                    hbar_power: m.genus as i64 - 1,
                    vars: m.vars.clone(),
                    coeff: rational::fmt(c),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }
}

fn multisets<T: Clone>(items: &[T], n: usize, allow_repeat: &dyn Fn(&T) -> bool) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    fn rec<T: Clone>(items: &[T], n: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>, rep: &dyn Fn(&T) -> bool) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            let next = if rep(&items[i]) { i } else { i + 1 };
            rec(items, n, next, cur, out, rep);
            cur.pop();
        }
    }
    rec(items, n, 0, &mut Vec::new(), &mut out, allow_repeat);
    out
}

/// Coefficients of F_g in the primary variables T_{a,i}, i ∈ H₀.
///
/// With E_a = Σ eᵢT_{a,i}, the monomial T_{v₁}⋯T_{vₙ} (sorted) has coefficient
/// (−1)^{q(q+1)/2}/∏mult! · ⟨τ(e_{v₁})⋯τ(e_{vₙ})⟩_g, q the number of odd variables.
pub fn potential_coefficients(alg: &Algebra, bounds: PotentialBounds) -> Result<Potential, CorrelatorError> {
    let ctx = Correlators::new(alg)?;
    let mut vars = Vec::new();
    for a in 0..=bounds.max_psi {
        for &i in alg.h0_indices() {
            vars.push((a, i));
        }
    }
    vars.sort_unstable();
    let mut terms = BTreeMap::new();
    for g in 0..=bounds.max_genus {
        for n in 1..=bounds.max_n {
            if !stable(g, n) {
                continue;
            }
            let even = |v: &(u32, usize)| !alg.parity(v.1).is_odd();
            for mono in multisets(&vars, n, &even) {
                let s: i64 = mono.iter().map(|v| v.0 as i64).sum();
                if s > 3 * g as i64 - 3 + n as i64 {
                    continue;
                }
                let c = ctx.basis(g, &mono)?;
                if c.is_zero() {
                    continue;
                }
                let q = mono.iter().filter(|v| !even(v)).count();
                let mut sym = one();
                let mut i = 0;
                while i < mono.len() {
                    let j = (i..mono.len()).take_while(|&j| mono[j] == mono[i]).count();
                    sym *= Rational::from_integer(rational::factorial(j as u32));
                    i += j;
                }
                let coeff = sign((q * (q + 1) / 2) % 2 == 1) * c / sym;
                terms.insert(Monomial { genus: g, vars: mono }, coeff);
            }
        }
    }
    Ok(Potential { bounds, terms })
}

// ---------------------------------------------------------------------------
// Action

/// Values T_{a,i}; missing entries are 0.
pub type TAssignment = BTreeMap<(u32, usize), Rational>;

fn e_vector(alg: &Algebra, t: &TAssignment, a: u32) -> Vector {
    let mut v = Vector::zero(alg.dim());
    for &i in alg.h0_indices() {
        if let Some(c) = t.get(&(a, i)) {
            v.coeffs[i] += c;
        }
    }
    v
}

/// Dimension-zero part of F_g evaluated at the vectors `w_a`.
fn dimension_zero_f(ctx: &Correlators, g: u32, w: &[Vector], max_n: usize) -> Result<Rational, CorrelatorError> {
    let max_psi = w.len() as u32 - 1;
    let mut total = zero();
    for n in 1..=max_n {
        if !stable(g, n) {
            continue;
        }
        let target = 3 * g as i64 - 3 + n as i64;
        if target < 0 {
            continue;
        }
        let mut sum = zero();
        let mut tuple = vec![0u32; n];
        loop {
            if tuple.iter().map(|&a| a as i64).sum::<i64>() == target {
                let ins: Vec<Insertion> = tuple.iter().map(|&a| Insertion::new(a, w[a as usize].clone())).collect();
                sum += ctx.eval_loose(g, &ins)?;
            }
            // next tuple in base (max_psi + 1)
            let mut k = 0;
            while k < n && tuple[k] == max_psi {
                tuple[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
            tuple[k] += 1;
        }
        total += sum / Rational::from_integer(rational::factorial(n as u32));
    }
    Ok(total)
}

/// A(v) as a map ħ-power → coefficient.
pub fn action_value(alg: &Algebra, v: &Vector, t: &TAssignment, bounds: PotentialBounds) -> Result<BTreeMap<u32, Rational>, CorrelatorError> {
    let ctx = Correlators::new(alg)?;
    let es: Vec<Vector> = (0..=bounds.max_psi).map(|a| e_vector(alg, t, a)).collect();
    let mut shifted = es.clone();
    shifted[0] = shifted[0].plus(&alg.gminus().apply(v));
    let mut out = BTreeMap::new();
    for g in 0..=bounds.max_genus {
        let w = if g <= 1 { &shifted } else { &es };
        let mut val = dimension_zero_f(&ctx, g, w, bounds.max_n)?;
        if g == 0 {
            let quad = alg.scalar_product(&alg.q().apply(v), &alg.gminus().apply(v));
            val -= quad * frac(1, 2);
        }
        out.insert(g, val);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Identity verifiers

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub params: String,
    #[serde(with = "rational")]
    pub left: Rational,
    #[serde(with = "rational")]
    pub right: Rational,
    #[serde(with = "rational")]
    pub residual: Rational,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(name: &str, params: String, left: Rational, right: Rational) -> IdentityReport {
        let residual = &left - &right;
        IdentityReport { name: name.to_string(), params, pass: residual.is_zero(), left, right, residual }
    }
}

fn describe(g: u32, ins: &[Insertion]) -> String {
    let parts: Vec<String> = ins
        .iter()
        .map(|i| {
            let v: Vec<String> = i.vector.support().map(|(k, c)| format!("{}*e{}", rational::fmt(c), k)).collect();
            format!("t{}({})", i.psi, v.join("+"))
        })
        .collect();
    format!("g={g} {}", parts.join(" "))
}

/// ⟨τ₀(e₁)∏τ_{aⱼ}(vⱼ)⟩_g = Σⱼ ⟨…τ_{aⱼ−1}(vⱼ)…⟩_g.
pub fn verify_string(ctx: &Correlators, g: u32, ins: &[Insertion]) -> Result<IdentityReport, CorrelatorError> {
    if ins.iter().all(|i| i.psi == 0) {
        return Err(CorrelatorError::Precondition("string equation needs some positive ψ-power".into()));
    }
    let alg = ctx.algebra();
    let mut lhs_ins = vec![Insertion::basis(alg, 0, alg.unit_index())];
    lhs_ins.extend(ins.iter().cloned());
    let left = ctx.eval(g, &lhs_ins)?;
    let mut right = zero();
    for j in 0..ins.len() {
        if ins[j].psi > 0 {
            let mut r = ins.to_vec();
            r[j].psi -= 1;
            right += ctx.eval(g, &r)?;
        }
    }
    Ok(IdentityReport::new("string", describe(g, ins), left, right))
}

/// ⟨τ₁(e₁)∏τ_{aⱼ}(vⱼ)⟩_g = (2g−2+n)⟨∏τ_{aⱼ}(vⱼ)⟩_g.
pub fn verify_dilaton(ctx: &Correlators, g: u32, ins: &[Insertion]) -> Result<IdentityReport, CorrelatorError> {
    let n = ins.len();
    if !stable(g, n) {
        return Err(CorrelatorError::Unstable { g, n });
    }
    let alg = ctx.algebra();
    let mut lhs_ins = vec![Insertion::basis(alg, 1, alg.unit_index())];
    lhs_ins.extend(ins.iter().cloned());
    let left = ctx.eval(g, &lhs_ins)?;
    let right = int(2 * g as i64 - 2 + n as i64) * ctx.eval(g, ins)?;
    Ok(IdentityReport::new("dilaton", describe(g, ins), left, right))
}

/// Σᵢ ε_i⟨…τ_{aᵢ}(Qvᵢ)…⟩_g + Σᵢ ε_i⟨…τ_{aᵢ+1}(G₋vᵢ)…⟩_g = 0, where ε_i is the
/// Koszul sign of moving the odd operator past v₁…v_{i−1}. Reported as
/// left = Q-part, right = −(G₋-part).
pub fn verify_main_lemma(ctx: &Correlators, g: u32, ins: &[Insertion]) -> Result<IdentityReport, CorrelatorError> {
    let n = ins.len();
    if !stable(g, n) {
        return Err(CorrelatorError::Unstable { g, n });
    }
    let alg = ctx.algebra();
    let mut parity_before = false;
    let mut qpart = zero();
    let mut gpart = zero();
    for i in 0..n {
        let eps = sign(parity_before);
        let mut with_q = ins.to_vec();
        with_q[i].vector = alg.q().apply(&ins[i].vector);
        if !with_q[i].vector.is_zero() {
            qpart += &eps * ctx.eval(g, &with_q)?;
        }
        let mut with_g = ins.to_vec();
        with_g[i].vector = alg.gminus().apply(&ins[i].vector);
        with_g[i].psi += 1;
        if !with_g[i].vector.is_zero() {
            gpart += &eps * ctx.eval(g, &with_g)?;
        }
        if alg.vector_parity(&ins[i].vector)?.is_some_and(|p| p.is_odd()) {
            parity_before = !parity_before;
        }
    }
    Ok(IdentityReport::new("main-lemma", describe(g, ins), qpart, -gpart))
}

#[derive(Clone, Copy, Debug)]
pub struct SweepBounds {
    pub max_genus: u32,
    pub max_n: usize,
    pub max_psi_sum: u32,
    /// Use every basis vector, not just H₀.
    pub full_basis: bool,
}

/// Multisets of `(ψ, basis index)` with at most `max_n` elements and bounded ψ-sum.
pub fn insertion_multisets(alg: &Algebra, b: &SweepBounds, n: usize) -> Vec<Vec<(u32, usize)>> {
    let basis: Vec<usize> = if b.full_basis { (0..alg.dim()).collect() } else { alg.h0_indices().to_vec() };
    let mut vars = Vec::new();
    for a in 0..=b.max_psi_sum {
        for &i in &basis {
            vars.push((a, i));
        }
    }
    vars.sort_unstable();
    let rep = |v: &(u32, usize)| !alg.parity(v.1).is_odd();
    multisets(&vars, n, &rep)
        .into_iter()
        .filter(|m| m.iter().map(|v| v.0).sum::<u32>() <= b.max_psi_sum)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    String,
    Dilaton,
    MainLemma,
}

/// Exhaustive sweep of one identity over basis insertions within the bounds.
pub fn sweep(alg: &Algebra, which: Identity, b: SweepBounds) -> Result<Vec<IdentityReport>, CorrelatorError> {
    let ctx = Correlators::new(alg)?;
    let mut cases = Vec::new();
    for g in 0..=b.max_genus {
        for n in 1..=b.max_n {
            let ok = match which {
                Identity::String => true,
                Identity::Dilaton | Identity::MainLemma => stable(g, n),
            };
            if !ok {
                continue;
            }
            for m in insertion_multisets(alg, &b, n) {
                if which == Identity::String && m.iter().all(|v| v.0 == 0) {
                    continue;
                }
                cases.push((g, m));
            }
        }
    }
    cases
        .par_iter()
        .map(|(g, m)| {
            let ins: Vec<Insertion> = m.iter().map(|&(p, i)| Insertion::basis(alg, p, i)).collect();
            match which {
                Identity::String => verify_string(&ctx, *g, &ins),
                Identity::Dilaton => verify_dilaton(&ctx, *g, &ins),
                Identity::MainLemma => verify_main_lemma(&ctx, *g, &ins),
            }
        })
        .collect()
}
