//! ψ-κ-strata as stable dual graphs, their expression in correlators joined
//! by white edges, elimination of white edges, and tautological relations.

use crate::correlators::{graph_terms, CorrelatorError, Correlators};
use crate::graph::{automorphism_order, canonical_form, pair_input, vector_input, CanonicalForm, Graph, GraphError, HeavyEdge, Leaf};
use crate::network::Network;
use crate::rational::{self, one, sign, zero, Rational};
use crate::superalgebra::{Algebra, AlgebraError, Bivector, Operator, Vector};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualVertex {
    pub genus: u32,
    /// Indices of κ_{k₁,…,k_l}; order is irrelevant.
    #[serde(default)]
    pub kappa: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    #[serde(default)]
    pub psi_a: u32,
    #[serde(default)]
    pub psi_b: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualLeaf {
    pub vertex: usize,
    #[serde(default)]
    pub psi: u32,
    pub label: usize,
    /// Pinned basis index of the primary field, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StableDualGraph {
    pub vertices: Vec<DualVertex>,
    #[serde(default)]
    pub edges: Vec<DualEdge>,
    #[serde(default)]
    pub leaves: Vec<DualLeaf>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrataError {
    #[error("invalid stable dual graph: {0}")]
    Invalid(String),
    #[error("inconsistent relation: {0}")]
    Relation(String),
    #[error("final graph is not reachable from the stratum")]
    NotReachable,
    #[error("expected {want} leaf vectors, got {got}")]
    LeafCount { want: usize, got: usize },
    #[error("{0}")]
    Correlator(#[from] CorrelatorError),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("cannot read {path}: {reason}")]
    File { path: String, reason: String },
}

impl StableDualGraph {
    /// Genus-0 curve with the given label groups on a chain of components.
    pub fn genus0_chain(groups: &[&[usize]]) -> StableDualGraph {
        let vertices = groups.iter().map(|_| DualVertex { genus: 0, kappa: vec![] }).collect();
        let edges = (1..groups.len()).map(|v| DualEdge { a: v - 1, b: v, psi_a: 0, psi_b: 0 }).collect();
        let mut leaves: Vec<DualLeaf> = groups
            .iter()
            .enumerate()
            .flat_map(|(v, ls)| ls.iter().map(move |&label| DualLeaf { vertex: v, psi: 0, label, field: None }))
            .collect();
        leaves.sort_by_key(|l| l.label);
        StableDualGraph { vertices, edges, leaves }
    }

    /// One vertex, leaves `1..=psi.len()` with the given powers.
    pub fn smooth(genus: u32, psi: &[u32]) -> StableDualGraph {
        StableDualGraph {
            vertices: vec![DualVertex { genus, kappa: vec![] }],
            edges: vec![],
            leaves: psi.iter().enumerate().map(|(i, &p)| DualLeaf { vertex: 0, psi: p, label: i + 1, field: None }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.leaves.len()
    }

    pub fn valence(&self, v: usize) -> usize {
        let half = self.edges.iter().map(|e| (e.a == v) as usize + (e.b == v) as usize).sum::<usize>();
        half + self.leaves.iter().filter(|l| l.vertex == v).count()
    }

    pub fn genus(&self) -> u32 {
        let b1 = self.edges.len() as i64 - self.vertices.len() as i64 + 1;
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + b1.max(0) as u32
    }

    pub fn codimension(&self) -> i64 {
        let psi: u32 = self.leaves.iter().map(|l| l.psi).sum::<u32>() + self.edges.iter().map(|e| e.psi_a + e.psi_b).sum::<u32>();
        let kappa: u32 = self.vertices.iter().flat_map(|v| &v.kappa).sum();
        (self.edges.len() as u32 + psi + kappa) as i64
    }

    /// Complex dimension of the class: dim M̄_{g,n} minus its codimension.
    pub fn dimension(&self) -> i64 {
        3 * self.genus() as i64 - 3 + self.n() as i64 - self.codimension()
    }

    pub fn validate(&self) -> Result<(), StrataError> {
        let bad = |m: String| Err(StrataError::Invalid(m));
        let nv = self.vertices.len();
        if nv == 0 {
            return bad("no vertices".into());
        }
        for e in &self.edges {
            if e.a >= nv || e.b >= nv {
                return bad(format!("edge ({}, {}) out of range", e.a, e.b));
            }
        }
        let mut labels: Vec<usize> = self.leaves.iter().map(|l| l.label).collect();
        labels.sort_unstable();
        if labels != (1..=self.leaves.len()).collect::<Vec<_>>() {
            return bad(format!("leaf labels must be 1..={} without repeats", self.leaves.len()));
        }
        for l in &self.leaves {
            if l.vertex >= nv {
                return bad(format!("leaf {} on missing vertex {}", l.label, l.vertex));
            }
        }
        for v in 0..nv {
            if 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 <= 0 {
                return bad(format!("vertex {v} is unstable"));
            }
        }
        if !crate::graph::connected(nv, self.edges.iter().map(|e| (e.a, e.b))) {
            return bad("not connected".into());
        }
        Ok(())
    }

    fn colours(&self) -> BTreeMap<(u32, Vec<u32>), u32> {
        let mut keys: Vec<(u32, Vec<u32>)> = self.vertices.iter().map(vertex_key).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().enumerate().map(|(i, k)| (k, i as u32)).collect()
    }

    /// The graph whose automorphisms are those of the stratum, with half-edge
    /// powers transformed by `end`.
    fn coloured(&self, colours: &BTreeMap<(u32, Vec<u32>), u32>, end: impl Fn(usize, u32, bool) -> u32) -> Graph {
        Graph {
            vertices: self.vertices.iter().map(|v| colours[&vertex_key(v)]).collect(),
            heavy_edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(k, e)| HeavyEdge::new(e.a, end(k, e.psi_a, false), e.b, end(k, e.psi_b, true)))
                .collect(),
            leaves: self.leaves.iter().map(|l| Leaf { vertex: l.vertex, psi: l.psi, label: l.label }).collect(),
        }
    }

    pub fn automorphism_order(&self) -> u64 {
        automorphism_order(&self.coloured(&self.colours(), |_, p, _| p))
    }

    pub fn from_json_file(path: &Path) -> Result<StableDualGraph, StrataError> {
        let g: StableDualGraph = read_json(path)?;
        g.validate()?;
        Ok(g)
    }
}

fn vertex_key(v: &DualVertex) -> (u32, Vec<u32>) {
    let mut k = v.kappa.clone();
    k.sort_unstable();
    (v.genus, k)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, StrataError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| StrataError::File { path: p.clone(), reason: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| StrataError::File { path: p, reason: e.to_string() })
}

// ---------------------------------------------------------------------------
// White expressions

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotSource {
    Leaf { label: usize },
    /// τ_{b+1}(unit) standing for one index b of a κ-class.
    Kappa { index: u32 },
    HalfEdge { edge: usize, end: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteSlot {
    pub psi: u32,
    pub source: SlotSource,
}

/// A correlator ⟨…⟩_genus with one insertion per slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteNode {
    pub genus: u32,
    pub slots: Vec<WhiteSlot>,
}

/// `(node, slot)` at each end; the pair carries [Π₀].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteEdge {
    pub s: (usize, usize),
    pub t: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteExpression {
    pub nodes: Vec<WhiteNode>,
    pub edges: Vec<WhiteEdge>,
    #[serde(with = "rational")]
    pub weight: Rational,
}

/// Slots in each node: leaves by label, then κ insertions, then half-edges
/// in edge order. The weight is 1/|Aut S|.
pub fn translate_stratum(s: &StableDualGraph) -> Result<WhiteExpression, StrataError> {
    s.validate()?;
    let mut nodes: Vec<WhiteNode> = s.vertices.iter().map(|v| WhiteNode { genus: v.genus, slots: vec![] }).collect();
    let mut leaves = s.leaves.clone();
    leaves.sort_by_key(|l| l.label);
    for l in &leaves {
        nodes[l.vertex].slots.push(WhiteSlot { psi: l.psi, source: SlotSource::Leaf { label: l.label } });
    }
    for (v, vert) in s.vertices.iter().enumerate() {
        let mut kappa = vert.kappa.clone();
        kappa.sort_unstable();
        for b in kappa {
            nodes[v].slots.push(WhiteSlot { psi: b + 1, source: SlotSource::Kappa { index: b } });
        }
    }
    let mut edges = Vec::with_capacity(s.edges.len());
    for (k, e) in s.edges.iter().enumerate() {
        nodes[e.a].slots.push(WhiteSlot { psi: e.psi_a, source: SlotSource::HalfEdge { edge: k, end: 0 } });
        let sa = (e.a, nodes[e.a].slots.len() - 1);
        nodes[e.b].slots.push(WhiteSlot { psi: e.psi_b, source: SlotSource::HalfEdge { edge: k, end: 1 } });
        let sb = (e.b, nodes[e.b].slots.len() - 1);
        edges.push(WhiteEdge { s: sa, t: sb });
    }
    let weight = Rational::new(1.into(), s.automorphism_order().into());
    Ok(WhiteExpression { nodes, edges, weight })
}

/// Global slot positions of a white expression.
struct Layout {
    genus: Vec<u32>,
    psi: Vec<Vec<u32>>,
    leaf_slots: BTreeMap<usize, usize>,
    unit_slots: Vec<usize>,
    edge_slots: Vec<(usize, usize)>,
}

impl Layout {
    fn new(expr: &WhiteExpression) -> Result<Layout, StrataError> {
        let mut offset = Vec::with_capacity(expr.nodes.len());
        let mut acc = 0;
        for n in &expr.nodes {
            offset.push(acc);
            acc += n.slots.len();
        }
        let mut lay = Layout {
            genus: expr.nodes.iter().map(|n| n.genus).collect(),
            psi: expr.nodes.iter().map(|n| n.slots.iter().map(|s| s.psi).collect()).collect(),
            leaf_slots: BTreeMap::new(),
            unit_slots: vec![],
            edge_slots: vec![],
        };
        for (v, n) in expr.nodes.iter().enumerate() {
            for (k, s) in n.slots.iter().enumerate() {
                match s.source {
                    SlotSource::Leaf { label } => {
                        lay.leaf_slots.insert(label, offset[v] + k);
                    }
                    SlotSource::Kappa { .. } => lay.unit_slots.push(offset[v] + k),
                    SlotSource::HalfEdge { .. } => {}
                }
            }
        }
        let mut used = vec![false; acc];
        for e in &expr.edges {
            let (s, t) = (offset[e.s.0] + e.s.1, offset[e.t.0] + e.t.1);
            if s == t {
                return Err(StrataError::Invalid("white edge joins a slot to itself".into()));
            }
            for x in [s, t] {
                if x >= acc || used[x] {
                    return Err(StrataError::Invalid(format!("slot {x} used twice or out of range")));
                }
                used[x] = true;
            }
            lay.edge_slots.push((s, t));
        }
        Ok(lay)
    }

    fn contract(&self, ctx: &Correlators, bivectors: &[&Bivector], leaf_vectors: &[Vector]) -> Result<Rational, StrataError> {
        if leaf_vectors.len() != self.leaf_slots.len() {
            return Err(StrataError::LeafCount { want: self.leaf_slots.len(), got: leaf_vectors.len() });
        }
        let alg = ctx.algebra();
        for v in leaf_vectors {
            alg.vector_parity(v)?;
        }
        let mut inputs = Vec::new();
        for (&slot, v) in self.leaf_slots.values().zip(leaf_vectors) {
            inputs.push(vector_input(slot, v));
        }
        let unit = alg.basis(alg.unit_index());
        for &s in &self.unit_slots {
            inputs.push(vector_input(s, &unit));
        }
        for (&(s, t), b) in self.edge_slots.iter().zip(bivectors) {
            if b.is_zero() {
                return Ok(zero());
            }
            inputs.push(pair_input(s, t, b));
        }
        let odd: Vec<bool> = alg.parities().iter().map(|p| p.is_odd()).collect();
        let net = Network { odd: &odd, arity: self.psi.iter().map(Vec::len).collect(), inputs };
        let mut err = None;
        let mut buf = Vec::new();
        let value = net.evaluate(|node, idx| {
            buf.clear();
            buf.extend(self.psi[node].iter().copied().zip(idx.iter().copied()));
            ctx.basis(self.genus[node], &buf).unwrap_or_else(|e| {
                err.get_or_insert(e);
                zero()
            })
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(value),
        }
    }
}

/// Value of the expression including its weight; leaf vectors in label order.
pub fn evaluate_white(expr: &WhiteExpression, alg: &Algebra, leaf_vectors: &[Vector]) -> Result<Rational, StrataError> {
    let ctx = Correlators::new(alg)?;
    evaluate_white_with(&ctx, expr, leaf_vectors)
}

pub fn evaluate_white_with(ctx: &Correlators, expr: &WhiteExpression, leaf_vectors: &[Vector]) -> Result<Rational, StrataError> {
    let alg = ctx.algebra();
    let pi0 = alg.bivector_of(&alg.pi0()?)?;
    let lay = Layout::new(expr)?;
    let bivs = vec![&pi0; lay.edge_slots.len()];
    Ok(&expr.weight * lay.contract(ctx, &bivs, leaf_vectors)?)
}

// ---------------------------------------------------------------------------
// Elimination

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoration {
    Plain,
    /// Arrow pointing at end `a`.
    ToA,
    /// Arrow pointing at end `b`.
    ToB,
}

/// The stratum with ψ already raised at pointed ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedDualGraph {
    pub graph: StableDualGraph,
    pub decorations: Vec<Decoration>,
}

impl DecoratedDualGraph {
    pub fn arrows(&self) -> usize {
        self.decorations.iter().filter(|d| **d != Decoration::Plain).count()
    }

    /// Half-edge powers encoded as 2ψ + [pointed], so automorphisms keep arrows.
    fn encoded(&self) -> Graph {
        let colours = self.graph.colours();
        self.graph.coloured(&colours, |k, p, at_b| {
            let pointed = match self.decorations[k] {
                Decoration::Plain => false,
                Decoration::ToA => !at_b,
                Decoration::ToB => at_b,
            };
            2 * p + pointed as u32
        })
    }

    pub fn automorphism_order(&self) -> u64 {
        automorphism_order(&self.encoded())
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canonical_form(&self.encoded())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecoratedTerm {
    #[serde(with = "rational")]
    pub coefficient: Rational,
    pub graph: DecoratedDualGraph,
}

/// All 3^E labeled decorations, each with (−1)^{arrows}/|Aut S|.
pub fn eliminate_white(s: &StableDualGraph) -> Result<Vec<DecoratedTerm>, StrataError> {
    s.validate()?;
    let aut = Rational::new(1.into(), s.automorphism_order().into());
    let mut out = vec![];
    let choices = [Decoration::Plain, Decoration::ToA, Decoration::ToB];
    let total = 3usize.pow(s.edges.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut graph = s.clone();
        let mut decorations = Vec::with_capacity(s.edges.len());
        for e in graph.edges.iter_mut() {
            let d = choices[c % 3];
            c /= 3;
            match d {
                Decoration::Plain => {}
                Decoration::ToA => e.psi_a += 1,
                Decoration::ToB => e.psi_b += 1,
            }
            decorations.push(d);
        }
        let dg = DecoratedDualGraph { graph, decorations };
        let coefficient = sign(dg.arrows() % 2 == 1) * &aut;
        out.push(DecoratedTerm { coefficient, graph: dg });
    }
    Ok(out)
}

/// Sums isomorphic decorated graphs.
pub fn merge_decorated(terms: &[DecoratedTerm]) -> Vec<DecoratedTerm> {
    let mut acc: BTreeMap<CanonicalForm, DecoratedTerm> = BTreeMap::new();
    for t in terms {
        acc.entry(t.graph.canonical_form())
            .and_modify(|m| m.coefficient += &t.coefficient)
            .or_insert_with(|| t.clone());
    }
    acc.into_values().filter(|t| !t.coefficient.is_zero()).collect()
}

/// Value of one decorated graph, without its coefficient: plain edges carry
/// [Id], arrows carry [G₋G₊].
pub fn evaluate_decorated(ctx: &Correlators, d: &DecoratedDualGraph, leaf_vectors: &[Vector]) -> Result<Rational, StrataError> {
    let alg = ctx.algebra();
    let empty = alg.bivector_of(&Operator::identity(alg.dim()))?;
    let heavy = alg.bivector_of(&alg.gminus_gplus()?)?;
    let expr = translate_stratum(&d.graph)?;
    let lay = Layout::new(&expr)?;
    let bivs: Vec<&Bivector> = d.decorations.iter().map(|x| if *x == Decoration::Plain { &empty } else { &heavy }).collect();
    lay.contract(ctx, &bivs, leaf_vectors)
}

pub fn evaluate_eliminated(ctx: &Correlators, terms: &[DecoratedTerm], leaf_vectors: &[Vector]) -> Result<Rational, StrataError> {
    let mut acc = zero();
    for t in terms {
        let v = evaluate_decorated(ctx, &t.graph, leaf_vectors)?;
        if !v.is_zero() {
            acc += &t.coefficient * v;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Final graphs

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Glues chosen node graphs along a decorated stratum. Plain edges are
/// contracted (an edge closing a cycle becomes an empty loop), arrows and
/// internal heavy edges become heavy edges, κ leaves and all ψ are dropped.
/// `None` when a vertex becomes unstable.
fn glue(expr: &WhiteExpression, decorations: &[Decoration], parts: &[&Graph]) -> Option<Graph> {
    let mut base = Vec::with_capacity(parts.len());
    let mut nv = 0;
    for p in parts {
        base.push(nv);
        nv += p.vertices.len();
    }
    let mut genus: Vec<u32> = parts.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    let at = |node: usize, slot: usize| {
        let l = parts[node].leaves.iter().find(|l| l.label == slot + 1).expect("every slot has a leaf");
        base[node] + l.vertex
    };
    let mut parent: Vec<usize> = (0..nv).collect();
    let mut heavy = vec![];
    for (e, d) in expr.edges.iter().zip(decorations) {
        let (u, w) = (at(e.s.0, e.s.1), at(e.t.0, e.t.1));
        if *d == Decoration::Plain {
            let (ru, rw) = (find(&mut parent, u), find(&mut parent, w));
            if ru == rw {
                genus[ru] += 1;
            } else {
                parent[rw] = ru;
                genus[ru] += genus[rw];
            }
        } else {
            heavy.push((u, w));
        }
    }
    for (k, p) in parts.iter().enumerate() {
        for h in &p.heavy_edges {
            heavy.push((base[k] + h.a, base[k] + h.b));
        }
    }
    let mut index = vec![usize::MAX; nv];
    let mut vertices = vec![];
    for x in 0..nv {
        let r = find(&mut parent, x);
        if index[r] == usize::MAX {
            index[r] = vertices.len();
            vertices.push(genus[r]);
        }
    }
    let mut id = |x: usize| index[find(&mut parent, x)];
    let heavy_edges: Vec<HeavyEdge> = heavy.iter().map(|&(u, w)| HeavyEdge::new(id(u), 0, id(w), 0)).collect();
    let mut leaves = vec![];
    for (node, n) in expr.nodes.iter().enumerate() {
        for (slot, s) in n.slots.iter().enumerate() {
            if let SlotSource::Leaf { label } = s.source {
                leaves.push(Leaf { vertex: id(at(node, slot)), psi: 0, label });
            }
        }
    }
    leaves.sort_by_key(|l| l.label);
    let out = Graph { vertices, heavy_edges, leaves };
    for v in 0..out.vertices.len() {
        let val = out.heavy_degree(v) + out.leaf_count(v);
        if 2 * out.vertices[v] as i64 - 2 + val as i64 <= 0 {
            return None;
        }
    }
    Some(out)
}

/// Every final graph of a stratum with its coefficient.
pub fn final_graphs(s: &StableDualGraph) -> Result<Vec<(Graph, Rational)>, StrataError> {
    let mut acc: BTreeMap<CanonicalForm, Rational> = BTreeMap::new();
    for term in eliminate_white(s)? {
        let expr = translate_stratum(&term.graph.graph)?;
        let mut options = Vec::with_capacity(expr.nodes.len());
        for n in &expr.nodes {
            let psi: Vec<u32> = n.slots.iter().map(|x| x.psi).collect();
            options.push(graph_terms(n.genus, &psi)?);
        }
        let mut choice = vec![0usize; options.len()];
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        loop {
            let parts: Vec<&Graph> = choice.iter().zip(&options).map(|(&c, o)| &o[c].graph).collect();
            if let Some(g) = glue(&expr, &term.graph.decorations, &parts) {
                let mut c = term.coefficient.clone();
                for (&k, o) in choice.iter().zip(&options) {
                    c *= &o[k].weight;
                }
                *acc.entry(canonical_form(&g)).or_insert_with(zero) += c;
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(collect_final(acc));
                }
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    Ok(collect_final(acc))
}

fn collect_final(acc: BTreeMap<CanonicalForm, Rational>) -> Vec<(Graph, Rational)> {
    acc.into_iter().map(|(f, c)| (crate::graph::graph_of_form(&f), c)).collect()
}

/// Coefficient of the final graph `y` (vertex genus = empty loops, no ψ).
pub fn coefficient_of_final_graph(s: &StableDualGraph, y: &Graph) -> Result<Rational, StrataError> {
    y.validate()?;
    if y.heavy_edges.iter().any(|e| e.psi_a + e.psi_b > 0) || y.leaves.iter().any(|l| l.psi > 0) {
        return Err(StrataError::Invalid("final graphs carry no ψ".into()));
    }
    if s.dimension() != y.heavy_edges.len() as i64 {
        return Err(StrataError::NotReachable);
    }
    let key = canonical_form(y);
    final_graphs(s)?
        .into_iter()
        .find(|(g, _)| canonical_form(g) == key)
        .map(|(_, c)| c)
        .ok_or(StrataError::NotReachable)
}

// ---------------------------------------------------------------------------
// Relations

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTerm {
    #[serde(with = "rational")]
    pub coeff: Rational,
    pub graph: StableDualGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub genus: u32,
    pub n: usize,
    pub terms: Vec<RelationTerm>,
}

impl Relation {
    pub fn validate(&self) -> Result<(), StrataError> {
        let bad = |m: String| Err(StrataError::Relation(m));
        if self.terms.is_empty() {
            return bad("no terms".into());
        }
        let codim = self.terms[0].graph.codimension();
        for (k, t) in self.terms.iter().enumerate() {
            t.graph.validate()?;
            if t.graph.genus() != self.genus || t.graph.n() != self.n {
                return bad(format!("term {k} lives on M̄_{},{}", t.graph.genus(), t.graph.n()));
            }
            if t.graph.codimension() != codim {
                return bad(format!("term {k} has codimension {}, expected {codim}", t.graph.codimension()));
            }
        }
        let fields: Vec<_> = self.terms.iter().map(|t| pinned_fields(&t.graph)).collect();
        if fields.iter().any(|f| *f != fields[0]) {
            return bad("terms pin different primary fields".into());
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Relation, StrataError> {
        let r: Relation = read_json(path)?;
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn pinned_fields(g: &StableDualGraph) -> BTreeMap<usize, usize> {
    g.leaves.iter().filter_map(|l| l.field.map(|f| (l.label, f))).collect()
}

fn term(coeff: Rational, graph: StableDualGraph) -> RelationTerm {
    RelationTerm { coeff, graph }
}

/// D(12|34) − D(13|24) on M̄_{0,4}.
pub fn wdvv() -> Relation {
    Relation {
        name: "wdvv".into(),
        genus: 0,
        n: 4,
        terms: vec![
            term(one(), StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]])),
            term(-one(), StableDualGraph::genus0_chain(&[&[1, 3], &[2, 4]])),
        ],
    }
}

/// ψ₁ − D(14|23) on M̄_{0,4}.
pub fn trr_genus0() -> Relation {
    Relation {
        name: "trr-genus0".into(),
        genus: 0,
        n: 4,
        terms: vec![
            term(one(), StableDualGraph::smooth(0, &[1, 0, 0, 0])),
            term(-one(), StableDualGraph::genus0_chain(&[&[1, 4], &[2, 3]])),
        ],
    }
}

/// ψ₁ − (1/12)·[irreducible boundary] on M̄_{1,1}.
pub fn trr_genus1() -> Relation {
    let boundary = StableDualGraph {
        vertices: vec![DualVertex { genus: 0, kappa: vec![] }],
        edges: vec![DualEdge { a: 0, b: 0, psi_a: 0, psi_b: 0 }],
        leaves: vec![DualLeaf { vertex: 0, psi: 0, label: 1, field: None }],
    };
    Relation {
        name: "trr-genus1".into(),
        genus: 1,
        n: 1,
        terms: vec![term(one(), StableDualGraph::smooth(1, &[1])), term(-rational::frac(1, 12), boundary)],
    }
}

/// WDVV pulled back along the map forgetting leaf 5.
pub fn wdvv_pulled_back() -> Relation {
    let chain = StableDualGraph::genus0_chain;
    Relation {
        name: "wdvv-pullback".into(),
        genus: 0,
        n: 5,
        terms: vec![
            term(one(), chain(&[&[1, 2, 5], &[3, 4]])),
            term(one(), chain(&[&[1, 2], &[3, 4, 5]])),
            term(-one(), chain(&[&[1, 3, 5], &[2, 4]])),
            term(-one(), chain(&[&[1, 3], &[2, 4, 5]])),
        ],
    }
}

pub fn catalog() -> Vec<Relation> {
    vec![wdvv(), trr_genus0(), trr_genus1(), wdvv_pulled_back()]
}

/// White and eliminated sides of a relation, prepared once for many evaluations.
pub struct PreparedRelation {
    pub relation: Relation,
    white: Vec<(Rational, WhiteExpression)>,
    eliminated: Vec<(Rational, Vec<DecoratedTerm>)>,
}

impl PreparedRelation {
    pub fn new(relation: &Relation) -> Result<PreparedRelation, StrataError> {
        relation.validate()?;
        let mut white = vec![];
        let mut eliminated = vec![];
        for t in &relation.terms {
            white.push((t.coeff.clone(), translate_stratum(&t.graph)?));
            eliminated.push((t.coeff.clone(), eliminate_white(&t.graph)?));
        }
        Ok(PreparedRelation { relation: relation.clone(), white, eliminated })
    }

    pub fn pinned(&self) -> BTreeMap<usize, usize> {
        pinned_fields(&self.relation.terms[0].graph)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub params: String,
    /// Σ coeff · (white-edge value).
    #[serde(with = "rational")]
    pub white: Rational,
    /// Σ coeff · (value after eliminating white edges).
    #[serde(with = "rational")]
    pub eliminated: Rational,
    /// The relation's white-edge value vanishes.
    pub pass: bool,
    /// Both evaluations agree.
    pub consistent: bool,
}

pub fn verify_relation(r: &Relation, alg: &Algebra, leaf_vectors: &[Vector]) -> Result<RelationReport, StrataError> {
    let ctx = Correlators::new(alg)?;
    let p = PreparedRelation::new(r)?;
    verify_prepared(&ctx, &p, leaf_vectors, "custom leaves".into())
}

pub fn verify_prepared(ctx: &Correlators, p: &PreparedRelation, leaf_vectors: &[Vector], params: String) -> Result<RelationReport, StrataError> {
    let mut white = zero();
    for (c, expr) in &p.white {
        white += c * evaluate_white_with(ctx, expr, leaf_vectors)?;
    }
    let mut eliminated = zero();
    for (c, terms) in &p.eliminated {
        eliminated += c * evaluate_eliminated(ctx, terms, leaf_vectors)?;
    }
    Ok(RelationReport {
        name: p.relation.name.clone(),
        params,
        pass: white.is_zero(),
        consistent: white == eliminated,
        white,
        eliminated,
    })
}

/// Every basis leaf assignment (H₀ only unless `full_basis`); pinned leaves keep their field.
pub fn relation_sweep(alg: &Algebra, r: &Relation, full_basis: bool) -> Result<Vec<RelationReport>, StrataError> {
    let ctx = Correlators::new(alg)?;
    let p = PreparedRelation::new(r)?;
    let basis: Vec<usize> = if full_basis { (0..alg.dim()).collect() } else { alg.h0_indices().to_vec() };
    leaf_assignments(&basis, r.n, &p.pinned())
        .par_iter()
        .map(|t| {
            let vs: Vec<Vector> = t.iter().map(|&i| alg.basis(i)).collect();
            let params = t.iter().map(|i| format!("e{i}")).collect::<Vec<_>>().join(" ");
            verify_prepared(&ctx, &p, &vs, params)
        })
        .collect()
}

/// Basis index tuples for leaves 1..=n; pinned labels keep their field.
pub fn leaf_assignments(basis: &[usize], n: usize, pinned: &BTreeMap<usize, usize>) -> Vec<Vec<usize>> {
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for label in 1..=n {
        let choices = match pinned.get(&label) {
            Some(&f) => vec![f],
            None => basis.to_vec(),
        };
        tuples = tuples.into_iter().flat_map(|t| choices.iter().map(move |&i| [t.clone(), vec![i]].concat())).collect();
    }
    tuples
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationCheck {
    pub leaves: Vec<usize>,
    pub white: Rational,
    pub eliminated: Rational,
}

/// White vs eliminated evaluation of one stratum over every leaf assignment.
pub fn elimination_sweep(alg: &Algebra, s: &StableDualGraph, full_basis: bool) -> Result<Vec<EliminationCheck>, StrataError> {
    let ctx = Correlators::new(alg)?;
    let expr = translate_stratum(s)?;
    let terms = eliminate_white(s)?;
    let basis: Vec<usize> = if full_basis { (0..alg.dim()).collect() } else { alg.h0_indices().to_vec() };
    leaf_assignments(&basis, s.n(), &pinned_fields(s))
        .par_iter()
        .map(|t| {
            let vs: Vec<Vector> = t.iter().map(|&i| alg.basis(i)).collect();
            Ok(EliminationCheck {
                leaves: t.clone(),
                white: evaluate_white_with(&ctx, &expr, &vs)?,
                eliminated: evaluate_eliminated(&ctx, &terms, &vs)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::Insertion;
    use crate::examples::{frobenius_truncated_poly, point_algebra};
    use crate::rational::{frac, int};

    fn kappa_vertex(genus: u32, kappa: Vec<u32>, leaves: usize) -> StableDualGraph {
        let mut s = StableDualGraph::smooth(genus, &vec![0; leaves]);
        s.vertices[0].kappa = kappa;
        s
    }

    #[test]
    fn invariants_of_simple_strata() {
        let d = StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]]);
        assert_eq!((d.genus(), d.n(), d.dimension()), (0, 4, 0));
        assert_eq!(d.automorphism_order(), 1);
        let irr = &trr_genus1().terms[1].graph;
        assert_eq!((irr.genus(), irr.dimension(), irr.automorphism_order()), (1, 0, 2));
        assert!(StableDualGraph::smooth(0, &[0, 0]).validate().is_err());
        let mut dup = StableDualGraph::smooth(0, &[0, 0, 0]);
        dup.leaves[2].label = 2;
        assert!(dup.validate().is_err());
    }

    #[test]
    fn one_vertex_is_a_plain_correlator() {
        let alg = frobenius_truncated_poly(3).unwrap();
        let ctx = Correlators::new(&alg).unwrap();
        let s = StableDualGraph::smooth(0, &[1, 0, 0, 0]);
        let expr = translate_stratum(&s).unwrap();
        assert_eq!(expr.nodes.len(), 1);
        assert!(expr.edges.is_empty());
        for i in 0..3 {
            let leaves = [alg.basis(i), alg.basis(0), alg.basis(2 - i), alg.basis(0)];
            let ins: Vec<Insertion> = leaves.iter().zip([1, 0, 0, 0]).map(|(v, p)| Insertion::new(p, v.clone())).collect();
            assert_eq!(evaluate_white_with(&ctx, &expr, &leaves).unwrap(), ctx.eval(0, &ins).unwrap());
        }
    }

    #[test]
    fn boundary_point_on_the_point() {
        let alg = point_algebra();
        let s = StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]]);
        let e = alg.basis(0);
        assert_eq!(evaluate_white(&translate_stratum(&s).unwrap(), &alg, &[e.clone(), e.clone(), e.clone(), e]).unwrap(), int(1));
    }

    #[test]
    fn kappa_becomes_a_unit_insertion() {
        // κ₁ on M̄_{1,1}: ⟨τ₀ τ₂(1)⟩₁ = ⟨τ₁⟩₁ = 1/24 on the point.
        let alg = point_algebra();
        let s = kappa_vertex(1, vec![1], 1);
        assert_eq!(s.dimension(), 0);
        let expr = translate_stratum(&s).unwrap();
        assert_eq!(expr.nodes[0].slots[1], WhiteSlot { psi: 2, source: SlotSource::Kappa { index: 1 } });
        assert_eq!(evaluate_white(&expr, &alg, &[alg.basis(0)]).unwrap(), frac(1, 24));
    }

    #[test]
    fn decoration_counts_and_signs() {
        assert_eq!(eliminate_white(&StableDualGraph::smooth(0, &[0, 0, 0])).unwrap().len(), 1);
        let one_edge = eliminate_white(&StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]])).unwrap();
        let signs: Vec<Rational> = one_edge.iter().map(|t| t.coefficient.clone()).collect();
        assert_eq!(signs, vec![int(1), int(-1), int(-1)]);
        assert_eq!(one_edge[1].graph.graph.edges[0].psi_a, 1);
        assert_eq!(one_edge[2].graph.graph.edges[0].psi_b, 1);
        let two = eliminate_white(&StableDualGraph::genus0_chain(&[&[1, 2], &[3], &[4, 5]])).unwrap();
        assert_eq!(two.len(), 9);
        let by_arrows = |k: usize| two.iter().filter(|t| t.graph.arrows() == k).map(|t| t.coefficient.clone()).collect::<Vec<_>>();
        assert_eq!(by_arrows(0), vec![int(1)]);
        assert_eq!(by_arrows(1), vec![int(-1); 4]);
        assert_eq!(by_arrows(2), vec![int(1); 4]);
    }

    #[test]
    fn merging_gives_inverse_automorphism_orders() {
        for s in [&trr_genus1().terms[1].graph, &StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]])] {
            let labeled = eliminate_white(s).unwrap();
            for t in merge_decorated(&labeled) {
                let want = sign(t.graph.arrows() % 2 == 1) / Rational::from_integer(t.graph.automorphism_order().into());
                assert_eq!(t.coefficient, want);
            }
        }
        // The two arrows on a loop are swapped by its flip.
        assert_eq!(merge_decorated(&eliminate_white(&trr_genus1().terms[1].graph).unwrap()).len(), 2);
    }

    #[test]
    fn white_self_pair_is_rejected() {
        let mut expr = translate_stratum(&trr_genus1().terms[1].graph).unwrap();
        expr.edges[0].t = expr.edges[0].s;
        assert!(matches!(Layout::new(&expr), Err(StrataError::Invalid(_))));
    }

    #[test]
    fn point_coefficients() {
        let boundary = StableDualGraph::genus0_chain(&[&[1, 2], &[3, 4]]);
        let y = Graph { vertices: vec![0], heavy_edges: vec![], leaves: (1..=4).map(|label| Leaf { vertex: 0, psi: 0, label }).collect() };
        assert_eq!(coefficient_of_final_graph(&boundary, &y).unwrap(), int(1));
        assert_eq!(coefficient_of_final_graph(&StableDualGraph::smooth(0, &[1, 0, 0, 0]), &y).unwrap(), int(1));
        let y1 = Graph { vertices: vec![1], heavy_edges: vec![], leaves: vec![Leaf { vertex: 0, psi: 0, label: 1 }] };
        assert_eq!(coefficient_of_final_graph(&StableDualGraph::smooth(1, &[1]), &y1).unwrap(), frac(1, 24));
        assert_eq!(coefficient_of_final_graph(&StableDualGraph::smooth(1, &[1]), &y), Err(StrataError::NotReachable));
    }

    #[test]
    fn relations_vanish_on_the_point() {
        let alg = point_algebra();
        for r in catalog() {
            for rep in relation_sweep(&alg, &r, true).unwrap() {
                assert!(rep.pass && rep.consistent, "{rep:?}");
            }
        }
    }

    #[test]
    fn relation_json_round_trip() {
        for r in catalog() {
            let back: Relation = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(back, r);
        }
        let mut broken = wdvv();
        broken.terms[1].graph = StableDualGraph::smooth(0, &[1, 0, 0, 0, 0]);
        assert!(broken.validate().is_err());
    }
}
