//! Decorated graphs of a correlator: enumeration, automorphisms, the weights
//! V and P, and the signed contraction T.

use crate::network::{Input, Network};
use crate::psi::psi_intersection;
use crate::rational::{one, Rational};
use crate::superalgebra::{Algebra, AlgebraError, Bivector, Operator, Vector};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeavyEdge {
    pub a: usize,
    pub b: usize,
    #[serde(default)]
    pub psi_a: u32,
    #[serde(default)]
    pub psi_b: u32,
}

impl HeavyEdge {
    pub fn new(a: usize, psi_a: u32, b: usize, psi_b: u32) -> HeavyEdge {
        if (a, psi_a) <= (b, psi_b) {
            HeavyEdge { a, b, psi_a, psi_b }
        } else {
            HeavyEdge { a: b, b: a, psi_a: psi_b, psi_b: psi_a }
        }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Leaf {
    pub vertex: usize,
    pub psi: u32,
    pub label: usize,
}

/// Vertices hold only their genus (the number of empty loops).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: Vec<u32>,
    pub heavy_edges: Vec<HeavyEdge>,
    pub leaves: Vec<Leaf>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unstable (g, n) = ({g}, {n})")]
    Unstable { g: u32, n: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("expected {want} leaf vectors, got {got}")]
    LeafCount { want: usize, got: usize },
}

impl Graph {
    pub fn heavy_degree(&self, v: usize) -> usize {
        self.heavy_edges.iter().map(|e| (e.a == v) as usize + (e.b == v) as usize).sum()
    }

    pub fn leaf_count(&self, v: usize) -> usize {
        self.leaves.iter().filter(|l| l.vertex == v).count()
    }

    pub fn first_betti(&self) -> usize {
        (self.heavy_edges.len() + 1).saturating_sub(self.vertices.len())
    }

    pub fn total_genus(&self) -> u32 {
        self.vertices.iter().sum::<u32>() + self.first_betti() as u32
    }

    pub fn is_connected(&self) -> bool {
        connected(self.vertices.len(), self.heavy_edges.iter().map(|e| (e.a, e.b)))
    }

    /// ψ-powers at `v`: leaves in label order, then heavy half-edges in edge order.
    pub fn vertex_powers(&self, v: usize) -> Vec<u32> {
        let mut leaves: Vec<&Leaf> = self.leaves.iter().filter(|l| l.vertex == v).collect();
        leaves.sort_by_key(|l| l.label);
        let mut out: Vec<u32> = leaves.iter().map(|l| l.psi).collect();
        for e in &self.heavy_edges {
            if e.a == v {
                out.push(e.psi_a);
            }
            if e.b == v {
                out.push(e.psi_b);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let nv = self.vertices.len();
        if nv == 0 {
            return Err(GraphError::Invalid("no vertices".into()));
        }
        for e in &self.heavy_edges {
            if e.a >= nv || e.b >= nv {
                return Err(GraphError::Invalid("edge endpoint out of range".into()));
            }
        }
        let mut labels: Vec<usize> = self.leaves.iter().map(|l| l.label).collect();
        labels.sort_unstable();
        if labels != (1..=self.leaves.len()).collect::<Vec<_>>() {
            return Err(GraphError::Invalid("leaf labels must be 1..n".into()));
        }
        if self.leaves.iter().any(|l| l.vertex >= nv) {
            return Err(GraphError::Invalid("leaf vertex out of range".into()));
        }
        for v in 0..nv {
            if 2 * self.vertices[v] as i64 - 2 + (self.heavy_degree(v) + self.leaf_count(v)) as i64 <= 0 {
                return Err(GraphError::Invalid(format!("vertex {v} is unstable")));
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Invalid("graph is disconnected".into()));
        }
        Ok(())
    }

    fn sorted_leaves(&self) -> Vec<&Leaf> {
        let mut l: Vec<&Leaf> = self.leaves.iter().collect();
        l.sort_by_key(|l| l.label);
        l
    }
}

pub(crate) fn connected(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    if n == 0 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut comps = n;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

// ---------------------------------------------------------------------------
// Canonical forms

/// Vertex-relabeling-invariant description of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    vertices: Vec<(u32, Vec<(usize, u32)>)>,
    edges: Vec<(usize, u32, usize, u32)>,
}

fn base_key(g: &Graph, v: usize) -> (u32, Vec<(usize, u32)>, usize) {
    let mut leaves: Vec<(usize, u32)> = g.leaves.iter().filter(|l| l.vertex == v).map(|l| (l.label, l.psi)).collect();
    leaves.sort_unstable();
    (g.vertices[v], leaves, g.heavy_degree(v))
}

/// Colour refinement: vertex classes stable under neighbourhood comparison.
fn refined_classes(g: &Graph) -> Vec<usize> {
    let n = g.vertices.len();
    let keys: Vec<_> = (0..n).map(|v| base_key(g, v)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    let mut class: Vec<usize> = keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect();
    loop {
        let sig: Vec<(usize, Vec<(usize, u32, u32)>)> = (0..n)
            .map(|v| {
                let mut nb = Vec::new();
                for e in &g.heavy_edges {
                    if e.a == v {
                        nb.push((class[e.b], e.psi_a, e.psi_b));
                    }
                    if e.b == v {
                        nb.push((class[e.a], e.psi_b, e.psi_a));
                    }
                }
                nb.sort_unstable();
                (class[v], nb)
            })
            .collect();
        let mut s = sig.clone();
        s.sort();
        s.dedup();
        let next: Vec<usize> = sig.iter().map(|k| s.binary_search(k).unwrap()).collect();
        let count = |c: &[usize]| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        if count(&next) == count(&class) {
            return next;
        }
        class = next;
    }
}

fn form_under(g: &Graph, order: &[usize]) -> CanonicalForm {
    // order[new] = old
    let mut pos = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let vertices = order
        .iter()
        .map(|&old| {
            let (genus, leaves, _) = base_key(g, old);
            (genus, leaves)
        })
        .collect();
    let mut edges: Vec<(usize, u32, usize, u32)> = g
        .heavy_edges
        .iter()
        .map(|e| {
            let h = HeavyEdge::new(pos[e.a], e.psi_a, pos[e.b], e.psi_b);
            (h.a, h.psi_a, h.b, h.psi_b)
        })
        .collect();
    edges.sort_unstable();
    CanonicalForm { vertices, edges }
}

/// All vertex orders compatible with the refined classes (classes in increasing order).
fn class_orders(classes: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in classes.iter().enumerate() {
        groups.entry(c).or_default().push(v);
    }
    let mut orders = vec![Vec::new()];
    for members in groups.values() {
        let perms = permutations(members);
        let mut next = Vec::with_capacity(orders.len() * perms.len());
        for o in &orders {
            for p in &perms {
                let mut o2 = o.clone();
                o2.extend_from_slice(p);
                next.push(o2);
            }
        }
        orders = next;
    }
    orders
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Canonical form and the number of vertex permutations fixing the graph.
fn canonical_with_count(g: &Graph) -> (CanonicalForm, usize) {
    let classes = refined_classes(g);
    let mut best: Option<CanonicalForm> = None;
    let mut count = 0;
    for order in class_orders(&classes) {
        let f = form_under(g, &order);
        match &best {
            Some(b) if f > *b => {}
            Some(b) if f == *b => count += 1,
            _ => {
                best = Some(f);
                count = 1;
            }
        }
    }
    (best.expect("at least one order"), count)
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    canonical_with_count(g).0
}

pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    canonical_form(a) == canonical_form(b)
}

/// Rebuilds a graph from its canonical form (vertices in canonical order).
pub fn graph_of_form(f: &CanonicalForm) -> Graph {
    let vertices = f.vertices.iter().map(|v| v.0).collect();
    let mut leaves = Vec::new();
    for (v, (_, ls)) in f.vertices.iter().enumerate() {
        for &(label, psi) in ls {
            leaves.push(Leaf { vertex: v, psi, label });
        }
    }
    leaves.sort_by_key(|l| l.label);
    let heavy_edges = f.edges.iter().map(|&(a, pa, b, pb)| HeavyEdge { a, b, psi_a: pa, psi_b: pb }).collect();
    Graph { vertices, heavy_edges, leaves }
}

/// |aut| of the genus-labeled graph with empty loops deleted.
pub fn automorphism_order(g: &Graph) -> u64 {
    let (_, vertex_perms) = canonical_with_count(g);
    let mut mult: HashMap<&HeavyEdge, u64> = HashMap::new();
    for e in &g.heavy_edges {
        *mult.entry(e).or_default() += 1;
    }
    let mut order = vertex_perms as u64;
    for (e, m) in mult {
        order *= (1..=m).product::<u64>();
        if e.is_loop() && e.psi_a == e.psi_b {
            order *= 1 << m;
        }
    }
    order
}

pub fn weight_v(g: &Graph) -> Rational {
    Rational::new(1.into(), automorphism_order(g).into())
}

pub fn weight_p(g: &Graph) -> Rational {
    let mut acc = one();
    for v in 0..g.vertices.len() {
        let p = psi_intersection(g.vertices[v], &g.vertex_powers(v));
        if p.is_zero() {
            return p;
        }
        acc *= p;
    }
    acc
}

// ---------------------------------------------------------------------------
// Enumeration

/// Number of heavy edges forced by the dimension count.
pub fn heavy_edge_count(g: u32, leaf_psi: &[u32]) -> i64 {
    3 * g as i64 - 3 + leaf_psi.len() as i64 - leaf_psi.iter().map(|&a| a as i64).sum::<i64>()
}

pub fn enumerate_graphs(g: u32, leaf_psi: &[u32]) -> Result<Vec<Graph>, GraphError> {
    enumerate_graphs_with(g, leaf_psi, true)
}

/// With `pruned = false`, vertices of genus ≥ 2 are also allowed next to heavy edges.
pub fn enumerate_graphs_with(g: u32, leaf_psi: &[u32], pruned: bool) -> Result<Vec<Graph>, GraphError> {
    let n = leaf_psi.len();
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(GraphError::Unstable { g, n });
    }
    let e = heavy_edge_count(g, leaf_psi);
    if e < 0 {
        return Ok(Vec::new());
    }
    let e = e as usize;
    let mut found: BTreeMap<CanonicalForm, Graph> = BTreeMap::new();
    for nv in 1..=e + 1 {
        let b1 = e + 1 - nv;
        if b1 as u32 > g {
            continue;
        }
        let genus_sum = g - b1 as u32;
        let gmax = if pruned && e > 0 { 1 } else { genus_sum };
        for blocks in set_partitions(n) {
            if blocks.len() > nv {
                continue;
            }
            let r = blocks.len();
            // Leafless vertices have m = 3 − 3g ≥ 3 only at genus 0.
            let leafless = nv - r;
            for genera in genus_vectors(r, genus_sum, gmax) {
                let mut genera = genera;
                genera.extend(std::iter::repeat(0).take(leafless));
                let mut degree = Vec::with_capacity(nv);
                let mut ok = true;
                for v in 0..nv {
                    let (psi_sum, l) = if v < r {
                        (blocks[v].iter().map(|&i| leaf_psi[i] as i64).sum::<i64>(), blocks[v].len() as i64)
                    } else {
                        (0, 0)
                    };
                    let m = psi_sum - 3 * genera[v] as i64 + 3 - l;
                    if m < 0 || 2 * genera[v] as i64 - 2 + m + l <= 0 {
                        ok = false;
                        break;
                    }
                    degree.push(m as usize);
                }
                if !ok || degree.iter().sum::<usize>() != 2 * e {
                    continue;
                }
                let mut leaves = Vec::with_capacity(n);
                for (v, blk) in blocks.iter().enumerate() {
                    for &i in blk {
                        leaves.push(Leaf { vertex: v, psi: leaf_psi[i], label: i + 1 });
                    }
                }
                leaves.sort_by_key(|l| l.label);
                let mut rem = degree.clone();
                let mut edges = Vec::new();
                multigraphs(&mut rem, &mut edges, (0, 0), &mut |edges| {
                    if !connected(nv, edges.iter().copied()) {
                        return;
                    }
                    let graph = Graph {
                        vertices: genera.clone(),
                        heavy_edges: edges.iter().map(|&(a, b)| HeavyEdge::new(a, 0, b, 0)).collect(),
                        leaves: leaves.clone(),
                    };
                    let form = canonical_form(&graph);
                    found.entry(form).or_insert(graph);
                });
            }
        }
    }
    Ok(found.into_iter().map(|(f, _)| graph_of_form(&f)).collect())
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn genus_vectors(r: usize, sum: u32, gmax: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(r: usize, left: u32, gmax: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=left.min(gmax) {
            cur.push(x);
            rec(r, left - x, gmax, cur, out);
            cur.pop();
        }
    }
    rec(r, sum, gmax, &mut Vec::new(), &mut out);
    out
}

/// Edge multisets realizing the degree sequence `rem`, edges in sorted order.
fn multigraphs(rem: &mut Vec<usize>, edges: &mut Vec<(usize, usize)>, last: (usize, usize), emit: &mut dyn FnMut(&[(usize, usize)])) {
    let Some(u) = rem.iter().position(|&d| d > 0) else {
        emit(edges);
        return;
    };
    let start = if last.0 == u { last.1 } else { u };
    for w in start..rem.len() {
        if w == u {
            if rem[u] < 2 {
                continue;
            }
            rem[u] -= 2;
        } else {
            if rem[w] == 0 {
                continue;
            }
            rem[u] -= 1;
            rem[w] -= 1;
        }
        edges.push((u, w));
        multigraphs(rem, edges, (u, w), emit);
        edges.pop();
        if w == u {
            rem[u] += 2;
        } else {
            rem[u] += 1;
            rem[w] += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Contraction

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SlotKind {
    Leaf { label: usize },
    Heavy { edge: usize, end: usize },
    EmptyLoop { index: u32, end: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeRef {
    Heavy(usize),
    EmptyLoop { vertex: usize, index: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PlanStep {
    Leaf { label: usize, slot: usize },
    Edge { edge: EdgeRef, slots: (usize, usize) },
}

/// Slot layout and contraction order for one graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionPlan {
    /// Per vertex, its slots in order.
    pub vertex_slots: Vec<Vec<SlotKind>>,
    pub steps: Vec<PlanStep>,
    /// Cycle-closing edges: every empty loop plus the heavy edges off the DFS tree.
    pub twisted: Vec<EdgeRef>,
}

impl ContractionPlan {
    pub fn new(g: &Graph) -> ContractionPlan {
        let nv = g.vertices.len();
        let mut vertex_slots: Vec<Vec<SlotKind>> = vec![Vec::new(); nv];
        for l in g.sorted_leaves() {
            vertex_slots[l.vertex].push(SlotKind::Leaf { label: l.label });
        }
        for (i, e) in g.heavy_edges.iter().enumerate() {
            vertex_slots[e.a].push(SlotKind::Heavy { edge: i, end: 0 });
            vertex_slots[e.b].push(SlotKind::Heavy { edge: i, end: 1 });
        }
        for v in 0..nv {
            for k in 0..g.vertices[v] {
                vertex_slots[v].push(SlotKind::EmptyLoop { index: k, end: 0 });
                vertex_slots[v].push(SlotKind::EmptyLoop { index: k, end: 1 });
            }
        }
        let mut offset = Vec::with_capacity(nv);
        let mut acc = 0;
        for s in &vertex_slots {
            offset.push(acc);
            acc += s.len();
        }
        let slot_of = |v: usize, kind: &SlotKind| offset[v] + vertex_slots[v].iter().position(|k| k == kind).unwrap();

        let mut steps = Vec::new();
        for l in g.sorted_leaves() {
            steps.push(PlanStep::Leaf { label: l.label, slot: slot_of(l.vertex, &SlotKind::Leaf { label: l.label }) });
        }
        let mut twisted = Vec::new();
        let mut visited = vec![false; nv];
        let mut used = vec![false; g.heavy_edges.len()];
        let mut edge_steps = Vec::new();
        fn dfs(
            v: usize,
            g: &Graph,
            visited: &mut Vec<bool>,
            used: &mut Vec<bool>,
            out: &mut Vec<(EdgeRef, bool)>,
        ) {
            visited[v] = true;
            for k in 0..g.vertices[v] {
                out.push((EdgeRef::EmptyLoop { vertex: v, index: k }, true));
            }
            for (i, e) in g.heavy_edges.iter().enumerate() {
                if used[i] || (e.a != v && e.b != v) {
                    continue;
                }
                used[i] = true;
                let w = if e.a == v { e.b } else { e.a };
                if visited[w] {
                    out.push((EdgeRef::Heavy(i), true));
                } else {
                    out.push((EdgeRef::Heavy(i), false));
                    dfs(w, g, visited, used, out);
                }
            }
        }
        dfs(0, g, &mut visited, &mut used, &mut edge_steps);
        for (edge, tw) in edge_steps {
            let slots = match &edge {
                EdgeRef::Heavy(i) => {
                    let e = &g.heavy_edges[*i];
                    (slot_of(e.a, &SlotKind::Heavy { edge: *i, end: 0 }), slot_of(e.b, &SlotKind::Heavy { edge: *i, end: 1 }))
                }
                EdgeRef::EmptyLoop { vertex, index } => (
                    slot_of(*vertex, &SlotKind::EmptyLoop { index: *index, end: 0 }),
                    slot_of(*vertex, &SlotKind::EmptyLoop { index: *index, end: 1 }),
                ),
            };
            if tw {
                twisted.push(edge.clone());
            }
            steps.push(PlanStep::Edge { edge, slots });
        }
        ContractionPlan { vertex_slots, steps, twisted }
    }
}

/// `∫ e_{i₁}⋯e_{i_k}` with a cache keyed on the index list.
pub(crate) struct VertexForms<'a> {
    alg: &'a Algebra,
    cache: HashMap<Vec<usize>, Rational>,
}

impl<'a> VertexForms<'a> {
    pub fn new(alg: &'a Algebra) -> VertexForms<'a> {
        VertexForms { alg, cache: HashMap::new() }
    }

    pub fn eval(&mut self, idx: &[usize]) -> Rational {
        let odd = idx.iter().filter(|&&i| self.alg.parity(i).is_odd()).count();
        if odd % 2 == 1 {
            return Rational::zero();
        }
        if let Some(v) = self.cache.get(idx) {
            return v.clone();
        }
        let mut acc = self.alg.basis(self.alg.unit_index());
        for &i in idx {
            acc = self.alg.multiply(&acc, &self.alg.basis(i));
            if acc.is_zero() {
                break;
            }
        }
        let v = self.alg.integrate(&acc);
        self.cache.insert(idx.to_vec(), v.clone());
        v
    }
}

pub(crate) fn vector_input(slot: usize, v: &Vector) -> Input {
    Input::Vector { slot, comps: v.support().map(|(i, c)| (i, c.clone())).collect() }
}

pub(crate) fn pair_input(s: usize, t: usize, b: &Bivector) -> Input {
    Input::Pair { s, t, comps: b.entries() }
}

/// Bivectors used on heavy edges and empty loops.
pub struct EdgeTensors {
    pub heavy: Bivector,
    pub empty: Bivector,
}

impl EdgeTensors {
    pub fn new(alg: &Algebra) -> Result<EdgeTensors, AlgebraError> {
        Ok(EdgeTensors {
            heavy: alg.bivector_of(&alg.gminus_gplus()?)?,
            empty: alg.bivector_of(&Operator::identity(alg.dim()))?,
        })
    }
}

pub fn contract_t(alg: &Algebra, g: &Graph, leaf_vectors: &[Vector]) -> Result<Rational, GraphError> {
    let tensors = EdgeTensors::new(alg)?;
    contract_t_with(alg, &tensors, g, leaf_vectors)
}

pub fn contract_t_with(alg: &Algebra, tensors: &EdgeTensors, g: &Graph, leaf_vectors: &[Vector]) -> Result<Rational, GraphError> {
    if leaf_vectors.len() != g.leaves.len() {
        return Err(GraphError::LeafCount { want: g.leaves.len(), got: leaf_vectors.len() });
    }
    for v in leaf_vectors {
        alg.vector_parity(v)?;
    }
    let plan = ContractionPlan::new(g);
    let mut inputs = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        match step {
            PlanStep::Leaf { label, slot } => inputs.push(vector_input(*slot, &leaf_vectors[label - 1])),
            PlanStep::Edge { edge, slots } => {
                let b = match edge {
                    EdgeRef::Heavy(_) => &tensors.heavy,
                    EdgeRef::EmptyLoop { .. } => &tensors.empty,
                };
                if b.is_zero() {
                    return Ok(Rational::zero());
                }
                inputs.push(pair_input(slots.0, slots.1, b));
            }
        }
    }
    let odd: Vec<bool> = alg.parities().iter().map(|p| p.is_odd()).collect();
    let net = Network { odd: &odd, arity: plan.vertex_slots.iter().map(|s| s.len()).collect(), inputs };
    let mut forms = VertexForms::new(alg);
    Ok(net.evaluate(|_, idx| forms.eval(idx)))
}

/// All values of T(Γ) on basis leaf assignments, keyed by leaf indices in label order.
///
/// Agrees with `contract_t_with` entrywise: the walk is vertex by vertex for
/// pruning, and the Koszul sign is recovered from the plan's input order.
pub fn contract_tensor(alg: &Algebra, tensors: &EdgeTensors, g: &Graph) -> HashMap<Vec<usize>, Rational> {
    let plan = ContractionPlan::new(g);
    let nv = g.vertices.len();
    let mut offset = Vec::with_capacity(nv);
    let mut acc = 0;
    for s in &plan.vertex_slots {
        offset.push(acc);
        acc += s.len();
    }
    let nslots = acc;
    // Placement order, and per edge its bivector and slots.
    let mut order = Vec::with_capacity(nslots);
    let mut leaf_slot = vec![0; g.leaves.len()];
    let mut edges: Vec<(usize, usize, &Bivector)> = Vec::new();
    for step in &plan.steps {
        match step {
            PlanStep::Leaf { label, slot } => {
                order.push(*slot);
                leaf_slot[label - 1] = *slot;
            }
            PlanStep::Edge { edge, slots } => {
                order.push(slots.0);
                order.push(slots.1);
                let b = match edge {
                    EdgeRef::Heavy(_) => &tensors.heavy,
                    EdgeRef::EmptyLoop { .. } => &tensors.empty,
                };
                edges.push((slots.0, slots.1, b));
            }
        }
    }
    let mut out = HashMap::new();
    if edges.iter().any(|e| e.2.is_zero()) {
        return out;
    }
    let entries: Vec<Vec<(usize, usize, Rational)>> = edges.iter().map(|e| e.2.entries()).collect();
    let mut slot_vertex = Vec::with_capacity(nslots);
    for (v, slots) in plan.vertex_slots.iter().enumerate() {
        slot_vertex.extend(std::iter::repeat(v).take(slots.len()));
    }
    // Each edge is chosen at the first of its two vertices.
    let mut new_edges = vec![Vec::new(); nv];
    for (k, e) in edges.iter().enumerate() {
        new_edges[slot_vertex[e.0].min(slot_vertex[e.1])].push(k);
    }
    let odd: Vec<bool> = alg.parities().iter().map(|p| p.is_odd()).collect();
    let mut w = TensorWalk {
        alg,
        odd: &odd,
        plan: &plan,
        offset: &offset,
        order: &order,
        leaf_slot: &leaf_slot,
        edges: &edges,
        entries: &entries,
        new_edges: &new_edges,
        assigned: vec![usize::MAX; nslots],
        out: &mut out,
    };
    w.vertex(0, one());
    out.retain(|_, v| !v.is_zero());
    out
}

struct TensorWalk<'a> {
    alg: &'a Algebra,
    odd: &'a [bool],
    plan: &'a ContractionPlan,
    offset: &'a [usize],
    order: &'a [usize],
    leaf_slot: &'a [usize],
    edges: &'a [(usize, usize, &'a Bivector)],
    entries: &'a [Vec<(usize, usize, Rational)>],
    new_edges: &'a [Vec<usize>],
    assigned: Vec<usize>,
    out: &'a mut HashMap<Vec<usize>, Rational>,
}

impl TensorWalk<'_> {
    fn vertex(&mut self, v: usize, coeff: Rational) {
        if v == self.plan.vertex_slots.len() {
            self.finish(coeff);
            return;
        }
        self.edges_at(v, 0, coeff);
    }

    fn edges_at(&mut self, v: usize, k: usize, coeff: Rational) {
        if k == self.new_edges[v].len() {
            self.leaves_at(v, coeff);
            return;
        }
        let e = self.new_edges[v][k];
        let (s, t) = (self.edges[e].0, self.edges[e].1);
        for (j, l, c) in &self.entries[e] {
            self.assigned[s] = *j;
            self.assigned[t] = *l;
            self.edges_at(v, k + 1, &coeff * c);
        }
        self.assigned[s] = usize::MAX;
        self.assigned[t] = usize::MAX;
    }

    fn leaves_at(&mut self, v: usize, coeff: Rational) {
        let lo = self.offset[v];
        let kinds = &self.plan.vertex_slots[v];
        let nleaves = kinds.iter().take_while(|k| matches!(k, SlotKind::Leaf { .. })).count();
        // Right-to-left product of the fixed slots.
        let mut tail = self.alg.basis(self.alg.unit_index());
        for s in (lo + nleaves..lo + kinds.len()).rev() {
            tail = self.alg.multiply(&self.alg.basis(self.assigned[s]), &tail);
            if tail.is_zero() {
                return;
            }
        }
        self.fill(v, lo, nleaves, tail, coeff);
    }

    fn fill(&mut self, v: usize, lo: usize, k: usize, tail: Vector, coeff: Rational) {
        if k == 0 {
            let val = self.alg.integrate(&tail);
            if !val.is_zero() {
                self.vertex(v + 1, coeff * val);
            }
            return;
        }
        let s = lo + k - 1;
        for i in 0..self.alg.dim() {
            let next = self.alg.multiply(&self.alg.basis(i), &tail);
            if next.is_zero() {
                continue;
            }
            self.assigned[s] = i;
            self.fill(v, lo, k - 1, next, coeff.clone());
        }
        self.assigned[s] = usize::MAX;
    }

    fn finish(&mut self, coeff: Rational) {
        let mut flip = false;
        for (a, &sa) in self.order.iter().enumerate() {
            if !self.odd[self.assigned[sa]] {
                continue;
            }
            for &sb in &self.order[a + 1..] {
                if sb < sa && self.odd[self.assigned[sb]] {
                    flip = !flip;
                }
            }
        }
        let key: Vec<usize> = self.leaf_slot.iter().map(|&s| self.assigned[s]).collect();
        let val = if flip { -coeff } else { coeff };
        *self.out.entry(key).or_insert_with(Rational::zero) += val;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{frobenius_truncated_poly, point_algebra};
    use crate::rational::{frac, int};

    fn single(genus: u32, psi: &[u32]) -> Graph {
        Graph {
            vertices: vec![genus],
            heavy_edges: vec![],
            leaves: psi.iter().enumerate().map(|(i, &p)| Leaf { vertex: 0, psi: p, label: i + 1 }).collect(),
        }
    }

    #[test]
    fn small_enumerations() {
        let gs = enumerate_graphs(0, &[0, 0, 0]).unwrap();
        assert_eq!(gs, vec![single(0, &[0, 0, 0])]);

        let gs = enumerate_graphs(0, &[0, 0, 0, 0]).unwrap();
        assert_eq!(gs.len(), 3);
        for g in &gs {
            assert_eq!(g.vertices, vec![0, 0]);
            assert_eq!(g.heavy_edges.len(), 1);
            assert_eq!(g.leaf_count(0), 2);
        }

        assert_eq!(enumerate_graphs(1, &[1]).unwrap(), vec![single(1, &[1])]);
        assert!(enumerate_graphs(0, &[2, 0, 0]).unwrap().is_empty());
        assert!(matches!(enumerate_graphs(0, &[0, 0]), Err(GraphError::Unstable { .. })));
    }

    #[test]
    fn genus_one_one_point_graphs() {
        // E = 1: a genus-0 vertex with a heavy loop.
        let gs = enumerate_graphs(1, &[0]).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].vertices, vec![0]);
        assert_eq!(automorphism_order(&gs[0]), 2);
        assert_eq!(weight_v(&gs[0]), frac(1, 2));
    }

    #[test]
    fn automorphisms_and_weights() {
        let two = Graph {
            vertices: vec![0, 0],
            heavy_edges: vec![HeavyEdge::new(0, 0, 1, 0)],
            leaves: vec![
                Leaf { vertex: 0, psi: 0, label: 1 },
                Leaf { vertex: 0, psi: 0, label: 2 },
                Leaf { vertex: 1, psi: 0, label: 3 },
                Leaf { vertex: 1, psi: 0, label: 4 },
            ],
        };
        assert_eq!(automorphism_order(&two), 1);
        assert_eq!(weight_p(&two), int(1));
        assert_eq!(weight_v(&single(0, &[0, 0, 0])), int(1));
        assert_eq!(weight_v(&single(1, &[1])), int(1));
        assert_eq!(weight_p(&single(1, &[1])), frac(1, 24));

        // Two leafless trivalent vertices joined by three edges: S₂ × S₃.
        let theta = Graph {
            vertices: vec![0, 0],
            heavy_edges: vec![HeavyEdge::new(0, 0, 1, 0); 3],
            leaves: vec![],
        };
        assert_eq!(automorphism_order(&theta), 12);
    }

    #[test]
    fn contraction_examples() {
        let p = point_algebra();
        let e = p.basis(0);
        assert_eq!(contract_t(&p, &single(0, &[0, 0, 0]), &[e.clone(), e.clone(), e.clone()]).unwrap(), int(1));
        let gs = enumerate_graphs(0, &[0, 0, 0, 0]).unwrap();
        assert_eq!(contract_t(&p, &gs[0], &vec![e.clone(); 4]).unwrap(), int(0));

        let f = frobenius_truncated_poly(3).unwrap();
        let (one_, x) = (f.basis(0), f.basis(1));
        assert_eq!(contract_t(&f, &single(0, &[0, 0, 0]), &[one_, x.clone(), x]).unwrap(), int(1));
    }

    #[test]
    fn empty_loop_gives_supertrace() {
        let f = frobenius_truncated_poly(3).unwrap();
        for i in 0..3 {
            let a = f.basis(i);
            let t = contract_t(&f, &single(1, &[1]), &[a.clone()]).unwrap();
            assert_eq!(t, f.supertrace(&f.left_mult(&a)));
        }
    }

    #[test]
    fn plan_twists_cycle_closing_edges() {
        let gs = enumerate_graphs(2, &[0, 0]).unwrap();
        for g in &gs {
            let plan = ContractionPlan::new(g);
            let loops: u32 = g.vertices.iter().sum();
            assert_eq!(plan.twisted.len(), loops as usize + g.first_betti());
            let slots: usize = plan.vertex_slots.iter().map(|s| s.len()).sum();
            let covered: usize = plan
                .steps
                .iter()
                .map(|s| match s {
                    PlanStep::Leaf { .. } => 1,
                    PlanStep::Edge { .. } => 2,
                })
                .sum();
            assert_eq!(covered, slots);
            let tree: Vec<(usize, usize)> = plan
                .steps
                .iter()
                .filter_map(|s| match s {
                    PlanStep::Edge { edge: EdgeRef::Heavy(i), .. } if !plan.twisted.contains(&EdgeRef::Heavy(*i)) => {
                        Some((g.heavy_edges[*i].a, g.heavy_edges[*i].b))
                    }
                    _ => None,
                })
                .collect();
            assert_eq!(tree.len() + 1, g.vertices.len());
            assert!(connected(g.vertices.len(), tree.into_iter()));
        }
    }

    #[test]
    fn no_isomorphic_duplicates() {
        for (g, psi) in [(2u32, vec![0u32, 0]), (1, vec![0, 0, 0]), (0, vec![0; 6]), (2, vec![1, 0, 0])] {
            let gs = enumerate_graphs(g, &psi).unwrap();
            for (i, a) in gs.iter().enumerate() {
                a.validate().unwrap();
                assert_eq!(a.total_genus(), g);
                for b in &gs[i + 1..] {
                    assert!(!isomorphic(a, b));
                }
            }
        }
    }
}
