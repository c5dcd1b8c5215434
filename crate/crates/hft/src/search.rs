//! Backtracking search for small cyclic Hodge algebras with nontrivial H₄.
//!
//! Basis layout: H₀ first (index 0 is the unit), then each block as
//! `e, Qe, G₋e, QG₋e`. Q and G₋ are fixed by the block pattern; the unknowns
//! are the structure constants allowed by parity and supercommutativity, and
//! the integral on even H₀ vectors. Values come from a finite list, tried in
//! order, so the first solution is deterministic.

use crate::rational::{one, sign, zero, Rational};
use crate::superalgebra::{check_axioms, load_algebra, Algebra, AlgebraSpec, MulEntry, Parity, RatRow};
use num_traits::Zero;

#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub h0_parities: Vec<Parity>,
    pub block_parities: Vec<Parity>,
    pub values: Vec<Rational>,
}

impl SearchSpace {
    pub fn new(h0_parities: Vec<Parity>, block_parities: Vec<Parity>) -> SearchSpace {
        SearchSpace { h0_parities, block_parities, values: crate::examples::small_values() }
    }

    /// Layout string such as `"h0=0,0;blocks=1"`.
    pub fn parse_layout(s: &str) -> Result<SearchSpace, String> {
        let mut h0 = None;
        let mut blocks = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part.split_once('=').ok_or_else(|| format!("bad layout part {part:?}"))?;
            let bits = val
                .split(',')
                .map(str::trim)
                .filter(|b| !b.is_empty())
                .map(|b| match b {
                    "0" => Ok(Parity::Even),
                    "1" => Ok(Parity::Odd),
                    _ => Err(format!("bad parity {b:?}")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            match key.trim() {
                "h0" => h0 = Some(bits),
                "blocks" => blocks = bits,
                k => return Err(format!("unknown layout key {k:?}")),
            }
        }
        let h0 = h0.ok_or("layout needs h0=...")?;
        if h0.first() != Some(&Parity::Even) {
            return Err("the first H0 vector is the unit and must be even".into());
        }
        Ok(SearchSpace::new(h0, blocks))
    }

    pub fn dim(&self) -> usize {
        self.h0_parities.len() + 4 * self.block_parities.len()
    }

    fn parities(&self) -> Vec<Parity> {
        let mut p = self.h0_parities.clone();
        for &b in &self.block_parities {
            p.extend([b, b.flip(), b.flip(), b]);
        }
        p
    }

    fn blocks(&self) -> Vec<[usize; 4]> {
        let s = self.h0_parities.len();
        (0..self.block_parities.len()).map(|a| [s + 4 * a, s + 4 * a + 1, s + 4 * a + 2, s + 4 * a + 3]).collect()
    }
}

#[derive(Debug)]
pub enum SearchOutcome {
    Found { algebra: Algebra, nodes: u64 },
    Exhausted { nodes: u64 },
    BudgetExceeded { nodes: u64 },
}

impl SearchOutcome {
    pub fn algebra(&self) -> Option<&Algebra> {
        match self {
            SearchOutcome::Found { algebra, .. } => Some(algebra),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Var {
    Integral(usize),
    Mul(usize, usize, usize),
}

type Vec_ = Vec<Rational>;

struct State {
    dim: usize,
    par: Vec<Parity>,
    h0: Vec<usize>,
    blocks: Vec<[usize; 4]>,
    q: Vec<Vec_>,
    g: Vec<Vec_>,
    table: Vec<Vec<Option<Vec_>>>,
    partial: Vec<Vec<Vec_>>,
    integral: Vec<Rational>,
}

impl State {
    fn odd(&self, i: usize) -> bool {
        self.par[i].is_odd()
    }

    fn apply(&self, m: &[Vec_], v: &[Rational]) -> Vec_ {
        let mut out = vec![zero(); self.dim];
        for (j, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for i in 0..self.dim {
                if !m[i][j].is_zero() {
                    out[i] += &m[i][j] * c;
                }
            }
        }
        out
    }

    fn mul(&self, a: &[Rational], b: &[Rational]) -> Option<Vec_> {
        let mut out = vec![zero(); self.dim];
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let t = self.table[i][j].as_ref()?;
                let s = ca * cb;
                for k in 0..self.dim {
                    if !t[k].is_zero() {
                        out[k] += &t[k] * &s;
                    }
                }
            }
        }
        Some(out)
    }

    fn e(&self, i: usize) -> Vec_ {
        let mut v = vec![zero(); self.dim];
        v[i] = one();
        v
    }

    fn integrate(&self, v: &[Rational]) -> Rational {
        v.iter().zip(&self.integral).fold(zero(), |acc, (a, b)| acc + a * b)
    }

    fn nonzero(v: &[Rational]) -> bool {
        v.iter().any(|c| !c.is_zero())
    }

    /// False when some fully determined constraint is violated.
    fn consistent(&self, skip: Option<&str>) -> bool {
        let on = |name: &str| skip != Some(name);
        let n = self.dim;
        let add = |acc: &mut Vec_, v: &[Rational], s: &Rational| {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b * s;
            }
        };
        for i in 0..n {
            for j in 0..n {
                let (ei, ej) = (self.e(i), self.e(j));
                // Leibniz
                let lhs = self.table[i][j].as_ref().map(|ij| self.apply(&self.q, ij));
                let r1 = self.mul(&self.apply(&self.q, &ei), &ej);
                let r2 = self.mul(&ei, &self.apply(&self.q, &ej));
                if let (true, Some(mut l), Some(r1), Some(r2)) = (on("leibniz"), lhs, r1, r2) {
                    add(&mut l, &r1, &-one());
                    add(&mut l, &r2, &-sign(self.odd(i)));
                    if Self::nonzero(&l) {
                        return false;
                    }
                }
                // Integral compatibilities and H₀ ⟂ H₄.
                let pair = |a: &[Rational], b: &[Rational]| self.mul(a, b).map(|p| self.integrate(&p));
                for (m, extra, name) in [(&self.q, true, "integral-Q"), (&self.g, false, "integral-Gminus")] {
                    if !on(name) {
                        continue;
                    }
                    let l = pair(&self.apply(m, &ei), &ej);
                    let r = pair(&ei, &self.apply(m, &ej));
                    if let (Some(l), Some(r)) = (l, r) {
                        if l != r * sign(self.odd(i) ^ extra) {
                            return false;
                        }
                    }
                }
            }
        }
        for &i in self.h0.iter().filter(|_| on("orthogonality")) {
            for b in &self.blocks {
                for &j in b {
                    if let Some(t) = &self.table[i][j] {
                        if !self.integrate(t).is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        // A basis vector whose row of products is known must pair with something.
        for i in 0..n {
            let mut all = true;
            let mut any = false;
            for j in 0..n {
                match &self.table[i][j] {
                    Some(t) => any |= !self.integrate(t).is_zero(),
                    None => all = false,
                }
            }
            if all && !any && on("nondegeneracy") {
                return false;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let Some(ij) = self.table[i][j].clone() else { continue };
                for k in 0..n {
                    let (ei, ej, ek) = (self.e(i), self.e(j), self.e(k));
                    // associativity
                    if let (true, Some(l), Some(jk)) = (on("associativity"), self.mul(&ij, &ek), self.table[j][k].as_ref()) {
                        if let Some(r) = self.mul(&ei, jk) {
                            if l != r {
                                return false;
                            }
                        }
                    }
                    // seven-term
                    if let (true, Some(v)) = (on("seven-term"), self.seven_term(&ij, &ei, &ej, &ek, i, j)) {
                        if Self::nonzero(&v) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn seven_term(&self, ab: &[Rational], a: &[Rational], b: &[Rational], c: &[Rational], i: usize, j: usize) -> Option<Vec_> {
        let (pa, pb) = (self.odd(i), self.odd(j));
        let g = |v: &[Rational]| self.apply(&self.g, v);
        let mut out = g(&self.mul(ab, c)?);
        let mut sub = |v: Vec_, s: Rational| {
            for (x, y) in out.iter_mut().zip(&v) {
                *x -= y * &s;
            }
        };
        sub(self.mul(&g(ab), c)?, one());
        sub(self.mul(b, &g(&self.mul(a, c)?))?, sign(pb && !pa));
        sub(self.mul(a, &g(&self.mul(b, c)?))?, sign(pa));
        sub(self.mul(&self.mul(&g(a), b)?, c)?, -one());
        sub(self.mul(&self.mul(a, &g(b))?, c)?, -sign(pa));
        sub(self.mul(ab, &g(c))?, -sign(pa ^ pb));
        Some(out)
    }

    fn to_spec(&self) -> AlgebraSpec {
        let mut mul = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let t = self.table[i][j].as_ref().expect("complete table");
                if Self::nonzero(t) {
                    mul.push(MulEntry { i, j, out: t.clone() });
                }
            }
        }
        let rows = |m: &Vec<Vec_>| m.iter().map(|r| RatRow(r.clone())).collect();
        AlgebraSpec {
            dim: self.dim,
            parities: self.par.iter().map(|p| p.bit()).collect(),
            unit: 0,
            mul,
            integral: self.integral.clone(),
            q: rows(&self.q),
            gminus: rows(&self.g),
            h0: self.h0.clone(),
            h4_blocks: self.blocks.clone(),
        }
    }
}

struct Searcher<'a> {
    space: &'a SearchSpace,
    vars: Vec<Var>,
    // Index into `vars` after which a whole product entry is assigned.
    checkpoints: Vec<bool>,
    nodes: u64,
    budget: u64,
    target: Option<&'static str>,
}

enum Step {
    Found(Algebra),
    Exhausted,
    OutOfBudget,
}

impl Searcher<'_> {
    fn run(&mut self, st: &mut State, pos: usize) -> Step {
        if pos == self.vars.len() {
            return match self.finish(st) {
                Some(a) => Step::Found(a),
                None => Step::Exhausted,
            };
        }
        let var = self.vars[pos];
        for val in self.space.values.clone() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::OutOfBudget;
            }
            match var {
                Var::Integral(k) => st.integral[k] = val,
                Var::Mul(i, j, k) => st.partial[i][j][k] = val,
            }
            if self.checkpoints[pos] {
                if let Var::Mul(i, j, _) = var {
                    let v = st.partial[i][j].clone();
                    let mirrored: Vec_ = v.iter().map(|c| c * sign(st.odd(i) && st.odd(j))).collect();
                    st.table[i][j] = Some(v);
                    st.table[j][i] = Some(mirrored);
                    let ok = st.consistent(self.target);
                    if ok {
                        match self.run(st, pos + 1) {
                            Step::Exhausted => {}
                            other => return other,
                        }
                    }
                    st.table[i][j] = None;
                    st.table[j][i] = None;
                    continue;
                }
            }
            match self.run(st, pos + 1) {
                Step::Exhausted => {}
                other => return other,
            }
        }
        match var {
            Var::Integral(k) => st.integral[k] = zero(),
            Var::Mul(i, j, k) => st.partial[i][j][k] = zero(),
        }
        Step::Exhausted
    }

    fn finish(&self, st: &State) -> Option<Algebra> {
        let alg = load_algebra(&st.to_spec()).ok()?;
        let failed = check_axioms(&alg).failed();
        if failed != self.target.into_iter().collect::<Vec<_>>() {
            return None;
        }
        if !st.blocks.is_empty() && alg.gminus_gplus().ok()?.is_zero() {
            return None;
        }
        Some(alg)
    }
}

/// Depth-first search; the first algebra passing every axiom check wins.
pub fn search_block_algebra(space: &SearchSpace, budget: u64) -> SearchOutcome {
    search(space, budget, None)
}

/// First algebra in the same search order that fails exactly `axiom`.
/// Used to build the negative fixtures.
pub fn search_violating(space: &SearchSpace, budget: u64, axiom: &'static str) -> SearchOutcome {
    search(space, budget, Some(axiom))
}

fn search(space: &SearchSpace, budget: u64, target: Option<&'static str>) -> SearchOutcome {
    let dim = space.dim();
    let par = space.parities();
    let blocks = space.blocks();
    let h0: Vec<usize> = (0..space.h0_parities.len()).collect();
    let mut q = vec![vec![zero(); dim]; dim];
    let mut g = vec![vec![zero(); dim]; dim];
    for b in &blocks {
        q[b[1]][b[0]] = one();
        q[b[3]][b[2]] = one();
        g[b[2]][b[0]] = one();
        g[b[3]][b[1]] = -one();
    }
    let mut table = vec![vec![None; dim]; dim];
    for i in 0..dim {
        let mut v = vec![zero(); dim];
        v[i] = one();
        table[0][i] = Some(v.clone());
        table[i][0] = Some(v);
    }
    let mut vars = Vec::new();
    let mut checkpoints = Vec::new();
    for &k in &h0 {
        if !par[k].is_odd() {
            vars.push(Var::Integral(k));
            checkpoints.push(false);
        }
    }
    for i in 1..dim {
        for j in i..dim {
            if i == j && par[i].is_odd() {
                table[i][i] = Some(vec![zero(); dim]);
                continue;
            }
            let p = par[i] + par[j];
            let comps: Vec<usize> = (0..dim).filter(|&k| par[k] == p).collect();
            for (n, &k) in comps.iter().enumerate() {
                vars.push(Var::Mul(i, j, k));
                checkpoints.push(n + 1 == comps.len());
            }
            if comps.is_empty() {
                table[i][j] = Some(vec![zero(); dim]);
                table[j][i] = Some(vec![zero(); dim]);
            }
        }
    }
    let mut st = State {
        dim,
        par,
        h0,
        blocks,
        q,
        g,
        table,
        partial: vec![vec![vec![zero(); dim]; dim]; dim],
        integral: vec![zero(); dim],
    };
    let mut s = Searcher { space, vars, checkpoints, nodes: 0, budget, target };
    match s.run(&mut st, 0) {
        Step::Found(algebra) => SearchOutcome::Found { algebra, nodes: s.nodes },
        Step::Exhausted => SearchOutcome::Exhausted { nodes: s.nodes },
        Step::OutOfBudget => SearchOutcome::BudgetExceeded { nodes: s.nodes },
    }
}
