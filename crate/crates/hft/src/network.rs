//! Signed contraction of multilinear forms against vectors and even bivectors.
//!
//! Slots are numbered globally, node by node. Inputs are taken in a fixed
//! order; each placed basis component is moved into slot order, picking up
//! the Koszul sign of every odd component it passes.

use crate::rational::{zero, Rational};
use num_traits::Zero;

#[derive(Clone, Debug)]
pub(crate) enum Input {
    Vector { slot: usize, comps: Vec<(usize, Rational)> },
    Pair { s: usize, t: usize, comps: Vec<(usize, usize, Rational)> },
}

pub(crate) struct Network<'a> {
    pub odd: &'a [bool],
    /// Slot count of each node; node k owns slots `offset[k]..offset[k]+arity[k]`.
    pub arity: Vec<usize>,
    pub inputs: Vec<Input>,
}

struct Walk<'a, F> {
    net: &'a Network<'a>,
    form: F,
    node_of: Vec<usize>,
    offset: Vec<usize>,
    assigned: Vec<usize>,
    filled: Vec<bool>,
    remaining: Vec<usize>,
    total: Rational,
}

impl<F: FnMut(usize, &[usize]) -> Rational> Walk<'_, F> {
    fn place(&mut self, slot: usize, idx: usize) -> bool {
        self.assigned[slot] = idx;
        let mut flip = false;
        if self.net.odd[idx] {
            for s in slot + 1..self.filled.len() {
                if self.filled[s] && self.net.odd[self.assigned[s]] {
                    flip = !flip;
                }
            }
        }
        self.filled[slot] = true;
        flip
    }

    fn unplace(&mut self, slot: usize) {
        self.filled[slot] = false;
    }

    /// Evaluates a node if `slot` completed it; `None` when the value is zero.
    fn settle(&mut self, slot: usize, acc: &Rational) -> Option<Rational> {
        let node = self.node_of[slot];
        self.remaining[node] -= 1;
        if self.remaining[node] > 0 {
            return Some(acc.clone());
        }
        let lo = self.offset[node];
        let hi = lo + self.net.arity[node];
        let v = (self.form)(node, &self.assigned[lo..hi]);
        if v.is_zero() {
            None
        } else {
            Some(acc * v)
        }
    }

    fn unsettle(&mut self, slot: usize) {
        self.remaining[self.node_of[slot]] += 1;
    }

    fn run(&mut self, k: usize, acc: Rational) {
        if k == self.net.inputs.len() {
            self.total += acc;
            return;
        }
        match &self.net.inputs[k] {
            Input::Vector { slot, comps } => {
                let slot = *slot;
                for (i, c) in comps.clone() {
                    let flip = self.place(slot, i);
                    let signed = if flip { -(&acc * &c) } else { &acc * &c };
                    if let Some(next) = self.settle(slot, &signed) {
                        self.run(k + 1, next);
                    }
                    self.unsettle(slot);
                    self.unplace(slot);
                }
            }
            Input::Pair { s, t, comps } => {
                let (s, t) = (*s, *t);
                for (j, l, c) in comps.clone() {
                    let f1 = self.place(s, j);
                    let a1 = if f1 { -(&acc * &c) } else { &acc * &c };
                    if let Some(a2) = self.settle(s, &a1) {
                        let f2 = self.place(t, l);
                        let a3 = if f2 { -a2 } else { a2 };
                        if let Some(a4) = self.settle(t, &a3) {
                            self.run(k + 1, a4);
                        }
                        self.unsettle(t);
                        self.unplace(t);
                    }
                    self.unsettle(s);
                    self.unplace(s);
                }
            }
        }
    }
}

impl Network<'_> {
    pub fn slot_count(&self) -> usize {
        self.arity.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.arity.len());
        let mut acc = 0;
        for a in &self.arity {
            off.push(acc);
            acc += a;
        }
        off
    }

    /// `form(node, basis indices of its slots)` gives the node's value.
    pub fn evaluate<F: FnMut(usize, &[usize]) -> Rational>(&self, form: F) -> Rational {
        let n = self.slot_count();
        let offset = self.offsets();
        let mut node_of = vec![0; n];
        for (k, (&o, &a)) in offset.iter().zip(&self.arity).enumerate() {
            for s in o..o + a {
                node_of[s] = k;
            }
        }
        let mut walk = Walk {
            net: self,
            form,
            node_of,
            offset,
            assigned: vec![0; n],
            filled: vec![false; n],
            remaining: self.arity.clone(),
            total: zero(),
        };
        // Nodes without slots are constants.
        let mut acc = crate::rational::one();
        for k in 0..self.arity.len() {
            if self.arity[k] == 0 {
                acc *= (walk.form)(k, &[]);
            }
        }
        if !acc.is_zero() {
            walk.run(0, acc);
        }
        walk.total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, one};

    #[test]
    fn odd_vectors_anticommute_into_slots() {
        // One node with two slots, form = 1 on (0, 1); inputs placed in reverse slot order.
        let odd = [true, true];
        let net = Network {
            odd: &odd,
            arity: vec![2],
            inputs: vec![
                Input::Vector { slot: 1, comps: vec![(1, one())] },
                Input::Vector { slot: 0, comps: vec![(0, one())] },
            ],
        };
        let v = net.evaluate(|_, idx| if idx == [0, 1] { one() } else { zero() });
        assert_eq!(v, int(-1));
    }

    #[test]
    fn pair_across_an_odd_slot() {
        // Node 0 slots: [a, p]; node 1 slot: [q]; pair (p, q), a odd placed first.
        let odd = [true, true];
        let net = Network {
            odd: &odd,
            arity: vec![2, 1],
            inputs: vec![
                Input::Vector { slot: 0, comps: vec![(0, one())] },
                Input::Pair { s: 1, t: 2, comps: vec![(1, 1, one())] },
            ],
        };
        assert_eq!(net.evaluate(|_, _| one()), int(1));
    }
}
