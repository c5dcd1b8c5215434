//! ψ-class intersection numbers ⟨τ_{a₁}…τ_{aₙ}⟩_g.
//!
//! String and dilaton strip τ₀ and τ₁; otherwise the DVV recursion lowers the
//! largest index. Results are memoized on (genus, sorted powers).

use crate::rational::{frac, int, odd_double_factorial, one, zero, Rational};
use num_traits::Zero;
use parking_lot::RwLock;
use std::collections::HashMap;
use std::sync::OnceLock;

type Key = (u32, Vec<u32>);

#[derive(Default)]
pub struct IntersectionTable {
    memo: RwLock<HashMap<Key, Rational>>,
}

impl IntersectionTable {
    pub fn new() -> IntersectionTable {
        IntersectionTable::default()
    }

    pub fn len(&self) -> usize {
        self.memo.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot of stored entries, keyed "g:a1,a2,...".
    pub fn entries(&self) -> Vec<(u32, Vec<u32>, Rational)> {
        let mut out: Vec<_> = self.memo.read().iter().map(|((g, a), v)| (*g, a.clone(), v.clone())).collect();
        out.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
        out
    }

    pub fn get(&self, g: u32, powers: &[u32]) -> Rational {
        if !dimension_ok(g, powers) {
            return zero();
        }
        let mut key = powers.to_vec();
        key.sort_unstable();
        self.eval(g, key)
    }

    fn eval(&self, g: u32, a: Vec<u32>) -> Rational {
        if !dimension_ok(g, &a) {
            return zero();
        }
        let key = (g, a);
        if let Some(v) = self.memo.read().get(&key) {
            return v.clone();
        }
        let v = self.compute(key.0, &key.1);
        self.memo.write().insert(key, v.clone());
        v
    }

    // `a` is sorted ascending and passes the dimension gate.
    fn compute(&self, g: u32, a: &[u32]) -> Rational {
        if g == 0 && a == [0, 0, 0] {
            return one();
        }
        if g == 1 && a == [1] {
            return frac(1, 24);
        }
        if a[0] == 0 {
            let rest = &a[1..];
            let mut acc = zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut b = rest.to_vec();
                    b[j] -= 1;
                    b.sort_unstable();
                    acc += self.eval(g, b);
                }
            }
            return acc;
        }
        if let Some(pos) = a.iter().position(|&x| x == 1) {
            let mut rest = a.to_vec();
            rest.remove(pos);
            let m = rest.len() as i64;
            return int(2 * g as i64 - 2 + m) * self.eval(g, rest);
        }
        // Every index is at least 2: apply DVV to the largest one.
        let top = a[a.len() - 1];
        let d = &a[..a.len() - 1];
        self.dvv(g, top - 1, d)
    }

    fn dvv(&self, g: u32, k: u32, d: &[u32]) -> Rational {
        let k = k as i64;
        let mut acc = zero();
        for j in 0..d.len() {
            let dj = d[j] as i64;
            let c = Rational::new(odd_double_factorial(k + dj + 1), odd_double_factorial(dj));
            let mut b = d.to_vec();
            b[j] = (dj + k) as u32;
            b.sort_unstable();
            acc += c * self.eval(g, b);
        }
        let half = frac(1, 2);
        for r in 0..k {
            let s = k - 1 - r;
            let c = Rational::from_integer(odd_double_factorial(r + 1) * odd_double_factorial(s + 1)) * &half;
            if g >= 1 {
                let mut b = d.to_vec();
                b.push(r as u32);
                b.push(s as u32);
                b.sort_unstable();
                acc += &c * self.eval(g - 1, b);
            }
            let m = d.len();
            for mask in 0u32..(1 << m) {
                let mut left = vec![r as u32];
                let mut right = vec![s as u32];
                for (i, &x) in d.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        left.push(x);
                    } else {
                        right.push(x);
                    }
                }
                left.sort_unstable();
                right.sort_unstable();
                for g1 in 0..=g {
                    let l = self.eval(g1, left.clone());
                    if l.is_zero() {
                        continue;
                    }
                    acc += &c * l * self.eval(g - g1, right.clone());
                }
            }
        }
        acc / Rational::from_integer(odd_double_factorial(k + 2))
    }
}

/// Stability and Σaᵢ = 3g−3+n.
pub fn dimension_ok(g: u32, powers: &[u32]) -> bool {
    let n = powers.len() as i64;
    let g = g as i64;
    2 * g - 2 + n > 0 && powers.iter().map(|&x| x as i64).sum::<i64>() == 3 * g - 3 + n
}

pub fn global_table() -> &'static IntersectionTable {
    static TABLE: OnceLock<IntersectionTable> = OnceLock::new();
    TABLE.get_or_init(IntersectionTable::new)
}

pub fn psi_intersection(g: u32, powers: &[u32]) -> Rational {
    global_table().get(g, powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::factorial;

    #[test]
    fn base_values() {
        assert_eq!(psi_intersection(0, &[0, 0, 0]), int(1));
        assert_eq!(psi_intersection(1, &[1]), frac(1, 24));
        assert_eq!(psi_intersection(0, &[1, 0, 0, 0]), int(1));
        assert_eq!(psi_intersection(0, &[2, 0, 0]), int(0));
        assert_eq!(psi_intersection(2, &[4]), frac(1, 1152));
        assert_eq!(psi_intersection(0, &[0, 0]), int(0));
    }

    #[test]
    fn genus_zero_closed_form() {
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>) {
            if cur.len() == n {
                if left == 0 {
                    let want = Rational::new(
                        factorial(n as u32 - 3),
                        cur.iter().map(|&a| factorial(a)).product(),
                    );
                    assert_eq!(psi_intersection(0, cur), want, "{cur:?}");
                }
                return;
            }
            for a in 0..=left {
                cur.push(a);
                rec(n, left - a, cur);
                cur.pop();
            }
        }
        for n in 3..=8 {
            rec(n, n as u32 - 3, &mut Vec::new());
        }
    }

    #[test]
    fn table_satisfies_string_and_dilaton() {
        let t = IntersectionTable::new();
        t.get(2, &[2, 2, 2, 1]);
        t.get(3, &[3, 3, 3]);
        for (g, a, v) in t.entries() {
            let stable = |m: usize| 2 * g as i64 - 2 + m as i64 > 0;
            if let Some(pos) = a.iter().position(|&x| x == 0) {
                let mut rest = a.clone();
                rest.remove(pos);
                if stable(rest.len()) {
                    let mut want = zero();
                    for j in 0..rest.len() {
                        if rest[j] > 0 {
                            let mut b = rest.clone();
                            b[j] -= 1;
                            want += t.get(g, &b);
                        }
                    }
                    assert_eq!(v, want, "string at {g} {a:?}");
                }
            }
            if let Some(pos) = a.iter().position(|&x| x == 1) {
                let mut rest = a.clone();
                rest.remove(pos);
                if stable(rest.len()) {
                    let want = int(2 * g as i64 - 2 + rest.len() as i64) * t.get(g, &rest);
                    assert_eq!(v, want, "dilaton at {g} {a:?}");
                }
            }
        }
        assert!(t.len() > 10);
    }

    #[test]
    fn order_does_not_matter() {
        assert_eq!(psi_intersection(1, &[2, 0, 1]), psi_intersection(1, &[0, 1, 2]));
        assert_eq!(psi_intersection(2, &[3, 2]), psi_intersection(2, &[2, 3]));
    }
}
