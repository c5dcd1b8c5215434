// Brute-force ψ-intersections: the DVV recursion applied to the first index
// only, with no string/dilaton shortcuts and no memo. τ₀ and τ₁ in front are
// the k = −1 and k = 0 cases of the same formula.

use hft::rational::{frac, int, one, zero};
use hft::Rational;

fn dfact(n: i64) -> i64 {
    // (2m−1)!! for n = 2m−1 ≥ −1; fits i64 for the ranges tested.
    let mut acc = 1;
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

pub fn dvv_oracle(g: i64, a: &[i64]) -> Rational {
    let n = a.len() as i64;
    if g < 0 || a.iter().any(|&x| x < 0) || 2 * g - 2 + n <= 0 || a.iter().sum::<i64>() != 3 * g - 3 + n {
        return zero();
    }
    if g == 0 && a == [0, 0, 0] {
        return one();
    }
    if g == 1 && a == [1] {
        return frac(1, 24);
    }
    let k = a[0] - 1;
    let d = &a[1..];
    let mut acc = zero();
    for j in 0..d.len() {
        if d[j] + k < 0 {
            continue;
        }
        let mut b = d.to_vec();
        b[j] = d[j] + k;
        acc += frac(dfact(2 * k + 2 * d[j] + 1), dfact(2 * d[j] - 1)) * dvv_oracle(g, &b);
    }
    for r in 0..k {
        let s = k - 1 - r;
        let c = frac(dfact(2 * r + 1) * dfact(2 * s + 1), 2);
        let mut b = vec![r, s];
        b.extend_from_slice(d);
        acc += &c * dvv_oracle(g - 1, &b);
        for mask in 0u32..(1 << d.len()) {
            let mut left = vec![r];
            let mut right = vec![s];
            for (i, &x) in d.iter().enumerate() {
                if mask >> i & 1 == 1 { left.push(x) } else { right.push(x) }
            }
            for g1 in 0..=g {
                let l = dvv_oracle(g1, &left);
                if l != zero() {
                    acc += &c * l * dvv_oracle(g - g1, &right);
                }
            }
        }
    }
    acc / int(dfact(2 * k + 3))
}

/// Every (g, sorted powers) with g ≤ max_g, 1 ≤ n ≤ max_n, Σa ≤ max_sum.
pub fn oracle_cases(max_g: i64, max_n: usize, max_sum: i64) -> Vec<(i64, Vec<i64>)> {
    let mut out = vec![];
    fn rec(n: usize, start: i64, left: i64, cur: &mut Vec<i64>, acc: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            acc.push(cur.clone());
            return;
        }
        for x in start..=left {
            cur.push(x);
            rec(n, x, left - x, cur, acc);
            cur.pop();
        }
    }
    for g in 0..=max_g {
        for n in 1..=max_n {
            let mut lists = vec![];
            rec(n, 0, max_sum, &mut vec![], &mut lists);
            out.extend(lists.into_iter().map(|l| (g, l)));
        }
    }
    out
}
