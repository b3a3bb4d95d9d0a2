//! Left cosets `B(Z/p^k) \ GL_n(Z/p^k)`, which index `B \ G / K(k)`.

use crate::error::{Error, Result};
use crate::guard;
use crate::padic::modular::ModRing;
use serde::Serialize;

/// Canonical representative of `B x`: row `i` has a 1 at its pivot `pivots[i]`, zeros at the
/// pivots of lower rows, non-units left of the pivot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FlagCoset {
    pub pivots: Vec<usize>,
    pub entries: Vec<u64>,
}

/// `x = b * canon` with `b` upper triangular; only the diagonal of `b` is returned.
#[derive(Clone, Debug)]
pub struct FlagReduction {
    pub coset: FlagCoset,
    pub b_diag: Vec<u64>,
}

pub fn reduce_flag(r: &ModRing, n: usize, x: &[u64]) -> Result<FlagReduction> {
    let mut m = x.to_vec();
    let mut pivots = vec![usize::MAX; n];
    let mut scales = vec![1u64; n];
    for i in (0..n).rev() {
        for l in (i + 1..n).rev() {
            let c = pivots[l];
            let a = m[i * n + c];
            if a != 0 {
                for j in 0..n {
                    m[i * n + j] = r.sub(m[i * n + j], r.mul(a, m[l * n + j]));
                }
            }
        }
        let lower: Vec<usize> = pivots[i + 1..].to_vec();
        let c = (0..n)
            .find(|j| !lower.contains(j) && r.is_unit(m[i * n + j]))
            .ok_or(Error::SingularMatrix)?;
        let s = m[i * n + c];
        let sinv = r.inv(s).expect("unit");
        for j in 0..n {
            m[i * n + j] = r.mul(m[i * n + j], sinv);
        }
        pivots[i] = c;
        scales[i] = s;
    }
    Ok(FlagReduction {
        coset: FlagCoset { pivots, entries: m },
        b_diag: scales,
    })
}

/// `p^((k-1) n(n-1)/2) * prod_{i=1..n} (p^i - 1)/(p - 1)`, saturating at `u128::MAX`.
pub fn flag_count_formula(n: usize, p: u64, k: u32) -> u128 {
    let p = p as u128;
    let exp = (k.max(1) - 1).saturating_mul((n * (n - 1) / 2) as u32);
    let mut c = p.checked_pow(exp).unwrap_or(u128::MAX);
    for i in 1..=n as u32 {
        let f = p
            .checked_pow(i)
            .map(|q| (q - 1) / (p - 1))
            .unwrap_or(u128::MAX);
        c = c.saturating_mul(f);
    }
    c
}

/// Every canonical form, generated pivot permutation by pivot permutation.
pub fn flag_cosets(n: usize, p: u64, k: u32) -> Result<Vec<FlagCoset>> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    if k == 0 {
        return Err(Error::Domain("flag cosets need level k >= 1".into()));
    }
    guard::check(flag_count_formula(n, p, k))?;
    let r = ModRing::new(p, k);
    let mut out = Vec::new();
    let mut pivots = vec![usize::MAX; n];
    let mut m = vec![0u64; n * n];
    gen_row(&r, n, n, &mut pivots, &mut m, &mut out);
    out.sort();
    Ok(out)
}

fn gen_row(
    r: &ModRing,
    n: usize,
    rows_left: usize,
    pivots: &mut Vec<usize>,
    m: &mut Vec<u64>,
    out: &mut Vec<FlagCoset>,
) {
    if rows_left == 0 {
        out.push(FlagCoset {
            pivots: pivots.clone(),
            entries: m.clone(),
        });
        return;
    }
    let i = rows_left - 1;
    let lower: Vec<usize> = pivots[i + 1..].to_vec();
    for c in (0..n).filter(|c| !lower.contains(c)) {
        pivots[i] = c;
        let free: Vec<usize> = (0..n).filter(|j| *j != c && !lower.contains(j)).collect();
        let ranges: Vec<Vec<u64>> = free
            .iter()
            .map(|&j| {
                if j < c {
                    (0..r.q / r.p).map(|a| a * r.p).collect()
                } else {
                    (0..r.q).collect()
                }
            })
            .collect();
        for j in 0..n {
            m[i * n + j] = 0;
        }
        m[i * n + c] = 1;
        let mut idx = vec![0usize; free.len()];
        loop {
            for (t, &j) in free.iter().enumerate() {
                m[i * n + j] = ranges[t][idx[t]];
            }
            gen_row(r, n, i, pivots, m, out);
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < ranges[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    pivots[i] = usize::MAX;
}

/// `|B \ G / K_e|` with `K_e = U_o^(e) = K(e + 1)`.
pub fn double_coset_count(n: usize, p: u64, e: u32) -> Result<u128> {
    Ok(flag_cosets(n, p, e + 1)?.len() as u128)
}

/// Brute-force orbit count of `B(Z/p^k)` on `GL_n(Z/p^k)` over the full matrix space,
/// with its own enumeration bound.
pub fn brute_force_orbit_count(n: usize, p: u64, k: u32, bound: u128) -> Result<u128> {
    let r = ModRing::new(p, k);
    let q = r.q as u128;
    let total = q.pow((n * n) as u32);
    guard::check_against(total, bound)?;
    let total = total as usize;
    let mut seen = vec![0u64; total.div_ceil(64)];
    let decode = |mut code: usize, out: &mut [u64]| {
        for e in out.iter_mut() {
            *e = (code % r.q as usize) as u64;
            code /= r.q as usize;
        }
    };
    let encode = |m: &[u64]| {
        m.iter()
            .rev()
            .fold(0usize, |acc, &e| acc * r.q as usize + e as usize)
    };
    let units = r.unit_generators();
    let mut count: u128 = 0;
    let mut m = vec![0u64; n * n];
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..total {
        if seen[start / 64] >> (start % 64) & 1 == 1 {
            continue;
        }
        decode(start, &mut m);
        if !r.is_invertible(n, &m) {
            continue;
        }
        count += 1;
        seen[start / 64] |= 1 << (start % 64);
        stack.push(start);
        while let Some(code) = stack.pop() {
            decode(code, &mut m);
            let mut visit = |x: &[u64], stack: &mut Vec<usize>| {
                let c = encode(x);
                if seen[c / 64] >> (c % 64) & 1 == 0 {
                    seen[c / 64] |= 1 << (c % 64);
                    stack.push(c);
                }
            };
            for i in 0..n {
                for &u in &units {
                    let mut y = m.clone();
                    for j in 0..n {
                        y[i * n + j] = r.mul(y[i * n + j], u);
                    }
                    visit(&y, &mut stack);
                }
                for l in i + 1..n {
                    let mut y = m.clone();
                    for j in 0..n {
                        y[i * n + j] = r.add(y[i * n + j], y[l * n + j]);
                    }
                    visit(&y, &mut stack);
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_formula_and_brute_force() {
        for (n, p, k, want) in [
            (2, 2, 1, 3),
            (2, 2, 2, 6),
            (2, 2, 3, 12),
            (2, 3, 1, 4),
            (2, 3, 2, 12),
            (3, 2, 1, 21),
        ] {
            assert_eq!(flag_cosets(n, p, k).unwrap().len() as u128, want);
            assert_eq!(flag_count_formula(n, p, k), want);
            assert_eq!(brute_force_orbit_count(n, p, k, 1 << 24).unwrap(), want);
        }
    }

    #[test]
    fn reduction_is_idempotent_and_consistent() {
        let (n, p, k) = (3, 2, 2);
        let r = ModRing::new(p, k);
        for c in flag_cosets(n, p, k).unwrap() {
            let red = reduce_flag(&r, n, &c.entries).unwrap();
            assert_eq!(red.coset, c);
            assert!(red.b_diag.iter().all(|&s| s == 1));
        }
        let x = vec![3, 1, 2, 2, 1, 1, 1, 2, 0];
        let red = reduce_flag(&r, n, &x).unwrap();
        let b = vec![3u64, 1, 0, 0, 1, 0, 0, 0, 1];
        let red2 = reduce_flag(&r, n, &r.mat_mul(n, &b, &x)).unwrap();
        assert_eq!(red.coset, red2.coset);
    }
}
