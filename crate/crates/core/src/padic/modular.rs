//! Matrices over `Z/p^k`, row-major `u64` entries.

use super::scalar::{mod_inverse, pow_u64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModRing {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

impl ModRing {
    pub fn new(p: u64, k: u32) -> Self {
        ModRing {
            p,
            k,
            q: pow_u64(p, k),
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.q as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.q - b % self.q)
    }

    #[inline]
    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        mod_inverse(a, self.q)
    }

    pub fn reduce_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    pub fn mat_mul(&self, n: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for l in 0..n {
                let x = a[i * n + l];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let y = b[l * n + j];
                    if y != 0 {
                        out[i * n + j] = self.add(out[i * n + j], self.mul(x, y));
                    }
                }
            }
        }
        out
    }

    pub fn identity(&self, n: usize) -> Vec<u64> {
        let mut m = vec![0u64; n * n];
        for i in 0..n {
            m[i * n + i] = 1 % self.q;
        }
        m
    }

    /// Determinant modulo `p`.
    pub fn det_mod_p(&self, n: usize, a: &[u64]) -> u64 {
        let p = self.p;
        let mut m: Vec<u64> = a.iter().map(|x| x % p).collect();
        let f = ModRing::new(p, 1);
        let mut det = 1u64;
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| m[r * n + c] != 0) else {
                return 0;
            };
            if r != c {
                for j in 0..n {
                    m.swap(r * n + j, c * n + j);
                }
                det = f.sub(0, det);
            }
            let pv = m[c * n + c];
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("nonzero mod p");
            for r in c + 1..n {
                let t = f.mul(m[r * n + c], inv);
                if t == 0 {
                    continue;
                }
                for j in c..n {
                    m[r * n + j] = f.sub(m[r * n + j], f.mul(t, m[c * n + j]));
                }
            }
        }
        det
    }

    pub fn is_invertible(&self, n: usize, a: &[u64]) -> bool {
        self.det_mod_p(n, a) != 0
    }

    /// Inverse of an invertible matrix by Gauss-Jordan with unit pivots.
    pub fn mat_inv(&self, n: usize, a: &[u64]) -> Option<Vec<u64>> {
        let mut m = a.to_vec();
        let mut inv = self.identity(n);
        for c in 0..n {
            let r = (c..n).find(|&r| self.is_unit(m[r * n + c]))?;
            if r != c {
                for j in 0..n {
                    m.swap(r * n + j, c * n + j);
                    inv.swap(r * n + j, c * n + j);
                }
            }
            let pinv = self.inv(m[c * n + c])?;
            for j in 0..n {
                m[c * n + j] = self.mul(m[c * n + j], pinv);
                inv[c * n + j] = self.mul(inv[c * n + j], pinv);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let t = m[r * n + c];
                if t == 0 {
                    continue;
                }
                for j in 0..n {
                    m[r * n + j] = self.sub(m[r * n + j], self.mul(t, m[c * n + j]));
                    inv[r * n + j] = self.sub(inv[r * n + j], self.mul(t, inv[c * n + j]));
                }
            }
        }
        Some(inv)
    }

    /// Generators of `(Z/p^k)^x`.
    pub fn unit_generators(&self) -> Vec<u64> {
        if self.q <= 2 {
            return vec![1 % self.q.max(1)];
        }
        if self.p == 2 {
            let mut g = vec![self.q - 1];
            if self.k >= 3 {
                g.push(5);
            }
            return g;
        }
        vec![primitive_root_mod_p2(self.p) % self.q]
    }
}

/// A primitive root modulo `p` that stays primitive modulo `p^2`, hence modulo every `p^k`.
pub fn primitive_root_mod_p2(p: u64) -> u64 {
    assert!(p > 2);
    let phi = p - 1;
    let factors = prime_factors(phi);
    let r = ModRing::new(p, 1);
    let r2 = ModRing::new(p, 2);
    for g in 2..p {
        let prim = factors.iter().all(|&f| pow_mod(&r, g, phi / f) != 1);
        if prim && pow_mod(&r2, g, phi) != 1 {
            return g;
        }
    }
    unreachable!("a primitive root exists")
}

pub fn pow_mod(r: &ModRing, mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1 % r.q;
    b %= r.q;
    while e > 0 {
        if e & 1 == 1 {
            acc = r.mul(acc, b);
        }
        b = r.mul(b, b);
        e >>= 1;
    }
    acc
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root_mod_p2(3), 2);
        assert_eq!(primitive_root_mod_p2(5), 2);
        assert_eq!(primitive_root_mod_p2(7), 3);
    }

    #[test]
    fn inverse_mod_q() {
        let r = ModRing::new(3, 2);
        let a = vec![1, 3, 2, 4];
        let inv = r.mat_inv(2, &a).unwrap();
        assert_eq!(r.mat_mul(2, &a, &inv), r.identity(2));
        assert!(r.mat_inv(2, &[3, 0, 0, 1]).is_none());
    }
}
