use super::{reduce_root, Field, Rational};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::rc::Rc;

/// `Q(zeta_N)` as polynomial classes modulo the `N`-th cyclotomic polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic<const N: usize> {
    coeffs: Vec<Rational>,
}

thread_local! {
    static PHI: RefCell<HashMap<usize, Rc<Vec<i64>>>> = RefCell::new(HashMap::new());
}

/// Coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: usize) -> Rc<Vec<i64>> {
    if let Some(p) = PHI.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    // x^n - 1 divided by Phi_d for proper divisors d.
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &den);
        }
    }
    let rc = Rc::new(num);
    PHI.with(|c| c.borrow_mut().insert(n, rc.clone()));
    rc
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        q[k] = c;
        if c != 0 {
            for (i, &di) in den.iter().enumerate() {
                rem[k + i] -= c * di;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

impl<const N: usize> Cyclotomic<N> {
    pub fn degree() -> usize {
        cyclotomic_polynomial(N).len() - 1
    }

    pub fn from_coeffs(poly: Vec<Rational>) -> Self {
        Self::reduce(poly)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `zeta_N^j`.
    pub fn zeta_pow(j: u64) -> Self {
        let j = (j % N as u64) as usize;
        let mut poly = vec![Rational::zero(); j + 1];
        poly[j] = Rational::one();
        Self::reduce(poly)
    }

    fn reduce(mut poly: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(N);
        let d = phi.len() - 1;
        if poly.len() > d {
            for k in (d..poly.len()).rev() {
                let c = std::mem::replace(&mut poly[k], Rational::zero());
                if c.is_zero() {
                    continue;
                }
                for (i, &pi) in phi.iter().enumerate().take(d) {
                    if pi != 0 {
                        let t = c.mul_ref(&Rational::integer(pi));
                        poly[k - d + i] =
                            std::mem::replace(&mut poly[k - d + i], Rational::zero()) - t;
                    }
                }
            }
        }
        poly.resize(d, Rational::zero());
        Cyclotomic { coeffs: poly }
    }

    fn poly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j].add_mul(x, y);
            }
        }
        out
    }

    fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let len = a.len().max(b.len());
        (0..len)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
                let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
                x - y
            })
            .collect()
    }

    fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let b = Self::poly_trim(b.to_vec());
        let mut r = Self::poly_trim(a.to_vec());
        let db = b.len() - 1;
        let lead_inv = b[db].inv().expect("zero divisor polynomial");
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::zero(); r.len() - db];
        while r.len() >= b.len() {
            let k = r.len() - 1 - db;
            let c = r[r.len() - 1].mul_ref(&lead_inv);
            for (i, bi) in b.iter().enumerate() {
                r[k + i].sub_mul(&c, bi);
            }
            q[k] = c;
            r = Self::poly_trim(r);
        }
        (q, r)
    }
}

impl<const N: usize> fmt::Display for Cyclotomic<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*z{N}"),
                _ => format!("({c})*z{N}^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<const N: usize> Serialize for Cyclotomic<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<const N: usize> Add for Cyclotomic<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let coeffs = self
            .coeffs
            .into_iter()
            .zip(rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyclotomic { coeffs }
    }
}

impl<const N: usize> Sub for Cyclotomic<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Cyclotomic<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<const N: usize> Mul for Cyclotomic<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<const N: usize> Div for Cyclotomic<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero")
    }
}

impl<const N: usize> Zero for Cyclotomic<N> {
    fn zero() -> Self {
        Cyclotomic {
            coeffs: vec![Rational::zero(); Self::degree()],
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl<const N: usize> One for Cyclotomic<N> {
    fn one() -> Self {
        Self::from_rational(&Rational::one())
    }
}

impl<const N: usize> Field for Cyclotomic<N> {
    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::integer(v))
    }

    fn from_rational(q: &Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); Self::degree()];
        coeffs[0] = q.clone();
        Cyclotomic { coeffs }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // Extended Euclid: s*a + t*phi = g with g constant.
        let phi: Vec<Rational> = cyclotomic_polynomial(N)
            .iter()
            .map(|&c| Rational::integer(c))
            .collect();
        let mut r0 = phi;
        let mut r1 = Self::poly_trim(self.coeffs.clone());
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while r1.len() > 1 {
            let (q, r) = Self::poly_divrem(&r0, &r1);
            let s2 = Self::poly_sub(&s0, &Self::poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, Self::poly_trim(s2));
        }
        let g = r1[0].inv()?;
        let s: Vec<Rational> = s1.into_iter().map(|c| c.mul_ref(&g)).collect();
        Some(Self::reduce(s))
    }

    fn root_of_unity(order: u64, k: u64) -> Option<Self> {
        let (k, order) = reduce_root(order, k);
        let n = N as u64;
        // For odd N the field also contains zeta_2N = -zeta_N^((N+1)/2).
        let m = if n % 2 == 1 { 2 * n } else { n };
        if m % order != 0 {
            return None;
        }
        let j = k * (m / order);
        if n % 2 == 1 {
            let z = Self::zeta_pow((j * n.div_ceil(2)) % n);
            Some(if j % 2 == 1 { -z } else { z })
        } else {
            Some(Self::zeta_pow(j))
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        Self::reduce(Self::poly_mul(&self.coeffs, &rhs.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_small_cases() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_has_exact_order() {
        type K = Cyclotomic<6>;
        let z = K::zeta_pow(1);
        assert_ne!(z.pow(3), K::one());
        assert_eq!(z.pow(6), K::one());
        assert_eq!(z.pow(3), -K::one());
    }

    #[test]
    fn inverse_roundtrip() {
        type K = Cyclotomic<5>;
        let a = K::from_coeffs(vec![
            Rational::integer(2),
            Rational::new(-1, 3),
            Rational::integer(0),
            Rational::integer(5),
        ]);
        let b = a.inv().unwrap();
        assert_eq!(a * b, K::one());
    }

    #[test]
    fn odd_conductor_gets_sign_roots() {
        type K = Cyclotomic<3>;
        let w = K::root_of_unity(6, 1).unwrap();
        assert_eq!(w.pow(6), K::one());
        assert_ne!(w.pow(3), K::one());
        assert_ne!(w.pow(2), K::one());
    }
}
