//! Exact coefficient fields of characteristic zero.

mod cyclotomic;
mod rational;

pub use cyclotomic::Cyclotomic;
pub use rational::Rational;

use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    /// `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// `exp(2 pi i k / order)`, if the field contains it.
    fn root_of_unity(order: u64, k: u64) -> Option<Self>;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        let t = std::mem::replace(self, Self::zero());
        *self = t + a.mul_ref(b);
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        let t = std::mem::replace(self, Self::zero());
        *self = t - a.mul_ref(b);
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents invert.
    fn powi(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|x| x.pow(e.unsigned_abs()))
        }
    }
}

/// Reduces `k / order` and returns `(k', order')` with `gcd = 1`.
pub(crate) fn reduce_root(order: u64, k: u64) -> (u64, u64) {
    assert!(order > 0, "root of unity of order 0");
    let k = k % order;
    let g = num_integer::gcd(k, order).max(1);
    if k == 0 {
        (0, 1)
    } else {
        (k / g, order / g)
    }
}
