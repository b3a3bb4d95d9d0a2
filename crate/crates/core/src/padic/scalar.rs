use crate::error::{precision, Error, Result};
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

/// Three-valued answer of a threshold comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn certify(self, what: impl FnOnce() -> String) -> Result<bool> {
        match self {
            Tri::True => Ok(true),
            Tri::False => Ok(false),
            Tri::Unknown => Err(precision(what())),
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    /// Exact zero.
    Zero,
    /// Some element of `p^abs Z_p`.
    Small { abs: i64 },
    /// `p^val * unit` with the unit known modulo `p^prec`.
    Unit { val: i64, unit: u64, prec: u32 },
}

/// Element of `Q_p` in floating form: valuation plus a unit known to `prec` digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u64,
    kind: Kind,
}

/// Largest `k` with `p^k < 2^63`.
pub fn max_digits(p: u64) -> u32 {
    let mut k = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 63) {
        acc *= p as u128;
        k += 1;
    }
    k
}

pub(crate) fn pow_u64(p: u64, k: u32) -> u64 {
    p.checked_pow(k).expect("p^k overflows u64")
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl Padic {
    fn check_p(p: u64) {
        assert!(p >= 2, "p must be a prime >= 2");
    }

    pub fn zero(p: u64) -> Self {
        Self::check_p(p);
        Padic {
            p,
            kind: Kind::Zero,
        }
    }

    /// An unknown element of `p^abs Z_p`.
    pub fn small(p: u64, abs: i64) -> Self {
        Self::check_p(p);
        Padic {
            p,
            kind: Kind::Small { abs },
        }
    }

    /// `p^val * unit`, the unit taken modulo `p^prec`.
    pub fn from_parts(p: u64, val: i64, unit: i64, prec: u32) -> Result<Self> {
        Self::check_p(p);
        if prec == 0 || prec > max_digits(p) {
            return Err(precision(format!(
                "relative precision {prec} outside 1..={} for p={p}",
                max_digits(p)
            )));
        }
        let q = pow_u64(p, prec);
        let u = unit.rem_euclid(q as i64) as u64;
        if u % p == 0 {
            return Err(Error::Domain(format!("{unit} is not a {p}-adic unit")));
        }
        Ok(Padic {
            p,
            kind: Kind::Unit { val, unit: u, prec },
        })
    }

    /// Integer `x` with `prec` digits of relative precision; 0 maps to the exact zero.
    pub fn from_int(x: i64, p: u64, prec: u32) -> Self {
        Self::check_p(p);
        if x == 0 {
            return Self::zero(p);
        }
        let mut v = 0;
        let mut u = x;
        while u % p as i64 == 0 {
            u /= p as i64;
            v += 1;
        }
        Self::from_parts(p, v, u, prec).expect("valid precision")
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_int(1, p, prec)
    }

    /// `p^v`.
    pub fn p_power(p: u64, v: i64, prec: u32) -> Self {
        Self::from_parts(p, v, 1, prec).expect("valid precision")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    pub fn is_unit_kind(&self) -> bool {
        matches!(self.kind, Kind::Unit { .. })
    }

    /// Exact valuation; errors when the element is indistinguishable from zero.
    pub fn val(&self) -> Result<Valuation> {
        match self.kind {
            Kind::Zero => Ok(Valuation::Infinite),
            Kind::Unit { val, .. } => Ok(Valuation::Finite(val)),
            Kind::Small { abs } => Err(precision(format!("element is 0 mod {}^{abs}", self.p))),
        }
    }

    /// Lower bound on the valuation that is always known.
    pub fn val_lower_bound(&self) -> Valuation {
        match self.kind {
            Kind::Zero => Valuation::Infinite,
            Kind::Unit { val, .. } => Valuation::Finite(val),
            Kind::Small { abs } => Valuation::Finite(abs),
        }
    }

    /// Absolute precision: the element is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> Valuation {
        match self.kind {
            Kind::Zero => Valuation::Infinite,
            Kind::Small { abs } => Valuation::Finite(abs),
            Kind::Unit { val, prec, .. } => Valuation::Finite(val + prec as i64),
        }
    }

    pub fn rel_prec(&self) -> Option<u32> {
        match self.kind {
            Kind::Unit { prec, .. } => Some(prec),
            _ => None,
        }
    }

    pub fn unit_part(&self) -> Option<u64> {
        match self.kind {
            Kind::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// `v(self) >= t`, three-valued.
    pub fn val_at_least(&self, t: i64) -> Tri {
        match self.kind {
            Kind::Zero => Tri::True,
            Kind::Unit { val, .. } => {
                if val >= t {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            Kind::Small { abs } => {
                if abs >= t {
                    Tri::True
                } else {
                    Tri::Unknown
                }
            }
        }
    }

    /// Residue modulo `p^k` of an integral element.
    pub fn residue(&self, k: u32) -> Result<u64> {
        let q = pow_u64(self.p, k);
        match self.kind {
            Kind::Zero => Ok(0),
            Kind::Small { abs } => {
                if abs >= k as i64 {
                    Ok(0)
                } else {
                    Err(precision(format!(
                        "residue mod {}^{k} needs absolute precision {k}, have {abs}",
                        self.p
                    )))
                }
            }
            Kind::Unit { val, unit, prec } => {
                if val < 0 {
                    return Err(Error::Domain("residue of a non-integral element".into()));
                }
                if val >= k as i64 {
                    return Ok(0);
                }
                if val + prec as i64 >= k as i64 {
                    Ok(mulmod(pow_u64(self.p, val as u32), unit % q, q))
                } else {
                    Err(precision(format!(
                        "residue mod {}^{k} needs absolute precision {k}, have {}",
                        self.p,
                        val + prec as i64
                    )))
                }
            }
        }
    }

    /// Lowers the relative precision to at most `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        match self.kind {
            Kind::Unit {
                val,
                unit,
                prec: old,
            } if prec < old => {
                if prec == 0 {
                    return Padic::small(self.p, val);
                }
                Padic {
                    p: self.p,
                    kind: Kind::Unit {
                        val,
                        unit: unit % pow_u64(self.p, prec),
                        prec,
                    },
                }
            }
            _ => *self,
        }
    }

    /// Caps the absolute precision at `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match self.kind {
            Kind::Unit { val, .. } => {
                if val >= abs {
                    Padic::small(self.p, abs)
                } else {
                    self.truncate((abs - val) as u32)
                }
            }
            Kind::Small { abs: a } if a > abs => Padic::small(self.p, abs),
            _ => *self,
        }
    }

    pub fn neg(&self) -> Self {
        match self.kind {
            Kind::Unit { val, unit, prec } => {
                let q = pow_u64(self.p, prec);
                Padic {
                    p: self.p,
                    kind: Kind::Unit {
                        val,
                        unit: (q - unit) % q,
                        prec,
                    },
                }
            }
            _ => *self,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match (self.kind, other.kind) {
            (Kind::Zero, _) => *other,
            (_, Kind::Zero) => *self,
            (Kind::Small { abs: a }, Kind::Small { abs: b }) => Padic::small(p, a.min(b)),
            (Kind::Small { abs }, Kind::Unit { .. }) => other.truncate_abs(abs),
            (Kind::Unit { .. }, Kind::Small { abs }) => self.truncate_abs(abs),
            (
                Kind::Unit {
                    val: va,
                    unit: ua,
                    prec: pa,
                },
                Kind::Unit {
                    val: vb,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let v = va.min(vb);
                let abs = (va + pa as i64).min(vb + pb as i64);
                let r = (abs - v) as u32;
                let q = pow_u64(p, r);
                let term = |val: i64, unit: u64| -> u64 {
                    let shift = val - v;
                    if shift >= r as i64 {
                        0
                    } else {
                        mulmod(unit % q, pow_u64(p, shift as u32), q)
                    }
                };
                let c = (term(va, ua) as u128 + term(vb, ub) as u128) % q as u128;
                let mut c = c as u64;
                if c == 0 {
                    return Padic::small(p, abs);
                }
                let mut w = 0u32;
                while c % p == 0 {
                    c /= p;
                    w += 1;
                }
                let prec = r - w;
                Padic {
                    p,
                    kind: Kind::Unit {
                        val: v + w as i64,
                        unit: c % pow_u64(p, prec),
                        prec,
                    },
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match (self.kind, other.kind) {
            (Kind::Zero, _) | (_, Kind::Zero) => Padic::zero(p),
            (Kind::Small { abs: a }, Kind::Small { abs: b }) => Padic::small(p, a + b),
            (Kind::Small { abs }, Kind::Unit { val, .. })
            | (Kind::Unit { val, .. }, Kind::Small { abs }) => Padic::small(p, abs + val),
            (
                Kind::Unit {
                    val: va,
                    unit: ua,
                    prec: pa,
                },
                Kind::Unit {
                    val: vb,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let prec = pa.min(pb);
                let q = pow_u64(p, prec);
                Padic {
                    p,
                    kind: Kind::Unit {
                        val: va + vb,
                        unit: mulmod(ua % q, ub % q, q),
                        prec,
                    },
                }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.kind {
            Kind::Zero => Err(Error::SingularMatrix),
            Kind::Small { abs } => Err(precision(format!(
                "cannot invert an element that is 0 mod {}^{abs}",
                self.p
            ))),
            Kind::Unit { val, unit, prec } => {
                let q = pow_u64(self.p, prec);
                Ok(Padic {
                    p: self.p,
                    kind: Kind::Unit {
                        val: -val,
                        unit: mod_inverse(unit, q).expect("unit is invertible"),
                        prec,
                    },
                })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match self.kind {
            Kind::Zero => *self,
            Kind::Small { abs } => Padic::small(self.p, abs + k),
            Kind::Unit { val, unit, prec } => Padic {
                p: self.p,
                kind: Kind::Unit {
                    val: val + k,
                    unit,
                    prec,
                },
            },
        }
    }

    /// Unit part as an element of valuation 0.
    pub fn unit(&self) -> Result<Self> {
        match self.val()? {
            Valuation::Finite(v) => Ok(self.shift(-v)),
            Valuation::Infinite => Err(Error::Domain("unit part of zero".into())),
        }
    }

    /// Known-equal at the common precision (not a proof of equality).
    pub fn agrees_with(&self, other: &Self) -> bool {
        matches!(self.sub(other).kind, Kind::Zero | Kind::Small { .. })
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Zero => write!(f, "0"),
            Kind::Small { abs } => write!(f, "O({}^{abs})", self.p),
            Kind::Unit { val: 0, unit, prec } => write!(f, "{unit} (mod {}^{prec})", self.p),
            Kind::Unit { val, unit, prec } => {
                write!(f, "{}^{val}*{unit} (mod {}^{prec})", self.p, self.p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        let p = 2;
        assert_eq!(
            Padic::from_int(2, p, 8).val().unwrap(),
            Valuation::Finite(1)
        );
        let a = Padic::from_int(3, p, 8).sub(&Padic::one(p, 8));
        assert_eq!(a.val().unwrap(), Valuation::Finite(1));
        assert_eq!(Padic::zero(p).val().unwrap(), Valuation::Infinite);
        let z = Padic::one(p, 8).sub(&Padic::one(p, 8));
        assert!(z.val().is_err());
        assert_eq!(z.val_at_least(8), Tri::True);
        assert_eq!(z.val_at_least(9), Tri::Unknown);
    }

    #[test]
    fn arithmetic_tracks_precision() {
        let p = 3;
        let a = Padic::from_int(10, p, 5);
        let b = Padic::from_int(1, p, 5);
        let d = a.sub(&b);
        assert_eq!(d.val().unwrap(), Valuation::Finite(2));
        assert_eq!(d.rel_prec(), Some(3));
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).agrees_with(&Padic::one(p, 5)));
        assert_eq!(Padic::from_int(-1, p, 4).residue(4).unwrap(), 80);
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(mod_inverse(3, 8), Some(3));
        assert_eq!(mod_inverse(2, 8), None);
        assert_eq!(max_digits(2), 62);
    }
}
