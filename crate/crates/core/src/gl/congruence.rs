use crate::apartment::{f_star, ExtendedLevel, Omega};
use crate::error::{domain, Error, Result};
use crate::field::Rational;
use crate::padic::{Padic, PadicMatrix, Tri, Valuation};
use crate::roots::Root;
use num_traits::{One, Zero};
use serde::Serialize;

/// Entrywise congruence conditions: off-diagonal `(i, j)` in `P^t_ij`, diagonal in `1 + P^t_i`
/// (or `O^x` when the diagonal exponent is 0). An infinite level forces the entry to be exactly
/// zero (off-diagonal) or exactly one (diagonal).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CongruenceSpec {
    pub n: usize,
    pub p: u64,
    pub diag: Vec<ExtendedLevel>,
    /// Row-major `n x n`; diagonal slots unused.
    pub off: Vec<ExtendedLevel>,
    pub provenance: String,
}

impl CongruenceSpec {
    pub fn from_exponents(
        n: usize,
        p: u64,
        diag: &[i64],
        off: &[Vec<i64>],
        provenance: &str,
    ) -> Self {
        assert_eq!(diag.len(), n);
        let mut o = vec![ExtendedLevel::Infinity; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    o[i * n + j] = ExtendedLevel::finite(off[i][j]);
                }
            }
        }
        CongruenceSpec {
            n,
            p,
            diag: diag
                .iter()
                .map(|&d| ExtendedLevel::finite(d.max(0)))
                .collect(),
            off: o,
            provenance: provenance.to_string(),
        }
    }

    /// `K(k)`, the kernel of reduction mod `p^k`; `k = 0` gives `GL_n(Z_p)`.
    pub fn principal(n: usize, p: u64, k: i64) -> Self {
        let off = vec![vec![k; n]; n];
        Self::from_exponents(n, p, &vec![k; n], &off, &format!("K({k})"))
    }

    pub fn k0(n: usize, p: u64) -> Self {
        let mut s = Self::principal(n, p, 0);
        s.provenance = "K0".into();
        s
    }

    /// Stabilizer of the apartment vertex `x`: entry `(i, j)` in `P^(x_j - x_i)`.
    pub fn vertex_stabilizer(p: u64, x: &[i64]) -> Self {
        let n = x.len();
        let off: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| x[j] - x[i]).collect())
            .collect();
        Self::from_exponents(n, p, &vec![0; n], &off, &format!("P_x x={x:?}"))
    }

    /// Diagonal torus part `H_r`: entries in `1 + P^ceil(r)`, off-diagonal zero.
    pub fn torus_filtration(n: usize, p: u64, r: ExtendedLevel) -> Self {
        CongruenceSpec {
            n,
            p,
            diag: vec![r.clone(); n],
            off: vec![ExtendedLevel::Infinity; n * n],
            provenance: format!("H_{r}"),
        }
    }

    /// Off-diagonal exponent; `None` means the entry is zero.
    pub fn off_exp(&self, i: usize, j: usize) -> Option<i64> {
        self.off[i * self.n + j].exponent()
    }

    /// Diagonal exponent, clamped at 0; `None` means the entry is one.
    pub fn diag_exp(&self, i: usize) -> Option<i64> {
        self.diag[i].exponent().map(|e| e.max(0))
    }

    pub fn off_level(&self, i: usize, j: usize) -> &ExtendedLevel {
        &self.off[i * self.n + j]
    }

    /// All finite exponents.
    fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| {
                (0..n)
                    .filter(move |&j| j != i)
                    .map(move |j| self.off_exp(i, j))
            })
            .chain((0..n).map(|i| self.diag_exp(i)))
            .flatten()
    }

    pub fn max_exponent(&self) -> i64 {
        self.exponents().max().unwrap_or(0)
    }

    /// Smallest `N >= 1` with `K(N)` inside the group; `None` if no principal congruence
    /// subgroup fits (a torus-only spec).
    pub fn level_needed(&self) -> Option<i64> {
        let n = self.n;
        for i in 0..n {
            if self.diag_exp(i).is_none() {
                return None;
            }
            for j in 0..n {
                if i != j && self.off_exp(i, j).is_none() {
                    return None;
                }
            }
        }
        Some(self.max_exponent().max(1))
    }

    /// Every entry condition at least as strict as in `big`.
    pub fn entrywise_within(&self, big: &CongruenceSpec) -> bool {
        let n = self.n;
        let le = |small: Option<i64>, big: Option<i64>| match (small, big) {
            (_, None) => small.is_none(),
            (None, Some(_)) => true,
            (Some(s), Some(b)) => s >= b,
        };
        (0..n).all(|i| le(self.diag_exp(i), big.diag_exp(i)))
            && (0..n).all(|i| (0..n).all(|j| i == j || le(self.off_exp(i, j), big.off_exp(i, j))))
    }

    pub fn within_k0(&self) -> bool {
        self.entrywise_within(&CongruenceSpec::k0(self.n, self.p))
    }

    /// `K ∩ GL_n(Z_p)`.
    pub fn intersect_k0(&self) -> Self {
        let mut s = self.clone();
        for l in s.off.iter_mut() {
            if let Some(e) = l.exponent() {
                if e < 0 {
                    *l = ExtendedLevel::finite(0);
                }
            }
        }
        s.provenance = format!("{} ∩ K0", self.provenance);
        s
    }

    /// `d K d^{-1}` for `d = diag(p^c_i)`.
    pub fn conjugate_by_p_powers(&self, c: &[i64]) -> Self {
        let n = self.n;
        let mut s = self.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let shift = ExtendedLevel::finite(c[i] - c[j]);
                    s.off[i * n + j] = self.off[i * n + j].clone() + shift;
                }
            }
        }
        s.provenance = format!("{} conj {c:?}", self.provenance);
        s
    }

    /// `t_ik <= t_ij + t_jk` and `t_ii <= t_ij + t_ji` on exponents: the conditions for
    /// the entrywise set to be closed under products.
    pub fn is_concave(&self) -> bool {
        let n = self.n;
        let ex = |i: usize, j: usize| -> Option<i64> {
            if i == j {
                self.diag_exp(i)
            } else {
                self.off_exp(i, j)
            }
        };
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (ex(i, j), ex(j, k)) {
                        match ex(i, k) {
                            Some(c) => {
                                if c > a + b && !(i == k && c <= 0) {
                                    return false;
                                }
                            }
                            None => return false,
                        }
                    }
                }
            }
        }
        true
    }

    /// `t_ij + t_ji >= 1` for all pairs: the group is `U^- H U^+` in any order.
    pub fn has_iwahori_factorization(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                i == j
                    || match (self.off_exp(i, j), self.off_exp(j, i)) {
                        (Some(a), Some(b)) => a + b >= 1,
                        _ => true,
                    }
            })
        })
    }

    /// Diagonal entries constrained to `1 + P^k` with `k >= 1` (or exactly 1).
    fn needs_det_check(&self) -> bool {
        (0..self.n).any(|i| self.diag_exp(i) == Some(0))
    }

    /// Spec of the positive-root, negative-root or torus part.
    pub fn restrict(&self, part: Part) -> Self {
        let n = self.n;
        let mut s = self.clone();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let keep = match part {
                    Part::Upper => i < j,
                    Part::Lower => i > j,
                    Part::Torus => false,
                };
                if !keep {
                    s.off[i * n + j] = ExtendedLevel::Infinity;
                }
            }
            if part != Part::Torus {
                s.diag[i] = ExtendedLevel::Infinity;
            }
        }
        s.provenance = format!("{} {part:?}", self.provenance);
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Upper,
    Lower,
    Torus,
}

/// `U_Omega^(e)`: off-diagonal `(i, j)` at level `f*_Omega(e_i - e_j) + e`, diagonal at `0+ + e`.
pub fn filtration_spec(p: u64, omega: &Omega, e: &ExtendedLevel) -> Result<CongruenceSpec> {
    if !e.is_nonnegative() {
        return Err(domain("filtration level must be non-negative"));
    }
    let n = omega.n().ok_or_else(|| domain("empty Omega"))?;
    let mut off = vec![ExtendedLevel::Infinity; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off[i * n + j] = f_star(omega, &Root::new(i, j))? + e.clone();
            }
        }
    }
    let diag_level = ExtendedLevel::Plus(Rational::zero()) + e.clone();
    Ok(CongruenceSpec {
        n,
        p,
        diag: vec![diag_level; n],
        off,
        provenance: format!("U^({e}) {}", describe_omega(omega)),
    })
}

fn describe_omega(omega: &Omega) -> String {
    match omega {
        Omega::Points(p) if p.len() == 1 => {
            let c: Vec<String> = p[0].coords().iter().map(|c| c.to_string()).collect();
            format!("point ({})", c.join(","))
        }
        Omega::Points(p) => format!("{} points", p.len()),
        Omega::Facet(f) => format!("facet {:?}", f.vertices()),
    }
}

/// Integer level `e` as an [`ExtendedLevel`].
pub fn level(e: i64) -> ExtendedLevel {
    ExtendedLevel::Finite(Rational::integer(e))
}

fn check_entry(v: &Padic, exp: Option<i64>, what: &str) -> Result<bool> {
    match exp {
        None => {
            if v.is_exact_zero() {
                Ok(true)
            } else {
                match v.val() {
                    Ok(_) => Ok(false),
                    Err(_) => Err(Error::InsufficientPrecision(format!(
                        "{what}: cannot certify an exact zero"
                    ))),
                }
            }
        }
        Some(t) => v
            .val_at_least(t)
            .certify(|| format!("{what}: threshold {t}")),
    }
}

pub fn membership(g: &PadicMatrix, spec: &CongruenceSpec) -> Result<bool> {
    let n = spec.n;
    if g.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.n(),
        });
    }
    let p = spec.p;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                let e = g.get(i, i);
                let ok = match spec.diag_exp(i) {
                    Some(0) => e
                        .val_at_least(0)
                        .certify(|| format!("diag ({i},{i}) integrality"))?,
                    exp => {
                        let one = Padic::one(p, e.rel_prec().unwrap_or(1));
                        check_entry(&e.sub(&one), exp, &format!("diag ({i},{i})"))?
                    }
                };
                if !ok {
                    return Ok(false);
                }
            } else if !check_entry(g.get(i, j), spec.off_exp(i, j), &format!("entry ({i},{j})"))? {
                return Ok(false);
            }
        }
    }
    if spec.needs_det_check() && g.det_val()? != 0 {
        return Ok(false);
    }
    Ok(true)
}

/// `g = u_minus * h * u_plus`.
#[derive(Clone, Debug)]
pub struct IwahoriFactors {
    pub u_minus: PadicMatrix,
    pub h: PadicMatrix,
    pub u_plus: PadicMatrix,
}

impl IwahoriFactors {
    pub fn product(&self) -> PadicMatrix {
        self.u_minus.mul(&self.h).mul(&self.u_plus)
    }
}

/// LDU factorization with each factor checked against the matching part of `spec`.
pub fn iwahori_factor(g: &PadicMatrix, spec: &CongruenceSpec) -> Result<IwahoriFactors> {
    if !membership(g, spec)? {
        return Err(Error::NotContained(spec.provenance.clone()));
    }
    let f = ldu(g)?;
    for (m, part) in [
        (&f.u_minus, Part::Lower),
        (&f.h, Part::Torus),
        (&f.u_plus, Part::Upper),
    ] {
        let mut s = spec.restrict(part);
        if part != Part::Torus {
            // Unipotent factors: diagonal exactly one.
            s.diag = vec![ExtendedLevel::Infinity; spec.n];
        }
        if !membership_unipotent_aware(m, &s, part)? {
            return Err(Error::NotContained(format!(
                "{:?} factor of {}",
                part, spec.provenance
            )));
        }
    }
    Ok(f)
}

fn membership_unipotent_aware(m: &PadicMatrix, s: &CongruenceSpec, part: Part) -> Result<bool> {
    if part == Part::Torus {
        return membership(m, s);
    }
    let n = s.n;
    for i in 0..n {
        for j in 0..n {
            if i != j && !m.get(i, j).is_exact_zero() {
                let Some(t) = s.off_exp(i, j) else {
                    return Ok(false);
                };
                if !m
                    .get(i, j)
                    .val_at_least(t)
                    .certify(|| format!("factor entry ({i},{j})"))?
                {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Doolittle LDU without pivoting.
pub fn ldu(g: &PadicMatrix) -> Result<IwahoriFactors> {
    let n = g.n();
    let p = g.p();
    let prec = g
        .entries()
        .iter()
        .filter_map(|e| e.rel_prec())
        .max()
        .unwrap_or(1);
    let one = Padic::one(p, prec);
    let mut l = PadicMatrix::identity(n, p, prec);
    let mut u = PadicMatrix::identity(n, p, prec);
    let mut d = vec![Padic::zero(p); n];
    for k in 0..n {
        let mut dk = *g.get(k, k);
        for m in 0..k {
            dk = dk.sub(&l.get(k, m).mul(&d[m]).mul(u.get(m, k)));
        }
        match dk.val() {
            Ok(Valuation::Finite(_)) => {}
            Ok(Valuation::Infinite) => return Err(Error::NotContained("big cell".into())),
            Err(e) => return Err(e),
        }
        let dinv = dk.inv()?;
        d[k] = dk;
        for j in k + 1..n {
            let mut s = *g.get(k, j);
            for m in 0..k {
                s = s.sub(&l.get(k, m).mul(&d[m]).mul(u.get(m, j)));
            }
            u.set(k, j, s.mul(&dinv));
            let mut t = *g.get(j, k);
            for m in 0..k {
                t = t.sub(&l.get(j, m).mul(&d[m]).mul(u.get(m, k)));
            }
            l.set(j, k, t.mul(&dinv));
        }
        l.set(k, k, one);
        u.set(k, k, one);
    }
    Ok(IwahoriFactors {
        u_minus: l,
        h: PadicMatrix::diag(&d),
        u_plus: u,
    })
}

/// Haar measure normalized by `mu(K0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HaarWeight(pub Rational);

impl HaarWeight {
    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// Numerator and denominator; the denominator is a power of `p` times a divisor of `|GL_n(F_p)|`.
    pub fn is_in_z_1_over_p(&self, p: u64) -> bool {
        let (_, mut d) = self.0.numer_denom();
        let pb = num_bigint::BigInt::from(p);
        let zero = num_bigint::BigInt::zero();
        while &d % &pb == zero {
            d /= &pb;
        }
        d == num_bigint::BigInt::one()
    }
}

/// Tri helper for callers that collect several threshold tests.
pub fn all_certified(tests: &[Tri]) -> Tri {
    tests.iter().fold(Tri::True, |acc, t| acc.and(*t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apartment::{facet_of, ApartmentPoint};

    fn exps(s: &CongruenceSpec) -> (Vec<Option<i64>>, Vec<Option<i64>>) {
        let n = s.n;
        (
            (0..n).map(|i| s.diag_exp(i)).collect(),
            (0..n * n)
                .map(|k| {
                    if k / n == k % n {
                        None
                    } else {
                        s.off_exp(k / n, k % n)
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn origin_and_chamber() {
        let o: Omega = ApartmentPoint::origin(2).into();
        let s = filtration_spec(2, &o, &level(0)).unwrap();
        assert_eq!(
            exps(&s),
            (vec![Some(1), Some(1)], vec![None, Some(1), Some(1), None])
        );
        let s1 = filtration_spec(2, &o, &level(1)).unwrap();
        assert_eq!(
            exps(&s1),
            (vec![Some(2), Some(2)], vec![None, Some(2), Some(2), None])
        );
        let ch =
            facet_of(&ApartmentPoint::new(vec![Rational::new(1, 2), Rational::zero()]).unwrap());
        let sc = filtration_spec(2, &ch.into(), &level(0)).unwrap();
        assert_eq!(
            exps(&sc),
            (vec![Some(1), Some(1)], vec![None, Some(0), Some(1), None])
        );
        assert!(filtration_spec(2, &o, &level(-1)).is_err());
    }

    #[test]
    fn membership_examples() {
        let p = 2;
        let o: Omega = ApartmentPoint::origin(2).into();
        let s = filtration_spec(p, &o, &level(0)).unwrap();
        assert!(membership(&PadicMatrix::identity(2, p, 8), &s).unwrap());
        let g = PadicMatrix::from_ints(&[vec![1, 2], vec![0, 1]], p, 8);
        assert!(membership(&g, &s).unwrap());
        let g = PadicMatrix::from_ints(&[vec![1, 1], vec![0, 1]], p, 8);
        assert!(!membership(&g, &s).unwrap());
    }

    #[test]
    fn ldu_roundtrip() {
        let p = 3;
        let g = PadicMatrix::from_ints(&[vec![4, 3], vec![9, 7]], p, 10);
        let spec = CongruenceSpec::principal(2, p, 1);
        let f = iwahori_factor(&g, &spec).unwrap();
        assert!(f.product().agrees_with(&g));
    }
}
