use super::congruence::CongruenceSpec;
use crate::error::{domain, Error, Result};
use crate::field::Rational;
use crate::guard;
use crate::padic::modular::ModRing;
use crate::padic::PadicMatrix;
use crate::provenance::Provenance;
use serde::Serialize;
use std::collections::HashSet;

#[derive(Clone, Debug, Serialize)]
pub struct CosetReport {
    pub index: u128,
    /// Product formula, available when both groups have an Iwahori factorization.
    pub closed_form: Option<u128>,
    #[serde(skip)]
    pub representatives: Vec<PadicMatrix>,
    pub provenance: Provenance,
}

/// `c` with `t_ij + c_i - c_j >= 0` for every finite off-diagonal exponent, so that
/// `diag(p^c) K diag(p^-c)` lies in `GL_n(Z_p)`.
pub fn k0_potential(spec: &CongruenceSpec) -> Result<Vec<i64>> {
    let n = spec.n;
    let mut c = vec![0i64; n];
    for _ in 0..=n {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if let Some(t) = spec.off_exp(i, j) {
                    if c[j] > c[i] + t {
                        c[j] = c[i] + t;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(c);
        }
    }
    Err(domain(format!(
        "{} is not a group: negative cycle in exponents",
        spec.provenance
    )))
}

/// Number of residues mod `p^level` allowed at each entry of a spec inside `K0`.
fn entry_choices(spec: &CongruenceSpec, level: i64) -> Vec<Vec<u64>> {
    let n = spec.n;
    let r = ModRing::new(spec.p, level as u32);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let vals: Vec<u64> = if i == j {
                match spec.diag_exp(i) {
                    None => vec![1 % r.q],
                    Some(e) if e >= level => vec![1 % r.q],
                    Some(0) => (0..r.q).collect(),
                    Some(e) => {
                        let step = spec.p.pow(e as u32);
                        (0..r.q / step).map(|a| (1 + a * step) % r.q).collect()
                    }
                }
            } else {
                match spec.off_exp(i, j) {
                    None => vec![0],
                    Some(t) if t >= level => vec![0],
                    Some(t) => {
                        let step = spec.p.pow(t.max(0) as u32);
                        (0..r.q / step).map(|a| a * step).collect()
                    }
                }
            };
            out.push(vals);
        }
    }
    out
}

fn raw_count(choices: &[Vec<u64>]) -> u128 {
    choices.iter().map(|c| c.len() as u128).product()
}

/// All elements of `spec / K(level)` for a spec inside `K0`.
pub(crate) fn enumerate(spec: &CongruenceSpec, level: i64) -> Result<Vec<Vec<u64>>> {
    let choices = entry_choices(spec, level);
    guard::check(raw_count(&choices))?;
    let r = ModRing::new(spec.p, level as u32);
    let n = spec.n;
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let m: Vec<u64> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        if r.is_invertible(n, &m) {
            out.push(m);
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `|GL_n(Z/p^k)|`.
pub fn gl_order(n: usize, p: u64, k: i64) -> u128 {
    let p = p as u128;
    let mut ord: u128 = 1;
    for i in 0..n as u32 {
        ord *= p.pow(n as u32) - p.pow(i);
    }
    ord * p.pow((n * n) as u32 * (k.max(1) - 1) as u32)
}

/// `|G / K(level)|` for the group `G` of `spec`, by the product formula when `G` has an Iwahori factorization.
fn closed_form_order(spec: &CongruenceSpec, level: i64) -> Option<u128> {
    if !spec.has_iwahori_factorization() || !spec.within_k0() {
        return None;
    }
    let p = spec.p as u128;
    let mut ord: u128 = 1;
    for i in 0..spec.n {
        ord *= match spec.diag_exp(i) {
            None => 1,
            Some(0) => (p - 1) * p.pow((level - 1) as u32),
            Some(e) => p.pow((level - e).max(0) as u32),
        };
        for j in 0..spec.n {
            if i != j {
                ord *= match spec.off_exp(i, j) {
                    None => 1,
                    Some(t) => p.pow((level - t).clamp(0, level) as u32),
                };
            }
        }
    }
    Some(ord)
}

/// `|spec / K(level)|`, closed form if possible.
fn order_mod_level(spec: &CongruenceSpec, level: i64) -> Result<(u128, Provenance)> {
    if let Some(o) = closed_form_order(spec, level) {
        return Ok((o, Provenance::OperatorIdentity));
    }
    Ok((
        enumerate(spec, level)?.len() as u128,
        Provenance::ExactEnumeration,
    ))
}

/// Left cosets `big / small` with representatives. Groups outside `K0` are first conjugated
/// by a diagonal `p`-power matrix that moves `big` into `K0`.
pub fn quotient_cosets(big: &CongruenceSpec, small: &CongruenceSpec) -> Result<CosetReport> {
    if big.n != small.n || big.p != small.p {
        return Err(Error::DimensionMismatch {
            expected: big.n,
            got: small.n,
        });
    }
    if !small.entrywise_within(big) {
        return Err(Error::NotContained(format!(
            "{} in {}",
            small.provenance, big.provenance
        )));
    }
    let c = k0_potential(big)?;
    let big_c = big.conjugate_by_p_powers(&c);
    let small_c = small.conjugate_by_p_powers(&c);
    let level = small_c.level_needed().ok_or_else(|| {
        domain(format!(
            "{} has infinite index in {}",
            small.provenance, big.provenance
        ))
    })?;
    let closed_form = match (
        closed_form_order(&big_c, level),
        closed_form_order(&small_c, level),
    ) {
        (Some(a), Some(b)) => Some(a / b),
        _ => None,
    };
    let big_elems = enumerate(&big_c, level)?;
    let small_elems = enumerate(&small_c, level)?;
    let r = ModRing::new(big.p, level as u32);
    let n = big.n;
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(big_elems.len());
    let mut reps = Vec::new();
    let prec = (level as u32 + 4).min(crate::padic::max_digits(big.p));
    for g in &big_elems {
        if seen.contains(g) {
            continue;
        }
        for s in &small_elems {
            seen.insert(r.mat_mul(n, g, s));
        }
        reps.push(unconjugate(
            &PadicMatrix::from_residues(n, big.p, g, prec),
            &c,
        ));
    }
    Ok(CosetReport {
        index: reps.len() as u128,
        closed_form,
        representatives: reps,
        provenance: Provenance::ExactEnumeration,
    })
}

/// `[big : small]` by the product formula alone.
pub fn index_closed_form(big: &CongruenceSpec, small: &CongruenceSpec) -> Option<u128> {
    let c = k0_potential(big).ok()?;
    let level = small.conjugate_by_p_powers(&c).level_needed()?;
    let a = closed_form_order(&big.conjugate_by_p_powers(&c), level)?;
    let b = closed_form_order(&small.conjugate_by_p_powers(&c), level)?;
    Some(a / b)
}

/// `diag(p^-c) g diag(p^c)`.
pub(crate) fn unconjugate(g: &PadicMatrix, c: &[i64]) -> PadicMatrix {
    let n = g.n();
    let mut out = g.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.set(i, j, g.get(i, j).shift(c[j] - c[i]));
            }
        }
    }
    out
}

/// Haar measure of `spec` with `mu(K0) = 1`.
pub fn haar_measure(spec: &CongruenceSpec) -> Result<(Rational, Provenance)> {
    let c = k0_potential(spec)?;
    let inside = spec.conjugate_by_p_powers(&c);
    let level = inside
        .level_needed()
        .ok_or_else(|| domain(format!("{} has measure zero", spec.provenance)))?;
    let (ord, prov) = order_mod_level(&inside, level)?;
    let total = gl_order(spec.n, spec.p, level);
    let num = i64::try_from(ord).map_err(|_| domain("measure numerator overflow"))?;
    let den = i64::try_from(total).map_err(|_| domain("measure denominator overflow"))?;
    Ok((Rational::new(num, den), prov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apartment::{ApartmentPoint, Omega};
    use crate::gl::congruence::{filtration_spec, level};

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2, 1), 6);
        assert_eq!(gl_order(2, 2, 2), 96);
        assert_eq!(gl_order(3, 2, 1), 168);
    }

    #[test]
    fn filtration_index_at_origin() {
        let o: Omega = ApartmentPoint::origin(2).into();
        let u0 = filtration_spec(2, &o, &level(0)).unwrap();
        let u1 = filtration_spec(2, &o, &level(1)).unwrap();
        let rep = quotient_cosets(&u0, &u1).unwrap();
        assert_eq!(rep.index, 16);
        assert_eq!(rep.closed_form, Some(16));
        let k0 = CongruenceSpec::k0(2, 2);
        let rep = quotient_cosets(&k0, &u0).unwrap();
        assert_eq!(rep.index, 6);
        assert_eq!(rep.closed_form, None);
    }

    #[test]
    fn conjugated_stabilizer() {
        let p = 3;
        let stab = CongruenceSpec::vertex_stabilizer(p, &[2, 0]);
        let k = CongruenceSpec::principal(2, p, 3).conjugate_by_p_powers(&[-2, 0]);
        let rep = quotient_cosets(&stab, &k).unwrap();
        assert_eq!(rep.index, gl_order(2, 3, 3));
        let (mu, _) = haar_measure(&stab).unwrap();
        assert_eq!(mu, Rational::integer(1));
    }
}
