use super::diagonal_entries;
use crate::apartment::{ApartmentPoint, ExtendedLevel};
use crate::error::{precision, Error, Result};
use crate::gl::congruence::{filtration_spec, ldu, level, membership, CongruenceSpec};
use crate::padic::{Padic, PadicMatrix, Valuation};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Upper,
    Lower,
}

/// `u gamma u^-1 gamma^-1`.
fn commutator(u: &PadicMatrix, gamma: &PadicMatrix) -> Result<PadicMatrix> {
    u.commutator(gamma)
}

/// Solves `[u, gamma] = v` for unipotent `u` on the side of `v`, one height layer at a time:
/// at height `h` the target `u^-1 v [u, gamma]^-1 u` is trivial below height `h`, and its
/// height-`h` entries divided by `1 - gamma_i / gamma_j` give the next factor.
pub fn solve_commutator(v: &PadicMatrix, gamma: &PadicMatrix, side: Side) -> Result<PadicMatrix> {
    let d = diagonal_entries(gamma)?;
    let n = v.n();
    let p = v.p();
    let prec = v
        .entries()
        .iter()
        .filter_map(|e| e.rel_prec())
        .max()
        .unwrap_or(1);
    let one = Padic::one(p, prec);
    let mut factors = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let on_side = match side {
                Side::Upper => i < j,
                Side::Lower => i > j,
            };
            if on_side {
                let f = one.sub(&d[i].div(&d[j])?);
                match f.val() {
                    Ok(Valuation::Finite(_)) => {}
                    Ok(Valuation::Infinite) => {
                        return Err(Error::Irregular(format!("gamma_{i} = gamma_{j}")))
                    }
                    Err(_) => {
                        return Err(Error::Irregular(format!(
                            "1 - gamma_{i}/gamma_{j} is not certified nonzero"
                        )))
                    }
                }
                factors.push(((i, j), f));
            }
        }
    }
    let mut u = PadicMatrix::identity(n, p, prec);
    for h in 1..n {
        let target = u
            .inverse()?
            .mul(v)
            .mul(&commutator(&u, gamma)?.inverse()?)
            .mul(&u);
        let mut w = PadicMatrix::identity(n, p, prec);
        for ((i, j), f) in &factors {
            if i.abs_diff(*j) == h {
                let t = target.get(*i, *j);
                if !t.is_exact_zero() {
                    w.set(*i, *j, t.div(f)?);
                }
            }
        }
        u = u.mul(&w);
    }
    Ok(u)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationWitness {
    #[serde(skip)]
    pub g: PadicMatrix,
    #[serde(skip)]
    pub t: PadicMatrix,
    pub t_diagonal: Vec<String>,
    pub iterations: usize,
    /// Valuation floor the off-diagonal residual reached.
    pub floor_reached: i64,
    pub g_in_u_x0: bool,
    pub t_in_slice: bool,
    pub roundtrip: bool,
}

fn off_diagonal_floor(m: &PadicMatrix) -> i64 {
    let n = m.n();
    let mut lo = i64::MAX;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if let Valuation::Finite(v) = m.get(i, j).val_lower_bound() {
                    lo = lo.min(v);
                }
            }
        }
    }
    lo
}

/// Finds `g` in `U_x^(0)` and diagonal `t` with `g t g^-1 = y`, for `y` in `U_x^(r) gamma`
/// and `x` an apartment vertex. Alternately removes the upper and the lower parts of the
/// current conjugate by solving commutator equations; stops once the off-diagonal
/// residual reaches valuation `m - 3`, `m` the absolute precision of `y`.
pub fn conjugate_into_torus(
    y: &PadicMatrix,
    gamma: &PadicMatrix,
    x: &[i64],
    r: i64,
) -> Result<ConjugationWitness> {
    let n = y.n();
    let p = y.p();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let xp = ApartmentPoint::from_ints(x)?;
    let spec_r = filtration_spec(p, &xp.clone().into(), &level(r))?;
    if !membership(&y.mul(&gamma.inverse()?), &spec_r)? {
        return Err(Error::NotContained(format!("y outside U_x^({r}) gamma")));
    }
    // absolute, not relative: a deep entry can carry few digits and still be precise
    let m = match y.abs_prec_floor() {
        Valuation::Finite(v) => v.max(1),
        Valuation::Infinite => i64::from(crate::gl::lattice::working_digits(p)),
    };
    let floor = m - 3;
    let dx = PadicMatrix::diag_p_powers(&x.iter().map(|v| -v).collect::<Vec<_>>(), p, m as u32);
    let dx_inv = dx.inverse()?;
    let mut yc = dx_inv.mul(y).mul(&dx);
    let mut g = PadicMatrix::identity(n, p, m as u32);
    let mut iterations = 0;
    let mut last = off_diagonal_floor(&yc);
    while last < floor {
        iterations += 1;
        let f = ldu(&yc)?;
        let target = f.h.mul(&f.u_plus).mul(&f.h.inverse()?);
        let u = solve_commutator(&target, &f.h, Side::Upper)?;
        yc = u.inverse()?.mul(&yc).mul(&u);
        g = g.mul(&u);
        let f = ldu(&yc)?;
        let l = solve_commutator(&f.u_minus, &f.h, Side::Lower)?;
        yc = l.inverse()?.mul(&yc).mul(&l);
        g = g.mul(&l);
        let now = off_diagonal_floor(&yc);
        if now <= last {
            return Err(precision(format!(
                "conjugation stalled at residual valuation {now} before the floor {floor}"
            )));
        }
        last = now;
    }
    let t = PadicMatrix::diag(&diagonal_of(&yc));
    let g_full = dx.mul(&g).mul(&dx_inv);
    let u0 = filtration_spec(p, &xp.into(), &level(0))?;
    let g_in_u_x0 = membership(&g_full, &u0)?;
    let slice = CongruenceSpec::torus_filtration(n, p, ExtendedLevel::plus(r));
    let t_in_slice = membership(&t.mul(&gamma.inverse()?), &slice)?;
    let back = g_full.mul(&t).mul(&g_full.inverse()?);
    let roundtrip = agrees_to(&back, y, floor);
    Ok(ConjugationWitness {
        t_diagonal: (0..n).map(|i| t.get(i, i).to_string()).collect(),
        g: g_full,
        t,
        iterations,
        floor_reached: last.min(i64::from(i32::MAX)),
        g_in_u_x0,
        t_in_slice,
        roundtrip,
    })
}

fn diagonal_of(m: &PadicMatrix) -> Vec<Padic> {
    (0..m.n()).map(|i| *m.get(i, i)).collect()
}

/// Entrywise `a - b` has valuation at least `floor`.
pub(crate) fn agrees_to(a: &PadicMatrix, b: &PadicMatrix, floor: i64) -> bool {
    a.sub(b)
        .entries()
        .iter()
        .all(|e| match e.val_lower_bound() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= floor,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[i64], p: u64, prec: u32) -> PadicMatrix {
        PadicMatrix::diag(
            &vals
                .iter()
                .map(|&v| Padic::from_int(v, p, prec))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_one_closed_form() {
        let p = 2;
        let g = diag(&[1, 3], p, 10);
        let v = PadicMatrix::from_ints(&[vec![1, 4], vec![0, 1]], p, 10);
        let u = solve_commutator(&v, &g, Side::Upper).unwrap();
        // x (1 - 1/3) = 4  =>  x = 6
        assert!(u.get(0, 1).agrees_with(&Padic::from_int(6, p, 8)));
        assert!(commutator(&u, &g).unwrap().agrees_with(&v));
        let id = PadicMatrix::identity(2, p, 10);
        assert!(solve_commutator(&id, &g, Side::Upper)
            .unwrap()
            .agrees_with(&id));
        assert!(matches!(
            solve_commutator(&v, &diag(&[1, 1], p, 10), Side::Upper),
            Err(Error::Irregular(_))
        ));
    }

    #[test]
    fn gl3_commutator() {
        let p = 2;
        let g = diag(&[1, 3, 5], p, 10);
        let v = PadicMatrix::from_ints(&[vec![1, 4, 3], vec![0, 1, 8], vec![0, 0, 1]], p, 10);
        let u = solve_commutator(&v, &g, Side::Upper).unwrap();
        assert!(agrees_to(&commutator(&u, &g).unwrap(), &v, 6));
    }

    #[test]
    fn conjugation_roundtrip() {
        let p = 2;
        let m = 12;
        let g = diag(&[1, 3], p, m);
        let k = PadicMatrix::from_ints(&[vec![1, 2], vec![6, 3]], p, m);
        let y = k.mul(&g).mul(&k.inverse().unwrap());
        let w = conjugate_into_torus(&y, &g, &[0, 0], 1).unwrap();
        assert!(w.roundtrip && w.g_in_u_x0 && w.t_in_slice);
        let w = conjugate_into_torus(&g, &g, &[0, 0], 1).unwrap();
        assert_eq!(w.iterations, 0);
    }
}
