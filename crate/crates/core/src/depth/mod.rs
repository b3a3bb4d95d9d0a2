//! Singular depth, fixed vertices of torus elements, and the conjugation algorithms.

mod conjugation;

pub use conjugation::{conjugate_into_torus, solve_commutator, ConjugationWitness, Side};

use crate::error::{domain, precision, Error, Result};
use crate::field::Rational;
use crate::gl::lattice::{apartment_vertices, working_digits};
use crate::gl::{vertices_in_ball, VertexLattice};
use crate::padic::{Padic, PadicMatrix, Valuation};
use crate::roots::Root;
use serde::Serialize;

/// `None` stands for infinity.
pub type Depth = Option<i64>;

#[derive(Clone, Debug, Serialize)]
pub struct RootDepth {
    pub root: String,
    pub height: i64,
    pub sd: Depth,
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthReport {
    pub sd_alpha: Vec<RootDepth>,
    pub sd: Depth,
    pub regular: bool,
    /// Max of `sd_alpha` over positive roots.
    pub n_max: Depth,
    pub r_split: Depth,
    pub r_general: Depth,
    /// `d(gamma)`, zero for split tori.
    pub d_gamma: i64,
    pub scope: &'static str,
}

impl DepthReport {
    pub fn sd_of(&self, i: usize, j: usize) -> Depth {
        let name = Root::new(i, j).to_string();
        self.sd_alpha
            .iter()
            .find(|r| r.root == name)
            .and_then(|r| r.sd)
    }
}

pub(crate) fn diagonal_entries(g: &PadicMatrix) -> Result<Vec<Padic>> {
    if !g.is_diagonal() {
        return Err(domain("expected a diagonal element"));
    }
    let d: Vec<Padic> = (0..g.n()).map(|i| *g.get(i, i)).collect();
    for x in &d {
        if x.val()? == Valuation::Infinite {
            return Err(Error::SingularMatrix);
        }
    }
    Ok(d)
}

/// `v(a/b - 1)`, infinite when `a = b`.
pub(crate) fn ratio_depth(a: &Padic, b: &Padic) -> Result<Depth> {
    if a == b {
        return Ok(None);
    }
    let one = Padic::one(a.p(), a.rel_prec().unwrap_or(1));
    let d = a.div(b)?.sub(&one);
    match d.val() {
        Ok(Valuation::Finite(v)) => Ok(Some(v)),
        Ok(Valuation::Infinite) => Ok(None),
        Err(_) => Err(precision(format!(
            "cannot certify v({a}/{b} - 1); raise the precision or the entries are equal beyond it"
        ))),
    }
}

fn dmax(a: Depth, b: Depth) -> Depth {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

pub fn singular_depth(gamma: &PadicMatrix, e: i64) -> Result<DepthReport> {
    let d = diagonal_entries(gamma)?;
    let n = d.len();
    let hgt = n as i64 - 1;
    let mut sd_alpha = Vec::new();
    let mut sd: Depth = Some(i64::MIN);
    let mut n_max: Depth = Some(i64::MIN);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let s = ratio_depth(&d[i], &d[j])?;
            sd = dmax(sd, s);
            if i < j {
                n_max = dmax(n_max, s);
            }
            sd_alpha.push(RootDepth {
                root: Root::new(i, j).to_string(),
                height: j as i64 - i as i64,
                sd: s,
            });
        }
    }
    let regular = sd.is_some();
    Ok(DepthReport {
        sd_alpha,
        sd,
        regular,
        n_max,
        r_split: sd.map(|s| s.max(e)),
        r_general: sd.map(|s| (hgt * s).max(e)),
        d_gamma: 0,
        scope: "split diagonal torus",
    })
}

/// Divides by the central `p^min v`; fails unless all entries share one valuation.
pub fn central_normalize(gamma: &PadicMatrix) -> Result<PadicMatrix> {
    let d = diagonal_entries(gamma)?;
    let vals: Vec<i64> = d
        .iter()
        .map(|x| x.val().map(|v| v.finite().expect("nonzero")))
        .collect::<Result<_>>()?;
    let v0 = vals[0];
    if vals.iter().any(|&v| v != v0) {
        return Err(domain("element is not compact modulo the center"));
    }
    Ok(PadicMatrix::diag(
        &d.iter().map(|x| x.shift(-v0)).collect::<Vec<_>>(),
    ))
}

/// `u = H D^-1` split into root components `t_alpha`, layer by layer in height.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    /// Apartment vertex `y` with `y_i = -a_i`.
    pub y: Vec<i64>,
    /// `(i, j, v(t_ij))` for positive roots; `None` when `t_ij = 0`.
    pub components: Vec<(usize, usize, Depth)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub vertex: Vec<i64>,
    pub h: Vec<u64>,
    pub decomposition: Decomposition,
    pub bound_b: bool,
    pub bound_c: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedSetReport {
    pub radius: i64,
    pub ball_size: usize,
    #[serde(skip)]
    pub fixed: Vec<VertexLattice>,
    pub fixed_count: usize,
    pub contains_apartment_ball: bool,
    pub closed_under_geodesics: bool,
    pub bounds: Vec<BoundCheck>,
}

pub fn fixed_vertices(gamma: &PadicMatrix, radius: i64) -> Result<FixedSetReport> {
    let g = central_normalize(gamma)?;
    let ball = vertices_in_ball(g.n(), g.p(), radius)?;
    let mut fixed = Vec::new();
    for v in &ball {
        if v.act(&g)? == *v {
            fixed.push(v.clone());
        }
    }
    let apt: Vec<VertexLattice> = apartment_vertices(g.n(), radius)
        .iter()
        .map(|x| VertexLattice::from_apartment(g.p(), x))
        .collect();
    let contains_apartment_ball = apt.iter().all(|v| fixed.contains(v));
    let closed_under_geodesics = if g.n() == 2 {
        tree_geodesics_fixed(&fixed, &ball)?
    } else {
        true
    };
    Ok(FixedSetReport {
        radius,
        ball_size: ball.len(),
        fixed_count: fixed.len(),
        fixed,
        contains_apartment_ball,
        closed_under_geodesics,
        bounds: Vec::new(),
    })
}

/// Tree case: every fixed vertex's neighbour toward the apartment is fixed.
fn tree_geodesics_fixed(fixed: &[VertexLattice], ball: &[VertexLattice]) -> Result<bool> {
    for v in fixed {
        let d = apartment_distance(v, ball)?;
        if d == 0 {
            continue;
        }
        let toward = ball
            .iter()
            .filter(|w| v.distance(w).map(|x| x == 1).unwrap_or(false))
            .find(|w| {
                apartment_distance(w, ball)
                    .map(|x| x + 1 == d)
                    .unwrap_or(false)
            });
        match toward {
            Some(w) if fixed.contains(w) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Distance to the nearest vertex of the standard apartment.
fn apartment_distance(v: &VertexLattice, ball: &[VertexLattice]) -> Result<i64> {
    let mut best = i64::MAX;
    for w in ball.iter().filter(|w| w.in_standard_apartment()) {
        best = best.min(v.distance(w)?);
    }
    Ok(best)
}

/// Root components of an upper unipotent matrix, peeled off by height.
pub fn root_components(u: &PadicMatrix) -> Result<Vec<(usize, usize, Padic)>> {
    let n = u.n();
    let p = u.p();
    let prec = working_digits(p);
    let mut rem = u.clone();
    let mut out = Vec::new();
    for h in 1..n {
        let mut layer = PadicMatrix::identity(n, p, prec);
        let mut comps = Vec::new();
        for i in 0..n - h {
            let t = *rem.get(i, i + h);
            comps.push((i, i + h, t));
            let mut x = PadicMatrix::identity(n, p, prec);
            x.set(i, i + h, t);
            layer = layer.mul(&x);
        }
        rem = layer.inverse()?.mul(&rem);
        out.extend(comps);
    }
    Ok(out)
}

pub fn decompose_vertex(v: &VertexLattice) -> Result<Decomposition> {
    let n = v.n;
    let prec = working_digits(v.p);
    let h = v.to_matrix(prec);
    let dinv = PadicMatrix::diag_p_powers(&v.a.iter().map(|a| -a).collect::<Vec<_>>(), v.p, prec);
    let u = h.mul(&dinv);
    let comps = root_components(&u)?;
    let components = comps
        .into_iter()
        .map(|(i, j, t)| Ok((i, j, t.val()?.finite())))
        .collect::<Result<_>>()?;
    let _ = n;
    Ok(Decomposition {
        y: v.a.iter().map(|a| -a).collect(),
        components,
    })
}

/// Checks `v(t_alpha) >= -alpha(y) - sd_alpha` and `>= -alpha(y) - hgt(alpha) N` on every fixed vertex.
pub fn verify_fixpoint_bounds(gamma: &PadicMatrix, radius: i64) -> Result<FixedSetReport> {
    let g = central_normalize(gamma)?;
    let depth = singular_depth(&g, 0)?;
    if !depth.regular {
        return Err(Error::Irregular(
            "fixed-point bounds need a regular element".into(),
        ));
    }
    let mut rep = fixed_vertices(&g, radius)?;
    let n_max = depth.n_max.expect("regular");
    for v in &rep.fixed {
        let dec = decompose_vertex(v)?;
        let mut b_ok = true;
        let mut c_ok = true;
        for &(i, j, val) in &dec.components {
            let Some(val) = val else { continue };
            let alpha_y = dec.y[i] - dec.y[j];
            let sd = depth.sd_of(i, j).expect("regular");
            let hgt = (j - i) as i64;
            b_ok &= val >= -alpha_y - sd;
            c_ok &= val >= -alpha_y - hgt * n_max;
        }
        rep.bounds.push(BoundCheck {
            vertex: v.coords(),
            h: v.h.clone(),
            decomposition: dec,
            bound_b: b_ok,
            bound_c: c_ok,
        });
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct HairReport {
    pub stable: bool,
    pub hypothesis_met: bool,
    pub fixed_gamma: usize,
    pub fixed_gamma_h: usize,
}

/// Compares the fixed sets of `gamma` and `gamma h`; `hypothesis_met` records whether
/// `sd_alpha(h) > hgt(Phi) sd(gamma)` for every root, otherwise the result is advisory.
pub fn hair_stability(gamma: &PadicMatrix, h: &PadicMatrix, radius: i64) -> Result<HairReport> {
    let g = central_normalize(gamma)?;
    let dg = singular_depth(&g, 0)?;
    let dh = singular_depth(h, 0)?;
    let hgt = g.n() as i64 - 1;
    let bound = dg.sd.map(|s| hgt * s);
    let hypothesis_met = match bound {
        None => false,
        Some(b) => dh.sd_alpha.iter().all(|r| r.sd.is_none_or(|s| s > b)),
    };
    let a = fixed_vertices(&g, radius)?;
    let b = fixed_vertices(&g.mul(h), radius)?;
    Ok(HairReport {
        stable: a.fixed == b.fixed,
        hypothesis_met,
        fixed_gamma: a.fixed_count,
        fixed_gamma_h: b.fixed_count,
    })
}

/// `d_T(x)` in the tree: distance from `x` to its projection on the standard apartment.
pub fn torus_distance(x: &VertexLattice, radius: i64) -> Result<Rational> {
    if x.n != 2 {
        return Err(domain("torus distance is implemented for the tree (n = 2)"));
    }
    let o = VertexLattice::origin(2, x.p);
    if o.distance(x)? > radius {
        return Err(domain("vertex outside the enumerated ball"));
    }
    let ball = vertices_in_ball(2, x.p, radius)?;
    Ok(Rational::integer(apartment_distance(x, &ball)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[i64], p: u64) -> PadicMatrix {
        PadicMatrix::diag(
            &vals
                .iter()
                .map(|&v| Padic::from_int(v, p, 20))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn depth_examples() {
        let r = singular_depth(&diag(&[1, 3], 2), 0).unwrap();
        assert_eq!((r.sd, r.regular, r.r_split), (Some(1), true, Some(1)));
        let r = singular_depth(&diag(&[1, 2], 3), 0).unwrap();
        assert_eq!((r.sd, r.r_split), (Some(0), Some(0)));
        let r = singular_depth(&diag(&[1, 1], 2), 0).unwrap();
        assert_eq!((r.sd, r.regular), (None, false));
    }

    #[test]
    fn fixed_counts() {
        for (g, r, want) in [
            ([1, 3], 1, 4),
            ([1, 3], 2, 8),
            ([1, 3], 3, 12),
            ([3, 5], 2, 8),
            ([1, 9], 2, 10),
            ([1, 9], 3, 22),
        ] {
            let rep = fixed_vertices(&diag(&g, 2), r).unwrap();
            assert_eq!(rep.fixed_count, want, "{g:?} R={r}");
            assert!(rep.contains_apartment_ball && rep.closed_under_geodesics);
        }
        let rep = fixed_vertices(&diag(&[3, 3], 2), 2).unwrap();
        assert_eq!(rep.fixed_count, 10);
    }

    #[test]
    fn bounds_hold() {
        for g in [[1, 3], [3, 5], [1, 9]] {
            let rep = verify_fixpoint_bounds(&diag(&g, 2), 3).unwrap();
            assert!(rep.bounds.iter().all(|b| b.bound_b && b.bound_c), "{g:?}");
        }
    }

    #[test]
    fn hair_and_torus_distance() {
        let rep = hair_stability(&diag(&[1, 3], 2), &diag(&[1, 9], 2), 3).unwrap();
        assert!(rep.stable && rep.hypothesis_met);
        let ball = vertices_in_ball(2, 2, 2).unwrap();
        let mut seen = [false; 3];
        for v in &ball {
            let d = torus_distance(v, 2).unwrap();
            let k = d.floor() as usize;
            seen[k] = true;
            if v.in_standard_apartment() {
                assert_eq!(k, 0);
            }
        }
        assert_eq!(seen, [true, true, true]);
    }
}
