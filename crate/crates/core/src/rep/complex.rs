//! The chain complex `C_d(Sigma; V) = sum over d-facets of V^(U_sigma^(e))`, Euler
//! idempotents and the polysimplicial trace.

use super::model::FiniteLevelRep;
use crate::apartment::ApartmentPoint;
use crate::apartment::Omega;
use crate::error::{domain, Error, Result};
use crate::field::Field;
use crate::gl::building::BuildingComplex;
use crate::gl::congruence::{filtration_spec, level, CongruenceSpec};
use crate::gl::lattice::VertexLattice;
use crate::linalg::Matrix;
use crate::padic::PadicMatrix;
use serde::Serialize;

/// `U_sigma^(e)` for the apartment facet underlying a building facet.
fn base_spec(c: &BuildingComplex, idx: usize, e: i64) -> Result<CongruenceSpec> {
    filtration_spec(c.p, &Omega::Facet(c.facets[idx].base.clone()), &level(e))
}

/// Model precision needed for every `U_sigma^(e)` on `c`.
pub fn required_precision(c: &BuildingComplex, e: i64) -> Result<u32> {
    let mut m = 1;
    for i in 0..c.facets.len() {
        let l = base_spec(c, i, e)?
            .level_needed()
            .ok_or_else(|| domain("filtration group without a congruence level"))?;
        m = m.max(l);
    }
    Ok(m as u32)
}

/// `U_o^(r)`.
pub fn origin_spec(n: usize, p: u64, r: i64) -> Result<CongruenceSpec> {
    filtration_spec(p, &ApartmentPoint::origin(n).into(), &level(r))
}

/// `e_(U_sigma^(e)) = pi(w) e_(U_sigma'^(e)) pi(w)^-1` with `w` the facet witness.
pub fn facet_idempotents<F: Field>(
    rep: &FiniteLevelRep<F>,
    c: &BuildingComplex,
    e: i64,
) -> Result<Vec<Matrix<F>>> {
    check_rep(rep, c)?;
    let q = rep.ring().q;
    (0..c.facets.len())
        .map(|i| {
            let base = rep.idempotent(&base_spec(c, i, e)?)?;
            let w: Vec<u64> = c.facets[i].witness.iter().map(|x| x % q).collect();
            if w == rep.ring().identity(c.n) {
                return Ok(base);
            }
            let t = rep.act_residues(&w)?;
            Ok(t.inverse()?.right_apply(&t.left_apply(&base)))
        })
        .collect()
}

fn check_rep<F: Field>(rep: &FiniteLevelRep<F>, c: &BuildingComplex) -> Result<()> {
    if rep.n != c.n || rep.p != c.p {
        return Err(Error::DimensionMismatch {
            expected: rep.n,
            got: c.n,
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FacetSpace<F: Field> {
    pub facet: usize,
    pub basis: Matrix<F>,
    pub pivots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ChainComplexData<F: Field> {
    pub e: i64,
    /// `spaces[d]`: the summands of `C_d`, in facet order.
    pub spaces: Vec<Vec<FacetSpace<F>>>,
    /// `boundaries[d - 1] = d_d : C_d -> C_(d-1)`.
    pub boundaries: Vec<Matrix<F>>,
    /// `C_0 -> V`.
    pub augmentation: Matrix<F>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub shape: String,
    pub e: i64,
    pub character: String,
    pub chain_dims: Vec<usize>,
    pub boundary_ranks: Vec<usize>,
    pub homology: Vec<usize>,
    pub boundary_squared_zero: bool,
    /// `V^(U_sigma)` lies in `V^(U_tau)` for every face `tau` of `sigma`.
    pub coefficients_nested: bool,
    pub vertex_sum_rank: usize,
    pub exact: bool,
}

fn block_offsets<F: Field>(spaces: &[FacetSpace<F>]) -> Vec<usize> {
    let mut off = Vec::with_capacity(spaces.len() + 1);
    let mut acc = 0;
    off.push(0);
    for s in spaces {
        acc += s.pivots.len();
        off.push(acc);
    }
    off
}

pub fn chain_complex<F: Field>(
    c: &BuildingComplex,
    e: i64,
    rep: &FiniteLevelRep<F>,
) -> Result<(ChainComplexData<F>, HomologyReport)> {
    let idem = facet_idempotents(rep, c, e)?;
    let top = c.top_dim();
    let mut spaces: Vec<Vec<FacetSpace<F>>> = vec![Vec::new(); top + 1];
    let mut where_: Vec<(usize, usize)> = vec![(0, 0); c.facets.len()];
    for (i, f) in c.facets.iter().enumerate() {
        let (basis, pivots) = idem[i].column_space();
        let d = f.dim();
        where_[i] = (d, spaces[d].len());
        spaces[d].push(FacetSpace {
            facet: i,
            basis,
            pivots,
        });
    }
    let offsets: Vec<Vec<usize>> = spaces.iter().map(|s| block_offsets(s)).collect();
    let dims: Vec<usize> = offsets
        .iter()
        .map(|o| *o.last().expect("nonempty"))
        .collect();
    let mut nested = true;
    let mut boundaries = Vec::with_capacity(top);
    for d in 1..=top {
        let mut b = Matrix::<F>::zeros(dims[d - 1], dims[d]);
        for (k, s) in spaces[d].iter().enumerate() {
            for (sign, tau) in c.boundary(s.facet)? {
                let (_, tk) = where_[tau];
                let t = &spaces[d - 1][tk];
                let row0 = offsets[d - 1][tk];
                for j in 0..s.pivots.len() {
                    let col = offsets[d][k] + j;
                    let coords: Vec<F> = t
                        .pivots
                        .iter()
                        .map(|&pv| s.basis[(pv, j)].clone())
                        .collect();
                    if nested {
                        let back = t.basis.mul_vec(&coords);
                        nested = (0..back.len()).all(|r| back[r] == s.basis[(r, j)]);
                    }
                    for (r, v) in coords.into_iter().enumerate() {
                        if !v.is_zero() {
                            b[(row0 + r, col)] = if sign > 0 { v } else { -v };
                        }
                    }
                }
            }
        }
        boundaries.push(b);
    }
    let mut aug = Matrix::<F>::zeros(rep.dim(), dims[0]);
    for (k, s) in spaces[0].iter().enumerate() {
        for j in 0..s.pivots.len() {
            for r in 0..rep.dim() {
                aug[(r, offsets[0][k] + j)] = s.basis[(r, j)].clone();
            }
        }
    }
    let ranks: Vec<usize> = boundaries.iter().map(|b| b.rank()).collect();
    let mut homology = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let in_rank = if d < top { ranks[d] } else { 0 };
        let out_rank = if d > 0 { ranks[d - 1] } else { 0 };
        homology.push(dims[d] - out_rank - in_rank);
    }
    let sq_zero = (1..boundaries.len()).all(|d| boundaries[d - 1].mul(&boundaries[d]).is_zero())
        && (boundaries.is_empty() || aug.mul(&boundaries[0]).is_zero());
    let vertex_sum_rank = aug.rank();
    let exact = sq_zero
        && nested
        && homology[0] == vertex_sum_rank
        && homology[1..].iter().all(|&h| h == 0);
    let report = HomologyReport {
        shape: format!("{:?}", c.shape),
        e,
        character: rep.chi.label(),
        chain_dims: dims,
        boundary_ranks: ranks,
        homology,
        boundary_squared_zero: sq_zero,
        coefficients_nested: nested,
        vertex_sum_rank,
        exact,
    };
    Ok((
        ChainComplexData {
            e,
            spaces,
            boundaries,
            augmentation: aug,
        },
        report,
    ))
}

/// `u = sum_sigma (-1)^dim(sigma) e_(U_sigma^(e))`.
pub fn euler_idempotent<F: Field>(
    c: &BuildingComplex,
    e: i64,
    rep: &FiniteLevelRep<F>,
) -> Result<Matrix<F>> {
    let idem = facet_idempotents(rep, c, e)?;
    Ok(alternating_sum(c, &idem, rep.dim()))
}

fn alternating_sum<F: Field>(c: &BuildingComplex, idem: &[Matrix<F>], d: usize) -> Matrix<F> {
    let mut u = Matrix::<F>::zeros(d, d);
    let minus = -F::one();
    for (i, f) in c.facets.iter().enumerate() {
        if f.dim() % 2 == 0 {
            u.add_scaled(&F::one(), &idem[i]);
        } else {
            u.add_scaled(&minus, &idem[i]);
        }
    }
    u
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerReport {
    pub shape: String,
    pub e: i64,
    pub rank: usize,
    pub idempotent: bool,
    /// `u` fixes every vector of `sum_x V^(U_x)` and has that rank.
    pub image_is_vertex_sum: bool,
    /// `e_x (1 - u) = 0` for every vertex and `dim ker u = dim cap_x ker e_x`.
    pub kernel_is_common_kernel: bool,
}

pub fn euler_report<F: Field>(
    c: &BuildingComplex,
    e: i64,
    rep: &FiniteLevelRep<F>,
) -> Result<(Matrix<F>, EulerReport)> {
    let idem = facet_idempotents(rep, c, e)?;
    let d = rep.dim();
    let u = alternating_sum(c, &idem, d);
    let verts = c.indices_of_dim(0);
    let vbases: Vec<Matrix<F>> = verts.iter().map(|&i| idem[i].column_space().0).collect();
    let sum = Matrix::hstack(&vbases.iter().collect::<Vec<_>>());
    let rank = u.rank();
    let image = u.mul(&sum) == sum && rank == sum.rank();
    let one_minus = Matrix::identity(d).sub(&u);
    let stacked = Matrix::vstack(&verts.iter().map(|&i| &idem[i]).collect::<Vec<_>>());
    let kernel = verts.iter().all(|&i| idem[i].mul(&one_minus).is_zero()) && stacked.rank() == rank;
    let report = EulerReport {
        shape: format!("{:?}", c.shape),
        e,
        rank,
        idempotent: u.mul(&u) == u,
        image_is_vertex_sum: image,
        kernel_is_common_kernel: kernel,
    };
    Ok((u, report))
}

fn contains_complex(big: &BuildingComplex, small: &BuildingComplex) -> bool {
    small
        .facets
        .iter()
        .all(|f| big.index_of(&f.vertices).is_some())
}

/// `e_(U_o^(r)) u_Sigma = e_(U_o^(r)) u_(B_(r-e))`.
pub fn cancellation_check<F: Field>(
    r: i64,
    e: i64,
    c: &BuildingComplex,
    rep: &FiniteLevelRep<F>,
) -> Result<bool> {
    if r < e {
        return Err(domain(format!("need r >= e, got r = {r}, e = {e}")));
    }
    let ball = BuildingComplex::ball(c.n, c.p, r - e)?;
    if !contains_complex(c, &ball) {
        return Err(Error::NotContained(format!(
            "B_{} in the given complex",
            r - e
        )));
    }
    let er = rep.idempotent(&origin_spec(c.n, c.p, r)?)?;
    let lhs = er.mul(&euler_idempotent(c, e, rep)?);
    let rhs = er.mul(&euler_idempotent(&ball, e, rep)?);
    Ok(lhs == rhs)
}

/// `u_Sigma^(e)` is the identity on the image of `e_(U_o^(r))`.
pub fn level_check<F: Field>(
    e: i64,
    r: i64,
    c: &BuildingComplex,
    rep: &FiniteLevelRep<F>,
) -> Result<bool> {
    if r < e {
        return Err(domain(format!("need r >= e, got r = {r}, e = {e}")));
    }
    let ball = BuildingComplex::ball(c.n, c.p, r - e)?;
    if !contains_complex(c, &ball) {
        return Err(Error::NotContained(format!(
            "B_{} in the given complex",
            r - e
        )));
    }
    let er = rep.idempotent(&origin_spec(c.n, c.p, r)?)?;
    Ok(euler_idempotent(c, e, rep)?.mul(&er) == er)
}

/// Sign of the permutation sorting `images` into `original` order.
fn permutation_sign(original: &[VertexLattice], images: &[VertexLattice]) -> Result<i64> {
    let mut perm: Vec<usize> = images
        .iter()
        .map(|v| {
            original
                .iter()
                .position(|w| w == v)
                .ok_or_else(|| domain("facet not fixed"))
        })
        .collect::<Result<_>>()?;
    let mut sign = 1;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            sign = -sign;
        }
    }
    Ok(sign)
}

#[derive(Clone, Debug, Serialize)]
pub struct TauTerm {
    pub facet: Vec<Vec<i64>>,
    pub dim: usize,
    pub epsilon: i64,
    pub trace: String,
}

/// `tau_Sigma(g) = sum over g-fixed facets of (-1)^dim eps_sigma(g) tr(pi(g) | V^(U_sigma^(e)))`.
pub fn tau_sigma<F: Field>(
    g: &PadicMatrix,
    c: &BuildingComplex,
    e: i64,
    rep: &FiniteLevelRep<F>,
) -> Result<(F, Vec<TauTerm>)> {
    check_rep(rep, c)?;
    let idem = facet_idempotents(rep, c, e)?;
    let mut total = F::zero();
    let mut terms = Vec::new();
    for (i, f) in c.facets.iter().enumerate() {
        let images: Vec<VertexLattice> =
            f.vertices.iter().map(|v| v.act(g)).collect::<Result<_>>()?;
        let mut sorted = images.clone();
        sorted.sort();
        if c.index_of(&sorted).is_none() {
            return Err(Error::NotContained(
                "the complex is not stable under g".into(),
            ));
        }
        if sorted != f.vertices {
            continue;
        }
        let eps = permutation_sign(&f.vertices, &images)?;
        let (basis, pivots) = idem[i].column_space();
        let tr = rep.trace_on(g, &basis, &pivots)?;
        let mut term = if eps > 0 { tr.clone() } else { -tr.clone() };
        if f.dim() % 2 == 1 {
            term = -term;
        }
        total = total + term;
        terms.push(TauTerm {
            facet: f.vertices.iter().map(|v| v.coords()).collect(),
            dim: f.dim(),
            epsilon: eps,
            trace: tr.to_string(),
        });
    }
    Ok((total, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apartment::facet_of;
    use crate::field::Rational;
    use crate::rep::TorusCharacter;

    fn trivial(p: u64, m: u32) -> FiniteLevelRep<Rational> {
        FiniteLevelRep::principal_series(2, p, TorusCharacter::trivial(2, p), m).unwrap()
    }

    #[test]
    fn single_vertex_and_edge() {
        let p = 2;
        let rep = trivial(p, 3);
        let o = BuildingComplex::ball(2, p, 0).unwrap();
        let (_, h) = chain_complex(&o, 0, &rep).unwrap();
        assert_eq!(h.homology, vec![3]);
        let edge = facet_of(&crate::apartment::barycenter(&[vec![0, 0], vec![1, 0]]));
        let c = BuildingComplex::closed_facet(p, &edge);
        let (data, h) = chain_complex(&c, 0, &rep).unwrap();
        assert!(h.exact, "{h:?}");
        assert_eq!(data.boundaries[0].rank(), h.chain_dims[1]);
        let (u, er) = euler_report(&c, 0, &rep).unwrap();
        assert!(er.idempotent && er.image_is_vertex_sum && er.kernel_is_common_kernel);
        assert_eq!(u.rank(), h.homology[0]);
    }

    #[test]
    fn ball_one_euler_characteristic() {
        let p = 3;
        let rep = trivial(p, 3);
        let b = BuildingComplex::ball(2, p, 1).unwrap();
        let (_, h) = chain_complex(&b, 0, &rep).unwrap();
        assert!(h.exact, "{h:?}");
        assert_eq!(h.chain_dims[0] - h.chain_dims[1], h.homology[0]);
    }

    #[test]
    fn tau_identity_is_euler_sum() {
        let p = 2;
        let rep = trivial(p, 3);
        let b = BuildingComplex::ball(2, p, 1).unwrap();
        let (_, h) = chain_complex(&b, 0, &rep).unwrap();
        let id = PadicMatrix::identity(2, p, 20);
        let (t, _) = tau_sigma(&id, &b, 0, &rep).unwrap();
        assert_eq!(t, Rational::integer(h.homology[0] as i64));
    }
}
