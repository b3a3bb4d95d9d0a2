//! `V^K(m)` for `V = Ind_B^G chi` (unnormalized): functions on `B \ G / K(m)`, coordinates
//! being values at the canonical flag-coset representatives.

use super::character::TorusCharacter;
use crate::apartment::ExtendedLevel;
use crate::error::{domain, precision, Error, Result};
use crate::field::Field;
use crate::gl::congruence::{membership, CongruenceSpec};
use crate::gl::cosets::enumerate;
use crate::gl::flags::{flag_cosets, reduce_flag, FlagCoset};
use crate::gl::lattice::{unit_generators, working_digits, VertexLattice};
use crate::guard;
use crate::linalg::Matrix;
use crate::padic::modular::ModRing;
use crate::padic::{iwasawa_decompose, Padic, PadicMatrix, Valuation};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Mutex;

pub type LinearOperator<F> = Matrix<F>;

/// `(T f)(x) = coeff[x] * f(target[x])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<F> {
    pub target: Vec<usize>,
    pub coeff: Vec<F>,
}

impl<F: Field> Monomial<F> {
    pub fn identity(d: usize) -> Self {
        Monomial {
            target: (0..d).collect(),
            coeff: vec![F::one(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn to_matrix(&self) -> Matrix<F> {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for x in 0..d {
            m[(x, self.target[x])] = self.coeff[x].clone();
        }
        m
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.dim()];
        self.target
            .iter()
            .all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_permutation() {
            return Err(Error::SingularMatrix);
        }
        let d = self.dim();
        let mut inv = Monomial {
            target: vec![0; d],
            coeff: vec![F::zero(); d],
        };
        for x in 0..d {
            let t = self.target[x];
            inv.target[t] = x;
            inv.coeff[t] = self.coeff[x].inv().ok_or(Error::SingularMatrix)?;
        }
        Ok(inv)
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        let d = self.dim();
        Monomial {
            target: (0..d).map(|x| other.target[self.target[x]]).collect(),
            coeff: (0..d)
                .map(|x| self.coeff[x].mul_ref(&other.coeff[self.target[x]]))
                .collect(),
        }
    }

    /// `self * a`.
    pub fn left_apply(&self, a: &Matrix<F>) -> Matrix<F> {
        let mut out = Matrix::<F>::zeros(a.rows(), a.cols());
        for x in 0..self.dim() {
            let c = &self.coeff[x];
            if c.is_zero() {
                continue;
            }
            for (j, v) in a.row(self.target[x]).iter().enumerate() {
                if !v.is_zero() {
                    out[(x, j)] = c.mul_ref(v);
                }
            }
        }
        out
    }

    /// `a * self`.
    pub fn right_apply(&self, a: &Matrix<F>) -> Matrix<F> {
        let mut out = Matrix::<F>::zeros(a.rows(), a.cols());
        for x in 0..self.dim() {
            let t = self.target[x];
            let c = &self.coeff[x];
            for i in 0..a.rows() {
                let v = &a[(i, x)];
                if !v.is_zero() {
                    out[(i, t)].add_mul(v, c);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> F {
        let mut t = F::zero();
        for x in 0..self.dim() {
            if self.target[x] == x {
                t = t + self.coeff[x].clone();
            }
        }
        t
    }

    /// `tr(a * self)`.
    pub fn trace_against(&self, a: &Matrix<F>) -> F {
        let mut t = F::zero();
        for x in 0..self.dim() {
            t.add_mul(&a[(self.target[x], x)], &self.coeff[x]);
        }
        t
    }
}

type SpecKey = (Vec<ExtendedLevel>, Vec<ExtendedLevel>);

fn key(spec: &CongruenceSpec) -> SpecKey {
    (spec.diag.clone(), spec.off.clone())
}

pub struct FiniteLevelRep<F: Field> {
    pub n: usize,
    pub p: u64,
    pub m: u32,
    pub chi: TorusCharacter,
    ring: ModRing,
    basis: Vec<FlagCoset>,
    index: HashMap<Vec<u64>, usize>,
    lifts: Vec<PadicMatrix>,
    cache: Mutex<HashMap<SpecKey, Matrix<F>>>,
}

/// Topological generators of a spec group: root elements `1 + p^t E_ij` and diagonal units.
pub fn spec_generators(spec: &CongruenceSpec, prec: u32) -> Vec<PadicMatrix> {
    let (n, p) = (spec.n, spec.p);
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if let Some(t) = spec.off_exp(i, j) {
                    let mut g = PadicMatrix::identity(n, p, prec);
                    g.set(i, j, Padic::p_power(p, t, prec));
                    gens.push(g);
                }
            }
        }
    }
    for i in 0..n {
        let units: Vec<i64> = match spec.diag_exp(i) {
            None => vec![],
            Some(0) => unit_generators(p),
            Some(1) if p == 2 => vec![-1, 5],
            Some(e) => vec![1 + (p as i64).pow(e as u32)],
        };
        for u in units {
            let mut g = PadicMatrix::identity(n, p, prec);
            g.set(i, i, Padic::from_int(u, p, prec));
            gens.push(g);
        }
    }
    gens
}

impl<F: Field> FiniteLevelRep<F> {
    /// The `K(m)`-invariants of `Ind_B^G chi`: one line per flag coset over `Z/p^m`
    /// on which `chi` is trivial on the stabilizer `B cap x K(m) x^-1`.
    pub fn principal_series(n: usize, p: u64, chi: TorusCharacter, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(domain("model precision must be >= 1"));
        }
        if chi.n() != n || chi.p != p {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: chi.n(),
            });
        }
        if chi.depth() > m {
            return Err(precision(format!(
                "character depth {} exceeds model precision {m}",
                chi.depth()
            )));
        }
        let ring = ModRing::new(p, m);
        let all = flag_cosets(n, p, m)?;
        // B cap x K(m) x^-1 = B cap K(m) has diagonal in 1 + p^m, where chi is trivial
        // exactly when depth <= m; the test is kept per coset for clarity.
        let u = 1 + pw(p, m);
        let stab_ok = chi
            .omega
            .iter()
            .all(|w| w.depth == 0 || w.exponent(u).map(|k| k == 0).unwrap_or(false));
        let basis: Vec<FlagCoset> = all.into_iter().filter(|_| stab_ok).collect();
        guard::check(basis.len() as u128 * basis.len() as u128)?;
        let w = working_digits(p);
        let lifts = basis
            .iter()
            .map(|c| PadicMatrix::from_residues(n, p, &c.entries, w))
            .collect();
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, c)| (c.entries.clone(), i))
            .collect();
        Ok(FiniteLevelRep {
            n,
            p,
            m,
            chi,
            ring,
            basis,
            index,
            lifts,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FlagCoset] {
        &self.basis
    }

    pub fn ring(&self) -> &ModRing {
        &self.ring
    }

    /// For `k` in `GL_n(Z/p^m)`: `k = b z` with `z` canonical; returns `(z, chi(b))`.
    pub fn reduce(&self, k: &[u64]) -> Result<(usize, F)> {
        let red = reduce_flag(&self.ring, self.n, k)?;
        let idx = *self
            .index
            .get(&red.coset.entries)
            .ok_or_else(|| domain("flag coset missing from the model"))?;
        let c = self.chi.value::<F>(&vec![0; self.n], &red.b_diag)?;
        Ok((idx, c))
    }

    /// `f(y) = coeff * f(z)` for every `f` in the model: Iwasawa `y = b k`, then `k = b' z`.
    pub fn locate(&self, y: &PadicMatrix) -> Result<(usize, F)> {
        let d = iwasawa_decompose(y)?;
        let kres = d.k.residues(self.m)?;
        let (idx, c) = self.reduce(&kres)?;
        let dep = self.chi.depth().max(1);
        let mut vals = vec![0i64; self.n];
        let mut units = vec![1u64; self.n];
        for i in 0..self.n {
            let bi = d.b.get(i, i);
            vals[i] = match bi.val()? {
                Valuation::Finite(v) => v,
                Valuation::Infinite => return Err(Error::SingularMatrix),
            };
            if self.chi.depth() > 0 {
                units[i] = bi.unit()?.residue(dep)?;
            }
        }
        Ok((idx, c * self.chi.value::<F>(&vals, &units)?))
    }

    /// The operator on `GL_n(Z/p^m)` residues.
    pub fn act_residues(&self, k: &[u64]) -> Result<Monomial<F>> {
        let mut target = Vec::with_capacity(self.dim());
        let mut coeff = Vec::with_capacity(self.dim());
        for c in &self.basis {
            let (t, v) = self.reduce(&self.ring.mat_mul(self.n, &c.entries, k))?;
            target.push(t);
            coeff.push(v);
        }
        Ok(Monomial { target, coeff })
    }

    /// `(A_g f)(x) = f(x g)`, sampled at the canonical representatives through the Iwasawa
    /// decomposition. Equals `pi(g)` for `g` in `Z K_0`; for other `g` it satisfies
    /// `A_(g k) = A_g pi(k)` for `k` in `K_0` but is not multiplicative in general.
    pub fn act(&self, g: &PadicMatrix) -> Result<Monomial<F>> {
        if g.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: g.n(),
            });
        }
        if let Some((v, k)) = split_center(g)? {
            let z = self.chi.value::<F>(&vec![v; self.n], &vec![1; self.n])?;
            let mut mono = self.act_residues(&k.residues(self.m)?)?;
            for c in mono.coeff.iter_mut() {
                *c = c.mul_ref(&z);
            }
            return Ok(mono);
        }
        let mut target = Vec::with_capacity(self.dim());
        let mut coeff = Vec::with_capacity(self.dim());
        for x in &self.lifts {
            let (t, c) = self.locate(&x.mul(g))?;
            target.push(t);
            coeff.push(c);
        }
        Ok(Monomial { target, coeff })
    }

    /// `e_K` for a group containing `K(m)`.
    pub fn idempotent(&self, spec: &CongruenceSpec) -> Result<Matrix<F>> {
        if spec.n != self.n || spec.p != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: spec.n,
            });
        }
        match spec.level_needed() {
            Some(l) if l <= self.m as i64 => {}
            Some(l) => {
                return Err(precision(format!(
                    "{} needs model precision {l}, have {}",
                    spec.provenance, self.m
                )))
            }
            None => {
                return Err(domain(format!(
                    "{} contains no principal congruence subgroup",
                    spec.provenance
                )))
            }
        }
        let k = key(spec);
        if let Some(e) = self.cache.lock().expect("cache").get(&k) {
            return Ok(e.clone());
        }
        let e = if spec.within_k0() {
            if spec.has_iwahori_factorization() && spec.is_concave() {
                self.factored_idempotent(spec)?
            } else {
                self.enumerated_idempotent(spec)?
            }
        } else {
            self.induced_idempotent(spec)?
        };
        self.cache.lock().expect("cache").insert(k, e.clone());
        Ok(e)
    }

    /// `e_K = e_(U-) e_H e_(U+)`, each a product of one-parameter averages.
    fn factored_idempotent(&self, spec: &CongruenceSpec) -> Result<Matrix<F>> {
        let (n, m) = (self.n, self.m as i64);
        let r = &self.ring;
        let mut factors: Vec<Vec<Vec<u64>>> = Vec::new();
        let root = |i: usize, j: usize, t: i64| -> Vec<Vec<u64>> {
            let step = pw(self.p, t.max(0) as u32);
            (0..r.q / step)
                .map(|a| {
                    let mut g = r.identity(n);
                    g[i * n + j] = a * step;
                    g
                })
                .collect()
        };
        for i in 0..n {
            for j in 0..i {
                if let Some(t) = spec.off_exp(i, j) {
                    if t < m {
                        factors.push(root(i, j, t));
                    }
                }
            }
        }
        for i in 0..n {
            if let Some(e) = spec.diag_exp(i) {
                if e < m {
                    let units: Vec<u64> = if e == 0 {
                        (1..r.q).filter(|&u| r.is_unit(u)).collect()
                    } else {
                        let step = pw(self.p, e as u32);
                        (0..r.q / step).map(|a| (1 + a * step) % r.q).collect()
                    };
                    factors.push(
                        units
                            .into_iter()
                            .map(|u| {
                                let mut g = r.identity(n);
                                g[i * n + i] = u;
                                g
                            })
                            .collect(),
                    );
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if let Some(t) = spec.off_exp(i, j) {
                    if t < m {
                        factors.push(root(i, j, t));
                    }
                }
            }
        }
        let d = self.dim();
        guard::check(factors.iter().map(|f| f.len() as u128).sum::<u128>() * (d * d) as u128)?;
        let mut a = Matrix::identity(d);
        for f in factors.iter().rev() {
            let monos: Vec<Monomial<F>> = f
                .iter()
                .map(|g| self.act_residues(g))
                .collect::<Result<_>>()?;
            a = average_left(&monos, &a);
        }
        Ok(a)
    }

    fn enumerated_idempotent(&self, spec: &CongruenceSpec) -> Result<Matrix<F>> {
        let d = self.dim();
        let elems = enumerate(spec, self.m as i64)?;
        guard::check(elems.len() as u128 * d as u128)?;
        let monos: Vec<Monomial<F>> = elems
            .iter()
            .map(|g| self.act_residues(g))
            .collect::<Result<_>>()?;
        Ok(average_left(&monos, &Matrix::identity(d)))
    }

    /// `e_K = avg_c A_c e_(K cap K0)` over `c` in `K / (K cap K0)`, read off the `K`-orbit of
    /// the origin.
    fn induced_idempotent(&self, spec: &CongruenceSpec) -> Result<Matrix<F>> {
        let inner = self.idempotent(&spec.intersect_k0())?;
        let reps = orbit_representatives(spec)?;
        let d = self.dim();
        let mut acc = Matrix::<F>::zeros(d, d);
        for c in &reps {
            for (x, lift) in self.lifts.iter().enumerate() {
                let (t, coef) = self.locate(&lift.mul(c))?;
                for j in 0..d {
                    let v = &inner[(t, j)];
                    if !v.is_zero() {
                        acc[(x, j)].add_mul(&coef, v);
                    }
                }
            }
        }
        let inv = F::from_i64(reps.len() as i64).inv().expect("nonzero");
        Ok(acc.scale(&inv))
    }

    /// Basis of `V^K`, normalized at its pivot rows.
    pub fn invariants(&self, spec: &CongruenceSpec) -> Result<(Matrix<F>, Vec<usize>)> {
        Ok(self.idempotent(spec)?.column_space())
    }

    pub fn invariants_dim(&self, spec: &CongruenceSpec) -> Result<usize> {
        Ok(self.idempotent(spec)?.rank())
    }

    /// `dim V^K` for `K` inside `K0`, by walking `K`-orbits on basis lines and keeping the
    /// orbits whose cocycle closes up; independent of the idempotent.
    pub fn orbit_invariant_count(&self, spec: &CongruenceSpec) -> Result<usize> {
        if !spec.within_k0() {
            return Err(domain("orbit oracle needs a group inside K0"));
        }
        let gens: Vec<Monomial<F>> = spec_generators(spec, working_digits(self.p))
            .iter()
            .map(|g| self.act_residues(&g.residues(self.m)?))
            .collect::<Result<_>>()?;
        let d = self.dim();
        let mut val: Vec<Option<F>> = vec![None; d];
        let mut count = 0;
        for start in 0..d {
            if val[start].is_some() {
                continue;
            }
            val[start] = Some(F::one());
            let mut ok = true;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let fx = val[x].clone().expect("visited");
                for g in &gens {
                    // f = pi(g) f  =>  f(x) = coeff(x) f(target(x))
                    let want = fx.clone() / g.coeff[x].clone();
                    let t = g.target[x];
                    match &val[t] {
                        Some(v) => ok &= *v == want,
                        None => {
                            val[t] = Some(want);
                            queue.push_back(t);
                        }
                    }
                }
            }
            if ok {
                count += 1;
            }
        }
        Ok(count)
    }

    /// `chi_K(g) = tr(e_K pi(g) e_K)` from the pivot-normalized basis `b_j` of `V^K`:
    /// `sum_j avg_c b_j(x_j c g)` over `c` in `K / (K cap g K g^-1)`.
    pub fn chi_k(&self, g: &PadicMatrix, spec: &CongruenceSpec) -> Result<F> {
        let (basis, pivots) = self.invariants(spec)?;
        let reps = double_coset_reps(spec, g)?;
        let mut acc = F::zero();
        for (j, &xj) in pivots.iter().enumerate() {
            for c in &reps {
                let (t, coef) = self.locate(&self.lifts[xj].mul(c).mul(g))?;
                acc.add_mul(&coef, &basis[(t, j)]);
            }
        }
        Ok(acc / F::from_i64(reps.len() as i64))
    }

    /// `tr(e_K pi(g))` for `g` in `Z K_0`.
    pub fn chi_k_trace(&self, g: &PadicMatrix, spec: &CongruenceSpec) -> Result<F> {
        if split_center(g)?.is_none() {
            return Err(domain("trace form needs g in Z K0"));
        }
        Ok(self.act(g)?.trace_against(&self.idempotent(spec)?))
    }

    /// Trace of `pi(g)` on the span of `basis` (pivot-normalized), for `g` normalizing the
    /// group whose invariants it spans.
    pub fn trace_on(&self, g: &PadicMatrix, basis: &Matrix<F>, pivots: &[usize]) -> Result<F> {
        let mut acc = F::zero();
        for (j, &xj) in pivots.iter().enumerate() {
            let (t, coef) = self.locate(&self.lifts[xj].mul(g))?;
            acc.add_mul(&coef, &basis[(t, j)]);
        }
        Ok(acc)
    }

    pub fn lift(&self, idx: usize) -> &PadicMatrix {
        &self.lifts[idx]
    }
}

fn pw(p: u64, k: u32) -> u64 {
    p.pow(k)
}

/// `g = p^v k` with `k` in `GL_n(Z_p)`, if possible.
pub fn split_center(g: &PadicMatrix) -> Result<Option<(i64, PadicMatrix)>> {
    let v = match g.min_val_lower_bound() {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(Error::SingularMatrix),
    };
    let k = PadicMatrix::from_entries(
        g.n(),
        g.p(),
        g.entries().iter().map(|e| e.shift(-v)).collect(),
    );
    if k.in_k0()? {
        Ok(Some((v, k)))
    } else {
        Ok(None)
    }
}

/// `(1/N) sum_k T_k a`.
fn average_left<F: Field>(monos: &[Monomial<F>], a: &Matrix<F>) -> Matrix<F> {
    let d = a.rows();
    let mut out = Matrix::<F>::zeros(d, a.cols());
    let inv = F::from_i64(monos.len() as i64).inv().expect("nonempty");
    for x in 0..d {
        let mut row: BTreeMap<usize, F> = BTreeMap::new();
        for t in monos {
            let e = row.entry(t.target[x]).or_insert_with(F::zero);
            *e = e.clone() + t.coeff[x].clone();
        }
        for (y, c) in row {
            if c.is_zero() {
                continue;
            }
            let c = c * inv.clone();
            for (j, v) in a.row(y).iter().enumerate() {
                if !v.is_zero() {
                    out[(x, j)].add_mul(&c, v);
                }
            }
        }
    }
    out
}

/// Representatives of `K / (K cap K0)`: group elements carrying the origin through its
/// `K`-orbit.
pub fn orbit_representatives(spec: &CongruenceSpec) -> Result<Vec<PadicMatrix>> {
    let (n, p) = (spec.n, spec.p);
    let prec = working_digits(p);
    let gens: Vec<PadicMatrix> = spec_generators(spec, prec)
        .into_iter()
        .filter(|g| !g.in_k0().unwrap_or(false))
        .collect();
    let o = VertexLattice::origin(n, p);
    let mut seen: HashMap<VertexLattice, usize> = HashMap::from([(o.clone(), 0)]);
    let mut reps = vec![PadicMatrix::identity(n, p, prec)];
    let mut verts = vec![o];
    let bound = guard::enumeration_guard();
    let mut i = 0;
    while i < reps.len() {
        for g in &gens {
            let c = g.mul(&reps[i]);
            let v = verts[i].act(g)?;
            if !seen.contains_key(&v) {
                guard::check_against(reps.len() as u128 + 1, bound)?;
                seen.insert(v.clone(), reps.len());
                reps.push(c);
                verts.push(v);
            }
        }
        i += 1;
    }
    Ok(reps)
}

/// Representatives of `K / (K cap g K g^-1)`.
pub fn double_coset_reps(spec: &CongruenceSpec, g: &PadicMatrix) -> Result<Vec<PadicMatrix>> {
    let (n, p) = (spec.n, spec.p);
    let prec = working_digits(p);
    let gens = spec_generators(spec, prec);
    let g_inv = g.inverse()?;
    let same = |a: &PadicMatrix, b: &PadicMatrix| -> Result<bool> {
        membership(&g_inv.mul(&a.inverse()?).mul(b).mul(g), spec)
    };
    let mut reps = vec![PadicMatrix::identity(n, p, prec)];
    let bound = guard::enumeration_guard();
    let mut i = 0;
    while i < reps.len() {
        for h in &gens {
            let c = h.mul(&reps[i]);
            let mut new = true;
            for r in &reps {
                if same(r, &c)? {
                    new = false;
                    break;
                }
            }
            if new {
                guard::check_against(reps.len() as u128 + 1, bound)?;
                reps.push(c);
            }
        }
        i += 1;
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apartment::ApartmentPoint;
    use crate::field::Rational;
    use crate::gl::congruence::{filtration_spec, level};

    fn q(v: i64) -> Rational {
        Rational::integer(v)
    }

    fn trivial(n: usize, p: u64, m: u32) -> FiniteLevelRep<Rational> {
        FiniteLevelRep::principal_series(n, p, TorusCharacter::trivial(n, p), m).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(trivial(2, 2, 1).dim(), 3);
        assert_eq!(trivial(2, 2, 2).dim(), 6);
        let chi = TorusCharacter::parse("legendre", 2, 3).unwrap();
        assert_eq!(
            FiniteLevelRep::<Rational>::principal_series(2, 3, chi, 1)
                .unwrap()
                .dim(),
            4
        );
        let chi = TorusCharacter::parse("mod4", 2, 2).unwrap();
        assert!(FiniteLevelRep::<Rational>::principal_series(2, 2, chi, 1).is_err());
    }

    #[test]
    fn action_examples() {
        let rep = trivial(2, 2, 2);
        let id = PadicMatrix::identity(2, 2, 20);
        assert_eq!(rep.act(&id).unwrap(), Monomial::identity(6));
        let g = PadicMatrix::from_ints(&[vec![1, 0], vec![0, 3]], 2, 20);
        let a = rep.act(&g).unwrap();
        assert!(a.is_permutation());
        assert_eq!(a.trace(), q(4));
        let chi = TorusCharacter::unramified_sign(2, 2);
        let rep = FiniteLevelRep::<Rational>::principal_series(2, 2, chi, 2).unwrap();
        let z = PadicMatrix::diag_p_powers(&[1, 1], 2, 20);
        assert_eq!(rep.act(&z).unwrap().to_matrix(), Matrix::scalar(6, q(-1)));
    }

    #[test]
    fn right_equivariance_of_sampled_action() {
        let p = 2;
        let chi = TorusCharacter::unramified_sign(2, p);
        let rep = FiniteLevelRep::<Rational>::principal_series(2, p, chi, 3).unwrap();
        let g = PadicMatrix::from_ints(&[vec![2, 1], vec![0, 3]], p, 20);
        let k = PadicMatrix::from_ints(&[vec![1, 2], vec![5, 3]], p, 20);
        let lhs = rep.act(&g.mul(&k)).unwrap();
        let rhs = rep.act(&g).unwrap().compose(&rep.act(&k).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn idempotent_examples() {
        let rep = trivial(2, 2, 2);
        let e = rep.idempotent(&CongruenceSpec::principal(2, 2, 2)).unwrap();
        assert_eq!(e, Matrix::identity(6));
        let e = rep.idempotent(&CongruenceSpec::k0(2, 2)).unwrap();
        assert_eq!(e.mul(&e), e);
        assert_eq!(e.rank(), 1);
        let o = ApartmentPoint::origin(2).into();
        let u0 = filtration_spec(2, &o, &level(0)).unwrap();
        assert_eq!(rep.invariants_dim(&u0).unwrap(), 3);
        assert_eq!(rep.orbit_invariant_count(&u0).unwrap(), 3);
    }

    #[test]
    fn induced_idempotent_far_vertex() {
        let p = 2;
        let rep = trivial(2, p, 4);
        let x: crate::apartment::Omega = ApartmentPoint::from_ints(&[2, 0]).unwrap().into();
        let spec = filtration_spec(p, &x, &level(0)).unwrap();
        assert!(!spec.within_k0());
        let e = rep.idempotent(&spec).unwrap();
        assert_eq!(e.mul(&e), e);
        // U_x^(0) is conjugate to U_o^(0) = K(1), whose invariants have dimension 3
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn chi_k_agrees_with_trace() {
        let p = 2;
        let rep = trivial(2, p, 3);
        let g = PadicMatrix::from_ints(&[vec![1, 0], vec![0, 3]], p, 20);
        let k = CongruenceSpec::principal(2, p, 2);
        assert_eq!(rep.chi_k(&g, &k).unwrap(), q(4));
        assert_eq!(rep.chi_k_trace(&g, &k).unwrap(), q(4));
        let id = PadicMatrix::identity(2, p, 20);
        assert_eq!(rep.chi_k(&id, &k).unwrap(), q(6));
    }
}
