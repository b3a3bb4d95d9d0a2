//! Vertices of the building as homothety classes of lattices, in column Hermite normal form.

use crate::error::{Error, Result};
use crate::guard;
use crate::padic::modular::primitive_root_mod_p2;
use crate::padic::{max_digits, Padic, PadicMatrix, Valuation};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

/// Column HNF `H`: upper triangular, `H_ii = p^a_i`, `H_ij` reduced mod `p^a_i`, and the
/// class scaled so the lattice lies in `Z_p^n` but not in `p Z_p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VertexLattice {
    pub n: usize,
    pub p: u64,
    pub a: Vec<i64>,
    /// Strictly upper entries, row-major.
    pub h: Vec<u64>,
}

/// Digits carried by group elements acting on lattices.
pub fn working_digits(p: u64) -> u32 {
    (max_digits(p) - 2).min(30)
}

fn col_get(cols: &[Vec<Padic>], i: usize, j: usize) -> Padic {
    cols[j][i]
}

impl VertexLattice {
    /// Apartment vertex `x` (last coordinate 0): `sum p^(-x_i) Z_p e_i`.
    pub fn from_apartment(p: u64, x: &[i64]) -> Self {
        let n = x.len();
        let mx = *x.iter().max().expect("n >= 1");
        let a: Vec<i64> = x.iter().map(|&xi| mx - xi).collect();
        VertexLattice {
            n,
            p,
            a,
            h: vec![0; n * (n - 1) / 2],
        }
    }

    pub fn origin(n: usize, p: u64) -> Self {
        Self::from_apartment(p, &vec![0; n])
    }

    /// Coordinates `x_i = a_(n-1) - a_i`; they equal the apartment point for apartment vertices.
    pub fn coords(&self) -> Vec<i64> {
        let last = self.a[self.n - 1];
        self.a.iter().map(|&ai| last - ai).collect()
    }

    pub fn in_standard_apartment(&self) -> bool {
        self.h.iter().all(|&x| x == 0)
    }

    fn h_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn h_entry(&self, i: usize, j: usize) -> u64 {
        self.h[self.h_index(i, j)]
    }

    pub fn to_matrix(&self, prec: u32) -> PadicMatrix {
        let n = self.n;
        let mut m = PadicMatrix::zeros(n, self.p);
        for i in 0..n {
            m.set(i, i, Padic::p_power(self.p, self.a[i], prec));
            for j in i + 1..n {
                m.set(
                    i,
                    j,
                    Padic::from_int(self.h_entry(i, j) as i64, self.p, prec),
                );
            }
        }
        m
    }

    /// Class of the lattice spanned by the columns of `b`.
    pub fn from_basis(b: &PadicMatrix) -> Result<Self> {
        let n = b.n();
        let p = b.p();
        let idx = crate::padic::pick_pivot(b.entries().iter().copied().enumerate())?;
        let vmin = b.entries()[idx].val()?.finite().expect("nonzero pivot");
        let mut cols: Vec<Vec<Padic>> = (0..n)
            .map(|j| (0..n).map(|i| b.get(i, j).shift(-vmin)).collect())
            .collect();
        for i in (0..n).rev() {
            let c = crate::padic::pick_pivot((0..=i).map(|c| (c, col_get(&cols, i, c))))?;
            cols.swap(c, i);
            let lead = cols[i][i];
            let a = match lead.val()? {
                Valuation::Finite(v) => v,
                Valuation::Infinite => return Err(Error::SingularMatrix),
            };
            let scale = lead.unit()?.inv()?;
            for e in cols[i].iter_mut() {
                *e = e.mul(&scale);
            }
            let prec = lead.rel_prec().unwrap_or(1);
            cols[i][i] = Padic::p_power(p, a, prec);
            let pivot = Padic::p_power(p, a, prec);
            for c2 in 0..i {
                let f = cols[c2][i];
                if f.is_exact_zero() {
                    continue;
                }
                let q = f.div(&pivot)?;
                for r in 0..n {
                    cols[c2][r] = cols[c2][r].sub(&q.mul(&cols[i][r]));
                }
                cols[c2][i] = Padic::zero(p);
            }
        }
        let mut a = vec![0i64; n];
        for i in 0..n {
            a[i] = cols[i][i].val()?.finite().expect("pivot");
        }
        for i in (0..n).rev() {
            let modulus = a[i];
            for j in i + 1..n {
                let e = cols[j][i];
                let r = if modulus == 0 {
                    0
                } else {
                    e.residue(modulus as u32)?
                };
                let prec = e.rel_prec().unwrap_or(working_digits(p));
                let rp = Padic::from_int(r as i64, p, prec.max(1));
                let q = e.sub(&rp).shift(-modulus);
                if !q.is_exact_zero() {
                    for row in 0..n {
                        cols[j][row] = cols[j][row].sub(&q.mul(&cols[i][row]));
                    }
                }
                cols[j][i] = rp;
            }
        }
        let mut h = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                h.push(if a[i] == 0 {
                    0
                } else {
                    cols[j][i].residue(a[i] as u32)?
                });
            }
        }
        Ok(VertexLattice { n, p, a, h })
    }

    /// `g L`.
    pub fn act(&self, g: &PadicMatrix) -> Result<Self> {
        let prec = g
            .entries()
            .iter()
            .filter_map(|e| e.rel_prec())
            .max()
            .unwrap_or(working_digits(self.p));
        Self::from_basis(&g.mul(&self.to_matrix(prec)))
    }

    /// Sorted elementary divisor exponents of `other` relative to `self`, normalized to start at 0.
    pub fn relative_position(&self, other: &Self) -> Result<Vec<i64>> {
        let prec = working_digits(self.p);
        let m = self.to_matrix(prec).inverse()?.mul(&other.to_matrix(prec));
        let mut d = elementary_divisors(&m)?;
        let lo = d[0];
        for x in d.iter_mut() {
            *x -= lo;
        }
        Ok(d)
    }

    /// Edge-path distance in the 1-skeleton.
    pub fn distance(&self, other: &Self) -> Result<i64> {
        let d = self.relative_position(other)?;
        Ok(d[d.len() - 1])
    }
}

impl PartialOrd for VertexLattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on `(coords, a, h)`; coords alone do not separate classes off the apartment.
impl Ord for VertexLattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords()
            .cmp(&other.coords())
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.h.cmp(&other.h))
            .then_with(|| self.p.cmp(&other.p))
    }
}

/// Sorted valuations of the elementary divisors.
pub fn elementary_divisors(m: &PadicMatrix) -> Result<Vec<i64>> {
    let n = m.n();
    let mut a = m.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let cands: Vec<(usize, Padic)> = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .map(|(i, j)| (i * n + j, *a.get(i, j)))
            .collect();
        let idx = crate::padic::pick_pivot(cands.into_iter())?;
        let (pi, pj) = (idx / n, idx % n);
        a.swap_rows(pi, k);
        let t = a.transpose();
        let mut t = t;
        t.swap_rows(pj, k);
        a = t.transpose();
        let piv = *a.get(k, k);
        out.push(piv.val()?.finite().expect("nonzero pivot"));
        let inv = piv.inv()?;
        for i in k + 1..n {
            let f = a.get(i, k).mul(&inv);
            if f.is_exact_zero() {
                continue;
            }
            for j in k..n {
                let v = a.get(i, j).sub(&f.mul(a.get(k, j)));
                a.set(i, j, v);
            }
            a.set(i, k, Padic::zero(a.p()));
        }
        for j in k + 1..n {
            let f = a.get(k, j).mul(&inv);
            if f.is_exact_zero() {
                continue;
            }
            for i in k..n {
                let v = a.get(i, j).sub(&f.mul(a.get(i, k)));
                a.set(i, j, v);
            }
            a.set(k, j, Padic::zero(a.p()));
        }
    }
    out.sort();
    Ok(out)
}

/// Unit generators of `Z_p^x` as a topological group.
pub fn unit_generators(p: u64) -> Vec<i64> {
    if p == 2 {
        vec![-1, 5]
    } else {
        vec![primitive_root_mod_p2(p) as i64]
    }
}

/// Topological generators of `GL_n(Z_p)`: elementary matrices and diagonal unit generators.
pub fn k0_generators(n: usize, p: u64, prec: u32) -> Vec<PadicMatrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut g = PadicMatrix::identity(n, p, prec);
                g.set(i, j, Padic::one(p, prec));
                gens.push(g);
            }
        }
    }
    for i in 0..n {
        for u in unit_generators(p) {
            let mut g = PadicMatrix::identity(n, p, prec);
            g.set(i, i, Padic::from_int(u, p, prec));
            gens.push(g);
        }
    }
    gens
}

/// Apartment vertices with `max x - min x <= r`, last coordinate 0.
pub fn apartment_vertices(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut x = vec![-r; n - 1];
    loop {
        let mut full = x.clone();
        full.push(0);
        let mx = *full.iter().max().unwrap();
        let mn = *full.iter().min().unwrap();
        if mx - mn <= r {
            out.push(full);
        }
        let mut pos = 0;
        loop {
            if pos == n - 1 {
                return out;
            }
            x[pos] += 1;
            if x[pos] <= r {
                break;
            }
            x[pos] = -r;
            pos += 1;
        }
    }
}

/// Vertices at distance at most `r` from the origin, as the `GL_n(Z_p)`-orbit of the
/// apartment ball.
pub fn vertices_in_ball(n: usize, p: u64, r: i64) -> Result<Vec<VertexLattice>> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    let prec = working_digits(p);
    let gens = k0_generators(n, p, prec);
    let g = guard::enumeration_guard();
    let mut seen: BTreeSet<VertexLattice> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for x in apartment_vertices(n, r) {
        let v = VertexLattice::from_apartment(p, &x);
        if seen.insert(v.clone()) {
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for h in &gens {
            let w = v.act(h)?;
            if seen.insert(w.clone()) {
                guard::check_against(seen.len() as u128, g)?;
                queue.push_back(w);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_ball_sizes() {
        for (p, r, want) in [(2, 1, 4), (2, 2, 10), (2, 3, 22), (3, 2, 17)] {
            assert_eq!(
                vertices_in_ball(2, p, r).unwrap().len(),
                want,
                "p={p} r={r}"
            );
        }
    }

    #[test]
    fn apartment_roundtrip_and_distance() {
        let v = VertexLattice::from_apartment(3, &[2, -1, 0]);
        assert_eq!(v.coords(), vec![2, -1, 0]);
        let b = v.to_matrix(10);
        assert_eq!(VertexLattice::from_basis(&b).unwrap(), v);
        let o = VertexLattice::origin(3, 3);
        assert_eq!(o.distance(&v).unwrap(), 3);
        assert_eq!(o.relative_position(&v).unwrap(), vec![0, 2, 3]);
    }

    #[test]
    fn unipotent_moves_off_apartment() {
        let p = 2;
        let v = VertexLattice::from_apartment(p, &[-1, 0]);
        let g = PadicMatrix::from_ints(&[vec![1, 1], vec![0, 1]], p, 12);
        let w = v.act(&g).unwrap();
        assert!(!w.in_standard_apartment());
        assert_eq!(VertexLattice::origin(2, p).distance(&w).unwrap(), 1);
        assert_eq!(v.distance(&w).unwrap(), 2);
    }
}
