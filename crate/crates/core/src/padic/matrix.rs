use super::scalar::{Padic, Tri, Valuation};
use crate::error::{precision, Error, Result};
use std::fmt;

/// Square matrix over `Q_p` at finite precision.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicMatrix {
    n: usize,
    p: u64,
    entries: Vec<Padic>,
}

impl fmt::Debug for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PadicMatrix {}x{} over Q_{}", self.n, self.n, self.p)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl PadicMatrix {
    pub fn from_entries(n: usize, p: u64, entries: Vec<Padic>) -> Self {
        assert_eq!(entries.len(), n * n);
        assert!(entries.iter().all(|e| e.p() == p), "mixed primes");
        PadicMatrix { n, p, entries }
    }

    pub fn zeros(n: usize, p: u64) -> Self {
        Self::from_entries(n, p, vec![Padic::zero(p); n * n])
    }

    pub fn identity(n: usize, p: u64, prec: u32) -> Self {
        let mut m = Self::zeros(n, p);
        for i in 0..n {
            m.set(i, i, Padic::one(p, prec));
        }
        m
    }

    pub fn from_ints(rows: &[Vec<i64>], p: u64, prec: u32) -> Self {
        let n = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n);
                r.iter().map(|&x| Padic::from_int(x, p, prec))
            })
            .collect();
        Self::from_entries(n, p, entries)
    }

    pub fn diag(entries: &[Padic]) -> Self {
        let n = entries.len();
        let p = entries[0].p();
        let mut m = Self::zeros(n, p);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, *e);
        }
        m
    }

    /// Diagonal matrix `diag(p^v_i)`.
    pub fn diag_p_powers(vals: &[i64], p: u64, prec: u32) -> Self {
        let d: Vec<Padic> = vals.iter().map(|&v| Padic::p_power(p, v, prec)).collect();
        Self::diag(&d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> &Padic {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Padic) {
        assert_eq!(v.p(), self.p);
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Padic] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<Padic> {
        self.entries[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n, self.p);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Padic::zero(self.p);
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Self::from_entries(self.n, self.p, entries)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self::from_entries(self.n, self.p, entries)
    }

    pub fn scale(&self, c: &Padic) -> Self {
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        Self::from_entries(self.n, self.p, entries)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.p);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, *self.get(i, j));
            }
        }
        t
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_exact_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_exact_zero()))
    }

    /// Every entry has valuation at least `t`.
    pub fn entries_val_at_least(&self, t: i64) -> Tri {
        self.entries
            .iter()
            .fold(Tri::True, |acc, e| acc.and(e.val_at_least(t)))
    }

    /// Minimum certified lower bound on entry valuations.
    pub fn min_val_lower_bound(&self) -> Valuation {
        self.entries
            .iter()
            .map(|e| e.val_lower_bound())
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Gaussian elimination with minimal-valuation pivots: returns `(det, inverse)`.
    fn eliminate(&self, want_inverse: bool) -> Result<(Padic, Option<PadicMatrix>)> {
        let n = self.n;
        let p = self.p;
        let mut a = self.clone();
        let prec = self
            .entries
            .iter()
            .filter_map(|e| e.rel_prec())
            .max()
            .unwrap_or(1);
        let mut inv = PadicMatrix::identity(n, p, prec);
        let mut det = Padic::one(p, prec);
        for c in 0..n {
            let piv = pick_pivot((c..n).map(|r| (r, *a.get(r, c))))?;
            if piv != c {
                a.swap_rows(piv, c);
                inv.swap_rows(piv, c);
                det = det.neg();
            }
            let pv = *a.get(c, c);
            det = det.mul(&pv);
            let pinv = pv.inv()?;
            for j in 0..n {
                a.set(c, j, a.get(c, j).mul(&pinv));
                inv.set(c, j, inv.get(c, j).mul(&pinv));
            }
            for r in 0..n {
                if r == c || (!want_inverse && r < c) {
                    continue;
                }
                let f = *a.get(r, c);
                if f.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j).sub(&f.mul(a.get(c, j))));
                    inv.set(r, j, inv.get(r, j).sub(&f.mul(inv.get(c, j))));
                }
                a.set(r, c, Padic::zero(p));
            }
        }
        Ok((det, if want_inverse { Some(inv) } else { None }))
    }

    pub fn det(&self) -> Result<Padic> {
        self.eliminate(false).map(|(d, _)| d)
    }

    pub fn inverse(&self) -> Result<PadicMatrix> {
        Ok(self.eliminate(true)?.1.expect("inverse requested"))
    }

    pub fn det_val(&self) -> Result<i64> {
        match self.det()?.val()? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::SingularMatrix),
        }
    }

    /// Integral entries and unit determinant.
    pub fn in_k0(&self) -> Result<bool> {
        if !self
            .entries_val_at_least(0)
            .certify(|| "integrality test".into())?
        {
            return Ok(false);
        }
        Ok(self.det_val()? == 0)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.entries.swap(a * self.n + j, b * self.n + j);
        }
    }

    /// Reduction modulo `p^k` of an integral matrix, row-major.
    pub fn residues(&self, k: u32) -> Result<Vec<u64>> {
        self.entries.iter().map(|e| e.residue(k)).collect()
    }

    /// Lift of an integer matrix mod `p^k`.
    pub fn from_residues(n: usize, p: u64, res: &[u64], prec: u32) -> Self {
        let entries = res
            .iter()
            .map(|&r| Padic::from_int(r as i64, p, prec))
            .collect();
        Self::from_entries(n, p, entries)
    }

    /// Agrees with `other` entrywise at surviving precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| a.agrees_with(b))
    }

    /// Minimal absolute precision over entries that are not exact.
    pub fn abs_prec_floor(&self) -> Valuation {
        self.entries
            .iter()
            .map(|e| e.abs_prec())
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// `g h g^{-1} h^{-1}`
    pub fn commutator(&self, h: &Self) -> Result<Self> {
        Ok(self.mul(h).mul(&self.inverse()?).mul(&h.inverse()?))
    }
}

/// Index of an entry with certified minimal valuation.
pub(crate) fn pick_pivot(cands: impl Iterator<Item = (usize, Padic)>) -> Result<usize> {
    let mut best: Option<(usize, i64)> = None;
    let mut small_floor: Option<i64> = None;
    let mut any = false;
    for (idx, e) in cands {
        any = true;
        match e.val() {
            Ok(Valuation::Finite(v)) => {
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((idx, v));
                }
            }
            Ok(Valuation::Infinite) => {}
            Err(_) => {
                let s = e
                    .val_lower_bound()
                    .finite()
                    .expect("small element has a bound");
                small_floor = Some(small_floor.map_or(s, |f: i64| f.min(s)));
            }
        }
    }
    if !any {
        return Err(Error::SingularMatrix);
    }
    match (best, small_floor) {
        (Some((idx, v)), s) if s.is_none_or(|s| v <= s) => Ok(idx),
        (None, None) => Err(Error::SingularMatrix),
        _ => Err(precision("pivot valuation not certified")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        let p = 2;
        let id = PadicMatrix::identity(3, p, 8);
        assert_eq!(id.inverse().unwrap(), id);
        let d = PadicMatrix::diag_p_powers(&[1, 0], p, 8);
        let di = d.inverse().unwrap();
        assert_eq!(di.get(0, 0).val().unwrap(), Valuation::Finite(-1));
        assert!(d.mul(&di).agrees_with(&PadicMatrix::identity(2, p, 8)));
    }

    #[test]
    fn determinant() {
        let g = PadicMatrix::from_ints(&[vec![1, 2], vec![3, 4]], 3, 6);
        assert!(g.det().unwrap().agrees_with(&Padic::from_int(-2, 3, 6)));
        let s = PadicMatrix::from_ints(&[vec![1, 2], vec![2, 4]], 3, 6);
        assert!(s.det().is_err());
    }
}
