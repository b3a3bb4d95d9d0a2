use crate::error::{domain, Result};
use crate::padic::{PadicMatrix, Valuation};
use crate::roots::Root;
use serde::Serialize;

/// `P_g = {x : g^k x g^-k bounded as k -> +inf}` for diagonal `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractedParabolic {
    /// Roots `e_i - e_j` with `v(g_i) - v(g_j) >= 0`.
    pub roots: Vec<Root>,
    /// Roots with strictly positive valuation: the part contracted to 1.
    pub contracted: Vec<Root>,
    /// Index blocks of equal entry valuation, ordered by valuation descending.
    pub blocks: Vec<Vec<usize>>,
}

impl ContractedParabolic {
    pub fn contains_root(&self, r: &Root) -> bool {
        self.roots.contains(r)
    }

    pub fn levi_roots(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| !self.contracted.contains(r))
    }
}

fn diag_vals(g: &PadicMatrix) -> Result<Vec<i64>> {
    if !g.is_diagonal() {
        return Err(domain("contracted parabolic needs a diagonal element"));
    }
    (0..g.n())
        .map(|i| match g.get(i, i).val()? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(domain("zero diagonal entry")),
        })
        .collect()
}

pub fn contracted_parabolic(g: &PadicMatrix) -> Result<ContractedParabolic> {
    let v = diag_vals(g)?;
    let n = v.len();
    let mut roots = Vec::new();
    let mut contracted = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = v[i] - v[j];
            if d >= 0 {
                roots.push(Root::new(i, j));
            }
            if d > 0 {
                contracted.push(Root::new(i, j));
            }
        }
    }
    let mut levels: Vec<i64> = v.clone();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let blocks = levels
        .iter()
        .map(|&l| (0..n).filter(|&i| v[i] == l).collect())
        .collect();
    Ok(ContractedParabolic {
        roots,
        contracted,
        blocks,
    })
}

/// Minimum entry valuation of `g^k x g^-k` for `k = 0..=steps`; bounded orbits keep it
/// above the starting value, unbounded ones fall by at least one per step.
pub fn conjugation_orbit_floor(g: &PadicMatrix, x: &PadicMatrix, steps: u32) -> Result<Vec<i64>> {
    let v = diag_vals(g)?;
    let n = v.len();
    let mut out = Vec::with_capacity(steps as usize + 1);
    for k in 0..=steps as i64 {
        let mut lo = i64::MAX;
        for i in 0..n {
            for j in 0..n {
                if let Valuation::Finite(e) = x.get(i, j).val_lower_bound() {
                    lo = lo.min(e + k * (v[i] - v[j]));
                }
            }
        }
        out.push(lo);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let p = 2;
        let g = PadicMatrix::diag_p_powers(&[1, 0], p, 8);
        let cp = contracted_parabolic(&g).unwrap();
        assert_eq!(cp.roots, vec![Root::new(0, 1)]);
        assert_eq!(cp.blocks, vec![vec![0], vec![1]]);
        let g = PadicMatrix::from_ints(&[vec![1, 0], vec![0, 3]], p, 8);
        let cp = contracted_parabolic(&g).unwrap();
        assert_eq!(cp.roots.len(), 2);
        assert!(cp.contracted.is_empty());
        let g = PadicMatrix::diag_p_powers(&[1, 1, 0], p, 8);
        let cp = contracted_parabolic(&g).unwrap();
        assert_eq!(cp.blocks, vec![vec![0, 1], vec![2]]);
        assert_eq!(cp.roots.len(), 4);
    }

    #[test]
    fn boundedness_matches_pattern() {
        let p = 3;
        let g = PadicMatrix::diag_p_powers(&[1, 0], p, 8);
        let up = PadicMatrix::from_ints(&[vec![1, 5], vec![0, 1]], p, 8);
        let low = PadicMatrix::from_ints(&[vec![1, 0], vec![5, 1]], p, 8);
        let f = conjugation_orbit_floor(&g, &up, 5).unwrap();
        assert!(f.iter().all(|&x| x >= 0));
        let f = conjugation_orbit_floor(&g, &low, 5).unwrap();
        assert_eq!(f[5], -5);
    }
}
