//! Type A_{n-1} root combinatorics. Indices are zero-based.

use crate::apartment::ApartmentPoint;
use crate::error::{domain, Error, Result};
use crate::field::Rational;
use serde::Serialize;
use std::fmt;

/// The root `e_i - e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "e_i - e_i is not a root");
        Root { i, j }
    }

    pub fn is_positive(&self) -> bool {
        self.i < self.j
    }

    pub fn negate(&self) -> Root {
        Root {
            i: self.j,
            j: self.i,
        }
    }

    /// `alpha + beta` when it is a root.
    pub fn add(&self, other: &Root) -> Option<Root> {
        if self.j == other.i && self.i != other.j {
            Some(Root::new(self.i, other.j))
        } else if other.j == self.i && other.i != self.j {
            Some(Root::new(other.i, self.j))
        } else {
            None
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}-e{}", self.i + 1, self.j + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSystem {
    pub n: usize,
    pub roots: Vec<Root>,
    pub positive_roots: Vec<Root>,
    pub simple_roots: Vec<Root>,
    pub height_table: Vec<(Root, u32)>,
    /// Jump denominators; all 1 for split GL_n.
    pub n_alpha: Vec<u32>,
    /// Root-space dimensions; all 1 for split GL_n.
    pub d_alpha: Vec<u32>,
}

pub fn build_root_system(n: usize) -> Result<RootSystem> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    let mut roots = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                roots.push(Root::new(i, j));
            }
        }
    }
    let positive_roots: Vec<Root> = roots.iter().copied().filter(Root::is_positive).collect();
    let simple_roots = (0..n - 1).map(|i| Root::new(i, i + 1)).collect();
    let height_table = positive_roots
        .iter()
        .map(|r| (*r, (r.j - r.i) as u32))
        .collect();
    Ok(RootSystem {
        n,
        n_alpha: vec![1; roots.len()],
        d_alpha: vec![1; roots.len()],
        roots,
        positive_roots,
        simple_roots,
        height_table,
    })
}

impl RootSystem {
    pub fn height(&self, alpha: &Root) -> Result<u32> {
        height(alpha)
    }

    /// Height of the highest root.
    pub fn max_height(&self) -> u32 {
        (self.n - 1) as u32
    }

    pub fn index_of(&self, alpha: &Root) -> Option<usize> {
        self.roots.iter().position(|r| r == alpha)
    }

    /// `sum over positive roots of d_alpha`.
    pub fn positive_dimension(&self) -> u32 {
        self.positive_roots
            .iter()
            .map(|r| self.d_alpha[self.index_of(r).expect("root present")])
            .sum()
    }

    /// Coefficients of `alpha` in the simple roots.
    pub fn simple_coefficients(&self, alpha: &Root) -> Vec<i64> {
        let mut c = vec![0i64; self.n - 1];
        let (lo, hi, s) = if alpha.i < alpha.j {
            (alpha.i, alpha.j, 1)
        } else {
            (alpha.j, alpha.i, -1)
        };
        for k in lo..hi {
            c[k] = s;
        }
        c
    }
}

pub fn height(alpha: &Root) -> Result<u32> {
    if !alpha.is_positive() {
        return Err(domain(format!("height of negative root {alpha}")));
    }
    Ok((alpha.j - alpha.i) as u32)
}

/// `<x, e_i - e_j> = x_i - x_j`.
pub fn pairing(x: &ApartmentPoint, alpha: &Root) -> Result<Rational> {
    let n = x.dim();
    if alpha.i >= n || alpha.j >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.i.max(alpha.j) + 1,
        });
    }
    Ok(x.coords()[alpha.i].clone() - x.coords()[alpha.j].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_heights() {
        for (n, pos, h) in [(2, 1, 1), (3, 3, 2), (4, 6, 3)] {
            let rs = build_root_system(n).unwrap();
            assert_eq!(rs.roots.len(), n * (n - 1));
            assert_eq!(rs.positive_roots.len(), pos);
            assert_eq!(rs.max_height(), h);
        }
        assert!(matches!(build_root_system(1), Err(Error::InvalidRank(1))));
    }

    #[test]
    fn heights() {
        assert_eq!(height(&Root::new(0, 1)).unwrap(), 1);
        assert_eq!(height(&Root::new(0, 2)).unwrap(), 2);
        assert_eq!(height(&Root::new(0, 3)).unwrap(), 3);
        assert!(height(&Root::new(1, 0)).is_err());
    }

    #[test]
    fn pairing_examples() {
        let o = ApartmentPoint::origin(3);
        assert_eq!(pairing(&o, &Root::new(0, 2)).unwrap(), Rational::integer(0));
        let x = ApartmentPoint::new(vec![Rational::integer(1), Rational::integer(0)]).unwrap();
        assert_eq!(pairing(&x, &Root::new(0, 1)).unwrap(), Rational::integer(1));
        let y = ApartmentPoint::new(vec![
            Rational::new(1, 2),
            Rational::integer(0),
            Rational::new(-1, 2),
        ])
        .unwrap();
        assert_eq!(pairing(&y, &Root::new(0, 2)).unwrap(), Rational::integer(1));
        assert_eq!(
            pairing(&y, &Root::new(2, 0)).unwrap(),
            Rational::integer(-1)
        );
    }
}
