use super::matrix::{pick_pivot, PadicMatrix};
use super::scalar::Padic;
use crate::error::Result;

/// `g = b k` with `b` upper triangular and `k` in `GL_n(Z_p)`.
#[derive(Clone, Debug)]
pub struct Iwasawa {
    pub b: PadicMatrix,
    pub k: PadicMatrix,
}

/// Rows are processed bottom-up: each row of `k` is the current row of `g` reduced against
/// the rows of `k` already found and divided by its first entry of minimal valuation.
pub fn iwasawa_decompose(g: &PadicMatrix) -> Result<Iwasawa> {
    let n = g.n();
    let p = g.p();
    let prec = g
        .entries()
        .iter()
        .filter_map(|e| e.rel_prec())
        .max()
        .unwrap_or(1);
    if g.in_k0()? {
        return Ok(Iwasawa {
            b: PadicMatrix::identity(n, p, prec),
            k: g.clone(),
        });
    }
    let mut k = PadicMatrix::zeros(n, p);
    let mut b = PadicMatrix::zeros(n, p);
    let mut pivots: Vec<usize> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let mut row = g.row(i);
        // Kill pivot columns of lower rows, most recent pivot last.
        for (step, &c) in pivots.iter().enumerate() {
            let krow = n - 1 - step;
            let coef = row[c];
            b.set(i, krow, coef);
            if coef.is_exact_zero() {
                continue;
            }
            for j in 0..n {
                row[j] = row[j].sub(&coef.mul(k.get(krow, j)));
            }
            row[c] = Padic::zero(p);
        }
        let c = pick_pivot((0..n).filter(|j| !pivots.contains(j)).map(|j| (j, row[j])))?;
        let lead = row[c];
        let inv = lead.inv()?;
        for j in 0..n {
            let v = if j == c {
                Padic::one(p, lead.rel_prec().unwrap_or(prec))
            } else {
                row[j].mul(&inv)
            };
            k.set(i, j, v);
        }
        b.set(i, i, lead);
        pivots.push(c);
    }
    Ok(Iwasawa { b, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::scalar::Valuation;

    #[test]
    fn spec_examples() {
        let p = 2;
        let g = PadicMatrix::from_ints(&[vec![1, 1], vec![0, 1]], p, 8);
        let d = iwasawa_decompose(&g).unwrap();
        assert_eq!(d.k, g);
        let g = PadicMatrix::diag_p_powers(&[1, 0], p, 8);
        let d = iwasawa_decompose(&g).unwrap();
        assert!(d.k.agrees_with(&PadicMatrix::identity(2, p, 8)));
        assert!(d.b.agrees_with(&g));
        let g = PadicMatrix::from_ints(&[vec![0, 1], vec![2, 0]], p, 8);
        let d = iwasawa_decompose(&g).unwrap();
        assert!(d.b.agrees_with(&PadicMatrix::diag_p_powers(&[0, 1], p, 8)));
        assert!(d
            .k
            .agrees_with(&PadicMatrix::from_ints(&[vec![0, 1], vec![1, 0]], p, 8)));
        assert!(d.b.mul(&d.k).agrees_with(&g));
        assert_eq!(d.k.det().unwrap().val().unwrap(), Valuation::Finite(0));
    }
}
