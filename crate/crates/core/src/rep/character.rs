use crate::error::{domain, Error, Result};
use crate::field::{Field, Rational};
use crate::padic::modular::{pow_mod, ModRing};
use num_traits::{One, Zero};
use serde::Serialize;

/// Character of `(Z/p^d)^x` with values in the `order`-th roots of unity; `table[u]` is the
/// exponent `k` of `zeta_order^k` at the residue `u`, unused at non-units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueCharacter {
    pub p: u64,
    pub depth: u32,
    pub order: u64,
    #[serde(skip)]
    table: Vec<u64>,
    pub label: String,
}

impl ResidueCharacter {
    pub fn trivial(p: u64) -> Self {
        ResidueCharacter {
            p,
            depth: 0,
            order: 1,
            table: vec![0],
            label: "trivial".into(),
        }
    }

    /// `images[g] = k` sends the `g`-th generator of `(Z/p^d)^x` (as listed by
    /// [`ModRing::unit_generators`]) to `zeta_order^k`.
    pub fn from_generator_images(
        p: u64,
        depth: u32,
        order: u64,
        images: &[u64],
        label: &str,
    ) -> Result<Self> {
        if depth == 0 {
            return Ok(Self::trivial(p));
        }
        let r = ModRing::new(p, depth);
        let gens = r.unit_generators();
        if gens.len() != images.len() {
            return Err(Error::DimensionMismatch {
                expected: gens.len(),
                got: images.len(),
            });
        }
        let orders: Vec<u64> = gens.iter().map(|&g| mult_order(&r, g)).collect();
        for (k, o) in images.iter().zip(&orders) {
            // zeta_order^k must have order dividing the generator's order
            if (k * o) % order != 0 {
                return Err(domain(format!(
                    "image {k}/{order} is not a character on a generator of order {o}"
                )));
            }
        }
        let mut table = vec![u64::MAX; r.q as usize];
        let mut idx = vec![0u64; gens.len()];
        loop {
            let mut u = 1 % r.q;
            let mut k = 0u64;
            for (t, &g) in gens.iter().enumerate() {
                u = r.mul(u, pow_mod(&r, g, idx[t]));
                k = (k + idx[t] * images[t]) % order;
            }
            if table[u as usize] != u64::MAX && table[u as usize] != k {
                return Err(domain("generator images are inconsistent"));
            }
            table[u as usize] = k;
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < orders[pos] {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
        Ok(ResidueCharacter {
            p,
            depth,
            order,
            table,
            label: label.into(),
        })
    }

    /// Quadratic character of `F_p^x`, odd `p`.
    pub fn legendre(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(domain("no quadratic character of F_2^x"));
        }
        Self::from_generator_images(p, 1, 2, &[1], "legendre")
    }

    /// The character of `(Z/4)^x` sending 3 to -1.
    pub fn mod4() -> Self {
        Self::from_generator_images(2, 2, 2, &[1], "mod4").expect("valid")
    }

    /// Exponent `k` with value `zeta_order^k` at a unit.
    pub fn exponent(&self, u: u64) -> Result<u64> {
        if u % self.p == 0 {
            return Err(domain(format!("{u} is not a unit mod {}", self.p)));
        }
        if self.depth == 0 {
            return Ok(0);
        }
        let q = self.table.len() as u64;
        Ok(self.table[(u % q) as usize])
    }

    pub fn value<F: Field>(&self, u: u64) -> Result<F> {
        let k = self.exponent(u)?;
        F::root_of_unity(self.order, k)
            .ok_or_else(|| Error::FieldUnsupported(format!("zeta_{}^{k}", self.order)))
    }
}

fn mult_order(r: &ModRing, g: u64) -> u64 {
    let mut x = g % r.q;
    let mut o = 1;
    while x != 1 % r.q {
        x = r.mul(x, g);
        o += 1;
    }
    o
}

/// `chi(diag(p^v_i u_i)) = prod z_i^v_i omega_i(u_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusCharacter {
    pub p: u64,
    pub omega: Vec<ResidueCharacter>,
    pub z: Vec<Rational>,
}

impl TorusCharacter {
    pub fn new(omega: Vec<ResidueCharacter>, z: Vec<Rational>) -> Result<Self> {
        if omega.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: omega.len(),
                got: z.len(),
            });
        }
        if omega.len() < 2 {
            return Err(Error::InvalidRank(omega.len()));
        }
        if z.iter().any(|x| x.is_zero()) {
            return Err(domain("z_i must be nonzero"));
        }
        let p = omega[0].p;
        if omega.iter().any(|w| w.p != p) {
            return Err(domain("residue characters over different primes"));
        }
        Ok(TorusCharacter { p, omega, z })
    }

    pub fn trivial(n: usize, p: u64) -> Self {
        TorusCharacter {
            p,
            omega: vec![ResidueCharacter::trivial(p); n],
            z: vec![Rational::one(); n],
        }
    }

    /// `omega` on the first coordinate, trivial elsewhere.
    pub fn first_coordinate(n: usize, w: ResidueCharacter) -> Self {
        let mut chi = Self::trivial(n, w.p);
        chi.omega[0] = w;
        chi
    }

    /// Unramified, `z = (-1, 1, ..., 1)`.
    pub fn unramified_sign(n: usize, p: u64) -> Self {
        let mut chi = Self::trivial(n, p);
        chi.z[0] = Rational::integer(-1);
        chi
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn depth(&self) -> u32 {
        self.omega.iter().map(|w| w.depth).max().unwrap_or(0)
    }

    /// Smallest `e` with nonzero `U_o^(e)`-invariants in the principal series.
    pub fn level(&self) -> u32 {
        self.depth().saturating_sub(1)
    }

    /// Value on `diag(p^v_i u_i)`; the units are residues mod any `p^k` with `k >= depth`.
    pub fn value<F: Field>(&self, vals: &[i64], units: &[u64]) -> Result<F> {
        let mut acc = F::one();
        for i in 0..self.n() {
            if vals[i] != 0 {
                let z = F::from_rational(&self.z[i]);
                acc = acc * z.powi(vals[i]).expect("z nonzero");
            }
            if self.omega[i].depth > 0 {
                acc = acc * self.omega[i].value::<F>(units[i])?;
            }
        }
        Ok(acc)
    }

    /// Parses `trivial`, `legendre`, `mod4` or `sign`.
    pub fn parse(name: &str, n: usize, p: u64) -> Result<Self> {
        match name {
            "trivial" => Ok(Self::trivial(n, p)),
            "legendre" => Ok(Self::first_coordinate(n, ResidueCharacter::legendre(p)?)),
            "mod4" if p == 2 => Ok(Self::first_coordinate(n, ResidueCharacter::mod4())),
            "sign" => Ok(Self::unramified_sign(n, p)),
            _ => Err(domain(format!("unknown character {name:?} for p = {p}"))),
        }
    }

    /// The level-0 nontrivial choice used by the resolution checks: the quadratic residue
    /// character for odd `p`, the unramified sign for `p = 2` (where `F_2^x` is trivial).
    pub fn depth_one(n: usize, p: u64) -> Self {
        if p == 2 {
            Self::unramified_sign(n, p)
        } else {
            Self::first_coordinate(n, ResidueCharacter::legendre(p).expect("odd p"))
        }
    }

    pub fn label(&self) -> String {
        let w: Vec<&str> = self.omega.iter().map(|w| w.label.as_str()).collect();
        let z: Vec<String> = self.z.iter().map(|z| z.to_string()).collect();
        format!("omega=[{}] z=[{}]", w.join(","), z.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Cyclotomic;

    #[test]
    fn legendre_values() {
        let w = ResidueCharacter::legendre(3).unwrap();
        assert_eq!(w.value::<Rational>(1).unwrap(), Rational::one());
        assert_eq!(w.value::<Rational>(2).unwrap(), Rational::integer(-1));
        let w = ResidueCharacter::legendre(5).unwrap();
        let signs: Vec<i64> = (1..5)
            .map(|u| if w.exponent(u).unwrap() == 0 { 1 } else { -1 })
            .collect();
        assert_eq!(signs, vec![1, -1, -1, 1]);
    }

    #[test]
    fn mod4_and_multiplicativity() {
        let w = ResidueCharacter::mod4();
        assert_eq!(w.value::<Rational>(3).unwrap(), Rational::integer(-1));
        assert_eq!(w.value::<Rational>(5).unwrap(), Rational::one());
        // order-4 character mod 5 needs i
        let w = ResidueCharacter::from_generator_images(5, 1, 4, &[1], "quartic").unwrap();
        assert!(w.value::<Rational>(2).is_err());
        let r = ModRing::new(5, 1);
        for a in 1..5 {
            for b in 1..5 {
                let lhs: Cyclotomic<4> = w.value(r.mul(a, b)).unwrap();
                let rhs =
                    w.value::<Cyclotomic<4>>(a).unwrap() * w.value::<Cyclotomic<4>>(b).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn torus_values() {
        let chi = TorusCharacter::unramified_sign(2, 2);
        assert_eq!(
            chi.value::<Rational>(&[1, 0], &[1, 1]).unwrap(),
            Rational::integer(-1)
        );
        assert_eq!(
            chi.value::<Rational>(&[2, 5], &[3, 1]).unwrap(),
            Rational::one()
        );
        assert_eq!(chi.level(), 0);
        assert_eq!(
            TorusCharacter::first_coordinate(2, ResidueCharacter::mod4()).level(),
            1
        );
    }
}
