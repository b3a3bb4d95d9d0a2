//! The standard apartment of GL_n: points modulo the diagonal, facets cut out by the
//! hyperplanes `x_i - x_j = k`, filtration levels and the bounded balls `A^b_m`.

use crate::error::{domain, Error, Result};
use crate::field::Rational;
use crate::roots::{pairing, Root};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;

/// A point of `R^n / R(1,...,1)` stored with last coordinate 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ApartmentPoint {
    coords: Vec<Rational>,
}

impl ApartmentPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidRank(coords.len()));
        }
        let last = coords[coords.len() - 1].clone();
        Ok(ApartmentPoint {
            coords: coords.into_iter().map(|c| c - last.clone()).collect(),
        })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Rational::integer(c)).collect())
    }

    pub fn origin(n: usize) -> Self {
        ApartmentPoint {
            coords: vec![Rational::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// Integer coordinates when the point is a vertex.
    pub fn as_vertex(&self) -> Option<Vec<i64>> {
        self.coords
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Some(c.floor())
                } else {
                    None
                }
            })
            .collect()
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: &Rational) -> Self {
        let s = Rational::one() - t.clone();
        ApartmentPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() * s.clone() + b.clone() * t.clone())
                .collect(),
        }
    }
}

/// Element of `R~ = R ∪ {r+} ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedLevel {
    Finite(Rational),
    Plus(Rational),
    Infinity,
}

impl ExtendedLevel {
    pub fn finite(v: i64) -> Self {
        ExtendedLevel::Finite(Rational::integer(v))
    }

    pub fn plus(v: i64) -> Self {
        ExtendedLevel::Plus(Rational::integer(v))
    }

    /// Smallest integer `k` with `v >= k` meaning `v >= level` on valuations; `None` for ∞.
    pub fn exponent(&self) -> Option<i64> {
        match self {
            ExtendedLevel::Finite(r) => Some(r.ceil()),
            ExtendedLevel::Plus(r) => Some(r.floor() + 1),
            ExtendedLevel::Infinity => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            ExtendedLevel::Finite(r) | ExtendedLevel::Plus(r) => Some(r),
            ExtendedLevel::Infinity => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            ExtendedLevel::Finite(r) | ExtendedLevel::Plus(r) => !r.is_negative(),
            ExtendedLevel::Infinity => true,
        }
    }

    /// Multiplication by a positive rational.
    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if c.is_negative() || c.is_zero() {
            return Err(domain("levels scale by positive factors only"));
        }
        Ok(match self {
            ExtendedLevel::Finite(r) => ExtendedLevel::Finite(r.clone() * c.clone()),
            ExtendedLevel::Plus(r) => ExtendedLevel::Plus(r.clone() * c.clone()),
            ExtendedLevel::Infinity => ExtendedLevel::Infinity,
        })
    }

    fn rank(&self) -> u8 {
        match self {
            ExtendedLevel::Finite(_) => 0,
            ExtendedLevel::Plus(_) => 1,
            ExtendedLevel::Infinity => 2,
        }
    }
}

impl PartialOrd for ExtendedLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedLevel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.value(), other.value()) {
            (Some(a), Some(b)) => a.cmp(b).then(self.rank().cmp(&other.rank())),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Add for ExtendedLevel {
    type Output = ExtendedLevel;
    fn add(self, rhs: ExtendedLevel) -> ExtendedLevel {
        use ExtendedLevel::*;
        match (self, rhs) {
            (Infinity, _) | (_, Infinity) => Infinity,
            (Finite(a), Finite(b)) => Finite(a + b),
            (Finite(a), Plus(b)) | (Plus(a), Finite(b)) | (Plus(a), Plus(b)) => Plus(a + b),
        }
    }
}

impl fmt::Display for ExtendedLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedLevel::Finite(r) => write!(f, "{r}"),
            ExtendedLevel::Plus(r) => write!(f, "{r}+"),
            ExtendedLevel::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Value of a positive root on a facet: exactly `k`, or inside `(k, k+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Constraint {
    Exact(i64),
    Open(i64),
}

impl Constraint {
    fn of(v: &Rational) -> Self {
        if v.is_integer() {
            Constraint::Exact(v.floor())
        } else {
            Constraint::Open(v.floor())
        }
    }

    fn holds(&self, v: &Rational) -> bool {
        *self == Constraint::of(v)
    }

    /// Closed range `[lo, hi]`.
    fn closed(&self) -> (i64, i64) {
        match *self {
            Constraint::Exact(k) => (k, k),
            Constraint::Open(k) => (k, k + 1),
        }
    }
}

/// Facet of the hyperplane arrangement, stored by its constraint on every positive root
/// (positive roots in lexicographic order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Facet {
    n: usize,
    pattern: Vec<Constraint>,
}

pub(crate) fn positive_roots(n: usize) -> Vec<Root> {
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push(Root::new(i, j));
        }
    }
    v
}

pub fn facet_of(x: &ApartmentPoint) -> Facet {
    let n = x.dim();
    let pattern = positive_roots(n)
        .iter()
        .map(|a| Constraint::of(&pairing(x, a).expect("root in range")))
        .collect();
    Facet { n, pattern }
}

impl Facet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern(&self) -> &[Constraint] {
        &self.pattern
    }

    pub fn constraint(&self, alpha: &Root) -> Constraint {
        let (i, j) = (alpha.i.min(alpha.j), alpha.i.max(alpha.j));
        // Lexicographic index of (i, j) among positive roots.
        let idx = i * (2 * self.n - i - 1) / 2 + (j - i - 1);
        let c = self.pattern[idx];
        if alpha.is_positive() {
            c
        } else {
            match c {
                Constraint::Exact(k) => Constraint::Exact(-k),
                Constraint::Open(k) => Constraint::Open(-k - 1),
            }
        }
    }

    pub fn contains(&self, x: &ApartmentPoint) -> bool {
        x.dim() == self.n
            && positive_roots(self.n)
                .iter()
                .zip(&self.pattern)
                .all(|(a, c)| c.holds(&pairing(x, a).expect("root in range")))
    }

    /// Components of the graph of exact constraints, minus one.
    pub fn dimension(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut comps = self.n;
        for (a, c) in positive_roots(self.n).iter().zip(&self.pattern) {
            if let Constraint::Exact(_) = c {
                let (ra, rb) = (find(&mut parent, a.i), find(&mut parent, a.j));
                if ra != rb {
                    parent[ra] = rb;
                    comps -= 1;
                }
            }
        }
        comps - 1
    }

    pub fn is_vertex(&self) -> bool {
        self.dimension() == 0
    }

    /// Vertices of the closure, in the global (lexicographic) order.
    pub fn vertices(&self) -> Vec<Vec<i64>> {
        let n = self.n;
        let ranges: Vec<(i64, i64)> = (0..n - 1)
            .map(|i| self.constraint(&Root::new(i, n - 1)).closed())
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0i64; n];
        fn rec(
            k: usize,
            ranges: &[(i64, i64)],
            cur: &mut Vec<i64>,
            f: &Facet,
            out: &mut Vec<Vec<i64>>,
        ) {
            if k == ranges.len() {
                let ok = positive_roots(f.n).iter().zip(&f.pattern).all(|(a, c)| {
                    let v = cur[a.i] - cur[a.j];
                    let (lo, hi) = c.closed();
                    lo <= v && v <= hi
                });
                if ok {
                    out.push(cur.clone());
                }
                return;
            }
            for v in ranges[k].0..=ranges[k].1 {
                cur[k] = v;
                rec(k + 1, ranges, cur, f, out);
            }
        }
        rec(0, &ranges, &mut cur, self, &mut out);
        out.sort();
        out
    }

    pub fn barycenter(&self) -> ApartmentPoint {
        barycenter(&self.vertices())
    }

    /// All faces (including the facet itself), keyed by vertex subsets.
    pub fn faces(&self) -> Vec<Facet> {
        let vs = self.vertices();
        let k = vs.len();
        let mut out = BTreeSet::new();
        for mask in 1u64..(1u64 << k) {
            let sub: Vec<Vec<i64>> = (0..k)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| vs[b].clone())
                .collect();
            out.insert(facet_of(&barycenter(&sub)));
        }
        out.into_iter().collect()
    }

    pub fn sign_region(&self, m: i64) -> SignRegion {
        let eps: Vec<Sign> = self
            .pattern
            .iter()
            .map(|c| match *c {
                Constraint::Exact(k) if k > m => Sign::Plus,
                Constraint::Exact(k) if k < -m => Sign::Minus,
                Constraint::Exact(_) => Sign::Zero,
                Constraint::Open(k) if k >= m => Sign::Plus,
                Constraint::Open(k) if k + 1 <= -m => Sign::Minus,
                Constraint::Open(_) => Sign::Zero,
            })
            .collect();
        let bounded = zero_roots_span(self.n, &eps);
        SignRegion { m, eps, bounded }
    }
}

pub fn barycenter(vertices: &[Vec<i64>]) -> ApartmentPoint {
    let n = vertices[0].len();
    let k = vertices.len() as i64;
    let coords = (0..n)
        .map(|i| Rational::new(vertices.iter().map(|v| v[i]).sum::<i64>(), k))
        .collect();
    ApartmentPoint::new(coords).expect("n >= 2")
}

fn zero_roots_span(n: usize, eps: &[Sign]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut comps = n;
    for (a, s) in positive_roots(n).iter().zip(eps) {
        if *s == Sign::Zero {
            let (ra, rb) = (find(&mut parent, a.i), find(&mut parent, a.j));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
            }
        }
    }
    comps == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignRegion {
    pub m: i64,
    pub eps: Vec<Sign>,
    pub bounded: bool,
}

pub fn sign_region_of(x: &ApartmentPoint, m: i64) -> SignRegion {
    let eps: Vec<Sign> = positive_roots(x.dim())
        .iter()
        .map(|a| {
            let v = pairing(x, a).expect("root in range");
            if v > Rational::integer(m) {
                Sign::Plus
            } else if v < Rational::integer(-m) {
                Sign::Minus
            } else {
                Sign::Zero
            }
        })
        .collect();
    let bounded = zero_roots_span(x.dim(), &eps);
    SignRegion { m, eps, bounded }
}

/// A finite point set or a facet.
#[derive(Clone, Debug)]
pub enum Omega {
    Points(Vec<ApartmentPoint>),
    Facet(Facet),
}

impl From<Facet> for Omega {
    fn from(f: Facet) -> Self {
        Omega::Facet(f)
    }
}

impl From<ApartmentPoint> for Omega {
    fn from(x: ApartmentPoint) -> Self {
        Omega::Points(vec![x])
    }
}

impl Omega {
    pub fn n(&self) -> Option<usize> {
        match self {
            Omega::Points(p) => p.first().map(|x| x.dim()),
            Omega::Facet(f) => Some(f.n()),
        }
    }
}

/// `sup over Omega of <x, -alpha>`, marked `+` exactly when alpha is constant on Omega.
pub fn f_star(omega: &Omega, alpha: &Root) -> Result<ExtendedLevel> {
    let pts: Vec<ApartmentPoint> = match omega {
        Omega::Points(p) => p.clone(),
        Omega::Facet(f) => f
            .vertices()
            .iter()
            .map(|v| ApartmentPoint::from_ints(v).expect("n >= 2"))
            .collect(),
    };
    if pts.is_empty() {
        return Err(domain("f_star of an empty set"));
    }
    let vals: Vec<Rational> = pts
        .iter()
        .map(|x| pairing(x, alpha).map(|v| -v))
        .collect::<Result<_>>()?;
    let sup = vals.iter().max().expect("non-empty").clone();
    if vals.iter().all(|v| *v == sup) {
        Ok(ExtendedLevel::Plus(sup))
    } else {
        Ok(ExtendedLevel::Finite(sup))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BallComplex {
    pub n: usize,
    pub m: i64,
    /// Sorted by dimension, then by vertex list.
    pub facets: Vec<Facet>,
    pub regions: Vec<SignRegion>,
    pub vertices: Vec<Vec<i64>>,
}

impl BallComplex {
    pub fn facets_of_dim(&self, d: usize) -> impl Iterator<Item = &Facet> {
        self.facets.iter().filter(move |f| f.dimension() == d)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let top = self.facets.iter().map(|f| f.dimension()).max().unwrap_or(0);
        (0..=top).map(|d| self.facets_of_dim(d).count()).collect()
    }
}

/// Global facet order: dimension, then vertex list.
pub fn facet_order(a: &Facet, b: &Facet) -> Ordering {
    a.dimension()
        .cmp(&b.dimension())
        .then_with(|| a.vertices().cmp(&b.vertices()))
}

/// Facets of `A^b_m`: points where `|x_i - x_j| <= m` on a connected set of pairs.
///
/// Enumerates integer parts in a box and orderings of fractional parts; every facet
/// is hit because a facet is determined by these two data.
pub fn ball_complex(n: usize, m: i64) -> Result<BallComplex> {
    if n < 2 {
        return Err(Error::InvalidRank(n));
    }
    if m < 0 {
        return Err(domain("ball radius must be non-negative"));
    }
    let span = (n as i64 - 1) * m + 1;
    let mut found: BTreeSet<Facet> = BTreeSet::new();
    let mut floors = vec![-span; n - 1];
    let partitions = fraction_orders(n);
    loop {
        for order in &partitions {
            let blocks = order.iter().max().copied().unwrap_or(0) + 1;
            let coords: Vec<Rational> = (0..n)
                .map(|i| {
                    let f = if i == n - 1 { 0 } else { floors[i] };
                    Rational::integer(f) + Rational::new(order[i] as i64, blocks as i64)
                })
                .collect();
            let x = ApartmentPoint::new(coords)?;
            if sign_region_of(&x, m).bounded {
                found.insert(facet_of(&x));
            }
        }
        // Odometer over the floor box.
        let mut k = 0;
        loop {
            if k == n - 1 {
                return Ok(finish_ball(n, m, found));
            }
            floors[k] += 1;
            if floors[k] <= span {
                break;
            }
            floors[k] = -span;
            k += 1;
        }
    }
}

/// Rank of each coordinate's fractional part among distinct fractional parts;
/// the last coordinate has fraction 0, hence rank 0.
fn fraction_orders(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n - 1 {
            cur[n - 1] = 0;
            let used: BTreeSet<usize> = cur.iter().copied().collect();
            let k = used.len();
            if used.iter().copied().eq(0..k) {
                out.push(cur.clone());
            }
            return;
        }
        for r in 0..n {
            cur[i] = r;
            rec(i + 1, n, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

fn finish_ball(n: usize, m: i64, found: BTreeSet<Facet>) -> BallComplex {
    let mut facets: Vec<Facet> = found.into_iter().collect();
    facets.sort_by(facet_order);
    let regions = facets.iter().map(|f| f.sign_region(m)).collect();
    let mut vertices: Vec<Vec<i64>> = facets
        .iter()
        .filter(|f| f.is_vertex())
        .map(|f| f.vertices().remove(0))
        .collect();
    vertices.sort();
    BallComplex {
        n,
        m,
        facets,
        regions,
        vertices,
    }
}

/// Signed faces of codimension one under the global vertex order.
pub fn boundary_chain(sigma: &Facet) -> Vec<(i64, Facet)> {
    let vs = sigma.vertices();
    if vs.len() < 2 {
        return Vec::new();
    }
    (0..vs.len())
        .map(|skip| {
            let sub: Vec<Vec<i64>> = vs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, v)| v.clone())
                .collect();
            let sign = if skip % 2 == 0 { 1 } else { -1 };
            (sign, facet_of(&barycenter(&sub)))
        })
        .collect()
}

/// Facets met by the segment `[x, z]`, in order.
pub fn segment_facets(x: &ApartmentPoint, z: &ApartmentPoint) -> Result<Vec<Facet>> {
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: z.dim(),
        });
    }
    let mut ts: BTreeSet<Rational> = BTreeSet::new();
    ts.insert(Rational::zero());
    ts.insert(Rational::one());
    for a in positive_roots(x.dim()) {
        let a0 = pairing(x, &a)?;
        let a1 = pairing(z, &a)?;
        if a0 == a1 {
            continue;
        }
        let (lo, hi) = if a0 < a1 {
            (a0.clone(), a1.clone())
        } else {
            (a1.clone(), a0.clone())
        };
        for k in lo.ceil()..=hi.floor() {
            ts.insert((Rational::integer(k) - a0.clone()) / (a1.clone() - a0.clone()));
        }
    }
    let ts: Vec<Rational> = ts.into_iter().collect();
    let mut out: Vec<Facet> = Vec::new();
    let mut push = |f: Facet| {
        if out.last() != Some(&f) {
            out.push(f);
        }
    };
    for w in 0..ts.len() {
        push(facet_of(&x.lerp(z, &ts[w])));
        if w + 1 < ts.len() {
            let mid = (ts[w].clone() + ts[w + 1].clone()) / Rational::integer(2);
            push(facet_of(&x.lerp(z, &mid)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn facet_examples() {
        let o = facet_of(&ApartmentPoint::origin(3));
        assert!(o.pattern().iter().all(|c| *c == Constraint::Exact(0)));
        assert_eq!(o.dimension(), 0);
        let c = facet_of(&ApartmentPoint::new(vec![q(1, 2), q(0, 1)]).unwrap());
        assert_eq!(c.pattern(), &[Constraint::Open(0)]);
        assert_eq!(c.dimension(), 1);
        let ch = facet_of(&ApartmentPoint::new(vec![q(2, 3), q(1, 3), q(0, 1)]).unwrap());
        assert_eq!(ch.dimension(), 2);
        assert_eq!(
            ch.vertices(),
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 1, 0]]
        );
    }

    #[test]
    fn level_order() {
        let a = ExtendedLevel::finite(0);
        let b = ExtendedLevel::plus(0);
        let c = ExtendedLevel::Finite(q(1, 2));
        assert!(a < b && b < c && c < ExtendedLevel::Infinity);
        assert_eq!(a.exponent(), Some(0));
        assert_eq!(b.exponent(), Some(1));
        assert_eq!(ExtendedLevel::Plus(q(1, 2)).exponent(), Some(1));
        assert_eq!(ExtendedLevel::Finite(q(1, 2)).exponent(), Some(1));
    }

    #[test]
    fn f_star_examples() {
        let a = Root::new(0, 1);
        let o: Omega = ApartmentPoint::origin(2).into();
        assert_eq!(f_star(&o, &a).unwrap(), ExtendedLevel::plus(0));
        let ch: Omega = facet_of(&ApartmentPoint::new(vec![q(1, 2), q(0, 1)]).unwrap()).into();
        assert_eq!(f_star(&ch, &a).unwrap(), ExtendedLevel::finite(0));
        assert_eq!(f_star(&ch, &a.negate()).unwrap(), ExtendedLevel::finite(1));
        let two = Omega::Points(vec![
            ApartmentPoint::origin(2),
            ApartmentPoint::from_ints(&[1, 0]).unwrap(),
        ]);
        assert_eq!(f_star(&two, &a).unwrap(), ExtendedLevel::finite(0));
        assert!(f_star(&Omega::Points(vec![]), &a).is_err());
    }

    #[test]
    fn ball_counts() {
        for (n, m, dims) in [
            (2, 0, vec![1]),
            (2, 1, vec![3, 2]),
            (2, 2, vec![5, 4]),
            (3, 0, vec![1]),
            (3, 1, vec![13, 24, 12]),
            (3, 2, vec![37, 84, 48]),
        ] {
            let b = ball_complex(n, m).unwrap();
            assert_eq!(b.count_by_dim(), dims, "n={n} m={m}");
        }
    }

    #[test]
    fn boundary_examples() {
        let v = facet_of(&ApartmentPoint::origin(2));
        assert!(boundary_chain(&v).is_empty());
        let e = facet_of(&ApartmentPoint::new(vec![q(1, 2), q(0, 1)]).unwrap());
        let b = boundary_chain(&e);
        assert_eq!(
            b[0],
            (1, facet_of(&ApartmentPoint::from_ints(&[1, 0]).unwrap()))
        );
        assert_eq!(b[1], (-1, facet_of(&ApartmentPoint::origin(2))));
    }

    #[test]
    fn segment_examples() {
        let o = ApartmentPoint::origin(2);
        assert_eq!(segment_facets(&o, &o).unwrap().len(), 1);
        let z = ApartmentPoint::from_ints(&[2, 0]).unwrap();
        let s = segment_facets(&o, &z).unwrap();
        assert_eq!(
            s.iter().map(|f| f.dimension()).collect::<Vec<_>>(),
            vec![0, 1, 0, 1, 0]
        );
    }
}
