use building_lab::apartment::{ball_complex, barycenter, boundary_chain, facet_of, ApartmentPoint};
use building_lab::gl::{filtration_spec, iwahori_factor, level, membership, BuildingComplex};
use building_lab::padic::{iwasawa_decompose, Padic, PadicMatrix, Valuation};
use building_lab::rep::complex::origin_spec;
use building_lab::rep::{FiniteLevelRep, TorusCharacter};
use building_lab::roots::{build_root_system, height};
use building_lab::Rational;
use proptest::prelude::*;
use std::collections::HashMap;

fn pk(p: u64, k: u32) -> i64 {
    (p as i64).pow(k)
}

fn matrix(
    n: usize,
    p: u64,
    prec: u32,
    cells: &[i64],
    f: impl Fn(usize, usize, i64) -> i64,
) -> PadicMatrix {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| f(i, j, cells[i * n + j])).collect())
        .collect();
    PadicMatrix::from_ints(&rows, p, prec)
}

fn is_exact_zero_or_at_least(x: &Padic, t: i64) -> bool {
    match x.val_lower_bound() {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= t,
    }
}

fn scalar() -> impl Strategy<Value = Padic> {
    (
        prop::sample::select(vec![2u64, 3, 5]),
        -3i64..6,
        1i64..10_000,
        2u32..12,
    )
        .prop_map(|(p, v, u, prec)| {
            let u = if u % p as i64 == 0 { u + 1 } else { u };
            Padic::from_parts(p, v, u, prec).expect("unit")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ultrametric(a in scalar(), b in scalar()) {
        prop_assume!(a.p() == b.p());
        let (va, vb) = (a.val().unwrap().finite().unwrap(), b.val().unwrap().finite().unwrap());
        let s = a.add(&b);
        prop_assert!(is_exact_zero_or_at_least(&s, va.min(vb)));
        if va != vb {
            prop_assert_eq!(s.val().unwrap().finite(), Some(va.min(vb)));
        }
    }

    #[test]
    fn precision_never_grows(a in scalar(), b in scalar()) {
        prop_assume!(a.p() == b.p());
        let prod = a.mul(&b);
        prop_assert!(prod.rel_prec().unwrap() <= a.rel_prec().unwrap().min(b.rel_prec().unwrap()));
        let s = a.add(&b);
        prop_assert!(s.abs_prec() <= a.abs_prec().min(b.abs_prec()));
    }

    #[test]
    fn iwasawa_roundtrip(
        n in 2usize..=3,
        p in prop::sample::select(vec![2u64, 3]),
        m in prop::sample::select(vec![6u32, 8]),
        cells in prop::collection::vec(-50i64..50, 9),
        shifts in prop::collection::vec(-2i64..3, 3),
    ) {
        let g = matrix(n, p, m, &cells, |_, _, c| c)
            .mul(&PadicMatrix::diag_p_powers(&shifts[..n], p, m));
        prop_assume!(g.det().map(|d| d.val().is_ok_and(|v| v.finite().is_some())).unwrap_or(false));
        let f = iwasawa_decompose(&g).unwrap();
        prop_assert!(f.b.is_upper_triangular());
        prop_assert!(f.k.in_k0().unwrap());
        prop_assert!(f.b.mul(&f.k).agrees_with(&g));
    }

    #[test]
    fn inverse_residual(
        n in 2usize..=3,
        p in prop::sample::select(vec![2u64, 3]),
        cells in prop::collection::vec(-30i64..30, 9),
    ) {
        let g = matrix(n, p, 10, &cells, |_, _, c| c);
        prop_assume!(g.det().map(|d| d.val().is_ok_and(|v| v.finite().is_some())).unwrap_or(false));
        let inv = g.inverse().unwrap();
        prop_assert!(g.mul(&inv).agrees_with(&PadicMatrix::identity(n, p, 10)));
    }

    #[test]
    fn iwahori_factor_roundtrip(
        n in 2usize..=3,
        p in prop::sample::select(vec![2u64, 3]),
        e in 0i64..3,
        cells in prop::collection::vec(-40i64..40, 9),
    ) {
        let m = 12;
        let chamber: Vec<Vec<i64>> = (0..n).map(|k| (0..n).map(|i| i64::from(i < k)).collect()).collect();
        let spec = filtration_spec(p, &facet_of(&barycenter(&chamber)).into(), &level(e)).unwrap();
        // scale each entry by p^(its congruence exponent) so the matrix lands in the group
        let g = matrix(n, p, m, &cells, |i, j, c| {
            if i == j {
                let k = spec.diag_exp(i).unwrap_or(0);
                let c = if c.rem_euclid(p as i64) == 0 { c + 1 } else { c };
                if k == 0 { c } else { 1 + pk(p, k as u32) * c }
            } else {
                pk(p, spec.off_exp(i, j).unwrap_or(0).max(0) as u32) * c
            }
        });
        prop_assume!(membership(&g, &spec).unwrap_or(false));
        let f = iwahori_factor(&g, &spec).unwrap();
        prop_assert!(f.product().agrees_with(&g));
    }

    #[test]
    fn commutators_deepen(
        n in 2usize..=3,
        p in prop::sample::select(vec![2u64, 3]),
        a in 0i64..3,
        b in 0i64..3,
        x in prop::collection::vec(-20i64..20, 9),
        y in prop::collection::vec(-20i64..20, 9),
    ) {
        let m = 16;
        // U_o^(e) = 1 + p^(e+1) M_n(Z_p)
        let g = matrix(n, p, m, &x, |i, j, c| i64::from(i == j) + pk(p, (a + 1) as u32) * c);
        let h = matrix(n, p, m, &y, |i, j, c| i64::from(i == j) + pk(p, (b + 1) as u32) * c);
        let c = g.commutator(&h).unwrap();
        prop_assert!(membership(&c, &origin_spec(n, p, a + b + 1).unwrap()).unwrap());
    }

    #[test]
    fn height_is_additive(n in 2usize..6) {
        let rs = build_root_system(n).unwrap();
        let pos: Vec<_> = rs.roots.iter().filter(|r| r.is_positive()).cloned().collect();
        for a in &pos {
            for b in &pos {
                if let Some(s) = a.add(b) {
                    prop_assert_eq!(height(&s).unwrap(), height(a).unwrap() + height(b).unwrap());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn idempotents_are_idempotent(
        p in prop::sample::select(vec![2u64, 3]),
        x in prop::collection::vec(-1i64..=1, 2),
        e in 0i64..2,
        chi in prop::sample::select(vec!["trivial", "sign"]),
    ) {
        let rep = FiniteLevelRep::<Rational>::principal_series(2, p, TorusCharacter::parse(chi, 2, p).unwrap(), 3).unwrap();
        let spec = filtration_spec(p, &ApartmentPoint::from_ints(&x).unwrap().into(), &level(e)).unwrap();
        prop_assume!(spec.level_needed().is_some_and(|l| l <= 3));
        let idem = rep.idempotent(&spec).unwrap();
        prop_assert_eq!(idem.mul(&idem), idem);
    }

    #[test]
    fn action_is_multiplicative_and_traces_cyclic(
        p in prop::sample::select(vec![2u64, 3]),
        x in prop::collection::vec(-20i64..20, 4),
        y in prop::collection::vec(-20i64..20, 4),
    ) {
        let rep = FiniteLevelRep::<Rational>::principal_series(2, p, TorusCharacter::trivial(2, p), 3).unwrap();
        let unitize = |i: usize, j: usize, c: i64| if i == j && c.rem_euclid(p as i64) == 0 { c + 1 } else { c };
        let g = matrix(2, p, 10, &x, unitize);
        let h = matrix(2, p, 10, &y, unitize);
        prop_assume!(g.in_k0().unwrap() && h.in_k0().unwrap());
        let (a, b) = (rep.act(&g).unwrap(), rep.act(&h).unwrap());
        prop_assert_eq!(rep.act(&g.mul(&h)).unwrap(), a.compose(&b));
        prop_assert_eq!(a.compose(&b).trace(), b.compose(&a).trace());
    }
}

/// Sums the boundary of the boundary facet by facet.
fn boundary_squared(c: &BuildingComplex) -> bool {
    for idx in 0..c.facets.len() {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for (s, tau) in c.boundary(idx).unwrap() {
            for (t, rho) in c.boundary(tau).unwrap() {
                *acc.entry(rho).or_default() += s * t;
            }
        }
        if acc.values().any(|&v| v != 0) {
            return false;
        }
    }
    true
}

#[test]
fn boundary_squares_to_zero() {
    for (n, p, m) in [(2, 2, 2), (2, 3, 1), (3, 2, 1)] {
        assert!(
            boundary_squared(&BuildingComplex::ball(n, p, m).unwrap()),
            "n={n} p={p} m={m}"
        );
    }
    for n in 2..=4 {
        let b = ball_complex(n, 1).unwrap();
        for f in &b.facets {
            let mut acc: HashMap<_, i64> = HashMap::new();
            for (s, g) in boundary_chain(f) {
                for (t, h) in boundary_chain(&g) {
                    *acc.entry(h).or_default() += s * t;
                }
            }
            assert!(acc.values().all(|&v| v == 0));
        }
    }
}
