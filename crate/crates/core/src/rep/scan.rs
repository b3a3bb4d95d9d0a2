//! Character scans near a torus element and the growth table of `dim V^(K_e)`.

use super::complex::origin_spec;
use super::model::{split_center, FiniteLevelRep};
use super::TorusCharacter;
use crate::depth::singular_depth;
use crate::error::{domain, Error, Result};
use crate::field::{Field, Rational};
use crate::gl::congruence::CongruenceSpec;
use crate::gl::cosets::haar_measure;
use crate::gl::flags::{flag_cosets, flag_count_formula};
use crate::gl::lattice::{working_digits, VertexLattice};
use crate::gl::vertices_in_ball;
use crate::guard;
use crate::padic::PadicMatrix;
use crate::provenance::Provenance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, Serialize)]
pub struct ScanCell {
    pub s: i64,
    /// `chi_(K_s)(gamma)`.
    pub value: String,
    pub evaluations: usize,
    pub all_equal: bool,
    pub distinct_values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstancyReport {
    pub gamma: Vec<String>,
    pub compact: bool,
    pub e: i64,
    pub r_split: i64,
    pub r_general: i64,
    pub cells: Vec<ScanCell>,
    /// Every evaluated `gamma h` and `u gamma u'` gave `chi_(K_s)(gamma)`, for every `s`.
    pub constant: bool,
    /// Smallest scanned `s` from which `chi_(K_s)(gamma)` no longer changes.
    pub stable_from: Option<i64>,
    pub stable_in_s: bool,
    pub h_cosets: u128,
    pub h_evaluated: usize,
    pub conjugate_samples: usize,
    pub h_provenance: Provenance,
    pub conjugate_provenance: Provenance,
}

/// `K_s = U_o^(s) = K(s + 1)`.
pub fn k_s(n: usize, p: u64, s: i64) -> CongruenceSpec {
    let mut k = CongruenceSpec::principal(n, p, s + 1);
    k.provenance = format!("K_{s}");
    k
}

fn random_principal(rng: &mut ChaCha8Rng, n: usize, p: u64, k: u32, m: u32) -> PadicMatrix {
    let pk = (p as i64).pow(k);
    let span = (p as i64).pow(m.saturating_sub(k));
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let a = rng.gen_range(0..span.max(1)) * pk;
                    if i == j {
                        1 + a
                    } else {
                        a
                    }
                })
                .collect()
        })
        .collect();
    PadicMatrix::from_ints(&rows, p, working_digits(p))
}

/// Scans `chi_(K_s)` around a regular diagonal `gamma` for `s` from `r_split` to `s_max`
/// (at most `m - 1`). Compact `gamma` also gets the `H_(r+)` cosets (all of them if they fit
/// the budget, else a seeded sample) and `budget` seeded `u gamma u'` with `u, u'` in `U_o^(r)`.
pub fn character_scan<F: Field>(
    gamma: &PadicMatrix,
    e: i64,
    rep: &FiniteLevelRep<F>,
    s_max: Option<i64>,
    budget: usize,
    seed: u64,
) -> Result<ConstancyReport> {
    let n = rep.n;
    let p = rep.p;
    let depth = singular_depth(gamma, e)?;
    let (Some(r), Some(rg)) = (depth.r_split, depth.r_general) else {
        return Err(Error::Irregular("gamma has equal eigenvalues".into()));
    };
    let top = s_max.unwrap_or(rep.m as i64 - 1).min(rep.m as i64 - 1);
    if top < r {
        return Err(Error::InsufficientPrecision(format!(
            "model precision {} leaves no s >= r = {r}",
            rep.m
        )));
    }
    let compact = split_center(gamma)?.is_some();
    let ss: Vec<i64> = (r..=top).collect();
    let mut values: Vec<F> = Vec::with_capacity(ss.len());
    let mut seen: Vec<Vec<F>> = vec![Vec::new(); ss.len()];
    let mut counts = vec![0usize; ss.len()];
    let mut h_cosets = 0u128;
    let mut h_evaluated = 0usize;
    let mut samples = 0usize;
    let mut prov = Provenance::ExactEnumeration;
    let conj_prov = Provenance::Sampled {
        seed,
        budget: budget as u64,
    };
    if compact {
        let idem: Vec<_> = ss
            .iter()
            .map(|&s| rep.idempotent(&k_s(n, p, s)))
            .collect::<Result<_>>()?;
        let base = rep.act(gamma)?;
        for e_s in &idem {
            values.push(base.trace_against(e_s));
        }
        let record =
            |mono: &super::Monomial<F>, seen: &mut Vec<Vec<F>>, counts: &mut Vec<usize>| {
                for (k, e_s) in idem.iter().enumerate() {
                    let v = mono.trace_against(e_s);
                    counts[k] += 1;
                    if !seen[k].contains(&v) {
                        seen[k].push(v);
                    }
                }
            };
        // H_(r+) cap T modulo level m: diagonal entries 1 + p^(r+1) a.
        let step = p.pow((r + 1) as u32);
        let per = (rep.ring().q / step).max(1);
        h_cosets = (per as u128).pow(n as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hs: Vec<Vec<u64>> = if h_cosets <= budget as u128 {
            (0..h_cosets as u64)
                .map(|mut code| {
                    (0..n)
                        .map(|_| {
                            let a = code % per;
                            code /= per;
                            1 + a * step
                        })
                        .collect()
                })
                .collect()
        } else {
            prov = Provenance::Sampled {
                seed,
                budget: budget as u64,
            };
            (0..budget)
                .map(|_| (0..n).map(|_| 1 + rng.gen_range(0..per) * step).collect())
                .collect()
        };
        for h in &hs {
            let hm = PadicMatrix::diag(
                &h.iter()
                    .map(|&x| crate::padic::Padic::from_int(x as i64, p, working_digits(p)))
                    .collect::<Vec<_>>(),
            );
            record(&rep.act(&gamma.mul(&hm))?, &mut seen, &mut counts);
            h_evaluated += 1;
        }
        for _ in 0..budget {
            let u = random_principal(&mut rng, n, p, (r + 1) as u32, rep.m);
            let v = random_principal(&mut rng, n, p, (r + 1) as u32, rep.m);
            record(&rep.act(&u.mul(gamma).mul(&v))?, &mut seen, &mut counts);
            samples += 1;
        }
    } else {
        for &s in &ss {
            values.push(rep.chi_k(gamma, &k_s(n, p, s))?);
        }
    }
    let cells: Vec<ScanCell> = ss
        .iter()
        .enumerate()
        .map(|(k, &s)| ScanCell {
            s,
            value: values[k].to_string(),
            evaluations: counts[k] + 1,
            all_equal: seen[k].iter().all(|v| *v == values[k]),
            distinct_values: seen[k].iter().map(|v| v.to_string()).collect(),
        })
        .collect();
    let last = values.last().expect("nonempty range").clone();
    let mut stable_from = *ss.last().expect("nonempty");
    for k in (0..ss.len()).rev() {
        if values[k] == last {
            stable_from = ss[k];
        } else {
            break;
        }
    }
    Ok(ConstancyReport {
        gamma: (0..n).map(|i| gamma.get(i, i).to_string()).collect(),
        compact,
        e,
        r_split: r,
        r_general: rg,
        constant: cells.iter().all(|c| c.all_equal),
        stable_in_s: values.iter().all(|v| *v == last),
        stable_from: Some(stable_from),
        cells,
        h_cosets,
        h_evaluated,
        conjugate_samples: samples,
        h_provenance: prov,
        conjugate_provenance: conj_prov,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub e: i64,
    /// `|B \ G / K_e|` by enumeration of canonical flag cosets.
    pub double_cosets: u128,
    pub closed_form: u128,
    pub dim_invariants: usize,
    pub m_v: usize,
    /// `m_V (e + 1)^(n - 1) Q^e`.
    pub bound: u128,
    pub ratio_to_bound: Rational,
    /// `dim V^(K_e) / q^(e n(n-1)/2)`.
    pub ratio_to_q_power: Rational,
    pub mu_times_dim: Rational,
    /// `U_o^(e)`-orbits on the vertices of `B_(e - level)`.
    pub ball_orbits: usize,
    pub ball_vertices: usize,
    pub exceeds_bound: bool,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTable {
    pub n: usize,
    pub p: u64,
    pub character: String,
    pub level: u32,
    pub q_factor: u128,
    pub rows: Vec<GrowthRow>,
    /// `max dim / (m_V (e+1)^(n-1) Q^e)` over the rows.
    pub measured_constant: Rational,
    pub mu_dim_strictly_decreasing: bool,
    pub orbits_match: bool,
}

/// Orbits of a group, given by generators, on a vertex set it preserves.
pub fn vertex_orbits(gens: &[PadicMatrix], verts: &[VertexLattice]) -> Result<usize> {
    let index: HashMap<&VertexLattice, usize> =
        verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for (i, v) in verts.iter().enumerate() {
        for g in gens {
            let w = v.act(g)?;
            let j = *index
                .get(&w)
                .ok_or_else(|| domain("vertex set is not stable"))?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let roots: BTreeSet<usize> = (0..verts.len()).map(|i| find(&mut parent, i)).collect();
    Ok(roots.len())
}

pub fn growth_table(n: usize, p: u64, e_max: i64, chi: &TorusCharacter) -> Result<GrowthTable> {
    if e_max < 0 {
        return Err(domain("e_max must be >= 0"));
    }
    guard::check(flag_count_formula(n, p, (e_max + 1) as u32))?;
    let level = chi.level();
    let q_factor = (p as u128).pow((n * (n - 1) / 2) as u32);
    let dim_at = |m: u32| -> Result<usize> {
        Ok(FiniteLevelRep::<Rational>::principal_series(n, p, chi.clone(), m)?.dim())
    };
    let m_v = dim_at(level + 1)?;
    let mut rows = Vec::new();
    for e in level as i64..=e_max {
        let k = (e + 1) as u32;
        let cosets = flag_cosets(n, p, k)?.len() as u128;
        let dim = dim_at(k)?;
        let bound = m_v as u128 * ((e + 1) as u128).pow((n - 1) as u32) * q_factor.pow(e as u32);
        let (mu, _) = haar_measure(&CongruenceSpec::principal(n, p, e + 1))?;
        let radius = e - level as i64;
        let verts = vertices_in_ball(n, p, radius)?;
        let gens = super::model::spec_generators(&origin_spec(n, p, e)?, working_digits(p));
        let orbits = vertex_orbits(&gens, &verts)?;
        rows.push(GrowthRow {
            e,
            double_cosets: cosets,
            closed_form: flag_count_formula(n, p, k),
            dim_invariants: dim,
            m_v,
            bound,
            ratio_to_bound: Rational::new(dim as i64, bound as i64),
            ratio_to_q_power: Rational::new(dim as i64, q_factor.pow(e as u32) as i64),
            mu_times_dim: mu * Rational::integer(dim as i64),
            ball_orbits: orbits,
            ball_vertices: verts.len(),
            exceeds_bound: dim as u128 > bound,
            provenance: Provenance::ExactEnumeration,
        });
    }
    let measured_constant = rows
        .iter()
        .map(|r| r.ratio_to_bound.clone())
        .max()
        .unwrap_or_else(|| Rational::integer(0));
    let decreasing = rows
        .windows(2)
        .all(|w| w[1].mu_times_dim < w[0].mu_times_dim);
    let orbits_match = rows.iter().all(|r| r.ball_orbits == r.ball_vertices);
    Ok(GrowthTable {
        n,
        p,
        character: chi.label(),
        level,
        q_factor,
        rows,
        measured_constant,
        mu_dim_strictly_decreasing: decreasing,
        orbits_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_split_compact() {
        let p = 2;
        let rep =
            FiniteLevelRep::<Rational>::principal_series(2, p, TorusCharacter::trivial(2, p), 4)
                .unwrap();
        let g = PadicMatrix::from_ints(&[vec![1, 0], vec![0, 3]], p, 20);
        let rep_ = character_scan(&g, 0, &rep, None, 8, 7).unwrap();
        assert_eq!(rep_.r_split, 1);
        assert!(rep_.constant && rep_.stable_in_s);
        assert!(rep_.cells.iter().all(|c| c.value == "4"));
        let id = PadicMatrix::identity(2, p, 20);
        assert!(matches!(
            character_scan(&id, 0, &rep, None, 8, 7),
            Err(Error::Irregular(_))
        ));
    }

    #[test]
    fn central_scaling() {
        let p = 2;
        let chi = TorusCharacter::unramified_sign(2, p);
        let rep = FiniteLevelRep::<Rational>::principal_series(2, p, chi, 3).unwrap();
        let g = PadicMatrix::from_ints(&[vec![1, 0], vec![0, 3]], p, 20);
        let zg = PadicMatrix::from_ints(&[vec![2, 0], vec![0, 6]], p, 20);
        let a = character_scan(&g, 0, &rep, None, 4, 1).unwrap();
        let b = character_scan(&zg, 0, &rep, None, 4, 1).unwrap();
        for (x, y) in a.cells.iter().zip(&b.cells) {
            let x: i64 = x.value.parse().unwrap();
            let y: i64 = y.value.parse().unwrap();
            assert_eq!(y, -x);
        }
    }

    #[test]
    fn growth_rows() {
        let t = growth_table(2, 2, 2, &TorusCharacter::trivial(2, 2)).unwrap();
        let counts: Vec<u128> = t.rows.iter().map(|r| r.double_cosets).collect();
        assert_eq!(counts, vec![3, 6, 12]);
        assert_eq!(t.q_factor, 2);
        assert!(t.mu_dim_strictly_decreasing && t.orbits_match);
        assert_eq!(t.rows[2].ball_orbits, 10);
    }
}
