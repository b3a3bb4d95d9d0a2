//! Finite subcomplexes of the building: facets as sorted vertex-lattice lists, each with a
//! `GL_n(Z_p)` witness carrying it from a facet of the standard apartment.

use super::lattice::{k0_generators, working_digits, VertexLattice};
use crate::apartment::{ball_complex, facet_of, segment_facets, ApartmentPoint, Facet};
use crate::error::{Error, Result};
use crate::guard;
use crate::padic::modular::ModRing;
use crate::padic::PadicMatrix;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Ball(i64),
    ClosedFacet(Facet),
    Segment(Vec<i64>, Vec<i64>),
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildingFacet {
    pub vertices: Vec<VertexLattice>,
    /// Apartment facet `sigma'` with `witness * sigma' = self`.
    pub base: Facet,
    /// Witness in `GL_n(Z_p)`, entries mod `p^digits`.
    #[serde(skip)]
    pub witness: Vec<u64>,
}

impl BuildingFacet {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildingComplex {
    pub n: usize,
    pub p: u64,
    pub shape: Shape,
    /// Sorted by dimension, then vertex list.
    pub facets: Vec<BuildingFacet>,
    pub digits: u32,
    #[serde(skip)]
    index: HashMap<Vec<VertexLattice>, usize>,
}

fn apartment_facet_vertices(p: u64, f: &Facet) -> Vec<VertexLattice> {
    let mut v: Vec<VertexLattice> = f
        .vertices()
        .iter()
        .map(|x| VertexLattice::from_apartment(p, x))
        .collect();
    v.sort();
    v
}

impl BuildingComplex {
    fn assemble(n: usize, p: u64, shape: Shape, mut facets: Vec<BuildingFacet>) -> Self {
        facets.sort_by(|a, b| {
            a.dim()
                .cmp(&b.dim())
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        let index = facets
            .iter()
            .enumerate()
            .map(|(i, f)| (f.vertices.clone(), i))
            .collect();
        BuildingComplex {
            n,
            p,
            shape,
            facets,
            digits: working_digits(p),
            index,
        }
    }

    fn from_apartment_facets(n: usize, p: u64, shape: Shape, fs: &[Facet]) -> Self {
        let id = ModRing::new(p, working_digits(p)).identity(n);
        let facets = fs
            .iter()
            .map(|f| BuildingFacet {
                vertices: apartment_facet_vertices(p, f),
                base: f.clone(),
                witness: id.clone(),
            })
            .collect();
        Self::assemble(n, p, shape, facets)
    }

    /// `B_m`: the `GL_n(Z_p)`-orbit of the apartment ball of radius `m`.
    pub fn ball(n: usize, p: u64, m: i64) -> Result<Self> {
        let apt = ball_complex(n, m)?;
        let digits = working_digits(p);
        let ring = ModRing::new(p, digits);
        let gens = k0_generators(n, p, digits);
        let gen_res: Vec<Vec<u64>> = gens
            .iter()
            .map(|g| g.residues(digits))
            .collect::<Result<_>>()?;
        let bound = guard::enumeration_guard();
        let mut seen: HashMap<Vec<VertexLattice>, usize> = HashMap::new();
        let mut facets: Vec<BuildingFacet> = Vec::new();
        let mut queue = VecDeque::new();
        for f in &apt.facets {
            let vs = apartment_facet_vertices(p, f);
            if !seen.contains_key(&vs) {
                seen.insert(vs.clone(), facets.len());
                queue.push_back(facets.len());
                facets.push(BuildingFacet {
                    vertices: vs,
                    base: f.clone(),
                    witness: ring.identity(n),
                });
            }
        }
        let mut cache: HashMap<(VertexLattice, usize), VertexLattice> = HashMap::new();
        while let Some(idx) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let mut vs = Vec::with_capacity(facets[idx].vertices.len());
                for v in &facets[idx].vertices {
                    let key = (v.clone(), gi);
                    let w = match cache.get(&key) {
                        Some(w) => w.clone(),
                        None => {
                            let w = v.act(g)?;
                            cache.insert(key, w.clone());
                            w
                        }
                    };
                    vs.push(w);
                }
                vs.sort();
                if seen.contains_key(&vs) {
                    continue;
                }
                guard::check_against(facets.len() as u128 + 1, bound)?;
                let witness = ring.mat_mul(n, &gen_res[gi], &facets[idx].witness);
                seen.insert(vs.clone(), facets.len());
                queue.push_back(facets.len());
                let base = facets[idx].base.clone();
                facets.push(BuildingFacet {
                    vertices: vs,
                    base,
                    witness,
                });
            }
        }
        Ok(Self::assemble(n, p, Shape::Ball(m), facets))
    }

    /// Closure of one apartment facet.
    pub fn closed_facet(p: u64, sigma: &Facet) -> Self {
        Self::from_apartment_facets(
            sigma.n(),
            p,
            Shape::ClosedFacet(sigma.clone()),
            &sigma.faces(),
        )
    }

    /// Facets met by the segment `[x, z]` between apartment vertices, with their faces.
    pub fn segment(p: u64, x: &[i64], z: &[i64]) -> Result<Self> {
        let a = ApartmentPoint::from_ints(x)?;
        let b = ApartmentPoint::from_ints(z)?;
        let mut all = BTreeSet::new();
        for f in segment_facets(&a, &b)? {
            for g in f.faces() {
                all.insert(g);
            }
        }
        let fs: Vec<Facet> = all.into_iter().collect();
        Ok(Self::from_apartment_facets(
            x.len(),
            p,
            Shape::Segment(x.to_vec(), z.to_vec()),
            &fs,
        ))
    }

    /// Accepts an explicit facet list only when it is a ball or a closed facet.
    pub fn from_vertex_sets(n: usize, p: u64, sets: &[Vec<VertexLattice>]) -> Result<Self> {
        let mut want: BTreeSet<Vec<VertexLattice>> = BTreeSet::new();
        for s in sets {
            let mut s = s.clone();
            s.sort();
            want.insert(s);
        }
        let top = want
            .iter()
            .max_by_key(|s| s.len())
            .ok_or_else(|| Error::NonConvex("empty complex".into()))?;
        if want.iter().filter(|s| s.len() == top.len()).count() == 1
            && top.iter().all(|v| v.in_standard_apartment())
        {
            let coords: Vec<Vec<i64>> = top.iter().map(|v| v.coords()).collect();
            let sigma = facet_of(&crate::apartment::barycenter(&coords));
            let c = Self::closed_facet(p, &sigma);
            if c.vertex_sets() == want {
                return Ok(c);
            }
        }
        let o = VertexLattice::origin(n, p);
        let mut radius = 0;
        for s in &want {
            for v in s {
                radius = radius.max(o.distance(v)?);
            }
        }
        let b = Self::ball(n, p, radius)?;
        if b.vertex_sets() == want {
            return Ok(b);
        }
        Err(Error::NonConvex(
            "only balls, closed facets and segments are accepted".into(),
        ))
    }

    fn vertex_sets(&self) -> BTreeSet<Vec<VertexLattice>> {
        self.facets.iter().map(|f| f.vertices.clone()).collect()
    }

    pub fn top_dim(&self) -> usize {
        self.facets.iter().map(|f| f.dim()).max().unwrap_or(0)
    }

    pub fn indices_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| self.facets[i].dim() == d)
            .collect()
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        (0..=self.top_dim())
            .map(|d| self.indices_of_dim(d).len())
            .collect()
    }

    pub fn index_of(&self, vertices: &[VertexLattice]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    pub fn vertices(&self) -> Vec<&VertexLattice> {
        self.facets
            .iter()
            .filter(|f| f.dim() == 0)
            .map(|f| &f.vertices[0])
            .collect()
    }

    /// Codimension-one faces with signs `(-1)^i`, `i` the position of the dropped vertex.
    pub fn boundary(&self, idx: usize) -> Result<Vec<(i64, usize)>> {
        let vs = &self.facets[idx].vertices;
        if vs.len() < 2 {
            return Ok(Vec::new());
        }
        (0..vs.len())
            .map(|skip| {
                let sub: Vec<VertexLattice> = vs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, v)| v.clone())
                    .collect();
                let j = self
                    .index_of(&sub)
                    .ok_or_else(|| Error::NonConvex("complex is not closed under faces".into()))?;
                Ok((if skip % 2 == 0 { 1 } else { -1 }, j))
            })
            .collect()
    }

    pub fn witness_matrix(&self, idx: usize) -> PadicMatrix {
        PadicMatrix::from_residues(self.n, self.p, &self.facets[idx].witness, self.digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_balls() {
        let b = BuildingComplex::ball(2, 2, 1).unwrap();
        assert_eq!(b.count_by_dim(), vec![4, 3]);
        let b = BuildingComplex::ball(2, 3, 2).unwrap();
        assert_eq!(b.count_by_dim(), vec![17, 16]);
        for i in 0..b.facets.len() {
            for (_, j) in b.boundary(i).unwrap() {
                assert!(b.facets[j].dim() + 1 == b.facets[i].dim());
            }
        }
    }

    #[test]
    fn witnesses_carry_base_facets() {
        let b = BuildingComplex::ball(2, 2, 2).unwrap();
        for i in 0..b.facets.len() {
            let k = b.witness_matrix(i);
            let mut moved: Vec<VertexLattice> = apartment_facet_vertices(2, &b.facets[i].base)
                .iter()
                .map(|v| v.act(&k).unwrap())
                .collect();
            moved.sort();
            assert_eq!(moved, b.facets[i].vertices);
        }
    }

    #[test]
    fn rejects_non_convex() {
        let p = 2;
        let a = VertexLattice::from_apartment(p, &[1, 0]);
        let c = VertexLattice::from_apartment(p, &[-1, 0]);
        assert!(matches!(
            BuildingComplex::from_vertex_sets(2, p, &[vec![a], vec![c]]),
            Err(Error::NonConvex(_))
        ));
        let o = VertexLattice::origin(2, p);
        assert!(BuildingComplex::from_vertex_sets(2, p, &[vec![o]]).is_ok());
    }
}
