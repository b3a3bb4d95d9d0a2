//! The concrete `GL_n(Q_p)` model: congruence subgroups, lattice-class vertices, flag cosets.

pub mod building;
pub mod congruence;
pub mod cosets;
pub mod flags;
pub mod lattice;
pub mod parabolic;

pub use building::{BuildingComplex, BuildingFacet, Shape};
pub use congruence::{
    filtration_spec, iwahori_factor, level, membership, CongruenceSpec, HaarWeight, IwahoriFactors,
};
pub use cosets::{gl_order, haar_measure, index_closed_form, quotient_cosets, CosetReport};
pub use flags::{
    brute_force_orbit_count, double_coset_count, flag_cosets, flag_count_formula, FlagCoset,
};
pub use lattice::{elementary_divisors, vertices_in_ball, VertexLattice};
pub use parabolic::{contracted_parabolic, ContractedParabolic};

use crate::error::Result;
use crate::padic::PadicMatrix;

pub fn act_vertex(g: &PadicMatrix, v: &VertexLattice) -> Result<VertexLattice> {
    v.act(g)
}
