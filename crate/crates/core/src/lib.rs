//! Exact computations on the Bruhat-Tits building of `GL_n(Q_p)`.

pub mod apartment;
pub mod depth;
pub mod error;
pub mod field;
pub mod gl;
pub mod guard;
pub mod linalg;
pub mod padic;
pub mod provenance;
pub mod rep;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Cyclotomic, Field, Rational};

/// Exact matrices over the rationals.
pub type QMatrix = linalg::Matrix<Rational>;

/// Exact principal series models over the rationals.
pub type RationalRep = rep::FiniteLevelRep<Rational>;

/// Orientation conventions every report is computed under: vertex lattices in lexicographic
/// Hermite normal form, root `(i, j)` is `e_i - e_j`, `K_e = U_o^(e) = K(e + 1)`.
pub const CONVENTION: &str = "lex-hnf;root(i,j)=e_i-e_j;K_e=K(e+1)";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
