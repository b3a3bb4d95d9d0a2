//! Finite-level principal series models, Hecke idempotents and the Schneider-Stuhler complex.

pub mod character;
pub mod complex;
pub mod model;
pub mod scan;

pub use character::{ResidueCharacter, TorusCharacter};
pub use complex::{
    cancellation_check, chain_complex, euler_idempotent, euler_report, level_check, tau_sigma,
    ChainComplexData, EulerReport, HomologyReport,
};
pub use model::{FiniteLevelRep, LinearOperator, Monomial};
pub use scan::{
    character_scan, growth_table, k_s, ConstancyReport, GrowthRow, GrowthTable, ScanCell,
};
