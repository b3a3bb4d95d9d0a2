//! Truncated p-adic scalars and matrices, and arithmetic modulo `p^k`.

mod iwasawa;
mod matrix;
pub mod modular;
mod scalar;

pub use iwasawa::{iwasawa_decompose, Iwasawa};
pub use matrix::PadicMatrix;
pub use scalar::{max_digits, Padic, Tri, Valuation};

pub(crate) use matrix::pick_pivot;

/// Working precision for an operation that must certify thresholds up to `max_threshold`.
pub fn default_precision(max_threshold: i64) -> u32 {
    (max_threshold.max(0) + 3) as u32
}

/// Required headroom per operation class, in digits beyond the largest threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PrecisionBudget {
    pub membership: u32,
    pub factorization: u32,
    pub conjugation_scan: u32,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            membership: 1,
            factorization: 2,
            conjugation_scan: 3,
        }
    }
}

impl PrecisionBudget {
    pub fn for_membership(&self, threshold: i64) -> u32 {
        (threshold.max(0) as u32) + self.membership
    }

    pub fn for_factorization(&self, threshold: i64) -> u32 {
        (threshold.max(0) as u32) + self.factorization
    }

    pub fn for_conjugation(&self, r: i64, sd: i64) -> u32 {
        ((r + sd).max(0) as u32) + self.conjugation_scan
    }
}
