use serde::Serialize;

/// How a reported number was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    ExactEnumeration,
    OperatorIdentity,
    Sampled { seed: u64, budget: u64 },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::ExactEnumeration => write!(f, "exact-enumeration"),
            Provenance::OperatorIdentity => write!(f, "operator-identity"),
            Provenance::Sampled { seed, budget } => {
                write!(f, "sampled(seed={seed}, budget={budget})")
            }
        }
    }
}
