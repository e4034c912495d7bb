//! Characteristic sequences and the elementary functionals on them: μ_k,
//! the partial sums σ_k and the logarithmic means γ_k = σ_k / ln k.

mod blocks;
pub mod defs;
mod functionals;
mod prefix;
mod schedule;
mod sequence;
mod tail;

pub use defs::{load_definitions, parse_definitions, SequenceDef};
pub use blocks::{Block, BlockBound, BlockEnd, BlockValue, Blocks, EXACT_INDEX_LIMIT};
pub use functionals::{
    gamma, l1inf_diagnostic, mu, pairing_bound, sigma, sigma_witness, L1InfDiagnostic, Membership,
    SigmaBound, WitnessSource,
};
pub use prefix::PrefixSumTable;
pub use schedule::IndexSchedule;
pub use sequence::{CharacteristicSequence, Rule};
pub use tail::{AsymptoticClass, Epsilon, TailDescriptor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("indices start at 1")]
    ZeroIndex,
    #[error("gamma needs k >= 2, got {0}")]
    GammaIndex(u64),
    #[error("term {index} is negative")]
    Negative { index: u64 },
    #[error("term {index} is not finite")]
    NonFinite { index: u64 },
    #[error("sequence increases at index {index}")]
    NotMonotone { index: u64 },
    #[error("index {index} lies beyond the represented range")]
    IndexOverflow { index: u64 },
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("scale factor must be finite and nonnegative, got {0}")]
    InvalidScale(f64),
    #[error("sequence definition: {0}")]
    Definition(String),
}
