//! Numerical laboratory for singular traces: characteristic sequences,
//! Dixmier traces, spectral zeta residues and the Wodzicki residue on flat
//! tori.

pub mod dixmier;
pub mod geomspec;
pub mod matrixlab;
pub mod numeric;
pub mod seqkernel;
pub mod wodzicki;
pub mod zetalab;

pub use dixmier::{
    dixmier_value, dixmier_value_model, DixmierConfig, DixmierValue, LimitBracket, Measurable,
    ResidueEstimate,
};
pub use geomspec::{ModelSpec, SpectralModel};
pub use seqkernel::{CharacteristicSequence, IndexSchedule, PrefixSumTable};
pub use wodzicki::{PrincipalSymbol, QuadratureGrid};
