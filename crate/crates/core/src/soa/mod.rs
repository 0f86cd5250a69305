//! Lifting properties, presented cell complexes and the small object arguments.

mod cellularity;
mod cells;
mod factorize;
mod generators;
mod lifting;
mod membership;
mod pushdown;
mod retract;

pub use cellularity::{cellularity_search, CellularityOutcome};
pub use cells::{Cell, CellComplexPresentation, Stage};
pub use factorize::{
    classical_soa, fat_soa, FactorizationCertificate, FatLeft, IterationChain, LeftPart, Mode,
    SoaStatus, CERT_VERSION,
};
pub use generators::GeneratorSet;
pub use lifting::{lifts_against, rlp_check, squares, Lift, RlpReport, Square};
pub use membership::{po_membership, PoCertificate, PoWitness};
pub use pushdown::{push_down_cells, PushdownResult, Staging};
pub use retract::{
    eliminate_retract, retract_refactor, split_idempotent, RefactorCertificate, RetractCertificate,
    RetractOutcome, RetractTrace, Split,
};
