//! Simulation of quantum displacement: teleportation and entanglement
//! swapping between ququarts and qubit pairs through coupled maximally
//! entangled bases, plus numerical no-cloning obstructions.
//!
//! Every table the protocols rely on (correction unitaries, swapping
//! pairings) is derived from the states themselves; printed tables are only
//! ever diffed against the derived ones.

pub mod bases;
pub mod cli;
pub mod cloning;
pub mod displacement;
pub mod errata;
pub mod record;
pub mod swapping;
pub mod tensor;

pub use bases::{BasisFamily, BasisLabel, Letter};
pub use displacement::{Protocol, ProtocolConfig, ProtocolTrace, QuquartState, Variant};
pub use errata::{ErrataReport, Verdict};
pub use record::Record;
pub use swapping::{PairingTable, SwapConfig, SwapVariant};
pub use tensor::{Ket, RegisterShape, UnitaryMatrix, C64};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Protocol(#[from] displacement::ProtocolError),
    #[error(transparent)]
    Swap(#[from] swapping::SwapError),
}

/// Correction-table diff for displacement variant i followed by the
/// pairing-table diff for forward swapping variant i.
pub fn verify_printed_tables() -> Result<ErrataReport, VerifyError> {
    let cfg = displacement::variant_config(Variant::I);
    let derived = displacement::derive_correction_oracle(&cfg)?;
    let corrections = displacement::compare_correction_tables(&derived, &displacement::paper_correction_table());
    let swap = swapping::swap_variant_config(SwapVariant::I);
    let total = swapping::build_swap_total(&swap)?;
    let pairing = swapping::derive_pairing_table(&total, &swap)?;
    let pairings = swapping::compare_pairing_tables(&pairing, &swapping::paper_pairing_table());
    Ok(corrections.merge(pairings))
}
