//! Simulator and security analyzer for bit string commitment with
//! polarization-encoded mesoscopic coherent states.
//!
//! Alice commits to one of `M` linear polarizations by sending Bob a coherent
//! pulse; Bob stores it until Alice reveals her choice and then checks it with
//! a rotator, a polarization beam splitter, a conventional detector on the
//! expected output and a single-photon detector on the other.
//!
//! * [`polarization`]: states, rotations, overlaps and photon-number sizing.
//! * [`security`]: closed-form attack probabilities and security tables.
//! * [`sim`]: photon-level Monte Carlo of the receiver and the attacks.
//! * [`protocol`]: commit/reveal state machines, message codecs, transcripts.

pub mod error;
pub mod polarization;
pub mod protocol;
pub mod security;
pub mod sim;

pub use error::{Error, Result};
pub use polarization::{
    mean_photons_from_rs1, neighbor_overlap, rotate, rs1_from_mean_photons, state_angle, PolarizationPulse,
    ProtocolParams,
};
pub use protocol::{
    AliceStrategy, BobSession, MessageKind, Payload, Phase, ProtocolMessage, SessionId, SessionOutcome, SessionTally,
    VerdictReason,
};
pub use security::{
    alice_cheat_probability, brute_force_probability, cloning_fidelity, qcm_condition_holds, qcm_secure,
    security_table, PriorKind, SecurityReport,
};
pub use sim::{DetectionRecord, DetectorModel, Estimate, MeasurementSetup, SimConfig};
