//! Commit/reveal protocol between Alice (committer) and Bob (verifier).
//!
//! The quantum channel carries the classical description of the committed
//! coherent pulse; all quantum behavior lives in Bob's measurement.

mod message;
mod session;
mod transcript;

pub use message::{MessageKind, Payload, ProtocolMessage, SessionId, VerdictReason};
pub use session::{
    alice_commit, alice_reveal, run_session, run_session_with, run_sessions, session_stream, AliceStrategy, BobSession,
    Phase, SessionOutcome, SessionTally,
};
pub use transcript::{read_transcript, validate_transcript, write_transcript};
