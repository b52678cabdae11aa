use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::message::{Payload, ProtocolMessage, SessionId, VerdictReason};
use crate::error::{domain, Error, Result};
use crate::polarization::{PolarizationPulse, ProtocolParams};
use crate::sim::{count_trials, measure, DetectorModel, MeasurementSetup, SimConfig};

/// How Alice plays the commitment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AliceStrategy {
    Honest,
    /// Send the chosen state, reveal a neighbor.
    NeighborCheat,
    /// Send the chosen state with its mean photon number scaled by `factor`.
    Underpower {
        factor: f64,
    },
}

impl AliceStrategy {
    fn validate(&self) -> Result<()> {
        if let AliceStrategy::Underpower { factor } = *self {
            if !(factor > 0.0 && factor < 1.0) {
                return domain(format!("underpower factor must lie in (0, 1), got {factor}"));
            }
        }
        Ok(())
    }
}

/// Alice's commit message for `choice`.
pub fn alice_commit(
    params: &ProtocolParams,
    session_id: SessionId,
    choice: usize,
    strategy: AliceStrategy,
) -> Result<ProtocolMessage> {
    strategy.validate()?;
    let pulse = params.committed_pulse(choice)?;
    let pulse = match strategy {
        AliceStrategy::Honest | AliceStrategy::NeighborCheat => pulse,
        AliceStrategy::Underpower { factor } => pulse.attenuate(factor)?,
    };
    Ok(ProtocolMessage::commit(session_id, pulse))
}

/// Alice's reveal message; a neighbor-swapping Alice claims the neighbor of
/// `choice`.
pub fn alice_reveal(
    params: &ProtocolParams,
    session_id: SessionId,
    choice: usize,
    strategy: AliceStrategy,
) -> Result<ProtocolMessage> {
    strategy.validate()?;
    let claimed = match strategy {
        AliceStrategy::NeighborCheat => params.claimed_neighbor(choice)?,
        _ => {
            params.state_angle(choice)?;
            choice
        }
    };
    Ok(ProtocolMessage::reveal(session_id, claimed as u32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AwaitCommit,
    Committed,
    Revealed,
    Closed,
}

impl Phase {
    fn expects(self) -> &'static str {
        match self {
            Phase::AwaitCommit => "COMMIT_PULSE",
            Phase::Committed => "REVEAL",
            Phase::Revealed => "measurement",
            Phase::Closed => "nothing (session closed)",
        }
    }
}

/// Bob's side of one commitment.
///
/// The committed pulse is held in a lossless quantum memory and is not
/// measured before the reveal.
#[derive(Debug, Clone)]
pub struct BobSession {
    params: ProtocolParams,
    detectors: DetectorModel,
    phase: Phase,
    session_id: Option<SessionId>,
    stored_pulse: Option<PolarizationPulse>,
    revealed: Option<usize>,
    transcript: Vec<ProtocolMessage>,
}

impl BobSession {
    pub fn new(params: ProtocolParams) -> Self {
        let detectors = DetectorModel::for_params(&params);
        Self::with_detectors(params, detectors)
    }

    pub fn with_detectors(params: ProtocolParams, detectors: DetectorModel) -> Self {
        Self {
            params,
            detectors,
            phase: Phase::AwaitCommit,
            session_id: None,
            stored_pulse: None,
            revealed: None,
            transcript: Vec::with_capacity(3),
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn stored_pulse(&self) -> Option<&PolarizationPulse> {
        self.stored_pulse.as_ref()
    }

    pub fn revealed_choice(&self) -> Option<usize> {
        self.revealed
    }

    pub fn transcript(&self) -> &[ProtocolMessage] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<ProtocolMessage> {
        self.transcript
    }

    fn out_of_order(&self, msg: &ProtocolMessage) -> Error {
        Error::ProtocolOrder { expected: self.phase.expects(), got: msg.kind().to_string() }
    }

    fn check_session(&self, msg: &ProtocolMessage) -> Result<()> {
        match self.session_id {
            Some(id) if id != msg.session_id => {
                Err(Error::SessionMismatch { expected: id.to_string(), got: msg.session_id.to_string() })
            }
            _ => Ok(()),
        }
    }

    /// Stores the committed pulse. No measurement happens.
    pub fn receive_commit(&mut self, msg: ProtocolMessage) -> Result<()> {
        let Payload::CommitPulse(pulse) = msg.payload else {
            return Err(self.out_of_order(&msg));
        };
        if self.phase != Phase::AwaitCommit {
            return Err(self.out_of_order(&msg));
        }
        self.session_id = Some(msg.session_id);
        self.stored_pulse = Some(pulse);
        self.transcript.push(msg);
        self.phase = Phase::Committed;
        Ok(())
    }

    /// Records Alice's claimed choice.
    pub fn receive_reveal(&mut self, msg: ProtocolMessage) -> Result<()> {
        let Payload::Reveal { choice_index } = msg.payload else {
            return Err(self.out_of_order(&msg));
        };
        if self.phase != Phase::Committed {
            return Err(self.out_of_order(&msg));
        }
        self.check_session(&msg)?;
        let choice = choice_index as usize;
        self.params.state_angle(choice)?;
        self.revealed = Some(choice);
        self.transcript.push(msg);
        self.phase = Phase::Revealed;
        Ok(())
    }

    /// Measures the stored pulse in the revealed basis and closes the session.
    pub fn decide<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ProtocolMessage> {
        let (Phase::Revealed, Some(pulse), Some(choice), Some(id)) =
            (self.phase, self.stored_pulse, self.revealed, self.session_id)
        else {
            return Err(Error::ProtocolOrder { expected: self.phase.expects(), got: "measurement".into() });
        };
        let setup = MeasurementSetup { rotator_angle: self.params.state_angle(choice)?, detectors: self.detectors };
        let record = measure(&pulse, &setup, rng);
        let reason = if record.spd_click {
            VerdictReason::SpdClick
        } else if record.main_click {
            VerdictReason::Confirmed
        } else {
            VerdictReason::NoDetection
        };
        let verdict = ProtocolMessage::verdict(id, reason);
        self.transcript.push(verdict);
        self.phase = Phase::Closed;
        Ok(verdict)
    }

    /// [`receive_reveal`](Self::receive_reveal) followed by
    /// [`decide`](Self::decide).
    pub fn verify<R: Rng + ?Sized>(&mut self, reveal: ProtocolMessage, rng: &mut R) -> Result<ProtocolMessage> {
        self.receive_reveal(reveal)?;
        self.decide(rng)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub transcript: Vec<ProtocolMessage>,
    pub verdict: VerdictReason,
}

impl SessionOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict.is_accepted()
    }
}

/// RNG driving a single session.
pub fn session_stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One full session with Bob's standard receiver.
pub fn run_session(
    params: &ProtocolParams,
    strategy: AliceStrategy,
    choice: usize,
    seed: u64,
) -> Result<SessionOutcome> {
    let detectors = DetectorModel::for_params(params);
    run_session_with(params, strategy, choice, &detectors, &mut session_stream(seed))
}

pub fn run_session_with<R: Rng + ?Sized>(
    params: &ProtocolParams,
    strategy: AliceStrategy,
    choice: usize,
    detectors: &DetectorModel,
    rng: &mut R,
) -> Result<SessionOutcome> {
    let session_id = SessionId(rng.random());
    let commit = alice_commit(params, session_id, choice, strategy)?;
    let reveal = alice_reveal(params, session_id, choice, strategy)?;
    let mut bob = BobSession::with_detectors(params.clone(), *detectors);
    bob.receive_commit(commit)?;
    let verdict = bob.verify(reveal, rng)?;
    let Payload::Verdict { reason, .. } = verdict.payload else {
        unreachable!("Bob only emits verdicts");
    };
    Ok(SessionOutcome { transcript: bob.into_transcript(), verdict: reason })
}

/// Verdict counts over many independent sessions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionTally {
    pub sessions: u64,
    pub confirmed: u64,
    pub spd_click: u64,
    pub no_detection: u64,
    pub underpowered: u64,
}

impl SessionTally {
    pub fn confirmed_rate(&self) -> f64 {
        self.confirmed as f64 / self.sessions as f64
    }
}

/// Runs `cfg.trials` sessions in parallel. Counts depend only on the seed.
pub fn run_sessions(
    params: &ProtocolParams,
    strategy: AliceStrategy,
    choice: usize,
    detectors: &DetectorModel,
    cfg: &SimConfig,
) -> Result<SessionTally> {
    // Surface argument errors before fanning out.
    alice_commit(params, SessionId::default(), choice, strategy)?;
    alice_reveal(params, SessionId::default(), choice, strategy)?;
    let [confirmed, spd_click, no_detection, underpowered] = count_trials(cfg, |rng| {
        let outcome = run_session_with(params, strategy, choice, detectors, rng).expect("validated session inputs");
        [
            outcome.verdict == VerdictReason::Confirmed,
            outcome.verdict == VerdictReason::SpdClick,
            outcome.verdict == VerdictReason::NoDetection,
            outcome.verdict == VerdictReason::Underpowered,
        ]
    });
    Ok(SessionTally { sessions: cfg.trials(), confirmed, spd_click, no_detection, underpowered })
}
