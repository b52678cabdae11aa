use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::polarization::PolarizationPulse;

/// 128-bit session identifier, rendered as 32 lowercase hex digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SessionId(pub [u8; 16]);

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl FromStr for SessionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut id = [0u8; 16];
        hex::decode_to_slice(s, &mut id).map_err(|e| Error::Decode(format!("session id {s:?}: {e}")))?;
        Ok(Self(id))
    }
}

impl Serialize for SessionId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SessionId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MessageKind {
    CommitPulse,
    Reveal,
    Verdict,
}

impl MessageKind {
    fn tag(self) -> u8 {
        match self {
            MessageKind::CommitPulse => 1,
            MessageKind::Reveal => 2,
            MessageKind::Verdict => 3,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1 => Ok(MessageKind::CommitPulse),
            2 => Ok(MessageKind::Reveal),
            3 => Ok(MessageKind::Verdict),
            other => Err(Error::Decode(format!("unknown message kind tag {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageKind::CommitPulse => "COMMIT_PULSE",
            MessageKind::Reveal => "REVEAL",
            MessageKind::Verdict => "VERDICT",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why Bob accepted or rejected a reveal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictReason {
    /// Main detector fired, SPD dark.
    Confirmed,
    /// The single-photon detector fired: Alice lied.
    SpdClick,
    /// Nothing fired.
    NoDetection,
    /// Reserved for a receiver with an explicit power check. Bob's receiver
    /// enforces the minimum power statistically and never emits it.
    Underpowered,
}

impl VerdictReason {
    pub fn is_accepted(self) -> bool {
        self == VerdictReason::Confirmed
    }

    fn tag(self) -> u8 {
        match self {
            VerdictReason::Confirmed => 0,
            VerdictReason::SpdClick => 1,
            VerdictReason::NoDetection => 2,
            VerdictReason::Underpowered => 3,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(VerdictReason::Confirmed),
            1 => Ok(VerdictReason::SpdClick),
            2 => Ok(VerdictReason::NoDetection),
            3 => Ok(VerdictReason::Underpowered),
            other => Err(Error::Decode(format!("unknown verdict reason tag {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload {
    CommitPulse(PolarizationPulse),
    Reveal { choice_index: u32 },
    Verdict { accepted: bool, reason: VerdictReason },
}

impl Payload {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::CommitPulse(_) => MessageKind::CommitPulse,
            Payload::Reveal { .. } => MessageKind::Reveal,
            Payload::Verdict { .. } => MessageKind::Verdict,
        }
    }
}

/// A message exchanged between Alice and Bob.
///
/// Binary layout (little endian): kind tag `u8`, 16-byte session id, then
///
/// | kind          | tag | payload                                   |
/// |---------------|-----|-------------------------------------------|
/// | `COMMIT_PULSE`| 1   | mean photons `f64`, angle `f64`           |
/// | `REVEAL`      | 2   | choice index `u32`                        |
/// | `VERDICT`     | 3   | accepted `u8` (0/1), reason `u8`          |
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolMessage {
    pub session_id: SessionId,
    pub payload: Payload,
}

const HEADER_LEN: usize = 1 + 16;

impl ProtocolMessage {
    pub fn commit(session_id: SessionId, pulse: PolarizationPulse) -> Self {
        Self { session_id, payload: Payload::CommitPulse(pulse) }
    }

    pub fn reveal(session_id: SessionId, choice_index: u32) -> Self {
        Self { session_id, payload: Payload::Reveal { choice_index } }
    }

    pub fn verdict(session_id: SessionId, reason: VerdictReason) -> Self {
        Self { session_id, payload: Payload::Verdict { accepted: reason.is_accepted(), reason } }
    }

    pub fn kind(&self) -> MessageKind {
        self.payload.kind()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 16);
        out.push(self.kind().tag());
        out.extend_from_slice(&self.session_id.0);
        match self.payload {
            Payload::CommitPulse(pulse) => {
                out.extend_from_slice(&pulse.mean_photons().to_le_bytes());
                out.extend_from_slice(&pulse.angle().to_le_bytes());
            }
            Payload::Reveal { choice_index } => out.extend_from_slice(&choice_index.to_le_bytes()),
            Payload::Verdict { accepted, reason } => {
                out.push(u8::from(accepted));
                out.push(reason.tag());
            }
        }
        out
    }

    /// Decodes the canonical binary form. Anything that would not re-encode
    /// to the same bytes is rejected.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let (&tag, rest) = bytes.split_first().ok_or_else(|| Error::Decode("empty message".into()))?;
        let kind = MessageKind::from_tag(tag)?;
        if rest.len() < 16 {
            return Err(Error::Decode(format!("truncated session id: {} bytes", rest.len())));
        }
        let (id, body) = rest.split_at(16);
        let session_id = SessionId(id.try_into().expect("16 bytes"));
        let expect_len = |n: usize| {
            if body.len() == n {
                Ok(())
            } else {
                Err(Error::Decode(format!("{kind} payload must be {n} bytes, got {}", body.len())))
            }
        };
        let payload = match kind {
            MessageKind::CommitPulse => {
                expect_len(16)?;
                let mean_photons = f64::from_le_bytes(body[..8].try_into().expect("8 bytes"));
                let angle = f64::from_le_bytes(body[8..].try_into().expect("8 bytes"));
                Payload::CommitPulse(canonical_pulse(mean_photons, angle)?)
            }
            MessageKind::Reveal => {
                expect_len(4)?;
                Payload::Reveal { choice_index: u32::from_le_bytes(body.try_into().expect("4 bytes")) }
            }
            MessageKind::Verdict => {
                expect_len(2)?;
                let accepted = match body[0] {
                    0 => false,
                    1 => true,
                    b => return Err(Error::Decode(format!("accepted flag must be 0 or 1, got {b}"))),
                };
                verdict_payload(accepted, VerdictReason::from_tag(body[1])?)?
            }
        };
        Ok(Self { session_id, payload })
    }

    /// One JSON object: `{"kind", "session_id", "payload"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let payload = match self.payload {
            Payload::CommitPulse(pulse) => json!({ "mean_photons": pulse.mean_photons(), "angle": pulse.angle() }),
            Payload::Reveal { choice_index } => json!({ "choice_index": choice_index }),
            Payload::Verdict { accepted, reason } => json!({ "accepted": accepted, "reason": reason }),
        };
        json!({ "kind": self.kind(), "session_id": self.session_id, "payload": payload })
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let JsonMessage { kind, session_id, payload } = serde_json::from_value(value)?;
        let payload = match kind {
            MessageKind::CommitPulse => {
                let p: CommitJson = serde_json::from_value(payload)?;
                Payload::CommitPulse(canonical_pulse(p.mean_photons, p.angle)?)
            }
            MessageKind::Reveal => {
                let p: RevealJson = serde_json::from_value(payload)?;
                Payload::Reveal { choice_index: p.choice_index }
            }
            MessageKind::Verdict => {
                let p: VerdictJson = serde_json::from_value(payload)?;
                verdict_payload(p.accepted, p.reason)?
            }
        };
        Ok(Self { session_id, payload })
    }
}

fn canonical_pulse(mean_photons: f64, angle: f64) -> Result<PolarizationPulse> {
    let pulse = PolarizationPulse::new(mean_photons, angle).map_err(|e| Error::Decode(e.to_string()))?;
    if pulse.angle().to_bits() != angle.to_bits() {
        return Err(Error::Decode(format!("angle {angle} is not normalized to (-pi/2, pi/2]")));
    }
    Ok(pulse)
}

fn verdict_payload(accepted: bool, reason: VerdictReason) -> Result<Payload> {
    if accepted != reason.is_accepted() {
        return Err(Error::Decode(format!("verdict accepted={accepted} contradicts reason {reason:?}")));
    }
    Ok(Payload::Verdict { accepted, reason })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMessage {
    kind: MessageKind,
    session_id: SessionId,
    payload: serde_json::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommitJson {
    mean_photons: f64,
    angle: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RevealJson {
    choice_index: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerdictJson {
    accepted: bool,
    reason: VerdictReason,
}
