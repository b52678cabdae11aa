//! JSON Lines transcripts: one message object per line.

use std::io::{BufRead, Write};

use super::message::{MessageKind, ProtocolMessage};
use crate::error::{Error, Result};

pub fn write_transcript<W: Write>(mut out: W, messages: &[ProtocolMessage]) -> Result<()> {
    for msg in messages {
        serde_json::to_writer(&mut out, &msg.to_json())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads every non-blank line as a message. Ordering is not checked here;
/// see [`validate_transcript`].
pub fn read_transcript<R: BufRead>(input: R) -> Result<Vec<ProtocolMessage>> {
    let mut messages = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        messages.push(ProtocolMessage::from_json(serde_json::from_str(&line)?)?);
    }
    Ok(messages)
}

/// A complete session is exactly COMMIT_PULSE, REVEAL, VERDICT, all under
/// one session id.
pub fn validate_transcript(messages: &[ProtocolMessage]) -> Result<()> {
    const ORDER: [MessageKind; 3] = [MessageKind::CommitPulse, MessageKind::Reveal, MessageKind::Verdict];
    for (i, msg) in messages.iter().enumerate() {
        let Some(&expected) = ORDER.get(i) else {
            return Err(Error::ProtocolOrder { expected: "end of transcript", got: msg.kind().to_string() });
        };
        if msg.kind() != expected {
            return Err(Error::ProtocolOrder { expected: expected.name(), got: msg.kind().to_string() });
        }
        if msg.session_id != messages[0].session_id {
            return Err(Error::SessionMismatch {
                expected: messages[0].session_id.to_string(),
                got: msg.session_id.to_string(),
            });
        }
    }
    if let Some(missing) = ORDER.get(messages.len()) {
        return Err(Error::ProtocolOrder { expected: missing.name(), got: "end of transcript".into() });
    }
    Ok(())
}
