use std::io::Cursor;

use qbsc_core::polarization::ProtocolParams;
use qbsc_core::protocol::{
    read_transcript, run_session, run_sessions, validate_transcript, write_transcript, AliceStrategy, BobSession,
    MessageKind, Payload, VerdictReason,
};
use qbsc_core::security::alice_cheat_probability;
use qbsc_core::sim::{DetectorModel, SimConfig};
use qbsc_core::Error;

fn table_params(m: usize) -> ProtocolParams {
    ProtocolParams::uniform(m, 0.5, 0.75).unwrap()
}

#[test]
fn every_permutation_but_one_is_rejected() {
    let outcome = run_session(&table_params(4), AliceStrategy::Honest, 2, 11).unwrap();
    let t = outcome.transcript;
    validate_transcript(&t).unwrap();
    let perms = [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for perm in perms {
        let shuffled: Vec<_> = perm.iter().map(|&i| t[i]).collect();
        assert!(matches!(validate_transcript(&shuffled), Err(Error::ProtocolOrder { .. })), "{perm:?}");
    }
    assert!(validate_transcript(&t[..2]).is_err());
    let doubled_reveal = vec![t[0], t[1], t[1], t[2]];
    assert!(validate_transcript(&doubled_reveal).is_err());
}

#[test]
fn bob_rejects_out_of_order_delivery() {
    let p = table_params(3);
    let t = run_session(&p, AliceStrategy::Honest, 0, 3).unwrap().transcript;
    let mut bob = BobSession::new(p);
    assert!(bob.receive_commit(t[2]).is_err());
    assert!(bob.receive_reveal(t[1]).is_err());
    bob.receive_commit(t[0]).unwrap();
    assert!(bob.receive_commit(t[2]).is_err());
}

#[test]
fn transcripts_never_repeat_a_reveal() {
    let p = table_params(5);
    for seed in 0..200 {
        for strategy in [AliceStrategy::Honest, AliceStrategy::NeighborCheat, AliceStrategy::Underpower { factor: 0.3 }]
        {
            let t = run_session(&p, strategy, (seed % 5) as usize, seed).unwrap().transcript;
            assert_eq!(t.iter().filter(|m| m.kind() == MessageKind::Reveal).count(), 1);
            validate_transcript(&t).unwrap();
        }
    }
}

#[test]
fn jsonl_round_trip_is_bit_exact() {
    let outcome = run_session(&table_params(7), AliceStrategy::NeighborCheat, 6, 42).unwrap();
    let mut buf = Vec::new();
    write_transcript(&mut buf, &outcome.transcript).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().last().unwrap().contains("\"kind\":\"VERDICT\""));
    let back = read_transcript(Cursor::new(&buf)).unwrap();
    assert_eq!(back, outcome.transcript);
    let mut again = Vec::new();
    write_transcript(&mut again, &back).unwrap();
    assert_eq!(again, buf);
}

#[test]
fn neighbor_cheat_reproduces_cheat_probability() {
    for m in 2..=12 {
        let p = table_params(m);
        let trials = if m == 2 { 10_000_000 } else { 1_000_000 };
        let cfg = SimConfig::new(trials, 500 + m as u64).unwrap();
        let tally = run_sessions(&p, AliceStrategy::NeighborCheat, 0, &DetectorModel::for_params(&p), &cfg).unwrap();
        let expected = alice_cheat_probability(&p);
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((tally.confirmed_rate() - expected).abs() <= 3.0 * sigma, "M = {m}: {}", tally.confirmed_rate());
    }
}

#[test]
fn underpowered_alice_is_caught_by_missing_clicks() {
    let p = table_params(4);
    let cfg = SimConfig::new(200_000, 8).unwrap();
    let d = DetectorModel::for_params(&p);
    let full = run_sessions(&p, AliceStrategy::Honest, 1, &d, &cfg).unwrap();
    let weak = run_sessions(&p, AliceStrategy::Underpower { factor: 0.1 }, 1, &d, &cfg).unwrap();
    assert_eq!(weak.spd_click, 0);
    assert!(weak.no_detection > full.no_detection);
    let expected = (-0.75 * 0.1 * p.mean_photons()).exp();
    let sigma = (expected * (1.0 - expected) / 200_000.0f64).sqrt();
    assert!((weak.no_detection as f64 / 200_000.0 - expected).abs() <= 3.0 * sigma);
}

#[test]
fn concealing_before_reveal() {
    let p = table_params(4);
    let t = run_session(&p, AliceStrategy::Honest, 3, 1).unwrap().transcript;
    let mut bob = BobSession::new(p);
    bob.receive_commit(t[0]).unwrap();
    assert!(bob.revealed_choice().is_none());
    // Only the pulse description is held; its classical form carries no index.
    assert!(matches!(t[0].payload, Payload::CommitPulse(_)));
    assert_eq!(bob.transcript().len(), 1);
}

#[test]
fn honest_sessions_with_dark_counts_raise_false_alarms() {
    let p = table_params(2);
    let d = DetectorModel::for_params(&p).with_dark_counts(0.01).unwrap();
    let tally = run_sessions(&p, AliceStrategy::Honest, 0, &d, &SimConfig::new(500_000, 2).unwrap()).unwrap();
    let rate = tally.spd_click as f64 / 5e5;
    assert!((rate - 0.01).abs() <= 3.0 * (0.01f64 * 0.99 / 5e5).sqrt());
    assert!(tally.spd_click > 0);
    let verdicts = [VerdictReason::Confirmed, VerdictReason::SpdClick, VerdictReason::NoDetection];
    assert!(verdicts.iter().all(|v| v.is_accepted() == (*v == VerdictReason::Confirmed)));
}
