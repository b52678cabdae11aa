use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use qbsc_core::polarization::{
    mean_photons_from_rs1, neighbor_overlap, rotate, rs1_from_mean_photons, PolarizationPulse, ProtocolParams,
};
use qbsc_core::protocol::{MessageKind, Payload, ProtocolMessage, SessionId, VerdictReason};
use qbsc_core::security::{alice_cheat_probability, both_click_probability, brute_force_probability, cloning_fidelity};

/// `|⟨α,β|α′,β′⟩|²` for real two-mode coherent amplitudes, from the
/// single-mode overlap `|⟨a|b⟩|² = exp(−|a − b|²)`.
fn coherent_overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (-(a.0 - b.0).powi(2) - (a.1 - b.1).powi(2)).exp()
}

/// Explicit rotation matrix applied to the amplitude vector.
fn rotate_amplitudes(alpha: f64, beta: f64, theta: f64) -> (f64, f64) {
    (theta.cos() * alpha - theta.sin() * beta, theta.sin() * alpha + theta.cos() * beta)
}

#[test]
fn sizing_round_trip_grid() {
    for m in 2..=64 {
        for i in 1..=99 {
            let r = i as f64 / 100.0;
            let n = mean_photons_from_rs1(m, r).unwrap();
            let back = rs1_from_mean_photons(m, n).unwrap();
            assert!((back - r).abs() <= 1e-10 * r, "M = {m}, r = {r}: {back}");
        }
    }
}

#[test]
fn overlap_monotone_in_photons_and_angle() {
    let thetas: Vec<f64> = (0..=50).map(|i| i as f64 * FRAC_PI_2 / 50.0).collect();
    for n in [0.1, 1.0, 5.0, 20.0] {
        let o: Vec<f64> = thetas.iter().map(|&t| neighbor_overlap(n, t).unwrap()).collect();
        assert!(o.windows(2).all(|w| w[1] < w[0]));
    }
    for &t in &thetas[1..] {
        let o: Vec<f64> = [0.0, 0.5, 1.0, 4.0, 16.0].iter().map(|&n| neighbor_overlap(n, t).unwrap()).collect();
        assert!(o.windows(2).all(|w| w[1] < w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn sizing_round_trip(m in 2usize..=64, r in 0.001f64..0.999) {
        let back = rs1_from_mean_photons(m, mean_photons_from_rs1(m, r).unwrap()).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r);
    }

    #[test]
    fn rotation_conserves_photons(n in 0.0f64..1e4, angle in 0.0f64..FRAC_PI_2, theta in -10.0f64..10.0) {
        let pulse = PolarizationPulse::new(n, angle).unwrap();
        let rotated = rotate(&pulse, theta);
        prop_assert!((rotated.mean_photons() - n).abs() <= 1e-12 * n.max(f64::MIN_POSITIVE));
        let amp_n = rotated.alpha().powi(2) + rotated.beta().powi(2);
        prop_assert!((amp_n - n).abs() <= 1e-12 * n.max(1.0));
    }

    #[test]
    fn rotation_matches_matrix(n in 0.01f64..100.0, angle in 0.0f64..FRAC_PI_2, theta in -PI..PI) {
        let pulse = PolarizationPulse::new(n, angle).unwrap();
        let rotated = rotate(&pulse, theta);
        let (a, b) = rotate_amplitudes(pulse.alpha(), pulse.beta(), theta);
        // Equal up to a global sign.
        let same = (rotated.alpha() - a).abs() + (rotated.beta() - b).abs();
        let flipped = (rotated.alpha() + a).abs() + (rotated.beta() + b).abs();
        prop_assert!(same.min(flipped) < 1e-9 * n.sqrt().max(1.0));
    }

    #[test]
    fn overlap_matches_explicit_inner_product(n in 0.0f64..50.0, angle in 0.0f64..FRAC_PI_2, theta in 0.0f64..FRAC_PI_2) {
        let pulse = PolarizationPulse::new(n, angle).unwrap();
        let a = (pulse.alpha(), pulse.beta());
        let b = rotate_amplitudes(a.0, a.1, theta);
        let closed = neighbor_overlap(n, theta).unwrap();
        prop_assert!((closed - coherent_overlap(a, b)).abs() < 1e-10);
    }

    #[test]
    fn bracket_identity(n in 0.0f64..100.0, delta in 0.0f64..FRAC_PI_2) {
        let product = (1.0 - (-n * delta.cos().powi(2)).exp()) * (1.0 - (-n * delta.sin().powi(2)).exp());
        prop_assert!((both_click_probability(n, delta) - product).abs() < 1e-10);
    }

    #[test]
    fn probabilities_are_probabilities(m in 2usize..=24, r in 0.01f64..0.99, mu in 0.01f64..=1.0) {
        let p = ProtocolParams::uniform(m, r, mu).unwrap();
        let pb = brute_force_probability(&p);
        let pa = alice_cheat_probability(&p);
        prop_assert!((0.0..=1.0).contains(&pb));
        prop_assert!((0.0..=1.0).contains(&pa));
    }

    #[test]
    fn fidelity_below_one_for_real_cloning(m in 2usize..=64, frac in 0.0f64..1.0) {
        let n = 1 + ((m - 1) as f64 * frac) as usize;
        let f = cloning_fidelity(m, n).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0);
        prop_assert_eq!(f == 1.0, n == m);
    }

    #[test]
    fn codec_round_trip(
        id in any::<[u8; 16]>(),
        kind in 0u8..3,
        n in 0.0f64..1e6,
        angle in -1.5f64..1.5,
        choice in any::<u32>(),
        reason in 0usize..4,
    ) {
        let session_id = SessionId(id);
        let msg = match kind {
            0 => ProtocolMessage::commit(session_id, PolarizationPulse::new(n, angle).unwrap()),
            1 => ProtocolMessage::reveal(session_id, choice),
            _ => {
                let reasons = [VerdictReason::Confirmed, VerdictReason::SpdClick, VerdictReason::NoDetection, VerdictReason::Underpowered];
                ProtocolMessage::verdict(session_id, reasons[reason])
            }
        };
        let bytes = msg.encode();
        let decoded = ProtocolMessage::decode(&bytes).unwrap();
        prop_assert_eq!(decoded, msg);
        prop_assert_eq!(decoded.encode(), bytes);

        let line = serde_json::to_string(&msg.to_json()).unwrap();
        let parsed = ProtocolMessage::from_json(serde_json::from_str(&line).unwrap()).unwrap();
        prop_assert_eq!(parsed, msg);
        if let (Payload::CommitPulse(a), Payload::CommitPulse(b)) = (parsed.payload, msg.payload) {
            prop_assert_eq!(a.mean_photons().to_bits(), b.mean_photons().to_bits());
            prop_assert_eq!(a.angle().to_bits(), b.angle().to_bits());
        }
        prop_assert_eq!(parsed.kind() == MessageKind::Verdict, kind >= 2);
    }

    #[test]
    fn decode_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..48)) {
        if let Ok(msg) = ProtocolMessage::decode(&bytes) {
            prop_assert_eq!(msg.encode(), bytes);
        }
    }
}
