//! Closed-form security metrics.
//!
//! * Bob's brute-force attack: split the committed pulse into `M` taps and
//!   test each against a different basis with single-photon detectors on
//!   both outputs.
//! * Bob's cloning attack: split into `N` taps and feed a Gaussian `N → M`
//!   coherent-state cloner.
//! * Alice's neighbor swap: commit to one state, reveal its neighbor.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::polarization::{ProtocolParams, MAX_STATES};

/// Absolute slack on the log-space cloning comparison.
pub const QCM_LOG_TOLERANCE: f64 = 1e-12;

/// Probability that both outputs of a basis click when a coherent pulse of
/// mean photon number `n` arrives at angle `delta` from the basis:
/// `1 − 2e^{−n/2} cosh[(n/2) cos 2Δ] + e^{−n}`.
pub fn both_click_probability(n: f64, delta: f64) -> f64 {
    let half = 0.5 * n;
    let c = (2.0 * delta).cos();
    // e^{-h} cosh(h c) written without the overflowing cosh.
    let damped_cosh = 0.5 * ((-half * (1.0 - c)).exp() + (-half * (1.0 + c)).exp());
    1.0 - 2.0 * damped_cosh + (-n).exp()
}

/// Probability that Bob identifies Alice's state without doubt by the
/// brute-force attack.
pub fn brute_force_probability(params: &ProtocolParams) -> f64 {
    let m = params.states();
    let tap = params.mean_photons() / m as f64;
    let angles: Vec<f64> = (0..m).map(|i| i as f64 * params.spacing()).collect();
    let sum: f64 = params
        .prior()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(k, p)| {
            let exclusion: f64 =
                (0..m).filter(|&i| i != k).map(|i| both_click_probability(tap, angles[k] - angles[i])).product();
            p * exclusion
        })
        .sum();
    -(-tap).exp_m1() * sum
}

/// Both sides of the cloning security condition for `n_split` taps:
/// `exp[−4(⟨n⟩/N) sin²(π/8M)]` and `[MN/(MN+M−N)]²`.
pub fn qcm_condition_sides(params: &ProtocolParams, n_split: usize) -> Result<(f64, f64)> {
    let m = params.states();
    check_split(m, n_split)?;
    let s = (PI / (8.0 * m as f64)).sin();
    let lhs = (-4.0 * params.mean_photons() / n_split as f64 * s * s).exp();
    Ok((lhs, cloning_fidelity(m, n_split)?))
}

/// `ln(lhs) − ln(rhs)` of the cloning condition; non-negative when it holds.
pub fn qcm_log_margin(params: &ProtocolParams, n_split: usize) -> Result<f64> {
    let m = params.states();
    check_split(m, n_split)?;
    let (mf, nf) = (m as f64, n_split as f64);
    let s = (PI / (8.0 * mf)).sin();
    let log_lhs = -4.0 * params.mean_photons() / nf * s * s;
    // ln[MN/(MN+M−N)] = −ln(1 + (M−N)/(MN))
    let log_rhs = -2.0 * ((mf - nf) / (mf * nf)).ln_1p();
    Ok(log_lhs - log_rhs)
}

/// Whether the cloning attack with `n_split` taps is defeated.
pub fn qcm_condition_holds(params: &ProtocolParams, n_split: usize) -> Result<bool> {
    Ok(qcm_log_margin(params, n_split)? >= -QCM_LOG_TOLERANCE)
}

/// `(true, None)` when the cloning condition holds for every `N` in
/// `1..=M−1`, else `(false, Some(first violating N))`.
pub fn qcm_secure(params: &ProtocolParams) -> (bool, Option<usize>) {
    let worst = (1..params.states()).find(|&n| !qcm_condition_holds(params, n).unwrap_or(false));
    (worst.is_none(), worst)
}

/// Polarization cloning fidelity `[MN/(MN+M−N)]²` of a Gaussian `N → M`
/// cloner (each of the two modes is cloned separately).
pub fn cloning_fidelity(copies: usize, originals: usize) -> Result<f64> {
    if originals < 1 || originals > copies {
        return domain(format!("cloning needs 1 <= N <= M, got N = {originals}, M = {copies}"));
    }
    let (m, n) = (copies as f64, originals as f64);
    let single_mode = m * n / (m * n + m - n);
    Ok(single_mode * single_mode)
}

/// Probability that Alice's neighbor swap passes Bob's check:
/// `{1 − exp[−μ⟨n⟩cos²θ]}·exp[−⟨n⟩sin²θ]` with `θ = π/(2M)`.
pub fn alice_cheat_probability(params: &ProtocolParams) -> f64 {
    let n = params.mean_photons();
    let (s, c) = params.spacing().sin_cos();
    let main_click = -(-params.detector_efficiency() * n * c * c).exp_m1();
    let spd_silent = (-n * s * s).exp();
    main_click * spd_silent
}

/// Probability that an honest reveal is confirmed: the main detector fires
/// and the ideal single-photon detector stays dark.
pub fn honest_accept_probability(params: &ProtocolParams) -> f64 {
    -(-params.detector_efficiency() * params.mean_photons()).exp_m1()
}

fn check_split(states: usize, n_split: usize) -> Result<()> {
    if n_split < 1 || n_split >= states {
        return domain(format!("cloning split N must satisfy 1 <= N <= M-1, got N = {n_split}, M = {states}"));
    }
    Ok(())
}

/// Which prior over Alice's choices a table uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriorKind {
    #[default]
    Uniform,
}

/// One row of the security table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    #[serde(rename = "M")]
    pub states: usize,
    pub mean_photons: f64,
    /// Alice's neighbor-swap success probability.
    pub p_a: f64,
    /// Bob's brute-force identification probability.
    pub p_b: f64,
    pub qcm_secure: bool,
    /// First cloning split that breaks the protocol, when one exists.
    #[serde(rename = "worst_N")]
    pub worst_n: Option<usize>,
}

impl SecurityReport {
    pub fn evaluate(params: &ProtocolParams) -> Self {
        let (qcm_secure, worst_n) = qcm_secure(params);
        Self {
            states: params.states(),
            mean_photons: params.mean_photons(),
            p_a: alice_cheat_probability(params),
            p_b: brute_force_probability(params),
            qcm_secure,
            worst_n,
        }
    }
}

/// One report per constellation size in `states`, ordered by `M`.
pub fn security_table(
    neighbor_overlap: f64,
    detector_efficiency: f64,
    states: RangeInclusive<usize>,
    prior: PriorKind,
) -> Result<Vec<SecurityReport>> {
    let (lo, hi) = (*states.start(), *states.end());
    if lo < 2 || hi > MAX_STATES || lo > hi {
        return domain(format!("M range must satisfy 2 <= min <= max <= {MAX_STATES}, got {lo}..={hi}"));
    }
    let params = states
        .map(|m| match prior {
            PriorKind::Uniform => ProtocolParams::uniform(m, neighbor_overlap, detector_efficiency),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(params.par_iter().map(SecurityReport::evaluate).collect())
}
