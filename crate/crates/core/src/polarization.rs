//! Linear-polarization coherent states.
//!
//! A pulse is a two-mode coherent state `|α, β⟩` with real amplitudes in the
//! horizontal and vertical modes, so it is fully described by its mean photon
//! number `α² + β²` and its polarization angle measured from horizontal.
//!
//! The constellation of `M` states sits on the non-cyclic grid
//! `θ_m = m·π/(2M)`, `m = 0..M`. Neighbors are `m − 1` and `m + 1`; the two
//! edge states each have a single neighbor.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};

/// Largest supported constellation. The agreed photon number grows like
/// `M²`, far beyond the mesoscopic regime at this size.
pub const MAX_STATES: usize = 64;

/// Tolerance used when checking that a prior sums to one.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-9;

/// Two-mode coherent state with real amplitudes (a linear polarization).
///
/// Amplitudes `(α, β)` and `(−α, −β)` differ by a global phase, so the
/// polarization angle is kept modulo `π`, normalized into `(−π/2, π/2]`.
/// Constellation states all fall in `[0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPulse {
    mean_photons: f64,
    angle: f64,
}

impl PolarizationPulse {
    /// Builds a pulse from its mean photon number and polarization angle in
    /// radians. Any finite angle is accepted and reduced modulo `π`.
    pub fn new(mean_photons: f64, angle: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return domain(format!("mean photon number must be finite and >= 0, got {mean_photons}"));
        }
        if !angle.is_finite() {
            return domain(format!("polarization angle must be finite, got {angle}"));
        }
        Ok(Self { mean_photons, angle: normalize_angle(angle) })
    }

    /// The vacuum state. Its polarization is irrelevant and reported as 0.
    pub fn vacuum() -> Self {
        Self { mean_photons: 0.0, angle: 0.0 }
    }

    /// Builds a pulse from real mode amplitudes `(α, β)`.
    pub fn from_amplitudes(alpha: f64, beta: f64) -> Result<Self> {
        let mean_photons = alpha * alpha + beta * beta;
        if mean_photons == 0.0 {
            return Ok(Self::vacuum());
        }
        Self::new(mean_photons, beta.atan2(alpha))
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Horizontal amplitude `α = √⟨n⟩·cos θ`.
    pub fn alpha(&self) -> f64 {
        self.mean_photons.sqrt() * self.angle.cos()
    }

    /// Vertical amplitude `β = √⟨n⟩·sin θ`.
    pub fn beta(&self) -> f64 {
        self.mean_photons.sqrt() * self.angle.sin()
    }

    /// Same polarization, mean photon number scaled by `factor` (a lossless
    /// beam splitter tap or an attenuator).
    pub fn attenuate(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor < 0.0 {
            return domain(format!("attenuation factor must be >= 0, got {factor}"));
        }
        Ok(Self { mean_photons: self.mean_photons * factor, angle: self.angle })
    }
}

/// Agreed protocol parameters: constellation size, neighbor overlap, Bob's
/// main detector efficiency and Alice's prior over her choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    states: usize,
    neighbor_overlap: f64,
    detector_efficiency: f64,
    prior: Vec<f64>,
}

impl ProtocolParams {
    /// Parameters with Alice's choice uniformly distributed.
    pub fn uniform(states: usize, neighbor_overlap: f64, detector_efficiency: f64) -> Result<Self> {
        if states < 2 {
            return domain(format!("need at least 2 polarization states, got {states}"));
        }
        let prior = vec![1.0 / states as f64; states];
        Self::with_prior(states, neighbor_overlap, detector_efficiency, prior)
    }

    pub fn with_prior(states: usize, neighbor_overlap: f64, detector_efficiency: f64, prior: Vec<f64>) -> Result<Self> {
        if !(2..=MAX_STATES).contains(&states) {
            return domain(format!("M must lie in [2, {MAX_STATES}], got {states}"));
        }
        check_overlap(neighbor_overlap)?;
        if !(detector_efficiency > 0.0 && detector_efficiency <= 1.0) {
            return domain(format!("detector efficiency must lie in (0, 1], got {detector_efficiency}"));
        }
        if prior.len() != states {
            return domain(format!("prior has {} entries, expected {states}", prior.len()));
        }
        if prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return domain("prior entries must be finite and >= 0");
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return domain(format!("prior must sum to 1, sums to {total}"));
        }
        Ok(Self { states, neighbor_overlap, detector_efficiency, prior })
    }

    /// Number of polarization states `M`; the committed string has `log₂ M` bits.
    pub fn states(&self) -> usize {
        self.states
    }

    /// Overlap `r_s¹` between neighboring constellation states.
    pub fn neighbor_overlap(&self) -> f64 {
        self.neighbor_overlap
    }

    /// Quantum efficiency `μ` of Bob's main (non-single-photon) detector.
    pub fn detector_efficiency(&self) -> f64 {
        self.detector_efficiency
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    /// Mean photon number every committed pulse must carry.
    pub fn mean_photons(&self) -> f64 {
        // Validated at construction.
        mean_photons_from_overlap_unchecked(self.states, self.neighbor_overlap)
    }

    /// Angular spacing between neighboring states, `π/(2M)`.
    pub fn spacing(&self) -> f64 {
        PI / (2.0 * self.states as f64)
    }

    /// Angle of the constellation state `index`.
    pub fn state_angle(&self, index: usize) -> Result<f64> {
        state_angle(self, index)
    }

    /// The pulse an honest Alice sends for `choice`.
    pub fn committed_pulse(&self, choice: usize) -> Result<PolarizationPulse> {
        let angle = self.state_angle(choice)?;
        PolarizationPulse::new(self.mean_photons(), angle)
    }

    /// The neighbor Alice claims in a neighbor-swap cheat: `choice + 1` when
    /// it exists, otherwise `choice − 1`.
    pub fn claimed_neighbor(&self, choice: usize) -> Result<usize> {
        if choice >= self.states {
            return domain(format!("choice {choice} out of range for M = {}", self.states));
        }
        Ok(if choice + 1 < self.states { choice + 1 } else { choice - 1 })
    }
}

fn check_overlap(overlap: f64) -> Result<()> {
    if !(overlap > 0.0 && overlap < 1.0) {
        return domain(format!("neighbor overlap r_s1 must lie in (0, 1), got {overlap}"));
    }
    Ok(())
}

/// `θ_index = index·π/(2M)` on the non-cyclic constellation grid.
pub fn state_angle(params: &ProtocolParams, index: usize) -> Result<f64> {
    if index >= params.states {
        return domain(format!("state index {index} out of range for M = {}", params.states));
    }
    Ok(index as f64 * params.spacing())
}

fn normalize_angle(angle: f64) -> f64 {
    let reduced = angle.rem_euclid(PI);
    if reduced > FRAC_PI_2 {
        reduced - PI
    } else {
        reduced
    }
}

/// Applies the rotation `R(θ)` to the mode amplitudes.
///
/// For a linear polarization this adds `theta` to the angle and leaves the
/// mean photon number untouched.
pub fn rotate(pulse: &PolarizationPulse, theta: f64) -> PolarizationPulse {
    if pulse.mean_photons == 0.0 || !theta.is_finite() {
        return *pulse;
    }
    PolarizationPulse { mean_photons: pulse.mean_photons, angle: normalize_angle(pulse.angle + theta) }
}

/// `|⟨α,β|R(θ)|α,β⟩|² = exp[−4⟨n⟩ sin²(θ/2)]`.
///
/// Underflows silently to `0.0`.
pub fn neighbor_overlap(mean_photons: f64, theta: f64) -> Result<f64> {
    if !mean_photons.is_finite() || mean_photons < 0.0 {
        return domain(format!("mean photon number must be finite and >= 0, got {mean_photons}"));
    }
    let half = (theta / 2.0).sin();
    Ok((-4.0 * mean_photons * half * half).exp())
}

/// Mean photon number giving neighbor overlap `overlap` for `states` states:
/// `⟨n⟩ = −ln r / (4 sin²(π/(4M)))`.
pub fn mean_photons_from_rs1(states: usize, overlap: f64) -> Result<f64> {
    if states < 2 {
        return domain(format!("need at least 2 polarization states, got {states}"));
    }
    check_overlap(overlap)?;
    Ok(mean_photons_from_overlap_unchecked(states, overlap))
}

fn mean_photons_from_overlap_unchecked(states: usize, overlap: f64) -> f64 {
    let s = (PI / (4.0 * states as f64)).sin();
    -overlap.ln() / (4.0 * s * s)
}

/// Neighbor overlap of an `M`-state constellation at mean photon number
/// `mean_photons`: `r = exp[−4⟨n⟩ sin²(π/(4M))]`.
pub fn rs1_from_mean_photons(states: usize, mean_photons: f64) -> Result<f64> {
    if states < 2 {
        return domain(format!("need at least 2 polarization states, got {states}"));
    }
    neighbor_overlap(mean_photons, PI / (2.0 * states as f64))
}
