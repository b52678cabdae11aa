//! Photon-level Monte Carlo model of Bob's receiver and of the attacks.
//!
//! Detectors see coherent light, so the photon number reaching a detector is
//! Poisson distributed and a detector with efficiency `η` fires with
//! probability `1 − exp(−η n)`. Only click/no-click is observable, so photon
//! numbers are never sampled explicitly.
//!
//! Trials are grouped in fixed blocks of [`TRIALS_PER_STREAM`]; block `b`
//! draws from ChaCha8 stream `b` keyed by the seed. Counts are therefore
//! identical for any rayon pool size.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::polarization::{rotate, PolarizationPulse, ProtocolParams, MAX_STATES};

/// Number of consecutive trials sharing one RNG stream.
pub const TRIALS_PER_STREAM: u64 = 4096;

/// Efficiencies and dark counts of the two detectors behind Bob's PBS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    main_efficiency: f64,
    spd_efficiency: f64,
    dark_count_prob: f64,
}

impl DetectorModel {
    pub fn new(main_efficiency: f64, spd_efficiency: f64, dark_count_prob: f64) -> Result<Self> {
        for (name, eta) in [("main", main_efficiency), ("SPD", spd_efficiency)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return domain(format!("{name} detector efficiency must lie in (0, 1], got {eta}"));
            }
        }
        if !(0.0..1.0).contains(&dark_count_prob) {
            return domain(format!("dark count probability must lie in [0, 1), got {dark_count_prob}"));
        }
        Ok(Self { main_efficiency, spd_efficiency, dark_count_prob })
    }

    /// Unit efficiency, no dark counts on either output.
    pub fn ideal() -> Self {
        Self { main_efficiency: 1.0, spd_efficiency: 1.0, dark_count_prob: 0.0 }
    }

    /// Bob's verification receiver: main detector at the agreed efficiency,
    /// ideal single-photon detector.
    pub fn for_params(params: &ProtocolParams) -> Self {
        Self { main_efficiency: params.detector_efficiency(), ..Self::ideal() }
    }

    pub fn with_dark_counts(self, dark_count_prob: f64) -> Result<Self> {
        Self::new(self.main_efficiency, self.spd_efficiency, dark_count_prob)
    }

    pub fn main_efficiency(&self) -> f64 {
        self.main_efficiency
    }

    pub fn spd_efficiency(&self) -> f64 {
        self.spd_efficiency
    }

    pub fn dark_count_prob(&self) -> f64 {
        self.dark_count_prob
    }
}

/// Polarization rotator setting plus the detectors on the PBS outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetup {
    /// Polarization that the rotator maps onto the horizontal (main) output.
    pub rotator_angle: f64,
    pub detectors: DetectorModel,
}

/// Outcome of measuring a single pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DetectionRecord {
    /// The detector on the expected (horizontal) output fired.
    pub main_click: bool,
    /// The detector on the other output fired.
    pub spd_click: bool,
}

/// Trial count and seed of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    trials: u64,
    seed: u64,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return domain("a simulation needs at least one trial");
        }
        Ok(Self { trials, seed })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Empirical success frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// `√(p̂(1 − p̂)/n)` at the empirical rate.
    pub fn std_error(&self) -> f64 {
        binomial_std_error(self.rate(), self.trials)
    }

    /// Whether the estimate lies within `sigmas` binomial standard errors of
    /// `expected`, the errors taken at `expected`.
    pub fn agrees_with(&self, expected: f64, sigmas: f64) -> bool {
        (self.rate() - expected).abs() <= sigmas * binomial_std_error(expected, self.trials)
    }
}

pub fn binomial_std_error(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Click probability of a detector with efficiency `efficiency` illuminated
/// by coherent light of mean photon number `mean_photons`:
/// `1 − (1 − p_dark)·exp(−η n)`.
pub fn click_probability(efficiency: f64, mean_photons: f64, dark_count_prob: f64) -> f64 {
    let dark_free = -(-efficiency * mean_photons).exp_m1();
    dark_free + dark_count_prob * (1.0 - dark_free)
}

/// Rotates `pulse` by `−rotator_angle`, splits it on the PBS and samples both
/// detectors. Always consumes exactly two uniforms from `rng`.
pub fn measure<R: Rng + ?Sized>(pulse: &PolarizationPulse, setup: &MeasurementSetup, rng: &mut R) -> DetectionRecord {
    let aligned = rotate(pulse, -setup.rotator_angle);
    let (s, c) = aligned.angle().sin_cos();
    let n = aligned.mean_photons();
    let det = &setup.detectors;
    let p_main = click_probability(det.main_efficiency, n * c * c, det.dark_count_prob);
    let p_spd = click_probability(det.spd_efficiency, n * s * s, det.dark_count_prob);
    let main_click = rng.random::<f64>() < p_main;
    let spd_click = rng.random::<f64>() < p_spd;
    DetectionRecord { main_click, spd_click }
}

/// Splits `pulse` on a balanced `ways`-port beam splitter. Each output keeps
/// the polarization and carries `1/ways` of the mean photon number.
pub fn split_pulse(pulse: &PolarizationPulse, ways: usize) -> Result<Vec<PolarizationPulse>> {
    if ways == 0 {
        return domain("cannot split a pulse zero ways");
    }
    let tap = pulse.attenuate(1.0 / ways as f64)?;
    Ok(vec![tap; ways])
}

/// ChaCha8 stream used for block `block` of a run seeded with `seed`.
pub fn trial_stream(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `cfg.trials` independent trials of `trial` and counts, per slot, how
/// many trials returned `true`.
pub fn count_trials<const K: usize, F>(cfg: &SimConfig, trial: F) -> [u64; K]
where
    F: Fn(&mut ChaCha8Rng) -> [bool; K] + Sync,
{
    let blocks = cfg.trials.div_ceil(TRIALS_PER_STREAM);
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = trial_stream(cfg.seed, block);
            let first = block * TRIALS_PER_STREAM;
            let len = TRIALS_PER_STREAM.min(cfg.trials - first);
            let mut counts = [0u64; K];
            for _ in 0..len {
                for (count, hit) in counts.iter_mut().zip(trial(&mut rng)) {
                    *count += u64::from(hit);
                }
            }
            counts
        })
        .reduce(
            || [0u64; K],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Samples Alice's choice from her prior.
#[derive(Debug, Clone)]
pub struct ChoiceSampler(WeightedIndex<f64>);

impl ChoiceSampler {
    pub fn new(params: &ProtocolParams) -> Self {
        // Validated prior: non-negative and summing to one.
        Self(WeightedIndex::new(params.prior()).expect("validated prior"))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.0.sample(rng)
    }
}

/// Honest-session statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HonestStats {
    /// Main detector fired and the SPD stayed dark.
    pub accepted: Estimate,
    /// The SPD fired.
    pub false_alarms: Estimate,
}

impl HonestStats {
    pub fn accept_rate(&self) -> f64 {
        self.accepted.rate()
    }

    pub fn false_alarm_rate(&self) -> f64 {
        self.false_alarms.rate()
    }
}

/// Honest Alice commits to `choice`; Bob measures in the revealed basis.
pub fn simulate_honest_verification(
    params: &ProtocolParams,
    choice: usize,
    detectors: &DetectorModel,
    cfg: &SimConfig,
) -> Result<HonestStats> {
    let pulse = params.committed_pulse(choice)?;
    let setup = MeasurementSetup { rotator_angle: pulse.angle(), detectors: *detectors };
    let [accepted, alarms] = count_trials(cfg, |rng| {
        let rec = measure(&pulse, &setup, rng);
        [rec.main_click && !rec.spd_click, rec.spd_click]
    });
    Ok(HonestStats {
        accepted: Estimate { successes: accepted, trials: cfg.trials },
        false_alarms: Estimate { successes: alarms, trials: cfg.trials },
    })
}

/// Bob's unambiguous guess from the `M` basis tests: the unique basis whose
/// two outputs did not both fire, provided its expected output fired.
pub fn identify_state(records: &[DetectionRecord]) -> Option<usize> {
    let mut survivors = records.iter().enumerate().filter(|(_, r)| !(r.main_click && r.spd_click));
    match (survivors.next(), survivors.next()) {
        (Some((i, r)), None) if r.main_click => Some(i),
        _ => None,
    }
}

/// Monte Carlo estimate of the brute-force identification probability.
pub fn simulate_brute_force_attack(params: &ProtocolParams, cfg: &SimConfig) -> Estimate {
    simulate_brute_force_attack_at(params, params.mean_photons(), cfg).expect("derived mean photon number is valid")
}

/// Brute-force attack against pulses carrying `mean_photons` instead of the
/// agreed power.
pub fn simulate_brute_force_attack_at(params: &ProtocolParams, mean_photons: f64, cfg: &SimConfig) -> Result<Estimate> {
    let m = params.states();
    let pulses = (0..m)
        .map(|k| PolarizationPulse::new(mean_photons, k as f64 * params.spacing()))
        .collect::<Result<Vec<_>>>()?;
    let taps = pulses.iter().map(|p| split_pulse(p, m)).collect::<Result<Vec<_>>>()?;
    let setups: Vec<MeasurementSetup> = (0..m)
        .map(|i| MeasurementSetup { rotator_angle: i as f64 * params.spacing(), detectors: DetectorModel::ideal() })
        .collect();
    let sampler = ChoiceSampler::new(params);

    let [hits] = count_trials(cfg, |rng| {
        let choice = sampler.sample(rng);
        let mut records = [DetectionRecord::default(); MAX_STATES];
        for ((record, tap), setup) in records.iter_mut().zip(&taps[choice]).zip(&setups) {
            *record = measure(tap, setup, rng);
        }
        [identify_state(&records[..m]) == Some(choice)]
    });
    Ok(Estimate { successes: hits, trials: cfg.trials })
}

/// Monte Carlo estimate of the neighbor-swap success probability.
pub fn simulate_cheating_alice(params: &ProtocolParams, cfg: &SimConfig) -> Estimate {
    simulate_cheating_alice_at(params, params.mean_photons(), cfg).expect("derived mean photon number is valid")
}

pub fn simulate_cheating_alice_at(params: &ProtocolParams, mean_photons: f64, cfg: &SimConfig) -> Result<Estimate> {
    let m = params.states();
    let detectors = DetectorModel::for_params(params);
    let plans = (0..m)
        .map(|sent| {
            let pulse = PolarizationPulse::new(mean_photons, sent as f64 * params.spacing())?;
            let claimed = params.claimed_neighbor(sent)?;
            let setup = MeasurementSetup { rotator_angle: claimed as f64 * params.spacing(), detectors };
            Ok((pulse, setup))
        })
        .collect::<Result<Vec<_>>>()?;
    let sampler = ChoiceSampler::new(params);

    let [hits] = count_trials(cfg, |rng| {
        let (pulse, setup) = &plans[sampler.sample(rng)];
        let rec = measure(pulse, setup, rng);
        [rec.main_click && !rec.spd_click]
    });
    Ok(Estimate { successes: hits, trials: cfg.trials })
}
