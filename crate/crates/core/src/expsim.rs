//! Coincidence-counting simulation, count estimators and the three-input
//! Werner preparation model.
//!
//! Count channels are ordered `(++, +−, −+, −−)` where the first sign is the
//! meter outcome and the second the signal outcome.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, Mat4};
use crate::measurement::QubitMeasurement;
use crate::state::TwoQubitState;
use crate::states::{bell_kets, werner};

/// Born-rule probabilities `p^{ab} = Tr[(Π_S^b ⊗ Π_M^a) ρ]`.
pub fn coincidence_probs(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
) -> [f64; 4] {
    let meter_proj = [meter.projector_plus(), meter.projector_minus()];
    let signal_proj = [signal.projector_plus(), signal.projector_minus()];
    let rho = state.matrix();
    std::array::from_fn(|idx| {
        let (a, b) = (idx / 2, idx % 2);
        linalg::trace4(&(kron(&signal_proj[b], &meter_proj[a]) * rho)).re
    })
}

/// Anything that can be read as four coincidence channel totals.
pub trait Coincidences {
    fn channels(&self) -> [f64; 4];
}

/// Integer coincidence counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountRecord {
    pub c_pp: u64,
    pub c_pm: u64,
    pub c_mp: u64,
    pub c_mm: u64,
}

impl CountRecord {
    pub fn new(c_pp: u64, c_pm: u64, c_mp: u64, c_mm: u64) -> Self {
        Self {
            c_pp,
            c_pm,
            c_mp,
            c_mm,
        }
    }

    pub fn total(&self) -> u64 {
        self.c_pp + self.c_pm + self.c_mp + self.c_mm
    }

    /// `N·p^{ab}` rounded to the nearest integer.
    pub fn from_probabilities(probs: [f64; 4], n: f64) -> Self {
        let r = |p: f64| (p.max(0.0) * n).round() as u64;
        Self::new(r(probs[0]), r(probs[1]), r(probs[2]), r(probs[3]))
    }
}

impl Coincidences for CountRecord {
    fn channels(&self) -> [f64; 4] {
        [
            self.c_pp as f64,
            self.c_pm as f64,
            self.c_mp as f64,
            self.c_mm as f64,
        ]
    }
}

/// Expected (non-integer) channel totals, e.g. `N·p^{ab}` without rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedCounts(pub [f64; 4]);

impl Coincidences for ExpectedCounts {
    fn channels(&self) -> [f64; 4] {
        self.0
    }
}

fn nonempty<C: Coincidences + ?Sized>(counts: &C, index: Option<usize>) -> Result<([f64; 4], f64)> {
    let ch = counts.channels();
    let total: f64 = ch.iter().sum();
    if total > 0.0 {
        Ok((ch, total))
    } else {
        Err(Error::EmptyRecord { index })
    }
}

/// `(|C⁺⁺ − C⁺⁻| + |C⁻⁺ − C⁻⁻|) / N`.
pub fn estimate_knowledge<C: Coincidences + ?Sized>(counts: &C) -> Result<f64> {
    let ([pp, pm, mp, mm], n) = nonempty(counts, None)?;
    Ok(((pp - pm).abs() + (mp - mm).abs()) / n)
}

/// `|(C⁺⁺ + C⁻⁺) − (C⁺⁻ + C⁻⁻)| / N`.
pub fn estimate_apriori<C: Coincidences + ?Sized>(counts: &C) -> Result<f64> {
    let ([pp, pm, mp, mm], n) = nonempty(counts, None)?;
    Ok(((pp + mp) - (pm + mm)).abs() / n)
}

/// `(C⁺⁺ + C⁻⁻ − C⁺⁻ − C⁻⁺) / N`.
pub fn estimate_correlation<C: Coincidences + ?Sized>(counts: &C) -> Result<f64> {
    correlation_at(counts, None)
}

fn correlation_at<C: Coincidences + ?Sized>(counts: &C, index: Option<usize>) -> Result<f64> {
    let ([pp, pm, mp, mm], n) = nonempty(counts, index)?;
    Ok((pp + mm - pm - mp) / n)
}

/// Analyzer angle pairs `(meter, signal)` in degrees for the Bell-factor estimate.
pub const BELL_ANGLES: [(f64, f64); 4] = [(22.5, 45.0), (67.5, 45.0), (22.5, 0.0), (67.5, 0.0)];

/// `|C(22.5°,45°) + C(67.5°,45°) + C(22.5°,0°) − C(67.5°,0°)|` for records
/// taken at [`BELL_ANGLES`].
pub fn estimate_bell_max<C: Coincidences>(records: &[C; 4]) -> Result<f64> {
    let e: Vec<f64> = records
        .iter()
        .enumerate()
        .map(|(i, r)| correlation_at(r, Some(i)))
        .collect::<Result<_>>()?;
    Ok((e[0] + e[1] + e[2] - e[3]).abs())
}

/// Binomial standard error of [`estimate_bell_max`] from the per-record correlations.
pub fn bell_max_standard_error<C: Coincidences>(records: &[C; 4]) -> Result<f64> {
    let mut var = 0.0;
    for (i, r) in records.iter().enumerate() {
        let e = correlation_at(r, Some(i))?;
        let n: f64 = r.channels().iter().sum();
        var += (1.0 - e * e).max(0.0) / n;
    }
    Ok(var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Detected coincidence pairs per second.
    pub pair_rate: f64,
    /// Measurement time per point in seconds.
    pub duration: f64,
    /// Accidental coincidences per second in each outcome channel.
    pub dark_coincidence_rate: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    /// About 10⁴ coincidences per 22 s point, no accidentals.
    fn default() -> Self {
        Self {
            pair_rate: 1e4 / 22.0,
            duration: 22.0,
            dark_coincidence_rate: 0.0,
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("pair_rate", self.pair_rate),
            ("duration", self.duration),
            ("dark_coincidence_rate", self.dark_coincidence_rate),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    min: 0.0,
                    max: f64::INFINITY,
                });
            }
        }
        Ok(())
    }
}

/// Generator for one channel of one measurement point: ChaCha8 keyed by the
/// seed, with stream `4·point + channel`.
fn channel_rng(seed: u64, point: u64, channel: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point.wrapping_mul(4).wrapping_add(channel));
    rng
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive mean");
    dist.sample(rng) as u64
}

/// Poisson-distributed counts for measurement point `point`.
pub fn simulate_counts_at(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
    config: &ExperimentConfig,
    point: u64,
) -> CountRecord {
    let probs = coincidence_probs(state, meter, signal);
    let counts: [u64; 4] = std::array::from_fn(|ch| {
        let mean = probs[ch].max(0.0) * config.pair_rate * config.duration
            + config.dark_coincidence_rate * config.duration;
        poisson(&mut channel_rng(config.seed, point, ch as u64), mean)
    });
    CountRecord::new(counts[0], counts[1], counts[2], counts[3])
}

/// Poisson-distributed counts; same as point 0 of [`simulate_counts_at`].
pub fn simulate_counts(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
    config: &ExperimentConfig,
) -> CountRecord {
    simulate_counts_at(state, meter, signal, config, 0)
}

/// Input mixture for the HOM preparation: a singlet fraction of visibility
/// `V` among the HV/VH inputs, plus HH and VV inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingModel {
    pub visibility: f64,
    pub w_singlet: f64,
    pub w_hh: f64,
    pub w_vv: f64,
}

impl MixingModel {
    pub fn new(visibility: f64, w_singlet: f64, w_hh: f64, w_vv: f64) -> Result<Self> {
        let m = Self {
            visibility,
            w_singlet,
            w_hh,
            w_vv,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidModel(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        let w = [self.w_singlet, self.w_hh, self.w_vv];
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidModel(format!("negative weight in {w:?}")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidModel(format!("weights sum to {sum}")));
        }
        Ok(())
    }

    /// Builds weights proportional to `rate × duration` of the HV/VH, HH and VV inputs.
    pub fn from_schedule(visibility: f64, schedule: [(f64, f64); 3]) -> Result<Self> {
        let raw = schedule.map(|(rate, duration)| rate * duration);
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total > 0.0) || raw.iter().any(|x| *x < 0.0) {
            return Err(Error::InvalidModel(format!(
                "schedule {schedule:?} has no positive exposure"
            )));
        }
        Self::new(visibility, raw[0] / total, raw[1] / total, raw[2] / total)
    }
}

/// `w_s[V|Ψ⁻⟩⟨Ψ⁻| + (1−V)(|HV⟩⟨HV| + |VH⟩⟨VH|)/2] + w_hh|HH⟩⟨HH| + w_vv|VV⟩⟨VV|`.
pub fn mixed_state_from_model(model: &MixingModel) -> Result<TwoQubitState> {
    model.validate()?;
    let psi = bell_kets()[3];
    let singlet = Mat4::from_fn(|i, j| psi[i] * psi[j].conj());
    let mut distinguishable = Mat4::zeros();
    distinguishable[(1, 1)] = c(0.5, 0.0);
    distinguishable[(2, 2)] = c(0.5, 0.0);
    let mut m = (singlet * c(model.visibility, 0.0)
        + distinguishable * c(1.0 - model.visibility, 0.0))
        * c(model.w_singlet, 0.0);
    m[(0, 0)] += c(model.w_hh, 0.0);
    m[(3, 3)] += c(model.w_vv, 0.0);
    TwoQubitState::new(m)
}

/// Mixing model reproducing `werner(p)`: `V = 2p/(1+p)`, `w_s = (1+p)/2`, `w_hh = w_vv = (1−p)/4`.
pub fn werner_mixing_model(p: f64) -> Result<MixingModel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: 0.0,
            max: 1.0,
        });
    }
    let q = (1.0 - p) / 4.0;
    MixingModel::new(2.0 * p / (1.0 + p), (1.0 + p) / 2.0, q, q)
}

/// Signal basis of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalBasis {
    /// H/V.
    Hv,
    /// X/Y, rotated by 45°.
    Xy,
}

impl SignalBasis {
    pub fn measurement(self) -> QubitMeasurement {
        match self {
            SignalBasis::Hv => QubitMeasurement::horizontal_vertical(),
            SignalBasis::Xy => QubitMeasurement::diagonal(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_deg: f64,
    pub basis: SignalBasis,
    pub counts: CountRecord,
    pub k_hat: f64,
    pub p_hat: f64,
    pub dk_hat: f64,
}

/// Simulated counts and estimates for a Werner state at each `(ϑ_M, basis)`.
/// Point `i` uses RNG streams keyed by `i`, so the output does not depend on
/// how the points are scheduled across threads.
pub fn run_sweep_experiment(
    p: f64,
    angles: &[(f64, SignalBasis)],
    config: &ExperimentConfig,
) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let state = werner(p)?;
    sweep_state(&state, angles, config, 0)
}

pub(crate) fn sweep_state(
    state: &TwoQubitState,
    angles: &[(f64, SignalBasis)],
    config: &ExperimentConfig,
    first_point: u64,
) -> Result<Vec<SweepRow>> {
    angles
        .par_iter()
        .enumerate()
        .map(|(i, &(theta_deg, basis))| {
            let meter = QubitMeasurement::from_polarization_angle(theta_deg);
            let counts = simulate_counts_at(
                state,
                &meter,
                &basis.measurement(),
                config,
                first_point + i as u64,
            );
            let k_hat = estimate_knowledge(&counts)?;
            let p_hat = estimate_apriori(&counts)?;
            Ok(SweepRow {
                theta_deg,
                basis,
                counts,
                k_hat,
                p_hat,
                dk_hat: k_hat - p_hat,
            })
        })
        .collect()
}

/// Simulated Bell-angle records for `state`, using RNG points `first_point..first_point+4`.
pub fn simulate_bell_records(
    state: &TwoQubitState,
    config: &ExperimentConfig,
    first_point: u64,
) -> [CountRecord; 4] {
    std::array::from_fn(|i| {
        let (tm, ts) = BELL_ANGLES[i];
        simulate_counts_at(
            state,
            &QubitMeasurement::from_polarization_angle(tm),
            &QubitMeasurement::from_polarization_angle(ts),
            config,
            first_point + i as u64,
        )
    })
}

/// Exact expected counts `n·p^{ab}` at the Bell angles.
pub fn expected_bell_records(state: &TwoQubitState, n: f64) -> [ExpectedCounts; 4] {
    BELL_ANGLES.map(|(tm, ts)| {
        let probs = coincidence_probs(
            state,
            &QubitMeasurement::from_polarization_angle(tm),
            &QubitMeasurement::from_polarization_angle(ts),
        );
        ExpectedCounts(probs.map(|p| p * n))
    })
}
