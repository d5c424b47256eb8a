//! Knowledge, a-priori knowledge, distinguishability and the Bell-factor bound
//! on complementary knowledge excesses.
//!
//! With signal axis `s`, meter axis `b`, signal Bloch vector `n` and
//! correlation matrix `T`, the operator `wρ_M − w⊥ρ_M⊥` equals
//! `½(n·s 𝟙 + (Tᵀs)·σ)`. All quantities below follow from that:
//!
//! * `K = max(|n·s|, |(Tᵀs)·b|)`
//! * `P = |n·s|`
//! * `D = max(|n·s|, |Tᵀs|)`
//!
//! Each is also computed directly from the conditional expansion so the two
//! routes can be cross-checked.

use serde::{Deserialize, Serialize};

use crate::bloch::BlochForm;
use crate::conditional::conditional_decompose;
use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigenvalues3, Vec3};
use crate::measurement::QubitMeasurement;
use crate::state::TwoQubitState;

const CROSS_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeReport {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "deltaK")]
    pub delta_k: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "deltaD")]
    pub delta_d: f64,
}

/// Sum of squared knowledge excesses against `(B_max/2)²` (or against 1 for
/// the same-meter variant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// `ΔK² + ΔK'²`.
    pub sum: f64,
    pub bound: f64,
    /// `bound − sum`.
    pub slack: f64,
    pub b_max: f64,
}

impl BoundCheck {
    fn new(sum: f64, bound: f64, b_max: f64) -> Self {
        Self {
            sum,
            bound,
            slack: bound - sum,
            b_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalMeter {
    pub measurement: QubitMeasurement,
    /// Set when `Tᵀs` vanishes; every meter measurement is then equally informative
    /// and `measurement` is the `z` axis.
    pub degenerate: bool,
}

/// `Tᵀs`, the meter Bloch direction that carries information about the signal outcome.
fn meter_direction(form: &BlochForm, signal: &QubitMeasurement) -> Vec3 {
    form.correlation().transpose() * signal.axis()
}

pub fn knowledge_bloch(
    form: &BlochForm,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
) -> f64 {
    let prior = form.signal().dot(&signal.axis()).abs();
    let informed = meter_direction(form, signal).dot(&meter.axis()).abs();
    prior.max(informed)
}

pub fn knowledge_trace(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
) -> f64 {
    let gamma = conditional_decompose(state, signal).helstrom_operator();
    let plus = linalg::trace2(&(meter.projector_plus() * gamma)).re.abs();
    let minus = linalg::trace2(&(meter.projector_minus() * gamma)).re.abs();
    plus + minus
}

/// Knowledge `K(Π_M → Π_S)`: fractional excess of right over wrong guesses of
/// the signal outcome given the meter outcome.
pub fn knowledge(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
) -> f64 {
    let k = knowledge_bloch(&state.bloch(), meter, signal);
    debug_assert!((k - knowledge_trace(state, meter, signal)).abs() < CROSS_CHECK_TOL);
    k
}

pub fn apriori_bloch(form: &BlochForm, signal: &QubitMeasurement) -> f64 {
    form.signal().dot(&signal.axis()).abs()
}

pub fn apriori_trace(state: &TwoQubitState, signal: &QubitMeasurement) -> f64 {
    let d = conditional_decompose(state, signal);
    (d.w - d.w_perp).abs()
}

/// A-priori knowledge `P(Π_S) = |w − w⊥|`.
pub fn apriori(state: &TwoQubitState, signal: &QubitMeasurement) -> f64 {
    let p = apriori_bloch(&state.bloch(), signal);
    debug_assert!((p - apriori_trace(state, signal)).abs() < CROSS_CHECK_TOL);
    p
}

/// `ΔK = K − P`.
pub fn knowledge_excess(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
) -> f64 {
    let form = state.bloch();
    excess_from_form(&form, meter, signal)
}

fn excess_from_form(form: &BlochForm, meter: &QubitMeasurement, signal: &QubitMeasurement) -> f64 {
    let dk = knowledge_bloch(form, meter, signal) - apriori_bloch(form, signal);
    debug_assert!(dk >= 0.0, "negative knowledge excess {dk}");
    dk
}

pub fn distinguishability_bloch(form: &BlochForm, signal: &QubitMeasurement) -> f64 {
    apriori_bloch(form, signal).max(meter_direction(form, signal).norm())
}

/// Trace norm of `wρ_M − w⊥ρ_M⊥` from its eigenvalues.
pub fn distinguishability_trace(state: &TwoQubitState, signal: &QubitMeasurement) -> f64 {
    let gamma = conditional_decompose(state, signal).helstrom_operator();
    let ev = linalg::hermitian_eigenvalues2(&gamma);
    ev[0].abs() + ev[1].abs()
}

/// Distinguishability `D(Π_S)`, the largest knowledge over all meter measurements.
pub fn distinguishability(state: &TwoQubitState, signal: &QubitMeasurement) -> f64 {
    let d = distinguishability_bloch(&state.bloch(), signal);
    debug_assert!((d - distinguishability_trace(state, signal)).abs() < CROSS_CHECK_TOL);
    d
}

/// `ΔD(Π_S) = max(0, |Tᵀs| − |n·s|)`.
pub fn distinguishability_excess(form: &BlochForm, signal: &QubitMeasurement) -> f64 {
    (meter_direction(form, signal).norm() - apriori_bloch(form, signal)).max(0.0)
}

pub fn knowledge_report(
    state: &TwoQubitState,
    meter: &QubitMeasurement,
    signal: &QubitMeasurement,
) -> KnowledgeReport {
    let form = state.bloch();
    let k = knowledge_bloch(&form, meter, signal);
    let p = apriori_bloch(&form, signal);
    let d = distinguishability_bloch(&form, signal);
    KnowledgeReport {
        k,
        p,
        delta_k: k - p,
        d,
        delta_d: d - p,
    }
}

pub(crate) fn optimal_meter_for_form(form: &BlochForm, signal: &QubitMeasurement) -> OptimalMeter {
    let v = meter_direction(form, signal);
    if v.norm() < 1e-12 {
        return OptimalMeter {
            measurement: QubitMeasurement::horizontal_vertical(),
            degenerate: true,
        };
    }
    let measurement = QubitMeasurement::along(v).expect("non-zero direction");
    OptimalMeter {
        measurement,
        degenerate: false,
    }
}

/// Helstrom-optimal meter measurement for predicting `signal`: axis along `Tᵀs`.
pub fn optimal_meter(state: &TwoQubitState, signal: &QubitMeasurement) -> OptimalMeter {
    optimal_meter_for_form(&state.bloch(), signal)
}

pub(crate) fn bell_max_of_form(form: &BlochForm) -> f64 {
    let t = form.correlation();
    let u = symmetric_eigenvalues3(&(t.transpose() * t));
    2.0 * (u[0].max(0.0) + u[1].max(0.0)).sqrt()
}

/// Maximal CHSH Bell factor, `2√(u₁ + u₂)` for the two largest eigenvalues of `TᵀT`.
pub fn bell_max(state: &TwoQubitState) -> f64 {
    bell_max_of_form(&state.bloch())
}

pub(crate) fn require_complementary(a: &QubitMeasurement, b: &QubitMeasurement) -> Result<()> {
    if a.is_complementary_to(b) {
        Ok(())
    } else {
        Err(Error::NotComplementary {
            overlap: a.axis().dot(&b.axis()),
        })
    }
}

/// `ΔK²(Π_M → Π_S) + ΔK²(Π'_M → Π'_S)` against `(B_max/2)²`.
pub fn check_bound(
    state: &TwoQubitState,
    signal: &QubitMeasurement,
    signal_prime: &QubitMeasurement,
    meter: &QubitMeasurement,
    meter_prime: &QubitMeasurement,
) -> Result<BoundCheck> {
    require_complementary(signal, signal_prime)?;
    let form = state.bloch();
    Ok(bound_check_for_form(
        &form,
        signal,
        signal_prime,
        meter,
        meter_prime,
    ))
}

pub(crate) fn bound_check_for_form(
    form: &BlochForm,
    signal: &QubitMeasurement,
    signal_prime: &QubitMeasurement,
    meter: &QubitMeasurement,
    meter_prime: &QubitMeasurement,
) -> BoundCheck {
    let dk = excess_from_form(form, meter, signal);
    let dk_prime = excess_from_form(form, meter_prime, signal_prime);
    let b_max = bell_max_of_form(form);
    BoundCheck::new(dk * dk + dk_prime * dk_prime, 0.25 * b_max * b_max, b_max)
}

/// `ΔK²(Π_M → Π_S) + ΔK²(Π_M → Π'_S)` against 1, one meter measurement for both.
pub fn check_same_meter_bound(
    state: &TwoQubitState,
    signal: &QubitMeasurement,
    signal_prime: &QubitMeasurement,
    meter: &QubitMeasurement,
) -> Result<BoundCheck> {
    require_complementary(signal, signal_prime)?;
    let form = state.bloch();
    Ok(same_meter_check_for_form(
        &form,
        signal,
        signal_prime,
        meter,
    ))
}

pub(crate) fn same_meter_check_for_form(
    form: &BlochForm,
    signal: &QubitMeasurement,
    signal_prime: &QubitMeasurement,
    meter: &QubitMeasurement,
) -> BoundCheck {
    let dk = excess_from_form(form, meter, signal);
    let dk_prime = excess_from_form(form, meter, signal_prime);
    BoundCheck::new(dk * dk + dk_prime * dk_prime, 1.0, bell_max_of_form(form))
}
