//! State factories and closed-form Werner-state predictions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, Mat4, C64};
use crate::state::TwoQubitState;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Bell states in the fixed order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
pub fn bell_kets() -> [[C64; 4]; 4] {
    let o = c(0.0, 0.0);
    let p = c(H, 0.0);
    [[p, o, o, p], [p, o, o, -p], [o, p, p, o], [o, p, -p, o]]
}

/// `|Ψ⁻⟩⟨Ψ⁻|`.
pub fn singlet() -> TwoQubitState {
    TwoQubitState::pure(bell_kets()[3]).expect("singlet is a valid state")
}

/// `p |Ψ⁻⟩⟨Ψ⁻| + (1 − p) 𝟙/4` for `p ∈ [−1/3, 1]`.
pub fn werner(p: f64) -> Result<TwoQubitState> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: -1.0 / 3.0,
            max: 1.0,
        });
    }
    let psi = bell_kets()[3];
    let proj = Mat4::from_fn(|i, j| psi[i] * psi[j].conj());
    TwoQubitState::new(proj * c(p, 0.0) + Mat4::identity() * c((1.0 - p) / 4.0, 0.0))
}

/// `Σ λ_i |Bell_i⟩⟨Bell_i|` with weights in the order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
pub fn bell_diagonal(lambdas: [f64; 4]) -> Result<TwoQubitState> {
    if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::NotAProbabilityVector(format!(
            "negative or non-finite weight {bad}"
        )));
    }
    let sum: f64 = lambdas.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::NotAProbabilityVector(format!(
            "weights sum to {sum}"
        )));
    }
    let mut m = Mat4::zeros();
    for (ket, l) in bell_kets().iter().zip(lambdas) {
        m += Mat4::from_fn(|i, j| ket[i] * ket[j].conj()) * c(l, 0.0);
    }
    TwoQubitState::new(m)
}

/// Random mixed state: partial trace over a `d`-dimensional ancilla of a
/// Gaussian-random pure state on the qubit pair and the ancilla.
pub fn random_state_from_rng<R: Rng + ?Sized>(rng: &mut R, ancilla_dim: usize) -> TwoQubitState {
    assert!(
        (1..=4).contains(&ancilla_dim),
        "ancilla dimension must be 1..=4"
    );
    let mut g = nalgebra::DMatrix::<C64>::zeros(4, ancilla_dim);
    for z in g.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = c(re, im);
    }
    let gg = &g * g.adjoint();
    let m = Mat4::from_fn(|i, j| gg[(i, j)]);
    TwoQubitState::from_unnormalized(m).expect("Gram matrix of a Gaussian sample is a valid state")
}

/// Deterministic for a fixed `(seed, ancilla_dim)`.
pub fn random_state(seed: u64, ancilla_dim: usize) -> TwoQubitState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_from_rng(&mut rng, ancilla_dim)
}

/// Closed-form Werner predictions for meter angle ϑ (H/V signal) and ϑ' (X/Y signal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerPrediction {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_prime")]
    pub k_prime: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "P_prime")]
    pub p_prime: f64,
    pub b_max: f64,
}

pub fn werner_prediction(p: f64, theta_deg: f64, theta_prime_deg: f64) -> Result<WernerPrediction> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: -1.0 / 3.0,
            max: 1.0,
        });
    }
    Ok(WernerPrediction {
        k: p * (2.0 * theta_deg).to_radians().cos().abs(),
        k_prime: p * (2.0 * theta_prime_deg).to_radians().sin().abs(),
        p: 0.0,
        p_prime: 0.0,
        b_max: p.abs() * 2.0 * 2f64.sqrt(),
    })
}
