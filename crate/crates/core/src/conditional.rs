//! Expansion of a state relative to a signal measurement basis `{|Ψ⟩, |Ψ⊥⟩}`:
//!
//! `ρ = w |Ψ⟩⟨Ψ|⊗ρ_M + w⊥ |Ψ⊥⟩⟨Ψ⊥|⊗ρ_M⊥ + √(w w⊥) (|Ψ⟩⟨Ψ⊥|⊗χ_M + h.c.)`

use crate::linalg::{self, c, kron, spinor_down, spinor_up, Mat2, Mat4};
use crate::measurement::QubitMeasurement;
use crate::state::TwoQubitState;

/// Weights below this are treated as vanishing.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDecomposition {
    pub w: f64,
    pub w_perp: f64,
    /// Meter state conditioned on the `+` signal outcome; zero when `w` vanishes.
    pub rho_m: Mat2,
    /// Meter state conditioned on the `−` signal outcome; zero when `w_perp` vanishes.
    pub rho_m_perp: Mat2,
    /// Coherence block; zero when either weight vanishes.
    pub chi_m: Mat2,
    /// Set when either weight is below [`WEIGHT_FLOOR`].
    pub degenerate: bool,
    /// Signal kets `|Ψ⟩`, `|Ψ⊥⟩` of the measurement the expansion refers to.
    pub psi: [linalg::C64; 2],
    pub psi_perp: [linalg::C64; 2],
}

pub fn conditional_decompose(
    state: &TwoQubitState,
    signal: &QubitMeasurement,
) -> ConditionalDecomposition {
    let rho = state.matrix();
    let axis = signal.axis();
    let psi = spinor_up(&axis);
    let psi_perp = spinor_down(&axis);

    let block = linalg::signal_matrix_element(rho, &psi, &psi);
    let block_perp = linalg::signal_matrix_element(rho, &psi_perp, &psi_perp);
    let cross = linalg::signal_matrix_element(rho, &psi, &psi_perp);

    let w = linalg::trace2(&block).re;
    let w_perp = linalg::trace2(&block_perp).re;
    let zero = Mat2::zeros();
    let rho_m = if w > WEIGHT_FLOOR {
        block / c(w, 0.0)
    } else {
        zero
    };
    let rho_m_perp = if w_perp > WEIGHT_FLOOR {
        block_perp / c(w_perp, 0.0)
    } else {
        zero
    };
    let degenerate = w <= WEIGHT_FLOOR || w_perp <= WEIGHT_FLOOR;
    let chi_m = if degenerate {
        zero
    } else {
        cross / c((w * w_perp).sqrt(), 0.0)
    };

    ConditionalDecomposition {
        w,
        w_perp,
        rho_m,
        rho_m_perp,
        chi_m,
        degenerate,
        psi,
        psi_perp,
    }
}

impl ConditionalDecomposition {
    /// `w ρ_M − w⊥ ρ_M⊥`, the operator whose discrimination predicts the signal outcome.
    pub fn helstrom_operator(&self) -> Mat2 {
        self.rho_m * c(self.w, 0.0) - self.rho_m_perp * c(self.w_perp, 0.0)
    }

    /// Reassembles the two-qubit matrix from the expansion.
    pub fn reassemble(&self) -> Mat4 {
        let up = linalg::projector(&self.psi);
        let down = linalg::projector(&self.psi_perp);
        let up_down = Mat2::from_fn(|i, j| self.psi[i] * self.psi_perp[j].conj());
        let coherence = kron(&up_down, &self.chi_m) * c((self.w * self.w_perp).sqrt(), 0.0);
        kron(&up, &self.rho_m) * c(self.w, 0.0)
            + kron(&down, &self.rho_m_perp) * c(self.w_perp, 0.0)
            + coherence
            + coherence.adjoint()
    }
}
