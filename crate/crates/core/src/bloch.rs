//! Local Bloch vectors and the correlation matrix of a two-qubit state.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, c, identity2, kron, pauli, Mat3, Mat4, Vec3};
use crate::state::TwoQubitState;

/// `ρ = ¼(𝟙⊗𝟙 + 𝟙⊗m·σ + n·σ⊗𝟙 + Σ t_kl σ_k⊗σ_l)`, `k` indexing the signal axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochForm {
    /// Signal Bloch vector.
    pub n: [f64; 3],
    /// Meter Bloch vector.
    pub m: [f64; 3],
    #[serde(rename = "T")]
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn new(n: Vec3, m: Vec3, t: Mat3) -> Self {
        Self {
            n: [n[0], n[1], n[2]],
            m: [m[0], m[1], m[2]],
            t: [
                [t[(0, 0)], t[(0, 1)], t[(0, 2)]],
                [t[(1, 0)], t[(1, 1)], t[(1, 2)]],
                [t[(2, 0)], t[(2, 1)], t[(2, 2)]],
            ],
        }
    }

    pub fn signal(&self) -> Vec3 {
        Vec3::from(self.n)
    }

    pub fn meter(&self) -> Vec3 {
        Vec3::from(self.m)
    }

    pub fn correlation(&self) -> Mat3 {
        Mat3::from_fn(|k, l| self.t[k][l])
    }

    pub fn decompose(state: &TwoQubitState) -> Self {
        let rho = state.matrix();
        let s = pauli();
        let id = identity2();
        let expect = |op: Mat4| linalg::trace4(&(rho * op)).re;
        let n = Vec3::from_fn(|k, _| expect(kron(&s[k], &id)));
        let m = Vec3::from_fn(|l, _| expect(kron(&id, &s[l])));
        let t = Mat3::from_fn(|k, l| expect(kron(&s[k], &s[l])));
        Self::new(n, m, t)
    }

    /// Rebuilds the density matrix; fails if the data is not a physical state.
    pub fn recompose(&self) -> Result<TwoQubitState> {
        TwoQubitState::new(self.operator())
    }

    /// The Hermitian operator described by this Bloch data, without validation.
    pub fn operator(&self) -> Mat4 {
        let s = pauli();
        let id = identity2();
        let mut op = kron(&id, &id);
        for l in 0..3 {
            op += kron(&id, &s[l]) * c(self.m[l], 0.0);
            op += kron(&s[l], &id) * c(self.n[l], 0.0);
            for k in 0..3 {
                op += kron(&s[k], &s[l]) * c(self.t[k][l], 0.0);
            }
        }
        op * c(0.25, 0.0)
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            d = d.max((self.n[i] - other.n[i]).abs());
            d = d.max((self.m[i] - other.m[i]).abs());
            for j in 0..3 {
                d = d.max((self.t[i][j] - other.t[i][j]).abs());
            }
        }
        d
    }
}

impl TwoQubitState {
    pub fn bloch(&self) -> BlochForm {
        BlochForm::decompose(self)
    }
}
