use crate::error::{Error, Result};
use crate::linalg::{self, kron, Mat2, Mat4};

/// Tolerance for the Hermitian, trace and positivity checks.
pub const VALIDATION_TOL: f64 = 1e-10;

/// A validated two-qubit density matrix, signal qubit first.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    /// Validates a 4×4 complex matrix as a density matrix.
    ///
    /// Checks run in the order Hermitian, unit trace, positivity and the first
    /// failure is reported. An input whose anti-Hermitian part is below
    /// [`VALIDATION_TOL`] is symmetrized to `(A + A†)/2` before the later checks.
    pub fn new(matrix: Mat4) -> Result<Self> {
        let deviation = linalg::max_abs4(&(matrix - matrix.adjoint()));
        if deviation >= VALIDATION_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = (matrix + matrix.adjoint()) * linalg::c(0.5, 0.0);
        let trace = linalg::trace4(&matrix).re;
        if (trace - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let min_eigenvalue = linalg::hermitian_eigenvalues4(&matrix)[0];
        if min_eigenvalue < -VALIDATION_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// Normalizes a positive operator by its trace and validates it.
    pub(crate) fn from_unnormalized(matrix: Mat4) -> Result<Self> {
        let trace = linalg::trace4(&matrix).re;
        Self::new(matrix / linalg::c(trace, 0.0))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Mat4::identity() * linalg::c(0.25, 0.0),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) ket in the `|HH⟩,|HV⟩,|VH⟩,|VV⟩` basis.
    pub fn pure(amplitudes: [linalg::C64; 4]) -> Result<Self> {
        let m = Mat4::from_fn(|i, j| amplitudes[i] * amplitudes[j].conj());
        Self::from_unnormalized(m)
    }

    /// `ρ_S ⊗ ρ_M` for 2×2 density matrices.
    pub fn product(signal: &Mat2, meter: &Mat2) -> Result<Self> {
        Self::new(kron(signal, meter))
    }

    pub fn signal_reduced(&self) -> Mat2 {
        linalg::trace_meter(&self.matrix)
    }

    pub fn meter_reduced(&self) -> Mat2 {
        linalg::trace_signal(&self.matrix)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian_eigenvalues4(&self.matrix)
    }

    /// `(U_S ⊗ U_M) ρ (U_S ⊗ U_M)†`.
    pub fn apply_local_unitary(&self, u_signal: &Mat2, u_meter: &Mat2) -> Result<Self> {
        for u in [u_signal, u_meter] {
            let deviation = linalg::unitarity_deviation(u);
            if deviation > VALIDATION_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let u = kron(u_signal, u_meter);
        let out = u * self.matrix * u.adjoint();
        Ok(Self {
            matrix: (out + out.adjoint()) * linalg::c(0.5, 0.0),
        })
    }

    /// Applies local operators `F_S ⊗ F_M` without renormalizing; returns the
    /// unnormalized output and its trace (the success probability).
    pub(crate) fn apply_local_operator(&self, f_signal: &Mat2, f_meter: &Mat2) -> (Mat4, f64) {
        let f = kron(f_signal, f_meter);
        let out = f * self.matrix * f.adjoint();
        let out = (out + out.adjoint()) * linalg::c(0.5, 0.0);
        let trace = linalg::trace4(&out).re;
        (out, trace)
    }
}
