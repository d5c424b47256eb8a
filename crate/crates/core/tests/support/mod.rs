//! Independent oracle for the filtered Bell factor.
//!
//! Local filters act on `R_ij = Tr[ρ σ_i⊗σ_j]` (i, j = 0..3, σ_0 = 𝟙) as
//! Lorentz transformations, so the spectrum of `R η Rᵀ η` with
//! `η = diag(1, −1, −1, −1)` is invariant. In the normal form that spectrum is
//! `s_0², s_1², s_2², s_3²` and the normalized correlations are `s_i / s_0`.

use kexcess::TwoQubitState;
use nalgebra::{Matrix4, Vector4};

pub fn lorentz_bell_factor(state: &TwoQubitState) -> f64 {
    let f = state.bloch();
    let mut r = Matrix4::<f64>::zeros();
    r[(0, 0)] = 1.0;
    for i in 0..3 {
        r[(i + 1, 0)] = f.n[i];
        r[(0, i + 1)] = f.m[i];
        for j in 0..3 {
            r[(i + 1, j + 1)] = f.t[i][j];
        }
    }
    let eta = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0));
    let mut ev: Vec<f64> = (r * eta * r.transpose() * eta)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    2.0 * ((ev[1] + ev[2]) / ev[0]).sqrt()
}
