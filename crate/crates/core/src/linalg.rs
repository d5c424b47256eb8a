//! Small fixed-size complex linear algebra used throughout the crate.

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

/// Pauli matrices σ_x, σ_y, σ_z.
pub fn pauli() -> [Mat2; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Mat2::new(o, one, one, o),
        Mat2::new(o, -i, i, o),
        Mat2::new(one, o, o, -one),
    ]
}

/// `v·σ` for a real 3-vector.
pub fn bloch_operator(v: &Vec3) -> Mat2 {
    let s = pauli();
    s[0] * c(v[0], 0.0) + s[1] * c(v[1], 0.0) + s[2] * c(v[2], 0.0)
}

/// Kronecker product `a ⊗ b`; `a` acts on the signal (first) factor.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Trace over the meter qubit, leaving the signal reduced matrix.
pub fn trace_meter(rho: &Mat4) -> Mat2 {
    Mat2::from_fn(|i, j| rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)])
}

/// Trace over the signal qubit, leaving the meter reduced matrix.
pub fn trace_signal(rho: &Mat4) -> Mat2 {
    Mat2::from_fn(|k, l| rho[(k, l)] + rho[(2 + k, 2 + l)])
}

/// Meter block `⟨bra|ρ|ket⟩` taken on the signal factor only.
pub fn signal_matrix_element(rho: &Mat4, bra: &[C64; 2], ket: &[C64; 2]) -> Mat2 {
    Mat2::from_fn(|k, l| {
        let mut acc = c(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += bra[i].conj() * rho[(2 * i + k, 2 * j + l)] * ket[j];
            }
        }
        acc
    })
}

pub fn max_abs4(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs2(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs3(m: &Mat3) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn trace2(m: &Mat2) -> C64 {
    m[(0, 0)] + m[(1, 1)]
}

pub fn trace4(m: &Mat4) -> C64 {
    (0..4).map(|i| m[(i, i)]).sum()
}

/// Max element deviation of `u u†` from the identity.
pub fn unitarity_deviation(u: &Mat2) -> f64 {
    max_abs2(&(u * u.adjoint() - identity2()))
}

/// Ascending eigenvalues of a Hermitian 4×4 matrix.
pub fn hermitian_eigenvalues4(m: &Mat4) -> [f64; 4] {
    let eig = SymmetricEigen::new(*m);
    let mut ev = [0.0; 4];
    for (slot, v) in ev.iter_mut().zip(eig.eigenvalues.iter()) {
        *slot = *v;
    }
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of a Hermitian 2×2 matrix, in closed form.
pub fn hermitian_eigenvalues2(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// `f(H)` for a Hermitian 2×2 matrix via its spectral decomposition.
pub fn hermitian_function2(m: &Mat2, f: impl Fn(f64) -> f64) -> Mat2 {
    let eig = SymmetricEigen::new(*m);
    let mut out = Mat2::zeros();
    for k in 0..2 {
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * c(f(eig.eigenvalues[k]), 0.0);
    }
    out
}

/// Largest singular value of a 2×2 complex matrix.
pub fn spectral_norm2(m: &Mat2) -> f64 {
    let gram = m.adjoint() * m;
    hermitian_eigenvalues2(&gram)[1].max(0.0).sqrt()
}

/// Descending eigenvalues of a real symmetric 3×3 matrix.
pub fn symmetric_eigenvalues3(m: &Mat3) -> [f64; 3] {
    let eig = SymmetricEigen::new(*m);
    let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Ket `|ψ⟩` with Bloch vector along the unit vector `a`.
pub fn spinor_up(a: &Vec3) -> [C64; 2] {
    let theta = a[2].clamp(-1.0, 1.0).acos();
    let phi = a[1].atan2(a[0]);
    [
        c((0.5 * theta).cos(), 0.0),
        C64::from_polar((0.5 * theta).sin(), phi),
    ]
}

/// Ket orthogonal to [`spinor_up`], with Bloch vector `-a`.
pub fn spinor_down(a: &Vec3) -> [C64; 2] {
    let theta = a[2].clamp(-1.0, 1.0).acos();
    let phi = a[1].atan2(a[0]);
    [
        c((0.5 * theta).sin(), 0.0),
        -C64::from_polar((0.5 * theta).cos(), phi),
    ]
}

pub fn projector(ket: &[C64; 2]) -> Mat2 {
    Mat2::from_fn(|i, j| ket[i] * ket[j].conj())
}
