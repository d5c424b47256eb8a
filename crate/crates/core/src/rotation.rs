//! The SU(2) → SO(3) adjoint map and its inverse.

use crate::error::{Error, Result};
use crate::linalg::{self, c, pauli, Mat2, Mat3};
use crate::state::VALIDATION_TOL;

pub const ROTATION_TOL: f64 = 1e-8;

/// The rotation `O` with `U (v·σ) U† = (O v)·σ`.
pub fn rotation_of_unitary(u: &Mat2) -> Result<Mat3> {
    let deviation = linalg::unitarity_deviation(u);
    if deviation > VALIDATION_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let s = pauli();
    // O_ij = ½ Tr[σ_i U σ_j U†]
    Ok(Mat3::from_fn(|i, j| {
        0.5 * linalg::trace2(&(s[i] * u * s[j] * u.adjoint())).re
    }))
}

/// A unitary whose adjoint action is `o`.
///
/// The result is `q₀𝟙 − i(q₁σ_x + q₂σ_y + q₃σ_z)` for the unit quaternion of
/// `o`, with the sign chosen so the first non-negligible quaternion component
/// is positive.
pub fn unitary_from_rotation(o: &Mat3) -> Result<Mat2> {
    let orthogonality = linalg::max_abs3(&(o.transpose() * o - Mat3::identity()));
    let det = o.determinant();
    if orthogonality > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
        return Err(Error::NotRotation { orthogonality, det });
    }
    let mut q = quaternion(o);
    if let Some(lead) = q.iter().copied().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            q.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let s = pauli();
    let u = Mat2::identity() * c(q[0], 0.0)
        - (s[0] * c(q[1], 0.0) + s[1] * c(q[2], 0.0) + s[2] * c(q[3], 0.0)) * c(0.0, 1.0);
    Ok(u)
}

// Shepperd's method: pick the largest diagonal combination for stability.
fn quaternion(o: &Mat3) -> [f64; 4] {
    let tr = o.trace();
    let candidates = [tr, o[(0, 0)], o[(1, 1)], o[(2, 2)]];
    let (best, _) = candidates
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let q = match best {
        0 => {
            let w = 0.5 * (1.0 + tr).sqrt();
            let f = 0.25 / w;
            [
                w,
                (o[(2, 1)] - o[(1, 2)]) * f,
                (o[(0, 2)] - o[(2, 0)]) * f,
                (o[(1, 0)] - o[(0, 1)]) * f,
            ]
        }
        1 => {
            let x = 0.5 * (1.0 + o[(0, 0)] - o[(1, 1)] - o[(2, 2)]).sqrt();
            let f = 0.25 / x;
            [
                (o[(2, 1)] - o[(1, 2)]) * f,
                x,
                (o[(0, 1)] + o[(1, 0)]) * f,
                (o[(0, 2)] + o[(2, 0)]) * f,
            ]
        }
        2 => {
            let y = 0.5 * (1.0 - o[(0, 0)] + o[(1, 1)] - o[(2, 2)]).sqrt();
            let f = 0.25 / y;
            [
                (o[(0, 2)] - o[(2, 0)]) * f,
                (o[(0, 1)] + o[(1, 0)]) * f,
                y,
                (o[(1, 2)] + o[(2, 1)]) * f,
            ]
        }
        _ => {
            let z = 0.5 * (1.0 - o[(0, 0)] - o[(1, 1)] + o[(2, 2)]).sqrt();
            let f = 0.25 / z;
            [
                (o[(1, 0)] - o[(0, 1)]) * f,
                (o[(0, 2)] + o[(2, 0)]) * f,
                (o[(1, 2)] + o[(2, 1)]) * f,
                z,
            ]
        }
    };
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.map(|x| x / norm)
}
