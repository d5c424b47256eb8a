//! Diagonal-correlation canonical form and the local-filtering normal form.

use crate::error::{Error, Result, Side};
use crate::knowledge::{bell_max, BoundCheck};
use crate::linalg::{self, c, hermitian_eigenvalues2, Mat2, Mat3, Vec3};
use crate::optimize::optimize_excess_sum;
use crate::rotation::unitary_from_rotation;
use crate::state::TwoQubitState;

/// Off-diagonal magnitude below which a correlation matrix counts as diagonal.
const DIAGONAL_TOL: f64 = 1e-12;
/// Squared entries closer than this are treated as already ordered.
const ORDER_TOL: f64 = 1e-14;
/// Smallest admissible eigenvalue of a reduced state during filtering.
pub const REDUCTION_FLOOR: f64 = 1e-8;
pub const DEFAULT_FILTER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// `state = (U_S ⊗ U_M) state_bar (U_S ⊗ U_M)†` with `state_bar` having a
/// diagonal correlation matrix `diag`, ordered by descending square.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub state_bar: TwoQubitState,
    pub o_signal: Mat3,
    pub o_meter: Mat3,
    pub u_signal: Mat2,
    pub u_meter: Mat2,
    pub diag: Vec3,
}

/// `T = O_S diag(d) O_Mᵀ` with proper rotations and `d` ordered by descending square.
pub fn correlation_svd(t: &Mat3) -> (Mat3, Vec3, Mat3) {
    let off_diagonal = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].abs())
        .fold(0.0, f64::max);
    let already_diagonal = off_diagonal < DIAGONAL_TOL;
    let (mut u, mut d, mut v) = if already_diagonal {
        (Mat3::identity(), t.diagonal(), Mat3::identity())
    } else {
        let svd = nalgebra::SVD::new(*t, true, true);
        let u = svd.u.expect("requested U");
        let v = svd.v_t.expect("requested Vᵀ").transpose();
        (u, svd.singular_values, v)
    };

    // Absorb reflections into the diagonal.
    if u.determinant() < 0.0 {
        u.column_mut(2).neg_mut();
        d[2] = -d[2];
    }
    if v.determinant() < 0.0 {
        v.column_mut(2).neg_mut();
        d[2] = -d[2];
    }

    let sq = |x: f64| x * x;
    let ordered = sq(d[0]) >= sq(d[1]) - ORDER_TOL && sq(d[1]) >= sq(d[2]) - ORDER_TOL;
    if !ordered {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| sq(d[b]).total_cmp(&sq(d[a])));
        let mut pu = Mat3::zeros();
        let mut pv = Mat3::zeros();
        let mut pd = Vec3::zeros();
        for (k, &src) in order.iter().enumerate() {
            pu.set_column(k, &u.column(src));
            pv.set_column(k, &v.column(src));
            pd[k] = d[src];
        }
        // An odd permutation flips both determinants; negating the same column
        // of both factors restores them without changing the product.
        if pu.determinant() < 0.0 {
            pu.column_mut(2).neg_mut();
            pv.column_mut(2).neg_mut();
        }
        u = pu;
        v = pv;
        d = pd;
    }

    // Signs of any two entries can be traded through a half turn on one side.
    // Off the diagonal fast path, make the two leading entries non-positive.
    if !already_diagonal {
        for k in 0..2 {
            if d[k] > 0.0 {
                u.column_mut(k).neg_mut();
                u.column_mut(2).neg_mut();
                d[k] = -d[k];
                d[2] = -d[2];
            }
        }
    }
    (u, d, v)
}

/// Local-unitary transformation to a state with diagonal correlation matrix.
pub fn canonical_form(state: &TwoQubitState) -> CanonicalForm {
    let (o_signal, diag, o_meter) = correlation_svd(&state.bloch().correlation());
    let u_signal = unitary_from_rotation(&o_signal).expect("proper rotation from SVD");
    let u_meter = unitary_from_rotation(&o_meter).expect("proper rotation from SVD");
    let state_bar = state
        .apply_local_unitary(&u_signal.adjoint(), &u_meter.adjoint())
        .expect("unitaries from rotations");
    CanonicalForm {
        state_bar,
        o_signal,
        o_meter,
        u_signal,
        u_meter,
        diag,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    /// Bell-diagonal output state.
    pub state_out: TwoQubitState,
    pub filter_signal: Mat2,
    pub filter_meter: Mat2,
    pub success_probability: f64,
    pub iterations: usize,
    pub b_max_in: f64,
    /// At least `b_max_in` whenever the input violates CHSH (`b_max_in > 2`).
    /// Below that threshold filtering can lower it.
    pub b_max_out: f64,
    /// Largest deviation of either reduction from `𝟙/2`, before filtering and after each iteration.
    pub deviations: Vec<f64>,
}

fn reduction_deviation(state: &TwoQubitState) -> f64 {
    let half = Mat2::identity() * c(0.5, 0.0);
    linalg::max_abs2(&(state.signal_reduced() - half))
        .max(linalg::max_abs2(&(state.meter_reduced() - half)))
}

fn check_reduction(reduced: &Mat2, side: Side) -> Result<()> {
    let min_eigenvalue = hermitian_eigenvalues2(reduced)[0];
    if min_eigenvalue < REDUCTION_FLOOR {
        return Err(Error::SingularReduction {
            side,
            min_eigenvalue,
        });
    }
    Ok(())
}

/// `(2ρ)^{-1/2}`, mapping a full-rank reduced state to `𝟙/2` up to normalization.
fn balancing_filter(reduced: &Mat2) -> Mat2 {
    linalg::hermitian_function2(&(reduced * c(2.0, 0.0)), |x| 1.0 / x.sqrt())
}

/// Iterative local filtering to a Bell-diagonal state.
///
/// Alternately balances the signal and meter reductions until both are within
/// `tol` of `𝟙/2`, then rotates the correlation matrix to diagonal form.
/// Accumulated filters are rescaled to unit spectral norm.
pub fn filter_normal_form(
    state: &TwoQubitState,
    tol: f64,
    max_iter: usize,
) -> Result<FilterResult> {
    check_reduction(&state.signal_reduced(), Side::Signal)?;
    check_reduction(&state.meter_reduced(), Side::Meter)?;

    let b_max_in = bell_max(state);
    let mut current = state.clone();
    let mut f_signal = Mat2::identity();
    let mut f_meter = Mat2::identity();
    let mut deviation = reduction_deviation(&current);
    let mut deviations = vec![deviation];
    let mut iterations = 0;

    while deviation > tol {
        if iterations == max_iter {
            return Err(Error::NoConvergence {
                max_iter,
                deviation,
            });
        }
        let a = balancing_filter(&current.signal_reduced());
        let (m, _) = current.apply_local_operator(&a, &Mat2::identity());
        current = TwoQubitState::from_unnormalized(m)?;
        f_signal = a * f_signal;
        check_reduction(&current.meter_reduced(), Side::Meter)?;

        let b = balancing_filter(&current.meter_reduced());
        let (m, _) = current.apply_local_operator(&Mat2::identity(), &b);
        current = TwoQubitState::from_unnormalized(m)?;
        f_meter = b * f_meter;
        check_reduction(&current.signal_reduced(), Side::Signal)?;

        iterations += 1;
        deviation = reduction_deviation(&current);
        deviations.push(deviation);
    }

    f_signal /= c(linalg::spectral_norm2(&f_signal), 0.0);
    f_meter /= c(linalg::spectral_norm2(&f_meter), 0.0);

    let t = current.bloch().correlation();
    let is_diagonal = (0..3).all(|i| (0..3).all(|j| i == j || t[(i, j)].abs() < 1e-10));
    if !is_diagonal {
        let canon = canonical_form(&current);
        f_signal = canon.u_signal.adjoint() * f_signal;
        f_meter = canon.u_meter.adjoint() * f_meter;
    }

    let (m, success_probability) = state.apply_local_operator(&f_signal, &f_meter);
    let state_out = TwoQubitState::from_unnormalized(m)?;
    let b_max_out = bell_max(&state_out);
    Ok(FilterResult {
        state_out,
        filter_signal: f_signal,
        filter_meter: f_meter,
        success_probability,
        iterations,
        b_max_in,
        b_max_out,
        deviations,
    })
}

/// Filters to the normal form, then maximizes the excess sum on the filtered state.
pub fn saturate_after_filter(state: &TwoQubitState) -> Result<(FilterResult, BoundCheck)> {
    let filtered = filter_normal_form(state, DEFAULT_FILTER_TOL, DEFAULT_MAX_ITER)?;
    let check = optimize_excess_sum(&filtered.state_out).check;
    Ok((filtered, check))
}
