//! Maximization of `ΔK² + ΔK'²` over complementary signal pairs.
//!
//! Meters are always taken Helstrom-optimal, so `ΔK = ΔD` and only the signal
//! frame is searched. The seed is the canonical frame of the correlation
//! matrix; a Nelder–Mead search over ZYZ Euler angles refines it.

use crate::bloch::BlochForm;
use crate::canonical::correlation_svd;
use crate::knowledge::{
    bound_check_for_form, distinguishability_excess, optimal_meter_for_form, BoundCheck,
};
use crate::linalg::{Mat3, Vec3};
use crate::measurement::QubitMeasurement;
use crate::state::TwoQubitState;

const RESTARTS: usize = 3;
const IMPROVEMENT_TOL: f64 = 1e-10;
const MAX_EVALS: usize = 4000;
const INITIAL_STEP: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessOptimum {
    pub signal: QubitMeasurement,
    pub signal_prime: QubitMeasurement,
    pub meter: QubitMeasurement,
    pub meter_prime: QubitMeasurement,
    pub check: BoundCheck,
}

fn euler_zyz(x: &[f64; 3]) -> Mat3 {
    let rz = |a: f64| {
        let (s, c) = a.sin_cos();
        Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    };
    let (s, c) = x[1].sin_cos();
    let ry = Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c);
    rz(x[0]) * ry * rz(x[2])
}

fn frame_axes(seed: &Mat3, x: &[f64; 3]) -> (Vec3, Vec3) {
    let r = seed * euler_zyz(x);
    (r.column(0).into_owned(), r.column(1).into_owned())
}

fn excess_sum(form: &BlochForm, s: Vec3, s_prime: Vec3) -> f64 {
    let a = QubitMeasurement::along(s).expect("frame column");
    let b = QubitMeasurement::along(s_prime).expect("frame column");
    let da = distinguishability_excess(form, &a);
    let db = distinguishability_excess(form, &b);
    da * da + db * db
}

/// Downhill simplex minimization in three dimensions.
pub fn nelder_mead(
    f: impl Fn(&[f64; 3]) -> f64,
    start: [f64; 3],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> ([f64; 3], f64) {
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for i in 0..3 {
        let mut x = start;
        x[i] += step;
        simplex.push((x, f(&x)));
    }
    let mut evals = 4;
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [
            a[0] + t * (b[0] - a[0]),
            a[1] + t * (b[1] - a[1]),
            a[2] + t * (b[2] - a[2]),
        ]
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[3].1 - simplex[0].1 < tol {
            break;
        }
        let mut centroid = [0.0; 3];
        for (x, _) in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += x[k] / 3.0;
            }
        }
        let worst = simplex[3];
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[3] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let (target, ft) = if fr < worst.1 { (reflected, fr) } else { worst };
            let contracted = lerp(&centroid, &target, 0.5);
            let fc = f(&contracted);
            evals += 1;
            if fc < ft {
                simplex[3] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    v.0 = lerp(&best, &v.0, 0.5);
                    v.1 = f(&v.0);
                }
                evals += 3;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// Complementary signal pair and meters maximizing `ΔK² + ΔK'²`, with the
/// resulting check against `(B_max/2)²`.
pub fn optimize_excess_sum(state: &TwoQubitState) -> ExcessOptimum {
    let form = state.bloch();
    let (seed_frame, _, _) = correlation_svd(&form.correlation());
    let objective = |x: &[f64; 3]| {
        let (s, sp) = frame_axes(&seed_frame, x);
        -excess_sum(&form, s, sp)
    };

    let mut best = ([0.0; 3], objective(&[0.0; 3]));
    for _ in 0..RESTARTS {
        let (x, fx) = nelder_mead(objective, best.0, INITIAL_STEP, IMPROVEMENT_TOL, MAX_EVALS);
        let improved = best.1 - fx;
        if fx < best.1 {
            best = (x, fx);
        }
        if improved < IMPROVEMENT_TOL {
            break;
        }
    }

    let (s, sp) = frame_axes(&seed_frame, &best.0);
    let signal = QubitMeasurement::along(s).expect("frame column");
    let signal_prime = QubitMeasurement::along(sp).expect("frame column");
    let meter = optimal_meter_for_form(&form, &signal).measurement;
    let meter_prime = optimal_meter_for_form(&form, &signal_prime).measurement;
    let check = bound_check_for_form(&form, &signal, &signal_prime, &meter, &meter_prime);
    ExcessOptimum {
        signal,
        signal_prime,
        meter,
        meter_prime,
        check,
    }
}
