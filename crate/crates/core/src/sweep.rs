//! Knowledge-excess tables over meter analyzer angles.

use crate::error::Result;
use crate::expsim::{sweep_state, ExperimentConfig, SignalBasis};
use crate::knowledge::{bell_max, knowledge_report};
use crate::measurement::QubitMeasurement;
use crate::state::TwoQubitState;

/// `start, start+step, …` up to and including `stop` (within a hundredth of a step).
pub fn angle_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop >= start, "invalid angle grid");
    let n = ((stop - start) / step + 1e-2).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// One row of `theta_deg,K_hat,P_hat,dK_hat,dK_theory`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub theta_deg: f64,
    pub k: f64,
    pub p: f64,
    pub dk: f64,
    pub dk_theory: f64,
}

impl SweepPoint {
    pub fn row(&self) -> [f64; 5] {
        [self.theta_deg, self.k, self.p, self.dk, self.dk_theory]
    }
}

/// One row of `theta_deg,theta_prime_deg,dK2,dKp2,sum,bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub theta_deg: f64,
    pub theta_prime_deg: f64,
    pub dk2: f64,
    pub dkp2: f64,
    pub sum: f64,
    pub bound: f64,
}

impl SurfacePoint {
    pub fn row(&self) -> [f64; 6] {
        [
            self.theta_deg,
            self.theta_prime_deg,
            self.dk2,
            self.dkp2,
            self.sum,
            self.bound,
        ]
    }
}

fn theory_excess(state: &TwoQubitState, theta: f64, basis: SignalBasis) -> f64 {
    knowledge_report(
        state,
        &QubitMeasurement::from_polarization_angle(theta),
        &basis.measurement(),
    )
    .delta_k
}

/// 1-D sweep over the meter angle. Without `noise` the estimate columns are
/// the exact values; with it they come from simulated counts.
pub fn knowledge_sweep(
    state: &TwoQubitState,
    basis: SignalBasis,
    thetas: &[f64],
    noise: Option<&ExperimentConfig>,
) -> Result<Vec<SweepPoint>> {
    match noise {
        None => Ok(thetas
            .iter()
            .map(|&theta| {
                let r = knowledge_report(
                    state,
                    &QubitMeasurement::from_polarization_angle(theta),
                    &basis.measurement(),
                );
                SweepPoint {
                    theta_deg: theta,
                    k: r.k,
                    p: r.p,
                    dk: r.delta_k,
                    dk_theory: r.delta_k,
                }
            })
            .collect()),
        Some(cfg) => {
            cfg.validate()?;
            let angles: Vec<_> = thetas.iter().map(|&t| (t, basis)).collect();
            let rows = sweep_state(state, &angles, cfg, 0)?;
            Ok(rows
                .into_iter()
                .map(|r| SweepPoint {
                    theta_deg: r.theta_deg,
                    k: r.k_hat,
                    p: r.p_hat,
                    dk: r.dk_hat,
                    dk_theory: theory_excess(state, r.theta_deg, basis),
                })
                .collect())
        }
    }
}

/// `ΔK²(ϑ → H/V) + ΔK'²(ϑ' → X/Y)` over a grid, with the `(B_max/2)²` bound.
pub fn excess_surface(
    state: &TwoQubitState,
    thetas: &[f64],
    theta_primes: &[f64],
    noise: Option<&ExperimentConfig>,
) -> Result<Vec<SurfacePoint>> {
    let hv = knowledge_sweep(state, SignalBasis::Hv, thetas, noise)?;
    let xy = match noise {
        None => knowledge_sweep(state, SignalBasis::Xy, theta_primes, None)?,
        Some(cfg) => {
            cfg.validate()?;
            let angles: Vec<_> = theta_primes.iter().map(|&t| (t, SignalBasis::Xy)).collect();
            sweep_state(state, &angles, cfg, thetas.len() as u64)?
                .into_iter()
                .map(|r| SweepPoint {
                    theta_deg: r.theta_deg,
                    k: r.k_hat,
                    p: r.p_hat,
                    dk: r.dk_hat,
                    dk_theory: f64::NAN,
                })
                .collect()
        }
    };
    let b = bell_max(state);
    let bound = 0.25 * b * b;
    let mut out = Vec::with_capacity(hv.len() * xy.len());
    for a in &hv {
        for b in &xy {
            let (dk2, dkp2) = (a.dk * a.dk, b.dk * b.dk);
            out.push(SurfacePoint {
                theta_deg: a.theta_deg,
                theta_prime_deg: b.theta_deg,
                dk2,
                dkp2,
                sum: dk2 + dkp2,
                bound,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::werner;

    #[test]
    fn grid_includes_endpoint() {
        assert_eq!(angle_grid(0.0, 90.0, 5.0).len(), 19);
        assert_eq!(*angle_grid(0.0, 90.0, 5.0).last().unwrap(), 90.0);
        assert_eq!(angle_grid(0.0, 1.0, 1.0), vec![0.0, 1.0]);
        assert_eq!(angle_grid(10.0, 10.0, 1.0), vec![10.0]);
    }

    #[test]
    fn noiseless_sweep_follows_closed_form() {
        let rows = knowledge_sweep(
            &werner(0.82).unwrap(),
            SignalBasis::Hv,
            &angle_grid(0.0, 90.0, 5.0),
            None,
        )
        .unwrap();
        for r in rows {
            let expected = 0.82 * (2.0 * r.theta_deg).to_radians().cos();
            assert!((r.dk * r.dk - expected * expected).abs() < 1e-12);
            assert!(r.p.abs() < 1e-15);
        }
    }

    #[test]
    fn surface_peak_for_werner() {
        let g = angle_grid(0.0, 90.0, 15.0);
        let pts = excess_surface(&werner(0.82).unwrap(), &g, &g, None).unwrap();
        let best = pts.iter().max_by(|a, b| a.sum.total_cmp(&b.sum)).unwrap();
        assert!((best.sum - 1.3448).abs() < 1e-10);
        assert!(pts.iter().all(|p| p.sum <= p.bound + 1e-9));
    }

    #[test]
    fn noisy_surface_is_deterministic() {
        let cfg = ExperimentConfig::default();
        let g = angle_grid(0.0, 90.0, 30.0);
        let st = werner(0.45).unwrap();
        let a = excess_surface(&st, &g, &g, Some(&cfg)).unwrap();
        let b = excess_surface(&st, &g, &g, Some(&cfg)).unwrap();
        assert_eq!(a, b);
    }
}
