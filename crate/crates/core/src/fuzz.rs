//! Randomized verification of the excess-sum bounds, with replayable instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::MatrixSpec;
use crate::knowledge::{
    bound_check_for_form, require_complementary, same_meter_check_for_form, BoundCheck,
};
use crate::linalg::Vec3;
use crate::measurement::QubitMeasurement;
use crate::state::TwoQubitState;
use crate::states::random_state_from_rng;

/// Slack below which a bound counts as violated.
pub const SLACK_TOL: f64 = -1e-9;

/// One random state with a complementary signal pair and two meter axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzInstance {
    pub trial: u64,
    pub state: MatrixSpec,
    pub signal: QubitMeasurement,
    pub signal_prime: QubitMeasurement,
    pub meter: QubitMeasurement,
    pub meter_prime: QubitMeasurement,
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

/// Instance `trial` of the suite seeded by `seed`; each trial owns ChaCha8 stream `trial`.
pub fn random_instance(seed: u64, trial: u64) -> FuzzInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let ancilla_dim = rng.random_range(1..=4);
    let state = random_state_from_rng(&mut rng, ancilla_dim);
    let s = random_direction(&mut rng);
    let sp = loop {
        let v = random_direction(&mut rng);
        let w = v - s * s.dot(&v);
        if w.norm() > 1e-3 {
            break w.normalize();
        }
    };
    let meter = QubitMeasurement::along(random_direction(&mut rng)).expect("unit");
    let meter_prime = QubitMeasurement::along(random_direction(&mut rng)).expect("unit");
    FuzzInstance {
        trial,
        state: MatrixSpec::from_state(&state),
        signal: QubitMeasurement::along(s).expect("unit"),
        signal_prime: QubitMeasurement::along(sp).expect("unit"),
        meter,
        meter_prime,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceChecks {
    /// Two meters against `(B_max/2)²`.
    pub bell: BoundCheck,
    /// The first meter for both signals, against 1.
    pub same_meter: BoundCheck,
}

impl FuzzInstance {
    /// Fails for an invalid state or non-complementary signals, which a
    /// hand-edited replay file may contain.
    pub fn check(&self) -> Result<InstanceChecks> {
        require_complementary(&self.signal, &self.signal_prime)?;
        let state = self.state.to_state()?;
        Ok(self.check_state(&state))
    }

    fn check_state(&self, state: &TwoQubitState) -> InstanceChecks {
        let form = state.bloch();
        InstanceChecks {
            bell: bound_check_for_form(
                &form,
                &self.signal,
                &self.signal_prime,
                &self.meter,
                &self.meter_prime,
            ),
            same_meter: same_meter_check_for_form(
                &form,
                &self.signal,
                &self.signal_prime,
                &self.meter,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub trials: u64,
    pub seed: u64,
    pub min_slack: f64,
    pub min_same_meter_slack: f64,
    pub violations: u64,
    /// Instance with the smallest `(B_max/2)²` slack.
    pub worst: FuzzInstance,
    pub worst_same_meter: FuzzInstance,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks both bounds on `trials` random instances. Trials are independent
/// streams, so the summary is the same for any thread count.
pub fn fuzz_bounds(trials: u64, seed: u64) -> FuzzSummary {
    fuzz_bounds_with_state(trials, seed, None)
}

/// As [`fuzz_bounds`], optionally replacing every random state by `forced`
/// while keeping the random measurement axes.
pub fn fuzz_bounds_with_state(
    trials: u64,
    seed: u64,
    forced: Option<&TwoQubitState>,
) -> FuzzSummary {
    assert!(trials >= 1, "at least one trial");
    let forced = forced.map(MatrixSpec::from_state);
    let instance = |t: u64| {
        let mut inst = random_instance(seed, t);
        if let Some(m) = &forced {
            inst.state = m.clone();
        }
        inst
    };
    let results: Vec<(u64, InstanceChecks)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let checks = instance(t).check().expect("generated states are valid");
            (t, checks)
        })
        .collect();
    let violations = results
        .iter()
        .filter(|(_, c)| c.bell.slack < SLACK_TOL || c.same_meter.slack < SLACK_TOL)
        .count() as u64;
    let argmin = |key: fn(&InstanceChecks) -> f64| {
        results
            .iter()
            .min_by(|a, b| key(&a.1).total_cmp(&key(&b.1)).then(a.0.cmp(&b.0)))
            .map(|(t, c)| (*t, key(c)))
            .expect("non-empty")
    };
    let (worst, min_slack) = argmin(|c| c.bell.slack);
    let (worst_same, min_same) = argmin(|c| c.same_meter.slack);
    FuzzSummary {
        trials,
        seed,
        min_slack,
        min_same_meter_slack: min_same,
        violations,
        worst: instance(worst),
        worst_same_meter: instance(worst_same),
    }
}
