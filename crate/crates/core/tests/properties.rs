//! Property tests for the state, knowledge, canonical and simulation modules.

use kexcess::canonical::{DEFAULT_FILTER_TOL, DEFAULT_MAX_ITER};
use kexcess::conditional::conditional_decompose;
use kexcess::expsim::{
    coincidence_probs, estimate_apriori, estimate_correlation, estimate_knowledge, CountRecord,
};
use kexcess::knowledge::{
    apriori_bloch, apriori_trace, distinguishability_bloch, distinguishability_trace,
    knowledge_bloch, knowledge_report, knowledge_trace,
};
use kexcess::linalg::{self, bloch_operator, c, kron, Mat2, Mat3, Vec3};
use kexcess::states::{bell_diagonal, random_state};
use kexcess::*;
use proptest::prelude::*;

mod support;

fn state_strategy() -> impl Strategy<Value = TwoQubitState> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, d)| random_state(seed, d))
}

fn full_rank_state() -> impl Strategy<Value = TwoQubitState> {
    any::<u64>().prop_map(|seed| random_state(seed, 4))
}

fn direction() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalize())
}

fn measurement() -> impl Strategy<Value = QubitMeasurement> {
    direction().prop_map(|v| QubitMeasurement::new(v).unwrap())
}

/// SU(2) element from a unit quaternion, times a global phase.
fn unitary() -> impl Strategy<Value = Mat2> {
    (direction(), 0.0f64..std::f64::consts::PI, -3.0f64..3.0).prop_map(
        |(axis, half_angle, phase)| {
            let (s, co) = half_angle.sin_cos();
            let u = Mat2::identity() * c(co, 0.0) - bloch_operator(&(axis * s)) * c(0.0, 1.0);
            u * num_complex::Complex64::from_polar(1.0, phase)
        },
    )
}

fn rotation() -> impl Strategy<Value = Mat3> {
    unitary().prop_map(|u| rotation_of_unitary(&u).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bloch_round_trip(st in state_strategy()) {
        let back = st.bloch().recompose().unwrap();
        prop_assert!(linalg::max_abs4(&(back.matrix() - st.matrix())) < 1e-12);
    }

    #[test]
    fn bloch_form_round_trip(st in state_strategy()) {
        let f = st.bloch();
        let again = f.recompose().unwrap().bloch();
        prop_assert!(f.max_abs_difference(&again) < 1e-12);
    }

    #[test]
    fn bloch_bounds(st in state_strategy()) {
        let f = st.bloch();
        prop_assert!(f.signal().norm() <= 1.0 + 1e-10);
        prop_assert!(f.meter().norm() <= 1.0 + 1e-10);
        prop_assert!(f.t.iter().flatten().all(|t| t.abs() <= 1.0 + 1e-10));
    }

    #[test]
    fn dual_path_agreement(st in state_strategy(), b in measurement(), s in measurement()) {
        let f = st.bloch();
        prop_assert!((knowledge_bloch(&f, &b, &s) - knowledge_trace(&st, &b, &s)).abs() < 1e-12);
        prop_assert!((apriori_bloch(&f, &s) - apriori_trace(&st, &s)).abs() < 1e-12);
        prop_assert!((distinguishability_bloch(&f, &s) - distinguishability_trace(&st, &s)).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_chain(st in state_strategy(), b in measurement(), s in measurement()) {
        let r = knowledge_report(&st, &b, &s);
        prop_assert!(0.0 <= r.p && r.p <= r.k + 1e-12 && r.k <= r.d + 1e-12 && r.d <= 1.0 + 1e-12);
        prop_assert!(r.delta_k >= -1e-12 && r.delta_d >= r.delta_k - 1e-12);
    }

    #[test]
    fn conditional_reassembly(st in state_strategy(), s in measurement()) {
        let d = conditional_decompose(&st, &s);
        prop_assert!((d.w + d.w_perp - 1.0).abs() < 1e-10);
        prop_assert!(linalg::max_abs4(&(d.reassemble() - st.matrix())) < 1e-10);
        for (w, rho) in [(d.w, d.rho_m), (d.w_perp, d.rho_m_perp)] {
            if w > 1e-12 {
                prop_assert!(linalg::max_abs2(&(rho - rho.adjoint())) < 1e-10);
                prop_assert!((linalg::trace2(&rho).re - 1.0).abs() < 1e-10);
                prop_assert!(linalg::hermitian_eigenvalues2(&rho)[0] > -1e-10);
            }
        }
    }

    #[test]
    fn complementarity_is_symmetric(a in measurement(), b in measurement()) {
        prop_assert_eq!(a.is_complementary_to(&b), b.is_complementary_to(&a));
        prop_assert!(!a.is_complementary_to(&a));
    }

    #[test]
    fn adjoint_map_is_a_rotation(u in unitary()) {
        let o = rotation_of_unitary(&u).unwrap();
        prop_assert!(linalg::max_abs3(&(o.transpose() * o - Mat3::identity())) < 1e-12);
        prop_assert!((o.determinant() - 1.0).abs() < 1e-10);
        for v in [Vec3::x(), Vec3::y(), Vec3::z()] {
            let lhs = u * bloch_operator(&v) * u.adjoint();
            prop_assert!(linalg::max_abs2(&(lhs - bloch_operator(&(o * v)))) < 1e-12);
        }
    }

    #[test]
    fn rotation_round_trip(o in rotation()) {
        let u = unitary_from_rotation(&o).unwrap();
        prop_assert!(linalg::max_abs3(&(rotation_of_unitary(&u).unwrap() - o)) < 1e-8);
    }

    #[test]
    fn local_unitaries_preserve_spectrum_and_rotate_correlations(
        st in state_strategy(), us in unitary(), um in unitary()
    ) {
        let out = st.apply_local_unitary(&us, &um).unwrap();
        let (a, b) = (st.eigenvalues(), out.eigenvalues());
        for k in 0..4 {
            prop_assert!((a[k] - b[k]).abs() < 1e-10);
        }
        let os = rotation_of_unitary(&us).unwrap();
        let om = rotation_of_unitary(&um).unwrap();
        let expected = os * st.bloch().correlation() * om.transpose();
        prop_assert!(linalg::max_abs3(&(out.bloch().correlation() - expected)) < 1e-10);
        prop_assert!((bell_max(&out) - bell_max(&st)).abs() < 1e-10);
    }

    #[test]
    fn axis_sign_invariance(st in state_strategy(), b in measurement(), s in measurement()) {
        let base = knowledge_report(&st, &b, &s);
        for (bb, ss) in [(b.flipped(), s), (b, s.flipped()), (b.flipped(), s.flipped())] {
            let r = knowledge_report(&st, &bb, &ss);
            prop_assert!((r.k - base.k).abs() < 1e-14);
            prop_assert!((r.p - base.p).abs() < 1e-14);
            prop_assert!((r.d - base.d).abs() < 1e-14);
        }
    }

    #[test]
    fn probabilities_are_normalized(st in state_strategy(), b in measurement(), s in measurement()) {
        let p = coincidence_probs(&st, &b, &s);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|x| *x >= -1e-12));
    }

    #[test]
    fn discrete_knowledge_dominates_apriori(pp in 0u64..10_000, pm in 0u64..10_000, mp in 0u64..10_000, mm in 0u64..10_000) {
        let r = CountRecord::new(pp, pm, mp, mm);
        prop_assume!(r.total() > 0);
        prop_assert!(estimate_knowledge(&r).unwrap() >= estimate_apriori(&r).unwrap());
        let e = estimate_correlation(&r).unwrap();
        prop_assert!((-1.0..=1.0).contains(&e));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn estimators_match_exact_counts(st in state_strategy(), b in measurement(), s in measurement()) {
        let r = CountRecord::from_probabilities(coincidence_probs(&st, &b, &s), 1e8);
        let report = knowledge_report(&st, &b, &s);
        prop_assert!((estimate_knowledge(&r).unwrap() - report.k).abs() < 1e-6);
        prop_assert!((estimate_apriori(&r).unwrap() - report.p).abs() < 1e-6);
        // Correlation oracle: Tr[ρ (s·σ ⊗ b·σ)].
        let op = kron(&bloch_operator(&s.axis()), &bloch_operator(&b.axis()));
        let e = linalg::trace4(&(st.matrix() * op)).re;
        prop_assert!((estimate_correlation(&r).unwrap() - e).abs() < 1e-6);
    }

    #[test]
    fn helstrom_meter_is_optimal(st in state_strategy(), s in measurement(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let best = optimal_meter(&st, &s);
        let k_best = knowledge(&st, &best.measurement, &s);
        prop_assert!((k_best - distinguishability(&st, &s)).abs() < 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if v.norm() < 1e-3 {
                continue;
            }
            let b = QubitMeasurement::along(v).unwrap();
            prop_assert!(knowledge(&st, &b, &s) <= k_best + 1e-9);
        }
    }

    #[test]
    fn bell_diagonal_states_saturate(l in prop::array::uniform4(0.0f64..1.0)) {
        let total: f64 = l.iter().sum();
        prop_assume!(total > 1e-3);
        let st = bell_diagonal(l.map(|x| x / total)).unwrap();
        let opt = optimize_excess_sum(&st);
        prop_assert!(opt.check.slack < 1e-6 && opt.check.slack > -1e-9);
        prop_assert!(opt.signal.is_complementary_to(&opt.signal_prime));
    }

    #[test]
    fn optimizer_respects_bound(st in state_strategy()) {
        let opt = optimize_excess_sum(&st);
        prop_assert!(opt.check.slack >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn filtering_properties(st in full_rank_state()) {
        let r = filter_normal_form(&st, DEFAULT_FILTER_TOL, DEFAULT_MAX_ITER).unwrap();
        let half = Mat2::identity() * c(0.5, 0.0);
        prop_assert!(linalg::max_abs2(&(r.state_out.signal_reduced() - half)) < 1e-8);
        prop_assert!(linalg::max_abs2(&(r.state_out.meter_reduced() - half)) < 1e-8);
        prop_assert!((r.b_max_out - support::lorentz_bell_factor(&st)).abs() < 1e-8);
        if r.b_max_in > 2.0 {
            prop_assert!(r.b_max_out >= r.b_max_in - 1e-9, "{} < {}", r.b_max_out, r.b_max_in);
        }
        prop_assert!((linalg::spectral_norm2(&r.filter_signal) - 1.0).abs() < 1e-10);
        prop_assert!((linalg::spectral_norm2(&r.filter_meter) - 1.0).abs() < 1e-10);
        prop_assert!(r.success_probability > 0.0 && r.success_probability <= 1.0 + 1e-12);
        for w in r.deviations.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15, "deviation rose {:?}", r.deviations);
        }
        prop_assert!(*r.deviations.last().unwrap() <= DEFAULT_FILTER_TOL);
        let t = r.state_out.bloch().correlation();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    prop_assert!(t[(i, j)].abs() < 1e-8);
                }
            }
        }
    }
}

/// Violating states mixed from a pure state and full-rank noise, so the
/// CHSH-violating branch of the monotonicity check is actually exercised.
fn violating_state() -> impl Strategy<Value = TwoQubitState> {
    (any::<u64>(), 0.01f64..0.3).prop_filter_map("CHSH violation", |(seed, eps)| {
        let m = random_state(seed, 1).matrix() * c(1.0 - eps, 0.0)
            + random_state(!seed, 4).matrix() * c(eps, 0.0);
        let st = TwoQubitState::new(m).ok()?;
        (bell_max(&st) > 2.0).then_some(st)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn filtering_never_lowers_a_chsh_violation(st in violating_state()) {
        let r = filter_normal_form(&st, DEFAULT_FILTER_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(r.b_max_out >= r.b_max_in - 1e-9, "{} < {}", r.b_max_out, r.b_max_in);
    }
}

#[test]
fn filtering_can_lower_a_non_violating_bell_factor() {
    let st = random_state(68, 4);
    let r = filter_normal_form(&st, DEFAULT_FILTER_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!(r.b_max_in < 2.0);
    assert!(
        r.b_max_out < r.b_max_in - 1e-3,
        "{} vs {}",
        r.b_max_out,
        r.b_max_in
    );
    assert!((r.b_max_out - support::lorentz_bell_factor(&st)).abs() < 1e-8);
}
