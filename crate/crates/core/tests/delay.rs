use approx::assert_relative_eq;
use proptest::prelude::*;
use viscodelay_core::delay::{
    delayed_velocity, fit_gain_growth, gain_budget, DelayFamily, DelaySpec, GainSpec, HistoryBuffer, InitialHistory,
    PositionProfile, VelocityProfile,
};
use viscodelay_core::Error;

/// `∫_a^b |k|` by the midpoint rule on `n` cells.
fn midpoint_abs(gain: &GainSpec, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| gain.value(a + h * (i as f64 + 0.5)).abs()).sum::<f64>() * h
}

/// Window sup of `∫_s^{s+len} |k|` by brute force: a grid of window starts,
/// each integral by the midpoint rule.
fn brute_window_sup(gain: &GainSpec, len: f64, s_min: f64, span: f64, starts: usize) -> f64 {
    (0..=starts)
        .map(|i| {
            let s = s_min + span * i as f64 / starts as f64;
            midpoint_abs(gain, s, s + len, 400)
        })
        .fold(0.0, f64::max)
}

#[test]
fn delay_values_for_each_family() {
    let c = DelaySpec::new(1.0, DelayFamily::Constant { tau: 0.5 }).unwrap();
    assert_eq!(c.tau(7.0), 0.5);
    let s = DelaySpec::new(1.0, DelayFamily::Sinusoidal { mean: 0.5, amplitude: 0.4, frequency: 1.0 }).unwrap();
    assert_relative_eq!(s.tau(core::f64::consts::FRAC_PI_2), 0.9, max_relative = 1e-15);
    assert_eq!(s.tau_min(), 0.5 - 0.4);
    assert_eq!(s.tau_max(), 0.9);
    let p = DelaySpec::new(1.0, DelayFamily::PiecewiseLinear { knots: vec![(0.0, 0.8), (5.0, 0.2), (10.0, 0.6)] })
        .unwrap();
    assert_eq!(p.tau(0.0), 0.8);
    assert_relative_eq!(p.tau(2.5), 0.5, max_relative = 1e-15);
    assert_relative_eq!(p.tau(7.5), 0.4, max_relative = 1e-15);
    assert_eq!(p.tau(100.0), 0.6);
    assert_eq!(p.tau_min(), 0.2);
    assert_eq!(p.tau_max(), 0.8);
}

#[test]
fn delays_outside_the_bound_are_rejected() {
    let bad = [
        (1.0, DelayFamily::Constant { tau: 1.5 }),
        (1.0, DelayFamily::Constant { tau: -0.1 }),
        (1.0, DelayFamily::Sinusoidal { mean: 0.5, amplitude: 0.6, frequency: 1.0 }),
        (1.0, DelayFamily::PiecewiseLinear { knots: vec![(0.0, 0.5), (1.0, 1.2)] }),
        (1.0, DelayFamily::PiecewiseLinear { knots: vec![(1.0, 0.5), (1.0, 0.6)] }),
        (1.0, DelayFamily::PiecewiseLinear { knots: vec![] }),
        (0.0, DelayFamily::Constant { tau: 0.0 }),
        (f64::INFINITY, DelayFamily::Constant { tau: 0.0 }),
    ];
    for (tau_bar, family) in bad {
        assert!(matches!(DelaySpec::new(tau_bar, family.clone()), Err(Error::InvalidParameter(_))), "{family:?}");
    }
}

proptest! {
    #[test]
    fn validated_delays_stay_within_bounds(
        mean in 0.0..1.0f64,
        amplitude in 0.0..1.0f64,
        frequency in 0.0..5.0f64,
        knots in proptest::collection::vec((0.1..3.0f64, 0.0..1.2f64), 1..6),
    ) {
        let families = [
            DelayFamily::Sinusoidal { mean, amplitude, frequency },
            DelayFamily::PiecewiseLinear {
                knots: knots.iter().scan(0.0, |t, (dt, v)| { *t += dt; Some((*t, *v)) }).collect(),
            },
        ];
        for family in families {
            match DelaySpec::new(1.0, family) {
                Ok(d) => {
                    for i in 0..2000 {
                        let t = 0.01 * i as f64;
                        let tau = d.tau(t);
                        prop_assert!(tau >= d.tau_min() - 1e-15 && tau <= d.tau_max() + 1e-15);
                        prop_assert!((0.0..=1.0).contains(&tau));
                    }
                }
                Err(e) => prop_assert!(matches!(e, Error::InvalidParameter(_))),
            }
        }
    }
}

#[test]
fn gain_budget_examples() {
    assert_eq!(gain_budget(&GainSpec::Constant { k0: 0.3 }, 2.0).unwrap(), 0.6);
    assert_eq!(gain_budget(&GainSpec::Constant { k0: -0.3 }, 1.0).unwrap(), 0.3);
    let e = GainSpec::ExponentialDecay { k0: 1.0, rate: 1.0 };
    let k = gain_budget(&e, 1.0).unwrap();
    assert_relative_eq!(k, 1.0 - (-1.0f64).exp(), max_relative = 1e-15);
    let brute = brute_window_sup(&e, 1.0, -1.0, 10.0, 2000);
    assert!((k - brute).abs() < 1e-5, "{k} vs {brute}");
    let pulses = GainSpec::PeriodicPulses { amplitude: 2.0, period: 1.0, width: 0.25 };
    assert_relative_eq!(gain_budget(&pulses, 0.5).unwrap(), 0.5, max_relative = 1e-14);
    assert_eq!(
        gain_budget(&GainSpec::ExponentialDecay { k0: 1.0, rate: -0.5 }, 1.0),
        Err(Error::UnboundedBudget)
    );
}

#[test]
fn exponential_gain_is_zero_before_the_start() {
    let e = GainSpec::ExponentialDecay { k0: 2.0, rate: 0.5 };
    assert_eq!(e.value(-0.1), 0.0);
    assert_eq!(e.value(0.0), 2.0);
    assert_eq!(e.abs_integral(-3.0, 0.0), 0.0);
}

fn gain_strategy() -> impl Strategy<Value = GainSpec> {
    prop_oneof![
        (-2.0..2.0f64).prop_map(|k0| GainSpec::Constant { k0 }),
        (-2.0..2.0f64, 0.0..2.0f64).prop_map(|(k0, rate)| GainSpec::ExponentialDecay { k0, rate }),
        (0.1..2.0f64, 0.2..3.0f64, 0.05..0.95f64).prop_map(|(amplitude, period, frac)| GainSpec::PeriodicPulses {
            amplitude,
            period,
            width: frac * period,
        }),
        (0.1..2.0f64, 0.2..3.0f64).prop_map(|(amplitude, period)| GainSpec::SignAlternating { amplitude, period }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn abs_integral_matches_midpoint_rule(gain in gain_strategy(), a in -2.0..5.0f64, len in 0.0..4.0f64) {
        let exact = gain.abs_integral(a, a + len);
        let brute = midpoint_abs(&gain, a, a + len, 20_000);
        // Jumps cost at most one cell of mass per discontinuity.
        let tol = 1e-6 + 4.0 * gain.amplitude().abs() * len / 20_000.0 * (len + 2.0);
        prop_assert!((exact - brute).abs() <= tol, "{} vs {}", exact, brute);
    }

    #[test]
    fn window_sup_dominates_and_is_attained(gain in gain_strategy(), len in 0.05..3.0f64) {
        let exact = gain.window_sup(len, -len);
        let period = match gain {
            GainSpec::PeriodicPulses { period, .. } | GainSpec::SignAlternating { period, .. } => period,
            _ => 4.0,
        };
        let span = period.max(len) + len;
        let sampled = gain.sampled_window_sup(len, -len, span, 20_000);
        prop_assert!(exact >= sampled - 1e-12, "{} < {}", exact, sampled);
        // Window integrals are Lipschitz in the start with constant 2 sup|k|.
        let slack = 2.0 * gain.amplitude().abs() * span / 20_000.0;
        prop_assert!(exact <= sampled + slack + 1e-12, "{} > {} + {}", exact, sampled, slack);
    }

    #[test]
    fn growth_line_dominates_on_a_grid(gain in gain_strategy(), m in 1.0..2.0f64, omega in 0.5..2.0f64) {
        match fit_gain_growth(&gain, 1.0, m, omega, 0.5, 60.0) {
            Ok(g) => {
                prop_assert!(g.omega_prime < omega);
                prop_assert!(g.gamma >= 0.0);
                for i in 0..=6000 {
                    let t = 0.02 * i as f64;
                    let lhs = g.coefficient * gain.abs_integral(0.0, t);
                    prop_assert!(lhs <= g.gamma + g.omega_prime * t + 1e-9 * (1.0 + lhs), "t = {}", t);
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::InfeasibleHypothesis(_))),
        }
    }
}

#[test]
fn periodic_window_sup_matches_dense_sampling() {
    let g = GainSpec::SignAlternating { amplitude: 1.3, period: 2.0 };
    for len in [0.3, 0.7, 1.0, 1.9] {
        let exact = g.window_sup(len, -len);
        let dense = g.sampled_window_sup(len, 0.0, 2.0, 2_000_000);
        assert!((exact - dense).abs() < 1e-8, "len {len}: {exact} vs {dense}");
    }
}

#[test]
fn gain_growth_examples() {
    let c = fit_gain_growth(&GainSpec::Constant { k0: 0.02 }, 1.0, 1.5, 0.2, 1.0, 50.0).unwrap();
    let coef = 1.5 * 0.2f64.exp();
    assert_relative_eq!(c.coefficient, coef, max_relative = 1e-15);
    assert_relative_eq!(c.omega_prime, coef * 0.02, max_relative = 1e-15);
    assert_eq!(c.gamma, 0.0);

    let e = fit_gain_growth(&GainSpec::ExponentialDecay { k0: 0.3, rate: 0.5 }, 1.0, 1.0, 0.1, 1.0, 50.0).unwrap();
    assert_eq!(e.omega_prime, 0.0);
    assert_relative_eq!(e.gamma, 0.1f64.exp() * 0.6, max_relative = 1e-12);

    let r = fit_gain_growth(&GainSpec::Constant { k0: 4.0 }, 1.0, 1.3, 0.12, 1.0, 50.0);
    assert!(matches!(r, Err(Error::InfeasibleHypothesis(_))));
}

fn sine_history(n: usize) -> InitialHistory {
    // g(s) = w cos s, u₀ constant: only the velocity history matters here.
    InitialHistory::new(vec![0.0; n], PositionProfile::Constant, vec![1.0; n], VelocityProfile::Sinusoidal {
        frequency: 1.0,
    })
    .unwrap()
}

#[test]
fn delayed_velocity_before_zero_reads_the_history() {
    let h = sine_history(2);
    let b = HistoryBuffer::new(2);
    let d = DelaySpec::new(1.0, DelayFamily::Constant { tau: 0.8 }).unwrap();
    let r = delayed_velocity(&b, &h, 0.3, &d).unwrap();
    assert!(!r.predicted);
    assert_relative_eq!(r.values[0], (-0.5f64).cos(), max_relative = 1e-15);
    // Past the history window without a buffer there is nothing to read.
    let b = HistoryBuffer::new(2);
    assert!(matches!(delayed_velocity(&b, &h, 0.9, &d), Err(Error::HistoryGap { .. })));
}

#[test]
fn delayed_velocity_interpolates_a_smooth_trajectory() {
    // Buffer holds v(t) = cos t exactly, continuing the history smoothly.
    let h = sine_history(1);
    let mut b = HistoryBuffer::new(1);
    let dt = 0.01;
    for i in 0..=1000 {
        let t = dt * i as f64;
        b.push(t, &[t.sin()], &[t.cos()], &[-t.sin()], 0.0).unwrap();
    }
    let d = DelaySpec::new(1.0, DelayFamily::Sinusoidal { mean: 0.5, amplitude: 0.4, frequency: 1.0 }).unwrap();
    let mut worst = 0.0f64;
    for i in 0..997 {
        let t = 0.0123 + 0.01 * i as f64;
        let r = delayed_velocity(&b, &h, t, &d).unwrap();
        assert!(!r.predicted);
        worst = worst.max((r.values[0] - (t - d.tau(t)).cos()).abs());
    }
    assert!(worst < 1e-8, "interpolation error {worst}");
}

#[test]
fn lookups_past_the_last_sample_are_predicted() {
    let h = sine_history(1);
    let mut b = HistoryBuffer::new(1);
    b.push(0.0, &[0.0], &[1.0], &[2.0], 0.0).unwrap();
    b.push(0.1, &[0.1], &[1.2], &[2.0], 0.0).unwrap();
    let d = DelaySpec::new(1.0, DelayFamily::Constant { tau: 0.0 }).unwrap();
    let r = delayed_velocity(&b, &h, 0.15, &d).unwrap();
    assert!(r.predicted);
    assert_relative_eq!(r.values[0], 1.3, max_relative = 1e-14);
}

#[test]
fn history_profiles_and_derived_data() {
    let h = InitialHistory::new(
        vec![1.0, 0.5],
        PositionProfile::Ramp { slope: 0.5, t_hist: 2.0 },
        vec![0.0, 0.0],
        VelocityProfile::Consistent,
    )
    .unwrap();
    assert_eq!(h.u0(), vec![1.0, 0.5]);
    assert_eq!(h.u1(), vec![0.5, 0.25]);
    assert_eq!(h.flat_before(), -2.0);
    assert_eq!(h.flat_value(), &[0.0, 0.0]);
    let mut out = [0.0; 2];
    h.position(-1.0, &mut out);
    assert_eq!(out, [0.5, 0.25]);
    h.velocity(-3.0, &mut out);
    assert_eq!(out, [0.0, 0.0]);
    assert!(h.velocity_continuous_on(1.0));
    assert!(!h.velocity_continuous_on(3.0));
    let s = h.scaled(2.0);
    assert_eq!(s.u0(), vec![2.0, 1.0]);
    assert!(InitialHistory::zero(3).is_zero());

    let bad = InitialHistory::new(vec![1.0], PositionProfile::Constant, vec![1.0, 2.0], VelocityProfile::Constant);
    assert!(matches!(bad, Err(Error::ShapeMismatch { expected: 1, found: 2 })));
    let open = InitialHistory::new(
        vec![1.0],
        PositionProfile::Ramp { slope: 1.0, t_hist: f64::INFINITY },
        vec![1.0],
        VelocityProfile::Constant,
    );
    assert!(matches!(open, Err(Error::UnsupportedHistoryFamily(_))));
}
