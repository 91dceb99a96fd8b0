use viscodelay::sweep::{run_sweep, SweepOptions, SweepParam};
use viscodelay::Error;
use viscodelay_core::delay::GainSpec;
use viscodelay_core::scenarios::preset;

#[test]
fn parameter_names_parse() {
    assert_eq!("gain.amplitude".parse::<SweepParam>().unwrap(), SweepParam::GainAmplitude);
    assert_eq!("history.amplitude".parse::<SweepParam>().unwrap(), SweepParam::HistoryAmplitude);
    assert_eq!("delay.tau".parse::<SweepParam>().unwrap(), SweepParam::DelayTau);
    assert!(matches!("gain".parse::<SweepParam>(), Err(Error::Usage(_))));
    for p in [SweepParam::GainAmplitude, SweepParam::HistoryAmplitude, SweepParam::DelayTau] {
        assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
    }
}

#[test]
fn parameters_edit_the_expected_field() {
    let cfg = preset("integral-source-small").unwrap();
    let g = SweepParam::GainAmplitude.apply(&cfg, 0.7).unwrap();
    assert_eq!(g.gain, GainSpec::ExponentialDecay { k0: 0.7, rate: 0.5 });
    let h = SweepParam::HistoryAmplitude.apply(&cfg, 2.0).unwrap();
    assert_eq!(h.history.amplitude, 2.0);
    // Only constant delays have a single τ to sweep.
    assert!(SweepParam::DelayTau.apply(&cfg, 0.3).is_err());
    let lin = preset("no-delay-linear").unwrap();
    let d = SweepParam::DelayTau.apply(&lin, 0.3).unwrap();
    assert_eq!(d.delay.profile, viscodelay_core::delay::DelayFamily::Constant { tau: 0.3 });
}

#[test]
fn rows_keep_the_input_order() {
    let cfg = preset("power-source-small").unwrap();
    let values = [0.03, 0.0, 0.02, 0.01, 0.5];
    let rows = run_sweep(&cfg, SweepParam::GainAmplitude, &values, &SweepOptions::default());
    let got: Vec<f64> = rows.iter().map(|r| r.value).collect();
    assert_eq!(got, values);
    assert_eq!(rows[4].verdict, "infeasible");
    assert!(rows[..4].iter().all(|r| r.verdict == "certified"));
    assert!(rows[1].rho > rows[3].rho && rows[3].rho > rows[2].rho && rows[2].rho > rows[0].rho);
}

#[test]
fn growing_data_eventually_fails_smallness() {
    let cfg = preset("power-source-small").unwrap();
    let a = cfg.history.amplitude;
    let rows = run_sweep(&cfg, SweepParam::HistoryAmplitude, &[a, 4.0 * a], &SweepOptions::default());
    assert!(rows[0].hypotheses_passed);
    assert!(!rows[1].hypotheses_passed);
    assert!(rows[1].failed_checks.contains(&"smallness".to_string()));
    // The radius itself does not depend on the data.
    assert_eq!(rows[0].rho, rows[1].rho);
}

#[test]
fn simulated_sweeps_report_dynamics() {
    let cfg = preset("power-source-small").unwrap();
    let opts = SweepOptions { simulate: true, horizon: Some(20.0), ..SweepOptions::default() };
    let rows = run_sweep(&cfg, SweepParam::GainAmplitude, &[0.0, 0.02], &opts);
    for r in &rows {
        assert_eq!(r.termination.as_deref(), Some("completed"));
        assert_eq!(r.audit_violations, Some(0));
        assert_eq!(r.decay_bound_violations, Some(0));
        assert!(r.fitted_rate.unwrap() > r.mu.unwrap());
    }
}

#[test]
fn invalid_points_are_reported_not_fatal() {
    let cfg = preset("no-delay-linear").unwrap();
    // τ = 2 exceeds τ̄ = 1, so the model cannot be assembled and the chain stops.
    let rows = run_sweep(&cfg, SweepParam::DelayTau, &[0.5, 2.0], &SweepOptions::default());
    assert_eq!(rows[0].verdict, "certified");
    assert_eq!(rows[1].verdict, "unavailable");
    assert!(rows[1].failed_checks.contains(&"model".to_string()));
    assert!(rows[1].error.is_none());

    let mut broken = cfg.clone();
    broken.spectrum.n_modes = 0;
    let rows = run_sweep(&broken, SweepParam::DelayTau, &[0.5], &SweepOptions::default());
    assert_eq!(rows[0].verdict, "error");
    assert!(rows[0].error.is_some());
}
