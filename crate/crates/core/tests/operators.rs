use core::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use viscodelay_core::operators::{
    build_feedback, build_nonlinearity, build_spectrum, sampled_gradient_mismatch, sampled_growth_ratio,
    sampled_lipschitz_ratio, CoefficientSource, NonlinearitySpec, Spectrum,
};
use viscodelay_core::Error;

/// Composite Simpson rule with `panels` (even) subintervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn power(sigma: f64) -> NonlinearitySpec {
    NonlinearitySpec::Power { exponent: sigma, c_h: None, max_exponent: None, grid_points: None }
}

fn integral(p: f64) -> NonlinearitySpec {
    NonlinearitySpec::Integral { exponent: p, c_h: None }
}

#[test]
fn spectrum_eigenvalues_on_unit_and_pi_domains() {
    let s = build_spectrum(3, PI).unwrap();
    assert_eq!(s.n_modes(), 3);
    for (k, l) in s.eigenvalues().iter().enumerate() {
        assert_relative_eq!(*l, ((k + 1) * (k + 1)) as f64, max_relative = 1e-14);
    }
    let s = build_spectrum(2, 1.0).unwrap();
    assert_relative_eq!(s.lambda1(), PI * PI, max_relative = 1e-14);
    assert_relative_eq!(s.eigenvalues()[1], 4.0 * PI * PI, max_relative = 1e-14);
}

#[test]
fn spectrum_rejects_degenerate_dimensions() {
    assert!(matches!(build_spectrum(0, 1.0), Err(Error::InvalidDimension(_))));
    assert!(matches!(build_spectrum(4, 0.0), Err(Error::InvalidDimension(_))));
    assert!(matches!(build_spectrum(4, f64::NAN), Err(Error::InvalidDimension(_))));
}

#[test]
fn eigenfunctions_are_orthonormal_under_quadrature() {
    let s = build_spectrum(5, 2.0).unwrap();
    for j in 0..5 {
        for k in 0..5 {
            let ip = simpson(|x| s.phi(j, x) * s.phi(k, x), 0.0, 2.0, 4000);
            let expect = if j == k { 1.0 } else { 0.0 };
            assert!((ip - expect).abs() < 1e-12, "({j},{k}): {ip}");
        }
    }
}

#[test]
fn modal_norms_are_parseval_sums() {
    let s = build_spectrum(3, PI).unwrap();
    let u = [1.0, -2.0, 0.5];
    assert_eq!(s.norm_sq(&u), 5.25);
    assert_eq!(s.energy_norm_sq(&u), 1.0 + 16.0 + 2.25);
    let l2 = simpson(|x| s.synthesize(&u, x).powi(2), 0.0, PI, 4000);
    assert_relative_eq!(l2, 5.25, max_relative = 1e-12);
}

#[test]
fn full_observation_is_the_identity() {
    let s = build_spectrum(4, PI).unwrap();
    let g = build_feedback(&s, 0.0, PI).unwrap();
    assert!(g.is_full());
    assert_eq!(g.b_norm(), 1.0);
    let v = [1.0, 2.0, -3.0, 0.5];
    let mut out = [0.0; 4];
    g.apply(&v, &mut out);
    assert_eq!(out, v);
    assert_eq!(g.observed_sq(&v), v.iter().map(|x| x * x).sum::<f64>());
}

#[test]
fn gram_entries_match_quadrature() {
    let s = build_spectrum(6, PI).unwrap();
    for (a, b) in [(0.0, PI / 2.0), (PI / 4.0, 3.0 * PI / 4.0), (0.3, 2.9)] {
        let g = build_feedback(&s, a, b).unwrap();
        assert!(!g.is_full());
        for j in 0..6 {
            for k in 0..6 {
                let q = simpson(|x| s.phi(j, x) * s.phi(k, x), a, b, 20_000);
                let e = g.gram()[j * 6 + k];
                assert!((e - q).abs() < 1e-10, "({a},{b}) entry ({j},{k}): {e} vs {q}");
            }
        }
    }
}

#[test]
fn half_interval_gram_first_entry() {
    // ∫_0^{π/2} (2/π) sin² x dx = 1/2.
    let s = build_spectrum(2, PI).unwrap();
    let g = build_feedback(&s, 0.0, PI / 2.0).unwrap();
    assert_relative_eq!(g.gram()[0], 0.5, max_relative = 1e-14);
    // ∫_0^{π/2} (2/π) sin x sin 2x dx = 4/(3π).
    assert_relative_eq!(g.gram()[1], 4.0 / (3.0 * PI), max_relative = 1e-13);
}

#[test]
fn empty_observation_sets_are_rejected() {
    let s = build_spectrum(4, PI).unwrap();
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (-0.1, 1.0), (0.0, 4.0), (f64::NAN, 1.0)] {
        assert!(matches!(build_feedback(&s, a, b), Err(Error::EmptyObservationSet)), "({a},{b})");
    }
}

fn fixed_spectrum() -> Spectrum {
    build_spectrum(10, PI).unwrap()
}

proptest! {
    #[test]
    fn gram_is_symmetric_with_spectrum_in_unit_interval(a in 0.0..3.0f64, w in 0.01..3.0f64) {
        let s = fixed_spectrum();
        let b = (a + w).min(PI);
        prop_assume!(b > a);
        let g = build_feedback(&s, a, b).unwrap();
        let n = s.n_modes();
        for j in 0..n {
            for k in 0..n {
                prop_assert_eq!(g.gram()[j * n + k], g.gram()[k * n + j]);
            }
        }
        let m = DMatrix::from_row_slice(n, n, g.gram());
        let eig = SymmetricEigen::new(m);
        for l in eig.eigenvalues.iter() {
            prop_assert!(*l >= -1e-12 && *l <= 1.0 + 1e-12, "eigenvalue {}", l);
        }
    }

    #[test]
    fn feedback_is_self_adjoint(
        a in 0.0..1.5f64,
        b in 1.6..PI,
        u in proptest::collection::vec(-1.0..1.0f64, 10),
        w in proptest::collection::vec(-1.0..1.0f64, 10),
    ) {
        let s = fixed_spectrum();
        let g = build_feedback(&s, a, b).unwrap();
        let (mut gu, mut gw) = ([0.0; 10], [0.0; 10]);
        g.apply(&u, &mut gu);
        g.apply(&w, &mut gw);
        let l: f64 = gu.iter().zip(&w).map(|(x, y)| x * y).sum();
        let r: f64 = u.iter().zip(&gw).map(|(x, y)| x * y).sum();
        prop_assert!((l - r).abs() < 1e-13);
        let obs = g.observed_sq(&u);
        let norm: f64 = u.iter().map(|x| x * x).sum();
        prop_assert!(obs >= -1e-14 && obs <= norm * (1.0 + 1e-12));
    }
}

#[test]
fn absent_source_is_identically_zero() {
    let s = fixed_spectrum();
    let nl = build_nonlinearity(&NonlinearitySpec::None, &s).unwrap();
    assert!(nl.is_none());
    assert_eq!(nl.coefficient_source(), CoefficientSource::Absent);
    let u = vec![0.3; 10];
    assert_eq!(nl.grad_psi(&u).unwrap(), vec![0.0; 10]);
    assert_eq!(nl.psi(&u).unwrap(), 0.0);
    assert_eq!(nl.h(2.0).unwrap(), 0.0);
    assert_eq!(nl.lipschitz(2.0).unwrap(), 0.0);
    assert_eq!(nl.h_inverse(1.0).unwrap(), f64::INFINITY);
}

#[test]
fn integral_family_examples() {
    let s = fixed_spectrum();
    let nl = build_nonlinearity(&integral(2.0), &s).unwrap();
    let mut u = vec![0.0; 10];
    u[0] = 1.0;
    assert_eq!(nl.grad_psi(&u).unwrap(), u);
    assert_relative_eq!(nl.psi(&u).unwrap(), 0.25, max_relative = 1e-15);
    u[1] = 1.0;
    // ‖u‖² = 2, gradient ‖u‖² u, ψ = ‖u‖⁴/4.
    let g = nl.grad_psi(&u).unwrap();
    assert_relative_eq!(g[0], 2.0, max_relative = 1e-15);
    assert_relative_eq!(nl.psi(&u).unwrap(), 1.0, max_relative = 1e-15);
    assert_eq!(nl.grad_psi(&[0.0; 10]).unwrap(), vec![0.0; 10]);
    assert_eq!(nl.coefficient_source(), CoefficientSource::Analytic);
}

#[test]
fn power_family_gradient_matches_continuous_projection() {
    let s = build_spectrum(8, PI).unwrap();
    let nl = build_nonlinearity(&power(2.0), &s).unwrap();
    let u = [0.7, -0.3, 0.2, 0.0, 0.1, -0.05, 0.0, 0.02];
    let g = nl.grad_psi(&u).unwrap();
    for k in 0..8 {
        let q = simpson(|x| s.synthesize(&u, x).powi(3) * s.phi(k, x), 0.0, PI, 20_000);
        assert!((g[k] - q).abs() < 1e-6, "mode {k}: {} vs {q}", g[k]);
    }
    let psi = simpson(|x| s.synthesize(&u, x).powi(4) / 4.0, 0.0, PI, 20_000);
    assert!((nl.psi(&u).unwrap() - psi).abs() < 1e-6);
}

#[test]
fn configured_coefficients_are_used_and_validated() {
    let s = fixed_spectrum();
    let nl = build_nonlinearity(&NonlinearitySpec::Integral { exponent: 1.0, c_h: Some(3.0) }, &s).unwrap();
    assert_eq!(nl.c_h(), 3.0);
    assert_eq!(nl.coefficient_source(), CoefficientSource::Configured);
    assert_eq!(nl.h(2.0).unwrap(), 6.0);
    assert_relative_eq!(nl.lipschitz(2.0).unwrap(), 6.0 * 2f64.sqrt(), max_relative = 1e-15);
    for bad in [0.0, -1.0, f64::INFINITY] {
        let spec = NonlinearitySpec::Integral { exponent: 1.0, c_h: Some(bad) };
        assert!(matches!(build_nonlinearity(&spec, &s), Err(Error::InvalidParameter(_))));
    }
    assert!(build_nonlinearity(&integral(0.5), &s).is_err());
    assert!(build_nonlinearity(&power(-1.0), &s).is_err());
    let capped = NonlinearitySpec::Power { exponent: 3.0, c_h: None, max_exponent: Some(2.0), grid_points: None };
    assert!(matches!(build_nonlinearity(&capped, &s), Err(Error::InvalidParameter(_))));
    let coarse = NonlinearitySpec::Power { exponent: 2.0, c_h: None, max_exponent: None, grid_points: Some(5) };
    assert!(build_nonlinearity(&coarse, &s).is_err());
}

#[test]
fn growth_function_rejects_negative_arguments() {
    let nl = build_nonlinearity(&power(2.0), &fixed_spectrum()).unwrap();
    assert!(matches!(nl.h(-1.0), Err(Error::NegativeArgument)));
    assert!(matches!(nl.h_inverse(-1.0), Err(Error::NegativeArgument)));
    assert!(matches!(nl.lipschitz(-1.0), Err(Error::NegativeArgument)));
    assert_eq!(nl.h(0.0).unwrap(), 0.0);
}

#[test]
fn sampled_bounds_stay_below_analytic_constants() {
    let s = fixed_spectrum();
    for spec in [power(1.0), power(2.0), power(3.5), integral(1.0), integral(2.0)] {
        let nl = build_nonlinearity(&spec, &s).unwrap();
        let growth = sampled_growth_ratio(&nl, &s, 2000, 7);
        assert!(growth <= nl.growth_constant() * (1.0 + 1e-12), "{spec:?}: growth {growth}");
        assert!(nl.growth_constant() <= nl.c_h());
        let lip = sampled_lipschitz_ratio(&nl, &s, 2000, 11);
        assert!(lip <= 1.0 + 1e-12, "{spec:?}: lipschitz ratio {lip}");
        let mismatch = sampled_gradient_mismatch(&nl, &s, 200, 13);
        assert!(mismatch < 1e-6, "{spec:?}: gradient mismatch {mismatch}");
    }
}

fn central_difference_error(nl: &viscodelay_core::operators::Nonlinearity, u: &[f64], w: &[f64], eps: f64) -> f64 {
    let up: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + eps * b).collect();
    let um: Vec<f64> = u.iter().zip(w).map(|(a, b)| a - eps * b).collect();
    let fd = (nl.psi(&up).unwrap() - nl.psi(&um).unwrap()) / (2.0 * eps);
    let g = nl.grad_psi(u).unwrap();
    let exact: f64 = g.iter().zip(w).map(|(a, b)| a * b).sum();
    (fd - exact).abs()
}

#[test]
fn gradient_difference_error_is_second_order() {
    let s = build_spectrum(6, PI).unwrap();
    let u = [0.8, -0.4, 0.3, 0.1, -0.2, 0.05];
    let w = [0.1, 0.5, -0.3, 0.2, 0.0, 0.4];
    for spec in [power(2.0), power(1.5), integral(1.0)] {
        let nl = build_nonlinearity(&spec, &s).unwrap();
        let e1 = central_difference_error(&nl, &u, &w, 1e-2);
        let e2 = central_difference_error(&nl, &u, &w, 5e-3);
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "{spec:?}: error ratio {ratio}");
    }
}

proptest! {
    #[test]
    fn h_inverse_undoes_h(r in 1e-6..10.0f64, sigma in 0.5..4.0f64) {
        let s = fixed_spectrum();
        for spec in [power(sigma), integral(1.0 + sigma)] {
            let nl = build_nonlinearity(&spec, &s).unwrap();
            let back = nl.h_inverse(nl.h(r).unwrap()).unwrap();
            prop_assert!((back - r).abs() <= 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn potential_is_bounded_by_half_growth(
        u in proptest::collection::vec(-1.0..1.0f64, 10),
        scale in 1e-3..2.0f64,
        sigma in 0.5..3.0f64,
    ) {
        let s = fixed_spectrum();
        let u: Vec<f64> = u.iter().map(|x| x * scale).collect();
        let r = s.energy_norm_sq(&u).sqrt();
        for spec in [power(sigma), integral(1.0 + sigma)] {
            let nl = build_nonlinearity(&spec, &s).unwrap();
            let psi = nl.psi(&u).unwrap();
            prop_assert!(psi >= 0.0);
            prop_assert!(psi <= 0.5 * nl.h(r).unwrap() * r * r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gradient_obeys_growth_bound(
        u in proptest::collection::vec(-1.0..1.0f64, 10),
        scale in 1e-3..2.0f64,
    ) {
        let s = fixed_spectrum();
        let u: Vec<f64> = u.iter().map(|x| x * scale).collect();
        let r = s.energy_norm_sq(&u).sqrt();
        for spec in [power(2.0), integral(2.0)] {
            let nl = build_nonlinearity(&spec, &s).unwrap();
            let g = nl.grad_psi(&u).unwrap();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(norm <= nl.h(r).unwrap() * r * (1.0 + 1e-12));
        }
    }
}
