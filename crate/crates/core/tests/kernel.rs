use proptest::prelude::*;
use viscodelay_core::delay::{InitialHistory, PositionProfile, VelocityProfile};
use viscodelay_core::kernel::{
    eta_energy, init_memory_state, make_kernel, memory_rhs, EtaQuadrature, KernelSpec, MemoryState, PastTrajectory,
};
use viscodelay_core::{Error, Result};

/// Trapezoid rule on `[a, b]` with one Richardson step, halving the step
/// until successive extrapolated values agree to `rtol` (relative to `scale`).
fn trapezoid_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> f64 {
    let scale = {
        let h = (b - a) / 64.0;
        (0..=64).map(|i| f(a + h * i as f64).abs()).fold(0.0, f64::max) * (b - a)
    };
    let mut n = 64usize;
    let mut prev_t = f64::NAN;
    let mut prev_r = f64::NAN;
    loop {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + h * i as f64);
        }
        let t = s * h;
        let r = t + (t - prev_t) / 3.0;
        if (r - prev_r).abs() <= rtol * scale || n >= 1 << 22 {
            return r;
        }
        prev_t = t;
        prev_r = r;
        n *= 2;
    }
}

fn ramp_history() -> InitialHistory {
    InitialHistory::new(
        vec![1.0, -0.5, 0.25],
        PositionProfile::Ramp { slope: 0.7, t_hist: 3.0 },
        vec![0.2, 0.1, 0.0],
        VelocityProfile::Constant,
    )
    .unwrap()
}

#[test]
fn kernel_examples() {
    let k = make_kernel(&[(1.0, 2.0)]).unwrap();
    assert_eq!((k.beta_tilde(), k.delta(), k.beta0()), (0.5, 2.0, 1.0));
    let k = make_kernel(&[(0.5, 1.0), (0.25, 1.0)]).unwrap();
    assert_eq!(k.beta_tilde(), 0.75);
    assert_eq!(make_kernel(&[(2.0, 1.0)]), Err(Error::MassNotLessThanOne { mass: 2.0 }));
    assert_eq!(make_kernel(&[(1.0, -1.0)]), Err(Error::NonPositiveTerm { index: 0 }));
    assert_eq!(make_kernel(&[]), Err(Error::EmptyKernel));
}

#[test]
fn memory_rhs_examples() {
    let k = make_kernel(&[(1.0, 2.0)]).unwrap();
    let z = MemoryState::zeros(1, 2);
    assert!(memory_rhs(&k, &z, &[0.0, 0.0]).unwrap().as_slice().iter().all(|&x| x == 0.0));
    assert_eq!(memory_rhs(&k, &z, &[1.0, 1.0]).unwrap().as_slice(), &[1.0, 1.0]);
}

#[test]
fn constant_input_drives_memory_to_convolution() {
    let k = make_kernel(&[(1.0, 2.0), (0.3, 0.9)]).unwrap();
    let u = [1.0, -2.0];
    let mut z = MemoryState::zeros(2, 2);
    let h = 1e-2;
    for _ in 0..4000 {
        let rk = |z: &MemoryState| memory_rhs(&k, z, &u).unwrap();
        let add = |z: &MemoryState, d: &MemoryState, c: f64| {
            let v: Vec<f64> = z.as_slice().iter().zip(d.as_slice()).map(|(a, b)| a + c * b).collect();
            MemoryState::from_vec(2, 2, v).unwrap()
        };
        let k1 = rk(&z);
        let k2 = rk(&add(&z, &k1, h / 2.0));
        let k3 = rk(&add(&z, &k2, h / 2.0));
        let k4 = rk(&add(&z, &k3, h));
        let v: Vec<f64> = (0..4)
            .map(|i| {
                z.as_slice()[i]
                    + h / 6.0 * (k1.as_slice()[i] + 2.0 * k2.as_slice()[i] + 2.0 * k3.as_slice()[i] + k4.as_slice()[i])
            })
            .collect();
        z = MemoryState::from_vec(2, 2, v).unwrap();
    }
    let direct = trapezoid_oracle(|s| k.beta(s), 0.0, 80.0, 1e-12);
    for (m, &um) in u.iter().enumerate() {
        assert!((z.convolution(m) - direct * um).abs() < 1e-8, "mode {m}");
    }
}

#[test]
fn init_memory_examples() {
    let k = make_kernel(&[(1.0, 2.0)]).unwrap();
    let h = InitialHistory::new(vec![0.4, -1.0], PositionProfile::Constant, vec![0.0; 2], VelocityProfile::Constant).unwrap();
    let z = init_memory_state(&k, &h).unwrap();
    assert!((z.get(0, 0) - 0.2).abs() < 1e-14 && (z.get(0, 1) + 0.5).abs() < 1e-14);
    let z = init_memory_state(&k, &InitialHistory::zero(3)).unwrap();
    assert!(z.as_slice().iter().all(|&x| x == 0.0));
}

#[test]
fn init_memory_matches_brute_force_on_ramp() {
    let k = make_kernel(&[(1.0, 2.0), (0.2, 0.5)]).unwrap();
    let h = ramp_history();
    let z = init_memory_state(&k, &h).unwrap();
    let mut u = [0.0; 3];
    for (j, t) in k.terms().iter().enumerate() {
        for m in 0..3 {
            let f = |s: f64| {
                let mut out = [0.0; 3];
                h.position(-s, &mut out);
                t.weight * (-t.rate * s).exp() * out[m]
            };
            // Split at the kink of the ramp, then a long flat tail.
            let oracle = trapezoid_oracle(f, 0.0, 3.0, 1e-13) + trapezoid_oracle(f, 3.0, 120.0, 1e-13);
            h.position(0.0, &mut u);
            let rel = (z.get(j, m) - oracle).abs() / oracle.abs().max(1e-300);
            assert!(rel < 1e-10 || (z.get(j, m) - oracle).abs() < 1e-12, "term {j} mode {m}: {} vs {oracle}", z.get(j, m));
        }
    }
}

/// Exact single-mode trajectory `u(t) = cos t` on the whole line.
struct Cosine;

impl PastTrajectory for Cosine {
    fn position(&self, t: f64, out: &mut [f64]) -> Result<()> {
        out[0] = t.cos();
        Ok(())
    }

    fn flat_position(&self) -> Option<(f64, &[f64])> {
        None
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `½λ∫ b e^{−δs}(cos t − cos(t − s))² ds` from Laplace transforms of
/// `1`, `cos s`, `sin s`, `cos 2s` and `sin 2s`.
fn cosine_eta_exact(kernel: &KernelSpec, lambda: f64, t: f64) -> f64 {
    let (c, s) = (t.cos(), t.sin());
    let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
    kernel
        .terms()
        .iter()
        .map(|term| {
            let d = term.rate;
            let one = 1.0 / d;
            let cross = c * d / (d * d + 1.0) + s / (d * d + 1.0);
            let square = 0.5 / d + 0.5 * (c2 * d / (d * d + 4.0) + s2 * 2.0 / (d * d + 4.0));
            term.weight * (c * c * one - 2.0 * c * cross + square)
        })
        .sum::<f64>()
        * 0.5
        * lambda
}

#[test]
fn eta_energy_of_cosine_matches_closed_form() {
    let k = make_kernel(&[(1.0, 2.0)]).unwrap();
    let opts = EtaQuadrature { s_cut: Some(20.0), ..EtaQuadrature::default() };
    for &t in &[0.0, 0.7, 2.5, 11.0] {
        let value = eta_energy(&k, &[1.0], t, &[t.cos()], &Cosine, &opts).unwrap();
        let exact = cosine_eta_exact(&k, 1.0, t);
        assert!((value - exact).abs() < 1e-8 * exact, "t = {t}: {value} vs {exact}");
    }
}

#[test]
fn eta_energy_is_zero_for_rest_and_linear_in_weight() {
    let k1 = make_kernel(&[(0.4, 2.0)]).unwrap();
    let k2 = make_kernel(&[(0.8, 2.0)]).unwrap();
    let h = InitialHistory::new(vec![0.3], PositionProfile::Constant, vec![0.0], VelocityProfile::Constant).unwrap();
    let buffer = viscodelay_core::delay::HistoryBuffer::new(1);
    let tl = viscodelay_core::delay::Timeline { buffer: &buffer, history: &h };
    let o = EtaQuadrature::default();
    assert_eq!(eta_energy(&k1, &[1.0], 0.0, &[0.3], &tl, &o).unwrap(), 0.0);
    let a = eta_energy(&k1, &[1.0], 1.5, &[1.5f64.cos()], &Cosine, &o).unwrap();
    let b = eta_energy(&k2, &[1.0], 1.5, &[1.5f64.cos()], &Cosine, &o).unwrap();
    assert!((b - 2.0 * a).abs() < 1e-12 * b);
}

fn kernel_strategy() -> impl Strategy<Value = KernelSpec> {
    prop::collection::vec((0.01f64..3.0, 0.1f64..10.0), 1..5).prop_filter_map("mass below one", |terms| {
        let mass: f64 = terms.iter().map(|(b, d)| b / d).sum();
        make_kernel(&terms).ok().filter(|_| mass < 1.0)
    })
}

proptest! {
    #[test]
    fn kernel_derivative_bound_holds(k in kernel_strategy(), s in 0.0f64..50.0) {
        let slack = 1e-12 * k.beta(s).abs().max(1e-300);
        prop_assert!(k.beta_prime(s) + k.delta() * k.beta(s) <= slack);
    }

    #[test]
    fn memory_rhs_is_exactly_linear(
        // Dyadic inputs keep every product and sum exact in binary floating point.
        b in 1i32..8, d in 1i32..16,
        u1 in prop::collection::vec(-64i32..64, 3), u2 in prop::collection::vec(-64i32..64, 3),
        z1 in prop::collection::vec(-64i32..64, 3), z2 in prop::collection::vec(-64i32..64, 3),
    ) {
        let (b, d) = (b as f64 / 8.0, d as f64);
        prop_assume!(b / d < 1.0);
        let k = make_kernel(&[(b, d)]).unwrap();
        let f = |v: &[i32]| v.iter().map(|&x| x as f64 / 4.0).collect::<Vec<f64>>();
        let (u1, u2, z1, z2) = (f(&u1), f(&u2), f(&z1), f(&z2));
        let sum = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x + y).collect::<Vec<f64>>();
        let ms = |z: Vec<f64>| MemoryState::from_vec(1, 3, z).unwrap();
        let lhs = memory_rhs(&k, &ms(sum(&z1, &z2)), &sum(&u1, &u2)).unwrap();
        let r1 = memory_rhs(&k, &ms(z1.clone()), &u1).unwrap();
        let r2 = memory_rhs(&k, &ms(z2.clone()), &u2).unwrap();
        prop_assert_eq!(lhs.as_slice().to_vec(), sum(r1.as_slice(), r2.as_slice()));
    }

    #[test]
    fn eta_energy_is_non_negative(
        k in kernel_strategy(),
        shape in prop::collection::vec(-2.0f64..2.0, 3),
        slope in -1.0f64..1.0,
        t_hist in 0.1f64..4.0,
        u_now in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let h = InitialHistory::new(shape, PositionProfile::Ramp { slope, t_hist }, vec![0.0; 3], VelocityProfile::Constant).unwrap();
        let buffer = viscodelay_core::delay::HistoryBuffer::new(3);
        let tl = viscodelay_core::delay::Timeline { buffer: &buffer, history: &h };
        let e = eta_energy(&k, &[1.0, 4.0, 9.0], 0.0, &u_now, &tl, &EtaQuadrature::default()).unwrap();
        prop_assert!(e >= 0.0);
    }

    #[test]
    fn init_memory_agrees_with_brute_force(
        k in kernel_strategy(),
        a in -2.0f64..2.0,
        slope in -1.0f64..1.0,
        t_hist in 0.1f64..4.0,
        ramp in any::<bool>(),
    ) {
        let profile = if ramp { PositionProfile::Ramp { slope, t_hist } } else { PositionProfile::Constant };
        prop_assume!(a.abs() > 1e-3);
        let h = InitialHistory::new(vec![a], profile, vec![0.0], VelocityProfile::Constant).unwrap();
        let z = init_memory_state(&k, &h).unwrap();
        for (j, term) in k.terms().iter().enumerate() {
            let f = |s: f64| {
                let mut out = [0.0];
                h.position(-s, &mut out);
                term.weight * (-term.rate * s).exp() * out[0]
            };
            let end = 60.0 / term.rate;
            let oracle = trapezoid_oracle(f, 0.0, t_hist, 1e-12) + trapezoid_oracle(f, t_hist, t_hist + end, 1e-12);
            prop_assert!((z.get(j, 0) - oracle).abs() <= 1e-8 * oracle.abs().max(1e-6));
        }
    }
}
