//! Quadrature helpers: composite Simpson with refinement, sampled-data rules
//! and Gauss–Legendre nodes.

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

/// Composite Simpson rule with `n` intervals (`n` is rounded up to even).
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + h * i as f64;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Tolerances for [`simpson_refined`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    /// Initial number of intervals.
    pub n0: usize,
    /// Relative change between successive doublings at which to stop.
    pub rtol: f64,
    /// Absolute change at which to stop.
    pub atol: f64,
    /// Maximum number of doublings.
    pub max_doublings: u32,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement { n0: 400, rtol: 1e-8, atol: 0.0, max_doublings: 12 }
    }
}

/// Composite Simpson estimate that can be refined by doubling the node count
/// while reusing every previous function value.
#[derive(Debug, Clone)]
pub struct SimpsonRefiner {
    a: f64,
    n: usize,
    h: f64,
    ends: f64,
    odd: f64,
    even: f64,
    estimate: f64,
}

impl SimpsonRefiner {
    /// First estimate with `n0` intervals (rounded up to even).
    pub fn new<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, n0: usize) -> Self {
        let n = (n0.max(2) + 1) & !1;
        let h = (b - a) / n as f64;
        let ends = f(a) + f(b);
        let mut odd = 0.0;
        let mut even = 0.0;
        for i in 1..n {
            let y = f(a + h * i as f64);
            if i % 2 == 1 {
                odd += y;
            } else {
                even += y;
            }
        }
        let estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        SimpsonRefiner { a, n, h, ends, odd, even, estimate }
    }

    /// Current estimate.
    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    /// Doubles the node count and returns the absolute change of the estimate.
    pub fn double<F: FnMut(f64) -> f64>(&mut self, f: &mut F) -> f64 {
        self.even += self.odd;
        self.n *= 2;
        self.h *= 0.5;
        self.odd = 0.0;
        let mut i = 1;
        while i < self.n {
            self.odd += f(self.a + self.h * i as f64);
            i += 2;
        }
        let next = self.h / 3.0 * (self.ends + 4.0 * self.odd + 2.0 * self.even);
        let change = (next - self.estimate).abs();
        self.estimate = next;
        change
    }
}

/// Composite Simpson on `[a, b]`, doubling the node count until two successive
/// estimates agree to `rtol` (relative) or `atol` (absolute).
pub fn simpson_refined<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: Refinement) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut r = SimpsonRefiner::new(&mut f, a, b, opts.n0);
    for _ in 0..opts.max_doublings {
        let change = r.double(&mut f);
        if change <= opts.rtol * r.estimate().abs() || change <= opts.atol {
            break;
        }
    }
    r.estimate()
}

/// Integrates uniformly spaced samples with step `h`: composite Simpson, with
/// the 3/8 rule on the last three intervals when the interval count is odd.
pub fn simpson_samples(y: &[f64], h: f64) -> f64 {
    let m = y.len();
    match m {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        3 => h / 3.0 * (y[0] + 4.0 * y[1] + y[2]),
        _ => {
            let intervals = m - 1;
            let (simpson_end, tail) = if intervals % 2 == 0 { (m - 1, false) } else { (m - 4, true) };
            let mut s = 0.0;
            let mut i = 0;
            while i + 2 <= simpson_end {
                s += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
                i += 2;
            }
            if tail {
                let j = m - 4;
                s += 3.0 * h / 8.0 * (y[j] + 3.0 * y[j + 1] + 3.0 * y[j + 2] + y[j + 3]);
            }
            s
        }
    }
}

/// Five-point Gauss–Legendre nodes on `[-1, 1]`.
pub const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];

/// Weights matching [`GAUSS5_NODES`].
pub const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss–Legendre rule on `[a, b]` (exact for degree 9).
pub fn gauss5<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS.iter()) {
        s += w * f(c + r * x);
    }
    s * r
}

/// Golden-section maximisation of a unimodal function on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let g = 0.5 * (5.0.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
