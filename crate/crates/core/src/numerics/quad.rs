//! One-dimensional quadrature rules.

use super::sum::NeumaierSum;
use std::f64::consts::{FRAC_PI_2, PI};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n`, started from the Tricomi estimate.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = NeumaierSum::new();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = NeumaierSum::new();
        for k in 0..panels {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { lo + h };
            acc.add(self.integrate(lo, hi, &mut f));
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let pm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Outcome of an adaptive rule.
#[derive(Clone, Copy, Debug)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Failure to meet a requested accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stalled {
    pub value: f64,
    pub error: f64,
}

/// Double-exponential (tanh–sinh) quadrature on `[a, b]`, refining the step
/// until two successive levels agree to `rel_tol`.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    rel_tol: f64,
    max_level: u32,
    mut f: F,
) -> Result<QuadEstimate, Stalled> {
    let half = 0.5 * (b - a);
    // At |t| = 4.5 nodes sit within 1e-61 of the endpoints, which keeps
    // integrable endpoint singularities like x^{-1/2} resolved.
    let t_max = 4.5;
    let mut evals = 0usize;
    let mut eval_at = |t: f64, evals: &mut usize| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let x = u.tanh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        // 1 - |x| computed without cancellation
        let gap = (-u.abs()).exp() / cu;
        // nodes are placed relative to the nearer endpoint
        let point = if x >= 0.0 { b - half * gap } else { a + half * gap };
        if point <= a || point >= b {
            return 0.0;
        }
        *evals += 1;
        w * f(point)
    };

    let mut h = 0.5;
    let mut acc = NeumaierSum::new();
    acc.add(eval_at(0.0, &mut evals));
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_max {
            break;
        }
        acc.add(eval_at(t, &mut evals));
        acc.add(eval_at(-t, &mut evals));
        k += 1;
    }
    let mut estimate = half * h * acc.value();
    let mut error = f64::INFINITY;
    for _ in 1..=max_level {
        h *= 0.5;
        // new nodes are the odd multiples of the halved step
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            acc.add(eval_at(t, &mut evals));
            acc.add(eval_at(-t, &mut evals));
            k += 2;
        }
        let next = half * h * acc.value();
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * estimate.abs() || (estimate == 0.0 && error == 0.0) {
            return Ok(QuadEstimate {
                value: estimate,
                error,
                evaluations: evals,
            });
        }
    }
    Err(Stalled {
        value: estimate,
        error,
    })
}

/// Chebyshev interpolant on a single panel, evaluated with the barycentric
/// formula for first-kind points.
#[derive(Clone, Debug)]
pub struct ChebyshevPanel {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebyshevPanel {
    pub fn sample<F: FnMut(f64) -> f64>(lo: f64, hi: f64, m: usize, mut f: F) -> Self {
        let mut nodes = Vec::with_capacity(m);
        let mut values = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for j in 0..m {
            let angle = (2 * j + 1) as f64 * PI / (2 * m) as f64;
            let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * angle.cos();
            nodes.push(x);
            values.push(f(x));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            weights.push(sign * angle.sin());
        }
        Self {
            lo,
            hi,
            nodes,
            values,
            weights,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &fj), &wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let diff = x - xj;
            if diff == 0.0 {
                return fj;
            }
            let c = wj / diff;
            num += c * fj;
            den += c;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is the exactness limit
        let v = gl.integrate(-1.0, 2.0, |x| x.powi(15));
        let exact = (2f64.powi(16) - 1.0) / 16.0;
        assert!((v - exact).abs() < 1e-10 * exact);
        let w: f64 = gl.mapped(0.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_odd_order_has_centre_node() {
        let gl = GaussLegendre::new(7);
        let v = gl.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let est = tanh_sinh(0.0, 1.0, 1e-12, 12, |x| 1.0 / x.sqrt()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn tanh_sinh_gaussian() {
        let est = tanh_sinh(0.0, 8.0, 1e-13, 12, |x| (-x * x).exp()).unwrap();
        assert!((est.value - 0.5 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_panel_is_spectrally_accurate() {
        let p = ChebyshevPanel::sample(1.0, 1.5, 14, |x| (x * x).sin());
        for k in 0..50 {
            let x = 1.0 + 0.01 * k as f64;
            assert!((p.eval(x) - (x * x).sin()).abs() < 1e-13);
        }
    }
}
