//! Gauss–Legendre and tanh–sinh rules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending nodes.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let k = (i + 1) as f64;
            let mut x = (std::f64::consts::PI * (k - 0.25) / (nf + 0.5)).cos()
                * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
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

    /// Cached rule with `n` nodes.
    pub fn get(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(Self::compute(n));
        cache
            .lock()
            .expect("rule cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped<T: Real>(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * T::lit(x), half * T::lit(w)))
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
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre: `panels` equal panels of an `order`-point rule.
pub fn composite<T: Real>(
    a: T,
    b: T,
    panels: usize,
    order: usize,
) -> impl Iterator<Item = (T, T)> {
    let rule = GaussLegendre::get(order);
    let width = (b - a) / T::from_usize(panels).expect("panel count");
    (0..panels).flat_map(move |p| {
        let lo = a + width * T::from_usize(p).expect("panel index");
        let hi = lo + width;
        rule.mapped(lo, hi).collect::<Vec<_>>()
    })
}

/// Tanh–sinh nodes and weights on `[a, b]` at step `h`, truncated where the
/// weights underflow. Nodes that would round onto an endpoint are dropped.
pub fn tanh_sinh<T: Real>(a: T, b: T, h: T) -> Vec<(T, T)> {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let pi_2 = T::FRAC_PI_2();
    let mut out = Vec::new();
    let mut k: i64 = 0;
    loop {
        let t = h * T::from_i64(k).expect("index");
        let s = pi_2 * t.sinh();
        // 1 − tanh(s), accurate near the endpoints.
        let gap = T::lit(2.0) / ((s + s).exp() + T::one());
        let w = h * pi_2 * t.cosh() / (s.cosh() * s.cosh());
        if w * half.abs() < T::min_positive_value() || gap * half.abs() < T::min_positive_value() {
            break;
        }
        if k == 0 {
            out.push((mid, w * half));
        } else {
            out.push((b - half * gap, w * half));
            out.push((a + half * gap, w * half));
        }
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    out
}
