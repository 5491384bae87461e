//! Periods `∮ N(E)·dE/Y` over homology cycles.
//!
//! Each link cycle contributes `2·∫_p^q N/Y dE` along the straight link.
//! The substitution `E = m + h·cos θ` turns `√((E−p)(E−q))` into
//! `±i·h·sin θ`, which cancels against `dE = −h·sin θ dθ` and leaves
//! the smooth integrand `∓i·N(E)/R(E)` on `[0, π]`. Gauss–Legendre
//! rules are doubled until two levels agree. Tanh–sinh is the fallback.

use crate::curve::{Cycle, Segment, Sheet, SpectralCurve};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad::{tanh_sinh, GaussLegendre};
use crate::scalar::{creal, cx, Cx, Real};

/// Differential `N(E)·dE/Y` with polynomial numerator.
#[derive(Debug, Clone, PartialEq)]
pub struct OddDifferential<T: Real> {
    numerator: Poly<T>,
}

impl<T: Real> OddDifferential<T> {
    pub fn new(numerator: Poly<T>) -> Self {
        Self { numerator }
    }

    /// Numerator coefficients in ascending powers of `E`.
    pub fn from_coeffs(coeffs: Vec<Cx<T>>) -> Self {
        Self::new(Poly::new(coeffs))
    }

    /// `dE/(2Y)`.
    pub fn holomorphic_half() -> Self {
        Self::from_coeffs(vec![creal(T::lit(0.5))])
    }

    /// `dY = P′(E)·dE/(2Y)`, an exact differential.
    pub fn exact_dy(curve: &SpectralCurve<T>) -> Self {
        Self::new(curve.poly().derivative().scale(creal(T::lit(0.5))))
    }

    pub fn numerator(&self) -> &Poly<T> {
        &self.numerator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Holomorphic on a genus-`g` curve iff `deg N ≤ g − 1`.
    pub fn is_holomorphic(&self, genus: usize) -> bool {
        self.numerator.degree().is_none_or(|d| d < genus)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.numerator.add(&other.numerator))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::new(self.numerator.scale(s))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T: Real> {
    pub tol: T,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-12), min_nodes: 16, max_nodes: 1 << 14 }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Period of one differential over one cycle with quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePeriod<T: Real> {
    pub value: Cx<T>,
    pub nodes: usize,
    pub error_estimate: T,
}

/// Periods over a full basis `[A₁…A_g, B₁…B_g]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodVector<T: Real> {
    pub cycles: Vec<Cycle>,
    pub values: Vec<Cx<T>>,
    pub nodes: Vec<usize>,
    pub error_estimates: Vec<T>,
}

impl<T: Real> PeriodVector<T> {
    pub fn genus(&self) -> usize {
        self.values.len() / 2
    }

    pub fn a(&self, i: usize) -> Cx<T> {
        self.values[i]
    }

    pub fn b(&self, i: usize) -> Cx<T> {
        self.values[self.genus() + i]
    }

    pub fn max_abs_imag(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.im.abs()))
    }
}

/// Link integrals `∫_p^q N_j/Y dE` for several numerators at `n` nodes,
/// plus the matching `∫|·|` magnitudes.
fn link_sums_gl<T: Real>(curve: &SpectralCurve<T>, seg: &Segment, nums: &[&Poly<T>], n: usize) -> (Vec<Cx<T>>, Vec<T>) {
    let frame = curve.segment(seg.from, seg.to, seg.sheet);
    let rule = GaussLegendre::get(n);
    let factor = cx(T::zero(), -seg.sheet.sign::<T>());
    let mut sums = vec![creal(T::zero()); nums.len()];
    let mut mags = vec![T::zero(); nums.len()];
    for (theta, w) in rule.mapped(T::zero(), T::PI()) {
        let e = frame.point(theta);
        let inv_r = creal(T::one()) / frame.r_factor(e);
        for (j, p) in nums.iter().enumerate() {
            let f = factor * p.eval(e) * inv_r;
            sums[j] = sums[j] + f * w;
            mags[j] = mags[j] + f.norm() * w;
        }
    }
    (sums, mags)
}

fn link_sums_tanh_sinh<T: Real>(curve: &SpectralCurve<T>, seg: &Segment, nums: &[&Poly<T>], h: T) -> (Vec<Cx<T>>, usize) {
    let frame = curve.segment(seg.from, seg.to, seg.sheet);
    let factor = cx(T::zero(), -seg.sheet.sign::<T>());
    let nodes = tanh_sinh(T::zero(), T::PI(), h);
    let mut sums = vec![creal(T::zero()); nums.len()];
    for &(theta, w) in &nodes {
        let e = frame.point(theta);
        let inv_r = creal(T::one()) / frame.r_factor(e);
        for (j, p) in nums.iter().enumerate() {
            sums[j] = sums[j] + factor * p.eval(e) * inv_r * w;
        }
    }
    (sums, nodes.len())
}

/// Adaptive link integrals for several numerators at once.
fn link_integrals<T: Real>(
    curve: &SpectralCurve<T>,
    seg: &Segment,
    nums: &[&Poly<T>],
    opts: &QuadOptions<T>,
) -> Result<(Vec<Cx<T>>, usize, T)> {
    curve.check_segment(seg.from, seg.to)?;
    // Links between nearly coalescing roots carry integrals far below the
    // natural size of N/R, where a purely relative test cannot be met.
    let floor = T::lit(1e-4) * natural_size(curve, nums);
    let mut n = opts.min_nodes.max(2);
    let (mut prev, _) = link_sums_gl(curve, seg, nums, n);
    let mut last_diff = T::infinity();
    while 2 * n <= opts.max_nodes {
        n *= 2;
        let (cur, mags) = link_sums_gl(curve, seg, nums, n);
        let diff = max_diff(&cur, &prev);
        let scale = mags.iter().copied().fold(floor, T::max);
        last_diff = diff;
        if diff <= opts.tol * scale {
            return Ok((cur, n, diff));
        }
        prev = cur;
    }
    // Fallback: tanh–sinh in θ with step halving.
    let mut h = T::lit(0.125);
    let (mut prev_ts, _) = link_sums_tanh_sinh(curve, seg, nums, h);
    for _ in 0..8 {
        h = h * T::lit(0.5);
        let (cur, count) = link_sums_tanh_sinh(curve, seg, nums, h);
        let diff = max_diff(&cur, &prev_ts);
        let scale = cur.iter().fold(floor, |m, v| m.max(v.norm()));
        if diff <= opts.tol * scale {
            return Ok((cur, count, diff));
        }
        prev_ts = cur;
    }
    Err(Error::NoConvergence { nodes: n, difference: last_diff.to_f64_lossy(), tolerance: opts.tol.to_f64_lossy() })
}

/// Typical magnitude of `N/R` at the curve scale: `|N| ~ Σ|n_k| s^k` over
/// `|R| ~ s^{(2g−1)/2}`.
fn natural_size<T: Real>(curve: &SpectralCurve<T>, nums: &[&Poly<T>]) -> T {
    let s = curve.scale();
    let r = s.powf(T::lit(curve.genus() as f64 * 2.0 - 1.0) * T::lit(0.5));
    let n = nums.iter().fold(T::zero(), |m, p| {
        m.max(p.coeffs().iter().enumerate().fold(T::zero(), |acc, (k, c)| acc + c.norm() * s.powi(k as i32)))
    });
    (n / r).max(T::min_positive_value())
}

fn max_diff<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).norm()))
}

/// `∮_cycle N dE/Y` with the default tolerance `1e-12`.
pub fn integrate_cycle<T: Real>(curve: &SpectralCurve<T>, diff: &OddDifferential<T>, cycle: &Cycle) -> Result<Cx<T>> {
    Ok(integrate_cycle_with(curve, diff, cycle, &QuadOptions::default())?.value)
}

pub fn integrate_cycle_with<T: Real>(
    curve: &SpectralCurve<T>,
    diff: &OddDifferential<T>,
    cycle: &Cycle,
    opts: &QuadOptions<T>,
) -> Result<CyclePeriod<T>> {
    let mut out = integrate_cycles_multi(curve, &[diff], std::slice::from_ref(cycle), opts)?;
    Ok(out.remove(0).remove(0))
}

/// Fixed-rule evaluation with exactly `nodes` Gauss–Legendre nodes per link.
pub fn integrate_cycle_fixed<T: Real>(
    curve: &SpectralCurve<T>,
    diff: &OddDifferential<T>,
    cycle: &Cycle,
    nodes: usize,
) -> Result<Cx<T>> {
    let mut total = creal(T::zero());
    for seg in &cycle.segments {
        curve.check_segment(seg.from, seg.to)?;
        let (s, _) = link_sums_gl(curve, seg, &[diff.numerator()], nodes);
        total = total + s[0] * T::lit(2.0 * f64::from(seg.weight));
    }
    Ok(total)
}

/// Periods of several differentials over several cycles; `result[d][c]`.
pub fn integrate_cycles_multi<T: Real>(
    curve: &SpectralCurve<T>,
    diffs: &[&OddDifferential<T>],
    cycles: &[Cycle],
    opts: &QuadOptions<T>,
) -> Result<Vec<Vec<CyclePeriod<T>>>> {
    let nums: Vec<&Poly<T>> = diffs.iter().map(|d| d.numerator()).collect();
    let mut out = vec![Vec::with_capacity(cycles.len()); diffs.len()];
    for cycle in cycles {
        let mut totals = vec![creal(T::zero()); diffs.len()];
        let mut nodes = 0;
        let mut err = T::zero();
        for seg in &cycle.segments {
            let (vals, n, e) = link_integrals(curve, seg, &nums, opts)?;
            let w = T::lit(2.0 * f64::from(seg.weight));
            for (t, v) in totals.iter_mut().zip(vals) {
                *t = *t + v * w;
            }
            nodes = nodes.max(n);
            err = err + e * w.abs();
        }
        for (d, t) in totals.into_iter().enumerate() {
            out[d].push(CyclePeriod { value: t, nodes, error_estimate: err });
        }
    }
    Ok(out)
}

pub fn period_vector<T: Real>(curve: &SpectralCurve<T>, diff: &OddDifferential<T>) -> Result<PeriodVector<T>> {
    period_vector_with(curve, diff, &QuadOptions::default())
}

pub fn period_vector_with<T: Real>(
    curve: &SpectralCurve<T>,
    diff: &OddDifferential<T>,
    opts: &QuadOptions<T>,
) -> Result<PeriodVector<T>> {
    Ok(period_vectors(curve, &[diff], opts)?.remove(0))
}

/// Period vectors of several differentials over the canonical basis.
pub fn period_vectors<T: Real>(
    curve: &SpectralCurve<T>,
    diffs: &[&OddDifferential<T>],
    opts: &QuadOptions<T>,
) -> Result<Vec<PeriodVector<T>>> {
    let cycles = curve.canonical_homology_basis();
    let raw = integrate_cycles_multi(curve, diffs, &cycles, opts)?;
    Ok(raw
        .into_iter()
        .map(|row| PeriodVector {
            cycles: cycles.clone(),
            values: row.iter().map(|p| p.value).collect(),
            nodes: row.iter().map(|p| p.nodes).collect(),
            error_estimates: row.iter().map(|p| p.error_estimate).collect(),
        })
        .collect())
}

/// `∮ N dE/Y` along a closed polyline, with `Y` continued from
/// `start_sheet` at the first vertex. Independent of the link machinery.
pub fn loop_integral<T: Real>(
    curve: &SpectralCurve<T>,
    diff: &OddDifferential<T>,
    path: &[Cx<T>],
    start_sheet: Sheet,
    nodes_per_edge: usize,
) -> Result<Cx<T>> {
    let y0 = curve.y_along_path(&path[..1], start_sheet)?[0];
    curve.y_along_path(path, start_sheet)?;
    let rule = GaussLegendre::get(nodes_per_edge);
    let mut points = vec![path[0]];
    let mut weights = vec![creal(T::zero())];
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (t, wt) in rule.mapped(T::zero(), T::one()) {
            points.push(a + (b - a) * t);
            weights.push((b - a) * wt);
        }
        points.push(b);
        weights.push(creal(T::zero()));
    }
    let ys = curve.continue_along(&points, y0);
    let mut total = creal(T::zero());
    for ((e, w), y) in points.iter().zip(&weights).zip(&ys) {
        if w.norm() > T::zero() {
            total = total + diff.numerator().eval(*e) / *y * *w;
        }
    }
    Ok(total)
}

/// Arithmetic–geometric mean of two positive reals.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    for _ in 0..64 {
        let an = (a + b) * T::lit(0.5);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= T::epsilon() * an {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// Half-periods of `dE/(2Y)` for three real branch points `e₀<e₁<e₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPeriods<T: Real> {
    /// `∫_{e₀}^{e₁} dE/(2|Y|)`, equal to `∫_{e₂}^{∞} dE/(2Y)`.
    pub real: T,
    /// `∫_{e₁}^{e₂} dE/(2|Y|)`.
    pub imag: T,
}

/// Complete elliptic integrals by the arithmetic–geometric mean.
pub fn agm_complete_elliptic<T: Real>(curve: &SpectralCurve<T>) -> Result<HalfPeriods<T>> {
    if curve.genus() != 1 {
        return Err(Error::InvalidInput("AGM oracle needs a genus-1 curve".into()));
    }
    let r = curve.sorted_real_roots().ok_or(Error::NotRealBranchPoints)?;
    let (e0, e1, e2) = (r[0], r[1], r[2]);
    let half_pi = T::FRAC_PI_2();
    let real = half_pi / agm((e2 - e0).sqrt(), (e2 - e1).sqrt());
    let imag = half_pi / agm((e2 - e0).sqrt(), (e1 - e0).sqrt());
    Ok(HalfPeriods { real, imag })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEMNISCATE: f64 = 2.622_057_554_292_119_8;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    fn lemniscatic() -> SpectralCurve<f64> {
        SpectralCurve::from_cubic([c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn lemniscate_constant_by_agm() {
        // ϖ = π / agm(1, √2)
        assert!((std::f64::consts::PI / agm(1.0, 2f64.sqrt()) - LEMNISCATE).abs() < 1e-15);
        let hp = agm_complete_elliptic(&lemniscatic()).unwrap();
        assert!((hp.real - LEMNISCATE / 2.0).abs() < 1e-15);
        assert!((hp.imag - LEMNISCATE / 2.0).abs() < 1e-15);
    }

    #[test]
    fn agm_needs_real_roots() {
        let curve = SpectralCurve::from_cubic([c(0.0, 0.0), c(-1.0, 0.0), c(-0.5, 0.0)]).unwrap();
        assert_eq!(agm_complete_elliptic(&curve).unwrap_err(), Error::NotRealBranchPoints);
    }

    #[test]
    fn unit_numerator_cycle_around_left_cut() {
        // Cycle joining −1 and 0 with ω = dE/Y is 2ϖ; with dE/(2Y) it is ϖ.
        let curve = lemniscatic();
        let basis = curve.canonical_homology_basis();
        let b = &basis[1];
        let full = integrate_cycle(&curve, &OddDifferential::from_coeffs(vec![c(1.0, 0.0)]), b).unwrap();
        assert!((full.norm() - 2.0 * LEMNISCATE).abs() < 1e-12);
        let half = integrate_cycle(&curve, &OddDifferential::holomorphic_half(), b).unwrap();
        assert!((half.norm() - LEMNISCATE).abs() < 1e-12);
    }

    #[test]
    fn exact_differential_has_zero_periods() {
        let curve = SpectralCurve::from_cubic([c(0.4, -0.3), c(-1.2, 0.1), c(0.5, 0.8)]).unwrap();
        let pv = period_vector(&curve, &OddDifferential::exact_dy(&curve)).unwrap();
        for v in pv.values {
            assert!(v.norm() < 1e-11, "{v}");
        }
    }

    #[test]
    fn node_doubling_is_converged() {
        let curve = SpectralCurve::from_cubic([c(0.0, 0.0), c(-2.0, 0.5), c(1.0, 0.0)]).unwrap();
        let diff = OddDifferential::from_coeffs(vec![c(0.3, 0.0), c(0.5, 0.0)]);
        for cycle in curve.canonical_homology_basis() {
            let p = integrate_cycle_with(&curve, &diff, &cycle, &QuadOptions::default()).unwrap();
            let a = integrate_cycle_fixed(&curve, &diff, &cycle, p.nodes).unwrap();
            let b = integrate_cycle_fixed(&curve, &diff, &cycle, 2 * p.nodes).unwrap();
            assert!((a - b).norm() < 1e-12);
            assert!(p.error_estimate < 1e-11);
        }
    }

    #[test]
    fn square_lattice_period_ratio() {
        let pv = period_vector(&lemniscatic(), &OddDifferential::holomorphic_half()).unwrap();
        let tau = pv.b(0) / pv.a(0);
        assert!((tau - c(0.0, 1.0)).norm() < 1e-10, "{tau}");
    }
}
