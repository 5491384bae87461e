//! Critical curves of the extended Hamiltonian `Re H₃`: Boutroux residuals,
//! the one-parameter family solver, the `h` inversion and the constrained
//! finite-difference gradient on the `H₋₁` leaf.

use std::fmt;

use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, null_space, singular_values_2xn, Matrix};
use crate::periods::{period_vector_with, QuadOptions};
use crate::rnd::y_differential;
use crate::scalar::{cx, creal, from_usize, Cx, Real};
use crate::series::qde_coefficients;

/// Paper value of the Boutroux parameter `h`.
pub const H_TARGET: f64 = 3.246_382_225_374_427_7;
/// Residual acceptance relative to the period scale `scale^{5/2}`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Default central-difference step relative to the parameter scale.
pub const FD_STEP: f64 = 1e-5;
/// Bisection step at which a persisting residual is classified as a jump.
const JUMP_CHECK_ITERATIONS: usize = 25;
/// Samples of the bracket scan.
pub const SCAN_SAMPLES: usize = 96;

/// `ℋ = Σ c_j·Re H_j + d_j·Im H_j` in the `Q = z⁻¹ + Σ H_{2n−1} z^{2n+1}`
/// convention.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HamiltonianSpec<T: Real> {
    terms: Vec<(i32, T, T)>,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(terms: Vec<(i32, T, T)>) -> Result<Self> {
        if let Some((j, _, _)) = terms.iter().find(|(j, _, _)| *j < -1 || j % 2 == 0) {
            return Err(Error::InvalidInput(format!("Hamiltonian index {j} is not odd and ≥ −1")));
        }
        Ok(Self { terms })
    }

    /// `Re H₃`.
    pub fn re_h3() -> Self {
        Self { terms: vec![(3, T::one(), T::zero())] }
    }

    pub fn terms(&self) -> &[(i32, T, T)] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|&(_, c, d)| c == T::zero() && d == T::zero())
    }

    fn max_index(&self) -> i32 {
        self.terms.iter().map(|t| t.0).max().unwrap_or(-1)
    }
}

/// `ℋ(curve)` from the series coefficients of the real-normalized `dQ`.
pub fn hamiltonian<T: Real>(curve: &SpectralCurve<T>, spec: &HamiltonianSpec<T>) -> Result<T> {
    if spec.terms.is_empty() {
        return Ok(T::zero());
    }
    let order = (spec.max_index() as usize + 5).max(8);
    let sc = qde_coefficients(curve, order)?;
    spec.terms.iter().try_fold(T::zero(), |acc, &(j, c, d)| {
        let h = sc
            .q_hamiltonian(j)
            .ok_or_else(|| Error::InvalidInput(format!("H_{j} is beyond the series order")))?;
        Ok(acc + c * h.re + d * h.im)
    })
}

/// `(Im ∮_A Y dE, Im ∮_B Y dE)`.
pub fn boutroux_residual<T: Real>(curve: &SpectralCurve<T>) -> Result<[T; 2]> {
    boutroux_residual_with(curve, &QuadOptions::default())
}

pub fn boutroux_residual_with<T: Real>(curve: &SpectralCurve<T>, opts: &QuadOptions<T>) -> Result<[T; 2]> {
    if curve.genus() != 1 {
        return Err(Error::InvalidInput("Boutroux residuals are implemented for genus 1".into()));
    }
    let pv = period_vector_with(curve, &y_differential(curve), opts)?;
    Ok([pv.a(0).im, pv.b(0).im])
}

/// Natural size of `∮ Y dE`.
pub fn period_scale<T: Real>(curve: &SpectralCurve<T>) -> T {
    curve.scale().powf(T::lit(2.5))
}

/// Registered one-parameter families of depressed cubics. `g₂ > 0` is
/// fixed and `g₃` is the free real parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `E³ − g₂E − g₃`.
    MinusG2,
    /// `E³ + g₂E − g₃`.
    PlusG2,
    /// `4E³ − g₂E − g₃` divided by 4.
    WeierstrassMinusG2,
    /// `4E³ + g₂E − g₃` divided by 4.
    WeierstrassPlusG2,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::MinusG2, Family::PlusG2, Family::WeierstrassMinusG2, Family::WeierstrassPlusG2];

    pub fn tag(self) -> &'static str {
        match self {
            Family::MinusG2 => "i:E3-g2E-g3",
            Family::PlusG2 => "ii:E3+g2E-g3",
            Family::WeierstrassMinusG2 => "iii:4E3-g2E-g3",
            Family::WeierstrassPlusG2 => "iv:4E3+g2E-g3",
        }
    }

    /// Accepts the full tag or its roman numeral prefix.
    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == s || f.tag().split(':').next() == Some(s))
    }

    /// Monic coefficients `(s₁, s₂, s₃)`.
    pub fn coeffs<T: Real>(self, g2: T, g3: T) -> [Cx<T>; 3] {
        let q = T::lit(0.25);
        let (s2, s3) = match self {
            Family::MinusG2 => (-g2, -g3),
            Family::PlusG2 => (g2, -g3),
            Family::WeierstrassMinusG2 => (-g2 * q, -g3 * q),
            Family::WeierstrassPlusG2 => (g2 * q, -g3 * q),
        };
        [creal(T::zero()), creal(s2), creal(s3)]
    }

    pub fn curve<T: Real>(self, g2: T, g3: T) -> Result<SpectralCurve<T>> {
        SpectralCurve::from_cubic(self.coeffs(g2, g3))
    }

    /// Default bracket for `g₃` at unit `g₂`, scaled by `g₂^{3/2}`.
    pub fn default_bracket<T: Real>(self, g2: T) -> (T, T) {
        let s = g2.powf(T::lit(1.5));
        let hi = match self {
            Family::MinusG2 | Family::PlusG2 => T::lit(3.0),
            Family::WeierstrassMinusG2 | Family::WeierstrassPlusG2 => T::lit(6.0),
        };
        (T::lit(0.01) * s, hi * s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Solver tuning shared by the crit operations.
#[derive(Debug, Clone, Copy)]
pub struct CritOptions<T: Real> {
    pub quad: QuadOptions<T>,
    pub fd_step: T,
    pub scan_samples: usize,
    pub residual_tol: T,
}

impl<T: Real> Default for CritOptions<T> {
    fn default() -> Self {
        Self {
            quad: QuadOptions::default(),
            fd_step: T::lit(FD_STEP),
            scan_samples: SCAN_SAMPLES,
            residual_tol: T::lit(RESIDUAL_TOL),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoutrouxResult<T: Real> {
    pub curve: SpectralCurve<T>,
    pub family: Family,
    pub g2: T,
    pub g3: T,
    pub residuals: [T; 2],
    /// `g₃ / g₂^{3/2}` in the family's own coefficients.
    pub ratio: T,
    pub implied_h: Option<T>,
    pub iterations: usize,
    pub bracket: (T, T),
}

/// Sum of both residuals. On a conjugation-symmetric curve one of them
/// vanishes identically and on a three-real-root curve the other does, so
/// the sum is the single surviving component in both regions.
fn reduced_residual<T: Real>(family: Family, g2: T, g3: T, opts: &CritOptions<T>) -> Option<(T, [T; 2], T)> {
    let curve = family.curve(g2, g3).ok()?;
    let r = boutroux_residual_with(&curve, &opts.quad).ok()?;
    Some((r[0] + r[1], r, period_scale(&curve)))
}

/// Solves the Boutroux condition for real `g₃` in `bracket`.
pub fn solve_boutroux<T: Real>(family: Family, g2: T, bracket: (T, T)) -> Result<BoutrouxResult<T>> {
    solve_boutroux_with(family, g2, bracket, &CritOptions::default())
}

pub fn solve_boutroux_with<T: Real>(
    family: Family,
    g2: T,
    bracket: (T, T),
    opts: &CritOptions<T>,
) -> Result<BoutrouxResult<T>> {
    let (lo, hi) = bracket;
    if !(g2 > T::zero() && g2.is_finite()) {
        return Err(Error::InvalidInput("g₂ must be positive".into()));
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInput("bracket must satisfy lo < hi".into()));
    }
    let n = opts.scan_samples.max(2);
    let grid: Vec<T> = (0..n).map(|i| lo + (hi - lo) * from_usize::<T>(i) / from_usize::<T>(n - 1)).collect();
    let vals: Vec<Option<(T, [T; 2], T)>> = grid.iter().map(|&g3| reduced_residual(family, g2, g3, opts)).collect();
    let mut roots = Vec::new();
    let mut sign_changes = 0;
    for i in 0..n - 1 {
        let (Some(a), Some(b)) = (&vals[i], &vals[i + 1]) else { continue };
        if a.0 * b.0 > T::zero() {
            continue;
        }
        sign_changes += 1;
        if let Some(root) = bisect_genuine(family, g2, (grid[i], grid[i + 1]), a.0, opts) {
            roots.push(root);
        }
    }
    match roots.len() {
        0 => {
            let r_at = |v: &Option<(T, [T; 2], T)>| v.as_ref().map_or(f64::NAN, |x| x.0.to_f64_lossy());
            Err(Error::NoSolutionInBracket {
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
                r_lo: r_at(&vals[0]),
                r_hi: r_at(&vals[n - 1]),
            })
        }
        1 => {
            let (g3, residuals, iterations, curve) = roots.pop().expect("one root");
            let ratio = g3 / g2.powf(T::lit(1.5));
            let _ = sign_changes;
            Ok(BoutrouxResult {
                curve,
                family,
                g2,
                g3,
                residuals,
                ratio,
                implied_h: implied_h(ratio).ok(),
                iterations,
                bracket,
            })
        }
        count => Err(Error::MultipleSignChanges { count, lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() }),
    }
}

/// Bisects a sign change to machine resolution and keeps it only if both
/// residuals are small there on a conjugation-symmetric curve with a
/// complex pair. Jumps from a change of homology basis fail this test.
fn bisect_genuine<T: Real>(
    family: Family,
    g2: T,
    (mut a, mut b): (T, T),
    mut fa: T,
    opts: &CritOptions<T>,
) -> Option<(T, [T; 2], usize, SpectralCurve<T>)> {
    let half = T::lit(0.5);
    let mut iterations = 0;
    let mut best = a;
    for _ in 0..200 {
        let m = (a + b) * half;
        if m <= a || m >= b {
            break;
        }
        iterations += 1;
        let (fm, _, pscale) = reduced_residual(family, g2, m, opts)?;
        best = m;
        if fm == T::zero() {
            break;
        }
        // After the bracket shrank by 2^25 a simple root leaves only a tiny
        // residual; a finite one marks a jump, not a root.
        if iterations == JUMP_CHECK_ITERATIONS && fm.abs() > T::lit(1e-4) * pscale {
            return None;
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let curve = family.curve(g2, best).ok()?;
    let r = boutroux_residual_with(&curve, &opts.quad).ok()?;
    let tol = opts.residual_tol * period_scale(&curve);
    let genuine = r[0].abs() < tol && r[1].abs() < tol && curve.is_conj_symmetric() && !curve.has_real_roots();
    genuine.then_some((best, r, iterations, curve))
}

/// Inverts `ratio = (4h² + 1)/(4h² − 3)^{3/2}` on `h > √3/2`.
pub fn implied_h<T: Real>(ratio: T) -> Result<T> {
    if !(ratio > T::zero() && ratio.is_finite()) {
        return Err(Error::RatioOutOfRange(ratio.to_f64_lossy()));
    }
    let three = T::lit(3.0);
    // In s = 4h² the map (s + 1)/(s − 3)^{3/2} falls monotonically from +∞ to 0.
    let f = |s: T| (s + T::one()) / (s - three).powf(T::lit(1.5)) - ratio;
    let mut lo = three;
    let mut hi = T::lit(4.0);
    while f(hi) > T::zero() {
        lo = hi;
        hi = three + (hi - three) * T::lit(2.0);
        if !hi.is_finite() {
            return Err(Error::RatioOutOfRange(ratio.to_f64_lossy()));
        }
    }
    for _ in 0..400 {
        let m = (lo + hi) * T::lit(0.5);
        if m <= lo || m >= hi {
            break;
        }
        if f(m) > T::zero() {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(((lo + hi) * T::lit(0.5)).sqrt() * T::lit(0.5))
}

/// Forward map `h ↦ (4h² + 1)/(4h² − 3)^{3/2}`.
pub fn ratio_of_h<T: Real>(h: T) -> T {
    let s = T::lit(4.0) * h * h;
    (s + T::one()) / (s - T::lit(3.0)).powf(T::lit(1.5))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanStatus {
    Solved,
    NoSolutionInBracket,
    MultipleSignChanges,
    Failed(String),
}

impl ScanStatus {
    pub fn label(&self) -> &str {
        match self {
            ScanStatus::Solved => "solved",
            ScanStatus::NoSolutionInBracket => "no_solution_in_bracket",
            ScanStatus::MultipleSignChanges => "multiple_sign_changes",
            ScanStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanEntry<T: Real> {
    pub family: Family,
    pub status: ScanStatus,
    pub ratio: Option<T>,
    pub implied_h: Option<T>,
    pub h_error: Option<T>,
    pub result: Option<BoutrouxResult<T>>,
}

/// Runs every registered family over its default bracket and orders the
/// outcomes by `|implied_h − h_target|`, unsolved families last.
pub fn convention_scan<T: Real>(g2: T, h_target: T) -> Vec<ScanEntry<T>> {
    convention_scan_with(g2, h_target, &CritOptions::default())
}

pub fn convention_scan_with<T: Real>(g2: T, h_target: T, opts: &CritOptions<T>) -> Vec<ScanEntry<T>> {
    convention_scan_in(g2, h_target, opts, |family| family.default_bracket(g2))
}

/// Same as [`convention_scan_with`] with a caller-chosen bracket per family.
pub fn convention_scan_in<T: Real>(
    g2: T,
    h_target: T,
    opts: &CritOptions<T>,
    bracket: impl Fn(Family) -> (T, T),
) -> Vec<ScanEntry<T>> {
    let mut entries: Vec<ScanEntry<T>> = Family::ALL
        .iter()
        .map(|&family| match solve_boutroux_with(family, g2, bracket(family), opts) {
            Ok(r) => ScanEntry {
                family,
                status: ScanStatus::Solved,
                ratio: Some(r.ratio),
                implied_h: r.implied_h,
                h_error: r.implied_h.map(|h| (h - h_target).abs()),
                result: Some(r),
            },
            Err(e) => ScanEntry {
                family,
                status: match e {
                    Error::NoSolutionInBracket { .. } => ScanStatus::NoSolutionInBracket,
                    Error::MultipleSignChanges { .. } => ScanStatus::MultipleSignChanges,
                    other => ScanStatus::Failed(other.to_string()),
                },
                ratio: None,
                implied_h: None,
                h_error: None,
                result: None,
            },
        })
        .collect();
    entries.sort_by(|a, b| match (a.h_error, b.h_error) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal).then(a.family.cmp(&b.family)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.family.cmp(&b.family),
    });
    entries
}

/// Depressed cubic `E³ − g₂E − g₃` from `(Re g₂, Im g₂, Re g₃, Im g₃)`.
pub fn chart_curve<T: Real>(p: &[T; 4]) -> Result<SpectralCurve<T>> {
    SpectralCurve::from_cubic([creal(T::zero()), -cx(p[0], p[1]), -cx(p[2], p[3])])
}

/// Chart parameters of a depressed genus-1 curve.
pub fn chart_point<T: Real>(curve: &SpectralCurve<T>) -> Result<[T; 4]> {
    let c = curve.coeffs();
    if curve.genus() != 1 || c[0].norm() > T::lit(1e-12) * curve.scale() {
        return Err(Error::InvalidInput("chart needs a depressed cubic".into()));
    }
    Ok([-c[1].re, -c[1].im, -c[2].re, -c[2].im])
}

#[derive(Debug, Clone)]
pub struct LeafChart<T: Real> {
    pub base: [T; 4],
    /// Rows `∇Re H₋₁`, `∇Im H₋₁`.
    pub jacobian: Matrix<T>,
    /// Orthonormal basis of the kernel of `jacobian`.
    pub tangent: [[T; 4]; 2],
    pub singular_values: (T, T),
    pub step: T,
}

fn fd_step<T: Real>(base: &[T; 4], factor: T) -> T {
    factor * base.iter().fold(T::one(), |m, v| m.max(v.abs()))
}

fn central_difference<T: Real, const M: usize>(
    base: &[T; 4],
    step: T,
    f: impl Fn(&[T; 4]) -> Result<[T; M]>,
) -> Result<[[T; 4]; M]> {
    let mut out = [[T::zero(); 4]; M];
    let two = T::lit(2.0);
    for k in 0..4 {
        let mut p = *base;
        p[k] = base[k] + step;
        let fp = f(&p)?;
        p[k] = base[k] - step;
        let fm = f(&p)?;
        for i in 0..M {
            out[i][k] = (fp[i] - fm[i]) / (two * step);
        }
    }
    Ok(out)
}

fn h_minus_one<T: Real>(p: &[T; 4]) -> Result<[T; 2]> {
    let h = hamiltonian_value(p, -1)?;
    Ok([h.re, h.im])
}

fn hamiltonian_value<T: Real>(p: &[T; 4], j: i32) -> Result<Cx<T>> {
    let curve = chart_curve(p)?;
    let order = (j.max(1) as usize + 5).max(8);
    qde_coefficients(&curve, order)?
        .q_hamiltonian(j)
        .ok_or_else(|| Error::InvalidInput(format!("H_{j} is beyond the series order")))
}

pub fn leaf_chart<T: Real>(base: [T; 4]) -> Result<LeafChart<T>> {
    leaf_chart_with(base, T::lit(FD_STEP))
}

pub fn leaf_chart_with<T: Real>(base: [T; 4], step_factor: T) -> Result<LeafChart<T>> {
    let step = fd_step(&base, step_factor);
    let rows = central_difference(&base, step, h_minus_one)?;
    let jacobian = Matrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]);
    let (smin, smax) = singular_values_2xn(&jacobian);
    if smin.partial_cmp(&(T::lit(1e-6) * smax.max(T::one()))) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::RankDeficientConstraint { sigma_min: smin.to_f64_lossy(), sigma_max: smax.to_f64_lossy() });
    }
    let ns = null_space(&jacobian);
    let t = |v: &Vec<T>| [v[0], v[1], v[2], v[3]];
    Ok(LeafChart { base, jacobian, tangent: [t(&ns[0]), t(&ns[1])], singular_values: (smin, smax), step })
}

#[derive(Debug, Clone)]
pub struct ConstrainedGradient<T: Real> {
    pub raw: [T; 4],
    /// Components along the two leaf tangent vectors.
    pub projected: [T; 2],
    pub raw_norm: T,
    pub projected_norm: T,
    pub chart: LeafChart<T>,
}

pub fn constrained_gradient<T: Real>(base: [T; 4], spec: &HamiltonianSpec<T>) -> Result<ConstrainedGradient<T>> {
    constrained_gradient_with(base, spec, T::lit(FD_STEP))
}

pub fn constrained_gradient_with<T: Real>(
    base: [T; 4],
    spec: &HamiltonianSpec<T>,
    step_factor: T,
) -> Result<ConstrainedGradient<T>> {
    let chart = leaf_chart_with(base, step_factor)?;
    let raw = if spec.is_zero() {
        [T::zero(); 4]
    } else {
        central_difference(&base, chart.step, |p| Ok([hamiltonian(&chart_curve(p)?, spec)?]))?[0]
    };
    let projected = [dot(&raw, &chart.tangent[0]), dot(&raw, &chart.tangent[1])];
    Ok(ConstrainedGradient { raw, projected, raw_norm: norm2(&raw), projected_norm: norm2(&projected), chart })
}
