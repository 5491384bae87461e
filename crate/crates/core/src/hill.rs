//! Solution-side oracle: the real one-gap potential `u = 2℘(x + x₀)` and
//! the Floquet theory of `L = −∂²ₓ + u`.
//!
//! The potential comes from its ODE `u″ = 3u² − g₂` started at the upper
//! turning point, so no elliptic special functions are involved. The cubic
//! `4t³ − g₂t − g₃` is used here only to locate turning points.

use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::ode::{integrate, OdeOptions};
use crate::poly::cubic_roots;
use crate::quad::composite;
use crate::scalar::{creal, from_usize, Cx, Real};

/// Local tolerance of the Floquet ODE solves.
pub const FLOQUET_TOL: f64 = 1e-12;
/// Local tolerance of the potential sampler.
pub const SAMPLER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind<T: Real> {
    /// `u = 2℘(x + x₀)` oscillating in `[2e₃, 2e₂]`.
    Elliptic,
    /// `u ≡ c` with an externally chosen period.
    Constant(T),
}

/// A real smooth periodic potential with `u(0)` at its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialOracle<T: Real> {
    pub g2: T,
    pub g3: T,
    /// Roots `e₁ > e₂ > e₃` of `4t³ − g₂t − g₃`.
    pub e: [T; 3],
    pub period: T,
    pub kind: PotentialKind<T>,
}

fn theta_rule<T: Real>() -> impl Iterator<Item = (T, T)> {
    composite(T::zero(), T::PI(), 16, 24)
}

/// Builds the elliptic oracle for `(g₂, g₃)`.
pub fn make_potential<T: Real>(g2: T, g3: T) -> Result<PotentialOracle<T>> {
    if !(g2.is_finite() && g3.is_finite()) {
        return Err(Error::InvalidInput("non-finite invariants".into()));
    }
    let q = T::lit(0.25);
    let roots = cubic_roots(creal(T::zero()), creal(-g2 * q), creal(-g3 * q));
    let scale = roots.iter().fold(T::zero(), |m, r| m.max(r.norm()));
    if scale == T::zero() {
        return Err(Error::InvalidInput("g₂ = g₃ = 0 has no periodic solution".into()));
    }
    if roots.iter().any(|r| r.im.abs() > T::lit(1e-9) * scale) {
        return Err(Error::ComplexBranchPoints { g2: g2.to_f64_lossy(), g3: g3.to_f64_lossy() });
    }
    let mut e: Vec<T> = roots.iter().map(|r| r.re).collect();
    e.sort_by(|a, b| b.partial_cmp(a).expect("finite roots"));
    if e[0] - e[1] <= T::lit(1e-8) * scale || e[1] - e[2] <= T::lit(1e-8) * scale {
        return Err(Error::InvalidInput("coincident turning points: the oscillation degenerates".into()));
    }
    let mut oracle =
        PotentialOracle { g2, g3, e: [e[0], e[1], e[2]], period: T::zero(), kind: PotentialKind::Elliptic };
    let two = T::lit(2.0);
    oracle.period = two * theta_rule().fold(T::zero(), |acc, (th, w)| acc + w * oracle.theta_weight(th));
    Ok(oracle)
}

/// Constant oracle `u ≡ c` with period `period` (the invariants are those
/// of the equilibrium `g₂ = 3c²`, `g₃ = −c³`).
pub fn constant_potential<T: Real>(c: T, period: T) -> Result<PotentialOracle<T>> {
    if !(period > T::zero() && period.is_finite() && c.is_finite()) {
        return Err(Error::InvalidInput("constant oracle needs a finite positive period".into()));
    }
    let half = T::lit(0.5);
    Ok(PotentialOracle {
        g2: T::lit(3.0) * c * c,
        g3: -c * c * c,
        e: [-c * half, c * half, c * half],
        period,
        kind: PotentialKind::Constant(c),
    })
}

impl<T: Real> PotentialOracle<T> {
    pub fn scale(&self) -> T {
        match self.kind {
            PotentialKind::Elliptic => self.e.iter().fold(T::zero(), |m, v| m.max(v.abs())),
            PotentialKind::Constant(c) => c.abs().max(T::one()),
        }
    }

    /// Upper and lower turning points `(2e₂, 2e₃)`.
    pub fn range(&self) -> (T, T) {
        match self.kind {
            PotentialKind::Elliptic => (T::lit(2.0) * self.e[1], T::lit(2.0) * self.e[2]),
            PotentialKind::Constant(c) => (c, c),
        }
    }

    /// `u(θ)` under `u = (2e₂ + 2e₃)/2 + (2e₂ − 2e₃)/2·cos θ`.
    fn u_of_theta(&self, theta: T) -> T {
        (self.e[1] + self.e[2]) + (self.e[1] - self.e[2]) * theta.cos()
    }

    /// `dx/dθ = 1/√(2(2e₁ − u(θ)))`.
    fn theta_weight(&self, theta: T) -> T {
        let two = T::lit(2.0);
        T::one() / (two * (two * self.e[0] - self.u_of_theta(theta))).sqrt()
    }

    /// `u′²` from the first integral.
    pub fn u_prime_sq(&self, u: T) -> T {
        match self.kind {
            PotentialKind::Elliptic => {
                let two = T::lit(2.0);
                two * u * u * u - two * self.g2 * u - T::lit(4.0) * self.g3
            }
            PotentialKind::Constant(_) => T::zero(),
        }
    }

    fn rhs_u(&self, u: T) -> T {
        match self.kind {
            PotentialKind::Elliptic => T::lit(3.0) * u * u - self.g2,
            PotentialKind::Constant(_) => T::zero(),
        }
    }

    fn initial(&self) -> [T; 2] {
        [self.range().0, T::zero()]
    }

    /// `(u(x), u′(x))` by integrating `u″ = 3u² − g₂` from the turning point.
    pub fn sample(&self, x: T) -> Result<(T, T)> {
        let x = x - (x / self.period).floor() * self.period;
        let half = self.period * T::lit(0.5);
        let (xr, sign) = if x > half { (self.period - x, -T::one()) } else { (x, T::one()) };
        let opts = OdeOptions::tight(T::lit(SAMPLER_TOL));
        let y = integrate(|_, y: &[T; 2]| [y[1], self.rhs_u(y[0])], T::zero(), self.initial(), xr, &opts, |_, _| {})?;
        Ok((y[0], sign * y[1]))
    }

    /// `(u(x), u′(x))` integrated straight from `0` to `x` without using
    /// periodicity or reflection symmetry.
    pub fn sample_direct(&self, x: T) -> Result<(T, T)> {
        let opts = OdeOptions::tight(T::lit(SAMPLER_TOL));
        let y = integrate(|_, y: &[T; 2]| [y[1], self.rhs_u(y[0])], T::zero(), self.initial(), x, &opts, |_, _| {})?;
        Ok((y[0], y[1]))
    }

    /// `u(x)`.
    pub fn u(&self, x: T) -> Result<T> {
        Ok(self.sample(x)?.0)
    }
}

/// `(H₋₁, H₁, H₃)` as period averages of `P₋₁ = −u/2`, `P₁ = −u²/8`,
/// `P₃ = −(u′² + 2u³)/32`.
pub fn pn_integrals<T: Real>(p: &PotentialOracle<T>) -> Result<[T; 3]> {
    let dens = |u: T| {
        let up2 = p.u_prime_sq(u);
        [-u / T::lit(2.0), -u * u / T::lit(8.0), -(up2 + T::lit(2.0) * u * u * u) / T::lit(32.0)]
    };
    match p.kind {
        PotentialKind::Constant(c) => Ok(dens(c)),
        PotentialKind::Elliptic => Ok(theta_average(p, dens)),
    }
}

/// `(1/T)∫₀ᵀ F(u) dx` through the turning-point substitution; the half
/// period from `2e₂` to `2e₃` covers the orbit once.
fn theta_average<T: Real, const N: usize>(p: &PotentialOracle<T>, f: impl Fn(T) -> [T; N]) -> [T; N] {
    let mut acc = [T::zero(); N];
    for (th, w) in theta_rule::<T>() {
        let ww = w * p.theta_weight(th);
        let v = f(p.u_of_theta(th));
        for k in 0..N {
            acc[k] = acc[k] + ww * v[k];
        }
    }
    let factor = T::lit(2.0) / p.period;
    acc.map(|a| a * factor)
}

/// Same averages by integrating the densities along the ODE trajectory
/// over `[a, a + T]`.
pub fn pn_integrals_sampled<T: Real>(p: &PotentialOracle<T>, a: T) -> Result<[T; 3]> {
    let (u0, v0) = p.sample(a)?;
    let opts = OdeOptions::tight(T::lit(SAMPLER_TOL));
    let two = T::lit(2.0);
    let y = integrate(
        |_, y: &[T; 5]| {
            let (u, v) = (y[0], y[1]);
            [v, p.rhs_u(u), -u / two, -u * u / T::lit(8.0), -(v * v + two * u * u * u) / T::lit(32.0)]
        },
        a,
        [u0, v0, T::zero(), T::zero(), T::zero()],
        a + p.period,
        &opts,
        |_, _| {},
    )?;
    Ok([y[2] / p.period, y[3] / p.period, y[4] / p.period])
}

/// `(1/T)∫₀ᵀ u′² dx`; strictly positive for every non-constant oracle.
pub fn mean_u_prime_sq<T: Real>(p: &PotentialOracle<T>) -> T {
    match p.kind {
        PotentialKind::Constant(_) => T::zero(),
        PotentialKind::Elliptic => theta_average(p, |u| [p.u_prime_sq(u)])[0],
    }
}

/// Period monodromy of `−ψ″ + uψ = Eψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy<T: Real> {
    /// `[[ψ₁, ψ₂], [ψ₁′, ψ₂′]]` at `x = T`.
    pub m: [[T; 2]; 2],
}

impl<T: Real> Monodromy<T> {
    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

/// Monodromy over one period, integrating the potential alongside.
pub fn monodromy<T: Real>(p: &PotentialOracle<T>, energy: T) -> Result<Monodromy<T>> {
    monodromy_with(p, energy, T::lit(FLOQUET_TOL))
}

/// Monodromy over `[a, a + T]`; conjugate to the one from `0`, so its trace
/// does not depend on `a`.
pub fn monodromy_from<T: Real>(p: &PotentialOracle<T>, energy: T, a: T) -> Result<Monodromy<T>> {
    let (u0, v0) = p.sample(a)?;
    monodromy_core(p, energy, a, [u0, v0], T::lit(FLOQUET_TOL))
}

fn monodromy_with<T: Real>(p: &PotentialOracle<T>, energy: T, tol: T) -> Result<Monodromy<T>> {
    monodromy_core(p, energy, T::zero(), p.initial(), tol)
}

fn monodromy_core<T: Real>(p: &PotentialOracle<T>, energy: T, a: T, [u0, v0]: [T; 2], tol: T) -> Result<Monodromy<T>> {
    let opts = OdeOptions::tight(tol);
    let y = integrate(
        |_, y: &[T; 6]| {
            let q = y[0] - energy;
            [y[1], p.rhs_u(y[0]), y[3], q * y[2], y[5], q * y[4]]
        },
        a,
        [u0, v0, T::one(), T::zero(), T::zero(), T::one()],
        a + p.period,
        &opts,
        |_, _| {},
    )?;
    Ok(Monodromy { m: [[y[2], y[4]], [y[3], y[5]]] })
}

/// Floquet discriminant `Δ(E)`.
pub fn discriminant<T: Real>(p: &PotentialOracle<T>, energy: T) -> Result<T> {
    Ok(monodromy(p, energy)?.trace())
}

/// Band edges and the quasimomentum evaluator.
#[derive(Debug, Clone)]
pub struct FloquetData<T: Real> {
    pub potential: PotentialOracle<T>,
    /// `E₀ < E₁ < E₂`.
    pub edges: [T; 3],
    /// Scan window that produced the edges.
    pub window: (T, T),
}

impl<T: Real> FloquetData<T> {
    pub fn discriminant(&self, energy: T) -> Result<T> {
        discriminant(&self.potential, energy)
    }

    /// `p(E) = arccos(Δ/2)/T` on the branch closest to `√E`.
    pub fn quasimomentum(&self, energy: T) -> Result<T> {
        quasimomentum_at(&self.potential, energy, T::lit(FLOQUET_TOL))
    }

    /// Spectral curve with the measured band edges as branch points.
    pub fn curve(&self) -> Result<SpectralCurve<T>> {
        SpectralCurve::from_roots(&self.edges.map(creal))
    }

    /// `|E₀ + E₁ + E₂|`, the coefficient `s₁` of the band-edge cubic.
    pub fn s1_defect(&self) -> T {
        (self.edges[0] + self.edges[1] + self.edges[2]).abs()
    }

    /// `|Σ E_i + Σ e_i|`: the one-gap trace identity puts the edges at `−e_i`.
    pub fn trace_defect(&self) -> T {
        let e = self.potential.e;
        (self.edges[0] + self.edges[1] + self.edges[2] + e[0] + e[1] + e[2]).abs()
    }
}

fn quasimomentum_at<T: Real>(p: &PotentialOracle<T>, energy: T, tol: T) -> Result<T> {
    let d = monodromy_with(p, energy, tol)?.trace() * T::lit(0.5);
    let theta = d.max(-T::one()).min(T::one()).acos();
    let target = energy.max(T::zero()).sqrt() * p.period;
    let tau = T::lit(2.0) * T::PI();
    let n0 = (target / tau).round();
    let mut best = theta;
    for dn in [-1.0, 0.0, 1.0] {
        let base = (n0 + T::lit(dn)) * tau;
        for cand in [base + theta, base - theta] {
            if (cand - target).abs() < (best - target).abs() {
                best = cand;
            }
        }
    }
    Ok(best / p.period)
}

const SCAN_SAMPLES: usize = 400;

/// The three simple roots of `Δ² = 4`.
pub fn band_edges<T: Real>(p: &PotentialOracle<T>) -> Result<FloquetData<T>> {
    band_edges_from(p, T::zero())
}

/// Band edges with the monodromy taken over `[a, a + T]`.
pub fn band_edges_from<T: Real>(p: &PotentialOracle<T>, a: T) -> Result<FloquetData<T>> {
    let s = p.scale();
    let (top, bottom) = p.range();
    let mut lo = bottom - T::lit(5.0) * s;
    let mut hi = top + T::lit(20.0) * s;
    let mut found = 0;
    for _ in 0..3 {
        let edges = scan_edges(p, lo, hi, a)?;
        if edges.len() == 3 {
            return Ok(FloquetData { potential: p.clone(), edges: [edges[0], edges[1], edges[2]], window: (lo, hi) });
        }
        found = edges.len();
        let w = hi - lo;
        lo = lo - w;
        hi = hi + w;
    }
    Err(Error::EdgeCountMismatch { found, lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() })
}

fn scan_edges<T: Real>(p: &PotentialOracle<T>, lo: T, hi: T, a: T) -> Result<Vec<T>> {
    let delta = |e: T| -> Result<T> {
        if a == T::zero() {
            discriminant(p, e)
        } else {
            Ok(monodromy_from(p, e, a)?.trace())
        }
    };
    let n = SCAN_SAMPLES;
    let step = (hi - lo) / from_usize(n - 1);
    let grid: Vec<T> = (0..n).map(|i| lo + step * from_usize(i)).collect();
    let vals = grid.iter().map(|&e| delta(e)).collect::<Result<Vec<T>>>()?;
    let two = T::lit(2.0);
    let mut edges = Vec::new();
    for level in [two, -two] {
        for i in 0..n - 1 {
            let (fa, fb) = (vals[i] - level, vals[i + 1] - level);
            if fa == T::zero() || fa * fb < T::zero() {
                let root = bisect(|e| Ok(delta(e)? - level), grid[i], grid[i + 1], fa)?;
                if is_simple_edge(&delta, root, step)? {
                    edges.push(root);
                }
            }
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
    Ok(edges)
}

fn bisect<T: Real>(f: impl Fn(T) -> Result<T>, mut a: T, mut b: T, mut fa: T) -> Result<T> {
    for _ in 0..200 {
        let m = (a + b) * T::lit(0.5);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if (fa < T::zero()) == (fm < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((a + b) * T::lit(0.5))
}

/// A simple edge has `|Δ′| ≫ 0`; a closed gap touches `±2` with `Δ′ ≈ 0`
/// and a non-zero second derivative.
fn is_simple_edge<T: Real>(delta: &impl Fn(T) -> Result<T>, e: T, step: T) -> Result<bool> {
    let h = step * T::lit(1e-2);
    let (fm, f0, fp) = (delta(e - h)?, delta(e)?, delta(e + h)?);
    let d1 = (fp - fm) / (T::lit(2.0) * h);
    let d2 = (fp - T::lit(2.0) * f0 + fm) / (h * h);
    Ok(d1.abs() > T::lit(1e-3) * d2.abs() * step)
}

/// Asymptotic fit of `p(E) − √E = Σ b_n E^{−(2n+1)/2}`.
#[derive(Debug, Clone)]
pub struct QuasimomentumFit<T: Real> {
    /// `(H₋₁, H₁, H₃)`.
    pub kdv: [T; 3],
    /// All fitted coefficients `b₀, b₁, …`.
    pub coeffs: Vec<T>,
    pub residual: T,
    pub condition: T,
    pub energies: Vec<T>,
}

pub const FIT_POINTS: usize = 12;
pub const FIT_TERMS: usize = 6;
const FIT_MAX_CONDITION: f64 = 1e12;
/// Local tolerance of the Floquet solves feeding the fit.
pub const FIT_TOL: f64 = 1e-13;

/// Fits the large-`E` expansion of the Floquet quasimomentum at energies
/// snapped to band centres, where `arccos` is best conditioned.
pub fn quasimomentum_fit<T: Real>(p: &PotentialOracle<T>) -> Result<QuasimomentumFit<T>> {
    let s = p.scale();
    let (e_lo, e_hi) = (T::lit(30.0) * s, T::lit(3000.0) * s);
    let ratio = (e_hi / e_lo).ln() / from_usize(FIT_POINTS - 1);
    let mut energies: Vec<T> = Vec::with_capacity(FIT_POINTS);
    for k in 0..FIT_POINTS {
        let target = e_lo * (ratio * from_usize(k)).exp();
        // Band centre: p·T ≈ (m + 1/2)·π.
        let m = (target.sqrt() * p.period / T::PI() - T::lit(0.5)).round().max(T::zero());
        let k_c = (m + T::lit(0.5)) * T::PI() / p.period;
        let e = k_c * k_c;
        if energies.last().is_none_or(|&last| e > last) {
            energies.push(e);
        }
    }
    if energies.len() < FIT_TERMS + 2 {
        return Err(Error::FitIllConditioned { condition: f64::INFINITY });
    }
    // Basis in the scaled variable ζ = √(e_lo/E) keeps columns O(1).
    let z_scale = e_lo.sqrt();
    let mut rows = Vec::with_capacity(energies.len());
    let mut rhs = Vec::with_capacity(energies.len());
    for &e in &energies {
        let zeta = z_scale / e.sqrt();
        rows.push((0..FIT_TERMS).map(|n| zeta.powi(2 * n as i32 + 1)).collect::<Vec<T>>());
        rhs.push((quasimomentum_at(p, e, T::lit(FIT_TOL))? - e.sqrt()) * z_scale);
    }
    let a = Matrix::from_rows(&rows);
    let (x, condition) = least_squares(&a, &rhs);
    if condition.is_nan() || condition > T::lit(FIT_MAX_CONDITION) {
        return Err(Error::FitIllConditioned { condition: condition.to_f64_lossy() });
    }
    let fitted = a.mul_vec(&x);
    let residual = fitted.iter().zip(&rhs).fold(T::zero(), |m, (f, r)| m.max((*f - *r).abs())) / z_scale;
    // Undo the scaling: b_n = x_n · e_lo^{n} … from ζ^{2n+1}/√e_lo = E^{−(2n+1)/2}·e_lo^{n}.
    let coeffs: Vec<T> = x.iter().enumerate().map(|(n, &xn)| xn * e_lo.powi(n as i32)).collect();
    Ok(QuasimomentumFit { kdv: [coeffs[0], coeffs[1], coeffs[2]], coeffs, residual, condition, energies })
}

/// Complex helper for handing real triples to series comparisons.
pub fn as_complex<T: Real>(v: [T; 3]) -> [Cx<T>; 3] {
    v.map(creal)
}
