//! Expansions at the marked point at infinity in the local parameter
//! `z = E^{-1/2}`.
//!
//! With `E = z⁻²` the curve reads `Y = z^{-(2g+1)}·S(z)` where
//! `S = √(1 + s₁z² + s₂z⁴ + …)` is taken on the branch with `S(0) = 1`,
//! matching `Y ~ +E^{g+1/2}` on the positive real axis. An odd differential
//! `N(E)·dE/Y` then becomes `−2·Σ n_k z^{2g−2−2k}·S⁻¹ dz`, so every
//! coefficient is an exact finite recurrence in the curve coefficients.

use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::periods::OddDifferential;
use crate::rnd::quasimomentum;
use crate::scalar::{creal, Cx, Real};

/// Largest admissible truncation order.
pub const MAX_ORDER: usize = 40;

/// Truncated Laurent series `Σ_{n=lo}^{hi} c_n z^n`.
///
/// Coefficients with exponents above `hi` are unknown, so sums and products
/// are truncated to the smallest exponent that is still exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<T: Real> {
    lo: i32,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> Laurent<T> {
    /// Series starting at `z^lo`; the last coefficient fixes the truncation.
    pub fn new(lo: i32, coeffs: Vec<Cx<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series keeps at least one coefficient");
        Self { lo, coeffs }
    }

    /// `c·z^n` known exactly up to `z^hi`.
    pub fn monomial(c: Cx<T>, n: i32, hi: i32) -> Self {
        assert!(hi >= n);
        let mut coeffs = vec![creal(T::zero()); (hi - n + 1) as usize];
        coeffs[0] = c;
        Self::new(n, coeffs)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest exponent that is known exactly.
    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    /// Coefficient of `z^n`; zero below `lo`.
    ///
    /// # Panics
    /// If `n` exceeds the truncation order.
    pub fn coeff(&self, n: i32) -> Cx<T> {
        assert!(n <= self.hi(), "z^{n} lies beyond the truncation order {}", self.hi());
        if n < self.lo {
            creal(T::zero())
        } else {
            self.coeffs[(n - self.lo) as usize]
        }
    }

    pub fn truncate(&self, hi: i32) -> Self {
        let hi = hi.min(self.hi());
        let lo = self.lo.min(hi);
        Self::new(lo, (lo..=hi).map(|n| self.coeff(n)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().min(other.hi());
        Self::new(lo, (lo..=hi).map(|n| self.coeff(n) + other.coeff(n)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(creal(-T::one())))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Product, exact up to `min(hi₁ + lo₂, hi₂ + lo₁)`.
    pub fn mul(&self, other: &Self) -> Self {
        let lo = self.lo + other.lo;
        let hi = (self.hi() + other.lo).min(other.hi() + self.lo);
        let coeffs = (lo..=hi)
            .map(|n| {
                (self.lo..=n - other.lo)
                    .filter(|&i| i <= self.hi())
                    .fold(creal(T::zero()), |acc, i| acc + self.coeff(i) * other.coeff(n - i))
            })
            .collect();
        Self::new(lo, coeffs)
    }

    /// Termwise antiderivative with zero constant term.
    ///
    /// Returns `None` if the series has a non-zero `z⁻¹` coefficient.
    pub fn integrate(&self, residue_tol: T) -> Option<Self> {
        if self.lo <= -1 && self.hi() >= -1 && self.coeff(-1).norm() > residue_tol {
            return None;
        }
        let lo = self.lo + 1;
        let coeffs = (self.lo..=self.hi())
            .map(|n| if n == -1 { creal(T::zero()) } else { self.coeff(n) / creal(T::lit(f64::from(n + 1))) })
            .collect();
        Some(Self::new(lo, coeffs))
    }

    /// Termwise derivative.
    pub fn derivative(&self) -> Self {
        let coeffs = (self.lo..=self.hi()).map(|n| self.coeff(n) * creal(T::lit(f64::from(n)))).collect();
        Self::new(self.lo - 1, coeffs)
    }

    /// Largest coefficient deviation over the common exact range.
    pub fn max_diff(&self, other: &Self) -> T {
        let hi = self.hi().min(other.hi());
        (self.lo.min(other.lo)..=hi).fold(T::zero(), |m, n| m.max((self.coeff(n) - other.coeff(n)).norm()))
    }
}

/// Series of `N·dE/Y` as coefficients of `z^n·dz`.
#[derive(Debug, Clone)]
pub struct Expansion<T: Real> {
    pub series: Laurent<T>,
    /// Geometric estimate of the omitted tail at the evaluation radius.
    pub tail_bound: T,
    /// Radius in `z` on which `|s₁z² + s₂z⁴ + …| ≤ 1/2`.
    pub radius: T,
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderTooLarge { requested: order, max: MAX_ORDER })
    } else {
        Ok(())
    }
}

/// Coefficients of `S⁻¹ = (1 + a₁w + a₂w² + …)^{-1/2}` in `w = z²`, up to `w^m`.
fn inverse_sqrt_in_w<T: Real>(a: &[Cx<T>], m: usize) -> Vec<Cx<T>> {
    let at = |k: usize| if k >= 1 && k <= a.len() { a[k - 1] } else { creal(T::zero()) };
    let two = creal(T::lit(2.0));
    let mut s = vec![creal(T::one())];
    for n in 1..=m {
        let mut acc = at(n);
        for k in 1..n {
            acc = acc - s[k] * s[n - k];
        }
        s.push(acc / two);
    }
    let mut t = vec![creal(T::one())];
    for n in 1..=m {
        let mut acc = creal(T::zero());
        for k in 1..=n {
            acc = acc - s[k] * t[n - k];
        }
        t.push(acc);
    }
    t
}

/// Radius `r` with `Σ|s_k| r^{2k} = 1/2`, found by bisection.
fn evaluation_radius<T: Real>(a: &[Cx<T>]) -> T {
    let f = |r: T| a.iter().enumerate().fold(T::zero(), |acc, (k, c)| acc + c.norm() * r.powi(2 * (k as i32 + 1)));
    let half = T::lit(0.5);
    let mut hi = T::one();
    while f(hi) < half {
        hi = hi * T::lit(2.0);
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * half;
        if f(mid) < half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Laurent expansion of `diff` at infinity, exact through `z^order·dz`.
pub fn expand_at_infinity<T: Real>(curve: &SpectralCurve<T>, diff: &OddDifferential<T>, order: usize) -> Result<Expansion<T>> {
    check_order(order)?;
    expand_unchecked(curve, diff, order)
}

fn expand_unchecked<T: Real>(curve: &SpectralCurve<T>, diff: &OddDifferential<T>, order: usize) -> Result<Expansion<T>> {
    let g = curve.genus() as i32;
    let a = curve.coeffs();
    let num = diff.numerator();
    let deg = num.degree().unwrap_or(0) as i32;
    let lo = 2 * g - 2 - 2 * deg;
    let hi = order as i32;
    if hi < lo {
        return Err(Error::InvalidInput(format!("order {order} is below the pole order {}", -lo)));
    }
    let m = ((hi - lo) / 2) as usize;
    let t = inverse_sqrt_in_w(a, m + 1);
    let mut coeffs = vec![creal(T::zero()); (hi - lo + 1) as usize];
    let minus_two = creal(T::lit(-2.0));
    for (k, &nk) in num.coeffs().iter().enumerate() {
        let base = 2 * g - 2 - 2 * k as i32;
        for (j, &tj) in t.iter().enumerate() {
            let e = base + 2 * j as i32;
            if e > hi {
                break;
            }
            coeffs[(e - lo) as usize] = coeffs[(e - lo) as usize] + minus_two * nk * tj;
        }
    }
    // Tail: the first omitted even-power terms at the evaluation radius,
    // summed as a geometric series of ratio at most 1/2.
    let radius = evaluation_radius(a);
    let next = |e: i32| {
        num.coeffs().iter().enumerate().fold(T::zero(), |acc, (k, nk)| {
            let j = e - (2 * g - 2 - 2 * k as i32);
            if j >= 0 && j % 2 == 0 && (j / 2) as usize <= m + 1 {
                acc + (nk.norm() * t[(j / 2) as usize].norm())
            } else {
                acc
            }
        })
    };
    let first_omitted = if (hi - lo) % 2 == 0 { hi + 2 } else { hi + 1 };
    let tail_bound = T::lit(4.0) * next(first_omitted) * radius.powi(first_omitted);
    Ok(Expansion { series: Laurent::new(lo, coeffs), tail_bound, radius })
}

/// `dE = −2z⁻³·dz`, exact to all orders.
pub fn de_series<T: Real>(hi: i32) -> Laurent<T> {
    Laurent::monomial(creal(T::lit(-2.0)), -3, hi)
}

/// Coefficients of `Q` and `Q·dE` at infinity.
#[derive(Debug, Clone)]
pub struct SeriesCoefficients<T: Real> {
    /// `T[k]`: coefficient of `z^{-k-1}·dz` in `Q·dE`, `k = 0..=3`.
    pub t: Vec<Cx<T>>,
    /// `(j, H_j)`: coefficient of `z^{j-1}·dz` in `Q·dE` for odd `j ≥ 1`.
    pub h: Vec<(i32, Cx<T>)>,
    /// `(H₋₁, H₁, H₃)`: coefficients of `z, z³, z⁵` in `Q = z⁻¹ + …`.
    pub kdv: [Cx<T>; 3],
    pub order: usize,
    /// `Q` itself with zero constant term.
    pub q: Laurent<T>,
    /// `dQ` as coefficients of `z^n·dz`.
    pub dq: Laurent<T>,
    /// `Q·dE` as coefficients of `z^n·dz`.
    pub qde: Laurent<T>,
}

impl<T: Real> SeriesCoefficients<T> {
    /// Coefficient `H_{2n−1}` of `z^{2n+1}` in `Q`, for odd `j = 2n − 1 ≥ −1`.
    pub fn q_hamiltonian(&self, j: i32) -> Option<Cx<T>> {
        (j >= -1 && j % 2 != 0 && j + 2 <= self.q.hi()).then(|| self.q.coeff(j + 2))
    }

    /// `H_j` in the `Q·dE` convention.
    pub fn qde_hamiltonian(&self, j: i32) -> Option<Cx<T>> {
        self.h.iter().find(|(k, _)| *k == j).map(|(_, v)| *v)
    }
}

/// Residue tolerance used when integrating `dQ` termwise.
const RESIDUE_TOL: f64 = 1e-10;

/// Expands the real-normalized quasimomentum at infinity through `Q·dE`
/// coefficients of `z^{order}·dz`.
pub fn qde_coefficients<T: Real>(curve: &SpectralCurve<T>, order: usize) -> Result<SeriesCoefficients<T>> {
    check_order(order)?;
    let dq_diff = quasimomentum(curve)?;
    qde_coefficients_of(curve, &dq_diff, order)
}

/// Same as [`qde_coefficients`] for an already solved `dQ`.
pub fn qde_coefficients_of<T: Real>(
    curve: &SpectralCurve<T>,
    dq_diff: &OddDifferential<T>,
    order: usize,
) -> Result<SeriesCoefficients<T>> {
    check_order(order)?;
    let order = order.max(4);
    // Q·dE through z^order needs Q through z^{order+3}, hence dQ through z^{order+2}.
    let dq = expand_unchecked(curve, dq_diff, order + 2)?.series;
    let scale = dq.coeffs.iter().fold(T::one(), |m, c| m.max(c.norm()));
    let q = dq
        .integrate(T::lit(RESIDUE_TOL) * scale)
        .ok_or_else(|| Error::InvalidInput("quasimomentum has a residue at infinity".into()))?;
    let qde = q.mul(&de_series(order as i32 + 1));
    let t = (0..=3).map(|k| qde.coeff(-k - 1)).collect();
    let h = (1..=order as i32 + 1).step_by(2).filter(|&j| j - 1 <= qde.hi()).map(|j| (j, qde.coeff(j - 1))).collect();
    let kdv = [q.coeff(1), q.coeff(3), q.coeff(5)];
    Ok(SeriesCoefficients { t, h, kdv, order, q, dq, qde })
}

/// `(H₋₁, H₁, H₃)` from `Q = z⁻¹ + H₋₁z + H₁z³ + H₃z⁵ + …`.
pub fn kdv_hamiltonians<T: Real>(curve: &SpectralCurve<T>) -> Result<[Cx<T>; 3]> {
    Ok(qde_coefficients(curve, 8)?.kdv)
}
