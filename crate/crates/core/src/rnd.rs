//! Real-normalized differentials in the odd class `N(E)·dE/Y`.
//!
//! A differential is real-normalized when every cycle period is real.
//! The numerator splits into a prescribed part of degree ≥ g (the pole at
//! infinity) and a free holomorphic part of degree < g. The free part's g
//! complex coefficients are fixed by the 2g real conditions
//! `Im ∮_γ = 0` on a homology basis.

use crate::curve::SpectralCurve;
use crate::error::{Error, Result};
use crate::linalg::{solve_with_condition, Matrix};
use crate::periods::{period_vectors, OddDifferential, PeriodVector, QuadOptions};
use crate::poly::Poly;
use crate::scalar::{creal, cx, Cx, Real};

/// Largest acceptable condition number of the normalization system.
pub const MAX_CONDITION: f64 = 1e12;

/// Prescribed numerator coefficients of degree ≥ g.
///
/// `leading[j]` multiplies `E^{g+j}`. Every such term is odd under the
/// hyperelliptic involution, so the pole at infinity never carries a residue.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalPartSpec<T: Real> {
    genus: usize,
    leading: Vec<Cx<T>>,
}

impl<T: Real> PrincipalPartSpec<T> {
    pub fn new(genus: usize, leading: Vec<Cx<T>>) -> Self {
        Self { genus, leading }
    }

    pub fn zero(genus: usize) -> Self {
        Self::new(genus, Vec::new())
    }

    /// `dQ ~ −dz/z²` in `z = E^{-1/2}`: numerator `E^g/2 + …`.
    pub fn quasimomentum(genus: usize) -> Self {
        Self::new(genus, vec![creal(T::lit(0.5))])
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn leading(&self) -> &[Cx<T>] {
        &self.leading
    }

    /// Number of free complex coefficients.
    pub fn free_count(&self) -> usize {
        self.genus
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.genus, other.genus, "specs on different genera");
        let n = self.leading.len().max(other.leading.len());
        let zero = creal(T::zero());
        Self::new(
            self.genus,
            (0..n)
                .map(|j| *self.leading.get(j).unwrap_or(&zero) + *other.leading.get(j).unwrap_or(&zero))
                .collect(),
        )
    }

    /// Prescribed part as a polynomial numerator.
    pub fn fixed_numerator(&self) -> Poly<T> {
        let mut c = vec![creal(T::zero()); self.genus];
        c.extend_from_slice(&self.leading);
        Poly::new(c)
    }
}

/// Outcome of a normalization solve.
#[derive(Debug, Clone)]
pub struct RealNormalized<T: Real> {
    pub differential: OddDifferential<T>,
    /// Solved coefficients of `E^0 … E^{g−1}`.
    pub free: Vec<Cx<T>>,
    pub condition: T,
    /// Periods of the result over the canonical basis.
    pub periods: PeriodVector<T>,
}

fn monomial<T: Real>(k: usize) -> OddDifferential<T> {
    let mut c = vec![creal(T::zero()); k + 1];
    c[k] = creal(T::one());
    OddDifferential::from_coeffs(c)
}

/// Real system `M·[x; y] = rhs` for `c_k = x_k + i·y_k` from periods
/// `p[k][γ]` of `E^k dE/Y`: `Im(c·p) = x·Im p + y·Re p`.
fn normalization_matrix<T: Real>(basis: &[PeriodVector<T>]) -> Matrix<T> {
    let g = basis.len();
    let mut m = Matrix::zeros(2 * g, 2 * g);
    for (k, pv) in basis.iter().enumerate() {
        for (row, v) in pv.values.iter().enumerate() {
            m[(row, k)] = v.im;
            m[(row, g + k)] = v.re;
        }
    }
    m
}

fn solve_free<T: Real>(m: &Matrix<T>, rhs: &[T]) -> Result<(Vec<Cx<T>>, T)> {
    let g = m.rows() / 2;
    let (x, cond) = solve_with_condition(m, rhs);
    match x {
        Some(x) if cond <= T::lit(MAX_CONDITION) => Ok(((0..g).map(|k| cx(x[k], x[g + k])).collect(), cond)),
        _ => Err(Error::SingularNormalizationSystem { condition: cond.to_f64_lossy() }),
    }
}

pub fn build_real_normalized<T: Real>(curve: &SpectralCurve<T>, spec: &PrincipalPartSpec<T>) -> Result<OddDifferential<T>> {
    Ok(build_real_normalized_with(curve, spec, &QuadOptions::default())?.differential)
}

pub fn build_real_normalized_with<T: Real>(
    curve: &SpectralCurve<T>,
    spec: &PrincipalPartSpec<T>,
    opts: &QuadOptions<T>,
) -> Result<RealNormalized<T>> {
    let g = curve.genus();
    if spec.genus() != g {
        return Err(Error::InvalidInput(format!("spec genus {} on a genus-{g} curve", spec.genus())));
    }
    let fixed = OddDifferential::new(spec.fixed_numerator());
    let monomials: Vec<OddDifferential<T>> = (0..g).map(monomial).collect();
    let mut diffs: Vec<&OddDifferential<T>> = monomials.iter().collect();
    diffs.push(&fixed);
    let mut pvs = period_vectors(curve, &diffs, opts)?;
    let fixed_pv = pvs.pop().expect("fixed part periods");
    let m = normalization_matrix(&pvs);
    let rhs: Vec<T> = fixed_pv.values.iter().map(|v| -v.im).collect();
    let (free, condition) = solve_free(&m, &rhs)?;
    let mut coeffs = free.clone();
    coeffs.extend_from_slice(&spec.leading);
    let differential = OddDifferential::from_coeffs(coeffs);
    let mut values = fixed_pv.values.clone();
    for (k, pv) in pvs.iter().enumerate() {
        for (v, p) in values.iter_mut().zip(&pv.values) {
            *v = *v + free[k] * *p;
        }
    }
    let periods = PeriodVector { values, ..fixed_pv };
    Ok(RealNormalized { differential, free, condition, periods })
}

/// Quasimomentum differential: `dQ = (E^g + …)·dE/(2Y)` with real periods.
pub fn quasimomentum<T: Real>(curve: &SpectralCurve<T>) -> Result<OddDifferential<T>> {
    build_real_normalized(curve, &PrincipalPartSpec::quasimomentum(curve.genus()))
}

/// Real-normalized holomorphic basis `[Ω_{A₁}…Ω_{A_g}, Ω_{B₁}…Ω_{B_g}]` with
/// `Im ∮_{A_j} Ω_{A_i} = δ_ij`, `Im ∮_{B_j} Ω_{A_i} = 0` and the B
/// counterparts.
pub fn holomorphic_real_basis<T: Real>(curve: &SpectralCurve<T>) -> Result<Vec<OddDifferential<T>>> {
    let g = curve.genus();
    let monomials: Vec<OddDifferential<T>> = (0..g).map(monomial).collect();
    let refs: Vec<&OddDifferential<T>> = monomials.iter().collect();
    let pvs = period_vectors(curve, &refs, &QuadOptions::default())?;
    let m = normalization_matrix(&pvs);
    (0..2 * g)
        .map(|i| {
            let mut rhs = vec![T::zero(); 2 * g];
            rhs[i] = T::one();
            let (free, _) = solve_free(&m, &rhs)?;
            Ok(OddDifferential::from_coeffs(free))
        })
        .collect()
}

/// `Y dE = P(E)·dE/Y`.
pub fn y_differential<T: Real>(curve: &SpectralCurve<T>) -> OddDifferential<T> {
    OddDifferential::new(curve.poly().clone())
}
