//! Dense complex polynomials and root extraction.

use crate::scalar::{creal, cx, from_usize, Cx, Real};

/// Polynomial with complex coefficients in ascending order: `c[0] + c[1] x + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Real> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<Cx<T>>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial `∏ (x − r)`.
    pub fn from_roots(roots: &[Cx<T>]) -> Self {
        let mut c = vec![creal(T::one())];
        for &r in roots {
            let mut next = vec![Cx::new(T::zero(), T::zero()); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] = next[i + 1] + ci;
                next[i] = next[i] - ci * r;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.re == T::zero() && c.im == T::zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Cx<T> {
        self.coeffs.get(k).copied().unwrap_or_else(|| creal(T::zero()))
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(creal(T::zero()), |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: Cx<T>) -> (Cx<T>, Cx<T>) {
        let zero = creal(T::zero());
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * from_usize::<T>(k))
                .collect(),
        )
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![creal(T::zero()); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self::new(out)
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }
}

/// Principal complex cube root.
fn cbrt_principal<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.norm() == T::zero() {
        return z;
    }
    let (r, theta) = z.to_polar();
    Cx::from_polar(r.cbrt(), theta / T::lit(3.0))
}

/// Roots of the monic cubic `x³ + b x² + c x + d` by Cardano's formula,
/// each refined by Newton's method.
pub fn cubic_roots<T: Real>(b: Cx<T>, c: Cx<T>, d: Cx<T>) -> [Cx<T>; 3] {
    let three = T::lit(3.0);
    let d0 = b * b - c * three;
    let d1 = b * b * b * T::lit(2.0) - b * c * T::lit(9.0) + d * T::lit(27.0);
    let disc = (d1 * d1 - d0 * d0 * d0 * T::lit(4.0)).sqrt();
    let plus = (d1 + disc) * T::lit(0.5);
    let minus = (d1 - disc) * T::lit(0.5);
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    let cc = cbrt_principal(big);
    let xi = cx(T::lit(-0.5), T::lit(0.75).sqrt());
    let mut roots = [creal(T::zero()); 3];
    let mut rot = creal(T::one());
    for root in roots.iter_mut() {
        let ck = cc * rot;
        *root = if ck.norm() == T::zero() {
            -b / three
        } else {
            -(b + ck + d0 / ck) / three
        };
        rot = rot * xi;
    }
    let p = Poly::new(vec![d, c, b, creal(T::one())]);
    for r in roots.iter_mut() {
        *r = newton_polish(&p, *r, 3);
    }
    roots
}

/// A few Newton steps, kept only while the residual decreases.
pub fn newton_polish<T: Real>(p: &Poly<T>, mut x: Cx<T>, steps: usize) -> Cx<T> {
    let mut res = p.eval(x).norm();
    for _ in 0..steps {
        let (v, dv) = p.eval_with_derivative(x);
        if dv.norm() == T::zero() || !dv.norm().is_finite() {
            break;
        }
        let cand = x - v / dv;
        let cres = p.eval(cand).norm();
        if cres.is_finite() && cres < res {
            x = cand;
            res = cres;
        } else {
            break;
        }
    }
    x
}

/// All roots of a polynomial of degree ≥ 1 by Aberth–Ehrlich simultaneous
/// iteration, followed by Newton refinement.
pub fn aberth_roots<T: Real>(p: &Poly<T>) -> Vec<Cx<T>> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Vec::new(),
    };
    let lead = p.coeff(n);
    let monic = p.scale(creal(T::one()) / lead);
    // Cauchy bound on root moduli.
    let bound = (0..n).fold(T::zero(), |m, k| m.max(monic.coeff(k).norm())) + T::one();
    let radius = bound * T::lit(0.5);
    let offset = T::lit(0.4);
    let two_pi = T::TAU();
    let mut z: Vec<Cx<T>> = (0..n)
        .map(|k| Cx::from_polar(radius, two_pi * from_usize::<T>(k) / from_usize::<T>(n) + offset))
        .collect();
    let eps = T::epsilon() * T::lit(4.0);
    for _ in 0..500 {
        let mut max_step = T::zero();
        for i in 0..n {
            let (v, dv) = monic.eval_with_derivative(z[i]);
            if v.norm() == T::zero() {
                continue;
            }
            let ratio = v / dv;
            let mut s = creal(T::zero());
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    s = s + creal(T::one()) / (z[i] - zj);
                }
            }
            let step = ratio / (creal(T::one()) - ratio * s);
            if step.norm().is_finite() {
                z[i] = z[i] - step;
                max_step = max_step.max(step.norm() / z[i].norm().max(T::one()));
            }
        }
        if max_step < eps {
            break;
        }
    }
    z.into_iter().map(|r| newton_polish(&monic, r, 3)).collect()
}
