//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T: Real> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; zero picks a heuristic value.
    pub h_init: T,
    pub max_steps: usize,
}

impl<T: Real> OdeOptions<T> {
    pub fn tight(tol: T) -> Self {
        Self { rtol: tol, atol: tol, h_init: T::zero(), max_steps: 2_000_000 }
    }
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction). The
/// observer sees every accepted step, including the final one at `x1`.
pub fn integrate<T, const N: usize, F, O>(
    mut f: F,
    x0: T,
    y0: [T; N],
    x1: T,
    opts: &OdeOptions<T>,
    mut observer: O,
) -> Result<[T; N]>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
    O: FnMut(T, &[T; N]),
{
    let span = x1 - x0;
    if span == T::zero() {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = if opts.h_init > T::zero() {
        opts.h_init.min(span.abs())
    } else {
        span.abs() * T::lit(1e-3)
    };
    let order_exp = T::lit(-0.2);
    let mut k = [[T::zero(); N]; 7];
    k[0] = f(x, &y);
    for _ in 0..opts.max_steps {
        let remaining = (x1 - x) * dir;
        if remaining <= T::zero() {
            return Ok(y);
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] = ys[i] + hs * T::lit(a) * kj[i];
                    }
                }
            }
            k[s] = f(x + hs * T::lit(C[s]), &ys);
        }
        let mut y5 = y;
        let mut err = T::zero();
        for i in 0..N {
            let mut d5 = T::zero();
            let mut d4 = T::zero();
            for s in 0..7 {
                d5 = d5 + T::lit(B5[s]) * k[s][i];
                d4 = d4 + T::lit(B4[s]) * k[s][i];
            }
            y5[i] = y[i] + hs * d5;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = hs * (d5 - d4) / sc;
            err = err + e * e;
        }
        let err = (err / T::from_usize(N).expect("dim")).sqrt();
        if !err.is_finite() {
            return Err(Error::OdeFailure { x: x.to_f64_lossy(), reason: "non-finite state".into() });
        }
        if err <= T::one() {
            x = if last { x1 } else { x + hs };
            y = y5;
            // FSAL: last stage equals f at the new point.
            k[0] = k[6];
            observer(x, &y);
            if last {
                return Ok(y);
            }
        }
        let factor = if err == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * err.powf(order_exp)).max(T::lit(0.2)).min(T::lit(5.0))
        };
        h = h * factor;
        if h <= span.abs() * T::epsilon() {
            return Err(Error::OdeFailure { x: x.to_f64_lossy(), reason: "step size underflow".into() });
        }
    }
    Err(Error::OdeFailure { x: x.to_f64_lossy(), reason: "step budget exhausted".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let tau = std::f64::consts::TAU;
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0 * tau,
            &OdeOptions::tight(1e-12),
            |_, _| {},
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
    }

    #[test]
    fn integrates_backwards() {
        let y = integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], 0.0, &OdeOptions::tight(1e-12), |_, _| {}).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-11);
    }
}
