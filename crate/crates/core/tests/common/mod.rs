#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rncurves_core::{Curve, Cx64};

pub fn c(re: f64, im: f64) -> Cx64 {
    Cx64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point in the disc of radius `r`.
pub fn disc_point(rng: &mut ChaCha8Rng, r: f64) -> Cx64 {
    loop {
        let z = c(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if z.norm() <= r {
            return z;
        }
    }
}

/// Random genus-1 curve with coefficients in a disc, discriminant-filtered
/// so that branch points stay separated.
pub fn random_cubic(rng: &mut ChaCha8Rng, radius: f64) -> Curve {
    loop {
        let s = [disc_point(rng, radius), disc_point(rng, radius), disc_point(rng, radius)];
        if let Ok(curve) = Curve::from_cubic(s) {
            let r = curve.roots();
            let min = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .map(|(i, j)| (r[i] - r[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if min > 0.05 * curve.scale() {
                return curve;
            }
        }
    }
}

/// Random curve with three real branch points separated by at least 0.1.
pub fn random_real_cubic(rng: &mut ChaCha8Rng) -> Curve {
    loop {
        let mut r: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if r[1] - r[0] > 0.1 && r[2] - r[1] > 0.1 {
            return Curve::from_roots(&[c(r[0], 0.0), c(r[1], 0.0), c(r[2], 0.0)]).unwrap();
        }
    }
}

pub fn random_quintic(rng: &mut ChaCha8Rng) -> Curve {
    loop {
        let roots: Vec<Cx64> = (0..5).map(|_| disc_point(rng, 2.0)).collect();
        let ok = (0..5).all(|i| (i + 1..5).all(|j| (roots[i] - roots[j]).norm() > 0.3));
        if ok {
            if let Ok(curve) = Curve::from_roots(&roots) {
                return curve;
            }
        }
    }
}
