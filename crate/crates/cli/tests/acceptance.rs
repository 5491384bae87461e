//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rncurves_core::crit::{
    boutroux_residual, chart_point, constrained_gradient, convention_scan, solve_boutroux, Family,
    HamiltonianSpec, ScanStatus, H_TARGET,
};
use rncurves_core::hill::{
    band_edges, constant_potential, discriminant, make_potential, mean_u_prime_sq, pn_integrals, quasimomentum_fit,
};
use rncurves_core::periods::{agm, integrate_cycle, period_vector, OddDifferential};
use rncurves_core::quad::composite;
use rncurves_core::rnd::{build_real_normalized, build_real_normalized_with, PrincipalPartSpec};
use rncurves_core::series::{kdv_hamiltonians, qde_coefficients};
use rncurves_core::{Curve, Cx64};

const SCAN_G2: f64 = 1.0;
const SCALED_G2: f64 = 16.0;
const RESIDUAL_TOL: f64 = 1e-9;
const H_MATCH_TOL: f64 = 1e-6;
const RATIO_SCALE_TOL: f64 = 1e-8;
const CRITICAL_TOL: f64 = 1e-5;
const GRADIENT_FLOOR: f64 = 1e-8;
const NON_CRITICAL_MIN: f64 = 1e-3;
const TRIPLE_TOL: f64 = 1e-5;
const TRIPLE_FIT_H3_TOL: f64 = 1e-4;
const NORMALIZATION_CURVES: usize = 50;
const NORMALIZATION_RADIUS: f64 = 3.0;
const IMAG_PERIOD_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 1e-10;
const OBSTRUCTION_CURVES: usize = 20;
const OBSTRUCTION_MIN: f64 = 1e-3;
const LEMNISCATE_TOL: f64 = 1e-11;
const FREE_DISCRIMINANT_TOL: f64 = 1e-8;
const CONVENTION_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    summary: String,
}

fn check(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome { pass, summary: summary.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn disc_point(rng: &mut ChaCha8Rng, r: f64) -> Cx64 {
    loop {
        let z = Cx64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if z.norm() <= r {
            return z;
        }
    }
}

/// Curve with coefficients in the disc of radius `r`, kept only when the
/// discriminant is not small against the sixth power of the root scale.
fn random_curve(rng: &mut ChaCha8Rng, r: f64) -> Curve {
    loop {
        let s = [disc_point(rng, r), disc_point(rng, r), disc_point(rng, r)];
        if let Ok(curve) = Curve::from_cubic(s) {
            if curve.discriminant().norm() > 1e-3 * curve.scale().powi(6) {
                return curve;
            }
        }
    }
}

fn random_real_curve(rng: &mut ChaCha8Rng) -> (Curve, [f64; 3]) {
    loop {
        let mut r: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        r.sort_by(f64::total_cmp);
        if r[1] - r[0] > 0.1 && r[2] - r[1] > 0.1 {
            let roots: Vec<Cx64> = r.iter().map(|&x| Cx64::new(x, 0.0)).collect();
            return (Curve::from_roots(&roots).unwrap(), [r[0], r[1], r[2]]);
        }
    }
}

/// `∫_{e₁}^{e₂} N(E) dE / √|P(E)|` via `E = m + h·cos θ`, which removes both
/// endpoint singularities.
fn gap_integral(numerator: impl Fn(f64) -> f64, e: [f64; 3]) -> f64 {
    let (m, h) = ((e[1] + e[2]) / 2.0, (e[2] - e[1]) / 2.0);
    composite(0.0, PI, 16, 32)
        .map(|(t, w)| {
            let x = m + h * t.cos();
            w * numerator(x) / (x - e[0]).sqrt()
        })
        .sum()
}

fn boutroux_criterion() -> Outcome {
    let scan = convention_scan(SCAN_G2, H_TARGET);
    let mut report = Vec::new();
    for e in &scan {
        let h = e.implied_h.map_or("-".to_string(), |h| format!("{h:.12}"));
        let err = e.h_error.map_or("-".to_string(), |d| format!("{d:.2e}"));
        report.push(format!("{}={} h={h} err={err}", e.family, e.status.label()));
    }
    let mut ok = true;
    let mut worst_residual: f64 = 0.0;
    let mut solved = 0;
    for e in scan.iter().filter(|e| e.status == ScanStatus::Solved) {
        let r = e.result.as_ref().unwrap();
        let fresh = boutroux_residual(&r.family.curve(r.g2, r.g3).unwrap()).unwrap();
        let residual = fresh[0].abs().max(fresh[1].abs());
        worst_residual = worst_residual.max(residual);
        let real_roots = r.curve.roots().iter().filter(|z| z.im.abs() < 1e-12 * r.curve.scale()).count();
        ok &= residual < RESIDUAL_TOL && r.curve.is_conj_symmetric() && real_roots == 1;
        let scaled = solve_boutroux(e.family, SCALED_G2, e.family.default_bracket(SCALED_G2));
        ok &= scaled.is_ok_and(|s| (s.ratio - r.ratio).abs() < RATIO_SCALE_TOL);
        solved += 1;
    }
    ok &= solved >= 1;
    let matches = scan.iter().filter(|e| e.h_error.is_some_and(|d| d < H_MATCH_TOL)).count();
    check(
        ok,
        format!(
            "{solved} families solved, max |residual| {worst_residual:.2e} < {RESIDUAL_TOL:.0e}, \
             ratio(g2=16) = ratio(g2=1) to {RATIO_SCALE_TOL:.0e}; h-match within {H_MATCH_TOL:.0e}: {matches} family \
             [{}]",
            report.join("; ")
        ),
    )
}

fn gradient_criterion() -> Outcome {
    let f = Family::WeierstrassPlusG2;
    let solved = solve_boutroux(f, SCAN_G2, f.default_bracket(SCAN_G2)).unwrap();
    let spec = HamiltonianSpec::re_h3();
    let at_critical = constrained_gradient(chart_point(&solved.curve).unwrap(), &spec).unwrap();
    let at_reference = constrained_gradient([1.0, 0.0, 0.0, 0.0], &spec).unwrap();
    let bound = CRITICAL_TOL * (at_critical.raw_norm + GRADIENT_FLOOR);
    let ok_c = at_critical.projected_norm < bound;
    let ok_r = at_reference.projected_norm > NON_CRITICAL_MIN * at_reference.raw_norm;
    check(
        ok_c && ok_r,
        format!(
            "Boutroux curve: projected {:.3e} < {bound:.3e}; E^3 - E: projected {:.3e} > {:.3e}",
            at_critical.projected_norm,
            at_reference.projected_norm,
            NON_CRITICAL_MIN * at_reference.raw_norm
        ),
    )
}

fn triple_criterion() -> Outcome {
    let p = make_potential(4.0, 0.5).unwrap();
    let direct = pn_integrals(&p).unwrap();
    let fit = quasimomentum_fit(&p).unwrap().kdv;
    let series = kdv_hamiltonians(&band_edges(&p).unwrap().curve().unwrap()).unwrap().map(|h| h.re);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut worst = [0.0f64; 3];
    let mut ok = true;
    for k in 0..3 {
        let fit_tol = if k == 2 { TRIPLE_FIT_H3_TOL } else { TRIPLE_TOL };
        let d = [rel(series[k], direct[k]), rel(fit[k], direct[k]), rel(series[k], fit[k])];
        ok &= d[0] < TRIPLE_TOL && d[1] < fit_tol && d[2] < fit_tol;
        for (w, v) in worst.iter_mut().zip(d) {
            *w = w.max(v);
        }
    }
    check(
        ok,
        format!(
            "max relative deviation series/direct {:.2e}, fit/direct {:.2e}, series/fit {:.2e} \
             (tolerance {TRIPLE_TOL:.0e}, {TRIPLE_FIT_H3_TOL:.0e} for H3 via the fit)",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn normalization_criterion() -> Outcome {
    let mut rng = rng(4);
    let mut worst_imag: f64 = 0.0;
    let mut zero_ok = true;
    for _ in 0..NORMALIZATION_CURVES {
        let curve = random_curve(&mut rng, NORMALIZATION_RADIUS);
        let dq = build_real_normalized(&curve, &PrincipalPartSpec::quasimomentum(1)).unwrap();
        // Periods recomputed from the returned differential.
        let pv = period_vector(&curve, &dq).unwrap();
        worst_imag = worst_imag.max(pv.max_abs_imag() / curve.scale());
        zero_ok &= build_real_normalized(&curve, &PrincipalPartSpec::zero(1)).unwrap().is_zero();
    }
    let mut worst_gap: f64 = 0.0;
    for _ in 0..OBSTRUCTION_CURVES {
        let (curve, e) = random_real_curve(&mut rng);
        let dq = build_real_normalized_with(&curve, &PrincipalPartSpec::quasimomentum(1), &Default::default()).unwrap();
        let n = dq.differential.numerator().clone();
        let gap = gap_integral(|x| n.eval(Cx64::new(x, 0.0)).re, e);
        worst_gap = worst_gap.max(gap.abs() / curve.scale().max(1.0));
    }
    check(
        worst_imag < IMAG_PERIOD_TOL && zero_ok && worst_gap < GAP_TOL,
        format!(
            "{NORMALIZATION_CURVES} curves: max |Im period|/scale {worst_imag:.2e} < {IMAG_PERIOD_TOL:.0e}; \
             zero principal part gives zero: {zero_ok}; {OBSTRUCTION_CURVES} real curves: max gap integral {worst_gap:.2e} < {GAP_TOL:.0e}"
        ),
    )
}

fn obstruction_criterion() -> Outcome {
    let mut rng = rng(5);
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..OBSTRUCTION_CURVES {
        let (curve, _) = random_real_curve(&mut rng);
        let r = boutroux_residual(&curve).unwrap();
        worst = worst.min(r[0].abs().max(r[1].abs()) / curve.scale());
    }
    let mut slope: f64 = f64::INFINITY;
    let mut oracles = 0;
    while oracles < OBSTRUCTION_CURVES {
        let mut e: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        e.push(-e[0] - e[1]);
        e.sort_by(|a, b| b.total_cmp(a));
        if e[0] - e[1] < 0.2 || e[1] - e[2] < 0.2 {
            continue;
        }
        let g2 = -4.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]);
        let g3 = 4.0 * e[0] * e[1] * e[2];
        slope = slope.min(mean_u_prime_sq(&make_potential(g2, g3).unwrap()));
        oracles += 1;
    }
    check(
        worst > OBSTRUCTION_MIN && slope > 0.0,
        format!(
            "min over curves of max|residual|/scale {worst:.3e} > {OBSTRUCTION_MIN:.0e}; \
             min over potentials of mean u'^2 {slope:.3e} > 0"
        ),
    )
}

fn oracle_criterion() -> Outcome {
    let lemniscate_constant = PI / agm(1.0, 2f64.sqrt());
    let curve = Curve::from_real_coeffs(&[0.0, -1.0, 0.0]).unwrap();
    let basis = curve.canonical_homology_basis();
    let period = basis
        .iter()
        .map(|b| integrate_cycle(&curve, &OddDifferential::holomorphic_half(), b).unwrap().norm())
        .fold(f64::INFINITY, f64::min);
    let lem_err = (period - lemniscate_constant).abs();
    let t = 2.0;
    let free = constant_potential(0.0, t).unwrap();
    let free_err = [0.5, 3.0, 17.0, 120.0, 900.0]
        .iter()
        .map(|&e: &f64| (discriminant(&free, e).unwrap() - 2.0 * (e.sqrt() * t).cos()).abs())
        .fold(0.0, f64::max);
    let mut conv_err: f64 = 0.0;
    let mut indices = 0;
    for roots in [[-1.0, 0.0, 1.0], [-1.2, 0.3, 0.9]] {
        let curve = Curve::from_roots(&roots.map(|x| Cx64::new(x, 0.0))).unwrap();
        let s = qde_coefficients(&curve, 20).unwrap();
        for &(j, h) in &s.h {
            if let Some(q) = s.q_hamiltonian(j) {
                conv_err = conv_err.max((h + q * 2.0).norm());
                indices += 1;
            }
        }
        conv_err = conv_err.max((s.t[1] + s.q_hamiltonian(-1).unwrap() * 2.0).norm());
    }
    check(
        lem_err < LEMNISCATE_TOL && free_err < FREE_DISCRIMINANT_TOL && conv_err < CONVENTION_TOL,
        format!(
            "lemniscate period {period:.13} vs AGM {lemniscate_constant:.13} (error {lem_err:.1e} < {LEMNISCATE_TOL:.0e}); \
             free discriminant error {free_err:.1e} < {FREE_DISCRIMINANT_TOL:.0e}; \
             qde2 = -2 Q on {indices} indices, error {conv_err:.1e} < {CONVENTION_TOL:.0e}"
        ),
    )
}

/// Name, experiment and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("1 Boutroux solution and h diagnostic", boutroux_criterion, 30),
        ("2 critical points on the leaf", gradient_criterion, 60),
        ("3 triple consistency", triple_criterion, 60),
        ("4 real normalization", normalization_criterion, 120),
        ("5 obstruction", obstruction_criterion, 60),
        ("6 oracle cross-checks", oracle_criterion, 30),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed < Duration::from_secs(budget);
        failures += usize::from(!pass);
        println!(
            "criterion {name}: {} ({:.2} s of {budget} s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.summary
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
