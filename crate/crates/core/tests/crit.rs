mod common;

use common::{c, random_cubic, random_real_cubic, rng};
use rand::Rng;
use rncurves_core::crit::{
    boutroux_residual, chart_curve, chart_point, constrained_gradient, constrained_gradient_with, convention_scan,
    hamiltonian, implied_h, leaf_chart, leaf_chart_with, period_scale, ratio_of_h, solve_boutroux, Family,
    HamiltonianSpec, ScanStatus, H_TARGET,
};
use rncurves_core::linalg::{dot, norm2};
use rncurves_core::quad::composite;
use rncurves_core::series::kdv_hamiltonians;
use rncurves_core::{Curve, Cx64, Error};

fn boutroux_curve() -> Curve {
    let f = Family::WeierstrassPlusG2;
    solve_boutroux(f, 1.0f64, f.default_bracket(1.0)).unwrap().curve
}

#[test]
fn residuals_scale_with_the_five_halves_power() {
    let mut rng = rng(401);
    for _ in 0..10 {
        let curve = random_cubic(&mut rng, 3.0);
        let lambda: f64 = rng.gen_range(0.3..3.0);
        let r = boutroux_residual(&curve).unwrap();
        let rs = boutroux_residual(&curve.scaled(c(lambda, 0.0)).unwrap()).unwrap();
        let f = lambda.powf(2.5);
        for k in 0..2 {
            assert!((rs[k] - f * r[k]).abs() < 1e-9 * (f * r[k]).abs().max(period_scale(&curve) * f));
        }
    }
}

#[test]
fn three_real_roots_obstruct_the_boutroux_condition() {
    let mut rng = rng(402);
    for _ in 0..20 {
        let curve = random_real_cubic(&mut rng);
        let r = boutroux_residual(&curve).unwrap();
        let e = curve.sorted_real_roots().unwrap();
        // 2∫_{E₁}^{E₂} |Y| dE with E = m + h·cos θ, independent of the cycle machinery.
        let (m, h) = ((e[1] + e[2]) / 2.0, (e[2] - e[1]) / 2.0);
        let gap: f64 = composite(0.0, std::f64::consts::PI, 8, 32)
            .map(|(t, w)| {
                let x = m + h * t.cos();
                w * ((x - e[0]) * (x - e[1]) * (e[2] - x)).abs().sqrt() * h * t.sin()
            })
            .sum();
        assert!((r[0].abs() - 2.0 * gap).abs() < 1e-10 * curve.scale().powf(2.5));
        assert!(r[1].abs() < 1e-10 * curve.scale().powf(2.5));
        assert!(r[0].abs().max(r[1].abs()) > 1e-3 * curve.scale());
    }
}

#[test]
fn conjugation_symmetric_cycle_period_is_real_or_imaginary() {
    let mut rng = rng(403);
    for _ in 0..20 {
        let a: f64 = rng.gen_range(-1.5..1.5);
        let b: f64 = rng.gen_range(0.3..1.5);
        let r: f64 = rng.gen_range(-2.0..2.0);
        if (r - a).abs() < 0.2 {
            continue;
        }
        let curve = Curve::from_roots(&[c(r, 0.0), c(a, b), c(a, -b)]).unwrap();
        let res = boutroux_residual(&curve).unwrap();
        let tol = 1e-9 * period_scale(&curve);
        if r > a {
            // The A-cycle around [a − bi, a + bi] has a real Y dE period.
            assert!(res[0].abs() < tol, "{res:?}");
        } else {
            // With the real root on the left that period is purely imaginary
            // and the B residual is locked to it.
            assert!((res[1] - res[0] / 2.0).abs() < tol || (res[1] + res[0] / 2.0).abs() < tol, "{res:?}");
        }
    }
}

#[test]
fn solver_finds_one_conjugation_symmetric_solution() {
    let f = Family::WeierstrassPlusG2;
    let r = solve_boutroux(f, 1.0f64, f.default_bracket(1.0)).unwrap();
    let tol = 1e-9 * period_scale(&r.curve);
    assert!(r.residuals[0].abs() < tol && r.residuals[1].abs() < tol);
    assert!(r.curve.is_conj_symmetric() && !r.curve.has_real_roots());
    assert_eq!(r.curve.roots().iter().filter(|z| z.im.abs() < 1e-12).count(), 1);
    // A 10× tighter bracket around the root returns the same parameter.
    let w = (r.bracket.1 - r.bracket.0) / 20.0;
    let again = solve_boutroux(f, 1.0f64, (r.g3 - w / 2.0, r.g3 + w / 2.0)).unwrap();
    assert!((again.g3 - r.g3).abs() < 1e-10);
}

#[test]
fn ratio_is_scale_invariant() {
    for f in [Family::PlusG2, Family::WeierstrassPlusG2] {
        let a = solve_boutroux(f, 1.0f64, f.default_bracket(1.0)).unwrap();
        let b = solve_boutroux(f, 16.0f64, f.default_bracket(16.0)).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-8, "{f}: {} vs {}", a.ratio, b.ratio);
    }
}

#[test]
fn families_without_solutions_report_the_bracket() {
    for f in [Family::MinusG2, Family::WeierstrassMinusG2] {
        let err = solve_boutroux(f, 1.0f64, f.default_bracket(1.0)).unwrap_err();
        assert!(matches!(err, Error::NoSolutionInBracket { .. }), "{f}: {err}");
    }
    assert!(matches!(solve_boutroux(Family::PlusG2, -1.0, (0.0, 1.0)), Err(Error::InvalidInput(_))));
    assert!(matches!(solve_boutroux(Family::PlusG2, 1.0, (1.0, 0.0)), Err(Error::InvalidInput(_))));
}

#[test]
fn convention_scan_singles_out_one_family() {
    let scan = convention_scan(1.0, H_TARGET);
    assert_eq!(scan.len(), 4);
    let matches: Vec<_> = scan.iter().filter(|e| e.h_error.is_some_and(|d| d < 1e-6)).collect();
    assert_eq!(matches.len(), 1);
    assert_eq!(matches[0].family, Family::WeierstrassPlusG2);
    assert_eq!(scan[0].family, Family::WeierstrassPlusG2);
    assert!(scan.iter().any(|e| e.status == ScanStatus::NoSolutionInBracket));
    let again = convention_scan(1.0, H_TARGET);
    let fmt = |s: &[rncurves_core::crit::ScanEntry<f64>]| {
        s.iter().map(|e| format!("{} {:?} {:?} {:?}", e.family, e.status, e.ratio, e.implied_h)).collect::<Vec<_>>()
    };
    assert_eq!(fmt(&scan), fmt(&again));
}

#[test]
fn implied_h_round_trips() {
    for h in [0.9f64, 1.5, 2.0, 3.246_382_225_374_427_7, 10.0] {
        let r = ratio_of_h(h);
        assert!((ratio_of_h(implied_h(r).unwrap()) - r).abs() < 1e-12 * r.max(1.0));
    }
}

#[test]
fn hamiltonian_is_linear_and_matches_the_series() {
    let curve = boutroux_curve();
    assert_eq!(hamiltonian(&curve, &HamiltonianSpec::default()).unwrap(), 0.0);
    let h3 = hamiltonian(&curve, &HamiltonianSpec::re_h3()).unwrap();
    assert_eq!(h3, kdv_hamiltonians(&curve).unwrap()[2].re);
    let s1 = HamiltonianSpec::new(vec![(-1, 0.5, 0.2), (3, 1.0, 0.0)]).unwrap();
    let s2 = HamiltonianSpec::new(vec![(1, -0.3, 1.0), (5, 0.7, -0.1)]).unwrap();
    let lhs = hamiltonian(&curve, &s1.add(&s2)).unwrap();
    let rhs = hamiltonian(&curve, &s1).unwrap() + hamiltonian(&curve, &s2).unwrap();
    assert!((lhs - rhs).abs() < 1e-12);
    assert!(HamiltonianSpec::<f64>::new(vec![(2, 1.0, 0.0)]).is_err());
    assert!(HamiltonianSpec::<f64>::new(vec![(-3, 1.0, 0.0)]).is_err());
}

#[test]
fn leaf_chart_properties() {
    for base in [chart_point(&boutroux_curve()).unwrap(), [1.0, 0.0, 0.0, 0.0], [0.7, 0.3, -0.2, 0.4]] {
        let chart = leaf_chart(base).unwrap();
        let jn = chart.jacobian.norm_1();
        for t in &chart.tangent {
            assert!(norm2(&chart.jacobian.mul_vec(t)) < 1e-6 * jn);
            assert!((norm2(t) - 1.0).abs() < 1e-10);
        }
        assert!(dot(&chart.tangent[0], &chart.tangent[1]).abs() < 1e-10);
        // Halving the step barely moves the tangent plane: the projection of
        // each new tangent onto the old plane keeps almost unit length.
        let fine = leaf_chart_with(base, 0.5e-5).unwrap();
        for t in &fine.tangent {
            let p = [dot(t, &chart.tangent[0]), dot(t, &chart.tangent[1])];
            let angle = norm2(&p).min(1.0).acos();
            assert!(angle < 1e-3, "angle {angle}");
        }
    }
    // Real branch points: H₋₁ is real there, yet the constraint has rank 2.
    let real = leaf_chart([1.0f64, 0.0, 0.0, 0.0]).unwrap();
    let h = kdv_hamiltonians(&chart_curve(&[1.0f64, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    assert!(h[0].im.abs() < 1e-12);
    assert!(real.singular_values.0 > 1e-6 * real.singular_values.1);
}

#[test]
fn zero_spec_has_zero_gradient() {
    let g = constrained_gradient([1.0, 0.0, 0.0, 0.0], &HamiltonianSpec::default()).unwrap();
    assert_eq!(g.raw, [0.0; 4]);
    assert_eq!(g.projected_norm, 0.0);
}

#[test]
fn critical_points_are_exactly_the_boutroux_curves() {
    let spec = HamiltonianSpec::re_h3();
    let base = boutroux_curve();
    let mut set: Vec<Curve> = (0..5)
        .map(|k| base.scaled(Cx64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0)).unwrap())
        .collect();
    let mut rng = rng(404);
    while set.len() < 12 {
        let g2 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let g3 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if let Ok(curve) = Curve::from_cubic([c(0.0, 0.0), -g2, -g3]) {
            set.push(curve);
        }
    }
    let mut criticals = 0;
    for curve in &set {
        let res = boutroux_residual(curve).unwrap();
        let boutroux = res.iter().all(|r| r.abs() < 1e-7 * period_scale(curve));
        let g = constrained_gradient_with(chart_point(curve).unwrap(), &spec, 1e-5).unwrap();
        let critical = g.projected_norm < 1e-5 * (g.raw_norm + 1e-8);
        assert_eq!(critical, boutroux, "residuals {res:?}, gradient {} / {}", g.projected_norm, g.raw_norm);
        criticals += usize::from(critical);
    }
    assert_eq!(criticals, 5);
}
