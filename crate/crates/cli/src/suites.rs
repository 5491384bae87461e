//! Verification experiments run by `rncurves verify`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rncurves_core::crit::{
    boutroux_residual_with, chart_point, constrained_gradient_with, solve_boutroux_with, Family, HamiltonianSpec,
};
use rncurves_core::hill::{band_edges, make_potential, mean_u_prime_sq, pn_integrals, quasimomentum_fit};
use rncurves_core::rnd::{build_real_normalized_with, PrincipalPartSpec};
use rncurves_core::series::qde_coefficients_of;
use rncurves_core::{Curve, Cx64};
use serde_json::Value;

use crate::config::RunConfig;
use crate::output::{num, obj};
use crate::Failure;

/// Relative agreement required between the series, quadrature and fit routes.
pub const TRIPLE_TOL: f64 = 1e-5;
/// Looser agreement for `H₃` from the asymptotic fit.
pub const TRIPLE_FIT_H3_TOL: f64 = 1e-4;
/// Bound on the imaginary parts of the series triple.
pub const IMAG_TOL: f64 = 1e-10;
/// Projected over raw gradient at a Boutroux curve must stay below this.
pub const CRITICAL_TOL: f64 = 1e-5;
/// Projected over raw gradient at the reference curve must exceed this.
pub const NON_CRITICAL_MIN: f64 = 1e-3;
/// Absolute floor added to the raw gradient norm.
pub const GRADIENT_FLOOR: f64 = 1e-8;
/// Residual floor, relative to the curve scale, on three-real-root curves.
pub const OBSTRUCTION_MIN: f64 = 1e-3;
/// Sample count of the randomized obstruction checks.
pub const OBSTRUCTION_SAMPLES: usize = 20;

pub const SUITES: [&str; 3] = ["triple-consistency", "gradient", "obstruction"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Below,
    Above,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::Below }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::Above }
    }

    pub fn pass(&self) -> bool {
        match self.relation {
            Relation::Below => self.value < self.threshold,
            Relation::Above => self.value > self.threshold,
        }
    }

    pub fn line(&self) -> String {
        let op = match self.relation {
            Relation::Below => "<",
            Relation::Above => ">",
        };
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        format!("{verdict} {}: {:.6e} {op} {:.1e}", self.name, self.value, self.threshold)
    }

    fn json(&self) -> Value {
        let relation = match self.relation {
            Relation::Below => "below",
            Relation::Above => "above",
        };
        obj([
            ("name", Value::String(self.name.clone())),
            ("value", num(self.value)),
            ("threshold", num(self.threshold)),
            ("relation", Value::String(relation.into())),
            ("pass", Value::Bool(self.pass())),
        ])
    }
}

/// Outcome of one suite: informational lines, checks and a JSON record.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub notes: Vec<String>,
    pub details: Value,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass()).count()
    }

    pub fn text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> Value {
        obj([
            ("suite", Value::String(self.suite.clone())),
            ("pass", Value::Bool(self.failed() == 0)),
            ("checks", Value::Array(self.checks.iter().map(Check::json).collect())),
            ("details", self.details.clone()),
        ])
    }
}

/// Parameters a suite may read.
#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub family: Option<Family>,
}

pub fn run(name: &str, params: SuiteParams, cfg: &RunConfig) -> Result<SuiteReport, Failure> {
    match name {
        "triple-consistency" => triple_consistency(params.g2.unwrap_or(4.0), params.g3.unwrap_or(0.5), cfg),
        "gradient" => {
            gradient(params.family.unwrap_or(Family::WeierstrassPlusG2), params.g2.unwrap_or(1.0), cfg)
        }
        "obstruction" => obstruction(cfg),
        other => Err(Failure::Input(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `(H₋₁, H₁, H₃)` by Floquet-measured band edges, the real-normalized
/// quasimomentum series, direct density averages and the asymptotic fit.
pub fn triple_consistency(g2: f64, g3: f64, cfg: &RunConfig) -> Result<SuiteReport, Failure> {
    let p = make_potential(g2, g3)?;
    let direct = pn_integrals(&p)?;
    let fit = quasimomentum_fit(&p)?.kdv;
    let floquet = band_edges(&p)?;
    let curve = floquet.curve()?;
    let dq = build_real_normalized_with(&curve, &PrincipalPartSpec::quasimomentum(1), &cfg.quad())?;
    let series = qde_coefficients_of(&curve, &dq.differential, cfg.order)?.kdv;
    let series_re = series.map(|h| h.re);
    let names = ["H-1", "H1", "H3"];
    let fmt = |v: &[f64; 3]| format!("({:.16e}, {:.16e}, {:.16e})", v[0], v[1], v[2]);
    let notes = vec![
        format!("band edges: {:?}", floquet.edges),
        format!("direct quadrature: {}", fmt(&direct)),
        format!("quasimomentum fit: {}", fmt(&fit)),
        format!("series of dQ:      {}", fmt(&series_re)),
    ];
    let mut checks = Vec::new();
    for k in 0..3 {
        let fit_tol = if k == 2 { TRIPLE_FIT_H3_TOL } else { TRIPLE_TOL };
        checks.push(Check::below(format!("series vs direct {}", names[k]), rel(series_re[k], direct[k]), TRIPLE_TOL));
        checks.push(Check::below(format!("fit vs direct {}", names[k]), rel(fit[k], direct[k]), fit_tol));
        checks.push(Check::below(format!("series vs fit {}", names[k]), rel(series_re[k], fit[k]), fit_tol));
        checks.push(Check::below(format!("imaginary part {}", names[k]), series[k].im.abs(), IMAG_TOL));
    }
    let triple = |v: [f64; 3]| Value::Array(v.iter().map(|&x| num(x)).collect());
    let details = obj([
        ("g2", num(g2)),
        ("g3", num(g3)),
        ("edges", Value::Array(floquet.edges.iter().map(|&e| num(e)).collect())),
        ("direct", triple(direct)),
        ("fit", triple(fit)),
        ("series", triple(series_re)),
    ]);
    Ok(SuiteReport { suite: "triple-consistency".into(), notes, details, checks })
}

/// Projected gradient of `Re H₃` on the `H₋₁` leaf at the Boutroux curve of
/// `family` and at the reference curve `Y² = E³ − E`.
pub fn gradient(family: Family, g2: f64, cfg: &RunConfig) -> Result<SuiteReport, Failure> {
    let opts = cfg.crit();
    let solved = solve_boutroux_with(family, g2, cfg.bracket(family, g2), &opts)?;
    let spec = HamiltonianSpec::re_h3();
    let at = |base: [f64; 4]| constrained_gradient_with(base, &spec, cfg.fd_step);
    let critical = at(chart_point(&solved.curve)?)?;
    let reference = at([1.0, 0.0, 0.0, 0.0])?;
    let ratio_c = critical.projected_norm / (critical.raw_norm + GRADIENT_FLOOR);
    let ratio_r = reference.projected_norm / reference.raw_norm;
    let notes = vec![
        format!("Boutroux curve ({family}, g2 = {g2}): g3 = {:.16e}", solved.g3),
        format!(
            "  projected {:.6e}, raw {:.6e}, ratio {:.6e}",
            critical.projected_norm, critical.raw_norm, ratio_c
        ),
        "reference curve E^3 - E:".to_string(),
        format!(
            "  projected {:.6e}, raw {:.6e}, ratio {:.6e}",
            reference.projected_norm, reference.raw_norm, ratio_r
        ),
    ];
    let checks = vec![
        Check::below("critical at the Boutroux curve", ratio_c, CRITICAL_TOL),
        Check::above("not critical at E^3 - E", ratio_r, NON_CRITICAL_MIN),
    ];
    let side = |g: &rncurves_core::crit::ConstrainedGradient<f64>| {
        obj([("projected_norm", num(g.projected_norm)), ("raw_norm", num(g.raw_norm))])
    };
    let details = obj([
        ("family", Value::String(family.tag().into())),
        ("g2", num(g2)),
        ("g3", num(solved.g3)),
        ("boutroux", side(&critical)),
        ("reference", side(&reference)),
    ]);
    Ok(SuiteReport { suite: "gradient".into(), notes, details, checks })
}

/// Random curve with three real branch points at least 0.1 apart.
pub fn random_real_curve(rng: &mut ChaCha8Rng) -> Curve {
    loop {
        let mut r: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        r.sort_by(f64::total_cmp);
        if r[1] - r[0] > 0.1 && r[2] - r[1] > 0.1 {
            let roots: Vec<Cx64> = r.iter().map(|&x| Cx64::new(x, 0.0)).collect();
            if let Ok(curve) = Curve::from_roots(&roots) {
                return curve;
            }
        }
    }
}

/// Random `(g₂, g₃)` with three real turning points at least 0.2 apart.
pub fn random_invariants(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let mut e: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        e.push(-e[0] - e[1]);
        e.sort_by(|a, b| b.total_cmp(a));
        if e[0] - e[1] > 0.2 && e[1] - e[2] > 0.2 {
            return (-4.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]), 4.0 * e[0] * e[1] * e[2]);
        }
    }
}

/// Boutroux residuals stay away from zero on real-branch-point curves and
/// the mean of `u′²` is positive on smooth periodic potentials.
pub fn obstruction(cfg: &RunConfig) -> Result<SuiteReport, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_residual = f64::INFINITY;
    for _ in 0..OBSTRUCTION_SAMPLES {
        let curve = random_real_curve(&mut rng);
        let r = boutroux_residual_with(&curve, &cfg.quad())?;
        worst_residual = worst_residual.min(r[0].abs().max(r[1].abs()) / curve.scale());
    }
    let mut worst_slope = f64::INFINITY;
    for _ in 0..OBSTRUCTION_SAMPLES {
        let (g2, g3) = random_invariants(&mut rng);
        worst_slope = worst_slope.min(mean_u_prime_sq(&make_potential(g2, g3)?));
    }
    let notes = vec![format!("seed {}, {OBSTRUCTION_SAMPLES} curves and {OBSTRUCTION_SAMPLES} potentials", cfg.seed)];
    let checks = vec![
        Check::above("min over curves of max|residual| / scale", worst_residual, OBSTRUCTION_MIN),
        Check::above("min over potentials of mean u'^2", worst_slope, 0.0),
    ];
    let details = obj([
        ("seed", Value::from(cfg.seed)),
        ("min_residual_over_scale", num(worst_residual)),
        ("min_mean_u_prime_sq", num(worst_slope)),
    ]);
    Ok(SuiteReport { suite: "obstruction".into(), notes, details, checks })
}
