//! One handler per subcommand. Each returns the text to emit.

use rayon::prelude::*;
use rncurves_core::crit::{
    boutroux_residual_with, convention_scan_in, period_scale, solve_boutroux_with, Family, ScanEntry, H_TARGET,
};
use rncurves_core::rnd::{build_real_normalized_with, PrincipalPartSpec};
use rncurves_core::series::qde_coefficients_of;
use rncurves_core::{Curve, Cx64};
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::output::{cx, cx_list, fmt_float, num, obj, opt_num, render};
use crate::suites::{self, SuiteParams, SuiteReport};
use crate::Failure;

/// Where a curve comes from on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Coeffs(Vec<Cx64>),
    Roots(Vec<Cx64>),
    Family { family: Family, g2: f64, g3: f64 },
}

impl CurveSource {
    pub fn build(&self) -> Result<Curve, Failure> {
        Ok(match self {
            CurveSource::Coeffs(c) => Curve::from_coeffs(c)?,
            CurveSource::Roots(r) => Curve::from_roots(r)?,
            CurveSource::Family { family, g2, g3 } => family.curve(*g2, *g3)?,
        })
    }
}

/// Branch points ordered by real part, then imaginary part.
pub fn sorted_roots(curve: &Curve) -> Vec<Cx64> {
    let mut roots = curve.roots().to_vec();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

pub fn curve_json(curve: &Curve) -> Value {
    obj([
        ("curve", obj([("genus", Value::from(curve.genus())), ("degree", Value::from(2 * curve.genus() + 1))])),
        ("roots", cx_list(&sorted_roots(curve))),
        ("coeffs", cx_list(curve.coeffs())),
        ("discriminant", cx(curve.discriminant())),
        ("conj_symmetric", Value::Bool(curve.is_conj_symmetric())),
    ])
}

pub fn curve_info(source: &CurveSource) -> Result<String, Failure> {
    Ok(render(&curve_json(&source.build()?)))
}

/// KdV Hamiltonians of the real-normalized quasimomentum in both
/// conventions, with its cycle periods.
pub fn kdv(source: &CurveSource, cfg: &RunConfig) -> Result<String, Failure> {
    let curve = source.build()?;
    let g = curve.genus();
    let dq = build_real_normalized_with(&curve, &PrincipalPartSpec::quasimomentum(g), &cfg.quad())?;
    let s = qde_coefficients_of(&curve, &dq.differential, cfg.order)?;
    let qde2_h = s.h.iter().map(|(j, v)| (j.to_string(), cx(*v))).collect::<serde_json::Map<_, _>>();
    let values = &dq.periods.values;
    let v = obj([
        ("H", obj([("m1", cx(s.kdv[0])), ("p1", cx(s.kdv[1])), ("p3", cx(s.kdv[2]))])),
        ("T1", cx(s.t[1])),
        ("qde2", obj([("T", cx_list(&s.t)), ("H", Value::Object(qde2_h))])),
        ("im_H", Value::Array(s.kdv.iter().map(|h| num(h.im)).collect())),
        (
            "periods",
            obj([
                ("A", cx_list(&values[..g])),
                ("B", cx_list(&values[g..])),
                ("max_abs_imag", num(dq.periods.max_abs_imag())),
                ("condition", num(dq.condition)),
            ]),
        ),
        ("order", Value::from(s.order)),
    ]);
    Ok(render(&v))
}

/// Arguments of `boutroux` and `sweep`.
#[derive(Debug, Clone, Copy)]
pub struct FamilyArgs {
    pub family: Family,
    pub g2: f64,
    pub bracket: Option<(f64, f64)>,
}

impl FamilyArgs {
    fn bracket(&self, cfg: &RunConfig) -> (f64, f64) {
        self.bracket.unwrap_or_else(|| cfg.bracket(self.family, self.g2))
    }
}

pub fn boutroux(args: FamilyArgs, cfg: &RunConfig) -> Result<String, Failure> {
    let r = solve_boutroux_with(args.family, args.g2, args.bracket(cfg), &cfg.crit())?;
    let v = obj([
        ("family", Value::String(r.family.tag().into())),
        ("g2", num(r.g2)),
        ("g3", num(r.g3)),
        ("residuals", Value::Array(r.residuals.iter().map(|&x| num(x)).collect())),
        ("ratio", num(r.ratio)),
        ("implied_h", opt_num(r.implied_h)),
        ("iterations", Value::from(r.iterations)),
    ]);
    Ok(render(&v))
}

pub fn scan_json(entries: &[ScanEntry<f64>]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| {
                obj([
                    ("family", Value::String(e.family.tag().into())),
                    ("status", Value::String(e.status.label().into())),
                    ("ratio", opt_num(e.ratio)),
                    ("implied_h", opt_num(e.implied_h)),
                    ("h_error", opt_num(e.h_error)),
                ])
            })
            .collect(),
    )
}

/// Every family over its configured bracket, ranked against the reference `h`.
pub fn boutroux_scan(g2: f64, cfg: &RunConfig) -> Result<String, Failure> {
    if !(g2 > 0.0 && g2.is_finite()) {
        return Err(Failure::Input(format!("g2 must be positive, got {g2}")));
    }
    let entries = convention_scan_in(g2, H_TARGET, &cfg.crit(), |f| cfg.bracket(f, g2));
    Ok(render(&scan_json(&entries)))
}

pub fn verify(name: &str, params: SuiteParams, cfg: &RunConfig) -> Result<SuiteReport, Failure> {
    suites::run(name, params, cfg)
}

/// One sampled point of a `g₃` sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub g3: f64,
    pub residuals: Option<[f64; 2]>,
    pub period_scale: f64,
    pub conj_symmetric: bool,
    pub real_roots: bool,
    pub status: String,
}

/// Boutroux residuals on `points` equally spaced `g₃` values. Points are
/// evaluated in parallel and reported in grid order.
pub fn sweep_rows(args: FamilyArgs, points: usize, cfg: &RunConfig) -> Result<Vec<SweepRow>, Failure> {
    if points < 2 {
        return Err(Failure::Input("a sweep needs at least 2 points".into()));
    }
    if !(args.g2.is_finite()) {
        return Err(Failure::Input("g2 must be finite".into()));
    }
    let (lo, hi) = args.bracket(cfg);
    let quad = cfg.quad();
    Ok((0..points)
        .into_par_iter()
        .map(|i| {
            let g3 = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            match args.family.curve(args.g2, g3) {
                Err(e) => SweepRow {
                    g3,
                    residuals: None,
                    period_scale: f64::NAN,
                    conj_symmetric: false,
                    real_roots: false,
                    status: e.to_string(),
                },
                Ok(curve) => {
                    let r = boutroux_residual_with(&curve, &quad);
                    SweepRow {
                        g3,
                        residuals: r.as_ref().ok().copied(),
                        period_scale: period_scale(&curve),
                        conj_symmetric: curve.is_conj_symmetric(),
                        real_roots: curve.has_real_roots(),
                        status: r.err().map_or_else(|| "ok".to_string(), |e| e.to_string()),
                    }
                }
            }
        })
        .collect())
}

pub fn sweep(args: FamilyArgs, points: usize, format: Format, cfg: &RunConfig) -> Result<String, Failure> {
    let rows = sweep_rows(args, points, cfg)?;
    let r = |row: &SweepRow, k: usize| row.residuals.map_or(f64::NAN, |r| r[k]);
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("family,g2,g3,r_A,r_B,period_scale,conj_symmetric,real_roots,status\n");
            for row in &rows {
                let cells = [
                    args.family.tag().to_string(),
                    fmt_float(args.g2),
                    fmt_float(row.g3),
                    fmt_float(r(row, 0)),
                    fmt_float(r(row, 1)),
                    fmt_float(row.period_scale),
                    row.conj_symmetric.to_string(),
                    row.real_roots.to_string(),
                    row.status.replace([',', '\n'], ";"),
                ];
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => render(&Value::Array(
            rows.iter()
                .map(|row| {
                    obj([
                        ("family", Value::String(args.family.tag().into())),
                        ("g2", num(args.g2)),
                        ("g3", num(row.g3)),
                        ("residuals", Value::Array(vec![num(r(row, 0)), num(r(row, 1))])),
                        ("period_scale", num(row.period_scale)),
                        ("conj_symmetric", Value::Bool(row.conj_symmetric)),
                        ("real_roots", Value::Bool(row.real_roots)),
                        ("status", Value::String(row.status.clone())),
                    ])
                })
                .collect(),
        )),
    })
}
