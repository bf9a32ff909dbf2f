//! Subcommand implementations. Each returns an [`Outcome`] or a
//! [`CliError`]; the caller wraps either into a report.

use std::path::{Path, PathBuf};

use conealg::approx::{cone_approximate, cylinder_approximate};
use conealg::bezout::{bezout_solve, BezoutError, BezoutOptions, ZPolyFamily};
use conealg::expr::{parse, Expr};
use conealg::fourier::{
    default_tolerance, fourier_table, max_cutoff, membership_cone, membership_cone_from_table,
    membership_cylinder, membership_disk_from_table, CoefficientTable,
};
use conealg::gelfand::{symbolic_transform, ConePoint, ConeResolution, ConeTransform, GelfandError};
use conealg::grid::{sup_norm, GridError, SampledCylinderFunction, SampledDiskFunction};
use conealg::peaks::{build_peak, verify_peak, PeakConstruction, PeakError, PeakSpec, Profile};
use conealg::stable_rank::{
    cone_bsr_witness, cylinder_bsr_witness, tsr_perturb, Conclusion, Spectrum, WitnessError, WitnessParams,
    WitnessReport, CONE_F, CONE_G, CYLINDER_F, CYLINDER_G,
};
use conealg::winding::{invertible_cone_with, Invertibility, WindingError};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{Algebra, Command, FunctionArg, PeakKind, ProfileKind, WitnessKind};
use crate::config::{RunConfig, FORMAT_VERSION};
use crate::render;
use crate::report::{CliError, Outcome, Verdict};

/// Points of a witness curve kept in the JSON report.
pub const CURVE_PREVIEW_POINTS: usize = 256;
/// Membership tolerance applied to emitted polynomials.
pub const EMITTED_POLY_TOL: f64 = 1e-12;
pub const CONE_BUDGET: f64 = 10.0;
pub const CYLINDER_BUDGET: f64 = 4.0;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn outcome(verdict: Verdict, result: Value) -> Outcome {
    Outcome {
        verdict,
        result,
        error: None,
        artifacts: Vec::new(),
    }
}

pub fn parse_expr(flag: &str, src: &str) -> Result<Expr, CliError> {
    parse(src).map_err(|e| CliError {
        kind: "parse".into(),
        message: format!("{flag}: {e}"),
        offset: Some(e.offset),
    })
}

pub fn parse_complex(flag: &str, src: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::new("usage", format!("{flag}: expected RE,IM, got '{src}'"));
    let (re, im) = src.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(bad())
    }
}

fn sample_disk(expr: &Expr, origin: Option<Complex64>, config: &RunConfig) -> Result<SampledDiskFunction, CliError> {
    SampledDiskFunction::try_sample(&config.polar_grid(), origin, |z| expr.eval(z, 0.0)).map_err(|e| match e {
        GridError::Evaluation { z, .. } if z == Complex64::new(0.0, 0.0) && origin.is_none() => CliError::new(
            "numerical",
            format!("{e}; supply the value at the origin with --origin RE,IM"),
        ),
        other => CliError::numerical(other),
    })
}

fn function_arg(arg: &FunctionArg) -> Result<(Expr, Option<Complex64>), CliError> {
    let expr = parse_expr("--f", &arg.f)?;
    let origin = arg.origin.as_deref().map(|s| parse_complex("--origin", s)).transpose()?;
    Ok((expr, origin))
}

fn gelfand_error(e: GelfandError) -> CliError {
    match e {
        GelfandError::NotMember(report) => CliError::new(
            "not-member",
            format!("not in the cone algebra: defect {:e} at mode {}", report.defect, report.worst_mode),
        ),
        GelfandError::OutsideCone { .. } | GelfandError::TipWithNonzeroW { .. } => CliError::new("usage", e.to_string()),
        other => CliError::numerical(other),
    }
}

/// The flags of a command, echoed into its report.
pub fn input_json(cmd: &Command) -> Value {
    match cmd {
        Command::Membership { f, algebra, csv } => json!({
            "f": f.f, "origin": f.origin, "algebra": algebra_name(*algebra), "csv": csv,
        }),
        Command::Gelfand { f, w, t } => json!({ "f": f.f, "origin": f.origin, "w": w, "t": t }),
        Command::Invert { f, tol } => json!({ "f": f.f, "origin": f.origin, "tol": tol }),
        Command::Approx { f, eps, cylinder, poly } => json!({
            "f": f.f, "origin": f.origin, "eps": eps, "cylinder": cylinder, "poly": poly,
        }),
        Command::Bezout { f, g } => json!({ "f": f, "g": g }),
        Command::Witness { kind, p, q, cylinder, margin, max_tries, csv } => json!({
            "kind": witness_name(*kind), "p": p, "q": q, "cylinder": cylinder,
            "margin": margin, "max_tries": max_tries, "csv": csv,
        }),
        Command::Peak { a, kind, profile, exclusion } => json!({
            "a": a, "kind": peak_name(*kind), "profile": profile_name(*profile), "exclusion": exclusion,
        }),
        Command::Render { input, out, csv } => json!({ "input": input, "out": out, "csv": csv }),
    }
}

fn algebra_name(a: Algebra) -> &'static str {
    match a {
        Algebra::Cone => "cone",
        Algebra::Disk => "disk",
        Algebra::Cylinder => "cylinder",
    }
}

fn witness_name(k: WitnessKind) -> &'static str {
    match k {
        WitnessKind::ConeBsr => "cone-bsr",
        WitnessKind::CylBsr => "cyl-bsr",
        WitnessKind::Tsr => "tsr",
    }
}

fn peak_name(k: PeakKind) -> &'static str {
    match k {
        PeakKind::Exp => "exp",
        PeakKind::Origin => "origin",
        PeakKind::Quotient => "quotient",
    }
}

fn profile_name(p: ProfileKind) -> &'static str {
    match p {
        ProfileKind::Tent => "tent",
        ProfileKind::Zero => "zero",
    }
}

pub fn run(cmd: &Command, config: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Membership { f, algebra, csv } => membership(f, *algebra, csv.as_deref(), config),
        Command::Gelfand { f, w, t } => gelfand(f, w, *t, config),
        Command::Invert { f, tol } => invert(f, *tol, config),
        Command::Approx { f, eps, cylinder, poly } => approx(f, *eps, *cylinder, poly.as_deref(), config),
        Command::Bezout { f, g } => bezout(f, g, config),
        Command::Witness { kind, p, q, cylinder, margin, max_tries, csv } => match kind {
            WitnessKind::Tsr => tsr(p.as_deref(), q.as_deref(), *cylinder, *margin, *max_tries, config),
            _ => bsr(*kind, p.as_deref(), q.as_deref(), csv.as_deref(), config),
        },
        Command::Peak { a, kind, profile, exclusion } => peak(a, *kind, *profile, *exclusion, config),
        Command::Render { input, out, csv } => render_report(input, out, csv.as_deref()),
    }
}

/// Coefficient table of the disk function, or of the worst cylinder slice.
struct MembershipRun {
    result: Value,
    verdict: bool,
    table: CoefficientTable,
}

fn membership_run(f: &FunctionArg, algebra: Algebra, config: &RunConfig) -> Result<MembershipRun, CliError> {
    let (expr, origin) = function_arg(f)?;
    let grid = config.polar_grid();
    let n_max = max_cutoff(grid.num_angles());
    match algebra {
        Algebra::Cone | Algebra::Disk => {
            let sampled = sample_disk(&expr, origin, config)?;
            let table = fourier_table(&sampled, n_max).map_err(CliError::numerical)?;
            let sup = sup_norm(&sampled);
            let tol = config.membership_tol.unwrap_or_else(|| default_tolerance(sup));
            let report = if algebra == Algebra::Cone {
                membership_cone_from_table(&table, tol)
            } else {
                membership_disk_from_table(&table, tol)
            };
            Ok(MembershipRun {
                verdict: report.verdict,
                result: json!({
                    "algebra": algebra_name(algebra),
                    "verdict": report.verdict,
                    "defect": report.defect,
                    "tolerance": report.tolerance,
                    "worst_mode": report.worst_mode,
                    "worst_radius_index": report.worst_radius,
                    "worst_radius": grid.radii()[report.worst_radius],
                    "sup_norm": sup,
                }),
                table,
            })
        }
        Algebra::Cylinder => {
            let cyl = config.cylinder_grid();
            let sampled = SampledCylinderFunction::try_sample(&cyl, |z, t| expr.eval(z, t))
                .map_err(CliError::numerical)?;
            let (report, l) = membership_cylinder(&sampled, config.membership_tol).map_err(CliError::numerical)?;
            let table = fourier_table(sampled.slice(l), n_max).map_err(CliError::numerical)?;
            Ok(MembershipRun {
                verdict: report.verdict,
                result: json!({
                    "algebra": "cylinder",
                    "verdict": report.verdict,
                    "defect": report.defect,
                    "tolerance": report.tolerance,
                    "worst_mode": report.worst_mode,
                    "worst_radius_index": report.worst_radius,
                    "worst_radius": grid.radii()[report.worst_radius],
                    "worst_t_index": l,
                    "worst_t": cyl.t_samples()[l],
                    "sup_norm": sampled.sup_norm(),
                }),
                table,
            })
        }
    }
}

fn membership(f: &FunctionArg, algebra: Algebra, csv: Option<&Path>, config: &RunConfig) -> Result<Outcome, CliError> {
    let run = membership_run(f, algebra, config)?;
    let verdict = if run.verdict { Verdict::Affirmative } else { Verdict::Negative };
    let mut out = outcome(verdict, run.result);
    if let Some(path) = csv {
        out.artifacts.push((path.to_path_buf(), run.table.to_csv()));
    }
    Ok(out)
}

fn gelfand(f: &FunctionArg, w: &str, t: f64, config: &RunConfig) -> Result<Outcome, CliError> {
    let (expr, origin) = function_arg(f)?;
    let w = parse_complex("--w", w)?;
    let point = ConePoint::new(w, t).map_err(gelfand_error)?;
    let sampled = sample_disk(&expr, origin, config)?;
    let transform = ConeTransform::new(&sampled).map_err(gelfand_error)?;
    let evaluation = transform.eval(&point).map_err(gelfand_error)?;
    let poisson = if point.t > 0.0 && !point.on_outer_surface() {
        transform.poisson_eval(&point).ok()
    } else {
        None
    };
    let closed_form = symbolic_transform(&expr, &point, origin).ok();
    Ok(outcome(
        Verdict::Affirmative,
        json!({
            "point": point,
            "value": evaluation.value,
            "method": evaluation.method,
            "series_tail_bound": evaluation.series_tail_bound,
            "interpolation_error": evaluation.interpolation_error,
            "poisson_value": poisson,
            "closed_form": closed_form,
            "closed_form_difference": closed_form.map(|c| (c - evaluation.value).norm()),
        }),
    ))
}

fn invert(f: &FunctionArg, tol: Option<f64>, config: &RunConfig) -> Result<Outcome, CliError> {
    let (expr, origin) = function_arg(f)?;
    let sampled = sample_disk(&expr, origin, config)?;
    let cert = invertible_cone_with(&sampled, tol, config.winding_residue).map_err(|e| match e {
        WindingError::NotMember(report) => CliError::new(
            "not-member",
            format!("not in the cone algebra: defect {:e} at mode {}", report.defect, report.worst_mode),
        ),
        other => CliError::numerical(other),
    })?;
    let result = to_value(&cert);
    Ok(match cert.status {
        Invertibility::Invertible => outcome(Verdict::Affirmative, result),
        Invertibility::NotInvertible => outcome(Verdict::Negative, result),
        Invertibility::Inconclusive => Outcome {
            error: Some(CliError::new(
                "inconclusive",
                format!(
                    "grid minimum {:e} lies within ten times the tolerance {:e}, or a winding number could not be computed",
                    cert.min_modulus, cert.tolerance
                ),
            )),
            ..outcome(Verdict::Error, result)
        },
    })
}

fn approx(
    f: &FunctionArg,
    eps: f64,
    cylinder: bool,
    poly_path: Option<&Path>,
    config: &RunConfig,
) -> Result<Outcome, CliError> {
    let (expr, origin) = function_arg(f)?;
    let (result, within, poly_json) = if cylinder {
        let cyl = config.cylinder_grid();
        let sampled =
            SampledCylinderFunction::try_sample(&cyl, |z, t| expr.eval(z, t)).map_err(CliError::numerical)?;
        let (poly, report) = cylinder_approximate(&sampled, eps).map_err(CliError::numerical)?;
        let emitted = poly.sample(&cyl).map_err(CliError::numerical)?;
        let (member, _) = membership_cylinder(&emitted, Some(EMITTED_POLY_TOL)).map_err(CliError::numerical)?;
        let budget = CYLINDER_BUDGET * eps;
        let within = report.achieved_error <= budget && member.verdict;
        let result = json!({
            "algebra": "cylinder",
            "report": report,
            "budget": budget,
            "poly_membership": member,
        });
        (result, within, to_value(&poly))
    } else {
        let sampled = sample_disk(&expr, origin, config)?;
        let (poly, report) = cone_approximate(&sampled, eps).map_err(CliError::numerical)?;
        let emitted = poly.sample(&config.polar_grid()).map_err(CliError::numerical)?;
        let member = membership_cone(&emitted, Some(EMITTED_POLY_TOL)).map_err(CliError::numerical)?;
        let budget = CONE_BUDGET * eps;
        let within = report.achieved_error <= budget && member.verdict;
        let result = json!({
            "algebra": "cone",
            "report": report,
            "budget": budget,
            "poly_membership": member,
        });
        (result, within, to_value(&poly))
    };
    let mut out = outcome(if within { Verdict::Affirmative } else { Verdict::Negative }, result);
    if let Some(path) = poly_path {
        let mut text = serde_json::to_string_pretty(&poly_json).expect("polynomials serialize");
        text.push('\n');
        out.artifacts.push((path.to_path_buf(), text));
    }
    Ok(out)
}

fn bezout(f: &str, g: &str, config: &RunConfig) -> Result<Outcome, CliError> {
    let family = |flag: &str, src: &str| {
        ZPolyFamily::from_expr(parse_expr(flag, src)?).map_err(|e| CliError::new("usage", format!("{flag}: {e}")))
    };
    let (f, g) = (family("--f", f)?, family("--g", g)?);
    let cert = bezout_solve(&f, &g, &config.cylinder_grid(), config.bezout_tol, &BezoutOptions::default())
        .map_err(|e| match e {
            BezoutError::NotCoprime { .. } => CliError::new("not-coprime", e.to_string()),
            other => CliError::numerical(other),
        })?;
    let mut result = to_value(&cert);
    if let Value::Object(map) = &mut result {
        map.remove("slices");
    }
    let verdict = if cert.valid { Verdict::Affirmative } else { Verdict::Negative };
    Ok(outcome(verdict, result))
}

fn witness_params(config: &RunConfig) -> WitnessParams {
    WitnessParams {
        grid: config.polar_grid(),
        cone_resolution: ConeResolution {
            disk_steps: config.disk_steps,
        },
        t_steps: config.t_steps,
        curve_samples: config.curve_samples,
        residue_limit: config.winding_residue,
    }
}

/// Evenly spaced `(Re w, Im w)` pairs of the curve.
fn curve_preview(curve: &[Complex64]) -> Vec<[f64; 2]> {
    let step = curve.len().div_ceil(CURVE_PREVIEW_POINTS).max(1);
    curve.iter().step_by(step).map(|w| [w.re, w.im]).collect()
}

fn witness_value(report: &WitnessReport) -> Value {
    let mut v = to_value(report);
    if let Value::Object(map) = &mut v {
        map.remove("curve");
        map.remove("restricted_map");
        map.insert("curve_points".into(), json!(report.curve.len()));
        map.insert("curve_preview".into(), json!(curve_preview(&report.curve)));
    }
    v
}

fn bsr(kind: WitnessKind, p: Option<&str>, q: Option<&str>, csv: Option<&Path>, config: &RunConfig) -> Result<Outcome, CliError> {
    let (fixed_p, fixed_q) = match kind {
        WitnessKind::ConeBsr => (CONE_F, CONE_G),
        _ => (CYLINDER_F, CYLINDER_G),
    };
    for (flag, given, fixed) in [("--p", p, fixed_p), ("--q", q, fixed_q)] {
        if let Some(src) = given {
            let given = parse_expr(flag, src)?;
            let fixed = parse_expr(flag, fixed)?;
            if given != fixed {
                return Err(CliError::new(
                    "usage",
                    format!("{flag}: the {} witness uses the pair ({fixed_p}, {fixed_q})", witness_name(kind)),
                ));
            }
        }
    }
    let params = witness_params(config);
    let report = match kind {
        WitnessKind::ConeBsr => cone_bsr_witness(&params),
        _ => cylinder_bsr_witness(&params),
    }
    .map_err(CliError::numerical)?;
    let verdict = match report.conclusion {
        Conclusion::ObstructionFound => Verdict::Affirmative,
        Conclusion::Inconclusive => Verdict::Negative,
    };
    let mut out = outcome(verdict, witness_value(&report));
    if let Some(path) = csv {
        out.artifacts.push((path.to_path_buf(), report.curve_csv()));
    }
    Ok(out)
}

fn tsr(p: Option<&str>, q: Option<&str>, cylinder: bool, margin: f64, max_tries: u32, config: &RunConfig) -> Result<Outcome, CliError> {
    let require = |flag: &str, v: Option<&str>| {
        v.ok_or_else(|| CliError::new("usage", format!("witness tsr requires {flag} EXPR")))
            .and_then(|src| parse_expr(flag, src))
    };
    let (p, q) = (require("--p", p)?, require("--q", q)?);
    if !(margin.is_finite() && margin > 0.0) {
        return Err(CliError::new("usage", format!("--margin must be positive, got {margin}")));
    }
    let spectrum = if cylinder {
        Spectrum::Cylinder {
            grid: config.cylinder_grid(),
        }
    } else {
        Spectrum::Cone {
            grid: config.polar_grid(),
            resolution: ConeResolution {
                disk_steps: config.disk_steps,
            },
        }
    };
    match tsr_perturb(&p, &q, &spectrum, margin, max_tries, config.rng_seed) {
        Ok(cert) => Ok(outcome(
            Verdict::Affirmative,
            json!({ "spectrum": if cylinder { "cylinder" } else { "cone" }, "certificate": cert }),
        )),
        Err(WitnessError::TriesExhausted {
            tries,
            best_margin,
            margin,
        }) => Ok(outcome(
            Verdict::Negative,
            json!({
                "spectrum": if cylinder { "cylinder" } else { "cone" },
                "tries": tries,
                "best_margin": best_margin,
                "requested_margin": margin,
            }),
        )),
        Err(WitnessError::Gelfand(e)) => Err(gelfand_error(e)),
        Err(e) => Err(CliError::numerical(e)),
    }
}

fn peak(a: &str, kind: PeakKind, profile: ProfileKind, exclusion: f64, config: &RunConfig) -> Result<Outcome, CliError> {
    let a = parse_complex("--a", a)?;
    let construction = match kind {
        PeakKind::Exp => PeakConstruction::Exp,
        PeakKind::Origin => PeakConstruction::Origin,
        PeakKind::Quotient => PeakConstruction::Quotient,
    };
    let profile = match profile {
        ProfileKind::Tent => Profile::Tent,
        ProfileKind::Zero => Profile::Zero,
    };
    let usage = |e: PeakError| CliError::new("usage", e.to_string());
    let function = build_peak(PeakSpec { a, construction, profile }).map_err(usage)?;
    let grid = config.polar_grid();
    let sampled = function.sample(&grid).map_err(CliError::numerical)?;
    let member = membership_cone(&sampled, config.membership_tol).map_err(CliError::numerical)?;
    match verify_peak(|z| function.eval(z), &grid, a, exclusion) {
        Ok(report) => {
            let verdict = if member.verdict { Verdict::Affirmative } else { Verdict::Negative };
            Ok(outcome(
                verdict,
                json!({ "function": function, "peak": report, "membership": member }),
            ))
        }
        Err(PeakError::Violation {
            point,
            modulus,
            peak_modulus,
        }) => Ok(outcome(
            Verdict::Negative,
            json!({
                "function": function,
                "violation": { "point": point, "modulus": modulus, "peak_modulus": peak_modulus },
                "membership": member,
            }),
        )),
        Err(e) => Err(usage(e)),
    }
}

fn schema_error(message: impl Into<String>) -> CliError {
    CliError::new("schema", message)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key)
        .filter(|x| !x.is_null())
        .ok_or_else(|| schema_error(format!("report has no '{key}'")))
}

fn render_report(input: &Path, out: &Path, csv: Option<&Path>) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(format!("{}: {e}", input.display())))?;
    if text.trim().is_empty() {
        return Err(schema_error("empty report"));
    }
    let report: Value = serde_json::from_str(&text).map_err(|e| schema_error(format!("not a JSON report: {e}")))?;
    match report.get("schema_version").and_then(Value::as_str) {
        Some(FORMAT_VERSION) => {}
        Some(other) => return Err(schema_error(format!("unknown schema version '{other}'"))),
        None => return Err(schema_error("report has no schema_version")),
    }
    let command = field(&report, "command")?.as_str().unwrap_or_default();
    let result = field(&report, "result")?;
    let report_input = field(&report, "input")?;
    let (figure, svg, data) = match command {
        "witness" => {
            let kind = field(report_input, "kind")?.as_str().unwrap_or_default();
            let preview: Vec<[f64; 2]> = serde_json::from_value(field(result, "curve_preview")?.clone())
                .map_err(|e| schema_error(format!("bad curve_preview: {e}")))?;
            let pts: Vec<(f64, f64)> = preview.iter().map(|p| (p[0], p[1])).collect();
            let mut data = String::from("x,t\n");
            for (x, t) in &pts {
                data.push_str(&format!("{x:.16e},{t:.16e}\n"));
            }
            match kind {
                "cone-bsr" => ("cone", render::cone_svg(&pts), data),
                "cyl-bsr" => ("cylinder", render::cylinder_svg(&pts), data),
                other => return Err(schema_error(format!("no figure for witness kind '{other}'"))),
            }
        }
        "membership" => {
            let config: RunConfig = serde_json::from_value(field(&report, "config")?.clone())
                .map_err(|e| schema_error(format!("bad config: {e}")))?;
            config.validate().map_err(|e| schema_error(e.to_string()))?;
            let algebra = match field(report_input, "algebra")?.as_str() {
                Some("cone") => Algebra::Cone,
                Some("disk") => Algebra::Disk,
                Some("cylinder") => Algebra::Cylinder,
                _ => return Err(schema_error("unknown algebra")),
            };
            let f = FunctionArg {
                f: field(report_input, "f")?.as_str().unwrap_or_default().to_string(),
                origin: report_input.get("origin").and_then(Value::as_str).map(str::to_string),
            };
            let run = membership_run(&f, algebra, &config)?;
            let n = run.table.n_max() as i64;
            let modes: Vec<(i64, f64)> = (-n..=n)
                .map(|m| (m, run.table.mode(m).iter().map(|c| c.norm()).fold(0.0, f64::max)))
                .collect();
            let title = format!("Fourier coefficients of {}", f.f);
            ("coefficient-decay", render::decay_svg(&title, &modes), run.table.to_csv())
        }
        other => return Err(schema_error(format!("no figure for reports of command '{other}'"))),
    };
    let mut artifacts = vec![(PathBuf::from(out), svg)];
    if let Some(path) = csv {
        artifacts.push((path.to_path_buf(), data));
    }
    Ok(Outcome {
        verdict: Verdict::Affirmative,
        result: json!({ "figure": figure, "source_command": command }),
        error: None,
        artifacts,
    })
}
