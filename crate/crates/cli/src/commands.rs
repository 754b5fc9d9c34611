use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::Serialize;
use serde_json::{json, Value};

use ncrealize::freecore::{extract_coefficient, FreeFunction, FreeSeries, Word};
use ncrealize::funcalc::{fit_measure_from_moments, taylor_coefficients, HermitianCalculus, IntegralForm, ScalarFunction};
use ncrealize::io::{self, AnyRealization, MatrixJson, MeasureFile, PointFile, RealizationFile, ReportFile, SeriesFile};
use ncrealize::ncexpr::{expand, parse, ExprFunction};
use ncrealize::ordertest::{
    check_convex, check_monotone, geometric_mean_evaluator, parse_domain_kind, parse_levels, recheck,
    schur_complement_evaluator, DomainSpec,
};
use ncrealize::realize::{
    build_butterfly_realization, build_monotone_realization, convex_gram, eval_butterfly, eval_monotone,
    localizing_matrices, pick_check, psd_check, random_tube_point, tube_bound_check,
};
use ncrealize::sample::stream_rng;
use ncrealize::wedge::{continuation_radius, estimate_lagrange_constants, homogeneous_parts};
use ncrealize::Error;

use crate::args::{CheckArgs, Cli, Command, FunctionArgs, GlobalArgs, MeasureForm, RealKind};
use crate::{CliError, Outcome};

type Res<T> = Result<T, CliError>;

/// Per-run state: hashes of every input read, for the manifest.
struct Ctx<'a> {
    global: &'a GlobalArgs,
    inputs: Mutex<BTreeMap<String, String>>,
}

impl<'a> Ctx<'a> {
    fn read(&self, path: &str) -> Res<String> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io { path: path.into(), msg: e.to_string() })?;
        self.inputs.lock().expect("input log").insert(path.to_string(), io::sha256_hex(&bytes));
        String::from_utf8(bytes).map_err(|_| CliError::Io { path: path.into(), msg: "not UTF-8".into() })
    }

    fn read_json<S: serde::de::DeserializeOwned>(&self, path: &str) -> Res<S> {
        let text = self.read(path)?;
        io::from_json(&text).map_err(|e| CliError::Io { path: path.into(), msg: e.to_string() })
    }

    fn series(&self, path: &str) -> Res<FreeSeries<f64>> {
        let file: SeriesFile = self.read_json(path)?;
        file.to_series().map_err(|e| CliError::Io { path: path.into(), msg: e.to_string() })
    }

    fn seed(&self) -> Res<u64> {
        self.global.seed.ok_or_else(|| CliError::Usage("--seed is required for sampling commands".into()))
    }

    fn tol(&self, default: f64) -> Res<f64> {
        let t = self.global.tol.unwrap_or(default);
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be a nonnegative number, got {t}")));
        }
        Ok(t)
    }

    fn manifest(&self, command: &str, args: &impl Serialize) -> Value {
        json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": {
                "global": serde_json::to_value(self.global).expect("config encodes"),
                "args": serde_json::to_value(args).expect("config encodes"),
            },
            "seed": self.global.seed,
            "inputs": self.inputs.lock().expect("input log").clone(),
        })
    }

    fn emit(&self, path: Option<&str>, value: &impl Serialize) -> Res<()> {
        let text = io::to_json(value);
        match path.or(self.global.out.as_deref()) {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io { path: p.into(), msg: e.to_string() }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

pub fn dispatch(cli: &Cli) -> Res<Outcome> {
    let ctx = Ctx { global: &cli.global, inputs: Mutex::new(BTreeMap::new()) };
    match &cli.command {
        Command::Expand(a) => {
            let ast = parse(&a.expr)?;
            let s = expand::<f64>(&ast, a.letters, a.degree)?;
            ctx.emit(None, &SeriesFile::from_series(&s))?;
            Ok(Outcome::Success)
        }
        Command::Coeffs(a) => {
            let f = build_function(&ctx, &a.source)?;
            let mut s = FreeSeries::zero(f.letters(), a.degree, f.output_dim());
            for w in Word::enumerate(f.letters(), 0, a.degree) {
                let c = extract_coefficient(&*f, &w)?;
                s.insert(w, c)?;
            }
            s.prune(ctx.tol(1e-12)?);
            ctx.emit(None, &SeriesFile::from_series(&s))?;
            Ok(Outcome::Success)
        }
        Command::CheckMonotone(a) => order_test(&ctx, "check-monotone", a),
        Command::CheckConvex(a) => order_test(&ctx, "check-convex", a),
        Command::Localize(a) => {
            let s = ctx.series(&a.series)?;
            let tol = ctx.tol(1e-10)?;
            let grams = match a.kind {
                RealKind::Monotone => localizing_matrices(&s, a.basis_degree)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, g)| (Some(i + 1), g))
                    .collect::<Vec<_>>(),
                RealKind::Butterfly => vec![(None, convex_gram(&s, a.basis_degree)?)],
            };
            let mut all = true;
            let entries: Vec<Value> = grams
                .iter()
                .map(|(letter, g)| {
                    let (ok, min) = psd_check(g, tol);
                    all &= ok;
                    json!({ "letter": letter, "size": g.len(), "min_eig": min, "psd": ok })
                })
                .collect();
            let out = json!({
                "kind": a.kind,
                "m": a.basis_degree,
                "psd": all,
                "matrices": entries,
                "manifest": ctx.manifest("localize", a),
            });
            ctx.emit(None, &out)?;
            Ok(if all { Outcome::Success } else { Outcome::Failure })
        }
        Command::Realize(a) => {
            let s = ctx.series(&a.series)?;
            let hash = io::series_hash(&s);
            let built = match a.kind {
                RealKind::Monotone => build_monotone_realization(&s, a.basis_degree)
                    .map(|r| RealizationFile::from_monotone(&r, hash)),
                RealKind::Butterfly => build_butterfly_realization(&s, a.basis_degree)
                    .map(|r| RealizationFile::from_butterfly(&r, hash)),
            };
            match built {
                Ok(file) => {
                    ctx.emit(None, &file)?;
                    Ok(Outcome::Success)
                }
                Err(e @ Error::NotPsd { .. }) => {
                    eprintln!("certificate failed: {e}");
                    Ok(Outcome::Failure)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::EvalRealization(a) => {
            let file: RealizationFile = ctx.read_json(&a.realization)?;
            let r = file.decode::<f64>()?;
            let point: PointFile = ctx.read_json(&a.point)?;
            let z = point.to_tuple::<f64>()?;
            let value = match &r {
                AnyRealization::Monotone(m) => eval_monotone(m, &z)?,
                AnyRealization::Butterfly(b) => eval_butterfly(b, &z)?,
            };
            ctx.emit(None, &json!({ "value": MatrixJson::from_matrix(&value) }))?;
            Ok(Outcome::Success)
        }
        Command::PickCheck(a) => {
            let seed = ctx.seed()?;
            let tol = ctx.tol(1e-8)?;
            let file: RealizationFile = ctx.read_json(&a.realization)?;
            let (passed, body) = match file.decode::<f64>()? {
                AnyRealization::Monotone(m) => {
                    let worst = pick_check(&m, a.samples, a.max_level, seed)?;
                    (worst >= -tol, json!({ "test": "pick", "min_eig": worst }))
                }
                AnyRealization::Butterfly(b) => {
                    let mut worst_ratio = 0.0f64;
                    let mut held = true;
                    for t in 0..a.samples {
                        let mut rng = stream_rng(seed, t as u64);
                        let n = 1 + t % a.max_level.max(1);
                        let (z, eps) = random_tube_point(&b, &mut rng, n);
                        let tb = tube_bound_check(&b, &z, eps)?;
                        held &= tb.holds();
                        worst_ratio = worst_ratio.max(tb.value_norm / tb.bound);
                    }
                    (held, json!({ "test": "tube", "max_ratio": worst_ratio }))
                }
            };
            let mut out = body;
            out["passed"] = json!(passed);
            out["samples"] = json!(a.samples);
            out["seed"] = json!(seed);
            out["tol"] = json!(tol);
            out["manifest"] = ctx.manifest("pick-check", a);
            ctx.emit(None, &out)?;
            Ok(if passed { Outcome::Success } else { Outcome::Failure })
        }
        Command::FitMeasure(a) => {
            let s = ctx.series(&a.series)?;
            let c = taylor_coefficients(&s)?;
            let (a0, b, skip) = match a.form {
                MeasureForm::Nevanlinna => (c[0], None, 1),
                MeasureForm::Kraus => {
                    let b = *c.get(1).ok_or(Error::InsufficientDegree { needed: 1, have: 0 })?;
                    (c[0], Some(b), 2)
                }
            };
            let moments = c.get(skip..).unwrap_or(&[]);
            let mu = fit_measure_from_moments(moments, a.atoms)?.reflect();
            ctx.emit(None, &MeasureFile::from_measure(a0, b, &mu))?;
            Ok(Outcome::Success)
        }
        Command::WedgeRadius(a) => {
            let seed = ctx.seed()?;
            let s = ctx.series(&a.series)?;
            let mut bundle = homogeneous_parts(&s);
            bundle.estimate_bounds(a.samples, &a.sizes, seed)?;
            let fit = continuation_radius(&bundle, a.target)?;
            let out = json!({
                "delta": if fit.unconstrained() { Value::Null } else { json!(fit.delta) },
                "unconstrained": fit.unconstrained(),
                "K": fit.k,
                "C": fit.c,
                "bounds": bundle.bounds,
                "samples": bundle.samples,
                "diagnostic": fit.diagnostic,
                "manifest": ctx.manifest("wedge-radius", a),
            });
            ctx.emit(None, &out)?;
            Ok(Outcome::Success)
        }
        Command::EstimateWedgeConstants(a) => {
            let seed = ctx.seed()?;
            let est = estimate_lagrange_constants(a.vars, a.measure, a.dmax, a.trials, seed)?;
            let records: Vec<Value> = est
                .records
                .iter()
                .map(|r| json!({ "trial": r.trial, "degree": r.degree, "set_measure": r.set_measure, "ratio": r.ratio }))
                .collect();
            let out = json!({
                "K": est.k_hat,
                "C": est.c_hat,
                "note": est.note,
                "records": records,
                "manifest": ctx.manifest("estimate-wedge-constants", a),
            });
            ctx.emit(None, &out)?;
            Ok(Outcome::Success)
        }
    }
}

fn build_function(ctx: &Ctx<'_>, src: &FunctionArgs) -> Res<Box<dyn FreeFunction<f64>>> {
    let given = [src.expr.is_some(), src.series.is_some(), src.function.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return Err(CliError::Usage("give exactly one of --expr, --series, --function".into()));
    }
    if let Some(text) = &src.expr {
        let ast = parse(text)?;
        let letters = src.letters.unwrap_or_else(|| ast.max_var().max(1));
        return Ok(Box::new(ExprFunction::new(ast, letters)?));
    }
    if let Some(path) = &src.series {
        return Ok(Box::new(ctx.series(path)?));
    }
    let name = src.function.as_deref().expect("one source given");
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let scalar = |f: ScalarFunction<f64>| -> Res<Box<dyn FreeFunction<f64>>> { Ok(Box::new(HermitianCalculus::new(f))) };
    match (head, arg) {
        ("sqrt1p", None) => scalar(ScalarFunction::Sqrt1p),
        ("log1p", None) => scalar(ScalarFunction::Log1p),
        ("geom", None) => scalar(ScalarFunction::Geom),
        ("exp", None) => scalar(ScalarFunction::Exp),
        ("power", Some(p)) => {
            let p: f64 = p.parse().map_err(|_| CliError::Usage(format!("bad exponent in '{name}'")))?;
            scalar(ScalarFunction::Power(p))
        }
        ("schur", None) => Ok(Box::new(schur_complement_evaluator())),
        ("geomean", None) => Ok(Box::new(geometric_mean_evaluator())),
        ("nevanlinna", Some(path)) => {
            let m: MeasureFile = ctx.read_json(path)?;
            Ok(Box::new(IntegralForm::nevanlinna(m.a, m.to_measure()?)))
        }
        ("kraus", Some(path)) => {
            let m: MeasureFile = ctx.read_json(path)?;
            let b = m.b.ok_or_else(|| CliError::Usage(format!("{path}: kraus form needs a numeric \"b\"")))?;
            Ok(Box::new(IntegralForm::kraus(m.a, b, m.to_measure()?)))
        }
        _ => Err(CliError::Usage(format!(
            "unknown function '{name}' (use sqrt1p, log1p, geom, exp, power:p, schur, geomean, nevanlinna:FILE, kraus:FILE)"
        ))),
    }
}

fn order_test(ctx: &Ctx<'_>, command: &str, a: &CheckArgs) -> Res<Outcome> {
    if let Some(path) = &a.recheck {
        return recheck_report(ctx, path, a.report.as_deref());
    }
    let seed = ctx.seed()?;
    let tol = ctx.tol(1e-8)?;
    let f = build_function(ctx, &a.source)?;
    let (lo, hi) = parse_levels(&a.levels)?;
    let dom = DomainSpec::new(parse_domain_kind(&a.domain)?, lo, hi)?;
    let report = if command == "check-convex" {
        check_convex(&*f, &dom, a.samples, tol, seed)?
    } else {
        check_monotone(&*f, &dom, a.samples, tol, seed)?
    };
    let file = ReportFile::from_report(&report, ctx.manifest(command, a));
    ctx.emit(a.report.as_deref(), &file)?;
    if let Some(w) = &report.witness {
        eprintln!("{command}: fail ({} witness at level {}, min_eig {:e})", w.kind, w.level, w.min_eig);
    }
    Ok(if report.passed() { Outcome::Success } else { Outcome::Failure })
}

/// Rebuilds the function from the stored manifest and re-validates the witness.
fn recheck_report(ctx: &Ctx<'_>, path: &str, out: Option<&str>) -> Res<Outcome> {
    let file: ReportFile = ctx.read_json(path)?;
    let bad = |msg: &str| CliError::Io { path: path.into(), msg: msg.into() };
    let args = file.manifest.pointer("/config/args").ok_or_else(|| bad("report manifest has no config"))?;
    let stored: CheckArgs = serde_json::from_value(args.clone()).map_err(|e| bad(&e.to_string()))?;
    let f = build_function(ctx, &stored.source)?;
    let report = file.to_report::<f64>()?;
    let result = recheck(&*f, &report)?;
    let (reproduced, body) = match result {
        None => (true, json!({ "witness": false, "reproduced": Value::Null })),
        Some(r) => (
            r.reproduced,
            json!({ "witness": true, "reproduced": r.reproduced, "min_eig": r.min_eig, "threshold": r.threshold }),
        ),
    };
    let mut body = body;
    body["report"] = json!(path);
    ctx.emit(out, &body)?;
    Ok(if reproduced { Outcome::Success } else { Outcome::Failure })
}
