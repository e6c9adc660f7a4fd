use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};
use spanprod_core::kappa::{self, AdmissibleDegreeSet, KappaQuery};
use spanprod_core::product::{self, certify_pair, kneser_survey, optimal_pair};
use spanprod_core::search::{self, GroupSpec, MuOptions, MuResult};
use spanprod_core::{field, ExtensionField, FieldSpec, Subspace};

use crate::report::RunReport;
use crate::{Cli, Command, DegreeArgs, FieldArgs, Format, SearchArgs, Status};

pub struct Outcome {
    pub report: RunReport,
    pub text: String,
    pub diagnostics: Vec<String>,
    pub status: Status,
}

type CmdResult = Result<Outcome, String>;

pub fn run(cli: &Cli) -> CmdResult {
    let started = Instant::now();
    let mut out = match &cli.command {
        Command::Kappa { r, s, degrees } => kappa_cmd(*r, *s, degrees),
        Command::KappaTable { n, degrees } => kappa_table(*n, degrees.as_deref(), cli.format),
        Command::MuField {
            field,
            r,
            s,
            mode,
            prune,
        } => mu_field(field, *r, *s, mode, *prune),
        Command::Construct { field, r, s } => construct(field, *r, *s),
        Command::Stabilizer { field, subspace } => stabilizer(field, subspace),
        Command::VerifyKneser {
            field,
            r,
            s,
            pairs,
            seed,
            workers,
        } => verify_kneser(field, *r, *s, *pairs, *seed, *workers),
        Command::MuGroup {
            group,
            group_file,
            r,
            s,
            mode,
        } => mu_group(group.as_deref(), group_file.as_deref(), *r, *s, mode),
    }?;
    out.report.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn outcome(
    params: Value,
    results: Value,
    seed: Option<u64>,
    text: String,
    status: Status,
) -> CmdResult {
    Ok(Outcome {
        report: RunReport::new(params, results, seed),
        text,
        diagnostics: Vec::new(),
        status,
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The given seed, or a fresh one when running interactively. CI runs must
/// be reproducible, so an implicit seed is refused there.
fn resolve_seed(seed: Option<u64>) -> Result<(u64, Option<String>), String> {
    match seed {
        Some(s) => Ok((s, None)),
        None if std::env::var_os("CI").is_some() => {
            Err("--seed is required when CI is set".to_string())
        }
        None => {
            let s: u64 = rand::random();
            Ok((s, Some(format!("using seed {s}"))))
        }
    }
}

fn load_field(args: &FieldArgs) -> Result<Arc<ExtensionField>, String> {
    let spec: FieldSpec = args.field.parse().map_err(err)?;
    let f = match &args.modulus {
        None => ExtensionField::from_spec(spec),
        Some(m) => {
            let coeffs = field::parse_coefficients(m).map_err(err)?;
            if coeffs.len() != spec.n + 1 {
                return Err(format!(
                    "modulus must have degree {} (got {} coefficients)",
                    spec.n,
                    coeffs.len()
                ));
            }
            ExtensionField::with_modulus(spec.p, coeffs)
        }
    };
    f.map(Arc::new).map_err(err)
}

fn field_params(f: &ExtensionField) -> Value {
    json!({ "field": f.spec().to_string(), "modulus": f.modulus() })
}

fn rows(v: &Subspace) -> Value {
    json!(v.basis().iter().map(|e| e.coeffs()).collect::<Vec<_>>())
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn degree_set(args: &DegreeArgs) -> Result<AdmissibleDegreeSet, String> {
    match (&args.n, &args.degrees) {
        (Some(n), _) => kappa::divisors(*n).map_err(err),
        (None, Some(d)) => AdmissibleDegreeSet::new(0, d.clone()).map_err(err),
        (None, None) => Err("one of --n or --degrees is required".into()),
    }
}

fn kappa_cmd(r: u64, s: u64, args: &DegreeArgs) -> CmdResult {
    let degrees = degree_set(args)?;
    let q = KappaQuery::new(r, s, degrees.clone()).map_err(err)?;
    let res = kappa::kappa(&q).map_err(err)?;
    let breakdown = kappa::kappa_breakdown(&q).map_err(err)?;

    let mut text = format!(
        "kappa({r}, {s}) = {}\nh0 = {} (r0 = {}, s0 = {})\n",
        res.value, res.h0, res.r0, res.s0
    );
    text.push_str("h f_h\n");
    for (h, f) in &breakdown {
        writeln!(text, "{h} {f}").unwrap();
    }
    outcome(
        json!({ "r": r, "s": s, "n": degrees.n(), "degrees": degrees.degrees() }),
        json!({
            "value": res.value,
            "h0": res.h0,
            "r0": res.r0,
            "s0": res.s0,
            "breakdown": breakdown.iter().map(|(h, f)| json!({ "h": h, "f_h": f })).collect::<Vec<_>>(),
        }),
        None,
        text,
        Status::Ok,
    )
}

fn kappa_table(n: u64, degrees: Option<&[u64]>, format: Format) -> CmdResult {
    let set = match degrees {
        None => kappa::divisors(n).map_err(err)?,
        Some(d) => AdmissibleDegreeSet::new(n, d.to_vec()).map_err(err)?,
    };
    if n == 0 {
        return Err("n must be positive".into());
    }
    let table = kappa::kappa_table(n, &set).map_err(err)?;
    let text = match format {
        Format::Csv => table
            .iter()
            .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(",") + "\n")
            .collect(),
        _ => format_table(&table, n),
    };
    outcome(
        json!({ "n": n, "degrees": set.degrees() }),
        json!({ "table": table }),
        None,
        text,
        Status::Ok,
    )
}

/// Rows of space-separated entries, each right-aligned to the width of `n`.
pub fn format_table(table: &[Vec<u64>], n: u64) -> String {
    let w = n.to_string().len();
    let mut out = String::new();
    for row in table {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>w$}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

fn search_options(mode: &SearchArgs, prune: bool) -> MuOptions {
    MuOptions {
        budget: mode.budget,
        workers: mode.workers,
        canonicalize: !mode.no_canonical,
        prune_at_kappa: prune,
    }
}

fn search_params(mode: &SearchArgs) -> Value {
    json!({
        "exhaustive": mode.exhaustive,
        "trials": mode.trials,
        "workers": mode.workers,
        "budget": mode.budget,
        "canonical": !mode.no_canonical,
    })
}

fn status_of<W>(res: &MuResult<W>, mode: &SearchArgs) -> (Status, Vec<String>) {
    if mode.exhaustive && !res.exhaustive {
        let msg = format!(
            "budget of {} pairs exhausted; value is only an upper bound",
            mode.budget
        );
        (Status::Budget, vec![msg])
    } else {
        (Status::Ok, Vec::new())
    }
}

fn mu_field(args: &FieldArgs, r: usize, s: usize, mode: &SearchArgs, prune: bool) -> CmdResult {
    let f = load_field(args)?;
    let mut diagnostics = Vec::new();
    let (res, seed) = match mode.trials {
        Some(trials) => {
            let (seed, note) = resolve_seed(mode.seed)?;
            diagnostics.extend(note);
            (
                search::mu_randomized(&f, r, s, trials, seed, mode.workers).map_err(err)?,
                Some(seed),
            )
        }
        None => (
            search::mu_exact(&f, r, s, &search_options(mode, prune)).map_err(err)?,
            None,
        ),
    };
    let k = kappa::kappa_of(
        r as u64,
        s as u64,
        &kappa::divisors(f.n() as u64).map_err(err)?,
    )
    .map_err(err)?;
    let (status, notes) = status_of(&res, mode);
    diagnostics.extend(notes);

    let bound = if res.exhaustive {
        "exact"
    } else {
        "upper bound"
    };
    let text = format!(
        "mu({r}, {s}) = {} ({bound})\nkappa = {}\nA:\n{}B:\n{}",
        res.value,
        k.value,
        indent(&res.witness_a.to_text()),
        indent(&res.witness_b.to_text()),
    );
    let mut params = field_params(&f);
    params["r"] = json!(r);
    params["s"] = json!(s);
    params["search"] = search_params(mode);
    params["prune"] = json!(prune);
    let mut out = outcome(
        params,
        json!({
            "value": res.value,
            "exhaustive": res.exhaustive,
            "kappa": k.value,
            "witness_a": rows(&res.witness_a),
            "witness_b": rows(&res.witness_b),
        }),
        seed,
        text,
        status,
    )?;
    out.diagnostics = diagnostics;
    Ok(out)
}

fn construct(args: &FieldArgs, r: usize, s: usize) -> CmdResult {
    let f = load_field(args)?;
    let pair = optimal_pair(&f, r, s).map_err(err)?;
    let cert = certify_pair(&pair.a, &pair.b).map_err(err)?;
    let status = if cert.optimal {
        Status::Ok
    } else {
        Status::Violation
    };

    let text = format!(
        "dim<AB> = {}\nkappa = {} (h0 = {})\nstabilizer dim = {}\nlower bound = {}\nkneser slack = {}\noptimal = {}\nA:\n{}B:\n{}",
        cert.dim_ab,
        cert.kappa,
        pair.certificate.h0,
        cert.stabilizer_dim,
        cert.lower_bound,
        cert.kneser.slack,
        cert.optimal,
        indent(&pair.a.to_text()),
        indent(&pair.b.to_text()),
    );
    let mut params = field_params(&f);
    params["r"] = json!(r);
    params["s"] = json!(s);
    let mut out = outcome(
        params,
        json!({
            "dim_ab": cert.dim_ab,
            "kappa": pair.certificate,
            "slack": cert.kneser.slack,
            "certificate": cert,
            "witness_a": rows(&pair.a),
            "witness_b": rows(&pair.b),
        }),
        None,
        text,
        status,
    )?;
    if !cert.optimal {
        out.diagnostics
            .push("construction failed its optimality certificate".into());
    }
    Ok(out)
}

fn stabilizer(args: &FieldArgs, path: &Path) -> CmdResult {
    let f = load_field(args)?;
    let body = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let v = Subspace::from_text(&f, &body).map_err(|e| format!("{}: {e}", path.display()))?;
    let rep = product::stabilizer(&v).map_err(err)?;
    let status = if rep.is_subfield_verified {
        Status::Ok
    } else {
        Status::Violation
    };

    let text = format!(
        "dim V = {}\ng = {}\nsubfield verified = {}\nH:\n{}",
        v.dim(),
        rep.g,
        rep.is_subfield_verified,
        indent(&rep.h.to_text()),
    );
    let mut params = field_params(&f);
    params["subspace"] = rows(&v);
    let mut out = outcome(
        params,
        json!({ "g": rep.g, "h": rows(&rep.h), "is_subfield_verified": rep.is_subfield_verified }),
        None,
        text,
        status,
    )?;
    if !rep.is_subfield_verified {
        out.diagnostics
            .push("stabilizer failed subfield verification".into());
    }
    Ok(out)
}

fn verify_kneser(
    args: &FieldArgs,
    r: Option<usize>,
    s: Option<usize>,
    pairs: u64,
    seed: Option<u64>,
    workers: usize,
) -> CmdResult {
    let f = load_field(args)?;
    let (seed, note) = resolve_seed(seed)?;
    let survey = kneser_survey(&f, r, s, pairs, seed, workers).map_err(err)?;
    let failed = survey.violations > 0 || survey.stabilizer_failures > 0;

    let mut text = format!(
        "pairs = {}\nviolations = {}\nstabilizer failures = {}\nslack count\n",
        survey.pairs, survey.violations, survey.stabilizer_failures
    );
    for (slack, count) in &survey.slack_histogram {
        writeln!(text, "{slack} {count}").unwrap();
    }
    let mut params = field_params(&f);
    params["r"] = json!(r);
    params["s"] = json!(s);
    params["pairs"] = json!(pairs);
    params["workers"] = json!(workers);
    let mut out = outcome(
        params,
        serde_json::to_value(&survey).map_err(err)?,
        Some(seed),
        text,
        if failed {
            Status::Violation
        } else {
            Status::Ok
        },
    )?;
    out.diagnostics.extend(note);
    if let Some(i) = survey.first_failure {
        out.diagnostics
            .push(format!("Kneser check failed first at pair {i}"));
    }
    Ok(out)
}

fn load_group(name: Option<&str>, file: Option<&Path>) -> Result<(GroupSpec, String), String> {
    match (name, file) {
        (Some(name), _) => Ok((search::builtin_group(name).map_err(err)?, name.to_string())),
        (None, Some(path)) => {
            let body =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let g = GroupSpec::from_json(&body).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok((g, path.display().to_string()))
        }
        (None, None) => Err("one of --group or --group-file is required".into()),
    }
}

fn mu_group(
    name: Option<&str>,
    file: Option<&Path>,
    r: usize,
    s: usize,
    mode: &SearchArgs,
) -> CmdResult {
    let (g, label) = load_group(name, file)?;
    let k = search::kappa_group(r, s, &g).map_err(err)?;
    let mut diagnostics = Vec::new();
    let (res, seed) = match mode.trials {
        Some(trials) => {
            let (seed, note) = resolve_seed(mode.seed)?;
            diagnostics.extend(note);
            (
                search::mu_group_randomized(&g, r, s, trials, seed, mode.workers).map_err(err)?,
                Some(seed),
            )
        }
        None => (
            search::mu_group_exact(&g, r, s, &search_options(mode, false)).map_err(err)?,
            None,
        ),
    };
    let (status, notes) = status_of(&res, mode);
    diagnostics.extend(notes);

    let bound = if res.exhaustive {
        "exact"
    } else {
        "upper bound"
    };
    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let text = format!(
        "mu_G({r}, {s}) = {} ({bound})\nkappa_G = {} (h0 = {})\nA = {}\nB = {}\n",
        res.value,
        k.value,
        k.h0,
        list(&res.witness_a),
        list(&res.witness_b),
    );
    let mut out = outcome(
        json!({
            "group": label,
            "order": g.order(),
            "subgroup_orders": g.subgroup_orders(),
            "r": r,
            "s": s,
            "search": search_params(mode),
        }),
        json!({
            "value": res.value,
            "exhaustive": res.exhaustive,
            "kappa_g": k,
            "witness_a": res.witness_a,
            "witness_b": res.witness_b,
        }),
        seed,
        text,
        status,
    )?;
    out.diagnostics = diagnostics;
    Ok(out)
}
