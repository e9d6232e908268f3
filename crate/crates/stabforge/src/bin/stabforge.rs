//! Command-line front end for the stabforge engines.
//!
//! Exit codes: 0 on success or a true verdict, 1 on a false verdict,
//! 2 on usage or computation errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use stabforge::classifier::{self, ClassificationInput, ClassificationReport};
use stabforge::cohomology::{cohomology, CycModule, Matrix};
use stabforge::division_order::{self, hasse_embeds, parse_script, run_script};
use stabforge::padic::PadicInt;
use stabforge::tower::{epsilon_alpha, residue_scalar, signed_digit, FieldElem, FieldTower};
use stabforge::unit_classes::{
    epsilon_report, membership, r1_max, r2_admissible, required_depth, subgroup_span, FiltrationQuotient,
    StabilizerParams,
};
use stabforge::{Error, Result};

#[derive(Parser)]
#[command(
    name = "stabforge",
    version,
    about = "Exact arithmetic in p-adic division algebras and finite subgroup classification for Morava stabilizer groups"
)]
struct Cli {
    /// Output mode.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Default precisions as `pi=N,p=N,s=N`; explicit precision flags still win.
    #[arg(long, env = "STABFORGE_PREC_OVERRIDE", global = true, value_parser = parse_override)]
    prec_override: Option<PrecOverride>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, Default)]
struct PrecOverride {
    pi: Option<u32>,
    p: Option<u32>,
    s: Option<u32>,
}

fn parse_override(s: &str) -> std::result::Result<PrecOverride, String> {
    let mut out = PrecOverride::default();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (key, val) = part.split_once('=').ok_or_else(|| format!("expected key=value, got '{part}'"))?;
        let val: u32 = val.trim().parse().map_err(|_| format!("bad precision '{val}'"))?;
        match key.trim() {
            "pi" => out.pi = Some(val),
            "p" => out.p = Some(val),
            "s" => out.s = Some(val),
            other => return Err(format!("unknown precision key '{other}' (use pi, p or s)")),
        }
    }
    Ok(out)
}

#[derive(Subcommand)]
enum Command {
    /// Maximal finite subgroups of S_n and G_n(u), abelian classes, and grid scans.
    ///
    /// Without --sn or --abelian this classifies the maximal finite subgroups of
    /// G_n(u) = D_n^×/⟨pu⟩, which depends on u modulo p² (p odd) or 8 (p = 2).
    Classify(ClassifyArgs),
    /// π-adic digits of the unit ε_α defined by (ζ_{p^α} − 1)^{φ(p^α)} = p·ε_α.
    Epsilon(FieldArgs),
    /// π-adic digit expansion of an element of Q_p(ζ_{p^α}, ζ_{p^f−1}).
    Expand(ExpandArgs),
    /// Whether a unit lies in ⟨μ∩U_1, U_1^k⟩ (or U_1^k), decided in U_1/U_N.
    Membership(MembershipArgs),
    /// Admissible and maximal r_1 = |F_1/F_0| for F_0 = C_{p^α} × C_d in D_n.
    R1(StabArgs),
    /// Admissible r_2 = |F_2/F_1| and extension counts for a given r_1.
    R2(R2Args),
    /// Power-class test of ε_α/u deciding whether F_0 extends with index r_1.
    EpsilonTest(EpsilonTestArgs),
    /// Run a relation script over the maximal order O_n (S^n = pu).
    Verify(VerifyArgs),
    /// H^0, H^odd and H^even of a cyclic group acting on a finitely generated abelian group.
    Cohomology(CohomologyArgs),
    /// Whether D_m embeds in D_n, by their Hasse invariants.
    Hasse(HasseArgs),
    /// Existence and order of the extension of T_24 × C_{2^m−1} in G_{2m}(u) at p = 2.
    Quaternionic(QuaternionicArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// The prime p.
    #[arg(long)]
    p: Option<u32>,
    /// The height n.
    #[arg(long)]
    n: Option<u32>,
    /// u modulo p² or 8, as an integer or a digit literal `p:P [d0,d1,...]`.
    #[arg(long, allow_hyphen_values = true)]
    u_mod: Option<String>,
    /// Full unit u; adds ε-test consistency checks.
    #[arg(long, allow_hyphen_values = true)]
    unit: Option<String>,
    /// Maximal finite subgroups of S_n instead of G_n(u).
    #[arg(long, conflicts_with_all = ["abelian", "scan"])]
    sn: bool,
    /// Abelian finite subgroups C_{p^α} × C_d of S_n.
    #[arg(long, conflicts_with = "scan")]
    abelian: bool,
    /// Sweep every (p, n, u) with p ≤ --max-p, n ≤ --max-n.
    #[arg(long)]
    scan: bool,
    /// Largest prime of the scan.
    #[arg(long, default_value_t = classifier::GRID_MAX_P)]
    max_p: u32,
    /// Largest height of the scan.
    #[arg(long, default_value_t = classifier::GRID_MAX_N)]
    max_n: u32,
}

#[derive(Args)]
struct FieldArgs {
    /// The prime p.
    #[arg(long)]
    p: u32,
    /// Cyclotomic level α ≥ 1 (adjoins ζ_{p^α}).
    #[arg(long)]
    alpha: u32,
    /// Residue degree of the unramified part.
    #[arg(long, default_value_t = 1)]
    f: usize,
    /// π-adic precision [default: p^α + 2].
    #[arg(long)]
    pi_prec: Option<u32>,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Element literal `pi^i * [c0,c1,...] + ...`, or `eps` for ε_α.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Args)]
struct MembershipArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Element literal, or `eps` for ε_α.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Divide x by this p-adic unit (integer or digit literal).
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Power k of U_1^k; only its p-part matters.
    #[arg(long)]
    k: u64,
    /// Leave out the roots of unity μ∩U_1.
    #[arg(long)]
    no_mu: bool,
    /// Filtration depth N [default: the closing depth for k].
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Args)]
struct StabArgs {
    /// The prime p.
    #[arg(long)]
    p: u32,
    /// The height n.
    #[arg(long)]
    n: u32,
    /// Order p^α of the p-part of F_0.
    #[arg(long)]
    alpha: u32,
    /// Order of the prime-to-p part of F_0.
    #[arg(long)]
    d: u64,
    /// The unit u (integer or digit literal).
    #[arg(long, allow_hyphen_values = true)]
    u: String,
}

#[derive(Args)]
struct R2Args {
    #[command(flatten)]
    stab: StabArgs,
    /// r_1 [default: the maximal r_1].
    #[arg(long)]
    r1: Option<u64>,
}

#[derive(Args)]
struct EpsilonTestArgs {
    #[command(flatten)]
    stab: StabArgs,
    /// The index r_1 to test.
    #[arg(long)]
    r1: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    /// Q_8 and T_24 inside O_2 at p = 2.
    Q8,
    /// The C_3 ⋊ C_16 generators inside O_4 at p = 3.
    #[value(name = "d4-p3")]
    D4P3,
}

#[derive(Args)]
struct VerifyArgs {
    /// Relation script with `params`, `name := expr` and `check lhs == rhs` lines.
    #[arg(required_unless_present = "builtin")]
    script: Option<PathBuf>,
    /// Run a script shipped with the crate.
    #[arg(long, value_enum, conflicts_with = "script")]
    builtin: Option<Builtin>,
    /// p-adic precision of coefficients [default: from the script, else 6].
    #[arg(long)]
    p_prec: Option<u32>,
    /// Confidence threshold M in powers of S [default: from the script, else 2n].
    #[arg(long)]
    s_prec: Option<u32>,
}

#[derive(Args)]
struct CohomologyArgs {
    /// Free rank a.
    #[arg(long, default_value_t = 0)]
    rank: usize,
    /// Torsion orders d1,d2,...
    #[arg(long, default_value = "", value_delimiter = ',')]
    torsion: Vec<String>,
    /// Action t: rows separated by ';' (`1,1;0,-1`) or a JSON matrix; column j is t(e_j).
    #[arg(long)]
    action: Option<String>,
    /// Order r of the cyclic group.
    #[arg(long)]
    order: u64,
}

#[derive(Args)]
struct HasseArgs {
    /// Degree of the smaller algebra D_m.
    #[arg(long)]
    m: u64,
    /// Degree of the larger algebra D_n.
    #[arg(long)]
    n: u64,
}

#[derive(Args)]
struct QuaternionicArgs {
    /// n = 2m with m odd.
    #[arg(long)]
    n: u32,
    /// The unit u (integer or digit literal).
    #[arg(long, allow_hyphen_values = true)]
    u: String,
}

/// A rendered JSON report plus the exit verdict.
struct Outcome {
    json: String,
    verdict: bool,
    table: Option<String>,
}

impl Outcome {
    fn ok<T: Serialize>(v: &T) -> Result<Outcome> {
        Ok(Outcome { json: render(v)?, verdict: true, table: None })
    }
}

/// Pretty JSON in field declaration order.
fn render<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Error {
    let msg = msg.to_string();
    let msg = msg.strip_prefix("invalid input: ").unwrap_or(&msg);
    Error::InvalidInput(format!("--{flag}: {msg}"))
}

/// Parse an integer or `p:P [d0,...]` literal into an i64 representative.
fn parse_unit(s: &str, p: u32, flag: &str) -> Result<i64> {
    let s = s.trim();
    if s.starts_with("p:") {
        let x: PadicInt = s.parse().map_err(|e| usage(flag, e))?;
        if x.prime() != p {
            return Err(usage(flag, format!("literal is {}-adic but p = {p}", x.prime())));
        }
        i64::try_from(x.signed_value()).map_err(|_| usage(flag, "value does not fit in 64 bits"))
    } else {
        s.parse().map_err(|_| usage(flag, format!("'{s}' is not an integer or digit literal")))
    }
}

fn pi_prec(field: &FieldArgs, ov: PrecOverride) -> u32 {
    field.pi_prec.or(ov.pi).unwrap_or_else(|| field.p.saturating_pow(field.alpha).saturating_add(2))
}

fn field_tower(field: &FieldArgs, prec: u32) -> Result<Arc<FieldTower>> {
    if field.alpha == 0 {
        return Err(usage("alpha", "must be at least 1"));
    }
    FieldTower::new(field.p, field.f, field.alpha, prec)
}

fn parse_elem(t: &Arc<FieldTower>, lit: &str, prec: u32) -> Result<FieldElem> {
    if lit.trim() == "eps" {
        epsilon_alpha(t, prec)
    } else {
        FieldElem::parse(t, lit, prec).map_err(|e| usage("x", e))
    }
}

/// `{digits, precision}` with signed F_p digits when f = 1, residue vectors otherwise.
fn digits_json(x: &FieldElem, n: u32) -> Result<Value> {
    let t = x.tower();
    let digits = x.pi_digits(n)?;
    let digits: Vec<Value> = if t.f() == 1 {
        digits.iter().map(|d| json!(signed_digit(residue_scalar(d), t.p()))).collect()
    } else {
        digits.iter().map(|d| json!(d)).collect()
    };
    Ok(json!({ "digits": digits, "precision": n }))
}

fn stab_params(a: &StabArgs) -> Result<StabilizerParams> {
    let params = StabilizerParams { p: a.p, n: a.n, alpha: a.alpha, d: a.d, u: parse_unit(&a.u, a.p, "u")? };
    params.validate()?;
    Ok(params)
}

fn classify(a: &ClassifyArgs) -> Result<Outcome> {
    if a.scan {
        let reports = classifier::scan(a.max_p, a.max_n)?;
        let table = reports.iter().map(report_table).collect::<Vec<_>>().join("\n");
        return Ok(Outcome { json: render(&reports)?, verdict: true, table: Some(table) });
    }
    let p = a.p.ok_or_else(|| usage("p", "required unless --scan is given"))?;
    let n = a.n.ok_or_else(|| usage("n", "required unless --scan is given"))?;
    let report = if a.sn {
        classifier::maximal_in_sn(p, n)?
    } else if a.abelian {
        classifier::abelian_classes(p, n)?
    } else {
        let unit = a.unit.as_deref().map(|s| parse_unit(s, p, "unit")).transpose()?;
        let residue = match (&a.u_mod, unit) {
            (Some(s), _) => parse_unit(s, p, "u-mod")?,
            (None, Some(u)) => u,
            (None, None) => return Err(usage("u-mod", "required for G_n(u); use --sn for S_n")),
        };
        let mut input = ClassificationInput::new(p, n, residue).map_err(|e| usage("u-mod", e))?;
        if let Some(u) = unit {
            input = input.with_unit(u).map_err(|e| usage("unit", e))?;
        }
        classifier::maximal_in_gn(&input)?
    };
    let table = report_table(&report);
    Ok(Outcome { json: render(&report)?, verdict: true, table: Some(table) })
}

fn report_table(r: &ClassificationReport) -> String {
    let mut head = format!("p={} n={}", r.input.p, r.input.n);
    if let (Some(u), Some(m)) = (r.input.u_residue, r.input.modulus) {
        head.push_str(&format!(" u≡{u} mod {m}"));
    }
    let mut rows: Vec<[String; 4]> = vec![["label".into(), "order".into(), "count".into(), "provenance".into()]];
    for c in &r.classes {
        rows.push([c.label.clone(), c.order.to_string(), c.count.to_string(), c.provenance.clone()]);
    }
    for d in &r.dropped {
        rows.push([
            d.label.clone(),
            d.order.to_string(),
            "-".into(),
            format!("dropped: inside {} ({})", d.contained_in, d.rule),
        ]);
    }
    for c in &r.abelian {
        rows.push([c.label.clone(), c.order.to_string(), "1".into(), format!("abelian alpha={} d={}", c.alpha, c.d)]);
    }
    let widths: Vec<usize> = (0..3).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = vec![head];
    for r in &rows {
        let mut line = String::new();
        for (i, w) in widths.iter().enumerate() {
            line.push_str(&format!("{}{}  ", r[i], " ".repeat(w - r[i].chars().count())));
        }
        line.push_str(&r[3]);
        out.push(line);
    }
    out.extend(r.notes.iter().map(|n| format!("note: {n}")));
    out.join("\n") + "\n"
}

fn epsilon(a: &FieldArgs, ov: PrecOverride) -> Result<Outcome> {
    let n = pi_prec(a, ov);
    let t = field_tower(a, n)?;
    let eps = epsilon_alpha(&t, n)?;
    let value = json!({
        "p": a.p,
        "alpha": a.alpha,
        "f": a.f,
        "epsilon": digits_json(&eps, n)?,
        "minus_epsilon": digits_json(&eps.neg(), n)?,
    });
    Ok(Outcome { json: render(&value)?, verdict: true, table: None })
}

fn expand(a: &ExpandArgs, ov: PrecOverride) -> Result<Outcome> {
    let n = pi_prec(&a.field, ov);
    let t = field_tower(&a.field, n)?;
    let x = parse_elem(&t, &a.x, n)?;
    Outcome::ok(&digits_json(&x, n)?)
}

fn membership_cmd(a: &MembershipArgs) -> Result<Outcome> {
    if a.k == 0 {
        return Err(usage("k", "must be positive"));
    }
    let probe = field_tower(&a.field, 1)?;
    let depth = a.depth.unwrap_or_else(|| required_depth(&probe, a.k));
    let t = field_tower(&a.field, depth.max(1))?;
    let mut x = parse_elem(&t, &a.x, depth)?;
    if let Some(u) = &a.u {
        let u = parse_unit(u, a.field.p, "u")?;
        x = x.mul(&FieldElem::from_int(&t, u).inv().map_err(|_| usage("u", "not a p-adic unit"))?);
    }
    if !x.is_unit() {
        return Err(usage("x", "not a unit"));
    }
    let q = FiltrationQuotient::new(&t, depth)?;
    let span = subgroup_span(&q, a.k, !a.no_mu)?;
    let verdict = membership(&x, &span)?;
    let value = json!({
        "p": a.field.p,
        "alpha": a.field.alpha,
        "f": a.field.f,
        "k": a.k,
        "include_mu": !a.no_mu,
        "depth": depth,
        "span_log_order": span.log_order(),
        "member": verdict,
    });
    Ok(Outcome { json: render(&value)?, verdict, table: None })
}

fn verify(a: &VerifyArgs, ov: PrecOverride) -> Result<Outcome> {
    let text = match (&a.script, a.builtin) {
        (_, Some(Builtin::Q8)) => division_order::Q8_SCRIPT.to_string(),
        (_, Some(Builtin::D4P3)) => division_order::D4_P3_SCRIPT.to_string(),
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(usage("builtin", "give a script path or --builtin")),
    };
    let mut script = parse_script(&text)?;
    if let Some(k) = a.p_prec.or(ov.p) {
        script.params = script.params.with_p_prec(k);
    }
    if let Some(m) = a.s_prec.or(ov.s) {
        script.params = script.params.with_s_prec(m);
    }
    let report = run_script(&script)?;
    let mut table = String::new();
    for c in &report.checks {
        let verdict =
            serde_json::to_value(c.verdict).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        table.push_str(&format!("{:>4}  {:<13} {}\n", c.line, verdict, c.check));
    }
    Ok(Outcome { json: render(&report)?, verdict: report.all_hold, table: Some(table) })
}

fn parse_matrix(s: &str, k: usize) -> Result<Matrix> {
    let s = s.trim();
    let rows: Vec<Vec<i64>> = if s.starts_with('[') {
        serde_json::from_str(s).map_err(|e| usage("action", e))?
    } else {
        s.split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| usage("action", format!("bad entry '{x}'"))))
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(usage("action", format!("expected a {k}x{k} matrix")));
    }
    Matrix::from_rows(&rows)
}

fn cohomology_cmd(a: &CohomologyArgs) -> Result<Outcome> {
    let torsion: Vec<u64> = a
        .torsion
        .iter()
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| usage("torsion", format!("bad order '{t}'"))))
        .collect::<Result<_>>()?;
    let k = a.rank + torsion.len();
    let action = match &a.action {
        Some(s) => parse_matrix(s, k)?,
        None => Matrix::identity(k),
    };
    let module = CycModule::new(a.rank, &torsion, action, a.order)?;
    let report = cohomology(&module);
    let table = format!("H^0     {}\nH^odd   {}\nH^even  {}\n", report.h0, report.h_odd, report.h_even);
    Ok(Outcome { json: render(&report)?, verdict: true, table: Some(table) })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let ov = cli.prec_override.unwrap_or_default();
    match &cli.command {
        Command::Classify(a) => classify(a),
        Command::Epsilon(a) => epsilon(a, ov),
        Command::Expand(a) => expand(a, ov),
        Command::Membership(a) => membership_cmd(a),
        Command::R1(a) => {
            let params = stab_params(a)?;
            Outcome::ok(&json!({ "params": params, "r1": r1_max(params)? }))
        }
        Command::R2(a) => {
            let params = stab_params(&a.stab)?;
            let r1 = match a.r1 {
                Some(r) => r,
                None => r1_max(params)?.maximal,
            };
            Outcome::ok(&json!({ "params": params, "r1": r1, "r2": r2_admissible(params, r1)? }))
        }
        Command::EpsilonTest(a) => {
            let report = epsilon_report(stab_params(&a.stab)?, a.r1)?;
            Ok(Outcome { json: render(&report)?, verdict: report.holds, table: None })
        }
        Command::Verify(a) => verify(a, ov),
        Command::Cohomology(a) => cohomology_cmd(a),
        Command::Hasse(a) => {
            let embeds = hasse_embeds(a.m, a.n);
            Ok(Outcome {
                json: render(&json!({ "m": a.m, "n": a.n, "embeds": embeds }))?,
                verdict: embeds,
                table: None,
            })
        }
        Command::Quaternionic(a) => {
            let u = parse_unit(&a.u, 2, "u")?;
            Outcome::ok(&classifier::quaternionic_extension(2, a.n, u)?)
        }
    }
}

/// `key  value` lines for reports without a dedicated table.
fn flat_table(v: &Value) -> String {
    match v {
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}  {v}\n")).collect(),
        other => format!("{other}\n"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => out.json.clone() + "\n",
                Format::Table => out
                    .table
                    .clone()
                    .unwrap_or_else(|| flat_table(&serde_json::from_str(&out.json).expect("rendered JSON reparses"))),
            };
            print!("{text}");
            if out.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
