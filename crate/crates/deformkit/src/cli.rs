//! Command-line front end. Exit codes: 0 pass or constructed, 1 mathematical
//! failure, 2 input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cechnerve::{cech_cohomology, Layer};
use crate::descent::io::{self, DatumFile, Term, TsFile};
use crate::descent::{
    add_gauge, check_add, check_mdd, equiv_solve, exp_add, int_mc, obstruction, AddDatum, DescentCarrier, DescentError,
    DescentLogs, DescentReport, EquivOutcome, IntError, IntOptions, MddDatum, ObstructionOutcome, SolverOptions,
};
use crate::dgla::{mc_check, ChartCarrier, Ext, ExtElem, Flavor};
use crate::exactalg::{parse_expr, ChartData, Mono, Rational};
use crate::polydiff::{
    first_order_bracket, first_order_bracket_poisson, moyal, quantize_affine_order2, star_from_mc, BracketTable, PdElem, PolyDiff,
    QuantizeError, StarProduct,
};
use crate::polyvec::{poisson_from_mc, Polyvec};
use crate::selftest;

#[derive(Parser, Debug)]
#[command(name = "deformkit", version, about = "Exact finite-order deformations, descent data and their checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Re-truncate the parameter algebra of the input at this order.
    #[arg(long, global = true)]
    order: Option<u32>,
    /// Monomial degree bound for associativity and intertwiner certificates.
    #[arg(long, global = true, default_value_t = 4)]
    cert_degree: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the constructed object (or the report) to this file as JSON.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a multiplicative descent datum.
    CheckMdd { file: PathBuf },
    /// Check an additive descent datum.
    CheckAdd { file: PathBuf },
    /// Exponentiate an additive datum and certify the result.
    ExpAdd { file: PathBuf },
    /// Integrate a Thom-Sullivan MC element to an additive datum.
    IntMc { file: PathBuf },
    /// Search for a twisted gauge transformation between two data.
    Equiv { first: PathBuf, second: PathBuf },
    /// Trivialize a datum order by order or report the first obstruction.
    Obstruction { file: PathBuf },
    /// Quantize a Poisson bivector on affine space through order two.
    Quantize { file: PathBuf },
    /// Star products of low-degree monomials with an associativity certificate.
    StarTable { file: PathBuf },
    /// Cech cohomology of a nerve with a finite coefficient layer.
    Cohomology { file: PathBuf },
    /// Run the seeded property suite.
    Selftest {
        /// Criteria to run (all when omitted).
        #[arg(long = "criterion")]
        criteria: Vec<u32>,
    },
}

/// Result of one command: exit code, JSON report, text summary, and the
/// constructed object written by `--out`.
pub struct Outcome {
    pub code: i32,
    pub json: Value,
    pub text: String,
    pub artifact: Option<Value>,
}

#[derive(Debug)]
pub struct InputError(pub String);

type Run = Result<Outcome, InputError>;

fn input<E: std::fmt::Display>(ctx: impl std::fmt::Display) -> impl Fn(E) -> InputError {
    move |e| InputError(format!("{}: {}", ctx, e))
}

/// Parse arguments and run; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let fmt = cli.format;
    match run(&cli) {
        Ok(o) => {
            if let Some(p) = &cli.out {
                let v = o.artifact.as_ref().unwrap_or(&o.json);
                if let Err(e) = std::fs::write(p, pretty(v)) {
                    eprintln!("error: cannot write {}: {}", p.display(), e);
                    return 2;
                }
            }
            match fmt {
                Format::Json => println!("{}", pretty(&o.json)),
                Format::Text => print!("{}", o.text),
            }
            o.code
        }
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg);
            if fmt == Format::Json {
                println!("{}", pretty(&json!({ "error": msg, "code": 2 })));
            }
            2
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Run {
    let ctx = Ctx { order: cli.order, cert: cli.cert_degree };
    match &cli.command {
        Command::CheckMdd { file } => datum_cmd(&ctx, file, Op::CheckMdd),
        Command::CheckAdd { file } => datum_cmd(&ctx, file, Op::CheckAdd),
        Command::ExpAdd { file } => datum_cmd(&ctx, file, Op::ExpAdd),
        Command::Obstruction { file } => datum_cmd(&ctx, file, Op::Obstruction),
        Command::Equiv { first, second } => equiv_cmd(&ctx, first, second),
        Command::IntMc { file } => int_mc_cmd(&ctx, file),
        Command::Quantize { file } => quantize_cmd(&ctx, file),
        Command::StarTable { file } => star_table_cmd(&ctx, file),
        Command::Cohomology { file } => cohomology_cmd(file),
        Command::Selftest { criteria } => Ok(selftest_cmd(cli.seed, criteria)),
    }
}

struct Ctx {
    order: Option<u32>,
    cert: u32,
}

// ---------------------------------------------------------------- input

struct Source {
    path: String,
    text: String,
    value: Value,
}

fn line_col(text: &str, needle: &str) -> (usize, usize) {
    let at = text.find(needle).unwrap_or(0);
    let line = text[..at].matches('\n').count() + 1;
    let col = at - text[..at].rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, col)
}

fn load(path: &Path) -> Result<Source, InputError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(input(&p))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{}:{}:{}: invalid JSON: {}", p, e.line(), e.column(), strip_pos(&e.to_string()))))?;
    if !value.is_object() {
        return Err(InputError(format!("{}:1:1: expected a JSON object", p)));
    }
    Ok(Source { path: p, text, value })
}

#[derive(Deserialize)]
struct Nested<T> {
    datum: T,
}

impl Source {
    fn at(&self, needle: &str, msg: impl std::fmt::Display) -> InputError {
        let (l, c) = line_col(&self.text, needle);
        InputError(format!("{}:{}:{}: {}", self.path, l, c, msg))
    }

    fn schema_of(v: &Value) -> Option<&Value> {
        v.get("schema")
    }

    /// Deserialize the whole file, or its `datum` member when it is a
    /// report written by a constructive command.
    fn typed<T: DeserializeOwned>(&self) -> Result<T, InputError> {
        let nested = self.value.get("datum").is_some() && self.value.get("vertex").is_none();
        let inner = if nested { &self.value["datum"] } else { &self.value };
        match Self::schema_of(inner) {
            None => return Err(self.at("{", "missing \"schema\": 1")),
            Some(s) if s.as_u64() != Some(1) => return Err(self.at("\"schema\"", format!("unsupported schema {}", s))),
            _ => {}
        }
        let r = if nested { serde_json::from_str::<Nested<T>>(&self.text).map(|n| n.datum) } else { serde_json::from_str::<T>(&self.text) };
        r.map_err(|e| InputError(format!("{}:{}:{}: {}", self.path, e.line(), e.column(), strip_pos(&e.to_string()))))
    }

    /// Errors that name a face as `'U0,U1'` point at that key in the file.
    fn semantic(&self, e: impl std::fmt::Display) -> InputError {
        let msg = e.to_string();
        let key = msg.split('\'').nth(1).map(|k| format!("\"{}\"", k));
        match key {
            Some(k) if self.text.contains(&k) => self.at(&k, msg),
            _ => InputError(format!("{}: {}", self.path, msg)),
        }
    }
}

fn strip_pos(s: &str) -> String {
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s.to_string(),
    }
}

fn flavor_of(src: &Source, flavor: &str) -> Result<Flavor, InputError> {
    io::parse_flavor(flavor).map_err(|e| src.at("\"flavor\"", e))
}

fn retruncate(src: &Source, params: &mut String, order: Option<u32>) -> Result<(), InputError> {
    if let Some(o) = order {
        *params = io::retruncate(params, o).map_err(|e| src.at("\"params\"", e))?;
    }
    Ok(())
}

fn load_datum(ctx: &Ctx, path: &Path) -> Result<(Source, DatumFile, Flavor), InputError> {
    let src = load(path)?;
    let mut file: DatumFile = src.typed()?;
    retruncate(&src, &mut file.params, ctx.order)?;
    let fl = flavor_of(&src, &file.flavor)?;
    Ok((src, file, fl))
}

fn logs_of<C: DescentCarrier>(src: &Source, file: &DatumFile) -> Result<DescentLogs<C>, InputError> {
    io::datum_from_file(file).map_err(|e| src.semantic(e))
}

// ---------------------------------------------------------------- reports

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn report_text(rep: &DescentReport) -> String {
    let mut s = format!("  {}\n", rep.summary());
    for (k, n) in &rep.checked {
        s.push_str(&format!("  checked {}: {}\n", k, n));
    }
    for v in &rep.violations {
        s.push_str(&format!("  violation: {} on ({}) at order {}\n", v.condition.name(), v.face_name, v.order));
    }
    s
}

fn report_json(rep: &DescentReport) -> Value {
    serde_json::to_value(rep).expect("report")
}

fn local_error(e: &DescentError) -> Option<String> {
    match e {
        DescentError::Local { .. } => Some(e.to_string()),
        _ => None,
    }
}

// ---------------------------------------------------------------- datum commands

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    CheckAdd,
    CheckMdd,
    ExpAdd,
    Obstruction,
}

fn datum_cmd(ctx: &Ctx, path: &Path, op: Op) -> Run {
    let (src, file, fl) = load_datum(ctx, path)?;
    match fl {
        Flavor::Poisson => datum_op::<Polyvec>(ctx, &src, &file, op),
        Flavor::Associative => datum_op::<PolyDiff>(ctx, &src, &file, op),
    }
}

fn datum_op<C: DescentCarrier>(ctx: &Ctx, src: &Source, file: &DatumFile, op: Op) -> Run {
    let logs = logs_of::<C>(src, file)?;
    let flavor = C::FLAVOR.name();
    let d = AddDatum::new(logs).map_err(|e| src.semantic(e))?;
    match op {
        Op::CheckAdd => {
            let rep = check_add(&d);
            let pass = rep.holds();
            Ok(Outcome {
                code: if pass { 0 } else { 1 },
                json: json!({ "command": "check-add", "flavor": flavor, "pass": pass, "report": report_json(&rep) }),
                text: format!("check-add ({}): {}\n{}", flavor, verdict(pass), report_text(&rep)),
                artifact: None,
            })
        }
        Op::CheckMdd => {
            let m = match MddDatum::new(d.logs, ctx.cert) {
                Ok(m) => m,
                Err(e) => return local_failure("check-mdd", flavor, &e, src),
            };
            let rep = check_mdd(&m, ctx.cert);
            let pass = rep.holds();
            Ok(Outcome {
                code: if pass { 0 } else { 1 },
                json: json!({ "command": "check-mdd", "flavor": flavor, "pass": pass, "report": report_json(&rep) }),
                text: format!("check-mdd ({}): {}\n{}", flavor, verdict(pass), report_text(&rep)),
                artifact: None,
            })
        }
        Op::ExpAdd => {
            let pre = check_add(&d);
            if !pre.holds() {
                return Ok(Outcome {
                    code: 1,
                    json: json!({ "command": "exp-add", "flavor": flavor, "pass": false, "input": report_json(&pre) }),
                    text: format!("exp-add ({}): FAIL, input is not an additive datum\n{}", flavor, report_text(&pre)),
                    artifact: None,
                });
            }
            let m = match exp_add(&d, ctx.cert) {
                Ok(m) => m,
                Err(e) => return local_failure("exp-add", flavor, &e, src),
            };
            let rep = check_mdd(&m, ctx.cert);
            let pass = rep.holds();
            let datum = io::write_datum(&m.logs);
            let locals: BTreeMap<String, String> = m
                .logs
                .nerve()
                .faces(0)
                .iter()
                .map(|f| (m.logs.nerve().render_face(f), m.logs.cech.ext(f).render(&m.logs.beta(f[0]))))
                .collect();
            let mut text = format!("exp-add ({}): {}\n{}", flavor, verdict(pass), report_text(&rep));
            for (k, v) in &locals {
                text.push_str(&format!("  local deformation on {}: {}\n", k, v));
            }
            Ok(Outcome {
                code: if pass { 0 } else { 1 },
                json: json!({
                    "command": "exp-add", "flavor": flavor, "pass": pass, "report": report_json(&rep),
                    "locals": locals, "datum": datum,
                }),
                text,
                artifact: Some(datum),
            })
        }
        Op::Obstruction => obstruction_op(&d),
    }
}

fn local_failure(cmd: &str, flavor: &str, e: &DescentError, src: &Source) -> Run {
    match local_error(e) {
        Some(msg) => Ok(Outcome {
            code: 1,
            json: json!({ "command": cmd, "flavor": flavor, "pass": false, "error": msg }),
            text: format!("{} ({}): FAIL\n  {}\n", cmd, flavor, msg),
            artifact: None,
        }),
        None => Err(src.semantic(e)),
    }
}

fn obstruction_op<C: DescentCarrier>(d: &AddDatum<C>) -> Run {
    let flavor = C::FLAVOR.name();
    let pre = check_add(d);
    if !pre.holds() {
        return Ok(Outcome {
            code: 1,
            json: json!({ "command": "obstruction", "flavor": flavor, "pass": false, "input": report_json(&pre) }),
            text: format!("obstruction ({}): FAIL, input is not an additive datum\n{}", flavor, report_text(&pre)),
            artifact: None,
        });
    }
    let out = obstruction(d, &SolverOptions::default()).map_err(|e| InputError(e.to_string()))?;
    match out {
        ObstructionOutcome::Trivial(t) => {
            let img = add_gauge(&t.transformation, d).map_err(|e| InputError(e.to_string()))?;
            let datum = io::write_datum(&img.logs);
            Ok(Outcome {
                code: 0,
                json: json!({
                    "command": "obstruction", "flavor": flavor, "trivial": true,
                    "transformation": io::write_transformation(&t.transformation), "datum": datum,
                }),
                text: format!(
                    "obstruction ({}): trivializable\n  transformed datum has {} edge and {} triangle logarithms\n",
                    flavor,
                    img.logs.edge.len(),
                    img.logs.triangle.len()
                ),
                artifact: Some(datum),
            })
        }
        ObstructionOutcome::Obstructed(rep) => {
            let n = d.logs.nerve();
            let cochains: BTreeMap<String, String> =
                rep.cochains.iter().map(|(i, c)| (d.logs.params().render_basis(*i), c.render(n))).collect();
            let nz = match rep.class_nonzero {
                Some(true) => "nonzero",
                Some(false) => "zero",
                None => "undecided",
            };
            let text = format!(
                "obstruction ({}): obstructed at order {} ({})\n  class {} ({} in cohomology)\n  {}\n",
                flavor,
                rep.order,
                serde_json::to_value(rep.kind).unwrap().as_str().unwrap(),
                rep.class,
                nz,
                rep.detail
            );
            Ok(Outcome {
                code: 1,
                json: json!({
                    "command": "obstruction", "flavor": flavor, "trivial": false, "order": rep.order, "kind": rep.kind,
                    "class": rep.class, "class_nonzero": rep.class_nonzero, "detail": rep.detail, "cochains": cochains,
                }),
                text,
                artifact: None,
            })
        }
    }
}

fn equiv_cmd(ctx: &Ctx, a: &Path, b: &Path) -> Run {
    let (sa, fa, fla) = load_datum(ctx, a)?;
    let (sb, fb, flb) = load_datum(ctx, b)?;
    if fla != flb {
        return Err(sb.at("\"flavor\"", format!("flavor {} differs from {}", flb.name(), fla.name())));
    }
    match fla {
        Flavor::Poisson => equiv_op::<Polyvec>(&sa, &fa, &sb, &fb),
        Flavor::Associative => equiv_op::<PolyDiff>(&sa, &fa, &sb, &fb),
    }
}

fn equiv_op<C: DescentCarrier>(sa: &Source, fa: &DatumFile, sb: &Source, fb: &DatumFile) -> Run {
    let flavor = C::FLAVOR.name();
    let la = logs_of::<C>(sa, fa)?;
    let lb = logs_of::<C>(sb, fb)?;
    if la.nerve().to_spec() != lb.nerve().to_spec() || la.params() != lb.params() {
        return Err(sb.semantic("nerve or parameter algebra differs from the first datum"));
    }
    let (da, db) = (AddDatum::new(la).map_err(|e| sa.semantic(e))?, AddDatum::new(lb).map_err(|e| sb.semantic(e))?);
    for (d, name) in [(&da, "first"), (&db, "second")] {
        let rep = check_add(d);
        if !rep.holds() {
            return Ok(Outcome {
                code: 1,
                json: json!({ "command": "equiv", "flavor": flavor, "equivalent": false, "input": name, "report": report_json(&rep) }),
                text: format!("equiv ({}): FAIL, {} input is not an additive datum\n{}", flavor, name, report_text(&rep)),
                artifact: None,
            });
        }
    }
    let same = Arc::ptr_eq(&da.logs.cech, &db.logs.cech);
    let db = if same { db } else { rehome(&da, &db) };
    match equiv_solve(&da, &db, &SolverOptions::default()).map_err(|e| InputError(e.to_string()))? {
        EquivOutcome::Equivalent(e) => {
            let t = io::write_transformation(&e.transformation);
            Ok(Outcome {
                code: 0,
                json: json!({ "command": "equiv", "flavor": flavor, "equivalent": true, "transformation": t }),
                text: format!("equiv ({}): equivalent\n  transformation verified on all faces\n", flavor),
                artifact: Some(t),
            })
        }
        EquivOutcome::NotFound { order } => Ok(Outcome {
            code: 1,
            json: json!({ "command": "equiv", "flavor": flavor, "equivalent": false, "order": order }),
            text: format!("equiv ({}): no transformation within the ansatz at order {}\n", flavor, order),
            artifact: None,
        }),
    }
}

/// The second datum re-read on the first datum's Cech algebra.
fn rehome<C: DescentCarrier>(a: &AddDatum<C>, b: &AddDatum<C>) -> AddDatum<C> {
    let mut logs = DescentLogs::on(&a.logs.cech);
    for (f, x) in &b.logs.vertex {
        logs.set_beta(f[0], x.clone());
    }
    for (f, x) in &b.logs.edge {
        logs.set_gamma(f.clone(), x.clone());
    }
    for (f, x) in &b.logs.triangle {
        logs.set_alpha(f.clone(), x.clone());
    }
    AddDatum { logs }
}

fn int_mc_cmd(ctx: &Ctx, path: &Path) -> Run {
    let src = load(path)?;
    let mut file: TsFile = src.typed()?;
    retruncate(&src, &mut file.params, ctx.order)?;
    match flavor_of(&src, &file.flavor)? {
        Flavor::Poisson => int_mc_op::<Polyvec>(&src, &file),
        Flavor::Associative => int_mc_op::<PolyDiff>(&src, &file),
    }
}

fn int_mc_op<C: DescentCarrier>(src: &Source, file: &TsFile) -> Run {
    let flavor = C::FLAVOR.name();
    let inp = io::ts_from_file::<C>(file).map_err(|e| src.semantic(e))?;
    match int_mc(&inp.ts, &inp.params, &inp.beta, &IntOptions::default()) {
        Ok(d) => {
            let rep = check_add(&d);
            let datum = io::write_datum(&d.logs);
            Ok(Outcome {
                code: if rep.holds() { 0 } else { 1 },
                json: json!({ "command": "int-mc", "flavor": flavor, "pass": rep.holds(), "report": report_json(&rep), "datum": datum }),
                text: format!("int-mc ({}): {}\n{}{}", flavor, verdict(rep.holds()), report_text(&rep), d.logs),
                artifact: Some(datum),
            })
        }
        Err(e) => {
            let order = match &e {
                IntError::NotMc(o) => *o,
                IntError::Unsolved { order } => Some(*order),
                _ => None,
            };
            Ok(Outcome {
                code: 1,
                json: json!({ "command": "int-mc", "flavor": flavor, "pass": false, "error": e.to_string(), "order": order }),
                text: format!("int-mc ({}): FAIL\n  {}\n", flavor, e),
                artifact: None,
            })
        }
    }
}

// ---------------------------------------------------------------- star products

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct QuantizeFile {
    schema: u32,
    vars: Vec<String>,
    params: String,
    bivector: Vec<Term>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct StarFile {
    schema: u32,
    vars: Vec<String>,
    params: String,
    #[serde(default)]
    beta: Option<Vec<Term>>,
    /// Constant antisymmetric matrix of the Moyal product, as strings.
    #[serde(default)]
    moyal: Option<Vec<Vec<String>>>,
}

fn chart_of(src: &Source, vars: &[String]) -> Result<crate::exactalg::Chart, InputError> {
    if vars.is_empty() || vars.iter().any(|v| v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_')) {
        return Err(src.at("\"vars\"", "vars must be a nonempty list of identifiers"));
    }
    let v: Vec<&str> = vars.iter().map(String::as_str).collect();
    Ok(ChartData::polynomial(&v))
}

fn bracket_json(b: &BracketTable) -> Value {
    let m: BTreeMap<String, BTreeMap<String, String>> = b
        .entries
        .iter()
        .map(|((i, j), e)| {
            (format!("{{{},{}}}", b.vars[*i], b.vars[*j]), e.iter().map(|(k, c)| (b.basis[*k].clone(), c.render())).collect())
        })
        .collect();
    json!(m)
}

fn star_json(s: &StarProduct) -> Value {
    json!({
        "schema": 1,
        "vars": s.ext.base.chart().vars.clone(),
        "params": s.ext.params.render(),
        "beta": io::render_elem(&s.ext, &s.beta),
    })
}

/// Star products of monomial pairs of degree 1..=2.
fn table(s: &StarProduct) -> BTreeMap<String, String> {
    let chart = s.ext.base.chart().clone();
    let monos: Vec<Mono> = Mono::all_up_to(chart.nvars(), 2).into_iter().filter(|m| m.degree() > 0).collect();
    let mut out = BTreeMap::new();
    for a in &monos {
        for b in &monos {
            let (fa, fb) = (crate::exactalg::LocalizedPoly::monomial(&chart, a), crate::exactalg::LocalizedPoly::monomial(&chart, b));
            out.insert(format!("{} * {}", fa.render(), fb.render()), s.ext.render(&s.star_fns(&fa, &fb)));
        }
    }
    out
}

fn quantize_cmd(ctx: &Ctx, path: &Path) -> Run {
    let src = load(path)?;
    let mut file: QuantizeFile = src.typed()?;
    retruncate(&src, &mut file.params, ctx.order)?;
    let chart = chart_of(&src, &file.vars)?;
    let params = io::parse_params(&file.params).map_err(|e| src.at("\"params\"", e))?;
    let ext = Ext::new(Polyvec::new(&chart), &params);
    let beta = io::parse_elem(&ext, 1, &file.bivector).map_err(|e| src.semantic(format!("bivector: {}", e)))?;
    let ps = match poisson_from_mc(&ext, &beta) {
        Ok(p) => p,
        Err(e) => {
            let order = mc_check(&ext, &beta).ok().and_then(|r| r.lowest_order);
            return Ok(Outcome {
                code: 1,
                json: json!({ "command": "quantize", "pass": false, "error": e.to_string(), "order": order }),
                text: format!("quantize: FAIL\n  {}\n", e),
                artifact: None,
            });
        }
    };
    let qz = match quantize_affine_order2(&ps, ctx.cert) {
        Ok(q) => q,
        Err(e @ QuantizeError::Inconsistent) | Err(e @ QuantizeError::Star(_)) | Err(e @ QuantizeError::Dgla(_)) => {
            return Ok(Outcome {
                code: 1,
                json: json!({ "command": "quantize", "pass": false, "error": e.to_string() }),
                text: format!("quantize: FAIL\n  {}\n", e),
                artifact: None,
            })
        }
        Err(e) => return Err(src.semantic(e)),
    };
    let (fail, triples) = qz.star.associativity_failure(ctx.cert);
    let pass = fail.is_none();
    let weights: BTreeMap<String, String> = qz.morphism.weights.iter().map(|(g, w)| (g.render(), w.to_string())).collect();
    let bracket = first_order_bracket(&qz.star);
    let preserved = bracket == first_order_bracket_poisson(&ps);
    let star = star_json(&qz.star);
    let mut text = format!(
        "quantize: {}\n  associativity verified on {} monomial triples of degree <= {}\n  first-order bracket preserved: {}\n",
        verdict(pass && preserved),
        triples,
        ctx.cert,
        preserved
    );
    text.push_str(&format!("  star product: m + {}\n", qz.star.render()));
    for (g, w) in &weights {
        text.push_str(&format!("  weight {} = {}\n", g, w));
    }
    for line in bracket.render().lines() {
        text.push_str(&format!("  {}\n", line));
    }
    Ok(Outcome {
        code: if pass && preserved { 0 } else { 1 },
        json: json!({
            "command": "quantize", "pass": pass && preserved, "associative": pass, "triples": triples,
            "degree_bound": ctx.cert, "bracket_preserved": preserved, "weights": weights,
            "bracket": bracket_json(&bracket), "table": table(&qz.star), "star": star,
        }),
        text,
        artifact: Some(star),
    })
}

fn star_table_cmd(ctx: &Ctx, path: &Path) -> Run {
    let src = load(path)?;
    let mut file: StarFile = src.typed()?;
    retruncate(&src, &mut file.params, ctx.order)?;
    let chart = chart_of(&src, &file.vars)?;
    let params = io::parse_params(&file.params).map_err(|e| src.at("\"params\"", e))?;
    let ext = Ext::new(PolyDiff::new(&chart), &params);
    let beta: ExtElem<PdElem> = match (&file.beta, &file.moyal) {
        (Some(t), None) => io::parse_elem(&ext, 1, t).map_err(|e| src.semantic(format!("beta: {}", e)))?,
        (None, Some(m)) => {
            let n = chart.nvars();
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(src.at("\"moyal\"", format!("moyal matrix must be {}x{}", n, n)));
            }
            let mut mat: Vec<Vec<Rational>> = Vec::new();
            for row in m {
                let mut r = Vec::new();
                for e in row {
                    let v = parse_expr(&chart, e).ok().and_then(|p| p.constant_value());
                    r.push(v.ok_or_else(|| src.at("\"moyal\"", format!("'{}' is not a rational constant", e)))?);
                }
                mat.push(r);
            }
            if (0..n).any(|i| (0..n).any(|j| mat[i][j] != -mat[j][i].clone())) {
                return Err(src.at("\"moyal\"", "moyal matrix must be antisymmetric"));
            }
            moyal(&ext, &mat)
        }
        _ => return Err(src.at("{", "exactly one of \"beta\" and \"moyal\" is required")),
    };
    let star = match star_from_mc(&ext, &beta, ctx.cert) {
        Ok((s, _)) => s,
        Err(e) => {
            let s = StarProduct { ext: ext.clone(), beta: beta.clone() };
            let (fail, triples) = s.associativity_failure(ctx.cert);
            return Ok(Outcome {
                code: 1,
                json: json!({ "command": "star-table", "pass": false, "associative": false, "error": e.to_string(),
                              "order": fail, "triples": triples }),
                text: format!("star-table: FAIL\n  {}\n", e),
                artifact: None,
            });
        }
    };
    let (fail, triples) = star.associativity_failure(ctx.cert);
    let pass = fail.is_none();
    let tab = table(&star);
    let bracket = first_order_bracket(&star);
    let mut text = format!(
        "star-table: {}\n  associativity verified on {} monomial triples of degree <= {}\n",
        verdict(pass),
        triples,
        ctx.cert
    );
    for (k, v) in &tab {
        text.push_str(&format!("  {} = {}\n", k, v));
    }
    for line in bracket.render().lines() {
        text.push_str(&format!("  {}\n", line));
    }
    Ok(Outcome {
        code: if pass { 0 } else { 1 },
        json: json!({
            "command": "star-table", "pass": pass, "associative": pass, "triples": triples, "degree_bound": ctx.cert,
            "order": fail, "table": tab, "bracket": bracket_json(&bracket),
        }),
        text,
        artifact: None,
    })
}

// ---------------------------------------------------------------- cohomology, selftest

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct CohomologyFile {
    schema: u32,
    nerve: Value,
    #[serde(default = "constant_layer")]
    layer: String,
}

fn constant_layer() -> String {
    "constant".into()
}

fn cohomology_cmd(path: &Path) -> Run {
    let src = load(path)?;
    let file: CohomologyFile = src.typed()?;
    let nerve = io::parse_nerve(&file.nerve).map_err(|e| src.at("\"nerve\"", e))?;
    let layer = match file.layer.as_str() {
        "constant" => Layer::Constant,
        s => match s.strip_prefix("poly:").and_then(|d| d.parse().ok()) {
            Some(d) => Layer::PolyTruncated(d),
            None => return Err(src.at("\"layer\"", format!("unknown layer '{}', expected constant or poly:D", s))),
        },
    };
    let rep = cech_cohomology(&nerve, layer).map_err(|e| src.semantic(e))?;
    let reps: Vec<Vec<String>> = rep.representatives.iter().map(|v| v.iter().map(|c| c.render(&nerve)).collect()).collect();
    let mut text = format!("cohomology: {} charts, dimension {}\n", nerve.len(), nerve.dim());
    for (p, b) in rep.betti.iter().enumerate() {
        text.push_str(&format!("  H^{} has dimension {}\n", p, b));
        for r in &reps[p] {
            text.push_str(&format!("    {}\n", r));
        }
    }
    Ok(Outcome {
        code: 0,
        json: json!({ "command": "cohomology", "layer": file.layer, "betti": rep.betti, "representatives": reps }),
        text,
        artifact: None,
    })
}

fn selftest_cmd(seed: u64, criteria: &[u32]) -> Outcome {
    let ids: Vec<u32> = if criteria.is_empty() { (1..=10).collect() } else { criteria.to_vec() };
    let results: Vec<selftest::CriterionResult> = ids.iter().map(|&i| selftest::criterion(i, seed)).collect();
    let pass = results.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &results {
        text.push_str(&format!("{:>2} {:<32} {} ({} instances) {}\n", r.id, r.name, verdict(r.pass), r.instances, r.detail));
    }
    Outcome {
        code: if pass { 0 } else { 1 },
        json: json!({ "command": "selftest", "seed": seed, "pass": pass, "criteria": results }),
        text,
        artifact: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("{\n  \"schema\": 2\n}", "\"schema\""), (2, 3));
        assert_eq!(line_col("abc", "a"), (1, 1));
    }

    #[test]
    fn strips_serde_position() {
        assert_eq!(strip_pos("missing field `x` at line 3 column 1"), "missing field `x`");
    }
}
