//! JSON files for descent data and Thom–Sullivan elements.
//!
//! Elements are lists of terms `{"param": "hbar", "coeff": "x*y", "op": "dx^dy"}`:
//! a parameter series, a coefficient function and an operator key in the
//! carrier's syntax (empty for functions).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DescentCarrier, DescentLogs, Transformation};
use crate::cechnerve::{CechDgla, Nerve, NerveRef, NerveSpec, TsDgla, TsElem};
use crate::dgla::{ChartCarrier, Dgla, Ext, ExtElem, Flavor};
use crate::exactalg::{parse_expr, ChartData};
use crate::params::{ParamAlgebra, ParamSeries, Params};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct IoError(pub String);

fn err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> IoError + '_ {
    move |e| IoError(format!("{}: {}", ctx, e))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub param: String,
    pub coeff: String,
    #[serde(default)]
    pub op: String,
}

/// A term of a Thom–Sullivan element. Without `face` it is a form on the
/// simplex spanned by all indices, pulled back to every face.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TsTerm {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face: Option<String>,
    /// Exponents of `t_1..t_l`.
    #[serde(default)]
    pub t: Vec<u32>,
    /// 1-based indices of the `dt_i` factors, increasing.
    #[serde(default)]
    pub dt: Vec<usize>,
    pub param: String,
    pub coeff: String,
    #[serde(default)]
    pub op: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumFile {
    pub schema: u32,
    pub flavor: String,
    pub params: String,
    pub nerve: Value,
    #[serde(default)]
    pub vertex: BTreeMap<String, Vec<Term>>,
    #[serde(default)]
    pub edge: BTreeMap<String, Vec<Term>>,
    #[serde(default)]
    pub triangle: BTreeMap<String, Vec<Term>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsFile {
    pub schema: u32,
    pub flavor: String,
    pub params: String,
    pub nerve: Value,
    pub terms: Vec<TsTerm>,
}

pub fn check_schema(v: &Value) -> Result<(), IoError> {
    match v.get("schema").and_then(|s| s.as_u64()) {
        Some(1) => Ok(()),
        Some(s) => Err(IoError(format!("unsupported schema {}", s))),
        None => Err(IoError("missing \"schema\": 1".into())),
    }
}

pub fn parse_flavor(s: &str) -> Result<Flavor, IoError> {
    Flavor::parse(s).ok_or_else(|| IoError(format!("unknown flavor '{}'", s)))
}

/// A nerve given inline, or by name: `"octahedron"`, or `"full:N"` (the
/// full simplex on N charts), all on the polynomial chart in `x, y`.
pub fn parse_nerve(v: &Value) -> Result<NerveRef, IoError> {
    let chart = ChartData::polynomial(&["x", "y"]);
    match v {
        Value::String(s) if s == "octahedron" => Ok(Arc::new(Nerve::octahedron(&chart))),
        Value::String(s) if s.starts_with("full:") => {
            let k: usize = s[5..].parse().map_err(err("nerve"))?;
            if k == 0 {
                return Err(IoError("nerve: empty cover".into()));
            }
            let names: Vec<String> = (0..k).map(|i| format!("U{}", i)).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            Ok(Arc::new(Nerve::full(&refs, &chart)))
        }
        Value::String(s) => Err(IoError(format!("unknown nerve '{}'", s))),
        _ => {
            let spec: NerveSpec = serde_json::from_value(v.clone()).map_err(err("nerve"))?;
            Ok(Arc::new(spec.build().map_err(err("nerve"))?))
        }
    }
}

/// `param-algebra { gens = [..]; order = N }`, or `hbar:N` for `Q[hbar]/(hbar^{N+1})`.
pub fn parse_params(s: &str) -> Result<Params, IoError> {
    if let Some(n) = s.trim().strip_prefix("hbar:") {
        let n: u32 = n.trim().parse().map_err(err("params"))?;
        if n == 0 {
            return Err(IoError("params: order must be at least 1".into()));
        }
        return Ok(ParamAlgebra::hbar(n));
    }
    ParamAlgebra::parse(s).map_err(err("params"))
}

/// The same generators and relations truncated at another order.
pub fn retruncate(s: &str, order: u32) -> Result<String, IoError> {
    let p = parse_params(s)?;
    let gens: Vec<&str> = p.gens().iter().map(String::as_str).collect();
    Ok(ParamAlgebra::truncated(&gens, order, p.relations()).map_err(err("order"))?.render())
}

/// Parse a list of terms into an element of degree `deg` over a chart.
pub fn parse_elem<C: DescentCarrier>(ext: &Ext<C>, deg: i32, terms: &[Term]) -> Result<ExtElem<C::Elem>, IoError> {
    let mut acc = ext.zero(deg);
    for (n, t) in terms.iter().enumerate() {
        let x = parse_internal(&ext.base, deg, &t.coeff, &t.op).map_err(|e| IoError(format!("term {}: {}", n, e)))?;
        let r = ParamSeries::parse(&ext.params, &t.param).map_err(|e| IoError(format!("term {}: param: {}", n, e)))?;
        acc = ext.add(&acc, &ext.tensor(&r, &x));
    }
    Ok(acc)
}

fn parse_internal<C: DescentCarrier>(c: &C, deg: i32, coeff: &str, op: &str) -> Result<C::Elem, IoError> {
    let f = parse_expr(c.chart(), coeff).map_err(err("coeff"))?;
    let key = c.parse_op(op, deg).map_err(|e| IoError(format!("op: {}", e)))?;
    Ok(c.from_coefficients(deg, &[(key, f)]))
}

pub fn render_elem<C: DescentCarrier>(ext: &Ext<C>, x: &ExtElem<C::Elem>) -> Vec<Term> {
    let mut out = Vec::new();
    for (i, v) in &x.comps {
        for (k, c) in ext.base.coefficients(v) {
            if c.is_zero() {
                continue;
            }
            out.push(Term { param: ext.params.render_basis(*i), coeff: c.render(), op: ext.base.render_op(&k, x.deg) });
        }
    }
    out
}

/// Read descent logarithms. The flavor must match the carrier.
pub fn read_datum<C: DescentCarrier>(v: &Value) -> Result<DescentLogs<C>, IoError> {
    check_schema(v)?;
    let file: DatumFile = serde_json::from_value(v.clone()).map_err(err("datum"))?;
    datum_from_file(&file)
}

pub fn datum_from_file<C: DescentCarrier>(file: &DatumFile) -> Result<DescentLogs<C>, IoError> {
    if file.schema != 1 {
        return Err(IoError(format!("unsupported schema {}", file.schema)));
    }
    if parse_flavor(&file.flavor)? != C::FLAVOR {
        return Err(IoError(format!("flavor '{}' does not match", file.flavor)));
    }
    let nerve = parse_nerve(&file.nerve)?;
    let params = parse_params(&file.params)?;
    let cech = Arc::new(CechDgla::<C>::new(&nerve, &params));
    let mut logs = DescentLogs::on(&cech);
    for (name, terms) in &file.vertex {
        let f = nerve.parse_face(name).map_err(|e| IoError(format!("vertex '{}': {}", name, e)))?;
        if f.len() != 1 {
            return Err(IoError(format!("vertex: '{}' is not a vertex", name)));
        }
        logs.set_beta(f[0], parse_elem(cech.ext(&f), 1, terms).map_err(|e| IoError(format!("vertex '{}': {}", name, e)))?);
    }
    for (name, terms) in &file.edge {
        let f = nerve.parse_face(name).map_err(|e| IoError(format!("edge '{}': {}", name, e)))?;
        if f.len() != 2 {
            return Err(IoError(format!("edge: '{}' is not an edge", name)));
        }
        let x = parse_elem(cech.ext(&f), 0, terms).map_err(|e| IoError(format!("edge '{}': {}", name, e)))?;
        logs.set_gamma(f, x);
    }
    for (name, terms) in &file.triangle {
        let f = nerve.parse_face(name).map_err(|e| IoError(format!("triangle '{}': {}", name, e)))?;
        if f.len() != 3 {
            return Err(IoError(format!("triangle: '{}' is not a triangle", name)));
        }
        let x = parse_elem(cech.ext(&f), -1, terms).map_err(|e| IoError(format!("triangle '{}': {}", name, e)))?;
        logs.set_alpha(f, x);
    }
    logs.validate().map_err(err("datum"))?;
    Ok(logs)
}

pub fn write_datum<C: DescentCarrier>(logs: &DescentLogs<C>) -> Value {
    let n = logs.nerve();
    let sect = |map: &BTreeMap<Vec<usize>, ExtElem<C::Elem>>| -> BTreeMap<String, Vec<Term>> {
        map.iter().map(|(f, x)| (n.render_face(f), render_elem(logs.cech.ext(f), x))).collect()
    };
    let file = DatumFile {
        schema: 1,
        flavor: C::FLAVOR.name().into(),
        params: logs.params().render(),
        nerve: serde_json::to_value(n.to_spec()).expect("nerve spec"),
        vertex: sect(&logs.vertex),
        edge: sect(&logs.edge),
        triangle: sect(&logs.triangle),
    };
    serde_json::to_value(file).expect("datum")
}

/// A Thom–Sullivan element of total degree 1 with its nerve and parameters.
pub struct TsInput<C: ChartCarrier> {
    pub ts: TsDgla<C>,
    pub params: Params,
    pub beta: ExtElem<TsElem<C::Elem>>,
}

pub fn read_ts<C: DescentCarrier>(v: &Value) -> Result<TsInput<C>, IoError> {
    check_schema(v)?;
    let file: TsFile = serde_json::from_value(v.clone()).map_err(err("ts"))?;
    ts_from_file(&file)
}

pub fn ts_from_file<C: DescentCarrier>(file: &TsFile) -> Result<TsInput<C>, IoError> {
    if file.schema != 1 {
        return Err(IoError(format!("unsupported schema {}", file.schema)));
    }
    if parse_flavor(&file.flavor)? != C::FLAVOR {
        return Err(IoError(format!("flavor '{}' does not match", file.flavor)));
    }
    let nerve = parse_nerve(&file.nerve)?;
    let params = parse_params(&file.params)?;
    let ts = TsDgla::<C>::new(&nerve);
    let mut comps: BTreeMap<usize, TsElem<C::Elem>> = BTreeMap::new();
    for (n, term) in file.terms.iter().enumerate() {
        let at = |e: IoError| IoError(format!("term {}: {}", n, e));
        let (face, l) = match &term.face {
            Some(s) => {
                let f = nerve.parse_face(s).map_err(err("face")).map_err(at)?;
                let l = f.len() - 1;
                (Some(f), l)
            }
            None => (None, nerve.len() - 1),
        };
        let t: Vec<u32> = if term.t.is_empty() { vec![0; l] } else { term.t.clone() };
        if t.len() != l {
            return Err(at(IoError(format!("t: expected {} exponents, got {}", l, t.len()))));
        }
        let mut dts: Vec<u8> = Vec::new();
        for &i in &term.dt {
            if i == 0 || i > l || dts.last().map_or(false, |&p| p as usize >= i - 1) {
                return Err(at(IoError(format!("dt: indices must be increasing in 1..={}", l))));
            }
            dts.push((i - 1) as u8);
        }
        let deg = 1 - dts.len() as i32;
        let carrier = match &face {
            Some(f) => ts.carrier(f),
            None => ts.carrier(&nerve.faces(0)[0]),
        };
        let x = parse_internal(carrier, deg, &term.coeff, &term.op).map_err(at)?;
        let r = ParamSeries::parse(&params, &term.param).map_err(err("param")).map_err(at)?;
        let comp = BTreeMap::from([((t, dts), x)]);
        let elem = match &face {
            Some(f) => TsElem { deg: 1, faces: BTreeMap::from([(f.clone(), comp)]) },
            None => ts.from_global(1, &comp),
        };
        for (i, c) in r.coeffs() {
            let e = ts.scale(&elem, c);
            let cur = comps.remove(i).unwrap_or_else(|| ts.zero(1));
            let s = ts.add(&cur, &e);
            if !ts.is_zero(&s) {
                comps.insert(*i, s);
            }
        }
    }
    Ok(TsInput { ts, params, beta: ExtElem { deg: 1, comps } })
}

/// Vertex and edge logarithms of a transformation, keyed like a datum.
pub fn write_transformation<C: DescentCarrier>(t: &Transformation<C>) -> Value {
    let n = &t.cech.nerve;
    let sect = |map: &BTreeMap<Vec<usize>, ExtElem<C::Elem>>| -> BTreeMap<String, Vec<Term>> {
        map.iter()
            .filter(|(_, x)| !x.comps.is_empty())
            .map(|(f, x)| (n.render_face(f), render_elem(t.cech.ext(f), x)))
            .collect()
    };
    serde_json::json!({ "vertex": sect(&t.vertex), "edge": sect(&t.edge) })
}
