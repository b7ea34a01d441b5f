//! JSON documents and CSV reports.
//!
//! Numbers are carried as decimal strings and parsed exactly; `p/q` fractions
//! and plain JSON numbers are accepted on input. Output keys are sorted and
//! every document carries `"format": "krein-star/1"`.

use std::collections::BTreeMap;

use num::{BigInt, Zero};
use serde_json::{json, Map, Value};

use crate::approx::SequenceReport;
use crate::error::{Error, Result};
use crate::forward::{Forward, InvariantReport};
use crate::graph::{Edge, EdgeMeasure, GraphMeasure, PointMass, StarGraph};
use crate::number::{format_decimal, parse_decimal, relative_deviation, Q};
use crate::oracle::OracleReport;
use crate::roots::{AlgebraicValue, RealRoot};
use crate::spectral::{CouplingMatrix, SpectralData};

pub const FORMAT: &str = "krein-star/1";

/// Parses `"0.25"`, `"1e-3"`, `"1/3"`.
pub fn parse_rational(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => parse_decimal(s),
    }
}

fn number(v: &Value, path: &str) -> Result<Q> {
    let parsed = match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_decimal(&n.to_string()),
        _ => return Err(Error::schema(path, "expected a decimal string")),
    };
    parsed.ok_or_else(|| Error::schema(path, format!("not a number: {v}")))
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::schema(format!("{path}.{k}"), "unknown key"));
    }
    Ok(obj)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::schema(format!("{path}.{key}"), "missing"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::schema(path, "expected a string"))
}

fn check_format(obj: &Map<String, Value>) -> Result<()> {
    match obj.get("format") {
        None => Ok(()),
        Some(Value::String(s)) if s == FORMAT => Ok(()),
        Some(v) => Err(Error::schema("$.format", format!("unsupported format {v}, expected \"{FORMAT}\""))),
    }
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("$", format!("malformed JSON at line {} column {}: {e}", e.line(), e.column())))
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn graph_from(edges: &[Value], path: &str) -> Result<StarGraph> {
    let mut out = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let obj = object(e, &p, &["id", "length", "masses"])?;
        let id = string(field(obj, "id", &p)?, &format!("{p}.id"))?.to_string();
        let length = number(field(obj, "length", &p)?, &format!("{p}.length"))?;
        out.push(Edge { id, length });
    }
    StarGraph::new(out).map_err(|e| Error::schema(path, e.to_string()))
}

pub fn measure_from_json(v: &Value) -> Result<GraphMeasure> {
    let root = object(v, "$", &["format", "edges", "central_mass"])?;
    check_format(root)?;
    let edges = array(field(root, "edges", "$")?, "$.edges")?;
    let graph = graph_from(edges, "$.edges")?;
    let central = match root.get("central_mass") {
        Some(c) => number(c, "$.central_mass")?,
        None => Q::zero(),
    };
    if central < Q::zero() {
        return Err(Error::schema("$.central_mass", "negative mass"));
    }
    let mut measures = vec![EdgeMeasure::empty(); graph.len()];
    for (i, e) in edges.iter().enumerate() {
        let p = format!("$.edges[{i}]");
        let obj = e.as_object().expect("checked");
        let id = obj["id"].as_str().expect("checked");
        let k = graph.index_of(id).expect("edge present");
        let mut masses = Vec::new();
        if let Some(ms) = obj.get("masses") {
            for (j, m) in array(ms, &format!("{p}.masses"))?.iter().enumerate() {
                let mp = format!("{p}.masses[{j}]");
                let mo = object(m, &mp, &["x", "m"])?;
                let x = number(field(mo, "x", &mp)?, &format!("{mp}.x"))?;
                let w = number(field(mo, "m", &mp)?, &format!("{mp}.m"))?;
                if x <= Q::zero() || x >= *graph.length(k) {
                    return Err(Error::schema(format!("{mp}.x"), format!("position {x} outside (0, {})", graph.length(k))));
                }
                if w <= Q::zero() {
                    return Err(Error::schema(format!("{mp}.m"), format!("weight {w} is not positive")));
                }
                masses.push(PointMass::new(x, w));
            }
        }
        masses.sort_by(|a, b| a.position.cmp(&b.position));
        measures[k] = EdgeMeasure::new(masses, graph.length(k)).map_err(|e| Error::schema(format!("{p}.masses"), e.to_string()))?;
    }
    GraphMeasure::new(graph, central, measures)
}

pub fn measure_from_str(text: &str) -> Result<GraphMeasure> {
    measure_from_json(&parse_json(text)?)
}

pub fn measure_to_json(m: &GraphMeasure, digits: usize) -> Value {
    let edges: Vec<Value> = m
        .graph()
        .edges()
        .iter()
        .zip(m.edge_measures())
        .map(|(e, em)| {
            let masses: Vec<Value> = em
                .masses()
                .iter()
                .map(|p| json!({"x": format_decimal(&p.position, digits), "m": format_decimal(&p.weight, digits)}))
                .collect();
            json!({"id": e.id, "length": format_decimal(&e.length, digits), "masses": masses})
        })
        .collect();
    json!({
        "format": FORMAT,
        "central_mass": format_decimal(m.central_mass(), digits),
        "edges": edges,
    })
}

pub fn measure_to_string(m: &GraphMeasure, digits: usize) -> String {
    to_pretty(&measure_to_json(m, digits))
}

/// Replaces values closer than `tol` (relative) by one representative,
/// preferring a value listed in `sigma`.
struct Matcher {
    reps: Vec<Q>,
    tol: Option<Q>,
}

impl Matcher {
    fn new(sigma: &[Q], rest: &[Q], tol: Option<Q>) -> Matcher {
        let mut reps: Vec<Q> = Vec::new();
        if let Some(t) = &tol {
            for x in sigma.iter().chain(rest) {
                if !reps.iter().any(|r| relative_deviation(r, x) <= *t) {
                    reps.push(x.clone());
                }
            }
        }
        Matcher { reps, tol }
    }

    fn canonical(&self, x: Q) -> Q {
        match &self.tol {
            Some(t) => self.reps.iter().find(|r| relative_deviation(r, &x) <= *t).cloned().unwrap_or(x),
            None => x,
        }
    }
}

/// Parses a spectral document. With `match_tol`, eigenvalues within that
/// relative distance of each other are identified before any membership test.
pub fn spectral_from_json(v: &Value, match_tol: Option<&Q>) -> Result<SpectralData> {
    let root = object(v, "$", &["format", "graph", "sigma", "sigma_e", "kappa", "coupling"])?;
    check_format(root)?;
    let g = object(field(root, "graph", "$")?, "$.graph", &["edges"])?;
    let graph = graph_from(array(field(g, "edges", "$.graph")?, "$.graph.edges")?, "$.graph.edges")?;
    let edge = |id: &str, path: &str| graph.index_of(id).ok_or_else(|| Error::schema(path, format!("unknown edge {id:?}")));

    let list = |v: &Value, path: &str| -> Result<Vec<Q>> {
        array(v, path)?.iter().enumerate().map(|(i, x)| number(x, &format!("{path}[{i}]"))).collect()
    };
    let sigma = match root.get("sigma") {
        Some(s) => list(s, "$.sigma")?,
        None => Vec::new(),
    };
    let mut sigma_e = vec![Vec::new(); graph.len()];
    if let Some(se) = root.get("sigma_e") {
        let obj = se.as_object().ok_or_else(|| Error::schema("$.sigma_e", "expected an object"))?;
        for (id, vals) in obj {
            let p = format!("$.sigma_e.{id}");
            sigma_e[edge(id, &p)?] = list(vals, &p)?;
        }
    }
    let mut kappa = Vec::new();
    if let Some(k) = root.get("kappa") {
        let obj = k.as_object().ok_or_else(|| Error::schema("$.kappa", "expected an object"))?;
        for (lam, n) in obj {
            let p = format!("$.kappa.{lam}");
            let x = parse_rational(lam).ok_or_else(|| Error::schema(&p, "key is not a number"))?;
            let n = n.as_u64().ok_or_else(|| Error::schema(&p, "expected a non-negative integer"))?;
            kappa.push((x, n as usize));
        }
    }
    let mut rest: Vec<Q> = sigma_e.iter().flatten().cloned().collect();
    rest.extend(kappa.iter().map(|k| k.0.clone()));
    let matcher = Matcher::new(&sigma, &rest, match_tol.cloned());
    let root_of = |x: Q| RealRoot::rational(matcher.canonical(x));

    let mut coupling = Vec::new();
    if let Some(c) = root.get("coupling") {
        for (i, entry) in array(c, "$.coupling")?.iter().enumerate() {
            let p = format!("$.coupling[{i}]");
            let obj = object(entry, &p, &["lambda", "ref_edge", "ratios", "edges", "matrix"])?;
            let lambda = root_of(number(field(obj, "lambda", &p)?, &format!("{p}.lambda"))?);
            let cm = if let Some(m) = obj.get("matrix") {
                let ids = array(field(obj, "edges", &p)?, &format!("{p}.edges"))?;
                let edges = ids
                    .iter()
                    .enumerate()
                    .map(|(j, id)| {
                        let q = format!("{p}.edges[{j}]");
                        edge(string(id, &q)?, &q)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let rows = array(m, &format!("{p}.matrix"))?
                    .iter()
                    .enumerate()
                    .map(|(j, row)| {
                        let q = format!("{p}.matrix[{j}]");
                        Ok(list(row, &q)?.into_iter().map(AlgebraicValue::rational).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                CouplingMatrix::from_full(lambda, edges, rows)
            } else {
                let rp = format!("{p}.ref_edge");
                let reference = edge(string(field(obj, "ref_edge", &p)?, &rp)?, &rp)?;
                let ratios = field(obj, "ratios", &p)?
                    .as_object()
                    .ok_or_else(|| Error::schema(format!("{p}.ratios"), "expected an object"))?;
                let mut vals = Vec::new();
                for (id, r) in ratios {
                    let q = format!("{p}.ratios.{id}");
                    vals.push((edge(id, &q)?, AlgebraicValue::rational(number(r, &q)?)));
                }
                CouplingMatrix::from_ratios(lambda, reference, vals)
            };
            coupling.push(cm.map_err(|v| Error::InvalidSpectralData(vec![v]))?);
        }
    }

    let mut sigma: Vec<RealRoot> = sigma.into_iter().map(root_of).collect();
    sigma.sort();
    let sigma_e = sigma_e
        .into_iter()
        .map(|s| {
            let mut s: Vec<RealRoot> = s.into_iter().map(root_of).collect();
            s.sort();
            s
        })
        .collect();
    coupling.sort_by(|a, b| a.lambda().cmp(b.lambda()));
    let declared_kappa = kappa.into_iter().map(|(x, n)| (root_of(x), n)).collect();
    Ok(SpectralData { graph, sigma, sigma_e, coupling, declared_kappa })
}

pub fn spectral_from_str(text: &str, match_tol: Option<&Q>) -> Result<SpectralData> {
    spectral_from_json(&parse_json(text)?, match_tol)
}

pub fn spectral_to_json(d: &SpectralData, digits: usize) -> Value {
    let dec = |r: &RealRoot| r.to_decimal(digits);
    let edges: Vec<Value> = d
        .graph
        .edges()
        .iter()
        .map(|e| json!({"id": e.id, "length": format_decimal(&e.length, digits)}))
        .collect();
    let mut sigma_e = Map::new();
    for (e, s) in d.sigma_e.iter().enumerate() {
        sigma_e.insert(d.edge_id(e).to_string(), Value::from(s.iter().map(dec).collect::<Vec<_>>()));
    }
    let mut kappa = Map::new();
    for l in &d.sigma {
        if !d.shared_edges(l).is_empty() {
            kappa.insert(dec(l), Value::from(d.kappa(l)));
        }
    }
    let coupling: Vec<Value> = d
        .coupling
        .iter()
        .map(|c| {
            let ratios: Map<String, Value> = c
                .edges()
                .iter()
                .zip(c.ratios())
                .map(|(&e, r)| (d.edge_id(e).to_string(), Value::from(r.to_decimal(digits))))
                .collect();
            json!({"lambda": dec(c.lambda()), "ref_edge": d.edge_id(c.reference()), "ratios": ratios})
        })
        .collect();
    json!({
        "format": FORMAT,
        "graph": {"edges": edges},
        "sigma": d.sigma.iter().map(dec).collect::<Vec<_>>(),
        "sigma_e": sigma_e,
        "kappa": kappa,
        "coupling": coupling,
    })
}

pub fn spectral_to_string(d: &SpectralData, digits: usize) -> String {
    to_pretty(&spectral_to_json(d, digits))
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

/// Trace-check residuals and invariant verdicts of a forward run.
pub fn forward_report_csv(fwd: &Forward, report: &InvariantReport, digits: usize) -> String {
    let header: Vec<String> = ["check", "lhs", "rhs", "residual", "verdict"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut trace_row = |name: String, (a, b): &(Q, Q)| {
        let r = a - b;
        rows.push(vec![name, format_decimal(a, digits), format_decimal(b, digits), format_decimal(&r, digits), verdict(r.is_zero())]);
    };
    trace_row("trace".into(), &report.traces.graph);
    for (e, t) in report.traces.edges.iter().enumerate() {
        trace_row(format!("trace_{}", fwd.measure.graph().edges()[e].id), t);
    }
    for (name, ok) in report.verdicts() {
        rows.push(vec![name.to_string(), String::new(), String::new(), String::new(), verdict(ok)]);
    }
    csv_string(&header, &rows)
}

pub fn oracle_report_csv(report: &OracleReport, graph: &StarGraph) -> String {
    let header: Vec<String> = ["scope", "exact", "kappa", "oracle", "multiplicity", "relative_deviation", "verdict"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.edge.map_or("graph".to_string(), |e| graph.edges()[e].id.clone()),
                r.exact.to_string(),
                r.kappa.to_string(),
                r.oracle.to_string(),
                r.multiplicity.to_string(),
                if r.deviation == 0.0 { "0".into() } else { format!("{:e}", r.deviation) },
                verdict(r.deviation <= report.tolerance && r.kappa == r.multiplicity),
            ]
        })
        .collect();
    csv_string(&header, &rows)
}

pub fn sequence_csv(report: &SequenceReport, graph: &StarGraph, digits: usize) -> String {
    let mut header: Vec<String> = vec!["cutoff".into(), "trace".into(), "partial_sum".into()];
    header.extend(report.labels.iter().cloned());
    header.push("central_mass".into());
    header.extend(graph.edges().iter().map(|e| format!("masses_{}", e.id)));
    header.extend(["snapped".to_string(), "reproduces".to_string()]);
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                format_decimal(&r.cutoff, digits),
                format_decimal(&r.trace, digits),
                format_decimal(&r.partial_sum, digits),
            ];
            row.extend(r.probes.iter().map(|p| format_decimal(p, digits)));
            row.push(format_decimal(&r.central_mass, digits));
            row.extend(r.mass_counts.iter().map(|n| n.to_string()));
            row.push(r.snapped.to_string());
            row.push(r.reproduces.to_string());
            row
        })
        .collect();
    csv_string(&header, &rows)
}

/// Generic CSV with a leading `#` comment line.
pub fn csv_with_comment(comment: &str, header: &[String], rows: &[Vec<String>]) -> String {
    format!("# {comment}\n{}", csv_string(header, rows))
}

/// Largest relative deviation between two measures on the same graph with the
/// same atom structure; `None` when the structures differ.
pub fn measure_deviation(a: &GraphMeasure, b: &GraphMeasure) -> Option<Q> {
    if a.graph() != b.graph() || a.edge_measures().iter().zip(b.edge_measures()).any(|(x, y)| x.len() != y.len()) {
        return None;
    }
    let mut worst = relative_deviation(a.central_mass(), b.central_mass());
    for (x, y) in a.edge_measures().iter().zip(b.edge_measures()) {
        for (p, r) in x.masses().iter().zip(y.masses()) {
            worst = worst.max(relative_deviation(&p.position, &r.position));
            worst = worst.max(relative_deviation(&p.weight, &r.weight));
        }
    }
    Some(worst)
}

/// Multiplicity of every graph eigenvalue, keyed by its decimal rendering.
pub fn kappa_map(d: &SpectralData, digits: usize) -> BTreeMap<String, usize> {
    d.sigma.iter().map(|l| (l.to_decimal(digits), d.kappa(l))).collect()
}
