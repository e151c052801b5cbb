//! Theory and fixed-point files, and the append-only report ledger.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fixed::{validate_fixed_point, FixedPointData};
use crate::scalar::{format_rational, FramingVar, Monomial};
use crate::series::TruncatedSeries;
use crate::theory::QuiverGaugeTheory;
use crate::verify::CheckReport;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Labels may be written as strings or integers.
fn label_of(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(schema(format!(
            "vertex label must be a string or integer, got {other}"
        ))),
    }
}

fn int_of(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| schema(format!("{what} must be an integer, got {v}")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| schema(format!("{what} must be an object")))
}

pub fn theory_from_value(v: &Value) -> Result<QuiverGaugeTheory> {
    let o = object(v, "theory")?;
    for k in o.keys() {
        if !["vertices", "arrows", "v", "w", "theta"].contains(&k.as_str()) {
            return Err(schema(format!("unknown theory field `{k}`")));
        }
    }
    let labels: Vec<String> = o
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("theory needs a `vertices` list"))?
        .iter()
        .map(label_of)
        .collect::<Result<_>>()?;
    let index = |l: &str| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| schema(format!("unknown vertex `{l}`")))
    };
    let mut arrows = Vec::new();
    if let Some(a) = o.get("arrows") {
        for e in a.as_array().ok_or_else(|| schema("`arrows` must be a list"))? {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| schema("each arrow is a [tail, head] pair"))?;
            arrows.push((index(&label_of(&pair[0])?)?, index(&label_of(&pair[1])?)?));
        }
    }
    let per_vertex = |key: &str, default: Option<i64>| -> Result<Vec<i64>> {
        let m = match o.get(key) {
            Some(m) => object(m, key)?.clone(),
            None if default.is_some() => Map::new(),
            None => return Err(schema(format!("theory needs `{key}`"))),
        };
        for k in m.keys() {
            index(k)?;
        }
        labels
            .iter()
            .map(|l| match m.get(l) {
                Some(x) => int_of(x, key),
                None => default.ok_or_else(|| schema(format!("`{key}` has no entry for `{l}`"))),
            })
            .collect()
    };
    let nonneg = |xs: Vec<i64>, key: &str| -> Result<Vec<u32>> {
        xs.into_iter()
            .map(|x| u32::try_from(x).map_err(|_| schema(format!("`{key}` entries must be nonnegative"))))
            .collect()
    };
    let v = nonneg(per_vertex("v", Some(0))?, "v")?;
    let w = nonneg(per_vertex("w", Some(0))?, "w")?;
    let theta = match o.get("theta") {
        None => vec![1; labels.len()],
        Some(Value::String(s)) => {
            let s = match s.as_str() {
                "+1" | "1" => 1,
                "-1" => -1,
                _ => return Err(schema(format!("bad stability `{s}`"))),
            };
            vec![s; labels.len()]
        }
        Some(Value::Number(n)) => vec![n.as_i64().unwrap_or(0) as i8; labels.len()],
        Some(Value::Object(_)) => per_vertex("theta", Some(1))?
            .into_iter()
            .map(|x| x as i8)
            .collect(),
        Some(other) => return Err(schema(format!("bad stability {other}"))),
    };
    QuiverGaugeTheory::new(labels, arrows, v, w, theta).map_err(|e| schema(e.to_string()))
}

pub fn theory_to_value(t: &QuiverGaugeTheory) -> Value {
    let labels = t.labels();
    let per = |xs: &[u32]| -> Value {
        let mut m = Map::new();
        for (l, &x) in labels.iter().zip(xs) {
            m.insert(l.clone(), json!(x));
        }
        Value::Object(m)
    };
    let theta: Value = if t.theta().iter().all(|&s| s == 1) {
        json!("+1")
    } else if t.theta().iter().all(|&s| s == -1) {
        json!("-1")
    } else {
        let mut m = Map::new();
        for (l, &s) in labels.iter().zip(t.theta()) {
            m.insert(l.clone(), json!(s));
        }
        Value::Object(m)
    };
    json!({
        "vertices": labels,
        "arrows": t.arrows().iter().map(|&(a, b)| json!([labels[a], labels[b]])).collect::<Vec<_>>(),
        "v": per(t.v()),
        "w": per(t.w()),
        "theta": theta,
    })
}

/// A doubled exponent from an integer or a `"p/2"` string.
fn half_int(v: &Value, what: &str) -> Result<i64> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| 2 * x)
            .ok_or_else(|| schema(format!("`{what}` must be an integer or \"p/2\""))),
        Value::String(s) => {
            let s = s.trim();
            match s.split_once('/') {
                Some((p, "2")) => p
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| schema(format!("bad half-integer `{s}`"))),
                None => s
                    .parse::<i64>()
                    .map(|x| 2 * x)
                    .map_err(|_| schema(format!("bad half-integer `{s}`"))),
                _ => Err(schema(format!("`{what}` must have denominator 2, got `{s}`"))),
            }
        }
        other => Err(schema(format!(
            "`{what}` must be an integer or \"p/2\", got {other}"
        ))),
    }
}

fn half_int_value(e2: i64) -> Value {
    if e2 % 2 == 0 {
        json!(e2 / 2)
    } else {
        json!(format!("{e2}/2"))
    }
}

pub fn monomial_from_value(v: &Value) -> Result<Monomial> {
    let o = object(v, "monomial")?;
    let mut a = BTreeMap::new();
    let mut q2 = 0;
    let mut h2 = 0;
    let mut negative = false;
    for (k, x) in o {
        match k.as_str() {
            "a" => {
                for (key, e) in object(x, "a")? {
                    a.insert(FramingVar::from_key(key)?, int_of(e, "framing exponent")?);
                }
            }
            "hbar" => h2 = half_int(x, "hbar")?,
            "q" => q2 = half_int(x, "q")?,
            "sign" => {
                negative = match int_of(x, "sign")? {
                    1 => false,
                    -1 => true,
                    s => return Err(schema(format!("sign must be ±1, got {s}"))),
                }
            }
            _ => return Err(schema(format!("unknown monomial field `{k}`"))),
        }
    }
    Ok(Monomial::from_parts(q2, h2, a, BTreeMap::new(), negative))
}

pub fn monomial_to_value(m: &Monomial) -> Value {
    let mut o = Map::new();
    let a: Map<String, Value> = m.framing().iter().map(|(k, &e)| (k.key(), json!(e))).collect();
    o.insert("a".into(), Value::Object(a));
    o.insert("hbar".into(), half_int_value(m.hbar_exp2()));
    if m.q_exp2() != 0 {
        o.insert("q".into(), half_int_value(m.q_exp2()));
    }
    o.insert("sign".into(), json!(if m.is_negative() { -1 } else { 1 }));
    Value::Object(o)
}

/// Parse a fixed-point file. A string `theory` is a path resolved against
/// `base`.
pub fn point_from_value(v: &Value, base: Option<&Path>) -> Result<FixedPointData> {
    let o = object(v, "fixed point")?;
    for k in o.keys() {
        if !["theory", "characters"].contains(&k.as_str()) {
            return Err(schema(format!("unknown fixed-point field `{k}`")));
        }
    }
    let theory = match o.get("theory") {
        Some(Value::String(p)) => {
            let path = match base {
                Some(b) => b.join(p),
                None => PathBuf::from(p),
            };
            load_theory(&path)?
        }
        Some(t @ Value::Object(_)) => theory_from_value(t)?,
        _ => return Err(schema("fixed point needs a `theory` path or object")),
    };
    let chars_obj = object(
        o.get("characters")
            .ok_or_else(|| schema("fixed point needs `characters`"))?,
        "characters",
    )?;
    let mut chars = vec![Vec::new(); theory.n()];
    for (label, list) in chars_obj {
        let i = theory.index(label).map_err(|e| schema(e.to_string()))?;
        chars[i] = list
            .as_array()
            .ok_or_else(|| schema(format!("characters of `{label}` must be a list")))?
            .iter()
            .map(monomial_from_value)
            .collect::<Result<_>>()?;
    }
    let p = FixedPointData::new(theory, chars).map_err(|e| schema(e.to_string()))?;
    let rep = validate_fixed_point(&p);
    if !rep.passed() {
        return Err(Error::Invalid(format!(
            "not a fixed point: {}",
            rep.issues.join("; ")
        )));
    }
    Ok(p)
}

/// Fixed-point file with the theory inlined.
pub fn point_to_value(p: &FixedPointData) -> Value {
    let mut chars = Map::new();
    for (l, c) in p.theory.labels().iter().zip(&p.chars) {
        chars.insert(l.clone(), Value::Array(c.iter().map(monomial_to_value).collect()));
    }
    json!({ "theory": theory_to_value(&p.theory), "characters": chars })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
}

pub fn load_theory(path: &Path) -> Result<QuiverGaugeTheory> {
    theory_from_value(&read_json(path)?)
}

pub fn load_point(path: &Path) -> Result<FixedPointData> {
    point_from_value(&read_json(path)?, path.parent())
}

#[derive(Serialize)]
struct TermJson {
    z: Vec<u32>,
    coeff: String,
}

/// Series as `{"nvars", "order", "terms": [{"z": [...], "coeff": "p/q"}]}`
/// in canonical order.
pub fn series_to_value(s: &TruncatedSeries) -> Value {
    let terms: Vec<TermJson> = s
        .sorted_terms()
        .into_iter()
        .map(|(e, c)| TermJson {
            z: e.clone(),
            coeff: if c.pole {
                "pole".into()
            } else {
                format_rational(&c.value)
            },
        })
        .collect();
    json!({ "nvars": s.nvars(), "order": s.order(), "terms": terms })
}

/// One ledger line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub timestamp: u64,
    pub version: String,
    pub report: CheckReport,
}

/// Append-only JSON-lines file of check reports.
pub struct Ledger {
    path: PathBuf,
}

impl Ledger {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Ledger { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, report: &CheckReport) -> Result<()> {
        let entry = LedgerEntry {
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: crate::version().to_string(),
            report: report.clone(),
        };
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&entry)?)?;
        Ok(())
    }

    pub fn read(&self) -> Result<Vec<LedgerEntry>> {
        let text = match std::fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{a3_point, d4_instance};

    #[test]
    fn theory_round_trip() {
        let t = crate::catalog::a3_theory();
        let v = theory_to_value(&t);
        assert_eq!(theory_from_value(&v).unwrap(), t);
        assert_eq!(v["theta"], json!("+1"));
    }

    #[test]
    fn point_round_trip_with_prefixed_labels() {
        let p = d4_instance().sum_point().unwrap();
        let v = point_to_value(&p);
        assert_eq!(point_from_value(&v, None).unwrap(), p);
    }

    #[test]
    fn half_integers_as_strings() {
        let m = Monomial::from_parts(0, 3, BTreeMap::new(), BTreeMap::new(), true);
        let v = monomial_to_value(&m);
        assert_eq!(v["hbar"], json!("3/2"));
        assert_eq!(v["sign"], json!(-1));
        assert_eq!(monomial_from_value(&v).unwrap(), m);
        assert!(monomial_from_value(&json!({"hbar": "1/3"})).is_err());
        assert!(monomial_from_value(&json!({"hbar": 1.5})).is_err());
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(
            theory_from_value(&json!({"vertices": ["1"], "arrows": [["1", "1"]], "v": {"1": 1}})),
            Err(Error::Schema(_))
        ));
        assert!(theory_from_value(&json!({"vertices": ["1"], "v": {"2": 1}})).is_err());
        assert!(theory_from_value(&json!({"vertices": ["1"], "colour": 1})).is_err());
        assert!(theory_from_value(&json!({"vertices": ["1"], "v": {"1": -1}})).is_err());
    }

    #[test]
    fn invalid_point_is_rejected() {
        let mut v = point_to_value(&a3_point());
        v["characters"]["1"] = json!([{"a": {"2.1": 1}, "hbar": "1/2"}]);
        assert!(point_from_value(&v, None).is_err());
    }

    #[test]
    fn ledger_appends() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = Ledger::new(dir.path().join("runs.jsonl"));
        assert!(ledger.read().unwrap().is_empty());
        let rep = crate::verify::check_dim_corpus(3, 1);
        ledger.append(&rep).unwrap();
        ledger.append(&rep).unwrap();
        let got = ledger.read().unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[1].report, rep);
        assert_eq!(got[0].version, crate::version());
    }
}
