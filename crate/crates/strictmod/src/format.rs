//! The module file format.
//!
//! A module file is a JSON object:
//!
//! ```json
//! {
//!   "name": "mu_pi",
//!   "p": 3, "N0": 1, "k_deg": 1,
//!   "prec": 16,
//!   "pi0": "pi",
//!   "C": [["pi"]],
//!   "D": [["0"]],
//!   "tower": [{"tame": 2}],
//!   "options": {"levels": 3}
//! }
//! ```
//!
//! `k_poly` (monic, coefficients low to high) fixes the residue field;
//! without it the default polynomial of degree `k_deg` is used. `e` may be
//! given instead of `pi0` and means `pi0 = pi^e`.
//!
//! A series is an integer (a constant of `F_p`), a string such as
//! `"2*pi^3 + pi - 1"`, or the full form
//! `{"terms": [[exp, [coords]]], "prec": P}` with coordinates of the
//! coefficient in the power basis of `k`. Entries without `prec` are exact
//! and take the working precision.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use strictmod_core::kmat::KMat;
use strictmod_core::points::{ExtensionTower, TowerStep};
use strictmod_core::{BaseData, GaloisField, Series, SeriesMatrix};

pub const DEFAULT_PREC: i64 = 24;
pub const MIN_PREC: i64 = 2;
pub const PREC_ENV: &str = "STRICTMOD_PREC";

#[derive(Debug, Clone, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: line {line}, column {column}: {msg}")]
    Syntax { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: {at}: {msg}")]
    Field { path: String, at: String, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub p: Option<u32>,
    #[serde(rename = "N0", default)]
    pub n0: Option<u32>,
    #[serde(default)]
    pub k_deg: Option<u32>,
    #[serde(default)]
    pub k_poly: Option<Vec<u32>>,
    #[serde(default)]
    pub prec: Option<i64>,
    #[serde(default)]
    pub e: Option<i64>,
    #[serde(default)]
    pub pi0: Option<Value>,
    #[serde(rename = "C", default)]
    pub c: Option<Vec<Vec<Value>>>,
    #[serde(rename = "D", default)]
    pub d: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    pub tower: Option<Value>,
    #[serde(default)]
    pub options: Option<Value>,
    /// Hand-derived expectations, used by the test corpus.
    #[serde(default)]
    pub expect: Option<Value>,
    #[serde(default)]
    pub tags: Option<Vec<String>>,
}

/// A parsed module file at a fixed working precision. The matrices are not
/// validated.
#[derive(Debug, Clone)]
pub struct LoadedModule {
    pub file: ModuleFile,
    pub base: BaseData,
    pub c: SeriesMatrix,
    pub d: SeriesMatrix,
    pub tower: Option<ExtensionTower>,
}

impl LoadedModule {
    pub fn option_u64(&self, key: &str) -> Option<u64> {
        self.file.options.as_ref().and_then(|o| o.get(key)).and_then(Value::as_u64)
    }

    pub fn option_str(&self, key: &str) -> Option<&str> {
        self.file.options.as_ref().and_then(|o| o.get(key)).and_then(Value::as_str)
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.file.tags.as_ref().is_some_and(|t| t.iter().any(|x| x == tag))
    }
}

pub fn read_json(path: &Path) -> Result<Value, FormatError> {
    let ps = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io { path: ps.clone(), msg: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| FormatError::Syntax {
        path: ps,
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

/// Parse a module file. `prec` overrides the file's precision.
pub fn load_module(path: &Path, prec: Option<i64>) -> Result<LoadedModule, FormatError> {
    let ps = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io { path: ps.clone(), msg: e.to_string() })?;
    parse_module(&ps, &text, prec)
}

/// Precision precedence: explicit override, then the file, then the
/// environment, then [`DEFAULT_PREC`].
pub fn resolve_prec(explicit: Option<i64>, file: Option<i64>) -> Result<i64, String> {
    let env = match std::env::var(PREC_ENV) {
        Ok(s) => Some(s.trim().parse::<i64>().map_err(|_| format!("{PREC_ENV}={s:?} is not an integer"))?),
        Err(_) => None,
    };
    let prec = explicit.or(file).or(env).unwrap_or(DEFAULT_PREC);
    if prec < MIN_PREC {
        return Err(format!("precision {prec} is below the minimum {MIN_PREC}"));
    }
    Ok(prec)
}

pub fn parse_module(path: &str, text: &str, prec: Option<i64>) -> Result<LoadedModule, FormatError> {
    let file: ModuleFile = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let ferr = |at: &str, msg: String| FormatError::Field { path: path.to_string(), at: at.to_string(), msg };
    let prec = resolve_prec(prec, file.prec).map_err(|m| ferr("prec", m))?;
    let p = file.p.ok_or_else(|| ferr("p", "missing".into()))?;
    let n0 = file.n0.unwrap_or(1);
    let field = match &file.k_poly {
        Some(poly) => {
            if let Some(d) = file.k_deg {
                if poly.len() != d as usize + 1 {
                    return Err(ferr("k_poly", format!("degree {} does not match k_deg = {d}", poly.len() - 1)));
                }
            }
            GaloisField::with_modulus(p, poly)
        }
        None => GaloisField::new(p, file.k_deg.unwrap_or(n0)),
    }
    .map_err(|e| ferr("k_poly", e.to_string()))?;
    let pi0 = match (&file.pi0, file.e) {
        (Some(v), None) => parse_series(&field, v, prec).map_err(|m| ferr("pi0", m))?,
        (None, Some(e)) => Series::pi_pow(e, prec),
        (None, None) => return Err(ferr("pi0", "give either pi0 or e".into())),
        (Some(_), Some(_)) => return Err(ferr("pi0", "give only one of pi0 and e".into())),
    };
    let base = BaseData::new(field.clone(), n0, pi0, prec).map_err(|e| ferr("base", e.to_string()))?;
    let c = match &file.c {
        Some(rows) => parse_matrix(&field, rows, prec).map_err(|(at, m)| ferr(&format!("C{at}"), m))?,
        None => SeriesMatrix::zeros(0, 0, prec),
    };
    let d = match &file.d {
        Some(rows) => parse_matrix(&field, rows, prec).map_err(|(at, m)| ferr(&format!("D{at}"), m))?,
        None => SeriesMatrix::zeros(c.rows(), c.cols(), prec),
    };
    let tower = match &file.tower {
        Some(v) => Some(parse_tower(v).map_err(|m| ferr("tower", m))?),
        None => None,
    };
    Ok(LoadedModule { file, base, c, d, tower })
}

/// A tower is a list of steps, or an object with a `tower` key holding one.
pub fn parse_tower(v: &Value) -> Result<ExtensionTower, String> {
    let list = match v {
        Value::Array(a) => a,
        Value::Object(o) => match o.get("tower") {
            Some(Value::Array(a)) => a,
            _ => return Err("expected a list of steps".into()),
        },
        _ => return Err("expected a list of steps".into()),
    };
    let mut steps = Vec::new();
    for (i, s) in list.iter().enumerate() {
        let obj = s.as_object().ok_or_else(|| format!("step {i}: expected an object"))?;
        if obj.len() != 1 {
            return Err(format!("step {i}: expected exactly one key"));
        }
        let (k, val) = obj.iter().next().expect("one key");
        let step = match k.as_str() {
            "unramified" => TowerStep::Unramified(
                val.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| format!("step {i}: bad degree"))?,
            ),
            "tame" => TowerStep::Tame(val.as_u64().ok_or_else(|| format!("step {i}: bad degree"))?),
            "artin_schreier" => {
                let q_power = val.get("q_power").and_then(Value::as_u64).ok_or_else(|| format!("step {i}: missing q_power"))?;
                let break_m = val.get("break").and_then(Value::as_i64).ok_or_else(|| format!("step {i}: missing break"))?;
                TowerStep::ArtinSchreier { q_power, break_m }
            }
            other => return Err(format!("step {i}: unknown step kind {other:?}")),
        };
        steps.push(step);
    }
    Ok(ExtensionTower::new(steps))
}

pub fn parse_matrix(field: &Arc<GaloisField>, rows: &[Vec<Value>], prec: i64) -> Result<SeriesMatrix, (String, String)> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(n * m);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err((format!("[{i}]"), format!("row has {} entries, expected {m}", row.len())));
        }
        for (j, v) in row.iter().enumerate() {
            data.push(parse_series(field, v, prec).map_err(|e| (format!("[{i}][{j}]"), e))?);
        }
    }
    Ok(SeriesMatrix::from_vec(n, m, data))
}

fn prime_const(field: &GaloisField, n: i64) -> u32 {
    field.from_int(n)
}

pub fn parse_series(field: &Arc<GaloisField>, v: &Value, prec: i64) -> Result<Series, String> {
    match v {
        Value::Number(x) => {
            let n = x.as_i64().ok_or("expected an integer")?;
            let c = prime_const(field, n);
            Ok(Series::from_terms(field, &[(0, c)], prec).map_err(|e| e.to_string())?)
        }
        Value::String(s) => parse_series_str(field, s, prec),
        Value::Object(o) => {
            let p = match o.get("prec") {
                None | Some(Value::Null) => prec,
                Some(x) => x.as_i64().ok_or("prec must be an integer")?.min(prec),
            };
            let terms = o.get("terms").and_then(Value::as_array).ok_or("missing terms")?;
            let mut out = Vec::new();
            for t in terms {
                let pair = t.as_array().filter(|a| a.len() == 2).ok_or("each term is [exp, coeff]")?;
                let exp = pair[0].as_i64().ok_or("exponent must be an integer")?;
                let c = match &pair[1] {
                    Value::Number(x) => prime_const(field, x.as_i64().ok_or("coefficient must be an integer")?),
                    Value::Array(a) => {
                        let coords: Vec<u32> = a
                            .iter()
                            .map(|x| x.as_u64().and_then(|y| u32::try_from(y).ok()).ok_or("bad coordinate"))
                            .collect::<Result<_, _>>()?;
                        field.from_coords(&coords).map_err(|e| e.to_string())?
                    }
                    _ => return Err("coefficient must be an integer or a coordinate list".into()),
                };
                if exp < p {
                    out.push((exp, c));
                }
            }
            Series::from_terms(field, &out, p).map_err(|e| e.to_string())
        }
        _ => Err("expected an integer, a string or an object".into()),
    }
}

/// `c*pi^a` terms joined by `+` or `-`.
pub fn parse_series_str(field: &Arc<GaloisField>, s: &str, prec: i64) -> Result<Series, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty series".into());
    }
    let mut terms: Vec<(i64, u32)> = Vec::new();
    let mut rest = compact.as_str();
    let mut sign = 1i64;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    loop {
        // A sign right after `^` or `^(` belongs to the exponent.
        let bytes = rest.as_bytes();
        let end = (1..bytes.len())
            .find(|&i| matches!(bytes[i], b'+' | b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'(')
            .unwrap_or(rest.len());
        let (tok, tail) = rest.split_at(end);
        let (coef, exp) = parse_term(tok).ok_or_else(|| format!("cannot read term {tok:?} in {s:?}"))?;
        let c = prime_const(field, sign * coef);
        if let Some(slot) = terms.iter_mut().find(|(e, _)| *e == exp) {
            slot.1 = field.add(slot.1, c);
        } else {
            terms.push((exp, c));
        }
        if tail.is_empty() {
            break;
        }
        sign = if tail.starts_with('-') { -1 } else { 1 };
        rest = &tail[1..];
        if rest.is_empty() {
            return Err(format!("dangling sign in {s:?}"));
        }
    }
    terms.retain(|&(e, c)| c != 0 && e < prec);
    terms.sort();
    Series::from_terms(field, &terms, prec).map_err(|e| e.to_string())
}

fn parse_term(tok: &str) -> Option<(i64, i64)> {
    let (coef, mono) = match tok.split_once('*') {
        Some((c, m)) => (c.parse::<i64>().ok()?, m),
        None => {
            if tok.starts_with("pi") {
                (1, tok)
            } else {
                return Some((tok.parse::<i64>().ok()?, 0));
            }
        }
    };
    let exp = if mono == "pi" {
        1
    } else {
        let e = mono.strip_prefix("pi^")?;
        let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
        e.parse::<i64>().ok()?
    };
    Some((coef, exp))
}

pub fn field_elem_json(field: &GaloisField, c: u32) -> Value {
    json!(field.coords(c))
}

pub fn series_json(field: &GaloisField, s: &Series) -> Value {
    let terms: Vec<Value> = s.terms().map(|(e, c)| json!([e, field.coords(c)])).collect();
    json!({"terms": terms, "prec": s.prec()})
}

pub fn matrix_json(field: &GaloisField, m: &SeriesMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| series_json(field, m.get(i, j))).collect()))
            .collect(),
    )
}

pub fn kmat_json(field: &GaloisField, m: &KMat) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| Value::Array(m.row(i).iter().map(|&c| field_elem_json(field, c)).collect()))
            .collect(),
    )
}

/// Short human form of a series, e.g. `pi + 2*pi^3 + O(pi^10)`.
pub fn series_text(field: &GaloisField, s: &Series) -> String {
    let mut parts = Vec::new();
    for (e, c) in s.terms() {
        let coef = if field.degree() == 1 {
            let v = field.coords(c)[0];
            if v == 1 && e != 0 {
                String::new()
            } else {
                v.to_string()
            }
        } else {
            format!("{:?}", field.coords(c))
        };
        let mono = match e {
            0 => String::new(),
            1 => "pi".to_string(),
            _ => format!("pi^{e}"),
        };
        parts.push(match (coef.is_empty(), mono.is_empty()) {
            (true, _) => mono,
            (false, true) => coef,
            (false, false) => format!("{coef}*{mono}"),
        });
    }
    parts.push(format!("O(pi^{})", s.prec()));
    parts.join(" + ")
}

pub fn tower_json(t: &ExtensionTower) -> Value {
    Value::Array(
        t.steps
            .iter()
            .map(|s| match s {
                TowerStep::Unramified(d) => json!({"unramified": d}),
                TowerStep::Tame(d) => json!({"tame": d}),
                TowerStep::ArtinSchreier { q_power, break_m } => {
                    json!({"artin_schreier": {"q_power": q_power, "break": break_m}})
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_strings() {
        let f = GaloisField::prime(3).unwrap();
        let s = parse_series_str(&f, "2*pi^3 + pi - 1", 10).unwrap();
        assert_eq!(s.terms().collect::<Vec<_>>(), vec![(0, 2), (1, 1), (3, 2)]);
        assert!(parse_series_str(&f, "0", 5).unwrap().is_zero());
        assert!(parse_series_str(&f, "pi^", 5).is_err());
        assert!(parse_series_str(&f, "1+", 5).is_err());
        let s = parse_series_str(&f, "pi^-1 + pi^(-2)", 5).unwrap();
        assert_eq!(s.val(), -2);
        let s = parse_series_str(&f, "pi + 2*pi", 5).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn full_form_and_truncation() {
        let f = GaloisField::new(2, 2).unwrap();
        let v: Value = serde_json::from_str(r#"{"terms": [[1, [0, 1]], [7, [1, 0]]], "prec": 5}"#).unwrap();
        let s = parse_series(&f, &v, 20).unwrap();
        assert_eq!(s.prec(), 5);
        assert_eq!(s.terms().count(), 1);
        assert_eq!(series_json(&f, &s)["prec"], 5);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_module("x.json", "{\n  \"p\": 3,\n  \"C\": [[\"pi\"]\n}", None).unwrap_err();
        match err {
            FormatError::Syntax { line, .. } => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_entry_is_located() {
        let err = parse_module("x.json", r#"{"p": 3, "e": 1, "C": [["pi", "q"]]}"#, Some(8)).unwrap_err();
        assert!(err.to_string().contains("C[0][1]"), "{err}");
    }
}
