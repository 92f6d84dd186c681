//! CSV and JSON rendering. All numbers are decimal strings at the digit
//! count of the working precision.

use std::path::{Path, PathBuf};

use opq_core::asymptotics::{richardson, ConvergenceTable, Decay};
use serde_json::{json, Map, Value};

use crate::error::OpqError;

pub const SCAN_HEADER: &str = "n,value,limit,abs_error";

pub fn decay_string(d: Option<Decay>) -> Value {
    match d {
        Some(Decay::Exponent(e)) => Value::String(format!("{e:.6}")),
        Some(Decay::Exact) => Value::String("exact".into()),
        None => Value::Null,
    }
}

pub fn scan_csv(t: &ConvergenceTable) -> String {
    let mut out = format!("{SCAN_HEADER}\n");
    for r in &t.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            r.value.to_decimal_full(),
            r.limit.to_decimal_full(),
            r.abs_error.to_decimal_full()
        ));
    }
    out
}

fn params_json(t: &ConvergenceTable) -> Value {
    Value::Object(t.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
}

pub fn scan_json(t: &ConvergenceTable) -> String {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "value": r.value.to_decimal_full(),
                "limit": r.limit.to_decimal_full(),
                "abs_error": r.abs_error.to_decimal_full(),
            })
        })
        .collect();
    let v = json!({
        "kind": t.kind.as_str(),
        "params": params_json(t),
        "limit": t.limit().map(|l| l.to_decimal_full()),
        "decay_exponent": decay_string(t.decay),
        "rows": rows,
    });
    pretty(&v)
}

/// Sidecar metadata: enough to plot the table without rerunning the scan.
pub fn scan_meta(t: &ConvergenceTable, precision_bits: u32, figure: Option<&str>) -> String {
    let mut m = Map::new();
    if let Some(f) = figure {
        m.insert("figure".into(), f.into());
    }
    m.insert("kind".into(), t.kind.as_str().into());
    m.insert("precision_bits".into(), precision_bits.into());
    m.insert("params".into(), params_json(t));
    m.insert("columns".into(), json!(["n", "value", "limit", "abs_error"]));
    m.insert("rows".into(), t.rows.len().into());
    m.insert("n_first".into(), t.rows.first().map(|r| r.n).into());
    m.insert("n_last".into(), t.last().map(|r| r.n).into());
    m.insert("limit".into(), t.limit().map(|l| l.to_decimal_full()).into());
    m.insert(
        "final_abs_error".into(),
        t.last().map(|r| r.abs_error.to_decimal_full()).into(),
    );
    m.insert("decay_exponent".into(), decay_string(t.decay));
    m.insert(
        "richardson_limit".into(),
        richardson(&t.rows).map(|x| x.to_decimal_full()).into(),
    );
    pretty(&Value::Object(m))
}

/// A coefficient table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CoeffTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        CoeffTable {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| {
                            // Integer columns stay integers; everything else is a decimal string.
                            let val = if c == "n" { json!(v.parse::<u64>().ok()) } else { json!(v) };
                            (c.clone(), val)
                        })
                        .collect(),
                )
            })
            .collect();
        pretty(&json!({ "table": self.name, "rows": rows }))
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// `<out>.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), OpqError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use opq_core::asymptotics::gamma_ratio_scan;
    use opq_core::Precision;

    #[test]
    fn scan_csv_layout() {
        let t = gamma_ratio_scan(3, 3, &[1, 2, 4], Precision::new(64).unwrap()).unwrap();
        let csv = scan_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SCAN_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert_eq!(lines[1].split(',').count(), 4);
        let v: Value = serde_json::from_str(&scan_json(&t)).unwrap();
        assert_eq!(v["kind"], "gamma");
        assert_eq!(v["rows"][2]["n"], 4);
        assert_eq!(v["decay_exponent"], "exact");
    }

    #[test]
    fn meta_path_appends_suffix() {
        assert_eq!(meta_path(Path::new("out/fig1a.csv")), PathBuf::from("out/fig1a.csv.meta.json"));
    }

    #[test]
    fn coeff_table_json_keeps_column_order() {
        let mut t = CoeffTable::new("x", &["n", "b", "a"]);
        t.push(vec!["0".into(), "1".into(), "2".into()]);
        let s = t.to_json();
        assert!(s.find("\"b\"").unwrap() < s.find("\"a\"").unwrap());
        assert_eq!(t.to_csv(), "n,b,a\n0,1,2\n");
    }
}
