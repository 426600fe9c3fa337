use serde_json::Value;

use crate::args::Format;
use crate::commands::Payload;

pub fn render(p: &Payload, format: Format) -> String {
    let shown = p.display.as_ref().unwrap_or(&p.result);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(shown).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            for (k, v) in flatten(shown) {
                out.push_str(&format!("{k}: {v}\n"));
            }
            out
        }
        Format::Csv => match &p.rows {
            Some(rows) if !rows.is_empty() => table(rows),
            _ => table_pairs(&flatten(shown)),
        },
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Dotted paths to scalars; arrays of scalars stay inline.
fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

fn walk(v: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                walk(x, join(k), out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, join(&i.to_string()), out);
            }
        }
        other => out.push((prefix, scalar(other))),
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

fn table_pairs(pairs: &[(String, String)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory writer");
    for (k, v) in pairs {
        w.write_record([k, v]).expect("in-memory writer");
    }
    finish(w)
}

/// One line per row; columns are the first row's keys, nested values as JSON.
fn table(rows: &[Value]) -> String {
    let cols: Vec<String> = rows[0]
        .as_object()
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).expect("in-memory writer");
    for row in rows {
        let cells: Vec<String> = cols.iter().map(|c| row.get(c).map(scalar).unwrap_or_default()).collect();
        w.write_record(&cells).expect("in-memory writer");
    }
    finish(w)
}
