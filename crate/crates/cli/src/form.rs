use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use ncalc::forms::{FormFile, OneForm};
use ncalc::group::{AnyGroup, Group};
use ncalc::neighbor::{Independence, NPath, NeighborSpace};

use crate::report::{CmdResult, Report, UsageError};

/// Witness lists are cut to this many entries; counts stay exact.
const MAX_WITNESSES: usize = 10;

fn load(report: &mut Report, space: &Path, form: &Path) -> Result<OneForm<AnyGroup>, UsageError> {
    let s = report.load("space", space)?;
    let space = Arc::new(NeighborSpace::parse(&s.text)?);
    let f = report.load("form", form)?;
    let file: FormFile = serde_json::from_str(&f.text)?;
    Ok(OneForm::from_file(space, &file)?)
}

fn names(space: &NeighborSpace, p: &NPath) -> Vec<String> {
    p.points().iter().map(|&v| space.name(v).to_string()).collect()
}

pub fn check(mut report: Report, space: &Path, form: &Path, max_len: usize) -> CmdResult {
    let w = load(&mut report, space, form)?;
    let s = Arc::clone(w.space());
    let name = |v| s.name(v).to_string();

    let closed = w.closedness_violations();
    report.set("closedness_violations", closed.len());
    for &(x, y, z) in closed.iter().take(MAX_WITNESSES) {
        report.witness(json!({"kind": "closedness", "triple": [name(x), name(y), name(z)]}));
    }
    let quads = w.quadrangle_violations();
    report.set("quadrangle_violations", quads.len());
    for &(x, y, z, u) in quads.iter().take(MAX_WITNESSES) {
        report.witness(json!({"kind": "quadrangle", "vertices": [name(x), name(y), name(z), name(u)]}));
    }

    let mut pairs = 0usize;
    let mut witness = None;
    'outer: for comp in s.components() {
        for (i, &x) in comp.iter().enumerate() {
            for &y in &comp[i..] {
                match w.path_independence(x, y, max_len) {
                    Independence::Common { .. } => pairs += 1,
                    Independence::Unreachable => {}
                    Independence::Witness {
                        first,
                        first_value,
                        second,
                        second_value,
                    } => {
                        witness = Some(json!({
                            "kind": "path_dependence",
                            "first": {"path": names(&s, &first), "value": w.group().encode(&first_value)},
                            "second": {"path": names(&s, &second), "value": w.group().encode(&second_value)},
                        }));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.set("max_len", max_len);
    report.set("independent_pairs", pairs);
    report.set("path_independent", witness.is_none());
    report.fail_if(!closed.is_empty() || !quads.is_empty() || witness.is_some());
    if let Some(wit) = witness {
        report.witness(wit);
    }
    Ok(report)
}

pub fn integrate(mut report: Report, space: &Path, form: &Path, base: Option<&str>) -> CmdResult {
    let w = load(&mut report, space, form)?;
    let s = Arc::clone(w.space());
    let base = match base {
        Some(b) => s.vertex(b)?,
        None if s.is_empty() => return Err(UsageError::new("empty space has no base point")),
        None => 0,
    };
    report.set("base", s.name(base));
    match w.primitive(base)? {
        Ok(p) => {
            let table: serde_json::Map<String, Value> = p
                .values
                .iter()
                .enumerate()
                .filter_map(|(v, e)| e.as_ref().map(|e| (s.name(v).to_string(), w.group().encode(e))))
                .collect();
            report.set("primitive", table);
        }
        Err(c) => {
            report.fail_if(true);
            report.witness(json!({
                "kind": "conflict",
                "edge": [s.name(c.edge.0), s.name(c.edge.1)],
                "path_to_first": names(&s, &c.path_to_first),
                "path_to_second": names(&s, &c.path_to_second),
                "expected": w.group().encode(&c.expected),
                "found": w.group().encode(&c.found),
            }));
        }
    }
    Ok(report)
}
