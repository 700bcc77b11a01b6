use std::path::Path;

use serde_json::{json, Value};

use ncalc::neighbor::{NeighborSpace, SpaceError, SpaceFile};

use crate::report::{CmdResult, Outcome, Report};

pub fn check(mut report: Report, file: &Path) -> CmdResult {
    let input = report.load("space", file)?;
    let parsed: SpaceFile = match serde_json::from_str(&input.text) {
        Ok(f) => f,
        Err(e) => {
            report.outcome = Outcome::Fail;
            report.witness(json!({"error": e.to_string(), "line": e.line(), "column": e.column()}));
            return Ok(report);
        }
    };
    let space = match NeighborSpace::build(&parsed.vertices, &parsed.edges) {
        Ok(s) => s,
        Err(e) => {
            report.outcome = Outcome::Fail;
            report.witness(locate(&input.text, &parsed, &e));
            return Ok(report);
        }
    };
    let components: Vec<Vec<&str>> = space
        .components()
        .iter()
        .map(|c| c.iter().map(|&v| space.name(v)).collect())
        .collect();
    report.set("vertices", space.len());
    report.set("edges", space.edge_count());
    report.set("components", components);
    report.set("normalized", space.to_file());
    Ok(report)
}

fn locate(text: &str, f: &SpaceFile, e: &SpaceError) -> Value {
    let mut w = json!({"error": e.to_string()});
    match e {
        SpaceError::UnknownVertex(name) => {
            if let Some(i) = f.edges.iter().position(|(a, b)| a == name || b == name) {
                w["edge"] = json!(i);
                if let Some(line) = element_line(text, "edges", i) {
                    w["line"] = json!(line);
                }
            }
        }
        SpaceError::DuplicateVertex(name) => {
            if let Some(i) = f.vertices.iter().rposition(|v| v == name) {
                w["vertex"] = json!(i);
                if let Some(line) = element_line(text, "vertices", i) {
                    w["line"] = json!(line);
                }
            }
        }
        _ => {}
    }
    w
}

/// 1-based line of the `index`-th element of the top-level array `key`,
/// found by a small scan that respects strings and nesting.
fn element_line(text: &str, key: &str, index: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let start = text.find(&needle)? + needle.len();
    let open = start + text[start..].find('[')?;
    let bytes = text.as_bytes();
    let (mut depth, mut seen, mut in_str, mut escaped) = (0usize, 0usize, false, false);
    let mut expecting = true;
    for (k, &c) in bytes.iter().enumerate().skip(open) {
        if in_str {
            match c {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            b' ' | b'\n' | b'\r' | b'\t' => continue,
            b'[' | b'{' => depth += 1,
            b']' | b'}' => {
                depth -= 1;
                if depth == 0 {
                    return None;
                }
            }
            b',' if depth == 1 => {
                expecting = true;
                continue;
            }
            b'"' => in_str = true,
            _ => {}
        }
        if expecting && depth >= 1 && k > open {
            if seen == index {
                return Some(text[..k].matches('\n').count() + 1);
            }
            seen += 1;
            expecting = false;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::element_line;

    #[test]
    fn finds_element_lines() {
        let text = "{\"vertices\": [\"a\", \"b\"],\n \"edges\": [\n  [\"a\", \"b\"],\n  [\"a\", \"zz\"]\n]}";
        assert_eq!(element_line(text, "edges", 0), Some(3));
        assert_eq!(element_line(text, "edges", 1), Some(4));
        assert_eq!(element_line(text, "edges", 2), None);
        assert_eq!(element_line(text, "vertices", 1), Some(1));
    }
}
