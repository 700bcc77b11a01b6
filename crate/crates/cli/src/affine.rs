use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;

use ncalc::affine::{AffineConnection, ConnectionFile, Heap, CUBE_EQUATIONS};
use ncalc::neighbor::{Independence, NPath, NeighborSpace, SpaceFile, Vertex};

use crate::report::{CmdResult, Report, UsageError};

fn load(report: &mut Report, conn: &Path) -> Result<AffineConnection, UsageError> {
    let input = report.load("conn", conn)?;
    let file: ConnectionFile = serde_json::from_str(&input.text)?;
    let dir = input.path.parent().map(Path::to_path_buf).unwrap_or_default();
    let c = file.build(|p| {
        let text = std::fs::read_to_string(dir.join(p))
            .map_err(|e| ncalc::format::FormatError::invalid(format!("{p}: {e}")))?;
        Ok(serde_json::from_str::<SpaceFile>(&text)?)
    })?;
    Ok(c)
}

/// Axiom failures as a reason string, `None` when the table is valid.
fn invalid_reason(c: &AffineConnection) -> Option<String> {
    let r = c.validate_axioms();
    (!r.is_valid()).then(|| {
        let first = r
            .missing
            .first()
            .or(r.bookkeeping.first())
            .or(r.unit_right.first())
            .or(r.unit_left.first())
            .or(r.inversion.first())
            .expect("some axiom fails");
        let s = c.space();
        format!(
            "connection fails its axioms, first at [{} {} {}]",
            s.name(first.0),
            s.name(first.1),
            s.name(first.2)
        )
    })
}

fn parse_path(space: &NeighborSpace, arg: &str) -> Result<NPath, UsageError> {
    let names: Vec<&str> = arg.split(',').map(str::trim).collect();
    Ok(space.validate_named_path(&names)?)
}

fn vertex_names(space: &NeighborSpace, vs: &[Vertex]) -> Vec<String> {
    vs.iter().map(|&v| space.name(v).to_string()).collect()
}

pub fn check(mut report: Report, conn: &Path) -> CmdResult {
    let c = load(&mut report, conn)?;
    let s = c.space();
    let r = c.validate_axioms();
    let axioms = [
        ("missing", &r.missing),
        ("bookkeeping", &r.bookkeeping),
        ("unit_right", &r.unit_right),
        ("unit_left", &r.unit_left),
        ("inversion", &r.inversion),
    ];
    let counts: BTreeMap<&str, usize> = axioms.iter().map(|(k, v)| (*k, v.len())).collect();
    for (k, v) in axioms {
        if let Some(&(z, x, y)) = v.first() {
            report.witness(json!({"axiom": k, "triple": vertex_names(s, &[z, x, y])}));
        }
    }
    report.set("vertices", s.len());
    report.set("admissible", c.admissible().count());
    report.set("axiom_failures", counts);
    report.set("symmetric", r.is_symmetric());
    if r.is_valid() && r.is_symmetric() {
        let v = c.weak_flatness_violations()?;
        report.set("weak_flatness_violations", v.len());
    }
    report.fail_if(!r.is_valid());
    Ok(report)
}

pub fn grid(mut report: Report, conn: &Path, y: &str, z: &str, x: Option<&str>, max_len: Option<usize>) -> CmdResult {
    let c = load(&mut report, conn)?;
    if let Some(reason) = invalid_reason(&c) {
        return Ok(report.untestable(reason));
    }
    let s = c.space();
    let (yp, zp) = (parse_path(s, y)?, parse_path(s, z)?);
    match x {
        None => {
            let g = c.grid2(&yp, &zp)?;
            let rows: Vec<Vec<String>> = g.u.iter().map(|r| vertex_names(s, r)).collect();
            report.set("grid", rows);
            report.set("codomain", s.name(g.codomain()));
        }
        Some(x) => {
            let xp = parse_path(s, x)?;
            let g = c.grid3(&xp, &yp, &zp)?;
            let cells: Vec<Vec<Vec<String>>> = g
                .w
                .iter()
                .map(|plane| plane.iter().map(|r| vertex_names(s, r)).collect())
                .collect();
            report.set("grid", cells);
            report.set("codomain", s.name(g.codomain()));
        }
    }
    if let Some(len) = max_len {
        match c.grid2_codomain_invariance(yp.domain(), yp.codomain(), zp.codomain(), len)? {
            Independence::Common { paths, .. } => report.set("path_pairs_agreeing", paths),
            Independence::Unreachable => report.set("path_pairs_agreeing", 0),
            Independence::Witness {
                first,
                first_value,
                second,
                second_value,
            } => {
                report.fail_if(true);
                report.witness(json!({
                    "kind": "codomain_dependence",
                    "first": {"path": vertex_names(s, first.points()), "codomain": s.name(first_value)},
                    "second": {"path": vertex_names(s, second.points()), "codomain": s.name(second_value)},
                }));
            }
        }
    }
    Ok(report)
}

pub fn cube(mut report: Report, conn: &Path, at: Option<&str>) -> CmdResult {
    let c = load(&mut report, conn)?;
    if let Some(reason) = invalid_reason(&c) {
        return Ok(report.untestable(reason));
    }
    if !c.validate_axioms().is_symmetric() {
        return Ok(report.untestable("connection is not symmetric"));
    }
    let s = c.space();
    let quads: Vec<[Vertex; 4]> = match at {
        Some(a) => {
            let v: Vec<Vertex> = a.split(',').map(|n| s.vertex(n.trim())).collect::<Result<_, _>>()?;
            let q: [Vertex; 4] = v
                .try_into()
                .map_err(|_| UsageError::new("--at takes four vertices p0,p1,p2,p4"))?;
            let m = s.monad(q[0])?;
            if !q[1..].iter().all(|v| m.contains(v)) {
                return Err(UsageError::new("p1, p2, p4 must neighbour p0"));
            }
            vec![q]
        }
        None => s
            .vertices()
            .flat_map(|p0| {
                let m = s.monad(p0).expect("vertex in range");
                let mut out = Vec::with_capacity(m.len().pow(3));
                for &p1 in &m {
                    for &p2 in &m {
                        for &p4 in &m {
                            out.push([p0, p1, p2, p4]);
                        }
                    }
                }
                out
            })
            .collect(),
    };
    let mut failing = 0usize;
    let mut broken = [0usize; 3];
    for q in &quads {
        let r = c.cube_check(q[0], q[1], q[2], q[3])?;
        if r.holds() {
            continue;
        }
        failing += 1;
        let idx: Vec<usize> = (0..3).filter(|&k| !r.equations[k]).collect();
        for &k in &idx {
            broken[k] += 1;
        }
        if failing == 1 {
            report.witness(json!({
                "quadruple": vertex_names(s, q),
                "values": vertex_names(s, &r.values),
                "broken_equations": idx.iter().map(|&k| CUBE_EQUATIONS[k]).collect::<Vec<_>>(),
            }));
        }
    }
    report.set("quadruples", quads.len());
    report.set("failing", failing);
    report.set("equation_failures", broken);
    report.fail_if(failing > 0);
    Ok(report)
}

pub fn heap(mut report: Report, conn: &Path, exhaustive_limit: usize, samples: usize, seed: u64) -> CmdResult {
    let c = load(&mut report, conn)?;
    let h = match Heap::new(&c) {
        Ok(h) => h,
        Err(e) => return Ok(report.untestable(e.to_string())),
    };
    let laws = h.verify_laws(exhaustive_limit, samples, seed)?;
    if let Some(seed) = laws.seed {
        report.seed(seed);
    }
    let s = c.space();
    for f in &laws.failures {
        report.witness(json!({"law": f.law, "vertices": vertex_names(s, &f.vertices)}));
    }
    report.set("checks", laws.checks);
    report.set("exhaustive", laws.exhaustive);
    // element orders of +_o at the first vertex of each component identify
    // the group, e.g. 24 elements of order 5 and a unit for Z_5^2
    let mut groups = Vec::new();
    for comp in s.components().into_iter().filter(|_| laws.passed()) {
        let o = comp[0];
        let mut orders = BTreeMap::new();
        for &x in &comp {
            let (mut y, mut k) = (x, 1usize);
            while y != o {
                y = h.add(o, y, x)?;
                k += 1;
            }
            *orders.entry(k.to_string()).or_insert(0usize) += 1;
        }
        groups.push(json!({"base": s.name(o), "order": comp.len(), "element_orders": orders}));
    }
    report.set("groups", groups);
    report.fail_if(!laws.passed());
    Ok(report)
}
