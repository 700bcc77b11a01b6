use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use ncalc::geometry::io::{ChartFile, GammaFile, MapFile, OmegaFile};
use ncalc::geometry::{self, heap_grid_residual, maurer_cartan, ChristoffelField, ClosednessResidual, CoordOneForm};
use ncalc::jet::matrix::invert_rational;
use ncalc::jet::{MatrixSeries, Rational};

use crate::report::{self, canonical_of, CmdResult, Report, UsageError};

pub const DEFAULT_MAX_ORDER: u32 = 10;

/// Exactly one of these is given on the command line.
pub enum Source {
    Gamma(PathBuf),
    Omega(PathBuf),
    Map(PathBuf),
}

pub fn max_order() -> Result<u32, UsageError> {
    match std::env::var("NCALC_MAX_ORDER") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| UsageError::new(format!("NCALC_MAX_ORDER must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn check_order(order: u32, have: u32, role: &str) -> Result<(), UsageError> {
    let cap = max_order()?;
    if order > cap {
        return Err(UsageError::new(format!("order {order} exceeds the cap {cap} (set NCALC_MAX_ORDER to raise it)")));
    }
    if have < order {
        return Err(UsageError::new(format!("the {role} file is only known through order {have}, below {order}")));
    }
    Ok(())
}

fn load_gamma(report: &mut Report, path: &Path) -> Result<ChristoffelField, UsageError> {
    let input = report.load("gamma", path)?;
    let file: GammaFile = serde_json::from_str(&input.text)?;
    Ok(file.to_field()?)
}

fn load_omega(report: &mut Report, path: &Path) -> Result<CoordOneForm, UsageError> {
    let input = report.load("omega", path)?;
    let file: OmegaFile = serde_json::from_str(&input.text)?;
    Ok(file.to_form()?)
}

fn load_map(report: &mut Report, path: &Path) -> Result<MatrixSeries, UsageError> {
    let input = report.load("map", path)?;
    let file: MapFile = serde_json::from_str(&input.text)?;
    Ok(file.to_matrix()?)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), UsageError> {
    if let Some(p) = out {
        std::fs::write(p, text).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn residual(r: &ClosednessResidual) -> Value {
    if r.is_zero() {
        return Value::from("0");
    }
    let m: Map<String, Value> = r
        .entries
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|((a, b), m)| (format!("{a}|{b}"), report::matrix(m)))
        .collect();
    Value::Object(m)
}

/// Both closedness routes, recorded under `closedness`; returns whether
/// they agree.
fn closedness(report: &mut Report, w: &CoordOneForm) -> Result<bool, UsageError> {
    let tensor = w.closedness_residual()?;
    let paired = w.closedness_residual_paired()?;
    let agree = tensor == paired;
    let first = tensor.first_nonzero().map(|((a, b), _)| [a, b]);
    report.set(
        "closedness",
        json!({
            "tensor": residual(&tensor),
            "paired": residual(&paired),
            "routes_agree": agree,
            "closed": tensor.is_zero(),
            "first_nonzero": first,
        }),
    );
    Ok(agree)
}

fn verify_form(report: &mut Report, w: &CoordOneForm) -> Result<(), UsageError> {
    let basicx = w.basicx_verify()?;
    report.set("basicx_residual", report::matrix(&basicx));
    let agree = closedness(report, w)?;
    report.fail_if(!basicx.is_zero() || !agree);
    Ok(())
}

fn verify_gamma(report: &mut Report, g: &ChristoffelField) -> Result<(), UsageError> {
    let torsion = geometry::is_zero(&g.lambda_torsion_residual()?);
    let flat_lambda = geometry::is_zero(&g.flatness_residual()?);
    let valuation = g.curvature_valuation()?;
    let flat = valuation.is_none();
    report.set("torsion_free", torsion);
    report.set("flat", flat);
    report.set("curvature_valuation", valuation);
    report.set("flatness_agrees_with_curvature", flat_lambda == flat);
    let mut scalar = Map::new();
    let mut scalar_ok = true;
    for t in [Rational::new(1, 2), Rational::from_int(2), Rational::from_int(-1)] {
        let r = g.second_order_scalar(&t)?;
        scalar_ok &= r.passed();
        scalar.insert(
            t.to_string(),
            json!({
                "residual": report::point(&r.residual),
                "midpoint_residual": report::point(&r.midpoint_residual),
                "swap_invariant": r.swap_invariant,
            }),
        );
    }
    report.set("second_order_scalar", scalar);
    let cube = g.cube_at_jets()?;
    report.set("cube_at_jets", json!({"holds": cube.holds(), "equations": cube.equations}));
    // the cube lemma is only promised for flat connections
    report.fail_if(!torsion || flat_lambda != flat || !scalar_ok || (flat && !cube.holds()));
    Ok(())
}

fn verify_map(report: &mut Report, f: &MatrixSeries) -> Result<(), UsageError> {
    let c = invert_rational(&f.constant_part()).ok_or_else(|| UsageError::new("f(0) is not invertible"))?;
    let w = maurer_cartan(f)?;
    report.set("omega", OmegaFile::from_form(&w));
    verify_form(report, &w)?;
    let expect = MatrixSeries::from_rationals(f.spec(), f.order(), &c).try_mul(f)?;
    let back = w.formal_primitive()?;
    let round_trip = back.as_ref().is_ok_and(|p| *p == expect);
    report.set("primitive_round_trip", round_trip);
    report.fail_if(!round_trip);
    Ok(())
}

pub fn verify(mut report: Report, order: u32, src: &Source) -> CmdResult {
    match src {
        Source::Omega(p) => {
            let w = load_omega(&mut report, p)?;
            check_order(order, w.order(), "omega")?;
            verify_form(&mut report, &w.truncate(order))?;
        }
        Source::Gamma(p) => {
            let g = load_gamma(&mut report, p)?;
            check_order(order, g.order(), "gamma")?;
            if let Some((c, a, b)) = g.first_asymmetry() {
                return Ok(report.untestable(format!("Gamma^{c}_{a}{b} differs from Gamma^{c}_{b}{a}; the connection has torsion")));
            }
            verify_gamma(&mut report, &g.truncate(order))?;
        }
        Source::Map(p) => {
            let f = load_map(&mut report, p)?;
            check_order(order, f.order(), "map")?;
            if order == 0 {
                return Err(UsageError::new("a map needs order at least 1"));
            }
            verify_map(&mut report, &f.truncate(order))?;
        }
    }
    report.set("order", order);
    Ok(report)
}

pub fn primitive(mut report: Report, order: u32, src: &Source, out: Option<&Path>) -> CmdResult {
    let Source::Omega(p) = src else {
        return Err(UsageError::new("jet primitive takes --omega"));
    };
    let w = load_omega(&mut report, p)?;
    check_order(order, w.order(), "omega")?;
    report.set("order", order);
    match w.truncate(order).formal_primitive()? {
        Ok(f) => {
            let file = MapFile::from_matrix(&f);
            write_out(out, &canonical_of(&file))?;
            report.set("map", file);
        }
        Err(ob) => {
            report.fail_if(true);
            report.witness(json!({
                "kind": "obstruction",
                "degree": ob.degree,
                "component": [ob.component.0, ob.component.1],
                "discrepancy": report::matrix(&ob.discrepancy),
            }));
        }
    }
    Ok(report)
}

pub fn chart(mut report: Report, order: u32, src: &Source, out: Option<&Path>) -> CmdResult {
    let Source::Gamma(p) = src else {
        return Err(UsageError::new("jet chart takes --gamma"));
    };
    let g = load_gamma(&mut report, p)?;
    let need = order.saturating_sub(2);
    check_order(order, g.order() + 2, "gamma")?;
    if let Some((c, a, b)) = g.first_asymmetry() {
        return Ok(report.untestable(format!("Gamma^{c}_{a}{b} differs from Gamma^{c}_{b}{a}; the connection has torsion")));
    }
    let g = g.truncate(need);
    report.set("order", order);
    match g.formal_chart(order)? {
        Ok(phi) => {
            let triv = phi.trivialization_residual(&g)?;
            let heap = heap_grid_residual(&g, &phi)?;
            report.set("trivialization_residual", report::point(&triv));
            report.set("heap_grid_residual", report::point(&heap));
            report.fail_if(!geometry::is_zero(&triv) || !geometry::is_zero(&heap));
            let file = ChartFile::from_chart(&phi);
            write_out(out, &canonical_of(&file))?;
            report.set("chart", file);
        }
        Err(ob) => {
            report.fail_if(true);
            let (c, e, a, b) = ob.component;
            report.witness(json!({
                "kind": "obstruction",
                "degree": ob.degree,
                "component": [c, e, a, b],
                "discrepancy": report::series(&ob.discrepancy),
            }));
        }
    }
    Ok(report)
}
