//! Acceptance gate: one line per criterion, exact checks, pinned time limits.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ncalc::affine::{AffineConnection, Heap};
use ncalc::fixtures::{self, rng};
use ncalc::forms::OneForm;
use ncalc::geometry::{heap_grid_residual, is_zero, maurer_cartan, ChristoffelField, CoordOneForm};
use ncalc::group::{AnyGroup, Group};
use ncalc::jet::Rational;
use ncalc::neighbor::{Independence, NeighborSpace, TreeKind};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

const FIXTURE_SEED: u64 = 0x5eed;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn discrete_fixtures() -> Vec<(Arc<NeighborSpace>, AnyGroup, Vec<<AnyGroup as Group>::Elem>)> {
    let groups = fixtures::test_groups();
    let mut r = rng(FIXTURE_SEED);
    (0..50)
        .map(|i| {
            let space = Arc::new(fixtures::triangle_rich_graph(&mut r, 6, 40));
            let g = groups[i % 3];
            let f = fixtures::random_function(&g, space.len(), &mut r);
            (space, g, f)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    for (i, (space, g, f)) in discrete_fixtures().into_iter().enumerate() {
        let w = OneForm::coboundary(Arc::clone(&space), g, &f);
        let x0 = i % space.len();
        let inv = g.invert(&f[x0]);
        let p = w.primitive(x0).map_err(|e| e.to_string())?.map_err(|c| format!("fixture {i}: conflict {c:?}"))?;
        for v in space.vertices() {
            ensure(p.values[v].as_ref() == Some(&g.compose(&inv, &f[v])), || {
                format!("fixture {i}: primitive differs at vertex {v}")
            })?;
        }
        let dfs = space.spanning_tree(x0, TreeKind::Depth).map_err(|e| e.to_string())?;
        let q = w.primitive_along(&dfs).map_err(|c| format!("fixture {i}: depth-first conflict {c:?}"))?;
        ensure(q == p, || format!("fixture {i}: breadth- and depth-first primitives differ"))?;
    }
    Ok("50 fixtures over S4, Z12, GL2(F5)".into())
}

fn criterion_2() -> Outcome {
    let mut r = rng(FIXTURE_SEED ^ 2);
    let mut pairs = 0;
    for (i, (space, g, f)) in discrete_fixtures().into_iter().enumerate() {
        let w = OneForm::coboundary(Arc::clone(&space), g, &f);
        for _ in 0..20 {
            let x = r.gen_range(0..space.len());
            let y = r.gen_range(0..space.len());
            match w.path_independence(x, y, 5) {
                Independence::Common { .. } | Independence::Unreachable => {}
                Independence::Witness { .. } => return Err(format!("fixture {i}: paths {x} -> {y} disagree")),
            }
            pairs += 1;
        }
    }
    let sq = fixtures::holonomy_square();
    match sq.path_independence(0, 2, 2) {
        Independence::Witness {
            first_value,
            second_value,
            ..
        } if first_value != second_value => {}
        other => return Err(format!("holonomy square gave {other:?}")),
    }
    Ok(format!("{pairs} endpoint pairs, paths of length <= 5; holonomy witness found"))
}

fn twist(m: usize, seed: u64) -> AffineConnection {
    let mut perm: Vec<usize> = (0..m * m).collect();
    perm.shuffle(&mut rng(seed));
    AffineConnection::twisted(m, 2, &perm).expect("permutation")
}

fn all_cubes(c: &AffineConnection) -> Result<(usize, Vec<[bool; 3]>), String> {
    let s = c.space();
    let mut count = 0;
    let mut failures = Vec::new();
    for p0 in s.vertices() {
        let m = s.monad(p0).map_err(|e| e.to_string())?;
        for &p1 in &m {
            for &p2 in &m {
                for &p4 in &m {
                    let r = c.cube_check(p0, p1, p2, p4).map_err(|e| e.to_string())?;
                    count += 1;
                    if !r.holds() {
                        failures.push(r.equations);
                    }
                }
            }
        }
    }
    Ok((count, failures))
}

fn criterion_3() -> Outcome {
    for (name, c) in [("lattice Z5^2", AffineConnection::lattice(5, 2)), ("twisted Z5^2", twist(5, 3))] {
        let (count, failures) = all_cubes(&c)?;
        ensure(failures.is_empty(), || format!("{name}: {} of {count} cubes fail", failures.len()))?;
    }
    let (count, failures) = all_cubes(&AffineConnection::bent_row())?;
    let first = failures.first().ok_or("bent row: every cube holds")?;
    let broken: Vec<usize> = (0..3).filter(|&k| !first[k]).collect();
    ensure(!broken.is_empty(), || "failing cube names no equation".into())?;
    Ok(format!(
        "lattice and twisted Z5^2 hold; bent row fails {}/{count}, first breaks equation(s) {broken:?}",
        failures.len()
    ))
}

fn criterion_4() -> Outcome {
    let cases = [
        ("lattice Z3^2", AffineConnection::lattice(3, 2)),
        ("twisted Z3^2", twist(3, 4)),
        ("lattice Z5^2", AffineConnection::lattice(5, 2)),
        ("twisted Z5^2", twist(5, 5)),
    ];
    let mut checks = 0;
    for (name, c) in cases {
        let heap = Heap::new(&c).map_err(|e| format!("{name}: {e}"))?;
        let r = heap.verify_laws(30, 0, 0).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.exhaustive, || format!("{name}: not exhaustive"))?;
        ensure(r.passed(), || format!("{name}: {:?}", r.failures))?;
        checks += r.checks;
    }
    Ok(format!("4 connections, {checks} exhaustive law instances"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(FIXTURE_SEED ^ 5);
    for i in 0..20 {
        let w = fixtures::random_form(2, 2, 4, &mut r);
        let res = w.basicx_verify().map_err(|e| e.to_string())?;
        ensure(res.is_zero(), || format!("form {i}: nonzero residual"))?;
    }
    Ok("20 random forms, n=2 w=2 N=4, residual 0".into())
}

fn e(i: usize, j: usize) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![Rational::zero(); 2]; 2];
    m[i][j] = Rational::one();
    m
}

fn counterexample() -> CoordOneForm {
    CoordOneForm::constant(2, 4, &[e(0, 1), e(1, 0)]).expect("constant form")
}

fn criterion_6() -> Outcome {
    let mut r = rng(FIXTURE_SEED ^ 6);
    let mut forms = Vec::new();
    for i in 0..10 {
        let f = fixtures::random_invertible_map(2, 2, 5, &mut r);
        let w = maurer_cartan(&f).map_err(|e| e.to_string())?;
        let res = w.closedness_residual().map_err(|e| e.to_string())?;
        ensure(res.is_zero(), || format!("Maurer-Cartan fixture {i}: nonzero residual"))?;
        forms.push(w);
    }
    let bad = counterexample();
    ensure(!bad.closedness_residual().map_err(|e| e.to_string())?.is_zero(), || {
        "E12/E21 residual vanishes".into()
    })?;
    forms.push(bad);
    for i in 0..5 {
        forms.push(fixtures::random_form(2, 2, 3 + i % 2, &mut r));
    }
    for (i, w) in forms.iter().enumerate() {
        let a = w.closedness_residual().map_err(|e| e.to_string())?;
        let b = w.closedness_residual_paired().map_err(|e| e.to_string())?;
        ensure(a == b, || format!("fixture {i}: tensor and pair routes differ"))?;
    }
    Ok(format!("10 closed, E12/E21 open, both routes agree on {} forms", forms.len()))
}

fn criterion_7() -> Outcome {
    let mut r = rng(FIXTURE_SEED ^ 7);
    for i in 0..10 {
        let f0 = fixtures::random_unipotent_map(2, 2, 5, &mut r);
        let w = maurer_cartan(&f0).map_err(|e| e.to_string())?;
        let f = w.formal_primitive().map_err(|e| e.to_string())?.map_err(|o| format!("fixture {i}: obstruction {o:?}"))?;
        ensure(f == f0, || format!("fixture {i}: primitive differs from f0"))?;
    }
    let ob = counterexample()
        .formal_primitive()
        .map_err(|e| e.to_string())?
        .err()
        .ok_or("E12/E21 has a primitive")?;
    ensure(ob.degree == 1, || format!("obstruction at degree {}", ob.degree))?;
    Ok("10 round trips to order 5; E12/E21 obstructed at degree 1".into())
}

fn criterion_8() -> Outcome {
    let mut r = rng(FIXTURE_SEED ^ 8);
    let ts = [Rational::new(1, 2), Rational::from_int(2), Rational::from_int(-1)];
    for i in 0..10 {
        let g = fixtures::random_symmetric_field(2, 4, &mut r);
        for t in &ts {
            let rep = g.second_order_scalar(t).map_err(|e| e.to_string())?;
            ensure(rep.passed(), || format!("field {i}, t = {t}: residual nonzero"))?;
        }
    }
    Ok("10 symmetric fields at N=4, t in {1/2, 2, -1}".into())
}

fn criterion_9() -> Outcome {
    let mut r = rng(FIXTURE_SEED ^ 9);
    for i in 0..10 {
        let psi = fixtures::random_chart(2, 6, &mut r);
        let g = ChristoffelField::zero(2, 4).pullback(&psi).map_err(|e| e.to_string())?;
        let chart = g.formal_chart(6).map_err(|e| e.to_string())?.map_err(|o| format!("fixture {i}: {o:?}"))?;
        ensure(chart == psi, || format!("fixture {i}: chart differs from psi"))?;
        ensure(is_zero(&chart.trivialization_residual(&g).map_err(|e| e.to_string())?), || {
            format!("fixture {i}: trivialization residual nonzero")
        })?;
        ensure(is_zero(&heap_grid_residual(&g, &chart).map_err(|e| e.to_string())?), || {
            format!("fixture {i}: grid and chart heap differ")
        })?;
    }
    let curved = fixtures::curved_constant_field(4);
    let ob = curved.formal_chart(6).map_err(|e| e.to_string())?.err().ok_or("curved field has a chart")?;
    let v = curved.curvature_valuation().map_err(|e| e.to_string())?;
    ensure(Some(ob.degree) == v, || format!("obstruction at {} but curvature valuation {v:?}", ob.degree))?;
    Ok("10 pullback charts recovered to order 6; curved field obstructed".into())
}

fn criterion_10() -> Outcome {
    let corpus = fixtures::gamma_corpus(FIXTURE_SEED, 3);
    ensure(corpus.len() >= 25, || format!("corpus has {} fields", corpus.len()))?;
    let (mut flat, mut curved) = (0, 0);
    for (name, g) in &corpus {
        let residual_zero = is_zero(&g.flatness_residual().map_err(|e| e.to_string())?);
        let curvature_zero = g.curvature().map_err(|e| e.to_string())?.iter().all(|s| s.is_zero());
        ensure(residual_zero == curvature_zero, || {
            format!("{name}: residual zero {residual_zero}, curvature zero {curvature_zero}")
        })?;
        if curvature_zero {
            flat += 1;
        } else {
            curved += 1;
        }
    }
    ensure(flat > 0 && curved > 0, || "corpus is not mixed".into())?;
    Ok(format!("{} fields ({flat} flat, {curved} curved) agree", corpus.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "coboundary round-trip", 10, criterion_1),
        (2, "path independence", 30, criterion_2),
        (3, "cube lemma", 30, criterion_3),
        (4, "heap theorems", 60, criterion_4),
        (5, "two-step expansion identity", 10, criterion_5),
        (6, "closedness criterion", 10, criterion_6),
        (7, "formal primitive", 10, criterion_7),
        (8, "second-order scalar law", 10, criterion_8),
        (9, "formal chart", 30, criterion_9),
        (10, "flatness convention cross-check", 10, criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(limit) => Err(format!("{msg}; over the {limit}s limit")),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("criterion {id:>2} {tag} {name}: {msg} [{:.2}s / {limit}s]", took.as_secs_f64());
        failed += usize::from(outcome.is_err());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
