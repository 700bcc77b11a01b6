//! The files under `fixtures/` are generated here. The test fails when a
//! checked-in file differs from what the generators produce; run with
//! `NCALC_BLESS=1` to rewrite them.

use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Value};

use ncalc::affine::{AffineConnection, ConnectionFile};
use ncalc::fixtures::{self, rng};
use ncalc::forms::OneForm;
use ncalc::geometry::io::{ChartFile, GammaFile, MapFile, OmegaFile};
use ncalc::geometry::{ChristoffelField, CoordOneForm};
use ncalc::group::{AnyGroup, Element, Symmetric};
use ncalc::jet::Rational;
use ncalc::neighbor::NeighborSpace;

const SEED: u64 = 0x5eed;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn canonical(v: impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(&serde_json::to_value(v).unwrap()).unwrap();
    s.push('\n');
    s
}

fn unit(i: usize, j: usize) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![Rational::zero(); 2]; 2];
    m[i][j] = Rational::one();
    m
}

fn generate() -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let space = |v: &[&str], e: &[(&str, &str)]| NeighborSpace::build(v, e).unwrap().to_file();

    out.push(("triangle.space.json", canonical(space(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]))));
    out.push(("disjoint.space.json", canonical(space(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]))));
    out.push((
        "malformed.space.json",
        canonical(json!({"vertices": ["a", "b"], "edges": [["a", "b"], ["b", "q"]]})),
    ));
    out.push(("point.space.json", canonical(space(&["p"], &[]))));
    out.push(("empty.form.json", canonical(json!({"group": {"kind": "cyclic", "modulus": 5}, "values": {}}))));

    let mut r = rng(SEED);
    let s = Arc::new(fixtures::triangle_rich_graph(&mut r, 8, 12));
    let g = AnyGroup::Symmetric(Symmetric { degree: 4 });
    let f = fixtures::random_function(&g, s.len(), &mut r);
    out.push(("coboundary.space.json", canonical(s.to_file())));
    out.push(("coboundary.form.json", canonical(OneForm::coboundary(Arc::clone(&s), g, &f).to_file())));

    let h = fixtures::holonomy_square();
    out.push(("holonomy.space.json", canonical(h.space().to_file())));
    let values: Vec<_> = h.stored().iter().map(|(&(x, y), &v)| (x, y, Element::Int(v))).collect();
    let h = OneForm::new(Arc::clone(h.space()), AnyGroup::Cyclic(*h.group()), values).unwrap();
    out.push(("holonomy.form.json", canonical(h.to_file())));

    out.push(("lattice5.conn.json", canonical(json!({"kind": "lattice", "modulus": 5, "dim": 2}))));
    let perm: Vec<usize> = (0..25).map(|v| (7 * v + 3) % 25).collect();
    out.push(("twisted5.conn.json", canonical(ConnectionFile::Twisted { modulus: 5, dim: 2, perm })));
    out.push(("bent_row.conn.json", canonical(AffineConnection::bent_row().to_table_file())));
    // [1 0 3] := 0 breaks inversion: [0 3 0] = 0 - 3 + 0 is not 1
    let corrupted = AffineConnection::lattice(3, 2).with_entry(1, 0, 3, 0).unwrap();
    out.push(("corrupted.conn.json", canonical(corrupted.to_table_file())));

    out.push(("omega_random.json", canonical(OmegaFile::from_form(&fixtures::random_form(2, 2, 4, &mut r)))));
    let open = CoordOneForm::constant(2, 4, &[unit(0, 1), unit(1, 0)]).unwrap();
    out.push(("omega_open.json", canonical(OmegaFile::from_form(&open))));
    out.push(("map_invertible.json", canonical(MapFile::from_matrix(&fixtures::random_invertible_map(2, 2, 4, &mut r)))));

    let psi = fixtures::random_chart(2, 6, &mut r);
    let pulled = ChristoffelField::zero(2, 4).pullback(&psi).unwrap();
    out.push(("psi.chart.json", canonical(ChartFile::from_chart(&psi))));
    out.push(("gamma_pullback.json", canonical(GammaFile::from_field(&pulled))));
    let flat = fixtures::diagonal_field(3).pullback(&fixtures::random_chart(2, 5, &mut r)).unwrap();
    out.push(("gamma_flat.json", canonical(GammaFile::from_field(&flat))));
    out.push(("gamma_curved.json", canonical(GammaFile::from_field(&fixtures::curved_constant_field(4)))));
    let mut torsion: Value = serde_json::to_value(GammaFile::from_field(&ChristoffelField::zero(2, 2))).unwrap();
    torsion["gamma"] = json!({"1|0|1": [{"exp": [0, 0], "coef": "1"}]});
    out.push(("gamma_torsion.json", canonical(torsion)));
    out
}

#[test]
fn fixtures_are_current() {
    let dir = fixture_dir();
    let bless = std::env::var_os("NCALC_BLESS").is_some();
    let mut stale = Vec::new();
    for (name, text) in generate() {
        let path = dir.join(name);
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &text).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
            stale.push(name);
        }
    }
    assert!(stale.is_empty(), "stale fixtures {stale:?}; rerun with NCALC_BLESS=1");
}
