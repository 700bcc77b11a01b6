//! Seeded generators for test inputs. The same seed always yields the same
//! object.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::OneForm;
use crate::geometry::{ChristoffelField, CoordOneForm, FormalChart};
use crate::group::{AnyGroup, Cyclic, Group, Matrix2, Symmetric};
use crate::jet::{BlockSpec, MatrixSeries, Rational, TruncatedSeries};
use crate::neighbor::{NeighborSpace, Vertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `S_4`, `Z_12` and `GL_2(F_5)`.
pub fn test_groups() -> [AnyGroup; 3] {
    [
        AnyGroup::Symmetric(Symmetric { degree: 4 }),
        AnyGroup::Cyclic(Cyclic { modulus: 12 }),
        AnyGroup::Matrix(Matrix2 { modulus: 5 }),
    ]
}

/// A connected graph on `min..=max` vertices grown by gluing each new
/// vertex onto an existing edge, plus a few chords.
pub fn triangle_rich_graph<R: Rng>(rng: &mut R, min: usize, max: usize) -> NeighborSpace {
    let n = rng.gen_range(min.max(3)..=max);
    let mut edges: Vec<(Vertex, Vertex)> = vec![(0, 1)];
    for v in 2..n {
        let (a, b) = *edges.choose(rng).unwrap();
        edges.push((a, v));
        edges.push((b, v));
        if rng.gen_bool(0.25) {
            let w = rng.gen_range(0..v);
            if w != a && w != b {
                edges.push((w, v));
            }
        }
    }
    NeighborSpace::from_indices(n, &edges).expect("generated edges are valid")
}

pub fn random_function<G: Group, R: Rng>(g: &G, n: usize, rng: &mut R) -> Vec<G::Elem> {
    (0..n).map(|_| g.random(rng)).collect()
}

/// The 4-cycle `a b c d` with every step `+1` in `Z_3`: closed (no mutual
/// triples) but the two paths from `a` to `c` integrate to 2 and 1.
pub fn holonomy_square() -> OneForm<Cyclic> {
    let s = NeighborSpace::build(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
        .expect("static space");
    OneForm::new(Arc::new(s), Cyclic { modulus: 3 }, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
        .expect("static form")
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let p = rng.gen_range(-3..=3);
    let q = *[1, 1, 1, 2, 3].choose(rng).unwrap();
    Rational::new(p, q)
}

/// Polynomial with random monomials of degree `lo..=hi` in the base
/// variables; each candidate monomial is kept with probability `density`.
pub fn random_polynomial<R: Rng>(spec: &Arc<BlockSpec>, order: u32, lo: u32, hi: u32, density: f64, rng: &mut R) -> TruncatedSeries {
    let n = spec.vars();
    let mut terms = Vec::new();
    for exps in exponents(n, lo, hi.min(order)) {
        if rng.gen_bool(density) {
            terms.push((exps, vec![], small_rational(rng)));
        }
    }
    TruncatedSeries::from_terms(spec, order, terms).expect("exponents fit the spec")
}

fn exponents(n: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, lo: u32, hi: u32, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            let d = hi - left;
            if d >= lo {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, lo, hi, out);
        }
        cur[i] = 0;
    }
    if lo <= hi {
        rec(0, hi, &mut cur, lo, hi, &mut out);
    }
    out
}

fn random_matrix<R: Rng>(spec: &Arc<BlockSpec>, order: u32, size: usize, lo: u32, hi: u32, density: f64, rng: &mut R) -> MatrixSeries {
    let entries = (0..size * size)
        .map(|_| random_polynomial(spec, order, lo, hi, density, rng))
        .collect();
    MatrixSeries::from_entries(spec, order, size, size, entries).expect("uniform entries")
}

/// A polynomial 1-form with every component random through `order`.
pub fn random_form<R: Rng>(dim: usize, size: usize, order: u32, rng: &mut R) -> CoordOneForm {
    let spec = Arc::new(BlockSpec::base(dim));
    let omega = (0..dim).map(|_| random_matrix(&spec, order, size, 0, order, 0.3, rng)).collect();
    CoordOneForm::new(omega).expect("uniform components")
}

/// `f = 1 + (random terms of degree 1..=order)`.
pub fn random_unipotent_map<R: Rng>(dim: usize, size: usize, order: u32, rng: &mut R) -> MatrixSeries {
    let spec = Arc::new(BlockSpec::base(dim));
    let id = MatrixSeries::identity(&spec, order, size);
    id.try_add(&random_matrix(&spec, order, size, 1, order, 0.25, rng)).expect("same ring")
}

/// Like [`random_unipotent_map`] but with a random invertible constant term.
pub fn random_invertible_map<R: Rng>(dim: usize, size: usize, order: u32, rng: &mut R) -> MatrixSeries {
    let spec = Arc::new(BlockSpec::base(dim));
    let c = loop {
        let c: Vec<Vec<Rational>> = (0..size).map(|_| (0..size).map(|_| small_rational(rng)).collect()).collect();
        if crate::jet::matrix::invert_rational(&c).is_some() {
            break c;
        }
    };
    let f = random_unipotent_map(dim, size, order, rng);
    MatrixSeries::from_rationals(&spec, order, &c).try_mul(&f).expect("same ring")
}

/// `psi = x + (random terms of degree 2..=order)`.
pub fn random_chart<R: Rng>(dim: usize, order: u32, rng: &mut R) -> FormalChart {
    let spec = Arc::new(BlockSpec::base(dim));
    let phi = (0..dim)
        .map(|c| {
            let x = TruncatedSeries::var(&spec, order, c).expect("in range");
            x.try_add(&random_polynomial(&spec, order, 2, order, 0.3, rng)).expect("same ring")
        })
        .collect();
    FormalChart::new(phi).expect("identity linear part")
}

/// Symmetric in the lower indices, random through `order`.
pub fn random_symmetric_field<R: Rng>(dim: usize, order: u32, rng: &mut R) -> ChristoffelField {
    let spec = Arc::new(BlockSpec::base(dim));
    let mut g = vec![TruncatedSeries::zero(&spec, order); dim * dim * dim];
    for c in 0..dim {
        for a in 0..dim {
            for b in a..dim {
                let s = random_polynomial(&spec, order, 0, order, 0.35, rng);
                g[(c * dim + a) * dim + b] = s.clone();
                g[(c * dim + b) * dim + a] = s;
            }
        }
    }
    ChristoffelField::new(dim, g).expect("uniform components")
}

/// Constant symmetric field with `Gamma^0_00 = 2`, `Gamma^1_01 = Gamma^1_10 = 1`;
/// the matrices `(A_a)^c_b = Gamma^c_ab` do not commute, so it is curved.
pub fn curved_constant_field(order: u32) -> ChristoffelField {
    ChristoffelField::constant(2, order, |c, a, b| match (c, a, b) {
        (0, 0, 0) => Rational::from_int(2),
        (1, 0, 1) | (1, 1, 0) => Rational::one(),
        _ => Rational::zero(),
    })
}

/// `Gamma^c_ab = delta^c_a delta_b0 + delta^c_b delta_a0`: constant,
/// symmetric and curved.
pub fn shear_field(order: u32) -> ChristoffelField {
    ChristoffelField::constant(2, order, |c, a, b| {
        let v = i64::from(c == a && b == 0) + i64::from(c == b && a == 0);
        Rational::from_int(v)
    })
}

/// Constant symmetric field with commuting `A_a`: flat.
pub fn diagonal_field(order: u32) -> ChristoffelField {
    ChristoffelField::constant(2, order, |c, a, b| {
        Rational::from_int(i64::from(c == a && a == b))
    })
}

/// A labelled corpus of symmetric fields, flat and curved, all of the
/// given order, two-dimensional.
pub fn gamma_corpus(seed: u64, order: u32) -> Vec<(String, ChristoffelField)> {
    let mut r = rng(seed);
    let mut out = vec![
        ("zero".to_string(), ChristoffelField::zero(2, order)),
        ("curved-constant".to_string(), curved_constant_field(order)),
        ("shear".to_string(), shear_field(order)),
        ("diagonal".to_string(), diagonal_field(order)),
    ];
    for i in 0..10 {
        let psi = random_chart(2, order + 2, &mut r);
        let g = ChristoffelField::zero(2, order).pullback(&psi).expect("chart pullback");
        out.push((format!("pullback-{i}"), g));
    }
    for i in 0..4 {
        let psi = random_chart(2, order + 2, &mut r);
        let g = diagonal_field(order).pullback(&psi).expect("chart pullback");
        out.push((format!("diagonal-pullback-{i}"), g));
    }
    for i in 0..4 {
        let psi = random_chart(2, order + 2, &mut r);
        let g = curved_constant_field(order).pullback(&psi).expect("chart pullback");
        out.push((format!("curved-pullback-{i}"), g));
    }
    for i in 0..8 {
        out.push((format!("random-{i}"), random_symmetric_field(2, order, &mut r)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = triangle_rich_graph(&mut rng(3), 5, 40);
        let b = triangle_rich_graph(&mut rng(3), 5, 40);
        assert_eq!(a.to_file(), b.to_file());
        assert_eq!(a.components().len(), 1);
        assert!(!a.mutual_triples().is_empty());
        assert_eq!(random_form(2, 2, 4, &mut rng(1)), random_form(2, 2, 4, &mut rng(1)));
    }

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents(2, 0, 2).len(), 6);
        assert_eq!(exponents(2, 2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(exponents(3, 1, 1).len(), 3);
    }

    #[test]
    fn corpus_is_mixed_and_symmetric() {
        let corpus = gamma_corpus(11, 3);
        assert!(corpus.len() >= 25);
        assert!(corpus.iter().all(|(_, g)| g.is_symmetric() && g.order() == 3));
    }
}
