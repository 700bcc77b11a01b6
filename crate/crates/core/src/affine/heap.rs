//! Group structures extracted from a flat symmetric connection.
//!
//! The ternary operation is extended to non-neighbours by grids over the
//! breadth-first tree paths; `x +_o y` is the extended `[xoy]`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::grid::GridError;
use super::{summarize, AffineConnection};
use crate::neighbor::{NPath, SpanningTree, TreeKind, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeapError {
    #[error("heap extraction needs {0}")]
    Precondition(String),
    #[error("{0} and {1} lie in different components")]
    DifferentComponents(Vertex, Vertex),
    #[error(transparent)]
    Grid(#[from] GridError),
}

pub struct Heap<'a> {
    conn: &'a AffineConnection,
    trees: Vec<SpanningTree>,
}

impl<'a> Heap<'a> {
    /// Checks that the connection is valid, symmetric and weakly flat.
    pub fn new(conn: &'a AffineConnection) -> Result<Self, HeapError> {
        let report = conn.validate_axioms();
        if !report.is_valid() {
            return Err(HeapError::Precondition(format!(
                "a valid connection ({})",
                summarize(&report)
            )));
        }
        if !report.is_symmetric() {
            return Err(HeapError::Precondition("a symmetric connection".into()));
        }
        let flat = conn
            .weak_flatness_violations()
            .map_err(|e| HeapError::Precondition(e.to_string()))?;
        if !flat.is_empty() {
            return Err(HeapError::Precondition(format!(
                "a weakly flat connection ({} violations)",
                flat.len()
            )));
        }
        Ok(Self::new_unchecked(conn))
    }

    /// Skips the precondition checks; results are then only meaningful as
    /// grid codomains.
    pub fn new_unchecked(conn: &'a AffineConnection) -> Self {
        let trees = conn
            .space()
            .vertices()
            .map(|v| conn.space().spanning_tree(v, TreeKind::Breadth).expect("vertex"))
            .collect();
        Heap { conn, trees }
    }

    pub fn connection(&self) -> &AffineConnection {
        self.conn
    }

    pub fn tree_path(&self, from: Vertex, to: Vertex) -> Result<NPath, HeapError> {
        self.trees[from]
            .path_to(to)
            .ok_or(HeapError::DifferentComponents(from, to))
    }

    /// Extended `[zxy]`: the codomain of the grid over tree paths
    /// `x -> y` and `x -> z`.
    pub fn ternary(&self, z: Vertex, x: Vertex, y: Vertex) -> Result<Vertex, HeapError> {
        let yp = self.tree_path(x, y)?;
        let zp = self.tree_path(x, z)?;
        Ok(self.conn.grid2_codomain(yp.points(), zp.points())?)
    }

    /// `x +_o y`
    pub fn add(&self, o: Vertex, x: Vertex, y: Vertex) -> Result<Vertex, HeapError> {
        self.ternary(x, o, y)
    }

    /// The extended `[oxo]`, the inverse of `x` for `+_o`.
    pub fn inverse(&self, o: Vertex, x: Vertex) -> Result<Vertex, HeapError> {
        self.ternary(o, x, o)
    }

    /// The extended `[xoo']`, carrying `+_o` to `+_o'`.
    pub fn base_change(&self, o: Vertex, o2: Vertex, x: Vertex) -> Result<Vertex, HeapError> {
        self.ternary(x, o, o2)
    }
}

/// First failure of a law, with the vertices involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawFailure {
    pub law: &'static str,
    pub vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeapLawReport {
    /// Number of individual law instances evaluated.
    pub checks: usize,
    /// Whether every instance was checked (otherwise a seeded sample).
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub failures: Vec<LawFailure>,
}

impl HeapLawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, law: &'static str, vertices: Vec<Vertex>) {
        if !self.failures.iter().any(|f| f.law == law) {
            self.failures.push(LawFailure { law, vertices });
        }
    }
}

impl Heap<'_> {
    /// Abelian group laws of `+_o` for every base point `o`, compatibility
    /// `[zxy] = z +_x y` on admissible triples, and base change being an
    /// isomorphism `+_o -> +_o'`. Components with at most `exhaustive_limit`
    /// vertices are checked on all tuples; larger ones on `samples` seeded
    /// random tuples per law.
    pub fn verify_laws(&self, exhaustive_limit: usize, samples: usize, seed: u64) -> Result<HeapLawReport, HeapError> {
        let mut report = HeapLawReport {
            exhaustive: true,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for comp in self.conn.space().components() {
            if comp.len() <= exhaustive_limit {
                self.verify_component_exhaustive(&comp, &mut report)?;
            } else {
                report.exhaustive = false;
                report.seed = Some(seed);
                self.verify_component_sampled(&comp, samples, &mut rng, &mut report)?;
            }
        }
        for (z, x, y) in self.conn.admissible() {
            report.checks += 1;
            if Some(self.add(x, z, y)?) != self.conn.op(z, x, y) {
                report.fail("ternary compatibility", vec![z, x, y]);
            }
        }
        Ok(report)
    }

    fn verify_component_exhaustive(&self, comp: &[Vertex], report: &mut HeapLawReport) -> Result<(), HeapError> {
        let n = self.conn.space().len();
        // add[o][x][y] over the component, indexed by vertex
        let mut add = vec![Vec::new(); n];
        for &o in comp {
            let mut t = vec![usize::MAX; n * n];
            for &x in comp {
                for &y in comp {
                    t[x * n + y] = self.add(o, x, y)?;
                }
            }
            add[o] = t;
        }
        let sum = |o: Vertex, x: Vertex, y: Vertex| add[o][x * n + y];
        for &o in comp {
            for &x in comp {
                report.checks += 2;
                if sum(o, o, x) != x || sum(o, x, o) != x {
                    report.fail("unit", vec![o, x]);
                }
                let inv = self.inverse(o, x)?;
                if sum(o, x, inv) != o {
                    report.fail("inverse", vec![o, x, inv]);
                }
                for &y in comp {
                    report.checks += 1;
                    if sum(o, x, y) != sum(o, y, x) {
                        report.fail("commutativity", vec![o, x, y]);
                    }
                    let xy = sum(o, x, y);
                    for &z in comp {
                        report.checks += 1;
                        if sum(o, xy, z) != sum(o, x, sum(o, y, z)) {
                            report.fail("associativity", vec![o, x, y, z]);
                        }
                    }
                }
            }
        }
        for &o in comp {
            for &o2 in comp {
                let f: Vec<Vertex> = (0..n)
                    .map(|x| if add[o].is_empty() { usize::MAX } else { x })
                    .map(|x| if x == usize::MAX { Ok(x) } else { self.base_change(o, o2, x) })
                    .collect::<Result<_, _>>()?;
                let mut image: Vec<Vertex> = comp.iter().map(|&x| f[x]).collect();
                image.sort_unstable();
                image.dedup();
                report.checks += 1;
                if image.len() != comp.len() {
                    report.fail("base change bijective", vec![o, o2]);
                }
                for &x in comp {
                    for &y in comp {
                        report.checks += 1;
                        if f[sum(o, x, y)] != sum(o2, f[x], f[y]) {
                            report.fail("base change homomorphism", vec![o, o2, x, y]);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn verify_component_sampled(
        &self,
        comp: &[Vertex],
        samples: usize,
        rng: &mut ChaCha8Rng,
        report: &mut HeapLawReport,
    ) -> Result<(), HeapError> {
        let mut pick = || *comp.choose(rng).unwrap();
        for _ in 0..samples {
            let (o, o2, x, y, z) = (pick(), pick(), pick(), pick(), pick());
            report.checks += 6;
            if self.add(o, o, x)? != x || self.add(o, x, o)? != x {
                report.fail("unit", vec![o, x]);
            }
            let inv = self.inverse(o, x)?;
            if self.add(o, x, inv)? != o {
                report.fail("inverse", vec![o, x, inv]);
            }
            let xy = self.add(o, x, y)?;
            if xy != self.add(o, y, x)? {
                report.fail("commutativity", vec![o, x, y]);
            }
            if self.add(o, xy, z)? != self.add(o, x, self.add(o, y, z)?)? {
                report.fail("associativity", vec![o, x, y, z]);
            }
            let f = |v| self.base_change(o, o2, v);
            if f(xy)? != self.add(o2, f(x)?, f(y)?)? {
                report.fail("base change homomorphism", vec![o, o2, x, y]);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbor::{lattice_coords, lattice_index};

    #[test]
    fn lattice_heap_is_vector_addition() {
        let c = AffineConnection::lattice(5, 2);
        let h = Heap::new(&c).unwrap();
        let v = |i: usize, j: usize| lattice_index(&[i % 5, j % 5], 5);
        let (o, x, y) = (v(1, 2), v(3, 4), v(0, 4));
        // x + y - o
        assert_eq!(h.add(o, x, y).unwrap(), v(3 + 0 + 4, 4 + 4 + 3));
        assert_eq!(h.add(o, o, y).unwrap(), y);
        assert_eq!(h.add(o, x, o).unwrap(), x);
        // 2o - x
        let inv = h.inverse(o, x).unwrap();
        assert_eq!(inv, v(2 + 5 - 3, 4 + 5 - 4));
        assert_eq!(h.add(o, x, inv).unwrap(), o);
        assert_eq!(h.inverse(o, inv).unwrap(), x);
        assert_eq!(h.inverse(o, o).unwrap(), o);
        // x - o + o'
        let o2 = v(4, 4);
        assert_eq!(h.base_change(o, o2, x).unwrap(), v(3 + 5 - 1 + 4, 4 + 5 - 2 + 4));
        assert_eq!(h.base_change(o, o, x).unwrap(), x);
    }

    #[test]
    fn z3_lattice_laws_exhaustive() {
        let c = AffineConnection::lattice(3, 2);
        let r = Heap::new(&c).unwrap().verify_laws(30, 0, 0).unwrap();
        assert!(r.passed() && r.exhaustive, "{r:?}");
    }

    #[test]
    fn sampled_laws_on_larger_torus() {
        let c = AffineConnection::lattice(7, 2);
        let r = Heap::new(&c).unwrap().verify_laws(30, 200, 9).unwrap();
        assert!(r.passed() && !r.exhaustive && r.seed == Some(9));
    }

    #[test]
    fn non_flat_connection_is_rejected() {
        let b = AffineConnection::bent_row();
        assert!(matches!(Heap::new(&b), Err(HeapError::Precondition(_))));
        let _ = lattice_coords(0, 4, 2);
    }
}
