//! Discrete affine connections: a partial ternary operation `[zxy]`,
//! defined when `x ~ y` and `x ~ z`.

mod grid;
mod heap;

pub use grid::{CubeReport, Grid2, Grid3, GridError, CUBE_EQUATIONS};
pub use heap::{Heap, HeapError, HeapLawReport, LawFailure};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::format::FormatError;
use crate::groupoid::{Connection, GlGroupoid, GroupoidError};
use crate::neighbor::{lattice_coords, lattice_index, NeighborSpace, SpaceFile, Vertex};

/// `(z, x, y)`, read as `[zxy]`.
pub type Triple = (Vertex, Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AffineError {
    #[error("connection is not symmetric: [zxy] != [yxz] at {0:?}")]
    NotSymmetric(Triple),
    #[error("connection fails its axioms ({0})")]
    Invalid(String),
    #[error("{0} and {1} are not neighbours")]
    NotNeighbors(Vertex, Vertex),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

#[derive(Debug, Clone)]
pub struct AffineConnection {
    space: Arc<NeighborSpace>,
    monads: Vec<Vec<Vertex>>,
    // table[x][pos(z) * |M(x)| + pos(y)]
    table: Vec<Vec<Option<Vertex>>>,
}

/// Violations per axiom, as `(z, x, y)` triples in evaluation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub missing: Vec<Triple>,
    /// `[zxy]` is not a neighbour of both `y` and `z`.
    pub bookkeeping: Vec<Triple>,
    /// `[zxx] != z`
    pub unit_right: Vec<Triple>,
    /// `[xxy] != y`
    pub unit_left: Vec<Triple>,
    /// `[[zxy]yx] != z`
    pub inversion: Vec<Triple>,
    /// `[zxy] != [yxz]`, reported once per unordered `{y, z}`.
    pub symmetry: Vec<Triple>,
}

impl AxiomReport {
    /// Book-keeping, unit and inversion laws hold and the table is total.
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty()
            && self.bookkeeping.is_empty()
            && self.unit_right.is_empty()
            && self.unit_left.is_empty()
            && self.inversion.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry.is_empty()
    }
}

/// One failure of `[[z x0 x1] x1 [x1 x0 x2]] = [[z x0 x2] x2 [x2 x0 x1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakFlatViolation {
    pub x0: Vertex,
    pub x1: Vertex,
    pub x2: Vertex,
    pub z: Vertex,
    pub lhs: Vertex,
    pub rhs: Vertex,
}

impl AffineConnection {
    /// Tabulates `op(z, x, y)` on every admissible triple; `None` marks a
    /// missing entry.
    pub fn from_fn<F>(space: Arc<NeighborSpace>, op: F) -> Self
    where
        F: Fn(Vertex, Vertex, Vertex) -> Option<Vertex>,
    {
        let monads: Vec<Vec<Vertex>> = space.vertices().map(|x| space.monad_unchecked(x)).collect();
        let table = space
            .vertices()
            .map(|x| {
                let m = &monads[x];
                m.iter()
                    .flat_map(|&z| m.iter().map(move |&y| (z, y)))
                    .map(|(z, y)| op(z, x, y))
                    .collect()
            })
            .collect();
        AffineConnection {
            space,
            monads,
            table,
        }
    }

    /// `[zxy] = z - x + y` on the torus `Z_m^dim` with unit steps.
    pub fn lattice(m: usize, dim: usize) -> Self {
        Self::lattice_on(Arc::new(NeighborSpace::torus(m, dim)), m, dim)
    }

    /// `[zxy] = z - x + y` on an arbitrary neighbour graph over `Z_m^dim`
    /// (vertices in row-major order).
    pub fn lattice_on(space: Arc<NeighborSpace>, m: usize, dim: usize) -> Self {
        Self::from_fn(space, |z, x, y| Some(lattice_combine(z, x, y, m, dim)))
    }

    /// The lattice connection transported along a vertex bijection: the
    /// vertex `v` plays the role of lattice point `perm[v]`.
    pub fn twisted(m: usize, dim: usize, perm: &[usize]) -> Result<Self, FormatError> {
        let n = m.pow(dim as u32);
        let mut inverse = vec![usize::MAX; n];
        if perm.len() != n {
            return Err(FormatError::invalid(format!("permutation must have {n} entries")));
        }
        for (v, &p) in perm.iter().enumerate() {
            if p >= n || inverse[p] != usize::MAX {
                return Err(FormatError::invalid("perm is not a bijection of the vertices"));
            }
            inverse[p] = v;
        }
        let base = NeighborSpace::torus(m, dim);
        let edges: Vec<(Vertex, Vertex)> = base.edges().map(|(a, b)| (inverse[a], inverse[b])).collect();
        let space = NeighborSpace::with_names(base.names().to_vec(), &edges).expect("same names");
        Ok(Self::from_fn(Arc::new(space), |z, x, y| {
            Some(inverse[lattice_combine(perm[z], perm[x], perm[y], m, dim)])
        }))
    }

    /// A symmetric connection on the king graph of `Z_4^2` that is not
    /// weakly flat. It agrees with `z - x + y` except on the row
    /// `x_2 = 2`, where purely horizontal displacements `u = z - x`,
    /// `v = y - x` get the correction `(2 u_1 v_1, 0)`.
    pub fn bent_row() -> Self {
        let m = 4;
        let space = Arc::new(NeighborSpace::king_torus(m, 2));
        Self::from_fn(space, move |z, x, y| {
            let (cz, cx, cy) = (lattice_coords(z, m, 2), lattice_coords(x, m, 2), lattice_coords(y, m, 2));
            let u = signed_diff(cz[0], cx[0], m);
            let v = signed_diff(cy[0], cx[0], m);
            let mut w: Vec<usize> = (0..2).map(|k| (cz[k] + cy[k] + 2 * m - cx[k]) % m).collect();
            if cx[1] == 2 && cz[1] == 2 && cy[1] == 2 {
                w[0] = ((w[0] as i64 + 2 * u * v).rem_euclid(m as i64)) as usize;
            }
            Some(lattice_index(&w, m))
        })
    }

    pub fn space(&self) -> &Arc<NeighborSpace> {
        &self.space
    }

    fn pos(&self, x: Vertex, v: Vertex) -> Option<usize> {
        self.monads[x].binary_search(&v).ok()
    }

    /// `[zxy]`, or `None` when the triple is not admissible or the entry
    /// is missing.
    pub fn op(&self, z: Vertex, x: Vertex, y: Vertex) -> Option<Vertex> {
        let k = self.monads.get(x)?.len();
        let (pz, py) = (self.pos(x, z)?, self.pos(x, y)?);
        self.table[x][pz * k + py]
    }

    /// Admissible triples `(z, x, y)` in the order x, then z, then y.
    pub fn admissible(&self) -> impl Iterator<Item = Triple> + '_ {
        self.space.vertices().flat_map(move |x| {
            let m = &self.monads[x];
            m.iter().flat_map(move |&z| m.iter().map(move |&y| (z, x, y)))
        })
    }

    pub fn validate_axioms(&self) -> AxiomReport {
        let s = &self.space;
        let mut r = AxiomReport::default();
        for (z, x, y) in self.admissible() {
            let Some(w) = self.op(z, x, y) else {
                r.missing.push((z, x, y));
                continue;
            };
            if !(s.is_neighbor(w, y) && s.is_neighbor(w, z)) {
                r.bookkeeping.push((z, x, y));
            } else if self.op(w, y, x) != Some(z) {
                r.inversion.push((z, x, y));
            }
            if y == x && w != z {
                r.unit_right.push((z, x, y));
            }
            if z == x && w != y {
                r.unit_left.push((z, x, y));
            }
            if z < y && self.op(y, x, z) != Some(w) {
                r.symmetry.push((z, x, y));
            }
        }
        r
    }

    fn require_symmetric(&self) -> Result<(), AffineError> {
        match self.validate_axioms().symmetry.first() {
            Some(&t) => Err(AffineError::NotSymmetric(t)),
            None => Ok(()),
        }
    }

    /// `nabla(x, y) = (z -> [zxy])` in the groupoid of monad bijections.
    pub fn hat(&self) -> Result<Connection<GlGroupoid>, AffineError> {
        let report = self.validate_axioms();
        if !report.is_valid() {
            return Err(AffineError::Invalid(summarize(&report)));
        }
        let gl = GlGroupoid::new(Arc::clone(&self.space));
        Ok(Connection::new(gl.clone(), Arc::clone(&self.space), |x, y| {
            gl.arrow(x, y, |z| self.op(z, x, y).expect("total"))
        })?)
    }

    /// Checks the weak flatness identity for all `x0`, `x1 < x2` and `z`
    /// in the monad of `x0`.
    pub fn weak_flatness_violations(&self) -> Result<Vec<WeakFlatViolation>, AffineError> {
        self.require_symmetric()?;
        let report = self.validate_axioms();
        if !report.is_valid() {
            return Err(AffineError::Invalid(summarize(&report)));
        }
        let mut out = Vec::new();
        for x0 in self.space.vertices() {
            let m = &self.monads[x0];
            for (i, &x1) in m.iter().enumerate() {
                for &x2 in &m[i + 1..] {
                    let p12 = self.op(x1, x0, x2).unwrap();
                    let p21 = self.op(x2, x0, x1).unwrap();
                    for &z in m {
                        let lhs = self.op(self.op(z, x0, x1).unwrap(), x1, p12).unwrap();
                        let rhs = self.op(self.op(z, x0, x2).unwrap(), x2, p21).unwrap();
                        if lhs != rhs {
                            out.push(WeakFlatViolation {
                                x0,
                                x1,
                                x2,
                                z,
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_table_file(&self) -> ConnectionFile {
        let name = |v: Vertex| self.space.name(v).to_string();
        let entries = self
            .admissible()
            .filter_map(|(z, x, y)| {
                self.op(z, x, y)
                    .map(|w| (format!("{}|{}|{}", name(z), name(x), name(y)), name(w)))
            })
            .collect();
        ConnectionFile::Table {
            space: SpaceRef::Inline(self.space.to_file()),
            entries,
        }
    }

    /// Replaces one table entry (used to build corrupted fixtures).
    pub fn with_entry(&self, z: Vertex, x: Vertex, y: Vertex, w: Vertex) -> Option<Self> {
        let k = self.monads[x].len();
        let (pz, py) = (self.pos(x, z)?, self.pos(x, y)?);
        let mut out = self.clone();
        out.table[x][pz * k + py] = Some(w);
        Some(out)
    }
}

pub(crate) fn summarize(r: &AxiomReport) -> String {
    let parts: Vec<String> = [
        ("missing", r.missing.len()),
        ("bookkeeping", r.bookkeeping.len()),
        ("unit [zxx]=z", r.unit_right.len()),
        ("unit [xxy]=y", r.unit_left.len()),
        ("inversion", r.inversion.len()),
    ]
    .iter()
    .filter(|(_, n)| *n > 0)
    .map(|(k, n)| format!("{k}: {n}"))
    .collect();
    parts.join(", ")
}

fn lattice_combine(z: Vertex, x: Vertex, y: Vertex, m: usize, dim: usize) -> Vertex {
    let (cz, cx, cy) = (
        lattice_coords(z, m, dim),
        lattice_coords(x, m, dim),
        lattice_coords(y, m, dim),
    );
    let w: Vec<usize> = (0..dim).map(|k| (cz[k] + cy[k] + m - cx[k]) % m).collect();
    lattice_index(&w, m)
}

/// `a - b` as a representative in `(-m/2, m/2]`.
fn signed_diff(a: usize, b: usize, m: usize) -> i64 {
    let d = ((a + m - b) % m) as i64;
    if d > m as i64 / 2 {
        d - m as i64
    } else {
        d
    }
}

/// Where a table connection finds its space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Inline(SpaceFile),
    /// Path of a space file, relative to the connection file.
    Path(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConnectionFile {
    Lattice {
        modulus: usize,
        dim: usize,
    },
    Twisted {
        modulus: usize,
        dim: usize,
        perm: Vec<usize>,
    },
    Table {
        space: SpaceRef,
        entries: BTreeMap<String, String>,
    },
}

impl ConnectionFile {
    /// Builds the connection; `resolve` loads a referenced space file.
    pub fn build<R>(&self, resolve: R) -> Result<AffineConnection, FormatError>
    where
        R: Fn(&str) -> Result<SpaceFile, FormatError>,
    {
        match self {
            ConnectionFile::Lattice { modulus, dim } => {
                check_lattice(*modulus, *dim)?;
                Ok(AffineConnection::lattice(*modulus, *dim))
            }
            ConnectionFile::Twisted { modulus, dim, perm } => {
                check_lattice(*modulus, *dim)?;
                AffineConnection::twisted(*modulus, *dim, perm)
            }
            ConnectionFile::Table { space, entries } => {
                let sf = match space {
                    SpaceRef::Inline(f) => f.clone(),
                    SpaceRef::Path(p) => resolve(p)?,
                };
                let space = Arc::new(NeighborSpace::from_file(&sf)?);
                let mut map = BTreeMap::new();
                for (key, w) in entries {
                    let parts: Vec<&str> = key.split('|').collect();
                    if parts.len() != 3 {
                        return Err(FormatError::invalid(format!("entry key `{key}` is not z|x|y")));
                    }
                    let idx = |s: &str| space.vertex(s).map_err(|e| FormatError::invalid(format!("entry `{key}`: {e}")));
                    let (z, x, y) = (idx(parts[0])?, idx(parts[1])?, idx(parts[2])?);
                    if !space.is_neighbor(x, y) || !space.is_neighbor(x, z) {
                        return Err(FormatError::invalid(format!(
                            "entry `{key}` is not admissible (x must neighbour y and z)"
                        )));
                    }
                    map.insert((z, x, y), idx(w)?);
                }
                Ok(AffineConnection::from_fn(space, |z, x, y| map.get(&(z, x, y)).copied()))
            }
        }
    }
}

fn check_lattice(m: usize, dim: usize) -> Result<(), FormatError> {
    // with m < 3 the steps +1 and -1 coincide and the op is not the lattice one
    if !(3..=64).contains(&m) || !(1..=3).contains(&dim) {
        return Err(FormatError::invalid(format!(
            "lattice needs 3 <= modulus <= 64 and 1 <= dim <= 3 (got {m}, {dim})"
        )));
    }
    Ok(())
}
