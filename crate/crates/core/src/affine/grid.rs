//! Parallelogram grids generated by paths, and the cube check.

use super::{AffineConnection, AffineError};
use crate::neighbor::{Independence, NPath, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("generating paths start at {0} and {1}")]
    DomainMismatch(Vertex, Vertex),
    #[error("generating path is not a path in this space")]
    InvalidPath,
    #[error("[zxy] undefined at {0:?}")]
    Undefined((Vertex, Vertex, Vertex)),
    #[error("cube lemma fails in the cell at {cell:?}")]
    Cell { cell: (usize, usize, usize), report: Box<CubeReport> },
    #[error(transparent)]
    Affine(#[from] AffineError),
}

/// `u[i][j]` with `i` running along the z-path and `j` along the y-path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid2 {
    pub u: Vec<Vec<Vertex>>,
}

impl Grid2 {
    pub fn codomain(&self) -> Vertex {
        *self.u.last().unwrap().last().unwrap()
    }

    pub fn transpose(&self) -> Grid2 {
        let (m, n) = (self.u.len(), self.u[0].len());
        Grid2 {
            u: (0..n).map(|j| (0..m).map(|i| self.u[i][j]).collect()).collect(),
        }
    }
}

/// `w[i][j][l]` along the x-, y- and z-paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid3 {
    pub w: Vec<Vec<Vec<Vertex>>>,
}

impl Grid3 {
    pub fn codomain(&self) -> Vertex {
        *self.w.last().unwrap().last().unwrap().last().unwrap()
    }

    /// The face `l = 0`, indexed `[i][j]`.
    pub fn face_xy(&self) -> Grid2 {
        Grid2 {
            u: self.w.iter().map(|plane| plane.iter().map(|row| row[0]).collect()).collect(),
        }
    }

    /// The face `j = 0`, indexed `[i][l]`.
    pub fn face_xz(&self) -> Grid2 {
        Grid2 {
            u: self.w.iter().map(|plane| plane[0].clone()).collect(),
        }
    }

    /// The face `i = 0`, indexed `[j][l]`.
    pub fn face_yz(&self) -> Grid2 {
        Grid2 { u: self.w[0].clone() }
    }
}

/// The three equations of the cube lemma, as pairs of indices into
/// [`CubeReport::values`].
pub const CUBE_EQUATIONS: [(usize, usize); 3] = [(0, 1), (2, 3), (4, 5)];

/// The six expressions for the far vertex of the cube spanned by
/// `p1, p2, p4` at `p0`, written with vertex numbers in binary:
/// `[[401]1[102]]`, `[[402]2[201]]`, `[[204]4[401]]`, `[[201]1[104]]`,
/// `[[102]2[204]]`, `[[104]4[402]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeReport {
    pub values: [Vertex; 6],
    /// Whether each of [`CUBE_EQUATIONS`] holds.
    pub equations: [bool; 3],
    /// The vertices `0..=7` when all six values agree.
    pub cube: Option<[Vertex; 8]>,
}

impl CubeReport {
    pub fn holds(&self) -> bool {
        self.cube.is_some()
    }
}

impl AffineConnection {
    fn op_or_err(&self, z: Vertex, x: Vertex, y: Vertex) -> Result<Vertex, GridError> {
        self.op(z, x, y).ok_or(GridError::Undefined((z, x, y)))
    }

    fn check_path(&self, p: &NPath) -> Result<(), GridError> {
        self.space()
            .validate_path(p.points())
            .map(|_| ())
            .map_err(|_| GridError::InvalidPath)
    }

    /// Fills `u[i+1][j+1] = [u[i+1][j] u[i][j] u[i][j+1]]` from
    /// `u[0][j] = y_j` and `u[i][0] = z_i`.
    pub fn grid2(&self, y: &NPath, z: &NPath) -> Result<Grid2, GridError> {
        if y.domain() != z.domain() {
            return Err(GridError::DomainMismatch(y.domain(), z.domain()));
        }
        self.check_path(y)?;
        self.check_path(z)?;
        self.grid2_unchecked(y.points(), z.points())
    }

    fn grid2_unchecked(&self, y: &[Vertex], z: &[Vertex]) -> Result<Grid2, GridError> {
        let mut u = vec![y.to_vec()];
        for i in 0..z.len() - 1 {
            let mut row = Vec::with_capacity(y.len());
            row.push(z[i + 1]);
            for j in 0..y.len() - 1 {
                let next = self.op_or_err(row[j], u[i][j], u[i][j + 1])?;
                row.push(next);
            }
            u.push(row);
        }
        Ok(Grid2 { u })
    }

    /// Codomain of the grid over the given point sequences (assumed valid
    /// paths from a common domain).
    pub(crate) fn grid2_codomain(&self, y: &[Vertex], z: &[Vertex]) -> Result<Vertex, GridError> {
        // only the previous row is needed
        let mut prev = y.to_vec();
        for &zi in &z[1..] {
            let mut row = Vec::with_capacity(y.len());
            row.push(zi);
            for j in 0..y.len() - 1 {
                let next = self.op_or_err(row[j], prev[j], prev[j + 1])?;
                row.push(next);
            }
            prev = row;
        }
        Ok(*prev.last().unwrap())
    }

    /// Compares grid codomains over all pairs of paths `x -> yend`,
    /// `x -> zend` of at most `max_len` steps. Values are `(y-path,
    /// z-path)` pairs flattened into one path for the witness.
    pub fn grid2_codomain_invariance(
        &self,
        x: Vertex,
        yend: Vertex,
        zend: Vertex,
        max_len: usize,
    ) -> Result<Independence<Vertex>, GridError> {
        let s = self.space();
        let ys = s.enumerate_paths(x, yend, max_len);
        let zs = s.enumerate_paths(x, zend, max_len);
        if ys.is_empty() || zs.is_empty() {
            return Ok(Independence::Unreachable);
        }
        let mut first: Option<(NPath, Vertex)> = None;
        let mut count = 0;
        for yp in &ys {
            for zp in &zs {
                let c = self.grid2_codomain(yp.points(), zp.points())?;
                count += 1;
                // the witness path is the reversed z-path followed by the y-path
                let joined = zp.reversed().concat(yp).expect("both start at x");
                match &first {
                    None => first = Some((joined, c)),
                    Some((fp, fc)) if *fc != c => {
                        return Ok(Independence::Witness {
                            first: fp.clone(),
                            first_value: *fc,
                            second: joined,
                            second_value: c,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        let (_, value) = first.unwrap();
        Ok(Independence::Common { value, paths: count })
    }

    /// Evaluates the six cube expressions. Needs a symmetric connection.
    pub fn cube_check(&self, p0: Vertex, p1: Vertex, p2: Vertex, p4: Vertex) -> Result<CubeReport, GridError> {
        let s = self.space();
        for p in [p1, p2, p4] {
            if !s.is_neighbor(p0, p) {
                return Err(AffineError::NotNeighbors(p0, p).into());
            }
        }
        if let Some(&t) = self.validate_axioms().symmetry.first() {
            return Err(AffineError::NotSymmetric(t).into());
        }
        let v3 = self.op_or_err(p1, p0, p2)?;
        let v5 = self.op_or_err(p1, p0, p4)?;
        let v6 = self.op_or_err(p2, p0, p4)?;
        self.cube_from_edges([p0, p1, p2, v3, p4, v5, v6])
    }

    /// The six expressions given vertices `0..=6` of a cube.
    fn cube_from_edges(&self, v: [Vertex; 7]) -> Result<CubeReport, GridError> {
        let [p0, p1, p2, v3, p4, v5, v6] = v;
        let values = [
            self.op_or_err(v5, p1, v3)?,
            self.op_or_err(v6, p2, v3)?,
            self.op_or_err(v6, p4, v5)?,
            self.op_or_err(v3, p1, v5)?,
            self.op_or_err(v3, p2, v6)?,
            self.op_or_err(v5, p4, v6)?,
        ];
        let equations = CUBE_EQUATIONS.map(|(a, b)| values[a] == values[b]);
        let all = values.iter().all(|&w| w == values[0]);
        Ok(CubeReport {
            values,
            equations,
            cube: all.then_some([p0, p1, p2, v3, p4, v5, v6, values[0]]),
        })
    }

    /// Three-dimensional grid from paths with a common domain. The faces
    /// are two-dimensional grids; every inner cell is closed with the cube
    /// lemma, and a cell where the six expressions disagree is an error.
    pub fn grid3(&self, x: &NPath, y: &NPath, z: &NPath) -> Result<Grid3, GridError> {
        for p in [y, z] {
            if p.domain() != x.domain() {
                return Err(GridError::DomainMismatch(x.domain(), p.domain()));
            }
        }
        for p in [x, y, z] {
            self.check_path(p)?;
        }
        let (n, m, k) = (x.len(), y.len(), z.len());
        let fxy = self.grid2_unchecked(y.points(), x.points())?;
        let fxz = self.grid2_unchecked(z.points(), x.points())?;
        let fyz = self.grid2_unchecked(z.points(), y.points())?;
        let mut w = vec![vec![vec![usize::MAX; k + 1]; m + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=m {
                w[i][j][0] = fxy.u[i][j];
            }
            for l in 0..=k {
                w[i][0][l] = fxz.u[i][l];
            }
        }
        for j in 0..=m {
            for l in 0..=k {
                w[0][j][l] = fyz.u[j][l];
            }
        }
        for i in 1..=n {
            for j in 1..=m {
                for l in 1..=k {
                    let v = [
                        w[i - 1][j - 1][l - 1],
                        w[i][j - 1][l - 1],
                        w[i - 1][j][l - 1],
                        w[i][j][l - 1],
                        w[i - 1][j - 1][l],
                        w[i][j - 1][l],
                        w[i - 1][j][l],
                    ];
                    let report = self.cube_from_edges(v)?;
                    match report.cube {
                        Some(c) => w[i][j][l] = c[7],
                        None => {
                            return Err(GridError::Cell {
                                cell: (i - 1, j - 1, l - 1),
                                report: Box::new(report),
                            })
                        }
                    }
                }
            }
        }
        Ok(Grid3 { w })
    }
}
