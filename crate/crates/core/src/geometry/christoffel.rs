//! Affine connections in coordinates:
//! `[zxy] = z - x + y + Gamma(x; z - x, y - x)`.

use std::sync::Arc;

use super::chart::FormalChart;
use super::{add, coordinates, displacement, is_coordinates, is_zero, lift, need_order, scale, sub, GeometryError, Point};
use crate::jet::{series_compose, BlockSpec, MatrixSeries, Rational, TruncatedSeries};

/// Components `Gamma^c_ab(x)` over the base ring, exact through `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelField {
    dim: usize,
    order: u32,
    spec: Arc<BlockSpec>,
    gamma: Vec<TruncatedSeries>,
}

/// `lambda(x, y_t, z_t)` minus `x + t (d1 + d2) + (t^2 - t)/2 Gamma(x; d1+d2, d1+d2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarReport {
    pub t: Rational,
    pub residual: Point,
    /// `lambda(x, y, z) - (x + d1 + d2)`.
    pub midpoint_residual: Point,
    /// Whether `lambda(x, y_t, z_t)` is unchanged by exchanging `d1, d2`.
    pub swap_invariant: bool,
}

impl ScalarReport {
    pub fn passed(&self) -> bool {
        is_zero(&self.residual) && is_zero(&self.midpoint_residual) && self.swap_invariant
    }
}

/// The six cube expressions over three unrelated blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct JetCubeReport {
    pub values: [Point; 6],
    pub equations: [bool; 3],
}

impl JetCubeReport {
    pub fn holds(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }
}

impl ChristoffelField {
    /// Components indexed `gamma[(c * n + a) * n + b]`.
    pub fn new(dim: usize, gamma: Vec<TruncatedSeries>) -> Result<Self, GeometryError> {
        if gamma.len() != dim * dim * dim {
            return Err(GeometryError::Dimension(format!(
                "{} components for dimension {dim}",
                gamma.len()
            )));
        }
        let first = gamma
            .first()
            .ok_or_else(|| GeometryError::Dimension("dimension 0".into()))?;
        let spec = Arc::clone(first.spec());
        let order = first.order();
        if spec.vars() != dim || spec.blocks() != 0 {
            return Err(GeometryError::Dimension("components must be over the base ring".into()));
        }
        for g in &gamma {
            if **g.spec() != *spec {
                return Err(GeometryError::Dimension("components over different rings".into()));
            }
            if g.order() != order {
                return Err(GeometryError::Order {
                    need: order,
                    have: g.order(),
                });
            }
        }
        Ok(ChristoffelField {
            dim,
            order,
            spec,
            gamma,
        })
    }

    pub fn zero(dim: usize, order: u32) -> Self {
        let spec = Arc::new(BlockSpec::base(dim));
        let gamma = vec![TruncatedSeries::zero(&spec, order); dim * dim * dim];
        ChristoffelField {
            dim,
            order,
            spec,
            gamma,
        }
    }

    /// Constant components `f(c, a, b)`.
    pub fn constant<F>(dim: usize, order: u32, f: F) -> Self
    where
        F: Fn(usize, usize, usize) -> Rational,
    {
        let mut g = Self::zero(dim, order);
        for c in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    g.gamma[(c * dim + a) * dim + b] = TruncatedSeries::constant(&g.spec, order, f(c, a, b));
                }
            }
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn spec(&self) -> &Arc<BlockSpec> {
        &self.spec
    }

    pub fn get(&self, c: usize, a: usize, b: usize) -> &TruncatedSeries {
        &self.gamma[self.index(c, a, b)]
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.gamma
    }

    fn index(&self, c: usize, a: usize, b: usize) -> usize {
        (c * self.dim + a) * self.dim + b
    }

    pub fn truncate(&self, order: u32) -> Self {
        ChristoffelField {
            dim: self.dim,
            order: order.min(self.order),
            spec: Arc::clone(&self.spec),
            gamma: self.gamma.iter().map(|g| g.truncate(order)).collect(),
        }
    }

    /// `Gamma^c_ab - Gamma^c_ba`, same layout as the components.
    pub fn torsion(&self) -> Vec<TruncatedSeries> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n * n);
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    out.push(self.get(c, a, b) - self.get(c, b, a));
                }
            }
        }
        out
    }

    /// The first `(c, a, b)` with `a < b` and nonzero torsion.
    pub fn first_asymmetry(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        (0..n)
            .flat_map(|c| (0..n).flat_map(move |a| (a + 1..n).map(move |b| (c, a, b))))
            .find(|&(c, a, b)| self.get(c, a, b) != self.get(c, b, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    fn require_symmetric(&self) -> Result<(), GeometryError> {
        match self.first_asymmetry() {
            Some((c, a, b)) => Err(GeometryError::NotSymmetric(c, a, b)),
            None => Ok(()),
        }
    }

    fn check_point(&self, p: &[TruncatedSeries]) -> Result<(), GeometryError> {
        if p.len() != self.dim || p.iter().any(|s| s.spec().vars() != self.dim) {
            return Err(GeometryError::Dimension(format!(
                "point of length {} for a connection of dimension {}",
                p.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `Gamma(x)` with every component in the ring of `x`.
    pub fn at(&self, x: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>, GeometryError> {
        self.check_point(x)?;
        let (spec, order) = (x[0].spec(), x[0].order());
        let lifted: Vec<TruncatedSeries> = self
            .gamma
            .iter()
            .map(|g| lift(g, spec, order))
            .collect::<Result<_, _>>()?;
        if is_coordinates(x) {
            return Ok(lifted);
        }
        Ok(series_compose(&lifted, x)?)
    }

    /// `Gamma(x; u, v)` given `gx = Gamma(x)`.
    pub fn bilinear(&self, gx: &[TruncatedSeries], u: &[TruncatedSeries], v: &[TruncatedSeries]) -> Result<Point, GeometryError> {
        let n = self.dim;
        (0..n)
            .map(|c| {
                let mut acc = TruncatedSeries::zero(u[0].spec(), u[0].order());
                for a in 0..n {
                    if u[a].is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        let g = &gx[self.index(c, a, b)];
                        if g.is_zero() || v[b].is_zero() {
                            continue;
                        }
                        acc = acc.try_add(&g.try_mul(&u[a])?.try_mul(&v[b])?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// `[zxy]`. The ring order may exceed the field's order by at most two,
    /// since `Gamma` only meets products of two displacements.
    pub fn lambda_coord(&self, x: &[TruncatedSeries], z: &[TruncatedSeries], y: &[TruncatedSeries]) -> Result<Point, GeometryError> {
        self.check_point(x)?;
        let ring = x[0].order();
        need_order(ring.saturating_sub(2), self.order)?;
        let gx = self.at(x)?;
        let (u, v) = (sub(z, x)?, sub(y, x)?);
        add(&add(&sub(z, x)?, y)?, &self.bilinear(&gx, &u, &v)?)
    }

    /// `[zxy] - [yxz]` at `y = x + d1`, `z = x + d2`; zero exactly when the
    /// torsion vanishes.
    pub fn lambda_torsion_residual(&self) -> Result<Point, GeometryError> {
        let spec = Arc::new(BlockSpec::generic(self.dim, 2));
        let ring = self.order + 2;
        let x = coordinates(&spec, ring);
        let y = add(&x, &displacement(&spec, ring, 0)?)?;
        let z = add(&x, &displacement(&spec, ring, 1)?)?;
        sub(&self.lambda_coord(&x, &z, &y)?, &self.lambda_coord(&x, &y, &z)?)
    }

    /// `[[z x0 x1] x1 [x1 x0 x2]] - [[z x0 x2] x2 [x2 x0 x1]]` at
    /// `x1 = x0 + d1`, `x2 = x0 + d2`, `z = x0 + d3`, exact through
    /// `order + 2`.
    pub fn flatness_residual(&self) -> Result<Point, GeometryError> {
        self.require_symmetric()?;
        let spec = Arc::new(BlockSpec::generic(self.dim, 3));
        let ring = self.order + 2;
        let x0 = coordinates(&spec, ring);
        let x1 = add(&x0, &displacement(&spec, ring, 0)?)?;
        let x2 = add(&x0, &displacement(&spec, ring, 1)?)?;
        let z = add(&x0, &displacement(&spec, ring, 2)?)?;
        let lhs = self.lambda_coord(
            &x1,
            &self.lambda_coord(&x0, &z, &x1)?,
            &self.lambda_coord(&x0, &x1, &x2)?,
        )?;
        let rhs = self.lambda_coord(
            &x2,
            &self.lambda_coord(&x0, &z, &x2)?,
            &self.lambda_coord(&x0, &x2, &x1)?,
        )?;
        sub(&lhs, &rhs)
    }

    /// Coefficient of `d1_a d2_b d3_c` in component `d` of the flatness
    /// residual, as `[((d * n + c) * n + a) * n + b]` (the curvature layout),
    /// exact through `order - 1`.
    pub fn flatness_coefficients(&self) -> Result<Vec<TruncatedSeries>, GeometryError> {
        need_order(1, self.order)?;
        let r = self.flatness_residual()?;
        let n = self.dim;
        let mut out = Vec::with_capacity(n.pow(4));
        for d in 0..n {
            for c in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        out.push(r[d].block_coefficient(&[(0, a), (1, b), (2, c)])?.truncate(self.order - 1));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `R^d_cab = d_a Gamma^d_bc - d_b Gamma^d_ac
    ///   + sum_e (Gamma^e_ac Gamma^d_be - Gamma^e_bc Gamma^d_ae)`,
    /// as `[((d * n + c) * n + a) * n + b]`, exact through `order - 1`.
    pub fn curvature(&self) -> Result<Vec<TruncatedSeries>, GeometryError> {
        need_order(1, self.order)?;
        let m = self.order - 1;
        let n = self.dim;
        let g: Vec<TruncatedSeries> = self.gamma.iter().map(|s| s.truncate(m)).collect();
        let gi = |c: usize, a: usize, b: usize| &g[(c * n + a) * n + b];
        let mut out = Vec::with_capacity(n.pow(4));
        for d in 0..n {
            for c in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let mut r = self.get(d, b, c).derivative(a)?.truncate(m);
                        r = r.try_sub(&self.get(d, a, c).derivative(b)?.truncate(m))?;
                        for e in 0..n {
                            r = r.try_add(&gi(e, a, c).try_mul(gi(d, b, e))?)?;
                            r = r.try_sub(&gi(e, b, c).try_mul(gi(d, a, e))?)?;
                        }
                        out.push(r);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Lowest total degree present in the curvature, `None` when flat.
    pub fn curvature_valuation(&self) -> Result<Option<u32>, GeometryError> {
        Ok(self.curvature()?.iter().filter_map(TruncatedSeries::valuation).min())
    }

    /// The connection `Gamma'` with `psi([zxy]') = [psi(z) psi(x) psi(y)]`
    /// on neighbours:
    /// `Gamma'^c_ab = (J^-1)^c_e (Gamma^e_pq(psi) J^p_a J^q_b - d_a d_b psi^e)`,
    /// exact through `min(psi.order - 2, order)`.
    pub fn pullback(&self, psi: &FormalChart) -> Result<ChristoffelField, GeometryError> {
        let n = self.dim;
        if psi.dim() != n {
            return Err(GeometryError::Dimension(format!("chart of dimension {} for a connection of dimension {n}", psi.dim())));
        }
        need_order(2, psi.order())?;
        let m = (psi.order() - 2).min(self.order);
        let spec = Arc::clone(&self.spec);
        let phi: Vec<TruncatedSeries> = psi.components().iter().map(|p| p.truncate(m)).collect();
        let mut jac = Vec::with_capacity(n * n);
        for p in 0..n {
            for a in 0..n {
                jac.push(psi.components()[p].derivative(a)?.truncate(m));
            }
        }
        let j = MatrixSeries::from_entries(&spec, m, n, n, jac)?;
        let jinv = j.invert()?;
        let g_psi = series_compose(&self.truncate(m).gamma, &phi)?;
        let mut out = Vec::with_capacity(n * n * n);
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut acc = TruncatedSeries::zero(&spec, m);
                    for e in 0..n {
                        let mut inner = psi.components()[e].derivative(a)?.derivative(b)?.truncate(m).neg();
                        for p in 0..n {
                            for q in 0..n {
                                let g = &g_psi[(e * n + p) * n + q];
                                if g.is_zero() {
                                    continue;
                                }
                                inner = inner.try_add(&g.try_mul(j.get(p, a))?.try_mul(j.get(q, b))?)?;
                            }
                        }
                        acc = acc.try_add(&jinv.get(c, e).try_mul(&inner)?)?;
                    }
                    out.push(acc);
                }
            }
        }
        ChristoffelField::new(n, out)
    }

    /// `lambda(x, y_t, z_t)` for `y = x + d1`, `z = x + d2 - Gamma(x; d1, d2)`
    /// against its closed form, exact through `order + 2`.
    pub fn second_order_scalar(&self, t: &Rational) -> Result<ScalarReport, GeometryError> {
        self.require_symmetric()?;
        let spec = Arc::new(BlockSpec::generic(self.dim, 2));
        let ring = self.order + 2;
        let x = coordinates(&spec, ring);
        let gx = self.at(&x)?;
        let (d1, d2) = (displacement(&spec, ring, 0)?, displacement(&spec, ring, 1)?);
        let y = add(&x, &d1)?;
        let z = sub(&add(&x, &d2)?, &self.bilinear(&gx, &d1, &d2)?)?;
        let u = self.lambda_coord(&x, &z, &y)?;
        let midpoint_residual = sub(&u, &add(&y, &d2)?)?;
        let yt = super::scalar_combination(&x, &y, t)?;
        let zt = super::scalar_combination(&x, &z, t)?;
        let value = self.lambda_coord(&x, &zt, &yt)?;
        let s = add(&d1, &d2)?;
        let half = Rational::new(1, 2);
        let coef = &(&(t * t) - t) * &half;
        let closed = add(&add(&x, &scale(&s, t))?, &scale(&self.bilinear(&gx, &s, &s)?, &coef))?;
        let residual = sub(&value, &closed)?;
        let swapped: Point = value.iter().map(|v| v.swap_blocks(0, 1)).collect::<Result<_, _>>()?;
        Ok(ScalarReport {
            t: t.clone(),
            residual,
            midpoint_residual,
            swap_invariant: swapped == value,
        })
    }

    /// The six expressions of the cube spanned by `x + d1`, `x + d2`,
    /// `x + d3`, in the order used by the discrete cube check.
    pub fn cube_at_jets(&self) -> Result<JetCubeReport, GeometryError> {
        self.require_symmetric()?;
        let spec = Arc::new(BlockSpec::generic(self.dim, 3));
        let ring = self.order + 2;
        let p0 = coordinates(&spec, ring);
        let p1 = add(&p0, &displacement(&spec, ring, 0)?)?;
        let p2 = add(&p0, &displacement(&spec, ring, 1)?)?;
        let p4 = add(&p0, &displacement(&spec, ring, 2)?)?;
        // [zxy] = op(z, x, y)
        let op = |z: &Point, x: &Point, y: &Point| self.lambda_coord(x, z, y);
        let v3 = op(&p1, &p0, &p2)?;
        let v5 = op(&p1, &p0, &p4)?;
        let v6 = op(&p2, &p0, &p4)?;
        let values = [
            op(&v5, &p1, &v3)?,
            op(&v6, &p2, &v3)?,
            op(&v6, &p4, &v5)?,
            op(&v3, &p1, &v5)?,
            op(&v3, &p2, &v6)?,
            op(&v5, &p4, &v6)?,
        ];
        let equations = crate::affine::CUBE_EQUATIONS.map(|(a, b)| values[a] == values[b]);
        Ok(JetCubeReport { values, equations })
    }
}
