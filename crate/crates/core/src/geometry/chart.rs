//! Formal charts at the origin and the heap they induce.

use std::sync::Arc;

use super::christoffel::ChristoffelField;
use super::{add, coordinates, displacement, lift, need_order, sub, GeometryError, Point};
use crate::jet::{series_compose, BlockSpec, Rational, TruncatedSeries};

/// A formal map `phi` with `phi(0) = 0` and identity linear part.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalChart {
    order: u32,
    spec: Arc<BlockSpec>,
    phi: Vec<TruncatedSeries>,
}

/// The trivialization equations have no solution at this degree: the
/// Hessian candidate `H^c` fails `d_e H^c_ab = d_a H^c_eb`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartObstruction {
    /// Degree of the mismatched mixed partials; equals the lowest degree at
    /// which the curvature is nonzero.
    pub degree: u32,
    /// `(c, e, a, b)`.
    pub component: (usize, usize, usize, usize),
    pub discrepancy: TruncatedSeries,
}

impl FormalChart {
    pub fn new(phi: Vec<TruncatedSeries>) -> Result<Self, GeometryError> {
        let first = phi
            .first()
            .ok_or_else(|| GeometryError::Dimension("dimension 0".into()))?;
        let spec = Arc::clone(first.spec());
        let order = first.order();
        let n = phi.len();
        if spec.vars() != n || spec.blocks() != 0 {
            return Err(GeometryError::Dimension(format!(
                "{n} components over a ring with {} variables and {} blocks",
                spec.vars(),
                spec.blocks()
            )));
        }
        for (c, p) in phi.iter().enumerate() {
            if **p.spec() != *spec || p.order() != order {
                return Err(GeometryError::Dimension("components over different rings".into()));
            }
            if !p.constant_term().is_zero() {
                return Err(GeometryError::NotAChart(format!("component {c} is nonzero at the origin")));
            }
            let linear = p.homogeneous(1);
            let expect = if order >= 1 {
                TruncatedSeries::var(&spec, order, c)?
            } else {
                TruncatedSeries::zero(&spec, order)
            };
            if linear != expect {
                return Err(GeometryError::NotAChart(format!("component {c} has a non-identity linear part")));
            }
        }
        Ok(FormalChart { order, spec, phi })
    }

    pub fn identity(dim: usize, order: u32) -> Self {
        let spec = Arc::new(BlockSpec::base(dim));
        FormalChart {
            order,
            phi: coordinates(&spec, order),
            spec,
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn spec(&self) -> &Arc<BlockSpec> {
        &self.spec
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.phi
    }

    pub fn truncate(&self, order: u32) -> Self {
        FormalChart {
            order: order.min(self.order),
            spec: Arc::clone(&self.spec),
            phi: self.phi.iter().map(|p| p.truncate(order)).collect(),
        }
    }

    /// `phi(p)` for a point in any ring of order at most the chart's order.
    pub fn apply(&self, p: &[TruncatedSeries]) -> Result<Point, GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::Dimension(format!("point of length {} for a chart of dimension {}", p.len(), self.dim())));
        }
        let (spec, order) = (p[0].spec(), p[0].order());
        need_order(order, self.order)?;
        let lifted: Vec<TruncatedSeries> = self.phi.iter().map(|s| lift(s, spec, order)).collect::<Result<_, _>>()?;
        Ok(series_compose(&lifted, p)?)
    }

    /// Solves `phi(p) = target` by `p <- target - (phi(p) - p)`, which gains
    /// one degree per step since `phi - id` starts in degree two.
    pub fn solve(&self, target: &[TruncatedSeries]) -> Result<Point, GeometryError> {
        let order = target.first().map_or(0, TruncatedSeries::order);
        let mut p = target.to_vec();
        for _ in 0..=order + 1 {
            let next = sub(target, &sub(&self.apply(&p)?, &p)?)?;
            if next == p {
                return Ok(p);
            }
            p = next;
        }
        Err(GeometryError::Verification("chart inversion did not settle".into()))
    }

    /// The inverse chart.
    pub fn inverse(&self) -> Result<FormalChart, GeometryError> {
        FormalChart::new(self.solve(&coordinates(&self.spec, self.order))?)
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &FormalChart) -> Result<FormalChart, GeometryError> {
        let order = self.order.min(inner.order);
        let p = inner.truncate(order).phi;
        FormalChart::new(self.truncate(order).apply(&p)?)
    }

    /// `phi^-1(phi(x) - phi(o) + phi(y))`, the sum `x +_o y`.
    pub fn heap(&self, o: &[TruncatedSeries], x: &[TruncatedSeries], y: &[TruncatedSeries]) -> Result<Point, GeometryError> {
        let target = add(&sub(&self.apply(x)?, &self.apply(o)?)?, &self.apply(y)?)?;
        self.solve(&target)
    }

    /// `phi^-1(2 phi(o) - phi(x))`, the inverse of `x` for `+_o`.
    pub fn heap_inverse(&self, o: &[TruncatedSeries], x: &[TruncatedSeries]) -> Result<Point, GeometryError> {
        let po = self.apply(o)?;
        self.solve(&sub(&add(&po, &po)?, &self.apply(x)?)?)
    }

    /// `phi([zxy]) - (phi(z) - phi(x) + phi(y))` at `y = x + d1`,
    /// `z = x + d2`, through the chart's order.
    pub fn trivialization_residual(&self, gamma: &ChristoffelField) -> Result<Point, GeometryError> {
        let spec = Arc::new(BlockSpec::generic(self.dim(), 2));
        let ring = self.order;
        let x = coordinates(&spec, ring);
        let y = add(&x, &displacement(&spec, ring, 0)?)?;
        let z = add(&x, &displacement(&spec, ring, 1)?)?;
        let lhs = self.apply(&gamma.lambda_coord(&x, &z, &y)?)?;
        let rhs = add(&sub(&self.apply(&z)?, &self.apply(&x)?)?, &self.apply(&y)?)?;
        sub(&lhs, &rhs)
    }
}

impl ChristoffelField {
    /// Solves `d_a d_b phi^c + sum_e d_e phi^c Gamma^e_ab = 0` with
    /// `phi(0) = 0` and identity linear part, exact through `order`; needs
    /// the field through `order - 2`.
    pub fn formal_chart(&self, order: u32) -> Result<Result<FormalChart, ChartObstruction>, GeometryError> {
        if let Some((c, a, b)) = self.first_asymmetry() {
            return Err(GeometryError::NotSymmetric(c, a, b));
        }
        need_order(order.saturating_sub(2), self.order())?;
        let n = self.dim();
        let spec = Arc::clone(self.spec());
        let gamma: Vec<TruncatedSeries> = self.components().iter().map(|g| g.with_order(order)).collect();
        let x = coordinates(&spec, order);
        let mut phi = x.clone();
        for k in 2..=order {
            let scale = Rational::new(1, (k * (k - 1)) as i64);
            for (c, phic) in phi.iter_mut().enumerate() {
                let grad: Vec<TruncatedSeries> = (0..n).map(|e| phic.derivative(e)).collect::<Result<_, _>>()?;
                let mut h = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        let mut s = TruncatedSeries::zero(&spec, order);
                        for (e, ge) in grad.iter().enumerate() {
                            s = s.try_add(&ge.try_mul(&gamma[(e * n + a) * n + b])?)?;
                        }
                        h.push(s.homogeneous(k - 2).neg());
                    }
                }
                if k >= 3 {
                    for e in 0..n {
                        for a in 0..n {
                            for b in 0..n {
                                let lhs = h[a * n + b].derivative(e)?;
                                let rhs = h[e * n + b].derivative(a)?;
                                if lhs != rhs {
                                    return Ok(Err(ChartObstruction {
                                        degree: k - 3,
                                        component: (c, e, a, b),
                                        discrepancy: lhs.try_sub(&rhs)?,
                                    }));
                                }
                            }
                        }
                    }
                }
                let mut step = TruncatedSeries::zero(&spec, order);
                for a in 0..n {
                    for b in 0..n {
                        step = step.try_add(&h[a * n + b].try_mul(&x[a])?.try_mul(&x[b])?)?;
                    }
                }
                *phic = phic.try_add(&step.scale(&scale))?;
            }
        }
        Ok(Ok(FormalChart::new(phi)?))
    }
}

/// Codomain of the two-by-two grid over the paths `o, o+d1, o+d1+d2` and
/// `o, o+d3, o+d3+d4`, minus the chart sum `(o+d3+d4) +_o (o+d1+d2)`.
pub fn heap_grid_residual(gamma: &ChristoffelField, chart: &FormalChart) -> Result<Point, GeometryError> {
    let n = gamma.dim();
    let spec = Arc::new(BlockSpec::generic(n, 4));
    let ring = chart.order();
    let o = coordinates(&spec, ring);
    let d: Vec<Point> = (0..4).map(|b| displacement(&spec, ring, b)).collect::<Result<_, _>>()?;
    let y = [o.clone(), add(&o, &d[0])?, add(&add(&o, &d[0])?, &d[1])?];
    let z = [o.clone(), add(&o, &d[2])?, add(&add(&o, &d[2])?, &d[3])?];
    // rows along z, columns along y, u[i+1][j+1] = [u[i+1][j] u[i][j] u[i][j+1]]
    let mut prev = y.to_vec();
    for zi in &z[1..] {
        let mut row = vec![zi.clone()];
        for j in 0..y.len() - 1 {
            let next = gamma.lambda_coord(&prev[j], &row[j], &prev[j + 1])?;
            row.push(next);
        }
        prev = row;
    }
    let grid = prev.pop().expect("nonempty row");
    sub(&grid, &chart.heap(&o, &z[2], &y[2])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_zero;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    /// `psi = (x0 + x1^2, x1 + x0 x1 - x0^3)`.
    fn psi(order: u32) -> FormalChart {
        let spec = Arc::new(BlockSpec::base(2));
        let t = |e: [u32; 2], c: i64| (e.to_vec(), vec![], q(c));
        FormalChart::new(vec![
            TruncatedSeries::from_terms(&spec, order, [t([1, 0], 1), t([0, 2], 1)]).unwrap(),
            TruncatedSeries::from_terms(&spec, order, [t([0, 1], 1), t([1, 1], 1), t([3, 0], -1)]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn identity_chart_for_zero_field() {
        let chart = ChristoffelField::zero(2, 4).formal_chart(6).unwrap().unwrap();
        assert_eq!(chart, FormalChart::identity(2, 6));
    }

    #[test]
    fn chart_of_pullback_recovers_map() {
        let p = psi(6);
        let g = ChristoffelField::zero(2, 6).pullback(&p).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_symmetric());
        let chart = g.formal_chart(6).unwrap().unwrap();
        assert_eq!(chart, p);
        assert!(is_zero(&chart.trivialization_residual(&g).unwrap()));
        assert!(is_zero(&heap_grid_residual(&g, &chart).unwrap()));
        assert!(is_zero(&g.flatness_residual().unwrap()));
        assert_eq!(g.curvature_valuation().unwrap(), None);
    }

    #[test]
    fn inverse_and_heap_laws() {
        let p = psi(5);
        let inv = p.inverse().unwrap();
        assert_eq!(p.compose(&inv).unwrap(), FormalChart::identity(2, 5));
        assert_eq!(inv.compose(&p).unwrap(), FormalChart::identity(2, 5));
        let spec = Arc::new(BlockSpec::generic(2, 3));
        let o = coordinates(&spec, 5);
        let x = add(&o, &displacement(&spec, 5, 0).unwrap()).unwrap();
        let y = add(&o, &displacement(&spec, 5, 1).unwrap()).unwrap();
        let w = add(&o, &displacement(&spec, 5, 2).unwrap()).unwrap();
        assert_eq!(p.heap(&o, &o, &y).unwrap(), y);
        assert_eq!(p.heap(&o, &x, &y).unwrap(), p.heap(&o, &y, &x).unwrap());
        let xy = p.heap(&o, &x, &y).unwrap();
        let yw = p.heap(&o, &y, &w).unwrap();
        assert_eq!(p.heap(&o, &xy, &w).unwrap(), p.heap(&o, &x, &yw).unwrap());
        let ix = p.heap_inverse(&o, &x).unwrap();
        assert_eq!(p.heap(&o, &x, &ix).unwrap(), o);
    }

    #[test]
    fn curved_field_is_obstructed_at_curvature_degree() {
        let g = super::super::christoffel::tests::bent();
        let ob = g.formal_chart(5).unwrap().unwrap_err();
        assert_eq!(Some(ob.degree), g.curvature_valuation().unwrap());
    }
}
