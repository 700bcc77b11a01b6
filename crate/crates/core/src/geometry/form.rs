//! Matrix-valued 1-forms in coordinates: `omega(x, x + d) = 1 + Omega(x; d)`
//! with `Omega(x; d) = sum_a Omega_a(x) d_a`.

use std::sync::Arc;

use super::{need_order, GeometryError};
use crate::jet::{BlockSpec, MatrixSeries, Rational, TruncatedSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct CoordOneForm {
    size: usize,
    order: u32,
    spec: Arc<BlockSpec>,
    omega: Vec<MatrixSeries>,
}

/// `A_ab = (d_a Omega_b + Omega_a Omega_b) - (d_b Omega_a + Omega_b Omega_a)`
/// for `a < b`, exact through `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosednessResidual {
    pub order: u32,
    pub entries: Vec<((usize, usize), MatrixSeries)>,
}

impl ClosednessResidual {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, m)| m.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<&((usize, usize), MatrixSeries)> {
        self.entries.iter().find(|(_, m)| !m.is_zero())
    }
}

/// Mixed partials of the primitive disagree: `d_b g_a != d_a g_b` where
/// `g_a` is the homogeneous part of degree `degree` of `f Omega_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstruction {
    pub degree: u32,
    pub component: (usize, usize),
    pub discrepancy: MatrixSeries,
}

impl CoordOneForm {
    /// Components `Omega_0 .. Omega_{n-1}` over the base ring in `n`
    /// variables, square and of one size and order.
    pub fn new(omega: Vec<MatrixSeries>) -> Result<Self, GeometryError> {
        let first = omega
            .first()
            .ok_or_else(|| GeometryError::Dimension("a form needs at least one component".into()))?;
        let spec = Arc::clone(first.spec());
        let (size, order) = (first.rows(), first.order());
        if spec.blocks() != 0 || spec.vars() != omega.len() {
            return Err(GeometryError::Dimension(format!(
                "{} components over a ring with {} variables and {} blocks",
                omega.len(),
                spec.vars(),
                spec.blocks()
            )));
        }
        for m in &omega {
            if m.rows() != size || m.cols() != size || **m.spec() != *spec {
                return Err(GeometryError::Dimension("components differ in shape or ring".into()));
            }
            if m.order() != order {
                return Err(GeometryError::Order {
                    need: order,
                    have: m.order(),
                });
            }
        }
        Ok(CoordOneForm {
            size,
            order,
            spec,
            omega,
        })
    }

    pub fn zero(dim: usize, size: usize, order: u32) -> Self {
        let spec = Arc::new(BlockSpec::base(dim));
        let omega = (0..dim).map(|_| MatrixSeries::zero(&spec, order, size, size)).collect();
        CoordOneForm {
            size,
            order,
            spec,
            omega,
        }
    }

    /// Constant components.
    pub fn constant(dim: usize, order: u32, omega: &[Vec<Vec<Rational>>]) -> Result<Self, GeometryError> {
        let spec = Arc::new(BlockSpec::base(dim));
        Self::new(omega.iter().map(|m| MatrixSeries::from_rationals(&spec, order, m)).collect())
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn spec(&self) -> &Arc<BlockSpec> {
        &self.spec
    }

    pub fn components(&self) -> &[MatrixSeries] {
        &self.omega
    }

    pub fn truncate(&self, order: u32) -> Self {
        CoordOneForm {
            size: self.size,
            order: order.min(self.order),
            spec: Arc::clone(&self.spec),
            omega: self.omega.iter().map(|m| m.truncate(order)).collect(),
        }
    }

    fn lifted(&self, spec: &Arc<BlockSpec>, order: u32) -> Result<Vec<MatrixSeries>, GeometryError> {
        if spec.vars() != self.dim() {
            return Err(GeometryError::Dimension(format!(
                "form of dimension {} in a ring with {} variables",
                self.dim(),
                spec.vars()
            )));
        }
        Ok(self
            .omega
            .iter()
            .map(|m| m.with_order(order).embed(spec))
            .collect::<Result<_, _>>()?)
    }

    /// `omega(p, p + d_block)` at `p = x0 + x + sum of the shift blocks`,
    /// in the ring `spec` at `order`.
    pub fn eval_form(
        &self,
        spec: &Arc<BlockSpec>,
        order: u32,
        x0: &[Rational],
        shift: &[usize],
        block: usize,
    ) -> Result<MatrixSeries, GeometryError> {
        let based = if x0.iter().all(Rational::is_zero) {
            self.clone()
        } else {
            let omega = self
                .omega
                .iter()
                .map(|m| m.map(|e| e.translate(x0)))
                .collect::<Result<_, _>>()?;
            CoordOneForm::new(omega)?
        };
        let mut out = MatrixSeries::identity(spec, order, self.size);
        for (a, om) in based.lifted(spec, order)?.into_iter().enumerate() {
            let mut om = om;
            for &s in shift {
                om = om.map(|e| e.taylor_shift(s))?;
            }
            let eps = TruncatedSeries::eps(spec, order, block, a)?;
            out = out.try_add(&om.scale_series(&eps)?)?;
        }
        Ok(out)
    }

    /// `Omega(x; d_block)` in the ring `spec`.
    fn along(&self, lifted: &[MatrixSeries], block: usize) -> Result<MatrixSeries, GeometryError> {
        let first = &lifted[0];
        let mut out = MatrixSeries::zero(first.spec(), first.order(), self.size, self.size);
        for (a, om) in lifted.iter().enumerate() {
            let eps = TruncatedSeries::eps(first.spec(), first.order(), block, a)?;
            out = out.try_add(&om.scale_series(&eps)?)?;
        }
        Ok(out)
    }

    /// `omega(x, x+d1) * omega(x+d1, x+d1+d2)` minus the expansion
    /// `1 + Omega(x; d1+d2) + dOmega(x; d1, d2) + Omega(x; d1) Omega(x; d2)`
    /// over two unrelated blocks. Vanishes for every form.
    pub fn basicx_verify(&self) -> Result<MatrixSeries, GeometryError> {
        let spec = Arc::new(BlockSpec::generic(self.dim(), 2));
        let n = self.order;
        let zero = vec![Rational::zero(); self.dim()];
        let lhs = self
            .eval_form(&spec, n, &zero, &[], 0)?
            .try_mul(&self.eval_form(&spec, n, &zero, &[0], 1)?)?;
        let lifted = self.lifted(&spec, n)?;
        let (o1, o2) = (self.along(&lifted, 0)?, self.along(&lifted, 1)?);
        let mut rhs = MatrixSeries::identity(&spec, n, self.size).try_add(&o1)?.try_add(&o2)?;
        for a in 0..self.dim() {
            for (b, om) in lifted.iter().enumerate() {
                let e = TruncatedSeries::eps(&spec, n, 0, a)?.try_mul(&TruncatedSeries::eps(&spec, n, 1, b)?)?;
                rhs = rhs.try_add(&om.derivative(a)?.scale_series(&e)?)?;
            }
        }
        rhs = rhs.try_add(&o1.try_mul(&o2)?)?;
        Ok(lhs.try_sub(&rhs)?)
    }

    /// Closedness residual from the component formula.
    pub fn closedness_residual(&self) -> Result<ClosednessResidual, GeometryError> {
        need_order(1, self.order)?;
        let m = self.order - 1;
        let om: Vec<MatrixSeries> = self.omega.iter().map(|o| o.truncate(m)).collect();
        let t = |a: usize, b: usize| -> Result<MatrixSeries, GeometryError> {
            let d = self.omega[b].derivative(a)?.truncate(m);
            Ok(d.try_add(&om[a].try_mul(&om[b])?)?)
        };
        let mut entries = Vec::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                entries.push(((a, b), t(a, b)?.try_sub(&t(b, a)?)?));
            }
        }
        Ok(ClosednessResidual { order: m, entries })
    }

    /// Closedness residual read off `omega(x,y) * omega(y,z) - omega(x,z)`
    /// with `y = x + d1`, `z = y + d2` and `d1 + d2` a neighbour of zero:
    /// the coefficient of `eps_{1,a} eps_{2,b}`.
    pub fn closedness_residual_paired(&self) -> Result<ClosednessResidual, GeometryError> {
        need_order(1, self.order)?;
        let m = self.order - 1;
        let ring = self.order + 1;
        let spec = Arc::new(BlockSpec::new(self.dim(), 2, &[(0, 1)])?);
        let zero = vec![Rational::zero(); self.dim()];
        let lhs = self
            .eval_form(&spec, ring, &zero, &[], 0)?
            .try_mul(&self.eval_form(&spec, ring, &zero, &[0], 1)?)?;
        let lifted = self.lifted(&spec, ring)?;
        let direct = MatrixSeries::identity(&spec, ring, self.size)
            .try_add(&self.along(&lifted, 0)?)?
            .try_add(&self.along(&lifted, 1)?)?;
        let diff = lhs.try_sub(&direct)?;
        let mut entries = Vec::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                let c = diff.map(|e| Ok(e.block_coefficient(&[(0, a), (1, b)])?.truncate(m)))?;
                entries.push(((a, b), c));
            }
        }
        Ok(ClosednessResidual { order: m, entries })
    }

    /// `omega(x, x+d1) * omega(x+d1, x+d1+d2)` over two unrelated blocks.
    pub fn quadrangle(&self) -> Result<MatrixSeries, GeometryError> {
        let spec = Arc::new(BlockSpec::generic(self.dim(), 2));
        let zero = vec![Rational::zero(); self.dim()];
        Ok(self
            .eval_form(&spec, self.order, &zero, &[], 0)?
            .try_mul(&self.eval_form(&spec, self.order, &zero, &[0], 1)?)?)
    }

    /// Whether [`Self::quadrangle`] is unchanged by exchanging the blocks,
    /// compared through `order - 1` where both sides are exact.
    pub fn quadrangle_symmetric(&self) -> Result<bool, GeometryError> {
        need_order(1, self.order)?;
        let q = self.quadrangle()?.truncate(self.order - 1);
        Ok(q.map(|e| e.swap_blocks(0, 1))? == q)
    }

    /// Solves `d_a f = f Omega_a`, `f(0) = 1` degree by degree; the result
    /// is exact through `order + 1`.
    pub fn formal_primitive(&self) -> Result<Result<MatrixSeries, Obstruction>, GeometryError> {
        let top = self.order + 1;
        let om: Vec<MatrixSeries> = self.omega.iter().map(|m| m.with_order(top)).collect();
        let mut f = MatrixSeries::identity(&self.spec, top, self.size);
        let x: Vec<TruncatedSeries> = (0..self.dim())
            .map(|a| TruncatedSeries::var(&self.spec, top, a))
            .collect::<Result<_, _>>()?;
        for k in 1..=top {
            let g: Vec<MatrixSeries> = om
                .iter()
                .map(|o| f.try_mul(o).and_then(|p| p.map(|e| Ok(e.homogeneous(k - 1)))))
                .collect::<Result<_, _>>()?;
            for a in 0..self.dim() {
                for b in a + 1..self.dim() {
                    let curl = g[a].derivative(b)?.try_sub(&g[b].derivative(a)?)?;
                    if !curl.is_zero() {
                        return Ok(Err(Obstruction {
                            degree: k - 1,
                            component: (a, b),
                            discrepancy: curl,
                        }));
                    }
                }
            }
            let mut fk = MatrixSeries::zero(&self.spec, top, self.size, self.size);
            for (a, ga) in g.iter().enumerate() {
                fk = fk.try_add(&ga.scale_series(&x[a])?)?;
            }
            f = f.try_add(&fk.scale(&Rational::new(1, k as i64)))?;
        }
        let back = maurer_cartan(&f)?;
        if back != *self {
            return Err(GeometryError::Verification(
                "primitive does not reproduce the form".into(),
            ));
        }
        Ok(Ok(f))
    }
}

/// `Omega_a = f^-1 d_a f`, exact through `order - 1`.
pub fn maurer_cartan(f: &MatrixSeries) -> Result<CoordOneForm, GeometryError> {
    need_order(1, f.order())?;
    if f.spec().blocks() != 0 {
        return Err(GeometryError::Dimension("map must be over the base ring".into()));
    }
    let m = f.order() - 1;
    let inv = f.invert()?.truncate(m);
    let omega = (0..f.spec().vars())
        .map(|a| Ok(inv.try_mul(&f.derivative(a)?.truncate(m))?))
        .collect::<Result<_, GeometryError>>()?;
    CoordOneForm::new(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn elementary(i: usize, j: usize) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![q(0); 2]; 2];
        m[i][j] = q(1);
        m
    }

    fn counterexample() -> CoordOneForm {
        CoordOneForm::constant(2, 3, &[elementary(0, 1), elementary(1, 0)]).unwrap()
    }

    #[test]
    fn zero_form_evaluates_to_identity() {
        let w = CoordOneForm::zero(2, 3, 4);
        let spec = Arc::new(BlockSpec::generic(2, 1));
        let e = w.eval_form(&spec, 4, &[q(1), q(2)], &[], 0).unwrap();
        assert_eq!(e, MatrixSeries::identity(&spec, 4, 3));
        assert!(w.basicx_verify().unwrap().is_zero());
        assert_eq!(w.formal_primitive().unwrap().unwrap(), MatrixSeries::identity(w.spec(), 5, 3));
    }

    #[test]
    fn maurer_cartan_of_unipotent_map() {
        // f = 1 + x_0 E01, f^-1 = 1 - x_0 E01, so Omega_0 = E01 and Omega_1 = 0
        let spec = Arc::new(BlockSpec::base(2));
        let x0 = TruncatedSeries::var(&spec, 4, 0).unwrap();
        let mut f = MatrixSeries::identity(&spec, 4, 2);
        f.set(0, 1, x0);
        let w = maurer_cartan(&f).unwrap();
        assert_eq!(w.order(), 3);
        assert_eq!(w.components()[0], MatrixSeries::from_rationals(&spec, 3, &elementary(0, 1)));
        assert!(w.components()[1].is_zero());
        assert!(w.closedness_residual().unwrap().is_zero());
        assert_eq!(w.formal_primitive().unwrap().unwrap(), f);
    }

    #[test]
    fn counterexample_is_not_closed() {
        let w = counterexample();
        let r = w.closedness_residual().unwrap();
        // E01 E10 - E10 E01 = diag(1, -1)
        let expect = MatrixSeries::from_rationals(w.spec(), 2, &[vec![q(1), q(0)], vec![q(0), q(-1)]]);
        assert_eq!(r.entries, vec![((0, 1), expect)]);
        assert_eq!(w.closedness_residual_paired().unwrap(), r);
        assert!(!w.quadrangle_symmetric().unwrap());
        let ob = w.formal_primitive().unwrap().unwrap_err();
        assert_eq!((ob.degree, ob.component), (1, (0, 1)));
    }

    #[test]
    fn constant_form_basicx() {
        let w = counterexample();
        assert!(w.basicx_verify().unwrap().is_zero());
    }

    #[test]
    fn translated_evaluation() {
        // Omega_0 = x_1 * E00 in one block: at x0 = (0, 3) the constant part is 3 E00
        let spec = Arc::new(BlockSpec::base(2));
        let mut m = MatrixSeries::zero(&spec, 2, 1, 1);
        m.set(0, 0, TruncatedSeries::var(&spec, 2, 1).unwrap());
        let w = CoordOneForm::new(vec![m, MatrixSeries::zero(&spec, 2, 1, 1)]).unwrap();
        let ring = Arc::new(BlockSpec::generic(2, 1));
        let e = w.eval_form(&ring, 2, &[q(0), q(3)], &[], 0).unwrap();
        let eps = TruncatedSeries::eps(&ring, 2, 0, 0).unwrap();
        let x1 = TruncatedSeries::var(&ring, 2, 1).unwrap();
        let expect = &TruncatedSeries::one(&ring, 2) + &(&(&x1 + &TruncatedSeries::constant(&ring, 2, q(3))) * &eps);
        assert_eq!(e.get(0, 0), &expect);
    }
}
