//! Matrices whose entries are truncated series.

use std::sync::Arc;

use super::rational::Rational;
use super::series::{BlockSpec, SeriesError, TruncatedSeries};

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixSeries {
    rows: usize,
    cols: usize,
    spec: Arc<BlockSpec>,
    order: u32,
    entries: Vec<TruncatedSeries>,
}

impl std::fmt::Debug for MatrixSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<_> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect::<Vec<_>>())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl MatrixSeries {
    pub fn zero(spec: &Arc<BlockSpec>, order: u32, rows: usize, cols: usize) -> Self {
        MatrixSeries {
            rows,
            cols,
            spec: Arc::clone(spec),
            order,
            entries: vec![TruncatedSeries::zero(spec, order); rows * cols],
        }
    }

    pub fn identity(spec: &Arc<BlockSpec>, order: u32, n: usize) -> Self {
        let mut m = Self::zero(spec, order, n, n);
        for i in 0..n {
            m.entries[i * n + i] = TruncatedSeries::one(spec, order);
        }
        m
    }

    /// Row-major entries; all must share one spec and order.
    pub fn from_entries(
        spec: &Arc<BlockSpec>,
        order: u32,
        rows: usize,
        cols: usize,
        entries: Vec<TruncatedSeries>,
    ) -> Result<Self, SeriesError> {
        if entries.len() != rows * cols {
            return Err(SeriesError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for e in &entries {
            if **e.spec() != **spec {
                return Err(SeriesError::SpecMismatch);
            }
            if e.order() != order {
                return Err(SeriesError::OrderMismatch(order, e.order()));
            }
        }
        Ok(MatrixSeries {
            rows,
            cols,
            spec: Arc::clone(spec),
            order,
            entries,
        })
    }

    /// Constant matrix from rational rows.
    pub fn from_rationals(spec: &Arc<BlockSpec>, order: u32, rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let entries = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged matrix");
                row.iter().map(|v| TruncatedSeries::constant(spec, order, v.clone()))
            })
            .collect();
        MatrixSeries {
            rows: r,
            cols: c,
            spec: Arc::clone(spec),
            order,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spec(&self) -> &Arc<BlockSpec> {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TruncatedSeries) {
        assert!(*v.spec() == self.spec && v.order() == self.order);
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncatedSeries::is_zero)
    }

    pub fn map<F>(&self, f: F) -> Result<Self, SeriesError>
    where
        F: Fn(&TruncatedSeries) -> Result<TruncatedSeries, SeriesError>,
    {
        let entries: Vec<_> = self.entries.iter().map(f).collect::<Result<_, _>>()?;
        let (spec, order) = match entries.first() {
            Some(e) => (Arc::clone(e.spec()), e.order()),
            None => (Arc::clone(&self.spec), self.order),
        };
        Ok(MatrixSeries {
            rows: self.rows,
            cols: self.cols,
            spec,
            order,
            entries,
        })
    }

    fn same_shape(&self, other: &Self) -> Result<(), SeriesError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SeriesError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(MatrixSeries {
            entries,
            ..self.clone()
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_, _>>()?;
        Ok(MatrixSeries {
            entries,
            ..self.clone()
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.cols != other.rows {
            return Err(SeriesError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(&self.spec, self.order, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = TruncatedSeries::zero(&self.spec, self.order);
                for k in 0..self.cols {
                    acc = acc.try_add(&self.get(i, k).try_mul(other.get(k, j))?)?;
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Multiplies every entry by the scalar series `s`.
    pub fn scale_series(&self, s: &TruncatedSeries) -> Result<Self, SeriesError> {
        self.map(|e| e.try_mul(s))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|e| Ok(e.scale(c))).expect("scaling cannot fail")
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map(|e| Ok(e.truncate(order))).expect("truncation cannot fail")
    }

    pub fn with_order(&self, order: u32) -> Self {
        self.map(|e| Ok(e.with_order(order))).expect("reordering cannot fail")
    }

    pub fn embed(&self, spec: &Arc<BlockSpec>) -> Result<Self, SeriesError> {
        let mut out = self.map(|e| e.embed(spec))?;
        out.spec = Arc::clone(spec);
        Ok(out)
    }

    pub fn derivative(&self, var: usize) -> Result<Self, SeriesError> {
        self.map(|e| e.derivative(var))
    }

    /// Degree-zero coefficients.
    pub fn constant_part(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).constant_term()).collect())
            .collect()
    }

    /// Inverse of a square matrix with invertible constant part.
    ///
    /// Writes `M = C (1 + P)` with `P` of positive degree, so the Neumann
    /// series `sum (-P)^k` terminates at the truncation order.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        if self.rows != self.cols {
            return Err(SeriesError::Shape(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let c_inv = invert_rational(&self.constant_part()).ok_or(SeriesError::SingularConstant)?;
        let c_inv = MatrixSeries::from_rationals(&self.spec, self.order, &c_inv);
        let id = MatrixSeries::identity(&self.spec, self.order, n);
        // P = C^-1 M - 1 has no constant terms
        let p = c_inv.try_mul(self)?.try_sub(&id)?;
        let minus_p = p.scale(&-Rational::one());
        let mut sum = id.clone();
        let mut power = id;
        for _ in 0..self.order {
            power = power.try_mul(&minus_p)?;
            if power.is_zero() {
                break;
            }
            sum = sum.try_add(&power)?;
        }
        sum.try_mul(&c_inv)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(&self.spec, self.order, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }
}

/// Gauss-Jordan inverse over the rationals, `None` when singular.
pub fn invert_rational(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip()?;
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..2 * n {
                    let d = &f * &a[col][k];
                    a[r][k] -= &d;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

macro_rules! matrix_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl std::ops::$tr<&MatrixSeries> for &MatrixSeries {
            type Output = MatrixSeries;
            /// Panics on shape, spec or order mismatch.
            fn $m(self, rhs: &MatrixSeries) -> MatrixSeries {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

matrix_op!(Add, add, try_add);
matrix_op!(Sub, sub, try_sub);
matrix_op!(Mul, mul, try_mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn rational_inverse() {
        let m = vec![vec![r(2), r(1)], vec![r(1), r(1)]];
        let inv = invert_rational(&m).unwrap();
        assert_eq!(inv, vec![vec![r(1), r(-1)], vec![r(-1), r(2)]]);
        assert!(invert_rational(&[vec![r(1), r(2)], vec![r(2), r(4)]]).is_none());
    }

    #[test]
    fn invert_identity_and_nilpotent_perturbation() {
        let spec = Arc::new(BlockSpec::generic(2, 2));
        let n = 4;
        let id = MatrixSeries::identity(&spec, n, 2);
        assert_eq!(id.invert().unwrap(), id);

        // 1 + A with A built from block generators: A^3 = 0 with two blocks
        let e = |b, c| TruncatedSeries::eps(&spec, n, b, c).unwrap();
        let mut a = MatrixSeries::zero(&spec, n, 2, 2);
        a.set(0, 1, e(0, 0));
        a.set(1, 0, e(1, 1));
        a.set(1, 1, &e(0, 1) + &e(1, 0));
        let m = &id + &a;
        let expected = &(&id - &a) + &(&a * &a);
        assert!((&(&a * &a) * &a).is_zero());
        assert_eq!(m.invert().unwrap(), expected);
    }

    #[test]
    fn inverse_is_two_sided() {
        let spec = Arc::new(BlockSpec::base(2));
        let n = 5;
        let x = TruncatedSeries::var(&spec, n, 0).unwrap();
        let y = TruncatedSeries::var(&spec, n, 1).unwrap();
        let mut m = MatrixSeries::from_rationals(&spec, n, &[vec![r(2), r(1)], vec![r(1), r(1)]]);
        m.set(0, 0, &m.get(0, 0).clone() + &(&x * &y));
        m.set(1, 0, &m.get(1, 0).clone() + &x.pow(3).scale(&Rational::new(1, 2)));
        let inv = m.invert().unwrap();
        let id = MatrixSeries::identity(&spec, n, 2);
        assert_eq!(&m * &inv, id);
        assert_eq!(&inv * &m, id);
    }

    #[test]
    fn singular_constant_is_rejected() {
        let spec = Arc::new(BlockSpec::base(1));
        let x = TruncatedSeries::var(&spec, 3, 0).unwrap();
        let m = MatrixSeries::from_entries(&spec, 3, 1, 1, vec![x]).unwrap();
        assert_eq!(m.invert(), Err(SeriesError::SingularConstant));
    }
}
