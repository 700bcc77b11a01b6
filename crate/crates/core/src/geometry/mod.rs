//! Coordinate calculus on jets: matrix-valued 1-forms, Christoffel fields
//! and formal affine charts around the origin.
//!
//! A point is a vector of series in some ring; the base variables stand for
//! the generic point `x` and block generators for first-order displacements.
//! Every result carries the order through which it is exact.

mod chart;
mod christoffel;
mod form;
pub mod io;

pub use chart::{heap_grid_residual, ChartObstruction, FormalChart};
pub use christoffel::{ChristoffelField, JetCubeReport, ScalarReport};
pub use form::{maurer_cartan, ClosednessResidual, CoordOneForm, Obstruction};

use std::sync::Arc;

use crate::jet::{BlockSpec, Rational, SeriesError, TruncatedSeries};

pub type Point = Vec<TruncatedSeries>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("input of order {have} is too short; order {need} is required")]
    Order { need: u32, have: u32 },
    #[error("connection is not symmetric: Gamma^{0}_{1}{2} != Gamma^{0}_{2}{1}")]
    NotSymmetric(usize, usize, usize),
    #[error("map is not a chart at the origin: {0}")]
    NotAChart(String),
    #[error("self-check failed: {0}")]
    Verification(String),
}

pub(crate) fn need_order(need: u32, have: u32) -> Result<(), GeometryError> {
    if have < need {
        return Err(GeometryError::Order { need, have });
    }
    Ok(())
}

/// The generic point `x` of a ring.
pub fn coordinates(spec: &Arc<BlockSpec>, order: u32) -> Point {
    (0..spec.vars())
        .map(|a| TruncatedSeries::var(spec, order, a).expect("coordinate in range"))
        .collect()
}

/// The displacement `d` whose coordinates are the generators of `block`.
pub fn displacement(spec: &Arc<BlockSpec>, order: u32, block: usize) -> Result<Point, GeometryError> {
    (0..spec.vars())
        .map(|a| Ok(TruncatedSeries::eps(spec, order, block, a)?))
        .collect()
}

pub fn add(p: &[TruncatedSeries], q: &[TruncatedSeries]) -> Result<Point, GeometryError> {
    zip(p, q, TruncatedSeries::try_add)
}

pub fn sub(p: &[TruncatedSeries], q: &[TruncatedSeries]) -> Result<Point, GeometryError> {
    zip(p, q, TruncatedSeries::try_sub)
}

pub fn scale(p: &[TruncatedSeries], t: &Rational) -> Point {
    p.iter().map(|s| s.scale(t)).collect()
}

/// `(1 - t) x + t y`, computed as `x + t (y - x)`.
pub fn scalar_combination(x: &[TruncatedSeries], y: &[TruncatedSeries], t: &Rational) -> Result<Point, GeometryError> {
    add(x, &scale(&sub(y, x)?, t))
}

pub fn is_zero(p: &[TruncatedSeries]) -> bool {
    p.iter().all(TruncatedSeries::is_zero)
}

fn zip<F>(p: &[TruncatedSeries], q: &[TruncatedSeries], f: F) -> Result<Point, GeometryError>
where
    F: Fn(&TruncatedSeries, &TruncatedSeries) -> Result<TruncatedSeries, SeriesError>,
{
    if p.len() != q.len() {
        return Err(GeometryError::Dimension(format!("points of length {} and {}", p.len(), q.len())));
    }
    p.iter().zip(q).map(|(a, b)| Ok(f(a, b)?)).collect()
}

/// Re-reads a base-variable series in `spec` at `order`, treating it as a
/// polynomial.
pub(crate) fn lift(s: &TruncatedSeries, spec: &Arc<BlockSpec>, order: u32) -> Result<TruncatedSeries, SeriesError> {
    s.with_order(order).embed(spec)
}

/// Whether `p` is exactly the generic point of its ring.
pub(crate) fn is_coordinates(p: &[TruncatedSeries]) -> bool {
    match p.first() {
        Some(first) => p == coordinates(first.spec(), first.order()).as_slice(),
        None => true,
    }
}
