//! Exact truncated series over the rationals with square-zero blocks.

pub mod io;
pub mod matrix;
pub mod rational;
pub mod series;

pub use matrix::MatrixSeries;
pub use rational::Rational;
pub use series::{series_compose, BlockSpec, Monomial, SeriesError, TruncatedSeries};
