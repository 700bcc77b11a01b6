//! Combinatorial differential geometry, checked exactly.
//!
//! Two engines share this crate. The discrete one works on finite graphs
//! (neighbour spaces) with group-valued 1-forms, groupoid connections and
//! ternary affine connections. The formal one works with jets: truncated
//! polynomials over the rationals with square-zero generator blocks standing
//! in for first-order infinitesimals.

pub mod affine;
pub mod fixtures;
pub mod format;
pub mod forms;
pub mod geometry;
pub mod group;
pub mod groupoid;
pub mod jet;
pub mod neighbor;
