//! JSON forms of 1-forms, Christoffel fields, matrix maps and charts.
//! Absent components of a field or form are zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ChristoffelField, CoordOneForm, FormalChart};
use crate::format::FormatError;
use crate::jet::io::{matrix_from_json, matrix_to_json, series_from_repr, terms_to_json, SeriesRepr};
use crate::jet::{BlockSpec, MatrixSeries, TruncatedSeries};

pub type MatrixJson = Vec<Vec<SeriesRepr>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaFile {
    pub dim: usize,
    pub order: u32,
    /// Keys `"c|a|b"`.
    #[serde(default)]
    pub gamma: BTreeMap<String, SeriesRepr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaFile {
    pub dim: usize,
    pub size: usize,
    pub order: u32,
    /// Keys `"a"`.
    #[serde(default)]
    pub omega: BTreeMap<String, MatrixJson>,
}

/// A matrix-valued function `f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub dim: usize,
    pub size: usize,
    pub order: u32,
    pub map: MatrixJson,
}

/// Components `phi^c`, keys `"c"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartFile {
    pub dim: usize,
    pub order: u32,
    pub chart: BTreeMap<String, SeriesRepr>,
}

fn check_dim(dim: usize) -> Result<(), FormatError> {
    if dim == 0 || dim > crate::jet::series::MAX_VARS {
        return Err(FormatError::invalid(format!(
            "dimension {dim} outside 1..={}",
            crate::jet::series::MAX_VARS
        )));
    }
    Ok(())
}

fn parse_index(key: &str, parts: usize, dim: usize) -> Result<Vec<usize>, FormatError> {
    let idx: Vec<usize> = key
        .split('|')
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| FormatError::invalid(format!("bad key {key:?}")))?;
    if idx.len() != parts || idx.iter().any(|&i| i >= dim) {
        return Err(FormatError::invalid(format!(
            "key {key:?} must be {parts} index(es) below {dim}"
        )));
    }
    Ok(idx)
}

impl GammaFile {
    pub fn to_field(&self) -> Result<ChristoffelField, FormatError> {
        check_dim(self.dim)?;
        let n = self.dim;
        let spec = Arc::new(BlockSpec::base(n));
        let mut gamma = vec![TruncatedSeries::zero(&spec, self.order); n * n * n];
        for (key, s) in &self.gamma {
            let i = parse_index(key, 3, n)?;
            gamma[(i[0] * n + i[1]) * n + i[2]] = series_from_repr(&spec, self.order, s)?;
        }
        ChristoffelField::new(n, gamma).map_err(|e| FormatError::invalid(e.to_string()))
    }

    pub fn from_field(g: &ChristoffelField) -> Self {
        let n = g.dim();
        let mut gamma = BTreeMap::new();
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let s = g.get(c, a, b);
                    if !s.is_zero() {
                        gamma.insert(format!("{c}|{a}|{b}"), SeriesRepr::Terms(terms_to_json(s)));
                    }
                }
            }
        }
        GammaFile {
            dim: n,
            order: g.order(),
            gamma,
        }
    }
}

impl OmegaFile {
    pub fn to_form(&self) -> Result<CoordOneForm, FormatError> {
        check_dim(self.dim)?;
        let spec = Arc::new(BlockSpec::base(self.dim));
        let mut omega = vec![MatrixSeries::zero(&spec, self.order, self.size, self.size); self.dim];
        for (key, m) in &self.omega {
            let a = parse_index(key, 1, self.dim)?[0];
            omega[a] = matrix_from_json(&spec, self.order, self.size, m)?;
        }
        CoordOneForm::new(omega).map_err(|e| FormatError::invalid(e.to_string()))
    }

    pub fn from_form(w: &CoordOneForm) -> Self {
        let omega = w
            .components()
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(a, m)| (a.to_string(), matrix_to_json(m)))
            .collect();
        OmegaFile {
            dim: w.dim(),
            size: w.size(),
            order: w.order(),
            omega,
        }
    }
}

impl MapFile {
    pub fn to_matrix(&self) -> Result<MatrixSeries, FormatError> {
        check_dim(self.dim)?;
        let spec = Arc::new(BlockSpec::base(self.dim));
        matrix_from_json(&spec, self.order, self.size, &self.map)
    }

    pub fn from_matrix(f: &MatrixSeries) -> Self {
        MapFile {
            dim: f.spec().vars(),
            size: f.rows(),
            order: f.order(),
            map: matrix_to_json(f),
        }
    }
}

impl ChartFile {
    pub fn to_chart(&self) -> Result<FormalChart, FormatError> {
        check_dim(self.dim)?;
        let spec = Arc::new(BlockSpec::base(self.dim));
        let mut phi = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            let s = self
                .chart
                .get(&c.to_string())
                .ok_or_else(|| FormatError::invalid(format!("chart component {c} missing")))?;
            phi.push(series_from_repr(&spec, self.order, s)?);
        }
        if self.chart.len() != self.dim {
            return Err(FormatError::invalid("chart has keys outside 0..dim"));
        }
        FormalChart::new(phi).map_err(|e| FormatError::invalid(e.to_string()))
    }

    pub fn from_chart(phi: &FormalChart) -> Self {
        ChartFile {
            dim: phi.dim(),
            order: phi.order(),
            chart: phi
                .components()
                .iter()
                .enumerate()
                .map(|(c, s)| (c.to_string(), SeriesRepr::Terms(terms_to_json(s))))
                .collect(),
        }
    }
}
