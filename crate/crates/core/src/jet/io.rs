//! JSON form of series. Blocks are numbered from 1 in files, base
//! coordinates from 0.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::matrix::MatrixSeries;
use super::rational::Rational;
use super::series::{BlockSpec, TruncatedSeries};
use crate::format::FormatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exp: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub block_part: Vec<(usize, usize)>,
    pub coef: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockJson {
    #[serde(default)]
    pub pairs_with: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub vars: usize,
    pub order: u32,
    #[serde(default)]
    pub blocks: Vec<BlockJson>,
    pub terms: Vec<TermJson>,
}

/// A series embedded in a larger file, where the variable count and order
/// come from the enclosing document: either a bare term list or a full
/// series object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesRepr {
    Terms(Vec<TermJson>),
    Full(SeriesFile),
}

pub fn spec_from_json(vars: usize, blocks: &[BlockJson]) -> Result<BlockSpec, FormatError> {
    let mut pairs = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for &j in &b.pairs_with {
            if j == 0 || j > blocks.len() {
                return Err(FormatError::Invalid(format!(
                    "block {} pairs with unknown block {j}",
                    i + 1
                )));
            }
            pairs.push((i, j - 1));
        }
    }
    // listing a pair on one side is enough
    Ok(BlockSpec::new(vars, blocks.len(), &pairs)?)
}

pub fn spec_to_json(spec: &BlockSpec) -> Vec<BlockJson> {
    (0..spec.blocks())
        .map(|i| BlockJson {
            pairs_with: (0..spec.blocks())
                .filter(|&j| j != i && spec.is_paired(i, j))
                .map(|j| j + 1)
                .collect(),
        })
        .collect()
}

pub fn terms_to_json(s: &TruncatedSeries) -> Vec<TermJson> {
    let vars = s.spec().vars();
    s.terms()
        .iter()
        .map(|(m, c)| TermJson {
            exp: m.exponents(vars),
            block_part: m.block_part().into_iter().map(|(b, c)| (b + 1, c)).collect(),
            coef: c.clone(),
        })
        .collect()
}

pub fn terms_from_json(
    spec: &Arc<BlockSpec>,
    order: u32,
    terms: &[TermJson],
) -> Result<TruncatedSeries, FormatError> {
    let mut raw = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let mut blocks = Vec::with_capacity(t.block_part.len());
        for &(b, c) in &t.block_part {
            if b == 0 {
                return Err(FormatError::Invalid(format!(
                    "term {k}: blocks are numbered from 1"
                )));
            }
            blocks.push((b - 1, c));
        }
        let degree: u32 = t.exp.iter().sum::<u32>() + blocks.len() as u32;
        if degree > order {
            return Err(FormatError::Invalid(format!(
                "term {k} has degree {degree} above the order {order}"
            )));
        }
        raw.push((t.exp.clone(), blocks, t.coef.clone()));
    }
    Ok(TruncatedSeries::from_terms(spec, order, raw)?)
}

pub fn series_to_file(s: &TruncatedSeries) -> SeriesFile {
    SeriesFile {
        vars: s.spec().vars(),
        order: s.order(),
        blocks: spec_to_json(s.spec()),
        terms: terms_to_json(s),
    }
}

pub fn series_from_file(f: &SeriesFile) -> Result<TruncatedSeries, FormatError> {
    let spec = Arc::new(spec_from_json(f.vars, &f.blocks)?);
    terms_from_json(&spec, f.order, &f.terms)
}

/// Reads an embedded series into `spec` at `order`, checking that a full
/// series object agrees with the enclosing document.
pub fn series_from_repr(
    spec: &Arc<BlockSpec>,
    order: u32,
    repr: &SeriesRepr,
) -> Result<TruncatedSeries, FormatError> {
    match repr {
        SeriesRepr::Terms(t) => terms_from_json(spec, order, t),
        SeriesRepr::Full(f) => {
            if f.vars != spec.vars() || f.order != order || !f.blocks.is_empty() {
                return Err(FormatError::Invalid(format!(
                    "embedded series (vars {}, order {}) does not match the document (vars {}, order {order})",
                    f.vars,
                    f.order,
                    spec.vars()
                )));
            }
            terms_from_json(spec, order, &f.terms)
        }
    }
}

pub fn matrix_to_json(m: &MatrixSeries) -> Vec<Vec<SeriesRepr>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| SeriesRepr::Terms(terms_to_json(m.get(i, j))))
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(
    spec: &Arc<BlockSpec>,
    order: u32,
    size: usize,
    rows: &[Vec<SeriesRepr>],
) -> Result<MatrixSeries, FormatError> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(FormatError::Invalid(format!("expected a {size}x{size} matrix")));
    }
    let entries = rows
        .iter()
        .flatten()
        .map(|e| series_from_repr(spec, order, e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MatrixSeries::from_entries(spec, order, size, size, entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_pairs() {
        let text = r#"{"vars":2,"order":4,"blocks":[{"pairs_with":[2]},{}],
            "terms":[{"exp":[1,0],"block_part":[[1,1],[2,0]],"coef":"1/2"},
                     {"exp":[0,2],"coef":"-3"}]}"#;
        let f: SeriesFile = serde_json::from_str(text).unwrap();
        let s = series_from_file(&f).unwrap();
        // e_{1,1} e_{2,0} is rewritten to -e_{1,0} e_{2,1}
        let back = series_to_file(&s);
        assert_eq!(back.blocks[0].pairs_with, vec![2]);
        assert_eq!(back.blocks[1].pairs_with, vec![1]);
        assert_eq!(back.terms[0].block_part, vec![(1, 0), (2, 1)]);
        assert_eq!(back.terms[0].coef, Rational::new(-1, 2));
        assert_eq!(series_from_file(&back).unwrap(), s);
    }

    #[test]
    fn rejects_bad_terms() {
        let bad = [
            r#"{"vars":1,"order":2,"terms":[{"exp":[3],"coef":"1"}]}"#,
            r#"{"vars":1,"order":2,"terms":[{"exp":[1,0],"coef":"1"}]}"#,
            r#"{"vars":1,"order":2,"blocks":[{}],"terms":[{"exp":[0],"block_part":[[0,0]],"coef":"1"}]}"#,
            r#"{"vars":1,"order":2,"terms":[{"exp":[0],"coef":"2/4"}]}"#,
        ];
        for text in bad {
            let parsed: Result<SeriesFile, _> = serde_json::from_str(text);
            if let Ok(f) = parsed {
                assert!(series_from_file(&f).is_err(), "{text}");
            }
        }
    }
}
