//! Truncated multivariate series with square-zero generator blocks.
//!
//! A series lives in the ring
//!
//! ```text
//! Q[x_1..x_n, eps_{i,a}] / (within-block products, declared pair relations, total degree > N)
//! ```
//!
//! where every block `i` carries one generator `eps_{i,a}` per base
//! coordinate `a`. Block generators count as degree one, so the truncation
//! ideal is graded and substitutions `x -> x + d` with `d` of positive degree
//! are well-defined ring maps on the quotient. Within a block every product
//! of two generators vanishes (`d_i` is a point of the first-order
//! neighbourhood of zero). For a declared pair `{i, j}` the generators
//! satisfy `eps_{i,a} eps_{j,b} + eps_{i,b} eps_{j,a} = 0`, which is exactly
//! the statement that `d_i + d_j` is again first-order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::rational::Rational;

pub const MAX_VARS: usize = 8;
pub const MAX_BLOCKS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series belong to different block specs")]
    SpecMismatch,
    #[error("truncation orders differ ({0} vs {1})")]
    OrderMismatch(u32, u32),
    #[error("unknown block {0}")]
    UnknownBlock(usize),
    #[error("unknown base variable {0}")]
    UnknownVar(usize),
    #[error("expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("substituted component {0} has a non-zero constant term")]
    NonNilpotentConstant(usize),
    #[error("constant term is singular")]
    SingularConstant,
    #[error("at most {MAX_VARS} base variables are supported (got {0})")]
    TooManyVars(usize),
    #[error("at most {MAX_BLOCKS} blocks are supported (got {0})")]
    TooManyBlocks(usize),
    #[error("invalid block pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Base variable count, infinitesimal blocks and the declared block pairs.
///
/// Blocks are indexed from zero in code. Pairs are stored as `(i, j)` with
/// `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    vars: usize,
    blocks: usize,
    pairs: Vec<(usize, usize)>,
}

impl BlockSpec {
    pub fn new(vars: usize, blocks: usize, pairs: &[(usize, usize)]) -> Result<Self, SeriesError> {
        if vars > MAX_VARS {
            return Err(SeriesError::TooManyVars(vars));
        }
        if blocks > MAX_BLOCKS {
            return Err(SeriesError::TooManyBlocks(blocks));
        }
        let mut norm = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            if i == j || i >= blocks || j >= blocks {
                return Err(SeriesError::InvalidPair(i, j));
            }
            norm.push((i.min(j), i.max(j)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(BlockSpec {
            vars,
            blocks,
            pairs: norm,
        })
    }

    /// Plain truncated polynomials in `vars` variables, no blocks.
    pub fn base(vars: usize) -> Self {
        BlockSpec::new(vars, 0, &[]).expect("too many variables")
    }

    /// `blocks` independent generic points of the first-order neighbourhood.
    pub fn generic(vars: usize, blocks: usize) -> Self {
        BlockSpec::new(vars, blocks, &[]).expect("too many blocks")
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_paired(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i.min(j), i.max(j))).is_ok()
    }
}

/// A monomial `x^e * eps_{i1,a1} * ... * eps_{ik,ak}` with at most one
/// generator per block.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; MAX_VARS],
    // 0 = block absent, c + 1 = generator with coordinate c
    slots: [u8; MAX_BLOCKS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; MAX_VARS],
        slots: [0; MAX_BLOCKS],
    };

    pub fn from_parts(exps: &[u32], block_part: &[(usize, usize)]) -> Result<Self, SeriesError> {
        let mut m = Monomial::ONE;
        if exps.len() > MAX_VARS {
            return Err(SeriesError::TooManyVars(exps.len()));
        }
        for (slot, &e) in m.exps.iter_mut().zip(exps) {
            *slot = u8::try_from(e)
                .map_err(|_| SeriesError::InvalidMonomial(format!("exponent {e} too large")))?;
        }
        for &(b, c) in block_part {
            if b >= MAX_BLOCKS || c >= MAX_VARS {
                return Err(SeriesError::InvalidMonomial(format!("generator ({b}, {c})")));
            }
            if m.slots[b] != 0 {
                return Err(SeriesError::InvalidMonomial(format!(
                    "block {b} appears twice"
                )));
            }
            m.slots[b] = c as u8 + 1;
        }
        Ok(m)
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.exps[var] as u32
    }

    pub fn exponents(&self, vars: usize) -> Vec<u32> {
        self.exps[..vars].iter().map(|&e| e as u32).collect()
    }

    /// `(block, coordinate)` pairs in block order.
    pub fn block_part(&self) -> Vec<(usize, usize)> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0)
            .map(|(b, &s)| (b, s as usize - 1))
            .collect()
    }

    pub fn generator(&self, block: usize) -> Option<usize> {
        match self.slots[block] {
            0 => None,
            s => Some(s as usize - 1),
        }
    }

    pub fn base_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn block_count(&self) -> u32 {
        self.slots.iter().filter(|&&s| s != 0).count() as u32
    }

    pub fn degree(&self) -> u32 {
        self.base_degree() + self.block_count()
    }

    pub fn has_blocks(&self) -> bool {
        self.slots.iter().any(|&s| s != 0)
    }

    fn without_blocks(&self) -> Monomial {
        Monomial {
            exps: self.exps,
            slots: [0; MAX_BLOCKS],
        }
    }

    fn blocks_only(&self) -> Monomial {
        Monomial {
            exps: [0; MAX_VARS],
            slots: self.slots,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // graded lex on base exponents (x_1 dominant), then block part
        self.base_degree()
            .cmp(&other.base_degree())
            .then_with(|| other.exps.cmp(&self.exps))
            .then_with(|| self.block_count().cmp(&other.block_count()))
            .then_with(|| self.slots.cmp(&other.slots))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (v, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("x{v}")),
                _ => parts.push(format!("x{v}^{e}")),
            }
        }
        for (b, c) in self.block_part() {
            parts.push(format!("e{}.{c}", b + 1));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Reduce the block part of `m` modulo the pair relations.
///
/// Blocks of `m` that are linked through declared pairs form components; the
/// generators within a component are antisymmetric in their coordinates, so
/// a repeated coordinate kills the monomial and otherwise the coordinates are
/// sorted into block order, flipping the sign by the permutation parity.
fn reduce_pairs(spec: &BlockSpec, mut m: Monomial) -> Option<(Monomial, bool)> {
    if spec.pairs.is_empty() {
        return Some((m, false));
    }
    let present: Vec<usize> = (0..spec.blocks).filter(|&b| m.slots[b] != 0).collect();
    if present.len() < 2 {
        return Some((m, false));
    }
    let mut comp: [usize; MAX_BLOCKS] = [usize::MAX; MAX_BLOCKS];
    for &b in &present {
        comp[b] = b;
    }
    fn find(comp: &mut [usize; MAX_BLOCKS], b: usize) -> usize {
        let mut r = b;
        while comp[r] != r {
            r = comp[r];
        }
        comp[b] = r;
        r
    }
    for &(i, j) in &spec.pairs {
        if m.slots[i] != 0 && m.slots[j] != 0 {
            let (ri, rj) = (find(&mut comp, i), find(&mut comp, j));
            if ri != rj {
                comp[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut negate = false;
    let mut done = [false; MAX_BLOCKS];
    for &b in &present {
        let root = find(&mut comp, b);
        if done[root] {
            continue;
        }
        done[root] = true;
        let members: Vec<usize> = present
            .iter()
            .copied()
            .filter(|&c| find(&mut comp, c) == root)
            .collect();
        if members.len() < 2 {
            continue;
        }
        let mut coords: Vec<u8> = members.iter().map(|&c| m.slots[c]).collect();
        // bubble sort keeps track of the parity
        for i in 0..coords.len() {
            for j in 0..coords.len() - 1 - i {
                if coords[j] > coords[j + 1] {
                    coords.swap(j, j + 1);
                    negate = !negate;
                }
            }
        }
        if coords.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        for (&blk, &c) in members.iter().zip(&coords) {
            m.slots[blk] = c;
        }
    }
    Some((m, negate))
}

/// Product of two normal-form monomials, or `None` when it vanishes.
fn mul_monomials(spec: &BlockSpec, order: u32, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
    if a.degree() + b.degree() > order {
        return None;
    }
    let mut out = *a;
    for v in 0..spec.vars {
        out.exps[v] += b.exps[v];
    }
    for blk in 0..spec.blocks {
        if b.slots[blk] != 0 {
            if out.slots[blk] != 0 {
                return None;
            }
            out.slots[blk] = b.slots[blk];
        }
    }
    reduce_pairs(spec, out)
}

/// An element of the truncated block-nilpotent ring.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    spec: Arc<BlockSpec>,
    order: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c}*{m:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl TruncatedSeries {
    pub fn zero(spec: &Arc<BlockSpec>, order: u32) -> Self {
        TruncatedSeries {
            spec: Arc::clone(spec),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(spec: &Arc<BlockSpec>, order: u32, c: Rational) -> Self {
        let mut s = Self::zero(spec, order);
        s.add_term(Monomial::ONE, c);
        s
    }

    pub fn one(spec: &Arc<BlockSpec>, order: u32) -> Self {
        Self::constant(spec, order, Rational::one())
    }

    /// The base coordinate `x_var`.
    pub fn var(spec: &Arc<BlockSpec>, order: u32, var: usize) -> Result<Self, SeriesError> {
        if var >= spec.vars {
            return Err(SeriesError::UnknownVar(var));
        }
        let mut exps = vec![0; spec.vars];
        exps[var] = 1;
        let mut s = Self::zero(spec, order);
        s.add_term(Monomial::from_parts(&exps, &[])?, Rational::one());
        Ok(s)
    }

    /// The generator `eps_{block, coord}`.
    pub fn eps(spec: &Arc<BlockSpec>, order: u32, block: usize, coord: usize) -> Result<Self, SeriesError> {
        if block >= spec.blocks {
            return Err(SeriesError::UnknownBlock(block));
        }
        if coord >= spec.vars {
            return Err(SeriesError::UnknownVar(coord));
        }
        let mut s = Self::zero(spec, order);
        s.add_term(Monomial::from_parts(&[], &[(block, coord)])?, Rational::one());
        Ok(s)
    }

    /// Builds a series from `(exponents, block part, coefficient)` triples,
    /// reducing every monomial to normal form.
    pub fn from_terms<I>(spec: &Arc<BlockSpec>, order: u32, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (Vec<u32>, Vec<(usize, usize)>, Rational)>,
    {
        let mut s = Self::zero(spec, order);
        for (exps, blocks, c) in terms {
            if exps.len() != spec.vars {
                return Err(SeriesError::Arity {
                    expected: spec.vars,
                    found: exps.len(),
                });
            }
            for &(b, coord) in &blocks {
                if b >= spec.blocks {
                    return Err(SeriesError::UnknownBlock(b));
                }
                if coord >= spec.vars {
                    return Err(SeriesError::UnknownVar(coord));
                }
            }
            let m = Monomial::from_parts(&exps, &blocks)?;
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn spec(&self) -> &Arc<BlockSpec> {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::ONE)
    }

    /// Lowest total degree present, `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Adds `c * m` after reducing `m`; drops it if above the order or zero.
    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.degree() > self.order {
            return;
        }
        let Some((m, negate)) = reduce_pairs(&self.spec, m) else {
            return;
        };
        let c = if negate { -c } else { c };
        accumulate(&mut self.terms, m, &c);
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if !Arc::ptr_eq(&self.spec, &other.spec) && *self.spec != *other.spec {
            return Err(SeriesError::SpecMismatch);
        }
        if self.order != other.order {
            return Err(SeriesError::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, *m, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, *m, &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negate)) = mul_monomials(&self.spec, self.order, ma, mb) {
                    let p = ca * cb;
                    accumulate(&mut out, m, &if negate { -p } else { p });
                }
            }
        }
        Ok(TruncatedSeries {
            spec: Arc::clone(&self.spec),
            order: self.order,
            terms: out,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.spec, self.order);
        }
        TruncatedSeries {
            spec: Arc::clone(&self.spec),
            order: self.order,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.spec, self.order);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Drops all terms of total degree above `order` and lowers the order.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        TruncatedSeries {
            spec: Arc::clone(&self.spec),
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Same terms, larger truncation order. Only meaningful for series
    /// that are known exactly (polynomials).
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = self.truncate(order);
        out.order = order;
        out
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        TruncatedSeries {
            spec: Arc::clone(&self.spec),
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Re-reads this series in a richer block spec (same base variables,
    /// at least as many blocks). Monomials are reduced under the new relations.
    pub fn embed(&self, spec: &Arc<BlockSpec>) -> Result<Self, SeriesError> {
        if spec.vars != self.spec.vars {
            return Err(SeriesError::SpecMismatch);
        }
        let mut out = Self::zero(spec, self.order);
        for (m, c) in &self.terms {
            if let Some((b, _)) = m.block_part().last() {
                if *b >= spec.blocks {
                    return Err(SeriesError::UnknownBlock(*b));
                }
            }
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    /// Formal partial derivative in base variable `var`, computed on the
    /// stored polynomial. For a series that is only known to order N the
    /// top-degree terms of the result are incomplete.
    pub fn derivative(&self, var: usize) -> Result<Self, SeriesError> {
        if var >= self.spec.vars {
            return Err(SeriesError::UnknownVar(var));
        }
        let mut out = Self::zero(&self.spec, self.order);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            let mut d = *m;
            d.exps[var] -= 1;
            accumulate(&mut out.terms, d, &(c * &Rational::from_int(e as i64)));
        }
        Ok(out)
    }

    /// `F(x + d_block)`: since `d_block` is square-zero only first
    /// derivatives survive, `F + sum_a dF/dx_a * eps_{block,a}`.
    pub fn taylor_shift(&self, block: usize) -> Result<Self, SeriesError> {
        if block >= self.spec.blocks {
            return Err(SeriesError::UnknownBlock(block));
        }
        let mut out = self.clone();
        for a in 0..self.spec.vars {
            let eps = Self::eps(&self.spec, self.order, block, a)?;
            let term = self.derivative(a)?.try_mul(&eps)?;
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// `F(x0 + x)` for a rational point `x0`, expanded on the stored
    /// polynomial (exact when the series is a polynomial).
    pub fn translate(&self, x0: &[Rational]) -> Result<Self, SeriesError> {
        if x0.len() != self.spec.vars {
            return Err(SeriesError::Arity {
                expected: self.spec.vars,
                found: x0.len(),
            });
        }
        // work at a raised order so that high-degree terms can feed low ones
        let max_deg = self.terms.keys().map(Monomial::degree).max().unwrap_or(0);
        let work_order = max_deg.max(self.order);
        let shifted: Vec<TruncatedSeries> = (0..self.spec.vars)
            .map(|a| {
                let v = Self::var(&self.spec, work_order, a)?;
                v.try_add(&Self::constant(&self.spec, work_order, x0[a].clone()))
            })
            .collect::<Result<_, _>>()?;
        let raised = self.with_order(work_order);
        Ok(substitute(&raised, &shifted)?.truncate(self.order))
    }

    /// Exchanges the roles of two blocks (a ring automorphism when both
    /// blocks have the same pairing pattern).
    pub fn swap_blocks(&self, i: usize, j: usize) -> Result<Self, SeriesError> {
        if i >= self.spec.blocks {
            return Err(SeriesError::UnknownBlock(i));
        }
        if j >= self.spec.blocks {
            return Err(SeriesError::UnknownBlock(j));
        }
        let mut out = Self::zero(&self.spec, self.order);
        for (m, c) in &self.terms {
            let mut s = *m;
            s.slots.swap(i, j);
            out.add_term(s, c.clone());
        }
        Ok(out)
    }

    /// Coefficient of a pure block monomial, as a series in the base
    /// variables only: the `c(x)` in `... + c(x) * eps_{i,a} eps_{j,b} + ...`.
    pub fn block_coefficient(&self, block_part: &[(usize, usize)]) -> Result<Self, SeriesError> {
        let key = Monomial::from_parts(&[], block_part)?.blocks_only();
        let base = Arc::new(BlockSpec::base(self.spec.vars));
        let mut out = Self::zero(&base, self.order);
        for (m, c) in &self.terms {
            if m.blocks_only() == key {
                out.terms.insert(m.without_blocks(), c.clone());
            }
        }
        Ok(out)
    }

    /// Evaluates all base variables at zero.
    pub fn at_origin(&self) -> Self {
        TruncatedSeries {
            spec: Arc::clone(&self.spec),
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.base_degree() == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: &Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c.clone());
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Plain substitution `x_a := values[a]` without the constant-term check.
fn substitute(f: &TruncatedSeries, values: &[TruncatedSeries]) -> Result<TruncatedSeries, SeriesError> {
    let spec = f.spec();
    let order = f.order();
    for v in values {
        f.check(v)?;
    }
    let mut powers: Vec<Vec<TruncatedSeries>> = values
        .iter()
        .map(|v| vec![TruncatedSeries::one(spec, order), v.clone()])
        .collect();
    let mut out = TruncatedSeries::zero(spec, order);
    for (m, c) in f.terms() {
        let mut prod = TruncatedSeries::zero(spec, order);
        prod.add_term(m.blocks_only(), c.clone());
        for (a, pw) in powers.iter_mut().enumerate() {
            let e = m.exps[a] as usize;
            if e == 0 {
                continue;
            }
            while pw.len() <= e {
                let next = &pw[pw.len() - 1] * &values[a];
                pw.push(next);
            }
            prod = &prod * &pw[e];
            if prod.is_zero() {
                break;
            }
        }
        out = &out + &prod;
    }
    Ok(out)
}

/// Substitutes `x := G(x)` into every component of `F`.
///
/// Every `G_a` must have zero constant term (it may carry nilpotent
/// degree-zero-in-x parts such as `x + d`), so that the result is well
/// defined modulo the truncation ideal.
pub fn series_compose(
    f: &[TruncatedSeries],
    g: &[TruncatedSeries],
) -> Result<Vec<TruncatedSeries>, SeriesError> {
    let Some(first) = g.first().or(f.first()) else {
        return Ok(Vec::new());
    };
    let vars = first.spec().vars();
    if g.len() != vars {
        return Err(SeriesError::Arity {
            expected: vars,
            found: g.len(),
        });
    }
    for (a, ga) in g.iter().enumerate() {
        if !ga.constant_term().is_zero() {
            return Err(SeriesError::NonNilpotentConstant(a));
        }
    }
    f.iter().map(|fi| substitute(fi, g)).collect()
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl std::ops::$tr<&TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            /// Panics on spec or order mismatch; use the `try_` form to recover.
            fn $m(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn within_block_products_vanish() {
        let spec = Arc::new(BlockSpec::generic(2, 2));
        let e10 = TruncatedSeries::eps(&spec, 6, 0, 0).unwrap();
        let e11 = TruncatedSeries::eps(&spec, 6, 0, 1).unwrap();
        assert!((&e10 * &e11).is_zero());
        assert!((&e10 * &e10).is_zero());
        let e20 = TruncatedSeries::eps(&spec, 6, 1, 0).unwrap();
        assert!(!(&e10 * &e20).is_zero());
    }

    #[test]
    fn pair_relation_antisymmetrizes() {
        let spec = Arc::new(BlockSpec::new(2, 2, &[(0, 1)]).unwrap());
        let e = |b, c| TruncatedSeries::eps(&spec, 6, b, c).unwrap();
        let sum = &(&e(0, 0) * &e(1, 1)) + &(&e(0, 1) * &e(1, 0));
        assert!(sum.is_zero());
        assert!((&e(0, 0) * &e(1, 0)).is_zero());
        // the kept representative has ascending coordinates
        let p = &e(0, 1) * &e(1, 0);
        let m = Monomial::from_parts(&[0, 0], &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(p.coeff(&m), r(-1));
    }

    #[test]
    fn chained_pairs_antisymmetrize_whole_component() {
        // pairs {0,1}, {1,2}: the three generators are fully antisymmetric
        let spec = Arc::new(BlockSpec::new(3, 3, &[(0, 1), (1, 2)]).unwrap());
        let e = |b, c| TruncatedSeries::eps(&spec, 6, b, c).unwrap();
        let a = &(&e(0, 2) * &e(1, 1)) * &e(2, 0);
        let b = &(&e(2, 0) * &e(0, 2)) * &e(1, 1);
        assert_eq!(a, b);
        let m = Monomial::from_parts(&[0, 0, 0], &[(0, 0), (1, 1), (2, 2)]).unwrap();
        // (2,1,0) -> (0,1,2) is an odd permutation
        assert_eq!(a.coeff(&m), r(-1));
        assert!((&(&e(0, 0) * &e(1, 1)) * &e(2, 0)).is_zero());
    }

    #[test]
    fn geometric_series_inverts_one_plus_x() {
        let spec = Arc::new(BlockSpec::base(2));
        let n = 6;
        let x = TruncatedSeries::var(&spec, n, 0).unwrap();
        let one = TruncatedSeries::one(&spec, n);
        let mut geo = TruncatedSeries::zero(&spec, n);
        for k in 0..=n {
            geo = &geo + &x.pow(k).scale(&r(if k % 2 == 0 { 1 } else { -1 }));
        }
        assert_eq!(&(&one + &x) * &geo, one);
    }

    #[test]
    fn truncation_drops_high_degree() {
        let spec = Arc::new(BlockSpec::generic(1, 1));
        let x = TruncatedSeries::var(&spec, 3, 0).unwrap();
        let e = TruncatedSeries::eps(&spec, 3, 0, 0).unwrap();
        assert!((&x.pow(3) * &e).is_zero());
        assert!(!(&x.pow(2) * &e).is_zero());
        assert!(x.pow(4).is_zero());
    }

    #[test]
    fn mismatched_orders_are_errors() {
        let spec = Arc::new(BlockSpec::base(1));
        let a = TruncatedSeries::one(&spec, 3);
        let b = TruncatedSeries::one(&spec, 4);
        assert_eq!(a.try_add(&b), Err(SeriesError::OrderMismatch(3, 4)));
        let other = Arc::new(BlockSpec::base(2));
        let c = TruncatedSeries::one(&other, 3);
        assert_eq!(a.try_mul(&c), Err(SeriesError::SpecMismatch));
    }

    #[test]
    fn compose_square_with_x_plus_x_squared() {
        // F = x^2, G = x + x^2 at order 3 -> x^2 + 2x^3
        let spec = Arc::new(BlockSpec::base(1));
        let x = TruncatedSeries::var(&spec, 3, 0).unwrap();
        let f = x.pow(2);
        let g = &x + &x.pow(2);
        let out = series_compose(&[f], &[g]).unwrap();
        let expected = &x.pow(2) + &x.pow(3).scale(&r(2));
        assert_eq!(out[0], expected);
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let spec = Arc::new(BlockSpec::base(1));
        let x = TruncatedSeries::var(&spec, 3, 0).unwrap();
        let g = &x + &TruncatedSeries::one(&spec, 3);
        assert_eq!(
            series_compose(&[x.clone()], &[g]),
            Err(SeriesError::NonNilpotentConstant(0))
        );
    }

    #[test]
    fn taylor_shift_examples() {
        let spec = Arc::new(BlockSpec::generic(2, 2));
        let n = 6;
        let x0 = TruncatedSeries::var(&spec, n, 0).unwrap();
        let x1 = TruncatedSeries::var(&spec, n, 1).unwrap();
        let e = |b, c| TruncatedSeries::eps(&spec, n, b, c).unwrap();
        assert_eq!(x0.taylor_shift(0).unwrap(), &x0 + &e(0, 0));
        let prod = &x0 * &x1;
        let expected = &(&prod + &(&x0 * &e(0, 1))) + &(&x1 * &e(0, 0));
        assert_eq!(prod.taylor_shift(0).unwrap(), expected);
        // x^2 shifted by both blocks has the cross term 2 e1 e2 and no e1^2
        let sq = x0.pow(2);
        let twice = sq.taylor_shift(0).unwrap().taylor_shift(1).unwrap();
        let cross = Monomial::from_parts(&[0, 0], &[(0, 0), (1, 0)]).unwrap();
        assert_eq!(twice.coeff(&cross), r(2));
        assert_eq!(twice, sq.taylor_shift(1).unwrap().taylor_shift(0).unwrap());
    }

    #[test]
    fn taylor_shift_agrees_with_compose() {
        let spec = Arc::new(BlockSpec::generic(2, 1));
        let n = 5;
        let x0 = TruncatedSeries::var(&spec, n, 0).unwrap();
        let x1 = TruncatedSeries::var(&spec, n, 1).unwrap();
        let f = &(&x0.pow(3) * &x1) + &x1.pow(2).scale(&Rational::new(1, 3));
        let g: Vec<_> = (0..2)
            .map(|a| {
                let v = TruncatedSeries::var(&spec, n, a).unwrap();
                &v + &TruncatedSeries::eps(&spec, n, 0, a).unwrap()
            })
            .collect();
        let composed = series_compose(&[f.clone()], &g).unwrap();
        assert_eq!(composed[0], f.taylor_shift(0).unwrap());
    }

    #[test]
    fn translate_by_rational_point() {
        let spec = Arc::new(BlockSpec::base(1));
        let x = TruncatedSeries::var(&spec, 4, 0).unwrap();
        // (x + 1/2)^2 = x^2 + x + 1/4
        let got = x.pow(2).translate(&[Rational::new(1, 2)]).unwrap();
        let expected = &(&x.pow(2) + &x) + &TruncatedSeries::constant(&spec, 4, Rational::new(1, 4));
        assert_eq!(got, expected);
    }

    #[test]
    fn monomial_rejects_repeated_block() {
        assert!(Monomial::from_parts(&[0], &[(0, 0), (0, 1)]).is_err());
    }
}
