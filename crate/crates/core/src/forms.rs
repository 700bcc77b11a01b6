//! Group-valued 1-forms on neighbour spaces.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::format::FormatError;
use crate::group::{AnyGroup, Group, GroupSpec};
use crate::neighbor::{Independence, NPath, NeighborSpace, SpanningTree, TreeKind, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("{0} and {1} are not neighbours")]
    NotNeighbors(Vertex, Vertex),
    #[error("vertex index {0} out of range")]
    BadVertex(Vertex),
}

/// `omega(x, y)` for neighbours `x ~ y`. Only the orientation `x < y` is
/// stored; reflexive values are the identity and reversed values inverses.
/// Edges without a stored value carry the identity.
#[derive(Debug, Clone)]
pub struct OneForm<G: Group> {
    space: Arc<NeighborSpace>,
    group: G,
    values: BTreeMap<(Vertex, Vertex), G::Elem>,
}

/// A normalized primitive on one path component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Primitive<E> {
    pub base: Vertex,
    /// Indexed by vertex; `None` off the component of `base`.
    pub values: Vec<Option<E>>,
}

/// Why a form has no primitive on the component: the closing edge and the
/// two tree paths whose integrals disagree with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict<E> {
    pub edge: (Vertex, Vertex),
    pub path_to_first: NPath,
    pub path_to_second: NPath,
    /// `f(first) * omega(first, second)`
    pub expected: E,
    /// `f(second)` along its tree path
    pub found: E,
}

impl<G: Group> OneForm<G> {
    /// Builds a form from `(x, y, omega(x, y))` triples in either orientation.
    /// Conflicting duplicate orientations are an error.
    pub fn new<I>(space: Arc<NeighborSpace>, group: G, values: I) -> Result<Self, FormatError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, G::Elem)>,
    {
        let mut stored = BTreeMap::new();
        for (x, y, g) in values {
            if x >= space.len() || y >= space.len() {
                return Err(FormatError::invalid(format!("vertex out of range in ({x}, {y})")));
            }
            if x == y {
                if !group.is_identity(&g) {
                    return Err(FormatError::invalid(format!(
                        "value at ({}, {}) must be the identity",
                        space.name(x),
                        space.name(x)
                    )));
                }
                continue;
            }
            if !space.is_neighbor(x, y) {
                return Err(FormatError::invalid(format!(
                    "{} and {} are not neighbours",
                    space.name(x),
                    space.name(y)
                )));
            }
            let (key, v) = if x < y { ((x, y), g) } else { ((y, x), group.invert(&g)) };
            if let Some(prev) = stored.get(&key) {
                if *prev != v {
                    return Err(FormatError::invalid(format!(
                        "inconsistent values for edge {}|{}",
                        space.name(key.0),
                        space.name(key.1)
                    )));
                }
            }
            stored.insert(key, v);
        }
        Ok(OneForm {
            space,
            group,
            values: stored,
        })
    }

    /// The Darboux derivative `df(x, y) = f(x)^-1 * f(y)`.
    pub fn coboundary(space: Arc<NeighborSpace>, group: G, f: &[G::Elem]) -> Self {
        assert_eq!(f.len(), space.len(), "f must be total on vertices");
        let values = space
            .edges()
            .map(|(x, y)| ((x, y), group.divide_left(&f[x], &f[y])))
            .collect();
        OneForm {
            space,
            group,
            values,
        }
    }

    pub fn space(&self) -> &Arc<NeighborSpace> {
        &self.space
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn value(&self, x: Vertex, y: Vertex) -> Result<G::Elem, FormError> {
        if x >= self.space.len() {
            return Err(FormError::BadVertex(x));
        }
        if y >= self.space.len() {
            return Err(FormError::BadVertex(y));
        }
        if !self.space.is_neighbor(x, y) {
            return Err(FormError::NotNeighbors(x, y));
        }
        Ok(self.value_unchecked(x, y))
    }

    fn value_unchecked(&self, x: Vertex, y: Vertex) -> G::Elem {
        if x == y {
            return self.group.identity();
        }
        let key = (x.min(y), x.max(y));
        let v = self
            .values
            .get(&key)
            .cloned()
            .unwrap_or_else(|| self.group.identity());
        if x < y {
            v
        } else {
            self.group.invert(&v)
        }
    }

    /// Mutual triples `x < y < z` where `omega(x,y) * omega(y,z) != omega(x,z)`.
    /// One ordering per triple suffices: the relation for one ordering
    /// implies it for all six.
    pub fn closedness_violations(&self) -> Vec<(Vertex, Vertex, Vertex)> {
        self.space
            .mutual_triples()
            .into_iter()
            .filter(|&(x, y, z)| {
                let lhs = self
                    .group
                    .compose(&self.value_unchecked(x, y), &self.value_unchecked(y, z));
                lhs != self.value_unchecked(x, z)
            })
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.closedness_violations().is_empty()
    }

    /// Left-to-right product along the path.
    pub fn path_integral(&self, p: &NPath) -> G::Elem {
        p.steps().fold(self.group.identity(), |acc, (a, b)| {
            self.group.compose(&acc, &self.value_unchecked(a, b))
        })
    }

    /// `(omega(x,y1) * omega(y1,z)) * (omega(x,y2) * omega(y2,z))^-1`.
    pub fn quadrangle_defect(
        &self,
        x: Vertex,
        y1: Vertex,
        y2: Vertex,
        z: Vertex,
    ) -> Result<G::Elem, FormError> {
        let g = &self.group;
        let a = g.compose(&self.value(x, y1)?, &self.value(y1, z)?);
        let b = g.compose(&self.value(x, y2)?, &self.value(y2, z)?);
        Ok(g.compose(&a, &g.invert(&b)))
    }

    /// All quadrangles `(x, y1, y2, z)` with `y1 < y2` and a non-trivial defect.
    pub fn quadrangle_violations(&self) -> Vec<(Vertex, Vertex, Vertex, Vertex)> {
        let s = &self.space;
        let mut out = Vec::new();
        for x in s.vertices() {
            let mx = s.monad_unchecked(x);
            for (i, &y1) in mx.iter().enumerate() {
                for &y2 in &mx[i + 1..] {
                    for z in s.monad_unchecked(y1) {
                        if s.is_neighbor(y2, z) {
                            let d = self.quadrangle_defect(x, y1, y2, z).expect("quadrangle");
                            if !self.group.is_identity(&d) {
                                out.push((x, y1, y2, z));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn path_independence(&self, x: Vertex, y: Vertex, max_len: usize) -> Independence<G::Elem> {
        self.space.path_independence(
            x,
            y,
            max_len,
            self.group.identity(),
            |a, b| self.value_unchecked(a, b),
            |a, b| self.group.compose(a, b),
        )
    }

    /// Integrates along the breadth-first tree from `base`.
    pub fn primitive(&self, base: Vertex) -> Result<Result<Primitive<G::Elem>, Conflict<G::Elem>>, FormError> {
        if base >= self.space.len() {
            return Err(FormError::BadVertex(base));
        }
        let tree = self
            .space
            .spanning_tree(base, TreeKind::Breadth)
            .expect("base checked");
        Ok(self.primitive_along(&tree))
    }

    /// Integrates along `tree`, then checks every non-tree edge of the
    /// component in lexicographic order.
    pub fn primitive_along(&self, tree: &SpanningTree) -> Result<Primitive<G::Elem>, Conflict<G::Elem>> {
        let g = &self.group;
        let mut values: Vec<Option<G::Elem>> = vec![None; self.space.len()];
        values[tree.root()] = Some(g.identity());
        for &v in &tree.order()[1..] {
            let p = tree.parent(v).expect("non-root has a parent");
            let fp = values[p].clone().expect("parent visited first");
            values[v] = Some(g.compose(&fp, &self.value_unchecked(p, v)));
        }
        let mut members: Vec<Vertex> = tree.order().to_vec();
        members.sort_unstable();
        for &a in &members {
            for &b in self.space.neighbors(a).iter().filter(|&&b| b > a) {
                if tree.is_tree_edge(a, b) {
                    continue;
                }
                let fa = values[a].as_ref().unwrap();
                let fb = values[b].as_ref().unwrap();
                let expected = g.compose(fa, &self.value_unchecked(a, b));
                if expected != *fb {
                    return Err(Conflict {
                        edge: (a, b),
                        path_to_first: tree.path_to(a).unwrap(),
                        path_to_second: tree.path_to(b).unwrap(),
                        expected,
                        found: fb.clone(),
                    });
                }
            }
        }
        Ok(Primitive {
            base: tree.root(),
            values,
        })
    }

    /// Stored values keyed `(x, y)` with `x < y`.
    pub fn stored(&self) -> &BTreeMap<(Vertex, Vertex), G::Elem> {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub group: GroupSpec,
    #[serde(default)]
    pub values: BTreeMap<String, Value>,
}

impl OneForm<AnyGroup> {
    pub fn from_file(space: Arc<NeighborSpace>, f: &FormFile) -> Result<Self, FormatError> {
        let group = AnyGroup::from_spec(f.group)?;
        let mut values = Vec::with_capacity(f.values.len());
        for (key, v) in &f.values {
            let (a, b) = key
                .split_once('|')
                .ok_or_else(|| FormatError::invalid(format!("form key `{key}` is not of the form x|y")))?;
            let x = space.vertex(a).map_err(|e| FormatError::invalid(e.to_string()))?;
            let y = space.vertex(b).map_err(|e| FormatError::invalid(e.to_string()))?;
            let g = group
                .decode(v)
                .map_err(|e| FormatError::invalid(format!("value for `{key}`: {e}")))?;
            values.push((x, y, g));
        }
        OneForm::new(space, group, values)
    }

    pub fn to_file(&self) -> FormFile {
        FormFile {
            group: self.group.spec(),
            values: self
                .values
                .iter()
                .map(|(&(x, y), g)| {
                    (
                        format!("{}|{}", self.space.name(x), self.space.name(y)),
                        self.group.encode(g),
                    )
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Cyclic, Symmetric};

    fn triangle() -> Arc<NeighborSpace> {
        Arc::new(NeighborSpace::build(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap())
    }

    fn square() -> Arc<NeighborSpace> {
        Arc::new(
            NeighborSpace::build(
                &["a", "b", "c", "d"],
                &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
            )
            .unwrap(),
        )
    }

    fn holonomy_square() -> OneForm<Cyclic> {
        // a->b->c->d->a each carry 1 in Z_3
        OneForm::new(square(), Cyclic { modulus: 3 }, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap()
    }

    #[test]
    fn s3_coboundary_on_triangle() {
        let s3 = Symmetric { degree: 3 };
        let f = vec![vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0]];
        let w = OneForm::coboundary(triangle(), s3, &f);
        assert_eq!(w.value(0, 1).unwrap(), vec![1, 0, 2]);
        assert_eq!(w.value(1, 2).unwrap(), s3.compose(&s3.invert(&f[1]), &f[2]));
        assert_eq!(w.value(0, 2).unwrap(), vec![1, 2, 0]);
        assert!(w.is_closed());
        let p = triangle().validate_path(&[0, 1, 2]).unwrap();
        assert_eq!(w.path_integral(&p), vec![1, 2, 0]);
        let padded = triangle().validate_path(&[0, 1, 2, 2, 2]).unwrap();
        assert_eq!(w.path_integral(&padded), vec![1, 2, 0]);
        match w.path_independence(0, 2, 3) {
            Independence::Common { value, .. } => assert_eq!(value, vec![1, 2, 0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cyclic_inverse_orientation() {
        let s = Arc::new(NeighborSpace::build(&["a", "b"], &[("a", "b")]).unwrap());
        let w = OneForm::coboundary(s, Cyclic { modulus: 7 }, &[0, 1]);
        assert_eq!(w.value(0, 1).unwrap(), 1);
        assert_eq!(w.value(1, 0).unwrap(), 6);
    }

    #[test]
    fn non_closed_triangle() {
        let w = OneForm::new(triangle(), Cyclic { modulus: 2 }, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert_eq!(w.closedness_violations(), vec![(0, 1, 2)]);
    }

    #[test]
    fn holonomy_square_defect_and_witness() {
        let w = holonomy_square();
        assert!(w.is_closed(), "no mutual triples");
        assert_eq!(w.quadrangle_defect(0, 1, 3, 2).unwrap(), 1);
        assert_eq!(w.quadrangle_defect(0, 1, 1, 2).unwrap(), 0);
        assert_eq!(w.quadrangle_defect(0, 2, 1, 2), Err(FormError::NotNeighbors(0, 2)));
        match w.path_independence(0, 2, 2) {
            Independence::Witness {
                first,
                first_value,
                second,
                second_value,
            } => {
                assert_eq!(first.points(), &[0, 1, 2]);
                assert_eq!(second.points(), &[0, 3, 2]);
                assert_eq!((first_value, second_value), (2, 1));
            }
            other => panic!("{other:?}"),
        }
        let conflict = w.primitive(0).unwrap().unwrap_err();
        assert_eq!(conflict.edge, (2, 3));
    }

    #[test]
    fn primitive_recovers_coboundary() {
        let g = Symmetric { degree: 3 };
        let f = vec![vec![1, 2, 0], vec![1, 0, 2], vec![0, 2, 1]];
        let w = OneForm::coboundary(triangle(), g, &f);
        let p = w.primitive(1).unwrap().unwrap();
        for v in 0..3 {
            assert_eq!(p.values[v].clone().unwrap(), g.divide_left(&f[1], &f[v]));
        }
    }

    #[test]
    fn file_round_trip_and_conflicts() {
        let space = triangle();
        let text = r#"{"group":{"kind":"cyclic","modulus":5},"values":{"a|b":2,"c|b":1}}"#;
        let file: FormFile = serde_json::from_str(text).unwrap();
        let w = OneForm::from_file(Arc::clone(&space), &file).unwrap();
        assert_eq!(w.value(1, 2).unwrap(), crate::group::Element::Int(4));
        let back = w.to_file();
        assert_eq!(back.values["b|c"], serde_json::json!(4));
        let clash = r#"{"group":{"kind":"cyclic","modulus":5},"values":{"a|b":2,"b|a":2}}"#;
        let file: FormFile = serde_json::from_str(clash).unwrap();
        assert!(OneForm::from_file(Arc::clone(&space), &file).is_err());
        let same = r#"{"group":{"kind":"cyclic","modulus":5},"values":{"a|b":2,"b|a":3}}"#;
        let file: FormFile = serde_json::from_str(same).unwrap();
        assert!(OneForm::from_file(space, &file).is_ok());
    }
}
