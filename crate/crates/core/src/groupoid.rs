//! Groupoids over neighbour spaces and connections in them.
//!
//! Arrows compose left to right: `compose(f, g)` is "first `f`, then `g`"
//! and requires `target(f) == source(g)`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use crate::forms::OneForm;
use crate::group::Group;
use crate::neighbor::{Independence, NPath, NeighborSpace, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupoidError {
    #[error("cannot compose: target {0} differs from source {1}")]
    NotComposable(Vertex, Vertex),
    #[error("arrow for ({0}, {1}) has endpoints ({2}, {3})")]
    WrongEndpoints(Vertex, Vertex, Vertex, Vertex),
    #[error("{0} and {1} are not neighbours")]
    NotNeighbors(Vertex, Vertex),
    #[error("invalid arrow: {0}")]
    InvalidArrow(String),
}

pub trait Groupoid: Clone + Debug {
    type Arrow: Clone + Eq + Debug;

    fn source(&self, f: &Self::Arrow) -> Vertex;
    fn target(&self, f: &Self::Arrow) -> Vertex;
    fn identity(&self, x: Vertex) -> Self::Arrow;
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Self::Arrow, GroupoidError>;
    fn invert(&self, f: &Self::Arrow) -> Self::Arrow;
}

/// `M x M x G` with `(x, y, g) . (y, z, h) = (x, z, g * h)`.
#[derive(Debug, Clone)]
pub struct ConstantGroupoid<G: Group> {
    pub group: G,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantArrow<E> {
    pub source: Vertex,
    pub target: Vertex,
    pub payload: E,
}

impl<G: Group> Groupoid for ConstantGroupoid<G> {
    type Arrow = ConstantArrow<G::Elem>;

    fn source(&self, f: &Self::Arrow) -> Vertex {
        f.source
    }

    fn target(&self, f: &Self::Arrow) -> Vertex {
        f.target
    }

    fn identity(&self, x: Vertex) -> Self::Arrow {
        ConstantArrow {
            source: x,
            target: x,
            payload: self.group.identity(),
        }
    }

    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Self::Arrow, GroupoidError> {
        if f.target != g.source {
            return Err(GroupoidError::NotComposable(f.target, g.source));
        }
        Ok(ConstantArrow {
            source: f.source,
            target: g.target,
            payload: self.group.compose(&f.payload, &g.payload),
        })
    }

    fn invert(&self, f: &Self::Arrow) -> Self::Arrow {
        ConstantArrow {
            source: f.target,
            target: f.source,
            payload: self.group.invert(&f.payload),
        }
    }
}

/// Arrows `x -> y` are bijections `M(x) -> M(y)` sending `x` to `y`.
#[derive(Debug, Clone)]
pub struct GlGroupoid {
    space: Arc<NeighborSpace>,
}

/// A bijection between monads, stored as sorted `(point, image)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlArrow {
    source: Vertex,
    target: Vertex,
    map: Vec<(Vertex, Vertex)>,
}

impl GlArrow {
    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn target(&self) -> Vertex {
        self.target
    }

    pub fn apply(&self, z: Vertex) -> Option<Vertex> {
        self.map
            .binary_search_by_key(&z, |&(a, _)| a)
            .ok()
            .map(|i| self.map[i].1)
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.map
    }
}

impl GlGroupoid {
    pub fn new(space: Arc<NeighborSpace>) -> Self {
        GlGroupoid { space }
    }

    pub fn space(&self) -> &Arc<NeighborSpace> {
        &self.space
    }

    /// Checks that `f` is a bijection `M(x) -> M(y)` with `x -> y`.
    pub fn arrow(&self, x: Vertex, y: Vertex, f: impl Fn(Vertex) -> Vertex) -> Result<GlArrow, GroupoidError> {
        let dom = self.space.monad_unchecked(x);
        let cod = self.space.monad_unchecked(y);
        if dom.len() != cod.len() {
            return Err(GroupoidError::InvalidArrow(format!(
                "monads of {x} and {y} differ in size"
            )));
        }
        let map: Vec<(Vertex, Vertex)> = dom.iter().map(|&z| (z, f(z))).collect();
        let mut images: Vec<Vertex> = map.iter().map(|&(_, w)| w).collect();
        images.sort_unstable();
        if images != cod {
            return Err(GroupoidError::InvalidArrow(format!(
                "map from the monad of {x} is not a bijection onto the monad of {y}"
            )));
        }
        if f(x) != y {
            return Err(GroupoidError::InvalidArrow(format!("{x} is not sent to {y}")));
        }
        Ok(GlArrow {
            source: x,
            target: y,
            map,
        })
    }

    /// Every arrow `x -> y`, in lexicographic order of image lists.
    pub fn arrows(&self, x: Vertex, y: Vertex) -> Vec<GlArrow> {
        let dom = self.space.monad_unchecked(x);
        let cod = self.space.monad_unchecked(y);
        if dom.len() != cod.len() {
            return Vec::new();
        }
        let free_dom: Vec<Vertex> = dom.iter().copied().filter(|&v| v != x).collect();
        let free_cod: Vec<Vertex> = cod.iter().copied().filter(|&v| v != y).collect();
        let mut out = Vec::new();
        let mut used = vec![false; free_cod.len()];
        let mut chosen = Vec::with_capacity(free_dom.len());
        fn rec(
            free_dom: &[Vertex],
            free_cod: &[Vertex],
            used: &mut [bool],
            chosen: &mut Vec<Vertex>,
            emit: &mut dyn FnMut(&[Vertex]),
        ) {
            if chosen.len() == free_dom.len() {
                emit(chosen);
                return;
            }
            for i in 0..free_cod.len() {
                if !used[i] {
                    used[i] = true;
                    chosen.push(free_cod[i]);
                    rec(free_dom, free_cod, used, chosen, emit);
                    chosen.pop();
                    used[i] = false;
                }
            }
        }
        rec(&free_dom, &free_cod, &mut used, &mut chosen, &mut |imgs| {
            let mut map: Vec<(Vertex, Vertex)> = free_dom.iter().copied().zip(imgs.iter().copied()).collect();
            map.push((x, y));
            map.sort_unstable();
            out.push(GlArrow {
                source: x,
                target: y,
                map,
            });
        });
        out
    }
}

impl Groupoid for GlGroupoid {
    type Arrow = GlArrow;

    fn source(&self, f: &GlArrow) -> Vertex {
        f.source
    }

    fn target(&self, f: &GlArrow) -> Vertex {
        f.target
    }

    fn identity(&self, x: Vertex) -> GlArrow {
        GlArrow {
            source: x,
            target: x,
            map: self.space.monad_unchecked(x).into_iter().map(|z| (z, z)).collect(),
        }
    }

    fn compose(&self, f: &GlArrow, g: &GlArrow) -> Result<GlArrow, GroupoidError> {
        if f.target != g.source {
            return Err(GroupoidError::NotComposable(f.target, g.source));
        }
        let map = f
            .map
            .iter()
            .map(|&(z, w)| (z, g.apply(w).expect("image lies in the middle monad")))
            .collect();
        Ok(GlArrow {
            source: f.source,
            target: g.target,
            map,
        })
    }

    fn invert(&self, f: &GlArrow) -> GlArrow {
        let mut map: Vec<(Vertex, Vertex)> = f.map.iter().map(|&(z, w)| (w, z)).collect();
        map.sort_unstable();
        GlArrow {
            source: f.target,
            target: f.source,
            map,
        }
    }
}

/// An arrow `x -> y` for every pair of neighbours, with identities on the
/// diagonal and inverses on reversed pairs. Only `x < y` is stored.
#[derive(Debug, Clone)]
pub struct Connection<Gd: Groupoid> {
    groupoid: Gd,
    space: Arc<NeighborSpace>,
    assign: BTreeMap<(Vertex, Vertex), Gd::Arrow>,
}

impl<Gd: Groupoid> Connection<Gd> {
    /// Builds the connection from `arrow(x, y)` evaluated on edges `x < y`.
    pub fn new<F>(groupoid: Gd, space: Arc<NeighborSpace>, arrow: F) -> Result<Self, GroupoidError>
    where
        F: Fn(Vertex, Vertex) -> Result<Gd::Arrow, GroupoidError>,
    {
        let mut assign = BTreeMap::new();
        for (x, y) in space.edges() {
            let f = arrow(x, y)?;
            let (s, t) = (groupoid.source(&f), groupoid.target(&f));
            if (s, t) != (x, y) {
                return Err(GroupoidError::WrongEndpoints(x, y, s, t));
            }
            assign.insert((x, y), f);
        }
        Ok(Connection {
            groupoid,
            space,
            assign,
        })
    }

    pub fn groupoid(&self) -> &Gd {
        &self.groupoid
    }

    pub fn space(&self) -> &Arc<NeighborSpace> {
        &self.space
    }

    pub fn arrow(&self, x: Vertex, y: Vertex) -> Result<Gd::Arrow, GroupoidError> {
        if x == y {
            return Ok(self.groupoid.identity(x));
        }
        if !self.space.is_neighbor(x, y) {
            return Err(GroupoidError::NotNeighbors(x, y));
        }
        let f = &self.assign[&(x.min(y), x.max(y))];
        Ok(if x < y { f.clone() } else { self.groupoid.invert(f) })
    }

    /// Mutual triples `x < y < z` with `nabla(x,y) . nabla(y,z) != nabla(x,z)`.
    pub fn flatness_violations(&self) -> Vec<(Vertex, Vertex, Vertex)> {
        self.space
            .mutual_triples()
            .into_iter()
            .filter(|&(x, y, z)| {
                let lhs = self
                    .groupoid
                    .compose(&self.arrow(x, y).unwrap(), &self.arrow(y, z).unwrap())
                    .unwrap();
                lhs != self.arrow(x, z).unwrap()
            })
            .collect()
    }

    pub fn is_flat(&self) -> bool {
        self.flatness_violations().is_empty()
    }

    /// `nabla(x0,x1) . nabla(x1,x2) ... nabla(x_{n-1},x_n)`.
    pub fn transport(&self, p: &NPath) -> Gd::Arrow {
        p.steps().fold(self.groupoid.identity(p.domain()), |acc, (a, b)| {
            self.groupoid
                .compose(&acc, &self.arrow(a, b).expect("path steps are neighbours"))
                .expect("consecutive arrows compose")
        })
    }

    pub fn holonomous_check(&self, x: Vertex, y: Vertex, max_len: usize) -> Independence<Gd::Arrow> {
        self.space.path_independence(
            x,
            y,
            max_len,
            self.groupoid.identity(x),
            |a, b| self.arrow(a, b).expect("path steps are neighbours"),
            |f, g| self.groupoid.compose(f, g).expect("consecutive arrows compose"),
        )
    }
}

impl<G: Group> Connection<ConstantGroupoid<G>> {
    pub fn from_one_form(w: &OneForm<G>) -> Self {
        let groupoid = ConstantGroupoid {
            group: w.group().clone(),
        };
        Connection::new(groupoid, Arc::clone(w.space()), |x, y| {
            Ok(ConstantArrow {
                source: x,
                target: y,
                payload: w.value(x, y).expect("edge"),
            })
        })
        .expect("endpoints match by construction")
    }

    pub fn to_one_form(&self) -> OneForm<G> {
        let values = self
            .assign
            .iter()
            .map(|(&(x, y), f)| (x, y, f.payload.clone()));
        OneForm::new(Arc::clone(&self.space), self.groupoid.group.clone(), values)
            .expect("connection values live on edges")
    }
}
