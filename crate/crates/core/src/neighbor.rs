//! Finite neighbour spaces: a vertex set with a reflexive symmetric relation.
//!
//! Vertices are addressed by their index in file order. Reflexive pairs are
//! never stored; `monad(x)` always contains `x`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::format::FormatError;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    BadIndex(usize),
    #[error("empty path")]
    EmptyPath,
    #[error("not a path: points {index} and {} are not neighbours", index + 1)]
    NotAPath { index: usize },
    #[error("cannot concatenate: codomain {0} differs from domain {1}")]
    EndpointMismatch(Vertex, Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSpace {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    // sorted neighbour lists, self excluded
    adj: Vec<Vec<Vertex>>,
}

/// A sequence of points with consecutive members neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NPath {
    points: Vec<Vertex>,
}

impl NPath {
    /// The length-0 path at `x`.
    pub fn unit(x: Vertex) -> Self {
        NPath { points: vec![x] }
    }

    pub fn points(&self) -> &[Vertex] {
        &self.points
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() == 1
    }

    pub fn domain(&self) -> Vertex {
        self.points[0]
    }

    pub fn codomain(&self) -> Vertex {
        self.points[self.points.len() - 1]
    }

    pub fn steps(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn concat(&self, other: &NPath) -> Result<NPath, SpaceError> {
        if self.codomain() != other.domain() {
            return Err(SpaceError::EndpointMismatch(self.codomain(), other.domain()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(NPath { points })
    }

    pub fn reversed(&self) -> NPath {
        let mut points = self.points.clone();
        points.reverse();
        NPath { points }
    }
}

/// Result of comparing a path functional over all bounded paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence<T> {
    /// Every path gave `value`; `paths` were examined.
    Common { value: T, paths: usize },
    /// Two paths with different values, the first two in enumeration order.
    Witness {
        first: NPath,
        first_value: T,
        second: NPath,
        second_value: T,
    },
    Unreachable,
}

impl<T> Independence<T> {
    pub fn is_common(&self) -> bool {
        matches!(self, Independence::Common { .. })
    }
}

impl NeighborSpace {
    pub fn build<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self, SpaceError> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(SpaceError::DuplicateVertex(n.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| SpaceError::UnknownVertex(s.to_string()))
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            pairs.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        let mut space = Self::from_indices(names.len(), &pairs)?;
        space.names = names;
        space.index = index;
        Ok(space)
    }

    /// Space on vertices named `"0"`, `"1"`, ... from index pairs.
    pub fn from_indices(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, SpaceError> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::with_names(names, edges)
    }

    pub fn with_names(names: Vec<String>, edges: &[(Vertex, Vertex)]) -> Result<Self, SpaceError> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(SpaceError::DuplicateVertex(name.clone()));
            }
        }
        let mut sets = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(SpaceError::BadIndex(a));
            }
            if b >= n {
                return Err(SpaceError::BadIndex(b));
            }
            if a != b {
                sets[a].insert(b);
                sets[b].insert(a);
            }
        }
        Ok(NeighborSpace {
            names,
            index,
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn from_file(f: &SpaceFile) -> Result<Self, FormatError> {
        Self::build(&f.vertices, &f.edges).map_err(|e| FormatError::invalid(e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    /// Canonical form: vertices in order, each edge once, ordered by index.
    pub fn to_file(&self) -> SpaceFile {
        SpaceFile {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
        }
    }

    /// The `dim`-fold torus `Z_m^dim` with unit-step neighbours.
    /// Vertices are named `"i:j:..."` in row-major order.
    pub fn torus(m: usize, dim: usize) -> Self {
        let steps: Vec<Vec<i64>> = (0..dim)
            .flat_map(|k| {
                [1i64, -1].into_iter().map(move |s| {
                    let mut v = vec![0; dim];
                    v[k] = s;
                    v
                })
            })
            .collect();
        Self::lattice_graph(m, dim, &steps)
    }

    /// `Z_m^dim` where points differing by at most one in every coordinate
    /// are neighbours.
    pub fn king_torus(m: usize, dim: usize) -> Self {
        let steps: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
            .map(|mut code| {
                (0..dim)
                    .map(|_| {
                        let d = (code % 3) as i64 - 1;
                        code /= 3;
                        d
                    })
                    .collect()
            })
            .collect();
        Self::lattice_graph(m, dim, &steps)
    }

    fn lattice_graph(m: usize, dim: usize, steps: &[Vec<i64>]) -> Self {
        let count = m.pow(dim as u32);
        let names = (0..count)
            .map(|v| {
                lattice_coords(v, m, dim)
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(":")
            })
            .collect();
        let mut edges = Vec::new();
        for v in 0..count {
            let c = lattice_coords(v, m, dim);
            for s in steps {
                let w: Vec<usize> = c
                    .iter()
                    .zip(s)
                    .map(|(&a, &d)| (a as i64 + d).rem_euclid(m as i64) as usize)
                    .collect();
                edges.push((v, lattice_index(&w, m)));
            }
        }
        Self::with_names(names, &edges).expect("lattice names are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.names.len()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<Vertex, SpaceError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SpaceError::UnknownVertex(name.to_string()))
    }

    fn check(&self, v: Vertex) -> Result<(), SpaceError> {
        if v < self.names.len() {
            Ok(())
        } else {
            Err(SpaceError::BadIndex(v))
        }
    }

    /// Unordered non-reflexive pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_neighbor(&self, x: Vertex, y: Vertex) -> bool {
        x == y || self.adj[x].binary_search(&y).is_ok()
    }

    /// Neighbours of `x` other than `x`, in vertex order.
    pub fn neighbors(&self, x: Vertex) -> &[Vertex] {
        &self.adj[x]
    }

    /// `{y : x ~ y}` including `x`, in vertex order.
    pub fn monad(&self, x: Vertex) -> Result<Vec<Vertex>, SpaceError> {
        self.check(x)?;
        Ok(self.monad_unchecked(x))
    }

    pub(crate) fn monad_unchecked(&self, x: Vertex) -> Vec<Vertex> {
        let mut m = self.adj[x].clone();
        let pos = m.partition_point(|&v| v < x);
        m.insert(pos, x);
        m
    }

    /// Path component of `x` in breadth-first order.
    pub fn infinity_monad(&self, x: Vertex) -> Result<Vec<Vertex>, SpaceError> {
        self.check(x)?;
        Ok(self.bfs(x).0)
    }

    /// BFS order and parent array (the root is its own parent; `None` off
    /// the component).
    fn bfs(&self, root: Vertex) -> (Vec<Vertex>, Vec<Option<Vertex>>) {
        let mut parent = vec![None; self.len()];
        parent[root] = Some(root);
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if parent[w].is_none() {
                    parent[w] = Some(v);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        (order, parent)
    }

    /// Components in order of their least vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for v in self.vertices() {
            if !seen[v] {
                let mut comp = self.bfs(v).0;
                for &w in &comp {
                    seen[w] = true;
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
        out
    }

    /// Breadth-first distances from `x` (`None` when unreachable).
    pub fn distances(&self, x: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn spanning_tree(&self, root: Vertex, kind: TreeKind) -> Result<SpanningTree, SpaceError> {
        self.check(root)?;
        let (order, parent) = match kind {
            TreeKind::Breadth => self.bfs(root),
            TreeKind::Depth => {
                let mut parent = vec![None; self.len()];
                let mut order = Vec::new();
                // iterative DFS visiting neighbours in vertex order
                let mut stack = vec![(root, root)];
                while let Some((v, p)) = stack.pop() {
                    if parent[v].is_some() {
                        continue;
                    }
                    parent[v] = Some(p);
                    order.push(v);
                    for &w in self.adj[v].iter().rev() {
                        if parent[w].is_none() {
                            stack.push((w, v));
                        }
                    }
                }
                (order, parent)
            }
        };
        Ok(SpanningTree {
            root,
            order,
            parent,
        })
    }

    pub fn validate_path(&self, seq: &[Vertex]) -> Result<NPath, SpaceError> {
        if seq.is_empty() {
            return Err(SpaceError::EmptyPath);
        }
        for &v in seq {
            self.check(v)?;
        }
        if let Some(index) = seq.windows(2).position(|w| !self.is_neighbor(w[0], w[1])) {
            return Err(SpaceError::NotAPath { index });
        }
        Ok(NPath {
            points: seq.to_vec(),
        })
    }

    pub fn validate_named_path<S: AsRef<str>>(&self, seq: &[S]) -> Result<NPath, SpaceError> {
        let idx: Vec<Vertex> = seq
            .iter()
            .map(|s| self.vertex(s.as_ref()))
            .collect::<Result<_, _>>()?;
        self.validate_path(&idx)
    }

    /// All paths `x -> y` of at most `max_len` steps: shorter paths first,
    /// then lexicographically in vertex order.
    pub fn enumerate_paths(&self, x: Vertex, y: Vertex, max_len: usize) -> Vec<NPath> {
        let mut out = Vec::new();
        let _ = self.visit_paths(x, y, max_len, |p| {
            out.push(NPath { points: p.to_vec() });
            ControlFlow::<()>::Continue(())
        });
        out
    }

    /// Calls `f` on every path of [`enumerate_paths`](Self::enumerate_paths)
    /// in the same order, without materializing them.
    pub fn visit_paths<B, F>(&self, x: Vertex, y: Vertex, max_len: usize, mut f: F) -> ControlFlow<B>
    where
        F: FnMut(&[Vertex]) -> ControlFlow<B>,
    {
        let dist = self.distances(y);
        let Some(d) = dist[x] else {
            return ControlFlow::Continue(());
        };
        let mut buf = vec![x];
        for len in d..=max_len {
            self.extend_paths(&dist, y, len, &mut buf, &mut f)?;
        }
        ControlFlow::Continue(())
    }

    fn extend_paths<B, F>(
        &self,
        dist: &[Option<usize>],
        y: Vertex,
        remaining: usize,
        buf: &mut Vec<Vertex>,
        f: &mut F,
    ) -> ControlFlow<B>
    where
        F: FnMut(&[Vertex]) -> ControlFlow<B>,
    {
        let last = *buf.last().unwrap();
        if remaining == 0 {
            return if last == y { f(buf) } else { ControlFlow::Continue(()) };
        }
        for next in self.monad_unchecked(last) {
            if dist[next].is_some_and(|d| d < remaining) {
                buf.push(next);
                let r = self.extend_paths(dist, y, remaining - 1, buf, f);
                buf.pop();
                r?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Evaluates a path functional built from per-step values and checks
    /// that it only depends on the endpoints, for paths of at most
    /// `max_len` steps. Prefix products are shared across paths.
    pub fn path_independence<T, S, M>(
        &self,
        x: Vertex,
        y: Vertex,
        max_len: usize,
        unit: T,
        step: S,
        mul: M,
    ) -> Independence<T>
    where
        T: Clone + PartialEq,
        S: Fn(Vertex, Vertex) -> T,
        M: Fn(&T, &T) -> T,
    {
        let dist = self.distances(y);
        let Some(d) = dist[x] else {
            return Independence::Unreachable;
        };
        if d > max_len {
            return Independence::Unreachable;
        }
        let mut first: Option<(Vec<Vertex>, T)> = None;
        let mut count = 0usize;
        let mut path = vec![x];
        let mut prefix = vec![unit];
        let mut witness = None;
        for len in d..=max_len {
            let r = self.product_walk(&dist, y, len, &mut path, &mut prefix, &step, &mul, &mut |p, v| {
                count += 1;
                match &first {
                    None => {
                        first = Some((p.to_vec(), v.clone()));
                        ControlFlow::Continue(())
                    }
                    Some((_, fv)) if fv == v => ControlFlow::Continue(()),
                    Some(_) => ControlFlow::Break((p.to_vec(), v.clone())),
                }
            });
            if let ControlFlow::Break(w) = r {
                witness = Some(w);
                break;
            }
        }
        let (fp, fv) = first.expect("a path exists within the bound");
        match witness {
            None => Independence::Common {
                value: fv,
                paths: count,
            },
            Some((sp, sv)) => Independence::Witness {
                first: NPath { points: fp },
                first_value: fv,
                second: NPath { points: sp },
                second_value: sv,
            },
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn product_walk<T, S, M, F>(
        &self,
        dist: &[Option<usize>],
        y: Vertex,
        remaining: usize,
        path: &mut Vec<Vertex>,
        prefix: &mut Vec<T>,
        step: &S,
        mul: &M,
        f: &mut F,
    ) -> ControlFlow<(Vec<Vertex>, T)>
    where
        S: Fn(Vertex, Vertex) -> T,
        M: Fn(&T, &T) -> T,
        F: FnMut(&[Vertex], &T) -> ControlFlow<(Vec<Vertex>, T)>,
    {
        let last = *path.last().unwrap();
        if remaining == 0 {
            return if last == y {
                f(path, prefix.last().unwrap())
            } else {
                ControlFlow::Continue(())
            };
        }
        for next in self.monad_unchecked(last) {
            if dist[next].is_some_and(|d| d < remaining) {
                let v = mul(prefix.last().unwrap(), &step(last, next));
                path.push(next);
                prefix.push(v);
                let r = self.product_walk(dist, y, remaining - 1, path, prefix, step, mul, f);
                path.pop();
                prefix.pop();
                r?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Unordered triples `x < y < z` of mutual neighbours.
    pub fn mutual_triples(&self) -> Vec<(Vertex, Vertex, Vertex)> {
        let mut out = Vec::new();
        for x in self.vertices() {
            for &y in self.adj[x].iter().filter(|&&y| y > x) {
                for &z in self.adj[y].iter().filter(|&&z| z > y) {
                    if self.is_neighbor(x, z) {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    Breadth,
    Depth,
}

/// A spanning tree of one component, rooted, in visiting order.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    root: Vertex,
    order: Vec<Vertex>,
    parent: Vec<Option<Vertex>>,
}

impl SpanningTree {
    pub fn root(&self) -> Vertex {
        self.root
    }

    /// Component vertices in visiting order (root first).
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.parent.get(v).is_some_and(Option::is_some)
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v].filter(|&p| v != self.root || p != v)
    }

    pub fn is_tree_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.parent(a) == Some(b) || self.parent(b) == Some(a)
    }

    /// Tree path from the root to `v`.
    pub fn path_to(&self, v: Vertex) -> Option<NPath> {
        if !self.contains(v) {
            return None;
        }
        let mut points = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            points.push(p);
            cur = p;
        }
        points.reverse();
        Some(NPath { points })
    }
}

pub fn lattice_coords(v: usize, m: usize, dim: usize) -> Vec<usize> {
    let mut c = vec![0; dim];
    let mut r = v;
    for k in (0..dim).rev() {
        c[k] = r % m;
        r /= m;
    }
    c
}

pub fn lattice_index(c: &[usize], m: usize) -> usize {
    c.iter().fold(0, |acc, &x| acc * m + x % m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> NeighborSpace {
        NeighborSpace::build(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap()
    }

    fn square() -> NeighborSpace {
        NeighborSpace::build(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )
        .unwrap()
    }

    fn names(s: &NeighborSpace, p: &NPath) -> String {
        p.points().iter().map(|&v| s.name(v)).collect()
    }

    #[test]
    fn build_normalizes_edges() {
        let s = NeighborSpace::build(&["a", "b"], &[("b", "a"), ("a", "b"), ("a", "a")]).unwrap();
        assert_eq!(s.edge_count(), 1);
        assert_eq!(s.to_file().edges, vec![("a".to_string(), "b".to_string())]);
        assert_eq!(
            NeighborSpace::build(&["a", "a"], &[]),
            Err(SpaceError::DuplicateVertex("a".into()))
        );
        assert_eq!(
            NeighborSpace::build(&["a"], &[("a", "z")]),
            Err(SpaceError::UnknownVertex("z".into()))
        );
    }

    #[test]
    fn monads() {
        let t = triangle();
        assert_eq!(t.monad(0).unwrap(), vec![0, 1, 2]);
        let q = square();
        assert_eq!(q.monad(0).unwrap(), vec![0, 1, 3]);
        let one = NeighborSpace::build::<&str>(&["a"], &[]).unwrap();
        assert_eq!(one.monad(0).unwrap(), vec![0]);
        assert!(one.monad(3).is_err());
    }

    #[test]
    fn components_and_infinity_monad() {
        let s = NeighborSpace::build(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap();
        assert_eq!(s.infinity_monad(0).unwrap(), vec![0, 1]);
        assert_eq!(s.components(), vec![vec![0, 1], vec![2, 3]]);
        let torus = NeighborSpace::torus(5, 2);
        assert_eq!(torus.infinity_monad(7).unwrap().len(), 25);
        assert_eq!(torus.name(7), "1:2");
    }

    #[test]
    fn paths_validate_and_concat() {
        let t = triangle();
        assert_eq!(t.validate_path(&[0, 1, 2]).unwrap().len(), 2);
        assert!(t.validate_path(&[0, 0, 0]).is_ok());
        assert_eq!(square().validate_path(&[0, 2]), Err(SpaceError::NotAPath { index: 0 }));
        let ab = t.validate_path(&[0, 1]).unwrap();
        let ba = t.validate_path(&[1, 0]).unwrap();
        let bc = t.validate_path(&[1, 2]).unwrap();
        assert_eq!(ab.concat(&bc).unwrap().points(), &[0, 1, 2]);
        assert_eq!(NPath::unit(0).concat(&ab).unwrap(), ab);
        let left = ab.concat(&ba).unwrap().concat(&ab).unwrap();
        let right = ab.concat(&ba.concat(&ab).unwrap()).unwrap();
        assert_eq!(left, right);
        assert!(ab.concat(&ab).is_err());
    }

    #[test]
    fn enumeration_order_matches_hand_list() {
        let t = triangle();
        let got: Vec<String> = t.enumerate_paths(0, 2, 2).iter().map(|p| names(&t, p)).collect();
        assert_eq!(got, vec!["ac", "aac", "abc", "acc"]);
        assert_eq!(t.enumerate_paths(1, 1, 0), vec![NPath::unit(1)]);
        let s = NeighborSpace::build(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap();
        assert!(s.enumerate_paths(0, 2, 10).is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // every sequence over the vertex set, filtered
        let q = square();
        for max in 0..=4 {
            let mut brute = Vec::new();
            for len in 0..=max {
                let total = 4usize.pow(len as u32 + 1);
                let mut seqs: Vec<Vec<usize>> = (0..total)
                    .map(|mut code| {
                        let mut s = vec![0; len + 1];
                        for slot in s.iter_mut().rev() {
                            *slot = code % 4;
                            code /= 4;
                        }
                        s
                    })
                    .filter(|s| s[0] == 0 && s[len] == 2 && q.validate_path(s).is_ok())
                    .collect();
                seqs.sort();
                brute.extend(seqs);
            }
            let got: Vec<Vec<usize>> = q
                .enumerate_paths(0, 2, max)
                .into_iter()
                .map(|p| p.points().to_vec())
                .collect();
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn spanning_trees_cover_component() {
        let torus = NeighborSpace::torus(3, 2);
        for kind in [TreeKind::Breadth, TreeKind::Depth] {
            let t = torus.spanning_tree(4, kind).unwrap();
            assert_eq!(t.order().len(), 9);
            for v in torus.vertices() {
                let p = t.path_to(v).unwrap();
                assert_eq!(p.domain(), 4);
                assert_eq!(p.codomain(), v);
                assert!(torus.validate_path(p.points()).is_ok());
            }
        }
    }

    #[test]
    fn king_torus_monads() {
        let k = NeighborSpace::king_torus(4, 2);
        assert_eq!(k.len(), 16);
        assert!(k.vertices().all(|v| k.monad(v).unwrap().len() == 9));
        assert_eq!(NeighborSpace::torus(5, 2).monad(0).unwrap().len(), 5);
    }
}
