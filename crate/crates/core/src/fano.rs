//! Colored intersection graphs of low-degree rational curves: admissibility
//! checks, Gram construction, the elliptic/parabolic/hyperbolic trichotomy,
//! ADE decomposition, extended-diagram certificates and maximal parabolic
//! subgraphs.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::dynkin::{self, DynkinType};
use crate::exact::SymmetricForm;
use crate::{Error, Result};

/// A vertex: a rational curve of degree `color` and self-intersection
/// `square` (only `-2` and `0` occur).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub color: u32,
    pub square: i64,
}

/// An undirected edge with intersection multiplicity `m >= 1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub m: u32,
}

/// A colored intersection graph with a degree cap `d`.
///
/// Vertices and edges are kept sorted by id, so serializations are stable.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct ColoredGraph {
    d: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct RawGraph {
    d: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for ColoredGraph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        ColoredGraph::new(raw.d, raw.vertices, raw.edges)
    }
}

/// Lattice trichotomy of a graph, read off the signature of its Gram form.
/// `Overpositive` flags two or more positive directions, which cannot embed
/// in a hyperbolic Néron–Severi lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum GraphClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Overpositive,
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphClass::Elliptic => write!(f, "Elliptic"),
            GraphClass::Parabolic => write!(f, "Parabolic"),
            GraphClass::Hyperbolic => write!(f, "Hyperbolic"),
            GraphClass::Overpositive => write!(f, "Overpositive"),
        }
    }
}

/// One admissibility violation; the report lists all of them.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "rule")]
pub enum Violation {
    /// `m > (d_C + 1)(d_C' + 1)`.
    EdgeBound { a: String, b: String, m: u32, bound: u64 },
    /// Both squares nonnegative and `m·h > d_C·d_C'`.
    NonNegativePair { a: String, b: String, m: u32, h: u64 },
    /// Two contracted (-2)-curves meet at most once.
    ExceptionalPair { a: String, b: String, m: u32 },
    /// In an all-(-2) graph that is not overpositive, multiplicities
    /// exceed 2 only outside the geometric range.
    MultiplicityRange { a: String, b: String, m: u32 },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Result of decomposing an elliptic graph into ADE summands.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EllipticDecomposition {
    pub parts: Vec<DynkinType>,
    pub total_rank: usize,
    /// An elliptic subgraph of a geometric graph has rank at most 21.
    pub within_rank_bound: bool,
}

/// An induced extended Dynkin diagram inside a graph.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ExtendedWitness {
    pub vertex_ids: Vec<String>,
    pub diagram: DynkinType,
}

impl ColoredGraph {
    pub fn new(d: u32, mut vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGraph("degree cap d must be positive".into()));
        }
        vertices.sort_by(|x, y| x.id.cmp(&y.id));
        for w in vertices.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", w[0].id)));
            }
        }
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        for v in &vertices {
            if v.color > d {
                return Err(Error::InvalidGraph(format!(
                    "vertex {}: color {} exceeds cap d={d}",
                    v.id, v.color
                )));
            }
            if v.square != -2 && v.square != 0 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {}: square must be -2 or 0, got {}",
                    v.id, v.square
                )));
            }
        }
        let mut canonical = Vec::with_capacity(edges.len());
        for e in edges {
            if e.m == 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {}-{}: multiplicity must be >= 1",
                    e.a, e.b
                )));
            }
            if e.a == e.b {
                return Err(Error::InvalidGraph(format!("loop at vertex {}", e.a)));
            }
            if !index.contains_key(e.a.as_str()) || !index.contains_key(e.b.as_str()) {
                return Err(Error::InvalidGraph(format!(
                    "edge {}-{} references missing vertex",
                    e.a, e.b
                )));
            }
            let (a, b) = if e.a <= e.b { (e.a, e.b) } else { (e.b, e.a) };
            canonical.push(Edge { a, b, m: e.m });
        }
        canonical.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
        for w in canonical.windows(2) {
            if w[0].a == w[1].a && w[0].b == w[1].b {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {}-{}",
                    w[0].a, w[0].b
                )));
            }
        }
        Ok(Self {
            d,
            vertices,
            edges: canonical,
        })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str::<ColoredGraph>(json)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn degree_cap(&self) -> u32 {
        self.d
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.id.as_str().cmp(id)).ok()
    }

    /// Multiplicity matrix (0 where no edge).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut adj = vec![vec![0u32; n]; n];
        for e in &self.edges {
            let i = self.index_of(&e.a).expect("validated");
            let j = self.index_of(&e.b).expect("validated");
            adj[i][j] = e.m;
            adj[j][i] = e.m;
        }
        adj
    }

    /// Gram form: declared squares on the diagonal, multiplicities off it.
    pub fn gram(&self) -> SymmetricForm {
        let n = self.len();
        let mut g = SymmetricForm::zero(n);
        for (i, v) in self.vertices.iter().enumerate() {
            g.set_entry(i, i, BigInt::from(v.square));
        }
        for e in &self.edges {
            let i = self.index_of(&e.a).expect("validated");
            let j = self.index_of(&e.b).expect("validated");
            g.set_entry(i, j, BigInt::from(e.m));
        }
        g
    }

    /// Color vector in vertex order.
    pub fn colors(&self) -> Vec<u32> {
        self.vertices.iter().map(|v| v.color).collect()
    }

    pub fn classify(&self) -> GraphClass {
        let sig = self.gram().signature();
        match (sig.n_plus, sig.n_zero) {
            (0, 0) => GraphClass::Elliptic,
            (0, _) => GraphClass::Parabolic,
            (1, _) => GraphClass::Hyperbolic,
            _ => GraphClass::Overpositive,
        }
    }

    /// Check the intersection-number bounds a graph must satisfy to be
    /// realizable in degree `2h`; every violated bound is reported.
    pub fn admissible(&self, h: u64) -> AdmissibilityReport {
        let mut violations = Vec::new();
        let all_minus_two = self.vertices.iter().all(|v| v.square == -2);
        let enforce_range = all_minus_two && self.classify() != GraphClass::Overpositive;
        for e in &self.edges {
            let va = &self.vertices[self.index_of(&e.a).expect("validated")];
            let vb = &self.vertices[self.index_of(&e.b).expect("validated")];
            let bound = (va.color as u64 + 1) * (vb.color as u64 + 1);
            if e.m as u64 > bound {
                violations.push(Violation::EdgeBound {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    m: e.m,
                    bound,
                });
            }
            if va.square >= 0 && vb.square >= 0 && (e.m as u64) * h > (va.color as u64) * (vb.color as u64) {
                violations.push(Violation::NonNegativePair {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    m: e.m,
                    h,
                });
            }
            if va.color == 0 && vb.color == 0 && va.square == -2 && vb.square == -2 && e.m > 1 {
                violations.push(Violation::ExceptionalPair {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    m: e.m,
                });
            }
            if enforce_range && e.m > 2 {
                violations.push(Violation::MultiplicityRange {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    m: e.m,
                });
            }
        }
        AdmissibilityReport { violations }
    }

    /// Connected components as sorted index lists, ordered by first vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for w in 0..n {
                    if adj[v][w] > 0 && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Decompose an elliptic graph into its ADE summands.
    pub fn decompose_elliptic(&self) -> Result<EllipticDecomposition> {
        if self.classify() != GraphClass::Elliptic {
            return Err(Error::NotElliptic);
        }
        let adj = self.adjacency();
        let mut parts = Vec::new();
        for comp in self.components() {
            let reindex: BTreeMap<usize, usize> =
                comp.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            let mut edges = Vec::new();
            for (pos, &v) in comp.iter().enumerate() {
                for &w in comp.iter().skip(pos + 1) {
                    if adj[v][w] > 0 {
                        edges.push((reindex[&v], reindex[&w], adj[v][w]));
                    }
                }
            }
            let t = dynkin::recognize(comp.len(), &edges).ok_or(Error::ComponentNotAde)?;
            if t.is_extended() {
                return Err(Error::ComponentNotAde);
            }
            parts.push(t);
        }
        parts.sort();
        let total_rank: usize = parts.iter().map(|t| t.rank()).sum();
        Ok(EllipticDecomposition {
            parts,
            total_rank,
            within_rank_bound: total_rank <= 21,
        })
    }

    /// Find an induced extended Dynkin diagram: doubled edges first, then
    /// shortest cycles, then affine tree patterns. Deterministic.
    ///
    /// Requires all squares `-2`. Returns `None` exactly when every
    /// component is an ADE diagram.
    pub fn find_extended(&self) -> Result<Option<ExtendedWitness>> {
        if self.vertices.iter().any(|v| v.square != -2) {
            return Err(Error::InvalidInput(
                "find_extended requires all squares -2".into(),
            ));
        }
        let n = self.len();
        let adj = self.adjacency();

        // Doubled edge: an affine A1 pair.
        if let Some(e) = self.edges.iter().find(|e| e.m == 2) {
            return Ok(Some(ExtendedWitness {
                vertex_ids: vec![e.a.clone(), e.b.clone()],
                diagram: DynkinType::TildeA(1),
            }));
        }

        // Shortest cycle in the multiplicity-1 graph.
        let simple = |i: usize, j: usize| adj[i][j] == 1;
        let mut best_cycle: Option<Vec<usize>> = None;
        for root in 0..n {
            if let Some(cycle) = shortest_cycle_through(n, &simple, root) {
                let better = match &best_cycle {
                    None => true,
                    Some(b) => {
                        let key = |c: &Vec<usize>| (c.len(), sorted(c));
                        key(&cycle) < key(b)
                    }
                };
                if better {
                    best_cycle = Some(cycle);
                }
            }
        }
        if let Some(cycle) = best_cycle {
            if self.induced_matches(&cycle, DynkinType::TildeA(cycle.len() as u32 - 1)) {
                return Ok(Some(self.witness(sorted(&cycle), DynkinType::TildeA(cycle.len() as u32 - 1))));
            }
        }

        // Forest case: scan components for affine subtrees.
        let mut candidates: Vec<(usize, Vec<usize>, DynkinType)> = Vec::new();
        for comp in self.components() {
            let deg = |v: usize| comp.iter().filter(|&&w| simple(v, w)).count();
            if comp
                .iter()
                .all(|&v| deg(v) <= 2)
            {
                continue; // a path: type A
            }
            // Degree >= 4: an affine D4 star.
            if let Some(&c) = comp.iter().find(|&&v| deg(v) >= 4) {
                let legs: Vec<usize> = comp.iter().copied().filter(|&w| simple(c, w)).take(4).collect();
                let mut set = vec![c];
                set.extend(legs);
                candidates.push((set.len(), sorted(&set), DynkinType::TildeD(4)));
            }
            // Two branch vertices: an affine D along the path between them.
            let branch: Vec<usize> = comp.iter().copied().filter(|&v| deg(v) >= 3).collect();
            if branch.len() >= 2 {
                let mut best: Option<(usize, usize, Vec<usize>)> = None;
                for (i, &u) in branch.iter().enumerate() {
                    for &v in branch.iter().skip(i + 1) {
                        if let Some(path) = tree_path(&comp, &simple, u, v) {
                            let better = match &best {
                                None => true,
                                Some((len, _, _)) => path.len() < *len,
                            };
                            if better {
                                best = Some((path.len(), u, path));
                            }
                        }
                    }
                }
                if let Some((_, _, path)) = best {
                    let (u, v) = (path[0], *path.last().unwrap());
                    let mut set = path.clone();
                    let take_legs = |at: usize, set: &mut Vec<usize>| {
                        for &w in comp.iter() {
                            if simple(at, w) && !set.contains(&w) {
                                set.push(w);
                                if set.iter().filter(|&&x| simple(at, x)).count() >= 3 {
                                    break;
                                }
                            }
                        }
                    };
                    take_legs(u, &mut set);
                    take_legs(v, &mut set);
                    candidates.push((set.len(), sorted(&set), DynkinType::TildeD(set.len() as u32 - 1)));
                }
            }
            // A single branch vertex: affine E patterns by arm capacity.
            if branch.len() == 1 && deg(branch[0]) == 3 {
                let c = branch[0];
                let mut arms: Vec<Vec<usize>> = Vec::new();
                for &s in comp.iter() {
                    if !simple(c, s) {
                        continue;
                    }
                    let mut arm = vec![s];
                    let (mut prev, mut cur) = (c, s);
                    while deg(cur) == 2 {
                        let next = comp
                            .iter()
                            .copied()
                            .find(|&w| simple(cur, w) && w != prev)
                            .expect("degree-2 arm vertex");
                        prev = cur;
                        cur = next;
                        arm.push(cur);
                    }
                    arms.push(arm);
                }
                arms.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
                let lens: Vec<usize> = arms.iter().map(|a| a.len()).collect();
                let shapes: [(usize, [usize; 3], DynkinType); 3] = [
                    (7, [2, 2, 2], DynkinType::TildeE(6)),
                    (8, [3, 3, 1], DynkinType::TildeE(7)),
                    (9, [5, 2, 1], DynkinType::TildeE(8)),
                ];
                for (size, need, t) in shapes {
                    if lens.len() == 3 && lens[0] >= need[0] && lens[1] >= need[1] && lens[2] >= need[2] {
                        let mut set = vec![c];
                        for (arm, take) in arms.iter().zip(need) {
                            set.extend(arm.iter().take(take));
                        }
                        candidates.push((size, sorted(&set), t));
                        break;
                    }
                }
            }
        }
        candidates.sort();
        for (_, set, t) in candidates {
            if self.induced_matches(&set, t) {
                return Ok(Some(self.witness(set, t)));
            }
        }
        Ok(None)
    }

    /// Does the induced subgraph on `set` (sorted indices) realize `t`?
    fn induced_matches(&self, set: &[usize], t: DynkinType) -> bool {
        let adj = self.adjacency();
        let reindex: BTreeMap<usize, usize> = set.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut edges = Vec::new();
        for (pos, &v) in set.iter().enumerate() {
            for &w in set.iter().skip(pos + 1) {
                if adj[v][w] > 0 {
                    edges.push((reindex[&v], reindex[&w], adj[v][w]));
                }
            }
        }
        dynkin::recognize(set.len(), &edges) == Some(t)
    }

    fn witness(&self, set: Vec<usize>, diagram: DynkinType) -> ExtendedWitness {
        ExtendedWitness {
            vertex_ids: set.iter().map(|&i| self.vertices[i].id.clone()).collect(),
            diagram,
        }
    }

    /// All inclusion-maximal vertex subsets whose induced form is parabolic.
    ///
    /// Subsets without positive directions are hereditary, so the search
    /// prunes every branch that turns hyperbolic. Results are sorted by
    /// descending size, then lexicographically by ids.
    pub fn max_parabolic_subgraphs(&self) -> Result<Vec<Vec<String>>> {
        if self.classify() != GraphClass::Hyperbolic {
            return Err(Error::NotHyperbolic);
        }
        let n = self.len();
        let gram = self.gram();
        let semidefinite = |set: &[usize]| gram.restrict(set).signature().n_plus == 0;
        let mut found: Vec<Vec<usize>> = Vec::new();
        let mut current: Vec<usize> = Vec::new();

        fn rec(
            start: usize,
            n: usize,
            current: &mut Vec<usize>,
            semidefinite: &dyn Fn(&[usize]) -> bool,
            found: &mut Vec<Vec<usize>>,
        ) {
            let mut extended = false;
            for v in start..n {
                current.push(v);
                if semidefinite(current) {
                    extended = true;
                    rec(v + 1, n, current, semidefinite, found);
                }
                current.pop();
            }
            if !current.is_empty() && !extended {
                // Maximality against every vertex, not just later ones.
                let maximal = (0..n).all(|v| {
                    if current.contains(&v) {
                        return true;
                    }
                    let mut probe = current.clone();
                    probe.push(v);
                    probe.sort_unstable();
                    !semidefinite(&probe)
                });
                if maximal {
                    found.push(current.clone());
                }
            }
        }
        rec(0, n, &mut current, &semidefinite, &mut found);

        let mut out: Vec<Vec<String>> = found
            .into_iter()
            .filter(|set| gram.restrict(set).signature().n_zero >= 1)
            .map(|set| {
                set.iter()
                    .map(|&i| self.vertices[i].id.clone())
                    .collect::<Vec<_>>()
            })
            .collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        Ok(out)
    }

    /// Stable content hash of the canonical serialization.
    pub fn hash(&self) -> String {
        format!("{:016x}", crate::fnv1a64(self.to_json().as_bytes()))
    }

    /// Graphviz rendering with the color as vertex label; doubled edges
    /// carry their multiplicity.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph fano {\n");
        for v in &self.vertices {
            out.push_str(&format!(
                "  \"{}\" [label=\"{}\"{}];\n",
                v.id,
                v.color,
                if v.square == 0 { ", shape=doublecircle" } else { "" }
            ));
        }
        for e in &self.edges {
            if e.m > 1 {
                out.push_str(&format!("  \"{}\" -- \"{}\" [label=\"{}\"];\n", e.a, e.b, e.m));
            } else {
                out.push_str(&format!("  \"{}\" -- \"{}\";\n", e.a, e.b));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Shortest cycle through `root` in a simple graph (deterministic BFS).
fn shortest_cycle_through(
    n: usize,
    adjacent: &dyn Fn(usize, usize) -> bool,
    root: usize,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut best: Option<Vec<usize>> = None;
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            if !adjacent(v, w) {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            } else if parent[v] != w && parent[w] != v {
                // Non-tree edge: walk both branches up to the meeting point.
                let mut pa = vec![v];
                let mut pb = vec![w];
                let (mut x, mut y) = (v, w);
                while x != y {
                    if dist[x] >= dist[y] {
                        x = parent[x];
                        pa.push(x);
                    } else {
                        y = parent[y];
                        pb.push(y);
                    }
                }
                if pa.last() == pb.last() {
                    pb.pop();
                    pb.reverse();
                    pa.extend(pb);
                    let candidate = pa;
                    // Valid simple cycle only if vertices are distinct.
                    let mut uniq = candidate.clone();
                    uniq.sort_unstable();
                    uniq.dedup();
                    if uniq.len() == candidate.len() && candidate.len() >= 3 {
                        let better = match &best {
                            None => true,
                            Some(b) => candidate.len() < b.len(),
                        };
                        if better {
                            best = Some(candidate);
                        }
                    }
                }
            }
        }
    }
    best
}

/// Unique path between two vertices of a tree component.
fn tree_path(
    comp: &[usize],
    adjacent: &dyn Fn(usize, usize) -> bool,
    u: usize,
    v: usize,
) -> Option<Vec<usize>> {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([u]);
    parent.insert(u, u);
    while let Some(x) = queue.pop_front() {
        if x == v {
            let mut path = vec![v];
            let mut cur = v;
            while cur != u {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in comp {
            if adjacent(x, w) && !parent.contains_key(&w) {
                parent.insert(w, x);
                queue.push_back(w);
            }
        }
    }
    None
}
