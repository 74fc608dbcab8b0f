//! Certified degree-bound search: enumerate parabolic colored graphs
//! (orthogonal sums of ADE diagrams with at least one extended part),
//! extend each by one vertex into hyperbolic graphs, and maximize the
//! intrinsic polarization square.
//!
//! Streams are deterministic and duplicate-free; the certificate is
//! byte-identical for any worker count because per-unit results merge by
//! an associative, commutative maximum with a lexicographic tie-break.
//! With the `parallel` feature the units run on a rayon pool sized by
//! `SearchConfig::parallelism`; without it (or with `parallelism <= 1`)
//! the same code runs sequentially.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynkin::{self, DynkinType};
use crate::exact::BigRat;
use crate::fano::{ColoredGraph, Edge, GraphClass, Vertex};
use crate::polarize;
use crate::{Error, Result};

/// Caps and knobs of a bound search.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Degree cap for colors.
    pub d: u32,
    /// Cap on the vertices of the parabolic part (at most 24; a genus-one
    /// fibration has at most 24 rational fibre components).
    pub max_vertices: usize,
    /// Optional cap on the total color sum of a graph.
    pub color_budget: Option<u64>,
    /// Worker count; `<= 1` runs sequentially.
    pub parallelism: usize,
    /// Optional cap on explored nodes; exceeding it yields a partial,
    /// still deterministic, certificate.
    pub node_limit: Option<u64>,
}

impl SearchConfig {
    pub fn new(d: u32, max_vertices: usize) -> Self {
        Self {
            d,
            max_vertices,
            color_budget: None,
            parallelism: 1,
            node_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("d must be >= 1".into()));
        }
        if self.max_vertices > 24 {
            return Err(Error::InvalidInput(
                "max_vertices exceeds 24, the fibre-component bound".into(),
            ));
        }
        Ok(())
    }
}

/// The materialized parabolic stream with its exhaustion flag.
#[derive(Clone, Debug)]
pub struct ParabolicEnumeration {
    pub graphs: Vec<ColoredGraph>,
    pub nodes: u64,
    pub exhausted: bool,
}

/// All parabolic skeletons: multisets of catalog diagrams with at least
/// one extended part and total vertex count at most `max_vertices`,
/// ordered by (total vertices, lexicographic part list).
fn skeletons(max_vertices: usize) -> Vec<Vec<DynkinType>> {
    let mut catalog: Vec<DynkinType> = dynkin::ade_catalog(max_vertices);
    catalog.extend(dynkin::enumerate_extended(max_vertices));
    catalog.sort();
    let mut out = Vec::new();
    let mut current: Vec<DynkinType> = Vec::new();
    fn rec(
        catalog: &[DynkinType],
        from: usize,
        remaining: usize,
        has_extended: bool,
        current: &mut Vec<DynkinType>,
        out: &mut Vec<Vec<DynkinType>>,
    ) {
        for (idx, t) in catalog.iter().enumerate().skip(from) {
            if t.vertices() > remaining {
                continue;
            }
            current.push(*t);
            let extended = has_extended || t.is_extended();
            if extended {
                out.push(current.clone());
            }
            rec(
                catalog,
                idx,
                remaining - t.vertices(),
                extended,
                current,
                out,
            );
            current.pop();
        }
    }
    rec(&catalog, 0, max_vertices, false, &mut current, &mut out);
    out.sort_by(|a, b| {
        let va: usize = a.iter().map(|t| t.vertices()).sum();
        let vb: usize = b.iter().map(|t| t.vertices()).sum();
        va.cmp(&vb).then(a.cmp(b))
    });
    out
}

/// Edge-level admissibility of a coloring of one all-(-2) diagram.
fn part_coloring_admissible(t: DynkinType, colors: &[u32]) -> bool {
    t.edges().iter().all(|&(a, b, m)| {
        (m as u64) <= (colors[a] as u64 + 1) * (colors[b] as u64 + 1)
            && !(colors[a] == 0 && colors[b] == 0 && m > 1)
    })
}

/// Admissible colorings of a diagram that are lexicographic minima of
/// their automorphism orbit, in lexicographic order.
fn part_colorings(t: DynkinType, d: u32) -> Vec<Vec<u32>> {
    let v = t.vertices();
    let auts = t.automorphisms();
    let mut out = Vec::new();
    let mut colors = vec![0u32; v];
    loop {
        if part_coloring_admissible(t, &colors) {
            let canonical = auts.iter().all(|aut| {
                let image: Vec<u32> = (0..v).map(|i| colors[aut[i]]).collect();
                colors[..] <= image[..]
            });
            if canonical {
                out.push(colors.clone());
            }
        }
        // Odometer.
        let mut k = v;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if colors[k] < d {
                colors[k] += 1;
                for c in colors.iter_mut().skip(k + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Enumerate parabolic colored graphs under the configured caps.
///
/// Identical parts carry sorted coloring blocks, so each isomorphism
/// class appears exactly once; the stream order is deterministic.
pub fn enumerate_parabolic(cfg: &SearchConfig) -> Result<ParabolicEnumeration> {
    cfg.validate()?;
    let mut coloring_cache: BTreeMap<DynkinType, Vec<Vec<u32>>> = BTreeMap::new();
    let mut graphs = Vec::new();
    let mut nodes = 0u64;
    let mut exhausted = true;

    'skeletons: for skeleton in skeletons(cfg.max_vertices) {
        // Group identical parts.
        let mut groups: Vec<(DynkinType, usize)> = Vec::new();
        for &t in &skeleton {
            match groups.last_mut() {
                Some((gt, count)) if *gt == t => *count += 1,
                _ => groups.push((t, 1)),
            }
        }
        for (t, _) in &groups {
            coloring_cache
                .entry(*t)
                .or_insert_with(|| part_colorings(*t, cfg.d));
        }
        // Per group: nondecreasing index tuples over its coloring list.
        let group_lists: Vec<(&Vec<Vec<u32>>, usize)> = groups
            .iter()
            .map(|(t, count)| (&coloring_cache[t], *count))
            .collect();
        if group_lists.iter().any(|(list, _)| list.is_empty()) {
            continue;
        }
        let mut choice: Vec<Vec<usize>> = group_lists
            .iter()
            .map(|(_, count)| vec![0usize; *count])
            .collect();
        'colorings: loop {
            // Assemble and emit the current choice.
            let mut full_colors: Vec<u32> = Vec::new();
            for (g, (list, _)) in group_lists.iter().enumerate() {
                for &idx in &choice[g] {
                    full_colors.extend(&list[idx]);
                }
            }
            let within_budget = cfg
                .color_budget
                .map(|b| full_colors.iter().map(|&c| c as u64).sum::<u64>() <= b)
                .unwrap_or(true);
            if within_budget {
                if let Some(limit) = cfg.node_limit {
                    if nodes >= limit {
                        exhausted = false;
                        break 'skeletons;
                    }
                }
                graphs.push(assemble(&skeleton, &full_colors, cfg.d));
                nodes += 1;
            }
            // Advance the nondecreasing odometer, last group fastest.
            for g in (0..choice.len()).rev() {
                let len = group_lists[g].0.len();
                let tuple = &mut choice[g];
                let mut pos = tuple.len();
                while pos > 0 {
                    pos -= 1;
                    if tuple[pos] + 1 < len {
                        let v = tuple[pos] + 1;
                        for t in tuple.iter_mut().skip(pos) {
                            *t = v;
                        }
                        continue 'colorings;
                    }
                }
                for t in tuple.iter_mut() {
                    *t = 0;
                }
                // Carry into the previous group.
            }
            break;
        }
    }
    Ok(ParabolicEnumeration {
        graphs,
        nodes,
        exhausted,
    })
}

/// Build the disjoint-sum graph of a skeleton with the given colors.
fn assemble(skeleton: &[DynkinType], colors: &[u32], d: u32) -> ColoredGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut offset = 0usize;
    for (p, t) in skeleton.iter().enumerate() {
        let v = t.vertices();
        for i in 0..v {
            vertices.push(Vertex {
                id: format!("p{p:02}v{i:02}"),
                color: colors[offset + i],
                square: -2,
            });
        }
        for (a, b, m) in t.edges() {
            edges.push(Edge {
                a: format!("p{p:02}v{a:02}"),
                b: format!("p{p:02}v{b:02}"),
                m,
            });
        }
        offset += v;
    }
    ColoredGraph::new(d, vertices, edges).expect("skeleton graphs are valid by construction")
}

/// All hyperbolic one-vertex extensions of a parabolic graph: the new
/// vertex has square -2, a color in `0..=d` and edge multiplicities in
/// `{0,1,2}` obeying the admissibility bounds. Deterministic order,
/// duplicate-free up to colored-graph isomorphism.
pub fn extend_hyperbolic(g0: &ColoredGraph, cfg: &SearchConfig) -> Result<Vec<ColoredGraph>> {
    cfg.validate()?;
    if g0.classify() != GraphClass::Parabolic {
        return Err(Error::NotParabolic);
    }
    let base_color_sum: u64 = g0.vertices().iter().map(|v| v.color as u64).sum();
    let n = g0.len();
    let mut kept: Vec<ColoredGraph> = Vec::new();
    let mut keys: Vec<String> = Vec::new();

    for color in 0..=cfg.d {
        if let Some(budget) = cfg.color_budget {
            if base_color_sum + color as u64 > budget {
                continue;
            }
        }
        let mut attach = vec![0u32; n];
        'attach: loop {
            if attach.iter().any(|&m| m > 0) && attachment_admissible(g0, color, &attach) {
                let candidate = extend_graph(g0, color, &attach, cfg.d);
                if candidate.classify() == GraphClass::Hyperbolic {
                    let key = iso_key(&candidate);
                    let duplicate = keys
                        .iter()
                        .zip(&kept)
                        .any(|(k, g)| *k == key && colored_isomorphic(g, &candidate));
                    if !duplicate {
                        keys.push(key);
                        kept.push(candidate);
                    }
                }
            }
            // Base-3 odometer over the attachment vector.
            let mut k = n;
            loop {
                if k == 0 {
                    break 'attach;
                }
                k -= 1;
                if attach[k] < 2 {
                    attach[k] += 1;
                    for a in attach.iter_mut().skip(k + 1) {
                        *a = 0;
                    }
                    break;
                }
            }
        }
    }
    Ok(kept)
}

fn attachment_admissible(g0: &ColoredGraph, color: u32, attach: &[u32]) -> bool {
    g0.vertices().iter().zip(attach).all(|(v, &m)| {
        m == 0
            || ((m as u64) <= (color as u64 + 1) * (v.color as u64 + 1)
                && !(color == 0 && v.color == 0 && m > 1))
    })
}

fn extend_graph(g0: &ColoredGraph, color: u32, attach: &[u32], d: u32) -> ColoredGraph {
    let mut vertices = g0.vertices().to_vec();
    vertices.push(Vertex {
        id: "~v0".into(),
        color,
        square: -2,
    });
    let mut edges = g0.edges().to_vec();
    for (v, &m) in g0.vertices().iter().zip(attach) {
        if m > 0 {
            edges.push(Edge {
                a: v.id.clone(),
                b: "~v0".into(),
                m,
            });
        }
    }
    ColoredGraph::new(d, vertices, edges).expect("extension graphs are valid by construction")
}

/// Cheap isomorphism-invariant key: the sorted multiset of vertex
/// neighbourhood profiles.
fn iso_key(g: &ColoredGraph) -> String {
    let adj = g.adjacency();
    let verts = g.vertices();
    let mut profiles: Vec<String> = (0..g.len())
        .map(|i| {
            let mut nbrs: Vec<(u32, u32, i64)> = (0..g.len())
                .filter(|&j| adj[i][j] > 0)
                .map(|j| (adj[i][j], verts[j].color, verts[j].square))
                .collect();
            nbrs.sort_unstable();
            format!("{}:{}:{:?}", verts[i].color, verts[i].square, nbrs)
        })
        .collect();
    profiles.sort_unstable();
    profiles.join("|")
}

/// Colored-graph isomorphism by backtracking on (color, square, degree)
/// compatible images.
fn colored_isomorphic(a: &ColoredGraph, b: &ColoredGraph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    let va = a.vertices();
    let vb = b.vertices();
    let key = |vs: &[Vertex], adj: &[Vec<u32>], i: usize| {
        let mut deg: Vec<u32> = adj[i].iter().copied().filter(|&m| m > 0).collect();
        deg.sort_unstable();
        (vs[i].color, vs[i].square, deg)
    };
    let keys_a: Vec<_> = (0..n).map(|i| key(va, &adj_a, i)).collect();
    let keys_b: Vec<_> = (0..n).map(|i| key(vb, &adj_b, i)).collect();
    {
        let mut sa = keys_a.clone();
        let mut sb = keys_b.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return false;
        }
    }
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        k: usize,
        n: usize,
        adj_a: &[Vec<u32>],
        adj_b: &[Vec<u32>],
        keys_a: &[(u32, i64, Vec<u32>)],
        keys_b: &[(u32, i64, Vec<u32>)],
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] || keys_a[k] != keys_b[cand] {
                continue;
            }
            if (0..k).any(|prev| adj_a[k][prev] != adj_b[cand][image[prev]]) {
                continue;
            }
            image[k] = cand;
            used[cand] = true;
            if rec(k + 1, n, adj_a, adj_b, keys_a, keys_b, image, used) {
                return true;
            }
            used[cand] = false;
            image[k] = usize::MAX;
        }
        false
    }
    rec(0, n, &adj_a, &adj_b, &keys_a, &keys_b, &mut image, &mut used)
}

/// Best candidate of a work unit: maximal polarization square with the
/// lexicographically least serialized graph as tie-break.
#[derive(Clone, Debug)]
struct Best {
    square: BigRat,
    json: String,
    graph: ColoredGraph,
}

fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(match x.square.cmp(&y.square) {
            std::cmp::Ordering::Greater => x,
            std::cmp::Ordering::Less => y,
            std::cmp::Ordering::Equal => {
                if x.json <= y.json {
                    x
                } else {
                    y
                }
            }
        }),
    }
}

fn process_unit(g0: &ColoredGraph, cfg: &SearchConfig) -> Result<Option<Best>> {
    let mut best = None;
    for ext in extend_hyperbolic(g0, cfg)? {
        if let Some(square) = polarize::polarization_square(&ext) {
            let candidate = Best {
                square,
                json: ext.to_json(),
                graph: ext,
            };
            best = merge(best, Some(candidate));
        }
    }
    Ok(best)
}

/// Deterministic node cost of one extension unit: every raw
/// (color, attachment) combination counts as a node.
fn unit_cost(g0: &ColoredGraph, d: u32) -> u64 {
    let per_vertex = 3u64;
    let mut cost = d as u64 + 1;
    for _ in 0..g0.len() {
        cost = cost.saturating_mul(per_vertex);
    }
    cost
}

/// A certified search result.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BoundCertificate {
    pub schema_version: u32,
    pub d: u32,
    #[serde(rename = "maxVertices")]
    pub max_vertices: usize,
    /// Maximal intrinsic polarization square over all hyperbolic
    /// extensions found, as an exact rational string.
    #[serde(rename = "maxSquare")]
    pub max_square: Option<String>,
    #[serde(rename = "attainingGraph")]
    pub attaining_graph: Option<ColoredGraph>,
    #[serde(rename = "nodesExplored")]
    pub nodes_explored: u64,
    pub exhausted: bool,
}

/// Resumable search state, written after every processed chunk.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub kind: String,
    pub d: u32,
    #[serde(rename = "maxVertices")]
    pub max_vertices: usize,
    #[serde(rename = "colorBudget")]
    pub color_budget: Option<u64>,
    #[serde(rename = "nodeLimit")]
    pub node_limit: Option<u64>,
    #[serde(rename = "unitsDone")]
    pub units_done: usize,
    #[serde(rename = "bestSquare")]
    pub best_square: Option<String>,
    #[serde(rename = "bestGraph")]
    pub best_graph: Option<ColoredGraph>,
}

pub const CHECKPOINT_KIND: &str = "k3fano-bound-checkpoint";

impl Checkpoint {
    fn fresh(cfg: &SearchConfig) -> Self {
        Checkpoint {
            version: 1,
            kind: CHECKPOINT_KIND.into(),
            d: cfg.d,
            max_vertices: cfg.max_vertices,
            color_budget: cfg.color_budget,
            node_limit: cfg.node_limit,
            units_done: 0,
            best_square: None,
            best_graph: None,
        }
    }

    fn matches(&self, cfg: &SearchConfig) -> bool {
        self.version == 1
            && self.kind == CHECKPOINT_KIND
            && self.d == cfg.d
            && self.max_vertices == cfg.max_vertices
            && self.color_budget == cfg.color_budget
            && self.node_limit == cfg.node_limit
    }

    fn best(&self) -> Result<Option<Best>> {
        match (&self.best_square, &self.best_graph) {
            (Some(s), Some(g)) => {
                let square = BigRat::from_str(s)
                    .map_err(|e| Error::InvalidInput(format!("bad checkpoint square: {e}")))?;
                Ok(Some(Best {
                    square,
                    json: g.to_json(),
                    graph: g.clone(),
                }))
            }
            (None, None) => Ok(None),
            _ => Err(Error::InvalidInput(
                "checkpoint carries square and graph inconsistently".into(),
            )),
        }
    }
}

/// Run the bound search. The certificate is deterministic: identical
/// configurations produce byte-identical serializations for any worker
/// count and any checkpoint/resume split.
pub fn effective_bound(cfg: &SearchConfig) -> Result<BoundCertificate> {
    effective_bound_resumable(cfg, None, |_| Ok(()))
}

/// Resumable variant: `resume` continues from a previous checkpoint, and
/// `save` is called with fresh state after every processed chunk.
pub fn effective_bound_resumable(
    cfg: &SearchConfig,
    resume: Option<Checkpoint>,
    mut save: impl FnMut(&Checkpoint) -> Result<()>,
) -> Result<BoundCertificate> {
    cfg.validate()?;
    let parabolic = enumerate_parabolic(cfg)?;
    let mut nodes: u64 = parabolic.nodes;

    // Deterministic unit cutoff under the node limit.
    let mut cutoff = parabolic.graphs.len();
    if let Some(limit) = cfg.node_limit {
        let mut acc = nodes;
        cutoff = 0;
        for g in &parabolic.graphs {
            let c = unit_cost(g, cfg.d);
            if acc.saturating_add(c) > limit {
                break;
            }
            acc = acc.saturating_add(c);
            cutoff += 1;
        }
    }
    let units = &parabolic.graphs[..cutoff];
    for g in units {
        nodes = nodes.saturating_add(unit_cost(g, cfg.d));
    }
    let exhausted = parabolic.exhausted && cutoff == parabolic.graphs.len();

    let mut state = match resume {
        Some(cp) => {
            if !cp.matches(cfg) {
                return Err(Error::InvalidInput(
                    "checkpoint does not match the search configuration".into(),
                ));
            }
            cp
        }
        None => Checkpoint::fresh(cfg),
    };
    if state.units_done > units.len() {
        return Err(Error::InvalidInput(
            "checkpoint is ahead of the configured search space".into(),
        ));
    }
    let mut best = state.best()?;

    let runner = Runner::new(cfg)?;
    let chunk_size = (units.len() / 16).max(1);
    let mut done = state.units_done;
    while done < units.len() {
        let upto = (done + chunk_size).min(units.len());
        let chunk = &units[done..upto];
        let chunk_best = runner.run_chunk(chunk, cfg)?;
        best = merge(best, chunk_best);
        done = upto;
        state.units_done = done;
        state.best_square = best.as_ref().map(|b| b.square.to_string());
        state.best_graph = best.as_ref().map(|b| b.graph.clone());
        save(&state)?;
    }

    Ok(BoundCertificate {
        schema_version: 1,
        d: cfg.d,
        max_vertices: cfg.max_vertices,
        max_square: best.as_ref().map(|b| b.square.to_string()),
        attaining_graph: best.map(|b| b.graph),
        nodes_explored: nodes,
        exhausted,
    })
}

/// Executes work-unit chunks sequentially or on a rayon pool built once
/// per search. The merged result is identical either way.
enum Runner {
    Sequential,
    #[cfg(feature = "parallel")]
    Pool(rayon::ThreadPool),
}

impl Runner {
    #[cfg(feature = "parallel")]
    fn new(cfg: &SearchConfig) -> Result<Runner> {
        if cfg.parallelism <= 1 {
            return Ok(Runner::Sequential);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        Ok(Runner::Pool(pool))
    }

    #[cfg(not(feature = "parallel"))]
    fn new(_cfg: &SearchConfig) -> Result<Runner> {
        Ok(Runner::Sequential)
    }

    fn run_chunk(&self, chunk: &[ColoredGraph], cfg: &SearchConfig) -> Result<Option<Best>> {
        match self {
            Runner::Sequential => {
                let mut best = None;
                for g in chunk {
                    best = merge(best, process_unit(g, cfg)?);
                }
                Ok(best)
            }
            #[cfg(feature = "parallel")]
            Runner::Pool(pool) => {
                use rayon::prelude::*;
                pool.install(|| {
                    chunk
                        .par_iter()
                        .map(|g| process_unit(g, cfg))
                        .try_reduce(|| None, |a, b| Ok(merge(a, b)))
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use std::collections::HashSet;

    #[test]
    fn skeletons_small_caps() {
        assert!(skeletons(1).is_empty());
        let s2 = skeletons(2);
        assert_eq!(s2, vec![vec![DynkinType::TildeA(1)]]);
        let s3 = skeletons(3);
        assert_eq!(
            s3,
            vec![
                vec![DynkinType::TildeA(1)],
                vec![DynkinType::A(1), DynkinType::TildeA(1)],
                vec![DynkinType::TildeA(2)],
            ]
        );
    }

    #[test]
    fn affine_a1_colorings_at_d1() {
        // (0,0) is inadmissible on the doubled edge; (0,1) ~ (1,0).
        let cols = part_colorings(DynkinType::TildeA(1), 1);
        assert_eq!(cols, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn parabolic_stream_is_parabolic_and_duplicate_free() {
        let cfg = SearchConfig::new(1, 4);
        let out = enumerate_parabolic(&cfg).unwrap();
        assert!(out.exhausted);
        assert!(!out.graphs.is_empty());
        let mut seen = HashSet::new();
        for g in &out.graphs {
            assert_eq!(g.classify(), GraphClass::Parabolic);
            assert!(g.admissible(1).is_admissible());
            assert!(seen.insert(g.to_json()), "duplicate: {}", g.to_json());
        }
    }

    #[test]
    fn parabolic_stream_has_no_isomorphic_duplicates_small() {
        let cfg = SearchConfig::new(1, 3);
        let out = enumerate_parabolic(&cfg).unwrap();
        for (i, a) in out.graphs.iter().enumerate() {
            for b in out.graphs.iter().skip(i + 1) {
                assert!(
                    !(iso_key(a) == iso_key(b) && colored_isomorphic(a, b)),
                    "isomorphic duplicates: {} and {}",
                    a.to_json(),
                    b.to_json()
                );
            }
        }
    }

    #[test]
    fn max_vertices_one_is_empty() {
        let cfg = SearchConfig::new(1, 1);
        let out = enumerate_parabolic(&cfg).unwrap();
        assert!(out.graphs.is_empty());
        assert!(out.exhausted);
        let cert = effective_bound(&cfg).unwrap();
        assert!(cert.max_square.is_none());
        assert!(cert.exhausted);
    }

    #[test]
    fn extensions_are_hyperbolic_and_deduplicated() {
        let cfg = SearchConfig::new(1, 2);
        let parabolic = enumerate_parabolic(&cfg).unwrap();
        for g0 in &parabolic.graphs {
            let exts = extend_hyperbolic(g0, &cfg).unwrap();
            let mut seen = HashSet::new();
            for e in &exts {
                assert_eq!(e.classify(), GraphClass::Hyperbolic);
                assert!(seen.insert(e.to_json()));
            }
            for (i, a) in exts.iter().enumerate() {
                for b in exts.iter().skip(i + 1) {
                    assert!(!colored_isomorphic(a, b));
                }
            }
        }
    }

    #[test]
    fn extend_requires_parabolic() {
        let cfg = SearchConfig::new(1, 3);
        let g = crate::fano::ColoredGraph::new(
            1,
            vec![Vertex {
                id: "x".into(),
                color: 0,
                square: -2,
            }],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            extend_hyperbolic(&g, &cfg),
            Err(Error::NotParabolic)
        ));
    }

    #[test]
    fn worked_triple_appears_as_extension() {
        // The affine A1 pair with colors (1,1) extended by a color-1
        // vertex meeting both base vertices once.
        let cfg = SearchConfig::new(1, 2);
        let parabolic = enumerate_parabolic(&cfg).unwrap();
        let base = parabolic
            .graphs
            .iter()
            .find(|g| g.colors() == vec![1, 1])
            .expect("the (1,1)-colored affine A1 pair is enumerated");
        let exts = extend_hyperbolic(base, &cfg).unwrap();
        let target_square = BigRat::from(BigInt::from(4));
        assert!(exts
            .iter()
            .any(|e| polarize::polarization_square(e) == Some(target_square.clone())));
    }

    #[test]
    fn bound_matches_brute_force_oracle_at_cap_two() {
        // Independent oracle: enumerate all <=3-vertex all-(-2) colored
        // graphs directly, keep the admissible hyperbolic ones containing
        // a 2-vertex parabolic subgraph, and maximize the polarization
        // square.
        let cfg = SearchConfig::new(1, 2);
        let cert = effective_bound(&cfg).unwrap();
        let mut oracle: Option<BigRat> = None;
        for c1 in 0..=1u32 {
            for c2 in 0..=1u32 {
                for c3 in 0..=1u32 {
                    for m12 in 0..=2u32 {
                        for m13 in 0..=2u32 {
                            for m23 in 0..=2u32 {
                                let mut edges = Vec::new();
                                for (a, b, m) in
                                    [("a", "b", m12), ("a", "c", m13), ("b", "c", m23)]
                                {
                                    if m > 0 {
                                        edges.push(Edge {
                                            a: a.into(),
                                            b: b.into(),
                                            m,
                                        });
                                    }
                                }
                                let g = crate::fano::ColoredGraph::new(
                                    1,
                                    vec![
                                        Vertex {
                                            id: "a".into(),
                                            color: c1,
                                            square: -2,
                                        },
                                        Vertex {
                                            id: "b".into(),
                                            color: c2,
                                            square: -2,
                                        },
                                        Vertex {
                                            id: "c".into(),
                                            color: c3,
                                            square: -2,
                                        },
                                    ],
                                    edges,
                                )
                                .unwrap();
                                if g.classify() != GraphClass::Hyperbolic {
                                    continue;
                                }
                                if !g.admissible(1).is_admissible() {
                                    continue;
                                }
                                // Must contain a parabolic 2-subset (the
                                // enumerated parabolic part).
                                let gram = g.gram();
                                let has_parabolic_pair = [[0, 1], [0, 2], [1, 2]]
                                    .iter()
                                    .any(|pair| {
                                        let sig = gram.restrict(pair).signature();
                                        sig.n_plus == 0 && sig.n_zero >= 1
                                    });
                                if !has_parabolic_pair {
                                    continue;
                                }
                                if let Some(sq) = polarize::polarization_square(&g) {
                                    oracle = match oracle {
                                        None => Some(sq),
                                        Some(best) => Some(best.max(sq)),
                                    };
                                }
                            }
                        }
                    }
                }
            }
        }
        let got = cert.max_square.map(|s| BigRat::from_str(&s).unwrap());
        assert_eq!(got, oracle);
    }

    #[test]
    fn certificates_are_deterministic_across_worker_counts() {
        let mut cfg = SearchConfig::new(1, 3);
        let mut outputs = Vec::new();
        for workers in [1usize, 2, 4] {
            cfg.parallelism = workers;
            let cert = effective_bound(&cfg).unwrap();
            outputs.push(serde_json::to_string(&cert).unwrap());
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[1], outputs[2]);
    }

    #[test]
    fn node_limit_yields_partial_certificate() {
        let mut cfg = SearchConfig::new(1, 3);
        cfg.node_limit = Some(3);
        let cert = effective_bound(&cfg).unwrap();
        assert!(!cert.exhausted);
        assert!(cert.nodes_explored <= 3);
        // Partial runs are still deterministic.
        let again = effective_bound(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&cert).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn checkpoint_resume_is_exact() {
        let cfg = SearchConfig::new(1, 3);
        let full = effective_bound(&cfg).unwrap();

        // Interrupt after the first chunk, then resume.
        let mut first: Option<Checkpoint> = None;
        struct StopEarly;
        let result = effective_bound_resumable(&cfg, None, |cp| {
            first = Some(cp.clone());
            Err(Error::InvalidInput("stop".into()))
        });
        assert!(result.is_err());
        let _ = StopEarly;
        let cp = first.expect("one chunk was saved");
        assert!(cp.units_done > 0);
        let resumed = effective_bound_resumable(&cfg, Some(cp), |_| Ok(())).unwrap();
        assert_eq!(
            serde_json::to_string(&full).unwrap(),
            serde_json::to_string(&resumed).unwrap()
        );
    }

    #[test]
    fn max_square_monotone_in_caps() {
        let mut prev: Option<BigRat> = None;
        for k in 2..=4 {
            let cfg = SearchConfig::new(1, k);
            let cert = effective_bound(&cfg).unwrap();
            let sq = cert.max_square.map(|s| BigRat::from_str(&s).unwrap());
            if let (Some(p), Some(s)) = (&prev, &sq) {
                assert!(s >= p, "max square decreased from {p} to {s} at cap {k}");
            }
            if sq.is_some() {
                prev = sq;
            }
        }
    }
}
