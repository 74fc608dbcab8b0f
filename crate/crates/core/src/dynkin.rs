//! Catalog and recognition of ADE Dynkin diagrams and their extended
//! (affine) versions, including kernel mark vectors and diagram
//! automorphism groups.
//!
//! Vertex numbering is fixed once and for all by [`DynkinType::edges`], so
//! Gram matrices, mark vectors and automorphisms are reproducible.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::exact::SymmetricForm;
use crate::{Error, Result};

/// A simply-laced Dynkin diagram (`A`, `D`, `E`) or an extended one
/// (`Ã`, `D̃`, `Ẽ`). The parameter is the rank of the root system; an
/// extended diagram on rank `n` has `n + 1` vertices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum DynkinType {
    A(u32),
    D(u32),
    E(u32),
    TildeA(u32),
    TildeD(u32),
    TildeE(u32),
}

use DynkinType::*;

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            A(n) => write!(f, "A{n}"),
            D(n) => write!(f, "D{n}"),
            E(n) => write!(f, "E{n}"),
            TildeA(n) => write!(f, "~A{n}"),
            TildeD(n) => write!(f, "~D{n}"),
            TildeE(n) => write!(f, "~E{n}"),
        }
    }
}

impl DynkinType {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            A(n) | TildeA(n) => n >= 1,
            D(n) | TildeD(n) => n >= 4,
            E(n) | TildeE(n) => (6..=8).contains(&n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid rank for {self}")))
        }
    }

    /// Rank of the root system.
    pub fn rank(&self) -> usize {
        match *self {
            A(n) | D(n) | E(n) | TildeA(n) | TildeD(n) | TildeE(n) => n as usize,
        }
    }

    pub fn is_extended(&self) -> bool {
        matches!(self, TildeA(_) | TildeD(_) | TildeE(_))
    }

    /// Number of diagram vertices (`rank` for ADE, `rank + 1` extended).
    pub fn vertices(&self) -> usize {
        self.rank() + usize::from(self.is_extended())
    }

    /// Diagram edges `(i, j, multiplicity)` in the fixed vertex numbering.
    ///
    /// `A_n` is the path `0-1-…-(n-1)`; `D_n` appends the fork `n-2`, `n-1`
    /// at vertex `n-3`; `E_n` is the path `0-…-(n-2)` with the branch
    /// vertex `n-1` attached at `2`. Extended diagrams append the affine
    /// vertex: the cycle closure for `Ã_n` (a doubled edge for `Ã₁`), a
    /// second fork at vertex `1` for `D̃_n`, and the arm extensions for
    /// `Ẽ₆`, `Ẽ₇`, `Ẽ₈`.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let path = |k: usize| -> Vec<(usize, usize, u32)> {
            (0..k.saturating_sub(1)).map(|i| (i, i + 1, 1)).collect()
        };
        match *self {
            A(n) => path(n as usize),
            D(n) => {
                let n = n as usize;
                let mut e = path(n - 2);
                e.push((n - 3, n - 2, 1));
                e.push((n - 3, n - 1, 1));
                e
            }
            E(n) => {
                let n = n as usize;
                let mut e = path(n - 1);
                e.push((2, n - 1, 1));
                e
            }
            TildeA(1) => vec![(0, 1, 2)],
            TildeA(n) => {
                let n = n as usize;
                let mut e = path(n + 1);
                e.push((n, 0, 1));
                e
            }
            TildeD(n) => {
                let mut e = D(n).edges();
                e.push((1, n as usize, 1));
                e
            }
            TildeE(6) => {
                let mut e = E(6).edges();
                e.push((5, 6, 1));
                e
            }
            TildeE(7) => {
                let mut e = E(7).edges();
                e.push((0, 7, 1));
                e
            }
            TildeE(8) => {
                let mut e = E(8).edges();
                e.push((6, 8, 1));
                e
            }
            TildeE(_) => unreachable!("validated rank"),
        }
    }

    /// Gram matrix: `-2` on the diagonal, edge multiplicities off it.
    pub fn gram(&self) -> Result<SymmetricForm> {
        self.validate()?;
        let v = self.vertices();
        let mut g = SymmetricForm::zero(v);
        for i in 0..v {
            g.set_entry(i, i, BigInt::from(-2));
        }
        for (a, b, m) in self.edges() {
            g.set_entry(a, b, BigInt::from(m));
        }
        Ok(g)
    }

    /// The minimal positive integral kernel vector of an extended diagram.
    pub fn mark_vector(&self) -> Result<Vec<BigInt>> {
        if !self.is_extended() {
            return Err(Error::InvalidInput(format!("{self} has no mark vector")));
        }
        let kernel = self.gram()?.kernel_basis();
        if kernel.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "{self}: kernel dimension {} != 1",
                kernel.len()
            )));
        }
        let marks = kernel.into_iter().next().unwrap();
        if marks.iter().any(|m| !m.is_positive()) {
            return Err(Error::InvalidInput(format!("{self}: marks not positive")));
        }
        Ok(marks)
    }

    /// All diagram automorphisms, as vertex permutations (image vectors).
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let v = self.vertices();
        let mut adj = vec![vec![0u32; v]; v];
        for (a, b, m) in self.edges() {
            adj[a][b] = m;
            adj[b][a] = m;
        }
        graph_automorphisms(&adj)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

/// Automorphism group of a small multigraph by backtracking on degree- and
/// adjacency-consistent images.
pub(crate) fn graph_automorphisms(adj: &[Vec<u32>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let deg: Vec<u64> = adj
        .iter()
        .map(|row| row.iter().map(|&m| m as u64).sum())
        .collect();
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        k: usize,
        n: usize,
        adj: &[Vec<u32>],
        deg: &[u64],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == n {
            out.push(image.clone());
            return;
        }
        for cand in 0..n {
            if used[cand] || deg[cand] != deg[k] {
                continue;
            }
            let consistent = (0..k).all(|prev| adj[k][prev] == adj[cand][image[prev]]);
            if !consistent {
                continue;
            }
            image[k] = cand;
            used[cand] = true;
            rec(k + 1, n, adj, deg, image, used, out);
            used[cand] = false;
            image[k] = usize::MAX;
        }
    }
    rec(0, n, adj, &deg, &mut image, &mut used, &mut out);
    out
}

/// Recognize a connected simply-laced (possibly doubled-edge) graph with all
/// squares `-2` as an ADE or extended Dynkin diagram.
///
/// Identification uses the canonical invariants: signature, vertex count,
/// degree sequence and determinant. Returns `None` for anything else.
pub fn recognize(n: usize, edges: &[(usize, usize, u32)]) -> Option<DynkinType> {
    if n == 0 {
        return None;
    }
    let mut adj = vec![vec![0u32; n]; n];
    for &(a, b, m) in edges {
        if a >= n || b >= n || a == b || m == 0 {
            return None;
        }
        adj[a][b] = m;
        adj[b][a] = m;
    }
    // Connectivity.
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if adj[v][w] > 0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return None;
    }

    let has_multi = adj.iter().flatten().any(|&m| m >= 2);
    if has_multi {
        return if n == 2 && adj[0][1] == 2 {
            Some(TildeA(1))
        } else {
            None
        };
    }

    let candidate = recognize_simple(n, &adj)?;
    // Safety net: the invariants above determine the type at these sizes,
    // but verify the signature to reject impostors.
    let mut g = SymmetricForm::zero(n);
    for i in 0..n {
        g.set_entry(i, i, BigInt::from(-2));
        for j in 0..i {
            if adj[i][j] > 0 {
                g.set_entry(i, j, BigInt::from(adj[i][j]));
            }
        }
    }
    let sig = g.signature();
    let ok = if candidate.is_extended() {
        (sig.n_plus, sig.n_minus, sig.n_zero) == (0, n - 1, 1)
    } else {
        (sig.n_plus, sig.n_minus, sig.n_zero) == (0, n, 0)
    };
    ok.then_some(candidate)
}

fn recognize_simple(n: usize, adj: &[Vec<u32>]) -> Option<DynkinType> {
    let deg: Vec<usize> = adj
        .iter()
        .map(|row| row.iter().filter(|&&m| m > 0).count())
        .collect();
    let edge_count: usize = deg.iter().sum::<usize>() / 2;
    let max_deg = *deg.iter().max().unwrap();

    if edge_count == n && max_deg == 2 {
        // A single cycle.
        return (n >= 3).then_some(TildeA(n as u32 - 1));
    }
    if edge_count != n - 1 {
        return None;
    }
    // A tree.
    let branches: Vec<usize> = (0..n).filter(|&v| deg[v] >= 3).collect();
    match (max_deg, branches.len()) {
        (0..=2, 0) => Some(A(n as u32)),
        (3, 1) => {
            let arms = arm_lengths(adj, &deg, branches[0]);
            match (arms[0], arms[1], arms[2]) {
                (k, 1, 1) if k >= 1 => Some(D(n as u32)),
                (2, 2, 1) => Some(E(6)),
                (3, 2, 1) => Some(E(7)),
                (4, 2, 1) => Some(E(8)),
                (2, 2, 2) => Some(TildeE(6)),
                (3, 3, 1) => Some(TildeE(7)),
                (5, 2, 1) => Some(TildeE(8)),
                _ => None,
            }
        }
        (4, 1) if n == 5 => Some(TildeD(4)),
        (3, 2) => {
            // Two forks joined by a chain: check every non-branch vertex is
            // a leaf or a chain vertex.
            (n >= 6).then_some(TildeD(n as u32 - 1))
        }
        _ => None,
    }
}

/// Sorted (descending) arm lengths of a degree-3 tree vertex.
fn arm_lengths(adj: &[Vec<u32>], deg: &[usize], center: usize) -> Vec<usize> {
    let n = adj.len();
    let mut arms = Vec::new();
    for start in 0..n {
        if adj[center][start] == 0 {
            continue;
        }
        let mut len = 1;
        let mut prev = center;
        let mut cur = start;
        while deg[cur] == 2 {
            let next = (0..n)
                .find(|&w| adj[cur][w] > 0 && w != prev)
                .expect("degree-2 vertex has two neighbours");
            prev = cur;
            cur = next;
            len += 1;
        }
        arms.push(len);
    }
    arms.sort_unstable_by(|a, b| b.cmp(a));
    arms
}

/// All ADE diagrams of rank at most `max_rank`.
pub fn ade_catalog(max_rank: usize) -> Vec<DynkinType> {
    let mut out = Vec::new();
    for n in 1..=max_rank {
        out.push(A(n as u32));
    }
    for n in 4..=max_rank {
        out.push(D(n as u32));
    }
    for n in 6..=8.min(max_rank) {
        out.push(E(n as u32));
    }
    out.retain(|t| t.rank() <= max_rank);
    out.sort();
    out
}

/// All extended diagrams with at most `max_vertices` vertices.
pub fn enumerate_extended(max_vertices: usize) -> Vec<DynkinType> {
    let mut out = Vec::new();
    let mut n = 1;
    while (TildeA(n)).vertices() <= max_vertices {
        out.push(TildeA(n));
        n += 1;
    }
    let mut n = 4;
    while (TildeD(n)).vertices() <= max_vertices {
        out.push(TildeD(n));
        n += 1;
    }
    for n in 6..=8 {
        if (TildeE(n)).vertices() <= max_vertices {
            out.push(TildeE(n));
        }
    }
    out.sort();
    out
}

/// All orthogonal sums of ADE diagrams of total rank at most `max_rank`,
/// as sorted multisets, in lexicographic order.
pub fn enumerate_ade(max_rank: usize) -> Vec<Vec<DynkinType>> {
    let catalog = ade_catalog(max_rank);
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        catalog: &[DynkinType],
        from: usize,
        remaining: usize,
        current: &mut Vec<DynkinType>,
        out: &mut Vec<Vec<DynkinType>>,
    ) {
        for (idx, t) in catalog.iter().enumerate().skip(from) {
            if t.rank() > remaining {
                continue;
            }
            current.push(*t);
            out.push(current.clone());
            rec(catalog, idx, remaining - t.rank(), current, out);
            current.pop();
        }
    }
    rec(&catalog, 0, max_rank, &mut current, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Zero;

    #[test]
    fn gram_a2() {
        let g = A(2).gram().unwrap();
        assert_eq!(g.entry(0, 0), &BigInt::from(-2));
        assert_eq!(g.entry(0, 1), &BigInt::from(1));
    }

    #[test]
    fn gram_tilde_a1_doubled_edge() {
        let g = TildeA(1).gram().unwrap();
        assert_eq!(g.entry(0, 1), &BigInt::from(2));
        let sig = g.signature();
        assert_eq!((sig.n_plus, sig.n_minus, sig.n_zero), (0, 1, 1));
    }

    #[test]
    fn tilde_d4_marks() {
        let marks = TildeD(4).mark_vector().unwrap();
        let mut sorted: Vec<i64> = marks.iter().map(|m| m.try_into().unwrap()).collect();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 1, 1, 1, 2]);
        // Vertex 1 is the star centre in the fixed numbering.
        assert_eq!(marks[1], BigInt::from(2));
    }

    #[test]
    fn recognize_paths_cycles_and_rejects() {
        assert_eq!(recognize(3, &[(0, 1, 1), (1, 2, 1)]), Some(A(3)));
        assert_eq!(
            recognize(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]),
            Some(TildeA(3))
        );
        // Triangle with a pendant vertex: neither definite nor corank one.
        assert_eq!(
            recognize(4, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 3, 1)]),
            None
        );
        assert_eq!(recognize(2, &[(0, 1, 2)]), Some(TildeA(1)));
        assert_eq!(recognize(2, &[(0, 1, 3)]), None);
    }

    #[test]
    fn recognize_round_trips_catalog() {
        let mut types: Vec<DynkinType> = ade_catalog(21);
        types.extend(enumerate_extended(24));
        for t in types {
            let got = recognize(t.vertices(), &t.edges());
            assert_eq!(got, Some(t), "round trip failed for {t}");
        }
    }

    #[test]
    fn determinants_match_root_lattice_theory() {
        for n in 1..=12u32 {
            let det = A(n).gram().unwrap().determinant();
            let expect = BigInt::from(if n % 2 == 0 { n as i64 + 1 } else { -(n as i64) - 1 });
            assert_eq!(det, expect, "A{n}");
        }
        for n in 4..=12u32 {
            let det = D(n).gram().unwrap().determinant();
            let expect = BigInt::from(if n % 2 == 0 { 4 } else { -4 });
            assert_eq!(det, expect, "D{n}");
        }
        assert_eq!(E(6).gram().unwrap().determinant(), BigInt::from(3));
        assert_eq!(E(7).gram().unwrap().determinant(), BigInt::from(-2));
        assert_eq!(E(8).gram().unwrap().determinant(), BigInt::from(1));
    }

    #[test]
    fn marks_span_kernel_for_all_extended() {
        for t in enumerate_extended(24) {
            let g = t.gram().unwrap();
            let marks = t.mark_vector().unwrap();
            assert!(g.apply(&marks).unwrap().iter().all(|x| x.is_zero()), "{t}");
            assert!(marks.iter().all(|m| m >= &BigInt::from(1)), "{t}");
        }
    }

    #[test]
    fn enumerate_ade_small_counts() {
        assert!(enumerate_ade(0).is_empty());
        let sums = enumerate_ade(2);
        assert_eq!(
            sums,
            vec![vec![A(1)], vec![A(1), A(1)], vec![A(2)]],
        );
    }

    #[test]
    fn enumerate_extended_small() {
        assert_eq!(
            enumerate_extended(4),
            vec![TildeA(1), TildeA(2), TildeA(3)]
        );
    }

    #[test]
    fn automorphism_group_orders() {
        let cases = [
            (A(1), 1),
            (A(5), 2),
            (D(4), 6),
            (D(6), 2),
            (E(6), 2),
            (E(7), 1),
            (E(8), 1),
            (TildeA(1), 2),
            (TildeA(4), 10),
            (TildeD(4), 24),
            (TildeD(6), 8),
            (TildeE(6), 6),
            (TildeE(7), 2),
            (TildeE(8), 1),
        ];
        for (t, order) in cases {
            assert_eq!(t.automorphisms().len(), order, "{t}");
        }
    }
}
