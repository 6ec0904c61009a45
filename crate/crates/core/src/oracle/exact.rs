//! Exact maximum matching on general graphs.
//!
//! Edmonds' blossom search grown from every free vertex at once; one phase
//! either finds an augmenting path between two trees or proves none exists.
//! Starting from a previous maximum matching of a graph one update away costs
//! at most two phases.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::OracleError;
use crate::rank::{EdgeKey, VertexId};

pub const DEFAULT_ORACLE_LIMIT: usize = 2000;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactMatchingResult {
    pub size: usize,
    /// Sorted matched edges.
    pub witness: Vec<EdgeKey>,
}

fn adjacency(n: usize, edges: &[EdgeKey]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.lo().index()].push(e.hi().index());
        adj[e.hi().index()].push(e.lo().index());
    }
    adj
}

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    root: Vec<usize>,
    even: Vec<bool>,
    in_blossom: Vec<bool>,
    lca_mark: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>], mate: Vec<usize>) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate,
            parent: vec![NONE; n],
            base: (0..n).collect(),
            root: vec![NONE; n],
            even: vec![false; n],
            in_blossom: vec![false; n],
            lca_mark: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.lca_mark.iter_mut().for_each(|m| *m = false);
        loop {
            a = self.base[a];
            self.lca_mark[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.lca_mark[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = self.mate[v];
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = child;
            child = m;
            v = self.parent[m];
        }
    }

    fn contract(&mut self, v: usize, u: usize) {
        let b = self.lca(v, u);
        self.in_blossom.iter_mut().for_each(|m| *m = false);
        self.mark_path(v, b, u);
        self.mark_path(u, b, v);
        let tree = self.root[v];
        for i in 0..self.adj.len() {
            if self.in_blossom[self.base[i]] {
                self.base[i] = b;
                if !self.even[i] {
                    self.even[i] = true;
                    self.root[i] = tree;
                    self.queue.push_back(i);
                }
            }
        }
    }

    /// Vertices from even `x` back to its tree root, in path order.
    fn walk(&self, x: usize) -> Vec<usize> {
        let mut out = vec![x];
        let mut w = x;
        while self.mate[w] != NONE {
            let m = self.mate[w];
            let y = self.parent[m];
            out.push(m);
            out.push(y);
            w = y;
        }
        out
    }

    /// One phase of the forest search. Returns an augmenting path (a vertex
    /// sequence between two free vertices) or `None` when the matching is
    /// maximum.
    fn search(&mut self) -> Option<Vec<usize>> {
        let n = self.adj.len();
        self.parent.iter_mut().for_each(|p| *p = NONE);
        self.even.iter_mut().for_each(|e| *e = false);
        for i in 0..n {
            self.base[i] = i;
            self.root[i] = NONE;
        }
        self.queue.clear();
        for v in 0..n {
            if self.mate[v] == NONE {
                self.even[v] = true;
                self.root[v] = v;
                self.queue.push_back(v);
            }
        }
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let u = self.adj[v][idx];
                if self.base[v] == self.base[u] || self.mate[v] == u {
                    continue;
                }
                if self.even[u] {
                    if self.root[u] != self.root[v] {
                        let mut path = self.walk(v);
                        path.reverse();
                        path.extend(self.walk(u));
                        return Some(path);
                    }
                    self.contract(v, u);
                } else if self.parent[u] == NONE {
                    self.parent[u] = v;
                    let m = self.mate[u];
                    self.even[m] = true;
                    self.root[m] = self.root[v];
                    self.queue.push_back(m);
                }
            }
        }
        None
    }

    fn augment(&mut self, path: &[usize]) {
        for pair in path.chunks(2) {
            self.mate[pair[0]] = pair[1];
            self.mate[pair[1]] = pair[0];
        }
    }
}

fn collect(mate: &[usize]) -> ExactMatchingResult {
    let witness: Vec<EdgeKey> = mate
        .iter()
        .enumerate()
        .filter(|&(v, &m)| m != NONE && v < m)
        .map(|(v, &m)| EdgeKey::of(v as u32, m as u32))
        .collect();
    ExactMatchingResult { size: witness.len(), witness }
}

fn check_limit(n: usize, limit: usize) -> Result<(), OracleError> {
    if n > limit {
        return Err(OracleError::Limit { n, limit });
    }
    Ok(())
}

/// Maximum matching of the graph on `n` vertices with the given edges.
pub fn max_matching_exact(n: usize, edges: &[EdgeKey]) -> Result<ExactMatchingResult, OracleError> {
    max_matching_warm(n, edges, &[], DEFAULT_ORACLE_LIMIT)
}

/// Maximum matching seeded with `warm`. Entries of `warm` that are absent from
/// `edges` or conflict with earlier entries are ignored; the remaining free
/// vertices are first matched greedily.
pub fn max_matching_warm(
    n: usize,
    edges: &[EdgeKey],
    warm: &[EdgeKey],
    limit: usize,
) -> Result<ExactMatchingResult, OracleError> {
    check_limit(n, limit)?;
    let adj = adjacency(n, edges);
    let mut mate = vec![NONE; n];
    let present: std::collections::HashSet<EdgeKey> = edges.iter().copied().collect();
    for e in warm {
        let (a, b) = (e.lo().index(), e.hi().index());
        if present.contains(e) && mate[a] == NONE && mate[b] == NONE {
            mate[a] = b;
            mate[b] = a;
        }
    }
    for e in edges {
        let (a, b) = (e.lo().index(), e.hi().index());
        if mate[a] == NONE && mate[b] == NONE {
            mate[a] = b;
            mate[b] = a;
        }
    }
    let mut search = Blossom::new(&adj, mate);
    while let Some(path) = search.search() {
        search.augment(&path);
    }
    Ok(collect(&search.mate))
}

/// An augmenting path for `matching` in the graph, as a vertex sequence.
pub fn augmenting_path(n: usize, edges: &[EdgeKey], matching: &[EdgeKey]) -> Option<Vec<VertexId>> {
    let adj = adjacency(n, edges);
    let mut mate = vec![NONE; n];
    for e in matching {
        mate[e.lo().index()] = e.hi().index();
        mate[e.hi().index()] = e.lo().index();
    }
    Blossom::new(&adj, mate)
        .search()
        .map(|p| p.into_iter().map(|v| VertexId(v as u32)).collect())
}

/// Hopcroft-Karp for bipartite inputs; `left[v]` marks one side.
pub fn max_matching_bipartite(
    n: usize,
    edges: &[EdgeKey],
    left: &[bool],
) -> Result<ExactMatchingResult, OracleError> {
    check_limit(n, DEFAULT_ORACLE_LIMIT)?;
    let adj = adjacency(n, edges);
    let mut mate = vec![NONE; n];
    let mut dist = vec![usize::MAX; n];
    loop {
        // Layer the left side from its free vertices.
        let mut queue = VecDeque::new();
        for v in 0..n {
            dist[v] = usize::MAX;
            if left[v] && mate[v] == NONE {
                dist[v] = 0;
                queue.push_back(v);
            }
        }
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                match mate[u] {
                    NONE => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for v in 0..n {
            if left[v] && mate[v] == NONE {
                hk_dfs(v, &adj, &mut mate, &mut dist);
            }
        }
    }
    Ok(collect(&mate))
}

fn hk_dfs(v: usize, adj: &[Vec<usize>], mate: &mut [usize], dist: &mut [usize]) -> bool {
    for i in 0..adj[v].len() {
        let u = adj[v][i];
        let w = mate[u];
        if w == NONE || (dist[w] == dist[v] + 1 && hk_dfs(w, adj, mate, dist)) {
            mate[v] = u;
            mate[u] = v;
            return true;
        }
    }
    dist[v] = usize::MAX;
    false
}
