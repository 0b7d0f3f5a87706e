//! Longest simple paths in small undirected graphs.
//!
//! Depth-first search with three prunings: a reachability bound (a path can
//! only grow into unvisited vertices reachable from its tip), a memo of
//! `(tip, visited set)` states already expanded, and an early exit once a
//! Hamiltonian path of the component is found. Neighbours are tried in
//! Warnsdorff order (fewest onward moves first), which finds long paths early.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Maximum number of DFS node expansions per component.
    pub node_budget: u64,
    /// Stop as soon as a path with this many links is found.
    pub max_length: Option<usize>,
    /// Maximum number of memoised states per component.
    pub memo_cap: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            node_budget: 2_000_000,
            max_length: None,
            memo_cap: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathResult {
    /// Vertex ids in path order.
    pub path: Vec<usize>,
    /// True when the search stopped before proving `path` is longest.
    pub truncated: bool,
    pub expansions: u64,
}

impl PathResult {
    pub fn length(&self) -> usize {
        self.path.len().saturating_sub(1)
    }
}

/// Components as sorted vertex lists, ordered by smallest vertex.
pub fn connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Longest path in each component, in [`connected_components`] order.
pub fn longest_path_per_component(adj: &[Vec<usize>], limits: &SearchLimits) -> Vec<PathResult> {
    connected_components(adj)
        .par_iter()
        .map(|comp| longest_in_component(adj, comp, limits))
        .collect()
}

/// Longest path in the whole graph.
pub fn longest_path(adj: &[Vec<usize>], limits: &SearchLimits) -> PathResult {
    let mut comps = connected_components(adj);
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let mut best = PathResult {
        path: Vec::new(),
        truncated: false,
        expansions: 0,
    };
    let mut expansions = 0;
    let mut truncated = false;
    for comp in &comps {
        if comp.len().saturating_sub(1) <= best.length() && !best.path.is_empty() {
            break;
        }
        let r = longest_in_component(adj, comp, limits);
        expansions += r.expansions;
        truncated |= r.truncated;
        if r.path.len() > best.path.len() {
            best = r;
        }
        if limits.max_length.is_some_and(|cap| best.length() >= cap) {
            break;
        }
    }
    best.expansions = expansions;
    best.truncated = truncated;
    best
}

struct Local {
    adj: Vec<Vec<usize>>,
    words: usize,
}

impl Local {
    fn new(adj: &[Vec<usize>], comp: &[usize]) -> Self {
        let mut adj_local = Vec::with_capacity(comp.len());
        for &v in comp {
            let mut ns: Vec<usize> = adj[v]
                .iter()
                .filter_map(|u| comp.binary_search(u).ok())
                .collect();
            ns.sort_unstable();
            ns.dedup();
            adj_local.push(ns);
        }
        Self {
            adj: adj_local,
            words: comp.len().div_ceil(64),
        }
    }

    /// Upper bound on the number of vertices a path can still add after `tip`: the unvisited
    /// vertices reachable from `tip`, minus every pendant chain except the longest (the path
    /// can end inside at most one of them).
    fn extension_bound(&self, tip: usize, visited: &[u64], scratch: &mut Vec<u64>, queue: &mut Vec<usize>) -> usize {
        scratch.clear();
        scratch.extend_from_slice(visited);
        queue.clear();
        queue.push(tip);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &u in &self.adj[v] {
                if !test(scratch, u) {
                    set(scratch, u);
                    queue.push(u);
                }
            }
        }
        let region = &queue[1..];
        let inside = |u: usize| u == tip || (test(scratch, u) && !test(visited, u));
        let (total, longest) = self.pendant_chains(region, inside, Some(tip));
        region.len() - total + longest.first().copied().unwrap_or(0)
    }

    /// Total size of the pendant chains of `region` (leaf, then degree-2 vertices, stopping at
    /// `stop` or at a vertex of another degree) and the two longest chain sizes.
    fn pendant_chains(&self, region: &[usize], inside: impl Fn(usize) -> bool, stop: Option<usize>) -> (usize, Vec<usize>) {
        let deg = |v: usize| self.adj[v].iter().filter(|&&u| inside(u)).count();
        let mut total = 0;
        let mut top = vec![0usize, 0];
        for &leaf in region {
            if deg(leaf) != 1 {
                continue;
            }
            let (mut prev, mut cur, mut len) = (usize::MAX, leaf, 0);
            loop {
                len += 1;
                let next = self.adj[cur].iter().copied().find(|&u| u != prev && inside(u));
                match next {
                    Some(u) if Some(u) != stop && deg(u) == 2 => {
                        prev = cur;
                        cur = u;
                    }
                    Some(u) if Some(u) != stop && deg(u) == 1 => return (0, vec![0, 0]),
                    _ => break,
                }
            }
            total += len;
            if len > top[1] {
                top[1] = len;
                top.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        (total, top)
    }

    fn order(&self, v: usize, visited: &[u64]) -> Vec<usize> {
        let mut ns: Vec<(usize, usize)> = self.adj[v]
            .iter()
            .filter(|&&u| !test(visited, u))
            .map(|&u| (self.adj[u].iter().filter(|&&w| !test(visited, w)).count(), u))
            .collect();
        ns.sort_unstable();
        ns.into_iter().map(|(_, u)| u).collect()
    }
}

fn test(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn clear(bits: &mut [u64], i: usize) {
    bits[i / 64] &= !(1 << (i % 64));
}

fn longest_in_component(adj: &[Vec<usize>], comp: &[usize], limits: &SearchLimits) -> PathResult {
    let n = comp.len();
    if n <= 1 {
        return PathResult {
            path: comp.to_vec(),
            truncated: false,
            expansions: 0,
        };
    }
    let g = Local::new(adj, comp);
    // a path has two ends, so it meets at most two pendant chains
    let everything: Vec<usize> = (0..n).collect();
    let (total, top) = g.pendant_chains(&everything, |_| true, None);
    let target = n - total + top[0] + top[1] - 1;
    let cap = limits.max_length.map_or(target, |c| c.min(target));

    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| (g.adj[v].len(), v));

    let mut best: Vec<usize> = vec![0];
    let mut expansions = 0u64;
    let mut out_of_budget = false;
    let mut memo: HashSet<(usize, Vec<u64>)> = HashSet::new();
    let mut scratch = Vec::with_capacity(g.words);
    let mut queue = Vec::new();

    'starts: for &s in &starts {
        let mut visited = vec![0u64; g.words];
        set(&mut visited, s);
        let mut path = vec![s];
        let mut frames: Vec<(Vec<usize>, usize)> = vec![(g.order(s, &visited), 0)];
        while let Some((order, next)) = frames.last_mut() {
            if *next == order.len() {
                frames.pop();
                if let Some(v) = path.pop() {
                    clear(&mut visited, v);
                }
                continue;
            }
            let u = order[*next];
            *next += 1;
            if test(&visited, u) {
                continue;
            }
            expansions += 1;
            if expansions > limits.node_budget {
                out_of_budget = true;
                break 'starts;
            }
            set(&mut visited, u);
            path.push(u);
            let len = path.len() - 1;
            if len > best.len() - 1 {
                best = path.clone();
                if len >= cap {
                    break 'starts;
                }
            }
            let bound = len + g.extension_bound(u, &visited, &mut scratch, &mut queue);
            let key = (u, visited.clone());
            if bound <= best.len() - 1 || memo.contains(&key) {
                path.pop();
                clear(&mut visited, u);
                continue;
            }
            if memo.len() < limits.memo_cap {
                memo.insert(key);
            }
            frames.push((g.order(u, &visited), 0));
        }
    }
    let length = best.len() - 1;
    PathResult {
        path: best.into_iter().map(|v| comp[v]).collect(),
        truncated: length < target && (out_of_budget || length >= cap),
        expansions,
    }
}

/// Greedily extends `path` at both ends until no unvisited neighbour remains.
pub fn extend_to_maximal(adj: &[Vec<usize>], path: &mut Vec<usize>) {
    let mut on_path: HashSet<usize> = path.iter().copied().collect();
    for _ in 0..2 {
        while let Some(&tip) = path.last() {
            match adj[tip].iter().find(|u| !on_path.contains(u)) {
                Some(&u) => {
                    on_path.insert(u);
                    path.push(u);
                }
                None => break,
            }
        }
        path.reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn brute_force(adj: &[Vec<usize>]) -> usize {
        fn go(adj: &[Vec<usize>], v: usize, seen: &mut Vec<bool>, len: usize, best: &mut usize) {
            *best = (*best).max(len);
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    go(adj, u, seen, len + 1, best);
                    seen[u] = false;
                }
            }
        }
        let mut best = 0;
        for s in 0..adj.len() {
            let mut seen = vec![false; adj.len()];
            seen[s] = true;
            go(adj, s, &mut seen, 0, &mut best);
        }
        best
    }

    fn is_path(adj: &[Vec<usize>], p: &[usize]) -> bool {
        let distinct: HashSet<_> = p.iter().collect();
        distinct.len() == p.len() && p.windows(2).all(|w| adj[w[0]].contains(&w[1]))
    }

    #[test]
    fn star_and_path() {
        let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(longest_path(&star, &SearchLimits::default()).length(), 2);
        let line = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let r = longest_path(&line, &SearchLimits::default());
        assert_eq!(r.length(), 3);
        assert!(!r.truncated);
    }

    #[test]
    fn budget_truncation_is_reported() {
        let n = 12;
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let full = graph(n, &edges);
        let r = longest_path(&full, &SearchLimits { node_budget: 3, ..Default::default() });
        assert!(r.truncated);
        assert!(r.length() < n - 1);
        let capped = longest_path(&full, &SearchLimits { max_length: Some(4), ..Default::default() });
        assert_eq!(capped.length(), 4);
        assert!(capped.truncated);
    }

    #[test]
    fn extension_reaches_maximality() {
        let line = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let mut p = vec![2];
        extend_to_maximal(&line, &mut p);
        assert_eq!(p.len(), 5);
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..9, mask in any::<u64>()) {
            let mut edges = Vec::new();
            let mut bit = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if mask >> (bit % 64) & 1 == 1 {
                        edges.push((a, b));
                    }
                    bit += 1;
                }
            }
            let adj = graph(n, &edges);
            let r = longest_path(&adj, &SearchLimits::default());
            prop_assert!(!r.truncated);
            prop_assert!(is_path(&adj, &r.path));
            prop_assert_eq!(r.length(), brute_force(&adj));
        }
    }
}
