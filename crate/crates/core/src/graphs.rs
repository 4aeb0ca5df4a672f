//! Simple undirected graphs, the named families used throughout the crate,
//! and the lexicographic product `G[H]`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
///
/// Keeps both the sorted edge list and per-vertex sorted neighbor lists;
/// weight evaluation walks the neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Each edge may be given in either
    /// orientation; loops, repeated edges and out-of-range endpoints are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Structural(format!(
                    "edge {u}-{v} out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::Structural(format!("loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Structural(format!(
                "repeated edge {}-{}",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_edges(n, normalized))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// `Some(r)` if every vertex has degree `r`. The empty graph on zero
    /// vertices has no degree and returns `None`.
    pub fn regular_degree(&self) -> Option<usize> {
        let first = self.adj.first()?.len();
        self.adj.iter().all(|l| l.len() == first).then_some(first)
    }

    /// `Some(c)` with `c` in `[0, modulus)` when all degrees agree modulo
    /// `modulus`.
    pub fn degree_class(&self, modulus: usize) -> Option<usize> {
        assert!(modulus >= 1, "modulus must be positive");
        let mut classes = self.adj.iter().map(|l| l.len() % modulus);
        match classes.next() {
            None => Some(0),
            Some(c) => classes.all(|d| d == c).then_some(c),
        }
    }

    pub fn is_eulerian(&self) -> bool {
        self.adj.iter().all(|l| l.len() % 2 == 0)
    }

    /// Writes the edge-list text format: a header `n <count>` followed by
    /// one sorted `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list text format. The `n <count>` header is optional;
    /// without it the vertex count is one more than the largest endpoint.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || {
                Error::Parse(format!(
                    "line {}: expected \"u v\" or \"n <count>\", got {line:?}",
                    lineno + 1
                ))
            };
            match fields.as_slice() {
                ["n", count] => {
                    if declared.is_some() || !edges.is_empty() {
                        return Err(Error::Parse(format!(
                            "line {}: header must come first and appear once",
                            lineno + 1
                        )));
                    }
                    declared = Some(count.parse::<usize>().map_err(|_| bad())?);
                }
                [u, v] => {
                    let u = u.parse::<usize>().map_err(|_| bad())?;
                    let v = v.parse::<usize>().map_err(|_| bad())?;
                    edges.push((u, v));
                }
                _ => return Err(bad()),
            }
        }
        let n =
            declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Self::new(n, edges)
    }
}

/// `C_n`, vertices in cycle order.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Argument(format!(
            "cycle needs at least 3 vertices, got {n}"
        )));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// `K_{m,n}`: part A is `0..m`, part B is `m..m+n`.
pub fn complete_bipartite(m: usize, n: usize) -> Result<Graph> {
    if m == 0 || n == 0 {
        return Err(Error::Argument(format!(
            "complete bipartite graph needs nonempty parts, got K_{{{m},{n}}}"
        )));
    }
    Graph::new(m + n, (0..m).flat_map(|a| (m..m + n).map(move |b| (a, b))))
}

pub fn complete(n: usize) -> Result<Graph> {
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Complete multipartite graph; parts occupy consecutive index ranges.
pub fn complete_multipartite(parts: &[usize]) -> Result<Graph> {
    let mut part_of = Vec::new();
    for (p, &size) in parts.iter().enumerate() {
        part_of.extend(std::iter::repeat_n(p, size));
    }
    let n = part_of.len();
    let part_of = &part_of;
    Graph::new(
        n,
        (0..n).flat_map(|u| {
            (u + 1..n)
                .filter(move |&v| part_of[u] != part_of[v])
                .map(move |v| (u, v))
        }),
    )
}

/// Circulant graph on `Z_n`: `u ~ v` iff `u - v = +-j` for some jump `j`.
pub fn circulant(n: usize, jumps: &[usize]) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for &j in jumps {
            let j = j % n;
            if j == 0 {
                return Err(Error::Argument(
                    "circulant jump must be nonzero mod n".into(),
                ));
            }
            let v = (u + j) % n;
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, edges)
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::new(10, outer.chain(spokes).chain(inner).collect::<Vec<_>>())
        .expect("petersen edges are valid")
}

/// Dutch windmill `D_m^t`: `t` copies of `C_m` sharing one vertex.
///
/// Vertex 0 is the shared vertex `c`. Copy `i` occupies the next `m - 1`
/// indices `(m-1)i + 1 ..= (m-1)(i+1)` in cycle order, so for `m = 4` copy
/// `i` is the cycle `c, 3i+1, 3i+2, 3i+3, c`.
pub fn dutch_windmill(m: usize, t: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::Argument(format!(
            "windmill cycles need length at least 3, got {m}"
        )));
    }
    if t < 2 {
        return Err(Error::Argument(format!(
            "windmill needs at least 2 copies, got {t}"
        )));
    }
    let n = 1 + (m - 1) * t;
    let mut edges = Vec::with_capacity(m * t);
    for i in 0..t {
        let base = (m - 1) * i;
        let mut prev = 0;
        for k in 1..m {
            edges.push((prev, base + k));
            prev = base + k;
        }
        edges.push((prev, 0));
    }
    Graph::new(n, edges)
}

/// Lexicographic product `outer[inner]`.
///
/// Vertex `j` of the copy replacing outer vertex `i` gets index
/// `i * |inner| + j`. Each copy carries the inner edges, and copies of
/// adjacent outer vertices are completely joined.
pub fn lexicographic_product(outer: &Graph, inner: &Graph) -> Graph {
    let k = inner.order();
    let mut edges = Vec::with_capacity(outer.order() * inner.size() + outer.size() * k * k);
    for i in 0..outer.order() {
        edges.extend(inner.edges().iter().map(|&(a, b)| (i * k + a, i * k + b)));
    }
    for &(i1, i2) in outer.edges() {
        for a in 0..k {
            for b in 0..k {
                let (u, v) = (i1 * k + a, i2 * k + b);
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    edges.sort_unstable();
    Graph::from_sorted_edges(outer.order() * k, edges)
}

/// Splits `n >= 1` as `2^p * odd`, returning `(p, odd)`.
pub fn two_adic_valuation(n: u64) -> (u32, u64) {
    assert!(n >= 1, "two-adic valuation of 0 is undefined");
    let p = n.trailing_zeros();
    (p, n >> p)
}
