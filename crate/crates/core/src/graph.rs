//! Simple directed/undirected graphs and the label-independent constants the
//! permutation-null moments depend on.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use serde::Serialize;

use crate::{Error, Result};

/// Smallest graph the null-moment formulas accept; they divide by `N - 3`.
pub const MIN_NODES: usize = 4;

/// An immutable simple graph on nodes `0..N`.
///
/// Undirected edges are stored once as `(min, max)`; for undirected graphs the
/// in- and out-neighbour lists coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, silently dropping duplicate edges.
    ///
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, directed: bool, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Ok(Self::with_duplicates(n, directed, edges)?.0)
    }

    /// Like [`Graph::new`], also returning how many duplicates were dropped.
    pub fn with_duplicates(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Self, usize)> {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut duplicates = 0;
        for (u, v) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, nodes: n });
                }
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop on node {u}")));
            }
            let e = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if seen.insert(e) {
                kept.push(e);
            } else {
                duplicates += 1;
            }
        }
        Ok((Self::from_canonical(n, directed, kept), duplicates))
    }

    fn from_canonical(n: usize, directed: bool, edges: Vec<(usize, usize)>) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adj[u].push(v);
            if directed {
                in_adj[v].push(u);
            } else {
                out_adj[v].push(u);
            }
        }
        if !directed {
            in_adj = Vec::new();
        }
        Graph { n, directed, edges, out_adj, in_adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// `|G|` for directed graphs (ordered edges), `|G̈|` for undirected ones.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        if self.directed {
            &self.in_adj[i]
        } else {
            &self.out_adj[i]
        }
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_neighbors(i).len()
    }

    /// Undirected degree; for directed graphs, in-degree plus out-degree.
    pub fn degree(&self, i: usize) -> usize {
        if self.directed {
            self.out_degree(i) + self.in_degree(i)
        } else {
            self.out_degree(i)
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let list = &self.out_adj[u];
        list.contains(&v)
    }

    /// Dense adjacency, `a[i][j] = 1` iff `(i, j)` is an edge (symmetric when undirected).
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for &(u, v) in &self.edges {
            a[u][v] = 1;
            if !self.directed {
                a[v][u] = 1;
            }
        }
        a
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: perm.len() });
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v]));
        Graph::new(self.n, self.directed, edges)
    }
}

/// A graph read from an edge list, with the original node tokens.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `node_ids[i]` is the token that was mapped to node `i`.
    pub node_ids: Vec<String>,
    pub duplicates: usize,
}

impl LoadedGraph {
    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.node_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
    }
}

/// Parses a whitespace-separated `u v` edge list without a size check.
///
/// Blank lines and lines starting with `#` are skipped. Node tokens get
/// indices in first-seen order.
pub fn parse_edge_list<R: BufRead>(source: R, directed: bool) -> Result<LoadedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut node_ids = Vec::new();
    let mut raw = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let [u, v] = tokens[..] else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected two node ids, found {} tokens", tokens.len()),
            });
        };
        if u == v {
            return Err(Error::SelfLoop { line: lineno, node: u.to_string() });
        }
        let mut intern = |tok: &str| {
            *ids.entry(tok.to_string()).or_insert_with(|| {
                node_ids.push(tok.to_string());
                node_ids.len() - 1
            })
        };
        let (a, b) = (intern(u), intern(v));
        raw.push((a, b));
    }
    let (graph, duplicates) = Graph::with_duplicates(node_ids.len(), directed, raw)?;
    Ok(LoadedGraph { graph, node_ids, duplicates })
}

/// Parses an edge list and requires at least [`MIN_NODES`] distinct nodes.
pub fn load_edge_list<R: BufRead>(source: R, directed: bool) -> Result<LoadedGraph> {
    let loaded = parse_edge_list(source, directed)?;
    let nodes = loaded.graph.node_count();
    if nodes < MIN_NODES {
        return Err(Error::GraphTooSmall { nodes, min: MIN_NODES });
    }
    Ok(loaded)
}

/// Label-independent graph quantities entering the null variances.
///
/// * `g_size`: number of edges (ordered pairs when directed).
/// * `q1`: directed only, the number of edges whose reverse is also present.
/// * `q2`: number of ordered pairs of distinct edges that share no endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphConstants {
    pub directed: bool,
    pub nodes: usize,
    pub g_size: u64,
    pub q1: u64,
    pub q2: i64,
}

impl GraphConstants {
    pub fn of(g: &Graph) -> Self {
        let g_size = g.edge_count() as u64;
        let gs = g_size as i64;
        if !g.is_directed() {
            let wedge: i64 = (0..g.node_count())
                .map(|i| {
                    let k = g.degree(i) as i64;
                    k * (k - 1)
                })
                .sum();
            return GraphConstants { directed: false, nodes: g.node_count(), g_size, q1: 0, q2: gs * gs - gs - wedge };
        }

        let q1 = g.edges().iter().filter(|&&(u, v)| g.has_edge(v, u)).count() as u64;
        let mut through = 0i64;
        let mut fan_out = 0i64;
        let mut fan_in = 0i64;
        for i in 0..g.node_count() {
            let kout = g.out_degree(i) as i64;
            let kin = g.in_degree(i) as i64;
            through += kin * kout;
            fan_out += kout * (kout - 1);
            fan_in += kin * (kin - 1);
        }
        // Chains j->i->v with v != j; reciprocal pairs are the v == j cases.
        let chains = through - q1 as i64;
        let q2 = gs * gs - gs - q1 as i64 - 2 * chains - fan_out - fan_in;
        GraphConstants { directed: true, nodes: g.node_count(), g_size, q1, q2 }
    }
}

pub fn graph_constants(g: &Graph) -> GraphConstants {
    GraphConstants::of(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, false, edges.iter().copied()).unwrap()
    }

    /// Ordered pairs of distinct edges sharing no endpoint, by enumeration.
    fn disjoint_pairs(g: &Graph) -> i64 {
        let e = g.edges();
        let mut count = 0;
        for (a, &(u, v)) in e.iter().enumerate() {
            for (b, &(x, y)) in e.iter().enumerate() {
                if a != b && u != x && u != y && v != x && v != y {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn parse_counts_nodes_and_edges() {
        let g = parse_edge_list("a b\nb c\n".as_bytes(), false).unwrap();
        assert_eq!(g.graph.node_count(), 3);
        assert_eq!(g.graph.edge_count(), 2);
        assert_eq!(g.node_ids, vec!["a", "b", "c"]);
    }

    #[test]
    fn load_rejects_tiny_graphs() {
        let err = load_edge_list("1 2\n2 1\n".as_bytes(), true).unwrap_err();
        assert_eq!(err, Error::GraphTooSmall { nodes: 2, min: 4 });
        assert!(load_edge_list("a b\nb c\n".as_bytes(), false).is_err());
    }

    #[test]
    fn load_dedups_and_counts() {
        let g = load_edge_list("1 2\n1 2\n2 3\n3 4\n".as_bytes(), false).unwrap();
        assert_eq!(g.graph.node_count(), 4);
        assert_eq!(g.graph.edge_count(), 3);
        assert_eq!(g.duplicates, 1);

        // the reverse of an undirected edge is the same edge
        let g = load_edge_list("1 2\n2 1\n2 3\n3 4\n".as_bytes(), false).unwrap();
        assert_eq!(g.duplicates, 1);
        let g = load_edge_list("1 2\n2 1\n2 3\n3 4\n".as_bytes(), true).unwrap();
        assert_eq!(g.duplicates, 0);
        assert_eq!(g.graph.edge_count(), 4);
    }

    #[test]
    fn load_errors_name_the_line() {
        let err = load_edge_list("# header\n1 2\n3 3\n".as_bytes(), false).unwrap_err();
        assert_eq!(err, Error::SelfLoop { line: 3, node: "3".into() });
        let err = load_edge_list("1 2\n\n1 2 3\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = load_edge_list("1\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn degree_sums() {
        let g = Graph::new(4, true, [(0, 1), (1, 0), (0, 2), (3, 2)]).unwrap();
        let out: usize = (0..4).map(|i| g.out_degree(i)).sum();
        let inn: usize = (0..4).map(|i| g.in_degree(i)).sum();
        assert_eq!(out, 4);
        assert_eq!(inn, 4);
        let u = undirected(4, &[(0, 1), (1, 2), (2, 3)]);
        let total: usize = (0..4).map(|i| u.degree(i)).sum();
        assert_eq!(total, 2 * u.edge_count());
    }

    #[test]
    fn undirected_constants() {
        let tri = GraphConstants::of(&undirected(4, &[(0, 1), (1, 2), (0, 2)]));
        assert_eq!((tri.g_size, tri.q2), (3, 0));
        let two = GraphConstants::of(&undirected(4, &[(0, 1), (2, 3)]));
        assert_eq!((two.g_size, two.q2), (2, 2));
        let path = undirected(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = GraphConstants::of(&path);
        assert_eq!((c.g_size, c.q2), (3, 2));
        assert_eq!(c.q2, disjoint_pairs(&path));
    }

    #[test]
    fn directed_constants() {
        let g = Graph::new(4, true, [(0, 1), (1, 0), (0, 2)]).unwrap();
        let c = GraphConstants::of(&g);
        assert_eq!(c.g_size, 3);
        assert_eq!(c.q1, 2);
        // no two of these edges avoid each other's endpoints
        assert_eq!(c.q2, 0);
        assert_eq!(c.q2, disjoint_pairs(&g));
    }

    #[test]
    fn q2_counts_disjoint_pairs_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let n = 4 + trial % 5;
            let directed = trial % 2 == 0;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && (directed || u < v) && rng.random_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, directed, edges).unwrap();
            let c = GraphConstants::of(&g);
            assert_eq!(c.q2, disjoint_pairs(&g), "trial {trial}");
            assert!(c.q1 <= c.g_size && c.q1.is_multiple_of(2));
        }
    }

    #[test]
    fn constants_survive_relabeling() {
        let g = Graph::new(6, true, [(0, 1), (1, 0), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]).unwrap();
        let perm = [3, 5, 0, 1, 4, 2];
        assert_eq!(GraphConstants::of(&g), GraphConstants::of(&g.permuted(&perm).unwrap()));
    }
}
