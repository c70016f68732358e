//! Small simple graphs: connectivity, vertex deletion, diameter endpoints,
//! partition quotients and DOT export.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has fewer than two vertices")]
    TooSmall,
    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),
}

/// Outcome of a connectivity test. The empty graph is connected only
/// vacuously, and callers see that distinctly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Connected,
    Disconnected,
    Vacuous,
}

impl Connectivity {
    /// `true` for connected and vacuously connected graphs.
    pub fn holds(self) -> bool {
        !matches!(self, Connectivity::Disconnected)
    }
}

/// A simple undirected graph with labeled vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    labels: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(labels: Vec<String>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Graph {
            labels,
            edges: BTreeSet::new(),
        })
    }

    /// Vertices labeled `0..n`.
    pub fn with_vertices(n: usize) -> Self {
        Graph {
            labels: (0..n).map(|i| i.to_string()).collect(),
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::with_vertices(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Adds `{a, b}`; loops are ignored and repeated edges collapse.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        let n = self.len();
        for v in [a, b] {
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        if a != b {
            self.edges.insert((a.min(b), a.max(b)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn bfs(&self, adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> Connectivity {
        if self.is_empty() {
            return Connectivity::Vacuous;
        }
        let adj = self.adjacency();
        if self.bfs(&adj, 0).iter().all(Option::is_some) {
            Connectivity::Connected
        } else {
            Connectivity::Disconnected
        }
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut comp: Vec<usize> = self
                .bfs(&adj, s)
                .iter()
                .enumerate()
                .filter_map(|(v, d)| d.map(|_| v))
                .collect();
            for &v in &comp {
                seen[v] = true;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Removes `v` and its edges; later vertices shift down by one.
    pub fn delete_vertex(&self, v: usize) -> Result<Graph, GraphError> {
        if v >= self.len() {
            return Err(GraphError::UnknownVertex(v));
        }
        let shift = |u: usize| if u > v { u - 1 } else { u };
        let mut labels = self.labels.clone();
        labels.remove(v);
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (shift(a), shift(b)))
            .collect();
        Ok(Graph { labels, edges })
    }

    /// One endpoint of a pair at maximum distance. Among all such pairs the
    /// endpoint with the least label wins.
    pub fn diameter_endpoint(&self) -> Result<usize, GraphError> {
        if self.len() < 2 {
            return Err(GraphError::TooSmall);
        }
        let adj = self.adjacency();
        let mut best: Option<(usize, usize)> = None; // (distance, vertex)
        for v in 0..self.len() {
            let dist = self.bfs(&adj, v);
            let mut ecc = 0;
            for d in &dist {
                match d {
                    None => return Err(GraphError::Disconnected),
                    Some(d) => ecc = ecc.max(*d),
                }
            }
            best = match best {
                None => Some((ecc, v)),
                Some((bd, bv)) => {
                    if ecc > bd || (ecc == bd && self.labels[v] < self.labels[bv]) {
                        Some((ecc, v))
                    } else {
                        Some((bd, bv))
                    }
                }
            };
        }
        Ok(best.unwrap().1)
    }

    /// Collapses each part to one vertex; distinct parts are adjacent iff some
    /// edge crosses between them. Part `k` keeps the label of its least
    /// vertex.
    pub fn quotient_by_partition(&self, parts: &[Vec<usize>]) -> Result<Graph, GraphError> {
        let mut part_of = vec![usize::MAX; self.len()];
        for (k, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(GraphError::InvalidPartition("empty part"));
            }
            for &v in part {
                if v >= self.len() {
                    return Err(GraphError::UnknownVertex(v));
                }
                if part_of[v] != usize::MAX {
                    return Err(GraphError::InvalidPartition("overlapping parts"));
                }
                part_of[v] = k;
            }
        }
        if part_of.contains(&usize::MAX) {
            return Err(GraphError::InvalidPartition("parts do not cover all vertices"));
        }
        let labels = parts
            .iter()
            .map(|p| self.labels[*p.iter().min().unwrap()].clone())
            .collect();
        let mut q = Graph {
            labels,
            edges: BTreeSet::new(),
        };
        for &(a, b) in &self.edges {
            q.add_edge(part_of[a], part_of[b])?;
        }
        Ok(q)
    }

    /// Replaces all labels; they must stay unique.
    pub fn relabel(mut self, labels: Vec<String>) -> Result<Graph, GraphError> {
        if labels.len() != self.len() {
            return Err(GraphError::InvalidPartition("label count differs from vertex count"));
        }
        let fresh = Graph::new(labels)?;
        self.labels = fresh.labels;
        Ok(self)
    }

    /// Deterministic DOT text: vertices sorted by label, then edges sorted
    /// lexicographically by their (smaller, larger) label pair.
    pub fn to_dot(&self) -> String {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        let mut edges: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (la, lb) = (self.labels[a].as_str(), self.labels[b].as_str());
                if la <= lb {
                    (la, lb)
                } else {
                    (lb, la)
                }
            })
            .collect();
        edges.sort();
        let mut out = String::from("graph G {\n");
        for v in order {
            let _ = writeln!(out, "  \"{}\";", escape(&self.labels[v]));
        }
        for (a, b) in edges {
            let _ = writeln!(out, "  \"{}\" -- \"{}\";", escape(a), escape(b));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn star3() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut g = Graph::with_vertices(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b).unwrap();
            }
        }
        g
    }

    #[test]
    fn connectivity() {
        assert_eq!(path(3).is_connected(), Connectivity::Connected);
        assert_eq!(Graph::with_vertices(2).is_connected(), Connectivity::Disconnected);
        assert_eq!(Graph::with_vertices(0).is_connected(), Connectivity::Vacuous);
        assert!(Connectivity::Vacuous.holds());
        assert_eq!(Graph::with_vertices(1).is_connected(), Connectivity::Connected);
    }

    #[test]
    fn deletion() {
        let t = complete(3).delete_vertex(0).unwrap();
        assert_eq!((t.len(), t.edge_count()), (2, 1));
        let s = star3().delete_vertex(0).unwrap();
        assert_eq!((s.len(), s.edge_count()), (3, 0));
        let p = path(4).delete_vertex(0).unwrap();
        assert_eq!(p, path(4).delete_vertex(0).unwrap());
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(p.labels(), &["1", "2", "3"]);
        assert_eq!(path(2).delete_vertex(5), Err(GraphError::UnknownVertex(5)));
    }

    #[test]
    fn diameter_endpoints() {
        let v = path(4).diameter_endpoint().unwrap();
        assert!(v == 0 || v == 3);
        assert_eq!(complete(4).diameter_endpoint().unwrap(), 0);
        assert_ne!(star3().diameter_endpoint().unwrap(), 0);
        assert_eq!(
            Graph::with_vertices(2).diameter_endpoint(),
            Err(GraphError::Disconnected)
        );
        assert_eq!(Graph::with_vertices(1).diameter_endpoint(), Err(GraphError::TooSmall));
    }

    #[test]
    fn quotients() {
        let g = path(4);
        let singles: Vec<Vec<usize>> = (0..4).map(|v| vec![v]).collect();
        assert_eq!(g.quotient_by_partition(&singles).unwrap(), g);

        // 6-cycle, opposite vertices identified: a triangle
        let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let q = c6
            .quotient_by_partition(&[vec![0, 3], vec![1, 4], vec![2, 5]])
            .unwrap();
        assert_eq!(q.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);

        assert!(c6.quotient_by_partition(&[vec![0, 1]]).is_err());
        assert!(c6
            .quotient_by_partition(&[vec![0, 1, 2], vec![2, 3, 4, 5]])
            .is_err());
    }

    #[test]
    fn dot_output() {
        let one = Graph::with_vertices(1);
        assert_eq!(one.to_dot(), "graph G {\n  \"0\";\n}\n");
        let tri = complete(3);
        assert_eq!(
            tri.to_dot(),
            "graph G {\n  \"0\";\n  \"1\";\n  \"2\";\n  \"0\" -- \"1\";\n  \"0\" -- \"2\";\n  \"1\" -- \"2\";\n}\n"
        );
    }

    #[test]
    fn labels_must_be_unique() {
        assert!(Graph::new(vec!["a".into(), "a".into()]).is_err());
    }
}
