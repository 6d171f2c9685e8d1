//! Simple undirected graphs (the DOMSET inputs) and the DIMACS edge format.

use std::collections::BTreeSet;

use crate::error::CoreError;

/// An undirected graph on vertices `0..n` with no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl Graph {
    pub fn new(n: u32, edges: &[(u32, u32)]) -> Result<Self, CoreError> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(CoreError::Domain(format!(
                    "edge ({u},{v}) out of vertex range 0..{n}"
                )));
            }
            if u == v {
                return Err(CoreError::Domain(format!("self-loop on {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn empty(n: u32) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Path on n vertices: 0-1-2-...-(n-1).
    pub fn path(n: u32) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::new(n, &edges).unwrap()
    }

    pub fn complete(n: u32) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, u: u32) -> Vec<u32> {
        (0..self.n).filter(|&v| self.adjacent(u, v)).collect()
    }

    /// N[u]: u together with its neighbors.
    pub fn closed_neighborhood(&self, u: u32) -> Vec<u32> {
        let mut v = vec![u];
        v.extend(self.neighbors(u));
        v.sort_unstable();
        v
    }

    /// All automorphisms, by brute force. Intended for small graphs.
    pub fn automorphisms(&self) -> Vec<Vec<u32>> {
        let n = self.n as usize;
        let mut result = Vec::new();
        let mut perm: Vec<u32> = (0..self.n).collect();
        loop {
            let ok = self.edges.iter().all(|&(u, v)| {
                self.adjacent(perm[u as usize], perm[v as usize])
            }) && (0..self.n).all(|u| {
                (0..self.n).all(|v| {
                    !self.adjacent(u, v) || self.adjacent(perm[u as usize], perm[v as usize])
                })
            });
            if ok {
                result.push(perm.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
            if n > 8 {
                break; // guard against accidental blowup
            }
        }
        result
    }

    /// Parse DIMACS edge format: `p edge <n> <m>` then `e <u> <v>` lines
    /// with 1-based vertices. Lines starting with `c` are comments.
    pub fn parse_dimacs(text: &str) -> Result<Self, CoreError> {
        let mut n: Option<u32> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            let loc = || format!("line {}", lineno + 1);
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("p") => {
                    let kind = parts
                        .next()
                        .ok_or_else(|| CoreError::parse(loc(), "missing format name"))?;
                    if kind != "edge" && kind != "col" {
                        return Err(CoreError::parse(loc(), format!("unsupported format `{kind}`")));
                    }
                    let nv: u32 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| CoreError::parse(loc(), "bad vertex count"))?;
                    n = Some(nv);
                }
                Some("e") => {
                    let u: u32 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| CoreError::parse(loc(), "bad edge endpoint"))?;
                    let v: u32 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| CoreError::parse(loc(), "bad edge endpoint"))?;
                    if u == 0 || v == 0 {
                        return Err(CoreError::parse(loc(), "DIMACS vertices are 1-based"));
                    }
                    edges.push((u - 1, v - 1));
                }
                Some(other) => {
                    return Err(CoreError::parse(loc(), format!("unknown line kind `{other}`")))
                }
                None => {}
            }
        }
        let n = n.ok_or_else(|| CoreError::parse("end of input", "missing `p edge` line"))?;
        Graph::new(n, &edges)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }
}

fn next_permutation(perm: &mut [u32]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// All graphs on exactly `n` vertices, one per isomorphism class, by brute
/// force canonical filtering. Small n only.
pub fn all_graphs_up_to_iso(n: u32) -> Vec<Graph> {
    let pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    let mut reps: Vec<(BTreeSet<(u32, u32)>, Graph)> = Vec::new();
    for mask in 0..(1u64 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::new(n, &edges).unwrap();
        // canonical form: lexicographically smallest permuted edge set
        let mut canon: Option<BTreeSet<(u32, u32)>> = None;
        let mut perm: Vec<u32> = (0..n).collect();
        loop {
            let img: BTreeSet<(u32, u32)> = g
                .edges()
                .map(|(u, v)| {
                    let (a, b) = (perm[u as usize], perm[v as usize]);
                    (a.min(b), a.max(b))
                })
                .collect();
            canon = Some(match canon {
                None => img,
                Some(c) => c.min(img),
            });
            if !next_permutation(&mut perm) {
                break;
            }
        }
        let canon = canon.unwrap();
        if !reps.iter().any(|(c, _)| *c == canon) {
            reps.push((canon, g));
        }
    }
    reps.into_iter().map(|(_, g)| g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let g = Graph::path(3);
        let text = g.to_dimacs();
        let g2 = Graph::parse_dimacs(&text).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn iso_classes_up_to_4_vertices() {
        assert_eq!(all_graphs_up_to_iso(1).len(), 1);
        assert_eq!(all_graphs_up_to_iso(2).len(), 2);
        assert_eq!(all_graphs_up_to_iso(3).len(), 4);
        assert_eq!(all_graphs_up_to_iso(4).len(), 11);
    }

    #[test]
    fn closed_neighborhood_of_path_center() {
        let g = Graph::path(3);
        assert_eq!(g.closed_neighborhood(1), vec![0, 1, 2]);
    }
}
