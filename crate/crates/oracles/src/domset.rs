//! Exact minimum dominating set by subset enumeration, smallest first.

use gamelab_core::digraph::Graph;
use gamelab_core::CoreError;

pub const DEFAULT_VERTEX_CAP: u32 = 16;

fn dominates(g: &Graph, subset: &[u32]) -> bool {
    (0..g.n()).all(|v| {
        subset.contains(&v) || subset.iter().any(|&u| g.adjacent(u, v))
    })
}

fn search(g: &Graph, chosen: &mut Vec<u32>, start: u32, remaining: u32) -> bool {
    if remaining == 0 {
        return dominates(g, chosen);
    }
    for v in start..g.n() {
        chosen.push(v);
        if search(g, chosen, v + 1, remaining - 1) {
            chosen.pop();
            return true;
        }
        chosen.pop();
    }
    false
}

/// Does `g` have a dominating set of size exactly `k`? (Monotone in `k` for
/// k up to n: supersets of dominating sets dominate.)
pub fn has_domset(g: &Graph, k: u32) -> Result<bool, CoreError> {
    has_domset_capped(g, k, DEFAULT_VERTEX_CAP)
}

pub fn has_domset_capped(g: &Graph, k: u32, cap: u32) -> Result<bool, CoreError> {
    if g.n() > cap {
        return Err(CoreError::Domain(format!(
            "graph has {} vertices; oracle cap is {cap}",
            g.n()
        )));
    }
    if k >= g.n() {
        return Ok(true); // the whole vertex set dominates
    }
    Ok(search(g, &mut Vec::new(), 0, k))
}

/// Exact minimum dominating set size, with a witness.
pub fn min_domset_with_witness(g: &Graph, cap: u32) -> Result<(u32, Vec<u32>), CoreError> {
    if g.n() > cap {
        return Err(CoreError::Domain(format!(
            "graph has {} vertices; oracle cap is {cap}",
            g.n()
        )));
    }
    if g.n() == 0 {
        return Ok((0, Vec::new()));
    }
    for k in 1..=g.n() {
        let mut chosen = Vec::new();
        if search_witness(g, &mut chosen, 0, k) {
            return Ok((k, chosen));
        }
    }
    unreachable!("the full vertex set always dominates")
}

fn search_witness(g: &Graph, chosen: &mut Vec<u32>, start: u32, remaining: u32) -> bool {
    if remaining == 0 {
        return dominates(g, chosen);
    }
    for v in start..g.n() {
        chosen.push(v);
        if search_witness(g, chosen, v + 1, remaining - 1) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Exact minimum dominating set size.
pub fn min_domset_bruteforce(g: &Graph) -> Result<u32, CoreError> {
    min_domset_with_witness(g, DEFAULT_VERTEX_CAP).map(|(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_three_has_domination_number_one() {
        assert_eq!(min_domset_bruteforce(&Graph::path(3)).unwrap(), 1);
    }

    #[test]
    fn empty_graph_needs_every_vertex() {
        assert_eq!(min_domset_bruteforce(&Graph::empty(3)).unwrap(), 3);
    }

    #[test]
    fn complete_graphs_need_one() {
        for n in 1..=6 {
            assert_eq!(min_domset_bruteforce(&Graph::complete(n)).unwrap(), 1);
        }
    }

    #[test]
    fn has_domset_is_monotone() {
        let g = Graph::path(4);
        let mut prev = false;
        for k in 0..=4 {
            let cur = has_domset(&g, k).unwrap();
            assert!(!prev || cur, "monotonicity violated at k={k}");
            prev = cur;
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::empty(20);
        assert!(has_domset(&g, 1).is_err());
        assert!(has_domset_capped(&g, 1, 20).is_ok());
    }
}
