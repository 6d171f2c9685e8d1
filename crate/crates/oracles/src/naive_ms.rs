//! Reference MS-game search in which Duplicator is NOT oblivious: in each
//! round she picks an arbitrary nonempty subset of possible responses for
//! every structure on her side. Agreement with the production solver
//! certifies that the maximal (oblivious) response is optimal for her.

use std::sync::Arc;

use gamelab_core::structure::{vectors_match, Element, Structure};

use crate::RefWinner;

#[derive(Clone)]
pub struct RefMsPosition {
    pub structures: Vec<Arc<Structure>>,
    /// (structure index, pebble vector) per side
    pub left: Vec<(usize, Vec<Element>)>,
    pub right: Vec<(usize, Vec<Element>)>,
    pub rounds: u32,
}

pub struct NaiveMsBudget {
    pub max_nodes: u64,
}

impl Default for NaiveMsBudget {
    fn default() -> Self {
        NaiveMsBudget { max_nodes: 1 << 26 }
    }
}

struct Search<'a> {
    structures: &'a [Arc<Structure>],
    nodes: u64,
    max_nodes: u64,
}

type Side = Vec<(usize, Vec<Element>)>;

impl Search<'_> {
    fn any_matching_pair(&self, left: &Side, right: &Side) -> bool {
        left.iter().any(|(si, sp)| {
            right.iter().any(|(ti, tp)| {
                vectors_match(&self.structures[*si], sp, &self.structures[*ti], tp)
            })
        })
    }

    /// Enumerate every per-structure choice of a nonempty response subset.
    fn duplicator_choices(&self, side: &Side) -> Vec<Side> {
        let mut all: Vec<Side> = vec![Vec::new()];
        for (si, sp) in side {
            let n = self.structures[*si].universe_size();
            let exts: Vec<(usize, Vec<Element>)> = (0..n)
                .map(|e| {
                    let mut p = sp.clone();
                    p.push(e);
                    (*si, p)
                })
                .collect();
            let mut next = Vec::new();
            for mask in 1u64..(1 << exts.len()) {
                for acc in &all {
                    let mut side = acc.clone();
                    for (i, ext) in exts.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            side.push(ext.clone());
                        }
                    }
                    next.push(side);
                }
            }
            all = next;
        }
        all
    }

    fn spoiler_wins(&mut self, left: &Side, right: &Side, rounds: u32) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        if rounds == 0 {
            return Some(!self.any_matching_pair(left, right));
        }
        for side_idx in 0..2 {
            let (own, other) = if side_idx == 0 {
                (left, right)
            } else {
                (right, left)
            };
            // every placement map on the chosen side
            let mut placements: Vec<Vec<Element>> = vec![Vec::new()];
            for (si, _) in own {
                let n = self.structures[*si].universe_size();
                let mut next = Vec::new();
                for p in &placements {
                    for e in 0..n {
                        let mut q = p.clone();
                        q.push(e);
                        next.push(q);
                    }
                }
                placements = next;
            }
            for placement in &placements {
                let own_next: Side = own
                    .iter()
                    .zip(placement)
                    .map(|((si, sp), &e)| {
                        let mut p = sp.clone();
                        p.push(e);
                        (*si, p)
                    })
                    .collect();
                // Duplicator picks any nonempty response subset profile; she
                // survives if SOME choice avoids a Spoiler win
                let mut all_choices_lose = true;
                let mut undecided = false;
                for other_next in self.duplicator_choices(other) {
                    let sub = if side_idx == 0 {
                        self.spoiler_wins(&own_next, &other_next, rounds - 1)
                    } else {
                        self.spoiler_wins(&other_next, &own_next, rounds - 1)
                    };
                    match sub {
                        None => undecided = true,
                        Some(true) => {}
                        Some(false) => {
                            all_choices_lose = false;
                            break;
                        }
                    }
                }
                if all_choices_lose {
                    if undecided {
                        return None;
                    }
                    return Some(true);
                }
            }
        }
        Some(false)
    }
}

/// Winner of the m-round MS game with a subset-choosing Duplicator.
pub fn naive_ms_subset(pos: &RefMsPosition, budget: NaiveMsBudget) -> RefWinner {
    let mut s = Search {
        structures: &pos.structures,
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    match s.spoiler_wins(&pos.left, &pos.right, pos.rounds) {
        Some(true) => RefWinner::Spoiler,
        Some(false) => RefWinner::Duplicator,
        None => RefWinner::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gamelab_core::structure::Schema;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> Arc<Structure> {
        let mut b = Structure::builder(Schema::digraph(), n);
        for &(u, v) in edges {
            b.add_edge("E", u, v).unwrap();
        }
        Arc::new(b.finish().unwrap())
    }

    #[test]
    fn identical_singletons_favor_duplicator() {
        let a = digraph(2, &[(0, 1)]);
        let pos = RefMsPosition {
            structures: vec![a],
            left: vec![(0, vec![])],
            right: vec![(0, vec![])],
            rounds: 2,
        };
        assert_eq!(
            naive_ms_subset(&pos, NaiveMsBudget::default()),
            RefWinner::Duplicator
        );
    }

    #[test]
    fn single_edge_vs_edgeless_at_two_rounds() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let pos = RefMsPosition {
            structures: vec![a, b],
            left: vec![(0, vec![])],
            right: vec![(1, vec![])],
            rounds: 2,
        };
        assert_eq!(
            naive_ms_subset(&pos, NaiveMsBudget::default()),
            RefWinner::Spoiler
        );
        let pos1 = RefMsPosition {
            rounds: 1,
            ..pos
        };
        assert_eq!(
            naive_ms_subset(&pos1, NaiveMsBudget::default()),
            RefWinner::Duplicator
        );
    }
}
