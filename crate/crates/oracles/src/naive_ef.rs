//! Memo-free reference search for the m-round EF game. Explores the full
//! game tree with no transposition table, no orbit reduction, and no move
//! ordering, so it shares nothing with the production solver beyond the
//! matching-pair substrate.

use gamelab_core::structure::{vectors_match, Element, Structure};

use crate::RefWinner;

pub struct NaiveEfBudget {
    pub max_nodes: u64,
}

impl Default for NaiveEfBudget {
    fn default() -> Self {
        NaiveEfBudget { max_nodes: 1 << 24 }
    }
}

struct Search<'a> {
    left: &'a Structure,
    right: &'a Structure,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    fn spoiler_wins(
        &mut self,
        lp: &mut Vec<Element>,
        rp: &mut Vec<Element>,
        rounds: u32,
    ) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        if rounds == 0 {
            return Some(!vectors_match(self.left, lp, self.right, rp));
        }
        // Spoiler: some side and element such that every response loses
        for side in 0..2 {
            let n = if side == 0 {
                self.left.universe_size()
            } else {
                self.right.universe_size()
            };
            let n_resp = if side == 0 {
                self.right.universe_size()
            } else {
                self.left.universe_size()
            };
            for e in 0..n {
                let mut all_lose = true;
                let mut undecided = false;
                for w in 0..n_resp {
                    let (le, re) = if side == 0 { (e, w) } else { (w, e) };
                    lp.push(le);
                    rp.push(re);
                    let sub = self.spoiler_wins(lp, rp, rounds - 1);
                    lp.pop();
                    rp.pop();
                    match sub {
                        None => undecided = true,
                        Some(true) => {}
                        Some(false) => {
                            all_lose = false;
                            break;
                        }
                    }
                }
                if all_lose {
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

/// Winner of the m-round EF game on two pebbled structures given as raw
/// positional pebble vectors.
pub fn naive_ef(
    left: &Structure,
    left_pebbles: &[Element],
    right: &Structure,
    right_pebbles: &[Element],
    rounds: u32,
    budget: NaiveEfBudget,
) -> RefWinner {
    if left.universe_size() == 0 || right.universe_size() == 0 {
        // a side with an empty universe gives Spoiler a free win whenever
        // rounds remain (no response exists); with 0 rounds it is the
        // matching test
        if rounds > 0 && (left.universe_size() == 0) != (right.universe_size() == 0) {
            return RefWinner::Spoiler;
        }
    }
    let mut s = Search {
        left,
        right,
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    let mut lp = left_pebbles.to_vec();
    let mut rp = right_pebbles.to_vec();
    match s.spoiler_wins(&mut lp, &mut rp, rounds) {
        Some(true) => RefWinner::Spoiler,
        Some(false) => RefWinner::Duplicator,
        None => RefWinner::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gamelab_core::structure::Schema;
    use std::sync::Arc;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> Arc<Structure> {
        let mut b = Structure::builder(Schema::digraph(), n);
        for &(u, v) in edges {
            b.add_edge("E", u, v).unwrap();
        }
        Arc::new(b.finish().unwrap())
    }

    #[test]
    fn identical_structures_favor_duplicator() {
        let a = digraph(3, &[(0, 1), (1, 2)]);
        for m in 0..=3 {
            assert_eq!(
                naive_ef(&a, &[], &a, &[], m, NaiveEfBudget::default()),
                RefWinner::Duplicator
            );
        }
    }

    #[test]
    fn single_edge_vs_edgeless_takes_two_rounds() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        assert_eq!(
            naive_ef(&a, &[], &b, &[], 1, NaiveEfBudget::default()),
            RefWinner::Duplicator
        );
        assert_eq!(
            naive_ef(&a, &[], &b, &[], 2, NaiveEfBudget::default()),
            RefWinner::Spoiler
        );
    }
}
