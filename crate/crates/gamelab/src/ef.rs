//! Exact solver for the m-round EF game on a pair of pebbled structures,
//! plus the forcing predicate.
//!
//! The memo key is (left pebble vector, right pebble vector, rounds), with
//! each vector canonicalized under precomputed automorphism generators of
//! its own structure when available. Keys built from atomic types alone
//! would be unsound here: future moves see the whole structure.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use gamelab_core::perm::{canonical_vector, validate_generators, Perm};
use gamelab_core::structure::{vectors_match, Element, PebbledStructure, Structure};
use gamelab_core::CoreError;

use crate::limits::{SearchLimits, SearchStats, Ticker, Winner};

/// Orbit BFS cap per canonicalization. Hitting the cap only weakens memo
/// sharing, never soundness.
const ORBIT_CAP: usize = 2048;

#[derive(Debug, Clone)]
pub struct EfPosition {
    pub left: PebbledStructure,
    pub right: PebbledStructure,
    pub rounds_remaining: u32,
}

impl EfPosition {
    pub fn new(
        left: PebbledStructure,
        right: PebbledStructure,
        rounds_remaining: u32,
    ) -> Result<Self, CoreError> {
        if left.structure.schema() != right.structure.schema() {
            return Err(CoreError::SchemaMismatch(
                "EF position requires a shared schema".into(),
            ));
        }
        if left.color_set() != right.color_set() {
            return Err(CoreError::SchemaMismatch(
                "EF position requires identical pebble color sets".into(),
            ));
        }
        Ok(EfPosition {
            left,
            right,
            rounds_remaining,
        })
    }

    /// Positional pebble vectors aligned by sorted color.
    pub fn vectors(&self) -> (Vec<Element>, Vec<Element>) {
        let lp = self.left.sorted_pebbles().iter().map(|(_, e)| *e).collect();
        let rp = self
            .right
            .sorted_pebbles()
            .iter()
            .map(|(_, e)| *e)
            .collect();
        (lp, rp)
    }
}

#[derive(Debug, Clone)]
pub struct EfResult {
    pub winner: Winner,
    pub stats: SearchStats,
}

pub(crate) struct EfSolver {
    left: Arc<Structure>,
    right: Arc<Structure>,
    left_gens: Arc<Vec<Perm>>,
    right_gens: Arc<Vec<Perm>>,
    memo: HashMap<(Vec<Element>, Vec<Element>, u32), bool>,
    ticker: Ticker,
}

impl EfSolver {
    pub fn new(
        left: Arc<Structure>,
        right: Arc<Structure>,
        left_gens: Vec<Perm>,
        right_gens: Vec<Perm>,
        limits: SearchLimits,
    ) -> Result<Self, CoreError> {
        if let Err(i) = validate_generators(&left, &left_gens) {
            return Err(CoreError::InvalidStructure(format!(
                "left generator {i} is not an automorphism"
            )));
        }
        if let Err(i) = validate_generators(&right, &right_gens) {
            return Err(CoreError::InvalidStructure(format!(
                "right generator {i} is not an automorphism"
            )));
        }
        Ok(EfSolver {
            left,
            right,
            left_gens: Arc::new(left_gens),
            right_gens: Arc::new(right_gens),
            memo: HashMap::new(),
            ticker: Ticker::new(limits),
        })
    }

    fn sides(&self, spoiler_side: usize) -> (&Arc<Structure>, &Arc<Structure>) {
        if spoiler_side == 0 {
            (&self.left, &self.right)
        } else {
            (&self.right, &self.left)
        }
    }

    /// One round left: Spoiler wins iff some candidate admits no
    /// matching-preserving response. No memo or orbit machinery needed.
    fn leaf_spoiler_wins(&mut self, lp: &[Element], rp: &[Element]) -> Option<bool> {
        let mut own_sig = Vec::new();
        let mut other_sig = Vec::new();
        for side in 0..2 {
            let (own, other) = {
                let (a, b) = self.sides(side);
                (a.clone(), b.clone())
            };
            let (own_peb, other_peb) = if side == 0 { (lp, rp) } else { (rp, lp) };
            for e in 0..own.universe_size() {
                if !self.ticker.tick() {
                    return None;
                }
                own.extension_signature_into(own_peb, e, &mut own_sig);
                let mut answered = false;
                for w in 0..other.universe_size() {
                    other.extension_signature_into(other_peb, w, &mut other_sig);
                    if other_sig == own_sig {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    return Some(true);
                }
            }
        }
        Some(false)
    }

    /// Spoiler-win test assuming (lp, rp) currently form a matching pair.
    /// None means the budget ran out.
    pub fn solve(
        &mut self,
        lp: &mut Vec<Element>,
        rp: &mut Vec<Element>,
        rounds: u32,
    ) -> Option<bool> {
        if rounds == 0 {
            return Some(false);
        }
        if !self.ticker.tick() {
            return None;
        }
        if rounds == 1 {
            return self.leaf_spoiler_wins(lp, rp);
        }
        let key = (
            canonical_vector(&self.left_gens, lp, ORBIT_CAP),
            canonical_vector(&self.right_gens, rp, ORBIT_CAP),
            rounds,
        );
        if let Some(&v) = self.memo.get(&key) {
            self.ticker.memo_hits += 1;
            return Some(v);
        }
        let mut undecided = false;
        let mut spoiler = false;
        let mut own_sig = Vec::new();
        let mut other_sig = Vec::new();
        'sides: for side in 0..2 {
            let own = self.sides(side).0.clone();
            let other = self.sides(side).1.clone();
            let (own_gens, other_gens) = if side == 0 {
                (self.left_gens.clone(), self.right_gens.clone())
            } else {
                (self.right_gens.clone(), self.left_gens.clone())
            };
            let mut seen_moves: HashSet<Vec<Element>> = HashSet::new();
            for e in 0..own.universe_size() {
                if self.ticker.exhausted {
                    return None;
                }
                let own_peb: &[Element] = if side == 0 { lp } else { rp };
                if !own_gens.is_empty() {
                    let mut ext = own_peb.to_vec();
                    ext.push(e);
                    let canon = canonical_vector(&own_gens, &ext, ORBIT_CAP);
                    if !seen_moves.insert(canon) {
                        continue;
                    }
                }
                own.extension_signature_into(own_peb, e, &mut own_sig);
                let mut all_lose = true;
                let mut branch_undecided = false;
                let mut seen_resp: HashSet<Vec<Element>> = HashSet::new();
                for w in 0..other.universe_size() {
                    let other_peb: &[Element] = if side == 0 { rp } else { lp };
                    other.extension_signature_into(other_peb, w, &mut other_sig);
                    if other_sig != own_sig {
                        continue; // loses immediately; never optimal for D
                    }
                    if !other_gens.is_empty() {
                        let mut ext = other_peb.to_vec();
                        ext.push(w);
                        let canon = canonical_vector(&other_gens, &ext, ORBIT_CAP);
                        if !seen_resp.insert(canon) {
                            continue;
                        }
                    }
                    let (le, re) = if side == 0 { (e, w) } else { (w, e) };
                    lp.push(le);
                    rp.push(re);
                    let sub = self.solve(lp, rp, rounds - 1);
                    lp.pop();
                    rp.pop();
                    match sub {
                        None => branch_undecided = true,
                        Some(true) => {}
                        Some(false) => {
                            all_lose = false;
                            break;
                        }
                    }
                }
                if all_lose {
                    if branch_undecided {
                        undecided = true;
                    } else {
                        spoiler = true;
                        break 'sides;
                    }
                }
            }
        }
        if spoiler {
            self.memo.insert(key, true);
            Some(true)
        } else if undecided {
            None
        } else {
            self.memo.insert(key, false);
            Some(false)
        }
    }

    pub fn stats(&self) -> SearchStats {
        self.ticker.stats()
    }
}

fn winner_of(sub: Option<bool>) -> Winner {
    match sub {
        Some(true) => Winner::Spoiler,
        Some(false) => Winner::Duplicator,
        None => Winner::Unknown,
    }
}

/// Solve an EF position with automorphism generators for orbit reduction
/// (one set per side, validated before use).
pub fn ef_winner_with_groups(
    pos: &EfPosition,
    limits: SearchLimits,
    left_gens: &[Perm],
    right_gens: &[Perm],
) -> Result<EfResult, CoreError> {
    let (mut lp, mut rp) = pos.vectors();
    let mut solver = EfSolver::new(
        pos.left.structure.clone(),
        pos.right.structure.clone(),
        left_gens.to_vec(),
        right_gens.to_vec(),
        limits,
    )?;
    let winner = if !vectors_match(&pos.left.structure, &lp, &pos.right.structure, &rp) {
        Winner::Spoiler
    } else {
        winner_of(solver.solve(&mut lp, &mut rp, pos.rounds_remaining))
    };
    Ok(EfResult {
        winner,
        stats: solver.stats(),
    })
}

/// With rounds_remaining = 0: Spoiler iff the sides do not form a matching
/// pair. Otherwise Spoiler iff some side and element beat every response.
pub fn ef_winner(pos: &EfPosition, limits: SearchLimits) -> Result<EfResult, CoreError> {
    ef_winner_with_groups(pos, limits, &[], &[])
}

/// The forcing predicate: true iff Spoiler playing `u` on the left leaves
/// every response other than `v` losing within `m_additional` rounds, and
/// symmetrically for `v` on the right against responses other than `u`.
/// `None` means a sub-solve hit its budget.
pub fn ef_forced(
    pos: &EfPosition,
    u: Element,
    v: Element,
    m_additional: u32,
    limits: SearchLimits,
    left_gens: &[Perm],
    right_gens: &[Perm],
) -> Result<Option<bool>, CoreError> {
    let (lp, rp) = pos.vectors();
    let mut solver = EfSolver::new(
        pos.left.structure.clone(),
        pos.right.structure.clone(),
        left_gens.to_vec(),
        right_gens.to_vec(),
        limits,
    )?;
    // (a) Spoiler plays u on the left
    for w in 0..pos.right.structure.universe_size() {
        if w == v {
            continue;
        }
        let mut l2 = lp.clone();
        let mut r2 = rp.clone();
        l2.push(u);
        r2.push(w);
        let sub = if !vectors_match(&pos.left.structure, &l2, &pos.right.structure, &r2) {
            Some(true)
        } else {
            solver.solve(&mut l2, &mut r2, m_additional)
        };
        match sub {
            Some(true) => {}
            Some(false) => return Ok(Some(false)),
            None => return Ok(None),
        }
    }
    // (b) Spoiler plays v on the right
    for w in 0..pos.left.structure.universe_size() {
        if w == u {
            continue;
        }
        let mut l2 = lp.clone();
        let mut r2 = rp.clone();
        l2.push(w);
        r2.push(v);
        let sub = if !vectors_match(&pos.left.structure, &l2, &pos.right.structure, &r2) {
            Some(true)
        } else {
            solver.solve(&mut l2, &mut r2, m_additional)
        };
        match sub {
            Some(true) => {}
            Some(false) => return Ok(Some(false)),
            None => return Ok(None),
        }
    }
    Ok(Some(true))
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

    fn pos(l: Arc<Structure>, r: Arc<Structure>, m: u32) -> EfPosition {
        EfPosition::new(
            PebbledStructure::unpebbled(l),
            PebbledStructure::unpebbled(r),
            m,
        )
        .unwrap()
    }

    #[test]
    fn identical_structures_are_duplicator_wins() {
        let a = digraph(3, &[(0, 1), (1, 2)]);
        for m in 0..=3 {
            let r = ef_winner(&pos(a.clone(), a.clone(), m), SearchLimits::default()).unwrap();
            assert_eq!(r.winner, Winner::Duplicator, "m={m}");
        }
    }

    #[test]
    fn single_edge_vs_edgeless() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let r1 = ef_winner(&pos(a.clone(), b.clone(), 1), SearchLimits::default()).unwrap();
        assert_eq!(r1.winner, Winner::Duplicator);
        let r2 = ef_winner(&pos(a, b, 2), SearchLimits::default()).unwrap();
        assert_eq!(r2.winner, Winner::Spoiler);
    }

    #[test]
    fn forcing_on_identical_structures_with_identity_pair() {
        // On identical structures, (u, u) is forced with 0 additional
        // rounds: any response w != u breaks the matching pair immediately.
        let a = digraph(2, &[(0, 1)]);
        let p = pos(a.clone(), a, 1);
        assert_eq!(
            ef_forced(&p, 0, 0, 0, SearchLimits::default(), &[], &[]).unwrap(),
            Some(true)
        );
    }

    #[test]
    fn budget_exhaustion_reports_unknown() {
        let a = digraph(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = digraph(4, &[(0, 1), (1, 3)]);
        let r = ef_winner(&pos(a, b, 3), SearchLimits::nodes(2)).unwrap();
        assert_eq!(r.winner, Winner::Unknown);
    }

    #[test]
    fn orbit_reduction_agrees_with_plain_search() {
        // 4-cycle vs 4-path with rotation generators on the cycle
        let cyc = digraph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let path = digraph(4, &[(0, 1), (1, 2), (2, 3)]);
        let rot = gamelab_core::perm::from_cycles(4, &[vec![0, 1, 2, 3]]);
        for m in 1..=3 {
            let p = pos(cyc.clone(), path.clone(), m);
            let plain = ef_winner(&p, SearchLimits::default()).unwrap().winner;
            let fast = ef_winner_with_groups(&p, SearchLimits::default(), &[rot.clone()], &[])
                .unwrap()
                .winner;
            assert_eq!(plain, fast, "m={m}");
        }
    }
}
