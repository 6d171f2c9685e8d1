//! The multi-structural game: positions, the oblivious Duplicator response,
//! Lemma-2.2 discarding, and the exact solver with certificate extraction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use gamelab_core::structure::{
    positional_type_key, vectors_match, Element, PebbledStructure, Structure,
};
use gamelab_core::CoreError;

use crate::limits::{SearchLimits, SearchStats, Ticker, Winner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "L"),
            Side::Right => write!(f, "R"),
        }
    }
}

/// (structure index, positional pebble vector)
pub type Entry = (usize, Vec<Element>);

/// A game state: two deduplicated sets of pebbled structures over a shared
/// pool of structures, the rounds left, and the ordered colors in play.
/// Pebble vectors are positional: pebble i carries colors_used[i].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsPosition {
    pub structures: Vec<Arc<Structure>>,
    pub left: Vec<Entry>,
    pub right: Vec<Entry>,
    pub rounds_remaining: u32,
    pub colors_used: Vec<String>,
}

/// Spoiler's move: a side, a fresh color, and one element per pebbled
/// structure on that side (aligned with the side's entry order).
#[derive(Debug, Clone)]
pub struct SpoilerMove {
    pub side: Side,
    pub color: String,
    pub placement: Vec<Element>,
}

impl MsPosition {
    /// Build a position from pebbled structures. All must share a schema and
    /// carry exactly the same color set; pebbles are normalized into sorted
    /// color order.
    pub fn new(
        left: Vec<PebbledStructure>,
        right: Vec<PebbledStructure>,
        rounds_remaining: u32,
    ) -> Result<Self, CoreError> {
        let mut structures: Vec<Arc<Structure>> = Vec::new();
        let mut intern = |s: &Arc<Structure>, structures: &mut Vec<Arc<Structure>>| -> usize {
            if let Some(i) = structures.iter().position(|t| Arc::ptr_eq(t, s)) {
                i
            } else {
                structures.push(s.clone());
                structures.len() - 1
            }
        };
        let mut colors: Option<Vec<String>> = None;
        let mut schema = None;
        let mut convert = |p: &PebbledStructure,
                           structures: &mut Vec<Arc<Structure>>|
         -> Result<Entry, CoreError> {
            match &schema {
                None => schema = Some(p.structure.schema().clone()),
                Some(s) => {
                    if p.structure.schema() != s {
                        return Err(CoreError::SchemaMismatch(
                            "MS position requires a shared schema".into(),
                        ));
                    }
                }
            }
            let sorted = p.sorted_pebbles();
            let cs: Vec<String> = sorted.iter().map(|(c, _)| c.to_string()).collect();
            match &colors {
                None => colors = Some(cs),
                Some(existing) => {
                    if *existing != cs {
                        return Err(CoreError::SchemaMismatch(
                            "MS position requires identical pebble color sets".into(),
                        ));
                    }
                }
            }
            let idx = intern(&p.structure, structures);
            Ok((idx, sorted.iter().map(|(_, e)| *e).collect()))
        };
        let mut l = Vec::new();
        for p in &left {
            l.push(convert(p, &mut structures)?);
        }
        let mut r = Vec::new();
        for p in &right {
            r.push(convert(p, &mut structures)?);
        }
        l.sort();
        l.dedup();
        r.sort();
        r.dedup();
        Ok(MsPosition {
            structures,
            left: l,
            right: r,
            rounds_remaining,
            colors_used: colors.unwrap_or_default(),
        })
    }

    /// A color not used yet, following the palette convention x1, x2, ...
    pub fn fresh_color(&self) -> String {
        let used: BTreeSet<&str> = self.colors_used.iter().map(|s| s.as_str()).collect();
        let mut i = self.colors_used.len() + 1;
        loop {
            let c = format!("x{i}");
            if !used.contains(c.as_str()) {
                return c;
            }
            i += 1;
        }
    }

    pub fn side(&self, side: Side) -> &[Entry] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn view(&self, side: Side, i: usize) -> (&Arc<Structure>, &[Element]) {
        let (sid, peb) = &self.side(side)[i];
        (&self.structures[*sid], peb)
    }

    /// Is there any matching pair across the sides?
    pub fn has_matching_pair(&self) -> bool {
        self.left.iter().any(|(si, sp)| {
            self.right
                .iter()
                .any(|(ti, tp)| vectors_match(&self.structures[*si], sp, &self.structures[*ti], tp))
        })
    }

    fn normalized(mut self) -> Self {
        self.left.sort();
        self.left.dedup();
        self.right.sort();
        self.right.dedup();
        self
    }

    fn key(&self) -> (Vec<Entry>, Vec<Entry>, u32) {
        (self.left.clone(), self.right.clone(), self.rounds_remaining)
    }
}

/// Apply a Spoiler move: his placement extends every structure on the
/// chosen side; on the other side every structure is replaced by all of its
/// one-pebble extensions. Decrements the round counter and deduplicates. No
/// discarding happens here.
pub fn oblivious_response(pos: &MsPosition, mv: &SpoilerMove) -> Result<MsPosition, CoreError> {
    if pos.colors_used.iter().any(|c| *c == mv.color) {
        return Err(CoreError::InvalidStructure(format!(
            "color `{}` is already in play",
            mv.color
        )));
    }
    let own = pos.side(mv.side);
    if mv.placement.len() != own.len() {
        return Err(CoreError::InvalidStructure(format!(
            "placement covers {} structures but the side has {}",
            mv.placement.len(),
            own.len()
        )));
    }
    let mut own_next: Vec<Entry> = Vec::with_capacity(own.len());
    for ((sid, peb), &e) in own.iter().zip(&mv.placement) {
        if e >= pos.structures[*sid].universe_size() {
            return Err(CoreError::InvalidStructure(format!(
                "placement element {e} out of universe"
            )));
        }
        let mut p = peb.clone();
        p.push(e);
        own_next.push((*sid, p));
    }
    let other = pos.side(mv.side.opposite());
    let mut other_next: Vec<Entry> = Vec::new();
    for (sid, peb) in other {
        for e in 0..pos.structures[*sid].universe_size() {
            let mut p = peb.clone();
            p.push(e);
            other_next.push((*sid, p));
        }
    }
    let (left, right) = match mv.side {
        Side::Left => (own_next, other_next),
        Side::Right => (other_next, own_next),
    };
    let mut colors = pos.colors_used.clone();
    colors.push(mv.color.clone());
    Ok(MsPosition {
        structures: pos.structures.clone(),
        left,
        right,
        rounds_remaining: pos.rounds_remaining.saturating_sub(1),
        colors_used: colors,
    }
    .normalized())
}

/// Remove every pebbled structure forming no matching pair with any
/// structure on the other side. Idempotent; preserves the winner.
pub fn discard(pos: &MsPosition) -> MsPosition {
    let key_of =
        |(sid, peb): &Entry| -> Vec<u8> { positional_type_key(&pos.structures[*sid], peb) };
    let left_keys: HashSet<Vec<u8>> = pos.left.iter().map(&key_of).collect();
    let right_keys: HashSet<Vec<u8>> = pos.right.iter().map(&key_of).collect();
    let left = pos
        .left
        .iter()
        .filter(|e| right_keys.contains(&key_of(e)))
        .cloned()
        .collect();
    let right = pos
        .right
        .iter()
        .filter(|e| left_keys.contains(&key_of(e)))
        .cloned()
        .collect();
    MsPosition {
        structures: pos.structures.clone(),
        left,
        right,
        rounds_remaining: pos.rounds_remaining,
        colors_used: pos.colors_used.clone(),
    }
}

#[derive(Debug, Clone)]
pub struct MsResult {
    pub winner: Winner,
    pub stats: SearchStats,
    /// Spoiler's winning line against the oblivious Duplicator, when he wins
    /// and certificate extraction was requested: one move per round used.
    pub certificate: Option<Vec<SpoilerMove>>,
}

struct MsSolver {
    ticker: Ticker,
    memo: HashMap<(Vec<Entry>, Vec<Entry>, u32), bool>,
    winning_move: HashMap<(Vec<Entry>, Vec<Entry>, u32), (Side, Vec<Element>)>,
    want_certificate: bool,
}

impl MsSolver {
    /// Spoiler-win test on an already-discarded position with at least one
    /// matching pair. None = budget exhausted.
    fn solve(&mut self, pos: &MsPosition) -> Option<bool> {
        debug_assert!(pos.has_matching_pair());
        if pos.rounds_remaining == 0 {
            return Some(false);
        }
        if !self.ticker.tick() {
            return None;
        }
        if pos.rounds_remaining == 1 {
            return Some(self.final_round(pos).is_some());
        }
        let key = pos.key();
        if let Some(&v) = self.memo.get(&key) {
            self.ticker.memo_hits += 1;
            return Some(v);
        }
        let color = pos.fresh_color();
        let mut undecided = false;
        for side in [Side::Left, Side::Right] {
            let entries = pos.side(side);
            if entries.is_empty() {
                continue;
            }
            // enumerate placement maps depth-first, deduplicating successors
            let mut seen: HashSet<(Vec<Entry>, Vec<Entry>)> = HashSet::new();
            let sizes: Vec<u32> = entries
                .iter()
                .map(|(sid, _)| pos.structures[*sid].universe_size())
                .collect();
            if sizes.iter().any(|&n| n == 0) {
                continue; // no placement exists on a side with an empty universe
            }
            let mut placement: Vec<Element> = vec![0; entries.len()];
            'placements: loop {
                if !self.ticker.tick() {
                    return None;
                }
                let mv = SpoilerMove {
                    side,
                    color: color.clone(),
                    placement: placement.clone(),
                };
                let succ = discard(&oblivious_response(pos, &mv).expect("validated move"));
                if !succ.has_matching_pair() {
                    // every pair is already broken: Spoiler has won
                    self.memo.insert(key.clone(), true);
                    if self.want_certificate {
                        self.winning_move.insert(key, (side, placement));
                    }
                    return Some(true);
                }
                if seen.insert((succ.left.clone(), succ.right.clone())) {
                    match self.solve(&succ) {
                        None => undecided = true,
                        Some(true) => {
                            self.memo.insert(key.clone(), true);
                            if self.want_certificate {
                                self.winning_move.insert(key, (side, placement));
                            }
                            return Some(true);
                        }
                        Some(false) => {}
                    }
                }
                // next placement in lexicographic order
                let mut i = placement.len();
                loop {
                    if i == 0 {
                        break 'placements;
                    }
                    i -= 1;
                    placement[i] += 1;
                    if placement[i] < sizes[i] as Element {
                        break;
                    }
                    placement[i] = 0;
                }
            }
        }
        if undecided {
            None
        } else {
            self.memo.insert(key, false);
            Some(false)
        }
    }

    /// One round left. Spoiler playing a side wins iff for each of its
    /// structures independently some placement kills every extension of the
    /// other side (the matching condition is a conjunction over cross pairs,
    /// so last-round placements decouple per structure). Returns the winning
    /// move if one exists.
    fn final_round(&mut self, pos: &MsPosition) -> Option<SpoilerMove> {
        let color = pos.fresh_color();
        for side in [Side::Left, Side::Right] {
            let own = pos.side(side);
            let other = pos.side(side.opposite());
            if own.is_empty() {
                // a placement on an empty side does nothing; the other side
                // obliviously extends and every old matching pair survives
                // in some extension only if one existed, which it did, so
                // playing the empty side never wins.
                continue;
            }
            // all extension type keys of the other side
            let mut other_keys: HashSet<Vec<u8>> = HashSet::new();
            for (sid, peb) in other {
                let s = &pos.structures[*sid];
                let mut p = peb.clone();
                for e in 0..s.universe_size() {
                    p.push(e);
                    other_keys.insert(positional_type_key(s, &p));
                    p.pop();
                }
            }
            let mut placement = Vec::with_capacity(own.len());
            let mut ok = true;
            for (sid, peb) in own {
                if !self.ticker.tick() {
                    return None;
                }
                let s = &pos.structures[*sid];
                let mut found = None;
                let mut p = peb.clone();
                for e in 0..s.universe_size() {
                    p.push(e);
                    let key = positional_type_key(s, &p);
                    p.pop();
                    if !other_keys.contains(&key) {
                        found = Some(e);
                        break;
                    }
                }
                match found {
                    Some(e) => placement.push(e),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Some(SpoilerMove {
                    side,
                    color,
                    placement,
                });
            }
        }
        None
    }
}

/// Exact winner of the MS game within limits. With rounds_remaining = 0:
/// Spoiler iff no matching pair exists (if discard empties both sides no
/// matching pair exists either, so the position is Spoiler-won).
pub fn ms_winner(pos: &MsPosition, limits: SearchLimits) -> MsResult {
    ms_winner_opt(pos, limits, false)
}

/// As [`ms_winner`], also extracting Spoiler's winning line when he wins.
pub fn ms_winner_certified(pos: &MsPosition, limits: SearchLimits) -> MsResult {
    ms_winner_opt(pos, limits, true)
}

fn ms_winner_opt(pos: &MsPosition, limits: SearchLimits, want_certificate: bool) -> MsResult {
    let mut solver = MsSolver {
        ticker: Ticker::new(limits),
        memo: HashMap::new(),
        winning_move: HashMap::new(),
        want_certificate,
    };
    let start = discard(pos);
    let outcome = if !start.has_matching_pair() {
        Some(true)
    } else {
        solver.solve(&start)
    };
    let winner = match outcome {
        Some(true) => Winner::Spoiler,
        Some(false) => Winner::Duplicator,
        None => Winner::Unknown,
    };
    let certificate = if winner == Winner::Spoiler && want_certificate {
        Some(replay_certificate(&start, &mut solver))
    } else {
        None
    };
    MsResult {
        winner,
        stats: solver.ticker.stats(),
        certificate,
    }
}

fn replay_certificate(start: &MsPosition, solver: &mut MsSolver) -> Vec<SpoilerMove> {
    let mut line = Vec::new();
    let mut pos = start.clone();
    loop {
        if !pos.has_matching_pair() {
            return line;
        }
        debug_assert!(pos.rounds_remaining > 0, "certificate replay ran out of rounds");
        let mv = if pos.rounds_remaining == 1 {
            solver
                .final_round(&pos)
                .expect("winning final move must exist")
        } else {
            let key = pos.key();
            let (side, placement) = solver
                .winning_move
                .get(&key)
                .expect("winning move recorded for every Spoiler-won position")
                .clone();
            SpoilerMove {
                side,
                color: pos.fresh_color(),
                placement,
            }
        };
        let next = discard(&oblivious_response(&pos, &mv).expect("certified move applies"));
        line.push(mv);
        pos = next;
    }
}

/// Convenience: positions from one pebbled structure per side.
pub fn singleton_position(
    left: PebbledStructure,
    right: PebbledStructure,
    rounds: u32,
) -> Result<MsPosition, CoreError> {
    MsPosition::new(vec![left], vec![right], rounds)
}

/// Pebbled-structure views of a side, for interop with core operations.
pub fn side_as_pebbled(pos: &MsPosition, side: Side) -> Vec<PebbledStructure> {
    pos.side(side)
        .iter()
        .map(|(sid, peb)| {
            PebbledStructure::new(
                pos.structures[*sid].clone(),
                pos.colors_used
                    .iter()
                    .cloned()
                    .zip(peb.iter().copied())
                    .collect(),
            )
            .expect("position entries are valid pebbled structures")
        })
        .collect()
}

/// Certificate data shared with the strategy-script executor: the sides and
/// per-entry placements of each round actually played, recorded against the
/// pre-move position entries.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub side: Side,
    pub color: String,
    /// placement chosen for each (structure, pebbles) entry that was live on
    /// the played side before the move
    pub placements: BTreeMap<Entry, Element>,
}

/// A replayable record of a full run against the oblivious Duplicator.
#[derive(Debug, Clone)]
pub struct MsTrace {
    pub initial: MsPosition,
    pub rounds: Vec<RoundRecord>,
    pub final_position: MsPosition,
    pub won: bool,
}

impl MsTrace {
    pub fn sides(&self) -> Vec<Side> {
        self.rounds.iter().map(|r| r.side).collect()
    }
}

/// Record a solver certificate as a trace by replaying it.
pub fn certificate_to_trace(
    start: &MsPosition,
    line: &[SpoilerMove],
) -> Result<MsTrace, CoreError> {
    let initial = start.clone();
    let mut pos = discard(start);
    let mut rounds = Vec::new();
    for mv in line {
        let mut placements = BTreeMap::new();
        for (entry, &e) in pos.side(mv.side).iter().zip(&mv.placement) {
            placements.insert(entry.clone(), e);
        }
        rounds.push(RoundRecord {
            side: mv.side,
            color: mv.color.clone(),
            placements,
        });
        pos = discard(&oblivious_response(&pos, mv)?);
    }
    let won = !pos.has_matching_pair();
    Ok(MsTrace {
        initial,
        rounds,
        final_position: pos,
        won,
    })
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

    fn singletons(l: Arc<Structure>, r: Arc<Structure>, m: u32) -> MsPosition {
        singleton_position(
            PebbledStructure::unpebbled(l),
            PebbledStructure::unpebbled(r),
            m,
        )
        .unwrap()
    }

    #[test]
    fn identical_singletons_are_duplicator_wins() {
        let a = digraph(2, &[(0, 1)]);
        for m in 0..=3 {
            let pos = singletons(a.clone(), a.clone(), m);
            assert_eq!(
                ms_winner(&pos, SearchLimits::default()).winner,
                Winner::Duplicator,
                "m={m}"
            );
        }
    }

    #[test]
    fn single_edge_vs_edgeless_needs_two_rounds() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let one = ms_winner(&singletons(a.clone(), b.clone(), 1), SearchLimits::default());
        assert_eq!(one.winner, Winner::Duplicator);
        let two = ms_winner(&singletons(a, b, 2), SearchLimits::default());
        assert_eq!(two.winner, Winner::Spoiler);
    }

    #[test]
    fn oblivious_response_grows_other_side() {
        let a = digraph(3, &[(0, 1)]);
        let pos = singletons(a.clone(), a, 2);
        let mv = SpoilerMove {
            side: Side::Left,
            color: pos.fresh_color(),
            placement: vec![0],
        };
        let next = oblivious_response(&pos, &mv).unwrap();
        assert_eq!(next.left.len(), 1);
        assert_eq!(next.right.len(), 3); // one copy per element, before discard
        assert_eq!(next.rounds_remaining, 1);
    }

    #[test]
    fn single_element_universes_stay_singletons() {
        let a = digraph(1, &[]);
        let pos = singletons(a.clone(), a, 3);
        let mv = SpoilerMove {
            side: Side::Right,
            color: pos.fresh_color(),
            placement: vec![0],
        };
        let next = oblivious_response(&pos, &mv).unwrap();
        assert_eq!(next.left.len(), 1);
        assert_eq!(next.right.len(), 1);
    }

    #[test]
    fn discard_empties_unmatched_pair() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let pa = PebbledStructure::new(a, vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        let pb = PebbledStructure::new(b, vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        let pos = MsPosition::new(vec![pa], vec![pb], 1).unwrap();
        let d = discard(&pos);
        assert!(d.left.is_empty() && d.right.is_empty());
        // and a position with no matching pair is Spoiler-won immediately
        assert_eq!(ms_winner(&pos, SearchLimits::default()).winner, Winner::Spoiler);
    }

    #[test]
    fn discard_is_idempotent_and_keeps_matching_fixed_points() {
        let a = digraph(2, &[(0, 1)]);
        let pos = singletons(a.clone(), a, 2);
        let d = discard(&pos);
        assert_eq!(d, discard(&d));
        assert_eq!(d.left.len(), 1);
        assert_eq!(d.right.len(), 1);
    }

    #[test]
    fn reused_color_is_rejected() {
        let a = digraph(2, &[]);
        let p = PebbledStructure::new(a.clone(), vec![("x1".into(), 0)]).unwrap();
        let q = PebbledStructure::new(a, vec![("x1".into(), 0)]).unwrap();
        let pos = MsPosition::new(vec![p], vec![q], 1).unwrap();
        let mv = SpoilerMove {
            side: Side::Left,
            color: "x1".into(),
            placement: vec![0],
        };
        assert!(oblivious_response(&pos, &mv).is_err());
    }

    #[test]
    fn certificate_replays_to_a_win() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let pos = singletons(a, b, 2);
        let res = ms_winner_certified(&pos, SearchLimits::default());
        assert_eq!(res.winner, Winner::Spoiler);
        let line = res.certificate.unwrap();
        assert!(line.len() <= 2);
        let trace = certificate_to_trace(&pos, &line).unwrap();
        assert!(trace.won);
    }
}
