//! Scripted strategies: replayable Spoiler policies executed against the
//! oblivious Duplicator, restricted Duplicator policies validated against an
//! exhaustive Spoiler, the parallel-play combinator, and the extraction of
//! separating formulas from winning traces.

pub mod domset;
pub mod skyscraper;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use gamelab_core::formula::{Formula, Nnf, Quantifier};
use gamelab_core::perm::{canonical_vector, Perm};
use gamelab_core::structure::{Element, PebbledStructure, Structure};
use gamelab_core::synth::{atom_bits, AtomPool, TypeConjunction};
use gamelab_core::CoreError;
use thiserror::Error;

use crate::limits::{SearchLimits, Ticker};
use crate::ms::{
    discard, oblivious_response, Entry, MsPosition, MsTrace, RoundRecord, Side, SpoilerMove,
};

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("script error: {0}")]
    Script(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

/// A deterministic Spoiler policy: a declared side sequence and a placement
/// rule evaluated per pebbled structure. The rule sees only the structure
/// and its own pebble vector, which keeps scripts replayable on shadow
/// copies during certificate extraction.
pub struct SpoilerScript {
    pub name: String,
    pub sides: Vec<Side>,
    #[allow(clippy::type_complexity)]
    pub place: Box<dyn Fn(usize, &Arc<Structure>, &[Element]) -> Result<Element, GameError> + Send + Sync>,
    /// Block partition for composed scripts; the executor checks the
    /// no-cross-block-matching condition at the end when present.
    blocks: Option<BlockInfo>,
}

struct BlockInfo {
    /// initial pebble count, identifying an entry's origin prefix
    base_pebbles: usize,
    /// (structure, pebble prefix) -> block id, per side
    left: Vec<(Arc<Structure>, Vec<Element>, usize)>,
    right: Vec<(Arc<Structure>, Vec<Element>, usize)>,
}

impl BlockInfo {
    fn block_of(&self, side: Side, s: &Arc<Structure>, pebbles: &[Element]) -> Option<usize> {
        let table = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        let prefix = &pebbles[..self.base_pebbles.min(pebbles.len())];
        table
            .iter()
            .find(|(t, p, _)| Arc::ptr_eq(t, s) && p == prefix)
            .map(|(_, _, b)| *b)
    }
}

impl SpoilerScript {
    pub fn new(
        name: impl Into<String>,
        sides: Vec<Side>,
        place: impl Fn(usize, &Arc<Structure>, &[Element]) -> Result<Element, GameError>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        SpoilerScript {
            name: name.into(),
            sides,
            place: Box::new(place),
            blocks: None,
        }
    }
}

/// Outcome of a script run: the winning trace, or the position at which
/// matching pairs survived.
pub enum RunOutcome {
    Win(MsTrace),
    Fail(MsTrace),
}

impl RunOutcome {
    pub fn trace(&self) -> &MsTrace {
        match self {
            RunOutcome::Win(t) | RunOutcome::Fail(t) => t,
        }
    }
    pub fn is_win(&self) -> bool {
        matches!(self, RunOutcome::Win(_))
    }
}

/// Simulate the script against the oblivious Duplicator, discarding after
/// every round. Win iff all matching pairs are destroyed by round
/// exhaustion (possibly early).
pub fn run_spoiler_script(
    script: &SpoilerScript,
    pos: &MsPosition,
) -> Result<RunOutcome, GameError> {
    if script.sides.len() as u32 > pos.rounds_remaining {
        return Err(GameError::Script(format!(
            "script `{}` declares {} rounds but the position allows {}",
            script.name,
            script.sides.len(),
            pos.rounds_remaining
        )));
    }
    let initial = pos.clone();
    let mut current = discard(pos);
    let mut rounds = Vec::new();
    for (r, &side) in script.sides.iter().enumerate() {
        if !current.has_matching_pair() {
            break; // early win
        }
        let color = current.fresh_color();
        let entries = current.side(side).to_vec();
        let mut placement = Vec::with_capacity(entries.len());
        let mut placements = BTreeMap::new();
        for (sid, peb) in &entries {
            let s = &current.structures[*sid];
            let e = (script.place)(r, s, peb)?;
            if e >= s.universe_size() {
                return Err(GameError::Script(format!(
                    "script `{}` placed on element {e} outside a universe of size {}",
                    script.name,
                    s.universe_size()
                )));
            }
            placement.push(e);
            placements.insert((*sid, peb.clone()), e);
        }
        let mv = SpoilerMove {
            side,
            color: color.clone(),
            placement,
        };
        current = discard(&oblivious_response(&current, &mv)?);
        rounds.push(RoundRecord {
            side,
            color,
            placements,
        });
    }
    let mut won = !current.has_matching_pair();
    if won {
        if let Some(blocks) = &script.blocks {
            // Lemma 2.4 condition 2: no matching pair between different
            // blocks at the end of the sub-games. The oblivious run keeps no
            // cross pairs at all when it wins, so the check inspects the
            // last position that still had entries.
            won = check_no_cross_block_matches(&initial, &rounds, blocks)?;
        }
    }
    let trace = MsTrace {
        initial,
        rounds,
        final_position: current,
        won,
    };
    Ok(if trace.won {
        RunOutcome::Win(trace)
    } else {
        RunOutcome::Fail(trace)
    })
}

fn check_no_cross_block_matches(
    initial: &MsPosition,
    rounds: &[RoundRecord],
    blocks: &BlockInfo,
) -> Result<bool, GameError> {
    // replay without the final discard to view the last full round state
    let mut pos = discard(initial);
    for rec in rounds {
        let entries = pos.side(rec.side).to_vec();
        let placement: Vec<Element> = entries
            .iter()
            .map(|e| rec.placements.get(e).copied().unwrap_or(0))
            .collect();
        let mv = SpoilerMove {
            side: rec.side,
            color: rec.color.clone(),
            placement,
        };
        let next = oblivious_response(&pos, &mv)?;
        // check cross-block matches among pre-discard entries
        for (si, sp) in &next.left {
            for (ti, tp) in &next.right {
                if gamelab_core::structure::vectors_match(
                    &next.structures[*si],
                    sp,
                    &next.structures[*ti],
                    tp,
                ) {
                    let bl = blocks.block_of(Side::Left, &next.structures[*si], sp);
                    let br = blocks.block_of(Side::Right, &next.structures[*ti], tp);
                    if let (Some(bl), Some(br)) = (bl, br) {
                        if bl != br {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        pos = discard(&next);
    }
    Ok(true)
}

/// Merge per-block Spoiler scripts over disjoint sub-games sharing one side
/// sequence.
pub fn parallel_compose(
    blocks: Vec<(Vec<PebbledStructure>, Vec<PebbledStructure>, SpoilerScript)>,
    sides: Vec<Side>,
) -> Result<SpoilerScript, GameError> {
    for (_, _, script) in &blocks {
        if script.sides != sides {
            return Err(GameError::Composition(format!(
                "script `{}` declares side sequence {:?}, expected {:?}",
                script.name, script.sides, sides
            )));
        }
    }
    let mut base_pebbles = None;
    let mut left_table = Vec::new();
    let mut right_table = Vec::new();
    for (bi, (ls, rs, _)) in blocks.iter().enumerate() {
        for p in ls {
            let sorted: Vec<Element> = p.sorted_pebbles().iter().map(|(_, e)| *e).collect();
            match base_pebbles {
                None => base_pebbles = Some(sorted.len()),
                Some(k) if k != sorted.len() => {
                    return Err(GameError::Composition(
                        "blocks disagree on the pebble count".into(),
                    ))
                }
                _ => {}
            }
            left_table.push((p.structure.clone(), sorted, bi));
        }
        for p in rs {
            let sorted: Vec<Element> = p.sorted_pebbles().iter().map(|(_, e)| *e).collect();
            right_table.push((p.structure.clone(), sorted, bi));
        }
    }
    let info = BlockInfo {
        base_pebbles: base_pebbles.unwrap_or(0),
        left: left_table,
        right: right_table,
    };
    let scripts: Vec<(Arc<Structure>, Vec<Element>, usize)> = info.left.clone();
    let placers: Vec<_> = blocks.into_iter().map(|(_, _, s)| s).collect();
    let name = format!(
        "compose({})",
        placers
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            .join("+")
    );
    let base = info.base_pebbles;
    let place = move |round: usize, s: &Arc<Structure>, peb: &[Element]| {
        let prefix = &peb[..base.min(peb.len())];
        let block = scripts
            .iter()
            .find(|(t, p, _)| Arc::ptr_eq(t, s) && p == prefix)
            .map(|(_, _, b)| *b);
        match block {
            Some(b) => (placers[b].place)(round, s, peb),
            None => (placers
                .first()
                .ok_or_else(|| GameError::Composition("no blocks".into()))?
                .place)(round, s, peb),
        }
    };
    Ok(SpoilerScript {
        name,
        sides,
        place: Box::new(place),
        blocks: Some(info),
    })
}

impl Clone for BlockInfo {
    fn clone(&self) -> Self {
        BlockInfo {
            base_pebbles: self.base_pebbles,
            left: self.left.clone(),
            right: self.right.clone(),
        }
    }
}

/// A restricted Duplicator policy: a small response set per structure on
/// her side, given Spoiler's move.
pub struct DuplicatorScript {
    pub name: String,
    #[allow(clippy::type_complexity)]
    pub respond: Box<
        dyn Fn(usize, &Arc<Structure>, &[Element], Side, &BTreeMap<Entry, Element>) -> Vec<Element>
            + Send
            + Sync,
    >,
}

/// Validate a Duplicator strategy by exhaustive Spoiler enumeration: true
/// iff for every Spoiler move sequence the strategy's response sets keep a
/// matching pair through all rounds. A true result certifies that
/// Duplicator wins; false only means this strategy failed.
pub fn check_duplicator_strategy(
    strategy: &DuplicatorScript,
    pos: &MsPosition,
    limits: SearchLimits,
) -> Result<bool, GameError> {
    let mut ticker = Ticker::new(limits);
    let survives = duplicator_survives(strategy, pos, &mut ticker)?;
    Ok(survives)
}

fn duplicator_survives(
    strategy: &DuplicatorScript,
    pos: &MsPosition,
    ticker: &mut Ticker,
) -> Result<bool, GameError> {
    if !pos.has_matching_pair() {
        return Ok(false);
    }
    if pos.rounds_remaining == 0 {
        return Ok(true);
    }
    if !ticker.tick() {
        return Err(GameError::Budget(format!(
            "strategy check exceeded {} nodes",
            ticker.limits.max_nodes
        )));
    }
    let color = pos.fresh_color();
    for side in [Side::Left, Side::Right] {
        let entries = pos.side(side).to_vec();
        if entries.is_empty() {
            continue;
        }
        let sizes: Vec<u32> = entries
            .iter()
            .map(|(sid, _)| pos.structures[*sid].universe_size())
            .collect();
        if sizes.iter().any(|&n| n == 0) {
            continue;
        }
        let mut placement: Vec<Element> = vec![0; entries.len()];
        let mut seen: HashSet<(Vec<Entry>, Vec<Entry>)> = HashSet::new();
        'placements: loop {
            if !ticker.tick() {
                return Err(GameError::Budget("strategy check budget".into()));
            }
            // Spoiler's move extends his side
            let mut own_next: Vec<Entry> = Vec::new();
            let mut placements: BTreeMap<Entry, Element> = BTreeMap::new();
            for ((sid, peb), &e) in entries.iter().zip(&placement) {
                let mut p = peb.clone();
                p.push(e);
                own_next.push((*sid, p));
                placements.insert((*sid, peb.clone()), e);
            }
            // the strategy's response sets build the other side
            let other = pos.side(side.opposite());
            let mut other_next: Vec<Entry> = Vec::new();
            for (sid, peb) in other {
                let s = &pos.structures[*sid];
                for e in (strategy.respond)(
                    (pos.colors_used.len()) as usize,
                    s,
                    peb,
                    side,
                    &placements,
                ) {
                    if e >= s.universe_size() {
                        return Err(GameError::Script(format!(
                            "duplicator script `{}` responded outside the universe",
                            strategy.name
                        )));
                    }
                    let mut p = peb.clone();
                    p.push(e);
                    other_next.push((*sid, p));
                }
            }
            other_next.sort();
            other_next.dedup();
            own_next.sort();
            own_next.dedup();
            let (left, right) = match side {
                Side::Left => (own_next, other_next),
                Side::Right => (other_next, own_next),
            };
            let mut colors = pos.colors_used.clone();
            colors.push(color.clone());
            let next = MsPosition {
                structures: pos.structures.clone(),
                left,
                right,
                rounds_remaining: pos.rounds_remaining - 1,
                colors_used: colors,
            };
            if seen.insert((next.left.clone(), next.right.clone()))
                && !duplicator_survives(strategy, &next, ticker)?
            {
                return Ok(false);
            }
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
    Ok(true)
}

/// Options for certificate extraction.
pub struct CertificateOptions {
    /// Automorphism generators per structure id of the trace's position, for
    /// orbit-deduplicated shadow evaluation. May be empty.
    pub generators: Vec<Vec<Perm>>,
    pub orbit_cap: usize,
    /// Cap on shadow evaluation nodes; beyond it the disjointness check is
    /// reported as unresolved.
    pub shadow_node_cap: u64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            generators: Vec::new(),
            orbit_cap: 512,
            shadow_node_cap: 20_000_000,
        }
    }
}

pub struct Certificate {
    pub formula: Formula,
    /// Exhaustive check that the shadow evaluation trees of the two sides
    /// realize disjoint final types, which proves the formula separates the
    /// original instance. None when the shadow cap was hit.
    pub shadow_disjoint: Option<bool>,
    pub left_leaf_types: usize,
    pub right_leaf_types: usize,
}

/// Convert a winning trace into a separating formula. Left-side Spoiler
/// rounds become existential quantifiers, right-side rounds universal; the
/// matrix is the disjunction of the realized type conjunctions of the final
/// left side of the full (undiscarded) evaluation tree.
pub fn ms_strategy_to_formula(
    trace: &MsTrace,
    opts: &CertificateOptions,
) -> Result<Certificate, GameError> {
    if !trace.won {
        return Err(GameError::Script(
            "certificates are extracted from winning traces only".into(),
        ));
    }
    let pos = &trace.initial;
    let colors = pos.colors_used.clone();
    let bound: Vec<String> = trace.rounds.iter().map(|r| r.color.clone()).collect();
    let schema = match pos.structures.first() {
        Some(s) => s.schema().clone(),
        None => {
            // degenerate empty position: FALSE separates
            let phi = Formula::new(vec![], Nnf::FALSE, vec![])?;
            return Ok(Certificate {
                formula: phi,
                shadow_disjoint: Some(true),
                left_leaf_types: 0,
                right_leaf_types: 0,
            });
        }
    };
    let pool = AtomPool::build(&schema, &colors, &bound);
    let mut nodes: u64 = 0;
    let left_types = shadow_types(trace, Side::Left, &pool, opts, &mut nodes)
        .ok_or_else(|| GameError::Budget("shadow evaluation of the left side hit its cap".into()))?;
    let right_types = shadow_types(trace, Side::Right, &pool, opts, &mut nodes);
    let prefix: Vec<(Quantifier, String)> = trace
        .rounds
        .iter()
        .map(|r| {
            (
                match r.side {
                    Side::Left => Quantifier::Exists,
                    Side::Right => Quantifier::Forall,
                },
                r.color.clone(),
            )
        })
        .collect();
    let matrix = Nnf::Or(
        left_types
            .iter()
            .map(|bits| {
                let polarities: Vec<bool> = (0..pool.atoms.len())
                    .map(|i| bits[i >> 6] & (1u64 << (i & 63)) != 0)
                    .collect();
                TypeConjunction { polarities }.to_nnf(&pool)
            })
            .collect(),
    );
    let formula = Formula::new(prefix, matrix, colors)?;
    let shadow_disjoint = right_types.as_ref().map(|r| left_types.is_disjoint(r));
    Ok(Certificate {
        formula,
        shadow_disjoint,
        left_leaf_types: left_types.len(),
        right_leaf_types: right_types.map(|t| t.len()).unwrap_or(0),
    })
}

/// Final realized types of one side of the full evaluation tree: the side's
/// entries evolve by the recorded placements on the rounds it was played
/// (element 0 on copies that had been discarded from the live game, which
/// is sound: discarded pairs stay non-matching under any extension) and
/// branch over all elements on the rounds the opponent played. Children are
/// deduplicated up to structure automorphisms.
fn shadow_types(
    trace: &MsTrace,
    side: Side,
    pool: &AtomPool,
    opts: &CertificateOptions,
    nodes: &mut u64,
) -> Option<BTreeSet<Vec<u64>>> {
    let pos = &trace.initial;
    let mut out = BTreeSet::new();
    for entry in pos.side(side) {
        if !shadow_dfs(trace, side, entry.clone(), 0, pool, opts, nodes, &mut out) {
            return None;
        }
    }
    Some(out)
}

#[allow(clippy::too_many_arguments)]
fn shadow_dfs(
    trace: &MsTrace,
    side: Side,
    entry: Entry,
    round: usize,
    pool: &AtomPool,
    opts: &CertificateOptions,
    nodes: &mut u64,
    out: &mut BTreeSet<Vec<u64>>,
) -> bool {
    *nodes += 1;
    if *nodes > opts.shadow_node_cap {
        return false;
    }
    let pos = &trace.initial;
    let (sid, peb) = &entry;
    let s = &pos.structures[*sid];
    if round == trace.rounds.len() {
        // term values: constants, then initial pebbles, then round pebbles
        let mut values: Vec<Element> = Vec::with_capacity(pool.terms.len());
        values.extend_from_slice(s.constant_values());
        values.extend_from_slice(peb);
        out.insert(atom_bits(pool, s, &values));
        return true;
    }
    let rec = &trace.rounds[round];
    if rec.side == side {
        // this side was played: follow the recorded placement, default 0
        let e = rec.placements.get(&entry).copied().unwrap_or(0);
        let mut p = peb.clone();
        p.push(e.min(s.universe_size().saturating_sub(1)));
        shadow_dfs(trace, side, (*sid, p), round + 1, pool, opts, nodes, out)
    } else {
        // opponent played: branch over all elements, orbit-deduplicated
        let gens = opts.generators.get(*sid).map(|v| v.as_slice()).unwrap_or(&[]);
        let mut seen: HashSet<Vec<Element>> = HashSet::new();
        for e in 0..s.universe_size() {
            let mut p = peb.clone();
            p.push(e);
            if !gens.is_empty() {
                let canon = canonical_vector(gens, &p, opts.orbit_cap);
                if !seen.insert(canon) {
                    continue;
                }
            }
            if !shadow_dfs(trace, side, (*sid, p), round + 1, pool, opts, nodes, out) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ms::{ms_winner_certified, singleton_position, certificate_to_trace};
    use gamelab_core::structure::Schema;
    use gamelab_core::synth::separates;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> Arc<Structure> {
        let mut b = Structure::builder(Schema::digraph(), n);
        for &(u, v) in edges {
            b.add_edge("E", u, v).unwrap();
        }
        Arc::new(b.finish().unwrap())
    }

    #[test]
    fn solver_certificate_yields_separating_formula() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let pos = singleton_position(
            PebbledStructure::unpebbled(a.clone()),
            PebbledStructure::unpebbled(b.clone()),
            2,
        )
        .unwrap();
        let res = ms_winner_certified(&pos, SearchLimits::default());
        let line = res.certificate.expect("spoiler wins");
        let trace = certificate_to_trace(&pos, &line).unwrap();
        assert!(trace.won);
        let cert = ms_strategy_to_formula(&trace, &CertificateOptions::default()).unwrap();
        assert_eq!(cert.formula.quantifier_count(), trace.rounds.len());
        assert_eq!(cert.shadow_disjoint, Some(true));
        let la = PebbledStructure::unpebbled(a);
        let rb = PebbledStructure::unpebbled(b);
        assert!(separates(&cert.formula, &[la], &[rb]).unwrap());
    }

    #[test]
    fn mirror_duplicator_defeats_constant_spoiler_check() {
        // identity-mirror strategy on identical singletons survives any m
        let a = digraph(2, &[(0, 1)]);
        let pos = singleton_position(
            PebbledStructure::unpebbled(a.clone()),
            PebbledStructure::unpebbled(a),
            2,
        )
        .unwrap();
        let mirror = DuplicatorScript {
            name: "identity-mirror".into(),
            respond: Box::new(|_round, _s, _peb, _side, placements| {
                placements.values().copied().collect()
            }),
        };
        assert!(check_duplicator_strategy(&mirror, &pos, SearchLimits::default()).unwrap());
    }

    #[test]
    fn mirror_fails_where_spoiler_wins() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let pos = singleton_position(
            PebbledStructure::unpebbled(a),
            PebbledStructure::unpebbled(b),
            2,
        )
        .unwrap();
        let mirror = DuplicatorScript {
            name: "identity-mirror".into(),
            respond: Box::new(|_round, _s, _peb, _side, placements| {
                placements.values().copied().collect()
            }),
        };
        assert!(!check_duplicator_strategy(&mirror, &pos, SearchLimits::default()).unwrap());
    }

    #[test]
    fn composing_mismatched_side_sequences_errors() {
        let s1 = SpoilerScript::new("a", vec![Side::Left, Side::Right], |_, _, _| Ok(0));
        let s2 = SpoilerScript::new("b", vec![Side::Right, Side::Left], |_, _, _| Ok(0));
        let a = digraph(1, &[]);
        let p = PebbledStructure::unpebbled(a);
        let err = parallel_compose(
            vec![
                (vec![p.clone()], vec![p.clone()], s1),
                (vec![p.clone()], vec![p], s2),
            ],
            vec![Side::Left, Side::Right],
        );
        assert!(matches!(err, Err(GameError::Composition(_))));
    }

    #[test]
    fn zero_round_win_gives_quantifier_free_separator() {
        // constant-free schema, sides already non-matching via pebbles
        let a = digraph(2, &[(0, 1)]);
        let pa = PebbledStructure::new(a.clone(), vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        let pb = PebbledStructure::new(a, vec![("x1".into(), 1), ("x2".into(), 0)]).unwrap();
        let pos = MsPosition::new(vec![pa.clone()], vec![pb.clone()], 0).unwrap();
        let res = ms_winner_certified(&pos, SearchLimits::default());
        assert_eq!(res.winner, crate::limits::Winner::Spoiler);
        let trace = certificate_to_trace(&pos, &res.certificate.unwrap()).unwrap();
        let cert = ms_strategy_to_formula(&trace, &CertificateOptions::default()).unwrap();
        assert_eq!(cert.formula.quantifier_count(), 0);
        assert!(separates(&cert.formula, &[pa], &[pb]).unwrap());
    }
}
