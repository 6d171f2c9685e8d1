//! Separation testing and bounded synthesis of separating formulas.
//!
//! Synthesis enumerates quantifier prefixes (fewer universals first,
//! lexicographic within) and matrices that are disjunctions of type
//! conjunctions realized in the input structures. Candidate matrices are
//! generated as unions of per-structure minimal witness sets, which covers
//! every separator expressible as a disjunction of realized types.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::CoreError;
use crate::formula::{evaluate, Atom, Formula, Nnf, Quantifier, Term};
use crate::structure::{Element, PebbledStructure};

/// The atomic formulas over a fixed term pool, in a deterministic order.
#[derive(Debug, Clone)]
pub struct AtomPool {
    pub terms: Vec<Term>,
    pub atoms: Vec<Atom>,
}

impl AtomPool {
    /// Pool over the given constants, free variables, and bound variables:
    /// equality atoms on all unordered term pairs, then every relation atom.
    pub fn build(
        schema: &crate::structure::Schema,
        free_vars: &[String],
        bound_vars: &[String],
    ) -> Self {
        let mut terms: Vec<Term> = Vec::new();
        for c in schema.constants() {
            terms.push(Term::Const(c.clone()));
        }
        for v in free_vars {
            terms.push(Term::Var(v.clone()));
        }
        for v in bound_vars {
            terms.push(Term::Var(v.clone()));
        }
        let mut atoms = Vec::new();
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                atoms.push(Atom::Eq(terms[i].clone(), terms[j].clone()));
            }
        }
        for (name, arity) in schema.relations() {
            let mut idx = vec![0usize; *arity];
            if terms.is_empty() {
                continue;
            }
            loop {
                atoms.push(Atom::Rel {
                    relation: name.clone(),
                    args: idx.iter().map(|&i| terms[i].clone()).collect(),
                });
                let mut k = *arity;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < terms.len() {
                        break;
                    }
                    idx[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
        }
        AtomPool { terms, atoms }
    }
}

/// Truth bits of every pool atom under a full valuation of the pool terms
/// (`term_values` aligned with `pool.terms`).
pub fn atom_bits(
    pool: &AtomPool,
    s: &crate::structure::Structure,
    term_values: &[Element],
) -> Vec<u64> {
    assert_eq!(term_values.len(), pool.terms.len());
    let index: BTreeMap<&Term, usize> = pool
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let mut bits = vec![0u64; pool.atoms.len().div_ceil(64)];
    for (ai, atom) in pool.atoms.iter().enumerate() {
        let value = |t: &Term| term_values[index[t]];
        let holds = match atom {
            Atom::Eq(a, b) => value(a) == value(b),
            Atom::Rel { relation, args } => {
                let ri = s
                    .schema()
                    .relation_index(relation)
                    .expect("pool relation in schema");
                let tuple: Vec<Element> = args.iter().map(&value).collect();
                s.holds(ri, &tuple)
            }
        };
        if holds {
            bits[ai >> 6] |= 1u64 << (ai & 63);
        }
    }
    bits
}

/// A conjunction fixing a polarity for every atom in a pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeConjunction {
    pub polarities: Vec<bool>,
}

impl TypeConjunction {
    pub fn new(pool: &AtomPool, polarities: Vec<bool>) -> Result<Self, CoreError> {
        if polarities.len() != pool.atoms.len() {
            return Err(CoreError::InvalidStructure(format!(
                "type fixes {} polarities for a pool of {} atoms",
                polarities.len(),
                pool.atoms.len()
            )));
        }
        Ok(TypeConjunction { polarities })
    }

    pub fn to_nnf(&self, pool: &AtomPool) -> Nnf {
        Nnf::And(
            pool.atoms
                .iter()
                .zip(&self.polarities)
                .map(|(atom, &positive)| Nnf::Lit {
                    atom: atom.clone(),
                    positive,
                })
                .collect(),
        )
    }
}

/// Shared pebble colors of a family of pebbled structures, or an error if
/// they disagree.
fn shared_colors(sets: &[&[PebbledStructure]]) -> Result<Vec<String>, CoreError> {
    let mut colors: Option<BTreeSet<String>> = None;
    for set in sets {
        for p in *set {
            let cs: BTreeSet<String> = p.pebbles.iter().map(|(c, _)| c.clone()).collect();
            match &colors {
                None => colors = Some(cs),
                Some(existing) => {
                    if *existing != cs {
                        return Err(CoreError::SchemaMismatch(
                            "structures are pebbled with different color sets".into(),
                        ));
                    }
                }
            }
        }
    }
    Ok(colors.unwrap_or_default().into_iter().collect())
}

/// True iff every member of `left` satisfies `phi` under its pebble
/// assignment and every member of `right` satisfies its negation.
pub fn separates(
    phi: &Formula,
    left: &[PebbledStructure],
    right: &[PebbledStructure],
) -> Result<bool, CoreError> {
    let colors = shared_colors(&[left, right])?;
    let free: BTreeSet<&String> = phi.free_vars.iter().collect();
    let colorset: BTreeSet<&String> = colors.iter().collect();
    if free != colorset {
        return Err(CoreError::SchemaMismatch(format!(
            "free variables {:?} do not match pebble colors {:?}",
            phi.free_vars, colors
        )));
    }
    for p in left {
        let asg: BTreeMap<String, Element> =
            p.pebbles.iter().map(|(c, e)| (c.clone(), *e)).collect();
        if !evaluate(&p.structure, phi, &asg)? {
            return Ok(false);
        }
    }
    for q in right {
        let asg: BTreeMap<String, Element> =
            q.pebbles.iter().map(|(c, e)| (c.clone(), *e)).collect();
        if evaluate(&q.structure, phi, &asg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy)]
pub struct SynthLimits {
    /// Cap on (prefix, matrix) candidates tried before giving up.
    pub max_candidates: u64,
    /// Cap on internal search nodes (witness-set construction).
    pub max_nodes: u64,
}

impl Default for SynthLimits {
    fn default() -> Self {
        SynthLimits {
            max_candidates: 1 << 22,
            max_nodes: 1 << 26,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SynthStats {
    pub candidates_enumerated: u64,
    pub nodes: u64,
}

#[derive(Debug, Clone)]
pub enum SynthOutcome {
    /// A separating formula with at most the requested quantifier count,
    /// verified by `separates`.
    Found(Formula),
    /// The complete enumeration was exhausted; no separator exists.
    NoneExists,
    /// The budget ran out before the enumeration completed.
    Unknown,
}

struct Budget {
    limits: SynthLimits,
    stats: SynthStats,
    blown: bool,
}

impl Budget {
    fn node(&mut self) -> bool {
        self.stats.nodes += 1;
        if self.stats.nodes > self.limits.max_nodes {
            self.blown = true;
        }
        !self.blown
    }
    fn candidate(&mut self) -> bool {
        self.stats.candidates_enumerated += 1;
        if self.stats.candidates_enumerated > self.limits.max_candidates {
            self.blown = true;
        }
        !self.blown
    }
}

type TypeId = u16;
type WitnessSet = Vec<TypeId>; // sorted, deduplicated

fn union_sorted(a: &WitnessSet, b: &WitnessSet) -> WitnessSet {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn is_subset(a: &WitnessSet, b: &WitnessSet) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Keep only the minimal sets under inclusion, deduplicated, sorted.
fn antichain(mut sets: Vec<WitnessSet>) -> Vec<WitnessSet> {
    sets.sort();
    sets.dedup();
    let mut keep: Vec<bool> = vec![true; sets.len()];
    for i in 0..sets.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..sets.len() {
            if i != j && keep[j] && is_subset(&sets[i], &sets[j]) && sets[i] != sets[j] {
                keep[j] = false;
            }
        }
    }
    sets.into_iter()
        .zip(keep)
        .filter_map(|(s, k)| if k { Some(s) } else { None })
        .collect()
}

/// Precomputed per-structure data: the realized type of every assignment of
/// the bound variables.
struct StructTypes {
    n: usize,
    m: usize,
    type_of: Vec<TypeId>, // indexed by mixed-radix assignment rank
}

fn realize_types(
    p: &PebbledStructure,
    colors: &[String],
    pool: &AtomPool,
    m: usize,
    interner: &mut BTreeMap<Vec<u64>, TypeId>,
) -> StructTypes {
    let s = &p.structure;
    let n = s.universe_size() as usize;
    let pebble_of: BTreeMap<&str, Element> = p
        .pebbles
        .iter()
        .map(|(c, e)| (c.as_str(), *e))
        .collect();
    // resolve each pool term to either a fixed element or a bound slot
    enum Slot {
        Fixed(Element),
        Bound(usize),
    }
    let free_index: BTreeMap<&str, usize> = colors
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let slots: Vec<Slot> = pool
        .terms
        .iter()
        .map(|t| match t {
            Term::Const(c) => {
                let idx = s.schema().constant_index(c).expect("validated");
                Slot::Fixed(s.constant_value(idx))
            }
            Term::Var(v) => match free_index.get(v.as_str()) {
                Some(_) => Slot::Fixed(*pebble_of.get(v.as_str()).expect("validated")),
                None => {
                    // bound variables follow the free ones in pool order
                    let pos = pool
                        .terms
                        .iter()
                        .filter_map(|t2| match t2 {
                            Term::Var(v2) if !free_index.contains_key(v2.as_str()) => Some(v2),
                            _ => None,
                        })
                        .position(|v2| v2 == v)
                        .expect("bound variable in pool");
                    Slot::Bound(pos)
                }
            },
        })
        .collect();
    let term_index: BTreeMap<&Term, usize> = pool
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let count = n.pow(m as u32).max(1);
    let mut type_of = Vec::with_capacity(count);
    let mut assignment = vec![0 as Element; m];
    let nbits = pool.atoms.len();
    for rank in 0..count {
        let mut r = rank;
        for slot in (0..m).rev() {
            assignment[slot] = (r % n) as Element;
            r /= n;
        }
        let value = |t: &Term| -> Element {
            match &slots[term_index[t]] {
                Slot::Fixed(e) => *e,
                Slot::Bound(i) => assignment[*i],
            }
        };
        let mut bits = vec![0u64; nbits.div_ceil(64)];
        for (ai, atom) in pool.atoms.iter().enumerate() {
            let holds = match atom {
                Atom::Eq(a, b) => value(a) == value(b),
                Atom::Rel { relation, args } => {
                    let ri = s.schema().relation_index(relation).expect("validated");
                    let tuple: Vec<Element> = args.iter().map(&value).collect();
                    s.holds(ri, &tuple)
                }
            };
            if holds {
                bits[ai >> 6] |= 1u64 << (ai & 63);
            }
        }
        let next = interner.len() as TypeId;
        let id = *interner.entry(bits).or_insert(next);
        type_of.push(id);
    }
    StructTypes { n, m, type_of }
}

/// Antichain of minimal witness sets: the minimal sets S of leaf types such
/// that the structure satisfies `prefix . ⋁S`.
fn witness_sets(
    st: &StructTypes,
    prefix: &[Quantifier],
    level: usize,
    rank: usize,
    budget: &mut Budget,
) -> Vec<WitnessSet> {
    if !budget.node() {
        return Vec::new();
    }
    if level == st.m {
        return vec![vec![st.type_of[rank]]];
    }
    let stride = st.n.pow((st.m - level - 1) as u32);
    match prefix[level] {
        Quantifier::Exists => {
            let mut all = Vec::new();
            for e in 0..st.n {
                all.extend(witness_sets(st, prefix, level + 1, rank + e * stride, budget));
                if budget.blown {
                    return Vec::new();
                }
            }
            antichain(all)
        }
        Quantifier::Forall => {
            let mut acc: Vec<WitnessSet> = vec![Vec::new()];
            for e in 0..st.n {
                let child = witness_sets(st, prefix, level + 1, rank + e * stride, budget);
                if budget.blown {
                    return Vec::new();
                }
                let mut next = Vec::with_capacity(acc.len() * child.len());
                for a in &acc {
                    for c in &child {
                        next.push(union_sorted(a, c));
                        budget.stats.nodes += 1;
                    }
                }
                acc = antichain(next);
                if acc.len() as u64 > budget.limits.max_candidates {
                    budget.blown = true;
                    return Vec::new();
                }
            }
            acc
        }
    }
}

/// Does the structure satisfy `prefix . ⋁S`?
fn models_disjunction(
    st: &StructTypes,
    prefix: &[Quantifier],
    level: usize,
    rank: usize,
    s: &WitnessSet,
) -> bool {
    if level == st.m {
        return s.binary_search(&st.type_of[rank]).is_ok();
    }
    let stride = st.n.pow((st.m - level - 1) as u32);
    let exists = prefix[level] == Quantifier::Exists;
    for e in 0..st.n {
        if models_disjunction(st, prefix, level + 1, rank + e * stride, s) == exists {
            return exists;
        }
    }
    !exists
}

/// Names for bound variables that do not collide with the free colors.
fn bound_var_names(colors: &[String], m: usize) -> Vec<String> {
    let taken: BTreeSet<&str> = colors.iter().map(|s| s.as_str()).collect();
    let mut base = 0usize;
    for c in colors {
        if let Some(rest) = c.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                base = base.max(i);
            }
        }
    }
    let mut names = Vec::with_capacity(m);
    let mut next = base + 1;
    while names.len() < m {
        let cand = format!("x{next}");
        if !taken.contains(cand.as_str()) {
            names.push(cand);
        }
        next += 1;
    }
    names
}

/// All prefixes of length m, fewer universals first, lexicographic within
/// (Exists before Forall).
fn prefixes(m: usize) -> Vec<Vec<Quantifier>> {
    let mut all: Vec<Vec<Quantifier>> = Vec::with_capacity(1 << m);
    for mask in 0..(1u32 << m) {
        let p: Vec<Quantifier> = (0..m)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                }
            })
            .collect();
        all.push(p);
    }
    all.sort_by_key(|p| {
        let foralls = p.iter().filter(|q| **q == Quantifier::Forall).count();
        let lex: Vec<u8> = p.iter().map(|q| (*q == Quantifier::Forall) as u8).collect();
        (foralls, lex)
    });
    all
}

/// Search for a separating formula with at most `max_quantifiers`
/// quantifiers. Returns the first formula found in enumeration order,
/// `NoneExists` after exhausting the enumeration, or `Unknown` on budget
/// exhaustion.
pub fn synth_separating(
    left: &[PebbledStructure],
    right: &[PebbledStructure],
    max_quantifiers: usize,
    limits: SynthLimits,
) -> Result<(SynthOutcome, SynthStats), CoreError> {
    let colors = shared_colors(&[left, right])?;
    let schema = match left.iter().chain(right.iter()).next() {
        Some(p) => p.structure.schema().clone(),
        None => {
            return Ok((
                SynthOutcome::Found(Formula::new(vec![], Nnf::FALSE, vec![])?),
                SynthStats::default(),
            ))
        }
    };
    for p in left.iter().chain(right.iter()) {
        if p.structure.schema() != &schema {
            return Err(CoreError::SchemaMismatch(
                "synthesis inputs share a schema".into(),
            ));
        }
    }
    let mut budget = Budget {
        limits,
        stats: SynthStats::default(),
        blown: false,
    };
    for m in 0..=max_quantifiers {
        let bound = bound_var_names(&colors, m);
        let pool = AtomPool::build(&schema, &colors, &bound);
        let mut interner: BTreeMap<Vec<u64>, TypeId> = BTreeMap::new();
        let left_types: Vec<StructTypes> = left
            .iter()
            .map(|p| realize_types(p, &colors, &pool, m, &mut interner))
            .collect();
        let right_types: Vec<StructTypes> = right
            .iter()
            .map(|p| realize_types(p, &colors, &pool, m, &mut interner))
            .collect();
        let bits_of: Vec<Vec<u64>> = {
            let mut v = vec![Vec::new(); interner.len()];
            for (bits, id) in &interner {
                v[*id as usize] = bits.clone();
            }
            v
        };
        for prefix in prefixes(m) {
            // candidate matrices: unions of one minimal witness set per
            // left structure
            let mut candidates: Vec<WitnessSet> = vec![Vec::new()];
            for st in &left_types {
                let sets = witness_sets(st, &prefix, 0, 0, &mut budget);
                if budget.blown {
                    return Ok((SynthOutcome::Unknown, budget.stats));
                }
                if sets.is_empty() {
                    // no strategy at all (empty universe): this structure
                    // satisfies no existential formula; no separator with
                    // this prefix
                    candidates.clear();
                    break;
                }
                let mut next = Vec::with_capacity(candidates.len() * sets.len());
                for c in &candidates {
                    for s in &sets {
                        next.push(union_sorted(c, s));
                    }
                }
                candidates = antichain(next);
                if candidates.len() as u64 > budget.limits.max_candidates {
                    return Ok((SynthOutcome::Unknown, budget.stats));
                }
            }
            candidates.sort();
            candidates.dedup();
            for cand in candidates {
                if !budget.candidate() {
                    return Ok((SynthOutcome::Unknown, budget.stats));
                }
                let bad = right_types
                    .iter()
                    .any(|st| models_disjunction(st, &prefix, 0, 0, &cand));
                if bad {
                    continue;
                }
                // build the concrete formula and self-verify
                let matrix = Nnf::Or(
                    cand.iter()
                        .map(|&id| {
                            let bits = &bits_of[id as usize];
                            let polarities: Vec<bool> = (0..pool.atoms.len())
                                .map(|i| bits[i >> 6] & (1u64 << (i & 63)) != 0)
                                .collect();
                            TypeConjunction { polarities }.to_nnf(&pool)
                        })
                        .collect(),
                );
                let phi = Formula::new(
                    prefix
                        .iter()
                        .zip(&bound)
                        .map(|(q, v)| (*q, v.clone()))
                        .collect(),
                    matrix,
                    colors.clone(),
                )?;
                if !separates(&phi, left, right)? {
                    return Err(CoreError::InvalidStructure(
                        "internal error: synthesized formula failed verification".into(),
                    ));
                }
                return Ok((SynthOutcome::Found(phi), budget.stats));
            }
        }
    }
    if budget.blown {
        Ok((SynthOutcome::Unknown, budget.stats))
    } else {
        Ok((SynthOutcome::NoneExists, budget.stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{Schema, Structure};
    use std::sync::Arc;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> PebbledStructure {
        let mut b = Structure::builder(Schema::digraph(), n);
        for &(u, v) in edges {
            b.add_edge("E", u, v).unwrap();
        }
        PebbledStructure::unpebbled(Arc::new(b.finish().unwrap()))
    }

    #[test]
    fn separates_single_edge_from_edgeless() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let phi = Formula::parse("EXISTS x1 EXISTS x2 . E(x1,x2)", a.structure.schema()).unwrap();
        assert!(separates(&phi, &[a.clone()], &[b.clone()]).unwrap());
        assert!(!separates(&phi, &[a.clone()], &[a]).unwrap());
    }

    #[test]
    fn synth_finds_two_quantifier_separator() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let (out, _) =
            synth_separating(&[a.clone()], &[b.clone()], 2, SynthLimits::default()).unwrap();
        match out {
            SynthOutcome::Found(phi) => {
                assert!(phi.quantifier_count() <= 2);
                assert!(separates(&phi, &[a], &[b]).unwrap());
            }
            other => panic!("expected a separator, got {other:?}"),
        }
    }

    #[test]
    fn synth_exhausts_one_quantifier_space() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let (out, stats) = synth_separating(&[a], &[b], 1, SynthLimits::default()).unwrap();
        assert!(matches!(out, SynthOutcome::NoneExists), "{out:?}");
        assert!(stats.candidates_enumerated > 0);
    }

    #[test]
    fn identical_sides_have_no_separator() {
        let a = digraph(3, &[(0, 1)]);
        let (out, _) =
            synth_separating(&[a.clone()], &[a], 2, SynthLimits::default()).unwrap();
        assert!(matches!(out, SynthOutcome::NoneExists));
    }

    #[test]
    fn free_variable_separation() {
        // same structure, different pebbles: x1 on a source vs on a sink
        let mut b = Structure::builder(Schema::digraph(), 2);
        b.add_edge("E", 0, 1).unwrap();
        let s = Arc::new(b.finish().unwrap());
        let p = PebbledStructure::new(s.clone(), vec![("x1".into(), 0)]).unwrap();
        let q = PebbledStructure::new(s, vec![("x1".into(), 1)]).unwrap();
        let (out, _) =
            synth_separating(&[p.clone()], &[q.clone()], 1, SynthLimits::default()).unwrap();
        match out {
            SynthOutcome::Found(phi) => {
                assert_eq!(phi.free_vars, vec!["x1".to_string()]);
                assert!(separates(&phi, &[p], &[q]).unwrap());
            }
            other => panic!("expected separator, got {other:?}"),
        }
    }
}
