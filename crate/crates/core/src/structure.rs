//! Schemas, finite structures, and pebbled structures.
//!
//! Elements are dense integer indices `0..universe_size`. Human-readable
//! names for gadget vertices live in `labels` only. Pebble colors are strings
//! `"x1"`, `"x2"`, ... and the order of the pebble list is placement order.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::CoreError;

pub type Element = u32;

/// A relational vocabulary: named relations with positive arities plus
/// named constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schema {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Schema {
    pub fn new(
        relations: Vec<(String, usize)>,
        constants: Vec<String>,
    ) -> Result<Self, CoreError> {
        let mut seen = BTreeSet::new();
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(CoreError::InvalidSchema(format!(
                    "relation `{name}` has arity 0; arities must be positive"
                )));
            }
            if !seen.insert(name.clone()) {
                return Err(CoreError::InvalidSchema(format!("duplicate name `{name}`")));
            }
        }
        for name in &constants {
            if !seen.insert(name.clone()) {
                return Err(CoreError::InvalidSchema(format!("duplicate name `{name}`")));
            }
        }
        Ok(Schema {
            relations,
            constants,
        })
    }

    /// Schema with a single binary relation `E`: plain directed graphs.
    pub fn digraph() -> Arc<Self> {
        Arc::new(Schema::new(vec![("E".into(), 2)], vec![]).unwrap())
    }

    /// Digraph schema augmented with unary color relations `R`, `G`, `B`.
    pub fn colored_digraph() -> Arc<Self> {
        Arc::new(
            Schema::new(
                vec![
                    ("E".into(), 2),
                    ("R".into(), 1),
                    ("G".into(), 1),
                    ("B".into(), 1),
                ],
                vec![],
            )
            .unwrap(),
        )
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|n| n == name)
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }
}

/// One relation's extension, with a dense lookup table for arity 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<Element>>,
    fast: FastIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FastIndex {
    Unary(Vec<u64>),
    Binary { n: usize, bits: Vec<u64> },
    None,
}

#[inline]
fn bit_get(bits: &[u64], i: usize) -> bool {
    bits[i >> 6] & (1u64 << (i & 63)) != 0
}

#[inline]
fn bit_set(bits: &mut [u64], i: usize) {
    bits[i >> 6] |= 1u64 << (i & 63);
}

impl Relation {
    fn new(arity: usize, n: usize) -> Self {
        let fast = match arity {
            1 => FastIndex::Unary(vec![0; n.div_ceil(64)]),
            2 => FastIndex::Binary {
                n,
                bits: vec![0; (n * n).div_ceil(64)],
            },
            _ => FastIndex::None,
        };
        Relation {
            arity,
            tuples: BTreeSet::new(),
            fast,
        }
    }

    fn insert(&mut self, tuple: Vec<Element>) {
        match &mut self.fast {
            FastIndex::Unary(bits) => bit_set(bits, tuple[0] as usize),
            FastIndex::Binary { n, bits } => {
                bit_set(bits, tuple[0] as usize * *n + tuple[1] as usize)
            }
            FastIndex::None => {}
        }
        self.tuples.insert(tuple);
    }

    #[inline]
    fn contains(&self, tuple: &[Element]) -> bool {
        match &self.fast {
            FastIndex::Unary(bits) => bit_get(bits, tuple[0] as usize),
            FastIndex::Binary { n, bits } => {
                bit_get(bits, tuple[0] as usize * n + tuple[1] as usize)
            }
            FastIndex::None => self.tuples.contains(tuple),
        }
    }
}

/// A finite structure over a schema. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Structure {
    schema: Arc<Schema>,
    universe_size: u32,
    relations: Vec<Relation>,
    constants: Vec<Element>,
    labels: BTreeMap<Element, String>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.universe_size == other.universe_size
            && self.constants == other.constants
            && self.labels == other.labels
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|(a, b)| a.tuples == b.tuples)
    }
}
impl Eq for Structure {}

/// Incremental builder for [`Structure`].
pub struct StructureBuilder {
    schema: Arc<Schema>,
    universe_size: u32,
    relations: Vec<Relation>,
    constants: Vec<Option<Element>>,
    labels: BTreeMap<Element, String>,
}

impl StructureBuilder {
    pub fn new(schema: Arc<Schema>, universe_size: u32) -> Self {
        let relations = schema
            .relations()
            .iter()
            .map(|(_, a)| Relation::new(*a, universe_size as usize))
            .collect();
        let constants = vec![None; schema.constants().len()];
        StructureBuilder {
            schema,
            universe_size,
            relations,
            constants,
            labels: BTreeMap::new(),
        }
    }

    pub fn add_tuple(&mut self, relation: &str, tuple: &[Element]) -> Result<(), CoreError> {
        let idx = self
            .schema
            .relation_index(relation)
            .ok_or_else(|| CoreError::UnknownSymbol(relation.to_string()))?;
        self.add_tuple_idx(idx, tuple)
    }

    pub fn add_tuple_idx(&mut self, idx: usize, tuple: &[Element]) -> Result<(), CoreError> {
        let arity = self.schema.relations()[idx].1;
        if tuple.len() != arity {
            return Err(CoreError::InvalidStructure(format!(
                "tuple of length {} for relation of arity {}",
                tuple.len(),
                arity
            )));
        }
        for &e in tuple {
            if e >= self.universe_size {
                return Err(CoreError::InvalidStructure(format!(
                    "element {e} out of universe 0..{}",
                    self.universe_size
                )));
            }
        }
        self.relations[idx].insert(tuple.to_vec());
        Ok(())
    }

    /// Shorthand for binary edge relations.
    pub fn add_edge(&mut self, relation: &str, from: Element, to: Element) -> Result<(), CoreError> {
        self.add_tuple(relation, &[from, to])
    }

    pub fn set_constant(&mut self, name: &str, value: Element) -> Result<(), CoreError> {
        let idx = self
            .schema
            .constant_index(name)
            .ok_or_else(|| CoreError::UnknownSymbol(name.to_string()))?;
        if value >= self.universe_size {
            return Err(CoreError::InvalidStructure(format!(
                "constant `{name}` = {value} out of universe"
            )));
        }
        self.constants[idx] = Some(value);
        Ok(())
    }

    pub fn set_label(&mut self, element: Element, label: impl Into<String>) {
        self.labels.insert(element, label.into());
    }

    pub fn finish(self) -> Result<Structure, CoreError> {
        let mut constants = Vec::with_capacity(self.constants.len());
        for (i, c) in self.constants.iter().enumerate() {
            match c {
                Some(v) => constants.push(*v),
                None => {
                    return Err(CoreError::InvalidStructure(format!(
                        "constant `{}` not interpreted",
                        self.schema.constants()[i]
                    )))
                }
            }
        }
        Ok(Structure {
            schema: self.schema,
            universe_size: self.universe_size,
            relations: self.relations,
            constants,
            labels: self.labels,
        })
    }
}

impl Structure {
    pub fn builder(schema: Arc<Schema>, universe_size: u32) -> StructureBuilder {
        StructureBuilder::new(schema, universe_size)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn universe_size(&self) -> u32 {
        self.universe_size
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        0..self.universe_size
    }

    pub fn constant_value(&self, idx: usize) -> Element {
        self.constants[idx]
    }

    pub fn constant_values(&self) -> &[Element] {
        &self.constants
    }

    #[inline]
    pub fn holds(&self, relation_idx: usize, tuple: &[Element]) -> bool {
        self.relations[relation_idx].contains(tuple)
    }

    pub fn holds_named(&self, relation: &str, tuple: &[Element]) -> Result<bool, CoreError> {
        let idx = self
            .schema
            .relation_index(relation)
            .ok_or_else(|| CoreError::UnknownSymbol(relation.to_string()))?;
        Ok(self.holds(idx, tuple))
    }

    pub fn tuples(&self, relation_idx: usize) -> impl Iterator<Item = &Vec<Element>> {
        self.relations[relation_idx].tuples.iter()
    }

    pub fn tuple_count(&self, relation_idx: usize) -> usize {
        self.relations[relation_idx].tuples.len()
    }

    pub fn labels(&self) -> &BTreeMap<Element, String> {
        &self.labels
    }

    pub fn label_of(&self, e: Element) -> Option<&str> {
        self.labels.get(&e).map(|s| s.as_str())
    }

    /// Element carrying the given label, if any. Labels emitted by the gadget
    /// builders are unique per structure.
    pub fn element_by_label(&self, label: &str) -> Option<Element> {
        self.labels
            .iter()
            .find(|(_, l)| l.as_str() == label)
            .map(|(e, _)| *e)
    }

    /// Out-neighbors of `e` under a binary relation.
    pub fn out_neighbors(&self, relation_idx: usize, e: Element) -> Vec<Element> {
        self.elements()
            .filter(|&w| self.holds(relation_idx, &[e, w]))
            .collect()
    }

    /// In-neighbors of `e` under a binary relation.
    pub fn in_neighbors(&self, relation_idx: usize, e: Element) -> Vec<Element> {
        self.elements()
            .filter(|&w| self.holds(relation_idx, &[w, e]))
            .collect()
    }

    /// Check that `perm` (a bijection on the universe given as an image
    /// table) preserves every relation and every constant.
    pub fn is_automorphism(&self, perm: &[Element]) -> bool {
        if perm.len() != self.universe_size as usize {
            return false;
        }
        let mut seen = vec![false; perm.len()];
        for &img in perm {
            if img as usize >= perm.len() || seen[img as usize] {
                return false;
            }
            seen[img as usize] = true;
        }
        for &c in &self.constants {
            if perm[c as usize] != c {
                return false;
            }
        }
        let mut image = Vec::new();
        for rel in &self.relations {
            for tuple in &rel.tuples {
                image.clear();
                image.extend(tuple.iter().map(|&e| perm[e as usize]));
                if !rel.contains(&image) {
                    return false;
                }
            }
        }
        true
    }

    /// Atoms that a fresh pebble on `e` adds relative to an existing
    /// positional pebble vector (constants included implicitly). Two
    /// extension elements with equal signatures produce matching-equivalent
    /// extensions. Bits are appended to `out` in a fixed deterministic order.
    pub fn extension_signature_into(&self, pebbles: &[Element], e: Element, out: &mut Vec<u64>) {
        out.clear();
        let mut acc: u64 = 0;
        let mut nbits: u32 = 0;
        let push = |b: bool, acc: &mut u64, nbits: &mut u32, out: &mut Vec<u64>| {
            *acc |= (b as u64) << *nbits;
            *nbits += 1;
            if *nbits == 64 {
                out.push(*acc);
                *acc = 0;
                *nbits = 0;
            }
        };
        // equalities with constants and earlier pebbles
        for &c in &self.constants {
            push(c == e, &mut acc, &mut nbits, out);
        }
        for &p in pebbles {
            push(p == e, &mut acc, &mut nbits, out);
        }
        // relation atoms mentioning e
        let mut old: Vec<Element> = Vec::with_capacity(self.constants.len() + pebbles.len());
        old.extend_from_slice(&self.constants);
        old.extend_from_slice(pebbles);
        for (ri, rel) in self.relations.iter().enumerate() {
            match rel.arity {
                1 => push(self.holds(ri, &[e]), &mut acc, &mut nbits, out),
                2 => {
                    push(self.holds(ri, &[e, e]), &mut acc, &mut nbits, out);
                    for &o in &old {
                        push(self.holds(ri, &[e, o]), &mut acc, &mut nbits, out);
                        push(self.holds(ri, &[o, e]), &mut acc, &mut nbits, out);
                    }
                }
                arity => {
                    // all tuples over old ∪ {e} that mention e, lexicographic
                    let domain_len = old.len() + 1;
                    let mut idx = vec![0usize; arity];
                    loop {
                        if idx.iter().any(|&i| i == old.len()) {
                            let tuple: Vec<Element> = idx
                                .iter()
                                .map(|&i| if i == old.len() { e } else { old[i] })
                                .collect();
                            push(self.holds(ri, &tuple), &mut acc, &mut nbits, out);
                        }
                        let mut k = arity;
                        loop {
                            if k == 0 {
                                break;
                            }
                            k -= 1;
                            idx[k] += 1;
                            if idx[k] < domain_len {
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
            }
        }
        if nbits > 0 {
            out.push(acc);
        }
    }
}

/// A structure together with an ordered color -> element pebble assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbledStructure {
    pub structure: Arc<Structure>,
    pub pebbles: Vec<(String, Element)>,
}

impl PebbledStructure {
    pub fn new(structure: Arc<Structure>, pebbles: Vec<(String, Element)>) -> Result<Self, CoreError> {
        let mut colors = BTreeSet::new();
        for (color, e) in &pebbles {
            if !colors.insert(color.clone()) {
                return Err(CoreError::InvalidStructure(format!(
                    "two pebbles of color `{color}`"
                )));
            }
            if *e >= structure.universe_size() {
                return Err(CoreError::InvalidStructure(format!(
                    "pebbled element {e} out of universe"
                )));
            }
        }
        Ok(PebbledStructure { structure, pebbles })
    }

    pub fn unpebbled(structure: Arc<Structure>) -> Self {
        PebbledStructure {
            structure,
            pebbles: Vec::new(),
        }
    }

    /// Pebble vector sorted by color name; the normalization used by
    /// matching tests.
    pub fn sorted_pebbles(&self) -> Vec<(&str, Element)> {
        let mut v: Vec<(&str, Element)> = self
            .pebbles
            .iter()
            .map(|(c, e)| (c.as_str(), *e))
            .collect();
        v.sort();
        v
    }

    pub fn color_set(&self) -> BTreeSet<&str> {
        self.pebbles.iter().map(|(c, _)| c.as_str()).collect()
    }

    /// Extend with one fresh pebble (placement order preserved).
    pub fn extended(&self, color: impl Into<String>, e: Element) -> Result<Self, CoreError> {
        let mut pebbles = self.pebbles.clone();
        pebbles.push((color.into(), e));
        PebbledStructure::new(self.structure.clone(), pebbles)
    }
}

/// Positional matching test on raw pebble vectors over possibly different
/// structures sharing a schema. Colors are implied by position.
pub fn vectors_match(
    sa: &Structure,
    pa: &[Element],
    sb: &Structure,
    pb: &[Element],
) -> bool {
    debug_assert_eq!(pa.len(), pb.len());
    let ca = sa.constant_values();
    let cb = sb.constant_values();
    let la = ca.len() + pa.len();
    let mut da: Vec<Element> = Vec::with_capacity(la);
    let mut db: Vec<Element> = Vec::with_capacity(la);
    da.extend_from_slice(ca);
    da.extend_from_slice(pa);
    db.extend_from_slice(cb);
    db.extend_from_slice(pb);
    // well-defined + injective: equalities must agree pointwise
    for i in 0..la {
        for j in (i + 1)..la {
            if (da[i] == da[j]) != (db[i] == db[j]) {
                return false;
            }
        }
    }
    // relations preserved and reflected over the induced substructures
    let schema = sa.schema();
    for (ri, (_, arity)) in schema.relations().iter().enumerate() {
        let arity = *arity;
        match arity {
            1 => {
                for i in 0..la {
                    if sa.holds(ri, &[da[i]]) != sb.holds(ri, &[db[i]]) {
                        return false;
                    }
                }
            }
            2 => {
                for i in 0..la {
                    for j in 0..la {
                        if sa.holds(ri, &[da[i], da[j]]) != sb.holds(ri, &[db[i], db[j]]) {
                            return false;
                        }
                    }
                }
            }
            _ => {
                let mut idx = vec![0usize; arity];
                let mut ta = vec![0 as Element; arity];
                let mut tb = vec![0 as Element; arity];
                loop {
                    for (k, &i) in idx.iter().enumerate() {
                        ta[k] = da[i];
                        tb[k] = db[i];
                    }
                    if sa.holds(ri, &ta) != sb.holds(ri, &tb) {
                        return false;
                    }
                    let mut k = arity;
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < la {
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
        }
    }
    true
}

/// Do the two pebbled structures form a matching pair? The induced map sends
/// the pebble of each color on one side to the pebble of the same color on
/// the other, and each constant to the same constant.
pub fn matching_pair(p: &PebbledStructure, q: &PebbledStructure) -> Result<bool, CoreError> {
    if p.structure.schema() != q.structure.schema() {
        return Err(CoreError::SchemaMismatch(
            "matching_pair requires a shared schema".into(),
        ));
    }
    if p.pebbles.len() != q.pebbles.len() {
        return Ok(false);
    }
    let sa = p.sorted_pebbles();
    let sb = q.sorted_pebbles();
    if sa.iter().map(|(c, _)| *c).ne(sb.iter().map(|(c, _)| *c)) {
        return Ok(false);
    }
    let pa: Vec<Element> = sa.iter().map(|(_, e)| *e).collect();
    let pb: Vec<Element> = sb.iter().map(|(_, e)| *e).collect();
    Ok(vectors_match(&p.structure, &pa, &q.structure, &pb))
}

/// Canonical byte string such that two same-schema pebbled structures get
/// equal keys iff they form a matching pair. Deterministic across runs.
pub fn atomic_type_key(p: &PebbledStructure) -> Vec<u8> {
    let sorted = p.sorted_pebbles();
    let mut key = Vec::new();
    // color block: names in sorted order
    for (c, _) in &sorted {
        key.extend_from_slice(c.as_bytes());
        key.push(0);
    }
    key.push(0xff);
    let s = &p.structure;
    let mut dom: Vec<Element> = Vec::with_capacity(s.constant_values().len() + sorted.len());
    dom.extend_from_slice(s.constant_values());
    dom.extend(sorted.iter().map(|(_, e)| *e));
    let l = dom.len();
    let mut bits: Vec<u8> = Vec::new();
    let mut acc: u8 = 0;
    let mut nb = 0;
    let mut push = |b: bool| {
        acc |= (b as u8) << nb;
        nb += 1;
        if nb == 8 {
            bits.push(acc);
            acc = 0;
            nb = 0;
        }
    };
    for i in 0..l {
        for j in (i + 1)..l {
            push(dom[i] == dom[j]);
        }
    }
    for (ri, (_, arity)) in s.schema().relations().iter().enumerate() {
        let arity = *arity;
        let mut idx = vec![0usize; arity];
        let mut t = vec![0 as Element; arity];
        if l == 0 {
            continue;
        }
        loop {
            for (k, &i) in idx.iter().enumerate() {
                t[k] = dom[i];
            }
            push(s.holds(ri, &t));
            let mut k = arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < l {
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
    if nb > 0 {
        bits.push(acc);
    }
    key.extend_from_slice(&bits);
    key
}

/// Key over a raw positional pebble vector (colors `x1..xk` implied).
pub fn positional_type_key(s: &Structure, pebbles: &[Element]) -> Vec<u8> {
    let mut dom: Vec<Element> = Vec::with_capacity(s.constant_values().len() + pebbles.len());
    dom.extend_from_slice(s.constant_values());
    dom.extend_from_slice(pebbles);
    let l = dom.len();
    let mut key = vec![l as u8];
    let mut acc: u8 = 0;
    let mut nb = 0;
    let mut push = |b: bool, key: &mut Vec<u8>| {
        acc |= (b as u8) << nb;
        nb += 1;
        if nb == 8 {
            key.push(acc);
            acc = 0;
            nb = 0;
        }
    };
    for i in 0..l {
        for j in (i + 1)..l {
            push(dom[i] == dom[j], &mut key);
        }
    }
    for (ri, (_, arity)) in s.schema().relations().iter().enumerate() {
        let arity = *arity;
        if l == 0 {
            continue;
        }
        let mut idx = vec![0usize; arity];
        let mut t = vec![0 as Element; arity];
        loop {
            for (k, &i) in idx.iter().enumerate() {
                t[k] = dom[i];
            }
            push(s.holds(ri, &t), &mut key);
            let mut k = arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < l {
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
    if nb > 0 {
        key.push(acc);
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> Arc<Structure> {
        let mut b = Structure::builder(Schema::digraph(), n);
        for &(u, v) in edges {
            b.add_edge("E", u, v).unwrap();
        }
        Arc::new(b.finish().unwrap())
    }

    #[test]
    fn unpebbled_constant_free_structures_match() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(3, &[]);
        let pa = PebbledStructure::unpebbled(a);
        let pb = PebbledStructure::unpebbled(b);
        assert!(matching_pair(&pa, &pb).unwrap());
        assert_eq!(atomic_type_key(&pa), atomic_type_key(&pb));
    }

    #[test]
    fn edge_atom_difference_breaks_matching() {
        let a = digraph(2, &[(0, 1)]);
        let b = digraph(2, &[]);
        let pa = PebbledStructure::new(a, vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        let pb = PebbledStructure::new(b, vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        assert!(!matching_pair(&pa, &pb).unwrap());
        assert_ne!(atomic_type_key(&pa), atomic_type_key(&pb));
    }

    #[test]
    fn identical_pebbled_structures_have_equal_keys() {
        let a = digraph(3, &[(0, 1), (1, 2)]);
        let pa = PebbledStructure::new(a.clone(), vec![("x1".into(), 0)]).unwrap();
        let pb = pa.clone();
        assert!(matching_pair(&pa, &pb).unwrap());
        assert_eq!(atomic_type_key(&pa), atomic_type_key(&pb));
    }

    #[test]
    fn color_order_is_normalized() {
        let a = digraph(2, &[(0, 1)]);
        let pa =
            PebbledStructure::new(a.clone(), vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        let pb = PebbledStructure::new(a, vec![("x2".into(), 1), ("x1".into(), 0)]).unwrap();
        assert!(matching_pair(&pa, &pb).unwrap());
    }

    #[test]
    fn mismatched_color_sets_are_false_not_error() {
        let a = digraph(2, &[]);
        let pa = PebbledStructure::new(a.clone(), vec![("x1".into(), 0)]).unwrap();
        let pb = PebbledStructure::new(a, vec![("x2".into(), 0)]).unwrap();
        assert!(!matching_pair(&pa, &pb).unwrap());
    }

    #[test]
    fn injectivity_is_required() {
        let a = digraph(2, &[]);
        // x1,x2 on distinct elements vs both on one element
        let pa =
            PebbledStructure::new(a.clone(), vec![("x1".into(), 0), ("x2".into(), 1)]).unwrap();
        let pb = PebbledStructure::new(a, vec![("x1".into(), 0), ("x2".into(), 0)]).unwrap();
        assert!(!matching_pair(&pa, &pb).unwrap());
    }

    #[test]
    fn duplicate_color_rejected() {
        let a = digraph(2, &[]);
        assert!(PebbledStructure::new(a, vec![("x1".into(), 0), ("x1".into(), 1)]).is_err());
    }

    #[test]
    fn schema_mismatch_is_an_error() {
        let a = digraph(1, &[]);
        let mut b = Structure::builder(Schema::colored_digraph(), 1);
        b.add_tuple("R", &[0]).unwrap();
        let b = Arc::new(b.finish().unwrap());
        let pa = PebbledStructure::unpebbled(a);
        let pb = PebbledStructure::unpebbled(b);
        assert!(matching_pair(&pa, &pb).is_err());
    }
}
