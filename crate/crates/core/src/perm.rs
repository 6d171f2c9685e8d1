//! Permutations of structure universes and orbit canonicalization of pebble
//! vectors under a group given by generators.

use std::collections::BTreeSet;

use crate::structure::{Element, Structure};

/// A permutation as an image table: `perm[e]` is the image of `e`.
pub type Perm = Vec<Element>;

pub fn identity(n: u32) -> Perm {
    (0..n).collect()
}

pub fn compose(first: &Perm, then: &Perm) -> Perm {
    first.iter().map(|&e| then[e as usize]).collect()
}

pub fn invert(p: &Perm) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &img) in p.iter().enumerate() {
        inv[img as usize] = i as Element;
    }
    inv
}

/// Build a permutation from a list of disjoint element cycles, identity
/// elsewhere.
pub fn from_cycles(n: u32, cycles: &[Vec<Element>]) -> Perm {
    let mut p = identity(n);
    for cycle in cycles {
        for i in 0..cycle.len() {
            p[cycle[i] as usize] = cycle[(i + 1) % cycle.len()];
        }
    }
    p
}

/// Lexicographically minimal image of `vec` under the group generated by
/// `generators`, found by BFS over vector images. The search is capped;
/// hitting the cap returns the smallest image seen so far, which is still a
/// deterministic function of the input vector, merely not always the true
/// orbit minimum.
pub fn canonical_vector(generators: &[Perm], vec: &[Element], cap: usize) -> Vec<Element> {
    if generators.is_empty() || vec.is_empty() {
        return vec.to_vec();
    }
    let mut seen: BTreeSet<Vec<Element>> = BTreeSet::new();
    let start = vec.to_vec();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    while let Some(v) = frontier.pop() {
        for g in generators {
            let img: Vec<Element> = v.iter().map(|&e| g[e as usize]).collect();
            if seen.len() >= cap {
                return seen.first().unwrap().clone();
            }
            if seen.insert(img.clone()) {
                frontier.push(img);
            }
        }
    }
    seen.first().unwrap().clone()
}

/// Validate that every generator is an automorphism of `s`; returns the
/// offending index on failure.
pub fn validate_generators(s: &Structure, generators: &[Perm]) -> Result<(), usize> {
    for (i, g) in generators.iter().enumerate() {
        if !s.is_automorphism(g) {
            return Err(i);
        }
    }
    Ok(())
}

/// All automorphisms of a structure by brute-force permutation search.
/// Intended for test oracles on universes of size at most ~7.
pub fn brute_force_automorphisms(s: &Structure) -> Vec<Perm> {
    let n = s.universe_size();
    assert!(n <= 8, "brute-force automorphism search is for small structures");
    let mut result = Vec::new();
    let mut perm: Perm = identity(n);
    loop {
        if s.is_automorphism(&perm) {
            result.push(perm.clone());
        }
        if !next_perm(&mut perm) {
            break;
        }
    }
    result
}

fn next_perm(perm: &mut [Element]) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Schema;

    #[test]
    fn canonical_vector_finds_orbit_minimum() {
        // group generated by the 3-cycle (0 1 2) on 4 points
        let g = from_cycles(4, &[vec![0, 1, 2]]);
        let canon = canonical_vector(&[g], &[2, 3], 1000);
        assert_eq!(canon, vec![0, 3]);
    }

    #[test]
    fn brute_force_finds_edge_swap() {
        // 2-vertex digraph with edges both ways: swap is an automorphism
        let mut b = Structure::builder(Schema::digraph(), 2);
        b.add_edge("E", 0, 1).unwrap();
        b.add_edge("E", 1, 0).unwrap();
        let s = b.finish().unwrap();
        let autos = brute_force_automorphisms(&s);
        assert_eq!(autos.len(), 2);
    }
}
