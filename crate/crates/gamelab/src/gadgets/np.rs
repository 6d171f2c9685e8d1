//! The NP-side gadgets: the building block with paired colored vertices and
//! counted auxiliary in-neighbors, and the stacked DOMSET structure with
//! middle-vertex replacement, red-vertex elision, and graph-encoding edges.

use std::collections::BTreeMap;

use gamelab_core::digraph::Graph;
use gamelab_core::perm::Perm;
use gamelab_core::structure::Element;
use gamelab_core::CoreError;

use super::{block_swap, Assembler, GadgetOutput, VertexColor};

/// Fig. 1 wiring: each middle family's (blue, green) out-targets, where the
/// booleans select the primed variants (q vs q', r vs r').
/// Families 1..4 are c1..c4, 5..8 are d1..d4.
fn middle_targets(family: u8) -> (bool, bool) {
    match family {
        1 => (false, false), // c1 -> q, r
        2 => (true, true),   // c2 -> q', r'
        3 => (false, true),  // c3 -> q, r'
        4 => (true, false),  // c4 -> q', r
        5 => (false, true),  // d1 -> q, r'
        6 => (true, false),  // d2 -> q', r
        7 => (false, false), // d3 -> q, r
        8 => (true, true),   // d4 -> q', r'
        _ => unreachable!(),
    }
}

fn family_name(family: u8) -> String {
    if family <= 4 {
        format!("c{family}")
    } else {
        format!("d{}", family - 4)
    }
}

/// Is the family an out-neighbor of p (families c1, c2, d1, d2) rather than
/// of p'?
fn on_unprimed_pole(family: u8) -> bool {
    matches!(family, 1 | 2 | 5 | 6)
}

/// Distinguishing in-neighbor count of a family in the block with index j:
/// c-vertices get j, d-vertices j-1.
fn aux_count(family: u8, j: u32) -> u32 {
    if family <= 4 {
        j
    } else {
        j - 1
    }
}

/// The building block with red pair (p, p'), blue (q, q'), green (r, r'),
/// eight middle vertices, and auxiliary in-neighbors distinguishing the c
/// and d middles. When `colored` is false the color predicates are dropped
/// and green vertices get self-loops.
pub fn build_i_np(j: u32, colored: bool) -> Result<GadgetOutput, CoreError> {
    if j < 1 {
        return Err(CoreError::Domain("the block exists for j >= 1".into()));
    }
    let mut asm = Assembler::new();
    let mut designated = BTreeMap::new();
    let p = asm.vertex("p", VertexColor::Red);
    let pp = asm.vertex("p'", VertexColor::Red);
    let q = asm.vertex("q", VertexColor::Blue);
    let qp = asm.vertex("q'", VertexColor::Blue);
    let r = asm.vertex("r", VertexColor::Green);
    let rp = asm.vertex("r'", VertexColor::Green);
    let mut middles = Vec::new();
    let mut auxes: Vec<Vec<Element>> = Vec::new();
    for family in 1..=8u8 {
        let name = family_name(family);
        let v = asm.vertex(&name, VertexColor::Plain);
        middles.push(v);
        let pole = if on_unprimed_pole(family) { p } else { pp };
        asm.edge(pole, v);
        let (qprime, rprime) = middle_targets(family);
        asm.edge(v, if qprime { qp } else { q });
        asm.edge(v, if rprime { rp } else { r });
        let mut aux = Vec::new();
        for s in 1..=aux_count(family, j) {
            // c-auxiliaries are a^i_1..a^i_j, d-auxiliaries b^i_2..b^i_j
            let aux_name = if family <= 4 {
                format!("a{family}_{s}")
            } else {
                format!("b{}_{}", family - 4, s + 1)
            };
            let w = asm.vertex(aux_name, VertexColor::Plain);
            asm.edge(w, v);
            aux.push(w);
        }
        auxes.push(aux);
    }
    for (name, v) in [("p", p), ("p'", pp), ("q", q), ("q'", qp), ("r", r), ("r'", rp)] {
        designated.insert(name.to_string(), v);
    }
    for (i, &v) in middles.iter().enumerate() {
        designated.insert(family_name(i as u8 + 1), v);
    }
    let n = asm.len() as u32;
    let mut generators = Vec::new();
    // fixes (p, p'): q<->q', r<->r', c1<->c2, c3<->c4, d1<->d2, d3<->d4
    {
        let mut pairs: Vec<(Vec<Element>, Vec<Element>)> = vec![(vec![q, r], vec![qp, rp])];
        for (fa, fb) in [(1u8, 2u8), (3, 4), (5, 6), (7, 8)] {
            let (ia, ib) = (fa as usize - 1, fb as usize - 1);
            pairs.push((vec![middles[ia]], vec![middles[ib]]));
            pairs.push((auxes[ia].clone(), auxes[ib].clone()));
        }
        let (a, b): (Vec<_>, Vec<_>) = pairs
            .into_iter()
            .fold((Vec::new(), Vec::new()), |(mut a, mut b), (x, y)| {
                a.extend(x);
                b.extend(y);
                (a, b)
            });
        generators.push(block_swap(n, &a, &b));
    }
    // fixes (q, q'): p<->p', r<->r', c1<->c3, c2<->c4, d1<->d3, d2<->d4
    {
        let mut a = vec![p, r];
        let mut b = vec![pp, rp];
        for (fa, fb) in [(1u8, 3u8), (2, 4), (5, 7), (6, 8)] {
            let (ia, ib) = (fa as usize - 1, fb as usize - 1);
            a.push(middles[ia]);
            b.push(middles[ib]);
            a.extend(&auxes[ia]);
            b.extend(&auxes[ib]);
        }
        generators.push(block_swap(n, &a, &b));
    }
    // auxiliary permutations within each middle vertex's set
    for aux in &auxes {
        if aux.len() >= 2 {
            generators.push(block_swap(n, &[aux[0]], &[aux[1]]));
            if aux.len() >= 3 {
                // a full cycle together with the transposition generates
                // the whole symmetric group on the set
                let mut perm: Perm = (0..n).collect();
                for i in 0..aux.len() {
                    perm[aux[i] as usize] = aux[(i + 1) % aux.len()];
                }
                generators.push(perm);
            }
        }
    }
    asm.finish(colored, designated, BTreeMap::new(), generators)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BottomFamily {
    Q,
    QPrime,
    R,
    RPrime,
}

impl BottomFamily {
    pub fn primed(self) -> bool {
        matches!(self, BottomFamily::QPrime | BottomFamily::RPrime)
    }
    pub fn green(self) -> bool {
        matches!(self, BottomFamily::R | BottomFamily::RPrime)
    }
}

/// Classification of a DOMSET-structure vertex, consumed by the strategy
/// scripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomsetVertex {
    /// a or a'
    Pole { prime: bool },
    /// q_j, q'_j, r_j, r'_j for levels 2..=k
    UpperColored { level: u32, family: BottomFamily },
    /// middle copy <c/d family, graph vertex> in block level
    Middle {
        level: u32,
        family: u8,
        vert: u32,
    },
    /// fresh distinguishing neighbor of a middle copy
    Aux { owner: Element },
    /// bottom-set copy <q_1/q'_1/r_1/r'_1, graph vertex>
    Bottom { family: BottomFamily, vert: u32 },
    Null { family: BottomFamily },
}

#[derive(Debug, Clone)]
pub struct DomsetLayout {
    pub k: u32,
    pub graph: Graph,
    pub a: Element,
    pub a_prime: Element,
    pub null_q: Element,
    pub null_r: Element,
    pub kind: Vec<DomsetVertex>,
    /// middle copy lookup: (level, family 1..=8, graph vertex) -> element
    pub middle: BTreeMap<(u32, u8, u32), Element>,
    /// per middle copy, its auxiliary vertices
    pub aux_of: BTreeMap<Element, Vec<Element>>,
    /// bottom copy lookup
    pub bottom: BTreeMap<(u8, u32), Element>,
}

/// The DOMSET reduction structure: blocks stacked from index k down to 1,
/// middle vertices replaced by per-graph-vertex copies with fresh
/// distinguishing neighbors, the bottom colored pairs replaced by
/// independent sets (the primed ones with an extra null vertex), the
/// intermediate red vertices elided, and the graph-encoding edges added.
pub fn build_domset_structure(
    g: &Graph,
    k: u32,
    colored: bool,
) -> Result<(GadgetOutput, DomsetLayout), CoreError> {
    if g.n() == 0 {
        return Err(CoreError::Domain("the reduction needs n >= 1".into()));
    }
    if k < 1 {
        return Err(CoreError::Domain("the reduction needs k >= 1".into()));
    }
    let n = g.n();
    let mut asm = Assembler::new();
    let mut kind: Vec<DomsetVertex> = Vec::new();
    let mut push = |asm: &mut Assembler,
                    kind: &mut Vec<DomsetVertex>,
                    name: String,
                    color: VertexColor,
                    k: DomsetVertex|
     -> Element {
        let v = asm.vertex(name, color);
        kind.push(k);
        v
    };
    let a = push(
        &mut asm,
        &mut kind,
        "a".into(),
        VertexColor::Red,
        DomsetVertex::Pole { prime: false },
    );
    let a_prime = push(
        &mut asm,
        &mut kind,
        "a'".into(),
        VertexColor::Red,
        DomsetVertex::Pole { prime: true },
    );
    // colored pairs for levels k..2 (level 1's are replaced by sets)
    let mut upper: BTreeMap<(u32, BottomFamily), Element> = BTreeMap::new();
    for level in (2..=k).rev() {
        for (fam, name, color) in [
            (BottomFamily::Q, format!("q{level}"), VertexColor::Blue),
            (BottomFamily::QPrime, format!("q'{level}"), VertexColor::Blue),
            (BottomFamily::R, format!("r{level}"), VertexColor::Green),
            (BottomFamily::RPrime, format!("r'{level}"), VertexColor::Green),
        ] {
            let v = push(
                &mut asm,
                &mut kind,
                name,
                color,
                DomsetVertex::UpperColored { level, family: fam },
            );
            upper.insert((level, fam), v);
        }
    }
    // middle copies with fresh auxiliaries per copy
    let mut middle: BTreeMap<(u32, u8, u32), Element> = BTreeMap::new();
    let mut aux_of: BTreeMap<Element, Vec<Element>> = BTreeMap::new();
    for level in (1..=k).rev() {
        for family in 1..=8u8 {
            for vert in 0..n {
                let name = format!("{}^{}(v{})", family_name(family), level, vert);
                let v = push(
                    &mut asm,
                    &mut kind,
                    name.clone(),
                    VertexColor::Plain,
                    DomsetVertex::Middle {
                        level,
                        family,
                        vert,
                    },
                );
                middle.insert((level, family, vert), v);
                let mut aux = Vec::new();
                for s in 1..=aux_count(family, level) {
                    let w = push(
                        &mut asm,
                        &mut kind,
                        format!("aux({name})#{s}"),
                        VertexColor::Plain,
                        DomsetVertex::Aux { owner: v },
                    );
                    asm.edge(w, v);
                    aux.push(w);
                }
                aux_of.insert(v, aux);
            }
        }
    }
    // bottom sets replacing q1, q'1, r1, r'1
    let mut bottom: BTreeMap<(u8, u32), Element> = BTreeMap::new();
    let bottom_families = [
        (0u8, BottomFamily::Q, "q1", VertexColor::Blue),
        (1, BottomFamily::QPrime, "q'1", VertexColor::Blue),
        (2, BottomFamily::R, "r1", VertexColor::Green),
        (3, BottomFamily::RPrime, "r'1", VertexColor::Green),
    ];
    for (fi, fam, name, color) in bottom_families {
        for vert in 0..n {
            let v = push(
                &mut asm,
                &mut kind,
                format!("{name}(v{vert})"),
                color,
                DomsetVertex::Bottom { family: fam, vert },
            );
            bottom.insert((fi, vert), v);
        }
    }
    let null_q = push(
        &mut asm,
        &mut kind,
        "null_q'".into(),
        VertexColor::Blue,
        DomsetVertex::Null {
            family: BottomFamily::QPrime,
        },
    );
    let null_r = push(
        &mut asm,
        &mut kind,
        "null_r'".into(),
        VertexColor::Green,
        DomsetVertex::Null {
            family: BottomFamily::RPrime,
        },
    );

    // pole edges: a and a' feed the top block's middles
    for family in 1..=8u8 {
        let pole = if on_unprimed_pole(family) { a } else { a_prime };
        for vert in 0..n {
            asm.edge(pole, middle[&(k, family, vert)]);
        }
    }
    // middle wiring downwards
    for level in (1..=k).rev() {
        for family in 1..=8u8 {
            let (qprime, rprime) = middle_targets(family);
            for vert in 0..n {
                let v = middle[&(level, family, vert)];
                if level >= 2 {
                    let qt = upper[&(level, if qprime { BottomFamily::QPrime } else { BottomFamily::Q })];
                    let rt = upper[&(level, if rprime { BottomFamily::RPrime } else { BottomFamily::R })];
                    asm.edge(v, qt);
                    asm.edge(v, rt);
                } else {
                    // level 1: replaced bottoms; an edge to a replaced vertex
                    // becomes edges to every copy in its set
                    let (qfi, qnull) = if qprime { (1u8, Some(null_q)) } else { (0u8, None) };
                    let (rfi, rnull) = if rprime { (3u8, Some(null_r)) } else { (2u8, None) };
                    for w in 0..n {
                        asm.edge(v, bottom[&(qfi, w)]);
                        asm.edge(v, bottom[&(rfi, w)]);
                    }
                    if let Some(nl) = qnull {
                        asm.edge(v, nl);
                    }
                    if let Some(nl) = rnull {
                        asm.edge(v, nl);
                    }
                }
            }
        }
    }
    // stacking plus red-vertex elision: the level-j colored vertices feed
    // the level-(j-1) middles that the elided red pair used to feed
    for level in 2..=k {
        for (fam, primed) in [
            (BottomFamily::Q, false),
            (BottomFamily::QPrime, true),
            (BottomFamily::R, false),
            (BottomFamily::RPrime, true),
        ] {
            let src = upper[&(level, fam)];
            for family in 1..=8u8 {
                if on_unprimed_pole(family) != !primed {
                    continue;
                }
                for vert in 0..n {
                    asm.edge(src, middle[&(level - 1, family, vert)]);
                }
            }
        }
    }
    // graph-encoding edges: for every vertex (and both endpoints of every
    // edge) of G, each bottom copy points at the middle copies of the same
    // or adjacent graph vertex, across every level
    let mut add_code_edges = |asm: &mut Assembler, vs: u32, vt: u32| {
        for fi in 0..4u8 {
            let w = bottom[&(fi, vs)];
            for level in 1..=k {
                for family in 1..=8u8 {
                    asm.edge(w, middle[&(level, family, vt)]);
                }
            }
        }
    };
    for v in 0..n {
        add_code_edges(&mut asm, v, v);
    }
    for (u, v) in g.edges() {
        add_code_edges(&mut asm, u, v);
        add_code_edges(&mut asm, v, u);
    }

    let total = asm.len() as u32;
    // automorphism generators: graph automorphisms acting on the copy
    // coordinate everywhere, plus per-copy auxiliary permutations
    let mut generators: Vec<Perm> = Vec::new();
    if n <= 8 {
        for ga in g.automorphisms() {
            if ga.iter().enumerate().all(|(i, &x)| x == i as u32) {
                continue;
            }
            let mut perm: Perm = (0..total).collect();
            for level in 1..=k {
                for family in 1..=8u8 {
                    for vert in 0..n {
                        let from = middle[&(level, family, vert)];
                        let to = middle[&(level, family, ga[vert as usize])];
                        perm[from as usize] = to;
                        for (x, y) in aux_of[&from].iter().zip(&aux_of[&to]) {
                            perm[*x as usize] = *y;
                        }
                    }
                }
            }
            for fi in 0..4u8 {
                for vert in 0..n {
                    perm[bottom[&(fi, vert)] as usize] = bottom[&(fi, ga[vert as usize])];
                }
            }
            generators.push(perm);
        }
    }
    for aux in aux_of.values() {
        if aux.len() >= 2 {
            generators.push(block_swap(total, &[aux[0]], &[aux[1]]));
            if aux.len() >= 3 {
                let mut perm: Perm = (0..total).collect();
                for i in 0..aux.len() {
                    perm[aux[i] as usize] = aux[(i + 1) % aux.len()];
                }
                generators.push(perm);
            }
        }
    }

    let mut designated = BTreeMap::new();
    designated.insert("a".into(), a);
    designated.insert("a'".into(), a_prime);
    designated.insert("null_q'".into(), null_q);
    designated.insert("null_r'".into(), null_r);
    for ((level, fam), v) in &upper {
        let name = match fam {
            BottomFamily::Q => format!("q{level}"),
            BottomFamily::QPrime => format!("q'{level}"),
            BottomFamily::R => format!("r{level}"),
            BottomFamily::RPrime => format!("r'{level}"),
        };
        designated.insert(name, *v);
    }
    let layout = DomsetLayout {
        k,
        graph: g.clone(),
        a,
        a_prime,
        null_q,
        null_r,
        kind,
        middle,
        aux_of,
        bottom,
    };
    let out = asm.finish(colored, designated, BTreeMap::new(), generators)?;
    Ok((out, layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_vertex_counts() {
        for j in 1..=4 {
            let out = build_i_np(j, true).unwrap();
            assert_eq!(out.structure.universe_size(), 10 + 8 * j, "j={j}");
        }
    }

    #[test]
    fn middle_in_degrees_count_auxiliaries() {
        let out = build_i_np(2, true).unwrap();
        let s = &out.structure;
        let e = s.schema().relation_index("E").unwrap();
        let c1 = out.designated["c1"];
        let d1 = out.designated["d1"];
        let p = out.designated["p"];
        // c1's in-neighbors: p plus j auxiliaries
        let cin = s.in_neighbors(e, c1);
        assert_eq!(cin.len(), 3);
        assert!(cin.contains(&p));
        let din = s.in_neighbors(e, d1);
        assert_eq!(din.len(), 2); // p plus j-1 = 1 auxiliaries
    }

    #[test]
    fn emitted_automorphisms_validate_up_to_j3() {
        for j in 1..=3 {
            for colored in [true, false] {
                let out = build_i_np(j, colored).unwrap();
                assert!(!out.automorphism_generators.is_empty());
                // validation happens inside finish(); getting here means all
                // generators passed
            }
        }
    }

    #[test]
    fn pair_swap_automorphism_fixes_p() {
        let out = build_i_np(1, true).unwrap();
        let g = &out.automorphism_generators[0];
        let p = out.designated["p"] as usize;
        let q = out.designated["q"] as usize;
        let qp = out.designated["q'"];
        let r = out.designated["r"] as usize;
        let rp = out.designated["r'"];
        assert_eq!(g[p] as usize, p);
        assert_eq!(g[q], qp);
        assert_eq!(g[r], rp);
    }

    #[test]
    fn null_vertices_have_no_out_neighbors() {
        let g = Graph::path(3);
        let (out, layout) = build_domset_structure(&g, 1, true).unwrap();
        let e = out.structure.schema().relation_index("E").unwrap();
        assert!(out.structure.out_neighbors(e, layout.null_q).is_empty());
        assert!(out.structure.out_neighbors(e, layout.null_r).is_empty());
    }

    #[test]
    fn code_edge_counts_match_the_construction() {
        // per graph vertex 32k new edges, per graph edge 64k new edges
        for (g, k) in [(Graph::path(3), 1u32), (Graph::path(3), 2), (Graph::complete(3), 1)] {
            let (out, layout) = build_domset_structure(&g, k, true).unwrap();
            let e = out.structure.schema().relation_index("E").unwrap();
            let mut per_vertex = vec![0usize; g.n() as usize];
            for ((_, vert), &w) in &layout.bottom {
                for x in out.structure.out_neighbors(e, w) {
                    if let DomsetVertex::Middle { vert: tv, .. } = layout.kind[x as usize] {
                        if tv == *vert {
                            per_vertex[*vert as usize] += 1;
                        }
                    }
                }
            }
            for (v, &count) in per_vertex.iter().enumerate() {
                assert_eq!(count, 32 * k as usize, "vertex {v} of {g:?} k={k}");
            }
            // edge contributions
            for (u, v) in g.edges() {
                let mut count = 0usize;
                for fi in 0..4u8 {
                    for (src, dst) in [(u, v), (v, u)] {
                        let w = layout.bottom[&(fi, src)];
                        for x in out.structure.out_neighbors(e, w) {
                            if let DomsetVertex::Middle { vert: tv, .. } = layout.kind[x as usize] {
                                if tv == dst {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
                assert_eq!(count, 64 * k as usize);
            }
        }
    }

    #[test]
    fn builders_are_deterministic() {
        let g = Graph::path(3);
        let (a, _) = build_domset_structure(&g, 2, false).unwrap();
        let (b, _) = build_domset_structure(&g, 2, false).unwrap();
        assert_eq!(
            gamelab_core::io::save_structure(&a.structure, &[]),
            gamelab_core::io::save_structure(&b.structure, &[])
        );
    }
}
