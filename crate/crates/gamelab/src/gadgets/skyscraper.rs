//! The skyscraper: stacked PSPACE building blocks encoding a quantified
//! 3-CNF formula, with informal truth labels on designated middles, the
//! bottom pole pair replaced by clause and null vertices, and edges from
//! clause vertices to the labeled vertices of their literals.

use std::collections::BTreeMap;

use gamelab_core::perm::Perm;
use gamelab_core::qbf::QbfInstance;
use gamelab_core::structure::Element;
use gamelab_core::CoreError;

use super::pspace::{points_at_q, upper_plan};
use super::{block_swap, Assembler, GadgetOutput, VertexColor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkyscraperVertex {
    /// Chain vertex p_level (the top pair of floor `level`); a = p_k.
    Pole { level: u32, prime: bool },
    /// Out-neighbor of a floor's pole pair. `plan_index` addresses the
    /// 32-entry layout of the floor's building block.
    Upper {
        floor: u32,
        plan_index: u8,
        is_star: bool,
        split: bool,
        prime_side: bool,
    },
    /// Middle of the connector attached to `host`; local index 1..=4 within
    /// its c or d half.
    Lower {
        floor: u32,
        host: Element,
        local: u8,
        is_c: bool,
        to_q: bool,
    },
    Aux { owner: Element },
    Clause { index: u32, primed: bool },
    Null { index: u32 },
}

#[derive(Debug, Clone)]
pub struct SkyscraperLayout {
    pub k: u32,
    pub m: u32,
    pub t: u32,
    /// the padded alternating instance the structure encodes
    pub instance: QbfInstance,
    pub a: Element,
    pub a_prime: Element,
    pub kind: Vec<SkyscraperVertex>,
    /// informal label per element: (variable, is_true)
    pub var_label: Vec<Option<(u32, bool)>>,
    pub clause_vertices: Vec<Element>,
    pub clause_vertices_primed: Vec<Element>,
    pub nulls: Vec<Element>,
    pub aux_of: BTreeMap<Element, Vec<Element>>,
    /// lowers per host in (c1..c4, d1..d4) order
    pub lowers: BTreeMap<Element, Vec<Element>>,
    pub uppers_by_floor: BTreeMap<u32, Vec<Element>>,
}

/// Build the skyscraper for a quantified 3-CNF instance and a target clause
/// count t with 1 <= t <= m. Non-alternating prefixes are padded with dummy
/// variables first.
pub fn build_skyscraper(
    phi: &QbfInstance,
    t: u32,
) -> Result<(GadgetOutput, SkyscraperLayout), CoreError> {
    let phi = if phi.is_alternating() {
        phi.clone()
    } else {
        phi.pad_alternating()
    };
    let m = phi.num_clauses() as u32;
    if t < 1 || t > m {
        return Err(CoreError::Domain(format!(
            "target t = {t} outside 1..={m}"
        )));
    }
    let k = (phi.num_vars() / 2) as u32;
    if k == 0 {
        return Err(CoreError::Domain("the instance needs at least one variable".into()));
    }
    let mut asm = Assembler::new();
    let mut kind: Vec<SkyscraperVertex> = Vec::new();
    let mut var_label: Vec<Option<(u32, bool)>> = Vec::new();
    let mut vertex = |asm: &mut Assembler,
                      kind: &mut Vec<SkyscraperVertex>,
                      var_label: &mut Vec<Option<(u32, bool)>>,
                      name: String,
                      kv: SkyscraperVertex,
                      label: Option<(u32, bool)>|
     -> Element {
        let v = asm.vertex(name, VertexColor::Plain);
        kind.push(kv);
        var_label.push(label);
        v
    };
    // pole chain: p_k .. p_1 and primed counterparts
    let mut pole: BTreeMap<(u32, bool), Element> = BTreeMap::new();
    for level in (1..=k).rev() {
        for prime in [false, true] {
            let name = if level == k {
                if prime { "a'".to_string() } else { "a".to_string() }
            } else {
                format!("{}{}", if prime { "p'" } else { "p" }, level)
            };
            let v = vertex(
                &mut asm,
                &mut kind,
                &mut var_label,
                name,
                SkyscraperVertex::Pole { level, prime },
                None,
            );
            pole.insert((level, prime), v);
        }
    }
    // clause and null vertices (the replaced bottom pair)
    let mut clause_vertices = Vec::new();
    let mut clause_vertices_primed = Vec::new();
    let mut nulls = Vec::new();
    for i in 0..m {
        let v = vertex(
            &mut asm,
            &mut kind,
            &mut var_label,
            format!("v(C{})", i + 1),
            SkyscraperVertex::Clause { index: i, primed: false },
            None,
        );
        clause_vertices.push(v);
    }
    for i in 0..m {
        let v = vertex(
            &mut asm,
            &mut kind,
            &mut var_label,
            format!("v'(C{})", i + 1),
            SkyscraperVertex::Clause { index: i, primed: true },
            None,
        );
        clause_vertices_primed.push(v);
    }
    for i in 0..m {
        let v = vertex(
            &mut asm,
            &mut kind,
            &mut var_label,
            format!("null_{}", i + 1),
            SkyscraperVertex::Null { index: i },
            None,
        );
        nulls.push(v);
    }

    let plan = upper_plan();
    let mut aux_of: BTreeMap<Element, Vec<Element>> = BTreeMap::new();
    let mut lowers: BTreeMap<Element, Vec<Element>> = BTreeMap::new();
    let mut uppers_by_floor: BTreeMap<u32, Vec<Element>> = BTreeMap::new();
    // floors k (top) down to 1 (bottom); floor j is the block of index
    // 2j + m - t
    for floor in (1..=k).rev() {
        let block_index = 2 * floor + m - t;
        let odd_var = 2 * k - 2 * floor + 1; // set by the floor's upper labels
        let even_var = odd_var + 1;
        let p = pole[&(floor, false)];
        let pp = pole[&(floor, true)];
        let mut uppers = Vec::new();
        let mut star_count = 0u8;
        let mut diamond_count = 0u8;
        for (pi, &(unprimed, is_star, split)) in plan.iter().enumerate() {
            let base_name = if is_star {
                star_count += 1;
                format!("f{floor}.c{star_count}")
            } else {
                diamond_count += 1;
                format!("f{floor}.d{diamond_count}")
            };
            // upper labels: the four uniform-connector stars on03 the p side
            // carry the floor's odd variable (first two true, next two false)
            let label = if is_star && unprimed && (5..=8).contains(&star_count) {
                Some((odd_var, star_count <= 6))
            } else {
                None
            };
            let host = vertex(
                &mut asm,
                &mut kind,
                &mut var_label,
                base_name.clone(),
                SkyscraperVertex::Upper {
                    floor,
                    plan_index: pi as u8,
                    is_star,
                    split,
                    prime_side: !unprimed,
                },
                label,
            );
            uppers.push(host);
            asm.edge(if unprimed { p } else { pp }, host);
            let count = if is_star { block_index } else { block_index - 1 };
            let mut aux = Vec::new();
            for s in 1..=count {
                let w = vertex(
                    &mut asm,
                    &mut kind,
                    &mut var_label,
                    format!("{base_name}#{s}"),
                    SkyscraperVertex::Aux { owner: host },
                    None,
                );
                asm.edge(w, host);
                aux.push(w);
            }
            aux_of.insert(host, aux);
            // lower labels live on the uniform connectors of the labeled
            // stars
            let host_labeled = label.is_some();
            let mut lows = Vec::new();
            for is_c in [true, false] {
                for index in 1..=4u8 {
                    let lname = format!(
                        "{base_name}.{}{}",
                        if is_c { "c" } else { "d" },
                        index
                    );
                    let to_q = points_at_q(!split, is_c, index);
                    let llabel = if host_labeled {
                        Some((even_var, index <= 2))
                    } else {
                        None
                    };
                    let v = vertex(
                        &mut asm,
                        &mut kind,
                        &mut var_label,
                        lname.clone(),
                        SkyscraperVertex::Lower {
                            floor,
                            host,
                            local: index,
                            is_c,
                            to_q,
                        },
                        llabel,
                    );
                    asm.edge(host, v);
                    if floor >= 2 {
                        let target = pole[&(floor - 1, !to_q)];
                        // q of this floor is p of the floor below; q' is p'
                        let target = if to_q {
                            pole[&(floor - 1, false)]
                        } else {
                            pole[&(floor - 1, true)]
                        };
                        let _ = target;
                        asm.edge(v, if to_q { pole[&(floor - 1, false)] } else { pole[&(floor - 1, true)] });
                    } else {
                        // bottom floor: q_1 was replaced by the clause
                        // vertices, q'_1 by the primed clause vertices and
                        // the nulls
                        if to_q {
                            for &w in &clause_vertices {
                                asm.edge(v, w);
                            }
                        } else {
                            for &w in &clause_vertices_primed {
                                asm.edge(v, w);
                            }
                            for &w in &nulls {
                                asm.edge(v, w);
                            }
                        }
                    }
                    let lcount = if is_c { block_index - 1 } else { block_index - 2 };
                    let mut laux = Vec::new();
                    for s in 1..=lcount {
                        let w = vertex(
                            &mut asm,
                            &mut kind,
                            &mut var_label,
                            format!("{lname}#{s}"),
                            SkyscraperVertex::Aux { owner: v },
                            None,
                        );
                        asm.edge(w, v);
                        laux.push(w);
                    }
                    aux_of.insert(v, laux);
                    lows.push(v);
                }
            }
            lowers.insert(host, lows);
        }
        uppers_by_floor.insert(floor, uppers);
    }
    // clause edges: both clause vertices of C_i point at every vertex whose
    // label matches one of C_i's literals
    let labeled: Vec<(Element, (u32, bool))> = var_label
        .iter()
        .enumerate()
        .filter_map(|(e, l)| l.map(|l| (e as Element, l)))
        .collect();
    for (i, clause) in phi.clauses.iter().enumerate() {
        for &lit in clause {
            let var = lit.unsigned_abs();
            let want_true = lit > 0;
            for &(e, (v, is_true)) in &labeled {
                if v == var && is_true == want_true {
                    asm.edge(clause_vertices[i], e);
                    asm.edge(clause_vertices_primed[i], e);
                }
            }
        }
    }

    let total = asm.len() as u32;
    let mut generators: Vec<Perm> = Vec::new();
    let mut host_block = |a_idx: Element, b_idx: Element| -> Perm {
        let mut a = vec![a_idx];
        let mut b = vec![b_idx];
        a.extend(&aux_of[&a_idx]);
        b.extend(&aux_of[&b_idx]);
        for (x, y) in lowers[&a_idx].iter().zip(&lowers[&b_idx]) {
            a.push(*x);
            b.push(*y);
            a.extend(&aux_of[x]);
            b.extend(&aux_of[y]);
        }
        block_swap(total, &a, &b)
    };
    for uppers in uppers_by_floor.values() {
        // groups with identical labels and wiring; stars c5..c8 split into
        // the true pair and the false pair
        let groups: [(usize, usize); 9] = [
            (0, 4),
            (4, 6),
            (6, 8),
            (8, 12),
            (12, 16),
            (16, 20),
            (20, 24),
            (24, 28),
            (28, 32),
        ];
        for (lo, hi) in groups {
            for i in lo..hi.saturating_sub(1) {
                generators.push(host_block(uppers[i], uppers[i + 1]));
            }
        }
    }
    for (host, lows) in &lowers {
        let (labeled_host, split) = match kind[*host as usize] {
            SkyscraperVertex::Upper { split, .. } => (var_label[*host as usize].is_some(), split),
            _ => unreachable!(),
        };
        let mut swap_lows = |ia: usize, ib: usize, generators: &mut Vec<Perm>| {
            let mut a = vec![lows[ia]];
            let mut b = vec![lows[ib]];
            a.extend(&aux_of[&lows[ia]]);
            b.extend(&aux_of[&lows[ib]]);
            generators.push(block_swap(total, &a, &b));
        };
        if split {
            swap_lows(0, 2, &mut generators);
            swap_lows(1, 3, &mut generators);
            swap_lows(4, 6, &mut generators);
            swap_lows(5, 7, &mut generators);
        } else if labeled_host {
            // labels pin the halves: c1<->c2, c3<->c4, d1<->d2, d3<->d4
            swap_lows(0, 1, &mut generators);
            swap_lows(2, 3, &mut generators);
            swap_lows(4, 5, &mut generators);
            swap_lows(6, 7, &mut generators);
        } else {
            for i in 0..3 {
                swap_lows(i, i + 1, &mut generators);
                swap_lows(4 + i, 4 + i + 1, &mut generators);
            }
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
    for w in nulls.windows(2) {
        generators.push(block_swap(total, &[w[0]], &[w[1]]));
    }

    let mut designated = BTreeMap::new();
    designated.insert("a".into(), pole[&(k, false)]);
    designated.insert("a'".into(), pole[&(k, true)]);
    for ((level, prime), v) in &pole {
        designated.insert(
            format!("{}{}", if *prime { "p'" } else { "p" }, level),
            *v,
        );
        if *level < k {
            // the same vertex is the q of the floor above
            designated.insert(
                format!("{}{}", if *prime { "q'" } else { "q" }, level + 1),
                *v,
            );
        }
    }
    for (i, &v) in nulls.iter().enumerate() {
        designated.insert(format!("null_{}", i + 1), v);
    }
    for (i, &v) in clause_vertices.iter().enumerate() {
        designated.insert(format!("v(C{})", i + 1), v);
    }
    for (i, &v) in clause_vertices_primed.iter().enumerate() {
        designated.insert(format!("v'(C{})", i + 1), v);
    }
    let informal: BTreeMap<Element, String> = var_label
        .iter()
        .enumerate()
        .filter_map(|(e, l)| {
            l.map(|(v, tv)| {
                (
                    e as Element,
                    format!("{}(x{})", if tv { "T" } else { "F" }, v),
                )
            })
        })
        .collect();
    let layout = SkyscraperLayout {
        k,
        m,
        t,
        instance: phi,
        a: pole[&(k, false)],
        a_prime: pole[&(k, true)],
        kind,
        var_label,
        clause_vertices,
        clause_vertices_primed,
        nulls,
        aux_of,
        lowers,
        uppers_by_floor,
    };
    let out = asm.finish(false, designated, informal, generators)?;
    Ok((out, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gamelab_core::qbf::Quant;

    fn phi(clauses: Vec<Vec<i32>>) -> QbfInstance {
        QbfInstance::new(vec![Quant::Exists, Quant::Forall], clauses).unwrap()
    }

    #[test]
    fn smallest_skyscraper_counts() {
        // k=1, m=1, t=1: one floor of block index 2, bottom replaced by
        // 1 + 2 clause/null vertices in place of the two poles
        let (out, layout) = build_skyscraper(&phi(vec![vec![1]]), 1).unwrap();
        assert_eq!(layout.k, 1);
        let expect = (288 * 2 - 112) - 2 + 3;
        assert_eq!(out.structure.universe_size(), expect as u32);
    }

    #[test]
    fn nulls_have_no_out_neighbors() {
        let (out, layout) = build_skyscraper(&phi(vec![vec![1], vec![1, -2]]), 1).unwrap();
        let e = out.structure.schema().relation_index("E").unwrap();
        for &nl in &layout.nulls {
            assert!(out.structure.out_neighbors(e, nl).is_empty());
        }
    }

    #[test]
    fn label_coverage_matches_clause_literals() {
        let f = phi(vec![vec![1, -2]]);
        let (out, layout) = build_skyscraper(&f, 1).unwrap();
        let e = out.structure.schema().relation_index("E").unwrap();
        for (le, label) in var_labeled(&layout) {
            let expect = f.clauses[0]
                .iter()
                .any(|&lit| lit.unsigned_abs() == label.0 && (lit > 0) == label.1);
            let covered = out
                .structure
                .in_neighbors(e, le)
                .iter()
                .any(|&w| matches!(layout.kind[w as usize], SkyscraperVertex::Clause { .. }));
            assert_eq!(covered, expect, "label {label:?}");
        }
    }

    fn var_labeled(layout: &SkyscraperLayout) -> Vec<(Element, (u32, bool))> {
        layout
            .var_label
            .iter()
            .enumerate()
            .filter_map(|(e, l)| l.map(|l| (e as Element, l)))
            .collect()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let (out, _) = build_skyscraper(&phi(vec![vec![1]]), 1).unwrap();
        let bytes = gamelab_core::io::save_structure(&out.structure, &[]);
        let (s2, _) = gamelab_core::io::load_structure(&bytes).unwrap();
        assert_eq!(out.structure.as_ref(), s2.as_ref());
        assert_eq!(bytes, gamelab_core::io::save_structure(&s2, &[]));
    }

    #[test]
    fn bad_t_is_a_domain_error() {
        assert!(build_skyscraper(&phi(vec![vec![1]]), 0).is_err());
        assert!(build_skyscraper(&phi(vec![vec![1]]), 2).is_err());
    }
}
