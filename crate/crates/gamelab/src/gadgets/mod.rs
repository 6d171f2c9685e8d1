//! Deterministic builders for the reduction gadgets: the NP building block,
//! the stacked DOMSET structure, the J/J' blocks, the PSPACE building block,
//! and the skyscraper. Each builder emits vertex labels, designated
//! vertices, informal labels where they exist, and automorphism generators
//! validated against the relations at build time.

pub mod np;
pub mod pspace;
pub mod skyscraper;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use gamelab_core::perm::Perm;
use gamelab_core::structure::{Element, Schema, Structure};
use gamelab_core::CoreError;

pub use np::{build_domset_structure, build_i_np, DomsetLayout, DomsetVertex};
pub use pspace::{build_i_pspace, build_j, build_j_prime, PspaceLayout};
pub use skyscraper::{build_skyscraper, SkyscraperLayout, SkyscraperVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexColor {
    Plain,
    Red,
    Green,
    Blue,
}

/// Builder output: the structure plus the metadata strategy scripts and
/// tests consume.
#[derive(Debug, Clone)]
pub struct GadgetOutput {
    pub structure: Arc<Structure>,
    pub designated: BTreeMap<String, Element>,
    pub informal_labels: BTreeMap<Element, String>,
    pub automorphism_generators: Vec<Perm>,
}

impl GadgetOutput {
    pub fn designated_element(&self, name: &str) -> Result<Element, CoreError> {
        self.designated
            .get(name)
            .copied()
            .ok_or_else(|| CoreError::UnknownSymbol(format!("designated vertex `{name}`")))
    }
}

/// Incremental digraph assembler with named, optionally colored vertices.
/// When `colored` is false at finish time the color predicates are dropped
/// and every green vertex receives a self-loop instead.
pub(crate) struct Assembler {
    names: Vec<String>,
    colors: Vec<VertexColor>,
    edges: BTreeSet<(Element, Element)>,
}

impl Assembler {
    pub fn new() -> Self {
        Assembler {
            names: Vec::new(),
            colors: Vec::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn vertex(&mut self, name: impl Into<String>, color: VertexColor) -> Element {
        self.names.push(name.into());
        self.colors.push(color);
        (self.names.len() - 1) as Element
    }

    pub fn edge(&mut self, from: Element, to: Element) {
        self.edges.insert((from, to));
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn finish(
        self,
        colored: bool,
        designated: BTreeMap<String, Element>,
        informal_labels: BTreeMap<Element, String>,
        generators: Vec<Perm>,
    ) -> Result<GadgetOutput, CoreError> {
        let n = self.names.len() as u32;
        let schema = if colored {
            Schema::colored_digraph()
        } else {
            Schema::digraph()
        };
        let mut b = Structure::builder(schema, n);
        for (u, v) in &self.edges {
            b.add_tuple("E", &[*u, *v])?;
        }
        for (i, color) in self.colors.iter().enumerate() {
            let i = i as Element;
            if colored {
                match color {
                    VertexColor::Red => b.add_tuple("R", &[i])?,
                    VertexColor::Green => b.add_tuple("G", &[i])?,
                    VertexColor::Blue => b.add_tuple("B", &[i])?,
                    VertexColor::Plain => {}
                }
            } else if *color == VertexColor::Green {
                // the color-free encoding marks green with a self-loop
                b.add_tuple("E", &[i, i])?;
            }
        }
        for (i, name) in self.names.iter().enumerate() {
            b.set_label(i as Element, name.clone());
        }
        let structure = Arc::new(b.finish()?);
        for (gi, g) in generators.iter().enumerate() {
            if !structure.is_automorphism(g) {
                return Err(CoreError::InvalidStructure(format!(
                    "emitted generator {gi} is not an automorphism"
                )));
            }
        }
        Ok(GadgetOutput {
            structure,
            designated,
            informal_labels,
            automorphism_generators: generators,
        })
    }
}

/// Permutation that swaps two aligned element blocks and fixes the rest.
pub(crate) fn block_swap(n: u32, a: &[Element], b: &[Element]) -> Perm {
    assert_eq!(a.len(), b.len());
    let mut p: Perm = (0..n).collect();
    for (&x, &y) in a.iter().zip(b) {
        p[x as usize] = y;
        p[y as usize] = x;
    }
    p
}
