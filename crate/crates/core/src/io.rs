//! The structure file format: UTF-8 JSON with canonical ordering so that
//! saves are deterministic (tuples sorted lexicographically, keys sorted
//! alphabetically).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::structure::{Element, PebbledStructure, Schema, Structure};

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    relations: Vec<RelationDecl>,
    constants: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RelationDecl {
    name: String,
    arity: usize,
}

#[derive(Serialize, Deserialize)]
struct StructureFile {
    schema: SchemaFile,
    universe_size: u32,
    relations: BTreeMap<String, Vec<Vec<Element>>>,
    constants: BTreeMap<String, Element>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pebbles: Vec<(String, Element)>,
}

/// Serialize a structure (with optional pebbles) to canonical JSON bytes.
pub fn save_structure(s: &Structure, pebbles: &[(String, Element)]) -> Vec<u8> {
    let schema = s.schema();
    let file = StructureFile {
        schema: SchemaFile {
            relations: schema
                .relations()
                .iter()
                .map(|(name, arity)| RelationDecl {
                    name: name.clone(),
                    arity: *arity,
                })
                .collect(),
            constants: schema.constants().to_vec(),
        },
        universe_size: s.universe_size(),
        relations: schema
            .relations()
            .iter()
            .enumerate()
            .map(|(i, (name, _))| {
                let mut tuples: Vec<Vec<Element>> = s.tuples(i).cloned().collect();
                tuples.sort();
                (name.clone(), tuples)
            })
            .collect(),
        constants: schema
            .constants()
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), s.constant_value(i)))
            .collect(),
        labels: s
            .labels()
            .iter()
            .map(|(e, l)| (e.to_string(), l.clone()))
            .collect(),
        pebbles: pebbles.to_vec(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("structure serialization cannot fail");
    out.push(b'\n');
    out
}

/// Parse the canonical JSON structure format. Returns the structure and any
/// pebbles listed in the file.
pub fn load_structure(bytes: &[u8]) -> Result<(Arc<Structure>, Vec<(String, Element)>), CoreError> {
    let file: StructureFile = serde_json::from_slice(bytes)
        .map_err(|e| CoreError::parse(format!("line {}", e.line()), e.to_string()))?;
    let schema = Arc::new(Schema::new(
        file.schema
            .relations
            .iter()
            .map(|r| (r.name.clone(), r.arity))
            .collect(),
        file.schema.constants.clone(),
    )?);
    // keys must exactly match the declared schema
    for name in file.relations.keys() {
        if schema.relation_index(name).is_none() {
            return Err(CoreError::parse(
                format!("relations.{name}"),
                "relation data for a symbol not in the schema",
            ));
        }
    }
    for (name, _) in schema.relations() {
        if !file.relations.contains_key(name) {
            return Err(CoreError::parse(
                format!("relations.{name}"),
                "missing relation data",
            ));
        }
    }
    for name in file.constants.keys() {
        if schema.constant_index(name).is_none() {
            return Err(CoreError::parse(
                format!("constants.{name}"),
                "constant not in the schema",
            ));
        }
    }
    let mut b = Structure::builder(schema.clone(), file.universe_size);
    for (name, tuples) in &file.relations {
        for t in tuples {
            b.add_tuple(name, t).map_err(|e| {
                CoreError::parse(format!("relations.{name}"), e.to_string())
            })?;
        }
    }
    for name in schema.constants() {
        let v = file.constants.get(name).ok_or_else(|| {
            CoreError::parse(format!("constants.{name}"), "missing constant value")
        })?;
        b.set_constant(name, *v)
            .map_err(|e| CoreError::parse(format!("constants.{name}"), e.to_string()))?;
    }
    for (e, label) in &file.labels {
        let e: Element = e
            .parse()
            .map_err(|_| CoreError::parse(format!("labels.{e}"), "key must be an integer"))?;
        if e >= file.universe_size {
            return Err(CoreError::parse(
                format!("labels.{e}"),
                "label on an element outside the universe",
            ));
        }
        b.set_label(e, label.clone());
    }
    let s = Arc::new(b.finish()?);
    // validate pebbles eagerly
    PebbledStructure::new(s.clone(), file.pebbles.clone())?;
    Ok((s, file.pebbles))
}

/// Load and wrap in a pebbled structure in one step.
pub fn load_pebbled(bytes: &[u8]) -> Result<PebbledStructure, CoreError> {
    let (s, pebbles) = load_structure(bytes)?;
    PebbledStructure::new(s, pebbles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_structure_round_trips() {
        let s = Structure::builder(Schema::digraph(), 0).finish().unwrap();
        let bytes = save_structure(&s, &[]);
        let (s2, pebbles) = load_structure(&bytes).unwrap();
        assert_eq!(&s, s2.as_ref());
        assert!(pebbles.is_empty());
        assert_eq!(bytes, save_structure(&s2, &[]));
    }

    #[test]
    fn single_edge_digraph_round_trips() {
        let mut b = Structure::builder(Schema::digraph(), 2);
        b.add_edge("E", 0, 1).unwrap();
        b.set_label(0, "src");
        let s = b.finish().unwrap();
        let bytes = save_structure(&s, &[("x1".into(), 0)]);
        let (s2, pebbles) = load_structure(&bytes).unwrap();
        assert_eq!(&s, s2.as_ref());
        assert_eq!(pebbles, vec![("x1".to_string(), 0)]);
        assert_eq!(bytes, save_structure(&s2, &pebbles));
    }

    #[test]
    fn malformed_input_reports_location() {
        let err = load_structure(b"{ not json").unwrap_err();
        assert!(matches!(err, CoreError::Parse { .. }));
    }

    #[test]
    fn out_of_universe_tuple_rejected() {
        let s = br#"{
  "schema": {"relations": [{"name": "E", "arity": 2}], "constants": []},
  "universe_size": 1,
  "relations": {"E": [[0, 5]]},
  "constants": {}
}"#;
        assert!(load_structure(s).is_err());
    }
}
