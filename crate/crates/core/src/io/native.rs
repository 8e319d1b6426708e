//! Native instance format.
//!
//! A JSON document with a fixed key order and one domain, relation or
//! constraint per line, so serialization is byte-stable:
//!
//! ```text
//! {
//!   "schema_version": "1",
//!   "name": "rand-2-4-2-2-250-0",
//!   "domains": [
//!     [0,1]
//!   ],
//!   "variables": [0,0,0,0],
//!   "relations": [
//!     {"semantics":"conflicts","tuples":[[1,0]]}
//!   ],
//!   "constraints": [
//!     {"scope":[0,2],"relation":0},
//!     {"scope":[1,3],"relation":0}
//!   ]
//! }
//! ```
//!
//! `variables[i]` indexes `domains`; `relation` indexes `relations`. Domains
//! and relations are deduplicated in first-use order and tuples are sorted.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::shared_relations;
use crate::csp::{CspInstance, Domain, Relation, Semantics, Value};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeRelation {
    pub semantics: Semantics,
    pub tuples: Vec<[Value; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeConstraint {
    pub scope: [usize; 2],
    pub relation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeInstanceDoc {
    pub schema_version: String,
    pub name: String,
    pub domains: Vec<Vec<Value>>,
    pub variables: Vec<usize>,
    pub relations: Vec<NativeRelation>,
    pub constraints: Vec<NativeConstraint>,
}

impl NativeInstanceDoc {
    pub fn from_instance(inst: &CspInstance) -> Self {
        let mut domain_ids: HashMap<&Domain, usize> = HashMap::new();
        let mut domains = Vec::new();
        let variables = inst
            .domains()
            .iter()
            .map(|d| {
                *domain_ids.entry(d).or_insert_with(|| {
                    domains.push(d.values().to_vec());
                    domains.len() - 1
                })
            })
            .collect();
        let (relations, refs) = shared_relations(inst);
        NativeInstanceDoc {
            schema_version: SCHEMA_VERSION.to_string(),
            name: inst.name().to_string(),
            domains,
            variables,
            relations: relations
                .into_iter()
                .map(|r| NativeRelation {
                    semantics: r.semantics,
                    tuples: r.tuples.iter().map(|&(a, b)| [a, b]).collect(),
                })
                .collect(),
            constraints: inst
                .constraints()
                .iter()
                .zip(refs)
                .map(|(c, relation)| NativeConstraint { scope: [c.scope().0, c.scope().1], relation })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<CspInstance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version '{}' (expected '{SCHEMA_VERSION}')",
                self.schema_version
            )));
        }
        let domains = self
            .variables
            .iter()
            .enumerate()
            .map(|(v, &d)| {
                let values = self.domains.get(d).ok_or_else(|| {
                    Error::Parse(format!("variable {v} references missing domain {d}"))
                })?;
                Domain::new(values.iter().copied())
                    .map_err(|_| Error::Parse(format!("domain {d} is empty")))
            })
            .collect::<Result<Vec<_>>>()?;
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let r = self.relations.get(c.relation).ok_or_else(|| {
                    Error::Parse(format!("constraint {i} references missing relation {}", c.relation))
                })?;
                let relation = Relation {
                    semantics: r.semantics,
                    tuples: r.tuples.iter().map(|t| (t[0], t[1])).collect(),
                };
                Ok(((c.scope[0], c.scope[1]), relation))
            })
            .collect::<Result<Vec<_>>>()?;
        CspInstance::new(self.name.clone(), domains, constraints)
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn push_list(out: &mut String, key: &str, items: Vec<String>, last: bool) {
    out.push_str(&format!("  {}: [", json(&key)));
    if !items.is_empty() {
        out.push('\n');
        out.push_str(
            &items.iter().map(|s| format!("    {s}")).collect::<Vec<_>>().join(",\n"),
        );
        out.push_str("\n  ");
    }
    out.push(']');
    out.push_str(if last { "\n" } else { ",\n" });
}

/// Canonical, byte-stable text form of an instance.
pub fn serialize_native(inst: &CspInstance) -> String {
    let doc = NativeInstanceDoc::from_instance(inst);
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"schema_version\": {},\n", json(&doc.schema_version)));
    out.push_str(&format!("  \"name\": {},\n", json(&doc.name)));
    push_list(&mut out, "domains", doc.domains.iter().map(json).collect(), false);
    out.push_str(&format!("  \"variables\": {},\n", json(&doc.variables)));
    push_list(&mut out, "relations", doc.relations.iter().map(json).collect(), false);
    push_list(&mut out, "constraints", doc.constraints.iter().map(json).collect(), true);
    out.push_str("}\n");
    out
}

pub fn parse_native(text: &str) -> Result<CspInstance> {
    let doc: NativeInstanceDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("native instance: {e}")))?;
    doc.to_instance()
}
