//! Instance serialization: the native JSON format (read/write) and the
//! extensional binary subset of XCSP 2.1.

mod native;
mod xcsp;

pub use native::{parse_native, serialize_native, NativeConstraint, NativeInstanceDoc, NativeRelation, SCHEMA_VERSION};
pub use xcsp::{parse_xcsp, write_xcsp};

use std::path::Path;

use crate::csp::{CspInstance, Relation};
use crate::error::Result;

/// Reads an instance file, choosing the parser by extension (`.xml` is XCSP,
/// anything else native).
pub fn load_instance(path: &Path) -> Result<CspInstance> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
        parse_xcsp(&text)
    } else {
        parse_native(&text)
    }
}

/// Distinct relations in first-use order, and each constraint's index into them.
pub(crate) fn shared_relations(inst: &CspInstance) -> (Vec<&Relation>, Vec<usize>) {
    let mut index = std::collections::HashMap::new();
    let mut relations = Vec::new();
    let refs = inst
        .constraints()
        .iter()
        .map(|c| {
            *index.entry(c.relation()).or_insert_with(|| {
                relations.push(c.relation());
                relations.len() - 1
            })
        })
        .collect();
    (relations, refs)
}
