//! XCSP 2.1 reader for binary extensional instances, plus a writer for the
//! same subset.
//!
//! Unary extensional constraints are folded into the variable's domain.
//! Intensional (`predicate`) and global constraints are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;

use roxmltree::{Document, Node};

use super::shared_relations;
use crate::csp::{CspInstance, Domain, Relation, Semantics, Value};
use crate::error::{Error, Result};

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn attr<'a>(node: Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| {
        let id = node.attribute("name").map(|n| format!(" '{n}'")).unwrap_or_default();
        err(format!("<{}>{id} is missing attribute '{name}'", node.tag_name().name()))
    })
}

fn parse_int(token: &str, context: &str) -> Result<Value> {
    token.parse().map_err(|_| err(format!("{context}: '{token}' is not an integer")))
}

fn parse_domain_values(text: &str, context: &str) -> Result<Vec<Value>> {
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        if let Some((lo, hi)) = token.split_once("..") {
            let (lo, hi) = (parse_int(lo, context)?, parse_int(hi, context)?);
            if lo > hi {
                return Err(err(format!("{context}: empty range {token}")));
            }
            values.extend(lo..=hi);
        } else {
            values.push(parse_int(token, context)?);
        }
    }
    Ok(values)
}

struct RawRelation {
    arity: usize,
    semantics: Semantics,
    tuples: Vec<Vec<Value>>,
}

fn parse_relation(node: Node<'_, '_>) -> Result<RawRelation> {
    let name = attr(node, "name")?;
    let context = format!("relation '{name}'");
    let arity: usize = attr(node, "arity")?
        .parse()
        .map_err(|_| err(format!("{context}: bad arity")))?;
    let semantics = match attr(node, "semantics")? {
        "supports" => Semantics::Supports,
        "conflicts" => Semantics::Conflicts,
        other => return Err(err(format!("{context}: unsupported semantics '{other}'"))),
    };
    let text = node.text().unwrap_or("");
    let mut tuples = Vec::new();
    for chunk in text.split('|') {
        let tuple = chunk
            .split_whitespace()
            .map(|t| parse_int(t, &context))
            .collect::<Result<Vec<_>>>()?;
        if tuple.is_empty() {
            continue;
        }
        if tuple.len() != arity {
            return Err(err(format!(
                "{context}: malformed tuple '{}' for arity {arity}",
                chunk.trim()
            )));
        }
        tuples.push(tuple);
    }
    if let Some(n) = node.attribute("nbTuples") {
        if n.parse::<usize>().ok() != Some(tuples.len()) {
            return Err(err(format!("{context}: nbTuples={n} but {} tuples listed", tuples.len())));
        }
    }
    Ok(RawRelation { arity, semantics, tuples })
}

/// Parses an XCSP 2.1 document restricted to binary (and unary) extensional
/// constraints.
pub fn parse_xcsp(document: &str) -> Result<CspInstance> {
    let doc = Document::parse(document).map_err(|e| err(format!("malformed XML: {e}")))?;
    let root = doc.root_element();
    if root.tag_name().name() != "instance" {
        return Err(err(format!("root element is <{}>, expected <instance>", root.tag_name().name())));
    }
    if let Some(p) = root.descendants().find(|n| matches!(n.tag_name().name(), "predicate" | "predicates" | "functional")) {
        let id = p.attribute("name").map(|n| format!(" '{n}'")).unwrap_or_default();
        return Err(err(format!(
            "intensional constraints unsupported (<{}>{id})",
            p.tag_name().name()
        )));
    }

    let name = root
        .children()
        .find(|n| n.has_tag_name("presentation"))
        .and_then(|p| p.attribute("name"))
        .unwrap_or("unnamed")
        .to_string();

    let section = |tag: &str| root.children().find(|n| n.has_tag_name(tag));

    let mut domains: HashMap<&str, Vec<Value>> = HashMap::new();
    if let Some(sec) = section("domains") {
        for d in sec.children().filter(|n| n.has_tag_name("domain")) {
            let dname = attr(d, "name")?;
            let values = parse_domain_values(d.text().unwrap_or(""), &format!("domain '{dname}'"))?;
            if let Some(n) = d.attribute("nbValues") {
                let distinct = Domain::new(values.iter().copied()).map(|d| d.len()).unwrap_or(0);
                if n.parse::<usize>().ok() != Some(distinct) {
                    return Err(err(format!("domain '{dname}': nbValues={n} but {distinct} values listed")));
                }
            }
            domains.insert(dname, values);
        }
    }

    let mut var_index: HashMap<&str, usize> = HashMap::new();
    let mut var_values: Vec<Vec<Value>> = Vec::new();
    let vars = section("variables").ok_or_else(|| err("missing <variables> section"))?;
    for v in vars.children().filter(|n| n.has_tag_name("variable")) {
        let vname = attr(v, "name")?;
        let dref = attr(v, "domain")?;
        let values = domains
            .get(dref)
            .ok_or_else(|| err(format!("variable '{vname}' references unknown domain '{dref}'")))?;
        if var_index.insert(vname, var_values.len()).is_some() {
            return Err(err(format!("variable '{vname}' declared twice")));
        }
        var_values.push(values.clone());
    }

    let mut relations: HashMap<&str, RawRelation> = HashMap::new();
    if let Some(sec) = section("relations") {
        for r in sec.children().filter(|n| n.has_tag_name("relation")) {
            relations.insert(attr(r, "name")?, parse_relation(r)?);
        }
    }

    let mut binary = Vec::new();
    if let Some(sec) = section("constraints") {
        for c in sec.children().filter(|n| n.is_element()) {
            let cname = c.attribute("name").unwrap_or("?");
            if !c.has_tag_name("constraint") {
                return Err(err(format!("unexpected <{}> in <constraints>", c.tag_name().name())));
            }
            let reference = attr(c, "reference")?;
            if reference.starts_with("global:") {
                return Err(err(format!("constraint '{cname}': global constraints unsupported ({reference})")));
            }
            if c.children().any(|n| n.has_tag_name("parameters")) {
                return Err(err(format!("constraint '{cname}': intensional constraints unsupported")));
            }
            let scope = attr(c, "scope")?
                .split_whitespace()
                .map(|s| {
                    var_index
                        .get(s)
                        .copied()
                        .ok_or_else(|| err(format!("constraint '{cname}' references unknown variable '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            let rel = relations
                .get(reference)
                .ok_or_else(|| err(format!("constraint '{cname}' references unknown relation '{reference}'")))?;
            if rel.arity != scope.len() {
                return Err(err(format!(
                    "constraint '{cname}': scope has {} variables, relation '{reference}' has arity {}",
                    scope.len(),
                    rel.arity
                )));
            }
            match scope.len() {
                1 => {
                    let listed: Vec<Value> = rel.tuples.iter().map(|t| t[0]).collect();
                    let keep_listed = rel.semantics == Semantics::Supports;
                    var_values[scope[0]].retain(|v| listed.contains(v) == keep_listed);
                }
                2 => {
                    if scope[0] == scope[1] {
                        return Err(err(format!("constraint '{cname}': repeated variable in scope")));
                    }
                    binary.push(((scope[0], scope[1]), rel));
                }
                n => {
                    return Err(err(format!("constraint '{cname}': arity {n} unsupported (binary only)")));
                }
            }
        }
    }

    let var_names: Vec<&str> = {
        let mut names = vec![""; var_values.len()];
        for (n, &i) in &var_index {
            names[i] = n;
        }
        names
    };
    let doms = var_values
        .into_iter()
        .enumerate()
        .map(|(i, vals)| {
            Domain::new(vals).map_err(|_| err(format!("variable '{}' has an empty domain", var_names[i])))
        })
        .collect::<Result<Vec<_>>>()?;

    // relations may be shared across scopes; keep only tuples inside this scope's domains
    let constraints = binary
        .into_iter()
        .map(|((x, y), rel)| {
            let tuples = rel
                .tuples
                .iter()
                .map(|t| (t[0], t[1]))
                .filter(|(a, b)| doms[x].contains(*a) && doms[y].contains(*b))
                .collect();
            ((x, y), Relation { semantics: rel.semantics, tuples })
        })
        .collect();
    CspInstance::new(name, doms, constraints).map_err(|e| match e {
        Error::DuplicatePair(x, y) => err(format!(
            "two constraints on variables '{}' and '{}'",
            var_names[x], var_names[y]
        )),
        other => err(other.to_string()),
    })
}

fn format_values(values: &[Value]) -> String {
    let contiguous = values.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous && values.len() > 2 {
        format!("{}..{}", values[0], values[values.len() - 1])
    } else {
        values.iter().map(Value::to_string).collect::<Vec<_>>().join(" ")
    }
}

/// Writes the instance as XCSP 2.1 with extensional relations.
pub fn write_xcsp(inst: &CspInstance) -> String {
    let mut out = String::new();
    let mut domain_ids: HashMap<&Domain, usize> = HashMap::new();
    let mut domains: Vec<&Domain> = Vec::new();
    let var_domains: Vec<usize> = inst
        .domains()
        .iter()
        .map(|d| {
            *domain_ids.entry(d).or_insert_with(|| {
                domains.push(d);
                domains.len() - 1
            })
        })
        .collect();
    let (relations, refs) = shared_relations(inst);
    let escaped = inst.name().replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;");

    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
    writeln!(out, "<instance>").unwrap();
    writeln!(out, "<presentation name=\"{escaped}\" format=\"XCSP 2.1\"/>").unwrap();
    writeln!(out, "<domains nbDomains=\"{}\">", domains.len()).unwrap();
    for (i, d) in domains.iter().enumerate() {
        writeln!(out, "<domain name=\"D{i}\" nbValues=\"{}\">{}</domain>", d.len(), format_values(d.values())).unwrap();
    }
    writeln!(out, "</domains>").unwrap();
    writeln!(out, "<variables nbVariables=\"{}\">", inst.num_vars()).unwrap();
    for (v, d) in var_domains.iter().enumerate() {
        writeln!(out, "<variable name=\"V{v}\" domain=\"D{d}\"/>").unwrap();
    }
    writeln!(out, "</variables>").unwrap();
    writeln!(out, "<relations nbRelations=\"{}\">", relations.len()).unwrap();
    for (i, r) in relations.iter().enumerate() {
        let tuples: Vec<String> = r.tuples.iter().map(|(a, b)| format!("{a} {b}")).collect();
        writeln!(
            out,
            "<relation name=\"R{i}\" arity=\"2\" nbTuples=\"{}\" semantics=\"{}\">{}</relation>",
            r.tuples.len(),
            r.semantics.as_str(),
            tuples.join("|")
        )
        .unwrap();
    }
    writeln!(out, "</relations>").unwrap();
    writeln!(out, "<constraints nbConstraints=\"{}\">", inst.num_constraints()).unwrap();
    for (c, r) in inst.constraints().iter().zip(refs) {
        let (x, y) = c.scope();
        writeln!(out, "<constraint name=\"C{}\" arity=\"2\" scope=\"V{x} V{y}\" reference=\"R{r}\"/>", c.id()).unwrap();
    }
    writeln!(out, "</constraints>").unwrap();
    writeln!(out, "</instance>").unwrap();
    out
}
