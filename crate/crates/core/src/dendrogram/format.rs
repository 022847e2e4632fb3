//! Text formats for dendrograms.
//!
//! JSON is the lossless persistence format:
//! `{"p": 2, "points": ["0", "1", "inf"], "infinity": true, "tree": {...}}`
//! where a tree node is `{"leaf": <point index>}` or
//! `{"level": <int>, "children": [...]}`.
//!
//! Newick carries levels as branch annotations: every edge is annotated with
//! the level of its upper vertex (the valuation at which the child merges),
//! and every non-root internal vertex has a `[level=v]` comment. The end at
//! infinity is not represented.

use serde::{Deserialize, Serialize};

use super::{build_dendrogram, check_distinct, Dendrogram, Node};
use crate::error::{Error, Result};
use crate::padic::{ExtendedPoint, Prime};

#[derive(Serialize, Deserialize)]
struct DendrogramJson {
    p: u64,
    points: Vec<String>,
    infinity: bool,
    tree: TreeJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeJson {
    Leaf { leaf: usize },
    Internal { level: i64, children: Vec<TreeJson> },
}

impl From<&Node> for TreeJson {
    fn from(node: &Node) -> Self {
        match node {
            Node::Leaf(i) => TreeJson::Leaf { leaf: *i },
            Node::Internal { level, children } => TreeJson::Internal {
                level: *level,
                children: children.iter().map(TreeJson::from).collect(),
            },
        }
    }
}

pub(crate) fn to_json_value(d: &Dendrogram) -> serde_json::Value {
    serde_json::to_value(DendrogramJson {
        p: d.prime.get(),
        points: d.points.iter().map(ToString::to_string).collect(),
        infinity: d.has_infinity_end,
        tree: TreeJson::from(&d.root),
    })
    .expect("dendrogram serializes")
}

pub fn to_json(d: &Dendrogram) -> String {
    serde_json::to_string_pretty(&to_json_value(d)).expect("dendrogram serializes")
}

fn tree_from_json(
    tree: TreeJson,
    parent_level: Option<i64>,
    points: &[ExtendedPoint],
    seen: &mut [bool],
) -> Result<Node> {
    match tree {
        TreeJson::Leaf { leaf } => {
            let Some(point) = points.get(leaf) else {
                return Err(Error::InvalidTree(format!("leaf {leaf} out of range")));
            };
            if point.is_infinity() {
                return Err(Error::InvalidTree(format!("leaf {leaf} is the point at infinity")));
            }
            if std::mem::replace(&mut seen[leaf], true) {
                return Err(Error::InvalidTree(format!("leaf {leaf} appears twice")));
            }
            Ok(Node::Leaf(leaf))
        }
        TreeJson::Internal { level, children } => {
            if let Some(parent) = parent_level {
                if level <= parent {
                    return Err(Error::InvalidTree(format!(
                        "vertex at level {level} lies below a vertex at level {parent}"
                    )));
                }
            }
            if children.len() < 2 {
                return Err(Error::InvalidTree(format!(
                    "vertex at level {level} has fewer than two children"
                )));
            }
            let children = children
                .into_iter()
                .map(|c| tree_from_json(c, Some(level), points, seen))
                .collect::<Result<Vec<_>>>()?;
            Ok(Node::Internal { level, children })
        }
    }
}

pub(crate) fn from_json_value(value: serde_json::Value) -> Result<Dendrogram> {
    let raw: DendrogramJson = serde_json::from_value(value).map_err(Error::from_json)?;
    dendrogram_from_raw(raw)
}

/// Parses and validates the JSON form. The tree must be exactly the p-adic
/// dendrogram of the listed points.
pub fn from_json(text: &str) -> Result<Dendrogram> {
    let raw: DendrogramJson = serde_json::from_str(text).map_err(Error::from_json)?;
    dendrogram_from_raw(raw)
}

fn dendrogram_from_raw(raw: DendrogramJson) -> Result<Dendrogram> {
    let prime = Prime::new(raw.p)?;
    let points = raw
        .points
        .iter()
        .map(|s| s.parse::<ExtendedPoint>())
        .collect::<Result<Vec<_>>>()?;
    check_distinct(&points)?;
    let has_inf = points.iter().any(ExtendedPoint::is_infinity);
    if has_inf != raw.infinity {
        return Err(Error::InvalidTree(format!(
            "\"infinity\" is {} but the point list {} inf",
            raw.infinity,
            if has_inf { "contains" } else { "does not contain" }
        )));
    }
    let mut seen = vec![false; points.len()];
    let root = tree_from_json(raw.tree, None, &points, &mut seen)?;
    if root.is_leaf() {
        return Err(Error::InvalidTree("root must be an internal vertex".into()));
    }
    if let Some(missing) = (0..points.len()).find(|&i| !seen[i] && !points[i].is_infinity()) {
        return Err(Error::InvalidTree(format!("point {missing} has no leaf")));
    }
    let parsed = Dendrogram::from_parts(prime, points, root, raw.infinity);
    let expected = build_dendrogram(&parsed.points, prime)?;
    if expected != parsed {
        return Err(Error::InvalidTree(format!(
            "tree {} does not match the {prime}-adic dendrogram {} of its points",
            parsed.signature(),
            expected.signature()
        )));
    }
    Ok(parsed)
}

fn newick_name(s: &str) -> String {
    if s.chars().any(|c| "()[]:;,' \t".contains(c)) {
        format!("'{}'", s.replace('\'', "''"))
    } else {
        s.to_string()
    }
}

pub fn to_newick(d: &Dendrogram) -> String {
    fn go(d: &Dendrogram, node: &Node, parent_level: Option<i64>, out: &mut String) {
        match node {
            Node::Leaf(i) => out.push_str(&newick_name(&d.points[*i].to_string())),
            Node::Internal { level, children } => {
                out.push('(');
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    go(d, c, Some(*level), out);
                }
                out.push(')');
                if parent_level.is_some() {
                    out.push_str(&format!("[level={level}]"));
                }
            }
        }
        if let Some(l) = parent_level {
            out.push_str(&format!(":{l}"));
        }
    }
    let mut out = String::new();
    go(d, &d.root, None, &mut out);
    out.push(';');
    out
}

/// Graphviz rendering: one node per vertex, internal vertices of equal level
/// share a rank, leaves at the bottom.
pub fn to_dot(d: &Dendrogram) -> String {
    let vertices = d.vertices();
    let mut out = String::from("digraph dendrogram {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n");
    if d.has_infinity_end {
        out.push_str("  inf [label=\"inf\", shape=plaintext];\n  inf -> v0 [arrowhead=none];\n");
    }
    let mut levels: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    let mut leaves = Vec::new();
    for v in &vertices {
        match v.node {
            Node::Leaf(i) => {
                out.push_str(&format!(
                    "  v{} [label=\"{}\", shape=plaintext];\n",
                    v.id,
                    d.points[*i].to_string().replace('"', "\\\"")
                ));
                leaves.push(v.id);
            }
            Node::Internal { level, .. } => {
                out.push_str(&format!("  v{} [label=\"{}\", shape=circle];\n", v.id, level));
                levels.entry(*level).or_default().push(v.id);
            }
        }
    }
    for v in &vertices {
        for c in &v.children {
            out.push_str(&format!("  v{} -> v{} [arrowhead=none];\n", v.id, c));
        }
    }
    for ids in levels.values() {
        let names: Vec<String> = ids.iter().map(|i| format!("v{i}")).collect();
        out.push_str(&format!("  {{ rank=same; {}; }}\n", names.join("; ")));
    }
    let names: Vec<String> = leaves.iter().map(|i| format!("v{i}")).collect();
    out.push_str(&format!("  {{ rank=sink; {}; }}\n}}\n", names.join("; ")));
    out
}
