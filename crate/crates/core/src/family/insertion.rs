use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dendrogram::{build_dendrogram, Dendrogram, Node};
use crate::error::{Error, Result};
use crate::padic::{valuation, ExtendedPoint, Rational, Valuation};

/// A place where a new end can join a dendrogram.
///
/// Vertex ids are preorder positions in the dendrogram the site was computed
/// for.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttachmentSite {
    /// A new vertex subdivides the edge above `child` at some level strictly
    /// between `lower` and `upper`. `parent` is `None` for the edge above the
    /// root (`lower = -inf`), which is the edge toward infinity when the
    /// dendrogram has that end. Leaf edges have `upper = inf`.
    Edge {
        parent: Option<usize>,
        child: usize,
        lower: Valuation,
        upper: Valuation,
    },
    /// The new point becomes an additional child of `vertex`, in one of the
    /// `p - children` residue classes not yet occupied.
    Vertex { vertex: usize, level: i64, children: usize },
}

impl fmt::Display for AttachmentSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttachmentSite::Edge {
                parent: None,
                child,
                upper,
                ..
            } => write!(f, "edge(root v{child}, -inf..{upper})"),
            AttachmentSite::Edge {
                parent: Some(parent),
                child,
                lower,
                upper,
            } => write!(f, "edge(v{parent} -> v{child}, {lower}..{upper})"),
            AttachmentSite::Vertex { vertex, level, .. } => write!(f, "vertex(v{vertex}@{level})"),
        }
    }
}

fn node_upper(node: &Node) -> Valuation {
    node.level().map_or(Valuation::Infinity, Valuation::Finite)
}

fn has_room(lower: Valuation, upper: Valuation) -> bool {
    match (lower, upper) {
        (Valuation::Finite(r), Valuation::Finite(s)) => s - r >= 2,
        _ => true,
    }
}

/// Every attachment site, in preorder: the edge into each vertex (if it has
/// room for a new vertex), then the vertex itself if it has a free residue.
pub fn enumerate_sites(d: &Dendrogram) -> Vec<AttachmentSite> {
    let p = d.prime().get();
    let vertices = d.vertices();
    let mut out = Vec::new();
    for v in &vertices {
        let lower = v
            .parent
            .map_or(Valuation::NegInfinity, |pid| node_upper(vertices[pid].node));
        let upper = node_upper(v.node);
        if has_room(lower, upper) {
            out.push(AttachmentSite::Edge {
                parent: v.parent,
                child: v.id,
                lower,
                upper,
            });
        }
        if let Some(level) = v.node.level() {
            let children = v.children.len();
            if (children as u64) < p {
                out.push(AttachmentSite::Vertex {
                    vertex: v.id,
                    level,
                    children,
                });
            }
        }
    }
    out
}

fn rep<'a>(d: &'a Dendrogram, node: &Node) -> &'a Rational {
    d.points()[node.min_leaf()].as_finite().expect("leaf is finite")
}

/// The site at which the finite point `x` (not among the data) would attach.
pub fn locate_site(d: &Dendrogram, x: &Rational) -> AttachmentSite {
    let p = d.prime();
    let vertices = d.vertices();
    let root = vertices[0].node;
    let root_level = root.level().expect("internal root");
    let dist = |node: &Node| valuation(&(x - rep(d, node)), p);
    let v = dist(root);
    if v < Valuation::Finite(root_level) {
        return AttachmentSite::Edge {
            parent: None,
            child: 0,
            lower: Valuation::NegInfinity,
            upper: Valuation::Finite(root_level),
        };
    }
    let mut cur = 0;
    'descend: loop {
        let level = vertices[cur].node.level().expect("descent stays on internal vertices");
        for &c in &vertices[cur].children {
            let child = vertices[c].node;
            let w = dist(child);
            if w <= Valuation::Finite(level) {
                continue;
            }
            let upper = node_upper(child);
            if w < upper {
                return AttachmentSite::Edge {
                    parent: Some(cur),
                    child: c,
                    lower: Valuation::Finite(level),
                    upper,
                };
            }
            cur = c;
            continue 'descend;
        }
        return AttachmentSite::Vertex {
            vertex: cur,
            level,
            children: vertices[cur].children.len(),
        };
    }
}

/// Adds `x` to the data and returns the new dendrogram together with the site
/// of the old one where its end attached. `x` gets the next point index.
pub fn insert_point(d: &Dendrogram, x: &ExtendedPoint) -> Result<(Dendrogram, AttachmentSite)> {
    if let Some(first) = d.points().iter().position(|y| y == x) {
        return Err(Error::DuplicatePoint {
            point: x.to_string(),
            first,
            second: d.points().len(),
        });
    }
    let mut points = d.points().to_vec();
    points.push(x.clone());
    let new_index = points.len() - 1;
    let above_root = AttachmentSite::Edge {
        parent: None,
        child: 0,
        lower: Valuation::NegInfinity,
        upper: Valuation::Finite(d.root_level()),
    };
    let Some(xq) = x.as_finite() else {
        let out = Dendrogram::from_parts(d.prime(), points, d.root().clone(), true);
        return Ok((out, above_root));
    };
    let site = locate_site(d, xq);
    let mut root = d.root().clone();
    match &site {
        AttachmentSite::Edge { child, .. } => {
            let level = valuation(&(xq - rep(d, d.vertices()[*child].node)), d.prime())
                .finite()
                .expect("x is not a data point");
            root.replace_at(*child, |old| Node::internal(level, vec![old, Node::Leaf(new_index)]));
        }
        AttachmentSite::Vertex { vertex, .. } => {
            root.replace_at(*vertex, |old| match old {
                Node::Internal { level, mut children } => {
                    children.push(Node::Leaf(new_index));
                    Node::Internal { level, children }
                }
                leaf => leaf,
            });
        }
    }
    Ok((
        Dendrogram::from_parts(d.prime(), points, root, d.has_infinity_end()),
        site,
    ))
}

/// Removes point `i` and suppresses the vertex this leaves with one child.
/// Later points move down one index.
pub fn forget_point(d: &Dendrogram, i: usize) -> Result<Dendrogram> {
    let n = d.points().len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let mut points = d.points().to_vec();
    let removed = points.remove(i);
    let shift = |k: usize| if k > i { k - 1 } else { k };
    if removed.is_infinity() {
        let mut root = d.root().clone();
        root.map_leaves(&shift);
        return Ok(Dendrogram::from_parts(d.prime(), points, root, false));
    }
    let remaining = d.leaf_count() - 1;
    if remaining < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            found: remaining,
        });
    }
    let mut root = d.root().remove_leaf(i).expect("other leaves remain");
    root.map_leaves(&shift);
    Ok(Dendrogram::from_parts(d.prime(), points, root, d.has_infinity_end()))
}

/// Rebuild-from-scratch counterpart of [`insert_point`], for cross-checks.
pub fn rebuild_with(d: &Dendrogram, x: &ExtendedPoint) -> Result<Dendrogram> {
    let mut points = d.points().to_vec();
    points.push(x.clone());
    build_dendrogram(&points, d.prime())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrogram::parse_points;
    use crate::padic::Prime;

    fn build(values: &[&str], p: u64) -> Dendrogram {
        build_dendrogram(&parse_points(values.iter().copied()).unwrap(), Prime::new(p).unwrap()).unwrap()
    }

    fn toy() -> Dendrogram {
        build(&["0", "1", "3", "4", "12", "20", "32", "64", "inf"], 2)
    }

    fn pt(s: &str) -> ExtendedPoint {
        s.parse().unwrap()
    }

    #[test]
    fn sites_for_01inf() {
        let d = build(&["0", "1", "inf"], 2);
        let sites = enumerate_sites(&d);
        let inf = Valuation::Infinity;
        let zero = Valuation::Finite(0);
        assert_eq!(
            sites,
            vec![
                AttachmentSite::Edge {
                    parent: None,
                    child: 0,
                    lower: Valuation::NegInfinity,
                    upper: zero
                },
                AttachmentSite::Edge {
                    parent: Some(0),
                    child: 1,
                    lower: zero,
                    upper: inf
                },
                AttachmentSite::Edge {
                    parent: Some(0),
                    child: 2,
                    lower: zero,
                    upper: inf
                },
            ]
        );
        let d5 = build(&["0", "1", "inf"], 5);
        assert!(enumerate_sites(&d5).contains(&AttachmentSite::Vertex {
            vertex: 0,
            level: 0,
            children: 2
        }));
    }

    #[test]
    fn sites_for_single_merge() {
        let d = build(&["0", "4"], 2);
        let sites = enumerate_sites(&d);
        assert_eq!(sites.len(), 3);
        assert!(sites.iter().all(|s| matches!(s, AttachmentSite::Edge { .. })));
    }

    #[test]
    fn edges_without_room_are_not_sites() {
        // (0,2)@1 inside root@0: the edge 0 -> 1 has no integer level strictly inside
        let d = build(&["0", "2", "1"], 2);
        assert!(!enumerate_sites(&d).iter().any(|s| matches!(
            s,
            AttachmentSite::Edge {
                parent: Some(0),
                child: 1,
                ..
            }
        )));
    }

    #[test]
    fn insert_two_into_toy() {
        let d = toy();
        let (e, site) = insert_point(&d, &pt("2")).unwrap();
        // edge from the root (level 0) down to the level-2 vertex (id 1)
        assert_eq!(
            site,
            AttachmentSite::Edge {
                parent: Some(0),
                child: 1,
                lower: Valuation::Finite(0),
                upper: Valuation::Finite(2)
            }
        );
        assert_eq!(e, rebuild_with(&d, &pt("2")).unwrap());
        assert_eq!(e.cophenetic_valuation(0, 9).unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn insert_into_01inf() {
        let d = build(&["0", "1", "inf"], 2);
        let (e, site) = insert_point(&d, &pt("3")).unwrap();
        assert!(matches!(site, AttachmentSite::Edge { child: 2, .. }));
        assert_eq!(e.labeled_signature(), "(0,(1,3)@1)@0+inf");
        let (e, site) = insert_point(&d, &pt("2")).unwrap();
        assert!(matches!(site, AttachmentSite::Edge { child: 1, .. }));
        assert_eq!(e.labeled_signature(), "((0,2)@1,1)@0+inf");
    }

    #[test]
    fn insert_at_vertex_and_above_root() {
        let d = build(&["0", "1", "inf"], 5);
        let (e, site) = insert_point(&d, &pt("3")).unwrap();
        assert_eq!(
            site,
            AttachmentSite::Vertex {
                vertex: 0,
                level: 0,
                children: 2
            }
        );
        assert_eq!(e.labeled_signature(), "(0,1,3)@0+inf");
        let (e, site) = insert_point(&d, &pt("1/5")).unwrap();
        assert!(matches!(site, AttachmentSite::Edge { parent: None, .. }));
        assert_eq!(e.labeled_signature(), "((0,1)@0,1/5)@-1+inf");
    }

    #[test]
    fn insert_duplicate_fails() {
        let d = toy();
        assert!(matches!(
            insert_point(&d, &pt("12")),
            Err(Error::DuplicatePoint { first: 4, .. })
        ));
    }

    #[test]
    fn insert_infinity() {
        let d = build(&["0", "1", "3"], 2);
        let (e, _) = insert_point(&d, &ExtendedPoint::Infinity).unwrap();
        assert_eq!(e, rebuild_with(&d, &ExtendedPoint::Infinity).unwrap());
    }

    #[test]
    fn forget_examples() {
        let d = toy();
        let f = forget_point(&d, 4).unwrap(); // 12
        assert_eq!(f.labeled_signature(), "((((0,64)@6,32)@5,(4,20)@4)@2,(1,3)@1)@0+inf");
        let expected = build(&["0", "1", "3", "4", "20", "32", "64", "inf"], 2);
        assert_eq!(f, expected);

        let small = build(&["0", "1", "3", "inf"], 2);
        assert_eq!(forget_point(&small, 2).unwrap().labeled_signature(), "(0,1)@0+inf");
        assert_eq!(forget_point(&small, 3).unwrap(), build(&["0", "1", "3"], 2));
        assert!(matches!(forget_point(&small, 7), Err(Error::IndexOutOfRange { .. })));
        let two = build(&["0", "1", "inf"], 2);
        assert!(matches!(forget_point(&two, 0), Err(Error::TooFewPoints { .. })));
    }
}
