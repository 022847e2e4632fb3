//! The p-adic dendrogram of a finite set of points: the smallest subtree of the
//! Bruhat-Tits tree whose ends are the points, with vertices of degree two
//! suppressed.
//!
//! Every internal vertex is a disk; its `level` is the radius exponent, which
//! is also the valuation at which its children merge. Levels grow strictly
//! from the root toward the leaves. When the point at infinity is among the
//! data, the root additionally carries the edge toward that end.

pub(crate) mod format;
mod matrix;
mod node;

use std::fmt;

pub use format::{from_json, to_dot, to_json, to_newick};
pub use matrix::{single_linkage_oracle, valuation_matrix, ValuationMatrix};
pub use node::{Node, VertexInfo};

use crate::error::{Error, Result};
use crate::padic::{disk_of, Disk, ExtendedPoint, Prime, Rational, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dendrogram {
    prime: Prime,
    points: Vec<ExtendedPoint>,
    root: Node,
    has_infinity_end: bool,
}

/// Deterministic serialization of a dendrogram with levels, leaves named by
/// point index and children ordered by their smallest point index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalSignature(pub String);

impl fmt::Display for CanonicalSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn check_distinct(points: &[ExtendedPoint]) -> Result<()> {
    let mut seen = std::collections::HashMap::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        if let Some(first) = seen.insert(x, i) {
            return Err(Error::DuplicatePoint {
                point: x.to_string(),
                first,
                second: i,
            });
        }
    }
    Ok(())
}

fn finite_rational(points: &[ExtendedPoint], i: usize) -> &Rational {
    points[i].as_finite().expect("leaf is a finite point")
}

/// Recursively splits the points of one disk into the maximal subdisks that
/// contain data.
fn split(indices: Vec<usize>, points: &[ExtendedPoint], p: Prime) -> Node {
    if indices.len() == 1 {
        return Node::Leaf(indices[0]);
    }
    let pivot = finite_rational(points, indices[0]);
    let level = indices[1..]
        .iter()
        .map(|&i| {
            crate::padic::valuation(&(finite_rational(points, i) - pivot), p)
                .finite()
                .expect("points are distinct")
        })
        .min()
        .expect("at least two points");
    let mut groups: Vec<(Disk, Vec<usize>)> = Vec::new();
    for i in indices {
        let disk = disk_of(finite_rational(points, i), level + 1, p);
        match groups.iter_mut().find(|(d, _)| *d == disk) {
            Some((_, members)) => members.push(i),
            None => groups.push((disk, vec![i])),
        }
    }
    debug_assert!(groups.len() >= 2);
    let children = groups
        .into_iter()
        .map(|(_, members)| split(members, points, p))
        .collect();
    Node::Internal { level, children }
}

/// Builds the p-adic dendrogram of `points`.
///
/// Needs at least two finite points; at most one point may be infinity (a
/// second one is a duplicate). The result is canonical: children are ordered
/// by their smallest point index.
pub fn build_dendrogram(points: &[ExtendedPoint], p: Prime) -> Result<Dendrogram> {
    check_distinct(points)?;
    let finite: Vec<usize> = (0..points.len()).filter(|&i| !points[i].is_infinity()).collect();
    if finite.len() < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            found: finite.len(),
        });
    }
    let has_infinity_end = finite.len() < points.len();
    let mut root = split(finite, points, p);
    root.canonicalize();
    Ok(Dendrogram {
        prime: p,
        points: points.to_vec(),
        root,
        has_infinity_end,
    })
}

impl Dendrogram {
    /// Assembles a dendrogram from parts without checking it against the points.
    pub(crate) fn from_parts(prime: Prime, points: Vec<ExtendedPoint>, mut root: Node, has_infinity_end: bool) -> Self {
        root.canonicalize();
        Dendrogram {
            prime,
            points,
            root,
            has_infinity_end,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn points(&self) -> &[ExtendedPoint] {
        &self.points
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn has_infinity_end(&self) -> bool {
        self.has_infinity_end
    }

    /// Number of finite points, i.e. leaves.
    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn root_level(&self) -> i64 {
        self.root.level().expect("root of a dendrogram is internal")
    }

    pub fn vertices(&self) -> Vec<VertexInfo<'_>> {
        self.root.preorder()
    }

    /// Level of the lowest common ancestor of points `i` and `j`.
    ///
    /// Follows the conventions of [`pairwise_valuation`]: `inf` for `i == j`
    /// and `-inf` against the point at infinity.
    pub fn cophenetic_valuation(&self, i: usize, j: usize) -> Result<Valuation> {
        for k in [i, j] {
            if k >= self.points.len() {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    len: self.points.len(),
                });
            }
        }
        if i == j {
            return Ok(Valuation::Infinity);
        }
        if self.points[i].is_infinity() || self.points[j].is_infinity() {
            return Ok(Valuation::NegInfinity);
        }
        Ok(Valuation::Finite(self.root.lca_level(i, j).expect("both are leaves")))
    }

    /// Signature of the tree alone, leaves rendered by `label`, levels optional.
    pub fn tree_signature(&self, label: impl Fn(usize) -> String, with_levels: bool) -> String {
        fn go(node: &Node, label: &impl Fn(usize) -> String, with_levels: bool, out: &mut String) {
            match node {
                Node::Leaf(i) => out.push_str(&label(*i)),
                Node::Internal { level, children } => {
                    out.push('(');
                    for (k, c) in children.iter().enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        go(c, label, with_levels, out);
                    }
                    out.push(')');
                    if with_levels {
                        out.push_str(&format!("@{level}"));
                    }
                }
            }
        }
        let mut out = String::new();
        go(&self.root, &label, with_levels, &mut out);
        out
    }

    /// `(...)@level` tree with point indices as leaf names, followed by `+inf`
    /// when the dendrogram has an end at infinity.
    pub fn signature(&self) -> CanonicalSignature {
        let mut s = self.tree_signature(|i| i.to_string(), true);
        if self.has_infinity_end {
            s.push_str("+inf");
        }
        CanonicalSignature(s)
    }

    /// Like [`Dendrogram::signature`] but with the point values as leaf names.
    pub fn labeled_signature(&self) -> String {
        let mut s = self.tree_signature(|i| self.points[i].to_string(), true);
        if self.has_infinity_end {
            s.push_str("+inf");
        }
        s
    }

    /// The same tree, forgetting the end at infinity.
    pub fn without_infinity_end(&self) -> Dendrogram {
        Dendrogram {
            has_infinity_end: false,
            ..self.clone()
        }
    }
}

/// Wrapper for [`Dendrogram::signature`].
pub fn signature(d: &Dendrogram) -> CanonicalSignature {
    d.signature()
}

/// Checks that `points` is a valid point list for `p`-adic dendrograms.
pub fn parse_points<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Result<Vec<ExtendedPoint>> {
    tokens.into_iter().map(str::parse).collect()
}

/// Pairwise valuation through the tree, for all pairs.
#[cfg(test)]
pub(crate) fn lca_matches_points(d: &Dendrogram) -> bool {
    let n = d.points.len();
    (0..n).all(|i| {
        (i + 1..n).all(|j| {
            d.cophenetic_valuation(i, j).ok()
                == Some(crate::padic::pairwise_valuation(&d.points[i], &d.points[j], d.prime))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn pts(values: &[&str]) -> Vec<ExtendedPoint> {
        parse_points(values.iter().copied()).unwrap()
    }

    fn toy() -> Dendrogram {
        build_dendrogram(&pts(&["0", "1", "3", "4", "12", "20", "32", "64", "inf"]), Prime::TWO).unwrap()
    }

    #[test]
    fn toy_structure() {
        let d = toy();
        assert_eq!(
            d.labeled_signature(),
            "((((0,64)@6,32)@5,((4,20)@4,12)@3)@2,(1,3)@1)@0+inf"
        );
        assert_eq!(d.signature().0, "((((0,7)@6,6)@5,((3,5)@4,4)@3)@2,(1,2)@1)@0+inf");
        assert!(d.has_infinity_end());
        assert_eq!(d.leaf_count(), 8);
    }

    #[test]
    fn cophenetic_examples() {
        let d = toy();
        assert_eq!(d.cophenetic_valuation(0, 7).unwrap(), Valuation::Finite(6));
        assert_eq!(d.cophenetic_valuation(5, 7).unwrap(), Valuation::Finite(2));
        assert_eq!(d.cophenetic_valuation(1, 2).unwrap(), Valuation::Finite(1));
        assert_eq!(d.cophenetic_valuation(3, 3).unwrap(), Valuation::Infinity);
        assert_eq!(d.cophenetic_valuation(3, 8).unwrap(), Valuation::NegInfinity);
        assert_eq!(
            d.cophenetic_valuation(0, 9),
            Err(Error::IndexOutOfRange { index: 9, len: 9 })
        );
        assert!(lca_matches_points(&d));
    }

    #[test]
    fn small_cases() {
        let d = build_dendrogram(&pts(&["0", "1", "inf"]), Prime::TWO).unwrap();
        assert_eq!(d.signature().0, "(0,1)@0+inf");
        let d = build_dendrogram(&pts(&["0", "64"]), Prime::TWO).unwrap();
        assert_eq!(d.signature().0, "(0,1)@6");
        let d = build_dendrogram(&pts(&["1/2", "3/2", "2"]), Prime::TWO).unwrap();
        assert_eq!(d.labeled_signature(), "((1/2,3/2)@0,2)@-1");
    }

    #[test]
    fn ternary_vertex_for_p3() {
        let d = build_dendrogram(&pts(&["0", "1", "2", "3"]), Prime::new(3).unwrap()).unwrap();
        assert_eq!(d.signature().0, "((0,3)@1,1,2)@0");
    }

    #[test]
    fn errors() {
        assert_eq!(
            build_dendrogram(&pts(&["0", "1", "0"]), Prime::TWO),
            Err(Error::DuplicatePoint {
                point: "0".into(),
                first: 0,
                second: 2
            })
        );
        assert!(matches!(
            build_dendrogram(&pts(&["inf", "1", "inf"]), Prime::TWO),
            Err(Error::DuplicatePoint { .. })
        ));
        assert_eq!(
            build_dendrogram(&pts(&["5", "inf"]), Prime::TWO),
            Err(Error::TooFewPoints { required: 2, found: 1 })
        );
    }

    #[test]
    fn signature_ignores_input_child_order() {
        let a = build_dendrogram(&pts(&["0", "1", "inf"]), Prime::TWO).unwrap();
        let b = build_dendrogram(&pts(&["0", "1", "2", "inf"]), Prime::TWO).unwrap();
        assert_ne!(a.signature(), b.signature());
        let shuffled = Dendrogram::from_parts(
            Prime::TWO,
            b.points().to_vec(),
            Node::internal(
                0,
                vec![Node::Leaf(1), Node::internal(1, vec![Node::Leaf(2), Node::Leaf(0)])],
            ),
            true,
        );
        assert_eq!(shuffled.signature(), b.signature());
    }
}
