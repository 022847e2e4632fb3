//! Hidden vertices.
//!
//! A non-root internal vertex is hidden when none of its children is a data
//! point, i.e. its class is made only of non-trivial subclasses. The hidden
//! vertices span a subforest; we count its vertices (`v_h`) and components
//! (`b0_h`) and compare them with
//! `v_h <= (n+1)/4 - b0_h + 1` and `b0_h <= (n-4)/3`, `n` being the number
//! of finite data points.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::dendrogram::{Dendrogram, Node};
use crate::error::{Error, Result};
use crate::padic::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VertexClass {
    Top,
    Exposed,
    Hidden,
}

/// Classes of the internal vertices of a tree, keyed by preorder vertex id.
pub fn classify_tree(root: &Node) -> Vec<(usize, VertexClass)> {
    root.preorder()
        .into_iter()
        .filter(|v| !v.node.is_leaf())
        .map(|v| {
            let class = if v.parent.is_none() {
                VertexClass::Top
            } else if v.node.children().iter().all(|c| !c.is_leaf()) {
                VertexClass::Hidden
            } else {
                VertexClass::Exposed
            };
            (v.id, class)
        })
        .collect()
}

pub fn classify_vertices(d: &Dendrogram) -> Vec<(usize, VertexClass)> {
    classify_tree(d.root())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// `(n+1)/4 - b0_h + 1`
    pub v_h: Rational,
    /// `(n-4)/3`
    pub b0_h: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenStats {
    pub n: usize,
    pub v_h: usize,
    pub b0_h: usize,
    pub bounds: Bounds,
}

impl HiddenStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

pub fn stats_for_tree(root: &Node) -> HiddenStats {
    let vertices = root.preorder();
    let classes: std::collections::HashMap<usize, VertexClass> = classify_tree(root).into_iter().collect();
    let hidden = |id: usize| classes.get(&id) == Some(&VertexClass::Hidden);
    let v_h = vertices.iter().filter(|v| hidden(v.id)).count();
    // each component has exactly one vertex whose parent is not hidden
    let b0_h = vertices
        .iter()
        .filter(|v| hidden(v.id) && !v.parent.is_some_and(hidden))
        .count();
    let n = root.leaf_count();
    let n_q = Rational::from(n as i64);
    let bounds = Bounds {
        v_h: &(&(&n_q + &Rational::one()) / &Rational::from(4)) - &Rational::from(b0_h as i64 - 1),
        b0_h: &(&n_q - &Rational::from(4)) / &Rational::from(3),
    };
    HiddenStats { n, v_h, b0_h, bounds }
}

pub fn hidden_stats(d: &Dendrogram) -> HiddenStats {
    stats_for_tree(d.root())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub v_h_holds: bool,
    pub v_h_slack: Rational,
    pub b0_h_holds: bool,
    pub b0_h_slack: Rational,
}

impl BoundCheck {
    pub fn all_hold(&self) -> bool {
        self.v_h_holds && self.b0_h_holds
    }
}

/// Exact comparison against both bounds; slack is `bound - value`.
pub fn check_bounds(stats: &HiddenStats) -> BoundCheck {
    let v_h_slack = &stats.bounds.v_h - &Rational::from(stats.v_h as i64);
    let b0_h_slack = &stats.bounds.b0_h - &Rational::from(stats.b0_h as i64);
    BoundCheck {
        v_h_holds: !v_h_slack.is_negative(),
        v_h_slack,
        b0_h_holds: !b0_h_slack.is_negative(),
        b0_h_slack,
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Leaf,
    Vertex(Vec<Rc<Shape>>),
}

fn shape_to_node(shape: &Shape, depth: i64, next_leaf: &mut usize) -> Node {
    match shape {
        Shape::Leaf => {
            *next_leaf += 1;
            Node::Leaf(*next_leaf - 1)
        }
        Shape::Vertex(children) => Node::Internal {
            level: depth,
            children: children
                .iter()
                .map(|c| shape_to_node(c, depth + 1, next_leaf))
                .collect(),
        },
    }
}

/// All rooted trees with `n` unlabeled leaves and no vertex of out-degree one,
/// each exactly once. Vertices sit at their depth (unit level gaps) and leaves
/// are numbered in preorder.
pub fn enumerate_shapes(n: usize) -> Result<impl Iterator<Item = Node>> {
    if !(2..=10).contains(&n) {
        return Err(Error::ShapeLimit(n));
    }
    // by_size[k] lists the distinct shapes with k leaves in a fixed order
    let mut by_size: Vec<Vec<Rc<Shape>>> = vec![Vec::new(), vec![Rc::new(Shape::Leaf)]];
    for k in 2..=n {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        // children as a multiset: sizes non-increasing, and within one size
        // the shape index non-increasing
        extend_multisets(&by_size, k, k - 1, usize::MAX, &mut chosen, &mut out);
        by_size.push(out);
    }
    let shapes = std::mem::take(&mut by_size[n]);
    Ok(shapes.into_iter().map(|s| {
        let mut next = 0;
        shape_to_node(&s, 0, &mut next)
    }))
}

fn extend_multisets(
    by_size: &[Vec<Rc<Shape>>],
    remaining: usize,
    max_size: usize,
    max_index: usize,
    chosen: &mut Vec<Rc<Shape>>,
    out: &mut Vec<Rc<Shape>>,
) {
    if remaining == 0 {
        if chosen.len() >= 2 {
            out.push(Rc::new(Shape::Vertex(chosen.clone())));
        }
        return;
    }
    for size in (1..=max_size.min(remaining)).rev() {
        let limit = if size == max_size { max_index } else { usize::MAX };
        for (idx, shape) in by_size[size].iter().enumerate() {
            if idx > limit {
                break;
            }
            chosen.push(Rc::clone(shape));
            extend_multisets(by_size, remaining - size, size, idx, chosen, out);
            chosen.pop();
        }
    }
}
