/// A vertex of a dendrogram. Leaves refer to positions in the point list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(usize),
    Internal { level: i64, children: Vec<Node> },
}

impl Node {
    pub fn internal(level: i64, children: Vec<Node>) -> Self {
        Node::Internal { level, children }
    }

    pub fn level(&self) -> Option<i64> {
        match self {
            Node::Leaf(_) => None,
            Node::Internal { level, .. } => Some(*level),
        }
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::Leaf(_) => &[],
            Node::Internal { children, .. } => children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf(_))
    }

    /// Smallest leaf index below this node.
    pub fn min_leaf(&self) -> usize {
        match self {
            Node::Leaf(i) => *i,
            Node::Internal { children, .. } => children
                .iter()
                .map(Node::min_leaf)
                .min()
                .expect("internal node has children"),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Node::Leaf(i) => out.push(*i),
            Node::Internal { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Internal { children, .. } => children.iter().map(Node::leaf_count).sum(),
        }
    }

    pub fn contains_leaf(&self, index: usize) -> bool {
        match self {
            Node::Leaf(i) => *i == index,
            Node::Internal { children, .. } => children.iter().any(|c| c.contains_leaf(index)),
        }
    }

    /// Total number of vertices, leaves included.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Node::size).sum::<usize>()
    }

    /// Sorts children by their smallest leaf, recursively.
    pub fn canonicalize(&mut self) {
        if let Node::Internal { children, .. } = self {
            for c in children.iter_mut() {
                c.canonicalize();
            }
            children.sort_by_key(Node::min_leaf);
        }
    }

    /// Level of the lowest common ancestor of two distinct leaves.
    pub fn lca_level(&self, a: usize, b: usize) -> Option<i64> {
        let Node::Internal { level, children } = self else {
            return None;
        };
        let ca = children.iter().position(|c| c.contains_leaf(a))?;
        let cb = children.iter().position(|c| c.contains_leaf(b))?;
        if ca == cb {
            children[ca].lca_level(a, b)
        } else {
            Some(*level)
        }
    }

    /// Removes a leaf and suppresses the vertex left with a single child.
    /// Returns `None` if nothing would remain.
    pub fn remove_leaf(&self, index: usize) -> Option<Node> {
        match self {
            Node::Leaf(i) if *i == index => None,
            Node::Leaf(i) => Some(Node::Leaf(*i)),
            Node::Internal { level, children } => {
                let mut kept: Vec<Node> = children.iter().filter_map(|c| c.remove_leaf(index)).collect();
                match kept.len() {
                    0 => None,
                    1 => kept.pop(),
                    _ => Some(Node::Internal {
                        level: *level,
                        children: kept,
                    }),
                }
            }
        }
    }

    /// Applies `f` to every leaf index.
    pub fn map_leaves(&mut self, f: &impl Fn(usize) -> usize) {
        match self {
            Node::Leaf(i) => *i = f(*i),
            Node::Internal { children, .. } => {
                for c in children {
                    c.map_leaves(f);
                }
            }
        }
    }

    /// Vertices in preorder; the position in the returned list is the vertex id.
    pub fn preorder(&self) -> Vec<VertexInfo<'_>> {
        let mut out = Vec::with_capacity(self.size());
        self.walk(None, &mut out);
        out
    }

    fn walk<'a>(&'a self, parent: Option<usize>, out: &mut Vec<VertexInfo<'a>>) -> usize {
        let id = out.len();
        out.push(VertexInfo {
            id,
            parent,
            node: self,
            children: Vec::new(),
        });
        let mut ids = Vec::new();
        for c in self.children() {
            ids.push(c.walk(Some(id), out));
        }
        out[id].children = ids;
        id
    }

    /// Replaces the vertex with preorder id `target` by `f(vertex)`.
    pub(crate) fn replace_at(&mut self, target: usize, f: impl FnOnce(Node) -> Node) {
        let mut f = Some(f);
        let mut counter = 0;
        self.replace_walk(target, &mut counter, &mut f);
    }

    fn replace_walk<F: FnOnce(Node) -> Node>(&mut self, target: usize, counter: &mut usize, f: &mut Option<F>) -> bool {
        if *counter == target {
            let old = std::mem::replace(self, Node::Leaf(usize::MAX));
            *self = (f.take().expect("replaced once"))(old);
            return true;
        }
        *counter += 1;
        if let Node::Internal { children, .. } = self {
            for c in children {
                if c.replace_walk(target, counter, f) {
                    return true;
                }
            }
        }
        false
    }
}

/// A vertex seen during a preorder walk.
#[derive(Clone, Debug)]
pub struct VertexInfo<'a> {
    pub id: usize,
    pub parent: Option<usize>,
    pub node: &'a Node,
    pub children: Vec<usize>,
}
