use crate::expr::ExprNode;

/// Flat pre-order view of a tree. Node ids are pre-order positions, so the
/// subtree of `id` is the id range `id..id + size[id]`.
pub(crate) struct Arena<'a> {
    pub nodes: Vec<&'a ExprNode>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub size: Vec<usize>,
    pub depth: Vec<usize>,
}

impl<'a> Arena<'a> {
    pub fn new(root: &'a ExprNode) -> Arena<'a> {
        let mut arena = Arena {
            nodes: Vec::new(),
            parent: Vec::new(),
            children: Vec::new(),
            size: Vec::new(),
            depth: Vec::new(),
        };
        arena.push(root, None, 0);
        arena
    }

    fn push(&mut self, node: &'a ExprNode, parent: Option<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.size.push(0);
        self.depth.push(depth);
        for c in &node.children {
            let cid = self.push(c, Some(id), depth + 1);
            self.children[id].push(cid);
        }
        self.size[id] = self.nodes.len() - id;
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.children[id].is_empty()
    }

    /// Whether `b` lies in the subtree of `a` (inclusive).
    pub fn contains(&self, a: usize, b: usize) -> bool {
        a <= b && b < a + self.size[a]
    }

    pub fn subtree(&self, id: usize) -> std::ops::Range<usize> {
        id..id + self.size[id]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }
}
