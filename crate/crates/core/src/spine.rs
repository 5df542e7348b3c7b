//! Uniform spanning trees and their depth-first linearisation into a spine.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{Graph, Labeling};
use crate::rng::rng_from_seed;

/// Random-walk steps after which Wilson's algorithm gives up.
pub const UST_STEP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpineError {
    #[error("labeling length {got} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("random walk exceeded {steps} steps without covering the graph")]
    StepCap { steps: u64 },
    #[error("not a spanning tree: {0}")]
    NotATree(String),
    #[error("spine order is not a permutation of 0..{0}")]
    NotAPermutation(usize),
}

/// A spanning tree of some graph, stored as edges and adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SpanningTree {
    /// Builds a tree from 0-based edges, checking there are `n - 1` of them
    /// and that they connect all vertices.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, SpineError> {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(i, j)| (i.min(j), i.max(j))).collect();
        edges.sort_unstable();
        edges.dedup();
        if n == 0 || edges.len() + 1 != n {
            return Err(SpineError::NotATree(format!("{} distinct edges on {n} vertices", edges.len())));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            if i == j || j >= n {
                return Err(SpineError::NotATree(format!("invalid edge ({i}, {j})")));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        let tree = SpanningTree { n, edges, adjacency };
        let reached = tree.preorder(0, |_| {}).len();
        if reached != n {
            return Err(SpineError::NotATree("edges do not connect every vertex".into()));
        }
        Ok(tree)
    }

    fn from_parents(parent: &[Option<usize>]) -> Self {
        let n = parent.len();
        let edges = parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (v, p)));
        Self::from_edges(n, edges).expect("parent array describes a tree")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// True when every tree edge is an edge of `graph`.
    pub fn is_spanning_tree_of(&self, graph: &Graph) -> bool {
        graph.n() == self.n && self.edges.iter().all(|&(i, j)| graph.has_edge(i, j))
    }

    pub fn cut_size(&self, u: &Labeling) -> Result<usize, SpineError> {
        if u.len() != self.n {
            return Err(SpineError::LengthMismatch { expected: self.n, got: u.len() });
        }
        Ok(self.edges.iter().filter(|&&(i, j)| u[i] != u[j]).count())
    }

    pub fn to_graph(&self) -> Graph {
        Graph::new(self.n, self.edges.iter().copied()).expect("a tree is a connected graph")
    }

    /// Depth-first preorder from `root`, with `order_children` permuting each
    /// vertex's unvisited neighbours before they are pushed.
    fn preorder(&self, root: usize, mut order_children: impl FnMut(&mut Vec<usize>)) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::with_capacity(self.n);
        let mut stack = vec![root];
        let mut children = Vec::new();
        seen[root] = true;
        while let Some(v) = stack.pop() {
            out.push(v);
            children.clear();
            children.extend(self.adjacency[v].iter().copied().filter(|&w| !seen[w]));
            order_children(&mut children);
            for &w in children.iter().rev() {
                seen[w] = true;
                stack.push(w);
            }
        }
        out
    }
}

/// Samples a spanning tree of `graph` uniformly at random with Wilson's
/// loop-erased random walk algorithm.
pub fn sample_ust<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> Result<SpanningTree, SpineError> {
    let n = graph.n();
    let mut in_tree = vec![false; n];
    let mut next: Vec<Option<usize>> = vec![None; n];
    let root = rng.random_range(0..n);
    in_tree[root] = true;
    let mut steps: u64 = 0;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = graph.neighbors(u);
            let w = nbrs[rng.random_range(0..nbrs.len())];
            next[u] = Some(w);
            u = w;
            steps += 1;
            if steps > UST_STEP_CAP {
                return Err(SpineError::StepCap { steps: UST_STEP_CAP });
            }
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u].expect("walk recorded a successor");
        }
    }
    next[root] = None;
    Ok(SpanningTree::from_parents(&next))
}

/// A linear ordering of the vertices; `order[p]` is the vertex at position `p`
/// and `pos[v]` the position of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spine {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl Spine {
    pub fn from_order(order: Vec<usize>) -> Result<Self, SpineError> {
        let n = order.len();
        let mut pos = vec![usize::MAX; n];
        for (p, &v) in order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(SpineError::NotAPermutation(n));
            }
            pos[v] = p;
        }
        Ok(Spine { order, pos })
    }

    pub fn identity(n: usize) -> Self {
        Spine { order: (0..n).collect(), pos: (0..n).collect() }
    }

    /// Samples a uniform spanning tree of `graph` and linearises it, drawing
    /// all randomness from one generator seeded with `seed`.
    pub fn sample(graph: &Graph, seed: u64) -> Result<(SpanningTree, Spine), SpineError> {
        let mut rng = rng_from_seed(seed);
        let tree = sample_ust(graph, &mut rng)?;
        let spine = linearize(&tree, &mut rng);
        Ok((tree, spine))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn vertex_at(&self, position: usize) -> usize {
        self.order[position]
    }

    pub fn position_of(&self, vertex: usize) -> usize {
        self.pos[vertex]
    }

    /// Re-indexes a vertex labeling by spine position.
    pub fn to_positions(&self, u: &Labeling) -> Result<Labeling, SpineError> {
        self.check(u)?;
        Ok(Labeling::new(self.order.iter().map(|&v| u[v]).collect()).expect("labels already validated"))
    }

    /// Number of adjacent spine positions whose vertices disagree under `u`.
    pub fn spine_cut(&self, u: &Labeling) -> Result<usize, SpineError> {
        self.check(u)?;
        Ok(self.order.windows(2).filter(|w| u[w[0]] != u[w[1]]).count())
    }

    fn check(&self, u: &Labeling) -> Result<(), SpineError> {
        if u.len() != self.len() {
            return Err(SpineError::LengthMismatch { expected: self.len(), got: u.len() });
        }
        Ok(())
    }
}

/// Depth-first linearisation from a uniformly chosen root with uniformly
/// shuffled child order, keeping the first visit of each vertex.
pub fn linearize<R: Rng + ?Sized>(tree: &SpanningTree, rng: &mut R) -> Spine {
    let root = rng.random_range(0..tree.n());
    linearize_from(tree, root, rng)
}

/// As [`linearize`] with a fixed root.
pub fn linearize_from<R: Rng + ?Sized>(tree: &SpanningTree, root: usize, rng: &mut R) -> Spine {
    let order = tree.preorder(root, |children| children.shuffle(rng));
    Spine::from_order(order).expect("preorder of a spanning tree is a permutation")
}
