//! Graphs, labelings, cut sizes and resistance computations.
//!
//! Vertices are 0-based in memory. The edge-list text format uses 1-based ids:
//!
//! ```text
//! # comment
//! n=4
//! 1 2
//! 2 3
//! 3 4
//! ```
//!
//! `;` is accepted as a line separator, so `"n=3; 1 2; 2 3"` is a valid
//! document.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: vertex id {id} out of range 1..={n}")]
    OutOfRange { line: usize, id: usize, n: usize },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("labeling length {got} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("label {0} at index {1} is not -1 or +1")]
    InvalidLabel(i64, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("feature data: {0}")]
    Features(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// A ±1 vector, indexed by vertex or by spine position depending on context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling(Vec<i8>);

impl Labeling {
    pub fn new(labels: Vec<i8>) -> Result<Self, GraphError> {
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l != 1 && l != -1) {
            return Err(GraphError::InvalidLabel(l as i64, i));
        }
        Ok(Labeling(labels))
    }

    pub fn constant(n: usize, label: i8) -> Self {
        assert!(label == 1 || label == -1);
        Labeling(vec![label; n])
    }

    /// Labeling whose bit `i` of `mask` set means `+1` at index `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Labeling((0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn hamming_distance(&self, other: &Labeling) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl std::ops::Index<usize> for Labeling {
    type Output = i8;
    fn index(&self, i: usize) -> &i8 {
        &self.0[i]
    }
}

/// Undirected, connected, simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based edges. Duplicates (in either orientation)
    /// are collapsed; self-loops, out-of-range ids and disconnected inputs
    /// are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (idx, (i, j)) in edges.into_iter().enumerate() {
            if i == j {
                return Err(GraphError::SelfLoop { line: idx + 1, vertex: i + 1 });
            }
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::OutOfRange { line: idx + 1, id: v + 1, n });
                }
            }
            set.insert((i.min(j), i.max(j)));
        }
        Self::from_edge_set(n, set)
    }

    fn from_edge_set(n: usize, set: BTreeSet<(usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Parse { line: 0, message: "graph must have at least one vertex".into() });
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        let g = Graph { n, edges, adjacency };
        let components = g.component_count();
        if components != 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(g)
    }

    /// Parses the edge-list text format.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut n: Option<usize> = None;
        let mut set = BTreeSet::new();
        let units = text.split(['\n', ';']).enumerate();
        for (idx, raw) in units {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some(count) = n else {
                let value = content
                    .strip_prefix("n")
                    .map(str::trim_start)
                    .and_then(|s| s.strip_prefix('='))
                    .ok_or_else(|| GraphError::Parse { line, message: format!("expected header `n=<count>`, found `{content}`") })?;
                let parsed = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| GraphError::Parse { line, message: format!("bad vertex count: {e}") })?;
                if parsed == 0 {
                    return Err(GraphError::Parse { line, message: "vertex count must be positive".into() });
                }
                n = Some(parsed);
                continue;
            };
            let mut fields = content.split_whitespace();
            let mut next_id = || -> Result<usize, GraphError> {
                let f = fields
                    .next()
                    .ok_or_else(|| GraphError::Parse { line, message: "expected two vertex ids".into() })?;
                f.parse::<usize>()
                    .map_err(|e| GraphError::Parse { line, message: format!("bad vertex id `{f}`: {e}") })
            };
            let (a, b) = (next_id()?, next_id()?);
            if fields.next().is_some() {
                return Err(GraphError::Parse { line, message: "expected exactly two vertex ids".into() });
            }
            for id in [a, b] {
                if id == 0 || id > count {
                    return Err(GraphError::OutOfRange { line, id, n: count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            set.insert(((a - 1).min(b - 1), (a - 1).max(b - 1)));
        }
        let n = n.ok_or(GraphError::Parse { line: 1, message: "missing header `n=<count>`".into() })?;
        Self::from_edge_set(n, set)
    }

    pub fn from_file(path: &Path) -> Result<Self, crate::Error> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(format!("reading {}", path.display()), e))?;
        Ok(Self::parse(&text)?)
    }

    /// Renders the edge-list text format (1-based ids).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(i, j) in &self.edges {
            out.push_str(&format!("{} {}\n", i + 1, j + 1));
        }
        out
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path graph")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle graph")
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("complete graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    fn check_labeling(&self, u: &Labeling) -> Result<(), GraphError> {
        if u.len() != self.n {
            return Err(GraphError::LengthMismatch { expected: self.n, got: u.len() });
        }
        Ok(())
    }

    /// Number of edges whose endpoints disagree under `u`.
    pub fn cut_size(&self, u: &Labeling) -> Result<usize, GraphError> {
        self.check_labeling(u)?;
        Ok(self.edges.iter().filter(|&&(i, j)| u[i] != u[j]).count())
    }

    /// Combinatorial Laplacian `D - A` as a dense matrix.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            l[(i, j)] -= 1.0;
            l[(j, i)] -= 1.0;
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
        }
        l
    }

    pub fn laplacian_pinv(&self) -> Result<LaplacianPinv, GraphError> {
        LaplacianPinv::new(self)
    }

    pub fn effective_resistance(&self, i: usize, j: usize) -> Result<f64, GraphError> {
        for v in [i, j] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        Ok(self.laplacian_pinv()?.resistance(i, j))
    }

    /// Sum of effective resistances over the cut edges of `u`.
    pub fn resistance_weighted_cut(&self, u: &Labeling) -> Result<f64, GraphError> {
        self.check_labeling(u)?;
        let pinv = self.laplacian_pinv()?;
        Ok(pinv.resistance_weighted_cut(self, u))
    }
}

/// Moore–Penrose pseudo-inverse of a connected graph's Laplacian.
#[derive(Debug, Clone)]
pub struct LaplacianPinv {
    matrix: DMatrix<f64>,
}

/// Relative cutoff below which Laplacian eigenvalues count as zero.
pub const PINV_EIGEN_CUTOFF: f64 = 1e-10;

impl LaplacianPinv {
    pub fn new(graph: &Graph) -> Result<Self, GraphError> {
        let n = graph.n();
        if n == 1 {
            return Ok(LaplacianPinv { matrix: DMatrix::zeros(1, 1) });
        }
        let eig = SymmetricEigen::new(graph.laplacian());
        let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        if !lambda_max.is_finite() || lambda_max <= 0.0 {
            return Err(GraphError::Numerical(format!("degenerate Laplacian spectrum (max eigenvalue {lambda_max})")));
        }
        let cutoff = PINV_EIGEN_CUTOFF * lambda_max;
        let kept: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > cutoff).collect();
        if kept.len() != n - 1 {
            return Err(GraphError::Numerical(format!(
                "expected a one-dimensional Laplacian null space, found {}",
                n - kept.len()
            )));
        }
        let mut scaled = DMatrix::zeros(n, kept.len());
        let mut basis = DMatrix::zeros(n, kept.len());
        for (c, &k) in kept.iter().enumerate() {
            let inv = 1.0 / eig.eigenvalues[k];
            for r in 0..n {
                let v = eig.eigenvectors[(r, k)];
                basis[(r, c)] = v;
                scaled[(r, c)] = v * inv;
            }
        }
        let matrix = &scaled * basis.transpose();
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(GraphError::Numerical("non-finite entry in Laplacian pseudo-inverse".into()));
        }
        Ok(LaplacianPinv { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn resistance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let m = &self.matrix;
        (m[(i, i)] + m[(j, j)] - 2.0 * m[(i, j)]).max(0.0)
    }

    pub fn resistance_weighted_cut(&self, graph: &Graph, u: &Labeling) -> f64 {
        graph
            .edges()
            .iter()
            .filter(|&&(i, j)| u[i] != u[j])
            .map(|&(i, j)| self.resistance(i, j))
            .sum()
    }
}

/// Which column of a feature CSV (if any) holds integer class ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassColumn {
    /// Last column is the class when the header row names it `class`.
    #[default]
    Auto,
    Last,
    None,
}

/// Points in `R^d` with optional integer class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    data: Vec<f64>,
    classes: Option<Vec<u32>>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<Vec<f64>>, classes: Option<Vec<u32>>) -> Result<Self, GraphError> {
        if rows.len() < 2 {
            return Err(GraphError::Features(format!("need at least 2 points, got {}", rows.len())));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(GraphError::Features("points have zero dimension".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(GraphError::Features(format!("row {} has dimension {}, expected {dim}", bad + 1, rows[bad].len())));
        }
        if let Some(c) = &classes {
            if c.len() != rows.len() {
                return Err(GraphError::Features("class column length differs from row count".into()));
            }
        }
        Ok(FeatureMatrix { dim, data: rows.into_iter().flatten().collect(), classes })
    }

    pub fn from_csv_reader<R: Read>(reader: R, class_column: ClassColumn) -> Result<Self, GraphError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        let mut has_class = class_column == ClassColumn::Last;
        for (idx, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| GraphError::Features(e.to_string()))?;
            if idx == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
                if class_column == ClassColumn::Auto {
                    has_class = record.iter().next_back().is_some_and(|h| h.eq_ignore_ascii_case("class"));
                }
                continue;
            }
            let mut values: Vec<&str> = record.iter().collect();
            if has_class {
                let c = values.pop().ok_or_else(|| GraphError::Features(format!("record {}: empty", idx + 1)))?;
                let id = c
                    .parse::<u32>()
                    .map_err(|_| GraphError::Features(format!("record {}: class `{c}` is not a non-negative integer", idx + 1)))?;
                classes.push(id);
            }
            let row = values
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| GraphError::Features(format!("record {}: `{f}` is not a number", idx + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Self::new(rows, has_class.then_some(classes))
    }

    pub fn from_csv_file(path: &Path, class_column: ClassColumn) -> Result<Self, crate::Error> {
        let file = std::fs::File::open(path).map_err(|e| crate::Error::io(format!("opening {}", path.display()), e))?;
        Ok(Self::from_csv_reader(std::io::BufReader::new(file), class_column)?)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn classes(&self) -> Option<&[u32]> {
        self.classes.as_deref()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self, GraphError> {
        let rows = indices.iter().map(|&i| self.row(i).to_vec()).collect();
        let classes = self.classes.as_ref().map(|c| indices.iter().map(|&i| c[i]).collect());
        Self::new(rows, classes)
    }

    fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// Union of the symmetrised Euclidean `k`-nearest-neighbour graph and a
/// Euclidean minimum spanning tree. Distance ties are broken by the smaller
/// vertex index (kNN) and by the lexicographically smaller index pair (MST).
pub fn knn_union_mst_graph(x: &FeatureMatrix, k: usize) -> Result<Graph, GraphError> {
    let n = x.len();
    if k == 0 || k >= n {
        return Err(GraphError::Features(format!("k must satisfy 1 <= k < n (k = {k}, n = {n})")));
    }
    let mut edges = BTreeSet::new();
    let mut dist_row = vec![0.0; n];
    let mut candidates: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        for (j, d) in dist_row.iter_mut().enumerate() {
            *d = if i == j { 0.0 } else { x.sq_dist(i, j) };
        }
        candidates.clear();
        candidates.extend((0..n).filter(|&j| j != i));
        let by_distance = |a: &usize, b: &usize| dist_row[*a].total_cmp(&dist_row[*b]).then(a.cmp(b));
        candidates.select_nth_unstable_by(k - 1, by_distance);
        candidates[..k].sort_unstable_by(by_distance);
        for &j in &candidates[..k] {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    for e in euclidean_mst(x) {
        edges.insert(e);
    }
    Graph::from_edge_set(n, edges)
}

/// Prim's algorithm under the strict edge order `(distance, i, j)`, which
/// makes the tree unique and equal to the Kruskal tree under the same order.
fn euclidean_mst(x: &FeatureMatrix) -> Vec<(usize, usize)> {
    let n = x.len();
    let key_cmp = |a: &(f64, usize, usize), b: &(f64, usize, usize)| -> Ordering {
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    };
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; n];
    let mut tree = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    let mut last = 0;
    for _ in 1..n {
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = (x.sq_dist(last, v), last.min(v), last.max(v));
            if best[v].is_none_or(|b| key_cmp(&cand, &b) == Ordering::Less) {
                best[v] = Some(cand);
            }
        }
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| key_cmp(&best[a].unwrap(), &best[b].unwrap()))
            .expect("vertex outside tree");
        let (_, i, j) = best[next].unwrap();
        tree.push((i, j));
        in_tree[next] = true;
        last = next;
    }
    tree
}
