//! Finite graphs with exact distances, used as ground truth for kernel
//! positivity and for the median-graph properties.

mod kernels;
mod median;

pub use kernels::{
    conditionally_negative_check, find_failing_radius, gram_matrix, gram_psd_check, median_kernel_check,
    schoenberg_check, CondNegCheck, PsdCheck,
};
pub use median::{hyperplane_decomposition, is_median, is_median_capped, sageev_distance_check, HyperplaneDecomposition};

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of vertices of generated graphs.
pub const DEFAULT_VERTEX_CAP: usize = 20_000;

/// How a graph was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    Tree { q: u64, radius: usize },
    Product(Vec<Descriptor>),
    Path(usize),
    Cycle(usize),
    Petersen,
    CompleteBipartite(usize, usize),
    Explicit,
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Tree { q, radius } => write!(f, "tree_ball(q={q}, R={radius})"),
            Descriptor::Product(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                f.write_str(&names.join(" x "))
            }
            Descriptor::Path(n) => write!(f, "path({n})"),
            Descriptor::Cycle(n) => write!(f, "cycle({n})"),
            Descriptor::Petersen => f.write_str("petersen"),
            Descriptor::CompleteBipartite(a, b) => write!(f, "K_{{{a},{b}}}"),
            Descriptor::Explicit => f.write_str("explicit"),
        }
    }
}

/// A connected finite graph with its full distance matrix.
#[derive(Clone, Debug)]
pub struct GraphBall {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    dist: Vec<u32>,
    pub descriptor: Descriptor,
}

impl GraphBall {
    /// Builds a graph from an edge list and computes BFS distances.
    pub fn from_edges(n_vertices: usize, edges: Vec<(usize, usize)>, descriptor: Descriptor) -> Result<Self> {
        let neighbors = adjacency(n_vertices, &edges)?;
        let mut dist = vec![u32::MAX; n_vertices * n_vertices];
        for source in 0..n_vertices {
            bfs(&neighbors, source, &mut dist[source * n_vertices..(source + 1) * n_vertices]);
        }
        if dist.contains(&u32::MAX) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(Self { n_vertices, edges, neighbors, dist, descriptor })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    pub fn dist(&self, x: usize, y: usize) -> u32 {
        self.dist[x * self.n_vertices + y]
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// Distances recomputed by breadth-first search from every vertex.
    pub fn bfs_distances(&self) -> Vec<u32> {
        let n = self.n_vertices;
        let mut dist = vec![u32::MAX; n * n];
        for source in 0..n {
            bfs(&self.neighbors, source, &mut dist[source * n..(source + 1) * n]);
        }
        dist
    }

    /// Distance matrix in row-major order.
    pub fn distances(&self) -> &[u32] {
        &self.dist
    }

    /// `n <count>` followed by one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n_vertices);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the format of [`GraphBall::to_edge_list`]; `#` starts a comment.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidGraph("empty edge list".into()))?;
        let n = header
            .strip_prefix('n')
            .and_then(|rest| rest.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::InvalidGraph(format!("expected `n <count>`, found `{header}`")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::InvalidGraph(format!("malformed edge `{line}`"))),
            }
        }
        Self::from_edges(n, edges, Descriptor::Explicit)
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    let mut neighbors = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
        }
        if neighbors[u].contains(&v) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
        }
        neighbors[u].push(v);
        neighbors[v].push(u);
    }
    Ok(neighbors)
}

fn bfs(neighbors: &[Vec<usize>], source: usize, dist: &mut [u32]) {
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        for &y in &neighbors[x] {
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
}

/// Number of vertices of the ball of radius `R` in the tree of degree `q + 1`.
pub fn tree_ball_size(q: u64, radius: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut level: usize = 1;
    for r in 1..=radius {
        level = level.checked_mul(if r == 1 { q as usize + 1 } else { q as usize })?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// The ball of radius `R` about a vertex of the `(q+1)`-homogeneous tree.
pub fn tree_ball(q: u64, radius: usize) -> Result<GraphBall> {
    tree_ball_capped(q, radius, DEFAULT_VERTEX_CAP)
}

pub fn tree_ball_capped(q: u64, radius: usize, cap: usize) -> Result<GraphBall> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("tree degree q = {q} must be at least 2")));
    }
    let n = tree_ball_size(q, radius).unwrap_or(usize::MAX);
    if n > cap {
        return Err(Error::TooLarge { vertices: n, cap });
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut frontier = vec![0usize];
    let mut next_id = 1;
    for r in 0..radius {
        let children = if r == 0 { q + 1 } else { q } as usize;
        let mut next = Vec::with_capacity(frontier.len() * children);
        for &parent in &frontier {
            for _ in 0..children {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    GraphBall::from_edges(n, edges, Descriptor::Tree { q, radius })
}

/// Cartesian product: tuples adjacent when exactly one coordinate moves along an edge.
pub fn product_ball(factors: &[GraphBall]) -> Result<GraphBall> {
    product_ball_capped(factors, DEFAULT_VERTEX_CAP)
}

pub fn product_ball_capped(factors: &[GraphBall], cap: usize) -> Result<GraphBall> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("product needs at least one factor".into()));
    }
    let n = factors
        .iter()
        .try_fold(1usize, |acc, g| acc.checked_mul(g.n_vertices))
        .unwrap_or(usize::MAX);
    if n > cap {
        return Err(Error::TooLarge { vertices: n, cap });
    }
    let sizes: Vec<usize> = factors.iter().map(|g| g.n_vertices).collect();
    let strides: Vec<usize> = (0..factors.len()).map(|i| sizes[i + 1..].iter().product()).collect();
    let coords = |mut x: usize| -> Vec<usize> {
        let mut c = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            c[i] = x % sizes[i];
            x /= sizes[i];
        }
        c
    };

    let mut edges = Vec::new();
    for x in 0..n {
        let cx = coords(x);
        for (i, g) in factors.iter().enumerate() {
            for &y in g.neighbors(cx[i]) {
                if y > cx[i] {
                    edges.push((x, x + (y - cx[i]) * strides[i]));
                }
            }
        }
    }
    let neighbors = adjacency(n, &edges)?;
    let all: Vec<Vec<usize>> = (0..n).map(coords).collect();
    let mut dist = vec![0u32; n * n];
    for x in 0..n {
        for y in 0..n {
            dist[x * n + y] = factors.iter().enumerate().map(|(i, g)| g.dist(all[x][i], all[y][i])).sum();
        }
    }
    let descriptor = Descriptor::Product(factors.iter().map(|g| g.descriptor.clone()).collect());
    Ok(GraphBall { n_vertices: n, edges, neighbors, dist, descriptor })
}

/// Path with `n` vertices.
pub fn path(n: usize) -> Result<GraphBall> {
    let edges = (1..n).map(|i| (i - 1, i)).collect();
    GraphBall::from_edges(n, edges, Descriptor::Path(n))
}

/// Cycle with `n ≥ 3` vertices.
pub fn cycle(n: usize) -> Result<GraphBall> {
    if n < 3 {
        return Err(Error::InvalidParameter("a cycle needs at least 3 vertices".into()));
    }
    let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    GraphBall::from_edges(n, edges, Descriptor::Cycle(n))
}

/// `a × b` grid, the product of two paths.
pub fn grid(a: usize, b: usize) -> Result<GraphBall> {
    product_ball(&[path(a)?, path(b)?])
}

/// The `d`-dimensional hypercube.
pub fn hypercube(d: usize) -> Result<GraphBall> {
    if d == 0 {
        return path(1);
    }
    let edge = path(2)?;
    product_ball(&vec![edge; d])
}

pub fn petersen() -> Result<GraphBall> {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    GraphBall::from_edges(10, edges, Descriptor::Petersen)
}

pub fn complete_bipartite(a: usize, b: usize) -> Result<GraphBall> {
    let edges = (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect();
    GraphBall::from_edges(a + b, edges, Descriptor::CompleteBipartite(a, b))
}
