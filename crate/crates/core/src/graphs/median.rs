//! Median test, hyperplanes and the Sageev distance formula.

use std::collections::HashMap;

use super::GraphBall;
use crate::error::{Error, Result};

/// Default cap on the vertex count for [`is_median`].
pub const DEFAULT_MEDIAN_CAP: usize = 300;

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn bits_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

/// Whether every triple of vertices has exactly one median.
pub fn is_median(g: &GraphBall) -> Result<bool> {
    is_median_capped(g, DEFAULT_MEDIAN_CAP)
}

pub fn is_median_capped(g: &GraphBall, cap: usize) -> Result<bool> {
    let n = g.n_vertices();
    if n > cap {
        return Err(Error::TooLarge { vertices: n, cap });
    }
    // Intervals I(x, y) as bitsets, x < y.
    let mut intervals = vec![Bits::new(); n * n];
    for x in 0..n {
        for y in x..n {
            let mut b = bits_new(n);
            for u in 0..n {
                if g.dist(x, u) + g.dist(u, y) == g.dist(x, y) {
                    bits_set(&mut b, u);
                }
            }
            intervals[x * n + y] = b;
        }
    }
    let interval = |x: usize, y: usize| &intervals[x.min(y) * n + x.max(y)];
    for x in 0..n {
        for y in x + 1..n {
            let ixy = interval(x, y);
            for z in y + 1..n {
                let (iyz, izx) = (interval(y, z), interval(z, x));
                let count: u32 = (0..ixy.len()).map(|w| (ixy[w] & iyz[w] & izx[w]).count_ones()).sum();
                if count != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Edge classes under the relation generated by opposite sides of squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneDecomposition {
    /// Class of each edge, indexed like [`GraphBall::edges`].
    pub edge_class: Vec<usize>,
    pub n_classes: usize,
    pub base: usize,
    /// Classes separating each vertex from `base`, sorted.
    pub signatures: Vec<Vec<usize>>,
}

impl HyperplaneDecomposition {
    /// Edges of each class.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for (e, &c) in self.edge_class.iter().enumerate() {
            out[c].push(e);
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Hyperplanes of `g` and the signature of every vertex relative to vertex 0.
///
/// With `validate` set, non-median graphs are rejected.
pub fn hyperplane_decomposition(g: &GraphBall, validate: bool) -> Result<HyperplaneDecomposition> {
    if validate && !is_median_capped(g, usize::MAX)? {
        return Err(Error::NotMedian);
    }
    let edges = g.edges();
    let index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &(u, v))| ((u.min(v), u.max(v)), i)).collect();
    let edge_id = |u: usize, v: usize| index.get(&(u.min(v), u.max(v))).copied();

    let mut uf = UnionFind::new(edges.len());
    for (e, &(x, y)) in edges.iter().enumerate() {
        for &u in g.neighbors(x) {
            if u == y {
                continue;
            }
            for &v in g.neighbors(y) {
                if v == x || v == u {
                    continue;
                }
                if let Some(f) = edge_id(u, v) {
                    uf.union(e, f);
                }
            }
        }
    }

    let mut relabel = HashMap::new();
    let edge_class: Vec<usize> = (0..edges.len())
        .map(|e| {
            let root = uf.find(e);
            let next = relabel.len();
            *relabel.entry(root).or_insert(next)
        })
        .collect();
    let n_classes = relabel.len();

    // Signatures by toggling along a breadth-first tree from the base.
    let base = 0;
    let n = g.n_vertices();
    let mut signatures: Vec<Option<Vec<usize>>> = vec![None; n];
    signatures[base] = Some(Vec::new());
    let mut queue = std::collections::VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if signatures[y].is_none() {
                let class = edge_class[edge_id(x, y).expect("neighbors share an edge")];
                let mut s = signatures[x].clone().expect("visited");
                match s.binary_search(&class) {
                    Ok(pos) => {
                        s.remove(pos);
                    }
                    Err(pos) => s.insert(pos, class),
                }
                signatures[y] = Some(s);
                queue.push_back(y);
            }
        }
    }
    let signatures = signatures.into_iter().map(|s| s.expect("graph is connected")).collect();
    Ok(HyperplaneDecomposition { edge_class, n_classes, base, signatures })
}

/// `max_{x,y} | |S_x Δ S_y| - d(x, y) |`; zero on median graphs.
pub fn sageev_distance_check(g: &GraphBall) -> Result<u32> {
    let h = hyperplane_decomposition(g, false)?;
    let n = g.n_vertices();
    let words = h.n_classes.div_ceil(64).max(1);
    let sets: Vec<Bits> = h
        .signatures
        .iter()
        .map(|s| {
            let mut b = vec![0u64; words];
            for &c in s {
                bits_set(&mut b, c);
            }
            b
        })
        .collect();
    let mut worst = 0;
    for x in 0..n {
        for y in x + 1..n {
            let sym: u32 = sets[x].iter().zip(&sets[y]).map(|(a, b)| (a ^ b).count_ones()).sum();
            worst = worst.max(sym.abs_diff(g.dist(x, y)));
        }
    }
    Ok(worst)
}
