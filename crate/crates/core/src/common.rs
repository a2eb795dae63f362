//! Maximal common partitions (Gács–Körner common information).
//!
//! The maximal common partition of `p_XY` is read off the bipartite support
//! graph: `x` and `y` are joined when `p(x, y) > SUPPORT_TOL`, and each
//! connected component is one block `(X_i, Y_i)`. The block index is the
//! common variable `J_XY`. Symbols with zero marginal mass belong to no block.

use serde::Serialize;

use crate::dist::{BipartiteDistribution, TripartiteDistribution, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::info;

#[derive(Debug)]
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// One block `X_i x Y_i` of a common partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    /// Probability of the block under the generating distribution.
    pub weight: f64,
}

/// A vertex of the bipartite support graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Node {
    X(usize),
    Y(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommonPartition {
    blocks: Vec<Block>,
    x_block: Vec<Option<usize>>,
    y_block: Vec<Option<usize>>,
    // Support edges kept for path queries.
    #[serde(skip)]
    edges: Vec<bool>,
}

impl CommonPartition {
    /// Maximal common partition of a row-major `nx x ny` weight matrix.
    ///
    /// The matrix need not be normalized; block weights are reported relative
    /// to its total.
    pub fn from_matrix(nx: usize, ny: usize, p: &[f64]) -> Result<Self> {
        if p.len() != nx * ny {
            return Err(Error::ShapeMismatch {
                expected: nx * ny,
                found: p.len(),
            });
        }
        let edges: Vec<bool> = p.iter().map(|&v| v > SUPPORT_TOL).collect();
        if !edges.iter().any(|&e| e) {
            return Err(Error::EmptySupport);
        }
        let total: f64 = p.iter().sum();

        let mut uf = UnionFind::new(nx + ny);
        let mut x_live = vec![false; nx];
        let mut y_live = vec![false; ny];
        for x in 0..nx {
            for y in 0..ny {
                if edges[x * ny + y] {
                    uf.union(x, nx + y);
                    x_live[x] = true;
                    y_live[y] = true;
                }
            }
        }

        // Label components by their smallest x; every live component has one.
        let mut root_label = vec![None; nx + ny];
        let mut blocks: Vec<Block> = Vec::new();
        let mut x_block = vec![None; nx];
        for x in (0..nx).filter(|&x| x_live[x]) {
            let r = uf.find(x);
            let label = *root_label[r].get_or_insert_with(|| {
                blocks.push(Block {
                    xs: Vec::new(),
                    ys: Vec::new(),
                    weight: 0.0,
                });
                blocks.len() - 1
            });
            blocks[label].xs.push(x);
            x_block[x] = Some(label);
        }
        let mut y_block = vec![None; ny];
        for y in (0..ny).filter(|&y| y_live[y]) {
            let label = root_label[uf.find(nx + y)].expect("y joined to some x");
            blocks[label].ys.push(y);
            y_block[y] = Some(label);
        }
        for x in 0..nx {
            if let Some(j) = x_block[x] {
                blocks[j].weight += p[x * ny..(x + 1) * ny].iter().sum::<f64>() / total;
            }
        }
        Ok(Self {
            blocks,
            x_block,
            y_block,
            edges,
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of_x(&self, x: usize) -> Option<usize> {
        self.x_block[x]
    }

    pub fn block_of_y(&self, y: usize) -> Option<usize> {
        self.y_block[y]
    }

    /// X symbols outside every block (zero marginal mass).
    pub fn null_x(&self) -> Vec<usize> {
        (0..self.x_block.len())
            .filter(|&x| self.x_block[x].is_none())
            .collect()
    }

    pub fn null_y(&self) -> Vec<usize> {
        (0..self.y_block.len())
            .filter(|&y| self.y_block[y].is_none())
            .collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.weight).collect()
    }

    /// `H(J)` for the generating distribution.
    pub fn entropy(&self) -> f64 {
        info::entropy(&self.weights())
    }

    /// Block masses of another weight matrix over the same alphabets, assigning
    /// each entry by its x symbol. Entries on null x symbols are dropped.
    pub fn masses_of(&self, p: &[f64]) -> Vec<f64> {
        let ny = self.y_block.len();
        let mut out = vec![0.0; self.len()];
        for (x, row) in p.chunks(ny).enumerate() {
            if let Some(j) = self.x_block[x] {
                out[j] += row.iter().sum::<f64>();
            }
        }
        out
    }

    /// An alternating support path `x, y1, x1, ..., x'` between two x symbols
    /// of the same block, each consecutive pair having positive probability.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<Node>> {
        let (nx, ny) = (self.x_block.len(), self.y_block.len());
        if from >= nx || to >= nx || self.x_block[from].is_none() {
            return None;
        }
        if self.x_block[from] != self.x_block[to] {
            return None;
        }
        // BFS over nodes 0..nx (x) and nx..nx+ny (y).
        let mut prev = vec![usize::MAX; nx + ny];
        let mut queue = std::collections::VecDeque::from([from]);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            let neighbours: Vec<usize> = if u < nx {
                (0..ny).filter(|&y| self.edges[u * ny + y]).map(|y| nx + y).collect()
            } else {
                (0..nx).filter(|&x| self.edges[x * ny + (u - nx)]).collect()
            };
            for v in neighbours {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[to] == usize::MAX {
            return None;
        }
        let mut path = vec![to];
        let mut u = to;
        while u != from {
            u = prev[u];
            path.push(u);
        }
        path.reverse();
        Some(
            path.into_iter()
                .map(|u| if u < nx { Node::X(u) } else { Node::Y(u - nx) })
                .collect(),
        )
    }
}

pub fn maximal_common_partition(b: &BipartiteDistribution) -> Result<CommonPartition> {
    CommonPartition::from_matrix(b.nx(), b.ny(), b.probs())
}

/// `H(J_XY)`, the Gács–Körner common information of `p_XY`.
pub fn common_variable_entropy(b: &BipartiteDistribution) -> Result<f64> {
    Ok(maximal_common_partition(b)?.entropy())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicePartition {
    pub z: usize,
    pub weight: f64,
    pub partition: CommonPartition,
}

/// The maximal conditional common function `J_{XY|Z}`: one maximal common
/// partition per positive-weight slice `p_{XY|Z=z}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalCommonPartition {
    pub slices: Vec<SlicePartition>,
}

impl ConditionalCommonPartition {
    pub fn get(&self, z: usize) -> Option<&SlicePartition> {
        self.slices.iter().find(|s| s.z == z)
    }
}

pub fn conditional_common_partition(d: &TripartiteDistribution) -> ConditionalCommonPartition {
    let slices = d
        .slices()
        .into_iter()
        .map(|s| SlicePartition {
            z: s.z,
            weight: s.weight,
            partition: maximal_common_partition(&s.dist).expect("slices have positive mass"),
        })
        .collect();
    ConditionalCommonPartition { slices }
}

/// The unconditional common partition of `p_XY`.
pub fn global_partition(d: &TripartiteDistribution) -> CommonPartition {
    maximal_common_partition(&d.marginal_xy()).expect("valid distributions have support")
}

/// `p(j, z)` as a `|J| x |Z|` row-major matrix for the global partition.
pub fn common_variable_joint(d: &TripartiteDistribution, j: &CommonPartition) -> Vec<f64> {
    let [nx, ny, nz] = d.shape();
    let mut out = vec![0.0; j.len() * nz];
    for x in 0..nx {
        let Some(b) = j.block_of_x(x) else { continue };
        for y in 0..ny {
            for z in 0..nz {
                out[b * nz + z] += d.get(x, y, z);
            }
        }
    }
    out
}

/// `H(J_XY|Z)`, the key rate achievable without communication.
pub fn no_comm_key_rate(d: &TripartiteDistribution) -> f64 {
    let j = global_partition(d);
    let nz = d.z().len();
    let pjz = common_variable_joint(d, &j);
    let mut rate = 0.0;
    for z in 0..nz {
        let column: Vec<f64> = (0..j.len()).map(|b| pjz[b * nz + z]).collect();
        let weight: f64 = column.iter().sum();
        if weight > SUPPORT_TOL {
            let cond: Vec<f64> = column.iter().map(|v| v / weight).collect();
            rate += weight * info::entropy(&cond);
        }
    }
    rate
}

/// `H(J_{XY|Z}|Z)`, the key rate with Eve announcing `Z`.
pub fn helper_no_comm_key_rate(d: &TripartiteDistribution) -> f64 {
    conditional_common_partition(d)
        .slices
        .iter()
        .map(|s| s.weight * s.partition.entropy())
        .sum()
}

/// `I(X:Y|Z J_XY)`, the gap between `I(X:Y|Z)` and `H(J_XY|Z)`.
pub fn cmi_given_common(d: &TripartiteDistribution) -> f64 {
    let j = global_partition(d);
    let [nx, ny, nz] = d.shape();
    let nc = nz * j.len().max(1);
    let mut t = vec![0.0; nx * ny * nc];
    for x in 0..nx {
        let Some(b) = j.block_of_x(x) else { continue };
        for y in 0..ny {
            for z in 0..nz {
                t[(x * ny + y) * nc + z * j.len() + b] += d.get(x, y, z);
            }
        }
    }
    info::conditional_mutual_information_tensor(nx, ny, nc, &t)
}
