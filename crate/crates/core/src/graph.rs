//! Generator sets over Z2^d and the Cayley graph `Cay(Z2^d, S)` they define:
//! node `v` is linked to `v ^ h` for every hop `h`.

use std::fmt;

use crate::error::{LhError, Result};
use crate::gf2;
use crate::walsh::{fwht_in_place, MAX_DIM};

/// Default node-count cap for materializing an adjacency matrix.
pub const ADJACENCY_CAP: usize = 1 << 14;

/// An ordered list of distinct nonzero hops in `[1, 2^d)`.
///
/// Every element of Z2^d is its own inverse, so the set is inverse-closed
/// by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    dim: u32,
    hops: Vec<u32>,
}

impl GeneratorSet {
    pub fn new(dim: u32, hops: Vec<u32>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LhError::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        let n = 1u64 << dim;
        let mut seen = std::collections::HashSet::with_capacity(hops.len());
        for &h in &hops {
            if h == 0 {
                return Err(LhError::InvalidGenerators("hop 0 is a self-loop".into()));
            }
            if u64::from(h) >= n {
                return Err(LhError::InvalidGenerators(format!(
                    "hop {h:X} does not fit in d={dim} bits"
                )));
            }
            if !seen.insert(h) {
                return Err(LhError::InvalidGenerators(format!("duplicate hop {h:X}")));
            }
        }
        if hops.len() < dim as usize {
            return Err(LhError::InvalidGenerators(format!(
                "m = {} is below d = {dim}",
                hops.len()
            )));
        }
        Ok(Self { dim, hops })
    }

    /// Hops from a list of hex strings, e.g. `["1", "2", "1A"]`.
    pub fn from_hex(dim: u32, hops: &[&str]) -> Result<Self> {
        let parsed = hops
            .iter()
            .map(|s| {
                u32::from_str_radix(s, 16)
                    .map_err(|e| LhError::InvalidGenerators(format!("bad hex hop {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, parsed)
    }

    pub fn hypercube(dim: u32) -> Result<Self> {
        Self::new(dim, (0..dim).map(|i| 1 << i).collect())
    }

    /// Hypercube plus the all-ones hop.
    pub fn folded_cube(dim: u32) -> Result<Self> {
        if dim < 2 {
            return Err(LhError::InvalidParams("folded cube needs d >= 2".into()));
        }
        let mut hops: Vec<u32> = (0..dim).map(|i| 1 << i).collect();
        hops.push((1u32 << dim) - 1);
        Self::new(dim, hops)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        1usize << self.dim
    }

    pub fn m(&self) -> usize {
        self.hops.len()
    }

    pub fn hops(&self) -> &[u32] {
        &self.hops
    }

    pub fn into_hops(self) -> Vec<u32> {
        self.hops
    }

    pub fn contains(&self, h: u32) -> bool {
        self.hops.contains(&h)
    }

    /// XOR of all hops.
    pub fn xor_all(&self) -> u32 {
        self.hops.iter().fold(0, |acc, &h| acc ^ h)
    }

    /// Same hops, sorted ascending.
    pub fn sorted(&self) -> Self {
        let mut hops = self.hops.clone();
        hops.sort_unstable();
        Self {
            dim: self.dim,
            hops,
        }
    }

    /// True iff the hops span Z2^d, i.e. the graph is connected.
    pub fn span_check(&self) -> bool {
        gf2::spans(&self.hops, self.dim)
    }

    pub(crate) fn require_spanning(&self) -> Result<()> {
        if self.span_check() {
            Ok(())
        } else {
            Err(LhError::Disconnected(self.dim))
        }
    }

    /// `[v ^ h_1, ..., v ^ h_m]` in hop order.
    pub fn neighbors(&self, v: u32) -> Result<Vec<u32>> {
        if (v as usize) >= self.n() {
            return Err(LhError::IndexOutOfRange {
                index: u64::from(v),
                n: self.n() as u64,
            });
        }
        Ok(self.hops.iter().map(|&h| v ^ h).collect())
    }

    /// Indicator of the hop set: `f(x) = [x in S]`, the 0th row of `[A]`.
    pub fn indicator(&self) -> Vec<i64> {
        let mut f = vec![0i64; self.n()];
        for &h in &self.hops {
            f[h as usize] = 1;
        }
        f
    }

    /// Adjacency matrix, refused above [`ADJACENCY_CAP`] nodes.
    pub fn adjacency(&self) -> Result<AdjacencyMatrix> {
        self.adjacency_with_cap(ADJACENCY_CAP)
    }

    pub fn adjacency_with_cap(&self, cap: usize) -> Result<AdjacencyMatrix> {
        let n = self.n();
        if n > cap {
            return Err(LhError::TooLarge {
                what: "adjacency node count",
                value: n as u64,
                limit: cap as u64,
            });
        }
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for i in 0..n {
            for &h in &self.hops {
                let j = i ^ h as usize;
                bits[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        Ok(AdjacencyMatrix { n, words, bits })
    }

    /// Eigenvalues `lambda_k = sum_s U_k(h_s)` for all `k`, via one FWHT of the
    /// hop indicator. The Walsh functions are the common eigenbasis.
    pub fn eigenvalues(&self) -> Vec<i64> {
        let mut f = self.indicator();
        fwht_in_place(&mut f).expect("n is a power of two");
        f
    }

    /// Breadth-first hop counts from node 0. By vertex transitivity the
    /// table is the same from every node.
    pub fn distance_profile(&self) -> Result<DistanceProfile> {
        self.require_spanning()?;
        let n = self.n();
        let mut dist = vec![u8::MAX; n];
        dist[0] = 0;
        let mut frontier = vec![0u32];
        let mut next = Vec::new();
        let mut level = 0u8;
        let mut total = 0u64;
        while !frontier.is_empty() {
            level += 1;
            next.clear();
            for &v in &frontier {
                for &h in &self.hops {
                    let u = (v ^ h) as usize;
                    if dist[u] == u8::MAX {
                        dist[u] = level;
                        next.push(u as u32);
                    }
                }
            }
            total += next.len() as u64 * u64::from(level);
            std::mem::swap(&mut frontier, &mut next);
        }
        let diameter = u32::from(level - 1);
        Ok(DistanceProfile {
            dist,
            diameter,
            total,
        })
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} {{", self.dim)?;
        for (i, h) in self.hops.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h:X}")?;
        }
        write!(f, "}}")
    }
}

/// Dense symmetric 0/1 matrix with `[A]_{ij} = 1` iff `i ^ j` is a hop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl AdjacencyMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn row_sum(&self, i: usize) -> usize {
        self.bits[i * self.words..(i + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `[A] |x>`.
    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.n, "vector length must equal n");
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.get(i, j)).map(|j| x[j]).sum())
            .collect()
    }
}

/// Average hop count as the exact ratio `total / nodes`, root included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AvgHops {
    pub total: u64,
    pub nodes: u64,
}

impl AvgHops {
    pub fn as_f64(&self) -> f64 {
        self.total as f64 / self.nodes as f64
    }

    /// Exact decimal expansion; it terminates because `nodes` is a power of two.
    pub fn decimal(&self) -> String {
        let int = self.total / self.nodes;
        let mut rem = self.total % self.nodes;
        if rem == 0 {
            return int.to_string();
        }
        let mut s = format!("{int}.");
        while rem != 0 {
            rem *= 10;
            s.push(char::from(b'0' + (rem / self.nodes) as u8));
            rem %= self.nodes;
        }
        s
    }

    /// True when `self < other`, compared exactly.
    pub fn less_than(&self, other: &AvgHops) -> bool {
        u128::from(self.total) * u128::from(other.nodes)
            < u128::from(other.total) * u128::from(self.nodes)
    }
}

impl fmt::Display for AvgHops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.total, self.nodes)
    }
}

/// Hop counts from node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    dist: Vec<u8>,
    diameter: u32,
    total: u64,
}

impl DistanceProfile {
    pub fn dist(&self) -> &[u8] {
        &self.dist
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    /// `sum_v dist[v]`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn avg_hops(&self) -> AvgHops {
        AvgHops {
            total: self.total,
            nodes: self.dist.len() as u64,
        }
    }

    /// Node counts per distance `0..=diameter`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.diameter as usize + 1];
        for &d in &self.dist {
            h[d as usize] += 1;
        }
        h
    }

    /// Number of nodes at the maximal distance.
    pub fn farthest_count(&self) -> u64 {
        self.dist
            .iter()
            .filter(|&&d| u32::from(d) == self.diameter)
            .count() as u64
    }
}
