//! Linear binary codes and their LH twins.
//!
//! A `k x n` generator matrix `[G]` rotated 90° counter-clockwise gives `n`
//! rows of `k` bits: hop `h_1` is the *last* column of `[G]`, hop `h_n` the
//! first, each read with row 1 as the most significant bit. The code's
//! minimum weight equals the network's relative bisection `b`.
//!
//! The equivalence transforms here (basis changes of Z2^d) relabel nodes
//! without changing cuts or path lengths.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bisection::bisection_fwht;
use crate::error::{io_err, LhError, Result};
use crate::gf2;
use crate::graph::GeneratorSet;
use crate::walsh::MAX_DIM;

/// Generator matrix of an `[n_code, k]` binary linear code, stored by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMatrix {
    k: u32,
    /// Column `j` packed with row 1 in bit `k - 1`.
    columns: Vec<u32>,
}

impl CodeMatrix {
    /// Builds from 0/1 rows; rows must be independent over GF(2).
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(LhError::InvalidCode("no rows".into()));
        }
        if k > MAX_DIM as usize {
            return Err(LhError::TooLarge {
                what: "code dimension k",
                value: k as u64,
                limit: u64::from(MAX_DIM),
            });
        }
        let n_code = rows[0].len();
        if rows.iter().any(|r| r.len() != n_code) {
            return Err(LhError::InvalidCode("rows differ in length".into()));
        }
        if n_code < k {
            return Err(LhError::InvalidCode(format!(
                "codeword length {n_code} is below k = {k}"
            )));
        }
        let mut columns = vec![0u32; n_code];
        for (i, row) in rows.iter().enumerate() {
            for (j, &bit) in row.iter().enumerate() {
                match bit {
                    0 => {}
                    1 => columns[j] |= 1 << (k - 1 - i),
                    _ => return Err(LhError::InvalidCode(format!("entry {bit} is not a bit"))),
                }
            }
        }
        Self::from_columns(k as u32, columns)
    }

    /// Builds from packed columns (row 1 = bit `k - 1`).
    pub fn from_columns(k: u32, columns: Vec<u32>) -> Result<Self> {
        let rank = gf2::rank(&columns);
        if rank != k as usize {
            return Err(LhError::RankDeficient {
                rank,
                expected: k as usize,
            });
        }
        Ok(Self { k, columns })
    }

    /// Parses rows of `0`/`1` characters; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(LhError::Parse {
                        line: idx + 1,
                        msg: format!("unexpected character {other:?} in matrix row"),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&text)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            out.extend(row.iter().map(|&b| if b == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n_code(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.k)
            .map(|i| {
                let bit = self.k - 1 - i;
                self.columns.iter().map(|c| ((c >> bit) & 1) as u8).collect()
            })
            .collect()
    }

    fn row_bitsets(&self) -> Vec<Vec<u64>> {
        let words = self.columns.len().div_ceil(64);
        (0..self.k)
            .map(|i| {
                let bit = self.k - 1 - i;
                let mut row = vec![0u64; words];
                for (j, c) in self.columns.iter().enumerate() {
                    if (c >> bit) & 1 == 1 {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect()
    }
}

/// Recipe: rotate `[G]` counter-clockwise and read the rows as hops.
pub fn code_to_lh(code: &CodeMatrix) -> Result<GeneratorSet> {
    let hops: Vec<u32> = code.columns.iter().rev().copied().collect();
    if hops.contains(&0) {
        return Err(LhError::InvalidCode("zero column would give hop 0".into()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = hops.iter().find(|h| !seen.insert(**h)) {
        return Err(LhError::InvalidCode(format!("duplicate column (hop {dup:X})")));
    }
    GeneratorSet::new(code.k, hops)
}

/// Inverse of [`code_to_lh`].
pub fn lh_to_code(set: &GeneratorSet) -> Result<CodeMatrix> {
    CodeMatrix::from_columns(set.dim(), set.hops().iter().rev().copied().collect())
}

/// Minimum Hamming weight over all `2^k - 1` nonzero codewords, enumerated
/// in Gray-code order over the row space.
pub fn min_weight(code: &CodeMatrix) -> u32 {
    let rows = code.row_bitsets();
    let mut word = vec![0u64; rows[0].len()];
    let mut best = u32::MAX;
    for i in 1u64..(1 << code.k) {
        let flip = i.trailing_zeros() as usize;
        for (w, r) in word.iter_mut().zip(&rows[flip]) {
            *w ^= r;
        }
        best = best.min(word.iter().map(|w| w.count_ones()).sum());
    }
    best
}

/// True iff the code's minimum weight equals the translated network's `b`.
pub fn verify_duality(code: &CodeMatrix) -> Result<bool> {
    let set = code_to_lh(code)?;
    Ok(min_weight(code) == bisection_fwht(&set)?.b)
}

/// An invertible linear map of Z2^d, stored as the images of the unit vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquivalenceMap {
    images: Vec<u32>,
}

impl EquivalenceMap {
    /// `images[i]` is where `2^i` goes.
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let dim = images.len() as u32;
        if dim == 0 || dim > MAX_DIM || images.iter().any(|&v| u64::from(v) >> dim != 0) {
            return Err(LhError::SingularMap);
        }
        if !gf2::spans(&images, dim) {
            return Err(LhError::SingularMap);
        }
        Ok(Self { images })
    }

    pub fn identity(dim: u32) -> Self {
        Self {
            images: (0..dim).map(|i| 1 << i).collect(),
        }
    }

    /// Exchanges bits `i` and `j`.
    pub fn bit_swap(dim: u32, i: u32, j: u32) -> Result<Self> {
        let mut images: Vec<u32> = (0..dim).map(|b| 1 << b).collect();
        if i >= dim || j >= dim {
            return Err(LhError::SingularMap);
        }
        images.swap(i as usize, j as usize);
        Self::new(images)
    }

    /// Uniformly random invertible map (rejection sampling).
    pub fn random<R: Rng>(dim: u32, rng: &mut R) -> Self {
        loop {
            let images: Vec<u32> = (0..dim).map(|_| rng.gen_range(0..1u32 << dim)).collect();
            if gf2::spans(&images, dim) {
                return Self { images };
            }
        }
    }

    pub fn dim(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == 1 << i)
    }

    /// `h M`: XOR of the images of the set bits of `h`.
    pub fn apply(&self, h: u32) -> u32 {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, _)| (h >> i) & 1 == 1)
            .fold(0, |acc, (_, &v)| acc ^ v)
    }

    /// Post-composes the output-space column operation `bit to ^= bit from`.
    fn add_bit(&mut self, from: u32, to: u32) {
        for v in &mut self.images {
            if (*v >> from) & 1 == 1 {
                *v ^= 1 << to;
            }
        }
    }
}

pub fn apply_equivalence(set: &GeneratorSet, map: &EquivalenceMap) -> Result<GeneratorSet> {
    if map.dim() != set.dim() {
        return Err(LhError::InvalidParams(format!(
            "map dimension {} != set dimension {}",
            map.dim(),
            set.dim()
        )));
    }
    GeneratorSet::new(set.dim(), set.hops().iter().map(|&h| map.apply(h)).collect())
}

/// Output of [`diagonalize`]: the systematic set and the basis change that
/// produced it (the set is `map` applied to the input, then reordered).
#[derive(Debug, Clone)]
pub struct Diagonalized {
    pub set: GeneratorSet,
    pub map: EquivalenceMap,
}

/// Systematic form: an equivalent set whose first `d` hops are `1, 2, ..., 2^{d-1}`.
///
/// For each bit column `c`, picks the lightest remaining hop with bit `c` set,
/// XORs column `c` into every other column set in that hop, then swaps the
/// hop into position `c`.
pub fn diagonalize(set: &GeneratorSet) -> Result<Diagonalized> {
    let dim = set.dim();
    let mut hops = set.hops().to_vec();
    let mut map = EquivalenceMap::identity(dim);
    for c in 0..dim {
        let c_pos = c as usize;
        let pivot = (c_pos..hops.len())
            .filter(|&r| (hops[r] >> c) & 1 == 1)
            .min_by_key(|&r| (hops[r].count_ones(), r))
            .ok_or(LhError::RankDeficient {
                rank: gf2::rank(set.hops()),
                expected: dim as usize,
            })?;
        let row = hops[pivot];
        for other in (0..dim).filter(|&o| o != c && (row >> o) & 1 == 1) {
            for h in hops.iter_mut() {
                if (*h >> c) & 1 == 1 {
                    *h ^= 1 << other;
                }
            }
            map.add_bit(c, other);
        }
        hops.swap(pivot, c_pos);
    }
    Ok(Diagonalized {
        set: GeneratorSet::new(dim, hops)?,
        map,
    })
}

/// Result of [`min_change_expansion`].
#[derive(Debug, Clone)]
pub struct Expansion {
    pub map: EquivalenceMap,
    pub set: GeneratorSet,
    /// Hops of the transformed set absent from the old set; each costs
    /// `n/2` recabled links.
    pub cost: usize,
}

fn change_cost(old: &HashSet<u32>, hops: impl Iterator<Item = u32>) -> usize {
    hops.filter(|h| !old.contains(h)).count()
}

/// Searches basis changes of `new` that keep as many of `old`'s hops as
/// possible. Greedy steepest descent over elementary column operations with
/// seeded random kicks when stuck; `budget` caps evaluated maps.
pub fn min_change_expansion(
    old: &GeneratorSet,
    new: &GeneratorSet,
    budget: u64,
    seed: u64,
) -> Result<Expansion> {
    if old.dim() > new.dim() {
        return Err(LhError::InvalidParams(format!(
            "old d={} exceeds new d={}",
            old.dim(),
            new.dim()
        )));
    }
    let dim = new.dim();
    let old_hops: HashSet<u32> = old.hops().iter().copied().collect();
    let cost_of = |map: &EquivalenceMap| change_cost(&old_hops, new.hops().iter().map(|&h| map.apply(h)));
    let floor = new.m().saturating_sub(old.m());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = EquivalenceMap::identity(dim);
    let mut current_cost = cost_of(&current);
    let mut best = (current.clone(), current_cost);
    let mut trials = 1u64;

    'search: while best.1 > floor && trials < budget {
        let mut step: Option<(EquivalenceMap, usize)> = None;
        for from in 0..dim {
            for to in (0..dim).filter(|&t| t != from) {
                if trials >= budget {
                    break 'search;
                }
                trials += 1;
                let mut cand = current.clone();
                cand.add_bit(from, to);
                let c = cost_of(&cand);
                if c < step.as_ref().map_or(current_cost, |s| s.1) {
                    step = Some((cand, c));
                }
            }
        }
        match step {
            Some((map, c)) => {
                current = map;
                current_cost = c;
            }
            None if dim > 1 => {
                let from = rng.gen_range(0..dim);
                let to = (from + rng.gen_range(1..dim)) % dim;
                current.add_bit(from, to);
                current_cost = cost_of(&current);
                trials += 1;
            }
            None => break,
        }
        if current_cost < best.1 {
            best = (current.clone(), current_cost);
        }
    }
    let set = apply_equivalence(new, &best.0)?;
    Ok(Expansion {
        map: best.0,
        set,
        cost: best.1,
    })
}

/// Shortened code at hop `index`, seen from the network side: the quotient
/// of Z2^d by `<h_index>`. Yields `d - 1` bits and `m - 1` hops with
/// bisection no smaller than the input's.
pub fn shorten(set: &GeneratorSet, index: usize) -> Result<GeneratorSet> {
    let dim = set.dim();
    let pivot = *set.hops().get(index).ok_or(LhError::IndexOutOfRange {
        index: index as u64,
        n: set.m() as u64,
    })?;
    if dim < 2 {
        return Err(LhError::InvalidParams("cannot shorten d=1".into()));
    }
    let p = 31 - pivot.leading_zeros();
    let low = (1u32 << p) - 1;
    let hops: Vec<u32> = set
        .hops()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .map(|(_, &h)| {
            let h = if (h >> p) & 1 == 1 { h ^ pivot } else { h };
            (h & low) | ((h >> (p + 1)) << p)
        })
        .collect();
    GeneratorSet::new(dim - 1, hops).map_err(|e| {
        LhError::InvalidParams(format!("quotient by hop {pivot:X} collapses hops: {e}"))
    })
}
