//! Closed-form LH generator-set families and a greedy secondary optimizer.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bisection::bisection_fwht;
use crate::ecc::diagonalize;
use crate::error::{LhError, Result};
use crate::graph::{AvgHops, GeneratorSet};
use crate::walsh::MAX_DIM;

/// Parameters of a high-density (LH-HD) network: `m` on the ladder
/// `n/2, n/2 + n/4, ..., n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HdParams {
    dim: u32,
    m: usize,
}

impl HdParams {
    pub fn new(dim: u32, m: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LhError::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        if !Self::ladder(dim).contains(&m) {
            return Err(LhError::InvalidParams(format!(
                "m = {m} is not on the LH-HD ladder for d = {dim}"
            )));
        }
        Ok(Self { dim, m })
    }

    /// Partial sums `n/2, n/2 + n/4, ..., n - 1`.
    pub fn ladder(dim: u32) -> Vec<usize> {
        let n = 1usize << dim;
        (1..=dim)
            .scan(0usize, |acc, j| {
                *acc += n >> j;
                Some(*acc)
            })
            .collect()
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn n(&self) -> usize {
        1 << self.dim
    }

    pub fn is_full_mesh(&self) -> bool {
        self.m == self.n() - 1
    }

    /// `floor((m + 1) / 2)`.
    pub fn expected_bisection(&self) -> u32 {
        self.m.div_ceil(2) as u32
    }

    /// 2, or 1 for the fully meshed top rung.
    pub fn expected_diameter(&self) -> u32 {
        if self.is_full_mesh() {
            1
        } else {
            2
        }
    }

    /// `m` nodes at one hop and the remaining `n - 1 - m` at two, averaged
    /// over all `n` nodes including the root: `2 - (m + 2)/n`.
    pub fn expected_avg_hops(&self) -> AvgHops {
        let n = self.n() as u64;
        AvgHops {
            total: 2 * n - 2 - self.m as u64,
            nodes: n,
        }
    }
}

/// `h_s = n - s` for `s = 1..m`; optionally diagonalized, with the non-unit
/// hops sorted ascending after the leading powers of two.
pub fn lh_hd(p: HdParams, diagonalized: bool) -> Result<GeneratorSet> {
    let n = p.n() as u32;
    let set = GeneratorSet::new(p.dim, (1..=p.m as u32).map(|s| n - s).collect())?;
    if !diagonalized {
        return Ok(set);
    }
    let mut hops = diagonalize(&set)?.set.into_hops();
    hops[p.dim as usize..].sort_unstable();
    GeneratorSet::new(p.dim, hops)
}

/// The fully meshed network on `2^d` nodes.
pub fn full_mesh(dim: u32) -> Result<GeneratorSet> {
    let n = 1usize << dim.min(MAX_DIM);
    lh_hd(HdParams::new(dim, n - 1)?, false)
}

/// Drops the last `r` (1 or 2) hops of an LH-HD set.
pub fn lh_hd_reduced(set: &GeneratorSet, r: usize) -> Result<GeneratorSet> {
    if !(1..=2).contains(&r) {
        return Err(LhError::InvalidParams(format!("r = {r} must be 1 or 2")));
    }
    if r >= set.m() {
        return Err(LhError::InvalidParams("not enough hops to remove".into()));
    }
    let out = GeneratorSet::new(set.dim(), set.hops()[..set.m() - r].to_vec())?;
    out.require_spanning()?;
    Ok(out)
}

/// Smallest `L` with `2^L - L - 1 >= d`: the number of hops added to a
/// d-cube for bisection 3.
pub fn b3_augment_len(dim: u32) -> Result<u32> {
    if !(3..=57).contains(&dim) {
        return Err(LhError::InvalidParams(format!(
            "b=3 construction covers 3 <= d <= 57, got {dim}"
        )));
    }
    Ok((2u32..).find(|&l| (1u64 << l) - u64::from(l) > u64::from(dim)).unwrap())
}

/// All `L`-bit patterns with at least two ones, by weight then value.
fn b3_pattern_pool(len: u32) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..1u32 << len).filter(|p| p.count_ones() >= 2).collect();
    pool.sort_by_key(|p| (p.count_ones(), *p));
    pool
}

/// d-cube plus `L` augmentation hops with bisection 3.
///
/// Bit `mu` of the network gets the `L`-bit column pattern `patterns[mu]`;
/// augmentation hop `l` collects bit `L - 1 - l` of every pattern. Without a
/// seed the patterns are the `d` lightest (ties by value); a seed picks a
/// random valid subset instead.
pub fn low_density_b3(dim: u32, seed: Option<u64>) -> Result<GeneratorSet> {
    let len = b3_augment_len(dim)?;
    let pool = b3_pattern_pool(len);
    match seed {
        None => low_density_b3_with_patterns(dim, &pool[..dim as usize]),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..10_000 {
                let mut pick = pool.clone();
                pick.shuffle(&mut rng);
                pick.truncate(dim as usize);
                if let Ok(set) = low_density_b3_with_patterns(dim, &pick) {
                    return Ok(set);
                }
            }
            Err(LhError::InvalidParams(format!(
                "no valid random column choice found for d = {dim}"
            )))
        }
    }
}

/// As [`low_density_b3`] with explicit column patterns, one per bit.
pub fn low_density_b3_with_patterns(dim: u32, patterns: &[u32]) -> Result<GeneratorSet> {
    let len = b3_augment_len(dim)?;
    if patterns.len() != dim as usize {
        return Err(LhError::InvalidParams(format!(
            "need {dim} patterns, got {}",
            patterns.len()
        )));
    }
    let mut sorted = patterns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != patterns.len() {
        return Err(LhError::InvalidParams("patterns must be distinct".into()));
    }
    if let Some(p) = patterns
        .iter()
        .find(|&&p| p.count_ones() < 2 || p >> len != 0)
    {
        return Err(LhError::InvalidParams(format!(
            "pattern {p:b} needs >= 2 ones within L = {len} bits"
        )));
    }
    let mut hops: Vec<u32> = (0..dim).map(|i| 1 << i).collect();
    for l in 0..len {
        let bit = len - 1 - l;
        let hop = patterns
            .iter()
            .enumerate()
            .filter(|(_, &p)| (p >> bit) & 1 == 1)
            .fold(0u32, |acc, (mu, _)| acc | 1 << mu);
        hops.push(hop);
    }
    GeneratorSet::new(dim, hops).map_err(|e| {
        LhError::InvalidParams(format!("column patterns give an invalid hop list: {e}"))
    })
}

/// Appends the XOR of all hops to a set with odd bisection `b`, giving `b + 1`.
///
/// An odd `b` forces the XOR to be nonzero (every cut parity equals the
/// XOR's Walsh bit), but it can coincide with an existing hop; then one hop
/// is substituted first via [`substitute_for_fresh_xor`].
pub fn augment_odd_b(set: &GeneratorSet) -> Result<GeneratorSet> {
    let b = bisection_fwht(set)?.b;
    if b % 2 == 0 {
        return Err(LhError::EvenBisection(b));
    }
    let base = if xor_is_fresh(set) {
        set.clone()
    } else {
        substitute_for_fresh_xor(set)?
    };
    let mut hops = base.hops().to_vec();
    hops.push(base.xor_all());
    let out = GeneratorSet::new(set.dim(), hops)?;
    let got = bisection_fwht(&out)?.b;
    if got != b + 1 {
        return Err(LhError::NoSubstitution(format!(
            "augmented bisection {got} != {}",
            b + 1
        )));
    }
    Ok(out)
}

fn xor_is_fresh(set: &GeneratorSet) -> bool {
    let x = set.xor_all();
    x != 0 && !set.contains(x)
}

/// Replaces a single hop so that `b` and connectivity are kept and the XOR
/// of the list becomes a new nonzero value. Hops are tried in ascending
/// value, replacements in ascending value; the first success wins.
pub fn substitute_for_fresh_xor(set: &GeneratorSet) -> Result<GeneratorSet> {
    let b = bisection_fwht(set)?.b;
    let n = set.n() as u32;
    let mut order: Vec<usize> = (0..set.m()).collect();
    order.sort_by_key(|&i| set.hops()[i]);
    for i in order {
        for v in (1..n).filter(|&v| !set.contains(v)) {
            let mut hops = set.hops().to_vec();
            hops[i] = v;
            let cand = GeneratorSet::new(set.dim(), hops)?;
            if !cand.span_check() || !xor_is_fresh(&cand) {
                continue;
            }
            if bisection_fwht(&cand)?.b == b {
                return Ok(cand);
            }
        }
    }
    Err(LhError::NoSubstitution(format!(
        "no single replacement in {set} keeps b = {b} with a fresh XOR"
    )))
}

/// What [`optimize_secondary`] minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Diameter, then the number of nodes at that distance, then total hops.
    Diameter,
    /// Total (equivalently average) hops, then diameter.
    AvgHops,
}

#[derive(Debug, Clone, Copy)]
pub struct SecondaryOptions {
    pub objective: Objective,
    /// Reject replacements that lower the bisection.
    pub hold_b: bool,
    /// Replace up to this many hops per step (1 or 2).
    pub depth: u8,
    /// Maximum number of candidate sets evaluated.
    pub budget: u64,
}

impl Default for SecondaryOptions {
    fn default() -> Self {
        Self {
            objective: Objective::Diameter,
            hold_b: true,
            depth: 1,
            budget: 100_000,
        }
    }
}

type Score = (u64, u64, u64);

fn score(set: &GeneratorSet, objective: Objective) -> Option<Score> {
    let p = set.distance_profile().ok()?;
    let (d, f, t) = (u64::from(p.diameter()), p.farthest_count(), p.total());
    Some(match objective {
        Objective::Diameter => (d, f, t),
        Objective::AvgHops => (t, d, f),
    })
}

/// Greedy iterated local search: each step evaluates every replacement of
/// up to `depth` hops by unused values and takes the best one if it
/// strictly improves the objective. Stops at a local optimum or when the
/// budget runs out. Candidates are scored in parallel; the winner is the
/// lowest score, ties to the earliest candidate.
pub fn optimize_secondary(set: &GeneratorSet, opts: SecondaryOptions) -> Result<GeneratorSet> {
    if !(1..=2).contains(&opts.depth) {
        return Err(LhError::InvalidParams(format!(
            "depth {} must be 1 or 2",
            opts.depth
        )));
    }
    let mut current = set.clone();
    let mut current_b = bisection_fwht(&current)?.b;
    let mut current_score = score(&current, opts.objective).ok_or(LhError::Disconnected(set.dim()))?;
    let mut spent = 0u64;

    while spent < opts.budget {
        let candidates = replacement_candidates(&current, opts.depth, opts.budget - spent);
        if candidates.is_empty() {
            break;
        }
        spent += candidates.len() as u64;
        let best = candidates
            .par_iter()
            .enumerate()
            .filter_map(|(idx, hops)| {
                let cand = GeneratorSet::new(current.dim(), hops.clone()).ok()?;
                let b = bisection_fwht(&cand).ok()?.b;
                if opts.hold_b && b < current_b {
                    return None;
                }
                Some((score(&cand, opts.objective)?, idx, b))
            })
            .min_by_key(|&(s, idx, _)| (s, idx));
        match best {
            Some((s, idx, b)) if s < current_score => {
                current = GeneratorSet::new(current.dim(), candidates[idx].clone())?;
                current_score = s;
                current_b = b;
            }
            _ => break,
        }
    }
    Ok(current)
}

/// Replacement hop lists in a fixed order: single replacements (position,
/// then value ascending), then pairs. At most `limit` are returned.
fn replacement_candidates(set: &GeneratorSet, depth: u8, limit: u64) -> Vec<Vec<u32>> {
    let limit = usize::try_from(limit).unwrap_or(usize::MAX);
    let unused: Vec<u32> = (1..set.n() as u32).filter(|&v| !set.contains(v)).collect();
    let m = set.m();
    let mut out = Vec::new();
    for i in 0..m {
        for &v in &unused {
            if out.len() >= limit {
                return out;
            }
            let mut hops = set.hops().to_vec();
            hops[i] = v;
            out.push(hops);
        }
    }
    if depth >= 2 {
        for i in 0..m {
            for j in i + 1..m {
                for (a, &va) in unused.iter().enumerate() {
                    for &vb in &unused[a + 1..] {
                        if out.len() >= limit {
                            return out;
                        }
                        let mut hops = set.hops().to_vec();
                        hops[i] = va;
                        hops[j] = vb;
                        out.push(hops);
                    }
                }
            }
        }
    }
    out
}
