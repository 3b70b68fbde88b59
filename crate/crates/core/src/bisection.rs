//! Exact bisection of `Cay(Z2^d, S)`.
//!
//! The cut of the equipartition given by Walsh function `W_k` is
//! `C_k = sum_s P(k & h_s)` (in units of `n/2` links) and the Walsh functions
//! achieve the minimum over all equipartitions, so
//! `b = min_{k>=1} C_k` and `B = b n/2`. Two routes compute it: a direct
//! parity scan (`O(m n)`), and one FWHT of the hop indicator (`O(n log n)`)
//! using `C_k = (m - F_k) / 2`. [`brute_force_bisection`] is an independent
//! oracle that never touches Walsh functions.

use crate::error::{LhError, Result};
use crate::graph::GeneratorSet;
use crate::walsh::{parity, walsh_algebraic, WalshIndex};

/// Largest `n` accepted by [`brute_force_bisection`].
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Largest `n` accepted by [`optimize_direct`].
pub const OPTIMIZE_MAX_N: usize = 64;

/// A balanced `+1/-1` labeling of the `n` nodes with `signs[0] = +1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionVector(Vec<i8>);

impl PartitionVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || !signs.len().is_power_of_two() {
            return Err(LhError::Unbalanced(format!(
                "length {} is not a power of two",
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(LhError::Unbalanced("entries must be +1 or -1".into()));
        }
        let plus = signs.iter().filter(|&&s| s == 1).count();
        if 2 * plus != signs.len() {
            return Err(LhError::Unbalanced(format!(
                "{plus} of {} entries are +1",
                signs.len()
            )));
        }
        if signs[0] != 1 {
            return Err(LhError::Unbalanced("signs[0] must be +1".into()));
        }
        Ok(Self(signs))
    }

    /// Normalizes an arbitrary balanced vector so that `signs[0] = +1`.
    pub fn normalized(mut signs: Vec<i8>) -> Result<Self> {
        if signs.first() == Some(&-1) {
            signs.iter_mut().for_each(|s| *s = -*s);
        }
        Self::new(signs)
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The partition of Walsh function `U_k`: `signs[x] = U_k(x)`.
pub fn walsh_partition(k: WalshIndex) -> Result<PartitionVector> {
    if k.k() == 0 {
        return Err(LhError::ZeroWalshIndex);
    }
    let signs = (0..k.n() as u32)
        .map(|x| walsh_algebraic(k.k(), x) as i8)
        .collect();
    Ok(PartitionVector(signs))
}

/// Bisection of a generator set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionReport {
    /// Relative bisection, in units of `n/2` links.
    pub b: u32,
    /// Absolute bisection in links, `b n / 2`.
    pub links: u64,
    /// Smallest Walsh index achieving the minimum cut.
    pub t: u32,
    dim: u32,
}

impl BisectionReport {
    fn new(b: u32, t: u32, dim: u32) -> Self {
        Self {
            b,
            links: u64::from(b) << (dim - 1),
            t,
            dim,
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// The equipartition achieving the bisection (from `U_t`).
    pub fn partition(&self) -> PartitionVector {
        let k = WalshIndex::new(self.t, 1 << self.dim).expect("t < n");
        walsh_partition(k).expect("t >= 1")
    }
}

/// Number of edges crossing the partition, counted once each, by direct
/// edge enumeration.
pub fn cut_value(set: &GeneratorSet, x: &PartitionVector) -> Result<u64> {
    if x.len() != set.n() {
        return Err(LhError::Unbalanced(format!(
            "partition length {} != n = {}",
            x.len(),
            set.n()
        )));
    }
    let signs = x.signs();
    let mut directed = 0u64;
    for (v, &sv) in signs.iter().enumerate() {
        for &h in set.hops() {
            if signs[v ^ h as usize] != sv {
                directed += 1;
            }
        }
    }
    Ok(directed / 2)
}

/// All cuts `C_k = sum_s P(k & h_s)` for `k` in `[0, n)`, by direct parity
/// scan (`C_0 = 0`).
pub fn cut_spectrum(set: &GeneratorSet) -> Vec<u32> {
    (0..set.n() as u32)
        .map(|k| {
            set.hops()
                .iter()
                .map(|&h| parity(u64::from(k & h)))
                .sum()
        })
        .collect()
}

/// Cuts `C_k` derived from the FWHT spectrum, `C_k = (m - F_k) / 2`.
pub fn cut_spectrum_fwht(set: &GeneratorSet) -> Vec<u32> {
    let m = set.m() as i64;
    set.eigenvalues()
        .into_iter()
        .map(|f| ((m - f) / 2) as u32)
        .collect()
}

fn argmin_from_one(cuts: &[u32]) -> (u32, u32) {
    let mut best = (u32::MAX, 0u32);
    for (k, &c) in cuts.iter().enumerate().skip(1) {
        if c < best.0 {
            best = (c, k as u32);
        }
    }
    best
}

/// `b = min_{k>=1} sum_s P(k & h_s)` by the direct scan.
pub fn bisection_direct(set: &GeneratorSet) -> Result<BisectionReport> {
    set.require_spanning()?;
    let (b, t) = argmin_from_one(&cut_spectrum(set));
    Ok(BisectionReport::new(b, t, set.dim()))
}

/// `B = (n/4)(m - max_{k>=1} F_k)` with `F` the FWHT of the hop indicator.
pub fn bisection_fwht(set: &GeneratorSet) -> Result<BisectionReport> {
    set.require_spanning()?;
    let f = set.eigenvalues();
    let mut t = 1usize;
    for k in 2..f.len() {
        if f[k] > f[t] {
            t = k;
        }
    }
    let b = (set.m() as i64 - f[t]) / 2;
    Ok(BisectionReport::new(b as u32, t as u32, set.dim()))
}

/// Largest Walsh cut `max_{k>=1} C_k`, in units of `n/2`; diagnostic only.
pub fn max_cut(set: &GeneratorSet) -> u32 {
    cut_spectrum_fwht(set).into_iter().skip(1).max().unwrap_or(0)
}

/// Minimum cut over every equipartition with node 0 on the `+` side, by
/// exhaustive enumeration. Returns links.
pub fn brute_force_bisection(set: &GeneratorSet) -> Result<u64> {
    let n = set.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(LhError::TooLarge {
            what: "brute-force node count",
            value: n as u64,
            limit: BRUTE_FORCE_MAX_N as u64,
        });
    }
    set.require_spanning()?;
    let half = n / 2;
    let mut best = u64::MAX;
    // masks over nodes 1..n choosing the other half-1 members of the + side
    for rest in 0u32..(1 << (n - 1)) {
        if rest.count_ones() as usize != half - 1 {
            continue;
        }
        let plus = 1 | (rest << 1);
        let mut cut = 0u64;
        for v in 0..n {
            if (plus >> v) & 1 == 1 {
                for &h in set.hops() {
                    if (plus >> (v ^ h as usize)) & 1 == 0 {
                        cut += 1;
                    }
                }
            }
        }
        best = best.min(cut);
    }
    Ok(best)
}

/// Exhaustive search over all `m`-subsets of `[1, n)` for a set maximizing `b`;
/// ties go to smaller diameter, then the lexicographically smallest sorted
/// hop list. `budget` caps the number of subsets examined.
pub fn optimize_direct(
    dim: u32,
    m: usize,
    budget: u64,
) -> Result<(GeneratorSet, BisectionReport)> {
    let n = 1usize << dim;
    if n > OPTIMIZE_MAX_N {
        return Err(LhError::TooLarge {
            what: "optimize_direct node count",
            value: n as u64,
            limit: OPTIMIZE_MAX_N as u64,
        });
    }
    if m < dim as usize || m >= n {
        return Err(LhError::InvalidParams(format!(
            "need d <= m < n, got d={dim} m={m}"
        )));
    }
    let total = binomial((n - 1) as u64, m as u64);
    if total > budget {
        return Err(LhError::BudgetExceeded(budget));
    }

    let mut best: Option<(u32, u32, GeneratorSet)> = None;
    let mut combo: Vec<u32> = (1..=m as u32).collect();
    loop {
        let b = combo_bisection(&combo, n);
        let better_b = best.as_ref().map_or(b > 0, |(bb, _, _)| b > *bb);
        let tie_b = best.as_ref().is_some_and(|(bb, _, _)| b == *bb);
        if better_b || tie_b {
            let set = GeneratorSet::new(dim, combo.clone())?;
            let diameter = set.distance_profile()?.diameter();
            // combos arrive in lexicographic order, so equal keys keep the first
            if better_b || diameter < best.as_ref().map_or(u32::MAX, |x| x.1) {
                best = Some((b, diameter, set));
            }
        }
        if !next_combination(&mut combo, (n - 1) as u32) {
            break;
        }
    }
    let (_, _, set) = best.ok_or(LhError::Disconnected(dim))?;
    let report = bisection_fwht(&set)?;
    Ok((set, report))
}

fn combo_bisection(hops: &[u32], n: usize) -> u32 {
    (1..n as u32)
        .map(|k| hops.iter().map(|&h| parity(u64::from(k & h))).sum::<u32>())
        .min()
        .unwrap_or(0)
}

/// Advances `combo` (strictly increasing, values in `1..=max`) in lexicographic order.
fn next_combination(combo: &mut [u32], max: u32) -> bool {
    let m = combo.len();
    for i in (0..m).rev() {
        if combo[i] < max - (m - 1 - i) as u32 {
            combo[i] += 1;
            for j in i + 1..m {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}
