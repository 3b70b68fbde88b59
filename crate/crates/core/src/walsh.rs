//! Parity, Walsh functions in binary and algebraic form, and the fast
//! Walsh–Hadamard transform in natural (Hadamard) ordering.
//!
//! `U_k(x) = (-1)^{P(k & x)}` is row `k` of the Sylvester Hadamard matrix and
//! `W_k(x) = P(k & x)` is its 0/1 form, related by `U = 1 - 2W`.

use crate::error::{LhError, Result};

/// Largest supported dimension `d` (so `n = 2^d <= 16M`).
pub const MAX_DIM: u32 = 24;

/// `popcount(x) mod 2`.
#[inline]
pub fn parity(x: u64) -> u32 {
    x.count_ones() & 1
}

/// An index `k` into the `n` Walsh functions of length `n = 2^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalshIndex {
    k: u32,
    dim: u32,
}

impl WalshIndex {
    pub fn new(k: u32, n: usize) -> Result<Self> {
        let dim = log2_exact(n)?;
        if dim == 0 || dim > MAX_DIM {
            return Err(LhError::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        if (k as usize) >= n {
            return Err(LhError::IndexOutOfRange {
                index: k as u64,
                n: n as u64,
            });
        }
        Ok(Self { k, dim })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> usize {
        1usize << self.dim
    }

    pub fn binary(&self, x: u32) -> u32 {
        walsh_binary(self.k, x)
    }

    pub fn algebraic(&self, x: u32) -> i32 {
        walsh_algebraic(self.k, x)
    }
}

/// `W_k(x) = P(k & x)`; symmetric in `k` and `x`.
#[inline]
pub fn walsh_binary(k: u32, x: u32) -> u32 {
    parity(u64::from(k & x))
}

/// `U_k(x) = 1 - 2 W_k(x)`.
#[inline]
pub fn walsh_algebraic(k: u32, x: u32) -> i32 {
    1 - 2 * walsh_binary(k, x) as i32
}

/// Returns `d` when `n = 2^d`.
pub fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(LhError::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros())
}

/// Coefficients `F_k = <U_k|f>` of an integer vector of power-of-two length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumVector(Vec<i64>);

impl SpectrumVector {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        log2_exact(values.len())?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// In-place unnormalized butterfly: afterwards `f[k] = sum_x U_k(x) f[x]`.
///
/// Applying it twice multiplies the input by `n`.
pub fn fwht_in_place(f: &mut [i64]) -> Result<()> {
    let n = f.len();
    log2_exact(n)?;
    let mut half = 1;
    while half < n {
        for block in f.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Fast Walsh–Hadamard transform, `O(n log n)`, no `1/n` factor.
pub fn fwht(f: &SpectrumVector) -> SpectrumVector {
    let mut out = f.0.clone();
    // length already validated by the constructor
    fwht_in_place(&mut out).expect("power-of-two length");
    SpectrumVector(out)
}
