//! Small GF(2) linear algebra on vectors packed into `u32` words.

/// Rank of a list of packed vectors over GF(2).
pub fn rank(vectors: &[u32]) -> usize {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    for &v in vectors {
        if insert(&mut basis, v) {
            rank += 1;
        }
    }
    rank
}

/// Inserts `v` into an XOR basis indexed by leading bit; true if `v` was independent.
fn insert(basis: &mut [u32; 32], mut v: u32) -> bool {
    while v != 0 {
        let top = 31 - v.leading_zeros() as usize;
        if basis[top] == 0 {
            basis[top] = v;
            return true;
        }
        v ^= basis[top];
    }
    false
}

/// True if `vectors` span all of GF(2)^dim.
pub fn spans(vectors: &[u32], dim: u32) -> bool {
    rank(vectors) == dim as usize
}
