//! Single Varshamov–Tenengolts codewords.
//!
//! A length-`n` string `x` is a VT codeword with residue `r` when
//! `sum(i * x_i) ≡ r (mod n + 1)` with 1-based `i`. Codewords here are
//! systematic: `x = [d | p]` where the parity block `p` is the shortest one
//! that can reach every residue in `[0, n]`.

use crate::bits::BitString;
use crate::error::{invalid, Error, Result};

/// Weighted sum `sum(i * x_i)` over 1-based positions, reduced mod `len + 1`.
pub(crate) fn syndrome_of(bits: &[u8]) -> u64 {
    let modulus = bits.len() as u64 + 1;
    let sum: u64 = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i as u64 + 1)
        .sum();
    sum % modulus
}

/// VT syndrome of a non-empty bit string.
pub fn syndrome(x: &BitString) -> Result<u64> {
    if x.is_empty() {
        return Err(invalid("syndrome of an empty string"));
    }
    Ok(syndrome_of(x.as_slice()))
}

pub fn check_vt(x: &BitString, r: u64) -> bool {
    !x.is_empty() && syndrome_of(x.as_slice()) == r
}

/// Parity length `ceil((1 + sqrt(1 + 8 n_d)) / 2)`, i.e. the smallest `p`
/// with `p (p - 1) >= 2 n_d`.
pub fn parity_length(n_d: usize) -> Result<usize> {
    if n_d == 0 {
        return Err(invalid("data length must be positive"));
    }
    let target = 2 * n_d as u128;
    let root = (1 + 8 * n_d as u128).isqrt();
    let mut p = (1 + root) / 2;
    while p * (p - 1) < target {
        p += 1;
    }
    while p > 1 && (p - 1) * (p - 2) >= target {
        p -= 1;
    }
    Ok(p as usize)
}

/// Sloane's parity length `ceil(sqrt(2 n_d + 9/4) + 1/2)`, kept as a
/// comparison baseline. Equivalent to the smallest `p` with
/// `(2p - 1)^2 >= 8 n_d + 9`.
pub fn parity_length_sloane(n_d: usize) -> Result<usize> {
    if n_d == 0 {
        return Err(invalid("data length must be positive"));
    }
    let target = 8 * n_d as u128 + 9;
    let mut p = (target.isqrt() + 1) / 2;
    while (2 * p - 1) * (2 * p - 1) < target {
        p += 1;
    }
    while p > 1 && (2 * p - 3) * (2 * p - 3) >= target {
        p -= 1;
    }
    Ok(p as usize)
}

/// Geometry of one VT codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VtParams {
    pub data_len: usize,
    pub parity_len: usize,
    pub residue: u64,
}

impl VtParams {
    pub fn new(data_len: usize, residue: u64) -> Result<Self> {
        let parity_len = parity_length(data_len)?;
        let n = data_len + parity_len;
        if residue > n as u64 {
            return Err(invalid(format!("residue {residue} outside [0, {n}]")));
        }
        Ok(Self {
            data_len,
            parity_len,
            residue,
        })
    }

    pub fn codeword_len(&self) -> usize {
        self.data_len + self.parity_len
    }
}

/// Intermediate quantities of the parity construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityWorksheet {
    /// Weighted sum of the data bits mod `n + 1`, with data at positions `1..=n_d`.
    pub r_prime: u64,
    /// Weighted sum the parity block must contribute, counted from the right end.
    pub delta: u64,
    /// Number of leading parity bits set to one.
    pub k_max: usize,
    /// Right-hand index of the single extra one, or 0 when none is needed.
    pub b: usize,
}

/// Contribution of the first `k` parity bits (counted from the left) when
/// weighted by their right-hand index: `p k - k (k - 1) / 2`.
fn leading_weight(p: usize, k: usize) -> u64 {
    (p * k - k * (k.saturating_sub(1)) / 2) as u64
}

pub fn parity_worksheet(d: &BitString, r: u64) -> Result<ParityWorksheet> {
    let params = VtParams::new(d.len(), r)?;
    let p = params.parity_len;
    let modulus = params.codeword_len() as u64 + 1;

    let weighted: u64 = d
        .iter()
        .enumerate()
        .filter(|(_, b)| *b == 1)
        .map(|(i, _)| i as u64 + 1)
        .sum();
    let r_prime = weighted % modulus;
    let delta = if r_prime >= r {
        r_prime - r
    } else {
        modulus - (r - r_prime)
    };

    let mut k_max = 0;
    while k_max < p && leading_weight(p, k_max + 1) <= delta {
        k_max += 1;
    }
    let b = (delta - leading_weight(p, k_max)) as usize;

    // Step-3 ones sit at right-hand indices p-k_max+1..=p; b must land below them.
    assert!(
        b == 0 || b <= p - k_max,
        "parity remainder {b} collides with leading ones (p={p}, k_max={k_max})"
    );

    Ok(ParityWorksheet {
        r_prime,
        delta,
        k_max,
        b,
    })
}

/// Parity bits `p` such that `[d | p]` has syndrome `r`.
pub fn build_parity(d: &BitString, r: u64) -> Result<BitString> {
    let sheet = parity_worksheet(d, r)?;
    let p = parity_length(d.len())?;
    let mut parity = vec![0u8; p];
    for bit in parity.iter_mut().take(sheet.k_max) {
        *bit = 1;
    }
    if sheet.b > 0 {
        // right-hand index b is left-hand position p - b (0-based)
        parity[p - sheet.b] = 1;
    }
    Ok(BitString::from_bits_unchecked(parity))
}

pub fn encode_vt(d: &BitString, r: u64) -> Result<BitString> {
    let parity = build_parity(d, r)?;
    let mut x = d.clone();
    x.extend_from(&parity);
    Ok(x)
}

pub fn strip_parity(x: &BitString, n_d: usize) -> Result<BitString> {
    let expected = n_d + parity_length(n_d)?;
    if x.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(x.slice(0..n_d))
}
