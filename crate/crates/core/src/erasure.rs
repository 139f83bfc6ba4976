//! Outer erasure code.
//!
//! A systematic binary linear code: `d = [w | w G^T]` where `G` is an
//! `(n_c - k) x k` matrix drawn from ChaCha8 (stream [`STREAM_GENERATOR`]) of
//! the configured seed. Decoding solves for erased message bits by Gaussian
//! elimination over GF(2) using the parity equations whose parity bit survived.

use rand::Rng;

use crate::bits::{BitString, Symbol, TernaryString};
use crate::channel::stream_rng;
use crate::error::{invalid, Error, Result};

pub const STREAM_GENERATOR: u64 = 3;

/// Anything that can map a message to a codeword and back from an erased copy.
pub trait ErasureCode {
    fn message_len(&self) -> usize;
    fn code_len(&self) -> usize;
    fn encode(&self, w: &BitString) -> Result<BitString>;
    fn decode(&self, d_hat: &TernaryString) -> Result<BitString>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErasureConfig {
    pub epsilon: f64,
    pub k: usize,
    pub n_c: usize,
    pub seed: u64,
}

impl ErasureConfig {
    /// Code length `ceil(k / (1 - epsilon))` for a message of `k` bits.
    pub fn new(k: usize, epsilon: f64, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if k == 0 {
            return Err(invalid("message length must be positive"));
        }
        // guard against 108 / 0.75 = 144.00000000000003 style rounding
        let n_c = ((k as f64 / (1.0 - epsilon)) - 1e-9).ceil().max(k as f64) as usize;
        Ok(Self { epsilon, k, n_c, seed })
    }

    /// Largest message that fits a code of length `n_c`: `k = floor(n_c (1 - epsilon))`.
    pub fn for_code_length(n_c: usize, epsilon: f64, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let k = ((n_c as f64 * (1.0 - epsilon)) + 1e-9).floor() as usize;
        if k == 0 {
            return Err(invalid(format!("code length {n_c} leaves no message bits at epsilon {epsilon}")));
        }
        Ok(Self { epsilon, k, n_c, seed })
    }

    pub fn redundancy(&self) -> usize {
        self.n_c - self.k
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(invalid(format!("epsilon {epsilon} outside [0, 1)")));
    }
    Ok(())
}

/// Packed GF(2) row.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row(Vec<u64>);

impl Row {
    fn zeros(bits: usize) -> Self {
        Row(vec![0; bits.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &Row) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

#[derive(Clone, Debug)]
pub struct RandomLinearCode {
    config: ErasureConfig,
    /// One row per parity bit, `k` columns each.
    parity_rows: Vec<Row>,
}

impl RandomLinearCode {
    pub fn new(config: ErasureConfig) -> Self {
        let mut rng = stream_rng(config.seed, STREAM_GENERATOR);
        let parity_rows = (0..config.redundancy())
            .map(|_| {
                let mut row = Row::zeros(config.k);
                for i in 0..config.k {
                    if rng.gen::<bool>() {
                        row.set(i);
                    }
                }
                row
            })
            .collect();
        Self { config, parity_rows }
    }

    pub fn config(&self) -> &ErasureConfig {
        &self.config
    }

    /// Generator coefficient of message bit `i` in parity bit `j`.
    pub fn coefficient(&self, j: usize, i: usize) -> bool {
        self.parity_rows[j].get(i)
    }

    fn parity_bit(&self, j: usize, w: &[u8]) -> u8 {
        let row = &self.parity_rows[j];
        w.iter().enumerate().filter(|(i, &b)| b == 1 && row.get(*i)).count() as u8 & 1
    }
}

impl ErasureCode for RandomLinearCode {
    fn message_len(&self) -> usize {
        self.config.k
    }

    fn code_len(&self) -> usize {
        self.config.n_c
    }

    fn encode(&self, w: &BitString) -> Result<BitString> {
        if w.len() != self.config.k {
            return Err(Error::LengthMismatch {
                expected: self.config.k,
                actual: w.len(),
            });
        }
        let mut out = w.clone().into_vec();
        for j in 0..self.parity_rows.len() {
            out.push(self.parity_bit(j, w.as_slice()));
        }
        Ok(BitString::from_bits_unchecked(out))
    }

    fn decode(&self, d_hat: &TernaryString) -> Result<BitString> {
        let k = self.config.k;
        if d_hat.len() != self.config.n_c {
            return Err(Error::LengthMismatch {
                expected: self.config.n_c,
                actual: d_hat.len(),
            });
        }
        let symbols = d_hat.symbols();
        let unknown: Vec<usize> = (0..k).filter(|&i| symbols[i] == Symbol::Erased).collect();
        let mut w: Vec<u8> = symbols[..k].iter().map(|s| s.bit().unwrap_or(0)).collect();
        if unknown.is_empty() {
            return Ok(BitString::from_bits_unchecked(w));
        }

        // one equation per surviving parity bit; column u is unknown[u], last column is the rhs
        let width = unknown.len();
        let mut system: Vec<Row> = Vec::new();
        for (j, row) in self.parity_rows.iter().enumerate() {
            let Some(p) = symbols[k + j].bit() else { continue };
            let mut eq = Row::zeros(width + 1);
            for (u, &i) in unknown.iter().enumerate() {
                if row.get(i) {
                    eq.set(u);
                }
            }
            let known: u8 = self.parity_bit(j, &w);
            if (p ^ known) & 1 == 1 {
                eq.set(width);
            }
            system.push(eq);
        }

        let mut rank = 0;
        for col in 0..width {
            let Some(pivot) = (rank..system.len()).find(|&r| system[r].get(col)) else {
                continue;
            };
            system.swap(rank, pivot);
            let pivot_row = system[rank].clone();
            for (r, eq) in system.iter_mut().enumerate() {
                if r != rank && eq.get(col) {
                    eq.xor_assign(&pivot_row);
                }
            }
            rank += 1;
        }
        if rank < width {
            return Err(Error::UnrecoverableErasures {
                erased: width,
                rank,
            });
        }
        // rows past the rank must reduce to 0 = 0
        if system[rank..].iter().any(|eq| !eq.is_zero()) {
            return Err(Error::InconsistentParity);
        }
        for (u, &i) in unknown.iter().enumerate() {
            w[i] = system[u].get(width) as u8;
        }
        Ok(BitString::from_bits_unchecked(w))
    }
}

pub fn ec_encode(w: &BitString, config: &ErasureConfig) -> Result<BitString> {
    RandomLinearCode::new(*config).encode(w)
}

pub fn ec_decode(d_hat: &TernaryString, config: &ErasureConfig) -> Result<BitString> {
    RandomLinearCode::new(*config).decode(d_hat)
}
