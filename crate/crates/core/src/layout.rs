//! Geometry of a nested VT codeword.
//!
//! A layer-`l` codeword is its `m` layer-`(l-1)` children laid out back to
//! back, followed by its own parity block. Layer 1 codewords wrap one data
//! section of `d_sec` bits each.

use std::fmt;

use crate::codec::ResidueScheme;
use crate::error::{invalid, Result};
use crate::vt::parity_length;

/// Codewords longer than this are rejected up front.
pub const MAX_CODEWORD_LEN: usize = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub d_sec: usize,
    pub m: usize,
    pub ell: usize,
    pub scheme: ResidueScheme,
}

impl LayerSpec {
    /// Spec with the all-zero residue scheme.
    pub fn new(d_sec: usize, m: usize, ell: usize) -> Result<Self> {
        Self::with_scheme(d_sec, m, ell, ResidueScheme::AllZero)
    }

    pub fn with_scheme(d_sec: usize, m: usize, ell: usize, scheme: ResidueScheme) -> Result<Self> {
        if d_sec == 0 {
            return Err(invalid("d_sec must be at least 1"));
        }
        if ell == 0 {
            return Err(invalid("the number of layers must be at least 1"));
        }
        if ell >= 2 && m < 2 {
            return Err(invalid("the merge factor m must be at least 2 when there are two or more layers"));
        }
        let spec = Self { d_sec, m, ell, scheme };
        // walk the length recursion with overflow checks
        let mut len = d_sec
            .checked_add(parity_length(d_sec)?)
            .ok_or_else(|| invalid("codeword length overflows"))?;
        for _ in 1..ell {
            let merged = len
                .checked_mul(m)
                .filter(|&v| v <= MAX_CODEWORD_LEN)
                .ok_or_else(|| invalid("codeword length exceeds the supported maximum"))?;
            len = merged + parity_length(merged)?;
        }
        if len > MAX_CODEWORD_LEN {
            return Err(invalid("codeword length exceeds the supported maximum"));
        }
        Ok(spec)
    }

    /// Number of layer-1 sections, `m^(ell-1)`.
    pub fn sections(&self) -> usize {
        self.codewords_in_layer(1)
    }

    /// Number of codewords in layer `l` (1-based), `m^(ell-l)`.
    pub fn codewords_in_layer(&self, l: usize) -> usize {
        if l >= self.ell {
            1
        } else {
            self.m.pow((self.ell - l) as u32)
        }
    }

    pub fn data_len(&self) -> usize {
        self.sections() * self.d_sec
    }

    pub fn codeword_len(&self) -> usize {
        *self.layer_lengths().last().expect("at least one layer")
    }

    /// Codeword length of every layer, bottom up.
    pub fn layer_lengths(&self) -> Vec<usize> {
        let mut lens = Vec::with_capacity(self.ell);
        let first = self.d_sec + parity_length(self.d_sec).expect("d_sec >= 1");
        lens.push(first);
        for l in 1..self.ell {
            let merged = self.m * lens[l - 1];
            lens.push(merged + parity_length(merged).expect("merged >= 1"));
        }
        lens
    }

    pub fn position_matrix(&self) -> PositionMatrix {
        PositionMatrix::new(self)
    }

    pub fn encoding_rate(&self) -> Rate {
        Rate {
            data_bits: self.data_len(),
            codeword_bits: self.codeword_len(),
        }
    }

    pub fn rate_bounds(&self) -> RateBounds {
        rate_bounds(self)
    }

    /// 0-based indices of the bits of the codeword that carry data,
    /// in data order.
    pub fn data_positions(&self) -> Vec<usize> {
        let lens = self.layer_lengths();
        let mut out = Vec::with_capacity(self.data_len());
        self.collect_data(self.ell, 0, &lens, &mut out);
        out
    }

    fn collect_data(&self, layer: usize, start: usize, lens: &[usize], out: &mut Vec<usize>) {
        if layer == 1 {
            out.extend(start..start + self.d_sec);
            return;
        }
        let child_len = lens[layer - 2];
        for c in 0..self.m {
            self.collect_data(layer - 1, start + c * child_len, lens, out);
        }
    }
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d_sec={}, m={}, ell={}, scheme={})", self.d_sec, self.m, self.ell, self.scheme)
    }
}

/// Last-bit positions of every inner codeword (1-based, inside the full codeword).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionMatrix {
    rows: Vec<Vec<usize>>,
    layer_lengths: Vec<usize>,
}

impl PositionMatrix {
    pub fn new(spec: &LayerSpec) -> Self {
        let layer_lengths = spec.layer_lengths();
        let mut rows = vec![Vec::new(); spec.ell];
        place(spec, spec.ell, 1, &layer_lengths, &mut rows);
        Self { rows, layer_lengths }
    }

    pub fn layers(&self) -> usize {
        self.rows.len()
    }

    pub fn layer_lengths(&self) -> &[usize] {
        &self.layer_lengths
    }

    pub fn codeword_len(&self) -> usize {
        *self.layer_lengths.last().expect("at least one layer")
    }

    /// Non-zero entries of row `l` (1-based).
    pub fn row(&self, l: usize) -> &[usize] {
        &self.rows[l - 1]
    }

    /// `N_{l,i}`, 1-based in both indices.
    pub fn entry(&self, l: usize, i: usize) -> Option<usize> {
        self.rows.get(l.checked_sub(1)?)?.get(i.checked_sub(1)?).copied()
    }

    /// Zero-padded `ell x m^(ell-1)` table.
    pub fn to_dense(&self) -> Vec<Vec<usize>> {
        let width = self.rows[0].len();
        self.rows
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.resize(width, 0);
                r
            })
            .collect()
    }

    /// 1-based inclusive `(start, end)` of codeword `i` in layer `l`.
    pub fn codeword_span(&self, l: usize, i: usize) -> Result<(usize, usize)> {
        let end = self
            .entry(l, i)
            .ok_or_else(|| invalid(format!("no codeword ({l}, {i}) in a {}-layer matrix", self.layers())))?;
        Ok((end + 1 - self.layer_lengths[l - 1], end))
    }
}

fn place(spec: &LayerSpec, layer: usize, start: usize, lens: &[usize], rows: &mut [Vec<usize>]) -> usize {
    let end = start + lens[layer - 1] - 1;
    if layer > 1 {
        let mut cursor = start;
        for _ in 0..spec.m {
            cursor = place(spec, layer - 1, cursor, lens, rows) + 1;
        }
    }
    rows[layer - 1].push(end);
    end
}

/// Encoding rate as an exact ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rate {
    pub data_bits: usize,
    pub codeword_bits: usize,
}

impl Rate {
    pub fn value(&self) -> f64 {
        self.data_bits as f64 / self.codeword_bits as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBounds {
    pub lower: f64,
    pub rate: f64,
    pub upper: f64,
    /// The ordering `lower < rate < upper` is only proven for `d_sec >= 36`.
    pub guaranteed: bool,
}

impl RateBounds {
    pub fn ordered(&self) -> bool {
        self.lower < self.rate && self.rate < self.upper
    }
}

/// Smallest section length for which the bounds are proven.
pub const RATE_BOUND_MIN_DSEC: usize = 36;

pub fn rate_bounds(spec: &LayerSpec) -> RateBounds {
    let m = spec.m as f64;
    let d = spec.d_sec as f64;
    let ell = spec.ell as i32;
    let data = spec.data_len() as f64;
    // sum_{j<ell} m^(j/2) == (m^(ell/2) - 1) / (sqrt(m) - 1)
    let series: f64 = (0..ell).map(|j| m.powf(j as f64 / 2.0)).sum();
    let scale = m.powf((ell - 1) as f64 / 2.0);

    let lower_den = scale * d.sqrt() + 2.5f64.sqrt() / 2.0 * series;
    let upper_den = scale * (2.0 * d).sqrt() + series;
    RateBounds {
        lower: data / (lower_den * lower_den),
        rate: spec.encoding_rate().value(),
        upper: 2.0 * data / (upper_den * upper_den),
        guaranteed: spec.d_sec >= RATE_BOUND_MIN_DSEC,
    }
}

pub fn layer_lengths(spec: &LayerSpec) -> Vec<usize> {
    spec.layer_lengths()
}

pub fn position_matrix(spec: &LayerSpec) -> PositionMatrix {
    spec.position_matrix()
}

pub fn encoding_rate(spec: &LayerSpec) -> Rate {
    spec.encoding_rate()
}

impl From<PositionMatrix> for Vec<Vec<usize>> {
    fn from(m: PositionMatrix) -> Self {
        m.to_dense()
    }
}
