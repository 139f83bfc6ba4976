//! Seeded chop-and-shuffle channel.
//!
//! Each of the `n - 1` internal boundaries of a codeword breaks independently
//! with probability `p_break`, giving geometric fragment lengths (the last
//! fragment is truncated by the end of the word). The fragments are then
//! shuffled uniformly and labelled `1..=M` in arrival order.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`; chopping reads stream [`STREAM_CHOP`] and shuffling
//! stream [`STREAM_SHUFFLE`], so the two draws are independent and each is
//! reproducible on its own.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{invalid, Result};

pub const STREAM_CHOP: u64 = 1;
pub const STREAM_SHUFFLE: u64 = 2;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub p_break: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(p_break: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_break) {
            return Err(invalid(format!("break probability {p_break} outside [0, 1]")));
        }
        Ok(Self { p_break, seed })
    }
}

/// A labelled piece of channel output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    /// 1-based label assigned after shuffling.
    pub id: usize,
    pub bits: BitString,
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Channel output in arrival order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FragmentSet {
    fragments: Vec<Fragment>,
}

impl FragmentSet {
    /// Labels the pieces `1..=M` in the given order. Empty pieces are rejected.
    pub fn from_pieces(pieces: Vec<BitString>) -> Result<Self> {
        if pieces.iter().any(|p| p.is_empty()) {
            return Err(invalid("fragments must hold at least one bit"));
        }
        Ok(Self {
            fragments: pieces
                .into_iter()
                .enumerate()
                .map(|(i, bits)| Fragment { id: i + 1, bits })
                .collect(),
        })
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn total_len(&self) -> usize {
        self.fragments.iter().map(Fragment::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fragment> {
        self.fragments.iter()
    }
}

/// Cuts `x` at independently chosen boundaries; pieces stay in original order.
pub fn chop(x: &BitString, params: &ChannelParams) -> Result<Vec<BitString>> {
    if x.is_empty() {
        return Err(invalid("cannot chop an empty string"));
    }
    let mut rng = stream_rng(params.seed, STREAM_CHOP);
    let bits = x.as_slice();
    let mut pieces = Vec::new();
    let mut start = 0;
    for boundary in 1..bits.len() {
        if rng.gen_bool(params.p_break) {
            pieces.push(BitString::from_bits_unchecked(bits[start..boundary].to_vec()));
            start = boundary;
        }
    }
    pieces.push(BitString::from_bits_unchecked(bits[start..].to_vec()));
    Ok(pieces)
}

/// Uniformly permutes the pieces and labels them in the new order.
pub fn shuffle(mut pieces: Vec<BitString>, seed: u64) -> Result<FragmentSet> {
    if pieces.is_empty() {
        return Err(invalid("nothing to shuffle"));
    }
    let mut rng = stream_rng(seed, STREAM_SHUFFLE);
    pieces.shuffle(&mut rng);
    FragmentSet::from_pieces(pieces)
}

pub fn chop_and_shuffle(x: &BitString, params: &ChannelParams) -> Result<FragmentSet> {
    shuffle(chop(x, params)?, params.seed)
}

/// Break probability for a given `alpha = p_n log2(n)`, clamped to `[0, 1]`.
pub fn alpha_to_p(alpha: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("alpha conversion needs n >= 2"));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(invalid(format!("alpha must be non-negative, got {alpha}")));
    }
    Ok((alpha / (n as f64).log2()).clamp(0.0, 1.0))
}

/// Chop-and-shuffle capacity `e^(-alpha)`.
pub fn capacity(alpha: f64) -> f64 {
    (-alpha).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_word(len: usize, seed: u64) -> BitString {
        let mut rng = stream_rng(seed, 99);
        BitString::from_bits((0..len).map(|_| rng.gen_range(0..2u8)).collect()).unwrap()
    }

    #[test]
    fn extremes() {
        let x = random_word(40, 1);
        let one = chop(&x, &ChannelParams::new(0.0, 5).unwrap()).unwrap();
        assert_eq!(one, vec![x.clone()]);
        let all = chop(&x, &ChannelParams::new(1.0, 5).unwrap()).unwrap();
        assert_eq!(all.len(), 40);
        assert!(all.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn golden_fragmentation() {
        // ChaCha8, seed 2024, stream STREAM_CHOP; captured once and pinned
        let x = BitString::zeros(64);
        let lens: Vec<usize> = chop(&x, &ChannelParams::new(0.1, 2024).unwrap())
            .unwrap()
            .iter()
            .map(BitString::len)
            .collect();
        assert_eq!(lens, GOLDEN_LENGTHS);
    }

    const GOLDEN_LENGTHS: &[usize] = &[2, 7, 3, 5, 5, 1, 9, 17, 1, 14];

    #[test]
    fn golden_permutation() {
        // ChaCha8, seed 7, stream STREAM_SHUFFLE
        let pieces: Vec<BitString> = (1..=6).map(BitString::zeros).collect();
        let set = shuffle(pieces, 7).unwrap();
        let order: Vec<usize> = set.iter().map(Fragment::len).collect();
        assert_eq!(order, GOLDEN_ORDER);
        assert_eq!(set.iter().map(|f| f.id).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
    }

    const GOLDEN_ORDER: &[usize] = &[3, 1, 6, 5, 2, 4];

    #[test]
    fn single_piece_shuffle_is_identity() {
        let x = random_word(9, 3);
        let set = shuffle(vec![x.clone()], 11).unwrap();
        assert_eq!(set.fragments(), &[Fragment { id: 1, bits: x }]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ChannelParams::new(1.5, 0).is_err());
        assert!(ChannelParams::new(-0.1, 0).is_err());
        assert!(chop(&BitString::new(), &ChannelParams::new(0.5, 0).unwrap()).is_err());
        assert!(shuffle(vec![], 0).is_err());
        assert!(FragmentSet::from_pieces(vec![BitString::new()]).is_err());
    }

    #[test]
    fn alpha_conversion() {
        assert_eq!(alpha_to_p(0.5, 1024).unwrap(), 0.05);
        assert_eq!(alpha_to_p(0.0, 77).unwrap(), 0.0);
        assert_eq!(alpha_to_p(1.0, 256).unwrap(), 0.125);
        assert_eq!(alpha_to_p(5.0, 2).unwrap(), 1.0);
        assert!(alpha_to_p(0.5, 1).is_err());
        assert!(alpha_to_p(-1.0, 8).is_err());
    }

    #[test]
    fn capacity_values() {
        assert_eq!(capacity(0.0), 1.0);
        assert!((capacity(0.5) - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!((capacity(1.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn mean_fragment_count_within_three_sigma() {
        let n = 512;
        let p = 0.02;
        let x = BitString::zeros(n);
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|s| chop(&x, &ChannelParams::new(p, s).unwrap()).unwrap().len())
            .sum();
        let mean = total as f64 / trials as f64;
        let expected = 1.0 + (n - 1) as f64 * p;
        let sigma = ((n - 1) as f64 * p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sigma, "mean {mean} vs {expected}");
    }

    proptest! {
        #[test]
        fn chop_is_lossless(len in 1usize..300, p in 0.0f64..=1.0, seed: u64) {
            let x = random_word(len, seed);
            let params = ChannelParams::new(p, seed).unwrap();
            let pieces = chop(&x, &params).unwrap();
            prop_assert_eq!(BitString::concat(&pieces), x.clone());
            prop_assert!(pieces.iter().all(|f| !f.is_empty()));

            let set = chop_and_shuffle(&x, &params).unwrap();
            prop_assert_eq!(set.total_len(), len);
            prop_assert_eq!(set, chop_and_shuffle(&x, &params).unwrap());

            let mut a: Vec<BitString> = pieces.clone();
            let mut b: Vec<BitString> = chop_and_shuffle(&x, &params).unwrap().iter().map(|f| f.bits.clone()).collect();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }
}
