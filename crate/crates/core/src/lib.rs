//! Nested Varshamov-Tenengolts codes for the chop-and-shuffle channel.
//!
//! A data word is split into sections, each section gets VT parity, groups of
//! `m` codewords are concatenated and protected again, for `ell` layers. The
//! channel breaks the codeword at random boundaries and shuffles the pieces;
//! [`decode_search`] reassembles them by growing prefixes that satisfy every
//! inner VT condition. An outer erasure code cleans up ambiguous positions.

pub mod bits;
pub mod channel;
pub mod codec;
pub mod erasure;
pub mod error;
pub mod experiment;
pub mod io;
pub mod layout;
pub mod plot;
pub mod reassembly;
pub mod vt;

pub use bits::{BitString, Symbol, TernaryString};
pub use channel::{alpha_to_p, capacity, chop, chop_and_shuffle, shuffle, ChannelParams, Fragment, FragmentSet};
pub use codec::{encode_nested, strip_nested, strip_nested_bits, verify_all_conditions, ConditionSet, ResidueScheme};
pub use erasure::{ec_decode, ec_encode, ErasureCode, ErasureConfig, RandomLinearCode};
pub use error::{Error, Result};
pub use experiment::{run_trial, TrialClass, TrialConfig, TrialRecord};
pub use io::FragmentFile;
pub use layout::{LayerSpec, PositionMatrix, Rate, RateBounds};
pub use plot::emit_svg;
pub use reassembly::{
    brute_force_oracle, declare_error, decode_search, is_helpful, overlap, Candidate, Collect, DecodeOutcome, Recovery,
    SearchConfig, SearchStats, Verdict,
};
pub use vt::{build_parity, check_vt, encode_vt, parity_length, strip_parity, syndrome};
