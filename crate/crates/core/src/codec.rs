//! Nested VT encoding and parity stripping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{BitString, Symbol, TernaryString};
use crate::error::{Error, Result};
use crate::layout::{LayerSpec, PositionMatrix};
use crate::vt::{encode_vt, syndrome_of};

/// How residues are assigned to the inner codewords.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueScheme {
    /// Every codeword uses residue 0.
    #[default]
    AllZero,
    /// Every codeword uses the same residue, clamped into `[0, n_l]` per layer.
    FixedNonZero(u64),
    /// Codeword `i` of a layer uses residue `(i - 1) mod (n_l + 1)`.
    Distinct,
}

impl ResidueScheme {
    /// Residue of codeword `i` (1-based) in layer `l`, whose codewords have length `n_l`.
    pub fn residue_for(&self, _layer: usize, index: usize, n_l: usize) -> u64 {
        match *self {
            ResidueScheme::AllZero => 0,
            ResidueScheme::FixedNonZero(r0) => r0.min(n_l as u64),
            ResidueScheme::Distinct => (index as u64 - 1) % (n_l as u64 + 1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResidueScheme::AllZero => "all_zero",
            ResidueScheme::FixedNonZero(_) => "fixed_nonzero",
            ResidueScheme::Distinct => "distinct",
        }
    }
}

impl fmt::Display for ResidueScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueScheme::FixedNonZero(r) => write!(f, "fixed:{r}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for ResidueScheme {
    type Err = Error;

    /// Accepts `zero`, `distinct`, `fixed` (residue 1) or `fixed:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "all_zero" | "all-zero" => Ok(ResidueScheme::AllZero),
            "distinct" => Ok(ResidueScheme::Distinct),
            "fixed" | "fixed_nonzero" | "fixed-nonzero" => Ok(ResidueScheme::FixedNonZero(1)),
            _ => {
                let r = s
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::Parse(format!("unknown residue scheme {s:?}")))?;
                r.parse()
                    .map(ResidueScheme::FixedNonZero)
                    .map_err(|_| Error::Parse(format!("bad fixed residue {r:?}")))
            }
        }
    }
}

pub fn residue_for(scheme: ResidueScheme, layer: usize, index: usize, n_l: usize) -> u64 {
    scheme.residue_for(layer, index, n_l)
}

/// One VT condition: the span `start..=end` (1-based) must have the given local syndrome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Condition {
    pub layer: usize,
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub residue: u64,
}

/// Every inner VT condition of a nested code, ordered by end position.
#[derive(Clone, Debug)]
pub struct ConditionSet {
    conditions: Vec<Condition>,
    codeword_len: usize,
}

impl ConditionSet {
    pub fn new(matrix: &PositionMatrix, scheme: ResidueScheme) -> Self {
        let mut conditions = Vec::new();
        for l in 1..=matrix.layers() {
            let n_l = matrix.layer_lengths()[l - 1];
            for (i0, &end) in matrix.row(l).iter().enumerate() {
                conditions.push(Condition {
                    layer: l,
                    index: i0 + 1,
                    start: end + 1 - n_l,
                    end,
                    residue: scheme.residue_for(l, i0 + 1, n_l),
                });
            }
        }
        conditions.sort_by_key(|c| (c.end, c.layer));
        Self {
            conditions,
            codeword_len: matrix.codeword_len(),
        }
    }

    pub fn for_spec(spec: &LayerSpec) -> Self {
        Self::new(&spec.position_matrix(), spec.scheme)
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn codeword_len(&self) -> usize {
        self.codeword_len
    }

    /// Number of conditions whose span ends at or before `gamma`.
    pub fn covered(&self, gamma: usize) -> usize {
        self.conditions.partition_point(|c| c.end <= gamma)
    }

    /// Checks the conditions ending in `(from, to]` against `bits`
    /// (which must hold at least `to` bits).
    pub fn check_range(&self, bits: &[u8], from: usize, to: usize) -> bool {
        let lo = self.covered(from);
        self.conditions[lo..]
            .iter()
            .take_while(|c| c.end <= to)
            .all(|c| syndrome_of(&bits[c.start - 1..c.end]) == c.residue)
    }

    pub fn check_prefix(&self, bits: &[u8], gamma: usize) -> bool {
        gamma <= bits.len() && self.check_range(bits, 0, gamma)
    }

    pub fn check_ternary_prefix(&self, symbols: &[Symbol], gamma: usize) -> bool {
        if gamma > symbols.len() {
            return false;
        }
        self.conditions.iter().take_while(|c| c.end <= gamma).all(|c| {
            let span: Option<Vec<u8>> = symbols[c.start - 1..c.end].iter().map(|s| s.bit()).collect();
            span.is_some_and(|bits| syndrome_of(&bits) == c.residue)
        })
    }
}

/// True when every condition whose span ends at or before `up_to` holds on `prefix`.
pub fn verify_all_conditions(prefix: &BitString, matrix: &PositionMatrix, scheme: ResidueScheme, up_to: usize) -> bool {
    ConditionSet::new(matrix, scheme).check_prefix(prefix.as_slice(), up_to)
}

/// Same as [`verify_all_conditions`], with spans containing an erasure failing.
pub fn verify_all_conditions_ternary(
    prefix: &TernaryString,
    matrix: &PositionMatrix,
    scheme: ResidueScheme,
    up_to: usize,
) -> bool {
    ConditionSet::new(matrix, scheme).check_ternary_prefix(prefix.symbols(), up_to)
}

/// Encodes `d` (length `m^(ell-1) d_sec`) into one nested codeword.
pub fn encode_nested(d: &BitString, spec: &LayerSpec) -> Result<BitString> {
    if d.len() != spec.data_len() {
        return Err(Error::LengthMismatch {
            expected: spec.data_len(),
            actual: d.len(),
        });
    }
    let lens = spec.layer_lengths();

    let mut layer: Vec<BitString> = (0..spec.sections())
        .map(|i| {
            let section = d.slice(i * spec.d_sec..(i + 1) * spec.d_sec);
            encode_vt(&section, spec.scheme.residue_for(1, i + 1, lens[0]))
        })
        .collect::<Result<_>>()?;

    for l in 2..=spec.ell {
        layer = layer
            .chunks(spec.m)
            .enumerate()
            .map(|(g, children)| encode_vt(&BitString::concat(children), spec.scheme.residue_for(l, g + 1, lens[l - 1])))
            .collect::<Result<_>>()?;
    }

    debug_assert_eq!(layer.len(), 1);
    Ok(layer.pop().expect("one root codeword"))
}

/// Drops every parity block of a full-length estimate, keeping the data
/// positions (erasures included) in order.
pub fn strip_nested(x_hat: &TernaryString, spec: &LayerSpec) -> Result<TernaryString> {
    check_full_length(x_hat.len(), spec)?;
    let symbols = x_hat.symbols();
    Ok(TernaryString::new(spec.data_positions().into_iter().map(|i| symbols[i]).collect()))
}

pub fn strip_nested_bits(x_hat: &BitString, spec: &LayerSpec) -> Result<BitString> {
    check_full_length(x_hat.len(), spec)?;
    let bits = x_hat.as_slice();
    Ok(BitString::from_bits_unchecked(spec.data_positions().into_iter().map(|i| bits[i]).collect()))
}

fn check_full_length(len: usize, spec: &LayerSpec) -> Result<()> {
    let n = spec.codeword_len();
    if len != n {
        return Err(Error::LengthMismatch { expected: n, actual: len });
    }
    Ok(())
}

/// Residue actually used by each layer under a scheme, as `(layer, residues)`.
/// FixedNonZero may be clamped differently per layer.
pub fn effective_residues(spec: &LayerSpec) -> Vec<Vec<u64>> {
    let lens = spec.layer_lengths();
    (1..=spec.ell)
        .map(|l| {
            (1..=spec.codewords_in_layer(l))
                .map(|i| spec.scheme.residue_for(l, i, lens[l - 1]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vt::syndrome;
    use proptest::prelude::*;

    const EXAMPLE_X: &str = "10110010001010101001100010010000";
    const EXAMPLE_D: &str = "10110011010100";

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn residue_examples() {
        assert_eq!(ResidueScheme::AllZero.residue_for(3, 7, 40), 0);
        assert_eq!(ResidueScheme::Distinct.residue_for(1, 3, 12), 2);
        assert_eq!(ResidueScheme::FixedNonZero(5).residue_for(1, 1, 12), 5);
        assert_eq!(ResidueScheme::FixedNonZero(50).residue_for(1, 1, 12), 12);
        assert_eq!(ResidueScheme::Distinct.residue_for(1, 14, 12), 0);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("zero".parse::<ResidueScheme>().unwrap(), ResidueScheme::AllZero);
        assert_eq!("distinct".parse::<ResidueScheme>().unwrap(), ResidueScheme::Distinct);
        assert_eq!("fixed:7".parse::<ResidueScheme>().unwrap(), ResidueScheme::FixedNonZero(7));
        assert!("fixed:x".parse::<ResidueScheme>().is_err());
        assert!("other".parse::<ResidueScheme>().is_err());
        for s in [ResidueScheme::AllZero, ResidueScheme::Distinct, ResidueScheme::FixedNonZero(3)] {
            assert_eq!(s.to_string().parse::<ResidueScheme>().unwrap(), s);
        }
    }

    #[test]
    fn worked_example_encodes() {
        let spec = LayerSpec::new(7, 2, 2).unwrap();
        assert_eq!(encode_nested(&bits(EXAMPLE_D), &spec).unwrap(), bits(EXAMPLE_X));
    }

    #[test]
    fn zero_data_encodes_to_zero() {
        let spec = LayerSpec::new(9, 3, 3).unwrap();
        let x = encode_nested(&BitString::zeros(spec.data_len()), &spec).unwrap();
        assert_eq!(x, BitString::zeros(spec.codeword_len()));
    }

    #[test]
    fn single_layer_is_plain_vt() {
        let d = bits("110100111");
        for scheme in [ResidueScheme::AllZero, ResidueScheme::FixedNonZero(4), ResidueScheme::Distinct] {
            let spec = LayerSpec::with_scheme(9, 2, 1, scheme).unwrap();
            let r = scheme.residue_for(1, 1, spec.codeword_len());
            assert_eq!(encode_nested(&d, &spec).unwrap(), encode_vt(&d, r).unwrap());
        }
    }

    #[test]
    fn wrong_data_length() {
        let spec = LayerSpec::new(7, 2, 2).unwrap();
        assert!(matches!(
            encode_nested(&bits("101"), &spec),
            Err(Error::LengthMismatch { expected: 14, actual: 3 })
        ));
    }

    #[test]
    fn condition_examples() {
        let spec = LayerSpec::new(7, 2, 2).unwrap();
        let n = spec.position_matrix();
        let x = bits(EXAMPLE_X);
        assert!(verify_all_conditions(&x, &n, ResidueScheme::AllZero, 32));
        // shorter than the first codeword: vacuous
        assert!(verify_all_conditions(&bits("11111"), &n, ResidueScheme::AllZero, 5));
        assert!(verify_all_conditions(&BitString::new(), &n, ResidueScheme::AllZero, 0));

        let mut swapped = x.clone().into_vec();
        swapped.swap(0, 1);
        let swapped = BitString::from_bits(swapped).unwrap();
        // oracle: direct syndrome of the altered first codeword
        assert_ne!(syndrome(&swapped.slice(0..12)).unwrap(), 0);
        assert!(!verify_all_conditions(&swapped, &n, ResidueScheme::AllZero, 12));
    }

    #[test]
    fn ternary_conditions_fail_on_erasures() {
        let spec = LayerSpec::new(7, 2, 2).unwrap();
        let n = spec.position_matrix();
        let mut t: Vec<Symbol> = TernaryString::from(bits(EXAMPLE_X)).symbols().to_vec();
        assert!(verify_all_conditions_ternary(&TernaryString::new(t.clone()), &n, ResidueScheme::AllZero, 32));
        t[20] = Symbol::Erased;
        let t = TernaryString::new(t);
        assert!(verify_all_conditions_ternary(&t, &n, ResidueScheme::AllZero, 12));
        assert!(!verify_all_conditions_ternary(&t, &n, ResidueScheme::AllZero, 24));
    }

    #[test]
    fn strip_examples() {
        let spec = LayerSpec::new(7, 2, 2).unwrap();
        let d = strip_nested(&TernaryString::from(bits(EXAMPLE_X)), &spec).unwrap();
        assert_eq!(d.to_string(), EXAMPLE_D);
        assert!(strip_nested(&TernaryString::from(bits("0101")), &spec).is_err());

        // erasures only in parity vanish
        let mut t: Vec<Symbol> = TernaryString::from(bits(EXAMPLE_X)).symbols().to_vec();
        for i in [7, 8, 11, 24, 31] {
            t[i] = Symbol::Erased;
        }
        let d = strip_nested(&TernaryString::new(t.clone()), &spec).unwrap();
        assert_eq!(d.erasure_count(), 0);
        // erasure in a data position survives
        t[13] = Symbol::Erased;
        let d = strip_nested(&TernaryString::new(t), &spec).unwrap();
        assert_eq!(d.to_string(), "1011001 1E10100".replace(' ', ""));
    }

    #[test]
    fn effective_residues_clamp() {
        let spec = LayerSpec::with_scheme(7, 2, 2, ResidueScheme::FixedNonZero(20)).unwrap();
        assert_eq!(effective_residues(&spec), vec![vec![12, 12], vec![20]]);
    }

    #[test]
    fn distinct_residues_in_first_row() {
        let spec = LayerSpec::with_scheme(7, 2, 4, ResidueScheme::Distinct).unwrap();
        let row = &effective_residues(&spec)[0];
        let mut sorted = row.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), row.len());
    }

    fn spec_and_data() -> impl Strategy<Value = (LayerSpec, BitString)> {
        let scheme = prop_oneof![
            Just(ResidueScheme::AllZero),
            (0u64..40).prop_map(ResidueScheme::FixedNonZero),
            Just(ResidueScheme::Distinct),
        ];
        (1usize..20, 2usize..4, 1usize..4, scheme).prop_flat_map(|(d, m, l, s)| {
            let spec = LayerSpec::with_scheme(d, m, l, s).unwrap();
            let len = spec.data_len();
            (Just(spec), prop::collection::vec(0u8..2, len).prop_map(|v| BitString::from_bits(v).unwrap()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn roundtrip_and_conditions((spec, d) in spec_and_data()) {
            let x = encode_nested(&d, &spec).unwrap();
            prop_assert_eq!(x.len(), spec.codeword_len());
            prop_assert!(verify_all_conditions(&x, &spec.position_matrix(), spec.scheme, x.len()));
            prop_assert_eq!(strip_nested_bits(&x, &spec).unwrap(), d.clone());
            prop_assert_eq!(strip_nested(&TernaryString::from(&x), &spec).unwrap().to_bits().unwrap(), d);
        }

        #[test]
        fn all_zero_spans_have_zero_syndrome((spec, d) in spec_and_data()) {
            let spec = LayerSpec::new(spec.d_sec, spec.m, spec.ell).unwrap();
            let x = encode_nested(&d, &spec).unwrap();
            let n = spec.position_matrix();
            for l in 1..=spec.ell {
                for i in 1..=spec.codewords_in_layer(l) {
                    let (s, e) = n.codeword_span(l, i).unwrap();
                    prop_assert_eq!(syndrome(&x.slice(s - 1..e)).unwrap(), 0);
                }
            }
        }
    }
}
