//! Text formats: bit strings as ASCII `0`/`1`, one per line, and fragment
//! files with a `# n=<int> seed=<int> p=<float>` header followed by one
//! fragment per line in arrival order.

use std::fmt::Write as _;

use crate::bits::BitString;
use crate::channel::FragmentSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FragmentFile {
    pub n: usize,
    pub seed: u64,
    pub p_break: f64,
    pub fragments: FragmentSet,
}

impl FragmentFile {
    pub fn to_text(&self) -> String {
        let mut s = format!("# n={} seed={} p={}\n", self.n, self.seed, self.p_break);
        for f in self.fragments.iter() {
            let _ = writeln!(s, "{}", f.bits);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty fragment file".into()))?;
        let fields = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse(format!("missing header line, got {header:?}")))?;
        let (mut n, mut seed, mut p_break) = (None, None, None);
        for field in fields.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let bad = || Error::Parse(format!("bad value for {key}: {value:?}"));
            match key {
                "n" => n = Some(value.parse().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                "p" => p_break = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(Error::Parse(format!("unknown header field {key:?}"))),
            }
        }
        let n: usize = n.ok_or_else(|| Error::Parse("header lacks n".into()))?;
        let pieces = lines
            .filter(|l| !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<BitString>>>()?;
        let fragments = FragmentSet::from_pieces(pieces)?;
        if fragments.total_len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: fragments.total_len(),
            });
        }
        Ok(Self {
            n,
            seed: seed.ok_or_else(|| Error::Parse("header lacks seed".into()))?,
            p_break: p_break.ok_or_else(|| Error::Parse("header lacks p".into()))?,
            fragments,
        })
    }
}

/// Parses one bit string per non-empty, non-comment line.
pub fn parse_bitstrings(text: &str) -> Result<Vec<BitString>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}
