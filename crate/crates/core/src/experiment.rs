//! Monte Carlo experiments over the full pipeline
//! `w -> erasure encode -> nested VT encode -> chop+shuffle -> reassemble -> strip -> erasure decode`.
//!
//! Every trial derives its own seed from `(master_seed, trial_index)`, so
//! results do not depend on the number of worker threads. CSV output starts
//! with a `# schema:` comment line followed by a header row.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::bits::BitString;
use crate::channel::{alpha_to_p, chop_and_shuffle, stream_rng, ChannelParams, FragmentSet};
use crate::codec::{encode_nested, ResidueScheme};
use crate::erasure::{ec_decode, ec_encode, ErasureConfig};
use crate::error::{invalid, Error, Result};
use crate::layout::LayerSpec;
use crate::reassembly::{brute_force_extensions, decode_search, Collect, Recovery, SearchConfig};

const STREAM_PAYLOAD: u64 = 4;

/// Mixes a master seed and a trial index into a per-trial seed (splitmix64 finalizer).
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    let mut z = master_seed ^ trial_index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_bits(len: usize, seed: u64) -> BitString {
    let mut rng = stream_rng(seed, STREAM_PAYLOAD);
    BitString::from_bits_unchecked((0..len).map(|_| rng.gen_range(0..2u8)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialClass {
    /// Unique decode equal to the transmitted data.
    Success,
    /// Unique decode that differs from the transmitted data.
    Error,
    /// Timeout or no solution.
    Unresolved,
    /// Ambiguous decode repaired by the erasure code.
    ErasureResolved,
    /// Ambiguous decode the erasure code could not repair, or repaired wrongly.
    ErasureFailed,
}

impl TrialClass {
    pub fn name(self) -> &'static str {
        match self {
            TrialClass::Success => "success",
            TrialClass::Error => "error",
            TrialClass::Unresolved => "unresolved",
            TrialClass::ErasureResolved => "erasure_resolved",
            TrialClass::ErasureFailed => "erasure_failed",
        }
    }

    /// Counted against the error rate.
    pub fn is_error(self) -> bool {
        matches!(self, TrialClass::Error | TrialClass::ErasureFailed)
    }
}

/// Everything a single trial needs besides its seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialConfig {
    pub spec: LayerSpec,
    pub alpha: f64,
    pub epsilon: f64,
    pub search: SearchConfig,
}

impl TrialConfig {
    /// Erasure code sized to fill the nested data word. The generator is
    /// shared by all trials of an experiment.
    pub fn erasure(&self, master_seed: u64) -> Result<ErasureConfig> {
        ErasureConfig::for_code_length(self.spec.data_len(), self.epsilon, master_seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub alpha: f64,
    pub p_break: f64,
    pub d_sec: usize,
    pub m: usize,
    pub ell: usize,
    pub scheme: String,
    pub fragments: usize,
    pub outcome: TrialClass,
    /// Number of erased data positions for ambiguous decodes.
    pub erasures: usize,
    /// Whether elimination reached full rank (ambiguous decodes only).
    pub erasure_full_rank: Option<bool>,
    /// Distinct full-length words the decoder found.
    pub solutions: usize,
    pub budget_exhausted: bool,
    pub iterations: u64,
    pub tau_final: usize,
    pub wall_time_ms: f64,
}

/// Runs one trial of the full pipeline; deterministic per `(master_seed, trial_index)`.
pub fn run_trial(master_seed: u64, trial_index: u64, config: &TrialConfig) -> Result<TrialRecord> {
    let ec = config.erasure(master_seed)?;
    let seed = trial_seed(master_seed, trial_index);
    let w = random_bits(ec.k, seed);
    let n = config.spec.codeword_len();
    let p_break = alpha_to_p(config.alpha, n)?;
    let d = ec_encode(&w, &ec)?;
    let x = encode_nested(&d, &config.spec)?;
    let fragments = chop_and_shuffle(&x, &ChannelParams::new(p_break, seed)?)?;
    let mut record = replay(&w, &fragments, config, &ec)?;
    record.trial_index = trial_index;
    record.seed = seed;
    record.p_break = p_break;
    Ok(record)
}

/// Decodes a given fragment set and classifies it against the payload `w`.
pub fn replay_trial(w: &BitString, fragments: &FragmentSet, config: &TrialConfig, master_seed: u64) -> Result<TrialRecord> {
    let ec = config.erasure(master_seed)?;
    replay(w, fragments, config, &ec)
}

fn replay(w: &BitString, fragments: &FragmentSet, config: &TrialConfig, ec: &ErasureConfig) -> Result<TrialRecord> {
    if w.len() != ec.k {
        return Err(Error::LengthMismatch {
            expected: ec.k,
            actual: w.len(),
        });
    }
    let d_true = ec_encode(w, ec)?;
    let started = Instant::now();
    let outcome = decode_search(fragments, &config.spec, &config.search)?;
    let mut erasures = 0;
    let mut erasure_full_rank = None;
    let class = match &outcome.recovery {
        Recovery::Unique(d) if *d == d_true => TrialClass::Success,
        Recovery::Unique(_) => TrialClass::Error,
        Recovery::Timeout | Recovery::NoSolution => TrialClass::Unresolved,
        Recovery::Ambiguous(d_hat) => {
            erasures = d_hat.erasure_count();
            match ec_decode(d_hat, ec) {
                Ok(w_hat) => {
                    erasure_full_rank = Some(true);
                    if w_hat == *w {
                        TrialClass::ErasureResolved
                    } else {
                        TrialClass::ErasureFailed
                    }
                }
                Err(e) => {
                    erasure_full_rank = Some(!matches!(e, Error::UnrecoverableErasures { .. }));
                    TrialClass::ErasureFailed
                }
            }
        }
    };
    let spec = config.spec;
    Ok(TrialRecord {
        trial_index: 0,
        seed: 0,
        alpha: config.alpha,
        p_break: alpha_to_p(config.alpha, spec.codeword_len())?,
        d_sec: spec.d_sec,
        m: spec.m,
        ell: spec.ell,
        scheme: spec.scheme.to_string(),
        fragments: fragments.len(),
        outcome: class,
        erasures,
        erasure_full_rank,
        solutions: outcome.solutions.len(),
        budget_exhausted: outcome.stats.budget_exhausted,
        iterations: outcome.stats.iterations,
        tau_final: outcome.stats.tau_final,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs trials `0..trials` in parallel; records come back in trial order.
pub fn run_trials(master_seed: u64, trials: u64, config: &TrialConfig) -> Result<Vec<TrialRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(master_seed, i, config))
        .collect()
}

fn fixed<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.6}"))
}

/// Counts per outcome class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub success: u64,
    pub error: u64,
    pub unresolved: u64,
    pub erasure_resolved: u64,
    pub erasure_failed: u64,
}

impl ClassCounts {
    pub fn tally(records: &[TrialRecord]) -> Self {
        let mut c = Self::default();
        for r in records {
            match r.outcome {
                TrialClass::Success => c.success += 1,
                TrialClass::Error => c.error += 1,
                TrialClass::Unresolved => c.unresolved += 1,
                TrialClass::ErasureResolved => c.erasure_resolved += 1,
                TrialClass::ErasureFailed => c.erasure_failed += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.success + self.error + self.unresolved + self.erasure_resolved + self.erasure_failed
    }

    pub fn errors(&self) -> u64 {
        self.error + self.erasure_failed
    }
}

fn rate(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaRow {
    #[serde(serialize_with = "fixed")]
    pub alpha: f64,
    #[serde(serialize_with = "fixed")]
    pub p_break: f64,
    pub trials: u64,
    pub success: u64,
    pub error: u64,
    pub unresolved: u64,
    pub erasure_resolved: u64,
    pub erasure_failed: u64,
    #[serde(serialize_with = "fixed")]
    pub error_rate: f64,
    #[serde(serialize_with = "fixed")]
    pub unresolved_rate: f64,
    #[serde(serialize_with = "fixed")]
    pub mean_iterations: f64,
    #[serde(serialize_with = "fixed")]
    pub mean_fragments: f64,
}

pub const ALPHA_HEADER: &[&str] = &[
    "alpha",
    "p_break",
    "trials",
    "success",
    "error",
    "unresolved",
    "erasure_resolved",
    "erasure_failed",
    "error_rate",
    "unresolved_rate",
    "mean_iterations",
    "mean_fragments",
];

pub fn experiment_error_vs_alpha(alphas: &[f64], base: &TrialConfig, trials: u64, master_seed: u64) -> Result<Vec<AlphaRow>> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    alphas
        .iter()
        .map(|&alpha| {
            let config = TrialConfig { alpha, ..*base };
            let records = run_trials(master_seed, trials, &config)?;
            let c = ClassCounts::tally(&records);
            let t = records.len() as f64;
            Ok(AlphaRow {
                alpha,
                p_break: alpha_to_p(alpha, base.spec.codeword_len())?,
                trials,
                success: c.success,
                error: c.error,
                unresolved: c.unresolved,
                erasure_resolved: c.erasure_resolved,
                erasure_failed: c.erasure_failed,
                error_rate: rate(c.errors(), trials),
                unresolved_rate: rate(c.unresolved, trials),
                mean_iterations: records.iter().map(|r| r.iterations as f64).sum::<f64>() / t,
                mean_fragments: records.iter().map(|r| r.fragments as f64).sum::<f64>() / t,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeRow {
    pub scheme: String,
    pub trials: u64,
    pub errors: u64,
    pub unresolved: u64,
    #[serde(serialize_with = "fixed")]
    pub error_rate: f64,
    #[serde(serialize_with = "fixed")]
    pub error_ci_low: f64,
    #[serde(serialize_with = "fixed")]
    pub error_ci_high: f64,
    #[serde(serialize_with = "fixed")]
    pub unresolved_rate: f64,
    #[serde(serialize_with = "fixed")]
    pub mean_iterations: f64,
}

pub const SCHEME_HEADER: &[&str] = &[
    "scheme",
    "trials",
    "errors",
    "unresolved",
    "error_rate",
    "error_ci_low",
    "error_ci_high",
    "unresolved_rate",
    "mean_iterations",
];

/// Same seeds for every scheme, so each one sees the same payloads and cuts.
pub fn experiment_residue_schemes(
    schemes: &[ResidueScheme],
    base: &TrialConfig,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<SchemeRow>> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    schemes
        .iter()
        .map(|&scheme| {
            let spec = LayerSpec::with_scheme(base.spec.d_sec, base.spec.m, base.spec.ell, scheme)?;
            let config = TrialConfig { spec, ..*base };
            let records = run_trials(master_seed, trials, &config)?;
            let c = ClassCounts::tally(&records);
            let (lo, hi) = wilson_interval(c.errors(), trials, 1.959_963_984_540_054);
            Ok(SchemeRow {
                scheme: scheme.to_string(),
                trials,
                errors: c.errors(),
                unresolved: c.unresolved,
                error_rate: rate(c.errors(), trials),
                error_ci_low: lo,
                error_ci_high: hi,
                unresolved_rate: rate(c.unresolved, trials),
                mean_iterations: records.iter().map(|r| r.iterations as f64).sum::<f64>() / trials as f64,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub trial_index: u64,
    pub fragments: usize,
    pub iterations: u64,
    pub brute_force: u128,
    #[serde(serialize_with = "fixed")]
    pub ratio: f64,
    pub solved: bool,
}

pub const COMPLEXITY_HEADER: &[&str] = &["trial_index", "fragments", "iterations", "brute_force", "ratio", "solved"];

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityReport {
    pub rows: Vec<ComplexityRow>,
    /// Trials outside the fragment-count window.
    pub excluded: u64,
}

impl ComplexityReport {
    pub fn median_ratio(&self) -> Option<f64> {
        let mut ratios: Vec<f64> = self.rows.iter().filter(|r| r.solved).map(|r| r.ratio).collect();
        if ratios.is_empty() {
            return None;
        }
        ratios.sort_by(f64::total_cmp);
        let mid = ratios.len() / 2;
        Some(if ratios.len() % 2 == 1 {
            ratios[mid]
        } else {
            (ratios[mid - 1] + ratios[mid]) / 2.0
        })
    }
}

/// Decoder extension count against the brute-force count `sum_k M!/(M-k)!`.
/// Decodes stop at the first full-length word; trials whose fragment count
/// falls outside `min_fragments..=ceiling` are excluded.
pub fn experiment_complexity(
    spec: &LayerSpec,
    alpha: f64,
    trials: u64,
    min_fragments: usize,
    ceiling: usize,
    master_seed: u64,
) -> Result<ComplexityReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let n = spec.codeword_len();
    let p_break = alpha_to_p(alpha, n)?;
    let search = SearchConfig {
        tau: 1,
        delta: u64::MAX,
        collect: Collect::First,
        time_limit: None,
    };
    let rows: Vec<Option<ComplexityRow>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(master_seed, i);
            let d = random_bits(spec.data_len(), seed);
            let x = encode_nested(&d, spec)?;
            let fragments = chop_and_shuffle(&x, &ChannelParams::new(p_break, seed)?)?;
            let m = fragments.len();
            if m < min_fragments || m > ceiling {
                return Ok(None);
            }
            let outcome = decode_search(&fragments, spec, &search)?;
            let brute_force = brute_force_extensions(m);
            Ok(Some(ComplexityRow {
                trial_index: i,
                fragments: m,
                iterations: outcome.stats.iterations,
                brute_force,
                ratio: outcome.stats.iterations as f64 / brute_force as f64,
                solved: !outcome.solutions.is_empty(),
            }))
        })
        .collect::<Result<_>>()?;
    let excluded = rows.iter().filter(|r| r.is_none()).count() as u64;
    Ok(ComplexityReport {
        rows: rows.into_iter().flatten().collect(),
        excluded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub d_sec: usize,
    pub m: usize,
    pub ell: usize,
    pub n: usize,
    #[serde(serialize_with = "fixed")]
    pub log2_n: f64,
    #[serde(serialize_with = "fixed")]
    pub lower: f64,
    #[serde(serialize_with = "fixed")]
    pub rate: f64,
    #[serde(serialize_with = "fixed")]
    pub upper: f64,
}

pub const RATE_HEADER: &[&str] = &["d_sec", "m", "ell", "n", "log2_n", "lower", "rate", "upper"];

pub fn rate_row(spec: &LayerSpec) -> RateRow {
    let b = spec.rate_bounds();
    let n = spec.codeword_len();
    RateRow {
        d_sec: spec.d_sec,
        m: spec.m,
        ell: spec.ell,
        n,
        log2_n: (n as f64).log2(),
        lower: b.lower,
        rate: b.rate,
        upper: b.upper,
    }
}

/// Three-layer sweep: point `j` uses `d_sec = 36 (j + 1)` and `m = 2 + j / 4`,
/// keeping points with `9 <= log2 n < 17`.
pub fn rate_sweep() -> Result<Vec<RateRow>> {
    let mut rows = Vec::new();
    for j in 0.. {
        let spec = LayerSpec::new(36 * (j + 1), 2 + j / 4, 3)?;
        let log2_n = (spec.codeword_len() as f64).log2();
        if log2_n >= 17.0 {
            break;
        }
        if log2_n >= 9.0 {
            rows.push(rate_row(&spec));
        }
    }
    Ok(rows)
}

/// Writes `# schema: nested-vt/<name> v1`, the header, then one line per row.
pub fn write_csv<W: Write, T: Serialize>(out: W, name: &str, header: &[&str], rows: &[T]) -> Result<()> {
    let mut out = out;
    writeln!(out, "# schema: nested-vt/{name} v1")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<T: Serialize>(name: &str, header: &[&str], rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, name, header, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
