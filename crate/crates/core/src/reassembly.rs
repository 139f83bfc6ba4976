//! Reassembly of shuffled fragments into a nested VT codeword.
//!
//! The decoder grows *candidate combinations*: ordered concatenations of
//! fragments whose every inner VT condition that ends inside the prefix is
//! met. Starting from the empty candidate, each round extends every live
//! candidate by every unused fragment that keeps it a candidate. Every `tau`
//! rounds the pool is cut down to the candidates covering the most
//! conditions. When a pass runs dry after such a cut without producing a
//! full-length word, `tau` grows by one and the search restarts from scratch.
//!
//! The work budget `delta` counts extension attempts, so results do not
//! depend on machine speed. An optional wall-clock cap can be layered on top.
//!
//! Fragments with identical content are interchangeable: the search tries
//! one representative per content class and deduplicates states on
//! (assembled bits, multiset of used classes).

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, Symbol, TernaryString};
use crate::channel::{Fragment, FragmentSet};
use crate::codec::{strip_nested_bits, ConditionSet};
use crate::error::{invalid, Error, Result};
use crate::layout::LayerSpec;
use crate::vt::syndrome_of;

/// Largest fragment count the brute-force oracle accepts by default.
pub const DEFAULT_ORACLE_CEILING: usize = 9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collect {
    /// Stop at the first full-length candidate.
    First,
    /// Keep searching until the space is exhausted or the budget runs out.
    #[default]
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Initial limited-memory period.
    pub tau: usize,
    /// Budget in extension attempts.
    pub delta: u64,
    pub collect: Collect,
    pub time_limit: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            tau: 1,
            delta: 1_000_000,
            collect: Collect::All,
            time_limit: None,
        }
    }
}

impl SearchConfig {
    pub fn new(tau: usize, delta: u64, collect: Collect) -> Result<Self> {
        if tau == 0 {
            return Err(invalid("tau must be at least 1"));
        }
        if delta == 0 {
            return Err(invalid("delta must be at least 1"));
        }
        Ok(Self {
            tau,
            delta,
            collect,
            time_limit: None,
        })
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

/// A prefix assembled from fragments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub bits: BitString,
    /// Fragment labels in placement order.
    pub used_ids: Vec<usize>,
    pub gamma: usize,
    /// Number of VT conditions whose span ends within the prefix.
    pub satisfied: usize,
}

impl Candidate {
    pub fn empty() -> Self {
        Self {
            bits: BitString::new(),
            used_ids: Vec::new(),
            gamma: 0,
            satisfied: 0,
        }
    }

    /// Appends `fragment` if that keeps this a candidate.
    pub fn extend(&self, fragment: &Fragment, conditions: &ConditionSet) -> Option<Candidate> {
        if !is_helpful(self, fragment, conditions) {
            return None;
        }
        let mut bits = self.bits.clone();
        bits.extend_from(&fragment.bits);
        let gamma = bits.len();
        let mut used_ids = self.used_ids.clone();
        used_ids.push(fragment.id);
        Some(Candidate {
            bits,
            used_ids,
            gamma,
            satisfied: conditions.covered(gamma),
        })
    }
}

/// Whether appending `fragment` to `candidate` yields another candidate.
pub fn is_helpful(candidate: &Candidate, fragment: &Fragment, conditions: &ConditionSet) -> bool {
    let new_gamma = candidate.gamma + fragment.len();
    if candidate.used_ids.contains(&fragment.id) || new_gamma > conditions.codeword_len() {
        return false;
    }
    let mut bits = candidate.bits.as_slice().to_vec();
    bits.extend_from_slice(fragment.bits.as_slice());
    conditions.check_range(&bits, candidate.gamma, new_gamma)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Extension attempts, summed over all passes.
    pub iterations: u64,
    /// Extensions that produced a candidate.
    pub candidates_explored: u64,
    pub restarts: u32,
    pub tau_final: usize,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recovery {
    /// Every full-length word found strips to the same data.
    Unique(BitString),
    /// Several data words; disagreeing positions are erased.
    Ambiguous(TernaryString),
    /// Budget spent before any full-length word appeared.
    Timeout,
    /// The search space was exhausted without a full-length word.
    NoSolution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub recovery: Recovery,
    /// Distinct full-length words, in discovery order.
    pub solutions: Vec<BitString>,
    pub stats: SearchStats,
}

impl DecodeOutcome {
    pub fn kind(&self) -> &'static str {
        match self.recovery {
            Recovery::Unique(_) => "unique",
            Recovery::Ambiguous(_) => "ambiguous",
            Recovery::Timeout => "timeout",
            Recovery::NoSolution => "no_solution",
        }
    }

    /// Recovered data as a ternary string, if any word was found.
    pub fn data(&self) -> Option<TernaryString> {
        match &self.recovery {
            Recovery::Unique(d) => Some(TernaryString::from(d)),
            Recovery::Ambiguous(d) => Some(d.clone()),
            _ => None,
        }
    }
}

struct ContentClass {
    bits: BitString,
    ids: Vec<usize>,
}

fn content_classes(fragments: &FragmentSet) -> Vec<ContentClass> {
    let mut classes: Vec<ContentClass> = Vec::new();
    for f in fragments.iter() {
        match classes.iter_mut().find(|c| c.bits == f.bits) {
            Some(c) => c.ids.push(f.id),
            None => classes.push(ContentClass {
                bits: f.bits.clone(),
                ids: vec![f.id],
            }),
        }
    }
    classes
}

#[derive(Clone)]
struct Node {
    bits: Vec<u8>,
    used: Vec<u16>,
    satisfied: usize,
}

enum Stop {
    Exhausted,
    FirstFound,
    Budget,
}

/// Searches for orderings of `fragments` that satisfy every VT condition of `spec`.
pub fn decode_search(fragments: &FragmentSet, spec: &LayerSpec, config: &SearchConfig) -> Result<DecodeOutcome> {
    let n = spec.codeword_len();
    if fragments.is_empty() {
        return Err(invalid("no fragments to decode"));
    }
    if fragments.total_len() != n {
        return Err(invalid(format!(
            "fragments hold {} bits but the codeword has {n}",
            fragments.total_len()
        )));
    }
    if config.tau == 0 || config.delta == 0 {
        return Err(invalid("tau and delta must be at least 1"));
    }

    let conditions = ConditionSet::for_spec(spec);
    let classes = content_classes(fragments);
    let started = Instant::now();

    let mut stats = SearchStats {
        tau_final: config.tau,
        ..SearchStats::default()
    };
    let mut solutions: Vec<BitString> = Vec::new();
    let mut seen_solutions: HashSet<Vec<u8>> = HashSet::new();
    let mut tau = config.tau;
    let mut scratch: Vec<u8> = Vec::with_capacity(n);

    // Rounds before the first prune are identical in consecutive passes, so
    // each pass keeps its unpruned pool at that point and the next pass
    // resumes from it instead of recomputing it.
    let mut resume: Option<Vec<Node>> = None;

    let stop = 'passes: loop {
        stats.tau_final = tau;
        let (mut live, mut rounds_since_prune) = match resume.take() {
            Some(pool) => (pool, tau - 1),
            None => (
                vec![Node {
                    bits: Vec::new(),
                    used: vec![0; classes.len()],
                    satisfied: 0,
                }],
                0,
            ),
        };
        let mut first_prune = true;
        let mut pruned_any = false;

        while !live.is_empty() {
            let mut next: Vec<Node> = Vec::new();
            let mut keys: HashSet<(Vec<u8>, Vec<u16>)> = HashSet::new();

            for node in &live {
                for (c, class) in classes.iter().enumerate() {
                    if node.used[c] as usize == class.ids.len() {
                        continue;
                    }
                    if stats.iterations >= config.delta {
                        break 'passes Stop::Budget;
                    }
                    if let Some(limit) = config.time_limit {
                        if stats.iterations % 1024 == 0 && started.elapsed() > limit {
                            break 'passes Stop::Budget;
                        }
                    }
                    stats.iterations += 1;

                    let gamma = node.bits.len();
                    scratch.clear();
                    scratch.extend_from_slice(&node.bits);
                    scratch.extend_from_slice(class.bits.as_slice());
                    let new_gamma = scratch.len();
                    if !conditions.check_range(&scratch, gamma, new_gamma) {
                        continue;
                    }
                    stats.candidates_explored += 1;

                    if new_gamma == n {
                        if seen_solutions.insert(scratch.clone()) {
                            solutions.push(BitString::from_bits_unchecked(scratch.clone()));
                        }
                        if config.collect == Collect::First {
                            break 'passes Stop::FirstFound;
                        }
                        continue;
                    }

                    let mut used = node.used.clone();
                    used[c] += 1;
                    if keys.insert((scratch.clone(), used.clone())) {
                        next.push(Node {
                            bits: scratch.clone(),
                            used,
                            satisfied: conditions.covered(new_gamma),
                        });
                    }
                }
            }

            rounds_since_prune += 1;
            if rounds_since_prune >= tau {
                rounds_since_prune = 0;
                if first_prune {
                    first_prune = false;
                    resume = Some(next.clone());
                }
                if let Some(best) = next.iter().map(|n| n.satisfied).max() {
                    let before = next.len();
                    next.retain(|n| n.satisfied == best);
                    pruned_any |= next.len() < before;
                }
            }
            live = next;
        }

        if pruned_any {
            tau += 1;
            stats.restarts += 1;
            continue;
        }
        break Stop::Exhausted;
    };

    stats.budget_exhausted = matches!(stop, Stop::Budget);
    let recovery = if solutions.is_empty() {
        match stop {
            Stop::Budget => Recovery::Timeout,
            _ => Recovery::NoSolution,
        }
    } else {
        summarize(&solutions, spec)?
    };
    Ok(DecodeOutcome {
        recovery,
        solutions,
        stats,
    })
}

fn summarize(solutions: &[BitString], spec: &LayerSpec) -> Result<Recovery> {
    let data: Vec<BitString> = solutions
        .iter()
        .map(|x| strip_nested_bits(x, spec))
        .collect::<Result<_>>()?;
    if data.iter().all_equal() {
        return Ok(Recovery::Unique(data.into_iter().next().expect("non-empty")));
    }
    overlap(&data).map(Recovery::Ambiguous)
}

/// Position-wise agreement of equal-length strings; disagreements become `E`.
pub fn overlap(candidates: &[BitString]) -> Result<TernaryString> {
    let first = candidates.first().ok_or_else(|| invalid("overlap of an empty list"))?;
    if let Some(bad) = candidates.iter().find(|c| c.len() != first.len()) {
        return Err(Error::LengthMismatch {
            expected: first.len(),
            actual: bad.len(),
        });
    }
    let symbols = (0..first.len())
        .map(|i| {
            let b = first.as_slice()[i];
            if candidates.iter().all(|c| c.as_slice()[i] == b) {
                Symbol::from_bit(b)
            } else {
                Symbol::Erased
            }
        })
        .collect();
    Ok(TernaryString::new(symbols))
}

/// Every distinct concatenation of all fragments (in any order) that
/// satisfies every VT condition. Conditions are re-derived from the position
/// matrix and checked on the complete word.
pub fn brute_force_oracle(fragments: &FragmentSet, spec: &LayerSpec, ceiling: usize) -> Result<BTreeSet<BitString>> {
    let m = fragments.len();
    if m > ceiling {
        return Err(Error::OracleCeiling { fragments: m, ceiling });
    }
    let n = spec.codeword_len();
    if fragments.total_len() != n {
        return Err(invalid("fragment lengths do not add up to the codeword length"));
    }
    let matrix = spec.position_matrix();
    let lens = matrix.layer_lengths().to_vec();
    let satisfies_all = |word: &[u8]| {
        (1..=spec.ell).all(|l| {
            matrix.row(l).iter().enumerate().all(|(i0, &end)| {
                let start = end - lens[l - 1];
                syndrome_of(&word[start..end]) == spec.scheme.residue_for(l, i0 + 1, lens[l - 1])
            })
        })
    };

    let pieces: Vec<&Fragment> = fragments.iter().collect();
    let mut found = BTreeSet::new();
    for order in (0..m).permutations(m) {
        let word: Vec<u8> = order
            .iter()
            .flat_map(|&j| pieces[j].bits.iter())
            .collect();
        if satisfies_all(&word) {
            found.insert(BitString::from_bits_unchecked(word));
        }
    }
    Ok(found)
}

/// Extension count of a brute-force prefix search over `m` fragments,
/// `sum_{k=1..m} m! / (m-k)!`.
pub fn brute_force_extensions(m: usize) -> u128 {
    let mut total = 0u128;
    let mut falling = 1u128;
    for k in 0..m {
        falling *= (m - k) as u128;
        total += falling;
    }
    total
}

/// How a decode result compares with the transmitted data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Success,
    /// Ambiguous output; left to the erasure layer.
    Deferred,
    /// An output was produced and it is wrong.
    Error,
    /// Timeout or no solution.
    Unresolved,
}

pub fn declare_error(outcome: &DecodeOutcome, d_true: &BitString) -> Verdict {
    match &outcome.recovery {
        Recovery::Unique(d) if d == d_true => Verdict::Success,
        Recovery::Unique(_) => Verdict::Error,
        Recovery::Ambiguous(_) => Verdict::Deferred,
        Recovery::Timeout | Recovery::NoSolution => Verdict::Unresolved,
    }
}
