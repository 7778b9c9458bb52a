//! Verification harness: brute-force oracle and fault-injection campaigns.
//!
//! [`oracle_decode`] enumerates every error vector up to a weight bound and
//! keeps those matching a syndrome. It is deliberately naive — it is the
//! ground truth the algebraic decoders are measured against, so it must not
//! share any code path with them.
//!
//! [`run_campaign`] drives seeded Monte Carlo fault injection: encode a
//! random stripe, inject per the error model, decode, classify against the
//! injected truth. Value sampling is a counter-based generator keyed by
//! `(seed, trial, stream, draw)`, so trials are independent and campaigns
//! are bit-reproducible at any thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beyond::recover_three_failed;
use crate::code::{build_code, AlphaPolicy, CodeParams, Stripe, Syndrome};
use crate::galois::{count_ops, Element, FieldSpec, FieldTables, OpCounts};
use crate::mindist::{decode_combined, decode_syndrome};
use crate::types::{subsets, DecodeOutcome, ErasureSet, ErrorVector, PARITY_COUNT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaultlabError {
    #[error("oracle search space too large: about {estimate} candidates (limit {limit})")]
    Infeasible { estimate: u128, limit: u128 },
    #[error("invalid trial spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Field(#[from] crate::galois::GaloisError),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
}

/// Enumerate all error vectors `e` with `weight(e) <= max_weight` and
/// `H.e = s`, by exhaustive search over supports and values.
///
/// Refuses parameter combinations whose candidate count exceeds 10^8. For
/// `max_weight <= 2` the result has at most one element (distance 5).
pub fn oracle_decode(
    params: &CodeParams,
    s: &Syndrome,
    max_weight: usize,
) -> Result<Vec<ErrorVector>, FaultlabError> {
    let n = params.n();
    let q1 = (params.field().size() - 1) as u128;
    let limit: u128 = 100_000_000;
    let mut binom: u128 = 1;
    for w in 1..=max_weight as u128 {
        binom = binom * (n as u128 - w + 1) / w;
    }
    let estimate = binom.saturating_mul(q1.pow(max_weight as u32));
    if estimate > limit {
        return Err(FaultlabError::Infeasible { estimate, limit });
    }

    let f = params.field();
    let positions: Vec<usize> = (0..n).collect();
    let mut matches = Vec::new();

    for w in 0..=max_weight {
        for support in subsets(&positions, w) {
            let cols: Vec<[Element; PARITY_COUNT]> =
                support.iter().map(|&p| params.h_column(p)).collect();
            // Odometer over nonzero values at each support position.
            let mut values = vec![1u32; w];
            loop {
                let mut acc = [Element::ZERO; PARITY_COUNT];
                for (col, &v) in cols.iter().zip(values.iter()) {
                    let value = Element(v as u16);
                    for (a, c) in acc.iter_mut().zip(col.iter()) {
                        *a = f.add(*a, f.mul(*c, value));
                    }
                }
                if Syndrome(acc) == *s {
                    matches.push(ErrorVector::from_entries(
                        support
                            .iter()
                            .zip(values.iter())
                            .map(|(&p, &v)| (p, Element(v as u16))),
                    ));
                }
                if w == 0 {
                    break;
                }
                // Advance the odometer; stop when it wraps fully.
                let mut pos = w;
                let mut done = false;
                loop {
                    if pos == 0 {
                        done = true;
                        break;
                    }
                    pos -= 1;
                    values[pos] += 1;
                    if values[pos] <= q1 as u32 {
                        break;
                    }
                    values[pos] = 1;
                }
                if done {
                    break;
                }
            }
        }
    }
    Ok(matches)
}

// ============================================================================
// Deterministic counter-based sampling
// ============================================================================

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Deterministic draw keyed by (seed, trial, stream, draw counter).
fn sample(seed: u64, trial: u64, stream: u64, draw: u64) -> u64 {
    let mut x = splitmix64(seed ^ splitmix64(trial));
    x = splitmix64(x ^ splitmix64(stream.wrapping_mul(0xA076_1D64_78BD_642F)));
    splitmix64(x ^ draw)
}

fn sample_below(seed: u64, trial: u64, stream: u64, draw: u64, n: u64) -> u64 {
    ((sample(seed, trial, stream, draw) as u128 * n as u128) >> 64) as u64
}

fn distinct_positions(
    seed: u64,
    trial: u64,
    stream: u64,
    count: usize,
    n: usize,
    exclude: &[usize],
) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(count);
    let mut draw = 0u64;
    while out.len() < count {
        let p = sample_below(seed, trial, stream, draw, n as u64) as usize;
        draw += 1;
        if !out.contains(&p) && !exclude.contains(&p) {
            out.push(p);
        }
    }
    out
}

// ============================================================================
// Trial specification and campaign report
// ============================================================================

/// How error values are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ValueModel {
    /// Uniform nonzero values at uniformly drawn distinct positions.
    #[default]
    Uniform,
    /// Each trial injects a random codeword difference of weight 5 (any
    /// five data columns are dependent). These have zero syndrome by
    /// construction, so they model silent corruption; `weight_dist` is
    /// ignored.
    CodewordDifference,
}

/// Error model: weight distribution, erasure count, value distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Relative weights for drawing the injected error weight 0..=5.
    pub weight_dist: [u32; 6],
    /// Known erasures injected per trial (positions zero-filled).
    #[serde(default)]
    pub erasures: usize,
    #[serde(default)]
    pub values: ValueModel,
}

/// A reproducible campaign: field, code size, error model, trials, seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSpec {
    #[serde(default = "schema_version")]
    pub version: u32,
    pub m: u32,
    /// Primitive polynomial; defaults to the built-in one for `m`.
    #[serde(default)]
    pub poly: Option<u32>,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub model: ErrorModel,
    /// Run the 3-failure list decoder on uncorrectable stripes and report
    /// how often the injected truth appears in the list.
    #[serde(default)]
    pub list_decoding: bool,
}

fn schema_version() -> u32 {
    1
}

/// Field-op totals in serializable form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpTotals {
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
    pub lookups: u64,
}

impl From<OpCounts> for OpTotals {
    fn from(c: OpCounts) -> Self {
        OpTotals {
            adds: c.adds,
            muls: c.muls,
            divs: c.divs,
            lookups: c.lookups,
        }
    }
}

impl OpTotals {
    fn accumulate(&mut self, other: OpCounts) {
        self.adds += other.adds;
        self.muls += other.muls;
        self.divs += other.divs;
        self.lookups += other.lookups;
    }

    fn merge(&mut self, other: &OpTotals) {
        self.adds += other.adds;
        self.muls += other.muls;
        self.divs += other.divs;
        self.lookups += other.lookups;
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.divs + self.lookups
    }
}

/// Outcome tallies; they always sum to the trial count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub clean: u64,
    pub corrected_exact: u64,
    pub miscorrected: u64,
    pub detected_uncorrectable: u64,
    pub silent: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.clean
            + self.corrected_exact
            + self.miscorrected
            + self.detected_uncorrectable
            + self.silent
    }
}

/// Truth-in-list statistics for list-decoded stripes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListStats {
    pub attempts: u64,
    pub hits: u64,
}

/// Aggregated result of a campaign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub version: u32,
    pub trials: u64,
    pub counts: OutcomeCounts,
    /// Correction classification -> count, over corrected trials.
    pub by_classification: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_in_list: Option<ListStats>,
    /// Field ops spent in the O(k) syndrome kernel, summed over trials.
    pub syndrome_ops: OpTotals,
    /// Field ops spent after the syndrome (localization and solving).
    pub decode_ops: OpTotals,
    pub decode_ops_min: u64,
    pub decode_ops_max: u64,
}

#[derive(Debug, Clone, Default)]
struct TrialTally {
    counts: OutcomeCounts,
    by_classification: BTreeMap<String, u64>,
    list: ListStats,
    syndrome_ops: OpTotals,
    decode_ops: OpTotals,
    decode_min: u64,
    decode_max: u64,
}

impl TrialTally {
    fn merge(mut self, other: TrialTally) -> TrialTally {
        self.counts.clean += other.counts.clean;
        self.counts.corrected_exact += other.counts.corrected_exact;
        self.counts.miscorrected += other.counts.miscorrected;
        self.counts.detected_uncorrectable += other.counts.detected_uncorrectable;
        self.counts.silent += other.counts.silent;
        for (key, v) in other.by_classification {
            *self.by_classification.entry(key).or_insert(0) += v;
        }
        self.list.attempts += other.list.attempts;
        self.list.hits += other.list.hits;
        self.syndrome_ops.merge(&other.syndrome_ops);
        self.decode_ops.merge(&other.decode_ops);
        self.decode_min = self.decode_min.min(other.decode_min);
        self.decode_max = self.decode_max.max(other.decode_max);
        self
    }
}

// Sampling streams; disjoint by construction.
const STREAM_DATA: u64 = 0;
const STREAM_ERASURE: u64 = 1;
const STREAM_WEIGHT: u64 = 2;
const STREAM_ERR_POS: u64 = 3;
const STREAM_ERR_VAL: u64 = 4;
const STREAM_CW_SCALE: u64 = 5;

fn draw_weight(spec: &TrialSpec, trial: u64) -> usize {
    let total: u64 = spec.model.weight_dist.iter().map(|&w| w as u64).sum();
    let mut ticket = sample_below(spec.seed, trial, STREAM_WEIGHT, 0, total);
    for (w, &mass) in spec.model.weight_dist.iter().enumerate() {
        if ticket < mass as u64 {
            return w;
        }
        ticket -= mass as u64;
    }
    unreachable!()
}

/// Build a random weight-5 codeword difference supported on data drives:
/// any five data columns are dependent (row 5 of P is row 2 plus row 3),
/// and the dependency has all coefficients nonzero.
fn codeword_difference(params: &CodeParams, spec: &TrialSpec, trial: u64) -> ErrorVector {
    let f = params.field();
    let support = distinct_positions(spec.seed, trial, STREAM_ERR_POS, 5, params.k(), &[]);
    let scale = Element(
        (1 + sample_below(
            spec.seed,
            trial,
            STREAM_CW_SCALE,
            0,
            (f.size() - 1) as u64,
        )) as u16,
    );
    // Solve the Vandermonde rows for the first four coefficients given a
    // free scale on the fifth column; row 5 is then zero automatically.
    let rows: Vec<usize> = (0..4).collect();
    let cols: Vec<usize> = support[..4].to_vec();
    let m = params.parity_submatrix(&rows, &cols);
    let last = params.h_column(support[4]);
    let rhs: Vec<Element> = (0..4).map(|r| f.mul(scale, last[r])).collect();
    let lambda = m
        .solve(f, &rhs)
        .expect("Vandermonde rows over distinct locators are nonsingular");
    let mut e = ErrorVector::new();
    for (&p, &v) in cols.iter().zip(lambda.iter()) {
        e.set(p, v);
    }
    e.set(support[4], scale);
    debug_assert!(e.syndrome(params).is_zero());
    e
}

fn run_trial(params: &CodeParams, spec: &TrialSpec, trial: u64) -> TrialTally {
    let f = params.field();
    let k = params.k();
    let n = params.n();
    let q = f.size() as u64;

    let data: Vec<Element> = (0..k)
        .map(|i| Element(sample_below(spec.seed, trial, STREAM_DATA, i as u64, q) as u16))
        .collect();
    let transmitted = params.encode(&data).expect("data length matches k");

    let erasure_pos =
        distinct_positions(spec.seed, trial, STREAM_ERASURE, spec.model.erasures, n, &[]);
    let erasures = ErasureSet::from_positions(erasure_pos.iter().copied());

    let error = match spec.model.values {
        ValueModel::CodewordDifference => codeword_difference(params, spec, trial),
        ValueModel::Uniform => {
            let w = draw_weight(spec, trial);
            let support =
                distinct_positions(spec.seed, trial, STREAM_ERR_POS, w, n, &erasure_pos);
            ErrorVector::from_entries(support.iter().enumerate().map(|(i, &p)| {
                let v = 1 + sample_below(spec.seed, trial, STREAM_ERR_VAL, i as u64, q - 1);
                (p, Element(v as u16))
            }))
        }
    };

    let mut received = transmitted.apply(&error);
    for &p in &erasure_pos {
        received.set_symbol(p, Element::ZERO);
    }

    let (syndrome, syndrome_ops) = count_ops(|| params.syndrome(&received));
    let (outcome, decode_ops) = count_ops(|| {
        if erasures.is_empty() {
            decode_syndrome(params, &syndrome)
        } else {
            decode_combined(params, &received, &erasures)
        }
    });

    let mut tally = TrialTally {
        decode_min: decode_ops.total(),
        decode_max: decode_ops.total(),
        ..TrialTally::default()
    };
    tally.syndrome_ops.accumulate(syndrome_ops);
    tally.decode_ops.accumulate(decode_ops);

    match &outcome {
        DecodeOutcome::Clean => {
            if received == transmitted {
                tally.counts.clean += 1;
            } else {
                // Zero syndrome with a nonzero error: silent corruption.
                tally.counts.silent += 1;
            }
        }
        DecodeOutcome::Corrected {
            error: found,
            classification,
        } => {
            if received.apply(found) == transmitted {
                tally.counts.corrected_exact += 1;
            } else {
                tally.counts.miscorrected += 1;
            }
            *tally
                .by_classification
                .entry(classification.to_string())
                .or_insert(0) += 1;
        }
        DecodeOutcome::DetectedUncorrectable => {
            tally.counts.detected_uncorrectable += 1;
            if spec.list_decoding {
                tally.list.attempts += 1;
                let list = recover_three_failed(params, &syndrome);
                // The effective error is whatever separates r from t.
                let mut truth = ErrorVector::new();
                for p in 0..n {
                    truth.set(p, f.add(received.symbol(p), transmitted.symbol(p)));
                }
                if list.contains(&truth) {
                    tally.list.hits += 1;
                }
            }
        }
    }
    tally
}

/// Run a seeded fault-injection campaign. Deterministic for a fixed spec,
/// regardless of thread count.
pub fn run_campaign(spec: &TrialSpec) -> Result<CampaignReport, FaultlabError> {
    if spec.model.weight_dist.iter().all(|&w| w == 0)
        && spec.model.values == ValueModel::Uniform
    {
        return Err(FaultlabError::InvalidSpec(
            "weight distribution has zero total mass".into(),
        ));
    }
    if spec.model.erasures > 4 {
        return Err(FaultlabError::InvalidSpec(format!(
            "{} erasures exceed the 4-erasure budget",
            spec.model.erasures
        )));
    }
    let field_spec = match spec.poly {
        Some(poly) => FieldSpec::new(spec.m, poly),
        None => FieldSpec::with_default_poly(spec.m)?,
    };
    let field = FieldTables::new_shared(field_spec)?;
    let params = build_code(field, spec.k, AlphaPolicy::GeneratorPowers)?;

    let tally = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(&params, spec, trial))
        .reduce(
            || TrialTally {
                decode_min: u64::MAX,
                ..TrialTally::default()
            },
            |a, b| a.merge(b),
        );

    let report = CampaignReport {
        version: spec.version,
        trials: spec.trials,
        counts: tally.counts,
        by_classification: tally.by_classification,
        truth_in_list: spec.list_decoding.then_some(tally.list),
        syndrome_ops: tally.syndrome_ops,
        decode_ops: tally.decode_ops,
        decode_ops_min: if tally.decode_min == u64::MAX {
            0
        } else {
            tally.decode_min
        },
        decode_ops_max: tally.decode_max,
    };
    debug_assert_eq!(report.counts.total(), spec.trials);
    Ok(report)
}

/// Ops used by the syndrome kernel for one stripe.
pub fn count_syndrome_ops(params: &CodeParams, received: &Stripe) -> (Syndrome, OpCounts) {
    count_ops(|| params.syndrome(received))
}

/// Ops used by the localization phase (everything after the syndrome).
pub fn count_localization_ops(params: &CodeParams, s: &Syndrome) -> (DecodeOutcome, OpCounts) {
    count_ops(|| decode_syndrome(params, s))
}
