//! Shared decoder-facing types: error vectors, erasure sets, outcomes.
//!
//! Positions are 0-based throughout the library: data drives occupy
//! `0..k` and parity drives `k..k+5` (parity row `r` lives at position
//! `k + r`). Display surfaces convert to the 1-based convention.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::code::{CodeParams, Syndrome};
use crate::galois::Element;

/// Number of parity drives; fixed by the code construction.
pub const PARITY_COUNT: usize = 5;

/// All `t`-subsets of `items` in lexicographic order.
pub(crate) fn subsets(items: &[usize], t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance the combination.
        let mut i = t;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - t {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A sparse error vector: position -> nonzero value.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct ErrorVector {
    entries: BTreeMap<usize, Element>,
}

impl ErrorVector {
    pub fn new() -> Self {
        ErrorVector {
            entries: BTreeMap::new(),
        }
    }

    /// Set position `pos` to `value`; zero values clear the entry so the
    /// stored weight always equals the number of entries.
    pub fn set(&mut self, pos: usize, value: Element) {
        if value.is_zero() {
            self.entries.remove(&pos);
        } else {
            self.entries.insert(pos, value);
        }
    }

    pub fn get(&self, pos: usize) -> Element {
        self.entries.get(&pos).copied().unwrap_or(Element::ZERO)
    }

    pub fn weight(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Element)> + '_ {
        self.entries.iter().map(|(&p, &v)| (p, v))
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    /// Number of entries on data drives (positions < k).
    pub fn data_weight(&self, k: usize) -> usize {
        self.entries.keys().filter(|&&p| p < k).count()
    }

    /// The syndrome H.e this error produces.
    pub fn syndrome(&self, params: &CodeParams) -> Syndrome {
        let f = params.field();
        let mut s = [Element::ZERO; PARITY_COUNT];
        for (pos, value) in self.iter() {
            let col = params.h_column(pos);
            for (acc, c) in s.iter_mut().zip(col.iter()) {
                *acc = f.add(*acc, f.mul(*c, value));
            }
        }
        Syndrome(s)
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Element)>) -> Self {
        let mut e = ErrorVector::new();
        for (p, v) in entries {
            e.set(p, v);
        }
        e
    }
}

impl fmt::Display for ErrorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            // 1-based positions on display surfaces.
            write!(f, "{}:{}", p + 1, v)?;
        }
        write!(f, "}}")
    }
}

/// Known-bad positions (drives known to be failed or removed).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErasureSet {
    positions: BTreeSet<usize>,
}

impl ErasureSet {
    pub fn new() -> Self {
        ErasureSet::default()
    }

    pub fn from_positions(positions: impl IntoIterator<Item = usize>) -> Self {
        ErasureSet {
            positions: positions.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, pos: usize) {
        self.positions.insert(pos);
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.positions.contains(&pos)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.positions.iter().copied()
    }

    /// Split into (data positions, parity rows).
    pub fn split(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        let data = self.iter().filter(|&p| p < k).collect();
        let parity = self.iter().filter(|&p| p >= k).map(|p| p - k).collect();
        (data, parity)
    }
}

/// What kind of failure a successful correction repaired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    ParityOnly,
    OneData,
    OneDataOneParity,
    TwoData,
    ErasureRepair,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::ParityOnly => "parity-only",
            Classification::OneData => "1-data",
            Classification::OneDataOneParity => "1-data+1-parity",
            Classification::TwoData => "2-data",
            Classification::ErasureRepair => "erasure-repair",
        };
        f.write_str(s)
    }
}

/// Result of decoding one stripe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Zero syndrome: no error, or silent corruption of weight >= 5.
    Clean,
    /// A correction was found; `syndrome(r + error) = 0`.
    Corrected {
        error: ErrorVector,
        classification: Classification,
    },
    /// The syndrome is inconsistent with the decoder's error budget.
    DetectedUncorrectable,
}

impl DecodeOutcome {
    pub fn is_clean(&self) -> bool {
        matches!(self, DecodeOutcome::Clean)
    }

    pub fn error(&self) -> Option<&ErrorVector> {
        match self {
            DecodeOutcome::Corrected { error, .. } => Some(error),
            _ => None,
        }
    }
}

/// Deduplicated, canonically ordered list of candidate error vectors.
///
/// Ordering is ascending (number of data entries, then position tuple), so
/// outputs are diffable across runs. Every member must satisfy `H.e = s` for
/// the query syndrome; list length is bounded by `2k + 4` for the 3-failure
/// scope.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateErrorList {
    items: Vec<ErrorVector>,
}

impl CandidateErrorList {
    pub fn new() -> Self {
        CandidateErrorList { items: Vec::new() }
    }

    /// Insert, ignoring exact duplicates.
    pub fn push(&mut self, e: ErrorVector) {
        if !self.items.contains(&e) {
            self.items.push(e);
        }
    }

    /// Canonical order: data-entry count, then sorted position tuple, then
    /// values.
    pub fn canonicalize(&mut self, k: usize) {
        self.items.sort_by(|a, b| {
            let da = a.data_weight(k);
            let db = b.data_weight(k);
            da.cmp(&db)
                .then_with(|| {
                    let pa: Vec<usize> = a.positions().collect();
                    let pb: Vec<usize> = b.positions().collect();
                    pa.cmp(&pb)
                })
                .then_with(|| a.cmp(b))
        });
        self.items.dedup();
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ErrorVector> {
        self.items.iter()
    }

    pub fn contains(&self, e: &ErrorVector) -> bool {
        self.items.contains(e)
    }

    pub fn into_vec(self) -> Vec<ErrorVector> {
        self.items
    }
}
