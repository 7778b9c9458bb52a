//! Shard-file format and the encode/reassemble/scrub/inject commands.
//!
//! A payload is split into `k` data shards plus 5 parity shards. Symbols
//! are interleaved stripe-major: payload symbol `n*k + i` lands in stripe
//! `n` of data shard `i`, so a corrupted disk region maps to contiguous
//! stripes and repair I/O stays sequential. m=4 packs two symbols per byte
//! (low nibble first); m=8 is one byte per symbol; m=16 is little-endian
//! u16. Shard files are bit-reproducible: no timestamps, no randomness.
//!
//! The CRC-32 in the header guards the header only. Payload integrity is
//! the code's own job.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::beyond::recover_three_failed;
use crate::code::{build_code, AlphaPolicy, CodeParams, Stripe, Syndrome};
use crate::galois::{make_field, Element, FieldSpec};
use crate::mindist::{decode_erasures, decode_syndrome};
use crate::types::{
    CandidateErrorList, Classification, DecodeOutcome, ErasureSet, ErrorVector, PARITY_COUNT,
};

pub const MAGIC: [u8; 4] = *b"PRD5";
pub const FORMAT_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 34;

/// Shard widths with a defined byte packing.
pub const SHARD_WIDTHS: [u32; 3] = [4, 8, 16];

#[derive(Debug, Error)]
pub enum ShardsetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {reason}")]
    BadHeader { path: PathBuf, reason: String },
    #[error("shard headers disagree: {0}")]
    HeaderMismatch(String),
    #[error("{missing} shards missing; at most 4 are recoverable")]
    TooManyMissing { missing: usize },
    #[error("field width m={m} has no shard packing (supported: 4, 8, 16)")]
    UnsupportedWidth { m: u32 },
    #[error(transparent)]
    Field(#[from] crate::galois::GaloisError),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error("stripe {stripe}: corruption outside the missing shards")]
    UncorrectableStripe { stripe: u64 },
    #[error("invalid injection: {0}")]
    InvalidInjection(String),
    #[error("scrub needs all {expected} shards present, found {found}")]
    IncompleteSet { expected: usize, found: usize },
}

/// Fixed-layout shard header (34 bytes, little-endian integers).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardHeader {
    pub m: u8,
    pub poly: u32,
    pub k: u16,
    /// 0..k-1 data, k..k+4 parity.
    pub shard_index: u16,
    pub stripe_count: u64,
    pub payload_len: u64,
}

impl ShardHeader {
    pub fn encode(&self) -> [u8; HEADER_LEN] {
        let mut buf = [0u8; HEADER_LEN];
        buf[0..4].copy_from_slice(&MAGIC);
        buf[4] = FORMAT_VERSION;
        buf[5] = self.m;
        buf[6..10].copy_from_slice(&self.poly.to_le_bytes());
        buf[10..12].copy_from_slice(&self.k.to_le_bytes());
        buf[12..14].copy_from_slice(&self.shard_index.to_le_bytes());
        buf[14..22].copy_from_slice(&self.stripe_count.to_le_bytes());
        buf[22..30].copy_from_slice(&self.payload_len.to_le_bytes());
        let crc = crc32fast::hash(&buf[0..30]);
        buf[30..34].copy_from_slice(&crc.to_le_bytes());
        buf
    }

    pub fn decode(buf: &[u8]) -> Result<ShardHeader, String> {
        if buf.len() < HEADER_LEN {
            return Err(format!("header truncated at {} bytes", buf.len()));
        }
        if buf[0..4] != MAGIC {
            return Err("bad magic".into());
        }
        if buf[4] != FORMAT_VERSION {
            return Err(format!("unsupported format version {}", buf[4]));
        }
        let crc = u32::from_le_bytes(buf[30..34].try_into().unwrap());
        if crc != crc32fast::hash(&buf[0..30]) {
            return Err("header CRC mismatch".into());
        }
        let header = ShardHeader {
            m: buf[5],
            poly: u32::from_le_bytes(buf[6..10].try_into().unwrap()),
            k: u16::from_le_bytes(buf[10..12].try_into().unwrap()),
            shard_index: u16::from_le_bytes(buf[12..14].try_into().unwrap()),
            stripe_count: u64::from_le_bytes(buf[14..22].try_into().unwrap()),
            payload_len: u64::from_le_bytes(buf[22..30].try_into().unwrap()),
        };
        if header.shard_index as usize >= header.k as usize + PARITY_COUNT {
            return Err(format!("shard index {} out of range", header.shard_index));
        }
        let symbols = header.stripe_count as u128 * header.k as u128;
        let max_payload: u128 = match header.m {
            4 => symbols / 2,
            8 => symbols,
            16 => 2 * symbols,
            _ => u128::MAX, // width validated by the field constructor
        };
        if header.payload_len as u128 > max_payload {
            return Err(format!(
                "payload length {} exceeds {} stripes of {} data symbols",
                header.payload_len, header.stripe_count, header.k
            ));
        }
        Ok(header)
    }
}

/// Field choice for encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldChoice {
    pub m: u32,
    pub poly: Option<u32>,
}

impl FieldChoice {
    pub fn spec(&self) -> Result<FieldSpec, ShardsetError> {
        if !SHARD_WIDTHS.contains(&self.m) {
            return Err(ShardsetError::UnsupportedWidth { m: self.m });
        }
        match self.poly {
            Some(poly) => Ok(FieldSpec::new(self.m, poly)),
            None => Ok(FieldSpec::with_default_poly(self.m)?),
        }
    }
}

/// Parse `m` or `m:poly-hex`, e.g. `8` or `8:11d`.
impl std::str::FromStr for FieldChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m_str, poly) = match s.split_once(':') {
            Some((m, p)) => {
                let poly = u32::from_str_radix(p.trim_start_matches("0x"), 16)
                    .map_err(|e| format!("bad polynomial {p:?}: {e}"))?;
                (m, Some(poly))
            }
            None => (s, None),
        };
        let m: u32 = m_str.parse().map_err(|e| format!("bad width {m_str:?}: {e}"))?;
        Ok(FieldChoice { m, poly })
    }
}

fn shard_file_name(index: usize) -> String {
    format!("shard_{index:05}.prd5")
}

// ============================================================================
// Symbol packing
// ============================================================================

/// Bytes occupied by `count` symbols of width `m` (m=4 rounds up).
fn body_len(m: u32, count: u64) -> u64 {
    match m {
        4 => count.div_ceil(2),
        8 => count,
        16 => 2 * count,
        _ => unreachable!("unsupported shard width"),
    }
}

fn pack_symbols(m: u32, symbols: &[Element]) -> Vec<u8> {
    match m {
        4 => {
            let mut out = vec![0u8; symbols.len().div_ceil(2)];
            for (i, s) in symbols.iter().enumerate() {
                let nib = (s.0 & 0xF) as u8;
                if i % 2 == 0 {
                    out[i / 2] |= nib;
                } else {
                    out[i / 2] |= nib << 4;
                }
            }
            out
        }
        8 => symbols.iter().map(|s| s.0 as u8).collect(),
        16 => symbols
            .iter()
            .flat_map(|s| s.0.to_le_bytes())
            .collect(),
        _ => unreachable!(),
    }
}

fn unpack_symbols(m: u32, bytes: &[u8], count: usize) -> Vec<Element> {
    match m {
        4 => (0..count)
            .map(|i| {
                let b = bytes[i / 2];
                let nib = if i % 2 == 0 { b & 0xF } else { b >> 4 };
                Element(nib as u16)
            })
            .collect(),
        8 => bytes[..count].iter().map(|&b| Element(b as u16)).collect(),
        16 => (0..count)
            .map(|i| Element(u16::from_le_bytes([bytes[2 * i], bytes[2 * i + 1]])))
            .collect(),
        _ => unreachable!(),
    }
}

/// Payload bytes viewed as a symbol stream (zero-padded on the tail).
fn payload_to_symbols(m: u32, payload: &[u8]) -> Vec<Element> {
    match m {
        4 => payload
            .iter()
            .flat_map(|&b| [Element((b & 0xF) as u16), Element((b >> 4) as u16)])
            .collect(),
        8 => payload.iter().map(|&b| Element(b as u16)).collect(),
        16 => payload
            .chunks(2)
            .map(|c| {
                let lo = c[0];
                let hi = c.get(1).copied().unwrap_or(0);
                Element(u16::from_le_bytes([lo, hi]))
            })
            .collect(),
        _ => unreachable!(),
    }
}

fn symbols_to_payload(m: u32, symbols: &[Element], payload_len: u64) -> Vec<u8> {
    let mut bytes = pack_symbols(m, symbols);
    bytes.truncate(payload_len as usize);
    bytes
}

// ============================================================================
// In-memory shard set
// ============================================================================

struct LoadedShards {
    header: ShardHeader,
    params: CodeParams,
    /// Per shard index: symbols, or None when the shard is missing.
    symbols: Vec<Option<Vec<Element>>>,
    paths: Vec<Option<PathBuf>>,
}

impl LoadedShards {
    fn n(&self) -> usize {
        self.header.k as usize + PARITY_COUNT
    }

    fn missing(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.symbols[i].is_none()).collect()
    }

    fn stripe(&self, n: usize) -> Stripe {
        let k = self.header.k as usize;
        let sym = |idx: usize| {
            self.symbols[idx]
                .as_ref()
                .map_or(Element::ZERO, |v| v[n])
        };
        Stripe {
            data: (0..k).map(sym).collect(),
            parity: std::array::from_fn(|r| sym(k + r)),
        }
    }
}

fn load_dir(dir: &Path, force_missing: &[usize]) -> Result<LoadedShards, ShardsetError> {
    let mut headers: BTreeMap<usize, (ShardHeader, PathBuf, Vec<u8>)> = BTreeMap::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();

    for path in entries {
        let bytes = fs::read(&path)?;
        if bytes.len() < HEADER_LEN || bytes[0..4] != MAGIC {
            continue; // not a shard file
        }
        let header = ShardHeader::decode(&bytes).map_err(|reason| ShardsetError::BadHeader {
            path: path.clone(),
            reason,
        })?;
        let idx = header.shard_index as usize;
        if headers.contains_key(&idx) {
            return Err(ShardsetError::HeaderMismatch(format!(
                "duplicate shard index {idx}"
            )));
        }
        headers.insert(idx, (header, path, bytes));
    }

    let Some((_, (first, _, _))) = headers.iter().next() else {
        return Err(ShardsetError::HeaderMismatch("no shard files found".into()));
    };
    let reference = ShardHeader {
        shard_index: 0,
        ..*first
    };
    for (idx, (h, path, bytes)) in &headers {
        let canon = ShardHeader {
            shard_index: 0,
            ..*h
        };
        if canon != reference {
            return Err(ShardsetError::HeaderMismatch(format!(
                "{} disagrees with the other shards",
                path.display()
            )));
        }
        let want = HEADER_LEN as u64 + body_len(h.m as u32, h.stripe_count);
        if bytes.len() as u64 != want {
            return Err(ShardsetError::BadHeader {
                path: path.clone(),
                reason: format!("expected {} bytes, found {}", want, bytes.len()),
            });
        }
        let _ = idx;
    }

    if !SHARD_WIDTHS.contains(&(reference.m as u32)) {
        return Err(ShardsetError::UnsupportedWidth {
            m: reference.m as u32,
        });
    }

    let field = Arc::new(make_field(FieldSpec::new(reference.m as u32, reference.poly))?);
    let params = build_code(field, reference.k as usize, AlphaPolicy::GeneratorPowers)?;

    let n = reference.k as usize + PARITY_COUNT;
    let mut symbols: Vec<Option<Vec<Element>>> = vec![None; n];
    let mut paths: Vec<Option<PathBuf>> = vec![None; n];
    for (idx, (h, path, bytes)) in headers {
        if force_missing.contains(&idx) {
            continue;
        }
        let count = h.stripe_count as usize;
        symbols[idx] = Some(unpack_symbols(h.m as u32, &bytes[HEADER_LEN..], count));
        paths[idx] = Some(path);
    }

    Ok(LoadedShards {
        header: reference,
        params,
        symbols,
        paths,
    })
}

// ============================================================================
// Commands
// ============================================================================

/// Summary returned by [`cmd_encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeSummary {
    pub k: usize,
    pub stripe_count: u64,
    pub payload_len: u64,
    pub shard_paths: Vec<PathBuf>,
}

/// Split a payload file into `k` data shards plus 5 parity shards.
pub fn cmd_encode(
    input: &Path,
    out_dir: &Path,
    k: usize,
    field: FieldChoice,
) -> Result<EncodeSummary, ShardsetError> {
    let spec = field.spec()?;
    let tables = Arc::new(make_field(spec)?);
    let params = build_code(tables, k, AlphaPolicy::GeneratorPowers)?;

    let payload = fs::read(input)?;
    let payload_len = payload.len() as u64;
    let symbols = payload_to_symbols(field.m, &payload);
    let stripe_count = (symbols.len() as u64).div_ceil(k as u64);

    // Stripe-major slicing with zero padding to whole stripes.
    let parity: Vec<[Element; PARITY_COUNT]> = (0..stripe_count as usize)
        .into_par_iter()
        .map(|stripe| {
            let data: Vec<Element> = (0..k)
                .map(|i| symbols.get(stripe * k + i).copied().unwrap_or(Element::ZERO))
                .collect();
            params.encode(&data).expect("length is k").parity
        })
        .collect();

    fs::create_dir_all(out_dir)?;
    let mut shard_paths = Vec::with_capacity(k + PARITY_COUNT);
    for idx in 0..k + PARITY_COUNT {
        let header = ShardHeader {
            m: field.m as u8,
            poly: spec.poly,
            k: k as u16,
            shard_index: idx as u16,
            stripe_count,
            payload_len,
        };
        let shard_symbols: Vec<Element> = (0..stripe_count as usize)
            .map(|stripe| {
                if idx < k {
                    symbols.get(stripe * k + idx).copied().unwrap_or(Element::ZERO)
                } else {
                    parity[stripe][idx - k]
                }
            })
            .collect();
        let mut bytes = header.encode().to_vec();
        bytes.extend_from_slice(&pack_symbols(field.m, &shard_symbols));
        let path = out_dir.join(shard_file_name(idx));
        fs::write(&path, bytes)?;
        shard_paths.push(path);
    }

    Ok(EncodeSummary {
        k,
        stripe_count,
        payload_len,
        shard_paths,
    })
}

/// Rebuild the payload from a shard directory, treating absent shards (and
/// any listed in `missing`) as erasures.
pub fn cmd_reassemble(
    dir: &Path,
    out: &Path,
    missing: &[usize],
) -> Result<(), ShardsetError> {
    let set = load_dir(dir, missing)?;
    let k = set.header.k as usize;
    let m = set.header.m as u32;
    let stripe_count = set.header.stripe_count as usize;
    let gone = set.missing();
    if gone.len() > 4 {
        return Err(ShardsetError::TooManyMissing {
            missing: gone.len(),
        });
    }

    let data_symbols: Vec<Element> = if gone.iter().all(|&p| p >= k) {
        // All data shards present: straight interleave.
        (0..stripe_count * k)
            .map(|i| set.symbols[i % k].as_ref().unwrap()[i / k])
            .collect()
    } else {
        let erasures = ErasureSet::from_positions(gone.iter().copied());
        let repaired: Vec<Result<Vec<Element>, u64>> = (0..stripe_count)
            .into_par_iter()
            .map(|n| {
                let received = set.stripe(n);
                match decode_erasures(&set.params, &received, &erasures) {
                    DecodeOutcome::Corrected { error, .. } => {
                        Ok(received.apply(&error).data)
                    }
                    DecodeOutcome::Clean => Ok(received.data),
                    DecodeOutcome::DetectedUncorrectable => Err(n as u64),
                }
            })
            .collect();
        let mut out_syms = Vec::with_capacity(stripe_count * k);
        for r in repaired {
            match r {
                Ok(data) => out_syms.extend(data),
                Err(stripe) => return Err(ShardsetError::UncorrectableStripe { stripe }),
            }
        }
        out_syms
    };

    fs::write(
        out,
        symbols_to_payload(m, &data_symbols, set.header.payload_len),
    )?;
    Ok(())
}

/// Per-stripe scrub finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripeFinding {
    pub stripe: u64,
    pub status: StripeStatus,
    pub candidates: Option<CandidateErrorList>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripeStatus {
    Corrected(Classification),
    Uncorrectable,
}

impl fmt::Display for StripeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StripeStatus::Corrected(c) => write!(f, "corrected {c}"),
            StripeStatus::Uncorrectable => write!(f, "uncorrectable"),
        }
    }
}

/// Scrub report: stripe totals and the non-clean findings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrubReport {
    pub stripes: u64,
    pub clean: u64,
    pub corrected: u64,
    pub uncorrectable: u64,
    pub by_classification: BTreeMap<String, u64>,
    pub findings: Vec<StripeFinding>,
}

impl ScrubReport {
    /// CLI exit code: 0 clean, 1 corrected, 2 uncorrectable.
    pub fn exit_code(&self) -> i32 {
        if self.uncorrectable > 0 {
            2
        } else if self.corrected > 0 {
            1
        } else {
            0
        }
    }
}

/// Check every stripe of a complete shard set; optionally repair in place
/// and list 3-failure candidates for uncorrectable stripes.
pub fn cmd_scrub(
    dir: &Path,
    repair: bool,
    list_candidates: bool,
) -> Result<ScrubReport, ShardsetError> {
    let mut set = load_dir(dir, &[])?;
    let n = set.n();
    let present = n - set.missing().len();
    if present != n {
        return Err(ShardsetError::IncompleteSet {
            expected: n,
            found: present,
        });
    }
    let stripe_count = set.header.stripe_count;

    struct Outcome {
        stripe: u64,
        result: DecodeOutcome,
        syndrome: Syndrome,
    }

    let outcomes: Vec<Outcome> = (0..stripe_count as usize)
        .into_par_iter()
        .map(|ns| {
            let received = set.stripe(ns);
            let syndrome = set.params.syndrome(&received);
            Outcome {
                stripe: ns as u64,
                result: decode_syndrome(&set.params, &syndrome),
                syndrome,
            }
        })
        .collect();

    let mut report = ScrubReport {
        stripes: stripe_count,
        clean: 0,
        corrected: 0,
        uncorrectable: 0,
        by_classification: BTreeMap::new(),
        findings: Vec::new(),
    };
    let mut repairs: Vec<(u64, ErrorVector)> = Vec::new();

    for o in outcomes {
        match o.result {
            DecodeOutcome::Clean => report.clean += 1,
            DecodeOutcome::Corrected {
                error,
                classification,
            } => {
                report.corrected += 1;
                *report
                    .by_classification
                    .entry(classification.to_string())
                    .or_insert(0) += 1;
                report.findings.push(StripeFinding {
                    stripe: o.stripe,
                    status: StripeStatus::Corrected(classification),
                    candidates: None,
                });
                if repair {
                    repairs.push((o.stripe, error));
                }
            }
            DecodeOutcome::DetectedUncorrectable => {
                report.uncorrectable += 1;
                let candidates = list_candidates
                    .then(|| recover_three_failed(&set.params, &o.syndrome));
                report.findings.push(StripeFinding {
                    stripe: o.stripe,
                    status: StripeStatus::Uncorrectable,
                    candidates,
                });
            }
        }
    }

    if repair && !repairs.is_empty() {
        let mut touched = vec![false; n];
        for (stripe, error) in repairs {
            for (pos, value) in error.iter() {
                let sym = set.symbols[pos].as_mut().unwrap();
                sym[stripe as usize] = Element(sym[stripe as usize].0 ^ value.0);
                touched[pos] = true;
            }
        }
        for (idx, was_touched) in touched.iter().enumerate() {
            if !was_touched {
                continue;
            }
            let path = set.paths[idx].as_ref().unwrap();
            let header = ShardHeader {
                shard_index: idx as u16,
                ..set.header
            };
            let mut bytes = header.encode().to_vec();
            bytes.extend_from_slice(&pack_symbols(
                set.header.m as u32,
                set.symbols[idx].as_ref().unwrap(),
            ));
            fs::write(path, bytes)?;
        }
    }

    Ok(report)
}

/// XOR a nonzero value into one symbol of one shard (deterministic fault
/// injection). The header is untouched.
pub fn cmd_inject(shard: &Path, stripe: u64, xor_value: u64) -> Result<(), ShardsetError> {
    let bytes = fs::read(shard)?;
    let header = ShardHeader::decode(&bytes).map_err(|reason| ShardsetError::BadHeader {
        path: shard.to_path_buf(),
        reason,
    })?;
    let m = header.m as u32;
    if !SHARD_WIDTHS.contains(&m) {
        return Err(ShardsetError::UnsupportedWidth { m });
    }
    if stripe >= header.stripe_count {
        return Err(ShardsetError::InvalidInjection(format!(
            "stripe {stripe} out of range (stripe count {})",
            header.stripe_count
        )));
    }
    if xor_value == 0 {
        return Err(ShardsetError::InvalidInjection(
            "xor value must be nonzero".into(),
        ));
    }
    if xor_value >= 1 << m {
        return Err(ShardsetError::InvalidInjection(format!(
            "xor value {xor_value:#x} out of range for m={m}"
        )));
    }

    let count = header.stripe_count as usize;
    let mut symbols = unpack_symbols(m, &bytes[HEADER_LEN..], count);
    let idx = stripe as usize;
    symbols[idx] = Element(symbols[idx].0 ^ xor_value as u16);

    let mut out = bytes[..HEADER_LEN].to_vec();
    out.extend_from_slice(&pack_symbols(m, &symbols));
    fs::write(shard, out)?;
    Ok(())
}
