//! Code construction, encoding, and syndrome computation.
//!
//! The code is systematic with generator `G = [I_k; P]` and parity check
//! `H = [P | I_5]`, where column `i` of the 5 x k parity matrix `P` is
//! `(1, a_i, a_i^2, a_i^3, a_i(a_i+1))` for the drive's locator `a_i`.
//! Locators are distinct, nonzero, and exclude one 3rd root of unity when
//! the field has them; that exclusion is what makes error localization
//! unambiguous. Row 5 of `P` is the sum of rows 2 and 3, and rows 1-4 form
//! a Vandermonde system — both facts are load-bearing for the decoders.

use std::sync::Arc;

use thiserror::Error;

use crate::galois::{Element, FieldTables};
use crate::types::{ErrorVector, PARITY_COUNT};

/// One parity-check column `(1, p, p^2, p^3, p(p+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityColumn(pub [Element; PARITY_COUNT]);

/// Evaluate the parity column at locator `rho`.
pub fn parity_column(f: &FieldTables, rho: Element) -> ParityColumn {
    let r2 = f.mul(rho, rho);
    let r3 = f.mul(r2, rho);
    let r5 = f.add(r2, rho);
    ParityColumn([Element::ONE, rho, r2, r3, r5])
}

/// One codeword: `k` data symbols plus 5 parity symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripe {
    pub data: Vec<Element>,
    pub parity: [Element; PARITY_COUNT],
}

impl Stripe {
    pub fn k(&self) -> usize {
        self.data.len()
    }

    /// Symbol at position `pos` (data `0..k`, parity `k..k+5`).
    pub fn symbol(&self, pos: usize) -> Element {
        let k = self.k();
        if pos < k {
            self.data[pos]
        } else {
            self.parity[pos - k]
        }
    }

    pub fn set_symbol(&mut self, pos: usize, value: Element) {
        let k = self.k();
        if pos < k {
            self.data[pos] = value;
        } else {
            self.parity[pos - k] = value;
        }
    }

    /// Add an error vector (XOR, since the field has characteristic 2).
    /// Applying a decoder's corrected error to the received stripe yields
    /// the transmitted stripe.
    pub fn apply(&self, e: &ErrorVector) -> Stripe {
        let mut out = self.clone();
        for (pos, v) in e.iter() {
            out.set_symbol(pos, Element(out.symbol(pos).0 ^ v.0));
        }
        out
    }
}

/// The syndrome vector `s = H.r`, zero exactly on valid codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Syndrome(pub [Element; PARITY_COUNT]);

impl Syndrome {
    pub const ZERO: Syndrome = Syndrome([Element::ZERO; PARITY_COUNT]);

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|s| s.is_zero())
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|s| !s.is_zero()).count()
    }

    pub fn nonzero_rows(&self) -> Vec<usize> {
        (0..PARITY_COUNT).filter(|&i| !self.0[i].is_zero()).collect()
    }

    // 1-based accessors so transcribed formulas read like the math they
    // implement (s1..s5); rows stay 0-based everywhere else.
    #[inline]
    pub(crate) fn s1(&self) -> Element {
        self.0[0]
    }
    #[inline]
    pub(crate) fn s2(&self) -> Element {
        self.0[1]
    }
    #[inline]
    pub(crate) fn s3(&self) -> Element {
        self.0[2]
    }
    #[inline]
    pub(crate) fn s4(&self) -> Element {
        self.0[3]
    }
    #[inline]
    pub(crate) fn s5(&self) -> Element {
        self.0[4]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("k = {k} out of range (1..={k_max} for this field)")]
    KOutOfRange { k: usize, k_max: usize },
    #[error("data length {got} does not match k = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid locator sequence: {0}")]
    InvalidAlpha(String),
}

/// How the locator sequence is chosen.
#[derive(Debug, Clone)]
pub enum AlphaPolicy {
    /// `a_i` = i-th generator power `D^0, D^1, ...`, skipping the excluded
    /// cubic root. Shard index <-> locator is then fully determined by
    /// `(m, poly, k, index)`.
    GeneratorPowers,
    /// Caller-supplied sequence, validated against the code invariants.
    Explicit(Vec<Element>),
}

/// Code parameters: field, locator sequence, and the excluded cubic root.
///
/// Immutable after construction; encode/syndrome are pure, so distinct
/// stripes may be processed concurrently without coordination.
#[derive(Debug, Clone)]
pub struct CodeParams {
    field: Arc<FieldTables>,
    k: usize,
    alpha: Vec<Element>,
    /// Columns of P, precomputed so the hot kernels are pure table work.
    columns: Vec<ParityColumn>,
    /// The excluded 3rd root of unity (exactly one when the field has them).
    excluded: Option<Element>,
    /// value -> data index, u32::MAX when the value is not a locator.
    alpha_index: Vec<u32>,
}

/// Largest supported k for a field: all nonzero elements, minus one cubic
/// root of unity when those exist.
pub fn k_max(field: &FieldTables) -> usize {
    let roots = field.cubic_roots_of_unity();
    if roots.is_empty() {
        field.size() - 1
    } else {
        field.size() - 2
    }
}

/// Construct code parameters for `k` data drives.
pub fn build_code(
    field: Arc<FieldTables>,
    k: usize,
    policy: AlphaPolicy,
) -> Result<CodeParams, CodeError> {
    let k_max = k_max(&field);
    if k == 0 || k > k_max {
        return Err(CodeError::KOutOfRange { k, k_max });
    }

    let roots = field.cubic_roots_of_unity();
    let alpha = match policy {
        AlphaPolicy::GeneratorPowers => {
            // The excluded root is fixed to the smaller encoding so codecs
            // agree on the mapping.
            let excluded = roots.first().copied();
            let mut alpha = Vec::with_capacity(k);
            let mut i = 0usize;
            while alpha.len() < k {
                let a = field.exp(i);
                i += 1;
                if Some(a) != excluded {
                    alpha.push(a);
                }
            }
            alpha
        }
        AlphaPolicy::Explicit(alpha) => alpha,
    };

    if alpha.len() != k {
        return Err(CodeError::InvalidAlpha(format!(
            "expected {} locators, got {}",
            k,
            alpha.len()
        )));
    }

    let mut alpha_index = vec![u32::MAX; field.size()];
    for (i, &a) in alpha.iter().enumerate() {
        if a.is_zero() {
            return Err(CodeError::InvalidAlpha("zero locator".into()));
        }
        if a.0 as usize >= field.size() {
            return Err(CodeError::InvalidAlpha(format!(
                "locator {} outside the field",
                a
            )));
        }
        if alpha_index[a.0 as usize] != u32::MAX {
            return Err(CodeError::InvalidAlpha(format!("duplicate locator {}", a)));
        }
        alpha_index[a.0 as usize] = i as u32;
    }

    let excluded = if roots.is_empty() {
        None
    } else {
        let in_alpha: Vec<Element> = roots
            .iter()
            .copied()
            .filter(|r| alpha_index[r.0 as usize] != u32::MAX)
            .collect();
        match in_alpha.len() {
            0 => Some(roots[0]),
            1 => Some(if in_alpha[0] == roots[0] {
                roots[1]
            } else {
                roots[0]
            }),
            _ => {
                return Err(CodeError::InvalidAlpha(
                    "both 3rd roots of unity used as locators".into(),
                ))
            }
        }
    };

    let columns = alpha.iter().map(|&a| parity_column(&field, a)).collect();

    Ok(CodeParams {
        field,
        k,
        alpha,
        columns,
        excluded,
        alpha_index,
    })
}

impl CodeParams {
    pub fn field(&self) -> &FieldTables {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<FieldTables> {
        Arc::clone(&self.field)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total positions per stripe, k + 5.
    pub fn n(&self) -> usize {
        self.k + PARITY_COUNT
    }

    pub fn alpha(&self) -> &[Element] {
        &self.alpha
    }

    /// Locator of data drive `i` (0-based).
    pub fn locator(&self, i: usize) -> Element {
        self.alpha[i]
    }

    /// Data index of locator `rho`, if it is one.
    pub fn lookup(&self, rho: Element) -> Option<usize> {
        let idx = self.alpha_index[rho.0 as usize];
        (idx != u32::MAX).then_some(idx as usize)
    }

    /// The excluded 3rd root of unity, when the field has cubic roots.
    pub fn excluded_root(&self) -> Option<Element> {
        self.excluded
    }

    /// Entry `p[row][i]` of the parity matrix (0-based row in 0..5).
    pub fn parity_entry(&self, row: usize, i: usize) -> Element {
        self.columns[i].0[row]
    }

    /// Column of H at position `pos`: `P_i` for data, `I_j` for parity.
    pub fn h_column(&self, pos: usize) -> [Element; PARITY_COUNT] {
        if pos < self.k {
            self.columns[pos].0
        } else {
            let mut col = [Element::ZERO; PARITY_COUNT];
            col[pos - self.k] = Element::ONE;
            col
        }
    }

    /// Encode data into a stripe; the result has zero syndrome.
    pub fn encode(&self, data: &[Element]) -> Result<Stripe, CodeError> {
        if data.len() != self.k {
            return Err(CodeError::LengthMismatch {
                expected: self.k,
                got: data.len(),
            });
        }
        let f = self.field();
        let mut parity = [Element::ZERO; PARITY_COUNT];
        for (i, &d) in data.iter().enumerate() {
            for (row, p) in parity.iter_mut().enumerate() {
                *p = f.add(*p, f.mul(self.columns[i].0[row], d));
            }
        }
        Ok(Stripe {
            data: data.to_vec(),
            parity,
        })
    }

    /// Syndrome of a received stripe: exactly 5k multiplies and 5k adds.
    pub fn syndrome(&self, received: &Stripe) -> Syndrome {
        let f = self.field();
        let mut s = received.parity;
        for (i, &r) in received.data.iter().enumerate() {
            for (row, acc) in s.iter_mut().enumerate() {
                *acc = f.add(*acc, f.mul(self.columns[i].0[row], r));
            }
        }
        Syndrome(s)
    }

    /// Submatrix of P over the given 0-based rows and data columns.
    pub fn parity_submatrix(&self, rows: &[usize], cols: &[usize]) -> GfMatrix {
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.parity_entry(r, c)))
            .collect();
        GfMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Submatrix of H over the given 0-based rows and positions.
    pub fn h_submatrix(&self, rows: &[usize], positions: &[usize]) -> GfMatrix {
        let data = rows
            .iter()
            .flat_map(|&r| positions.iter().map(move |&p| self.h_column(p)[r]))
            .collect();
        GfMatrix {
            rows: rows.len(),
            cols: positions.len(),
            data,
        }
    }
}

/// A dense matrix over GF(2^m), row-major. Sized for decoder work (at most
/// 5 x 5), not bulk linear algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Element>,
}

impl GfMatrix {
    pub fn from_rows(rows: Vec<Vec<Element>>) -> GfMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols));
        GfMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> Element {
        self.data[r * self.cols + c]
    }

    /// Exact rank by Gaussian elimination over the field.
    pub fn rank(&self, f: &FieldTables) -> usize {
        let mut m = self.data.clone();
        let (nr, nc) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..nc {
            if rank == nr {
                break;
            }
            let pivot = (rank..nr).find(|&r| !m[r * nc + col].is_zero());
            let Some(pr) = pivot else { continue };
            for c in 0..nc {
                m.swap(rank * nc + c, pr * nc + c);
            }
            let inv = f.inv(m[rank * nc + col]);
            for r in 0..nr {
                if r != rank && !m[r * nc + col].is_zero() {
                    let factor = f.mul(m[r * nc + col], inv);
                    for c in 0..nc {
                        let sub = f.mul(factor, m[rank * nc + c]);
                        m[r * nc + c] = f.add(m[r * nc + c], sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solve the square system `M x = b`; `None` when singular.
    pub fn solve(&self, f: &FieldTables, b: &[Element]) -> Option<Vec<Element>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut m = self.data.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r * n + col].is_zero())?;
            for c in 0..n {
                m.swap(col * n + c, pivot * n + c);
            }
            rhs.swap(col, pivot);
            let inv = f.inv(m[col * n + col]);
            for r in 0..n {
                if r != col && !m[r * n + col].is_zero() {
                    let factor = f.mul(m[r * n + col], inv);
                    for c in col..n {
                        let sub = f.mul(factor, m[col * n + c]);
                        m[r * n + c] = f.add(m[r * n + c], sub);
                    }
                    let sub = f.mul(factor, rhs[col]);
                    rhs[r] = f.add(rhs[r], sub);
                }
            }
        }
        for (i, x) in rhs.iter_mut().enumerate() {
            *x = f.div(*x, m[i * n + i]);
        }
        Some(rhs)
    }
}
