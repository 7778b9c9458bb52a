//! GF(2^m) arithmetic and the characteristic-2 quadratic solver.
//!
//! Elements are plain integers in polynomial-basis coordinates over
//! `{1, D, ..., D^(m-1)}` where `D` is a root of the configured primitive
//! polynomial. Addition is XOR; multiplication and division go through
//! log/exp tables. Square roots and the unit quadratic `y(y+1) = d` are
//! table lookups, so every decoder step downstream costs a constant number
//! of field operations regardless of field size.
//!
//! The quadratic machinery works because the Frobenius map `J(x) = x^2` is
//! GF(2)-linear: `a*x^2 + b*x + c = 0` reduces (for `b != 0`) to the monic
//! unit form `y(y+1) = c*a/b^2`, which is solvable iff a fixed parity check
//! `z^T d = 0` on the coordinates of `d` passes. The vector `z` is the
//! unique nonzero solution of `(J+I)^T z = 0` and is computed at
//! construction time.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Widths with full table support. GF(8) is included for the small-field
/// brute-force oracle; odd widths above 3 are not supported.
pub const SUPPORTED_WIDTHS: [u32; 4] = [3, 4, 8, 16];

/// Default primitive polynomial per width (bit j = coefficient of x^j).
pub fn default_poly(m: u32) -> Option<u32> {
    match m {
        3 => Some(0xB),      // x^3 + x + 1
        4 => Some(0x13),     // x^4 + x + 1
        8 => Some(0x11D),    // x^8 + x^4 + x^3 + x^2 + 1
        16 => Some(0x1100B), // x^16 + x^12 + x^3 + x + 1
        _ => None,
    }
}

/// A field element, encoded as an integer in `[0, 2^m)`.
///
/// Bit `j` is the coefficient of `D^j` in the polynomial basis. The value is
/// only meaningful relative to the [`FieldTables`] it was produced by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Element(pub u16);

impl Element {
    pub const ZERO: Element = Element(0);
    pub const ONE: Element = Element(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::LowerHex for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// Field configuration: width and primitive polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    /// Bit width `m`; the field has `2^m` elements.
    pub m: u32,
    /// Primitive polynomial of degree `m`, bit `j` = coefficient of `x^j`.
    pub poly: u32,
}

impl FieldSpec {
    pub fn new(m: u32, poly: u32) -> Self {
        FieldSpec { m, poly }
    }

    /// Spec with the default polynomial for `m`.
    pub fn with_default_poly(m: u32) -> Result<Self, GaloisError> {
        let poly = default_poly(m).ok_or(GaloisError::UnsupportedWidth { m })?;
        Ok(FieldSpec { m, poly })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("unsupported field width m={m} (supported: 3, 4, 8, 16)")]
    UnsupportedWidth { m: u32 },
    #[error("polynomial {poly:#x} does not have degree {m}")]
    WrongDegree { m: u32, poly: u32 },
    #[error("polynomial {poly:#x} is not primitive over GF(2)")]
    NotPrimitive { poly: u32 },
}

// ============================================================================
// Field-operation counters
// ============================================================================

/// Snapshot of the per-thread field-operation counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
    pub lookups: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.divs + self.lookups
    }
}

thread_local! {
    static OP_COUNTS: Cell<OpCounts> = const { Cell::new(OpCounts { adds: 0, muls: 0, divs: 0, lookups: 0 }) };
}

/// Reset this thread's operation counters to zero.
pub fn reset_op_counts() {
    OP_COUNTS.with(|c| c.set(OpCounts::default()));
}

/// Read this thread's operation counters.
pub fn op_counts() -> OpCounts {
    OP_COUNTS.with(|c| c.get())
}

/// Run `f` with fresh counters and return its result plus the ops it used.
pub fn count_ops<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
    let before = op_counts();
    reset_op_counts();
    let result = f();
    let used = op_counts();
    OP_COUNTS.with(|c| {
        c.set(OpCounts {
            adds: before.adds + used.adds,
            muls: before.muls + used.muls,
            divs: before.divs + used.divs,
            lookups: before.lookups + used.lookups,
        })
    });
    (result, used)
}

#[inline]
fn bump(f: impl FnOnce(&mut OpCounts)) {
    OP_COUNTS.with(|c| {
        let mut counts = c.get();
        f(&mut counts);
        c.set(counts);
    });
}

// ============================================================================
// Field tables
// ============================================================================

/// A concrete GF(2^m) instance: log/exp, square-root and unit-quadratic
/// tables, plus the solvability vector `z`.
///
/// Immutable after construction and safe to share across threads; all
/// operations are pure functions of their inputs.
pub struct FieldTables {
    spec: FieldSpec,
    size: usize,
    /// exp[i] = D^i for i in 0..2*(size-1), doubled to skip a mod in mul.
    exp: Vec<u16>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u16>,
    /// sqrt[a] = the unique b with b*b = a.
    sqrt: Vec<u16>,
    /// Canonical root (bit 0 clear) of y(y+1) = d, valid iff `solvable(d)`.
    unit_quad: Vec<u16>,
    /// Solvability vector: y(y+1)=d has roots iff parity(z & d) == 0.
    z: u32,
}

impl fmt::Debug for FieldTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTables")
            .field("m", &self.spec.m)
            .field("poly", &format_args!("{:#x}", self.spec.poly))
            .finish()
    }
}

/// Build the tables for `spec`, validating that the polynomial is primitive
/// (the generator `D = x` must have multiplicative order `2^m - 1`).
pub fn make_field(spec: FieldSpec) -> Result<FieldTables, GaloisError> {
    let m = spec.m;
    if !SUPPORTED_WIDTHS.contains(&m) {
        return Err(GaloisError::UnsupportedWidth { m });
    }
    let poly = spec.poly;
    if poly & (1 << m) == 0 || poly >> (m + 1) != 0 {
        return Err(GaloisError::WrongDegree { m, poly });
    }

    let size = 1usize << m;
    let group = size - 1;

    let mut exp = vec![0u16; 2 * group];
    let mut log = vec![0u16; size];
    let mut cur: u32 = 1;
    for i in 0..group {
        exp[i] = cur as u16;
        exp[i + group] = cur as u16;
        log[cur as usize] = i as u16;
        cur <<= 1;
        if cur & (1 << m) != 0 {
            cur ^= poly;
        }
        if cur == 1 && i + 1 < group {
            return Err(GaloisError::NotPrimitive { poly });
        }
    }
    if cur != 1 {
        // The generator's order does not divide into a clean cycle; the
        // polynomial is reducible.
        return Err(GaloisError::NotPrimitive { poly });
    }

    let square = |a: usize| -> usize {
        if a == 0 {
            0
        } else {
            exp[(2 * log[a] as usize) % group] as usize
        }
    };

    let mut sqrt = vec![0u16; size];
    for a in 0..size {
        sqrt[square(a)] = a as u16;
    }

    // Frobenius matrix J (column j = coordinates of D^(2j)) and the left
    // null vector z of J+I, which encodes the solvability parity check.
    let mut ji_cols = Vec::with_capacity(m as usize);
    for j in 0..m {
        let col = exp[(2 * j as usize) % group] as u32;
        ji_cols.push(col ^ (1 << j));
    }
    let null = gf2_nullspace(&ji_cols, m);
    debug_assert_eq!(null.len(), 1, "J+I must have nullity 1");
    let z = null[0];

    let mut unit_quad = vec![0u16; size];
    for y in (0..size).step_by(2) {
        // y has bit 0 clear; y and y^1 are the two roots of y(y+1) = d.
        let d = if y == 0 {
            0
        } else {
            let y1 = y ^ 1;
            exp[(log[y] as usize + log[y1] as usize) % group] as usize
        };
        unit_quad[d] = y as u16;
    }

    Ok(FieldTables {
        spec,
        size,
        exp,
        log,
        sqrt,
        unit_quad,
        z,
    })
}

impl FieldTables {
    /// Convenience constructor returning a shareable handle.
    pub fn new_shared(spec: FieldSpec) -> Result<Arc<FieldTables>, GaloisError> {
        make_field(spec).map(Arc::new)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Number of field elements, 2^m.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn width(&self) -> u32 {
        self.spec.m
    }

    /// The generator element D = x.
    pub fn generator(&self) -> Element {
        Element(2)
    }

    /// Solvability vector z as a bitmask (bit j = z_j).
    pub fn solvability_vector(&self) -> u32 {
        self.z
    }

    /// Validated element from its integer encoding.
    pub fn element(&self, value: u64) -> Option<Element> {
        if (value as usize) < self.size {
            Some(Element(value as u16))
        } else {
            None
        }
    }

    /// All field elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.size as u32).map(|v| Element(v as u16))
    }

    /// Nonzero elements in encoding order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Element> {
        (1..self.size as u32).map(|v| Element(v as u16))
    }

    /// D^i for any exponent.
    pub fn exp(&self, i: usize) -> Element {
        Element(self.exp[i % (self.size - 1)])
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        bump(|c| c.adds += 1);
        Element(a.0 ^ b.0)
    }

    /// Subtraction coincides with addition in characteristic 2.
    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, b)
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        bump(|c| c.muls += 1);
        if a.is_zero() || b.is_zero() {
            return Element::ZERO;
        }
        let idx = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        Element(self.exp[idx])
    }

    /// Multiplicative inverse.
    ///
    /// Panics if `a` is zero; callers must reject zero divisors first.
    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        assert!(!a.is_zero(), "division by zero in GF(2^{})", self.spec.m);
        bump(|c| c.divs += 1);
        let group = self.size - 1;
        Element(self.exp[group - self.log[a.0 as usize] as usize])
    }

    /// `a / b`. Panics if `b` is zero; callers must reject zero divisors first.
    #[inline]
    pub fn div(&self, a: Element, b: Element) -> Element {
        assert!(!b.is_zero(), "division by zero in GF(2^{})", self.spec.m);
        bump(|c| c.divs += 1);
        if a.is_zero() {
            return Element::ZERO;
        }
        let group = self.size - 1;
        let idx =
            self.log[a.0 as usize] as usize + group - self.log[b.0 as usize] as usize;
        Element(self.exp[idx])
    }

    /// `a^n` by exponent arithmetic in the cyclic group; `pow(0, 0) = 1`.
    pub fn pow(&self, a: Element, n: u64) -> Element {
        bump(|c| c.muls += 1);
        if n == 0 {
            return Element::ONE;
        }
        if a.is_zero() {
            return Element::ZERO;
        }
        let group = (self.size - 1) as u64;
        let idx = (self.log[a.0 as usize] as u64 * (n % group)) % group;
        Element(self.exp[idx as usize])
    }

    #[inline]
    pub fn square(&self, a: Element) -> Element {
        self.mul(a, a)
    }

    /// The unique square root (the Frobenius map is an automorphism).
    #[inline]
    pub fn sqrt(&self, a: Element) -> Element {
        bump(|c| c.lookups += 1);
        Element(self.sqrt[a.0 as usize])
    }

    /// Whether `y(y+1) = d` has roots: the parity check `z^T d = 0`.
    #[inline]
    pub fn unit_quadratic_solvable(&self, d: Element) -> bool {
        (self.z & d.0 as u32).count_ones().is_multiple_of(2)
    }

    /// Roots of `y(y+1) = d`, canonical root (bit 0 clear) first.
    ///
    /// `None` is the unsolvable half of the field, not a fault.
    pub fn solve_unit_quadratic(&self, d: Element) -> Option<(Element, Element)> {
        bump(|c| c.lookups += 1);
        if !self.unit_quadratic_solvable(d) {
            return None;
        }
        let y0 = Element(self.unit_quad[d.0 as usize]);
        Some((y0, Element(y0.0 ^ 1)))
    }

    /// Roots of `a*x^2 + b*x + c = 0` over the field.
    ///
    /// Panics if `a` is zero (degenerate equation; caller's responsibility).
    pub fn solve_quadratic(&self, a: Element, b: Element, c: Element) -> QuadraticRoots {
        assert!(!a.is_zero(), "solve_quadratic requires a != 0");
        if b.is_zero() {
            // x^2 = c/a has exactly one (double) root.
            return QuadraticRoots::Double(self.sqrt(self.div(c, a)));
        }
        // Monic reduction and the substitution x = b*y/a... in two steps:
        // divide by a, then scale x = (b/a) y to reach y(y+1) = c*a/b^2.
        let b = self.div(b, a);
        let c = self.div(c, a);
        let d = self.div(c, self.square(b));
        match self.solve_unit_quadratic(d) {
            None => QuadraticRoots::None,
            Some((y0, y1)) => QuadraticRoots::Pair(self.mul(b, y0), self.mul(b, y1)),
        }
    }

    /// The 3rd roots of unity distinct from 1: roots of `z^2 + z + 1`.
    ///
    /// Two of them exist iff 3 divides 2^m - 1, otherwise none.
    pub fn cubic_roots_of_unity(&self) -> Vec<Element> {
        let group = self.size - 1;
        if !group.is_multiple_of(3) {
            return Vec::new();
        }
        let r1 = self.exp(group / 3);
        let r2 = self.exp(2 * group / 3);
        let mut roots = vec![r1, r2];
        roots.sort();
        roots
    }

    /// The m x m GF(2) matrix of the Frobenius map: column j holds the
    /// coordinates of D^(2j).
    pub fn frobenius_matrix(&self) -> Gf2Matrix {
        let m = self.spec.m as usize;
        let group = self.size - 1;
        let cols = (0..m).map(|j| self.exp[(2 * j) % group] as u32).collect();
        Gf2Matrix {
            dim: m,
            cols,
        }
    }
}

/// Root set of a quadratic over GF(2^m): zero, one (double), or two roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticRoots {
    None,
    Double(Element),
    Pair(Element, Element),
}

impl QuadraticRoots {
    pub fn contains(&self, x: Element) -> bool {
        match *self {
            QuadraticRoots::None => false,
            QuadraticRoots::Double(r) => r == x,
            QuadraticRoots::Pair(r, s) => r == x || s == x,
        }
    }

    /// The two distinct roots, if that is what we have.
    pub fn pair(&self) -> Option<(Element, Element)> {
        match *self {
            QuadraticRoots::Pair(r, s) => Some((r, s)),
            _ => None,
        }
    }
}

// ============================================================================
// GF(2) linear algebra (bitmask columns)
// ============================================================================

/// A square GF(2) matrix stored column-major as bitmasks (bit i of `cols[j]`
/// is entry (i, j)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    dim: usize,
    cols: Vec<u32>,
}

impl Gf2Matrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> u32 {
        self.cols[j]
    }

    /// Apply as a linear map to coordinate vector `x` (bitmask).
    pub fn apply(&self, x: u32) -> u32 {
        let mut out = 0u32;
        for (j, col) in self.cols.iter().enumerate() {
            if x & (1 << j) != 0 {
                out ^= col;
            }
        }
        out
    }

    /// XOR the identity into the matrix (J -> J + I).
    pub fn plus_identity(&self) -> Gf2Matrix {
        let cols = self
            .cols
            .iter()
            .enumerate()
            .map(|(j, c)| c ^ (1 << j))
            .collect();
        Gf2Matrix {
            dim: self.dim,
            cols,
        }
    }

    /// Rank over GF(2) by column elimination.
    pub fn rank(&self) -> usize {
        let mut cols = self.cols.clone();
        let mut rank = 0;
        for row in 0..self.dim {
            let bit = 1u32 << row;
            if let Some(p) = (rank..cols.len()).find(|&j| cols[j] & bit != 0) {
                cols.swap(rank, p);
                let pivot = cols[rank];
                for col in cols.iter_mut().skip(rank + 1) {
                    if *col & bit != 0 {
                        *col ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        rank
    }
}

/// Nullspace basis of the GF(2) system `rows . x = 0`, where each row is a
/// bitmask over `m` variables.
fn gf2_nullspace(rows: &[u32], m: u32) -> Vec<u32> {
    let m = m as usize;
    let mut rows: Vec<u32> = rows.to_vec();
    let mut pivot_col_of_row = Vec::new();

    let mut r = 0;
    for col in 0..m {
        let bit = 1u32 << col;
        if let Some(p) = (r..rows.len()).find(|&i| rows[i] & bit != 0) {
            rows.swap(r, p);
            let pivot = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && *row & bit != 0 {
                    *row ^= pivot;
                }
            }
            pivot_col_of_row.push(col);
            r += 1;
        }
    }

    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let mut basis = Vec::new();
    for free in 0..m {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = 1u32 << free;
        for (row_idx, &pc) in pivot_col_of_row.iter().enumerate() {
            if rows[row_idx] & (1 << free) != 0 {
                v |= 1 << pc;
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(m: u32) -> FieldTables {
        make_field(FieldSpec::with_default_poly(m).unwrap()).unwrap()
    }

    fn el(v: u32) -> Element {
        Element(v as u16)
    }

    #[test]
    fn solvability_vector_matches_worked_examples() {
        // m=4, g=x^4+x+1: the parity check is d_3 = 0.
        assert_eq!(gf(4).solvability_vector(), 1 << 3);
        // m=8, g=x^8+x^4+x^3+x^2+1: the parity check is d_5 = 0.
        assert_eq!(gf(8).solvability_vector(), 1 << 5);
    }

    #[test]
    fn rejects_unsupported_widths() {
        // m=5 is a valid field but outside the supported table widths.
        let err = make_field(FieldSpec::new(5, 0x25)).unwrap_err();
        assert_eq!(err, GaloisError::UnsupportedWidth { m: 5 });
        assert!(make_field(FieldSpec::new(6, 0x43)).is_err());
    }

    #[test]
    fn rejects_bad_polynomials() {
        // Wrong degree.
        assert_eq!(
            make_field(FieldSpec::new(4, 0x3)).unwrap_err(),
            GaloisError::WrongDegree { m: 4, poly: 0x3 }
        );
        // x^4+x^3+x^2+x+1 is irreducible but has order 5, not 15.
        assert_eq!(
            make_field(FieldSpec::new(4, 0x1F)).unwrap_err(),
            GaloisError::NotPrimitive { poly: 0x1F }
        );
        // x^4+1 = (x+1)^4 is reducible.
        assert!(make_field(FieldSpec::new(4, 0x11)).is_err());
    }

    #[test]
    fn multiplication_matches_gf16_worked_examples() {
        let f = gf(4);
        // D^3 * D = D^4 = D + 1
        assert_eq!(f.mul(el(8), el(2)), el(3));
        // D^3 * D^3 = D^6 = D^3 + D^2
        assert_eq!(f.mul(el(8), el(8)), el(12));
    }

    #[test]
    fn field_axioms_exhaustive_gf16() {
        let f = gf(4);
        for a in f.elements() {
            assert_eq!(f.add(a, a), Element::ZERO);
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                // Frobenius identity (a+b)^2 = a^2 + b^2.
                assert_eq!(
                    f.square(f.add(a, b)),
                    f.add(f.square(a), f.square(b))
                );
                for c in f.elements() {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn field_axioms_sampled_wide_fields() {
        for m in [8u32, 16] {
            let f = gf(m);
            let mask = (f.size() - 1) as u64;
            let mut state = 0x243F_6A88_85A3_08D3u64;
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            for _ in 0..10_000 {
                let a = Element((next() & mask) as u16);
                let b = Element((next() & mask) as u16);
                let c = Element((next() & mask) as u16);
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.square(f.add(a, b)), f.add(f.square(a), f.square(b)));
                if !b.is_zero() {
                    assert_eq!(f.div(f.mul(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn div_mul_roundtrip_exhaustive_gf16() {
        let f = gf(4);
        for a in f.elements() {
            for b in f.nonzero_elements() {
                assert_eq!(f.div(f.mul(a, b), b), a);
                assert_eq!(f.mul(f.div(a, b), b), a);
            }
        }
    }

    #[test]
    #[should_panic(expected = "division by zero")]
    fn division_by_zero_panics() {
        let f = gf(4);
        let _ = f.div(el(5), Element::ZERO);
    }

    #[test]
    fn pow_basics() {
        let f = gf(4);
        let d = f.generator();
        assert_eq!(f.pow(d, 0), Element::ONE);
        assert_eq!(f.pow(d, 4), el(3));
        assert_eq!(f.pow(d, 15), Element::ONE);
        assert_eq!(f.pow(Element::ZERO, 3), Element::ZERO);
        assert_eq!(f.pow(Element::ZERO, 0), Element::ONE);
    }

    #[test]
    fn frobenius_matrix_gf16_columns() {
        let f = gf(4);
        let j = f.frobenius_matrix();
        // Columns are the coordinates of 1, D^2, D^4, D^6.
        assert_eq!(j.column(0), 0b0001);
        assert_eq!(j.column(1), 0b0100);
        assert_eq!(j.column(2), 0b0011);
        assert_eq!(j.column(3), 0b1100);
    }

    #[test]
    fn frobenius_matrix_is_squaring() {
        for m in [3u32, 4, 8] {
            let f = gf(m);
            let j = f.frobenius_matrix();
            for a in f.elements() {
                assert_eq!(j.apply(a.0 as u32), f.square(a).0 as u32);
            }
        }
        let f = gf(16);
        let j = f.frobenius_matrix();
        for v in (0..1u32 << 16).step_by(7) {
            let a = Element(v as u16);
            assert_eq!(j.apply(v), f.square(a).0 as u32);
        }
    }

    #[test]
    fn frobenius_plus_identity_rank() {
        // Rank-nullity: ker(J+I) = {0, 1}, so the rank is m-1.
        assert_eq!(gf(8).frobenius_matrix().plus_identity().rank(), 7);
        assert_eq!(gf(4).frobenius_matrix().plus_identity().rank(), 3);
    }

    #[test]
    fn sqrt_is_inverse_frobenius() {
        for m in [3u32, 4, 8] {
            let f = gf(m);
            let mut seen = vec![false; f.size()];
            for a in f.elements() {
                let r = f.sqrt(a);
                assert_eq!(f.square(r), a);
                assert!(!seen[r.0 as usize], "sqrt must be a permutation");
                seen[r.0 as usize] = true;
            }
        }
    }

    #[test]
    fn sqrt_worked_examples() {
        let f = gf(4);
        assert_eq!(f.sqrt(Element::ZERO), Element::ZERO);
        assert_eq!(f.sqrt(Element::ONE), Element::ONE);
        // D^6 = D^3 + D^2, so sqrt(12) = D^3 = 8.
        assert_eq!(f.sqrt(el(12)), el(8));
    }

    #[test]
    fn unit_quadratic_worked_examples() {
        let f = gf(4);
        assert_eq!(
            f.solve_unit_quadratic(Element::ZERO),
            Some((Element::ZERO, Element::ONE))
        );
        // d=6 has bit 3 clear: solvable with roots {2, 3}.
        let (y0, y1) = f.solve_unit_quadratic(el(6)).unwrap();
        assert_eq!((y0, y1), (el(2), el(3)));
        // d=8 has bit 3 set: unsolvable.
        assert_eq!(f.solve_unit_quadratic(el(8)), None);
    }

    #[test]
    fn unit_quadratic_solvable_for_exactly_half() {
        for m in [3u32, 4, 8] {
            let f = gf(m);
            let mut solvable = 0;
            for d in f.elements() {
                match f.solve_unit_quadratic(d) {
                    Some((y0, y1)) => {
                        solvable += 1;
                        assert_eq!(y1.0, y0.0 ^ 1);
                        assert_eq!(f.mul(y0, f.add(y0, Element::ONE)), d);
                        assert_eq!(f.mul(y1, f.add(y1, Element::ONE)), d);
                        // Canonical root has bit 0 clear.
                        assert_eq!(y0.0 & 1, 0);
                    }
                    None => {
                        // No y at all satisfies y(y+1) = d.
                        for y in f.elements() {
                            assert_ne!(f.mul(y, f.add(y, Element::ONE)), d);
                        }
                    }
                }
                // The table agrees with the z^T d parity predicate bit-for-bit.
                assert_eq!(
                    f.solve_unit_quadratic(d).is_some(),
                    (f.solvability_vector() & d.0 as u32).count_ones().is_multiple_of(2)
                );
            }
            assert_eq!(solvable, f.size() / 2);
        }
    }

    #[test]
    fn quadratic_solver_degenerate_forms() {
        let f = gf(4);
        assert_eq!(
            f.solve_quadratic(Element::ONE, Element::ONE, Element::ZERO),
            QuadraticRoots::Pair(Element::ZERO, Element::ONE)
        );
        for c in f.elements() {
            assert_eq!(
                f.solve_quadratic(Element::ONE, Element::ZERO, c),
                QuadraticRoots::Double(f.sqrt(c))
            );
        }
    }

    #[test]
    fn quadratic_solver_vieta_exhaustive_gf16() {
        let f = gf(4);
        for u in f.nonzero_elements() {
            for v in f.nonzero_elements() {
                if u == v {
                    continue;
                }
                let s1 = f.add(u, v);
                let s2 = f.mul(u, v);
                let roots = f.solve_quadratic(Element::ONE, s1, s2);
                let (r0, r1) = roots.pair().expect("two distinct roots");
                assert!(roots.contains(u) && roots.contains(v));
                assert_eq!(f.add(r0, r1), s1);
                assert_eq!(f.mul(r0, r1), s2);
                // Roots of a*x^2+b*x+c differ by b/a.
                assert_eq!(f.add(r0, r1), s1);
            }
        }
    }

    #[test]
    fn quadratic_roots_satisfy_equation() {
        let f = gf(8);
        for a in f.nonzero_elements() {
            for b in [Element::ZERO, Element(7), Element(100)] {
                for c in [Element::ZERO, Element(1), Element(200)] {
                    let eval = |x: Element| {
                        f.add(
                            f.add(f.mul(a, f.square(x)), f.mul(b, x)),
                            c,
                        )
                    };
                    match f.solve_quadratic(a, b, c) {
                        QuadraticRoots::None => {}
                        QuadraticRoots::Double(x) => assert!(eval(x).is_zero()),
                        QuadraticRoots::Pair(x, y) => {
                            assert!(eval(x).is_zero());
                            assert!(eval(y).is_zero());
                            assert_ne!(x, y);
                        }
                    }
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "a != 0")]
    fn quadratic_rejects_zero_leading_coefficient() {
        let f = gf(4);
        let _ = f.solve_quadratic(Element::ZERO, Element::ONE, Element::ONE);
    }

    #[test]
    fn cubic_roots_of_unity_cases() {
        let f = gf(4);
        // D^5 and D^10 in GF(16).
        assert_eq!(f.cubic_roots_of_unity(), vec![el(6), el(7)]);
        for z in f.cubic_roots_of_unity() {
            let val = f.add(f.add(f.square(z), z), Element::ONE);
            assert!(val.is_zero());
        }

        // GF(8): the multiplicative group has prime order 7.
        assert!(gf(3).cubic_roots_of_unity().is_empty());

        // GF(256): two roots; sum 1, product 1.
        let f = gf(8);
        let roots = f.cubic_roots_of_unity();
        assert_eq!(roots.len(), 2);
        assert_eq!(f.add(roots[0], roots[1]), Element::ONE);
        assert_eq!(f.mul(roots[0], roots[1]), Element::ONE);
    }

    #[test]
    fn op_counters_track_per_thread() {
        let f = gf(4);
        let (_, counts) = count_ops(|| {
            let a = f.mul(el(3), el(5));
            let b = f.add(a, el(1));
            let _ = f.div(b, el(7));
            let _ = f.sqrt(el(9));
        });
        assert_eq!(counts.muls, 1);
        assert_eq!(counts.adds, 1);
        assert_eq!(counts.divs, 1);
        assert_eq!(counts.lookups, 1);
    }
}
