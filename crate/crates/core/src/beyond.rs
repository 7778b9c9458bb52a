//! List decoding beyond minimum distance.
//!
//! With 5 parities the code can still say useful things about 3- and
//! 4-drive failures even though unique decoding stops at 2 unknown errors:
//!
//! - every 3-drive failure touching at least one parity drive yields a
//!   candidate list of size at most `2k + 4` ([`recover_three_failed`]);
//! - three independent syndromes from one 3-data-drive failure locate it
//!   exactly ([`locate_three_data_multi_syndrome`]);
//! - with one parity drive erased, two unknown data errors still have a
//!   closed-form solution for most parities
//!   ([`degraded_two_data_missing_parity`]);
//! - with 3 known erasures plus one unknown failure, consistency conditions
//!   restrict the unknown position enough to attempt a repair
//!   ([`repair_3erasures_1unknown`]).
//!
//! The per-case closed forms below are determinant conditions on
//! subsystems of `H`. Every one of them is validated against brute-force
//! enumeration (see `faultlab` and the acceptance suite);
//! `docs/derivations.md` derives them and records the tempting-but-wrong
//! variants that validation rejects.

use crate::code::{parity_column, CodeParams, GfMatrix, Stripe, Syndrome};
use crate::galois::{Element, FieldTables};
use crate::mindist::solve_erasures;
use crate::types::{
    CandidateErrorList, Classification, DecodeOutcome, ErasureSet, ErrorVector, PARITY_COUNT,
};

/// Elementary symmetric polynomials of two error locators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricPair {
    pub sigma1: Element,
    pub sigma2: Element,
}

impl SymmetricPair {
    pub fn of(f: &FieldTables, u: Element, v: Element) -> Self {
        SymmetricPair {
            sigma1: f.add(u, v),
            sigma2: f.mul(u, v),
        }
    }
}

/// Elementary symmetric polynomials of three error locators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricTriple {
    pub sigma1: Element,
    pub sigma2: Element,
    pub sigma3: Element,
}

impl SymmetricTriple {
    pub fn of(f: &FieldTables, a: Element, b: Element, c: Element) -> Self {
        let ab = f.mul(a, b);
        SymmetricTriple {
            sigma1: f.add(f.add(a, b), c),
            sigma2: f.add(ab, f.mul(f.add(a, b), c)),
            sigma3: f.mul(ab, c),
        }
    }
}

/// One linear equation `c1*sigma1 + c2*sigma2 = c3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaRow {
    pub c1: Element,
    pub c2: Element,
    pub c3: Element,
}

/// The per-parity linear system for `(sigma1, sigma2)` plus its side
/// constraint; `cond` must be zero for the case to be possible at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugMatrix {
    pub rows: Vec<SigmaRow>,
    pub cond: Element,
}

/// Candidate `(u, v, x, y, z)` for two data errors plus one parity error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoDataOneParity {
    pub u: Element,
    pub v: Element,
    pub x: Element,
    pub y: Element,
    pub z: Element,
}

/// Build the `(sigma1, sigma2)` system for "two data errors plus a parity
/// error at row `parity_row`" (0-based).
///
/// Parity errors at rows 1 and 4 (paper numbering) leave only one
/// equation; their side constraint is the pure-data row dependency
/// `s2 + s3 + s5 = 0`.
pub fn augmatrix_for_parity(f: &FieldTables, s: &Syndrome, parity_row: usize) -> AugMatrix {
    let row = |c1, c2, c3| SigmaRow { c1, c2, c3 };
    match parity_row {
        // j = 1
        0 => AugMatrix {
            rows: vec![row(s.s3(), s.s2(), s.s4())],
            cond: f.add(f.add(s.s2(), s.s3()), s.s5()),
        },
        // j = 2
        1 => AugMatrix {
            rows: vec![
                row(
                    s.s5(),
                    f.add(f.add(s.s1(), s.s3()), s.s5()),
                    f.add(s.s3(), s.s4()),
                ),
                row(s.s3(), f.add(s.s3(), s.s5()), s.s4()),
            ],
            cond: Element::ZERO,
        },
        // j = 3
        2 => AugMatrix {
            rows: vec![
                row(s.s2(), s.s1(), f.add(s.s2(), s.s5())),
                row(
                    s.s5(),
                    f.add(s.s1(), s.s2()),
                    f.add(f.add(s.s2(), s.s4()), s.s5()),
                ),
            ],
            cond: Element::ZERO,
        },
        // j = 4
        3 => AugMatrix {
            rows: vec![row(s.s2(), s.s1(), s.s3())],
            cond: f.add(f.add(s.s2(), s.s3()), s.s5()),
        },
        // j = 5
        4 => AugMatrix {
            rows: vec![row(s.s2(), s.s1(), s.s3()), row(s.s3(), s.s2(), s.s4())],
            cond: Element::ZERO,
        },
        _ => panic!("parity row out of range: {parity_row}"),
    }
}

/// Solve a determined 2x2 sigma system by Cramer's rule, then the quadratic
/// `z^2 - sigma1*z + sigma2` for the locators.
///
/// `None` covers every degenerate case: vanishing determinants (the
/// syndrome matches a smaller failure) and irreducible quadratics.
pub fn locate_two_data_when_determined(
    f: &FieldTables,
    aug: &AugMatrix,
) -> Option<(Element, Element)> {
    assert_eq!(aug.rows.len(), 2, "determined case needs two rows");
    let [r0, r1] = [aug.rows[0], aug.rows[1]];
    let d = f.add(f.mul(r0.c1, r1.c2), f.mul(r1.c1, r0.c2));
    let d1 = f.add(f.mul(r0.c3, r1.c2), f.mul(r1.c3, r0.c2));
    let d2 = f.add(f.mul(r0.c1, r1.c3), f.mul(r1.c1, r0.c3));
    if d.is_zero() || d1.is_zero() || d2.is_zero() {
        return None;
    }
    let sigma1 = f.div(d1, d);
    let sigma2 = f.div(d2, d);
    f.solve_quadratic(Element::ONE, sigma1, sigma2).pair()
}

/// Sweep the underdetermined single-equation case: for each `v` in the
/// locator set the equation fixes `u = (c3 - c1*v)/(c1 + c2*v)`, except
/// when numerator and denominator both vanish, in which case `u` ranges
/// over the whole locator set. Pairs are emitted with `u < v` so each
/// solution appears once.
pub fn locate_two_data_when_underdetermined(
    params: &CodeParams,
    s: &Syndrome,
    parity_row: usize,
    row: SigmaRow,
) -> Vec<TwoDataOneParity> {
    let f = params.field();
    let mut out = Vec::new();
    for &v in params.alpha() {
        let n = f.add(row.c3, f.mul(row.c1, v));
        let d = f.add(row.c1, f.mul(row.c2, v));
        if !d.is_zero() && !n.is_zero() {
            let u = f.div(n, d);
            if u < v {
                let (x, y, z) = calculate_coefficients(f, u, v, s, parity_row);
                out.push(TwoDataOneParity { u, v, x, y, z });
            }
        } else if n.is_zero() && d.is_zero() {
            for &u in params.alpha() {
                if u < v {
                    let (x, y, z) = calculate_coefficients(f, u, v, s, parity_row);
                    out.push(TwoDataOneParity { u, v, x, y, z });
                }
            }
        }
    }
    out
}

/// Solve `x*P(u) + y*P(v) + z*I_j = s` for the values, given the locators.
///
/// The row pair used for `(x, y)` avoids the corrupted parity row: rows 1,2
/// for `j > 2`, rows 1,3 for `j = 2`, rows 2,3 for `j = 1`; `z` then
/// absorbs row `j`. Locators must be distinct and nonzero.
pub fn calculate_coefficients(
    f: &FieldTables,
    u: Element,
    v: Element,
    s: &Syndrome,
    parity_row: usize,
) -> (Element, Element, Element) {
    assert!(u != v && !u.is_zero() && !v.is_zero(), "bad locators");
    let (x, y) = match parity_row {
        0 => {
            // Rows 2 and 3.
            let d = f.mul(f.mul(u, v), f.add(v, u));
            let x = f.div(f.add(f.mul(s.s2(), f.square(v)), f.mul(s.s3(), v)), d);
            let y = f.div(f.add(f.mul(s.s2(), f.square(u)), f.mul(s.s3(), u)), d);
            (x, y)
        }
        1 => {
            // Rows 1 and 3.
            let d = f.square(f.add(v, u));
            let x = f.div(f.add(f.mul(s.s1(), f.square(v)), s.s3()), d);
            let y = f.div(f.add(f.mul(s.s1(), f.square(u)), s.s3()), d);
            (x, y)
        }
        _ => {
            // Rows 1 and 2.
            let d = f.add(v, u);
            let x = f.div(f.add(f.mul(s.s1(), v), s.s2()), d);
            let y = f.div(f.add(f.mul(s.s1(), u), s.s2()), d);
            (x, y)
        }
    };
    let pu = parity_column(f, u).0[parity_row];
    let pv = parity_column(f, v).0[parity_row];
    let z = f.add(s.0[parity_row], f.add(f.mul(x, pu), f.mul(y, pv)));
    (x, y, z)
}

/// Recover "one data drive plus parity drives `j` and `l`" (0-based rows,
/// `j < l`).
///
/// Each parity pair leaves three clean syndrome rows; eliminating the data
/// value gives the pair's constraint and a ratio formula for the locator.
/// The `(2,3)` pair has a special branch: when `s1 = s4 = s5 != 0` the
/// locator satisfies `rho^2 + rho + 1 = 0`, and the exclusion rule makes it
/// the non-excluded cubic root.
pub fn recover_data_for_two_parity(
    params: &CodeParams,
    s: &Syndrome,
    j: usize,
    l: usize,
) -> Option<ErrorVector> {
    assert!(j < l && l < PARITY_COUNT);
    let f = params.field();
    let mut rho = Element::ZERO;

    match (j, l) {
        (0, 1) => {
            let c = f.add(
                f.add(f.mul(s.s4(), s.s5()), f.mul(s.s3(), s.s4())),
                f.square(s.s3()),
            );
            if c.is_zero() {
                if !s.s3().is_zero() {
                    rho = f.div(s.s4(), s.s3());
                } else if !s.s5().is_zero() {
                    rho = f.div(f.add(s.s3(), s.s4()), s.s5());
                }
            }
        }
        (0, 2) => {
            let c = f.add(
                f.add(f.square(s.s5()), f.mul(s.s2(), s.s4())),
                f.square(s.s2()),
            );
            if c.is_zero() {
                if !s.s2().is_zero() {
                    rho = f.div(f.add(s.s2(), s.s5()), s.s2());
                } else if !s.s5().is_zero() {
                    rho = f.div(s.s2(), s.s5());
                }
            }
        }
        (0, 3) => {
            let c = f.add(f.add(s.s2(), s.s3()), s.s5());
            if c.is_zero() && !s.s2().is_zero() {
                rho = f.div(s.s3(), s.s2());
            }
        }
        (0, 4) => {
            let c = f.add(f.mul(s.s2(), s.s4()), f.square(s.s3()));
            if c.is_zero() && !s.s2().is_zero() {
                rho = f.div(s.s3(), s.s2());
            }
        }
        (1, 2) => {
            let lhs = f.mul(f.add(f.square(s.s5()), f.mul(s.s1(), s.s4())), s.s5());
            let rhs = f.mul(f.mul(s.s1(), s.s4()), f.add(s.s1(), s.s4()));
            if f.add(lhs, rhs).is_zero() {
                let den = f.add(s.s1(), s.s5());
                if !den.is_zero() {
                    rho = f.div(f.add(s.s4(), s.s5()), den);
                } else if !s.s5().is_zero() {
                    // s1 = s4 = s5: the locator is a cubic root of unity,
                    // necessarily the one that was not excluded.
                    if let Some(excluded) = params.excluded_root() {
                        rho = f.add(Element::ONE, excluded);
                    }
                }
            }
        }
        (1, 3) => {
            let c = f.add(f.square(f.add(s.s3(), s.s5())), f.mul(s.s1(), s.s3()));
            if c.is_zero() {
                let den = f.add(s.s3(), s.s5());
                if !den.is_zero() {
                    rho = f.div(s.s3(), den);
                }
            }
        }
        (1, 4) => {
            let c = f.add(
                f.mul(s.s1(), f.square(s.s4())),
                f.mul(f.square(s.s3()), s.s3()),
            );
            if c.is_zero() && !s.s3().is_zero() {
                rho = f.div(s.s4(), s.s3());
            }
        }
        (2, 3) => {
            let c = f.add(f.mul(s.s1(), f.add(s.s5(), s.s2())), f.square(s.s2()));
            if c.is_zero() && !s.s2().is_zero() {
                rho = f.div(f.add(s.s2(), s.s5()), s.s2());
            }
        }
        (2, 4) => {
            let c = f.add(
                f.mul(f.square(s.s1()), s.s4()),
                f.mul(f.square(s.s2()), s.s2()),
            );
            if c.is_zero() && !s.s2().is_zero() {
                rho = f.div(f.mul(s.s1(), s.s4()), f.square(s.s2()));
            }
        }
        (3, 4) => {
            let c = f.add(f.mul(s.s1(), s.s3()), f.square(s.s2()));
            if c.is_zero() && !s.s2().is_zero() {
                rho = f.div(s.s3(), s.s2());
            }
        }
        _ => unreachable!(),
    }

    if rho.is_zero() {
        return None;
    }
    let i = params.lookup(rho)?;
    let p = parity_column(f, rho).0;
    let free: Vec<usize> = (0..PARITY_COUNT).filter(|&r| r != j && r != l).collect();
    let [q, t, w] = [free[0], free[1], free[2]];
    // q <= 2 here, so p[q] != 0 whenever rho != 0.
    let x = f.div(s.0[q], p[q]);
    if s.0[t] != f.mul(x, p[t]) || s.0[w] != f.mul(x, p[w]) {
        return None;
    }
    let k = params.k();
    let mut e = ErrorVector::new();
    e.set(i, x);
    e.set(k + j, f.add(s.0[j], f.mul(x, p[j])));
    e.set(k + l, f.add(s.0[l], f.mul(x, p[l])));
    Some(e)
}

/// All solutions of "two data drives plus parity row `parity_row`"
/// (0-based) whose locators both belong to the locator set.
pub fn recover_two_data_for_parity(
    params: &CodeParams,
    s: &Syndrome,
    parity_row: usize,
) -> Vec<ErrorVector> {
    let f = params.field();
    let aug = augmatrix_for_parity(f, s, parity_row);
    if !aug.cond.is_zero() {
        return Vec::new();
    }
    let fits: Vec<TwoDataOneParity> = match aug.rows.len() {
        2 => match locate_two_data_when_determined(f, &aug) {
            Some((u, v)) => {
                let (x, y, z) = calculate_coefficients(f, u, v, s, parity_row);
                vec![TwoDataOneParity { u, v, x, y, z }]
            }
            None => Vec::new(),
        },
        1 => locate_two_data_when_underdetermined(params, s, parity_row, aug.rows[0]),
        _ => unreachable!(),
    };

    let k = params.k();
    let mut out = Vec::new();
    for fit in fits {
        let (Some(i1), Some(i2)) = (params.lookup(fit.u), params.lookup(fit.v)) else {
            continue;
        };
        if fit.x.is_zero() || fit.y.is_zero() {
            // A vanishing value means fewer than two data drives failed;
            // those syndromes belong to the within-distance decoder.
            continue;
        }
        let mut e = ErrorVector::new();
        e.set(i1, fit.x);
        e.set(i2, fit.y);
        e.set(k + parity_row, fit.z);
        out.push(e);
    }
    out
}

/// Partial list decoder for 3-drive failures with at least one parity
/// drive involved.
///
/// Call only after the within-distance decoder failed. The returned list is
/// deduplicated, canonically ordered, and never longer than `2k + 4`; every
/// member reproduces the query syndrome exactly.
pub fn recover_three_failed(params: &CodeParams, s: &Syndrome) -> CandidateErrorList {
    let k = params.k();
    let mut list = CandidateErrorList::new();

    let mut emit = |e: ErrorVector| {
        assert_eq!(&e.syndrome(params), s, "unsound candidate {e}");
        list.push(e);
    };

    // Three failed parity drives: only possible for weight-3 syndromes.
    if s.weight() == 3 {
        let mut e = ErrorVector::new();
        for row in s.nonzero_rows() {
            e.set(k + row, s.0[row]);
        }
        emit(e);
    }

    // Two failed parity drives plus one data drive.
    for j in 0..PARITY_COUNT {
        for l in (j + 1)..PARITY_COUNT {
            if let Some(e) = recover_data_for_two_parity(params, s, j, l) {
                emit(e);
            }
        }
    }

    // One failed parity drive plus two data drives.
    for parity_row in 0..PARITY_COUNT {
        for e in recover_two_data_for_parity(params, s, parity_row) {
            emit(e);
        }
    }

    list.canonicalize(k);
    assert!(
        list.len() <= 2 * k + 4,
        "candidate list exceeded the 2k+4 bound: {} > {}",
        list.len(),
        2 * k + 4
    );
    list
}

/// Consistency value for "exactly 3 failed data drives": zero iff the
/// symmetric polynomials fit the syndrome. Requires `s2 + s3 + s5 = 0`.
pub fn three_data_consistency(f: &FieldTables, sigma: &SymmetricTriple, s: &Syndrome) -> Element {
    f.add(
        f.add(s.s4(), f.mul(sigma.sigma1, s.s3())),
        f.add(f.mul(sigma.sigma2, s.s2()), f.mul(sigma.sigma3, s.s1())),
    )
}

/// Roots of `z^3 - sigma1*z^2 + sigma2*z - sigma3` within the locator set.
///
/// Only locator-set members are admissible failure locations, so an O(k)
/// scan replaces general cubic root finding.
pub fn solve_cubic_over_alpha(params: &CodeParams, sigma: &SymmetricTriple) -> Vec<Element> {
    let f = params.field();
    params
        .alpha()
        .iter()
        .copied()
        .filter(|&a| {
            let v = f.add(
                f.mul(f.add(f.mul(f.add(a, sigma.sigma1), a), sigma.sigma2), a),
                sigma.sigma3,
            );
            v.is_zero()
        })
        .collect()
}

/// Result of multi-syndrome 3-data-drive location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThreeDataLocation {
    /// Exactly one admissible triple of data indices (sorted).
    Unique([usize; 3]),
    /// Two usable syndromes: every admissible triple, at most `k` of them.
    Candidates(Vec<[usize; 3]>),
    /// Four independent syndromes cannot come from <= 3 data drives.
    Overdetermined,
    /// The sigma system is consistent but no admissible triple exists.
    NoSolution,
    /// Fewer than two independent syndromes: nothing to work with.
    Insufficient,
}

/// Locate 3 failed data drives from repeated syndromes of the same failure.
///
/// Each syndrome must satisfy the pure-data dependency `s5 = s2 + s3`. With
/// 3 syndromes independent on their first three coordinates the sigma
/// system is square and the failure triple is unique; 4 independent
/// syndromes rule out any 3-data explanation; with 2, the solutions sweep
/// out at most `k` candidate triples (one per assumed member locator).
pub fn locate_three_data_multi_syndrome(
    params: &CodeParams,
    syndromes: &[Syndrome],
) -> ThreeDataLocation {
    let f = params.field();
    for s in syndromes {
        debug_assert!(
            f.add(f.add(s.s2(), s.s3()), s.s5()).is_zero(),
            "syndrome implicates a parity drive"
        );
    }

    let full = GfMatrix::from_rows(
        syndromes
            .iter()
            .map(|s| vec![s.s1(), s.s2(), s.s3(), s.s4()])
            .collect(),
    );
    if full.rank(f) >= 4 {
        return ThreeDataLocation::Overdetermined;
    }

    // One sigma equation per syndrome: s3*sigma1 + s2*sigma2 + s1*sigma3 = s4.
    let sigma_row = |s: &Syndrome| vec![s.s3(), s.s2(), s.s1()];
    let first3 = GfMatrix::from_rows(syndromes.iter().map(sigma_row).collect());

    if first3.rank(f) >= 3 {
        let mut chosen: Vec<usize> = Vec::new();
        for i in 0..syndromes.len() {
            let mut trial = chosen.clone();
            trial.push(i);
            let m =
                GfMatrix::from_rows(trial.iter().map(|&t| sigma_row(&syndromes[t])).collect());
            if m.rank(f) == trial.len() {
                chosen = trial;
                if chosen.len() == 3 {
                    break;
                }
            }
        }
        let m = GfMatrix::from_rows(chosen.iter().map(|&t| sigma_row(&syndromes[t])).collect());
        let rhs: Vec<Element> = chosen.iter().map(|&t| syndromes[t].s4()).collect();
        let Some(sol) = m.solve(f, &rhs) else {
            return ThreeDataLocation::NoSolution;
        };
        let sigma = SymmetricTriple {
            sigma1: sol[0],
            sigma2: sol[1],
            sigma3: sol[2],
        };
        let roots = solve_cubic_over_alpha(params, &sigma);
        if roots.len() != 3 {
            return ThreeDataLocation::NoSolution;
        }
        let mut triple = [
            params.lookup(roots[0]).unwrap(),
            params.lookup(roots[1]).unwrap(),
            params.lookup(roots[2]).unwrap(),
        ];
        triple.sort_unstable();
        return ThreeDataLocation::Unique(triple);
    }

    // Two independent syndromes: sweeping an assumed member locator `a`
    // adds the linear equation sigma1*a^2 + sigma2*a + sigma3 = a^3 and
    // usually pins the sigmas.
    let mut pair: Option<(usize, usize)> = None;
    'outer: for i in 0..syndromes.len() {
        for j in (i + 1)..syndromes.len() {
            let m = GfMatrix::from_rows(vec![sigma_row(&syndromes[i]), sigma_row(&syndromes[j])]);
            if m.rank(f) == 2 {
                pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let Some((i, j)) = pair else {
        return ThreeDataLocation::Insufficient;
    };

    let mut found: Vec<[usize; 3]> = Vec::new();
    for &a in params.alpha() {
        let a2 = f.square(a);
        let a3 = f.mul(a2, a);
        let m = GfMatrix::from_rows(vec![
            sigma_row(&syndromes[i]),
            sigma_row(&syndromes[j]),
            vec![a2, a, Element::ONE],
        ]);
        let Some(sol) = m.solve(f, &[syndromes[i].s4(), syndromes[j].s4(), a3]) else {
            continue;
        };
        let sigma = SymmetricTriple {
            sigma1: sol[0],
            sigma2: sol[1],
            sigma3: sol[2],
        };
        let roots = solve_cubic_over_alpha(params, &sigma);
        if roots.len() != 3 || !roots.contains(&a) {
            continue;
        }
        let mut triple = [
            params.lookup(roots[0]).unwrap(),
            params.lookup(roots[1]).unwrap(),
            params.lookup(roots[2]).unwrap(),
        ];
        triple.sort_unstable();
        if !found.contains(&triple) {
            found.push(triple);
        }
    }
    debug_assert!(found.len() <= params.k());
    ThreeDataLocation::Candidates(found)
}

// ============================================================================
// Degraded modes: one parity drive erased, two unknown data errors
// ============================================================================

/// Outcome of the degraded-mode two-data solve with one parity erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegradedTwoData {
    /// Closed-form unique solution (erased parity 2, 3 or 5).
    Unique {
        u: Element,
        v: Element,
        x: Element,
        y: Element,
    },
    /// Erased parity 1 or 4: a one-dimensional family
    /// `c1*sigma1 + c2*sigma2 = c3`, unique only with another known
    /// locator. `single_data` carries the one-data-drive fallback when the
    /// syndrome supports it.
    Underdetermined {
        constraint: SigmaRow,
        single_data: Option<(Element, Element)>,
    },
    /// Consistency rows failed or the system degenerated.
    NoSolution,
}

/// Two unknown data errors with parity row `parity_row` (0-based) known to
/// be erased.
///
/// For erased parities 2, 3 and 5 the sigma pair has a closed form behind a
/// non-degeneracy denominator; parities 1 and 4 yield only a linear
/// constraint on the sigmas plus a single-data fallback. The row-1 and
/// row-4 cases require the data-only dependency `s2 + s3 = s5`.
pub fn degraded_two_data_missing_parity(
    params: &CodeParams,
    s: &Syndrome,
    parity_row: usize,
) -> DegradedTwoData {
    let f = params.field();
    let unique = |sigma1: Element, sigma2: Element| -> DegradedTwoData {
        if sigma1.is_zero() || sigma2.is_zero() {
            return DegradedTwoData::NoSolution;
        }
        let Some((u, v)) = f.solve_quadratic(Element::ONE, sigma1, sigma2).pair() else {
            return DegradedTwoData::NoSolution;
        };
        let (x, y, _) = calculate_coefficients(f, u, v, s, parity_row);
        DegradedTwoData::Unique { u, v, x, y }
    };

    match parity_row {
        // j = 1: rows 2..5 remain and s5 = s2 + s3 is the parity check.
        0 => {
            if f.add(s.s2(), s.s3()) != s.s5() {
                return DegradedTwoData::NoSolution;
            }
            let constraint = SigmaRow {
                c1: s.s3(),
                c2: s.s2(),
                c3: s.s4(),
            };
            let single_data = (!s.s2().is_zero()
                && !s.s3().is_zero()
                && f.mul(s.s2(), s.s4()) == f.square(s.s3()))
            .then(|| {
                let u = f.div(s.s3(), s.s2());
                (u, f.div(s.s2(), u))
            });
            DegradedTwoData::Underdetermined {
                constraint,
                single_data,
            }
        }
        // j = 2: denominator (s3+s5)^2 + s1*s3.
        1 => {
            let t = f.add(s.s3(), s.s5());
            let den = f.add(f.square(t), f.mul(s.s1(), s.s3()));
            if den.is_zero() {
                return DegradedTwoData::NoSolution;
            }
            let sigma1 = f.div(f.add(f.mul(s.s3(), t), f.mul(s.s1(), s.s4())), den);
            let sigma2 = f.div(f.add(f.mul(s.s4(), t), f.square(s.s3())), den);
            unique(sigma1, sigma2)
        }
        // j = 3: denominator s1*(s2+s5) + s2^2.
        2 => {
            let t = f.add(s.s2(), s.s5());
            let den = f.add(f.mul(s.s1(), t), f.square(s.s2()));
            if den.is_zero() {
                return DegradedTwoData::NoSolution;
            }
            let sigma1 = f.div(f.add(f.mul(s.s2(), t), f.mul(s.s1(), s.s4())), den);
            let sigma2 = f.div(f.add(f.square(t), f.mul(s.s2(), s.s4())), den);
            unique(sigma1, sigma2)
        }
        // j = 4: rows 1, 2, 3, 5 remain; s5 = s2 + s3 again.
        3 => {
            if f.add(s.s2(), s.s3()) != s.s5() {
                return DegradedTwoData::NoSolution;
            }
            let constraint = SigmaRow {
                c1: s.s2(),
                c2: s.s1(),
                c3: s.s3(),
            };
            let single_data = (!s.s1().is_zero()
                && !s.s2().is_zero()
                && f.mul(s.s1(), s.s3()) == f.square(s.s2()))
            .then(|| (f.div(s.s2(), s.s1()), s.s1()));
            DegradedTwoData::Underdetermined {
                constraint,
                single_data,
            }
        }
        // j = 5: the Vandermonde rows 1..4; denominator s1*s3 + s2^2.
        4 => {
            let den = f.add(f.mul(s.s1(), s.s3()), f.square(s.s2()));
            if den.is_zero() {
                return DegradedTwoData::NoSolution;
            }
            let sigma1 = f.div(f.add(f.mul(s.s2(), s.s3()), f.mul(s.s1(), s.s4())), den);
            let sigma2 = f.div(f.add(f.mul(s.s2(), s.s4()), f.square(s.s3())), den);
            unique(sigma1, sigma2)
        }
        _ => panic!("parity row out of range: {parity_row}"),
    }
}

// ============================================================================
// Four failed drives: consistency conditions
// ============================================================================

/// Consistency value for "3 data drives plus a parity error at
/// `parity_row`" (0-based): zero iff a weight-4 solution with that shape
/// exists for the given locator triple.
pub fn four_failure_consistency_3d1p(
    f: &FieldTables,
    parity_row: usize,
    sigma: &SymmetricTriple,
    s: &Syndrome,
) -> Element {
    match parity_row {
        // Rows 1 and 4: the three remaining polynomial rows keep the row-5
        // dependency, so the condition is locator-free.
        0 | 3 => f.add(f.add(s.s2(), s.s3()), s.s5()),
        1 => f.add(
            f.add(s.s4(), f.mul(sigma.sigma1, s.s3())),
            f.add(
                f.mul(sigma.sigma2, f.add(s.s3(), s.s5())),
                f.mul(sigma.sigma3, s.s1()),
            ),
        ),
        2 => f.add(
            f.add(s.s4(), f.mul(sigma.sigma1, f.add(s.s2(), s.s5()))),
            f.add(f.mul(sigma.sigma2, s.s2()), f.mul(sigma.sigma3, s.s1())),
        ),
        4 => three_data_consistency(f, sigma, s),
        _ => panic!("parity row out of range: {parity_row}"),
    }
}

/// Consistency and degeneracy values for "2 data drives plus parity errors
/// at rows `j` and `l`" (0-based, `j < l`).
///
/// The consistency value is zero iff a weight-4 solution with that shape
/// exists. The degeneracy value is zero when the consistency equation
/// stops restricting an unknown locator; per the cross-reference with the
/// 1-data-2-parity constraints that means a likelier <= 3-error
/// explanation fits the syndrome.
pub fn four_failure_consistency_2d2p(
    f: &FieldTables,
    j: usize,
    l: usize,
    sigma: &SymmetricPair,
    s: &Syndrome,
) -> (Element, Element) {
    assert!(j < l && l < PARITY_COUNT);
    let (s1, s2, s3, s4, s5) = (s.s1(), s.s2(), s.s3(), s.s4(), s.s5());
    let (g1, g2) = (sigma.sigma1, sigma.sigma2);
    match (j, l) {
        (0, 1) => (
            f.add(f.add(f.mul(g2, f.add(s5, s3)), s4), f.mul(g1, s3)),
            f.add(f.add(f.mul(s4, s5), f.mul(s3, s4)), f.square(s3)),
        ),
        (0, 2) => (
            f.add(f.add(f.mul(g1, f.add(s5, s2)), s4), f.mul(s2, g2)),
            f.add(f.add(f.square(s5), f.mul(s2, s4)), f.square(s2)),
        ),
        // Parity errors at rows 1 and 4 leave rows {2,3,5}, whose only
        // relation is the row dependency; the condition cannot restrict
        // the locators at all, hence the always-degenerate marker.
        (0, 3) => (f.add(f.add(s2, s3), s5), Element::ZERO),
        (0, 4) => (
            f.add(f.add(s4, f.mul(g1, s3)), f.mul(s2, g2)),
            f.add(f.mul(s2, s4), f.square(s3)),
        ),
        (1, 2) => (
            f.add(
                f.add(
                    f.add(f.mul(g2, s5), f.mul(f.square(g1), s5)),
                    f.add(f.mul(g1, s4), s4),
                ),
                f.add(f.mul(s1, f.square(g2)), f.mul(s1, f.mul(g1, g2))),
            ),
            f.add(
                f.add(f.mul(f.square(s5), s5), f.mul(s1, f.mul(s4, s5))),
                f.add(f.mul(s1, f.square(s4)), f.mul(f.square(s1), s4)),
            ),
        ),
        (1, 3) => (
            f.add(f.add(f.mul(g1, f.add(s5, s3)), s3), f.mul(s1, g2)),
            f.add(f.add(f.square(s5), f.square(s3)), f.mul(s1, s3)),
        ),
        (1, 4) => (
            f.add(
                f.add(f.mul(g1, s4), f.mul(g2, s3)),
                f.add(f.mul(f.square(g1), s3), f.mul(s1, f.square(g2))),
            ),
            f.add(f.mul(s1, f.square(s4)), f.mul(f.square(s3), s3)),
        ),
        (2, 3) => (
            f.add(f.add(s5, f.mul(s1, g2)), f.add(f.mul(g1, s2), s2)),
            f.add(f.add(f.mul(s1, s5), f.square(s2)), f.mul(s1, s2)),
        ),
        (2, 4) => (
            f.add(
                f.add(s4, f.mul(s2, g2)),
                f.add(f.mul(s1, f.mul(g1, g2)), f.mul(f.square(g1), s2)),
            ),
            f.add(f.mul(f.square(s1), s4), f.mul(f.square(s2), s2)),
        ),
        (3, 4) => (
            f.add(f.add(s3, f.mul(s1, g2)), f.mul(g1, s2)),
            f.add(f.mul(s1, s3), f.square(s2)),
        ),
        _ => panic!("bad parity pair ({j}, {l})"),
    }
}

// ============================================================================
// Repair with 3 erasures plus one unknown failure
// ============================================================================

/// Result of [`repair_3erasures_1unknown`]: the decode outcome plus the
/// candidate explanations when the repair is not unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub outcome: DecodeOutcome,
    pub candidates: CandidateErrorList,
}

/// How the consistency machinery restricts the unknown 4th data position.
enum DataRestriction {
    /// Admissible locators: roots of the restriction polynomial.
    Roots(Vec<Element>),
    /// The restriction vanished identically: every remaining data position
    /// explains the syndrome equally well (a structural tie), so no data
    /// candidate may be auto-applied.
    Degenerate(Vec<Element>),
}

/// Consistency value for "erasures plus one more data drive with locator
/// `u`", from the 4-failure tables with the known locators substituted.
fn data_consistency_value(
    params: &CodeParams,
    s: &Syndrome,
    data_locs: &[Element],
    parity_rows: &[usize],
    u: Element,
) -> Element {
    let f = params.field();
    match (data_locs.len(), parity_rows.len()) {
        (2, 1) => {
            let sigma = SymmetricTriple::of(f, data_locs[0], data_locs[1], u);
            four_failure_consistency_3d1p(f, parity_rows[0], &sigma, s)
        }
        (1, 2) => {
            let sigma = SymmetricPair::of(f, data_locs[0], u);
            four_failure_consistency_2d2p(f, parity_rows[0], parity_rows[1], &sigma, s).0
        }
        (3, 0) => {
            // Four data failures: the only condition is the row dependency.
            f.add(f.add(s.s2(), s.s3()), s.s5())
        }
        (0, 3) => {
            // One data drive plus three parity erasures: the two untouched
            // rows must be proportional to P(u).
            let free: Vec<usize> = (0..PARITY_COUNT)
                .filter(|r| !parity_rows.contains(r))
                .collect();
            let p = parity_column(f, u).0;
            f.add(
                f.mul(s.0[free[0]], p[free[1]]),
                f.mul(s.0[free[1]], p[free[0]]),
            )
        }
        _ => unreachable!("erasure split out of range"),
    }
}

fn restrict_data_candidates(
    params: &CodeParams,
    s: &Syndrome,
    erasures: &ErasureSet,
) -> DataRestriction {
    let k = params.k();
    let (data_idx, parity_rows) = erasures.split(k);
    let data_locs: Vec<Element> = data_idx.iter().map(|&i| params.locator(i)).collect();

    let mut roots = Vec::new();
    let mut admissible = 0usize;
    for i in 0..k {
        if erasures.contains(i) {
            continue;
        }
        admissible += 1;
        let u = params.locator(i);
        if data_consistency_value(params, s, &data_locs, &parity_rows, u).is_zero() {
            roots.push(u);
        }
    }
    // The restriction polynomial has degree <= 3 in the unknown locator;
    // more than 3 roots means it vanished identically.
    if admissible > 3 && roots.len() == admissible {
        DataRestriction::Degenerate(roots)
    } else {
        DataRestriction::Roots(roots)
    }
}

/// Repair a stripe with exactly 3 known erasures plus at most one unknown
/// failed drive.
///
/// The erasure-only explanation is preferred. Otherwise the 4-failure
/// consistency conditions with the known locators substituted restrict the
/// unknown data position (linearly or quadratically in the unknown
/// locator, outside degenerate configurations), parity positions are tried
/// directly, and every candidate is solved as a 4-erasure system and
/// validated against the full syndrome. A unique survivor repairs the
/// stripe; several produce a candidate list. A degenerate restriction —
/// every remaining data position tied — is demoted: the tie is listed but
/// never auto-applied, since a smaller-weight explanation is more likely
/// than a blind pick.
pub fn repair_3erasures_1unknown(
    params: &CodeParams,
    received: &Stripe,
    erasures: &ErasureSet,
) -> RepairOutcome {
    assert_eq!(erasures.len(), 3, "exactly 3 known erasures required");
    let k = params.k();
    let s = params.syndrome(received);

    if s.is_zero() {
        return RepairOutcome {
            outcome: DecodeOutcome::Clean,
            candidates: CandidateErrorList::new(),
        };
    }

    // Unknown error inside the erasure set (or no 4th error at all).
    if let Some(error) = solve_erasures(params, &s, erasures) {
        return RepairOutcome {
            outcome: DecodeOutcome::Corrected {
                error,
                classification: Classification::ErasureRepair,
            },
            candidates: CandidateErrorList::new(),
        };
    }

    let mut candidates = CandidateErrorList::new();
    let try_position = |p: usize, candidates: &mut CandidateErrorList| {
        let mut widened = erasures.clone();
        widened.insert(p);
        if let Some(error) = solve_erasures(params, &s, &widened) {
            if !error.get(p).is_zero() {
                candidates.push(error);
            }
        }
    };

    for row in 0..PARITY_COUNT {
        let p = k + row;
        if !erasures.contains(p) {
            try_position(p, &mut candidates);
        }
    }

    let mut tied = false;
    match restrict_data_candidates(params, &s, erasures) {
        DataRestriction::Roots(roots) => {
            for u in roots {
                let i = params.lookup(u).expect("restriction scans the locator set");
                try_position(i, &mut candidates);
            }
        }
        DataRestriction::Degenerate(roots) => {
            // Structural tie: list every explanation but never auto-apply
            // one — a smaller-weight interpretation is more likely than a
            // blind pick from the tie.
            tied = true;
            for u in roots {
                let i = params.lookup(u).expect("restriction scans the locator set");
                try_position(i, &mut candidates);
            }
        }
    }

    candidates.canonicalize(k);
    let outcome = if candidates.len() == 1 && !tied {
        DecodeOutcome::Corrected {
            error: candidates.iter().next().unwrap().clone(),
            classification: Classification::ErasureRepair,
        }
    } else {
        DecodeOutcome::DetectedUncorrectable
    };
    RepairOutcome {
        outcome,
        candidates,
    }
}
