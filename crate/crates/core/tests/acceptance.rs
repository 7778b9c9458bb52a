//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance is hard-coded here; a criterion fails loudly rather
//! than degrade.

use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;

use prd5::beyond::{
    degraded_two_data_missing_parity, four_failure_consistency_2d2p,
    four_failure_consistency_3d1p, locate_three_data_multi_syndrome, recover_data_for_two_parity,
    recover_three_failed, recover_two_data_for_parity, DegradedTwoData, SymmetricPair,
    SymmetricTriple, ThreeDataLocation,
};
use prd5::code::{build_code, k_max, AlphaPolicy};
use prd5::faultlab::{
    count_localization_ops, oracle_decode, run_campaign, ErrorModel, TrialSpec, ValueModel,
};
use prd5::galois::{make_field, FieldSpec};
use prd5::mindist::{decode_combined, decode_stripe, decode_syndrome};
use prd5::shardset::{cmd_encode, cmd_inject, cmd_reassemble, cmd_scrub, FieldChoice};
use prd5::{
    CodeParams, DecodeOutcome, Element, ErasureSet, ErrorVector, FieldTables, Syndrome,
    PARITY_COUNT,
};

// The sweeps below share the process-wide rayon pool, and three criteria
// assert wall-clock budgets; heavy tests take this lock so a timed window
// never competes with a sibling sweep for cores.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy() -> std::sync::MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|e| e.into_inner())
}

fn field(m: u32) -> Arc<FieldTables> {
    Arc::new(make_field(FieldSpec::with_default_poly(m).unwrap()).unwrap())
}

fn code(m: u32, k: usize) -> CodeParams {
    build_code(field(m), k, AlphaPolicy::GeneratorPowers).unwrap()
}

fn el(v: u32) -> Element {
    Element(v as u16)
}

// Deterministic sampler for test-local randomness.
fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut x = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn below(seed: u64, a: u64, b: u64, n: u64) -> u64 {
    ((mix(seed, a, b) as u128 * n as u128) >> 64) as u64
}

fn random_data(params: &CodeParams, seed: u64, tag: u64) -> Vec<Element> {
    let q = params.field().size() as u64;
    (0..params.k())
        .map(|i| Element(below(seed, tag, i as u64, q) as u16))
        .collect()
}

fn distinct(seed: u64, tag: u64, count: usize, n: usize, exclude: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    let mut draw = 0u64;
    while out.len() < count {
        let p = below(seed, tag, draw, n as u64) as usize;
        draw += 1;
        if !out.contains(&p) && !exclude.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn nonzero(params: &CodeParams, seed: u64, tag: u64, draw: u64) -> Element {
    let q1 = (params.field().size() - 1) as u64;
    Element((1 + below(seed, tag, draw, q1)) as u16)
}

/// Criterion 1: every error of weight <= 2 over GF(16), k=13 (34,695
/// vectors) decodes to exactly the injected error, in under 30 s.
#[test]
fn criterion_01_exhaustive_two_error_correction() {
    let _lock = heavy();
    let start = Instant::now();
    let params = code(4, 13);
    let n = params.n();
    let q1 = params.field().size() as u32 - 1;

    let singles: Vec<ErrorVector> = (0..n)
        .flat_map(|p| (1..=q1).map(move |v| ErrorVector::from_entries([(p, el(v))])))
        .collect();
    let pairs: Vec<ErrorVector> = (0..n)
        .flat_map(|p1| {
            ((p1 + 1)..n).flat_map(move |p2| {
                (1..=q1).flat_map(move |v1| {
                    (1..=q1)
                        .map(move |v2| ErrorVector::from_entries([(p1, el(v1)), (p2, el(v2))]))
                })
            })
        })
        .collect();
    let total = singles.len() + pairs.len();
    assert_eq!(total, 34_695, "enumeration size");

    let failures: usize = singles
        .par_iter()
        .chain(pairs.par_iter())
        .map(|e| {
            let s = e.syndrome(&params);
            match decode_syndrome(&params, &s) {
                DecodeOutcome::Corrected { error, .. } if &error == e => 0usize,
                _ => 1usize,
            }
        })
        .sum();
    assert_eq!(failures, 0, "exhaustive weight<=2 sweep");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!("PASS criterion 1: 34695/34695 weight<=2 errors decoded exactly in {elapsed:?}");
}

/// Criterion 2: GF(16), k=14 — all 3,876 four-column subsets of H have
/// rank 4; five parity-matrix columns are dependent.
#[test]
fn criterion_02_distance_is_five() {
    let params = code(4, 14);
    let f = params.field();
    let n = params.n();
    let rows: Vec<usize> = (0..PARITY_COUNT).collect();

    let mut checked = 0usize;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    let sub = params.h_submatrix(&rows, &[a, b, c, d]);
                    assert_eq!(sub.rank(f), 4, "columns ({a},{b},{c},{d})");
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 3_876);

    // Any 5 columns of P are dependent (row 5 = row 2 + row 3).
    let five = params.h_submatrix(&rows, &[0, 1, 2, 3, 4]);
    assert!(five.rank(f) < 5, "five P columns must be dependent");
    println!("PASS criterion 2: all 3876 4-column subsets rank 4; a 5-column subset is dependent");
}

/// Criterion 3: GF(16), k=8 — all 715 erasure patterns of size 4, for 100
/// random stripes each, recover bit-exactly in under 10 s.
#[test]
fn criterion_03_four_erasure_recovery() {
    let _lock = heavy();
    let start = Instant::now();
    let params = code(4, 8);
    let n = params.n();
    let positions: Vec<usize> = (0..n).collect();

    let mut patterns = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    patterns.push([positions[a], positions[b], positions[c], positions[d]]);
                }
            }
        }
    }
    assert_eq!(patterns.len(), 715);

    let failures: usize = patterns
        .par_iter()
        .map(|pattern| {
            let erasures = ErasureSet::from_positions(pattern.iter().copied());
            let mut bad = 0usize;
            for trial in 0..100u64 {
                let data = random_data(&params, 3, trial);
                let t = params.encode(&data).unwrap();
                let mut r = t.clone();
                for &p in pattern {
                    r.set_symbol(p, Element::ZERO);
                }
                match prd5::mindist::decode_erasures(&params, &r, &erasures) {
                    DecodeOutcome::Corrected { error, .. } if r.apply(&error) == t => {}
                    _ => bad += 1,
                }
            }
            bad
        })
        .sum();
    assert_eq!(failures, 0);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}");
    println!("PASS criterion 3: 715 patterns x 100 stripes recovered bit-exactly in {elapsed:?}");
}

/// Criterion 4: every (Z, E) with Z + 2E <= 4 recovers exactly on all
/// position patterns with 16 sampled value assignments each (GF(16), k=8).
#[test]
fn criterion_04_combined_budgets() {
    let _lock = heavy();
    let params = code(4, 8);
    let n = params.n();
    let budgets = [(2usize, 1usize), (1, 1), (3, 0), (4, 0), (0, 2), (0, 1)];
    let all: Vec<usize> = (0..n).collect();

    for (z, e_count) in budgets {
        let mut patterns: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for erasure_pattern in subsets_of(&all, z) {
            let rest: Vec<usize> = all
                .iter()
                .copied()
                .filter(|p| !erasure_pattern.contains(p))
                .collect();
            for error_pattern in subsets_of(&rest, e_count) {
                patterns.push((erasure_pattern.clone(), error_pattern));
            }
        }

        let failures: usize = patterns
            .par_iter()
            .enumerate()
            .map(|(pi, (erasure_pattern, error_pattern))| {
                let erasures = ErasureSet::from_positions(erasure_pattern.iter().copied());
                let mut bad = 0usize;
                for trial in 0..16u64 {
                    let tag = (pi as u64) << 8 | trial;
                    let data = random_data(&params, 4, tag);
                    let t = params.encode(&data).unwrap();
                    let mut r = t.clone();
                    for (i, &p) in error_pattern.iter().enumerate() {
                        let v = nonzero(&params, 5, tag, i as u64);
                        r.set_symbol(p, params.field().add(r.symbol(p), v));
                    }
                    for &p in erasure_pattern {
                        r.set_symbol(p, Element::ZERO);
                    }
                    let outcome = if z == 0 {
                        decode_stripe(&params, &r)
                    } else {
                        decode_combined(&params, &r, &erasures)
                    };
                    match outcome {
                        DecodeOutcome::Clean if r == t => {}
                        DecodeOutcome::Corrected { error, .. } if r.apply(&error) == t => {}
                        _ => bad += 1,
                    }
                }
                bad
            })
            .sum();
        assert_eq!(failures, 0, "budget (Z={z}, E={e_count})");
    }
    println!("PASS criterion 4: all (Z,E) budgets with Z+2E<=4 recover exactly");
}

fn subsets_of(items: &[usize], t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    fn rec(items: &[usize], t: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, t, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, t, 0, &mut Vec::new(), &mut out);
    out
}

/// Criterion 5: unit-quadratic solvability is exactly the documented
/// parity bit — bit 3 for GF(16), bit 5 for GF(256) — and solvable values
/// have two roots differing by 1.
#[test]
fn criterion_05_quadratic_solvability() {
    for (m, bit, expect) in [(4u32, 3u32, 8usize), (8, 5, 128)] {
        let f = field(m);
        let mut solvable = 0usize;
        for d in f.elements() {
            match f.solve_unit_quadratic(d) {
                Some((y0, y1)) => {
                    solvable += 1;
                    assert_eq!(d.0 >> bit & 1, 0, "m={m}: solvable d={d} has bit {bit} set");
                    assert_eq!(y0.0 ^ y1.0, 1, "roots differ by 1");
                    assert_eq!(f.mul(y0, f.add(y0, Element::ONE)), d);
                }
                None => {
                    assert_eq!(d.0 >> bit & 1, 1, "m={m}: unsolvable d={d} has bit {bit} clear");
                }
            }
        }
        assert_eq!(solvable, expect, "m={m}");
    }
    println!("PASS criterion 5: solvability is d3=0 on GF(16) (8/16) and d5=0 on GF(256) (128/256)");
}

/// Criterion 6: 10^4 forward-constructed weight-3 errors with at least one
/// parity entry — the candidate list contains the truth and never exceeds
/// 2k + 4 = 30 (GF(16), k=13).
#[test]
fn criterion_06_list_decoding_bound() {
    let _lock = heavy();
    let params = code(4, 13);
    let k = params.k();
    let n = params.n();
    let bound = 2 * k + 4;
    assert_eq!(bound, 30);

    let mut done = 0u64;
    let mut attempt = 0u64;
    let mut max_len = 0usize;
    while done < 10_000 {
        attempt += 1;
        // 1..=3 parity entries, remainder data.
        let parity_count = 1 + (below(6, attempt, 0, 3) as usize);
        let parity_rows = distinct(6, attempt ^ 0x10, parity_count, PARITY_COUNT, &[]);
        let data_idx = distinct(6, attempt ^ 0x20, 3 - parity_count, k, &[]);
        let mut e = ErrorVector::new();
        for (i, &row) in parity_rows.iter().enumerate() {
            e.set(k + row, nonzero(&params, 6, attempt ^ 0x30, i as u64));
        }
        for (i, &idx) in data_idx.iter().enumerate() {
            e.set(idx, nonzero(&params, 6, attempt ^ 0x40, i as u64));
        }
        let s = e.syndrome(&params);
        // The list decoder's contract starts where unique decoding fails.
        if !matches!(decode_syndrome(&params, &s), DecodeOutcome::DetectedUncorrectable) {
            continue;
        }
        let list = recover_three_failed(&params, &s);
        assert!(list.contains(&e), "truth missing for {e}");
        assert!(list.len() <= bound, "bound violated: {} > {bound}", list.len());
        max_len = max_len.max(list.len());
        done += 1;
        let _ = n;
    }
    println!("PASS criterion 6: truth in list for 10000 weight-3 errors, max |list| = {max_len} <= 30");
}

/// Criterion 7: 10^3 trials of 3 independent syndromes from a fixed 3-data
/// failure always locate exactly that triple.
#[test]
fn criterion_07_multi_syndrome_location() {
    let params = code(4, 13);
    let k = params.k();
    let mut successes = 0u64;
    for trial in 0..1_000u64 {
        let triple = distinct(7, trial, 3, k, &[]);
        let mut expected: [usize; 3] = [triple[0], triple[1], triple[2]];
        expected.sort_unstable();

        // Resample value triples until the syndromes are independent on
        // their first three coordinates.
        let mut syndromes = Vec::new();
        let mut round = 0u64;
        loop {
            syndromes.clear();
            for msel in 0..3u64 {
                let e = ErrorVector::from_entries((0..3).map(|i| {
                    (
                        triple[i],
                        nonzero(&params, 8, trial ^ (round << 20) ^ (msel << 8), i as u64),
                    )
                }));
                syndromes.push(e.syndrome(&params));
            }
            let m = prd5::code::GfMatrix::from_rows(
                syndromes
                    .iter()
                    .map(|s| vec![s.0[0], s.0[1], s.0[2]])
                    .collect(),
            );
            if m.rank(params.field()) == 3 {
                break;
            }
            round += 1;
            assert!(round < 100, "could not find independent syndromes");
        }

        match locate_three_data_multi_syndrome(&params, &syndromes) {
            ThreeDataLocation::Unique(found) if found == expected => successes += 1,
            other => panic!("trial {trial}: expected {expected:?}, got {other:?}"),
        }
    }
    assert_eq!(successes, 1_000);
    println!("PASS criterion 7: 1000/1000 multi-syndrome trials located the exact triple");
}

/// Criterion 8: GF(8), k=7 — the decoder agrees with the brute-force
/// oracle on every syndrome reachable by a weight <= 2 error.
#[test]
fn criterion_08_oracle_equivalence() {
    let _lock = heavy();
    let params = code(3, 7);
    let n = params.n();
    let q1 = params.field().size() as u32 - 1;

    // Reachable syndromes; injectivity makes them pairwise distinct.
    let mut reachable: Vec<(Syndrome, ErrorVector)> = vec![(Syndrome::ZERO, ErrorVector::new())];
    for p1 in 0..n {
        for v1 in 1..=q1 {
            let e = ErrorVector::from_entries([(p1, el(v1))]);
            reachable.push((e.syndrome(&params), e));
            for p2 in (p1 + 1)..n {
                for v2 in 1..=q1 {
                    let e = ErrorVector::from_entries([(p1, el(v1)), (p2, el(v2))]);
                    reachable.push((e.syndrome(&params), e));
                }
            }
        }
    }
    assert_eq!(reachable.len(), 3_319);
    {
        let mut keys: Vec<[u16; 5]> = reachable
            .iter()
            .map(|(s, _)| std::array::from_fn(|i| s.0[i].0))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 3_319, "syndromes must be pairwise distinct");
    }

    let mismatches: usize = reachable
        .par_iter()
        .map(|(s, truth)| {
            let oracle = oracle_decode(&params, s, 2).unwrap();
            if oracle.len() != 1 || &oracle[0] != truth {
                return 1usize;
            }
            match decode_syndrome(&params, s) {
                DecodeOutcome::Clean => usize::from(!truth.is_empty()),
                DecodeOutcome::Corrected { error, .. } => usize::from(&error != truth),
                DecodeOutcome::DetectedUncorrectable => 1,
            }
        })
        .sum();
    assert_eq!(mismatches, 0);
    println!("PASS criterion 8: decoder matches the oracle on all 3319 reachable syndromes");
}

/// Criterion 9: field-op counts for 2-error localization are exactly equal
/// across k in {8, 64, 200} on GF(256).
#[test]
fn criterion_09_constant_localization_cost() {
    let mut seen = Vec::new();
    for k in [8usize, 64, 200] {
        let params = code(8, k);
        // Same error in every code: locators of drives 2 and 5 coincide
        // because the locator sequence is shared.
        let e = ErrorVector::from_entries([(2, el(7)), (5, el(100))]);
        let s = e.syndrome(&params);
        let (outcome, ops) = count_localization_ops(&params, &s);
        assert_eq!(outcome.error(), Some(&e), "k={k}");
        seen.push((k, ops));
    }
    let first = seen[0].1;
    for (k, ops) in &seen {
        assert_eq!(*ops, first, "k={k} localization ops differ");
    }
    println!(
        "PASS criterion 9: localization ops identical across k in {{8,64,200}}: {:?}",
        first
    );
}

/// Criterion 10: CLI-level round trips on a 1 MiB payload (GF(256), k=20):
/// delete 4 shards and reassemble; corrupt 2 shards and scrub --repair.
/// Both byte-identical, under 10 s total.
#[test]
fn criterion_10_cli_round_trips() {
    let _lock = heavy();
    let start = Instant::now();
    let tmp = tempfile::TempDir::new().unwrap();
    let payload: Vec<u8> = (0..1 << 20).map(|i: u32| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
    let input = tmp.path().join("payload.bin");
    std::fs::write(&input, &payload).unwrap();

    let shards = tmp.path().join("shards");
    cmd_encode(&input, &shards, 20, FieldChoice { m: 8, poly: None }).unwrap();

    // Delete 4 shards (2 data, 2 parity), reassemble byte-identically.
    for idx in [3usize, 11, 20, 24] {
        std::fs::remove_file(shards.join(format!("shard_{idx:05}.prd5"))).unwrap();
    }
    let restored = tmp.path().join("restored.bin");
    cmd_reassemble(&shards, &restored, &[]).unwrap();
    assert_eq!(std::fs::read(&restored).unwrap(), payload);

    // Fresh set: corrupt 2 shards, scrub --repair, reassemble intact.
    let shards2 = tmp.path().join("shards2");
    cmd_encode(&input, &shards2, 20, FieldChoice { m: 8, poly: None }).unwrap();
    let pristine: Vec<Vec<u8>> = (0..25)
        .map(|i| std::fs::read(shards2.join(format!("shard_{i:05}.prd5"))).unwrap())
        .collect();
    cmd_inject(&shards2.join("shard_00002.prd5"), 1000, 0xAB).unwrap();
    cmd_inject(&shards2.join("shard_00017.prd5"), 31000, 0x4C).unwrap();
    let report = cmd_scrub(&shards2, true, false).unwrap();
    assert_eq!(report.exit_code(), 1);
    assert_eq!(report.uncorrectable, 0);
    for (i, want) in pristine.iter().enumerate() {
        let got = std::fs::read(shards2.join(format!("shard_{i:05}.prd5"))).unwrap();
        assert_eq!(&got, want, "shard {i} differs after repair");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}");
    println!("PASS criterion 10: 1 MiB delete-4/reassemble and corrupt-2/repair round trips in {elapsed:?}");
}

/// Criterion 11: 10^5-trial campaigns — the weight <= 2 model has zero
/// silent events and zero miscorrections; the weight-5 codeword-difference
/// model shows silent corruption.
#[test]
fn criterion_11_silent_corruption_property() {
    let _lock = heavy();
    let spec = TrialSpec {
        version: 1,
        m: 8,
        poly: None,
        k: 20,
        trials: 100_000,
        seed: 1106,
        model: ErrorModel {
            weight_dist: [1, 4, 4, 0, 0, 0],
            erasures: 0,
            values: ValueModel::Uniform,
        },
        list_decoding: false,
    };
    let report = run_campaign(&spec).unwrap();
    assert_eq!(report.counts.total(), 100_000);
    assert_eq!(report.counts.silent, 0, "no silent events at weight <= 2");
    assert_eq!(report.counts.miscorrected, 0, "no miscorrections at weight <= 2");
    assert_eq!(report.counts.detected_uncorrectable, 0);

    let adversarial = TrialSpec {
        trials: 10_000,
        model: ErrorModel {
            weight_dist: [0, 0, 0, 0, 0, 1],
            erasures: 0,
            values: ValueModel::CodewordDifference,
        },
        ..spec
    };
    let report = run_campaign(&adversarial).unwrap();
    assert!(report.counts.silent > 0, "weight-5 codeword differences must be silent");
    assert_eq!(report.counts.silent, 10_000);
    println!(
        "PASS criterion 11: weight<=2 campaign clean (0 silent, 0 miscorrected); weight-5 model counted {} silent events",
        report.counts.silent
    );
}

/// Criterion 12: every closed form from the degraded-mode and 4-failure
/// analyses agrees with forward-constructed ground truth, 10^3 instances
/// per branch; the documented discrepancies resolve in the oracle's favor.
#[test]
fn criterion_12_formula_validation() {
    let _lock = heavy();
    let params = code(4, 13);
    let f = params.field();
    let k = params.k();

    // Branch family A: one parity + two data (Table-2 systems), per row.
    for parity_row in 0..PARITY_COUNT {
        let mut done = 0;
        let mut attempt = 0u64;
        while done < 1_000 {
            attempt += 1;
            let idx = distinct(120 + parity_row as u64, attempt, 2, k, &[]);
            let e = ErrorVector::from_entries([
                (idx[0], nonzero(&params, 121, attempt, 0)),
                (idx[1], nonzero(&params, 121, attempt, 1)),
                (k + parity_row, nonzero(&params, 121, attempt, 2)),
            ]);
            let s = e.syndrome(&params);
            if !matches!(decode_syndrome(&params, &s), DecodeOutcome::DetectedUncorrectable) {
                continue;
            }
            let list = recover_two_data_for_parity(&params, &s, parity_row);
            assert!(list.contains(&e), "row {parity_row}: missing {e}");
            done += 1;
        }
    }

    // Branch family B: two parities + one data, per (j, l) pair.
    for j in 0..PARITY_COUNT {
        for l in (j + 1)..PARITY_COUNT {
            let mut done = 0;
            let mut attempt = 0u64;
            while done < 1_000 {
                attempt += 1;
                let i = below(130 + (5 * j + l) as u64, attempt, 0, k as u64) as usize;
                let e = ErrorVector::from_entries([
                    (i, nonzero(&params, 131, attempt, 0)),
                    (k + j, nonzero(&params, 131, attempt, 1)),
                    (k + l, nonzero(&params, 131, attempt, 2)),
                ]);
                let s = e.syndrome(&params);
                if !matches!(decode_syndrome(&params, &s), DecodeOutcome::DetectedUncorrectable)
                {
                    continue;
                }
                let got = recover_data_for_two_parity(&params, &s, j, l);
                assert_eq!(got.as_ref(), Some(&e), "pair ({j},{l})");
                done += 1;
            }
        }
    }

    // Branch family C: degraded modes (parity j erased, two data errors).
    for parity_row in 0..PARITY_COUNT {
        let mut done = 0;
        let mut attempt = 0u64;
        while done < 1_000 {
            attempt += 1;
            let idx = distinct(140 + parity_row as u64, attempt, 2, k, &[]);
            let (xv, yv) = (
                nonzero(&params, 141, attempt, 0),
                nonzero(&params, 141, attempt, 1),
            );
            let data = random_data(&params, 142, attempt);
            let t = params.encode(&data).unwrap();
            let mut r = t.clone();
            r.set_symbol(idx[0], f.add(r.symbol(idx[0]), xv));
            r.set_symbol(idx[1], f.add(r.symbol(idx[1]), yv));
            r.set_symbol(k + parity_row, Element::ZERO); // the erased parity
            let s = params.syndrome(&r);

            let want_u = params.locator(idx[0]);
            let want_v = params.locator(idx[1]);
            match degraded_two_data_missing_parity(&params, &s, parity_row) {
                DegradedTwoData::Unique { u, v, x, y } => {
                    assert!(matches!(parity_row, 1 | 2 | 4), "row {parity_row}");
                    let mut got = [(u, x), (v, y)];
                    got.sort();
                    let mut want = [(want_u, xv), (want_v, yv)];
                    want.sort();
                    assert_eq!(got, want, "row {parity_row}");
                    done += 1;
                }
                DegradedTwoData::Underdetermined { constraint, .. } => {
                    assert!(matches!(parity_row, 0 | 3), "row {parity_row}");
                    let sigma = SymmetricPair::of(f, want_u, want_v);
                    let lhs = f.add(
                        f.mul(constraint.c1, sigma.sigma1),
                        f.mul(constraint.c2, sigma.sigma2),
                    );
                    assert_eq!(lhs, constraint.c3, "row {parity_row} constraint");
                    done += 1;
                }
                DegradedTwoData::NoSolution => { /* degenerate draw; resample */ }
            }
        }
    }

    // Branch family D: 4-failure consistency, 3 data + 1 parity.
    for parity_row in 0..PARITY_COUNT {
        for attempt in 0..1_000u64 {
            let idx = distinct(150 + parity_row as u64, attempt, 3, k, &[]);
            let e = ErrorVector::from_entries([
                (idx[0], nonzero(&params, 151, attempt, 0)),
                (idx[1], nonzero(&params, 151, attempt, 1)),
                (idx[2], nonzero(&params, 151, attempt, 2)),
                (k + parity_row, nonzero(&params, 151, attempt, 3)),
            ]);
            let s = e.syndrome(&params);
            let sigma = SymmetricTriple::of(
                f,
                params.locator(idx[0]),
                params.locator(idx[1]),
                params.locator(idx[2]),
            );
            assert!(
                four_failure_consistency_3d1p(f, parity_row, &sigma, &s).is_zero(),
                "3d1p row {parity_row}"
            );
        }
    }

    // Branch family E: 4-failure consistency, 2 data + 2 parities.
    for j in 0..PARITY_COUNT {
        for l in (j + 1)..PARITY_COUNT {
            for attempt in 0..1_000u64 {
                let idx = distinct(160 + (5 * j + l) as u64, attempt, 2, k, &[]);
                let e = ErrorVector::from_entries([
                    (idx[0], nonzero(&params, 161, attempt, 0)),
                    (idx[1], nonzero(&params, 161, attempt, 1)),
                    (k + j, nonzero(&params, 161, attempt, 2)),
                    (k + l, nonzero(&params, 161, attempt, 3)),
                ]);
                let s = e.syndrome(&params);
                let sigma =
                    SymmetricPair::of(f, params.locator(idx[0]), params.locator(idx[1]));
                let (cons, _) = four_failure_consistency_2d2p(f, j, l, &sigma, &s);
                assert!(cons.is_zero(), "2d2p pair ({j},{l})");
            }
        }
    }

    // Documented discrepancy 1 (degraded j=4 parity check): the dependency
    // is s2 + s3 = s5, not s1 + s2 = s5. Demonstrate on an instance where
    // the latter fails while recovery works.
    let mut shown = false;
    for attempt in 0..1_000u64 {
        let idx = distinct(170, attempt, 2, k, &[]);
        let e = ErrorVector::from_entries([
            (idx[0], nonzero(&params, 171, attempt, 0)),
            (idx[1], nonzero(&params, 171, attempt, 1)),
        ]);
        let s = e.syndrome(&params);
        assert_eq!(f.add(s.0[1], s.0[2]), s.0[4], "s2+s3=s5 always holds");
        let wrong = f.add(s.0[0], s.0[1]) == s.0[4];
        if !wrong {
            // The claimed alternative fails here, yet the solve proceeds.
            assert!(matches!(
                degraded_two_data_missing_parity(&params, &s, 3),
                DegradedTwoData::Underdetermined { .. }
            ));
            shown = true;
            break;
        }
    }
    assert!(shown, "never found a discriminating instance");

    // Documented discrepancy 2 (degraded j=4 sigma constraint): the row is
    // s2*sigma1 + s1*sigma2 = s3. The variant with c3 = s2 fails on
    // forward-constructed instances.
    let mut alt_fails = 0u32;
    for attempt in 0..1_000u64 {
        let idx = distinct(180, attempt, 2, k, &[]);
        let e = ErrorVector::from_entries([
            (idx[0], nonzero(&params, 181, attempt, 0)),
            (idx[1], nonzero(&params, 181, attempt, 1)),
        ]);
        let s = e.syndrome(&params);
        let sigma = SymmetricPair::of(f, params.locator(idx[0]), params.locator(idx[1]));
        let lhs = f.add(f.mul(s.0[1], sigma.sigma1), f.mul(s.0[0], sigma.sigma2));
        assert_eq!(lhs, s.0[2], "oracle-validated constraint");
        if lhs != s.0[1] {
            alt_fails += 1;
        }
    }
    assert!(alt_fails > 0, "the rejected variant should fail somewhere");

    // Documented discrepancy 3 (degraded j=5 sigma1 numerator): must be
    // s2*s3 + s1*s4 over denominator s1*s3 + s2^2 (nonzero), not
    // s1*s4 + s1*s3.
    let mut alt_fails = 0u32;
    for attempt in 0..1_000u64 {
        let idx = distinct(190, attempt, 2, k, &[]);
        let e = ErrorVector::from_entries([
            (idx[0], nonzero(&params, 191, attempt, 0)),
            (idx[1], nonzero(&params, 191, attempt, 1)),
        ]);
        let s = e.syndrome(&params);
        let den = f.add(f.mul(s.0[0], s.0[2]), f.square(s.0[1]));
        if den.is_zero() {
            continue;
        }
        let sigma = SymmetricPair::of(f, params.locator(idx[0]), params.locator(idx[1]));
        let good = f.div(f.add(f.mul(s.0[1], s.0[2]), f.mul(s.0[0], s.0[3])), den);
        assert_eq!(good, sigma.sigma1);
        let paper_variant = f.div(f.add(f.mul(s.0[0], s.0[3]), f.mul(s.0[0], s.0[2])), den);
        if paper_variant != sigma.sigma1 {
            alt_fails += 1;
        }
    }
    assert!(alt_fails > 0);

    // The 2-data + parities (1,4) shape exists whenever s2+s3+s5 = 0; the
    // "never satisfiable" reading fails oracle validation (family E above
    // already exercised the pair; spot-check the value here).
    let e = ErrorVector::from_entries([
        (0, el(3)),
        (5, el(9)),
        (k, el(7)),
        (k + 3, el(12)),
    ]);
    let s = e.syndrome(&params);
    let sigma = SymmetricPair::of(f, params.locator(0), params.locator(5));
    let (cons, degen) = four_failure_consistency_2d2p(f, 0, 3, &sigma, &s);
    assert!(cons.is_zero());
    assert!(degen.is_zero(), "the (1,4) restriction is always degenerate");

    println!("PASS criterion 12: all degraded-mode and 4-failure closed forms validated (1000 instances per branch); documented discrepancies resolved in the oracle's favor");
}

/// Guard used by criterion 9's setup: the k values must be valid for the
/// field.
#[test]
fn supporting_invariant_k_max() {
    assert_eq!(k_max(&field(8)), 254);
    assert!(200 <= k_max(&field(8)));
}
