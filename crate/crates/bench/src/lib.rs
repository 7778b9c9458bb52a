//! Shared fixtures for the codec benchmarks.

use std::sync::Arc;

use prd5::code::{build_code, AlphaPolicy};
use prd5::galois::{make_field, FieldSpec};
use prd5::{CodeParams, Element};

/// GF(256) code with `k` data drives and the default polynomial.
pub fn gf256_code(k: usize) -> CodeParams {
    let field = Arc::new(make_field(FieldSpec::with_default_poly(8).unwrap()).unwrap());
    build_code(field, k, AlphaPolicy::GeneratorPowers).unwrap()
}

/// Deterministic pseudo-random data symbols.
pub fn sample_data(params: &CodeParams, salt: u64) -> Vec<Element> {
    let q = params.field().size() as u64;
    (0..params.k())
        .map(|i| {
            let mut x = salt ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            x ^= x >> 33;
            x = x.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
            x ^= x >> 33;
            Element((x % q) as u16)
        })
        .collect()
}
