//! Shared fixtures for the criterion benchmarks.

use bloch_core::{build_symbol, build_system, mother, Convention, DispersionSystem};

/// Weight vector with a 32-point critical set, in the mother graph's edge order.
pub const COUNT_POINT: [i64; 9] = [4, 1, 8, 7, 5, 1, 3, 2, 6];

/// A generic weight vector, in the mother graph's edge order.
pub const CERTIFY_POINT: [i64; 9] = [19, 31, 3, 27, 36, 7, 13, 1, 4];

pub fn mother_system() -> DispersionSystem {
    build_system(&build_symbol(&mother(), Convention::Divergence).expect("symbol")).expect("system")
}
