//! Deterministic random test vectors.
//!
//! Every randomized consumer (benchmarks, property checks, norm estimators)
//! draws from a ChaCha8 generator addressed by `(seed, stream)`, so trials
//! are reproducible and independent of each other and of evaluation order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seq::Sequence;

/// ChaCha8 generator for the given seed, positioned on substream `stream`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Contiguous block of `width` complex entries starting at `offset`, with
/// real and imaginary parts uniform in `[-1, 1)`.
pub fn random_sequence(rng: &mut impl Rng, offset: i64, width: usize) -> Sequence {
    let values = (0..width)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Sequence::new(offset, values).expect("uniform draws are finite")
}

/// [`random_sequence`] scaled to unit `ell^2` norm.
pub fn random_unit_sequence(rng: &mut impl Rng, offset: i64, width: usize) -> Sequence {
    let a = random_sequence(rng, offset, width);
    let n = crate::seq::lp_norm(&a, 2.0).expect("p = 2 is valid");
    crate::seq::scale(&a, Complex64::new(1.0 / n, 0.0))
}
