//! Seeded random parameter draws for property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::params::TwoChannelParams;

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `alpha_i` in `[-2, 2]`, `beta` in `[0.01, 1.5]`, `Delta` in `[0.2, 3]`.
pub fn draw_shape(rng: &mut SuiteRng) -> (f64, f64, f64, f64) {
    (
        rng.random_range(-2.0..=2.0),
        rng.random_range(-2.0..=2.0),
        rng.random_range(0.01..=1.5),
        rng.random_range(0.2..=3.0),
    )
}

/// Regular parameters: `kappa1` a random margin in `[0.05, 1]` above the regularity threshold.
pub fn draw_regular(rng: &mut SuiteRng) -> TwoChannelParams {
    let (a1, a2, b, d) = draw_shape(rng);
    let k1 = TwoChannelParams::regular_kappa1_threshold(a1, a2, b, d) + rng.random_range(0.05..=1.0);
    TwoChannelParams::new(a1, a2, b, d, k1).expect("drawn values are in range")
}

/// Parameters with an indefinite `K + U0`: `kappa1` a fraction in `[0.05, 0.95]` of a
/// threshold of at least 0.1.
pub fn draw_indefinite(rng: &mut SuiteRng) -> TwoChannelParams {
    loop {
        let (a1, a2, b, d) = draw_shape(rng);
        let t = TwoChannelParams::regular_kappa1_threshold(a1, a2, b, d);
        if t < 0.1 {
            continue;
        }
        let k1 = t * rng.random_range(0.05..=0.95);
        return TwoChannelParams::new(a1, a2, b, d, k1).expect("drawn values are in range");
    }
}

/// `n` regular draws from `seed`.
pub fn regular_suite(seed: u64, n: usize) -> Vec<TwoChannelParams> {
    let mut r = rng(seed);
    (0..n).map(|_| draw_regular(&mut r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_classified() {
        assert_eq!(regular_suite(7, 20), regular_suite(7, 20));
        let mut r = rng(3);
        for _ in 0..200 {
            assert!(draw_regular(&mut r).is_regular());
            let p = draw_indefinite(&mut r);
            assert!(!p.is_regular() && !p.satisfies_regularity_inequalities());
        }
    }
}
