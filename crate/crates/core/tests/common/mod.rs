#![allow(dead_code)]

use qtanner::complex::SquareComplex;
use qtanner::groups::{GeneratorSet, Group, Side};
use qtanner::local_codes::LocalCodePair;
use qtanner::rng::SplitMix64;
use qtanner::tanner::{CodeError, QuantumTannerCode};

/// A random left-right Cayley complex on a small cyclic or dihedral group.
pub fn random_complex(rng: &mut SplitMix64, delta: usize) -> SquareComplex {
    loop {
        let group = if rng.bernoulli(0.5) {
            Group::cyclic(5 + rng.below_usize(12))
        } else {
            Group::dihedral(3 + rng.below_usize(6))
        }
        .expect("small group");
        let (Ok(a), Ok(b)) = (
            GeneratorSet::random_symmetric(&group, delta, Side::A, rng),
            GeneratorSet::random_symmetric(&group, delta, Side::B, rng),
        ) else {
            continue;
        };
        if let Ok(c) = SquareComplex::new(group, a, b) {
            return c;
        }
    }
}

/// A random code with `2 ≤ Δ ≤ 4`; complementary rates when asked.
pub fn random_code(rng: &mut SplitMix64, complementary: bool) -> Result<QuantumTannerCode, CodeError> {
    let delta = 2 + rng.below_usize(3);
    let complex = random_complex(rng, delta);
    let k_a = 1 + rng.below_usize(delta - 1);
    let k_b = if complementary { delta - k_a } else { 1 + rng.below_usize(delta - 1) };
    let pair = LocalCodePair::random(delta, k_a, k_b, rng.next_u64(), rng.next_u64()).expect("random local codes");
    QuantumTannerCode::assemble(complex, pair)
}
