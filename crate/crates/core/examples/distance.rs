// Exact and randomized minimum distance.

use qtanner::cli::config::{RunConfig, REF_SMALL, REF_TINY};
use qtanner::tanner::{DistanceMode, DistanceSide};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tiny = RunConfig::from_json(REF_TINY)?.build_code()?;
    for side in [DistanceSide::X, DistanceSide::Z] {
        let exact = tiny.distance_estimate(side, DistanceMode::Exact)?;
        let rand = tiny.distance_estimate(side, DistanceMode::Randomized { trials: 100, seed: 3 })?;
        println!("tiny {side:?}: exact {:?}, randomized {:?}", exact.distance, rand.distance);
        assert!(rand.distance >= exact.distance);
    }

    let small = RunConfig::from_json(REF_SMALL)?.build_code()?;
    let est = small.distance_estimate(DistanceSide::Z, DistanceMode::Randomized { trials: 100, seed: 1 })?;
    let witness = est.witness.as_deref().unwrap_or_default();
    println!("small Z: d ≤ {:?}, witness support {witness:?}", est.distance);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
