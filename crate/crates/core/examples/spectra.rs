// Spectral expansion of the Cayley and square graphs, and a mixing check.

use qtanner::complex::{GraphKind, SquareComplex};
use qtanner::groups::{GeneratorSet, Group, Side};
use qtanner::rng::SplitMix64;
use qtanner::spectral::{complex_spectra, mixing_check, spectral_lambda};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::dihedral(13)?;
    let a = GeneratorSet::new(&g, vec![1, 12, 13, 17], Side::A)?;
    let b = GeneratorSet::new(&g, vec![2, 11, 20, 22], Side::B)?;
    let complex = SquareComplex::new(g, a, b)?;

    let spectra = complex_spectra(&complex);
    for (name, r) in [
        ("Cay(G, A)", &spectra.cay_a),
        ("Cay(G, B)", &spectra.cay_b),
        ("G□₀", &spectra.square0),
        ("G□₁", &spectra.square1),
    ] {
        println!("{name:10} degree {:3}  λ = {:.6}  ramanujan {}", r.degree, r.lambda, r.ramanujan);
    }
    println!("square-graph bound: {:?}", spectra.square_bound_holds);

    // |E(S,T) − d|S||T|/n| ≤ λ√(|S||T|) on the A-edge double cover.
    let cover = complex.adjacency(GraphKind::CoverA);
    let degree = complex.degree(GraphKind::CoverA);
    let lambda = spectral_lambda(&cover, degree)?.lambda;
    let mut rng = SplitMix64::new(11);
    let report = mixing_check(&cover, degree, lambda, complex.group_order(), 100, &mut rng);
    println!("mixing: {} pairs, {} violations", report.pairs, report.violations);
    assert_eq!(report.violations, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
