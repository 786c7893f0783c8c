// Finite groups from specs or tables, and symmetric generating sets.

use qtanner::groups::{validate_generators, GeneratorSet, Group, GroupSpec, Side};
use qtanner::rng::SplitMix64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let z11 = Group::build(&GroupSpec::Cyclic { n: 11 })?;
    let a = GeneratorSet::new(&z11, vec![1, 10, 3, 8], Side::A)?;
    let diag = validate_generators(&z11, a.elements())?;
    println!("Z_11, A = {:?}: connected {}, bipartite {}", a.elements(), diag.connected, diag.bipartite);

    let d5 = Group::dihedral(5)?;
    let mut rng = SplitMix64::new(3);
    let b = GeneratorSet::random_symmetric(&d5, 4, Side::B, &mut rng)?;
    for (i, &x) in b.elements().iter().enumerate() {
        assert_eq!(b.element(b.inverse_index(i)), d5.inv(x));
    }
    println!("random symmetric set in D_5: {:?}", b.elements());

    // A table that is not associative is rejected with a reason.
    let broken = vec![
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    match Group::from_table(&broken) {
        Ok(_) => return Err("quasigroup accepted as a group".into()),
        Err(e) => println!("rejected table: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
