// Local codes: tensor products, minimum-norm decompositions, coset
// leaders and the product-expansion constant κ.

use qtanner::gf2::BitMatrix;
use qtanner::local_codes::{
    binary_entropy_inv, kappa_estimate, predicted_kappa, CosetLeaderTable, KappaMode, LocalCodePair, LocalRole,
    DEFAULT_NORM_BUDGET,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pair = LocalCodePair::new(
        4,
        BitMatrix::from_table(4, &[vec![1, 1, 1, 1]]),
        BitMatrix::from_table(4, &[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1]]),
    )?;
    let d = pair.distances();
    println!("d(C_A) = {:?}, d(C_B) = {:?}, complementary {}", d.d_a, d.d_b, pair.is_complementary());

    let x_side = pair.product(LocalRole::XSide);
    println!(
        "C_A⊗F + F⊗C_B: dim {}, syndrome dim {}",
        x_side.dual_tensor_dim(),
        x_side.syndrome_dim()
    );

    // Any word of the dual tensor code splits as column part + row part.
    let w = x_side.window();
    let x = w.place_column(0b1111, 0) ^ w.place_row(0b0110, 2);
    let dec = x_side.min_norm_decompose(x, DEFAULT_NORM_BUDGET)?;
    assert_eq!(dec.word(), x);
    println!("x = {x:#06x}: |c|_col = {}, |r|_row = {}", dec.norm_c, dec.norm_r);

    let table = CosetLeaderTable::build(&x_side)?;
    let noisy = x ^ (1 << w.index(1, 3));
    let leader = table.decode(table.syndrome(noisy));
    println!("coset leader of a one-bit perturbation: weight {}", leader.count_ones());

    for role in [LocalRole::XSide, LocalRole::ZSide] {
        let report = kappa_estimate(&pair.product(role), KappaMode::Exact, DEFAULT_NORM_BUDGET)?;
        println!("{role:?}: κ = {:?} (exact {})", report.kappa, report.exact);
    }
    let sampled = kappa_estimate(&x_side, KappaMode::Sample { samples: 200, seed: 9 }, DEFAULT_NORM_BUDGET)?;
    println!("sampled upper bound: {:?}", sampled.kappa);

    let rho = 0.25;
    println!("h⁻¹(0.5) = {:.6}, predicted κ at ρ = {rho}: {:.3e}", binary_entropy_inv(0.5), predicted_kappa(rho, rho)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
