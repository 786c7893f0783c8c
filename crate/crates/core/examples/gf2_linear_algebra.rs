// Packed GF(2) vectors and matrices: rank, kernel, solving, dual codes.

use qtanner::gf2::{BitMatrix, BitVector, EchelonBasis};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Parity-check matrix of the [7,4] Hamming code.
    let h = BitMatrix::from_table(
        7,
        &[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ],
    );
    let decomposition = h.rank_and_bases();
    println!("rank H = {}, dim ker H = {}", decomposition.rank, decomposition.kernel_basis.row_count());
    assert_eq!(decomposition.rank + decomposition.kernel_basis.row_count(), 7);

    let codewords = h.kernel_basis();
    assert!(h.mul_transpose(&codewords).is_zero());

    let s = BitVector::from_support(3, &[0, 2]);
    let e = h.solve(&s).ok_or("syndrome should be reachable")?;
    assert_eq!(h.mul_vec(&e), s);
    println!("a preimage of syndrome {:?} has support {:?}", s.to_bits(), e.ones().collect::<Vec<_>>());

    let span = EchelonBasis::new(&codewords);
    assert!(span.contains(codewords.row(0)));
    assert!(!span.contains(&BitVector::from_support(7, &[3])));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
