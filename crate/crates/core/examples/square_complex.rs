// The left-right Cayley square complex and its local labellings.

use qtanner::complex::{GraphKind, SquareComplex, Vertex, VertexClass};
use qtanner::groups::{GeneratorSet, Group, Side};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::cyclic(11)?;
    let a = GeneratorSet::new(&g, vec![1, 10, 3, 8], Side::A)?;
    let b = GeneratorSet::new(&g, vec![2, 9, 4, 7], Side::B)?;
    let complex = SquareComplex::new(g, a, b)?;
    println!("|Q| = {}, vertices = {}", complex.square_count(), complex.vertex_count());

    let q = complex.square_id(5, 2, 1);
    let sv = complex.square_vertices(q);
    println!("square (g=5, a#2, b#1) has vertices {:?}", sv);

    // Every vertex of the square labels it by the same (a, b).
    for class in VertexClass::ALL {
        let v = complex
            .class_vertices(class)
            .find(|&v| complex.phi_inv(v, q).is_some())
            .ok_or("each class has one vertex on the square")?;
        assert_eq!(complex.phi_inv(v, q), Some((2, 1)));
    }

    let v = Vertex::new(VertexClass::V00, 0);
    let w = Vertex::new(VertexClass::V10, complex.group().mul(0, complex.gens_b().element(1)));
    println!("shared line of {v:?} and {w:?}: {:?}", complex.shared_line(v, w));

    let ca = complex.adjacency(GraphKind::CayA);
    let cb = complex.adjacency(GraphKind::CayB);
    assert!(ca.mul(&cb) == cb.mul(&ca));
    println!("G□₀ degree {}", complex.degree(GraphKind::Square0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
