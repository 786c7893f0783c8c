//! Spectral diagnostics: `λ(G)`, the Ramanujan flag, and the expander
//! mixing inequality for bipartite graphs.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{GraphKind, MultiplicityMatrix, SquareComplex};
use crate::rng::SplitMix64;

/// Matrices up to this dimension use a dense symmetric eigensolve.
pub const DENSE_LIMIT: usize = 4096;
/// Eigenvalues within this distance of `±degree` count as trivial.
pub const TRIVIAL_TOL: f64 = 1e-9;

const POWER_ITERATIONS: usize = 20_000;
const POWER_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("adjacency matrix is not symmetric")]
    NonSymmetric,
    #[error("adjacency matrix is not {0}-regular")]
    NonRegular(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub degree: usize,
    /// Largest `|λ_i|` over eigenvalues other than `±degree`.
    pub lambda: f64,
    /// `λ ≤ 2√(degree − 1)`.
    pub ramanujan: bool,
    /// Whether a dense eigensolve was used (otherwise deflated power iteration).
    pub dense: bool,
}

/// Second-largest absolute eigenvalue of a regular multigraph, excluding `±degree`.
pub fn spectral_lambda(adj: &MultiplicityMatrix, degree: usize) -> Result<SpectralReport, SpectralError> {
    if !adj.is_symmetric() {
        return Err(SpectralError::NonSymmetric);
    }
    if adj.dim() > 0 && adj.regular_degree() != Some(degree as u64) {
        return Err(SpectralError::NonRegular(degree));
    }
    let (lambda, dense) = if adj.dim() <= DENSE_LIMIT {
        (dense_lambda(adj), true)
    } else {
        (power_lambda(adj), false)
    };
    let lambda = if lambda.abs() < TRIVIAL_TOL { 0.0 } else { lambda };
    Ok(SpectralReport {
        degree,
        lambda,
        ramanujan: lambda <= 2.0 * ((degree as f64) - 1.0).max(0.0).sqrt() + TRIVIAL_TOL,
        dense,
    })
}

fn to_dense(adj: &MultiplicityMatrix) -> DMatrix<f64> {
    let n = adj.dim();
    DMatrix::from_fn(n, n, |r, c| f64::from(adj.get(r, c)))
}

/// All eigenvalues, ascending.
pub fn eigenvalues(adj: &MultiplicityMatrix) -> Vec<f64> {
    let mut eig: Vec<f64> = to_dense(adj).symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Largest `|λ|` after removing one `+degree` eigenvalue and, for a
/// bipartite graph, one `−degree` eigenvalue. Further `±degree` eigenvalues
/// (disconnected graphs) are kept, so such graphs get `λ = degree`.
fn nontrivial_max(mut eigs: Vec<f64>, bipartite: bool) -> f64 {
    eigs.sort_by(f64::total_cmp);
    eigs.pop();
    if bipartite && !eigs.is_empty() {
        eigs.remove(0);
    }
    eigs.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn dense_lambda(adj: &MultiplicityMatrix) -> f64 {
    nontrivial_max(eigenvalues(adj), two_colouring(adj).is_some())
}

/// Power iteration orthogonal to the constant vector and, for a bipartite
/// graph, the ±1 side indicator: one `+degree` and one `−degree` eigenvector.
pub fn power_lambda(adj: &MultiplicityMatrix) -> f64 {
    let n = adj.dim();
    if n < 3 {
        return dense_lambda(adj);
    }
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let mut deflate = vec![ones];
    if let Some(sides) = two_colouring(adj) {
        let s = 1.0 / (n as f64).sqrt();
        deflate.push(sides.iter().map(|&c| if c { s } else { -s }).collect());
    }
    let project = |x: &mut Vec<f64>| {
        for u in &deflate {
            let d: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi -= d * ui;
            }
        }
    };
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|r| (0..n).map(|c| f64::from(adj.get(r, c)) * x[c]).sum())
            .collect()
    };
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut rng = SplitMix64::new(0x5EC7);
    let mut x: Vec<f64> = (0..n).map(|_| rng.unit_f64() - 0.5).collect();
    project(&mut x);
    let mut estimate = 0.0;
    // Iterate with A² so ±λ pairs do not oscillate.
    for _ in 0..POWER_ITERATIONS {
        let nx = norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let mut y = apply(&apply(&x));
        project(&mut y);
        let next = norm(&y).sqrt();
        let done = (next - estimate).abs() <= POWER_TOL * next.max(1.0);
        estimate = next;
        x = y;
        if done {
            break;
        }
    }
    estimate
}

fn two_colouring(adj: &MultiplicityMatrix) -> Option<Vec<bool>> {
    let n = adj.dim();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(true);
        let mut stack = vec![start];
        while let Some(r) = stack.pop() {
            let cr = colour[r].expect("coloured");
            for c in 0..n {
                if adj.get(r, c) == 0 {
                    continue;
                }
                match colour[c] {
                    None => {
                        colour[c] = Some(!cr);
                        stack.push(c);
                    }
                    Some(cc) if cc == cr => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(colour.into_iter().map(|c| c.expect("coloured")).collect())
}

/// Result of sampling the expander mixing inequality on a bipartite graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingCheck {
    pub pairs: usize,
    pub violations: usize,
    /// Smallest slack `bound − |E(S,T)|` seen.
    pub min_slack: f64,
}

/// Checks `|E(S,T)| ≤ (d/|V_0|)|S||T| + λ√(|S||T|)` for random `S ⊂ V_0`,
/// `T ⊂ V_1`, where the first `half` indices form `V_0`.
pub fn mixing_check(
    adj: &MultiplicityMatrix,
    degree: usize,
    lambda: f64,
    half: usize,
    pairs: usize,
    rng: &mut SplitMix64,
) -> MixingCheck {
    let other = adj.dim() - half;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..pairs {
        let s_size = 1 + rng.below_usize(half);
        let t_size = 1 + rng.below_usize(other);
        let s = rng.sample_distinct(half, s_size);
        let t: Vec<usize> = rng
            .sample_distinct(other, t_size)
            .into_iter()
            .map(|j| half + j)
            .collect();
        let edges = adj.edges_between(&s, &t) as f64;
        let st = (s_size * t_size) as f64;
        let bound = degree as f64 / half as f64 * st + lambda * st.sqrt();
        let slack = bound - edges;
        if slack < -1e-9 {
            violations += 1;
        }
        min_slack = min_slack.min(slack);
    }
    MixingCheck {
        pairs,
        violations,
        min_slack,
    }
}

/// λ for the graphs a code summary reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexSpectra {
    pub cay_a: SpectralReport,
    pub cay_b: SpectralReport,
    pub square0: SpectralReport,
    pub square1: SpectralReport,
    /// `λ(G^□_i) ≤ 4Δ` when both Cayley graphs are connected, non-bipartite
    /// and Ramanujan; `None` when that hypothesis does not hold.
    pub square_bound_holds: Option<bool>,
}

pub fn complex_spectra(complex: &SquareComplex) -> ComplexSpectra {
    let report = |kind| {
        spectral_lambda(&complex.adjacency(kind), complex.degree(kind))
            .expect("complex graphs are symmetric and regular")
    };
    let cay_a = report(GraphKind::CayA);
    let cay_b = report(GraphKind::CayB);
    let square0 = report(GraphKind::Square0);
    let square1 = report(GraphKind::Square1);
    let group = complex.group();
    let hypothesis = [complex.gens_a(), complex.gens_b()].iter().all(|s| {
        let d = crate::groups::validate_generators(group, s.elements()).expect("validated");
        d.connected && !d.bipartite
    }) && cay_a.ramanujan
        && cay_b.ramanujan;
    let bound = 4.0 * complex.delta() as f64;
    let square_bound_holds =
        hypothesis.then_some(square0.lambda <= bound + TRIVIAL_TOL && square1.lambda <= bound + TRIVIAL_TOL);
    ComplexSpectra {
        cay_a,
        cay_b,
        square0,
        square1,
        square_bound_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GeneratorSet, Group, Side};

    fn complete(n: usize) -> MultiplicityMatrix {
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|r| (0..n).map(|c| u32::from(r != c)).collect())
            .collect();
        MultiplicityMatrix::from_rows(&rows)
    }

    fn circulant(n: usize, offsets: &[usize]) -> MultiplicityMatrix {
        let mut m = MultiplicityMatrix::zeros(n);
        for r in 0..n {
            for &o in offsets {
                m.add(r, (r + o) % n, 1);
            }
        }
        m
    }

    #[test]
    fn k4_lambda_is_one() {
        let r = spectral_lambda(&complete(4), 3).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-9);
        assert!(r.ramanujan);
    }

    #[test]
    fn c6_lambda_is_one() {
        let r = spectral_lambda(&circulant(6, &[1, 5]), 2).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disconnected_graph_keeps_repeated_degree() {
        // Two disjoint triangles.
        let adj = circulant(6, &[2, 4]);
        assert!((spectral_lambda(&adj, 2).unwrap().lambda - 2.0).abs() < 1e-9);
        assert!((power_lambda(&adj) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn z11_circulant_matches_closed_form() {
        let r = spectral_lambda(&circulant(11, &[1, 10, 3, 8]), 4).unwrap();
        let expected = (1..11)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 11.0;
                (2.0 * t.cos() + 2.0 * (3.0 * t).cos()).abs()
            })
            .fold(0.0, f64::max);
        assert!((r.lambda - expected).abs() < 1e-9, "{} vs {expected}", r.lambda);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut m = MultiplicityMatrix::zeros(3);
        m.add(0, 1, 1);
        assert_eq!(spectral_lambda(&m, 1), Err(SpectralError::NonSymmetric));
        m.add(1, 0, 1);
        assert_eq!(spectral_lambda(&m, 1), Err(SpectralError::NonRegular(1)));
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        let group = Group::dihedral(13).unwrap();
        let a = GeneratorSet::new(&group, vec![1, 12, 13, 17], Side::A).unwrap();
        let b = GeneratorSet::new(&group, vec![2, 11, 20, 22], Side::B).unwrap();
        let c = SquareComplex::new(group, a, b).unwrap();
        for kind in [GraphKind::CayA, GraphKind::Square0, GraphKind::CoverB] {
            let adj = c.adjacency(kind);
            assert!(adj.is_connected());
            let dense = dense_lambda(&adj);
            let power = power_lambda(&adj);
            assert!((dense - power).abs() < 1e-6, "{kind:?}: {dense} vs {power}");
        }
    }

    #[test]
    fn mixing_holds_on_a_cover() {
        let group = Group::cyclic(11).unwrap();
        let a = GeneratorSet::new(&group, vec![1, 10, 3, 8], Side::A).unwrap();
        let b = GeneratorSet::new(&group, vec![2, 9, 4, 7], Side::B).unwrap();
        let c = SquareComplex::new(group, a, b).unwrap();
        let adj = c.adjacency(GraphKind::CoverA);
        let r = spectral_lambda(&adj, 4).unwrap();
        let mut rng = SplitMix64::new(1);
        let check = mixing_check(&adj, 4, r.lambda, 11, 200, &mut rng);
        assert_eq!(check.violations, 0);
        let spectra = complex_spectra(&c);
        assert!(spectra.cay_a.lambda <= spectra.cay_a.degree as f64);
    }
}
