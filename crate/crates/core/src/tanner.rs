//! The CSS quantum Tanner code `Q = (C_0, C_1)` on the squares of a complex.
//!
//! X-type generators live on `V0 = V00 ∪ V11` and span `C_A ⊗ C_B` inside
//! each `Q(v)`; Z-type generators live on `V1 = V01 ∪ V10` and span
//! `C_A^⊥ ⊗ C_B^⊥`. Rows are grouped by vertex, so the rows of one vertex
//! form a contiguous block.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{SquareComplex, VertexClass};
use crate::gf2::{BitMatrix, BitVector, EchelonBasis};
use crate::local_codes::{
    kappa_estimate, predicted_kappa, KappaMode, KappaReport, LocalCodePair, LocalRole, DEFAULT_NORM_BUDGET,
    EXACT_KAPPA_MAX_DIM,
};
use crate::rng::SplitMix64;
use crate::spectral::{complex_spectra, ComplexSpectra};

/// Exact distance enumeration limit on the kernel dimension.
pub const EXACT_DISTANCE_MAX_DIM: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("local code length Δ = {pair} does not match complex degree Δ = {complex}")]
    DeltaMismatch { pair: usize, complex: usize },
    #[error("H_X·H_Zᵀ ≠ 0 at rows ({x_row}, {z_row})")]
    CssViolation { x_row: usize, z_row: usize },
    #[error("kernel dimension {dim} exceeds the exact enumeration limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
}

/// Which distance: `Z` minimizes over `ker H_Z ∖ rowspace H_X`, `X` the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistanceSide {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    Exact,
    Randomized { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceEstimate {
    /// `None` when there are no logical words (`k == 0`), i.e. `d = ∞`.
    pub distance: Option<usize>,
    pub exact: bool,
    pub trials: usize,
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub rank_x: usize,
    pub rank_z: usize,
    /// `⌈(1 − 2ρ)² n⌉` when `k_B == Δ − k_A`, otherwise `None`.
    pub rate_bound: Option<usize>,
    pub rate_bound_ok: bool,
}

#[derive(Clone, Debug)]
pub struct QuantumTannerCode {
    complex: SquareComplex,
    pair: LocalCodePair,
    h_x: BitMatrix,
    h_z: BitMatrix,
    rows_per_x_vertex: usize,
    rows_per_z_vertex: usize,
    rank_x: usize,
    rank_z: usize,
}

impl QuantumTannerCode {
    pub fn assemble(complex: SquareComplex, pair: LocalCodePair) -> Result<Self, CodeError> {
        if pair.delta() != complex.delta() {
            return Err(CodeError::DeltaMismatch {
                pair: pair.delta(),
                complex: complex.delta(),
            });
        }
        let x_basis = pair.product(LocalRole::XSide).tensor_basis();
        let z_basis = pair.product(LocalRole::ZSide).tensor_basis();
        let h_x = embed(&complex, &[VertexClass::V00, VertexClass::V11], &x_basis);
        let h_z = embed(&complex, &[VertexClass::V01, VertexClass::V10], &z_basis);
        let product = h_x.mul_transpose(&h_z);
        for (x_row, row) in product.rows().iter().enumerate() {
            if let Some(z_row) = row.first_one() {
                return Err(CodeError::CssViolation { x_row, z_row });
            }
        }
        let rank_x = h_x.rank();
        let rank_z = h_z.rank();
        Ok(Self {
            rows_per_x_vertex: x_basis.len(),
            rows_per_z_vertex: z_basis.len(),
            complex,
            pair,
            h_x,
            h_z,
            rank_x,
            rank_z,
        })
    }

    pub fn complex(&self) -> &SquareComplex {
        &self.complex
    }

    pub fn pair(&self) -> &LocalCodePair {
        &self.pair
    }

    pub fn h_x(&self) -> &BitMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &BitMatrix {
        &self.h_z
    }

    pub fn n(&self) -> usize {
        self.complex.square_count()
    }

    pub fn k(&self) -> usize {
        self.n() - self.rank_x - self.rank_z
    }

    /// `k_A·k_B`.
    pub fn rows_per_x_vertex(&self) -> usize {
        self.rows_per_x_vertex
    }

    /// `(Δ − k_A)(Δ − k_B)`.
    pub fn rows_per_z_vertex(&self) -> usize {
        self.rows_per_z_vertex
    }

    /// Vertex id owning a row of `H_X`.
    pub fn x_row_vertex(&self, row: usize) -> usize {
        self.block_vertex(row / self.rows_per_x_vertex, &[VertexClass::V00, VertexClass::V11])
    }

    /// Vertex id owning a row of `H_Z`.
    pub fn z_row_vertex(&self, row: usize) -> usize {
        self.block_vertex(row / self.rows_per_z_vertex, &[VertexClass::V01, VertexClass::V10])
    }

    fn block_vertex(&self, block: usize, classes: &[VertexClass; 2]) -> usize {
        let n = self.complex.group_order();
        self.complex
            .vertex_id(crate::complex::Vertex::new(classes[block / n], block % n))
    }

    /// First `H_X` row of a `V0` vertex.
    pub fn x_row_offset(&self, vertex_id: usize) -> Option<usize> {
        let n = self.complex.group_order();
        let v = self.complex.vertex(vertex_id);
        let block = match v.class {
            VertexClass::V00 => v.g,
            VertexClass::V11 => n + v.g,
            _ => return None,
        };
        Some(block * self.rows_per_x_vertex)
    }

    /// First `H_Z` row of a `V1` vertex.
    pub fn z_row_offset(&self, vertex_id: usize) -> Option<usize> {
        let n = self.complex.group_order();
        let v = self.complex.vertex(vertex_id);
        let block = match v.class {
            VertexClass::V01 => v.g,
            VertexClass::V10 => n + v.g,
            _ => return None,
        };
        Some(block * self.rows_per_z_vertex)
    }

    /// Restriction `e|_{Q(v)}` as a local window word.
    pub fn local_word(&self, vertex_id: usize, e: &BitVector) -> u64 {
        self.complex
            .window(vertex_id)
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (u64::from(e.get(q as usize)) << i))
    }

    /// Adds a local window word at `v` into a global vector.
    pub fn add_local(&self, vertex_id: usize, word: u64, e: &mut BitVector) {
        let window = self.complex.window(vertex_id);
        let mut w = word;
        while w != 0 {
            let i = w.trailing_zeros() as usize;
            e.flip(window[i] as usize);
            w &= w - 1;
        }
    }

    /// The global vector with `word` placed in `Q(v)`.
    pub fn embed_local(&self, vertex_id: usize, word: u64) -> BitVector {
        let mut e = BitVector::zeros(self.n());
        self.add_local(vertex_id, word, &mut e);
        e
    }

    pub fn params(&self) -> CodeParams {
        let n = self.n();
        let k = self.k();
        let rate_bound = self.pair.is_complementary().then(|| {
            let rho = self.pair.k_a() as f64 / self.pair.delta() as f64;
            let bound = (1.0 - 2.0 * rho).powi(2) * n as f64;
            (bound - 1e-9).ceil().max(0.0) as usize
        });
        CodeParams {
            n,
            k,
            rank_x: self.rank_x,
            rank_z: self.rank_z,
            rate_bound,
            rate_bound_ok: rate_bound.is_none_or(|b| k >= b),
        }
    }

    fn side_matrices(&self, side: DistanceSide) -> (&BitMatrix, &BitMatrix) {
        match side {
            DistanceSide::Z => (&self.h_z, &self.h_x),
            DistanceSide::X => (&self.h_x, &self.h_z),
        }
    }

    /// Minimum weight of a word in `ker(check) ∖ rowspace(stab)`.
    pub fn distance_estimate(&self, side: DistanceSide, mode: DistanceMode) -> Result<DistanceEstimate, CodeError> {
        let (check, stab) = self.side_matrices(side);
        let kernel = check.kernel_basis();
        let stabilizers = EchelonBasis::new(stab);
        if self.k() == 0 {
            return Ok(DistanceEstimate {
                distance: None,
                exact: true,
                trials: 0,
                witness: None,
            });
        }
        match mode {
            DistanceMode::Exact => exact_distance(&kernel, &stabilizers),
            DistanceMode::Randomized { trials, seed } => Ok(random_distance(&kernel, &stabilizers, trials, seed)),
        }
    }

    pub fn spectra(&self) -> ComplexSpectra {
        complex_spectra(&self.complex)
    }

    /// Robustness for both local configurations plus the predicted value.
    pub fn kappa_report(&self, samples: usize, seed: u64) -> KappaSummary {
        let estimate = |role| {
            let product = self.pair.product(role);
            let mode = if product.dual_tensor_dim() <= EXACT_KAPPA_MAX_DIM
                && product.tensor_dim() <= DEFAULT_NORM_BUDGET
            {
                KappaMode::Exact
            } else {
                KappaMode::Sample { samples, seed }
            };
            kappa_estimate(&product, mode, DEFAULT_NORM_BUDGET).expect("mode chosen within limits")
        };
        let x_side = estimate(LocalRole::XSide);
        let z_side = estimate(LocalRole::ZSide);
        let delta = self.pair.delta() as f64;
        let rho_a = self.pair.k_a() as f64 / delta;
        let rho_b = self.pair.k_b() as f64 / delta;
        let predicted = predicted_kappa(rho_a, rho_b).ok();
        let predicted_codim = predicted_kappa(1.0 - rho_a, 1.0 - rho_b).ok();
        let kappa = [x_side.kappa, z_side.kappa].into_iter().flatten().reduce(f64::min);
        let d = self.pair.distances().delta_rel;
        let distance_bound = kappa.map(|k| d * d * k * k * self.n() as f64 / (256.0 * delta));
        KappaSummary {
            x_side,
            z_side,
            predicted_rate: predicted,
            predicted_codim,
            distance_bound,
        }
    }

    pub fn summary(&self, kappa_samples: usize, seed: u64) -> CodeSummary {
        let spectra = self.spectra();
        let params = self.params();
        CodeSummary {
            n: params.n,
            k: params.k,
            delta: self.complex.delta(),
            group_order: self.complex.group_order(),
            row_weights: RowWeights {
                x_max: self.h_x.max_row_weight(),
                z_max: self.h_z.max_row_weight(),
                x_column_max: self.h_x.column_weights().into_iter().max().unwrap_or(0),
                z_column_max: self.h_z.column_weights().into_iter().max().unwrap_or(0),
            },
            lambda_a: spectra.cay_a.lambda,
            lambda_b: spectra.cay_b.lambda,
            lambda_square: [spectra.square0.lambda, spectra.square1.lambda],
            delta_rel: self.pair.distances().delta_rel,
            kappa_report: self.kappa_report(kappa_samples, seed),
            params,
        }
    }
}

fn embed(complex: &SquareComplex, classes: &[VertexClass], basis: &[u64]) -> BitMatrix {
    let n = complex.square_count();
    let mut rows = Vec::with_capacity(2 * complex.group_order() * basis.len());
    for &class in classes {
        for v in complex.class_vertices(class) {
            let window = complex.window(complex.vertex_id(v));
            for &word in basis {
                let support: Vec<usize> = (0..window.len())
                    .filter(|&i| (word >> i) & 1 == 1)
                    .map(|i| window[i] as usize)
                    .collect();
                rows.push(BitVector::from_support(n, &support));
            }
        }
    }
    BitMatrix::from_rows(n, rows)
}

fn exact_distance(kernel: &BitMatrix, stabilizers: &EchelonBasis) -> Result<DistanceEstimate, CodeError> {
    let dim = kernel.row_count();
    if dim > EXACT_DISTANCE_MAX_DIM {
        return Err(CodeError::DimensionTooLarge {
            dim,
            limit: EXACT_DISTANCE_MAX_DIM,
        });
    }
    let mut w = BitVector::zeros(kernel.col_count());
    let mut best: Option<(usize, BitVector)> = None;
    for i in 1u64..(1 << dim) {
        w.xor_assign(kernel.row(i.trailing_zeros() as usize));
        let weight = w.weight();
        if best.as_ref().is_some_and(|(b, _)| weight >= *b) {
            continue;
        }
        if !stabilizers.contains(&w) {
            best = Some((weight, w.clone()));
        }
    }
    Ok(DistanceEstimate {
        distance: best.as_ref().map(|b| b.0),
        exact: true,
        trials: 0,
        witness: best.map(|b| b.1.ones().collect()),
    })
}

/// Information-set search: eliminate the kernel basis along a random column
/// order, then test every reduced row and every pair of reduced rows.
fn random_distance(kernel: &BitMatrix, stabilizers: &EchelonBasis, trials: usize, seed: u64) -> DistanceEstimate {
    let n = kernel.col_count();
    let best = (0..trials as u64)
        .into_par_iter()
        .filter_map(|t| {
            let mut rng = SplitMix64::new(seed.wrapping_add(t));
            let order = rng.sample_distinct(n, n);
            let rows = eliminate_along(kernel, &order);
            let mut local: Option<(usize, BitVector)> = None;
            let mut consider = |w: BitVector| {
                let weight = w.weight();
                if weight > 0
                    && local.as_ref().is_none_or(|(b, _)| weight < *b)
                    && !stabilizers.contains(&w)
                {
                    local = Some((weight, w));
                }
            };
            for (i, r) in rows.iter().enumerate() {
                consider(r.clone());
                for s in &rows[i + 1..] {
                    consider(r + s);
                }
            }
            local
        })
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.to_bits().cmp(&b.1.to_bits())));
    DistanceEstimate {
        distance: best.as_ref().map(|b| b.0),
        exact: false,
        trials,
        witness: best.map(|b| b.1.ones().collect()),
    }
}

/// Reduced rows of `m` with pivots chosen in the given column order.
fn eliminate_along(m: &BitMatrix, order: &[usize]) -> Vec<BitVector> {
    let mut rows: Vec<BitVector> = m.rows().to_vec();
    let mut rank = 0;
    for &col in order {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowWeights {
    pub x_max: usize,
    pub z_max: usize,
    pub x_column_max: usize,
    pub z_column_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaSummary {
    /// Dual tensor code of `(C_A, C_B)`.
    pub x_side: KappaReport,
    /// Dual tensor code of `(C_A^⊥, C_B^⊥)`.
    pub z_side: KappaReport,
    /// Random-code prediction with `ρ = k/Δ`.
    pub predicted_rate: Option<f64>,
    /// Random-code prediction with `ρ = 1 − k/Δ`.
    pub predicted_codim: Option<f64>,
    /// `δ²κ²n / (256Δ)`, reported only.
    pub distance_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeSummary {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "Delta")]
    pub delta: usize,
    #[serde(rename = "G_order")]
    pub group_order: usize,
    pub row_weights: RowWeights,
    #[serde(rename = "lambda_A")]
    pub lambda_a: f64,
    #[serde(rename = "lambda_B")]
    pub lambda_b: f64,
    pub lambda_square: [f64; 2],
    #[serde(rename = "delta")]
    pub delta_rel: f64,
    pub kappa_report: KappaSummary,
    pub params: CodeParams,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GeneratorSet, Group, Side};

    pub(crate) fn code(n: usize, a: &[usize], b: &[usize], k_a: usize, k_b: usize, seed: u64) -> QuantumTannerCode {
        let g = Group::cyclic(n).unwrap();
        let ga = GeneratorSet::new(&g, a.to_vec(), Side::A).unwrap();
        let gb = GeneratorSet::new(&g, b.to_vec(), Side::B).unwrap();
        let complex = SquareComplex::new(g, ga, gb).unwrap();
        let pair = LocalCodePair::random(a.len(), k_a, k_b, seed, seed + 1).unwrap();
        QuantumTannerCode::assemble(complex, pair).unwrap()
    }

    fn tiny() -> QuantumTannerCode {
        code(4, &[1, 3], &[1, 3], 1, 1, 1)
    }

    #[test]
    fn tiny_shapes() {
        let c = tiny();
        assert_eq!(c.n(), 16);
        assert_eq!(c.h_x().row_count(), 8);
        assert_eq!(c.h_z().row_count(), 8);
        assert!(c.h_x().mul_transpose(c.h_z()).is_zero());
        assert!(c.h_x().max_row_weight() <= 4);
    }

    #[test]
    fn zero_local_codes() {
        let g = Group::cyclic(4).unwrap();
        let ga = GeneratorSet::new(&g, vec![1, 3], Side::A).unwrap();
        let gb = GeneratorSet::new(&g, vec![1, 3], Side::B).unwrap();
        let complex = SquareComplex::new(g, ga, gb).unwrap();
        let pair = LocalCodePair::new(2, BitMatrix::empty(2), BitMatrix::empty(2)).unwrap();
        let c = QuantumTannerCode::assemble(complex, pair).unwrap();
        assert_eq!(c.h_x().row_count(), 0);
        assert_eq!(c.k(), c.n() - c.h_z().rank());
        let kernel = c.h_z().kernel_basis().row_count();
        assert_eq!(c.k(), kernel - c.h_x().rank());
    }

    #[test]
    fn delta_mismatch_is_rejected() {
        let c = tiny();
        let pair = LocalCodePair::random(3, 1, 1, 0, 1).unwrap();
        assert!(matches!(
            QuantumTannerCode::assemble(c.complex().clone(), pair),
            Err(CodeError::DeltaMismatch { .. })
        ));
    }

    #[test]
    fn rows_live_in_one_window_and_columns_match() {
        let c = code(11, &[1, 10, 3, 8], &[2, 9, 4, 7], 1, 3, 5);
        for (r, row) in c.h_x().rows().iter().enumerate() {
            let v = c.x_row_vertex(r);
            let window: Vec<usize> = c.complex().window(v).iter().map(|&q| q as usize).collect();
            assert!(row.ones().all(|q| window.contains(&q)));
            assert_eq!(c.x_row_offset(v), Some(r - r % c.rows_per_x_vertex()));
        }
        for (r, row) in c.h_z().rows().iter().enumerate() {
            let v = c.z_row_vertex(r);
            let window: Vec<usize> = c.complex().window(v).iter().map(|&q| q as usize).collect();
            assert!(row.ones().all(|q| window.contains(&q)));
        }
        // Each square is in exactly one window per class.
        let weights = c.h_x().column_weights();
        let cap = 2 * c.rows_per_x_vertex();
        assert!(weights.iter().all(|&w| w <= cap));
        let p = c.params();
        assert_eq!(p.n, 176);
        assert_eq!(p.rate_bound, Some(44));
        assert!(p.rate_bound_ok);
        assert_eq!(p.k, c.h_z().kernel_basis().row_count() - c.h_x().rank());
    }

    #[test]
    fn local_word_roundtrip() {
        let c = code(11, &[1, 10, 3, 8], &[2, 9, 4, 7], 2, 2, 3);
        for v in [0, 12, 25, 40] {
            let e = c.embed_local(v, 0xA5C3);
            assert_eq!(c.local_word(v, &e), 0xA5C3);
        }
    }

    #[test]
    fn tiny_distance_matches_enumeration() {
        let c = tiny();
        for side in [DistanceSide::X, DistanceSide::Z] {
            let est = c.distance_estimate(side, DistanceMode::Exact).unwrap();
            let (check, stab) = c.side_matrices(side);
            let stabs = EchelonBasis::new(stab);
            let mut oracle = None::<usize>;
            for bits in 1u32..1 << 16 {
                let w = BitVector::from_bits((0..16).map(|i| (bits >> i) & 1 == 1));
                if check.mul_vec(&w).is_zero() && !stabs.contains(&w) {
                    oracle = Some(oracle.map_or(w.weight(), |o| o.min(w.weight())));
                }
            }
            assert_eq!(est.distance, oracle);
            let rand = c
                .distance_estimate(side, DistanceMode::Randomized { trials: 20, seed: 3 })
                .unwrap();
            assert!(rand.distance >= est.distance);
        }
    }

    #[test]
    fn summary_serializes() {
        let c = tiny();
        let s = serde_json::to_value(c.summary(100, 1)).unwrap();
        for key in ["n", "k", "Delta", "G_order", "row_weights", "lambda_A", "lambda_B", "lambda_square", "delta", "kappa_report"] {
            assert!(s.get(key).is_some(), "{key}");
        }
    }
}
