//! Local codes on a `Δ × Δ` window.
//!
//! A local word is a `u64` whose bit `a·Δ + b` is the entry in row `a`
//! (indexed by A) and column `b` (indexed by B). Columns are vectors of
//! `F_2^A`, rows are vectors of `F_2^B`. Small code words of length Δ are
//! also `u64` masks with bit `i` for coordinate `i`.
//!
//! For a pair of codes `(C_col, C_row)` the relevant spaces are
//! - column part `C_col ⊗ F_2^B` (every column in `C_col`),
//! - row part `F_2^A ⊗ C_row` (every row in `C_row`),
//! - dual tensor code: their sum,
//! - tensor code `C_col ⊗ C_row`: their intersection.
//!
//! Any two decompositions `x = c + r` of a dual tensor codeword differ by a
//! tensor codeword `t`, so the minimum-norm search enumerates `(c₀+t, r₀+t)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::MAX_DELTA;
use crate::gf2::{BitMatrix, BitVector};
use crate::rng::SplitMix64;

/// Exact κ enumeration limit on the dual tensor dimension.
pub const EXACT_KAPPA_MAX_DIM: usize = 22;
/// Default limit on `dim(C_col ⊗ C_row)` for exact minimum-norm decomposition.
pub const DEFAULT_NORM_BUDGET: usize = 16;
/// Largest syndrome dimension a coset-leader table is built for.
pub const MAX_SYNDROME_DIM: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalCodeError {
    #[error("Δ = {0} is outside 1..=8")]
    BadDelta(usize),
    #[error("generator matrix has {cols} columns, expected Δ = {delta}")]
    WidthMismatch { cols: usize, delta: usize },
    #[error("generator matrix rows are linearly dependent (rank {rank} < {rows})")]
    NotFullRank { rank: usize, rows: usize },
    #[error("dimension {k} exceeds Δ = {delta}")]
    DimensionTooLarge { k: usize, delta: usize },
    #[error("word is not in the dual tensor code")]
    NotInDualTensorCode,
    #[error("tensor code dimension {dim} exceeds the decomposition budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },
    #[error("dual tensor dimension {dim} is too large for exact enumeration (limit {limit})")]
    EnumerationTooLarge { dim: usize, limit: usize },
    #[error("syndrome dimension {0} is too large for a coset-leader table")]
    SyndromeTooLarge(usize),
    #[error("ρ = {0} is outside (0, 1)")]
    Domain(f64),
}

// ---------------------------------------------------------------------------
// Window geometry
// ---------------------------------------------------------------------------

/// Bit layout helpers for a `Δ × Δ` window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    delta: usize,
}

impl Window {
    pub fn new(delta: usize) -> Self {
        assert!((1..=MAX_DELTA).contains(&delta), "Δ must be in 1..=8");
        Self { delta }
    }

    pub fn delta(self) -> usize {
        self.delta
    }

    pub fn bits(self) -> usize {
        self.delta * self.delta
    }

    /// All-ones mask of the window.
    pub fn full(self) -> u64 {
        low_mask(self.bits())
    }

    pub fn line_mask(self) -> u64 {
        low_mask(self.delta)
    }

    pub fn index(self, a: usize, b: usize) -> usize {
        a * self.delta + b
    }

    pub fn row(self, word: u64, a: usize) -> u64 {
        (word >> (a * self.delta)) & self.line_mask()
    }

    pub fn column(self, word: u64, b: usize) -> u64 {
        (0..self.delta).fold(0, |acc, a| acc | (((word >> self.index(a, b)) & 1) << a))
    }

    pub fn place_row(self, bits: u64, a: usize) -> u64 {
        (bits & self.line_mask()) << (a * self.delta)
    }

    pub fn place_column(self, bits: u64, b: usize) -> u64 {
        (0..self.delta)
            .filter(|&a| (bits >> a) & 1 == 1)
            .fold(0, |acc, a| acc | (1 << self.index(a, b)))
    }

    /// `‖c‖`: number of non-zero columns.
    pub fn column_norm(self, word: u64) -> u32 {
        let rows = (0..self.delta).fold(0, |acc, a| acc | self.row(word, a));
        rows.count_ones()
    }

    /// `‖r‖`: number of non-zero rows.
    pub fn row_norm(self, word: u64) -> u32 {
        (0..self.delta).filter(|&a| self.row(word, a) != 0).count() as u32
    }

    pub fn to_bitvector(self, word: u64) -> BitVector {
        BitVector::from_bits((0..self.bits()).map(|i| (word >> i) & 1 == 1))
    }

    pub fn from_bitvector(self, v: &BitVector) -> u64 {
        assert_eq!(v.len(), self.bits(), "window length mismatch");
        v.ones().fold(0, |acc, i| acc | (1 << i))
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Rows of a length-Δ generator matrix as masks.
fn matrix_words(m: &BitMatrix) -> Vec<u64> {
    m.rows()
        .iter()
        .map(|r| r.ones().fold(0u64, |acc, i| acc | (1 << i)))
        .collect()
}

/// Span of a word list, Gray-code order starting at zero.
fn span(basis: &[u64]) -> Vec<u64> {
    assert!(basis.len() < 40, "span too large to enumerate");
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut x = 0u64;
    out.push(x);
    for i in 1u64..(1 << basis.len()) {
        x ^= basis[i.trailing_zeros() as usize];
        out.push(x);
    }
    out
}

/// All words of `bits` bits with weight `w`, increasing numerically.
pub fn words_of_weight(bits: usize, w: usize) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << bits;
    let mut next: Option<u128> = if w > bits {
        None
    } else {
        Some((1u128 << w) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur as u64)
    })
}

// ---------------------------------------------------------------------------
// Small codes
// ---------------------------------------------------------------------------

/// Uniformly random full-rank `k × Δ` generator matrix, by rejection sampling.
///
/// Rows are the low `Δ` bits of successive SplitMix64 outputs.
pub fn random_code(delta: usize, k: usize, seed: u64) -> BitMatrix {
    assert!(k <= delta, "dimension {k} exceeds length {delta}");
    assert!(delta <= 64, "length {delta} exceeds 64");
    let mut rng = SplitMix64::new(seed);
    let mask = low_mask(delta);
    loop {
        let words: Vec<u64> = (0..k).map(|_| rng.next_u64() & mask).collect();
        let rows: Vec<BitVector> = words
            .iter()
            .map(|&w| BitVector::from_bits((0..delta).map(|i| (w >> i) & 1 == 1)))
            .collect();
        let m = BitMatrix::from_rows(delta, rows);
        if m.rank() == k {
            return m;
        }
    }
}

/// Minimum weight of a non-zero codeword; `None` for the zero code.
pub fn min_distance(gens: &BitMatrix) -> Option<usize> {
    span(&matrix_words(gens))
        .into_iter()
        .filter(|&x| x != 0)
        .map(|x| x.count_ones() as usize)
        .min()
}

/// Which local configuration: X-side uses `(C_A, C_B)`, Z-side uses the duals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LocalRole {
    XSide,
    ZSide,
}

/// The pair of local codes `C_A ⊂ F_2^A`, `C_B ⊂ F_2^B`.
#[derive(Clone, Debug)]
pub struct LocalCodePair {
    delta: usize,
    gen_a: BitMatrix,
    gen_b: BitMatrix,
    par_a: BitMatrix,
    par_b: BitMatrix,
    distances: CodeDistances,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeDistances {
    pub d_a: Option<usize>,
    pub d_b: Option<usize>,
    pub d_a_dual: Option<usize>,
    pub d_b_dual: Option<usize>,
    /// `δ = min(d(C_A), d(C_B), d(C_A^⊥), d(C_B^⊥)) / Δ` over the non-zero codes.
    pub delta_rel: f64,
}

impl LocalCodePair {
    pub fn new(delta: usize, gen_a: BitMatrix, gen_b: BitMatrix) -> Result<Self, LocalCodeError> {
        if !(1..=MAX_DELTA).contains(&delta) {
            return Err(LocalCodeError::BadDelta(delta));
        }
        for g in [&gen_a, &gen_b] {
            if g.col_count() != delta {
                return Err(LocalCodeError::WidthMismatch { cols: g.col_count(), delta });
            }
            let rank = g.rank();
            if rank != g.row_count() {
                return Err(LocalCodeError::NotFullRank { rank, rows: g.row_count() });
            }
        }
        let par_a = gen_a.dual_basis();
        let par_b = gen_b.dual_basis();
        let ds = [
            min_distance(&gen_a),
            min_distance(&gen_b),
            min_distance(&par_a),
            min_distance(&par_b),
        ];
        let delta_rel = ds.iter().flatten().copied().min().unwrap_or(delta) as f64 / delta as f64;
        Ok(Self {
            delta,
            distances: CodeDistances {
                d_a: ds[0],
                d_b: ds[1],
                d_a_dual: ds[2],
                d_b_dual: ds[3],
                delta_rel,
            },
            gen_a,
            gen_b,
            par_a,
            par_b,
        })
    }

    /// Random codes of dimensions `k_a`, `k_b`, seeded independently.
    pub fn random(delta: usize, k_a: usize, k_b: usize, seed_a: u64, seed_b: u64) -> Result<Self, LocalCodeError> {
        if !(1..=MAX_DELTA).contains(&delta) {
            return Err(LocalCodeError::BadDelta(delta));
        }
        for k in [k_a, k_b] {
            if k > delta {
                return Err(LocalCodeError::DimensionTooLarge { k, delta });
            }
        }
        Self::new(delta, random_code(delta, k_a, seed_a), random_code(delta, k_b, seed_b))
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn k_a(&self) -> usize {
        self.gen_a.row_count()
    }

    pub fn k_b(&self) -> usize {
        self.gen_b.row_count()
    }

    pub fn gen_a(&self) -> &BitMatrix {
        &self.gen_a
    }

    pub fn gen_b(&self) -> &BitMatrix {
        &self.gen_b
    }

    pub fn par_a(&self) -> &BitMatrix {
        &self.par_a
    }

    pub fn par_b(&self) -> &BitMatrix {
        &self.par_b
    }

    pub fn distances(&self) -> &CodeDistances {
        &self.distances
    }

    /// `k_B == Δ − k_A`.
    pub fn is_complementary(&self) -> bool {
        self.k_a() + self.k_b() == self.delta
    }

    /// The product structure whose dual tensor code is the flip space for `role`:
    /// `(C_A, C_B)` on the X side, `(C_A^⊥, C_B^⊥)` on the Z side.
    pub fn product(&self, role: LocalRole) -> ProductPair {
        let (ca, cb, da, db) = match role {
            LocalRole::XSide => (&self.gen_a, &self.gen_b, &self.par_a, &self.par_b),
            LocalRole::ZSide => (&self.par_a, &self.par_b, &self.gen_a, &self.gen_b),
        };
        ProductPair::new(
            self.delta,
            matrix_words(ca),
            matrix_words(cb),
            matrix_words(da),
            matrix_words(db),
        )
    }

    /// Bases over `F_2^{Δ²}`, rows in window layout.
    pub fn tensor_basis(&self, which: TensorKind) -> BitMatrix {
        let window = Window::new(self.delta);
        let words = match which {
            TensorKind::Tensor => self.product(LocalRole::XSide).tensor_basis(),
            TensorKind::DualTensor => self.product(LocalRole::XSide).dual_tensor_basis().to_vec(),
            TensorKind::PerpTensor => self.product(LocalRole::ZSide).tensor_basis(),
            TensorKind::PerpDualTensor => self.product(LocalRole::ZSide).dual_tensor_basis().to_vec(),
        };
        BitMatrix::from_rows(
            window.bits(),
            words.into_iter().map(|w| window.to_bitvector(w)).collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    /// `C_A ⊗ C_B`
    Tensor,
    /// `C_A ⊗ F_2^B + F_2^A ⊗ C_B`
    DualTensor,
    /// `C_A^⊥ ⊗ C_B^⊥`
    PerpTensor,
    /// `C_A^⊥ ⊗ F_2^B + F_2^A ⊗ C_B^⊥`
    PerpDualTensor,
}

// ---------------------------------------------------------------------------
// Product structure and decompositions
// ---------------------------------------------------------------------------

/// A decomposition `x = c + r` with `c` in the column part and `r` in the row part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub c: u64,
    pub r: u64,
    pub norm_c: u32,
    pub norm_r: u32,
    /// False when the norm was not minimized (budget fallback).
    pub minimal: bool,
}

impl Decomposition {
    pub fn word(&self) -> u64 {
        self.c ^ self.r
    }

    pub fn norm(&self) -> u32 {
        self.norm_c + self.norm_r
    }
}

/// Echelon form over `u64` words that remembers which generators were combined.
#[derive(Clone, Debug)]
struct TrackedBasis {
    /// `(vector, pivot bit, generator combination)`.
    rows: Vec<(u64, u32, u128)>,
}

impl TrackedBasis {
    fn new(gens: &[u64]) -> Self {
        assert!(gens.len() <= 128, "too many generators to track");
        let mut basis = Self { rows: Vec::new() };
        for (i, &g) in gens.iter().enumerate() {
            let (v, combo) = basis.reduce(g, 1u128 << i);
            if v != 0 {
                let pivot = 63 - v.leading_zeros();
                basis.rows.push((v, pivot, combo));
            }
        }
        basis
    }

    fn reduce(&self, mut v: u64, mut combo: u128) -> (u64, u128) {
        for &(row, pivot, c) in &self.rows {
            if (v >> pivot) & 1 == 1 {
                v ^= row;
                combo ^= c;
            }
        }
        (v, combo)
    }
}

/// The column/row product structure for one pair of small codes.
#[derive(Clone, Debug)]
pub struct ProductPair {
    window: Window,
    col: Vec<u64>,
    row: Vec<u64>,
    col_dual: Vec<u64>,
    row_dual: Vec<u64>,
    /// Column-part generators followed by row-part generators.
    part_gens: Vec<u64>,
    solver: TrackedBasis,
    /// Independent basis of the dual tensor code: the whole column part,
    /// then row-part generators independent of it.
    dual_basis: Vec<u64>,
    /// Known decomposition `(c, r)` of each `dual_basis` element.
    dual_basis_parts: Vec<(u64, u64)>,
    tensor_words: Vec<u64>,
    syndrome_basis: Vec<u64>,
}

impl ProductPair {
    /// `col`/`row` generate the codes; `col_dual`/`row_dual` generate their duals
    /// and define the local syndrome basis `col_dual ⊗ row_dual`.
    pub fn new(delta: usize, col: Vec<u64>, row: Vec<u64>, col_dual: Vec<u64>, row_dual: Vec<u64>) -> Self {
        let window = Window::new(delta);
        let mut part_gens = Vec::new();
        for &g in &col {
            for b in 0..delta {
                part_gens.push(window.place_column(g, b));
            }
        }
        let n_col = part_gens.len();
        for a in 0..delta {
            for &h in &row {
                part_gens.push(window.place_row(h, a));
            }
        }
        let solver = TrackedBasis::new(&part_gens);
        let mut dual_basis = Vec::new();
        let mut dual_basis_parts = Vec::new();
        let mut echelon = TrackedBasis { rows: Vec::new() };
        for (i, &g) in part_gens.iter().enumerate() {
            let (v, _) = echelon.reduce(g, 0);
            if v != 0 {
                let pivot = 63 - v.leading_zeros();
                echelon.rows.push((v, pivot, 0));
                dual_basis.push(g);
                dual_basis_parts.push(if i < n_col { (g, 0) } else { (0, g) });
            }
        }
        let tensor = tensor_words(window, &col, &row);
        let syndrome_basis = tensor_words(window, &col_dual, &row_dual);
        Self {
            window,
            tensor_words: span(&tensor),
            col,
            row,
            col_dual,
            row_dual,
            part_gens,
            solver,
            dual_basis,
            dual_basis_parts,
            syndrome_basis,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn delta(&self) -> usize {
        self.window.delta()
    }

    pub fn col_dim(&self) -> usize {
        self.col.len()
    }

    pub fn row_dim(&self) -> usize {
        self.row.len()
    }

    /// `dim(C_col ⊗ C_row)`.
    pub fn tensor_dim(&self) -> usize {
        self.col.len() * self.row.len()
    }

    /// `k_col·Δ + k_row·Δ − k_col·k_row`.
    pub fn dual_tensor_dim(&self) -> usize {
        self.dual_basis.len()
    }

    /// Dimension of the local syndrome space, `(Δ − k_col)(Δ − k_row)`.
    pub fn syndrome_dim(&self) -> usize {
        self.syndrome_basis.len()
    }

    pub fn tensor_basis(&self) -> Vec<u64> {
        tensor_words(self.window, &self.col, &self.row)
    }

    pub fn dual_tensor_basis(&self) -> &[u64] {
        &self.dual_basis
    }

    /// Rows of `C_col^⊥ ⊗ C_row^⊥`, in generator order; these are the local
    /// parity checks of the dual tensor code.
    pub fn syndrome_basis(&self) -> &[u64] {
        &self.syndrome_basis
    }

    pub fn column_generators(&self) -> &[u64] {
        &self.col
    }

    pub fn row_generators(&self) -> &[u64] {
        &self.row
    }

    pub fn column_dual_generators(&self) -> &[u64] {
        &self.col_dual
    }

    pub fn row_dual_generators(&self) -> &[u64] {
        &self.row_dual
    }

    /// Local syndrome: bit `i` is `⟨word, syndrome_basis[i]⟩`.
    pub fn syndrome(&self, word: u64) -> u64 {
        self.syndrome_basis
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &h)| acc | (u64::from(parity(word & h)) << i))
    }

    pub fn contains(&self, word: u64) -> bool {
        self.solver.reduce(word, 0).0 == 0
    }

    /// Some decomposition `x = c + r`, straight from elimination.
    pub fn decompose_any(&self, x: u64) -> Result<(u64, u64), LocalCodeError> {
        let (residual, combo) = self.solver.reduce(x, 0);
        if residual != 0 {
            return Err(LocalCodeError::NotInDualTensorCode);
        }
        let n_col = self.col.len() * self.delta();
        let mut c = 0;
        let mut r = 0;
        for (i, &g) in self.part_gens.iter().enumerate() {
            if (combo >> i) & 1 == 1 {
                if i < n_col {
                    c ^= g;
                } else {
                    r ^= g;
                }
            }
        }
        debug_assert_eq!(c ^ r, x);
        Ok((c, r))
    }

    fn make(&self, c: u64, r: u64, minimal: bool) -> Decomposition {
        Decomposition {
            c,
            r,
            norm_c: self.window.column_norm(c),
            norm_r: self.window.row_norm(r),
            minimal,
        }
    }

    /// Minimum over `t ∈ C_col ⊗ C_row` of `‖c₀+t‖ + ‖r₀+t‖` for a known
    /// decomposition `(c₀, r₀)`. Ties: smaller `‖c‖`, then smaller `c`.
    fn minimize_from(&self, c0: u64, r0: u64) -> Decomposition {
        let w = self.window;
        let mut best = (u32::MAX, u32::MAX, u64::MAX, 0u64);
        for &t in &self.tensor_words {
            let c = c0 ^ t;
            let nc = w.column_norm(c);
            let nr = w.row_norm(r0 ^ t);
            let key = (nc + nr, nc, c, r0 ^ t);
            if (key.0, key.1, key.2) < (best.0, best.1, best.2) {
                best = key;
            }
        }
        self.make(best.2, best.3, true)
    }

    /// The decomposition of minimum norm `‖c‖ + ‖r‖`.
    pub fn min_norm_decompose(&self, x: u64, budget: usize) -> Result<Decomposition, LocalCodeError> {
        let (c0, r0) = self.decompose_any(x)?;
        if self.tensor_dim() > budget {
            return Err(LocalCodeError::BudgetExceeded {
                dim: self.tensor_dim(),
                budget,
            });
        }
        Ok(self.minimize_from(c0, r0))
    }

    /// Minimum-norm decomposition within budget, otherwise the first solution
    /// flagged as non-minimal.
    pub fn decompose(&self, x: u64, budget: usize) -> Result<Decomposition, LocalCodeError> {
        match self.min_norm_decompose(x, budget) {
            Err(LocalCodeError::BudgetExceeded { .. }) => {
                let (c, r) = self.decompose_any(x)?;
                Ok(self.make(c, r, false))
            }
            other => other,
        }
    }

    /// Every non-zero dual tensor codeword with its minimum-norm decomposition.
    pub fn enumerate_min_norm(&self, budget: usize) -> Result<Vec<Decomposition>, LocalCodeError> {
        let dim = self.dual_tensor_dim();
        if dim > EXACT_KAPPA_MAX_DIM {
            return Err(LocalCodeError::EnumerationTooLarge {
                dim,
                limit: EXACT_KAPPA_MAX_DIM,
            });
        }
        let minimal = self.tensor_dim() <= budget;
        let total = 1u64 << dim;
        // Gray code index g(i) = i ^ (i >> 1) gives the word directly.
        let out = (1..total)
            .into_par_iter()
            .map(|i| {
                let gray = i ^ (i >> 1);
                let (mut c, mut r) = (0u64, 0u64);
                for (j, &(bc, br)) in self.dual_basis_parts.iter().enumerate() {
                    if (gray >> j) & 1 == 1 {
                        c ^= bc;
                        r ^= br;
                    }
                }
                if minimal {
                    self.minimize_from(c, r)
                } else {
                    self.make(c, r, false)
                }
            })
            .collect();
        Ok(out)
    }

    /// Random non-zero dual tensor codeword.
    pub fn random_codeword(&self, rng: &mut SplitMix64) -> u64 {
        if self.dual_basis.is_empty() {
            return 0;
        }
        loop {
            let x = self
                .dual_basis
                .iter()
                .filter(|_| rng.next_u64() & 1 == 1)
                .fold(0, |acc, &g| acc ^ g);
            if x != 0 {
                return x;
            }
        }
    }
}

fn tensor_words(window: Window, col: &[u64], row: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(col.len() * row.len());
    for &g in col {
        for &h in row {
            let word = (0..window.delta())
                .filter(|&a| (g >> a) & 1 == 1)
                .fold(0, |acc, a| acc | window.place_row(h, a));
            out.push(word);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Coset leaders
// ---------------------------------------------------------------------------

/// Minimum-weight word for every local syndrome.
#[derive(Clone, Debug)]
pub struct CosetLeaderTable {
    syndrome_basis: Vec<u64>,
    leaders: Vec<u64>,
    max_weight: u32,
}

impl CosetLeaderTable {
    /// Enumerates words by increasing weight, numerically increasing within a
    /// weight, and keeps the first word seen for each syndrome.
    pub fn build(product: &ProductPair) -> Result<Self, LocalCodeError> {
        let m = product.syndrome_dim();
        if m > MAX_SYNDROME_DIM {
            return Err(LocalCodeError::SyndromeTooLarge(m));
        }
        let size = 1usize << m;
        let mut leaders = vec![u64::MAX; size];
        let mut filled = 0;
        let mut max_weight = 0;
        'outer: for w in 0..=product.window().bits() {
            for word in words_of_weight(product.window().bits(), w) {
                let s = product.syndrome(word) as usize;
                if leaders[s] == u64::MAX {
                    leaders[s] = word;
                    filled += 1;
                    max_weight = w as u32;
                    if filled == size {
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(filled, size, "local syndrome map must be surjective");
        Ok(Self {
            syndrome_basis: product.syndrome_basis().to_vec(),
            leaders,
            max_weight,
        })
    }

    pub fn syndrome_dim(&self) -> usize {
        self.syndrome_basis.len()
    }

    /// Leader for a local syndrome given as a bit mask.
    pub fn decode(&self, syndrome: u64) -> u64 {
        self.leaders[syndrome as usize]
    }

    pub fn syndrome(&self, word: u64) -> u64 {
        self.syndrome_basis
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &h)| acc | (u64::from(parity(word & h)) << i))
    }

    /// Largest leader weight (covering radius of the local code).
    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }
}

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaMode {
    Exact,
    Sample { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaReport {
    /// `min |x| / (Δ·minNorm(x))`; `None` when the dual tensor code is `{0}` (vacuous, +∞).
    pub kappa: Option<f64>,
    /// True for full enumeration, false for a sampled upper bound.
    pub exact: bool,
    pub codewords_examined: u64,
    /// A codeword attaining the reported value.
    pub witness: Option<u64>,
    /// Whether every norm used was a verified minimum.
    pub norms_minimal: bool,
}

/// Product-expansion constant of the dual tensor code of `product`.
pub fn kappa_estimate(product: &ProductPair, mode: KappaMode, budget: usize) -> Result<KappaReport, LocalCodeError> {
    let delta = product.delta() as f64;
    let ratio = |d: &Decomposition| (d.word().count_ones() as f64) / (delta * f64::from(d.norm()));
    let best = |decs: Vec<Decomposition>| {
        decs.into_iter()
            .map(|d| (ratio(&d), d.word(), d.minimal))
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
    };
    match mode {
        KappaMode::Exact => {
            let decs = product.enumerate_min_norm(budget)?;
            let examined = decs.len() as u64;
            let norms_minimal = decs.iter().all(|d| d.minimal);
            let b = best(decs);
            Ok(KappaReport {
                kappa: b.map(|x| x.0),
                exact: norms_minimal,
                codewords_examined: examined,
                witness: b.map(|x| x.1),
                norms_minimal,
            })
        }
        KappaMode::Sample { samples, seed } => {
            if product.dual_tensor_dim() == 0 {
                return Ok(KappaReport {
                    kappa: None,
                    exact: true,
                    codewords_examined: 0,
                    witness: None,
                    norms_minimal: true,
                });
            }
            let decs: Vec<Decomposition> = (0..samples as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = SplitMix64::new(seed.wrapping_add(i));
                    let x = product.random_codeword(&mut rng);
                    product.decompose(x, budget).expect("sampled word is a codeword")
                })
                .collect();
            let norms_minimal = decs.iter().all(|d| d.minimal);
            let b = best(decs);
            Ok(KappaReport {
                kappa: b.map(|x| x.0),
                exact: false,
                codewords_examined: samples as u64,
                witness: b.map(|x| x.1),
                norms_minimal,
            })
        }
    }
}

/// Binary entropy `H₂(x)`, with `H₂(0) = H₂(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Inverse of `H₂` on `[0, 1/2]`, by bisection to `1e-12`.
pub fn binary_entropy_inv(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Predicted κ for random codes of relative codimensions `ρ_A`, `ρ_B`:
/// `½ min(¼ H₂⁻¹(ρ_A/8) H₂⁻¹(ρ_B/8), H₂⁻¹(ρ_A ρ_B / 8))`.
pub fn predicted_kappa(rho_a: f64, rho_b: f64) -> Result<f64, LocalCodeError> {
    for rho in [rho_a, rho_b] {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(LocalCodeError::Domain(rho));
        }
    }
    let h = binary_entropy_inv;
    Ok(0.5 * (0.25 * h(rho_a / 8.0) * h(rho_b / 8.0)).min(h(rho_a * rho_b / 8.0)))
}
