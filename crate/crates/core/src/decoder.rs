//! Mismatch-decomposition decoding for one error type.
//!
//! Pipeline: local coset-leader preprocessing on one side of the complex,
//! the mismatch `Z = Σ ε_v`, a sequential or parallel decomposition of `Z`
//! into local dual-tensor codewords, and postprocessing into `ê`.
//!
//! A flip `x = c + r` found at `v ∈ V_ij` adds `c` to `Ĉ_j` (its columns are
//! shared with `V_īj`) and `r` to `R̂_i` (rows shared with `V_ij̄`).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{VertexClass, MAX_DELTA};
use crate::gf2::{BitVector, EchelonBasis};
use crate::local_codes::{
    words_of_weight, CosetLeaderTable, Decomposition, LocalCodeError, LocalRole, ProductPair, DEFAULT_NORM_BUDGET,
};
use crate::tanner::QuantumTannerCode;

/// Largest flip-code dimension searched exhaustively.
pub const EXHAUSTIVE_MAX_DIM: usize = 20;
/// Largest number of entries a bounded-norm table may hold.
pub const MAX_FLIP_TABLE: usize = 1 << 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// σ_x errors, detected by `H_Z`; preprocessing on `V1`.
    Xerror,
    /// σ_z errors, detected by `H_X`; preprocessing on `V0`.
    Zerror,
}

impl Role {
    pub fn local(self) -> LocalRole {
        match self {
            Role::Xerror => LocalRole::XSide,
            Role::Zerror => LocalRole::ZSide,
        }
    }

    /// Classes holding the local syndromes.
    pub fn preprocess_classes(self) -> [VertexClass; 2] {
        match self {
            Role::Xerror => [VertexClass::V01, VertexClass::V10],
            Role::Zerror => [VertexClass::V00, VertexClass::V11],
        }
    }

    /// Order of vertex classes for scanning and for parallel substeps.
    /// `Zerror` uses the image of the `Xerror` order under `V_ij ↦ V_ij̄`.
    pub fn class_order(self) -> [VertexClass; 4] {
        use VertexClass::*;
        match self {
            Role::Xerror => [V00, V01, V10, V11],
            Role::Zerror => [V01, V00, V11, V10],
        }
    }

    /// `(primary, mirror)` classes for postprocessing.
    pub fn postprocess_classes(self) -> [VertexClass; 2] {
        match self {
            Role::Xerror => [VertexClass::V10, VertexClass::V01],
            Role::Zerror => [VertexClass::V11, VertexClass::V00],
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Xerror => "Xerror",
            Role::Zerror => "Zerror",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SearchStrategy {
    /// Every non-zero flip-code word.
    Exhaustive,
    /// Words `c + r` with at most `w` non-zero columns and `w` non-zero rows.
    BoundedNorm { w: usize },
}

impl SearchStrategy {
    /// Exhaustive when the flip code is small enough, otherwise the largest
    /// bounded norm `w ≤ 2` whose table fits.
    pub fn auto(product: &ProductPair) -> Self {
        if product.dual_tensor_dim() <= EXHAUSTIVE_MAX_DIM {
            return SearchStrategy::Exhaustive;
        }
        let w = if bounded_table_size(product, 2) <= MAX_FLIP_TABLE { 2 } else { 1 };
        SearchStrategy::BoundedNorm { w }
    }
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchStrategy::Exhaustive => f.write_str("exhaustive"),
            SearchStrategy::BoundedNorm { w } => write!(f, "bounded_norm({w})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Sequential,
    Parallel,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Sequential => "sequential",
            DecoderKind::Parallel => "parallel",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderConfig {
    /// Threshold parameter of the sequential criterion, in `(0, 1)`.
    pub epsilon: f64,
    /// `None` picks [`SearchStrategy::auto`].
    pub strategy: Option<SearchStrategy>,
    /// Budget on `dim(C_col ⊗ C_row)` for minimum-norm decomposition.
    pub budget: usize,
    /// Overrides the parallel round limit `64·⌈log₂(1 + |Z|)⌉`.
    pub round_limit: Option<usize>,
    /// Runs exactly this many parallel rounds without stall detection.
    pub fixed_rounds: Option<usize>,
    /// Checks conservation and flip criteria after every flip.
    pub audit: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.25,
            strategy: None,
            budget: DEFAULT_NORM_BUDGET,
            round_limit: None,
            fixed_rounds: None,
            audit: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("vector length {got} does not match expected length {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("ε = {0} is outside (0, 1)")]
    BadEpsilon(f64),
    #[error("postprocessing formulas disagree on {0} squares")]
    ConsistencyViolation(usize),
    #[error("correction does not reproduce the syndrome")]
    SyndromeMismatch,
    #[error("flip table with {0} entries exceeds the size limit")]
    TableTooLarge(usize),
    #[error("Δ = {0} is too large for a local window")]
    DeltaTooLarge(usize),
    #[error(transparent)]
    Local(#[from] LocalCodeError),
}

// ---------------------------------------------------------------------------
// Flip table
// ---------------------------------------------------------------------------

/// One candidate local flip with a fixed decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipEntry {
    pub word: u64,
    pub weight: u32,
    pub c: u64,
    pub r: u64,
    pub norm_c: u32,
    pub norm_r: u32,
    pub minimal: bool,
}

impl FlipEntry {
    fn from_decomposition(d: Decomposition) -> Self {
        Self {
            word: d.word(),
            weight: d.word().count_ones(),
            c: d.c,
            r: d.r,
            norm_c: d.norm_c,
            norm_r: d.norm_r,
            minimal: d.minimal,
        }
    }
}

/// Candidate flips for one role, sorted by word.
#[derive(Clone, Debug)]
pub struct FlipTable {
    strategy: SearchStrategy,
    entries: Vec<FlipEntry>,
}

fn bounded_table_size(product: &ProductPair, w: usize) -> usize {
    let delta = product.delta();
    let count = |k: usize| -> usize {
        let nz = (1usize << k) - 1;
        (0..=w.min(delta)).map(|j| binomial(delta, j) * nz.pow(j as u32)).sum()
    };
    count(product.col_dim()).saturating_mul(count(product.row_dim()))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Words with at most `w` non-zero lines, each line any non-zero codeword,
/// as `(word, line count)`.
fn bounded_lines(delta: usize, gens: &[u64], w: usize, place: impl Fn(u64, usize) -> u64) -> Vec<(u64, u32)> {
    let span: Vec<u64> = {
        let mut s = vec![0u64];
        for &g in gens {
            let ext: Vec<u64> = s.iter().map(|&x| x ^ g).collect();
            s.extend(ext);
        }
        s.into_iter().filter(|&x| x != 0).collect()
    };
    let mut out = vec![(0u64, 0u32)];
    for j in 1..=w.min(delta) {
        for lines in words_of_weight(delta, j) {
            let idx: Vec<usize> = (0..delta).filter(|&i| (lines >> i) & 1 == 1).collect();
            let mut partial = vec![0u64];
            for &line in &idx {
                partial = partial
                    .iter()
                    .flat_map(|&p| span.iter().map(move |&s| (p, s)))
                    .map(|(p, s)| p | place(s, line))
                    .collect();
            }
            out.extend(partial.into_iter().map(|p| (p, j as u32)));
        }
    }
    out
}

impl FlipTable {
    pub fn build(product: &ProductPair, strategy: SearchStrategy, budget: usize) -> Result<Self, DecodeError> {
        let mut entries: Vec<FlipEntry> = match strategy {
            SearchStrategy::Exhaustive => product
                .enumerate_min_norm(budget)?
                .into_iter()
                .map(FlipEntry::from_decomposition)
                .collect(),
            SearchStrategy::BoundedNorm { w } => {
                let size = bounded_table_size(product, w);
                if size > MAX_FLIP_TABLE {
                    return Err(DecodeError::TableTooLarge(size));
                }
                let window = product.window();
                let cols = bounded_lines(product.delta(), product.column_generators(), w, |s, b| {
                    window.place_column(s, b)
                });
                let rows = bounded_lines(product.delta(), product.row_generators(), w, |s, a| window.place_row(s, a));
                let mut best: std::collections::HashMap<u64, FlipEntry> = std::collections::HashMap::new();
                for &(c, nc) in &cols {
                    for &(r, nr) in &rows {
                        let word = c ^ r;
                        if word == 0 {
                            continue;
                        }
                        let entry = FlipEntry {
                            word,
                            weight: word.count_ones(),
                            c,
                            r,
                            norm_c: nc,
                            norm_r: nr,
                            minimal: false,
                        };
                        best.entry(word)
                            .and_modify(|e| {
                                if (entry.norm_c + entry.norm_r, entry.norm_c, entry.c) < (e.norm_c + e.norm_r, e.norm_c, e.c) {
                                    *e = entry;
                                }
                            })
                            .or_insert(entry);
                    }
                }
                best.into_values().collect()
            }
        };
        entries.sort_unstable_by_key(|e| e.word);
        Ok(Self { strategy, entries })
    }

    pub fn strategy(&self) -> SearchStrategy {
        self.strategy
    }

    pub fn entries(&self) -> &[FlipEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sequential criterion `2|z ∧ x| ≥ (2 − ε)|x|`; returns the candidate of
    /// largest gain `|z| − |z + x|`, ties to the smallest word.
    pub fn find_threshold(&self, z: u64, epsilon: f64) -> Option<&FlipEntry> {
        if z == 0 {
            return None;
        }
        let mut best: Option<(i64, &FlipEntry)> = None;
        for e in &self.entries {
            let overlap = (z & e.word).count_ones();
            if f64::from(2 * overlap) >= (2.0 - epsilon) * f64::from(e.weight) {
                let gain = 2 * i64::from(overlap) - i64::from(e.weight);
                if best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, e));
                }
            }
        }
        best.map(|b| b.1)
    }

    /// Parallel criterion `|z| − |z + x| ≥ |x|/2`, i.e. `4|z ∧ x| ≥ 3|x|`;
    /// returns a candidate of largest `|x|`, ties to the smallest word.
    pub fn find_half(&self, z: u64) -> Option<&FlipEntry> {
        if z == 0 {
            return None;
        }
        let mut best: Option<&FlipEntry> = None;
        for e in &self.entries {
            let overlap = (z & e.word).count_ones();
            if 4 * overlap >= 3 * e.weight && best.is_none_or(|b| e.weight > b.weight) {
                best = Some(e);
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// State and outcome
// ---------------------------------------------------------------------------

/// Local leaders `ε_v` and the mismatch `Z = Σ ε_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub z: BitVector,
    /// `(vertex id, ε_v)` for the preprocessing classes, in row order.
    pub leaders: Vec<(usize, u64)>,
}

/// `Ĉ_0, R̂_0, Ĉ_1, R̂_1` and the remaining mismatch `Ẑ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionState {
    pub z_hat: BitVector,
    pub c: [BitVector; 2],
    pub r: [BitVector; 2],
}

impl DecompositionState {
    fn new(z: &BitVector) -> Self {
        let zero = BitVector::zeros(z.len());
        Self {
            z_hat: z.clone(),
            c: [zero.clone(), zero.clone()],
            r: [zero.clone(), zero],
        }
    }

    /// `Ĉ_0 + R̂_0 + Ĉ_1 + R̂_1 + Ẑ`.
    pub fn total(&self) -> BitVector {
        let mut t = self.z_hat.clone();
        for v in self.c.iter().chain(self.r.iter()) {
            t.xor_assign(v);
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipRecord {
    pub step: usize,
    pub vertex_class: VertexClass,
    pub vertex: usize,
    #[serde(rename = "|x|")]
    pub weight: u32,
    pub gain: i64,
    pub norm_c: u32,
    pub norm_r: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FailureReason {
    /// Sequential: a full pass found no candidate.
    Stalled,
    /// Parallel: a round left `Ẑ` unchanged.
    NoProgress,
    StepLimitExceeded,
    RoundLimitExceeded,
    /// Fixed-round mode ended with `Ẑ ≠ 0`.
    RoundsExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Success,
    Failure(FailureReason),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub checks: usize,
    pub conservation_violations: usize,
    pub criterion_violations: usize,
}

impl Audit {
    pub fn clean(&self) -> bool {
        self.conservation_violations == 0 && self.criterion_violations == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub status: Status,
    /// Correction; zero on failure.
    pub e_hat: BitVector,
    pub mismatch_weight: usize,
    pub steps: usize,
    pub rounds: usize,
    pub flips: Vec<FlipRecord>,
    pub audit: Audit,
    pub state: DecompositionState,
}

impl DecodeOutcome {
    pub fn success(&self) -> bool {
        self.status == Status::Success
    }
}

/// Preprocessing facts that need the true error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MismatchCheck {
    pub e_weight: usize,
    pub z_weight: usize,
    /// `Σ_v e_v == 0` over the preprocessing classes.
    pub local_sum_zero: bool,
    /// `Z == Σ_v (e_v + ε_v)`.
    pub matches_sum: bool,
    /// `|Z| ≤ 4|e|`.
    pub weight_bound: bool,
}

impl MismatchCheck {
    pub fn holds(&self) -> bool {
        self.local_sum_zero && self.matches_sum && self.weight_bound
    }
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

/// Precomputed tables for decoding one error type on one code.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    code: &'a QuantumTannerCode,
    role: Role,
    config: DecoderConfig,
    product: ProductPair,
    leaders: CosetLeaderTable,
    flips: FlipTable,
    stabilizers: EchelonBasis,
    /// Vertex ids in scan order.
    scan: Vec<usize>,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a QuantumTannerCode, role: Role, config: DecoderConfig) -> Result<Self, DecodeError> {
        if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
            return Err(DecodeError::BadEpsilon(config.epsilon));
        }
        if code.complex().delta() > MAX_DELTA {
            return Err(DecodeError::DeltaTooLarge(code.complex().delta()));
        }
        let product = code.pair().product(role.local());
        let leaders = CosetLeaderTable::build(&product)?;
        let strategy = config.strategy.unwrap_or_else(|| SearchStrategy::auto(&product));
        let flips = FlipTable::build(&product, strategy, config.budget)?;
        let stabilizers = EchelonBasis::new(match role {
            Role::Xerror => code.h_x(),
            Role::Zerror => code.h_z(),
        });
        let complex = code.complex();
        let scan = role
            .class_order()
            .into_iter()
            .flat_map(|c| complex.class_vertices(c).map(|v| complex.vertex_id(v)))
            .collect();
        Ok(Self {
            code,
            role,
            config,
            product,
            leaders,
            flips,
            stabilizers,
            scan,
        })
    }

    pub fn code(&self) -> &QuantumTannerCode {
        self.code
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn flip_table(&self) -> &FlipTable {
        &self.flips
    }

    pub fn product(&self) -> &ProductPair {
        &self.product
    }

    fn check_len(&self, v: &BitVector, expected: usize) -> Result<(), DecodeError> {
        if v.len() != expected {
            return Err(DecodeError::LengthMismatch { got: v.len(), expected });
        }
        Ok(())
    }

    /// `H_Z·e` for `Xerror`, `H_X·e` for `Zerror`.
    pub fn syndrome(&self, e: &BitVector) -> Result<BitVector, DecodeError> {
        self.check_len(e, self.code.n())?;
        Ok(match self.role {
            Role::Xerror => self.code.h_z().mul_vec(e),
            Role::Zerror => self.code.h_x().mul_vec(e),
        })
    }

    fn syndrome_len(&self) -> usize {
        match self.role {
            Role::Xerror => self.code.h_z().row_count(),
            Role::Zerror => self.code.h_x().row_count(),
        }
    }

    fn row_offset(&self, vertex_id: usize) -> usize {
        match self.role {
            Role::Xerror => self.code.z_row_offset(vertex_id),
            Role::Zerror => self.code.x_row_offset(vertex_id),
        }
        .expect("preprocessing vertex owns syndrome rows")
    }

    fn preprocess_vertices(&self) -> Vec<usize> {
        let complex = self.code.complex();
        self.role
            .preprocess_classes()
            .into_iter()
            .flat_map(|c| complex.class_vertices(c).map(|v| complex.vertex_id(v)))
            .collect()
    }

    /// Local leaders from syndrome slices and their sum.
    pub fn preprocess(&self, s: &BitVector) -> Result<Mismatch, DecodeError> {
        self.check_len(s, self.syndrome_len())?;
        let m = self.leaders.syndrome_dim();
        let mut z = BitVector::zeros(self.code.n());
        let mut leaders = Vec::new();
        for v in self.preprocess_vertices() {
            let offset = self.row_offset(v);
            let local = (0..m).fold(0u64, |acc, i| acc | (u64::from(s.get(offset + i)) << i));
            let eps = self.leaders.decode(local);
            self.code.add_local(v, eps, &mut z);
            leaders.push((v, eps));
        }
        Ok(Mismatch { z, leaders })
    }

    /// Checks the preprocessing identities against a known error.
    pub fn check_mismatch(&self, e: &BitVector, mismatch: &Mismatch) -> MismatchCheck {
        let n = self.code.n();
        let mut local_sum = BitVector::zeros(n);
        let mut combined = BitVector::zeros(n);
        for &(v, eps) in &mismatch.leaders {
            let ev = self.code.local_word(v, e);
            self.code.add_local(v, ev, &mut local_sum);
            self.code.add_local(v, ev ^ eps, &mut combined);
        }
        let e_weight = e.weight();
        let z_weight = mismatch.z.weight();
        MismatchCheck {
            e_weight,
            z_weight,
            local_sum_zero: local_sum.is_zero(),
            matches_sum: combined == mismatch.z,
            weight_bound: z_weight <= 4 * e_weight,
        }
    }

    fn apply(&self, state: &mut DecompositionState, v: usize, entry: &FlipEntry) {
        let (i, j) = self.code.complex().vertex(v).class.digits();
        self.code.add_local(v, entry.c, &mut state.c[j as usize]);
        self.code.add_local(v, entry.r, &mut state.r[i as usize]);
        self.code.add_local(v, entry.word, &mut state.z_hat);
    }

    fn record(&self, step: usize, v: usize, entry: &FlipEntry, gain: i64) -> FlipRecord {
        let vertex = self.code.complex().vertex(v);
        FlipRecord {
            step,
            vertex_class: vertex.class,
            vertex: vertex.g,
            weight: entry.weight,
            gain,
            norm_c: entry.norm_c,
            norm_r: entry.norm_r,
        }
    }

    fn audit_conservation(&self, state: &DecompositionState, z: &BitVector, audit: &mut Audit) {
        if self.config.audit {
            audit.checks += 1;
            if &state.total() != z {
                audit.conservation_violations += 1;
            }
        }
    }

    /// Algorithm with threshold `ε`: repeatedly apply any local flip whose
    /// gain is at least `(1 − ε)|x|`, scanning vertices round-robin.
    pub fn sequential_decompose(&self, z: &BitVector) -> (Status, DecompositionState, Vec<FlipRecord>, Audit) {
        let mut state = DecompositionState::new(z);
        let mut log = Vec::new();
        let mut audit = Audit::default();
        let limit = 4 * self.code.n();
        let eps = self.config.epsilon;
        let total = self.scan.len();
        let mut pos = 0;
        loop {
            if state.z_hat.is_zero() {
                return (Status::Success, state, log, audit);
            }
            if log.len() >= limit {
                return (Status::Failure(FailureReason::StepLimitExceeded), state, log, audit);
            }
            let found = (0..total).find_map(|offset| {
                let idx = (pos + offset) % total;
                let v = self.scan[idx];
                let local = self.code.local_word(v, &state.z_hat);
                self.flips.find_threshold(local, eps).map(|e| (idx, v, *e))
            });
            let Some((idx, v, entry)) = found else {
                return (Status::Failure(FailureReason::Stalled), state, log, audit);
            };
            let before = state.z_hat.weight() as i64;
            self.apply(&mut state, v, &entry);
            let gain = before - state.z_hat.weight() as i64;
            if self.config.audit && (gain as f64) < (1.0 - eps) * f64::from(entry.weight) - 1e-9 {
                audit.criterion_violations += 1;
            }
            self.audit_conservation(&state, z, &mut audit);
            log.push(self.record(log.len(), v, &entry, gain));
            pos = (idx + 1) % total;
        }
    }

    /// Rounds of four substeps; in each substep every vertex of one class
    /// applies its best flip satisfying the half-gain criterion.
    pub fn parallel_decompose(&self, z: &BitVector) -> (Status, DecompositionState, Vec<FlipRecord>, Audit, usize) {
        let mut state = DecompositionState::new(z);
        let mut log = Vec::new();
        let mut audit = Audit::default();
        let z_weight = z.weight();
        let limit = self.config.fixed_rounds.unwrap_or_else(|| {
            self.config.round_limit.unwrap_or_else(|| {
                let bits = usize::BITS - z_weight.leading_zeros();
                64 * bits.max(1) as usize
            })
        });
        let complex = self.code.complex();
        let mut rounds = 0;
        while !state.z_hat.is_zero() {
            if rounds >= limit {
                let reason = if self.config.fixed_rounds.is_some() {
                    FailureReason::RoundsExhausted
                } else {
                    FailureReason::RoundLimitExceeded
                };
                return (Status::Failure(reason), state, log, audit, rounds);
            }
            rounds += 1;
            let temp = state.z_hat.clone();
            for class in self.role.class_order() {
                let vertices: Vec<usize> = complex.class_vertices(class).map(|v| complex.vertex_id(v)).collect();
                let chosen: Vec<(usize, u64, FlipEntry)> = vertices
                    .par_iter()
                    .filter_map(|&v| {
                        let local = self.code.local_word(v, &state.z_hat);
                        self.flips.find_half(local).map(|e| (v, local, *e))
                    })
                    .collect();
                for (v, local, entry) in chosen {
                    let gain = i64::from(local.count_ones()) - i64::from((local ^ entry.word).count_ones());
                    if self.config.audit && 2 * gain < i64::from(entry.weight) {
                        audit.criterion_violations += 1;
                    }
                    self.apply(&mut state, v, &entry);
                    log.push(self.record(log.len(), v, &entry, gain));
                }
                self.audit_conservation(&state, z, &mut audit);
                if state.z_hat.is_zero() {
                    break;
                }
            }
            if self.config.fixed_rounds.is_none() && state.z_hat == temp {
                return (Status::Failure(FailureReason::NoProgress), state, log, audit, rounds);
            }
        }
        (Status::Success, state, log, audit, rounds)
    }

    /// `ê = Σ_{v ∈ V_ij} ε_v + Ĉ_j + R̂_i` for the primary class, checked
    /// against the same formula on the mirror class.
    pub fn postprocess(&self, mismatch: &Mismatch, state: &DecompositionState) -> Result<BitVector, DecodeError> {
        let complex = self.code.complex();
        let formula = |class: VertexClass| {
            let (i, j) = class.digits();
            let mut e = state.c[j as usize].clone();
            e.xor_assign(&state.r[i as usize]);
            for &(v, eps) in &mismatch.leaders {
                if complex.vertex(v).class == class {
                    self.code.add_local(v, eps, &mut e);
                }
            }
            e
        };
        let [primary, mirror] = self.role.postprocess_classes();
        let e_hat = formula(primary);
        let other = formula(mirror);
        if e_hat != other {
            let mut diff = e_hat.clone();
            diff.xor_assign(&other);
            return Err(DecodeError::ConsistencyViolation(diff.weight()));
        }
        Ok(e_hat)
    }

    /// Full pipeline from a syndrome.
    pub fn decode(&self, s: &BitVector, kind: DecoderKind) -> Result<DecodeOutcome, DecodeError> {
        let mismatch = self.preprocess(s)?;
        self.decode_mismatch(s, &mismatch, kind)
    }

    /// Decomposition and postprocessing for an already computed mismatch.
    pub fn decode_mismatch(&self, s: &BitVector, mismatch: &Mismatch, kind: DecoderKind) -> Result<DecodeOutcome, DecodeError> {
        let (status, state, flips, audit, rounds) = match kind {
            DecoderKind::Sequential => {
                let (st, state, log, audit) = self.sequential_decompose(&mismatch.z);
                (st, state, log, audit, 0)
            }
            DecoderKind::Parallel => self.parallel_decompose(&mismatch.z),
        };
        let e_hat = if status == Status::Success {
            let e_hat = self.postprocess(mismatch, &state)?;
            if &self.syndrome(&e_hat)? != s {
                return Err(DecodeError::SyndromeMismatch);
            }
            e_hat
        } else {
            BitVector::zeros(self.code.n())
        };
        Ok(DecodeOutcome {
            status,
            e_hat,
            mismatch_weight: mismatch.z.weight(),
            steps: flips.len(),
            rounds,
            flips,
            audit,
            state,
        })
    }

    /// `e + ê` lies in the stabilizer space of this role.
    pub fn is_valid_correction(&self, e: &BitVector, e_hat: &BitVector) -> bool {
        self.stabilizers.contains(&(e + e_hat))
    }
}

/// Flip log as JSON lines.
pub fn flip_log_jsonl(flips: &[FlipRecord]) -> String {
    flips
        .iter()
        .map(|f| serde_json::to_string(f).expect("flip records serialize") + "\n")
        .collect()
}
