//! Error sampling, single decoding trials and Monte Carlo sweeps.
//!
//! Trial `t` of a sweep uses seed `seed0 + t`, so any row of a sweep can be
//! reproduced from the CSV alone.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::VertexClass;
use crate::decoder::{DecodeError, Decoder, DecoderKind, MismatchCheck, Role, Status};
use crate::gf2::BitVector;
use crate::rng::SplitMix64;
use crate::tanner::QuantumTannerCode;

pub const CSV_HEADER: &str = "model,param,decoder,epsilon,trials,success,valid,mean_e,mean_Z,mean_steps,p95_ms";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorModel {
    /// Each qubit flips independently with probability `p`.
    Iid { p: f64 },
    /// Uniform support of exactly `w` qubits.
    FixedWeight { w: usize },
    /// `w_per` qubits inside each of `v_count` distinct `Q(v)`, `v ∈ V1`.
    Clustered { v_count: usize, w_per: usize },
}

impl ErrorModel {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorModel::Iid { .. } => "iid",
            ErrorModel::FixedWeight { .. } => "fixed_weight",
            ErrorModel::Clustered { .. } => "clustered",
        }
    }

    pub fn param(&self) -> String {
        match self {
            ErrorModel::Iid { p } => format!("{p}"),
            ErrorModel::FixedWeight { w } => w.to_string(),
            ErrorModel::Clustered { v_count, w_per } => format!("{v_count}x{w_per}"),
        }
    }

    pub fn validate(&self, code: &QuantumTannerCode) -> Result<(), SimError> {
        let n = code.n();
        let window = code.complex().delta().pow(2);
        match *self {
            ErrorModel::Iid { p } if !(0.0..=1.0).contains(&p) => Err(SimError::Parameter(format!("p = {p} outside [0, 1]"))),
            ErrorModel::FixedWeight { w } if w > n => Err(SimError::Parameter(format!("w = {w} exceeds n = {n}"))),
            ErrorModel::Clustered { v_count, w_per } if v_count > 2 * code.complex().group_order() || w_per > window => {
                Err(SimError::Parameter(format!("clustered {v_count}x{w_per} does not fit")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.param())
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("error model parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Deterministic sample for `(model, seed)`.
pub fn sample_error(model: &ErrorModel, code: &QuantumTannerCode, seed: u64) -> Result<BitVector, SimError> {
    model.validate(code)?;
    let n = code.n();
    let mut rng = SplitMix64::new(seed);
    Ok(match *model {
        ErrorModel::Iid { p } => BitVector::from_bits((0..n).map(|_| rng.bernoulli(p))),
        ErrorModel::FixedWeight { w } => BitVector::from_support(n, &rng.sample_distinct(n, w)),
        ErrorModel::Clustered { v_count, w_per } => {
            let complex = code.complex();
            let v1: Vec<usize> = [VertexClass::V01, VertexClass::V10]
                .into_iter()
                .flat_map(|c| complex.class_vertices(c).map(|v| complex.vertex_id(v)))
                .collect();
            let mut e = BitVector::zeros(n);
            for pick in rng.sample_distinct(v1.len(), v_count) {
                let window = complex.window(v1[pick]);
                for i in rng.sample_distinct(window.len(), w_per) {
                    e.set(window[i] as usize, true);
                }
            }
            e
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub model: ErrorModel,
    pub role: Role,
    pub decoder: DecoderKind,
    pub epsilon: Option<f64>,
    pub e_weight: usize,
    pub z_weight: usize,
    pub status: Status,
    pub valid: bool,
    pub steps: usize,
    pub rounds: usize,
    pub mismatch: MismatchCheck,
    pub audit_clean: bool,
    pub wall_ms: f64,
}

impl TrialRecord {
    /// Flips for the sequential decoder, rounds for the parallel one.
    pub fn effort(&self) -> usize {
        match self.decoder {
            DecoderKind::Sequential => self.steps,
            DecoderKind::Parallel => self.rounds,
        }
    }
}

/// Decodes a given error end to end.
pub fn run_on_error(
    decoder: &Decoder,
    e: &BitVector,
    kind: DecoderKind,
) -> Result<(TrialRecord, crate::decoder::DecodeOutcome), SimError> {
    let start = Instant::now();
    let s = decoder.syndrome(e)?;
    let mismatch = decoder.preprocess(&s)?;
    let check = decoder.check_mismatch(e, &mismatch);
    let outcome = decoder.decode_mismatch(&s, &mismatch, kind)?;
    let valid = outcome.success() && decoder.is_valid_correction(e, &outcome.e_hat);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let record = TrialRecord {
        seed: 0,
        model: ErrorModel::FixedWeight { w: e.weight() },
        role: decoder.role(),
        decoder: kind,
        epsilon: (kind == DecoderKind::Sequential).then_some(decoder.config().epsilon),
        e_weight: check.e_weight,
        z_weight: check.z_weight,
        status: outcome.status,
        valid,
        steps: outcome.steps,
        rounds: outcome.rounds,
        mismatch: check,
        audit_clean: outcome.audit.clean(),
        wall_ms,
    };
    Ok((record, outcome))
}

/// Samples an error from `model` with `seed` and decodes it.
pub fn run_trial(decoder: &Decoder, model: &ErrorModel, kind: DecoderKind, seed: u64) -> Result<TrialRecord, SimError> {
    let e = sample_error(model, decoder.code(), seed)?;
    let (mut record, _) = run_on_error(decoder, &e, kind)?;
    record.seed = seed;
    record.model = *model;
    Ok(record)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: Vec<ErrorModel>,
    pub trials: usize,
    pub decoders: Vec<DecoderKind>,
    pub seed: u64,
    /// When false the `p95_ms` column holds `NA` so output is byte-stable.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub model: ErrorModel,
    pub decoder: DecoderKind,
    pub epsilon: Option<f64>,
    pub trials: usize,
    pub success: usize,
    pub valid: usize,
    pub mean_e: f64,
    pub mean_z: f64,
    pub mean_steps: f64,
    pub p95_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub records: Vec<TrialRecord>,
}

/// One row per `(model, decoder)`; trials run in parallel, seeds `seed + t`.
pub fn sweep(decoder: &Decoder, config: &SweepConfig) -> Result<SweepResult, SimError> {
    for model in &config.grid {
        model.validate(decoder.code())?;
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for model in &config.grid {
        for &kind in &config.decoders {
            let batch: Vec<TrialRecord> = (0..config.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(decoder, model, kind, config.seed.wrapping_add(t)))
                .collect::<Result<_, _>>()?;
            if batch.is_empty() {
                continue;
            }
            rows.push(aggregate(model, kind, decoder, &batch, config.record_timing));
            records.extend(batch);
        }
    }
    Ok(SweepResult { rows, records })
}

fn aggregate(model: &ErrorModel, kind: DecoderKind, decoder: &Decoder, batch: &[TrialRecord], timing: bool) -> SweepRow {
    let t = batch.len() as f64;
    let mean = |f: &dyn Fn(&TrialRecord) -> usize| batch.iter().map(f).sum::<usize>() as f64 / t;
    let p95_ms = timing.then(|| {
        let mut times: Vec<f64> = batch.iter().map(|r| r.wall_ms).collect();
        times.sort_by(f64::total_cmp);
        let idx = ((0.95 * t).ceil() as usize).clamp(1, times.len()) - 1;
        times[idx]
    });
    SweepRow {
        model: *model,
        decoder: kind,
        epsilon: (kind == DecoderKind::Sequential).then_some(decoder.config().epsilon),
        trials: batch.len(),
        success: batch.iter().filter(|r| r.status == Status::Success).count(),
        valid: batch.iter().filter(|r| r.valid).count(),
        mean_e: mean(&|r| r.e_weight),
        mean_z: mean(&|r| r.z_weight),
        mean_steps: mean(&|r| r.effort()),
        p95_ms,
    }
}

/// Sweep table with the fixed column set.
pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        let na = || "NA".to_string();
        w.write_record([
            r.model.name().to_string(),
            r.model.param(),
            r.decoder.to_string(),
            r.epsilon.map_or_else(na, |e| format!("{e}")),
            r.trials.to_string(),
            r.success.to_string(),
            r.valid.to_string(),
            format!("{:.6}", r.mean_e),
            format!("{:.6}", r.mean_z),
            format!("{:.6}", r.mean_steps),
            r.p95_ms.map_or_else(na, |p| format!("{p:.3}")),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Trial records as JSON lines.
pub fn write_jsonl<W: std::io::Write>(records: &[TrialRecord], mut out: W) -> Result<(), SimError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SquareComplex;
    use crate::decoder::DecoderConfig;
    use crate::groups::{GeneratorSet, Group, Side};
    use crate::local_codes::LocalCodePair;

    fn small() -> QuantumTannerCode {
        let g = Group::cyclic(11).unwrap();
        let a = GeneratorSet::new(&g, vec![1, 10, 3, 8], Side::A).unwrap();
        let b = GeneratorSet::new(&g, vec![2, 9, 4, 7], Side::B).unwrap();
        let pair = LocalCodePair::random(4, 1, 3, 1, 2).unwrap();
        QuantumTannerCode::assemble(SquareComplex::new(g, a, b).unwrap(), pair).unwrap()
    }

    #[test]
    fn model_contracts() {
        let code = small();
        assert!(sample_error(&ErrorModel::Iid { p: 0.0 }, &code, 3).unwrap().is_zero());
        assert_eq!(sample_error(&ErrorModel::FixedWeight { w: 1 }, &code, 3).unwrap().weight(), 1);
        for seed in 0..50 {
            let e = sample_error(&ErrorModel::FixedWeight { w: 7 }, &code, seed).unwrap();
            assert_eq!(e.weight(), 7);
            assert_eq!(e, sample_error(&ErrorModel::FixedWeight { w: 7 }, &code, seed).unwrap());
            let model = ErrorModel::Clustered { v_count: 2, w_per: 3 };
            let e = sample_error(&model, &code, seed).unwrap();
            assert!(e.weight() <= 6 && e.weight() >= 3);
        }
        assert!(sample_error(&ErrorModel::Iid { p: 1.5 }, &code, 0).is_err());
        assert!(sample_error(&ErrorModel::FixedWeight { w: 177 }, &code, 0).is_err());
        assert!(sample_error(&ErrorModel::Clustered { v_count: 1, w_per: 17 }, &code, 0).is_err());
    }

    #[test]
    fn clustered_support_stays_in_chosen_windows() {
        let code = small();
        let complex = code.complex();
        let model = ErrorModel::Clustered { v_count: 1, w_per: 5 };
        for seed in 0..30 {
            let e = sample_error(&model, &code, seed).unwrap();
            let support: Vec<usize> = e.ones().collect();
            let inside_one = [VertexClass::V01, VertexClass::V10].iter().any(|&c| {
                complex.class_vertices(c).any(|v| {
                    let w = complex.window(complex.vertex_id(v));
                    support.iter().all(|q| w.contains(&(*q as u32)))
                })
            });
            assert!(inside_one);
            assert_eq!(e.weight(), 5);
        }
    }

    #[test]
    fn iid_mean_weight() {
        let code = small();
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|s| sample_error(&ErrorModel::Iid { p: 0.01 }, &code, s).unwrap().weight())
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma = (176.0 * 0.01 * 0.99 / trials as f64).sqrt();
        assert!((mean - 1.76).abs() <= 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn zero_error_trial() {
        let code = small();
        let dec = Decoder::new(&code, Role::Xerror, DecoderConfig::default()).unwrap();
        let r = run_trial(&dec, &ErrorModel::Iid { p: 0.0 }, DecoderKind::Sequential, 4).unwrap();
        assert_eq!(r.status, Status::Success);
        assert!(r.valid);
        assert_eq!((r.z_weight, r.steps), (0, 0));
    }

    #[test]
    fn logical_error_is_invalid() {
        let code = small();
        let dec = Decoder::new(&code, Role::Xerror, DecoderConfig::default()).unwrap();
        let est = code
            .distance_estimate(crate::tanner::DistanceSide::Z, crate::tanner::DistanceMode::Randomized { trials: 20, seed: 2 })
            .unwrap();
        let e = BitVector::from_support(code.n(), &est.witness.unwrap());
        let (record, outcome) = run_on_error(&dec, &e, DecoderKind::Parallel).unwrap();
        assert!(outcome.e_hat.is_zero());
        assert_eq!(record.status, Status::Success);
        assert!(!record.valid);
    }

    #[test]
    fn sweep_counts_and_reproducibility() {
        let code = small();
        let dec = Decoder::new(&code, Role::Xerror, DecoderConfig::default()).unwrap();
        let config = SweepConfig {
            grid: vec![ErrorModel::FixedWeight { w: 2 }, ErrorModel::Iid { p: 0.01 }],
            trials: 10,
            decoders: vec![DecoderKind::Sequential, DecoderKind::Parallel],
            seed: 100,
            record_timing: false,
        };
        let a = sweep(&dec, &config).unwrap();
        assert_eq!(a.rows.len(), 4);
        assert_eq!(a.records.len(), 40);
        for row in &a.rows {
            assert_eq!(row.trials, 10);
            assert!(row.valid <= row.success);
        }
        let b = sweep(&dec, &config).unwrap();
        assert_eq!(csv_string(&a.rows), csv_string(&b.rows));
        assert!(csv_string(&a.rows).starts_with(CSV_HEADER));
        let empty = SweepConfig { trials: 0, ..config };
        assert_eq!(csv_string(&sweep(&dec, &empty).unwrap().rows), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn records_serialize() {
        let code = small();
        let dec = Decoder::new(&code, Role::Xerror, DecoderConfig::default()).unwrap();
        let r = run_trial(&dec, &ErrorModel::FixedWeight { w: 3 }, DecoderKind::Parallel, 9).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&[r.clone(), r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(v["model"]["model"], "fixed_weight");
    }
}
