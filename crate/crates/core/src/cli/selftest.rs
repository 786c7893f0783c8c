//! Invariant suite for small instances. Exhaustive wherever the instance
//! is small enough, sampled otherwise; every check reports how it ran.

use serde::Serialize;

use crate::complex::GraphKind;
use crate::decoder::{DecodeError, Decoder, DecoderConfig, DecoderKind, Role};
use crate::gf2::{BitVector, EchelonBasis};
use crate::local_codes::{kappa_estimate, CosetLeaderTable, KappaMode, LocalRole, DEFAULT_NORM_BUDGET};
use crate::rng::SplitMix64;
use crate::tanner::{DistanceMode, DistanceSide, QuantumTannerCode, EXACT_DISTANCE_MAX_DIM};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Runs every check on `code`.
pub fn run_selftest(code: &QuantumTannerCode) -> Vec<CheckResult> {
    vec![
        css(code),
        ldpc(code),
        complex_structure(code),
        rate_bound(code),
        coset_leaders(code),
        kappa_oracle(code),
        distance(code),
        decoding(code),
    ]
}

fn css(code: &QuantumTannerCode) -> CheckResult {
    let orth = code.h_x().mul_transpose(code.h_z()).is_zero();
    let k = code.k();
    let via_z = code.h_z().kernel_basis().row_count() - code.h_x().rank();
    let via_x = code.h_x().kernel_basis().row_count() - code.h_z().rank();
    check(
        "css",
        orth && k == via_z && k == via_x,
        format!("H_X·H_Zᵀ = 0: {orth}; k = {k}, dim ker H_Z − rank H_X = {via_z}, dim ker H_X − rank H_Z = {via_x}"),
    )
}

fn ldpc(code: &QuantumTannerCode) -> CheckResult {
    let d2 = code.complex().delta().pow(2);
    let xw = code.h_x().max_row_weight();
    let zw = code.h_z().max_row_weight();
    let xc = code.h_x().column_weights().into_iter().max().unwrap_or(0);
    let zc = code.h_z().column_weights().into_iter().max().unwrap_or(0);
    let ok = xw <= d2 && zw <= d2 && xc <= 2 * code.rows_per_x_vertex() && zc <= 2 * code.rows_per_z_vertex();
    check("ldpc", ok, format!("row weights {xw}/{zw} ≤ {d2}; column weights {xc}/{zc}"))
}

fn complex_structure(code: &QuantumTannerCode) -> CheckResult {
    let c = code.complex();
    let a = c.adjacency(GraphKind::CayA);
    let b = c.adjacency(GraphKind::CayB);
    let commute = a.mul(&b) == b.mul(&a);
    // Every square lies in exactly one window per class.
    let mut counts = vec![0u32; 4 * c.square_count()];
    for v in c.vertices() {
        for &q in c.window(c.vertex_id(v)) {
            counts[v.class.index() * c.square_count() + q as usize] += 1;
        }
    }
    let incidence = counts.iter().all(|&k| k == 1);
    check(
        "complex",
        commute && incidence,
        format!("Cay(A)·Cay(B) commute: {commute}; one window per class per square: {incidence}"),
    )
}

fn rate_bound(code: &QuantumTannerCode) -> CheckResult {
    let p = code.params();
    match p.rate_bound {
        Some(b) => check("rate_bound", p.rate_bound_ok, format!("k = {} ≥ {b}", p.k)),
        None => check("rate_bound", true, "not complementary; skipped"),
    }
}

fn coset_leaders(code: &QuantumTannerCode) -> CheckResult {
    let bits = code.complex().delta().pow(2);
    if bits > 16 {
        return check("coset_leaders", true, format!("window of {bits} bits; skipped"));
    }
    let mut worst = 0;
    for role in [LocalRole::XSide, LocalRole::ZSide] {
        let product = code.pair().product(role);
        let table = match CosetLeaderTable::build(&product) {
            Ok(t) => t,
            Err(e) => return check("coset_leaders", false, e.to_string()),
        };
        for w in 0..1u64 << bits {
            let s = table.syndrome(w);
            let leader = table.decode(s);
            if table.syndrome(leader) != s || leader.count_ones() > w.count_ones() {
                worst += 1;
            }
        }
    }
    check("coset_leaders", worst == 0, format!("{} words per role, {worst} violations", 1u64 << bits))
}

fn kappa_oracle(code: &QuantumTannerCode) -> CheckResult {
    let mut details = Vec::new();
    let mut ok = true;
    for role in [LocalRole::XSide, LocalRole::ZSide] {
        let product = code.pair().product(role);
        let cost = (product.col_dim() + product.row_dim()) * product.delta();
        if cost > 16 || product.dual_tensor_dim() == 0 {
            details.push(format!("{role:?}: skipped"));
            continue;
        }
        let exact = kappa_estimate(&product, KappaMode::Exact, DEFAULT_NORM_BUDGET).expect("small product");
        let w = product.window();
        let span = |gens: Vec<u64>| {
            gens.iter().fold(vec![0u64], |acc, &g| {
                acc.iter().flat_map(|&x| [x, x ^ g]).collect()
            })
        };
        let cols = span(
            product
                .column_generators()
                .iter()
                .flat_map(|&g| (0..w.delta()).map(move |b| w.place_column(g, b)))
                .collect(),
        );
        let rows = span(
            product
                .row_generators()
                .iter()
                .flat_map(|&h| (0..w.delta()).map(move |a| w.place_row(h, a)))
                .collect(),
        );
        let mut best = std::collections::HashMap::<u64, u32>::new();
        for &c in &cols {
            for &r in &rows {
                let n = w.column_norm(c) + w.row_norm(r);
                best.entry(c ^ r).and_modify(|b| *b = (*b).min(n)).or_insert(n);
            }
        }
        let oracle = best
            .iter()
            .filter(|(&x, _)| x != 0)
            .map(|(&x, &n)| f64::from(x.count_ones()) / (w.delta() as f64 * f64::from(n)))
            .fold(f64::INFINITY, f64::min);
        let matches = exact.kappa.is_some_and(|k| (k - oracle).abs() < 1e-12);
        ok &= matches;
        details.push(format!("{role:?}: κ = {:?}, oracle {oracle}", exact.kappa));
    }
    check("kappa_oracle", ok, details.join("; "))
}

fn distance(code: &QuantumTannerCode) -> CheckResult {
    let n = code.n();
    let mut ok = true;
    let mut details = Vec::new();
    for side in [DistanceSide::Z, DistanceSide::X] {
        let kernel_dim = match side {
            DistanceSide::Z => code.h_z(),
            DistanceSide::X => code.h_x(),
        }
        .kernel_basis()
        .row_count();
        if kernel_dim > EXACT_DISTANCE_MAX_DIM {
            details.push(format!("{side:?}: kernel dimension {kernel_dim}; skipped"));
            continue;
        }
        let exact = code.distance_estimate(side, DistanceMode::Exact).expect("small kernel");
        if n <= 20 {
            let (check_m, stab) = match side {
                DistanceSide::Z => (code.h_z(), code.h_x()),
                DistanceSide::X => (code.h_x(), code.h_z()),
            };
            let stabs = EchelonBasis::new(stab);
            let oracle = (1u32..1 << n)
                .map(|bits| BitVector::from_bits((0..n).map(|i| (bits >> i) & 1 == 1)))
                .filter(|w| check_m.mul_vec(w).is_zero() && !stabs.contains(w))
                .map(|w| w.weight())
                .min();
            ok &= oracle == exact.distance;
            details.push(format!("{side:?}: d = {:?}, enumeration {oracle:?}", exact.distance));
        } else {
            let rand = code
                .distance_estimate(side, DistanceMode::Randomized { trials: 50, seed: 1 })
                .expect("randomized mode");
            ok &= rand.distance >= exact.distance;
            details.push(format!("{side:?}: d = {:?}, randomized ≥ {:?}", exact.distance, rand.distance));
        }
    }
    check("distance", ok, details.join("; "))
}

fn decoding(code: &QuantumTannerCode) -> CheckResult {
    let n = code.n();
    let config = DecoderConfig {
        audit: true,
        ..DecoderConfig::default()
    };
    let mut errors: Vec<BitVector> = (0..n).map(|q| BitVector::from_support(n, &[q])).collect();
    let mut rng = SplitMix64::new(0x5E1F);
    for t in 0..300 {
        let w = 2 + t % 5;
        if w <= n {
            errors.push(BitVector::from_support(n, &rng.sample_distinct(n, w)));
        }
    }
    let mut runs = 0;
    let mut violations = Vec::new();
    for role in [Role::Xerror, Role::Zerror] {
        let dec = match Decoder::new(code, role, config.clone()) {
            Ok(d) => d,
            Err(e) => return check("decoding", false, e.to_string()),
        };
        for e in &errors {
            let s = dec.syndrome(e).expect("length");
            let m = dec.preprocess(&s).expect("length");
            if !dec.check_mismatch(e, &m).holds() {
                violations.push(format!("{role}: mismatch identities fail"));
            }
            for kind in [DecoderKind::Sequential, DecoderKind::Parallel] {
                runs += 1;
                match dec.decode_mismatch(&s, &m, kind) {
                    Ok(out) if !out.audit.clean() => violations.push(format!("{role}/{kind}: audit {:?}", out.audit)),
                    Ok(_) => {}
                    Err(err @ (DecodeError::ConsistencyViolation(_) | DecodeError::SyndromeMismatch)) => {
                        violations.push(format!("{role}/{kind}: {err}"))
                    }
                    Err(err) => violations.push(format!("{role}/{kind}: {err}")),
                }
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{runs} audited decodes, preprocessing identities and postprocessing consistent")
    } else {
        violations.truncate(5);
        violations.join("; ")
    };
    check("decoding", violations.is_empty(), detail)
}
