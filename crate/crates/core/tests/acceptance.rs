//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use qtanner::cli::config::{RunConfig, REF_SMALL, REF_TINY};
use qtanner::complex::GraphKind;
use qtanner::decoder::{Decoder, DecoderConfig, DecoderKind, Role, SearchStrategy, Status};
use qtanner::gf2::{BitVector, EchelonBasis};
use qtanner::local_codes::{
    binary_entropy, binary_entropy_inv, kappa_estimate, predicted_kappa, CosetLeaderTable, KappaMode, LocalCodePair,
    LocalRole, DEFAULT_NORM_BUDGET,
};
use qtanner::rng::SplitMix64;
use qtanner::sim::{sample_error, ErrorModel};
use qtanner::spectral::{mixing_check, spectral_lambda};
use qtanner::tanner::{DistanceMode, DistanceSide, QuantumTannerCode};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    match limit {
        Some(limit) if elapsed > limit => verdict(
            false,
            format!("{} (took {:.1?}, limit {limit:?})", v.detail, elapsed),
        ),
        _ => verdict(v.passed, format!("{} [{elapsed:.2?}]", v.detail)),
    }
}

fn tiny() -> QuantumTannerCode {
    RunConfig::from_json(REF_TINY).unwrap().build_code().unwrap()
}

fn small() -> QuantumTannerCode {
    RunConfig::from_json(REF_SMALL).unwrap().build_code().unwrap()
}

fn css_orthogonality() -> Verdict {
    let mut rng = SplitMix64::new(0xC55);
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, code) in [("tiny", Ok(tiny())), ("small", Ok(small()))]
        .into_iter()
        .chain((0..20).map(|i| ("random", common::random_code(&mut rng, i % 2 == 0))))
    {
        checked += 1;
        match code {
            Ok(code) => {
                if !code.h_x().mul_transpose(code.h_z()).is_zero() {
                    failures.push(name.to_string());
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    verdict(failures.is_empty(), format!("{checked} instances, failures {failures:?}"))
}

fn rate_bound() -> Verdict {
    let mut rng = SplitMix64::new(0xAA7E);
    let mut lines = Vec::new();
    let mut ok = true;
    let small = small();
    let codes = std::iter::once(Ok(small)).chain((0..10).map(|_| common::random_code(&mut rng, true)));
    for code in codes {
        let code = match code {
            Ok(c) => c,
            Err(e) => return verdict(false, e.to_string()),
        };
        let n = code.n();
        let rank_x = code.h_x().rank();
        let rank_z = code.h_z().rank();
        let k = n - rank_x - rank_z;
        let delta = code.pair().delta() as i64;
        let ka = code.pair().k_a() as i64;
        // k ≥ (1 − 2k_A/Δ)² n  ⇔  k Δ² ≥ (Δ − 2k_A)² n, in integers.
        let lhs = k as i64 * delta * delta;
        let rhs = (delta - 2 * ka).pow(2) * n as i64;
        let complementary = code.pair().is_complementary();
        ok &= complementary && lhs >= rhs;
        lines.push(format!("n={n} k={k} bound={}", code.params().rate_bound.unwrap_or(0)));
    }
    verdict(ok, lines.join(", "))
}

fn entropy_formulas() -> Verdict {
    let mut worst = 0.0f64;
    for y in [0.01, 0.1, 0.5, 1.0] {
        worst = worst.max((binary_entropy(binary_entropy_inv(y)) - y).abs());
    }
    let grid: Vec<f64> = (0..10).map(|i| (f64::from(i) + 0.5) / 10.0).collect();
    let mut monotone = true;
    for i in 0..10 {
        for j in 0..10 {
            let here = predicted_kappa(grid[i], grid[j]).unwrap();
            if i + 1 < 10 && predicted_kappa(grid[i + 1], grid[j]).unwrap() < here {
                monotone = false;
            }
            if j + 1 < 10 && predicted_kappa(grid[i], grid[j + 1]).unwrap() < here {
                monotone = false;
            }
        }
    }
    verdict(
        worst <= 1e-10 && monotone,
        format!("max |H(H⁻¹(y)) − y| = {worst:.2e}, monotone on 10×10 grid: {monotone}"),
    )
}

/// For every pair (c, r) of column and row codewords, the smallest
/// `‖c‖ + ‖r‖` reaching each `x = c + r`.
fn double_enumeration(pair: &LocalCodePair) -> HashMap<u64, u32> {
    let delta = pair.delta();
    let bit = |a: usize, b: usize| 1u64 << (a * delta + b);
    let words = |gens: &[BitVector]| -> Vec<u64> {
        (0u32..1 << gens.len())
            .map(|mask| {
                let mut w = BitVector::zeros(delta);
                for (i, g) in gens.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        w.xor_assign(g);
                    }
                }
                w.ones().fold(0u64, |acc, i| acc | 1 << i)
            })
            .collect()
    };
    let ca = words(pair.gen_a().rows());
    let cb = words(pair.gen_b().rows());
    // Column parts: each column b carries a word of C_A indexed by a.
    let mut cols = vec![(0u64, 0u32)];
    for b in 0..delta {
        cols = cols
            .iter()
            .flat_map(|&(w, n)| {
                ca.iter().map(move |&cw| {
                    let placed = (0..delta).filter(|a| cw >> a & 1 == 1).fold(0, |acc, a| acc | bit(a, b));
                    (w | placed, n + u32::from(cw != 0))
                })
            })
            .collect();
    }
    let mut rows = vec![(0u64, 0u32)];
    for a in 0..delta {
        rows = rows
            .iter()
            .flat_map(|&(w, n)| {
                cb.iter().map(move |&rw| {
                    let placed = (0..delta).filter(|b| rw >> b & 1 == 1).fold(0, |acc, b| acc | bit(a, b));
                    (w | placed, n + u32::from(rw != 0))
                })
            })
            .collect();
    }
    let mut best = HashMap::new();
    for &(c, nc) in &cols {
        for &(r, nr) in &rows {
            best.entry(c ^ r).and_modify(|b: &mut u32| *b = (*b).min(nc + nr)).or_insert(nc + nr);
        }
    }
    best
}

fn robustness_oracle() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for seed in [1u64, 2, 3] {
        let pair = LocalCodePair::random(4, 2, 2, seed, seed + 100).unwrap();
        let product = pair.product(LocalRole::XSide);
        let report = kappa_estimate(&product, KappaMode::Exact, DEFAULT_NORM_BUDGET).unwrap();
        let oracle = double_enumeration(&pair);
        let nonzero: Vec<(u64, u32)> = oracle.iter().filter(|(&x, _)| x != 0).map(|(&x, &n)| (x, n)).collect();
        let kappa = nonzero
            .iter()
            .map(|&(x, n)| f64::from(x.count_ones()) / (4.0 * f64::from(n)))
            .fold(f64::INFINITY, f64::min);
        let Some(k) = report.kappa else {
            return verdict(false, "κ not reported");
        };
        let equal = (k - kappa).abs() < 1e-12 && report.exact && oracle.len() == 1 << product.dual_tensor_dim();
        let holds = nonzero.iter().all(|&(x, n)| f64::from(x.count_ones()) >= k * 4.0 * f64::from(n) - 1e-12);
        let attained = nonzero
            .iter()
            .any(|&(x, n)| (f64::from(x.count_ones()) - k * 4.0 * f64::from(n)).abs() < 1e-12);
        ok &= equal && holds && attained;
        details.push(format!(
            "seed {seed}: dim {} κ {k:.4} oracle {kappa:.4} bound holds {holds} attained {attained}",
            product.dual_tensor_dim()
        ));
    }
    verdict(ok, details.join("; "))
}

fn coset_minimality() -> Verdict {
    let code = tiny();
    let bits = code.complex().delta().pow(2);
    let mut bad = 0;
    for role in [LocalRole::XSide, LocalRole::ZSide] {
        let product = code.pair().product(role);
        let table = CosetLeaderTable::build(&product).unwrap();
        for w in 0..1u64 << bits {
            let s = product.syndrome(w);
            let leader = table.decode(s);
            if product.syndrome(leader) != s || leader.count_ones() > w.count_ones() {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("2 × {} words, {bad} violations", 1u64 << bits))
}

fn preprocessing_bound() -> Verdict {
    let codes = [tiny(), small()];
    let models = [
        ErrorModel::FixedWeight { w: 1 },
        ErrorModel::FixedWeight { w: 2 },
        ErrorModel::FixedWeight { w: 4 },
        ErrorModel::FixedWeight { w: 8 },
        ErrorModel::Iid { p: 0.05 },
    ];
    let mut trials = 0;
    let mut weight_fail = 0;
    let mut sum_fail = 0;
    for code in &codes {
        let decoders: Vec<Decoder> = [Role::Xerror, Role::Zerror]
            .into_iter()
            .map(|r| Decoder::new(code, r, DecoderConfig::default()).unwrap())
            .collect();
        for t in 0..5000u64 {
            let model = &models[t as usize % models.len()];
            let model = match model {
                ErrorModel::FixedWeight { w } if *w > code.n() => &models[0],
                m => m,
            };
            let e = sample_error(model, code, 10_000 + t).unwrap();
            let dec = &decoders[t as usize % 2];
            let m = dec.preprocess(&dec.syndrome(&e).unwrap()).unwrap();
            let check = dec.check_mismatch(&e, &m);
            trials += 1;
            weight_fail += usize::from(m.z.weight() > 4 * e.weight());
            sum_fail += usize::from(!check.local_sum_zero || !check.matches_sum);
        }
    }
    verdict(
        weight_fail == 0 && sum_fail == 0,
        format!("{trials} trials: |Z| > 4|e| in {weight_fail}, local sum nonzero in {sum_fail}"),
    )
}

fn conservation_and_criteria() -> Verdict {
    let code = small();
    let config = DecoderConfig { epsilon: 0.25, audit: true, ..DecoderConfig::default() };
    let decoders: Vec<Decoder> = [Role::Xerror, Role::Zerror]
        .into_iter()
        .map(|r| Decoder::new(&code, r, config.clone()).unwrap())
        .collect();
    let mut steps = 0;
    let mut conservation = 0;
    let mut criterion = 0;
    let mut bad_success = 0;
    let mut successes = 0;
    for kind in [DecoderKind::Sequential, DecoderKind::Parallel] {
        for t in 0..1000u64 {
            let w = 1 + (t % 6) as usize;
            let dec = &decoders[(t / 6) as usize % 2];
            let e = sample_error(&ErrorModel::FixedWeight { w }, &code, 70_000 + t).unwrap();
            let s = dec.syndrome(&e).unwrap();
            match dec.decode(&s, kind) {
                Ok(out) => {
                    steps += out.audit.checks;
                    conservation += out.audit.conservation_violations;
                    criterion += out.audit.criterion_violations;
                    if out.status == Status::Success {
                        successes += 1;
                        if dec.syndrome(&out.e_hat).unwrap() != s {
                            bad_success += 1;
                        }
                    }
                }
                Err(_) => bad_success += 1,
            }
        }
    }
    verdict(
        conservation == 0 && criterion == 0 && bad_success == 0,
        format!(
            "2000 decodes, {steps} audited steps, {successes} successes; violations: accumulator {conservation}, \
             gain {criterion}, syndrome {bad_success}"
        ),
    )
}

fn small_weight_validity() -> Verdict {
    let code = small();
    let config = DecoderConfig { strategy: Some(SearchStrategy::Exhaustive), ..DecoderConfig::default() };
    let dec = Decoder::new(&code, Role::Xerror, config).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for w in [1usize, 2, 3, 4] {
        for kind in [DecoderKind::Sequential, DecoderKind::Parallel] {
            let mut valid = 0;
            for t in 0..500u64 {
                let e = sample_error(&ErrorModel::FixedWeight { w }, &code, 90_000 + 1000 * w as u64 + t).unwrap();
                let s = dec.syndrome(&e).unwrap();
                if let Ok(out) = dec.decode(&s, kind) {
                    valid += usize::from(out.success() && dec.is_valid_correction(&e, &out.e_hat));
                }
            }
            if w <= 2 {
                ok &= valid == 500;
            }
            lines.push(format!("w={w} {kind} {valid}/500"));
        }
    }
    verdict(ok, lines.join(", "))
}

fn distance_oracle() -> Verdict {
    let code = tiny();
    let n = code.n();
    let mut ok = true;
    let mut lines = Vec::new();
    for (side, check, stab) in [
        (DistanceSide::Z, code.h_z(), code.h_x()),
        (DistanceSide::X, code.h_x(), code.h_z()),
    ] {
        let exact = code.distance_estimate(side, DistanceMode::Exact).unwrap();
        let stabs = EchelonBasis::new(stab);
        let oracle = (1u32..1 << n)
            .map(|bits| BitVector::from_bits((0..n).map(|i| bits >> i & 1 == 1)))
            .filter(|w| check.mul_vec(w).is_zero() && !stabs.contains(w))
            .map(|w| w.weight())
            .min();
        ok &= exact.exact && exact.distance == oracle;
        lines.push(format!("{side:?}: exact {:?}, enumeration {oracle:?}", exact.distance));
    }
    verdict(ok, lines.join(", "))
}

fn spectral_diagnostics() -> Verdict {
    let mut rng = SplitMix64::new(0x5BEC);
    let mut ok = true;
    let mut violations = 0;
    for i in 0..10 {
        let complex = common::random_complex(&mut rng, 2 + i % 3);
        let a = complex.adjacency(GraphKind::CayA);
        let b = complex.adjacency(GraphKind::CayB);
        ok &= a.mul(&b) == b.mul(&a);
        let ea = complex.adjacency(GraphKind::EdgesA);
        let eb = complex.adjacency(GraphKind::EdgesB);
        ok &= ea.mul(&eb) == eb.mul(&ea);
        for kind in [GraphKind::CoverA, GraphKind::CoverB, GraphKind::Square0, GraphKind::Square1] {
            let adj = complex.adjacency(kind);
            let degree = complex.degree(kind);
            let lambda = spectral_lambda(&adj, degree).unwrap().lambda;
            let report = mixing_check(&adj, degree, lambda, adj.dim() / 2, 100, &mut rng);
            violations += report.violations;
        }
    }
    verdict(
        ok && violations == 0,
        format!("10 instances, commutation {ok}, mixing violations {violations} over 4000 pairs"),
    )
}

fn sweep_reproducible() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, text) in [("tiny", REF_TINY), ("small", REF_SMALL)] {
        let config = dir.path().join(format!("{name}.json"));
        std::fs::write(&config, text).unwrap();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{name}-{run}.csv"));
            let args = ["qtanner", "sweep", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
            let (mut so, mut se) = (Vec::new(), Vec::new());
            let code = qtanner::cli::run(args, &mut so, &mut se);
            if code != 0 {
                return verdict(false, format!("{name}: exit {code}: {}", String::from_utf8_lossy(&se)));
            }
            outputs.push(std::fs::read(&out).unwrap());
        }
        let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
        ok &= same;
        lines.push(format!("{name}: {} bytes, identical {same}", outputs[0].len()));
    }
    verdict(ok, lines.join(", "))
}

type Criterion = (&'static str, Option<u64>, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("CSS orthogonality", Some(10), css_orthogonality),
        ("rate bound", None, rate_bound),
        ("entropy inverse and κ prediction", None, entropy_formulas),
        ("robustness oracle", Some(60), robustness_oracle),
        ("coset-leader minimality", Some(30), coset_minimality),
        ("preprocessing bound", None, preprocessing_bound),
        ("conservation and flip criteria", None, conservation_and_criteria),
        ("small-weight correction", None, small_weight_validity),
        ("distance oracle", Some(60), distance_oracle),
        ("spectral diagnostics", None, spectral_diagnostics),
        ("sweep reproducibility", None, sweep_reproducible),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let v = timed(limit.map(Duration::from_secs), f);
        let tag = if v.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!v.passed);
        println!("criterion {:2} {tag}: {name}: {}", i + 1, v.detail);
    }
    println!("acceptance: {} of 11 passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
