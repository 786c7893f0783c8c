mod common;

use std::collections::VecDeque;

use proptest::prelude::*;
use qtanner::complex::{GraphKind, VertexClass};
use qtanner::decoder::{Decoder, DecoderConfig, DecoderKind, Role};
use qtanner::gf2::{BitMatrix, BitVector};
use qtanner::groups::{validate_generators, Group};
use qtanner::local_codes::{CosetLeaderTable, LocalCodePair, LocalRole, DEFAULT_NORM_BUDGET};
use qtanner::rng::SplitMix64;
use qtanner::sim::{sample_error, ErrorModel};

fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> BitMatrix {
    BitMatrix::from_rows(
        cols,
        (0..rows).map(|_| BitVector::from_bits((0..cols).map(|_| rng.bernoulli(0.4)))).collect(),
    )
}

fn parity(x: u64) -> bool {
    x.count_ones() % 2 == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_basis_is_annihilated(seed: u64, rows in 1usize..12, cols in 1usize..90) {
        let m = random_matrix(&mut SplitMix64::new(seed), rows, cols);
        let k = m.kernel_basis();
        prop_assert!(m.mul_transpose(&k).is_zero());
        prop_assert_eq!(k.row_count() + m.rank(), cols);
    }

    #[test]
    fn double_dual_has_same_rowspace(seed: u64, rows in 1usize..10, cols in 2usize..40) {
        let g = random_matrix(&mut SplitMix64::new(seed), rows, cols);
        let dd = g.dual_basis().dual_basis();
        prop_assert_eq!(dd.rank(), g.rank());
        prop_assert_eq!(dd.vstack(&g).rank(), g.rank());
    }

    #[test]
    fn weight_of_sum(a in proptest::collection::vec(any::<bool>(), 0..200), seed: u64) {
        let mut rng = SplitMix64::new(seed);
        let a = BitVector::from_bits(a);
        let b = BitVector::from_bits((0..a.len()).map(|_| rng.bernoulli(0.5)));
        prop_assert_eq!((&a + &b).weight(), a.weight() + b.weight() - 2 * a.and_weight(&b));
    }

    #[test]
    fn small_groups_satisfy_axioms(n in 1usize..24, dihedral: bool) {
        let g = if dihedral { Group::dihedral(n) } else { Group::cyclic(n) }.unwrap();
        prop_assert_eq!(g.associativity_counterexample(), None);
        for x in 0..g.order() {
            prop_assert_eq!(g.mul(x, g.inv(x)), g.identity());
            prop_assert_eq!(g.mul(g.identity(), x), x);
        }
    }

    #[test]
    fn connectivity_matches_bfs(seed: u64, delta in 2usize..5) {
        let mut rng = SplitMix64::new(seed);
        let complex = common::random_complex(&mut rng, delta);
        let g = complex.group();
        let a = complex.gens_a().elements();
        let mut seen = vec![false; g.order()];
        let mut queue = VecDeque::from([g.identity()]);
        seen[g.identity()] = true;
        while let Some(x) = queue.pop_front() {
            for &s in a {
                let y = g.mul(s, x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let diag = validate_generators(g, a).unwrap();
        prop_assert_eq!(diag.connected, seen.iter().all(|&s| s));
    }

    #[test]
    fn complex_incidence(seed: u64, delta in 2usize..5) {
        let complex = common::random_complex(&mut SplitMix64::new(seed), delta);
        let a = complex.adjacency(GraphKind::CayA);
        let b = complex.adjacency(GraphKind::CayB);
        prop_assert!(a.mul(&b) == b.mul(&a));
        for q in 0..complex.square_count() {
            let sv = complex.square_vertices(q);
            let ids = [sv.v00, sv.v01, sv.v10, sv.v11];
            for (class, id) in VertexClass::ALL.into_iter().zip(ids) {
                prop_assert_eq!(complex.vertex(id).class, class);
                prop_assert!(complex.window(id).contains(&(q as u32)));
            }
        }
        for v in complex.vertices() {
            let mut w = complex.window(complex.vertex_id(v)).to_vec();
            w.sort_unstable();
            w.dedup();
            prop_assert_eq!(w.len(), delta * delta);
        }
    }

    #[test]
    fn min_norm_decomposition_is_stable(seed: u64, ka in 1usize..4, kb in 1usize..4, zside: bool) {
        let mut rng = SplitMix64::new(seed);
        let pair = LocalCodePair::random(4, ka, kb, rng.next_u64(), rng.next_u64()).unwrap();
        let product = pair.product(if zside { LocalRole::ZSide } else { LocalRole::XSide });
        let w = product.window();
        let x = product.random_codeword(&mut rng);
        let d = product.min_norm_decompose(x, DEFAULT_NORM_BUDGET).unwrap();
        prop_assert_eq!(d.word(), x);
        for b in 0..w.delta() {
            let col = w.column(d.c, b);
            prop_assert!(product.column_dual_generators().iter().all(|&h| !parity(col & h)));
        }
        for a in 0..w.delta() {
            let row = w.row(d.r, a);
            prop_assert!(product.row_dual_generators().iter().all(|&h| !parity(row & h)));
        }
        let again = product.min_norm_decompose(d.c ^ d.r, DEFAULT_NORM_BUDGET).unwrap();
        prop_assert_eq!(again.norm(), d.norm());
    }

    #[test]
    fn coset_leaders_reproduce_syndromes(seed: u64, ka in 1usize..4, kb in 1usize..4, word: u16) {
        let mut rng = SplitMix64::new(seed);
        let pair = LocalCodePair::random(4, ka, kb, rng.next_u64(), rng.next_u64()).unwrap();
        for role in [LocalRole::XSide, LocalRole::ZSide] {
            let table = CosetLeaderTable::build(&pair.product(role)).unwrap();
            let s = table.syndrome(u64::from(word));
            let leader = table.decode(s);
            prop_assert_eq!(table.syndrome(leader), s);
            prop_assert!(leader.count_ones() <= word.count_ones());
        }
    }

    #[test]
    fn random_codes_are_css_and_ldpc(seed: u64, complementary: bool) {
        let code = common::random_code(&mut SplitMix64::new(seed), complementary).unwrap();
        prop_assert!(code.h_x().mul_transpose(code.h_z()).is_zero());
        let k = code.k();
        prop_assert_eq!(k, code.h_z().kernel_basis().row_count() - code.h_x().rank());
        let d2 = code.complex().delta().pow(2);
        prop_assert!(code.h_x().max_row_weight() <= d2 && code.h_z().max_row_weight() <= d2);
        let cols = code.h_x().vstack(code.h_z()).column_weights();
        let per_square = 2 * code.rows_per_x_vertex() + 2 * code.rows_per_z_vertex();
        prop_assert!(cols.into_iter().all(|c| c <= per_square));
        if complementary {
            prop_assert!(code.params().rate_bound_ok);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decoders_conserve_and_respect_syndromes(seed: u64, w in 1usize..8, zerror: bool) {
        let mut rng = SplitMix64::new(seed);
        let complementary = rng.bernoulli(0.5);
        let code = common::random_code(&mut rng, complementary).unwrap();
        let role = if zerror { Role::Zerror } else { Role::Xerror };
        let config = DecoderConfig { audit: true, ..DecoderConfig::default() };
        let dec = Decoder::new(&code, role, config).unwrap();
        let e = sample_error(&ErrorModel::FixedWeight { w: w.min(code.n()) }, &code, rng.next_u64()).unwrap();
        let s = dec.syndrome(&e).unwrap();
        let m = dec.preprocess(&s).unwrap();
        prop_assert!(dec.check_mismatch(&e, &m).holds());
        for kind in [DecoderKind::Sequential, DecoderKind::Parallel] {
            let out = dec.decode_mismatch(&s, &m, kind).unwrap();
            prop_assert!(out.audit.clean());
            prop_assert_eq!(out.state.total(), m.z.clone());
            if out.success() {
                prop_assert_eq!(dec.syndrome(&out.e_hat).unwrap(), s.clone());
            } else {
                prop_assert!(out.e_hat.is_zero());
            }
        }
    }

    #[test]
    fn error_models_have_their_shape(seed: u64, w in 0usize..20, w_per in 1usize..5) {
        let code = common::random_code(&mut SplitMix64::new(seed), false).unwrap();
        let w = w.min(code.n());
        let e = sample_error(&ErrorModel::FixedWeight { w }, &code, seed).unwrap();
        prop_assert_eq!(e.weight(), w);
        let w_per = w_per.min(code.complex().delta().pow(2));
        let e = sample_error(&ErrorModel::Clustered { v_count: 1, w_per }, &code, seed).unwrap();
        prop_assert_eq!(e.weight(), w_per);
        let complex = code.complex();
        let inside = [VertexClass::V01, VertexClass::V10].into_iter().any(|class| {
            complex.class_vertices(class).any(|v| {
                let window = complex.window(complex.vertex_id(v));
                e.ones().all(|q| window.contains(&(q as u32)))
            })
        });
        prop_assert!(inside);
    }
}
