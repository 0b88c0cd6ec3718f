use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

use ptlab::graph::{
    frankl_alpha, frankl_upper_bound, is_edge, neighbors, GraphSpec, Vertex,
};
use ptlab::protocol::{
    collision_probability_exact, ratio_to_f64, run_protocol, sample_round, Question,
};
use ptlab::quantum::{
    apply_final_transforms, apply_phases, correlate, outcome_distribution, qft_matrix,
    JointState, QuditState,
};

const TOL: f64 = 1e-9;

fn normalised(raw: Vec<(f64, f64)>) -> Vec<Complex64> {
    let amps: Vec<Complex64> = raw.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.into_iter().map(|z| z / norm).collect()
}

fn qudit_state() -> impl Strategy<Value = QuditState> {
    (1usize..=32)
        .prop_flat_map(|n| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n))
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|raw| QuditState::new(normalised(raw)).unwrap())
}

fn joint_state(n: usize) -> impl Strategy<Value = JointState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |raw| JointState::new(n, normalised(raw)).unwrap())
}

fn graph_n() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![4u32, 8, 12, 16])
}

/// Any pair of words for `n`, promise or not.
fn word_pair() -> impl Strategy<Value = (u32, u32, u32)> {
    graph_n().prop_flat_map(|n| {
        let max = (1u64 << n) as u32;
        (Just(n), 0..max, 0..max)
    })
}

/// A promise question: equal words or an `N/2`-weight flip.
fn promise_question() -> impl Strategy<Value = Question> {
    graph_n().prop_flat_map(|n| {
        let max = (1u64 << n) as u32;
        (
            0..max,
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), (n / 2) as usize),
            any::<bool>(),
        )
            .prop_map(move |(a, bits, same)| {
                let mask = bits.iter().fold(0u32, |m, &i| m | 1 << i);
                let b = if same { a } else { a ^ mask };
                Question::new(Vertex::new(a), Vertex::new(b), n).unwrap()
            })
    })
}

#[test]
fn qft_unitary_for_all_small_orders() {
    for n in 1..=32 {
        assert!(qft_matrix(n, false).unwrap().unitarity_error() < TOL, "N = {n}");
        assert!(qft_matrix(n, true).unwrap().unitarity_error() < TOL, "N = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qft_round_trip(state in qudit_state()) {
        let n = state.dim();
        let there = qft_matrix(n, false).unwrap().apply(&state).unwrap();
        let back = qft_matrix(n, true).unwrap().apply(&there).unwrap();
        for (x, y) in back.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((x - y).norm() < TOL);
        }
        prop_assert!((there.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn pipeline_stages_preserve_norm(state in joint_state(8), a in 0u32..256, b in 0u32..256) {
        let signed = apply_phases(&state, Vertex::new(a), Vertex::new(b)).unwrap();
        prop_assert!((signed.norm_sqr() - 1.0).abs() < TOL);
        let out = apply_final_transforms(&signed).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < TOL);
        let dist = outcome_distribution(&out);
        prop_assert!(dist.as_slice().iter().all(|&p| p >= 0.0));
        prop_assert!((dist.total() - 1.0).abs() < TOL);
    }

    #[test]
    fn correlate_preserves_norm(state in qudit_state()) {
        prop_assert!((correlate(&state).norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn fast_path_matches_pipeline((n, a, b) in word_pair()) {
        let q = Question::unchecked(Vertex::new(a), Vertex::new(b), n).unwrap();
        let grid = run_protocol(&q).unwrap();
        let exact = collision_probability_exact(q.a, q.b, n);
        prop_assert!((grid.diagonal_sum() - ratio_to_f64(exact)).abs() < TOL);
        let s = n as f64 - 2.0 * q.distance() as f64;
        prop_assert!((ratio_to_f64(exact) - (s / n as f64).powi(2)).abs() < 1e-15);

        // Equal diagonal entries S^2 / N^3, uniform marginal for Alice.
        let per_cell = s * s / (n as f64).powi(3);
        for j in 0..n as usize {
            prop_assert!((grid.get(j, j) - per_cell).abs() < TOL);
        }
        for m in grid.alice_marginal() {
            prop_assert!((m - 1.0 / n as f64).abs() < TOL);
        }
    }

    #[test]
    fn promise_questions_are_won(q in promise_question(), seed in any::<u64>()) {
        let want = Ratio::from_integer(u64::from(q.a == q.b));
        prop_assert_eq!(collision_probability_exact(q.a, q.b, q.n_bits), want);
        let round = sample_round(&q, seed).unwrap();
        prop_assert!(round.win);
    }

    #[test]
    fn edges_are_symmetric_and_parity_preserving((n, a, b) in word_pair()) {
        let g = GraphSpec::new(n).unwrap();
        let (u, v) = (Vertex::new(a), Vertex::new(b));
        prop_assert_eq!(is_edge(u, v, g), is_edge(v, u, g));
        if is_edge(u, v, g) {
            prop_assert_eq!(u.weight() % 2, v.weight() % 2);
        }
    }

    #[test]
    fn neighbour_streams_are_regular((n, a, _b) in word_pair()) {
        prop_assume!(n <= 12);
        let g = GraphSpec::new(n).unwrap();
        let u = Vertex::new(a);
        let nbrs: Vec<Vertex> = neighbors(u, g).collect();
        prop_assert_eq!(nbrs.len() as u64, g.degree());
        let mut sorted = nbrs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), nbrs.len());
        let v = nbrs[nbrs.len() / 2];
        prop_assert!(neighbors(v, g).any(|w| w == u));
    }
}

#[test]
fn alpha_stays_below_upper_bound() {
    for k in (3..=25).filter(|&k| ptlab::graph::is_odd_prime_power(k)) {
        assert!((frankl_alpha(k).unwrap() as f64) < frankl_upper_bound(k), "k = {k}");
    }
}
