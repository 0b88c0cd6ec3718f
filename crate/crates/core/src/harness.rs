//! Referee side of the game: question enumeration, verification sweeps,
//! classical strategy scoring and pseudo-telepathy certificates.

use std::time::Instant;

use num_rational::Ratio;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    chromatic_lower_bound, exact_chromatic_number, frankl_alpha, is_odd_prime_power, neighbors,
    sylvester_clique, GraphSpec, Vertex, MAX_ENUMERATION_BITS,
};
use crate::protocol::{
    collision_probability_exact, ratio_to_f64, run_protocol, seeded_rng, wins, Question,
    PRNG_ALGORITHM,
};
use crate::quantum::TOLERANCE;

/// Largest `N` verified exhaustively without an explicit opt-in.
pub const DEFAULT_EXHAUSTIVE_BITS: u32 = 12;

/// Largest `N` accepted by [`evaluate_classical`].
pub const MAX_CLASSICAL_BITS: u32 = 12;

/// Vertex count of the induced subgraph used by the subgraph certificate.
pub const SUBGRAPH_SIZE: u64 = 1609;

const GODSIL_NEWMAN: &str =
    "Godsil and Newman: chi(G_N) > N whenever N = 4m > 8 (literature result, not computed here)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    #[serde(rename = "exact-fast-path")]
    Exact,
    #[serde(rename = "full-simulation")]
    Simulated,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact-fast-path",
            Mode::Simulated => "full-simulation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Number of random promise questions in simulated mode.
    pub sample: u64,
    pub seed: u64,
    /// Worker threads; `None` uses rayon's global pool.
    pub jobs: Option<usize>,
    /// Permits exhaustive exact verification beyond
    /// [`DEFAULT_EXHAUSTIVE_BITS`] (up to `N = 16`).
    pub allow_large_exact: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Exact,
            sample: 10_000,
            seed: 0,
            jobs: None,
            allow_large_exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n_bits: u32,
    pub mode: Mode,
    pub questions_checked: u64,
    pub failures: u64,
    /// Largest `|Pr[c_A = c_B] - expected|` observed.
    pub max_diagonal_leak: f64,
    pub seed: Option<u64>,
    pub prng_algorithm: Option<&'static str>,
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn csv_header() -> &'static str {
        "n_bits,mode,questions_checked,failures,max_diagonal_leak,seed,prng_algorithm,wall_time_s"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n_bits,
            self.mode.as_str(),
            self.questions_checked,
            self.failures,
            crate::report::format_real(self.max_diagonal_leak),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.prng_algorithm.unwrap_or_default(),
            crate::report::format_real(self.wall_time_s),
        )
    }
}

/// All promise questions: the `2^N` diagonal ones, then every ordered edge
/// `(a, b)` with `a` ascending and `b` in neighbour order.
pub fn enumerate_questions(n_bits: u32) -> Result<impl Iterator<Item = Question>> {
    let g = GraphSpec::new(n_bits)?;
    if n_bits > MAX_ENUMERATION_BITS {
        return Err(Error::ResourceLimit(format!(
            "question enumeration is limited to N <= {MAX_ENUMERATION_BITS}; use sampling"
        )));
    }
    let diagonal = g.vertices().map(move |a| Question { a, b: a, n_bits });
    let edges = g
        .vertices()
        .flat_map(move |a| neighbors(a, g).map(move |b| Question { a, b, n_bits }));
    Ok(diagonal.chain(edges))
}

/// `2^N + 2^N * C(N, N/2)`.
pub fn promise_question_count(g: GraphSpec) -> u64 {
    g.vertex_count() * (1 + g.degree())
}

/// Uniform vertex `a`; with probability 1/2 the diagonal question, otherwise
/// `b = a ^ m` for a uniformly random weight-`N/2` mask `m`.
pub fn random_promise_question<R: Rng>(g: GraphSpec, rng: &mut R) -> Question {
    let n = g.n_bits();
    let a = Vertex::new(rng.gen_range(0..g.vertex_count()) as u32);
    let b = if rng.gen_bool(0.5) {
        a
    } else {
        let mask = sample_indices(rng, n as usize, g.half() as usize)
            .into_iter()
            .fold(0u32, |m, i| m | (1 << i));
        Vertex::new(a.word() ^ mask)
    };
    Question { a, b, n_bits: n }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    checked: u64,
    failures: u64,
    leak: f64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            checked: self.checked + other.checked,
            failures: self.failures + other.failures,
            leak: self.leak.max(other.leak),
        }
    }
}

fn expected_collision(q: &Question) -> Ratio<u64> {
    Ratio::from_integer(u64::from(q.a == q.b))
}

fn check_exact(q: &Question) -> Tally {
    let got = collision_probability_exact(q.a, q.b, q.n_bits);
    let want = expected_collision(q);
    Tally {
        checked: 1,
        failures: u64::from(got != want),
        leak: (ratio_to_f64(got) - ratio_to_f64(want)).abs(),
    }
}

fn check_simulated(q: &Question) -> Result<Tally> {
    let simulated = run_protocol(q)?.diagonal_sum();
    let exact = collision_probability_exact(q.a, q.b, q.n_bits);
    let want = expected_collision(q);
    let leak = (simulated - ratio_to_f64(want))
        .abs()
        .max((simulated - ratio_to_f64(exact)).abs());
    Ok(Tally {
        checked: 1,
        failures: u64::from(exact != want || leak > TOLERANCE),
        leak,
    })
}

fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(0) => Err(Error::InvalidArgument("jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

fn exhaustive_exact(g: GraphSpec) -> Tally {
    // One work item per Alice question: its diagonal pair plus all its edges.
    (0..g.vertex_count())
        .into_par_iter()
        .map(|word| {
            let a = Vertex::new(word as u32);
            let n_bits = g.n_bits();
            let diagonal = check_exact(&Question { a, b: a, n_bits });
            neighbors(a, g)
                .map(|b| check_exact(&Question { a, b, n_bits }))
                .fold(diagonal, Tally::merge)
        })
        .reduce(Tally::default, Tally::merge)
}

/// Checks that the entangled strategy wins every promise question.
///
/// Exact mode walks every question through the integer collision formula.
/// Simulated mode draws `sample` promise questions from `seed` and pushes each
/// through the dense simulator as well, comparing against both the exact
/// value and the target (1 on the diagonal, 0 on edges) at `1e-9`.
pub fn verify_exhaustive(n_bits: u32, opts: &VerifyOptions) -> Result<VerificationReport> {
    let g = GraphSpec::new(n_bits)?;
    let start = Instant::now();

    let (tally, seed, prng) = match opts.mode {
        Mode::Exact => {
            if n_bits > MAX_ENUMERATION_BITS {
                return Err(Error::ResourceLimit(format!(
                    "exhaustive verification is limited to N <= {MAX_ENUMERATION_BITS}"
                )));
            }
            if n_bits > DEFAULT_EXHAUSTIVE_BITS && !opts.allow_large_exact {
                return Err(Error::ResourceLimit(format!(
                    "exhaustive verification at N = {n_bits} ({} questions) needs explicit opt-in",
                    promise_question_count(g)
                )));
            }
            (with_pool(opts.jobs, || exhaustive_exact(g))?, None, None)
        }
        Mode::Simulated => {
            let mut rng = seeded_rng(opts.seed);
            let questions: Vec<Question> = (0..opts.sample)
                .map(|_| random_promise_question(g, &mut rng))
                .collect();
            let tally = with_pool(opts.jobs, || {
                questions
                    .par_iter()
                    .map(check_simulated)
                    .try_reduce(Tally::default, |x, y| Ok(x.merge(y)))
            })??;
            (tally, Some(opts.seed), Some(PRNG_ALGORITHM))
        }
    };

    Ok(VerificationReport {
        n_bits,
        mode: opts.mode,
        questions_checked: tally.checked,
        failures: tally.failures,
        max_diagonal_leak: tally.leak,
        seed,
        prng_algorithm: prng,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Deterministic answers for both provers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    f_a: Vec<usize>,
    f_b: Vec<usize>,
    colours: usize,
}

impl ClassicalStrategy {
    /// `f_a[v]` and `f_b[v]` are the colours answered for vertex word `v`.
    pub fn new(f_a: Vec<usize>, f_b: Vec<usize>, colours: usize) -> Result<Self> {
        if let Some(&c) = f_a.iter().chain(&f_b).find(|&&c| c >= colours) {
            return Err(Error::InvalidArgument(format!(
                "colour {c} outside palette of {colours}"
            )));
        }
        Ok(ClassicalStrategy { f_a, f_b, colours })
    }

    /// Both provers answer from the same colouring.
    pub fn shared(colouring: Vec<usize>, colours: usize) -> Result<Self> {
        Self::new(colouring.clone(), colouring, colours)
    }

    pub fn constant(vertex_count: usize, colour: usize, colours: usize) -> Result<Self> {
        Self::shared(vec![colour; vertex_count], colours)
    }

    pub fn colours(&self) -> usize {
        self.colours
    }

    pub fn alice(&self) -> &[usize] {
        &self.f_a
    }

    pub fn bob(&self) -> &[usize] {
        &self.f_b
    }
}

/// Fraction of all promise questions a classical strategy wins.
pub fn evaluate_classical(strategy: &ClassicalStrategy, n_bits: u32) -> Result<Ratio<u64>> {
    let g = GraphSpec::new(n_bits)?;
    if n_bits > MAX_CLASSICAL_BITS {
        return Err(Error::ResourceLimit(format!(
            "classical evaluation is limited to N <= {MAX_CLASSICAL_BITS}"
        )));
    }
    let total = g.vertex_count() as usize;
    if strategy.f_a.len() != total || strategy.f_b.len() != total {
        return Err(Error::InvalidArgument(format!(
            "strategy must assign a colour to all {total} vertices"
        )));
    }
    let mut won = 0u64;
    let mut asked = 0u64;
    for q in enumerate_questions(n_bits)? {
        let c_a = strategy.f_a[q.a.word() as usize];
        let c_b = strategy.f_b[q.b.word() as usize];
        asked += 1;
        won += u64::from(wins(&q, c_a, c_b));
    }
    Ok(Ratio::new(won, asked))
}

/// Where the classical side of a certificate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiEvidence {
    /// `ceil(|V| / alpha)` with the independence number computed in-process.
    IndependenceBound,
    /// Exact chromatic number by exhaustive colouring.
    ExactColouring,
    /// Size of a verified clique.
    Clique,
    /// Cited result from the literature.
    ExternalCitation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantumEvidence {
    ExhaustiveExact,
    SampledSimulation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoTelepathyCertificate {
    pub n_bits: u32,
    pub c: u32,
    pub quantum_win: bool,
    pub quantum_evidence: QuantumEvidence,
    pub questions_checked: u64,
    pub chi_lower_bound: u64,
    pub chi_evidence: ChiEvidence,
    pub alpha_used: Option<u64>,
    pub subgraph_size: Option<u64>,
    pub external_citation: Option<&'static str>,
    pub verdict: bool,
    pub seed: Option<u64>,
    pub prng_algorithm: Option<&'static str>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateOptions {
    /// Use the bound for an induced 1609-vertex subgraph of one component
    /// (`N = 12` only).
    pub use_subgraph: bool,
    /// Quantum-side verification for `N` above the exhaustive default.
    pub sampled: VerifyOptions,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            use_subgraph: false,
            sampled: VerifyOptions {
                mode: Mode::Simulated,
                ..VerifyOptions::default()
            },
        }
    }
}

struct ChiClaim {
    bound: u64,
    evidence: ChiEvidence,
    alpha: Option<u64>,
    subgraph: Option<u64>,
    citation: Option<&'static str>,
}

fn chi_claim(g: GraphSpec, use_subgraph: bool) -> Result<ChiClaim> {
    let n = g.n_bits();
    let k = u64::from(n / 4);
    if use_subgraph {
        if n != 12 {
            return Err(Error::InvalidArgument(
                "the 1609-vertex subgraph bound applies to N = 12 only".into(),
            ));
        }
        // Each of the two components carries half the independence number.
        let alpha = (frankl_alpha(k)? / 2) as u64;
        return Ok(ChiClaim {
            bound: chromatic_lower_bound(SUBGRAPH_SIZE, alpha)?,
            evidence: ChiEvidence::IndependenceBound,
            alpha: Some(alpha),
            subgraph: Some(SUBGRAPH_SIZE),
            citation: None,
        });
    }
    let claim = match n {
        4 => {
            let all: Vec<Vertex> = g.vertices().collect();
            let chi = exact_chromatic_number(&all, g, all.len())?
                .expect("16 colours always suffice for 16 vertices");
            ChiClaim {
                bound: chi as u64,
                evidence: ChiEvidence::ExactColouring,
                alpha: None,
                subgraph: None,
                citation: None,
            }
        }
        8 => ChiClaim {
            bound: sylvester_clique(g)?.len() as u64,
            evidence: ChiEvidence::Clique,
            alpha: None,
            subgraph: None,
            citation: None,
        },
        _ if is_odd_prime_power(k) => {
            let alpha = u64::try_from(frankl_alpha(k)?)
                .map_err(|_| Error::Overflow(format!("independence number for k = {k}")))?;
            ChiClaim {
                bound: chromatic_lower_bound(g.vertex_count(), alpha)?,
                evidence: ChiEvidence::IndependenceBound,
                alpha: Some(alpha),
                subgraph: None,
                citation: None,
            }
        }
        _ => ChiClaim {
            bound: u64::from(n) + 1,
            evidence: ChiEvidence::ExternalCitation,
            alpha: None,
            subgraph: None,
            citation: Some(GODSIL_NEWMAN),
        },
    };
    Ok(claim)
}

/// Pairs a quantum winning check with a classical colour lower bound for
/// `c = N`. The verdict holds when the entangled strategy wins every promise
/// question and the graph provably needs more than `N` colours.
pub fn pseudo_telepathy_certificate(
    n_bits: u32,
    opts: &CertificateOptions,
) -> Result<PseudoTelepathyCertificate> {
    let g = GraphSpec::new(n_bits)?;
    let start = Instant::now();
    let chi = chi_claim(g, opts.use_subgraph)?;

    let exhaustive = n_bits <= DEFAULT_EXHAUSTIVE_BITS
        || (opts.sampled.allow_large_exact && n_bits <= MAX_ENUMERATION_BITS);
    let (report, evidence) = if exhaustive {
        let exact = VerifyOptions {
            mode: Mode::Exact,
            allow_large_exact: true,
            ..opts.sampled.clone()
        };
        (verify_exhaustive(n_bits, &exact)?, QuantumEvidence::ExhaustiveExact)
    } else {
        let sampled = VerifyOptions {
            mode: Mode::Simulated,
            ..opts.sampled.clone()
        };
        (verify_exhaustive(n_bits, &sampled)?, QuantumEvidence::SampledSimulation)
    };

    let quantum_win = report.passed() && report.questions_checked > 0;
    Ok(PseudoTelepathyCertificate {
        n_bits,
        c: n_bits,
        quantum_win,
        quantum_evidence: evidence,
        questions_checked: report.questions_checked,
        chi_lower_bound: chi.bound,
        chi_evidence: chi.evidence,
        alpha_used: chi.alpha,
        subgraph_size: chi.subgraph,
        external_citation: chi.citation,
        verdict: quantum_win && chi.bound > u64::from(n_bits),
        seed: report.seed,
        prng_algorithm: report.prng_algorithm,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::exact_colouring;

    #[test]
    fn question_counts() {
        assert_eq!(enumerate_questions(4).unwrap().count(), 112);
        assert_eq!(enumerate_questions(8).unwrap().count(), 18_176);
        let g12 = GraphSpec::new(12).unwrap();
        assert_eq!(promise_question_count(g12), 3_788_800);
    }

    #[test]
    fn enumeration_order() {
        let qs: Vec<Question> = enumerate_questions(4).unwrap().collect();
        assert!(qs[..16].iter().enumerate().all(|(i, q)| q.a.word() == i as u32 && q.a == q.b));
        assert_eq!((qs[16].a.word(), qs[16].b.word()), (0, 0b0011));
        assert!(qs[16..].windows(2).all(|w| w[0].a <= w[1].a));
        assert!(qs.iter().all(Question::is_promise));
    }

    #[test]
    fn enumeration_limits() {
        assert!(matches!(enumerate_questions(20), Err(Error::ResourceLimit(_))));
        assert!(matches!(enumerate_questions(6), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exact_verification_small() {
        let r = verify_exhaustive(4, &VerifyOptions::default()).unwrap();
        assert_eq!((r.questions_checked, r.failures), (112, 0));
        assert_eq!(r.max_diagonal_leak, 0.0);
        assert_eq!(r.seed, None);
    }

    #[test]
    fn exact_verification_needs_opt_in_at_16() {
        let err = verify_exhaustive(16, &VerifyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
        let simulated = VerifyOptions {
            mode: Mode::Exact,
            allow_large_exact: true,
            ..VerifyOptions::default()
        };
        assert!(matches!(verify_exhaustive(20, &simulated), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn jobs_do_not_change_results() {
        let base = |jobs| VerifyOptions {
            mode: Mode::Simulated,
            sample: 300,
            seed: 9,
            jobs,
            allow_large_exact: false,
        };
        let one = verify_exhaustive(8, &base(Some(1))).unwrap();
        let four = verify_exhaustive(8, &base(Some(4))).unwrap();
        assert_eq!(one.failures, 0);
        assert_eq!(
            (one.questions_checked, one.failures, one.max_diagonal_leak),
            (four.questions_checked, four.failures, four.max_diagonal_leak)
        );
        assert!(verify_exhaustive(8, &base(Some(0))).is_err());
    }

    #[test]
    fn random_questions_respect_promise() {
        let g = GraphSpec::new(16).unwrap();
        let mut rng = seeded_rng(1);
        let qs: Vec<Question> = (0..500).map(|_| random_promise_question(g, &mut rng)).collect();
        assert!(qs.iter().all(Question::is_promise));
        let diag = qs.iter().filter(|q| q.a == q.b).count();
        assert!(diag > 150 && diag < 350);
    }

    #[test]
    fn classical_scores() {
        let g = GraphSpec::new(4).unwrap();
        let all: Vec<Vertex> = g.vertices().collect();
        let (colours, colouring) = exact_colouring(&all, g, 16).unwrap().unwrap();
        assert_eq!(colours, 4);
        let proper = ClassicalStrategy::shared(colouring.clone(), 4).unwrap();
        assert_eq!(evaluate_classical(&proper, 4), Ok(Ratio::from_integer(1)));

        let constant = ClassicalStrategy::constant(16, 0, 4).unwrap();
        assert_eq!(evaluate_classical(&constant, 4), Ok(Ratio::new(16, 112)));

        let mut bob = colouring.clone();
        bob[5] = (bob[5] + 1) % 4;
        let split = ClassicalStrategy::new(colouring, bob, 4).unwrap();
        assert!(evaluate_classical(&split, 4).unwrap() < Ratio::from_integer(1));
    }

    #[test]
    fn classical_rejects_partial_strategies() {
        let partial = ClassicalStrategy::constant(15, 0, 4).unwrap();
        assert!(matches!(evaluate_classical(&partial, 4), Err(Error::InvalidArgument(_))));
        assert!(ClassicalStrategy::constant(16, 4, 4).is_err());
    }

    #[test]
    fn certificates_for_small_graphs() {
        let opts = CertificateOptions::default();
        let c4 = pseudo_telepathy_certificate(4, &opts).unwrap();
        assert!(c4.quantum_win);
        assert_eq!(c4.chi_lower_bound, 4);
        assert!(!c4.verdict);

        let c8 = pseudo_telepathy_certificate(8, &opts).unwrap();
        assert_eq!((c8.chi_lower_bound, c8.chi_evidence), (8, ChiEvidence::Clique));
        assert!(!c8.verdict);

        assert!(pseudo_telepathy_certificate(10, &opts).is_err());
        let sub = CertificateOptions {
            use_subgraph: true,
            ..CertificateOptions::default()
        };
        assert!(pseudo_telepathy_certificate(8, &sub).is_err());
    }

    #[test]
    fn certificate_for_g20_is_computed_in_process() {
        let opts = CertificateOptions {
            sampled: VerifyOptions {
                mode: Mode::Simulated,
                sample: 200,
                seed: 3,
                ..VerifyOptions::default()
            },
            ..CertificateOptions::default()
        };
        let c = pseudo_telepathy_certificate(20, &opts).unwrap();
        assert_eq!(c.alpha_used, Some(20_144));
        assert_eq!(c.chi_lower_bound, 53);
        assert_eq!(c.chi_evidence, ChiEvidence::IndependenceBound);
        assert_eq!(c.quantum_evidence, QuantumEvidence::SampledSimulation);
        assert!(c.verdict);
    }

    #[test]
    fn csv_row_has_all_columns() {
        let r = verify_exhaustive(4, &VerifyOptions::default()).unwrap();
        let cols = VerificationReport::csv_header().split(',').count();
        assert_eq!(r.to_csv_row().split(',').count(), cols);
    }
}
