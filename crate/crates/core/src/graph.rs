//! The Hadamard graph `G_N`: all `N`-bit words, adjacent when they differ in
//! exactly `N/2` positions.
//!
//! Vertices are machine words with bit `i` holding the coefficient of `2^i`.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest word width a [`Vertex`] can carry.
pub const MAX_BITS: u32 = 32;

/// Largest `N` for which whole-graph traversals (BFS, edge export, question
/// enumeration) are attempted.
pub const MAX_ENUMERATION_BITS: u32 = 16;

/// Largest vertex set accepted by [`exact_chromatic_number`].
pub const MAX_EXACT_COLOURING_VERTICES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Vertex(u32);

impl Vertex {
    pub const fn new(word: u32) -> Self {
        Vertex(word)
    }

    pub const fn word(self) -> u32 {
        self.0
    }

    /// Bit `i` (coefficient of `2^i`); positions past the word are zero.
    pub fn bit(self, i: usize) -> bool {
        i < 32 && (self.0 >> i) & 1 == 1
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn distance(self, other: Vertex) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    /// Most-significant-first binary rendering padded to `n_bits` digits.
    pub fn to_binary(self, n_bits: u32) -> String {
        format!("{:0width$b}", self.0, width = n_bits as usize)
    }
}

impl From<u32> for Vertex {
    fn from(word: u32) -> Self {
        Vertex(word)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parameters of `G_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GraphSpec {
    n_bits: u32,
}

impl GraphSpec {
    /// `n_bits` must be a positive multiple of four no larger than 32.
    pub fn new(n_bits: u32) -> Result<Self> {
        if n_bits == 0 || n_bits % 4 != 0 || n_bits > MAX_BITS {
            return Err(Error::InvalidArgument(format!(
                "N must be a positive multiple of 4 and at most {MAX_BITS}, got {n_bits}"
            )));
        }
        Ok(GraphSpec { n_bits })
    }

    pub fn n_bits(self) -> u32 {
        self.n_bits
    }

    pub fn half(self) -> u32 {
        self.n_bits / 2
    }

    pub fn vertex_count(self) -> u64 {
        1u64 << self.n_bits
    }

    pub fn contains(self, v: Vertex) -> bool {
        (v.word() as u64) < self.vertex_count()
    }

    /// `C(N, N/2)`.
    pub fn degree(self) -> u64 {
        binomial(self.n_bits as u64, self.half() as u64).expect("C(32, 16) fits in u128") as u64
    }

    pub fn vertices(self) -> impl Iterator<Item = Vertex> {
        (0..self.vertex_count()).map(|w| Vertex(w as u32))
    }

    fn require_enumerable(self, what: &str) -> Result<()> {
        if self.n_bits > MAX_ENUMERATION_BITS {
            return Err(Error::ResourceLimit(format!(
                "{what} enumerates all 2^{} vertices; limit is N <= {MAX_ENUMERATION_BITS}",
                self.n_bits
            )));
        }
        Ok(())
    }
}

pub fn is_edge(u: Vertex, v: Vertex, g: GraphSpec) -> bool {
    u.distance(v) == g.half()
}

/// Words of width `bits` with exactly `weight` ones, ascending.
///
/// Uses the next-lexicographic-permutation bit trick.
#[derive(Debug, Clone)]
pub struct FixedWeightMasks {
    next: Option<u64>,
    limit: u64,
}

impl FixedWeightMasks {
    pub fn new(bits: u32, weight: u32) -> Self {
        let limit = 1u64 << bits;
        let next = if weight > bits {
            None
        } else {
            Some((1u64 << weight) - 1)
        };
        FixedWeightMasks { next, limit }
    }
}

impl Iterator for FixedWeightMasks {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let current = self.next?;
        if current >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if current == 0 {
            None
        } else {
            let lowest = current & current.wrapping_neg();
            let ripple = current + lowest;
            Some((((ripple ^ current) >> 2) / lowest) | ripple)
        };
        Some(current as u32)
    }
}

/// Neighbours of `u`, ordered by ascending `u ^ v`.
pub fn neighbors(u: Vertex, g: GraphSpec) -> impl Iterator<Item = Vertex> {
    FixedWeightMasks::new(g.n_bits, g.half()).map(move |mask| Vertex(u.0 ^ mask))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub n_bits: u32,
    pub component_count: usize,
    /// In discovery order, starting from the component of vertex 0.
    pub component_sizes: Vec<u64>,
    pub parity_split: bool,
}

/// Breadth-first component decomposition of the whole graph.
///
/// `N = 16` is accepted but takes a while (about `8.4e8` edge visits).
pub fn connected_components(g: GraphSpec) -> Result<ComponentReport> {
    g.require_enumerable("component analysis")?;
    let total = g.vertex_count() as usize;
    let mut label = vec![u32::MAX; total];
    let mut sizes = Vec::new();
    // Per component: the parity seen so far, or None once mixed.
    let mut parities: Vec<Option<u32>> = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..total {
        if label[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        label[start] = id;
        queue.push_back(Vertex(start as u32));
        let mut size = 0u64;
        let mut parity = Some(Vertex(start as u32).weight() % 2);
        while let Some(u) = queue.pop_front() {
            size += 1;
            if parity != Some(u.weight() % 2) {
                parity = None;
            }
            for v in neighbors(u, g) {
                let slot = &mut label[v.0 as usize];
                if *slot == u32::MAX {
                    *slot = id;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
        parities.push(parity);
    }

    let half = g.vertex_count() / 2;
    let parity_split = sizes.len() == 2
        && sizes.iter().all(|&s| s == half)
        && parities.iter().all(Option::is_some)
        && parities[0] != parities[1];

    Ok(ComponentReport {
        n_bits: g.n_bits,
        component_count: sizes.len(),
        component_sizes: sizes,
        parity_split,
    })
}

/// Writes every edge once as `"u v"` with `u < v`, ascending by `u` then `v`.
pub fn write_edge_list<W: Write>(g: GraphSpec, out: &mut W) -> Result<()> {
    g.require_enumerable("edge export")?;
    let io_err = |e: io::Error| Error::InvalidArgument(format!("write failed: {e}"));
    let mut row = Vec::with_capacity(g.degree() as usize);
    for u in g.vertices() {
        row.clear();
        row.extend(neighbors(u, g).filter(|&v| v > u));
        row.sort_unstable();
        for v in &row {
            writeln!(out, "{u} {v}").map_err(io_err)?;
        }
    }
    Ok(())
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn is_odd_prime_power(k: u64) -> bool {
    if k < 3 || k % 2 == 0 {
        return false;
    }
    let mut p = 3;
    while p * p <= k && k % p != 0 {
        p += 2;
    }
    if k % p != 0 {
        // No factor up to sqrt(k): k itself is prime.
        return true;
    }
    let mut rest = k;
    while rest % p == 0 {
        rest /= p;
    }
    rest == 1
}

/// Independence number of `G_{4k}` for `k` an odd prime power:
/// `4 * sum_{i<k} C(4k-1, i)`.
pub fn frankl_alpha(k: u64) -> Result<u128> {
    if !is_odd_prime_power(k) {
        return Err(Error::Precondition(format!(
            "the independence formula needs k to be an odd prime power, got {k}"
        )));
    }
    let overflow = || Error::Overflow(format!("independence number for k = {k}"));
    let n = 4u64.checked_mul(k).ok_or_else(overflow)? - 1;
    let mut sum: u128 = 0;
    for i in 0..k {
        let term = binomial(n, i).ok_or_else(overflow)?;
        sum = sum.checked_add(term).ok_or_else(overflow)?;
    }
    sum.checked_mul(4).ok_or_else(overflow)
}

/// `4^(4k) / 3^(3k)`, evaluated in log space.
pub fn frankl_upper_bound(k: u64) -> f64 {
    let k = k as f64;
    (4.0 * k * 4f64.ln() - 3.0 * k * 3f64.ln()).exp()
}

/// `ceil(vertex_count / alpha)`, the colour count forced by the independence
/// number.
pub fn chromatic_lower_bound(vertex_count: u64, alpha: u64) -> Result<u64> {
    if alpha == 0 || vertex_count == 0 {
        return Err(Error::InvalidArgument(
            "vertex count and independence number must be positive".into(),
        ));
    }
    Ok(vertex_count.div_ceil(alpha))
}

/// Rows of the Sylvester Hadamard matrix of order `N`, with `-1` entries
/// mapped to set bits. Any two rows disagree in exactly `N/2` places.
pub fn sylvester_clique(g: GraphSpec) -> Result<Vec<Vertex>> {
    let n = g.n_bits;
    if !n.is_power_of_two() || n < 4 {
        return Err(Error::UnsupportedOrder(n));
    }
    let clique: Vec<Vertex> = (0..n)
        .map(|row| {
            let word = (0..n)
                .filter(|&col| (row & col).count_ones() % 2 == 1)
                .fold(0u32, |w, col| w | (1 << col));
            Vertex(word)
        })
        .collect();

    for (i, &u) in clique.iter().enumerate() {
        for &v in &clique[i + 1..] {
            if !is_edge(u, v, g) {
                return Err(Error::Precondition(format!(
                    "rows {u} and {v} are not at distance {}",
                    g.half()
                )));
            }
        }
    }
    Ok(clique)
}

/// Bitmask adjacency of an induced subgraph with at most 64 vertices.
fn induced_adjacency(vertices: &[Vertex], g: GraphSpec) -> Vec<u64> {
    vertices
        .iter()
        .map(|&u| {
            vertices
                .iter()
                .enumerate()
                .filter(|&(_, &v)| is_edge(u, v, g))
                .fold(0u64, |m, (j, _)| m | (1 << j))
        })
        .collect()
}

struct Colourer<'a> {
    adj: &'a [u64],
    colours: usize,
    assignment: Vec<Option<usize>>,
}

impl Colourer<'_> {
    fn saturation(&self, v: usize) -> u32 {
        let mut seen = 0u64;
        let mut nbrs = self.adj[v];
        while nbrs != 0 {
            let w = nbrs.trailing_zeros() as usize;
            nbrs &= nbrs - 1;
            if let Some(c) = self.assignment[w] {
                seen |= 1 << c;
            }
        }
        seen.count_ones()
    }

    fn free_degree(&self, v: usize) -> u32 {
        let mut count = 0;
        let mut nbrs = self.adj[v];
        while nbrs != 0 {
            let w = nbrs.trailing_zeros() as usize;
            nbrs &= nbrs - 1;
            count += self.assignment[w].is_none() as u32;
        }
        count
    }

    fn pick(&self) -> Option<usize> {
        (0..self.adj.len())
            .filter(|&v| self.assignment[v].is_none())
            .max_by_key(|&v| (self.saturation(v), self.free_degree(v), std::cmp::Reverse(v)))
    }

    fn search(&mut self, used: usize) -> bool {
        let Some(v) = self.pick() else {
            return true;
        };
        // Opening at most one fresh colour removes colour-permutation symmetry.
        let limit = (used + 1).min(self.colours);
        for c in 0..limit {
            let clash = {
                let mut nbrs = self.adj[v];
                let mut hit = false;
                while nbrs != 0 {
                    let w = nbrs.trailing_zeros() as usize;
                    nbrs &= nbrs - 1;
                    if self.assignment[w] == Some(c) {
                        hit = true;
                        break;
                    }
                }
                hit
            };
            if clash {
                continue;
            }
            self.assignment[v] = Some(c);
            if self.search(used.max(c + 1)) {
                return true;
            }
            self.assignment[v] = None;
        }
        false
    }
}

/// Smallest proper colouring of the subgraph induced by `vertices`, using at
/// most `max_colours` colours. Returns the colour count and, per input
/// vertex, its colour; `None` if more than `max_colours` are needed.
pub fn exact_colouring(
    vertices: &[Vertex],
    g: GraphSpec,
    max_colours: usize,
) -> Result<Option<(usize, Vec<usize>)>> {
    if vertices.len() > MAX_EXACT_COLOURING_VERTICES {
        return Err(Error::ResourceLimit(format!(
            "exact colouring handles at most {MAX_EXACT_COLOURING_VERTICES} vertices, got {}",
            vertices.len()
        )));
    }
    if let Some(v) = vertices.iter().find(|&&v| !g.contains(v)) {
        return Err(Error::InvalidArgument(format!(
            "vertex {v} is outside G_{}",
            g.n_bits
        )));
    }
    if vertices.is_empty() {
        return Ok(Some((0, Vec::new())));
    }
    let adj = induced_adjacency(vertices, g);
    for colours in 1..=max_colours.min(vertices.len()) {
        let mut solver = Colourer {
            adj: &adj,
            colours,
            assignment: vec![None; vertices.len()],
        };
        if solver.search(0) {
            let assignment = solver.assignment.into_iter().map(Option::unwrap).collect();
            return Ok(Some((colours, assignment)));
        }
    }
    Ok(None)
}

/// Chromatic number of the induced subgraph, or `None` when it exceeds
/// `max_colours`.
pub fn exact_chromatic_number(
    vertices: &[Vertex],
    g: GraphSpec,
    max_colours: usize,
) -> Result<Option<usize>> {
    Ok(exact_colouring(vertices, g, max_colours)?.map(|(c, _)| c))
}

/// Greedy saturation-ordered colouring of the whole graph. Always proper, not
/// necessarily optimal. Returns the colour of every vertex word.
pub fn greedy_colouring(g: GraphSpec) -> Result<Vec<usize>> {
    g.require_enumerable("greedy colouring")?;
    let total = g.vertex_count() as usize;
    let mut colour: Vec<Option<usize>> = vec![None; total];
    // Per vertex: bitset of colours seen on neighbours (grown on demand).
    let mut seen: Vec<Vec<u64>> = vec![Vec::new(); total];
    let mut saturation = vec![0u32; total];
    let mut buckets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default()];
    buckets[0].extend(0..total);

    for _ in 0..total {
        let level = buckets.iter().rposition(|b| !b.is_empty()).expect("uncoloured vertex");
        let v = *buckets[level].iter().next().expect("non-empty bucket");
        buckets[level].remove(&v);

        let words = &seen[v];
        let c = (0..)
            .find(|&c: &usize| words.get(c / 64).map_or(true, |w| w >> (c % 64) & 1 == 0))
            .expect("a free colour exists");
        colour[v] = Some(c);

        for u in neighbors(Vertex(v as u32), g) {
            let u = u.0 as usize;
            if colour[u].is_some() {
                continue;
            }
            let bits = &mut seen[u];
            if bits.len() <= c / 64 {
                bits.resize(c / 64 + 1, 0);
            }
            if bits[c / 64] >> (c % 64) & 1 == 0 {
                bits[c / 64] |= 1 << (c % 64);
                let old = saturation[u] as usize;
                buckets[old].remove(&u);
                saturation[u] += 1;
                if buckets.len() <= old + 1 {
                    buckets.push(Default::default());
                }
                buckets[old + 1].insert(u);
            }
        }
    }
    Ok(colour.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32) -> GraphSpec {
        GraphSpec::new(n).unwrap()
    }

    #[test]
    fn graph_spec_validation() {
        assert!(GraphSpec::new(0).is_err());
        assert!(GraphSpec::new(6).is_err());
        assert!(GraphSpec::new(36).is_err());
        assert_eq!(GraphSpec::new(32).unwrap().degree(), 601_080_390);
    }

    #[test]
    fn edges() {
        assert!(is_edge(Vertex(0), Vertex(0b0011), g(4)));
        assert!(!is_edge(Vertex(5), Vertex(5), g(4)));
        assert!(is_edge(Vertex(0), Vertex(0b111111), g(12)));
        assert!(!is_edge(Vertex(0), Vertex(0b11111), g(12)));
    }

    #[test]
    fn neighbours_of_zero_in_g4() {
        let got: Vec<u32> = neighbors(Vertex(0), g(4)).map(Vertex::word).collect();
        assert_eq!(got, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
    }

    #[test]
    fn neighbour_count_g12() {
        for u in [0u32, 1, 0xABC, 4095] {
            assert_eq!(neighbors(Vertex(u), g(12)).count(), 924);
        }
    }

    #[test]
    fn neighbour_order_is_by_xor() {
        let u = Vertex(0b1011_0110);
        let xs: Vec<u32> = neighbors(u, g(8)).map(|v| v.word() ^ u.word()).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(xs.len(), 70);
    }

    #[test]
    fn fixed_weight_mask_edge_cases() {
        assert_eq!(FixedWeightMasks::new(4, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(FixedWeightMasks::new(4, 4).collect::<Vec<_>>(), vec![15]);
        assert_eq!(FixedWeightMasks::new(4, 5).count(), 0);
        assert_eq!(FixedWeightMasks::new(32, 16).take(3).count(), 3);
        assert_eq!(FixedWeightMasks::new(32, 32).collect::<Vec<_>>(), vec![u32::MAX]);
    }

    #[test]
    fn components_small() {
        let r = connected_components(g(4)).unwrap();
        assert_eq!(r.component_count, 2);
        assert_eq!(r.component_sizes, vec![8, 8]);
        assert!(r.parity_split);

        let r = connected_components(g(8)).unwrap();
        assert_eq!(r.component_sizes, vec![128, 128]);
        assert!(r.parity_split);
    }

    #[test]
    fn components_refuse_large_graphs() {
        assert!(matches!(connected_components(g(20)), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), Some(924));
        assert_eq!(binomial(5, 7), Some(0));
        assert_eq!(binomial(99, 24), Some(60_629_817_430_084_280_253_876));
    }

    #[test]
    fn odd_prime_powers() {
        for k in [3, 5, 7, 9, 25, 27, 49, 121, 125] {
            assert!(is_odd_prime_power(k), "{k}");
        }
        for k in [0, 1, 2, 4, 6, 12, 15, 45, 16] {
            assert!(!is_odd_prime_power(k), "{k}");
        }
    }

    #[test]
    fn alpha_values() {
        assert_eq!(frankl_alpha(3), Ok(268));
        assert_eq!(frankl_alpha(5), Ok(4 * (1 + 19 + 171 + 969 + 3876)));
        assert!(matches!(frankl_alpha(2), Err(Error::Precondition(_))));
        assert!(matches!(frankl_alpha(1), Err(Error::Precondition(_))));
    }

    #[test]
    fn alpha_overflow_is_reported() {
        // 4k - 1 choose k - 1 leaves u128 range for large prime k.
        assert!(matches!(frankl_alpha(101), Err(Error::Overflow(_))));
    }

    #[test]
    fn alpha_below_upper_bound() {
        assert!((frankl_upper_bound(3) - 16_777_216.0 / 19_683.0).abs() < 1e-9);
        assert!((frankl_upper_bound(5) - 76_626.855_813_895_79).abs() < 1e-6);
        assert_eq!(frankl_alpha(25), Ok(350_704_725_791_100_765_959_344));
        for k in [3, 5, 7, 9, 11, 13, 25] {
            assert!((frankl_alpha(k).unwrap() as f64) < frankl_upper_bound(k));
            assert!(frankl_upper_bound(k + 1) > frankl_upper_bound(k));
        }
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(chromatic_lower_bound(4096, 268), Ok(16));
        assert_eq!(chromatic_lower_bound(1609, 134), Ok(13));
        assert_eq!(chromatic_lower_bound(77, 77), Ok(1));
        assert!(chromatic_lower_bound(10, 0).is_err());
    }

    #[test]
    fn chromatic_number_of_g4() {
        let all: Vec<Vertex> = g(4).vertices().collect();
        assert_eq!(exact_chromatic_number(&all, g(4), 16), Ok(Some(4)));
        assert_eq!(exact_chromatic_number(&all, g(4), 3), Ok(None));
    }

    #[test]
    fn edgeless_and_empty_sets() {
        let independent = [Vertex(0), Vertex(1), Vertex(0b1111)];
        assert_eq!(exact_chromatic_number(&independent, g(4), 4), Ok(Some(1)));
        assert_eq!(exact_chromatic_number(&[], g(4), 4), Ok(Some(0)));
    }

    #[test]
    fn exact_colouring_limits() {
        let too_many: Vec<Vertex> = (0..65).map(Vertex).collect();
        assert!(matches!(
            exact_chromatic_number(&too_many, g(8), 8),
            Err(Error::ResourceLimit(_))
        ));
        assert!(exact_chromatic_number(&[Vertex(16)], g(4), 4).is_err());
    }

    #[test]
    fn sylvester_cliques() {
        let c4 = sylvester_clique(g(4)).unwrap();
        assert_eq!(c4.len(), 4);
        assert_eq!(exact_chromatic_number(&c4, g(4), 8), Ok(Some(4)));

        let c8 = sylvester_clique(g(8)).unwrap();
        assert_eq!(c8.len(), 8);
        for (i, &u) in c8.iter().enumerate() {
            for &v in &c8[i + 1..] {
                assert!(is_edge(u, v, g(8)));
            }
        }
        assert_eq!(sylvester_clique(g(12)), Err(Error::UnsupportedOrder(12)));
        assert_eq!(sylvester_clique(g(32)).unwrap().len(), 32);
    }

    #[test]
    fn greedy_colouring_is_proper() {
        for n in [4, 8] {
            let spec = g(n);
            let colour = greedy_colouring(spec).unwrap();
            for u in spec.vertices() {
                for v in neighbors(u, spec) {
                    assert_ne!(colour[u.word() as usize], colour[v.word() as usize]);
                }
            }
        }
    }

    #[test]
    fn edge_list_format() {
        let mut buf = Vec::new();
        write_edge_list(g(4), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 48);
        assert_eq!(&lines[..3], &["0 3", "0 5", "0 6"]);
        let pairs: Vec<(u32, u32)> = lines
            .iter()
            .map(|l| {
                let mut it = l.split(' ').map(|x| x.parse::<u32>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        assert!(pairs.iter().all(|(u, v)| u < v));
        assert!(pairs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn binary_rendering() {
        assert_eq!(Vertex(3).to_binary(4), "0011");
        assert_eq!(Vertex(63).to_binary(12), "000000111111");
    }
}
