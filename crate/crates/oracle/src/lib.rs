//! Brute-force reference enumerators.
//!
//! Everything here walks the combinatorial objects one by one and is only
//! usable on tiny instances. It exists to check the exact formulas of
//! `dcgraphs` against their definitions.

use std::collections::BTreeMap;

use dcgraphs::{DegreeSet, GraphClass, Multigraph};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),
}

/// Guards against enumerations that would take too long.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimit {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Bound on the number of candidate edge sets or sequences visited.
    pub max_candidate_sets: u128,
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        EnumerationLimit { max_vertices: 10, max_edges: 12, max_candidate_sets: 100_000_000 }
    }
}

impl EnumerationLimit {
    fn check(&self, n: usize, m: usize, candidates: u128) -> Result<(), OracleError> {
        if n > self.max_vertices {
            return Err(OracleError::LimitExceeded(format!("{n} vertices > {}", self.max_vertices)));
        }
        if m > self.max_edges {
            return Err(OracleError::LimitExceeded(format!("{m} edges > {}", self.max_edges)));
        }
        if candidates > self.max_candidate_sets {
            return Err(OracleError::LimitExceeded(format!(
                "{candidates} candidates > {}",
                self.max_candidate_sets
            )));
        }
        Ok(())
    }
}

fn choose(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, i| acc * i)
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Number of simple graphs on `1..=n` with `m` edges and every degree in `D`,
/// by walking all `m`-subsets of the `n(n-1)/2` possible edges.
pub fn count_simple_graphs(d: &DegreeSet, n: usize, m: usize, limit: &EnumerationLimit) -> Result<BigUint, OracleError> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    limit.check(n, m, choose(pairs.len() as u128, m as u128))?;
    let mut degrees = vec![0usize; n];
    let mut count = 0u64;
    subsets(&pairs, 0, m, &mut degrees, d, &mut count);
    Ok(BigUint::from(count))
}

fn subsets(pairs: &[(usize, usize)], start: usize, left: usize, deg: &mut [usize], d: &DegreeSet, count: &mut u64) {
    if left == 0 {
        if deg.iter().all(|&k| d.contains(k)) {
            *count += 1;
        }
        return;
    }
    if start + left > pairs.len() {
        return;
    }
    for idx in start..=pairs.len() - left {
        let (a, b) = pairs[idx];
        deg[a] += 1;
        deg[b] += 1;
        subsets(pairs, idx + 1, left - 1, deg, d, count);
        deg[a] -= 1;
        deg[b] -= 1;
    }
}

/// Every multigraph on `1..=n` with `m` edges and all degrees in `D`,
/// as multisets of pair slots (combinations with repetition).
pub fn multigraphs(d: &DegreeSet, n: usize, m: usize, limit: &EnumerationLimit) -> Result<Vec<Multigraph>, OracleError> {
    let slots: Vec<(usize, usize)> = (1..=n).flat_map(|a| (a..=n).map(move |b| (a, b))).collect();
    let s = slots.len() as u128;
    let candidates = if s == 0 { u128::from(m == 0) } else { choose(s + m as u128 - 1, m as u128) };
    limit.check(n, m, candidates)?;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(m);
    multisets(&slots, 0, m, &mut chosen, &mut |edges| {
        let g = Multigraph::from_edges(n, edges.iter().copied()).expect("slots are in range");
        if g.degrees().iter().all(|&k| d.contains(k)) {
            out.push(g);
        }
    });
    Ok(out)
}

fn multisets<F: FnMut(&[(usize, usize)])>(
    slots: &[(usize, usize)],
    start: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if left == 0 {
        visit(chosen);
        return;
    }
    for idx in start..slots.len() {
        chosen.push(slots[idx]);
        multisets(slots, idx, left - 1, chosen, visit);
        chosen.pop();
    }
}

/// `kappa(G)` from its definition: distinct edge orderings of `G`, that is
/// `m! / prod mult!` arrangements times `2` per non-loop occurrence,
/// divided by `2^m m!`.
pub fn kappa(g: &Multigraph) -> BigRational {
    let m = g.edge_count();
    let mut arrangements = factorial(m);
    let mut orientations = 0usize;
    for ((a, b), mult) in g.edges() {
        arrangements /= factorial(mult);
        if a != b {
            orientations += mult;
        }
    }
    ratio(arrangements << orientations, (BigUint::one() << m) * factorial(m))
}

/// `sum kappa(G)` over `MG^(D)_{n,m}`.
pub fn multigraph_weight_brute(d: &DegreeSet, n: usize, m: usize, limit: &EnumerationLimit) -> Result<BigRational, OracleError> {
    Ok(multigraphs(d, n, m, limit)?.iter().map(kappa).sum())
}

/// Number of sequences of `m` ordered vertex pairs whose multiset of
/// unordered pairs is the edge multiset of `G`, by scanning all of
/// `(V x V)^m`.
pub fn count_orderings(g: &Multigraph, limit: &EnumerationLimit) -> Result<BigUint, OracleError> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let cells = (n * n) as u128;
    limit.check(n, m, cells.saturating_pow(m as u32))?;
    let target: BTreeMap<(usize, usize), usize> = g.edges().collect();
    let mut count = 0u64;
    let mut seq = vec![0usize; m];
    loop {
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &c in &seq {
            let (a, b) = (c / n + 1, c % n + 1);
            *seen.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        if seen == target {
            count += 1;
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(BigUint::from(count));
            }
            seq[pos] += 1;
            if seq[pos] < n * n {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
    }
}

/// A marking: vertex-disjoint single loops and double edges taken out of
/// the edge multiset of a multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub loops: Vec<usize>,
    pub doubles: Vec<(usize, usize)>,
}

/// All markings of `g`. A loop can be marked if `g` has a loop there; a
/// double edge can be marked on any pair of multiplicity at least two.
/// Marked items must not share vertices.
pub fn markings(g: &Multigraph) -> Vec<Marking> {
    #[derive(Clone, Copy)]
    enum Item {
        Loop(usize),
        Double(usize, usize),
    }
    let items: Vec<Item> = g
        .edges()
        .filter_map(|((a, b), mult)| match (a == b, mult >= 2) {
            (true, _) => Some(Item::Loop(a)),
            (false, true) => Some(Item::Double(a, b)),
            (false, false) => None,
        })
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; g.vertex_count() + 1];
    fn walk(items: &[Item], idx: usize, used: &mut Vec<bool>, cur: &mut Marking, out: &mut Vec<Marking>) {
        if idx == items.len() {
            out.push(cur.clone());
            return;
        }
        walk(items, idx + 1, used, cur, out);
        match items[idx] {
            Item::Loop(w) if !used[w] => {
                used[w] = true;
                cur.loops.push(w);
                walk(items, idx + 1, used, cur, out);
                cur.loops.pop();
                used[w] = false;
            }
            Item::Double(a, b) if !used[a] && !used[b] => {
                used[a] = true;
                used[b] = true;
                cur.doubles.push((a, b));
                walk(items, idx + 1, used, cur, out);
                cur.doubles.pop();
                used[a] = false;
                used[b] = false;
            }
            _ => {}
        }
    }
    walk(&items, 0, &mut used, &mut Marking { loops: vec![], doubles: vec![] }, &mut out);
    out
}

/// Marked multiplicities per pair: `(unmarked, marked)`.
fn split(g: &Multigraph, marking: &Marking) -> BTreeMap<(usize, usize), (usize, usize)> {
    let mut map: BTreeMap<(usize, usize), (usize, usize)> = g.edges().map(|(e, mult)| (e, (mult, 0))).collect();
    for &w in &marking.loops {
        let entry = map.get_mut(&(w, w)).expect("marked loop exists");
        entry.0 -= 1;
        entry.1 += 1;
    }
    for &e in &marking.doubles {
        let entry = map.get_mut(&e).expect("marked pair exists");
        entry.0 -= 2;
        entry.1 += 2;
    }
    map
}

/// Compensation factor of a marked multigraph: marked and unmarked copies of
/// a pair are distinguishable, so orderings divide by both factorials.
pub fn marked_kappa(g: &Multigraph, marking: &Marking) -> BigRational {
    let m = g.edge_count();
    let mut arrangements = factorial(m);
    let mut orientations = 0usize;
    for ((a, b), (plain, marked)) in split(g, marking) {
        arrangements /= factorial(plain) * factorial(marked);
        if a != b {
            orientations += plain + marked;
        }
    }
    ratio(arrangements << orientations, (BigUint::one() << m) * factorial(m))
}

/// Distinct sequences of `(ordered pair, mark bit)` realising the marked
/// multigraph, by permuting and orienting its `m` labelled occurrences.
pub fn count_marked_orderings(g: &Multigraph, marking: &Marking, limit: &EnumerationLimit) -> Result<BigUint, OracleError> {
    let m = g.edge_count();
    let mut occurrences: Vec<(usize, usize, bool)> = Vec::with_capacity(m);
    for ((a, b), (plain, marked)) in split(g, marking) {
        occurrences.extend(std::iter::repeat_n((a, b, false), plain));
        occurrences.extend(std::iter::repeat_n((a, b, true), marked));
    }
    let total = (1u128..=m as u128).product::<u128>() << m;
    limit.check(g.vertex_count(), m, total)?;
    let mut seen = std::collections::HashSet::new();
    let mut perm: Vec<usize> = (0..m).collect();
    permutations(&mut perm, 0, &mut |p| {
        for mask in 0u32..(1 << m) {
            let seq: Vec<(usize, usize, bool)> = p
                .iter()
                .enumerate()
                .map(|(pos, &k)| {
                    let (a, b, mark) = occurrences[k];
                    if mask >> pos & 1 == 1 { (b, a, mark) } else { (a, b, mark) }
                })
                .collect();
            seen.insert(seq);
        }
    });
    Ok(BigUint::from(seen.len()))
}

fn permutations<F: FnMut(&[usize])>(p: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

fn power(base: &BigRational, exp: usize) -> BigRational {
    (0..exp).fold(BigRational::one(), |acc, _| acc * base)
}

/// Marked sums split by the class of the underlying multigraph.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSplit {
    /// Simple graphs and those whose defects are separated loops and double edges.
    pub star: BigRational,
    pub nonstar: BigRational,
}

impl MarkedSplit {
    pub fn total(&self) -> BigRational {
        &self.star + &self.nonstar
    }
}

/// `sum kappa(G, marking) u^{#doubles} v^{#loops}` over all marked
/// multigraphs with degrees in `D`.
pub fn marked_weight_split(
    d: &DegreeSet,
    n: usize,
    m: usize,
    u: &BigRational,
    v: &BigRational,
    limit: &EnumerationLimit,
) -> Result<MarkedSplit, OracleError> {
    let mut star = BigRational::zero();
    let mut nonstar = BigRational::zero();
    for g in multigraphs(d, n, m, limit)? {
        let mut acc = BigRational::zero();
        for mk in markings(&g) {
            acc += marked_kappa(&g, &mk) * power(u, mk.doubles.len()) * power(v, mk.loops.len());
        }
        match g.classify() {
            GraphClass::NonStar => nonstar += acc,
            _ => star += acc,
        }
    }
    Ok(MarkedSplit { star, nonstar })
}

pub fn marked_weight_brute(
    d: &DegreeSet,
    n: usize,
    m: usize,
    u: &BigRational,
    v: &BigRational,
    limit: &EnumerationLimit,
) -> Result<BigRational, OracleError> {
    Ok(marked_weight_split(d, n, m, u, v, limit)?.total())
}

/// Second classification from the forbidden local patterns: a repeated
/// loop, an edge of multiplicity three or more, a loop touching a double
/// edge, or two double edges sharing a vertex.
pub fn is_nonstar_by_patterns(g: &Multigraph) -> bool {
    let edges: Vec<((usize, usize), usize)> = g.edges().collect();
    let heavy_loop = edges.iter().any(|&((a, b), k)| a == b && k >= 2);
    let triple = edges.iter().any(|&((a, b), k)| a != b && k >= 3);
    let doubles: Vec<(usize, usize)> = edges.iter().filter(|&&((a, b), k)| a != b && k == 2).map(|&(e, _)| e).collect();
    let loop_on_double = doubles.iter().any(|&(a, b)| g.multiplicity(a, a) > 0 || g.multiplicity(b, b) > 0);
    let touching_doubles = doubles.iter().enumerate().any(|(i, &(a, b))| {
        doubles[i + 1..].iter().any(|&(c, e)| a == c || a == e || b == c || b == e)
    });
    heavy_loop || triple || loop_on_double || touching_doubles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(text: &str) -> DegreeSet {
        DegreeSet::parse(text).unwrap()
    }

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn g(n: usize, edges: &[(usize, usize)]) -> Multigraph {
        Multigraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn simple_counts() {
        let lim = EnumerationLimit::default();
        assert_eq!(count_simple_graphs(&DegreeSet::MinDegree(0), 5, 4, &lim).unwrap(), BigUint::from(210u32));
        assert_eq!(count_simple_graphs(&set("2"), 3, 3, &lim).unwrap(), BigUint::from(1u32));
        assert_eq!(count_simple_graphs(&DegreeSet::Even, 3, 2, &lim).unwrap(), BigUint::zero());
        assert!(count_simple_graphs(&DegreeSet::MinDegree(0), 11, 3, &lim).is_err());
    }

    #[test]
    fn multigraph_weights() {
        let lim = EnumerationLimit::default();
        assert_eq!(multigraph_weight_brute(&DegreeSet::MinDegree(0), 2, 1, &lim).unwrap(), q(2, 1));
        assert_eq!(multigraph_weight_brute(&set("2"), 1, 1, &lim).unwrap(), q(1, 2));
        assert_eq!(multigraph_weight_brute(&DegreeSet::MinDegree(0), 0, 0, &lim).unwrap(), q(1, 1));
    }

    #[test]
    fn orderings_examples() {
        let lim = EnumerationLimit::default();
        assert_eq!(count_orderings(&g(2, &[(1, 1), (1, 2), (1, 2)]), &lim).unwrap(), BigUint::from(12u32));
        assert_eq!(count_orderings(&g(2, &[(1, 2), (1, 2), (1, 2)]), &lim).unwrap(), BigUint::from(8u32));
        assert_eq!(count_orderings(&g(4, &[(1, 2), (3, 4), (2, 3)]), &lim).unwrap(), BigUint::from(48u32));
    }

    #[test]
    fn marked_kappa_examples() {
        let lim = EnumerationLimit::default();
        // two of three parallel edges marked
        let h = g(2, &[(1, 2), (1, 2), (1, 2)]);
        let mk = Marking { loops: vec![], doubles: vec![(1, 2)] };
        assert_eq!(marked_kappa(&h, &mk), q(1, 2));
        assert_eq!(count_marked_orderings(&h, &mk, &lim).unwrap(), BigUint::from(24u32));
        // loop marked while an unmarked copy remains
        let h = g(1, &[(1, 1), (1, 1)]);
        let mk = Marking { loops: vec![1], doubles: vec![] };
        assert_eq!(marked_kappa(&h, &mk), q(1, 4));
    }

    #[test]
    fn marking_enumeration() {
        let h = g(3, &[(1, 1), (1, 2), (1, 2), (3, 3)]);
        // items: loop 1, double 12, loop 3; loop 1 and double 12 clash
        assert_eq!(markings(&h).len(), 6);
        assert_eq!(markings(&g(3, &[(1, 2), (2, 3)])).len(), 1);
    }

    #[test]
    fn single_loop_marked_sum() {
        let lim = EnumerationLimit::default();
        let v = q(7, 3);
        let got = marked_weight_brute(&set("2"), 1, 1, &q(0, 1), &v, &lim).unwrap();
        assert_eq!(got, q(1, 2) + &v / q(2, 1));
        assert_eq!(marked_weight_brute(&set("2"), 1, 1, &q(0, 1), &q(-1, 1), &lim).unwrap(), q(0, 1));
    }

    #[test]
    fn pattern_classification_examples() {
        assert!(is_nonstar_by_patterns(&g(1, &[(1, 1), (1, 1)])));
        assert!(is_nonstar_by_patterns(&g(2, &[(1, 2), (1, 2), (1, 2)])));
        assert!(is_nonstar_by_patterns(&g(2, &[(1, 1), (1, 2), (1, 2)])));
        assert!(is_nonstar_by_patterns(&g(3, &[(1, 2), (1, 2), (1, 3), (1, 3)])));
        assert!(!is_nonstar_by_patterns(&g(3, &[(1, 2), (1, 2), (3, 3)])));
    }
}
