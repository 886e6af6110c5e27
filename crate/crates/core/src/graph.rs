//! Labelled multigraphs with loops and multiple edges.
//!
//! Vertices are `1..=n`. Edges are stored canonically as sorted pairs
//! `(u, v)` with `u <= v`, mapped to their multiplicity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::numeric::{big_rational, factorial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge list: {0}")]
    Parse(String),
}

/// Position of a multigraph with respect to loops and multiple edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphClass {
    Simple,
    /// Not simple, but every non-simple edge is a single loop or a double
    /// edge and no vertex touches two of them.
    Star,
    NonStar,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    n: usize,
    edges: BTreeMap<(usize, usize), usize>,
    m: usize,
}

impl Multigraph {
    pub fn empty(n: usize) -> Self {
        Multigraph { n, edges: BTreeMap::new(), m: 0 }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Multigraph::empty(n);
        for (u, v) in edges {
            g.check(u)?;
            g.check(v)?;
            *g.edges.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            g.m += 1;
        }
        Ok(g)
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v == 0 || v > self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Distinct edges with their multiplicities, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.edges.iter().map(|(&e, &mult)| (e, mult))
    }

    /// Edges with repetition, in canonical order.
    pub fn edge_sequence(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .flat_map(|(&e, &mult)| std::iter::repeat_n(e, mult))
            .collect()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Occurrences of `v` in the edge multiset; a loop counts twice.
    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self
            .edges
            .iter()
            .map(|(&(a, b), &mult)| mult * ((a == v) as usize + (b == v) as usize))
            .sum())
    }

    /// Degrees of vertices `1..=n`, indexed from zero.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for (&(a, b), &mult) in &self.edges {
            deg[a - 1] += mult;
            deg[b - 1] += mult;
        }
        deg
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|(&(a, b), &mult)| a != b && mult == 1)
    }

    /// Number of orderings: sequences of oriented edges realising the multiset.
    pub fn orderings(&self) -> BigUint {
        let mut count = factorial(self.m);
        let mut denom = BigUint::one();
        let mut oriented = 0usize;
        for (&(a, b), &mult) in &self.edges {
            denom *= factorial(mult);
            if a != b {
                oriented += mult;
            }
        }
        count <<= oriented;
        count / denom
    }

    /// `kappa(G) = orderings(G) / (2^m m!)`, equal to
    /// `1 / (prod_loops 2^mult mult! * prod_other mult!)`.
    pub fn compensation_factor(&self) -> BigRational {
        let mut denom = BigUint::one();
        for (&(a, b), &mult) in &self.edges {
            denom *= factorial(mult);
            if a == b {
                denom <<= mult;
            }
        }
        big_rational(BigUint::one(), denom)
    }

    pub fn classify(&self) -> GraphClass {
        if self.is_simple() {
            return GraphClass::Simple;
        }
        let mut has_loop = vec![false; self.n + 1];
        let mut doubles_at = vec![0usize; self.n + 1];
        for (&(a, b), &mult) in &self.edges {
            if a == b {
                if mult > 1 {
                    return GraphClass::NonStar;
                }
                has_loop[a] = true;
            } else {
                if mult > 2 {
                    return GraphClass::NonStar;
                }
                if mult == 2 {
                    doubles_at[a] += 1;
                    doubles_at[b] += 1;
                }
            }
        }
        let separated = (1..=self.n).all(|v| {
            let touching = doubles_at[v] + has_loop[v] as usize;
            touching <= 1
        });
        if separated {
            GraphClass::Star
        } else {
            GraphClass::NonStar
        }
    }

    /// Header `n m`, then one `u v` line per edge occurrence.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.m).unwrap();
        for (u, v) in self.edge_sequence() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the format written by [`Multigraph::to_edge_list`]. Lines
    /// starting with `#` and blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| GraphError::Parse("missing header".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(GraphError::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Multigraph::from_edges(n, edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        it.next()
            .ok_or_else(|| GraphError::Parse(format!("expected two integers in `{line}`")))?
            .parse()
            .map_err(|_| GraphError::Parse(format!("bad integer in `{line}`")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(GraphError::Parse(format!("trailing tokens in `{line}`")));
    }
    Ok((a, b))
}
