//! Equitable and weighted (pseudo-equitable) partitions and their quotients.
//!
//! A partition with diagonal vertex weights `D` is weighted-equitable when,
//! for every ordered block pair `(i, j)`, the quantity
//! `Σ_{y ∈ j} w(x, y) · D_yy / D_xx` is the same for all `x ∈ i`. This is
//! exactly the condition for the column space of `D P` to be `A`-invariant,
//! `P` the characteristic matrix. Normalizing the columns of `D P` gives `S`
//! and the quotient `B = Sᵀ A S` with `A S = S B`, so `exp(itA) S = S exp(itB)`
//! and transfer between singleton blocks lifts from `B` to the graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, Weight};
use crate::spectra::{decompose, SpectralDecomposition};
use crate::transfer::{self, PstResult, TRANSFER_TOL};
use crate::walk;

/// `‖AS − SB‖_F` at or below which the column space counts as invariant.
pub const INVARIANCE_TOL: f64 = 1e-9;
pub const DEGREE_TOL: f64 = 1e-9;

/// Blocks `(i, j)`, vertices `(x, y)` of block `i`, and their degrees into `j`.
type Mismatch = (usize, usize, usize, usize, f64, f64);

/// Disjoint blocks covering the vertex set, with positive vertex weights
/// (the diagonal of `D`).
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    weights: Vec<Weight>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_weights(n, blocks, vec![Weight::ONE; n])
    }

    pub fn with_weights(n: usize, mut blocks: Vec<Vec<usize>>, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::InvalidPartition(format!(
                "{} weights for {n} vertices",
                weights.len()
            )));
        }
        if let Some(x) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidPartition(format!("vertex {x} has non-positive weight")));
        }
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("vertex {x} out of range 0..{n}")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPartition(format!("vertex {x} appears twice")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("vertex {x} is not covered")));
        }
        Ok(Partition { blocks, weights })
    }

    /// All vertices in one block.
    pub fn unit(n: usize) -> Self {
        Partition {
            blocks: vec![(0..n).collect()],
            weights: vec![Weight::ONE; n],
        }
    }

    /// Every vertex in its own block.
    pub fn discrete(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|x| vec![x]).collect(),
            weights: vec![Weight::ONE; n],
        }
    }

    /// Distance classes from `a`; unreachable vertices form a final block.
    pub fn distance(g: &Graph, a: VertexId) -> Result<Self> {
        g.vertex(a.0)?;
        let dist = g.distances_from(a.0);
        let mut layers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (x, d) in dist.iter().enumerate() {
            layers.entry(d.unwrap_or(usize::MAX)).or_default().push(x);
        }
        Partition::new(g.n(), layers.into_values().collect())
    }

    /// Replaces the weight of vertex `x`.
    pub fn set_weight(mut self, x: usize, w: Weight) -> Result<Self> {
        if x >= self.weights.len() || !w.is_positive() {
            return Err(Error::InvalidPartition(format!("bad weight {w} for vertex {x}")));
        }
        self.weights[x] = w;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of every vertex.
    pub fn block_of(&self) -> Vec<usize> {
        let mut of = vec![0; self.n()];
        for (i, block) in self.blocks.iter().enumerate() {
            for &x in block {
                of[x] = i;
            }
        }
        of
    }

    /// Blocks as sets, ignoring block order.
    pub fn canonical_blocks(&self) -> Vec<Vec<usize>> {
        let mut b = self.blocks.clone();
        b.sort();
        b
    }

    /// Parses the partition file format: one block per line as
    /// space-separated vertices, plus optional `weights:` lines of `v=w`
    /// pairs. `#` starts a comment.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut weights = vec![Weight::ONE; n];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("weights:") {
                for pair in rest.split_whitespace() {
                    let (v, w) = pair
                        .split_once('=')
                        .ok_or_else(|| err(format!("expected `v=w`, found `{pair}`")))?;
                    let v: usize = v.parse().map_err(|_| err(format!("bad vertex `{v}`")))?;
                    if v >= n {
                        return Err(err(format!("vertex {v} out of range 0..{n}")));
                    }
                    weights[v] = w.parse().map_err(|e: Error| err(e.to_string()))?;
                }
                continue;
            }
            let block = line
                .split_whitespace()
                .map(|s| s.parse::<usize>().map_err(|_| err(format!("bad vertex `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        Partition::with_weights(n, blocks, weights)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            let cells: Vec<String> = block.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        let custom: Vec<String> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_one())
            .map(|(x, w)| format!("{x}={w}"))
            .collect();
        if !custom.is_empty() {
            writeln!(out, "weights: {}", custom.join(" ")).unwrap();
        }
        out
    }
}

/// `deg[x][j] = Σ_{y ∈ j} w(x, y) · D_yy / D_xx`, exactly if all inputs are rational.
fn exact_degrees(g: &Graph, p: &Partition) -> Option<Vec<Vec<Rational64>>> {
    let of = p.block_of();
    let weights: Option<Vec<Rational64>> = p.weights().iter().map(Weight::exact).collect();
    let weights = weights?;
    let mut deg = vec![vec![Rational64::from_integer(0); p.len()]; g.n()];
    for x in 0..g.n() {
        for &(y, w) in g.neighbors(x) {
            deg[x][of[y]] += w.exact()? * weights[y] / weights[x];
        }
    }
    Some(deg)
}

fn real_degrees(g: &Graph, p: &Partition) -> Vec<Vec<f64>> {
    let of = p.block_of();
    let mut deg = vec![vec![0.0; p.len()]; g.n()];
    for (x, row) in deg.iter_mut().enumerate() {
        for &(y, w) in g.neighbors(x) {
            row[of[y]] += w.value() * p.weights()[y].value() / p.weights()[x].value();
        }
    }
    deg
}

/// Weighted out-degree matrix `deg[i][j]` of an equitable partition, or
/// `None` when the partition is not equitable.
pub fn out_degree_matrix(g: &Graph, p: &Partition) -> Result<Option<DMatrix<f64>>> {
    if !is_equitable(g, p)?.equitable {
        return Ok(None);
    }
    let deg = real_degrees(g, p);
    Ok(Some(DMatrix::from_fn(p.len(), p.len(), |i, j| deg[p.blocks()[i][0]][j])))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquitableWitness {
    pub block_i: usize,
    pub block_j: usize,
    pub x: usize,
    pub y: usize,
    pub degree_x: f64,
    pub degree_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquitableCheck {
    pub equitable: bool,
    /// Whether the check used exact rational arithmetic.
    pub exact: bool,
    pub witness: Option<EquitableWitness>,
}

pub fn is_equitable(g: &Graph, p: &Partition) -> Result<EquitableCheck> {
    if p.n() != g.n() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} vertices, graph has {}",
            p.n(),
            g.n()
        )));
    }
    let to_f64 = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
    let (exact, mismatch): (bool, Option<Mismatch>) =
        match exact_degrees(g, p) {
            Some(deg) => (true, first_mismatch(p, |x, j| deg[x][j], |a, b| a == b)
                .map(|(i, j, x, y)| (i, j, x, y, to_f64(&deg[x][j]), to_f64(&deg[y][j])))),
            None => {
                let deg = real_degrees(g, p);
                let same = |a: f64, b: f64| (a - b).abs() <= DEGREE_TOL * (1.0 + a.abs().max(b.abs()));
                (false, first_mismatch(p, |x, j| deg[x][j], same)
                    .map(|(i, j, x, y)| (i, j, x, y, deg[x][j], deg[y][j])))
            }
        };
    Ok(EquitableCheck {
        equitable: mismatch.is_none(),
        exact,
        witness: mismatch.map(|(block_i, block_j, x, y, degree_x, degree_y)| EquitableWitness {
            block_i,
            block_j,
            x,
            y,
            degree_x,
            degree_y,
        }),
    })
}

fn first_mismatch<T, D, E>(p: &Partition, deg: D, same: E) -> Option<(usize, usize, usize, usize)>
where
    D: Fn(usize, usize) -> T,
    E: Fn(T, T) -> bool,
{
    for (i, block) in p.blocks().iter().enumerate() {
        let x = block[0];
        for &y in &block[1..] {
            for j in 0..p.len() {
                if !same(deg(x, j), deg(y, j)) {
                    return Some((i, j, x, y));
                }
            }
        }
    }
    None
}

/// Signature key: reduced rationals when exact, otherwise degrees quantized
/// to the comparison tolerance.
fn signatures(g: &Graph, p: &Partition) -> Vec<Vec<(i64, i64)>> {
    match exact_degrees(g, p) {
        Some(deg) => deg
            .into_iter()
            .map(|row| row.into_iter().map(|r| (*r.numer(), *r.denom())).collect())
            .collect(),
        None => real_degrees(g, p)
            .into_iter()
            .map(|row| row.into_iter().map(|x| ((x / DEGREE_TOL).round() as i64, 0)).collect())
            .collect(),
    }
}

/// Coarsest equitable partition refining `seed`, by iterated colour
/// refinement on weighted out-degrees into the current blocks. Vertex
/// weights of the seed are kept. Blocks are split in place, sub-blocks
/// ordered by their smallest vertex.
pub fn coarsest_equitable(g: &Graph, seed: &Partition) -> Result<Partition> {
    if seed.n() != g.n() {
        return Err(Error::InvalidPartition("seed does not match graph size".into()));
    }
    let mut current = seed.clone();
    loop {
        let sig = signatures(g, &current);
        let mut blocks = Vec::with_capacity(current.len());
        for block in current.blocks() {
            let mut groups: BTreeMap<&[(i64, i64)], Vec<usize>> = BTreeMap::new();
            for &x in block {
                groups.entry(&sig[x]).or_default().push(x);
            }
            let mut parts: Vec<Vec<usize>> = groups.into_values().collect();
            parts.sort_by_key(|b| b[0]);
            blocks.extend(parts);
        }
        if blocks.len() == current.len() {
            return Ok(current);
        }
        current = Partition {
            blocks,
            weights: current.weights.clone(),
        };
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientResult {
    #[serde(serialize_with = "crate::ser::matrix")]
    pub b: DMatrix<f64>,
    #[serde(serialize_with = "crate::ser::matrix")]
    pub s: DMatrix<f64>,
    /// `‖AS − SB‖_F`
    pub residual: f64,
}

impl QuotientResult {
    pub fn is_invariant(&self) -> bool {
        self.residual <= INVARIANCE_TOL
    }
}

/// `S` = column-normalized `D P`, `B = Sᵀ A S`.
pub fn quotient(g: &Graph, p: &Partition) -> Result<QuotientResult> {
    if p.n() != g.n() {
        return Err(Error::InvalidPartition("partition does not match graph size".into()));
    }
    let mut s = DMatrix::<f64>::zeros(g.n(), p.len());
    for (j, block) in p.blocks().iter().enumerate() {
        for &x in block {
            s[(x, j)] = p.weights()[x].value();
        }
        let norm = s.column(j).norm();
        if norm == 0.0 {
            return Err(Error::ZeroWeightColumn(j));
        }
        s.column_mut(j).unscale_mut(norm);
    }
    let a = g.adjacency_matrix();
    let as_ = &a * &s;
    let b = s.transpose() * &as_;
    let b = (&b + b.transpose()) * 0.5;
    let residual = (as_ - &s * &b).norm();
    Ok(QuotientResult { b, s, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftResult {
    /// Transfer between the two blocks in the quotient.
    pub quotient: PstResult,
    /// The lifted statement for the graph vertices.
    pub result: PstResult,
    pub residual: f64,
    /// `|U_G(t)_{uv}|` evaluated directly in the graph.
    pub direct_fidelity: Option<f64>,
}

/// Transfers perfect state transfer between singleton blocks `i`, `j` of
/// the quotient to their vertices in `g`, and confirms it directly in `g`.
pub fn lift_pst(g: &Graph, p: &Partition, i: usize, j: usize) -> Result<LiftResult> {
    let endpoint = |k: usize| -> Result<VertexId> {
        let block = p
            .blocks()
            .get(k)
            .ok_or_else(|| Error::InvalidArgument(format!("no block {k}")))?;
        match block.as_slice() {
            [x] if p.weights()[*x].is_one() => Ok(VertexId(*x)),
            [x] => Err(Error::InvalidPartition(format!(
                "endpoint vertex {x} has weight {} instead of 1",
                p.weights()[*x]
            ))),
            _ => Err(Error::InvalidPartition(format!("block {k} is not a singleton"))),
        }
    };
    let (u, v) = (endpoint(i)?, endpoint(j)?);
    let q = quotient(g, p)?;
    if !q.is_invariant() {
        return Err(Error::HypothesisNotMet(format!(
            "‖AS − SB‖ = {:.3e} exceeds {INVARIANCE_TOL:e}; column space is not A-invariant",
            q.residual
        )));
    }
    let sb = SpectralDecomposition::from_symmetric(q.b.clone(), None)?;
    let quotient_result = transfer::detect_pst(&sb, VertexId(i), VertexId(j))?;
    let mut result = quotient_result.clone();
    result.u = u;
    result.v = v;
    let mut direct_fidelity = None;
    if let Some(t) = quotient_result.time.filter(|_| quotient_result.occurs) {
        let sg = decompose(g)?;
        let f = walk::fidelity(&sg, u, v, t)?;
        if f < 1.0 - TRANSFER_TOL {
            return Err(Error::Consistency(format!(
                "quotient transfer at t = {t} lifts to fidelity {f} in the graph"
            )));
        }
        direct_fidelity = Some(f);
        result.fidelity = Some(f);
        result.reason = format!("lifted from quotient blocks ({i}, {j}): {}", quotient_result.reason);
    }
    Ok(LiftResult {
        quotient: quotient_result,
        result,
        residual: q.residual,
        direct_fidelity,
    })
}
