//! Named graph families.
//!
//! Vertex orderings are canonical:
//! - `path(n)`, `cycle(n)`: vertices along the path/cycle, `0..n`.
//! - `hypercube(k)`: vertex index is the bitstring value; `0` and `2^k - 1`
//!   are antipodal.
//! - `hadamard(n)`: rows `r_i^+ = i`, `r_i^- = n + i`, columns
//!   `c_j^+ = 2n + j`, `c_j^- = 3n + j`. `r_i^+` and `r_i^-` are antipodal.
//! - `cartesian_product(G, H)`: `(g, h)` has index `g * |H| + h`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, Weight};

/// A named family member, as written on the command line (`hypercube:4`).
///
/// Products are written with `*`, e.g. `path:3*path:3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Hypercube(usize),
    Hadamard(usize),
    CompressedQ4,
    Product(Vec<Family>),
}

impl Family {
    pub fn build(&self) -> Result<Graph> {
        match self {
            Family::Path(n) => path(*n),
            Family::Cycle(n) => cycle(*n),
            Family::Complete(n) => complete(*n),
            Family::Hypercube(k) => hypercube(*k),
            Family::Hadamard(n) => hadamard(*n),
            Family::CompressedQ4 => Ok(compressed_q4().graph),
            Family::Product(factors) => {
                let mut iter = factors.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::UnsupportedFamily("empty product".into()))?;
                iter.try_fold(first.build()?, |acc, f| Ok(cartesian_product(&acc, &f.build()?)))
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('*') {
            let factors = s.split('*').map(str::parse).collect::<Result<Vec<Family>>>()?;
            return Ok(Family::Product(factors));
        }
        if s == "compressed-q4" {
            return Ok(Family::CompressedQ4);
        }
        let unsupported = || Error::UnsupportedFamily(s.to_string());
        let (name, size) = s.split_once(':').ok_or_else(unsupported)?;
        let size: usize = size.trim().parse().map_err(|_| unsupported())?;
        match name.trim() {
            "path" => Ok(Family::Path(size)),
            "cycle" => Ok(Family::Cycle(size)),
            "complete" => Ok(Family::Complete(size)),
            "hypercube" => Ok(Family::Hypercube(size)),
            "hadamard" => Ok(Family::Hadamard(size)),
            _ => Err(unsupported()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Hypercube(k) => write!(f, "hypercube:{k}"),
            Family::Hadamard(n) => write!(f, "hadamard:{n}"),
            Family::CompressedQ4 => write!(f, "compressed-q4"),
            Family::Product(factors) => {
                let parts: Vec<String> = factors.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

fn require_size(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::UnsupportedFamily(format!("{name}:{n} (size must be at least {min})")))
    } else {
        Ok(())
    }
}

pub fn path(n: usize) -> Result<Graph> {
    require_size("path", n, 1)?;
    Graph::unweighted(n, (1..n).map(|i| (i - 1, i)))
}

pub fn cycle(n: usize) -> Result<Graph> {
    require_size("cycle", n, 3)?;
    Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete(n: usize) -> Result<Graph> {
    require_size("complete", n, 1)?;
    Graph::unweighted(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn hypercube(k: usize) -> Result<Graph> {
    require_size("hypercube", k, 1)?;
    if k > 20 {
        return Err(Error::UnsupportedFamily(format!("hypercube:{k} is too large")));
    }
    let n = 1usize << k;
    Graph::unweighted(
        n,
        (0..n).flat_map(move |u| (0..k).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v)),
    )
}

/// Sylvester Hadamard matrix of order `n`; `n` must be a power of two.
pub fn hadamard_matrix(n: usize) -> Result<Vec<Vec<i8>>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::OrderNotConstructible(n));
    }
    let mut h = vec![vec![1i8]];
    while h.len() < n {
        let m = h.len();
        let mut next = vec![vec![0i8; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    Ok(h)
}

/// The Hadamard graph of a Hadamard matrix of order `n` (on `4n` vertices).
pub fn hadamard(n: usize) -> Result<Graph> {
    let h = hadamard_matrix(n)?;
    let (rp, rm, cp, cm) = (0, n, 2 * n, 3 * n);
    let mut pairs = Vec::with_capacity(2 * n * n);
    for (i, row) in h.iter().enumerate() {
        for (j, &entry) in row.iter().enumerate() {
            if entry > 0 {
                pairs.push((rp + i, cp + j));
                pairs.push((rm + i, cm + j));
            } else {
                pairs.push((rp + i, cm + j));
                pairs.push((rm + i, cp + j));
            }
        }
    }
    let labels = ["r+", "r-", "c+", "c-"]
        .iter()
        .flat_map(|side| {
            let (kind, sign) = side.split_at(1);
            (0..n).map(move |i| format!("{kind}{i}{sign}"))
        })
        .collect();
    Graph::unweighted(4 * n, pairs)?.with_labels(labels)
}

/// Cartesian product: `(g,h) ~ (g',h')` iff one coordinate is equal and the
/// other is adjacent; the edge carries the moved coordinate's weight.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Graph {
    let (ng, nh) = (g.n(), h.n());
    let idx = |a: usize, b: usize| a * nh + b;
    let mut edges = Vec::with_capacity(ng * h.edge_count() + nh * g.edge_count());
    for a in 0..ng {
        for (b1, b2, w) in h.edges() {
            edges.push((idx(a, b1), idx(a, b2), w));
        }
    }
    for (a1, a2, w) in g.edges() {
        for b in 0..nh {
            edges.push((idx(a1, b), idx(a2, b), w));
        }
    }
    Graph::from_edges(ng * nh, edges).expect("product of valid graphs is valid")
}

/// The 13-vertex weighted compression of `Q4` together with its marked
/// vertices.
#[derive(Debug, Clone)]
pub struct CompressedQ4 {
    pub graph: Graph,
    pub a: VertexId,
    pub b: VertexId,
    /// The vertex replacing the third distance layer of `Q4`.
    pub c: VertexId,
}

/// `Q4` with its distance layers (1,4,6,4,1) from `a`, the third layer
/// contracted to a single vertex `c`, and the edge `{c, b}` given weight 2.
///
/// Ordering: `a = 0`, the four weight-one bitstrings `1..=4`, the six
/// weight-two bitstrings `5..=10` (both in increasing bitstring order),
/// `c = 11`, `b = 12`.
pub fn compressed_q4() -> CompressedQ4 {
    let layer = |w: u32| -> Vec<usize> { (0..16usize).filter(|x| x.count_ones() == w).collect() };
    let (l1, l2) = (layer(1), layer(2));
    let (a, c, b) = (0usize, 11usize, 12usize);
    let pos1 = |x: usize| 1 + l1.iter().position(|&y| y == x).unwrap();
    let mut edges = Vec::new();
    for i in 1..=4 {
        edges.push((a, i, Weight::ONE));
    }
    for (k, &x) in l2.iter().enumerate() {
        for bit in 0..4 {
            if x & (1 << bit) != 0 {
                edges.push((pos1(x ^ (1 << bit)), 5 + k, Weight::ONE));
            }
        }
        edges.push((5 + k, c, Weight::ONE));
    }
    edges.push((c, b, Weight::integer(2)));
    let graph = Graph::from_edges(13, edges).expect("construction is valid");
    CompressedQ4 {
        graph,
        a: VertexId(a),
        b: VertexId(b),
        c: VertexId(c),
    }
}
