#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qwalk::graph::{
    cartesian_product, complete, compressed_q4, cycle, hadamard, hypercube, parse_edge_list, path,
};
use qwalk::Graph;

pub const PETERSEN: &str = "\
# outer 5-cycle, spokes, inner pentagram
n 10
0 1
1 2
2 3
3 4
4 0
0 5
1 6
2 7
3 8
4 9
5 7
7 9
9 6
6 8
8 5
";

pub fn petersen() -> Graph {
    parse_edge_list(PETERSEN).unwrap()
}

/// Named test graphs used wherever a check runs "across the corpus".
pub fn corpus() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push((format!("path:{n}"), path(n).unwrap()));
    }
    for n in 3..=9 {
        out.push((format!("cycle:{n}"), cycle(n).unwrap()));
    }
    for n in 2..=6 {
        out.push((format!("complete:{n}"), complete(n).unwrap()));
    }
    for k in 1..=4 {
        out.push((format!("hypercube:{k}"), hypercube(k).unwrap()));
    }
    out.push(("hadamard:4".into(), hadamard(4).unwrap()));
    let p3 = path(3).unwrap();
    out.push(("path:3*path:3".into(), cartesian_product(&p3, &p3)));
    out.push(("compressed-q4".into(), compressed_q4().graph));
    out.push(("petersen".into(), petersen()));
    out.push(("star:3".into(), Graph::unweighted(4, [(0, 1), (0, 2), (0, 3)]).unwrap()));
    out.push((
        "paw".into(),
        Graph::unweighted(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap(),
    ));
    out
}

/// `exp(M)` by scaling and squaring with a truncated Taylor series.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm: f64 = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scaled = m / Complex64::new(2f64.powi(s), 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(itA)` computed without any eigendecomposition.
pub fn transition_oracle(a: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    expm(&a.map(|x| Complex64::new(0.0, x * t)))
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Trapezoid rule for `(1/T) ∫₀ᵀ f(t) dt` on `nodes` points.
pub fn trapezoid_average<F: Fn(f64) -> DMatrix<f64>>(f: F, t_end: f64, nodes: usize) -> DMatrix<f64> {
    let h = t_end / (nodes - 1) as f64;
    let mut sum = (f(0.0) + f(t_end)) * 0.5;
    for k in 1..nodes - 1 {
        sum += f(k as f64 * h);
    }
    sum * (h / t_end)
}

/// Backtracking search for an adjacency-preserving bijection.
pub fn isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return None;
    }
    let (ag, ah) = (g.adjacency_matrix(), h.adjacency_matrix());
    let n = g.n();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        k: usize,
        n: usize,
        ag: &DMatrix<f64>,
        ah: &DMatrix<f64>,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] {
                continue;
            }
            if (0..k).all(|j| ag[(k, j)] == ah[(cand, map[j])]) {
                map[k] = cand;
                used[cand] = true;
                if extend(k + 1, n, ag, ah, map, used) {
                    return true;
                }
                used[cand] = false;
            }
        }
        false
    }
    extend(0, n, &ag, &ah, &mut map, &mut used).then_some(map)
}
