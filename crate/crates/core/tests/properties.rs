mod common;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qwalk::avgmix::{average_mixing, cp_factorize, distribution_average, DistributionSpec};
use qwalk::graph::{cartesian_product, parse_edge_list, write_edge_list};
use qwalk::quotient::{coarsest_equitable, is_equitable, quotient, Partition};
use qwalk::spectra::SpectralDecomposition;
use qwalk::transfer::detect_pst;
use qwalk::walk::{mixing, transition};
use qwalk::{decompose, Graph, VertexId, Weight};

use common::{max_abs_diff, transition_oracle};

fn graph_strategy(min: usize, max: usize) -> impl Strategy<Value = Graph> {
    (min..=max).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::unweighted(n, edges).unwrap()
        })
    })
}

fn weighted_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=6).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(proptest::option::of(1i64..=5), pairs).prop_map(move |ws| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if let Some(w) = ws[k] {
                        edges.push((u, v, Weight::integer(w)));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walk_is_unitary_and_mixing_doubly_stochastic(g in graph_strategy(1, 9), t in -20.0f64..20.0) {
        let s = decompose(&g).unwrap();
        let u = transition(&s, t);
        prop_assert!(u.unitarity_defect() <= 1e-10);
        prop_assert!(u.symmetry_defect() <= 1e-10);
        let m = mixing(&s, t);
        prop_assert!(m.stochastic_defect() <= 1e-10);
        prop_assert!(m.m.iter().all(|&x| x >= -1e-15));
    }

    #[test]
    fn transition_matches_series_oracle(g in weighted_strategy(), t in -6.0f64..6.0) {
        let s = decompose(&g).unwrap();
        let u = transition(&s, t).u;
        prop_assert!(max_abs_diff(&u, &transition_oracle(&g.adjacency_matrix(), t)) <= 1e-8);
    }

    #[test]
    fn idempotents_form_a_resolution(g in weighted_strategy()) {
        let s = decompose(&g).unwrap();
        let r = s.algebra_residuals();
        prop_assert!(r.resolution <= 1e-9);
        prop_assert!(r.orthogonality <= 1e-9);
        prop_assert!(r.reconstruction <= 1e-9);
        let total: usize = s.multiplicities().iter().sum();
        prop_assert_eq!(total, g.n());
    }

    #[test]
    fn product_walk_is_kronecker(g in graph_strategy(1, 4), h in graph_strategy(1, 4), t in 0.0f64..5.0) {
        let gh = cartesian_product(&g, &h);
        let (sg, sh, sgh) = (decompose(&g).unwrap(), decompose(&h).unwrap(), decompose(&gh).unwrap());
        let expected = kron(&transition(&sg, t).u, &transition(&sh, t).u);
        prop_assert!(max_abs_diff(&transition(&sgh, t).u, &expected) <= 1e-8);
    }

    #[test]
    fn product_spectrum_is_sumset(g in graph_strategy(1, 4), h in graph_strategy(1, 4)) {
        let gh = cartesian_product(&g, &h);
        let (sg, sh, sgh) = (decompose(&g).unwrap(), decompose(&h).unwrap(), decompose(&gh).unwrap());
        let mut sums: Vec<f64> = sg.eigenvalues().iter()
            .flat_map(|a| sh.eigenvalues().iter().map(move |b| a + b))
            .collect();
        sums.sort_by(|a, b| b.total_cmp(a));
        sums.dedup_by(|a, b| (*a - *b).abs() <= 1e-7);
        let got = sgh.eigenvalues();
        prop_assert_eq!(got.len(), sums.len());
        for (x, y) in got.iter().zip(&sums) {
            prop_assert!((x - y).abs() <= 1e-7);
        }
    }

    #[test]
    fn equitable_quotient_intertwines_walks(g in graph_strategy(2, 9), t in -5.0f64..5.0) {
        let p = coarsest_equitable(&g, &Partition::unit(g.n())).unwrap();
        let q = quotient(&g, &p).unwrap();
        prop_assert!(q.residual <= 1e-9);
        let sb = SpectralDecomposition::from_symmetric(q.b.clone(), None).unwrap();
        let s = q.s.map(|x| Complex64::new(x, 0.0));
        let left = transition(&decompose(&g).unwrap(), t).u * &s;
        let right = &s * transition(&sb, t).u;
        prop_assert!(max_abs_diff(&left, &right) <= 1e-8);
    }

    #[test]
    fn coarsest_partition_cannot_merge(g in graph_strategy(2, 12)) {
        let p = coarsest_equitable(&g, &Partition::unit(g.n())).unwrap();
        prop_assert!(is_equitable(&g, &p).unwrap().equitable);
        let blocks = p.canonical_blocks();
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                let mut merged: Vec<Vec<usize>> = blocks.iter().enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, b)| b.clone())
                    .collect();
                merged.push(blocks[i].iter().chain(&blocks[j]).copied().collect());
                let coarser = Partition::new(g.n(), merged).unwrap();
                prop_assert!(!is_equitable(&g, &coarser).unwrap().equitable);
            }
        }
    }

    #[test]
    fn coarsest_partition_is_coarsest(g in graph_strategy(2, 7)) {
        let n = g.n();
        let p = coarsest_equitable(&g, &Partition::unit(n)).unwrap();
        let block_of = p.block_of();
        for labels in set_partitions(n) {
            let q = from_labels(n, &labels);
            if is_equitable(&g, &q).unwrap().equitable {
                // q must refine p: equal q-labels imply equal p-blocks.
                for x in 0..n {
                    for y in 0..n {
                        if labels[x] == labels[y] {
                            prop_assert_eq!(block_of[x], block_of[y]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reported_transfer_is_real(g in graph_strategy(2, 7), u in 0usize..7, v in 0usize..7) {
        let n = g.n();
        let (u, v) = (u % n, v % n);
        prop_assume!(u != v);
        let s = decompose(&g).unwrap();
        let r = detect_pst(&s, VertexId(u), VertexId(v)).unwrap();
        if r.occurs {
            let t = r.time.unwrap();
            let oracle = transition_oracle(&g.adjacency_matrix(), t);
            prop_assert!(oracle[(v, u)].norm() >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn average_mixing_is_doubly_stochastic_psd(g in graph_strategy(1, 9)) {
        let a = average_mixing(&decompose(&g).unwrap());
        prop_assert!(a.symmetry_defect <= 1e-12);
        prop_assert!(a.stochastic_defect <= 1e-10);
        prop_assert!(a.psd_certified);
        prop_assert!(a.min_entry >= -1e-12);
        if g.n() >= 3 && decompose(&g).unwrap().is_simple() {
            prop_assert!(a.rank < g.n());
        }
    }

    #[test]
    fn cp_factorization_when_simple(g in graph_strategy(2, 8)) {
        let s = decompose(&g).unwrap();
        match cp_factorize(&s) {
            Ok(f) => {
                prop_assert!(s.is_simple());
                prop_assert!(f.residual <= 1e-10);
                prop_assert!(f.vectors.iter().flatten().all(|&x| x >= 0.0));
                prop_assert!(f.nonnegative_rank_bound <= f.cp_rank_bound);
            }
            Err(_) => prop_assert!(!s.is_simple()),
        }
    }

    #[test]
    fn point_distribution_is_mixing(g in graph_strategy(1, 8), tau in -10.0f64..10.0) {
        let s = decompose(&g).unwrap();
        let a = distribution_average(&s, &DistributionSpec::Point { tau }).unwrap();
        prop_assert!((a.matrix - mixing(&s, tau).m).amax() <= 1e-12);
    }

    #[test]
    fn edge_list_round_trip(g in weighted_strategy()) {
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(write_edge_list(&back), text);
        prop_assert_eq!(back.adjacency_matrix(), g.adjacency_matrix());
    }
}

/// All set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for label in 0..=max + 1 {
            cur[k] = label;
            rec(k + 1, max.max(label), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

fn from_labels(n: usize, labels: &[usize]) -> Partition {
    let count = labels.iter().copied().collect::<BTreeSet<_>>().len();
    let mut blocks = vec![Vec::new(); count];
    for (x, &l) in labels.iter().enumerate() {
        blocks[l].push(x);
    }
    Partition::new(n, blocks).unwrap()
}

#[test]
fn set_partition_counts_are_bell_numbers() {
    let bell = [1, 1, 2, 5, 15, 52, 203, 877];
    for (n, &b) in bell.iter().enumerate().skip(1) {
        assert_eq!(set_partitions(n).len(), b);
    }
}
