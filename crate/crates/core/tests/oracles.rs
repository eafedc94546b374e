//! Worked values checked against computations that avoid the library's own
//! spectral machinery: series exponentials, quadrature, brute-force search.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use qwalk::avgmix::{average_mixing, distribution_average, drg_rank_probe, interval_average, DistributionSpec};
use qwalk::graph::{cartesian_product, compressed_q4, complete, cycle, hadamard, hypercube, path};
use qwalk::quotient::{is_equitable, lift_pst, Partition};
use qwalk::scheme::{scheme_from_drg, uniform_mixing_scan, UniformVerdict, UNIFORM_TOL};
use qwalk::transfer::{detect_pst, strong_cospectral};
use qwalk::walk::{fidelity, mixing};
use qwalk::{decompose, Graph, VertexId, Weight};

use common::{isomorphism, max_abs_diff, petersen, trapezoid_average, transition_oracle};

#[test]
fn hadamard_four_is_the_four_cube() {
    let map = isomorphism(&hadamard(4).unwrap(), &hypercube(4).unwrap());
    assert!(map.is_some());
    assert!(isomorphism(&cycle(6).unwrap(), &complete(3).unwrap()).is_none());
}

#[test]
fn petersen_from_edge_list() {
    let g = petersen();
    assert_eq!((g.n(), g.edge_count()), (10, 15));
    let sch = scheme_from_drg(&g).unwrap();
    assert_eq!(sch.d, 2);
    let arr: Vec<(usize, usize, usize)> = sch.intersection.iter().map(|i| (i.c, i.a, i.b)).collect();
    assert_eq!(arr, vec![(0, 0, 3), (1, 0, 2), (1, 2, 0)]);
    let probe = drg_rank_probe(&g).unwrap();
    assert!(probe.is_primitive_drg);
    // Eigenvalues 3, 1, −2 with multiplicities 1, 5, 4.
    let s = decompose(&g).unwrap();
    let ev: Vec<f64> = s.eigenvalues().to_vec();
    assert!((ev[0] - 3.0).abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10 && (ev[2] + 2.0).abs() < 1e-10);
    assert_eq!(s.multiplicities(), &[1, 5, 4]);
}

#[test]
fn compressed_q4_construction() {
    let cq = compressed_q4();
    let g = &cq.graph;
    assert_eq!((g.n(), g.edge_count()), (13, 23));
    let dist = g.distances_from(cq.a.0);
    let mut sizes = [0usize; 5];
    for d in dist {
        sizes[d.unwrap()] += 1;
    }
    assert_eq!(sizes, [1, 4, 6, 1, 1]);
    assert_eq!(g.weighted_degree(cq.c.0), 8.0);
}

#[test]
fn compressed_q4_lift_matches_direct_walk() {
    let cq = compressed_q4();
    let p = Partition::distance(&cq.graph, cq.a)
        .unwrap()
        .set_weight(cq.c.0, Weight::integer(2))
        .unwrap();
    assert!(is_equitable(&cq.graph, &p).unwrap().equitable);
    let lift = lift_pst(&cq.graph, &p, 0, 4).unwrap();
    let t = lift.result.time.unwrap();
    assert!((t - FRAC_PI_2).abs() < 1e-12);
    let u = transition_oracle(&cq.graph.adjacency_matrix(), t);
    assert!((u[(cq.b.0, cq.a.0)].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn small_walk_values() {
    let k3 = decompose(&complete(3).unwrap()).unwrap();
    for t in [0.1, 0.7, 2.0, 5.5] {
        let m = mixing(&k3, t).m;
        let closed = (num_complex::Complex64::from_polar(1.0, 3.0 * t) - 1.0).norm_sqr() / 9.0;
        assert!((m[(0, 1)] - closed).abs() < 1e-12);
        assert!(fidelity(&k3, VertexId(0), VertexId(1), t).unwrap() <= 2.0 / 3.0 + 1e-12);
    }
    let q2 = decompose(&hypercube(2).unwrap()).unwrap();
    let brute = transition_oracle(q2.matrix(), FRAC_PI_2);
    assert!((brute[(3, 0)].norm() - 1.0).abs() < 1e-12);
    assert!((fidelity(&q2, VertexId(0), VertexId(3), FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);

    let p3 = decompose(&path(3).unwrap()).unwrap();
    assert_eq!(p3.eigenvalue_support(VertexId(1)).unwrap(), vec![0, 2]);
    let brute = transition_oracle(p3.matrix(), PI / SQRT_2);
    assert!((brute[(2, 0)].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn cospectrality_examples() {
    let p3 = decompose(&path(3).unwrap()).unwrap();
    let r = strong_cospectral(&p3, VertexId(0), VertexId(2)).unwrap();
    assert!(r.strongly_cospectral);
    assert_eq!(r.signs, vec![Some(1), Some(-1), Some(1)]);
    assert!(!strong_cospectral(&p3, VertexId(0), VertexId(1)).unwrap().cospectral);
    let p4 = decompose(&path(4).unwrap()).unwrap();
    let r = strong_cospectral(&p4, VertexId(0), VertexId(1)).unwrap();
    assert!(!r.cospectral && !r.strongly_cospectral);
}

#[test]
fn four_cycle_antipodes() {
    let c4 = decompose(&cycle(4).unwrap()).unwrap();
    let r = detect_pst(&c4, VertexId(0), VertexId(2)).unwrap();
    assert!(r.occurs);
    assert!((r.time.unwrap() - FRAC_PI_2).abs() < 1e-15);
    let brute = transition_oracle(c4.matrix(), FRAC_PI_2);
    assert!((brute[(2, 0)].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn cartesian_powers_keep_transfer_time() {
    let cases: Vec<(Graph, usize, usize, f64)> = vec![
        (path(2).unwrap(), 0, 1, FRAC_PI_2),
        (path(3).unwrap(), 0, 2, PI / SQRT_2),
        (hypercube(2).unwrap(), 0, 3, FRAC_PI_2),
    ];
    for (g, u, v, t) in cases {
        let (mut power, mut pu, mut pv) = (g.clone(), u, v);
        for _ in 0..2 {
            // Index (x, y) of G^k □ G is x·|G| + y.
            pu = pu * g.n() + u;
            pv = pv * g.n() + v;
            power = cartesian_product(&power, &g);
            let s = decompose(&power).unwrap();
            let r = detect_pst(&s, VertexId(pu), VertexId(pv)).unwrap();
            assert!(r.occurs, "power of {} vertices", power.n());
            assert!((r.time.unwrap() - t).abs() < 1e-10);
            let brute = transition_oracle(&power.adjacency_matrix(), t);
            assert!((brute[(pv, pu)].norm() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn interval_average_matches_quadrature() {
    for g in [path(3).unwrap(), cycle(5).unwrap(), complete(4).unwrap(), hypercube(3).unwrap(), petersen()] {
        let s = decompose(&g).unwrap();
        let closed = interval_average(&s, 5.0).unwrap();
        let quad = trapezoid_average(|t| mixing(&s, t).m, 5.0, 100_000);
        assert!((closed - quad).amax() <= 1e-6);
    }
}

#[test]
fn characteristic_function_averages_match_quadrature() {
    let s = decompose(&path(4).unwrap()).unwrap();
    let (mu, sigma) = (1.3, 0.6);
    let closed = distribution_average(&s, &DistributionSpec::Gaussian { mu, sigma }).unwrap().matrix;
    let (a, b) = (mu - 10.0 * sigma, mu + 10.0 * sigma);
    let density = |t: f64| (-(t - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
    let quad = trapezoid_average(|t| mixing(&s, t + a).m * density(t + a), b - a, 100_000) * (b - a);
    assert!((closed - quad).amax() <= 1e-6);

    let rate = 0.8;
    let closed = distribution_average(&s, &DistributionSpec::Exponential { rate }).unwrap().matrix;
    let end = 40.0 / rate;
    let quad = trapezoid_average(|t| mixing(&s, t).m * (rate * (-rate * t).exp()), end, 100_000) * end;
    assert!((closed - quad).amax() <= 1e-6);

    let closed = distribution_average(&s, &DistributionSpec::Uniform { length: 3.0 }).unwrap().matrix;
    assert!((closed - interval_average(&s, 3.0).unwrap()).amax() <= 1e-15);
}

#[test]
fn long_intervals_approach_the_average() {
    let s = decompose(&hypercube(3).unwrap()).unwrap();
    let hat = average_mixing(&s).matrix;
    let far = (interval_average(&s, 1000.0).unwrap() - &hat).norm();
    let near = (interval_average(&s, 10.0).unwrap() - &hat).norm();
    assert!(far < near && far <= 0.05);
}

#[test]
fn four_cycle_mixes_uniformly() {
    let s = decompose(&cycle(4).unwrap()).unwrap();
    let r = uniform_mixing_scan(&s, 2.0, 1e-3, UNIFORM_TOL).unwrap();
    assert_eq!(r.verdict, UniformVerdict::UniformFound);
    assert!((r.best_t - PI / 4.0).abs() < 1e-9);
}

#[test]
fn transition_agrees_with_series_on_named_graphs() {
    for g in [petersen(), hadamard(4).unwrap(), compressed_q4().graph] {
        let s = decompose(&g).unwrap();
        for t in [0.3, 1.7, 4.2] {
            let u = qwalk::walk::transition(&s, t).u;
            assert!(max_abs_diff(&u, &transition_oracle(&g.adjacency_matrix(), t)) <= 1e-9);
        }
    }
}
