//! Association schemes of distance-regular graphs and uniform mixing.
//!
//! For a distance-regular graph of diameter `d` the distance matrices
//! `A_0 … A_d` and the idempotents `E_0 … E_d` of `A_1` span the same
//! algebra, related by the eigenmatrices `A_j = Σ_i P_ij E_i` and
//! `E_j = (1/n) Σ_i Q_ij A_i`. The eigenvalues of the mixing matrix are then
//!
//! ```text
//! λ_ℓ(t) = (1/n²) Σ_{s,r,r'} e^{it(P_r1 − P_r'1)} Q_sr Q_sr' P_ℓs
//! ```
//!
//! and uniform mixing at `t` is `λ = (1, 0, …, 0)`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::search;
use crate::spectra::SpectralDecomposition;

/// Tolerance for the eigenmatrix identities and Bose–Mesner closure.
pub const SCHEME_TOL: f64 = 1e-8;
/// Largest imaginary residue tolerated in the mixing-eigenvalue sums.
pub const IMAGINARY_TOL: f64 = 1e-9;
/// Entrywise deviation from `J/n` accepted as uniform mixing by scans.
pub const UNIFORM_TOL: f64 = 1e-8;
/// Distance to a root of unity accepted by the probe.
pub const ROOT_TOL: f64 = 1e-9;

/// Intersection numbers `(c_i, a_i, b_i)` for `i = 0..=d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Intersection {
    pub c: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone)]
pub struct SchemeData {
    pub n: usize,
    pub d: usize,
    /// `A_0 … A_d`
    pub distance_matrices: Vec<DMatrix<f64>>,
    /// `E_0 … E_d`, ordered by decreasing eigenvalue of `A_1`.
    pub idempotents: Vec<DMatrix<f64>>,
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub intersection: Vec<Intersection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeSummary {
    pub n: usize,
    pub d: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<f64>,
    pub valencies: Vec<f64>,
    pub intersection: Vec<Intersection>,
    #[serde(serialize_with = "crate::ser::matrix")]
    pub p: DMatrix<f64>,
    #[serde(serialize_with = "crate::ser::matrix")]
    pub q: DMatrix<f64>,
    pub pq_residual: f64,
    pub primitive: bool,
    pub tolerance: f64,
}

/// Builds the association scheme of a connected unweighted graph, rejecting
/// it if it is not distance-regular.
pub fn scheme_from_drg(g: &Graph) -> Result<SchemeData> {
    if !g.is_unweighted() {
        return Err(Error::NotApplicable("scheme analysis needs an unweighted graph".into()));
    }
    let dist = g
        .distance_matrix()
        .ok_or_else(|| Error::NotApplicable("scheme analysis needs a connected graph".into()))?;
    let n = g.n();
    let d = dist.iter().flatten().copied().max().unwrap_or(0);

    let mut intersection: Vec<Option<Intersection>> = vec![None; d + 1];
    for (x, row) in dist.iter().enumerate() {
        for y in 0..n {
            let i = row[y];
            let mut counts = Intersection { c: 0, a: 0, b: 0 };
            for &(z, _) in g.neighbors(y) {
                match row[z] {
                    k if k + 1 == i => counts.c += 1,
                    k if k == i => counts.a += 1,
                    _ => counts.b += 1,
                }
            }
            match intersection[i] {
                None => intersection[i] = Some(counts),
                Some(expected) if expected != counts => {
                    return Err(Error::NotDistanceRegular {
                        x,
                        y,
                        distance: i,
                        detail: format!(
                            "(c, a, b) = ({}, {}, {}) but ({}, {}, {}) elsewhere",
                            counts.c, counts.a, counts.b, expected.c, expected.a, expected.b
                        ),
                    })
                }
                _ => {}
            }
        }
    }
    let intersection: Vec<Intersection> = intersection.into_iter().map(Option::unwrap).collect();

    let distance_matrices: Vec<DMatrix<f64>> = (0..=d)
        .map(|i| DMatrix::from_fn(n, n, |x, y| if dist[x][y] == i { 1.0 } else { 0.0 }))
        .collect();

    // Closure: every A_i A_j must be constant on each distance class.
    for (i, ai) in distance_matrices.iter().enumerate() {
        for (j, aj) in distance_matrices.iter().enumerate().skip(i) {
            let prod = ai * aj;
            let mut value: Vec<Option<(f64, usize, usize)>> = vec![None; d + 1];
            for x in 0..n {
                for y in 0..n {
                    let k = dist[x][y];
                    match value[k] {
                        None => value[k] = Some((prod[(x, y)], x, y)),
                        Some((v, _, _)) if (v - prod[(x, y)]).abs() > SCHEME_TOL => {
                            return Err(Error::NotDistanceRegular {
                                x,
                                y,
                                distance: k,
                                detail: format!("A_{i} A_{j} is not in the span of the distance matrices"),
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    let spectrum = SpectralDecomposition::from_symmetric(distance_matrices[1].clone(), None)?;
    if spectrum.len() != d + 1 {
        return Err(Error::Consistency(format!(
            "diameter {d} but {} distinct eigenvalues",
            spectrum.len()
        )));
    }
    let idempotents = spectrum.idempotents().to_vec();
    let p = DMatrix::from_fn(d + 1, d + 1, |i, j| {
        (&distance_matrices[j] * &idempotents[i]).trace() / spectrum.multiplicities()[i] as f64
    });
    let q = p
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Consistency("eigenmatrix P is singular".into()))?
        * n as f64;
    let scheme = SchemeData {
        n,
        d,
        distance_matrices,
        idempotents,
        p,
        q,
        intersection,
    };
    let pq = scheme.pq_residual();
    if pq > SCHEME_TOL {
        return Err(Error::Consistency(format!("‖PQ − nI‖ = {pq:e}")));
    }
    Ok(scheme)
}

impl SchemeData {
    /// Eigenvalues of `A_1`, i.e. the column `P_{r1}`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.p.column(1.min(self.d)).iter().copied().collect()
    }

    pub fn pq_residual(&self) -> f64 {
        let n = self.n as f64;
        (&self.p * &self.q - DMatrix::identity(self.d + 1, self.d + 1) * n).amax()
    }

    /// Largest deviation in `A_j = Σ_i P_ij E_i` and `E_j = (1/n) Σ_i Q_ij A_i`.
    pub fn basis_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let n = self.n as f64;
        for j in 0..=self.d {
            let mut a = DMatrix::zeros(self.n, self.n);
            let mut e = DMatrix::zeros(self.n, self.n);
            for i in 0..=self.d {
                a += &self.idempotents[i] * self.p[(i, j)];
                e += &self.distance_matrices[i] * (self.q[(i, j)] / n);
            }
            worst = worst
                .max((a - &self.distance_matrices[j]).amax())
                .max((e - &self.idempotents[j]).amax());
        }
        worst
    }

    /// Every distance graph `A_1 … A_d` is connected.
    pub fn is_primitive(&self) -> bool {
        self.distance_matrices.iter().skip(1).all(|a| {
            let pairs = (0..self.n)
                .flat_map(|x| (x + 1..self.n).map(move |y| (x, y)))
                .filter(|&(x, y)| a[(x, y)] != 0.0);
            Graph::unweighted(self.n, pairs).is_ok_and(|h| h.is_connected())
        })
    }

    pub fn summary(&self) -> SchemeSummary {
        SchemeSummary {
            n: self.n,
            d: self.d,
            eigenvalues: self.eigenvalues(),
            multiplicities: self.q.row(0).iter().copied().collect(),
            valencies: self.p.row(0).iter().copied().collect(),
            intersection: self.intersection.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
            pq_residual: self.pq_residual(),
            primitive: self.is_primitive(),
            tolerance: SCHEME_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingEigenvalues {
    pub t: f64,
    pub lambdas: Vec<f64>,
    pub max_imaginary: f64,
}

/// Eigenvalues `λ_ℓ(t)` of the mixing matrix from the eigenmatrices alone.
pub fn mixing_eigenvalues(sch: &SchemeData, t: f64) -> Result<MixingEigenvalues> {
    let dim = sch.d + 1;
    let n2 = (sch.n * sch.n) as f64;
    let col = 1.min(sch.d);
    let phases: Vec<Complex64> = (0..dim)
        .map(|r| Complex64::from_polar(1.0, t * sch.p[(r, col)]))
        .collect();
    let mut lambdas = Vec::with_capacity(dim);
    let mut max_imaginary = 0.0f64;
    for l in 0..dim {
        let mut total = Complex64::new(0.0, 0.0);
        for s in 0..dim {
            let mut inner = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                for rp in 0..dim {
                    inner += phases[r] * phases[rp].conj() * (sch.q[(s, r)] * sch.q[(s, rp)]);
                }
            }
            total += inner * sch.p[(l, s)];
        }
        total /= n2;
        max_imaginary = max_imaginary.max(total.im.abs());
        lambdas.push(total.re);
    }
    if max_imaginary > IMAGINARY_TOL {
        return Err(Error::Consistency(format!(
            "mixing eigenvalue sums have imaginary residue {max_imaginary:e}"
        )));
    }
    Ok(MixingEigenvalues {
        t,
        lambdas,
        max_imaginary,
    })
}

/// True iff `m` is symmetric, doubly stochastic, has spectrum `{1, 0^(n−1)}`
/// and lies within `tol` of `J/n` entrywise.
pub fn is_scaled_j(m: &DMatrix<f64>, tol: f64) -> bool {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return false;
    }
    if (m - m.transpose()).amax() > tol {
        return false;
    }
    let stochastic = m.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol);
    if !stochastic {
        return false;
    }
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let spectrum_ok =
        (eig[0] - 1.0).abs() <= tol * n as f64 && eig[1..].iter().all(|x| x.abs() <= tol * n as f64);
    let target = 1.0 / n as f64;
    spectrum_ok && m.iter().all(|x| (x - target).abs() <= tol)
}

/// Uniform mixing criterion at time `t`: `λ(t) = (1, 0, …, 0)` within `tol`.
pub fn uniform_mixing_test(sch: &SchemeData, t: f64, tol: f64) -> Result<bool> {
    let ev = mixing_eigenvalues(sch, t)?;
    Ok(ev
        .lambdas
        .iter()
        .enumerate()
        .all(|(l, &x)| (x - if l == 0 { 1.0 } else { 0.0 }).abs() <= tol))
}

/// The `ℓ = 2` mixing eigenvalue of the Hadamard graph of order `n` in the
/// closed form `4cos(2√n t) + 12 + (16/n)cos(nt) − 16/n`.
///
/// This form is 16 times the eigenvalue of `M(t)` for every `n`; see
/// [`hadamard_lambda2_normalized`]. Both vanish at the same times.
pub fn hadamard_lambda2(n: u32, t: f64) -> f64 {
    let nf = n as f64;
    4.0 * (2.0 * nf.sqrt() * t).cos() + 12.0 + 16.0 / nf * (nf * t).cos() - 16.0 / nf
}

/// `λ_2(t)` of the Hadamard graph as an eigenvalue of `M(t)`.
pub fn hadamard_lambda2_normalized(n: u32, t: f64) -> f64 {
    hadamard_lambda2(n, t) / 16.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniformVerdict {
    UniformFound,
    NoneFoundOnGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationPoint {
    pub t: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformMixingReport {
    pub t_max: f64,
    pub step: f64,
    pub tolerance: f64,
    pub best_t: f64,
    /// `max |M(t) − J/n|` at `best_t`.
    pub deviation: f64,
    pub verdict: UniformVerdict,
    pub grid_points: usize,
    /// Refined times within tolerance (all of them, in time order).
    pub uniform_times: Vec<f64>,
    /// The smallest refined deviations found, in increasing order.
    pub best_minima: Vec<DeviationPoint>,
}

/// Evaluates `max |M(t) − J/n|` from the upper triangle of `U(t)`.
struct DeviationEval {
    thetas: Vec<f64>,
    coeffs: Vec<f64>,
    target: f64,
}

impl DeviationEval {
    fn new(s: &SpectralDecomposition) -> Self {
        let n = s.n();
        let mut coeffs = Vec::with_capacity(n * (n + 1) / 2 * s.len());
        for x in 0..n {
            for y in x..n {
                coeffs.extend(s.idempotents().iter().map(|e| e[(x, y)]));
            }
        }
        DeviationEval {
            thetas: s.eigenvalues().to_vec(),
            coeffs,
            target: 1.0 / n as f64,
        }
    }

    fn deviation(&self, t: f64) -> f64 {
        let (cos, sin): (Vec<f64>, Vec<f64>) = self
            .thetas
            .iter()
            .map(|&th| {
                let (s, c) = (th * t).sin_cos();
                (c, s)
            })
            .unzip();
        let k = self.thetas.len();
        self.coeffs.chunks_exact(k).fold(0.0f64, |worst, c| {
            let (mut re, mut im) = (0.0, 0.0);
            for r in 0..k {
                re += c[r] * cos[r];
                im += c[r] * sin[r];
            }
            worst.max((re * re + im * im - self.target).abs())
        })
    }
}

/// Scans `max |M(t) − J/n|` on `[0, t_max]`, refining every local minimum
/// (quadratic fit, then golden section). Descriptive only: a miss on the
/// grid is not a proof that uniform mixing never occurs.
pub fn uniform_mixing_scan(
    s: &SpectralDecomposition,
    t_max: f64,
    step: f64,
    tol: f64,
) -> Result<UniformMixingReport> {
    if !(t_max > 0.0 && step > 0.0 && tol > 0.0) {
        return Err(Error::InvalidArgument("t_max, step and tol must be positive".into()));
    }
    let eval = DeviationEval::new(s);
    let f = |t: f64| eval.deviation(t);
    let grid = search::sample(&f, 0.0, t_max, step);
    let mut minima: Vec<DeviationPoint> = search::local_minima(&grid)
        .into_iter()
        .map(|i| {
            let (t, deviation) = search::refine_min(&f, &grid, i, 1e-13);
            DeviationPoint { t, deviation }
        })
        .collect();
    minima.sort_by(|a, b| a.t.total_cmp(&b.t));
    let uniform_times: Vec<f64> = minima
        .iter()
        .filter(|m| m.deviation <= tol && m.t > 0.0)
        .map(|m| m.t)
        .collect();
    let mut best_minima = minima.clone();
    best_minima.sort_by(|a, b| a.deviation.total_cmp(&b.deviation));
    best_minima.truncate(10);
    let (best_t, deviation, verdict) = match uniform_times.first() {
        Some(&t) => (t, f(t), UniformVerdict::UniformFound),
        None => {
            let best = best_minima.first().copied().unwrap_or(DeviationPoint {
                t: 0.0,
                deviation: f(0.0),
            });
            (best.t, best.deviation, UniformVerdict::NoneFoundOnGrid)
        }
    };
    Ok(UniformMixingReport {
        t_max,
        step,
        tolerance: tol,
        best_t,
        deviation,
        verdict,
        grid_points: grid.len(),
        uniform_times,
        best_minima,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootMatch {
    pub eigenvalue: f64,
    /// `θτ` reduced to `[0, 2π)`.
    pub angle: f64,
    /// Order `k` of the matched root `e^{2πij/k}`, when within tolerance.
    pub order: Option<usize>,
    pub numerator: Option<usize>,
    /// Distance to the nearest root with order at most the maximum.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootsProbe {
    pub tau: f64,
    pub max_order: usize,
    pub all_near_roots: bool,
    pub tolerance: f64,
    pub matches: Vec<RootMatch>,
}

/// Matches each eigenvalue `e^{iθ_r τ}` of `U(τ)` to its nearest root of
/// unity of order at most `max_order`.
pub fn roots_of_unity_probe(s: &SpectralDecomposition, tau: f64, max_order: usize) -> Result<RootsProbe> {
    if max_order == 0 {
        return Err(Error::InvalidArgument("maximum order must be at least 1".into()));
    }
    let matches: Vec<RootMatch> = s
        .eigenvalues()
        .iter()
        .map(|&theta| {
            let angle = (theta * tau).rem_euclid(TAU);
            let z = Complex64::from_polar(1.0, angle);
            let mut nearest = f64::INFINITY;
            let mut hit = None;
            for k in 1..=max_order {
                let j = ((angle / TAU) * k as f64).round() as usize % k;
                let root = Complex64::from_polar(1.0, TAU * j as f64 / k as f64);
                let dist = (z - root).norm();
                nearest = nearest.min(dist);
                if dist <= ROOT_TOL && hit.is_none() {
                    hit = Some((k, j));
                }
            }
            RootMatch {
                eigenvalue: theta,
                angle,
                order: hit.map(|h| h.0),
                numerator: hit.map(|h| h.1),
                distance: nearest,
            }
        })
        .collect();
    Ok(RootsProbe {
        tau,
        max_order,
        all_near_roots: matches.iter().all(|m| m.order.is_some()),
        tolerance: ROOT_TOL,
        matches,
    })
}
