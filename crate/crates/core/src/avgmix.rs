//! Average mixing matrices.
//!
//! `M(t)_xy = Σ_{r,s} E_r[x,y] E_s[x,y] e^{i(θ_r − θ_s)t}`, so any average of
//! `M(t)` against a probability distribution only needs the distribution's
//! characteristic function at the eigenvalue gaps. The long-run average is
//! `M̂ = Σ_r E_r ∘ E_r`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scheme::scheme_from_drg;
use crate::spectra::{decompose, SpectralDecomposition};
use crate::walk;

/// Relative factor in the numeric rank threshold `n · ε · σ_max`.
pub const RANK_EPS: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;
/// Largest `‖Σ f fᵀ − M̂‖_max` accepted from a cp factorization.
pub const CP_TOL: f64 = 1e-10;
/// Allowed deviation of a tabulated density's integral from 1.
pub const DENSITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct AvgMixingAnalysis {
    #[serde(serialize_with = "crate::ser::matrix")]
    pub matrix: DMatrix<f64>,
    pub rank: usize,
    pub rank_threshold: f64,
    /// Decreasing.
    pub singular_values: Vec<f64>,
    pub trace: f64,
    pub diagonal: Vec<f64>,
    pub min_eigenvalue: f64,
    pub psd_certified: bool,
    pub symmetry_defect: f64,
    pub stochastic_defect: f64,
    pub min_entry: f64,
    /// Largest entrywise standard error, for sampled distributions only.
    pub standard_error: Option<f64>,
}

impl AvgMixingAnalysis {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let sym = (&m + m.transpose()) * 0.5;
        let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        let min_eigenvalue = eig.first().copied().unwrap_or(0.0);
        let mut singular_values: Vec<f64> = eig.iter().map(|x| x.abs()).collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let sigma_max = singular_values.first().copied().unwrap_or(0.0);
        let rank_threshold = n as f64 * RANK_EPS * sigma_max;
        let rank = singular_values.iter().filter(|&&s| s > rank_threshold).count();
        let stochastic_defect = m
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .chain(m.column_iter().map(|c| (c.sum() - 1.0).abs()))
            .fold(0.0, f64::max);
        AvgMixingAnalysis {
            rank,
            rank_threshold,
            singular_values,
            trace: m.trace(),
            diagonal: m.diagonal().iter().copied().collect(),
            min_eigenvalue,
            psd_certified: min_eigenvalue >= PSD_TOL,
            symmetry_defect: (&m - m.transpose()).amax(),
            stochastic_defect,
            min_entry: m.min(),
            standard_error: None,
            matrix: m,
        }
    }
}

/// `Σ_{r,s} (E_r ∘ E_s) · kernel(θ_r − θ_s)` with `kernel` even in its
/// argument.
fn assemble<K: Fn(f64) -> f64>(s: &SpectralDecomposition, kernel: K) -> DMatrix<f64> {
    let n = s.n();
    let thetas = s.eigenvalues();
    let es = s.idempotents();
    let mut out = DMatrix::zeros(n, n);
    for r in 0..thetas.len() {
        out += es[r].component_mul(&es[r]) * kernel(0.0);
        for q in r + 1..thetas.len() {
            out += es[r].component_mul(&es[q]) * (2.0 * kernel(thetas[r] - thetas[q]));
        }
    }
    out
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `M̂ = Σ_r E_r ∘ E_r` and its rank analysis.
pub fn average_mixing(s: &SpectralDecomposition) -> AvgMixingAnalysis {
    AvgMixingAnalysis::from_matrix(assemble(s, |w| if w == 0.0 { 1.0 } else { 0.0 }))
}

/// `(1/T) ∫₀ᵀ M(t) dt` in closed form.
pub fn interval_average(s: &SpectralDecomposition, t: f64) -> Result<DMatrix<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("interval length must be positive, got {t}")));
    }
    Ok(assemble(s, |w| sinc(w * t)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionSpec {
    Point { tau: f64 },
    /// Uniform on `[0, length]`.
    Uniform { length: f64 },
    Gaussian { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    /// Density values at increasing times, integrated by the trapezoid rule.
    Tabulated { times: Vec<f64>, density: Vec<f64> },
    /// Draws from an arbitrary distribution; averaged by Monte Carlo.
    Samples { times: Vec<f64> },
}

impl DistributionSpec {
    /// Real part of the characteristic function, where it has a closed form.
    pub fn characteristic_re(&self, w: f64) -> Option<f64> {
        match *self {
            DistributionSpec::Point { tau } => Some((w * tau).cos()),
            DistributionSpec::Uniform { length } => Some(sinc(w * length)),
            DistributionSpec::Gaussian { mu, sigma } => {
                Some((mu * w).cos() * (-0.5 * sigma * sigma * w * w).exp())
            }
            DistributionSpec::Exponential { rate } => Some(rate * rate / (rate * rate + w * w)),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self {
            DistributionSpec::Point { tau } if !tau.is_finite() => bad("point mass must be finite".into()),
            DistributionSpec::Uniform { length } if !(*length > 0.0 && length.is_finite()) => {
                bad(format!("uniform length must be positive, got {length}"))
            }
            DistributionSpec::Gaussian { mu, sigma } if !(mu.is_finite() && *sigma >= 0.0 && sigma.is_finite()) => {
                bad(format!("gaussian needs finite mean and sigma ≥ 0, got ({mu}, {sigma})"))
            }
            DistributionSpec::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => {
                bad(format!("exponential rate must be positive, got {rate}"))
            }
            DistributionSpec::Tabulated { times, density } => {
                if times.len() < 2 || times.len() != density.len() {
                    return bad("tabulated density needs matching times and values, at least two".into());
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("tabulated times must increase".into());
                }
                if density.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
                    return bad("tabulated density must be finite and nonnegative".into());
                }
                let mass: f64 = trapezoid_weights(times).iter().zip(density).map(|(w, f)| w * f).sum();
                if (mass - 1.0).abs() > DENSITY_TOL {
                    return Err(Error::Unnormalized(mass));
                }
                Ok(())
            }
            DistributionSpec::Samples { times } if times.is_empty() || times.iter().any(|t| !t.is_finite()) => {
                bad("sample list must be nonempty and finite".into())
            }
            _ => Ok(()),
        }
    }
}

fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let k = times.len();
    (0..k)
        .map(|i| {
            let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
            let right = if i + 1 < k { times[i + 1] - times[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// `E[M(R)]` for the time distribution `R`.
pub fn distribution_average(s: &SpectralDecomposition, r: &DistributionSpec) -> Result<AvgMixingAnalysis> {
    r.validate()?;
    match r {
        DistributionSpec::Point { tau } => Ok(AvgMixingAnalysis::from_matrix(walk::mixing(s, *tau).m)),
        DistributionSpec::Tabulated { times, density } => {
            let weights = trapezoid_weights(times);
            let n = s.n();
            let m = times
                .par_iter()
                .zip(weights.par_iter().zip(density.par_iter()))
                .map(|(&t, (&w, &f))| walk::mixing(s, t).m * (w * f))
                .reduce(|| DMatrix::zeros(n, n), |a, b| a + b);
            Ok(AvgMixingAnalysis::from_matrix(m))
        }
        DistributionSpec::Samples { times } => {
            let n = s.n();
            let k = times.len() as f64;
            let (sum, sq) = times
                .par_iter()
                .map(|&t| {
                    let m = walk::mixing(s, t).m;
                    let m2 = m.component_mul(&m);
                    (m, m2)
                })
                .reduce(
                    || (DMatrix::zeros(n, n), DMatrix::zeros(n, n)),
                    |a, b| (a.0 + b.0, a.1 + b.1),
                );
            let mean = sum / k;
            let se = if times.len() > 1 {
                let var = (sq / k - mean.component_mul(&mean)) * (k / (k - 1.0));
                var.iter().map(|v| (v.max(0.0) / k).sqrt()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let mut a = AvgMixingAnalysis::from_matrix(mean);
            a.standard_error = Some(se);
            Ok(a)
        }
        _ => Ok(AvgMixingAnalysis::from_matrix(assemble(s, |w| {
            r.characteristic_re(w).expect("closed-form distribution")
        }))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CpFactorization {
    /// Entrywise nonnegative; `Σ f fᵀ = M̂`.
    pub vectors: Vec<Vec<f64>>,
    pub residual: f64,
    /// `d + 1`, the number of factors.
    pub cp_rank_bound: usize,
    /// Number of pairwise non-parallel factors.
    pub nonnegative_rank_bound: usize,
}

/// Factors `M̂` as `Σ_r (v_r ∘ v_r)(v_r ∘ v_r)ᵀ` when every eigenvalue is
/// simple. The factor `v_r ∘ v_r` is the diagonal of `E_r = v_r v_rᵀ`.
pub fn cp_factorize(s: &SpectralDecomposition) -> Result<CpFactorization> {
    if let Some((r, &m)) = s.multiplicities().iter().enumerate().find(|(_, &m)| m > 1) {
        return Err(Error::NotApplicable(format!(
            "eigenvalue {} has multiplicity {m}; complete positivity needs a simple spectrum",
            s.eigenvalues()[r]
        )));
    }
    let vectors: Vec<Vec<f64>> = s
        .idempotents()
        .iter()
        .map(|e| {
            let k = e.diagonal().argmax().0;
            let scale = e[(k, k)];
            e.column(k).iter().map(|x| x * x / scale).collect()
        })
        .collect();
    let n = s.n();
    let mut sum = DMatrix::zeros(n, n);
    for v in &vectors {
        let f = nalgebra::DVector::from_column_slice(v);
        sum += &f * f.transpose();
    }
    let residual = (sum - average_mixing(s).matrix).amax();
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for v in &vectors {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let seen = directions
            .iter()
            .any(|d| d.iter().zip(&u).all(|(a, b)| (a - b).abs() <= 1e-9));
        if !seen {
            directions.push(u);
        }
    }
    Ok(CpFactorization {
        cp_rank_bound: vectors.len(),
        nonnegative_rank_bound: directions.len(),
        vectors,
        residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DrgRankProbe {
    pub n: usize,
    pub is_drg: bool,
    pub primitive: bool,
    pub is_primitive_drg: bool,
    pub rank: usize,
    pub equals_n: bool,
    pub note: Option<String>,
}

/// Reports whether `G` is a primitive distance-regular graph and whether
/// `rank M̂ = n`. Evidence only.
pub fn drg_rank_probe(g: &Graph) -> Result<DrgRankProbe> {
    let s = decompose(g)?;
    let rank = average_mixing(&s).rank;
    let (is_drg, primitive, note) = match scheme_from_drg(g) {
        Ok(sch) => (true, sch.is_primitive(), None),
        Err(e) => (false, false, Some(e.to_string())),
    };
    Ok(DrgRankProbe {
        n: g.n(),
        is_drg,
        primitive,
        is_primitive_drg: is_drg && primitive,
        rank,
        equals_n: rank == g.n(),
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianRankPoint {
    pub mu: f64,
    pub sigma: f64,
    pub rank: usize,
    /// `σ_2 / σ_1`, how close the average is to rank one.
    pub second_singular_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianRankScan {
    pub points: Vec<GaussianRankPoint>,
    pub min_rank: usize,
    pub closest_to_rank_one: GaussianRankPoint,
}

/// Numeric rank of `M̂_R` over a grid of gaussian times `R ~ N(μ, σ²)`.
pub fn gaussian_rank_scan(s: &SpectralDecomposition, mus: &[f64], sigmas: &[f64]) -> Result<GaussianRankScan> {
    if mus.is_empty() || sigmas.is_empty() {
        return Err(Error::InvalidArgument("gaussian scan needs a nonempty grid".into()));
    }
    let grid: Vec<(f64, f64)> = mus.iter().flat_map(|&m| sigmas.iter().map(move |&sg| (m, sg))).collect();
    let points: Vec<GaussianRankPoint> = grid
        .par_iter()
        .map(|&(mu, sigma)| {
            let a = distribution_average(s, &DistributionSpec::Gaussian { mu, sigma })?;
            let sv = &a.singular_values;
            Ok(GaussianRankPoint {
                mu,
                sigma,
                rank: a.rank,
                second_singular_ratio: sv.get(1).copied().unwrap_or(0.0) / sv[0],
            })
        })
        .collect::<Result<_>>()?;
    let min_rank = points.iter().map(|p| p.rank).min().unwrap_or(0);
    let closest_to_rank_one = *points
        .iter()
        .min_by(|a, b| a.second_singular_ratio.total_cmp(&b.second_singular_ratio))
        .expect("nonempty grid");
    Ok(GaussianRankScan {
        points,
        min_rank,
        closest_to_rank_one,
    })
}

/// Default exploration grid: `μ ∈ [0, 2π]`, `σ ∈ (0, 2]`.
pub fn default_gaussian_grid() -> (Vec<f64>, Vec<f64>) {
    let mus = (0..=40).map(|k| 2.0 * PI * k as f64 / 40.0).collect();
    let sigmas = (1..=20).map(|k| 0.1 * k as f64).collect();
    (mus, sigmas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path};

    fn dm(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
    }

    #[test]
    fn p2_and_p3_averages() {
        let a = average_mixing(&decompose(&path(2).unwrap()).unwrap());
        assert!((a.matrix.clone() - DMatrix::from_element(2, 2, 0.5)).amax() < 1e-12);
        assert_eq!(a.rank, 1);

        let a = average_mixing(&decompose(&path(3).unwrap()).unwrap());
        let e = dm(&[&[0.375, 0.25, 0.375], &[0.25, 0.5, 0.25], &[0.375, 0.25, 0.375]]);
        assert!((a.matrix.clone() - e).amax() < 1e-12);
        assert_eq!(a.rank, 2);
        assert!(a.psd_certified);
        assert!(a.stochastic_defect < 1e-12);
    }

    #[test]
    fn c4_rows_repeat_antipodally() {
        // M̂ = J/8 + (I + antipodal)/4, so rows x and x+2 coincide.
        let a = average_mixing(&decompose(&cycle(4).unwrap()).unwrap());
        let e = dm(&[
            &[0.375, 0.125, 0.375, 0.125],
            &[0.125, 0.375, 0.125, 0.375],
            &[0.375, 0.125, 0.375, 0.125],
            &[0.125, 0.375, 0.125, 0.375],
        ]);
        assert!((a.matrix.clone() - e).amax() < 1e-12);
        assert_eq!(a.rank, 2);
    }

    #[test]
    fn interval_limits() {
        let s = decompose(&path(2).unwrap()).unwrap();
        let avg = interval_average(&s, 2.0 * PI).unwrap();
        assert!((avg - DMatrix::from_element(2, 2, 0.5)).amax() < 1e-9);
        let near_zero = interval_average(&s, 1e-12).unwrap();
        assert!((near_zero - DMatrix::identity(2, 2)).amax() < 1e-12);
        assert!(interval_average(&s, 0.0).is_err());
    }

    #[test]
    fn point_distribution_is_mixing() {
        let s = decompose(&path(5).unwrap()).unwrap();
        let a = distribution_average(&s, &DistributionSpec::Point { tau: 0.7 }).unwrap();
        assert!((a.matrix - walk::mixing(&s, 0.7).m).amax() <= 1e-12);
    }

    #[test]
    fn wide_gaussian_on_p2() {
        let s = decompose(&path(2).unwrap()).unwrap();
        let a = distribution_average(&s, &DistributionSpec::Gaussian { mu: 0.3, sigma: 20.0 }).unwrap();
        assert!((a.matrix - DMatrix::from_element(2, 2, 0.5)).amax() < 1e-12);
    }

    #[test]
    fn bad_distributions() {
        let s = decompose(&path(2).unwrap()).unwrap();
        let unnormalized = DistributionSpec::Tabulated {
            times: vec![0.0, 1.0, 2.0],
            density: vec![1.0, 1.0, 1.0],
        };
        assert!(matches!(distribution_average(&s, &unnormalized), Err(Error::Unnormalized(m)) if (m - 2.0).abs() < 1e-12));
        assert!(distribution_average(&s, &DistributionSpec::Exponential { rate: 0.0 }).is_err());
        assert!(distribution_average(&s, &DistributionSpec::Samples { times: vec![] }).is_err());
    }

    #[test]
    fn tabulated_uniform_matches_closed_form() {
        let s = decompose(&path(3).unwrap()).unwrap();
        let k = 20_001;
        let times: Vec<f64> = (0..k).map(|i| 3.0 * i as f64 / (k - 1) as f64).collect();
        let density = vec![1.0 / 3.0; k];
        let tab = distribution_average(&s, &DistributionSpec::Tabulated { times, density }).unwrap();
        let exact = interval_average(&s, 3.0).unwrap();
        assert!((tab.matrix - exact).amax() < 1e-7);
    }

    #[test]
    fn samples_report_standard_error() {
        let s = decompose(&path(3).unwrap()).unwrap();
        let same = distribution_average(&s, &DistributionSpec::Samples { times: vec![0.4; 8] }).unwrap();
        assert!(same.standard_error.unwrap() < 1e-12);
        assert!((same.matrix - walk::mixing(&s, 0.4).m).amax() < 1e-12);
    }

    #[test]
    fn cp_factors() {
        let f = cp_factorize(&decompose(&path(2).unwrap()).unwrap()).unwrap();
        assert_eq!(f.cp_rank_bound, 2);
        assert_eq!(f.nonnegative_rank_bound, 1);
        for v in &f.vectors {
            assert!(v.iter().all(|x| (x - 0.5).abs() < 1e-12));
        }

        let f = cp_factorize(&decompose(&path(3).unwrap()).unwrap()).unwrap();
        let expected = [[0.25, 0.5, 0.25], [0.5, 0.0, 0.5], [0.25, 0.5, 0.25]];
        for (v, e) in f.vectors.iter().zip(expected) {
            assert!(v.iter().zip(e).all(|(a, b)| (a - b).abs() < 1e-12));
            assert!(v.iter().all(|x| *x >= 0.0));
        }
        assert_eq!((f.cp_rank_bound, f.nonnegative_rank_bound), (3, 2));
        assert!(f.residual <= CP_TOL);

        let err = cp_factorize(&decompose(&cycle(4).unwrap()).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
    }

    #[test]
    fn drg_probe() {
        let k5 = drg_rank_probe(&complete(5).unwrap()).unwrap();
        assert!(k5.is_primitive_drg);
        assert_eq!(k5.rank, 5);
        assert!(k5.equals_n);

        let c4 = drg_rank_probe(&cycle(4).unwrap()).unwrap();
        assert!(c4.is_drg && !c4.primitive);
        assert!(!c4.equals_n);

        let p4 = drg_rank_probe(&path(4).unwrap()).unwrap();
        assert!(!p4.is_drg && p4.note.is_some());
    }

    #[test]
    fn gaussian_scan_runs() {
        let s = decompose(&path(3).unwrap()).unwrap();
        let scan = gaussian_rank_scan(&s, &[0.0, 1.0], &[0.1, 1.0]).unwrap();
        assert_eq!(scan.points.len(), 4);
        assert!(scan.min_rank >= 1 && scan.min_rank <= 3);
    }
}
