//! Spectral decomposition `A = Σ θ_r E_r` with clustered distinct eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Relative clustering tolerance, scaled by the spectral radius.
pub const DEFAULT_RELATIVE_CLUSTER_TOL: f64 = 1e-9;
/// Distance to the nearest integer accepted for an integral eigenvalue.
pub const INTEGER_TOL: f64 = 1e-8;
/// Column-norm threshold for an eigenvalue to be in a vertex's support.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Distinct eigenvalues in decreasing order with their spectral idempotents.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    idempotents: Vec<DMatrix<f64>>,
    multiplicities: Vec<usize>,
    integer_spectrum: bool,
    cluster_tol: f64,
}

/// Deviations from the idempotent algebra identities, all Frobenius norms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlgebraResiduals {
    /// `‖Σ E_r − I‖`
    pub resolution: f64,
    /// `max_{r,s} ‖E_r E_s − δ_rs E_r‖`
    pub orthogonality: f64,
    /// `‖Σ θ_r E_r − A‖`
    pub reconstruction: f64,
    /// `max_r |tr E_r − m_r|`
    pub trace: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub integer_spectrum: bool,
    pub cluster_tol: f64,
    pub certification: &'static str,
}

/// Decomposes the adjacency matrix of `g` with the default cluster tolerance.
pub fn decompose(g: &Graph) -> Result<SpectralDecomposition> {
    SpectralDecomposition::from_symmetric(g.adjacency_matrix(), None)
}

impl SpectralDecomposition {
    /// Decomposes a real symmetric matrix. Eigenvalues closer than
    /// `cluster_tol` (default `1e-9 × spectral radius`) are merged.
    pub fn from_symmetric(a: DMatrix<f64>, cluster_tol: Option<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::InvalidArgument("matrix must be square and nonempty".into()));
        }
        let scale = a.amax().max(1.0);
        if (&a - a.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidArgument("matrix is not symmetric".into()));
        }
        if let Some(tol) = cluster_tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidArgument(format!("cluster tolerance {tol} must be positive")));
            }
        }

        let eig = SymmetricEigen::new(a.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let radius = eig.eigenvalues.amax();
        let tol = cluster_tol.unwrap_or(if radius > 0.0 {
            DEFAULT_RELATIVE_CLUSTER_TOL * radius
        } else {
            1e-12
        });

        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &k in &order {
            match clusters.last_mut() {
                Some(c) if eig.eigenvalues[*c.last().unwrap()] - eig.eigenvalues[k] <= tol => {
                    c.push(k)
                }
                _ => clusters.push(vec![k]),
            }
        }

        let mut eigenvalues = Vec::with_capacity(clusters.len());
        let mut idempotents = Vec::with_capacity(clusters.len());
        let mut multiplicities = Vec::with_capacity(clusters.len());
        let mut integer_spectrum = true;
        for c in &clusters {
            let hi = eig.eigenvalues[c[0]];
            let lo = eig.eigenvalues[*c.last().unwrap()];
            if hi - lo > 10.0 * tol {
                return Err(Error::IllConditioned(format!(
                    "cluster [{lo}, {hi}] spans more than 10 × {tol}"
                )));
            }
            let theta = c.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / c.len() as f64;
            let vectors = eig.eigenvectors.select_columns(c.iter());
            idempotents.push(&vectors * vectors.transpose());

            let rounded = theta.round();
            let near_integer = (theta - rounded).abs() <= INTEGER_TOL;
            let residual_ok = near_integer
                && vectors.column_iter().all(|v| (&a * v - rounded * v).norm() <= INTEGER_TOL);
            integer_spectrum &= residual_ok;

            eigenvalues.push(theta);
            multiplicities.push(c.len());
        }

        Ok(SpectralDecomposition {
            matrix: a,
            eigenvalues,
            idempotents,
            multiplicities,
            integer_spectrum,
            cluster_tol: tol,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// The decomposed matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn idempotents(&self) -> &[DMatrix<f64>] {
        &self.idempotents
    }

    pub fn idempotent(&self, r: usize) -> &DMatrix<f64> {
        &self.idempotents[r]
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of distinct eigenvalues (`d + 1`).
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn integer_spectrum(&self) -> bool {
        self.integer_spectrum
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0f64, |acc, &t| acc.max(t.abs()))
    }

    pub fn check_vertex(&self, u: VertexId) -> Result<usize> {
        if u.0 < self.n() {
            Ok(u.0)
        } else {
            Err(Error::InvalidVertex { index: u.0, n: self.n() })
        }
    }

    /// Indices `r` with `E_r e_u ≠ 0`.
    pub fn eigenvalue_support(&self, u: VertexId) -> Result<Vec<usize>> {
        self.eigenvalue_support_with_tol(u, SUPPORT_TOL)
    }

    pub fn eigenvalue_support_with_tol(&self, u: VertexId, tol: f64) -> Result<Vec<usize>> {
        let u = self.check_vertex(u)?;
        Ok((0..self.len())
            .filter(|&r| self.idempotents[r].column(u).norm() > tol)
            .collect())
    }

    pub fn algebra_residuals(&self) -> AlgebraResiduals {
        let n = self.n();
        let mut sum = DMatrix::<f64>::zeros(n, n);
        let mut recon = DMatrix::<f64>::zeros(n, n);
        let mut orthogonality = 0.0f64;
        let mut trace = 0.0f64;
        for (r, e) in self.idempotents.iter().enumerate() {
            sum += e;
            recon += e * self.eigenvalues[r];
            trace = trace.max((e.trace() - self.multiplicities[r] as f64).abs());
            for (s, f) in self.idempotents.iter().enumerate() {
                let prod = e * f;
                let dev = if r == s { (prod - e).norm() } else { prod.norm() };
                orthogonality = orthogonality.max(dev);
            }
        }
        AlgebraResiduals {
            resolution: (sum - DMatrix::identity(n, n)).norm(),
            orthogonality,
            reconstruction: (recon - &self.matrix).norm(),
            trace,
        }
    }

    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            eigenvalues: self.eigenvalues.clone(),
            multiplicities: self.multiplicities.clone(),
            integer_spectrum: self.integer_spectrum,
            cluster_tol: self.cluster_tol,
            certification: "numeric-residual",
        }
    }

    /// `eigenvalue,multiplicity` rows.
    pub fn eigen_csv(&self) -> String {
        let mut out = String::from("eigenvalue,multiplicity\n");
        for (t, m) in self.eigenvalues.iter().zip(&self.multiplicities) {
            out.push_str(&format!("{t},{m}\n"));
        }
        out
    }
}
