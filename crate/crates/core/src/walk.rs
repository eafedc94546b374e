//! Transition matrices `U(t) = exp(itA)` and mixing matrices `M(t) = U ∘ Ū`,
//! both evaluated from the spectral decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::graph::VertexId;
use crate::spectra::SpectralDecomposition;

#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub t: f64,
    pub u: DMatrix<Complex64>,
}

#[derive(Debug, Clone)]
pub struct MixingMatrix {
    pub t: f64,
    pub m: DMatrix<f64>,
}

/// `e^{iθ_r t}` for every distinct eigenvalue.
pub(crate) fn phases(s: &SpectralDecomposition, t: f64) -> Vec<Complex64> {
    s.eigenvalues()
        .iter()
        .map(|&theta| Complex64::from_polar(1.0, theta * t))
        .collect()
}

/// `U(t) = Σ_r e^{iθ_r t} E_r`.
pub fn transition(s: &SpectralDecomposition, t: f64) -> TransitionMatrix {
    let n = s.n();
    let mut u = DMatrix::<Complex64>::zeros(n, n);
    for (phase, e) in phases(s, t).into_iter().zip(s.idempotents()) {
        u.zip_apply(e, |z, x| *z += phase * x);
    }
    TransitionMatrix { t, u }
}

/// `M(t)`, the entrywise squared modulus of `U(t)`.
pub fn mixing(s: &SpectralDecomposition, t: f64) -> MixingMatrix {
    let u = transition(s, t).u;
    MixingMatrix {
        t,
        m: u.map(|z| z.norm_sqr()),
    }
}

/// The `(u, v)` entry of `U(t)`.
pub fn amplitude(s: &SpectralDecomposition, u: VertexId, v: VertexId, t: f64) -> Result<Complex64> {
    let (u, v) = (s.check_vertex(u)?, s.check_vertex(v)?);
    Ok(phases(s, t)
        .into_iter()
        .zip(s.idempotents())
        .map(|(p, e)| p * e[(u, v)])
        .sum())
}

/// `|U(t)_{uv}|`.
pub fn fidelity(s: &SpectralDecomposition, u: VertexId, v: VertexId, t: f64) -> Result<f64> {
    Ok(amplitude(s, u, v, t)?.norm().min(1.0))
}

impl TransitionMatrix {
    /// `‖U U* − I‖_F`
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.u.nrows();
        (&self.u * self.u.adjoint() - DMatrix::<Complex64>::identity(n, n)).norm()
    }

    /// `‖U − Uᵀ‖_F`
    pub fn symmetry_defect(&self) -> f64 {
        (&self.u - self.u.transpose()).norm()
    }
}

impl MixingMatrix {
    /// Largest deviation of a row or column sum from one.
    pub fn stochastic_defect(&self) -> f64 {
        let rows = self.m.row_iter().map(|r| (r.sum() - 1.0).abs());
        let cols = self.m.column_iter().map(|c| (c.sum() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `J/n`.
    pub fn uniform_deviation(&self) -> f64 {
        let target = 1.0 / self.m.nrows() as f64;
        self.m.iter().fold(0.0, |acc, &x| acc.max((x - target).abs()))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2, PI};

    use super::*;
    use crate::graph::{complete, hypercube, path};
    use crate::spectra::decompose;

    #[test]
    fn p2_at_quarter_period() {
        let s = decompose(&path(2).unwrap()).unwrap();
        let u = transition(&s, FRAC_PI_2).u;
        let i = Complex64::i();
        assert!((u[(0, 0)]).norm() < 1e-15);
        assert!((u[(0, 1)] - i).norm() < 1e-15);
        assert!((u[(1, 0)] - i).norm() < 1e-15);
        let m = mixing(&s, FRAC_PI_4).m;
        assert!(m.iter().all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn time_zero_is_identity() {
        for g in [path(4).unwrap(), complete(5).unwrap(), hypercube(3).unwrap()] {
            let s = decompose(&g).unwrap();
            let n = g.n();
            let u = transition(&s, 0.0).u;
            assert!((u - DMatrix::<Complex64>::identity(n, n)).norm() < 1e-12);
            let m = mixing(&s, 0.0).m;
            assert!((m - DMatrix::<f64>::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn complete_three_closed_form() {
        let s = decompose(&complete(3).unwrap()).unwrap();
        for &t in &[0.1, 0.7, 1.3, 2.9] {
            let m = mixing(&s, t).m;
            let off = (Complex64::from_polar(1.0, 3.0 * t) - 1.0).norm_sqr() / 9.0;
            assert!((m[(0, 1)] - off).abs() < 1e-14);
            assert!(fidelity(&s, VertexId(0), VertexId(1), t).unwrap() <= 2.0 / 3.0 + 1e-12);
        }
    }

    #[test]
    fn fidelities_at_transfer_times() {
        let p3 = decompose(&path(3).unwrap()).unwrap();
        let f = fidelity(&p3, VertexId(0), VertexId(2), PI / SQRT_2).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        let q4 = decompose(&hypercube(4).unwrap()).unwrap();
        let f = fidelity(&q4, VertexId(0), VertexId(15), FRAC_PI_2).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_at_sample_times() {
        let s = decompose(&path(5).unwrap()).unwrap();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let u = transition(&s, t);
            assert!(u.unitarity_defect() <= 1e-9 * 5.0);
            assert!(u.symmetry_defect() <= 1e-12);
            let m = mixing(&s, t);
            assert!(m.stochastic_defect() <= 1e-9);
            assert!(m.m.iter().all(|&x| x >= 0.0));
        }
    }
}
