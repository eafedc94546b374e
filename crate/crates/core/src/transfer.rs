//! Cospectrality, strong cospectrality and perfect state transfer.
//!
//! Perfect state transfer from `u` to `v` at time `t` means
//! `U(t) e_u = γ e_v` for a unit complex `γ`. It forces `u` and `v` to be
//! strongly cospectral, `E_r e_u = σ_r E_r e_v`, and `e^{iθ_r t} σ_r = γ` on
//! the eigenvalue support of `u`. For integral spectra this reduces to a
//! parity test on `(θ_max − θ_r)/g`, `g` the gcd of the support differences,
//! and the minimal time is `π/g`. Other spectra get a numeric search.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::search;
use crate::spectra::SpectralDecomposition;
use crate::walk;

/// Tolerance on diagonal idempotent entries for cospectrality.
pub const COSPECTRAL_TOL: f64 = 1e-9;
/// Per-entry tolerance, relative to the column norm, for `E_r e_u = ±E_r e_v`.
pub const PARALLEL_TOL: f64 = 1e-8;
/// Residual and fidelity tolerance for declaring transfer.
pub const TRANSFER_TOL: f64 = 1e-9;
/// Upper edge of the inconclusive residual band.
pub const INCONCLUSIVE_TOL: f64 = 1e-3;
/// Grid residual below which a local minimum is refined.
const CANDIDATE_TOL: f64 = 1e-2;
/// Width of the golden-section bracket at termination.
const REFINE_TOL: f64 = 1e-13;

pub fn cospectral(s: &SpectralDecomposition, u: VertexId, v: VertexId) -> Result<bool> {
    let (u, v) = (s.check_vertex(u)?, s.check_vertex(v)?);
    Ok(s
        .idempotents()
        .iter()
        .all(|e| (e[(u, u)] - e[(v, v)]).abs() <= COSPECTRAL_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongCospectralResult {
    pub cospectral: bool,
    pub parallel: bool,
    pub strongly_cospectral: bool,
    /// `σ_r` per eigenvalue index; `None` outside the support or where the
    /// columns are not parallel.
    pub signs: Vec<Option<i8>>,
    pub support: Vec<usize>,
    pub diagnostic: Option<String>,
}

pub fn strong_cospectral(
    s: &SpectralDecomposition,
    u: VertexId,
    v: VertexId,
) -> Result<StrongCospectralResult> {
    let cospectral = cospectral(s, u, v)?;
    let support = s.eigenvalue_support(u)?;
    let support_v = s.eigenvalue_support(v)?;
    let mut signs = vec![None; s.len()];
    let mut diagnostic = None;
    let mut parallel = support == support_v;
    if !parallel {
        diagnostic = Some(format!(
            "eigenvalue supports differ: {support:?} for {u} versus {support_v:?} for {v}"
        ));
    }
    for &r in &support {
        let e = s.idempotent(r);
        let (cu, cv) = (e.column(u.0), e.column(v.0));
        let k = cu.iamax();
        let sign: i8 = if cv[k] * cu[k] >= 0.0 { 1 } else { -1 };
        let dev = (cu - cv * sign as f64).amax();
        if cv[k] != 0.0 && dev <= PARALLEL_TOL * cu.norm() {
            signs[r] = Some(sign);
        } else {
            parallel = false;
            diagnostic.get_or_insert_with(|| {
                format!(
                    "E_{r} e_{u} is not ±E_{r} e_{v} (θ = {}, deviation {dev:.3e})",
                    s.eigenvalues()[r]
                )
            });
        }
    }
    if !cospectral && diagnostic.is_none() {
        diagnostic = Some(format!("{u} and {v} are not cospectral"));
    }
    Ok(StrongCospectralResult {
        cospectral,
        parallel,
        strongly_cospectral: cospectral && parallel,
        signs,
        support,
        diagnostic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    ExactInteger,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PstVerdict {
    Transfer,
    NoTransfer,
    Inconclusive,
}

/// Outcome of the integral parity criterion on a support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityCertificate {
    /// Support eigenvalues in decreasing order.
    pub eigenvalues: Vec<i64>,
    pub signs: Vec<i8>,
    /// gcd of `θ_max − θ_r` over the support.
    pub g: i64,
    /// `k_r = (θ_max − θ_r)/g`, so that `(π/g)(θ_max − θ_r) = k_r π`.
    pub k: Vec<i64>,
    pub holds: bool,
    pub failure: Option<String>,
}

/// Parity criterion for integer support eigenvalues with signs `σ_r`.
///
/// Transfer is possible iff `σ_r σ_max = +1` exactly when `k_r` is even;
/// the minimal time is then `π/g`.
pub fn parity_criterion(support: &[(i64, i8)]) -> ParityCertificate {
    let mut support = support.to_vec();
    support.sort_by_key(|p| std::cmp::Reverse(p.0));
    let eigenvalues: Vec<i64> = support.iter().map(|p| p.0).collect();
    let signs: Vec<i8> = support.iter().map(|p| p.1).collect();
    let top = eigenvalues.first().copied().unwrap_or(0);
    let g = eigenvalues.iter().fold(0i64, |acc, &t| acc.gcd(&(top - t)));
    if g == 0 {
        return ParityCertificate {
            eigenvalues,
            signs,
            g,
            k: Vec::new(),
            holds: false,
            failure: Some("support contains a single eigenvalue".into()),
        };
    }
    let k: Vec<i64> = eigenvalues.iter().map(|&t| (top - t) / g).collect();
    let failure = eigenvalues
        .iter()
        .zip(&signs)
        .zip(&k)
        .find(|((_, &sig), &kr)| (sig * signs[0] == 1) != kr.is_even())
        .map(|((&t, &sig), &kr)| {
            format!(
                "parity mismatch at θ = {t}: (θ_max − θ)/g = {kr} is {} but σ = {:+} relative to σ_max = {:+}",
                if kr.is_even() { "even" } else { "odd" },
                sig,
                signs[0]
            )
        });
    ParityCertificate {
        holds: failure.is_none(),
        eigenvalues,
        signs,
        g,
        k,
        failure,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Parity(ParityCertificate),
    NumericOnly { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PstResult {
    pub u: VertexId,
    pub v: VertexId,
    pub occurs: bool,
    pub verdict: PstVerdict,
    /// Minimal positive transfer time.
    pub time: Option<f64>,
    /// `γ` in `U(t) e_u = γ e_v`.
    #[serde(serialize_with = "crate::ser::complex_opt")]
    pub phase: Option<Complex64>,
    pub certificate: Option<Certificate>,
    pub certified: Option<Certification>,
    /// `max_r |e^{iθ_r t} σ_r − γ|` at the reported time.
    pub residual: Option<f64>,
    pub fidelity: Option<f64>,
    pub tolerance: f64,
    pub reason: String,
}

impl PstResult {
    fn negative(u: VertexId, v: VertexId, verdict: PstVerdict, reason: String) -> Self {
        PstResult {
            u,
            v,
            occurs: false,
            verdict,
            time: None,
            phase: None,
            certificate: None,
            certified: None,
            residual: None,
            fidelity: None,
            tolerance: TRANSFER_TOL,
            reason,
        }
    }
}

/// Numeric search settings for non-integral spectra.
#[derive(Debug, Clone, Copy, Default)]
pub struct PstOptions {
    /// Search horizon; defaults to `8π / (smallest support gap)`.
    pub horizon: Option<f64>,
    /// Grid step; defaults to `π / (1000 ρ)`.
    pub step: Option<f64>,
}

pub fn detect_pst(s: &SpectralDecomposition, u: VertexId, v: VertexId) -> Result<PstResult> {
    detect_pst_with(s, u, v, PstOptions::default())
}

pub fn detect_pst_with(
    s: &SpectralDecomposition,
    u: VertexId,
    v: VertexId,
    opts: PstOptions,
) -> Result<PstResult> {
    if u == v {
        return Err(Error::InvalidArgument(format!(
            "transfer needs two distinct vertices, got {u} twice"
        )));
    }
    let sc = strong_cospectral(s, u, v)?;
    if !sc.strongly_cospectral {
        let why = sc.diagnostic.unwrap_or_default();
        return Ok(PstResult::negative(
            u,
            v,
            PstVerdict::NoTransfer,
            format!("not strongly cospectral: {why}"),
        ));
    }
    let support: Vec<(f64, i8)> = sc
        .support
        .iter()
        .map(|&r| (s.eigenvalues()[r], sc.signs[r].expect("parallel on support")))
        .collect();

    if s.integer_spectrum() {
        integer_pst(s, u, v, &support)
    } else {
        numeric_pst(s, u, v, &support, opts)
    }
}

/// `max_r |σ_r e^{iθ_r t} − γ|`.
fn phase_residual(support: &[(f64, i8)], t: f64, gamma: Complex64) -> f64 {
    support
        .iter()
        .map(|&(theta, sig)| (Complex64::from_polar(sig as f64, theta * t) - gamma).norm())
        .fold(0.0, f64::max)
}

fn integer_pst(
    s: &SpectralDecomposition,
    u: VertexId,
    v: VertexId,
    support: &[(f64, i8)],
) -> Result<PstResult> {
    let rounded: Vec<(i64, i8)> = support.iter().map(|&(t, sig)| (t.round() as i64, sig)).collect();
    let cert = parity_criterion(&rounded);
    if !cert.holds {
        let reason = cert.failure.clone().unwrap_or_default();
        let mut res = PstResult::negative(u, v, PstVerdict::NoTransfer, reason);
        res.certified = Some(Certification::ExactInteger);
        res.certificate = Some(Certificate::Parity(cert));
        return Ok(res);
    }
    let t = PI / cert.g as f64;
    let amp = walk::amplitude(s, u, v, t)?;
    let gamma = amp / amp.norm();
    let residual = phase_residual(support, t, gamma);
    let fidelity = amp.norm();
    if residual > TRANSFER_TOL || fidelity < 1.0 - TRANSFER_TOL {
        return Err(Error::Consistency(format!(
            "parity certificate for {u}→{v} at t = π/{} not confirmed numerically \
             (residual {residual:.3e}, fidelity {fidelity})",
            cert.g
        )));
    }
    Ok(PstResult {
        u,
        v,
        occurs: true,
        verdict: PstVerdict::Transfer,
        time: Some(t),
        phase: Some(gamma),
        certificate: Some(Certificate::Parity(cert)),
        certified: Some(Certification::ExactInteger),
        residual: Some(residual),
        fidelity: Some(fidelity.min(1.0)),
        tolerance: TRANSFER_TOL,
        reason: "integral support satisfies the parity criterion".into(),
    })
}

fn min_gap(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min)
}

fn numeric_pst(
    s: &SpectralDecomposition,
    u: VertexId,
    v: VertexId,
    support: &[(f64, i8)],
    opts: PstOptions,
) -> Result<PstResult> {
    let thetas: Vec<f64> = support.iter().map(|p| p.0).collect();
    let gap = min_gap(&thetas);
    let horizon = opts.horizon.unwrap_or(8.0 * PI / gap);
    let step = opts
        .step
        .unwrap_or(PI / (1000.0 * s.spectral_radius().max(1e-12)));
    if !(horizon > 0.0 && step > 0.0) {
        return Err(Error::InvalidArgument("horizon and step must be positive".into()));
    }
    // Anchor γ at the largest support eigenvalue.
    let (top, top_sign) = support[0];
    let residual = |t: f64| {
        phase_residual(support, t, Complex64::from_polar(top_sign as f64, top * t))
    };
    let grid = search::sample(&residual, 0.0, horizon, step);
    let mut best = f64::INFINITY;
    for i in search::local_minima(&grid) {
        if grid[i].0 == 0.0 {
            continue;
        }
        best = best.min(grid[i].1);
        if grid[i].1 > CANDIDATE_TOL {
            continue;
        }
        let (t, res) = search::refine_min(&residual, &grid, i, REFINE_TOL);
        if t <= 0.0 {
            continue;
        }
        best = best.min(res);
        if res < TRANSFER_TOL {
            let amp = walk::amplitude(s, u, v, t)?;
            if amp.norm() > 1.0 - TRANSFER_TOL {
                return Ok(PstResult {
                    u,
                    v,
                    occurs: true,
                    verdict: PstVerdict::Transfer,
                    time: Some(t),
                    phase: Some(amp / amp.norm()),
                    certificate: Some(Certificate::NumericOnly { residual: res }),
                    certified: Some(Certification::Numeric),
                    residual: Some(res),
                    fidelity: Some(amp.norm().min(1.0)),
                    tolerance: TRANSFER_TOL,
                    reason: "numeric phase residual and fidelity within tolerance".into(),
                });
            }
        }
    }
    let (verdict, reason) = if best <= INCONCLUSIVE_TOL {
        (
            PstVerdict::Inconclusive,
            format!("best phase residual {best:.3e} on [0, {horizon}] lies in the inconclusive band"),
        )
    } else {
        (
            PstVerdict::NoTransfer,
            format!("no transfer time on [0, {horizon}] (best phase residual {best:.3e})"),
        )
    };
    let mut res = PstResult::negative(u, v, verdict, reason);
    res.certified = Some(Certification::Numeric);
    if best.is_finite() {
        res.residual = Some(best);
        res.certificate = Some(Certificate::NumericOnly { residual: best });
    }
    Ok(res)
}

/// Record-fidelity times of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityRecord {
    pub t: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PgstScan {
    pub horizon: f64,
    pub step: f64,
    pub best_t: f64,
    pub best_fidelity: f64,
    pub records: Vec<FidelityRecord>,
}

/// Scans `|U(t)_{uv}|` on `[0, horizon]` and refines every local maximum.
/// The result is an estimate of the supremum; it says nothing about
/// whether pretty good state transfer occurs.
pub fn pgst_scan(
    s: &SpectralDecomposition,
    u: VertexId,
    v: VertexId,
    horizon: f64,
    step: Option<f64>,
) -> Result<PgstScan> {
    let (ui, vi) = (s.check_vertex(u)?, s.check_vertex(v)?);
    let step = step.unwrap_or(PI / (1000.0 * s.spectral_radius().max(1e-12)));
    if !(horizon > 0.0 && step > 0.0) {
        return Err(Error::InvalidArgument("horizon and step must be positive".into()));
    }
    let coeffs: Vec<(f64, f64)> = s
        .eigenvalues()
        .iter()
        .zip(s.idempotents())
        .map(|(&theta, e)| (theta, e[(ui, vi)]))
        .filter(|&(_, c)| c != 0.0)
        .collect();
    let neg_fidelity = |t: f64| -> f64 {
        -coeffs
            .iter()
            .map(|&(theta, c)| Complex64::from_polar(c, theta * t))
            .sum::<Complex64>()
            .norm()
    };
    let grid = search::sample(&neg_fidelity, 0.0, horizon, step);
    let mut records: Vec<FidelityRecord> = Vec::new();
    let mut best = FidelityRecord {
        t: 0.0,
        fidelity: -grid[0].1,
    };
    for i in search::local_minima(&grid) {
        let (t, nf) = search::refine_min(&neg_fidelity, &grid, i, 1e-12);
        let f = (-nf).min(1.0);
        if f > best.fidelity || records.is_empty() && f >= best.fidelity {
            best = FidelityRecord { t, fidelity: f };
            records.push(best);
        }
    }
    Ok(PgstScan {
        horizon,
        step,
        best_t: best.t,
        best_fidelity: best.fidelity,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub diameter: Option<usize>,
    pub m: usize,
    pub diameter_cubed: Option<usize>,
    pub eighty_m: usize,
    /// `D³ ≤ 80 m`
    pub diameter_bound: Option<bool>,
    pub time: f64,
    pub time_limit: f64,
    /// `t ≤ π/√2`
    pub time_bound: bool,
    pub min_support_gap: f64,
    /// Smallest support gap at least `√2`.
    pub gap_bound: bool,
    pub tolerance: f64,
    pub findings: Vec<String>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.diameter_bound.unwrap_or(false) && self.time_bound && self.gap_bound
    }
}

/// Checks the necessary conditions every perfect state transfer instance on
/// a simple graph must satisfy: `D³ ≤ 80m`, minimal time at most `π/√2`, and
/// support eigenvalues pairwise at least `√2` apart.
pub fn check_bounds(
    g: &Graph,
    result: &PstResult,
    s: &SpectralDecomposition,
    u: VertexId,
) -> Result<BoundReport> {
    let time = match (result.occurs, result.time) {
        (true, Some(t)) => t,
        _ => {
            return Err(Error::Precondition(
                "bounds apply only to an instance of perfect state transfer".into(),
            ))
        }
    };
    let stats = g.stats();
    let diameter = stats.diameter.finite();
    let diameter_cubed = diameter.map(|d| d.pow(3));
    let eighty_m = 80 * stats.m;
    let diameter_bound = diameter_cubed.map(|c| c <= eighty_m);
    let time_limit = PI / SQRT_2;
    let time_bound = time <= time_limit + TRANSFER_TOL;
    let support: Vec<f64> = s
        .eigenvalue_support(u)?
        .into_iter()
        .map(|r| s.eigenvalues()[r])
        .collect();
    let min_support_gap = min_gap(&support);
    let gap_bound = min_support_gap >= SQRT_2 - TRANSFER_TOL;

    let mut findings = Vec::new();
    match (diameter_bound, diameter_cubed) {
        (Some(false), Some(c)) => findings.push(format!("D³ = {c} exceeds 80m = {eighty_m}")),
        (None, _) => findings.push("graph is disconnected; diameter bound not evaluated".into()),
        _ => {}
    }
    if !time_bound {
        findings.push(format!("minimal transfer time {time} exceeds π/√2"));
    }
    if !gap_bound {
        findings.push(format!("support gap {min_support_gap} is below √2"));
    }
    Ok(BoundReport {
        diameter,
        m: stats.m,
        diameter_cubed,
        eighty_m,
        diameter_bound,
        time,
        time_limit,
        time_bound,
        min_support_gap,
        gap_bound,
        tolerance: TRANSFER_TOL,
        findings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportTest {
    pub applicable: bool,
    /// `Some(true)` for "PST", `Some(false)` for "no PST".
    pub transfer: Option<bool>,
    pub time: Option<f64>,
    pub reason: String,
    pub certificate: Option<ParityCertificate>,
}

/// Decision-only form of the integral parity criterion for a vertex pair.
pub fn no_pst_support_test(
    s: &SpectralDecomposition,
    u: VertexId,
    v: VertexId,
) -> Result<SupportTest> {
    let not_applicable = |reason: String| SupportTest {
        applicable: false,
        transfer: None,
        time: None,
        reason,
        certificate: None,
    };
    if !s.integer_spectrum() {
        return Ok(not_applicable("spectrum is not integral".into()));
    }
    let sc = strong_cospectral(s, u, v)?;
    if !sc.strongly_cospectral || u == v {
        return Ok(not_applicable(format!(
            "{u} and {v} are not strongly cospectral"
        )));
    }
    let support: Vec<(i64, i8)> = sc
        .support
        .iter()
        .map(|&r| (s.eigenvalues()[r].round() as i64, sc.signs[r].unwrap()))
        .collect();
    let cert = parity_criterion(&support);
    Ok(SupportTest {
        applicable: true,
        transfer: Some(cert.holds),
        time: cert.holds.then(|| PI / cert.g as f64),
        reason: match &cert.failure {
            Some(f) => format!("no PST: {f}"),
            None => format!("PST at time π/{}", cert.g),
        },
        certificate: Some(cert),
    })
}
