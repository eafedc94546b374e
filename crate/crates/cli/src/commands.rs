use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qwalk::avgmix::{
    self, average_mixing, cp_factorize, default_gaussian_grid, distribution_average, drg_rank_probe,
    gaussian_rank_scan, interval_average, AvgMixingAnalysis, DistributionSpec,
};
use qwalk::graph::{compressed_q4, parse_edge_list, write_edge_list};
use qwalk::nalgebra::DMatrix;
use qwalk::quotient::{self, coarsest_equitable, is_equitable, lift_pst, out_degree_matrix, Partition};
use qwalk::scheme::{self, mixing_eigenvalues, roots_of_unity_probe, scheme_from_drg, uniform_mixing_scan};
use qwalk::ser::matrix_csv;
use qwalk::spectra::{self, SpectralDecomposition};
use qwalk::transfer::{self, check_bounds, detect_pst_with, no_pst_support_test, pgst_scan, strong_cospectral, PstOptions};
use qwalk::walk::{self, mixing, transition};
use qwalk::{Error, Family, Graph, VertexId, Weight};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Command, GraphInput, MatrixKind};
use crate::report::{digest, time_value, Report};

/// A failed run: exit code plus a one-line reason.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub reason: String,
}

impl Failure {
    pub fn usage(reason: impl Into<String>) -> Self {
        Failure { code: 1, kind: "usage", reason: reason.into() }
    }

    pub fn input(reason: impl Into<String>) -> Self {
        Failure { code: 2, kind: "input", reason: reason.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = if e.is_consistency_error() {
            (3, "consistency")
        } else if matches!(e, Error::InvalidArgument(_)) {
            (1, "usage")
        } else {
            (2, "input")
        };
        Failure { code, kind, reason: e.to_string() }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Loaded {
    graph: Graph,
    input: Value,
    digest: String,
    cluster_tol: Option<f64>,
}

impl Loaded {
    fn decompose(&self) -> Outcome<SpectralDecomposition> {
        Ok(SpectralDecomposition::from_symmetric(self.graph.adjacency_matrix(), self.cluster_tol)?)
    }

    fn vertex(&self, v: usize) -> Outcome<VertexId> {
        Ok(self.graph.vertex(v)?)
    }
}

fn read_text(path: &Path) -> Outcome<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))
    }
}

fn load(input: &GraphInput) -> Outcome<Loaded> {
    let (graph, mut info) = match (&input.graph, &input.family) {
        (Some(path), _) => {
            let g = parse_edge_list(&read_text(path)?)?;
            (g, json!({ "source": "file", "path": path.display().to_string() }))
        }
        (None, Some(desc)) => {
            let family = Family::from_str(desc)?;
            let g = family.build()?;
            let mut info = json!({ "source": "family", "descriptor": family.to_string() });
            if family == Family::CompressedQ4 {
                let cq = compressed_q4();
                info["marked"] = json!({ "a": cq.a.0, "b": cq.b.0, "c": cq.c.0 });
            }
            (g, info)
        }
        (None, None) => return Err(Failure::usage("one of --graph or --family is required")),
    };
    if let Some(tol) = input.cluster_tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Failure::usage(format!("cluster tolerance must be positive, got {tol}")));
        }
    }
    info["n"] = json!(graph.n());
    info["m"] = json!(graph.edge_count());
    info["weighted"] = json!(!graph.is_unweighted());
    let digest = digest(&write_edge_list(&graph));
    Ok(Loaded { graph, input: info, digest, cluster_tol: input.cluster_tol })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn write_file(path: &Path, contents: &str, outputs: &mut Vec<String>) -> Outcome<()> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("writing {}: {e}", path.display())))?;
    outputs.push(path.display().to_string());
    Ok(())
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn matrix_value(m: &DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(x)).collect()))
            .collect(),
    )
}

struct Builder {
    payload: Map<String, Value>,
    tolerances: Map<String, Value>,
    warnings: Vec<String>,
    outputs: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder { payload: Map::new(), tolerances: Map::new(), warnings: Vec::new(), outputs: Vec::new() }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.payload.insert(key.into(), v);
    }

    fn tol(&mut self, key: &str, v: f64) {
        self.tolerances.insert(key.into(), json!(v));
    }

    fn spectral_tolerances(&mut self, s: &SpectralDecomposition) {
        self.tol("cluster", s.cluster_tol());
        self.tol("integer", spectra::INTEGER_TOL);
        self.tol("support", spectra::SUPPORT_TOL);
    }

    fn finish(self, name: &str, argv: &[String], loaded: &Loaded) -> Report {
        Report {
            command: name.into(),
            argv: argv.to_vec(),
            input: loaded.input.clone(),
            input_digest: loaded.digest.clone(),
            payload: Value::Object(self.payload),
            tolerances: self.tolerances,
            warnings: self.warnings,
            outputs: self.outputs,
        }
    }
}

pub enum Output {
    Report(Report),
    /// Raw text for standard output, such as an edge list.
    Text(String),
}

pub fn run(command: &Command, argv: &[String]) -> Outcome<Output> {
    match command {
        Command::Gen { input, out, counts_header } => gen(input, out.as_deref(), *counts_header, argv),
        Command::Spectrum { input, support, out } => spectrum(input, *support, out.as_deref(), argv).map(Output::Report),
        Command::Walk { input, time, matrix, pair, out } => {
            walk_cmd(input, *time, *matrix, *pair, out.as_deref(), argv).map(Output::Report)
        }
        Command::Pst { input, pair, horizon, step } => pst(input, *pair, *horizon, *step, argv).map(Output::Report),
        Command::Pgst { input, pair, horizon, step, out } => {
            pgst(input, *pair, *horizon, *step, out.as_deref(), argv).map(Output::Report)
        }
        Command::Quotient { input, partition, distance_from, coarsest: _, weights, lift, out } => quotient_cmd(
            input,
            partition.as_deref(),
            *distance_from,
            weights,
            *lift,
            out.as_deref(),
            argv,
        )
        .map(Output::Report),
        Command::Scheme { input, pq, mix_eigs, um_scan, roots, out } => {
            scheme_cmd(input, *pq, *mix_eigs, um_scan.as_deref(), roots.as_deref(), out.as_deref(), argv).map(Output::Report)
        }
        Command::UmScan { input, tmax, step, tol, out } => {
            um_scan(input, *tmax, *step, *tol, out.as_deref(), argv).map(Output::Report)
        }
        Command::Avgmix { input, interval, dist, cp, rank, gaussian_scan, out } => avgmix_cmd(
            input,
            *interval,
            dist.as_deref(),
            *cp,
            *rank,
            *gaussian_scan,
            out.as_deref(),
            argv,
        )
        .map(Output::Report),
    }
}

fn gen(input: &GraphInput, out: Option<&Path>, counts_header: bool, argv: &[String]) -> Outcome<Output> {
    let loaded = load(input)?;
    let mut text = write_edge_list(&loaded.graph);
    if counts_header {
        let body = text.split_once('\n').map(|(_, rest)| rest.to_string()).unwrap_or_default();
        text = format!("{} {}\n{body}", loaded.graph.n(), loaded.graph.edge_count());
    }
    match out {
        None => Ok(Output::Text(text)),
        Some(p) if p.as_os_str() == "-" => Ok(Output::Text(text)),
        Some(p) => {
            let mut b = Builder::new();
            write_file(p, &text, &mut b.outputs)?;
            b.put("stats", to_value(&loaded.graph.stats()));
            Ok(Output::Report(b.finish("gen", argv, &loaded)))
        }
    }
}

fn spectrum(input: &GraphInput, support: Option<usize>, out: Option<&Path>, argv: &[String]) -> Outcome<Report> {
    let loaded = load(input)?;
    let s = loaded.decompose()?;
    let mut b = Builder::new();
    b.spectral_tolerances(&s);
    b.put("spectrum", to_value(&s.summary()));
    b.put("residuals", to_value(&s.algebra_residuals()));
    b.put("stats", to_value(&loaded.graph.stats()));
    if let Some(u) = support {
        let u = loaded.vertex(u)?;
        b.put("support", json!({ "vertex": u.0, "indices": s.eigenvalue_support(u)? }));
    }
    if let Some(p) = out {
        write_file(p, &s.eigen_csv(), &mut b.outputs)?;
    }
    Ok(b.finish("spectrum", argv, &loaded))
}

fn walk_cmd(
    input: &GraphInput,
    t: f64,
    kind: MatrixKind,
    pair: Option<(usize, usize)>,
    out: Option<&Path>,
    argv: &[String],
) -> Outcome<Report> {
    if !t.is_finite() {
        return Err(Failure::usage("time must be finite"));
    }
    let loaded = load(input)?;
    let s = loaded.decompose()?;
    let mut b = Builder::new();
    b.spectral_tolerances(&s);
    b.put("time", time_value(t));
    match kind {
        MatrixKind::U => {
            let u = transition(&s, t);
            b.put("matrix", json!("U"));
            b.put("unitarity_defect", json!(u.unitarity_defect()));
            b.put("symmetry_defect", json!(u.symmetry_defect()));
            let (re, im) = (u.u.map(|z| z.re), u.u.map(|z| z.im));
            match out {
                Some(p) => {
                    write_file(&with_suffix(p, ".re.csv"), &matrix_csv(&re), &mut b.outputs)?;
                    write_file(&with_suffix(p, ".im.csv"), &matrix_csv(&im), &mut b.outputs)?;
                }
                None => b.put("values", json!({ "re": matrix_value(&re), "im": matrix_value(&im) })),
            }
        }
        MatrixKind::M => {
            let m = mixing(&s, t);
            b.put("matrix", json!("M"));
            b.put("stochastic_defect", json!(m.stochastic_defect()));
            b.put("uniform_deviation", json!(m.uniform_deviation()));
            match out {
                Some(p) => write_file(p, &matrix_csv(&m.m), &mut b.outputs)?,
                None => b.put("values", matrix_value(&m.m)),
            }
        }
    }
    if let Some((u, v)) = pair {
        let (u, v) = (loaded.vertex(u)?, loaded.vertex(v)?);
        let a = walk::amplitude(&s, u, v, t)?;
        b.put(
            "pair",
            json!({ "u": u.0, "v": v.0, "amplitude": { "re": a.re, "im": a.im }, "fidelity": a.norm().min(1.0) }),
        );
    }
    Ok(b.finish("walk", argv, &loaded))
}

fn pst(
    input: &GraphInput,
    (u, v): (usize, usize),
    horizon: Option<f64>,
    step: Option<f64>,
    argv: &[String],
) -> Outcome<Report> {
    let loaded = load(input)?;
    let s = loaded.decompose()?;
    let (u, v) = (loaded.vertex(u)?, loaded.vertex(v)?);
    let mut b = Builder::new();
    b.spectral_tolerances(&s);
    b.tol("cospectral", transfer::COSPECTRAL_TOL);
    b.tol("parallel", transfer::PARALLEL_TOL);
    b.tol("transfer", transfer::TRANSFER_TOL);
    b.tol("inconclusive", transfer::INCONCLUSIVE_TOL);
    let result = detect_pst_with(&s, u, v, PstOptions { horizon, step })?;
    b.put("strong_cospectrality", to_value(&strong_cospectral(&s, u, v)?));
    b.put("support_test", to_value(&no_pst_support_test(&s, u, v)?));
    if let Some(t) = result.time {
        b.put("time", time_value(t));
        let bounds = check_bounds(&loaded.graph, &result, &s, u)?;
        if !bounds.all_hold() {
            b.warnings.extend(bounds.findings.iter().cloned());
        }
        b.put("bounds", to_value(&bounds));
    }
    b.put("result", to_value(&result));
    Ok(b.finish("pst", argv, &loaded))
}

fn pgst(
    input: &GraphInput,
    (u, v): (usize, usize),
    horizon: f64,
    step: Option<f64>,
    out: Option<&Path>,
    argv: &[String],
) -> Outcome<Report> {
    let loaded = load(input)?;
    let s = loaded.decompose()?;
    let (u, v) = (loaded.vertex(u)?, loaded.vertex(v)?);
    let scan = pgst_scan(&s, u, v, horizon, step)?;
    let mut b = Builder::new();
    b.spectral_tolerances(&s);
    b.put("best_time", time_value(scan.best_t));
    b.warnings.push("a finite scan estimates the supremum; it does not decide pretty good state transfer".into());
    if let Some(p) = out {
        let mut csv = String::from("t,fidelity\n");
        for r in &scan.records {
            csv.push_str(&format!("{},{}\n", r.t, r.fidelity));
        }
        write_file(p, &csv, &mut b.outputs)?;
    }
    b.put("scan", to_value(&scan));
    Ok(b.finish("pgst", argv, &loaded))
}

fn quotient_cmd(
    input: &GraphInput,
    partition: Option<&Path>,
    distance_from: Option<usize>,
    weights: &[(usize, String)],
    lift: Option<(usize, usize)>,
    out: Option<&Path>,
    argv: &[String],
) -> Outcome<Report> {
    let loaded = load(input)?;
    let g = &loaded.graph;
    let mut b = Builder::new();
    b.tol("invariance", quotient::INVARIANCE_TOL);
    b.tol("degree", quotient::DEGREE_TOL);
    let (mut p, source) = match (partition, distance_from) {
        (Some(path), _) => (Partition::parse(&read_text(path)?, g.n())?, "file"),
        (None, Some(a)) => (Partition::distance(g, loaded.vertex(a)?)?, "distance"),
        (None, None) => (coarsest_equitable(g, &Partition::unit(g.n()))?, "coarsest-equitable"),
    };
    for (v, w) in weights {
        let w = Weight::from_str(w).map_err(|e| Failure::input(e.to_string()))?;
        p = p.set_weight(*v, w)?;
    }
    let check = is_equitable(g, &p)?;
    let q = quotient::quotient(g, &p)?;
    if !check.equitable {
        b.warnings.push("partition is not equitable".into());
    }
    if !q.is_invariant() {
        b.warnings.push(format!("‖AS − SB‖ = {:e} exceeds the invariance tolerance", q.residual));
    }
    b.put(
        "partition",
        json!({
            "source": source,
            "blocks": p.blocks(),
            "weights": p.weights().iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
    );
    b.put("equitable", to_value(&check));
    b.put("degree_matrix", out_degree_matrix(g, &p)?.map(|m| matrix_value(&m)).unwrap_or(Value::Null));
    b.put("residual", json!(q.residual));
    b.put("invariant", json!(q.is_invariant()));
    match out {
        Some(path) => write_file(path, &matrix_csv(&q.b), &mut b.outputs)?,
        None => b.put("b", matrix_value(&q.b)),
    }
    if let Some((x, y)) = lift {
        let block_of = p.block_of();
        let (bx, by) = (block_of[loaded.vertex(x)?.0], block_of[loaded.vertex(y)?.0]);
        let l = lift_pst(g, &p, bx, by)?;
        if let Some(t) = l.result.time {
            b.put("lift_time", time_value(t));
        }
        b.put("lift", to_value(&l));
    }
    Ok(b.finish("quotient", argv, &loaded))
}

fn scheme_cmd(
    input: &GraphInput,
    pq: bool,
    mix_eigs: Option<f64>,
    um: Option<&[f64]>,
    roots: Option<&[f64]>,
    out: Option<&Path>,
    argv: &[String],
) -> Outcome<Report> {
    let loaded = load(input)?;
    let sch = scheme_from_drg(&loaded.graph)?;
    let mut b = Builder::new();
    b.tol("scheme", scheme::SCHEME_TOL);
    b.tol("imaginary", scheme::IMAGINARY_TOL);
    let summary = sch.summary();
    let mut info = to_value(&summary);
    let obj = info.as_object_mut().expect("summary is an object");
    if pq {
        obj.insert("basis_residual".into(), json!(sch.basis_residual()));
    } else {
        obj.remove("p");
        obj.remove("q");
    }
    b.put("scheme", info);
    if let Some(p) = out {
        write_file(&with_suffix(p, "P.csv"), &matrix_csv(&sch.p), &mut b.outputs)?;
        write_file(&with_suffix(p, "Q.csv"), &matrix_csv(&sch.q), &mut b.outputs)?;
    }
    if let Some(t) = mix_eigs {
        let ev = mixing_eigenvalues(&sch, t)?;
        let uniform = scheme::uniform_mixing_test(&sch, t, scheme::UNIFORM_TOL)?;
        b.put("mixing_eigenvalues", json!({ "time": time_value(t), "lambdas": ev.lambdas, "max_imaginary": ev.max_imaginary, "uniform": uniform }));
        b.tol("uniform", scheme::UNIFORM_TOL);
    }
    if let Some(&[tmax, step]) = um {
        let s = SpectralDecomposition::from_symmetric(loaded.graph.adjacency_matrix(), loaded.cluster_tol)?;
        let r = uniform_mixing_scan(&s, tmax, step, scheme::UNIFORM_TOL)?;
        b.put("um_scan", json!({ "report": to_value(&r), "best_time": time_value(r.best_t) }));
        b.tol("uniform", scheme::UNIFORM_TOL);
    }
    if let Some(&[tau, n]) = roots {
        if n < 1.0 || n.fract() != 0.0 {
            return Err(Failure::usage(format!("root order bound must be a positive integer, got {n}")));
        }
        let s = SpectralDecomposition::from_symmetric(loaded.graph.adjacency_matrix(), loaded.cluster_tol)?;
        b.put("roots", to_value(&roots_of_unity_probe(&s, tau, n as usize)?));
        b.tol("root", scheme::ROOT_TOL);
    }
    Ok(b.finish("scheme", argv, &loaded))
}

fn um_scan(
    input: &GraphInput,
    tmax: f64,
    step: f64,
    tol: Option<f64>,
    out: Option<&Path>,
    argv: &[String],
) -> Outcome<Report> {
    let loaded = load(input)?;
    let s = loaded.decompose()?;
    let tol = tol.unwrap_or(scheme::UNIFORM_TOL);
    let r = uniform_mixing_scan(&s, tmax, step, tol)?;
    let mut b = Builder::new();
    b.spectral_tolerances(&s);
    b.tol("uniform", tol);
    b.put("best_time", time_value(r.best_t));
    if let Some(p) = out {
        let mut csv = String::from("t,deviation\n");
        for m in &r.best_minima {
            csv.push_str(&format!("{},{}\n", m.t, m.deviation));
        }
        write_file(p, &csv, &mut b.outputs)?;
    }
    b.warnings.push("grid scans are descriptive; a miss is not a proof of absence".into());
    b.put("report", to_value(&r));
    Ok(b.finish("um-scan", argv, &loaded))
}

/// `point:tau`, `uniform:T`, `gaussian:mu,sigma`, `exp:lambda`,
/// `samples:<file>`, `density:<file>`.
fn parse_distribution(spec: &str) -> Outcome<DistributionSpec> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("distribution `{spec}` needs the form kind:parameters")))?;
    let nums = |s: &str| -> Outcome<Vec<f64>> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::usage(format!("bad number `{x}` in `{spec}`"))))
            .collect()
    };
    let columns = |path: &str| -> Outcome<Vec<Vec<f64>>> {
        read_text(Path::new(path))?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty() && !l.starts_with(|c: char| c.is_alphabetic()))
            .map(|l| {
                l.split([',', ' ', '\t'])
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse::<f64>().map_err(|_| Failure::input(format!("bad number `{x}` in {path}"))))
                    .collect()
            })
            .collect()
    };
    Ok(match (kind, nums(rest).ok().as_deref()) {
        ("point", Some(&[tau])) => DistributionSpec::Point { tau },
        ("uniform", Some(&[length])) => DistributionSpec::Uniform { length },
        ("gaussian", Some(&[mu, sigma])) => DistributionSpec::Gaussian { mu, sigma },
        ("exp" | "exponential", Some(&[rate])) => DistributionSpec::Exponential { rate },
        ("samples", _) => DistributionSpec::Samples { times: columns(rest)?.into_iter().flatten().collect() },
        ("density", _) => {
            let rows = columns(rest)?;
            if rows.iter().any(|r| r.len() != 2) {
                return Err(Failure::input(format!("{rest}: density rows must be `t,f`")));
            }
            DistributionSpec::Tabulated {
                times: rows.iter().map(|r| r[0]).collect(),
                density: rows.iter().map(|r| r[1]).collect(),
            }
        }
        _ => return Err(Failure::usage(format!("unrecognized distribution `{spec}`"))),
    })
}

#[allow(clippy::too_many_arguments)]
fn avgmix_cmd(
    input: &GraphInput,
    interval: Option<f64>,
    dist: Option<&str>,
    cp: bool,
    rank: bool,
    gaussian_scan: bool,
    out: Option<&Path>,
    argv: &[String],
) -> Outcome<Report> {
    let loaded = load(input)?;
    let s = loaded.decompose()?;
    let mut b = Builder::new();
    b.spectral_tolerances(&s);
    b.tol("rank_eps", avgmix::RANK_EPS);
    b.tol("psd", avgmix::PSD_TOL);
    let (analysis, label): (AvgMixingAnalysis, Value) = match (interval, dist) {
        (Some(t), _) => (
            AvgMixingAnalysis::from_matrix(interval_average(&s, t)?),
            json!({ "kind": "interval", "length": t }),
        ),
        (None, Some(spec)) => {
            let d = parse_distribution(spec)?;
            if matches!(d, DistributionSpec::Tabulated { .. }) {
                b.tol("density", avgmix::DENSITY_TOL);
            }
            (distribution_average(&s, &d)?, to_value(&d))
        }
        (None, None) => (average_mixing(&s), json!({ "kind": "limit" })),
    };
    let mut a = to_value(&analysis);
    let obj = a.as_object_mut().expect("analysis is an object");
    if let Some(p) = out {
        obj.remove("matrix");
        write_file(p, &matrix_csv(&analysis.matrix), &mut b.outputs)?;
    }
    b.put("average", label);
    b.put("analysis", a);
    if cp {
        b.tol("cp", avgmix::CP_TOL);
        match cp_factorize(&s) {
            Ok(f) => b.put("cp", json!({ "applicable": true, "factorization": to_value(&f), "bounds_are_upper_bounds": true })),
            Err(Error::NotApplicable(reason)) => {
                b.warnings.push(format!("cp factorization not applicable: {reason}"));
                b.put("cp", json!({ "applicable": false, "reason": reason }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if rank {
        b.put("rank_probe", to_value(&drg_rank_probe(&loaded.graph)?));
    }
    if gaussian_scan {
        let (mus, sigmas) = default_gaussian_grid();
        let scan = gaussian_rank_scan(&s, &mus, &sigmas)?;
        b.put(
            "gaussian_scan",
            json!({
                "grid": { "mu": [mus[0], mus[mus.len() - 1], mus.len()], "sigma": [sigmas[0], sigmas[sigmas.len() - 1], sigmas.len()] },
                "min_rank": scan.min_rank,
                "closest_to_rank_one": to_value(&scan.closest_to_rank_one),
            }),
        );
    }
    Ok(b.finish("avgmix", argv, &loaded))
}
