use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{Block, ExperimentConfig, Kind, EXIT_CAP, EXIT_CONFIG, EXIT_FAILED, EXIT_OK};
use crate::density::{compare_report, run_census, CensusPredicate, Comparison, DensityReport, Experiment, Mode, Normalization};
use crate::dvr::{lift_search, verify_certificate, DvrPoint, LiftOutcome, LiftProblem, RatField};
use crate::error::{Error, Result};
use crate::gf::{make_field, Gf};
use crate::homog::text::parse_poly;
use crate::ideal::{hilbert_dim, ClosedPoint, DimVerdict, SubschemeSpec};
use crate::scheme::{closed_point_counts, PointCensus};
use crate::zeta::{inverse_zeta_points, inverse_zeta_projective, zeta_truncated, Region, Shape, Stratum, TaylorFactor};

const DEFAULT_TRUNCATION: usize = 12;

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    /// Restrict to kinds accepted by a subcommand.
    pub accept: Option<fn(Kind) -> bool>,
}

/// Rendered outputs, written only after the whole run succeeds.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub message: String,
    pub written: Vec<PathBuf>,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Config(_)
        | Error::Parse(_)
        | Error::Json(_)
        | Error::InvalidArgument(_)
        | Error::NotPrime(_)
        | Error::ZeroDegree
        | Error::Unsupported(_)
        | Error::Divergence { .. }
        | Error::DegreeMismatch { .. }
        | Error::FieldMismatch(..)
        | Error::IncompatibleTower { .. } => EXIT_CONFIG,
        _ => EXIT_FAILED,
    }
}

/// Loads, validates and runs a config file, then writes its artifacts.
pub fn run(path: &Path, ov: &Overrides) -> RunOutcome {
    let fail = |e: Error| RunOutcome {
        exit_code: exit_code_for(&e),
        message: format!("error: {e}"),
        written: Vec::new(),
    };
    let cfg = match ExperimentConfig::load(path) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(accept) = ov.accept {
        if !accept(cfg.kind) {
            return fail(Error::Config(format!("this subcommand does not run '{}' experiments", cfg.kind.name())));
        }
    }
    let (passed, artifacts) = match run_config(&cfg, ov) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let dir = ov.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let mut written = Vec::new();
    let mut write = || -> std::io::Result<()> {
        std::fs::create_dir_all(&dir)?;
        for (name, body) in &artifacts.files {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            written.push(p);
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(Error::Io(e));
    }
    RunOutcome {
        exit_code: if passed { EXIT_OK } else { EXIT_FAILED },
        message: artifacts.summary,
        written,
    }
}

/// Runs a parsed config. Returns whether every check passed and the
/// artifacts to write.
pub fn run_config(cfg: &ExperimentConfig, ov: &Overrides) -> Result<(bool, Artifacts)> {
    let k = make_field(cfg.field.p, cfg.field.s)?;
    let threads = ov
        .threads
        .or(cfg.threads)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let seed = ov.seed.or(cfg.seed).unwrap_or(0);
    match cfg.kind {
        Kind::ZetaTable => zeta_table(cfg, &k),
        Kind::DvrLift => dvr_lift(cfg, &k, threads),
        _ => census(cfg, &k, threads, seed),
    }
}

fn block_to_spec(k: &Gf, n: usize, b: &Block) -> Result<SubschemeSpec> {
    match b {
        Block::Points(pts) => {
            let pts = pts.iter().map(|s| ClosedPoint::parse(k, s)).collect::<Result<Vec<_>>>()?;
            SubschemeSpec::from_points(k, n, pts)
        }
        Block::Ideal(gens) => {
            let gens = gens.iter().map(|s| parse_poly(k, n, s, None)).collect::<Result<Vec<_>>>()?;
            SubschemeSpec::from_ideal(k, n, gens)
        }
    }
}

fn point_degrees(spec: &SubschemeSpec) -> Option<Vec<u32>> {
    spec.points().map(|p| p.iter().map(ClosedPoint::degree).collect())
}

fn dimension(spec: &SubschemeSpec) -> Result<Option<i64>> {
    if let Some(p) = spec.points() {
        return Ok(Some(if p.is_empty() { -1 } else { 0 }));
    }
    Ok(match hilbert_dim(spec.field(), spec.n(), &spec.ideal_gens()?, spec.n() + 2)? {
        DimVerdict::Dim(d) => Some(d),
        DimVerdict::Inconclusive => None,
    })
}

fn only_projective_space(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.x.is_some() {
        return Err(Error::Unsupported(format!("{} is implemented for X = P^n only", cfg.kind.name())));
    }
    Ok(())
}

fn build_experiment(cfg: &ExperimentConfig, k: &Gf, threads: usize, seed: u64) -> Result<Experiment> {
    let n = cfg.n;
    let q = k.q() as u64;
    let spec = |b: &Option<Block>| b.as_ref().map(|b| block_to_spec(k, n, b)).transpose();
    let x = spec(&cfg.x)?.unwrap_or_else(|| SubschemeSpec::whole(k, n));
    let mut z = spec(&cfg.z)?.unwrap_or_else(|| SubschemeSpec::empty(k, n));
    let w = spec(&cfg.w)?;
    let truncation = cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let (predicate, default_shape) = match cfg.kind {
        Kind::Avoidance => {
            let w = w.expect("checked");
            let degs = point_degrees(&w).expect("points block");
            (CensusPredicate::Avoids(w.points().expect("points block").to_vec()), Some(Shape::Avoidance { q, degrees: degs }))
        }
        Kind::Containment => {
            let w = w.expect("checked");
            let shape = match dimension(&w)? {
                Some(dim) if dim >= 1 => Some(Shape::Containment { w_dim: dim }),
                _ => None,
            };
            (CensusPredicate::Contains(w), shape)
        }
        Kind::SmoothDensity => {
            let shape = match (&cfg.x, point_degrees(&z)) {
                (None, Some(zdeg)) => Some(Shape::Smooth {
                    q,
                    strata: vec![Stratum {
                        m: n,
                        u_minus_v: Region::ProjectiveSpace { n, removed: zdeg.clone() },
                        v_points: zdeg.iter().map(|&d| (d, 0)).collect(),
                    }],
                    taylor: None,
                    truncation,
                }),
                (Some(_), Some(zdeg)) if zdeg.is_empty() => {
                    let census = closed_point_counts(&x, truncation)?;
                    Some(Shape::Smooth {
                        q,
                        strata: vec![Stratum {
                            m: census.dim.max(0) as usize,
                            u_minus_v: Region::Census { census },
                            v_points: vec![],
                        }],
                        taylor: None,
                        truncation,
                    })
                }
                _ => None,
            };
            (CensusPredicate::Smooth(x.clone()), shape)
        }
        Kind::TaylorDensity => {
            only_projective_space(cfg)?;
            if cfg.z.is_some() {
                return Err(Error::Config("taylor_density imposes Z = Y itself; drop the 'z' block".into()));
            }
            let y = spec(&cfg.y)?.expect("checked");
            let ydeg = point_degrees(&y).expect("points block");
            let h0 = ydeg.iter().try_fold(1u128, |acc, &d| acc.checked_mul((q as u128).checked_pow(d)?));
            let h0 = h0.ok_or_else(|| Error::InvalidArgument("H^0(Y, O_Y) is too large".into()))?;
            let pts = y.points().expect("points block").to_vec();
            z = y;
            let shape = Shape::Smooth {
                q,
                strata: vec![Stratum {
                    m: n,
                    u_minus_v: Region::ProjectiveSpace { n, removed: ydeg },
                    v_points: vec![],
                }],
                taylor: Some(TaylorFactor { t_size: 1, h0_size: h0 }),
                truncation,
            };
            (CensusPredicate::SmoothAwayFrom(pts), Some(shape))
        }
        Kind::SncDensity => {
            let components = cfg.components.iter().map(|b| block_to_spec(k, n, b)).collect::<Result<Vec<_>>>()?;
            (CensusPredicate::Snc { u: x.clone(), components }, None)
        }
        Kind::IrreducibilityDensity | Kind::IntegralityDensity => {
            only_projective_space(cfg)?;
            let z_codim = match dimension(&z)? {
                Some(d) => n as i64 - d,
                None => 0,
            };
            let shape = Some(Shape::Irreducibility { x_dim: n as i64, z_codim });
            let pred = if cfg.kind == Kind::IrreducibilityDensity {
                CensusPredicate::Irreducible
            } else {
                CensusPredicate::Integral
            };
            (pred, shape)
        }
        Kind::NormalDensity => {
            only_projective_space(cfg)?;
            (CensusPredicate::NormalR1, None)
        }
        Kind::DvrLift | Kind::ZetaTable => unreachable!("not a census kind"),
    };
    let range = cfg.degrees.expect("checked");
    let mut e = Experiment::new(&cfg.name(), k, n, predicate, range.lo, range.hi)
        .with_z(z)
        .with_width(threads);
    if cfg.kind == Kind::TaylorDensity {
        e = e.with_normalization(Normalization::Ambient);
    }
    if let Some(shape) = cfg.prediction.clone().or(default_shape) {
        e = e.with_prediction(shape);
    }
    if let Some(samples) = cfg.samples {
        e = e.with_mode(Mode::Subsample { samples, seed });
    }
    if let Some(m) = cfg.max_inconclusive {
        e.max_inconclusive = m;
    }
    e.validate()?;
    Ok(e)
}

#[derive(Serialize)]
struct CensusArtifact<'a> {
    report: &'a DensityReport,
    comparison: Option<Comparison>,
    passed: bool,
}

fn census(cfg: &ExperimentConfig, k: &Gf, threads: usize, seed: u64) -> Result<(bool, Artifacts)> {
    let e = build_experiment(cfg, k, threads, seed)?;
    let report = run_census(&e)?;
    let comparison = match (&report.prediction, &cfg.tolerance) {
        (Some(p), Some(t)) => Some(compare_report(&report, p, t)),
        _ => None,
    };
    let clean = report.rows.iter().all(|r| r.inconclusive == 0);
    let passed = clean && comparison.as_ref().is_none_or(|c| c.passed);
    let mut summary = report.summary();
    if let Some(c) = &comparison {
        for v in &c.degrees {
            let tol = v.tolerance.map_or_else(|| "-".to_string(), |t| format!("{t}"));
            let _ = writeln!(summary, "d={} deviation {:.6} tolerance {tol} {}", v.d, v.deviation, if v.within { "ok" } else { "FAIL" });
        }
    }
    if !clean {
        summary.push_str("inconclusive verdicts present\n");
    }
    let _ = writeln!(summary, "{}", if passed { "PASS" } else { "FAIL" });
    let name = cfg.name();
    let json = serde_json::to_string_pretty(&CensusArtifact {
        report: &report,
        comparison,
        passed,
    })?;
    Ok((
        passed,
        Artifacts {
            files: vec![
                (format!("{name}.json"), json),
                (format!("{name}.csv"), report.to_csv()),
                (format!("{name}.summary.txt"), summary.clone()),
            ],
            summary,
        },
    ))
}

#[derive(Serialize)]
struct ZetaRow {
    r: usize,
    a: u128,
    b: u128,
    /// `1/zeta` truncated after degree `r`.
    inverse_partial: f64,
}

#[derive(Serialize)]
struct ZetaArtifact {
    q: u64,
    n: usize,
    s: u32,
    truncation: usize,
    rows: Vec<ZetaRow>,
    inverse: f64,
    error_bound: f64,
    exact: Option<String>,
    exact_value: Option<f64>,
    passed: bool,
}

fn zeta_table(cfg: &ExperimentConfig, k: &Gf) -> Result<(bool, Artifacts)> {
    let n = cfg.n;
    let q = k.q() as u64;
    let b = cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let x = cfg.x.as_ref().map(|blk| block_to_spec(k, n, blk)).transpose()?;
    let census = match &x {
        None => PointCensus::projective_space(q, n, b)?,
        Some(spec) => closed_point_counts(spec, b)?,
    };
    let s = cfg.s.unwrap_or((census.dim + 1).max(1) as u32);
    let exact = match &x {
        None => Some(inverse_zeta_projective(q, n, s)?),
        Some(spec) => point_degrees(spec).map(|d| inverse_zeta_points(q, &d, s)),
    };
    let (inverse, error_bound) = zeta_truncated(&census, s, b)?.inverse();
    let rows = (1..=b)
        .map(|r| {
            Ok(ZetaRow {
                r,
                a: census.a[r - 1],
                b: census.b[r - 1],
                inverse_partial: zeta_truncated(&census, s, r)?.inverse().0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let exact_value = exact.as_ref().and_then(|e| e.to_f64());
    let passed = match (exact_value, cfg.tolerance.as_ref().and_then(|t| t.default)) {
        (Some(v), Some(tol)) => (inverse - v).abs() <= tol,
        _ => true,
    };
    let artifact = ZetaArtifact {
        q,
        n,
        s,
        truncation: b,
        rows,
        inverse,
        error_bound,
        exact: exact.map(|e| e.to_string()),
        exact_value,
        passed,
    };
    let mut csv = String::from("r,a_r,b_r,inverse_partial\n");
    for r in &artifact.rows {
        let _ = writeln!(csv, "{},{},{},{}", r.r, r.a, r.b, r.inverse_partial);
    }
    let bs: Vec<String> = artifact.rows.iter().map(|r| r.b.to_string()).collect();
    let mut summary = format!("closed points over F_{q} in P^{n}, degrees 1..{b}\nb_r = {}\n", bs.join(", "));
    let _ = writeln!(summary, "1/zeta({s}) truncated at B={b}: {inverse:.9} (error <= {error_bound:.3e})");
    if let (Some(e), Some(v)) = (&artifact.exact, artifact.exact_value) {
        let _ = writeln!(summary, "closed form: {e} = {v:.9}");
    }
    let _ = writeln!(summary, "{}", if passed { "PASS" } else { "FAIL" });
    let name = cfg.name();
    Ok((
        passed,
        Artifacts {
            files: vec![
                (format!("{name}.json"), serde_json::to_string_pretty(&artifact)?),
                (format!("{name}.csv"), csv),
                (format!("{name}.summary.txt"), summary.clone()),
            ],
            summary,
        },
    ))
}

/// Builds the lift problem described by a `dvr_lift` config.
pub(crate) fn lift_problem(cfg: &ExperimentConfig, k: &Gf, threads: usize) -> Result<LiftProblem> {
    let spec = cfg.lift.as_ref().expect("checked");
    let kt = RatField::new(k);
    let x = spec.x.iter().map(|s| parse_poly(&kt, cfg.n, s, None)).collect::<Result<Vec<_>>>()?;
    let z = spec.z.iter().map(|s| DvrPoint::parse(&kt, s)).collect::<Result<Vec<_>>>()?;
    let mut p = LiftProblem::new(k, cfg.n, spec.d)
        .with_x(x)
        .with_z(z)
        .with_predicates(&spec.predicates)
        .with_count(spec.count)
        .with_width(threads);
    p.t_degree = spec.t_degree;
    if let Some(b) = spec.special_budget {
        p.special_budget = b;
    }
    if let Some(b) = spec.lift_budget {
        p.lift_budget = b;
    }
    Ok(p)
}

fn dvr_lift(cfg: &ExperimentConfig, k: &Gf, threads: usize) -> Result<(bool, Artifacts)> {
    let problem = lift_problem(cfg, k, threads)?;
    let outcome: LiftOutcome = lift_search(&problem)?;
    let mut verified = 0;
    for c in &outcome.certificates {
        if verify_certificate(&problem, c)? {
            verified += 1;
        }
    }
    let passed = outcome.complete() && verified == outcome.certificates.len();
    let mut summary = outcome.summary();
    let _ = writeln!(summary, "re-verified {verified}/{}", outcome.certificates.len());
    let _ = writeln!(summary, "{}", if passed { "PASS" } else { "FAIL" });
    let name = cfg.name();
    Ok((
        passed,
        Artifacts {
            files: vec![
                (format!("{name}.certificates.json"), outcome.to_json()?),
                (format!("{name}.summary.txt"), summary.clone()),
            ],
            summary,
        },
    ))
}
