//! Job configuration, command pipelines and output files of the `specrange`
//! binary.

mod output;
mod svg;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dilation::dilate_contraction;
use crate::error::{Error, Result};
use crate::finrange::{c_spectrum_matrix, estimate_range, RangeEstimate, RangeOptions, SpectrumMode, EXHAUSTIVE_LIMIT};
use crate::limits::{
    essential_center, projected_range, range_sequence, spectrum_sequence, truncation_tail_bound, EssentialMethod,
    TruncationSchedule,
};
use crate::linalg::{hermitian_defect, is_normal, normal_eig, trace, unitarity_defect, CMat, MatrixJson};
use crate::opmodel::{OperatorKind, OperatorSpec};
use crate::planarsets::{hausdorff_cauchy_check, star_violation, PointCloud, Polygon};

pub use output::{write_atomic, write_cloud, write_json, write_polygon};
pub use svg::{emit_svg, render_svg};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Range,
    Spectrum,
    Converge,
    Dilate,
    Essential,
    Verify,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Consecutive Hausdorff distance below which a sequence counts as
    /// converged.
    pub hausdorff: f64,
    /// Unitarity and identity checks.
    pub algebra: f64,
    /// Star tolerance as a multiple of the cloud resolution.
    pub star_factor: f64,
    /// Residual of Birkhoff certificates.
    pub certificate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hausdorff: 1e-2,
            algebra: 1e-10,
            star_factor: 5.0,
            certificate: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    #[default]
    Range,
    Spectrum,
}

fn default_samples() -> usize {
    2000
}

fn default_prefix_len() -> usize {
    256
}

fn default_method() -> EssentialMethod {
    EssentialMethod::CesaroDiagonal
}

fn default_fill() -> Option<usize> {
    Some(200)
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Contents of `job.json`.
///
/// Operator and matrix fields hold either an inline JSON value or a path
/// (relative to the config file) to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Value>,
    #[serde(default, alias = "a", skip_serializing_if = "Option::is_none")]
    pub t: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Value>,
    /// Truncation size for infinite specs in `range` and `spectrum`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<TruncationSchedule>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Pitch divisor of the grid filling convex ranges; `null` disables it.
    #[serde(default = "default_fill")]
    pub fill: Option<usize>,
    #[serde(default)]
    pub sequence: SequenceKind,
    /// Ambient size for block approximations of both operators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<usize>,
    #[serde(default = "default_prefix_len")]
    pub prefix_len: usize,
    #[serde(default = "default_method")]
    pub method: EssentialMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub centers: Vec<[f64; 2]>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Directory that relative input paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for JobConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::parse(text).map_err(|e| Error::Input(format!("job config: {e}")))
    }

    fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn value_of(&self, field: &str, value: &Option<Value>) -> Result<(Value, String)> {
        match value {
            None => Err(Error::Input(format!("missing field `{field}`"))),
            Some(Value::String(p)) => {
                let path = self.resolve(Path::new(p));
                let text = fs::read_to_string(&path)
                    .map_err(|e| Error::Input(format!("{field}: cannot read {}: {e}", path.display())))?;
                let v = serde_json::from_str(&text)
                    .map_err(|e| Error::Input(format!("{field}: {}: {e}", path.display())))?;
                Ok((v, format!("{field} ({})", path.display())))
            }
            Some(v) => Ok((v.clone(), field.to_string())),
        }
    }

    pub fn operator(&self, field: &str) -> Result<OperatorSpec> {
        let value = match field {
            "c" => &self.c,
            "t" => &self.t,
            _ => return Err(Error::Input(format!("unknown operator field `{field}`"))),
        };
        let (v, origin) = self.value_of(field, value)?;
        serde_json::from_value(v).map_err(|e| Error::Input(format!("{origin}: {e}")))
    }

    pub fn matrix(&self) -> Result<CMat> {
        let (v, origin) = self.value_of("matrix", &self.matrix)?;
        let m: MatrixJson = serde_json::from_value(v).map_err(|e| Error::Input(format!("{origin}: {e}")))?;
        m.to_matrix()
    }

    fn schedule(&self) -> Result<TruncationSchedule> {
        let s = self
            .schedule
            .clone()
            .ok_or_else(|| Error::Input("missing field `schedule`".into()))?;
        s.validate()?;
        Ok(s)
    }

    fn range_options(&self, count: usize, seed: u64) -> RangeOptions {
        RangeOptions {
            count,
            seed,
            fill: self.fill,
            ..Default::default()
        }
    }
}

/// Result of one command: the exit code, a one-line summary and the files
/// written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Input(_) | Error::Json(_) | Error::Csv(_) | Error::Domain(_) | Error::SizeMismatch(_) => EXIT_INPUT,
        Error::Evaluation { .. } => EXIT_INPUT,
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        Error::Numerical(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

pub fn run(command: Command, cfg: &JobConfig) -> Result<Outcome> {
    match command {
        Command::Range => run_range(cfg),
        Command::Spectrum => run_spectrum(cfg),
        Command::Converge => run_converge(cfg),
        Command::Dilate => run_dilate(cfg),
        Command::Essential => run_essential(cfg),
        Command::Verify => run_verify(cfg),
        Command::Plot => run_plot(cfg),
    }
}

fn truncation_size(cfg: &JobConfig, ops: &[&OperatorSpec]) -> Result<usize> {
    let dims: Vec<usize> = ops.iter().filter_map(|o| o.dimension()).collect();
    if let Some(&d) = dims.first() {
        if dims.iter().any(|&e| e != d) {
            return Err(Error::Input(format!("operator dimensions differ: {dims:?}")));
        }
        if let Some(n) = cfg.size {
            if n > d {
                return Err(Error::Input(format!("size {n} exceeds the operator dimension {d}")));
            }
            return Ok(n);
        }
        return Ok(d);
    }
    cfg.size
        .ok_or_else(|| Error::Input("infinite-dimensional specs need a truncation `size`".into()))
}

fn complex_json(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn write_estimate(out: &Path, stem: &str, est: &RangeEstimate, files: &mut Vec<PathBuf>) -> Result<()> {
    let cloud_path = out.join(format!("{stem}_cloud.csv"));
    write_cloud(&cloud_path, &est.inner)?;
    files.push(cloud_path);
    if let Some(hull) = &est.outer {
        let hull_path = out.join(format!("{stem}_hull.csv"));
        write_polygon(&hull_path, hull)?;
        files.push(hull_path);
    }
    let svg_path = out.join(format!("{stem}.svg"));
    emit_svg(&est.inner, est.outer.as_ref(), &est.star_centers, &svg_path)?;
    files.push(svg_path);
    Ok(())
}

fn run_range(cfg: &JobConfig) -> Result<Outcome> {
    let c = cfg.operator("c")?;
    let t = cfg.operator("t")?;
    if !c.is_trace_class() && c.dimension().is_none() {
        return Err(Error::Hypothesis("C must be trace class (give decay.tail)".into()));
    }
    let n = truncation_size(cfg, &[&c, &t])?;
    let est = estimate_range(&c.truncate(n)?, &t.truncate(n)?, &cfg.range_options(cfg.samples, cfg.seed))?;
    let mut files = Vec::new();
    write_estimate(&cfg.out, "range", &est, &mut files)?;
    let meta_path = cfg.out.join("range.json");
    write_json(
        &meta_path,
        &json!({
            "n": n,
            "seed": est.seed,
            "count": est.count,
            "points": est.inner.len(),
            "resolution": est.inner.resolution(),
            "bound_radius": est.bound_radius,
            "star_centers": est.star_centers.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            "convex_outer_hull": est.outer.is_some(),
        }),
    )?;
    files.push(meta_path);
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: format!("range: n = {n}, {} points, seed {}", est.inner.len(), est.seed),
        files,
    })
}

fn eigenvalues_of(op: &OperatorSpec, n: usize) -> Result<Vec<Complex64>> {
    match op.kind() {
        OperatorKind::Diagonal(rule) => Ok((1..=n).map(|j| rule.value(j)).collect()),
        _ => {
            let m = op.truncate(n)?;
            if !is_normal(&m, 1e-10) {
                return Err(Error::Domain("spectrum needs normal operators".into()));
            }
            Ok(normal_eig(&m)?.0)
        }
    }
}

fn run_spectrum(cfg: &JobConfig) -> Result<Outcome> {
    let c = cfg.operator("c")?;
    let t = cfg.operator("t")?;
    let n = truncation_size(cfg, &[&c, &t])?;
    let gamma = eigenvalues_of(&c, n)?;
    let tau = eigenvalues_of(&t, n)?;
    let mode = if n <= EXHAUSTIVE_LIMIT {
        SpectrumMode::Exhaustive
    } else {
        SpectrumMode::Sampled {
            count: cfg.samples,
            seed: cfg.seed,
        }
    };
    let set = c_spectrum_matrix(&gamma, &tau, mode)?;
    let mut files = Vec::new();
    let cloud_path = cfg.out.join("spectrum_cloud.csv");
    write_cloud(&cloud_path, &set.points)?;
    files.push(cloud_path);
    let svg_path = cfg.out.join("spectrum.svg");
    emit_svg(&set.points, None, &[], &svg_path)?;
    files.push(svg_path);
    let meta_path = cfg.out.join("spectrum.json");
    write_json(
        &meta_path,
        &json!({
            "n": n,
            "seed": cfg.seed,
            "mode": set.mode,
            "points": set.points.len(),
            "resolution": set.points.resolution(),
        }),
    )?;
    files.push(meta_path);
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: format!("spectrum: n = {n}, {} points, seed {}", set.points.len(), cfg.seed),
        files,
    })
}

#[derive(Debug, Clone, Serialize)]
struct LevelReport {
    n: usize,
    cloud_file: String,
    hausdorff_to_prev: Option<f64>,
    tail_bound: Option<f64>,
    star_center: [f64; 2],
}

fn star_center(c: &OperatorSpec, t: &OperatorSpec, n: usize) -> Result<Complex64> {
    Ok(trace(&c.truncate(n)?) * trace(&t.truncate(n)?) / n as f64)
}

fn run_converge(cfg: &JobConfig) -> Result<Outcome> {
    let c = cfg.operator("c")?;
    let t = cfg.operator("t")?;
    let sched = cfg.schedule()?;
    let clouds: Vec<PointCloud> = match (cfg.sequence, cfg.ambient) {
        (SequenceKind::Range, None) => range_sequence(&c, &t, &sched, &cfg.range_options(0, 0))?
            .into_iter()
            .map(|e| e.inner)
            .collect(),
        (SequenceKind::Range, Some(ambient)) => sched
            .sizes
            .iter()
            .map(|&n| {
                projected_range(&c, &t, n, ambient, &cfg.range_options(sched.samples_per_size, sched.level_seed(n)))
                    .map(|e| e.inner)
            })
            .collect::<Result<_>>()?,
        (SequenceKind::Spectrum, None) => spectrum_sequence(&c, &t, &sched)?.into_iter().map(|s| s.points).collect(),
        (SequenceKind::Spectrum, Some(_)) => {
            return Err(Error::Input("`ambient` applies to range sequences only".into()));
        }
    };
    let report = hausdorff_cauchy_check(&clouds, cfg.tolerances.hausdorff)?;
    let mut files = Vec::new();
    let mut levels = Vec::new();
    for (k, (cloud, &n)) in clouds.iter().zip(&sched.sizes).enumerate() {
        let name = format!("level_{n:04}.csv");
        let path = cfg.out.join(&name);
        write_cloud(&path, cloud)?;
        files.push(path);
        levels.push(LevelReport {
            n,
            cloud_file: name,
            hausdorff_to_prev: k.checked_sub(1).map(|p| report.distances[p]),
            tail_bound: truncation_tail_bound(&c, &t, n),
            star_center: complex_json(star_center(&c, &t, n)?),
        });
    }
    let last = clouds.last().expect("schedule is non-empty");
    let center = star_center(&c, &t, *sched.sizes.last().expect("non-empty"))?;
    let star_tol = (cfg.tolerances.star_factor * last.resolution()).max(f64::EPSILON);
    let star = star_violation(&last.clone().with_point(center)?, center, star_tol)?;
    let svg_path = cfg.out.join("converge.svg");
    emit_svg(last, None, &[center], &svg_path)?;
    files.push(svg_path);
    let meta_path = cfg.out.join("convergence.json");
    write_json(
        &meta_path,
        &json!({
            "seed": sched.seed,
            "sequence": cfg.sequence,
            "tol": report.tol,
            "converged": report.converged,
            "converged_from": report.converged_from,
            "kuratowski_gap": report.kuratowski_gap,
            "final_star_violation": star.map(|v| json!({
                "target": complex_json(v.target),
                "point": complex_json(v.point),
                "distance": v.distance,
            })),
            "levels": levels,
        }),
    )?;
    files.push(meta_path);
    let last_d = report.distances.last().copied().unwrap_or(0.0);
    Ok(Outcome {
        exit_code: if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED },
        summary: format!(
            "converge: {} levels, last Δ = {last_d:.3e}, {} at tol {:e}, seed {}",
            clouds.len(),
            if report.converged { "converged" } else { "not converged" },
            report.tol,
            sched.seed
        ),
        files,
    })
}

fn run_dilate(cfg: &JobConfig) -> Result<Outcome> {
    let u = cfg.matrix()?;
    let d = dilate_contraction(&u)?;
    let n = u.nrows();
    let defect = unitarity_defect(&d.v);
    let identity = (&d.blocks.u * d.blocks.u.adjoint() + &d.blocks.q * d.blocks.q.adjoint() - CMat::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > cfg.tolerances.algebra || hermitian_defect(&d.blocks.q) > cfg.tolerances.algebra {
        return Err(Error::Numerical(format!("dilation unitarity defect {defect:e}")));
    }
    let path = cfg.out.join("dilation.json");
    write_json(
        &path,
        &json!({
            "n": n,
            "seed": cfg.seed,
            "v": MatrixJson::from_matrix(&d.v),
            "unitarity_defect": defect,
            "block_identity_defect": identity,
        }),
    )?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: format!("dilate: {n}×{n} → {0}×{0}, ‖V†V − I‖ = {defect:.3e}", 2 * n),
        files: vec![path],
    })
}

fn run_essential(cfg: &JobConfig) -> Result<Outcome> {
    let t = cfg.operator("t")?;
    let est = essential_center(&t, cfg.prefix_len, cfg.method)?;
    let mut files = Vec::new();
    let cand_path = cfg.out.join("essential_candidates.csv");
    write_cloud(&cand_path, &est.center_candidates)?;
    files.push(cand_path);
    if let Some(hull) = &est.accumulation_hull {
        let hull_path = cfg.out.join("essential_hull.csv");
        write_polygon(&hull_path, hull)?;
        files.push(hull_path);
    }
    let meta_path = cfg.out.join("essential.json");
    write_json(
        &meta_path,
        &json!({
            "seed": cfg.seed,
            "method": est.method,
            "prefix_len": est.prefix_len,
            "center": complex_json(est.center),
            "converged": est.converged,
            "cesaro_means": est.cesaro_means.iter().map(|&(k, m)| json!({"k": k, "mean": complex_json(m)})).collect::<Vec<_>>(),
            "off_diagonal_ignored": est.off_diagonal_ignored,
            "accumulation_hull_is_heuristic": est.accumulation_hull.is_some(),
        }),
    )?;
    files.push(meta_path);
    Ok(Outcome {
        exit_code: if est.converged { EXIT_OK } else { EXIT_NOT_CONVERGED },
        summary: format!(
            "essential: center {:.6}{:+.6}i, {}",
            est.center.re,
            est.center.im,
            if est.converged { "converged" } else { "no convergence detected" }
        ),
        files,
    })
}

fn run_verify(cfg: &JobConfig) -> Result<Outcome> {
    let report = verify::run_suite(cfg.seed, &cfg.tolerances);
    let path = cfg.out.join("verify.json");
    write_json(&path, &report)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Ok(Outcome {
        exit_code: if report.passed { EXIT_OK } else { EXIT_NOT_CONVERGED },
        summary: if failed.is_empty() {
            format!("verify: {} checks passed", report.checks.len())
        } else {
            format!("verify: failed {}", failed.join(", "))
        },
        files: vec![path],
    })
}

fn run_plot(cfg: &JobConfig) -> Result<Outcome> {
    let cloud_path = cfg
        .cloud
        .as_ref()
        .ok_or_else(|| Error::Input("missing field `cloud`".into()))?;
    let cloud = PointCloud::read_csv(fs::File::open(cfg.resolve(cloud_path))?, 0.0)?;
    let hull = match &cfg.hull {
        Some(p) => Some(Polygon::read_csv(fs::File::open(cfg.resolve(p))?)?),
        None => None,
    };
    let centers: Vec<Complex64> = cfg.centers.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    let path = cfg.out.join("plot.svg");
    emit_svg(&cloud, hull.as_ref(), &centers, &path)?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: format!("plot: {} points", cloud.len()),
        files: vec![path],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(text: &str, out: &Path) -> JobConfig {
        let mut cfg = JobConfig::from_json(text).unwrap();
        cfg.out = out.to_path_buf();
        cfg
    }

    #[test]
    fn defaults_are_documented_values() {
        let cfg = JobConfig::default();
        assert_eq!(cfg.tolerances.hausdorff, 1e-2);
        assert_eq!(cfg.tolerances.algebra, 1e-10);
        assert_eq!(cfg.tolerances.star_factor, 5.0);
        assert_eq!(cfg.samples, 2000);
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = JobConfig::from_json(r#"{"sede": 3}"#).unwrap_err();
        assert!(err.to_string().contains("sede"), "{err}");
        assert_eq!(exit_code_for(&err), EXIT_INPUT);
    }

    #[test]
    fn bad_operator_names_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = job(
            r#"{"c": {"kind": "diagonal", "rule": {"type": "geometric", "ratoi": 0.5}}, "t": {"kind": "diagonal", "rule": {"type": "constant", "value": 1}}}"#,
            dir.path(),
        );
        let err = run(Command::Range, &cfg).unwrap_err();
        assert!(err.to_string().contains("ratoi"), "{err}");
        assert_eq!(exit_code_for(&err), EXIT_INPUT);
    }

    #[test]
    fn identity_c_gives_trace_of_a() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = job(
            r#"{"c": {"kind": "finite_matrix", "matrix": [[1,0,0],[0,1,0],[0,0,1]]},
                "t": {"kind": "finite_matrix", "matrix": [[1,2,0],[0,[0,1],0],[3,0,-2]]},
                "samples": 50}"#,
            dir.path(),
        );
        let out = run(Command::Range, &cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        let cloud = PointCloud::read_csv(fs::File::open(dir.path().join("range_cloud.csv")).unwrap(), 0.0).unwrap();
        assert!(cloud.points().iter().all(|z| (z - Complex64::new(-1.0, 1.0)).norm() < 1e-12));
    }

    #[test]
    fn range_runs_are_byte_identical() {
        let text = r#"{"c": {"kind": "finite_matrix", "matrix": [[1,0],[0,0]]},
                       "t": {"kind": "finite_matrix", "matrix": [[0,0],[0,1]]}, "samples": 100, "seed": 7}"#;
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(Command::Range, &job(text, d1.path())).unwrap();
        run(Command::Range, &job(text, d2.path())).unwrap();
        for f in ["range_cloud.csv", "range.svg", "range.json", "range_hull.csv"] {
            assert_eq!(fs::read(d1.path().join(f)).unwrap(), fs::read(d2.path().join(f)).unwrap(), "{f}");
        }
        let cloud = PointCloud::read_csv(fs::File::open(d1.path().join("range_cloud.csv")).unwrap(), 0.0).unwrap();
        assert!(cloud.points().iter().all(|z| z.re >= -1e-12 && z.re <= 1.0 + 1e-12 && z.im.abs() < 1e-12));
    }

    #[test]
    fn projected_mode_is_refused_for_non_compact_t() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = job(
            r#"{"c": {"kind": "diagonal", "rule": {"type": "geometric", "ratio": 0.5}, "decay": {"type": "trace_class", "tail": "geometric"}},
                "t": {"kind": "diagonal", "rule": {"type": "constant", "value": 1}},
                "schedule": {"sizes": [2, 4], "samples_per_size": 10, "seed": 0},
                "ambient": 16}"#,
            dir.path(),
        );
        let err = run(Command::Converge, &cfg).unwrap_err();
        assert_eq!(exit_code_for(&err), EXIT_HYPOTHESIS);
    }

    #[test]
    fn essential_of_identity_is_one() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = job(r#"{"t": {"kind": "diagonal", "rule": {"type": "constant", "value": 1}}, "prefix_len": 64}"#, dir.path());
        let out = run(Command::Essential, &cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
    }

    #[test]
    fn dilate_writes_unitary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = job(r#"{"matrix": [[0.5, 0], [0, [0, 0.5]]]}"#, dir.path());
        let out = run(Command::Dilate, &cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        let v: Value = serde_json::from_slice(&fs::read(dir.path().join("dilation.json")).unwrap()).unwrap();
        assert!(v["unitarity_defect"].as_f64().unwrap() <= 1e-12);
    }
}
