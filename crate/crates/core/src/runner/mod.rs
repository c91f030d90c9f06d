//! Experiment orchestration: configuration, parallel ensembles and result
//! files.
//!
//! Every mode writes its CSV files into the output directory (one
//! subdirectory `p_<value>` per swap rate when `p` is a grid) and finishes
//! with `manifest.txt`, which lists the configuration and a SHA-256 digest
//! of every data file.

mod config;
mod ensemble;
mod output;

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub use config::{parse_grid, ConfigError, ExperimentConfig, InitKind, Mode};
pub use ensemble::{dp_ensemble, info_ensemble, otoc_ensemble};
pub use output::{fmt_f64, sha256_hex, write_manifest, CsvData, CsvTable};

use crate::analysis::{
    branch_metrics, collapse_metric, estimate_pc, fit_power_law, mean_field, measure_velocity,
    otoc_collapse, raw_curves, rescale_collapse, CollapseCurve, ExponentTable, Observable,
};
use crate::dp::{branching_probs, InitialCondition, QuditDim};
use crate::observables::{
    density_prefactor, fidelity_from_survival, finalize, finalize_info, otoc_prefactor, Curves,
    OtocSlice,
};
use crate::rng::derive_seed;
use crate::Error;

pub const CURVES_HEADER: &str = "t,rho,rho_sem,P,P_sem,R2,R2_sem,front,front_sem";
pub const OTOC_HEADER: &str = "t,x,C_mean,C_sem";
pub const INFO_HEADER: &str = "p,t,Ic_E_mean,Ic_E_sem,Ic_S_mean,Ic_S_sem,F_mean,F_sem";
pub const MEANFIELD_HEADER: &str = "q,p,rho_e,rho_v,P_r,P_l,P_d,v_B,p_c_mf";
pub const FIT_HEADER: &str = "observable,window_lo,window_hi,exponent,amplitude,goodness,p_c";
/// Columns that do not fit the fixed `curves.csv` layout.
pub const EXTRA_HEADER: &str = "t,R2_norm,front_std";
pub const DECODE_HEADER: &str = "t,P1,P1_sem,Pk,Pk_sem,F_lower,F_upper";
pub const COLLAPSE_HEADER: &str = "observable,label,branch,x,y";

/// Bin width of the collapse metric, in decades of the scaling variable
/// (linear units for OTOC profiles).
pub const COLLAPSE_BIN: f64 = 0.1;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "RADPERC_WORKERS";

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Io { path: PathBuf, source: io::Error },
    Sim(Error),
}

impl RunError {
    /// Process exit code: 2 for configuration errors, 3 for I/O errors,
    /// 1 for failures of the computation itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io { .. } => 3,
            RunError::Sim(_) => 1,
        }
    }

    fn io(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
        move |source| RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Io { path, source } => write!(f, "I/O error on {}: {source}", path.display()),
            RunError::Sim(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Sim(e)
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    /// Data files, relative to `output_dir`.
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub wall_time: Duration,
    /// Non-fatal remarks (skipped grid points, failed fits).
    pub notes: Vec<String>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    out: PathBuf,
    files: Vec<PathBuf>,
    notes: Vec<String>,
}

impl Ctx<'_> {
    fn dir_for(&self, p: f64) -> Result<PathBuf, RunError> {
        let rel = if self.cfg.p.len() > 1 {
            PathBuf::from(format!("p_{p}"))
        } else {
            PathBuf::new()
        };
        let full = self.out.join(&rel);
        fs::create_dir_all(&full).map_err(RunError::io(&full))?;
        Ok(rel)
    }

    fn write(&mut self, rel: PathBuf, table: &CsvTable) -> Result<(), RunError> {
        let path = self.out.join(&rel);
        table.write(&path).map_err(RunError::io(&path))?;
        self.files.push(rel);
        Ok(())
    }

    fn write_text(&mut self, rel: PathBuf, text: &str) -> Result<(), RunError> {
        let path = self.out.join(&rel);
        fs::write(&path, text).map_err(RunError::io(&path))?;
        self.files.push(rel);
        Ok(())
    }
}

/// Runs the configured experiment and writes its files.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary, RunError> {
    cfg.validate()?;
    let mode = cfg.mode()?;
    let workers = match cfg.workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&w| w > 0)
                    .ok_or_else(|| {
                        ConfigError::new(format!("{WORKERS_ENV}={v:?} is not a positive integer"))
                    })?,
            ),
            Err(_) => None,
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::Sim(Error::Invalid(format!("thread pool: {e}"))))?;

    let start = Instant::now();
    let out = cfg.output_dir.clone();
    fs::create_dir_all(&out).map_err(RunError::io(&out))?;
    let mut ctx = Ctx {
        cfg,
        out: out.clone(),
        files: Vec::new(),
        notes: Vec::new(),
    };
    pool.install(|| match mode {
        Mode::Otoc => run_otoc(&mut ctx),
        Mode::Dp => run_dp(&mut ctx),
        Mode::Decode => run_decode(&mut ctx),
        Mode::Info => run_info(&mut ctx),
        Mode::MeanField => run_meanfield(&mut ctx),
        Mode::Fit => run_fit(&mut ctx),
        Mode::Collapse => run_collapse(&mut ctx),
    })?;
    let wall_time = start.elapsed();

    let mut header = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        (
            "time_axis".to_string(),
            "one brick-wall gate layer (even bonds first) then one swap round per unit".to_string(),
        ),
        (
            "wall_time_s".to_string(),
            format!("{:.3}", wall_time.as_secs_f64()),
        ),
    ];
    header.extend(
        cfg.resolved()
            .into_iter()
            .map(|(k, v)| (format!("config.{k}"), v)),
    );
    header.extend(
        cfg.echo
            .iter()
            .map(|(k, v)| (format!("given.{k}"), v.clone())),
    );
    header.extend(
        ctx.notes
            .iter()
            .enumerate()
            .map(|(i, n)| (format!("note.{i}"), n.clone())),
    );
    let manifest = write_manifest(&out, &header, &ctx.files).map_err(RunError::io(&out))?;
    Ok(RunSummary {
        output_dir: out,
        files: ctx.files,
        manifest,
        wall_time,
        notes: ctx.notes,
    })
}

/// Stream family of one grid point.
fn point_seed(seed: u64, p: f64) -> u64 {
    derive_seed(seed, p.to_bits())
}

fn times(depth: usize, stride: usize) -> Vec<usize> {
    let mut t: Vec<usize> = (0..=depth).step_by(stride).collect();
    if t.last() != Some(&depth) {
        t.push(depth);
    }
    t
}

fn curves_table(c: &Curves) -> CsvTable {
    let mut table = CsvTable::new(CURVES_HEADER);
    for i in 0..c.t.len() {
        table.row([
            c.t[i].to_string(),
            fmt_f64(c.rho[i]),
            fmt_f64(c.rho_sem[i]),
            fmt_f64(c.surv[i]),
            fmt_f64(c.surv_sem[i]),
            fmt_f64(c.r2[i]),
            fmt_f64(c.r2_sem[i]),
            fmt_f64(c.front[i]),
            fmt_f64(c.front_sem[i]),
        ]);
    }
    table
}

fn extra_table(c: &Curves) -> CsvTable {
    let mut table = CsvTable::new(EXTRA_HEADER);
    for i in 0..c.t.len() {
        table.row([
            c.t[i].to_string(),
            fmt_f64(c.r2_norm[i]),
            fmt_f64(c.front_std[i]),
        ]);
    }
    table
}

fn otoc_table(slices: &[OtocSlice]) -> CsvTable {
    let mut table = CsvTable::new(OTOC_HEADER);
    for s in slices {
        for i in 0..s.x.len() {
            table.row([
                s.t.to_string(),
                s.x[i].to_string(),
                fmt_f64(s.c_mean[i]),
                fmt_f64(s.c_sem[i]),
            ]);
        }
    }
    table
}

fn write_curves(ctx: &mut Ctx, dir: &Path, c: &Curves) -> Result<(), RunError> {
    ctx.write(dir.join("curves.csv"), &curves_table(c))?;
    ctx.write(dir.join("curves_extra.csv"), &extra_table(c))?;
    if !c.otoc.is_empty() {
        ctx.write(dir.join("otoc.csv"), &otoc_table(&c.otoc))?;
    }
    Ok(())
}

fn run_otoc(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let slices = times(cfg.depth, cfg.stride.unwrap_or(1));
    let prefactor = otoc_prefactor(2, cfg.trace)?;
    for &p in &cfg.p {
        let acc = otoc_ensemble(
            cfg.n,
            p,
            cfg.depth,
            cfg.n_traj,
            point_seed(cfg.seed, p),
            &slices,
        )?;
        let dir = ctx.dir_for(p)?;
        write_curves(ctx, &dir, &finalize(&acc, prefactor)?)?;
    }
    Ok(())
}

fn initial_condition(cfg: &ExperimentConfig) -> InitialCondition {
    match cfg.init {
        InitKind::Single => InitialCondition::SingleSite(0),
        InitKind::Block => InitialCondition::Block {
            k: cfg.k,
            origin: 0,
        },
    }
}

fn run_dp(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let slices = cfg.stride.map(|s| times(cfg.depth, s)).unwrap_or_default();
    let init = initial_condition(cfg);
    let prefactor = match cfg.q {
        QuditDim::Finite(q) => otoc_prefactor(q, cfg.trace)?,
        QuditDim::Infinite => density_prefactor(cfg.q),
    };
    for &p in &cfg.p {
        let params = branching_probs(cfg.q, p)?;
        let acc = dp_ensemble(
            &params,
            &init,
            cfg.n,
            cfg.depth,
            cfg.n_traj,
            point_seed(cfg.seed, p),
            &slices,
        )?;
        let dir = ctx.dir_for(p)?;
        write_curves(ctx, &dir, &finalize(&acc, prefactor)?)?;
    }
    Ok(())
}

fn run_decode(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    for &p in &cfg.p {
        let params = branching_probs(QuditDim::Finite(2), p)?;
        let seed = point_seed(cfg.seed, p);
        let single = InitialCondition::SingleSite(0);
        let block = InitialCondition::Block {
            k: cfg.k,
            origin: 0,
        };
        let c1 = finalize(
            &dp_ensemble(
                &params,
                &single,
                cfg.n,
                cfg.depth,
                cfg.n_traj,
                derive_seed(seed, 1),
                &[],
            )?,
            1.0,
        )?;
        let ck = finalize(
            &dp_ensemble(
                &params,
                &block,
                cfg.n,
                cfg.depth,
                cfg.n_traj,
                derive_seed(seed, 2),
                &[],
            )?,
            1.0,
        )?;
        let bounds = fidelity_from_survival(&c1.surv, &ck.surv, cfg.k as u32)?;
        let mut table = CsvTable::new(DECODE_HEADER);
        for (i, b) in bounds.iter().enumerate() {
            table.row([
                i.to_string(),
                fmt_f64(c1.surv[i]),
                fmt_f64(c1.surv_sem[i]),
                fmt_f64(ck.surv[i]),
                fmt_f64(ck.surv_sem[i]),
                fmt_f64(b.lower),
                fmt_f64(b.upper),
            ]);
        }
        let dir = ctx.dir_for(p)?;
        ctx.write(dir.join("decode.csv"), &table)?;
    }
    Ok(())
}

fn run_info(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let stride = cfg.stride.unwrap_or_else(|| (cfg.depth / 100).max(1));
    let ts = times(cfg.depth, stride);
    let mut table = CsvTable::new(INFO_HEADER);
    for &p in &cfg.p {
        let acc = info_ensemble(
            cfg.case,
            cfg.n,
            cfg.k,
            p,
            cfg.depth,
            cfg.n_traj,
            point_seed(cfg.seed, p),
            &ts,
        )?;
        let c = finalize_info(&acc)?;
        for i in 0..c.t.len() {
            table.row([
                fmt_f64(p),
                c.t[i].to_string(),
                fmt_f64(c.ic_e[i]),
                fmt_f64(c.ic_e_sem[i]),
                fmt_f64(c.ic_s[i]),
                fmt_f64(c.ic_s_sem[i]),
                fmt_f64(c.fidelity[i]),
                fmt_f64(c.fidelity_sem[i]),
            ]);
        }
    }
    ctx.write(PathBuf::from("info.csv"), &table)
}

fn run_meanfield(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let q = match cfg.q {
        QuditDim::Finite(q) => f64::from(q),
        QuditDim::Infinite => f64::INFINITY,
    };
    let mut table = CsvTable::new(MEANFIELD_HEADER);
    for &p in &cfg.p {
        match mean_field(q, p) {
            Ok(m) => table.row([
                cfg.q.to_string(),
                fmt_f64(p),
                fmt_f64(m.rho_e),
                fmt_f64(m.rho_v),
                fmt_f64(m.p_r),
                fmt_f64(m.p_l),
                fmt_f64(m.p_d),
                fmt_f64(m.v_b),
                fmt_f64(m.p_c_mf),
            ]),
            Err(e @ (Error::PastMeanFieldThreshold { .. } | Error::InvalidRate(_))) => {
                ctx.notes.push(format!("p = {p} skipped: {e}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    ctx.write(PathBuf::from("meanfield.csv"), &table)
}

/// Observables as `(name, column)` in `curves.csv`.
const FIT_COLUMNS: [(Observable, &str); 3] = [
    (Observable::Density, "rho"),
    (Observable::Survival, "P"),
    (Observable::Spreading, "R2"),
];

struct Series {
    p: Option<f64>,
    dir: PathBuf,
    data: CsvData,
}

impl Series {
    fn column(&self, name: &str, path: &Path) -> Result<Vec<f64>, RunError> {
        self.data.column(name).map_err(RunError::io(path))
    }
}

/// Either `input/curves.csv` (or `input` itself when it is a file), or one
/// `p_<value>/curves.csv` per grid point, sorted by `p`.
fn read_input(input: &Path) -> Result<Vec<Series>, RunError> {
    let single = if input.is_file() {
        Some(input.to_path_buf())
    } else {
        Some(input.join("curves.csv")).filter(|p| p.is_file())
    };
    if let Some(path) = single {
        let data = CsvData::read(&path).map_err(RunError::io(&path))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return Ok(vec![Series { p: None, dir, data }]);
    }
    let entries = fs::read_dir(input).map_err(RunError::io(input))?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(RunError::io(input))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(p) = name.strip_prefix("p_").and_then(|v| v.parse::<f64>().ok()) else {
            continue;
        };
        let path = entry.path().join("curves.csv");
        if path.is_file() {
            let data = CsvData::read(&path).map_err(RunError::io(&path))?;
            out.push(Series {
                p: Some(p),
                dir: entry.path(),
                data,
            });
        }
    }
    if out.is_empty() {
        return Err(RunError::Io {
            path: input.to_path_buf(),
            source: io::Error::new(io::ErrorKind::NotFound, "no curves.csv found"),
        });
    }
    out.sort_by(|a, b| a.p.partial_cmp(&b.p).expect("grid values are finite"));
    Ok(out)
}

fn window(cfg: &ExperimentConfig, t_max: f64) -> (f64, f64) {
    let hi = cfg.window_hi.unwrap_or(t_max / 4.0);
    let lo = cfg.window_lo.unwrap_or((hi / 4.0).min(16.0));
    (lo, hi)
}

type Family = Vec<(f64, Vec<f64>, Vec<f64>)>;

fn family(series: &[Series], column: &str, input: &Path) -> Result<Family, RunError> {
    series
        .iter()
        .map(|s| {
            Ok((
                s.p.expect("grid input"),
                s.column("t", input)?,
                s.column(column, input)?,
            ))
        })
        .collect()
}

fn run_fit(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let input = cfg.input.clone().expect("validated");
    let series = read_input(&input)?;
    let t_max = series[0]
        .column("t", &input)?
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let (lo, hi) = window(cfg, t_max);
    let mut table = CsvTable::new(FIT_HEADER);
    let mut report = String::new();
    let push = |report: &mut String, k: &str, v: String| {
        report.push_str(&format!("{k} = {v}\n"));
    };
    if series.len() == 1 && series[0].p.is_none() {
        let s = &series[0];
        let t = s.column("t", &input)?;
        for (obs, col) in FIT_COLUMNS {
            let y = s.column(col, &input)?;
            match fit_power_law(&t, &y, lo, hi) {
                Ok(f) => {
                    table.row([
                        obs.name().to_string(),
                        fmt_f64(f.window_lo),
                        fmt_f64(f.window_hi),
                        fmt_f64(f.exponent),
                        fmt_f64(f.amplitude),
                        fmt_f64(f.goodness),
                        cfg.p_c.map_or_else(|| "nan".to_string(), fmt_f64),
                    ]);
                    push(
                        &mut report,
                        &format!("{}.exponent_err", obs.name()),
                        fmt_f64(f.exponent_err),
                    );
                    push(
                        &mut report,
                        &format!("{}.points", obs.name()),
                        f.points.to_string(),
                    );
                }
                Err(e) => ctx.notes.push(format!("{} fit failed: {e}", obs.name())),
            }
        }
        let front = s.column("front", &input)?;
        let extra_path = s.dir.join("curves_extra.csv");
        if extra_path.is_file() {
            let extra = CsvData::read(&extra_path).map_err(RunError::io(&extra_path))?;
            let std = extra
                .column("front_std")
                .map_err(RunError::io(&extra_path))?;
            match measure_velocity(&t, &front, &std, t_max / 8.0, t_max) {
                Ok(v) => {
                    push(&mut report, "v_B", fmt_f64(v.v_b));
                    push(&mut report, "v_B_err", fmt_f64(v.v_b_err));
                    push(
                        &mut report,
                        "front_width_exponent",
                        fmt_f64(v.width_exponent),
                    );
                    push(&mut report, "velocity.window_lo", fmt_f64(v.window_lo));
                    push(&mut report, "velocity.window_hi", fmt_f64(v.window_hi));
                }
                Err(e) => ctx.notes.push(format!("velocity fit failed: {e}")),
            }
        } else {
            ctx.notes
                .push("no curves_extra.csv next to the input, velocity not fitted".into());
        }
    } else {
        for (obs, col) in FIT_COLUMNS {
            let fam = family(&series, col, &input)?;
            match estimate_pc(&fam, lo, hi) {
                Ok(est) => {
                    let f = est.fit_result();
                    table.row([
                        obs.name().to_string(),
                        fmt_f64(f.window_lo),
                        fmt_f64(f.window_hi),
                        fmt_f64(f.exponent),
                        fmt_f64(f.amplitude),
                        fmt_f64(f.goodness),
                        fmt_f64(est.p_c),
                    ]);
                    push(
                        &mut report,
                        &format!("{}.method", obs.name()),
                        format!("{:?}", est.method),
                    );
                    for (p, curv, slope) in &est.grid {
                        push(
                            &mut report,
                            &format!("{}.curvature.{p}", obs.name()),
                            fmt_f64(*curv),
                        );
                        push(
                            &mut report,
                            &format!("{}.slope.{p}", obs.name()),
                            fmt_f64(*slope),
                        );
                    }
                }
                Err(e) => ctx
                    .notes
                    .push(format!("{} critical-point fit failed: {e}", obs.name())),
            }
        }
    }
    ctx.write(PathBuf::from("fit.csv"), &table)?;
    ctx.write_text(PathBuf::from("fit_report.txt"), &report)
}

fn collapse_rows(table: &mut CsvTable, name: &str, curves: &[CollapseCurve]) {
    for c in curves {
        let branch = match c.branch {
            crate::analysis::Branch::Below => "below",
            crate::analysis::Branch::Above => "above",
        };
        for (x, y) in c.x.iter().zip(&c.y) {
            table.row([
                name.to_string(),
                fmt_f64(c.label),
                branch.to_string(),
                fmt_f64(*x),
                fmt_f64(*y),
            ]);
        }
    }
}

fn run_collapse(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let input = cfg.input.clone().expect("validated");
    let e = ExponentTable::DP;
    let mut table = CsvTable::new(COLLAPSE_HEADER);
    let mut report = String::new();
    let series = read_input(&input)?;
    if series[0].p.is_none() {
        // a single run: collapse its OTOC profiles
        let otoc_path = series[0].dir.join("otoc.csv");
        let data = CsvData::read(&otoc_path).map_err(RunError::io(&otoc_path))?;
        let col = |n: &str| data.column(n).map_err(RunError::io(&otoc_path));
        let (t, x, c) = (col("t")?, col("x")?, col("C_mean")?);
        let mut slices: Vec<OtocSlice> = Vec::new();
        for i in 0..t.len() {
            let ti = t[i] as usize;
            if slices.last().map(|s| s.t) != Some(ti) {
                slices.push(OtocSlice {
                    t: ti,
                    x: Vec::new(),
                    c_mean: Vec::new(),
                    c_sem: Vec::new(),
                });
            }
            let s = slices.last_mut().expect("just pushed");
            s.x.push(x[i] as i64);
            s.c_mean.push(c[i]);
            s.c_sem.push(0.0);
        }
        let curves = otoc_collapse(&slices, &e);
        collapse_rows(&mut table, "C", &curves);
        match collapse_metric(&curves, false, COLLAPSE_BIN) {
            Ok(m) => report.push_str(&format!("C.metric_rescaled = {}\n", fmt_f64(m))),
            Err(err) => ctx.notes.push(format!("OTOC collapse metric: {err}")),
        }
    } else {
        if series.len() < 2 {
            return Err(ConfigError::new("collapse needs a grid of p_<value> directories").into());
        }
        let t_max = series[0]
            .column("t", &input)?
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let p_c = match cfg.p_c {
            Some(p) => p,
            None => {
                let (lo, hi) = window(cfg, t_max);
                estimate_pc(&family(&series, "rho", &input)?, lo, hi)?.p_c
            }
        };
        report.push_str(&format!("p_c = {}\n", fmt_f64(p_c)));
        let (mut raw_total, mut resc_total) = (0.0, 0.0);
        for (obs, col) in FIT_COLUMNS {
            let fam: Family = family(&series, col, &input)?
                .into_iter()
                .filter(|(p, _, _)| *p != p_c)
                .collect();
            let rescaled = rescale_collapse(&fam, p_c, obs, &e)?;
            collapse_rows(&mut table, obs.name(), &rescaled);
            let raw = branch_metrics(&raw_curves(&fam, p_c), true, COLLAPSE_BIN);
            let resc = branch_metrics(&rescaled, true, COLLAPSE_BIN);
            match (raw, resc) {
                (Ok(a), Ok(b)) => {
                    for (branch, raw, resc) in [("below", a.0, b.0), ("above", a.1, b.1)] {
                        let key = format!("{}.{branch}", obs.name());
                        report.push_str(&format!("{key}.metric_raw = {}\n", fmt_f64(raw)));
                        report.push_str(&format!("{key}.metric_rescaled = {}\n", fmt_f64(resc)));
                        raw_total += raw;
                        resc_total += resc;
                    }
                }
                (Err(err), _) | (_, Err(err)) => ctx
                    .notes
                    .push(format!("{} collapse metric: {err}", obs.name())),
            }
        }
        report.push_str(&format!("metric_raw = {}\n", fmt_f64(raw_total)));
        report.push_str(&format!("metric_rescaled = {}\n", fmt_f64(resc_total)));
        report.push_str(&format!(
            "improvement = {}\n",
            fmt_f64(raw_total / resc_total)
        ));
    }
    ctx.write(PathBuf::from("collapse.csv"), &table)?;
    ctx.write_text(PathBuf::from("collapse_report.txt"), &report)
}
