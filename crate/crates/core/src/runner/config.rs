//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dp::QuditDim;
use crate::stabilizer::InitCase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Otoc,
    Dp,
    Decode,
    Info,
    MeanField,
    Fit,
    Collapse,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::Otoc,
        Mode::Dp,
        Mode::Decode,
        Mode::Info,
        Mode::MeanField,
        Mode::Fit,
        Mode::Collapse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Otoc => "otoc",
            Mode::Dp => "dp",
            Mode::Decode => "decode",
            Mode::Info => "info",
            Mode::MeanField => "meanfield",
            Mode::Fit => "fit",
            Mode::Collapse => "collapse",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

/// Seed of the particle process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Single,
    /// `k` adjacent particles.
    Block,
}

impl FromStr for InitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "single" => Ok(InitKind::Single),
            "block" => Ok(InitKind::Block),
            other => Err(format!("unknown init {other:?} (single or block)")),
        }
    }
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitKind::Single => "single",
            InitKind::Block => "block",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }

    pub fn new(message: impl Into<String>) -> Self {
        Self::at(None, message)
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub n: usize,
    pub depth: usize,
    pub p: Vec<f64>,
    pub q: QuditDim,
    pub k: usize,
    pub init: InitKind,
    pub case: InitCase,
    pub n_traj: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
    pub input: Option<PathBuf>,
    pub window_lo: Option<f64>,
    pub window_hi: Option<f64>,
    /// Spacing of observation times for per-site profiles and information
    /// curves.
    pub stride: Option<usize>,
    pub p_c: Option<f64>,
    /// `tr{ρ₀ [X^b]²}` in the OTOC prefactor.
    pub trace: f64,
    /// Every `key = value` pair as given, file first, then overrides.
    pub echo: Vec<(String, String)>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            n: 64,
            depth: 100,
            p: vec![0.0],
            q: QuditDim::Finite(2),
            k: 1,
            init: InitKind::Single,
            case: InitCase::MixedS2MixedE,
            n_traj: 100,
            seed: 0,
            workers: None,
            output_dir: PathBuf::from("out"),
            input: None,
            window_lo: None,
            window_hi: None,
            stride: None,
            p_c: None,
            trace: 1.0,
            echo: Vec::new(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| format!("invalid value {value:?} for {key}: {e}"))
}

/// Parses `0.1`, `0.1,0.2,0.3` or the inclusive range `start:stop:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid number {v:?} in grid {s:?}"))
    };
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, h] = parts[..] else {
            return Err(format!("range {s:?} must be start:stop:step"));
        };
        let (a, b, h) = (num(a)?, num(b)?, num(h)?);
        if !(h > 0.0) || b < a {
            return Err(format!("range {s:?} needs step > 0 and stop >= start"));
        }
        let count = ((b - a) / h + 1e-9).floor() as usize + 1;
        // round away accumulated binary error so that 0.195 prints as 0.195
        (0..count)
            .map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::at(
                    Some(line),
                    format!("expected key = value, got {content:?}"),
                ));
            };
            let key = canonical_key(key.trim()).map_err(|m| ConfigError::at(Some(line), m))?;
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::at(Some(line), format!("duplicate key {key}")));
            }
            seen.push(key.to_string());
            cfg.set(key, value.trim())
                .map_err(|m| ConfigError::at(Some(line), m))?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` pair; later calls win.
    pub fn set_override(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = canonical_key(key).map_err(ConfigError::new)?;
        self.set(key, value)
            .map_err(|m| ConfigError::new(format!("--{key}: {m}")))
    }

    fn set(&mut self, key: &'static str, value: &str) -> Result<(), String> {
        match key {
            "mode" => self.mode = Some(parse(key, value)?),
            "N" => self.n = parse(key, value)?,
            "depth" => self.depth = parse(key, value)?,
            "p" => self.p = parse_grid(value)?,
            "q" => self.q = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "init" => self.init = parse(key, value)?,
            "case" => self.case = parse(key, value)?,
            "n_traj" => self.n_traj = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "workers" => self.workers = Some(parse(key, value)?),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "input" => self.input = Some(PathBuf::from(value)),
            "window_lo" => self.window_lo = Some(parse(key, value)?),
            "window_hi" => self.window_hi = Some(parse(key, value)?),
            "stride" => self.stride = Some(parse(key, value)?),
            "p_c" => self.p_c = Some(parse(key, value)?),
            "trace" => self.trace = parse(key, value)?,
            _ => unreachable!("canonical_key admits {key}"),
        }
        self.echo.push((key.to_string(), value.to_string()));
        Ok(())
    }

    pub fn mode(&self) -> Result<Mode, ConfigError> {
        self.mode.ok_or_else(|| ConfigError::new("no mode given"))
    }

    /// Checks everything the selected mode relies on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mode = self.mode()?;
        let err = |m: String| Err(ConfigError::new(m));
        if let Some(bad) = self.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return err(format!("p = {bad} outside [0, 1]"));
        }
        if self.workers == Some(0) {
            return err("workers must be positive".into());
        }
        if let (Some(lo), Some(hi)) = (self.window_lo, self.window_hi) {
            if !(lo < hi) {
                return err(format!("window_lo = {lo} must be below window_hi = {hi}"));
            }
        }
        if self.stride == Some(0) {
            return err("stride must be positive".into());
        }
        if let QuditDim::Finite(q) = self.q {
            if q < 2 {
                return err(format!("q = {q} must be at least 2"));
            }
        }
        match mode {
            Mode::Otoc | Mode::Dp | Mode::Decode | Mode::Info => {
                if self.n == 0 || self.n % 2 != 0 {
                    return err(format!("N = {} must be even and positive", self.n));
                }
                if self.n_traj == 0 {
                    return err("n_traj must be positive".into());
                }
                if self.k == 0 || self.k > self.n {
                    return err(format!("k = {} must lie in 1..=N", self.k));
                }
                if matches!(mode, Mode::Otoc | Mode::Info | Mode::Decode)
                    && self.q != QuditDim::Finite(2)
                {
                    return err(format!(
                        "mode {mode} simulates qubits, q = {} given",
                        self.q
                    ));
                }
                if !(self.trace >= 0.0) {
                    return err(format!("trace = {} must be nonnegative", self.trace));
                }
            }
            Mode::MeanField => {}
            Mode::Fit | Mode::Collapse => {
                if self.input.is_none() {
                    return err(format!("mode {mode} needs input"));
                }
            }
        }
        Ok(())
    }

    /// The resolved configuration as `key = value` lines.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        let grid = self
            .p
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("mode".into(), opt(self.mode.map(|m| m.to_string()))),
            ("N".into(), self.n.to_string()),
            ("depth".into(), self.depth.to_string()),
            ("p".into(), grid),
            ("q".into(), self.q.to_string()),
            ("k".into(), self.k.to_string()),
            ("init".into(), self.init.to_string()),
            ("case".into(), self.case.to_string()),
            ("n_traj".into(), self.n_traj.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("output_dir".into(), self.output_dir.display().to_string()),
            (
                "input".into(),
                opt(self.input.as_ref().map(|p| p.display().to_string())),
            ),
            (
                "window_lo".into(),
                opt(self.window_lo.map(|v| v.to_string())),
            ),
            (
                "window_hi".into(),
                opt(self.window_hi.map(|v| v.to_string())),
            ),
            ("stride".into(), opt(self.stride.map(|v| v.to_string()))),
            ("p_c".into(), opt(self.p_c.map(|v| v.to_string()))),
            ("trace".into(), self.trace.to_string()),
        ]
    }
}

fn canonical_key(key: &str) -> Result<&'static str, String> {
    Ok(match key {
        "mode" => "mode",
        "N" | "n" => "N",
        "depth" => "depth",
        "p" => "p",
        "q" => "q",
        "k" => "k",
        "init" => "init",
        "case" => "case",
        "n_traj" | "traj" => "n_traj",
        "seed" => "seed",
        "workers" => "workers",
        "output_dir" | "out" => "output_dir",
        "input" => "input",
        "window_lo" => "window_lo",
        "window_hi" => "window_hi",
        "stride" => "stride",
        "p_c" => "p_c",
        "trace" => "trace",
        other => return Err(format!("unknown key {other:?}")),
    })
}
