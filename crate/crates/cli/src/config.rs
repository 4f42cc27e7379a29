//! Run configuration: a small INI dialect.
//!
//! ```text
//! # comment
//! [solver]
//! n = 32
//! [monitor]
//! theorem = T1.5
//! s = 0.2
//! [output]
//! dir = out
//! ```
//!
//! `theorem` may repeat; an `s` line binds to the theorem line just above
//! it. Every other key may appear once.

use std::fmt;
use std::path::PathBuf;

use besovns_core::monitor::{CalibrationSpec, CriterionSpec, TheoremId, DEFAULT_S};
use besovns_core::solver::{InitialCondition, SolverConfig};
use besovns_core::Grid;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: Some(line),
        message: message.into(),
    }
}

/// Seeded ensemble used to calibrate constants and to run the standalone
/// inequality suite.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub first_seed: u64,
    pub count: u64,
    /// Cutoff on `|k|∞`; the grid's 2/3-rule cutoff when `None`.
    pub band: Option<i64>,
    pub slope: f64,
    pub amplitude: f64,
    /// `ε` of the frequency split.
    pub epsilon: f64,
    /// Fields checked by `verify-inequalities`, starting at `verify_seed`.
    pub verify_seed: u64,
    pub verify_count: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        let c = CalibrationSpec::default();
        Self {
            first_seed: c.first_seed,
            count: c.count,
            band: c.band,
            slope: c.slope,
            amplitude: c.amplitude,
            epsilon: c.epsilon,
            verify_seed: 100,
            verify_count: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub run_id: String,
    pub timeseries: bool,
    pub reports: bool,
    pub checkpoints: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("besovns-out"),
            run_id: "run".into(),
            timeseries: true,
            reports: true,
            checkpoints: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub specs: Vec<CriterionSpec>,
    /// Constants file to load; relative paths resolve against the config
    /// file's directory.
    pub constants: Option<PathBuf>,
    /// Calibrate in-process when no constants file is given.
    pub calibrate: bool,
    pub ensemble: EnsembleConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            specs: CriterionSpec::all_defaults(),
            constants: None,
            calibrate: true,
            ensemble: EnsembleConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn calibration_spec(&self) -> CalibrationSpec {
        CalibrationSpec {
            n: self.solver.n,
            first_seed: self.ensemble.first_seed,
            count: self.ensemble.count,
            slope: self.ensemble.slope,
            amplitude: self.ensemble.amplitude,
            band: self.ensemble.band,
            nu: self.solver.nu,
            specs: self.specs.clone(),
            epsilon: self.ensemble.epsilon,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Solver,
    Monitor,
    Output,
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(line, format!("expected a number for `{key}`, got `{v}`")))
}

fn integer<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse::<T>()
        .map_err(|_| err(line, format!("expected a nonnegative integer for `{key}`, got `{v}`")))
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(err(line, format!("expected true or false for `{key}`, got `{v}`"))),
    }
}

fn positive(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = number(line, key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(err(line, format!("`{key}` must be positive, got {x}")))
    }
}

const SOLVER_KEYS: &[&str] = &[
    "n", "nu", "dt", "t_end", "dealias", "init", "slope", "amplitude", "seed", "sample_stride",
];
const MONITOR_KEYS: &[&str] = &[
    "theorem",
    "s",
    "constants",
    "calibrate",
    "calibration_seed",
    "calibration_count",
    "calibration_band",
    "calibration_slope",
    "calibration_amplitude",
    "epsilon",
    "verify_seed",
    "verify_count",
];
const OUTPUT_KEYS: &[&str] = &["dir", "run_id", "timeseries", "reports", "checkpoints"];

/// Theorem lines in order, with the line number of each and its optional
/// `s` line.
struct TheoremEntry {
    id: TheoremId,
    s: Option<(f64, usize)>,
    line: usize,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section: Option<Section> = None;
    let mut seen: Vec<(Section, String)> = Vec::new();
    let mut theorems: Vec<TheoremEntry> = Vec::new();
    let mut init: Option<(String, usize)> = None;
    let (mut slope, mut amplitude) = (None, None);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("malformed section header `{content}`")))?
                .trim();
            section = Some(match name {
                "solver" => Section::Solver,
                "monitor" => Section::Monitor,
                "output" => Section::Output,
                _ => return Err(err(line, format!("unknown section [{name}] (expected solver, monitor or output)"))),
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
        let sec = section.ok_or_else(|| err(line, format!("`{key}` appears before any section")))?;
        let (known, sec_name) = match sec {
            Section::Solver => (SOLVER_KEYS, "solver"),
            Section::Monitor => (MONITOR_KEYS, "monitor"),
            Section::Output => (OUTPUT_KEYS, "output"),
        };
        if !known.contains(&key) {
            return Err(err(line, format!("unknown key `{key}` in [{sec_name}]")));
        }
        if key != "theorem" && key != "s" {
            if seen.iter().any(|(s, k)| *s == sec && k == key) {
                return Err(err(line, format!("duplicate key `{key}` in [{sec_name}]")));
            }
            seen.push((sec, key.to_string()));
        }

        match (sec, key) {
            (Section::Solver, "n") => {
                let n: usize = integer(line, key, value)?;
                Grid::new(n).map_err(|e| err(line, e.to_string()))?;
                cfg.solver.n = n;
            }
            (Section::Solver, "nu") => cfg.solver.nu = positive(line, key, value)?,
            (Section::Solver, "dt") => cfg.solver.dt = positive(line, key, value)?,
            (Section::Solver, "t_end") => {
                let t = number(line, key, value)?;
                if t < 0.0 {
                    return Err(err(line, format!("`t_end` must be nonnegative, got {t}")));
                }
                cfg.solver.t_end = t;
            }
            (Section::Solver, "dealias") => cfg.solver.dealias = boolean(line, key, value)?,
            (Section::Solver, "init") => init = Some((value.to_string(), line)),
            (Section::Solver, "slope") => slope = Some(number(line, key, value)?),
            (Section::Solver, "amplitude") => {
                let a = number(line, key, value)?;
                if a < 0.0 {
                    return Err(err(line, format!("`amplitude` must be nonnegative, got {a}")));
                }
                amplitude = Some(a);
            }
            (Section::Solver, "seed") => cfg.solver.seed = integer(line, key, value)?,
            (Section::Solver, "sample_stride") => {
                let s: usize = integer(line, key, value)?;
                if s == 0 {
                    return Err(err(line, "`sample_stride` must be at least 1"));
                }
                cfg.solver.sample_stride = s;
            }
            (Section::Monitor, "theorem") => {
                let id = value
                    .parse::<TheoremId>()
                    .map_err(|e| err(line, e.to_string()))?;
                theorems.push(TheoremEntry { id, s: None, line });
            }
            (Section::Monitor, "s") => {
                let entry = theorems
                    .last_mut()
                    .ok_or_else(|| err(line, "`s` must follow a `theorem` line"))?;
                if entry.s.is_some() {
                    return Err(err(line, format!("second `s` for {}", entry.id)));
                }
                let v = number(line, key, value)?;
                CriterionSpec::new(entry.id, Some(v)).map_err(|e| err(line, e.to_string()))?;
                entry.s = Some((v, line));
            }
            (Section::Monitor, "constants") => cfg.constants = Some(PathBuf::from(value)),
            (Section::Monitor, "calibrate") => cfg.calibrate = boolean(line, key, value)?,
            (Section::Monitor, "calibration_seed") => cfg.ensemble.first_seed = integer(line, key, value)?,
            (Section::Monitor, "calibration_count") => {
                let c: u64 = integer(line, key, value)?;
                if c == 0 {
                    return Err(err(line, "`calibration_count` must be at least 1"));
                }
                cfg.ensemble.count = c;
            }
            (Section::Monitor, "calibration_band") => {
                let b: i64 = integer(line, key, value)?;
                if b < 1 {
                    return Err(err(line, "`calibration_band` must be at least 1"));
                }
                cfg.ensemble.band = Some(b);
            }
            (Section::Monitor, "calibration_slope") => cfg.ensemble.slope = number(line, key, value)?,
            (Section::Monitor, "calibration_amplitude") => {
                cfg.ensemble.amplitude = positive(line, key, value)?
            }
            (Section::Monitor, "epsilon") => {
                let e = number(line, key, value)?;
                if !(e > 0.0 && e < 1.0) {
                    return Err(err(line, format!("`epsilon` requires 0 < epsilon < 1, got {e}")));
                }
                cfg.ensemble.epsilon = e;
            }
            (Section::Monitor, "verify_seed") => cfg.ensemble.verify_seed = integer(line, key, value)?,
            (Section::Monitor, "verify_count") => cfg.ensemble.verify_count = integer(line, key, value)?,
            (Section::Output, "dir") => cfg.output.dir = PathBuf::from(value),
            (Section::Output, "run_id") => {
                if value.is_empty() || value.contains([',', '"', '/', '\\']) {
                    return Err(err(line, format!("`run_id` must be nonempty without , \" / \\, got `{value}`")));
                }
                cfg.output.run_id = value.to_string();
            }
            (Section::Output, "timeseries") => cfg.output.timeseries = boolean(line, key, value)?,
            (Section::Output, "reports") => cfg.output.reports = boolean(line, key, value)?,
            (Section::Output, "checkpoints") => cfg.output.checkpoints = boolean(line, key, value)?,
            _ => unreachable!("key list and match arms agree"),
        }
    }

    cfg.solver.init = match init.as_ref().map(|(v, l)| (v.as_str(), *l)) {
        None | Some(("taylor-green", _)) => {
            if slope.is_some() || amplitude.is_some() {
                return Err(ConfigError {
                    line: None,
                    message: "`slope` and `amplitude` need `init = random`".into(),
                });
            }
            InitialCondition::TaylorGreen
        }
        Some(("random", _)) => InitialCondition::Random {
            slope: slope.unwrap_or(-2.0),
            amplitude: amplitude.unwrap_or(1.0),
        },
        Some((other, l)) => {
            return Err(err(l, format!("unknown init `{other}` (expected taylor-green or random)")))
        }
    };

    if !theorems.is_empty() {
        cfg.specs = theorems
            .iter()
            .map(|t| {
                let s = match (t.s, t.id.takes_s()) {
                    (Some((v, _)), _) => Some(v),
                    (None, true) => Some(DEFAULT_S),
                    (None, false) => None,
                };
                let line = t.s.map_or(t.line, |(_, l)| l);
                CriterionSpec::new(t.id, s).map_err(|e| err(line, e.to_string()))
            })
            .collect::<Result<_, _>>()?;
    }
    cfg.solver.validate().map_err(|e| ConfigError {
        line: None,
        message: e.to_string(),
    })?;
    Ok(cfg)
}

/// Every setting written out explicitly; `parse_config` reads it back to an
/// equal config.
pub fn serialize_config(cfg: &RunConfig) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let s = &cfg.solver;
    let _ = writeln!(out, "[solver]");
    let _ = writeln!(out, "n = {}", s.n);
    let _ = writeln!(out, "nu = {}", s.nu);
    let _ = writeln!(out, "dt = {}", s.dt);
    let _ = writeln!(out, "t_end = {}", s.t_end);
    let _ = writeln!(out, "dealias = {}", s.dealias);
    match s.init {
        InitialCondition::TaylorGreen => {
            let _ = writeln!(out, "init = taylor-green");
        }
        InitialCondition::Random { slope, amplitude } => {
            let _ = writeln!(out, "init = random");
            let _ = writeln!(out, "slope = {slope}");
            let _ = writeln!(out, "amplitude = {amplitude}");
        }
    }
    let _ = writeln!(out, "seed = {}", s.seed);
    let _ = writeln!(out, "sample_stride = {}", s.sample_stride);

    let _ = writeln!(out, "\n[monitor]");
    for spec in &cfg.specs {
        let _ = writeln!(out, "theorem = {}", spec.theorem);
        if let Some(v) = spec.s {
            let _ = writeln!(out, "s = {v}");
        }
    }
    if let Some(p) = &cfg.constants {
        let _ = writeln!(out, "constants = {}", p.display());
    }
    let e = &cfg.ensemble;
    let _ = writeln!(out, "calibrate = {}", cfg.calibrate);
    let _ = writeln!(out, "calibration_seed = {}", e.first_seed);
    let _ = writeln!(out, "calibration_count = {}", e.count);
    if let Some(b) = e.band {
        let _ = writeln!(out, "calibration_band = {b}");
    }
    let _ = writeln!(out, "calibration_slope = {}", e.slope);
    let _ = writeln!(out, "calibration_amplitude = {}", e.amplitude);
    let _ = writeln!(out, "epsilon = {}", e.epsilon);
    let _ = writeln!(out, "verify_seed = {}", e.verify_seed);
    let _ = writeln!(out, "verify_count = {}", e.verify_count);

    let o = &cfg.output;
    let _ = writeln!(out, "\n[output]");
    let _ = writeln!(out, "dir = {}", o.dir.display());
    let _ = writeln!(out, "run_id = {}", o.run_id);
    let _ = writeln!(out, "timeseries = {}", o.timeseries);
    let _ = writeln!(out, "reports = {}", o.reports);
    let _ = writeln!(out, "checkpoints = {}", o.checkpoints);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.solver.n, 32);
        assert_eq!(c.solver.nu, 0.1);
        assert_eq!(c.solver.dt, 1e-3);
        assert_eq!(c.solver.t_end, 1.0);
        assert_eq!(c.solver.init, InitialCondition::TaylorGreen);
        assert_eq!(c.specs.len(), 7);
    }

    #[test]
    fn s_out_of_range_reports_line_and_interval() {
        let e = parse_config("[monitor]\ntheorem = T1.5\ns = 0.5\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().contains("T1.5 requires 0 < s < 8/29"), "{e}");
    }

    #[test]
    fn s_binds_to_preceding_theorem() {
        let c = parse_config("[monitor]\ntheorem = T1.2\ntheorem = T1.4\ns = 0.1\ntheorem = C1.4b\n").unwrap();
        let got: Vec<(TheoremId, Option<f64>)> = c.specs.iter().map(|s| (s.theorem, s.s)).collect();
        assert_eq!(
            got,
            vec![
                (TheoremId::T12, None),
                (TheoremId::T14, Some(0.1)),
                (TheoremId::C14b, Some(DEFAULT_S))
            ]
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[solver]\n\nbogus = 1\n", 3, "unknown key"),
            ("[solver]\nnu = abc\n", 2, "expected a number"),
            ("n = 32\n", 1, "before any section"),
            ("[solver]\nn = 7\n", 2, "invalid grid"),
            ("[extra]\n", 1, "unknown section"),
            ("[monitor]\ns = 0.1\n", 2, "must follow"),
            ("[monitor]\ntheorem = T1.2\ns = 0.1\n", 3, "takes no s"),
            ("[monitor]\ntheorem = T9\n", 2, "unknown theorem"),
            ("[solver]\nnu = 0.1\nnu = 0.2\n", 3, "duplicate"),
            ("[solver]\ninit = vortex\n", 2, "unknown init"),
            ("[output]\ntimeseries = maybe\n", 2, "true or false"),
        ];
        for (text, line, needle) in cases {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.line, Some(line), "{text:?}: {e}");
            assert!(e.to_string().contains(needle), "{text:?}: {e}");
        }
    }

    #[test]
    fn full_config_round_trips() {
        let text = "# comment\n[solver]\nn = 16\nnu = 0.05\ndt = 0.002\nt_end = 0.3\ndealias = false\n\
                    init = random\nslope = -1.5\namplitude = 0.7\nseed = 12\nsample_stride = 5\n\
                    [monitor]\ntheorem = T1.5\ns = 0.25\ntheorem = T1.3i\nconstants = c.csv\ncalibrate = false\n\
                    calibration_seed = 3\ncalibration_count = 9\ncalibration_band = 3\nepsilon = 0.25\n\
                    [output]\ndir = /tmp/x\nrun_id = abc\ntimeseries = false\nreports = true\ncheckpoints = true\n";
        let a = parse_config(text).unwrap();
        let b = parse_config(&serialize_config(&a)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.ensemble.band, Some(3));
        assert_eq!(a.solver.init, InitialCondition::Random { slope: -1.5, amplitude: 0.7 });
    }
}
