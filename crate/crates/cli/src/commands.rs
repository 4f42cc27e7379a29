use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use besovns_core::monitor::{
    calibrate, equivalence_check, frequency_split_verify, pressure_name, pressure_parameters,
    verify_horizontal_links, verify_ladyzhenskaya, verify_pressure_links, verify_vorticity_links,
    embedding_ratio, ConstantSet, ExponentPair, Link, Monitor, MonitorReport, SplitOutcome, Verdict,
    EXACT_TOLERANCE, HORIZONTAL_TRILINEAR, LADYZHENSKAYA_R4,
    VORTICITY_A3, VORTICITY_GRADIENT,
};
use besovns_core::ratio::Ratio;
use besovns_core::ensemble::random_divfree;
use besovns_core::solver::{
    run_observed, save_checkpoint, Checkpoint, Diagnostics, FlowState, InitialCondition,
};
use besovns_core::Grid;

use crate::config::RunConfig;
use crate::output::{self, float, opt_float, write_csv};

/// Where relative paths resolve.
#[derive(Debug, Clone, Default)]
pub struct Context {
    /// Directory of the config file (for `constants`).
    pub config_dir: PathBuf,
    /// Base for a relative output `dir`; the working directory if `None`.
    pub output_root: Option<PathBuf>,
}

impl Context {
    pub fn output_dir(&self, cfg: &RunConfig) -> PathBuf {
        let d = &cfg.output.dir;
        match &self.output_root {
            Some(root) if d.is_relative() => root.join(d),
            _ => d.clone(),
        }
    }

    fn constants_path(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.config_dir.join(p)
        } else {
            p.to_path_buf()
        }
    }
}

/// `0` pass, `2` fail, `3` inconclusive. Usage and I/O errors exit with `1`.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 2,
        Verdict::Inconclusive => 3,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// The constants file if configured; otherwise a fresh calibration (written
/// to `out/constants.csv`) when allowed, or an empty set.
pub fn load_or_calibrate(cfg: &RunConfig, ctx: &Context, out: &Path) -> Result<ConstantSet> {
    if let Some(p) = &cfg.constants {
        return output::read_constants(&ctx.constants_path(p));
    }
    if !cfg.calibrate {
        return Ok(ConstantSet::default());
    }
    let set = calibrate(&cfg.calibration_spec())?;
    output::write_constants(&out.join(output::CONSTANTS), &set)?;
    Ok(set)
}

/// `besovns calibrate`: writes `constants.csv`, returns its path.
pub fn calibrate_command(cfg: &RunConfig, ctx: &Context) -> Result<PathBuf> {
    let out = ctx.output_dir(cfg);
    create_dir(&out)?;
    let set = calibrate(&cfg.calibration_spec())?;
    let path = out.join(output::CONSTANTS);
    output::write_constants(&path, &set)?;
    Ok(path)
}

/// `besovns run`: one trajectory, or `ensemble` seeds side by side.
pub fn run_command(cfg: &RunConfig, ctx: &Context, ensemble: Option<u64>) -> Result<Verdict> {
    let out = ctx.output_dir(cfg);
    create_dir(&out)?;
    let constants = load_or_calibrate(cfg, ctx, &out)?;
    match ensemble {
        None => run_experiment(cfg, &out, &constants),
        Some(n) => run_ensemble(cfg, &out, &constants, n),
    }
}

/// Seeds `seed..seed+n`, each in `out/seed-<k>/` on its own thread.
pub fn run_ensemble(cfg: &RunConfig, out: &Path, constants: &ConstantSet, n: u64) -> Result<Verdict> {
    if n == 0 {
        bail!("--ensemble needs at least one member");
    }
    if cfg.solver.init == InitialCondition::TaylorGreen {
        bail!("--ensemble needs `init = random` in [solver]");
    }
    let members: Vec<(RunConfig, PathBuf)> = (0..n)
        .map(|i| {
            let mut c = cfg.clone();
            let seed = cfg.solver.seed + i;
            c.solver.seed = seed;
            c.output.run_id = format!("{}-seed-{seed}", cfg.output.run_id);
            let dir = out.join(format!("seed-{seed}"));
            (c, dir)
        })
        .collect();
    let results: Vec<Result<Verdict>> = std::thread::scope(|s| {
        let handles: Vec<_> = members
            .iter()
            .map(|(c, dir)| {
                s.spawn(move || {
                    create_dir(dir)?;
                    run_experiment(c, dir, constants)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("ensemble member panicked"))))
            .collect()
    });
    let mut verdict = Verdict::Pass;
    for r in results {
        verdict = verdict.combine(r?);
    }
    Ok(verdict)
}

/// Run the solver with the monitor attached and write the output files into
/// `out`.
pub fn run_experiment(cfg: &RunConfig, out: &Path, constants: &ConstantSet) -> Result<Verdict> {
    let start = Instant::now();
    let mut monitor = Monitor::new(&cfg.specs, constants.clone(), cfg.solver.nu);
    let mut diagnostics: Vec<Diagnostics> = Vec::new();
    let mut last: Option<FlowState> = None;
    let mut failure = None;
    let summary = run_observed(&cfg.solver, |sample| {
        if failure.is_some() {
            return;
        }
        if let Err(e) = monitor.observe(&sample.state) {
            failure = Some(e);
            return;
        }
        diagnostics.push(sample.diagnostics);
        last = Some(sample.state);
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let report = monitor.finish(summary.aborted.as_ref())?;
    let wall = start.elapsed().as_secs_f64();

    let mut warnings = summary.warnings.clone();
    if let Some(e) = &summary.aborted {
        warnings.push(format!("run stopped early: {e}"));
    }
    let verdict = write_run_outputs(cfg, out, &monitor, &report, &diagnostics, &mut warnings)?;
    write_csv(
        &out.join(output::TIMING),
        &[],
        &["run_id", "wall_seconds", "steps", "samples"],
        [vec![
            cfg.output.run_id.clone(),
            format!("{wall:.3}"),
            summary.steps.to_string(),
            summary.samples.to_string(),
        ]],
    )?;
    if cfg.output.checkpoints {
        if let Some(state) = last {
            let ck = Checkpoint {
                state,
                nu: cfg.solver.nu,
                dt: cfg.solver.dt,
            };
            save_checkpoint(&out.join(output::CHECKPOINT), &ck)?;
        }
    }
    Ok(verdict)
}

fn write_run_outputs(
    cfg: &RunConfig,
    out: &Path,
    monitor: &Monitor,
    report: &MonitorReport,
    diagnostics: &[Diagnostics],
    warnings: &mut Vec<String>,
) -> Result<Verdict> {
    let id = &cfg.output.run_id;
    let mut verdict = report.verdict();

    for l in report.links.iter().filter(|l| l.exact && l.violations > 0) {
        warnings.push(format!(
            "exact link '{}' violated at {} of {} samples (max ratio {})",
            l.name,
            l.violations,
            l.evaluated,
            opt_float(l.max)
        ));
        verdict = verdict.combine(Verdict::Fail);
    }
    if let Some(balance) = &report.balance {
        let worst = balance.iter().map(|b| b.identity_residual).fold(0.0, f64::max);
        if balance.iter().any(|b| !b.identity_holds()) {
            warnings.push(format!(
                "enstrophy balance residual {} exceeds the finite-difference tolerance (sampling too coarse?)",
                float(worst)
            ));
        }
    }
    for c in report.criteria.iter() {
        match c {
            Ok(c) => warnings.extend(c.warnings.iter().map(|w| format!("{}: {w}", c.spec.label()))),
            Err(e) => warnings.push(format!("criterion skipped: {e}")),
        }
    }

    if cfg.output.timeseries {
        let mut header = vec![
            "t".to_string(),
            "energy".into(),
            "gradient_energy".into(),
            "vorticity_l2".into(),
        ];
        let mut columns = Vec::new();
        for spec in &cfg.specs {
            for (i, term) in spec.terms().into_iter().enumerate() {
                header.push(if i == 0 {
                    spec.label()
                } else {
                    format!("{}[{}]", spec.label(), i + 1)
                });
                columns.push(term);
            }
        }
        let rows = monitor.snapshots().iter().zip(diagnostics).map(|(snap, d)| {
            let mut row = vec![
                float(snap.t),
                float(d.energy),
                float(d.gradient_energy),
                float(d.vorticity_l2),
            ];
            row.extend(columns.iter().map(|t| float(snap.term_value(t))));
            row
        });
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(&out.join(output::TIMESERIES), &[], &header, rows)?;
    }

    if cfg.output.reports {
        let rows = report.criteria.iter().zip(&cfg.specs).map(|(c, spec)| match c {
            Ok(c) => vec![
                id.clone(),
                c.spec.theorem.to_string(),
                opt_float(c.spec.s),
                float(c.spec.q_time()),
                float(c.bochner),
                float(c.companion.sup()),
                opt_float(c.constant),
                c.verdict.as_str().to_string(),
            ],
            Err(_) => vec![
                id.clone(),
                spec.theorem.to_string(),
                opt_float(spec.s),
                float(spec.q_time()),
                String::new(),
                String::new(),
                String::new(),
                Verdict::Inconclusive.as_str().to_string(),
            ],
        });
        write_csv(&out.join(output::REPORT), warnings, &REPORT_HEADER, rows)?;

        let rows = report.links.iter().map(|l| {
            vec![
                id.clone(),
                l.name.clone(),
                l.exact.to_string(),
                l.evaluated.to_string(),
                l.skipped.to_string(),
                opt_float(l.max),
                l.violations.to_string(),
                opt_float(l.calibrated),
            ]
        });
        write_csv(
            &out.join(output::LINKS),
            &[],
            &["run_id", "link", "exact", "evaluated", "skipped", "max_ratio", "violations", "calibrated"],
            rows,
        )?;
    }
    Ok(verdict)
}

pub const REPORT_HEADER: [&str; 8] = [
    "run_id",
    "theorem",
    "s",
    "q_time",
    "bochner",
    "sup_companion",
    "constant",
    "verdict",
];

/// One checked inequality on one field.
struct Check {
    seed: u64,
    name: String,
    exact: bool,
    ratio: Ratio,
    bound: Option<f64>,
    status: &'static str,
}

fn link_check(seed: u64, l: &Link, calibrated: Option<f64>) -> Check {
    let status = if l.ratio.skipped() {
        if l.holds() && l.exact { "pass" } else { "skipped" }
    } else if l.exact {
        if l.holds() { "pass" } else { "fail" }
    } else {
        match calibrated {
            Some(c) if !l.ratio.within(c * (1.0 + EXACT_TOLERANCE)) => "exceeds",
            Some(_) => "pass",
            None => "measured",
        }
    };
    Check {
        seed,
        name: l.name.to_string(),
        exact: l.exact,
        ratio: l.ratio,
        bound: if l.exact { Some(1.0) } else { calibrated },
        status,
    }
}

/// `besovns verify-inequalities`: the inequality suite on the fields of
/// seeds `verify_seed..verify_seed+verify_count`. Exact links and the
/// frequency-split bound decide the verdict; measured ratios above their
/// calibrated constants are reported as `exceeds`.
pub fn verify_command(cfg: &RunConfig, ctx: &Context) -> Result<Verdict> {
    let out = ctx.output_dir(cfg);
    create_dir(&out)?;
    let constants = load_or_calibrate(cfg, ctx, &out)?;
    let grid = Grid::new(cfg.solver.n)?;
    let cal = cfg.calibration_spec();
    let nu = cfg.solver.nu;
    let vc = constants.vorticity();
    let split = constants.split(cfg.ensemble.epsilon);
    let pressure_s = pressure_parameters(&cfg.specs);
    let mut checks = Vec::new();
    let mut verdict = Verdict::Pass;
    let e = &cfg.ensemble;
    for seed in e.verify_seed..e.verify_seed + e.verify_count {
        let state = FlowState::new(0.0, random_divfree(grid, &cal.field_spec(seed)))?;
        let v = verify_vorticity_links(&state, nu, vc.as_ref());
        checks.push(link_check(seed, &v.holder, None));
        checks.push(link_check(seed, &v.vorticity_gradient, constants.get(VORTICITY_GRADIENT)));
        checks.push(link_check(seed, &v.a3, constants.get(VORTICITY_A3)));
        if let Some(y) = &v.young {
            checks.push(link_check(seed, y, None));
        }
        let h = verify_horizontal_links(&state);
        checks.push(link_check(seed, &h.stretching, constants.get(HORIZONTAL_TRILINEAR)));
        checks.push(link_check(seed, &h.holder, None));
        for &s in &pressure_s {
            let p = verify_pressure_links(&state, ExponentPair::from_s(s))?;
            let keys = [Some("parts"), None, Some("p"), Some("ladyzhenskaya"), Some("a6"), None];
            for (l, key) in p.all().into_iter().zip(keys) {
                let mut c = link_check(seed, l, key.and_then(|k| constants.get(&pressure_name(k, s))));
                c.name = format!("{} (s={s})", l.name);
                checks.push(c);
            }
        }
        let lady = verify_ladyzhenskaya(state.u.component(0), 4.0)?;
        let iso = Link {
            name: "ladyzhenskaya: isotropic r=4",
            exact: false,
            ratio: lady.isotropic,
        };
        checks.push(link_check(seed, &iso, constants.get(LADYZHENSKAYA_R4)));
        let aniso = Link {
            name: "ladyzhenskaya: anisotropic r=4",
            exact: false,
            ratio: lady.anisotropic,
        };
        checks.push(link_check(seed, &aniso, None));
        for (p, name) in [(2.0, "embedding: p=2"), (4.0, "embedding: p=4")] {
            let l = Link {
                name,
                exact: false,
                ratio: embedding_ratio(state.u.component(0), p)?,
            };
            checks.push(link_check(seed, &l, None));
        }
        if let Some((lo, hi)) = constants.equivalence() {
            let eq = equivalence_check(&state.u, (lo, hi));
            checks.push(Check {
                seed,
                name: "equivalence: rho".into(),
                exact: false,
                ratio: eq.rho,
                bound: Some(hi),
                status: match eq.holds() {
                    None => "skipped",
                    Some(true) => "pass",
                    Some(false) => "exceeds",
                },
            });
        }
        match frequency_split_verify(state.u.component(2), e.epsilon)? {
            SplitOutcome::Skipped => {}
            SplitOutcome::Inconclusive { sigma, range } => {
                checks.push(Check {
                    seed,
                    name: format!(
                        "split: sigma={} outside blocks {}..{}",
                        float(sigma),
                        range.j_min,
                        range.j_max
                    ),
                    exact: false,
                    ratio: Ratio::new(0.0, 0.0),
                    bound: None,
                    status: "inconclusive",
                });
                verdict = verdict.combine(Verdict::Inconclusive);
            }
            SplitOutcome::Evaluated(r) => {
                let part = |name: &str, ratio: Ratio, bound: Option<f64>| Check {
                    seed,
                    name: name.into(),
                    exact: false,
                    ratio,
                    bound,
                    status: match bound {
                        None => "measured",
                        Some(b) if ratio.within(b * (1.0 + EXACT_TOLERANCE)) => "pass",
                        Some(_) => "exceeds",
                    },
                };
                checks.push(part("split: low", r.low, split.map(|c| c.low)));
                checks.push(part("split: high", r.high, split.map(|c| c.high)));
                let mut combined = part("split: combined", r.combined, split.map(|c| c.combined()));
                combined.status = match split {
                    None => {
                        verdict = verdict.combine(Verdict::Inconclusive);
                        "inconclusive"
                    }
                    Some(c) if r.dominated(&c) => "pass",
                    Some(_) => "fail",
                };
                checks.push(combined);
            }
        }
    }
    for c in &checks {
        if c.status == "fail" {
            verdict = verdict.combine(Verdict::Fail);
        }
    }
    let rows = checks.iter().map(|c| {
        vec![
            c.seed.to_string(),
            c.name.clone(),
            c.exact.to_string(),
            float(c.ratio.lhs),
            float(c.ratio.rhs),
            opt_float(c.ratio.value),
            opt_float(c.bound),
            c.status.to_string(),
        ]
    });
    write_csv(
        &out.join(output::INEQUALITIES),
        &[],
        &["seed", "check", "exact", "lhs", "rhs", "ratio", "bound", "status"],
        rows,
    )?;
    Ok(verdict)
}
