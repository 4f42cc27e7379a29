use std::fmt;

use crate::error::{Error, Result};
use crate::lp::TOP_BLOCK_THRESHOLD;
use crate::solver::{FlowState, Trajectory};

use super::calibrate::{pressure_name, pressure_parameters, ConstantSet};
use super::chains::{
    horizontal_links, pressure_links, vorticity_balance, vorticity_links, BalanceCheck, Link,
};
use super::gronwall::{gronwall_bound, initial_value};
use super::quantities::{Kinematics, Snapshot};
use super::series::{bochner_integral, running_integral, TimeSeries};
use super::spec::{CriterionSpec, ExponentPair};

/// Relative slack on `B(t) ≥ companion(t)`.
pub const DOMINANCE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub spec: CriterionSpec,
    /// Leading criterion norm at each sample.
    pub criterion: TimeSeries,
    /// One series per criterion term, paired with its time exponent.
    pub terms: Vec<(TimeSeries, f64)>,
    /// `Σ_terms ∫₀ᵀ valueᵢ^{qᵢ} dτ`.
    pub bochner: f64,
    /// `‖ω‖²` or `‖∇u‖²` (equal for divergence-free fields).
    pub companion: TimeSeries,
    /// Secondary series `ν∫₀ᵗ‖Δu‖²`.
    pub dissipation: TimeSeries,
    pub v0: f64,
    pub constant: Option<f64>,
    pub bound: Option<TimeSeries>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    /// First sample where the bound falls below the companion.
    pub fn first_violation(&self) -> Option<f64> {
        let b = self.bound.as_ref()?;
        b.iter()
            .zip(self.companion.values())
            .find(|((_, bv), cv)| *bv < **cv * (1.0 - DOMINANCE_SLACK))
            .map(|((t, _), _)| t)
    }
}

/// Extremes of one chain link over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStat {
    pub name: String,
    pub exact: bool,
    pub evaluated: usize,
    pub skipped: usize,
    pub max: Option<f64>,
    /// Exact links failing their bound.
    pub violations: usize,
    /// Calibrated constant for measured links, when known.
    pub calibrated: Option<f64>,
}

impl LinkStat {
    fn feed(&mut self, link: &Link) {
        match link.ratio.value {
            Some(v) => {
                self.evaluated += 1;
                self.max = Some(self.max.map_or(v, |m| m.max(v)));
            }
            None => self.skipped += 1,
        }
        if !link.holds() {
            self.violations += 1;
        }
    }

    /// Exact links never violated, and measured links within their
    /// calibrated constant where one is known.
    pub fn within_bounds(&self) -> bool {
        if self.exact {
            return self.violations == 0;
        }
        match (self.max, self.calibrated) {
            (Some(m), Some(c)) => m <= c * (1.0 + DOMINANCE_SLACK),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    pub criteria: Vec<Result<CriterionReport>>,
    pub links: Vec<LinkStat>,
    /// `None` with fewer than three samples.
    pub balance: Option<Vec<BalanceCheck>>,
}

impl MonitorReport {
    /// Aggregate over criteria; per-spec errors count as inconclusive.
    pub fn verdict(&self) -> Verdict {
        self.criteria
            .iter()
            .map(|r| r.as_ref().map_or(Verdict::Inconclusive, |r| r.verdict))
            .fold(Verdict::Pass, Verdict::combine)
    }

    pub fn exact_links_hold(&self) -> bool {
        self.links.iter().filter(|l| l.exact).all(|l| l.violations == 0)
    }
}

/// Online monitor: feed states in time order, then [`Monitor::finish`].
/// Only scalars are kept per sample.
pub struct Monitor {
    nu: f64,
    specs: Vec<Result<CriterionSpec>>,
    constants: ConstantSet,
    pressure: Vec<(f64, ExponentPair)>,
    snaps: Vec<Snapshot>,
    v0: Vec<f64>,
    links: Vec<LinkStat>,
}

impl Monitor {
    pub fn new(specs: &[CriterionSpec], constants: ConstantSet, nu: f64) -> Self {
        let specs: Vec<Result<CriterionSpec>> =
            specs.iter().map(|s| CriterionSpec::new(s.theorem, s.s)).collect();
        let valid: Vec<CriterionSpec> = specs.iter().filter_map(|s| s.clone().ok()).collect();
        let pressure = pressure_parameters(&valid)
            .into_iter()
            .map(|s| (s, ExponentPair::from_s(s)))
            .collect();
        Self {
            nu,
            specs,
            constants,
            pressure,
            snaps: Vec::new(),
            v0: Vec::new(),
            links: Vec::new(),
        }
    }

    pub fn samples(&self) -> usize {
        self.snaps.len()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snaps
    }

    fn record(&mut self, name: String, calibrated: Option<f64>, link: &Link) {
        let idx = match self.links.iter().position(|l| l.name == name) {
            Some(i) => i,
            None => {
                self.links.push(LinkStat {
                    name,
                    exact: link.exact,
                    evaluated: 0,
                    skipped: 0,
                    max: None,
                    violations: 0,
                    calibrated,
                });
                self.links.len() - 1
            }
        };
        self.links[idx].feed(link);
    }

    pub fn observe(&mut self, state: &FlowState) -> Result<()> {
        if let Some(last) = self.snaps.last() {
            if state.t <= last.t {
                return Err(Error::NonMonotoneTime(self.snaps.len()));
            }
        }
        let k = Kinematics::new(&state.u);
        let snap = Snapshot::from_kinematics(state.t, &state.u, &k);
        if self.snaps.is_empty() {
            self.v0 = self
                .specs
                .iter()
                .map(|s| s.as_ref().map_or(0.0, |s| initial_value(s, state, &snap)))
                .collect();
        }
        let vc = self.constants.vorticity();
        let v = vorticity_links(&k, &snap, self.nu, vc.as_ref());
        let cal = [vc.map(|c| c.vorticity_gradient), vc.map(|c| c.a3)];
        for (i, l) in v.all().into_iter().enumerate() {
            let c = if l.exact { None } else { cal.get(i - 1).copied().flatten() };
            self.record(l.name.to_string(), c, l);
        }
        let h = horizontal_links(&k, &state.u);
        let tri = self.constants.get(super::calibrate::HORIZONTAL_TRILINEAR);
        self.record(h.stretching.name.to_string(), tri, &h.stretching);
        self.record(h.holder.name.to_string(), None, &h.holder);
        for (s, exps) in self.pressure.clone() {
            let p = pressure_links(&k, state, &snap, exps)?;
            let keys = [Some("parts"), None, Some("p"), Some("ladyzhenskaya"), Some("a6"), None];
            for (l, key) in p.all().into_iter().zip(keys) {
                let c = key.and_then(|key| self.constants.get(&pressure_name(key, s)));
                self.record(format!("{} (s={s})", l.name), c, l);
            }
        }
        self.snaps.push(snap);
        Ok(())
    }

    /// Assemble the reports; `aborted` marks a truncated trajectory.
    pub fn finish(&self, aborted: Option<&Error>) -> Result<MonitorReport> {
        if self.snaps.is_empty() {
            return Err(Error::EmptySeries);
        }
        let criteria = self
            .specs
            .iter()
            .zip(&self.v0)
            .map(|(spec, &v0)| {
                let spec = spec.clone()?;
                self.criterion_report(spec, v0, aborted)
            })
            .collect();
        let snaps: Vec<&Snapshot> = self.snaps.iter().collect();
        let c = self.constants.vorticity().map_or(0.0, |v| v.gronwall(self.nu));
        Ok(MonitorReport {
            criteria,
            links: self.links.clone(),
            balance: vorticity_balance(&snaps, self.nu, c),
        })
    }

    fn series(&self, f: impl Fn(&Snapshot) -> f64) -> Result<TimeSeries> {
        TimeSeries::new(
            self.snaps.iter().map(|s| s.t).collect(),
            self.snaps.iter().map(f).collect(),
        )
    }

    fn criterion_report(
        &self,
        spec: CriterionSpec,
        v0: f64,
        aborted: Option<&Error>,
    ) -> Result<CriterionReport> {
        let mut warnings = Vec::new();
        let mut terms = Vec::new();
        let mut bochner = 0.0;
        for term in spec.terms() {
            let s = self.series(|snap| snap.term_value(&term))?;
            bochner += bochner_integral(&s, term.power)?;
            let share = self
                .snaps
                .iter()
                .map(|snap| snap.top_block_share(term.quantity))
                .fold(0.0, f64::max);
            if share > TOP_BLOCK_THRESHOLD {
                warnings.push(format!(
                    "{:?} carries {:.2}% of its power in the top block (under-resolved)",
                    term.quantity,
                    100.0 * share
                ));
            }
            terms.push((s, term.power));
        }
        let criterion = terms[0].0.clone();
        let companion = self.series(|s| s.gradient_energy)?;
        let q = self.series(|s| s.hessian_energy)?;
        let dissipation = TimeSeries::new(
            q.times().to_vec(),
            running_integral(&q, 1.0)?.iter().map(|v| self.nu * v).collect(),
        )?;
        let constant = self.constants.gronwall(&spec);
        let bound = constant.map(|c| gronwall_bound(v0, &terms, c)).transpose()?;

        let mut report = CriterionReport {
            spec,
            criterion,
            terms,
            bochner,
            companion,
            dissipation,
            v0,
            constant,
            bound,
            verdict: Verdict::Pass,
            warnings,
        };
        report.verdict = if let Some(e) = aborted {
            report.warnings.push(format!("trajectory truncated: {e}"));
            Verdict::Inconclusive
        } else if report.bound.is_none() {
            report.warnings.push("no calibrated Gronwall constant".into());
            Verdict::Inconclusive
        } else if !report.companion.sup().is_finite() || !report.bochner.is_finite() {
            Verdict::Fail
        } else if let Some(t) = report.first_violation() {
            report.warnings.push(format!("Gronwall bound below companion at t = {t}"));
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        Ok(report)
    }
}

/// Monitor a stored trajectory.
pub fn run_monitor(
    trajectory: &Trajectory,
    specs: &[CriterionSpec],
    constants: &ConstantSet,
    nu: f64,
) -> Result<MonitorReport> {
    if trajectory.samples.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut m = Monitor::new(specs, constants.clone(), nu);
    for s in &trajectory.samples {
        m.observe(&s.state)?;
    }
    m.finish(trajectory.summary.aborted.as_ref())
}
