//! Ensemble calibration of the non-explicit constants: each constant is the
//! extreme measured ratio over seeded random divergence-free fields.

use crate::ensemble::{random_divfree, RandomSpec};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::FlowState;

use super::chains::{
    equivalence_ratio, horizontal_links, pressure_links, verify_ladyzhenskaya, vorticity_links,
    VorticityConstants,
};
use super::gronwall::rate_constant;
use super::quantities::{Kinematics, Snapshot};
use super::spec::{CriterionSpec, ExponentPair};
use super::split::{frequency_split_verify, SplitConstants, SplitOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedConstant {
    pub name: String,
    pub value: f64,
    /// e.g. `n=32 seeds=0..100 slope=-2 amplitude=1 band=10 nu=0.1`.
    pub ensemble: String,
    pub grids: Vec<usize>,
}

/// Named constants in a fixed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstantSet {
    pub constants: Vec<CalibratedConstant>,
}

pub fn gronwall_name(spec: &CriterionSpec) -> String {
    format!("gronwall:{}", spec.label())
}

pub fn pressure_name(link: &str, s: f64) -> String {
    format!("pressure.{link}:s={s}")
}

pub fn split_name(part: &str, epsilon: f64) -> String {
    format!("split.{part}:eps={epsilon}")
}

pub const VORTICITY_GRADIENT: &str = "vorticity.gradient";
pub const VORTICITY_A3: &str = "vorticity.a3";
pub const HORIZONTAL_TRILINEAR: &str = "horizontal.trilinear";
pub const EQUIVALENCE_MIN: &str = "equivalence.min";
pub const EQUIVALENCE_MAX: &str = "equivalence.max";
pub const LADYZHENSKAYA_R4: &str = "ladyzhenskaya:r=4";

impl ConstantSet {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|c| c.name == name).map(|c| c.value)
    }

    pub fn insert(&mut self, c: CalibratedConstant) {
        match self.constants.iter_mut().find(|x| x.name == c.name) {
            Some(x) => *x = c,
            None => self.constants.push(c),
        }
    }

    pub fn gronwall(&self, spec: &CriterionSpec) -> Option<f64> {
        self.get(&gronwall_name(spec))
    }

    pub fn vorticity(&self) -> Option<VorticityConstants> {
        Some(VorticityConstants {
            vorticity_gradient: self.get(VORTICITY_GRADIENT)?,
            a3: self.get(VORTICITY_A3)?,
        })
    }

    pub fn split(&self, epsilon: f64) -> Option<SplitConstants> {
        Some(SplitConstants {
            low: self.get(&split_name("low", epsilon))?,
            high: self.get(&split_name("high", epsilon))?,
        })
    }

    pub fn equivalence(&self) -> Option<(f64, f64)> {
        Some((self.get(EQUIVALENCE_MIN)?, self.get(EQUIVALENCE_MAX)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSpec {
    pub n: usize,
    pub first_seed: u64,
    pub count: u64,
    pub slope: f64,
    pub amplitude: f64,
    /// Hard cutoff on `|k|∞`; the 2/3-rule cutoff of the grid when `None`.
    pub band: Option<i64>,
    pub nu: f64,
    pub specs: Vec<CriterionSpec>,
    /// `ε` of the frequency split.
    pub epsilon: f64,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            n: 32,
            first_seed: 0,
            count: 100,
            slope: -2.0,
            amplitude: 1.0,
            band: None,
            nu: 0.1,
            specs: CriterionSpec::all_defaults(),
            epsilon: 0.5,
        }
    }
}

impl CalibrationSpec {
    pub fn descriptor(&self, grid: Grid) -> String {
        format!(
            "n={} seeds={}..{} slope={} amplitude={} band={} nu={}",
            self.n,
            self.first_seed,
            self.first_seed + self.count,
            self.slope,
            self.amplitude,
            self.band.unwrap_or(grid.dealias_cutoff()),
            self.nu
        )
    }

    pub fn field_spec(&self, seed: u64) -> RandomSpec {
        RandomSpec {
            seed,
            slope: self.slope,
            amplitude: self.amplitude,
            dealias: true,
            max_wavenumber: self.band,
        }
    }
}

/// Distinct `s` of the criteria with a pressure chain, ascending.
pub fn pressure_parameters(specs: &[CriterionSpec]) -> Vec<f64> {
    let mut v: Vec<f64> = specs
        .iter()
        .filter(|s| s.exponent_pair().is_some())
        .filter_map(|s| s.s)
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Running extreme of one ratio.
struct Extreme {
    name: String,
    value: Option<f64>,
    max: bool,
}

impl Extreme {
    fn new(name: String, max: bool) -> Self {
        Self { name, value: None, max }
    }

    fn feed(&mut self, v: Option<f64>) {
        let Some(v) = v.filter(|v| v.is_finite()) else {
            return;
        };
        self.value = Some(match self.value {
            None => v,
            Some(o) if self.max => o.max(v),
            Some(o) => o.min(v),
        });
    }
}

pub fn calibrate(cal: &CalibrationSpec) -> Result<ConstantSet> {
    let grid = Grid::new(cal.n)?;
    if cal.count == 0 {
        return Err(Error::InvalidParameter("calibration ensemble is empty".into()));
    }
    let specs: Vec<CriterionSpec> = cal
        .specs
        .iter()
        .map(|s| CriterionSpec::new(s.theorem, s.s))
        .collect::<Result<_>>()?;
    let pressure_s = pressure_parameters(&specs);

    let mut gronwall: Vec<Extreme> = specs.iter().map(|s| Extreme::new(gronwall_name(s), true)).collect();
    let mut vg = Extreme::new(VORTICITY_GRADIENT.into(), true);
    let mut a3 = Extreme::new(VORTICITY_A3.into(), true);
    let mut tri = Extreme::new(HORIZONTAL_TRILINEAR.into(), true);
    let mut pressure: Vec<[Extreme; 4]> = pressure_s
        .iter()
        .map(|&s| ["parts", "p", "ladyzhenskaya", "a6"].map(|l| Extreme::new(pressure_name(l, s), true)))
        .collect();
    let mut low = Extreme::new(split_name("low", cal.epsilon), true);
    let mut high = Extreme::new(split_name("high", cal.epsilon), true);
    let mut eq_min = Extreme::new(EQUIVALENCE_MIN.into(), false);
    let mut eq_max = Extreme::new(EQUIVALENCE_MAX.into(), true);
    let mut lady = Extreme::new(LADYZHENSKAYA_R4.into(), true);

    for seed in cal.first_seed..cal.first_seed + cal.count {
        let u = random_divfree(grid, &cal.field_spec(seed));
        let state = FlowState::new(0.0, u)?;
        let k = Kinematics::new(&state.u);
        let snap = Snapshot::from_kinematics(0.0, &state.u, &k);
        for (e, spec) in gronwall.iter_mut().zip(&specs) {
            e.feed(Some(rate_constant(&snap, spec, cal.nu)));
        }
        let v = vorticity_links(&k, &snap, cal.nu, None);
        vg.feed(v.vorticity_gradient.ratio.value);
        a3.feed(v.a3.ratio.value);
        tri.feed(horizontal_links(&k, &state.u).stretching.ratio.value);
        for (e, &s) in pressure.iter_mut().zip(&pressure_s) {
            let p = pressure_links(&k, &state, &snap, ExponentPair::from_s(s))?;
            e[0].feed(p.parts.ratio.value);
            e[1].feed(p.pressure.ratio.value);
            e[2].feed(p.ladyzhenskaya.ratio.value);
            e[3].feed(p.interpolation.ratio.value);
        }
        if let SplitOutcome::Evaluated(r) = frequency_split_verify(state.u.component(2), cal.epsilon)? {
            low.feed(r.low.value);
            high.feed(r.high.value);
        }
        let rho = equivalence_ratio(&state.u).value;
        eq_min.feed(rho);
        eq_max.feed(rho);
        lady.feed(verify_ladyzhenskaya(state.u.component(0), 4.0)?.isotropic.value);
    }

    let mut out = ConstantSet::default();
    let all = gronwall
        .into_iter()
        .chain([vg, a3, tri])
        .chain(pressure.into_iter().flatten())
        .chain([low, high, eq_min, eq_max, lady]);
    for e in all {
        let Some(value) = e.value.filter(|v| *v > 0.0) else {
            return Err(Error::InvalidParameter(format!(
                "calibration produced no positive value for {}",
                e.name
            )));
        };
        out.insert(CalibratedConstant {
            name: e.name,
            value,
            ensemble: cal.descriptor(grid),
            grids: vec![cal.n],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CalibrationSpec {
        CalibrationSpec {
            n: 16,
            count: 4,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_and_complete() {
        let a = calibrate(&small()).unwrap();
        let b = calibrate(&small()).unwrap();
        assert_eq!(a, b);
        for spec in CriterionSpec::all_defaults() {
            assert!(a.gronwall(&spec).unwrap() > 0.0);
        }
        assert!(a.vorticity().is_some());
        assert!(a.split(0.5).is_some());
        let (lo, hi) = a.equivalence().unwrap();
        assert!(0.0 < lo && lo <= hi);
        assert!(a.get(&pressure_name("a6", 0.2)).is_some());
        assert!(a.constants.iter().all(|c| c.value > 0.0 && c.grids == vec![16]));
    }

    #[test]
    fn rejects_empty_ensemble() {
        let c = CalibrationSpec { count: 0, ..small() };
        assert!(calibrate(&c).is_err());
    }
}
