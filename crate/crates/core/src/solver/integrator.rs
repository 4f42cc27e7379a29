//! Integrating-factor RK4: the viscous factor `e^{−ν|k|²τ}` is applied
//! exactly, the classical four stages handle convection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

use super::nonlinear::{mask_table, rhs_coeffs, Coeffs};
use super::state::FlowState;

/// Energy growth factor over `K₁` treated as blow-up.
pub const BLOW_UP_FACTOR: f64 = 10.0;

/// Precomputed factors for one `(grid, ν, dt)`.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    nu: f64,
    dt: f64,
    full: Vec<f64>,
    half: Vec<f64>,
    mask: Option<Vec<bool>>,
}

impl Stepper {
    pub fn new(grid: Grid, nu: f64, dt: f64, dealias: bool) -> Self {
        let mut full = Vec::with_capacity(grid.len());
        let mut half = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let k = grid.wavevector(idx);
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            full.push((-nu * kk * dt).exp());
            half.push((-nu * kk * dt * 0.5).exp());
        }
        Self {
            grid,
            nu,
            dt,
            full,
            half,
            mask: dealias.then(|| mask_table(grid)),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    fn rhs(&self, u: &Coeffs) -> Coeffs {
        rhs_coeffs(self.grid, u, self.mask.as_deref())
    }

    fn combine(&self, a: &Coeffs, b: &Coeffs, f: impl Fn(usize, Complex64, Complex64) -> Complex64) -> Coeffs {
        std::array::from_fn(|c| {
            a[c].iter()
                .zip(&b[c])
                .enumerate()
                .map(|(i, (&x, &y))| f(i, x, y))
                .collect()
        })
    }

    pub(crate) fn advance(&self, u: &Coeffs) -> Coeffs {
        let (e, eh) = (&self.full, &self.half);
        let dt = self.dt;
        let h = 0.5 * dt;
        let k1 = self.rhs(u);
        let a = self.combine(u, &k1, |i, x, y| (x + y * h) * eh[i]);
        let k2 = self.rhs(&a);
        let b = self.combine(u, &k2, |i, x, y| x * eh[i] + y * h);
        let k3 = self.rhs(&b);
        let c = self.combine(u, &k3, |i, x, y| x * e[i] + y * (dt * eh[i]));
        let k4 = self.rhs(&c);
        std::array::from_fn(|comp| {
            (0..u[comp].len())
                .map(|i| {
                    let inner = k1[comp][i] * e[i]
                        + (k2[comp][i] + k3[comp][i]) * (2.0 * eh[i])
                        + k4[comp][i];
                    u[comp][i] * e[i] + inner * (dt / 6.0)
                })
                .collect()
        })
    }

    /// One step; rejects non-finite results and energy above
    /// [`BLOW_UP_FACTOR`]·`k1` (skipped when `k1` is zero).
    pub fn step(&self, state: &FlowState, k1: f64) -> Result<FlowState> {
        let raw: Coeffs = state.u.components().clone().map(|c| c.into_coeffs());
        let next = self.advance(&raw);
        let t = state.t + self.dt;
        let g = self.grid;
        let u = crate::field::Vector3::from_components_unchecked(
            next.map(|c| SpectralField::from_vec_unchecked(g, c)),
        );
        let out = FlowState::from_parts(t, state.step + 1, u);
        check_blow_up(&out, k1)?;
        Ok(out)
    }
}

fn worst_mode(state: &FlowState) -> [i64; 3] {
    let g = state.grid();
    let mut best = (0usize, -1.0f64);
    for c in state.u.components() {
        for (idx, z) in c.coeffs().iter().enumerate() {
            let m = z.norm();
            if !m.is_finite() {
                return g.wavevector(idx);
            }
            if m > best.1 {
                best = (idx, m);
            }
        }
    }
    g.wavevector(best.0)
}

fn check_blow_up(state: &FlowState, k1: f64) -> Result<()> {
    let e = state.energy();
    let reason = if !e.is_finite() {
        Some("non-finite velocity".to_string())
    } else if k1 > 0.0 && e > BLOW_UP_FACTOR * k1 {
        Some(format!("energy {e:e} exceeds {BLOW_UP_FACTOR}x the initial energy {k1:e}"))
    } else {
        None
    };
    match reason {
        Some(reason) => Err(Error::BlowUp {
            time: state.t,
            reason,
            worst_mode: worst_mode(state),
        }),
        None => Ok(()),
    }
}

/// Advance `state` by one step of size `dt`.
pub fn step(state: &FlowState, dt: f64, nu: f64, dealias: bool) -> Result<FlowState> {
    let k1 = state.energy();
    Stepper::new(state.grid(), nu, dt, dealias).step(state, k1)
}
