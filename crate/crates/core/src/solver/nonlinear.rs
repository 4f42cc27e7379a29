//! Pseudo-spectral convection.
//!
//! The dynamics use the rotational form `−P D[ω × u]`: for divergence-free
//! `u` it differs from `(u·∇)u` by the gradient `∇(|u|²/2)`, which the
//! projector removes, and it is pointwise orthogonal to `u`, so the
//! truncated system conserves energy to round-off. `D` is the 2/3-rule
//! mask when dealiasing is on.

use num_complex::Complex64;

use crate::fft;
use crate::field::{SpectralField, SpectralVector, Vector3};
use crate::grid::Grid;
use crate::ops;

pub(crate) type Coeffs = [Vec<Complex64>; 3];

pub(crate) fn mask_table(g: Grid) -> Vec<bool> {
    let n = g.n();
    let cut = g.dealias_cutoff();
    let keep: Vec<bool> = (0..n).map(|i| g.wavenumber(i).abs() <= cut).collect();
    let mut out = Vec::with_capacity(g.len());
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out.push(keep[a] && keep[b] && keep[c]);
            }
        }
    }
    out
}

fn curl_coeffs(g: Grid, u: &Coeffs) -> Coeffs {
    let n = g.n();
    let mut w = [
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
        vec![Complex64::default(); g.len()],
    ];
    let i = Complex64::new(0.0, 1.0);
    let mut idx = 0;
    for a in 0..n {
        let k1 = g.derivative_wavenumber(a);
        for b in 0..n {
            let k2 = g.derivative_wavenumber(b);
            for c in 0..n {
                let k3 = g.derivative_wavenumber(c);
                let (u1, u2, u3) = (u[0][idx], u[1][idx], u[2][idx]);
                w[0][idx] = i * (u3 * k2 - u2 * k3);
                w[1][idx] = i * (u1 * k3 - u3 * k1);
                w[2][idx] = i * (u2 * k1 - u1 * k2);
                idx += 1;
            }
        }
    }
    w
}

/// Projected, masked, negated `ω × u` on raw coefficient arrays.
pub(crate) fn rhs_coeffs(g: Grid, u: &Coeffs, mask: Option<&[bool]>) -> Coeffs {
    let w = curl_coeffs(g, u);
    let phys = fft::inverse_real_many(
        g,
        &[&u[0], &u[1], &u[2], &w[0], &w[1], &w[2]],
    );
    let (u1, u2, u3, w1, w2, w3) = (&phys[0], &phys[1], &phys[2], &phys[3], &phys[4], &phys[5]);
    let len = g.len();
    let mut c1 = vec![0.0; len];
    let mut c2 = vec![0.0; len];
    let mut c3 = vec![0.0; len];
    for j in 0..len {
        c1[j] = w2[j] * u3[j] - w3[j] * u2[j];
        c2[j] = w3[j] * u1[j] - w1[j] * u3[j];
        c3[j] = w1[j] * u2[j] - w2[j] * u1[j];
    }
    let spectra = fft::forward_real_many(g, &[&c1, &c2, &c3]);
    let mut comps: [SpectralField; 3] = {
        let mut it = spectra.into_iter();
        let mut next = || SpectralField::from_vec_unchecked(g, it.next().unwrap());
        [next(), next(), next()]
    };
    for c in comps.iter_mut() {
        let z = c.coeffs_mut();
        z[0] = Complex64::default();
        if let Some(m) = mask {
            for (v, &keep) in z.iter_mut().zip(m) {
                if !keep {
                    *v = Complex64::default();
                }
            }
        }
        for v in z.iter_mut() {
            *v = -*v;
        }
    }
    ops::project_in_place(g, &mut comps);
    comps.map(|c| c.into_coeffs())
}

/// `−P D[(u·∇)u]`, the convection term of the velocity equation.
pub fn nonlinear_term(u: &SpectralVector, dealias: bool) -> SpectralVector {
    let g = u.grid();
    let raw: Coeffs = u.components().clone().map(|c| c.into_coeffs());
    let mask = dealias.then(|| mask_table(g));
    let out = rhs_coeffs(g, &raw, mask.as_deref());
    Vector3::from_components_unchecked(out.map(|c| SpectralField::from_vec_unchecked(g, c)))
}

/// Unprojected `D[(u·∇)u]` in convective form.
pub fn convective_term(u: &SpectralVector, dealias: bool) -> SpectralVector {
    let g = u.grid();
    let grad = ops::velocity_gradient(u);
    let mut fields: Vec<&[Complex64]> = u.components().iter().map(|c| c.coeffs()).collect();
    for row in &grad {
        for d in row {
            fields.push(d.coeffs());
        }
    }
    let phys = fft::inverse_real_many(g, &fields);
    let len = g.len();
    let mut prods = vec![vec![0.0; len]; 3];
    for (i, p) in prods.iter_mut().enumerate() {
        for j in 0..3 {
            let uj = &phys[j];
            let d = &phys[3 + 3 * i + j];
            for x in 0..len {
                p[x] += uj[x] * d[x];
            }
        }
    }
    let spectra = fft::forward_real_many(g, &[&prods[0], &prods[1], &prods[2]]);
    let mut it = spectra.into_iter();
    let mut next = || {
        let f = SpectralField::from_vec_unchecked(g, it.next().unwrap());
        if dealias {
            ops::dealias(&f)
        } else {
            f
        }
    };
    Vector3::from_components_unchecked([next(), next(), next()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{random_divfree, RandomSpec};
    use crate::field::RealField;
    use crate::norms::inner_product_vector;

    #[test]
    fn shear_flow_has_no_convection() {
        let g = Grid::new(16).unwrap();
        let u = Vector3::new([
            RealField::from_fn(g, |_, y, _| y.sin()),
            RealField::zeros(g),
            RealField::zeros(g),
        ])
        .unwrap()
        .forward_transform()
        .unwrap();
        assert!(convective_term(&u, true).max_abs() < 1e-15);
        assert!(nonlinear_term(&u, true).max_abs() < 1e-15);
    }

    #[test]
    fn rotational_and_convective_forms_agree_after_projection() {
        let g = Grid::new(16).unwrap();
        let u = random_divfree(g, &RandomSpec::seeded(11).with_slope(-1.0));
        let a = nonlinear_term(&u, true);
        let b = ops::leray_project(&convective_term(&u, true)).scale(-1.0);
        let scale = a.max_abs();
        assert!(a.max_diff(&b) < 1e-13 * scale, "{}", a.max_diff(&b) / scale);
    }

    #[test]
    fn convection_is_energy_neutral() {
        let g = Grid::new(16).unwrap();
        let u = random_divfree(g, &RandomSpec::seeded(3));
        let n = nonlinear_term(&u, true);
        let ip = inner_product_vector(&n, &u).abs();
        let scale = crate::norms::l2_norm_vector(&n) * crate::norms::l2_norm_vector(&u);
        assert!(ip < 1e-13 * scale);
    }
}
