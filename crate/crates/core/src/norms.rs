//! Lebesgue norms by uniform Riemann-sum quadrature, and L² quantities
//! evaluated in coefficient space through Plancherel.

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField, SpectralVector};

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `(h³ Σ |f_j|^p)^{1/p}` for finite `p`, `max |f_j|` for `p = ∞`.
pub fn lp_norm(f: &RealField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_samples(f.samples(), f.grid().cell_volume(), p))
}

pub(crate) fn lp_norm_samples(samples: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 2.0 {
        return (cell * samples.iter().map(|v| v * v).sum::<f64>()).sqrt();
    }
    if p == 1.0 {
        return cell * samples.iter().map(|v| v.abs()).sum::<f64>();
    }
    // Scale by the maximum to keep large exponents in range.
    let m = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = samples.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * (cell * s).powf(1.0 / p)
}

/// `∫ f g dx` by the same quadrature.
pub fn inner_product(f: &RealField, g: &RealField) -> f64 {
    f.grid().cell_volume()
        * f.samples()
            .iter()
            .zip(g.samples())
            .map(|(a, b)| a * b)
            .sum::<f64>()
}

/// `‖f‖_{L²}` from coefficients: `((2π)³ Σ |c(k)|²)^{1/2}`.
pub fn l2_norm_spectral(f: &SpectralField) -> f64 {
    (f.grid().volume() * f.power()).sqrt()
}

/// L² norm of the pointwise Euclidean magnitude of a vector field.
pub fn l2_norm_vector(v: &SpectralVector) -> f64 {
    (v.grid().volume() * v.power()).sqrt()
}

/// Real part of `∫ f ḡ dx` from coefficients.
pub fn inner_product_spectral(f: &SpectralField, g: &SpectralField) -> f64 {
    f.grid().volume()
        * f.coeffs()
            .iter()
            .zip(g.coeffs())
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
}

pub fn inner_product_vector(u: &SpectralVector, v: &SpectralVector) -> f64 {
    (0..3)
        .map(|i| inner_product_spectral(u.component(i), v.component(i)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_l2() {
        let g = Grid::new(8).unwrap();
        let f = RealField::from_fn(g, |_, _, _| 1.0);
        let v = lp_norm(&f, 2.0).unwrap();
        assert!((v - (2.0 * PI).powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn cosine_l2_squared_matches_closed_form() {
        // ∫ cos² over one period is π, times (2π)² for the other axes.
        let g = Grid::new(16).unwrap();
        let f = RealField::from_fn(g, |x, _, _| x.cos());
        let v = lp_norm(&f, 2.0).unwrap();
        assert!((v * v - 4.0 * PI.powi(3)).abs() < 1e-10);
        let s = f.forward_transform().unwrap();
        assert!((l2_norm_spectral(&s) - v).abs() < 1e-12 * v);
    }

    #[test]
    fn sup_of_cosine() {
        let g = Grid::new(16).unwrap();
        let f = RealField::from_fn(g, |x, y, _| (x + y).cos());
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_exponent_below_one() {
        let g = Grid::new(8).unwrap();
        let f = RealField::zeros(g);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
        assert!(lp_norm(&f, f64::NAN).is_err());
    }

    #[test]
    fn large_exponent_is_stable() {
        let g = Grid::new(8).unwrap();
        let f = RealField::from_fn(g, |x, _, _| 1e3 * x.cos());
        let v = lp_norm(&f, 400.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
