//! Radial cutoffs χ (ball) and φ (annulus).
//!
//! χ ≡ 1 on `[0, 1]`, χ ≡ 0 on `[4/3, ∞)`, and between the two it follows
//! the smooth step `g(t) = ψ(t) / (ψ(t) + ψ(1 − t))` with `ψ(t) = e^{−1/t}`.
//! φ(ρ) = χ(ρ/2) − χ(ρ) is supported in `[1, 8/3]` and equals 1 on
//! `[4/3, 2]`; the dyadic sums telescope to exactly one.

/// Radius of the ball that contains `supp χ`.
pub const BALL_RADIUS: f64 = 4.0 / 3.0;
/// Inner radius of the annulus that contains `supp φ`.
pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
/// Outer radius of the annulus that contains `supp φ`.
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DyadicProfile;

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smooth_step(t: f64) -> f64 {
    let a = psi(t);
    let b = psi(1.0 - t);
    a / (a + b)
}

pub fn build_profile() -> DyadicProfile {
    DyadicProfile
}

impl DyadicProfile {
    pub fn chi(&self, rho: f64) -> f64 {
        if rho <= 1.0 {
            1.0
        } else if rho >= BALL_RADIUS {
            0.0
        } else {
            smooth_step((BALL_RADIUS - rho) * 3.0)
        }
    }

    pub fn phi(&self, rho: f64) -> f64 {
        self.chi(rho / 2.0) - self.chi(rho)
    }

    /// Multiplier of the block `Δ̇_j` at radius `rho`, `φ(2^{-j} ρ)`.
    pub fn block_multiplier(&self, j: i32, rho: f64) -> f64 {
        self.phi(rho * 2f64.powi(-j))
    }

    /// Multiplier of `Ṡ_j` at radius `rho`, `χ(2^{-j} ρ)`.
    pub fn low_pass_multiplier(&self, j: i32, rho: f64) -> f64 {
        self.chi(rho * 2f64.powi(-j))
    }

    /// Blocks whose multiplier can be nonzero at radius `rho > 0`.
    pub fn blocks_at(&self, rho: f64) -> std::ops::RangeInclusive<i32> {
        // φ(2^{-j}ρ) ≠ 0 needs 1 < 2^{-j}ρ < 8/3.
        let hi = rho.log2().ceil() as i32 - 1;
        let lo = (rho / ANNULUS_OUTER).log2().floor() as i32 + 1;
        lo.min(hi)..=hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let p = build_profile();
        assert_eq!(p.phi(1.5), 1.0);
        assert_eq!(p.chi(0.5), 1.0);
        assert_eq!(p.chi(1.4), 0.0);
        assert!((p.phi(0.9) + p.phi(1.8) - 1.0).abs() < 1e-15);
        assert_eq!(p.phi(0.99), 0.0);
        assert_eq!(p.phi(2.7), 0.0);
        for i in 0..=100 {
            let rho = 4.0 / 3.0 + (2.0 - 4.0 / 3.0) * i as f64 / 100.0;
            assert_eq!(p.phi(rho), 1.0);
        }
    }

    #[test]
    fn profile_is_nonnegative_and_monotone() {
        let p = build_profile();
        let mut prev = 1.0;
        for i in 0..=400 {
            let rho = 0.9 + 0.5 * i as f64 / 400.0;
            let c = p.chi(rho);
            assert!((0.0..=1.0).contains(&c));
            assert!(c <= prev);
            prev = c;
            assert!(p.phi(rho) >= 0.0);
        }
    }

    #[test]
    fn blocks_at_covers_support() {
        let p = build_profile();
        for i in 0..500 {
            let rho = 0.1 * 1.013f64.powi(i);
            let listed: Vec<i32> = p.blocks_at(rho).collect();
            for j in -10..20 {
                if p.block_multiplier(j, rho) != 0.0 {
                    assert!(listed.contains(&j), "rho {rho} j {j}");
                }
            }
        }
    }
}
