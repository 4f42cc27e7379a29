use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T12,
    T13i,
    T13ii,
    C14a,
    C14b,
    T14,
    T15,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::T12,
        TheoremId::T13i,
        TheoremId::T13ii,
        TheoremId::C14a,
        TheoremId::C14b,
        TheoremId::T14,
        TheoremId::T15,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T12 => "T1.2",
            TheoremId::T13i => "T1.3i",
            TheoremId::T13ii => "T1.3ii",
            TheoremId::C14a => "C1.4a",
            TheoremId::C14b => "C1.4b",
            TheoremId::T14 => "T1.4",
            TheoremId::T15 => "T1.5",
        }
    }

    /// Open interval for `s`, with its printed form; `None` if the
    /// theorem has no parameter.
    pub fn s_range(self) -> Option<(f64, f64, &'static str)> {
        match self {
            TheoremId::T13ii | TheoremId::C14b => Some((0.0, 1.0, "0 < s < 1")),
            TheoremId::T14 => Some((0.0, 0.4, "0 < s < 2/5")),
            TheoremId::T15 => Some((0.0, 8.0 / 29.0, "0 < s < 8/29")),
            _ => None,
        }
    }

    pub fn takes_s(self) -> bool {
        self.s_range().is_some()
    }

    pub fn companion(self) -> Companion {
        match self {
            TheoremId::T12 | TheoremId::T14 => Companion::Vorticity,
            _ => Companion::Gradient,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown theorem id {s:?} (expected one of T1.2, T1.3i, T1.3ii, C1.4a, C1.4b, T1.4, T1.5)"
                ))
            })
    }
}

/// The quantity each Gronwall bound controls. Both equal `‖∇u‖²_{L²}` for
/// divergence-free fields; the label follows the proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Companion {
    /// `‖ω‖²_{L²}`.
    Vorticity,
    /// `‖∇u‖²_{L²}`.
    Gradient,
}

impl Companion {
    pub fn as_str(self) -> &'static str {
        match self {
            Companion::Vorticity => "|omega|_2^2",
            Companion::Gradient => "|grad u|_2^2",
        }
    }
}

/// Which scalar fields a criterion norm is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// All nine `∂ⱼuᵢ`.
    Gradient,
    /// `∂₁uᵢ, ∂₂uᵢ`.
    HorizontalGradient,
    /// `∂ⱼu₃`.
    GradU3,
    /// `u₁, u₂, u₃`.
    Velocity,
    U3,
    D3U1,
    D3U2,
    D3U3,
}

impl Quantity {
    /// Indices into the snapshot's scalar fields: `0..3` are `uᵢ`,
    /// `3 + 3i + j` is `∂ⱼuᵢ`.
    pub fn fields(self) -> &'static [usize] {
        match self {
            Quantity::Gradient => &[3, 4, 5, 6, 7, 8, 9, 10, 11],
            Quantity::HorizontalGradient => &[3, 4, 6, 7, 9, 10],
            Quantity::GradU3 => &[9, 10, 11],
            Quantity::Velocity => &[0, 1, 2],
            Quantity::U3 => &[2],
            Quantity::D3U1 => &[5],
            Quantity::D3U2 => &[8],
            Quantity::D3U3 => &[11],
        }
    }
}

/// One factor `∫ ‖Q‖^{power}_{Ḃ^{smoothness}_{∞,∞}} dτ` of a criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub quantity: Quantity,
    pub smoothness: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionSpec {
    pub theorem: TheoremId,
    pub s: Option<f64>,
}

/// Default `s` for parametrised criteria.
pub const DEFAULT_S: f64 = 0.2;

impl CriterionSpec {
    pub fn new(theorem: TheoremId, s: Option<f64>) -> Result<Self> {
        match (theorem.s_range(), s) {
            (None, None) => Ok(Self { theorem, s: None }),
            (None, Some(_)) => Err(Error::InvalidParameter(format!(
                "{theorem} takes no s parameter"
            ))),
            (Some((_, _, range)), None) => Err(Error::InvalidParameter(format!(
                "{theorem} requires s with {range}"
            ))),
            (Some((lo, hi, range)), Some(v)) => {
                if v > lo && v < hi {
                    Ok(Self { theorem, s: Some(v) })
                } else {
                    Err(Error::ParameterOutOfRange {
                        theorem: theorem.to_string(),
                        range: range.to_string(),
                        s: v,
                    })
                }
            }
        }
    }

    /// Theorem with its default `s` where it takes one.
    pub fn default_for(theorem: TheoremId) -> Self {
        let s = theorem.takes_s().then_some(DEFAULT_S);
        Self::new(theorem, s).expect("default s lies in every interval")
    }

    /// All seven criteria at their defaults.
    pub fn all_defaults() -> Vec<Self> {
        TheoremId::ALL.into_iter().map(Self::default_for).collect()
    }

    fn s_or_zero(&self) -> f64 {
        self.s.unwrap_or(0.0)
    }

    pub fn terms(&self) -> Vec<Term> {
        let s = self.s_or_zero();
        let t = |quantity, smoothness, power| Term {
            quantity,
            smoothness,
            power,
        };
        match self.theorem {
            TheoremId::T12 => vec![t(Quantity::Gradient, -1.0, 2.0)],
            TheoremId::T13i => vec![t(Quantity::HorizontalGradient, -1.0, 8.0 / 3.0)],
            TheoremId::T13ii => vec![t(Quantity::GradU3, -s, 8.0 / (5.0 - 2.0 * s))],
            TheoremId::C14a => vec![t(Quantity::Velocity, 0.0, 8.0 / 3.0)],
            TheoremId::C14b => vec![t(Quantity::U3, 1.0 - s, 8.0 / (5.0 - 2.0 * s))],
            TheoremId::T14 => vec![
                t(Quantity::D3U3, -s, 4.0 / (2.0 - 5.0 * s)),
                t(Quantity::D3U1, -1.0, 2.0),
                t(Quantity::D3U2, -1.0, 2.0),
            ],
            TheoremId::T15 => vec![t(Quantity::D3U3, -s, 24.0 / (8.0 - 29.0 * s))],
        }
    }

    /// Time exponent of the leading term.
    pub fn q_time(&self) -> f64 {
        self.terms()[0].power
    }

    /// Pressure-chain exponents for T1.4 / T1.5, `β = 2 + 2/s`.
    pub fn exponent_pair(&self) -> Option<ExponentPair> {
        match self.theorem {
            TheoremId::T14 | TheoremId::T15 => Some(ExponentPair::from_s(self.s_or_zero())),
            _ => None,
        }
    }

    /// Short identifier, e.g. `T1.5(s=0.2)`.
    pub fn label(&self) -> String {
        match self.s {
            Some(s) => format!("{}(s={s})", self.theorem),
            None => self.theorem.to_string(),
        }
    }
}

/// Exponents of the pressure chain: `μ = 3β/(β+2)` and the Lebesgue `q`
/// with `1/μ + 1/β + (q−2)/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    pub beta: f64,
    pub mu: f64,
    pub q_leb: f64,
}

impl ExponentPair {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            mu: 3.0 * beta / (beta + 2.0),
            q_leb: 6.0 * beta / (beta + 5.0),
        }
    }

    pub fn from_s(s: f64) -> Self {
        Self::new(2.0 + 2.0 / s)
    }

    /// `s = 2/(β−2)`.
    pub fn s(&self) -> f64 {
        2.0 / (self.beta - 2.0)
    }

    /// Checks the chain's hypotheses for `theorem`.
    pub fn validate(&self, theorem: TheoremId) -> Result<()> {
        let min_beta = match theorem {
            TheoremId::T14 => 7.0,
            TheoremId::T15 => 37.0 / 4.0,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "{other} has no pressure chain"
                )))
            }
        };
        let q = self.q_leb;
        let ok = self.beta > min_beta
            && (1.0..=3.0).contains(&self.mu)
            && q / (self.beta * (q - 3.0)) < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{theorem} pressure chain needs β > {min_beta}, got β = {}",
                self.beta
            )))
        }
    }
}

/// Exponent of the Thm 1.3(ii) proof, `4/(3/2+ε)`.
pub fn split_exponent(eps: f64) -> f64 {
    4.0 / (1.5 + eps)
}

/// Exponent of the Thm 1.4 proof in terms of `β`, with the Lebesgue `q`
/// of [`ExponentPair`]: `q(β−2)/(β(q−3)−q)`.
pub fn pressure_exponent_t14(beta: f64) -> f64 {
    let q = ExponentPair::new(beta).q_leb;
    q * (beta - 2.0) / (beta * (q - 3.0) - q)
}

/// Exponent of the Thm 1.5 proof, `12(β−2)/(4β−37)`.
pub fn pressure_exponent_t15(beta: f64) -> f64 {
    12.0 * (beta - 2.0) / (4.0 * beta - 37.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn parse_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("T9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn s_ranges_are_open() {
        let err = CriterionSpec::new(TheoremId::T15, Some(0.5)).unwrap_err();
        assert_eq!(err.to_string(), "T1.5 requires 0 < s < 8/29, got s = 0.5");
        assert!(CriterionSpec::new(TheoremId::T14, Some(0.4)).is_err());
        assert!(CriterionSpec::new(TheoremId::T13ii, Some(0.0)).is_err());
        assert!(CriterionSpec::new(TheoremId::T13ii, Some(0.99)).is_ok());
        assert!(CriterionSpec::new(TheoremId::T12, Some(0.1)).is_err());
        assert!(CriterionSpec::new(TheoremId::T15, None).is_err());
    }

    #[test]
    fn time_exponents() {
        let q = |t, s| CriterionSpec::new(t, s).unwrap().q_time();
        assert_eq!(q(TheoremId::T12, None), 2.0);
        assert_eq!(q(TheoremId::T13i, None), 8.0 / 3.0);
        assert_eq!(q(TheoremId::C14a, None), 8.0 / 3.0);
        assert_eq!(q(TheoremId::T13ii, Some(0.5)), 2.0);
        assert_eq!(q(TheoremId::C14b, Some(0.5)), 2.0);
        assert_eq!(q(TheoremId::T14, Some(0.2)), 4.0);
        assert!((q(TheoremId::T15, Some(0.2)) - 24.0 / 2.2).abs() < 1e-13);
        let c = CriterionSpec::new(TheoremId::C14b, Some(0.3)).unwrap();
        assert!((c.terms()[0].smoothness - 0.7).abs() < 1e-15);
    }

    #[test]
    fn exponent_pair_relations() {
        for i in 0..50 {
            let beta = 7.01 + i as f64 * 0.5;
            let e = ExponentPair::new(beta);
            let lhs = 1.0 / e.mu + 1.0 / e.beta + (e.q_leb - 2.0) / e.q_leb;
            assert!((lhs - 1.0).abs() < 1e-14);
            assert!(e.validate(TheoremId::T14).is_ok());
            assert_eq!(e.validate(TheoremId::T15).is_ok(), beta > 9.25);
        }
        assert!(ExponentPair::new(6.5).validate(TheoremId::T14).is_err());
        // s inside the theorem interval gives an admissible β.
        assert!(ExponentPair::from_s(0.39).validate(TheoremId::T14).is_ok());
        assert!(ExponentPair::from_s(0.27).validate(TheoremId::T15).is_ok());
    }

    #[test]
    fn split_substitution_reproduces_t13ii() {
        for i in 0..50 {
            let eps = 0.01 + 0.98 * i as f64 / 49.0;
            let s = 1.0 - eps;
            assert!(rel(split_exponent(eps), 8.0 / (5.0 - 2.0 * s)) < 1e-14);
        }
    }

    #[test]
    fn pressure_substitution_reproduces_t14() {
        for i in 0..50 {
            let s = 0.005 + 0.39 * i as f64 / 49.0;
            let beta = 2.0 + 2.0 / s;
            assert!(rel(pressure_exponent_t14(beta), 4.0 / (2.0 - 5.0 * s)) < 1e-12);
        }
    }

    #[test]
    fn pressure_substitution_reproduces_t15() {
        for i in 0..50 {
            let s = 0.005 + 0.27 * i as f64 / 49.0;
            let beta = 2.0 + 2.0 / s;
            assert!(rel(pressure_exponent_t15(beta), 24.0 / (8.0 - 29.0 * s)) < 1e-12);
        }
    }
}
