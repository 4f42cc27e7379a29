//! Measured `lhs / rhs` ratios of inequalities with a skip flag for
//! degenerate denominators.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when the right-hand side vanishes.
    pub value: Option<f64>,
}

impl Ratio {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let value = if rhs > 0.0 && rhs.is_finite() && lhs.is_finite() {
            Some(lhs / rhs)
        } else {
            None
        };
        Self { lhs, rhs, value }
    }

    pub fn skipped(&self) -> bool {
        self.value.is_none()
    }

    /// True when the ratio is defined and at most `bound`.
    pub fn within(&self, bound: f64) -> bool {
        self.value.is_some_and(|r| r <= bound)
    }
}
