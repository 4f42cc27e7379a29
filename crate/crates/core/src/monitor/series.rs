use crate::error::{Error, Result};

/// `(t, value)` samples of one scalar diagnostic, `t` strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    t: Vec<f64>,
    v: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() {
            return Err(Error::InvalidParameter(format!(
                "{} times but {} values",
                t.len(),
                v.len()
            )));
        }
        let mut s = Self::default();
        for (a, b) in t.into_iter().zip(v) {
            s.push(a, b)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, t: f64, v: f64) -> Result<()> {
        let i = self.t.len();
        if !t.is_finite() || self.t.last().is_some_and(|&last| t <= last) {
            return Err(Error::NonMonotoneTime(i));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite value {v} at sample {i}"
            )));
        }
        self.t.push(t);
        self.v.push(v);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.v.iter().copied())
    }

    pub fn sup(&self) -> f64 {
        self.v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
    }
}

fn check(series: &TimeSeries, q: f64) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("time exponent must be >= 1, got {q}")));
    }
    if let Some(i) = series.v.iter().position(|&x| x < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "negative value {} at sample {i}",
            series.v[i]
        )));
    }
    Ok(())
}

/// Trapezoidal `∫ v(τ)^q dτ` at every sample time, starting from 0.
pub fn running_integral(series: &TimeSeries, q: f64) -> Result<Vec<f64>> {
    check(series, q)?;
    let mut out = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in 1..series.len() {
        let h = series.t[w] - series.t[w - 1];
        acc += 0.5 * h * (series.v[w - 1].powf(q) + series.v[w].powf(q));
        out.push(acc);
    }
    Ok(out)
}

/// Trapezoidal `∫ v(τ)^q dτ` over the sampled range.
pub fn bochner_integral(series: &TimeSeries, q: f64) -> Result<f64> {
    Ok(*running_integral(series, q)?.last().unwrap())
}
