//! Small numeric helpers shared across modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn with(mut self, value: f64) -> Self {
        self.add(value);
        self
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Logarithm in base `k`.
#[inline]
pub fn log_base(x: f64, k: usize) -> f64 {
    x.ln() / (k as f64).ln()
}

/// `p * log_k(1/p)`, with the convention `0 log 0 = 0`.
#[inline]
pub fn entropy_term(p: f64, k: usize) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * log_base(p, k)
    }
}

/// `m * log_k(m)`, with the convention `0 log 0 = 0`.
#[inline]
pub fn mass_log_mass(m: f64, k: usize) -> f64 {
    if m <= 0.0 {
        0.0
    } else {
        m * log_base(m, k)
    }
}
