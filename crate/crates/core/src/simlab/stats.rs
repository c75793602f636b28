/// Sample mean, sample standard deviation and 95% normal CI half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub stddev: f64,
    pub ci_halfwidth: f64,
    pub count: usize,
}

impl Summary {
    /// Summarizes `values` in the given order; the result depends only on
    /// the sequence, never on how it was produced.
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                stddev: f64::NAN,
                ci_halfwidth: f64::NAN,
                count,
            };
        }
        let n = count as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stddev = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stddev,
            ci_halfwidth: 1.96 * stddev / n.sqrt(),
            count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let s = Summary::of(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(s.mean, 5.0);
        assert!((s.stddev - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert!((s.ci_halfwidth - 1.96 * s.stddev / 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_value_has_zero_width() {
        let s = Summary::of(&[3.5]);
        assert_eq!((s.mean, s.stddev, s.ci_halfwidth), (3.5, 0.0, 0.0));
    }
}
