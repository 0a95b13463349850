//! Small shared numeric helpers.

use std::sync::atomic::{AtomicU64, Ordering};

/// Shared monotone running minimum over non-negative floats, used to prune
/// parallel sweeps. Stores the bit pattern of the value; for non-negative
/// floats integer ordering on the bits agrees with float ordering.
pub(crate) struct AtomicMinF64(AtomicU64);

impl AtomicMinF64 {
    pub fn new() -> AtomicMinF64 {
        AtomicMinF64(AtomicU64::new(f64::INFINITY.to_bits()))
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    pub fn update(&self, v: f64) {
        debug_assert!(v >= 0.0);
        self.0.fetch_min(v.to_bits(), Ordering::Relaxed);
    }
}

/// Result of an ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsLine {
    pub intercept: f64,
    pub slope: f64,
    pub rms_residual: f64,
}

/// Equal-weight OLS line through `(x, y)` samples. Returns `None` with fewer
/// than two samples or when all abscissae coincide.
pub fn ols_line(samples: &[(f64, f64)]) -> Option<OlsLine> {
    let n = samples.len() as f64;
    if samples.len() < 2 {
        return None;
    }
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_x) * (s.0 - mean_x)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - mean_x) * (s.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = samples
        .iter()
        .map(|s| {
            let r = s.1 - (intercept + slope * s.0);
            r * r
        })
        .sum();
    Some(OlsLine { intercept, slope, rms_residual: (ss / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let samples: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 3.0 + 2.0 * k as f64)).collect();
        let fit = ols_line(&samples).unwrap();
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(ols_line(&[(0.0, 1.0)]).is_none());
        assert!(ols_line(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
