//! Sampled spectra on an ordered frequency grid.

use serde::{Deserialize, Serialize};

/// Real samples on a strictly increasing detuning grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    /// Free-form label, e.g. the channel name.
    pub label: String,
    /// What the frequency axis is normalized by, e.g. `"gamma"`.
    pub omega_unit: String,
}

impl SpectrumSeries {
    /// Builds a series, checking that the grid is strictly increasing and the
    /// lengths agree.
    pub fn new(omega: Vec<f64>, values: Vec<f64>, label: &str, omega_unit: &str) -> Self {
        assert_eq!(
            omega.len(),
            values.len(),
            "grid and samples differ in length"
        );
        assert!(
            omega.windows(2).all(|w| w[0] < w[1]),
            "grid must be strictly increasing"
        );
        Self {
            omega,
            values,
            label: label.to_string(),
            omega_unit: omega_unit.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn interpolate(&self, w: f64) -> Option<f64> {
        let n = self.omega.len();
        if n == 0 || w < self.omega[0] || w > self.omega[n - 1] {
            return None;
        }
        let i = self.omega.partition_point(|&x| x <= w);
        if i == 0 {
            return Some(self.values[0]);
        }
        if i >= n {
            return Some(self.values[n - 1]);
        }
        let (x0, x1) = (self.omega[i - 1], self.omega[i]);
        let t = (w - x0) / (x1 - x0);
        Some(self.values[i - 1] * (1.0 - t) + self.values[i] * t)
    }

    /// Index and value of the largest sample.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold(None, |acc, (i, v)| match acc {
                Some((_, best)) if best >= v => acc,
                _ => Some((i, v)),
            })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `n` evenly spaced points over `[-half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && half_width > 0.0);
    let step = 2.0 * half_width / (n - 1) as f64;
    (0..n).map(|i| -half_width + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_linear_between_nodes() {
        let s = SpectrumSeries::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0], "t", "gamma");
        assert_eq!(s.interpolate(0.5), Some(1.0));
        assert_eq!(s.interpolate(2.0), Some(1.0));
        assert_eq!(s.interpolate(3.0), Some(0.0));
        assert_eq!(s.interpolate(3.5), None);
    }

    #[test]
    fn grid_is_symmetric() {
        let g = symmetric_grid(2.0, 5);
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    #[should_panic]
    fn rejects_unordered_grid() {
        SpectrumSeries::new(vec![1.0, 0.0], vec![0.0, 0.0], "t", "gamma");
    }
}
