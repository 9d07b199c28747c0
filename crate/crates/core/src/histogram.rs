//! Fixed-width histograms, summary statistics and peak counting for
//! plot-ready distribution output.

use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};

pub const DEFAULT_BINS: usize = 100;

/// Fixed-width histogram with unit total mass.
///
/// Bins are closed on the right: bin `i` covers `(lo + i·w, lo + (i+1)·w]`,
/// and the first bin also includes `lo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(GridError::validation("histogram needs at least one value"));
        }
        if bins == 0 {
            return Err(GridError::validation("histogram needs at least one bin"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GridError::validation("histogram values must be finite"));
        }
        let max = values.iter().copied().fold(0.0f64, f64::max);
        let min = values.iter().copied().fold(0.0f64, f64::min);
        let (lo, hi) = if min < 0.0 {
            let m = max.max(-min);
            (-m, m)
        } else {
            (0.0, max)
        };
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in values {
            let idx = if width > 0.0 {
                let pos = ((v - lo) / width).ceil() as isize - 1;
                pos.clamp(0, bins as isize - 1) as usize
            } else {
                0
            };
            counts[idx] += 1;
        }
        let total = values.len() as f64;
        Ok(Histogram {
            lo,
            hi,
            masses: counts.into_iter().map(|c| c as f64 / total).collect(),
        })
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.masses.len() as f64
    }

    /// Midpoint of each bin.
    pub fn centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.masses.len())
            .map(|i| self.lo + (i as f64 + 0.5) * w)
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn occupied_bins(&self) -> usize {
        self.masses.iter().filter(|&&m| m > 0.0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| quantile_sorted(&sorted, p);
        Some(Summary {
            count: n,
            mean,
            std,
            min: sorted[0],
            q05: q(0.05),
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            q95: q(0.95),
            max: sorted[n - 1],
        })
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Centred moving average; the window shrinks at the edges.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let a = i.saturating_sub(half);
            let b = (i + half + 1).min(values.len());
            values[a..b].iter().sum::<f64>() / (b - a) as f64
        })
        .collect()
}

/// Number of strict local maxima with positive height. A plateau counts once
/// when both of its sides are lower; the ends of the series count as lower.
pub fn count_peaks(values: &[f64]) -> usize {
    let n = values.len();
    let mut peaks = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let left_lower = i == 0 || values[i - 1] < values[i];
        let right_lower = j + 1 == n || values[j + 1] < values[i];
        if left_lower && right_lower && values[i] > 0.0 {
            peaks += 1;
        }
        i = j + 1;
    }
    peaks
}
