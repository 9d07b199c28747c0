//! Degree distributions and exponential decay fits `P(k) = C·e^(−k/γ)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};
use crate::graph::{derive_variant, GridGraph, Variant};

/// Decay constant below which a grid is classed as fragile in the
/// literature's exponential-fit classification.
pub const FRAGILITY_GAMMA: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreePdf {
    /// degree -> node count
    pub counts: BTreeMap<usize, usize>,
    pub n_nodes: usize,
}

impl DegreePdf {
    pub fn pdf(&self) -> BTreeMap<usize, f64> {
        self.counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.n_nodes as f64))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        let total: usize = self.counts.iter().map(|(&k, &c)| k * c).sum();
        total as f64 / self.n_nodes as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeFit {
    pub gamma: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// Degrees used in the regression.
    pub support: Vec<usize>,
}

/// Degree histogram; parallel circuits raise a node's degree.
pub fn degree_pdf(g: &GridGraph) -> DegreePdf {
    let mut counts = BTreeMap::new();
    for k in g.degrees() {
        *counts.entry(k).or_insert(0) += 1;
    }
    DegreePdf {
        counts,
        n_nodes: g.node_count(),
    }
}

/// Ordinary least squares of `ln p(k)` on `k` over occupied degrees `k ≥ 1`.
/// `γ = −1/slope`, prefactor `= e^intercept`.
pub fn fit_exponential(pdf: &DegreePdf) -> Result<DegreeFit> {
    let points: Vec<(usize, f64)> = pdf
        .pdf()
        .into_iter()
        .filter(|&(k, p)| k >= 1 && p > 0.0)
        .collect();
    fit_log_linear(&points)
}

/// Log-linear fit over explicit `(k, p(k))` points; every `p` must be positive.
pub fn fit_log_linear(points: &[(usize, f64)]) -> Result<DegreeFit> {
    if let Some((k, p)) = points.iter().find(|(_, p)| !(p.is_finite() && *p > 0.0)) {
        return Err(GridError::validation(format!("p({k}) = {p} is not positive")));
    }
    if points.len() < 3 {
        return Err(GridError::InsufficientSupport { found: points.len() });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(k, _)| k as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, p)| p.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(GridError::NonDecaying { slope });
    }
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DegreeFit {
        gamma: -1.0 / slope,
        prefactor: intercept.exp(),
        r_squared,
        support: points.iter().map(|&(k, _)| k).collect(),
    })
}

pub type GammaSuite = BTreeMap<Variant, DegreeFit>;

/// Fit all four canonical variants.
pub fn gamma_suite(g: &GridGraph) -> Result<GammaSuite> {
    Variant::ALL
        .par_iter()
        .map(|&variant| {
            derive_variant(g, variant.spec())
                .and_then(|v| fit_exponential(&degree_pdf(&v)))
                .map(|fit| (variant, fit))
                .map_err(|e| e.labeled(format!("variant {variant}")))
        })
        .collect()
}

/// `(γ_simple − γ_complete)/γ_complete` for the all-voltage pair and the
/// transmission pair.
pub fn relative_decrease(suite: &GammaSuite) -> Result<(f64, f64)> {
    let gamma = |v: Variant| {
        suite
            .get(&v)
            .map(|f| f.gamma)
            .ok_or_else(|| GridError::validation(format!("gamma suite is missing variant {v}")))
    };
    let rel = |complete: f64, simple: f64| (simple - complete) / complete;
    Ok((
        rel(gamma(Variant::CompleteHv)?, gamma(Variant::SimplifiedHv)?),
        rel(
            gamma(Variant::Transmission)?,
            gamma(Variant::TransmissionSimplified)?,
        ),
    ))
}
