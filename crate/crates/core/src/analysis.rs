//! Position distributions, their moments, Kolmogorov distance and the
//! phase-gate symmetry experiment.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::walk::{Geometry, WalkSetup, WalkState};

/// `p(x)` over the site labels of a geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistribution {
    pub sites: Vec<i64>,
    pub probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(sites: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        if sites.len() != probs.len() || sites.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} sites but {} probabilities",
                sites.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::MalformedState("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::MalformedState(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            sites,
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
        })
    }

    pub fn probability_at(&self, site: i64) -> Option<f64> {
        self.sites.iter().position(|&s| s == site).map(|i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.sites.iter().copied().zip(self.probs.iter().copied())
    }

    /// The same probabilities on labels shifted by `offset`.
    pub fn shifted(&self, offset: i64) -> Self {
        Self {
            sites: self.sites.iter().map(|s| s + offset).collect(),
            probs: self.probs.clone(),
        }
    }
}

/// `p(x) = ⟨ψ_x| tr_c ρ |ψ_x⟩`, read off the diagonal of both coin blocks.
pub fn position_distribution(s: &WalkState) -> PositionDistribution {
    let g = s.geometry();
    let p = g.position_dim();
    let m = s.rho().matrix();
    let probs = (0..p)
        .map(|x| (m[(x, x)].re + m[(p + x, p + x)].re).max(0.0))
        .collect();
    PositionDistribution {
        sites: g.site_labels(),
        probs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std_dev: f64,
}

pub fn stats(d: &PositionDistribution) -> Stats {
    let mean: f64 = d.iter().map(|(x, p)| x as f64 * p).sum();
    // central second moment; avoids cancellation in E[x²] − mean²
    let var: f64 = d.iter().map(|(x, p)| (x as f64 - mean).powi(2) * p).sum();
    Stats {
        mean,
        std_dev: var.max(0.0).sqrt(),
    }
}

/// `½ Σ_x |p(x) − q(x)|`
pub fn kolmogorov_distance(p: &PositionDistribution, q: &PositionDistribution) -> Result<f64> {
    if p.sites != q.sites {
        return Err(Error::DimensionMismatch(
            "distributions are defined on different site sets".into(),
        ));
    }
    let d: f64 = p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * d).clamp(0.0, 1.0))
}

/// `G(α) = diag(1, e^{iα})`, α in degrees.
pub fn phase_gate(alpha: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, alpha.to_radians()),
    ])
}

/// Per-step Kolmogorov distance between walks with and without `G(α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrySeries {
    pub alpha: f64,
    /// `kd[t−1]` is the distance after `t` steps.
    pub kd: Vec<f64>,
    pub geometry: Geometry,
    pub noise: String,
}

fn distributions(setup: &WalkSetup, gate: Option<&ComplexMatrix>, steps: usize) -> Result<Vec<PositionDistribution>> {
    let mut out = Vec::with_capacity(steps);
    setup.run_gated(gate, steps, |s| {
        out.push(position_distribution(s));
        Ok(())
    })?;
    Ok(out)
}

/// Runs the walk twice, with and without `G(α)` acting on the coin just
/// before each shift (so the coin operation is `G(α)·B` when the noise
/// does not sit between coin and shift), and compares the position
/// distributions step by step.
pub fn symmetry_experiment(setup: &WalkSetup, steps: usize, alpha: f64) -> Result<SymmetrySeries> {
    let gate = phase_gate(alpha);
    let (plain, with_gate) = rayon::join(
        || distributions(setup, None, steps),
        || distributions(setup, Some(&gate), steps),
    );
    let (plain, with_gate) = (plain?, with_gate?);
    let kd = plain
        .iter()
        .zip(&with_gate)
        .map(|(p, q)| kolmogorov_distance(p, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetrySeries {
        alpha,
        kd,
        geometry: setup.geometry,
        noise: setup
            .channel
            .as_ref()
            .map_or_else(|| "none".to_string(), |c| c.label().to_string()),
    })
}
