//! Finite discrete measure pairs (omega, v) on strictly ordered points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// One raw support point as it appears in the JSON measure format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawPoint {
    pub x: f64,
    pub w: f64,
    pub v: f64,
}

impl RawPoint {
    pub fn new(x: f64, w: f64, v: f64) -> Self {
        RawPoint { x, w, v }
    }
}

/// The pair omega = sum w_i delta_{x_i}, v = sum v_i delta_{x_i}.
///
/// Invariants (enforced by [`PeakonMeasure::validate`]): at least one point,
/// points strictly increasing, v_i >= 0, |w_i| + v_i > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakonMeasure {
    points: Vec<f64>,
    omega: Vec<f64>,
    vee: Vec<f64>,
}

/// Support classification (n_v, n_plus, n_minus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub n_v: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Counts {
    pub fn positive_eigenvalues(&self) -> usize {
        self.n_v + self.n_plus
    }

    pub fn negative_eigenvalues(&self) -> usize {
        self.n_v + self.n_minus
    }

    pub fn total(&self) -> usize {
        self.n_v + self.n_plus + self.n_minus
    }
}

impl PeakonMeasure {
    /// Builds a measure from unordered raw triples.
    pub fn validate(raw: &[RawPoint], tol: &Tolerances) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut sorted = raw.to_vec();
        for p in &sorted {
            if !(p.x.is_finite() && p.w.is_finite() && p.v.is_finite()) {
                return Err(Error::NonFinite(format!("{p:?}")));
            }
        }
        sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
        for pair in sorted.windows(2) {
            if pair[1].x - pair[0].x < tol.pos {
                return Err(Error::DuplicatePoint(pair[0].x, pair[1].x));
            }
        }
        let mut points = Vec::with_capacity(sorted.len());
        let mut omega = Vec::with_capacity(sorted.len());
        let mut vee = Vec::with_capacity(sorted.len());
        for p in sorted {
            if p.v < -tol.zero {
                return Err(Error::NegativeVee { x: p.x, v: p.v });
            }
            let v = if p.v <= tol.zero { 0.0 } else { p.v };
            if p.w.abs() + v <= tol.zero {
                return Err(Error::NullPoint(p.x));
            }
            points.push(p.x);
            omega.push(p.w);
            vee.push(v);
        }
        Ok(PeakonMeasure { points, omega, vee })
    }

    /// Convenience constructor from parallel slices with default tolerances.
    pub fn new(points: &[f64], omega: &[f64], vee: &[f64]) -> Result<Self> {
        if points.len() != omega.len() || points.len() != vee.len() {
            return Err(Error::InvalidArgument(format!(
                "length mismatch: {} points, {} omega, {} v",
                points.len(),
                omega.len(),
                vee.len()
            )));
        }
        let raw: Vec<RawPoint> = points
            .iter()
            .zip(omega)
            .zip(vee)
            .map(|((&x, &w), &v)| RawPoint { x, w, v })
            .collect();
        Self::validate(&raw, &Tolerances::default())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn vee(&self) -> &[f64] {
        &self.vee
    }

    pub fn to_raw(&self) -> Vec<RawPoint> {
        (0..self.len())
            .map(|i| RawPoint::new(self.points[i], self.omega[i], self.vee[i]))
            .collect()
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts { n_v: 0, n_plus: 0, n_minus: 0 };
        for (&w, &v) in self.omega.iter().zip(&self.vee) {
            if v != 0.0 {
                c.n_v += 1;
            } else if w > 0.0 {
                c.n_plus += 1;
            } else {
                c.n_minus += 1;
            }
        }
        c
    }

    /// Number of eigenvalues, n + n_v.
    pub fn spectrum_size(&self) -> usize {
        self.len() + self.counts().n_v
    }

    pub fn total_omega(&self) -> f64 {
        self.omega.iter().sum()
    }

    pub fn total_vee(&self) -> f64 {
        self.vee.iter().sum()
    }

    /// u(x) = 1/2 sum w_j exp(-|x - x_j|).
    pub fn kernel_profile(&self, x: f64) -> f64 {
        0.5 * self
            .points
            .iter()
            .zip(&self.omega)
            .map(|(&xj, &wj)| wj * (-(x - xj).abs()).exp())
            .sum::<f64>()
    }

    /// Smallest gap between consecutive points, or infinity for one point.
    pub fn min_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}
