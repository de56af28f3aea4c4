//! Conservative multipeakon dynamics through the isospectral flow.
//!
//! Eigenvalues are constants of motion and each norming constant evolves by
//! kappa_i(t) = exp(-(t - t0) / (2 lambda_i)) kappa_i(t0), so the state at any
//! time is a single reconstruction away. Collisions show up as v-points of
//! the reconstructed measure.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{normalized_eigenfunctions, SpectralData};
use crate::inverse::measure_from_spectral_data;
use crate::measures::PeakonMeasure;
use crate::tolerances::Tolerances;

/// Spectral data at a base time plus a cache of reconstructed measures.
#[derive(Debug)]
pub struct FlowState {
    base: SpectralData,
    t0: f64,
    cache: Mutex<HashMap<u64, PeakonMeasure>>,
}

impl FlowState {
    pub fn new(base: SpectralData, t0: f64) -> Result<Self> {
        base.validate()?;
        if !t0.is_finite() {
            return Err(Error::NonFinite(format!("t0={t0}")));
        }
        Ok(FlowState { base, t0, cache: Mutex::new(HashMap::new()) })
    }

    pub fn base(&self) -> &SpectralData {
        &self.base
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// The measure at time t, reconstructed once and cached by the bits of t.
    pub fn measure_at(&self, t: f64, tol: &Tolerances) -> Result<PeakonMeasure> {
        if let Some(m) = self.cache.lock().expect("cache poisoned").get(&t.to_bits()) {
            return Ok(m.clone());
        }
        let m = measure_from_spectral_data(&evolve_spectral(self, t), tol)?;
        // identical values on a race, so last write wins
        self.cache.lock().expect("cache poisoned").insert(t.to_bits(), m.clone());
        Ok(m)
    }
}

/// Spectral data at time t.
pub fn evolve_spectral(fs: &FlowState, t: f64) -> SpectralData {
    let dt = t - fs.t0;
    let norming = fs
        .base
        .eigenvalues
        .iter()
        .zip(&fs.base.norming)
        .map(|(&l, &k)| k * (-dt / (2.0 * l)).exp())
        .collect();
    SpectralData { eigenvalues: fs.base.eigenvalues.clone(), norming }
}

/// u(x) = 1/2 sum_j omega_j exp(-|x - x_j|).
pub fn kernel_u(m: &PeakonMeasure, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| m.kernel_profile(x)).collect()
}

/// u(x) = 1/2 sum_i phi_i(x)^2 / lambda_i with phi_i normalized by sd.
pub fn trace_u(m: &PeakonMeasure, sd: &SpectralData, xs: &[f64]) -> Vec<f64> {
    let phi = normalized_eigenfunctions(m, sd, xs);
    (0..xs.len())
        .map(|k| {
            0.5 * phi
                .iter()
                .zip(&sd.eigenvalues)
                .map(|(row, &l)| row[k] * row[k] / l)
                .sum::<f64>()
        })
        .collect()
}

/// u(., t) on the grid and the measure at t. The kernel sum is returned after
/// checking it against the trace formula at every grid point.
pub fn solution_at(fs: &FlowState, t: f64, xs: &[f64], tol: &Tolerances) -> Result<(Vec<f64>, PeakonMeasure)> {
    let m = fs.measure_at(t, tol)?;
    let u = kernel_u(&m, xs);
    let tr = trace_u(&m, &evolve_spectral(fs, t), xs);
    let worst = u.iter().zip(&tr).fold(0.0f64, |s, (a, b)| s.max((a - b).abs()));
    if worst > tol.trace || worst.is_nan() {
        return Err(Error::TraceMismatch(worst));
    }
    Ok((u, m))
}

/// sup |u| over all x and t, 1/(2 min |lambda|), and whether it is attained.
pub fn sup_u(fs: &FlowState) -> (f64, bool) {
    let lmin = fs.base.eigenvalues.iter().fold(f64::INFINITY, |s, l| s.min(l.abs()));
    (0.5 / lmin, fs.base.len() == 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionSample {
    pub t: f64,
    /// Total v-mass, or None when reconstruction failed at this time.
    pub v_mass: Option<f64>,
    /// Signs of the weights in position order (0 for a pure v-point).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Total v-mass of the reconstructed measure at each sampled time. Failures
/// are recorded per time and do not stop the scan.
pub fn collision_scan(fs: &FlowState, times: &[f64], tol: &Tolerances) -> Vec<CollisionSample> {
    times
        .par_iter()
        .map(|&t| match fs.measure_at(t, tol) {
            Ok(m) => CollisionSample {
                t,
                v_mass: Some(m.vee().iter().sum()),
                signs: Some(m.omega().iter().map(|&w| if w > 0.0 { 1 } else if w < 0.0 { -1 } else { 0 }).collect()),
                error: None,
            },
            Err(e) => CollisionSample { t, v_mass: None, signs: None, error: Some(e.to_string()) },
        })
        .collect()
}

/// Time intervals, at sampling resolution, that contain a collision: a
/// sample carrying v-mass, a failed reconstruction, or a change of the sign
/// pattern between neighbouring samples (colliding peakons pass through each
/// other).
pub fn collision_windows(samples: &[CollisionSample]) -> Vec<(f64, f64)> {
    let mut s: Vec<&CollisionSample> = samples.iter().collect();
    s.sort_by(|a, b| a.t.total_cmp(&b.t));
    let flagged = |c: &CollisionSample| c.v_mass.map_or(true, |v| v > 0.0);
    // windows as sample index ranges; touching ranges merge
    let mut idx: Vec<(usize, usize)> = Vec::new();
    let mut push = |lo: usize, hi: usize| match idx.last_mut() {
        Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
        _ => idx.push((lo, hi)),
    };
    for (k, c) in s.iter().enumerate() {
        if flagged(c) {
            push(k, k);
        }
        if let Some(next) = s.get(k + 1) {
            if let (Some(a), Some(b)) = (&c.signs, &next.signs) {
                if a != b && !flagged(c) && !flagged(next) {
                    push(k, k + 1);
                }
            }
        }
    }
    let out = idx.into_iter().map(|(lo, hi)| (s[lo].t, s[hi].t)).collect();
    out
}
