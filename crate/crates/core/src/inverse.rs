//! Reconstruction of (omega, v) from one-sided Weyl functions and from
//! spectral data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{spectral_data, wronskian_derivative_at, SpectralData};
use crate::measures::{PeakonMeasure, RawPoint};
use crate::ratfun::{cf_expand, Dd, HerglotzRational};
use crate::tolerances::Tolerances;
use crate::Side;

/// Restriction of a measure to [a, inf) (`Plus`) or (-inf, a) (`Minus`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLineMeasure {
    pub side: Side,
    pub a: f64,
    /// Ascending in x.
    pub points: Vec<RawPoint>,
}

impl HalfLineMeasure {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Joins the two halves of a measure cut at the same a.
    pub fn join(minus: &HalfLineMeasure, plus: &HalfLineMeasure, tol: &Tolerances) -> Result<PeakonMeasure> {
        let raw: Vec<RawPoint> = minus.points.iter().chain(&plus.points).copied().collect();
        PeakonMeasure::validate(&raw, tol)
    }
}

/// Rebuilds the half-line measure whose Weyl function at a is `h`.
///
/// Positions follow from the cumulative lengths, 2 tanh(|x_j - a|/2) = sum of
/// the lengths before stage j, and weights from m_j(z) = (z v_j + w_j)
/// cosh^2((x_j - a)/2). Far from a the prefix sums approach 2 and lose all
/// relative precision, so positions and cosh^2 factors are computed from the
/// remaining tail sums instead.
pub fn measure_from_weyl(h: &HerglotzRational, a: f64, side: Side, tol: &Tolerances) -> Result<HalfLineMeasure> {
    let cf = cf_expand(h, side, tol)?;
    let total = cf.total_length();
    if (total - 2.0).abs() > tol.cf * 2.0 {
        return Err(Error::LengthBudgetExceeded(total));
    }
    let k = cf.stages.len();
    let scale = 2.0 / total;
    let lengths: Vec<f64> = cf.stages.iter().map(|s| s.length * scale).collect();
    // tails[j] = lengths[j] + ... + lengths[k-1]
    let mut tails = vec![0.0; k];
    let mut acc = 0.0;
    for j in (0..k).rev() {
        acc += lengths[j];
        tails[j] = acc;
    }
    let mut prefix = cf.head_length * scale;
    let mut points = Vec::with_capacity(k);
    for (j, stage) in cf.stages.iter().enumerate() {
        let tail = tails[j];
        if tail <= 0.0 || !tail.is_finite() {
            return Err(Error::LengthBudgetExceeded(2.0 - tail));
        }
        let offset = if prefix <= 1.0 {
            2.0 * (0.5 * prefix).atanh()
        } else {
            ((4.0 - tail) / tail).ln()
        };
        let sech2 = tail * (4.0 - tail) / 4.0;
        let x = match side {
            Side::Plus => a + offset,
            Side::Minus => a - offset,
        };
        let mut v = stage.c1 * sech2;
        if v <= tol.zero {
            v = 0.0;
        }
        points.push(RawPoint::new(x, stage.c0 * sech2, v));
        prefix += lengths[j];
    }
    if side == Side::Minus {
        points.reverse();
        if points.last().is_some_and(|p| p.x >= a) {
            return Err(Error::LengthBudgetExceeded(0.0));
        }
    }
    Ok(HalfLineMeasure { side, a, points })
}

/// phi_i(a)^2 left of the support: e^a kappa_i / (lambda_i W'(lambda_i))^2.
fn log_phi2_left(sd: &SpectralData, a: f64) -> Vec<f64> {
    (0..sd.len())
        .map(|k| {
            let l = sd.eigenvalues[k];
            a + sd.norming[k].ln() - 2.0 * (l * wronskian_derivative_at(&sd.eigenvalues, k)).abs().ln()
        })
        .collect()
}

/// phi_i(a)^2 right of the support: e^{-a} / kappa_i.
fn log_phi2_right(sd: &SpectralData, a: f64) -> Vec<f64> {
    sd.norming.iter().map(|k| -a - k.ln()).collect()
}

/// Weyl function of the occupied side at a point a outside the support.
///
/// With phi_i(a)^2 known, -1/(alpha z + beta + G) is M_+ + M_-; the empty side
/// contributes exactly -1/(2z), which is removed from the pole at 0.
fn weyl_outside_support(sd: &SpectralData, a: f64, log_phi2: &[f64]) -> Result<HerglotzRational> {
    let zero = Dd::from(0.0);
    let mut terms = Vec::with_capacity(sd.len());
    let (mut sum_sq, mut sum_l) = (zero, zero);
    for (&l, &lp) in sd.eigenvalues.iter().zip(log_phi2) {
        let phi2 = Dd::from(lp.exp());
        sum_sq += phi2;
        sum_l += phi2 * l;
        terms.push((Dd::from(l), phi2 * l * l));
    }
    let alpha = -sum_sq + 1.0;
    if !(alpha > 0.0) {
        return Err(Error::Infeasible(format!("a = {a} is not outside the support (alpha = {})", alpha.hi())));
    }
    let h = HerglotzRational::new_dd(alpha, -sum_l, terms)?;
    let f = h.neg_reciprocal_pinned(Some(0.0))?;
    let (rest, b0) = f.without_pole_dd(0.0);
    let b0 = b0.ok_or(Error::BadResidueAtZero(0.0))?;
    rest.add_term_dd(zero, b0 - 0.5)
}

/// M_+ at a point a left of the support, determined by spectral data.
pub fn weyl_left_of_support(sd: &SpectralData, a: f64) -> Result<HerglotzRational> {
    weyl_outside_support(sd, a, &log_phi2_left(sd, a))
}

/// M_- at a point a right of the support, determined by spectral data.
pub fn weyl_right_of_support(sd: &SpectralData, a: f64) -> Result<HerglotzRational> {
    weyl_outside_support(sd, a, &log_phi2_right(sd, a))
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Leftmost support point implied by spectral data.
///
/// Left of the support sum_i phi_i(a)^2 = e^a S, and the sum reaches 1
/// exactly at a = x_1, so x_1 = -ln S.
pub fn leftmost_point(sd: &SpectralData) -> f64 {
    -log_sum_exp(&log_phi2_left(sd, 0.0))
}

/// Rightmost support point: x_n = ln sum_i 1/kappa_i by the same argument.
pub fn rightmost_point(sd: &SpectralData) -> f64 {
    log_sum_exp(&log_phi2_right(sd, 0.0))
}

fn half_from_left(sd: &SpectralData, a: f64, tol: &Tolerances) -> Result<Vec<RawPoint>> {
    let half = measure_from_weyl(&weyl_left_of_support(sd, a)?, a, Side::Plus, tol)?;
    if half.points.first().is_some_and(|p| p.x <= a) {
        return Err(Error::Infeasible(format!("reconstructed support reaches a = {a}")));
    }
    Ok(half.points)
}

fn half_from_right(sd: &SpectralData, a: f64, tol: &Tolerances) -> Result<Vec<RawPoint>> {
    Ok(measure_from_weyl(&weyl_right_of_support(sd, a)?, a, Side::Minus, tol)?.points)
}

fn verified(sd: &SpectralData, raw: &[RawPoint], tol: &Tolerances) -> Result<(PeakonMeasure, f64)> {
    let m = PeakonMeasure::validate(raw, tol)?;
    let check = spectral_data(&m, tol)?;
    if check.len() != sd.len() {
        return Err(Error::DegreeMismatch(format!(
            "reconstruction has {} eigenvalues, data has {}",
            check.len(),
            sd.len()
        )));
    }
    let err = spectral_mismatch(&check, sd);
    Ok((m, err))
}

/// Largest relative deviation between two spectral data sets of equal size.
pub fn spectral_mismatch(x: &SpectralData, y: &SpectralData) -> f64 {
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    x.eigenvalues
        .iter()
        .zip(&y.eigenvalues)
        .map(|(a, b)| rel(*a, *b))
        .chain(x.norming.iter().zip(&y.norming).map(|(a, b)| rel(*a, *b)))
        .fold(0.0, f64::max)
}

/// Distances of the reference point from the support, in trial order.
const OFFSETS: [f64; 8] = [1.0, 2.0, 0.5, 4.0, 0.25, 8.0, 0.125, 16.0];

/// The unique measure with the given eigenvalues and norming constants.
///
/// Outside the support the data fix phi_i(a) explicitly, and the Weyl
/// function of the occupied side expands into a continued fraction. Deep
/// stages of such an expansion are badly conditioned, so the support is
/// rebuilt from both ends (a = x_1 - d and a = x_n + d, both endpoints being
/// explicit in the data) and each point is taken from the nearer end. Offsets
/// d are tried in a fixed order until a candidate reproduces the data forward
/// within `tol.inv`.
pub fn measure_from_spectral_data(sd: &SpectralData, tol: &Tolerances) -> Result<PeakonMeasure> {
    sd.validate()?;
    let (x1, xn) = (leftmost_point(sd), rightmost_point(sd));
    if !(x1.is_finite() && xn.is_finite()) || xn < x1 - tol.pos {
        return Err(Error::Infeasible(format!("data imply support endpoints {x1}, {xn}")));
    }
    let mid = 0.5 * (x1 + xn);
    let mut best: Option<(PeakonMeasure, f64)> = None;
    let mut last_err = None;
    for delta in OFFSETS {
        let left = half_from_left(sd, x1 - delta, tol);
        let right = half_from_right(sd, xn + delta, tol);
        let mut candidates = Vec::new();
        if let (Ok(l), Ok(r)) = (&left, &right) {
            let merged: Vec<RawPoint> = l
                .iter()
                .filter(|p| p.x < mid)
                .chain(r.iter().filter(|p| p.x >= mid))
                .copied()
                .collect();
            candidates.push(merged);
        }
        for side in [left, right] {
            match side {
                Ok(points) => candidates.push(points),
                Err(e) => last_err = Some(e),
            }
        }
        for raw in candidates {
            match verified(sd, &raw, tol) {
                Ok((m, err)) => {
                    if err <= tol.inv {
                        return Ok(m);
                    }
                    if best.as_ref().map_or(true, |b| err < b.1) {
                        best = Some((m, err));
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    match best {
        Some((_, err)) => Err(Error::NonConverged(format!(
            "reconstruction reproduces the data only to {err:e}"
        ))),
        None => Err(Error::Infeasible(format!(
            "no reference point yields a valid expansion: {}",
            last_err.map_or_else(|| "no attempt".into(), |e| e.to_string())
        ))),
    }
}
