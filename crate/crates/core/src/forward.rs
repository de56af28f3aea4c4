//! Forward spectral solver.
//!
//! Between support points every solution of the spectral problem is a
//! combination A e^{x/2} + B e^{-x/2}; at x_i the left derivative jumps by
//! (z w_i + z^2 v_i) f(x_i). Eigenvalues come from Sturm counts of the
//! three-term determinant recursion Q_0, ..., Q_n of the tridiagonal pencil.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::PeakonMeasure;
use crate::ratfun::{cf_to_herglotz, HerglotzRational, RealPolynomial, Stage, StieltjesCF};
use crate::tolerances::Tolerances;
use crate::Side;

/// Eigenvalues with their modified norming constants kappa_i = lambda_i gamma_i^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub norming: Vec<f64>,
}

impl SpectralData {
    /// Checks ordering, nonzero eigenvalues and positive norming constants.
    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        if self.eigenvalues.len() != self.norming.len() {
            return Err(Error::InvalidArgument(format!(
                "{} eigenvalues but {} norming constants",
                self.eigenvalues.len(),
                self.norming.len()
            )));
        }
        for (&l, &k) in self.eigenvalues.iter().zip(&self.norming) {
            if !(l.is_finite() && k.is_finite()) {
                return Err(Error::NonFinite(format!("lambda={l}, kappa={k}")));
            }
            if l == 0.0 {
                return Err(Error::InvalidArgument("zero eigenvalue".into()));
            }
            if k <= 0.0 {
                return Err(Error::InvalidArgument(format!("norming constant {k} at {l}")));
            }
        }
        if self.eigenvalues.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("eigenvalues not strictly increasing".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Eigenvalues with signed normalized eigenfunction values at a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorData {
    pub a: f64,
    pub eigenvalues: Vec<f64>,
    pub phi: Vec<f64>,
}

impl InteriorData {
    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() {
            return Err(Error::NonFinite(format!("a = {}", self.a)));
        }
        if self.eigenvalues.len() != self.phi.len() {
            return Err(Error::InvalidArgument(format!(
                "{} eigenvalues but {} phi values",
                self.eigenvalues.len(),
                self.phi.len()
            )));
        }
        if self.eigenvalues.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        for (&l, &p) in self.eigenvalues.iter().zip(&self.phi) {
            if !(l.is_finite() && p.is_finite()) {
                return Err(Error::NonFinite(format!("lambda={l}, phi={p}")));
            }
            if l == 0.0 {
                return Err(Error::InvalidArgument("zero eigenvalue".into()));
            }
        }
        if self.eigenvalues.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("eigenvalues not strictly increasing".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Gap coefficients of the pencil, rows ordered from x_n down to x_1.
///
/// `a[i]` couples rows i and i+1, `b[i]` is the diagonal of row i.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// The pencil J y = z D y of size (n + n_v).
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub j: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub coefficients: GapCoefficients,
}

fn coth_half(gap: f64) -> f64 {
    if gap.is_infinite() {
        1.0
    } else {
        1.0 / (0.5 * gap).tanh()
    }
}

pub fn gap_coefficients(m: &PeakonMeasure, tol: &Tolerances) -> Result<GapCoefficients> {
    let x = m.points();
    let n = x.len();
    for w in x.windows(2) {
        if w[1] - w[0] < tol.collision {
            return Err(Error::NearCollision(w[0], w[1]));
        }
    }
    // row i <-> point x[n - 1 - i]
    let gap = |k: usize| x[k + 1] - x[k];
    let a = (1..n).map(|i| 0.5 / (0.5 * gap(n - 1 - i)).sinh()).collect();
    let b = (0..n)
        .map(|i| {
            let k = n - 1 - i;
            let right = if k + 1 < n { gap(k) } else { f64::INFINITY };
            let left = if k > 0 { gap(k - 1) } else { f64::INFINITY };
            0.5 * (coth_half(right) + coth_half(left))
        })
        .collect();
    Ok(GapCoefficients { a, b })
}

pub fn build_pencil(m: &PeakonMeasure, tol: &Tolerances) -> Result<Pencil> {
    let coefficients = gap_coefficients(m, tol)?;
    let n = m.len();
    let v_rows: Vec<usize> = (0..n).filter(|&i| m.vee()[n - 1 - i] != 0.0).collect();
    let size = n + v_rows.len();
    let mut j = DMatrix::zeros(size, size);
    let mut d = DMatrix::zeros(size, size);
    for i in 0..n {
        j[(i, i)] = coefficients.b[i];
        d[(i, i)] = m.omega()[n - 1 - i];
        if i + 1 < n {
            j[(i, i + 1)] = -coefficients.a[i];
            j[(i + 1, i)] = -coefficients.a[i];
        }
    }
    for (k, &row) in v_rows.iter().enumerate() {
        let col = n + k;
        j[(col, col)] = 1.0;
        let s = m.vee()[n - 1 - row].sqrt();
        d[(row, col)] = s;
        d[(col, row)] = s;
    }
    if j.clone().cholesky().is_none() {
        return Err(Error::NonConverged("pencil matrix J is not positive definite".into()));
    }
    Ok(Pencil { j, d, coefficients })
}

/// Diagonal entry of row i at z: b_i - w z - v z^2.
fn diag(m: &PeakonMeasure, c: &GapCoefficients, i: usize, z: f64) -> f64 {
    let k = m.len() - 1 - i;
    c.b[i] - m.omega()[k] * z - m.vee()[k] * z * z
}

/// Q_0(z), ..., Q_n(z) by the three-term recursion.
pub fn q_values(m: &PeakonMeasure, z: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    let c = gap_coefficients(m, tol)?;
    let n = m.len();
    let mut q = Vec::with_capacity(n + 1);
    q.push(1.0);
    q.push(diag(m, &c, 0, z));
    for i in 1..n {
        q.push(diag(m, &c, i, z) * q[i] - c.a[i - 1] * c.a[i - 1] * q[i - 1]);
    }
    Ok(q)
}

/// Q_0, ..., Q_n as polynomials in z.
pub fn q_polynomials(m: &PeakonMeasure, tol: &Tolerances) -> Result<Vec<RealPolynomial>> {
    let c = gap_coefficients(m, tol)?;
    let n = m.len();
    let row = |i: usize| {
        let k = n - 1 - i;
        RealPolynomial::new(vec![c.b[i], -m.omega()[k], -m.vee()[k]])
    };
    let mut q = vec![RealPolynomial::constant(1.0), row(0)];
    for i in 1..n {
        let next = row(i) * q[i].clone() - q[i - 1].scale(c.a[i - 1] * c.a[i - 1]);
        q.push(next);
    }
    Ok(q)
}

/// e^{(x_n - x_1)/2} prod a_j, so that Q_n = scale * W.
pub fn q_scale(m: &PeakonMeasure, tol: &Tolerances) -> Result<f64> {
    let c = gap_coefficients(m, tol)?;
    let x = m.points();
    Ok((0.5 * (x[x.len() - 1] - x[0])).exp() * c.a.iter().product::<f64>())
}

fn count_negative_pivots(m: &PeakonMeasure, c: &GapCoefficients, z: f64) -> usize {
    let mut count = 0;
    let mut r = diag(m, c, 0, z);
    if r < 0.0 {
        count += 1;
    }
    for i in 1..m.len() {
        let a2 = c.a[i - 1] * c.a[i - 1];
        let d = diag(m, c, i, z);
        let prev = if r == 0.0 { f64::EPSILON * (d.abs() + a2).max(f64::MIN_POSITIVE) } else { r };
        r = d - a2 / prev;
        if r < 0.0 {
            count += 1;
        }
    }
    count
}

/// Number of sign changes in Q_0(z), ..., Q_n(z).
///
/// For z > 0 this is the number of positive eigenvalues below z; for z < 0
/// the number of negative eigenvalues in (z, 0).
pub fn sign_changes(m: &PeakonMeasure, z: f64, tol: &Tolerances) -> Result<usize> {
    let c = gap_coefficients(m, tol)?;
    Ok(count_negative_pivots(m, &c, z))
}

/// (Q_n(z), Q_n'(z))
fn qn_with_derivative(m: &PeakonMeasure, c: &GapCoefficients, z: f64) -> (f64, f64) {
    let n = m.len();
    let (mut q0, mut d0) = (1.0, 0.0);
    let k = n - 1;
    let (mut q1, mut d1) = (diag(m, c, 0, z), -m.omega()[k] - 2.0 * m.vee()[k] * z);
    for i in 1..n {
        let k = n - 1 - i;
        let a2 = c.a[i - 1] * c.a[i - 1];
        let dg = diag(m, c, i, z);
        let ddg = -m.omega()[k] - 2.0 * m.vee()[k] * z;
        let q2 = dg * q1 - a2 * q0;
        let d2 = ddg * q1 + dg * d1 - a2 * d0;
        q0 = q1;
        d0 = d1;
        q1 = q2;
        d1 = d2;
    }
    (q1, d1)
}

/// All eigenvalues in ascending order.
///
/// Each one is isolated by bisection on exact Sturm counts and then polished
/// by a guarded Newton step on Q_n.
pub fn eigenvalues(m: &PeakonMeasure, tol: &Tolerances) -> Result<Vec<f64>> {
    let c = gap_coefficients(m, tol)?;
    let counts = m.counts();
    let (np, nn) = (counts.positive_eigenvalues(), counts.negative_eigenvalues());
    let mut out = Vec::with_capacity(np + nn);
    for (sign, total) in [(-1.0, nn), (1.0, np)] {
        if total == 0 {
            continue;
        }
        let mut bound = 1.0f64;
        let mut guard = 0;
        while count_negative_pivots(m, &c, sign * bound) < total {
            bound *= 2.0;
            guard += 1;
            if guard > 2000 || !bound.is_finite() {
                return Err(Error::NonConverged(format!(
                    "Sturm count never reached {total} on the {} half-line",
                    if sign > 0.0 { "positive" } else { "negative" }
                )));
            }
        }
        let mut ladder = Vec::with_capacity(total);
        for rank in 1..=total {
            // smallest |z| with count >= rank
            let (mut lo, mut hi) = (0.0f64, bound);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_negative_pivots(m, &c, sign * mid) >= rank {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let root = polish(m, &c, sign * lo, sign * hi);
            ladder.push(root);
        }
        if sign < 0.0 {
            ladder.reverse();
        }
        out.extend(ladder);
    }
    if out.iter().any(|&l| l == 0.0) {
        return Err(Error::NonConverged("eigenvalue collapsed onto zero".into()));
    }
    for w in out.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::NonConverged(format!("eigenvalues {} and {} not separated", w[0], w[1])));
        }
    }
    Ok(out)
}

fn polish(m: &PeakonMeasure, c: &GapCoefficients, a: f64, b: f64) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut x = 0.5 * (lo + hi);
    let (mut q, mut dq) = qn_with_derivative(m, c, x);
    let width = (hi - lo).max(4.0 * f64::EPSILON * x.abs());
    for _ in 0..3 {
        if dq == 0.0 || q == 0.0 {
            break;
        }
        let next = x - q / dq;
        if !((next - x).abs() <= width) {
            break;
        }
        let (qn, dqn) = qn_with_derivative(m, c, next);
        if qn.abs() >= q.abs() {
            break;
        }
        x = next;
        q = qn;
        dq = dqn;
    }
    x
}

/// Scalars the shooting recursion can run over.
pub trait ShootScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self> + From<f64>
{
}

impl ShootScalar for f64 {}
impl ShootScalar for Complex64 {}

/// Piecewise representation A_g e^{x/2} + B_g e^{-x/2} of a solution, one
/// coefficient pair per gap; gap g lies between x_g and x_{g+1} (1-based,
/// with x_0 = -inf and x_{n+1} = +inf).
#[derive(Debug, Clone)]
pub struct ShootingProfile<T> {
    points: Vec<f64>,
    coeffs: Vec<(T, T)>,
}

impl<T: ShootScalar> ShootingProfile<T> {
    /// Gap index of x; a support point belongs to the gap on its left, which
    /// yields left derivatives.
    fn gap(&self, x: f64) -> usize {
        self.points.partition_point(|&p| p < x)
    }

    /// (f(x), f'(x-))
    pub fn eval(&self, x: f64) -> (T, T) {
        let (a, b) = self.coeffs[self.gap(x)];
        let (ep, em) = ((0.5 * x).exp(), (-0.5 * x).exp());
        (a * ep + b * em, (a * ep - b * em) * 0.5)
    }

    pub fn coefficients(&self) -> &[(T, T)] {
        &self.coeffs
    }

    /// Values at the support points.
    pub fn support_values(&self) -> Vec<T> {
        self.points.iter().map(|&x| self.eval(x).0).collect()
    }
}

fn split<T: ShootScalar>(f: T, fp: T, x: f64) -> (T, T) {
    let (ep, em) = ((0.5 * x).exp(), (-0.5 * x).exp());
    ((f + fp * 2.0) * (0.5 * em), (f - fp * 2.0) * (0.5 * ep))
}

/// phi_+(z, .) seeded with e^{-x/2} to the right of the support.
pub fn shoot_plus_profile<T: ShootScalar>(m: &PeakonMeasure, z: T) -> ShootingProfile<T> {
    let n = m.len();
    let mut coeffs = vec![(T::from(0.0), T::from(0.0)); n + 1];
    coeffs[n] = (T::from(0.0), T::from(1.0));
    for i in (0..n).rev() {
        let x = m.points()[i];
        let (a, b) = coeffs[i + 1];
        let (ep, em) = ((0.5 * x).exp(), (-0.5 * x).exp());
        let f = a * ep + b * em;
        let fp_right = (a * ep - b * em) * 0.5;
        let jump = z * m.omega()[i] + z * z * m.vee()[i];
        coeffs[i] = split(f, fp_right + jump * f, x);
    }
    ShootingProfile { points: m.points().to_vec(), coeffs }
}

/// phi_-(z, .) seeded with e^{x/2} to the left of the support.
pub fn shoot_minus_profile<T: ShootScalar>(m: &PeakonMeasure, z: T) -> ShootingProfile<T> {
    let n = m.len();
    let mut coeffs = vec![(T::from(0.0), T::from(0.0)); n + 1];
    coeffs[0] = (T::from(1.0), T::from(0.0));
    for i in 0..n {
        let x = m.points()[i];
        let (a, b) = coeffs[i];
        let (ep, em) = ((0.5 * x).exp(), (-0.5 * x).exp());
        let f = a * ep + b * em;
        let fp_left = (a * ep - b * em) * 0.5;
        let jump = z * m.omega()[i] + z * z * m.vee()[i];
        coeffs[i + 1] = split(f, fp_left - jump * f, x);
    }
    ShootingProfile { points: m.points().to_vec(), coeffs }
}

/// phi_+(lambda, .) at an eigenvalue, assembled from both shots.
///
/// Shooting in one direction amplifies the error in lambda exponentially
/// along the way, so the left part is taken from phi_-/c and the right part
/// from phi_+, spliced at the support point where both are well scaled.
/// Returns the profile and c = phi_-/phi_+.
pub fn eigen_profile(m: &PeakonMeasure, lambda: f64) -> (ShootingProfile<f64>, f64) {
    let plus = shoot_plus_profile(m, lambda);
    let minus = shoot_minus_profile(m, lambda);
    let (pv, mv) = (plus.support_values(), minus.support_values());
    let pmax = pv.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mmax = mv.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let k = (0..pv.len())
        .max_by(|&i, &j| {
            let si = (pv[i].abs() / pmax).min(mv[i].abs() / mmax);
            let sj = (pv[j].abs() / pmax).min(mv[j].abs() / mmax);
            si.total_cmp(&sj)
        })
        .expect("nonempty support");
    let c = mv[k] / pv[k];
    let mut coeffs = plus.coeffs.clone();
    for g in 0..=k {
        let (a, b) = minus.coeffs[g];
        coeffs[g] = (a / c, b / c);
    }
    (ShootingProfile { points: plus.points, coeffs }, c)
}

/// (phi_+(z, x), phi_+'(z, x-))
pub fn shoot_plus(m: &PeakonMeasure, z: f64, x: f64) -> (f64, f64) {
    shoot_plus_profile(m, z).eval(x)
}

/// (phi_-(z, x), phi_-'(z, x-))
pub fn shoot_minus(m: &PeakonMeasure, z: f64, x: f64) -> (f64, f64) {
    shoot_minus_profile(m, z).eval(x)
}

/// Wronskian W(z), read from the e^{-x/2} coefficient of phi_+ left of x_1.
pub fn wronskian(m: &PeakonMeasure, z: f64) -> f64 {
    shoot_plus_profile(m, z).coeffs[0].1
}

/// Same quantity from the e^{x/2} coefficient of phi_- right of x_n.
pub fn wronskian_from_minus(m: &PeakonMeasure, z: f64) -> f64 {
    shoot_minus_profile(m, z).coeffs[m.len()].0
}

/// W'(lambda_k) for W(z) = prod (1 - z/lambda_i).
pub fn wronskian_derivative_at(eigenvalues: &[f64], k: usize) -> f64 {
    let lk = eigenvalues[k];
    -eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &li)| 1.0 - lk / li)
        .product::<f64>()
        / lk
}

/// Norming data of one eigenvalue: gamma^2 = sum phi_+(x_j)^2 (w_j + 2 lambda v_j).
fn gamma_squared(m: &PeakonMeasure, profile: &ShootingProfile<f64>, lambda: f64) -> f64 {
    profile
        .support_values()
        .iter()
        .zip(m.omega().iter().zip(m.vee()))
        .map(|(f, (w, v))| f * f * (w + 2.0 * lambda * v))
        .sum()
}

pub fn spectral_data(m: &PeakonMeasure, tol: &Tolerances) -> Result<SpectralData> {
    let eigenvalues = eigenvalues(m, tol)?;
    let mut norming = Vec::with_capacity(eigenvalues.len());
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let (profile, c) = eigen_profile(m, lambda);
        let g2 = gamma_squared(m, &profile, lambda);
        let kappa = lambda * g2;
        if !(kappa > 0.0) {
            return Err(Error::ConsistencyFail {
                lambda,
                detail: format!("norming constant {kappa} is not positive"),
            });
        }
        let wdot = wronskian_derivative_at(&eigenvalues, k);
        let other = -wdot / c;
        if (other - g2).abs() > tol.cons * g2.abs() {
            return Err(Error::ConsistencyFail {
                lambda,
                detail: format!("gamma^2 = {g2} from the eigenfunction, {other} from W'"),
            });
        }
        norming.push(kappa);
    }
    Ok(SpectralData { eigenvalues, norming })
}

/// phi_i(a) = phi_+(lambda_i, a) / sqrt(kappa_i).
pub fn interior_data(m: &PeakonMeasure, a: f64, tol: &Tolerances) -> Result<InteriorData> {
    let sd = spectral_data(m, tol)?;
    let phi = sd
        .eigenvalues
        .iter()
        .zip(&sd.norming)
        .map(|(&l, &k)| eigen_profile(m, l).0.eval(a).0 / k.sqrt())
        .collect();
    Ok(InteriorData { a, eigenvalues: sd.eigenvalues, phi })
}

/// Normalized eigenfunctions phi_i(x) on a grid (rows follow the eigenvalues).
pub fn normalized_eigenfunctions(m: &PeakonMeasure, sd: &SpectralData, xs: &[f64]) -> Vec<Vec<f64>> {
    sd.eigenvalues
        .iter()
        .zip(&sd.norming)
        .map(|(&l, &k)| {
            let p = eigen_profile(m, l).0;
            let s = k.sqrt();
            xs.iter().map(|&x| p.eval(x).0 / s).collect()
        })
        .collect()
}

/// Continued fraction of M_+ or M_- at a, read off the measure.
pub fn weyl_cf(m: &PeakonMeasure, a: f64, side: Side) -> StieltjesCF {
    let x = m.points();
    let idx: Vec<usize> = match side {
        Side::Plus => (0..x.len()).filter(|&i| x[i] >= a).collect(),
        Side::Minus => (0..x.len()).rev().filter(|&i| x[i] < a).collect(),
    };
    // half distance measured away from a
    let u: Vec<f64> = idx.iter().map(|&i| 0.5 * (x[i] - a).abs()).collect();
    let head_length = u.first().map_or(2.0, |&u0| 2.0 * u0.tanh());
    // differences of tanh without cancellation near 1
    let stages = idx
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let c = u[k].cosh();
            let gap = match u.get(k + 1) {
                Some(&un) => (un - u[k]).sinh() / (c * un.cosh()),
                None => (-u[k]).exp() / c,
            };
            Stage { c0: m.omega()[i] * c * c, c1: m.vee()[i] * c * c, length: 2.0 * gap }
        })
        .collect();
    StieltjesCF { head_length, stages }
}

/// M_+ = phi_+'(a-)/(z phi_+(a)) or M_- = -phi_-'(a-)/(z phi_-(a)) in
/// partial-fraction form.
pub fn weyl(m: &PeakonMeasure, a: f64, side: Side) -> Result<HerglotzRational> {
    cf_to_herglotz(&weyl_cf(m, a, side))
}

/// Weyl function value by complex shooting.
pub fn weyl_value(m: &PeakonMeasure, a: f64, side: Side, z: Complex64) -> Complex64 {
    match side {
        Side::Plus => {
            let (f, fp) = shoot_plus_profile(m, z).eval(a);
            fp / (z * f)
        }
        Side::Minus => {
            let (f, fp) = shoot_minus_profile(m, z).eval(a);
            -fp / (z * f)
        }
    }
}

/// Zeros of phi_+(lambda, .) on the real line.
///
/// A zero on [x_j, x_{j+1}] is detected by a sign change of the endpoint
/// values; a zero sitting exactly on a support point is attributed to the gap
/// on its left. No zeros exist outside [x_1, x_n].
pub fn zero_count_at(m: &PeakonMeasure, lambda: f64) -> usize {
    let vals = eigen_profile(m, lambda).0.support_values();
    let scale = vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let is_zero = |v: f64| v.abs() <= 1e-13 * scale;
    vals.windows(2)
        .filter(|w| is_zero(w[1]) || (!is_zero(w[0]) && w[0] * w[1] < 0.0))
        .count()
}

/// Zeros of the eigenfunction of the `index`-th eigenvalue (ascending order).
pub fn eigenfunction_zero_count(m: &PeakonMeasure, index: usize, tol: &Tolerances) -> Result<usize> {
    let eigs = eigenvalues(m, tol)?;
    let lambda = *eigs
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("eigenvalue index {index} out of range")))?;
    Ok(zero_count_at(m, lambda))
}

/// Rank of eigenvalue `index` within its sign ladder, counted outward from 0
/// (the rank-1 eigenvalues are the ones adjacent to 0).
pub fn ladder_rank(eigenvalues: &[f64], index: usize) -> usize {
    let l = eigenvalues[index];
    if l > 0.0 {
        eigenvalues[..index].iter().filter(|&&e| e > 0.0).count() + 1
    } else {
        eigenvalues[index + 1..].iter().filter(|&&e| e < 0.0).count() + 1
    }
}
