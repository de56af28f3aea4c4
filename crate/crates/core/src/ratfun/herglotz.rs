//! Rational Herglotz-Nevanlinna functions in partial-fraction normal form
//!
//!   h(z) = gamma z + zeta + sum_i beta_i / (mu_i - z),  gamma >= 0, beta_i > 0.
//!
//! On the real line h is strictly increasing between consecutive poles, so
//! zeros and poles interlace and every zero can be bracketed exactly. All
//! root finding here exploits that structure instead of working with
//! polynomial coefficients.
//!
//! Coefficients are held in double-double precision. Repeated inversion
//! produces poles that cluster within a few ulps of each other when a
//! residue is tiny; their separations carry the information and would be
//! lost in plain f64.

use num_complex::Complex64;
use twofloat::TwoFloat;

use super::poly::RealPolynomial;
use crate::error::{Error, Result};

pub(crate) type Dd = TwoFloat;

const BISECTION_BUDGET: usize = 4000;
const EXPANSION_BUDGET: usize = 2100;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

fn finite(x: Dd) -> bool {
    x.hi().is_finite() && x.lo().is_finite()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzRational {
    gamma: Dd,
    zeta: Dd,
    poles: Vec<Dd>,
    residues: Vec<Dd>,
}

impl HerglotzRational {
    /// Validating constructor; `terms` are (pole, residue) pairs in any order.
    pub fn new(gamma: f64, zeta: f64, terms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new_dd(dd(gamma), dd(zeta), terms.into_iter().map(|(m, b)| (dd(m), dd(b))).collect())
    }

    pub(crate) fn new_dd(gamma: Dd, zeta: Dd, terms: Vec<(Dd, Dd)>) -> Result<Self> {
        if !(finite(gamma) && finite(zeta)) {
            return Err(Error::NonFinite(format!("gamma={}, zeta={}", gamma.hi(), zeta.hi())));
        }
        if gamma < 0.0 {
            return Err(Error::NotHerglotz(format!("negative slope {}", gamma.hi())));
        }
        let mut terms = terms;
        for &(mu, beta) in &terms {
            if !(finite(mu) && finite(beta)) {
                return Err(Error::NonFinite(format!("pole {}, residue {}", mu.hi(), beta.hi())));
            }
            if beta <= 0.0 {
                return Err(Error::NotHerglotz(format!("residue {} at pole {}", beta.hi(), mu.hi())));
            }
        }
        terms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite poles"));
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::NotHerglotz(format!("repeated pole {}", w[0].0.hi())));
        }
        let (poles, residues) = terms.into_iter().unzip();
        Ok(HerglotzRational { gamma, zeta, poles, residues })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.hi()
    }

    pub fn zeta(&self) -> f64 {
        self.zeta.hi()
    }

    pub(crate) fn gamma_dd(&self) -> Dd {
        self.gamma
    }

    pub(crate) fn zeta_dd(&self) -> Dd {
        self.zeta
    }

    pub fn poles(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p.hi()).collect()
    }

    pub fn residues(&self) -> Vec<f64> {
        self.residues.iter().map(|b| b.hi()).collect()
    }

    pub fn num_poles(&self) -> usize {
        self.poles.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.terms_dd().map(|(m, b)| (m.hi(), b.hi()))
    }

    pub(crate) fn terms_dd(&self) -> impl Iterator<Item = (Dd, Dd)> + '_ {
        self.poles.iter().copied().zip(self.residues.iter().copied())
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        self.with_gamma_dd(dd(gamma))
    }

    pub fn with_zeta(&self, zeta: f64) -> Self {
        self.with_zeta_dd(dd(zeta))
    }

    pub(crate) fn with_gamma_dd(&self, gamma: Dd) -> Self {
        HerglotzRational { gamma, ..self.clone() }
    }

    pub(crate) fn with_zeta_dd(&self, zeta: Dd) -> Self {
        HerglotzRational { zeta, ..self.clone() }
    }

    /// Drops gamma and zeta, keeping sum beta_i / (mu_i - z).
    pub fn pole_part(&self) -> Self {
        HerglotzRational { gamma: dd(0.0), zeta: dd(0.0), ..self.clone() }
    }

    /// Exact zero function (no poles, gamma = zeta = 0).
    pub fn is_zero(&self) -> bool {
        self.poles.is_empty() && self.gamma == 0.0 && self.zeta == 0.0
    }

    /// Residue coefficient beta at the pole closest to `mu` within `tol`.
    pub fn residue_near(&self, mu: f64, tol: f64) -> Option<f64> {
        self.terms()
            .filter(|(p, _)| (p - mu).abs() <= tol)
            .min_by(|a, b| (a.0 - mu).abs().total_cmp(&(b.0 - mu).abs()))
            .map(|(_, b)| b)
    }

    /// Removes the pole at `mu` (exact match), returning its residue.
    pub fn without_pole(&self, mu: f64) -> (Self, Option<f64>) {
        let (out, b) = self.without_pole_dd(mu);
        (out, b.map(|b| b.hi()))
    }

    pub(crate) fn without_pole_dd(&self, mu: f64) -> (Self, Option<Dd>) {
        let mut out = self.clone();
        match self.poles.iter().position(|&p| p == mu) {
            Some(i) => {
                out.poles.remove(i);
                let b = out.residues.remove(i);
                (out, Some(b))
            }
            None => (out, None),
        }
    }

    /// Adds `beta / (mu - z)`, merging with an existing pole at exactly `mu`.
    pub fn add_term(&self, mu: f64, beta: f64) -> Result<Self> {
        self.add_term_dd(dd(mu), dd(beta))
    }

    pub(crate) fn add_term_dd(&self, mu: Dd, beta: Dd) -> Result<Self> {
        let mut terms: Vec<(Dd, Dd)> = self.terms_dd().collect();
        match terms.iter_mut().find(|t| t.0 == mu) {
            Some(t) => t.1 += beta,
            None => terms.push((mu, beta)),
        }
        Self::new_dd(self.gamma, self.zeta, terms)
    }

    /// Sum of two Herglotz functions; poles closer than `merge_tol` (relative)
    /// are merged.
    pub fn sum(&self, other: &Self, merge_tol: f64) -> Result<Self> {
        let mut terms: Vec<(Dd, Dd)> = self.terms_dd().collect();
        for (mu, beta) in other.terms_dd() {
            let scale = mu.hi().abs().max(1.0);
            match terms.iter_mut().find(|t| (t.0 - mu).abs() <= merge_tol * scale) {
                Some(t) => t.1 += beta,
                None => terms.push((mu, beta)),
            }
        }
        Self::new_dd(self.gamma + other.gamma, self.zeta + other.zeta, terms)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_dd(dd(x)).hi()
    }

    pub(crate) fn eval_dd(&self, x: Dd) -> Dd {
        self.terms_dd()
            .fold(self.gamma * x + self.zeta, |acc, (mu, beta)| acc + beta / (mu - x))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(self.zeta.hi(), 0.0) + z * self.gamma.hi();
        for (mu, beta) in self.terms_dd() {
            // the real part of mu - z is formed before rounding
            let d = Complex64::new((mu - z.re).hi(), -z.im);
            acc += beta.hi() / d;
        }
        acc
    }

    /// h'(x) = gamma + sum beta_i / (mu_i - x)^2, positive off the poles.
    pub fn derivative(&self, x: f64) -> f64 {
        self.derivative_dd(dd(x)).hi()
    }

    fn derivative_dd(&self, x: Dd) -> Dd {
        self.terms_dd().fold(self.gamma, |acc, (mu, beta)| {
            let d = mu - x;
            acc + beta / (d * d)
        })
    }

    /// Sum of |terms| at x: the rounding scale of `eval(x)`.
    pub fn abs_eval(&self, x: f64) -> f64 {
        self.abs_eval_dd(dd(x))
    }

    fn abs_eval_dd(&self, x: Dd) -> f64 {
        (self.gamma * x).hi().abs()
            + self.zeta.hi().abs()
            + self
                .terms_dd()
                .map(|(mu, beta)| (beta / (mu - x)).hi().abs())
                .sum::<f64>()
    }

    /// Characteristic radius of the pole set (at least 1).
    pub fn radius(&self) -> f64 {
        self.poles.iter().fold(1.0f64, |r, p| r.max(p.hi().abs()))
    }

    /// Magnitude of the pole part away from the real axis.
    pub fn pole_scale(&self) -> f64 {
        let r = self.radius();
        self.terms().map(|(mu, beta)| beta / mu.hypot(r)).sum()
    }

    /// Zeroes gamma and zeta when they are negligible relative to the pole part.
    pub fn snapped(&self, rel: f64) -> Self {
        if self.poles.is_empty() {
            return self.clone();
        }
        let s = self.pole_scale();
        let mut out = self.clone();
        if out.zeta.hi().abs() <= rel * s {
            out.zeta = dd(0.0);
        }
        if out.gamma.hi() * self.radius() <= rel * (s + out.zeta.hi().abs()) {
            out.gamma = dd(0.0);
        }
        out
    }

    /// Real zeros in ascending order.
    pub fn zeros(&self) -> Result<Vec<f64>> {
        Ok(self.zeros_dd(None)?.into_iter().map(|z| z.hi()).collect())
    }

    /// Real zeros, using `pin` verbatim for the bracket that contains it.
    ///
    /// The caller asserts that `pin` is an exact zero known by construction
    /// (e.g. z = 0 for the functions arising from Weyl functions).
    pub fn zeros_pinned(&self, pin: Option<f64>) -> Result<Vec<f64>> {
        Ok(self.zeros_dd(pin)?.into_iter().map(|z| z.hi()).collect())
    }

    fn zeros_dd(&self, pin: Option<f64>) -> Result<Vec<Dd>> {
        if self.poles.is_empty() {
            if self.gamma > 0.0 {
                return Ok(vec![pin.map_or(-self.zeta / self.gamma, dd)]);
            }
            return Err(Error::NotHerglotz("constant function has no isolated zeros".into()));
        }
        let pin = pin.map(dd);
        if let Some(p) = pin {
            if self.poles.contains(&p) {
                return Err(Error::InvalidArgument(format!("pinned zero {} is a pole", p.hi())));
            }
            let res = self.eval_dd(p).hi().abs();
            if res > 1e-6 * self.abs_eval_dd(p) {
                return Err(Error::InvalidArgument(format!(
                    "pinned point {} is not a zero (residual {res:e})",
                    p.hi()
                )));
            }
        }
        let in_bracket = |lo: Option<Dd>, hi: Option<Dd>| {
            pin.filter(|&p| lo.map_or(true, |l| p > l) && hi.map_or(true, |h| p < h))
        };
        let mut zeros = Vec::with_capacity(self.poles.len() + 1);
        let first = self.poles[0];
        let last = *self.poles.last().expect("nonempty");
        if self.gamma > 0.0 || self.zeta < 0.0 {
            let z = match in_bracket(None, Some(first)) {
                Some(p) => p,
                None => {
                    let lo = self.expand_until(first, -1.0)?;
                    self.bisect(lo, first)?
                }
            };
            zeros.push(z);
        }
        for w in self.poles.windows(2) {
            let z = match in_bracket(Some(w[0]), Some(w[1])) {
                Some(p) => p,
                None => self.bisect(w[0], w[1])?,
            };
            zeros.push(z);
        }
        if self.gamma > 0.0 || self.zeta > 0.0 {
            let z = match in_bracket(Some(last), None) {
                Some(p) => p,
                None => {
                    let hi = self.expand_until(last, 1.0)?;
                    self.bisect(last, hi)?
                }
            };
            zeros.push(z);
        }
        if let Some(p) = pin {
            if !zeros.contains(&p) {
                return Err(Error::DegreeMismatch(format!(
                    "pinned zero {} lies in a region without a zero",
                    p.hi()
                )));
            }
        }
        Ok(zeros)
    }

    /// Walks outward from `pole` in direction `dir` until h changes sign
    /// relative to its behaviour next to the pole.
    fn expand_until(&self, pole: Dd, dir: f64) -> Result<Dd> {
        let mut width = pole.hi().abs().max(1.0);
        for _ in 0..EXPANSION_BUDGET {
            let x = pole + dir * width;
            let f = self.eval_dd(x);
            if (dir < 0.0 && f < 0.0) || (dir > 0.0 && f > 0.0) || f == 0.0 {
                return Ok(x);
            }
            width *= 2.0;
            if !width.is_finite() {
                break;
            }
        }
        Err(Error::NonConverged(format!("no outer sign change beyond pole {}", pole.hi())))
    }

    /// Bisection for the unique zero of the increasing function on (lo, hi);
    /// endpoints may be poles and are never evaluated.
    fn bisect(&self, mut lo: Dd, mut hi: Dd) -> Result<Dd> {
        for _ in 0..BISECTION_BUDGET {
            let mid = (lo + hi) * 0.5;
            if mid <= lo || mid >= hi {
                return Ok(self.pick_closer(lo, hi));
            }
            let f = self.eval_dd(mid);
            if f == 0.0 {
                return Ok(mid);
            }
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NonConverged(format!(
            "bisection budget exhausted on [{}, {}]",
            lo.hi(),
            hi.hi()
        )))
    }

    fn pick_closer(&self, lo: Dd, hi: Dd) -> Dd {
        let at = |x: Dd| {
            if self.poles.contains(&x) {
                f64::INFINITY
            } else {
                self.eval_dd(x).abs().hi()
            }
        };
        if at(lo) <= at(hi) {
            lo
        } else {
            hi
        }
    }

    /// Partial-fraction form of -1/h.
    pub fn neg_reciprocal(&self) -> Result<Self> {
        self.neg_reciprocal_pinned(None)
    }

    /// -1/h with one zero of h known exactly.
    ///
    /// Poles of the result are the zeros nu of h with residues 1/h'(nu); the
    /// linear and constant terms follow from the behaviour of h at infinity.
    pub fn neg_reciprocal_pinned(&self, pin: Option<f64>) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotHerglotz("reciprocal of the zero function".into()));
        }
        let zeros = self.zeros_dd(pin)?;
        let mut terms = Vec::with_capacity(zeros.len());
        for nu in zeros {
            let d = self.derivative_dd(nu);
            if !(d > 0.0 && finite(d)) {
                return Err(Error::NotHerglotz(format!("h'({}) = {}", nu.hi(), d.hi())));
            }
            terms.push((nu, d.recip()));
        }
        let zero = dd(0.0);
        let (gamma, zeta) = if self.gamma > 0.0 {
            (zero, zero)
        } else if self.zeta != 0.0 {
            (zero, -self.zeta.recip())
        } else {
            let (b, c) = self
                .terms_dd()
                .fold((zero, zero), |(b, c), (mu, beta)| (b + beta, c + beta * mu));
            (b.recip(), -c / (b * b))
        };
        Self::new_dd(gamma, zeta, terms)
    }

    /// Numerator/denominator pair with den monic in the poles.
    pub fn to_polynomials(&self) -> (RealPolynomial, RealPolynomial) {
        let poles = self.poles();
        let den = poles.iter().fold(RealPolynomial::constant(1.0), |acc, &mu| {
            acc * RealPolynomial::linear(mu, -1.0)
        });
        let mut num = den.clone() * RealPolynomial::linear(self.zeta(), self.gamma());
        for (i, beta) in self.residues().into_iter().enumerate() {
            let others = poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(RealPolynomial::constant(1.0), |acc, (_, &mu)| {
                    acc * RealPolynomial::linear(mu, -1.0)
                });
            num = num + others.scale(beta);
        }
        (num, den)
    }
}

/// Partial-fraction normal form of num/den.
///
/// The denominator must have simple real roots and the quotient must be
/// Herglotz: polynomial part of degree at most one with nonnegative slope and
/// strictly positive residues.
pub fn pf_decompose(
    num: &RealPolynomial,
    den: &RealPolynomial,
    tol_root: f64,
) -> Result<HerglotzRational> {
    if den.is_zero() {
        return Err(Error::InvalidArgument("zero denominator".into()));
    }
    if num.is_zero() {
        return Err(Error::NotHerglotz("zero numerator".into()));
    }
    let roots = den.real_roots(true, tol_root)?;
    let dden = den.derivative();
    let mut terms = Vec::with_capacity(roots.len());
    for mu in roots {
        let n = num.eval(mu);
        if n.abs() <= tol_root.max(1e-13) * num.abs_eval(mu) {
            return Err(Error::CommonRoots(mu));
        }
        let beta = -n / dden.eval(mu);
        if beta <= 0.0 {
            return Err(Error::NotHerglotz(format!("residue {beta} at pole {mu}")));
        }
        terms.push((mu, beta));
    }
    let (q, _) = num.div_rem(den)?;
    if q.degree().unwrap_or(0) > 1 {
        return Err(Error::NotHerglotz(format!(
            "polynomial part has degree {}",
            q.degree().unwrap_or(0)
        )));
    }
    let mut gamma = q.coeff(1);
    if gamma < 0.0 {
        if gamma.abs() <= tol_root * q.max_abs_coeff().max(1.0) {
            gamma = 0.0;
        } else {
            return Err(Error::NotHerglotz(format!("negative slope {gamma}")));
        }
    }
    HerglotzRational::new(gamma, q.coeff(0), terms)
}
