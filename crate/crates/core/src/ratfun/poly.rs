//! Dense real polynomials with ascending coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real polynomial sum c_k z^k. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

const BISECTION_BUDGET: usize = 4000;

impl RealPolynomial {
    /// Builds a polynomial, dropping exactly-zero leading coefficients.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = RealPolynomial { coeffs };
        p.trim_exact();
        p
    }

    pub fn zero() -> Self {
        RealPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// c0 + c1 z
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    /// The monomial z.
    pub fn z() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    /// prod (z - r_i)
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(1.0), |acc, &r| acc * Self::linear(-r, 1.0))
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    /// Drops leading coefficients below `rel` times the largest magnitude.
    pub fn trimmed(&self, rel: f64) -> Self {
        let scale = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while let Some(&c) = coeffs.last() {
            if c.abs() <= rel * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        RealPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// sum |c_k| |z|^k, the natural scale of rounding error in `eval(z)`.
    pub fn abs_eval(&self, z: f64) -> f64 {
        let z = z.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let mut rem = self.coeffs.clone();
        let Some(ds) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if ds < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = d.leading();
        let mut q = vec![0.0; ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let c = rem[k + dd] / lead;
            q[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= c * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        Ok((Self::new(q), Self::new(rem)))
    }

    /// Cauchy's bound: every root satisfies |z| <= 1 + max |c_k / c_n|.
    pub fn cauchy_bound(&self) -> f64 {
        let Some(n) = self.degree() else { return 0.0 };
        let lead = self.leading().abs();
        1.0 + self.coeffs[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs() / lead))
    }

    /// Real roots in ascending order.
    ///
    /// Brackets are formed from the real critical points (roots of the
    /// derivative, found recursively) and the Cauchy bound, so every real
    /// root of odd multiplicity is isolated; each bracket is bisected and then
    /// Newton-polished. With `all_real_simple` the caller asserts that all
    /// roots are real and simple and the count is checked against the degree.
    pub fn real_roots(&self, all_real_simple: bool, tol_root: f64) -> Result<Vec<f64>> {
        let deg = match self.degree() {
            None => {
                return Err(Error::InvalidArgument("roots of the zero polynomial".into()))
            }
            Some(d) => d,
        };
        let roots = match deg {
            0 => Vec::new(),
            1 => vec![-self.coeffs[0] / self.coeffs[1]],
            _ => {
                let crit = self.derivative().real_roots(false, tol_root)?;
                let bound = self.cauchy_bound();
                let mut marks = Vec::with_capacity(crit.len() + 2);
                marks.push(-bound);
                marks.extend(crit.into_iter().filter(|c| c.abs() < bound));
                marks.push(bound);
                let mut roots: Vec<f64> = Vec::new();
                for w in marks.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let (flo, fhi) = (self.eval(lo), self.eval(hi));
                    if flo == 0.0 {
                        if roots.last().map_or(true, |&r| r < lo) {
                            roots.push(lo);
                        }
                        continue;
                    }
                    if flo * fhi < 0.0 {
                        let r = self.bisect(lo, hi)?;
                        roots.push(self.newton_polish(r, lo, hi));
                    }
                }
                if self.eval(bound) == 0.0 && roots.last().map_or(true, |&r| r < bound) {
                    roots.push(bound);
                }
                roots
            }
        };
        if all_real_simple && roots.len() != deg {
            return Err(Error::ComplexRootDetected { degree: deg, found: roots.len() });
        }
        for &r in &roots {
            let residual = self.eval(r).abs();
            let scale = self.abs_eval(r).max(f64::MIN_POSITIVE);
            if residual > tol_root.max(64.0 * f64::EPSILON) * scale * (deg as f64 + 1.0) {
                return Err(Error::NonConverged(format!(
                    "root {r} has residual {residual:e} (scale {scale:e})"
                )));
            }
        }
        Ok(roots)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let slo = self.eval(lo).signum();
        for _ in 0..BISECTION_BUDGET {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm.signum() == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NonConverged(format!("bisection budget exhausted on [{lo}, {hi}]")))
    }

    fn newton_polish(&self, r: f64, lo: f64, hi: f64) -> f64 {
        let dp = self.derivative();
        let mut best = r;
        let mut best_res = self.eval(r).abs();
        let mut x = r;
        for _ in 0..3 {
            let d = dp.eval(x);
            if d == 0.0 {
                break;
            }
            x -= self.eval(x) / d;
            if !(x > lo && x < hi) {
                break;
            }
            let res = self.eval(x).abs();
            if res < best_res {
                best = x;
                best_res = res;
            }
        }
        best
    }
}

impl Add for RealPolynomial {
    type Output = RealPolynomial;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for RealPolynomial {
    type Output = RealPolynomial;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for RealPolynomial {
    type Output = RealPolynomial;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for RealPolynomial {
    type Output = RealPolynomial;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return RealPolynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial::new(out)
    }
}

impl Mul<f64> for RealPolynomial {
    type Output = RealPolynomial;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}
