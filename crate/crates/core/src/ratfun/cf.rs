//! Finite Stieltjes-type continued fractions
//!
//!   M(z) = 1/(-l_0 z + 1/(m_1(z) + 1/(-l_1 z + ... + 1/(m_k(z) - 1/(l_k z)))))
//!
//! with m_i(z) = c0 + c1 z, c1 >= 0, and lengths l_i > 0 (l_0 may vanish on
//! the plus side when the reference point is itself a support point).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::herglotz::{Dd, HerglotzRational};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;
use crate::Side;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    /// Constant coefficient of m_i.
    pub c0: f64,
    /// Linear coefficient of m_i.
    pub c1: f64,
    /// Length l_i following m_i.
    pub length: f64,
}

impl Stage {
    pub fn m(&self, z: Complex64) -> Complex64 {
        z * self.c1 + self.c0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StieltjesCF {
    pub head_length: f64,
    pub stages: Vec<Stage>,
}

impl StieltjesCF {
    pub fn total_length(&self) -> f64 {
        self.head_length + self.stages.iter().map(|s| s.length).sum::<f64>()
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        Ok(cf_evaluate(self, Complex64::new(z, 0.0))?.re)
    }
}

const CANCELLATION: f64 = 1e-13;

/// Partial-fraction form of a continued fraction, assembled from the bottom
/// stage upward with Herglotz arithmetic.
pub fn cf_to_herglotz(cf: &StieltjesCF) -> Result<HerglotzRational> {
    let last = cf.stages.last().map_or(cf.head_length, |s| s.length);
    if last <= 0.0 {
        return Err(Error::NonPositiveLength(last));
    }
    let mut f = HerglotzRational::new(0.0, 0.0, vec![(0.0, 1.0 / last)])?;
    for i in (0..cf.stages.len()).rev() {
        let s = cf.stages[i];
        let u = HerglotzRational::new_dd(f.gamma_dd() + s.c1, f.zeta_dd() + s.c0, f.terms_dd().collect())?;
        let rem = u.neg_reciprocal()?;
        let l = if i == 0 { cf.head_length } else { cf.stages[i - 1].length };
        // u has a pole at the origin, so rem + l z vanishes there
        let g = vanishing_at_origin(&rem.with_gamma_dd(rem.gamma_dd() + l), CANCELLATION);
        f = g.neg_reciprocal_pinned(Some(0.0))?;
    }
    Ok(f)
}

fn recip(w: Complex64, z: Complex64) -> Result<Complex64> {
    if w.norm() == 0.0 || !w.is_finite() {
        return Err(Error::PoleHit(z.re));
    }
    Ok(w.inv())
}

/// Bottom-up evaluation of the nested fraction.
pub fn cf_evaluate(cf: &StieltjesCF, z: Complex64) -> Result<Complex64> {
    let mut acc = match cf.stages.last() {
        Some(last) => -z * last.length,
        None => -z * cf.head_length,
    };
    for i in (0..cf.stages.len()).rev() {
        acc = cf.stages[i].m(z) + recip(acc, z)?;
        let l = if i == 0 { cf.head_length } else { cf.stages[i - 1].length };
        acc = -z * l + recip(acc, z)?;
    }
    recip(acc, z)
}

/// Expands a one-sided Weyl function into its continued fraction.
///
/// Each round inverts, reads off the linear coefficient as the next length,
/// inverts the remainder and reads off the affine part as the next m-stage.
/// The zero at the origin created by every inversion is known exactly and is
/// pinned rather than searched for.
pub fn cf_expand(h: &HerglotzRational, side: Side, tol: &Tolerances) -> Result<StieltjesCF> {
    let b0 = h.residue_near(0.0, 0.0).unwrap_or(0.0);
    if (b0 - 0.5).abs() > tol.cf {
        return Err(Error::BadResidueAtZero(-b0));
    }
    let mut f = h.snapped(tol.coef);
    if side == Side::Minus && (f.gamma() != 0.0 || f.zeta() != 0.0) {
        return Err(Error::DegreeMismatch(format!(
            "minus-side function does not vanish at infinity (gamma={}, zeta={})",
            f.gamma(),
            f.zeta()
        )));
    }

    let mut head = None;
    let mut stages = Vec::new();
    let budget = h.num_poles() + 2;
    for _ in 0..budget {
        let g = vanishing_at_origin(&f.neg_reciprocal()?, tol.coef);
        let l = g.gamma();
        let rem = g.with_gamma(0.0);
        match head {
            None => {
                if l < 0.0 || (side == Side::Minus && l <= 0.0) {
                    return Err(Error::NonPositiveLength(l));
                }
                head = Some(l);
            }
            Some(_) => {
                if l <= 0.0 {
                    return Err(Error::NonPositiveLength(l));
                }
                stages
                    .last_mut()
                    .map(|s: &mut Stage| s.length = l)
                    .expect("stage pushed before its length");
            }
        }
        if rem.num_poles() == 0 {
            if rem.zeta() != 0.0 {
                return Err(Error::DegreeMismatch(format!(
                    "constant remainder {} after extracting a length",
                    rem.zeta()
                )));
            }
            let cf = StieltjesCF { head_length: head.unwrap_or(0.0), stages };
            verify(&cf, h, tol)?;
            return Ok(cf);
        }
        let u = rem.neg_reciprocal_pinned(Some(0.0))?;
        stages.push(Stage { c0: u.zeta(), c1: u.gamma(), length: 0.0 });
        f = u.pole_part();
    }
    Err(Error::DegreeMismatch("continued fraction did not terminate".into()))
}

/// Resets the constant term so that g(0) = 0 exactly, snapping it to zero
/// when it is within cancellation noise.
fn vanishing_at_origin(g: &HerglotzRational, rel: f64) -> HerglotzRational {
    let (mut zeta, mut scale) = (Dd::from(0.0), 0.0);
    for (mu, beta) in g.terms_dd() {
        let t = beta / mu;
        zeta -= t;
        scale += t.hi().abs();
    }
    if zeta.hi().abs() <= rel * scale {
        zeta = Dd::from(0.0);
    }
    g.with_zeta_dd(zeta)
}

fn verify(cf: &StieltjesCF, h: &HerglotzRational, tol: &Tolerances) -> Result<()> {
    let r = h.radius();
    for s in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let z = Complex64::new(0.0, s * r);
        let want = h.eval_complex(z);
        let got = cf_evaluate(cf, z)?;
        if (got - want).norm() > tol.cf * (1.0 + want.norm()) {
            return Err(Error::NonConverged(format!(
                "continued fraction mismatch at {z}: {got} vs {want}"
            )));
        }
    }
    Ok(())
}
