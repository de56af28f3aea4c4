use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds used across the toolkit.
///
/// Discrete decisions (is a weight zero, is a remainder zero, is an
/// eigenfunction value zero) all go through one of these, so a run is fully
/// described by the measure plus this struct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Minimum separation of two support points.
    pub pos: f64,
    /// Weights below this magnitude are exactly zero.
    pub zero: f64,
    /// Relative threshold for degree decisions on rational functions.
    pub coef: f64,
    /// Relative residual accepted for polynomial roots.
    pub root: f64,
    /// Partial-fraction reconstruction error.
    pub pf: f64,
    /// Continued-fraction reconstruction error.
    pub cf: f64,
    /// Relative error accepted when an inverse result is verified forward.
    pub inv: f64,
    /// Relative threshold below which an eigenfunction value counts as zero.
    pub phi: f64,
    /// Threshold for the equalities alpha = 0 and beta = 0.
    pub ab: f64,
    /// Trace formula versus kernel sum.
    pub trace: f64,
    /// Agreement of the two routes to the norming constants.
    pub cons: f64,
    /// Residual accepted for "lambda_j is a zero of G".
    pub g: f64,
    /// Gaps below this raise `NearCollision` in the forward solver.
    pub collision: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pos: 1e-10,
            zero: 1e-12,
            coef: 1e-10,
            root: 1e-12,
            pf: 1e-9,
            cf: 1e-8,
            inv: 1e-7,
            phi: 1e-8,
            ab: 1e-9,
            trace: 1e-8,
            cons: 1e-7,
            g: 1e-8,
            collision: 1e-8,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 13] = [
        "pos", "zero", "coef", "root", "pf", "cf", "inv", "phi", "ab", "trace", "cons", "g",
        "collision",
    ];

    pub fn get_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "pos" => &mut self.pos,
            "zero" => &mut self.zero,
            "coef" => &mut self.coef,
            "root" => &mut self.root,
            "pf" => &mut self.pf,
            "cf" => &mut self.cf,
            "inv" => &mut self.inv,
            "phi" => &mut self.phi,
            "ab" => &mut self.ab,
            "trace" => &mut self.trace,
            "cons" => &mut self.cons,
            "g" => &mut self.g,
            "collision" => &mut self.collision,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut copy = *self;
        for name in Self::NAMES {
            let value = *copy.get_mut(name).expect("known name");
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}
