//! Real polynomials, rational Herglotz-Nevanlinna functions and Stieltjes
//! continued fractions.

mod cf;
mod herglotz;
mod poly;

pub use cf::{cf_evaluate, cf_expand, cf_to_herglotz, Stage, StieltjesCF};
pub use herglotz::{pf_decompose, HerglotzRational};
pub(crate) use herglotz::Dd;
pub use poly::RealPolynomial;

/// Roots of `p` in ascending order; see [`RealPolynomial::real_roots`].
pub fn poly_real_roots(
    p: &RealPolynomial,
    all_real_simple: bool,
    tol_root: f64,
) -> crate::Result<Vec<f64>> {
    p.real_roots(all_real_simple, tol_root)
}

/// Partial-fraction form of -1/h.
pub fn neg_reciprocal(h: &HerglotzRational) -> crate::Result<HerglotzRational> {
    h.neg_reciprocal()
}
