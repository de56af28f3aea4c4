//! Interior inverse problem: recover (omega, v) from the eigenvalues and the
//! values phi_i(a) of the normalized eigenfunctions at one point a.
//!
//! With alpha = 1 - sum phi_i^2 and beta = -sum lambda_i phi_i^2,
//!
//!   -1/(M_+ + M_-) = alpha z + beta + sum lambda_i^2 phi_i^2 / (lambda_i - z),
//!
//! so the sum of the two Weyl functions is known. Its poles are split
//! between the two sides: interior poles by the sign pattern of phi, poles
//! at eigenvalues with phi_j(a) = 0 by a free parameter theta in (0, 1), and
//! the extreme poles (when present) by a binary choice per pole.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{interior_data, InteriorData};
use crate::inverse::{measure_from_weyl, HalfLineMeasure};
use crate::measures::PeakonMeasure;
use crate::ratfun::{Dd, HerglotzRational};
use crate::tolerances::Tolerances;
use crate::Side;

/// Largest spectrum accepted by the enumeration routines.
pub const ENUMERATION_CAP: usize = 24;

/// Relative distance within which a pole is identified with an eigenvalue
/// whose eigenfunction vanishes at a.
const MATCH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// alpha = beta = 0: a is a support point carrying v > 0.
    AlphaBetaZero,
    /// alpha = 0, beta != 0: a is a support point with v = 0.
    AlphaZero,
    /// alpha > 0: a lies off the support.
    AlphaNonzero,
}

/// A condition of the existence theorem that the data violate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Eigenvalues not strictly increasing, zero, or lengths differ.
    Ordering { detail: String },
    /// (i): lambda_j with alpha_j = 0 is not a zero of G.
    NotAZeroOfG { index: usize, residual: f64 },
    /// (ii): alpha_j = 0 at an interior index but alpha_{j-1} alpha_{j+1} >= 0.
    NeighboursSameSign { index: usize },
    /// (iii): sum of alpha_i^2 exceeds 1.
    NormExceeded { sum: f64 },
    /// (iii): an eigenvalue adjacent to 0 carries alpha <= 0.
    AdjacentNotPositive { index: usize },
    /// Endpoint constraints on alpha_1, alpha_N.
    Endpoints { detail: String },
}

impl Violation {
    /// Label of the violated condition: "(i)", "(ii)", "(iii)", "endpoint" or
    /// "ordering".
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::Ordering { .. } => "ordering",
            Violation::NotAZeroOfG { .. } => "(i)",
            Violation::NeighboursSameSign { .. } => "(ii)",
            Violation::NormExceeded { .. } | Violation::AdjacentNotPositive { .. } => "(iii)",
            Violation::Endpoints { .. } => "endpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub ok: bool,
    pub alpha: f64,
    pub beta: f64,
    pub regime: Regime,
    pub violations: Vec<Violation>,
    /// Indices whose value was below the zero threshold and treated as 0.
    pub snapped: Vec<usize>,
}

/// Which side(s) carry a pole of M_+ + M_-.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PoleAssignment {
    /// Common pole at 0, residue 1/2 on each side.
    pub shared_zero: f64,
    /// Eigenvalues with phi_j(a) = 0, shared according to theta.
    pub set_a: Vec<f64>,
    /// Poles of M_+ alone.
    pub set_b: Vec<f64>,
    /// Poles of M_- alone.
    pub set_c: Vec<f64>,
    /// Extreme poles whose side is a binary choice.
    pub free_poles: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionCount {
    Unique,
    Finite { count: usize },
    InfiniteFamily { dim: usize, branches: usize },
}

impl SolutionCount {
    pub fn branches(&self) -> usize {
        match *self {
            SolutionCount::Unique => 1,
            SolutionCount::Finite { count } => count,
            SolutionCount::InfiniteFamily { branches, .. } => branches,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            SolutionCount::InfiniteFamily { dim, .. } => dim,
            _ => 0,
        }
    }

    fn from_parts(dim: usize, branches: usize) -> Self {
        match (dim, branches) {
            (0, 1) => SolutionCount::Unique,
            (0, count) => SolutionCount::Finite { count },
            (dim, branches) => SolutionCount::InfiniteFamily { dim, branches },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Role {
    Zero,
    A(usize),
    B,
    C,
    Free,
}

/// All solutions of one interior inverse problem: the discrete branches and,
/// for each, a generator taking one theta per A-pole.
#[derive(Debug, Clone)]
pub struct SolutionFamily {
    a: f64,
    data: InteriorData,
    sum: HerglotzRational,
    roles: Vec<Role>,
    pub split: PoleAssignment,
    pub branches: Vec<PoleAssignment>,
    pub dim_k: usize,
}

/// Outcome of the reconstruction along one branch.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub branch: usize,
    pub assignment: PoleAssignment,
    pub result: Result<PeakonMeasure>,
}

/// (alpha, beta) summed in double-double precision.
pub fn alpha_beta(d: &InteriorData) -> (f64, f64) {
    let (a, b) = alpha_beta_dd(&d.eigenvalues, &d.phi);
    (a.hi(), b.hi())
}

fn alpha_beta_dd(lambda: &[f64], phi: &[f64]) -> (Dd, Dd) {
    let zero = Dd::from(0.0);
    let (sq, lsq) = lambda.iter().zip(phi).fold((zero, zero), |(s, l), (&lam, &p)| {
        let p2 = Dd::new_mul(p, p);
        (s + p2, l + p2 * lam)
    });
    (-sq + 1.0, -lsq)
}

fn beta_scale(lambda: &[f64], phi: &[f64]) -> f64 {
    lambda.iter().zip(phi).map(|(l, p)| (l * p * p).abs()).sum::<f64>().max(1e-300)
}

fn regime_of(alpha: f64, beta: f64, beta_scale: f64, tol: &Tolerances) -> Regime {
    if alpha.abs() > tol.ab {
        Regime::AlphaNonzero
    } else if beta.abs() > tol.ab * beta_scale {
        Regime::AlphaZero
    } else {
        Regime::AlphaBetaZero
    }
}

fn snap(phi: &[f64], tol: &Tolerances) -> (Vec<f64>, Vec<usize>) {
    let max = phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let mut out = phi.to_vec();
    let mut snapped = Vec::new();
    for (i, p) in out.iter_mut().enumerate() {
        if p.abs() < tol.phi * max {
            if *p != 0.0 {
                snapped.push(i);
            }
            *p = 0.0;
        }
    }
    (out, snapped)
}

/// Number of negative eigenvalues, i.e. j_0 with lambda_{j_0} < 0 < lambda_{j_0+1}.
fn negatives(lambda: &[f64]) -> usize {
    lambda.iter().take_while(|&&l| l < 0.0).count()
}

/// Checks a candidate {lambda_i, alpha_i} against the existence conditions.
pub fn feasibility(lambda: &[f64], alpha_i: &[f64], tol: &Tolerances) -> FeasibilityReport {
    let mut violations = Vec::new();
    let n = lambda.len();
    if alpha_i.len() != n || n == 0 {
        violations.push(Violation::Ordering {
            detail: format!("{} eigenvalues, {} values", n, alpha_i.len()),
        });
    }
    if lambda.iter().any(|&l| l == 0.0 || !l.is_finite()) || lambda.windows(2).any(|w| w[0] >= w[1]) {
        violations.push(Violation::Ordering {
            detail: "eigenvalues must be finite, nonzero and strictly increasing".into(),
        });
    }
    if !violations.is_empty() {
        return FeasibilityReport {
            ok: false,
            alpha: f64::NAN,
            beta: f64::NAN,
            regime: Regime::AlphaNonzero,
            violations,
            snapped: vec![],
        };
    }
    let (al, snapped) = snap(alpha_i, tol);
    let (alpha, beta) = alpha_beta_dd(lambda, &al);
    let regime = regime_of(alpha.hi(), beta.hi(), beta_scale(lambda, &al), tol);

    // (i)
    for j in (0..n).filter(|&j| al[j] == 0.0) {
        let x = lambda[j];
        let mut g = alpha * x + beta;
        let mut scale = (alpha * x).hi().abs() + beta.hi().abs();
        for i in (0..n).filter(|&i| i != j && al[i] != 0.0) {
            let t = Dd::new_mul(lambda[i], al[i]).powi(2) / (Dd::from(lambda[i]) - x);
            g += t;
            scale += t.hi().abs();
        }
        let residual = g.hi().abs() / scale.max(1e-300);
        if residual > tol.g {
            violations.push(Violation::NotAZeroOfG { index: j, residual });
        }
    }
    // (ii)
    for j in 1..n.saturating_sub(1) {
        if al[j] == 0.0 && al[j - 1] * al[j + 1] >= 0.0 {
            violations.push(Violation::NeighboursSameSign { index: j });
        }
    }
    // (iii)
    let sum = (-alpha + 1.0).hi();
    if sum > 1.0 + tol.ab {
        violations.push(Violation::NormExceeded { sum });
    }
    let j0 = negatives(lambda);
    let adjacent: Vec<usize> = if j0 == 0 {
        vec![0]
    } else if j0 == n {
        vec![n - 1]
    } else {
        vec![j0 - 1, j0]
    };
    for i in adjacent {
        if !(al[i] > 0.0) {
            violations.push(Violation::AdjacentNotPositive { index: i });
        }
    }
    // endpoint constraints
    let (first_zero, last_zero) = (al[0] == 0.0, al[n - 1] == 0.0);
    let one_sided = j0 == 0 || j0 == n;
    match regime {
        Regime::AlphaBetaZero if first_zero || last_zero => violations.push(Violation::Endpoints {
            detail: "alpha = beta = 0 requires phi_1(a) != 0 and phi_N(a) != 0".into(),
        }),
        Regime::AlphaZero if first_zero && last_zero => violations.push(Violation::Endpoints {
            detail: "alpha = 0 forbids phi_1(a) = phi_N(a) = 0".into(),
        }),
        Regime::AlphaZero if one_sided && (first_zero || last_zero) => {
            violations.push(Violation::Endpoints {
                detail: "alpha = 0 with a one-signed spectrum requires phi_1(a), phi_N(a) != 0".into(),
            })
        }
        _ => {}
    }
    FeasibilityReport {
        ok: violations.is_empty(),
        alpha: alpha.hi(),
        beta: beta.hi(),
        regime,
        violations,
        snapped,
    }
}

fn feasible(d: &InteriorData, tol: &Tolerances) -> Result<(Vec<f64>, FeasibilityReport)> {
    d.validate()?;
    let report = feasibility(&d.eigenvalues, &d.phi, tol);
    if !report.ok {
        let list: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("{} {:?}", v.condition(), v))
            .collect();
        return Err(Error::Infeasible(list.join("; ")));
    }
    let (phi, _) = snap(&d.phi, tol);
    Ok((phi, report))
}

/// -1/(alpha z + beta + G) with the structural zeros of alpha and beta imposed.
fn sum_weyl_snapped(lambda: &[f64], phi: &[f64], regime: Regime) -> Result<HerglotzRational> {
    let (alpha, beta) = alpha_beta_dd(lambda, phi);
    let zero = Dd::from(0.0);
    let (alpha, beta) = match regime {
        Regime::AlphaBetaZero => (zero, zero),
        Regime::AlphaZero => (zero, beta),
        Regime::AlphaNonzero => (alpha, beta),
    };
    let terms = lambda
        .iter()
        .zip(phi)
        .filter(|(_, &p)| p != 0.0)
        .map(|(&l, &p)| (Dd::from(l), Dd::new_mul(l, p).powi(2)))
        .collect();
    HerglotzRational::new_dd(alpha, beta, terms)?.neg_reciprocal_pinned(Some(0.0))
}

/// M_+ + M_- in partial-fraction form.
pub fn sum_weyl(d: &InteriorData, tol: &Tolerances) -> Result<HerglotzRational> {
    let (phi, report) = feasible(d, tol)?;
    sum_weyl_snapped(&d.eigenvalues, &phi, report.regime)
}

fn classify(lambda: &[f64], phi: &[f64], sum: &HerglotzRational) -> Result<Vec<Role>> {
    let active: Vec<usize> = (0..lambda.len()).filter(|&i| phi[i] != 0.0).collect();
    let mut roles = Vec::with_capacity(sum.num_poles());
    let mut used = vec![false; lambda.len()];
    for mu in sum.poles() {
        if mu == 0.0 {
            roles.push(Role::Zero);
            continue;
        }
        // active eigenvalues bracketing mu
        let q = active.partition_point(|&i| lambda[i] < mu);
        let lo = q.checked_sub(1).map(|k| active[k]);
        let hi = active.get(q).copied();
        let inside = |i: usize| lo.map_or(true, |l| i > l) && hi.map_or(true, |h| i < h);
        let zeros: Vec<usize> = (0..lambda.len()).filter(|&i| phi[i] == 0.0 && inside(i)).collect();
        let role = match zeros.as_slice() {
            [j] => {
                if (mu - lambda[*j]).abs() > MATCH * lambda[*j].abs().max(1.0) || used[*j] {
                    return Err(Error::UnresolvedPole(mu));
                }
                used[*j] = true;
                Role::A(*j)
            }
            [] => match (lo, hi) {
                (Some(l), Some(h)) => {
                    if phi[l] * phi[h] < 0.0 {
                        Role::B
                    } else {
                        Role::C
                    }
                }
                _ => Role::Free,
            },
            _ => return Err(Error::UnresolvedPole(mu)),
        };
        roles.push(role);
    }
    if let Some(j) = (0..lambda.len()).find(|&j| phi[j] == 0.0 && !used[j]) {
        return Err(Error::UnresolvedPole(lambda[j]));
    }
    Ok(roles)
}

fn assignment(poles: &[f64], roles: &[Role], lambda: &[f64], free_sides: Option<usize>) -> PoleAssignment {
    let mut out = PoleAssignment::default();
    let mut free_index = 0;
    for (&mu, role) in poles.iter().zip(roles) {
        match role {
            Role::Zero => out.shared_zero = mu,
            Role::A(j) => out.set_a.push(lambda[*j]),
            Role::B => out.set_b.push(mu),
            Role::C => out.set_c.push(mu),
            Role::Free => {
                match free_sides {
                    None => out.free_poles.push(mu),
                    Some(bits) if bits >> free_index & 1 == 0 => out.set_b.push(mu),
                    Some(_) => out.set_c.push(mu),
                }
                free_index += 1;
            }
        }
    }
    out
}

/// Splits the poles of M_+ + M_- into the shared zero and the sets A, B, C
/// and the free extreme poles.
pub fn pole_split(d: &InteriorData, tol: &Tolerances) -> Result<PoleAssignment> {
    Ok(solution_family(d, tol)?.split)
}

/// Branch structure of the solution set. Free poles are enumerated B-first:
/// bit f of the branch index sends the f-th free pole (ascending) to M_-.
pub fn solution_family(d: &InteriorData, tol: &Tolerances) -> Result<SolutionFamily> {
    if d.len() > ENUMERATION_CAP {
        return Err(Error::EnumerationCap(d.len()));
    }
    let (phi, report) = feasible(d, tol)?;
    let sum = sum_weyl_snapped(&d.eigenvalues, &phi, report.regime)?;
    let roles = classify(&d.eigenvalues, &phi, &sum)?;
    let poles = sum.poles();
    let free = roles.iter().filter(|r| **r == Role::Free).count();
    let split = assignment(&poles, &roles, &d.eigenvalues, None);
    let branches = (0..1usize << free)
        .map(|bits| assignment(&poles, &roles, &d.eigenvalues, Some(bits)))
        .collect();
    Ok(SolutionFamily {
        a: d.a,
        data: InteriorData { a: d.a, eigenvalues: d.eigenvalues.clone(), phi },
        dim_k: split.set_a.len(),
        sum,
        roles,
        split,
        branches,
    })
}

impl SolutionFamily {
    pub fn count(&self) -> SolutionCount {
        SolutionCount::from_parts(self.dim_k, self.branches.len())
    }

    /// The Weyl functions (M_+, M_-) of one family member.
    pub fn weyl_pair(&self, branch: usize, thetas: &[f64]) -> Result<(HerglotzRational, HerglotzRational)> {
        if branch >= self.branches.len() {
            return Err(Error::InvalidArgument(format!(
                "branch {branch} out of range (family has {})",
                self.branches.len()
            )));
        }
        if thetas.len() != self.dim_k {
            return Err(Error::InvalidArgument(format!(
                "{} split parameters given, family has dimension {}",
                thetas.len(),
                self.dim_k
            )));
        }
        if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::InvalidArgument(format!("split parameter {t} outside (0, 1)")));
        }
        let half = Dd::from(0.5);
        let zero = Dd::from(0.0);
        let mut plus = vec![(zero, half)];
        let mut minus = vec![(zero, half)];
        let (mut free_index, mut a_index) = (0, 0);
        for ((mu, beta), role) in self.sum.terms_dd().zip(&self.roles) {
            match role {
                Role::Zero => {}
                Role::A(j) => {
                    let mu = Dd::from(self.data.eigenvalues[*j]);
                    let t = thetas[a_index];
                    plus.push((mu, beta * t));
                    minus.push((mu, beta * (1.0 - t)));
                    a_index += 1;
                }
                Role::B => plus.push((mu, beta)),
                Role::C => minus.push((mu, beta)),
                Role::Free => {
                    if branch >> free_index & 1 == 0 {
                        plus.push((mu, beta));
                    } else {
                        minus.push((mu, beta));
                    }
                    free_index += 1;
                }
            }
        }
        Ok((
            HerglotzRational::new_dd(self.sum.gamma_dd(), self.sum.zeta_dd(), plus)?,
            HerglotzRational::new_dd(zero, zero, minus)?,
        ))
    }

    /// The member of `branch` with the given split parameters, verified
    /// against the interior data (signs included).
    pub fn generate(&self, branch: usize, thetas: &[f64], tol: &Tolerances) -> Result<PeakonMeasure> {
        let fail = |reason: String| Error::ReconstructionFail { branch, reason };
        let (mp, mm) = self.weyl_pair(branch, thetas)?;
        let plus = measure_from_weyl(&mp, self.a, Side::Plus, tol).map_err(|e| fail(e.to_string()))?;
        let minus = measure_from_weyl(&mm, self.a, Side::Minus, tol).map_err(|e| fail(e.to_string()))?;
        let m = HalfLineMeasure::join(&minus, &plus, tol).map_err(|e| fail(e.to_string()))?;
        let got = interior_data(&m, self.a, tol).map_err(|e| fail(e.to_string()))?;
        interior_mismatch(&self.data, &got, tol).map_err(fail)?;
        Ok(m)
    }
}

fn interior_mismatch(want: &InteriorData, got: &InteriorData, tol: &Tolerances) -> std::result::Result<(), String> {
    if want.len() != got.len() {
        return Err(format!("{} eigenvalues instead of {}", got.len(), want.len()));
    }
    for i in 0..want.len() {
        let (l, lh) = (want.eigenvalues[i], got.eigenvalues[i]);
        if (l - lh).abs() > tol.inv * l.abs() {
            return Err(format!("eigenvalue {lh} instead of {l}"));
        }
        let (p, ph) = (want.phi[i], got.phi[i]);
        if (p - ph).abs() > tol.inv {
            return Err(format!("phi_{} = {ph} instead of {p}", i + 1));
        }
    }
    Ok(())
}

/// One reconstruction per branch, in branch order. `splits` holds one theta
/// per A-pole in ascending order of the pole; empty means 1/2 throughout.
pub fn enumerate_solutions(d: &InteriorData, splits: &[f64], tol: &Tolerances) -> Result<Vec<BranchOutcome>> {
    let family = solution_family(d, tol)?;
    let thetas = if splits.is_empty() { vec![0.5; family.dim_k] } else { splits.to_vec() };
    if thetas.len() != family.dim_k {
        return Err(Error::InvalidArgument(format!(
            "{} split parameters given, family has dimension {}",
            thetas.len(),
            family.dim_k
        )));
    }
    Ok((0..family.branches.len())
        .into_par_iter()
        .map(|b| BranchOutcome {
            branch: b,
            assignment: family.branches[b].clone(),
            result: family.generate(b, &thetas, tol),
        })
        .collect())
}

/// Size of the solution set read off from the regime, the sign of the
/// spectrum and whether phi_1(a), phi_N(a) vanish.
pub fn solution_count(d: &InteriorData, tol: &Tolerances) -> Result<SolutionCount> {
    let (phi, report) = feasible(d, tol)?;
    let n = phi.len();
    let k = phi.iter().filter(|p| **p == 0.0).count();
    let j0 = negatives(&d.eigenvalues);
    let (z1, zn) = (phi[0] == 0.0, phi[n - 1] == 0.0);
    let branches = match report.regime {
        Regime::AlphaBetaZero => 1,
        Regime::AlphaZero => {
            if j0 == 0 || j0 == n || z1 || zn {
                1
            } else {
                2
            }
        }
        Regime::AlphaNonzero => {
            if j0 == 0 {
                if zn {
                    1
                } else {
                    2
                }
            } else if j0 == n {
                if z1 {
                    1
                } else {
                    2
                }
            } else {
                match (z1, zn) {
                    (true, true) => 1,
                    (false, false) => 4,
                    _ => 2,
                }
            }
        }
    };
    Ok(SolutionCount::from_parts(k, branches))
}

/// Number of solutions (k = 0) or solution manifolds (k > 0) sharing the
/// eigenvalues and the moduli |phi_i(a)|.
pub fn modulus_family_count(d: &InteriorData, tol: &Tolerances) -> Result<u64> {
    d.validate()?;
    let n = d.len();
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap(n));
    }
    let moduli: Vec<f64> = d.phi.iter().map(|p| p.abs()).collect();
    let (phi, _) = snap(&moduli, tol);
    let (alpha, beta) = alpha_beta_dd(&d.eigenvalues, &phi);
    if alpha.hi() < -tol.ab {
        return Err(Error::Infeasible(format!("sum of phi^2 exceeds 1 by {:e}", -alpha.hi())));
    }
    let k = phi.iter().filter(|p| **p == 0.0).count() as i64;
    let reduce = match regime_of(alpha.hi(), beta.hi(), beta_scale(&d.eigenvalues, &phi), tol) {
        Regime::AlphaBetaZero => 2,
        Regime::AlphaZero => 1,
        Regime::AlphaNonzero => 0,
    };
    let e = n as i64 - 2 * k - reduce;
    if e < 0 {
        return Err(Error::Infeasible(format!("{k} vanishing values are too many for {n} eigenvalues")));
    }
    Ok(1u64 << e)
}
