#![allow(dead_code)]

use nalgebra::DMatrix;
use peakon_core::forward::build_pencil;
use peakon_core::{PeakonMeasure, Tolerances};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random measure with n points: gaps in [0.3, 2.5], mixed w signs, and a
/// v-weight on roughly a third of the points.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> PeakonMeasure {
    let mut x = rng.gen_range(-3.0..3.0);
    let (mut xs, mut ws, mut vs) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        xs.push(x);
        x += rng.gen_range(0.3..2.5);
        let mut w: f64 = rng.gen_range(0.2..3.0);
        if rng.gen_bool(0.4) {
            w = -w;
        }
        let v = if rng.gen_bool(0.33) { rng.gen_range(0.1..2.0) } else { 0.0 };
        if v > 0.0 && rng.gen_bool(0.25) {
            w = 0.0;
        }
        ws.push(w);
        vs.push(v);
    }
    PeakonMeasure::new(&xs, &ws, &vs).unwrap()
}

/// Random measure with positive w and no v.
pub fn random_positive_measure(rng: &mut ChaCha8Rng, n: usize) -> PeakonMeasure {
    let mut x = rng.gen_range(-3.0..3.0);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for _ in 0..n {
        xs.push(x);
        x += rng.gen_range(0.3..2.5);
        ws.push(rng.gen_range(0.2..3.0));
    }
    PeakonMeasure::new(&xs, &ws, &vec![0.0; n]).unwrap()
}

/// Eigenvalues of J y = z D y by a dense solve: with J = L L^T the nonzero
/// eigenvalues mu of L^{-1} D L^{-T} give z = 1/mu.
pub fn dense_eigenvalues(m: &PeakonMeasure) -> Vec<f64> {
    let p = build_pencil(m, &Tolerances::default()).unwrap();
    let l = p.j.clone().cholesky().unwrap().l();
    let li = l.clone().try_inverse().unwrap();
    let s: DMatrix<f64> = &li * &p.d * li.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let mut z: Vec<f64> = eig
        .eigenvalues
        .iter()
        .filter(|mu| mu.abs() > 1e-300)
        .map(|mu| 1.0 / mu)
        .collect();
    z.sort_by(|a, b| a.total_cmp(b));
    z
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
