use super::DirichletOperator;
use crate::error::{Error, Result};

/// Jacobi-preconditioned conjugate gradients on `(D − B) u = y`, stopping on
/// the `m`-weighted residual of the original system `L_n u = M⁻¹ y`.
pub(super) fn pcg(op: &DirichletOperator, y: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = op.len();
    let m = op.measures();
    let diag: Vec<f64> = (0..n).map(|i| op.diag(i)).collect();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Singular(format!("isolated ungrounded vertex {}", op.vertices()[i])));
    }
    let weighted = |r: &[f64]| r.iter().zip(m).map(|(x, m)| x * x / m).sum::<f64>().sqrt();
    let target = tol * weighted(y);
    let mut u = vec![0.0; n];
    if target == 0.0 {
        return Ok((u, 0));
    }
    let mut r = y.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 1..=max_iter {
        let ap = op.apply_b(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::Singular("operator is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            u[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if weighted(&r) <= target {
            return Ok((u, it));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: weighted(&r) / weighted(y),
    })
}
