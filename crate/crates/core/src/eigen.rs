//! Cyclic Jacobi eigenvalues for small dense Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweep limit before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues (unsorted) of a Hermitian matrix stored row-major.
///
/// The input is symmetrized as `(A + A^H) / 2` first; callers are expected to
/// have checked Hermiticity. Iteration stops once the off-diagonal Frobenius
/// norm drops below `tol`.
pub fn hermitian_eigenvalues(entries: &[Complex64], dim: usize, tol: f64) -> Result<Vec<f64>> {
    assert_eq!(entries.len(), dim * dim, "matrix must be dim x dim");
    let mut a = entries.to_vec();
    for r in 0..dim {
        a[r * dim + r] = Complex64::new(a[r * dim + r].re, 0.0);
        for c in (r + 1)..dim {
            let avg = (a[r * dim + c] + a[c * dim + r].conj()) * 0.5;
            a[r * dim + c] = avg;
            a[c * dim + r] = avg.conj();
        }
    }

    let mut off = off_diagonal_norm(&a, dim);
    let mut sweeps = 0;
    while off > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate(&mut a, dim, p, q);
            }
        }
        off = off_diagonal_norm(&a, dim);
        sweeps += 1;
    }
    Ok((0..dim).map(|i| a[i * dim + i].re).collect())
}

fn off_diagonal_norm(a: &[Complex64], dim: usize) -> f64 {
    let mut sum = 0.0;
    for r in 0..dim {
        for c in (r + 1)..dim {
            sum += 2.0 * a[r * dim + c].norm_sqr();
        }
    }
    sum.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `U = diag(1, conj(u)) R`, where `u` is the
/// phase of `a[p][q]` and `R` the real Jacobi rotation of the rephased block.
fn rotate(a: &mut [Complex64], dim: usize, p: usize, q: usize) {
    let apq = a[p * dim + q];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let u = apq / g;
    let (app, aqq) = (a[p * dim + p].re, a[q * dim + q].re);
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // A <- A U on columns p, q
    let uqp = -u.conj() * s;
    let uqq = u.conj() * c;
    for r in 0..dim {
        let (x, y) = (a[r * dim + p], a[r * dim + q]);
        a[r * dim + p] = x * c + y * uqp;
        a[r * dim + q] = x * s + y * uqq;
    }
    // A <- U^H A on rows p, q
    let cqp = -u * s;
    let cqq = u * c;
    for col in 0..dim {
        let (x, y) = (a[p * dim + col], a[q * dim + col]);
        a[p * dim + col] = x * c + y * cqp;
        a[q * dim + col] = x * s + y * cqq;
    }
    a[p * dim + q] = Complex64::new(0.0, 0.0);
    a[q * dim + p] = Complex64::new(0.0, 0.0);
    a[p * dim + p] = Complex64::new(a[p * dim + p].re, 0.0);
    a[q * dim + q] = Complex64::new(a[q * dim + q].re, 0.0);
}
