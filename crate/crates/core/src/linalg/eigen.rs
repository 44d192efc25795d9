// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Complex Schur decomposition by Householder reduction to Hessenberg form
//! followed by Wilkinson-shifted QR sweeps, and right eigenvectors by
//! back-substitution on the triangular factor.

use num_complex::Complex64;

use crate::matrix::{c64, frobenius, ComplexMatrix};
use crate::{Error, Result};

const EPS: f64 = f64::EPSILON;
const ITERS_PER_EIGENVALUE: usize = 60;

/// `A = Q T Q†` with `T` upper triangular and `Q` unitary.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

/// Eigenvalues and unit-norm right eigenvectors (as columns), unsorted.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("eigensolver needs a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n, n);
    if n == 0 {
        return Ok(Schur { q, t: h });
    }
    hessenberg(&mut h, &mut q);
    qr_sweeps(&mut h, &mut q)?;
    // clear the strictly lower part left over from deflation
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = c64(0.0, 0.0);
        }
    }
    Ok(Schur { q, t: h })
}

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    Ok(schur(a)?.t.diagonal().iter().copied().collect())
}

pub fn eigen(a: &ComplexMatrix) -> Result<Eigen> {
    let Schur { q, t } = schur(a)?;
    let n = t.nrows();
    let values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    let smin = (EPS * frobenius(&t)).max(f64::MIN_POSITIVE * 1e4);

    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        y[(k, k)] = c64(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = c64(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = c64(smin, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut vectors = q * y;
    for k in 0..n {
        let mut col = vectors.column_mut(k);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // fix the phase so the largest component is real and positive
        let pivot = col
            .iter()
            .copied()
            .fold(c64(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best });
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { c64(1.0, 0.0) };
        for z in col.iter_mut() {
            *z = *z * phase / norm;
        }
    }
    Ok(Eigen { values, vectors })
}

fn hessenberg(h: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { c64(1.0, 0.0) };
        // v = x + e^{iθ}|x| e1, reflector P = I - 2 v v† / (v† v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H <- P H
        for j in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * s * beta;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: Complex64 = v.iter().enumerate().map(|(r, vr)| m[(i, k + 1 + r)] * vr).sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= s * vr.conj() * beta;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = c64(0.0, 0.0);
        }
    }
}

/// Givens rotation `[[c, s], [-s̄, c]]` mapping `(a, b)` to `(ρ, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, c64(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, c64(1.0, 0.0));
    }
    let c = a.norm() / r;
    let s = (a / a.norm()) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let disc = (p * p + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_sweeps(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.nrows();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = ITERS_PER_EIGENVALUE * n.max(1);

    while hi > 0 {
        // look for a negligible subdiagonal entry in the active window
        let mut l = hi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if scale == 0.0 { frobenius(h) } else { scale };
            if h[(l, l - 1)].norm() <= EPS * scale {
                h[(l, l - 1)] = c64(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence { iterations: total });
        }

        let mu = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + c64(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = c64(0.0, 0.0);
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = l + off;
            let rows = (k + 2).min(hi) + 1;
            for i in 0..rows {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + s.conj() * y;
                h[(i, k + 1)] = -s * x + y * c;
            }
            for i in 0..n {
                let (x, y) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = x * c + s.conj() * y;
                q[(i, k + 1)] = -s * x + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(())
}
