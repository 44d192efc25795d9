// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with a [13/13] Padé approximant
//! (Higham 2005).

use crate::matrix::{c64, ComplexMatrix};
use crate::{Error, Result};

const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("expm needs a square matrix".into()));
    }
    let n = a.nrows();
    let ident = ComplexMatrix::identity(n, n);
    let norm = norm1(a);
    if norm == 0.0 {
        return Ok(ident);
    }
    if !norm.is_finite() {
        return Err(Error::Dimension("expm of non-finite matrix".into()));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * c64(0.5f64.powi(s), 0.0);

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| c64(B13[k], 0.0);

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Singular("Padé denominator in expm".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius;

    #[test]
    fn zero_is_identity() {
        assert_eq!(expm(&ComplexMatrix::zeros(3, 3)).unwrap(), ComplexMatrix::identity(3, 3));
    }

    #[test]
    fn rotation_generator() {
        // exp(t [[0, -1], [1, 0]]) is a rotation by t
        let t = 7.3;
        let a = ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(-t, 0.0), c64(t, 0.0), c64(0.0, 0.0)]);
        let e = expm(&a).unwrap();
        let want = ComplexMatrix::from_row_slice(2, 2, &[c64(t.cos(), 0.0), c64(-t.sin(), 0.0), c64(t.sin(), 0.0), c64(t.cos(), 0.0)]);
        assert!(frobenius(&(e - want)) < 1e-13);
    }

    #[test]
    fn diagonal_complex() {
        let d = nalgebra::DVector::from_vec(vec![c64(-0.25, -1.0), c64(-3.0, 2.5)]);
        let e = expm(&ComplexMatrix::from_diagonal(&d)).unwrap();
        assert!((e[(0, 0)] - c64(-0.25, -1.0).exp()).norm() < 1e-15);
        assert!((e[(1, 1)] - c64(-3.0, 2.5).exp()).norm() < 1e-15);
        assert_eq!(e[(0, 1)], c64(0.0, 0.0));
    }

    #[test]
    fn nilpotent_jordan() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(40.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 1)] - c64(40.0, 0.0)).norm() < 1e-11);
        assert!((e[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-13);
    }
}
