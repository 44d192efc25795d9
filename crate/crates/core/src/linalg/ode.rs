// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 5(4) integrator for matrix-valued ODEs.

use crate::matrix::{c64, ComplexMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Steps below `min_step * max(1, |t|)` count as underflow.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-10,
            min_step: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are row 6 of A; these are fifth minus fourth order
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrator state; keeps its step size between output times.
pub struct DormandPrince<F> {
    rhs: F,
    opts: OdeOptions,
    t: f64,
    y: ComplexMatrix,
    h: Option<f64>,
    steps: usize,
}

impl<F> DormandPrince<F>
where
    F: Fn(f64, &ComplexMatrix) -> ComplexMatrix,
{
    pub fn new(rhs: F, t0: f64, y0: ComplexMatrix, opts: OdeOptions) -> Self {
        Self {
            rhs,
            opts,
            t: t0,
            y: y0,
            h: None,
            steps: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &ComplexMatrix {
        &self.y
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Overwrites the current state (used for re-projection between outputs).
    pub fn set_state(&mut self, y: ComplexMatrix) {
        self.y = y;
    }

    fn error_norm(&self, y_new: &ComplexMatrix, err: &ComplexMatrix) -> f64 {
        let mut acc = 0.0f64;
        for ((e, a), b) in err.iter().zip(self.y.iter()).zip(y_new.iter()) {
            let sc = self.opts.atol + self.opts.rtol * a.norm().max(b.norm());
            acc = acc.max(e.norm() / sc);
        }
        acc
    }

    fn initial_step(&self, span: f64) -> f64 {
        let f0 = (self.rhs)(self.t, &self.y);
        let scale = |m: &ComplexMatrix| {
            m.iter()
                .zip(self.y.iter())
                .map(|(z, y)| z.norm() / (self.opts.atol + self.opts.rtol * y.norm()))
                .fold(0.0, f64::max)
        };
        let d0 = scale(&self.y);
        let d1 = scale(&f0);
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span.abs())
    }

    /// Integrates to exactly `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        if t_end == self.t {
            return Ok(());
        }
        if t_end < self.t {
            return Err(Error::TimeGrid(format!("cannot integrate backwards from {} to {}", self.t, t_end)));
        }
        let mut h = self.h.unwrap_or_else(|| self.initial_step(t_end - self.t));
        loop {
            let remaining = t_end - self.t;
            if remaining <= 0.0 {
                break;
            }
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < self.opts.min_step * self.t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t: self.t, step });
            }
            if self.steps >= self.opts.max_steps {
                return Err(Error::StepUnderflow { t: self.t, step });
            }

            let mut k: Vec<ComplexMatrix> = Vec::with_capacity(7);
            k.push((self.rhs)(self.t, &self.y));
            for s in 1..7 {
                let mut ys = self.y.clone();
                for (j, kj) in k.iter().enumerate() {
                    let a = A[s][j];
                    if a != 0.0 {
                        ys += kj * c64(a * step, 0.0);
                    }
                }
                k.push((self.rhs)(self.t + C[s] * step, &ys));
            }
            let mut y_new = self.y.clone();
            for (j, kj) in k.iter().enumerate().take(6) {
                let b = A[6][j];
                if b != 0.0 {
                    y_new += kj * c64(b * step, 0.0);
                }
            }
            let mut err = ComplexMatrix::zeros(self.y.nrows(), self.y.ncols());
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    err += kj * c64(E[j] * step, 0.0);
                }
            }
            let en = self.error_norm(&y_new, &err);
            if !en.is_finite() {
                h = step * 0.1;
                continue;
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                self.t = if last { t_end } else { self.t + step };
                self.y = y_new;
                self.steps += 1;
                // keep the natural step, not the clipped one
                h = if last { h.max(step * factor) } else { step * factor };
                self.h = Some(h);
            } else {
                h = step * factor.min(1.0);
            }
        }
        Ok(())
    }
}
