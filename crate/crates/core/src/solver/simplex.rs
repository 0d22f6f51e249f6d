//! Dense tableau simplex for `min c^T x, Ax = b, x >= 0`.
//!
//! Rows are sign-normalized so `b >= 0` and equilibrated by their largest
//! coefficient, then phase I minimizes the sum of one artificial per row.
//! Pricing is Dantzig's rule; after `2 (m + n)` consecutive degenerate pivots
//! the solver falls back to Bland's rule until the objective moves again.

use crate::error::{Error, Result};
use crate::numerics::norm;

use super::instance::SolverOptions;

const OPT_TOL: f64 = 1e-9;

pub(crate) enum PhaseOneOutcome {
    Feasible,
    /// Farkas vector in the original row space (not normalized).
    Infeasible(Vec<f64>),
}

pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Unbounded { x: Vec<f64>, ray: Vec<f64> },
}

pub(crate) struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
    row_sign: Vec<f64>,
    row_scale: Vec<f64>,
    pivot_tol: f64,
    max_iters: usize,
    pub(crate) iterations: usize,
    scaled_b_norm: f64,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    /// `a` is column-major `m x n`.
    pub(crate) fn new(a: &[f64], m: usize, n: usize, b: &[f64], opts: &SolverOptions) -> Self {
        let width = n + m + 1;
        let mut t = vec![0.0; m * width];
        let mut row_sign = vec![1.0; m];
        let mut row_scale = vec![1.0; m];
        for i in 0..m {
            let mut s = (0..n).fold(0.0f64, |acc, j| acc.max(a[j * m + i].abs()));
            if s == 0.0 {
                s = b[i].abs().max(1.0);
            }
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            row_sign[i] = sign;
            row_scale[i] = s;
            let f = sign / s;
            let row = &mut t[i * width..(i + 1) * width];
            for j in 0..n {
                row[j] = f * a[j * m + i];
            }
            row[n + i] = 1.0;
            row[n + m] = f * b[i];
        }
        let rhs: Vec<f64> = (0..m).map(|i| t[i * width + n + m]).collect();
        let scaled_b_norm = norm(&rhs);
        Self {
            m,
            n,
            width,
            t,
            obj: vec![0.0; width],
            basis: (n..n + m).collect(),
            active: vec![true; m],
            row_sign,
            row_scale,
            pivot_tol: opts.pivot_tol,
            max_iters: opts.iteration_cap(m, n),
            iterations: 0,
            scaled_b_norm,
        }
    }

    #[inline]
    fn rhs_col(&self) -> usize {
        self.n + self.m
    }

    fn objective(&self) -> f64 {
        -self.obj[self.rhs_col()]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.t[r * w + q];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            row.iter_mut().for_each(|v| *v /= p);
            row[q] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for (i, row) in self.t.chunks_exact_mut(w).enumerate() {
            if i == r || !self.active[i] {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (x, pv) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = self.obj[q];
        if f != 0.0 {
            for (x, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= f * pv;
            }
            self.obj[q] = 0.0;
        }
        self.basis[r] = q;
    }

    /// Run simplex iterations on the current objective row over columns
    /// `0..allowed`.
    fn iterate(&mut self, allowed: usize) -> Result<Step> {
        let w = self.width;
        let rhs = self.rhs_col();
        let stall_limit = 2 * (self.m + self.n);
        let mut stalled = 0usize;
        let mut bland = false;
        let mut last_obj = self.objective();
        let mut phase_iters = 0usize;
        let mut is_basic = vec![false; w];
        for &j in &self.basis {
            is_basic[j] = true;
        }
        loop {
            let q = if bland {
                (0..allowed).find(|&j| !is_basic[j] && self.obj[j] < -OPT_TOL)
            } else {
                let mut best = None;
                let mut best_val = -OPT_TOL;
                for j in 0..allowed {
                    let d = self.obj[j];
                    if d < best_val && !is_basic[j] {
                        best_val = d;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(q) = q else {
                return Ok(Step::Optimal);
            };

            // Ratio test.
            let mut min_ratio = f64::INFINITY;
            for i in 0..self.m {
                if !self.active[i] {
                    continue;
                }
                let a = self.t[i * w + q];
                if a > self.pivot_tol {
                    let ratio = self.t[i * w + rhs].max(0.0) / a;
                    if ratio < min_ratio {
                        min_ratio = ratio;
                    }
                }
            }
            if !min_ratio.is_finite() {
                return Ok(Step::Unbounded(q));
            }
            let slack = 1e-12 * (1.0 + min_ratio);
            let mut leave: Option<usize> = None;
            for i in 0..self.m {
                if !self.active[i] {
                    continue;
                }
                let a = self.t[i * w + q];
                if a > self.pivot_tol && self.t[i * w + rhs].max(0.0) / a <= min_ratio + slack {
                    leave = match leave {
                        None => Some(i),
                        Some(l) if bland => {
                            if self.basis[i] < self.basis[l] {
                                Some(i)
                            } else {
                                Some(l)
                            }
                        }
                        Some(l) => {
                            if a > self.t[l * w + q] {
                                Some(i)
                            } else {
                                Some(l)
                            }
                        }
                    };
                }
            }
            let r = leave.expect("ratio test found a finite minimum");

            phase_iters += 1;
            self.iterations += 1;
            if phase_iters > self.max_iters {
                return Err(Error::IterationLimit {
                    iterations: self.iterations,
                });
            }
            is_basic[self.basis[r]] = false;
            is_basic[q] = true;
            self.pivot(r, q);
            for i in 0..self.m {
                if self.t[i * w + rhs] < 0.0 {
                    self.t[i * w + rhs] = 0.0;
                }
            }

            let obj = self.objective();
            if obj < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
                stalled = 0;
                bland = false;
            } else {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            }
            last_obj = obj;
        }
    }

    pub(crate) fn phase_one(&mut self, feas_tol: f64) -> Result<PhaseOneOutcome> {
        let w = self.width;
        let (m, n) = (self.m, self.n);
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let row = &self.t[i * w..(i + 1) * w];
            for j in 0..n {
                self.obj[j] -= row[j];
            }
            self.obj[n + m] -= row[n + m];
        }
        self.iterate(n + m)?;
        let infeasibility = self.objective();
        if infeasibility > feas_tol * (1.0 + self.scaled_b_norm) {
            // Artificial reduced costs are 1 - y_i.
            let y = (0..m)
                .map(|i| (1.0 - self.obj[n + i]) * self.row_sign[i] / self.row_scale[i])
                .collect();
            return Ok(PhaseOneOutcome::Infeasible(y));
        }
        self.drive_out_artificials();
        Ok(PhaseOneOutcome::Feasible)
    }

    fn drive_out_artificials(&mut self) {
        let w = self.width;
        for r in 0..self.m {
            if self.basis[r] < self.n || !self.active[r] {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            let mut basic = vec![false; self.n];
            for &j in &self.basis {
                if j < self.n {
                    basic[j] = true;
                }
            }
            for (j, &is_basic) in basic.iter().enumerate() {
                if is_basic {
                    continue;
                }
                let a = self.t[r * w + j].abs();
                if a > self.pivot_tol && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            match best {
                Some((j, _)) => {
                    self.pivot(r, j);
                    let rhs = self.rhs_col();
                    for i in 0..self.m {
                        if self.t[i * w + rhs] < 0.0 {
                            self.t[i * w + rhs] = 0.0;
                        }
                    }
                }
                // Redundant row.
                None => self.active[r] = false,
            }
        }
    }

    pub(crate) fn primal(&self) -> Vec<f64> {
        let w = self.width;
        let rhs = self.rhs_col();
        let mut x = vec![0.0; self.n];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.n && self.active[r] {
                x[j] = self.t[r * w + rhs].max(0.0);
            }
        }
        x
    }

    /// Phase II on cost vector `c` (length `n`). Requires a feasible basis.
    pub(crate) fn phase_two(&mut self, c: &[f64]) -> Result<LpOutcome> {
        let w = self.width;
        let (m, n) = (self.m, self.n);
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        self.obj[..n].copy_from_slice(c);
        for r in 0..m {
            if !self.active[r] {
                continue;
            }
            let cb = if self.basis[r] < n { c[self.basis[r]] } else { 0.0 };
            if cb != 0.0 {
                let row = &self.t[r * w..(r + 1) * w];
                for (o, v) in self.obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
        for r in 0..m {
            if self.active[r] {
                self.obj[self.basis[r]] = 0.0;
            }
        }
        match self.iterate(n)? {
            Step::Optimal => {
                let x = self.primal();
                let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
                Ok(LpOutcome::Optimal { x, objective })
            }
            Step::Unbounded(q) => {
                let mut ray = vec![0.0; n];
                ray[q] = 1.0;
                for r in 0..m {
                    let j = self.basis[r];
                    if self.active[r] && j < n {
                        ray[j] = (-self.t[r * w + q]).max(0.0);
                    }
                }
                Ok(LpOutcome::Unbounded {
                    x: self.primal(),
                    ray,
                })
            }
        }
    }
}
