//! Derivative-free trust-region minimization on linear interpolation models
//! over a simplex of `n + 1` points, in the manner of Powell's COBYLA for the
//! unconstrained case.
//!
//! The model gradient comes from the simplex edges; a step of length `ρ`
//! goes down it. Poor steps shrink `ρ` once the simplex geometry is
//! acceptable; otherwise a geometry step first replaces the worst-placed
//! vertex. `ρ` halves down to `rho_end`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Counted, MinimizeConfig, Minimum, Monitor, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CobylaOptions {
    pub rho_begin: f64,
    /// Final trust radius; defaults to the run's `tol`.
    pub rho_end: Option<f64>,
    /// Vertices closer than `alpha·ρ` to their opposite face are degenerate.
    pub alpha: f64,
    /// Vertices farther than `beta·ρ` from the best point are stale.
    pub beta: f64,
}

impl Default for CobylaOptions {
    fn default() -> Self {
        Self { rho_begin: 1.0, rho_end: None, alpha: 0.25, beta: 2.1 }
    }
}

struct Simplex {
    /// Vertex 0 is always the best point.
    points: Vec<DVector<f64>>,
    values: Vec<f64>,
}

impl Simplex {
    fn edges(&self) -> DMatrix<f64> {
        let n = self.points[0].len();
        DMatrix::from_fn(n, n, |i, j| self.points[i + 1][j] - self.points[0][j])
    }

    /// Inverse of the edge matrix: column `i` is orthogonal to every edge but `i`.
    fn inverse(&self) -> Option<DMatrix<f64>> {
        let d = self.edges();
        let w = d.clone().try_inverse()?;
        w.iter().all(|v| v.is_finite()).then_some(w)
    }

    fn gradient(&self, w: &DMatrix<f64>) -> DVector<f64> {
        let df = DVector::from_iterator(self.values.len() - 1, self.values[1..].iter().map(|v| v - self.values[0]));
        w * df
    }

    /// Puts `x` in place of vertex `k`, restoring best-first order.
    fn replace(&mut self, k: usize, x: DVector<f64>, fx: f64) {
        self.points[k] = x;
        self.values[k] = fx;
        if fx < self.values[0] {
            self.points.swap(0, k);
            self.values.swap(0, k);
        }
    }
}

/// Barycentric coordinates of `x` in the simplex, vertex 0 first.
fn barycentric(s: &Simplex, w: &DMatrix<f64>, x: &DVector<f64>) -> Vec<f64> {
    let lam = w.transpose() * (x - &s.points[0]);
    let mut out = Vec::with_capacity(lam.len() + 1);
    out.push(1.0 - lam.sum());
    out.extend(lam.iter());
    out
}

fn axis_simplex(f: &mut Counted<impl FnMut(&[f64]) -> f64>, base: &DVector<f64>, fbase: f64, rho: f64) -> Simplex {
    let n = base.len();
    let mut points = vec![base.clone()];
    let mut values = vec![fbase];
    for i in 0..n {
        let mut p = base.clone();
        p[i] += rho;
        values.push(f.eval(p.as_slice()));
        points.push(p);
    }
    let mut s = Simplex { points, values };
    let best = (0..=n).min_by(|&a, &b| s.values[a].total_cmp(&s.values[b])).unwrap();
    s.points.swap(0, best);
    s.values.swap(0, best);
    s
}

/// Minimizes `f` from `theta0`; `maxiter` bounds function evaluations.
///
/// The accepted iterates are the best point at the end of every trust-radius
/// stage that improved on the previous one, so the shared stopping rule
/// reads "a whole stage gained less than `tol`".
pub fn cobyla_minimize(
    f: impl FnMut(&[f64]) -> f64,
    theta0: &[f64],
    cfg: &MinimizeConfig,
    opts: &CobylaOptions,
) -> Minimum {
    let mut f = Counted::new(f);
    let mut mon = Monitor::new(cfg.tol);
    let n = theta0.len();
    let rho_end = opts.rho_end.unwrap_or(cfg.tol).min(opts.rho_begin);
    let mut rho = opts.rho_begin;
    let x0 = DVector::from_column_slice(theta0);
    let f0 = f.eval(theta0);
    mon.accept(0, f0, theta0);
    if n == 0 {
        mon.accept(0, f0, theta0);
        return mon.finish(theta0, StopReason::ToleranceMet, f.evaluations, 0, None);
    }
    if f.evaluations + n > cfg.maxiter {
        return mon.finish(theta0, StopReason::MaxiterReached, f.evaluations, 0, None);
    }

    let mut s = axis_simplex(&mut f, &x0, f0, rho);
    let mut accepted = f0;
    let mut iter = 0;
    let mut respans = 0;
    let done = |mon: Monitor, f: &Counted<_>, reason, iter, msg| mon.finish(theta0, reason, f.evaluations, iter, msg);

    loop {
        if f.evaluations >= cfg.maxiter {
            if s.values[0] < accepted {
                mon.accept(iter, s.values[0], s.points[0].as_slice());
            }
            return done(mon, &f, StopReason::MaxiterReached, iter, None);
        }
        iter += 1;
        let Some(w) = s.inverse() else {
            respans += 1;
            if respans > 3 || f.evaluations + n > cfg.maxiter {
                let reason = if respans > 3 { StopReason::OptimizerInternal } else { StopReason::MaxiterReached };
                let msg = Some("simplex collapsed and could not be re-spanned".to_string());
                return done(mon, &f, reason, iter, msg);
            }
            let (b, fb) = (s.points[0].clone(), s.values[0]);
            s = axis_simplex(&mut f, &b, fb, rho);
            continue;
        };

        // geometry: stale (too far) vertices first, then flat ones
        let far = (1..=n)
            .map(|i| (i, (&s.points[i] - &s.points[0]).norm()))
            .filter(|&(_, d)| d > opts.beta * rho)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let flat = (1..=n)
            .map(|i| (i, 1.0 / w.column(i - 1).norm()))
            .filter(|&(_, sigma)| sigma < opts.alpha * rho)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let g = s.gradient(&w);
        if let Some((j, _)) = far.or(flat) {
            let wj = w.column(j - 1).into_owned();
            let dir = &wj / wj.norm();
            let sign = if g.dot(&dir) > 0.0 { -1.0 } else { 1.0 };
            let x = &s.points[0] + dir * (sign * rho);
            let fx = f.eval(x.as_slice());
            s.replace(j, x, fx);
            continue;
        }

        let gnorm = g.norm();
        let mut shrink = !(gnorm > 0.0 && gnorm.is_finite());
        if !shrink {
            let x = &s.points[0] - &g * (rho / gnorm);
            let fx = f.eval(x.as_slice());
            let ratio = (s.values[0] - fx) / (rho * gnorm);
            let lam = barycentric(&s, &w, &x);
            let improved = fx < s.values[0];
            let anchor = if improved { &x } else { &s.points[0] };
            let score = |k: usize| {
                let d = (&s.points[k] - anchor).norm() / rho;
                lam[k].abs() * d.max(1.0).powi(2)
            };
            let k = (0..=n)
                .filter(|&k| improved || k != 0)
                .max_by(|&a, &b| score(a).total_cmp(&score(b)))
                .unwrap();
            s.replace(k, x, fx);
            shrink = ratio < 0.1;
        }
        if shrink {
            // end of a trust-radius stage
            if s.values[0] < accepted {
                accepted = s.values[0];
                if mon.accept(iter, accepted, s.points[0].as_slice()) {
                    return done(mon, &f, StopReason::ToleranceMet, iter, None);
                }
            }
            if rho <= rho_end {
                mon.accept(iter, s.values[0], s.points[0].as_slice());
                return done(mon, &f, StopReason::ToleranceMet, iter, None);
            }
            rho = (0.5 * rho).max(rho_end);
        }
    }
}
