//! Limited-memory BFGS on a box, with central finite-difference gradients
//! and a bracketing Armijo/Wolfe line search over the projected path.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Counted, MinimizeConfig, Minimum, Monitor, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LbfgsbOptions {
    pub memory: usize,
    pub fd_step: f64,
    /// Symmetric box `[−bound, bound]` on every parameter.
    pub bound: f64,
    /// Projected-gradient norm treated as stationary.
    pub gtol: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for LbfgsbOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            fd_step: 1e-6,
            bound: 4.0 * std::f64::consts::PI,
            gtol: 1e-8,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 40,
        }
    }
}

/// Central differences, `2n` evaluations.
pub fn finite_difference_gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + h;
            let fp = f(&p);
            p[i] = x[i] - h;
            let fm = f(&p);
            p[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Gradient with components that would push through an active bound zeroed.
fn projected(x: &[f64], g: &[f64], bound: f64) -> Vec<f64> {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| if (xi <= -bound && gi > 0.0) || (xi >= bound && gi < 0.0) { 0.0 } else { gi })
        .collect()
}

fn two_loop(g: &[f64], mem: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y, rho) in mem.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = mem.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `f` from `theta0` (clamped into the box); `maxiter` bounds
/// line-search iterations.
pub fn lbfgsb_minimize(
    f: impl FnMut(&[f64]) -> f64,
    theta0: &[f64],
    cfg: &MinimizeConfig,
    opts: &LbfgsbOptions,
) -> Minimum {
    let mut f = Counted::new(f);
    let mut mon = Monitor::new(cfg.tol);
    let b = opts.bound;
    let clamp = |v: f64| v.clamp(-b, b);
    let mut x: Vec<f64> = theta0.iter().map(|&v| clamp(v)).collect();
    let mut fx = f.eval(&x);
    mon.accept(0, fx, &x);
    let grad = |f: &mut Counted<_>, x: &[f64]| finite_difference_gradient(|p| f.eval(p), x, opts.fd_step);
    let mut g = grad(&mut f, &x);
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut k = 0;

    loop {
        if norm(&projected(&x, &g, b)) < opts.gtol {
            mon.accept(k, fx, &x);
            return mon.finish(theta0, StopReason::ToleranceMet, f.evaluations, k, None);
        }
        if k >= cfg.maxiter {
            return mon.finish(theta0, StopReason::MaxiterReached, f.evaluations, k, None);
        }
        let mut d = two_loop(&g, &mem);
        let mut dg0 = dot(&d, &g);
        if !(dg0 < 0.0) {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            dg0 = dot(&d, &g);
        }
        let mut alpha = if mem.is_empty() { (1.0 / norm(&d)).min(1.0) } else { 1.0 };
        let (mut lo, mut hi) = (0.0, f64::INFINITY);
        let mut fallback: Option<(Vec<f64>, f64, Vec<f64>)> = None;
        let mut accepted = None;
        for _ in 0..opts.max_line_search {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| clamp(xi + alpha * di)).collect();
            let step: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
            if norm(&step) == 0.0 {
                break;
            }
            let ft = f.eval(&xt);
            if !(ft <= fx + opts.c1 * dot(&g, &step)) {
                hi = alpha;
                alpha = if lo == 0.0 && ft.is_finite() {
                    // quadratic interpolation, safeguarded
                    let q = -dg0 * alpha * alpha / (2.0 * (ft - fx - dg0 * alpha));
                    q.clamp(0.1 * alpha, 0.5 * alpha)
                } else {
                    0.5 * (lo + hi)
                };
                continue;
            }
            let gt = grad(&mut f, &xt);
            let clipped = xt.iter().zip(&d).zip(&x).any(|((t, di), xi)| (xi + alpha * di - t).abs() > 0.0);
            if dot(&gt, &d) < opts.c2 * dg0 && !clipped {
                lo = alpha;
                alpha = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * alpha };
                fallback = Some((xt, ft, gt));
                continue;
            }
            accepted = Some((xt, ft, gt));
            break;
        }
        let Some((xt, ft, gt)) = accepted.or(fallback) else {
            let msg = "line search found no sufficient decrease".to_string();
            return mon.finish(theta0, StopReason::OptimizerInternal, f.evaluations, k, Some(msg));
        };
        k += 1;
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if mem.len() == opts.memory {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        x = xt;
        fx = ft;
        g = gt;
        if mon.accept(k, fx, &x) {
            return mon.finish(theta0, StopReason::ToleranceMet, f.evaluations, k, None);
        }
    }
}
