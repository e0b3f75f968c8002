//! Simultaneous-perturbation stochastic approximation with the standard gain
//! sequences `a_k = a/(k+1+A)^α`, `c_k = c/(k+1)^γ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Counted, MinimizeConfig, Minimum, Monitor, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpsaOptions {
    /// Fixed step gain; calibrated from the landscape when `None`.
    pub a: Option<f64>,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant as a fraction of `maxiter`.
    pub stability_fraction: f64,
    /// Perturbation pairs used by the calibration probe.
    pub calibration_pairs: usize,
    /// Size of the first update step after calibration.
    pub target_step: f64,
    /// Gradient estimates averaged per iteration.
    pub resamplings: usize,
    /// Iterations between energy measurements (accepted iterates);
    /// `0` means four per parameter.
    pub measure_every: usize,
}

impl Default for SpsaOptions {
    fn default() -> Self {
        Self {
            a: None,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability_fraction: 0.1,
            calibration_pairs: 12,
            target_step: 2.0 * std::f64::consts::PI / 10.0,
            resamplings: 1,
            measure_every: 0,
        }
    }
}

fn rademacher(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn shifted(theta: &[f64], delta: &[f64], s: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + s * d).collect()
}

/// Minimizes `f` from `theta0`. Each iteration spends two evaluations per
/// resampling on the gradient estimate; every `measure_every` iterations
/// the current point is measured once and that energy is the accepted
/// value. (The perturbed mean sits `O(c_k²)` above the landscape, and a
/// single SPSA step changes the energy by far less than it approaches the
/// minimum, so per-iteration differences would stop the run early.)
pub fn spsa_minimize(
    f: impl FnMut(&[f64]) -> f64,
    theta0: &[f64],
    cfg: &MinimizeConfig,
    opts: &SpsaOptions,
) -> Minimum {
    let mut f = Counted::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut mon = Monitor::new(cfg.tol);
    let n = theta0.len();
    let mut theta = theta0.to_vec();
    let big_a = opts.stability_fraction * cfg.maxiter as f64;

    let e0 = f.eval(&theta);
    mon.accept(0, e0, &theta);
    if n == 0 {
        let stop = mon.accept(0, e0, &theta);
        debug_assert!(stop);
        return mon.finish(theta0, StopReason::ToleranceMet, f.evaluations, 0, None);
    }

    let a = opts.a.unwrap_or_else(|| {
        let mut mag = 0.0;
        for _ in 0..opts.calibration_pairs {
            let d = rademacher(&mut rng, n);
            let fp = f.eval(&shifted(&theta, &d, opts.c));
            let fm = f.eval(&shifted(&theta, &d, -opts.c));
            mag += (fp - fm).abs() / (2.0 * opts.c);
        }
        mag /= opts.calibration_pairs.max(1) as f64;
        if mag > 0.0 && mag.is_finite() {
            opts.target_step * (big_a + 1.0).powf(opts.alpha) / mag
        } else {
            0.0
        }
    });
    if a == 0.0 {
        // flat under every probe: the start is stationary
        mon.accept(0, e0, &theta);
        return mon.finish(theta0, StopReason::ToleranceMet, f.evaluations, 0, None);
    }

    let reps = opts.resamplings.max(1);
    let every = if opts.measure_every == 0 { 4 * n } else { opts.measure_every };
    let mut k = 0;
    while k < cfg.maxiter {
        let ak = a / (k as f64 + 1.0 + big_a).powf(opts.alpha);
        let ck = opts.c / (k as f64 + 1.0).powf(opts.gamma);
        let mut grad = vec![0.0; n];
        for _ in 0..reps {
            let d = rademacher(&mut rng, n);
            let fp = f.eval(&shifted(&theta, &d, ck));
            let fm = f.eval(&shifted(&theta, &d, -ck));
            // Δ_i = ±1, so 1/Δ_i = Δ_i
            let g = (fp - fm) / (2.0 * ck * reps as f64);
            grad.iter_mut().zip(&d).for_each(|(gi, di)| *gi += g * di);
        }
        theta.iter_mut().zip(&grad).for_each(|(t, g)| *t -= ak * g);
        k += 1;
        if k % every == 0 || k == cfg.maxiter {
            let e = f.eval(&theta);
            if mon.accept(k, e, &theta) {
                return mon.finish(theta0, StopReason::ToleranceMet, f.evaluations, k, None);
            }
        }
    }
    mon.finish(theta0, StopReason::MaxiterReached, f.evaluations, k, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let cfg = MinimizeConfig { tol: 1e-12, maxiter: 500, seed: 3 };
        let m = spsa_minimize(|x| x.iter().map(|v| v * v).sum(), &[1.0, 1.0], &cfg, &SpsaOptions::default());
        let r2: f64 = m.theta.iter().map(|v| v * v).sum();
        assert!(r2 < 1e-2, "{r2}");
        assert!(m.iterations <= 500);
    }

    #[test]
    fn flat_landscape_does_not_move() {
        let cfg = MinimizeConfig { tol: 1e-6, maxiter: 100, seed: 1 };
        let m = spsa_minimize(|_| 2.5, &[0.3, -0.2], &cfg, &SpsaOptions::default());
        assert_eq!(m.theta, vec![0.3, -0.2]);
        assert!(m.converged);
        assert_eq!(m.value, 2.5);
    }

    #[test]
    fn evaluation_budget() {
        let cfg = MinimizeConfig { tol: 1e-300, maxiter: 40, seed: 9 };
        let opts = SpsaOptions { measure_every: 5, ..SpsaOptions::default() };
        let m = spsa_minimize(|x| (x[0] - 1.0).powi(2) + x[1].sin(), &[0.0, 0.0], &cfg, &opts);
        assert_eq!(m.stop_reason, StopReason::MaxiterReached);
        assert_eq!(m.evaluations, 1 + 2 * opts.calibration_pairs + 2 * 40 + 8);
        assert_eq!(m.history.len(), 9);
    }

    #[test]
    fn seeded_reproducibility() {
        let cfg = MinimizeConfig { tol: 1e-8, maxiter: 200, seed: 5 };
        let f = |x: &[f64]| (x[0] - 0.5).powi(2) + 3.0 * (x[1] + 0.2).powi(2);
        let a = spsa_minimize(f, &[0.0, 0.0], &cfg, &SpsaOptions::default());
        let b = spsa_minimize(f, &[0.0, 0.0], &cfg, &SpsaOptions::default());
        assert_eq!(a, b);
    }
}
