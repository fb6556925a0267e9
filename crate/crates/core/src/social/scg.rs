//! Scaled Conjugate Gradient (Møller, 1993).
//!
//! Conjugate directions with a finite-difference Hessian-vector product in
//! place of a line search, and a Levenberg-Marquardt style scale `lambda`
//! that keeps the local quadratic model positive definite.

/// A differentiable scalar function of a parameter vector.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, w: &[f64]) -> f64;
    /// Writes the gradient into `grad` and returns the value.
    fn value_and_gradient(&self, w: &[f64], grad: &mut [f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScgOptions {
    pub max_iterations: usize,
    /// Step used for the Hessian-vector approximation, relative to |p|.
    pub sigma0: f64,
    pub lambda_init: f64,
    /// Stop once the objective is at or below this value.
    pub target: f64,
    /// Stop once the gradient norm falls below this value.
    pub gradient_tolerance: f64,
}

impl Default for ScgOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            sigma0: 1e-4,
            lambda_init: 1e-6,
            target: 0.0,
            gradient_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    TargetReached,
    GradientVanished,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct ScgOutcome {
    pub weights: Vec<f64>,
    pub loss: f64,
    /// Objective after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(w: &[f64], alpha: f64, p: &[f64], out: &mut [f64]) {
    for ((o, wi), pi) in out.iter_mut().zip(w).zip(p) {
        *o = wi + alpha * pi;
    }
}

pub fn minimize<O: Objective + ?Sized>(objective: &O, initial: &[f64], opts: &ScgOptions) -> ScgOutcome {
    let n = objective.dim();
    assert_eq!(initial.len(), n, "initial point has wrong dimension");

    let mut w = initial.to_vec();
    let mut grad = vec![0.0; n];
    let mut loss = objective.value_and_gradient(&w, &mut grad);
    let mut r: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut history = vec![loss];

    let mut trial = vec![0.0; n];
    let mut grad_trial = vec![0.0; n];
    let mut lambda = opts.lambda_init;
    let mut lambda_bar = 0.0;
    let mut delta = 0.0;
    let mut success = true;
    let mut accepted = 0usize;

    let finish = |w, loss, history, iterations, stop| ScgOutcome {
        weights: w,
        loss,
        history,
        iterations,
        stop,
    };

    if !loss.is_finite() {
        return finish(w, loss, history, 0, StopReason::NonFinite);
    }
    if loss <= opts.target {
        return finish(w, loss, history, 0, StopReason::TargetReached);
    }

    for iter in 1..=opts.max_iterations {
        let p2 = dot(&p, &p);
        if p2 == 0.0 {
            return finish(w, loss, history, iter - 1, StopReason::GradientVanished);
        }

        // second-order information along p
        if success {
            let sigma = opts.sigma0 / p2.sqrt();
            axpy(&w, sigma, &p, &mut trial);
            objective.value_and_gradient(&trial, &mut grad_trial);
            delta = grad_trial
                .iter()
                .zip(&grad)
                .zip(&p)
                .map(|((gt, g), pi)| (gt - g) / sigma * pi)
                .sum();
        }

        // scale
        delta += (lambda - lambda_bar) * p2;
        if delta <= 0.0 {
            lambda_bar = 2.0 * (lambda - delta / p2);
            delta = -delta + lambda * p2;
            lambda = lambda_bar;
        }

        let mu = dot(&p, &r);
        if mu <= 0.0 {
            // lost descent direction: restart along steepest descent
            p.copy_from_slice(&r);
            success = true;
            continue;
        }
        let alpha = mu / delta;

        // comparison parameter
        axpy(&w, alpha, &p, &mut trial);
        let trial_loss = objective.value(&trial);
        let comparison = if trial_loss.is_finite() {
            2.0 * delta * (loss - trial_loss) / (mu * mu)
        } else {
            -1.0
        };

        if comparison >= 0.0 {
            w.copy_from_slice(&trial);
            loss = objective.value_and_gradient(&w, &mut grad);
            if !loss.is_finite() {
                return finish(w, loss, history, iter, StopReason::NonFinite);
            }
            history.push(loss);
            let r_old = std::mem::replace(&mut r, grad.iter().map(|g| -g).collect());
            lambda_bar = 0.0;
            success = true;
            accepted += 1;

            if accepted.is_multiple_of(n) {
                p.copy_from_slice(&r);
            } else {
                let beta = (dot(&r, &r) - dot(&r, &r_old)) / mu;
                for (pi, ri) in p.iter_mut().zip(&r) {
                    *pi = ri + beta * *pi;
                }
            }
            if comparison >= 0.75 {
                lambda *= 0.25;
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }

        if comparison < 0.25 {
            lambda += delta * (1.0 - comparison) / p2;
        }

        if loss <= opts.target {
            return finish(w, loss, history, iter, StopReason::TargetReached);
        }
        if dot(&r, &r).sqrt() < opts.gradient_tolerance {
            return finish(w, loss, history, iter, StopReason::GradientVanished);
        }
    }
    finish(w, loss, history, opts.max_iterations, StopReason::MaxIterations)
}
