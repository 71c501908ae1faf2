//! BFGS quasi-Newton minimizer with finite-difference gradients.
//!
//! Sized for the handful of parameters the diagonal CAW fit needs; gradients
//! come from central differences with a step of `1e-6 * (1 + |x_k|)` per
//! coordinate. Objectives may return non-finite values to mark infeasible
//! points; the line search backs away from them.

#[derive(Debug, Clone)]
pub struct BfgsOptions {
    /// Stop when the gradient infinity norm falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-5, max_iters: 500, fd_step: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Central finite-difference gradient.
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        let h = rel_step * (1.0 + x[k].abs());
        probe[k] = x[k] + h;
        let fp = f(&probe);
        probe[k] = x[k] - h;
        let fm = f(&probe);
        probe[k] = x[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    g
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Minimize `f` starting at `x0`.
pub fn bfgs<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = fd_gradient(&mut f, &x, opts.fd_step);

    // inverse Hessian approximation
    let mut h_inv = vec![0.0; n * n];
    for i in 0..n {
        h_inv[i * n + i] = 1.0;
    }

    let mut best_x = x.clone();
    let mut best_f = fx;
    let mut iterations = 0;
    let mut converged = inf_norm(&g) < opts.grad_tol;
    let mut first_update = true;

    while !converged && iterations < opts.max_iters {
        iterations += 1;

        // direction d = -H g
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += h_inv[i * n + j] * g[j];
            }
            d[i] = -acc;
        }
        let mut slope: f64 = d.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            // not a descent direction; reset to steepest descent
            for i in 0..n {
                for j in 0..n {
                    h_inv[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            for i in 0..n {
                d[i] = -g[i];
            }
            slope = -g.iter().map(|v| v * v).sum::<f64>();
            first_update = true;
        }

        // backtracking Armijo line search
        let mut step = 1.0;
        let c1 = 1e-4;
        let mut x_new = x.clone();
        let mut f_new = f64::INFINITY;
        let mut accepted = false;
        for _ in 0..50 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            f_new = f(&x_new);
            if f_new.is_finite() && f_new <= fx + c1 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // line search failed; gradient is likely noise-dominated
        }

        let g_new = fd_gradient(&mut f, &x_new, opts.fd_step);
        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy: f64 = s.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();

        if sy > 1e-12 * yy.sqrt() * s.iter().map(|v| v * v).sum::<f64>().sqrt() {
            if first_update {
                // scale the initial inverse Hessian (Nocedal & Wright eq. 6.20)
                let gamma = sy / yy.max(1e-300);
                for i in 0..n {
                    for j in 0..n {
                        h_inv[i * n + j] = if i == j { gamma } else { 0.0 };
                    }
                }
                first_update = false;
            }
            // BFGS inverse update: H <- (I - r s y^T) H (I - r y s^T) + r s s^T
            let r = 1.0 / sy;
            let mut hy = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += h_inv[i * n + j] * y[j];
                }
                hy[i] = acc;
            }
            let yhy: f64 = y.iter().zip(hy.iter()).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    let v = h_inv[i * n + j] - r * (s[i] * hy[j] + hy[i] * s[j])
                        + r * r * yhy * s[i] * s[j]
                        + r * s[i] * s[j];
                    h_inv[i * n + j] = v;
                }
            }
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        if fx < best_f {
            best_f = fx;
            best_x = x.clone();
        }
        converged = inf_norm(&g) < opts.grad_tol;
    }

    BfgsResult {
        grad_inf_norm: inf_norm(&g),
        x: best_x,
        value: best_f,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let res = bfgs(
            |x| x.iter().map(|v| v * v).sum::<f64>(),
            &[3.0, -2.0, 1.0],
            &BfgsOptions::default(),
        );
        assert!(res.converged);
        assert!(res.value < 1e-10, "value {}", res.value);
    }

    #[test]
    fn rosenbrock() {
        let res = bfgs(
            |x| {
                let a = 1.0 - x[0];
                let b = x[1] - x[0] * x[0];
                a * a + 100.0 * b * b
            },
            &[-1.2, 1.0],
            &BfgsOptions { grad_tol: 1e-6, ..Default::default() },
        );
        assert!((res.x[0] - 1.0).abs() < 1e-4, "x = {:?}", res.x);
        assert!((res.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        // objective is infinite left of x = 0.5; minimum at x = 1
        let res = bfgs(
            |x| {
                if x[0] < 0.5 {
                    f64::INFINITY
                } else {
                    (x[0] - 1.0) * (x[0] - 1.0)
                }
            },
            &[2.0],
            &BfgsOptions::default(),
        );
        assert!((res.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn already_converged_input() {
        let res = bfgs(|x| x[0] * x[0], &[0.0], &BfgsOptions::default());
        assert!(res.converged);
        assert_eq!(res.iterations, 0);
    }
}
