//! Derivative-free local search over row-stochastic matrices.
//!
//! Stochastic matrices are parameterized by unconstrained logits with a
//! row-wise softmax, so a plain Nelder–Mead simplex can move freely.

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Stop when the best value improves by less than `stall_tol` over this
    /// many iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            stall_window: 50,
            stall_tol: 1e-10,
            initial_step: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

impl NelderMead {
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = f(&x);
            simplex.push((x, v));
        }
        let order = |s: &mut Vec<(Vec<f64>, f64)>| {
            s.sort_by(|a, b| a.1.total_cmp(&b.1));
        };
        order(&mut simplex);

        let mut history = vec![simplex[0].1];
        let mut iterations = 0;
        while iterations < self.max_iters && n > 0 {
            iterations += 1;
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };
            let xr = along(-1.0);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let x = along(-0.5);
                    let v = f(&x);
                    (x, v)
                } else {
                    let x = along(0.5);
                    let v = f(&x);
                    (x, v)
                };
                if fc < worst.1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for (x, v) in simplex.iter_mut().skip(1) {
                        for (xi, bi) in x.iter_mut().zip(&best) {
                            *xi = bi + 0.5 * (*xi - bi);
                        }
                        *v = f(x);
                    }
                }
            }
            order(&mut simplex);
            history.push(simplex[0].1);
            if history.len() > self.stall_window {
                let old = history[history.len() - 1 - self.stall_window];
                if old - simplex[0].1 < self.stall_tol {
                    break;
                }
            }
        }
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
        }
    }
}

/// Row-wise softmax of a `rows x cols` logit matrix.
pub fn softmax_rows(logits: &[f64], cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for row in logits.chunks(cols) {
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = row.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = e.iter().sum();
        out.extend(e.iter().map(|v| v / s));
    }
    out
}

/// Logits whose softmax approximates a stochastic matrix; zero entries are
/// floored so the start stays in the interior.
pub fn logits_of(matrix: &[f64], floor: f64) -> Vec<f64> {
    matrix.iter().map(|&p| p.max(floor).ln()).collect()
}
