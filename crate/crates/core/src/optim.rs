//! Derivative-free coordinate search with a three-point quadratic fit per axis.

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_sweeps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            min_step: 1e-9,
            max_sweeps: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub value: f64,
    pub converged: bool,
}

/// Minimizes `f` starting from `x` (updated in place).
///
/// `converged` is true when every axis step shrank below `min_step`.
pub fn coordinate_minimize(
    x: &mut [f64],
    mut f: impl FnMut(&[f64]) -> f64,
    opts: &SearchOptions,
) -> SearchOutcome {
    let mut steps = vec![opts.initial_step; x.len()];
    let mut current = f(x);
    for _ in 0..opts.max_sweeps {
        for i in 0..x.len() {
            let h = steps[i];
            let x0 = x[i];
            x[i] = x0 + h;
            let plus = f(x);
            x[i] = x0 - h;
            let minus = f(x);
            let mut best = (current, x0);
            if plus < best.0 {
                best = (plus, x0 + h);
            }
            if minus < best.0 {
                best = (minus, x0 - h);
            }
            let curv = plus + minus - 2.0 * current;
            if curv > 0.0 {
                let delta = (0.5 * h * (minus - plus) / curv).clamp(-4.0 * h, 4.0 * h);
                x[i] = x0 + delta;
                let fit = f(x);
                if fit < best.0 {
                    best = (fit, x0 + delta);
                }
            }
            x[i] = best.1;
            if best.0 < current {
                current = best.0;
                steps[i] = (1.5 * (best.1 - x0).abs()).max(0.5 * h);
            } else {
                steps[i] = 0.5 * h;
            }
        }
        if steps.iter().all(|&s| s < opts.min_step) {
            return SearchOutcome {
                value: current,
                converged: true,
            };
        }
    }
    SearchOutcome {
        value: current,
        converged: false,
    }
}
