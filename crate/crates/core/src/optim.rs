//! Derivative-free simplex minimization (Nelder-Mead).

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Stop after this many iterations.
    pub max_iters: usize,
    /// Stop once the loss spread across the simplex falls below this.
    pub tol: f64,
    /// Initial step along each coordinate when building the simplex.
    pub step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol: 1e-10,
            step: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimize `f` starting from `x0`. Non-finite objective values are treated
/// as +inf, so the simplex walks away from invalid regions. Fully
/// deterministic for a given starting point.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim >= 1, "need at least one dimension");
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        if values[worst] - values[best] < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        // centroid of all points but the worst
        let mut centroid = vec![0.0; dim];
        for &idx in order.iter().take(dim) {
            for (c, v) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += v;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let blend = |from: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + coeff * (c - x))
                .collect()
        };

        let reflected = blend(&simplex[worst], REFLECT);
        let reflected_value = eval(&reflected);

        if reflected_value < values[best] {
            let expanded = blend(&simplex[worst], EXPAND);
            let expanded_value = eval(&expanded);
            if expanded_value < reflected_value {
                simplex[worst] = expanded;
                values[worst] = expanded_value;
            } else {
                simplex[worst] = reflected;
                values[worst] = reflected_value;
            }
            continue;
        }
        if reflected_value < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = reflected_value;
            continue;
        }

        let contracted = blend(&simplex[worst], -CONTRACT);
        let contracted_value = eval(&contracted);
        if contracted_value < values[worst] {
            simplex[worst] = contracted;
            values[worst] = contracted_value;
            continue;
        }

        // shrink toward the best point
        let anchor = simplex[best].clone();
        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + SHRINK * (*x - a);
            }
            values[idx] = eval(&simplex[idx]);
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i].total_cmp(&values[best]).is_lt() {
            best = i;
        }
    }
    NelderMeadResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 3.0).powi(2) + (x[1] + 1.5).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-4, "{:?}", r.x);
        assert!((r.x[1] + 1.5).abs() < 1e-4, "{:?}", r.x);
        assert!(r.value < 1e-8);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(
            rosenbrock,
            &[-1.2, 1.0],
            &NelderMeadOptions {
                max_iters: 5000,
                ..Default::default()
            },
        );
        assert!((r.x[0] - 1.0).abs() < 1e-3, "{:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-3, "{:?}", r.x);
    }

    #[test]
    fn walks_out_of_invalid_regions() {
        // objective undefined for x < 0; minimum at x = 2
        let r = nelder_mead(
            |x| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    (x[0] - 2.0).powi(2)
                }
            },
            &[-0.5, 0.0],
            &NelderMeadOptions::default(),
        );
        assert!((r.x[0] - 2.0).abs() < 1e-3, "{:?}", r.x);
    }

    #[test]
    fn deterministic() {
        let run = || {
            nelder_mead(
                |x| x[0].sin() + x[1].cos() + 0.01 * (x[0] * x[0] + x[1] * x[1]),
                &[1.0, 1.0],
                &NelderMeadOptions::default(),
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn respects_iteration_cap() {
        let r = nelder_mead(
            |x| (x[0] - 1e6).powi(2),
            &[0.0],
            &NelderMeadOptions {
                max_iters: 3,
                ..Default::default()
            },
        );
        assert_eq!(r.iterations, 3);
        assert!(!r.converged);
    }
}
