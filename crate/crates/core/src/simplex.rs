//! Nelder-Mead reflection/expansion/contraction simplex minimizer.
//!
//! Non-finite objective values (used by callers to mark infeasible points)
//! are treated as `+inf`, so the simplex simply retreats from them.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Maximum number of simplex iterations.
    pub max_iters: usize,
    /// Hard cap on objective evaluations, including the initial simplex.
    pub max_evals: u64,
    /// Shrink coefficient in `(0, 1)`.
    pub shrink: f64,
    /// Stop once the spread of objective values and the simplex diameter
    /// both fall below these.
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            max_evals: u64::MAX,
            shrink: 0.5,
            f_tol: 1e-15,
            x_tol: 1e-13,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: u64,
    pub iterations: usize,
    /// Best value after each completed iteration.
    pub history: Vec<f64>,
}

struct Counted<F> {
    f: F,
    evals: u64,
    cap: u64,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.cap
    }

    fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }
}

fn order(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> std::cmp::Ordering {
    a.1.total_cmp(&b.1).then_with(|| {
        a.0.iter()
            .zip(&b.0)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

fn affine(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    base.iter()
        .zip(toward)
        .map(|(b, d)| b + t * (d - b))
        .collect()
}

/// Minimizes `f` from `x0`, with the initial simplex `x0, x0 + steps[i] e_i`.
pub fn minimize<F>(f: F, x0: &[f64], steps: &[f64], opts: &SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), steps.len());
    let dim = x0.len();
    let mut obj = Counted {
        f,
        evals: 0,
        cap: opts.max_evals.max(1),
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = obj.call(x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..dim {
        if obj.exhausted() {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let fx = obj.call(&x);
        simplex.push((x, fx));
    }
    simplex.sort_by(order);

    let mut history = Vec::new();
    let mut iterations = 0;
    if simplex.len() < dim + 1 {
        let (x, f) = simplex.swap_remove(0);
        return SimplexOutcome {
            x,
            f,
            evaluations: obj.evals,
            iterations,
            history,
        };
    }

    while iterations < opts.max_iters && !obj.exhausted() {
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = if worst.is_finite() {
            worst - best
        } else {
            f64::INFINITY
        };
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(p, q)| (p - q).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst_x = simplex[dim].0.clone();

        let reflected = affine(&centroid, &worst_x, -REFLECT);
        let fr = obj.call(&reflected);

        if fr < simplex[0].1 {
            if obj.exhausted() {
                simplex[dim] = (reflected, fr);
            } else {
                let expanded = affine(&centroid, &worst_x, -EXPAND);
                let fe = obj.call(&expanded);
                simplex[dim] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
            }
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else if !obj.exhausted() {
            // outside contraction if the reflection beat the worst point,
            // inside contraction otherwise
            let (candidate, threshold) = if fr < simplex[dim].1 {
                (affine(&centroid, &reflected, CONTRACT), fr)
            } else {
                (affine(&centroid, &worst_x, CONTRACT), simplex[dim].1)
            };
            let fc = obj.call(&candidate);
            if fc < threshold || (fc == threshold && fc.is_finite()) {
                simplex[dim] = (candidate, fc);
            } else {
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    if obj.exhausted() {
                        break;
                    }
                    let x = affine(&best_x, &entry.0, opts.shrink);
                    let fx = obj.call(&x);
                    *entry = (x, fx);
                }
            }
        }
        simplex.sort_by(order);
        iterations += 1;
        history.push(simplex[0].1);
    }

    let (x, f) = simplex.swap_remove(0);
    SimplexOutcome {
        x,
        f,
        evaluations: obj.evals,
        iterations,
        history,
    }
}
