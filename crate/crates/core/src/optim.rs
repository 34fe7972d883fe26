//! Derivative-free Nelder-Mead minimization.

/// Outcome of a Nelder-Mead run.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` from `start` with an axis-aligned initial simplex of size
/// `step`. Stops when the spread of simplex values drops below `ftol` or
/// after `max_iters` iterations.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    ftol: f64,
    max_iters: usize,
) -> Minimum {
    let dim = start.len();
    if dim == 0 {
        return Minimum {
            point: vec![],
            value: f(start),
            iterations: 0,
        };
    }
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    simplex.push((f(start), start.to_vec()));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push((f(&p), p));
    }

    let mut iterations = 0;
    while iterations < max_iters {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        if simplex[dim].0 - simplex[0].0 < ftol {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (_, p) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.1)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].0 {
            let expanded = along(2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr {
                (fe, expanded)
            } else {
                (fr, reflected)
            };
            continue;
        }
        if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflected);
            continue;
        }
        let (contracted, fc) = if fr < worst.0 {
            let p = along(0.5);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(-0.5);
            let v = f(&p);
            (p, v)
        };
        if fc < worst.0.min(fr) {
            simplex[dim] = (fc, contracted);
            continue;
        }
        let best = simplex[0].1.clone();
        for entry in simplex.iter_mut().skip(1) {
            let p: Vec<f64> = best
                .iter()
                .zip(&entry.1)
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            *entry = (f(&p), p);
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (value, point) = simplex.swap_remove(0);
    Minimum {
        point,
        value,
        iterations,
    }
}
