use super::FitConfig;

/// Result of a simplex minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    /// Simplex diameter fell below the tolerance before the iteration cap.
    pub converged: bool,
}

/// Nelder–Mead downhill simplex with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// The initial simplex is `start` plus `step` along each axis. Non-finite
/// objective values are treated as `+∞`, which lets callers encode a feasible
/// region. Stops when the largest distance from the best vertex to any other
/// vertex is below `tol`.
pub fn nelder_mead<const N: usize, F>(
    f: F,
    start: [f64; N],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    let eval = |x: &[f64; N]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, eval(&start)));
    for i in 0..N {
        let mut x = start;
        x[i] += step;
        let mut v = eval(&x);
        if !v.is_finite() {
            // try the other direction before giving up on this axis
            x[i] = start[i] - step;
            v = eval(&x);
        }
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &best))
            .fold(0.0, f64::max);
        if diameter < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / N as f64;
            }
        }
        let worst = simplex[N];
        let toward = |t: f64| -> [f64; N] {
            let mut out = [0.0; N];
            for i in 0..N {
                out[i] = centroid[i] + t * (worst.0[i] - centroid[i]);
            }
            out
        };

        let xr = toward(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = toward(-2.0);
            let fe = eval(&xe);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = toward(-0.5);
            (xc, eval(&xc))
        } else {
            let xc = toward(0.5);
            (xc, eval(&xc))
        };
        if fc < worst.1.min(fr) {
            simplex[N] = (xc, fc);
            continue;
        }
        let (x0, _) = simplex[0];
        for vertex in simplex.iter_mut().skip(1) {
            for (v, x) in vertex.0.iter_mut().zip(&x0) {
                *v = x + 0.5 * (*v - x);
            }
            vertex.1 = eval(&vertex.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum {
        x: simplex[0].0,
        value: simplex[0].1,
        iterations,
        converged,
    }
}

fn dist<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Runs the simplex from each start and keeps the best objective, breaking
/// ties by lexicographic order of the point. The winner is polished with one
/// restart from a fresh simplex.
pub(crate) fn multi_start<F>(f: &F, starts: &[[f64; 2]], config: &FitConfig) -> Option<Minimum<2>>
where
    F: Fn(&[f64; 2]) -> f64,
{
    let mut best: Option<Minimum<2>> = None;
    for start in starts {
        if !f(start).is_finite() {
            continue;
        }
        let run = nelder_mead(f, *start, 0.5, config.tol, config.max_iter);
        best = Some(match best {
            None => run,
            Some(b) if better(&run, &b) => run,
            Some(b) => b,
        });
    }
    let first = best?;
    let polish = nelder_mead(f, first.x, 0.05, config.tol, config.max_iter);
    let iterations = first.iterations + polish.iterations;
    let winner = if polish.value <= first.value {
        polish
    } else {
        first
    };
    Some(Minimum {
        iterations,
        converged: first.converged && polish.converged,
        ..winner
    })
}

fn better(a: &Minimum<2>, b: &Minimum<2>) -> bool {
    match a.value.total_cmp(&b.value) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            (a.x[0], a.x[1]).partial_cmp(&(b.x[0], b.x[1])) == Some(std::cmp::Ordering::Less)
        }
    }
}
