//! Least-squares machinery shared by the curve families.
//!
//! Fitting runs in two stages: a closed-form linear solve in a transformed
//! space gives the starting point, and a damped Gauss-Newton loop refines it
//! against the linear-space SSE, which is the objective the metrics are
//! defined on.

/// Maximum Gauss-Newton iterations before giving up.
pub(crate) const MAX_ITERATIONS: usize = 200;
/// Maximum step halvings inside one iteration.
pub(crate) const MAX_HALVINGS: usize = 20;
/// Relative SSE improvement below which the refinement stops.
pub(crate) const RELATIVE_SSE_TOL: f64 = 1e-10;

pub(crate) struct Refined<const P: usize> {
    pub params: [f64; P],
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solve the dense system `a · x = b` in place by Gaussian elimination with
/// partial pivoting. `a` is row-major n×n. Returns `None` when singular.
pub(crate) fn solve_dense(n: usize, a: &mut [f64], b: &mut [f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[piv * n + col].abs() {
                piv = row;
            }
        }
        let lead = a[piv * n + col];
        if lead == 0.0 || !lead.is_finite() {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Ordinary least squares for `y ≈ Σ βⱼ φⱼ(x)` via the normal equations.
pub(crate) fn linear_least_squares<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    basis: impl Fn(f64) -> [f64; P],
) -> Option<[f64; P]> {
    let mut ata = vec![0.0; P * P];
    let mut atb = vec![0.0; P];
    for (&x, &y) in xs.iter().zip(ys) {
        let row = basis(x);
        for i in 0..P {
            atb[i] += row[i] * y;
            for j in 0..P {
                ata[i * P + j] += row[i] * row[j];
            }
        }
    }
    let sol = solve_dense(P, &mut ata, &mut atb)?;
    let mut out = [0.0; P];
    out.copy_from_slice(&sol);
    Some(out)
}

/// Damped Gauss-Newton refinement of `start` against Σ(yᵢ − model(p, xᵢ))².
///
/// A step is accepted only if it lowers the SSE; otherwise it is halved up
/// to [`MAX_HALVINGS`] times. The loop stops when the relative SSE change
/// drops below [`RELATIVE_SSE_TOL`], when no damped step makes progress, or
/// after [`MAX_ITERATIONS`] (reported as `converged = false`). The returned
/// SSE is never above the SSE of `start`.
pub(crate) fn gauss_newton<const P: usize>(
    start: [f64; P],
    xs: &[f64],
    ys: &[f64],
    model: impl Fn(&[f64; P], f64) -> f64,
    gradient: impl Fn(&[f64; P], f64) -> [f64; P],
    feasible: impl Fn(&[f64; P]) -> bool,
) -> Refined<P> {
    let sse_of = |p: &[f64; P]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - model(p, x);
                r * r
            })
            .sum()
    };

    let mut params = start;
    let mut sse = sse_of(&params);
    if !sse.is_finite() {
        return Refined {
            params,
            sse,
            iterations: 0,
            converged: false,
        };
    }

    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = vec![0.0; P * P];
        let mut jtr = vec![0.0; P];
        for (&x, &y) in xs.iter().zip(ys) {
            let g = gradient(&params, x);
            let r = y - model(&params, x);
            for i in 0..P {
                jtr[i] += g[i] * r;
                for j in 0..P {
                    jtj[i * P + j] += g[i] * g[j];
                }
            }
        }
        let Some(delta) = solve_dense(P, &mut jtj, &mut jtr) else {
            // Flat or degenerate residual surface: nothing left to refine.
            converged = true;
            break;
        };

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let mut cand = params;
            for i in 0..P {
                cand[i] += scale * delta[i];
            }
            if feasible(&cand) {
                let cand_sse = sse_of(&cand);
                if cand_sse.is_finite() && cand_sse < sse {
                    let rel = (sse - cand_sse) / sse.max(f64::MIN_POSITIVE);
                    params = cand;
                    sse = cand_sse;
                    accepted = true;
                    if rel < RELATIVE_SSE_TOL {
                        converged = true;
                    }
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            // Stalled: no damped step decreases the SSE any further.
            converged = true;
            break;
        }
        if converged || sse == 0.0 {
            converged = true;
            break;
        }
    }

    Refined {
        params,
        sse,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_three_by_three() {
        // x = (1, -2, 3)
        let mut a = vec![2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let mut b = vec![-3.0, 5.0, 2.0];
        let x = solve_dense(3, &mut a, &mut b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] + 2.0).abs() < 1e-12);
        assert!((x[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_returns_none() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_dense(2, &mut a, &mut b).is_none());
    }

    #[test]
    fn ols_recovers_exact_quadratic() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x + 0.25 * x * x).collect();
        let beta = linear_least_squares(&xs, &ys, |x| [1.0, x, x * x]).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-9);
        assert!((beta[1] + 0.5).abs() < 1e-9);
        assert!((beta[2] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn gauss_newton_never_increases_sse() {
        let xs: Vec<f64> = (1..=30).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * (-0.1 * x).exp() + 0.05).collect();
        let model = |p: &[f64; 2], x: f64| p[0] * (p[1] * x).exp();
        let grad = |p: &[f64; 2], x: f64| {
            let f = p[0] * (p[1] * x).exp();
            [f / p[0], f * x]
        };
        let start = [1.0, -0.5];
        let init_sse: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let r = y - model(&start, x);
                r * r
            })
            .sum();
        let refined = gauss_newton(start, &xs, &ys, model, grad, |p| p[0] > 0.0);
        assert!(refined.sse <= init_sse);
        assert!(refined.iterations >= 1);
    }

    #[test]
    fn gauss_newton_converges_on_exact_model() {
        let xs: Vec<f64> = (1..=25).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * (-0.3 * x).exp()).collect();
        let model = |p: &[f64; 2], x: f64| p[0] * (p[1] * x).exp();
        let grad = |p: &[f64; 2], x: f64| {
            let f = p[0] * (p[1] * x).exp();
            [f / p[0], f * x]
        };
        let refined = gauss_newton([1.5, -0.2], &xs, &ys, model, grad, |p| p[0] > 0.0);
        assert!(refined.converged);
        assert!((refined.params[0] - 2.0).abs() < 1e-8);
        assert!((refined.params[1] + 0.3).abs() < 1e-8);
    }
}
