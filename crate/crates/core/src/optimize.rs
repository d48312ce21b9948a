//! Derivative-free minimization in two variables (Nelder–Mead simplex).

use crate::Vec2;

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Converged when the spread of objective values over the simplex and
    /// its diameter both fall below this.
    pub tol: f64,
    /// Restarts from the best vertex after a converged pass; the result is
    /// accepted once a restart no longer improves by more than `tol`.
    pub max_restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-9,
            max_restarts: 8,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Minimum {
    pub x: Vec2,
    pub value: f64,
    pub converged: bool,
}

/// Minimize `f` starting from `x0` with an initial simplex of size `step`.
pub fn nelder_mead<F>(f: F, x0: Vec2, step: f64, opts: SimplexOptions) -> Minimum
where
    F: Fn(Vec2) -> f64,
{
    let mut best = Minimum {
        x: x0,
        value: f(x0),
        converged: false,
    };
    let mut size = step;
    for _ in 0..=opts.max_restarts {
        let (x, value, pass_converged) = simplex_pass(&f, best.x, size, opts);
        let improvement = best.value - value;
        if value < best.value {
            best.x = x;
            best.value = value;
        }
        if pass_converged && improvement.abs() <= opts.tol {
            best.converged = true;
            return best;
        }
        size = (size * 0.5).max(10.0 * opts.tol);
    }
    best
}

fn simplex_pass<F>(f: &F, x0: Vec2, step: f64, opts: SimplexOptions) -> (Vec2, f64, bool)
where
    F: Fn(Vec2) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let mut pts = [x0, x0 + Vec2::new(step, 0.0), x0 + Vec2::new(0.0, step)];
    let mut vals = pts.map(f);
    for _ in 0..opts.max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);

        let spread = vals[2] - vals[0];
        let diameter = (pts[1] - pts[0]).norm().max((pts[2] - pts[0]).norm());
        if spread <= opts.tol && diameter <= opts.tol.sqrt() {
            return (pts[0], vals[0], true);
        }

        let centroid = 0.5 * (pts[0] + pts[1]);
        let reflected = centroid + REFLECT * (centroid - pts[2]);
        let fr = f(reflected);
        if fr < vals[0] {
            let expanded = centroid + EXPAND * (reflected - centroid);
            let fe = f(expanded);
            if fe < fr {
                pts[2] = expanded;
                vals[2] = fe;
            } else {
                pts[2] = reflected;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = reflected;
            vals[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[2] {
            let c = centroid + CONTRACT * (reflected - centroid);
            (c, f(c))
        } else {
            let c = centroid + CONTRACT * (pts[2] - centroid);
            (c, f(c))
        };
        if fc < vals[2].min(fr) {
            pts[2] = contracted;
            vals[2] = fc;
            continue;
        }
        for i in 1..3 {
            pts[i] = pts[0] + SHRINK * (pts[i] - pts[0]);
            vals[i] = f(pts[i]);
        }
    }
    let i = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    (pts[i], vals[i], false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_quadratic() {
        let m = nelder_mead(
            |x| (x.x - 1.0).powi(2) + 3.0 * (x.y + 2.0).powi(2),
            Vec2::zeros(),
            0.5,
            SimplexOptions::default(),
        );
        assert!(m.converged);
        assert!((m.x - Vec2::new(1.0, -2.0)).norm() < 1e-4);
        assert!(m.value < 1e-8);
    }

    #[test]
    fn nonsmooth_max_of_affine() {
        // min over x of max(|x|_1-like pieces): optimum at the origin, value 0.
        let m = nelder_mead(
            |x| (x.x + 2.0 * x.y).abs().max((x.x - x.y).abs()),
            Vec2::new(0.7, -0.3),
            0.2,
            SimplexOptions::default(),
        );
        assert!(m.value < 1e-8, "value {}", m.value);
    }
}
