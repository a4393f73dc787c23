//! BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop once the objective drops below this value.
    pub f_target: f64,
    /// Stop once the largest gradient component drops below this value.
    pub gtol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions { max_iter: 2000, f_target: f64::NEG_INFINITY, gtol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: DVector<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Minimizes `fg`, which returns the objective and its gradient.
pub fn bfgs<F>(mut fg: F, x0: DVector<f64>, opts: &BfgsOptions) -> BfgsResult
where
    F: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut f, mut g) = fg(&x);
    let mut evals = 1;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut first = true;
    let mut iter = 0;
    while iter < opts.max_iter {
        if f <= opts.f_target || g.amax() <= opts.gtol || !f.is_finite() {
            break;
        }
        let mut p = -(&h * &g);
        let mut slope = p.dot(&g);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            p = -g.clone();
            slope = -g.norm_squared();
        }
        let alpha0 = if first { (1.0 / g.amax()).min(1.0) } else { 1.0 };
        let ls = line_search(&mut fg, &x, f, slope, &p, alpha0);
        evals += ls.evals;
        let Some((alpha, fnew, gnew)) = ls.result else {
            if first {
                break;
            }
            // Retry once from steepest descent with a fresh curvature model.
            h = DMatrix::identity(n, n);
            first = true;
            iter += 1;
            continue;
        };
        let s = &p * alpha;
        let y = &gnew - &g;
        let sy = s.dot(&y);
        let progress = f - fnew;
        x += &s;
        f = fnew;
        g = gnew;
        iter += 1;
        if sy > 1e-300 {
            if first {
                let yy = y.dot(&y);
                h = DMatrix::identity(n, n) * (sy / yy);
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            h += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        first = false;
        if progress.abs() <= f64::EPSILON * f.abs() && s.amax() <= f64::EPSILON * x.amax().max(1.0) {
            break;
        }
    }
    let grad_inf = g.amax();
    BfgsResult { x, f, grad_inf, iterations: iter, evaluations: evals }
}

struct LineSearch {
    result: Option<(f64, f64, DVector<f64>)>,
    evals: usize,
}

fn line_search<F>(fg: &mut F, x: &DVector<f64>, f0: f64, d0: f64, p: &DVector<f64>, alpha0: f64) -> LineSearch
where
    F: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
{
    let mut evals = 0;
    let mut eval = |a: f64, evals: &mut usize| {
        *evals += 1;
        let xa = x + p * a;
        let (fa, ga) = fg(&xa);
        let da = ga.dot(p);
        (fa, ga, da)
    };
    let (mut a_prev, mut f_prev, mut d_prev) = (0.0, f0, d0);
    let mut a = alpha0;
    for k in 0..30 {
        let (fa, ga, da) = eval(a, &mut evals);
        if !fa.is_finite() || fa > f0 + C1 * a * d0 || (k > 0 && fa >= f_prev) {
            let r = zoom(&mut eval, &mut evals, f0, d0, (a_prev, f_prev, d_prev), (a, fa, da));
            return LineSearch { result: r, evals };
        }
        if da.abs() <= -C2 * d0 {
            return LineSearch { result: Some((a, fa, ga)), evals };
        }
        if da >= 0.0 {
            let r = zoom(&mut eval, &mut evals, f0, d0, (a, fa, da), (a_prev, f_prev, d_prev));
            return LineSearch { result: r, evals };
        }
        a_prev = a;
        f_prev = fa;
        d_prev = da;
        a *= 2.0;
    }
    LineSearch { result: None, evals }
}

type Point = (f64, f64, f64);

fn zoom<E>(eval: &mut E, evals: &mut usize, f0: f64, d0: f64, mut lo: Point, mut hi: Point) -> Option<(f64, f64, DVector<f64>)>
where
    E: FnMut(f64, &mut usize) -> (f64, DVector<f64>, f64),
{
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for _ in 0..40 {
        let a = cubic_min(lo, hi).unwrap_or(0.5 * (lo.0 + hi.0));
        let (fa, ga, da) = eval(a, evals);
        if fa.is_finite() && fa < f0 && best.as_ref().is_none_or(|b| fa < b.1) {
            best = Some((a, fa, ga.clone()));
        }
        if !fa.is_finite() || fa > f0 + C1 * a * d0 || fa >= lo.1 {
            hi = (a, fa, da);
        } else {
            if da.abs() <= -C2 * d0 {
                return Some((a, fa, ga));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, da);
        }
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1e-300) {
            break;
        }
    }
    best
}

/// Minimizer of the cubic interpolating two points with derivatives, if it lies
/// safely inside the bracket.
fn cubic_min(a: Point, b: Point) -> Option<f64> {
    let (x0, f0, d0) = a;
    let (x1, f1, d1) = b;
    if !f1.is_finite() {
        return None;
    }
    let d1_ = d0 + d1 - 3.0 * (f0 - f1) / (x0 - x1);
    let disc = d1_ * d1_ - d0 * d1;
    if disc < 0.0 {
        return None;
    }
    let d2 = (x1 - x0).signum() * disc.sqrt();
    let x = x1 - (x1 - x0) * (d1 + d2 - d1_) / (d1 - d0 + 2.0 * d2);
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    let margin = 0.1 * (hi - lo);
    if x.is_finite() && x > lo + margin && x < hi - margin {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rosenbrock(x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = DVector::from_vec(vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)]);
        (f, g)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let opts = BfgsOptions { gtol: 1e-10, ..Default::default() };
        let r = bfgs(rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), &opts);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8, "{:?}", r.x);
    }

    proptest! {
        #[test]
        fn solves_convex_quadratics(diag in proptest::collection::vec(0.1f64..10.0, 4), b in proptest::collection::vec(-5.0f64..5.0, 4)) {
            let a = DMatrix::from_diagonal(&DVector::from_vec(diag));
            let bv = DVector::from_vec(b);
            let f = |x: &DVector<f64>| {
                let ax = &a * x;
                (0.5 * x.dot(&ax) - bv.dot(x), ax - &bv)
            };
            let r = bfgs(f, DVector::zeros(4), &BfgsOptions { gtol: 1e-12, ..Default::default() });
            let exact = a.clone().try_inverse().unwrap() * &bv;
            prop_assert!((r.x - exact).amax() < 1e-6);
        }
    }
}
