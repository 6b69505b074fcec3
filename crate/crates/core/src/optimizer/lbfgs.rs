//! Limited-memory BFGS with a strong-Wolfe line search.
//!
//! Near a minimum the energy changes fall below double precision long before
//! the gradient reaches `1e-9`, so the sufficient-decrease test also accepts
//! steps whose value is within `f_noise` of the start when the curvature
//! condition holds (the approximate-Wolfe test).

use std::collections::VecDeque;

use crate::linalg::{axpy, dot, max_abs};

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub grad_tolerance: f64,
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_line_evals: usize,
    /// Relative energy noise floor used by the approximate-Wolfe test.
    pub f_noise: f64,
    /// Largest step length in any single amplitude.
    pub max_step: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 20,
            grad_tolerance: 1e-9,
            max_iterations: 2000,
            c1: 1e-4,
            c2: 0.9,
            max_line_evals: 40,
            f_noise: 1e-13,
            max_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    IterationLimit,
    /// The line search could not make further progress.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

impl LbfgsResult {
    pub fn grad_norm(&self) -> f64 {
        max_abs(&self.grad)
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

struct Point {
    alpha: f64,
    f: f64,
    dphi: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

/// Minimises `f` from `x0`. `f(x, g)` returns the value and writes the gradient.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &LbfgsOptions) -> LbfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut g0 = vec![0.0; x0.len()];
    let f0 = f(x0, &mut g0);
    let mut r = run(&mut f, x0, f0, g0.clone(), opts);
    r.evaluations += 1;
    // noise-level acceptances must not leave the result above the start
    if r.f > f0 {
        r.termination = if max_abs(&g0) <= opts.grad_tolerance {
            Termination::Converged
        } else {
            Termination::Stalled
        };
        r.x = x0.to_vec();
        r.f = f0;
        r.grad = g0;
    }
    r
}

fn run<F>(f: &mut F, x0: &[f64], fx: f64, g: Vec<f64>, opts: &LbfgsOptions) -> LbfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = g;
    let mut fx = fx;
    let mut evaluations = 0;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut stalls = 0;

    if n == 0 || max_abs(&g) <= opts.grad_tolerance {
        return LbfgsResult {
            x,
            f: fx,
            grad: g,
            iterations: 0,
            evaluations,
            termination: Termination::Converged,
        };
    }

    for iter in 0..opts.max_iterations {
        let mut d = two_loop(&g, &history);
        let mut slope = dot(&d, &g);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&d, &g);
        }
        let dmax = max_abs(&d);
        let mut alpha0 = if history.is_empty() { (1.0 / dmax).min(1.0) } else { 1.0 };
        if alpha0 * dmax > opts.max_step {
            alpha0 = opts.max_step / dmax;
        }

        let accepted = line_search(f, &x, fx, slope, &d, alpha0, opts, &mut evaluations);
        match accepted {
            Some(p) => {
                let s: Vec<f64> = p.x.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = p.g.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-300 {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / sy));
                }
                let progressed = p.f < fx || p.alpha > 0.0;
                x = p.x;
                g = p.g;
                fx = p.f;
                if progressed {
                    stalls = 0;
                }
            }
            None => {
                stalls += 1;
                history.clear();
                if stalls >= 2 {
                    return LbfgsResult {
                        termination: if max_abs(&g) <= opts.grad_tolerance {
                            Termination::Converged
                        } else {
                            Termination::Stalled
                        },
                        x,
                        f: fx,
                        grad: g,
                        iterations: iter + 1,
                        evaluations,
                    };
                }
                continue;
            }
        }
        if max_abs(&g) <= opts.grad_tolerance {
            return LbfgsResult {
                x,
                f: fx,
                grad: g,
                iterations: iter + 1,
                evaluations,
                termination: Termination::Converged,
            };
        }
    }
    LbfgsResult {
        x,
        f: fx,
        grad: g,
        iterations: opts.max_iterations,
        evaluations,
        termination: Termination::IterationLimit,
    }
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        axpy(-a, y, &mut q);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        axpy(a - b, s, &mut q);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[allow(clippy::too_many_arguments)]
fn line_search<F>(
    f: &mut F,
    x: &[f64],
    f0: f64,
    slope0: f64,
    d: &[f64],
    alpha0: f64,
    opts: &LbfgsOptions,
    evaluations: &mut usize,
) -> Option<Point>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let noise = opts.f_noise * f0.abs().max(1.0);
    let mut eval = |alpha: f64, evaluations: &mut usize| -> Point {
        let mut xa = x.to_vec();
        axpy(alpha, d, &mut xa);
        let mut ga = vec![0.0; x.len()];
        let fa = f(&xa, &mut ga);
        *evaluations += 1;
        Point {
            alpha,
            f: fa,
            dphi: dot(&ga, d),
            x: xa,
            g: ga,
        }
    };
    let armijo = |p: &Point| p.f <= f0 + opts.c1 * p.alpha * slope0;
    let approx = |p: &Point| p.f <= f0 + noise && p.dphi <= (2.0 * opts.c1 - 1.0) * slope0;
    let curvature = |p: &Point| p.dphi.abs() <= -opts.c2 * slope0;
    let acceptable = |p: &Point| (armijo(p) || approx(p)) && curvature(p);
    let sufficient = |p: &Point| armijo(p) || approx(p);

    let origin = Point {
        alpha: 0.0,
        f: f0,
        dphi: slope0,
        x: x.to_vec(),
        g: Vec::new(),
    };
    let mut prev = origin;
    let mut alpha = alpha0;
    let mut budget = opts.max_line_evals;
    let mut best_sufficient: Option<Point> = None;

    let (lo, hi) = loop {
        if budget == 0 {
            return best_sufficient;
        }
        budget -= 1;
        let p = eval(alpha, evaluations);
        if !p.f.is_finite() {
            alpha *= 0.5;
            continue;
        }
        if !sufficient(&p) || (prev.alpha > 0.0 && p.f >= prev.f) {
            break (prev, p);
        }
        if curvature(&p) {
            return Some(p);
        }
        if p.dphi >= 0.0 {
            break (p, prev);
        }
        let next = alpha * 2.5;
        best_sufficient = Some(Point { g: p.g.clone(), x: p.x.clone(), ..p });
        prev = p;
        alpha = next;
    };

    // zoom between lo (sufficient decrease, lowest value) and hi
    let (mut lo, mut hi) = (lo, hi);
    while budget > 0 {
        budget -= 1;
        let a = interpolate(&lo, &hi);
        let p = eval(a, evaluations);
        if !sufficient(&p) || p.f >= lo.f {
            hi = p;
        } else {
            if curvature(&p) {
                return Some(p);
            }
            if p.dphi * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = p;
        }
        if (hi.alpha - lo.alpha).abs() < 1e-16 * lo.alpha.abs().max(1e-300) {
            break;
        }
    }
    if lo.alpha > 0.0 && (acceptable(&lo) || sufficient(&lo)) && lo.f <= f0 + noise {
        return Some(lo);
    }
    best_sufficient.filter(|p| p.f <= f0 + noise)
}

/// Safeguarded cubic interpolation inside `[lo, hi]`, falling back to bisection.
fn interpolate(lo: &Point, hi: &Point) -> f64 {
    let (a, b) = (lo.alpha, hi.alpha);
    let d1 = lo.dphi + hi.dphi - 3.0 * (lo.f - hi.f) / (a - b);
    let disc = d1 * d1 - lo.dphi * hi.dphi;
    let mid = 0.5 * (a + b);
    if disc < 0.0 || !disc.is_finite() {
        return mid;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (hi.dphi + d2 - d1) / (hi.dphi - lo.dphi + 2.0 * d2);
    let (min, max) = (a.min(b), a.max(b));
    let margin = 0.1 * (max - min);
    if t.is_finite() && t > min + margin && t < max - margin {
        t
    } else {
        mid
    }
}
