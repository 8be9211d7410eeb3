//! Parameter sweeps, threshold bisection, and derivative-free maximization.

use crate::error::{Error, Result};
use crate::par::maybe_par_map;
use serde::{Deserialize, Serialize};

/// One axis of a rectangular sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let d = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + d * i as f64).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    pub i1: f64,
    pub i2: f64,
    pub s_value: f64,
    pub violated: bool,
}

/// Evaluate `f` over the cartesian grid of the axes. Points are generated in
/// row-major order (last axis fastest) and that order is preserved in the
/// output regardless of parallelism.
pub fn sweep_grid(
    axes: &[Axis],
    f: impl Fn(&[f64]) -> Result<(f64, f64, f64, bool)> + Sync,
) -> Result<Vec<SweepPoint>> {
    if axes.is_empty() {
        return Err(Error::Parameter("sweep needs at least one axis".into()));
    }
    let grids: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
    let total: usize = grids.iter().map(Vec::len).product();
    let coords: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut c = vec![0.0; grids.len()];
            for (g, slot) in grids.iter().zip(c.iter_mut()).rev() {
                *slot = g[idx % g.len()];
                idx /= g.len();
            }
            c
        })
        .collect();
    let results = maybe_par_map(&coords, |c| f(c))?;
    Ok(coords
        .into_iter()
        .zip(results)
        .map(|(coords, (i1, i2, s_value, violated))| SweepPoint { coords, i1, i2, s_value, violated })
        .collect())
}

pub const THRESHOLD_TOL: f64 = 1e-5;

/// Find x in [lo, hi] where `f(x) - target` changes sign, by bisection to
/// within `THRESHOLD_TOL`. `f` must be continuous; endpoints must bracket.
pub fn find_threshold(lo: f64, hi: f64, target: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let fa = f(a)? - target;
    let fb = f(b)? - target;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(lo, hi));
    }
    let mut fa = fa;
    while (b - a).abs() > THRESHOLD_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m)? - target;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaximizeResult {
    pub coords: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

pub const SIMPLEX_TOL: f64 = 1e-7;

/// Nelder-Mead downhill simplex (maximizing), bounds-clamped.
fn nelder_mead(
    start: &[f64],
    bounds: &[(f64, f64)],
    scale: f64,
    f: &(impl Fn(&[f64]) -> Result<f64> + ?Sized),
    evals: &mut usize,
) -> Result<(Vec<f64>, f64)> {
    let dim = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    {
        let mut x0 = start.to_vec();
        clamp(&mut x0);
        let v0 = eval(&x0, evals)?;
        simplex.push((x0.clone(), v0));
        for d in 0..dim {
            let mut x = x0.clone();
            let span = bounds[d].1 - bounds[d].0;
            x[d] += scale * span.max(1e-6);
            clamp(&mut x);
            if (x[d] - x0[d]).abs() < 1e-12 {
                x[d] -= scale * span.max(1e-6);
                clamp(&mut x);
            }
            let v = eval(&x, evals)?;
            simplex.push((x, v));
        }
    }
    for _ in 0..2000 {
        // sort descending by value (we maximize)
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread: f64 = (0..dim)
            .map(|d| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for (x, _) in &simplex {
                    lo = lo.min(x[d]);
                    hi = hi.max(x[d]);
                }
                hi - lo
            })
            .fold(0.0, f64::max);
        if (best - worst).abs() < SIMPLEX_TOL && spread < SIMPLEX_TOL {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|d| simplex[..dim].iter().map(|(x, _)| x[d]).sum::<f64>() / dim as f64)
            .collect();
        let mk = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(&c, &w)| c + t * (c - w))
                .collect();
            clamp(&mut x);
            x
        };
        let xr = mk(1.0);
        let vr = eval(&xr, evals)?;
        if vr > simplex[0].1 {
            let xe = mk(2.0);
            let ve = eval(&xe, evals)?;
            simplex[dim] = if ve > vr { (xe, ve) } else { (xr, vr) };
        } else if vr > simplex[dim - 1].1 {
            simplex[dim] = (xr, vr);
        } else {
            let xc = mk(-0.5);
            let vc = eval(&xc, evals)?;
            if vc > simplex[dim].1 {
                simplex[dim] = (xc, vc);
            } else {
                // shrink toward best
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&best_x)
                        .map(|(&v, &b)| b + 0.5 * (v - b))
                        .collect();
                    clamp(&mut x);
                    let v = eval(&x, evals)?;
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    Ok(simplex.swap_remove(0))
}

/// Maximize `f` over a box: coarse grid (at least 21 points per axis), then
/// simplex refinement from the best few grid points, to tolerance 1e-7.
pub fn maximize(
    bounds: &[(f64, f64)],
    f: impl Fn(&[f64]) -> Result<f64> + Sync,
) -> Result<MaximizeResult> {
    if bounds.is_empty() || bounds.iter().any(|&(lo, hi)| !(lo < hi)) {
        return Err(Error::Parameter("maximize needs non-degenerate bounds".into()));
    }
    let dim = bounds.len();
    let steps = 21;
    let axes: Vec<Axis> = bounds
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| Axis { name: format!("x{i}"), start: lo, stop: hi, steps })
        .collect();
    let grids: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
    let total: usize = grids.iter().map(Vec::len).product();
    let coords: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut c = vec![0.0; dim];
            for (g, slot) in grids.iter().zip(c.iter_mut()).rev() {
                *slot = g[idx % g.len()];
                idx /= g.len();
            }
            c
        })
        .collect();
    let values = maybe_par_map(&coords, |c| f(c))?;
    let mut evaluations = total;
    let mut ranked: Vec<(usize, f64)> = values.iter().cloned().enumerate().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut best_x = coords[ranked[0].0].clone();
    let mut best_v = ranked[0].1;
    for &(idx, _) in ranked.iter().take(3) {
        let (x, v) = nelder_mead(&coords[idx], bounds, 0.05, &f, &mut evaluations)?;
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    Ok(MaximizeResult { coords: best_x, value: best_v, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn axis_values_are_inclusive() {
        let a = Axis { name: "x".into(), start: 0.0, stop: 1.0, steps: 5 };
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn sweep_preserves_row_major_order() {
        let axes = [
            Axis { name: "a".into(), start: 0.0, stop: 1.0, steps: 3 },
            Axis { name: "b".into(), start: 0.0, stop: 2.0, steps: 2 },
        ];
        let pts = sweep_grid(&axes, |c| Ok((c[0], c[1], c[0] + c[1], false))).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].coords, vec![0.0, 0.0]);
        assert_eq!(pts[1].coords, vec![0.0, 2.0]);
        assert_eq!(pts[5].coords, vec![1.0, 2.0]);
    }

    #[test]
    fn threshold_finds_simple_root() {
        let x = find_threshold(0.0, 2.0, 1.0, |x| Ok(x * x)).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 2.0 * THRESHOLD_TOL);
    }

    #[test]
    fn threshold_requires_bracket() {
        assert!(matches!(find_threshold(2.0, 3.0, 1.0, |x| Ok(x * x)), Err(Error::NoBracket(_, _))));
    }

    #[test]
    fn maximize_quadratic_bowl() {
        let r = maximize(&[(-1.0, 1.0), (-1.0, 1.0)], |c| {
            Ok(1.0 - (c[0] - 0.3).powi(2) - (c[1] + 0.45).powi(2))
        })
        .unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.coords[0], 0.3, epsilon = 1e-3);
        assert_abs_diff_eq!(r.coords[1], -0.45, epsilon = 1e-3);
    }

    #[test]
    fn maximize_handles_boundary_optimum() {
        let r = maximize(&[(0.0, 1.0)], |c| Ok(c[0])).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
    }
}
