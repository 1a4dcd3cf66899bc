//! The polynomial `f(z) = Σ x_k z^k`, its roots and nondegeneracy checks.
//!
//! Roots are found by Aberth–Ehrlich simultaneous iteration started from
//! Newton-polygon moduli estimates, then polished with Newton steps. The
//! polygon start matters here: series basepoints have coefficients spanning
//! dozens of orders of magnitude, so a single starting circle does not
//! converge.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Coefficients `x_0 … x_n` of `f`. Interior entries may be exactly zero
/// ("gaps"); only `x_0` and `x_n` must not vanish for nondegenerate use.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint<F: Real> {
    pub x: Vec<Complex<F>>,
}

impl<F: Real> ParameterPoint<F> {
    pub fn new(x: Vec<Complex<F>>) -> Self {
        ParameterPoint { x }
    }

    pub fn from_reals(x: &[f64]) -> Self {
        ParameterPoint { x: x.iter().map(|&v| Complex::new(cast(v), F::zero())).collect() }
    }

    pub fn n(&self) -> usize {
        self.x.len() - 1
    }

    pub fn eval(&self, z: Complex<F>) -> Complex<F> {
        let mut acc = Complex::zero();
        for c in self.x.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_deriv(&self, z: Complex<F>) -> Complex<F> {
        let mut acc = Complex::zero();
        for (k, c) in self.x.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * cast::<F>(k as f64);
        }
        acc
    }

    pub fn eval_second_deriv(&self, z: Complex<F>) -> Complex<F> {
        let mut acc = Complex::zero();
        for (k, c) in self.x.iter().enumerate().skip(2).rev() {
            acc = acc * z + c * cast::<F>((k * (k - 1)) as f64);
        }
        acc
    }

    /// `Σ |x_k| max(1,|ξ|)^k`, the scale used in residual bounds.
    pub fn residual_scale(&self, root_mag: F) -> F {
        let m = root_mag.max(F::one());
        let mut pw = F::one();
        let mut acc = F::zero();
        for c in &self.x {
            acc = acc + c.norm() * pw;
            pw = pw * m;
        }
        acc
    }
}

/// Distinct nonzero roots of `f`, in a deterministic order (argument, then
/// modulus), with the worst polished residual.
#[derive(Clone, Debug)]
pub struct RootSet<F: Real> {
    pub roots: Vec<Complex<F>>,
    pub residual: F,
}

impl<F: Real> RootSet<F> {
    /// Minimal distance from `roots[k]` to any other root or to the origin.
    pub fn isolation(&self, k: usize) -> F {
        let z = self.roots[k];
        let mut best = z.norm();
        for (j, w) in self.roots.iter().enumerate() {
            if j != k {
                best = best.min((z - w).norm());
            }
        }
        best
    }

    pub fn min_separation(&self) -> F {
        let mut best = F::infinity();
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                best = best.min((self.roots[i] - self.roots[j]).norm());
            }
        }
        best
    }
}

fn residual_tol<F: Real>() -> F {
    cast::<F>(1e-12).max(F::epsilon() * cast(64.0))
}

fn collision_tol<F: Real>() -> F {
    cast::<F>(1e-8).max(F::epsilon().sqrt() * cast(4.0))
}

/// Newton-polygon starting points: for each edge of the upper convex hull of
/// `(k, ln|x_k|)` there are `k2-k1` roots of modulus `exp((u1-u2)/(k2-k1))`,
/// spread over a circle with a fixed angular offset.
fn initial_guesses<F: Real>(p: &ParameterPoint<F>) -> Vec<Complex<F>> {
    let pts: Vec<(usize, F)> = p
        .x
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    // upper hull, left to right
    let mut hull: Vec<(usize, F)> = Vec::new();
    for &(k, u) in &pts {
        while hull.len() >= 2 {
            let (k1, u1) = hull[hull.len() - 2];
            let (k2, u2) = hull[hull.len() - 1];
            let lhs = (u2 - u1) * cast::<F>((k - k1) as f64);
            let rhs = (u - u1) * cast::<F>((k2 - k1) as f64);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, u));
    }
    let mut guesses = Vec::with_capacity(p.n());
    let offset = cast::<F>(0.391);
    for (seg, w) in hull.windows(2).enumerate() {
        let (k1, u1) = w[0];
        let (k2, u2) = w[1];
        let count = k2 - k1;
        let radius = ((u1 - u2) / cast::<F>(count as f64)).exp();
        for j in 0..count {
            let theta = F::TAU() * (cast::<F>(j as f64) + offset + cast::<F>(seg as f64) * offset)
                / cast::<F>(count as f64);
            guesses.push(Complex::from_polar(radius, theta));
        }
    }
    guesses
}

/// All `n` roots of `f`. Errors on `x_0 = 0`, `x_n = 0`, stalled polishing or
/// a root collision (degenerate parameter).
pub fn find_roots<F: Real>(p: &ParameterPoint<F>) -> Result<RootSet<F>> {
    let n = p.n();
    if n == 0 {
        return Err(Error::Config("polynomial must have positive degree".into()));
    }
    if p.x[0].is_zero() || p.x[n].is_zero() {
        return Err(Error::Degenerate("x_0 and x_n must be nonzero".into()));
    }

    let mut z = initial_guesses(p);
    debug_assert_eq!(z.len(), n);

    // Aberth–Ehrlich simultaneous iteration
    let step_tol = F::epsilon() * cast::<F>(32.0);
    let mut converged = false;
    for _ in 0..400 {
        let mut max_rel_step = F::zero();
        for i in 0..n {
            let zi = z[i];
            let fi = p.eval(zi);
            let di = p.eval_deriv(zi);
            if di.is_zero() {
                z[i] = zi * cast::<F>(1.0 + 1e-6) + Complex::new(F::epsilon(), F::epsilon());
                max_rel_step = F::infinity();
                continue;
            }
            let newton = fi / di;
            let mut repulsion = Complex::<F>::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let diff = zi - zj;
                    if !diff.is_zero() {
                        repulsion = repulsion + Complex::<F>::one() / diff;
                    }
                }
            }
            let denom = Complex::<F>::one() - newton * repulsion;
            let step = if denom.is_zero() { newton } else { newton / denom };
            z[i] = zi - step;
            max_rel_step = max_rel_step.max(step.norm() / z[i].norm().max(F::one()));
        }
        if max_rel_step < step_tol {
            converged = true;
            break;
        }
    }

    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..8 {
            let d = p.eval_deriv(*zi);
            if d.is_zero() {
                break;
            }
            let step = p.eval(*zi) / d;
            *zi = *zi - step;
            if step.norm() <= zi.norm().max(F::one()) * F::epsilon() * cast::<F>(2.0) {
                break;
            }
        }
    }

    let mut residual = F::zero();
    for zi in &z {
        let bound = residual_tol::<F>() * p.residual_scale(zi.norm());
        let r = p.eval(*zi).norm();
        residual = residual.max(r);
        if r > bound {
            if converged {
                return Err(Error::Degenerate(format!(
                    "root polishing stalled: |f(ξ)| = {r:e} above bound {bound:e}"
                )));
            }
            return Err(Error::Degenerate("Aberth iteration did not converge".into()));
        }
    }

    // collision check, relative to local modulus
    for i in 0..n {
        for j in i + 1..n {
            let sep = (z[i] - z[j]).norm();
            let scale = z[i].norm().max(z[j].norm()).max(F::one());
            if sep < collision_tol::<F>() * scale {
                return Err(Error::Degenerate(format!(
                    "roots collide: separation {:e}",
                    sep
                )));
            }
        }
    }

    z.sort_by(|a, b| {
        let (aa, ab) = (a.arg(), a.norm());
        let (ba, bb) = (b.arg(), b.norm());
        aa.partial_cmp(&ba).unwrap().then(ab.partial_cmp(&bb).unwrap())
    });

    Ok(RootSet { roots: z, residual })
}

/// `true` iff `|x_0|, |x_n| > tol`, all roots exist with `|ξ_i| > tol` and
/// pairwise distances `> tol`.
pub fn check_nondegenerate<F: Real>(p: &ParameterPoint<F>, tol: F) -> bool {
    let n = p.n();
    if n == 0 || p.x[0].norm() <= tol || p.x[n].norm() <= tol {
        return false;
    }
    let Ok(set) = find_roots(p) else { return false };
    if set.roots.iter().any(|z| z.norm() <= tol) {
        return false;
    }
    set.min_separation() > tol
}

/// Index of the root nearest to `target`.
pub fn nearest_root<F: Real>(roots: &[Complex<F>], target: Complex<F>) -> usize {
    let mut best = 0;
    let mut best_d = F::infinity();
    for (j, w) in roots.iter().enumerate() {
        let d = (w - target).norm();
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Match each root in `prev` with its nearest neighbour in `next`.
/// Errors when the assignment is not a bijection (step too coarse).
pub fn match_roots<F: Real>(prev: &[Complex<F>], next: &[Complex<F>]) -> Result<Vec<usize>> {
    if prev.len() != next.len() {
        return Err(Error::Tracking("root counts differ".into()));
    }
    let mut used = vec![false; next.len()];
    let mut perm = Vec::with_capacity(prev.len());
    for z in prev {
        let mut best = usize::MAX;
        let mut best_d = F::infinity();
        for (j, w) in next.iter().enumerate() {
            let d = (z - w).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        if used[best] {
            return Err(Error::Tracking("ambiguous root matching".into()));
        }
        used[best] = true;
        perm.push(best);
    }
    Ok(perm)
}
