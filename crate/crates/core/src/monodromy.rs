//! Numerical analytic continuation along parameter-space paths: root
//! tracking, branch bookkeeping for the logarithms in `Φ_{(0,0)}`, crossing
//! corrections for `Ψ^{λ₀}`, and pairing-invariance checks.

use num_complex::Complex;
use num_traits::Zero;

use crate::contour::{
    phi_at_root_with_branch, phi_trivial, psi_at_root, psi_line, BranchRecord, QuadratureConfig,
    SolutionTable,
};
use crate::error::{Error, Result};
use crate::pairing::{pairing_matrix, solution_family, PairingMatrix};
use crate::poly::{find_roots, match_roots, ParameterPoint, RootSet};
use crate::scalar::{cast, Real};

/// A piecewise-linear path in parameter space.
#[derive(Clone, Debug)]
pub struct ParameterPath<F: Real> {
    pub waypoints: Vec<ParameterPoint<F>>,
}

impl<F: Real> ParameterPath<F> {
    pub fn new(waypoints: Vec<ParameterPoint<F>>) -> Self {
        ParameterPath { waypoints }
    }

    /// Rotate coordinate `j` once around the origin: `x_j ↦ x_j e^{iθ}`,
    /// sampled on `segments` waypoints. The last waypoint repeats the first
    /// exactly, so the loop closes without rounding noise.
    pub fn coordinate_circle(base: &ParameterPoint<F>, j: usize, segments: usize) -> Self {
        let mut waypoints: Vec<_> = (0..segments)
            .map(|s| {
                let theta = F::TAU() * cast::<F>(s as f64) / cast::<F>(segments as f64);
                let mut x = base.clone();
                x.x[j] = x.x[j] * Complex::from_polar(F::one(), theta);
                x
            })
            .collect();
        waypoints.push(waypoints[0].clone());
        ParameterPath { waypoints }
    }

    /// A small contractible loop: `x_j ↦ x_j (1 + r e^{iθ})`, closed exactly.
    pub fn small_loop(base: &ParameterPoint<F>, j: usize, r: F, segments: usize) -> Self {
        let mut waypoints: Vec<_> = (0..segments)
            .map(|s| {
                let theta = F::TAU() * cast::<F>(s as f64) / cast::<F>(segments as f64);
                let mut x = base.clone();
                x.x[j] = x.x[j] * (Complex::from(F::one()) + Complex::from_polar(r, theta));
                x
            })
            .collect();
        waypoints.push(waypoints[0].clone());
        ParameterPath { waypoints }
    }

    pub fn start(&self) -> &ParameterPoint<F> {
        &self.waypoints[0]
    }

    pub fn is_closed(&self) -> bool {
        let a = self.waypoints.first().unwrap();
        let b = self.waypoints.last().unwrap();
        a.x.iter().zip(&b.x).all(|(u, v)| (u - v).norm() <= F::epsilon() * cast::<F>(64.0))
    }
}

/// Continuation state along a path: tracked roots (kept in their start
/// order), accumulated logarithm branches, and the net upward crossings of
/// the negative real axis per root (the `Ψ^{λ₀}` corrections).
#[derive(Clone, Debug)]
pub struct ContinuationState<F: Real> {
    pub x: ParameterPoint<F>,
    pub roots: Vec<Complex<F>>,
    pub log_roots: Vec<Complex<F>>,
    pub log_x0: Complex<F>,
    pub log_xn: Complex<F>,
    pub crossings: Vec<i64>,
    pub steps: usize,
}

impl<F: Real> ContinuationState<F> {
    /// Principal branches at the starting point, roots in canonical order.
    pub fn start(p: &ParameterPoint<F>) -> Result<Self> {
        let set = find_roots(p)?;
        Ok(ContinuationState {
            x: p.clone(),
            log_roots: set.roots.iter().map(|z| z.ln()).collect(),
            crossings: vec![0; set.roots.len()],
            log_x0: p.x[0].ln(),
            log_xn: p.x[p.n()].ln(),
            roots: set.roots,
            steps: 0,
        })
    }

    fn isolation(&self, k: usize) -> F {
        let z = self.roots[k];
        let mut best = z.norm();
        for (j, w) in self.roots.iter().enumerate() {
            if j != k {
                best = best.min((z - w).norm());
            }
        }
        best
    }

    /// One predictor–corrector step straight to `target`; `Err` means the
    /// step must shrink.
    fn try_step(&mut self, target: &ParameterPoint<F>) -> Result<()> {
        let n = target.n();
        // x_0, x_n must move mildly for the log accumulation to stay on branch
        for j in [0, n] {
            let rel = (target.x[j] / self.x.x[j] - Complex::from(F::one())).norm();
            if rel > cast::<F>(0.5) {
                return Err(Error::Tracking("boundary coefficient moved too fast".into()));
            }
        }
        let mut new_roots = Vec::with_capacity(self.roots.len());
        for (k, &z0) in self.roots.iter().enumerate() {
            let mut z = z0;
            let mut ok = false;
            for _ in 0..16 {
                let d = target.eval_deriv(z);
                if d.is_zero() {
                    break;
                }
                let step = target.eval(z) / d;
                z = z - step;
                if step.norm() <= z.norm().max(F::one()) * F::epsilon() * cast::<F>(4.0) {
                    ok = true;
                    break;
                }
            }
            let moved = (z - z0).norm();
            if !ok || moved > self.isolation(k) * cast::<F>(0.35) {
                return Err(Error::Tracking("corrector left the convergence basin".into()));
            }
            new_roots.push(z);
        }
        // separations must survive the step
        for a in 0..new_roots.len() {
            for b in a + 1..new_roots.len() {
                let sep = (new_roots[a] - new_roots[b]).norm();
                if sep <= F::epsilon() * cast::<F>(64.0) {
                    return Err(Error::Tracking("roots collided during tracking".into()));
                }
            }
        }
        // accept: accumulate branches and crossings
        for (k, (&z0, &z1)) in self.roots.iter().zip(&new_roots).enumerate() {
            self.log_roots[k] = self.log_roots[k] + (z1 / z0).ln();
            if z0.im * z1.im < F::zero() {
                let t = z0.im / (z0.im - z1.im);
                let re_cross = z0.re + t * (z1.re - z0.re);
                if re_cross < F::zero() {
                    // upward crossing deforms the path under the root: +Ψ^γ
                    self.crossings[k] += if z1.im > F::zero() { 1 } else { -1 };
                }
            }
        }
        self.log_x0 = self.log_x0 + (target.x[0] / self.x.x[0]).ln();
        self.log_xn = self.log_xn + (target.x[n] / self.x.x[n]).ln();
        self.roots = new_roots;
        self.x = target.clone();
        self.steps += 1;
        Ok(())
    }

    /// Advance to `target` with adaptive bisection of the straight segment.
    pub fn advance(&mut self, target: &ParameterPoint<F>) -> Result<()> {
        self.advance_rec(target, 0)
    }

    fn advance_rec(&mut self, target: &ParameterPoint<F>, depth: u32) -> Result<()> {
        let mut probe = self.clone();
        match probe.try_step(target) {
            Ok(()) => {
                *self = probe;
                Ok(())
            }
            Err(_) if depth < 40 => {
                let mid = ParameterPoint::new(
                    self.x
                        .x
                        .iter()
                        .zip(&target.x)
                        .map(|(a, b)| (a + b) / Complex::from(cast::<F>(2.0)))
                        .collect(),
                );
                self.advance_rec(&mid, depth + 1)?;
                self.advance_rec(target, depth + 1)
            }
            Err(e) => Err(Error::Tracking(format!("step underflow near discriminant: {e}"))),
        }
    }

    pub fn root_set(&self) -> RootSet<F> {
        let residual =
            self.roots.iter().fold(F::zero(), |acc, z| acc.max(self.x.eval(*z).norm()));
        RootSet { roots: self.roots.clone(), residual }
    }

    /// The continued solution families at the current point:
    /// `[Φ⁰, Φ^{(k)}]` with accumulated branches and
    /// `[Ψ^{λ₀} + Σ w_k Ψ^{(k)}, Ψ^{(k)}]` with the crossing corrections.
    pub fn family(
        &self,
        degree_bound: i64,
        cfg: &QuadratureConfig<F>,
    ) -> Result<(Vec<SolutionTable<F>>, Vec<SolutionTable<F>>)> {
        let set = self.root_set();
        let n = self.x.n();
        let mut phis = vec![phi_trivial(n as i64, degree_bound)];
        let mut psi_roots = Vec::with_capacity(n);
        for k in 0..n {
            let branch = BranchRecord {
                log_root: self.log_roots[k],
                log_x0: self.log_x0,
                log_xn: self.log_xn,
            };
            phis.push(phi_at_root_with_branch(&self.x, &set, k, degree_bound, cfg, branch)?);
            psi_roots.push(psi_at_root(&self.x, &set, k, degree_bound, cfg)?);
        }
        let mut line = psi_line(&self.x, &set, degree_bound, cfg)?;
        for (k, &w) in self.crossings.iter().enumerate() {
            if w != 0 {
                line.add_scaled(&psi_roots[k], Complex::from(cast::<F>(w as f64)));
            }
        }
        let mut psis = vec![line];
        psis.extend(psi_roots);
        Ok((phis, psis))
    }
}

/// Root trajectories along a path.
#[derive(Clone, Debug)]
pub struct Tracking<F: Real> {
    /// Tracked root positions at every waypoint, start labels.
    pub trajectories: Vec<Vec<Complex<F>>>,
    /// `permutation[k]`: canonical index of tracked root `k` at the endpoint.
    pub permutation: Vec<usize>,
    /// Accumulated `Δ log ξ_k`.
    pub log_increments: Vec<Complex<F>>,
    /// Net upward crossings of the negative real axis per root.
    pub crossings: Vec<i64>,
    /// Accepted corrector steps.
    pub steps: usize,
}

/// Match the tracked endpoint roots against canonical labels: for a closed
/// path the reference is the start configuration (the endpoint may differ
/// from it by rounding, which would destabilize the argument sort).
fn endpoint_permutation<F: Real>(
    path: &ParameterPath<F>,
    tracked_end: &[Complex<F>],
    end_x: &ParameterPoint<F>,
) -> Result<Vec<usize>> {
    let reference =
        if path.is_closed() { find_roots(path.start())? } else { find_roots(end_x)? };
    match_roots(tracked_end, &reference.roots)
}

/// Track all roots along the path; endpoints must be nondegenerate.
pub fn track_roots<F: Real>(path: &ParameterPath<F>) -> Result<Tracking<F>> {
    let mut state = ContinuationState::start(path.start())?;
    let start_logs = state.log_roots.clone();
    let mut trajectories = vec![state.roots.clone()];
    for target in path.waypoints.iter().skip(1) {
        state.advance(target)?;
        trajectories.push(state.roots.clone());
    }
    let permutation = endpoint_permutation(path, &state.roots, &state.x)?;
    let log_increments =
        state.log_roots.iter().zip(&start_logs).map(|(a, b)| a - b).collect();
    Ok(Tracking {
        trajectories,
        permutation,
        log_increments,
        crossings: state.crossings.clone(),
        steps: state.steps,
    })
}

/// Continue the whole solution family along the path and return it together
/// with the endpoint permutation.
pub struct ContinuedSolutions<F: Real> {
    pub phis: Vec<SolutionTable<F>>,
    pub psis: Vec<SolutionTable<F>>,
    pub permutation: Vec<usize>,
    pub state: ContinuationState<F>,
}

pub fn continue_solutions<F: Real>(
    path: &ParameterPath<F>,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
) -> Result<ContinuedSolutions<F>> {
    let mut state = ContinuationState::start(path.start())?;
    for target in path.waypoints.iter().skip(1) {
        state.advance(target)?;
    }
    let (phis, psis) = state.family(degree_bound, cfg)?;
    let permutation = endpoint_permutation(path, &state.roots, &state.x)?;
    Ok(ContinuedSolutions { phis, psis, permutation, state })
}

/// Pairing matrices at each sample of a path, with solutions continued from
/// sample to sample (used by the constancy check).
pub fn pairing_matrices_along<F: Real>(
    samples: &[ParameterPoint<F>],
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
    rank_tol: F,
) -> Result<Vec<PairingMatrix<F>>> {
    let mut out = Vec::with_capacity(samples.len());
    let mut state = ContinuationState::start(&samples[0])?;
    let (phis, psis) = state.family(degree_bound, cfg)?;
    out.push(pairing_matrix(&phis, &psis, &state.x, rank_tol)?);
    for target in samples.iter().skip(1) {
        state.advance(target)?;
        let (phis, psis) = state.family(degree_bound, cfg)?;
        out.push(pairing_matrix(&phis, &psis, &state.x, rank_tol)?);
    }
    Ok(out)
}

/// Invariance of the pairing matrix under analytic continuation around a
/// loop: the continued family pairs to the same matrix entrywise.
#[derive(Clone, Debug)]
pub struct InvarianceReport<F: Real> {
    pub permutation: Vec<usize>,
    pub deviation: F,
    /// Accumulated `Δ log ξ_k` per tracked root.
    pub log_increments: Vec<Complex<F>>,
    /// Net upward crossings of the negative real axis per tracked root.
    pub crossings: Vec<i64>,
    pub start: PairingMatrix<F>,
    pub end: PairingMatrix<F>,
}

pub fn verify_pairing_invariance<F: Real>(
    path: &ParameterPath<F>,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
    rank_tol: F,
) -> Result<InvarianceReport<F>> {
    let start_x = path.start();
    let start_roots = find_roots(start_x)?;
    let (phis0, psis0) = solution_family(start_x, &start_roots, degree_bound, cfg)?;
    let start = pairing_matrix(&phis0, &psis0, start_x, rank_tol)?;

    let continued = continue_solutions(path, degree_bound, cfg)?;
    let end = pairing_matrix(&continued.phis, &continued.psis, &continued.state.x, rank_tol)?;

    let mut deviation = F::zero();
    for (ra, rb) in start.entries.iter().zip(&end.entries) {
        for (a, b) in ra.iter().zip(rb) {
            deviation = deviation.max((a - b).norm());
        }
    }
    let log_increments = continued
        .state
        .log_roots
        .iter()
        .zip(&start_roots.roots)
        .map(|(l, z)| l - z.ln())
        .collect();
    Ok(InvarianceReport {
        permutation: continued.permutation,
        deviation,
        log_increments,
        crossings: continued.state.crossings.clone(),
        start,
        end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn constant_path_is_identity() {
        let p = ParameterPoint::<f64>::from_reals(&[1.0, 0.3, 1.0]);
        let path = ParameterPath::new(vec![p.clone(), p.clone(), p]);
        let t = track_roots(&path).unwrap();
        assert_eq!(t.permutation, vec![0, 1]);
        assert!(t.crossings.iter().all(|&w| w == 0));
        assert!(t.log_increments.iter().all(|d| d.norm() < 1e-12));
    }

    #[test]
    fn coordinate_circle_swaps_square_roots() {
        // x(θ) = (e^{iθ}, 0, 1): roots ±i e^{iθ/2} exchange
        let p = ParameterPoint::<f64>::from_reals(&[1.0, 0.0, 1.0]);
        let path = ParameterPath::coordinate_circle(&p, 0, 48);
        let t = track_roots(&path).unwrap();
        assert_eq!(t.permutation, vec![1, 0]);
        // the root starting at +i sweeps counterclockwise across the
        // negative axis downward once
        assert_eq!(t.crossings.iter().sum::<i64>(), -1);
        // log increments are ±iπ (half turns)
        for d in &t.log_increments {
            assert!((d.re).abs() < 1e-10);
            assert!((d.im.abs() - std::f64::consts::PI).abs() < 1e-10);
        }
    }

    #[test]
    fn contractible_loop_is_identity() {
        let p = ParameterPoint::from_reals(&[1.0, 0.4, -0.2, 1.1]);
        let path = ParameterPath::small_loop(&p, 1, 0.2, 24);
        let t = track_roots(&path).unwrap();
        assert_eq!(t.permutation, vec![0, 1, 2]);
        assert!(t.log_increments.iter().all(|d| d.norm() < 1e-10));
    }

    #[test]
    fn concatenated_swap_loops_compose_to_identity() {
        let p = ParameterPoint::<f64>::from_reals(&[1.0, 0.0, 1.0]);
        let mut once = ParameterPath::coordinate_circle(&p, 0, 48).waypoints;
        let again = ParameterPath::coordinate_circle(&p, 0, 48).waypoints;
        once.extend(again.into_iter().skip(1));
        let t = track_roots(&ParameterPath::new(once)).unwrap();
        assert_eq!(t.permutation, vec![0, 1]);
    }

    #[test]
    fn identity_loop_leaves_tables_identical() {
        let p = ParameterPoint::<f64>::from_reals(&[1.0, 0.3, 1.0]);
        let path = ParameterPath::new(vec![p.clone(), p.clone()]);
        let rep = verify_pairing_invariance(&path, 2, &cfg(), 1e-6).unwrap();
        assert_eq!(rep.permutation, vec![0, 1]);
        assert!(rep.deviation <= 1e-8, "{}", rep.deviation);
    }

    #[test]
    fn swap_loop_preserves_pairing() {
        let p = ParameterPoint::<f64>::from_reals(&[1.0, 0.0, 1.0]);
        let path = ParameterPath::coordinate_circle(&p, 0, 64);
        let rep = verify_pairing_invariance(&path, 2, &cfg(), 1e-6).unwrap();
        assert_eq!(rep.permutation, vec![1, 0]);
        assert!(rep.deviation <= 1e-6, "deviation {}", rep.deviation);
    }

    #[test]
    fn random_small_loop_preserves_pairing() {
        let p = ParameterPoint::from_reals(&[0.9, -0.2, 0.5, 1.2]);
        let path = ParameterPath::small_loop(&p, 2, 0.3, 24);
        let rep = verify_pairing_invariance(&path, 2, &cfg(), 1e-6).unwrap();
        assert_eq!(rep.permutation, vec![0, 1, 2]);
        assert!(rep.deviation <= 1e-6, "deviation {}", rep.deviation);
    }
}
