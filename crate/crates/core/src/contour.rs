//! Contour solutions of `bbGKZ(C,0)` and `bbGKZ(C°,0)`: the trivial solution
//! `Φ⁰`, residue solutions `Φ^{γ_k}`, `Ψ^{γ_k}` on small circles around the
//! roots of `f`, and the line solution `Ψ^{λ₀}` along the negative real axis
//! (deformed upward around near-axis roots, with the tail mapped to a finite
//! interval).

use num_complex::Complex;
use num_traits::Zero;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fan::LatticePoint;
use crate::poly::{ParameterPoint, RootSet};
use crate::quadrature::{adaptive_gk, circle_integral};
use crate::scalar::{cast, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionLabel {
    PhiTrivial,
    PhiRoot(usize),
    PsiLine,
    PsiRoot(usize),
    /// Component of the `H`-valued Gamma series along a basis vector.
    GammaH(usize),
    /// Component of the `H^c`-valued Gamma series along a basis vector.
    GammaHc(usize),
}

/// Chosen logarithm branches entering `Φ_{(0,0)}`; continuation adjusts these
/// instead of re-deriving principal values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchRecord<F: Real> {
    pub log_root: Complex<F>,
    pub log_x0: Complex<F>,
    pub log_xn: Complex<F>,
}

/// One solution, tabulated on all lattice points of `C` (resp. `C°`) up to a
/// degree bound.
#[derive(Clone, Debug)]
pub struct SolutionTable<F: Real> {
    pub label: SolutionLabel,
    pub degree_bound: i64,
    /// `true` for `Ψ` tables (domain `C°`).
    pub interior_only: bool,
    pub values: BTreeMap<LatticePoint, Complex<F>>,
    pub branch: Option<BranchRecord<F>>,
}

impl<F: Real> SolutionTable<F> {
    pub fn get(&self, c: &LatticePoint) -> Option<Complex<F>> {
        self.values.get(c).copied()
    }

    pub fn value(&self, c: &LatticePoint) -> Result<Complex<F>> {
        self.get(c).ok_or_else(|| {
            Error::Contract(format!("table {:?} is missing entry ({}, {})", self.label, c.a, c.b))
        })
    }

    /// Add `scale · other` entrywise (used for continuation corrections).
    pub fn add_scaled(&mut self, other: &SolutionTable<F>, scale: Complex<F>) {
        for (c, v) in &other.values {
            if let Some(entry) = self.values.get_mut(c) {
                *entry = *entry + *v * scale;
            }
        }
    }
}

/// Quadrature controls for the contour solutions.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig<F: Real> {
    /// Circle radius as a fraction of the distance to the nearest other root
    /// or the origin.
    pub radius_fraction: F,
    /// Node-doubling tolerance of the circle quadrature.
    pub node_tol: F,
    /// A near-axis root triggers a detour when its distance to the axis is
    /// below this fraction of the available radius.
    pub deformation_fraction: F,
    /// The tail substitution starts at this multiple of the root scale.
    pub truncation_radius: F,
    /// Reject the parameter point when a root is closer to the deformed path
    /// than this (relative to the root scale).
    pub path_clearance: F,
}

impl<F: Real> Default for QuadratureConfig<F> {
    fn default() -> Self {
        QuadratureConfig {
            radius_fraction: cast(0.25),
            node_tol: cast(1e-12),
            deformation_fraction: cast(0.5),
            truncation_radius: cast(4.0),
            path_clearance: cast(1e-6),
        }
    }
}

fn factorial_l_minus_1<F: Real>(l: i64) -> F {
    crate::gammafn::factorial::<F>((l - 1) as u32)
}

fn sign_pow<F: Real>(l: i64) -> F {
    if l % 2 == 0 {
        F::one()
    } else {
        -F::one()
    }
}

/// `(-1)^l (l-1)! z^{a-1} / f(z)^l`, the integrand of `Φ_{(a,l)}` and
/// `Ψ_{(a,l)}`.
fn integrand<F: Real>(p: &ParameterPoint<F>, a: i64, l: i64, z: Complex<F>) -> Complex<F> {
    let coef = Complex::new(sign_pow::<F>(l) * factorial_l_minus_1::<F>(l), F::zero());
    coef * z.powi((a - 1) as i32) / p.eval(z).powi(l as i32)
}

/// `Φ⁰`: `Φ_{(0,0)} = 1`, everything else `0`.
pub fn phi_trivial<F: Real>(n: i64, degree_bound: i64) -> SolutionTable<F> {
    let mut values = BTreeMap::new();
    values.insert(LatticePoint::origin(), Complex::new(F::one(), F::zero()));
    for l in 1..=degree_bound {
        for a in 0..=n * l {
            values.insert(LatticePoint::new(a, l), Complex::zero());
        }
    }
    SolutionTable {
        label: SolutionLabel::PhiTrivial,
        degree_bound,
        interior_only: false,
        values,
        branch: None,
    }
}

/// Closed residue form of the degree-one entries (winding number one around a
/// simple root): `Φ_{(a,1)} = -ξ^a/(f'(ξ)ξ)`, with `-1/(n x_0)` at `a = 0`
/// and `+1/(n x_n)` at `a = n`.
pub fn closed_form_degree_one<F: Real>(
    p: &ParameterPoint<F>,
    xi: Complex<F>,
    a: i64,
) -> Complex<F> {
    let n = p.n() as i64;
    let inv_n = Complex::new(cast::<F>(1.0) / cast::<F>(n as f64), F::zero());
    let mut v = -xi.powi(a as i32) / (p.eval_deriv(xi) * xi);
    if a == 0 {
        v = v - inv_n / p.x[0];
    }
    if a == n {
        v = v + inv_n / p.x[p.n()];
    }
    v
}

fn residue_table<F: Real>(
    p: &ParameterPoint<F>,
    roots: &RootSet<F>,
    k: usize,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
    interior_only: bool,
) -> Result<BTreeMap<LatticePoint, Complex<F>>> {
    let n = p.n() as i64;
    let xi = roots.roots[k];
    let radius = roots.isolation(k) * cfg.radius_fraction;
    if radius <= F::zero() {
        return Err(Error::Degenerate("vanishing isolation radius".into()));
    }
    let mut values = BTreeMap::new();
    for l in 1..=degree_bound {
        let range = if interior_only { 1..n * l } else { 0..n * l + 1 };
        for a in range {
            let mut v = circle_integral(xi, radius, cfg.node_tol, |z| integrand(p, a, l, z))?;
            if !interior_only {
                // boundary corrections of Φ at (0,l) and (nl,l), c(γ) = 1
                let coef = sign_pow::<F>(l) * factorial_l_minus_1::<F>(l) / cast::<F>(n as f64);
                if a == 0 {
                    v = v + Complex::from(coef) / p.x[0].powi(l as i32);
                }
                if a == n * l {
                    v = v - Complex::from(coef) / p.x[p.n()].powi(l as i32);
                }
            }
            values.insert(LatticePoint::new(a, l), v);
        }
    }
    Ok(values)
}

/// `Φ^{γ_k}` on the small circle around the `k`-th root, principal branches.
pub fn phi_at_root<F: Real>(
    p: &ParameterPoint<F>,
    roots: &RootSet<F>,
    k: usize,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
) -> Result<SolutionTable<F>> {
    let branch = BranchRecord {
        log_root: roots.roots[k].ln(),
        log_x0: p.x[0].ln(),
        log_xn: p.x[p.n()].ln(),
    };
    phi_at_root_with_branch(p, roots, k, degree_bound, cfg, branch)
}

/// `Φ^{γ_k}` with explicitly chosen logarithm branches (continuation).
pub fn phi_at_root_with_branch<F: Real>(
    p: &ParameterPoint<F>,
    roots: &RootSet<F>,
    k: usize,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
    branch: BranchRecord<F>,
) -> Result<SolutionTable<F>> {
    let n = p.n() as i64;
    let mut values = residue_table(p, roots, k, degree_bound, cfg, false)?;
    let inv_n = Complex::from(cast::<F>(1.0) / cast::<F>(n as f64));
    values.insert(
        LatticePoint::origin(),
        branch.log_root + inv_n * (branch.log_xn - branch.log_x0),
    );
    Ok(SolutionTable {
        label: SolutionLabel::PhiRoot(k),
        degree_bound,
        interior_only: false,
        values,
        branch: Some(branch),
    })
}

/// `Ψ^{γ_k}` on the small circle around the `k`-th root.
pub fn psi_at_root<F: Real>(
    p: &ParameterPoint<F>,
    roots: &RootSet<F>,
    k: usize,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
) -> Result<SolutionTable<F>> {
    let values = residue_table(p, roots, k, degree_bound, cfg, true)?;
    Ok(SolutionTable {
        label: SolutionLabel::PsiRoot(k),
        degree_bound,
        interior_only: true,
        values,
        branch: None,
    })
}

// ---------------------------------------------------------------------------
// the path λ₀ from 0 to ∞ along the negative real axis
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
enum Piece<F> {
    /// `w = -s`, `s ∈ [a, b]`.
    Straight { a: F, b: F },
    /// Semicircle around `c = -center` on the axis; `upper` picks the
    /// half-plane.
    Detour { center: F, radius: F, upper: bool },
    /// `s ∈ [start, ∞)` through `s = t/(1-t)`.
    Tail { start: F },
}

struct LinePath<F: Real> {
    pieces: Vec<Piece<F>>,
}

impl<F: Real> LinePath<F> {
    /// Deform the negative real axis around near-axis roots. Each detour
    /// goes to the side opposite its root (up for roots on or below the
    /// axis), so the path's homotopy class relative to the roots changes
    /// only when a root actually crosses the axis — the event the
    /// continuation bookkeeping tracks.
    fn build(roots: &RootSet<F>, cfg: &QuadratureConfig<F>) -> Result<Self> {
        let scale = roots.roots.iter().fold(F::one(), |m, z| m.max(z.norm()));
        // candidate detours: (s-center, radius, upper side)
        let mut detours: Vec<(F, F, bool)> = Vec::new();
        for (k, z) in roots.roots.iter().enumerate() {
            if z.re >= F::zero() {
                continue;
            }
            let s_c = -z.re;
            let h = z.im.abs();
            let mut rho = roots.isolation(k) * cast::<F>(0.5);
            rho = rho.min(s_c * cast::<F>(0.9));
            if h < cfg.deformation_fraction * rho {
                detours.push((s_c, rho, z.im <= F::zero()));
            }
        }
        detours.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // merge overlapping same-side intervals; conflicting overlaps are a
        // degenerate configuration
        let mut merged: Vec<(F, F, bool)> = Vec::new();
        for (c, r, upper) in detours {
            match merged.last_mut() {
                Some((pc, pr, pu)) if c - r < *pc + *pr => {
                    if *pu != upper {
                        return Err(Error::Degenerate(
                            "overlapping detours on opposite sides of the line path".into(),
                        ));
                    }
                    let lo = (*pc - *pr).min(c - r);
                    let hi = (*pc + *pr).max(c + r);
                    *pc = (lo + hi) / cast::<F>(2.0);
                    *pr = (hi - lo) / cast::<F>(2.0);
                }
                _ => merged.push((c, r, upper)),
            }
        }
        let mut tail_start = cfg.truncation_radius * scale;
        if let Some((c, r, _)) = merged.last() {
            tail_start = tail_start.max((*c + *r) * cast::<F>(1.5));
        }
        let mut pieces = Vec::new();
        let mut cursor = F::zero();
        for (c, r, upper) in &merged {
            if *c - *r > cursor {
                pieces.push(Piece::Straight { a: cursor, b: *c - *r });
            }
            pieces.push(Piece::Detour { center: *c, radius: *r, upper: *upper });
            cursor = *c + *r;
        }
        if tail_start > cursor {
            pieces.push(Piece::Straight { a: cursor, b: tail_start });
        }
        pieces.push(Piece::Tail { start: tail_start });
        let path = LinePath { pieces };
        path.check_clearance(roots, cfg.path_clearance * scale)?;
        Ok(path)
    }

    fn check_clearance(&self, roots: &RootSet<F>, clearance: F) -> Result<()> {
        for z in &roots.roots {
            let mut dist = F::infinity();
            for piece in &self.pieces {
                dist = dist.min(match piece {
                    Piece::Straight { a, b } => segment_distance(*z, *a, *b),
                    Piece::Tail { start } => segment_distance(*z, *start, F::infinity()),
                    Piece::Detour { center, radius, upper } => {
                        let c = Complex::new(-*center, F::zero());
                        let sign = if *upper { F::one() } else { -F::one() };
                        let mut best = F::infinity();
                        for j in 0..=16 {
                            let theta = sign * F::PI() * cast::<F>(j as f64) / cast::<F>(16.0);
                            let w = c + Complex::from_polar(*radius, theta);
                            best = best.min((z - w).norm());
                        }
                        best
                    }
                });
            }
            if dist < clearance {
                return Err(Error::Degenerate(format!(
                    "root within {dist:e} of the deformed line path"
                )));
            }
        }
        Ok(())
    }

    fn integrate<G>(&self, atol: F, rtol: F, g: &G) -> Result<Complex<F>>
    where
        G: Fn(Complex<F>) -> Complex<F>,
    {
        let mut total = Complex::<F>::zero();
        for piece in &self.pieces {
            total = total
                + match piece {
                    Piece::Straight { a, b } => {
                        // w = -s, dw = -ds
                        adaptive_gk(*a, *b, atol, rtol, &|s: F| {
                            -g(Complex::new(-s, F::zero()))
                        })?
                    }
                    Piece::Detour { center, radius, upper } => {
                        let c = Complex::new(-*center, F::zero());
                        let rho = *radius;
                        let sign = if *upper { F::one() } else { -F::one() };
                        adaptive_gk(F::zero(), F::PI(), atol, rtol, &|theta: F| {
                            let dir = Complex::from_polar(F::one(), sign * theta);
                            g(c + dir * rho) * dir * Complex::i() * Complex::from(sign * rho)
                        })?
                    }
                    Piece::Tail { start } => {
                        let t0 = *start / (F::one() + *start);
                        adaptive_gk(t0, F::one(), atol, rtol, &|t: F| {
                            let one_minus = F::one() - t;
                            let w = Complex::new(-t / one_minus, F::zero());
                            -g(w) / Complex::from(one_minus * one_minus)
                        })?
                    }
                };
        }
        Ok(total)
    }
}

/// Distance from `z` to the axis segment `{-s : s ∈ [a, b]}`.
fn segment_distance<F: Real>(z: Complex<F>, a: F, b: F) -> F {
    let s = (-z.re).max(a).min(b);
    (z - Complex::new(-s, F::zero())).norm()
}

/// `Ψ^{λ₀}`: `(1/2πi) ∫_{λ₀} (-1)^l (l-1)! w^{k-1}/f(w)^l dw` for `(k,l) ∈ C°`.
pub fn psi_line<F: Real>(
    p: &ParameterPoint<F>,
    roots: &RootSet<F>,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
) -> Result<SolutionTable<F>> {
    let n = p.n() as i64;
    let path = LinePath::build(roots, cfg)?;
    let two_pi_i = Complex::new(F::zero(), F::TAU());
    let mut values = BTreeMap::new();
    for l in 1..=degree_bound {
        for a in 1..n * l {
            let raw =
                path.integrate(cast::<F>(1e-13), cast::<F>(1e-12), &|w| integrand(p, a, l, w))?;
            values.insert(LatticePoint::new(a, l), raw / two_pi_i);
        }
    }
    Ok(SolutionTable {
        label: SolutionLabel::PsiLine,
        degree_bound,
        interior_only: true,
        values,
        branch: None,
    })
}

// ---------------------------------------------------------------------------
// checks
// ---------------------------------------------------------------------------

/// Largest residual of the two Euler identities
/// `Σ_j x_j T(c+v_j) + deg(c) T(c) = 0` and `Σ_j j x_j T(c+v_j) + a(c) T(c) = 0`
/// over all tabulated `c` of degree `< degree_bound`.
pub fn euler_check<F: Real>(table: &SolutionTable<F>, p: &ParameterPoint<F>) -> F {
    let n = p.n() as i64;
    let mut worst = F::zero();
    for (c, &tc) in &table.values {
        if c.b + 1 > table.degree_bound {
            continue;
        }
        let mut r1 = Complex::from(cast::<F>(c.b as f64)) * tc;
        let mut r2 = Complex::from(cast::<F>(c.a as f64)) * tc;
        let mut complete = true;
        for j in 0..=n {
            let cj = c.add(&LatticePoint::generator(j));
            match table.get(&cj) {
                Some(v) => {
                    let xj = p.x[j as usize];
                    r1 = r1 + xj * v;
                    r2 = r2 + xj * v * Complex::from(cast::<F>(j as f64));
                }
                None => complete = false,
            }
        }
        if complete {
            worst = worst.max(r1.norm()).max(r2.norm());
        }
    }
    worst
}

/// Euler residuals relative to the row scale `Σ_j |x_j T(c+v_j)| + |deg·T(c)|`.
///
/// Series tables at chamber basepoints hold entries spanning many orders of
/// magnitude (`|x^l|` with `l` against the height function), so the absolute
/// residual of a high-degree row only reflects its scale; this variant
/// normalizes each row before taking the worst case.
pub fn euler_check_relative<F: Real>(table: &SolutionTable<F>, p: &ParameterPoint<F>) -> F {
    let n = p.n() as i64;
    let mut worst = F::zero();
    for (c, &tc) in &table.values {
        if c.b + 1 > table.degree_bound {
            continue;
        }
        let mut r1 = Complex::from(cast::<F>(c.b as f64)) * tc;
        let mut r2 = Complex::from(cast::<F>(c.a as f64)) * tc;
        let mut scale = r1.norm().max(r2.norm());
        let mut complete = true;
        for j in 0..=n {
            let cj = c.add(&LatticePoint::generator(j));
            match table.get(&cj) {
                Some(v) => {
                    let term = p.x[j as usize] * v;
                    scale = scale.max(term.norm() * cast::<F>(j.max(1) as f64));
                    r1 = r1 + term;
                    r2 = r2 + term * Complex::from(cast::<F>(j as f64));
                }
                None => complete = false,
            }
        }
        if complete {
            worst = worst.max(r1.norm().max(r2.norm()) / scale.max(F::one()));
        }
    }
    worst
}

/// Relative error of the central finite difference `∂_j T(c)` against the
/// shift identity `T(c + v_j)`, with one Richardson extrapolation.
pub fn derivative_check<F: Real, Factory>(
    factory: Factory,
    p: &ParameterPoint<F>,
    c: &LatticePoint,
    j: usize,
    h: F,
) -> Result<F>
where
    Factory: Fn(&ParameterPoint<F>) -> Result<SolutionTable<F>>,
{
    let base = factory(p)?;
    let expected = base.value(&c.add(&LatticePoint::generator(j as i64)))?;
    let diff = |step: F| -> Result<Complex<F>> {
        let mut plus = p.clone();
        plus.x[j] = plus.x[j] + Complex::from(step);
        let mut minus = p.clone();
        minus.x[j] = minus.x[j] - Complex::from(step);
        let tp = factory(&plus)?.value(c)?;
        let tm = factory(&minus)?.value(c)?;
        Ok((tp - tm) / Complex::from(step + step))
    };
    let d1 = diff(h)?;
    let d2 = diff(h / cast::<F>(2.0))?;
    let richardson = (d2 * cast::<F>(4.0) - d1) / cast::<F>(3.0);
    Ok((richardson - expected).norm() / expected.norm().max(F::one()))
}
