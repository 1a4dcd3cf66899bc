//! `H`- and `H^c`-valued Gamma series: exponent enumeration over the cosets
//! `L_{c,γ}`, first-order nilpotent expansion of the `1/Γ` factors, series
//! basepoints, and the duality identity `⟨Γ,Γ°⟩ = -(n/4π²) χ_H⁻¹`.

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::cohomology::{
    chi_inverse, m_coeff, reduce_d, Basis, HcElement, HElement, PairingTensor,
};
use crate::contour::{SolutionLabel, SolutionTable};
use crate::error::{Error, Result};
use crate::fan::{Fan, LatticePoint, TwistedSector};
use crate::gammafn::{phi, phi_at_int, phi_dprime_at_int, phi_prime_at_int};
use crate::pairing::pair;
use crate::poly::{find_roots, ParameterPoint};
use crate::scalar::{cast, Real};

/// Truncation and basepoint controls for the series.
#[derive(Clone, Copy, Debug)]
pub struct Truncation {
    /// Bound on `Σ|l_k|` per term.
    pub l_max: i64,
    /// Certificate threshold: the last two shells must contribute below this
    /// fraction of each component.
    pub tail_ratio: f64,
    /// Basepoint scale, `0 < ε ≤ 0.1`.
    pub epsilon: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        // degree-2 entries converge at ratio ~4ε² per shell of width 4, so
        // this depth certifies tails near 1e-6 at ε = 0.1
        Truncation { l_max: 22, tail_ratio: 1e-3, epsilon: 0.1 }
    }
}

/// All `(l_k) ∈ γ + ℤ^{n+1}` with `Σ l_k v_k = -c` and `Σ|l_k| ≤ l_max`,
/// in lexicographic order.
///
/// The two moment constraints pin `l_0, l_1` once the remaining coordinates
/// are chosen, so the enumeration is a pruned walk over `l_2..l_n`.
pub fn enumerate_exponents(
    c: &LatticePoint,
    sector: &TwistedSector,
    fan: &Fan,
    l_max: i64,
) -> Vec<Vec<Ratio<i64>>> {
    let n = fan.n() as usize;
    let frac: Vec<Ratio<i64>> = (0..=n as i64).map(|k| sector.frac_at(k)).collect();
    let frac_sum: Ratio<i64> = frac.iter().sum();
    let frac_moment: Ratio<i64> =
        frac.iter().enumerate().map(|(k, g)| g * Ratio::from_integer(k as i64)).sum();
    // Σ m_k = -deg(c) - Σ γ_k and Σ k m_k = -a(c) - Σ k γ_k, both integral
    let sum_target = Ratio::from_integer(-c.b) - frac_sum;
    let moment_target = Ratio::from_integer(-c.a) - frac_moment;
    debug_assert!(sum_target.is_integer() && moment_target.is_integer());
    let (s, t) = (sum_target.to_integer(), moment_target.to_integer());

    let budget = Ratio::from_integer(l_max);
    let mut out = Vec::new();
    let mut m = vec![0i64; n + 1];

    fn walk(
        k: usize,
        n: usize,
        used: Ratio<i64>,
        budget: Ratio<i64>,
        s: i64,
        t: i64,
        frac: &[Ratio<i64>],
        m: &mut Vec<i64>,
        out: &mut Vec<Vec<Ratio<i64>>>,
    ) {
        if k > n {
            // solve for m_1 and m_0 from the two constraints
            let (mut rest_sum, mut rest_moment) = (0i64, 0i64);
            for (idx, &mi) in m.iter().enumerate().skip(2) {
                rest_sum += mi;
                rest_moment += idx as i64 * mi;
            }
            let m1 = t - rest_moment;
            let m0 = s - m1 - rest_sum;
            let l0 = frac[0] + Ratio::from_integer(m0);
            let l1 = frac[1] + Ratio::from_integer(m1);
            if used + l0.abs() + l1.abs() <= budget {
                m[0] = m0;
                m[1] = m1;
                let l: Vec<Ratio<i64>> = m
                    .iter()
                    .enumerate()
                    .map(|(idx, &mi)| frac[idx] + Ratio::from_integer(mi))
                    .collect();
                out.push(l);
            }
            return;
        }
        // |l_k| = |m_k + γ_k| ≤ budget - used
        let room = budget - used;
        let lo = (-room - frac[k]).ceil().to_integer();
        let hi = (room - frac[k]).floor().to_integer();
        for mk in lo..=hi {
            let lk = frac[k] + Ratio::from_integer(mk);
            m[k] = mk;
            walk(k + 1, n, used + lk.abs(), budget, s, t, frac, m, out);
        }
        m[k] = 0;
    }

    if n >= 2 {
        walk(2, n, Ratio::zero(), budget, s, t, &frac, &mut m, &mut out);
    } else {
        walk(2, 1, Ratio::zero(), budget, s, t, &frac, &mut m, &mut out);
    }
    out.sort();
    out
}

fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `φ(1+l)` for rational `l`, exact at the integers.
fn phi_shift<F: Real>(l: &Ratio<i64>) -> F {
    if l.is_integer() {
        phi_at_int(1 + l.to_integer())
    } else {
        phi(cast::<F>(1.0 + ratio_to_f64(l)))
    }
}

/// Series accumulator with a last-shells tail estimate.
#[derive(Clone, Copy, Debug)]
struct Acc<F: Real> {
    value: Complex<F>,
    tail: F,
}

impl<F: Real> Acc<F> {
    fn new() -> Self {
        Acc { value: Complex::zero(), tail: F::zero() }
    }

    fn add(&mut self, v: Complex<F>, is_tail: bool) {
        self.value = self.value + v;
        if is_tail {
            self.tail = self.tail + v.norm();
        }
    }

    fn tail_rel(&self) -> F {
        self.tail / self.value.norm().max(F::one())
    }
}

/// Evaluation context: a fan basis, a parameter point with no vanishing
/// coordinates, and principal logarithm branches.
pub struct GammaContext<'a, F: Real> {
    pub basis: &'a Basis,
    pub x: ParameterPoint<F>,
    log_x: Vec<Complex<F>>,
    pub trunc: Truncation,
}

impl<'a, F: Real> GammaContext<'a, F> {
    pub fn new(basis: &'a Basis, x: ParameterPoint<F>, trunc: Truncation) -> Result<Self> {
        if x.n() as i64 != basis.fan().n() {
            return Err(Error::Contract("parameter point does not match the fan".into()));
        }
        if x.x.iter().any(|v| v.is_zero()) {
            return Err(Error::Degenerate(
                "Gamma series need a basepoint with nonvanishing coordinates".into(),
            ));
        }
        let log_x = x.x.iter().map(|v| v.ln()).collect();
        Ok(GammaContext { basis, x, log_x, trunc })
    }

    /// `Π x_k^{l_k}` through the principal branches.
    fn x_pow(&self, l: &[Ratio<i64>]) -> Complex<F> {
        let mut exponent = Complex::<F>::zero();
        for (k, lk) in l.iter().enumerate() {
            if !lk.is_zero() {
                exponent = exponent + self.log_x[k] * Complex::from(cast::<F>(ratio_to_f64(lk)));
            }
        }
        exponent.exp()
    }

    fn is_tail(&self, l: &[Ratio<i64>]) -> bool {
        let total: Ratio<i64> = l.iter().map(|v| v.abs()).sum();
        total > Ratio::from_integer(self.trunc.l_max - 2)
    }

    fn two_pi_i(&self) -> Complex<F> {
        Complex::new(F::zero(), F::TAU())
    }

    /// Untwisted component of `Γ_c`: scalar and divisor parts, expanded to
    /// first order in the nilpotent divisors.
    fn gamma_untwisted(&self, c: &LatticePoint) -> (Acc<F>, Vec<Acc<F>>) {
        let fan = self.basis.fan();
        let n = fan.n() as usize;
        let r = self.basis.r();
        let two_pi_i = self.two_pi_i();
        let mut scalar = Acc::new();
        let mut divisors = vec![Acc::new(); r];
        // precompute reductions of every D_k
        let reductions: Vec<Vec<Complex<F>>> =
            (0..=n as i64).map(|k| reduce_d::<Complex<F>>(self.basis, k)).collect();
        for l in enumerate_exponents(c, &TwistedSector::Untwisted, fan, self.trunc.l_max) {
            let ints: Vec<i64> = l.iter().map(|v| v.to_integer()).collect();
            let negs: Vec<usize> = ints.iter().enumerate().filter(|(_, &v)| v < 0).map(|(k, _)| k).collect();
            if negs.len() >= 2 {
                continue;
            }
            let is_tail = self.is_tail(&l);
            let xl = self.x_pow(&l);
            let phis: Vec<F> = ints.iter().map(|&v| phi_at_int::<F>(1 + v)).collect();
            let s: F = phis.iter().fold(F::one(), |acc, p| acc * *p);
            if negs.is_empty() {
                scalar.add(xl * Complex::from(s), is_tail);
            }
            // D_k-linear coefficients: φ'(1+l_k) Π_{m≠k} φ(1+l_m) + s ln x_k
            for k in 0..=n {
                if reductions[k].iter().all(|v| v.is_zero()) {
                    continue;
                }
                let mut prod_except = F::one();
                for (mi, p) in phis.iter().enumerate() {
                    if mi != k {
                        prod_except = prod_except * *p;
                    }
                }
                if prod_except.is_zero() && s.is_zero() {
                    continue;
                }
                let coeff = (Complex::from(phi_prime_at_int::<F>(1 + ints[k]) * prod_except)
                    + Complex::from(s) * self.log_x[k])
                    / two_pi_i;
                if coeff.is_zero() {
                    continue;
                }
                for (a, red) in reductions[k].iter().enumerate() {
                    if !red.is_zero() {
                        divisors[a].add(xl * coeff * red, is_tail);
                    }
                }
            }
        }
        (scalar, divisors)
    }

    /// Twisted component of `Γ_c` along the `g`-th sector: the divisors all
    /// vanish there, so terms are plain products of `φ` values.
    fn gamma_twisted(&self, c: &LatticePoint, g: usize) -> Acc<F> {
        let sector = &self.basis.sectors()[g];
        let mut acc = Acc::new();
        'terms: for l in enumerate_exponents(c, sector, self.basis.fan(), self.trunc.l_max) {
            let mut coeff = F::one();
            for lk in &l {
                if lk.is_integer() && *lk.numer() < 0 {
                    continue 'terms;
                }
                coeff = coeff * phi_shift::<F>(lk);
            }
            acc.add(self.x_pow(&l) * Complex::from(coeff), self.is_tail(&l));
        }
        acc
    }

    /// Untwisted component of `Γ°_d`: the negative support `σ = {k : r_k < 0}`
    /// selects the generator; `|σ| = 1` needs an interior ray (with the
    /// `φ''`-level divisor corrections reduced onto `F`), `|σ| = 2` an
    /// adjacent ray pair.
    fn gamma_circ_untwisted(&self, d: &LatticePoint) -> (Acc<F>, Vec<Acc<F>>) {
        let fan = self.basis.fan();
        let n = fan.n() as usize;
        let r = self.basis.r();
        let two_pi_i = self.two_pi_i();
        let mut f_acc = Acc::new();
        let mut ray_acc = vec![Acc::new(); r];
        let reductions: Vec<Vec<Complex<F>>> =
            (0..=n as i64).map(|k| reduce_d::<Complex<F>>(self.basis, k)).collect();
        let interior = self.basis.interior_rays();
        for l in enumerate_exponents(d, &TwistedSector::Untwisted, fan, self.trunc.l_max) {
            let ints: Vec<i64> = l.iter().map(|v| v.to_integer()).collect();
            let sigma: Vec<usize> =
                ints.iter().enumerate().filter(|(_, &v)| v < 0).map(|(k, _)| k).collect();
            let is_tail = self.is_tail(&l);
            let xl = self.x_pow(&l);
            match sigma.len() {
                1 => {
                    let k0 = sigma[0];
                    let Some(k0_idx) = interior.iter().position(|&i| i == k0 as i64) else {
                        continue; // F vanishes at boundary rays and off the fan
                    };
                    let phis: Vec<F> = ints.iter().map(|&v| phi_at_int::<F>(1 + v)).collect();
                    let mut s_except = F::one();
                    for (mi, p) in phis.iter().enumerate() {
                        if mi != k0 {
                            s_except = s_except * *p;
                        }
                    }
                    let dphi = phi_prime_at_int::<F>(1 + ints[k0]);
                    // F_{k0} coefficient
                    ray_acc[k0_idx]
                        .add(xl * Complex::from(s_except * dphi) / two_pi_i, is_tail);
                    // divisor corrections landing on F via D·F_{k0}
                    let mut f_coeff = Complex::<F>::zero();
                    for k in 0..=n {
                        if reductions[k].iter().all(|v| v.is_zero()) {
                            continue;
                        }
                        let d_coeff = if k == k0 {
                            // φ''/2 + φ' ln x_k, one order deeper past D_k⁻¹
                            (Complex::from(phi_dprime_at_int::<F>(1 + ints[k0]) / cast::<F>(2.0))
                                + Complex::from(dphi) * self.log_x[k0])
                                / (two_pi_i * two_pi_i)
                                * Complex::from(s_except)
                        } else {
                            let mut prod = F::one();
                            for (mi, p) in phis.iter().enumerate() {
                                if mi != k && mi != k0 {
                                    prod = prod * *p;
                                }
                            }
                            (Complex::from(phi_prime_at_int::<F>(1 + ints[k]) * prod)
                                + Complex::from(prod * phis[k]) * self.log_x[k])
                                * Complex::from(dphi)
                                / (two_pi_i * two_pi_i)
                        };
                        if d_coeff.is_zero() {
                            continue;
                        }
                        // D_k reduced, then D_{i_a} F_{k0} = m_{a,k0} F
                        for (a, red) in reductions[k].iter().enumerate() {
                            if !red.is_zero() {
                                let m = m_coeff(self.basis, a, k0_idx);
                                if !m.is_zero() {
                                    f_coeff = f_coeff
                                        + d_coeff
                                            * red
                                            * Complex::from(cast::<F>(ratio_to_f64(&m)));
                                }
                            }
                        }
                    }
                    f_acc.add(xl * f_coeff, is_tail);
                }
                2 => {
                    let (i, j) = (sigma[0] as i64, sigma[1] as i64);
                    if !fan.are_adjacent(i, j) {
                        continue;
                    }
                    let mut prod = F::one();
                    for (mi, &v) in ints.iter().enumerate() {
                        if mi != sigma[0] && mi != sigma[1] {
                            prod = prod * phi_at_int::<F>(1 + v);
                        }
                    }
                    let dphi = phi_prime_at_int::<F>(1 + ints[sigma[0]])
                        * phi_prime_at_int::<F>(1 + ints[sigma[1]]);
                    // F_{ij} = F/(j-i); all divisor corrections die on F_{ij}
                    let coeff = Complex::from(prod * dphi)
                        / (two_pi_i * two_pi_i)
                        / Complex::from(cast::<F>((j - i) as f64));
                    f_acc.add(xl * coeff, is_tail);
                }
                _ => {}
            }
        }
        (f_acc, ray_acc)
    }

    /// Twisted component of `Γ°_d` along the `g`-th sector.
    fn gamma_circ_twisted(&self, d: &LatticePoint, g: usize) -> Acc<F> {
        let sector = &self.basis.sectors()[g];
        let mut acc = Acc::new();
        'terms: for l in enumerate_exponents(d, sector, self.basis.fan(), self.trunc.l_max) {
            let mut coeff = F::one();
            for lk in &l {
                if lk.is_integer() && *lk.numer() < 0 {
                    continue 'terms;
                }
                coeff = coeff * phi_shift::<F>(lk);
            }
            acc.add(self.x_pow(&l) * Complex::from(coeff), self.is_tail(&l));
        }
        acc
    }

    /// `Γ_c ∈ H` with a tail certificate (worst relative last-shell mass over
    /// the components).
    pub fn gamma_h(&self, c: &LatticePoint) -> Result<(HElement<Complex<F>>, F)> {
        if !c.in_cone(self.basis.fan().n()) {
            return Err(Error::Contract(format!("({}, {}) is not in C", c.a, c.b)));
        }
        if c.b + 2 > self.trunc.l_max {
            return Err(Error::Truncation("l_max must be at least deg(c) + 2".into()));
        }
        let (scalar, divisors) = self.gamma_untwisted(c);
        let mut tail = scalar.tail_rel();
        let mut out = HElement::zero(self.basis);
        out.scalar = scalar.value;
        for (a, acc) in divisors.iter().enumerate() {
            out.divisors[a] = acc.value;
            tail = tail.max(acc.tail_rel());
        }
        for g in 0..self.basis.num_twisted() {
            let acc = self.gamma_twisted(c, g);
            out.twisted[g] = acc.value;
            tail = tail.max(acc.tail_rel());
        }
        Ok((out, tail))
    }

    /// `Γ°_d ∈ H^c` with a tail certificate.
    pub fn gamma_hc(&self, d: &LatticePoint) -> Result<(HcElement<Complex<F>>, F)> {
        if !d.in_interior(self.basis.fan().n()) {
            return Err(Error::Contract(format!("({}, {}) is not in C°", d.a, d.b)));
        }
        if d.b + 2 > self.trunc.l_max {
            return Err(Error::Truncation("l_max must be at least deg(d) + 2".into()));
        }
        let (f_acc, ray_acc) = self.gamma_circ_untwisted(d);
        let mut tail = f_acc.tail_rel();
        let mut out = HcElement::zero(self.basis);
        out.f = f_acc.value;
        for (a, acc) in ray_acc.iter().enumerate() {
            out.f_rays[a] = acc.value;
            tail = tail.max(acc.tail_rel());
        }
        for g in 0..self.basis.num_twisted() {
            let acc = self.gamma_circ_twisted(d, g);
            out.twisted[g] = acc.value;
            tail = tail.max(acc.tail_rel());
        }
        Ok((out, tail))
    }

    /// Per-basis-component solution tables of `Γ` on all `c ∈ C` of degree
    /// `≤ degree_bound`, plus the worst tail certificate.
    pub fn h_component_tables(&self, degree_bound: i64) -> Result<(Vec<SolutionTable<F>>, F)> {
        let dim = self.basis.dim();
        let mut tables: Vec<SolutionTable<F>> = (0..dim)
            .map(|a| SolutionTable {
                label: SolutionLabel::GammaH(a),
                degree_bound,
                interior_only: false,
                values: BTreeMap::new(),
                branch: None,
            })
            .collect();
        let mut tail = F::zero();
        for deg in 0..=degree_bound {
            for c in self.basis.fan().degree_points(deg) {
                let (el, t) = self.gamma_h(&c)?;
                tail = tail.max(t);
                for (a, v) in el.coords().into_iter().enumerate() {
                    tables[a].values.insert(c, v);
                }
            }
        }
        Ok((tables, tail))
    }

    /// Per-basis-component tables of `Γ°` on all `d ∈ C°` of degree
    /// `≤ degree_bound`.
    pub fn hc_component_tables(&self, degree_bound: i64) -> Result<(Vec<SolutionTable<F>>, F)> {
        let dim = self.basis.dim();
        let mut tables: Vec<SolutionTable<F>> = (0..dim)
            .map(|b| SolutionTable {
                label: SolutionLabel::GammaHc(b),
                degree_bound,
                interior_only: true,
                values: BTreeMap::new(),
                branch: None,
            })
            .collect();
        let mut tail = F::zero();
        for deg in 1..=degree_bound {
            for d in self.basis.fan().interior_degree_points(deg) {
                let (el, t) = self.gamma_hc(&d)?;
                tail = tail.max(t);
                for (b, v) in el.coords().into_iter().enumerate() {
                    tables[b].values.insert(d, v);
                }
            }
        }
        Ok((tables, tail))
    }
}

/// Basepoint deep in the chamber of the fan: `|x_m| = ε^{h(m)}` with `h`
/// piecewise-linear over the rays, `h(i_k) = i_k²`, bumped by one off the
/// rays; pseudo-random phases from the seed. Retries (reseeding) when the
/// draw is degenerate.
pub fn choose_basepoint<F: Real>(fan: &Fan, epsilon: f64, seed: u64) -> Result<ParameterPoint<F>> {
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::Config(format!("epsilon must lie in (0, 0.1], got {epsilon}")));
    }
    let n = fan.n();
    let mut heights = Vec::with_capacity(n as usize + 1);
    for m in 0..=n {
        let (i, j) = fan.enclosing_cone(m).expect("m lies in some cone");
        let h = if fan.is_ray(m) {
            (m * m) as f64
        } else {
            let lin = (i * i * (j - m) + j * j * (m - i)) as f64 / (j - i) as f64;
            lin + 1.0
        };
        heights.push(h);
    }
    for attempt in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let x: Vec<Complex<F>> = heights
            .iter()
            .map(|&h| {
                let modulus = cast::<F>(epsilon.powf(h));
                let theta = cast::<F>(rng.gen_range(0.0..std::f64::consts::TAU));
                Complex::from_polar(modulus, theta)
            })
            .collect();
        let p = ParameterPoint::new(x);
        if find_roots(&p).is_ok() {
            return Ok(p);
        }
    }
    Err(Error::Degenerate("no nondegenerate basepoint found after reseeding".into()))
}

/// `⟨Γ,Γ°⟩ ∈ H ⊗ H^c` at the given basepoint, entrywise through the duality
/// pairing, with the worst tail certificate of the underlying tables.
pub struct GammaPairing<F: Real> {
    pub tensor: PairingTensor<Complex<F>>,
    pub tail: F,
}

pub fn pair_gamma<F: Real>(ctx: &GammaContext<'_, F>) -> Result<GammaPairing<F>> {
    let (phis, tail_h) = ctx.h_component_tables(1)?;
    let (psis, tail_hc) = ctx.hc_component_tables(2)?;
    let entries = phis
        .iter()
        .map(|a| psis.iter().map(|b| pair(a, b, &ctx.x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaPairing {
        tensor: PairingTensor {
            entries,
            h_labels: ctx.basis.h_labels(),
            hc_labels: ctx.basis.hc_labels(),
        },
        tail: tail_h.max(tail_hc),
    })
}

/// Comparison of `⟨Γ,Γ°⟩` against `-(n/4π²) χ_H⁻¹`.
pub struct DualityReport<F: Real> {
    pub basepoint: ParameterPoint<F>,
    pub computed: PairingTensor<Complex<F>>,
    pub expected: PairingTensor<Complex<F>>,
    /// Largest relative entry deviation; near-zero expected entries are
    /// compared relative to the largest entry of the expected tensor.
    pub max_rel_deviation: F,
    pub tail: F,
}

pub fn verify_duality<F: Real>(
    fan: &Fan,
    trunc: Truncation,
    seed: u64,
) -> Result<DualityReport<F>> {
    let basis = Basis::new(fan.clone());
    let basepoint = choose_basepoint::<F>(fan, trunc.epsilon, seed)?;
    let ctx = GammaContext::new(&basis, basepoint.clone(), trunc)?;
    let pairing = pair_gamma(&ctx)?;
    let mut expected = chi_inverse::<Complex<F>>(&basis)?;
    let scale = Complex::from(-cast::<F>(fan.n() as f64) / (cast::<F>(4.0) * F::PI() * F::PI()));
    for row in expected.entries.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * scale;
        }
    }
    let floor = expected
        .entries
        .iter()
        .flatten()
        .fold(F::zero(), |m, v| m.max(v.norm()))
        * cast::<F>(1e-2);
    let mut max_rel = F::zero();
    for (ra, rb) in pairing.tensor.entries.iter().zip(&expected.entries) {
        for (a, b) in ra.iter().zip(rb) {
            let rel = (a - b).norm() / b.norm().max(floor);
            max_rel = max_rel.max(rel);
        }
    }
    Ok(DualityReport {
        basepoint,
        computed: pairing.tensor,
        expected,
        max_rel_deviation: max_rel,
        tail: pairing.tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::euler_check_relative;

    type C = Complex<f64>;

    fn fan(n: i64, rays: &[i64]) -> Fan {
        Fan::new(n, rays.to_vec()).unwrap()
    }

    fn rat(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn enumerate_untwisted_kernel_n2() {
        let f = fan(2, &[0, 2]);
        let ls = enumerate_exponents(
            &LatticePoint::origin(),
            &TwistedSector::Untwisted,
            &f,
            8,
        );
        // solutions are t·(1,-2,1) with 4|t| ≤ 8
        assert_eq!(ls.len(), 5);
        for l in &ls {
            let t = l[0];
            assert_eq!(l[1], -t - t);
            assert_eq!(l[2], t);
        }
    }

    #[test]
    fn enumerate_twisted_contains_expected_vector() {
        let f = fan(2, &[0, 2]);
        let sector = TwistedSector::twisted(&f, 1).unwrap();
        let ls = enumerate_exponents(&LatticePoint::new(1, 1), &sector, &f, 6);
        assert!(ls.contains(&vec![rat(-1, 2), rat(0, 1), rat(-1, 2)]));
        // every vector satisfies both moment constraints and the coset
        for l in &ls {
            let sum: Ratio<i64> = l.iter().sum();
            let moment: Ratio<i64> =
                l.iter().enumerate().map(|(k, v)| v * Ratio::from_integer(k as i64)).sum();
            assert_eq!(sum, rat(-1, 1));
            assert_eq!(moment, rat(-1, 1));
            assert!((l[0] - sector.frac_at(0)).is_integer());
            assert!((l[1] - sector.frac_at(1)).is_integer());
        }
    }

    fn ctx_for<'a>(basis: &'a Basis, seed: u64) -> GammaContext<'a, f64> {
        let trunc = Truncation::default();
        let bp = choose_basepoint::<f64>(basis.fan(), trunc.epsilon, seed).unwrap();
        GammaContext::new(basis, bp, trunc).unwrap()
    }

    #[test]
    fn basepoint_moduli_follow_heights() {
        let f = fan(2, &[0, 1, 2]);
        let p = choose_basepoint::<f64>(&f, 0.1, 7).unwrap();
        assert!((p.x[0].norm() - 1.0).abs() < 1e-12);
        assert!((p.x[1].norm() - 0.1).abs() < 1e-12);
        assert!((p.x[2].norm() - 1e-4).abs() < 1e-12);

        let coarse = fan(2, &[0, 2]);
        let q = choose_basepoint::<f64>(&coarse, 0.1, 7).unwrap();
        // non-ray m = 1 interpolates to 2 and is bumped by 1
        assert!((q.x[1].norm() - 1e-3).abs() < 1e-12);
        assert!((q.x[2].norm() - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn gamma_origin_is_exactly_one_on_coarse_fan() {
        let basis = Basis::new(fan(2, &[0, 2]));
        let ctx = ctx_for(&basis, 11);
        let (el, _) = ctx.gamma_h(&LatticePoint::origin()).unwrap();
        assert!((el.scalar - C::new(1.0, 0.0)).norm() < 1e-15);
        assert!(el.divisors.is_empty());
    }

    #[test]
    fn gamma_origin_divisor_part_on_full_fan() {
        // D_1-component of Γ_{(0,0)}: the t=0 term contributes the log part
        // ln(x_1/√(x_0 x_2))/(2πi) (from x^{D/2πi}, with φ'(1)ΣD = 0), and
        // the t=1 term adds φ'(-1) x_0 x_2/x_1² /(2πi) = -(x_0 x_2/x_1²)/(2πi)
        let basis = Basis::new(fan(2, &[0, 1, 2]));
        let ctx = ctx_for(&basis, 11);
        let (el, _) = ctx.gamma_h(&LatticePoint::origin()).unwrap();
        let x = &ctx.x.x;
        let tau_i = C::new(0.0, std::f64::consts::TAU);
        let log_part = x[1].ln() - (x[0].ln() + x[2].ln()) * 0.5;
        let ratio = x[0] * x[2] / (x[1] * x[1]);
        let expect = (log_part - ratio) / tau_i;
        assert!(
            (el.divisors[0] - expect).norm() <= 1e-3 * expect.norm(),
            "{} vs {expect}",
            el.divisors[0]
        );
        assert!((el.scalar - C::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gamma_twisted_leading_term() {
        // fan [0,2], c = γ* = (1,1): leading term
        // x_0^{-1/2} x_2^{-1/2} φ(1/2)² = 1/(π x_0^{1/2} x_2^{1/2}),
        // fractional powers on principal branches per coordinate
        let basis = Basis::new(fan(2, &[0, 2]));
        let trunc = Truncation { epsilon: 0.05, ..Default::default() };
        let bp = choose_basepoint::<f64>(basis.fan(), trunc.epsilon, 13).unwrap();
        let ctx = GammaContext::new(&basis, bp, trunc).unwrap();
        let (el, _) = ctx.gamma_h(&LatticePoint::new(1, 1)).unwrap();
        let sqrt_prod = ((ctx.x.x[0].ln() + ctx.x.x[2].ln()) * 0.5).exp();
        let expect = 1.0 / (C::new(std::f64::consts::PI, 0.0) * sqrt_prod);
        assert!(
            (el.twisted[0] - expect).norm() <= 1e-3 * expect.norm(),
            "{} vs {expect}",
            el.twisted[0]
        );
    }

    #[test]
    fn gamma_circ_leading_terms() {
        // ε = 0.05 pushes the subleading shell below the tolerance
        let trunc = Truncation { epsilon: 0.05, ..Default::default() };

        // fan [0,2], d = (2,2): leading term (1/(2πi))² F/(2 x_0 x_2)
        let basis = Basis::new(fan(2, &[0, 2]));
        let bp = choose_basepoint::<f64>(basis.fan(), trunc.epsilon, 17).unwrap();
        let ctx = GammaContext::new(&basis, bp, trunc).unwrap();
        let (el, _) = ctx.gamma_hc(&LatticePoint::new(2, 2)).unwrap();
        let tau = C::new(0.0, std::f64::consts::TAU);
        let expect = 1.0 / (tau * tau * ctx.x.x[0] * ctx.x.x[2] * 2.0);
        assert!(
            (el.f - expect).norm() <= 1e-2 * expect.norm(),
            "{} vs {expect}",
            el.f
        );

        // fan [0,1,2], d = (1,1): leading F_1-coefficient 1/(2πi x_1)
        let basis2 = Basis::new(fan(2, &[0, 1, 2]));
        let bp2 = choose_basepoint::<f64>(basis2.fan(), trunc.epsilon, 17).unwrap();
        let ctx2 = GammaContext::new(&basis2, bp2, trunc).unwrap();
        let (el2, _) = ctx2.gamma_hc(&LatticePoint::new(1, 1)).unwrap();
        let expect2 = 1.0 / (tau * ctx2.x.x[1]);
        assert!(
            (el2.f_rays[0] - expect2).norm() <= 1e-2 * expect2.norm(),
            "{} vs {expect2}",
            el2.f_rays[0]
        );
    }

    #[test]
    fn gamma_tables_satisfy_euler_identities() {
        // checked relative to the row scale: entries grow like ε^{-h} and an
        // absolute residual only measures the row magnitude
        let trunc = Truncation { l_max: 26, ..Default::default() };
        for rays in [vec![0, 2], vec![0, 1, 2]] {
            let basis = Basis::new(fan(2, &rays));
            let bp = choose_basepoint::<f64>(basis.fan(), trunc.epsilon, 29).unwrap();
            let ctx = GammaContext::new(&basis, bp, trunc).unwrap();
            let (phis, _) = ctx.h_component_tables(3).unwrap();
            for t in &phis {
                let res = euler_check_relative(t, &ctx.x);
                assert!(res <= 1e-6, "rays {rays:?} phi {:?}: {res}", t.label);
            }
            let (psis, _) = ctx.hc_component_tables(3).unwrap();
            for t in &psis {
                let res = euler_check_relative(t, &ctx.x);
                assert!(res <= 1e-6, "rays {rays:?} psi {:?}: {res}", t.label);
            }
        }
    }

    #[test]
    fn duality_on_coarse_n2() {
        let f = fan(2, &[0, 2]);
        let rep = verify_duality::<f64>(&f, Truncation::default(), 101).unwrap();
        assert!(rep.tail <= 1e-5, "tail {}", rep.tail);
        assert!(rep.max_rel_deviation <= 1e-3, "dev {}", rep.max_rel_deviation);
        // spot: twisted diagonal entry is -4/π² ≈ -0.4052847
        let idx = 1; // basis order: 1, then twisted (no interior rays)
        let got = rep.computed.entries[idx][idx];
        let expect = C::new(-4.0 / (std::f64::consts::PI * std::f64::consts::PI), 0.0);
        assert!((got - expect).norm() <= 1e-3 * expect.norm(), "{got} vs {expect}");
        // spot: 1⊗F entry is -1/(2π²)
        let f_entry = rep.computed.entries[0][0];
        let expect_f = C::new(-0.5 / (std::f64::consts::PI * std::f64::consts::PI), 0.0);
        assert!((f_entry - expect_f).norm() <= 1e-3 * expect_f.norm(), "{f_entry}");
    }

    #[test]
    fn duality_on_full_n2() {
        let f = fan(2, &[0, 1, 2]);
        let rep = verify_duality::<f64>(&f, Truncation::default(), 103).unwrap();
        assert!(rep.tail <= 1e-5, "tail {}", rep.tail);
        assert!(rep.max_rel_deviation <= 1e-3, "dev {}", rep.max_rel_deviation);
    }

    #[test]
    fn deepening_changes_entries_less_than_the_tail_bound() {
        let f = fan(3, &[0, 1, 3]);
        let basis = Basis::new(f.clone());
        let shallow = Truncation { l_max: 16, ..Default::default() };
        let deep = Truncation { l_max: 20, ..Default::default() };
        let bp = choose_basepoint::<f64>(&f, shallow.epsilon, 59).unwrap();
        let ctx_s = GammaContext::new(&basis, bp.clone(), shallow).unwrap();
        let ctx_d = GammaContext::new(&basis, bp, deep).unwrap();
        let a = pair_gamma(&ctx_s).unwrap();
        let b = pair_gamma(&ctx_d).unwrap();
        let scale = a
            .tensor
            .entries
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.norm()))
            .max(1.0);
        for (ra, rb) in a.tensor.entries.iter().zip(&b.tensor.entries) {
            for (va, vb) in ra.iter().zip(rb) {
                assert!(
                    (va - vb).norm() <= a.tail * scale + 1e-12,
                    "{va} -> {vb}, tail {}",
                    a.tail
                );
            }
        }
    }

    #[test]
    fn pairing_is_stable_under_basepoint_perturbation() {
        let f = fan(2, &[0, 2]);
        let basis = Basis::new(f.clone());
        let trunc = Truncation::default();
        let bp = choose_basepoint::<f64>(&f, trunc.epsilon, 47).unwrap();
        let ctx = GammaContext::new(&basis, bp.clone(), trunc).unwrap();
        let t1 = pair_gamma(&ctx).unwrap();
        let mut bp2 = bp;
        for v in bp2.x.iter_mut() {
            *v = *v * C::new(1.0 + 1e-4, 5e-5);
        }
        let ctx2 = GammaContext::new(&basis, bp2, trunc).unwrap();
        let t2 = pair_gamma(&ctx2).unwrap();
        for (ra, rb) in t1.tensor.entries.iter().zip(&t2.tensor.entries) {
            for (a, b) in ra.iter().zip(rb) {
                assert!((a - b).norm() <= 1e-4, "{a} vs {b}");
            }
        }
    }
}
