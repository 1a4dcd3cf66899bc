//! Orbifold cohomology `H = ⊕ H_γ` and its dual module `H^c`, the duality
//! involution, Todd weights, the Euler pairing `χ_H` and its closed-form
//! inverse, and Chern-character relation checks for the K-theory
//! presentation.
//!
//! Everything is generic over the coefficient ring: exact rationals or
//! `ℚ(√5)` for the identity checks, complex floats for the Gamma series.

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::Zero;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fan::{box_count, dual_sector, twisted_sectors, Fan, TwistedSector};
use crate::scalar::{cast, Coeff, Real};

/// Fan-derived index data shared by all algebra operations: interior rays
/// carry the divisor basis, twisted sectors are listed in increasing `m`.
#[derive(Clone, Debug)]
pub struct Basis {
    fan: Fan,
    sectors: Vec<TwistedSector>,
    duals: Vec<usize>,
}

impl Basis {
    pub fn new(fan: Fan) -> Self {
        let sectors = twisted_sectors(&fan);
        let duals = sectors
            .iter()
            .map(|s| {
                let d = dual_sector(s).expect("twisted sector has a dual");
                sectors.iter().position(|t| *t == d).expect("dual sector is a box element")
            })
            .collect();
        Basis { fan, sectors, duals }
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn interior_rays(&self) -> &[i64] {
        self.fan.interior_rays()
    }

    /// Number of interior rays.
    pub fn r(&self) -> usize {
        self.fan.interior_rays().len()
    }

    pub fn sectors(&self) -> &[TwistedSector] {
        &self.sectors
    }

    pub fn num_twisted(&self) -> usize {
        self.sectors.len()
    }

    /// `dim H = dim H^c = n`.
    pub fn dim(&self) -> usize {
        1 + self.r() + self.num_twisted()
    }

    /// Index of the dual sector `γ*`.
    pub fn dual(&self, k: usize) -> usize {
        self.duals[k]
    }

    /// Labels of the `H` basis `{1, D_{i_k}, 1_γ}`, in tensor order.
    pub fn h_labels(&self) -> Vec<String> {
        let mut out = vec!["1".to_string()];
        out.extend(self.interior_rays().iter().map(|i| format!("D_{i}")));
        out.extend(self.sectors.iter().map(|s| format!("1_({},1)", s.point().a)));
        out
    }

    /// Labels of the `H^c` basis `{F, F_{i_k}, F_γ}`, in tensor order.
    pub fn hc_labels(&self) -> Vec<String> {
        let mut out = vec!["F".to_string()];
        out.extend(self.interior_rays().iter().map(|i| format!("F_{i}")));
        out.extend(self.sectors.iter().map(|s| format!("F_({},1)", s.point().a)));
        out
    }
}

/// Element of `H` in the basis `{1_{(0,0)}, D_{i_1..i_r}, 1_γ}`.
///
/// The ring is the direct product of the sector rings, so the multiplicative
/// unit has coefficient one in every sector, not just at `1_{(0,0)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HElement<T> {
    pub scalar: T,
    pub divisors: Vec<T>,
    pub twisted: Vec<T>,
}

impl<T: Coeff> HElement<T> {
    pub fn zero(basis: &Basis) -> Self {
        HElement {
            scalar: T::zero(),
            divisors: vec![T::zero(); basis.r()],
            twisted: vec![T::zero(); basis.num_twisted()],
        }
    }

    /// The ring unit: one in every sector.
    pub fn unit(basis: &Basis) -> Self {
        HElement {
            scalar: T::one(),
            divisors: vec![T::zero(); basis.r()],
            twisted: vec![T::one(); basis.num_twisted()],
        }
    }

    /// Basis vector `1_{(0,0)}`.
    pub fn untwisted_unit(basis: &Basis) -> Self {
        let mut e = Self::zero(basis);
        e.scalar = T::one();
        e
    }

    /// Basis vector `D_{i_k}` (`k`-th interior ray).
    pub fn divisor(basis: &Basis, k: usize) -> Self {
        let mut e = Self::zero(basis);
        e.divisors[k] = T::one();
        e
    }

    /// Basis vector `1_γ` for the `k`-th twisted sector.
    pub fn sector_unit(basis: &Basis, k: usize) -> Self {
        let mut e = Self::zero(basis);
        e.twisted[k] = T::one();
        e
    }

    /// Tensor-order coordinates `[scalar, divisors…, twisted…]`.
    pub fn coords(&self) -> Vec<T> {
        let mut out = vec![self.scalar.clone()];
        out.extend(self.divisors.iter().cloned());
        out.extend(self.twisted.iter().cloned());
        out
    }
}

/// Element of `H^c` in the basis `{F, F_{i_1..i_r}, F_{∅,γ}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HcElement<T> {
    pub f: T,
    pub f_rays: Vec<T>,
    pub twisted: Vec<T>,
}

impl<T: Coeff> HcElement<T> {
    pub fn zero(basis: &Basis) -> Self {
        HcElement {
            f: T::zero(),
            f_rays: vec![T::zero(); basis.r()],
            twisted: vec![T::zero(); basis.num_twisted()],
        }
    }

    /// Basis vector `F`.
    pub fn f_unit(basis: &Basis) -> Self {
        let mut e = Self::zero(basis);
        e.f = T::one();
        e
    }

    /// Basis vector `F_{i_k}`.
    pub fn f_ray(basis: &Basis, k: usize) -> Self {
        let mut e = Self::zero(basis);
        e.f_rays[k] = T::one();
        e
    }

    /// Basis vector `F_{∅,γ}` for the `k`-th twisted sector.
    pub fn f_sector(basis: &Basis, k: usize) -> Self {
        let mut e = Self::zero(basis);
        e.twisted[k] = T::one();
        e
    }

    pub fn coords(&self) -> Vec<T> {
        let mut out = vec![self.f.clone()];
        out.extend(self.f_rays.iter().cloned());
        out.extend(self.twisted.iter().cloned());
        out
    }
}

/// Expand `D_i` over the interior-ray basis: zero off the fan, the two linear
/// relations `Σ D_i = 0`, `Σ i D_i = 0` eliminate the boundary rays.
pub fn reduce_d<T: Coeff>(basis: &Basis, i: i64) -> Vec<T> {
    let n = basis.fan().n();
    let rays = basis.interior_rays();
    let mut out = vec![T::zero(); rays.len()];
    if !basis.fan().is_ray(i) {
        return out;
    }
    if i == 0 {
        for (k, &ik) in rays.iter().enumerate() {
            out[k] = T::from_ratio(&Ratio::new(ik - n, n));
        }
    } else if i == n {
        for (k, &ik) in rays.iter().enumerate() {
            out[k] = -T::from_ratio(&Ratio::new(ik, n));
        }
    } else {
        let k = rays.iter().position(|&r| r == i).expect("interior ray");
        out[k] = T::one();
    }
    out
}

/// Product in `H`: componentwise per sector, with `D`-products vanishing.
pub fn multiply<T: Coeff>(a: &HElement<T>, b: &HElement<T>) -> HElement<T> {
    HElement {
        scalar: a.scalar.clone() * b.scalar.clone(),
        divisors: a
            .divisors
            .iter()
            .zip(&b.divisors)
            .map(|(da, db)| a.scalar.clone() * db.clone() + b.scalar.clone() * da.clone())
            .collect(),
        twisted: a.twisted.iter().zip(&b.twisted).map(|(ta, tb)| ta.clone() * tb.clone()).collect(),
    }
}

/// `m_{kl}`: the `F`-coefficient of `D_{i_k} F_{i_l}` (tridiagonal).
pub fn m_coeff(basis: &Basis, k: usize, l: usize) -> Ratio<i64> {
    let rays = basis.fan().rays();
    // interior ray index k corresponds to rays[k+1]
    if k == l {
        -(Ratio::new(1, rays[k + 1] - rays[k]) + Ratio::new(1, rays[k + 2] - rays[k + 1]))
    } else if k.abs_diff(l) == 1 {
        Ratio::new(1, (rays[l + 1] - rays[k + 1]).abs())
    } else {
        Ratio::new(0, 1)
    }
}

/// Module action of `H` on `H^c`: `D_i F = 0`, `D_i F_j` through the
/// tridiagonal rule, sectors act componentwise.
pub fn module_action<T: Coeff>(basis: &Basis, a: &HElement<T>, beta: &HcElement<T>) -> HcElement<T> {
    let r = basis.r();
    let mut f = a.scalar.clone() * beta.f.clone();
    for k in 0..r {
        for l in 0..r {
            let m = m_coeff(basis, k, l);
            if !m.is_zero() {
                f = f + a.divisors[k].clone() * beta.f_rays[l].clone() * T::from_ratio(&m);
            }
        }
    }
    HcElement {
        f,
        f_rays: beta.f_rays.iter().map(|t| a.scalar.clone() * t.clone()).collect(),
        twisted: a
            .twisted
            .iter()
            .zip(&beta.twisted)
            .map(|(ta, tb)| ta.clone() * tb.clone())
            .collect(),
    }
}

/// Duality involution: `(D_i)* = -D_i`, `(1_γ)* = 1_{γ*}`.
pub fn star<T: Coeff>(basis: &Basis, a: &HElement<T>) -> HElement<T> {
    let mut twisted = vec![T::zero(); basis.num_twisted()];
    for (k, t) in a.twisted.iter().enumerate() {
        twisted[basis.dual(k)] = t.clone();
    }
    HElement {
        scalar: a.scalar.clone(),
        divisors: a.divisors.iter().map(|d| -d.clone()).collect(),
        twisted,
    }
}

/// Todd weight of a sector: `1` untwisted, `1/(4 sin²(π γ_i))` twisted.
/// `None` when the value is not representable in `T`.
pub fn todd<T: Coeff>(sector: &TwistedSector) -> Option<T> {
    match sector {
        TwistedSector::Untwisted => Some(T::one()),
        TwistedSector::Twisted { frac_i, .. } => T::four_sin2_pi(frac_i).map(|s| T::one() / s),
    }
}

/// Sector integrals: `∫F = 1`, `∫F_k = 0` on the untwisted sector and
/// `∫_γ F_{∅,γ} = 1` on twisted ones.
pub fn integrate_untwisted<T: Coeff>(beta: &HcElement<T>) -> T {
    beta.f.clone()
}

pub fn integrate_twisted<T: Coeff>(beta: &HcElement<T>, sector: usize) -> T {
    beta.twisted[sector].clone()
}

/// Euler characteristic pairing
/// `χ_H(α,β) = Σ_γ (1/|Box σ(γ)|) ∫_γ Td(γ) (α* β)`.
pub fn chi_pair<T: Coeff>(basis: &Basis, alpha: &HElement<T>, beta: &HcElement<T>) -> Result<T> {
    let prod = module_action(basis, &star(basis, alpha), beta);
    // untwisted: Td = 1 + ½ Σ D_i = 1 exactly and |Box| = 1
    let mut acc = integrate_untwisted(&prod);
    for (g, sector) in basis.sectors().iter().enumerate() {
        let TwistedSector::Twisted { rays: (i, j), frac_i, .. } = sector else { unreachable!() };
        let four_sin2 = T::four_sin2_pi(frac_i).ok_or_else(|| {
            Error::Inexact(format!("Todd weight for γ_i = {frac_i} needs a larger ring"))
        })?;
        let weight = T::one() / (T::from_int(box_count(*i, *j)) * four_sin2);
        acc = acc + weight * integrate_twisted(&prod, g);
    }
    Ok(acc)
}

/// The tridiagonal matrix `M = (m_{kl})` over the interior rays.
pub fn m_matrix<T: Coeff>(basis: &Basis) -> Vec<Vec<T>> {
    let r = basis.r();
    (0..r).map(|k| (0..r).map(|l| T::from_ratio(&m_coeff(basis, k, l))).collect()).collect()
}

/// Closed-form inverse `G` of `M`: `g_{kl} = -(i_k/n)(n - i_l)` for `k ≤ l`,
/// symmetric.
pub fn g_matrix<T: Coeff>(basis: &Basis) -> Vec<Vec<T>> {
    let n = basis.fan().n();
    let rays = basis.interior_rays();
    let r = rays.len();
    (0..r)
        .map(|k| {
            (0..r)
                .map(|l| {
                    let (a, b) = if k <= l { (rays[k], rays[l]) } else { (rays[l], rays[k]) };
                    T::from_ratio(&-Ratio::new(a * (n - b), n))
                })
                .collect()
        })
        .collect()
}

/// Matrix indexed by the `H` basis (rows) and `H^c` basis (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct PairingTensor<T> {
    pub entries: Vec<Vec<T>>,
    pub h_labels: Vec<String>,
    pub hc_labels: Vec<String>,
}

impl<T: Coeff> PairingTensor<T> {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

fn h_basis_vectors<T: Coeff>(basis: &Basis) -> Vec<HElement<T>> {
    let mut out = vec![HElement::untwisted_unit(basis)];
    out.extend((0..basis.r()).map(|k| HElement::divisor(basis, k)));
    out.extend((0..basis.num_twisted()).map(|k| HElement::sector_unit(basis, k)));
    out
}

fn hc_basis_vectors<T: Coeff>(basis: &Basis) -> Vec<HcElement<T>> {
    let mut out = vec![HcElement::f_unit(basis)];
    out.extend((0..basis.r()).map(|k| HcElement::f_ray(basis, k)));
    out.extend((0..basis.num_twisted()).map(|k| HcElement::f_sector(basis, k)));
    out
}

/// `χ_H` on all basis pairs, computed through the ring operations.
pub fn chi_matrix<T: Coeff>(basis: &Basis) -> Result<PairingTensor<T>> {
    let hv = h_basis_vectors::<T>(basis);
    let hcv = hc_basis_vectors::<T>(basis);
    let entries = hv
        .iter()
        .map(|a| hcv.iter().map(|b| chi_pair(basis, a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(PairingTensor { entries, h_labels: basis.h_labels(), hc_labels: basis.hc_labels() })
}

/// The block form of `χ_H`: `diag(1, -M)` on the untwisted part and the
/// twisted diagonal `1/((j-i) 4 sin²(π γ_i))` pairing `1_γ` with `F_{∅,γ*}`.
pub fn chi_block_matrix<T: Coeff>(basis: &Basis) -> Result<PairingTensor<T>> {
    let dim = basis.dim();
    let r = basis.r();
    let mut entries = vec![vec![T::zero(); dim]; dim];
    entries[0][0] = T::one();
    let m = m_matrix::<T>(basis);
    for k in 0..r {
        for l in 0..r {
            entries[1 + k][1 + l] = -m[k][l].clone();
        }
    }
    for (g, sector) in basis.sectors().iter().enumerate() {
        let TwistedSector::Twisted { rays: (i, j), frac_i, .. } = sector else { unreachable!() };
        let s = T::four_sin2_pi(frac_i).ok_or_else(|| {
            Error::Inexact(format!("Todd weight for γ_i = {frac_i} needs a larger ring"))
        })?;
        entries[1 + r + g][1 + r + basis.dual(g)] = T::one() / (T::from_int(box_count(*i, *j)) * s);
    }
    Ok(PairingTensor { entries, h_labels: basis.h_labels(), hc_labels: basis.hc_labels() })
}

/// Closed-form inverse `χ_H⁻¹ ∈ H ⊗ H^c`:
/// `Σ (j-i) 4 sin²(π γ_i) 1_γ ⊗ F_{∅,γ*} + 1 ⊗ F - Σ g_{kl} D_{i_k} ⊗ F_{i_l}`.
pub fn chi_inverse<T: Coeff>(basis: &Basis) -> Result<PairingTensor<T>> {
    let dim = basis.dim();
    let r = basis.r();
    let mut entries = vec![vec![T::zero(); dim]; dim];
    entries[0][0] = T::one();
    let g = g_matrix::<T>(basis);
    for k in 0..r {
        for l in 0..r {
            entries[1 + k][1 + l] = -g[k][l].clone();
        }
    }
    for (gi, sector) in basis.sectors().iter().enumerate() {
        let TwistedSector::Twisted { rays: (i, j), frac_i, .. } = sector else { unreachable!() };
        let s = T::four_sin2_pi(frac_i).ok_or_else(|| {
            Error::Inexact(format!("Todd weight for γ_i = {frac_i} needs a larger ring"))
        })?;
        entries[1 + r + gi][1 + r + basis.dual(gi)] = T::from_int(box_count(*i, *j)) * s;
    }
    Ok(PairingTensor { entries, h_labels: basis.h_labels(), hc_labels: basis.hc_labels() })
}

/// `B · Aᵀ` for tensors over the same bases; the inverse property is
/// `chi_inverse · chi_matrixᵀ = Id`.
pub fn tensor_contract<T: Coeff>(b: &PairingTensor<T>, a: &PairingTensor<T>) -> Vec<Vec<T>> {
    let dim = b.dim();
    let mut out = vec![vec![T::zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = T::zero();
            for k in 0..dim {
                acc = acc + b.entries[i][k].clone() * a.entries[j][k].clone();
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn is_identity<T: Coeff>(m: &[Vec<T>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| if i == j { *v == T::one() } else { v.is_zero() })
    })
}

// ---------------------------------------------------------------------------
// K-theory presentation relations and the Chern character on monomials
// ---------------------------------------------------------------------------

/// A Laurent polynomial in `R_0..R_n`: list of `(exponent vector, coefficient)`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub terms: Vec<(Vec<i64>, i64)>,
}

/// The rank-2 presentation of `K_0`: `R_i - 1` off the fan, `Π R_i - 1`,
/// `Π R_i^i - 1`, and `(R_i-1)(R_j-1)` for non-adjacent ray pairs.
pub fn k0_relations(fan: &Fan) -> Vec<Relation> {
    let n = fan.n() as usize;
    let zero = vec![0i64; n + 1];
    let mut out = Vec::new();
    for i in 1..fan.n() {
        if !fan.is_ray(i) {
            let mut e = zero.clone();
            e[i as usize] = 1;
            out.push(Relation {
                name: format!("R_{i} - 1"),
                terms: vec![(e, 1), (zero.clone(), -1)],
            });
        }
    }
    let mut prod = zero.clone();
    let mut prod_weighted = zero.clone();
    for &i in fan.rays() {
        prod[i as usize] = 1;
        prod_weighted[i as usize] = i;
    }
    out.push(Relation { name: "Π R_i - 1".to_string(), terms: vec![(prod, 1), (zero.clone(), -1)] });
    out.push(Relation {
        name: "Π R_i^i - 1".to_string(),
        terms: vec![(prod_weighted, 1), (zero.clone(), -1)],
    });
    let rays = fan.rays();
    for a in 0..rays.len() {
        for b in a + 2..rays.len() {
            let (i, j) = (rays[a], rays[b]);
            let mut ei = zero.clone();
            ei[i as usize] = 1;
            let mut ej = zero.clone();
            ej[j as usize] = 1;
            let mut eij = zero.clone();
            eij[i as usize] = 1;
            eij[j as usize] = 1;
            out.push(Relation {
                name: format!("(R_{i}-1)(R_{j}-1)"),
                terms: vec![(eij, 1), (ei, -1), (ej, -1), (zero.clone(), 1)],
            });
        }
    }
    out
}

/// Untwisted Chern character of a monomial `Π R_i^{l_i}`:
/// `e^{Σ l_i D_i} = 1 + Σ l_i D_i` after reduction (all `D`-products vanish).
pub fn ch_monomial_untwisted<T: Coeff>(basis: &Basis, exps: &[i64]) -> (T, Vec<T>) {
    let mut div = vec![T::zero(); basis.r()];
    for (i, &l) in exps.iter().enumerate() {
        if l != 0 {
            let red = reduce_d::<T>(basis, i as i64);
            for (k, c) in red.into_iter().enumerate() {
                div[k] = div[k].clone() + T::from_int(l) * c;
            }
        }
    }
    (T::one(), div)
}

/// Twisted Chern character of a monomial is the phase `e^{2πi Σ γ_k l_k}`;
/// returns the exponent `Σ γ_k l_k mod 1` as an exact rational.
pub fn ch_monomial_twisted_phase(sector: &TwistedSector, exps: &[i64]) -> Ratio<i64> {
    let mut acc = Ratio::new(0, 1);
    for (k, &l) in exps.iter().enumerate() {
        let g = sector.frac_at(k as i64);
        if !g.is_zero() && l != 0 {
            acc += g * Ratio::from_integer(l);
        }
    }
    acc - acc.floor()
}

/// Exact check that every presentation relation maps to zero in every sector.
pub fn ch_relations_hold_exact(basis: &Basis) -> bool {
    for rel in k0_relations(basis.fan()) {
        // untwisted sector: scalar and divisor parts must cancel exactly
        let mut scalar = Ratio::<i64>::new(0, 1);
        let mut div = vec![num_rational::BigRational::zero(); basis.r()];
        for (exps, coeff) in &rel.terms {
            scalar += Ratio::from_integer(*coeff);
            let (_, d) = ch_monomial_untwisted::<num_rational::BigRational>(basis, exps);
            for (k, c) in d.into_iter().enumerate() {
                div[k] += num_rational::BigRational::from_integer((*coeff).into()) * c;
            }
        }
        if !scalar.is_zero() || div.iter().any(|c| !c.is_zero()) {
            return false;
        }
        // twisted sectors: group coefficients by exact phase
        for sector in basis.sectors() {
            let mut by_phase: BTreeMap<Ratio<i64>, i64> = BTreeMap::new();
            for (exps, coeff) in &rel.terms {
                *by_phase.entry(ch_monomial_twisted_phase(sector, exps)).or_insert(0) += coeff;
            }
            if by_phase.values().any(|&c| c != 0) {
                return false;
            }
        }
    }
    true
}

/// Complex-path residual: the largest norm of a relation image over all
/// sectors, with phases evaluated in floating point.
pub fn ch_relations_residual<F: Real>(basis: &Basis) -> F {
    let mut worst = F::zero();
    for rel in k0_relations(basis.fan()) {
        let mut scalar = Complex::<F>::zero();
        let mut div = vec![Complex::<F>::zero(); basis.r()];
        for (exps, coeff) in &rel.terms {
            let c = Complex::new(cast::<F>(*coeff as f64), F::zero());
            scalar = scalar + c;
            let (_, d) = ch_monomial_untwisted::<Complex<F>>(basis, exps);
            for (k, v) in d.into_iter().enumerate() {
                div[k] = div[k] + c * v;
            }
        }
        worst = worst.max(scalar.norm());
        for v in &div {
            worst = worst.max(v.norm());
        }
        for sector in basis.sectors() {
            let mut acc = Complex::<F>::zero();
            for (exps, coeff) in &rel.terms {
                let phase = ch_monomial_twisted_phase(sector, exps);
                let theta =
                    F::TAU() * cast::<F>(*phase.numer() as f64) / cast::<F>(*phase.denom() as f64);
                acc = acc + Complex::from_polar(cast::<F>(*coeff as f64), theta);
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QuadRat;
    use num_rational::BigRational;
    use num_traits::One;

    fn basis(n: i64, rays: &[i64]) -> Basis {
        Basis::new(Fan::new(n, rays.to_vec()).unwrap())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reduce_d_examples() {
        let b = basis(4, &[0, 1, 4]);
        assert_eq!(reduce_d::<BigRational>(&b, 2), vec![rat(0, 1)]);
        assert_eq!(reduce_d::<BigRational>(&b, 4), vec![rat(-1, 4)]);
        assert_eq!(reduce_d::<BigRational>(&b, 0), vec![rat(-3, 4)]);
        assert_eq!(reduce_d::<BigRational>(&b, 1), vec![rat(1, 1)]);
    }

    #[test]
    fn reduce_d_kills_the_linear_relations() {
        for (n, rays) in [(4, vec![0, 1, 4]), (6, vec![0, 2, 3, 6]), (5, vec![0, 5])] {
            let b = basis(n, &rays);
            let mut sum = vec![BigRational::zero(); b.r()];
            let mut weighted = vec![BigRational::zero(); b.r()];
            for &i in b.fan().rays() {
                let red = reduce_d::<BigRational>(&b, i);
                for (k, c) in red.iter().enumerate() {
                    sum[k] += c;
                    weighted[k] += BigRational::from_integer(i.into()) * c;
                }
            }
            assert!(sum.iter().all(|c| c.is_zero()));
            assert!(weighted.iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn multiply_rules() {
        let b = basis(4, &[0, 1, 4]);
        let d = HElement::<BigRational>::divisor(&b, 0);
        assert_eq!(multiply(&d, &d), HElement::zero(&b));

        let unit = HElement::<BigRational>::unit(&b);
        let mut a = HElement::zero(&b);
        a.scalar = rat(3, 2);
        a.divisors[0] = rat(-1, 3);
        a.twisted[1] = rat(7, 5);
        assert_eq!(multiply(&unit, &a), a);

        // (1 + D)(1 - D) = 1 on the untwisted sector
        let mut p = HElement::<BigRational>::untwisted_unit(&b);
        p.divisors[0] = rat(1, 1);
        let mut q = HElement::<BigRational>::untwisted_unit(&b);
        q.divisors[0] = rat(-1, 1);
        assert_eq!(multiply(&p, &q), HElement::untwisted_unit(&b));
    }

    #[test]
    fn module_action_examples() {
        let b = basis(4, &[0, 1, 4]);
        let d1 = HElement::<BigRational>::divisor(&b, 0);
        let f1 = HcElement::<BigRational>::f_ray(&b, 0);
        let acted = module_action(&b, &d1, &f1);
        // D_1 F_1 = -(1/1 + 1/3) F = -4/3 F
        assert_eq!(acted.f, rat(-4, 3));
        assert!(acted.f_rays.iter().all(|c| c.is_zero()));

        let f = HcElement::<BigRational>::f_unit(&b);
        assert_eq!(module_action(&b, &d1, &f), HcElement::zero(&b));

        let unit = HElement::<BigRational>::untwisted_unit(&b);
        assert_eq!(module_action(&b, &unit, &f1), f1);
    }

    #[test]
    fn star_rules() {
        let b = basis(4, &[0, 1, 4]);
        let d = HElement::<BigRational>::divisor(&b, 0);
        let mut minus_d = HElement::<BigRational>::zero(&b);
        minus_d.divisors[0] = rat(-1, 1);
        assert_eq!(star(&b, &d), minus_d);

        let one = HElement::<BigRational>::untwisted_unit(&b);
        assert_eq!(star(&b, &one), one);

        // sectors m=2 and m=3 swap
        let s2 = HElement::<BigRational>::sector_unit(&b, 0);
        let s3 = HElement::<BigRational>::sector_unit(&b, 1);
        assert_eq!(star(&b, &s2), s3);
        assert_eq!(star(&b, &star(&b, &s2)), s2);
    }

    #[test]
    fn todd_examples() {
        let b2 = basis(2, &[0, 2]);
        assert_eq!(todd::<BigRational>(&TwistedSector::Untwisted), Some(rat(1, 1)));
        // γ_i = 1/2: 1/(4 sin²(π/2)) = 1/4
        assert_eq!(todd::<BigRational>(&b2.sectors()[0]), Some(rat(1, 4)));
        // fan(4,[0,1,4]) m=2: γ_1 = 2/3, 4 sin²(2π/3) = 3
        let b4 = basis(4, &[0, 1, 4]);
        assert_eq!(todd::<BigRational>(&b4.sectors()[0]), Some(rat(1, 3)));
    }

    #[test]
    fn chi_pair_examples() {
        let b = basis(4, &[0, 1, 4]);
        let one = HElement::<BigRational>::untwisted_unit(&b);
        let f = HcElement::<BigRational>::f_unit(&b);
        assert_eq!(chi_pair(&b, &one, &f).unwrap(), rat(1, 1));

        let d = HElement::<BigRational>::divisor(&b, 0);
        let f1 = HcElement::<BigRational>::f_ray(&b, 0);
        // χ(D_k, F_l) = -m_kl = 4/3
        assert_eq!(chi_pair(&b, &d, &f1).unwrap(), rat(4, 3));

        // fan(2,[0,2]): χ(1_γ, F_{∅,γ*}) = 1/(2·4·sin²(π/2)) = 1/8
        let b2 = basis(2, &[0, 2]);
        let s = HElement::<BigRational>::sector_unit(&b2, 0);
        let fs = HcElement::<BigRational>::f_sector(&b2, 0);
        assert_eq!(chi_pair(&b2, &s, &fs).unwrap(), rat(1, 8));
    }

    #[test]
    fn m_and_g_examples() {
        let b = basis(4, &[0, 1, 4]);
        assert_eq!(m_matrix::<BigRational>(&b), vec![vec![rat(-4, 3)]]);
        assert_eq!(g_matrix::<BigRational>(&b), vec![vec![rat(-3, 4)]]);

        let b2 = basis(2, &[0, 1, 2]);
        assert_eq!(m_matrix::<BigRational>(&b2), vec![vec![rat(-2, 1)]]);
        assert_eq!(g_matrix::<BigRational>(&b2), vec![vec![rat(-1, 2)]]);
    }

    fn all_fans(n: i64) -> Vec<Fan> {
        let mut fans = Vec::new();
        for mask in 0..(1u32 << (n - 1) as u32) {
            let mut rays = vec![0];
            for k in 1..n {
                if mask & (1 << (k - 1)) != 0 {
                    rays.push(k);
                }
            }
            rays.push(n);
            fans.push(Fan::new(n, rays).unwrap());
        }
        fans
    }

    #[test]
    fn m_times_g_is_identity_exactly() {
        for n in 2..=8 {
            for fan in all_fans(n) {
                let b = Basis::new(fan);
                let m = m_matrix::<BigRational>(&b);
                let g = g_matrix::<BigRational>(&b);
                let r = b.r();
                for i in 0..r {
                    for j in 0..r {
                        let mut acc = BigRational::zero();
                        for k in 0..r {
                            acc += &m[i][k] * &g[k][j];
                        }
                        let expect = if i == j { BigRational::one() } else { BigRational::zero() };
                        assert_eq!(acc, expect, "n = {n}, entry ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn chi_matrix_matches_block_form_exactly() {
        for n in 2..=6 {
            for fan in all_fans(n) {
                let b = Basis::new(fan);
                let computed = chi_matrix::<QuadRat>(&b).unwrap();
                let block = chi_block_matrix::<QuadRat>(&b).unwrap();
                assert_eq!(computed, block, "n = {n}, rays = {:?}", b.fan().rays());
            }
        }
    }

    #[test]
    fn chi_inverse_is_exact_inverse() {
        for n in 2..=6 {
            for fan in all_fans(n) {
                let b = Basis::new(fan);
                let a = chi_matrix::<QuadRat>(&b).unwrap();
                let inv = chi_inverse::<QuadRat>(&b).unwrap();
                assert!(is_identity(&tensor_contract(&inv, &a)));
            }
        }
    }

    #[test]
    fn chi_inverse_spot_values() {
        // fan(2,[0,2]): twisted coefficient 8, untwisted 1⊗F coefficient 1
        let b = basis(2, &[0, 2]);
        let inv = chi_inverse::<BigRational>(&b).unwrap();
        assert_eq!(inv.entries[0][0], rat(1, 1));
        assert_eq!(inv.entries[1][1], rat(8, 1));

        // fan(2,[0,1,2]): D_1 ⊗ F_1 coefficient -g_11 = 1/2
        let b2 = basis(2, &[0, 1, 2]);
        let inv2 = chi_inverse::<BigRational>(&b2).unwrap();
        assert_eq!(inv2.entries[1][1], rat(1, 2));
    }

    #[test]
    fn dim_is_n() {
        for n in 2..=7 {
            for fan in all_fans(n) {
                assert_eq!(Basis::new(fan).dim() as i64, n);
            }
        }
    }

    #[test]
    fn ch_relations_exact_and_complex() {
        for n in 2..=6 {
            for fan in all_fans(n) {
                let b = Basis::new(fan);
                assert!(ch_relations_hold_exact(&b), "n = {n}, rays = {:?}", b.fan().rays());
                let res = ch_relations_residual::<f64>(&b);
                assert!(res <= 1e-12, "n = {n}, residual {res}");
            }
        }
    }
}
