//! The duality pairing between solutions of `bbGKZ(C,0)` and `bbGKZ(C°,0)`:
//!
//! `⟨Φ,Ψ⟩ = Φ_{(0,0)} Σ_{i<j} (j-i)² x_i x_j Ψ_{v_i+v_j}
//!          - Σ_{i<j} n (j-i) x_i x_j Σ_c δ_{ij}^c Φ_c Ψ_d`
//!
//! where `c = (m,1)` runs over `i ≤ m ≤ j` with `d = v_i + v_j - c`, the
//! endpoint weights are `δ = 1/2`, and only terms with `d ∈ C°` are kept.
//! The pairing of two solutions is a constant in `x`.

use num_complex::Complex;
use num_traits::Zero;

use crate::contour::{phi_at_root, phi_trivial, psi_at_root, psi_line, QuadratureConfig, SolutionTable};
use crate::error::Result;
use crate::fan::LatticePoint;
use crate::poly::{ParameterPoint, RootSet};
use crate::scalar::{cast, Real};

/// Evaluate the pairing on two solution tables. `Φ` must be filled through
/// degree 1 (plus the origin), `Ψ` through degree 2.
pub fn pair<F: Real>(
    phi: &SolutionTable<F>,
    psi: &SolutionTable<F>,
    p: &ParameterPoint<F>,
) -> Result<Complex<F>> {
    let n = p.n() as i64;
    let phi00 = phi.value(&LatticePoint::origin())?;
    let mut acc = Complex::<F>::zero();
    for i in 0..=n {
        for j in i + 1..=n {
            let xij = p.x[i as usize] * p.x[j as usize];
            if xij.is_zero() {
                continue;
            }
            let gap = cast::<F>((j - i) as f64);
            // degree-two block: Φ_{(0,0)} (j-i)² x_i x_j Ψ_{v_i+v_j}
            acc = acc + phi00 * xij * psi.value(&LatticePoint::new(i + j, 2))? * Complex::from(gap * gap);
            // degree-one block over c = (m,1), i ≤ m ≤ j, with d = (i+j-m,1) ∈ C°
            let mut inner = Complex::<F>::zero();
            for m in i..=j {
                let d = i + j - m;
                if d <= 0 || d >= n {
                    continue;
                }
                let delta = if m == i || m == j { cast::<F>(0.5) } else { F::one() };
                let phic = phi.value(&LatticePoint::new(m, 1))?;
                let psid = psi.value(&LatticePoint::new(d, 1))?;
                inner = inner + phic * psid * Complex::from(delta);
            }
            acc = acc - inner * xij * Complex::from(cast::<F>(n as f64) * gap);
        }
    }
    Ok(acc)
}

/// Singular values by one-sided Jacobi on the columns, descending.
pub fn singular_values<F: Real>(entries: &[Vec<Complex<F>>]) -> Vec<F> {
    let rows = entries.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = entries[0].len();
    // column-major copy
    let mut a: Vec<Vec<Complex<F>>> =
        (0..cols).map(|j| (0..rows).map(|i| entries[i][j]).collect()).collect();
    let eps = F::epsilon() * cast::<F>(64.0);
    for _sweep in 0..40 {
        let mut rotated = false;
        for pcol in 0..cols {
            for qcol in pcol + 1..cols {
                let mut app = F::zero();
                let mut aqq = F::zero();
                let mut apq = Complex::<F>::zero();
                for i in 0..rows {
                    app = app + a[pcol][i].norm_sqr();
                    aqq = aqq + a[qcol][i].norm_sqr();
                    apq = apq + a[pcol][i].conj() * a[qcol][i];
                }
                if apq.norm() <= eps * (app * aqq).sqrt() || apq.is_zero() {
                    continue;
                }
                rotated = true;
                // phase-align column p, then a real rotation zeroes the pair
                let phase = apq / Complex::from(apq.norm());
                let tau = (aqq - app) / (cast::<F>(2.0) * apq.norm());
                let sign = if tau >= F::zero() { F::one() } else { -F::one() };
                let t = sign / (tau.abs() + (F::one() + tau * tau).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;
                for i in 0..rows {
                    let vp = a[pcol][i] * phase;
                    let vq = a[qcol][i];
                    a[pcol][i] = vp * Complex::from(c) - vq * Complex::from(s);
                    a[qcol][i] = vp * Complex::from(s) + vq * Complex::from(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<F> = a
        .iter()
        .map(|col| col.iter().fold(F::zero(), |acc, v| acc + v.norm_sqr()).sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Entrywise pairing of two solution lists, with singular values and the
/// numerical rank (singular values above `rank_tol · σ_max`).
#[derive(Clone, Debug)]
pub struct PairingMatrix<F: Real> {
    pub entries: Vec<Vec<Complex<F>>>,
    pub singular_values: Vec<F>,
    pub rank: usize,
}

pub fn pairing_matrix<F: Real>(
    phis: &[SolutionTable<F>],
    psis: &[SolutionTable<F>],
    p: &ParameterPoint<F>,
    rank_tol: F,
) -> Result<PairingMatrix<F>> {
    let entries = phis
        .iter()
        .map(|phi| psis.iter().map(|psi| pair(phi, psi, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let sv = singular_values(&entries);
    let cutoff = sv.first().copied().unwrap_or(F::zero()) * rank_tol;
    let rank = sv.iter().filter(|s| **s > cutoff).count();
    Ok(PairingMatrix { entries, singular_values: sv, rank })
}

/// The standard solution families at one parameter point:
/// `[Φ⁰, Φ^{γ_1..γ_n}]` and `[Ψ^{λ₀}, Ψ^{γ_1..γ_n}]`, root labels in the
/// deterministic root order.
pub fn solution_family<F: Real>(
    p: &ParameterPoint<F>,
    roots: &RootSet<F>,
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
) -> Result<(Vec<SolutionTable<F>>, Vec<SolutionTable<F>>)> {
    let n = p.n();
    let mut phis = vec![phi_trivial(n as i64, degree_bound)];
    let mut psis = vec![psi_line(p, roots, degree_bound, cfg)?];
    for k in 0..n {
        phis.push(phi_at_root(p, roots, k, degree_bound, cfg)?);
        psis.push(psi_at_root(p, roots, k, degree_bound, cfg)?);
    }
    Ok((phis, psis))
}

/// Largest spread (entrywise diameter over the samples) of the pairing matrix
/// along a path of parameter points, with solutions continued from sample to
/// sample. Theorem-level expectation: zero up to quadrature error.
pub fn constancy_check<F: Real>(
    samples: &[ParameterPoint<F>],
    degree_bound: i64,
    cfg: &QuadratureConfig<F>,
    rank_tol: F,
) -> Result<F> {
    let matrices = crate::monodromy::pairing_matrices_along(samples, degree_bound, cfg, rank_tol)?;
    Ok(matrix_spread(&matrices))
}

/// Max over entries of (max - min) modulus across a list of equal-shape
/// matrices.
pub fn matrix_spread<F: Real>(matrices: &[PairingMatrix<F>]) -> F {
    let mut worst = F::zero();
    if matrices.is_empty() {
        return worst;
    }
    let rows = matrices[0].entries.len();
    let cols = matrices[0].entries[0].len();
    for i in 0..rows {
        for j in 0..cols {
            for a in 0..matrices.len() {
                for b in a + 1..matrices.len() {
                    let d = (matrices[a].entries[i][j] - matrices[b].entries[i][j]).norm();
                    worst = worst.max(d);
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::find_roots;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn singular_values_of_known_matrices() {
        // [[1,1],[0,1]]: σ² = (3±√5)/2
        let m = vec![vec![C::new(1.0, 0.0), C::new(1.0, 0.0)], vec![C::zero(), C::new(1.0, 0.0)]];
        let sv = singular_values(&m);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sv[0] - phi).abs() < 1e-12);
        assert!((sv[1] - 1.0 / phi).abs() < 1e-12);

        // Frobenius norm preserved on a random complex matrix
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<Vec<C>> = (0..4)
            .map(|_| (0..4).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let frob: f64 = a.iter().flatten().map(|v| v.norm_sqr()).sum();
        let sv = singular_values(&a);
        let sum_sq: f64 = sv.iter().map(|s| s * s).sum();
        assert!((frob - sum_sq).abs() < 1e-10);
    }

    #[test]
    fn pairing_matrix_n2_block_structure() {
        let p = ParameterPoint::from_reals(&[1.0, 0.0, 1.0]);
        let roots = find_roots(&p).unwrap();
        let (phis, psis) = solution_family(&p, &roots, 2, &cfg()).unwrap();
        let pm = pairing_matrix(&phis, &psis, &p, 1e-6).unwrap();
        let n_over_2pii = C::new(0.0, -2.0 / std::f64::consts::TAU);
        assert!((pm.entries[0][0] - n_over_2pii).norm() < 1e-10, "{}", pm.entries[0][0]);
        assert!(pm.entries[0][1].norm() < 1e-10);
        assert!(pm.entries[0][2].norm() < 1e-10);
        // lower-right block nI - J with n = 2
        for k in 1..=2 {
            for l in 1..=2 {
                let expect = if k == l { 1.0 } else { -1.0 };
                assert!(
                    (pm.entries[k][l] - C::new(expect, 0.0)).norm() < 1e-10,
                    "entry ({k},{l}) = {}",
                    pm.entries[k][l]
                );
            }
        }
        assert_eq!(pm.rank, 2);
    }

    #[test]
    fn pairing_values_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 2..=5usize {
            let p = ParameterPoint::new(
                (0..=n)
                    .map(|_| C::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(0.0..6.28)))
                    .collect(),
            );
            let roots = find_roots(&p).unwrap();
            let (phis, psis) = solution_family(&p, &roots, 2, &cfg()).unwrap();
            let pm = pairing_matrix(&phis, &psis, &p, 1e-6).unwrap();
            let nf = n as f64;
            for k in 1..=n {
                for l in 1..=n {
                    let expect = if k == l { nf - 1.0 } else { -1.0 };
                    assert!(
                        (pm.entries[k][l] - C::new(expect, 0.0)).norm() <= 1e-8,
                        "n={n} ({k},{l}): {}",
                        pm.entries[k][l]
                    );
                }
                assert!(pm.entries[0][k].norm() <= 1e-8, "n={n} top row k={k}");
            }
            let expect00 = C::new(0.0, -nf / std::f64::consts::TAU);
            assert!((pm.entries[0][0] - expect00).norm() <= 1e-8, "n={n}: {}", pm.entries[0][0]);
            assert_eq!(pm.rank, n, "n={n}, sv = {:?}", pm.singular_values);
        }
    }

    #[test]
    fn gap_coefficients_keep_pairing_constant() {
        // x_1 = x_2 = 0 is a configuration with gaps at (1,1) and (2,1)
        let p = ParameterPoint::new(vec![
            C::new(1.0, 0.3),
            C::zero(),
            C::zero(),
            C::new(-0.8, 0.9),
        ]);
        let roots = find_roots(&p).unwrap();
        let (phis, psis) = solution_family(&p, &roots, 2, &cfg()).unwrap();
        let pm = pairing_matrix(&phis, &psis, &p, 1e-6).unwrap();
        for k in 1..=3 {
            for l in 1..=3 {
                let expect = if k == l { 2.0 } else { -1.0 };
                assert!(
                    (pm.entries[k][l] - C::new(expect, 0.0)).norm() <= 1e-8,
                    "({k},{l}): {}",
                    pm.entries[k][l]
                );
            }
        }
        assert_eq!(pm.rank, 3);
    }

    #[test]
    fn full_matrix_is_singular() {
        // the n+1 root solutions satisfy Σ_k Ψ^{γ_k} = 0, so P is rank n
        let p = ParameterPoint::from_reals(&[1.0, 0.4, 0.2, 1.0]);
        let roots = find_roots(&p).unwrap();
        let (phis, psis) = solution_family(&p, &roots, 2, &cfg()).unwrap();
        let pm = pairing_matrix(&phis, &psis, &p, 1e-6).unwrap();
        assert_eq!(pm.entries.len(), 4);
        assert!(pm.rank < 4);
        assert_eq!(pm.rank, 3);
    }

    #[test]
    fn single_sample_has_zero_spread() {
        let p = ParameterPoint::from_reals(&[1.0, 0.0, 1.0]);
        let spread = constancy_check(&[p], 2, &cfg(), 1e-6).unwrap();
        assert_eq!(spread, 0.0);
    }
}
