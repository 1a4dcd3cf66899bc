//! The numeric kernels are generic over the floating scalar; a coarse f32
//! instantiation must work end to end (at f32-appropriate tolerances).

use num_complex::Complex;

use bbgkz_core::cohomology::{chi_inverse, Basis};
use bbgkz_core::contour::{euler_check, phi_at_root, psi_at_root, QuadratureConfig};
use bbgkz_core::fan::{Fan, LatticePoint};
use bbgkz_core::pairing::pair;
use bbgkz_core::poly::{find_roots, ParameterPoint};

type C32 = Complex<f32>;

#[test]
fn residue_pipeline_in_f32() {
    let p = ParameterPoint::<f32>::from_reals(&[1.0, 0.0, 1.0]);
    let roots = find_roots(&p).unwrap();
    assert!((roots.roots[1] - C32::new(0.0, 1.0)).norm() < 1e-5);

    let mut cfg = QuadratureConfig::<f32>::default();
    cfg.node_tol = 1e-6;
    let phi = phi_at_root(&p, &roots, 1, 2, &cfg).unwrap();
    assert!((phi.value(&LatticePoint::new(1, 1)).unwrap() - C32::new(0.0, 0.5)).norm() < 1e-4);
    assert!(euler_check(&phi, &p) < 1e-4);

    let psi0 = psi_at_root(&p, &roots, 0, 2, &cfg).unwrap();
    let psi1 = psi_at_root(&p, &roots, 1, 2, &cfg).unwrap();
    // ⟨Φ^{γ_2}, Ψ^{γ_l}⟩ = 2δ - 1
    let diag = pair(&phi, &psi1, &p).unwrap();
    let off = pair(&phi, &psi0, &p).unwrap();
    assert!((diag - C32::new(1.0, 0.0)).norm() < 1e-3);
    assert!((off - C32::new(-1.0, 0.0)).norm() < 1e-3);
}

#[test]
fn cohomology_over_complex_f32() {
    let basis = Basis::new(Fan::new(2, vec![0, 2]).unwrap());
    let inv = chi_inverse::<C32>(&basis).unwrap();
    assert!((inv.entries[1][1] - C32::new(8.0, 0.0)).norm() < 1e-5);
}
