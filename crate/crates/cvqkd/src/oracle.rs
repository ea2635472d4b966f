//! Dense-matrix reference implementations.
//!
//! Everything here recomputes quantities the closed forms also produce,
//! through generic linear algebra instead: symplectic spectra from the
//! eigenvalues of iΩΓ, homodyne conditioning from a dense pseudo-inverse
//! Schur complement, and ensemble spectra from a Hermitian eigensolve of
//! the mixture. The self-test battery and the test suites compare the
//! two routes against each other; keep this module free of the closed
//! forms it is meant to check.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use crate::fock::FockVector;
use crate::keyrate::entropy_g;

/// Symplectic eigenvalues of a two-mode covariance matrix in
/// (x_A, p_A, x_B, p_B) ordering: the moduli of the eigenvalues of iΩΓ,
/// returned in descending order, one per mode.
pub fn symplectic_eigenvalues_dense(cm: &[[f64; 4]; 4]) -> [f64; 2] {
    let gamma = DMatrix::from_fn(4, 4, |i, j| cm[i][j]);
    let mut omega = DMatrix::zeros(4, 4);
    for mode in 0..2 {
        omega[(2 * mode, 2 * mode + 1)] = 1.0;
        omega[(2 * mode + 1, 2 * mode)] = -1.0;
    }
    let eigen = (omega * gamma).complex_eigenvalues();
    let mut nus: Vec<f64> = eigen.iter().map(|z| z.im.abs()).collect();
    nus.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // eigenvalues come in ±iν pairs
    [nus[0], nus[2]]
}

/// Homodyne conditioning through the generic pseudo-inverse Schur
/// complement on the dense 4×4 matrix: Γ_A − σ (XΓ_BX)^+ σᵀ.
pub fn condition_homodyne_dense(cm: &[[f64; 4]; 4]) -> [[f64; 2]; 2] {
    let gamma_a = DMatrix::from_fn(2, 2, |i, j| cm[i][j]);
    let gamma_b = DMatrix::from_fn(2, 2, |i, j| cm[i + 2][j + 2]);
    let sigma = DMatrix::from_fn(2, 2, |i, j| cm[i][j + 2]);
    let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let projected = &x * gamma_b * &x;
    let pinv = projected
        .svd(true, true)
        .pseudo_inverse(1e-12)
        .expect("pseudo-inverse of a 2x2 matrix");
    let conditioned = gamma_a - &sigma * pinv * sigma.transpose();
    [
        [conditioned[(0, 0)], conditioned[(0, 1)]],
        [conditioned[(1, 0)], conditioned[(1, 1)]],
    ]
}

/// Post-channel covariance matrix with excess noise added, as a dense
/// array.
pub fn post_channel_dense(v_a: f64, z: f64, t_eff: f64, xi: f64) -> [[f64; 4]; 4] {
    let a = 1.0 + v_a;
    let b = t_eff * v_a + 1.0 + t_eff * xi;
    let c = t_eff.sqrt() * z;
    [
        [a, 0.0, c, 0.0],
        [0.0, a, 0.0, -c],
        [c, 0.0, b, 0.0],
        [0.0, -c, 0.0, b],
    ]
}

/// Two-mode symplectic spectrum of the post-channel state, generic route.
pub fn two_mode_symplectic_reference(v_a: f64, z: f64, t_eff: f64, xi: f64) -> (f64, f64) {
    let [nu1, nu2] = symplectic_eigenvalues_dense(&post_channel_dense(v_a, z, t_eff, xi));
    (nu1, nu2)
}

/// Holevo bound computed entirely through the dense routes:
/// S(AB) from the two-mode spectrum minus S(A|b) from the conditioned
/// one-mode spectrum.
pub fn holevo_reference(v_a: f64, z: f64, t_eff: f64, xi: f64) -> f64 {
    let cm = post_channel_dense(v_a, z, t_eff, xi);
    let [nu1, nu2] = symplectic_eigenvalues_dense(&cm);
    let cond = condition_homodyne_dense(&cm);
    let det = cond[0][0] * cond[1][1] - cond[0][1] * cond[1][0];
    let nu3 = det.max(0.0).sqrt();
    entropy_g((nu1 - 1.0) / 2.0) + entropy_g((nu2 - 1.0) / 2.0) - entropy_g((nu3 - 1.0) / 2.0)
}

/// Eigenvalues and eigenvectors of the uniform mixture Σ|ψ_j⟩⟨ψ_j|/m,
/// from a dense Hermitian eigensolve. Pairs are returned sorted by
/// descending eigenvalue.
pub fn mixture_eigenpairs(states: &[FockVector]) -> Vec<(f64, Vec<Complex64>)> {
    let dim = states
        .iter()
        .map(|s| s.truncation() + 1)
        .max()
        .expect("at least one state");
    let p = 1.0 / states.len() as f64;
    let mut rho: DMatrix<Complex<f64>> = DMatrix::zeros(dim, dim);
    for state in states {
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += p * state.coeff(i) * state.coeff(j).conj();
            }
        }
    }
    let eigen = nalgebra::linalg::SymmetricEigen::new(rho);
    // The QR iteration can emit NaNs inside the huge zero cluster of this
    // rank-m matrix; those carry no information and are dropped. A missing
    // genuine eigenvalue would surface in the comparisons downstream.
    let mut pairs: Vec<(f64, Vec<Complex64>)> = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_nan())
        .map(|(idx, &l)| {
            let column: Vec<Complex64> = eigen.eigenvectors.column(idx).iter().copied().collect();
            (l, column)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    pairs
}

/// Nonzero spectrum of the uniform mixture from its m×m Gram matrix:
/// the eigenvalues of (⟨ψ_j|ψ_l⟩)/m, descending.
pub fn gram_eigenvalues(states: &[FockVector]) -> Vec<f64> {
    let m = states.len();
    let p = 1.0 / m as f64;
    let gram: DMatrix<Complex<f64>> =
        DMatrix::from_fn(m, m, |j, l| p * states[j].inner(&states[l]));
    let mut values: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}
