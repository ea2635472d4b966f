//! Truncated Fock-space representation of single-mode states.
//!
//! A state is a coefficient vector c_0..c_N over the number basis
//! |0⟩..|N⟩. Two signal families are supported:
//!
//! - coherent states |η⟩ with c_k = e^{−|η|²/2} η^k / √(k!),
//! - photon-added-then-subtracted coherent states (PASCS)
//!   â â†|η⟩ / ‖·‖ with c_k = e^{−|η|²/2} η^k (k+1) / √((1+3|η|²+|η|⁴) k!).
//!
//! Coefficients are built with running ratio recurrences, never through
//! explicit factorials, so cutoffs well past k ≈ 170 stay representable in
//! f64. Amplitudes are complex throughout: the four-state ensembles need
//! the phases ±1, ±i.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Photon-number cutoff used when nothing else is requested. Adequate for
/// |η| ≤ 1 with a wide margin.
pub const DEFAULT_TRUNCATION: usize = 60;

/// Hard ceiling for automatic cutoff escalation.
pub const MAX_TRUNCATION: usize = 512;

/// A vector is accepted as converged when |c_N|² ≤ TAIL_TOLERANCE · Σ|c_k|².
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Norm tolerance for states flagged as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Mass a ladder operator may drop past the cutoff before the result is
/// rejected.
const OVERFLOW_TOLERANCE: f64 = 1e-10;

/// Cutoff policy for state constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// Start at `start` and double the cutoff until the tail criterion
    /// holds, up to [`MAX_TRUNCATION`].
    Auto { start: usize },
    /// Use exactly this cutoff and fail if the tail is significant.
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Auto {
            start: DEFAULT_TRUNCATION,
        }
    }
}

impl Truncation {
    /// Cutoff the policy starts from.
    pub fn start(&self) -> usize {
        match *self {
            Truncation::Auto { start } => start,
            Truncation::Fixed(n) => n,
        }
    }
}

/// Coefficients of a single-mode state over |0⟩..|N⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Wraps a raw coefficient list. The list must be non-empty.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "FockVector needs at least |0⟩");
        FockVector { coeffs }
    }

    /// The zero vector on |0⟩..|truncation⟩.
    pub fn zeros(truncation: usize) -> Self {
        FockVector {
            coeffs: vec![Complex64::ZERO; truncation + 1],
        }
    }

    /// Photon-number cutoff N.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of |k⟩; zero past the cutoff.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    /// Σ|c_k|².
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// |Σ|c_k|² − 1| ≤ 10⁻¹⁰.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// |c_N|², the mass sitting in the top coefficient.
    pub fn tail_mass(&self) -> f64 {
        self.coeffs.last().map(|c| c.norm_sqr()).unwrap_or(0.0)
    }

    /// Truncation adequacy: |c_N|² ≤ 10⁻¹⁴ · Σ|c_k|².
    pub fn tail_converged(&self) -> bool {
        self.tail_mass() <= TAIL_TOLERANCE * self.norm_sqr()
    }

    /// Returns the vector scaled to unit norm. A zero vector is returned
    /// unchanged.
    pub fn normalized(&self) -> FockVector {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return self.clone();
        }
        FockVector {
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
        }
    }

    /// ⟨self|other⟩ = Σ c̄_k d_k over the shorter of the two lists.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// ⟨n⟩ = Σ k|c_k|² for a normalized vector.
    pub fn mean_photon_number(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.norm_sqr())
            .sum()
    }
}

fn ensure_finite_amplitude(eta: Complex64) -> Result<()> {
    if eta.re.is_finite() && eta.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("amplitude"))
    }
}

/// Runs `build` under the cutoff policy, doubling on tail failure in auto
/// mode.
fn build_converged(trunc: Truncation, build: impl Fn(usize) -> FockVector) -> Result<FockVector> {
    match trunc {
        Truncation::Fixed(n) => {
            let v = build(n);
            if v.tail_converged() {
                Ok(v)
            } else {
                Err(Error::CutoffTooSmall {
                    truncation: n,
                    tail: v.tail_mass(),
                    limit: TAIL_TOLERANCE * v.norm_sqr(),
                })
            }
        }
        Truncation::Auto { start } => {
            let mut n = start.max(1);
            loop {
                let v = build(n);
                if v.tail_converged() {
                    return Ok(v);
                }
                if n >= MAX_TRUNCATION {
                    return Err(Error::CutoffTooSmall {
                        truncation: n,
                        tail: v.tail_mass(),
                        limit: TAIL_TOLERANCE * v.norm_sqr(),
                    });
                }
                n = (n * 2).min(MAX_TRUNCATION);
            }
        }
    }
}

/// Coefficients of the coherent state |η⟩ up to the cutoff.
///
/// c_0 = e^{−|η|²/2}, c_{k+1} = c_k · η/√(k+1).
pub fn coherent_coefficients(eta: Complex64, trunc: Truncation) -> Result<FockVector> {
    ensure_finite_amplitude(eta)?;
    let x = eta.norm_sqr();
    build_converged(trunc, |n| {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut c = Complex64::new((-x / 2.0).exp(), 0.0);
        coeffs.push(c);
        for k in 0..n {
            c *= eta / ((k + 1) as f64).sqrt();
            coeffs.push(c);
        }
        FockVector::from_coeffs(coeffs)
    })
}

/// Coefficients of the PASCS â â†|η⟩ / ‖â â†|η⟩‖ up to the cutoff.
///
/// c_k = e^{−|η|²/2} η^k (k+1) / √((1+3|η|²+|η|⁴) k!), evaluated through
/// the ratio c_{k+1}/c_k = η (k+2) / ((k+1)√(k+1)).
pub fn pascs_coefficients(eta: Complex64, trunc: Truncation) -> Result<FockVector> {
    ensure_finite_amplitude(eta)?;
    let x = eta.norm_sqr();
    let norm = 1.0 + 3.0 * x + x * x;
    build_converged(trunc, |n| {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut c = Complex64::new((-x / 2.0).exp() / norm.sqrt(), 0.0);
        coeffs.push(c);
        for k in 0..n {
            let kf = k as f64;
            c *= eta * (kf + 2.0) / ((kf + 1.0) * (kf + 1.0).sqrt());
            coeffs.push(c);
        }
        FockVector::from_coeffs(coeffs)
    })
}

/// â: maps c_k ↦ √(k+1) c_{k+1}; the output keeps the input cutoff with a
/// zero top slot.
pub fn apply_annihilation(v: &FockVector) -> FockVector {
    let n = v.truncation();
    let coeffs = (0..=n)
        .map(|k| {
            if k < n {
                ((k + 1) as f64).sqrt() * v.coeff(k + 1)
            } else {
                Complex64::ZERO
            }
        })
        .collect();
    FockVector::from_coeffs(coeffs)
}

/// â†: maps c_k ↦ √k c_{k−1}. The former top coefficient would land past
/// the cutoff; it is dropped, and the call fails if the dropped mass is
/// significant.
pub fn apply_creation(v: &FockVector) -> Result<FockVector> {
    let n = v.truncation();
    let loss = (n as f64 + 1.0) * v.tail_mass();
    if loss > OVERFLOW_TOLERANCE * v.norm_sqr() {
        return Err(Error::TruncationOverflow {
            truncation: n,
            loss,
        });
    }
    let coeffs = (0..=n)
        .map(|k| {
            if k == 0 {
                Complex64::ZERO
            } else {
                (k as f64).sqrt() * v.coeff(k - 1)
            }
        })
        .collect();
    Ok(FockVector::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Reference evaluation through literal factorials, usable for k ≤ 15.
    fn pascs_naive(eta: Complex64, n: usize) -> Vec<Complex64> {
        let x = eta.norm_sqr();
        let norm = (1.0 + 3.0 * x + x * x).sqrt();
        (0..=n)
            .map(|k| {
                let kfact: f64 = (1..=k).map(|j| j as f64).product();
                let kp1fact = kfact * (k + 1) as f64;
                eta.powu(k as u32) * (-x / 2.0).exp() * kp1fact / (norm * kfact.powf(1.5))
            })
            .collect()
    }

    fn coherent_naive(eta: Complex64, n: usize) -> Vec<Complex64> {
        let x = eta.norm_sqr();
        (0..=n)
            .map(|k| {
                let kfact: f64 = (1..=k).map(|j| j as f64).product();
                eta.powu(k as u32) * (-x / 2.0).exp() / kfact.sqrt()
            })
            .collect()
    }

    #[test]
    fn pascs_of_zero_amplitude_is_vacuum() {
        let v = pascs_coefficients(re(0.0), Truncation::Fixed(10)).unwrap();
        assert_eq!(v.coeff(0), re(1.0));
        for k in 1..=10 {
            assert_eq!(v.coeff(k), Complex64::ZERO);
        }
    }

    #[test]
    fn pascs_normalization_includes_exact_prefactor() {
        let v = pascs_coefficients(re(0.13), Truncation::Fixed(30)).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pascs_normalization_on_amplitude_grid() {
        for &alpha in &[0.01, 0.05, 0.13, 0.25, 0.5, 1.0] {
            let v = pascs_coefficients(re(alpha), Truncation::Fixed(60)).unwrap();
            assert!(
                (v.norm_sqr() - 1.0).abs() <= 1e-12,
                "norm off at alpha = {alpha}"
            );
        }
    }

    #[test]
    fn pascs_mean_photon_number_matches_closed_form() {
        // Oracle: direct series Σ k|c_k|², compared against
        // α²(α⁴+5α²+4)/(1+3α²+α⁴).
        let alpha = 0.5f64;
        let v = pascs_coefficients(re(alpha), Truncation::Fixed(40)).unwrap();
        let x = alpha * alpha;
        let expected = x * (x * x + 5.0 * x + 4.0) / (1.0 + 3.0 * x + x * x);
        assert!((v.mean_photon_number() - expected).abs() <= 1e-10);
    }

    #[test]
    fn coherent_of_zero_amplitude_is_vacuum() {
        let v = coherent_coefficients(re(0.0), Truncation::Fixed(5)).unwrap();
        assert_eq!(v.coeff(0), re(1.0));
        for k in 1..=5 {
            assert_eq!(v.coeff(k), Complex64::ZERO);
        }
    }

    #[test]
    fn coherent_norm_and_mean_photon_number() {
        let v = coherent_coefficients(re(0.25), Truncation::Fixed(30)).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() <= 1e-12);
        assert!((v.mean_photon_number() - 0.0625).abs() <= 1e-12);
    }

    #[test]
    fn recurrence_matches_naive_factorials() {
        for &eta in &[re(0.3), re(0.9), Complex64::new(0.2, 0.4), 0.45 * I] {
            let p = pascs_coefficients(eta, Truncation::Fixed(20)).unwrap();
            let p_ref = pascs_naive(eta, 15);
            let c = coherent_coefficients(eta, Truncation::Fixed(20)).unwrap();
            let c_ref = coherent_naive(eta, 15);
            for k in 0..=15 {
                assert!((p.coeff(k) - p_ref[k]).norm() <= 1e-12, "pascs k = {k}");
                assert!((c.coeff(k) - c_ref[k]).norm() <= 1e-12, "coherent k = {k}");
            }
        }
    }

    #[test]
    fn annihilation_of_vacuum_is_zero() {
        let vac = coherent_coefficients(re(0.0), Truncation::Fixed(8)).unwrap();
        let lowered = apply_annihilation(&vac);
        assert!(lowered.norm_sqr() == 0.0);
    }

    #[test]
    fn add_then_subtract_photon_reproduces_pascs() {
        // â â†|η⟩, renormalized, is the PASCS by definition.
        let eta = re(0.37);
        let coh = coherent_coefficients(eta, Truncation::Fixed(40)).unwrap();
        let built = apply_annihilation(&apply_creation(&coh).unwrap()).normalized();
        let direct = pascs_coefficients(eta, Truncation::Fixed(40)).unwrap();
        for k in 0..=40 {
            assert!(
                (built.coeff(k) - direct.coeff(k)).norm() <= 1e-12,
                "mismatch at k = {k}"
            );
        }
    }

    #[test]
    fn number_expectation_of_coherent_state() {
        // ⟨v|â†â|v⟩ = ‖â v‖² = |η|².
        let v = coherent_coefficients(re(0.3), Truncation::Fixed(30)).unwrap();
        let lowered = apply_annihilation(&v);
        assert!((lowered.norm_sqr() - 0.09).abs() <= 1e-12);
    }

    #[test]
    fn ladder_operators_are_adjoint() {
        // ⟨u|â v⟩ = ⟨â†u|v⟩ for vectors with an empty top slot.
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 20;
            let mut u = vec![Complex64::ZERO; n + 1];
            let mut v = vec![Complex64::ZERO; n + 1];
            for k in 0..n {
                u[k] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                v[k] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let u = FockVector::from_coeffs(u);
            let v = FockVector::from_coeffs(v);
            let lhs = u.inner(&apply_annihilation(&v));
            let rhs = apply_creation(&u).unwrap().inner(&v);
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn fixed_cutoff_rejects_fat_tail() {
        let err = pascs_coefficients(re(1.0), Truncation::Fixed(5)).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { truncation: 5, .. }));
    }

    #[test]
    fn auto_cutoff_escalates_until_converged() {
        let v = pascs_coefficients(re(1.0), Truncation::Auto { start: 5 }).unwrap();
        assert!(v.truncation() > 5);
        assert!(v.tail_converged());
        assert!((v.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn creation_rejects_mass_at_the_top() {
        let mut coeffs = vec![Complex64::ZERO; 11];
        coeffs[10] = re(1.0);
        let v = FockVector::from_coeffs(coeffs);
        assert!(matches!(
            apply_creation(&v),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn non_finite_amplitude_is_rejected() {
        let err = pascs_coefficients(re(f64::NAN), Truncation::Fixed(10)).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }
}
