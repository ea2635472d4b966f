//! Discrete-modulation ensembles and the Alice–Bob correlation.
//!
//! An ensemble mixes `num_states` signal states with equal weight, the
//! amplitude phases being the roots of unity i^j (four-state) or ±1
//! (two-state). Because the Fock coefficients of the j-th signal pick up
//! the phase i^{jk}, the mixture is block diagonal over photon-number
//! residue classes mod m, and each block is rank one: eigenvector k lives
//! on |m·n + k⟩ and its eigenvalue is the probability mass of that class.
//!
//! The correlation Z = ⟨Φ|(âb̂ + â†b̂†)|Φ⟩ of the two-mode purification
//! |Φ⟩ = Σ_k √λ_k |φ_k*⟩|φ_k⟩ is evaluated without materializing the
//! two-mode space: the ladder operators shift the residue class by one, so
//! only adjacent-class contractions survive.
//!
//! Closed trigonometric forms exist for the four-state PASCS eigenvalues
//! and for Z₄. Their cosh−cos style differences lose roughly eight digits
//! near α² ≈ 10⁻³, so below [`CLOSED_FORM_ALPHA_MIN`] the implementation
//! switches to cancellation-free positive-term series and to the numeric
//! purification path.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, Truncation};

/// Below this amplitude the trigonometric closed forms are abandoned for
/// series / numeric evaluation.
pub const CLOSED_FORM_ALPHA_MIN: f64 = 0.05;

/// Signal-state family of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    /// Photon-added-then-subtracted coherent states.
    Pascs,
    /// Plain coherent states.
    Coherent,
}

impl StateFamily {
    pub fn label(&self) -> &'static str {
        match self {
            StateFamily::Pascs => "pascs",
            StateFamily::Coherent => "coherent",
        }
    }
}

/// A discrete set of equiprobable signal states {base(α·phase_j)}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModulationEnsemble {
    family: StateFamily,
    alpha: f64,
    num_states: usize,
    truncation: Truncation,
}

impl ModulationEnsemble {
    pub fn new(
        family: StateFamily,
        alpha: f64,
        num_states: usize,
        truncation: Truncation,
    ) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidParam(format!(
                "alpha must be nonnegative, got {alpha}"
            )));
        }
        if num_states != 2 && num_states != 4 {
            return Err(Error::InvalidParam(format!(
                "num_states must be 2 or 4, got {num_states}"
            )));
        }
        Ok(ModulationEnsemble {
            family,
            alpha,
            num_states,
            truncation,
        })
    }

    /// Four-state ensemble with the default cutoff policy.
    pub fn four_state(family: StateFamily, alpha: f64) -> Result<Self> {
        Self::new(family, alpha, 4, Truncation::default())
    }

    pub fn family(&self) -> StateFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Probability of each signal state.
    pub fn probability(&self) -> f64 {
        1.0 / self.num_states as f64
    }

    /// Phase factor of the j-th signal: i^j (four-state) or (−1)^j
    /// (two-state).
    pub fn phase(&self, j: usize) -> Complex64 {
        match self.num_states {
            4 => match j % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
            _ => {
                if j.is_multiple_of(2) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
        }
    }

    /// The j-th signal state.
    pub fn signal_state(&self, j: usize) -> Result<FockVector> {
        let eta = self.phase(j) * self.alpha;
        match self.family {
            StateFamily::Pascs => fock::pascs_coefficients(eta, self.truncation),
            StateFamily::Coherent => fock::coherent_coefficients(eta, self.truncation),
        }
    }

    /// The zero-phase signal state, whose |c_k|² fix the whole spectrum.
    pub fn base_state(&self) -> Result<FockVector> {
        self.signal_state(0)
    }
}

/// Eigenpairs of an ensemble mixture, ordered by residue class.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<FockVector>,
    block_period: usize,
}

impl SpectralDecomposition {
    /// λ_0..λ_{m−1}.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// |φ_k⟩ with support on Fock indices ≡ k (mod m). Classes with zero
    /// eigenvalue hold a zero vector.
    pub fn eigenvectors(&self) -> &[FockVector] {
        &self.eigenvectors
    }

    pub fn block_period(&self) -> usize {
        self.block_period
    }

    /// Σ λ_k.
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Diagonalizes the ensemble mixture through its residue-class block
/// structure: λ_k = Σ_{n}|c_{mn+k}|², |φ_k⟩ ∝ Σ_n c_{mn+k}|mn+k⟩.
pub fn spectral_numeric(ensemble: &ModulationEnsemble) -> Result<SpectralDecomposition> {
    let base = ensemble.base_state()?;
    let m = ensemble.num_states();
    let n = base.truncation();
    let mut eigenvalues = Vec::with_capacity(m);
    let mut eigenvectors = Vec::with_capacity(m);
    for k in 0..m {
        let mut mass = 0.0;
        let coeffs: Vec<Complex64> = (0..=n)
            .map(|j| {
                if j % m == k {
                    let c = base.coeff(j);
                    mass += c.norm_sqr();
                    c
                } else {
                    Complex64::ZERO
                }
            })
            .collect();
        let class = FockVector::from_coeffs(coeffs);
        eigenvalues.push(mass);
        eigenvectors.push(if mass > 0.0 {
            class.normalized()
        } else {
            class
        });
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        block_period: m,
    })
}

/// Four-state PASCS eigenvalues, dispatching between the trigonometric
/// closed forms and the positive-term series at [`CLOSED_FORM_ALPHA_MIN`].
pub fn eigenvalues_closed(alpha: f64) -> Result<[f64; 4]> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if alpha < 0.0 {
        return Err(Error::InvalidParam(format!(
            "alpha must be nonnegative, got {alpha}"
        )));
    }
    if alpha < CLOSED_FORM_ALPHA_MIN {
        Ok(eigenvalues_series(alpha))
    } else {
        Ok(eigenvalues_trig(alpha))
    }
}

/// Trigonometric closed forms of the four-state PASCS eigenvalues. The
/// cosh/cos differences cancel catastrophically below α ≈ 0.05; use
/// [`eigenvalues_series`] there.
pub fn eigenvalues_trig(alpha: f64) -> [f64; 4] {
    let x = alpha * alpha;
    let x2 = x * x;
    let scale = (-x).exp() / (2.0 * (1.0 + 3.0 * x + x2));
    let (sin, cos) = x.sin_cos();
    let sinh = x.sinh();
    let cosh = x.cosh();
    [
        scale * (3.0 * x * (sinh - sin) + (1.0 - x2) * cos + (1.0 + x2) * cosh),
        scale * (3.0 * x * (cos + cosh) + (1.0 - x2) * sin + (1.0 + x2) * sinh),
        scale * (3.0 * x * (sin + sinh) + (x2 - 1.0) * cos + (1.0 + x2) * cosh),
        scale * (3.0 * x * (cosh - cos) + (x2 - 1.0) * sin + (1.0 + x2) * sinh),
    ]
}

/// Positive-term series for the four-state PASCS eigenvalues,
///
/// λ_k = e^{−α²}/(1+3α²+α⁴) · Σ_n α^{2(4n+k)} (4n+k+1)² / (4n+k)!,
///
/// cancellation-free for every α ≥ 0.
pub fn eigenvalues_series(alpha: f64) -> [f64; 4] {
    let x = alpha * alpha;
    let scale = (-x).exp() / (1.0 + 3.0 * x + x * x);
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        // term(m) = x^m (m+1)² / m! starting at m = k.
        let mut m = k;
        let mut term = x.powi(k as i32) * ((k + 1) * (k + 1)) as f64
            / (1..=k).map(|j| j as f64).product::<f64>();
        let mut acc = 0.0;
        for _ in 0..200 {
            acc += term;
            let mf = m as f64;
            // advance m -> m + 4
            let ratio = x.powi(4) * ((mf + 5.0) / (mf + 1.0)).powi(2)
                / ((mf + 1.0) * (mf + 2.0) * (mf + 3.0) * (mf + 4.0));
            term *= ratio;
            m += 4;
            if term <= acc * 1e-18 {
                break;
            }
        }
        *slot = scale * acc;
    }
    out
}

/// Intermediates of the closed-form four-state PASCS correlation.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationTerms {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Closed trigonometric intermediates entering [`correlation_z4_closed`].
/// All four are nonnegative for real α ≥ 0.
pub fn correlation_terms(alpha: f64) -> CorrelationTerms {
    let x = alpha * alpha;
    let x2 = x * x;
    let (sin, cos) = x.sin_cos();
    let sinh = x.sinh();
    let cosh = x.cosh();
    CorrelationTerms {
        a: (2.0 - x2) * cos + (x2 + 2.0) * cosh + 4.0 * x * (sinh - sin),
        b: 4.0 * x * (cos + cosh) + (2.0 - x2) * sin + (x2 + 2.0) * sinh,
        c: (x2 - 2.0) * cos + (x2 + 2.0) * cosh + 4.0 * x * (sin + sinh),
        d: 4.0 * x * (cosh - cos) + (x2 - 2.0) * sin + (x2 + 2.0) * sinh,
    }
}

/// Closed-form correlation Z₄ of the four-state PASCS ensemble.
///
/// Below [`CLOSED_FORM_ALPHA_MIN`] the 1/√(λ_k λ_j) weights amplify the
/// cancellation error of the trigonometric forms, so the numeric
/// purification path takes over there. Returns 0 at α = 0 by continuity.
pub fn correlation_z4_closed(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite("alpha"));
    }
    if alpha < 0.0 {
        return Err(Error::InvalidParam(format!(
            "alpha must be nonnegative, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    if alpha < CLOSED_FORM_ALPHA_MIN {
        let ensemble = ModulationEnsemble::four_state(StateFamily::Pascs, alpha)?;
        return correlation_numeric(&spectral_numeric(&ensemble)?);
    }
    let x = alpha * alpha;
    let norm = 1.0 + 3.0 * x + x * x;
    let prefactor = (-2.0 * x).exp() * x / (2.0 * norm * norm);
    let [l0, l1, l2, l3] = eigenvalues_trig(alpha);
    let t = correlation_terms(alpha);
    Ok(prefactor
        * (t.a * t.a / (l0 * l1).sqrt()
            + t.b * t.b / (l1 * l2).sqrt()
            + t.c * t.c / (l2 * l3).sqrt()
            + t.d * t.d / (l3 * l0).sqrt()))
}

/// Correlation from the purification contraction,
///
/// Z = 2 Σ_j √(λ_{j⊖1} λ_j) |⟨φ_{j⊖1}|â|φ_j⟩|²,
///
/// valid for any block period; classes with zero weight contribute
/// nothing.
pub fn correlation_numeric(decomp: &SpectralDecomposition) -> Result<f64> {
    let m = decomp.block_period();
    let lambdas = decomp.eigenvalues();
    let vectors = decomp.eigenvectors();
    let mut z = 0.0;
    for j in 0..m {
        let prev = (j + m - 1) % m;
        if lambdas[j] <= 0.0 || lambdas[prev] <= 0.0 {
            continue;
        }
        let lowered = fock::apply_annihilation(&vectors[j]);
        let t = vectors[prev].inner(&lowered);
        z += 2.0 * (lambdas[prev] * lambdas[j]).sqrt() * t.norm_sqr();
    }
    Ok(z)
}

/// Correlation of an ensemble: closed form for the four-state PASCS,
/// numeric purification contraction otherwise.
pub fn correlation(ensemble: &ModulationEnsemble) -> Result<f64> {
    if ensemble.family() == StateFamily::Pascs && ensemble.num_states() == 4 {
        correlation_z4_closed(ensemble.alpha())
    } else {
        correlation_numeric(&spectral_numeric(ensemble)?)
    }
}

/// Gaussian-modulation reference correlation Z = √((1+V_A)² − 1),
/// evaluated as √(V_A(V_A+2)) to stay accurate for small V_A.
pub fn correlation_gauss(v_a: f64) -> Result<f64> {
    if !v_a.is_finite() {
        return Err(Error::NonFinite("v_a"));
    }
    if v_a < 0.0 {
        return Err(Error::InvalidParam(format!(
            "modulation variance must be nonnegative, got {v_a}"
        )));
    }
    Ok((v_a * (v_a + 2.0)).sqrt())
}

/// Modulation variance V_A = 2⟨n⟩ of the base signal state, in shot-noise
/// units (vacuum variance 1, so ⟨X²⟩ = 1 + V_A).
pub fn modulation_variance(ensemble: &ModulationEnsemble) -> Result<f64> {
    Ok(2.0 * ensemble.base_state()?.mean_photon_number())
}

/// Closed form of the PASCS modulation variance,
/// V_A = 2α²(α⁴+5α²+4)/(1+3α²+α⁴).
pub fn pascs_variance_closed(alpha: f64) -> f64 {
    let x = alpha * alpha;
    2.0 * x * (x * x + 5.0 * x + 4.0) / (1.0 + 3.0 * x + x * x)
}
