//! Lossy, noisy channel and homodyne detection at the covariance level.
//!
//! Covariance matrices are kept in shot-noise units (vacuum variance 1)
//! and in the block form
//!
//! ```text
//! Γ = [ γ_A 𝕀₂      σ_AB σ_z ]
//!     [ σ_AB σ_z    γ_B 𝕀₂   ]
//! ```
//!
//! so three scalars describe the full two-mode state. Detector efficiency
//! is folded into the transmissivity as extra loss (untrusted detector),
//! and excess noise ξ is referred to the channel input, so it is not
//! rescaled by that folding.

use serde::Serialize;

use crate::error::{Error, Result};

/// Standard telecom fiber loss.
pub const DEFAULT_LOSS_DB_PER_KM: f64 = 0.2;

/// Sign with which excess noise enters γ_B and the conditional variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseSignConvention {
    /// Excess noise adds variance: γ_B = T·V_A + 1 + T·ξ.
    #[default]
    Standard,
    /// Compatibility mode with the subtracted form γ_B = T·V_A + 1 − T·ξ,
    /// which can dip below the vacuum floor when V_A < ξ.
    PaperLiteral,
}

impl NoiseSignConvention {
    pub fn label(&self) -> &'static str {
        match self {
            NoiseSignConvention::Standard => "standard",
            NoiseSignConvention::PaperLiteral => "paper-literal",
        }
    }
}

/// Transmissivity and excess noise, optionally derived from a fiber run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelParams {
    transmissivity: f64,
    excess_noise: f64,
    fiber_length_km: Option<f64>,
    loss_db_per_km: Option<f64>,
}

impl ChannelParams {
    pub fn from_transmissivity(transmissivity: f64, excess_noise: f64) -> Result<Self> {
        if !transmissivity.is_finite() || !excess_noise.is_finite() {
            return Err(Error::NonFinite("channel parameters"));
        }
        if transmissivity <= 0.0 || transmissivity > 1.0 {
            return Err(Error::InvalidParam(format!(
                "transmissivity must lie in (0, 1], got {transmissivity}"
            )));
        }
        if excess_noise < 0.0 {
            return Err(Error::InvalidParam(format!(
                "excess noise must be nonnegative, got {excess_noise}"
            )));
        }
        Ok(ChannelParams {
            transmissivity,
            excess_noise,
            fiber_length_km: None,
            loss_db_per_km: None,
        })
    }

    /// Derives the transmissivity from a fiber length and loss rate.
    pub fn from_fiber(length_km: f64, loss_db_per_km: f64, excess_noise: f64) -> Result<Self> {
        let t = transmittance_from_distance(length_km, loss_db_per_km)?;
        let mut params = Self::from_transmissivity(t, excess_noise)?;
        params.fiber_length_km = Some(length_km);
        params.loss_db_per_km = Some(loss_db_per_km);
        Ok(params)
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn excess_noise(&self) -> f64 {
        self.excess_noise
    }

    pub fn fiber_length_km(&self) -> Option<f64> {
        self.fiber_length_km
    }

    pub fn loss_db_per_km(&self) -> Option<f64> {
        self.loss_db_per_km
    }
}

/// Reconciliation and detector efficiencies.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DetectionParams {
    reconciliation_efficiency: f64,
    detector_efficiency: f64,
}

impl DetectionParams {
    pub fn new(reconciliation_efficiency: f64, detector_efficiency: f64) -> Result<Self> {
        if !reconciliation_efficiency.is_finite() || !detector_efficiency.is_finite() {
            return Err(Error::NonFinite("detection parameters"));
        }
        if !(0.0..=1.0).contains(&reconciliation_efficiency) {
            return Err(Error::InvalidParam(format!(
                "reconciliation efficiency must lie in [0, 1], got {reconciliation_efficiency}"
            )));
        }
        if detector_efficiency <= 0.0 || detector_efficiency > 1.0 {
            return Err(Error::InvalidParam(format!(
                "detector efficiency must lie in (0, 1], got {detector_efficiency}"
            )));
        }
        Ok(DetectionParams {
            reconciliation_efficiency,
            detector_efficiency,
        })
    }

    /// β = 1, η_det = 1.
    pub fn ideal() -> Self {
        DetectionParams {
            reconciliation_efficiency: 1.0,
            detector_efficiency: 1.0,
        }
    }

    pub fn reconciliation_efficiency(&self) -> f64 {
        self.reconciliation_efficiency
    }

    pub fn detector_efficiency(&self) -> f64 {
        self.detector_efficiency
    }
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Two-mode covariance matrix in the γ_A 𝕀₂ / γ_B 𝕀₂ / σ_AB σ_z block
/// form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovarianceMatrix {
    gamma_a: f64,
    gamma_b: f64,
    sigma_ab: f64,
}

impl CovarianceMatrix {
    pub fn new(gamma_a: f64, gamma_b: f64, sigma_ab: f64) -> Self {
        CovarianceMatrix {
            gamma_a,
            gamma_b,
            sigma_ab,
        }
    }

    /// Coefficient of 𝕀₂ on Alice's block.
    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    /// Coefficient of 𝕀₂ on Bob's block.
    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }

    /// Coefficient of σ_z on the off-diagonal block.
    pub fn sigma_ab(&self) -> f64 {
        self.sigma_ab
    }

    /// Dense 4×4 matrix in (x_A, p_A, x_B, p_B) ordering.
    pub fn dense(&self) -> [[f64; 4]; 4] {
        let a = self.gamma_a;
        let b = self.gamma_b;
        let c = self.sigma_ab;
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ]
    }

    /// Vacuum-noise floor on both diagonal blocks.
    pub fn respects_vacuum_floor(&self) -> bool {
        self.gamma_a >= 1.0 && self.gamma_b >= 1.0
    }
}

/// Alice's covariance after Bob's homodyne measurement of X:
/// diag(v_x, v_p) with v_x = V_{A|B} and v_p untouched.
#[derive(Debug, Clone, Copy)]
pub struct ConditionedAlice {
    /// Conditioned quadrature variance V_{A|B}.
    pub v_x: f64,
    /// Unmeasured quadrature variance, V_A + 1.
    pub v_p: f64,
}

/// T = 10^(−loss·length/10).
pub fn transmittance_from_distance(length_km: f64, loss_db_per_km: f64) -> Result<f64> {
    if !length_km.is_finite() || !loss_db_per_km.is_finite() {
        return Err(Error::NonFinite("fiber parameters"));
    }
    if length_km < 0.0 {
        return Err(Error::InvalidParam(format!(
            "fiber length must be nonnegative, got {length_km}"
        )));
    }
    if loss_db_per_km <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "loss rate must be positive, got {loss_db_per_km}"
        )));
    }
    Ok(10f64.powf(-loss_db_per_km * length_km / 10.0))
}

/// Propagates the entanglement-based covariance through the channel with
/// detector loss folded in: with T_eff = η_det·T,
///
/// γ_A = 1 + V_A, γ_B = T_eff·V_A + 1 ± T_eff·ξ, σ_AB = √T_eff · Z.
pub fn propagate(
    v_a: f64,
    z: f64,
    channel: &ChannelParams,
    detection: &DetectionParams,
    sign: NoiseSignConvention,
) -> Result<CovarianceMatrix> {
    if !v_a.is_finite() || !z.is_finite() {
        return Err(Error::NonFinite("covariance inputs"));
    }
    if v_a < 0.0 {
        return Err(Error::InvalidParam(format!(
            "modulation variance must be nonnegative, got {v_a}"
        )));
    }
    let t_eff = detection.detector_efficiency() * channel.transmissivity();
    let xi_term = t_eff * channel.excess_noise();
    let gamma_b = match sign {
        NoiseSignConvention::Standard => t_eff * v_a + 1.0 + xi_term,
        NoiseSignConvention::PaperLiteral => t_eff * v_a + 1.0 - xi_term,
    };
    Ok(CovarianceMatrix::new(
        1.0 + v_a,
        gamma_b,
        t_eff.sqrt() * z,
    ))
}

/// Conditions Alice's block on Bob's homodyne outcome,
///
/// γ_{A|B} = γ_A − σ_AB (X γ_B X)^+ σ_ABᵀ with X = diag(1, 0),
///
/// whose pseudo-inverse is diag(1/γ_B, 0) here, giving
/// V_{A|B} = γ_A − σ_AB²/γ_B on the measured quadrature.
pub fn condition_on_homodyne(cm: &CovarianceMatrix) -> Result<ConditionedAlice> {
    if cm.gamma_b() <= 0.0 {
        return Err(Error::Unphysical(format!(
            "Bob's block is singular: γ_B = {}",
            cm.gamma_b()
        )));
    }
    Ok(ConditionedAlice {
        v_x: cm.gamma_a() - cm.sigma_ab() * cm.sigma_ab() / cm.gamma_b(),
        v_p: cm.gamma_a(),
    })
}
