//! Mutual information, the Holevo bound and the secret key rate.
//!
//! All logarithms are base 2, so every information quantity is in bits
//! per pulse. Eve's information is bounded by the Gaussian-protocol
//! formulas evaluated with the discrete-modulation correlation Z: the
//! symplectic invariants of the post-channel covariance matrix give the
//! two-mode spectrum ν₁, ν₂, and the homodyne-conditioned one-mode
//! spectrum gives ν₃.

use serde::Serialize;

use crate::channel::{
    condition_on_homodyne, propagate, ChannelParams, CovarianceMatrix, DetectionParams,
    NoiseSignConvention,
};
use crate::error::{Error, Result};
use crate::modulation::{self, ModulationEnsemble};

/// Symplectic eigenvalues below 1 − NU_TOLERANCE are rejected as
/// unphysical; smaller dips are rounding and are clamped.
pub const NU_TOLERANCE: f64 = 1e-9;

/// Numerator used by the Shannon mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiConvention {
    /// I_AB = ½ log₂(V / V_{A|B}) with V = 1 + V_A, the variance Alice's
    /// mode actually has. Equals ½ log₂(V_B / V_{B|A}).
    #[default]
    Standard,
    /// I_AB = ½ log₂(V_A / V_{A|B}) with the bare modulation variance in
    /// the numerator. Goes negative in the loss regime; kept as a
    /// compatibility mode.
    PaperLiteral,
}

impl MiConvention {
    pub fn label(&self) -> &'static str {
        match self {
            MiConvention::Standard => "standard",
            MiConvention::PaperLiteral => "paper-literal",
        }
    }
}

/// The pair of convention switches honoured by the rate pipeline.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Conventions {
    pub noise_sign: NoiseSignConvention,
    pub mutual_information: MiConvention,
}

/// Bosonic entropy function G(x) = (x+1)log₂(x+1) − x log₂ x, with
/// G(0) = 0 by continuity. Uses ln_1p for the first term so small x stay
/// accurate.
pub fn entropy_g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    const LN2: f64 = std::f64::consts::LN_2;
    (x + 1.0) * x.ln_1p() / LN2 - x * x.ln() / LN2
}

/// Outcome of the Holevo-bound evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolevoBound {
    /// S_BE = G((ν₁−1)/2) + G((ν₂−1)/2) − G((ν₃−1)/2), bits/pulse.
    pub s_be: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
    /// Symplectic invariant Δ = γ_A² + γ_B² − 2σ_AB².
    pub delta: f64,
    /// det Γ = (γ_A γ_B − σ_AB²)².
    pub det_gamma: f64,
}

/// Shannon mutual information ½ log₂(signal/conditional) in bits.
pub fn mutual_information(signal_variance: f64, conditional_variance: f64) -> Result<f64> {
    if !signal_variance.is_finite() || !conditional_variance.is_finite() {
        return Err(Error::NonFinite("variances"));
    }
    if signal_variance <= 0.0 || conditional_variance <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "mutual information needs positive variances, got {signal_variance} and {conditional_variance}"
        )));
    }
    Ok(0.5 * (signal_variance / conditional_variance).log2())
}

/// Holevo bound on Eve's information about Bob's homodyne data for the
/// post-channel covariance matrix (γ_A, γ_B, σ_AB) = (1+V_A,
/// T·V_A+1+T·ξ, √T·Z) with T already including detector loss.
///
/// The discriminant Δ² − 4·detΓ factors exactly as
/// (γ_A − γ_B)²((γ_A + γ_B)² − 4σ_AB²), which avoids the cancellation of
/// the textbook form; ν₂ then comes from ν₁ν₂ = γ_Aγ_B − σ_AB².
pub fn holevo_bound(v_a: f64, z: f64, t_eff: f64, xi: f64) -> Result<HolevoBound> {
    if !v_a.is_finite() || !z.is_finite() || !t_eff.is_finite() || !xi.is_finite() {
        return Err(Error::NonFinite("Holevo inputs"));
    }
    if v_a < 0.0 || t_eff <= 0.0 || t_eff > 1.0 || xi < 0.0 {
        return Err(Error::InvalidParam(format!(
            "Holevo inputs out of range: v_a = {v_a}, t_eff = {t_eff}, xi = {xi}"
        )));
    }
    let a = 1.0 + v_a;
    let b = t_eff * v_a + 1.0 + t_eff * xi;
    let c2 = t_eff * z * z;

    let delta = a * a + b * b - 2.0 * c2;
    let minor = a * b - c2;
    let det_gamma = minor * minor;

    let spread = ((a + b) * (a + b) - 4.0 * c2).max(0.0);
    let root = (a - b).abs() * spread.sqrt();
    let nu1 = (0.5 * (delta + root)).sqrt();
    if minor <= 0.0 {
        return Err(Error::Unphysical(format!(
            "covariance determinant collapsed: γ_Aγ_B − σ² = {minor}"
        )));
    }
    let nu2 = minor / nu1;
    let nu3 = (a * (a - c2 / b)).sqrt();

    for (name, nu) in [("nu1", nu1), ("nu2", nu2), ("nu3", nu3)] {
        if !(nu.is_finite() && nu >= 1.0 - NU_TOLERANCE) {
            return Err(Error::Unphysical(format!(
                "symplectic eigenvalue {name} = {nu} below one: Z is too large for this V_A"
            )));
        }
    }

    let s_be = entropy_g((nu1.max(1.0) - 1.0) / 2.0) + entropy_g((nu2.max(1.0) - 1.0) / 2.0)
        - entropy_g((nu3.max(1.0) - 1.0) / 2.0);
    Ok(HolevoBound {
        s_be,
        nu1,
        nu2,
        nu3,
        delta,
        det_gamma,
    })
}

/// One fully evaluated operating point.
#[derive(Debug, Clone, Serialize)]
pub struct RatePoint {
    pub alpha: f64,
    pub family: modulation::StateFamily,
    pub num_states: usize,
    pub channel: ChannelParams,
    pub detection: DetectionParams,
    pub conventions: Conventions,
    /// Modulation variance V_A.
    pub v_a: f64,
    /// Alice–Bob correlation Z before the channel.
    pub z: f64,
    /// Conditional variance V_{A|B} under the active sign convention.
    pub v_a_given_b: f64,
    /// β-free Shannon mutual information, bits/pulse.
    pub i_ab: f64,
    /// Holevo bound on Eve, bits/pulse.
    pub s_be: f64,
    /// K = β·I_AB − S_BE, bits/pulse.
    pub key_rate: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
    pub delta: f64,
    pub det_gamma: f64,
}

impl RatePoint {
    pub fn distance_km(&self) -> Option<f64> {
        self.channel.fiber_length_km()
    }
}

/// Evaluates the key rate from precomputed modulation quantities. The
/// covariance propagation and mutual information follow the active
/// conventions; the Holevo bound always uses the added-noise forms, which
/// are the only ones stated for it.
#[allow(clippy::too_many_arguments)]
pub fn key_rate_from_components(
    alpha: f64,
    family: modulation::StateFamily,
    num_states: usize,
    v_a: f64,
    z: f64,
    channel: &ChannelParams,
    detection: &DetectionParams,
    conventions: Conventions,
) -> Result<RatePoint> {
    let cm: CovarianceMatrix = propagate(v_a, z, channel, detection, conventions.noise_sign)?;
    let conditioned = condition_on_homodyne(&cm)?;
    let signal_variance = match conventions.mutual_information {
        MiConvention::Standard => 1.0 + v_a,
        MiConvention::PaperLiteral => v_a,
    };
    let i_ab = mutual_information(signal_variance, conditioned.v_x)?;
    let t_eff = detection.detector_efficiency() * channel.transmissivity();
    let holevo = holevo_bound(v_a, z, t_eff, channel.excess_noise())?;
    let key_rate = detection.reconciliation_efficiency() * i_ab - holevo.s_be;
    Ok(RatePoint {
        alpha,
        family,
        num_states,
        channel: *channel,
        detection: *detection,
        conventions,
        v_a,
        z,
        v_a_given_b: conditioned.v_x,
        i_ab,
        s_be: holevo.s_be,
        key_rate,
        nu1: holevo.nu1,
        nu2: holevo.nu2,
        nu3: holevo.nu3,
        delta: holevo.delta,
        det_gamma: holevo.det_gamma,
    })
}

/// Full pipeline: modulation variance and correlation of the ensemble,
/// channel propagation, conditioning, mutual information, Holevo bound.
pub fn key_rate(
    ensemble: &ModulationEnsemble,
    channel: &ChannelParams,
    detection: &DetectionParams,
    conventions: Conventions,
) -> Result<RatePoint> {
    let v_a = modulation::modulation_variance(ensemble)?;
    let z = modulation::correlation(ensemble)?;
    key_rate_from_components(
        ensemble.alpha(),
        ensemble.family(),
        ensemble.num_states(),
        v_a,
        z,
        channel,
        detection,
        conventions,
    )
}
