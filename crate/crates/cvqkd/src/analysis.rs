//! Amplitude optimization, distance sweeps and protocol comparison.
//!
//! Sweep points are independent and evaluated in parallel; results are
//! collected in grid order, so output ordering never depends on
//! scheduling. Cutoff distances use first-crossing semantics: the key
//! rate decays monotonically over the secure region, and beyond its zero
//! crossing it approaches zero from below through values comparable to
//! floating-point noise, which a "last distance above threshold" rule
//! would happily mistake for signal.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelParams, DetectionParams};
use crate::error::{Error, Result};
use crate::fock::Truncation;
use crate::keyrate::{key_rate_from_components, Conventions, RatePoint};
use crate::modulation::{self, ModulationEnsemble, StateFamily};

/// Default reporting floor for the threshold-crossing cutoff rule.
pub const DEFAULT_K_MIN: f64 = 1e-10;

/// Default golden-section search bounds for the amplitude.
pub const DEFAULT_ALPHA_BOUNDS: (f64, f64) = (0.01, 1.0);

/// Default amplitude tolerance of the optimizer.
pub const DEFAULT_ALPHA_TOL: f64 = 1e-3;

const PRESCAN_POINTS: usize = 50;

/// One protocol curve family over a distance grid and a noise list.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub family: StateFamily,
    pub num_states: usize,
    pub alpha: f64,
    pub distance_start_km: f64,
    pub distance_stop_km: f64,
    pub distance_step_km: f64,
    pub excess_noise_values: Vec<f64>,
    pub reconciliation_efficiency: f64,
    pub detector_efficiency: f64,
    pub loss_db_per_km: f64,
    pub k_min: f64,
    pub conventions: Conventions,
    pub truncation: Truncation,
}

impl SweepSpec {
    /// Spec with the defaults used throughout: 0.2 dB/km, ideal
    /// detection, K_min = 10⁻¹⁰, 1 km steps from 0 to 450 km.
    pub fn new(family: StateFamily, alpha: f64) -> Self {
        SweepSpec {
            family,
            num_states: 4,
            alpha,
            distance_start_km: 0.0,
            distance_stop_km: 450.0,
            distance_step_km: 1.0,
            excess_noise_values: vec![0.002],
            reconciliation_efficiency: 1.0,
            detector_efficiency: 1.0,
            loss_db_per_km: crate::channel::DEFAULT_LOSS_DB_PER_KM,
            k_min: DEFAULT_K_MIN,
            conventions: Conventions::default(),
            truncation: Truncation::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.distance_step_km <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "distance step must be positive, got {}",
                self.distance_step_km
            )));
        }
        if self.distance_stop_km < self.distance_start_km || self.distance_start_km < 0.0 {
            return Err(Error::InvalidParam(format!(
                "bad distance range {}..{}",
                self.distance_start_km, self.distance_stop_km
            )));
        }
        if self.excess_noise_values.is_empty() {
            return Err(Error::InvalidParam("empty excess-noise list".into()));
        }
        if self.k_min <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "k_min must be positive, got {}",
                self.k_min
            )));
        }
        DetectionParams::new(self.reconciliation_efficiency, self.detector_efficiency)?;
        ModulationEnsemble::new(self.family, self.alpha, self.num_states, self.truncation)?;
        Ok(())
    }

    /// The distance grid, inclusive of both ends up to rounding.
    pub fn distances(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let d = self.distance_start_km + self.distance_step_km * i as f64;
            if d > self.distance_stop_km + 0.5 * self.distance_step_km {
                break;
            }
            out.push(d);
            i += 1;
        }
        out
    }

    fn detection(&self) -> DetectionParams {
        DetectionParams::new(self.reconciliation_efficiency, self.detector_efficiency)
            .expect("validated")
    }

    fn ensemble(&self) -> Result<ModulationEnsemble> {
        ModulationEnsemble::new(self.family, self.alpha, self.num_states, self.truncation)
    }
}

/// One ξ curve of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCurve {
    pub excess_noise: f64,
    pub points: Vec<RatePoint>,
    /// Last grid distance before the key rate first drops to ≤ 0.
    pub cutoff_positive_km: Option<f64>,
    /// Last grid distance before the key rate first drops below K_min.
    pub cutoff_kmin_km: Option<f64>,
    /// Set when a point failed; the curve keeps the points computed up to
    /// the failure.
    pub diagnostic: Option<String>,
}

/// All curves of a sweep plus the [`SweepSpec`] that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub curves: Vec<SweepCurve>,
}

impl SweepResult {
    pub fn all_points(&self) -> impl Iterator<Item = &RatePoint> {
        self.curves.iter().flat_map(|c| c.points.iter())
    }
}

fn first_crossing_cutoff(points: &[RatePoint], keep: impl Fn(f64) -> bool) -> Option<f64> {
    let mut last_good: Option<f64> = None;
    for p in points {
        if keep(p.key_rate) {
            last_good = p.distance_km();
        } else {
            break;
        }
    }
    last_good
}

/// Evaluates the key rate across the distance grid for each ξ. Points are
/// computed in parallel; the modulation quantities are computed once per
/// curve since they do not depend on the channel.
pub fn sweep_distance(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let ensemble = spec.ensemble()?;
    let v_a = modulation::modulation_variance(&ensemble)?;
    let z = modulation::correlation(&ensemble)?;
    let detection = spec.detection();
    let distances = spec.distances();
    let curves: Vec<SweepCurve> = spec
        .excess_noise_values
        .par_iter()
        .map(|&xi| {
            let evaluated: Vec<(f64, Result<RatePoint>)> = distances
                .par_iter()
                .map(|&km| {
                    let result = ChannelParams::from_fiber(km, spec.loss_db_per_km, xi).and_then(
                        |channel| {
                            key_rate_from_components(
                                spec.alpha,
                                spec.family,
                                spec.num_states,
                                v_a,
                                z,
                                &channel,
                                &detection,
                                spec.conventions,
                            )
                        },
                    );
                    (km, result)
                })
                .collect();
            let mut points = Vec::with_capacity(evaluated.len());
            let mut diagnostic = None;
            for (km, result) in evaluated {
                match result {
                    Ok(p) => points.push(p),
                    Err(e) => {
                        diagnostic = Some(format!("evaluation failed at {km} km: {e}"));
                        break;
                    }
                }
            }
            let cutoff_positive_km = first_crossing_cutoff(&points, |k| k > 0.0);
            let cutoff_kmin_km = first_crossing_cutoff(&points, |k| k >= spec.k_min);
            SweepCurve {
                excess_noise: xi,
                points,
                cutoff_positive_km,
                cutoff_kmin_km,
                diagnostic,
            }
        })
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        curves,
    })
}

/// Result of an amplitude optimization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub key_rate: f64,
}

/// Maximizes the key rate over the amplitude with a golden-section
/// search, after a 50-point pre-scan that checks unimodality and supplies
/// the fallback bracket. Multi-modal pre-scans fall back to the bracket
/// around the grid argmax. Fails with
/// [`Error::NoSecureOperatingPoint`] when the pre-scan sees no positive
/// rate anywhere.
#[allow(clippy::too_many_arguments)]
pub fn optimize_alpha(
    family: StateFamily,
    num_states: usize,
    channel: &ChannelParams,
    detection: &DetectionParams,
    conventions: Conventions,
    truncation: Truncation,
    bounds: (f64, f64),
    tol: f64,
) -> Result<AlphaOptimum> {
    let (lo, hi) = bounds;
    if !(lo > 0.0 && hi <= 1.5 && lo < hi) {
        return Err(Error::InvalidParam(format!(
            "alpha bounds must satisfy 0 < lo < hi <= 1.5, got ({lo}, {hi})"
        )));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let eval = |alpha: f64| -> Result<f64> {
        let ensemble = ModulationEnsemble::new(family, alpha, num_states, truncation)?;
        let v_a = modulation::modulation_variance(&ensemble)?;
        let z = modulation::correlation(&ensemble)?;
        key_rate_from_components(
            alpha,
            family,
            num_states,
            v_a,
            z,
            channel,
            detection,
            conventions,
        )
        .map(|p| p.key_rate)
    };

    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (PRESCAN_POINTS - 1) as f64)
        .collect();
    let rates: Vec<f64> = grid.iter().map(|&a| eval(a)).collect::<Result<_>>()?;
    if rates.iter().all(|&k| k <= 0.0) {
        return Err(Error::NoSecureOperatingPoint);
    }

    let argmax = rates
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let interior_maxima = (1..PRESCAN_POINTS - 1)
        .filter(|&i| rates[i] > rates[i - 1] && rates[i] > rates[i + 1])
        .count()
        + usize::from(rates[0] > rates[1])
        + usize::from(rates[PRESCAN_POINTS - 1] > rates[PRESCAN_POINTS - 2]);

    let (mut a, mut b) = if interior_maxima <= 1 {
        (lo, hi)
    } else {
        // multimodal pre-scan: refine only around the grid argmax
        (
            grid[argmax.saturating_sub(1)],
            grid[(argmax + 1).min(PRESCAN_POINTS - 1)],
        )
    };

    // golden-section maximization
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    let alpha = 0.5 * (a + b);
    let key_rate = eval(alpha)?;
    if key_rate <= 0.0 {
        return Err(Error::NoSecureOperatingPoint);
    }
    Ok(AlphaOptimum { alpha, key_rate })
}

/// Key-rate difference at one grid point of a protocol comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DominanceEntry {
    pub distance_km: f64,
    pub excess_noise: f64,
    pub key_rate_pascs: f64,
    pub key_rate_coherent: f64,
    pub pascs_dominates: bool,
}

/// Cutoff-distance gap (PASCS − coherent) for one ξ, under both cutoff
/// rules. `None` when either curve never crosses inside the grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CutoffGap {
    pub excess_noise: f64,
    pub gap_positive_km: Option<f64>,
    pub gap_kmin_km: Option<f64>,
}

/// Paired sweeps plus the per-point dominance report.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolComparison {
    pub pascs: SweepResult,
    pub coherent: SweepResult,
    pub dominance: Vec<DominanceEntry>,
    pub pascs_dominates_everywhere: bool,
    pub cutoff_gaps: Vec<CutoffGap>,
}

/// Sweeps both protocols on the shared grid of `template` (whose family
/// and alpha fields are overridden per protocol) and reports per-point
/// dominance K_PASCS ≥ K_coherent − 10⁻¹² along with cutoff gaps.
pub fn compare_protocols(
    template: &SweepSpec,
    alpha_pascs: f64,
    alpha_coherent: f64,
) -> Result<ProtocolComparison> {
    let mut pascs_spec = template.clone();
    pascs_spec.family = StateFamily::Pascs;
    pascs_spec.alpha = alpha_pascs;
    let mut coherent_spec = template.clone();
    coherent_spec.family = StateFamily::Coherent;
    coherent_spec.alpha = alpha_coherent;

    let pascs = sweep_distance(&pascs_spec)?;
    let coherent = sweep_distance(&coherent_spec)?;

    let mut dominance = Vec::new();
    let mut everywhere = true;
    let mut cutoff_gaps = Vec::new();
    for (cp, cc) in pascs.curves.iter().zip(coherent.curves.iter()) {
        for (pp, pc) in cp.points.iter().zip(cc.points.iter()) {
            let dominates = pp.key_rate >= pc.key_rate - 1e-12;
            everywhere &= dominates;
            dominance.push(DominanceEntry {
                distance_km: pp.distance_km().unwrap_or(f64::NAN),
                excess_noise: cp.excess_noise,
                key_rate_pascs: pp.key_rate,
                key_rate_coherent: pc.key_rate,
                pascs_dominates: dominates,
            });
        }
        cutoff_gaps.push(CutoffGap {
            excess_noise: cp.excess_noise,
            gap_positive_km: match (cp.cutoff_positive_km, cc.cutoff_positive_km) {
                (Some(p), Some(c)) => Some(p - c),
                _ => None,
            },
            gap_kmin_km: match (cp.cutoff_kmin_km, cc.cutoff_kmin_km) {
                (Some(p), Some(c)) => Some(p - c),
                _ => None,
            },
        });
    }
    Ok(ProtocolComparison {
        pascs,
        coherent,
        dominance,
        pascs_dominates_everywhere: everywhere,
        cutoff_gaps,
    })
}
