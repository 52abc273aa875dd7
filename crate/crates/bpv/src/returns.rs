//! Return-rate kinds, present-value inversion, Zadeh-extension fuzzy
//! membership of return rates over sampled future-value scenarios
//! (probabilistic fuzzy sets), and the return-CDF to future-value-CDF
//! mapping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acceptance::{membership_curve, MembershipCurve};
use crate::error::{BpvError, Result};
use crate::profile::{InvestorProfile, MarketContext};

/// Supported return-rate definitions. Both are strictly decreasing in the
/// present value and strictly increasing in the future value, so the
/// present value is recoverable from (rate, future value).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnKind {
    Simple,
    Logarithmic,
}

impl ReturnKind {
    /// Return rate of a present value `v0` against a future value `vt`.
    pub fn rate(self, v0: f64, vt: f64) -> Result<f64> {
        if v0 <= 0.0 || vt <= 0.0 || !v0.is_finite() || !vt.is_finite() {
            return Err(BpvError::Domain(format!(
                "prices must be positive, got v0={v0}, vt={vt}"
            )));
        }
        Ok(match self {
            ReturnKind::Simple => vt / v0 - 1.0,
            ReturnKind::Logarithmic => (vt / v0).ln(),
        })
    }

    /// Present value producing rate `r` against future value `vt`.
    pub fn invert(self, r: f64, vt: f64) -> Result<f64> {
        if vt <= 0.0 || !vt.is_finite() {
            return Err(BpvError::Domain(format!(
                "future value must be positive, got {vt}"
            )));
        }
        if !r.is_finite() {
            return Err(BpvError::Domain(format!("return rate must be finite, got {r}")));
        }
        Ok(match self {
            ReturnKind::Simple => {
                if r <= -1.0 {
                    return Err(BpvError::Domain(format!(
                        "simple return rate must exceed -1, got {r}"
                    )));
                }
                vt / (1.0 + r)
            }
            ReturnKind::Logarithmic => vt * (-r).exp(),
        })
    }
}

/// Distribution of the uncertain future value: a seedable sampler plus an
/// optional CDF.
#[derive(Debug, Clone, PartialEq)]
pub enum FutureValueModel {
    PointMass(f64),
    /// Lognormal with the given location and scale of the logarithm.
    LogNormal { location: f64, scale: f64 },
    /// Discrete empirical distribution of (value, weight) pairs.
    Empirical(Vec<(f64, f64)>),
}

impl FutureValueModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            FutureValueModel::PointMass(v) => {
                if *v <= 0.0 || !v.is_finite() {
                    return Err(BpvError::Domain(format!(
                        "point mass must be positive, got {v}"
                    )));
                }
            }
            FutureValueModel::LogNormal { location, scale } => {
                if !location.is_finite() || !scale.is_finite() || *scale < 0.0 {
                    return Err(BpvError::Domain(format!(
                        "lognormal needs finite location and non-negative scale, got ({location}, {scale})"
                    )));
                }
            }
            FutureValueModel::Empirical(pairs) => {
                if pairs.is_empty() {
                    return Err(BpvError::Domain("empirical model needs at least one atom".into()));
                }
                let mut total = 0.0;
                for &(v, w) in pairs {
                    if v <= 0.0 || !v.is_finite() || w < 0.0 || !w.is_finite() {
                        return Err(BpvError::Domain(format!(
                            "empirical atom ({v}, {w}) invalid: values must be positive, weights non-negative"
                        )));
                    }
                    total += w;
                }
                if total <= 0.0 {
                    return Err(BpvError::Domain("empirical weights sum to zero".into()));
                }
            }
        }
        Ok(())
    }

    /// Draws one future value from the model.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            FutureValueModel::PointMass(v) => *v,
            FutureValueModel::LogNormal { location, scale } => {
                // Box-Muller keeps the draw a pure function of the stream.
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen::<f64>();
                let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                (location + scale * z).exp()
            }
            FutureValueModel::Empirical(pairs) => {
                let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
                let mut u = rng.gen::<f64>() * total;
                for &(v, w) in pairs {
                    if u < w {
                        return v;
                    }
                    u -= w;
                }
                pairs[pairs.len() - 1].0
            }
        }
    }

    /// CDF of the future value, when available in closed form.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        match self {
            FutureValueModel::PointMass(v) => Some(if x >= *v { 1.0 } else { 0.0 }),
            FutureValueModel::LogNormal { .. } => None,
            FutureValueModel::Empirical(pairs) => {
                let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
                let below: f64 = pairs.iter().filter(|&&(v, _)| v <= x).map(|&(_, w)| w).sum();
                Some(below / total)
            }
        }
    }
}

/// Fuzzy membership of the return rate for one fixed scenario: the
/// membership of the unique present value that produces `r` against the
/// scenario's future value.
pub fn hiroto_membership(
    curve: &MembershipCurve,
    kind: ReturnKind,
    vt: f64,
    r: f64,
) -> Result<f64> {
    let preimage = kind.invert(r, vt)?;
    Ok(curve.eval(preimage))
}

/// One sampled future value with its membership row over the return grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub future_value: f64,
    pub membership: Vec<f64>,
}

/// Per-scenario fuzzy memberships of the return rate over a fixed grid: a
/// probabilistic fuzzy set realized over sampled future values.
#[derive(Debug, Clone, PartialEq)]
pub struct HirotoSet {
    pub r_grid: Vec<f64>,
    pub scenarios: Vec<Scenario>,
    pub seed: u64,
}

/// Samples `n_scenarios` future values and evaluates the return-rate
/// membership of each over `r_grid`.
///
/// Scenario `i` draws from a ChaCha8 stream derived from (seed, i), so
/// output is a pure function of the inputs and independent of evaluation
/// order.
pub fn sample_hiroto(
    profile: &InvestorProfile,
    ctx: &MarketContext,
    fv_model: &FutureValueModel,
    kind: ReturnKind,
    r_grid: &[f64],
    n_scenarios: usize,
    seed: u64,
) -> Result<HirotoSet> {
    if n_scenarios == 0 {
        return Err(BpvError::Domain("need at least one scenario".into()));
    }
    if r_grid.is_empty() {
        return Err(BpvError::Domain("empty return grid".into()));
    }
    for w in r_grid.windows(2) {
        // Negated comparison also rejects NaN grid entries.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(w[0] < w[1]) {
            return Err(BpvError::Domain(format!(
                "return grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    fv_model.validate()?;
    let curve = membership_curve(profile, ctx, 2)?;

    let mut scenarios = Vec::with_capacity(n_scenarios);
    for i in 0..n_scenarios {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let vt = fv_model.sample(&mut rng);
        if vt <= 0.0 || !vt.is_finite() {
            return Err(BpvError::Domain(format!(
                "scenario {i}: sampler produced non-positive future value {vt}"
            )));
        }
        let membership = r_grid
            .iter()
            .map(|&r| {
                hiroto_membership(&curve, kind, vt, r).map_err(|e| {
                    BpvError::Domain(format!("scenario {i}: {e}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        scenarios.push(Scenario {
            future_value: vt,
            membership,
        });
    }
    Ok(HirotoSet {
        r_grid: r_grid.to_vec(),
        scenarios,
        seed,
    })
}

/// Pointwise mean of the scenario memberships over the return grid.
pub fn expected_membership(h: &HirotoSet) -> Vec<f64> {
    let n = h.scenarios.len() as f64;
    (0..h.r_grid.len())
        .map(|j| h.scenarios.iter().map(|s| s.membership[j]).sum::<f64>() / n)
        .collect()
}

/// CDF of the future value induced by a return-rate CDF through the
/// strictly increasing map from future value to return rate at a fixed
/// market price.
pub fn future_value_cdf<F>(
    return_cdf: F,
    market_price: f64,
    kind: ReturnKind,
) -> Result<impl Fn(f64) -> Result<f64>>
where
    F: Fn(f64) -> f64,
{
    if market_price <= 0.0 || !market_price.is_finite() {
        return Err(BpvError::Domain(format!(
            "market price must be positive, got {market_price}"
        )));
    }
    Ok(move |x: f64| Ok(return_cdf(kind.rate(market_price, x)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::ReferenceDistribution;

    fn investor_a() -> InvestorProfile {
        InvestorProfile::new(95.0, 110.0, 0.2, ReferenceDistribution::triangular()).unwrap()
    }

    #[test]
    fn return_rate_examples() {
        assert!((ReturnKind::Simple.rate(100.0, 110.0).unwrap() - 0.10).abs() < 1e-12);
        assert_eq!(ReturnKind::Logarithmic.rate(100.0, 100.0).unwrap(), 0.0);
        assert!((ReturnKind::Logarithmic.rate(100.0, 110.0).unwrap() - 0.0953102).abs() < 1e-7);
        assert!(ReturnKind::Simple.rate(-1.0, 100.0).is_err());
        assert!(ReturnKind::Simple.rate(100.0, 0.0).is_err());
    }

    #[test]
    fn invert_present_value_examples() {
        assert!((ReturnKind::Simple.invert(0.1, 110.0).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(ReturnKind::Logarithmic.invert(0.0, 50.0).unwrap(), 50.0);
        assert!((ReturnKind::Simple.invert(-0.5, 55.0).unwrap() - 110.0).abs() < 1e-12);
        assert!(ReturnKind::Simple.invert(-1.0, 55.0).is_err());
    }

    #[test]
    fn rate_invert_round_trip() {
        for kind in [ReturnKind::Simple, ReturnKind::Logarithmic] {
            for (v0, vt) in [(100.0, 110.0), (95.5, 87.0), (3.0, 4.5)] {
                let r = kind.rate(v0, vt).unwrap();
                assert!((kind.invert(r, vt).unwrap() - v0).abs() < 1e-12 * v0);
                let back = kind.rate(kind.invert(r, vt).unwrap(), vt).unwrap();
                assert!((back - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hiroto_membership_examples() {
        let crisp = MembershipCurve::crisp(100.0);
        assert_eq!(hiroto_membership(&crisp, ReturnKind::Simple, 110.0, 0.10).unwrap(), 1.0);
        assert_eq!(hiroto_membership(&crisp, ReturnKind::Simple, 110.0, 0.05).unwrap(), 0.0);

        let ctx = MarketContext::new(100.0, 98.0).unwrap();
        let curve = membership_curve(&investor_a(), &ctx, 2).unwrap();
        let r = 110.0 / 99.0 - 1.0;
        let rho = hiroto_membership(&curve, ReturnKind::Simple, 110.0, r).unwrap();
        assert!((rho - 0.96951).abs() < 1e-5);

        // Zero rate against the anchor future value hits the anchor.
        let rho = hiroto_membership(&curve, ReturnKind::Logarithmic, curve.anchor(), 0.0).unwrap();
        assert_eq!(rho, 1.0);
    }

    #[test]
    fn sample_hiroto_point_mass_indicator() {
        let profile = investor_a();
        let ctx = MarketContext::new(100.0, 100.0).unwrap();
        let model = FutureValueModel::PointMass(110.0);
        let grid = [0.0, 0.05, 0.10, 0.15];
        let h = sample_hiroto(&profile, &ctx, &model, ReturnKind::Simple, &grid, 3, 7).unwrap();
        assert_eq!(h.scenarios.len(), 3);
        for s in &h.scenarios {
            assert_eq!(s.future_value, 110.0);
            // r = 0.10 has preimage 100 = anchor (up to inversion roundoff).
            assert!((s.membership[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_hiroto_is_deterministic() {
        let profile = investor_a();
        let ctx = MarketContext::new(100.0, 102.0).unwrap();
        let model = FutureValueModel::LogNormal {
            location: (110.0f64).ln(),
            scale: 0.05,
        };
        let grid: Vec<f64> = (0..21).map(|i| -0.1 + 0.02 * i as f64).collect();
        let a = sample_hiroto(&profile, &ctx, &model, ReturnKind::Logarithmic, &grid, 16, 42).unwrap();
        let b = sample_hiroto(&profile, &ctx, &model, ReturnKind::Logarithmic, &grid, 16, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_hiroto(&profile, &ctx, &model, ReturnKind::Logarithmic, &grid, 16, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_hiroto_rejects_bad_grids() {
        let profile = investor_a();
        let ctx = MarketContext::new(100.0, 100.0).unwrap();
        let model = FutureValueModel::PointMass(110.0);
        assert!(sample_hiroto(&profile, &ctx, &model, ReturnKind::Simple, &[], 1, 0).is_err());
        assert!(
            sample_hiroto(&profile, &ctx, &model, ReturnKind::Simple, &[0.1, 0.1], 1, 0).is_err()
        );
        assert!(
            sample_hiroto(&profile, &ctx, &model, ReturnKind::Simple, &[0.1], 0, 0).is_err()
        );
        // Simple rate grid reaching -1 propagates a domain error.
        assert!(
            sample_hiroto(&profile, &ctx, &model, ReturnKind::Simple, &[-1.5, 0.0], 1, 0).is_err()
        );
    }

    #[test]
    fn expected_membership_examples() {
        let one = HirotoSet {
            r_grid: vec![0.0, 0.1],
            scenarios: vec![Scenario {
                future_value: 110.0,
                membership: vec![0.25, 1.0],
            }],
            seed: 0,
        };
        assert_eq!(expected_membership(&one), vec![0.25, 1.0]);

        let two = HirotoSet {
            r_grid: vec![0.0],
            scenarios: vec![
                Scenario {
                    future_value: 100.0,
                    membership: vec![0.0],
                },
                Scenario {
                    future_value: 120.0,
                    membership: vec![1.0],
                },
            ],
            seed: 0,
        };
        assert_eq!(expected_membership(&two), vec![0.5]);
    }

    #[test]
    fn future_value_cdf_examples() {
        let uniform = |r: f64| (r / 0.1).clamp(0.0, 1.0);
        let f_v = future_value_cdf(uniform, 100.0, ReturnKind::Simple).unwrap();
        assert!((f_v(105.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(f_v(100.0).unwrap(), 0.0);
        assert!(f_v(-1.0).is_err());

        // Step CDF at r0 maps to a step at the compounded price.
        let r0 = 0.07;
        let step = move |r: f64| if r >= r0 { 1.0 } else { 0.0 };
        let f_v = future_value_cdf(step, 100.0, ReturnKind::Logarithmic).unwrap();
        let knee = 100.0 * r0.exp();
        assert_eq!(f_v(knee * 0.999).unwrap(), 0.0);
        assert_eq!(f_v(knee * 1.001).unwrap(), 1.0);

        assert!(future_value_cdf(uniform, 0.0, ReturnKind::Simple).is_err());
    }
}
