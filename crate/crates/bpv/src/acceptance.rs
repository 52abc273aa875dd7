//! Reference acceptance distributions, the rational forecast, the
//! standardized acceptance degree and the price-space membership of
//! potential present values.
//!
//! `acceptance` is the normative engine. `membership_printed` evaluates
//! the closed-form price-space expressions instead; those expressions are
//! only sign-consistent for non-negative deviations, so the evaluator is
//! restricted to that domain and exists purely as an independent
//! cross-check (see README, "Known discrepancies").

use crate::error::{BpvError, ReferenceViolation, Result};
use crate::profile::{scope, InvestorProfile, MarketContext, ScopeInterval};

/// Piecewise-linear acceptance profile on [-1, 1] used at financial
/// equilibrium: full acceptance at 0, none at the boundaries,
/// nondecreasing up to 0 and nonincreasing after it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDistribution {
    knots: Vec<(f64, f64)>,
}

impl ReferenceDistribution {
    /// The triangular profile 1 - |beta|.
    pub fn triangular() -> Self {
        Self {
            knots: vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)],
        }
    }

    /// Builds a distribution from explicit knots; knots must be sorted by
    /// beta and satisfy all invariants.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        let dist = Self { knots };
        dist.validate()?;
        Ok(dist)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Checks every invariant, reporting the first violation.
    pub fn validate(&self) -> std::result::Result<(), ReferenceViolation> {
        for &(beta, value) in &self.knots {
            if !beta.is_finite() || !(-1.0..=1.0).contains(&beta) {
                return Err(ReferenceViolation::KnotRange { beta });
            }
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(ReferenceViolation::ValueRange { beta, value });
            }
        }
        for w in self.knots.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(ReferenceViolation::KnotOrder);
            }
        }
        for required in [-1.0, 0.0, 1.0] {
            if !self.knots.iter().any(|&(b, _)| b == required) {
                return Err(ReferenceViolation::MissingKnot(required));
            }
        }
        for &(beta, value) in &self.knots {
            if (beta == -1.0 || beta == 1.0) && value != 0.0 {
                return Err(ReferenceViolation::Endpoint { beta, value });
            }
            if beta == 0.0 && value != 1.0 {
                return Err(ReferenceViolation::Apex { value });
            }
        }
        for w in self.knots.windows(2) {
            let ((bl, vl), (br, vr)) = (w[0], w[1]);
            if br <= 0.0 && vr < vl {
                return Err(ReferenceViolation::Monotonicity { left: bl, right: br });
            }
            if bl >= 0.0 && vr > vl {
                return Err(ReferenceViolation::Monotonicity { left: bl, right: br });
            }
        }
        Ok(())
    }

    /// Linear interpolation between knots; exact at the knots themselves.
    pub fn eval(&self, beta: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if beta <= first.0 {
            return first.1;
        }
        if beta >= last.0 {
            return last.1;
        }
        match self
            .knots
            .binary_search_by(|(b, _)| b.partial_cmp(&beta).unwrap())
        {
            Ok(i) => self.knots[i].1,
            Err(i) => {
                let (bl, vl) = self.knots[i - 1];
                let (br, vr) = self.knots[i];
                vl + (vr - vl) * (beta - bl) / (br - bl)
            }
        }
    }
}

/// Convenience constructor mirroring the case-study choice.
pub fn triangular_reference() -> ReferenceDistribution {
    ReferenceDistribution::triangular()
}

/// Validates a reference distribution, reporting the first violated
/// condition.
pub fn validate_reference(dist: &ReferenceDistribution) -> Result<()> {
    dist.validate().map_err(BpvError::from)
}

/// Indicator of the price move rational rules predict: a rise when the
/// security is underpriced (deviation < 0, beta >= 0), a fall when it is
/// overpriced (deviation > 0, beta <= 0), either at equilibrium.
pub fn rational_forecast(deviation: f64, beta: f64) -> f64 {
    if deviation < 0.0 {
        if beta >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else if deviation > 0.0 {
        if beta <= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0
    }
}

/// Acceptance degree of a standardized potential present value: the
/// weighted average of the reference distribution and the rational
/// forecast, with weight gamma*|dC| / (1 + gamma*|dC|) on the forecast
/// where gamma = 1 - |beta| is the similarity to the market price.
pub fn acceptance(dist: &ReferenceDistribution, deviation: f64, beta: f64) -> f64 {
    let gamma = 1.0 - beta.abs();
    let w = gamma * deviation.abs();
    // Single division keeps the convex combination exact at beta = 0.
    (dist.eval(beta) + w * rational_forecast(deviation, beta)) / (1.0 + w)
}

/// Membership degree of a price as a potential present value; zero
/// outside the scope interval.
pub fn membership(profile: &InvestorProfile, ctx: &MarketContext, p: f64) -> Result<f64> {
    let s = scope(profile, ctx.c0(), ctx.deviation())?;
    if !s.contains(p) {
        return Ok(0.0);
    }
    let beta = s.standardize(p)?;
    Ok(acceptance(profile.reference(), ctx.deviation(), beta))
}

/// Price-space closed-form evaluator, valid for deviation >= 0 only.
///
/// Below the anchor it applies the boosted lower-branch expression, above
/// it the plain upper-branch one. Zero outside the scope, matching
/// [`membership`].
pub fn membership_printed(profile: &InvestorProfile, ctx: &MarketContext, p: f64) -> Result<f64> {
    let dc = ctx.deviation();
    if dc < 0.0 {
        return Err(BpvError::Domain(format!(
            "closed-form evaluator requires a non-negative deviation, got {dc}"
        )));
    }
    let c0 = ctx.c0();
    let s = scope(profile, c0, dc)?;
    if !s.contains(p) {
        return Ok(0.0);
    }
    let v0 = profile.reference();
    let alpha = profile.alpha();
    Ok(if p <= s.anchor() {
        // Lower branch: rational forecast predicts a fall, so the
        // acceptance is boosted on this side.
        let half = c0 - profile.c_min() + (1.0 - alpha) * dc;
        let lo = profile.c_min() + alpha * dc;
        let beta = (p - s.anchor()) / half;
        half / (half + (p - lo) * dc) * (v0.eval(beta) + (p - lo) / half * dc)
    } else {
        let half = profile.c_max() - c0 + (alpha - 1.0) * dc;
        let hi = profile.c_max() + alpha * dc;
        let beta = (p - s.anchor()) / half;
        half / (half + (hi - p) * dc) * v0.eval(beta)
    })
}

/// Behaviour of a membership curve away from the generic fuzzy case.
#[derive(Debug, Clone, PartialEq)]
enum CurveKind {
    Fuzzy {
        scope: ScopeInterval,
        deviation: f64,
        reference: ReferenceDistribution,
    },
    /// Indicator of a single crisp present value.
    Crisp(f64),
}

/// Evaluable fuzzy membership of potential present values over a scope
/// interval, with declared breakpoints (the anchor and the mapped
/// reference knots) and a strictly increasing sample list.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCurve {
    kind: CurveKind,
    breakpoints: Vec<f64>,
    samples: Vec<(f64, f64)>,
}

impl MembershipCurve {
    /// Indicator membership concentrated at a single price.
    pub fn crisp(value: f64) -> Self {
        Self {
            kind: CurveKind::Crisp(value),
            breakpoints: vec![value],
            samples: vec![(value, 1.0)],
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        match &self.kind {
            CurveKind::Crisp(v) => {
                // Indicator up to roundoff, so rate inversions an ulp off
                // the crisp value still register.
                if (p - v).abs() <= 1e-12 * v.abs().max(1.0) {
                    1.0
                } else {
                    0.0
                }
            }
            CurveKind::Fuzzy {
                scope,
                deviation,
                reference,
            } => {
                if !scope.contains(p) {
                    return 0.0;
                }
                let beta = scope.standardize(p).expect("price inside scope");
                acceptance(reference, *deviation, beta)
            }
        }
    }

    /// The price with full membership: the market price for fuzzy curves,
    /// the crisp value otherwise.
    pub fn anchor(&self) -> f64 {
        match &self.kind {
            CurveKind::Crisp(v) => *v,
            CurveKind::Fuzzy { scope, .. } => scope.anchor(),
        }
    }

    pub fn scope(&self) -> Option<&ScopeInterval> {
        match &self.kind {
            CurveKind::Fuzzy { scope, .. } => Some(scope),
            CurveKind::Crisp(_) => None,
        }
    }

    /// Prices where the curve may kink or jump.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

/// Breakpoints of the membership curve in price space: the anchor plus
/// every reference knot mapped through the inverse standardization.
pub(crate) fn price_breakpoints(s: &ScopeInterval, reference: &ReferenceDistribution) -> Vec<f64> {
    let mut pts = vec![s.anchor()];
    for &(beta, _) in reference.knots() {
        if let Ok(p) = s.destandardize(beta) {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// Samples the membership over the scope on a grid of at least `n` points
/// that always contains the scope bounds, the anchor and every mapped
/// reference knot.
pub fn membership_curve(
    profile: &InvestorProfile,
    ctx: &MarketContext,
    n: usize,
) -> Result<MembershipCurve> {
    if n < 2 {
        return Err(BpvError::Domain(format!(
            "need at least 2 sample points, got {n}"
        )));
    }
    let dc = ctx.deviation();
    let s = scope(profile, ctx.c0(), dc)?;
    let breakpoints = price_breakpoints(&s, profile.reference());

    let mut grid = breakpoints.clone();
    for i in 0..n {
        grid.push(s.lo() + (s.hi() - s.lo()) * i as f64 / (n - 1) as f64);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let reference = profile.reference().clone();
    let samples = grid
        .into_iter()
        .map(|p| {
            let beta = s.standardize(p)?;
            Ok((p, acceptance(&reference, dc, beta)))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MembershipCurve {
        kind: CurveKind::Fuzzy {
            scope: s,
            deviation: dc,
            reference,
        },
        breakpoints,
        samples,
    })
}
