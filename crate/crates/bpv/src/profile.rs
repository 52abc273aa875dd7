//! Investor and market types: price deviation, regime classification,
//! the scope interval of potential present values and the standardization
//! transform between price space and [-1, 1].

use crate::acceptance::ReferenceDistribution;
use crate::error::{BpvError, Result};

/// Equilibrium price, observed market price and the cached deviation
/// between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketContext {
    c0: f64,
    market_price: f64,
    deviation: f64,
}

impl MarketContext {
    pub fn new(c0: f64, market_price: f64) -> Result<Self> {
        if !c0.is_finite() || c0 <= 0.0 {
            return Err(BpvError::InvalidContext(format!(
                "equilibrium price must be positive, got {c0}"
            )));
        }
        if !market_price.is_finite() || market_price <= 0.0 {
            return Err(BpvError::InvalidContext(format!(
                "market price must be positive, got {market_price}"
            )));
        }
        Ok(Self {
            c0,
            market_price,
            deviation: market_price - c0,
        })
    }

    /// Builds a context from the equilibrium price and a deviation.
    pub fn from_deviation(c0: f64, deviation: f64) -> Result<Self> {
        Self::new(c0, c0 + deviation)
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn market_price(&self) -> f64 {
        self.market_price
    }

    /// Market price deviation from the equilibrium price.
    pub fn deviation(&self) -> f64 {
        self.deviation
    }
}

/// Behavioural characteristics of a single investor: the scope of
/// potential present values assumed at financial equilibrium, the degree
/// of susceptibility to changes and the reference acceptance distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct InvestorProfile {
    c_min: f64,
    c_max: f64,
    alpha: f64,
    reference: ReferenceDistribution,
}

impl InvestorProfile {
    pub fn new(c_min: f64, c_max: f64, alpha: f64, reference: ReferenceDistribution) -> Result<Self> {
        if !c_min.is_finite() || !c_max.is_finite() || c_min >= c_max {
            return Err(BpvError::InvalidProfile(format!(
                "equilibrium bounds must satisfy c_min < c_max, got [{c_min}, {c_max}]"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(BpvError::InvalidProfile(format!(
                "susceptibility degree must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            c_min,
            c_max,
            alpha,
            reference,
        })
    }

    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn reference(&self) -> &ReferenceDistribution {
        &self.reference
    }

    /// The profile is only usable with equilibrium prices strictly inside
    /// its equilibrium bounds.
    pub fn require_pairing(&self, c0: f64) -> Result<()> {
        if self.c_min < c0 && c0 < self.c_max {
            Ok(())
        } else {
            Err(BpvError::InvalidPairing(format!(
                "need c_min < c0 < c_max, got c_min={}, c0={c0}, c_max={}",
                self.c_min, self.c_max
            )))
        }
    }
}

/// Which of the three deviation regimes a (profile, deviation) pair falls
/// into. Outside the behavioural range only rational reasons remain: a
/// large negative deviation excludes a further downtrend, a large positive
/// one excludes a further rise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowRange,
    Behavioural,
    AboveRange,
}

/// Deviation bounds of the behavioural regime:
/// ((c_min - c0)/(1 - alpha), (c_max - c0)/(1 - alpha)).
///
/// For alpha = 1 the regime is unbounded and (-inf, +inf) is returned.
pub fn regime_bounds(profile: &InvestorProfile, c0: f64) -> Result<(f64, f64)> {
    profile.require_pairing(c0)?;
    if profile.alpha() == 1.0 {
        return Ok((f64::NEG_INFINITY, f64::INFINITY));
    }
    let denom = 1.0 - profile.alpha();
    Ok((
        (profile.c_min() - c0) / denom,
        (profile.c_max() - c0) / denom,
    ))
}

/// Boundary deviations resolve into the outer regimes (weak inequalities).
pub fn classify_regime(profile: &InvestorProfile, c0: f64, deviation: f64) -> Result<Regime> {
    let (lower, upper) = regime_bounds(profile, c0)?;
    Ok(if deviation <= lower {
        Regime::BelowRange
    } else if deviation >= upper {
        Regime::AboveRange
    } else {
        Regime::Behavioural
    })
}

/// The interval of admissible potential present values at a given
/// deviation, with the market price as interior anchor.
///
/// In the outer regimes one side collapses onto the anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScopeInterval {
    lo: f64,
    hi: f64,
    anchor: f64,
}

impl ScopeInterval {
    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    /// Maps a price inside the scope onto [-1, 1]: 0 at the anchor, -1 at
    /// the lower bound, +1 at the upper bound. A collapsed side maps its
    /// single point to 0.
    pub fn standardize(&self, p: f64) -> Result<f64> {
        if !self.contains(p) {
            return Err(BpvError::OutOfRange(format!(
                "price {p} outside scope [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(if p <= self.anchor {
            if self.anchor > self.lo {
                (p - self.anchor) / (self.anchor - self.lo)
            } else {
                0.0
            }
        } else {
            (p - self.anchor) / (self.hi - self.anchor)
        })
    }

    /// Inverse of [`standardize`](Self::standardize) on each side.
    pub fn destandardize(&self, beta: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&beta) {
            return Err(BpvError::OutOfRange(format!(
                "standardized value {beta} outside [-1, 1]"
            )));
        }
        Ok(if beta == -1.0 {
            // Exact endpoints keep round-trips and knot mapping bit-clean.
            if self.anchor > self.lo {
                self.lo
            } else {
                self.anchor
            }
        } else if beta == 1.0 {
            if self.hi > self.anchor {
                self.hi
            } else {
                self.anchor
            }
        } else if beta < 0.0 {
            self.anchor + beta * (self.anchor - self.lo)
        } else if beta > 0.0 {
            self.anchor + beta * (self.hi - self.anchor)
        } else {
            self.anchor
        })
    }
}

/// Scope of potential present values at a given deviation.
///
/// lower = c0 + dC when dC is at or below the lower regime bound, else
/// c_min + alpha*dC; upper symmetric. The anchor is the market price.
pub fn scope(profile: &InvestorProfile, c0: f64, deviation: f64) -> Result<ScopeInterval> {
    let (lower, upper) = regime_bounds(profile, c0)?;
    let anchor = c0 + deviation;
    let lo = if deviation <= lower {
        anchor
    } else {
        profile.c_min() + profile.alpha() * deviation
    };
    let hi = if deviation >= upper {
        anchor
    } else {
        profile.c_max() + profile.alpha() * deviation
    };
    Ok(ScopeInterval { lo, hi, anchor })
}

/// Market price deviation from the equilibrium price.
pub fn deviation(ctx: &MarketContext) -> f64 {
    ctx.deviation()
}
