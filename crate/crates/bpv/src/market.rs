//! Stance classification per investor, the coexistence band of market
//! prices where a buyer and a seller face each other, and multi-investor
//! balance reports.

use crate::error::{BpvError, Result};
use crate::numerics::{solve_stance_threshold, stance_gap, QuadratureSpec, RootSpec};
use crate::profile::{InvestorProfile, MarketContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StanceKind {
    Buyer,
    Seller,
    Neutral,
}

impl std::fmt::Display for StanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StanceKind::Buyer => "buyer",
            StanceKind::Seller => "seller",
            StanceKind::Neutral => "neutral",
        })
    }
}

/// Classification of an investor at a market price, with the gap between
/// the average potential present value and the price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stance {
    pub kind: StanceKind,
    pub gap: f64,
}

/// Classifies an investor: buyer when the average PPV exceeds the market
/// price by more than `eps`, seller when it falls short by more, neutral
/// inside the band.
pub fn stance(
    profile: &InvestorProfile,
    ctx: &MarketContext,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<Stance> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(BpvError::Domain(format!(
            "neutral band must be non-negative, got {eps}"
        )));
    }
    let gap = stance_gap(profile, ctx.c0(), ctx.deviation(), spec)?;
    let kind = if gap > eps {
        StanceKind::Buyer
    } else if gap < -eps {
        StanceKind::Seller
    } else {
        StanceKind::Neutral
    };
    Ok(Stance { kind, gap })
}

/// Per-investor stances and aggregate counts for a population at one
/// market price. Failed classifications are collected, not fatal; the
/// three counts plus the failure count sum to the population size.
#[derive(Debug)]
pub struct BalanceReport {
    pub stances: Vec<Result<Stance>>,
    pub buyer_count: usize,
    pub seller_count: usize,
    pub neutral_count: usize,
    /// True when at least one buyer and one seller are present.
    pub coexistence: bool,
}

pub fn market_report(
    profiles: &[InvestorProfile],
    ctx: &MarketContext,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<BalanceReport> {
    if profiles.is_empty() {
        return Err(BpvError::Domain("empty investor population".into()));
    }
    let stances: Vec<Result<Stance>> = profiles
        .iter()
        .map(|p| stance(p, ctx, eps, spec))
        .collect();
    let count = |k: StanceKind| {
        stances
            .iter()
            .filter(|s| matches!(s, Ok(st) if st.kind == k))
            .count()
    };
    let buyer_count = count(StanceKind::Buyer);
    let seller_count = count(StanceKind::Seller);
    let neutral_count = count(StanceKind::Neutral);
    Ok(BalanceReport {
        coexistence: buyer_count > 0 && seller_count > 0,
        stances,
        buyer_count,
        seller_count,
        neutral_count,
    })
}

/// Open band of market prices at which `buyer` classifies as a buyer and
/// `seller` as a seller simultaneously, derived from each profile's
/// stance threshold and clamped to positive prices. `None` when the
/// thresholds do not overlap.
pub fn coexistence_interval(
    buyer: &InvestorProfile,
    seller: &InvestorProfile,
    c0: f64,
    root_spec: &RootSpec,
    quad_spec: &QuadratureSpec,
) -> Result<Option<(f64, f64)>> {
    let buyer_root = solve_stance_threshold(buyer, c0, None, root_spec, quad_spec)?.primary();
    let seller_root = solve_stance_threshold(seller, c0, None, root_spec, quad_spec)?.primary();
    // The gap runs from positive at the bottom of the behavioural regime
    // to negative at its top, so the buyer region is the half-line below
    // the buyer's threshold and the seller region the one above the
    // seller's.
    let lo = (c0 + seller_root).max(0.0);
    let hi = c0 + buyer_root;
    Ok(if lo < hi { Some((lo, hi)) } else { None })
}
