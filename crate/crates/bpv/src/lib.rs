//! Behavioural present value (BPV) modeling.
//!
//! The present value of a security held by an investor subject to
//! behavioural factors is treated as a fuzzy set over an interval of
//! potential present values. This crate provides:
//!
//! - [`profile`]: investor/market types, deviation regimes, the scope
//!   interval of potential present values and the standardization
//!   transform;
//! - [`acceptance`]: reference acceptance distributions and the fuzzy
//!   membership of prices, plus a closed-form cross-check evaluator;
//! - [`numerics`]: breakpoint-aware adaptive quadrature, the membership
//!   centroid (average potential present value) and bisection;
//! - [`market`]: buyer/seller stance classification, coexistence bands
//!   and population balance reports;
//! - [`returns`]: return-rate kinds, Zadeh-extension return-rate
//!   membership over sampled future-value scenarios and CDF mapping.

pub mod acceptance;
pub mod error;
pub mod market;
pub mod numerics;
pub mod profile;
pub mod returns;

pub use acceptance::{
    acceptance, membership, membership_curve, membership_printed, rational_forecast,
    triangular_reference, validate_reference, MembershipCurve, ReferenceDistribution,
};
pub use error::{BpvError, ReferenceViolation, Result};
pub use market::{
    coexistence_interval, market_report, stance, BalanceReport, Stance, StanceKind,
};
pub use numerics::{
    average_ppv, bisect, integrate, solve_stance_threshold, stance_gap, QuadratureSpec, RootSpec,
    ThresholdSolve,
};
pub use profile::{
    classify_regime, deviation, regime_bounds, scope, InvestorProfile, MarketContext, Regime,
    ScopeInterval,
};
pub use returns::{
    expected_membership, future_value_cdf, hiroto_membership, sample_hiroto, FutureValueModel,
    HirotoSet, ReturnKind, Scenario,
};
