//! Adaptive quadrature with breakpoint handling, the average potential
//! present value (membership centroid) and bisection-based stance
//! threshold solving.

use crate::acceptance::{acceptance, price_breakpoints};
use crate::error::{BpvError, Result};
use crate::profile::{regime_bounds, scope, InvestorProfile, MarketContext};

/// Tolerances for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 50,
        }
    }
}

/// Tolerances for bracketing root finders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub x_tol: f64,
    pub max_iter: u32,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            x_tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Grid step used when scanning the behavioural regime for stance sign
/// changes.
pub const DEFAULT_SCAN_STEP: f64 = 0.05;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || b - a <= f64::EPSILON * (a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(BpvError::QuadratureDivergence { a, b });
    }
    let half_tol = 0.5 * tol;
    Ok(adaptive(f, a, fa, m, fm, flm, left, half_tol, depth - 1)?
        + adaptive(f, m, fm, b, fb, frm, right, half_tol, depth - 1)?)
}

fn integrate_piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    // Endpoint samples are nudged inward so jump discontinuities sitting
    // exactly on a piece boundary are integrated from their one-sided
    // limits.
    let nudge = (b - a) * 1e-13;
    let fa = f(a + nudge);
    let fb = f(b - nudge);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    adaptive(f, a, fa, b, fb, fm, whole, tol, spec.max_depth)
}

/// Adaptive Simpson quadrature of `f` over [a, b], integrated
/// independently on each sub-interval between consecutive breakpoints so
/// kinks and jump discontinuities never straddle a panel.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if a > b {
        return Err(BpvError::Domain(format!(
            "integration bounds out of order: [{a}, {b}]"
        )));
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| a < *x && *x < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    let mut total = 0.0;
    let mut left = a;
    for cut in cuts.into_iter().chain(std::iter::once(b)) {
        total += integrate_piece(&f, left, cut, spec)?;
        left = cut;
    }
    Ok(total)
}

/// Standard bisection on a sign-changing bracket, run down to `x_tol`
/// interval width.
// The negated comparison is deliberate: it rejects NaN endpoints too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &RootSpec) -> Result<f64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(BpvError::InvalidBracket(format!(
            "need finite a < b, got [{a}, {b}]"
        )));
    }
    let mut lo = a;
    let mut hi = b;
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(BpvError::InvalidBracket(format!(
            "f has the same sign at both ends of [{a}, {b}]"
        )));
    }
    for _ in 0..spec.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= spec.x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Membership evaluator over a fixed scope, shared by the integrals so a
/// centroid computation performs no redundant validation.
fn membership_on_scope<'a>(
    profile: &'a InvestorProfile,
    s: &'a crate::profile::ScopeInterval,
    deviation: f64,
) -> impl Fn(f64) -> f64 + 'a {
    move |p: f64| {
        if !s.contains(p) {
            return 0.0;
        }
        let beta = s.standardize(p).expect("price inside scope");
        acceptance(profile.reference(), deviation, beta)
    }
}

/// Centroid of the membership curve: the investor's average potential
/// present value at a given deviation.
pub fn average_ppv(
    profile: &InvestorProfile,
    ctx: &MarketContext,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let dc = ctx.deviation();
    let s = scope(profile, ctx.c0(), dc)?;
    let cuts = price_breakpoints(&s, profile.reference());
    let mu = membership_on_scope(profile, &s, dc);
    let mass = integrate(&mu, s.lo(), s.hi(), &cuts, spec)?;
    if mass <= spec.abs_tol {
        return Err(BpvError::DegenerateMass);
    }
    let moment = integrate(|p| p * mu(p), s.lo(), s.hi(), &cuts, spec)?;
    Ok(moment / mass)
}

/// Signed gap between the average potential present value and the market
/// price: positive means the investor sees the security as underpriced
/// (buyer), negative as overpriced (seller).
pub fn stance_gap(
    profile: &InvestorProfile,
    c0: f64,
    deviation: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ctx = MarketContext::from_deviation(c0, deviation)?;
    Ok(average_ppv(profile, &ctx, spec)? - ctx.market_price())
}

/// Deviations at which the stance gap crosses zero. The model gives no
/// uniqueness guarantee, so every crossing found is reported.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSolve {
    roots: Vec<f64>,
}

impl ThresholdSolve {
    /// The first (smallest) crossing.
    pub fn primary(&self) -> f64 {
        self.roots[0]
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }
}

/// Finds deviations where the stance gap changes sign.
///
/// With an explicit bracket the gap is bisected directly. Without one the
/// behavioural regime is scanned on a fixed grid (step
/// [`DEFAULT_SCAN_STEP`]) and every sign change is refined by bisection.
pub fn solve_stance_threshold(
    profile: &InvestorProfile,
    c0: f64,
    bracket: Option<(f64, f64)>,
    root_spec: &RootSpec,
    quad_spec: &QuadratureSpec,
) -> Result<ThresholdSolve> {
    // Quadrature failures inside closures are stashed and surfaced after
    // the scan; the NaN sentinel never produces a sign change.
    let stashed: std::cell::RefCell<Option<BpvError>> = std::cell::RefCell::new(None);
    let g = |dc: f64| match stance_gap(profile, c0, dc, quad_spec) {
        Ok(v) => v,
        Err(e) => {
            stashed.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let check_stash = || -> Result<()> {
        match stashed.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    };

    if let Some((a, b)) = bracket {
        if a + c0 <= 0.0 || b + c0 <= 0.0 {
            return Err(BpvError::InvalidBracket(format!(
                "bracket [{a}, {b}] implies non-positive market prices"
            )));
        }
        let root = bisect(g, a, b, root_spec);
        check_stash()?;
        return Ok(ThresholdSolve { roots: vec![root?] });
    }

    let (lower, upper) = regime_bounds(profile, c0)?;
    if !lower.is_finite() || !upper.is_finite() {
        return Err(BpvError::InvalidBracket(
            "behavioural regime is unbounded (alpha = 1); supply an explicit bracket".into(),
        ));
    }
    // Keep market prices positive along the scan.
    let scan_lo = lower.max(DEFAULT_SCAN_STEP - c0);
    let mut roots = Vec::new();
    let mut x = scan_lo;
    let mut gx = g(x);
    while x < upper {
        let next = (x + DEFAULT_SCAN_STEP).min(upper);
        let gn = g(next);
        if gx == 0.0 {
            roots.push(x);
        } else if gn != 0.0 && gx.signum() != gn.signum() {
            let root = bisect(g, x, next, root_spec);
            check_stash()?;
            roots.push(root?);
        }
        x = next;
        gx = gn;
    }
    check_stash()?;
    if gx == 0.0 {
        roots.push(x);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= root_spec.x_tol);
    if roots.is_empty() {
        return Err(BpvError::NoSignChange);
    }
    Ok(ThresholdSolve { roots })
}
