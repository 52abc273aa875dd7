//! Strict JSON run configuration: unknown keys rejected, every invariant
//! violation reported with its config path.

use bpv::{InvestorProfile, QuadratureSpec, ReferenceDistribution, RootSpec};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub c0: f64,
    pub investors: Vec<RawInvestor>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub rng_seed: u64,
}

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInvestor {
    pub name: String,
    pub c_min: f64,
    pub c_max: f64,
    pub alpha: f64,
    pub reference: ReferenceSpec,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSpec {
    Named(String),
    Knots(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quad_rel: f64,
    pub quad_abs: f64,
    pub root_x: f64,
    pub neutral_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: 1e-10,
            quad_abs: 1e-12,
            root_x: 1e-8,
            neutral_eps: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn quad_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.quad_rel,
            abs_tol: self.quad_abs,
            ..QuadratureSpec::default()
        }
    }

    pub fn root_spec(&self) -> RootSpec {
        RootSpec {
            x_tol: self.root_x,
            ..RootSpec::default()
        }
    }
}

pub struct RunConfig {
    pub c0: f64,
    pub investors: Vec<(String, InvestorProfile)>,
    pub tolerances: Tolerances,
    pub rng_seed: u64,
}

impl RunConfig {
    pub fn investor(&self, name: &str) -> Result<&InvestorProfile, String> {
        self.investors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| format!("no investor named {name:?} in config"))
    }
}

/// Parses and validates the configuration text, collecting every
/// violation rather than stopping at the first.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<String>> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| vec![format!("config syntax: {e}")])?;

    let mut errors = Vec::new();
    if !(raw.c0.is_finite() && raw.c0 > 0.0) {
        errors.push(format!("c0: must be a positive finite price, got {}", raw.c0));
    }
    for (name, value) in [
        ("quad_rel", raw.tolerances.quad_rel),
        ("quad_abs", raw.tolerances.quad_abs),
        ("root_x", raw.tolerances.root_x),
    ] {
        if !(value.is_finite() && value > 0.0) {
            errors.push(format!("tolerances.{name}: must be positive, got {value}"));
        }
    }
    if !(raw.tolerances.neutral_eps.is_finite() && raw.tolerances.neutral_eps >= 0.0) {
        errors.push(format!(
            "tolerances.neutral_eps: must be non-negative, got {}",
            raw.tolerances.neutral_eps
        ));
    }
    if raw.investors.is_empty() {
        errors.push("investors: at least one investor is required".into());
    }

    let mut investors = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, inv) in raw.investors.iter().enumerate() {
        let path = format!("investors[{i}] ({})", inv.name);
        if !seen.insert(inv.name.clone()) {
            errors.push(format!("{path}: duplicate investor name"));
        }
        let reference = match &inv.reference {
            ReferenceSpec::Named(s) if s == "triangular" => {
                Some(ReferenceDistribution::triangular())
            }
            ReferenceSpec::Named(s) => {
                errors.push(format!(
                    "{path}.reference: unknown reference {s:?} (expected \"triangular\" or a knot list)"
                ));
                None
            }
            ReferenceSpec::Knots(knots) => match ReferenceDistribution::from_knots(knots.clone()) {
                Ok(d) => Some(d),
                Err(e) => {
                    errors.push(format!("{path}.reference: {e}"));
                    None
                }
            },
        };
        if let Some(reference) = reference {
            match InvestorProfile::new(inv.c_min, inv.c_max, inv.alpha, reference) {
                Ok(profile) => {
                    if let Err(e) = profile.require_pairing(raw.c0) {
                        errors.push(format!("{path}: {e}"));
                    } else {
                        investors.push((inv.name.clone(), profile));
                    }
                }
                Err(e) => errors.push(format!("{path}: {e}")),
            }
        }
    }

    if errors.is_empty() {
        Ok(RunConfig {
            c0: raw.c0,
            investors,
            tolerances: raw.tolerances,
            rng_seed: raw.rng_seed,
        })
    } else {
        Err(errors)
    }
}
