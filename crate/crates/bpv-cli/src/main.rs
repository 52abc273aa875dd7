//! Command-line runner: loads a JSON run configuration, dispatches to the
//! bpv library, and emits byte-stable CSV plus a JSON metadata sidecar.
//! All numerical work happens in the library; this binary only
//! orchestrates and formats.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use bpv::{
    average_ppv, coexistence_interval, expected_membership, market_report, membership_curve,
    membership_printed, regime_bounds, sample_hiroto, solve_stance_threshold, BpvError,
    FutureValueModel, MarketContext, ReturnKind,
};
use config::{parse_config, RunConfig};

#[derive(Parser)]
#[command(name = "bpv", version, about = "Behavioural present value model runner")]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write CSV here (metadata goes to <out>.meta.json). Defaults to
    /// standard output with metadata on the error stream.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Membership curve of one investor at a given deviation.
    Membership {
        #[arg(long)]
        investor: String,
        /// Deviation of the market price from equilibrium.
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Also emit the closed-form evaluator (non-negative deviations only).
        #[arg(long)]
        printed: bool,
    },
    /// Average-PPV sweep over a deviation grid.
    AvgPpv {
        #[arg(long)]
        investor: String,
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long)]
        step: f64,
    },
    /// Stance threshold deviation for one investor.
    Threshold {
        #[arg(long)]
        investor: String,
        /// Optional bracket "lo,hi" for the root search.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        bracket: Option<(f64, f64)>,
    },
    /// Stance report for every configured investor at a market price.
    Stance {
        #[arg(long)]
        price: f64,
    },
    /// Buyer/seller coexistence price band for a pair of investors.
    Coexist {
        #[arg(long)]
        buyer: String,
        #[arg(long)]
        seller: String,
    },
    /// Hiroto sampling of the return-rate membership.
    Returns {
        #[arg(long)]
        investor: String,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Simple)]
        kind: KindArg,
        /// Future-value model: "point:V", "lognormal:LOC,SCALE", or
        /// "empirical:V1:W1,V2:W2,...".
        #[arg(long)]
        model: String,
        /// Return grid "start,stop,step".
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 64)]
        scenarios: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Simple,
    Log,
}

impl From<KindArg> for ReturnKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Simple => ReturnKind::Simple,
            KindArg::Log => ReturnKind::Logarithmic,
        }
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"lo,hi\", got {s:?}"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

enum CliError {
    /// Bad input: config, flags, or argument semantics. Exit 1.
    Validation(String),
    /// The library's numerical machinery failed. Exit 2.
    Numerical(String),
}

impl From<BpvError> for CliError {
    fn from(e: BpvError) -> Self {
        match e {
            BpvError::QuadratureDivergence { .. }
            | BpvError::DegenerateMass
            | BpvError::InvalidBracket(_)
            | BpvError::NoSignChange => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

struct Output {
    csv: String,
    notes: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // Help and version output.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let config_text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    let config = match parse_config(&config_text) {
        Ok(c) => c,
        Err(violations) => {
            eprintln!("error: invalid configuration:");
            for v in &violations {
                eprintln!("  - {v}");
            }
            return ExitCode::from(1);
        }
    };

    let output = match run(&cli.cmd, &config) {
        Ok(o) => o,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            return ExitCode::from(2);
        }
    };

    let metadata = serde_json::json!({
        "command": std::env::args().collect::<Vec<_>>(),
        "config_path": cli.config.display().to_string(),
        "config_sha256": format!("{:x}", Sha256::digest(config_text.as_bytes())),
        "tolerances": config.tolerances,
        "rng_seed": config.rng_seed,
        "notes": output.notes,
    });
    let metadata = format!("{:#}", metadata);

    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            let meta_path = format!("{}.meta.json", path.display());
            if let Err(e) = std::fs::write(&meta_path, &metadata) {
                eprintln!("error: cannot write {meta_path}: {e}");
                return ExitCode::from(1);
            }
        }
        None => {
            print!("{}", output.csv);
            eprintln!("{metadata}");
        }
    }
    ExitCode::SUCCESS
}

/// Published case-study reference values for well-known profiles. These
/// figures are not reproduced by this implementation; see the README's
/// "Known discrepancies".
fn published_threshold_note(config: &RunConfig, name: &str) -> Option<String> {
    let (_, profile) = config.investors.iter().find(|(n, _)| n == name)?;
    if config.c0 != 100.0 {
        return None;
    }
    let published = match (profile.c_min(), profile.c_max(), profile.alpha()) {
        (95.0, 110.0, 0.2) => 5.24,
        (90.0, 105.0, 0.8) => -19.12,
        _ => return None,
    };
    Some(format!(
        "published case-study reference threshold for investor {name}: {published}; \
         not reproduced by this implementation — see README, Known discrepancies"
    ))
}

fn run(cmd: &Cmd, config: &RunConfig) -> Result<Output, CliError> {
    let quad = config.tolerances.quad_spec();
    let root = config.tolerances.root_spec();
    match cmd {
        Cmd::Membership {
            investor,
            delta,
            points,
            printed,
        } => {
            let profile = config.investor(investor).map_err(CliError::Validation)?;
            let ctx = MarketContext::from_deviation(config.c0, *delta)?;
            let curve = membership_curve(profile, &ctx, *points)?;
            let mut csv = String::new();
            if *printed {
                csv.push_str("p,mu,mu_printed\n");
                for &(p, mu) in curve.samples() {
                    let mp = membership_printed(profile, &ctx, p)?;
                    csv.push_str(&format!("{},{},{}\n", fmt(p), fmt(mu), fmt(mp)));
                }
            } else {
                csv.push_str("p,mu\n");
                for &(p, mu) in curve.samples() {
                    csv.push_str(&format!("{},{}\n", fmt(p), fmt(mu)));
                }
            }
            Ok(Output { csv, notes: vec![] })
        }
        Cmd::AvgPpv {
            investor,
            start,
            stop,
            step,
        } => {
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN bounds
            if !(step.is_finite() && *step > 0.0) || !(start < stop) {
                return Err(CliError::Validation(format!(
                    "need start < stop and step > 0, got {start}, {stop}, {step}"
                )));
            }
            let profile = config.investor(investor).map_err(CliError::Validation)?;
            // Inject the regime boundaries so branch switches are sampled
            // exactly.
            let (lower, upper) = regime_bounds(profile, config.c0)?;
            let mut grid: Vec<f64> = Vec::new();
            let n = ((stop - start) / step).round() as usize;
            for i in 0..=n {
                let dc = start + i as f64 * step;
                if dc <= *stop + 1e-12 * step {
                    grid.push(dc);
                }
            }
            for b in [lower, upper] {
                if b.is_finite() && *start < b && b < *stop {
                    grid.push(b);
                }
            }
            grid.sort_by(f64::total_cmp);
            grid.dedup();

            let mut csv = String::from("delta,xi,gap\n");
            for &dc in &grid {
                let ctx = MarketContext::from_deviation(config.c0, dc)?;
                let xi = average_ppv(profile, &ctx, &quad)?;
                let gap = xi - ctx.market_price();
                csv.push_str(&format!("{},{},{}\n", fmt(dc), fmt(xi), fmt(gap)));
            }
            Ok(Output { csv, notes: vec![] })
        }
        Cmd::Threshold { investor, bracket } => {
            let profile = config.investor(investor).map_err(CliError::Validation)?;
            let sol = solve_stance_threshold(profile, config.c0, *bracket, &root, &quad)?;
            let dc = sol.primary();
            let gap = bpv::stance_gap(profile, config.c0, dc, &quad)?;
            let mut csv = String::from("investor,delta_star,price_star,gap\n");
            csv.push_str(&format!(
                "{investor},{},{},{}\n",
                fmt(dc),
                fmt(config.c0 + dc),
                fmt(gap)
            ));
            let notes = published_threshold_note(config, investor)
                .into_iter()
                .collect();
            Ok(Output { csv, notes })
        }
        Cmd::Stance { price } => {
            let ctx = MarketContext::new(config.c0, *price)?;
            let profiles: Vec<_> = config.investors.iter().map(|(_, p)| p.clone()).collect();
            let report = market_report(&profiles, &ctx, config.tolerances.neutral_eps, &quad)?;
            let mut csv = String::from("investor,stance,gap\n");
            for ((name, _), s) in config.investors.iter().zip(report.stances) {
                let s = s?;
                csv.push_str(&format!("{name},{},{}\n", s.kind, fmt(s.gap)));
            }
            let notes = vec![format!(
                "buyers={}, sellers={}, neutral={}, coexistence={}",
                report.buyer_count, report.seller_count, report.neutral_count, report.coexistence
            )];
            Ok(Output { csv, notes })
        }
        Cmd::Coexist { buyer, seller } => {
            let b = config.investor(buyer).map_err(CliError::Validation)?;
            let s = config.investor(seller).map_err(CliError::Validation)?;
            let band = coexistence_interval(b, s, config.c0, &root, &quad)?;
            let mut csv = String::from("lo,hi\n");
            let mut notes = Vec::new();
            match band {
                Some((lo, hi)) => csv.push_str(&format!("{},{}\n", fmt(lo), fmt(hi))),
                None => notes.push(format!("no coexistence band for {buyer}/{seller}")),
            }
            for name in [buyer, seller] {
                notes.extend(published_threshold_note(config, name));
            }
            if config.c0 == 100.0 && published_threshold_note(config, buyer).is_some()
                && published_threshold_note(config, seller).is_some()
            {
                notes.push(
                    "published case-study reference band: ]80.88; 105.24[; \
                     not reproduced by this implementation — see README, Known discrepancies"
                        .into(),
                );
            }
            Ok(Output { csv, notes })
        }
        Cmd::Returns {
            investor,
            delta,
            kind,
            model,
            grid,
            scenarios,
        } => {
            let profile = config.investor(investor).map_err(CliError::Validation)?;
            let ctx = MarketContext::from_deviation(config.c0, *delta)?;
            let model = parse_model(model).map_err(CliError::Validation)?;
            let r_grid = parse_grid(grid).map_err(CliError::Validation)?;
            let h = sample_hiroto(
                profile,
                &ctx,
                &model,
                (*kind).into(),
                &r_grid,
                *scenarios,
                config.rng_seed,
            )?;
            let expected = expected_membership(&h);
            let mut csv = String::from("r,expected_rho\n");
            for (r, rho) in h.r_grid.iter().zip(expected) {
                csv.push_str(&format!("{},{}\n", fmt(*r), fmt(rho)));
            }
            let notes = vec![format!(
                "scenarios={scenarios}, seed={}, model={model:?}",
                config.rng_seed
            )];
            Ok(Output { csv, notes })
        }
    }
}

fn parse_model(s: &str) -> Result<FutureValueModel, String> {
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| format!("model must be \"kind:params\", got {s:?}"))?;
    let model = match head {
        "point" => {
            let v: f64 = rest.parse().map_err(|e| format!("point value: {e}"))?;
            FutureValueModel::PointMass(v)
        }
        "lognormal" => {
            let (loc, scale) = parse_pair(rest)?;
            FutureValueModel::LogNormal {
                location: loc,
                scale,
            }
        }
        "empirical" => {
            let mut atoms = Vec::new();
            for part in rest.split(',') {
                let (v, w) = part
                    .split_once(':')
                    .ok_or_else(|| format!("empirical atom must be \"value:weight\", got {part:?}"))?;
                let v: f64 = v.trim().parse().map_err(|e| format!("atom value: {e}"))?;
                let w: f64 = w.trim().parse().map_err(|e| format!("atom weight: {e}"))?;
                atoms.push((v, w));
            }
            FutureValueModel::Empirical(atoms)
        }
        other => return Err(format!("unknown model kind {other:?}")),
    };
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be \"start,stop,step\", got {s:?}"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let stop: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    let step: f64 = parts[2].trim().parse().map_err(|e| format!("{e}"))?;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN bounds
    if !(step.is_finite() && step > 0.0) || !(start < stop) {
        return Err(format!("need start < stop and step > 0, got {s:?}"));
    }
    let n = ((stop - start) / step).round() as usize;
    Ok((0..=n)
        .map(|i| start + i as f64 * step)
        .filter(|r| *r <= stop + 1e-12 * step)
        .collect())
}
