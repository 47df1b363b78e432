//! Command implementations behind the `biq` binary.
//!
//! Every command returns an exit code, a JSON document and a one-line
//! summary: 0 valid or equal, 1 violation or inequality, 2 input or
//! resource error.

pub mod registry;

use biquandle::{
    check_biquandle_axioms, check_quandle_axioms, coloring_space_system, crossing_matrix,
    fixed_points_finite_with, markov_conjugate, markov_stabilize, parse_braid, sample_fixed_set,
    validate_group, validate_skew_brace, verify_system_vs_fixed_points, BraidWord, CheckMode,
    EnumerationConfig, Error, FixedSetReport, NumericConfig, Result,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "biq", version, about = "Biquandles from skew braces and braid-closure colorings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a group, skew brace, quandle or biquandle.
    Check(CheckArgs),
    /// Fixed points of the braid-induced map (colorings).
    Color(ColorArgs),
    /// Components, crossing matrix, linking numbers and coloring equations.
    Linkinfo(LinkArgs),
    /// Coloring counts across Markov-equivalent braid words.
    Invariance(InvarianceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Sample count for continuous carriers.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Equality tolerance for continuous carriers.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

impl Common {
    fn mode(&self) -> CheckMode {
        CheckMode::Sampled {
            count: self.samples as usize,
            tolerance: self.tolerance,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
#[group(id = "target", required = true, multiple = false)]
pub struct Target {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub brace: Option<String>,
    #[arg(long)]
    pub quandle: Option<String>,
    #[arg(long)]
    pub biquandle: Option<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub target: Target,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    #[arg(long)]
    pub biquandle: String,
    /// Braid word, e.g. "2: 1 1 1".
    #[arg(long, allow_hyphen_values = true)]
    pub braid: String,
    /// Largest number of states enumerated for finite carriers.
    #[arg(long, default_value_t = 100_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub braid: String,
    /// Also cross-check the equations against fixed points of (R^3, r2).
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    #[arg(long)]
    pub biquandle: String,
    #[arg(long, allow_hyphen_values = true)]
    pub braid: String,
    /// Number of successive random conjugations.
    #[arg(long, default_value_t = 5)]
    pub conjugates: usize,
    /// Add one positive and one negative stabilization.
    #[arg(long)]
    pub stabilize: bool,
    #[arg(long, default_value_t = 100_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

pub struct Outcome {
    pub code: i32,
    pub json: Value,
    pub summary: String,
}

impl Outcome {
    fn new(ok: bool, json: Value, summary: String) -> Self {
        Outcome {
            code: if ok { 0 } else { 1 },
            json,
            summary,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Color(a) => color(a),
        Command::Linkinfo(a) => linkinfo(a),
        Command::Invariance(a) => invariance(a),
    }
}

pub fn out_path(cli: &Cli) -> Option<&str> {
    let common = match &cli.command {
        Command::Check(a) => &a.common,
        Command::Color(a) => &a.common,
        Command::Linkinfo(a) => &a.common,
        Command::Invariance(a) => &a.common,
    };
    common.out.as_deref()
}

fn check(a: &CheckArgs) -> Result<Outcome> {
    let t = &a.target;
    let mode = a.common.mode();
    let (kind, sel, report) = if let Some(sel) = &t.group {
        ("group", sel, validate_group(&registry::group(sel)?))
    } else if let Some(sel) = &t.brace {
        let b = registry::brace(sel)?;
        let mode = if b.carrier().is_finite() { CheckMode::Exhaustive } else { mode };
        ("brace", sel, validate_skew_brace(&b, mode))
    } else if let Some(sel) = &t.quandle {
        ("quandle", sel, check_quandle_axioms(&registry::quandle(sel)?, mode))
    } else if let Some(sel) = &t.biquandle {
        ("biquandle", sel, check_biquandle_axioms(&registry::biquandle(sel)?, mode))
    } else {
        unreachable!("clap requires one target")
    };
    let summary = match report.violations.first() {
        None => format!("{kind} {sel}: valid"),
        Some(v) => format!(
            "{kind} {sel}: {} violation(s), first {} at {}",
            report.violations.len(),
            v.axiom,
            serde_json::to_string(&v.witness)?
        ),
    };
    let json = json!({
        "command": "check",
        "kind": kind,
        "target": sel,
        "seed": a.common.seed,
        "samples": a.common.samples,
        "tolerance": a.common.tolerance,
        "report": report,
    });
    Ok(Outcome::new(report.valid, json, summary))
}

fn braid(text: &str) -> Result<BraidWord> {
    parse_braid(text)
}

fn color(a: &ColorArgs) -> Result<Outcome> {
    let q = registry::biquandle(&a.biquandle)?;
    let w = braid(&a.braid)?;
    let report = if q.carrier().is_finite() {
        let cfg = EnumerationConfig {
            budget: a.budget,
            ..Default::default()
        };
        fixed_points_finite_with(&q, &w, cfg)?
    } else {
        let cfg = NumericConfig {
            tolerance: a.common.tolerance,
            ..Default::default()
        };
        sample_fixed_set(&q, &w, a.common.samples as usize, a.common.seed, &cfg)?
    };
    let summary = match &report {
        FixedSetReport::Finite { count, .. } => format!("{} on {w}: {count} colorings", a.biquandle),
        FixedSetReport::Continuous { samples, failed, .. } => {
            let mut dims: Vec<usize> = samples.iter().map(|s| s.dimension).collect();
            dims.sort();
            dims.dedup();
            format!(
                "{} on {w}: {} fixed points ({failed} seeds failed), dimensions {dims:?}",
                a.biquandle,
                samples.len()
            )
        }
    };
    let json = json!({
        "command": "color",
        "biquandle": a.biquandle,
        "braid": w,
        "seed": a.common.seed,
        "result": report,
    });
    Ok(Outcome::new(true, json, summary))
}

fn linkinfo(a: &LinkArgs) -> Result<Outcome> {
    let w = braid(&a.braid)?;
    let profile = crossing_matrix(&w);
    let system = coloring_space_system(&profile);
    let independent = system.independent().count();
    let mut json = json!({
        "command": "linkinfo",
        "braid": w,
        "components": profile.components,
        "c": profile.c,
        "lk": profile.lk,
        "profile": profile,
        "system": system,
        "text": system.text(),
        "independent_equations": independent,
        "seed": a.common.seed,
    });
    let mut ok = true;
    let mut summary = format!(
        "{w}: {} component(s), {independent} independent equation(s)",
        profile.components
    );
    if a.verify {
        let r = verify_system_vs_fixed_points(&w, a.common.samples as usize, a.common.seed, a.common.tolerance)?;
        ok = r.consistent;
        summary.push_str(if ok { ", consistent with fixed points" } else { ", INCONSISTENT with fixed points" });
        json["consistency"] = serde_json::to_value(&r)?;
    }
    Ok(Outcome::new(ok, json, summary))
}

/// SplitMix64, so the conjugators depend only on the seed.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn invariance(a: &InvarianceArgs) -> Result<Outcome> {
    let q = registry::biquandle(&a.biquandle)?;
    if !q.carrier().is_finite() {
        return Err(Error::Parameter(
            "invariance compares coloring counts and needs a finite biquandle".into(),
        ));
    }
    let w = braid(&a.braid)?;
    let mut reps: Vec<(String, BraidWord)> = vec![("original".into(), w.clone())];
    if w.strands() >= 2 {
        let mut state = a.common.seed;
        let mut cur = w.clone();
        for _ in 0..a.conjugates {
            let r = splitmix(&mut state);
            let g = (r % (w.strands() as u64 - 1)) as i32 + 1;
            let g = if (r >> 32) & 1 == 0 { g } else { -g };
            cur = markov_conjugate(&cur, g)?;
            reps.push((format!("conjugate by {g}"), cur.clone()));
        }
    }
    if a.stabilize {
        reps.push(("stabilize +".into(), markov_stabilize(&w, true)));
        reps.push(("stabilize -".into(), markov_stabilize(&w, false)));
    }
    let cfg = EnumerationConfig {
        budget: a.budget,
        ..Default::default()
    };
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for (step, word) in &reps {
        let count = fixed_points_finite_with(&q, word, cfg)?.count().unwrap_or(0);
        counts.push(count);
        rows.push(json!({ "move": step, "word": word, "count": count }));
    }
    let equal = counts.iter().all(|&c| c == counts[0]);
    let summary = format!(
        "{} on {w}: counts {counts:?} across {} representatives, {}",
        a.biquandle,
        reps.len(),
        if equal { "all equal" } else { "NOT equal" }
    );
    let json = json!({
        "command": "invariance",
        "biquandle": a.biquandle,
        "braid": w,
        "seed": a.common.seed,
        "representatives": rows,
        "invariant": equal,
    });
    Ok(Outcome::new(equal, json, summary))
}
