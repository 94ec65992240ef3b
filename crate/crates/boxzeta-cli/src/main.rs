//! boxzeta: point counts, CM newform coefficients, trace-identity checks,
//! and truncated L-function values for the cuboid surface.
//!
//! Exit codes: 0 success, 1 usage or input error (including the excluded
//! bad prime 2), 2 verification failure. Data goes to stdout, logs to
//! stderr.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use boxzeta::cmforms::{self, Coefficient, FormId, H16InertConvention};
use boxzeta::counting::{self, CountError, CountMethod, CountRecord, ExceptionalAction};
use boxzeta::ffield::{odd_primes_upto, PrimeContext};
use boxzeta::lfunc::{self, LSpec};
use boxzeta::store::{CacheKey, CacheValue, Store};
use boxzeta::tracefit::{self, FitReport, MultiplicityVector, PicardSplit, BASIS_LABELS};

#[derive(Parser)]
#[command(
    name = "boxzeta",
    version,
    about = "Point counts and L-function data for the rational-cuboid surface",
    arg_required_else_help = true
)]
struct Cli {
    /// Cache directory (takes precedence over BOXZETA_CACHE)
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads for per-prime parallelism (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Count points of one variety over F_p (degree 2 counts curve-x over F_{p^2})
    Count {
        #[arg(long, value_enum)]
        variety: VarietyArg,
        #[arg(long)]
        prime: u64,
        /// Field degree; 2 is supported for curve-x only
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        degree: u32,
        /// Use the exhaustive enumeration oracle instead of the fast kernel
        #[arg(long)]
        brute: bool,
    },
    /// Prime coefficient of one integer-valued newform
    Ap {
        #[arg(long, value_enum)]
        form: ApFormArg,
        #[arg(long)]
        prime: u64,
    },
    /// Conjugate coefficient pair of the weight-2 pair form, from curve counts
    Gpair {
        #[arg(long)]
        prime: u64,
    },
    /// q-expansion a_1..a_N of one form
    Qexp {
        #[arg(long, value_enum)]
        form: QexpFormArg,
        #[arg(long)]
        limit: u64,
    },
    /// Check the seven-term trace identity at every odd prime <= pmax
    Verify {
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        /// Value assigned to a_p(h16) at p = 3 (mod 4)
        #[arg(long, value_enum, default_value_t = ConvArg::Zero)]
        h16_inert: ConvArg,
    },
    /// Re-derive the seven multiplicities from surface counts alone
    Fit {
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = ConvArg::Zero)]
        h16_inert: ConvArg,
    },
    /// Truncated Euler-product value plus per-prime local data
    Euler {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        pmax: u64,
        /// Evaluation point (real, must exceed 3)
        #[arg(long, default_value_t = 4.0)]
        s: f64,
    },
    /// Full reproduction: fit, ranks, Picard splits and resolved counts
    /// under both exceptional-action hypotheses
    Report {
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = ConvArg::Zero)]
        h16_inert: ConvArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VarietyArg {
    Surface,
    #[value(name = "curve-x")]
    CurveX,
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ApFormArg {
    F32,
    F64,
    H8,
    H16,
    H32,
}

impl ApFormArg {
    fn form(self) -> FormId {
        match self {
            ApFormArg::F32 => FormId::F32,
            ApFormArg::F64 => FormId::F64,
            ApFormArg::H8 => FormId::H8,
            ApFormArg::H16 => FormId::H16,
            ApFormArg::H32 => FormId::H32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QexpFormArg {
    F32,
    F64,
    G64,
    H8,
    H16,
    H32,
}

impl QexpFormArg {
    fn form(self) -> FormId {
        match self {
            QexpFormArg::F32 => FormId::F32,
            QexpFormArg::F64 => FormId::F64,
            QexpFormArg::G64 => FormId::G64Pair,
            QexpFormArg::H8 => FormId::H8,
            QexpFormArg::H16 => FormId::H16,
            QexpFormArg::H32 => FormId::H32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvArg {
    /// a_p(h16) = 0 at inert primes (standard for odd-weight CM forms)
    Zero,
    /// a_p(h16) = -2p at inert primes
    Minus2p,
}

impl ConvArg {
    fn conv(self) -> H16InertConvention {
        match self {
            ConvArg::Zero => H16InertConvention::Zero,
            ConvArg::Minus2p => H16InertConvention::MinusTwoP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    /// Degree-30 product attached to H^2 of the unresolved surface
    Sbar,
    /// Degree-78 resolved-surface product, twisted exceptional action
    /// (multiplies in zeta(s-1)^24 L(s-1, chi_m4)^24)
    #[value(name = "s-paper")]
    SPaper,
    /// Degree-78 resolved-surface product, permutation exceptional action
    /// (multiplies in zeta(s-1)^36 L(s-1, chi_m4)^12)
    #[value(name = "s-perm")]
    SPerm,
}

impl PresetArg {
    fn spec(self) -> LSpec {
        match self {
            PresetArg::Sbar => LSpec::surface(),
            PresetArg::SPaper => LSpec::resolved(ExceptionalAction::Twisted),
            PresetArg::SPerm => LSpec::resolved(ExceptionalAction::Permutation),
        }
    }

    fn name(self) -> &'static str {
        match self {
            PresetArg::Sbar => "sbar",
            PresetArg::SPaper => "s-paper",
            PresetArg::SPerm => "s-perm",
        }
    }
}

fn main() {
    // Die quietly when the reader closes the pipe (`boxzeta qexp ... | head`),
    // like other line-oriented tools, instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let store = open_store(cli.cache_dir.as_deref());
    let format = cli.format;
    match cli.command {
        Command::Count {
            variety,
            prime,
            degree,
            brute,
        } => cmd_count(format, store.as_ref(), variety, prime, degree, brute),
        Command::Ap { form, prime } => cmd_ap(format, form.form(), prime),
        Command::Gpair { prime } => cmd_gpair(format, store.as_ref(), prime),
        Command::Qexp { form, limit } => cmd_qexp(format, form.form(), limit),
        Command::Verify { pmax, h16_inert } => {
            cmd_verify(format, store.as_ref(), pmax, h16_inert.conv())
        }
        Command::Fit { pmax, h16_inert } => cmd_fit(format, store.as_ref(), pmax, h16_inert.conv()),
        Command::Euler { preset, pmax, s } => cmd_euler(format, preset, pmax, s),
        Command::Report { pmax, h16_inert } => {
            cmd_report(format, store.as_ref(), pmax, h16_inert.conv())
        }
    }
}

fn open_store(flag: Option<&std::path::Path>) -> Option<Store> {
    let dir = Store::resolve_dir(flag)?;
    match Store::new(&dir) {
        Ok(store) => Some(store),
        Err(e) => {
            log::warn!(
                "cache directory {} unusable ({e}); running uncached",
                dir.display()
            );
            None
        }
    }
}

/// The explicit bad-prime rejection shared by the per-prime subcommands.
fn reject_bad_prime(p: u64) -> Option<i32> {
    if p == 2 {
        eprintln!(
            "bad prime excluded: 2 is the unique prime of bad reduction; \
             all data here ranges over odd primes"
        );
        Some(1)
    } else {
        None
    }
}

fn cmd_count(
    format: Format,
    store: Option<&Store>,
    variety: VarietyArg,
    prime: u64,
    degree: u32,
    brute: bool,
) -> anyhow::Result<i32> {
    if let Some(code) = reject_bad_prime(prime) {
        return Ok(code);
    }
    if degree == 2 && variety != VarietyArg::CurveX {
        eprintln!("--degree 2 applies only to --variety curve-x");
        return Ok(1);
    }
    let record = match (variety, brute) {
        (VarietyArg::Surface, true) => counting::count_surface_brute(prime)?,
        (VarietyArg::Surface, false) => {
            let count = cached_surface_count(store, prime)?;
            CountRecord {
                variety: counting::VarietyId::CuboidSurface,
                p: prime,
                degree: 1,
                count,
                method: CountMethod::Fast,
            }
        }
        (VarietyArg::CurveX, true) => {
            if degree != 1 {
                eprintln!("--brute for curve-x supports degree 1 only");
                return Ok(1);
            }
            counting::count_curve_x_brute(prime)?
        }
        (VarietyArg::CurveX, false) => {
            let ctx = PrimeContext::new(prime)?;
            counting::count_curve_x(&ctx, degree)?
        }
        (VarietyArg::Singular, brute) => {
            if brute {
                eprintln!("--brute applies to surface and curve-x only");
                return Ok(1);
            }
            let ctx = PrimeContext::new(prime)?;
            counting::count_singular(&ctx)?
        }
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&record)?),
        Format::Csv => {
            println!("variety,p,degree,method,count");
            println!(
                "{},{},{},{},{}",
                variety_name(record.variety),
                record.p,
                record.degree,
                method_name(record.method),
                record.count
            );
        }
        Format::Table => {
            println!("variety   p      degree  method  count");
            println!(
                "{:<9} {:<6} {:<7} {:<7} {}",
                variety_name(record.variety),
                record.p,
                record.degree,
                method_name(record.method),
                record.count
            );
        }
    }
    Ok(0)
}

fn variety_name(v: counting::VarietyId) -> &'static str {
    match v {
        counting::VarietyId::CuboidSurface => "surface",
        counting::VarietyId::CurveX => "curve-x",
        counting::VarietyId::SingularLocus => "singular",
    }
}

fn method_name(m: CountMethod) -> &'static str {
    match m {
        CountMethod::Fast => "fast",
        CountMethod::Brute => "brute",
    }
}

/// Surface count at p through the cache when one is configured.
fn cached_surface_count(store: Option<&Store>, p: u64) -> anyhow::Result<u64> {
    let fresh = |p: u64| -> Result<u64, CountError> {
        let ctx = PrimeContext::new(p)?;
        Ok(counting::count_surface_fast(&ctx)?.count)
    };
    match store {
        None => Ok(fresh(p)?),
        Some(store) => {
            let value = store.get_or_compute(&CacheKey::surface_fast(p), || {
                fresh(p).map(|c| CacheValue::Int(c as i64))
            })?;
            match value {
                CacheValue::Int(c) if c >= 0 => Ok(c as u64),
                other => {
                    log::warn!(
                        "cache entry for surface p = {p} has wrong shape {other:?}; recomputing"
                    );
                    Ok(fresh(p)?)
                }
            }
        }
    }
}

/// Extracted pair at p through the cache when one is configured.
fn cached_g_pair(store: Option<&Store>, p: u64) -> anyhow::Result<cmforms::CoeffPair> {
    match store {
        None => Ok(cmforms::extract_g_pair(p)?),
        Some(store) => {
            let value = store.get_or_compute(&CacheKey::gpair(p), || {
                cmforms::extract_g_pair(p).map(|pair| CacheValue::Pair(pair.re, pair.im))
            })?;
            match value {
                CacheValue::Pair(re, im) if im >= 0 => Ok(cmforms::CoeffPair { re, im }),
                other => {
                    log::warn!(
                        "cache entry for g-pair p = {p} has wrong shape {other:?}; recomputing"
                    );
                    Ok(cmforms::extract_g_pair(p)?)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct ApOut {
    form: &'static str,
    p: u64,
    value: i64,
}

fn cmd_ap(format: Format, form: FormId, prime: u64) -> anyhow::Result<i32> {
    if let Some(code) = reject_bad_prime(prime) {
        return Ok(code);
    }
    let value = cmforms::ap(form, prime)?;
    let out = ApOut {
        form: form.name(),
        p: prime,
        value,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Csv => {
            println!("form,p,value");
            println!("{},{},{}", out.form, out.p, out.value);
        }
        Format::Table => println!("a_{}({}) = {}", out.p, out.form, out.value),
    }
    Ok(0)
}

#[derive(Serialize)]
struct GpairOut {
    p: u64,
    re: i64,
    im: i64,
    members: String,
}

fn cmd_gpair(format: Format, store: Option<&Store>, prime: u64) -> anyhow::Result<i32> {
    if let Some(code) = reject_bad_prime(prime) {
        return Ok(code);
    }
    let pair = cached_g_pair(store, prime)?;
    let out = GpairOut {
        p: prime,
        re: pair.re,
        im: pair.im,
        members: pair.to_string(),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Csv => {
            println!("p,re,im");
            println!("{},{},{}", out.p, out.re, out.im);
        }
        Format::Table => println!("g-pair at {} = {}", out.p, out.members),
    }
    Ok(0)
}

#[derive(Serialize)]
struct QexpRow {
    n: u64,
    #[serde(flatten)]
    coefficient: Coefficient,
}

fn coefficient_cell(c: Coefficient) -> String {
    match c {
        Coefficient::Excluded => "-".to_string(),
        Coefficient::Int(v) => v.to_string(),
        // commaless canonical member so the cell survives CSV
        Coefficient::Pair(pair) => cmforms::GaussianInt::new(pair.re, pair.im).to_string(),
        Coefficient::Undetermined => "?".to_string(),
    }
}

fn cmd_qexp(format: Format, form: FormId, limit: u64) -> anyhow::Result<i32> {
    let coeffs = cmforms::qexp(form, limit)?;
    match format {
        Format::Json => {
            let rows: Vec<QexpRow> = (1..=limit)
                .map(|n| QexpRow {
                    n,
                    coefficient: coeffs[n as usize],
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
        Format::Csv => {
            println!("# even indices excluded: the bad prime 2 divides them");
            println!("n,value");
            for n in (1..=limit).step_by(2) {
                println!("{},{}", n, coefficient_cell(coeffs[n as usize]));
            }
        }
        Format::Table => {
            println!(
                "q-expansion of {} through q^{} (odd n; ? = sign-ambiguous)",
                form.name(),
                limit
            );
            for n in (1..=limit).step_by(2) {
                let cell = match coeffs[n as usize] {
                    Coefficient::Pair(pair) => pair.to_string(),
                    other => coefficient_cell(other),
                };
                println!("{n:>6}  {cell}");
            }
        }
    }
    Ok(0)
}

/// Surface counts for all odd primes <= pmax, through the cache when
/// configured, in parallel either way.
fn surface_counts(pmax: u64, store: Option<&Store>) -> anyhow::Result<BTreeMap<u64, u64>> {
    match store {
        None => Ok(tracefit::surface_counts_upto(pmax)?),
        Some(store) => {
            use rayon::prelude::*;
            odd_primes_upto(pmax)
                .par_iter()
                .map(|&p| Ok((p, cached_surface_count(Some(store), p)?)))
                .collect()
        }
    }
}

fn print_fit_report(format: Format, report: &FitReport, pmax: u64) -> anyhow::Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
        Format::Csv => {
            println!("p,residual");
            for (p, r) in &report.residuals {
                println!("{p},{r}");
            }
        }
        Format::Table => {
            let m = report.multiplicities.0;
            println!("multiplicities over odd primes 3..={pmax}:");
            for (label, mult) in BASIS_LABELS.iter().zip(m) {
                println!("  {label:<10} {mult}");
            }
            let nonzero: Vec<String> = report
                .residuals
                .iter()
                .filter(|&(_, &r)| r != 0)
                .map(|(p, r)| format!("p={p}: {r}"))
                .collect();
            if nonzero.is_empty() {
                println!("residuals: all zero at {} primes", report.residuals.len());
            } else {
                println!(
                    "residuals NONZERO at {} primes: {}",
                    nonzero.len(),
                    nonzero.join(", ")
                );
            }
            let t = report.picard_splits.twisted;
            let u = report.picard_splits.permutation;
            println!(
                "picard (twisted action):     trivial={} chi_m4={} chi_m8={} chi_8={} total={}",
                t.trivial, t.chi_m4, t.chi_m8, t.chi_8, t.total
            );
            println!(
                "picard (permutation action): trivial={} chi_m4={} chi_m8={} chi_8={} total={}",
                u.trivial, u.chi_m4, u.chi_m8, u.chi_8, u.total
            );
        }
    }
    Ok(())
}

fn cmd_verify(
    format: Format,
    store: Option<&Store>,
    pmax: u64,
    conv: H16InertConvention,
) -> anyhow::Result<i32> {
    let counts = surface_counts(pmax, store)?;
    let report =
        tracefit::verify_identity_from_counts(&counts, &MultiplicityVector::CANONICAL, conv)?;
    print_fit_report(format, &report, pmax)?;
    if report.all_zero {
        Ok(0)
    } else {
        eprintln!("verification FAILED: nonzero residuals under h16-inert = {conv:?}");
        Ok(2)
    }
}

fn cmd_fit(
    format: Format,
    store: Option<&Store>,
    pmax: u64,
    conv: H16InertConvention,
) -> anyhow::Result<i32> {
    let counts = surface_counts(pmax, store)?;
    match tracefit::fit_report(&counts, conv) {
        Ok(report) => {
            print_fit_report(format, &report, pmax)?;
            Ok(0)
        }
        Err(e) => {
            eprintln!("fit FAILED: {e}");
            Ok(2)
        }
    }
}

#[derive(Serialize)]
struct EulerOut {
    preset: &'static str,
    degree: u32,
    s: f64,
    pmax: u64,
    value: f64,
    tail_bound: f64,
    /// Per-prime data; omitted beyond the pair-extraction cap p = 200.
    rows: Option<Vec<lfunc::ExportRow>>,
}

fn cmd_euler(format: Format, preset: PresetArg, pmax: u64, s: f64) -> anyhow::Result<i32> {
    let conv = H16InertConvention::Zero;
    let spec = preset.spec();
    let partial = lfunc::evaluate_partial(&spec, s, pmax, conv)?;
    let table = if pmax <= 200 {
        Some(lfunc::export_table(&spec, pmax, conv)?)
    } else {
        log::warn!("per-prime rows omitted: pair extraction stops at p = 200");
        None
    };
    let out = EulerOut {
        preset: preset.name(),
        degree: spec.degree(),
        s,
        pmax,
        value: partial.value,
        tail_bound: partial.tail_bound,
        rows: table.as_ref().map(|t| t.rows.clone()),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Csv => {
            println!(
                "# preset={} degree={} s={} pmax={} value={} tail_bound={}",
                out.preset, out.degree, out.s, out.pmax, out.value, out.tail_bound
            );
            if let Some(table) = &table {
                print!("{}", table.to_csv());
            }
        }
        Format::Table => {
            println!("preset {} (degree {})", out.preset, out.degree);
            println!(
                "truncated Euler product over odd p <= {}: L = {}",
                out.pmax, out.value
            );
            println!("at s = {}; tail bound {}", out.s, out.tail_bound);
            if let Some(table) = &table {
                println!();
                println!("p      a_f32  a_f64  g_pair     a_h8   a_h16  a_h32  #surface   #curve");
                for r in &table.rows {
                    let pair = cmforms::CoeffPair {
                        re: r.g_pair.re,
                        im: r.g_pair.im,
                    };
                    println!(
                        "{:<6} {:<6} {:<6} {:<10} {:<6} {:<6} {:<6} {:<10} {}",
                        r.p,
                        r.a_f32,
                        r.a_f64,
                        pair.to_string(),
                        r.a_h8,
                        r.a_h16,
                        r.a_h32,
                        r.count_surface,
                        r.count_x
                    );
                }
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct HypothesisOut {
    action: &'static str,
    degree: u32,
    picard: PicardSplit,
    /// Predicted resolved-model count per odd prime <= pmax.
    resolved_counts: BTreeMap<u64, i64>,
}

#[derive(Serialize)]
struct ReportOut {
    pmax: u64,
    h16_inert: H16InertConvention,
    multiplicities: MultiplicityVector,
    canonical: bool,
    residuals_all_zero: bool,
    h2_rank: i64,
    resolved_rank: i64,
    surface_degree: u32,
    resolved_degree: u32,
    hypotheses: Vec<HypothesisOut>,
    /// Set whenever the two hypotheses predict different counts in range.
    discrepancy: Option<String>,
}

fn cmd_report(
    format: Format,
    store: Option<&Store>,
    pmax: u64,
    conv: H16InertConvention,
) -> anyhow::Result<i32> {
    let counts = surface_counts(pmax, store)?;
    let report = match tracefit::fit_report(&counts, conv) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("report FAILED: {e}");
            return Ok(2);
        }
    };
    let m = report.multiplicities;
    let mut hypotheses = Vec::new();
    for (action, name) in [
        (ExceptionalAction::Twisted, "twisted"),
        (ExceptionalAction::Permutation, "permutation"),
    ] {
        let resolved_counts: BTreeMap<u64, i64> = counts
            .iter()
            .map(|(&p, &c)| (p, c as i64 + action.trace(p)))
            .collect();
        let picard = match action {
            ExceptionalAction::Twisted => report.picard_splits.twisted,
            ExceptionalAction::Permutation => report.picard_splits.permutation,
        };
        hypotheses.push(HypothesisOut {
            action: name,
            degree: LSpec::resolved(action).degree(),
            picard,
            resolved_counts,
        });
    }
    let differing: Vec<u64> = counts
        .keys()
        .copied()
        .filter(|&p| ExceptionalAction::Twisted.trace(p) != ExceptionalAction::Permutation.trace(p))
        .collect();
    let discrepancy = if differing.is_empty() {
        None
    } else {
        Some(format!(
            "the two exceptional-action hypotheses predict different resolved counts at \
             {} of {} primes (every p = 3 (mod 4): permutation - twisted = 24p); \
             point counts over F_p cannot separate them below p^2 precision",
            differing.len(),
            counts.len()
        ))
    };
    let out = ReportOut {
        pmax,
        h16_inert: conv,
        multiplicities: m,
        canonical: m == MultiplicityVector::CANONICAL,
        residuals_all_zero: report.all_zero,
        h2_rank: m.h2_rank(),
        resolved_rank: m.resolved_rank(),
        surface_degree: LSpec::surface().degree(),
        resolved_degree: LSpec::resolved(ExceptionalAction::Twisted).degree(),
        hypotheses,
        discrepancy,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Csv => {
            println!("p,count_surface,resolved_twisted,resolved_permutation");
            for (&p, &c) in &counts {
                println!(
                    "{p},{c},{},{}",
                    c as i64 + ExceptionalAction::Twisted.trace(p),
                    c as i64 + ExceptionalAction::Permutation.trace(p)
                );
            }
        }
        Format::Table => {
            println!("trace identity and Picard report, odd primes 3..={pmax}");
            println!();
            println!("multiplicities:");
            for (label, mult) in BASIS_LABELS.iter().zip(m.0) {
                println!("  {label:<10} {mult}");
            }
            println!("canonical vector: {}", yes_no(out.canonical));
            println!("residuals all zero: {}", yes_no(out.residuals_all_zero));
            println!(
                "H^2 rank {}; resolved rank {}",
                out.h2_rank, out.resolved_rank
            );
            println!(
                "L-product degrees: surface {}, resolved {}",
                out.surface_degree, out.resolved_degree
            );
            println!();
            for h in &out.hypotheses {
                println!(
                    "hypothesis {:<12} degree {:<3} picard: trivial={} chi_m4={} chi_m8={} \
                     chi_8={} total={}",
                    h.action,
                    h.degree,
                    h.picard.trivial,
                    h.picard.chi_m4,
                    h.picard.chi_m8,
                    h.picard.chi_8,
                    h.picard.total
                );
            }
            if let Some(banner) = &out.discrepancy {
                println!();
                println!("DISCREPANCY: {banner}");
            }
            println!();
            println!("p      #surface   resolved(twisted)  resolved(permutation)");
            for (&p, &c) in &counts {
                println!(
                    "{:<6} {:<10} {:<18} {}",
                    p,
                    c,
                    c as i64 + ExceptionalAction::Twisted.trace(p),
                    c as i64 + ExceptionalAction::Permutation.trace(p)
                );
            }
        }
    }
    if report.all_zero {
        Ok(0)
    } else {
        eprintln!("report: residuals nonzero under h16-inert = {conv:?}");
        Ok(2)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
