//! Command-line front end. Every command returns its exit status and text
//! instead of printing, so the binary is a thin shell around [`run_args`].

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::bases::{self, BasisFamily, BasisLabel};
use crate::cloning::{self, CloneKind};
use crate::displacement::{variant_config, Protocol, QuquartState, Variant, FIDELITY_TOL};
use crate::record::{format_num, render_lines, Record};
use crate::swapping::{self, SwapVariant};
use crate::tensor::{fidelity_up_to_phase, Ket, C64, TOL};

/// Overrides the fidelity gate used by `displace` and `swap`.
pub const TOLERANCE_ENV: &str = "QDISPLACE_TOLERANCE";

/// Trial count from which `displace` also checks outcome frequencies.
pub const FREQUENCY_CHECK_TRIALS: usize = 1600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Mismatch = 1,
    InvalidArgs = 2,
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub status: ExitStatus,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(status: ExitStatus, stdout: String) -> Self {
        Self { status, stdout, stderr: String::new() }
    }

    fn fail(status: ExitStatus, msg: impl std::fmt::Display) -> Self {
        Self { status, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn status(&self) -> ExitStatus {
        match self {
            CliError::Invalid(_) => ExitStatus::InvalidArgs,
            CliError::Internal(_) => ExitStatus::Internal,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "qdisplace", version, about = "Ququart/qubit-pair displacement and swapping simulator")]
pub struct Cli {
    /// Emit line-delimited JSON records instead of tables.
    #[arg(long, global = true)]
    pub machine: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump one entangled basis family and its Gram deviation.
    Bases {
        #[arg(long)]
        family: String,
    },
    /// Run the displacement protocol.
    Displace {
        #[arg(long)]
        variant: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// `random`, or eight reals: re/im of the four amplitudes.
        #[arg(long, default_value = "random", allow_hyphen_values = true)]
        input: String,
    },
    /// Derive the swapping pairing and optionally collapse it.
    Swap {
        #[arg(long, default_value = "i")]
        variant: String,
        /// Measure the retained group and keep the measured one instead.
        #[arg(long)]
        transposed: bool,
        /// Sample one outcome with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// A label such as `W_0`, or `all`.
        #[arg(long)]
        forced_outcome: Option<String>,
    },
    /// Cloning obstruction reports.
    Noclone {
        /// Task kind; every kind when omitted.
        #[arg(long)]
        kind: Option<String>,
        /// Overlaps s to test; may repeat.
        #[arg(long = "overlap", allow_hyphen_values = true)]
        overlaps: Vec<f64>,
        /// Seed for the ι overlap sampling check (skipped without it).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Diff derived tables against the printed ones.
    VerifyPaper {
        /// Exit 1 on any mismatch.
        #[arg(long)]
        strict: bool,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutput::ok(ExitStatus::Ok, text)
                }
                _ => CommandOutput { status: ExitStatus::InvalidArgs, stdout: String::new(), stderr: text },
            }
        }
    }
}

pub fn run(cli: &Cli) -> CommandOutput {
    let result = match &cli.command {
        Command::Bases { family } => cmd_bases(family, cli.machine),
        Command::Displace { variant, seed, trials, input } => {
            tolerance().and_then(|tol| cmd_displace(variant, input, *seed, *trials, tol, cli.machine))
        }
        Command::Swap { variant, transposed, seed, forced_outcome } => tolerance()
            .and_then(|tol| cmd_swap(variant, *transposed, *seed, forced_outcome.as_deref(), tol, cli.machine)),
        Command::Noclone { kind, overlaps, seed, samples } => {
            cmd_noclone(kind.as_deref(), overlaps, *seed, *samples, cli.machine)
        }
        Command::VerifyPaper { strict } => cmd_verify_paper(*strict, cli.machine),
    };
    match result {
        Ok((status, text)) => CommandOutput::ok(status, text),
        Err(e) => CommandOutput::fail(e.status(), e),
    }
}

/// Fidelity gate: [`FIDELITY_TOL`] unless the environment overrides it.
pub fn tolerance() -> Result<f64, CliError> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(FIDELITY_TOL),
        Ok(v) => parse_tolerance(&v),
    }
}

pub fn parse_tolerance(v: &str) -> Result<f64, CliError> {
    match v.trim().parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 && t < 1.0 => Ok(t),
        _ => Err(invalid(format!("{TOLERANCE_ENV} must be a number in (0, 1), got `{v}`"))),
    }
}

/// `random` → `None`; otherwise eight reals separated by commas or spaces,
/// taken as re/im pairs and renormalised.
pub fn parse_input(s: &str) -> Result<Option<QuquartState>, CliError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("random") {
        return Ok(None);
    }
    let reals = t
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| invalid(format!("`{p}` is not a real number"))))
        .collect::<Result<Vec<f64>, CliError>>()?;
    if reals.len() != 8 {
        return Err(invalid(format!("input needs 8 reals, got {}", reals.len())));
    }
    let amps = [0, 1, 2, 3].map(|i| C64::new(reals[2 * i], reals[2 * i + 1]));
    QuquartState::normalized(amps).map(Some).map_err(invalid)
}

/// `all` → every label; otherwise one label.
pub fn parse_forced(s: &str) -> Result<Vec<BasisLabel>, CliError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(BasisLabel::all().collect());
    }
    Ok(vec![s.parse::<BasisLabel>().map_err(invalid)?])
}

pub fn cmd_bases(family: &str, machine: bool) -> Result<(ExitStatus, String), CliError> {
    let family: BasisFamily = family.parse().map_err(invalid)?;
    let deviation = bases::family_gram_deviation(family);
    let ok = deviation < TOL;
    let out = if machine {
        let mut recs = bases::export_records(family);
        recs.push(
            Record::new("gram")
                .with_str("family", family.name())
                .with_num("max_deviation", deviation)
                .with_bool("ok", ok),
        );
        render_lines(&recs)
    } else {
        format!("{}max gram deviation {}\n", bases::export_text(family), format_num(deviation))
    };
    Ok((if ok { ExitStatus::Ok } else { ExitStatus::Internal }, out))
}

/// Per-label counts and the largest |count − n/16| / σ.
pub fn frequency_check(counts: &[usize; 16], trials: usize) -> (f64, bool) {
    let n = trials as f64;
    let p = 1.0 / 16.0;
    let sigma = (n * p * (1.0 - p)).sqrt();
    let max_z = counts.iter().map(|&c| (c as f64 - n * p).abs() / sigma).fold(0.0, f64::max);
    (max_z, max_z <= 5.0)
}

pub fn cmd_displace(
    variant: &str,
    input: &str,
    seed: u64,
    trials: usize,
    tol: f64,
    machine: bool,
) -> Result<(ExitStatus, String), CliError> {
    let variant: Variant = variant.parse().map_err(invalid)?;
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let input = parse_input(input)?;
    let protocol = Protocol::new(variant_config(variant)).map_err(internal)?;
    let traces = protocol.run_trials(input, seed, trials).map_err(internal)?;

    let mut out = String::new();
    let mut counts = [0usize; 16];
    let mut min_fidelity: f64 = 1.0;
    if !machine {
        writeln!(out, "# {} seed {seed} trials {trials}", protocol.config().name()).unwrap();
        writeln!(out, "# trial seed outcome message probability fidelity").unwrap();
    }
    for (i, t) in traces.iter().enumerate() {
        counts[t.outcome.ordinal()] += 1;
        min_fidelity = min_fidelity.min(t.fidelity);
        if machine {
            out.push_str(&t.to_record().with_u64("trial", i as u64).render());
            out.push('\n');
        } else {
            writeln!(
                out,
                "{i} {} {} {} {} {}",
                t.seed,
                t.outcome,
                t.message_bits(),
                format_num(t.probability),
                format_num(t.fidelity)
            )
            .unwrap();
        }
    }
    let fidelity_ok = min_fidelity >= 1.0 - tol;
    let freq = (trials >= FREQUENCY_CHECK_TRIALS).then(|| frequency_check(&counts, trials));
    let freq_ok = freq.is_none_or(|(_, ok)| ok);
    if machine {
        let mut r = Record::new("displace_summary")
            .with_str("config", &protocol.config().name())
            .with_u64("seed", seed)
            .with_u64("trials", trials as u64)
            .with_num("min_fidelity", min_fidelity)
            .with_num("tolerance", tol)
            .with_nums("counts", counts.iter().map(|&c| c as f64));
        if let Some((z, _)) = freq {
            r = r.with_num("max_z", z);
        }
        out.push_str(&r.with_bool("ok", fidelity_ok && freq_ok).render());
        out.push('\n');
    } else {
        writeln!(out, "min fidelity {} (gate {})", format_num(min_fidelity), format_num(1.0 - tol)).unwrap();
        let cells: Vec<String> = BasisLabel::all().map(|l| format!("{l}:{}", counts[l.ordinal()])).collect();
        writeln!(out, "counts {}", cells.join(" ")).unwrap();
        if let Some((z, ok)) = freq {
            writeln!(out, "max z {} ({})", format_num(z), if ok { "within 5 sigma" } else { "outside 5 sigma" })
                .unwrap();
        }
    }
    let status = if fidelity_ok && freq_ok { ExitStatus::Ok } else { ExitStatus::Internal };
    Ok((status, out))
}

pub fn cmd_swap(
    variant: &str,
    transposed: bool,
    seed: Option<u64>,
    forced: Option<&str>,
    tol: f64,
    machine: bool,
) -> Result<(ExitStatus, String), CliError> {
    let variant: SwapVariant = variant.parse().map_err(invalid)?;
    let forced = forced.map(parse_forced).transpose()?;
    let mut cfg = swapping::swap_variant_config(variant);
    if transposed {
        cfg = cfg.transposed();
    }
    let total = swapping::build_swap_total(&cfg).map_err(internal)?;
    let table = swapping::derive_pairing_table(&total, &cfg).map_err(internal)?;
    let retained: Vec<&str> = cfg.retained.labels.iter().map(String::as_str).collect();

    let mut out = String::new();
    if machine {
        out.push_str(&render_lines(&table.records()));
    } else {
        writeln!(out, "# {} measured {} retained {}", cfg.name(), cfg.measured.family, cfg.retained.family).unwrap();
        writeln!(out, "# measured probability terms").unwrap();
        for r in &table.rows {
            let terms: Vec<String> =
                r.terms.iter().map(|t| format!("{} {}", bases::dyadic_string(t.coefficient), t.partner)).collect();
            writeln!(out, "{} {} {}", r.measured, format_num(r.probability()), terms.join(" ")).unwrap();
        }
    }

    let mut outcomes = Vec::new();
    for label in forced.unwrap_or_default() {
        outcomes.push((None, swapping::measure_swap_forced(&total, &cfg, label).map_err(internal)?));
    }
    if let Some(s) = seed {
        outcomes.push((Some(s), swapping::measure_swap(&total, &cfg, s).map_err(internal)?));
    }
    let mut all_match = true;
    for (s, o) in &outcomes {
        let row = table.row(o.outcome);
        let mut expected = Ket::zeros(o.residual.shape().clone());
        for t in &row.terms {
            let v = bases::basis_vector_on(cfg.retained.family, t.partner, &retained).map_err(internal)?;
            expected = expected.add_scaled(&v, C64::new(t.coefficient, 0.0)).map_err(internal)?;
        }
        let expected = expected.normalized().map_err(internal)?;
        let fid = fidelity_up_to_phase(&expected, &o.residual).map_err(internal)?;
        let matched = fid >= 1.0 - tol;
        all_match &= matched;
        if machine {
            out.push_str(
                &o.to_record(&cfg, *s).with_num("table_fidelity", fid).with_bool("matches_table", matched).render(),
            );
            out.push('\n');
        } else {
            let residual = match o.residual_label {
                Some((l, sign)) => format!("{}{l}", if sign < 0.0 { '-' } else { '+' }),
                None => "superposition".to_string(),
            };
            writeln!(
                out,
                "outcome {} probability {} residual {residual} table fidelity {} {}",
                o.outcome,
                format_num(o.probability),
                format_num(fid),
                if matched { "match" } else { "MISMATCH" }
            )
            .unwrap();
        }
    }
    Ok((if all_match { ExitStatus::Ok } else { ExitStatus::Internal }, out))
}

pub fn cmd_verify_paper(strict: bool, machine: bool) -> Result<(ExitStatus, String), CliError> {
    let report = crate::verify_printed_tables().map_err(internal)?;
    let mismatches = report.mismatched_labels().len();
    let out = if machine {
        let mut recs = report.records();
        recs.push(
            Record::new("errata_summary")
                .with_u64("entries", report.lines.len() as u64)
                .with_u64("mismatches", mismatches as u64)
                .with_u64("warnings", report.warnings.len() as u64),
        );
        render_lines(&recs)
    } else {
        format!("{report}{} entries, {mismatches} mismatches, {} warnings\n", report.lines.len(), report.warnings.len())
    };
    let status = if strict && report.has_mismatch() { ExitStatus::Mismatch } else { ExitStatus::Ok };
    Ok((status, out))
}

pub fn cmd_noclone(
    kind: Option<&str>,
    overlaps: &[f64],
    seed: Option<u64>,
    samples: usize,
    machine: bool,
) -> Result<(ExitStatus, String), CliError> {
    let kinds = match kind {
        Some(k) => vec![k.parse::<CloneKind>().map_err(invalid)?],
        None => CloneKind::ALL.to_vec(),
    };
    if let Some(s) = overlaps.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(invalid(format!("overlap {s} is outside [0, 1]")));
    }
    let overlaps = if overlaps.is_empty() { vec![0.0, 0.5, 1.0] } else { overlaps.to_vec() };

    let mut out = String::new();
    let mut ok = true;
    if !machine {
        writeln!(out, "# kind s required deficit expected linear-extension-fidelity").unwrap();
    }
    for &k in &kinds {
        for &s in &overlaps {
            let (a, b) = cloning::state_pair_with_overlap(k, s).map_err(invalid)?;
            let r = cloning::overlap_obstruction(&a, &b, k).map_err(internal)?;
            let expected = (s - s * s).abs();
            let law = (r.deficit - expected).abs() < TOL;
            ok &= law;
            if machine {
                out.push_str(&r.to_record().with_num("expected", expected).with_bool("ok", law).render());
                out.push('\n');
            } else {
                writeln!(
                    out,
                    "{k} {} {} {} {} {}",
                    format_num(r.overlap_s),
                    format_num(r.required),
                    format_num(r.deficit),
                    format_num(expected),
                    format_num(r.linear_extension_fidelity)
                )
                .unwrap();
            }
        }
    }
    if !machine {
        writeln!(out, "# kind branches linear-extension-fidelity").unwrap();
    }
    for &k in &kinds {
        let dim = k.source_shape().total_dim();
        for n in 2..=dim {
            let sup = cloning::equal_superposition(k, n).map_err(internal)?;
            let ext = cloning::linear_extension_deficit(k, &sup, true).map_err(internal)?;
            let below = ext.fidelity < 1.0 - 1e-6;
            ok &= below;
            if machine {
                out.push_str(
                    &Record::new("linear_extension")
                        .with_str("kind", k.name())
                        .with_u64("branches", n as u64)
                        .with_num("fidelity", ext.fidelity)
                        .with_bool("ok", below)
                        .render(),
                );
                out.push('\n');
            } else {
                writeln!(out, "{k} {n} {}", format_num(ext.fidelity)).unwrap();
            }
        }
    }
    if let Some(seed) = seed {
        let dev = cloning::iota_isometry_check(samples, seed).map_err(invalid)?;
        let iso = dev < TOL;
        ok &= iso;
        if machine {
            out.push_str(
                &Record::new("iota_isometry")
                    .with_u64("seed", seed)
                    .with_u64("samples", samples as u64)
                    .with_num("max_deviation", dev)
                    .with_bool("ok", iso)
                    .render(),
            );
            out.push('\n');
        } else {
            writeln!(out, "iota isometry over {samples} pairs (seed {seed}) max deviation {}", format_num(dev))
                .unwrap();
        }
    }
    Ok((if ok { ExitStatus::Ok } else { ExitStatus::Internal }, out))
}
