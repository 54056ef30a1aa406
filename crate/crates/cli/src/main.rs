//! Command-line front end for the `dirac_ab` library.
//!
//! Subcommands: `spectrum` tabulates closed-form levels, `wavefunction`
//! dumps a two-component eigenfunction on a radial grid, `match` solves the
//! finite-radius shell quantization, `verify` cross-checks the closed forms
//! against the finite-difference oracle, and `degeneracy` lists the partners
//! of a seed level.
//!
//! Exit codes: 0 success, 1 verification breach, 2 invalid input,
//! 3 computation failure.  All numbers are printed with a single shared
//! 15-significant-digit scientific formatter, so identical configurations
//! produce bit-identical output and CSV and JSON carry the same numeric
//! text.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dirac_ab::oracle::{self, OracleError, RadialGrid};
use dirac_ab::shellmatch::{self, MatchError, ShellModel};
use dirac_ab::spectrum::{
    self, Branch, PhysicalParams, QuantumNumbers, Regularity, SpectrumError, Spin,
};
use dirac_ab::wavefun::{self, ChannelKind, RadialProfile};

/// Levels within this relative distance share a degeneracy family id.
const FAMILY_TOL: f64 = 1e-12;
/// Deepest radial index scanned when locating the analytic reference level.
const REFERENCE_DEPTH: u32 = 40;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Spectrum(args) => cmd_spectrum(args, cli.unit_check),
        Command::Wavefunction(args) => cmd_wavefunction(args, cli.unit_check),
        Command::Match(args) => cmd_match(args, cli.unit_check),
        Command::Verify(args) => cmd_verify(args, cli.unit_check),
        Command::Degeneracy(args) => cmd_degeneracy(args, cli.unit_check),
    }
}

/// Bound states of a planar Dirac oscillator threaded by a flux line.
#[derive(Parser)]
#[command(name = "dirac-ab", version, about)]
struct Cli {
    /// Print the dimensionless ratio omega/M to stderr before running.
    #[arg(long, global = true)]
    unit_check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate closed-form levels over channel and radial ranges.
    Spectrum(SpectrumArgs),
    /// Dump a two-component eigenfunction on a radial grid.
    Wavefunction(WavefunctionArgs),
    /// Solve the finite-radius shell quantization and compare with the
    /// zero-radius levels.
    Match(MatchArgs),
    /// Cross-check closed-form levels against the finite-difference oracle.
    Verify(VerifyArgs),
    /// List the degenerate partners of a seed level.
    Degeneracy(DegeneracyArgs),
}

#[derive(Args, Clone, Copy)]
struct PhysicalArgs {
    /// Particle mass M in natural units.
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Oscillator frequency omega in natural units.
    #[arg(long, default_value_t = 0.05)]
    omega: f64,
    /// Flux-line strength alpha (total flux over the flux quantum).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Spin projection label: +1 or -1.
    #[arg(long, default_value = "+1", value_parser = parse_spin, allow_hyphen_values = true)]
    spin: Spin,
}

impl PhysicalArgs {
    fn params(&self, unit_check: bool) -> Result<PhysicalParams, Failure> {
        let params = PhysicalParams::new(self.mass, self.omega, self.alpha, self.spin)
            .map_err(|e| Failure::Input(e.to_string()))?;
        if unit_check {
            eprintln!("omega/M = {}", sci(params.omega / params.mass));
        }
        Ok(params)
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SpectrumArgs {
    #[command(flatten)]
    physical: PhysicalArgs,
    /// Angular-momentum range `lo..hi` (inclusive) or a single value.
    #[arg(long, default_value = "-2..2", value_parser = parse_int_range, allow_hyphen_values = true)]
    m: (i64, i64),
    /// Radial range `lo..hi` (inclusive) or a single value.
    #[arg(long, default_value = "0..3", value_parser = parse_index_range)]
    n: (u32, u32),
    /// Energy branch.
    #[arg(long, value_enum, default_value_t = BranchArg::Positive)]
    branch: BranchArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Clone)]
struct WavefunctionArgs {
    #[command(flatten)]
    physical: PhysicalArgs,
    /// Angular index of the channel.
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Radial index.
    #[arg(long)]
    n: u32,
    /// Energy branch.
    #[arg(long, value_enum, default_value_t = BranchArg::Positive)]
    branch: BranchArg,
    /// Number of radial grid points.
    #[arg(long, default_value_t = 200)]
    grid_count: usize,
    /// Outer grid radius (defaults to the profile quadrature cutoff).
    #[arg(long)]
    r_max: Option<f64>,
    /// Append a residual column with the first-order-system defect at each
    /// radius.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Clone)]
struct MatchArgs {
    #[command(flatten)]
    physical: PhysicalArgs,
    /// Angular index of the channel.
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Shell radii, comma separated, positive and strictly descending.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    /// Lower edge of the root search window.
    #[arg(long, allow_hyphen_values = true)]
    e_min: f64,
    /// Upper edge of the root search window.
    #[arg(long, allow_hyphen_values = true)]
    e_max: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    physical: PhysicalArgs,
    /// Angular-momentum range `lo..hi` (inclusive) or a single value.
    #[arg(long, default_value = "-2..2", value_parser = parse_int_range, allow_hyphen_values = true)]
    m: (i64, i64),
    /// Radial range `lo..hi` (inclusive) or a single value.
    #[arg(long, default_value = "0..3", value_parser = parse_index_range)]
    n: (u32, u32),
    /// Grid point count for the finite-difference solver.
    #[arg(long, default_value_t = oracle::DEFAULT_GRID_COUNT)]
    grid_count: usize,
    /// Outer grid radius override.
    #[arg(long)]
    r_max: Option<f64>,
    /// Relative tolerance the worst channel must meet.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
}

#[derive(Args, Clone)]
struct DegeneracyArgs {
    #[command(flatten)]
    physical: PhysicalArgs,
    /// Angular index of the seed level.
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Radial index of the seed level.
    #[arg(long)]
    n: u32,
    /// Largest shift scanned along the spin-orbit ladder.
    #[arg(long, default_value_t = 3)]
    max_shift: u32,
    /// Angular window `lo..hi` for m-independent families.
    #[arg(long, value_parser = parse_int_range, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Energy branch.
    #[arg(long, value_enum, default_value_t = BranchArg::Positive)]
    branch: BranchArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Positive,
    Negative,
}

impl BranchArg {
    fn branch(self) -> Branch {
        match self {
            BranchArg::Positive => Branch::Positive,
            BranchArg::Negative => Branch::Negative,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

/// What went wrong, mapped onto the exit-code contract.
enum Failure {
    /// `verify` ran to completion but the worst channel missed tolerance.
    Breach(String),
    /// The request itself is malformed: parameters, ranges, channels.
    Input(String),
    /// A computation failed on well-formed input.
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Breach(_) => 1,
            Failure::Input(_) => 2,
            Failure::Compute(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Breach(s) | Failure::Input(s) | Failure::Compute(s) => s,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn compute_err(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

/// Energy-formula errors: a negative radicand is a computation outcome,
/// everything else means the request addressed the wrong channel.
fn energy_err(e: SpectrumError) -> Failure {
    match e {
        SpectrumError::NonRealEnergy { .. } => compute_err(e),
        other => input_err(other),
    }
}

fn match_err(e: MatchError) -> Failure {
    match e {
        MatchError::InvalidShell(_) | MatchError::Pole { .. } => input_err(e),
        other => compute_err(other),
    }
}

fn oracle_err(e: OracleError) -> Failure {
    match e {
        OracleError::Grid(_) | OracleError::Request(_) => input_err(e),
        other => compute_err(other),
    }
}

fn parse_spin(s: &str) -> Result<Spin, String> {
    match s.trim() {
        "+1" | "1" | "up" => Ok(Spin::Up),
        "-1" | "down" => Ok(Spin::Down),
        other => Err(format!("spin must be +1 or -1, got `{other}`")),
    }
}

fn parse_int_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_int(a)?, parse_int(b)?),
        None => {
            let v = parse_int(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_index_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_index(a)?, parse_index(b)?),
        None => {
            let v = parse_index(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_int(s: &str) -> Result<i64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not an integer", s.trim()))
}

fn parse_index(s: &str) -> Result<u32, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
}

/// The one numeric formatter every table cell goes through: 15 significant
/// digits, scientific.
fn sci(x: f64) -> String {
    format!("{x:.14e}")
}

enum Cell {
    Int(i64),
    Num(f64),
    Text(&'static str),
    Missing,
}

struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn render(&self, format: FileFormat) -> String {
        match format {
            FileFormat::Csv => self.render_csv(),
            FileFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Int(v) => v.to_string(),
                    Cell::Num(v) => sci(*v),
                    Cell::Text(v) => (*v).to_string(),
                    Cell::Missing => "NaN".to_string(),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = row
                .iter()
                .zip(self.columns)
                .map(|(cell, name)| {
                    let value = match cell {
                        Cell::Int(v) => v.to_string(),
                        Cell::Num(v) => sci(*v),
                        Cell::Text(v) => format!("\"{v}\""),
                        Cell::Missing => "null".to_string(),
                    };
                    format!("\"{name}\": {value}")
                })
                .collect();
            out.push_str("  {");
            out.push_str(&fields.join(", "));
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }
}

fn emit(text: &str, target: Option<&PathBuf>) -> Result<(), Failure> {
    match target {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn class_label(class: Regularity) -> &'static str {
    match class {
        Regularity::Regular => "regular",
        Regularity::IrregularA => "irregular-a",
        Regularity::IrregularB => "irregular-b",
    }
}

fn cmd_spectrum(args: &SpectrumArgs, unit_check: bool) -> Result<u8, Failure> {
    let params = args.physical.params(unit_check)?;
    let rows = spectrum::spectrum_table(&params, args.m, args.n, args.branch.branch());

    // Real rows arrive sorted by energy, so families are consecutive runs;
    // non-real rows sort last and get the sentinel id -1.
    let mut table = Table {
        columns: &[
            "m",
            "n",
            "class",
            "E_relativistic",
            "epsilon_nonrel",
            "degeneracy_family_id",
        ],
        rows: Vec::with_capacity(rows.len()),
    };
    let mut family = -1i64;
    let mut anchor = f64::NAN;
    for row in &rows {
        let (energy_cell, id) = match row.energy {
            Some(e) => {
                let same_family = (e - anchor).abs() <= FAMILY_TOL * e.abs().max(anchor.abs());
                if !same_family {
                    family += 1;
                    anchor = e;
                }
                (Cell::Num(e), family)
            }
            None => (Cell::Missing, -1),
        };
        table.rows.push(vec![
            Cell::Int(row.qn.m),
            Cell::Int(i64::from(row.qn.n)),
            Cell::Text(class_label(row.class)),
            energy_cell,
            Cell::Num(row.energy_nonrel),
            Cell::Int(id),
        ]);
    }
    emit(&table.render(args.out.format), args.out.output.as_ref())?;
    Ok(0)
}

fn cmd_wavefunction(args: &WavefunctionArgs, unit_check: bool) -> Result<u8, Failure> {
    let params = args.physical.params(unit_check)?;
    if args.grid_count < 2 {
        return Err(Failure::Input(format!(
            "grid count must be at least 2, got {}",
            args.grid_count
        )));
    }

    let class = spectrum::classify_state(args.m, &params);
    let kind = match class {
        Regularity::Regular => ChannelKind::Regular { m: args.m },
        Regularity::IrregularA => ChannelKind::IrregularA,
        Regularity::IrregularB => ChannelKind::IrregularB,
    };
    let profile = RadialProfile::unit(kind, args.n, params).map_err(input_err)?;
    let scale = wavefun::normalize(&profile).map_err(compute_err)?;
    let profile = profile
        .with_amplitude(profile.amplitude() * scale)
        .map_err(compute_err)?;

    let branch = args.branch.branch();
    let qn = QuantumNumbers::new(args.m, args.n);
    let energy = match class {
        Regularity::Regular => spectrum::energy_regular(&params, qn, branch),
        Regularity::IrregularA => spectrum::energy_irregular_a(&params, args.n, branch),
        Regularity::IrregularB => spectrum::energy_irregular_b(&params, args.n, branch),
    }
    .map_err(energy_err)?
    .value;

    let r_max = args.r_max.unwrap_or_else(|| profile.quadrature_cutoff());
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Failure::Input(format!(
            "outer radius must be positive, got {r_max}"
        )));
    }

    let mut table = Table {
        columns: if args.check {
            &["r", "re_psi1", "im_psi1", "re_psi2", "im_psi2", "residual"]
        } else {
            &["r", "re_psi1", "im_psi1", "re_psi2", "im_psi2"]
        },
        rows: Vec::with_capacity(args.grid_count),
    };
    for i in 1..=args.grid_count {
        let r = r_max * i as f64 / args.grid_count as f64;
        let sample = wavefun::sample_spinor(&profile, energy, r, 0.0).map_err(compute_err)?;
        let mut row = vec![
            Cell::Num(r),
            Cell::Num(sample.psi1.re),
            Cell::Num(sample.psi1.im),
            Cell::Num(sample.psi2.re),
            Cell::Num(sample.psi2.im),
        ];
        if args.check {
            let (res1, res2) =
                wavefun::dirac_residual(&profile, energy, &[r]).map_err(compute_err)?;
            row.push(Cell::Num(res1.max(res2)));
        }
        table.rows.push(row);
    }
    emit(&table.render(args.out.format), args.out.output.as_ref())?;
    Ok(0)
}

/// Real levels of the series selected by the channel's classification, both
/// branches, used as the zero-radius reference for `match`.
fn reference_levels(params: &PhysicalParams, m: i64) -> Vec<f64> {
    let class = spectrum::classify_state(m, params);
    let mut levels = Vec::new();
    for branch in [Branch::Positive, Branch::Negative] {
        for n in 0..=REFERENCE_DEPTH {
            let level = match class {
                Regularity::Regular => {
                    spectrum::energy_regular(params, QuantumNumbers::new(m, n), branch)
                }
                Regularity::IrregularA => spectrum::energy_irregular_a(params, n, branch),
                Regularity::IrregularB => spectrum::energy_irregular_b(params, n, branch),
            };
            if let Ok(level) = level {
                levels.push(level.value);
            }
        }
    }
    levels
}

fn cmd_match(args: &MatchArgs, unit_check: bool) -> Result<u8, Failure> {
    let params = args.physical.params(unit_check)?;
    let descending = args.radii.windows(2).all(|pair| pair[0] > pair[1]);
    let positive = args.radii.iter().all(|r| r.is_finite() && *r > 0.0);
    if args.radii.is_empty() || !descending || !positive {
        return Err(Failure::Input(
            "radii must be positive and strictly descending".to_string(),
        ));
    }
    let window_ok = args.e_min.is_finite() && args.e_max.is_finite() && args.e_min < args.e_max;
    if !window_ok {
        return Err(Failure::Input(format!(
            "energy window [{}, {}] is empty",
            args.e_min, args.e_max
        )));
    }

    let references = reference_levels(&params, args.m);
    let mut table = Table {
        columns: &[
            "R",
            "E_root",
            "abs_error",
            "regular_weight",
            "irregular_weight",
        ],
        rows: Vec::with_capacity(args.radii.len()),
    };
    for &radius in &args.radii {
        let shell = ShellModel::new(radius, params, args.m).map_err(match_err)?;
        let roots = shellmatch::solve_finite_r_spectrum(&shell, (args.e_min, args.e_max), 1)
            .map_err(match_err)?;
        let root = roots[0];
        let error = references
            .iter()
            .map(|e| (root - e).abs())
            .fold(f64::INFINITY, f64::min);
        let coeffs = shellmatch::match_coefficients(&shell, root).map_err(match_err)?;
        let (w_reg, w_irr) = shellmatch::exterior_weights(&shell, &coeffs).map_err(match_err)?;
        table.rows.push(vec![
            Cell::Num(radius),
            Cell::Num(root),
            Cell::Num(error),
            Cell::Num(w_reg),
            Cell::Num(w_irr),
        ]);
    }
    emit(&table.render(args.out.format), args.out.output.as_ref())?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, unit_check: bool) -> Result<u8, Failure> {
    let params = args.physical.params(unit_check)?;
    let (n_lo, n_hi) = args.n;
    let levels = n_hi as usize + 1;
    if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
        return Err(Failure::Input(format!(
            "tolerance must be positive, got {}",
            args.tolerance
        )));
    }

    // Worst relative error in E^2 between the Richardson-extrapolated
    // finite-difference spectrum and the closed form, over every channel.
    let mut worst = 0.0f64;
    let mut worst_channel = (args.m.0, n_lo);
    for m in args.m.0..=args.m.1 {
        let exponent = params.coupling(m).abs();
        let default_grid = RadialGrid::for_channel(&params, exponent, n_hi);
        let r_max = args.r_max.unwrap_or_else(|| default_grid.r_max());
        let grid = RadialGrid::new(1e-10 * r_max, r_max, args.grid_count).map_err(oracle_err)?;
        let fd = oracle::extrapolated_radial_eigenvalues(&params, m, &grid, levels)
            .map_err(oracle_err)?;
        for n in n_lo..=n_hi {
            let closed =
                spectrum::energy_regular(&params, QuantumNumbers::new(m, n), Branch::Positive)
                    .map_err(energy_err)?
                    .value;
            let closed_sq = closed * closed;
            let rel = (fd[n as usize] - closed_sq).abs() / closed_sq.abs().max(f64::MIN_POSITIVE);
            if rel > worst {
                worst = rel;
                worst_channel = (m, n);
            }
        }
    }

    println!(
        "channels m={}..{}, n={}..{}, grid count {}",
        args.m.0, args.m.1, n_lo, n_hi, args.grid_count
    );
    println!(
        "max relative error in E^2: {} at m={}, n={}",
        sci(worst),
        worst_channel.0,
        worst_channel.1
    );
    if worst <= args.tolerance {
        println!("tolerance {}: pass", sci(args.tolerance));
        Ok(0)
    } else {
        println!("tolerance {}: breach", sci(args.tolerance));
        Err(Failure::Breach(format!(
            "max relative error {} exceeds tolerance {}",
            sci(worst),
            sci(args.tolerance)
        )))
    }
}

fn cmd_degeneracy(args: &DegeneracyArgs, unit_check: bool) -> Result<u8, Failure> {
    let params = args.physical.params(unit_check)?;
    let seed = QuantumNumbers::new(args.m, args.n);
    let family = spectrum::degeneracy_family(&params, seed, args.max_shift, args.window)
        .map_err(input_err)?;

    let branch = args.branch.branch();
    let mut table = Table {
        columns: &["m", "n", "E_relativistic"],
        rows: Vec::with_capacity(family.len()),
    };
    for member in &family {
        let energy = spectrum::energy_regular(&params, *member, branch)
            .map_err(energy_err)?
            .value;
        table.rows.push(vec![
            Cell::Int(member.m),
            Cell::Int(i64::from(member.n)),
            Cell::Num(energy),
        ]);
    }
    emit(&table.render(args.out.format), args.out.output.as_ref())?;
    Ok(0)
}
