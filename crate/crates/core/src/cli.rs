//! Command-line front end: scenario files, presets, spectrum export.
//!
//! Scenario files are TOML. Complex quantities are `[magnitude, phase_deg]`
//! pairs:
//!
//! ```toml
//! channel = "s2"
//!
//! [drive]
//! omega12 = [0.5, 0.0]
//! omega24 = [0.5, 0.0]
//! omega23 = [0.5, 0.0]
//!
//! [decay]
//! gamma2 = 1.0
//! gamma3 = 1.0
//!
//! [init]
//! a1 = [0.7071067811865476, 0.0]
//! a4 = [0.7071067811865476, 180.0]
//!
//! [grid]
//! min = -10.0
//! max = 10.0
//! points = 2001
//! ```
//!
//! Output files carry a commented header and, on `#@ ` lines, the fully
//! resolved scenario, so an output file can be fed back in with
//! `--scenario`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::model::{
    Channel, DecayRates, DriveParameters, InitialAmplitudes, Scenario, Spectrum, SpectrumGrid,
    C64,
};
use crate::{laplace, oracle, presets, resonant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

pub const DEFAULT_GAMMA_MHZ: f64 = 6.0;

/// Prefix of header lines that embed the scenario.
const EMBED_PREFIX: &str = "#@ ";

#[derive(Debug, Parser)]
#[command(name = "invy", version, about = "Emission spectra of a driven inverted-Y atom")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a spectrum and write it as text.
    Run(RunArgs),
    /// Report line positions, widths and dark-state flags.
    Features(FeatureArgs),
    /// List the built-in parameter sets.
    ListPresets,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["scenario", "preset"])))]
pub struct SourceArgs {
    /// TOML scenario file, or a previous output file.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Built-in parameter set (see list-presets).
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Lowest detuning, in units of γ.
    #[arg(long, allow_hyphen_values = true, value_name = "DELTA")]
    pub grid_min: Option<f64>,
    /// Highest detuning, in units of γ.
    #[arg(long, allow_hyphen_values = true, value_name = "DELTA")]
    pub grid_max: Option<f64>,
    #[arg(long, value_name = "N")]
    pub points: Option<usize>,
    /// s2 (photons from |2⟩) or s3 (from |3⟩).
    #[arg(long)]
    pub channel: Option<Channel>,
    /// Cross-check against the time-domain integration.
    #[arg(long)]
    pub oracle: bool,
    /// Largest accepted relative deviation from the oracle.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Write the spectrum here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Write an SVG plot.
    #[arg(long, value_name = "PATH")]
    pub render: Option<PathBuf>,
    /// γ in MHz, used for labels only.
    #[arg(long, default_value_t = DEFAULT_GAMMA_MHZ)]
    pub gamma_mhz: f64,
}

#[derive(Debug, Args)]
pub struct FeatureArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Take trapped populations from the time-domain integration.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = DEFAULT_GAMMA_MHZ)]
    pub gamma_mhz: f64,
}

/// A failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularEvaluation { .. } => EXIT_SINGULAR,
            Error::NonNormalizedInitialState { .. }
            | Error::NegativeRate { .. }
            | Error::NonFiniteParameter { .. }
            | Error::InvalidGrid(_)
            | Error::NotResonant { .. } => EXIT_INVALID,
            _ => EXIT_FAILURE,
        };
        let message = match e {
            Error::NonNormalizedInitialState { .. } => format!("[init]: {e}"),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// `[magnitude, phase_deg]`.
pub type Polar = [f64; 2];

/// Polar pair to complex. Phases on the axes map exactly, so
/// `[x, 180]` is precisely −x.
pub fn polar_to_complex(key: &str, [mag, deg]: Polar) -> Result<C64, CliError> {
    if !mag.is_finite() || !deg.is_finite() {
        return Err(CliError::invalid(format!("{key}: value is not finite")));
    }
    if mag < 0.0 {
        return Err(CliError::invalid(format!(
            "{key}: magnitude {mag} is negative; use a 180 degree phase"
        )));
    }
    let turn = deg.rem_euclid(360.0);
    Ok(if turn == 0.0 {
        C64::new(mag, 0.0)
    } else if turn == 90.0 {
        C64::new(0.0, mag)
    } else if turn == 180.0 {
        C64::new(-mag, 0.0)
    } else if turn == 270.0 {
        C64::new(0.0, -mag)
    } else {
        C64::from_polar(mag, deg.to_radians())
    })
}

/// Real value to polar, with negative numbers as phase 180.
pub fn real_to_polar(x: f64) -> Polar {
    if x.is_sign_negative() && x != 0.0 {
        [-x, 180.0]
    } else {
        [x, 0.0]
    }
}

const fn zero_polar() -> Polar {
    [0.0, 0.0]
}

const fn unit_rate() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default = "zero_polar")]
    pub omega12: Polar,
    #[serde(default = "zero_polar")]
    pub omega24: Polar,
    #[serde(default = "zero_polar")]
    pub omega23: Polar,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
    #[serde(default)]
    pub delta3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    #[serde(default = "unit_rate")]
    pub gamma2: f64,
    pub gamma3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    #[serde(default = "zero_polar")]
    pub a1: Polar,
    #[serde(default = "zero_polar")]
    pub a2: Polar,
    #[serde(default = "zero_polar")]
    pub a3: Polar,
    #[serde(default = "zero_polar")]
    pub a4: Polar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            min: SpectrumGrid::DEFAULT_MIN,
            max: SpectrumGrid::DEFAULT_MAX,
            points: SpectrumGrid::DEFAULT_POINTS,
        }
    }
}

/// Contents of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Channel>,
    pub drive: DriveSection,
    pub decay: DecaySection,
    pub init: InitSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

impl ScenarioFile {
    pub fn from_preset(p: &presets::Preset) -> Self {
        let [a1, a2, a3, a4] = p.init.map(real_to_polar);
        Self {
            preset: Some(p.name.to_string()),
            channel: None,
            drive: DriveSection {
                omega12: real_to_polar(p.omega12),
                omega24: real_to_polar(p.omega24),
                omega23: real_to_polar(p.omega23),
                delta1: 0.0,
                delta2: 0.0,
                delta3: 0.0,
            },
            decay: DecaySection {
                gamma2: 1.0,
                gamma3: p.gamma3,
            },
            init: InitSection { a1, a2, a3, a4 },
            grid: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::invalid(format!("scenario file: {e}")))
    }

    /// Reads a scenario file, or the embedded scenario of an output file.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
        let embedded: Vec<&str> = text
            .lines()
            .filter_map(|l| l.strip_prefix(EMBED_PREFIX))
            .collect();
        let source = if embedded.is_empty() {
            text
        } else {
            embedded.join("\n")
        };
        Self::parse(&source).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let d = &self.drive;
        let drive = DriveParameters {
            omega12: polar_to_complex("drive.omega12", d.omega12)?,
            omega24: polar_to_complex("drive.omega24", d.omega24)?,
            omega23: polar_to_complex("drive.omega23", d.omega23)?,
            delta1: d.delta1,
            delta2: d.delta2,
            delta3: d.delta3,
        };
        let i = &self.init;
        let init = InitialAmplitudes::new(
            polar_to_complex("init.a1", i.a1)?,
            polar_to_complex("init.a2", i.a2)?,
            polar_to_complex("init.a3", i.a3)?,
            polar_to_complex("init.a4", i.a4)?,
        );
        let decay = DecayRates::new(self.decay.gamma2, self.decay.gamma3);
        Ok(Scenario::new(drive, decay, init)?)
    }

    pub fn grid(&self) -> Result<SpectrumGrid, CliError> {
        let g = self.grid.unwrap_or_default();
        SpectrumGrid::new(g.min, g.max, g.points)
            .map_err(|e| CliError::invalid(format!("[grid]: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario file serializes")
    }
}

fn load_source(source: &SourceArgs) -> Result<ScenarioFile, CliError> {
    match (&source.scenario, &source.preset) {
        (Some(path), _) => ScenarioFile::read(path),
        (None, Some(name)) => presets::find(name)
            .map(ScenarioFile::from_preset)
            .ok_or_else(|| {
                CliError::invalid(format!(
                    "unknown preset '{name}' (known: {})",
                    presets::names().collect::<Vec<_>>().join(", ")
                ))
            }),
        (None, None) => Err(CliError::invalid("one of --scenario or --preset is required")),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One record per line, `delta value`, both in full precision.
pub fn format_records(spectrum: &Spectrum) -> String {
    let mut out = String::with_capacity(spectrum.values.len() * 48);
    for (x, v) in spectrum.iter() {
        let _ = writeln!(out, "{x:.16e}\t{v:.16e}");
    }
    out
}

/// Hash of the record block, as written into the header.
pub fn spectrum_hash(spectrum: &Spectrum) -> String {
    sha256_hex(format_records(spectrum).as_bytes())
}

/// Full output file: header, embedded scenario, records.
pub fn format_output(file: &ScenarioFile, spectrum: &Spectrum, gamma_mhz: f64) -> String {
    let embedded = file.to_toml();
    let records = format_records(spectrum);
    let mut out = String::new();
    let _ = writeln!(out, "# invy spectrum");
    let _ = writeln!(out, "# channel: {}", spectrum.channel);
    let _ = writeln!(out, "# units: delta and rates in gamma, value in 1/gamma");
    let _ = writeln!(out, "# gamma_mhz: {gamma_mhz}");
    let _ = writeln!(out, "# preset: {}", file.preset.as_deref().unwrap_or("none"));
    let _ = writeln!(out, "# points: {}", spectrum.values.len());
    let _ = writeln!(out, "# scenario_sha256: {}", sha256_hex(embedded.as_bytes()));
    let _ = writeln!(out, "# spectrum_sha256: {}", sha256_hex(records.as_bytes()));
    for line in embedded.lines() {
        let _ = writeln!(out, "{EMBED_PREFIX}{line}");
    }
    let _ = writeln!(out, "# delta\tvalue");
    out.push_str(&records);
    out
}

/// Minimal SVG line plot of a spectrum.
pub fn render_svg(spectrum: &Spectrum, title: &str, gamma_mhz: f64) -> String {
    const W: f64 = 800.0;
    const H: f64 = 450.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;
    let (x0, x1) = (spectrum.grid.delta_min(), spectrum.grid.delta_max());
    let peak = spectrum.max_value();
    let ymax = if peak > 0.0 { peak * 1.05 } else { 1.0 };
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - y / ymax * (H - TOP - BOTTOM);

    let mut points = String::new();
    for (x, y) in spectrum.iter() {
        let _ = write!(points, "{:.2},{:.2} ", px(x), py(y));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{l},{t} V{b} H{r}" fill="none" stroke="black"/>"#,
        l = LEFT,
        t = TOP,
        b = H - BOTTOM,
        r = W - RIGHT
    );
    for k in 0..=4 {
        let x = x0 + (x1 - x0) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            px(x),
            H - BOTTOM + 18.0,
            x
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">detuning (units of γ = {} MHz)</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 10.0,
        gamma_mhz
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{:.3e}</text>"#,
        LEFT - 6.0,
        py(ymax) + 4.0,
        ymax
    );
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::failure(format!("cannot write {}: {e}", path.display())))
}

/// Result of `run`: the file text and the human-readable notes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub output: String,
    pub notes: Vec<String>,
    pub oracle_deviation: Option<f64>,
    pub spectrum: Spectrum,
}

/// Applies the flag overrides and computes the spectrum.
pub fn execute_run(args: &RunArgs) -> Result<RunOutcome, CliError> {
    let mut file = load_source(&args.source)?;
    let mut grid = file.grid.unwrap_or_default();
    if let Some(v) = args.grid_min {
        grid.min = v;
    }
    if let Some(v) = args.grid_max {
        grid.max = v;
    }
    if let Some(v) = args.points {
        grid.points = v;
    }
    file.grid = Some(grid);
    let channel = args.channel.or(file.channel).unwrap_or(Channel::S2);
    file.channel = Some(channel);

    let scenario = file.to_scenario()?;
    let grid = file.grid()?;
    let spectrum = laplace::spectrum(&grid, &scenario, channel)?;

    let mut notes = Vec::new();
    let drive = scenario.drive();
    if resonant::dark_state_check(drive, scenario.init()) {
        notes.push("dark state detected: no emission".to_string());
    } else if drive.is_resonant(resonant::RESONANCE_TOL)
        && channel == Channel::S2
        && resonant::dark_line_check(scenario.init())
    {
        notes.push("dark line at delta = 0".to_string());
    }
    let oracle_deviation = if args.oracle {
        let reference = oracle::oracle_spectrum(&scenario, &grid, channel)?;
        let dev = oracle::max_relative_deviation(&spectrum, &reference);
        notes.push(format!(
            "oracle max relative deviation: {dev:.3e} (tolerance {:e})",
            args.tolerance
        ));
        Some(dev)
    } else {
        None
    };
    Ok(RunOutcome {
        output: format_output(&file, &spectrum, args.gamma_mhz),
        notes,
        oracle_deviation,
        spectrum,
    })
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let outcome = execute_run(args)?;
    match &args.output {
        Some(path) => write_file(path, &outcome.output)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.output.as_bytes())
                .map_err(|e| CliError::failure(e.to_string()))?;
        }
    }
    if let Some(path) = &args.render {
        let title = format!(
            "{} spectrum{}",
            outcome.spectrum.channel.to_string().to_uppercase(),
            args.source
                .preset
                .as_deref()
                .map(|p| format!(" ({p})"))
                .unwrap_or_default()
        );
        write_file(path, &render_svg(&outcome.spectrum, &title, args.gamma_mhz))?;
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    match outcome.oracle_deviation {
        Some(dev) if !(dev <= args.tolerance) => Err(CliError {
            code: EXIT_ORACLE,
            message: format!("oracle deviation {dev:.3e} exceeds tolerance {:e}", args.tolerance),
        }),
        _ => Ok(()),
    }
}

/// Text of the `features` report.
pub fn features_report(
    file: &ScenarioFile,
    use_oracle: bool,
    gamma_mhz: f64,
) -> Result<String, CliError> {
    let scenario = file.to_scenario()?;
    let drive = scenario.drive();
    let decay = scenario.decay();
    let init = scenario.init();
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", file.preset.as_deref().unwrap_or("file"));
    let features = resonant::spectral_features(drive, decay)?;
    let mhz = |x: f64| x * gamma_mhz;
    if features.degenerate {
        let _ = writeln!(out, "degenerate roots; no sideband features");
    } else {
        match features.regime {
            resonant::RootRegime::ConjugatePair => {
                let _ = writeln!(out, "regime: central line and two sidebands");
                let _ = writeln!(
                    out,
                    "delta_lambda: {:.6} gamma ({:.4} MHz)",
                    features.delta_lambda,
                    mhz(features.delta_lambda)
                );
                let _ = writeln!(
                    out,
                    "central width 2|Gamma1|: {:.6} gamma ({:.4} MHz)",
                    features.central_width(),
                    mhz(features.central_width())
                );
                let _ = writeln!(
                    out,
                    "sideband width 2|Gamma2|: {:.6} gamma ({:.4} MHz)",
                    features.sideband_width(),
                    mhz(features.sideband_width())
                );
                let _ = writeln!(out, "resolved: {}", features.resolved());
                if features.central_width() < decay.gamma2 {
                    let _ = writeln!(out, "central line is subnatural");
                }
            }
            resonant::RootRegime::AllReal => {
                let w = features.widths().map(|x| 2.0 * x);
                let _ = writeln!(out, "all roots real; no sideband features");
                let _ = writeln!(
                    out,
                    "widths 2|Re Lambda|: {:.6}, {:.6}, {:.6} gamma",
                    w[0], w[1], w[2]
                );
            }
        }
    }
    let _ = writeln!(out, "dark state: {}", resonant::dark_state_check(drive, init));
    let _ = writeln!(out, "dark line: {}", resonant::dark_line_check(init));
    let ((p1, p4), source) = if use_oracle {
        let traj = oracle::integrate_default(&scenario)?;
        (oracle::trapped_population(&traj)?, "oracle")
    } else {
        (laplace::trapped_population(&scenario)?, "final value")
    };
    let _ = writeln!(
        out,
        "trapped population ({source}): p1 = {p1:.8}, p4 = {p4:.8}, total = {:.8}",
        p1 + p4
    );
    Ok(out)
}

fn cmd_features(args: &FeatureArgs) -> Result<(), CliError> {
    let file = load_source(&args.source)?;
    print!("{}", features_report(&file, args.oracle, args.gamma_mhz)?);
    Ok(())
}

/// Table printed by `list-presets`.
pub fn preset_table() -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} {:<14} parameters", "name", "figure");
    for p in presets::PRESETS {
        let gamma3 = if p.description.contains("γ₃") {
            String::new()
        } else {
            format!(", γ₃={}γ", p.gamma3)
        };
        let _ = writeln!(out, "{:<18} {:<14} {}{}", p.name, p.panel, p.description, gamma3);
    }
    out
}

/// Parses `args` and runs the command; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Features(a) => cmd_features(a),
        Command::ListPresets => {
            print!("{}", preset_table());
            Ok(())
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
