//! Command implementations behind the `contingency` binary.
//!
//! Every command computes all of its outputs in memory first and then writes
//! them through temporary files that are renamed into place, so a failing run
//! leaves no partial files behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use contingency::formats::{curve_to_csv, curves_to_json, format_sig9, surface_to_csv, surface_to_json};
use contingency::{
    build_surface, log_growth_check, rank_by_sensitivity, render_curves_svg, render_surface_svg,
    render_surfaces_svg, sensitivity_curve, studied_metrics, Error, FillMode, GridSpec, Metric, RatioSchedule,
    RenderSpec, SensitivityCurve,
};
use serde::Serialize;

pub const OUT_DIR_ENV: &str = "CONTINGENCY_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "contingency", version, about = "Metric surfaces and class-imbalance sensitivity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one metric over the base contingency space at one ratio.
    Surface(SurfaceArgs),
    /// Sensitivity curves of one or more metrics over a ratio schedule.
    Sensitivity(SensitivityArgs),
    /// Rank metrics by their sensitivity at one ratio.
    Compare(CompareArgs),
    /// Regenerate the reference figures and a manifest.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Number of evenly spaced contour levels in [0, 1].
    #[arg(long, default_value_t = 11)]
    pub levels: usize,
    /// Color every grid cell instead of filling contour bands.
    #[arg(long)]
    pub cells: bool,
    /// Linear instead of logarithmic ratio axis on curve plots.
    #[arg(long)]
    pub linear_x: bool,
}

impl RenderArgs {
    fn surface_spec(&self) -> Result<RenderSpec> {
        let mut spec = RenderSpec::default().with_level_count(self.levels)?;
        if self.cells {
            spec.fill = FillMode::Cells;
        }
        Ok(spec)
    }

    fn curve_spec(&self) -> RenderSpec {
        RenderSpec { log_x: !self.linear_x, ..RenderSpec::curves() }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub metric: Metric,
    #[arg(long)]
    pub ratio: f64,
    /// Samples per axis.
    #[arg(long = "t", default_value_t = contingency::surface::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; defaults to surface_<metric>_r<ratio>.<ext> in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a contour plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub metrics: Vec<Metric>,
    /// Comma-separated ratios or a geometric range start:stop:factor.
    #[arg(long)]
    pub ratios: RatioSchedule,
    #[arg(long = "t", default_value_t = contingency::surface::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// csv writes one file per metric, json one combined file.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Tolerance for the imbalance-agnostic verdict.
    #[arg(long, default_value_t = contingency::sensitivity::DEFAULT_AGNOSTIC_TOLERANCE)]
    pub tol: f64,
    /// Also write a combined curve plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub metrics: Vec<Metric>,
    #[arg(long)]
    pub ratio: f64,
    #[arg(long = "t", default_value_t = contingency::surface::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Also plot every metric's curve over --ratios here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value = "1:1024:2")]
    pub ratios: RatioSchedule,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long = "t", default_value_t = contingency::surface::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Ratio schedule of the sensitivity figure.
    #[arg(long, default_value = "1:1024:2")]
    pub ratios: RatioSchedule,
    #[command(flatten)]
    pub render: RenderArgs,
}

/// Writes every `(path, contents)` pair or none of them.
pub fn write_files(files: &[(PathBuf, String)]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        fs::create_dir_all(dir).with_context(|| format!("cannot create directory {}", dir.display()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot write to {}", dir.display()))?;
        tmp.write_all(contents.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))?;
        // Temporary files are created owner-only.
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn file_stem(metric: Metric) -> String {
    metric
        .id()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
        .collect::<String>()
        .trim_end_matches('_')
        .to_string()
}

fn grid(resolution: usize) -> Result<GridSpec> {
    Ok(GridSpec::new(resolution)?)
}

pub fn cmd_surface(args: &SurfaceArgs, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let surface = build_surface(args.metric, args.ratio, grid(args.resolution)?)?;
    let spec = args.render.surface_spec()?;
    let body = match args.format {
        Format::Csv => surface_to_csv(&surface),
        Format::Json => surface_to_json(&surface),
        Format::Svg => render_surface_svg(&surface, &spec)?,
    };
    let out = args.out.clone().unwrap_or_else(|| {
        args.out_dir.join(format!(
            "surface_{}_r{}.{}",
            file_stem(args.metric),
            format_sig9(surface.ratio()),
            args.format.extension()
        ))
    });
    let mut files = vec![(out, body)];
    if let Some(svg) = &args.svg {
        files.push((svg.clone(), render_surface_svg(&surface, &spec)?));
    }
    write_files(&files)?;

    let values = surface.values();
    writeln!(
        stdout,
        "metric={} r={} t={} min={} max={} mean={}",
        surface.metric(),
        format_sig9(surface.ratio()),
        surface.grid().resolution(),
        format_sig9(values.min()),
        format_sig9(values.max()),
        format_sig9(values.mean())
    )?;
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

fn growth_summary(curve: &SensitivityCurve) -> Option<String> {
    let report = log_growth_check(curve).ok()?;
    Some(if report.is_logarithmic_like() {
        "logarithmic-like".into()
    } else if report.monotone {
        format!("monotone, concave from r = {}", format_sig9(report.concave_from))
    } else {
        "not monotone".into()
    })
}

pub fn cmd_sensitivity(args: &SensitivityArgs, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    if !(args.tol > 0.0) {
        bail!(Error::InvalidTolerance(args.tol));
    }
    let grid = grid(args.resolution)?;
    let curves = args
        .metrics
        .iter()
        .map(|&m| sensitivity_curve(m, &args.ratios, grid))
        .collect::<contingency::Result<Vec<_>>>()?;

    let mut files = match args.format {
        Format::Csv => curves
            .iter()
            .map(|c| (args.out_dir.join(format!("sensitivity_{}.csv", file_stem(c.metric()))), curve_to_csv(c)))
            .collect(),
        Format::Json => vec![(args.out_dir.join("sensitivity.json"), curves_to_json(&curves))],
        Format::Svg => vec![(args.out_dir.join("sensitivity.svg"), render_curves_svg(&curves, &args.render.curve_spec())?)],
    };
    if let Some(svg) = &args.svg {
        files.push((svg.clone(), render_curves_svg(&curves, &args.render.curve_spec())?));
    }
    write_files(&files)?;

    for curve in &curves {
        let max = curve.samples().iter().map(|s| s.sensitivity).fold(0.0, f64::max);
        let verdict = if max <= args.tol { "agnostic" } else { "sensitive" };
        write!(
            stdout,
            "{}: {verdict} (max s = {} over {} ratio{}, tol = {})",
            curve.metric(),
            format_sig9(max),
            curve.samples().len(),
            if curve.samples().len() == 1 { "" } else { "s" },
            format_sig9(args.tol)
        )?;
        if let Some(growth) = growth_summary(curve).filter(|_| max > args.tol) {
            write!(stdout, "; growth: {growth}")?;
        }
        writeln!(stdout)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<Vec<(Metric, f64)>> {
    if args.metrics.len() < 2 {
        bail!("compare needs at least 2 metrics, got {}", args.metrics.len());
    }
    let grid = grid(args.resolution)?;
    let ranked = rank_by_sensitivity(&args.metrics, args.ratio, grid)?;
    if let Some(svg) = &args.svg {
        let curves = args
            .metrics
            .iter()
            .map(|&m| sensitivity_curve(m, &args.ratios, grid))
            .collect::<contingency::Result<Vec<_>>>()?;
        write_files(&[(svg.clone(), render_curves_svg(&curves, &args.render.curve_spec())?)])?;
    }

    let width = ranked.iter().map(|(m, _)| m.id().len()).max().unwrap_or(0).max(6);
    writeln!(
        stdout,
        "rank  {:<width$}  sensitivity (r = 1:{}, t = {})",
        "metric",
        format_sig9(args.ratio),
        grid.resolution()
    )?;
    for (k, (m, s)) in ranked.iter().enumerate() {
        writeln!(stdout, "{:<4}  {:<width$}  {}", k + 1, m.id(), format_sig9(*s))?;
    }
    Ok(ranked)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureEntry {
    pub file: String,
    pub description: String,
    pub metrics: Vec<Metric>,
    pub ratios: Vec<f64>,
    /// Mean rescaled value of each plotted surface, in `ratios` order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mean_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub t: usize,
    pub contour_levels: Vec<f64>,
    pub schedule: Vec<f64>,
    pub log_x: bool,
    pub figures: Vec<FigureEntry>,
}

pub fn cmd_reproduce(args: &ReproduceArgs, stdout: &mut dyn Write) -> Result<Manifest> {
    let grid = grid(args.resolution)?;
    let spec = args.render.surface_spec()?;
    let curve_spec = args.render.curve_spec();

    let balanced = build_surface(Metric::F1, 1.0, grid)?;
    let skewed = build_surface(Metric::F1, 49.0, grid)?;
    let fig2 = render_surface_svg(&balanced, &spec)?;
    let fig3 = render_surfaces_svg(&[&balanced, &skewed], &spec)?;

    let metrics = studied_metrics();
    let curves = metrics
        .iter()
        .map(|&m| sensitivity_curve(m, &args.ratios, grid))
        .collect::<contingency::Result<Vec<_>>>()?;
    let fig4 = render_curves_svg(&curves, &curve_spec)?;

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        t: grid.resolution(),
        contour_levels: spec.contour_levels.clone(),
        schedule: args.ratios.ratios().to_vec(),
        log_x: curve_spec.log_x,
        figures: vec![
            FigureEntry {
                file: "fig2_f1_surface.svg".into(),
                description: "f1 surface at 1:1 as a contour plot".into(),
                metrics: vec![Metric::F1],
                ratios: vec![1.0],
                mean_values: vec![balanced.values().mean()],
            },
            FigureEntry {
                file: "fig3_f1_r1_vs_r49.svg".into(),
                description: "f1 surfaces at 1:1 and 1:49 side by side".into(),
                metrics: vec![Metric::F1],
                ratios: vec![1.0, 49.0],
                mean_values: vec![balanced.values().mean(), skewed.values().mean()],
            },
            FigureEntry {
                file: "fig4_sensitivity.svg".into(),
                description: "class-imbalance sensitivity of the studied metrics".into(),
                metrics: metrics.clone(),
                ratios: args.ratios.ratios().to_vec(),
                mean_values: vec![],
            },
        ],
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)? + "\n";

    let dir = &args.out_dir;
    let files = vec![
        (dir.join(&manifest.figures[0].file), fig2),
        (dir.join(&manifest.figures[1].file), fig3),
        (dir.join(&manifest.figures[2].file), fig4),
        (dir.join("manifest.json"), manifest_json),
    ];
    write_files(&files)?;
    for (path, _) in &files {
        writeln!(stdout, "wrote {}", path.display())?;
    }
    Ok(manifest)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Surface(args) => cmd_surface(args, stdout).map(drop),
        Command::Sensitivity(args) => cmd_sensitivity(args, stdout).map(drop),
        Command::Compare(args) => cmd_compare(args, stdout).map(drop),
        Command::Reproduce(args) => cmd_reproduce(args, stdout).map(drop),
    }
}
