//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use specsplit_core::ensemble::{convergence_study, EnsembleConfig};
use specsplit_core::hs::{hs_contour, hs_oracle, ContourSpec, Region, SpectralProjection};
use specsplit_core::io::{
    grid_to_csv, matrix_to_json, measure_to_json, read_matrix_file, write_matrix_market,
};
use specsplit_core::stats::{
    brown_grid, brown_measure, fk_determinant, log_norm, mu_profile, GridSpec, Window,
};
use specsplit_core::tri::{split as schur_split, OrderingCurve};
use specsplit_core::verify::run_suites;
use specsplit_core::{Error, OperatorMatrix, Result, Tolerances};

use crate::output::{emit, render_json, Meta};

pub struct Context {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub format: String,
}

impl Context {
    fn meta(&self, input: Option<&[u8]>) -> Meta {
        Meta::new(self.seed, &self.tolerances, input)
    }
}

fn load_matrix(path: &Path) -> Result<(OperatorMatrix, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let matrix = read_matrix_file(path)?;
    Ok((matrix, bytes))
}

#[derive(Args)]
pub struct DetArgs {
    /// Matrix file (.mtx Matrix Market array, otherwise JSON).
    matrix: PathBuf,
}

#[derive(Serialize)]
struct DetReport {
    delta: f64,
    log_norm: f64,
    mu_values: Vec<f64>,
    mu_breakpoints: Vec<f64>,
}

pub fn det(ctx: &Context, args: &DetArgs) -> Result<ExitCode> {
    let (t, bytes) = load_matrix(&args.matrix)?;
    let profile = mu_profile(&t)?;
    let report = DetReport {
        delta: fk_determinant(&t, &ctx.tolerances)?,
        log_norm: log_norm(&t)?,
        mu_values: profile.values().to_vec(),
        mu_breakpoints: profile.breakpoints(),
    };
    let meta = ctx.meta(Some(&bytes));
    emit(ctx.output.as_deref(), &render_json(&meta, &report))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct BrownArgs {
    /// Matrix file.
    matrix: PathBuf,
    /// Emit the eigenvalue atom list (the default).
    #[arg(long, conflicts_with = "grid")]
    atoms: bool,
    /// Emit a grid-regularized density instead.
    #[arg(long)]
    grid: bool,
    /// Grid window as 'x0,x1,y0,y1'.
    #[arg(long, requires = "grid", allow_hyphen_values = true)]
    window: Option<String>,
    /// Grid cells as 'nx,ny'.
    #[arg(long, requires = "grid", default_value = "64,64")]
    cells: String,
    /// Regularization strength; defaults to grid_eps_rel times the scale.
    #[arg(long, requires = "grid")]
    epsilon: Option<f64>,
}

pub fn brown(ctx: &Context, args: &BrownArgs) -> Result<ExitCode> {
    let (t, bytes) = load_matrix(&args.matrix)?;
    let meta = ctx.meta(Some(&bytes));
    if !args.grid {
        #[derive(Serialize)]
        struct AtomsReport {
            atoms: serde_json::Value,
            total: f64,
        }
        let nu = brown_measure(&t)?;
        // Coincident atoms are merged for presentation.
        let merged = nu.merged(1e-9 * t.op_norm_est().max(1.0));
        let report = AtomsReport {
            atoms: serde_json::from_str(&measure_to_json(&merged)).expect("valid json"),
            total: merged.total(),
        };
        emit(ctx.output.as_deref(), &render_json(&meta, &report))?;
        return Ok(ExitCode::SUCCESS);
    }

    let window = match &args.window {
        Some(text) => {
            let parts: Vec<f64> = text
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("window: {e}")))?;
            if parts.len() != 4 {
                return Err(Error::InvalidArgument(
                    "window needs four values 'x0,x1,y0,y1'".into(),
                ));
            }
            Window::new(parts[0], parts[1], parts[2], parts[3])
        }
        None => {
            // Fit the spectrum with padding.
            let spectrum = specsplit_core::kernel::eigenvalues(&t)?;
            let max_abs = spectrum
                .iter()
                .map(|z| z.norm())
                .fold(1e-3, f64::max);
            Window::square(Complex64::new(0.0, 0.0), 1.3 * max_abs)
        }
    };
    let cells: Vec<usize> = args
        .cells
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("cells: {e}")))?;
    if cells.len() != 2 || cells.iter().any(|&c| c == 0) {
        return Err(Error::InvalidArgument("cells needs 'nx,ny'".into()));
    }
    let spec = GridSpec::with_cells(window, cells[0], cells[1]);
    let epsilon = args
        .epsilon
        .unwrap_or(ctx.tolerances.grid_eps_rel * t.op_norm_est().max(1e-3));
    let density = brown_grid(&t, &spec, epsilon)?;
    if !density.spectrum_covered {
        eprintln!("warning: window does not cover the spectrum; mass deficit expected");
    }
    if ctx.format == "csv" {
        let mut text = meta.comment_lines("#");
        text.push_str(&grid_to_csv(&density));
        emit(ctx.output.as_deref(), &text)?;
    } else {
        emit(ctx.output.as_deref(), &render_json(&meta, &density))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct HsArgs {
    /// Matrix file.
    matrix: PathBuf,
    /// Disk as 'cx,cy,r'.
    #[arg(long, conflicts_with = "region", allow_hyphen_values = true)]
    disk: Option<String>,
    /// Region file (JSON tagged union).
    #[arg(long)]
    region: Option<PathBuf>,
    /// oracle (exact ordered Schur) or contour (Riemann-sum idempotent).
    #[arg(long, value_parser = ["oracle", "contour"], default_value = "oracle")]
    method: String,
    /// Contour node count.
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    /// Contour margin; defaults to a fraction of the spectral diameter.
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Serialize)]
struct HsReport {
    method: String,
    region: Region,
    normalized_rank: f64,
    hermiticity: f64,
    idempotency: f64,
    invariance: f64,
    matrix: serde_json::Value,
}

pub fn hs(ctx: &Context, args: &HsArgs) -> Result<ExitCode> {
    let (t, bytes) = load_matrix(&args.matrix)?;
    let region = match (&args.disk, &args.region) {
        (Some(text), None) => {
            let parts: Vec<f64> = text
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("disk: {e}")))?;
            if parts.len() != 3 {
                return Err(Error::InvalidArgument("disk needs 'cx,cy,r'".into()));
            }
            Region::disk(Complex64::new(parts[0], parts[1]), parts[2])
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --disk or --region is required".into(),
            ))
        }
    };
    region.validate()?;

    let projection: SpectralProjection = match args.method.as_str() {
        "oracle" => hs_oracle(&t, &region, &ctx.tolerances)?,
        _ => {
            let (center, radius) = region.as_disk().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "the contour method needs a plain disk boundary; region kind '{}' \
                     is oracle-only",
                    region.kind()
                ))
            })?;
            let margin = match args.margin {
                Some(m) => m,
                None => {
                    let spectrum = specsplit_core::kernel::eigenvalues(&t)?;
                    let mut diam: f64 = 0.0;
                    for (i, a) in spectrum.iter().enumerate() {
                        for b in &spectrum[i + 1..] {
                            diam = diam.max((a - b).norm());
                        }
                    }
                    (0.05 * diam).max(1e-6)
                }
            };
            hs_contour(&t, &ContourSpec::new(center, radius, args.nodes, margin), &ctx.tolerances)?
        }
    };
    let d = projection.diagnostics(&t);
    let meta = ctx.meta(Some(&bytes));

    if let Some(path) = &ctx.output {
        if path.extension().and_then(|e| e.to_str()) == Some("mtx") {
            let mut text = write_matrix_market(&projection.matrix);
            let header_end = text.find('\n').map(|i| i + 1).unwrap_or(0);
            text.insert_str(header_end, &meta.comment_lines("%"));
            return emit(Some(path), &text).map(|_| ExitCode::SUCCESS);
        }
    }
    let report = HsReport {
        method: args.method.clone(),
        region: projection.region.clone(),
        normalized_rank: projection.normalized_rank,
        hermiticity: d.hermiticity,
        idempotency: d.idempotency,
        invariance: d.invariance,
        matrix: serde_json::from_str(&matrix_to_json(&projection.matrix)).expect("valid json"),
    };
    emit(ctx.output.as_deref(), &render_json(&meta, &report))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct SplitArgs {
    /// Matrix file.
    matrix: PathBuf,
    /// Spectral ordering: lex, spiral or hilbert.
    #[arg(long, value_parser = ["lex", "spiral", "hilbert"], default_value = "lex")]
    order: String,
}

#[derive(Serialize)]
struct SplitReport {
    order: String,
    eigenvalues: Vec<Complex64>,
    unitary: serde_json::Value,
    triangular: serde_json::Value,
    normal: serde_json::Value,
    nilpotent: serde_json::Value,
    flag_ranks: Vec<usize>,
    window_expanded: bool,
    reconstruction_defect: f64,
    normality_defect: f64,
}

pub fn split(ctx: &Context, args: &SplitArgs) -> Result<ExitCode> {
    let (t, bytes) = load_matrix(&args.matrix)?;
    let curve = match args.order.as_str() {
        "lex" => OrderingCurve::Lexicographic,
        "spiral" => OrderingCurve::Spiral,
        _ => OrderingCurve::hilbert_default(),
    };
    let s = schur_split(&t, &curve, &ctx.tolerances)?;
    if s.window_expanded {
        eprintln!("warning: Hilbert window expanded to cover the spectrum");
    }
    let as_json = |m: &OperatorMatrix| -> serde_json::Value {
        serde_json::from_str(&matrix_to_json(m)).expect("valid json")
    };
    let report = SplitReport {
        order: args.order.clone(),
        eigenvalues: s.eigenvalues(),
        unitary: as_json(&s.schur.unitary),
        triangular: as_json(&s.schur.triangular),
        normal: as_json(&s.normal),
        nilpotent: as_json(&s.nilpotent),
        flag_ranks: (0..=t.dim()).collect(),
        window_expanded: s.window_expanded,
        reconstruction_defect: s.reconstruction_defect(&t),
        normality_defect: s.normality_defect(),
    };
    let meta = ctx.meta(Some(&bytes));
    emit(ctx.output.as_deref(), &render_json(&meta, &report))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct EnsembleArgs {
    /// JSON configuration (n, trials, seed, epsilon_grid, base, probes).
    config: PathBuf,
}

pub fn ensemble(ctx: &Context, args: &EnsembleArgs) -> Result<ExitCode> {
    let bytes = std::fs::read(&args.config)?;
    let config: EnsembleConfig = serde_json::from_slice(&bytes)?;
    let report = convergence_study(&config, &ctx.tolerances)?;
    let meta = Meta::new(config.seed, &ctx.tolerances, Some(&bytes));
    if ctx.format == "csv" {
        let mut text = meta.comment_lines("#");
        text.push_str("epsilon,mean_w1,max_w1,mean_determinant_gap\n");
        for row in &report.per_epsilon {
            let gap = row
                .determinant_gaps
                .iter()
                .copied()
                .fold(0.0f64, f64::max);
            text.push_str(&format!(
                "{},{},{},{}\n",
                row.epsilon, row.mean_w1, row.max_w1, gap
            ));
        }
        emit(ctx.output.as_deref(), &text)?;
    } else {
        emit(ctx.output.as_deref(), &render_json(&meta, &report))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct VerifyArgs {
    /// determinant | projections | split | submajorization | all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Matrix sizes for the randomized corpora.
    #[arg(long, default_value = "4,8,12")]
    n_sizes: String,
    /// Also parse and sanity-check every matrix file in this directory.
    #[arg(long)]
    matrix_dir: Option<PathBuf>,
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> Result<ExitCode> {
    let sizes: Vec<usize> = args
        .n_sizes
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("n-sizes: {e}")))?;
    if sizes.iter().any(|&n| n < 2) {
        return Err(Error::InvalidArgument("n-sizes must all be >= 2".into()));
    }

    let mut failed = false;
    let mut first_failure: Option<String> = None;

    if let Some(dir) = &args.matrix_dir {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        println!("matrix directory: {} files", entries.len());
        for path in entries {
            match read_matrix_file(&path) {
                Ok(m) => println!("  ok    {} (n = {})", path.display(), m.dim()),
                Err(e) => {
                    println!("  FAIL  {} ({e})", path.display());
                    failed = true;
                    first_failure
                        .get_or_insert_with(|| format!("{}: {e}", path.display()));
                }
            }
        }
    }

    let reports = run_suites(&args.suite, ctx.seed, &sizes, &ctx.tolerances)?;
    println!(
        "{:<16} {:<58} {:>6} {:>6} {:>10}",
        "suite", "property", "cases", "fails", "max_err"
    );
    for report in &reports {
        for p in &report.properties {
            println!(
                "{:<16} {:<58} {:>6} {:>6} {:>10.3e}",
                report.suite, p.property, p.cases, p.failures, p.max_err
            );
            if !p.passed() {
                failed = true;
                first_failure.get_or_insert_with(|| {
                    format!(
                        "{}/{}: {}",
                        report.suite,
                        p.property,
                        p.first_failure.clone().unwrap_or_default()
                    )
                });
            }
        }
    }
    if let Some(path) = &ctx.output {
        let meta = ctx.meta(None);
        #[derive(Serialize)]
        struct VerifyReport<'a> {
            suites: &'a [specsplit_core::verify::SuiteReport],
        }
        emit(Some(path), &render_json(&meta, &VerifyReport { suites: &reports }))?;
    }
    if failed {
        println!("FIRST FAILURE: {}", first_failure.unwrap_or_default());
        println!("RESULT: FAIL");
        Ok(ExitCode::from(2))
    } else {
        println!("RESULT: PASS");
        Ok(ExitCode::SUCCESS)
    }
}
