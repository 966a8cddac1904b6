//! Command-line front end: ingest observation files, run the rank pipeline,
//! fit rank models, and emit reports and plot-ready CSVs.
//!
//! Exit codes: 0 success, 2 validation error, 3 convergence failure,
//! 4 I/O error.

mod error;
mod obsfile;
mod scores;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use rankdisc::experiments::{cross_validate, length_scan, per_speaker_histograms};
use rankdisc::fit::{fit, FitOptions, LossKind, LossSpec};
use rankdisc::metrics::{disclosure_stats, equal_error_rate, model_disclosure_stats, ScoreSet};
use rankdisc::rank::normalize;
use rankdisc::synth::{generate, SynthConfig};
use rankdisc::{FeatureKind, ModelDocument, ObservationSet, RankHistogram, SimilarityMeasure};

use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "rankdisc",
    version,
    about = "Quantifies how much identity information a similarity rank discloses"
)]
struct Cli {
    /// Suppress informational output.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the true speaker against all templates and write the rank histogram CSV.
    Rank(RankArgs),
    /// Fit a beta-binomial model to a rank histogram.
    Fit(FitArgs),
    /// Disclosure statistics from a histogram or a fitted model.
    Stats(StatsArgs),
    /// Equal error rate from genuine and impostor score files.
    Eer(EerArgs),
    /// Generate a synthetic observation file.
    Synth(SynthArgs),
    /// Mean disclosure over a grid of test/template lengths.
    LengthScan(LengthScanArgs),
    /// Per-speaker model fits and their mean-disclosure summary.
    PerSpeaker(PerSpeakerArgs),
}

fn parse_measure(s: &str) -> Result<SimilarityMeasure, String> {
    s.parse::<SimilarityMeasure>().map_err(|e| e.to_string())
}

fn parse_loss(s: &str) -> Result<LossKind, String> {
    s.parse::<LossKind>().map_err(|e| e.to_string())
}

#[derive(Args)]
struct RankArgs {
    /// Observation file to rank (see README for the format).
    #[arg(long)]
    features: PathBuf,
    /// cosine | euclidean | hellinger | jensen-shannon; defaults to the
    /// feature kind's standard measure.
    #[arg(long, value_parser = parse_measure)]
    measure: Option<SimilarityMeasure>,
    /// Observations aggregated per test sample (T).
    #[arg(long, default_value_t = 1)]
    test_len: usize,
    /// Observations aggregated per database template (D).
    #[arg(long, default_value_t = 1)]
    db_len: usize,
    /// Output histogram CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Rank histogram CSV produced by `rank`.
    #[arg(long)]
    hist: PathBuf,
    /// ll | ms | wms | rwms | cll
    #[arg(long, value_parser = parse_loss, default_value = "ll")]
    loss: LossKind,
    /// Weight of the rank-1 penalty used by the cll loss.
    #[arg(long, default_value_t = rankdisc::fit::DEFAULT_CLL_PENALTY_WEIGHT)]
    cll_weight: f64,
    /// Simplex iteration cap.
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Simplex loss-spread stopping tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output model document path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct StatsSource {
    /// Rank histogram CSV to evaluate directly.
    #[arg(long, group = "source")]
    hist: Option<PathBuf>,
    /// Fitted model document to evaluate instead.
    #[arg(long, group = "source")]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    source: StatsSource,
    /// Output report document path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EerArgs {
    /// One-column CSV of same-identity scores.
    #[arg(long)]
    genuine: PathBuf,
    /// One-column CSV of different-identity scores.
    #[arg(long)]
    impostor: PathBuf,
    /// Treat smaller scores as more similar (distance-like scores).
    #[arg(long)]
    lower_is_similar: bool,
    /// Optional output document path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of speakers (N).
    #[arg(long)]
    speakers: usize,
    /// Observations per speaker (K).
    #[arg(long)]
    obs: usize,
    /// Feature dimension (M).
    #[arg(long)]
    dim: usize,
    /// Scale of the centroid distribution.
    #[arg(long, default_value_t = 1.0)]
    inter_sigma: f64,
    /// Observation noise around each centroid.
    #[arg(long, default_value_t = 0.1)]
    intra_sigma: f64,
    /// Centroid displacement per segment index.
    #[arg(long, default_value_t = 0.0)]
    drift: f64,
    /// embedding | counts
    #[arg(long, default_value = "embedding", value_parser = obsfile::parse_kind)]
    kind: FeatureKind,
    /// Generator seed; identical seeds give identical files.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output observation file path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LengthScanArgs {
    /// Observation file to scan.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, value_parser = parse_measure)]
    measure: Option<SimilarityMeasure>,
    /// Comma-separated test lengths, e.g. 1,2,4,8.
    #[arg(long)]
    t_grid: String,
    /// Comma-separated template lengths, e.g. 1,4.
    #[arg(long)]
    d_grid: String,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PerSpeakerArgs {
    /// Observation file to analyze.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, value_parser = parse_measure)]
    measure: Option<SimilarityMeasure>,
    #[arg(long, default_value_t = 1)]
    test_len: usize,
    #[arg(long, default_value_t = 1)]
    db_len: usize,
    /// Output CSV path: one row per speaker plus a summary row.
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let result = match cli.command {
        Command::Rank(args) => cmd_rank(args, quiet),
        Command::Fit(args) => cmd_fit(args, quiet),
        Command::Stats(args) => cmd_stats(args, quiet),
        Command::Eer(args) => cmd_eer(args, quiet),
        Command::Synth(args) => cmd_synth(args, quiet),
        Command::LengthScan(args) => cmd_length_scan(args, quiet),
        Command::PerSpeaker(args) => cmd_per_speaker(args, quiet),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn load_observations(path: &Path) -> CliResult<ObservationSet> {
    let text = read_file(path)?;
    obsfile::read_observations(&text).map_err(|e| match e {
        CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn resolve_measure(
    requested: Option<SimilarityMeasure>,
    kind: FeatureKind,
) -> CliResult<SimilarityMeasure> {
    let measure = requested.unwrap_or_else(|| SimilarityMeasure::default_for(kind));
    if !measure.compatible_with(kind) {
        return Err(CliError::Validation(format!(
            "{} is not defined for {} features",
            measure.as_str(),
            kind.as_str()
        )));
    }
    Ok(measure)
}

fn load_histogram(path: &Path) -> CliResult<RankHistogram> {
    let text = read_file(path)?;
    RankHistogram::from_csv_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn cmd_rank(args: RankArgs, quiet: bool) -> CliResult<()> {
    let data = load_observations(&args.features)?;
    let measure = resolve_measure(args.measure, data.kind())?;
    let hist = cross_validate(&data, measure, args.test_len, args.db_len)?;
    write_file(&args.out, &hist.to_csv_string())?;
    if !quiet {
        println!("n_identities = {}", hist.n_identities());
        println!("obs_per_speaker = {}", data.obs_per_speaker());
        println!("total_trials = {}", hist.total_trials());
    }
    Ok(())
}

fn cmd_fit(args: FitArgs, quiet: bool) -> CliResult<()> {
    let hist = load_histogram(&args.hist)?;
    let emp = normalize(&hist)?;
    let spec = LossSpec::with_penalty_weight(args.loss, args.cll_weight);
    let options = FitOptions {
        max_iters: args.max_iters,
        tol: args.tol,
    };
    let result = fit(&emp, &spec, &options)?;
    let document = ModelDocument {
        alpha: result.model.alpha(),
        beta: result.model.beta(),
        n_identities: result.model.n_identities(),
        loss_name: args.loss.name().to_string(),
        kl_divergence_bits: result.gof_kl_bits,
        rank1_match_bits: result.gof_rank1_bits,
        cll_penalty_weight: (args.loss == LossKind::Cll).then_some(args.cll_weight),
    };
    write_file(&args.out, &document.to_document_string())?;
    if !quiet {
        println!(
            "loss = {} ({} iterations, value {:.6e})",
            args.loss.name(),
            result.iterations,
            result.loss_value
        );
        if args.loss == LossKind::Cll {
            println!("cll_penalty_weight = {}", args.cll_weight);
        }
        println!("alpha = {}", result.model.alpha());
        println!("beta = {}", result.model.beta());
        println!("kl_divergence_bits = {:.6}", result.gof_kl_bits);
    }
    if !result.converged {
        return Err(CliError::Convergence(format!(
            "simplex search hit the {}-iteration cap before the loss spread fell below {}",
            args.max_iters, args.tol
        )));
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs, quiet: bool) -> CliResult<()> {
    let report = match (&args.source.hist, &args.source.model) {
        (Some(hist_path), None) => {
            let hist = load_histogram(hist_path)?;
            let emp = normalize(&hist)?;
            if !quiet {
                let probe = hist.counts().len().min(10);
                if hist.counts()[..probe].iter().all(|&c| c > 0) {
                    println!("density: dense histogram; direct statistics are reliable");
                } else {
                    println!(
                        "density: sparse histogram (zeros within the lowest {probe} ranks); \
                         consider fitting a model and using --model"
                    );
                }
            }
            disclosure_stats(emp.probs())?
        }
        (None, Some(model_path)) => {
            let text = read_file(model_path)?;
            let document = ModelDocument::parse(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", model_path.display())))?;
            model_disclosure_stats(&document.model()?)?
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    write_file(&args.out, &report.to_document_string())?;
    if !quiet {
        println!("mean_disclosure_bits = {:.4}", report.mean_disclosure_bits);
        println!("max_disclosure_bits = {:.4}", report.max_disclosure_bits);
        println!("identification_rate = {:.6}", report.identification_rate);
    }
    Ok(())
}

fn cmd_eer(args: EerArgs, quiet: bool) -> CliResult<()> {
    let genuine = scores::read_scores(&read_file(&args.genuine)?)?;
    let impostor = scores::read_scores(&read_file(&args.impostor)?)?;
    let set = ScoreSet {
        genuine,
        impostor,
        higher_is_more_similar: !args.lower_is_similar,
    };
    let eer = equal_error_rate(&set)?;
    if let Some(out) = &args.out {
        write_file(out, &format!("eer = {eer}\n"))?;
    }
    if !quiet {
        println!("eer = {eer:.6}");
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs, quiet: bool) -> CliResult<()> {
    let config = SynthConfig {
        n_speakers: args.speakers,
        obs_per_speaker: args.obs,
        dimension: args.dim,
        inter_speaker_sigma: args.inter_sigma,
        intra_speaker_sigma: args.intra_sigma,
        drift_per_segment: args.drift,
        feature_kind: args.kind,
        seed: args.seed,
    };
    let data = generate(&config)?;
    write_file(&args.out, &obsfile::write_observations(&data)?)?;
    if !quiet {
        println!(
            "wrote {} speakers x {} observations ({} features, dim {})",
            data.n_speakers(),
            data.obs_per_speaker(),
            data.kind().as_str(),
            data.dimension()
        );
    }
    Ok(())
}

fn parse_grid(label: &str, text: &str) -> CliResult<Vec<usize>> {
    let grid = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Validation(format!("{label}: bad length {part:?}")))
        })
        .collect::<CliResult<Vec<usize>>>()?;
    if grid.is_empty() {
        return Err(CliError::Validation(format!("{label}: empty grid")));
    }
    Ok(grid)
}

fn cmd_length_scan(args: LengthScanArgs, quiet: bool) -> CliResult<()> {
    let data = load_observations(&args.features)?;
    let measure = resolve_measure(args.measure, data.kind())?;
    let t_grid = parse_grid("--t-grid", &args.t_grid)?;
    let d_grid = parse_grid("--d-grid", &args.d_grid)?;
    let scan = length_scan(&data, measure, &t_grid, &d_grid)?;
    write_file(&args.out, &scan.to_csv_string())?;
    if !quiet {
        println!(
            "scanned {} cells over N = {}",
            scan.cells().len(),
            data.n_speakers()
        );
    }
    Ok(())
}

fn cmd_per_speaker(args: PerSpeakerArgs, quiet: bool) -> CliResult<()> {
    let data = load_observations(&args.features)?;
    let measure = resolve_measure(args.measure, data.kind())?;
    let per = per_speaker_histograms(&data, measure, args.test_len, args.db_len)?;
    // sparse per-speaker histograms are fitted with the plain likelihood;
    // the constrained variant is unreliable when the rank-1 bin is empty
    let spec = LossSpec::new(LossKind::Ll);
    let options = FitOptions::default();
    let mut rows = String::from("speaker,alpha,beta,mean_disclosure_bits\n");
    let mut means = Vec::with_capacity(per.len());
    for (speaker, hist) in &per {
        let emp = normalize(hist)?;
        let result = fit(&emp, &spec, &options)?;
        let mean = model_disclosure_stats(&result.model)?.mean_disclosure_bits;
        rows.push_str(&format!(
            "{speaker},{},{},{}\n",
            result.model.alpha(),
            result.model.beta(),
            mean
        ));
        means.push(mean);
    }
    let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let variance = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / means.len() as f64;
    let std = variance.sqrt();
    // summary row columns hold max, mean, std of the per-speaker means
    rows.push_str(&format!("summary,{max},{mean},{std}\n"));
    write_file(&args.out, &rows)?;
    if !quiet {
        println!("mean_disclosure max = {max:.4}");
        println!("mean_disclosure mean = {mean:.4}");
        println!("mean_disclosure std = {std:.4}");
    }
    Ok(())
}
