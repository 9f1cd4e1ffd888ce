//! Command-line surface: validate, front, ladder, compare, synth, report.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 parse/validation, 5 computation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::Error;
use crate::ladder::{
    build_ladder, default_fixed_pairs, ladder_default, ladder_dynres, ladder_fixed,
    ladder_time_capped, Ladder,
};
use crate::metrics::{compare, write_report_csv, ComparisonReport};
use crate::model::{
    parse_measurements, validate_space, write_measurements, ParameterSpace, ParseOptions,
    QualityMetricKey, TargetBitrateSet,
};
use crate::objective::{JqtParams, MParams};
use crate::pareto::{front_jqt, front_jrqt};
use crate::synth::SynthProfile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_COMPUTE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "rqt-ladder", version, about = "Bitrate ladder optimization over rate-quality-decoding-time measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Jqt,
    Jrqt,
    JrqtNonmono,
    Fixed,
    Default,
    Dynres,
    Timecap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Psnr,
    Xpsnr,
    Vmaf,
}

impl From<MetricArg> for QualityMetricKey {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Psnr => Self::Psnr,
            MetricArg::Xpsnr => Self::Xpsnr,
            MetricArg::Vmaf => Self::Vmaf,
        }
    }
}

/// Optional config file; explicit flags win over its values.
#[derive(Debug, Clone, Default, Deserialize)]
struct FileConfig {
    metric: Option<QualityMetricKey>,
    strategy: Option<String>,
    alpha: Option<f64>,
    tau_limit: Option<f64>,
    targets: Option<Vec<f64>>,
    pairs: Option<PathBuf>,
    strict: Option<bool>,
}

#[derive(Debug, Args, Clone)]
struct RunFlags {
    /// Quality metric playing the role of v.
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    /// Ladder/front construction strategy.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// alpha_j (jqt) or alpha_m (jrqt / jrqt-nonmono).
    #[arg(long)]
    alpha: Option<f64>,
    /// Decode-time cap in seconds (timecap only).
    #[arg(long)]
    tau_limit: Option<f64>,
    /// Comma-separated target bitrates in kbps.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    /// CSV of target_kbps,resolution pairs (fixed only).
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Reject (resolution, qp) pairs outside the standard grid.
    #[arg(long)]
    strict: bool,
    /// JSON config file supplying any of the above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Only process these sequence ids (repeatable).
    #[arg(long = "sequence")]
    sequences: Vec<String>,
    /// Worker threads for per-sequence processing (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a measurement CSV and report validation findings.
    Validate {
        input: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Extract per-sequence Pareto fronts and write them as JSON.
    Front {
        input: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build per-sequence ladders and write them as JSON.
    Ladder {
        input: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare method ladders against reference ladders (BD metrics, delta T_D).
    Compare {
        /// Directory of method ladder JSON files.
        #[arg(long)]
        method: PathBuf,
        /// Directory of reference ladder JSON files.
        #[arg(long)]
        reference: PathBuf,
        /// Output prefix; writes <out>.json and <out>.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic measurement corpus as CSV.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        spatial_complexity: Option<f64>,
        #[arg(long)]
        temporal_complexity: Option<f64>,
        #[arg(long)]
        luminance: Option<f64>,
        #[arg(long)]
        time_energy_slope: Option<f64>,
        #[arg(long)]
        noise_level: Option<f64>,
    },
    /// Emit plot-data CSVs from comparison reports and ladder directories.
    Report {
        /// Comparison report JSON files (tradeoff scatter input).
        #[arg(long = "compare", num_args = 1..)]
        compares: Vec<PathBuf>,
        /// Ladder directory for per-rung tables and histograms.
        #[arg(long)]
        ladders: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        Error::MalformedRow { .. }
        | Error::DuplicatePoint { .. }
        | Error::OutOfGrid { .. }
        | Error::InvalidParameter(_)
        | Error::UnmappedTarget(_) => EXIT_VALIDATION,
        _ => EXIT_COMPUTE,
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

struct Resolved {
    metric: QualityMetricKey,
    strategy: StrategyArg,
    alpha: f64,
    tau_limit: Option<f64>,
    targets: TargetBitrateSet,
    pairs: Vec<(f64, u32)>,
    strict: bool,
}

fn load_pairs(path: &Path) -> Result<Vec<(f64, u32)>, Error> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut pairs = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let row = idx + 2;
        let target: f64 = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedRow {
                row,
                message: "cannot parse target_kbps".into(),
            })?;
        let resolution: u32 = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedRow {
                row,
                message: "cannot parse resolution".into(),
            })?;
        pairs.push((target, resolution));
    }
    Ok(pairs)
}

fn resolve(flags: &RunFlags) -> Result<Resolved, Error> {
    let file: FileConfig = match &flags.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => FileConfig::default(),
    };

    let strategy = match (flags.strategy, file.strategy.as_deref()) {
        (Some(s), _) => s,
        (None, Some(s)) => match s {
            "jqt" => StrategyArg::Jqt,
            "jrqt" => StrategyArg::Jrqt,
            "jrqt-nonmono" => StrategyArg::JrqtNonmono,
            "fixed" => StrategyArg::Fixed,
            "default" => StrategyArg::Default,
            "dynres" => StrategyArg::Dynres,
            "timecap" => StrategyArg::Timecap,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown strategy '{other}' in config"
                )))
            }
        },
        (None, None) => {
            return Err(Error::InvalidParameter(
                "--strategy is required (flag or config)".into(),
            ))
        }
    };

    let metric = flags
        .metric
        .map(QualityMetricKey::from)
        .or(file.metric)
        .unwrap_or(QualityMetricKey::Xpsnr);

    let alpha = flags.alpha.or(file.alpha).unwrap_or(match strategy {
        StrategyArg::Jqt => 2.5,
        _ => 0.75,
    });

    let targets = match flags.targets.clone().or(file.targets) {
        Some(t) => TargetBitrateSet::new(t)?,
        None => TargetBitrateSet::default_targets(),
    };

    let pairs = match flags.pairs.clone().or(file.pairs) {
        Some(path) => load_pairs(&path)?,
        None => default_fixed_pairs(),
    };

    Ok(Resolved {
        metric,
        strategy,
        alpha,
        tau_limit: flags.tau_limit.or(file.tau_limit),
        targets,
        pairs,
        strict: flags.strict || file.strict.unwrap_or(false),
    })
}

fn read_spaces(input: &Path, strict: bool) -> Result<Vec<ParameterSpace>, Error> {
    let text = fs::read_to_string(input)?;
    parse_measurements(
        &text,
        &ParseOptions {
            strict,
            ..Default::default()
        },
    )
}

fn filter_spaces(spaces: Vec<ParameterSpace>, wanted: &[String]) -> Vec<ParameterSpace> {
    if wanted.is_empty() {
        spaces
    } else {
        spaces
            .into_iter()
            .filter(|s| wanted.iter().any(|w| w == &s.sequence_id))
            .collect()
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn build_one_ladder(space: &ParameterSpace, cfg: &Resolved) -> Result<Ladder, Error> {
    match cfg.strategy {
        StrategyArg::Jqt => {
            let front = front_jqt(space, cfg.metric, JqtParams::new(cfg.alpha)?)?;
            build_ladder(&front, &cfg.targets, true)
        }
        StrategyArg::Jrqt => {
            let front = front_jrqt(space, cfg.metric, MParams::new(cfg.alpha)?)?;
            build_ladder(&front, &cfg.targets, true)
        }
        StrategyArg::JrqtNonmono => {
            let front = front_jrqt(space, cfg.metric, MParams::new(cfg.alpha)?)?;
            build_ladder(&front, &cfg.targets, false)
        }
        StrategyArg::Fixed => ladder_fixed(space, &cfg.targets, &cfg.pairs, cfg.metric),
        StrategyArg::Default => ladder_default(space, &cfg.targets, cfg.metric),
        StrategyArg::Dynres => ladder_dynres(space, &cfg.targets, cfg.metric),
        StrategyArg::Timecap => {
            let cap = cfg.tau_limit.ok_or_else(|| {
                Error::InvalidParameter("--tau-limit is required for timecap".into())
            })?;
            ladder_time_capped(space, &cfg.targets, cfg.metric, cap)
        }
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn read_ladder_dir(dir: &Path) -> Result<Vec<Ladder>, Error> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    entries.sort();
    entries
        .iter()
        .map(|p| Ok(serde_json::from_str(&fs::read_to_string(p)?)?))
        .collect()
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Validate { input, strict } => {
            let spaces = read_spaces(&input, strict)?;
            let mut warnings = 0usize;
            for space in &spaces {
                let report = validate_space(space);
                for finding in &report.findings {
                    println!(
                        "{}: {:?}: {}",
                        report.sequence_id, finding.severity, finding.message
                    );
                    warnings += 1;
                }
            }
            println!(
                "{} sequences, {} points, {} findings",
                spaces.len(),
                spaces.iter().map(|s| s.points.len()).sum::<usize>(),
                warnings
            );
            Ok(EXIT_OK)
        }

        Command::Front { input, flags, out } => {
            let cfg = resolve(&flags)?;
            let spaces = filter_spaces(read_spaces(&input, cfg.strict)?, &flags.sequences);
            if spaces.is_empty() {
                eprintln!("warning: no sequences matched; no output written");
                return Ok(EXIT_OK);
            }
            let pool = thread_pool(flags.workers)?;
            let fronts: Vec<Result<_, Error>> = pool.install(|| {
                spaces
                    .par_iter()
                    .map(|space| {
                        let front = match cfg.strategy {
                            StrategyArg::Jqt => {
                                front_jqt(space, cfg.metric, JqtParams::new(cfg.alpha)?)?
                            }
                            StrategyArg::Jrqt | StrategyArg::JrqtNonmono => {
                                front_jrqt(space, cfg.metric, MParams::new(cfg.alpha)?)?
                            }
                            _ => {
                                return Err(Error::InvalidParameter(
                                    "front requires --strategy jqt or jrqt".into(),
                                ))
                            }
                        };
                        Ok((space.sequence_id.clone(), front.export_rows()))
                    })
                    .collect()
            });
            for result in fronts {
                let (id, rows) = result?;
                write_json(&out.join(format!("front_{id}.json")), &rows)?;
            }
            Ok(EXIT_OK)
        }

        Command::Ladder { input, flags, out } => {
            let cfg = resolve(&flags)?;
            let spaces = filter_spaces(read_spaces(&input, cfg.strict)?, &flags.sequences);
            if spaces.is_empty() {
                eprintln!("warning: no sequences matched; no output written");
                return Ok(EXIT_OK);
            }
            let pool = thread_pool(flags.workers)?;
            let ladders: Vec<Result<Ladder, Error>> = pool.install(|| {
                spaces
                    .par_iter()
                    .map(|space| build_one_ladder(space, &cfg))
                    .collect()
            });
            for result in ladders {
                let ladder = result?;
                write_json(&out.join(format!("ladder_{}.json", ladder.sequence_id)), &ladder)?;
            }
            Ok(EXIT_OK)
        }

        Command::Compare {
            method,
            reference,
            out,
        } => {
            let method_ladders = read_ladder_dir(&method)?;
            let reference_ladders = read_ladder_dir(&reference)?;
            let mut report = compare(&method_ladders, &reference_ladders)?;
            if let Some(first) = method_ladders.first() {
                report.strategy = serde_json::to_value(first.strategy)?
                    .as_str()
                    .map(String::from);
                report.alpha = first.alpha;
            }
            write_json(&out.with_extension("json"), &report)?;
            let file = fs::File::create(out.with_extension("csv"))?;
            write_report_csv(&report, file)?;
            Ok(EXIT_OK)
        }

        Command::Synth {
            seed,
            count,
            out,
            spatial_complexity,
            temporal_complexity,
            luminance,
            time_energy_slope,
            noise_level,
        } => {
            let mut spaces = Vec::with_capacity(count as usize);
            for i in 0..count {
                let mut profile = SynthProfile::for_sequence(seed, i);
                if let Some(v) = spatial_complexity {
                    profile.spatial_complexity = v;
                }
                if let Some(v) = temporal_complexity {
                    profile.temporal_complexity = v;
                }
                if let Some(v) = luminance {
                    profile.luminance = v;
                }
                if let Some(v) = time_energy_slope {
                    profile.time_energy_slope = v;
                }
                if let Some(v) = noise_level {
                    profile.noise_level = v;
                }
                spaces.push(crate::synth::generate_space(&profile)?);
            }
            if let Some(parent) = out.parent() {
                fs::create_dir_all(parent)?;
            }
            let file = fs::File::create(&out)?;
            write_measurements(&spaces, file)?;
            Ok(EXIT_OK)
        }

        Command::Report {
            compares,
            ladders,
            out,
        } => {
            if compares.is_empty() && ladders.is_none() {
                return Err(Error::InvalidParameter(
                    "report needs --compare files and/or a --ladders directory".into(),
                ));
            }
            fs::create_dir_all(&out)?;

            if !compares.is_empty() {
                let mut rows = Vec::new();
                for path in &compares {
                    let report: ComparisonReport =
                        serde_json::from_str(&fs::read_to_string(path)?)?;
                    rows.push((
                        report.alpha,
                        report.strategy.clone().unwrap_or_default(),
                        report.aggregate.bdr_xpsnr.map(|a| a.mean),
                        report.aggregate.delta_t_d.map(|a| a.mean),
                    ));
                }
                rows.sort_by(|a, b| {
                    a.0.unwrap_or(f64::NAN)
                        .total_cmp(&b.0.unwrap_or(f64::NAN))
                        .then_with(|| a.1.cmp(&b.1))
                });
                let mut w = csv::Writer::from_path(out.join("tradeoff.csv"))?;
                w.write_record(["strategy", "alpha", "mean_bdr_xpsnr_pct", "mean_delta_t_d_pct"])?;
                for (alpha, strategy, bdr, dtd) in rows {
                    w.write_record([
                        strategy,
                        alpha.map(|a| a.to_string()).unwrap_or_default(),
                        bdr.map(|v| v.to_string()).unwrap_or_default(),
                        dtd.map(|v| v.to_string()).unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
            }

            if let Some(dir) = ladders {
                let ladders = read_ladder_dir(&dir)?;
                if ladders.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "no ladder JSON files in {}",
                        dir.display()
                    )));
                }

                let mut w = csv::Writer::from_path(out.join("ladder_rungs.csv"))?;
                w.write_record([
                    "sequence_id",
                    "strategy",
                    "target_kbps",
                    "achieved_kbps",
                    "resolution",
                    "qp",
                    "quality",
                    "decode_time_s",
                    "carried",
                ])?;
                for ladder in &ladders {
                    let strategy = serde_json::to_value(ladder.strategy)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string();
                    for rung in &ladder.rungs {
                        w.write_record([
                            ladder.sequence_id.clone(),
                            strategy.clone(),
                            rung.target_kbps.to_string(),
                            rung.achieved_kbps.to_string(),
                            rung.resolution.to_string(),
                            rung.qp.to_string(),
                            rung.quality.to_string(),
                            rung.decode_time_s.to_string(),
                            rung.carried.to_string(),
                        ])?;
                    }
                }
                w.flush()?;

                // decode-time distribution over all rungs, fixed 4 s bins
                let edges: Vec<f64> = (0..=16).map(|i| 4.0 * i as f64).collect();
                let mut counts = vec![0usize; edges.len()]; // last bin = overflow
                for ladder in &ladders {
                    for rung in &ladder.rungs {
                        let bin = edges
                            .windows(2)
                            .position(|w| rung.decode_time_s >= w[0] && rung.decode_time_s < w[1])
                            .unwrap_or(edges.len() - 1);
                        counts[bin] += 1;
                    }
                }
                let mut hist = String::new();
                hist.push_str(&format!(
                    "# bin_edges_s={}\n",
                    edges
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ));
                hist.push_str("bin_lo_s,bin_hi_s,count\n");
                for (i, count) in counts.iter().enumerate() {
                    let lo = edges[i.min(edges.len() - 1)];
                    let hi = if i + 1 < edges.len() {
                        edges[i + 1].to_string()
                    } else {
                        "inf".to_string()
                    };
                    hist.push_str(&format!("{lo},{hi},{count}\n"));
                }
                fs::write(out.join("decode_time_hist.csv"), hist)?;
            }
            Ok(EXIT_OK)
        }
    }
}
