use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use mvdlm::dlm::missing_time_correlations;
use mvdlm::simulate::{replicate_experiment, run_replication, ExperimentSummary};
use mvdlm::{correlation_estimate, filter, msse, FilterOutput, UpdateMode};

use crate::config::{ModeSelection, RunConfig};
use crate::csvio::{column_name, format_number, format_value, parse_csv, write_observations};
use crate::error::{CliError, CliResult};

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub mode: UpdateMode,
    pub msse: Vec<f64>,
    pub mean_missing_corr: Option<f64>,
}

impl SummaryRow {
    pub fn from_output(output: &FilterOutput) -> CliResult<Self> {
        let msse = msse(output).map_err(|e| CliError::Data {
            row: output.len(),
            column: None,
            message: format!("cannot compute MSSE: {e}"),
        })?;
        let corrs = missing_time_correlations(output).map_err(CliError::Numerical)?;
        let mean_missing_corr = (!corrs.is_empty())
            .then(|| corrs.iter().map(|c| c.3).sum::<f64>() / corrs.len() as f64);
        Ok(Self {
            mode: output.mode,
            msse,
            mean_missing_corr,
        })
    }
}

fn format_summary_number(x: f64) -> String {
    if x.abs() < 1e6 {
        format!("{x:.6}")
    } else {
        format!("{x:.6e}")
    }
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let p = rows.first().map_or(0, |r| r.msse.len());
    let mut header = vec!["mode".to_string()];
    header.extend((1..=p).map(|j| format!("msse_{j}")));
    header.push("mean_missing_corr".into());
    let mut table = vec![header];
    for row in rows {
        let mut cells = vec![row.mode.to_string()];
        cells.extend(row.msse.iter().map(|m| format_summary_number(*m)));
        cells.push(
            row.mean_missing_corr
                .map_or_else(|| "NA".into(), format_summary_number),
        );
        table.push(cells);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

/// Per-time records for one or more filter runs, one CSV row per mode and
/// time step. Missing observations and residuals are written as `NA`.
pub fn write_records<W: Write>(writer: W, outputs: &[FilterOutput]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let Some(first) = outputs.first().and_then(|o| o.steps.first()) else {
        return Ok(());
    };
    let (r, p) = (first.observation.replicates(), first.observation.dim());
    let entries: Vec<(usize, usize)> = (0..r).flat_map(|k| (0..p).map(move |j| (j, k))).collect();
    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|i| ((i + 1)..p).map(move |j| (i, j)))
        .collect();

    let mut header = vec!["mode".to_string(), "t".to_string()];
    for prefix in ["y", "f", "e"] {
        header.extend(entries.iter().map(|&(j, k)| column_name(prefix, j, k, r)));
    }
    header.extend((1..=r).map(|k| format!("q{k}")));
    header.extend((1..=p).map(|j| format!("s{j}_{j}")));
    header.extend(pairs.iter().map(|(i, j)| format!("s{}_{}", i + 1, j + 1)));
    header.extend((1..=p).map(|j| format!("n{j}")));
    header.extend(
        pairs
            .iter()
            .map(|(i, j)| format!("corr{}_{}", i + 1, j + 1)),
    );
    wtr.write_record(&header)?;

    for output in outputs {
        for rec in &output.steps {
            let obs = &rec.observation;
            let s = rec.posterior.miw.scale().as_matrix();
            let mut row = vec![output.mode.to_string(), rec.t.to_string()];
            row.extend(entries.iter().map(|&(j, k)| format_value(obs.get(k, j))));
            row.extend(
                entries
                    .iter()
                    .map(|&(j, k)| format_number(rec.forecast.f[(k, j)])),
            );
            row.extend(
                entries.iter().map(|&(j, k)| {
                    format_value(obs.is_observed(k, j).then(|| rec.residual[(k, j)]))
                }),
            );
            row.extend((0..r).map(|k| format_number(rec.forecast.q.as_matrix()[(k, k)])));
            row.extend((0..p).map(|j| format_number(s[(j, j)])));
            row.extend(pairs.iter().map(|&(i, j)| format_number(s[(i, j)])));
            row.extend(
                rec.posterior
                    .miw
                    .dof()
                    .as_slice()
                    .iter()
                    .map(|&n| format_number(n)),
            );
            row.extend(
                pairs
                    .iter()
                    .map(|&(i, j)| format_value(correlation_estimate(&rec.posterior, i, j).ok())),
            );
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        other => CliError::io(path, io::Error::other(format!("{other:?}"))),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone)]
pub struct FilterArgs {
    pub config: PathBuf,
    pub data: Option<PathBuf>,
    pub mode: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct FilterReport {
    pub outputs: Vec<FilterOutput>,
    pub summary: Vec<SummaryRow>,
}

/// Runs the filter in the requested modes. Command-line values take
/// precedence over the `[io]` block.
pub fn run_filter(args: &FilterArgs) -> CliResult<FilterReport> {
    let cfg = RunConfig::load(&args.config)?;
    let model = cfg.model()?;
    let prior = cfg.prior(&model)?;
    let modes = match &args.mode {
        Some(m) => ModeSelection::parse(m)?,
        None => cfg.mode()?,
    };
    let data_path = args
        .data
        .clone()
        .or_else(|| cfg.io.data.clone())
        .ok_or_else(|| CliError::config("no data file: pass --data or set io.data"))?;
    let table = parse_csv(&data_path)?;
    if (table.replicates, table.dim) != (model.replicates(), model.obs_dim()) {
        return Err(CliError::Data {
            row: 0,
            column: None,
            message: format!(
                "columns describe {} replicate(s) of {} variable(s); the model expects r = {}, p = {}",
                table.replicates,
                table.dim,
                model.replicates(),
                model.obs_dim()
            ),
        });
    }

    let outputs = modes
        .modes()
        .into_iter()
        .map(|mode| filter(&model, &table.rows, &prior, mode).map_err(CliError::Numerical))
        .collect::<CliResult<Vec<_>>>()?;
    let summary = outputs
        .iter()
        .map(SummaryRow::from_output)
        .collect::<CliResult<Vec<_>>>()?;
    Ok(FilterReport { outputs, summary })
}

/// `filter` subcommand: records go to `--out` (or stdout), the summary table
/// to stdout (or stderr when records occupy stdout).
pub fn cmd_filter(args: &FilterArgs) -> CliResult<()> {
    let report = run_filter(args)?;
    let out = match &args.out {
        Some(p) => Some(p.clone()),
        None => RunConfig::load(&args.config)?.io.out,
    };
    let summary = format_summary(&report.summary);
    match out {
        Some(path) => {
            write_records(create(&path)?, &report.outputs).map_err(|e| csv_err(&path, e))?;
            print!("{summary}");
        }
        None => {
            write_records(io::stdout().lock(), &report.outputs)
                .map_err(|e| csv_err(Path::new("<stdout>"), e))?;
            eprint!("{summary}");
        }
    }
    Ok(())
}

#[derive(Debug)]
pub struct SimulateReport {
    pub summary: ExperimentSummary,
    pub table: String,
}

pub fn format_experiment(summary: &ExperimentSummary) -> String {
    let rows = [
        SummaryRow {
            mode: UpdateMode::New,
            msse: summary.mean_msse_new.clone(),
            mean_missing_corr: summary.mean_missing_corr_new,
        },
        SummaryRow {
            mode: UpdateMode::Classical,
            msse: summary.mean_msse_classical.clone(),
            mean_missing_corr: summary.mean_missing_corr_classical,
        },
    ];
    let mut out = format_summary(&rows);
    let _ = writeln!(out);
    let _ = writeln!(out, "replications        {}", summary.replications.len());
    let _ = writeln!(out, "win_fraction        {:.6}", summary.win_fraction);
    for (j, w) in summary.component_win_fraction.iter().enumerate() {
        let _ = writeln!(out, "win_fraction_{}      {w:.6}", j + 1);
    }
    out
}

fn write_replications(path: &Path, summary: &ExperimentSummary) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(create(path)?);
    let p = summary.mean_msse_new.len();
    let mut header = vec!["replication".to_string(), "seed".to_string()];
    header.extend((1..=p).map(|j| format!("msse_new_{j}")));
    header.extend((1..=p).map(|j| format!("msse_classical_{j}")));
    header.extend(["corr_new", "corr_classical", "new_wins"].map(String::from));
    wtr.write_record(&header).map_err(|e| csv_err(path, e))?;
    for r in &summary.replications {
        let mut row = vec![r.index.to_string(), r.seed.to_string()];
        row.extend(
            r.msse_new
                .iter()
                .chain(&r.msse_classical)
                .map(|&m| format_number(m)),
        );
        row.push(format_value(r.missing_corr_new));
        row.push(format_value(r.missing_corr_classical));
        row.push(r.new_wins().to_string());
        wtr.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    wtr.flush().map_err(|e| CliError::io(path, e))
}

/// `simulate` subcommand. Writes into `out_dir`:
/// `data.csv` and `levels.csv` for the first replication, `forecasts.csv`
/// with its per-time records in both modes, `replications.csv` and
/// `summary.txt`.
pub fn run_simulate(config: &Path, out_dir: &Path) -> CliResult<SimulateReport> {
    let cfg = RunConfig::load(config)?;
    let sim = cfg.simulate_block()?;
    let (gen, pattern, setup) = cfg.experiment()?;
    let summary = replicate_experiment(sim.replications, &gen, &pattern, &setup)
        .map_err(CliError::Numerical)?;
    let first = run_replication(&gen, &pattern, &setup).map_err(|e| {
        CliError::Numerical(mvdlm::Error::AtReplication {
            index: 0,
            source: Box::new(e),
        })
    })?;

    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let path = out_dir.join("data.csv");
    write_observations(create(&path)?, &first.observations).map_err(|e| csv_err(&path, e))?;

    let path = out_dir.join("levels.csv");
    let mut wtr = csv::Writer::from_writer(create(&path)?);
    wtr.write_record(["t", "level1", "level2"])
        .map_err(|e| csv_err(&path, e))?;
    let levels = &first.series.levels;
    for t in 0..levels.rows() {
        wtr.write_record([
            (t + 1).to_string(),
            format_number(levels[(t, 0)]),
            format_number(levels[(t, 1)]),
        ])
        .map_err(|e| csv_err(&path, e))?;
    }
    wtr.flush().map_err(|e| CliError::io(&path, e))?;

    let path = out_dir.join("forecasts.csv");
    write_records(create(&path)?, &[first.new, first.classical]).map_err(|e| csv_err(&path, e))?;

    write_replications(&out_dir.join("replications.csv"), &summary)?;
    let table = format_experiment(&summary);
    let path = out_dir.join("summary.txt");
    fs::write(&path, &table).map_err(|e| CliError::io(&path, e))?;
    Ok(SimulateReport { summary, table })
}

pub fn cmd_simulate(config: &Path, out_dir: &Path) -> CliResult<()> {
    let report = run_simulate(config, out_dir)?;
    print!("{}", report.table);
    Ok(())
}
