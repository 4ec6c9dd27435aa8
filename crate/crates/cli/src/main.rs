//! `doilab`: verification suites, symbol tables, transference demos,
//! constant sweeps and weak-type batches from the command line.
//!
//! All outputs are deterministic for a fixed seed and configuration:
//! records are stamped with a zero timestamp before writing so reruns are
//! byte-identical. `DOILAB_THREADS` caps the worker pool used by sweeps.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use doilab_core::experiments::{
    weak_type_experiment, ExperimentRecord, SweepConfig, SweepOutcome,
};
use doilab_core::doi::LipschitzFunction;
use doilab_core::matrix::{CMat, ComplexMatrix, C64};
use doilab_core::sampling;
use doilab_core::spectral::SpectralTuple;
use doilab_core::suite::{run_all, SuiteConfig};
use doilab_core::symbols::{
    cone_region, eval_k, eval_m1j, eval_mj, eval_r, mj_region, BumpProfile,
};
use doilab_core::transference::{check_transference, GridFunction, TrigPolynomial};
use rand::Rng;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "doilab", version, about = "Double operator integral laboratory")]
struct Cli {
    /// Base seed for all randomized content.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Tolerance scale applied to the verification gates.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every identity and property suite; nonzero exit on failure.
    Verify {
        /// Dimension cap for the randomized module checks.
        #[arg(long, default_value_t = 16)]
        dim: usize,
    },
    /// Dump the multiplier symbol tables to `symbols.csv`.
    Symbols {
        /// Grid step for each coordinate.
        #[arg(long, default_value_t = 0.25)]
        grid: f64,
        /// Half-width of the sampled cube.
        #[arg(long, default_value_t = 4.0)]
        grid_max: f64,
        /// Number of first-block coordinates.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Run transference demos and emit coefficient tables as JSON.
    Transfer {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Grid resolution (eigenvalues live on the 1/m lattice).
        #[arg(long, default_value_t = 4)]
        resolution: u32,
        /// Value denominator of the snapped grid data.
        #[arg(long, default_value_t = 8)]
        denominator: u32,
        /// Number of seeded demo instances.
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Ratio sweep over ensembles; writes `results.jsonl` and `summary.csv`.
    Sweep {
        /// JSON file holding the full sweep configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        ensembles: Option<Vec<String>>,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Weak-type experiment batch; writes `results.jsonl` and `summary.csv`.
    Weak {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    if let Ok(threads) = std::env::var("DOILAB_THREADS") {
        let threads: usize = threads
            .parse()
            .context("DOILAB_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("DOILAB_THREADS must be a positive integer");
        }
        // Ignore the error if a pool already exists (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let cli = Cli::parse();
    match cli.command {
        Command::Verify { dim } => {
            let cfg = SuiteConfig {
                seed: cli.seed,
                dim,
                tol_scale: cli.tol,
            };
            let reports = run_all(&cfg);
            let mut ok = true;
            for report in &reports {
                println!("{}", report.line());
                ok &= report.passed;
            }
            if ok {
                println!("verify: all {} checks passed", reports.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verify: FAILURES present");
                Ok(ExitCode::from(1))
            }
        }
        Command::Symbols { grid, grid_max, n } => {
            if !(grid > 0.0) || !(grid_max > 0.0) {
                bail!("grid step and width must be positive");
            }
            if n == 0 {
                bail!("need at least one coordinate");
            }
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("symbols.csv");
            write_symbol_table(&path, grid, grid_max, n)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Transfer {
            n,
            dim,
            resolution,
            denominator,
            count,
        } => {
            if n == 0 || dim < 2 {
                bail!("need n >= 1 and dim >= 2");
            }
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("transfer.json");
            let worst = write_transfer_demos(
                &path,
                cli.seed,
                n,
                dim,
                resolution,
                denominator,
                count,
            )?;
            println!("wrote {} (worst max_error {worst:.3e})", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            config,
            p_grid,
            dims,
            seeds,
            ensembles,
            n,
        } => {
            let config = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<SweepConfig>(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => SweepConfig {
                    p_grid: p_grid.unwrap_or_else(|| vec![1.25, 2.0, 4.0, 8.0]),
                    dims: dims.unwrap_or_else(|| vec![8, 16]),
                    seeds: seeds.unwrap_or_else(|| (0..cli.seed.max(1)).collect()),
                    ensembles: ensembles
                        .unwrap_or_else(|| vec!["commuting-gaussian".into(), "extremal-abs".into()]),
                    n,
                },
            };
            config
                .validate()
                .map_err(|err| anyhow::anyhow!("{err}"))?;
            let outcome = doilab_core::experiments::constant_sweep(&config)
                .map_err(|err| anyhow::anyhow!("{err}"))?;
            fs::create_dir_all(&cli.out)?;
            write_sweep_outputs(&cli.out, &outcome)?;
            println!(
                "wrote {} records, fitted c = {}",
                outcome.records.len(),
                outcome.fitted_c
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Weak { n, dim, count } => {
            if n == 0 || dim < 2 {
                bail!("need n >= 1 and dim >= 2");
            }
            let mut records = Vec::with_capacity(count);
            for index in 0..count {
                let seed = cli.seed.wrapping_add(index as u64);
                let mut rng = sampling::rng_from_seed(seed);
                let (_, tuple) = sampling::random_commuting_tuple(n, dim, -1.5, 1.5, &mut rng);
                let x = sampling::ginibre(dim, &mut rng);
                let f = weak_function(n, index);
                let mut record = weak_type_experiment(&f, &tuple, &x)
                    .map_err(|err| anyhow::anyhow!("{err}"))?;
                record.params.seed = seed;
                record.params.ensemble = "commuting-gaussian".into();
                records.push(record);
            }
            fs::create_dir_all(&cli.out)?;
            write_records(&cli.out.join("results.jsonl"), &records)?;
            write_summary(&cli.out.join("summary.csv"), &records, None)?;
            println!("wrote {} weak-type records", records.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn weak_function(n: usize, index: usize) -> LipschitzFunction {
    match index % 3 {
        0 => LipschitzFunction::new(n, "abs-first", 1.0, |xi: &[f64]| xi[0].abs()),
        1 => LipschitzFunction::new(n, "max-coord", 1.0, |xi: &[f64]| {
            xi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        }),
        _ => LipschitzFunction::new(n, "soft-l1", 1.0, |xi: &[f64]| {
            let s: f64 = xi.iter().sum();
            (1.0 + s * s).sqrt() - 1.0
        }),
    }
}

fn write_symbol_table(path: &Path, step: f64, half_width: f64, n: usize) -> Result<()> {
    let bump = BumpProfile::shared();
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = vec!["symbol".into(), "j".into()];
    for axis in 1..=n {
        header.push(format!("xi{axis}"));
    }
    header.extend(["mu".into(), "value_re".into(), "value_im".into(), "region".into()]);
    writer.write_record(&header)?;

    let steps = (half_width / step).floor() as i64;
    let axis: Vec<f64> = (-steps..=steps).map(|i| i as f64 * step).collect();
    let mut index = vec![0usize; n + 1];
    let total = axis.len().pow((n + 1) as u32);
    let mut xi = vec![0.0; n];
    for _ in 0..total {
        for (slot, &i) in index.iter().take(n).enumerate() {
            xi[slot] = axis[i];
        }
        let mu = axis[index[n]];
        let origin = mu == 0.0 && xi.iter().all(|&v| v == 0.0);
        if !origin {
            let mut emit = |symbol: &str, j: usize, value: C64, region: &str| -> Result<()> {
                let mut row: Vec<String> =
                    vec![symbol.to_string(), if j == 0 { String::new() } else { j.to_string() }];
                row.extend(xi.iter().map(|v| v.to_string()));
                row.push(mu.to_string());
                row.push(value.re.to_string());
                row.push(value.im.to_string());
                row.push(region.to_string());
                writer.write_record(&row)?;
                Ok(())
            };
            emit("k", 0, eval_k(&xi, mu), cone_region(&xi, mu))?;
            emit("r", 0, eval_r(&xi, mu), cone_region(&xi, mu))?;
            for j in 1..=n {
                emit("m1", j, eval_m1j(j, &xi, mu), cone_region(&xi, mu))?;
                emit("m", j, eval_mj(j, &xi, mu, &bump), mj_region(&xi, mu))?;
            }
        }
        // advance the multi-index
        let mut slot = 0;
        while slot <= n {
            index[slot] += 1;
            if index[slot] < axis.len() {
                break;
            }
            index[slot] = 0;
            slot += 1;
        }
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CoefficientDump {
    freq: Vec<i64>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct TransferDump {
    seed: u64,
    n: usize,
    d: usize,
    resolution: u32,
    denominator: u32,
    j: usize,
    max_error: f64,
    lhs: Vec<CoefficientDump>,
    rhs: Vec<CoefficientDump>,
}

fn dump_polynomial(h: &TrigPolynomial) -> Vec<CoefficientDump> {
    h.coeffs()
        .map(|(freq, mat)| {
            let d = mat.dim();
            let re = (0..d)
                .map(|r| (0..d).map(|c| mat.get(r, c).re).collect())
                .collect();
            let im = (0..d)
                .map(|r| (0..d).map(|c| mat.get(r, c).im).collect())
                .collect();
            CoefficientDump {
                freq: freq.clone(),
                re,
                im,
            }
        })
        .collect()
}

fn write_transfer_demos(
    path: &Path,
    base_seed: u64,
    n: usize,
    dim: usize,
    resolution: u32,
    denominator: u32,
    count: usize,
) -> Result<f64> {
    let bump = BumpProfile::shared();
    let mut dumps = Vec::with_capacity(count);
    let mut worst = 0.0f64;
    for index in 0..count {
        let seed = base_seed.wrapping_add(index as u64);
        let mut rng = sampling::rng_from_seed(seed);
        let bins: Vec<Vec<i64>> = (0..dim)
            .map(|_| {
                (0..n)
                    .map(|_| rng.gen_range(-(2 * resolution as i64)..2 * resolution as i64))
                    .collect()
            })
            .collect();
        let basis = sampling::random_unitary(dim, &mut rng);
        let eigs: Vec<Vec<f64>> = bins
            .iter()
            .map(|bin| bin.iter().map(|&k| k as f64 / resolution as f64).collect())
            .collect();
        let tuple = SpectralTuple::from_parts(basis, eigs)
            .map_err(|err| anyhow::anyhow!("{err}"))?;
        let g = GridFunction::sample_lipschitz(&bins, resolution, denominator, &mut rng);
        let mut in_basis = CMat::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                if bins[a] != bins[b] {
                    in_basis[(a, b)] =
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        let y = tuple.from_eigenbasis(&ComplexMatrix::new(in_basis)?);
        let j = 1 + index % n;
        let check = check_transference(&tuple, &g, &y, j, bump.clone())
            .map_err(|err| anyhow::anyhow!("{err}"))?;
        worst = worst.max(check.max_error);
        dumps.push(TransferDump {
            seed,
            n,
            d: dim,
            resolution,
            denominator,
            j,
            max_error: check.max_error,
            lhs: dump_polynomial(&check.lhs),
            rhs: dump_polynomial(&check.rhs),
        });
    }
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &dumps)?;
    file.write_all(b"\n")?;
    Ok(worst)
}

fn write_records(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    for record in records {
        // Zero timestamp: reruns with the same seed stay byte-identical.
        let mut stable = record.clone();
        stable.unix_time_secs = 0;
        serde_json::to_writer(&mut file, &stable)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

fn write_summary(
    path: &Path,
    records: &[ExperimentRecord],
    fitted_c: Option<f64>,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "kind", "n", "d", "p", "seed", "ratio", "bound_ref", "fitted_c",
    ])?;
    let c_str = fitted_c.map(|c| c.to_string()).unwrap_or_default();
    for record in records {
        writer.write_record([
            record.kind.clone(),
            record.params.n.to_string(),
            record.params.d.to_string(),
            record.params.p.map(|p| p.to_string()).unwrap_or_default(),
            record.params.seed.to_string(),
            record
                .results
                .get("ratio")
                .map(|r| r.to_string())
                .unwrap_or_default(),
            record
                .results
                .get("bound_ref")
                .map(|r| r.to_string())
                .unwrap_or_default(),
            c_str.clone(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_sweep_outputs(out: &Path, outcome: &SweepOutcome) -> Result<()> {
    write_records(&out.join("results.jsonl"), &outcome.records)?;
    write_summary(
        &out.join("summary.csv"),
        &outcome.records,
        Some(outcome.fitted_c),
    )?;
    Ok(())
}
