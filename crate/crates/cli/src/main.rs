// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use waferqc_cli::{configure_threads, run_recipe, AnalysisReport, CliError, Inputs, Recipe, RecipeParams, Table};
use waferqc_core::sim::{apply_aging, simulate_swap_map, simulate_wafer, DesignSet, SimConfig, SwapMapSpec, TlsBathConfig};
use waferqc_core::{ingest_jj_csv, validate_dataset, GridPosition, WaferDataset};

#[derive(Parser)]
#[command(name = "waferqc", version, about = "Wafer-scale transmon variability: simulate, validate, analyze")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a wafer: writes dataset.json and truth.json
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sub-die and JJ layout as JSON (default: D1 ×32, D2 ×24, 8 JJ per area)
        #[arg(long)]
        designs: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write swap_map.json from the swap-spectroscopy bath
        #[arg(long)]
        swap_map: bool,
        /// Also write dataset_aged.json, re-measured this many days later
        #[arg(long)]
        aging_days: Option<f64>,
    },
    /// Check datasets against the schema rules
    Validate {
        #[arg(required = true)]
        datasets: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run an analysis recipe; writes <out>/<recipe>.json
    Analyze {
        #[arg(value_enum)]
        recipe: Recipe,
        #[arg(long = "dataset")]
        datasets: Vec<PathBuf>,
        #[arg(long = "swap-map")]
        swap_maps: Vec<PathBuf>,
        /// Recipe parameters as JSON; flags below override
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        design: Option<String>,
        /// Die as col,row
        #[arg(long, value_parser = parse_die)]
        die: Option<GridPosition>,
        #[arg(long)]
        seed_ghz: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// csv additionally writes every table as <recipe>-<table>.csv
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Summarize report files
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a JJ resistance CSV into a dataset
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        wafer_id: String,
        #[arg(long, default_value = "unknown")]
        batch_id: String,
        /// Fabrication date, YYYY-MM-DD
        #[arg(long)]
        date: chrono::NaiveDate,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_die(s: &str) -> Result<GridPosition, String> {
    let (c, r) = s.split_once(',').ok_or("expected col,row")?;
    let p = |x: &str| x.trim().parse::<i32>().map_err(|e| e.to_string());
    Ok(GridPosition(p(c)?, p(r)?))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { config, seed, designs, out, swap_map, aging_days } => {
            let mut cfg = match config {
                Some(p) => SimConfig::load(&p)?,
                None => SimConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let set: DesignSet = match designs {
                Some(p) => {
                    let s = fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&s).map_err(|e| CliError::Validation(e.to_string()))?
                }
                None => DesignSet::default(),
            };
            ensure_dir(&out)?;
            let (ds, truth) = simulate_wafer(&cfg, &set)?;
            write(&out.join("dataset.json"), ds.to_json_string()?)?;
            write(&out.join("truth.json"), serde_json::to_string_pretty(&truth).map_err(waferqc_core::Error::from)?)?;
            if let Some(days) = aging_days {
                let aged = apply_aging(&ds, &truth, days)?;
                write(&out.join("dataset_aged.json"), aged.to_json_string()?)?;
            }
            if swap_map {
                let m = simulate_swap_map(&TlsBathConfig::swap_spectroscopy(), &SwapMapSpec::default(), cfg.seed)?;
                write(&out.join("swap_map.json"), serde_json::to_string(&m).map_err(waferqc_core::Error::from)?)?;
            }
            println!("simulated {} qubits, {} JJ structures -> {}", ds.qubit_count(), ds.jj_structures().count(), out.display());
            Ok(())
        }
        Command::Validate { datasets, format } => {
            let mut total = 0;
            for p in &datasets {
                let ds = WaferDataset::load(p)?;
                let v = validate_dataset(&ds);
                total += v.len();
                match format {
                    Format::Json => println!("{}", serde_json::to_string_pretty(&v).map_err(waferqc_core::Error::from)?),
                    Format::Csv => {
                        for x in &v {
                            println!("{},{},{:?},{}", p.display(), x.device_id, x.rule, x.message);
                        }
                    }
                }
            }
            if total > 0 {
                return Err(CliError::Validation(format!("{total} violation(s)")));
            }
            Ok(())
        }
        Command::Analyze { recipe, datasets, swap_maps, config, design, die, seed_ghz, out, format } => {
            let mut params: RecipeParams = match config {
                Some(p) => {
                    let s = fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&s).map_err(|e| CliError::Validation(e.to_string()))?
                }
                None => RecipeParams::default(),
            };
            params.design = design.or(params.design);
            params.die = die.or(params.die);
            params.seed_ghz = seed_ghz.or(params.seed_ghz);
            ensure_dir(&out)?;
            let inputs = Inputs::from_paths(&datasets, &swap_maps)?;
            let rep = run_recipe(recipe, &inputs, &params, Some(&out))?;
            let path = out.join(format!("{}.json", recipe.name()));
            write(&path, rep.to_json())?;
            if let Format::Csv = format {
                for (name, t) in &rep.tables {
                    let p = out.join(format!("{}-{name}.csv", recipe.name()));
                    let f = fs::File::create(&p)?;
                    t.write_csv(f).map_err(|e| CliError::Io(e.to_string()))?;
                }
            }
            println!("{}", path.display());
            if !rep.all_converged() {
                let bad: Vec<&str> = rep.fits.iter().filter(|(_, f)| !f.converged).map(|(k, _)| k.as_str()).collect();
                return Err(CliError::NonConvergence(bad.join(", ")));
            }
            Ok(())
        }
        Command::Report { reports, format, out } => {
            let reps = reports
                .iter()
                .map(|p| {
                    let s = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                    serde_json::from_str::<AnalysisReport>(&s).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let text = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&reps).map_err(waferqc_core::Error::from)?;
                    s.push('\n');
                    s
                }
                Format::Csv => {
                    let mut t = Table::new(&["recipe", "kind", "name", "value", "std_error"]);
                    for r in &reps {
                        for (fit, f) in &r.fits {
                            for (k, v) in &f.params {
                                let se = f.std_errors.get(k).copied().unwrap_or(f64::NAN);
                                t.push(vec![r.recipe.clone().into(), "fit".into(), format!("{fit}.{k}").into(), json_num(*v), json_num(se)]);
                            }
                        }
                        for (k, v) in &r.scalars {
                            t.push(vec![r.recipe.clone().into(), "scalar".into(), k.clone().into(), json_num(*v), serde_json::Value::Null]);
                        }
                    }
                    let mut buf = Vec::new();
                    t.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
            };
            match out {
                Some(p) => write(&p, text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Ingest { csv, wafer_id, batch_id, date, out } => {
            let f = fs::File::open(&csv).map_err(|e| CliError::Io(format!("{}: {e}", csv.display())))?;
            let ds = ingest_jj_csv(f, &wafer_id, &batch_id, date)?;
            write(&out, ds.to_json_string()?)?;
            println!("ingested {} JJ structures -> {}", ds.jj_structures().count(), out.display());
            Ok(())
        }
    }
}

fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
