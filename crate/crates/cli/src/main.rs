use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use authorship::pipeline::{self, Inputs, RunConfig};
use authorship::report::{self, fmt_f64, GiniPopulation, ReleaseReport, Row};
use authorship::{DoaWeights, Error, Result};

const EXPORT_SCRIPT: &str = include_str!("export-log.sh");

#[derive(Parser)]
#[command(name = "authorship", version, about = "Code authorship analytics over commit histories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every release and write the report tables and a manifest.
    Analyze {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        report: ReportArgs,
        /// Output directory.
        #[arg(long, env = "AUTHORSHIP_OUT_DIR", default_value = "authorship-out")]
        out: PathBuf,
    },
    /// List the authors of one file at one release.
    Authors {
        #[command(flatten)]
        inputs: InputArgs,
        /// Release name; defaults to the last release.
        #[arg(long)]
        release: Option<String>,
        #[arg(long)]
        file: String,
        /// List every developer who changed the file, not only its authors.
        #[arg(long)]
        all: bool,
    },
    /// Print one report table to standard output.
    Stats {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        report: ReportArgs,
        /// Release name; defaults to every release.
        #[arg(long)]
        release: Option<String>,
        #[arg(long, value_enum, default_value_t = Table::Workload)]
        table: Table,
    },
    /// Print co-authorship network metrics, edge list or Pajek graph.
    Network {
        #[command(flatten)]
        inputs: InputArgs,
        /// Release name; defaults to the last release.
        #[arg(long)]
        release: Option<String>,
        /// Print the whole-tree edge list instead of the metrics.
        #[arg(long, conflicts_with = "pajek")]
        edges: bool,
        /// Print the whole-tree graph in Pajek format instead of the metrics.
        #[arg(long)]
        pajek: bool,
        /// Print metrics as JSON lines.
        #[arg(long)]
        json: bool,
    },
    /// Print a shell script that exports a git history as a commit log.
    ExportLogHelper,
}

#[derive(Args)]
struct InputArgs {
    /// Commit log (NDJSON). Repeat to concatenate several logs in order.
    #[arg(long = "log", required = true)]
    logs: Vec<PathBuf>,
    /// Alias map: `Name <email> = Canonical Name <canonical email>` lines.
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Subsystem rules (tab-separated); the bundled Linux rules when omitted.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Release list: `name commit` lines, oldest first.
    #[arg(long)]
    releases: PathBuf,
    /// Extra path exclusion (prefix, `dir/` or glob). Repeatable.
    #[arg(long = "exclude")]
    exclude: Vec<String>,
    /// Drop the default exclusions (firmware/).
    #[arg(long)]
    no_default_exclude: bool,
    /// Treat renames as a delete plus an add.
    #[arg(long)]
    no_follow_renames: bool,
    #[arg(long, default_value_t = 0.75)]
    normalized_floor: f64,
    #[arg(long, default_value_t = 3.293)]
    absolute_floor: f64,
    /// DOA weights as `intercept,fa,dl,ac`.
    #[arg(long, value_parser = parse_weights)]
    doa_weights: Option<DoaWeights>,
}

#[derive(Args)]
struct ReportArgs {
    /// Count every developer in scope in the Gini sample, non-authors as zero.
    #[arg(long)]
    gini_all_developers: bool,
    /// Also emit JSON lines.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Authorship,
    Subsystems,
    Workload,
    Profiles,
    Network,
}

fn parse_weights(s: &str) -> std::result::Result<DoaWeights, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [intercept, first_authorship, deliveries, acceptances] => Ok(DoaWeights {
            intercept,
            first_authorship,
            deliveries,
            acceptances,
        }),
        _ => Err(format!("expected four comma-separated weights, got {}", v.len())),
    }
}

impl InputArgs {
    fn config(self, out: PathBuf) -> RunConfig {
        let mut config = RunConfig::new(self.logs, self.releases, out);
        config.alias_map_path = self.aliases;
        config.rules_path = self.rules;
        if self.no_default_exclude {
            config.exclusions.clear();
        }
        config.exclusions.extend(self.exclude);
        config.follow_renames = !self.no_follow_renames;
        config.model.thresholds.normalized_floor = self.normalized_floor;
        config.model.thresholds.absolute_floor = self.absolute_floor;
        if let Some(w) = self.doa_weights {
            config.model.weights = w;
        }
        config
    }
}

impl ReportArgs {
    fn apply(&self, config: &mut RunConfig) {
        config.json = self.json;
        if self.gini_all_developers {
            config.gini_population = GiniPopulation::AllDevelopers;
        }
    }
}

fn release_name(inputs: &Inputs, release: Option<String>) -> Result<String> {
    match release {
        Some(name) if inputs.releases.iter().any(|r| r.name == name) => Ok(name),
        Some(name) => Err(Error::Config(format!("unknown release {name}"))),
        None => Ok(inputs.releases.last().expect("release list is never empty").name.clone()),
    }
}

fn single_report(inputs: &Inputs, config: &RunConfig, release: &str) -> Result<ReleaseReport> {
    let snapshot = pipeline::snapshot_for(inputs, release, config.follow_renames)?;
    report::analyze_release(&snapshot, &pipeline::settings(config, inputs))
}

fn render<R: Row>(rows: &[R], json: bool) -> String {
    if json {
        report::to_jsonl(rows)
    } else {
        report::to_csv(rows)
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Analyze { inputs, report, out } => {
            let mut config = inputs.config(out);
            report.apply(&mut config);
            let outcome = pipeline::analyze(&config)?;
            println!(
                "wrote {} files for {} releases to {}",
                outcome.files.len(),
                outcome.releases.len(),
                outcome.output_dir.display()
            );
            println!("manifest sha256 {}", outcome.manifest_sha256);
        }
        Command::Authors {
            inputs,
            release,
            file,
            all,
        } => {
            let config = inputs.config(PathBuf::new());
            let loaded = pipeline::load_inputs(&config)?;
            let release = release_name(&loaded, release)?;
            let snapshot = pipeline::snapshot_for(&loaded, &release, config.follow_renames)?;
            for line in pipeline::file_doa(&snapshot, &config.model, &file)? {
                if all {
                    println!(
                        "{}\t{}\t{}\t{}",
                        line.email,
                        fmt_f64(line.doa_abs),
                        fmt_f64(line.doa_norm),
                        line.is_author
                    );
                } else if line.is_author {
                    println!("{}\t{}\t{}", line.email, fmt_f64(line.doa_abs), fmt_f64(line.doa_norm));
                }
            }
        }
        Command::Stats {
            inputs,
            report,
            release,
            table,
        } => {
            let mut config = inputs.config(PathBuf::new());
            report.apply(&mut config);
            let loaded = pipeline::load_inputs(&config)?;
            let reports = match release {
                Some(name) => {
                    let name = release_name(&loaded, Some(name))?;
                    vec![single_report(&loaded, &config, &name)?]
                }
                None => {
                    let mut all = Vec::new();
                    pipeline::analyze_releases(&loaded, &config, |r| {
                        all.push(r);
                        Ok(())
                    })?;
                    all
                }
            };
            let json = config.json;
            let out = match table {
                Table::Authorship => render(&reports.iter().flat_map(|r| r.authorship.clone()).collect::<Vec<_>>(), json),
                Table::Subsystems => render(&reports.iter().flat_map(|r| r.subsystems.clone()).collect::<Vec<_>>(), json),
                Table::Workload => render(&reports.iter().flat_map(|r| r.workload.clone()).collect::<Vec<_>>(), json),
                Table::Profiles => render(&reports.iter().flat_map(|r| r.profiles.clone()).collect::<Vec<_>>(), json),
                Table::Network => render(&reports.iter().flat_map(|r| r.network.clone()).collect::<Vec<_>>(), json),
            };
            print!("{out}");
        }
        Command::Network {
            inputs,
            release,
            edges,
            pajek,
            json,
        } => {
            let config = inputs.config(PathBuf::new());
            let loaded = pipeline::load_inputs(&config)?;
            let release = release_name(&loaded, release)?;
            let report = single_report(&loaded, &config, &release)?;
            if edges {
                print!("{}", report.edges_csv);
            } else if pajek {
                print!("{}", report.pajek);
            } else {
                print!("{}", render(&report.network, json));
            }
        }
        Command::ExportLogHelper => print!("{EXPORT_SCRIPT}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
