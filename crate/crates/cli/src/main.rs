//! `simulate <experiment> [--spec file] [overrides]`

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;

use perctree::experiments::{run, ExperimentSpec, EXPERIMENTS};

#[derive(Parser, Debug)]
#[command(name = "simulate", version, about = "Oriented percolation experiments")]
struct Args {
    /// Experiment to run.
    #[arg(value_parser = PossibleValuesParser::new(EXPERIMENTS))]
    experiment: String,
    /// TOML spec; its `experiment` must match the positional name.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Edge probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Height ladder, comma separated and strictly increasing.
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<i64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Levels kept below the horizon for certification.
    #[arg(long)]
    margin: Option<i64>,
    /// Output directory; defaults to `results/<experiment>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_spec(a: Args) -> Result<ExperimentSpec, String> {
    let mut spec = match &a.spec {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let s =
                ExperimentSpec::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            if s.experiment != a.experiment {
                return Err(format!(
                    "{} is a spec for '{}', not '{}'",
                    path.display(),
                    s.experiment,
                    a.experiment
                ));
            }
            s
        }
        None => ExperimentSpec::defaults(&a.experiment),
    };
    if let Some(p) = a.p {
        spec.p = p;
    }
    if let Some(n) = a.n {
        spec.n = n;
    }
    if let Some(s) = a.samples {
        spec.samples = s;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if a.margin.is_some() {
        spec.margin = a.margin;
    }
    if a.out.is_some() {
        spec.out = a.out;
    }
    if spec.out.is_none() {
        spec.out = Some(PathBuf::from("results").join(&spec.experiment));
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let spec = match build_spec(Args::parse()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&spec) {
        Ok(out) => {
            for r in &out.reports {
                let est = r.estimate.map_or("-".into(), |e| format!("{e:.6}"));
                let se = r.se.map_or("-".into(), |e| format!("{e:.6}"));
                println!(
                    "{} {} p={} N={} used={}/{} estimate={est} se={se}",
                    r.experiment, r.label, r.p, r.n, r.used, r.samples
                );
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
