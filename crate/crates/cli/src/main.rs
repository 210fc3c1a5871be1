use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cyclebound::manifest::{
    exit_code, probe_invariance, run_checks, to_json, to_text, Manifest, RunOptions,
};
use cyclebound::par::Parallelism;
use cyclebound::Result;

#[derive(Parser)]
#[command(
    name = "cyclebound",
    version,
    about = "Audit boundedness and absence tests for compact integral manifolds"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks of a manifest.
    Check {
        file: PathBuf,
        /// Write the JSON report here (`-` for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Sampler seed; overrides the manifest.
        #[arg(long, env = "CYCLEBOUND_SEED")]
        seed: Option<u64>,
        /// Sample points per sign query.
        #[arg(long)]
        samples: Option<usize>,
        /// Run only checks with this label or theorem id.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, short)]
        verbose: bool,
        /// Record wall-clock time per check.
        #[arg(long)]
        timing: bool,
        /// Disable the thread pool.
        #[arg(long)]
        sequential: bool,
    },
    /// Evaluate an expression in the scope of a manifest.
    Eval {
        file: PathBuf,
        #[arg(long)]
        expr: String,
    },
    /// Integrate trajectories from the probe blocks of a manifest.
    Probe {
        file: PathBuf,
        /// Only probes of this candidate.
        #[arg(long)]
        candidate: Option<String>,
    },
}

fn check(
    file: &PathBuf,
    json: Option<&PathBuf>,
    seed: Option<u64>,
    samples: Option<usize>,
    only: Option<&str>,
    verbose: bool,
    timing: bool,
    sequential: bool,
) -> Result<i32> {
    let m = Manifest::load(file)?;
    let defaults = RunOptions::default();
    let opts = RunOptions {
        seed: seed.or(m.seed).unwrap_or(defaults.seed),
        samples: samples.or(m.samples).unwrap_or(defaults.samples),
        parallelism: if sequential {
            Parallelism::Sequential
        } else {
            defaults.parallelism
        },
        timing,
    };
    let outcomes = run_checks(&m, &opts, only)?;
    let doc = to_json(opts.seed, &outcomes);
    match json {
        Some(p) if p.as_os_str() == "-" => print!("{doc}"),
        Some(p) => {
            std::fs::write(p, &doc)
                .map_err(|e| cyclebound::Error::Io(format!("{}: {e}", p.display())))?;
            print!("{}", to_text(&outcomes, verbose));
        }
        None => print!("{}", to_text(&outcomes, verbose)),
    }
    Ok(exit_code(&outcomes))
}

fn eval(file: &PathBuf, expr: &str) -> Result<i32> {
    let m = Manifest::load(file)?;
    println!("{}", m.scope.eval_str(expr)?);
    Ok(0)
}

fn probe(file: &PathBuf, candidate: Option<&str>) -> Result<i32> {
    let m = Manifest::load(file)?;
    let probes: Vec<_> = m
        .probes
        .iter()
        .filter(|p| candidate.is_none_or(|c| p.candidate == c))
        .collect();
    if probes.is_empty() {
        return Err(cyclebound::Error::Usage("no matching probe blocks".into()));
    }
    for p in probes {
        let w = m
            .candidate(&p.candidate)
            .expect("probe candidates are validated");
        let ode = m.system.induced_ode(p.j)?;
        let r = probe_invariance(&ode.f, w, &p.start, p.horizon, p.step)?;
        let start: Vec<String> = r.start.iter().map(|x| cyclebound::fmt_f64(*x)).collect();
        println!("probe {} (j = {})", p.candidate, p.j);
        println!("  start      [{}]", start.join(", "));
        println!("  steps      {}", r.steps);
        println!("  max |w|    {}", cyclebound::fmt_f64(r.max_abs_w));
        println!("  diverged   {}", r.diverged);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Check {
            file,
            json,
            seed,
            samples,
            only,
            verbose,
            timing,
            sequential,
        } => check(
            file,
            json.as_ref(),
            *seed,
            *samples,
            only.as_deref(),
            *verbose,
            *timing,
            *sequential,
        ),
        Cmd::Eval { file, expr } => eval(file, expr),
        Cmd::Probe { file, candidate } => probe(file, candidate.as_deref()),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
