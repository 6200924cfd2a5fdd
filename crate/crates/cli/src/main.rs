//! `precoder`: perfect-form enumeration, codebooks and precoder design from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use lattice_precoder::bounds::{certificate, gram_trace_bound};
use lattice_precoder::codebook::{
    best_of, build_codebook, optimal_precoder, rational_bound, repro_4d, select_precoder,
};
use lattice_precoder::exact::snap;
use lattice_precoder::io;
use lattice_precoder::lattice::min_distance;
use lattice_precoder::perfect::{enumerate_perfect_forms, isometry_classes, root_lattice_form};
use lattice_precoder::precoder::{gmd_result, objective};
use lattice_precoder::reduction::minkowski_reduce;
use lattice_precoder::{Error, Rational};

#[derive(Parser)]
#[command(name = "precoder", version, about = "Lattice-based minimum-distance precoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate perfect forms of dimension N up to a trace bound.
    Enumerate {
        #[arg(long)]
        dim: usize,
        /// Trace bound as a decimal or "p/q"; defaults to a bound that reaches every class.
        #[arg(long)]
        trace_bound: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an offline codebook for spectra with s1/det(S)^(1/N) up to R.
    Codebook {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        max_ratio: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Design the minimum-power precoder for a channel.
    Optimize {
        #[arg(long)]
        channel: PathBuf,
        /// Select from this codebook instead of enumerating.
        #[arg(long)]
        codebook: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Geometric-mean-decomposition precoder for a channel.
    Gmd {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the energy and trace bounds for a channel.
    Bounds {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Minkowski-reduce a Gram matrix.
    Reduce {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare A4 and D4 on the two four-dimensional example channels.
    #[command(name = "repro-4d")]
    Repro4d,
}

/// Trace bounds large enough to meet every perfect-form class in dimensions 2 to 5.
fn default_trace_bound(dim: usize) -> Rational {
    Rational::from_integer(match dim {
        2 => 10,
        3 => 8,
        4 => 8,
        _ => 6,
    })
}

fn parse_bound(text: &str) -> Result<Rational, Error> {
    if let Ok(r) = text.trim().parse::<Rational>() {
        return Ok(r);
    }
    let x: f64 = text.trim().parse().map_err(|_| Error::Input(format!("bad trace bound {text:?}")))?;
    snap(x)
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Enumerate { dim, trace_bound, out } => {
            let bound = match trace_bound {
                Some(t) => parse_bound(&t)?,
                None => default_trace_bound(dim),
            };
            let records = enumerate_perfect_forms(&root_lattice_form(dim)?, &bound)?;
            let forms: Vec<_> = records.iter().map(|r| r.form.clone()).collect();
            let classes = isometry_classes(&forms)?;
            eprintln!("{} forms, {} classes", records.len(), classes.len());
            write(&out, &io::forms_to_json(dim, &bound, &records, &classes)?)
        }
        Command::Codebook { dim, max_ratio, out } => {
            let cb = build_codebook(dim, max_ratio)?;
            eprintln!("{} entries", cb.entries.len());
            write(&out, &io::codebook_to_json(&cb)?)
        }
        Command::Optimize { channel, codebook, out } => {
            let s = io::channel_from_json(&read(&channel)?)?;
            let res = match codebook {
                Some(path) => select_precoder(&s, &io::codebook_from_json(&read(&path)?)?)?,
                None => optimal_precoder(&s)?,
            };
            write(&out, &io::precoder_to_json("lattice", &s, &res)?)
        }
        Command::Gmd { channel, out } => {
            let s = io::channel_from_json(&read(&channel)?)?;
            write(&out, &io::precoder_to_json("gmd", &s, &gmd_result(&s)?)?)
        }
        Command::Bounds { channel } => {
            let s = io::channel_from_json(&read(&channel)?)?;
            let ub = rational_bound(gram_trace_bound(&s))?;
            let records = enumerate_perfect_forms(&root_lattice_form(s.dim())?, &ub)?;
            let forms: Vec<_> = records.into_iter().map(|r| r.form).collect();
            let winner = best_of(&forms, &s)?;
            let (reduced, _) = minkowski_reduce(&winner)?;
            let cert = certificate(&reduced.generator()?, &s)?;
            let power = objective(&winner, &s)?;
            print!("{}", io::certificate_to_json(&s, &winner, power, &cert)?);
            Ok(())
        }
        Command::Reduce { gram, out } => {
            let g = io::gram_from_json(&read(&gram)?)?;
            let (reduced, z) = minkowski_reduce(&g)?;
            let lambda = min_distance(&g)?.form_min;
            write(&out, &io::reduced_to_json(&g, &reduced, &z, &lambda)?)
        }
        Command::Repro4d => {
            let report = repro_4d()?;
            print!("{}", io::repro_to_json(&report)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = run(cli.command);
    eprintln!("elapsed {:.3}s", started.elapsed().as_secs_f64());
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
