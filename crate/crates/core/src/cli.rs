//! Experiment driver behind the `fogran` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{self, best_scheme, RegimePoint, CSV_HEADER};
use crate::error::Error;
use crate::field::PrimeField;
use crate::oracle;
use crate::placement::{build_placement, DemandVector, Library};
use crate::rational::{compact, parse_rational, Rational, RationalGrid};
use crate::scheduler::build_schedule;
use crate::topology::Topology;
use crate::validator::{self, measure, simulate_delivery};

pub const DEFAULT_SEED: u64 = 0x5eed_f06a;

#[derive(Debug, Parser)]
#[command(name = "fogran", version, about = "Cache-aided delivery over (K,d) regular fog-RAN edge networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the delivery schedule for the canonical demand vector.
    Schedule {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        /// Number of files in the library used for canonical demands.
        #[arg(long, default_value_t = 0)]
        files: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a random library, deliver it and decode at every user.
    Simulate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "files", default_value_t = 4)]
        n_files: usize,
        #[arg(long, default_value_t = 1024)]
        bytes: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Exact edge NDT, worst-case bound, benchmark NDT and their ratio.
    Ndt {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
    /// Sweep cache size and fronthaul capacity and write a CSV.
    Sweep {
        #[arg(long)]
        d: usize,
        #[arg(long = "mu-grid")]
        mu_grid: RationalGrid,
        #[arg(long = "r-grid")]
        r_grid: RationalGrid,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare both schemes at one operating point.
    Compare {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = parse_rational)]
        mu: Rational,
        #[arg(long, value_parser = parse_rational)]
        r: Rational,
    },
    /// Exhaustive minimum slot count against the constructed schedule.
    Oracle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 12)]
        budget: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomically(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn random_library(n_files: usize, bytes: usize, rng: &mut impl Rng) -> Result<Library, Error> {
    let files = (0..n_files)
        .map(|_| {
            let mut f = vec![0u8; bytes];
            rng.fill(f.as_mut_slice());
            f
        })
        .collect();
    Library::new(files)
}

pub fn sweep_points(d: usize, mu: &RationalGrid, r: &RationalGrid) -> Result<Vec<RegimePoint>, Error> {
    let grid: Vec<(Rational, Rational)> = mu
        .values()
        .into_iter()
        .flat_map(|m| r.values().into_iter().map(move |rr| (m, rr)))
        .collect();
    grid.into_par_iter().map(|(m, rr)| best_scheme(m, rr, d)).collect()
}

pub fn run(command: &Command, out: &mut impl Write) -> Result<(), CliError> {
    match command {
        Command::Schedule { k, d, files, out: path } => {
            let t = Topology::new(*k, *d)?;
            let n = if *files == 0 { *k } else { *files };
            let sched = build_schedule(&t, &DemandVector::canonical(*k, n)?)?;
            let dump = sched.dump();
            match path {
                Some(p) => write_atomically(p, dump.as_bytes())?,
                None => out.write_all(dump.as_bytes())?,
            }
        }
        Command::Simulate { k, d, n_files, bytes, seed } => {
            let t = Topology::new(*k, *d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let lib = random_library(*n_files, *bytes, &mut rng)?;
            let scheme = build_placement(&t, PrimeField::default())?;
            let canonical = DemandVector::canonical(*k, *n_files)?;
            let random =
                DemandVector::new((0..*k).map(|_| rng.gen_range(1..=*n_files)).collect(), *n_files)?;
            let mut report = None;
            for demands in [canonical, random] {
                let sched = build_schedule(&t, &demands)?;
                simulate_delivery(&t, &scheme, &lib, &demands, &sched)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                report.get_or_insert_with(|| measure(&t, &sched));
            }
            writeln!(out, "{}", report.expect("at least one run").line())?;
        }
        Command::Ndt { k, d } => {
            let t = Topology::new(*k, *d)?;
            let sched = build_schedule(&t, &DemandVector::canonical(*k, 1)?)?;
            if let Err(v) = validator::check_collisions(&t, &sched) {
                return Err(CliError::Validation(v[0].to_string()));
            }
            let report = measure(&t, &sched);
            let bench = analysis::full_caching_edge_ndt(*d)?;
            writeln!(
                out,
                "ndt={} bound={} benchmark={} ratio={}",
                compact(&report.ndt_exact),
                compact(&report.ndt_bound),
                compact(&bench),
                compact(&(report.ndt_bound / bench))
            )?;
        }
        Command::Sweep { d, mu_grid, r_grid, out: path } => {
            let points = sweep_points(*d, mu_grid, r_grid)?;
            let mut csv = String::from(CSV_HEADER);
            csv.push('\n');
            for p in &points {
                csv.push_str(&p.csv_row());
                csv.push('\n');
            }
            write_atomically(path, csv.as_bytes())?;
            writeln!(out, "wrote {} rows to {}", points.len(), path.display())?;
        }
        Command::Compare { d, mu, r } => {
            let p = best_scheme(*mu, *r, *d)?;
            let show = |v: Result<Rational, Error>| v.map(|x| compact(&x)).unwrap_or_else(|_| "n/a".into());
            writeln!(
                out,
                "delta_ach={} delta_full={} r1={} r2={} best={}",
                p.delta_ach,
                p.delta_full,
                show(analysis::threshold_r1(*mu, *d)),
                show(analysis::threshold_r2(*mu, *d)),
                p.best
            )?;
        }
        Command::Oracle { k, d, budget } => {
            let t = Topology::new(*k, *d)?;
            let sched = build_schedule(&t, &DemandVector::canonical(*k, 1)?)?;
            let heuristic = sched.slots.len();
            let v = oracle::min_slots(&t, *budget)?;
            writeln!(out, "oracle k={k} d={d} min_slots={v} heuristic_slots={heuristic}")?;
            if v > heuristic {
                return Err(CliError::Validation(format!(
                    "oracle found {v} slots, more than the constructed {heuristic}"
                )));
            }
        }
    }
    Ok(())
}
