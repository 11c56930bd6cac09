use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use floqsim::decoders::{BpOsd, PreparedDecoder, Syndrome, WeightRule};
use floqsim::dem::{self, to_matching_graph};
use floqsim::experiments::{
    build_circuit, report, threshold_sweep, timing_benchmark, worker_pool, write_histogram_csv, write_timing_csv,
    ReportFormat, MEMORY_STEPS,
};
use floqsim::f2::BitVec;
use floqsim::lattice::{self, homology_basis};
use floqsim::{compile, DecoderConfig, DecoderKind, ExperimentConfig, Family, NoiseKind, NoiseModel, Pauli};

#[derive(Parser)]
#[command(name = "floqsim", version, about = "Floquet codes on hyperbolic tilings: circuits, error models, decoders")]
#[command(after_help = "The worker pool size is read from FLOQSIM_THREADS (default: all cores).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Logical error rate sweep over the p grid, one run per --ell.
    Run(RunArgs),
    /// Build and validate a lattice, optionally writing it out.
    Lattice(LatticeArgs),
    /// Compile a detector error model and print its weight histogram.
    Dem(DemArgs),
    /// Decode syndromes read from a file, one shot per line.
    Decode(DecodeArgs),
    /// Serial decode timing per size and decoder, with power-law fits.
    Bench(BenchArgs),
    /// Sweep several sizes and estimate the curve crossing.
    Threshold(ThresholdArgs),
}

#[derive(Args, Clone)]
struct Experiment {
    #[arg(long, default_value = "hcf")]
    family: Family,
    /// Shipped lattice name (hcf16, torus18) or a lattice file.
    #[arg(long, default_value = "hcf16")]
    lattice: String,
    /// Refinement level(s), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ell: Vec<usize>,
    /// Floquet periods; defaults to 48 steps.
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long, default_value = "em3-ind")]
    noise: NoiseKind,
    /// Physical error rates, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    p: Vec<f64>,
    #[arg(long, value_parser = parse_basis, default_value = "Z")]
    basis: Pauli,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct DecoderArgs {
    #[arg(long, default_value = "mwpm")]
    decoder: DecoderKind,
    #[arg(long, default_value_t = 30)]
    bp_iters: usize,
    #[arg(long, default_value_t = 1)]
    osd_order: usize,
}

impl DecoderArgs {
    fn config(&self) -> DecoderConfig {
        DecoderConfig { kind: self.decoder, bp_iters: self.bp_iters, osd_order: self.osd_order, ..DecoderConfig::default() }
    }
}

impl Experiment {
    fn config(&self, ell: usize, default_periods: usize) -> ExperimentConfig {
        ExperimentConfig {
            family: self.family,
            lattice: self.lattice.clone(),
            ell,
            periods: self.periods.unwrap_or(default_periods),
            noise: self.noise,
            p: self.p.clone(),
            decoder: self.decoder.config(),
            shots: self.shots,
            seed: self.seed,
            basis: self.basis,
        }
    }

    fn configs(&self) -> Vec<ExperimentConfig> {
        let periods = MEMORY_STEPS / self.family.period();
        self.ell.iter().map(|&ell| self.config(ell, periods)).collect()
    }
}

fn parse_basis(s: &str) -> Result<Pauli, String> {
    match s {
        "X" | "x" => Ok(Pauli::X),
        "Z" | "z" => Ok(Pauli::Z),
        _ => Err(format!("memory basis must be X or Z, got {s:?}")),
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    exp: Experiment,
    /// CSV or JSON (by extension); CSV on stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long, default_value = "hcf16")]
    lattice: String,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Write the lattice in the plain-text format.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemArgs {
    #[command(flatten)]
    exp: Experiment,
    /// Count raw channel branches instead of merged mechanisms.
    #[arg(long)]
    raw: bool,
    /// Write the model in the plain-text DEM format.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    exp: Experiment,
    /// Decode against this DEM file instead of compiling one from the
    /// experiment flags. Matching then uses exact-cover decomposition only.
    #[arg(long)]
    dem: Option<PathBuf>,
    /// Lines of fired detector indices (`3 17` or `D3 D17`); `-` for stdin.
    #[arg(long, default_value = "-")]
    syndromes: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    exp: Experiment,
    /// Timing CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    exp: Experiment,
    #[arg(long, default_value_t = 500)]
    resamples: usize,
    /// Sweep results, CSV or JSON by extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(args: RunArgs) -> Result<()> {
    let pool = worker_pool()?;
    let mut results = Vec::new();
    for cfg in args.exp.configs() {
        let r = floqsim::experiments::logical_error_rate_with(&cfg, &pool)?;
        for pt in &r.points {
            eprintln!(
                "{} n={} p={} {}: {}/{} P_L={:.3e} [{:.3e}, {:.3e}]",
                cfg.family, r.num_qubits, pt.p, cfg.decoder.kind, pt.failures, pt.shots, pt.p_l, pt.ci_low, pt.ci_high
            );
        }
        results.push(r);
    }
    match &args.out {
        Some(path) => report(&results, ReportFormat::from_path(path), path)?,
        None => floqsim::experiments::write_csv(&results, io::stdout().lock())?,
    }
    Ok(())
}

fn lattice_cmd(args: LatticeArgs) -> Result<()> {
    let t = lattice::build_lattice(&args.lattice, args.ell)?;
    let v = t.validate();
    println!(
        "{} ell={}: {} qubits, {} edges, {} faces, genus {}, {} logical qubits",
        args.lattice,
        args.ell,
        t.num_vertices(),
        t.num_edges(),
        t.num_faces(),
        t.genus()?,
        t.logical_qubits()?
    );
    let h = homology_basis(&t)?;
    println!("homology: {} loops, intersection form nonsingular: {}", h.loops.len(), h.intersection_nonsingular());
    if let Some(path) = &args.out {
        std::fs::write(path, lattice::emit(&t)).with_context(|| format!("writing {}", path.display()))?;
    }
    if !v.is_ok() {
        bail!("lattice is invalid:\n{v}");
    }
    println!("valid");
    Ok(())
}

fn compiled(cfg: &ExperimentConfig) -> Result<(floqsim::MeasurementCircuit, floqsim::DetectorErrorModel)> {
    cfg.validate()?;
    let (base, _) = build_circuit(cfg)?;
    let c = base.with_noise(&NoiseModel::new(cfg.noise, cfg.p[0])?);
    let m = compile(&c);
    Ok((c, m))
}

fn dem_cmd(args: DemArgs) -> Result<()> {
    let cfg = args.exp.configs().swap_remove(0);
    let (_, m) = compiled(&cfg)?;
    eprintln!(
        "{} detectors, {} observables, {} mechanisms, max weight {}, {} undetectable",
        m.num_detectors,
        m.num_observables,
        m.mechanisms.len(),
        m.max_weight(),
        m.undetectable().count()
    );
    let rows = if args.raw { m.raw_weight_histogram() } else { m.weight_histogram() };
    write_histogram_csv(&rows, io::stdout().lock())?;
    if let Some(path) = &args.out {
        std::fs::write(path, dem::emit(&m)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn parse_syndrome(line: &str, num_detectors: usize) -> Result<Syndrome> {
    let mut s = BitVec::zeros(num_detectors);
    for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let d: usize = tok.trim_start_matches('D').parse().with_context(|| format!("bad detector {tok:?}"))?;
        if d >= num_detectors {
            bail!("detector {d} out of range (model has {num_detectors})");
        }
        s.toggle(d);
    }
    Ok(s)
}

fn decode_cmd(args: DecodeArgs) -> Result<()> {
    let dc = args.exp.decoder.config();
    let (prepared, num_detectors, num_observables) = match &args.dem {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let m = dem::parse(&text)?;
            let p = match dc.kind {
                DecoderKind::Mwpm => PreparedDecoder::Mwpm(to_matching_graph(&m, WeightRule::LogOdds)?),
                DecoderKind::BpOsd => PreparedDecoder::BpOsd(BpOsd::new(&m, dc.bp_iters, dc.osd_order)),
            };
            (p, m.num_detectors, m.num_observables)
        }
        None => {
            let cfg = args.exp.configs().swap_remove(0);
            let (c, m) = compiled(&cfg)?;
            (PreparedDecoder::new(&m, &c, &dc)?, m.num_detectors, m.num_observables)
        }
    };
    let input: Box<dyn BufRead> = if args.syndromes.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        let f = File::open(&args.syndromes).with_context(|| format!("opening {}", args.syndromes.display()))?;
        Box::new(BufReader::new(f))
    };
    let mut worker = prepared.worker();
    let mut out = output(args.out.as_deref())?;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let s = parse_syndrome(&line, num_detectors).with_context(|| format!("syndrome line {}", i + 1))?;
        let c = worker.decode(&s).with_context(|| format!("decoding line {}", i + 1))?;
        let bits: String = (0..num_observables).map(|o| if c.observables.get(o) { '1' } else { '0' }).collect();
        writeln!(out, "{bits}")?;
    }
    out.flush()?;
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<()> {
    let cfg = args.exp.configs().swap_remove(0);
    let decoders = [DecoderConfig { kind: DecoderKind::Mwpm, ..args.exp.decoder.config() }, DecoderConfig {
        kind: DecoderKind::BpOsd,
        ..args.exp.decoder.config()
    }];
    let table = timing_benchmark(&cfg, &args.exp.ell, &decoders, cfg.shots)?;
    for (kind, fit) in &table.fits {
        eprintln!("{kind}: T ~ {:.3e} n^{:.2} (r2 {:.3})", fit.beta, fit.alpha, fit.r2);
    }
    write_timing_csv(&table, output(args.out.as_deref())?)?;
    Ok(())
}

fn threshold_cmd(args: ThresholdArgs) -> Result<()> {
    if args.exp.ell.len() < 2 {
        bail!("threshold needs at least two sizes, e.g. --ell 2,3");
    }
    let pool = worker_pool()?;
    // one Floquet period unless told otherwise
    let cfg = args.exp.config(args.exp.ell[0], 1);
    let (results, rep) = threshold_sweep(&cfg, &args.exp.ell, args.resamples, &pool)?;
    for r in &results {
        let pl: Vec<String> = r.points.iter().map(|pt| format!("{:.3e}", pt.p_l)).collect();
        eprintln!("n={}: {}", r.num_qubits, pl.join(" "));
    }
    if let Some(path) = &args.out {
        report(&results, ReportFormat::from_path(path), path)?;
    }
    match (rep.estimate, rep.no_crossing) {
        (Some((lo, hi)), _) => {
            print!("crossing in [{lo:.4}, {hi:.4}]");
            if let Some((a, b)) = rep.bootstrap {
                print!(", bootstrap 95% [{a:.4}, {b:.4}]");
            }
            println!();
        }
        (None, why) => println!("no crossing ({why:?})"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Run(a) => run(a),
        Command::Lattice(a) => lattice_cmd(a),
        Command::Dem(a) => dem_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Threshold(a) => threshold_cmd(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
