use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use fflut::bench::{
    append_csv, run_matmul_suite, run_wht_suite, write_csv, write_ratio_csv, BenchRecord, Problem,
    SuiteConfig, SuiteReport,
};
use fflut::bilinear::{
    choose_mm_params, mm_naive_counted, mm_recursive, BilinearIdentity, ProductTable,
};
use fflut::io::{read_matrix_in, read_vec, write_matrix, write_vec};
use fflut::kron::{
    apply_naive, apply_table_split, apply_yates, base_matrix, choose_kron_params, hadamard, wht,
    wht_table, KronSpec, WhtAlgo, WhtParams, NAIVE_GUARD,
};
use fflut::rng::SplitMix64;
use fflut::table::{table_bytes, TransformTable, DEFAULT_MEM_CAP};
use fflut::{make_field, CostCounters, Error, FieldMatrix, FieldVec};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fflut",
    version,
    about = "Lookup-table transforms and matrix products over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kronecker-power transform of a vector (Walsh-Hadamard by default).
    Wht(WhtArgs),
    /// Product of two square matrices.
    Matmul(MatmulArgs),
    /// Seeded sweep writing one CSV row per algorithm and cell.
    Bench(BenchArgs),
}

#[derive(Parser)]
struct WhtArgs {
    #[arg(long)]
    p: u32,
    /// Kronecker exponent; the vector has d^n elements.
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value_t = AlgoArg::Fwht)]
    algo: AlgoArg,
    /// Force the table block exponent.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_MEM_CAP)]
    mem_cap: u64,
    /// `hadamard`, `polyeval` or a matrix file.
    #[arg(long, default_value = "hadamard")]
    matrix: String,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the lookup table used by `--algo table`.
    #[arg(long)]
    save_table: Option<PathBuf>,
    /// Read the lookup table instead of building it.
    #[arg(long)]
    load_table: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Naive,
    Fwht,
    Table,
}

#[derive(Parser)]
struct MatmulArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    size: usize,
    #[arg(long, value_enum, default_value_t = MmAlgoArg::Recursive)]
    algo: MmAlgoArg,
    /// `strassen` or an identity file.
    #[arg(long, default_value = "strassen")]
    identity: String,
    #[arg(long)]
    base_size: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MEM_CAP)]
    mem_cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Left operand file; generated from the seed when absent.
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MmAlgoArg {
    Naive,
    Recursive,
    RecursiveTable,
}

#[derive(Parser)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long = "p", value_delimiter = ',', default_value = "3")]
    primes: Vec<u16>,
    /// Exponents for the transform suite, sizes for the matrix suite.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    trials: u32,
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MEM_CAP)]
    mem_cap: u64,
    #[arg(long)]
    base_size: Option<usize>,
    #[arg(long, default_value = "strassen")]
    identity: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Wht,
    Matmul,
    All,
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MemCapExceeded { .. } => EXIT_RESOURCE,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Wht(args) => cmd_wht(args),
        Command::Matmul(args) => cmd_matmul(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_wht(args: WhtArgs) -> Result<(), Failure> {
    let ctx = make_field(args.p)?;
    let base = base_matrix(&args.matrix, &ctx)?;
    let spec = KronSpec::new(&ctx, &base, args.n)?;
    let is_hadamard = base == hadamard(&ctx);
    let problem = if args.matrix == "polyeval" {
        Problem::Polyeval
    } else {
        Problem::Wht
    };

    let v = match &args.input {
        Some(path) => {
            let v = read_vec(BufReader::new(File::open(path)?), &ctx)?;
            if v.len() != spec.len() {
                return Err(Error::LengthMismatch {
                    expected: spec.len(),
                    actual: v.len(),
                }
                .into());
            }
            v
        }
        None => SplitMix64::new(args.seed).field_vec(&ctx, spec.len()),
    };

    let mut c = CostCounters::new();
    let mut build_ns = 0;
    let mut param = 0;
    let (out, algo_name) = match args.algo {
        AlgoArg::Naive => (apply_naive(&spec, &v, NAIVE_GUARD, &mut c)?, "naive"),
        AlgoArg::Fwht => (plain_transform(&spec, &v, is_hadamard, &mut c)?, "fwht"),
        AlgoArg::Table => {
            let d = base.rows();
            let params = match args.k {
                Some(k) => {
                    let required = table_bytes(ctx.p(), d, k);
                    if required > args.mem_cap {
                        return Err(Error::MemCapExceeded {
                            required,
                            cap: args.mem_cap,
                        }
                        .into());
                    }
                    WhtParams::with_k_radix(args.n, k, d)?
                }
                None => choose_kron_params(args.n, d, ctx.p(), args.mem_cap),
            };
            if params.fallback {
                (plain_transform(&spec, &v, is_hadamard, &mut c)?, "table")
            } else {
                let start = Instant::now();
                let table = match &args.load_table {
                    Some(path) => TransformTable::read_from(
                        BufReader::new(File::open(path)?),
                        &base,
                        args.mem_cap,
                    )?,
                    None => TransformTable::build(&ctx, &base, params.k, args.mem_cap)?,
                };
                if table.k() != params.k {
                    return Err(Error::IncompatibleTable(format!(
                        "loaded table has k = {}, expected {}",
                        table.k(),
                        params.k
                    ))
                    .into());
                }
                build_ns = start.elapsed().as_nanos() as u64;
                if let Some(path) = &args.save_table {
                    let mut w = BufWriter::new(File::create(path)?);
                    table.write_to(&mut w)?;
                    w.flush()?;
                }
                param = params.k as u64;
                let start = Instant::now();
                let out = if is_hadamard {
                    wht_table(&ctx, &v, &table, &mut c)?
                } else {
                    apply_table_split(&spec, &v, &table, &mut c)?
                };
                c.wall_ns = start.elapsed().as_nanos() as u64;
                (out, "table")
            }
        }
    };

    eprintln!(
        "{} p={} n={} algo={} param={}: field_ops={} lookups={} bitop_cost={}",
        args.matrix,
        ctx.p(),
        args.n,
        algo_name,
        param,
        c.field_ops(),
        c.lookups,
        c.bitop_cost(ctx.p())
    );
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_vec(&mut w, &out)?;
            w.flush()?;
        }
        None => print_elements(out.as_slice()),
    }
    if let Some(path) = &args.stats {
        let rec = BenchRecord::from_counters(
            problem,
            algo_name,
            ctx.p(),
            args.n as u64,
            param,
            &c,
            build_ns,
        );
        append_csv(path, &[rec])?;
    }
    Ok(())
}

/// Butterflies for `H_2`, dense Yates levels for any other base.
fn plain_transform(
    spec: &KronSpec,
    v: &FieldVec,
    is_hadamard: bool,
    c: &mut CostCounters,
) -> fflut::Result<FieldVec> {
    let start = Instant::now();
    let out = if is_hadamard {
        wht(spec.ctx(), v, WhtAlgo::Fwht, None, c)
    } else {
        apply_yates(spec, v, None, c)
    };
    c.wall_ns = start.elapsed().as_nanos() as u64;
    out
}

fn print_elements(data: &[u8]) {
    let line: Vec<String> = data.iter().map(u8::to_string).collect();
    println!("{}", line.join(" "));
}

fn load_identity(spec: &str) -> Result<BilinearIdentity, Failure> {
    if spec == "strassen" {
        return Ok(BilinearIdentity::strassen());
    }
    let text = std::fs::read_to_string(spec)?;
    Ok(BilinearIdentity::parse(&text)?)
}

fn cmd_matmul(args: MatmulArgs) -> Result<(), Failure> {
    let ctx = make_field(args.p)?;
    let id = load_identity(&args.identity)?;
    if let Err(report) = id.verify(&ctx) {
        return Err(Failure {
            code: EXIT_VALIDATION,
            message: format!(
                "identity {} rejected over F_{}: {report}",
                args.identity,
                ctx.p()
            ),
        });
    }

    let mut rng = SplitMix64::new(args.seed);
    let mut operand = |path: &Option<PathBuf>| -> Result<FieldMatrix, Failure> {
        let m = match path {
            Some(path) => read_matrix_in(BufReader::new(File::open(path)?), &ctx)?,
            None => rng.field_matrix(&ctx, args.size, args.size),
        };
        if m.rows() != args.size || m.cols() != args.size {
            return Err(Error::DimensionMismatch(format!(
                "operand is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                args.size,
                args.size
            ))
            .into());
        }
        Ok(m)
    };
    let x = operand(&args.a)?;
    let y = operand(&args.b)?;

    let params = choose_mm_params(args.size, ctx.p(), args.mem_cap, args.base_size);
    let mut c = CostCounters::new();
    let mut build_ns = 0;
    let (out, algo_name, param) = match args.algo {
        MmAlgoArg::Naive => {
            let start = Instant::now();
            let out = mm_naive_counted(&x, &y, &mut c)?;
            c.wall_ns = start.elapsed().as_nanos() as u64;
            (out, "naive", 0)
        }
        MmAlgoArg::Recursive | MmAlgoArg::RecursiveTable => {
            let table = if args.algo == MmAlgoArg::RecursiveTable {
                let start = Instant::now();
                let t = ProductTable::build(
                    &ctx,
                    params.effective_s.min(args.size.max(1)),
                    args.mem_cap,
                )?;
                build_ns = start.elapsed().as_nanos() as u64;
                Some(t)
            } else {
                None
            };
            let start = Instant::now();
            let out = mm_recursive(&x, &y, &id, &params, table.as_ref(), &mut c)?;
            c.wall_ns = start.elapsed().as_nanos() as u64;
            let name = if table.is_some() {
                "recursive-table"
            } else {
                "recursive"
            };
            (out, name, params.effective_s as u64)
        }
    };

    eprintln!(
        "matmul p={} size={} algo={} base={}: field_ops={} lookups={} bitop_cost={}",
        ctx.p(),
        args.size,
        algo_name,
        param,
        c.field_ops(),
        c.lookups,
        c.bitop_cost(ctx.p())
    );
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_matrix(&mut w, &out)?;
            w.flush()?;
        }
        None => {
            for r in 0..out.rows() {
                print_elements(&out.as_slice()[r * out.cols()..(r + 1) * out.cols()]);
            }
        }
    }
    if let Some(path) = &args.stats {
        let rec = BenchRecord::from_counters(
            Problem::Matmul,
            algo_name,
            ctx.p(),
            args.size as u64,
            param,
            &c,
            build_ns,
        );
        append_csv(path, &[rec])?;
    }
    Ok(())
}

fn ratio_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.ratio.csv"))
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let id = load_identity(&args.identity)?;
    let sizes = |default: &[u64]| {
        if args.sizes.is_empty() {
            default.to_vec()
        } else {
            args.sizes.clone()
        }
    };
    let config = |sizes: Vec<u64>| SuiteConfig {
        primes: args.primes.clone(),
        sizes,
        trials: args.trials,
        seed: args.seed,
        mem_cap: args.mem_cap,
        base_size: args.base_size,
    };

    let mut report = SuiteReport::default();
    if matches!(args.suite, Suite::Wht | Suite::All) {
        let r = run_wht_suite(&config(sizes(&[8, 12, 16])))?;
        report.records.extend(r.records);
        report.ratios.extend(r.ratios);
    }
    if matches!(args.suite, Suite::Matmul | Suite::All) {
        let r = run_matmul_suite(&config(sizes(&[16, 32, 64])), &id)?;
        report.records.extend(r.records);
    }

    let mut w = BufWriter::new(File::create(&args.out)?);
    write_csv(&mut w, &report.records)?;
    w.flush()?;
    if !report.ratios.is_empty() {
        let path = ratio_path(&args.out);
        let mut w = BufWriter::new(File::create(&path)?);
        write_ratio_csv(&mut w, &report.ratios)?;
        w.flush()?;
        for r in &report.ratios {
            println!(
                "wht p={} n={} trial={} ratio={:.4}",
                r.p, r.size, r.trial, r.ratio
            );
        }
    }
    eprintln!(
        "wrote {} rows to {}",
        report.records.len(),
        args.out.display()
    );

    if report.diverged() {
        return Err(Failure {
            code: EXIT_DIVERGENCE,
            message: "algorithm outputs diverged; see rows with correct=false".into(),
        });
    }
    if report.errored() {
        return Err(Failure {
            code: EXIT_RESOURCE,
            message: "some cells failed to run; see rows with correct=error".into(),
        });
    }
    Ok(())
}
