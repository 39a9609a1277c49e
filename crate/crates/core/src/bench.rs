//! Benchmark sweeps over the transform and matrix-multiplication engines.
//!
//! Every cell runs all algorithms on the same seeded input, checks that their
//! outputs agree, and emits one [`BenchRecord`] per algorithm.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::bilinear::{
    choose_mm_params, mm_naive_counted, mm_recursive, BilinearIdentity, ProductTable,
};
use crate::cost::CostCounters;
use crate::error::{Error, Result};
use crate::field::{make_field, FieldCtx};
use crate::kron::{choose_wht_params, hadamard, wht, wht_table, WhtAlgo, NAIVE_GUARD};
use crate::rng::{mix_seed, SplitMix64};
use crate::table::TransformTable;

pub const CSV_HEADER: &str =
    "problem,algo,p,size,param,field_ops,lookups,lookup_bits,bitop_cost,wall_ns,table_build_ns,correct";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Wht,
    Polyeval,
    Matmul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Correctness {
    True,
    False,
    /// The cell could not run (resource cap, invalid input).
    Error,
}

/// One CSV row. Field order is the column order of [`CSV_HEADER`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRecord {
    pub problem: Problem,
    pub algo: String,
    pub p: u16,
    pub size: u64,
    /// `k` for table transforms, the base-case size for recursive products.
    pub param: u64,
    pub field_ops: u64,
    pub lookups: u64,
    pub lookup_bits: u64,
    pub bitop_cost: u64,
    pub wall_ns: u64,
    pub table_build_ns: u64,
    pub correct: Correctness,
}

impl BenchRecord {
    pub fn from_counters(
        problem: Problem,
        algo: &str,
        p: u16,
        size: u64,
        param: u64,
        c: &CostCounters,
        table_build_ns: u64,
    ) -> Self {
        Self {
            problem,
            algo: algo.to_string(),
            p,
            size,
            param,
            field_ops: c.field_ops(),
            lookups: c.lookups,
            lookup_bits: c.lookup_bits(),
            bitop_cost: c.bitop_cost(p),
            wall_ns: c.wall_ns,
            table_build_ns,
            correct: Correctness::True,
        }
    }

    fn failed(problem: Problem, algo: &str, p: u16, size: u64) -> Self {
        Self {
            problem,
            algo: algo.to_string(),
            p,
            size,
            param: 0,
            field_ops: 0,
            lookups: 0,
            lookup_bits: 0,
            bitop_cost: 0,
            wall_ns: 0,
            table_build_ns: 0,
            correct: Correctness::Error,
        }
    }
}

/// Appends records to a CSV file, writing the header if the file is empty.
pub fn append_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if file.metadata()?.len() == 0 {
        writeln!(file, "{CSV_HEADER}")?;
    }
    write_rows(file, records)
}

pub fn write_csv(w: impl Write, records: &[BenchRecord]) -> Result<()> {
    let mut w = w;
    writeln!(w, "{CSV_HEADER}")?;
    write_rows(w, records)
}

fn write_rows(w: impl Write, records: &[BenchRecord]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for r in records {
        out.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Table-to-butterfly cost ratio for one transform cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhtRatio {
    pub p: u16,
    pub size: u32,
    pub trial: u32,
    pub fwht_bitop_cost: u64,
    pub table_bitop_cost: u64,
    pub ratio: f64,
}

pub fn write_ratio_csv(w: impl Write, ratios: &[WhtRatio]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in ratios {
        out.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub primes: Vec<u16>,
    pub sizes: Vec<u64>,
    pub trials: u32,
    pub seed: u64,
    pub mem_cap: u64,
    /// Forced base-case size for the matrix suite.
    pub base_size: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub records: Vec<BenchRecord>,
    pub ratios: Vec<WhtRatio>,
}

impl SuiteReport {
    pub fn diverged(&self) -> bool {
        self.records.iter().any(|r| r.correct == Correctness::False)
    }

    pub fn errored(&self) -> bool {
        self.records.iter().any(|r| r.correct == Correctness::Error)
    }
}

/// Seed for the input of one cell; independent of the algorithm under test.
pub fn cell_seed(base: u64, problem: Problem, p: u16, size: u64, trial: u32) -> u64 {
    mix_seed(base, &[problem as u64, p as u64, size, trial as u64])
}

#[derive(Default)]
struct TimedTables {
    tables: HashMap<(u16, u32), (Arc<TransformTable>, u64)>,
}

impl TimedTables {
    fn get(&mut self, ctx: &FieldCtx, k: u32, mem_cap: u64) -> Result<(Arc<TransformTable>, u64)> {
        if let Some((t, ns)) = self.tables.get(&(ctx.p(), k)) {
            return Ok((Arc::clone(t), *ns));
        }
        let start = Instant::now();
        let t = Arc::new(TransformTable::build(ctx, &hadamard(ctx), k, mem_cap)?);
        let ns = start.elapsed().as_nanos() as u64;
        self.tables.insert((ctx.p(), k), (Arc::clone(&t), ns));
        Ok((t, ns))
    }
}

pub fn run_wht_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    let mut tables = TimedTables::default();
    for &p in &cfg.primes {
        let ctx = make_field(p as u32)?;
        for &n in &cfg.sizes {
            let n =
                u32::try_from(n).map_err(|_| Error::Format(format!("exponent {n} too large")))?;
            for trial in 0..cfg.trials {
                let rows = wht_cell(&ctx, n, trial, cfg, &mut tables);
                let cost = |algo: &str| {
                    rows.iter()
                        .find(|r| r.algo == algo && r.correct == Correctness::True)
                        .map(|r| r.bitop_cost)
                };
                if let (Some(f), Some(t)) = (cost("fwht"), cost("table")) {
                    report.ratios.push(WhtRatio {
                        p,
                        size: n,
                        trial,
                        fwht_bitop_cost: f,
                        table_bitop_cost: t,
                        ratio: t as f64 / f as f64,
                    });
                }
                report.records.extend(rows);
            }
        }
    }
    Ok(report)
}

fn wht_cell(
    ctx: &FieldCtx,
    n: u32,
    trial: u32,
    cfg: &SuiteConfig,
    tables: &mut TimedTables,
) -> Vec<BenchRecord> {
    let p = ctx.p();
    let size = n as u64;
    let len = match 1usize.checked_shl(n) {
        Some(len) if n < usize::BITS => len,
        _ => return vec![BenchRecord::failed(Problem::Wht, "fwht", p, size)],
    };
    let v = SplitMix64::new(cell_seed(cfg.seed, Problem::Wht, p, size, trial)).field_vec(ctx, len);

    let mut algos = vec![WhtAlgo::Fwht, WhtAlgo::Table];
    if len <= NAIVE_GUARD {
        algos.insert(0, WhtAlgo::Naive);
    }
    let params = choose_wht_params(n, p, cfg.mem_cap);
    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    for algo in algos {
        let mut c = CostCounters::new();
        let mut build_ns = 0;
        let start = Instant::now();
        let result = match algo {
            WhtAlgo::Table if !params.fallback => match tables.get(ctx, params.k, cfg.mem_cap) {
                Ok((table, ns)) => {
                    build_ns = ns;
                    let start = Instant::now();
                    let out = wht_table(ctx, &v, &table, &mut c);
                    c.wall_ns = start.elapsed().as_nanos() as u64;
                    out
                }
                Err(e) => Err(e),
            },
            _ => {
                let out = wht(ctx, &v, algo, Some(&params), &mut c);
                c.wall_ns = start.elapsed().as_nanos() as u64;
                out
            }
        };
        match result {
            Ok(out) => {
                let param = if algo == WhtAlgo::Table && !params.fallback {
                    params.k as u64
                } else {
                    0
                };
                rows.push(BenchRecord::from_counters(
                    Problem::Wht,
                    algo.name(),
                    p,
                    size,
                    param,
                    &c,
                    build_ns,
                ));
                outputs.push(out);
            }
            Err(_) => rows.push(BenchRecord::failed(Problem::Wht, algo.name(), p, size)),
        }
    }
    if outputs.windows(2).any(|w| w[0] != w[1]) {
        for r in rows.iter_mut().filter(|r| r.correct == Correctness::True) {
            r.correct = Correctness::False;
        }
    }
    rows
}

pub const MATMUL_ALGOS: [&str; 3] = ["naive", "recursive", "recursive-table"];

pub fn run_matmul_suite(cfg: &SuiteConfig, id: &BilinearIdentity) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    for &p in &cfg.primes {
        let ctx = make_field(p as u32)?;
        for &n in &cfg.sizes {
            for trial in 0..cfg.trials {
                report
                    .records
                    .extend(matmul_cell(&ctx, n as usize, trial, cfg, id));
            }
        }
    }
    Ok(report)
}

fn matmul_cell(
    ctx: &FieldCtx,
    n: usize,
    trial: u32,
    cfg: &SuiteConfig,
    id: &BilinearIdentity,
) -> Vec<BenchRecord> {
    let p = ctx.p();
    let size = n as u64;
    let mut rng = SplitMix64::new(cell_seed(cfg.seed, Problem::Matmul, p, size, trial));
    let x = rng.field_matrix(ctx, n, n);
    let y = rng.field_matrix(ctx, n, n);
    let params = choose_mm_params(n, p, cfg.mem_cap, cfg.base_size);

    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    for algo in MATMUL_ALGOS {
        let mut c = CostCounters::new();
        let mut build_ns = 0;
        let result = match algo {
            "naive" => {
                let start = Instant::now();
                let out = mm_naive_counted(&x, &y, &mut c);
                c.wall_ns = start.elapsed().as_nanos() as u64;
                out
            }
            "recursive" => {
                let start = Instant::now();
                let out = mm_recursive(&x, &y, id, &params, None, &mut c);
                c.wall_ns = start.elapsed().as_nanos() as u64;
                out
            }
            _ => {
                let start = Instant::now();
                match ProductTable::build(ctx, params.effective_s.min(n.max(1)), cfg.mem_cap) {
                    Ok(table) => {
                        build_ns = start.elapsed().as_nanos() as u64;
                        let start = Instant::now();
                        let out = mm_recursive(&x, &y, id, &params, Some(&table), &mut c);
                        c.wall_ns = start.elapsed().as_nanos() as u64;
                        out
                    }
                    Err(e) => Err(e),
                }
            }
        };
        match result {
            Ok(out) => {
                let param = if algo == "naive" {
                    0
                } else {
                    params.effective_s as u64
                };
                rows.push(BenchRecord::from_counters(
                    Problem::Matmul,
                    algo,
                    p,
                    size,
                    param,
                    &c,
                    build_ns,
                ));
                outputs.push(out);
            }
            Err(_) => rows.push(BenchRecord::failed(Problem::Matmul, algo, p, size)),
        }
    }
    if outputs.windows(2).any(|w| w[0] != w[1]) {
        for r in rows.iter_mut().filter(|r| r.correct == Correctness::True) {
            r.correct = Correctness::False;
        }
    }
    rows
}
