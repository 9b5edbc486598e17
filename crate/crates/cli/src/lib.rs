//! The `slicegemm` subcommands as library functions writing to any sink,
//! so tests can drive them without spawning processes.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicegemm::extension::{ext_multiply, ExtMatrix};
use slicegemm::kernels::programs::{self, KernelProgram};
use slicegemm::matrix::{row_accumulate, Accumulate};
use slicegemm::oracle::{oracle_multiply, DenseMatrix};
use slicegemm::packed::{f3_packed_add_words, z4_padded_add_words, PackedRow};
use slicegemm::search::{count_programs, projections, search, verify_program, FunctionSpec, SearchOptions};
use slicegemm::{classical_multiply, m4rm_multiply, BitslicedMatrix, Field, M4rmParams, Ring};

pub const SEED_ENV: &str = "SLICEGEMM_SEED";

/// `SLICEGEMM_SEED` if set and numeric, else 0.
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

pub fn parse_rings(list: &str) -> Result<Vec<Ring>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Ring>().map_err(|e| anyhow!(e)))
        .collect()
}

pub fn parse_dims(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let n: usize = s.parse().with_context(|| format!("bad dimension `{s}`"))?;
            if n == 0 {
                bail!("dimensions must be positive");
            }
            Ok(n)
        })
        .collect()
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub fields: Vec<Ring>,
    pub max_dim: usize,
    pub seed: u64,
    /// Random multiply comparisons per field.
    pub trials: usize,
    /// Kernel whose word routine is corrupted before checking.
    pub inject_fault: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            fields: parse_rings("f2,f3,f5,f7,f4,f8,f9,f25,f27").expect("known fields"),
            max_dim: 65,
            seed: default_seed(),
            trials: 10,
            inject_fault: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub kernels_checked: usize,
    pub multiply_comparisons: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn compare_product(ring: &Ring, m: usize, l: usize, n: usize, k: usize, seed: u64) -> Result<bool> {
    let a = DenseMatrix::random(ring.clone(), m, l, seed);
    let b = DenseMatrix::random(ring.clone(), l, n, seed.wrapping_add(1));
    let expect = oracle_multiply(&a, &b)?;
    let params = M4rmParams::with_k(k);
    let got = match ring {
        Ring::Base(_) => {
            let c = m4rm_multiply(
                &BitslicedMatrix::from_dense(&a)?,
                &BitslicedMatrix::from_dense(&b)?,
                params,
            )?;
            c.to_dense()
        }
        Ring::Ext(_) => ext_multiply(&ExtMatrix::from_dense(&a)?, &ExtMatrix::from_dense(&b)?, params)?.to_dense(),
    };
    Ok(got == expect)
}

/// Kernel-exhaustive, M4RM-vs-oracle and extension-vs-oracle checks.
pub fn cmd_verify(opts: &VerifyOptions, out: &mut impl Write) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    if let Some(name) = &opts.inject_fault {
        if KernelProgram::by_name(name).is_none() {
            bail!("no kernel named `{name}`");
        }
    }
    for k in programs::all() {
        let inputs = projections(k.data_inputs());
        let mut fast = k.fast(&inputs);
        if opts.inject_fault.as_deref() == Some(k.name) {
            fast[0] = !fast[0];
        }
        let result = k.check_lanes(&fast).and_then(|_| k.check_lanes(&k.interpret(&inputs)));
        match result {
            Ok(_) => report.kernels_checked += 1,
            Err(e) => {
                writeln!(out, "FAIL kernel {e}")?;
                report.failures.push(e.to_string());
            }
        }
    }
    writeln!(
        out,
        "kernels: {} of {} exhaustive",
        report.kernels_checked,
        programs::all().len()
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for ring in &opts.fields {
        let mut ok = 0;
        for _ in 0..opts.trials {
            let dim = opts.max_dim.max(1);
            let (m, l, n) = (rng.gen_range(1..=dim), rng.gen_range(1..=dim), rng.gen_range(1..=dim));
            let k = rng.gen_range(1..=8);
            let seed: u64 = rng.gen();
            report.multiply_comparisons += 1;
            if compare_product(ring, m, l, n, k, seed)? {
                ok += 1;
            } else {
                let msg = format!("multiply {ring} {m}x{l}x{n} k={k} seed={seed}");
                writeln!(out, "FAIL {msg}")?;
                report.failures.push(msg);
            }
        }
        writeln!(out, "{ring}: {ok} of {} products match the oracle", opts.trials)?;
    }
    writeln!(
        out,
        "{} ({} multiply comparisons, seed {})",
        if report.passed() { "ok" } else { "FAILED" },
        report.multiply_comparisons,
        opts.seed
    )?;
    Ok(report)
}

// ----------------------------------------------------------------- bench

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    M4rm,
    Classical,
    Oracle,
    /// Integer-packed row addition.
    PackedBaseline,
    /// Bitsliced row addition, the counterpart of `PackedBaseline`.
    BitslicedRowadd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::M4rm,
        Algorithm::Classical,
        Algorithm::Oracle,
        Algorithm::PackedBaseline,
        Algorithm::BitslicedRowadd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::M4rm => "m4rm",
            Algorithm::Classical => "classical",
            Algorithm::Oracle => "oracle",
            Algorithm::PackedBaseline => "packed_baseline",
            Algorithm::BitslicedRowadd => "bitsliced_rowadd",
        }
    }

    pub fn is_row_add(self) -> bool {
        matches!(self, Algorithm::PackedBaseline | Algorithm::BitslicedRowadd)
    }

    /// Field operations timed for dimension `n`: `2n^3` for a product,
    /// the element additions of [`row_add_passes`] passes for row adds.
    pub fn work(self, n: usize) -> f64 {
        let nf = n as f64;
        if self.is_row_add() {
            nf * nf * row_add_passes(n) as f64
        } else {
            2.0 * nf * nf * nf
        }
    }

    pub fn supports(self, ring: &Ring) -> bool {
        match (self, ring) {
            (Algorithm::M4rm | Algorithm::Oracle, _) => true,
            (Algorithm::Classical | Algorithm::BitslicedRowadd, Ring::Base(_)) => true,
            (Algorithm::PackedBaseline, Ring::Base(f)) => matches!(f, Field::F3 | Field::Z4),
            _ => false,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| anyhow!("unknown algorithm `{s}`"))
    }
}

pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub field: String,
    pub n: usize,
    pub algorithm: Algorithm,
    /// Median wall time in milliseconds.
    pub ms: f64,
    pub gffops: f64,
}

impl BenchRecord {
    pub const CSV_HEADER: &'static str = "field,n,algorithm,ms,gffops";

    pub fn new(field: String, n: usize, algorithm: Algorithm, ms: f64) -> Self {
        let gffops = algorithm.work(n) / (ms / 1000.0) / 1e9;
        BenchRecord {
            field,
            n,
            algorithm,
            ms,
            gffops,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6}",
            self.field, self.n, self.algorithm, self.ms, self.gffops
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let cells: Vec<&str> = line.trim().split(',').collect();
        let [field, n, alg, ms, gffops] = cells[..] else {
            bail!("expected 5 columns in `{line}`");
        };
        Ok(BenchRecord {
            field: field.to_string(),
            n: n.parse()?,
            algorithm: alg.parse()?,
            ms: ms.parse()?,
            gffops: gffops.parse()?,
        })
    }
}

/// Records from CSV text, skipping `#` lines and the header.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && *l != BenchRecord::CSV_HEADER)
        .map(BenchRecord::from_csv)
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

/// Rows in the source pool of the row-add workloads.
const ROW_POOL: usize = 64;

/// A row-add pass is `n` additions of `n`-element rows. Small `n` repeats
/// the pass so each timed run covers about 2^30 element additions.
pub fn row_add_passes(n: usize) -> usize {
    ((1usize << 30) / n.max(1).pow(2)).max(1)
}

enum Workload {
    Base(BitslicedMatrix, BitslicedMatrix),
    Ext(ExtMatrix, ExtMatrix),
    Dense(DenseMatrix, DenseMatrix),
    Bitsliced(BitslicedMatrix, BitslicedMatrix),
    Packed(Vec<PackedRow>, PackedRow),
}

fn prepare(ring: &Ring, n: usize, alg: Algorithm, seed: u64) -> Result<Workload> {
    let dense = |s| DenseMatrix::random(ring.clone(), n, n, s);
    Ok(match (alg, ring) {
        (Algorithm::Oracle, _) => Workload::Dense(dense(seed), dense(seed + 1)),
        (Algorithm::M4rm | Algorithm::Classical, Ring::Base(f)) => Workload::Base(
            BitslicedMatrix::random(*f, n, n, seed)?,
            BitslicedMatrix::random(*f, n, n, seed + 1)?,
        ),
        (Algorithm::M4rm, Ring::Ext(e)) => Workload::Ext(
            ExtMatrix::random(e.clone(), n, n, seed)?,
            ExtMatrix::random(e.clone(), n, n, seed + 1)?,
        ),
        (Algorithm::BitslicedRowadd, Ring::Base(f)) => Workload::Bitsliced(
            BitslicedMatrix::random(*f, ROW_POOL, n, seed)?,
            BitslicedMatrix::zero(*f, 1, n)?,
        ),
        (Algorithm::PackedBaseline, Ring::Base(f)) => {
            let pool = BitslicedMatrix::random(*f, ROW_POOL, n, seed)?.to_dense();
            let rows = (0..ROW_POOL)
                .map(|i| PackedRow::from_values(*f, pool.row(i)))
                .collect::<slicegemm::Result<Vec<_>>>()?;
            Workload::Packed(rows, PackedRow::zero(*f, n)?)
        }
        _ => bail!("{alg} does not apply to {ring}"),
    })
}

fn run_once(w: &mut Workload, alg: Algorithm, n: usize, params: M4rmParams) -> Result<()> {
    match w {
        Workload::Dense(a, b) => {
            std::hint::black_box(oracle_multiply(a, b)?);
        }
        Workload::Base(a, b) => {
            let c = if alg == Algorithm::Classical {
                classical_multiply(a, b)?
            } else {
                m4rm_multiply(a, b, params)?
            };
            std::hint::black_box(c);
        }
        Workload::Ext(a, b) => {
            std::hint::black_box(ext_multiply(a, b, params)?);
        }
        Workload::Bitsliced(pool, acc) => {
            for i in 0..n * row_add_passes(n) {
                row_accumulate(&mut acc.row_mut(0), &pool.row(i % ROW_POOL), Accumulate::Add)?;
            }
            std::hint::black_box(&acc);
        }
        Workload::Packed(pool, acc) => {
            let z4 = acc.field() == Field::Z4;
            for i in 0..n * row_add_passes(n) {
                let src = pool[i % ROW_POOL].words();
                if z4 {
                    z4_padded_add_words(acc.words_mut(), src);
                } else {
                    f3_packed_add_words(acc.words_mut(), src);
                }
            }
            std::hint::black_box(&acc);
        }
    }
    Ok(())
}

/// Median of `reps` timed runs of `alg` at dimension `n` on seeded data.
pub fn bench_one(ring: &Ring, n: usize, alg: Algorithm, reps: usize, seed: u64, threads: usize) -> Result<BenchRecord> {
    let mut w = prepare(ring, n, alg, seed)?;
    let params = M4rmParams::default().with_threads(threads);
    let times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let t = Instant::now();
            run_once(&mut w, alg, n, params)?;
            // keep times positive even for trivial work
            Ok((t.elapsed().as_secs_f64() * 1000.0).max(1e-6))
        })
        .collect::<Result<_>>()?;
    Ok(BenchRecord::new(ring.name(), n, alg, median(times)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" | "human" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format `{s}`"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub fields: Vec<Ring>,
    pub dims: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub reps: usize,
    pub seed: u64,
    pub threads: usize,
    pub format: Format,
}

fn metadata(out: &mut impl Write, what: &str, reps: usize, seed: u64, threads: usize) -> Result<()> {
    writeln!(
        out,
        "# slicegemm {what} W={} threads={} reps={reps} seed={seed} statistic=median",
        slicegemm::W,
        threads.max(1)
    )?;
    Ok(())
}

/// Timings over a field x dimension grid, one record per applicable
/// algorithm.
pub fn cmd_bench(opts: &BenchOptions, out: &mut impl Write) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for ring in &opts.fields {
        for &n in &opts.dims {
            for &alg in &opts.algorithms {
                if alg.supports(ring) {
                    records.push(bench_one(ring, n, alg, opts.reps, opts.seed, opts.threads)?);
                }
            }
        }
    }
    metadata(out, "bench", opts.reps, opts.seed, opts.threads)?;
    match opts.format {
        Format::Csv => {
            writeln!(out, "{}", BenchRecord::CSV_HEADER)?;
            for r in &records {
                writeln!(out, "{}", r.to_csv())?;
            }
        }
        Format::Table => write_table(&records, &opts.dims, out)?,
    }
    Ok(records)
}

/// Milliseconds with fields and algorithms down, dimensions across.
fn write_table(records: &[BenchRecord], dims: &[usize], out: &mut impl Write) -> Result<()> {
    write!(out, "{:<6} {:<17}", "field", "algorithm")?;
    for n in dims {
        write!(out, " {:>12}", format!("n={n}"))?;
    }
    writeln!(out)?;
    let mut rows: Vec<(&str, Algorithm)> = Vec::new();
    for r in records {
        if !rows.contains(&(r.field.as_str(), r.algorithm)) {
            rows.push((&r.field, r.algorithm));
        }
    }
    for (field, alg) in rows {
        write!(out, "{field:<6} {:<17}", alg.name())?;
        for &n in dims {
            match records
                .iter()
                .find(|r| r.field == field && r.algorithm == alg && r.n == n)
            {
                Some(r) => write!(out, " {:>12.3}", r.ms)?,
                None => write!(out, " {:>12}", "-")?,
            }
        }
        writeln!(out)?;
    }
    writeln!(out, "(milliseconds, median)")?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FfopsOptions {
    pub field: Ring,
    pub min: usize,
    pub max: usize,
    pub step: usize,
    pub algorithms: Vec<Algorithm>,
    pub reps: usize,
    pub seed: u64,
    pub threads: usize,
}

/// CSV of effective throughput over a dimension sweep. Nothing at all is
/// written when no algorithm is requested.
pub fn cmd_ffops(opts: &FfopsOptions, out: &mut impl Write) -> Result<Vec<BenchRecord>> {
    if opts.min == 0 || opts.min > opts.max {
        bail!("need 0 < min <= max");
    }
    if opts.step == 0 {
        bail!("step must be positive");
    }
    let mut records = Vec::new();
    if opts.algorithms.is_empty() {
        return Ok(records);
    }
    metadata(out, "ffops", opts.reps, opts.seed, opts.threads)?;
    writeln!(out, "{}", BenchRecord::CSV_HEADER)?;
    for &alg in &opts.algorithms {
        if !alg.supports(&opts.field) {
            bail!("{alg} does not apply to {}", opts.field);
        }
        for n in (opts.min..=opts.max).step_by(opts.step) {
            let r = bench_one(&opts.field, n, alg, opts.reps, opts.seed, opts.threads)?;
            writeln!(out, "{}", r.to_csv())?;
            records.push(r);
        }
    }
    Ok(records)
}

// ---------------------------------------------------------------- search

#[derive(Clone, Debug)]
pub struct SearchCmd {
    /// Builtin target name or path to a spec file.
    pub target: String,
    pub max_len: usize,
    pub threads: usize,
    pub const_one: bool,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub program: Option<slicegemm::SequentialProgram>,
    pub spec: FunctionSpec,
    pub exhausted: Vec<usize>,
    pub seconds: f64,
}

pub fn resolve_target(target: &str) -> Result<FunctionSpec> {
    match FunctionSpec::builtin(target) {
        Ok(spec) => Ok(spec),
        Err(builtin_err) => {
            let path = Path::new(target);
            if !path.exists() {
                bail!("{builtin_err}; not a spec file either");
            }
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {target}"))?;
            text.parse().with_context(|| format!("parsing {target}"))
        }
    }
}

/// Prints the shortest program found in the kernel text format, or `none`.
pub fn cmd_search(cmd: &SearchCmd, out: &mut impl Write) -> Result<SearchReport> {
    let mut spec = resolve_target(&cmd.target)?;
    if cmd.const_one && !spec.const_one() {
        spec = spec.with_const_one()?;
    }
    let n = spec.program_inputs();
    writeln!(
        out,
        "# search {}: {} inputs, {} outputs, {} care patterns, max length {}",
        cmd.target,
        n,
        spec.outputs(),
        spec.care_count(),
        cmd.max_len
    )?;
    let t = Instant::now();
    let outcome = search(
        &spec,
        SearchOptions {
            max_len: cmd.max_len,
            threads: cmd.threads,
        },
    )?;
    let seconds = t.elapsed().as_secs_f64();
    if let Some(&last) = outcome.exhausted.last() {
        writeln!(out, "# no program of length <= {last}")?;
    }
    let len = match &outcome.program {
        Some(p) => {
            if !verify_program(p, &spec) {
                bail!("internal error: search returned a program that fails verification");
            }
            if spec.const_one() {
                writeln!(out, "# in{} is all ones", spec.inputs())?;
            }
            write!(out, "{p}")?;
            p.len()
        }
        None => {
            writeln!(out, "none")?;
            cmd.max_len
        }
    };
    writeln!(out, "# count_programs({n}, {len}) = {}", count_programs(n, len))?;
    writeln!(out, "# {} placements, {seconds:.3} s", outcome.nodes)?;
    Ok(SearchReport {
        program: outcome.program,
        spec,
        exhausted: outcome.exhausted,
        seconds,
    })
}
