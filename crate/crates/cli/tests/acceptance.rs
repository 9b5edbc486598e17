//! The nine acceptance criteria, one PASS/FAIL line each. Runs without the
//! libtest harness; exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicegemm::extension::{ext_multiply, ext_multiply_counted};
use slicegemm::kernels::programs;
use slicegemm::oracle::oracle_multiply;
use slicegemm::packed::double_packing_capacity;
use slicegemm::search::{count_programs, enumerate_programs, projections, verify_program};
use slicegemm::{
    m4rm_multiply, BitslicedMatrix, DenseMatrix, ExtFieldSpec, ExtMatrix, Field, M4rmParams, Ring, SequentialProgram,
};
use slicegemm_cli::{
    cmd_bench, cmd_ffops, cmd_search, parse_csv, Algorithm, BenchOptions, BenchRecord, FfopsOptions, Format, SearchCmd,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn kernels_exhaustive() -> Check {
    let t = Instant::now();
    let mut cases = 0;
    for k in programs::all() {
        let inputs = projections(k.data_inputs());
        cases += k.check_lanes(&k.fast(&inputs)).map_err(|e| e.to_string())?;
        k.check_lanes(&k.interpret(&inputs))
            .map_err(|e| format!("interpreted: {e}"))?;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3} s"))?;
    Ok(format!(
        "{} kernels, {cases} lane patterns, {:.1} ms",
        programs::all().len(),
        secs * 1e3
    ))
}

fn op_counts() -> Check {
    let exact = [
        ("f3_add", 6),
        ("f3_sub", 6),
        ("f3_neg", 1),
        ("z4_add", 4),
        ("f7_add", 17),
        ("f7_double", 0),
        ("f7_neg", 3),
        ("f7_reduce", 5),
        ("f5_fold5", 8),
        ("f5_add", 20),
    ];
    let bounded = [
        ("f5_double", 5),
        ("f5_neg", 6),
        ("f5_reduce", 8),
        ("z8_add", 11),
        ("z8_neg", 7),
    ];
    let parsed_len = |name: &str| -> Result<usize, String> {
        let k = programs::KernelProgram::by_name(name).ok_or(format!("no kernel {name}"))?;
        let p: SequentialProgram = k.to_text().parse().map_err(|e| format!("{name}: {e}"))?;
        Ok(p.len())
    };
    let mut seen = Vec::new();
    for (name, n) in exact {
        let got = parsed_len(name)?;
        ensure(got == n, || format!("{name} has {got} ops, expected {n}"))?;
        seen.push(format!("{name}={got}"));
    }
    for (name, n) in bounded {
        let got = parsed_len(name)?;
        ensure(got <= n, || format!("{name} has {got} ops, bound {n}"))?;
        seen.push(format!("{name}={got}<={n}"));
    }
    Ok(seen.join(" "))
}

fn m4rm_exact() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut products = 0;
    for f in [Field::F2, Field::F3, Field::F5, Field::F7] {
        let ring = Ring::Base(f);
        let mut shapes: Vec<(usize, usize, usize)> = (0..200)
            .map(|_| (rng.gen_range(1..=65), rng.gen_range(1..=65), rng.gen_range(1..=65)))
            .collect();
        shapes.extend([(100, 100, 100), (257, 257, 257)]);
        for (m, l, n) in shapes {
            let seed: u64 = rng.gen();
            let a = DenseMatrix::random(ring.clone(), m, l, seed);
            let b = DenseMatrix::random(ring.clone(), l, n, seed ^ 1);
            let expect = oracle_multiply(&a, &b).map_err(|e| e.to_string())?;
            let (ba, bb) = (
                BitslicedMatrix::from_dense(&a).unwrap(),
                BitslicedMatrix::from_dense(&b).unwrap(),
            );
            let default = m4rm_multiply(&ba, &bb, M4rmParams::default()).map_err(|e| e.to_string())?;
            ensure(default.to_dense() == expect, || {
                format!("{f} {m}x{l}x{n} seed {seed} default k")
            })?;
            for k in 1..=8 {
                let c = m4rm_multiply(&ba, &bb, M4rmParams::with_k(k)).map_err(|e| e.to_string())?;
                ensure(c.to_dense() == expect, || format!("{f} {m}x{l}x{n} seed {seed} k={k}"))?;
            }
            products += 9;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{products} products over f2,f3,f5,f7, k=1..8, {secs:.1} s"))
}

/// Schoolbook polynomial product mod the defining polynomial.
fn poly_mul(spec: &ExtFieldSpec, a: u32, b: u32) -> u32 {
    let p = spec.base.order();
    let (x, y) = (spec.coeffs(a), spec.coeffs(b));
    let d = x.len();
    let mut prod = vec![0u32; 2 * d - 1];
    for i in 0..d {
        for j in 0..d {
            prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = std::mem::take(&mut prod[k]);
        for (i, &li) in spec.defining_low().iter().enumerate() {
            prod[k - d + i] = (prod[k - d + i] + (p - li % p) * c) % p;
        }
    }
    spec.from_coeffs(&prod[..d]).unwrap()
}

fn extension_fields() -> Check {
    let mut notes = Vec::new();
    for spec in ExtFieldSpec::all() {
        let name = spec.name();
        let ring = Ring::Ext(spec.clone());
        let want = if spec.degree() == 2 { 3 } else { 6 };
        for seed in 0..3 {
            let a = ExtMatrix::random(spec.clone(), 32, 32, seed).unwrap();
            let b = ExtMatrix::random(spec.clone(), 32, 32, seed + 100).unwrap();
            let (c, count) = ext_multiply_counted(&a, &b, M4rmParams::default()).map_err(|e| e.to_string())?;
            ensure(count == want, || {
                format!("{name}: {count} base multiplies, expected {want}")
            })?;
            let expect = oracle_multiply(&a.to_dense(), &b.to_dense()).map_err(|e| e.to_string())?;
            ensure(c.to_dense() == expect, || {
                format!("{name}: 32x32 seed {seed} differs from oracle")
            })?;
        }
        let q = spec.order();
        for x in 0..q {
            let mut row_seen = vec![false; q as usize];
            for y in 0..q {
                let one = |v| ExtMatrix::from_dense(&DenseMatrix::new(ring.clone(), 1, 1, vec![v]).unwrap()).unwrap();
                let got = ext_multiply(&one(x), &one(y), M4rmParams::default())
                    .map_err(|e| e.to_string())?
                    .get(0, 0)
                    .unwrap();
                let expect = poly_mul(&spec, x, y);
                ensure(got == expect && ring.mul(x, y) == expect, || {
                    format!("{name}: {x}*{y} gave {got}, expected {expect}")
                })?;
                row_seen[got as usize] = true;
            }
            // a field: multiplication by a nonzero element permutes the elements
            ensure(x == 0 || row_seen.iter().all(|&s| s), || {
                format!("{name}: {x} is a zero divisor")
            })?;
        }
        notes.push(format!("{name}:{want}x,{q}x{q} table"));
    }
    Ok(notes.join(" "))
}

fn counting_formula() -> Check {
    let n45 = count_programs(4, 5);
    let n46 = count_programs(4, 6);
    ensure(n45 == BigUint::from(128_595_600u64), || format!("N(4,5) = {n45}"))?;
    ensure(n46 == BigUint::from(13_888_324_800u64), || format!("N(4,6) = {n46}"))?;
    for (n, l) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        let brute = enumerate_programs(n, l).len();
        let formula = count_programs(n, l);
        ensure(BigUint::from(brute) == formula, || {
            format!("N({n},{l}): enumerated {brute}, formula {formula}")
        })?;
    }
    Ok(format!(
        "N(4,5)={n45} N(4,6)={n46}, brute force agrees on 4 small cases"
    ))
}

fn search_regression() -> Check {
    let mut notes = Vec::new();
    for (target, max_len, want) in [("f3-add", 6, Some(6)), ("fold5", 8, None)] {
        let cmd = SearchCmd {
            target: target.into(),
            max_len,
            threads: 1,
            const_one: false,
        };
        let mut sink = Vec::new();
        let report = cmd_search(&cmd, &mut sink).map_err(|e| e.to_string())?;
        let prog = report.program.ok_or(format!("{target}: none within {max_len}"))?;
        ensure(verify_program(&prog, &report.spec), || {
            format!("{target}: program fails verification")
        })?;
        ensure(want.is_none_or(|w| prog.len() == w), || {
            format!("{target}: length {}", prog.len())
        })?;
        ensure(prog.len() <= max_len, || format!("{target}: length {}", prog.len()))?;
        ensure(report.seconds < 600.0, || format!("{target}: {:.1} s", report.seconds))?;
        let minimal = report.exhausted.last().is_some_and(|&l| l + 1 == prog.len());
        notes.push(format!(
            "{target}={} ops in {:.2} s{}",
            prog.len(),
            report.seconds,
            if minimal { " (shorter lengths exhausted)" } else { "" }
        ));
    }
    Ok(notes.join(", "))
}

fn bench_csv(dims: Vec<usize>, algorithms: Vec<Algorithm>) -> Result<Vec<BenchRecord>, String> {
    let opts = BenchOptions {
        fields: vec![Ring::Base(Field::F3)],
        dims,
        algorithms,
        reps: 5,
        seed: 0,
        threads: 1,
        format: Format::Csv,
    };
    let mut sink = Vec::new();
    cmd_bench(&opts, &mut sink).map_err(|e| e.to_string())?;
    parse_csv(&String::from_utf8(sink).unwrap()).map_err(|e| e.to_string())
}

fn throughput() -> Check {
    // judged at 16384; 4096 is reported alongside
    const JUDGED: usize = 16384;
    let records = bench_csv(
        vec![4096, JUDGED],
        vec![Algorithm::PackedBaseline, Algorithm::BitslicedRowadd],
    )?;
    let find = |n, alg| {
        records
            .iter()
            .find(|r| r.n == n && r.algorithm == alg)
            .map(|r| r.gffops)
    };
    let ratio = |n| -> Result<f64, String> {
        let packed = find(n, Algorithm::PackedBaseline).ok_or("missing packed record")?;
        let sliced = find(n, Algorithm::BitslicedRowadd).ok_or("missing bitsliced record")?;
        Ok(sliced / packed)
    };
    let (small, judged) = (ratio(4096)?, ratio(JUDGED)?);
    ensure(judged >= 1.5, || {
        format!("row add ratio {judged:.2} at n={JUDGED} (n=4096: {small:.2})")
    })?;

    let mm = bench_csv(vec![1024], vec![Algorithm::M4rm, Algorithm::Classical])?;
    let ms = |alg| {
        mm.iter()
            .find(|r| r.algorithm == alg)
            .map(|r| r.ms)
            .ok_or("missing multiply record")
    };
    let (m4rm, classical) = (ms(Algorithm::M4rm)?, ms(Algorithm::Classical)?);
    ensure(m4rm <= classical, || {
        format!("m4rm {m4rm:.2} ms vs classical {classical:.2} ms at n=1024")
    })?;
    Ok(format!(
        "row add bitsliced/packed {judged:.2}x at n={JUDGED} ({small:.2}x at n=4096); n=1024 m4rm {m4rm:.2} ms, classical {classical:.2} ms"
    ))
}

fn capacity() -> Check {
    let (c5, c7) = (double_packing_capacity(1000, 5), double_packing_capacity(1000, 7));
    ensure(c5 == 3 && c7 == 3, || format!("capacities {c5} and {c7}"))?;
    Ok("3 entries per double for p=5 and p=7 at n=1000".into())
}

fn jigsaw() -> Check {
    let opts = FfopsOptions {
        field: Ring::Base(Field::F3),
        min: 64,
        max: 192,
        step: 1,
        algorithms: vec![Algorithm::M4rm],
        reps: 3,
        seed: 0,
        threads: 1,
    };
    let mut sink = Vec::new();
    let records = cmd_ffops(&opts, &mut sink).map_err(|e| e.to_string())?;
    ensure(records.len() == 129, || format!("{} rows", records.len()))?;
    let g: Vec<f64> = records.iter().map(|r| r.gffops).collect();
    let maxima: Vec<usize> = (1..g.len() - 1)
        .filter(|&i| g[i] > g[i - 1] && g[i] > g[i + 1])
        .map(|i| records[i].n)
        .collect();
    ensure(maxima.len() >= 2, || format!("{} local maxima", maxima.len()))?;
    let at = |n: usize| g[n - 64];
    Ok(format!(
        "{} local maxima; gffops n=128 {:.2} vs n=129 {:.2}, n=191 {:.2} vs n=192 {:.2}",
        maxima.len(),
        at(128),
        at(129),
        at(191),
        at(192)
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("kernel exhaustive correctness", kernels_exhaustive),
        ("op-count ledger", op_counts),
        ("m4rm exactness", m4rm_exact),
        ("extension multiply counts and exactness", extension_fields),
        ("counting formula", counting_formula),
        ("search regression", search_regression),
        ("throughput ordering", throughput),
        ("capacity datum", capacity),
        ("jigsaw observability", jigsaw),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
