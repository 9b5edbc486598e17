use std::io::Write;
use std::process::{Command, Output};

use slicegemm_cli::{parse_csv, Algorithm};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicegemm"))
        .args(args)
        .env_remove("SLICEGEMM_SEED")
        .output()
        .expect("spawn slicegemm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_counts_comparisons() {
    let o = run(&["verify", "--fields", "f3,f9", "--max-dim", "33", "--trials", "20"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("(40 multiply comparisons, seed 0)"), "{text}");
    assert!(text.contains("f3: 20 of 20"), "{text}");
    assert!(text.contains("f9: 20 of 20"), "{text}");
}

#[test]
fn verify_seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_slicegemm"))
        .args(["verify", "--fields", "f5", "--max-dim", "9", "--trials", "2"])
        .env("SLICEGEMM_SEED", "41")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed 41"));
}

#[test]
fn injected_fault_is_reported() {
    let o = run(&[
        "verify",
        "--fields",
        "f3",
        "--max-dim",
        "5",
        "--trials",
        "1",
        "--inject-fault",
        "f3_add",
    ]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{text}");
    assert!(text.lines().any(|l| l.starts_with("FAIL kernel f3_add")), "{text}");
    assert!(text.contains("FAILED"));
}

#[test]
fn unknown_field_is_an_error() {
    let o = run(&["verify", "--fields", "f11"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn ffops_one_row_per_dimension() {
    let o = run(&["ffops", "--field", "f3", "--min", "64", "--max", "80", "--reps", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# slicegemm ffops W=64"), "{text}");
    let records = parse_csv(&text).unwrap();
    assert_eq!(records.len(), 17);
    assert_eq!(
        records.iter().map(|r| r.n).collect::<Vec<_>>(),
        (64..=80).collect::<Vec<_>>()
    );
}

#[test]
fn ffops_without_algorithms_prints_nothing() {
    let o = run(&["ffops", "--algorithms", ""]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn bench_csv_gffops_consistent() {
    let o = run(&[
        "bench",
        "--fields",
        "f3,f5",
        "--dims",
        "64,100",
        "--algorithms",
        "m4rm,classical,packed_baseline",
        "--reps",
        "1",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let records = parse_csv(&text).unwrap();
    // packed_baseline has no F5 form
    assert_eq!(records.len(), 2 * 2 * 2 + 2);
    for r in &records {
        let work = r.algorithm.work(r.n);
        let expect = work / (r.ms * 1e-3) / 1e9;
        assert!((r.gffops - expect).abs() <= 1e-6 * expect.max(1.0), "{r:?}");
        if r.algorithm == Algorithm::PackedBaseline {
            assert_eq!(r.field, "f3");
        }
    }
}

#[test]
fn bench_table_layout() {
    let o = run(&["bench", "--fields", "f2", "--dims", "32,48", "--reps", "1"]);
    let text = stdout(&o);
    assert!(o.status.success());
    assert!(text
        .lines()
        .any(|l| l.starts_with("field") && l.contains("n=32") && l.contains("n=48")));
    assert!(text.lines().any(|l| l.starts_with("f2") && l.contains("m4rm")));
}

#[test]
fn search_builtin_targets() {
    let o = run(&["search", "--target", "xor2", "--max-len", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("xor(in0, in1)"), "{}", stdout(&o));

    let o = run(&["search", "--target", "f3-add", "--max-len", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("# no program of length <= 4"), "{text}");
    assert!(text.lines().any(|l| l == "none"));
}

#[test]
fn search_spec_file() {
    // majority of three
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "inputs 3\noutputs 1").unwrap();
    for p in 0..8u32 {
        writeln!(f, "{p:03b} -> {{{}}}", u32::from(p.count_ones() >= 2)).unwrap();
    }
    let o = run(&["search", "--target", f.path().to_str().unwrap(), "--max-len", "5"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    let prog: slicegemm::SequentialProgram = text.parse().unwrap();
    for p in 0..8u64 {
        let got = prog.eval_assignment(p).unwrap();
        assert_eq!(got, vec![p.count_ones() >= 2], "{p:03b}");
    }
}

#[test]
fn search_list_names_builtins() {
    let o = run(&["search", "--target", "-", "--list"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "fold5"));
    assert!(text.lines().any(|l| l == "f3-add"));
}
