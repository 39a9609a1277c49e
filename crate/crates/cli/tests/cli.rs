use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fflut::bilinear::{BilinearIdentity, Tensor};
use fflut::io::{read_matrix, write_vec};
use fflut::make_field;
use fflut::rng::SplitMix64;
use tempfile::TempDir;

fn fflut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fflut"))
        .args(args)
        .output()
        .expect("run fflut")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn wht_table_matches_fwht_bytewise() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("fwht.bin");
    let b = dir.path().join("table.bin");
    for (algo, out) in [("fwht", &a), ("table", &b)] {
        let o = fflut(&[
            "wht",
            "--p",
            "3",
            "--n",
            "14",
            "--algo",
            algo,
            "--seed",
            "9",
            "--out",
            path_str(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn wht_reads_input_file() {
    let dir = TempDir::new().unwrap();
    let ctx = make_field(5).unwrap();
    let v = SplitMix64::new(3).field_vec(&ctx, 1 << 6);
    let input = dir.path().join("in.bin");
    write_vec(fs::File::create(&input).unwrap(), &v).unwrap();
    let naive = fflut(&[
        "wht",
        "--p",
        "5",
        "--n",
        "6",
        "--algo",
        "naive",
        "--in",
        path_str(&input),
    ]);
    let table = fflut(&[
        "wht",
        "--p",
        "5",
        "--n",
        "6",
        "--algo",
        "table",
        "--k",
        "2",
        "--in",
        path_str(&input),
    ]);
    assert!(naive.status.success() && table.status.success());
    assert_eq!(naive.stdout, table.stdout);
}

#[test]
fn wht_k_over_mem_cap_exits_2() {
    let o = fflut(&[
        "wht", "--p", "3", "--n", "12", "--algo", "table", "--k", "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wht_bad_prime_exits_1() {
    let o = fflut(&["wht", "--p", "4", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wht_n0_is_identity() {
    let dir = TempDir::new().unwrap();
    let ctx = make_field(7).unwrap();
    let v = fflut::FieldVec::new(&ctx, vec![5]).unwrap();
    let input = dir.path().join("in.bin");
    let out = dir.path().join("out.bin");
    write_vec(fs::File::create(&input).unwrap(), &v).unwrap();
    for algo in ["naive", "fwht", "table"] {
        let o = fflut(&[
            "wht",
            "--p",
            "7",
            "--n",
            "0",
            "--algo",
            algo,
            "--in",
            path_str(&input),
            "--out",
            path_str(&out),
        ]);
        assert!(
            o.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(fs::read(&input).unwrap(), fs::read(&out).unwrap(), "{algo}");
    }
}

#[test]
fn wht_table_save_and_load() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("t.fftt");
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    let o = fflut(&[
        "wht",
        "--p",
        "3",
        "--n",
        "8",
        "--algo",
        "table",
        "--k",
        "2",
        "--save-table",
        path_str(&table),
        "--out",
        path_str(&a),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = fflut(&[
        "wht",
        "--p",
        "3",
        "--n",
        "8",
        "--algo",
        "table",
        "--k",
        "2",
        "--load-table",
        path_str(&table),
        "--out",
        path_str(&b),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let mut bytes = fs::read(&table).unwrap();
    let last = bytes.len() - 1;
    bytes[last] = (bytes[last] + 1) % 3;
    fs::write(&table, bytes).unwrap();
    let o = fflut(&[
        "wht",
        "--p",
        "3",
        "--n",
        "8",
        "--algo",
        "table",
        "--k",
        "2",
        "--load-table",
        path_str(&table),
    ]);
    assert!(!o.status.success());
}

#[test]
fn matmul_table_matches_naive() {
    let dir = TempDir::new().unwrap();
    let naive = dir.path().join("naive.bin");
    let rec = dir.path().join("rec.bin");
    for (algo, out) in [("naive", &naive), ("recursive-table", &rec)] {
        let o = fflut(&[
            "matmul",
            "--p",
            "2",
            "--size",
            "48",
            "--base-size",
            "3",
            "--algo",
            algo,
            "--seed",
            "5",
            "--out",
            path_str(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&naive).unwrap(), fs::read(&rec).unwrap());
    let m = read_matrix(fs::File::open(&rec).unwrap()).unwrap();
    assert_eq!((m.rows(), m.cols()), (48, 48));
}

#[test]
fn matmul_size_one() {
    for algo in ["naive", "recursive", "recursive-table"] {
        let o = fflut(&["matmul", "--p", "3", "--size", "1", "--algo", algo]);
        assert!(
            o.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn matmul_rejects_broken_identity() {
    let dir = TempDir::new().unwrap();
    let mut id = BilinearIdentity::strassen();
    id.set_coefficient(Tensor::Gamma, 6, 0, 0, 0);
    let path = dir.path().join("broken.id");
    fs::write(&path, id.to_text()).unwrap();
    let o = fflut(&[
        "matmul",
        "--p",
        "3",
        "--size",
        "4",
        "--identity",
        path_str(&path),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("X[0,1] Y[1,0] Z[0,0]"), "{err}");
}

#[test]
fn stats_are_appended() {
    let dir = TempDir::new().unwrap();
    let stats = dir.path().join("stats.csv");
    for _ in 0..2 {
        let o = fflut(&[
            "matmul",
            "--p",
            "2",
            "--size",
            "8",
            "--stats",
            path_str(&stats),
        ]);
        assert!(o.status.success());
    }
    let o = fflut(&[
        "wht",
        "--p",
        "3",
        "--n",
        "6",
        "--algo",
        "table",
        "--stats",
        path_str(&stats),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&stats).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], fflut::bench::CSV_HEADER);
    assert!(lines[1].starts_with("matmul,recursive,2,8,"));
    assert!(lines[3].starts_with("wht,table,3,6,"));
}

#[test]
fn bench_matmul_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    let o = fflut(&[
        "bench",
        "--suite",
        "matmul",
        "--p",
        "2,3",
        "--sizes",
        "4,8",
        "--trials",
        "2",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], fflut::bench::CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 2 * 2 * 3);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn bench_wht_writes_ratios() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.csv");
    let o = fflut(&[
        "bench",
        "--suite",
        "wht",
        "--p",
        "3",
        "--sizes",
        "8,12",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ratios = fs::read_to_string(dir.path().join("w.ratio.csv")).unwrap();
    assert_eq!(ratios.lines().count(), 3);
}
