use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orthofec::frame::HEADER_LEN;
use orthofec::Codebook;

fn orthofec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthofec"))
        .args(args)
        .output()
        .expect("run orthofec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn codebook_dump() {
    let o = orthofec(&["codebook", "--n", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(lines[6], "00111100");

    let o = orthofec(&["codebook", "--n", "16"]);
    let text = stdout(&o);
    let distinct: std::collections::HashSet<&str> = text.lines().collect();
    assert_eq!(distinct.len(), 32);
}

#[test]
fn invalid_n_is_usage_error() {
    let o = orthofec(&["codebook", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid code length"));
    assert_eq!(orthofec(&["codebook"]).status.code(), Some(2));
    assert_eq!(orthofec(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn encode_one_byte() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.bin");
    let framed = dir.path().join("out.ofec");
    fs::write(&input, [0x6D]).unwrap();
    let o = orthofec(&["encode", p(&input), "--n", "8", "--out", p(&framed)]);
    assert!(o.status.success());
    let bytes = fs::read(&framed).unwrap();
    let cb = Codebook::build(8).unwrap();
    assert_eq!(&bytes[..6], b"OCFEC1");
    assert_eq!(bytes[HEADER_LEN], cb.entries()[6].bits().to_packed()[0]);
    assert_eq!(
        bytes[HEADER_LEN + 1],
        cb.entries()[13].bits().to_packed()[0]
    );
}

#[test]
fn encode_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty");
    fs::write(&input, []).unwrap();
    let o = orthofec(&["encode", p(&input), "--n", "16"]);
    assert!(o.status.success());
    assert_eq!(o.stdout.len(), HEADER_LEN);
}

fn encode_text(dir: &Path, n: &str, payload: &[u8]) -> std::path::PathBuf {
    let input = dir.join("payload");
    let framed = dir.join("framed");
    fs::write(&input, payload).unwrap();
    assert!(
        orthofec(&["encode", p(&input), "--n", n, "--out", p(&framed)])
            .status
            .success()
    );
    framed
}

#[test]
fn decode_single_flip_is_corrected() {
    let dir = tempfile::tempdir().unwrap();
    let framed = encode_text(dir.path(), "8", b"orthogonal");
    let mut bytes = fs::read(&framed).unwrap();
    bytes[HEADER_LEN + 3] ^= 0b0001_0000;
    fs::write(&framed, &bytes).unwrap();
    let o = orthofec(&["decode", p(&framed)]);
    assert!(o.status.success());
    assert_eq!(o.stdout, b"orthogonal");
    let stats = String::from_utf8_lossy(&o.stderr);
    assert!(
        stats.contains("symbols=20 exact=19 corrected=1 retransmit=0"),
        "{stats}"
    );
}

#[test]
fn decode_tie_leaves_erasure_marker() {
    let dir = tempfile::tempdir().unwrap();
    // 'l' = 0110 1100: first symbol 0110 -> 00111100
    let framed = encode_text(dir.path(), "8", b"l");
    let mut bytes = fs::read(&framed).unwrap();
    bytes[HEADER_LEN] ^= 0b0000_1100;
    fs::write(&framed, &bytes).unwrap();

    let o = orthofec(&["decode", p(&framed)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let stats = String::from_utf8_lossy(&o.stderr);
    assert!(stats.contains("retransmit=1"), "{stats}");
    assert!(stats.contains("erasures=0"), "{stats}");

    let o = orthofec(&["decode", p(&framed), "--policy", "accept-nearest"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(o.stdout.len(), 1);
}

#[test]
fn decode_rejects_corrupt_streams() {
    let dir = tempfile::tempdir().unwrap();
    let framed = encode_text(dir.path(), "16", b"data");
    let bytes = fs::read(&framed).unwrap();
    fs::write(&framed, &bytes[..bytes.len() - 2]).unwrap();
    let o = orthofec(&["decode", p(&framed)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated"));

    fs::write(&framed, b"NOTAFRAME........").unwrap();
    assert_eq!(orthofec(&["decode", p(&framed)]).status.code(), Some(2));

    let framed = encode_text(dir.path(), "16", b"data");
    assert_eq!(
        orthofec(&["decode", p(&framed), "--n", "8"]).status.code(),
        Some(2)
    );
}

#[test]
fn transmit_noiseless() {
    let o = orthofec(&[
        "transmit",
        "--n",
        "8",
        "--flip-prob",
        "0",
        "--symbols",
        "1000",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "transmit,8,1000,1000,0,0,0,,1,,0,iid,0"
    );
}

#[test]
fn transmit_explicit_pattern() {
    let o = orthofec(&[
        "transmit",
        "--n",
        "8",
        "--pattern",
        "00001000",
        "--symbols",
        "64",
    ]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "transmit,8,64,0,64,0,0,,1,,0,pattern,"
    );

    let o = orthofec(&[
        "transmit",
        "--n",
        "8",
        "--pattern",
        "00001100",
        "--symbols",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn transmit_is_deterministic_and_reads_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# noisy run\nn = 16\nflip-prob = 0.08\nseed = 1234\nsymbols = 500\n",
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let oa = orthofec(&["transmit", "--config", p(&cfg), "--out", p(&a)]);
    let ob = orthofec(&["transmit", "--config", p(&cfg), "--out", p(&b)]);
    assert_eq!(oa.status.code(), ob.status.code());
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8_lossy(&ta).contains("transmit,16,500,"));

    // flags override the file
    let o = orthofec(&["transmit", "--config", p(&cfg), "--flip-prob", "0"]);
    assert!(o.status.success());

    fs::write(&cfg, "n = 16\nbogus = 1\n").unwrap();
    assert_eq!(
        orthofec(&["transmit", "--config", p(&cfg)]).status.code(),
        Some(2)
    );
}

#[test]
fn transmit_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("wave.tsv");
    let o = orthofec(&[
        "transmit",
        "--n",
        "8",
        "--symbols",
        "1",
        "--trace",
        p(&trace),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().count(), 1 + 8 + 18);
    assert!(text.starts_with("clk\tEN\ttxcode\trxcode\tcount\tortho\tdata\tREQ\n"));
}

#[test]
fn tables_reproduce_both_tables() {
    let o = orthofec(&["tables", "--trials", "20000"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let sweep = |n: &str| {
        rows.iter()
            .find(|r| r[0] == "sweep" && r[1] == n)
            .unwrap()
            .clone()
    };
    assert_eq!(sweep("8")[8], "1");
    assert_eq!(sweep("16")[8], "3");
    assert_eq!(sweep("32")[8], "7");
    assert_eq!(sweep("64")[8], "15");
    assert!(["8", "16", "32", "64"].iter().all(|n| sweep(n)[10] == "0"));
    let census = |n: &str| {
        rows.iter()
            .find(|r| r[0] == "census" && r[1] == n)
            .unwrap()
            .clone()
    };
    assert_eq!(census("8")[7], "0.9375");
    assert_eq!(census("16")[7], "0.9995");
    assert_eq!(census("32")[11], "sampled");
    assert!(rows.iter().any(|r| r[0] == "parity" && r[7] == "0.5000"));
}

#[test]
fn census_and_sweep_commands() {
    let o = orthofec(&["census", "--n", "8"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "census,8,256,16,128,112,0,0.9375,1,,,exhaustive,"
    );

    let o = orthofec(&["sweep", "--n", "16"]);
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "sweep,16,,0,22272,0,0,,3,22272,0,exhaustive,"
    );

    let o = orthofec(&["sweep", "--n", "8", "--max-weight", "2"]);
    let row = stdout(&o);
    let fields: Vec<&str> = row.lines().nth(1).unwrap().split(',').collect();
    assert_ne!(fields[10], "0");

    let a = orthofec(&["sweep", "--n", "64", "--trials", "3000", "--seed", "5"]);
    let b = orthofec(&["sweep", "--n", "64", "--trials", "3000", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
