use std::path::{Path, PathBuf};

use dacalign::dp::{align_chunk, sequence_cost, BeadSet, GaleChurch};
use dacalign::synth::{generate, SynthConfig};
use dacalign::{AlignmentSet, Chunk, EmbeddingMatrix, Priors};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dacalign::cli::run(std::iter::once("dacalign").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn write_emb(dir: &Path, name: &str, rows: &[Vec<f32>], dim: usize) -> PathBuf {
    let p = dir.join(name);
    EmbeddingMatrix::from_rows(rows, dim).unwrap().save(&p).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Files for an `n`-sentence pair whose embeddings are the identity.
fn identity_inputs(dir: &Path, n: usize) -> [PathBuf; 4] {
    let lines: String = (0..n).map(|i| format!("sentence number {i}\n")).collect();
    let rows: Vec<Vec<f32>> = (0..n)
        .map(|i| (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect())
        .collect();
    [
        write(dir, "src.txt", &lines),
        write(dir, "tgt.txt", &lines),
        write_emb(dir, "src.emb", &rows, n),
        write_emb(dir, "tgt.emb", &rows, n),
    ]
}

fn input_args<'a>(files: &'a [PathBuf; 4], dim: &'a str) -> Vec<&'a str> {
    vec![
        "--src",
        s(&files[0]),
        "--tgt",
        s(&files[1]),
        "--src-emb",
        s(&files[2]),
        "--tgt-emb",
        s(&files[3]),
        "--dim",
        dim,
    ]
}

#[test]
fn single_sentence_pair_aligns() {
    let dir = TempDir::new().unwrap();
    let files = identity_inputs(dir.path(), 1);
    let mut args = vec!["align"];
    args.extend(input_args(&files, "1"));
    let out = run(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "0:0\n");
}

#[test]
fn dim_not_dividing_file_size_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let files = identity_inputs(dir.path(), 3);
    let mut args = vec!["align"];
    args.extend(input_args(&files, "2"));
    let out = run(&args);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not a multiple"), "{}", out.stderr);
    assert!(out.stderr.contains("--src-emb"), "{}", out.stderr);
}

#[test]
fn row_count_mismatch_names_both_counts() {
    let dir = TempDir::new().unwrap();
    let mut files = identity_inputs(dir.path(), 3);
    files[0] = write(dir.path(), "short.txt", "a\nb\n");
    let mut args = vec!["align"];
    args.extend(input_args(&files, "3"));
    let out = run(&args);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("3 rows") && out.stderr.contains("2 sentences"), "{}", out.stderr);
}

#[test]
fn missing_embeddings_name_the_flag() {
    let dir = TempDir::new().unwrap();
    let files = identity_inputs(dir.path(), 2);
    let out = run(&["align", "--src", s(&files[0]), "--tgt", s(&files[1])]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--src-emb"), "{}", out.stderr);
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.txt");
    let out = run(&["align", "--src", s(&missing), "--tgt", s(&missing), "--no-dac"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("nope.txt"));
}

#[test]
fn lexical_requires_ttable() {
    let dir = TempDir::new().unwrap();
    let files = identity_inputs(dir.path(), 2);
    let out = run(&["align", "--src", s(&files[0]), "--tgt", s(&files[1]), "--no-dac", "--scorer", "lexical"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--ttable"));

    let table = write(dir.path(), "t.txt", "sentence sentence 0.9\nbad line\n");
    let out = run(&[
        "align", "--src", s(&files[0]), "--tgt", s(&files[1]), "--no-dac", "--scorer", "lexical", "--ttable",
        s(&table),
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
}

#[test]
fn bad_numeric_flag_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let files = identity_inputs(dir.path(), 2);
    let mut args = vec!["align"];
    args.extend(input_args(&files, "2"));
    args.extend(["--jobs", "0"]);
    let out = run(&args);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--jobs"));
    let out = run(&["simulate", "--n", "4", "--r", "1.5"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--r"));
    let out = run(&["simulate", "--n", "30", "--r", "0.5", "--exact"]);
    assert_eq!(out.code, 2);
}

#[test]
fn dac_and_full_dp_both_valid_and_full_is_no_worse() {
    let dir = TempDir::new().unwrap();
    let pair = generate(&SynthConfig {
        beads: 120,
        seed: 4,
        ..SynthConfig::default()
    });
    let f = pair.write_to_dir(dir.path()).unwrap();
    let files = [f.src, f.tgt, f.src_emb, f.tgt_emb];

    let mut dac_args = vec!["align"];
    dac_args.extend(input_args(&files, "32"));
    let dac = run(&dac_args);
    let full = run(&["align", "--src", s(&files[0]), "--tgt", s(&files[1]), "--no-dac"]);
    assert_eq!((dac.code, full.code), (0, 0));

    let dac = AlignmentSet::parse(&dac.stdout).unwrap();
    let full = AlignmentSet::parse(&full.stdout).unwrap();
    dac.validate().unwrap();
    full.validate().unwrap();
    assert_eq!((dac.n_src, dac.n_tgt), (pair.src.len(), pair.tgt.len()));

    // Independent full DP over the same scorer is the optimum both are
    // measured against.
    let scorer = GaleChurch::from_sentences(&pair.src, &pair.tgt, &Priors::default());
    let optimum = align_chunk(&Chunk::whole(pair.src.len(), pair.tgt.len()), &scorer, &BeadSet::standard())
        .unwrap()
        .cost;
    assert!((sequence_cost(&scorer, &full.beads) - optimum).abs() < 1e-6);
    assert!(sequence_cost(&scorer, &dac.beads) >= optimum - 1e-6);
}

#[test]
fn align_writes_to_out_file_and_jobs_do_not_change_output() {
    let dir = TempDir::new().unwrap();
    let pair = generate(&SynthConfig {
        beads: 300,
        seed: 9,
        ..SynthConfig::default()
    });
    let f = pair.write_to_dir(dir.path()).unwrap();
    let files = [f.src, f.tgt, f.src_emb, f.tgt_emb];
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let out_path = dir.path().join(format!("out{jobs}.txt"));
        let mut args = vec!["align"];
        args.extend(input_args(&files, "32"));
        args.extend(["--jobs", jobs, "--max-chunk", "4", "--out", s(&out_path)]);
        let out = run(&args);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.is_empty());
        outputs.push(std::fs::read(&out_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn delimiters_of_identity_signal() {
    let dir = TempDir::new().unwrap();
    let files = identity_inputs(dir.path(), 5);
    let mut args = vec!["delimiters"];
    args.extend(input_args(&files, "5"));
    let out = run(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    // cos 1, neighbour mean (1 + 0 + 0 + 0) / 4 on both sides.
    assert_eq!(lines, ["1\t1\t1.000000\t4.000000", "2\t2\t1.000000\t4.000000", "3\t3\t1.000000\t4.000000"]);
}

#[test]
fn delimiters_of_zero_embeddings_are_empty() {
    let dir = TempDir::new().unwrap();
    let mut files = identity_inputs(dir.path(), 4);
    let zeros = vec![vec![0.0f32; 4]; 4];
    files[2] = write_emb(dir.path(), "z1.emb", &zeros, 4);
    files[3] = write_emb(dir.path(), "z2.emb", &zeros, 4);
    let mut args = vec!["delimiters"];
    args.extend(input_args(&files, "4"));
    let out = run(&args);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn delimiter_listing_is_strictly_increasing() {
    let dir = TempDir::new().unwrap();
    let pair = generate(&SynthConfig {
        beads: 200,
        seed: 2,
        ..SynthConfig::default()
    });
    let f = pair.write_to_dir(dir.path()).unwrap();
    let files = [f.src, f.tgt, f.src_emb, f.tgt_emb];
    let mut args = vec!["delimiters"];
    args.extend(input_args(&files, "32"));
    let out = run(&args);
    assert_eq!(out.code, 0);
    let pairs: Vec<(usize, usize)> = out
        .stdout
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            assert_eq!(f.len(), 4);
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert!(pairs.len() > 10);
    assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
}

#[test]
fn simulate_matches_exact_value() {
    let out = run(&["simulate", "--n", "4", "--r", "0.5", "--trials", "100000", "--seed", "42"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "n,r,mean,stderr");
    let f: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((f[2] - 3.5625).abs() <= 3.0 * f[3], "{}", lines[1]);
}

#[test]
fn simulate_degenerate_and_exact() {
    let out = run(&["simulate", "--n", "3", "--r", "1", "--trials", "10"]);
    assert_eq!(out.stdout, "n,r,mean,stderr\n3,1,1.000000,0.000000\n");
    let out = run(&["simulate", "--n", "4", "--r", "0.5", "--exact"]);
    assert_eq!(out.stdout, "n,r,mean,stderr\n4,0.5,3.562500,0.000000\n");
}

#[test]
fn simulate_is_deterministic_across_jobs() {
    let a = run(&["simulate", "--n", "50,200", "--r", "0.5,0.9", "--trials", "5000", "--jobs", "1"]);
    let b = run(&["simulate", "--n", "50,200", "--r", "0.5,0.9", "--trials", "5000", "--jobs", "8"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout.lines().count(), 5);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn evaluate_identical_files() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.txt", "0:0\n1,2:1\n3:\n:2\n");
    let out = run(&["evaluate", "--test", s(&x), "--gold", s(&x)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "1.0000\t1.0000\t1.0000\n");
}

#[test]
fn evaluate_delimiters_and_size_mismatch() {
    let dir = TempDir::new().unwrap();
    let gold = write(dir.path(), "gold.txt", "0:0\n1:1\n2:2\n3:3\n4:4\n");
    let found = write(dir.path(), "found.txt", "1\t1\t0.9\t1.2\n2\t3\t0.8\t1.1\n");
    let out = run(&["evaluate", "--delimiters", s(&found), "--gold", s(&gold)]);
    assert_eq!(out.stdout, "0.5000\t0.3333\t0.4000\n");

    let small = write(dir.path(), "small.txt", "0:0\n");
    let out = run(&["evaluate", "--test", s(&small), "--gold", s(&gold)]);
    assert_eq!(out.code, 2);
}

#[test]
fn help_lists_defaults() {
    let out = run(&["align", "--help"]);
    assert_eq!(out.code, 0);
    for needle in [
        "--threshold",
        "[default: 0.6]",
        "--knn",
        "[default: 4]",
        "[default: gale-church]",
        "--ttable",
        "[default: default]",
        "[default: 200]",
        "[default: 10]",
        "[default: 3]",
        "[default: 1]",
        "--out",
        "--no-dac",
    ] {
        assert!(out.stdout.contains(needle), "missing {needle}");
    }
    let out = run(&["simulate", "--help"]);
    assert!(out.stdout.contains("[default: 42]"));
    let out = run(&[]);
    assert_eq!(out.code, 2);
}
