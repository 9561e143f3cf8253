//! End-to-end tests for the `slpdigit` binary: exit codes, output formats,
//! and round-trips through the SLP v1 text format.

use std::io::Write;
use std::process::{Command, Output};

fn slpdigit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slpdigit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn digit_of_small_power() {
    let out = slpdigit(&["digit", "--pow", "2^10", "--base", "10", "-m", "2", "-y", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gamma=0.240 (base 10)"), "got: {text}");
    assert!(text.contains("digit=2"));
}

#[test]
fn digit_with_verification_passes() {
    let out = slpdigit(&["digit", "--pow", "2^1000", "-m", "1", "-y", "4", "--verify"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("digit=6")); // 2^1000 ends in ...09376
}

#[test]
fn json_schema_is_stable() {
    let out = slpdigit(&["digit", "--pow", "3^50", "-m", "3", "-y", "3", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).expect("valid json");
    let object = value.as_object().expect("object");
    let mut keys: Vec<&str> = object.keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    let mut expected = vec![
        "gamma_digits",
        "inferred_digit",
        "ambiguous",
        "S",
        "T",
        "k",
        "P",
        "prime_count",
        "max_operand_bits",
        "elapsed_ms",
        "workers",
    ];
    expected.sort_unstable();
    assert_eq!(keys, expected);
    // 3^50 = 717897987691852588770249, third-from-last digit is 2
    assert_eq!(object["inferred_digit"], 2);
    assert_eq!(object["workers"], 1);
}

#[test]
fn large_bases_print_decimal_digit_values() {
    // 2^30 mod 40 = 24, and nu = 24/40 = 0.6 exactly
    let out = slpdigit(&["digit", "--pow", "2^30", "--base", "40", "-m", "1", "-y", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gamma=0.24 0 0 (base 40)"), "got: {text}");
    assert!(text.contains("digit=24"));
}

#[test]
fn exit_code_2_on_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.slp");
    std::fs::File::create(&path)
        .unwrap()
        .write_all(b"slp v1\nmul 4 2\n")
        .unwrap();
    let out = slpdigit(&["digit", "--slp", path.to_str().unwrap(), "-m", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = slpdigit(&["digit", "--pow", "2**10", "-m", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_3_on_infeasible_plan() {
    let out = slpdigit(&["digit", "--pow", "2^1000", "-m", "1", "--max-split", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_4_on_verification_mismatch() {
    // lying about the digit count (2^100 has 31 decimal digits) forces the
    // zero shortcut, and verification catches the bogus answer
    let out = slpdigit(&[
        "digit", "--pow", "2^100", "-m", "5", "-y", "2", "--digits-approx", "1", "--verify",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn slp_file_with_digits_approx_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.slp");
    // (1+1)^2 * 2 = 8
    std::fs::File::create(&path)
        .unwrap()
        .write_all(b"# eight\nslp v1\nadd 2 2\nmul 3 3\nmul 4 3\n")
        .unwrap();
    let out = slpdigit(&[
        "digit", "--slp", path.to_str().unwrap(), "-m", "1", "-y", "2", "--digits-approx", "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("digit=8"));
}

#[test]
fn gen_slp_round_trips() {
    let out = slpdigit(&["gen-slp", "--pow", "2^10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let prog = slpdigit::SlpProgram::parse(&text).expect("own output parses");
    assert_eq!(prog.to_text(), text);
    assert_eq!(
        prog.eval_exact().unwrap(),
        num_bigint::BigUint::from(1024u32)
    );
}

#[test]
fn gen_slp_round_trips_random_powers() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let a = rng.gen_range(2u64..=1000);
        let t = rng.gen_range(1u64..=500);
        let out = slpdigit(&["gen-slp", "--pow", &format!("{a}^{t}")]);
        assert!(out.status.success());
        let text = stdout(&out);
        let prog = slpdigit::SlpProgram::parse(&text).expect("output parses");
        assert_eq!(prog, slpdigit::SlpProgram::power(a, t), "a={a} t={t}");
    }
}

#[test]
fn bench_emits_csv_rows() {
    let out = slpdigit(&["bench", "--t-grid", "100,200", "--workers", "1,2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("t,y,M,elapsed_ms,peak_workspace_bits,mod_mul_count")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        for field in fields {
            field.parse::<u64>().expect("numeric CSV field");
        }
    }
    // determinism: identical mod_mul_count across worker counts per t
    let parse_row = |line: &str| -> Vec<u64> {
        line.split(',').map(|f| f.parse().unwrap()).collect()
    };
    let all: Vec<Vec<u64>> = text.lines().skip(1).map(parse_row).collect();
    assert_eq!(all[0][5], all[1][5]);
    assert_eq!(all[2][5], all[3][5]);
}
