use adic_cli::{run, Outcome};
use proptest::prelude::*;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");

fn adic(args: &[&str]) -> Outcome {
    run(std::iter::once("adic").chain(args.iter().copied()))
}

fn data(name: &str) -> String {
    format!("{DATA}/{name}")
}

#[test]
fn ord_of_a_power() {
    let o = adic(&["ord", "--ideal", "vars t1", "--cap", "8", "t1^3"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "3\n"));
}

#[test]
fn parse_error_reports_position() {
    let o = adic(&["parse", "t1^"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("byte 3"), "{}", o.stderr);
    assert!(o.stderr.contains("\n     ^"), "{}", o.stderr);
}

#[test]
fn coordinate_errors_point_into_the_whole_input() {
    let o = adic(&["nf", "--module", &data("quotient.txt"), "--level", "1", "t1, t2 +"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("byte 8"), "{}", o.stderr);
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    assert_eq!(adic(&[]).code, 2);
    assert_eq!(adic(&["frobnicate"]).code, 2);
    assert_eq!(adic(&["ord", "--cap", "x", "t1"]).code, 2);
    assert_eq!(adic(&["ord", "t1"]).code, 2);
    assert_eq!(adic(&["ord", "--field", "Fp 4", "--ideal", "vars t1", "t1"]).code, 2);
    let help = adic(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("gallery"));
}

#[test]
fn metric_pair_of_the_bseries() {
    let d = adic(&["dist", "--stream", "@bseries", "--cap", "8"]);
    assert_eq!(d.stdout, "1/2\n");
    let d = adic(&["dist", "--stream", "@bseries", "--cap", "8", "--kill", "6"]);
    assert_eq!(d.stdout, "1\n");
    let o = adic(&["ord", "--stream", "@bseries", "--kill", "6"]);
    assert_eq!(o.stdout, "0\n");
}

#[test]
fn distances_and_normal_forms() {
    let d = adic(&["dist", "--ideal", "vars t1", "t1^2", "t1^2 + t1^5"]);
    assert_eq!(d.stdout, "1/32\n");
    assert_eq!(adic(&["ord", "--ideal", "vars t1", "0"]).stdout, "inf\n");
    let nf = adic(&["nf", "--ideal", "vars t1, t2", "--level", "2", "1 + t1*t2 + t2^3"]);
    assert_eq!(nf.stdout, "t1*t2 + 1\n");
    let fp = adic(&["nf", "--field", "Fp 5", "--ideal", "vars t1", "--level", "1", "7 + 6*t1 + t1^2"]);
    assert_eq!(fp.stdout, "t1 + 2\n");
}

#[test]
fn sums_print_every_level() {
    let o = adic(&["sum", "--stream", "@geom", "--cap", "2"]);
    assert_eq!(o.stdout, "0: 1\n1: t1 + 1\n2: t1^2 + t1 + 1\n");
    let bad = adic(&["sum", "--stream", "k: t[j]"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn hom_applies_the_family() {
    let o = adic(&[
        "hom",
        "--module",
        &data("line.txt"),
        "--gens",
        &data("coefficients.txt"),
        "--stream",
        "@geom",
        "--cap",
        "3",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "0: 1\n1: 1\n2: t1^2 + 1\n3: t1^2 + 1\n");
}

#[test]
fn nakayama_exit_codes() {
    let q = data("quotient.txt");
    let ok = adic(&["nakayama", "--module", &q, "--gens", &data("generating.txt"), "--cap", "4", "t1, t2^2"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stdout.ends_with("residual: 0 at levels 0..=4\n"));
    let bad = adic(&["nakayama", "--module", &q, "--gens", &data("deficient.txt"), "0, 1"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("level 0"));
}

#[test]
fn basis_lift_exit_codes() {
    let ok = adic(&["basis-lift", "--module", &data("twisted.sys")]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stdout.starts_with("rank: 1\n"));
    let bad = adic(&["basis-lift", "--module", &data("killed.sys")]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("not flat at level 1"));
    assert_eq!(adic(&["basis-lift", "--module", &data("missing.sys")]).code, 2);
}

#[test]
fn completeness_check_exit_codes() {
    let ok = adic(&["check", "thm6", "--module", &data("quotient.txt"), "--cap", "3"]);
    assert_eq!(ok.code, 0);
    assert_eq!(ok.stdout.lines().count(), 4);
    assert_eq!(adic(&["check", "thm6", "--module", &data("infinite.txt")]).code, 2);
}

#[test]
fn gallery_full_report() {
    let o = adic(&["gallery", "--cap", "8", "--seed", "1"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(o.stdout.ends_with("OVERALL PASS\n"));
    assert!(o.stdout.contains("PASS example7.refute_n6 t7^7"));
    assert!(o.stdout.lines().all(|l| l.starts_with("PASS ") || l == "OVERALL PASS"));
}

#[test]
fn gallery_selection_and_errors() {
    let o = adic(&["gallery", "--only", "example6", "--cap", "3"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.lines().all(|l| l.contains("example6") || l == "OVERALL PASS"));
    assert_eq!(adic(&["gallery", "--only", "nope"]).code, 2);
    assert_eq!(adic(&["gallery", "--cap", "1"]).code, 2);
}

#[test]
fn files_round_trip_through_parse() {
    for f in ["quotient.txt", "twisted.sys", "killed.sys"] {
        let once = adic(&["parse", "--module", &data(f)]);
        assert_eq!(once.code, 0, "{f}: {}", once.stderr);
        let tmp = std::env::temp_dir().join(format!("adic-cli-{}-{f}", std::process::id()));
        std::fs::write(&tmp, &once.stdout).unwrap();
        let twice = adic(&["parse", "--module", tmp.to_str().unwrap()]);
        std::fs::remove_file(&tmp).unwrap();
        assert_eq!(once.stdout, twice.stdout);
    }
}

#[test]
fn binary_mirrors_the_exit_contract() {
    let bin = env!("CARGO_BIN_EXE_adic");
    let out = std::process::Command::new(bin).args(["ord", "--ideal", "vars t1", "t1^3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "3\n");
    let out = std::process::Command::new(bin).args(["parse", "t1^"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn poly_text() -> impl Strategy<Value = String> {
    let term = (-9i64..=9, 0u32..4, 0u32..3, 1u32..4);
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        if terms.is_empty() {
            return "0".to_string();
        }
        terms.iter().map(|(c, e1, e2, v)| format!("{c}*t1^{e1}*t{}^{e2}", v + 1)).collect::<Vec<_>>().join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_is_idempotent(text in poly_text()) {
        let once = adic(&["parse", &text]);
        prop_assert_eq!(once.code, 0);
        let printed = once.stdout.trim_end().to_string();
        let twice = adic(&["parse", &printed]);
        prop_assert_eq!(twice.stdout.trim_end(), printed.as_str());
    }

    #[test]
    fn stream_parse_is_idempotent(e in 0usize..4, s in 0usize..3) {
        let text = format!("k >= {s}: t1^(k + {e}) * t[k+1]");
        let once = adic(&["parse", "--stream", &text]);
        prop_assert_eq!(once.code, 0, "{}", once.stderr);
        let printed = once.stdout.trim_end().to_string();
        let twice = adic(&["parse", "--stream", &printed]);
        prop_assert_eq!(twice.stdout.trim_end(), printed.as_str());
    }
}
