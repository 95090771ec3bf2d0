use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pvcsp_core::format::{parse_measure, parse_structure};
use tempfile::TempDir;

const XOR: &str = "\
structure
domain 0 1
symbol neq 2 default inf
neq 0 1 = 0
neq 1 0 = 0
";

const ODD_CYCLE: &str = "\
instance
variables x y z
term neq x y
term neq y z
term neq z x
threshold 0
";

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn pvcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvcsp"))
        .args(args)
        .env_remove("PVCSP_CAP")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn odd_cycle_separates_combined_from_blp() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let inst = sb.file("cycle.instance", ODD_CYCLE);
    let combined = pvcsp(&["solve", "--structure", s(&st), "--instance", s(&inst)]);
    assert_eq!(code(&combined), 1);
    assert!(stdout(&combined).contains("aip value      inf"));
    let blp = pvcsp(&[
        "solve",
        "--structure",
        s(&st),
        "--instance",
        s(&inst),
        "--algorithm",
        "blp",
    ]);
    assert_eq!(code(&blp), 0);
    let oracle = pvcsp(&[
        "solve",
        "--structure",
        s(&st),
        "--instance",
        s(&inst),
        "--algorithm",
        "oracle",
    ]);
    assert_eq!(code(&oracle), 1);
    assert_eq!(stdout(&oracle).trim(), "NO");
}

#[test]
fn gap_instance_exits_zero() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    // Δ has no solution; in Γ equal neighbours cost 1, so the cycle costs
    // 1 <= u there and neither side of the promise applies.
    let gamma = sb.file(
        "gamma.structure",
        "structure\ndomain 0 1\nsymbol neq 2 default 1\nneq 0 1 = 0\nneq 1 0 = 0\n",
    );
    let inst = sb.file("cycle.instance", &ODD_CYCLE.replace("threshold 0", "threshold 1"));
    let o = pvcsp(&[
        "solve",
        "--structure",
        s(&st),
        "--gamma",
        s(&gamma),
        "--instance",
        s(&inst),
        "--algorithm",
        "oracle",
    ]);
    assert_eq!(stdout(&o).trim(), "GAP");
    assert_eq!(code(&o), 0);
}

#[test]
fn json_solve_report() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let inst = sb.file("cycle.instance", ODD_CYCLE);
    let o = pvcsp(&["--json", "solve", "--structure", s(&st), "--instance", s(&inst)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "NO");
    assert_eq!(v["trace"]["blp_value"], "0");
    assert_eq!(v["trace"]["aff_value"], "inf");
}

#[test]
fn malformed_rational_is_an_input_error() {
    let sb = Sandbox::new();
    let st = sb.file("bad.structure", &XOR.replace("neq 0 1 = 0", "neq 0 1 = 1/0"));
    let inst = sb.file("cycle.instance", ODD_CYCLE);
    let o = pvcsp(&["solve", "--structure", s(&st), "--instance", s(&inst)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    let o = pvcsp(&["solve", "--structure", "/nonexistent/x", "--instance", "/nonexistent/y"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&pvcsp(&["compare", "sat"])), 2);
    assert_eq!(code(&pvcsp(&["solve"])), 2);
}

#[test]
fn check_identity_holds() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let m = sb.file("id.measure", "measure\narity 1\ninput 0 1\noutput 0 1\nop 1 = 0 1\n");
    assert_eq!(code(&pvcsp(&["check", "--structure", s(&st), "--measure", s(&m)])), 0);
}

#[test]
fn check_constant_map_reports_violator() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let m = sb.file("c.measure", "measure\narity 1\ninput 0 1\noutput 0 1\nop 1 = 0 0\n");
    let o = pvcsp(&["check", "--structure", s(&st), "--measure", s(&m)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("violated at neq (0,1): inf > 0"));
    let j = pvcsp(&["--json", "check", "--structure", s(&st), "--measure", s(&m)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["violation"]["tuples"][0][1], "1");
}

#[test]
fn check_parity_polymorphism() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let m = sb.file(
        "p.measure",
        "measure\narity 3\ninput 0 1\noutput 0 1\nop 1 = 0 1 1 0 1 0 0 1\n",
    );
    assert_eq!(code(&pvcsp(&["check", "--structure", s(&st), "--measure", s(&m)])), 0);
}

#[test]
fn weights_not_summing_to_one_are_rejected() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let m = sb.file(
        "w.measure",
        "measure\narity 1\ninput 0 1\noutput 0 1\nop 1/3 = 0 1\nop 1/3 = 1 0\n",
    );
    let o = pvcsp(&["check", "--structure", s(&st), "--measure", s(&m)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn multiset_of_size_one_is_isomorphic() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let o = pvcsp(&["construct", "multiset", "--structure", s(&st), "--partition", "sizes:1"]);
    assert_eq!(code(&o), 0);
    let built = parse_structure(&stdout(&o)).unwrap();
    let base = parse_structure(XOR).unwrap();
    assert_eq!(built.domain(), ["{0}", "{1}"]);
    assert_eq!(built.table(0), base.table(0));
}

#[test]
fn bimultiset_has_six_elements() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let out = sb.path("bi.structure");
    let o = pvcsp(&[
        "construct",
        "bimultiset",
        "--structure",
        s(&st),
        "--partition",
        "sizes:2,1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let built = parse_structure(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(built.domain_size(), 6);
}

#[test]
fn construction_is_byte_deterministic() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let run = || {
        stdout(&pvcsp(&[
            "construct",
            "bimultiset",
            "--structure",
            s(&st),
            "--partition",
            "sizes:2,2",
        ]))
    };
    assert_eq!(run(), run());
}

#[test]
fn oversized_construction_exits_two() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let o = pvcsp(&[
        "--cap",
        "10",
        "construct",
        "multiset",
        "--structure",
        s(&st),
        "--partition",
        "sizes:3",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource guard"));
    let env = Command::new(env!("CARGO_BIN_EXE_pvcsp"))
        .args(["construct", "multiset", "--structure", s(&st), "--partition", "sizes:3"])
        .env("PVCSP_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(code(&env), 2);
}

#[test]
fn malformed_partitions() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    for p in ["2,1", "sizes:", "sizes:0", "sizes:a"] {
        let o = pvcsp(&["construct", "bimultiset", "--structure", s(&st), "--partition", p]);
        assert_eq!(code(&o), 2, "{p}");
    }
}

#[test]
fn find_lift_unlift_compose_pipeline() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    let fpol = sb.path("fpol.measure");
    let o = pvcsp(&[
        "construct",
        "find-fpol",
        "--structure",
        s(&st),
        "--partition",
        "sizes:2,1",
        "--out",
        s(&fpol),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        code(&pvcsp(&["check", "--structure", s(&st), "--measure", s(&fpol)])),
        0
    );

    let lifted = sb.path("lift.measure");
    let o = pvcsp(&[
        "construct",
        "lift",
        "--structure",
        s(&st),
        "--measure",
        s(&fpol),
        "--partition",
        "sizes:2,1",
        "--out",
        s(&lifted),
    ]);
    assert_eq!(code(&o), 0);
    let multi = sb.path("multi.structure");
    pvcsp(&[
        "construct",
        "bimultiset",
        "--structure",
        s(&st),
        "--partition",
        "sizes:2,1",
        "--out",
        s(&multi),
    ]);
    let o = pvcsp(&[
        "check",
        "--structure",
        s(&multi),
        "--gamma",
        s(&st),
        "--measure",
        s(&lifted),
    ]);
    assert_eq!(code(&o), 0);

    let back = sb.path("back.measure");
    let o = pvcsp(&[
        "construct",
        "unlift",
        "--structure",
        s(&st),
        "--measure",
        s(&lifted),
        "--partition",
        "sizes:2,1",
        "--out",
        s(&back),
    ]);
    assert_eq!(code(&o), 0);
    let a = parse_measure(&std::fs::read_to_string(&fpol).unwrap()).unwrap();
    let b = parse_measure(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(a, b);

    let id = sb.file("id.measure", "measure\narity 1\ninput 0 1\noutput 0 1\nop 1 = 0 1\n");
    let composed = sb.path("composed.measure");
    let o = pvcsp(&[
        "construct",
        "compose",
        "--frachom",
        s(&id),
        "--measure",
        s(&fpol),
        "--out",
        s(&composed),
    ]);
    assert_eq!(code(&o), 0);
    let c = parse_measure(&std::fs::read_to_string(&composed).unwrap()).unwrap();
    assert_eq!(a, c);
}

#[test]
fn find_frachom_reports_absence() {
    let sb = Sandbox::new();
    let st = sb.file("xor.structure", XOR);
    // A one-point target where every pair is forbidden.
    let empty = sb.file("empty.structure", "structure\ndomain 0\nsymbol neq 2 default inf\n");
    let o = pvcsp(&["construct", "find-frachom", "--structure", s(&st), "--gamma", s(&empty)]);
    assert_eq!(code(&o), 1);
    let o = pvcsp(&["construct", "find-frachom", "--structure", s(&st), "--gamma", s(&st)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn compare_exit_codes() {
    assert_eq!(code(&pvcsp(&["compare", "xor", "--seed", "1", "--count", "20"])), 0);
    let weak = pvcsp(&[
        "compare",
        "xor",
        "--seed",
        "1",
        "--count",
        "20",
        "--algorithm",
        "combined,blp",
    ]);
    assert_eq!(code(&weak), 1);
    assert!(stdout(&weak).contains("oracle NO but blp says YES"));
    let allowed = pvcsp(&[
        "compare",
        "xor",
        "--seed",
        "1",
        "--count",
        "20",
        "--algorithm",
        "combined,blp",
        "--expect-weak",
    ]);
    assert_eq!(code(&allowed), 0);
    assert_eq!(stdout(&weak), stdout(&allowed));
}

#[test]
fn submodular_compare_agrees_for_both_engines() {
    let o = pvcsp(&[
        "compare",
        "submodular",
        "--seed",
        "4",
        "--count",
        "30",
        "--algorithm",
        "combined,blp",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn compare_reports_are_byte_identical() {
    let run = || stdout(&pvcsp(&["--json", "compare", "random", "--seed", "9", "--count", "15"]));
    let a = run();
    assert_eq!(a, run());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 15);
}

#[test]
fn gen_writes_parseable_cases() {
    let sb = Sandbox::new();
    let dir = sb.path("cases");
    let o = pvcsp(&["gen", "horn", "--seed", "5", "--count", "3", "--out", s(&dir)]);
    assert_eq!(code(&o), 0);
    for i in 0..3 {
        let delta = dir.join(format!("case{i:04}.delta"));
        let inst = dir.join(format!("case{i:04}.instance"));
        parse_structure(&std::fs::read_to_string(&delta).unwrap()).unwrap();
        let o = pvcsp(&["solve", "--structure", s(&delta), "--instance", s(&inst)]);
        assert!(matches!(code(&o), 0 | 1));
    }
    let again = pvcsp(&["gen", "horn", "--seed", "5", "--count", "3"]);
    let once = pvcsp(&["gen", "horn", "--seed", "5", "--count", "3"]);
    assert_eq!(stdout(&again), stdout(&once));
}
