use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pvcsp_ffi::*;

const XOR: &str = "structure\ndomain 0 1\nsymbol neq 2 default inf\nneq 0 1 = 0\nneq 1 0 = 0\n";
const CYCLE: &str = "instance\nvariables x y z\nterm neq x y\nterm neq y z\nterm neq z x\nthreshold 0\n";
const PARITY: &str = "measure\narity 3\ninput 0 1\noutput 0 1\nop 1 = 0 1 1 0 1 0 0 1\n";
const CONSTANT: &str = "measure\narity 1\ninput 0 1\noutput 0 1\nop 1 = 0 0\n";

fn last_error() -> Option<String> {
    let p = pvcsp_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

fn structure(text: &str) -> *mut PvcspStructure {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pvcsp_structure_parse(c.as_ptr(), &mut out) }, PvcspStatus::Ok);
    out
}

fn instance(text: &str) -> *mut PvcspInstance {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pvcsp_instance_parse(c.as_ptr(), &mut out) }, PvcspStatus::Ok);
    out
}

fn measure(text: &str) -> *mut PvcspMeasure {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pvcsp_measure_parse(c.as_ptr(), &mut out) }, PvcspStatus::Ok);
    out
}

#[test]
fn solve_separates_engines() {
    let s = structure(XOR);
    let i = instance(CYCLE);
    let mut v = PvcspVerdict::Yes;
    unsafe {
        assert_eq!(pvcsp_solve(s, i, PvcspAlgorithm::Combined, &mut v), PvcspStatus::Ok);
        assert_eq!(v, PvcspVerdict::No);
        assert_eq!(pvcsp_solve(s, i, PvcspAlgorithm::Blp, &mut v), PvcspStatus::Ok);
        assert_eq!(v, PvcspVerdict::Yes);
        assert_eq!(pvcsp_oracle(s, ptr::null(), i, &mut v), PvcspStatus::Ok);
        assert_eq!(v, PvcspVerdict::No);
        assert_eq!(pvcsp_structure_domain_size(s), 2);
        pvcsp_instance_free(i);
        pvcsp_structure_free(s);
    }
    assert_eq!(last_error(), None);
}

#[test]
fn oracle_reports_gap() {
    let d = structure(XOR);
    let g = structure("structure\ndomain 0 1\nsymbol neq 2 default 1\nneq 0 1 = 0\nneq 1 0 = 0\n");
    let i = instance(&CYCLE.replace("threshold 0", "threshold 1"));
    let mut v = PvcspVerdict::Yes;
    unsafe {
        assert_eq!(pvcsp_oracle(d, g, i, &mut v), PvcspStatus::Ok);
        pvcsp_instance_free(i);
        pvcsp_structure_free(g);
        pvcsp_structure_free(d);
    }
    assert_eq!(v, PvcspVerdict::Gap);
}

#[test]
fn check_measures() {
    let s = structure(XOR);
    let parity = measure(PARITY);
    let constant = measure(CONSTANT);
    let mut holds = false;
    unsafe {
        assert_eq!(pvcsp_check(parity, s, ptr::null(), &mut holds), PvcspStatus::Ok);
        assert!(holds);
        assert_eq!(pvcsp_check(constant, s, ptr::null(), &mut holds), PvcspStatus::Ok);
        assert!(!holds);
        pvcsp_measure_free(parity);
        pvcsp_measure_free(constant);
        pvcsp_structure_free(s);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut out = ptr::null_mut();
    let bad = CString::new(XOR.replace("neq 0 1 = 0", "neq 0 1 = 1/0")).unwrap();
    assert_eq!(
        unsafe { pvcsp_structure_parse(bad.as_ptr(), &mut out) },
        PvcspStatus::Parse
    );
    assert!(out.is_null());
    assert!(last_error().unwrap().contains("line 4"));

    assert_eq!(
        unsafe { pvcsp_structure_parse(ptr::null(), &mut out) },
        PvcspStatus::NullArgument
    );
    assert!(last_error().unwrap().contains("`text`"));

    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { pvcsp_structure_parse(invalid.as_ptr().cast(), &mut out) },
        PvcspStatus::InvalidUtf8
    );

    let weights = CString::new("measure\narity 1\ninput 0 1\noutput 0 1\nop 1/3 = 0 1\nop 1/3 = 1 0\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { pvcsp_measure_parse(weights.as_ptr(), &mut m) },
        PvcspStatus::Parse
    );

    // A successful call clears the message.
    let s = structure(XOR);
    assert_eq!(last_error(), None);

    // Instance over a symbol the structure lacks.
    let i = instance("instance\nvariables x\nterm f x\nthreshold 0\n");
    let mut v = PvcspVerdict::Yes;
    assert_eq!(
        unsafe { pvcsp_solve(s, i, PvcspAlgorithm::Combined, &mut v) },
        PvcspStatus::Input
    );
    assert!(last_error().unwrap().contains("unknown symbol"));
    assert_eq!(
        unsafe { pvcsp_solve(s, i, PvcspAlgorithm::Combined, ptr::null_mut()) },
        PvcspStatus::NullArgument
    );
    unsafe {
        pvcsp_instance_free(i);
        pvcsp_structure_free(s);
        pvcsp_structure_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_thread_local() {
    let mut out = ptr::null_mut();
    let bad = CString::new("nonsense").unwrap();
    assert_eq!(
        unsafe { pvcsp_structure_parse(bad.as_ptr(), &mut out) },
        PvcspStatus::Parse
    );
    std::thread::spawn(|| assert_eq!(last_error(), None)).join().unwrap();
    assert!(last_error().is_some());
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/pvcsp.h")).unwrap();
    for name in [
        "pvcsp_last_error",
        "pvcsp_version",
        "pvcsp_structure_parse",
        "pvcsp_structure_free",
        "pvcsp_structure_domain_size",
        "pvcsp_instance_parse",
        "pvcsp_instance_free",
        "pvcsp_measure_parse",
        "pvcsp_measure_free",
        "pvcsp_solve",
        "pvcsp_oracle",
        "pvcsp_check",
        "typedef struct PvcspStructure PvcspStructure",
        "PVCSP_STATUS_INVARIANT = 6",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles the C smoke program against the header and static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpvcsp_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        format!("{} 2\n", env!("CARGO_PKG_VERSION"))
    );
}
