use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rydtrap.h")
}

#[test]
fn header_declares_every_entry_point() {
    let text = std::fs::read_to_string(header()).expect("build script writes the header");
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() > 15, "{exported:?}");
    for name in exported {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["typedef struct RydtrapCalculator RydtrapCalculator", "RYDTRAP_STATUS_OK = 0", "RYDTRAP_STATUS_PANIC"] {
        assert!(text.contains(ty), "{ty}");
    }
}

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "rydtrap.h"

int main(void) {
    RydtrapCalculator *calc = NULL;
    if (rydtrap_calculator_new("yb174", 532e-9, 650e-9, 9e-3, 0.6865087835782243, &calc) != RYDTRAP_STATUS_OK) return 10;
    RydtrapDepth d;
    if (rydtrap_trap_depth(calc, 75, "3S1", 0, &d) != RYDTRAP_STATUS_OK) return 11;
    if (!(d.depth_hz > 0.0) || fabs(d.ground_depth_hz - 12e6) > 1.0) return 12;
    if (rydtrap_trap_depth(calc, 75, "bogus", 0, &d) != RYDTRAP_STATUS_INVALID_ARGUMENT) return 13;
    if (rydtrap_last_error_message() == NULL) return 14;
    rydtrap_calculator_free(calc);
    printf("%.6f\n", d.n_star);
    return 0;
}
"#;

/// Compiles and runs a small C client against the shared library, when a C
/// compiler is on PATH.
#[test]
fn c_client_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let libdir = exe.parent().unwrap().parent().unwrap();
    assert!(libdir.join("librydtrap_ffi.so").exists() || libdir.join("librydtrap_ffi.dylib").exists(), "{}", libdir.display());
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("client.c");
    let bin = tmp.join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg("-L")
        .arg(libdir)
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .args(["-lrydtrap_ffi", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let n_star: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(n_star > 70.0 && n_star < 75.0);
}
