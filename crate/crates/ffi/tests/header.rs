//! Compiles a C program against the generated header and, when the shared
//! library is present, links and runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "logpurity.h"

int main(void) {
    size_t dims[3];
    size_t len = 0;
    if (lp_projective_cohomology(2, 2, 1, 0, NULL, 0, dims, 3, &len) != LP_STATUS_OK) return 10;
    if (len != 3 || dims[0] != 0 || dims[1] != 1 || dims[2] != 0) return 11;

    LpRing *ring = NULL;
    uint8_t log[1] = {1};
    if (lp_ring_new(3, 1, log, 1, 0, &ring) != LP_STATUS_OK) return 12;
    LpForm *form = NULL;
    if (lp_form_parse(ring, "T1^3 dlogT1", -1, &form) != LP_STATUS_OK) return 13;
    LpForm *image = NULL;
    if (lp_form_cartier(form, &image) != LP_STATUS_OK) return 14;
    char buf[64];
    size_t needed = 0;
    if (lp_form_to_string(image, buf, sizeof buf, &needed) != LP_STATUS_OK) return 15;
    printf("%s\n", buf);
    lp_form_free(image);
    lp_form_free(form);
    lp_ring_free(ring);

    if (lp_ring_new(4, 1, NULL, 0, 0, &ring) != LP_STATUS_INVALID_ARGUMENT) return 16;
    if (strlen(lp_last_error()) == 0) return 17;
    return 0;
}
"#;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

/// `target/<profile>` holding the cdylib, found from this test binary's path.
fn profile_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    let dir = if deps.ends_with("deps") { deps.parent()? } else { deps };
    Some(dir.to_path_buf())
}

fn write_program(dir: &Path) -> PathBuf {
    let src = dir.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    src
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/logpurity.h")).unwrap();
    for name in [
        "LP_STATUS_OK = 0",
        "LP_STATUS_RESOURCE_LIMIT = 2",
        "typedef struct LpRing LpRing",
        "lp_ring_new(",
        "lp_form_cartier(",
        "lp_projective_cohomology(",
        "lp_verify(",
        "lp_report_json(",
        "lp_last_error(",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_compiles_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let src = write_program(tmp.path());
    let include = crate_dir().join("include");
    let status = Command::new(&cc).arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(&include).arg(&src).status().unwrap();
    assert!(status.success(), "header does not compile");

    let Some(lib_dir) = profile_dir().filter(|d| d.join("liblogpurity_ffi.so").exists()) else {
        eprintln!("shared library not built; skipping link");
        return;
    };
    let exe = tmp.path().join("main");
    let status = Command::new(&cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-llogpurity_ffi")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&exe).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "T1 dlogT1");
}
