//! Compiles a C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "cctree.h"

int main(void) {
    CctreeLaw *law = NULL;
    if (cctree_law_new(CCTREE_GROWTH_POISSON, CCTREE_CATASTROPHE_GEOMETRIC, 5.0, 0.6, &law) != CCTREE_STATUS_OK)
        return 10;
    CctreeSurvivalBounds b;
    if (cctree_survival_bounds(10, law, &b) != CCTREE_STATUS_OK)
        return 11;
    if (fabs(b.lower - 0.8733) > 1e-4 || fabs(b.upper - 0.8778) > 1e-4)
        return 12;
    double lo, hi;
    if (cctree_reach_cdf_bounds(10, law, 1, &lo, &hi) != CCTREE_STATUS_HYPOTHESIS)
        return 13;
    if (cctree_last_error()[0] == '\0')
        return 14;
    cctree_law_free(law);
    if (cctree_law_new(CCTREE_GROWTH_YULE, CCTREE_CATASTROPHE_GEOMETRIC, 1.0, 0.5, &law) != CCTREE_STATUS_INVALID_PARAMETER)
        return 15;
    printf("ok %s\n", cctree_version());
    return 0;
}
"#;

fn find_staticlib() -> Option<PathBuf> {
    // integration tests live in target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libcctree_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = find_staticlib() else {
        panic!("libcctree_ffi.a not found next to the test binary");
    };
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
