//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "switchgraph.h"

int main(void) {
    uint32_t edges[2 * 15];
    for (uint32_t i = 0; i < 15; i++) { edges[2 * i] = i; edges[2 * i + 1] = i + 1; }
    SgGraph *g = NULL;
    if (sg_graph_new(16, edges, 15, &g) != SG_STATUS_OK) return 10;
    SgPredictor *p = NULL;
    if (sg_scs_new(g, SG_BASIS_BINARY_TREE, 0.0, 5, 0, &p) != SG_STATUS_OK) return 11;
    int wrong_last_pass = 0;
    for (int pass = 0; pass < 10; pass++) {
        for (size_t v = 0; v < 16; v++) {
            int8_t y = 0, truth = v < 6 ? 1 : -1;
            int32_t mistake = 0;
            if (sg_predict(p, v, &y) != SG_STATUS_OK) return 12;
            if (sg_update(p, truth, &mistake) != SG_STATUS_OK) return 13;
            if (pass == 9) wrong_last_pass += mistake;
        }
    }
    if (sg_update(p, 1, NULL) != SG_STATUS_PROTOCOL) return 14;
    if (sg_last_error_message() == NULL) return 15;
    printf("mistakes=%llu last_pass=%d\n", (unsigned long long)sg_mistakes(p), wrong_last_pass);
    sg_predictor_free(p);
    sg_graph_free(g);
    return wrong_last_pass == 0 ? 0 : 16;
}
"#;

/// `target/<profile>`, found from the test executable in `target/<profile>/deps`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

/// Test builds only produce the rlib, so build the static library with the
/// same cargo and profile.
fn build_static_lib() -> PathBuf {
    let dir = profile_dir();
    let mut cmd = Command::new(env!("CARGO"));
    cmd.args(["build", "--quiet", "--lib", "-p", "switchgraph-ffi"]);
    if dir.file_name().is_some_and(|n| n == "release") {
        cmd.arg("--release");
    }
    let status = cmd.status().expect("running cargo");
    assert!(status.success(), "building the static library failed");
    let lib = dir.join("libswitchgraph_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    lib
}

#[test]
fn c_program_links_and_runs() {
    let lib = build_static_lib();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .expect("running the C compiler");
    assert!(out.status.success(), "compile failed:\n{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "exit {:?}, stdout {stdout}", run.status.code());
    assert!(stdout.starts_with("mistakes="), "{stdout}");
}
