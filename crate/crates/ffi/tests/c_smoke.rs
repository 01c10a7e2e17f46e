//! Compile and run a small C program against the generated header and the
//! static library, exercising the binding end to end.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "smbs.h"

static const char *MODEL =
    "{\"states\": [{\"id\": 1}, {\"id\": 2}],"
    " \"prior\": {\"states\": ["
    "  {\"state\": 1, \"jump_masses\": [{\"state\": 2, \"mass\": 1.0}],"
    "   \"precision\": {\"tail\": 1.0},"
    "   \"centering\": {\"family\": \"geometric\", \"p\": 0.5}},"
    "  {\"state\": 2, \"jump_masses\": [{\"state\": 1, \"mass\": 1.0}],"
    "   \"precision\": {\"tail\": 1.0},"
    "   \"centering\": {\"family\": \"geometric\", \"p\": 0.5}}]}}";

int main(void) {
    SmbsModel *model = NULL;
    if (smbs_model_from_json(MODEL, &model) != SmbsStatus_Ok) {
        fprintf(stderr, "from_json: %s\n", smbs_last_error_message());
        return 1;
    }
    uintptr_t n = 0;
    if (smbs_model_n_states(model, &n) != SmbsStatus_Ok || n != 2) return 2;

    uint32_t path[3] = {1, 1, 2};
    double probs[2] = {0, 0};
    if (smbs_predictive_kernel(model, path, 3, probs, 2) != SmbsStatus_Ok) return 3;
    double total = probs[0] + probs[1];
    if (total < 1.0 - 1e-12 || total > 1.0 + 1e-12) return 4;

    uint32_t extended[8];
    if (smbs_extend_path(model, path, 3, 5, 42, extended, 8) != SmbsStatus_Ok) return 5;
    if (extended[0] != 1 || extended[1] != 1 || extended[2] != 2) return 6;

    SmbsModel *posterior = NULL;
    if (smbs_model_posterior(model, path, 3, &posterior) != SmbsStatus_Ok) return 7;
    double mean = 0.0;
    if (smbs_holding_mean(posterior, 1, 3, &mean) != SmbsStatus_Ok) return 8;
    if (mean <= 0.0 || mean > 1.0) return 9;

    smbs_model_free(posterior);
    smbs_model_free(model);

    if (smbs_predictive_kernel(NULL, path, 3, probs, 2) != SmbsStatus_NullArgument) return 10;
    printf("c-smoke ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    // target/debug, derived from the test executable location
    let mut target_dir = std::env::current_exe().unwrap();
    target_dir.pop(); // test binary
    if target_dir.ends_with("deps") {
        target_dir.pop();
    }
    let static_lib = target_dir.join("libsmbs_ffi.a");
    if !static_lib.exists() {
        // `cargo test` alone does not emit the staticlib artifact
        let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
        let build = Command::new(cargo)
            .args(["build", "-p", "smbs-ffi"])
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .output()
            .unwrap();
        assert!(
            build.status.success(),
            "cargo build failed: {}",
            String::from_utf8_lossy(&build.stderr)
        );
    }
    assert!(
        static_lib.exists(),
        "static library not found at {}",
        static_lib.display()
    );

    let include_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include_dir.join("smbs.h").exists(), "header not generated");

    let work = std::env::temp_dir().join(format!("smbs-c-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let source = work.join("smoke.c");
    std::fs::write(&source, C_PROGRAM).unwrap();
    let binary = work.join("smoke");

    let compile = Command::new("cc")
        .arg(&source)
        .arg(&static_lib)
        .arg(format!("-I{}", include_dir.display()))
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc not available");
    assert!(
        compile.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().unwrap();
    assert!(
        run.status.success(),
        "c program exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "c-smoke ok");
    std::fs::remove_dir_all(&work).ok();
}
