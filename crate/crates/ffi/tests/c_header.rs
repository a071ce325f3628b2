//! Compiles and runs a small C client against the generated header and the
//! static library. Skipped (with a note) when no C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

const CLIENT: &str = r#"
#include <stdio.h>
#include <string.h>
#include "verblex.h"

int main(int argc, char **argv) {
    VerblexResource *seed = NULL;
    if (verblex_resource_load(argv[1], &seed) != VERBLEX_STATUS_OK) {
        fprintf(stderr, "%s\n", verblex_last_error());
        return 10;
    }
    char *dump = NULL;
    if (verblex_parse_gloss(seed, "cause to die", &dump) != VERBLEX_STATUS_OK) return 11;
    if (strstr(dump, "ONT::DIE") == NULL) return 12;
    verblex_string_free(dump);
    int answer = -1;
    VerblexStatus s = verblex_entails(seed, "[ONT::KILL :agent a :affected b]@AT(t)",
                                      "[ONT::DEAD b]@AFTER(t)", 8, &answer, NULL);
    if (s != VERBLEX_STATUS_OK || answer != 1) return 13;
    if (verblex_parse_gloss(seed, "zzz", &dump) != VERBLEX_STATUS_REJECTED) return 14;
    if (verblex_last_error() == NULL) return 15;
    verblex_resource_free(seed);
    puts("ok");
    return 0;
}
"#;

#[test]
fn c_client_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libverblex_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no cc or no static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, CLIENT).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let seed = manifest.join("../core/fixtures/seed");
    let out = Command::new(&bin).arg(seed).output().unwrap();
    assert!(out.status.success(), "client exit {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
