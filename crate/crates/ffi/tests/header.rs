use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest_dir().join("include/nested_vt.h")).unwrap();
    for symbol in [
        "typedef struct NvtCodec NvtCodec;",
        "typedef struct NvtFragmentSet NvtFragmentSet;",
        "NVT_STATUS_OK = 0",
        "NVT_OUTCOME_AMBIGUOUS = 1",
        "nvt_codec_new(",
        "nvt_codec_free(",
        "nvt_encode(",
        "nvt_strip(",
        "nvt_verify(",
        "nvt_decode(",
        "nvt_chop_shuffle(",
        "nvt_fragments_push(",
        "nvt_fragments_copy(",
        "nvt_parity_length(",
        "nvt_syndrome(",
        "nvt_codec_rate_bounds(",
        "nvt_last_error_message(",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}

/// Directory holding the static library built alongside this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = artifact_dir().join("libnested_vt_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    let bin = tmp.path().join("smoke");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "nested_vt.h"

int main(void) {
    NvtCodec *codec = NULL;
    if (nvt_codec_new(7, 2, 2, NVT_SCHEME_ALL_ZERO, 0, &codec) != NVT_STATUS_OK) return 10;
    const uint8_t d[14] = {1,0,1,1,0,0,1,1,0,1,0,1,0,0};
    uint8_t x[32];
    if (nvt_encode(codec, d, 14, x, 32) != NVT_STATUS_OK) return 11;
    NvtFragmentSet *set = nvt_fragments_new();
    nvt_fragments_push(set, x, 10);
    nvt_fragments_push(set, x + 20, 12);
    nvt_fragments_push(set, x + 10, 10);
    uint8_t out[14];
    NvtOutcome outcome;
    uint64_t iterations = 0;
    if (nvt_decode(codec, set, 1, 1000000, true, out, 14, &outcome, &iterations) != NVT_STATUS_OK) return 12;
    if (outcome != NVT_OUTCOME_UNIQUE || memcmp(out, d, 14) != 0) return 13;
    if (nvt_codec_new(0, 2, 2, NVT_SCHEME_ALL_ZERO, 0, &codec) != NVT_STATUS_INVALID_ARGUMENT) return 14;
    printf("%s\n", nvt_last_error_message());
    nvt_fragments_free(set);
    nvt_codec_free(codec);
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("invalid argument"));
}
