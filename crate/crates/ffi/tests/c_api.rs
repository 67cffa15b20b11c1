use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use semistream::harness::{generate, Generator};
use semistream::oracle::{is_bfs_tree, is_dfs_tree};
use semistream::RootedTree;
use semistream_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ss_last_error()) }.to_str().unwrap().to_string()
}

fn stream(spec: &str, seed: u64) -> *mut SsStream {
    let spec = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ss_stream_generate(spec.as_ptr(), seed, 0, &mut out) }, SsStatus::Ok);
    out
}

fn tree_of(t: *const SsTree) -> RootedTree {
    let n = unsafe { ss_tree_nodes(t) } as usize;
    let mut buf = vec![0u64; n];
    assert_eq!(unsafe { ss_tree_parents(t, buf.as_mut_ptr(), n) }, SsStatus::Ok);
    let parent = buf.iter().map(|&p| (p != u64::MAX).then_some(p as usize)).collect();
    RootedTree::from_parents(unsafe { ss_tree_root(t) } as usize, parent).unwrap()
}

#[test]
fn trees_through_the_c_abi() {
    let s = stream("gnp:80,0.06", 2);
    let g = generate(&Generator::Gnp { n: 80, p: 0.06 }, 2).unwrap().materialize().unwrap();
    assert_eq!(unsafe { ss_stream_nodes(s) }, 80);
    assert_eq!(unsafe { ss_stream_is_turnstile(s) }, 0);
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(ss_bfs_deterministic(s, 5, 2, &mut t), SsStatus::Ok);
        let tree = tree_of(t);
        assert!(is_bfs_tree(&g, &tree));
        let mut depth = vec![0u64; 80];
        assert_eq!(ss_tree_depths(t, depth.as_mut_ptr(), 80), SsStatus::Ok);
        assert_eq!(depth[5], 0);
        assert!(ss_tree_passes(t) > 0);
        ss_tree_free(t);

        assert_eq!(ss_bfs_randomized(s, 0, 30, 3.0, 1, &mut t), SsStatus::Ok);
        assert!(is_bfs_tree(&g, &tree_of(t)));
        ss_tree_free(t);

        assert_eq!(ss_dfs_simple(s, 3, 4, 1, &mut t), SsStatus::Ok);
        assert!(is_dfs_tree(&g, &tree_of(t)));
        ss_tree_free(t);

        assert_eq!(ss_dfs_aa(s, 3, 8, 2, 1, &mut t), SsStatus::Ok);
        assert!(is_dfs_tree(&g, &tree_of(t)));
        ss_tree_free(t);

        assert_eq!(ss_mlst(s, 0.9, 1, &mut t), SsStatus::Ok);
        let tree = tree_of(t);
        tree.check_spans(&g).unwrap();
        assert_eq!(ss_tree_leaves(t) as usize, tree.leaf_count());
        ss_tree_free(t);
        ss_stream_free(s);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut s = ptr::null_mut();
    let bad = CString::new("n 3 model ins\n++ 1 2\n").unwrap();
    assert_eq!(unsafe { ss_stream_parse(bad.as_ptr(), &mut s) }, SsStatus::MalformedStream);
    assert!(s.is_null());
    assert!(last_error().contains("malformed"));

    let split = CString::new("n 4 model ins\n+ 0 1\n+ 2 3\n").unwrap();
    assert_eq!(unsafe { ss_stream_parse(split.as_ptr(), &mut s) }, SsStatus::Ok);
    assert!(last_error().is_empty());
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(ss_dfs_simple(s, 0, 2, 0, &mut t), SsStatus::Domain);
        assert_eq!(ss_bfs_deterministic(s, 9, 1, &mut t), SsStatus::Parameter);
        assert_eq!(ss_dfs_simple(ptr::null(), 0, 2, 0, &mut t), SsStatus::NullPointer);
        assert!(t.is_null());
        ss_stream_free(s);
        assert_eq!(ss_stream_generate(ptr::null(), 0, 0, &mut s), SsStatus::NullPointer);
        let bogus = CString::new("nope:3").unwrap();
        assert_eq!(ss_stream_generate(bogus.as_ptr(), 0, 0, &mut s), SsStatus::Parameter);
    }

    let p = stream("path:6", 0);
    unsafe {
        assert_eq!(ss_bfs_deterministic(p, 0, 1, &mut t), SsStatus::Ok);
        let mut small = [0u64; 3];
        assert_eq!(ss_tree_parents(t, small.as_mut_ptr(), 3), SsStatus::BufferTooSmall);
        ss_tree_free(t);
        ss_stream_free(p);
        ss_stream_free(ptr::null_mut());
        ss_tree_free(ptr::null_mut());
    }
}

#[test]
fn turnstile_streams() {
    let spec = CString::new("gnp:40,0.15").unwrap();
    let mut s = ptr::null_mut();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(ss_stream_generate(spec.as_ptr(), 3, 1, &mut s), SsStatus::Ok);
        assert_eq!(ss_stream_is_turnstile(s), 1);
        assert_eq!(ss_bfs_deterministic(s, 0, 1, &mut t), SsStatus::Domain);
        assert_eq!(ss_dfs_simple(s, 0, 3, 2, &mut t), SsStatus::Ok);
        let g = generate(&Generator::Gnp { n: 40, p: 0.15 }, 3).unwrap().materialize().unwrap();
        assert!(is_dfs_tree(&g, &tree_of(t)));
        ss_tree_free(t);
        ss_stream_free(s);
    }
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest().join("include/semistream.h")).unwrap();
    for name in [
        "SS_STATUS_OK = 0",
        "SS_STATUS_MALFORMED_STREAM = 6",
        "typedef struct SsStream SsStream;",
        "typedef struct SsTree SsTree;",
        "ss_last_error(void)",
        "ss_stream_parse(",
        "ss_stream_generate(",
        "ss_bfs_randomized(",
        "ss_dfs_aa(",
        "ss_tree_parents(",
        "ss_tree_free(",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a small C program against the header and the static
/// library, when a C compiler is available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().unwrap().parent().unwrap();
    let lib = target.join("libsemistream_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "semistream.h"
int main(void) {
    SsStream *s = NULL;
    SsTree *t = NULL;
    if (ss_stream_generate("cycle:12", 0, 0, &s) != SS_STATUS_OK) return 10;
    if (ss_dfs_simple(s, 0, 3, 0, &t) != SS_STATUS_OK) return 11;
    uint64_t parent[12];
    if (ss_tree_parents(t, parent, 12) != SS_STATUS_OK) return 12;
    printf("%llu %llu\n", (unsigned long long)ss_tree_leaves(t), (unsigned long long)parent[0]);
    ss_tree_free(t);
    if (ss_stream_parse("n 2 model ins\n++ 0 1\n", &s) != SS_STATUS_MALFORMED_STREAM) return 13;
    printf("%s\n", ss_last_error());
    ss_stream_free(s);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(format!("2 {}", u64::MAX).as_str()));
    assert!(lines.next().unwrap().contains("malformed"));
}
