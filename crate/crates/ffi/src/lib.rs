//! C ABI for semistream.
//!
//! Streams and trees are opaque handles created by `ss_*` constructors and
//! released with the matching `*_free`. Every fallible call returns an
//! [`SsStatus`]; on failure `ss_last_error` holds a message for the calling
//! thread. Node ids are `uint64_t`; a missing parent is `UINT64_MAX`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use semistream::bfs::{bfs_deterministic, bfs_randomized, BfsConfig};
use semistream::dfs::{dfs_aa, dfs_simple};
use semistream::error::with_retries;
use semistream::harness::{generate, parse_stream, Generator, GraphStream, StreamSession};
use semistream::mlst::approx_mlst;
use semistream::{Error, RootedTree};

/// Result codes. The nonzero values match the CLI exit codes where both exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    Other = 1,
    Parameter = 2,
    Domain = 3,
    RetriesExhausted = 4,
    Budget = 5,
    MalformedStream = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// An edge stream, insertion-only or turnstile.
pub struct SsStream {
    stream: GraphStream,
}

/// A rooted spanning tree with the number of passes that produced it.
pub struct SsTree {
    tree: RootedTree,
    passes: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> SsStatus {
    match e {
        Error::Parameter(_) => SsStatus::Parameter,
        Error::Domain(_) => SsStatus::Domain,
        Error::Retryable(_) | Error::RetriesExhausted { .. } => SsStatus::RetriesExhausted,
        Error::BudgetExceeded { .. } => SsStatus::Budget,
        Error::MalformedStream(_) => SsStatus::MalformedStream,
        _ => SsStatus::Other,
    }
}

struct Failure(SsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body`, turning errors and panics into a status plus last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            SsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SsStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SsStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(SsStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(SsStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(SsStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn node(x: u64) -> Result<usize, Failure> {
    usize::try_from(x).map_err(|_| Failure(SsStatus::Parameter, format!("node {x} out of range")))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `ss_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a stream in the text format (`n <N> model <ins|turn>` header,
/// then `+ u v` / `- u v` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_stream_parse(text: *const c_char, out: *mut *mut SsStream) -> SsStatus {
    guard(|| {
        let stream = parse_stream(c_str(text)?)?;
        put(out, SsStream { stream })
    })
}

/// Generates a fixture stream, e.g. `gnp:100,0.05` or `layered:1000,25`.
/// With `turnstile` nonzero, deletions of extra edges are mixed in.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_stream_generate(spec: *const c_char, seed: u64, turnstile: i32, out: *mut *mut SsStream) -> SsStatus {
    guard(|| {
        let kind: Generator = c_str(spec)?.parse()?;
        let mut stream = generate(&kind, seed)?;
        if turnstile != 0 {
            stream = stream.with_churn(seed, stream.n())?;
        }
        put(out, SsStream { stream })
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_stream_nodes(stream: *const SsStream) -> u64 {
    stream.as_ref().map_or(0, |s| s.stream.n() as u64)
}

/// Nonzero for turnstile streams.
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_stream_is_turnstile(stream: *const SsStream) -> i32 {
    stream.as_ref().is_some_and(|s| s.stream.model() == semistream::Model::Turnstile) as i32
}

/// # Safety
/// `stream` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn ss_stream_free(stream: *mut SsStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

unsafe fn run_tree(
    stream: *const SsStream,
    out: *mut *mut SsTree,
    alg: impl FnOnce(&mut StreamSession<'_>) -> semistream::Result<RootedTree>,
) -> SsStatus {
    guard(|| {
        let s = handle(stream)?;
        let mut session = StreamSession::new(&s.stream);
        let tree = alg(&mut session)?;
        put(out, SsTree { tree, passes: session.passes() })
    })
}

/// Approximate max-leaf spanning tree.
///
/// # Safety
/// `stream` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_mlst(stream: *const SsStream, epsilon: f64, seed: u64, out: *mut *mut SsTree) -> SsStatus {
    run_tree(stream, out, |s| approx_mlst(s, epsilon, seed))
}

/// Exact BFS tree keeping ceil(n/p) neighbours per node, in O(p) passes
/// (insertion-only streams).
///
/// # Safety
/// `stream` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_bfs_deterministic(stream: *const SsStream, root: u64, p: u64, out: *mut *mut SsTree) -> SsStatus {
    run_tree(stream, out, |s| bfs_deterministic(s, node(root).map_err(|f| Error::Parameter(f.1))?, p as usize)?.tree())
}

/// BFS tree from sampled centers. `k` is the center budget and
/// `confidence` the radius constant (3 is the usual choice). Retries up to
/// five times with derived seeds.
///
/// # Safety
/// `stream` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_bfs_randomized(
    stream: *const SsStream,
    root: u64,
    k: u64,
    confidence: f64,
    seed: u64,
    out: *mut *mut SsTree,
) -> SsStatus {
    run_tree(stream, out, |s| {
        let root = node(root).map_err(|f| Error::Parameter(f.1))?;
        let cfg = |seed| BfsConfig { confidence, ..BfsConfig::new(k as usize, seed) };
        with_retries(seed, 5, |seed| bfs_randomized(s, root, &cfg(seed)))?.0.tree()
    })
}

/// DFS tree by layered certificates, freezing `k` layers per round.
///
/// # Safety
/// `stream` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_dfs_simple(stream: *const SsStream, root: u64, k: u64, seed: u64, out: *mut *mut SsTree) -> SsStatus {
    run_tree(stream, out, |s| Ok(dfs_simple(s, node(root).map_err(|f| Error::Parameter(f.1))?, k as usize, seed)?.tree))
}

/// DFS tree by separator decomposition with parameters `1 <= s <= k <= n`.
///
/// # Safety
/// `stream` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_dfs_aa(stream: *const SsStream, root: u64, k: u64, s: u64, seed: u64, out: *mut *mut SsTree) -> SsStatus {
    run_tree(stream, out, |sess| Ok(dfs_aa(sess, node(root).map_err(|f| Error::Parameter(f.1))?, k as usize, s as usize, seed)?.tree))
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_nodes(tree: *const SsTree) -> u64 {
    tree.as_ref().map_or(0, |t| t.tree.n() as u64)
}

/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_root(tree: *const SsTree) -> u64 {
    tree.as_ref().map_or(u64::MAX, |t| t.tree.root() as u64)
}

/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_leaves(tree: *const SsTree) -> u64 {
    tree.as_ref().map_or(0, |t| t.tree.leaf_count() as u64)
}

/// Stream passes used to build the tree.
///
/// # Safety
/// `tree` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_passes(tree: *const SsTree) -> u64 {
    tree.as_ref().map_or(0, |t| t.passes as u64)
}

/// Copies the parent of every node into `buf` (`UINT64_MAX` for the root).
/// `len` must be at least the node count.
///
/// # Safety
/// `tree` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_parents(tree: *const SsTree, buf: *mut u64, len: usize) -> SsStatus {
    guard(|| {
        let t = handle(tree)?;
        copy_out(buf, len, t.tree.parents().iter().map(|p| p.map_or(u64::MAX, |p| p as u64)))
    })
}

/// Copies the depth of every node into `buf`.
///
/// # Safety
/// `tree` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_depths(tree: *const SsTree, buf: *mut u64, len: usize) -> SsStatus {
    guard(|| {
        let t = handle(tree)?;
        copy_out(buf, len, (0..t.tree.n()).map(|x| t.tree.depth(x) as u64))
    })
}

unsafe fn copy_out(buf: *mut u64, len: usize, values: impl ExactSizeIterator<Item = u64>) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(Failure(SsStatus::NullPointer, "null buffer".into()));
    }
    if len < values.len() {
        return Err(Failure(SsStatus::BufferTooSmall, format!("buffer holds {len} values, need {}", values.len())));
    }
    let out = std::slice::from_raw_parts_mut(buf, len);
    for (slot, v) in out.iter_mut().zip(values) {
        *slot = v;
    }
    Ok(())
}

/// # Safety
/// `tree` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn ss_tree_free(tree: *mut SsTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}
