use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use vlpatterns_ffi::*;

/// Two pieces of block chords: MRDCC twice in piece a, once in piece b.
const CORPUS: &str = "\
# piece onset duration pitch
a\t0\t1\t45\na\t0\t1\t62\na\t0\t1\t78\n\
a\t1\t1\t45\na\t1\t1\t61\na\t1\t1\t55\na\t1\t1\t76\n\
a\t2\t1\t50\na\t2\t1\t66\na\t2\t1\t74\n\
a\t3\t1\t45\na\t3\t1\t62\na\t3\t1\t78\n\
a\t4\t1\t45\na\t4\t1\t61\na\t4\t1\t55\na\t4\t1\t76\n\
a\t5\t1\t50\na\t5\t1\t66\na\t5\t1\t74\n\
b\t0\t1\t45\nb\t0\t1\t62\nb\t0\t1\t78\n\
b\t1\t1\t45\nb\t1\t1\t61\nb\t1\t1\t55\nb\t1\t1\t76\n\
b\t2\t1\t50\nb\t2\t1\t66\nb\t2\t1\t74\n";

const MRDCC: &str = "<5,9*,_>[0]<4,7*,10>[5]<4,_,_>";

fn last_error() -> String {
    unsafe { CStr::from_ptr(vlp_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { vlp_string_free(s) };
    out
}

fn parse_corpus(text: &str) -> (VlpStatus, *mut VlpCorpus) {
    let mut c = ptr::null_mut();
    let st = unsafe { vlp_corpus_parse(text.as_ptr(), text.len(), &mut c) };
    (st, c)
}

#[test]
fn corpus_lifecycle() {
    let (st, c) = parse_corpus(CORPUS);
    assert_eq!(st, VlpStatus::Ok, "{}", last_error());
    unsafe {
        assert_eq!(vlp_corpus_piece_count(c), 2);
        assert_eq!(vlp_corpus_slice_count(c), 9);
        vlp_corpus_free(c);
        assert_eq!(vlp_corpus_piece_count(ptr::null()), 0);
        vlp_corpus_free(ptr::null_mut());
    }
}

#[test]
fn bad_corpus_reports_line() {
    let (st, c) = parse_corpus("a\t0\t1\t128\n");
    assert_eq!(st, VlpStatus::DataError);
    assert!(c.is_null());
    assert!(last_error().contains(":1:"), "{}", last_error());
    let (st, _) = parse_corpus("");
    assert_eq!(st, VlpStatus::DataError);
}

#[test]
fn load_from_file() {
    let dir = std::env::temp_dir().join(format!("vlp-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("c.tsv");
    std::fs::write(&file, CORPUS).unwrap();
    let path = CString::new(file.to_str().unwrap()).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { vlp_corpus_load(path.as_ptr(), &mut c) },
        VlpStatus::Ok
    );
    assert_eq!(unsafe { vlp_corpus_piece_count(c) }, 2);
    unsafe { vlp_corpus_free(c) };
    let missing = CString::new(dir.join("nope.tsv").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { vlp_corpus_load(missing.as_ptr(), &mut c) },
        VlpStatus::DataError
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn normalize_patterns() {
    let text = CString::new("<7,4,0>[12]<10*,_,4>").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { vlp_pattern_normalize(text.as_ptr(), &mut out) },
        VlpStatus::PatternError
    );
    assert!(out.is_null());
    assert!(last_error().contains("byte"), "{}", last_error());

    let text = CString::new("<7,4,0>[2]<10*,_,4>").unwrap();
    assert_eq!(
        unsafe { vlp_pattern_normalize(text.as_ptr(), &mut out) },
        VlpStatus::Ok
    );
    assert_eq!(take(out), "<4,7,_>[2]<4,10*,_>");
    assert_eq!(last_error(), "");

    assert_eq!(
        unsafe { vlp_pattern_normalize(ptr::null(), &mut out) },
        VlpStatus::NullArgument
    );
}

#[test]
fn mine_baseline_ranks_query_first() {
    let (_, c) = parse_corpus(CORPUS);
    let cfg = vlp_mine_config_default();
    let q = CString::new(MRDCC).unwrap();
    let mut csv = ptr::null_mut();
    let mut rank = 0i64;
    let st = unsafe { vlp_mine(c, &cfg, q.as_ptr(), &mut csv, &mut rank) };
    assert_eq!(st, VlpStatus::Ok, "{}", last_error());
    assert_eq!(rank, 1);
    let text = take(csv);
    assert!(text.starts_with("rank,score,count,coverage,type\n"));
    assert!(text.contains(&format!("1,3,3,1,\"{MRDCC}\"")), "{text}");
    assert!(text.ends_with(&format!("# query {MRDCC} rank 1\n")));
    unsafe { vlp_corpus_free(c) };
}

#[test]
fn mine_rejects_bad_config() {
    let (_, c) = parse_corpus(CORPUS);
    let mut csv = ptr::null_mut();
    let mut cfg = vlp_mine_config_default();
    cfg.n = 0;
    assert_eq!(
        unsafe { vlp_mine(c, &cfg, ptr::null(), &mut csv, ptr::null_mut()) },
        VlpStatus::InvalidArgument
    );
    let mut cfg = vlp_mine_config_default();
    cfg.skip_mode = VlpSkipMode::Variable;
    cfg.window = -1.0;
    assert_eq!(
        unsafe { vlp_mine(c, &cfg, ptr::null(), &mut csv, ptr::null_mut()) },
        VlpStatus::InvalidArgument
    );
    let cfg = vlp_mine_config_default();
    let q = CString::new("<4,7,_>").unwrap();
    assert_eq!(
        unsafe { vlp_mine(c, &cfg, q.as_ptr(), &mut csv, ptr::null_mut()) },
        VlpStatus::InvalidArgument
    );
    assert!(csv.is_null());
    unsafe { vlp_corpus_free(c) };
}

#[test]
fn grid_has_1820_rows() {
    let (_, c) = parse_corpus(CORPUS);
    let q = CString::new(MRDCC).unwrap();
    let mut csv = ptr::null_mut();
    let st = unsafe { vlp_grid(c, q.as_ptr(), 3, 2, &mut csv) };
    assert_eq!(st, VlpStatus::Ok, "{}", last_error());
    let text = take(csv);
    assert_eq!(text.lines().count(), 1821);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("fixed,0,count,none,counts,1,1"));
    unsafe { vlp_corpus_free(c) };
}

#[test]
fn header_declares_every_entry_point() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/vlpatterns.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "vlp_last_error_message",
        "vlp_string_free",
        "vlp_corpus_load",
        "vlp_corpus_parse",
        "vlp_corpus_free",
        "vlp_corpus_piece_count",
        "vlp_corpus_slice_count",
        "vlp_pattern_normalize",
        "vlp_mine_config_default",
        "vlp_mine",
        "vlp_grid",
        "typedef struct VlpCorpus VlpCorpus",
        "VLP_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/vlpatterns.h");
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
