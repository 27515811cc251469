use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sygns_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { sygns_string_free(p) };
    s
}

#[test]
fn interpret_and_polarity() {
    let ctx = sygns_context_new();
    let mut out = ptr::null_mut();
    let st = unsafe { sygns_interpret(ctx, c("all wild dogs ran").as_ptr(), SygnsMr::Vf, &mut out) };
    assert_eq!(st, SygnsStatus::Ok);
    assert_eq!(take(out), "ALL AND DOG WILD RUN");
    let st = unsafe { sygns_polarity(ctx, c("ALL AND DOG WILD RUN").as_ptr(), SygnsMr::Vf, &mut out) };
    assert_eq!(st, SygnsStatus::Ok);
    assert_eq!(take(out), "dog↓ wild↓ run↑");
    unsafe { sygns_context_free(ctx) };
}

#[test]
fn errors_are_reported() {
    let ctx = sygns_context_new();
    let mut out = ptr::null_mut();
    let st = unsafe { sygns_interpret(ctx, c("dogs ran quickly home").as_ptr(), SygnsMr::Fol, &mut out) };
    assert_eq!(st, SygnsStatus::Parse);
    let msg = unsafe { CStr::from_ptr(sygns_last_error(ctx)) }.to_str().unwrap().to_string();
    assert!(msg.contains("no derivation"), "{msg}");
    assert_eq!(unsafe { sygns_interpret(ctx, ptr::null(), SygnsMr::Fol, &mut out) }, SygnsStatus::NullArgument);
    assert_eq!(
        unsafe { sygns_interpret(ptr::null_mut(), c("bob ran").as_ptr(), SygnsMr::Fol, &mut out) },
        SygnsStatus::NullArgument
    );
    let st = unsafe { sygns_context_load_lexicon(ctx, c("/nonexistent/lexicon.toml").as_ptr()) };
    assert_eq!(st, SygnsStatus::Io);
    assert!(unsafe { sygns_last_error(ptr::null()) }.is_null());
    unsafe { sygns_context_free(ctx) };
}

#[test]
fn clause_match_and_entailment() {
    let ctx = sygns_context_new();
    let mut m = SygnsMatch::default();
    let gold = c("b1 REF x1\nb1 dog x1\nb1 run x1");
    let pred = c("b2 REF x3 ; b2 dog x3 ; b2 walk x3");
    let st = unsafe { sygns_clause_match(ctx, gold.as_ptr(), pred.as_ptr(), true, &mut m) };
    assert_eq!(st, SygnsStatus::Ok);
    assert_eq!((m.matched, m.gold, m.predicted), (2, 3, 3));
    assert!((m.f - 2.0 / 3.0).abs() < 1e-12);
    let mut v = SygnsVerdict::Unknown;
    let a = c("exists x1 . ( dog ( x1 ) & run ( x1 ) )");
    let b = c("exists x1 . dog ( x1 )");
    assert_eq!(unsafe { sygns_entails(ctx, a.as_ptr(), b.as_ptr(), 5_000, &mut v) }, SygnsStatus::Ok);
    assert_eq!(v, SygnsVerdict::Entails);
    assert_eq!(unsafe { sygns_entails(ctx, b.as_ptr(), a.as_ptr(), 5_000, &mut v) }, SygnsStatus::Ok);
    assert_eq!(v, SygnsVerdict::NotEntails);
    unsafe { sygns_context_free(ctx) };
}

#[test]
fn split_files() {
    let ctx = sygns_context_new();
    let dir = tempfile::tempdir().unwrap();
    let out = c(dir.path().to_str().unwrap());
    let overrides = c(r#"{"pool": 200, "train": 50}"#);
    let st = unsafe {
        sygns_write_split(ctx, SygnsStrategy::SystematicityModifier, 1, overrides.as_ptr(), out.as_ptr())
    };
    assert_eq!(st, SygnsStatus::Ok);
    let lines = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap().lines().count();
    assert_eq!(lines("train.jsonl") + lines("valid.jsonl"), 50);
    assert_eq!(lines("test.jsonl"), 150);
    let bad = c(r#"{"pool": 10, "train": 50}"#);
    let st = unsafe { sygns_write_split(ctx, SygnsStrategy::SystematicityModifier, 1, bad.as_ptr(), out.as_ptr()) };
    assert_eq!(st, SygnsStatus::InfeasibleSplit);
    unsafe { sygns_context_free(ctx) };
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/sygns.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "sygns_context_new",
        "sygns_context_free",
        "sygns_context_load_lexicon",
        "sygns_context_set_constant_proper_nouns",
        "sygns_last_error",
        "sygns_interpret",
        "sygns_polarity",
        "sygns_clause_match",
        "sygns_entails",
        "sygns_write_split",
        "sygns_string_free",
        "typedef struct SygnsContext SygnsContext",
        "SYGNS_STATUS_OK = 0",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-x", "c"])
        .arg(header())
        .status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}
