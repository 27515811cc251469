//! C ABI over the sygns library.
//!
//! All state lives behind an opaque [`SygnsContext`]. Functions return a
//! [`SygnsStatus`]; on failure the context keeps a message readable with
//! [`sygns_last_error`]. Strings handed out by the library are owned by the
//! caller and released with [`sygns_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sygns::dataset::{write_jsonl, Mr, RecordBuilder};
use sygns::drs::ClausalDrs;
use sygns::entail::{self, Budget, Verdict};
use sygns::fol::Fol;
use sygns::grammar::parse_sentence;
use sygns::metrics::{clause_match_f, MatchConfig};
use sygns::polarity::Polarizer;
use sygns::semantics::{ProperNounStyle, SemanticsConfig};
use sygns::splits::{self, Split, SplitSpec, Strategy};
use sygns::vf::Vf;
use sygns::{Error, Lexicon};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SygnsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Io = 4,
    InfeasibleSplit = 5,
    Config = 6,
    External = 7,
    InvalidArgument = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SygnsMr {
    Fol = 0,
    Vf = 1,
    Drs = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SygnsVerdict {
    Entails = 0,
    NotEntails = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SygnsStrategy {
    SystematicityModifier = 0,
    SystematicityNegation = 1,
    Productivity = 2,
    DepthExposure = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SygnsMatch {
    pub matched: usize,
    pub gold: usize,
    pub predicted: usize,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Lexicon, composition settings and the last error message.
pub struct SygnsContext {
    lexicon: Lexicon,
    semantics: SemanticsConfig,
    last_error: CString,
}

impl From<SygnsMr> for Mr {
    fn from(m: SygnsMr) -> Mr {
        match m {
            SygnsMr::Fol => Mr::Fol,
            SygnsMr::Vf => Mr::Vf,
            SygnsMr::Drs => Mr::Drs,
        }
    }
}

impl From<SygnsStrategy> for Strategy {
    fn from(s: SygnsStrategy) -> Strategy {
        match s {
            SygnsStrategy::SystematicityModifier => Strategy::SystematicityModifier,
            SygnsStrategy::SystematicityNegation => Strategy::SystematicityNegation,
            SygnsStrategy::Productivity => Strategy::Productivity,
            SygnsStrategy::DepthExposure => Strategy::DepthExposure,
        }
    }
}

fn status_of(e: &Error) -> SygnsStatus {
    match e {
        Error::Parse { .. } | Error::ParseLine { .. } | Error::Unparseable(_) | Error::UnsupportedShape(_) => {
            SygnsStatus::Parse
        }
        Error::Io { .. } | Error::Json(_) => SygnsStatus::Io,
        Error::InfeasibleSplit(_) | Error::PopulationTooSmall { .. } => SygnsStatus::InfeasibleSplit,
        Error::Config(_) | Error::Lexicon(_) => SygnsStatus::Config,
        Error::External(_) => SygnsStatus::External,
        _ => SygnsStatus::InvalidArgument,
    }
}

struct Failure(SygnsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn message(text: String) -> CString {
    CString::new(text.replace('\0', " ")).unwrap_or_default()
}

/// Runs `body` with panics caught, recording any failure on the context.
fn guarded(ctx: *mut SygnsContext, body: impl FnOnce(&mut SygnsContext) -> Result<(), Failure>) -> SygnsStatus {
    // SAFETY: callers pass either null or a pointer from sygns_context_new.
    let Some(ctx) = (unsafe { ctx.as_mut() }) else {
        return SygnsStatus::NullArgument;
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| body(ctx)));
    let (status, msg) = match outcome {
        Ok(Ok(())) => (SygnsStatus::Ok, String::new()),
        Ok(Err(Failure(s, m))) => (s, m),
        Err(_) => (SygnsStatus::Panic, "internal panic".to_string()),
    };
    ctx.last_error = message(msg);
    status
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SygnsStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SygnsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn hand_out(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(SygnsStatus::NullArgument, "output pointer is null".into()));
    }
    // SAFETY: checked non-null; the caller provides writable storage.
    unsafe { *out = message(s).into_raw() };
    Ok(())
}

/// A context over the built-in lexicon, or null if allocation failed.
#[no_mangle]
pub extern "C" fn sygns_context_new() -> *mut SygnsContext {
    Box::into_raw(Box::new(SygnsContext {
        lexicon: Lexicon::default(),
        semantics: SemanticsConfig::default(),
        last_error: CString::default(),
    }))
}

/// # Safety
/// `ctx` must be null or come from [`sygns_context_new`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn sygns_context_free(ctx: *mut SygnsContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Replaces the context's lexicon with one read from a TOML file.
///
/// # Safety
/// `ctx` from [`sygns_context_new`]; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sygns_context_load_lexicon(ctx: *mut SygnsContext, path: *const c_char) -> SygnsStatus {
    guarded(ctx, |c| {
        let path = text(path, "path")?;
        c.lexicon = Lexicon::load(Path::new(path))?;
        Ok(())
    })
}

/// Proper nouns as individual constants when `constant`, as predicates
/// otherwise.
///
/// # Safety
/// `ctx` from [`sygns_context_new`].
#[no_mangle]
pub unsafe extern "C" fn sygns_context_set_constant_proper_nouns(ctx: *mut SygnsContext, constant: bool) -> SygnsStatus {
    guarded(ctx, |c| {
        c.semantics.proper_nouns = if constant {
            ProperNounStyle::Constant
        } else {
            ProperNounStyle::Predicate
        };
        Ok(())
    })
}

/// Message for the last failed call on `ctx`; empty after a success. The
/// pointer stays valid until the next call on the same context.
///
/// # Safety
/// `ctx` must be null or come from [`sygns_context_new`].
#[no_mangle]
pub unsafe extern "C" fn sygns_last_error(ctx: *const SygnsContext) -> *const c_char {
    match ctx.as_ref() {
        Some(c) => c.last_error.as_ptr(),
        None => ptr::null(),
    }
}

/// Meaning representation of a sentence of the grammar, as a token string;
/// DRS clauses are joined by ` ; `.
///
/// # Safety
/// `ctx` from [`sygns_context_new`]; `sentence` NUL-terminated; `out`
/// writable. The string written to `out` is freed with [`sygns_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sygns_interpret(
    ctx: *mut SygnsContext,
    sentence: *const c_char,
    mr: SygnsMr,
    out: *mut *mut c_char,
) -> SygnsStatus {
    guarded(ctx, |c| {
        let sentence = text(sentence, "sentence")?;
        let tree = parse_sentence(&c.lexicon, sentence)?;
        let record = RecordBuilder::new(&c.lexicon, c.semantics).build("ffi", &tree)?;
        hand_out(out, record.target(mr.into()))
    })
}

/// Polarity marks of a formula, e.g. `dog↓ run↑`.
///
/// # Safety
/// As for [`sygns_interpret`].
#[no_mangle]
pub unsafe extern "C" fn sygns_polarity(
    ctx: *mut SygnsContext,
    formula: *const c_char,
    mr: SygnsMr,
    out: *mut *mut c_char,
) -> SygnsStatus {
    guarded(ctx, |c| {
        let formula = text(formula, "formula")?;
        let p = Polarizer::for_lexicon(&c.lexicon);
        let tokens = match mr {
            SygnsMr::Fol => p.fol(&Fol::parse(formula)?),
            SygnsMr::Vf => p.vf(&Vf::parse(formula)?),
            SygnsMr::Drs => p.fol(&ClausalDrs::parse_inline(formula)?.to_fol()?),
        };
        let marks: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
        hand_out(out, marks.join(" "))
    })
}

/// Clause-matching scores between two clausal DRSs, each written one clause
/// per line or with clauses separated by `;`.
///
/// # Safety
/// `ctx` from [`sygns_context_new`]; `gold`, `pred` NUL-terminated; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sygns_clause_match(
    ctx: *mut SygnsContext,
    gold: *const c_char,
    pred: *const c_char,
    count_ref: bool,
    out: *mut SygnsMatch,
) -> SygnsStatus {
    guarded(ctx, |_| {
        let g = ClausalDrs::parse_inline(&text(gold, "gold")?.replace('\n', ";"))?;
        let p = ClausalDrs::parse_inline(&text(pred, "pred")?.replace('\n', ";"))?;
        let cfg = MatchConfig {
            count_ref,
            ..MatchConfig::default()
        };
        let m = clause_match_f(g.clauses(), p.clauses(), &cfg);
        let Some(out) = out.as_mut() else {
            return Err(Failure(SygnsStatus::NullArgument, "output pointer is null".into()));
        };
        *out = SygnsMatch {
            matched: m.matched,
            gold: m.gold,
            predicted: m.predicted,
            precision: m.precision,
            recall: m.recall,
            f: m.f,
        };
        Ok(())
    })
}

/// Whether `premise` entails `conclusion` (first-order formulas), under the
/// default search budget with the given time limit.
///
/// # Safety
/// `ctx` from [`sygns_context_new`]; formulas NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sygns_entails(
    ctx: *mut SygnsContext,
    premise: *const c_char,
    conclusion: *const c_char,
    timeout_ms: u64,
    out: *mut SygnsVerdict,
) -> SygnsStatus {
    guarded(ctx, |_| {
        let a = Fol::parse(text(premise, "premise")?)?;
        let b = Fol::parse(text(conclusion, "conclusion")?)?;
        let budget = Budget {
            timeout_ms,
            ..Budget::default()
        };
        let v = match entail::entails(&a, &b, &budget).0 {
            Verdict::Entails => SygnsVerdict::Entails,
            Verdict::NotEntails => SygnsVerdict::NotEntails,
            Verdict::Unknown => SygnsVerdict::Unknown,
        };
        let Some(out) = out.as_mut() else {
            return Err(Failure(SygnsStatus::NullArgument, "output pointer is null".into()));
        };
        *out = v;
        Ok(())
    })
}

/// Builds a split with the strategy's defaults, optionally overridden by a
/// JSON object of spec fields (null for none), and writes `train.jsonl`,
/// `valid.jsonl` and `test.jsonl` into `out_dir`.
///
/// # Safety
/// `ctx` from [`sygns_context_new`]; `overrides` null or NUL-terminated;
/// `out_dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sygns_write_split(
    ctx: *mut SygnsContext,
    strategy: SygnsStrategy,
    seed: u64,
    overrides: *const c_char,
    out_dir: *const c_char,
) -> SygnsStatus {
    guarded(ctx, |c| {
        let mut spec = SplitSpec::new(strategy.into()).with_seed(seed);
        if !overrides.is_null() {
            let extra: serde_json::Value = serde_json::from_str(text(overrides, "overrides")?)
                .map_err(|e| Failure(SygnsStatus::Config, format!("overrides: {e}")))?;
            let mut base = serde_json::to_value(&spec).map_err(Error::from)?;
            match (base.as_object_mut(), extra.as_object()) {
                (Some(b), Some(x)) => b.extend(x.clone()),
                _ => return Err(Failure(SygnsStatus::Config, "overrides must be a JSON object".into())),
            }
            spec = serde_json::from_value(base).map_err(|e| Failure(SygnsStatus::Config, format!("overrides: {e}")))?;
        }
        let dir = Path::new(text(out_dir, "out_dir")?);
        let partition = splits::build(&c.lexicon, &spec)?;
        let records = RecordBuilder::new(&c.lexicon, c.semantics).build_partition(&partition)?;
        for split in [Split::Train, Split::Valid, Split::Test] {
            let part: Vec<_> = records.iter().filter(|r| r.split == Some(split)).cloned().collect();
            write_jsonl(&dir.join(format!("{split}.jsonl")), &part)?;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sygns_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
