//! C ABI over the sarckit core.
//!
//! Every fallible call returns a [`SarckitStatus`]; on failure the message is
//! available from [`sarckit_last_error_message`] on the same thread. Handles
//! are opaque and released with their `_free` function. Strings passed in
//! must be NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sarckit::corpus::{load_corpus, read_jsonl, word_count, Corpus, Format, Label};
use sarckit::patterns::{count_patterns, threshold_patterns, PatternExtractor, PatternStats, TemplateConfig};
use sarckit::syntax::Analyzer;
use sarckit::weak::{Decision, WeakDetector};
use sarckit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SarckitStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    Data = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SarckitLabel {
    Sarcastic = 0,
    NotSarcastic = 1,
}

impl From<SarckitLabel> for Label {
    fn from(l: SarckitLabel) -> Label {
        match l {
            SarckitLabel::Sarcastic => Label::Sarcastic,
            SarckitLabel::NotSarcastic => Label::NotSarcastic,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SarckitFormat {
    Jsonl = 0,
    Csv = 1,
}

/// Tokenizer, tagger and chunker with their lexicons.
pub struct SarckitAnalyzer {
    inner: Analyzer,
}

pub struct SarckitCorpus {
    inner: Corpus,
}

/// Per-class pattern counts and the template set they were counted with.
pub struct SarckitPatternStats {
    inner: PatternStats,
    templates: TemplateConfig,
}

pub struct SarckitDetector {
    inner: WeakDetector,
    templates: TemplateConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SarckitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => SarckitStatus::Io,
            Error::Parse { .. } => SarckitStatus::Parse,
            Error::InvalidArgument(_) => SarckitStatus::InvalidArgument,
            _ => SarckitStatus::Data,
        };
        let mut msg = e.to_string();
        let mut src = std::error::Error::source(&e);
        while let Some(s) = src {
            msg.push_str(": ");
            msg.push_str(&s.to_string());
            src = s.source();
        }
        Failure(status, msg)
    }
}

fn null(what: &str) -> Failure {
    Failure(SarckitStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `f`, turning errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SarckitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SarckitStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SarckitStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(SarckitStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null after a
/// successful call. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn sarckit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sarckit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Word count used by the length filter.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_word_count(text: *const c_char, out: *mut usize) -> SarckitStatus {
    guard(|| {
        let t = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = word_count(t);
        Ok(())
    })
}

/// Analyzer with the shipped lexicons, or the directory named by
/// `SARCKIT_LEXICON_DIR` when set.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_analyzer_new(out: *mut *mut SarckitAnalyzer) -> SarckitStatus {
    guard(|| {
        let inner = Analyzer::from_env()?;
        put(out, SarckitAnalyzer { inner })
    })
}

/// # Safety
/// `a` must come from [`sarckit_analyzer_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sarckit_analyzer_free(a: *mut SarckitAnalyzer) {
    free(a)
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_corpus_load(
    path: *const c_char,
    format: SarckitFormat,
    out: *mut *mut SarckitCorpus,
) -> SarckitStatus {
    guard(|| {
        let p = str_arg(path, "path")?;
        let f = match format {
            SarckitFormat::Jsonl => Format::Jsonl,
            SarckitFormat::Csv => Format::Csv,
        };
        let inner = load_corpus(Path::new(p), f)?;
        put(out, SarckitCorpus { inner })
    })
}

/// Parses JSON-lines records held in memory.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_corpus_from_jsonl(text: *const c_char, out: *mut *mut SarckitCorpus) -> SarckitStatus {
    guard(|| {
        let t = str_arg(text, "text")?;
        let inner = read_jsonl(t.as_bytes())?;
        put(out, SarckitCorpus { inner })
    })
}

/// Number of posts; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live corpus handle.
#[no_mangle]
pub unsafe extern "C" fn sarckit_corpus_len(c: *const SarckitCorpus) -> usize {
    c.as_ref().map_or(0, |c| c.inner.len())
}

/// Number of posts carrying `label`; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live corpus handle.
#[no_mangle]
pub unsafe extern "C" fn sarckit_corpus_count_of(c: *const SarckitCorpus, label: SarckitLabel) -> usize {
    c.as_ref().map_or(0, |c| c.inner.count_of(label.into()))
}

/// # Safety
/// `c` must come from a corpus constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sarckit_corpus_free(c: *mut SarckitCorpus) {
    free(c)
}

/// Counts template instantiations per class over a fully labeled corpus.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_count_patterns(
    corpus: *const SarckitCorpus,
    analyzer: *const SarckitAnalyzer,
    adv_adv: bool,
    out: *mut *mut SarckitPatternStats,
) -> SarckitStatus {
    guard(|| {
        let c = ref_arg(corpus, "corpus")?;
        let a = ref_arg(analyzer, "analyzer")?;
        let templates = TemplateConfig { adv_adv };
        let ex = PatternExtractor::new(a.inner.clone(), templates);
        let inner = count_patterns(&c.inner, &ex)?;
        put(out, SarckitPatternStats { inner, templates })
    })
}

/// Number of distinct patterns; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sarckit_pattern_stats_len(s: *const SarckitPatternStats) -> usize {
    s.as_ref().map_or(0, |s| s.inner.len())
}

/// Writes the statistics table as TSV.
///
/// # Safety
/// `s` must be live; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sarckit_pattern_stats_write_tsv(
    s: *const SarckitPatternStats,
    path: *const c_char,
) -> SarckitStatus {
    guard(|| {
        let s = ref_arg(s, "stats")?;
        let p = Path::new(str_arg(path, "path")?);
        let io = |e| Failure::from(Error::Io { path: p.to_path_buf(), source: e });
        let mut f = std::io::BufWriter::new(std::fs::File::create(p).map_err(io)?);
        s.inner.write_tsv(&mut f).map_err(io)?;
        std::io::Write::flush(&mut f).map_err(io)
    })
}

/// # Safety
/// `s` must come from [`sarckit_count_patterns`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sarckit_pattern_stats_free(s: *mut SarckitPatternStats) {
    free(s)
}

/// Detector over the patterns of `label` with frequency ≥ `theta_f` and
/// probability ≥ `theta_p`; it hits a post with ≥ `theta_n` match sites.
///
/// # Safety
/// `stats` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_detector_new(
    stats: *const SarckitPatternStats,
    label: SarckitLabel,
    theta_f: u64,
    theta_p: f64,
    theta_n: usize,
    out: *mut *mut SarckitDetector,
) -> SarckitStatus {
    guard(|| {
        let s = ref_arg(stats, "stats")?;
        sarckit::patterns::ThresholdConfig::new(theta_f, theta_p, theta_n)?;
        let set = threshold_patterns(&s.inner, label.into(), theta_f, theta_p);
        let inner = WeakDetector::from_set(&set, theta_n);
        put(
            out,
            SarckitDetector {
                inner,
                templates: s.templates,
            },
        )
    })
}

/// Number of patterns the detector looks for; 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sarckit_detector_len(d: *const SarckitDetector) -> usize {
    d.as_ref().map_or(0, |d| d.inner.patterns.len())
}

/// Classifies one response text. `out_hit` receives whether the detector
/// fires, `out_sites` (may be null) the number of match sites.
///
/// # Safety
/// Handles must be live; `text` must be a NUL-terminated string; `out_hit`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sarckit_detector_classify(
    d: *const SarckitDetector,
    analyzer: *const SarckitAnalyzer,
    text: *const c_char,
    out_hit: *mut bool,
    out_sites: *mut usize,
) -> SarckitStatus {
    guard(|| {
        let d = ref_arg(d, "detector")?;
        let a = ref_arg(analyzer, "analyzer")?;
        let t = str_arg(text, "text")?;
        if out_hit.is_null() {
            return Err(null("out_hit"));
        }
        let ex = PatternExtractor::new(a.inner.clone(), d.templates);
        let pats = ex.extract(t);
        *out_hit = d.inner.classify(&pats) == Decision::Hit;
        if !out_sites.is_null() {
            *out_sites = d.inner.match_sites(&pats);
        }
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`sarckit_detector_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sarckit_detector_free(d: *mut SarckitDetector) {
    free(d)
}
