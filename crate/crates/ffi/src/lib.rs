//! C ABI over the `vlpatterns` pipeline.
//!
//! Every fallible function returns a [`VlpStatus`]; on failure the message
//! is available from [`vlp_last_error_message`] on the same thread. Strings
//! handed out by the library must be released with [`vlp_string_free`] and
//! corpora with [`vlp_corpus_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use vlpatterns::corpus::{self, Corpus};
use vlpatterns::evaluation::{
    self, EvalError, GridSpec, PipelineConfig, PipelineOptions, SkipLevel,
};
use vlpatterns::filters::FilterKind;
use vlpatterns::ranking::Measure;
use vlpatterns::skipgram::SkipBudget;
use vlpatterns::vlt::{parse_pattern, VltPattern};
use vlpatterns::weighting::WeightKind;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    PatternError = 3,
    DataError = 4,
    InvariantViolation = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlpSkipMode {
    Fixed = 0,
    Variable = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlpBudget {
    Total = 0,
    PerGap = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlpWeight {
    Count = 0,
    Periodicity = 1,
    Resonance = 2,
    Proximity = 3,
    ResonantPeriodicity = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlpFilter {
    None = 0,
    Frequency = 1,
    Harmony = 2,
    Both = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlpMeasure {
    Counts = 0,
    Pmi = 1,
    PmiLocal = 2,
    PmiCoverage = 3,
    Dice = 4,
    Chi2 = 5,
    G2 = 6,
}

/// One pipeline configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlpMineConfig {
    /// Members per n-gram.
    pub n: u32,
    pub skip_mode: VlpSkipMode,
    /// Skip budget for `VLP_SKIP_MODE_FIXED`.
    pub fixed_skip: u32,
    /// Window in seconds for `VLP_SKIP_MODE_VARIABLE`.
    pub window: f64,
    pub budget: VlpBudget,
    pub weight: VlpWeight,
    pub filter: VlpFilter,
    /// Threshold of the frequency filter.
    pub min_count: f64,
    pub measure: VlpMeasure,
}

/// An expanded, encoded-ready corpus.
pub struct VlpCorpus {
    inner: Corpus,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn guard(f: impl FnOnce() -> Result<(), (VlpStatus, String)>) -> VlpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            VlpStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside vlpatterns");
            VlpStatus::Panic
        }
    }
}

fn eval_err(e: EvalError) -> (VlpStatus, String) {
    let status = match e {
        EvalError::Invariant(_) => VlpStatus::InvariantViolation,
        EvalError::QueryLength { .. } => VlpStatus::InvalidArgument,
        _ => VlpStatus::DataError,
    };
    (status, e.to_string())
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (VlpStatus, String)> {
    if p.is_null() {
        return Err((VlpStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (VlpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn pattern_arg(p: *const c_char) -> Result<VltPattern, (VlpStatus, String)> {
    let text = c_str(p, "pattern")?;
    parse_pattern(text).map_err(|e| (VlpStatus::PatternError, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nul removed")
        .into_raw()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn vlp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vlp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn finish_corpus(
    parsed: corpus::ParsedCorpus,
    out: *mut *mut VlpCorpus,
) -> Result<(), (VlpStatus, String)> {
    let (inner, _) = corpus::prepare(&parsed).map_err(|e| (VlpStatus::DataError, e.to_string()))?;
    unsafe { *out = Box::into_raw(Box::new(VlpCorpus { inner })) };
    Ok(())
}

/// Loads a note-event file or directory.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vlp_corpus_load(
    path: *const c_char,
    out: *mut *mut VlpCorpus,
) -> VlpStatus {
    guard(|| {
        if out.is_null() {
            return Err((VlpStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let path = c_str(path, "path")?;
        let parsed = corpus::read_corpus_path(Path::new(path))
            .map_err(|e| (VlpStatus::DataError, e.to_string()))?;
        finish_corpus(parsed, out)
    })
}

/// Parses note-event text held in memory.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vlp_corpus_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut VlpCorpus,
) -> VlpStatus {
    guard(|| {
        if out.is_null() || (data.is_null() && len > 0) {
            return Err((VlpStatus::NullArgument, "data or out is null".into()));
        }
        *out = ptr::null_mut();
        let bytes = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(data, len)
        };
        let parsed = corpus::parse_corpus(bytes, "<buffer>")
            .map_err(|e| (VlpStatus::DataError, e.to_string()))?;
        finish_corpus(parsed, out)
    })
}

/// Releases a corpus. Null is ignored.
///
/// # Safety
/// `corpus` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vlp_corpus_free(corpus: *mut VlpCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of pieces; 0 for null.
///
/// # Safety
/// `corpus` must be null or a live corpus.
#[no_mangle]
pub unsafe extern "C" fn vlp_corpus_piece_count(corpus: *const VlpCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.n_compositions())
}

/// Number of slices over all pieces; 0 for null.
///
/// # Safety
/// `corpus` must be null or a live corpus.
#[no_mangle]
pub unsafe extern "C" fn vlp_corpus_slice_count(corpus: *const VlpCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.n_slices())
}

/// Rewrites a pattern in canonical form.
///
/// # Safety
/// `text` must be nul-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vlp_pattern_normalize(
    text: *const c_char,
    out: *mut *mut c_char,
) -> VlpStatus {
    guard(|| {
        if out.is_null() {
            return Err((VlpStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let p = pattern_arg(text)?;
        *out = into_c_string(p.to_string());
        Ok(())
    })
}

/// Baseline configuration: trigrams, contiguous, counted, unfiltered,
/// ranked by count.
#[no_mangle]
pub extern "C" fn vlp_mine_config_default() -> VlpMineConfig {
    VlpMineConfig {
        n: 3,
        skip_mode: VlpSkipMode::Fixed,
        fixed_skip: 0,
        window: 1.0,
        budget: VlpBudget::Total,
        weight: VlpWeight::Count,
        filter: VlpFilter::None,
        min_count: 10.0,
        measure: VlpMeasure::Counts,
    }
}

fn convert(cfg: &VlpMineConfig) -> Result<(PipelineConfig, PipelineOptions), (VlpStatus, String)> {
    if cfg.n == 0 {
        return Err((VlpStatus::InvalidArgument, "n must be at least 1".into()));
    }
    let skip = match cfg.skip_mode {
        VlpSkipMode::Fixed => SkipLevel::Fixed(cfg.fixed_skip as usize),
        VlpSkipMode::Variable => {
            if !(cfg.window.is_finite() && cfg.window > 0.0) {
                return Err((VlpStatus::InvalidArgument, "window must be positive".into()));
            }
            SkipLevel::Variable(cfg.window)
        }
    };
    let weight = match cfg.weight {
        VlpWeight::Count => WeightKind::Count,
        VlpWeight::Periodicity => WeightKind::Periodicity,
        VlpWeight::Resonance => WeightKind::Resonance,
        VlpWeight::Proximity => WeightKind::Proximity,
        VlpWeight::ResonantPeriodicity => WeightKind::ResonantPeriodicity,
    };
    let filter = match cfg.filter {
        VlpFilter::None => FilterKind::None,
        VlpFilter::Frequency => FilterKind::Frequency(cfg.min_count),
        VlpFilter::Harmony => FilterKind::Harmony,
        VlpFilter::Both => FilterKind::Both(cfg.min_count),
    };
    let rank = match cfg.measure {
        VlpMeasure::Counts => Measure::Counts,
        VlpMeasure::Pmi => Measure::Pmi,
        VlpMeasure::PmiLocal => Measure::PmiLocal,
        VlpMeasure::PmiCoverage => Measure::PmiCoverage,
        VlpMeasure::Dice => Measure::Dice,
        VlpMeasure::Chi2 => Measure::Chi2,
        VlpMeasure::G2 => Measure::G2,
    };
    let opts = PipelineOptions {
        n: cfg.n as usize,
        budget: match cfg.budget {
            VlpBudget::Total => SkipBudget::Total,
            VlpBudget::PerGap => SkipBudget::PerGap,
        },
        ..PipelineOptions::default()
    };
    Ok((
        PipelineConfig {
            skip,
            weight,
            filter,
            rank,
        },
        opts,
    ))
}

/// Ranks the corpus's n-gram types under `config`.
///
/// On success `*out_csv` holds the ranked list (`rank,score,count,coverage,type`)
/// and, when `query` is non-null, `*out_query_rank` holds the query's rank
/// or -1 if it is absent.
///
/// # Safety
/// `corpus` and `config` must be valid; `query` may be null; `out_csv` must
/// be valid; `out_query_rank` may be null.
#[no_mangle]
pub unsafe extern "C" fn vlp_mine(
    corpus: *const VlpCorpus,
    config: *const VlpMineConfig,
    query: *const c_char,
    out_csv: *mut *mut c_char,
    out_query_rank: *mut i64,
) -> VlpStatus {
    guard(|| {
        if corpus.is_null() || config.is_null() || out_csv.is_null() {
            return Err((
                VlpStatus::NullArgument,
                "corpus, config or out_csv is null".into(),
            ));
        }
        *out_csv = ptr::null_mut();
        let (cfg, opts) = convert(&*config)?;
        let q = if query.is_null() {
            None
        } else {
            Some(pattern_arg(query)?)
        };
        let res =
            evaluation::run_config(&(*corpus).inner, &cfg, &opts, q.as_ref()).map_err(eval_err)?;
        if !out_query_rank.is_null() {
            *out_query_rank = res.query_rank.map_or(-1, |r| r as i64);
        }
        *out_csv = into_c_string(res.to_csv(q.as_ref()));
        Ok(())
    })
}

/// Runs the full configuration grid for `query` with n-grams of size `n`.
/// `jobs` = 0 uses every core. `*out_csv` receives the grid CSV.
///
/// # Safety
/// `corpus`, `query` and `out_csv` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlp_grid(
    corpus: *const VlpCorpus,
    query: *const c_char,
    n: u32,
    jobs: u32,
    out_csv: *mut *mut c_char,
) -> VlpStatus {
    guard(|| {
        if corpus.is_null() || out_csv.is_null() {
            return Err((VlpStatus::NullArgument, "corpus or out_csv is null".into()));
        }
        *out_csv = ptr::null_mut();
        let q = pattern_arg(query)?;
        let opts = PipelineOptions {
            n: n as usize,
            ..PipelineOptions::default()
        };
        let jobs = (jobs > 0).then_some(jobs as usize);
        let grid = evaluation::run_grid(&(*corpus).inner, &GridSpec::default(), &opts, &q, jobs)
            .map_err(eval_err)?;
        *out_csv = into_c_string(evaluation::grid_csv(&grid));
        Ok(())
    })
}
