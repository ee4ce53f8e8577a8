//! C interface: opaque metric and report handles, status codes, and a
//! per-thread last-error message.
//!
//! Strings returned as `char *` are owned by the caller and released with
//! [`kf_string_free`]. Strings returned as `const char *` are borrowed from
//! the handle they were read from.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use killing_core::cli::{self, catalog, AnalysisConfig, LoadedMetric, Report};
use killing_core::{Error, Mode};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Expression syntax, unknown variable or a domain error while evaluating.
    Expression = 3,
    InvalidMetric = 4,
    SingularMetric = 5,
    SignatureMismatch = 6,
    InvalidConfig = 7,
    UnknownCatalogEntry = 8,
    /// Any other failure inside the analysis.
    Analysis = 9,
    Io = 10,
    Panic = 11,
}

/// Analysis settings. Zero in `max_order` or `jet_order` selects the default.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KfConfig {
    /// Nonzero for floating-point arithmetic.
    pub float_mode: i32,
    pub tol: f64,
    pub max_order: u32,
    pub jet_order: u32,
    pub probes: u32,
    /// Read through its shortest decimal form, so `0.01` means `1/100`.
    pub probe_radius: f64,
    pub probe_seed: u64,
}

pub struct KfMetric {
    inner: LoadedMetric,
}

pub struct KfReport {
    report: Report,
    label: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KfStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownVariable { .. } | Error::Domain(_) => KfStatus::Expression,
        Error::InvalidMetric(_) => KfStatus::InvalidMetric,
        Error::SingularMetric { .. } => KfStatus::SingularMetric,
        Error::SignatureMismatch { .. } => KfStatus::SignatureMismatch,
        Error::InvalidConfig(_) | Error::OrderTooLow(_) => KfStatus::InvalidConfig,
        Error::UnknownCatalogEntry(_) => KfStatus::UnknownCatalogEntry,
        Error::Io(_) => KfStatus::Io,
        _ => KfStatus::Analysis,
    }
}

fn fail(e: Error) -> KfStatus {
    set_last_error(format!("[{}] {e}", e.module()));
    status_of(&e)
}

fn guarded(f: impl FnOnce() -> KfStatus) -> KfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == KfStatus::Ok {
                set_last_error(String::new());
            }
            s
        }
        Err(_) => {
            set_last_error("internal panic".into());
            KfStatus::Panic
        }
    }
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, KfStatus> {
    if s.is_null() {
        set_last_error("null string argument".into());
        return Err(KfStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_last_error("string argument is not UTF-8".into());
        KfStatus::InvalidUtf8
    })
}

fn to_config(c: &KfConfig) -> Result<AnalysisConfig, Error> {
    let nonzero = |v: u32| (v != 0).then_some(v as usize);
    let radius = if c.probe_radius.is_finite() {
        catalog::parse_number(&format!("{:?}", c.probe_radius))?
    } else {
        return Err(Error::InvalidConfig("probe radius must be finite".into()));
    };
    Ok(AnalysisConfig {
        mode: if c.float_mode != 0 { Mode::Float } else { Mode::Exact },
        tol: c.tol,
        max_order: nonzero(c.max_order),
        jet_order: nonzero(c.jet_order),
        probes: c.probes as usize,
        probe_radius: radius,
        probe_seed: c.probe_seed,
    })
}

/// Fills `out` with the defaults: exact mode, `tol = 1e-9`, 4 probes of
/// radius `1/100`.
///
/// # Safety
/// `out` must be null or point to writable memory for a `KfConfig`.
#[no_mangle]
pub unsafe extern "C" fn kf_config_default(out: *mut KfConfig) -> KfStatus {
    if out.is_null() {
        return KfStatus::NullArgument;
    }
    let d = AnalysisConfig::default();
    *out = KfConfig {
        float_mode: 0,
        tol: d.tol,
        max_order: 0,
        jet_order: 0,
        probes: d.probes as u32,
        probe_radius: d.probe_radius.to_f64(),
        probe_seed: d.probe_seed,
    };
    KfStatus::Ok
}

/// Parses a metric file given as TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kf_metric_from_toml(toml: *const c_char, out: *mut *mut KfMetric) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return KfStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::parse_metric_file(text, "<ffi>") {
            Ok(m) => {
                *out = Box::into_raw(Box::new(KfMetric { inner: m }));
                KfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Looks up a built-in metric by name, e.g. `"sphere"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kf_metric_catalog(name: *const c_char, out: *mut *mut KfMetric) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return KfStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::load_metric(&format!("catalog:{name}")) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(KfMetric { inner: m }));
                KfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Dimension of the metric, 0 for a null handle.
///
/// # Safety
/// `metric` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_metric_dim(metric: *const KfMetric) -> usize {
    metric.as_ref().map_or(0, |m| m.inner.metric.dim())
}

/// # Safety
/// `metric` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kf_metric_free(metric: *mut KfMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Runs the full analysis. `point` is a comma-separated coordinate list
/// such as `"1/2,0"`, or null for the metric's default point; `config`
/// may be null for the defaults.
///
/// # Safety
/// `metric` must be a live handle, `point` null or NUL-terminated,
/// `config` null or valid, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kf_analyze(
    metric: *const KfMetric,
    point: *const c_char,
    config: *const KfConfig,
    out: *mut *mut KfReport,
) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return KfStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let Some(metric) = metric.as_ref() else {
            set_last_error("null metric handle".into());
            return KfStatus::NullArgument;
        };
        let point = if point.is_null() {
            None
        } else {
            match read_str(point).map(cli::parse_point) {
                Ok(Ok(p)) => Some(p),
                Ok(Err(e)) => return fail(e),
                Err(s) => return s,
            }
        };
        let config = match config.as_ref().map(to_config).transpose() {
            Ok(c) => c.unwrap_or_default(),
            Err(e) => return fail(e),
        };
        let run = || -> killing_core::Result<Report> {
            let x = cli::resolve_point(&metric.inner, point)?;
            cli::analyze(&metric.inner, &x, &config)
        };
        match run() {
            Ok(report) => {
                let label = report.label().map(|l| l.to_string()).unwrap_or_default();
                *out = Box::into_raw(Box::new(KfReport {
                    report,
                    label: CString::new(label).unwrap_or_default(),
                }));
                KfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of independent local Killing fields found.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_report_terminal_dim(report: *const KfReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.terminal_dim())
}

/// The flag's rank sequence. Writes at most `cap` entries to `ranks` and
/// returns the full length.
///
/// # Safety
/// `report` must be null or a live handle; `ranks` must have room for
/// `cap` entries unless `cap` is 0.
#[no_mangle]
pub unsafe extern "C" fn kf_report_ranks(report: *const KfReport, ranks: *mut usize, cap: usize) -> usize {
    let Some(r) = report.as_ref() else { return 0 };
    let seq = &r.report.flag.ranks;
    if !ranks.is_null() {
        for (i, &v) in seq.iter().take(cap).enumerate() {
            *ranks.add(i) = v;
        }
    }
    seq.len()
}

/// Algebra label such as `"so(3)-type"`, empty if the algebra was not
/// computed. Borrowed from the report.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_report_label(report: *const KfReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.label.as_ptr())
}

/// 0 for a clean report, 2 when a warning casts doubt on the result.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_report_exit_code(report: *const KfReport) -> i32 {
    report.as_ref().map_or(1, |r| r.report.exit_code())
}

/// The report as JSON; release with [`kf_string_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_report_json(report: *const KfReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| {
        CString::new(r.report.to_json()).map_or(ptr::null_mut(), CString::into_raw)
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kf_report_free(report: *mut KfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn kf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn kf_status_name(status: KfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        KfStatus::Ok => c"ok",
        KfStatus::NullArgument => c"null argument",
        KfStatus::InvalidUtf8 => c"invalid utf-8",
        KfStatus::Expression => c"expression error",
        KfStatus::InvalidMetric => c"invalid metric",
        KfStatus::SingularMetric => c"singular metric",
        KfStatus::SignatureMismatch => c"signature mismatch",
        KfStatus::InvalidConfig => c"invalid configuration",
        KfStatus::UnknownCatalogEntry => c"unknown catalog entry",
        KfStatus::Analysis => c"analysis error",
        KfStatus::Io => c"i/o error",
        KfStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
