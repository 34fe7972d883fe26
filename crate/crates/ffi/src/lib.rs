//! C ABI over `ethresh`.
//!
//! Every fallible function returns an [`EtStatus`]; on failure the message
//! is available from [`et_last_error_message`] on the same thread until the
//! next failing call. Objects are opaque handles released with their
//! `*_free` function. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ethresh::criteria::{
    check_ared, check_ger, check_ls_p, check_ppt, check_red, check_sepball, Certificate,
    CriterionVerdict, SpectrumVector, Status,
};
use ethresh::hatmap::{hat_decomposition, SearchBudget, SimplexVector};
use ethresh::linalg::{Bipartition, HermitianMatrix};
use ethresh::sampling::{sample_wishart_spectrum, SeedSpec, SpectrumSampler, WishartParams};
use ethresh::spectra::MpLaw;
use ethresh::sweep::{
    predicted_threshold, run_sweep, Criterion, RegimeKind, SweepConfig, SweepLimits, SweepResult,
    Threshold,
};
use ethresh::Error;
use num_complex::Complex64;

/// Result code of every fallible call. Values 1 to 4 match the command-line
/// exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtStatus {
    Ok = 0,
    Io = 1,
    InvalidInput = 2,
    NotInCatalog = 3,
    ResourceLimit = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Outcome of a membership test.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtMembership {
    InCertified = 0,
    InNumerical = 1,
    Out = 2,
}

/// Rule that decided a verdict.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtCertificate {
    MinEigenvalue = 0,
    SchurComplement = 1,
    SpectralInequality = 2,
    TrivialFactor = 3,
    RankBound = 4,
    EigenvalueRatio = 5,
    InnerSet = 6,
    OuterSet = 7,
    SearchWitness = 8,
    SearchExhausted = 9,
}

/// Criterion selector for [`et_check_spectrum`] and [`et_check_state`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtCriterion {
    Red = 0,
    Ppt = 1,
    Ared = 2,
    Ls = 3,
    Ger = 4,
    Sepball = 5,
}

/// A membership verdict. `witness_len` is the length of the witness vector
/// (0 when there is none); the entries are copied to the caller's buffer.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtVerdict {
    pub membership: EtMembership,
    pub certificate: EtCertificate,
    pub margin: f64,
    pub witness_len: usize,
}

/// Numeric columns of one sweep row.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtSweepRow {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub c: f64,
    pub trials: usize,
    pub successes: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub undecided: usize,
    pub master_seed: u64,
}

/// Opaque probability vector sorted in descending order.
pub struct EtSpectrum(SpectrumVector);

/// Opaque sweep output.
pub struct EtSweepResult(SweepResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EtStatus {
    match e.exit_code() {
        1 => EtStatus::Io,
        3 => EtStatus::NotInCatalog,
        4 => EtStatus::ResourceLimit,
        _ => EtStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EtStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            EtStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            EtStatus::Panic
        }
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::InvalidParams(msg.into()))
}

/// # Safety
/// `p` must be null or valid for reads of `len` values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or valid for a write of `T`.
unsafe fn write<T>(p: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

/// Message of the last failure on this thread, or NULL if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn et_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Limits of the smallest and largest rescaled Wishart eigenvalue at ratio `c`.
///
/// # Safety
/// `left` and `right` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn et_mp_edges(c: f64, left: *mut f64, right: *mut f64) -> EtStatus {
    guard(|| {
        let law = MpLaw::new(c)?;
        write(left, law.left_edge(), "left")?;
        write(right, law.right_edge(), "right")
    })
}

/// Density of the Marchenko-Pastur law (bulk part) at `x`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn et_mp_density(c: f64, x: f64, out: *mut f64) -> EtStatus {
    guard(|| write(out, MpLaw::new(c)?.density(x), "out"))
}

/// Cumulative distribution function of the Marchenko-Pastur law.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn et_mp_cdf(c: f64, x: f64, out: *mut f64) -> EtStatus {
    guard(|| write(out, MpLaw::new(c)?.cdf(x), "out"))
}

/// Quantile of the Marchenko-Pastur law for `q` strictly between the atom
/// mass and 1.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn et_mp_quantile(c: f64, q: f64, out: *mut f64) -> EtStatus {
    guard(|| write(out, MpLaw::new(c)?.quantile(q)?, "out"))
}

/// Builds a spectrum from `len` values summing to one.
///
/// # Safety
/// `values` must be valid for `len` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn et_spectrum_new(
    values: *const f64,
    len: usize,
    out: *mut *mut EtSpectrum,
) -> EtStatus {
    guard(|| {
        let v = slice(values, len, "values")?.to_vec();
        let s = SpectrumVector::new(v)?;
        write(out, Box::into_raw(Box::new(EtSpectrum(s))), "out")
    })
}

/// Samples the normalized spectrum of a random induced state on
/// `C^n (x) C^k` with environment dimension `s`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn et_spectrum_sample(
    n: usize,
    k: usize,
    s: usize,
    seed: u64,
    out: *mut *mut EtSpectrum,
) -> EtStatus {
    guard(|| {
        let bp = Bipartition::new(n, k)?;
        let p = WishartParams::new(bp.dim(), s)?;
        let w = sample_wishart_spectrum(p, SeedSpec::new(seed, 0), SpectrumSampler::Bidiagonal)?;
        let spec = SpectrumVector::from_unnormalized(w.eigenvalues)?.with_bipartition(bp)?;
        write(out, Box::into_raw(Box::new(EtSpectrum(spec))), "out")
    })
}

/// Number of entries, or 0 for NULL.
///
/// # Safety
/// `spectrum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn et_spectrum_len(spectrum: *const EtSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the entries (descending) into `buf`, which must hold the length.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn et_spectrum_copy(
    spectrum: *const EtSpectrum,
    buf: *mut f64,
    cap: usize,
) -> EtStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or(Failure::Null("spectrum"))?;
        if cap < s.0.len() {
            return Err(invalid(format!(
                "buffer holds {cap} values, need {}",
                s.0.len()
            )));
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        ptr::copy_nonoverlapping(s.0.entries().as_ptr(), buf, s.0.len());
        Ok(())
    })
}

/// Releases a spectrum. NULL is ignored.
///
/// # Safety
/// `spectrum` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn et_spectrum_free(spectrum: *mut EtSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

fn certificate(c: Certificate) -> EtCertificate {
    match c {
        Certificate::MinEigenvalue => EtCertificate::MinEigenvalue,
        Certificate::SchurComplement => EtCertificate::SchurComplement,
        Certificate::SpectralInequality => EtCertificate::SpectralInequality,
        Certificate::TrivialFactor => EtCertificate::TrivialFactor,
        Certificate::RankBound => EtCertificate::RankBound,
        Certificate::EigenvalueRatio => EtCertificate::EigenvalueRatio,
        Certificate::InnerSet => EtCertificate::InnerSet,
        Certificate::OuterSet => EtCertificate::OuterSet,
        Certificate::SearchWitness => EtCertificate::SearchWitness,
        Certificate::SearchExhausted => EtCertificate::SearchExhausted,
    }
}

/// # Safety
/// `out` valid for a write; `witness` valid for `witness_cap` writes when
/// the verdict has a witness.
unsafe fn store_verdict(
    v: &CriterionVerdict,
    out: *mut EtVerdict,
    witness: *mut f64,
    witness_cap: usize,
) -> Result<(), Failure> {
    let membership = match v.status {
        Status::InCertified => EtMembership::InCertified,
        Status::InNumerical => EtMembership::InNumerical,
        Status::Out => EtMembership::Out,
    };
    let w = v.witness.as_ref().map(|w| w.entries()).unwrap_or(&[]);
    if !w.is_empty() && !witness.is_null() {
        ptr::copy_nonoverlapping(w.as_ptr(), witness, w.len().min(witness_cap));
    }
    write(
        out,
        EtVerdict {
            membership,
            certificate: certificate(v.certificate),
            margin: v.margin,
            witness_len: w.len(),
        },
        "out",
    )
}

/// Tests a spectrum against a spectral criterion (`ARED`, `LS`, `GER`,
/// `SEPBALL`). `p` is used by `LS` only. `ARED` uses the default search
/// budget. A witness, when present, is copied to `witness` up to
/// `witness_cap` entries; `witness` may be NULL.
///
/// # Safety
/// `spectrum` must be a live handle, `out` valid for a write and `witness`
/// NULL or valid for `witness_cap` writes.
#[no_mangle]
pub unsafe extern "C" fn et_check_spectrum(
    spectrum: *const EtSpectrum,
    criterion: EtCriterion,
    n: usize,
    k: usize,
    p: usize,
    out: *mut EtVerdict,
    witness: *mut f64,
    witness_cap: usize,
) -> EtStatus {
    guard(|| {
        let s = &spectrum.as_ref().ok_or(Failure::Null("spectrum"))?.0;
        let v = match criterion {
            EtCriterion::Ared => {
                check_ared(s, Some(Bipartition::new(n, k)?), SearchBudget::default())?
            }
            EtCriterion::Ls => check_ls_p(s, p)?,
            EtCriterion::Ger => check_ger(s, Some(Bipartition::new(n, k)?))?,
            EtCriterion::Sepball => check_sepball(s)?,
            EtCriterion::Red | EtCriterion::Ppt => {
                return Err(invalid("RED and PPT need a state; use et_check_state"))
            }
        };
        store_verdict(&v, out, witness, witness_cap)
    })
}

/// Tests a density matrix against `RED` or `PPT`. `entries` holds
/// `2 (nk)^2` doubles: row-major `(re, im)` pairs.
///
/// # Safety
/// `entries` must be valid for `2 (nk)^2` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn et_check_state(
    entries: *const f64,
    n: usize,
    k: usize,
    criterion: EtCriterion,
    out: *mut EtVerdict,
) -> EtStatus {
    guard(|| {
        let bp = Bipartition::new(n, k)?;
        let d = bp.dim();
        let raw = slice(entries, 2 * d * d, "entries")?;
        let data = raw
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let rho = HermitianMatrix::new(d, data)?;
        let v = match criterion {
            EtCriterion::Red => check_red(&rho, bp)?,
            EtCriterion::Ppt => check_ppt(&rho, bp)?,
            _ => return Err(invalid("only RED and PPT act on states")),
        };
        store_verdict(&v, out, ptr::null_mut(), 0)
    })
}

/// Hat vector of the probability vector `x` (length `r`) for `n x k`.
/// Writes `n k` values to `hat` (descending) and the secular roots to
/// `etas`, which must hold `r` values; `etas_len` receives their count.
///
/// # Safety
/// `x` valid for `r` reads, `hat` for `n k` writes, `etas` for `r` writes,
/// `etas_len` for a write.
#[no_mangle]
pub unsafe extern "C" fn et_hat(
    x: *const f64,
    r: usize,
    n: usize,
    k: usize,
    hat: *mut f64,
    etas: *mut f64,
    etas_len: *mut usize,
) -> EtStatus {
    guard(|| {
        let x = SimplexVector::new(slice(x, r, "x")?.to_vec())?;
        let h = hat_decomposition(&x, Bipartition::new(n, k)?)?;
        if hat.is_null() || etas.is_null() {
            return Err(Failure::Null("hat or etas"));
        }
        ptr::copy_nonoverlapping(h.hat.as_ptr(), hat, h.hat.len());
        ptr::copy_nonoverlapping(h.etas.as_ptr(), etas, h.etas.len());
        write(etas_len, h.etas.len(), "etas_len")
    })
}

/// Catalogued threshold. `criterion` and `regime` use the command-line
/// spellings (`ared`, `ls:4`, `second-unbalanced`, ...); `fixed` is the
/// fixed dimension or 0 for none. On success `value` holds the critical
/// constant, or the critical environment dimension when `is_fixed_dim` is 1.
///
/// # Safety
/// Strings must be NUL-terminated; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn et_threshold(
    criterion: *const c_char,
    regime: *const c_char,
    fixed: usize,
    value: *mut f64,
    is_fixed_dim: *mut i32,
) -> EtStatus {
    guard(|| {
        let c: Criterion = string(criterion, "criterion")?.parse()?;
        let r: RegimeKind = string(regime, "regime")?.parse()?;
        let fixed = (fixed > 0).then_some(fixed);
        let (v, flag) = match predicted_threshold(c, r, fixed)? {
            Threshold::Constant(v) => (v, 0),
            Threshold::FixedDim(s) => (s as f64, 1),
            Threshold::Range { .. } => unreachable!("ranges are reported as errors"),
        };
        write(value, v, "value")?;
        write(is_fixed_dim, flag, "is_fixed_dim")
    })
}

/// Runs a sweep described by a JSON configuration (same schema as the
/// command line's `--config`). The resource cap honours `ET_MAX_ENTRIES`.
///
/// # Safety
/// `config_json` must be NUL-terminated; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn et_sweep_run_json(
    config_json: *const c_char,
    out: *mut *mut EtSweepResult,
) -> EtStatus {
    guard(|| {
        let config: SweepConfig =
            serde_json::from_str(string(config_json, "config_json")?).map_err(Error::from)?;
        let result = run_sweep(&config, SweepLimits::from_env()?)?;
        write(out, Box::into_raw(Box::new(EtSweepResult(result))), "out")
    })
}

/// Number of rows, or 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn et_sweep_row_count(result: *const EtSweepResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.rows.len())
}

/// Copies row `index`.
///
/// # Safety
/// `result` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn et_sweep_row(
    result: *const EtSweepResult,
    index: usize,
    out: *mut EtSweepRow,
) -> EtStatus {
    guard(|| {
        let r = &result.as_ref().ok_or(Failure::Null("result"))?.0;
        let row = r
            .rows
            .get(index)
            .ok_or_else(|| invalid(format!("row {index} of {}", r.rows.len())))?;
        write(
            out,
            EtSweepRow {
                n: row.n,
                k: row.k,
                s: row.s,
                c: row.c,
                trials: row.trials,
                successes: row.successes,
                p_hat: row.p_hat,
                ci_low: row.ci_low,
                ci_high: row.ci_high,
                undecided: row.undecided,
                master_seed: row.master_seed,
            },
            "out",
        )
    })
}

/// The sweep as CSV text. Release the string with [`et_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn et_sweep_csv(
    result: *const EtSweepResult,
    out: *mut *mut c_char,
) -> EtStatus {
    guard(|| {
        let r = &result.as_ref().ok_or(Failure::Null("result"))?.0;
        let csv = CString::new(r.to_csv_string()?).map_err(|e| invalid(e.to_string()))?;
        write(out, csv.into_raw(), "out")
    })
}

/// Releases a sweep result. NULL is ignored.
///
/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn et_sweep_free(result: *mut EtSweepResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn et_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
