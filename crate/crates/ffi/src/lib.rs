//! C ABI over `dcqd`.
//!
//! Objects cross the boundary as opaque handles created by `dcqd_*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`DcqdStatus`]; on failure a description is available from
//! [`dcqd_last_error`] on the same thread. Matrices are exchanged as
//! separate row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dcqd::channels::{ChannelSpec, KrausSet};
use dcqd::dcqd::{characterize, Amplitudes, Configuration, ReconstructionResult, Setting};
use dcqd::relax::{joint_estimate, relaxation_channel, Shots, TimeConstant};
use dcqd::report::{ResourceRow, Scheme};
use dcqd::sampling::characterize_sampled;
use dcqd::sqpt::sqpt_characterize;
use dcqd::{DcqdError, Result};
use num_complex::Complex64;

/// Status codes. Values 2 to 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcqdStatus {
    Ok = 0,
    Io = 1,
    Parse = 2,
    IllPosed = 3,
    Numerical = 4,
    DimensionMismatch = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Characterization scheme for [`dcqd_resources`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcqdScheme {
    Sqpt = 0,
    Aapt = 1,
    Dcqd = 2,
}

/// Per-pair experimental setting for [`dcqd_outcome_probabilities`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcqdSetting {
    Pop = 0,
    CohZ = 1,
    CohX = 2,
    CohY = 3,
}

/// Input amplitudes `α|00⟩ + β|11⟩`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcqdAmplitudes {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
}

/// Joint relaxation estimate. Infinite time constants stand for no decay.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcqdRelaxEstimate {
    pub t1_constant: f64,
    pub t2_constant: f64,
    pub t_prime_over_t2_prime: f64,
    pub p_minus: f64,
    pub xx_out: f64,
    pub configurations: u64,
}

/// One row of the resource table.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DcqdResourceRow {
    pub n: u32,
    pub dim_h: u64,
    pub n_in: u64,
    pub n_m: u64,
    pub n_exp: u64,
}

/// Opaque channel handle.
pub struct DcqdChannel {
    kraus: KrausSet,
}

/// Opaque reconstruction handle.
pub struct DcqdChi {
    n: usize,
    entries: Vec<Complex64>,
    closed_form_residual: Option<f64>,
    configurations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &DcqdError) -> DcqdStatus {
    match err {
        DcqdError::Io(_) => DcqdStatus::Io,
        DcqdError::Parse { .. } | DcqdError::InvalidChannel(_) | DcqdError::InvalidState(_) => DcqdStatus::Parse,
        DcqdError::IllPosed(_) | DcqdError::InvalidConfiguration(_) | DcqdError::IllConditionedPlan(_) => {
            DcqdStatus::IllPosed
        }
        DcqdError::DimensionMismatch(_) => DcqdStatus::DimensionMismatch,
        DcqdError::Validation(_)
        | DcqdError::NotCompletelyPositive { .. }
        | DcqdError::InvalidDistribution(_)
        | DcqdError::Saturation(_)
        | DcqdError::InconsistentData(_) => DcqdStatus::Numerical,
    }
}

enum Failure {
    Lib(DcqdError),
    Status(DcqdStatus, String),
}

impl From<DcqdError> for Failure {
    fn from(e: DcqdError) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(DcqdStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> std::result::Result<(), Failure>) -> DcqdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcqdStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DcqdStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> std::result::Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(DcqdError::parse(what, "not valid UTF-8")))
}

unsafe fn amplitudes(p: *const DcqdAmplitudes) -> Result<Amplitudes> {
    match p.as_ref() {
        None => Ok(Amplitudes::default()),
        Some(a) => Amplitudes::new(Complex64::new(a.alpha_re, a.alpha_im), Complex64::new(a.beta_re, a.beta_im)),
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> std::result::Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcqd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a channel on `n` qubits from the compact text form, e.g.
/// `"bit_flip:0.25"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_channel_parse(spec: *const c_char, n: usize, out: *mut *mut DcqdChannel) -> DcqdStatus {
    guard(|| {
        let kraus = ChannelSpec::parse(text(spec, "spec")?)?.to_kraus(n)?;
        put(out, DcqdChannel { kraus })
    })
}

/// Builds a channel on `n` qubits from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_channel_from_json(json: *const c_char, n: usize, out: *mut *mut DcqdChannel) -> DcqdStatus {
    guard(|| {
        let kraus = ChannelSpec::from_json(text(json, "json")?)?.to_kraus(n)?;
        put(out, DcqdChannel { kraus })
    })
}

/// Builds a channel from `count` Kraus operators on `n` qubits, each a
/// row-major `2^n × 2^n` block of `re` and `im` values laid out back to back.
///
/// # Safety
/// `re` and `im` must each point to `count · 4^n` doubles.
#[no_mangle]
pub unsafe extern "C" fn dcqd_channel_from_kraus(
    n: usize,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut DcqdChannel,
) -> DcqdStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("kraus data"));
        }
        if n == 0 || n > 3 {
            return Err(DcqdError::InvalidChannel(format!("{n} qubits outside 1..=3")).into());
        }
        let d = 1usize << n;
        let re = std::slice::from_raw_parts(re, count * d * d);
        let im = std::slice::from_raw_parts(im, count * d * d);
        let ops = (0..count)
            .map(|k| {
                dcqd::qcore::CMatrix::from_fn(d, d, |i, j| {
                    let at = k * d * d + i * d + j;
                    Complex64::new(re[at], im[at])
                })
            })
            .collect();
        put(out, DcqdChannel { kraus: KrausSet::new(n, ops)? })
    })
}

/// Amplitude damping for `t1` then phase damping for `t2` on one qubit.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_channel_relaxation(
    t1: f64,
    time_t1: f64,
    t2: f64,
    time_t2: f64,
    out: *mut *mut DcqdChannel,
) -> DcqdStatus {
    guard(|| put(out, DcqdChannel { kraus: relaxation_channel(t1, time_t1, t2, time_t2)? }))
}

/// # Safety
/// `channel` must come from a constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dcqd_channel_n_qubits(channel: *const DcqdChannel) -> usize {
    channel.as_ref().map_or(0, |c| c.kraus.n_qubits())
}

/// # Safety
/// `channel` must be null or come from a constructor, and is invalid after
/// this call.
#[no_mangle]
pub unsafe extern "C" fn dcqd_channel_free(channel: *mut DcqdChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

fn chi_handle(r: ReconstructionResult) -> DcqdChi {
    DcqdChi {
        n: r.chi.n_qubits(),
        entries: r.chi.matrix().transpose().iter().copied().collect(),
        closed_form_residual: r.residual,
        configurations: r.configurations,
    }
}

/// Reconstructs χ from exact statistics of all `4^n` configurations.
/// `amplitudes` may be null for the default choice.
///
/// # Safety
/// `channel` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_characterize(
    channel: *const DcqdChannel,
    amps: *const DcqdAmplitudes,
    out: *mut *mut DcqdChi,
) -> DcqdStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        let r = characterize(&ch.kraus, &amplitudes(amps)?)?;
        put(out, chi_handle(r))
    })
}

/// Reconstructs χ from `shots` samples per configuration.
///
/// # Safety
/// `channel` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_characterize_sampled(
    channel: *const DcqdChannel,
    amps: *const DcqdAmplitudes,
    shots: u64,
    seed: u64,
    out: *mut *mut DcqdChi,
) -> DcqdStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        let r = characterize_sampled(&ch.kraus, &amplitudes(amps)?, shots, seed)?;
        put(out, chi_handle(r.result))
    })
}

/// Standard process tomography baseline.
///
/// # Safety
/// `channel` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_sqpt(channel: *const DcqdChannel, out: *mut *mut DcqdChi) -> DcqdStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        let r = sqpt_characterize(&ch.kraus)?;
        put(
            out,
            DcqdChi {
                n: r.chi.n_qubits(),
                entries: r.chi.matrix().transpose().iter().copied().collect(),
                closed_form_residual: None,
                configurations: r.experiments,
            },
        )
    })
}

/// Row and column count of χ, `4^n`; zero for a null handle.
///
/// # Safety
/// `chi` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcqd_chi_size(chi: *const DcqdChi) -> usize {
    chi.as_ref().map_or(0, |c| 1 << (2 * c.n))
}

/// Experimental configurations consumed by the reconstruction.
///
/// # Safety
/// `chi` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcqd_chi_configurations(chi: *const DcqdChi) -> usize {
    chi.as_ref().map_or(0, |c| c.configurations)
}

/// Largest entrywise difference between the closed-form and linear-inversion
/// estimates; NaN when no closed form was computed.
///
/// # Safety
/// `chi` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcqd_chi_residual(chi: *const DcqdChi) -> f64 {
    chi.as_ref().and_then(|c| c.closed_form_residual).unwrap_or(f64::NAN)
}

/// Copies χ row-major into `re` and `im`, each of length `len ≥ size²`.
///
/// # Safety
/// `chi` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dcqd_chi_copy(chi: *const DcqdChi, re: *mut f64, im: *mut f64, len: usize) -> DcqdStatus {
    guard(|| {
        let c = chi.as_ref().ok_or_else(|| null("chi"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        if len < c.entries.len() {
            return Err(Failure::Status(
                DcqdStatus::BufferTooSmall,
                format!("buffer holds {len} entries, {} needed", c.entries.len()),
            ));
        }
        let re = std::slice::from_raw_parts_mut(re, c.entries.len());
        let im = std::slice::from_raw_parts_mut(im, c.entries.len());
        for (k, z) in c.entries.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// # Safety
/// `chi` must be null or a live handle, and is invalid after this call.
#[no_mangle]
pub unsafe extern "C" fn dcqd_chi_free(chi: *mut DcqdChi) {
    if !chi.is_null() {
        drop(Box::from_raw(chi));
    }
}

/// Exact outcome probabilities of the configuration given by one setting
/// per pair. Writes `4^n_settings` values.
///
/// # Safety
/// `settings` must hold `n_settings` values; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dcqd_outcome_probabilities(
    channel: *const DcqdChannel,
    settings: *const DcqdSetting,
    n_settings: usize,
    amps: *const DcqdAmplitudes,
    out: *mut f64,
    len: usize,
) -> DcqdStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if settings.is_null() || out.is_null() {
            return Err(null("settings or output buffer"));
        }
        let settings: Vec<Setting> = std::slice::from_raw_parts(settings, n_settings)
            .iter()
            .map(|s| match s {
                DcqdSetting::Pop => Setting::Pop,
                DcqdSetting::CohZ => Setting::CohZ,
                DcqdSetting::CohX => Setting::CohX,
                DcqdSetting::CohY => Setting::CohY,
            })
            .collect();
        let config = Configuration::new(settings, amplitudes(amps)?)?;
        let dist = config.outcome_probabilities(&ch.kraus)?;
        if len < dist.probabilities.len() {
            return Err(Failure::Status(
                DcqdStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", dist.probabilities.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, dist.probabilities.len()).copy_from_slice(&dist.probabilities);
        Ok(())
    })
}

/// Simulates relaxation with the true constants and estimates them back from
/// one configuration; `shots = 0` uses exact statistics. Null `amps`
/// selects `α = √(2/3)`, `β = √(1/3)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_relax_estimate(
    time_t1: f64,
    time_t2: f64,
    t1: f64,
    t2: f64,
    amps: *const DcqdAmplitudes,
    shots: u64,
    seed: u64,
    out: *mut DcqdRelaxEstimate,
) -> DcqdStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("output"))?;
        let amps = if amps.is_null() {
            Amplitudes::real((2.0f64 / 3.0).sqrt())?
        } else {
            amplitudes(amps)?
        };
        let channel = relaxation_channel(t1, time_t1, t2, time_t2)?;
        let shots = (shots > 0).then_some(Shots { shots, seed });
        let (est, _) = joint_estimate(&channel, &amps, t1, t2, shots)?;
        let value = |t: TimeConstant| t.value().unwrap_or(f64::INFINITY);
        *out = DcqdRelaxEstimate {
            t1_constant: value(est.time_t1),
            t2_constant: value(est.time_t2),
            t_prime_over_t2_prime: est.t_prime_over_t2_prime,
            p_minus: est.p_minus,
            xx_out: est.xx_out,
            configurations: est.configurations as u64,
        };
        Ok(())
    })
}

/// Resource counts of one scheme on `n` qubits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcqd_resources(n: u32, scheme: DcqdScheme, out: *mut DcqdResourceRow) -> DcqdStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("output"))?;
        let scheme = match scheme {
            DcqdScheme::Sqpt => Scheme::Sqpt,
            DcqdScheme::Aapt => Scheme::Aapt,
            DcqdScheme::Dcqd => Scheme::Dcqd,
        };
        let r = ResourceRow::new(scheme, n)?;
        *out = DcqdResourceRow {
            n: r.n,
            dim_h: r.dim_h,
            n_in: r.n_in,
            n_m: r.n_m,
            n_exp: r.n_exp,
        };
        Ok(())
    })
}
