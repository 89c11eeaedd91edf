//! C ABI over the `maoea` library.
//!
//! Every fallible function returns a [`MaoeaStatus`]. On failure the message
//! is available from [`maoea_last_error`] on the same thread until the next
//! call that fails. Objects cross the boundary as opaque handles that must be
//! released with their matching `_free` function; strings returned by the
//! library are released with [`maoea_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use maoea::adaptation::{adapt, AdaptationKind, AdaptationParams};
use maoea::metrics::igd;
use maoea::problems::Problem;
use maoea::refgen::ReferenceArchive;
use maoea::runner::{experiment, RunConfig};
use maoea::Error;

/// Result codes. The first three match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaoeaStatus {
    Ok = 0,
    ConfigError = 1,
    RuntimeError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Outcome of one adaptation call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaoeaAdaptation {
    None = 0,
    Shrink = 1,
    Expand = 2,
}

/// Opaque benchmark problem.
pub struct MaoeaProblem(Problem);

/// Opaque layered reference archive.
pub struct MaoeaArchive(ReferenceArchive);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let s = CString::new(bytes).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

struct Failure(MaoeaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_config() {
            MaoeaStatus::ConfigError
        } else {
            MaoeaStatus::RuntimeError
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MaoeaStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MaoeaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MaoeaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            MaoeaStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MaoeaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|&b| b != 0);
    CString::new(bytes).expect("interior nuls removed").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn maoea_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn maoea_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a registered problem. `d = 0` selects the conventional size.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_problem_new(
    name: *const c_char,
    m: usize,
    d: usize,
    out: *mut *mut MaoeaProblem,
) -> MaoeaStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let p = Problem::new(name, m, (d > 0).then_some(d))?;
        write_out(out, Box::into_raw(Box::new(MaoeaProblem(p))), "out")
    })
}

/// # Safety
/// `p` must come from [`maoea_problem_new`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn maoea_problem_free(p: *mut MaoeaProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Objective and decision-variable counts.
///
/// # Safety
/// `p` must be a live problem handle; `m` and `d` writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_problem_dims(p: *const MaoeaProblem, m: *mut usize, d: *mut usize) -> MaoeaStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        write_out(m, p.0.m(), "m")?;
        write_out(d, p.0.d(), "d")
    })
}

/// Evaluates `x` (length `d`) into `out` (length `m`).
///
/// # Safety
/// `x` must hold `d` doubles and `out` room for `m`.
#[no_mangle]
pub unsafe extern "C" fn maoea_problem_evaluate(
    p: *const MaoeaProblem,
    x: *const f64,
    d: usize,
    out: *mut f64,
    m: usize,
) -> MaoeaStatus {
    guard(|| {
        let p = &p.as_ref().ok_or_else(|| null("problem"))?.0;
        if d != p.d() || m != p.m() {
            return Err(Failure(
                MaoeaStatus::ConfigError,
                format!("expected d={} and m={}, got {d} and {m}", p.d(), p.m()),
            ));
        }
        let x = read_slice(x, d, "x")?;
        if !p.bounds().contains(x) {
            return Err(Failure(MaoeaStatus::ConfigError, "x is outside the bounds".into()));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let f = p.evaluate(x);
        slice::from_raw_parts_mut(out, m).copy_from_slice(&f);
        Ok(())
    })
}

/// Writes `n` row-major true-front samples into `out` (room for `n·m`).
///
/// # Safety
/// `out` must have room for `n·m` doubles.
#[no_mangle]
pub unsafe extern "C" fn maoea_problem_sample_front(
    p: *const MaoeaProblem,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> MaoeaStatus {
    guard(|| {
        let p = &p.as_ref().ok_or_else(|| null("problem"))?.0;
        let need = n * p.m();
        if out_len < need {
            return Err(Failure(MaoeaStatus::BufferTooSmall, format!("need {need} doubles")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let pf = p.sample_true_pf(n)?;
        let dst = slice::from_raw_parts_mut(out, need);
        for (row, f) in dst.chunks_mut(p.m()).zip(&pf) {
            row.copy_from_slice(f);
        }
        Ok(())
    })
}

/// Base-density archive sized for a population of `n` in `m` objectives.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_archive_new(m: usize, n: usize, out: *mut *mut MaoeaArchive) -> MaoeaStatus {
    guard(|| {
        let a = ReferenceArchive::for_population(m, n)?;
        write_out(out, Box::into_raw(Box::new(MaoeaArchive(a))), "out")
    })
}

/// # Safety
/// `a` must come from [`maoea_archive_new`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn maoea_archive_free(a: *mut MaoeaArchive) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of participating reference vectors.
///
/// # Safety
/// `a` must be a live archive handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_archive_participating_count(a: *const MaoeaArchive, out: *mut usize) -> MaoeaStatus {
    guard(|| {
        let a = &a.as_ref().ok_or_else(|| null("archive"))?.0;
        write_out(out, a.participating_refs().len(), "out")
    })
}

/// Writes the participating directions row-major into `out`
/// (`count·m` doubles, each row summing to one).
///
/// # Safety
/// `out` must have room for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn maoea_archive_participating(
    a: *const MaoeaArchive,
    out: *mut f64,
    out_len: usize,
) -> MaoeaStatus {
    guard(|| {
        let a = &a.as_ref().ok_or_else(|| null("archive"))?.0;
        let z = a.participating();
        let need = z.len() * a.m();
        if out_len < need {
            return Err(Failure(MaoeaStatus::BufferTooSmall, format!("need {need} doubles")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = slice::from_raw_parts_mut(out, need);
        for (row, v) in dst.chunks_mut(a.m()).zip(&z) {
            row.copy_from_slice(&v.direction);
        }
        Ok(())
    })
}

/// One adaptation step given the active participating indices.
///
/// # Safety
/// `active` must hold `active_len` indices and `kind` be writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_archive_adapt(
    a: *mut MaoeaArchive,
    active: *const usize,
    active_len: usize,
    n: usize,
    theta: f64,
    kind: *mut MaoeaAdaptation,
) -> MaoeaStatus {
    guard(|| {
        let a = &mut a.as_mut().ok_or_else(|| null("archive"))?.0;
        let active = read_slice(active, active_len, "active")?;
        let params = AdaptationParams::new(n, theta, 1)?;
        params.validate()?;
        let (_, event) = adapt(a, active, &params, 0)?;
        let k = match event.kind {
            AdaptationKind::None => MaoeaAdaptation::None,
            AdaptationKind::Shrink => MaoeaAdaptation::Shrink,
            AdaptationKind::Expand => MaoeaAdaptation::Expand,
        };
        write_out(kind, k, "kind")
    })
}

/// IGD of `pop` against `pf`, both row-major with `m` columns.
///
/// # Safety
/// `pf` must hold `pf_rows·m` doubles and `pop` `pop_rows·m`.
#[no_mangle]
pub unsafe extern "C" fn maoea_igd(
    pf: *const f64,
    pf_rows: usize,
    pop: *const f64,
    pop_rows: usize,
    m: usize,
    out: *mut f64,
) -> MaoeaStatus {
    guard(|| {
        if m == 0 {
            return Err(Failure(MaoeaStatus::ConfigError, "m must be positive".into()));
        }
        let pf = read_slice(pf, pf_rows * m, "pf")?;
        let pop = read_slice(pop, pop_rows * m, "pop")?;
        let s: Vec<&[f64]> = pf.chunks(m).collect();
        let p: Vec<&[f64]> = pop.chunks(m).collect();
        write_out(out, igd(&s, &p)?, "out")
    })
}

/// Runs an experiment described by a JSON configuration and returns its
/// summary as JSON. Output files are written when the configuration names
/// an output directory.
///
/// # Safety
/// `config_json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_run_json(config_json: *const c_char, out: *mut *mut c_char) -> MaoeaStatus {
    guard(|| {
        let text = read_str(config_json, "config_json")?;
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let result = experiment(&config)?;
        let json = serde_json::to_string(&result.summary).map_err(Error::from)?;
        write_out(out, into_c_string(json), "out")
    })
}

/// JSON dump of the base layer for `m` objectives at density `h`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maoea_lattice_json(m: usize, h: u32, out: *mut *mut c_char) -> MaoeaStatus {
    guard(|| {
        let a = ReferenceArchive::new(m, h)?;
        let json = serde_json::to_string(&a.dump()).map_err(Error::from)?;
        write_out(out, into_c_string(json), "out")
    })
}
