//! C ABI over `mvgallery`.
//!
//! Objects are opaque handles freed by their `*_free` function. Every call
//! returns an [`MvgStatus`]; on failure [`mvg_last_error`] describes it.
//! Strings handed out by the library are NUL-terminated UTF-8 and must be
//! released with [`mvg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mvgallery::cli::{execute, CommandKind, JobConfig};
use mvgallery::gallery::GalleryModel;
use mvgallery::root_system::{Rat, RootSystem};
use mvgallery::Error;

/// Result of every call. The nonzero values match the exit codes of the
/// command-line tool where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MvgStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Invariant = 3,
    Precision = 4,
    Panic = 5,
}

/// A root system with a dominant coweight and its minimal gallery type.
pub struct MvgModel {
    type_label: String,
    lambda: Vec<Rat>,
    model: GalleryModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> MvgStatus {
    match e.exit_code() {
        2 => MvgStatus::Config,
        4 => MvgStatus::Precision,
        _ => MvgStatus::Invariant,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (MvgStatus, String)>) -> MvgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MvgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MvgStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (MvgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MvgStatus, String) {
    (MvgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MvgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (MvgStatus::Config, format!("{what} is not UTF-8")))
}

fn parse_rationals(s: &str, what: &str) -> Result<Vec<Rat>, (MvgStatus, String)> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rat>()
                .map_err(|_| (MvgStatus::Config, format!("{what}: cannot parse {t:?}")))
        })
        .collect()
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), (MvgStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c =
        CString::new(s).map_err(|_| (MvgStatus::Invariant, "string contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mvg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mvg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a model from a type label such as `"A2"` and a dominant coweight
/// in simple-coroot coordinates such as `"1,1"`.
///
/// # Safety
/// `type_label` and `lambda` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_model_new(
    type_label: *const c_char,
    lambda: *const c_char,
    out: *mut *mut MvgModel,
) -> MvgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let label = read_str(type_label, "type label")?;
        let coords = parse_rationals(read_str(lambda, "lambda")?, "lambda")?;
        let rs = RootSystem::from_label(label).map_err(lib_err)?;
        if coords.len() != rs.rank() {
            return Err((
                MvgStatus::Config,
                format!("lambda needs {} coordinates", rs.rank()),
            ));
        }
        let lambda = rs.coweight_from_coroot_coords(&coords).ok_or((
            MvgStatus::Config,
            "lambda is not in the coweight lattice".to_string(),
        ))?;
        let model = GalleryModel::from_label(label, &lambda).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MvgModel {
            type_label: label.to_string(),
            lambda: coords,
            model,
        }));
        Ok(())
    })
}

/// Frees a model. Null is ignored.
///
/// # Safety
/// `m` must come from [`mvg_model_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mvg_model_free(m: *mut MvgModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn model<'a>(m: *const MvgModel) -> Result<&'a MvgModel, (MvgStatus, String)> {
    m.as_ref().ok_or_else(|| null("model"))
}

/// Rank of the root system.
///
/// # Safety
/// `m` must be a live model and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_model_rank(m: *const MvgModel, out: *mut usize) -> MvgStatus {
    guard(|| {
        let m = model(m)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = m.model.root_system().rank();
        Ok(())
    })
}

/// Length `p` of the minimal gallery type.
///
/// # Safety
/// `m` must be a live model and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_model_gallery_length(
    m: *const MvgModel,
    out: *mut usize,
) -> MvgStatus {
    guard(|| {
        let m = model(m)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = m.model.p();
        Ok(())
    })
}

/// Number of LS galleries, checked against the Weyl dimension formula and
/// Freudenthal multiplicities.
///
/// # Safety
/// `m` must be a live model and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_crystal_size(m: *const MvgModel, out: *mut usize) -> MvgStatus {
    guard(|| {
        let m = model(m)?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *out = m.model.checked_crystal().map_err(lib_err)?.len();
        Ok(())
    })
}

/// Weyl dimension of the irreducible representation of highest weight
/// lambda.
///
/// # Safety
/// `m` must be a live model and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_weyl_dimension(m: *const MvgModel, out: *mut u64) -> MvgStatus {
    guard(|| {
        let m = model(m)?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *out = m
            .model
            .root_system()
            .weyl_dimension(m.model.lambda())
            .map_err(lib_err)?;
        Ok(())
    })
}

unsafe fn job(
    m: *const MvgModel,
    command: CommandKind,
    seed: u64,
    nu: *const c_char,
    out: *mut *mut c_char,
) -> MvgStatus {
    guard(|| {
        let m = model(m)?;
        let nu = if nu.is_null() {
            None
        } else {
            Some(parse_rationals(read_str(nu, "nu")?, "nu")?)
        };
        let cfg = JobConfig {
            command,
            type_label: m.type_label.clone(),
            lambda: m.lambda.clone(),
            nu,
            direction: None,
            seed,
            precision: None,
            trials: 5,
            out: None,
        };
        let outcome = execute(&cfg).map_err(lib_err)?;
        give_string(out, outcome.artifacts[0].contents.clone())?;
        match outcome.violation {
            None => Ok(()),
            Some(v) => Err((
                if v.exit_code == 4 {
                    MvgStatus::Precision
                } else {
                    MvgStatus::Invariant
                },
                v.message,
            )),
        }
    })
}

/// Crystal graph as JSON. The string is written even when a check fails.
///
/// # Safety
/// `m` must be a live model and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_crystal_json(
    m: *const MvgModel,
    seed: u64,
    out: *mut *mut c_char,
) -> MvgStatus {
    job(m, CommandKind::Crystal, seed, ptr::null(), out)
}

/// MV polytopes of the LS galleries as JSON, restricted to weight `nu`
/// (simple-coroot coordinates) unless `nu` is null.
///
/// # Safety
/// `m` must be a live model, `nu` null or a NUL-terminated string, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_polytopes_json(
    m: *const MvgModel,
    nu: *const c_char,
    out: *mut *mut c_char,
) -> MvgStatus {
    job(m, CommandKind::Polytopes, 0, nu, out)
}

/// Retraction report as JSON (five samples per pair). Type A only.
///
/// # Safety
/// `m` must be a live model and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_verify_retraction_json(
    m: *const MvgModel,
    seed: u64,
    out: *mut *mut c_char,
) -> MvgStatus {
    job(m, CommandKind::VerifyRetraction, seed, ptr::null(), out)
}
