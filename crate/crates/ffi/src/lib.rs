//! C ABI over `schroder`.
//!
//! Trees cross the boundary as opaque `SchTree` handles and strings as
//! NUL-terminated UTF-8 owned by the library. Every fallible call returns
//! a [`SchStatus`]; on failure the message is available from
//! [`sch_last_error`] on the same thread until the next failing call.
//! Panics are caught at the boundary and reported as `SCH_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schroder::analytics;
use schroder::counting;
use schroder::rng::stream;
use schroder::sampling::{self, Sampler};
use schroder::{BracketingKind, Error, Family, Tree};

/// Opaque tree handle.
pub struct SchTree(Tree);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidTree = 4,
    KindViolation = 5,
    InvalidArgument = 6,
    Undefined = 7,
    RetryBudget = 8,
    Solver = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchKind {
    WordBinary = 0,
    WordGeneral = 1,
    SetBinary = 2,
    SetGeneral = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchFamily {
    P1 = 1,
    P2 = 2,
    P3 = 3,
    P4 = 4,
}

/// Characteristic constants rounded to `double`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SchConstants {
    pub r: f64,
    pub s: f64,
    pub gamma: f64,
    pub sigma2: f64,
    pub lambda: f64,
    pub height_const: f64,
    pub scaling_const: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SchStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Syntax { .. } | Error::Json(_) => SchStatus::Syntax,
            Error::InvalidTree(_) | Error::Labels(_) | Error::AlreadyLabeled => SchStatus::InvalidTree,
            Error::KindViolation { .. } => SchStatus::KindViolation,
            Error::UndefinedMeasure { .. } => SchStatus::Undefined,
            Error::RetryBudget { .. } => SchStatus::RetryBudget,
            Error::Solver(_) => SchStatus::Solver,
            _ => SchStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SchStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SchStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SchStatus::Internal
        }
    }
}

fn null() -> Failure {
    Failure(SchStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(SchStatus::InvalidUtf8, "input is not UTF-8".into()))
}

unsafe fn tree_ref<'a>(t: *const SchTree) -> Result<&'a Tree, Failure> {
    t.as_ref().map(|t| &t.0).ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(SchStatus::Internal, "interior NUL".into()))?;
    put(out, c.into_raw())
}

unsafe fn put_tree(out: *mut *mut SchTree, t: Tree) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(SchTree(t))))
}

fn kind(k: SchKind) -> BracketingKind {
    match k {
        SchKind::WordBinary => BracketingKind::WordBinary,
        SchKind::WordGeneral => BracketingKind::WordGeneral,
        SchKind::SetBinary => BracketingKind::SetBinary,
        SchKind::SetGeneral => BracketingKind::SetGeneral,
    }
}

fn family(f: SchFamily) -> Family {
    match f {
        SchFamily::P1 => Family::P1,
        SchFamily::P2 => Family::P2,
        SchFamily::P3 => Family::P3,
        SchFamily::P4 => Family::P4,
    }
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn sch_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `input` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sch_tree_parse(k: SchKind, input: *const c_char, out: *mut *mut SchTree) -> SchStatus {
    guard(|| {
        let t = kind(k).parse(read_str(input)?)?;
        put_tree(out, t)
    })
}

/// # Safety
/// `tree` must come from this library; `out` must be writable. Free the
/// result with [`sch_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sch_tree_serialize(k: SchKind, tree: *const SchTree, out: *mut *mut c_char) -> SchStatus {
    guard(|| {
        let s = kind(k).serialize(tree_ref(tree)?)?;
        put_string(out, s)
    })
}

/// # Safety
/// As [`sch_tree_parse`].
#[no_mangle]
pub unsafe extern "C" fn sch_tree_from_json(input: *const c_char, out: *mut *mut SchTree) -> SchStatus {
    guard(|| {
        let t = Tree::from_json(read_str(input)?)?;
        put_tree(out, t)
    })
}

/// # Safety
/// As [`sch_tree_serialize`].
#[no_mangle]
pub unsafe extern "C" fn sch_tree_to_json(tree: *const SchTree, out: *mut *mut c_char) -> SchStatus {
    guard(|| put_string(out, tree_ref(tree)?.to_json()))
}

/// Leaf count, vertex count and height of `tree`.
///
/// # Safety
/// `tree` must come from this library; each output pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn sch_tree_stats(
    tree: *const SchTree,
    leaves: *mut usize,
    vertices: *mut usize,
    height: *mut usize,
) -> SchStatus {
    guard(|| {
        let st = tree_ref(tree)?.stats();
        put(leaves, st.leaves)?;
        put(vertices, st.vertices)?;
        put(height, st.height)
    })
}

/// Number of trees of `f` with `n` leaves, as a decimal string.
///
/// # Safety
/// `out` must be writable; free the result with [`sch_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sch_family_count(f: SchFamily, n: usize, out: *mut *mut c_char) -> SchStatus {
    guard(|| {
        let c = counting::family_count(&family(f), n)?;
        put_string(out, c.to_string())
    })
}

/// A uniform tree of `f` with `n` leaves by the recursive method, using
/// random stream `(seed, stream_id)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sch_sample(
    f: SchFamily,
    n: usize,
    seed: u64,
    stream_id: u64,
    out: *mut *mut SchTree,
) -> SchStatus {
    guard(|| {
        let t = Sampler::for_family(&family(f), n)?.sample(&mut stream(seed, stream_id));
        put_tree(out, t)
    })
}

/// As [`sch_sample`] but by conditioned Galton–Watson rejection.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sch_sample_gw(
    f: SchFamily,
    n: usize,
    seed: u64,
    stream_id: u64,
    max_attempts: u64,
    out: *mut *mut SchTree,
) -> SchStatus {
    guard(|| {
        let t = sampling::sample_family_gw(&family(f), n, &mut stream(seed, stream_id), max_attempts)?;
        put_tree(out, t)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sch_constants(f: SchFamily, out: *mut SchConstants) -> SchStatus {
    guard(|| {
        let c = analytics::family_constants(&family(f))?.to_f64();
        put(
            out,
            SchConstants {
                r: c.r,
                s: c.s,
                gamma: c.gamma,
                sigma2: c.sigma2,
                lambda: c.lambda,
                height_const: c.height_const,
                scaling_const: c.scaling_const,
            },
        )
    })
}

/// # Safety
/// `tree` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sch_tree_free(tree: *mut SchTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_serialize_round_trip() {
        unsafe {
            let mut t = ptr::null_mut();
            let src = CString::new("x(xx)").unwrap();
            assert_eq!(sch_tree_parse(SchKind::WordBinary, src.as_ptr(), &mut t), SchStatus::Ok);
            let mut s = ptr::null_mut();
            assert_eq!(sch_tree_serialize(SchKind::WordBinary, t, &mut s), SchStatus::Ok);
            assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "x(xx)");
            sch_string_free(s);
            sch_tree_free(t);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut t = ptr::null_mut();
            let src = CString::new("x(x").unwrap();
            assert_eq!(sch_tree_parse(SchKind::WordBinary, src.as_ptr(), &mut t), SchStatus::Syntax);
            assert!(t.is_null());
            let msg = CStr::from_ptr(sch_last_error()).to_str().unwrap();
            assert!(msg.contains("syntax"), "{msg}");
            assert_eq!(sch_tree_parse(SchKind::WordBinary, ptr::null(), &mut t), SchStatus::NullPointer);
        }
    }
}
