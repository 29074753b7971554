//! C ABI for dataset generation and I/O, model inference and augmentation.
//!
//! Every fallible call returns a [`RadaugStatus`]; on failure the message is
//! available from [`radaug_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use radaug::augment::{Policy, PolicyKind};
use radaug::experiments::{predict, tta_predict, Classifier};
use radaug::modem::{generate_dataset, parse_class_list, parse_snr_grid, GenConfig};
use radaug::nn::{count_params, Model, INPUT_DIM};
use radaug::rng::substream;
use radaug::signal::{Dataset, SignalFrame};
use radaug::{rsig, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadaugStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidInput = 3,
    Degenerate = 4,
    Format = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque dataset handle.
pub struct RadaugDataset(Dataset);

/// Opaque model handle.
pub struct RadaugModel(Model);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: RadaugStatus, msg: impl Into<String>) -> RadaugStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> RadaugStatus {
    let status = match &e {
        Error::InvalidArgument(_) => RadaugStatus::InvalidArgument,
        Error::InvalidInput(_) => RadaugStatus::InvalidInput,
        Error::Degenerate(_) => RadaugStatus::Degenerate,
        Error::Format(_) => RadaugStatus::Format,
        Error::Io(_) => RadaugStatus::Io,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), RadaugStatus>) -> RadaugStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RadaugStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(RadaugStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RadaugStatus> {
    if p.is_null() {
        return Err(fail(RadaugStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RadaugStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, RadaugStatus> {
    p.as_ref()
        .ok_or_else(|| fail(RadaugStatus::NullPointer, format!("{what} is null")))
}

unsafe fn frame_arg(iq: *const f32, n_samples: usize) -> Result<SignalFrame, RadaugStatus> {
    if iq.is_null() {
        return Err(fail(RadaugStatus::NullPointer, "iq buffer is null"));
    }
    let values = std::slice::from_raw_parts(iq, 2 * n_samples);
    SignalFrame::from_interleaved(values).map_err(from_error)
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize) -> Result<&'a mut [T], RadaugStatus> {
    if p.is_null() {
        return Err(fail(RadaugStatus::NullPointer, "output buffer is null"));
    }
    if len < need {
        return Err(fail(
            RadaugStatus::BufferTooSmall,
            format!("output buffer holds {len} values, {need} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn radaug_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parameter count of the two-layer LSTM classifier.
#[no_mangle]
pub extern "C" fn radaug_count_params(hidden: usize, classes: usize) -> usize {
    count_params(hidden, classes, INPUT_DIM)
}

/// Generates a dataset with default channel impairments.
///
/// # Safety
/// `classes` and `snr_grid` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_generate(
    classes: *const c_char,
    snr_grid: *const c_char,
    per_class: usize,
    seq_len: usize,
    seed: u64,
    out: *mut *mut RadaugDataset,
) -> RadaugStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(RadaugStatus::NullPointer, "out is null"));
        }
        let cfg = GenConfig {
            classes: parse_class_list(str_arg(classes, "classes")?).map_err(from_error)?,
            snr_grid: parse_snr_grid(str_arg(snr_grid, "snr_grid")?).map_err(from_error)?,
            frames_per_class_per_snr: per_class,
            seq_len,
            seed,
            ..GenConfig::default()
        };
        let ds = generate_dataset(&cfg).map_err(from_error)?;
        *out = Box::into_raw(Box::new(RadaugDataset(ds)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_load(path: *const c_char, out: *mut *mut RadaugDataset) -> RadaugStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(RadaugStatus::NullPointer, "out is null"));
        }
        let ds = rsig::load(str_arg(path, "path")?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(RadaugDataset(ds)));
        Ok(())
    })
}

/// # Safety
/// `ds` must come from this library; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_save(ds: *const RadaugDataset, path: *const c_char) -> RadaugStatus {
    guard(|| {
        let ds = handle(ds, "dataset")?;
        rsig::save(&ds.0, str_arg(path, "path")?).map_err(from_error)
    })
}

/// Number of frames; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_len(ds: *const RadaugDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// Samples per frame; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_seq_len(ds: *const RadaugDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.seq_len())
}

/// Copies frame `index` as interleaved I/Q into `iq` (capacity `iq_len`
/// floats) and writes its label and SNR.
///
/// # Safety
/// `ds` must come from this library; `iq` must hold `iq_len` floats;
/// `label` and `snr_db` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_frame(
    ds: *const RadaugDataset,
    index: usize,
    iq: *mut f32,
    iq_len: usize,
    label: *mut u8,
    snr_db: *mut i8,
) -> RadaugStatus {
    guard(|| {
        let ds = handle(ds, "dataset")?;
        let f = ds.0.frames().get(index).ok_or_else(|| {
            fail(RadaugStatus::InvalidArgument, format!("frame {index} out of range"))
        })?;
        if label.is_null() || snr_db.is_null() {
            return Err(fail(RadaugStatus::NullPointer, "label or snr_db is null"));
        }
        let values = f.frame.to_interleaved();
        out_slice(iq, iq_len, values.len())?.copy_from_slice(&values);
        *label = f.label;
        *snr_db = f.snr_db;
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn radaug_dataset_free(ds: *mut RadaugDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radaug_model_load(path: *const c_char, out: *mut *mut RadaugModel) -> RadaugStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(RadaugStatus::NullPointer, "out is null"));
        }
        let m = Model::load(str_arg(path, "path")?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(RadaugModel(m)));
        Ok(())
    })
}

/// Number of output classes; 0 for a null handle.
///
/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn radaug_model_num_classes(model: *const RadaugModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.class_names().len())
}

unsafe fn write_prediction(
    result: (usize, Vec<f64>),
    probs: *mut f64,
    probs_len: usize,
    class_out: *mut usize,
) -> Result<(), RadaugStatus> {
    let (class, p) = result;
    out_slice(probs, probs_len, p.len())?.copy_from_slice(&p);
    if !class_out.is_null() {
        *class_out = class;
    }
    Ok(())
}

/// Classifies one raw frame of `n_samples` interleaved I/Q pairs.
///
/// # Safety
/// `model` must come from this library; `iq` must hold `2 * n_samples`
/// floats; `probs` must hold `probs_len` doubles; `class_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn radaug_model_predict(
    model: *const RadaugModel,
    iq: *const f32,
    n_samples: usize,
    probs: *mut f64,
    probs_len: usize,
    class_out: *mut usize,
) -> RadaugStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let frame = frame_arg(iq, n_samples)?;
        let r = predict(&m.0, &frame).map_err(from_error)?;
        write_prediction(r, probs, probs_len, class_out)
    })
}

/// Test-time augmented prediction with a named policy
/// (`none|rotation|flip|noise|joint`); `seed` drives noise draws.
///
/// # Safety
/// As [`radaug_model_predict`]; `policy` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn radaug_model_predict_tta(
    model: *const RadaugModel,
    iq: *const f32,
    n_samples: usize,
    policy: *const c_char,
    seed: u64,
    probs: *mut f64,
    probs_len: usize,
    class_out: *mut usize,
) -> RadaugStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let kind: PolicyKind = str_arg(policy, "policy")?.parse().map_err(from_error)?;
        let frame = frame_arg(iq, n_samples)?;
        let r = tta_predict(&m.0, &frame, &Policy::builtin(kind), &mut substream(seed, &[]))
            .map_err(from_error)?;
        write_prediction(r, probs, probs_len, class_out)
    })
}

/// # Safety
/// `model` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn radaug_model_free(model: *mut RadaugModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Scale factor N of a named policy, or 0 for an unknown name.
///
/// # Safety
/// `policy` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn radaug_policy_scale_factor(policy: *const c_char) -> usize {
    str_arg(policy, "policy")
        .ok()
        .and_then(|s| s.parse::<PolicyKind>().ok())
        .map_or(0, |k| Policy::builtin(k).scale_factor())
}

/// Writes every variant of one frame under a named policy, in policy order,
/// as `N * 2 * n_samples` interleaved floats.
///
/// # Safety
/// `iq` must hold `2 * n_samples` floats; `out` must hold `out_len` floats;
/// `policy` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn radaug_augment_frame(
    iq: *const f32,
    n_samples: usize,
    policy: *const c_char,
    seed: u64,
    out: *mut f32,
    out_len: usize,
) -> RadaugStatus {
    guard(|| {
        let kind: PolicyKind = str_arg(policy, "policy")?.parse().map_err(from_error)?;
        let p = Policy::builtin(kind);
        let frame = frame_arg(iq, n_samples)?;
        let dst = out_slice(out, out_len, p.scale_factor() * 2 * n_samples)?;
        for (chunk, v) in dst
            .chunks_mut(2 * n_samples)
            .zip(p.variants(&frame, &mut substream(seed, &[])))
        {
            chunk.copy_from_slice(&v.to_interleaved());
        }
        Ok(())
    })
}
