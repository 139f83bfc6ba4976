//! C ABI over `nested-vt`.
//!
//! Bit strings cross the boundary as `uint8_t` arrays holding 0 or 1.
//! Decoded data uses 2 for an erased position. Every fallible call returns
//! an [`NvtStatus`]; the message of the most recent failure on the calling
//! thread is available from [`nvt_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use nested_vt::bits::{BitString, Symbol};
use nested_vt::channel::{chop_and_shuffle, ChannelParams, FragmentSet};
use nested_vt::codec::{encode_nested, strip_nested_bits, verify_all_conditions, ResidueScheme};
use nested_vt::layout::LayerSpec;
use nested_vt::reassembly::{decode_search, Collect, Recovery, SearchConfig};
use nested_vt::vt::{parity_length, syndrome};
use nested_vt::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NvtStatus {
    Ok = 0,
    InvalidArgument = 1,
    LengthMismatch = 2,
    UnrecoverableErasures = 3,
    InconsistentParity = 4,
    OracleCeiling = 5,
    Parse = 6,
    Io = 7,
    NullPointer = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NvtOutcome {
    Unique = 0,
    Ambiguous = 1,
    Timeout = 2,
    NoSolution = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NvtScheme {
    AllZero = 0,
    /// Uses the `r0` argument as the common residue.
    FixedNonZero = 1,
    Distinct = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NvtRateBounds {
    pub lower: f64,
    pub rate: f64,
    pub upper: f64,
    pub guaranteed: bool,
}

/// Opaque nested code parameters.
pub struct NvtCodec {
    spec: LayerSpec,
}

/// Opaque, labelled fragment collection.
pub struct NvtFragmentSet {
    pieces: Vec<BitString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: NvtStatus, msg: impl Into<String>) -> NvtStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> NvtStatus {
    let status = match e {
        Error::InvalidArgument(_) => NvtStatus::InvalidArgument,
        Error::LengthMismatch { .. } => NvtStatus::LengthMismatch,
        Error::UnrecoverableErasures { .. } => NvtStatus::UnrecoverableErasures,
        Error::InconsistentParity => NvtStatus::InconsistentParity,
        Error::OracleCeiling { .. } => NvtStatus::OracleCeiling,
        Error::Parse(_) => NvtStatus::Parse,
        Error::Io(_) => NvtStatus::Io,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), NvtStatus>) -> NvtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NvtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(NvtStatus::Panic, "internal panic"),
    }
}

unsafe fn bits_in(ptr: *const u8, len: usize) -> Result<BitString, NvtStatus> {
    if ptr.is_null() && len > 0 {
        return Err(fail(NvtStatus::NullPointer, "null bit buffer"));
    }
    let raw = if len == 0 { &[][..] } else { slice::from_raw_parts(ptr, len) };
    BitString::from_bits(raw.to_vec()).map_err(from_error)
}

unsafe fn out_buf<'a>(ptr: *mut u8, len: usize, needed: usize) -> Result<&'a mut [u8], NvtStatus> {
    if ptr.is_null() {
        return Err(fail(NvtStatus::NullPointer, "null output buffer"));
    }
    if len < needed {
        return Err(fail(
            NvtStatus::BufferTooSmall,
            format!("output buffer holds {len} entries, {needed} needed"),
        ));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn codec_ref<'a>(codec: *const NvtCodec) -> Result<&'a NvtCodec, NvtStatus> {
    codec.as_ref().ok_or_else(|| fail(NvtStatus::NullPointer, "null codec"))
}

unsafe fn set_ref<'a>(set: *const NvtFragmentSet) -> Result<&'a NvtFragmentSet, NvtStatus> {
    set.as_ref().ok_or_else(|| fail(NvtStatus::NullPointer, "null fragment set"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), NvtStatus> {
    if out.is_null() {
        return Err(fail(NvtStatus::NullPointer, "null output pointer"));
    }
    *out = value;
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nvt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn nvt_codec_new(
    d_sec: usize,
    m: usize,
    ell: usize,
    scheme: NvtScheme,
    r0: u64,
    out: *mut *mut NvtCodec,
) -> NvtStatus {
    guard(|| {
        let scheme = match scheme {
            NvtScheme::AllZero => ResidueScheme::AllZero,
            NvtScheme::FixedNonZero => ResidueScheme::FixedNonZero(r0),
            NvtScheme::Distinct => ResidueScheme::Distinct,
        };
        let spec = LayerSpec::with_scheme(d_sec, m, ell, scheme).map_err(from_error)?;
        write_out(out, Box::into_raw(Box::new(NvtCodec { spec })))
    })
}

/// # Safety
/// `codec` must come from `nvt_codec_new` and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nvt_codec_free(codec: *mut NvtCodec) {
    if !codec.is_null() {
        drop(Box::from_raw(codec));
    }
}

/// Data bits per codeword, or 0 for a NULL handle.
///
/// # Safety
/// `codec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nvt_codec_data_len(codec: *const NvtCodec) -> usize {
    codec.as_ref().map_or(0, |c| c.spec.data_len())
}

/// Codeword length, or 0 for a NULL handle.
///
/// # Safety
/// `codec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nvt_codec_codeword_len(codec: *const NvtCodec) -> usize {
    codec.as_ref().map_or(0, |c| c.spec.codeword_len())
}

/// # Safety
/// `codec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nvt_codec_rate_bounds(codec: *const NvtCodec) -> NvtRateBounds {
    match codec.as_ref() {
        Some(c) => {
            let b = c.spec.rate_bounds();
            NvtRateBounds {
                lower: b.lower,
                rate: b.rate,
                upper: b.upper,
                guaranteed: b.guaranteed,
            }
        }
        None => NvtRateBounds {
            lower: 0.0,
            rate: 0.0,
            upper: 0.0,
            guaranteed: false,
        },
    }
}

/// Encodes `data_len` data bits into `out`, which must hold the codeword length.
///
/// # Safety
/// Buffers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn nvt_encode(
    codec: *const NvtCodec,
    data: *const u8,
    data_len: usize,
    out: *mut u8,
    out_len: usize,
) -> NvtStatus {
    guard(|| {
        let codec = codec_ref(codec)?;
        let d = bits_in(data, data_len)?;
        let x = encode_nested(&d, &codec.spec).map_err(from_error)?;
        out_buf(out, out_len, x.len())?[..x.len()].copy_from_slice(x.as_slice());
        Ok(())
    })
}

/// Extracts the data bits of a full codeword into `out`.
///
/// # Safety
/// Buffers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn nvt_strip(
    codec: *const NvtCodec,
    codeword: *const u8,
    len: usize,
    out: *mut u8,
    out_len: usize,
) -> NvtStatus {
    guard(|| {
        let codec = codec_ref(codec)?;
        let x = bits_in(codeword, len)?;
        let d = strip_nested_bits(&x, &codec.spec).map_err(from_error)?;
        out_buf(out, out_len, d.len())?[..d.len()].copy_from_slice(d.as_slice());
        Ok(())
    })
}

/// Sets `*valid` to whether every VT condition of the code holds.
///
/// # Safety
/// Buffers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn nvt_verify(codec: *const NvtCodec, codeword: *const u8, len: usize, valid: *mut bool) -> NvtStatus {
    guard(|| {
        let codec = codec_ref(codec)?;
        let x = bits_in(codeword, len)?;
        if x.len() != codec.spec.codeword_len() {
            return Err(from_error(Error::LengthMismatch {
                expected: codec.spec.codeword_len(),
                actual: x.len(),
            }));
        }
        let ok = verify_all_conditions(&x, &codec.spec.position_matrix(), codec.spec.scheme, x.len());
        write_out(valid, ok)
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nvt_parity_length(n_d: usize, out: *mut usize) -> NvtStatus {
    guard(|| write_out(out, parity_length(n_d).map_err(from_error)?))
}

/// # Safety
/// `bits` must be valid for `len` bytes and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn nvt_syndrome(bits: *const u8, len: usize, out: *mut u64) -> NvtStatus {
    guard(|| {
        let x = bits_in(bits, len)?;
        write_out(out, syndrome(&x).map_err(from_error)?)
    })
}

/// Empty fragment set to fill with `nvt_fragments_push`.
#[no_mangle]
pub extern "C" fn nvt_fragments_new() -> *mut NvtFragmentSet {
    Box::into_raw(Box::new(NvtFragmentSet { pieces: Vec::new() }))
}

/// Appends a fragment; labels follow insertion order starting at 1.
///
/// # Safety
/// `set` must be a live handle and `bits` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nvt_fragments_push(set: *mut NvtFragmentSet, bits: *const u8, len: usize) -> NvtStatus {
    guard(|| {
        let set = set.as_mut().ok_or_else(|| fail(NvtStatus::NullPointer, "null fragment set"))?;
        let piece = bits_in(bits, len)?;
        if piece.is_empty() {
            return Err(fail(NvtStatus::InvalidArgument, "fragments must hold at least one bit"));
        }
        set.pieces.push(piece);
        Ok(())
    })
}

/// Runs the channel on a codeword and returns the shuffled fragments.
///
/// # Safety
/// `codeword` must be valid for `len` bytes and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn nvt_chop_shuffle(
    codeword: *const u8,
    len: usize,
    p_break: f64,
    seed: u64,
    out: *mut *mut NvtFragmentSet,
) -> NvtStatus {
    guard(|| {
        let x = bits_in(codeword, len)?;
        let params = ChannelParams::new(p_break, seed).map_err(from_error)?;
        let set = chop_and_shuffle(&x, &params).map_err(from_error)?;
        let pieces = set.iter().map(|f| f.bits.clone()).collect();
        write_out(out, Box::into_raw(Box::new(NvtFragmentSet { pieces })))
    })
}

/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nvt_fragments_count(set: *const NvtFragmentSet) -> usize {
    set.as_ref().map_or(0, |s| s.pieces.len())
}

/// Length of fragment `index` (0-based), or 0 if out of range.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nvt_fragments_len(set: *const NvtFragmentSet, index: usize) -> usize {
    set.as_ref().and_then(|s| s.pieces.get(index)).map_or(0, BitString::len)
}

/// Copies fragment `index` (0-based) into `out`.
///
/// # Safety
/// `set` must be a live handle and `out` valid for `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nvt_fragments_copy(
    set: *const NvtFragmentSet,
    index: usize,
    out: *mut u8,
    out_len: usize,
) -> NvtStatus {
    guard(|| {
        let set = set_ref(set)?;
        let piece = set
            .pieces
            .get(index)
            .ok_or_else(|| fail(NvtStatus::InvalidArgument, format!("no fragment {index}")))?;
        out_buf(out, out_len, piece.len())?[..piece.len()].copy_from_slice(piece.as_slice());
        Ok(())
    })
}

/// # Safety
/// `set` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nvt_fragments_free(set: *mut NvtFragmentSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Reassembles `set`. On `Unique` or `Ambiguous`, `out_data` receives the
/// data word (0, 1, or 2 for an erased position); `out_len` must be at least
/// the data length. `collect_all` selects between stopping at the first
/// full-length word and collecting all of them.
///
/// # Safety
/// Handles must be live; `out_data` valid for `out_len` bytes; `outcome`
/// and `iterations` valid for one write each (`iterations` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn nvt_decode(
    codec: *const NvtCodec,
    set: *const NvtFragmentSet,
    tau: usize,
    delta: u64,
    collect_all: bool,
    out_data: *mut u8,
    out_len: usize,
    outcome: *mut NvtOutcome,
    iterations: *mut u64,
) -> NvtStatus {
    guard(|| {
        let codec = codec_ref(codec)?;
        let set = set_ref(set)?;
        let collect = if collect_all { Collect::All } else { Collect::First };
        let config = SearchConfig::new(tau, delta, collect).map_err(from_error)?;
        let fragments = FragmentSet::from_pieces(set.pieces.clone()).map_err(from_error)?;
        let buf = out_buf(out_data, out_len, codec.spec.data_len())?;
        let result = decode_search(&fragments, &codec.spec, &config).map_err(from_error)?;
        let kind = match &result.recovery {
            Recovery::Unique(d) => {
                buf[..d.len()].copy_from_slice(d.as_slice());
                NvtOutcome::Unique
            }
            Recovery::Ambiguous(d) => {
                for (slot, s) in buf.iter_mut().zip(d.symbols()) {
                    *slot = match s {
                        Symbol::Zero => 0,
                        Symbol::One => 1,
                        Symbol::Erased => 2,
                    };
                }
                NvtOutcome::Ambiguous
            }
            Recovery::Timeout => NvtOutcome::Timeout,
            Recovery::NoSolution => NvtOutcome::NoSolution,
        };
        if !iterations.is_null() {
            *iterations = result.stats.iterations;
        }
        write_out(outcome, kind)
    })
}
