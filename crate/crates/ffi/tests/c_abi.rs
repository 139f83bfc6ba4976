use std::ffi::CStr;
use std::ptr;

use nested_vt_ffi::*;

fn bits(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

fn codec(d: usize, m: usize, ell: usize) -> *mut NvtCodec {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { nvt_codec_new(d, m, ell, NvtScheme::AllZero, 0, &mut c) }, NvtStatus::Ok);
    c
}

fn last_error() -> String {
    let p = nvt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn encode_strip_verify() {
    let c = codec(7, 2, 2);
    unsafe {
        assert_eq!(nvt_codec_data_len(c), 14);
        assert_eq!(nvt_codec_codeword_len(c), 32);
        let d = bits("10110011010100");
        let mut x = vec![9u8; 32];
        assert_eq!(nvt_encode(c, d.as_ptr(), d.len(), x.as_mut_ptr(), x.len()), NvtStatus::Ok);
        assert_eq!(x, bits("10110010001010101001100010010000"));

        let mut valid = false;
        assert_eq!(nvt_verify(c, x.as_ptr(), x.len(), &mut valid), NvtStatus::Ok);
        assert!(valid);
        x[3] ^= 1;
        assert_eq!(nvt_verify(c, x.as_ptr(), x.len(), &mut valid), NvtStatus::Ok);
        assert!(!valid);
        x[3] ^= 1;

        let mut back = vec![0u8; 14];
        assert_eq!(nvt_strip(c, x.as_ptr(), x.len(), back.as_mut_ptr(), back.len()), NvtStatus::Ok);
        assert_eq!(back, d);
        nvt_codec_free(c);
    }
}

#[test]
fn decode_worked_sets() {
    let c = codec(7, 2, 2);
    unsafe {
        let set = nvt_fragments_new();
        for f in ["1010", "1", "00010010000", "101100100010", "1", "100"] {
            let b = bits(f);
            assert_eq!(nvt_fragments_push(set, b.as_ptr(), b.len()), NvtStatus::Ok);
        }
        assert_eq!(nvt_fragments_count(set), 6);
        let mut data = vec![0u8; 14];
        let mut outcome = NvtOutcome::Timeout;
        let mut iterations = 0u64;
        let status = nvt_decode(c, set, 1, 1_000_000, true, data.as_mut_ptr(), data.len(), &mut outcome, &mut iterations);
        assert_eq!(status, NvtStatus::Ok);
        assert_eq!(outcome, NvtOutcome::Ambiguous);
        assert_eq!(data, vec![1, 0, 1, 1, 0, 0, 1, 1, 0, 2, 2, 1, 0, 2]);
        assert!(iterations > 0);

        let status = nvt_decode(c, set, 1, 2, true, data.as_mut_ptr(), data.len(), &mut outcome, ptr::null_mut());
        assert_eq!(status, NvtStatus::Ok);
        assert_eq!(outcome, NvtOutcome::Timeout);
        nvt_fragments_free(set);
        nvt_codec_free(c);
    }
}

#[test]
fn channel_roundtrip() {
    let c = codec(36, 2, 2);
    unsafe {
        let n = nvt_codec_codeword_len(c);
        let d: Vec<u8> = (0..nvt_codec_data_len(c)).map(|i| (i % 3 == 0) as u8).collect();
        let mut x = vec![0u8; n];
        assert_eq!(nvt_encode(c, d.as_ptr(), d.len(), x.as_mut_ptr(), n), NvtStatus::Ok);
        let mut set = ptr::null_mut();
        assert_eq!(nvt_chop_shuffle(x.as_ptr(), n, 0.03, 5, &mut set), NvtStatus::Ok);
        let count = nvt_fragments_count(set);
        let total: usize = (0..count).map(|i| nvt_fragments_len(set, i)).sum();
        assert_eq!(total, n);
        let mut first = vec![0u8; nvt_fragments_len(set, 0)];
        assert_eq!(nvt_fragments_copy(set, 0, first.as_mut_ptr(), first.len()), NvtStatus::Ok);
        assert_eq!(nvt_fragments_copy(set, count, first.as_mut_ptr(), first.len()), NvtStatus::InvalidArgument);

        let mut out = vec![0u8; d.len()];
        let mut outcome = NvtOutcome::Timeout;
        let status = nvt_decode(c, set, 1, 1_000_000, true, out.as_mut_ptr(), out.len(), &mut outcome, ptr::null_mut());
        assert_eq!(status, NvtStatus::Ok);
        if outcome == NvtOutcome::Unique {
            assert_eq!(out, d);
        }
        nvt_fragments_free(set);
        nvt_codec_free(c);
    }
}

#[test]
fn scalar_helpers() {
    unsafe {
        let mut p = 0usize;
        assert_eq!(nvt_parity_length(7, &mut p), NvtStatus::Ok);
        assert_eq!(p, 5);
        assert_eq!(nvt_parity_length(0, &mut p), NvtStatus::InvalidArgument);
        let x = bits("101100100010");
        let mut s = 1u64;
        assert_eq!(nvt_syndrome(x.as_ptr(), x.len(), &mut s), NvtStatus::Ok);
        assert_eq!(s, 0);

        let c = codec(36, 2, 1);
        let b = nvt_codec_rate_bounds(c);
        assert!(b.guaranteed && b.lower < b.rate && b.rate < b.upper);
        assert_eq!(b.rate, 0.8);
        nvt_codec_free(c);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(nvt_codec_new(0, 2, 2, NvtScheme::AllZero, 0, &mut c), NvtStatus::InvalidArgument);
        assert!(c.is_null());
        assert!(last_error().contains("invalid argument"));
        assert_eq!(nvt_codec_new(7, 2, 2, NvtScheme::Distinct, 0, ptr::null_mut()), NvtStatus::NullPointer);

        let c = codec(7, 2, 2);
        let d = bits("1011");
        let mut x = vec![0u8; 32];
        assert_eq!(nvt_encode(c, d.as_ptr(), d.len(), x.as_mut_ptr(), 32), NvtStatus::LengthMismatch);
        let d = bits("10110011010100");
        assert_eq!(nvt_encode(c, d.as_ptr(), d.len(), x.as_mut_ptr(), 31), NvtStatus::BufferTooSmall);
        assert!(last_error().contains("32 needed"));
        let bad = [0u8, 3];
        let mut s = 0u64;
        assert_eq!(nvt_syndrome(bad.as_ptr(), 2, &mut s), NvtStatus::Parse);
        assert_eq!(nvt_encode(ptr::null(), d.as_ptr(), d.len(), x.as_mut_ptr(), 32), NvtStatus::NullPointer);

        let set = nvt_fragments_new();
        assert_eq!(nvt_fragments_push(set, d.as_ptr(), 0), NvtStatus::InvalidArgument);
        let mut out = [0u8; 14];
        let mut outcome = NvtOutcome::Unique;
        // fragments do not add up to the codeword length
        assert_eq!(nvt_fragments_push(set, d.as_ptr(), d.len()), NvtStatus::Ok);
        assert_eq!(
            nvt_decode(c, set, 1, 10, true, out.as_mut_ptr(), 14, &mut outcome, ptr::null_mut()),
            NvtStatus::InvalidArgument
        );
        assert_eq!(nvt_codec_data_len(ptr::null()), 0);
        nvt_fragments_free(set);
        nvt_codec_free(c);
        nvt_codec_free(ptr::null_mut());
        nvt_fragments_free(ptr::null_mut());
    }
}
