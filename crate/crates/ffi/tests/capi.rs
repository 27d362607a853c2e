use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use orthofec_ffi::*;

fn codebook(n: usize) -> *mut OfecCodebook {
    let mut cb = ptr::null_mut();
    assert_eq!(unsafe { ofec_codebook_new(n, &mut cb) }, OfecStatus::Ok);
    cb
}

#[test]
fn encode_and_decode_three_cases() {
    let cb = codebook(8);
    unsafe {
        assert_eq!(ofec_codeword_bytes(cb), 1);
        let mut word = 0u8;
        assert_eq!(ofec_encode(cb, 0b0110, &mut word, 1), OfecStatus::Ok);
        assert_eq!(word, 0b0011_1100);

        let mut res = OfecDecodeResult {
            kind: OfecOutcomeKind::Retransmit,
            data: 0,
            distance: 0,
            tied_candidates: 0,
        };
        assert_eq!(ofec_decode(cb, &word, 1, &mut res), OfecStatus::Ok);
        assert_eq!(
            (res.kind, res.data, res.distance),
            (OfecOutcomeKind::ExactMatch, 6, 0)
        );

        let impaired = 0b0011_0100u8;
        assert_eq!(ofec_decode(cb, &impaired, 1, &mut res), OfecStatus::Ok);
        assert_eq!(
            (res.kind, res.data, res.distance),
            (OfecOutcomeKind::Corrected, 6, 1)
        );

        let tie = 0b0011_0000u8;
        assert_eq!(ofec_decode(cb, &tie, 1, &mut res), OfecStatus::Ok);
        assert_eq!(res.kind, OfecOutcomeKind::Retransmit);
        assert_eq!(res.distance, 2);
        assert!(res.tied_candidates >= 2);
        ofec_codebook_free(cb);
    }
}

#[test]
fn distances_and_parity() {
    let cb = codebook(8);
    unsafe {
        let mut out = [0u32; 16];
        let word = 0xFFu8;
        assert_eq!(
            ofec_distances(cb, &word, 1, out.as_mut_ptr(), out.len()),
            OfecStatus::Ok
        );
        assert_eq!((out[8], out[0]), (0, 8));
        assert_eq!(
            ofec_distances(cb, &word, 1, out.as_mut_ptr(), 4),
            OfecStatus::BufferTooSmall
        );
        let mut p = 9u8;
        assert_eq!(ofec_parity(&0b0011_0100u8, 8, &mut p), OfecStatus::Ok);
        assert_eq!(p, 1);
        assert_eq!(ofec_parity(&0b0011_1100u8, 8, &mut p), OfecStatus::Ok);
        assert_eq!(p, 0);
        ofec_codebook_free(cb);
    }
}

#[test]
fn error_codes() {
    let cb = codebook(16);
    unsafe {
        let mut buf = [0u8; 2];
        assert_eq!(
            ofec_encode(cb, 32, buf.as_mut_ptr(), 2),
            OfecStatus::DataOutOfRange
        );
        assert_eq!(
            ofec_encode(cb, 3, buf.as_mut_ptr(), 1),
            OfecStatus::BufferTooSmall
        );
        assert_eq!(
            ofec_encode(ptr::null(), 3, buf.as_mut_ptr(), 2),
            OfecStatus::NullPointer
        );
        let mut res = std::mem::MaybeUninit::<OfecDecodeResult>::uninit();
        assert_eq!(
            ofec_decode(cb, buf.as_ptr(), 1, res.as_mut_ptr()),
            OfecStatus::LengthMismatch
        );
        let msg = std::ffi::CStr::from_ptr(ofec_last_error_message());
        assert!(msg.to_str().unwrap().contains("expected 2 bytes"));
        assert!(!ofec_status_str(OfecStatus::FrameError).is_null());
        ofec_codebook_free(cb);
        ofec_codebook_free(ptr::null_mut());
    }
}

#[test]
fn frame_round_trip_and_erasure() {
    let payload = b"biorthogonal";
    unsafe {
        let mut framed = std::mem::MaybeUninit::<OfecBuffer>::uninit();
        assert_eq!(
            ofec_frame_encode(8, payload.as_ptr(), payload.len(), framed.as_mut_ptr()),
            OfecStatus::Ok
        );
        let framed = framed.assume_init();
        let bytes = std::slice::from_raw_parts_mut(framed.ptr, framed.len);

        let mut out = std::mem::MaybeUninit::<OfecBuffer>::uninit();
        let mut stats = OfecFrameStats::default();
        assert_eq!(
            ofec_frame_decode(
                bytes.as_ptr(),
                bytes.len(),
                OfecPolicy::Conservative,
                out.as_mut_ptr(),
                &mut stats
            ),
            OfecStatus::Ok
        );
        let out = out.assume_init();
        assert_eq!(stats.payload_valid, 1);
        assert_eq!(stats.exact, 2 * payload.len() as u64);
        assert_eq!(std::slice::from_raw_parts(out.ptr, out.len), payload);
        ofec_buffer_free(out);

        // 'b' = 0110 0010; first symbol 0110 -> 00111100, hit with 00001100
        bytes[17] ^= 0b0000_1100;
        let mut out = std::mem::MaybeUninit::<OfecBuffer>::uninit();
        assert_eq!(
            ofec_frame_decode(
                bytes.as_ptr(),
                bytes.len(),
                OfecPolicy::Conservative,
                out.as_mut_ptr(),
                &mut stats
            ),
            OfecStatus::Ok
        );
        let out = out.assume_init();
        assert_eq!(
            (stats.retransmit, stats.erasures, stats.payload_valid),
            (1, 1, 0)
        );
        assert!(out.ptr.is_null());

        let mut out = std::mem::MaybeUninit::<OfecBuffer>::uninit();
        assert_eq!(
            ofec_frame_decode(
                bytes.as_ptr(),
                5,
                OfecPolicy::Conservative,
                out.as_mut_ptr(),
                &mut stats
            ),
            OfecStatus::FrameError
        );
        ofec_buffer_free(framed);
    }
}

fn target_dir() -> PathBuf {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"))
}

/// Compiles and runs a C program against the generated header and the
/// static library. Skipped when no C compiler is installed.
#[test]
fn c_program_links_against_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(
        header_dir.join("orthofec.h").exists(),
        "header not generated"
    );
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let lib = ["debug", "debug/deps", "release", "release/deps"]
        .iter()
        .map(|p| target_dir().join(p).join("liborthofec_ffi.a"))
        .filter(|p| p.exists())
        .max_by_key(|p| p.metadata().and_then(|m| m.modified()).ok());
    let Some(lib) = lib else {
        eprintln!("skipping: static library not found");
        return;
    };
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ofec_smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-I")
        .arg(&header_dir)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run cc");
    assert!(status.success(), "C smoke test failed to compile");
    let out = Command::new(&exe).output().expect("run smoke test");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
