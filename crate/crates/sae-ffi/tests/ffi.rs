//! Exercises the C surface the way a foreign binding would: raw pointers,
//! status codes, out-parameters.

use sae_ffi::*;

fn new_pe(width: u32, signed: bool, k: u32) -> *mut SaePe {
    let mut pe: *mut SaePe = std::ptr::null_mut();
    let status = unsafe { sae_pe_new(width, signed, k, 0, &mut pe) };
    assert_eq!(status, SaeStatus::Ok);
    assert!(!pe.is_null());
    pe
}

#[test]
fn mac_and_oracle_round_trip() {
    let pe = new_pe(8, true, 0);
    let mut got = 0i64;
    let mut exact = 0i64;
    unsafe {
        assert_eq!(sae_pe_eval(pe, -77, 91, 1000, &mut got), SaeStatus::Ok);
        assert_eq!(
            sae_pe_eval_exact(pe, -77, 91, 1000, &mut exact),
            SaeStatus::Ok
        );
        sae_pe_free(pe);
    }
    assert_eq!(got, -77 * 91 + 1000);
    assert_eq!(got, exact);
}

#[test]
fn invalid_config_reported() {
    let mut pe: *mut SaePe = std::ptr::null_mut();
    let status = unsafe { sae_pe_new(40, false, 0, 0, &mut pe) };
    assert_eq!(status, SaeStatus::InvalidConfig);
    assert!(pe.is_null());
}

#[test]
fn operand_range_reported() {
    let pe = new_pe(4, false, 0);
    let mut out = 0i64;
    let status = unsafe { sae_pe_eval(pe, 16, 1, 0, &mut out) };
    assert_eq!(status, SaeStatus::OutOfRange);
    unsafe { sae_pe_free(pe) };
}

#[test]
fn null_pointers_rejected() {
    let mut out = 0i64;
    unsafe {
        assert_eq!(
            sae_pe_eval(std::ptr::null(), 1, 1, 0, &mut out),
            SaeStatus::NullPointer
        );
        assert_eq!(
            sae_pe_new(8, false, 0, 0, std::ptr::null_mut()),
            SaeStatus::NullPointer
        );
        sae_pe_free(std::ptr::null_mut());
    }
}

#[test]
fn signed_pe_counts() {
    let pe = new_pe(8, true, 0);
    let (mut ppc, mut nppc) = (0u64, 0u64);
    unsafe {
        assert_eq!(sae_pe_counts(pe, &mut ppc, &mut nppc), SaeStatus::Ok);
        sae_pe_free(pe);
    }
    assert_eq!(nppc, 14);
    assert_eq!(ppc, 50);
}

#[test]
fn simulate_identity_three_by_three() {
    let pe = new_pe(8, true, 0);
    let id = [1i64, 0, 0, 0, 1, 0, 0, 0, 1];
    let mut out = [0i64; 9];
    let mut cycles = 0u64;
    let status = unsafe {
        sae_simulate(
            pe,
            id.as_ptr(),
            3,
            3,
            id.as_ptr(),
            3,
            out.as_mut_ptr(),
            &mut cycles,
        )
    };
    unsafe { sae_pe_free(pe) };
    assert_eq!(status, SaeStatus::Ok);
    assert_eq!(out, id);
    assert_eq!(cycles, 7);
}

#[test]
fn simulate_matches_oracle() {
    let pe = new_pe(8, true, 3);
    let a = [3i64, -5, 7, 9, -11, 13];
    let b = [2i64, 4, -6, 8, 10, -12];
    let mut approx = [0i64; 4];
    let mut exact = [0i64; 4];
    unsafe {
        assert_eq!(
            sae_simulate(
                pe,
                a.as_ptr(),
                2,
                3,
                b.as_ptr(),
                2,
                approx.as_mut_ptr(),
                std::ptr::null_mut()
            ),
            SaeStatus::Ok
        );
        assert_eq!(
            sae_matmul_oracle(a.as_ptr(), 2, 3, b.as_ptr(), 2, exact.as_mut_ptr()),
            SaeStatus::Ok
        );
        sae_pe_free(pe);
    }
    // k = 3 approximation stays within the per-element error bound.
    for (g, e) in approx.iter().zip(&exact) {
        assert!((g - e).abs() < 1 << 6, "{g} vs {e}");
    }
}

#[test]
fn truth_table_error_rows() {
    let mut rows = [SaeTruthRow {
        a: 0,
        b: 0,
        c_in: 0,
        s_in: 0,
        s: 0,
        c: 0,
        ed: 0,
    }; 16];
    let status = unsafe { sae_truth_table(SaeCellKind::ApproxPpc, rows.as_mut_ptr()) };
    assert_eq!(status, SaeStatus::Ok);
    let errors = rows.iter().filter(|r| r.ed != 0).count();
    assert_eq!(errors, 5);
    // Row (1,1,0,0) overshoots by one.
    let row12 = rows[12];
    assert_eq!((row12.a, row12.b, row12.c_in, row12.s_in), (1, 1, 0, 0));
    assert_eq!(row12.ed, 1);
}

#[test]
fn analyze_exact_is_error_free() {
    let pe = new_pe(8, false, 0);
    let mut report = SaeErrorReport {
        er: 1.0,
        med: 1.0,
        nmed: 1.0,
        mred: 1.0,
        max_ed: 1,
        samples: 0,
    };
    let status = unsafe { sae_analyze(pe, 0, 0, &mut report) };
    unsafe { sae_pe_free(pe) };
    assert_eq!(status, SaeStatus::Ok);
    assert_eq!(report.er, 0.0);
    assert_eq!(report.max_ed, 0);
    assert_eq!(report.samples, 65536);
}

#[test]
fn analyze_random_is_deterministic() {
    let pe = new_pe(8, true, 5);
    let mut r1 = SaeErrorReport {
        er: 0.0,
        med: 0.0,
        nmed: 0.0,
        mred: 0.0,
        max_ed: 0,
        samples: 0,
    };
    let mut r2 = r1;
    unsafe {
        assert_eq!(sae_analyze(pe, 5000, 42, &mut r1), SaeStatus::Ok);
        assert_eq!(sae_analyze(pe, 5000, 42, &mut r2), SaeStatus::Ok);
        sae_pe_free(pe);
    }
    assert_eq!(r1.med, r2.med);
    assert_eq!(r1.mred, r2.mred);
    assert!(r1.er > 0.0);
}

#[test]
fn version_is_a_c_string() {
    let ptr = sae_version();
    assert!(!ptr.is_null());
    let s = unsafe { std::ffi::CStr::from_ptr(ptr) };
    assert!(!s.to_str().unwrap().is_empty());
}
