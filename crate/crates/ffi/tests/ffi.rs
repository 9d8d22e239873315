use std::ffi::{CStr, CString};
use std::ptr;

use dcqd_ffi::*;

fn last_error() -> String {
    let p = dcqd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn channel(spec: &str, n: usize) -> *mut DcqdChannel {
    let spec = CString::new(spec).unwrap();
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { dcqd_channel_parse(spec.as_ptr(), n, &mut ch) }, DcqdStatus::Ok);
    ch
}

fn chi_entries(chi: *const DcqdChi) -> (Vec<f64>, Vec<f64>) {
    let size = unsafe { dcqd_chi_size(chi) };
    let mut re = vec![0.0; size * size];
    let mut im = vec![0.0; size * size];
    let status = unsafe { dcqd_chi_copy(chi, re.as_mut_ptr(), im.as_mut_ptr(), re.len()) };
    assert_eq!(status, DcqdStatus::Ok);
    (re, im)
}

#[test]
fn bit_flip_round_trip() {
    let ch = channel("bit_flip:0.25", 1);
    assert_eq!(unsafe { dcqd_channel_n_qubits(ch) }, 1);
    let mut chi = ptr::null_mut();
    assert_eq!(unsafe { dcqd_characterize(ch, ptr::null(), &mut chi) }, DcqdStatus::Ok);
    assert_eq!(unsafe { dcqd_chi_size(chi) }, 4);
    assert_eq!(unsafe { dcqd_chi_configurations(chi) }, 4);
    assert!(unsafe { dcqd_chi_residual(chi) } < 1e-12);
    let (re, im) = chi_entries(chi);
    assert!((re[0] - 0.75).abs() < 1e-12);
    assert!((re[5] - 0.25).abs() < 1e-12);
    assert!(im.iter().all(|x| x.abs() < 1e-12));
    unsafe {
        dcqd_chi_free(chi);
        dcqd_channel_free(ch);
    }
}

#[test]
fn dcqd_and_sqpt_agree() {
    let json = CString::new(r#"{"kind":"amplitude_damping","gamma":0.3}"#).unwrap();
    let mut ch = ptr::null_mut();
    let status = unsafe { dcqd_channel_from_json(json.as_ptr(), 1, &mut ch) };
    if status != DcqdStatus::Ok {
        panic!("{}", last_error());
    }
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { dcqd_characterize(ch, ptr::null(), &mut a) }, DcqdStatus::Ok);
    assert_eq!(unsafe { dcqd_sqpt(ch, &mut b) }, DcqdStatus::Ok);
    assert_eq!(unsafe { dcqd_chi_configurations(b) }, 16);
    assert!(unsafe { dcqd_chi_residual(b) }.is_nan());
    let (ra, ia) = chi_entries(a);
    let (rb, ib) = chi_entries(b);
    for k in 0..16 {
        assert!((ra[k] - rb[k]).abs() < 1e-10 && (ia[k] - ib[k]).abs() < 1e-10);
    }
    unsafe {
        dcqd_chi_free(a);
        dcqd_chi_free(b);
        dcqd_channel_free(ch);
    }
}

#[test]
fn kraus_input_and_sampling() {
    let s = 0.5f64.sqrt();
    let re = [s, s, s, -s];
    let im = [0.0; 4];
    let mut ch = ptr::null_mut();
    assert_eq!(
        unsafe { dcqd_channel_from_kraus(1, 1, re.as_ptr(), im.as_ptr(), &mut ch) },
        DcqdStatus::Ok
    );
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(dcqd_characterize_sampled(ch, ptr::null(), 100_000, 7, &mut a), DcqdStatus::Ok);
        assert_eq!(dcqd_characterize_sampled(ch, ptr::null(), 100_000, 7, &mut b), DcqdStatus::Ok);
    }
    let (ra, _) = chi_entries(a);
    assert_eq!(chi_entries(a), chi_entries(b));
    // Hadamard: χ = (X + Z)(X + Z)† / 2
    assert!((ra[5] - 0.5).abs() < 0.02 && (ra[15] - 0.5).abs() < 0.02 && (ra[7] - 0.5).abs() < 0.02);
    unsafe {
        dcqd_chi_free(a);
        dcqd_chi_free(b);
        dcqd_channel_free(ch);
    }
}

#[test]
fn outcome_probabilities_sum_to_one() {
    let ch = channel("depolarizing:0.2", 2);
    let settings = [DcqdSetting::Pop, DcqdSetting::CohY];
    let mut out = [0.0; 16];
    let status = unsafe { dcqd_outcome_probabilities(ch, settings.as_ptr(), 2, ptr::null(), out.as_mut_ptr(), 16) };
    assert_eq!(status, DcqdStatus::Ok);
    assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let status = unsafe { dcqd_outcome_probabilities(ch, settings.as_ptr(), 2, ptr::null(), out.as_mut_ptr(), 4) };
    assert_eq!(status, DcqdStatus::BufferTooSmall);
    unsafe { dcqd_channel_free(ch) };
}

#[test]
fn error_codes_and_messages() {
    let mut ch = ptr::null_mut();
    let bad = CString::new("bit_flip:1.5").unwrap();
    assert_eq!(unsafe { dcqd_channel_parse(bad.as_ptr(), 1, &mut ch) }, DcqdStatus::Parse);
    assert!(ch.is_null());
    assert!(!last_error().is_empty());

    let ch = channel("identity", 1);
    let real = DcqdAmplitudes {
        alpha_re: 0.8,
        alpha_im: 0.0,
        beta_re: 0.6,
        beta_im: 0.0,
    };
    let mut chi = ptr::null_mut();
    assert_eq!(unsafe { dcqd_characterize(ch, &real, &mut chi) }, DcqdStatus::IllPosed);
    assert!(last_error().contains("rank"));
    assert_eq!(unsafe { dcqd_characterize(ptr::null(), ptr::null(), &mut chi) }, DcqdStatus::NullPointer);
    assert_eq!(unsafe { dcqd_characterize(ch, ptr::null(), ptr::null_mut()) }, DcqdStatus::NullPointer);
    unsafe {
        dcqd_channel_free(ch);
        dcqd_channel_free(ptr::null_mut());
        dcqd_chi_free(ptr::null_mut());
    }
    assert_eq!(unsafe { dcqd_chi_size(ptr::null()) }, 0);
}

#[test]
fn relaxation_estimate() {
    let mut est = DcqdRelaxEstimate {
        t1_constant: 0.0,
        t2_constant: 0.0,
        t_prime_over_t2_prime: 0.0,
        p_minus: 0.0,
        xx_out: 0.0,
        configurations: 0,
    };
    assert_eq!(unsafe { dcqd_relax_estimate(2.0, 1.0, 1.0, 1.0, ptr::null(), 0, 0, &mut est) }, DcqdStatus::Ok);
    assert!((est.t1_constant - 2.0).abs() < 1e-9);
    assert!((est.t2_constant - 1.0).abs() < 1e-9);
    assert_eq!(est.configurations, 1);
    assert_eq!(
        unsafe { dcqd_relax_estimate(2.0, 1.0, -1.0, 1.0, ptr::null(), 0, 0, &mut est) },
        DcqdStatus::IllPosed
    );
}

#[test]
fn relaxation_channel_handle() {
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { dcqd_channel_relaxation(1.0, 2.0, 1.0, 1.0, &mut ch) }, DcqdStatus::Ok);
    assert_eq!(unsafe { dcqd_channel_n_qubits(ch) }, 1);
    unsafe { dcqd_channel_free(ch) };
}

#[test]
fn resource_rows() {
    let mut row = DcqdResourceRow {
        n: 0,
        dim_h: 0,
        n_in: 0,
        n_m: 0,
        n_exp: 0,
    };
    assert_eq!(unsafe { dcqd_resources(3, DcqdScheme::Sqpt, &mut row) }, DcqdStatus::Ok);
    assert_eq!((row.dim_h, row.n_in, row.n_m, row.n_exp), (8, 64, 64, 4096));
    assert_eq!(unsafe { dcqd_resources(3, DcqdScheme::Dcqd, &mut row) }, DcqdStatus::Ok);
    assert_eq!((row.dim_h, row.n_in, row.n_m, row.n_exp), (64, 64, 1, 64));
    assert_eq!(unsafe { dcqd_resources(2, DcqdScheme::Aapt, &mut row) }, DcqdStatus::Ok);
    assert_eq!(row.n_exp, 17);
    assert_eq!(unsafe { dcqd_resources(0, DcqdScheme::Dcqd, &mut row) }, DcqdStatus::IllPosed);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dcqd.h")).unwrap();
    for name in [
        "dcqd_last_error",
        "dcqd_channel_parse",
        "dcqd_channel_from_json",
        "dcqd_channel_from_kraus",
        "dcqd_channel_relaxation",
        "dcqd_channel_free",
        "dcqd_characterize",
        "dcqd_characterize_sampled",
        "dcqd_sqpt",
        "dcqd_chi_copy",
        "dcqd_chi_free",
        "dcqd_outcome_probabilities",
        "dcqd_relax_estimate",
        "dcqd_resources",
        "typedef struct DcqdChannel DcqdChannel",
        "DCQD_STATUS_ILL_POSED = 3",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
