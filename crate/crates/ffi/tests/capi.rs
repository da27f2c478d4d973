use std::ffi::{c_char, CString};
use std::ptr;

use blendfv::data::alpha_target;
use blendfv::flux::{ec_flux2, llf_flux};
use blendfv::{ConservedState, FluxValue, GasModel, Primitive};
use blendfv_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { blendfv_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn new_solver(scheme: &str, case: &str, cells: usize) -> (BlendfvStatus, *mut BlendfvSolver) {
    let (s, c) = (CString::new(scheme).unwrap(), CString::new(case).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe { blendfv_solver_new(s.as_ptr(), c.as_ptr(), cells, 0.0, ptr::null(), &mut out) };
    (st, out)
}

#[test]
fn solver_lifecycle() {
    let (st, h) = new_solver("palft", "smooth-transport", 64);
    assert_eq!(st, BlendfvStatus::Ok);
    assert!(!h.is_null());
    unsafe {
        let mut n = 0;
        assert_eq!(blendfv_solver_cells(h, &mut n), BlendfvStatus::Ok);
        assert_eq!(n, 64);
        let mut mass0 = vec![0.0; n];
        assert_eq!(blendfv_solver_copy_primitive(h, ptr::null_mut(), mass0.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), n), BlendfvStatus::Ok);

        assert_eq!(blendfv_solver_advance(h, 0.25, 100_000), BlendfvStatus::Ok);
        let (mut t, mut steps) = (0.0, 0);
        assert_eq!(blendfv_solver_time(h, &mut t, &mut steps), BlendfvStatus::Ok);
        assert_eq!(t, 0.25);
        assert!(steps > 0);

        let (mut x, mut rho, mut v, mut p) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            blendfv_solver_copy_primitive(h, x.as_mut_ptr(), rho.as_mut_ptr(), v.as_mut_ptr(), p.as_mut_ptr(), n),
            BlendfvStatus::Ok
        );
        // Pure transport: velocity and pressure stay constant, mass is kept.
        assert!(v.iter().all(|w| (w - v[0]).abs() < 1e-6));
        assert!(p.iter().all(|q| (q - p[0]).abs() < 1e-6 * p[0]));
        let drift: f64 = rho.iter().sum::<f64>() - mass0.iter().sum::<f64>();
        assert!(drift.abs() < 1e-11);
        assert!(x.windows(2).all(|w| w[1] > w[0]));

        let mut alpha = vec![-1.0; n + 1];
        assert_eq!(blendfv_solver_copy_alpha(h, alpha.as_mut_ptr(), n + 1), BlendfvStatus::Ok);
        assert!(alpha.iter().all(|a| (0.0..=1.0).contains(a)));

        // Continuing works and going backwards does not.
        assert_eq!(blendfv_solver_advance(h, 0.3, 100_000), BlendfvStatus::Ok);
        assert_eq!(blendfv_solver_advance(h, 0.1, 100_000), BlendfvStatus::InvalidArgument);
        blendfv_solver_free(h);
    }
}

#[test]
fn failures_map_to_status_codes() {
    let (st, h) = new_solver("nope", "shu-osher", 100);
    assert_eq!(st, BlendfvStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("nope"));

    let (st, _) = new_solver("llf", "shu-osher", 0);
    assert_eq!(st, BlendfvStatus::InvalidArgument);

    unsafe {
        let mut out = ptr::null_mut();
        let st = blendfv_solver_new(ptr::null(), ptr::null(), 10, 0.0, ptr::null(), &mut out);
        assert_eq!(st, BlendfvStatus::NullPointer);
        assert_eq!(blendfv_solver_advance(ptr::null_mut(), 1.0, 10), BlendfvStatus::NullPointer);

        let missing = CString::new("/nonexistent/weights.json").unwrap();
        let (s, c) = (CString::new("ddlft").unwrap(), CString::new("shu-osher").unwrap());
        let st = blendfv_solver_new(s.as_ptr(), c.as_ptr(), 100, 0.0, missing.as_ptr(), &mut out);
        assert_eq!(st, BlendfvStatus::Io);

        let (_, h) = new_solver("llf", "shu-osher", 400);
        assert_eq!(blendfv_solver_advance(h, 1.8, 3), BlendfvStatus::StepBudget);
        let mut t = -1.0;
        blendfv_solver_time(h, &mut t, ptr::null_mut());
        assert_eq!(t, 0.0);
        let mut small = [0.0; 3];
        assert_eq!(
            blendfv_solver_copy_primitive(h, small.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), 3),
            BlendfvStatus::InvalidArgument
        );
        blendfv_solver_free(h);
        blendfv_solver_free(ptr::null_mut());
    }
}

#[test]
fn flux_entry_points_match_the_library() {
    let gas = GasModel::default();
    let ul = gas.to_conserved(&Primitive::new(1.0, 0.3, 1.0));
    let ur = gas.to_conserved(&Primitive::new(0.125, -0.1, 0.1));
    let stencil: Vec<f64> = [ul, ur].iter().flat_map(|u| u.to_array()).collect();
    let mut out = [0.0; 3];
    for (kind, expect) in [(BlendfvFlux::Llf, llf_flux(&gas, &ul, &ur).unwrap()), (BlendfvFlux::Ec2, ec_flux2(&gas, &ul, &ur).unwrap())] {
        assert_eq!(unsafe { blendfv_flux(kind, stencil.as_ptr(), 2, out.as_mut_ptr()) }, BlendfvStatus::Ok);
        assert_eq!(out, expect.to_array());
    }
    // ec4 on a constant window reduces to the physical flux.
    let window: Vec<f64> = (0..4).flat_map(|_| ul.to_array()).collect();
    assert_eq!(unsafe { blendfv_flux(BlendfvFlux::Ec4, window.as_ptr(), 4, out.as_mut_ptr()) }, BlendfvStatus::Ok);
    let f = gas.physical_flux(&ul).unwrap();
    assert!((FluxValue::from_array(out) - f).max_abs() < 1e-13);

    assert_eq!(unsafe { blendfv_flux(BlendfvFlux::Ec4, window.as_ptr(), 2, out.as_mut_ptr()) }, BlendfvStatus::InvalidArgument);
    let bad = ConservedState::new(-1.0, 0.0, 1.0).to_array();
    let pair: Vec<f64> = bad.iter().chain(ul.to_array().iter()).copied().collect();
    assert_eq!(unsafe { blendfv_flux(BlendfvFlux::Llf, pair.as_ptr(), 2, out.as_mut_ptr()) }, BlendfvStatus::Inadmissible);
}

#[test]
fn alpha_target_matches_projection() {
    let g = [1.0, 0.0, 0.0];
    let h = [0.0, 1.0, 0.0];
    let mut a = -1.0;
    // f halfway along h - g: α = 1/2.
    let f = [0.5, 0.5, 0.0];
    assert_eq!(unsafe { blendfv_alpha_target(f.as_ptr(), g.as_ptr(), h.as_ptr(), &mut a) }, BlendfvStatus::Ok);
    assert!((a - 0.5).abs() < 1e-15);
    let f = [0.3, 2.0, -1.0];
    unsafe { blendfv_alpha_target(f.as_ptr(), g.as_ptr(), h.as_ptr(), &mut a) };
    let expect = alpha_target(FluxValue::from_array(f), FluxValue::from_array(g), FluxValue::from_array(h));
    assert_eq!(a, expect);
    assert_eq!(unsafe { blendfv_alpha_target(ptr::null(), g.as_ptr(), h.as_ptr(), &mut a) }, BlendfvStatus::NullPointer);
}

#[test]
fn header_declares_every_entry_point_and_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/blendfv.h")).unwrap();
    for name in [
        "blendfv_last_error",
        "blendfv_solver_new",
        "blendfv_solver_free",
        "blendfv_solver_advance",
        "blendfv_solver_cells",
        "blendfv_solver_time",
        "blendfv_solver_copy_primitive",
        "blendfv_solver_copy_alpha",
        "blendfv_flux",
        "blendfv_alpha_target",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", &format!("{dir}/include/blendfv.h")])
        .status()
    else {
        eprintln!("no C compiler, skipping the syntax check");
        return;
    };
    assert!(status.success());
}
