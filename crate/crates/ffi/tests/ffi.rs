use std::ffi::{CStr, CString};
use std::ptr;

use kpzlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kpz_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn closed_forms() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(kpz_heat_kernel(1.0, 0.0, &mut v), KpzStatus::Ok);
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(kpz_linear_increment_variance(1.0, 0.01, &mut v), KpzStatus::Ok);
        assert!((v - 0.079_785).abs() < 1e-5);
        assert_eq!(kpz_heat_kernel(0.0, 0.0, &mut v), KpzStatus::InvalidArgument);
        assert!(last_error().contains("t > 0"));
        assert_eq!(kpz_heat_kernel(1.0, 0.0, ptr::null_mut()), KpzStatus::NullPointer);
    }
}

#[test]
fn grid_guard_and_errors() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(kpz_grid_new(-1.0, 1.0, 64, 0.0, 1.0, 64, false, &mut g), KpzStatus::BoundaryGuard);
        assert!(g.is_null());
        assert!(last_error().contains("override"));
        assert_eq!(kpz_grid_new(-1.0, 1.0, 64, 0.0, 1.0, 64, true, &mut g), KpzStatus::Ok);
        assert_eq!(last_error(), "");
        kpz_grid_free(g);
        kpz_grid_free(ptr::null_mut());
    }
}

#[test]
fn solve_and_read_paths() {
    unsafe {
        let mut grid = ptr::null_mut();
        assert_eq!(kpz_grid_new(-6.0, 6.0, 96, 1.0 / 64.0, 1.0 + 1.0 / 64.0, 256, false, &mut grid), KpzStatus::Ok);
        let mut ic = ptr::null_mut();
        assert_eq!(kpz_initial_narrow_wedge(1.0 / 64.0, &mut ic), KpzStatus::Ok);
        let mut traj = ptr::null_mut();
        assert_eq!(kpz_solve(grid, ic, KpzMode::Multiplicative, 9, 2, 4, &mut traj), KpzStatus::Ok);
        let mut z = ptr::null_mut();
        let mut h = ptr::null_mut();
        assert_eq!(kpz_trajectory_origin_path(traj, &mut z), KpzStatus::Ok);
        assert_eq!(kpz_trajectory_height_path(traj, &mut h), KpzStatus::Ok);
        let n = kpz_path_len(z);
        assert_eq!(n, 65);
        assert_eq!(kpz_path_dt(z), 1.0 / 64.0);
        assert_eq!(kpz_path_t0(z), 1.0 / 64.0);
        let mut zv = vec![0.0; n];
        let mut hv = vec![0.0; n];
        assert_eq!(kpz_path_values(z, zv.as_mut_ptr(), n - 1), KpzStatus::BufferTooSmall);
        assert_eq!(kpz_path_values(z, zv.as_mut_ptr(), n), KpzStatus::Ok);
        assert_eq!(kpz_path_values(h, hv.as_mut_ptr(), n), KpzStatus::Ok);
        for (a, b) in zv.iter().zip(&hv) {
            assert!((a.ln() - b).abs() < 1e-12);
        }

        // same stream, same numbers
        let mut again = ptr::null_mut();
        let mut z2 = ptr::null_mut();
        assert_eq!(kpz_solve(grid, ic, KpzMode::Multiplicative, 9, 2, 4, &mut again), KpzStatus::Ok);
        assert_eq!(kpz_trajectory_origin_path(again, &mut z2), KpzStatus::Ok);
        let mut zv2 = vec![0.0; n];
        kpz_path_values(z2, zv2.as_mut_ptr(), n);
        assert_eq!(zv, zv2);

        // additive mode rejects a nonzero datum
        let mut bad = ptr::null_mut();
        assert_eq!(kpz_solve(grid, ic, KpzMode::Additive, 9, 2, 4, &mut bad), KpzStatus::Incompatible);
        assert!(bad.is_null());
        assert_eq!(kpz_solve(ptr::null(), ic, KpzMode::Additive, 9, 2, 4, &mut bad), KpzStatus::NullPointer);

        for p in [z, h, z2] {
            kpz_path_free(p);
        }
        kpz_trajectory_free(traj);
        kpz_trajectory_free(again);
        kpz_initial_free(ic);
        kpz_grid_free(grid);
    }
}

#[test]
fn expression_datum() {
    unsafe {
        let mut ic = ptr::null_mut();
        let good = CString::new("-x^2").unwrap();
        assert_eq!(kpz_initial_expr(good.as_ptr(), &mut ic), KpzStatus::Ok);
        kpz_initial_free(ic);
        let bad = CString::new("-x^").unwrap();
        assert_eq!(kpz_initial_expr(bad.as_ptr(), &mut ic), KpzStatus::Expression);
        assert!(!last_error().is_empty());
        assert_eq!(kpz_initial_expr(ptr::null(), &mut ic), KpzStatus::NullPointer);
    }
}

#[test]
fn fbm_and_statistics() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(kpz_fbm_circulant(0.25, 1 << 12, 1.0 / 2048.0, 4, 0, true, &mut p), KpzStatus::Ok);
        assert_eq!(kpz_path_len(p), (1 << 12) + 1);
        let mut v = 0.0;
        assert_eq!(kpz_alpha_variation(p, 4.0, 1.0 / 2048.0, 1.0, 2.0, &mut v), KpzStatus::Ok);
        assert!(v > 1.0 && v < 3.0, "{v}");
        assert_eq!(kpz_alpha_variation(p, 4.0, 0.0003, 1.0, 2.0, &mut v), KpzStatus::NotGridMultiple);

        let mut lil = [0.0; 8];
        assert_eq!(kpz_lil_profile(p, 1.0, 8, 1, lil.as_mut_ptr()), KpzStatus::Ok);
        assert!(lil[0].is_nan() && lil[7].is_finite());
        let levels = [4u32, 6, 8];
        let mut moc = [0.0; 3];
        assert_eq!(kpz_moc_profile(p, 1.0, 2.0, levels.as_ptr(), 3, 1, moc.as_mut_ptr()), KpzStatus::Ok);
        assert!(moc.iter().all(|m| m.is_finite() && *m > 0.0));
        kpz_path_free(p);

        assert_eq!(kpz_fbm_circulant(0.25, 1000, 0.001, 4, 0, false, &mut p), KpzStatus::InvalidArgument);

        let times = [0.5, 1.0, 1.5];
        let mut out = [0.0; 3];
        let mut out2 = [0.0; 3];
        assert_eq!(kpz_fbm_cholesky(0.25, times.as_ptr(), 3, 1, 7, out.as_mut_ptr()), KpzStatus::Ok);
        assert_eq!(kpz_fbm_cholesky(0.25, times.as_ptr(), 3, 1, 7, out2.as_mut_ptr()), KpzStatus::Ok);
        assert_eq!(out, out2);
        let dup = [1.0, 1.0];
        assert_ne!(kpz_fbm_cholesky(0.25, dup.as_ptr(), 2, 1, 7, out.as_mut_ptr()), KpzStatus::Ok);
    }
}

#[test]
fn user_paths() {
    unsafe {
        let vals = [0.0, 1.0, 0.0, 1.0, 0.0];
        let mut p = ptr::null_mut();
        assert_eq!(kpz_path_new(0.0, 0.25, vals.as_ptr(), 5, &mut p), KpzStatus::Ok);
        let mut v = 0.0;
        assert_eq!(kpz_alpha_variation(p, 2.0, 0.25, 0.0, 1.0, &mut v), KpzStatus::Ok);
        assert_eq!(v, 4.0);
        kpz_path_free(p);
        assert_eq!(kpz_path_new(0.0, -1.0, vals.as_ptr(), 5, &mut p), KpzStatus::InvalidArgument);
        assert_eq!(kpz_path_len(ptr::null()), 0);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/kpzlab.h")).unwrap();
    for name in [
        "kpz_last_error",
        "kpz_heat_kernel",
        "kpz_linear_increment_variance",
        "kpz_grid_new",
        "kpz_solve",
        "kpz_fbm_circulant",
        "kpz_fbm_cholesky",
        "kpz_alpha_variation",
        "kpz_path_free",
        "typedef struct KpzPath KpzPath",
        "KPZ_STATUS_BOUNDARY_GUARD",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    let version = unsafe { CStr::from_ptr(kpz_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
