use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use spc_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(spc_last_error_message()) }.to_string_lossy().into_owned()
}

struct Setup {
    model: *mut SpcModel,
    grid: *mut SpcGrid,
}

impl Setup {
    fn new(n: usize) -> Self {
        let mut model = ptr::null_mut();
        let mut grid = ptr::null_mut();
        unsafe {
            assert_eq!(spc_model_well(0.5, 7.0, 1.0, 1, 1, &mut model), SpcStatus::Ok);
            assert_eq!(spc_grid_new(20.0, n, &mut grid), SpcStatus::Ok);
        }
        Self { model, grid }
    }
}

impl Drop for Setup {
    fn drop(&mut self) {
        unsafe {
            spc_model_free(self.model);
            spc_grid_free(self.grid);
        }
    }
}

#[test]
fn critical_coupling_through_the_c_interface() {
    let s = Setup::new(2000);
    let mut crit = ptr::null_mut();
    let mut summary = SpcCriticalSummary::default();
    unsafe {
        assert_eq!(spc_critical_find(s.model, s.grid, 5.0, 9.0, &mut crit), SpcStatus::Ok);
        assert_eq!(spc_critical_summary(crit, &mut summary), SpcStatus::Ok);
    }
    assert!((summary.lambda_c - 7.3623).abs() < 1e-2);
    assert!(summary.c0 > 0.0 && summary.c0 < 1.0);
    assert!(summary.identity_residual < 1e-3);
    let mut peak = SpcResonancePeak::default();
    unsafe {
        assert_eq!(spc_scan_resonance(crit, 0.05, &mut peak), SpcStatus::Ok);
        spc_critical_free(crit);
    }
    assert!((peak.k_peak / 0.05f64.sqrt() - 1.05).abs() < 0.1, "{peak:?}");
    assert!(peak.delta_width > 0.0 && peak.delta_width < peak.k_peak);
}

#[test]
fn bound_state_energy_lies_in_the_gap() {
    let s = Setup::new(1000);
    let mut e = f64::NAN;
    unsafe {
        assert_eq!(spc_bound_state_energy(s.model, s.grid, -0.5, &mut e), SpcStatus::Ok);
    }
    assert!(e > -1.0 && e < 1.0);
    unsafe {
        assert_eq!(spc_bound_state_energy(s.model, s.grid, -7.0, &mut e), SpcStatus::Numerical);
    }
    assert!(!last_error().is_empty());
}

#[test]
fn errors_map_to_status_codes() {
    let mut model = ptr::null_mut();
    let mut grid = ptr::null_mut();
    let mut crit = ptr::null_mut();
    let mut sd = 0.0;
    unsafe {
        assert_eq!(spc_model_well(0.5, 7.0, 1.0, 2, 1, &mut model), SpcStatus::Config);
        assert!(last_error().contains("sign"));
        assert_eq!(spc_model_well(0.5, 7.0, 1.0, 1, 1, ptr::null_mut()), SpcStatus::NullPointer);
        assert_eq!(spc_grid_new(20.0, 3, &mut grid), SpcStatus::Config);
        assert!(grid.is_null());
        assert_eq!(spc_critical_find(ptr::null(), ptr::null(), 5.0, 9.0, &mut crit), SpcStatus::NullPointer);
        assert_eq!(spc_fixed_point_sd(0.5, 0.5, -1.0, 1e-3, &mut sd), SpcStatus::Usage);
        spc_model_free(ptr::null_mut());
        spc_grid_free(ptr::null_mut());
        spc_critical_free(ptr::null_mut());
    }
}

#[test]
fn subcritical_search_is_numerical() {
    let s = Setup::new(500);
    let mut crit = ptr::null_mut();
    unsafe {
        assert_eq!(spc_critical_find(s.model, s.grid, 2.0, 5.0, &mut crit), SpcStatus::Numerical);
    }
    assert!(crit.is_null());
}

#[test]
fn fixed_point_scales_by_four_over_32_fold_epsilon() {
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(spc_fixed_point_sd(0.54, 0.49, 0.116, 1e-4, &mut a), SpcStatus::Ok);
        assert_eq!(spc_fixed_point_sd(0.54, 0.49, 0.116, 32e-4, &mut b), SpcStatus::Ok);
    }
    assert!((b / a - 4.0).abs() < 1e-12);
    assert!(last_error().is_empty());
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        return;
    };
    assert!(cc.status.success());
    let tmp = std::env::temp_dir().join(format!("spc_ffi_header_{}.c", std::process::id()));
    std::fs::write(
        &tmp,
        "#include \"spc.h\"\nint main(void) {\n  SpcModel *m = 0;\n  SpcStatus s = spc_model_well(0.5, 7.0, 1.0, 1, 1, &m);\n  return s == SPC_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&tmp)
        .output()
        .unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
