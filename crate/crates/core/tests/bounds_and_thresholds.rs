use smst_core::bounds::{solve_g_system, BoundsTable, GParams};
use smst_core::rho::{RhoFamily, RhoParams};
use smst_core::thresholds::{phi_from_grid, phi_k2, solve_theta_ode, DEFAULT_THETA_STEP};

#[test]
fn g7_leaves_zero_late() {
    let s = solve_g_system(&GParams::new(7, 1e-4)).unwrap();
    let t = s.g[6].first_exceedance(0.01).unwrap();
    assert!(t > 8.0 && t < 12.0, "{t}");
}

#[test]
fn gamma_bar_close_to_square() {
    let s = solve_g_system(&GParams::new(50, 1e-4)).unwrap();
    assert!(s.tail_met);
    for (i, &gb) in s.gamma_bar.iter().enumerate() {
        let k = (i + 1) as f64;
        assert!(gb >= k * k - 1e-6 && gb - k * k <= 1.0, "k={k}: {gb}");
    }
    let table = BoundsTable::build(50, Some(&s)).unwrap();
    for r in &table.rows {
        let gb = r.gamma_bar.unwrap();
        assert!(gb <= r.big_gamma_upper);
    }
}

#[test]
fn grid_threshold_agrees_with_family() {
    let fam = RhoFamily::compute(2, &RhoParams::default()).unwrap();
    let grid = solve_theta_ode(&phi_from_grid(fam.rho(1)).unwrap(), 1e-4).unwrap();
    let closed = solve_theta_ode(&phi_k2(), DEFAULT_THETA_STEP).unwrap();
    assert!((grid.sigma - closed.sigma).abs() < 1e-3);
    assert!((closed.sigma - fam.xi_hat[2].unwrap()).abs() <= 0.02);
}

#[test]
fn next_threshold_is_one_later() {
    let fam = RhoFamily::compute(3, &RhoParams::default()).unwrap();
    let s3 = solve_theta_ode(&phi_from_grid(fam.rho(2)).unwrap(), 1e-4).unwrap();
    let s2 = solve_theta_ode(&phi_k2(), DEFAULT_THETA_STEP).unwrap();
    assert!(
        s3.sigma >= s2.sigma + 1.0 - 0.02,
        "{} {}",
        s3.sigma,
        s2.sigma
    );
    assert!(
        (s3.sigma - fam.xi_hat[3].unwrap()).abs() <= 0.02,
        "{}",
        s3.sigma
    );
}
