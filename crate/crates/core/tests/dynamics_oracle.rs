use proptest::prelude::*;
use ssh_lindblad::dynamics::*;
use ssh_lindblad::linalg::max_abs_real;
use ssh_lindblad::oracle::{ed_evolve, ed_steady_state, full_liouvillian_matrix, min_eigenvalue};
use ssh_lindblad::thirdq::{liouvillian_gap, rapidity_spectrum};
use ssh_lindblad::{DissipatorKind, OpenChainModel, Side};

fn loss_gain(t1: f64, n: usize, gamma: f64) -> OpenChainModel {
    OpenChainModel::new(t1, 1.0, n)
        .with_dissipator(Side::Left, DissipatorKind::Loss, gamma)
        .with_dissipator(Side::Right, DissipatorKind::Gain, gamma)
}

#[test]
fn oracle_initial_state_has_same_correlation_matrix() {
    let s = full_liouvillian_matrix(&OpenChainModel::loss_loss(0.5, 1.0, 2, 0.2, 0.2)).unwrap();
    let rho = s.fock.fully_occupied();
    let g = s.fock.correlation_matrix(&rho);
    assert!(max_abs_real(&(g - initial_fully_occupied(2).gamma)) < 1e-15);
}

#[test]
fn densities_match_master_equation() {
    let times = log_grid(0.05, 50.0, 20);
    for model in [OpenChainModel::loss_loss(0.5, 1.0, 2, 0.2, 0.2), loss_gain(0.5, 2, 0.2), loss_gain(1.7, 2, 0.9)] {
        let s = full_liouvillian_matrix(&model).unwrap();
        let rho0 = s.vectorize(&s.fock.fully_occupied());
        let ed = ed_evolve(&rho0, &s, &times).unwrap();
        let g0 = initial_fully_occupied(2);
        let traj = evolve(&g0, &model, &times).unwrap();
        for (k, (g, rho)) in traj.iter().zip(&ed.states).enumerate() {
            let dn = (density(g) - ed.densities()[k]).abs();
            assert!(dn < 1e-6, "t = {}: {dn:e}", times[k]);
            let dg = max_abs_real(&(&g.gamma - s.fock.correlation_matrix(rho)));
            assert!(dg < 1e-6, "t = {}: {dg:e}", times[k]);
        }
    }
}

#[test]
fn steady_state_matches_oracle_null_vector() {
    for model in [loss_gain(0.5, 2, 0.5), loss_gain(2.0, 2, 1.3), OpenChainModel::loss_loss(0.5, 1.0, 2, 0.2, 0.7)] {
        let s = full_liouvillian_matrix(&model).unwrap();
        let rho = ed_steady_state(&s).unwrap();
        let ss = steady_state(&model).unwrap();
        let d = max_abs_real(&(&ss.gamma.gamma - s.fock.correlation_matrix(&rho)));
        assert!(d < 1e-8, "{d:e}");
        assert!(ss.residual < 1e-10);
    }
}

#[test]
fn oracle_long_time_density_matches_steady_state() {
    let model = loss_gain(0.8, 2, 0.6);
    let s = full_liouvillian_matrix(&model).unwrap();
    let rho0 = s.vectorize(&s.fock.fully_occupied());
    let ed = ed_evolve(&rho0, &s, &[400.0]).unwrap();
    let ss = steady_state(&model).unwrap();
    assert!((ed.densities()[0] - density(&ss.gamma)).abs() < 1e-6);
    assert!(min_eigenvalue(&ed.states[0]) > -1e-8);
}

#[test]
fn trivial_phase_relaxes_to_vacuum() {
    let model = OpenChainModel::new(2.0, 1.0, 6).with_dissipator(Side::Left, DissipatorKind::Loss, 1.0);
    let ss = steady_state(&model).unwrap();
    assert!(max_abs_real(&(&ss.gamma.gamma - vacuum(6).gamma)) < 1e-10);
    let g = evolve(&initial_fully_occupied(6), &model, &[1e4]).unwrap();
    assert!(max_abs_real(&(&g[0].gamma - &ss.gamma.gamma)) < 1e-6);
}

#[test]
fn deviation_decays_at_twice_the_gap() {
    let model = OpenChainModel::loss_loss(2.0, 1.0, 6, 0.2, 0.2);
    let gap = liouvillian_gap(&rapidity_spectrum(&model).unwrap());
    let n_inf = density(&steady_state(&model).unwrap().gamma);
    let (t_a, t_b) = (4.0 / gap, 6.0 / gap);
    let n = density_trajectory(&initial_fully_occupied(6), &model, &[t_a, t_b]).unwrap();
    let rate = ((n[0] - n_inf).abs().ln() - (n[1] - n_inf).abs().ln()) / (t_b - t_a);
    assert!((rate - 2.0 * gap).abs() < 0.05 * 2.0 * gap, "rate {rate} vs 2·gap {}", 2.0 * gap);
}

#[test]
fn reflection_maps_left_to_right() {
    let left = OpenChainModel::new(0.6, 1.0, 5).with_dissipator(Side::Left, DissipatorKind::Loss, 0.8);
    let right = left.reflected();
    assert_eq!(right.gamma(Side::Right), 0.8);
    let times = [0.5, 3.0, 30.0];
    let a = evolve(&initial_fully_occupied(5), &left, &times).unwrap();
    let b = evolve(&initial_fully_occupied(5), &right, &times).unwrap();
    for (x, y) in a.iter().zip(&b) {
        let mut pa = site_density_profile(x);
        pa.reverse();
        let pb = site_density_profile(y);
        for (u, v) in pa.iter().zip(&pb) {
            assert!((u - v).abs() < 1e-10);
        }
    }
}

#[test]
fn evolution_stays_physical() {
    let model = loss_gain(0.3, 8, 2.0);
    let traj = evolve(&initial_fully_occupied(8), &model, &log_grid(0.01, 1e4, 40)).unwrap();
    for g in &traj {
        assert!(g.antisymmetry_error() < 1e-10);
        assert!(site_density_profile(g).iter().all(|n| (-1e-8..=1.0 + 1e-8).contains(n)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn semigroup(t1 in 0.1f64..3.0, gl in 0.05f64..3.0, gr in 0.0f64..3.0, gain in proptest::bool::ANY, n in 1usize..5, ta in 0.0f64..20.0, tb in 0.0f64..20.0) {
        let kind = if gain { DissipatorKind::Gain } else { DissipatorKind::Loss };
        let model = OpenChainModel::new(t1, 1.0, n)
            .with_dissipator(Side::Left, DissipatorKind::Loss, gl)
            .with_dissipator(Side::Right, kind, gr);
        let p = Propagator::new(&model).unwrap();
        let g0 = initial_fully_occupied(n);
        let direct = p.at(&g0, ta + tb);
        let stepped = p.at(&p.at(&g0, ta), tb);
        prop_assert!(max_abs_real(&(&direct.gamma - &stepped.gamma)) < 1e-8);
    }
}
