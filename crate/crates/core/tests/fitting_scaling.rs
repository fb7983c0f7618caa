use ssh_lindblad::fitting::{self, FitForm};
use ssh_lindblad::{DissipatorKind, OpenChainModel, Side};

fn left_loss(t1: f64, gamma: f64) -> OpenChainModel {
    OpenChainModel::new(t1, 1.0, 1).with_dissipator(Side::Left, DissipatorKind::Loss, gamma)
}

/// Sizes where the dark mode sets the gap and the gap stays above ~1e-10.
fn dark_window(t1: f64, gamma: f64) -> Vec<usize> {
    let hi = ((1e-10 * gamma).ln() / (2.0 * t1.ln())).floor() as usize;
    (hi - 6..=hi).collect()
}

#[test]
fn exponential_fit_reproduces_reference_rates() {
    for (gamma, a_ref) in [(0.2, 3.749), (2.0, 0.3749)] {
        let s = fitting::gap_scan(&left_loss(0.5, gamma), &(7..=16).collect::<Vec<_>>()).unwrap();
        assert!(s.excluded.is_empty());
        let f = fitting::fit_exponential(&s).unwrap();
        assert!((f.rate - 1.3863).abs() / 1.3863 < 0.02, "b = {}", f.rate);
        assert!((f.prefactor - a_ref).abs() / a_ref < 0.10, "a = {}", f.prefactor);
        assert!(f.r_squared > 0.999_999);
        assert_eq!(fitting::model_select(&s).unwrap().selected, FitForm::Exponential);
    }
}

#[test]
fn weak_dissipation_small_sizes_are_bulk_limited() {
    let s = fitting::gap_scan(&left_loss(0.5, 0.2), &[4, 5, 6, 8]).unwrap();
    let dark = |n: usize| 3.75 * (-1.3863 * n as f64).exp();
    for &(n, gap) in &s.points[..3] {
        assert!(gap < 0.95 * dark(n), "N={n}");
    }
    assert!((s.points[3].1 / dark(8) - 1.0).abs() < 1e-3);
}

#[test]
fn exponential_rate_tracks_two_log_inverse_t1() {
    for t1 in [0.3f64, 0.5, 0.7] {
        let expected = 2.0 * (1.0 / t1).ln();
        let s = fitting::gap_scan(&left_loss(t1, 0.2), &dark_window(t1, 0.2)).unwrap();
        let f = fitting::fit_exponential(&s).unwrap();
        assert!((f.rate - expected).abs() / expected < 0.02, "t1={t1} b={}", f.rate);
    }
}

#[test]
fn powerlaw_exponent_reproduces_reference_values() {
    let ns: Vec<usize> = (20..=160).step_by(10).collect();
    for (gamma, c_ref) in [(0.2, 2.9863), (2.0, 2.9971)] {
        let s = fitting::gap_scan(&left_loss(2.0, gamma), &ns).unwrap();
        let f = fitting::fit_powerlaw(&s).unwrap();
        assert!((f.rate - c_ref).abs() / c_ref < 0.05, "c = {}", f.rate);
        assert!(s.points.windows(2).all(|w| w[1].1 < w[0].1));
        assert_eq!(fitting::model_select(&s).unwrap().selected, FitForm::Powerlaw);
    }
}

#[test]
fn closed_chain_gives_empty_series() {
    let s = fitting::gap_scan(&OpenChainModel::new(0.5, 1.0, 1), &[4, 6, 8]).unwrap();
    assert!(s.is_empty() && s.excluded.len() == 3);
    assert!(fitting::fit_exponential(&s).is_err());
}
