//! Closed-form results for the open chain: bulk dispersion, the θ-equation
//! for the finite chain, and the single-boundary dark and bound states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::model::{OpenChainModel, Side};

/// Complex bulk momentum with the sign of `E = ±√(…)` it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaPoint {
    /// `θ_R ∈ [0, 2π)`.
    pub theta: C64,
    /// `+1` or `−1`.
    pub branch: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionKind {
    Dark,
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStatePrediction {
    pub kind: PredictionKind,
    pub exists: bool,
    /// Decay factor `x = e^{θ_I}` per unit cell, measured from the localizing edge.
    pub x: f64,
    pub energy: C64,
    pub theta: C64,
    /// Edge the state is localized at.
    pub side: Side,
    /// Set for `t1 = t2`, where `x = 1` and the state is not localized.
    pub marginal: bool,
    pub depends_on_gamma: bool,
}

/// `E = branch · √(t1² + t2² + 2 t1 t2 cos θ)` (principal root).
pub fn bulk_energy(point: ThetaPoint, t1: f64, t2: f64) -> C64 {
    let e2 = C64::new(t1 * t1 + t2 * t2, 0.0) + 2.0 * t1 * t2 * point.theta.cos();
    e2.sqrt() * f64::from(point.branch)
}

/// Relative residual of
/// `p1 sin(Nθ) − p2 sin((N+1)θ) + p3 sin((N−1)θ)` with
/// `p1 = i t2 (γ_l+γ_r) E − (t2³ − t2 γ_l γ_r)`, `p2 = t1 t2²`, `p3 = t1 γ_l γ_r`
/// and `E` from [`bulk_energy`]. Normalized by the largest of the three terms.
pub fn theta_residual(point: ThetaPoint, t1: f64, t2: f64, gamma_left: f64, gamma_right: f64, n_cells: usize) -> f64 {
    let e = bulk_energy(point, t1, t2);
    let n = n_cells as f64;
    let th = point.theta;
    let p1 = I * t2 * (gamma_left + gamma_right) * e - (t2.powi(3) - t2 * gamma_left * gamma_right);
    let p2 = t1 * t2 * t2;
    let p3 = t1 * gamma_left * gamma_right;
    let a = p1 * (th * n).sin();
    let b = p2 * (th * (n + 1.0)).sin();
    let c = p3 * (th * (n - 1.0)).sin();
    let scale = a.norm().max(b.norm()).max(c.norm()).max(1e-300);
    (a - b + c).norm() / scale
}

fn wrap(theta: C64) -> C64 {
    C64::new(theta.re.rem_euclid(std::f64::consts::TAU), theta.im)
}

fn branch_for(theta: C64, e: C64, t1: f64, t2: f64) -> i8 {
    let plus = bulk_energy(ThetaPoint { theta, branch: 1 }, t1, t2);
    if (plus - e).norm() <= (plus + e).norm() {
        1
    } else {
        -1
    }
}

/// Inverts the bulk dispersion: `cos θ = (E² − t1² − t2²)/(2 t1 t2)`.
///
/// Of the two roots `θ` and `2π − θ` the one with `θ_I ≥ 0` is returned
/// (for real `θ`, the one in `[0, π]`); the branch reproduces `E` itself.
pub fn energy_to_theta(e: C64, t1: f64, t2: f64) -> Result<ThetaPoint> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::InvalidArgument(format!("energy_to_theta needs t1 > 0 and t2 > 0, got t1 = {t1}, t2 = {t2}")));
    }
    let c = (e * e - t1 * t1 - t2 * t2) / (2.0 * t1 * t2);
    let a = wrap(c.acos());
    let b = wrap(C64::new(std::f64::consts::TAU, 0.0) - a);
    let theta = if a.im > b.im || (a.im == b.im && a.re <= b.re) { a } else { b };
    Ok(ThetaPoint { theta, branch: branch_for(theta, e, t1, t2) })
}

/// θ for a rapidity of a specific chain: the candidate among
/// `{θ, 2π − θ, θ*, 2π − θ*}` with the smallest θ-equation residual.
pub fn theta_for_rapidity(e: C64, model: &OpenChainModel) -> Result<(ThetaPoint, f64)> {
    let base = energy_to_theta(e, model.t1, model.t2)?;
    let gl = model.gamma(Side::Left);
    let gr = model.gamma(Side::Right);
    let candidates = [base.theta, C64::new(std::f64::consts::TAU, 0.0) - base.theta, base.theta.conj(), C64::new(std::f64::consts::TAU, 0.0) - base.theta.conj()];
    let mut best: Option<(ThetaPoint, f64)> = None;
    for th in candidates {
        let theta = wrap(th);
        let point = ThetaPoint { theta, branch: branch_for(theta, e, model.t1, model.t2) };
        let r = theta_residual(point, model.t1, model.t2, gl, gr, model.n_cells);
        if best.is_none_or(|(_, br)| r < br) {
            best = Some((point, r));
        }
    }
    Ok(best.expect("four candidates"))
}

/// Dark state of a chain dissipated on `dissipated_side` only.
///
/// Exists for `0 < t1/t2 ≤ 1` with `x = t2/t1`, `θ = π + i ln x` and `E = 0`,
/// localized at the opposite edge. Nothing here depends on `gamma`.
pub fn dark_state_prediction(t1: f64, t2: f64, gamma: f64, dissipated_side: Side) -> BoundStatePrediction {
    let _ = gamma;
    let r = t1 / t2;
    let exists = r > 0.0 && r <= 1.0;
    let x = if r > 0.0 { 1.0 / r } else { f64::INFINITY };
    BoundStatePrediction {
        kind: PredictionKind::Dark,
        exists,
        x,
        energy: C64::new(0.0, 0.0),
        theta: C64::new(std::f64::consts::PI, x.ln()),
        side: dissipated_side.opposite(),
        marginal: r == 1.0,
        depends_on_gamma: false,
    }
}

fn single_side(model: &OpenChainModel) -> Result<(Side, f64)> {
    let gl = model.gamma(Side::Left);
    let gr = model.gamma(Side::Right);
    match (gl > 0.0, gr > 0.0) {
        (true, true) => Err(Error::InvalidArgument("dark-state analysis needs dissipation on one boundary only".into())),
        (true, false) => Ok((Side::Left, gl)),
        (false, true) => Ok((Side::Right, gr)),
        (false, false) => Err(Error::InvalidArgument("dark-state analysis needs a dissipated boundary".into())),
    }
}

/// [`dark_state_prediction`] for a model, rejecting two-sided dissipation.
pub fn dark_state_for_model(model: &OpenChainModel) -> Result<BoundStatePrediction> {
    let (side, gamma) = single_side(model)?;
    Ok(dark_state_prediction(model.t1, model.t2, gamma, side))
}

/// Roots `x±` of `t1 x² − (1 + γ²) x + t1 γ² = 0` (energies in units of `t2`).
pub fn bound_state_roots(t1: f64, t2: f64, gamma: f64) -> (f64, f64) {
    let t = t1 / t2;
    let g2 = (gamma / t2).powi(2);
    let disc = (1.0 + g2 * g2 + g2 * (2.0 - 4.0 * t * t)).sqrt();
    ((1.0 + g2 + disc) / (2.0 * t), (1.0 + g2 - disc) / (2.0 * t))
}

/// Boundary bound states at the dissipated edge in the long-chain limit.
///
/// Only roots with `x > 1` are returned, with `E = i t2 (t x − 1)/g`
/// (`t = t1/t2`, `g = γ/t2`), which also satisfies `E² = t2²(1 + t² − t(x + 1/x))`.
pub fn boundary_bound_state_prediction(t1: f64, t2: f64, gamma: f64, dissipated_side: Side) -> Vec<BoundStatePrediction> {
    if t1 <= 0.0 || gamma <= 0.0 {
        return Vec::new();
    }
    let (xp, xm) = bound_state_roots(t1, t2, gamma);
    let t = t1 / t2;
    let g = gamma / t2;
    [xp, xm]
        .into_iter()
        .filter(|x| x.is_finite() && *x > 1.0)
        .map(|x| BoundStatePrediction {
            kind: PredictionKind::Bound,
            exists: true,
            x,
            energy: I * t2 * (t * x - 1.0) / g,
            theta: C64::new(std::f64::consts::PI, x.ln()),
            side: dissipated_side,
            marginal: false,
            depends_on_gamma: true,
        })
        .collect()
}

/// [`boundary_bound_state_prediction`] for a model, rejecting two-sided dissipation.
pub fn bound_states_for_model(model: &OpenChainModel) -> Result<Vec<BoundStatePrediction>> {
    let (side, gamma) = single_side(model)?;
    Ok(boundary_bound_state_prediction(model.t1, model.t2, gamma, side))
}
