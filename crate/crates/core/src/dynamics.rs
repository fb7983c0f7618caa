//! Gaussian-state dynamics through the Majorana correlation matrix
//! `Γ_ab = i⟨w̄_a w̄_b⟩ − (i/2)δ_ab` (normalized convention), which obeys
//! `dΓ/dt = X̄Γ + ΓX̄ᵀ + Ȳ` with `X̄ = −2iH̄ − 2Re(M̄)`, `Ȳ = 2Im(M̄)`,
//! `M̄ = Σ_μ l̄_μ l̄_μ†`.
//!
//! The eigenvalues of `X̄` are `iE` for the rapidities `E` (each twice), so a
//! deviation from the steady state decays no slower than `e^{−2Δ_g t}`.

use nalgebra::linalg::LU;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, phi1, CMat, RMat, C64, I};
use crate::model::{quadratic_kernel, MajoranaConvention, OpenChainModel};

/// Condition number of the eigenvector matrix above which the propagator
/// switches to the exponential-doubling path.
pub const COND_LIMIT: f64 = 1e12;
/// Eigenvalue-sum magnitude below which the steady state is reported as near-singular.
pub const MIN_EIGEN_SUM: f64 = 1e-14;
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;
/// Largest chain for the dense vectorized Lyapunov fallback.
pub const KRONECKER_MAX_CELLS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub gamma: RMat,
    pub time: f64,
}

impl CorrelationMatrix {
    pub fn n_sites(&self) -> usize {
        self.gamma.nrows() / 2
    }

    /// `‖Γ + Γᵀ‖_max`.
    pub fn antisymmetry_error(&self) -> f64 {
        linalg::max_abs_real(&(&self.gamma + self.gamma.transpose()))
    }

    pub fn density(&self) -> f64 {
        density(self)
    }

    pub fn site_density_profile(&self) -> Vec<f64> {
        site_density_profile(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsMatrices {
    pub x_bar: RMat,
    pub y_bar: RMat,
}

pub fn build_dynamics_matrices(model: &OpenChainModel) -> Result<DynamicsMatrices> {
    model.ensure_valid()?;
    let dim = model.n_majoranas();
    let h_bar = quadratic_kernel(&model.site_hopping_matrix(), MajoranaConvention::Normalized);
    let mut m_bar = CMat::zeros(dim, dim);
    for d in &model.dissipators {
        let l = MajoranaConvention::Normalized.jump_vector(dim, model.boundary_site(d.side), d.kind, d.strength);
        for a in 0..dim {
            for b in 0..dim {
                m_bar[(a, b)] += l[a] * l[b].conj();
            }
        }
    }
    // H̄ is purely imaginary for a real hopping matrix, so −2iH̄ is real.
    let x = h_bar * (-2.0 * I) - m_bar.map(|z| C64::new(2.0 * z.re, 0.0));
    debug_assert!(x.iter().all(|z| z.im.abs() < 1e-14));
    Ok(DynamicsMatrices { x_bar: x.map(|z| z.re), y_bar: m_bar.map(|z| 2.0 * z.im) })
}

fn pair_matrix(n_sites: usize, value: f64) -> CorrelationMatrix {
    let mut g = RMat::zeros(2 * n_sites, 2 * n_sites);
    for x in 0..n_sites {
        g[(2 * x, 2 * x + 1)] = value;
        g[(2 * x + 1, 2 * x)] = -value;
    }
    CorrelationMatrix { gamma: g, time: 0.0 }
}

/// Every site occupied: `Γ_{2x−1,2x} = +1/2`.
pub fn initial_fully_occupied(n_cells: usize) -> CorrelationMatrix {
    pair_matrix(2 * n_cells, 0.5)
}

/// Every site empty: `Γ_{2x−1,2x} = −1/2`.
pub fn vacuum(n_cells: usize) -> CorrelationMatrix {
    pair_matrix(2 * n_cells, -0.5)
}

/// Mean site density `1/2 + (1/2N_s) Σ_x Γ_{2x−1,2x}` over the `N_s = 2N` sites.
pub fn density(g: &CorrelationMatrix) -> f64 {
    let p = site_density_profile(g);
    p.iter().sum::<f64>() / p.len() as f64
}

pub fn site_density_profile(g: &CorrelationMatrix) -> Vec<f64> {
    (0..g.n_sites()).map(|x| 0.5 + g.gamma[(2 * x, 2 * x + 1)]).collect()
}

fn antisymmetrize(m: &RMat) -> RMat {
    (m - m.transpose()) * 0.5
}

fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition `X̄ = V Λ V⁻¹` with the transformed inhomogeneity
/// `Ỹ = V⁻¹ Ȳ V⁻ᵀ`.
struct EigenBasis {
    lambda: Vec<C64>,
    v: CMat,
    v_inv: CMat,
    y_tilde: CMat,
    condition: f64,
}

impl EigenBasis {
    fn new(mats: &DynamicsMatrices) -> Result<Self> {
        let x = linalg::to_complex(&mats.x_bar);
        let n = x.nrows();
        let eig = linalg::eig(&x, &|| format!("{n}x{n} dynamics matrix"))?;
        let v = eig.vectors;
        let v_inv = LU::new(v.clone()).try_inverse().unwrap_or_else(|| CMat::from_element(n, n, C64::new(f64::INFINITY, 0.0)));
        let condition = frobenius(&v) * frobenius(&v_inv);
        let y_tilde = &v_inv * linalg::to_complex(&mats.y_bar) * v_inv.transpose();
        Ok(EigenBasis { lambda: eig.values, v, v_inv, y_tilde, condition })
    }

    fn sigma(&self, i: usize, j: usize) -> C64 {
        self.lambda[i] + self.lambda[j]
    }

    fn min_eigen_sum(&self) -> f64 {
        let n = self.lambda.len();
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in i..n {
                m = m.min(self.sigma(i, j).norm());
            }
        }
        m
    }

    fn to_real(&self, inner: &CMat) -> RMat {
        antisymmetrize(&(&self.v * inner * self.v.transpose()).map(|z| z.re))
    }
}

pub fn lyapunov_residual(mats: &DynamicsMatrices, gamma: &RMat) -> f64 {
    linalg::max_abs_real(&(&mats.x_bar * gamma + gamma * mats.x_bar.transpose() + &mats.y_bar))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SteadyStateMethod {
    Eigen,
    Kronecker,
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub gamma: CorrelationMatrix,
    pub residual: f64,
    pub min_eigen_sum: f64,
    pub method: SteadyStateMethod,
    /// Set when some `|λ_i + λ_j|` is below [`MIN_EIGEN_SUM`].
    pub warning: Option<String>,
}

/// Stationary solution of `X̄Γ + ΓX̄ᵀ + Ȳ = 0`.
///
/// Solved in the eigenbasis of `X̄`; if the residual misses
/// [`STEADY_RESIDUAL_TOL`] the vectorized system is solved directly for
/// chains up to [`KRONECKER_MAX_CELLS`] cells.
pub fn steady_state(model: &OpenChainModel) -> Result<SteadyState> {
    if !model.is_dissipative() {
        return Err(Error::InvalidArgument("steady state needs at least one dissipator with positive strength".into()));
    }
    let mats = build_dynamics_matrices(model)?;
    let basis = EigenBasis::new(&mats)?;
    let min_eigen_sum = basis.min_eigen_sum();
    let warning = (min_eigen_sum < MIN_EIGEN_SUM).then(|| {
        format!("near-singular Lyapunov operator: min |λi + λj| = {min_eigen_sum:e}; the dark-mode block of Γ_s is not resolved")
    });
    let n = basis.lambda.len();
    let mut eigen_result = None;
    if basis.condition.is_finite() && min_eigen_sum > 0.0 {
        let g = CMat::from_fn(n, n, |i, j| -basis.y_tilde[(i, j)] / basis.sigma(i, j));
        let gamma = basis.to_real(&g);
        let residual = lyapunov_residual(&mats, &gamma);
        if residual < STEADY_RESIDUAL_TOL {
            return Ok(SteadyState { gamma: CorrelationMatrix { gamma, time: f64::INFINITY }, residual, min_eigen_sum, method: SteadyStateMethod::Eigen, warning });
        }
        eigen_result = Some(residual);
    }
    if model.n_cells <= KRONECKER_MAX_CELLS {
        let singular = Error::IllConditionedSteadyState { min_eigen_sum, residual: eigen_result.unwrap_or(f64::INFINITY) };
        let gamma = kronecker_lyapunov(&mats).map_err(|_| singular)?;
        let residual = lyapunov_residual(&mats, &gamma);
        if residual < STEADY_RESIDUAL_TOL {
            return Ok(SteadyState { gamma: CorrelationMatrix { gamma, time: f64::INFINITY }, residual, min_eigen_sum, method: SteadyStateMethod::Kronecker, warning });
        }
        eigen_result = Some(eigen_result.map_or(residual, |r: f64| r.min(residual)));
    }
    Err(Error::IllConditionedSteadyState { min_eigen_sum, residual: eigen_result.unwrap_or(f64::INFINITY) })
}

/// Dense solve of the Lyapunov equation restricted to the `n(n−1)/2`
/// independent entries of an antisymmetric `Γ`.
fn kronecker_lyapunov(mats: &DynamicsMatrices) -> Result<RMat> {
    let n = mats.x_bar.nrows();
    let idx = |i: usize, j: usize| i * n - i * (i + 1) / 2 + (j - i - 1);
    let m = n * (n - 1) / 2;
    let x = &mats.x_bar;
    let mut a = RMat::zeros(m, m);
    let mut rhs = nalgebra::DVector::<f64>::zeros(m);
    // Row (i, j), i < j: Σ_k X_ik Γ_kj + Σ_k Γ_ik X_jk = −Y_ij, with Γ_kl = −Γ_lk.
    let add = |row: usize, k: usize, l: usize, coef: f64, a: &mut RMat| {
        if k < l {
            a[(row, idx(k, l))] += coef;
        } else if k > l {
            a[(row, idx(l, k))] -= coef;
        }
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let row = idx(i, j);
            rhs[row] = -mats.y_bar[(i, j)];
            for k in 0..n {
                add(row, k, j, x[(i, k)], &mut a);
                add(row, i, k, x[(j, k)], &mut a);
            }
        }
    }
    let sol = LU::new(a).solve(&rhs).ok_or(Error::IllConditionedSteadyState { min_eigen_sum: 0.0, residual: f64::INFINITY })?;
    let mut g = RMat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            g[(i, j)] = sol[idx(i, j)];
            g[(j, i)] = -sol[idx(i, j)];
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorMethod {
    Eigen,
    Doubling,
}

/// Reusable solution operator `Γ0 ↦ Γ(t)` for one model.
pub struct Propagator {
    mats: DynamicsMatrices,
    basis: Option<EigenBasis>,
    pub condition: f64,
}

impl Propagator {
    pub fn new(model: &OpenChainModel) -> Result<Self> {
        let mats = build_dynamics_matrices(model)?;
        let basis = EigenBasis::new(&mats)?;
        let condition = basis.condition;
        let basis = (condition.is_finite() && condition <= COND_LIMIT).then_some(basis);
        Ok(Propagator { mats, basis, condition })
    }

    pub fn method(&self) -> PropagatorMethod {
        if self.basis.is_some() {
            PropagatorMethod::Eigen
        } else {
            PropagatorMethod::Doubling
        }
    }

    pub fn matrices(&self) -> &DynamicsMatrices {
        &self.mats
    }

    /// `Γ(t)` from `Γ(0) = g0`. In the eigenbasis each entry obeys
    /// `dΓ̃_ij/dt = σ_ij Γ̃_ij + Ỹ_ij` with `σ_ij = λ_i + λ_j`, so
    /// `Γ̃_ij(t) = e^{σ_ij t} Γ̃_ij(0) + φ1(σ_ij, t) Ỹ_ij`.
    pub fn at(&self, g0: &CorrelationMatrix, t: f64) -> CorrelationMatrix {
        if t == 0.0 {
            return CorrelationMatrix { gamma: g0.gamma.clone(), time: 0.0 };
        }
        let gamma = match &self.basis {
            Some(b) => self.at_eigen(b, &g0.gamma, t),
            None => self.at_doubling(&g0.gamma, t),
        };
        CorrelationMatrix { gamma, time: t }
    }

    fn at_eigen(&self, b: &EigenBasis, g0: &RMat, t: f64) -> RMat {
        let g0_tilde = &b.v_inv * linalg::to_complex(g0) * b.v_inv.transpose();
        let n = b.lambda.len();
        let inner = CMat::from_fn(n, n, |i, j| {
            let s = b.sigma(i, j);
            (s * t).exp() * g0_tilde[(i, j)] + phi1(s, t) * b.y_tilde[(i, j)]
        });
        b.to_real(&inner)
    }

    /// Affine map `Γ ↦ F Γ Fᵀ + Z` for step `h = t / 2^k` from the block
    /// exponential `exp([[X̄, Ȳ], [0, −X̄ᵀ]] h) = [[F, G], [0, F⁻ᵀ]]`, `Z = G Fᵀ`,
    /// then doubled `k` times: `F ← F²`, `Z ← F Z Fᵀ + Z`.
    fn at_doubling(&self, g0: &RMat, t: f64) -> RMat {
        let n = self.mats.x_bar.nrows();
        let norm = self.mats.x_bar.iter().map(|x| x.abs()).fold(0.0, f64::max) * n as f64;
        let mut k = 0u32;
        let mut h = t;
        while h * norm > 0.5 {
            h /= 2.0;
            k += 1;
        }
        let mut block = RMat::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&(&self.mats.x_bar * h));
        block.view_mut((0, n), (n, n)).copy_from(&(&self.mats.y_bar * h));
        block.view_mut((n, n), (n, n)).copy_from(&(-self.mats.x_bar.transpose() * h));
        let e = block.exp();
        let mut f = e.view((0, 0), (n, n)).into_owned();
        let mut z = e.view((0, n), (n, n)) * f.transpose();
        for _ in 0..k {
            z = &f * &z * f.transpose() + &z;
            f = &f * &f;
        }
        antisymmetrize(&(&f * g0 * f.transpose() + z))
    }
}

/// `Γ(t)` on an ascending grid of non-negative times.
pub fn evolve(g0: &CorrelationMatrix, model: &OpenChainModel, t_grid: &[f64]) -> Result<Vec<CorrelationMatrix>> {
    check_grid(t_grid)?;
    let p = Propagator::new(model)?;
    Ok(t_grid.iter().map(|&t| p.at(g0, t)).collect())
}

/// Mean densities `n(t)` on a grid, without keeping the matrices.
pub fn density_trajectory(g0: &CorrelationMatrix, model: &OpenChainModel, t_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(t_grid)?;
    let p = Propagator::new(model)?;
    Ok(t_grid.iter().map(|&t| density(&p.at(g0, t))).collect())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("time grid entries must be finite and non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be ascending".into()));
    }
    Ok(())
}

/// `count` points from `t_min` to `t_max`, evenly spaced in `log t`.
pub fn log_grid(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![t_min],
        _ => {
            let (a, b) = (t_min.ln(), t_max.ln());
            (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub gamma: (f64, f64),
    pub dual_gamma: (f64, f64),
    pub times: Vec<f64>,
    pub density: Vec<f64>,
    pub dual_density: Vec<f64>,
    pub difference: Vec<f64>,
    /// Largest `|difference|` over the second half of the grid.
    pub late_time_max: f64,
}

impl DualityReport {
    /// Largest `|difference|` for grid times in `[t_lo, t_hi]`.
    pub fn max_difference_between(&self, t_lo: f64, t_hi: f64) -> f64 {
        self.times.iter().zip(&self.difference).filter(|(t, _)| (t_lo..=t_hi).contains(*t)).map(|(_, d)| d.abs()).fold(0.0, f64::max)
    }
}

/// Density trajectories from full occupation for loss on both ends at
/// `(γ_l, γ_r)` and at `(1/γ_l, 1/γ_r)`.
pub fn duality_report(t1: f64, t2: f64, gamma_left: f64, gamma_right: f64, n_cells: usize, t_grid: &[f64]) -> Result<DualityReport> {
    if !(gamma_left > 0.0 && gamma_right > 0.0) {
        return Err(Error::InvalidArgument("duality needs both dissipation strengths positive".into()));
    }
    let model = OpenChainModel::loss_loss(t1, t2, n_cells, gamma_left, gamma_right);
    duality_report_for(&model, t_grid)
}

/// Same as [`duality_report`] for any model with both boundaries dissipated,
/// keeping its loss/gain kinds.
pub fn duality_report_for(model: &OpenChainModel, t_grid: &[f64]) -> Result<DualityReport> {
    use crate::model::Side;
    let dual = model.with_inverted_strengths();
    let g0 = initial_fully_occupied(model.n_cells);
    let (a, b) = rayon::join(|| density_trajectory(&g0, model, t_grid), || density_trajectory(&g0, &dual, t_grid));
    let (a, b) = (a?, b?);
    let difference: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let half = t_grid.len() / 2;
    let late_time_max = difference[half..].iter().map(|d| d.abs()).fold(0.0, f64::max);
    Ok(DualityReport {
        gamma: (model.gamma(Side::Left), model.gamma(Side::Right)),
        dual_gamma: (dual.gamma(Side::Left), dual.gamma(Side::Right)),
        times: t_grid.to_vec(),
        density: a,
        dual_density: b,
        difference,
        late_time_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DissipatorKind, Side};
    use crate::thirdq;

    fn left_loss(t1: f64, n: usize, gamma: f64) -> OpenChainModel {
        OpenChainModel::new(t1, 1.0, n).with_dissipator(Side::Left, DissipatorKind::Loss, gamma)
    }

    #[test]
    fn initial_states() {
        let full = initial_fully_occupied(1);
        assert_eq!(full.gamma.shape(), (4, 4));
        assert_eq!(full.gamma[(0, 1)], 0.5);
        assert_eq!(full.gamma[(1, 0)], -0.5);
        assert_eq!(full.gamma.iter().filter(|x| **x != 0.0).count(), 4);
        for n in [1, 3, 17] {
            assert_eq!(density(&initial_fully_occupied(n)), 1.0);
            assert_eq!(density(&vacuum(n)), 0.0);
            assert!(site_density_profile(&initial_fully_occupied(n)).iter().all(|x| *x == 1.0));
        }
    }

    #[test]
    fn closed_chain_has_no_inhomogeneity() {
        let m = build_dynamics_matrices(&OpenChainModel::new(0.7, 1.0, 3)).unwrap();
        assert!(m.y_bar.iter().all(|x| *x == 0.0));
        assert!(linalg::max_abs_real(&(&m.x_bar + m.x_bar.transpose())) < 1e-15);
    }

    #[test]
    fn gain_changes_only_the_inhomogeneity() {
        let ll = build_dynamics_matrices(&OpenChainModel::loss_loss(0.5, 1.0, 3, 0.4, 0.4)).unwrap();
        let lg = OpenChainModel::new(0.5, 1.0, 3)
            .with_dissipator(Side::Left, DissipatorKind::Loss, 0.4)
            .with_dissipator(Side::Right, DissipatorKind::Gain, 0.4);
        let lg = build_dynamics_matrices(&lg).unwrap();
        assert_eq!(ll.x_bar, lg.x_bar);
        assert!(linalg::max_abs_real(&(&ll.y_bar - &lg.y_bar)) > 0.1);
        assert!(linalg::max_abs_real(&(&ll.y_bar + ll.y_bar.transpose())) == 0.0);
    }

    #[test]
    fn dynamics_spectrum_is_i_times_rapidities() {
        let model = OpenChainModel::loss_loss(0.1, 1.0, 6, 0.2, 0.2);
        let m = build_dynamics_matrices(&model).unwrap();
        let x_eigs = linalg::eigenvalues(&linalg::to_complex(&m.x_bar), &|| "X̄".into()).unwrap();
        let rap: Vec<C64> = thirdq::rapidity_spectrum(&model).unwrap().values().iter().map(|e| I * e).collect();
        assert!(linalg::pairing_distance(&x_eigs, &rap) < 1e-10);
        assert!(x_eigs.iter().all(|z| z.re <= 1e-12));
    }

    #[test]
    fn loss_empties_the_chain() {
        for model in [OpenChainModel::loss_loss(0.5, 1.0, 4, 0.3, 0.6), left_loss(2.0, 6, 1.0)] {
            let s = steady_state(&model).unwrap();
            assert!(s.residual < STEADY_RESIDUAL_TOL);
            assert!(density(&s.gamma).abs() < 1e-10, "{}", density(&s.gamma));
        }
    }

    #[test]
    fn kronecker_and_eigen_agree() {
        let model = OpenChainModel::new(0.8, 1.0, 3)
            .with_dissipator(Side::Left, DissipatorKind::Loss, 0.5)
            .with_dissipator(Side::Right, DissipatorKind::Gain, 0.9);
        let mats = build_dynamics_matrices(&model).unwrap();
        let direct = kronecker_lyapunov(&mats).unwrap();
        let eigen = steady_state(&model).unwrap();
        assert_eq!(eigen.method, SteadyStateMethod::Eigen);
        assert!(linalg::max_abs_real(&(direct - &eigen.gamma.gamma)) < 1e-10);
    }

    #[test]
    fn closed_chain_steady_state_is_an_error() {
        let err = steady_state(&OpenChainModel::new(0.5, 1.0, 2)).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
        // t1 = 0 decouples the far sites: an exact zero mode.
        let err = steady_state(&left_loss(0.0, 2, 1.0)).unwrap_err();
        assert!(matches!(err, Error::IllConditionedSteadyState { .. }), "{err}");
    }

    #[test]
    fn evolve_is_exact_at_zero_and_relaxes() {
        let model = left_loss(2.0, 4, 1.0);
        let g0 = initial_fully_occupied(4);
        let traj = evolve(&g0, &model, &[0.0, 1.0, 1e4]).unwrap();
        assert_eq!(traj[0].gamma, g0.gamma);
        let s = steady_state(&model).unwrap();
        assert!(linalg::max_abs_real(&(&traj[2].gamma - &s.gamma.gamma)) < 1e-6);
    }

    #[test]
    fn doubling_path_matches_eigen_path() {
        let model = OpenChainModel::new(0.6, 1.0, 3)
            .with_dissipator(Side::Left, DissipatorKind::Gain, 0.7)
            .with_dissipator(Side::Right, DissipatorKind::Loss, 0.3);
        let p = Propagator::new(&model).unwrap();
        assert_eq!(p.method(), PropagatorMethod::Eigen);
        let g0 = initial_fully_occupied(3);
        for t in [0.3, 2.0, 40.0, 3000.0] {
            let a = p.at(&g0, t).gamma;
            let b = p.at_doubling(&g0.gamma, t);
            assert!(linalg::max_abs_real(&(&a - &b)) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn grid_validation() {
        let model = left_loss(1.0, 2, 1.0);
        let g0 = initial_fully_occupied(2);
        assert!(evolve(&g0, &model, &[1.0, 0.5]).is_err());
        assert!(evolve(&g0, &model, &[-1.0]).is_err());
        let g = log_grid(0.1, 1000.0, 5);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[4] - 1000.0).abs() < 1e-9 && (g[2] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn duality_needs_positive_strengths() {
        assert!(duality_report(0.1, 1.0, 0.0, 1.0, 4, &[1.0]).is_err());
    }
}
