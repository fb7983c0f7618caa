//! Brute-force reference: the full Lindblad superoperator on Fock space.
//!
//! Fock basis states are bit strings with bit `j` holding the occupation of
//! site `j + 1`. Fermionic signs follow a Jordan-Wigner string ordered from
//! site 1 to site `2N`:
//! `c_j |n⟩ = (−1)^{n_1 + … + n_{j−1}} |n − e_j⟩` when `n_j = 1`.
//!
//! Density operators are vectorized row-major, `vec(ρ)[a·D + b] = ρ_ab`, so
//! `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`. The generator is
//! `L[ρ] = −i[H, ρ] + Σ_μ (2 L_μ ρ L_μ† − {L_μ† L_μ, ρ})`.
//!
//! Memory grows as `16^N`; the cap `n_cells <= 3` keeps the superoperator at
//! `4096 × 4096`.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, RMat, C64, I};
use crate::model::{DissipatorKind, MajoranaConvention, OpenChainModel};

pub const MAX_CELLS: usize = 3;

/// Jump-term coefficient of the generator.
pub const JUMP_FACTOR: f64 = 2.0;

/// Single-particle operators on the `2^{2N}`-dimensional Fock space.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub n_sites: usize,
    pub dim: usize,
    annihilators: Vec<CMat>,
}

impl FockSpace {
    pub fn new(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let annihilators = (0..n_sites)
            .map(|j| {
                let mut c = CMat::zeros(dim, dim);
                for state in 0..dim {
                    if state >> j & 1 == 1 {
                        let below = (state & ((1 << j) - 1)).count_ones();
                        let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                        c[(state ^ (1 << j), state)] = C64::new(sign, 0.0);
                    }
                }
                c
            })
            .collect();
        FockSpace { n_sites, dim, annihilators }
    }

    pub fn annihilator(&self, site: usize) -> &CMat {
        &self.annihilators[site]
    }

    pub fn creator(&self, site: usize) -> CMat {
        self.annihilators[site].adjoint()
    }

    pub fn number(&self, site: usize) -> CMat {
        self.creator(site) * &self.annihilators[site]
    }

    /// `Σ_ij h_ij c_i† c_j`
    pub fn hamiltonian(&self, h: &RMat) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for i in 0..self.n_sites {
            let ci_dag = self.creator(i);
            for j in 0..self.n_sites {
                if h[(i, j)] != 0.0 {
                    out += &ci_dag * &self.annihilators[j] * C64::new(h[(i, j)], 0.0);
                }
            }
        }
        out
    }

    /// Majorana operators in the requested convention, in index order.
    pub fn majoranas(&self, conv: MajoranaConvention) -> Vec<CMat> {
        let mut out = Vec::with_capacity(2 * self.n_sites);
        for j in 0..self.n_sites {
            let c = &self.annihilators[j];
            let cd = c.adjoint();
            match conv {
                MajoranaConvention::Paired => {
                    out.push(c + &cd);
                    out.push((c - &cd) * I);
                }
                MajoranaConvention::Normalized => {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    out.push((c - &cd) * (I * s));
                    out.push((c + &cd) * C64::new(s, 0.0));
                }
            }
        }
        out
    }

    /// The operator `Σ_ab K_ab w_a w_b`.
    pub fn quadratic_form(&self, kernel: &CMat, conv: MajoranaConvention) -> CMat {
        let w = self.majoranas(conv);
        let mut out = CMat::zeros(self.dim, self.dim);
        for a in 0..w.len() {
            for b in 0..w.len() {
                if kernel[(a, b)].norm() > 0.0 {
                    out += &w[a] * &w[b] * kernel[(a, b)];
                }
            }
        }
        out
    }

    /// `|1…1⟩⟨1…1|`
    pub fn fully_occupied(&self) -> CMat {
        let mut rho = CMat::zeros(self.dim, self.dim);
        rho[(self.dim - 1, self.dim - 1)] = C64::new(1.0, 0.0);
        rho
    }

    /// Site occupations `Tr[c_x† c_x ρ]`; the basis is diagonal in occupation.
    pub fn site_densities(&self, rho: &CMat) -> Vec<f64> {
        (0..self.n_sites)
            .map(|x| (0..self.dim).filter(|s| s >> x & 1 == 1).map(|s| rho[(s, s)].re).sum())
            .collect()
    }

    /// `Γ_ab = i Tr[ρ w̄_a w̄_b] − (i/2) δ_ab` in the normalized convention.
    pub fn correlation_matrix(&self, rho: &CMat) -> RMat {
        let w = self.majoranas(MajoranaConvention::Normalized);
        let n = w.len();
        let mut gamma = RMat::zeros(n, n);
        for a in 0..n {
            let rho_wa = rho * &w[a];
            for b in 0..n {
                if a == b {
                    continue;
                }
                let tr = (&rho_wa * &w[b]).trace();
                gamma[(a, b)] = (I * tr).re;
            }
        }
        gamma
    }
}

/// Vectorized Lindblad generator (`D² × D²`).
#[derive(Debug, Clone)]
pub struct SuperoperatorMatrix {
    pub l_mat: CMat,
    pub dim: usize,
    pub fock: FockSpace,
}

pub fn full_liouvillian_matrix(model: &OpenChainModel) -> Result<SuperoperatorMatrix> {
    full_liouvillian_matrix_with_jump_factor(model, JUMP_FACTOR)
}

/// Same as [`full_liouvillian_matrix`] with a configurable jump coefficient;
/// anything other than [`JUMP_FACTOR`] breaks trace preservation and exists
/// for mutation testing.
pub fn full_liouvillian_matrix_with_jump_factor(model: &OpenChainModel, jump_factor: f64) -> Result<SuperoperatorMatrix> {
    model.ensure_valid()?;
    if model.n_cells > MAX_CELLS {
        return Err(Error::OracleCapExceeded { n_cells: model.n_cells, cap: MAX_CELLS });
    }
    let fock = FockSpace::new(model.n_sites());
    let d = fock.dim;
    let id = CMat::identity(d, d);
    let h = fock.hamiltonian(&model.site_hopping_matrix());

    let mut l_mat = (h.kronecker(&id) - id.kronecker(&h.transpose())) * (-I);
    for diss in &model.dissipators {
        if diss.strength == 0.0 {
            continue;
        }
        let site = model.boundary_site(diss.side);
        let amp = C64::new(diss.strength.sqrt(), 0.0);
        let jump = match diss.kind {
            DissipatorKind::Loss => fock.annihilator(site).clone() * amp,
            DissipatorKind::Gain => fock.creator(site) * amp,
        };
        let ldl = jump.adjoint() * &jump;
        l_mat += jump.kronecker(&jump.conjugate()) * C64::new(jump_factor, 0.0);
        l_mat -= ldl.kronecker(&id);
        l_mat -= id.kronecker(&ldl.transpose());
    }
    Ok(SuperoperatorMatrix { l_mat, dim: d, fock })
}

impl SuperoperatorMatrix {
    pub fn vectorize(&self, rho: &CMat) -> CVec {
        CVec::from_iterator(self.dim * self.dim, rho.transpose().iter().copied())
    }

    pub fn unvectorize(&self, v: &CVec) -> CMat {
        CMat::from_row_slice(self.dim, self.dim, v.as_slice())
    }

    /// Row vector `vec(I)ᵀ`; the trace functional.
    pub fn trace_functional(&self) -> CVec {
        self.vectorize(&CMat::identity(self.dim, self.dim))
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        self.unvectorize(&(&self.l_mat * self.vectorize(rho)))
    }
}

/// All `D²` eigenvalues of the generator.
pub fn ed_spectrum(s: &SuperoperatorMatrix) -> Result<Vec<C64>> {
    linalg::eigenvalues(&s.l_mat, &|| {
        format!("{0}x{0} Liouvillian (max |L_ij| = {1:e})", s.l_mat.nrows(), linalg::max_abs(&s.l_mat))
    })
}

/// Density operators along a time grid.
#[derive(Debug, Clone)]
pub struct EdTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMat>,
    pub fock: FockSpace,
}

impl EdTrajectory {
    /// `n(t) = (1/2N) Σ_x Tr[c_x† c_x ρ(t)]`
    pub fn densities(&self) -> Vec<f64> {
        self.profiles().into_iter().map(|p| p.iter().sum::<f64>() / p.len() as f64).collect()
    }

    pub fn profiles(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|rho| self.fock.site_densities(rho)).collect()
    }

    pub fn traces(&self) -> Vec<C64> {
        self.states.iter().map(|rho| rho.trace()).collect()
    }
}

/// Eigenbasis condition number above which [`ed_evolve`] exponentiates `L t` directly.
pub const ED_COND_LIMIT: f64 = 1e8;

/// Propagates `vec(ρ0)` by `exp(L t)` at each time of the grid.
///
/// Uses `L = V Λ V⁻¹` when the eigenbasis is well conditioned and the dense
/// matrix exponential otherwise.
pub fn ed_evolve(rho0: &CVec, s: &SuperoperatorMatrix, t_grid: &[f64]) -> Result<EdTrajectory> {
    if rho0.len() != s.dim * s.dim {
        return Err(Error::InvalidArgument(format!(
            "initial state has length {}, expected {}",
            rho0.len(),
            s.dim * s.dim
        )));
    }
    let eig = linalg::eig(&s.l_mat, &|| format!("{0}x{0} Liouvillian", s.l_mat.nrows()))?;
    let inverse = eig.vectors.clone().lu().try_inverse();
    let diagonal = inverse.and_then(|v_inv| {
        let cond = v_inv.norm() * eig.vectors.norm();
        (cond < ED_COND_LIMIT).then(|| v_inv * rho0)
    });
    let states = t_grid
        .iter()
        .map(|&t| {
            let v = match &diagonal {
                Some(c) => {
                    let scaled = CVec::from_fn(c.len(), |k, _| c[k] * (eig.values[k] * t).exp());
                    &eig.vectors * scaled
                }
                None => (&s.l_mat * C64::new(t, 0.0)).exp() * rho0,
            };
            s.unvectorize(&v)
        })
        .collect();
    Ok(EdTrajectory { times: t_grid.to_vec(), states, fock: s.fock.clone() })
}

/// Unit-trace solution of `L[ρ] = 0`, found by replacing one row of `L` with
/// the trace functional.
pub fn ed_steady_state(s: &SuperoperatorMatrix) -> Result<CMat> {
    let n = s.l_mat.nrows();
    let mut a = s.l_mat.clone();
    let tr = s.trace_functional();
    for j in 0..n {
        a[(0, j)] = tr[j];
    }
    let mut rhs = CVec::zeros(n);
    rhs[0] = C64::new(1.0, 0.0);
    let v = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("steady state is not unique (singular constrained generator)".into()))?;
    Ok(s.unvectorize(&v))
}

/// Number of generator eigenvalues within `tol` of zero.
pub fn null_space_dimension(spectrum: &[C64], tol: f64) -> usize {
    spectrum.iter().filter(|z| z.norm() < tol).count()
}

/// Smallest eigenvalue of the Hermitian part of `rho`.
pub fn min_eigenvalue(rho: &CMat) -> f64 {
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.iter().fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// Default tolerances of [`validate_against_ed`].
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const DYNAMICS_TOL: f64 = 1e-6;
pub const STEADY_TOL: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl ValidationCheck {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        ValidationCheck { name: name.into(), value, tolerance, pass: value <= tolerance, note: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub model: OpenChainModel,
    pub jump_factor: f64,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// Replaces every per-check tolerance when set.
    pub tol: Option<f64>,
    /// Jump coefficient of the ED generator; only [`JUMP_FACTOR`] is physical.
    pub jump_factor: f64,
    pub times: Vec<f64>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { tol: None, jump_factor: JUMP_FACTOR, times: crate::dynamics::log_grid(0.05, 50.0, 12) }
    }
}

/// Compares the third-quantization spectrum, correlation-matrix dynamics and
/// Lyapunov steady state of `model` against the full superoperator.
///
/// The dynamics start from the fully occupied chain.
pub fn validate_against_ed(model: &OpenChainModel, opts: &ValidationOptions) -> Result<ValidationReport> {
    let tol = |default: f64| opts.tol.unwrap_or(default);
    let s = full_liouvillian_matrix_with_jump_factor(model, opts.jump_factor)?;
    let mut checks = Vec::new();

    let ed = ed_spectrum(&s)?;
    let rap = crate::thirdq::rapidity_spectrum(model)?;
    let lspec = crate::thirdq::liouvillian_spectrum(&rap, None)?;
    let predicted = lspec.expanded_values();
    checks.push(ValidationCheck::new("spectrum_pairing", linalg::pairing_distance(&predicted, &ed), tol(SPECTRUM_TOL)));
    let conj: Vec<C64> = ed.iter().map(|z| z.conj()).collect();
    checks.push(ValidationCheck::new("spectrum_conjugation", linalg::pairing_distance(&ed, &conj), tol(SPECTRUM_TOL)));
    let max_re = ed.iter().fold(f64::NEG_INFINITY, |acc, z| acc.max(z.re));
    checks.push(ValidationCheck::new("spectrum_max_real_part", max_re.max(0.0), tol(TRACE_TOL)));
    if !model.is_dissipative() {
        let re = ed.iter().fold(0.0f64, |acc, z| acc.max(z.re.abs()));
        checks.push(ValidationCheck::new("closed_spectrum_imaginary", re, tol(TRACE_TOL)));
    }

    let rho0 = s.vectorize(&s.fock.fully_occupied());
    let traj = ed_evolve(&rho0, &s, &opts.times)?;
    let trace_err = traj.traces().iter().fold(0.0f64, |acc, tr| acc.max((tr - C64::new(1.0, 0.0)).norm()));
    checks.push(ValidationCheck::new("ed_trace", trace_err, tol(TRACE_TOL)));
    let g0 = crate::dynamics::initial_fully_occupied(model.n_cells);
    let gammas = crate::dynamics::evolve(&g0, model, &opts.times)?;
    let mut dyn_err = 0.0f64;
    for (g, prof) in gammas.iter().zip(traj.profiles()) {
        for (a, b) in g.site_density_profile().iter().zip(&prof) {
            dyn_err = dyn_err.max((a - b).abs());
        }
    }
    checks.push(ValidationCheck::new("dynamics_site_densities", dyn_err, tol(DYNAMICS_TOL)));

    if model.is_dissipative() {
        let check = match (crate::dynamics::steady_state(model), ed_steady_state(&s)) {
            (Ok(ss), Ok(rho)) => {
                let g_ed = s.fock.correlation_matrix(&rho);
                ValidationCheck::new("steady_state_gamma", linalg::max_abs_real(&(&ss.gamma.gamma - g_ed)), tol(STEADY_TOL))
            }
            // a degenerate stationary manifold has no unique state to compare
            (Err(e), _) | (_, Err(e)) => ValidationCheck {
                name: "steady_state_gamma".into(),
                value: f64::NAN,
                tolerance: tol(STEADY_TOL),
                pass: true,
                note: Some(format!("skipped: {e}")),
            },
        };
        checks.push(check);
    }
    Ok(ValidationReport { model: model.clone(), jump_factor: opts.jump_factor, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_majorana_hamiltonian, Side};

    fn loss_loss(n: usize, t1: f64, gamma: f64) -> OpenChainModel {
        OpenChainModel::loss_loss(t1, 1.0, n, gamma, gamma)
    }

    #[test]
    fn validation_passes_and_catches_wrong_jump_factor() {
        let m = OpenChainModel::loss_loss(0.5, 1.0, 1, 0.2, 0.7);
        let ok = validate_against_ed(&m, &ValidationOptions::default()).unwrap();
        assert!(ok.all_pass(), "{:?}", ok.checks);
        // pure loss: the jump term only lowers the particle number, so the spectrum survives the mutation
        let bad = validate_against_ed(&m, &ValidationOptions { jump_factor: 1.0, ..Default::default() }).unwrap();
        assert!(!bad.all_pass());
        assert!(bad.checks.iter().any(|c| c.name == "ed_trace" && !c.pass));

        let lg = m.clone().with_kinds_swapped();
        let lg = OpenChainModel { dissipators: vec![m.dissipators[0], lg.dissipators[1]], ..m };
        assert!(validate_against_ed(&lg, &ValidationOptions::default()).unwrap().all_pass());
        let bad = validate_against_ed(&lg, &ValidationOptions { jump_factor: 1.0, ..Default::default() }).unwrap();
        let spec = bad.checks.iter().find(|c| c.name == "spectrum_pairing").unwrap();
        assert!(!spec.pass && spec.value > 1e-3, "{spec:?}");
    }

    #[test]
    fn canonical_anticommutation() {
        let fock = FockSpace::new(3);
        for i in 0..3 {
            for j in 0..3 {
                let ci = fock.annihilator(i);
                let cj_dag = fock.creator(j);
                let anti = ci * &cj_dag + &cj_dag * ci;
                let expected = if i == j { CMat::identity(8, 8) } else { CMat::zeros(8, 8) };
                assert!(linalg::max_abs(&(anti - expected)) < 1e-15);
                let cc = ci * fock.annihilator(j) + fock.annihilator(j) * ci;
                assert!(linalg::max_abs(&cc) < 1e-15);
            }
        }
    }

    #[test]
    fn majorana_kernel_reproduces_many_body_hamiltonian() {
        let model = OpenChainModel::new(0.5, 1.0, 2);
        let fock = FockSpace::new(4);
        let direct = fock.hamiltonian(&model.site_hopping_matrix());
        let kernel = build_majorana_hamiltonian(&model).unwrap();
        let via_majorana = fock.quadratic_form(&kernel.h, MajoranaConvention::Paired);
        let shift = (&direct - &via_majorana).trace() / C64::new(16.0, 0.0);
        let diff = direct - via_majorana - CMat::identity(16, 16) * shift;
        assert!(linalg::max_abs(&diff) < 1e-13);
    }

    #[test]
    fn closed_system_spectrum_is_energy_differences() {
        let model = loss_loss(1, 0.7, 0.0);
        let s = full_liouvillian_matrix(&model).unwrap();
        let spectrum = ed_spectrum(&s).unwrap();
        assert_eq!(spectrum.len(), 16);
        assert!(spectrum.iter().all(|z| z.re.abs() < 1e-12));
        // Many-body energies of a single bond: 0, ±0.7, 0.
        let energies = [0.0, 0.7, -0.7, 0.0];
        let expected: Vec<C64> = energies
            .iter()
            .flat_map(|&em| energies.iter().map(move |&en| C64::new(0.0, -(em - en))))
            .collect();
        assert!(linalg::pairing_distance(&spectrum, &expected) < 1e-12);
    }

    #[test]
    fn trace_functional_is_left_null_vector() {
        let model = OpenChainModel::new(0.5, 1.0, 2)
            .with_dissipator(Side::Left, DissipatorKind::Loss, 0.3)
            .with_dissipator(Side::Right, DissipatorKind::Gain, 0.8);
        let s = full_liouvillian_matrix(&model).unwrap();
        let left = s.trace_functional().transpose() * &s.l_mat;
        assert!(left.iter().all(|z| z.norm() < 1e-12));
        let out = s.apply(&CMat::identity(16, 16));
        assert!(out.trace().norm() < 1e-12);
    }

    #[test]
    fn wrong_jump_factor_breaks_trace_preservation() {
        let model = loss_loss(1, 0.5, 0.2);
        let s = full_liouvillian_matrix_with_jump_factor(&model, 1.0).unwrap();
        let left = s.trace_functional().transpose() * &s.l_mat;
        assert!(left.iter().any(|z| z.norm() > 1e-3));
    }

    #[test]
    fn unique_steady_state_for_generic_dissipation() {
        let s = full_liouvillian_matrix(&loss_loss(2, 0.5, 0.2)).unwrap();
        let spectrum = ed_spectrum(&s).unwrap();
        assert_eq!(null_space_dimension(&spectrum, 1e-9), 1);
        assert!(spectrum.iter().all(|z| z.re < 1e-10));
        let conj: Vec<C64> = spectrum.iter().map(|z| z.conj()).collect();
        assert!(linalg::pairing_distance(&spectrum, &conj) < 1e-10);
    }

    #[test]
    fn decoupled_cell_has_degenerate_steady_states() {
        // t1 = 0 with loss on site 1 only: site 2N = 4 carries a conserved
        // occupation, so the null space is at least two-dimensional.
        let model = OpenChainModel::new(0.0, 1.0, 2).with_dissipator(Side::Left, DissipatorKind::Loss, 0.5);
        let spectrum = ed_spectrum(&full_liouvillian_matrix(&model).unwrap()).unwrap();
        assert!(null_space_dimension(&spectrum, 1e-9) > 1);
    }

    #[test]
    fn pure_loss_steady_state_is_vacuum() {
        let s = full_liouvillian_matrix(&loss_loss(2, 0.5, 0.4)).unwrap();
        let rho = ed_steady_state(&s).unwrap();
        assert!((rho[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(s.fock.site_densities(&rho).iter().all(|n| n.abs() < 1e-10));
    }

    #[test]
    fn evolution_preserves_trace_hermiticity_and_positivity() {
        let model = OpenChainModel::new(0.5, 1.0, 2)
            .with_dissipator(Side::Left, DissipatorKind::Loss, 0.2)
            .with_dissipator(Side::Right, DissipatorKind::Gain, 0.2);
        let s = full_liouvillian_matrix(&model).unwrap();
        let rho0 = s.vectorize(&s.fock.fully_occupied());
        let traj = ed_evolve(&rho0, &s, &[0.0, 0.5, 1.0, 5.0, 50.0]).unwrap();
        assert!((traj.densities()[0] - 1.0).abs() < 1e-15);
        for (rho, tr) in traj.states.iter().zip(traj.traces()) {
            assert!((tr - C64::new(1.0, 0.0)).norm() < 1e-10);
            assert!(linalg::max_abs(&(rho - rho.adjoint())) < 1e-10);
            assert!(min_eigenvalue(rho) > -1e-8);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = full_liouvillian_matrix(&loss_loss(4, 0.5, 0.2)).unwrap_err();
        assert!(matches!(err, Error::OracleCapExceeded { n_cells: 4, .. }));
    }

    #[test]
    fn full_state_correlation_matrix() {
        let fock = FockSpace::new(2);
        let gamma = fock.correlation_matrix(&fock.fully_occupied());
        assert!((gamma[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((gamma[(1, 0)] + 0.5).abs() < 1e-15);
        assert!((gamma[(2, 3)] - 0.5).abs() < 1e-15);
        assert!(gamma[(0, 2)].abs() < 1e-15);
    }
}
