//! The boundary-dissipated SSH chain and its Majorana-basis matrices.
//!
//! Sites are numbered `1..=2N`; site `2j-1` is sublattice A and site `2j`
//! is sublattice B of unit cell `j`. The left dissipator acts on site 1 and
//! the right dissipator on site `2N`.
//!
//! Two Majorana conventions are used:
//!
//! * [`MajoranaConvention::Paired`]: `w_{2j-1} = c_j + c_j†`,
//!   `w_{2j} = i(c_j − c_j†)`, with `{w_a, w_b} = 2δ_ab`. All builders in
//!   this module and in `thirdq` use it.
//! * [`MajoranaConvention::Normalized`]: `w̄_{2j-1} = i(c_j − c_j†)/√2`,
//!   `w̄_{2j} = (c_j + c_j†)/√2`, with `{w̄_a, w̄_b} = δ_ab`. Used only by the
//!   correlation-matrix dynamics. It relates to the paired convention by
//!   `w̄_{2j-1} = w_{2j}/√2` and `w̄_{2j} = w_{2j-1}/√2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DissipatorKind {
    /// `L = √γ c`
    Loss,
    /// `L = √γ c†`
    Gain,
}

impl DissipatorKind {
    pub fn swapped(self) -> DissipatorKind {
        match self {
            DissipatorKind::Loss => DissipatorKind::Gain,
            DissipatorKind::Gain => DissipatorKind::Loss,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipatorSpec {
    pub side: Side,
    pub kind: DissipatorKind,
    pub strength: f64,
}

impl DissipatorSpec {
    pub fn new(side: Side, kind: DissipatorKind, strength: f64) -> Self {
        DissipatorSpec { side, kind, strength }
    }
}

/// SSH chain with `n_cells` unit cells and at most one dissipator per boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenChainModel {
    pub t1: f64,
    pub t2: f64,
    pub n_cells: usize,
    pub dissipators: Vec<DissipatorSpec>,
}

/// Outcome of [`validate_model`]. An empty message list means the model is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub messages: Vec<String>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.messages.is_empty()
    }
}

impl OpenChainModel {
    pub fn new(t1: f64, t2: f64, n_cells: usize) -> Self {
        OpenChainModel { t1, t2, n_cells, dissipators: Vec::new() }
    }

    pub fn with_dissipator(mut self, side: Side, kind: DissipatorKind, strength: f64) -> Self {
        self.dissipators.push(DissipatorSpec::new(side, kind, strength));
        self
    }

    /// Loss on both boundaries.
    pub fn loss_loss(t1: f64, t2: f64, n_cells: usize, gamma_left: f64, gamma_right: f64) -> Self {
        Self::new(t1, t2, n_cells)
            .with_dissipator(Side::Left, DissipatorKind::Loss, gamma_left)
            .with_dissipator(Side::Right, DissipatorKind::Loss, gamma_right)
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_cells
    }

    pub fn n_majoranas(&self) -> usize {
        4 * self.n_cells
    }

    /// 0-based index of the site a boundary dissipator acts on.
    pub fn boundary_site(&self, side: Side) -> usize {
        match side {
            Side::Left => 0,
            Side::Right => self.n_sites() - 1,
        }
    }

    pub fn dissipator(&self, side: Side) -> Option<&DissipatorSpec> {
        self.dissipators.iter().find(|d| d.side == side)
    }

    /// Dissipation strength on `side`, zero when absent.
    pub fn gamma(&self, side: Side) -> f64 {
        self.dissipator(side).map_or(0.0, |d| d.strength)
    }

    pub fn is_dissipative(&self) -> bool {
        self.dissipators.iter().any(|d| d.strength > 0.0)
    }

    /// The same chain with every dissipator kind swapped (loss ↔ gain).
    pub fn with_kinds_swapped(&self) -> Self {
        let mut m = self.clone();
        for d in &mut m.dissipators {
            d.kind = d.kind.swapped();
        }
        m
    }

    /// Mirror image under the site reflection `x → 2N + 1 − x`.
    ///
    /// The hopping pattern is reflection symmetric, so only the dissipators move.
    pub fn reflected(&self) -> Self {
        let mut m = self.clone();
        for d in &mut m.dissipators {
            d.side = d.side.opposite();
        }
        m
    }

    /// The same chain with every nonzero strength replaced by its inverse.
    pub fn with_inverted_strengths(&self) -> Self {
        let mut m = self.clone();
        for d in &mut m.dissipators {
            if d.strength > 0.0 {
                d.strength = 1.0 / d.strength;
            }
        }
        m
    }

    /// The `2N × 2N` real symmetric single-particle hopping matrix.
    pub fn site_hopping_matrix(&self) -> RMat {
        let n = self.n_sites();
        let mut h = RMat::zeros(n, n);
        for x in 0..n.saturating_sub(1) {
            let t = if x % 2 == 0 { self.t1 } else { self.t2 };
            h[(x, x + 1)] = t;
            h[(x + 1, x)] = t;
        }
        h
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let diag = validate_model(self);
        if diag.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidModel(diag.messages))
        }
    }
}

pub fn validate_model(model: &OpenChainModel) -> Diagnostics {
    let mut messages = Vec::new();
    if model.n_cells < 1 {
        messages.push("n_cells must be at least 1".to_string());
    }
    if model.t2 <= 0.0 || !model.t2.is_finite() {
        messages.push("t2 must be positive".to_string());
    }
    if model.t1 < 0.0 || !model.t1.is_finite() {
        messages.push("t1 must be non-negative".to_string());
    }
    for side in [Side::Left, Side::Right] {
        if model.dissipators.iter().filter(|d| d.side == side).count() > 1 {
            messages.push(format!("duplicate boundary: more than one dissipator on the {side:?} side").to_lowercase());
        }
    }
    for d in &model.dissipators {
        if d.strength < 0.0 || !d.strength.is_finite() {
            messages.push(format!("dissipation strength must be non-negative and finite, got {}", d.strength));
        }
    }
    Diagnostics { messages }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajoranaConvention {
    Paired,
    Normalized,
}

impl MajoranaConvention {
    /// Coefficients of `c_site` in the Majorana basis: `c = Σ_k u_k w_k`.
    pub(crate) fn annihilator(self, site: usize) -> [(usize, C64); 2] {
        let (a, b) = (2 * site, 2 * site + 1);
        match self {
            // c = (w_{2j-1} − i w_{2j}) / 2
            MajoranaConvention::Paired => [(a, C64::new(0.5, 0.0)), (b, C64::new(0.0, -0.5))],
            // c = (w̄_{2j} − i w̄_{2j-1}) / √2
            MajoranaConvention::Normalized => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                [(a, C64::new(0.0, -s)), (b, C64::new(s, 0.0))]
            }
        }
    }

    /// Majorana coefficients of a linear jump operator on `site`.
    pub(crate) fn jump_vector(self, n_majoranas: usize, site: usize, kind: DissipatorKind, strength: f64) -> Vec<C64> {
        let mut l = vec![C64::new(0.0, 0.0); n_majoranas];
        let amp = strength.sqrt();
        for (k, u) in self.annihilator(site) {
            l[k] = match kind {
                DissipatorKind::Loss => u * amp,
                DissipatorKind::Gain => u.conj() * amp,
            };
        }
        l
    }
}

/// Antisymmetric kernel `K` with `Σ_ij h_ij c_i† c_j = Σ_ab K_ab w_a w_b + const`.
pub(crate) fn quadratic_kernel(h: &RMat, conv: MajoranaConvention) -> CMat {
    let n_sites = h.nrows();
    let dim = 2 * n_sites;
    let mut k = CMat::zeros(dim, dim);
    for i in 0..n_sites {
        for j in 0..n_sites {
            let hij = h[(i, j)];
            if hij == 0.0 {
                continue;
            }
            for (a, ua) in conv.annihilator(i) {
                for (b, ub) in conv.annihilator(j) {
                    k[(a, b)] += ua.conj() * ub * hij;
                }
            }
        }
    }
    // The symmetric part only contributes a constant via {w_a, w_b} ∝ δ_ab.
    (&k - k.transpose()) * C64::new(0.5, 0.0)
}

/// Majorana-basis Hamiltonian kernel `H` (`4N × 4N`, antisymmetric).
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaHamiltonian {
    pub h: CMat,
}

impl MajoranaHamiltonian {
    /// Recovers the site-basis matrix `h` from `H = w·Hw` in the paired convention.
    ///
    /// With `w_{2j-1} = c_j + c_j†` and `w_{2j} = i c_j − i c_j†`, the `c_i† c_j`
    /// coefficient of `Σ H_ab w_a w_b` is `2 (Bᵀ H A)_ij` where `A`, `B` hold the
    /// `c` and `c†` coefficients of each `w_a`.
    pub fn site_matrix(&self) -> CMat {
        let dim = self.h.nrows();
        let n_sites = dim / 2;
        let mut a = CMat::zeros(dim, n_sites);
        let mut b = CMat::zeros(dim, n_sites);
        for j in 0..n_sites {
            a[(2 * j, j)] = C64::new(1.0, 0.0);
            b[(2 * j, j)] = C64::new(1.0, 0.0);
            a[(2 * j + 1, j)] = I;
            b[(2 * j + 1, j)] = -I;
        }
        b.transpose() * &self.h * a * C64::new(2.0, 0.0)
    }
}

pub fn build_majorana_hamiltonian(model: &OpenChainModel) -> Result<MajoranaHamiltonian> {
    model.ensure_valid()?;
    Ok(MajoranaHamiltonian { h: quadratic_kernel(&model.site_hopping_matrix(), MajoranaConvention::Paired) })
}

/// Bath matrix `M` of the boundary dissipators in the paired convention.
///
/// A loss (gain) dissipator of strength `γ` on a boundary site contributes the
/// block `G(γ) = [[γ/2, ∓iγ/2], [±iγ/2, γ/2]]` on that site's two Majoranas.
/// In terms of the jump vectors `L_μ = l_μ·w` this is `M_ab = 2 Σ_μ l*_{μ,a} l_{μ,b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathMatrix {
    pub m: CMat,
    pub m_r: RMat,
    pub m_i: RMat,
}

pub fn build_bath_matrix(model: &OpenChainModel) -> Result<BathMatrix> {
    model.ensure_valid()?;
    let dim = model.n_majoranas();
    let mut m = CMat::zeros(dim, dim);
    for d in &model.dissipators {
        let site = model.boundary_site(d.side);
        let l = MajoranaConvention::Paired.jump_vector(dim, site, d.kind, d.strength);
        for a in 0..dim {
            for b in 0..dim {
                m[(a, b)] += l[a].conj() * l[b] * 2.0;
            }
        }
    }
    let m_r = m.map(|z| z.re);
    let m_i = m.map(|z| z.im);
    Ok(BathMatrix { m, m_r, m_i })
}
