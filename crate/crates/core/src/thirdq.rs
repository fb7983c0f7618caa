//! Third-quantization spectra of the boundary-dissipated chain.
//!
//! The shape matrix `X = −2iH + M_R` (with `M` normalized as in
//! [`crate::model::BathMatrix`]) is similar to `−(i/2) diag(P(t1, t2), P(−t1, −t2))`,
//! where `P` is the `2N × 2N` tridiagonal matrix with hoppings `t1, t2, …, t1`
//! and imaginary boundary potentials `iγ_l`, `iγ_r`. Both blocks share one
//! spectrum, so every eigenvalue `E` of `P` is a rapidity of multiplicity two
//! and the Liouvillian spectrum is `{ i Σ_m v_m E_m : v_m ∈ {0, 1, 2} }`, with
//! each sum carrying weight `Π_m C(2, v_m)`.
//!
//! Eigenproblems are solved on `P`; `X` is kept as a cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, I};
use crate::model::{build_bath_matrix, build_majorana_hamiltonian, OpenChainModel, Side};

/// Full enumeration is allowed up to `3^12` sums (`N = 6`).
pub const DEFAULT_ENUMERATION_CAP: u128 = 531_441;

#[derive(Debug, Clone)]
pub struct ShapeMatrix {
    pub x: CMat,
}

pub fn build_shape_matrix(model: &OpenChainModel) -> Result<ShapeMatrix> {
    let h = build_majorana_hamiltonian(model)?;
    let bath = build_bath_matrix(model)?;
    let x = h.h * (-2.0 * I) + linalg::to_complex(&bath.m_r);
    Ok(ShapeMatrix { x })
}

/// Rapidities recovered from the eigenvalues `α` of `X` via `E = 2iα`.
pub fn rapidities_from_shape_matrix(model: &OpenChainModel) -> Result<Vec<C64>> {
    let x = build_shape_matrix(model)?;
    let alphas = linalg::eigenvalues(&x.x, &|| format!("shape matrix of {model:?}"))?;
    Ok(alphas.into_iter().map(|a| 2.0 * I * a).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedMatrix {
    #[serde(skip)]
    pub p: CMat,
    pub t1: f64,
    pub t2: f64,
    pub gamma_left: f64,
    pub gamma_right: f64,
}

pub fn build_reduced_matrix(t1: f64, t2: f64, gamma_left: f64, gamma_right: f64, n_cells: usize) -> Result<ReducedMatrix> {
    if n_cells < 1 {
        return Err(Error::InvalidArgument("n_cells must be at least 1".into()));
    }
    let n = 2 * n_cells;
    let mut p = CMat::zeros(n, n);
    for x in 0..n - 1 {
        let t = if x % 2 == 0 { t1 } else { t2 };
        p[(x, x + 1)] = C64::new(t, 0.0);
        p[(x + 1, x)] = C64::new(t, 0.0);
    }
    p[(0, 0)] += I * gamma_left;
    p[(n - 1, n - 1)] += I * gamma_right;
    Ok(ReducedMatrix { p, t1, t2, gamma_left, gamma_right })
}

impl ReducedMatrix {
    pub fn for_model(model: &OpenChainModel) -> Result<Self> {
        model.ensure_valid()?;
        build_reduced_matrix(model.t1, model.t2, model.gamma(Side::Left), model.gamma(Side::Right), model.n_cells)
    }

    fn context(&self) -> String {
        format!(
            "P(t1={}, t2={}, gamma_l={}, gamma_r={}, N={})",
            self.t1,
            self.t2,
            self.gamma_left,
            self.gamma_right,
            self.p.nrows() / 2
        )
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        linalg::eigenvalues(&self.p, &|| self.context())
    }
}

/// Largest distance in a modulus-sorted greedy pairing between the spectra
/// of `P(t1, t2, γ_l, γ_r)` and `P(−t1, −t2, γ_l, γ_r)`.
pub fn doubling_distance(t1: f64, t2: f64, gamma_left: f64, gamma_right: f64, n_cells: usize) -> Result<f64> {
    let plus = build_reduced_matrix(t1, t2, gamma_left, gamma_right, n_cells)?.eigenvalues()?;
    let minus = build_reduced_matrix(-t1, -t2, gamma_left, gamma_right, n_cells)?.eigenvalues()?;
    Ok(linalg::pairing_distance(&plus, &minus))
}

/// One eigenpair of `P`.
#[derive(Debug, Clone)]
pub struct RapidityMode {
    pub value: C64,
    /// Unit norm, largest component real and positive.
    pub vector: CVec,
    pub bound: bool,
}

impl RapidityMode {
    /// Inverse participation ratio `Σ_x |ψ_x|⁴` of the normalized eigenvector.
    pub fn ipr(&self) -> f64 {
        self.vector.iter().map(|z| z.norm_sqr().powi(2)).sum()
    }

    /// Weight `Σ |ψ_x|²` on the `sites` sites nearest to each boundary, summed over both ends.
    pub fn boundary_weight(&self, sites: usize) -> f64 {
        let n = self.vector.len();
        let k = sites.min(n / 2);
        let left: f64 = self.vector.iter().take(k).map(|z| z.norm_sqr()).sum();
        let right: f64 = self.vector.iter().skip(n - k).map(|z| z.norm_sqr()).sum();
        left + right
    }

    /// Localization used by the default bound-state test: the IPR of the
    /// cell weights `|ψ_A|² + |ψ_B|²`, taken separately on the left and right
    /// halves of the chain (each renormalized) and maximized over the two.
    ///
    /// Splitting the chain keeps symmetric/antisymmetric combinations of a
    /// left and a right edge state as localized as either one alone.
    pub fn half_chain_cell_ipr(&self) -> f64 {
        let w: Vec<f64> = self.vector.as_slice().chunks(2).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
        let ipr = |part: &[f64]| {
            let s: f64 = part.iter().sum();
            if s <= 0.0 {
                0.0
            } else {
                part.iter().map(|x| x * x).sum::<f64>() / (s * s)
            }
        };
        if w.len() < 2 {
            return ipr(&w);
        }
        let (l, r) = w.split_at(w.len() / 2);
        ipr(l).max(ipr(r))
    }

    /// `|ψ|` summed in quadrature over the two sites of each unit cell.
    pub fn cell_amplitudes(&self) -> Vec<f64> {
        self.vector.as_slice().chunks(2).map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect()
    }
}

/// The `2N` eigenpairs of `P`. Each value appears twice in the rapidity multiset.
#[derive(Debug, Clone)]
pub struct RapiditySpectrum {
    pub n_cells: usize,
    pub modes: Vec<RapidityMode>,
}

impl RapiditySpectrum {
    /// The `4N` rapidities, each eigenvalue of `P` repeated twice.
    pub fn values(&self) -> Vec<C64> {
        self.modes.iter().flat_map(|m| [m.value, m.value]).collect()
    }

    /// Bound flags aligned with [`RapiditySpectrum::values`].
    pub fn bound_flags(&self) -> Vec<bool> {
        self.modes.iter().flat_map(|m| [m.bound, m.bound]).collect()
    }

    /// Number of flagged eigenvalues of `P` (one per copy of the doubled spectrum).
    pub fn bound_count(&self) -> usize {
        self.modes.iter().filter(|m| m.bound).count()
    }

    /// Mode with the smallest `|E|`.
    pub fn min_modulus_mode(&self) -> &RapidityMode {
        self.modes.iter().min_by(|a, b| a.value.norm().total_cmp(&b.value.norm())).expect("spectrum is never empty")
    }

    pub fn max_abs_value(&self) -> f64 {
        self.modes.iter().fold(0.0, |acc, m| acc.max(m.value.norm()))
    }
}

/// Bound-state test: [`RapidityMode::half_chain_cell_ipr`] above
/// `ipr_threshold` and boundary weight (outer `boundary_sites` sites at each
/// end, summed) above `min_boundary_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundStateCriterion {
    /// Defaults to `4 / N` when `None`; an extended standing wave gives about `3 / N`.
    pub ipr_threshold: Option<f64>,
    pub boundary_sites: usize,
    pub min_boundary_weight: f64,
}

impl Default for BoundStateCriterion {
    fn default() -> Self {
        BoundStateCriterion { ipr_threshold: None, boundary_sites: 4, min_boundary_weight: 0.5 }
    }
}

impl BoundStateCriterion {
    pub fn threshold_for(&self, n_cells: usize) -> f64 {
        self.ipr_threshold.unwrap_or(4.0 / n_cells as f64)
    }
}

pub fn rapidity_spectrum(model: &OpenChainModel) -> Result<RapiditySpectrum> {
    rapidity_spectrum_with(model, &BoundStateCriterion::default())
}

pub fn rapidity_spectrum_with(model: &OpenChainModel, criterion: &BoundStateCriterion) -> Result<RapiditySpectrum> {
    let p = ReducedMatrix::for_model(model)?;
    let eig = linalg::eig(&p.p, &|| p.context())?;
    let mut modes: Vec<RapidityMode> = eig
        .values
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let mut vector = eig.vectors.column(k).into_owned();
            linalg::fix_phase(&mut vector);
            RapidityMode { value, vector, bound: false }
        })
        .collect();
    modes.sort_by(|a, b| a.value.im.total_cmp(&b.value.im).then(a.value.re.total_cmp(&b.value.re)));
    let spec = RapiditySpectrum { n_cells: model.n_cells, modes };
    Ok(classify_bound_states(spec, criterion))
}

pub fn classify_bound_states(mut spec: RapiditySpectrum, criterion: &BoundStateCriterion) -> RapiditySpectrum {
    let threshold = criterion.threshold_for(spec.n_cells);
    for mode in &mut spec.modes {
        mode.bound = mode.half_chain_cell_ipr() > threshold && mode.boundary_weight(criterion.boundary_sites) > criterion.min_boundary_weight;
    }
    spec
}

/// Threshold below which `Im E` counts as zero.
///
/// Relative to the largest `|Im E|`, floored at a small multiple of the
/// largest `|E|` so that roundoff in a closed chain is not reported as a gap.
pub fn numerical_zero(values: &[C64]) -> f64 {
    let max_im = values.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    let max_abs = values.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    (1e-12 * max_im).max(1e-13 * max_abs)
}

/// `Δ_g = min { Im E_j : Im E_j > numerical_zero }`, or 0 when no rapidity decays.
pub fn liouvillian_gap(spec: &RapiditySpectrum) -> f64 {
    let values: Vec<C64> = spec.modes.iter().map(|m| m.value).collect();
    let zero = numerical_zero(&values);
    values.iter().map(|z| z.im).filter(|&im| im > zero).reduce(f64::min).unwrap_or(0.0)
}

/// `Δ_g = −max { Re λ : Re λ ≠ 0 }` over an explicit list of Liouvillian eigenvalues.
pub fn gap_from_eigenvalues(values: &[C64]) -> f64 {
    let max_re = values.iter().fold(0.0f64, |acc, z| acc.max(z.re.abs()));
    let zero = 1e-12 * max_re;
    values.iter().map(|z| z.re).filter(|re| re.abs() > zero).reduce(f64::max).map_or(0.0, |re| -re)
}

/// One Liouvillian eigenvalue together with the occupation counts that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianEigenvalue {
    pub value: C64,
    /// `v_m ∈ {0, 1, 2}` for each mode of the rapidity spectrum.
    pub counts: Vec<u8>,
    /// Number of `{0,1}` selections over the doubled spectrum giving these counts.
    pub multiplicity: u64,
    /// Total count of included bound-state rapidities.
    pub stripe: usize,
}

#[derive(Debug, Clone)]
pub struct LiouvillianSpectrum {
    pub entries: Vec<LiouvillianEigenvalue>,
    /// `None` for a full enumeration, otherwise the cap on `Σ v_m`.
    pub max_terms: Option<usize>,
}

impl LiouvillianSpectrum {
    /// The multiset with every entry repeated by its multiplicity.
    pub fn expanded_values(&self) -> Vec<C64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity as usize)).collect()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.max_terms.is_none()
    }
}

/// Number of count vectors over `modes` distinct rapidities with `Σ v ≤ max_terms`.
pub fn enumeration_size(modes: usize, max_terms: Option<usize>) -> u128 {
    let cap = max_terms.unwrap_or(2 * modes).min(2 * modes);
    // ways[s] = number of count vectors with total s
    let mut ways = vec![0u128; cap + 1];
    ways[0] = 1;
    for _ in 0..modes {
        let mut next = vec![0u128; cap + 1];
        for (s, &w) in ways.iter().enumerate() {
            for v in 0..=2 {
                if s + v <= cap {
                    next[s + v] = next[s + v].saturating_add(w);
                }
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |acc, &w| acc.saturating_add(w))
}

pub fn liouvillian_spectrum(spec: &RapiditySpectrum, max_terms: Option<usize>) -> Result<LiouvillianSpectrum> {
    liouvillian_spectrum_with_cap(spec, max_terms, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates `λ = i Σ_m v_m E_m` over `v_m ∈ {0, 1, 2}` with `Σ v_m ≤ max_terms`.
pub fn liouvillian_spectrum_with_cap(spec: &RapiditySpectrum, max_terms: Option<usize>, cap: u128) -> Result<LiouvillianSpectrum> {
    let m = spec.modes.len();
    let required = enumeration_size(m, max_terms);
    if required > cap {
        return Err(Error::BudgetExceeded { required, cap });
    }
    let limit = max_terms.unwrap_or(2 * m);
    let ie: Vec<C64> = spec.modes.iter().map(|mode| I * mode.value).collect();
    let bound: Vec<bool> = spec.modes.iter().map(|mode| mode.bound).collect();

    let mut entries = Vec::with_capacity(required as usize);
    let mut counts = vec![0u8; m];
    loop {
        let total: usize = counts.iter().map(|&v| v as usize).sum();
        if total <= limit {
            let mut value = C64::new(0.0, 0.0);
            let mut multiplicity = 1u64;
            let mut stripe = 0usize;
            for (k, &v) in counts.iter().enumerate() {
                if v > 0 {
                    value += ie[k] * v as f64;
                    if v == 1 {
                        multiplicity *= 2;
                    }
                    if bound[k] {
                        stripe += v as usize;
                    }
                }
            }
            entries.push(LiouvillianEigenvalue { value, counts: counts.clone(), multiplicity, stripe });
        }
        // base-3 odometer
        let mut k = 0;
        loop {
            if k == m {
                return Ok(LiouvillianSpectrum { entries, max_terms });
            }
            if counts[k] < 2 {
                counts[k] += 1;
                break;
            }
            counts[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stripe {
    /// Number of included bound-state rapidities; 0 is the rightmost stripe.
    pub index: usize,
    /// Eigenvalue count including multiplicities.
    pub count: u64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

pub fn stripe_decompose(lspec: &LiouvillianSpectrum) -> Vec<Stripe> {
    let n_stripes = lspec.entries.iter().map(|e| e.stripe).max().map_or(0, |s| s + 1);
    let mut stripes: Vec<Option<Stripe>> = vec![None; n_stripes];
    for e in &lspec.entries {
        let z = e.value;
        let s = stripes[e.stripe].get_or_insert(Stripe {
            index: e.stripe,
            count: 0,
            re_min: z.re,
            re_max: z.re,
            im_min: z.im,
            im_max: z.im,
        });
        s.count += e.multiplicity;
        s.re_min = s.re_min.min(z.re);
        s.re_max = s.re_max.max(z.re);
        s.im_min = s.im_min.min(z.im);
        s.im_max = s.im_max.max(z.im);
    }
    stripes.into_iter().flatten().collect()
}

/// Expanded eigenvalues belonging to one stripe.
pub fn stripe_values(lspec: &LiouvillianSpectrum, index: usize) -> Vec<C64> {
    lspec
        .entries
        .iter()
        .filter(|e| e.stripe == index)
        .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity as usize))
        .collect()
}
