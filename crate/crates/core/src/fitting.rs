//! Finite-size scaling of the Liouvillian gap: exponential and power-law
//! least-squares fits in log space.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::OpenChainModel;
use crate::thirdq;

/// Gaps at or below this value are dropped from a scan.
pub const GAP_FLOOR: f64 = 1e-12;
/// Two fits whose `r²` differ by less than this are reported as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSeries {
    /// `(N, Δ_g)` with `N` strictly increasing.
    pub points: Vec<(usize, f64)>,
    /// Sizes whose gap fell at or below [`GAP_FLOOR`].
    pub excluded: Vec<usize>,
    pub model: Option<OpenChainModel>,
}

impl ScalingSeries {
    pub fn from_points(points: Vec<(usize, f64)>) -> Self {
        let mut s = ScalingSeries { points: Vec::new(), excluded: Vec::new(), model: None };
        let mut points = points;
        points.sort_by_key(|p| p.0);
        points.dedup_by_key(|p| p.0);
        for (n, g) in points {
            if g > GAP_FLOOR && g.is_finite() {
                s.points.push((n, g));
            } else {
                s.excluded.push(n);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Liouvillian gap of `template` resized to each `N` in `n_list` (computed in parallel).
pub fn gap_scan(template: &OpenChainModel, n_list: &[usize]) -> Result<ScalingSeries> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("gap scan needs at least one size".into()));
    }
    let gaps: Vec<(usize, f64)> = n_list
        .par_iter()
        .map(|&n| {
            let mut m = template.clone();
            m.n_cells = n;
            let spec = thirdq::rapidity_spectrum(&m)?;
            Ok((n, thirdq::liouvillian_gap(&spec)))
        })
        .collect::<Result<_>>()?;
    let mut s = ScalingSeries::from_points(gaps);
    s.model = Some(template.clone());
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitForm {
    Exponential,
    Powerlaw,
}

/// `Δ = a e^{−b N}` or `Δ = a N^{−b}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub form: FitForm,
    pub prefactor: f64,
    /// Rate for the exponential form, exponent for the power law.
    pub rate: f64,
    pub r_squared: f64,
    /// `ln Δ_data − ln Δ_fit` per point.
    pub residuals: Vec<f64>,
}

impl ScalingFit {
    pub fn predict(&self, n: f64) -> f64 {
        match self.form {
            FitForm::Exponential => self.prefactor * (-self.rate * n).exp(),
            FitForm::Powerlaw => self.prefactor * n.powf(-self.rate),
        }
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res <= 1e-24 * n {
        1.0
    } else {
        0.0
    };
    (intercept, slope, r2, residuals)
}

fn fit(series: &ScalingSeries, form: FitForm) -> Result<ScalingFit> {
    if series.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: series.len() });
    }
    let x: Vec<f64> = series
        .points
        .iter()
        .map(|&(n, _)| match form {
            FitForm::Exponential => n as f64,
            FitForm::Powerlaw => (n as f64).ln(),
        })
        .collect();
    let y: Vec<f64> = series.points.iter().map(|p| p.1.ln()).collect();
    let (intercept, slope, r_squared, residuals) = linear_fit(&x, &y);
    Ok(ScalingFit { form, prefactor: intercept.exp(), rate: -slope, r_squared, residuals })
}

/// Least squares of `ln Δ` against `N`.
pub fn fit_exponential(series: &ScalingSeries) -> Result<ScalingFit> {
    fit(series, FitForm::Exponential)
}

/// Least squares of `ln Δ` against `ln N`.
pub fn fit_powerlaw(series: &ScalingSeries) -> Result<ScalingFit> {
    fit(series, FitForm::Powerlaw)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSelection {
    pub selected: FitForm,
    pub exponential: ScalingFit,
    pub powerlaw: ScalingFit,
    /// Both forms fit equally well (within [`TIE_TOLERANCE`] in `r²`).
    pub degenerate: bool,
}

/// Fits both forms and keeps the one with the larger `r²`.
pub fn model_select(series: &ScalingSeries) -> Result<ModelSelection> {
    if series.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: series.len() });
    }
    let exponential = fit_exponential(series)?;
    let powerlaw = fit_powerlaw(series)?;
    let degenerate = (exponential.r_squared - powerlaw.r_squared).abs() < TIE_TOLERANCE;
    let selected = if powerlaw.r_squared > exponential.r_squared && !degenerate { FitForm::Powerlaw } else { FitForm::Exponential };
    Ok(ModelSelection { selected, exponential, powerlaw, degenerate })
}
