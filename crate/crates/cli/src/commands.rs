use anyhow::{bail, Result};
use ssh_lindblad::config::RunConfig;
use ssh_lindblad::oracle::{self, ValidationOptions};
use ssh_lindblad::{analytic, dynamics, fitting, thirdq, DissipatorKind, OpenChainModel, Side};

use crate::output::{CommandOutput, Table, Value};

pub fn rapidity(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = thirdq::rapidity_spectrum_with(&cfg.model, &cfg.criterion)?;
    let mut table = Table::new("rapidity", &["re_e", "im_e", "bound"]);
    for (e, b) in spec.values().into_iter().zip(spec.bound_flags()) {
        table.push(vec![e.re.into(), e.im.into(), b.into()]);
    }
    let mut out = CommandOutput::default();
    out.note("rows", table.rows.len());
    out.note("bound_rows", spec.bound_flags().iter().filter(|b| **b).count());
    out.note("bound_eigenvalues_of_p", spec.bound_count());
    out.note("liouvillian_gap", thirdq::liouvillian_gap(&spec));
    out.note("ipr_threshold", cfg.criterion.threshold_for(cfg.model.n_cells));
    out.tables.push(table);
    Ok(out)
}

pub fn spectrum(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = thirdq::rapidity_spectrum_with(&cfg.model, &cfg.criterion)?;
    let lspec = thirdq::liouvillian_spectrum(&spec, cfg.max_terms)?;
    let mut table = Table::new("spectrum", &["re_lambda", "im_lambda", "multiplicity", "stripe"]);
    for e in &lspec.entries {
        table.push(vec![e.value.re.into(), e.value.im.into(), e.multiplicity.into(), e.stripe.into()]);
    }
    let stripes = thirdq::stripe_decompose(&lspec);
    let mut st = Table::new("stripes", &["stripe", "count", "re_min", "re_max", "im_min", "im_max"]);
    for s in &stripes {
        st.push(vec![s.index.into(), s.count.into(), s.re_min.into(), s.re_max.into(), s.im_min.into(), s.im_max.into()]);
    }
    let mut out = CommandOutput::default();
    out.note("complete", lspec.is_complete());
    out.note("eigenvalues", lspec.total_multiplicity());
    out.note("distinct_entries", lspec.entries.len());
    out.note("stripe_count", stripes.len());
    out.note("bound_eigenvalues_of_p", spec.bound_count());
    out.note("liouvillian_gap", thirdq::liouvillian_gap(&spec));
    out.note("zero_present", lspec.entries.iter().any(|e| e.value.norm() == 0.0));
    out.tables.push(table);
    out.tables.push(st);
    Ok(out)
}

fn cell_profile(sites: &[f64]) -> Vec<f64> {
    sites.chunks(2).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
}

pub fn dynamics(cfg: &RunConfig) -> Result<CommandOutput> {
    let model = &cfg.model;
    let grid = cfg.time_grid();
    let g0 = dynamics::initial_fully_occupied(model.n_cells);
    let n = model.n_cells;

    let dual = if cfg.dual {
        if model.dissipators.iter().any(|d| d.strength <= 0.0) || model.dissipators.is_empty() {
            bail!("dual mode needs every dissipator strength positive");
        }
        Some(model.with_inverted_strengths())
    } else {
        None
    };
    let primary = dynamics::Propagator::new(model)?;
    let secondary = dual.as_ref().map(dynamics::Propagator::new).transpose()?;

    let mut columns = vec!["t".to_string(), "n".to_string()];
    if secondary.is_some() {
        columns.push("n_dual".into());
    }
    if cfg.profile {
        columns.extend((1..=n).map(|j| format!("cell_{j}")));
        if secondary.is_some() {
            columns.extend((1..=n).map(|j| format!("dual_cell_{j}")));
        }
    }
    let mut table = Table::with_columns("dynamics", columns);
    let mut max_diff = 0.0f64;
    for &t in &grid {
        let g = primary.at(&g0, t);
        let mut row: Vec<Value> = vec![t.into(), g.density().into()];
        let gd = secondary.as_ref().map(|p| p.at(&g0, t));
        if let Some(gd) = &gd {
            row.push(gd.density().into());
            max_diff = max_diff.max((g.density() - gd.density()).abs());
        }
        if cfg.profile {
            row.extend(cell_profile(&g.site_density_profile()).into_iter().map(Value::from));
            if let Some(gd) = &gd {
                row.extend(cell_profile(&gd.site_density_profile()).into_iter().map(Value::from));
            }
        }
        table.push(row);
    }
    let mut out = CommandOutput::default();
    out.note("points", grid.len());
    out.note("propagator", format!("{:?}", primary.method()).to_lowercase());
    if let Some(d) = &dual {
        out.note("dual_gamma_left", d.gamma(Side::Left));
        out.note("dual_gamma_right", d.gamma(Side::Right));
        out.note("max_abs_difference", max_diff);
    }
    if model.is_dissipative() {
        match dynamics::steady_state(model) {
            Ok(ss) => {
                out.note("steady_state_density", ss.gamma.density());
                if let Some(w) = ss.warning {
                    out.note("steady_state_warning", w);
                }
            }
            Err(e) => out.note("steady_state_density", format!("unavailable: {e}")),
        }
    }
    out.tables.push(table);
    Ok(out)
}

pub fn gap_scan(cfg: &RunConfig) -> Result<CommandOutput> {
    let series = fitting::gap_scan(&cfg.model, &cfg.n_list)?;
    let mut table = Table::new("gap_scan", &["n_cells", "gap"]);
    for &(n, g) in &series.points {
        table.push(vec![n.into(), g.into()]);
    }
    let mut out = CommandOutput::default();
    out.note("points", series.len());
    out.note("excluded", series.excluded.len());
    if !series.excluded.is_empty() {
        let list: Vec<String> = series.excluded.iter().map(|n| n.to_string()).collect();
        out.note("excluded_sizes", list.join(","));
    }
    let mut fits = Table::new("gap_fit", &["form", "prefactor", "rate", "r_squared", "selected"]);
    match fitting::model_select(&series) {
        Ok(sel) => {
            for f in [&sel.exponential, &sel.powerlaw] {
                let name = match f.form {
                    fitting::FitForm::Exponential => "exponential",
                    fitting::FitForm::Powerlaw => "powerlaw",
                };
                let selected = f.form == sel.selected && !sel.degenerate;
                fits.push(vec![name.into(), f.prefactor.into(), f.rate.into(), f.r_squared.into(), selected.into()]);
            }
            out.note("degenerate", sel.degenerate);
        }
        Err(e) => out.note("fit", format!("skipped: {e}")),
    }
    out.tables.push(table);
    out.tables.push(fits);
    Ok(out)
}

/// Median ratio of consecutive cell amplitudes stepping away from `edge`.
fn edge_decay_ratio(amps: &[f64], edge: Side) -> f64 {
    let ordered: Vec<f64> = match edge {
        Side::Left => amps.to_vec(),
        Side::Right => amps.iter().rev().copied().collect(),
    };
    let floor = 1e-10 * ordered.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut ratios: Vec<f64> =
        ordered.windows(2).take(10).filter(|w| w[1] > floor).map(|w| w[1] / w[0]).collect();
    if ratios.is_empty() {
        return f64::NAN;
    }
    ratios.sort_by(f64::total_cmp);
    ratios[ratios.len() / 2]
}

pub fn dark_state(cfg: &RunConfig) -> Result<CommandOutput> {
    let model = &cfg.model;
    let prediction = analytic::dark_state_for_model(model)?;
    let spec = thirdq::rapidity_spectrum_with(model, &cfg.criterion)?;
    let mode = spec.min_modulus_mode();
    let amps = mode.cell_amplitudes();
    let half = amps.len() / 2;
    let left: f64 = amps[..half].iter().map(|a| a * a).sum();
    let right: f64 = amps[amps.len() - half..].iter().map(|a| a * a).sum();
    let numeric_side = if right >= left { Side::Right } else { Side::Left };

    let mut out = CommandOutput::default();
    out.note("exists", prediction.exists);
    if !prediction.exists {
        out.note("message", "no dark state");
    }
    out.note("predicted_x", prediction.x);
    out.note("predicted_cell_ratio", 1.0 / prediction.x);
    out.note("predicted_side", format!("{:?}", prediction.side).to_lowercase());
    out.note("numeric_min_abs_e", mode.value.norm());
    out.note("numeric_re_e", mode.value.re);
    out.note("numeric_im_e", mode.value.im);
    out.note("numeric_side", format!("{numeric_side:?}").to_lowercase());
    out.note("numeric_cell_ratio", edge_decay_ratio(&amps, numeric_side));

    let mut profile = if prediction.exists {
        Table::new("dark_state_profile", &["cell", "amplitude", "predicted"])
    } else {
        Table::new("dark_state_profile", &["cell", "amplitude"])
    };
    let predicted: Vec<f64> = if prediction.exists {
        let n = amps.len();
        let raw: Vec<f64> = (0..n)
            .map(|j| {
                let d = match prediction.side {
                    Side::Right => n - 1 - j,
                    Side::Left => j,
                };
                prediction.x.powi(-(d as i32))
            })
            .collect();
        let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
        raw.into_iter().map(|a| a / norm).collect()
    } else {
        Vec::new()
    };
    for (j, a) in amps.iter().enumerate() {
        let mut row: Vec<Value> = vec![(j + 1).into(), (*a).into()];
        if let Some(p) = predicted.get(j) {
            row.push((*p).into());
        }
        profile.push(row);
    }
    out.tables.push(profile);

    let mut bound = Table::new("bound_states", &["x", "re_e", "im_e", "side"]);
    for b in analytic::bound_states_for_model(model)? {
        bound.push(vec![b.x.into(), b.energy.re.into(), b.energy.im.into(), format!("{:?}", b.side).to_lowercase().into()]);
    }
    out.tables.push(bound);
    Ok(out)
}

/// Models checked when `validate` runs without a config.
pub fn default_validation_suite() -> Vec<OpenChainModel> {
    let ll = OpenChainModel::loss_loss(0.5, 1.0, 2, 0.2, 0.2);
    let lg = OpenChainModel::new(0.5, 1.0, 2)
        .with_dissipator(Side::Left, DissipatorKind::Loss, 0.2)
        .with_dissipator(Side::Right, DissipatorKind::Gain, 0.2);
    let single = OpenChainModel::new(0.5, 1.0, 2).with_dissipator(Side::Left, DissipatorKind::Loss, 0.2);
    let closed = OpenChainModel::new(0.5, 1.0, 2);
    vec![ll, lg, single, closed]
}

fn describe(m: &OpenChainModel) -> String {
    let side = |s: Side| match m.dissipator(s) {
        Some(d) if d.strength > 0.0 => format!("{}:{}", format!("{:?}", d.kind).to_lowercase(), d.strength),
        _ => "none".into(),
    };
    format!("t1={} t2={} N={} left={} right={}", m.t1, m.t2, m.n_cells, side(Side::Left), side(Side::Right))
}

/// Returns the report and whether every check passed.
pub fn validate(models: &[OpenChainModel], tol: Option<f64>, jump_factor: f64, times: Option<Vec<f64>>) -> Result<(CommandOutput, bool)> {
    let mut opts = ValidationOptions { tol, jump_factor, ..Default::default() };
    if let Some(t) = times {
        opts.times = t;
    }
    let mut table = Table::new("validate", &["model", "check", "value", "tolerance", "pass", "note"]);
    let mut all = true;
    let mut failures = 0usize;
    for m in models {
        let report = oracle::validate_against_ed(m, &opts)?;
        all &= report.all_pass();
        for c in &report.checks {
            failures += usize::from(!c.pass);
            table.push(vec![
                describe(m).into(),
                c.name.as_str().into(),
                c.value.into(),
                c.tolerance.into(),
                c.pass.into(),
                c.note.clone().unwrap_or_default().into(),
            ]);
        }
    }
    let mut out = CommandOutput::default();
    out.note("models", models.len());
    out.note("checks", table.rows.len());
    out.note("failures", failures);
    out.note("all_pass", all);
    out.tables.push(table);
    Ok((out, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_ratio_reads_geometric_profile() {
        let amps: Vec<f64> = (0..12).map(|j| 0.5f64.powi(11 - j)).collect();
        assert!((edge_decay_ratio(&amps, Side::Right) - 0.5).abs() < 1e-12);
        let rev: Vec<f64> = amps.iter().rev().copied().collect();
        assert!((edge_decay_ratio(&rev, Side::Left) - 0.5).abs() < 1e-12);
    }
}
