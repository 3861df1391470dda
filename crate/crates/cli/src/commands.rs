//! Subcommand implementations. Each returns a [`Report`].

use std::path::Path;

use anyhow::{Context, Result};
use eteleport::acceptance::{run_all, CriterionOutcome};
use eteleport::circuit::parse_circuit;
use eteleport::leviton::{closed_form_correlators, fidelity_curve, zero_t_correlators, CorrelatorKey};
use eteleport::protocol::{
    condition_on, efficiency_at, run_premeasurement, tomography_bloch, BobConditional, MeasurementOutcome, Stage,
    TeleportParams, TomographySetting,
};
use eteleport::saw::{average_fidelity, average_fidelity_sampled, jozsa_fidelity};
use eteleport::{Execution, ParseError};

use crate::report::{Cell, Report, Section};

/// Tolerance quoted in the correlator summary.
pub const CORRELATOR_TOLERANCE: f64 = 1e-10;

fn outcome_key(x: MeasurementOutcome) -> String {
    let label = x.label();
    if label.starts_with('(') {
        format!("p{label}")
    } else {
        format!("p({label})")
    }
}

pub fn ideal(reflection: f64, phi: f64) -> Result<Report> {
    let p = TeleportParams::new(reflection, phi)?;
    let s = run_premeasurement(&p, Stage::BeforeTomography)?;
    let input = p.input_bloch();

    let mut outcomes = Section::values("outcomes");
    let mut bob = Section::table("bob", &["outcome", "p", "r_x", "r_y", "r_z", "fidelity"]);
    let mut other = Section::table("non_qubit", &["outcome", "p", "p_bob_0e", "p_bob_1e", "p_bob_2e"]);
    let mut fidelity = f64::NAN;
    for x in MeasurementOutcome::all() {
        let (prob, cond) = match condition_on(&s, x) {
            Ok(v) => v,
            Err(eteleport::Error::ZeroProbability(_)) => {
                outcomes.set(outcome_key(x), 0.0);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        outcomes.set(outcome_key(x), prob);
        match cond {
            BobConditional::Qubit(q) => {
                let corrected = if x.needs_sigma_z() { q.sigma_z_conjugated() } else { q };
                let r = corrected.bloch();
                let f = jozsa_fidelity(&input, &r)?;
                if x == MeasurementOutcome::PLUS_PLUS {
                    fidelity = f;
                }
                bob.row(vec![x.label().into(), prob.into(), r.x.into(), r.y.into(), r.z.into(), f.into()]);
            }
            BobConditional::NonQubit(n) => {
                let [e0, e1, e2] = n.bob_electrons;
                other.row(vec![x.label().into(), prob.into(), e0.into(), e1.into(), e2.into()]);
            }
        }
    }

    let tomo = tomography_bloch(&p)?;
    let mut summary = Section::values("summary");
    summary
        .set("R", p.reflection())
        .set("phi", p.phi())
        .set("efficiency_feedforward", efficiency_at(&p, true)?)
        .set("efficiency_no_feedforward", efficiency_at(&p, false)?)
        .set("input_r_x", input.x)
        .set("input_r_y", input.y)
        .set("input_r_z", input.z)
        .set("tomography_r_x", tomo.x)
        .set("tomography_r_y", tomo.y)
        .set("tomography_r_z", tomo.z)
        .set("tomography_deviation", tomo.max_abs_diff(&input))
        .set("fidelity", fidelity);

    let mut report = Report::default();
    report.push(outcomes).push(bob).push(other).push(summary);
    Ok(report)
}

pub fn saw(sigma2: &[f64], samples: usize, seed: u64, exec: Execution) -> Result<Report> {
    let mut table = Section::table("saw", &["sigma2 [rad^2]", "F_analytic", "F_sampled", "F_sampled_stderr"]);
    let mut grid = sigma2.to_vec();
    grid.sort_by(f64::total_cmp);
    for s2 in grid {
        let analytic = average_fidelity(s2)?;
        let (mean, se) = average_fidelity_sampled(s2, samples, seed, exec)?;
        table.row(vec![s2.into(), analytic.into(), mean.into(), se.into()]);
    }
    let mut report = Report::default();
    report.push(table);
    Ok(report)
}

pub fn leviton(gammas: &[f64], taus: &[f64], exec: Execution) -> Result<Report> {
    let mut g = gammas.to_vec();
    let mut t = taus.to_vec();
    g.sort_by(f64::total_cmp);
    t.sort_by(f64::total_cmp);
    let mut table = Section::table("leviton", &["gamma [1/Omega]", "tau [k_B T/(hbar Omega)]", "q", "F"]);
    for pt in fidelity_curve(&g, &t, exec)? {
        table.row(vec![pt.gamma.into(), pt.tau.into(), pt.q.into(), pt.fidelity.into()]);
    }
    let mut report = Report::default();
    report.push(table);
    Ok(report)
}

pub fn correlators(reflection: f64, phi: f64) -> Result<Report> {
    let p = TeleportParams::new(reflection, phi)?;
    let mut comparison =
        Section::table("correlators", &["setting", "correlator", "simulated", "reference", "deviation"]);
    let mut worst = 0.0_f64;
    let mut wide_columns = vec!["setting".to_owned()];
    let mut wide_rows = Vec::new();
    for setting in TomographySetting::ALL {
        let sim = zero_t_correlators(&p, setting)?;
        let reference = closed_form_correlators(&p, setting);
        for (key, want) in &reference.values {
            let got = sim.values[key];
            let dev = (got - want).abs();
            worst = worst.max(dev);
            comparison.row(vec![
                setting.to_string().into(),
                key.column_name().into(),
                got.into(),
                (*want).into(),
                dev.into(),
            ]);
        }
        if wide_columns.len() == 1 {
            wide_columns.extend(sim.values.keys().map(CorrelatorKey::column_name));
        }
        let mut row: Vec<Cell> = vec![setting.to_string().into()];
        row.extend(sim.values.values().map(|v| Cell::Num(*v)));
        wide_rows.push(row);
    }
    let mut wide = Section::table_owned("moments", wide_columns);
    for r in wide_rows {
        wide.row(r);
    }
    let mut summary = Section::values("summary");
    summary.set("max_deviation", worst).set("within_tolerance", worst < CORRELATOR_TOLERANCE);

    let mut report = Report::default();
    report.push(comparison).push(summary);
    report.data_only.push(wide);
    report.notes.push(if worst < CORRELATOR_TOLERANCE {
        format!("max deviation < {CORRELATOR_TOLERANCE:e}")
    } else {
        format!("max deviation {worst:e} exceeds {CORRELATOR_TOLERANCE:e}")
    });
    Ok(report)
}

/// Circuit-file diagnostics keep their `line:col` prefix.
#[derive(Debug)]
pub struct CircuitFileError {
    pub path: String,
    pub error: ParseError,
}

impl std::fmt::Display for CircuitFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.path, self.error)
    }
}

impl std::error::Error for CircuitFileError {}

pub fn circuit_check(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let circuit = parse_circuit(&text).map_err(|error| CircuitFileError { path: path.display().to_string(), error })?;
    let u = circuit.compose()?;
    let mut summary = Section::values("circuit");
    summary
        .set("modes", circuit.modes.len())
        .set("elements", circuit.elements.len())
        .set("unitarity_deviation", u.unitarity_deviation());
    let mut matrix = Section::table("matrix", &["output", "input", "re", "im"]);
    for (i, out) in u.rows().labels().iter().enumerate() {
        for (j, inp) in u.cols().labels().iter().enumerate() {
            let z = u.matrix()[(i, j)];
            matrix.row(vec![out.as_str().into(), inp.as_str().into(), z.re.into(), z.im.into()]);
        }
    }
    let mut report = Report::default();
    report.push(summary).push(matrix);
    Ok(report)
}

pub fn verify(exec: Execution) -> (Report, bool) {
    let outcomes: Vec<CriterionOutcome> = run_all(exec);
    let all_passed = outcomes.iter().all(|o| o.passed);
    let mut table = Section::table("criteria", &["id", "name", "passed", "detail"]);
    for o in &outcomes {
        table.row(vec![o.id.as_str().into(), o.name.as_str().into(), o.passed.into(), o.detail.as_str().into()]);
    }
    let mut report = Report::default();
    report.data_only.push(table);
    report.notes.extend(outcomes.iter().map(ToString::to_string));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    report.notes.push(format!("{} passed, {failed} failed", outcomes.len() - failed));
    (report, all_passed)
}
