//! Periodically driven edge channels.
//!
//! Units: `e = ħ = 𝒯 = 1`. Currents, second and third order zero-frequency
//! correlators are then the mean, covariance and third central moment of the
//! per-period electron counts. Pulse width `γ = Γ/𝒯`, temperature
//! `τ = k_B T/(ħΩ)`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::{map_indexed, Execution};
use crate::protocol::{run_premeasurement, BlochVector, Stage, TeleportParams, TomographySetting};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevitonParams {
    gamma: f64,
    tau: f64,
    tolerance: f64,
    max_terms: usize,
}

impl LevitonParams {
    /// Default tolerance `1e-12`, term cap `max(200, ⌈10/γ⌉)`.
    pub fn new(gamma: f64, tau: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::OutOfRange { name: "gamma", value: gamma });
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::OutOfRange { name: "tau", value: tau });
        }
        let max_terms = (10.0 / gamma).ceil().max(200.0) as usize;
        Ok(Self { gamma, tau, tolerance: DEFAULT_TOLERANCE, max_terms })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(Error::OutOfRange { name: "tolerance", value: tolerance });
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

/// Amplitude for absorbing `n` drive quanta from a Lorentzian pulse train.
pub fn photoassist_amplitude(n: i64, gamma: f64) -> Complex64 {
    let x = TAU * gamma;
    let value = match n {
        n if n > 0 => -2.0 * (-(n as f64) * x).exp() * x.sinh(),
        0 => (-x).exp(),
        _ => 0.0,
    };
    Complex64::from(value)
}

/// Numerical Fourier coefficients of `e^{iφ(t)}` for the pulse train.
#[derive(Debug, Clone)]
pub struct FourierOracle {
    gamma: f64,
    phase_factor: Vec<Complex64>,
}

impl FourierOracle {
    /// Pulses with `|j| ≤ pulses` are summed exactly, the rest through the
    /// leading `1/j²` tail. The period is sampled at `points` nodes.
    pub fn new(gamma: f64, pulses: usize, points: usize) -> Self {
        let j_max = pulses as f64;
        // Σ_{j>J} 1/j²
        let tail = 1.0 / j_max - 1.0 / (2.0 * j_max * j_max) + 1.0 / (6.0 * j_max.powi(3));
        let phase_factor = (0..points)
            .map(|k| {
                let t = k as f64 / points as f64;
                let mut phi = 0.0;
                for j in -(pulses as i64)..=pulses as i64 {
                    let u = (t - j as f64) / gamma;
                    phi -= 2.0 * (u.atan() + FRAC_PI_2);
                }
                phi -= 4.0 * gamma * t * tail;
                Complex64::from_polar(1.0, phi.rem_euclid(TAU))
            })
            .collect();
        Self { gamma, phase_factor }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `∫₀¹ e^{2πint} e^{iφ(t)} dt` by the trapezoid rule on the periodic grid.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        let m = self.phase_factor.len() as f64;
        let sum: Complex64 = self
            .phase_factor
            .iter()
            .enumerate()
            .map(|(k, f)| Complex64::from_polar(1.0, TAU * n as f64 * k as f64 / m) * f)
            .sum();
        sum / m
    }
}

/// Oracle with 2000 summed pulses and 8192 nodes.
pub fn photoassist_amplitude_oracle(n: i64, gamma: f64) -> Complex64 {
    FourierOracle::new(gamma, 2000, 8192).amplitude(n)
}

/// `coth x − 1/x` and `(coth x − 1/x)/x − 1/3`.
fn coth_remainders(x: f64) -> (f64, f64) {
    if x < 0.2 {
        let x2 = x * x;
        // coth x − 1/x = x/3 − x³/45 + 2x⁵/945 − x⁷/4725 + 2x⁹/93555 − 1382x¹¹/638512875
        let k = x2
            * (-1.0 / 45.0
                + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * (2.0 / 93555.0 - x2 * 1382.0 / 638_512_875.0))));
        let h = x * (1.0 / 3.0 + k);
        (h, k)
    } else {
        let h = 1.0 / x.tanh() - 1.0 / x;
        (h, h / x - 1.0 / 3.0)
    }
}

/// Temperature kernels of the second and third order series at `x = n/(2τ)`.
fn thermal_kernels(n: f64, tau: f64) -> (f64, f64) {
    if tau == 0.0 {
        return (1.0, 1.0);
    }
    let x = n / (2.0 * tau);
    if x < 0.2 {
        let (h, k) = coth_remainders(x);
        // coth² + ½csch² − (3/2x)coth = (3/2)(k + h²)
        (h, 1.5 * (k + h * h))
    } else {
        let (h, _) = coth_remainders(x);
        let c = 1.0 / x.tanh();
        let csch2 = if x > 350.0 { 0.0 } else { 1.0 / (x.sinh() * x.sinh()) };
        (h, c * c + 0.5 * csch2 - 1.5 * c / x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalFactors {
    /// Second-order factor `F(T)`.
    pub f: f64,
    /// Third-order factor `A(T)`.
    pub a: f64,
    /// `A/F`.
    pub q: f64,
    pub terms: usize,
}

/// Sums the `F(T)` and `A(T)` series until both terms drop below
/// `tolerance·|partial sum|`.
pub fn thermal_factors(p: &LevitonParams) -> Result<ThermalFactors> {
    let (mut f, mut a) = (0.0_f64, 0.0_f64);
    let mut last = f64::INFINITY;
    for n in 1..=p.max_terms {
        let nf = n as f64;
        let weight = nf * photoassist_amplitude(n as i64, p.gamma).norm_sqr();
        let (kf, ka) = thermal_kernels(nf, p.tau);
        let (tf, ta) = (weight * kf, weight * ka);
        f += tf;
        a += ta;
        last = tf.abs().max(ta.abs());
        if tf.abs() <= p.tolerance * f.abs() && ta.abs() <= p.tolerance * a.abs() {
            let q = a / f;
            if f.is_nan() || f <= 0.0 {
                return Err(Error::Degenerate { name: "F", value: f });
            }
            if q > 1.0 + 1e-9 {
                return Err(Error::RatioAboveOne(q));
            }
            return Ok(ThermalFactors { f, a, q, terms: n });
        }
    }
    Err(Error::NonConvergent { terms: p.max_terms, last })
}

/// `(2 + q)/3`.
pub fn leviton_fidelity(p: &LevitonParams) -> Result<f64> {
    Ok((2.0 + thermal_factors(p)?.q) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub gamma: f64,
    pub tau: f64,
    pub q: f64,
    pub fidelity: f64,
}

/// Fidelity on the `gammas × taus` grid, `gamma`-major.
pub fn fidelity_curve(gammas: &[f64], taus: &[f64], exec: Execution) -> Result<Vec<CurvePoint>> {
    let nt = taus.len();
    map_indexed(gammas.len() * nt, exec, |i| {
        let (gamma, tau) = (gammas[i / nt], taus[i % nt]);
        let t = thermal_factors(&LevitonParams::new(gamma, tau)?)?;
        Ok(CurvePoint { gamma, tau, q: t.q, fidelity: (2.0 + t.q) / 3.0 })
    })
    .into_iter()
    .collect()
}

/// Detector contacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Detector {
    A0p,
    A0m,
    A1p,
    A1m,
    B0,
    B1,
}

impl Detector {
    pub const ALL: [Self; 6] = [Self::A0p, Self::A0m, Self::A1p, Self::A1m, Self::B0, Self::B1];

    pub fn label(self) -> &'static str {
        crate::fock::OUTPUT6[self as usize]
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Current (`I`), second (`P`) or third (`Q`) order correlator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CorrelatorKind {
    I,
    P,
    Q,
}

impl CorrelatorKind {
    pub fn order(self) -> usize {
        self as usize + 1
    }

    /// Unit annotation, e.g. `e^2/T`.
    pub fn unit(self) -> &'static str {
        match self {
            Self::I => "e/T",
            Self::P => "e^2/T",
            Self::Q => "e^3/T",
        }
    }
}

/// Correlator identity with detectors in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CorrelatorKey {
    kind: CorrelatorKind,
    detectors: Vec<Detector>,
}

impl CorrelatorKey {
    pub fn new(detectors: &[Detector]) -> Result<Self> {
        let kind = match detectors.len() {
            1 => CorrelatorKind::I,
            2 => CorrelatorKind::P,
            3 => CorrelatorKind::Q,
            n => return Err(Error::MomentOrder(n)),
        };
        let mut detectors = detectors.to_vec();
        detectors.sort();
        if let Some(w) = detectors.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedLabel(w[0].to_string()));
        }
        Ok(Self { kind, detectors })
    }

    pub fn kind(&self) -> CorrelatorKind {
        self.kind
    }

    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    /// Column name with units, e.g. `P_A0p_B0 [e^2/T]`.
    pub fn column_name(&self) -> String {
        format!("{self} [{}]", self.kind.unit())
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CorrelatorKind::I => "I",
            CorrelatorKind::P => "P",
            CorrelatorKind::Q => "Q",
        };
        write!(f, "{kind}")?;
        for d in &self.detectors {
            write!(f, "_{d}")?;
        }
        Ok(())
    }
}

fn key(detectors: &[Detector]) -> CorrelatorKey {
    CorrelatorKey::new(detectors).expect("static detector tuples are distinct")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    pub setting: TomographySetting,
    pub values: BTreeMap<CorrelatorKey, f64>,
}

impl CorrelatorTable {
    pub fn new(setting: TomographySetting) -> Self {
        Self { setting, values: BTreeMap::new() }
    }

    pub fn insert(&mut self, detectors: &[Detector], value: f64) -> Result<()> {
        self.values.insert(CorrelatorKey::new(detectors)?, value);
        Ok(())
    }

    pub fn get(&self, detectors: &[Detector]) -> Result<f64> {
        let k = CorrelatorKey::new(detectors)?;
        self.values.get(&k).copied().ok_or_else(|| Error::MissingCorrelator(k.to_string()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest deviation over the keys of `reference`; missing keys are errors.
    pub fn max_deviation_from(&self, reference: &CorrelatorTable) -> Result<f64> {
        let mut worst = 0.0_f64;
        for (k, v) in &reference.values {
            let got = self.values.get(k).ok_or_else(|| Error::MissingCorrelator(k.to_string()))?;
            worst = worst.max((got - v).abs());
        }
        Ok(worst)
    }
}

/// Every current and every distinct pair and triple correlator, from the
/// occupation moments of the three-electron state after Bob's splitter.
pub fn zero_t_correlators(p: &TeleportParams, setting: TomographySetting) -> Result<CorrelatorTable> {
    let s = run_premeasurement(p, Stage::AfterTomography(setting))?;
    let mut table = CorrelatorTable::new(setting);
    let d = Detector::ALL;
    for i in 0..6 {
        table.insert(&[d[i]], s.occupation_moments(&[d[i].label()])?)?;
        for j in i + 1..6 {
            table.insert(&[d[i], d[j]], s.occupation_moments(&[d[i].label(), d[j].label()])?)?;
            for k in j + 1..6 {
                let labels = [d[i].label(), d[j].label(), d[k].label()];
                table.insert(&[d[i], d[j], d[k]], s.occupation_moments(&labels)?)?;
            }
        }
    }
    Ok(table)
}

/// Closed-form zero-temperature currents and correlators.
pub fn closed_form_correlators(p: &TeleportParams, setting: TomographySetting) -> CorrelatorTable {
    use Detector::*;
    let (r, d, phi) = (p.reflection(), p.transmission(), p.phi());
    let srd = (r * d).sqrt();
    let (pb_same, pb_cross, q_b0) = match setting {
        TomographySetting::X => (-1.0 / 16.0, -1.0 / 16.0, srd * phi.sin() / 16.0),
        TomographySetting::Y => (-1.0 / 16.0, -1.0 / 16.0, -srd * phi.cos() / 16.0),
        TomographySetting::Z => (-1.0 / 8.0, 0.0, 0.0),
    };
    let rows: Vec<(Vec<Detector>, f64)> = vec![
        (vec![A0p], 0.25 + r / 2.0),
        (vec![A0m], 0.25 + r / 2.0),
        (vec![A1p], 0.25 + d / 2.0),
        (vec![A1m], 0.25 + d / 2.0),
        (vec![B0], 0.5),
        (vec![B1], 0.5),
        (vec![A0p, A1p], -r * d / 4.0),
        (vec![A0p, A1m], -r * d / 4.0),
        (vec![A0m, A1p], -r * d / 4.0),
        (vec![A0m, A1m], -r * d / 4.0),
        (vec![A0p, B0], pb_same),
        (vec![A1p, B1], pb_same),
        (vec![A0p, A0m], -(1.0 / 16.0 - r * d / 4.0)),
        (vec![A1p, A1m], -(1.0 / 16.0 - r * d / 4.0)),
        (vec![A0p, B1], pb_cross),
        (vec![A1p, B0], pb_cross),
        (vec![A0p, A1p, B0], q_b0),
        (vec![A0p, A1p, B1], -q_b0),
        (vec![A0p, A0m, A1p], r * d * (r - d) / 8.0),
        (vec![A0p, A1p, A1m], r * d * (d - r) / 8.0),
    ];
    let mut table = CorrelatorTable::new(setting);
    for (dets, v) in rows {
        table.values.insert(key(&dets), v);
    }
    table
}

/// Scales second-order entries by `F` and third-order entries by `A`.
pub fn finite_t_correlators(table: &CorrelatorTable, f: f64, a: f64) -> Result<CorrelatorTable> {
    for (name, v) in [("F", f), ("A", a)] {
        if !(v > 0.0 && v <= 1.0 + 1e-9) {
            return Err(Error::OutOfRange { name, value: v });
        }
    }
    let mut out = table.clone();
    for (k, v) in out.values.iter_mut() {
        match k.kind {
            CorrelatorKind::I => {}
            CorrelatorKind::P => *v *= f,
            CorrelatorKind::Q => *v *= a,
        }
    }
    Ok(out)
}

/// Bob's Bloch component for the table's setting and the normalisation `K`,
/// which equals `p(+,+)` at zero temperature.
pub fn bloch_from_correlators(t: &CorrelatorTable) -> Result<(f64, f64)> {
    use Detector::*;
    let i = |d| t.get(&[d]);
    let p = |a, b| t.get(&[a, b]);
    let q = |a, b, c| t.get(&[a, b, c]);
    let (i0p, i0m, i1p, i1m) = (i(A0p)?, i(A0m)?, i(A1p)?, i(A1m)?);
    let db = i(B0)? - i(B1)?;
    let j = (q(A0p, A1p, B0)? - q(A0p, A1p, B1)?)
        + p(A0p, A1p)? * db
        + i1p * (p(A0p, B0)? - p(A0p, B1)?)
        + i0p * (p(A1p, B0)? - p(A1p, B1)?)
        + i0p * i1p * db;
    let k = i0p * i1p * (1.0 - (i0m + i1m))
        - (i0p * (p(A0m, A1p)? + p(A1p, A1m)?) + i1p * (p(A0p, A0m)? + p(A0p, A1m)?))
        - (q(A0p, A1p, A0m)? + q(A0p, A1p, A1m)?);
    if k.is_nan() || k <= 0.0 {
        return Err(Error::Degenerate { name: "K", value: k });
    }
    Ok((j / k, k))
}

/// Bloch vector assembled from the three per-setting tables.
pub fn bloch_from_tables(tables: &[CorrelatorTable; 3]) -> Result<BlochVector> {
    let mut r = [0.0; 3];
    for t in tables {
        r[t.setting.index()] = bloch_from_correlators(t)?.0;
    }
    Ok(BlochVector::new(r[0], r[1], r[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_examples() {
        assert_eq!(photoassist_amplitude(-1, 0.05), Complex64::from(0.0));
        assert!((photoassist_amplitude(0, 0.05).re - (-TAU * 0.05).exp()).abs() < 1e-15);
    }

    #[test]
    fn amplitudes_are_normalised() {
        for gamma in [0.02, 0.05, 0.1] {
            let total: f64 = (0..5000).map(|n| photoassist_amplitude(n, gamma).norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-10, "{gamma}: {total}");
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        for gamma in [0.05, 0.1] {
            let oracle = FourierOracle::new(gamma, 2000, 4096);
            for n in -3..=8 {
                let diff = (oracle.amplitude(n) - photoassist_amplitude(n, gamma)).norm();
                assert!(diff < 1e-6, "gamma {gamma}, n {n}: {diff}");
            }
        }
    }

    #[test]
    fn zero_temperature_factors_are_one() {
        for gamma in [0.02, 0.05, 0.1] {
            let t = thermal_factors(&LevitonParams::new(gamma, 0.0).unwrap()).unwrap();
            assert!((t.f - 1.0).abs() < 1e-10 && (t.a - 1.0).abs() < 1e-10, "{t:?}");
        }
    }

    #[test]
    fn kernels_are_continuous_at_the_series_switch() {
        let tau = 0.5 / 0.2;
        let below = thermal_kernels(1.0 - 1e-9, tau);
        let above = thermal_kernels(1.0 + 1e-9, tau);
        assert!((below.0 - above.0).abs() < 1e-9);
        assert!((below.1 - above.1).abs() < 1e-9);
    }

    #[test]
    fn high_temperature_ratio() {
        // Reference from an independent high-precision evaluation of the series.
        let t = thermal_factors(&LevitonParams::new(0.1, 10.0).unwrap()).unwrap();
        assert!((t.q - 0.0481).abs() < 5e-4, "{t:?}");
        let hot = leviton_fidelity(&LevitonParams::new(0.1, 1000.0).unwrap()).unwrap();
        assert!((hot - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn narrow_pulses_keep_coherence() {
        let q = |g| thermal_factors(&LevitonParams::new(g, 0.5).unwrap()).unwrap().q;
        assert!(q(0.02) > q(0.1));
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = LevitonParams::new(0.02, 0.3).unwrap().with_max_terms(5);
        assert!(matches!(thermal_factors(&p), Err(Error::NonConvergent { terms: 5, .. })));
    }

    #[test]
    fn invalid_parameters() {
        assert!(LevitonParams::new(0.0, 0.1).is_err());
        assert!(LevitonParams::new(0.1, -0.1).is_err());
        assert!(LevitonParams::new(0.1, 0.1).unwrap().with_tolerance(0.0).is_err());
    }

    #[test]
    fn table_entries_match_closed_forms() {
        let p = TeleportParams::new(0.3, 1.2).unwrap();
        for s in TomographySetting::ALL {
            let got = zero_t_correlators(&p, s).unwrap();
            let dev = got.max_deviation_from(&closed_form_correlators(&p, s)).unwrap();
            assert!(dev < 1e-10, "{s}: {dev}");
        }
    }

    #[test]
    fn reconstruction_at_zero_temperature() {
        let p = TeleportParams::new(0.3, 1.2).unwrap();
        let tables = TomographySetting::ALL.map(|s| zero_t_correlators(&p, s).unwrap());
        for t in &tables {
            assert!((bloch_from_correlators(t).unwrap().1 - 1.0 / 16.0).abs() < 1e-12);
        }
        assert!(bloch_from_tables(&tables).unwrap().max_abs_diff(&p.input_bloch()) < 1e-10);
    }

    #[test]
    fn keys_are_canonical() {
        use Detector::*;
        assert_eq!(CorrelatorKey::new(&[B0, A0p]).unwrap(), CorrelatorKey::new(&[A0p, B0]).unwrap());
        assert!(CorrelatorKey::new(&[B0, B0]).is_err());
        assert!(CorrelatorKey::new(&[]).is_err());
        assert_eq!(CorrelatorKey::new(&[A1p, A0p, B1]).unwrap().column_name(), "Q_A0p_A1p_B1 [e^3/T]");
    }

    #[test]
    fn scaling_leaves_currents() {
        let p = TeleportParams::new(0.6, 0.4).unwrap();
        let t = closed_form_correlators(&p, TomographySetting::X);
        let s = finite_t_correlators(&t, 0.5, 0.25).unwrap();
        use Detector::*;
        assert_eq!(s.get(&[A0p]).unwrap(), t.get(&[A0p]).unwrap());
        assert_eq!(s.get(&[A0p, B0]).unwrap(), 0.5 * t.get(&[A0p, B0]).unwrap());
        assert_eq!(s.get(&[A0p, A1p, B0]).unwrap(), 0.25 * t.get(&[A0p, A1p, B0]).unwrap());
        assert!(finite_t_correlators(&t, 0.0, 0.5).is_err());
    }
}
