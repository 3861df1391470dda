//! The ideal teleportation run.
//!
//! Three electrons are injected, scattered through the network and Alice
//! counts electrons at `A0±`, `A1±`. Bob's conditional state is read off the
//! remaining `B′0, B′1` occupations; tomography uses occupation expectations
//! after Bob's extra splitter.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::teleport::{teleport_network, BEFORE_TOMOGRAPHY6, PREPARED6};
use crate::circuit::{ArmPhases, CircuitDescription, Element, NetworkStage, TeleportSettings};
use crate::fock::{FockState, ModeRegistry, OccupationConfig, INPUT6};
use crate::{Error, Result};

/// Detector modes in outcome-bit order.
pub const ALICE_MODES: [&str; 4] = ["A0p", "A0m", "A1p", "A1m"];
/// Occupied sources of the initial state.
pub const SOURCES: [&str; 3] = ["S0phi", "S1phi", "Spsi"];

const QUBIT_TOLERANCE: f64 = 1e-12;

/// Bob's tomography splitter setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TomographySetting {
    X,
    Y,
    Z,
}

impl TomographySetting {
    pub const ALL: [Self; 3] = [Self::X, Self::Y, Self::Z];

    /// `(D′, θ)` for this Bloch component.
    pub fn splitter(self) -> (f64, f64) {
        match self {
            Self::X => (0.5, FRAC_PI_2),
            Self::Y => (0.5, 0.0),
            Self::Z => (1.0, 0.0),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TomographySetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::X => "X",
            Self::Y => "Y",
            Self::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Input-qubit parameters: reflection `R` (so `D = 1 - R`) and phase `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportParams {
    reflection: f64,
    phi: f64,
}

impl TeleportParams {
    /// Validates `R ∈ [0, 1]`; `φ` is wrapped into `[0, 2π)`.
    pub fn new(reflection: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflection) {
            return Err(Error::OutOfRange { name: "R", value: reflection });
        }
        if !phi.is_finite() {
            return Err(Error::OutOfRange { name: "phi", value: phi });
        }
        Ok(Self { reflection, phi: phi.rem_euclid(TAU) })
    }

    /// Pure input state with the given unit Bloch direction.
    pub fn from_bloch_direction(r: BlochVector) -> Result<Self> {
        let reflection = ((1.0 + r.z) / 2.0).clamp(0.0, 1.0);
        Self::new(reflection, r.x.atan2(-r.y))
    }

    pub fn reflection(&self) -> f64 {
        self.reflection
    }

    pub fn transmission(&self) -> f64 {
        1.0 - self.reflection
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn network_settings(&self, setting: TomographySetting) -> TeleportSettings {
        let (dp, theta) = setting.splitter();
        TeleportSettings::new(self.reflection, self.phi, dp, theta)
    }

    /// `(i√R e^{-iφ}, √D)`, the input qubit in the `(0, 1)` rail basis.
    pub fn input_amplitudes(&self) -> [Complex64; 2] {
        [
            Complex64::i() * self.reflection.sqrt() * Complex64::from_polar(1.0, -self.phi),
            Complex64::from(self.transmission().sqrt()),
        ]
    }

    pub fn input_state(&self) -> QubitState {
        let [a, b] = self.input_amplitudes();
        QubitState::pure(a, b)
    }

    /// `(2√(RD) sin φ, −2√(RD) cos φ, R − D)`.
    pub fn input_bloch(&self) -> BlochVector {
        let s = 2.0 * (self.reflection * self.transmission()).sqrt();
        BlochVector::new(s * self.phi.sin(), -s * self.phi.cos(), self.reflection - self.transmission())
    }
}

impl Default for TeleportParams {
    fn default() -> Self {
        Self { reflection: 0.5, phi: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn component(&self, s: TomographySetting) -> f64 {
        match s {
            TomographySetting::X => self.x,
            TomographySetting::Y => self.y,
            TomographySetting::Z => self.z,
        }
    }

    /// Transverse components scaled by `q`, `z` untouched.
    pub fn damped(&self, q: f64) -> Self {
        Self::new(q * self.x, q * self.y, self.z)
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs()).max((self.z - o.z).abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Dual-rail qubit density matrix in the `(B′0, B′1)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub rho: [[Complex64; 2]; 2],
}

impl QubitState {
    /// Checks hermiticity, unit trace and positivity.
    pub fn new(rho: [[Complex64; 2]; 2]) -> Result<Self> {
        let s = Self { rho };
        let herm = (rho[0][1] - rho[1][0].conj()).norm().max(rho[0][0].im.abs()).max(rho[1][1].im.abs());
        let trace = (rho[0][0] + rho[1][1] - 1.0).norm();
        let r = s.bloch().norm();
        if herm > QUBIT_TOLERANCE || trace > QUBIT_TOLERANCE || r > 1.0 + 1e-10 {
            return Err(Error::NormExceeded(r));
        }
        Ok(s)
    }

    pub fn pure(a: Complex64, b: Complex64) -> Self {
        Self { rho: [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]] }
    }

    /// `(I + r·σ)/2`.
    pub fn from_bloch(r: BlochVector) -> Self {
        let half = 0.5;
        Self {
            rho: [
                [Complex64::from(half * (1.0 + r.z)), Complex64::new(half * r.x, -half * r.y)],
                [Complex64::new(half * r.x, half * r.y), Complex64::from(half * (1.0 - r.z))],
            ],
        }
    }

    pub fn bloch(&self) -> BlochVector {
        let off = self.rho[0][1];
        BlochVector::new(2.0 * off.re, -2.0 * off.im, (self.rho[0][0] - self.rho[1][1]).re)
    }

    pub fn sigma_z_conjugated(&self) -> Self {
        let mut rho = self.rho;
        rho[0][1] = -rho[0][1];
        rho[1][0] = -rho[1][0];
        Self { rho }
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (self.rho[i][j] - o.rho[i][j]).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        0.5 * (1.0 - self.bloch().norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// Modes `A0±, A1±, B′0, B′1`.
    BeforeTomography,
    /// Modes `A0±, A1±, B0, B1` after Bob's splitter.
    AfterTomography(TomographySetting),
}

/// Evolves the three-source state through the network up to `stage`.
pub fn run_premeasurement(p: &TeleportParams, stage: Stage) -> Result<FockState> {
    run_with_phases(p, stage, None)
}

/// As [`run_premeasurement`], with fluctuating arm phases inserted.
pub fn run_with_phases(p: &TeleportParams, stage: Stage, phases: Option<&ArmPhases>) -> Result<FockState> {
    let (settings, network_stage) = match stage {
        Stage::BeforeTomography => (p.network_settings(TomographySetting::Z), NetworkStage::BeforeTomography),
        Stage::AfterTomography(s) => (p.network_settings(s), NetworkStage::Full),
    };
    let u = teleport_network(&settings, network_stage, phases)?;
    FockState::create_sources(ModeRegistry::input6(), &SOURCES)?.lift_apply(&u)
}

/// The state after the source splitters, on modes `A′, A, B′`.
pub fn prepared_state(p: &TeleportParams) -> Result<FockState> {
    let u = teleport_network(&p.network_settings(TomographySetting::Z), NetworkStage::Prepared, None)?;
    FockState::create_sources(ModeRegistry::input6(), &SOURCES)?.lift_apply(&u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Alice's click pattern `(j_{A0+}, j_{A0−}, j_{A1+}, j_{A1−})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub bits: [u8; 4],
}

impl MeasurementOutcome {
    pub const PLUS_PLUS: Self = Self { bits: [1, 0, 1, 0] };
    pub const MINUS_MINUS: Self = Self { bits: [0, 1, 0, 1] };
    pub const PLUS_MINUS: Self = Self { bits: [1, 0, 0, 1] };
    pub const MINUS_PLUS: Self = Self { bits: [0, 1, 1, 0] };
    /// The outcomes that leave Bob with the input qubit up to `σ_z`.
    pub const GOOD: [Self; 4] = [Self::PLUS_PLUS, Self::MINUS_MINUS, Self::PLUS_MINUS, Self::MINUS_PLUS];

    pub fn new(bits: [u8; 4]) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::OutOfRange { name: "outcome bit", value: f64::from(b) });
        }
        Ok(Self { bits })
    }

    pub fn from_signs(s0: Sign, s1: Sign) -> Self {
        let arm = |s| match s {
            Sign::Plus => (1, 0),
            Sign::Minus => (0, 1),
        };
        let ((a, b), (c, d)) = (arm(s0), arm(s1));
        Self { bits: [a, b, c, d] }
    }

    /// All sixteen patterns, in binary order.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..16).map(|k| Self { bits: [k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1] })
    }

    pub fn is_good(&self) -> bool {
        Self::GOOD.contains(self)
    }

    /// `(+,−)` and `(−,+)` need a `σ_z` correction.
    pub fn needs_sigma_z(&self) -> bool {
        *self == Self::PLUS_MINUS || *self == Self::MINUS_PLUS
    }

    pub fn clicks(&self) -> usize {
        self.bits.iter().map(|&b| usize::from(b)).sum()
    }

    /// `++`-style shorthand for good outcomes, bit tuple otherwise.
    pub fn label(&self) -> String {
        match *self {
            Self::PLUS_PLUS => "++".into(),
            Self::MINUS_MINUS => "--".into(),
            Self::PLUS_MINUS => "+-".into(),
            Self::MINUS_PLUS => "-+".into(),
            _ => self.to_string(),
        }
    }
}

impl fmt::Display for MeasurementOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.bits;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// `E(X) = Π_i N_i^{j_i} (I − N_i)^{1−j_i}` over Alice's four detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PovmElement {
    pub outcome: MeasurementOutcome,
}

pub fn povm_element(x: MeasurementOutcome) -> PovmElement {
    PovmElement { outcome: x }
}

impl PovmElement {
    fn detector_indices(registry: &ModeRegistry) -> Result<[usize; 4]> {
        let mut idx = [0; 4];
        for (slot, label) in idx.iter_mut().zip(ALICE_MODES) {
            *slot = registry.index_of(label)?;
        }
        Ok(idx)
    }

    fn eigenvalue(&self, idx: &[usize; 4], cfg: OccupationConfig) -> f64 {
        let hit = idx.iter().zip(self.outcome.bits).all(|(&i, j)| cfg.occupation(i) == j);
        if hit {
            1.0
        } else {
            0.0
        }
    }

    /// Eigenvalue of `E(X)` on a configuration of `registry`.
    pub fn weight(&self, registry: &ModeRegistry, cfg: OccupationConfig) -> Result<f64> {
        Ok(self.eigenvalue(&Self::detector_indices(registry)?, cfg))
    }

    /// The diagonal of `E(X)` over every `particles`-electron configuration.
    pub fn weights(&self, registry: &ModeRegistry, particles: usize) -> Result<Vec<(OccupationConfig, f64)>> {
        let idx = Self::detector_indices(registry)?;
        Ok(crate::fock::configurations(registry.len(), particles)
            .into_iter()
            .map(|c| (c, self.eigenvalue(&idx, c)))
            .collect())
    }

    /// `E(X)|s⟩`, renormalised, with its probability `⟨s|E(X)|s⟩`.
    pub fn apply(&self, s: &FockState) -> Result<crate::fock::Projection> {
        let idx = Self::detector_indices(s.registry())?;
        Ok(s.project_where(|c| self.eigenvalue(&idx, c) == 1.0))
    }

    pub fn expectation(&self, s: &FockState) -> Result<f64> {
        let idx = Self::detector_indices(s.registry())?;
        Ok(s.expectation(|c| self.eigenvalue(&idx, c)))
    }
}

/// `p(X) = ⟨Ψ|E(X)|Ψ⟩` with `|Ψ⟩` in front of Bob's tomography splitter.
pub fn outcome_probability(p: &TeleportParams, x: MeasurementOutcome) -> Result<f64> {
    povm_element(x).expectation(&run_premeasurement(p, Stage::BeforeTomography)?)
}

/// Probabilities of all sixteen outcomes from one simulation.
pub fn outcome_table(p: &TeleportParams) -> Result<Vec<(MeasurementOutcome, f64)>> {
    let s = run_premeasurement(p, Stage::BeforeTomography)?;
    MeasurementOutcome::all().map(|x| Ok((x, povm_element(x).expectation(&s)?))).collect()
}

/// Bob's conditional electron count when he does not hold a qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonQubitReport {
    pub outcome: MeasurementOutcome,
    pub probability: f64,
    /// Probability that Bob holds 0, 1 or 2 electrons.
    pub bob_electrons: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BobConditional {
    Qubit(QubitState),
    NonQubit(NonQubitReport),
}

impl BobConditional {
    pub fn qubit(&self) -> Option<&QubitState> {
        match self {
            BobConditional::Qubit(q) => Some(q),
            BobConditional::NonQubit(_) => None,
        }
    }
}

/// Conditions a state on the before-tomography registry on outcome `x`.
/// Returns `p(X)` and Bob's state.
pub fn condition_on(s: &FockState, x: MeasurementOutcome) -> Result<(f64, BobConditional)> {
    let reg = s.registry();
    let b0 = reg.index_of(BEFORE_TOMOGRAPHY6[4])?;
    let b1 = reg.index_of(BEFORE_TOMOGRAPHY6[5])?;
    let projection = povm_element(x).apply(s)?;
    let Some(post) = projection.state else {
        return Err(Error::ZeroProbability(x.to_string()));
    };
    let mut electrons = [0.0; 3];
    for (cfg, amp) in post.amplitudes() {
        electrons[cfg.occupation(b0) as usize + cfg.occupation(b1) as usize] += amp.norm_sqr();
    }
    if x.is_good() && (electrons[1] - 1.0).abs() < QUBIT_TOLERANCE {
        // The A part is a single fixed configuration and precedes the B′
        // modes in index order, so Bob's amplitudes carry no extra sign.
        let mut amp = [Complex64::default(); 2];
        for (cfg, a) in post.amplitudes() {
            if cfg.is_occupied(b0) {
                amp[0] += a;
            } else {
                amp[1] += a;
            }
        }
        return Ok((projection.probability, BobConditional::Qubit(QubitState::pure(amp[0], amp[1]))));
    }
    Ok((
        projection.probability,
        BobConditional::NonQubit(NonQubitReport {
            outcome: x,
            probability: projection.probability,
            bob_electrons: electrons,
        }),
    ))
}

/// Bob's state conditioned on Alice's outcome, `Tr_A(E(X)ρ)/p(X)`.
pub fn bob_conditional(p: &TeleportParams, x: MeasurementOutcome) -> Result<BobConditional> {
    Ok(condition_on(&run_premeasurement(p, Stage::BeforeTomography)?, x)?.1)
}

/// Probability mass of outcomes that end in a teleported qubit.
pub fn efficiency_at(p: &TeleportParams, with_feedforward: bool) -> Result<f64> {
    let s = run_premeasurement(p, Stage::BeforeTomography)?;
    let mut total = 0.0;
    for x in MeasurementOutcome::GOOD {
        if !with_feedforward && x.needs_sigma_z() {
            continue;
        }
        let (prob, bob) = condition_on(&s, x)?;
        let Some(q) = bob.qubit() else { continue };
        let q = if x.needs_sigma_z() { q.sigma_z_conjugated() } else { *q };
        if q.max_abs_diff(&p.input_state()) < 1e-10 {
            total += prob;
        }
    }
    Ok(total)
}

/// Success probability at `R = 1/2, φ = 0`.
pub fn efficiency(with_feedforward: bool) -> Result<f64> {
    efficiency_at(&TeleportParams::default(), with_feedforward)
}

/// Numerator and denominator of the occupation-number tomography formula
/// for one setting.
pub fn tomography_terms(p: &TeleportParams, setting: TomographySetting) -> Result<(f64, f64)> {
    let s = run_premeasurement(p, Stage::AfterTomography(setting))?;
    let reg = s.registry();
    let [a0p, a0m, a1p, a1m, b0, b1] = ["A0p", "A0m", "A1p", "A1m", "B0", "B1"].map(|l| reg.index_of(l));
    let (a0p, a0m, a1p, a1m, b0, b1) = (a0p?, a0m?, a1p?, a1m?, b0?, b1?);
    let n = |c: OccupationConfig, i| f64::from(c.occupation(i));
    let num = s.expectation(|c| n(c, a0p) * n(c, a1p) * (n(c, b0) - n(c, b1)));
    let den = s.expectation(|c| n(c, a0p) * n(c, a1p) * (1.0 - n(c, a0m) - n(c, a1m)));
    Ok((num, den))
}

/// Bloch vector of Bob's `++` state from occupation numbers only.
pub fn tomography_bloch(p: &TeleportParams) -> Result<BlochVector> {
    let mut r = [0.0; 3];
    for s in TomographySetting::ALL {
        let (num, den) = tomography_terms(p, s)?;
        if den.abs() < 1e-300 {
            return Err(Error::Degenerate { name: "tomography denominator", value: den });
        }
        r[s.index()] = num / den;
    }
    Ok(BlochVector::new(r[0], r[1], r[2]))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn registry(labels: [&str; 6]) -> Arc<ModeRegistry> {
    Arc::new(ModeRegistry::new(labels).expect("static labels are unique"))
}

/// `|T⟩`: the part of the pre-measurement state useful for teleportation.
pub fn t_state(p: &TeleportParams) -> Result<FockState> {
    let [alpha, beta] = p.input_amplitudes();
    let mi = -Complex64::i();
    let mut terms = Vec::new();
    for (pair, sign) in [(["A0p", "A1p"], 1.0), (["A0m", "A1m"], 1.0)] {
        terms.push((alpha * sign, vec![pair[0], pair[1], "Bp0"]));
        terms.push((beta * sign, vec![pair[0], pair[1], "Bp1"]));
    }
    for (pair, sign) in [(["A0p", "A1m"], 1.0), (["A0m", "A1p"], -1.0)] {
        terms.push((mi * sign * alpha, vec![pair[0], pair[1], "Bp0"]));
        terms.push((mi * sign * -beta, vec![pair[0], pair[1], "Bp1"]));
    }
    FockState::from_terms(registry(BEFORE_TOMOGRAPHY6), &terms)
}

/// `|R⟩`: the remainder orthogonal to `|T⟩`.
pub fn r_state(p: &TeleportParams) -> Result<FockState> {
    let [alpha, beta] = p.input_amplitudes();
    let i = Complex64::i();
    let h = FRAC_1_SQRT_2;
    let sr_e = p.reflection().sqrt() * Complex64::from_polar(1.0, -p.phi());
    let sd = p.transmission().sqrt();
    let terms = vec![
        (-alpha * h * i, vec!["A0p", "A0m", "A1p"]),
        (-alpha * h, vec!["A0p", "A0m", "A1m"]),
        (beta * h * i, vec!["A0p", "A1p", "A1m"]),
        (beta * h, vec!["A0m", "A1p", "A1m"]),
        (alpha * h, vec!["A0p", "Bp0", "Bp1"]),
        (alpha * h * i, vec!["A0m", "Bp0", "Bp1"]),
        (beta * h, vec!["A1p", "Bp0", "Bp1"]),
        (beta * h * i, vec!["A1m", "Bp0", "Bp1"]),
        (-sr_e, vec!["A0p", "A0m", "Bp1"]),
        (-i * sd, vec!["A1p", "A1m", "Bp0"]),
    ];
    FockState::from_terms(registry(BEFORE_TOMOGRAPHY6), &terms)
}

/// The Bell basis `[Ψ⁺, Ψ⁻, Φ⁺, Φ⁻]` for rails `(x0, x1)` and `(y0, y1)`:
/// `Ψ± = (a†_{x0} a†_{y1} ± a†_{x1} a†_{y0})/√2`, `Φ± = (a†_{x0} a†_{y0} ± a†_{x1} a†_{y1})/√2`.
pub fn bell_states(registry: &Arc<ModeRegistry>, x: [&str; 2], y: [&str; 2]) -> Result<[FockState; 4]> {
    let one = c(1.0, 0.0);
    let make = |first: [&str; 2], second: [&str; 2], sign: f64| {
        FockState::from_terms(registry.clone(), &[(one, first.to_vec()), (one * sign, second.to_vec())])
    };
    Ok([
        make([x[0], y[1]], [x[1], y[0]], 1.0)?,
        make([x[0], y[1]], [x[1], y[0]], -1.0)?,
        make([x[0], y[0]], [x[1], y[1]], 1.0)?,
        make([x[0], y[0]], [x[1], y[1]], -1.0)?,
    ])
}

/// The four terms of the dual-rail decomposition, in the order
/// `Ψ⁻⊗ψ, Ψ⁺⊗σ_zψ, Φ⁺⊗iσ_yψ, Φ⁻⊗σ_xψ` on modes `A′, A, B′`.
pub fn decomposition_terms(p: &TeleportParams) -> Result<[FockState; 4]> {
    let [alpha, beta] = p.input_amplitudes();
    let reg = registry(PREPARED6);
    let build = |pair_a: [&str; 2], pair_b: [&str; 2], sign: f64, bob: [Complex64; 2]| {
        let mut terms = Vec::new();
        for (pair, s) in [(pair_a, 1.0), (pair_b, sign)] {
            terms.push((bob[0] * s, vec![pair[0], pair[1], "Bp0"]));
            terms.push((bob[1] * s, vec![pair[0], pair[1], "Bp1"]));
        }
        FockState::from_terms(reg.clone(), &terms)
    };
    Ok([
        build(["Ap0", "A1"], ["Ap1", "A0"], -1.0, [alpha, beta])?,
        build(["Ap0", "A1"], ["Ap1", "A0"], 1.0, [alpha, -beta])?,
        build(["Ap0", "A0"], ["Ap1", "A1"], 1.0, [beta, -alpha])?,
        build(["Ap0", "A0"], ["Ap1", "A1"], -1.0, [beta, alpha])?,
    ])
}

/// Alice's two splitters on the registry `[A′0, A′1, A0, A1]`, rows `A0±, A1±`.
pub fn alice_splitters() -> Result<crate::fock::SingleParticleUnitary> {
    let mut d = CircuitDescription::new(["Ap0", "Ap1", "A0", "A1"]);
    d.push(Element::sym("A0", "Ap0")).push(Element::sym("A1", "Ap1"));
    d.with_outputs(["A0m", "A1m", "A0p", "A1p"]).compose()?.reorder_rows(Arc::new(ModeRegistry::new(ALICE_MODES)?))
}

/// `E_drq(X) = P_drq E(X) P_drq` in the `[Ψ⁺, Ψ⁻, Φ⁺, Φ⁻]_{A′A}` basis.
pub fn projected_povm(x: MeasurementOutcome) -> Result<[[Complex64; 4]; 4]> {
    let u = alice_splitters()?;
    let bells = bell_states(u.cols(), ["Ap0", "Ap1"], ["A0", "A1"])?;
    let evolved: Vec<FockState> = bells.iter().map(|b| b.lift_apply(&u)).collect::<Result<_>>()?;
    let e = povm_element(x);
    let mut out = [[Complex64::default(); 4]; 4];
    for (i, bi) in evolved.iter().enumerate() {
        for (j, bj) in evolved.iter().enumerate() {
            let mut acc = Complex64::default();
            for (cfg, a) in bi.amplitudes() {
                acc += a.conj() * bj.amplitude(cfg) * e.weight(bj.registry(), cfg)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// The projected POVM elements expected for two-electron detections.
pub fn expected_projected_povm(x: MeasurementOutcome) -> [[Complex64; 4]; 4] {
    let outer = |v: [Complex64; 4]| {
        let mut m = [[Complex64::default(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = 0.5 * v[i] * v[j].conj();
            }
        }
        m
    };
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match x.bits {
        [1, 0, 1, 0] | [0, 1, 0, 1] => outer([z, o, z, z]),
        [1, 0, 0, 1] | [0, 1, 1, 0] => outer([o, z, z, z]),
        [1, 1, 0, 0] => outer([z, z, o, o]),
        [0, 0, 1, 1] => outer([z, z, o, -o]),
        _ => [[z; 4]; 4],
    }
}

/// Dual-rail structure of the prepared state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrqReport {
    /// Squared norm of the dual-rail projection of the prepared state.
    pub dual_rail_weight: f64,
    /// max |⟨B_i|B_j⟩ − δ_ij| over the four Bell states.
    pub bell_gram_deviation: f64,
    /// |⟨term_k|Ψ⟩| for the four decomposition terms.
    pub decomposition_overlaps: [f64; 4],
    /// Norm of the part of the dual-rail projection outside the four terms.
    pub decomposition_residual: f64,
    /// max entry deviation of `E_drq(X)` from the expected projectors.
    pub projected_povm_deviation: f64,
    pub t_overlap: f64,
    pub r_overlap: f64,
    /// |⟨T|R⟩|.
    pub t_r_overlap: f64,
}

/// Dual-rail checks at the given input parameters.
pub fn drq_projection_checks_at(p: &TeleportParams) -> Result<DrqReport> {
    let prepared = prepared_state(p)?;
    let reg = prepared.registry().clone();
    let rail = |labels: [&str; 2]| -> Result<OccupationConfig> { reg.mask_of(&labels) };
    let (ap, a, bp) = (rail(["Ap0", "Ap1"])?, rail(["A0", "A1"])?, rail(["Bp0", "Bp1"])?);
    let one_each = |cfg: OccupationConfig| [ap, a, bp].iter().all(|m| (cfg.0 & m.0).count_ones() == 1);
    let projection = prepared.project_where(one_each);
    let weight = projection.probability;
    let projected = projection.state.ok_or(Error::ZeroNorm)?;

    let bells = bell_states(&reg, ["A0", "A1"], ["Bp0", "Bp1"])?;
    let mut gram = 0.0_f64;
    for (i, bi) in bells.iter().enumerate() {
        for (j, bj) in bells.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((bi.inner(bj)? - expect).norm());
        }
    }

    let terms = decomposition_terms(p)?;
    let mut overlaps = [0.0; 4];
    for (o, t) in overlaps.iter_mut().zip(&terms) {
        *o = t.inner(&prepared)?.norm();
    }
    let captured: f64 = terms.iter().map(|t| t.inner(&projected).map(|v| v.norm_sqr())).sum::<Result<f64>>()?;
    let residual = (1.0 - captured).max(0.0).sqrt() * weight.sqrt();

    let mut povm_dev = 0.0_f64;
    for x in MeasurementOutcome::all() {
        let got = projected_povm(x)?;
        let want = expected_projected_povm(x);
        for i in 0..4 {
            for j in 0..4 {
                povm_dev = povm_dev.max((got[i][j] - want[i][j]).norm());
            }
        }
    }

    let psi = run_premeasurement(p, Stage::BeforeTomography)?;
    let t = t_state(p)?;
    let r = r_state(p)?;
    Ok(DrqReport {
        dual_rail_weight: weight,
        bell_gram_deviation: gram,
        decomposition_overlaps: overlaps,
        decomposition_residual: residual,
        projected_povm_deviation: povm_dev,
        t_overlap: t.inner(&psi)?.norm(),
        r_overlap: r.inner(&psi)?.norm(),
        t_r_overlap: t.inner(&r)?.norm(),
    })
}

/// Dual-rail checks at a generic input state (`R = 0.3`, `φ = 1.2`).
pub fn drq_projection_checks() -> Result<DrqReport> {
    drq_projection_checks_at(&TeleportParams::new(0.3, 1.2)?)
}

/// Sanity check that `INPUT6` is the registry the network expects.
pub fn source_registry() -> Arc<ModeRegistry> {
    let r = ModeRegistry::input6();
    debug_assert_eq!(r.labels(), INPUT6);
    r
}
