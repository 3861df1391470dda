//! The six-mode teleportation network.
//!
//! Wires carry the source-side labels of [`INPUT6`]. After the preparation
//! layer they hold `A0, B′0, A1, B′1, A′0, A′1`; Alice's splitters mix
//! `(A0, A′0)` and `(A1, A′1)`, and the tomography splitter mixes `(B′0, B′1)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CircuitDescription, Element};
use crate::fock::{ModeRegistry, SingleParticleUnitary, INPUT6, OUTPUT6};
use crate::Result;

/// Canonical registry after the preparation layer.
pub const PREPARED6: [&str; 6] = ["Ap0", "Ap1", "A0", "A1", "Bp0", "Bp1"];
/// Canonical registry in front of Bob's tomography splitter.
pub const BEFORE_TOMOGRAPHY6: [&str; 6] = ["A0p", "A0m", "A1p", "A1m", "Bp0", "Bp1"];

const PREPARED_WIRES: [&str; 6] = ["A0", "Bp0", "A1", "Bp1", "Ap0", "Ap1"];
const BEFORE_TOMOGRAPHY_WIRES: [&str; 6] = ["A0p", "Bp0", "A1p", "Bp1", "A0m", "A1m"];
const FULL_WIRES: [&str; 6] = ["A0p", "B0", "A1p", "B1", "A0m", "A1m"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportSettings {
    /// Reflection probability `R` of the input-state splitter.
    pub reflection: f64,
    pub phi: f64,
    /// Transmission probability `D′` of Bob's tomography splitter.
    pub transmission_b: f64,
    pub theta: f64,
}

impl TeleportSettings {
    pub fn new(reflection: f64, phi: f64, transmission_b: f64, theta: f64) -> Self {
        Self { reflection, phi, transmission_b, theta }
    }
}

/// Fluctuating phases on the six propagation arms (radians).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmPhases {
    pub a_prime0: f64,
    pub a_prime1: f64,
    pub a0: f64,
    pub a1: f64,
    pub b_prime0: f64,
    pub b_prime1: f64,
}

impl ArmPhases {
    pub fn from_array(p: [f64; 6]) -> Self {
        Self { a_prime0: p[0], a_prime1: p[1], a0: p[2], a1: p[3], b_prime0: p[4], b_prime1: p[5] }
    }

    /// φ′ = φ_{A′0} + φ_{A1} + φ_{B0} − (φ_{A′1} + φ_{A0} + φ_{B1}).
    pub fn combined(&self) -> f64 {
        self.a_prime0 + self.a1 + self.b_prime0 - (self.a_prime1 + self.a0 + self.b_prime1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetworkStage {
    /// Source splitters only (modes A′, A, B′).
    Prepared,
    /// Everything up to, not including, Bob's tomography splitter.
    BeforeTomography,
    /// The complete network.
    Full,
}

impl NetworkStage {
    pub fn canonical_outputs(self) -> Arc<ModeRegistry> {
        let labels = match self {
            NetworkStage::Prepared => PREPARED6,
            NetworkStage::BeforeTomography => BEFORE_TOMOGRAPHY6,
            NetworkStage::Full => OUTPUT6,
        };
        Arc::new(ModeRegistry::new(labels).expect("static labels are unique"))
    }
}

/// Builds the wire-level description of the network up to `stage`.
pub fn teleport_description(
    settings: &TeleportSettings,
    stage: NetworkStage,
    phases: Option<&ArmPhases>,
) -> Result<CircuitDescription> {
    let [s0, g0, s1, g1, spsi, gpsi] = INPUT6;
    let mut d = CircuitDescription::new(INPUT6);
    d.push(Element::prep(spsi, gpsi, settings.reflection, settings.phi)?)
        .push(Element::sym(s0, g0))
        .push(Element::sym(s1, g1));
    if stage == NetworkStage::Prepared {
        return Ok(d.with_outputs(PREPARED_WIRES));
    }
    if let Some(p) = phases {
        for (wire, value) in
            [(spsi, p.a_prime0), (gpsi, p.a_prime1), (s0, p.a0), (s1, p.a1), (g0, p.b_prime0), (g1, p.b_prime1)]
        {
            d.push(Element::phase(wire, value));
        }
    }
    d.push(Element::sym(s0, spsi)).push(Element::sym(s1, gpsi));
    if stage == NetworkStage::BeforeTomography {
        return Ok(d.with_outputs(BEFORE_TOMOGRAPHY_WIRES));
    }
    d.push(Element::tomo(g0, g1, settings.transmission_b, settings.theta)?);
    Ok(d.with_outputs(FULL_WIRES))
}

/// Composes the network up to `stage` with rows in canonical order.
pub fn teleport_network(
    settings: &TeleportSettings,
    stage: NetworkStage,
    phases: Option<&ArmPhases>,
) -> Result<SingleParticleUnitary> {
    teleport_description(settings, stage, phases)?.compose()?.reorder_rows(stage.canonical_outputs())
}

/// The full 6×6 network, `INPUT6` columns and `OUTPUT6` rows.
pub fn builtin_teleport_network(
    reflection: f64,
    phi: f64,
    transmission_b: f64,
    theta: f64,
) -> Result<SingleParticleUnitary> {
    teleport_network(&TeleportSettings::new(reflection, phi, transmission_b, theta), NetworkStage::Full, None)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    #[test]
    fn input_splitter_entry_reaches_alice() {
        let (r, phi) = (0.3_f64, 0.9_f64);
        let u = builtin_teleport_network(r, phi, 0.5, 0.4).unwrap();
        let expect = Complex64::i() * r.sqrt() * Complex64::from_polar(1.0, -phi) / 2f64.sqrt();
        assert!((u.entry("A0p", "Spsi").unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn entangler_entry_reaches_bob() {
        let (dp, theta) = (0.7_f64, 1.1_f64);
        let u = builtin_teleport_network(0.2, 0.3, dp, theta).unwrap();
        let expect = dp.sqrt() * Complex64::from_polar(1.0, -theta) / 2f64.sqrt();
        assert!((u.entry("B0", "S0phi").unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn combined_phase_sign_pattern() {
        let p = ArmPhases::from_array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
        assert_eq!(p.combined(), 1.0 + 8.0 + 16.0 - (2.0 + 4.0 + 32.0));
    }

    #[test]
    fn stages_differ_by_the_tomography_splitter() {
        let s = TeleportSettings::new(0.4, 0.2, 0.5, 0.3);
        let d_before = teleport_description(&s, NetworkStage::BeforeTomography, None).unwrap();
        let d_full = teleport_description(&s, NetworkStage::Full, None).unwrap();
        assert_eq!(d_full.elements.len(), d_before.elements.len() + 1);
        assert_eq!(&d_full.elements[..d_before.elements.len()], &d_before.elements[..]);
    }
}
