//! Scattering networks built from two-mode splitters and phase shifters.
//!
//! Elements act on *wires*. A splitter on wires `(a, b)` replaces the
//! annihilation operators on those wires by `S · (a_a, a_b)ᵀ`, so its first
//! output lands on wire `a` and its second on wire `b`. The composed matrix
//! has the declared `modes` as columns and, unless an `outputs` line renames
//! them, the same wires as rows.

mod parse;
pub mod teleport;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{ModeRegistry, SingleParticleUnitary};
use crate::linalg::CMatrix;
use crate::{Error, Result};

pub use parse::parse_circuit;
pub use teleport::{builtin_teleport_network, teleport_description, ArmPhases, NetworkStage, TeleportSettings};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64, name: &'static str) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::OutOfRange { name, value })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Element {
    /// Input-state splitter with reflection probability `R` and phase `φ`.
    Prep { modes: [String; 2], reflection: Probability, phi: f64 },
    /// 50/50 splitter `(i 1; 1 i)/√2`.
    Sym { modes: [String; 2] },
    /// Tomography splitter with transmission `D′` and phase `θ`.
    Tomo { modes: [String; 2], transmission: Probability, theta: f64 },
    /// Single-mode phase `e^{-i value}`.
    Phase { mode: String, value: f64 },
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::Prep { .. } => "prep",
            Element::Sym { .. } => "sym",
            Element::Tomo { .. } => "tomo",
            Element::Phase { .. } => "phase",
        }
    }

    pub fn modes(&self) -> Vec<&str> {
        match self {
            Element::Prep { modes, .. } | Element::Sym { modes } | Element::Tomo { modes, .. } => {
                vec![&modes[0], &modes[1]]
            }
            Element::Phase { mode, .. } => vec![mode],
        }
    }

    pub fn sym(a: &str, b: &str) -> Self {
        Element::Sym { modes: [a.into(), b.into()] }
    }

    pub fn prep(a: &str, b: &str, reflection: f64, phi: f64) -> Result<Self> {
        Ok(Element::Prep { modes: [a.into(), b.into()], reflection: Probability::new(reflection, "R")?, phi })
    }

    pub fn tomo(a: &str, b: &str, transmission: f64, theta: f64) -> Result<Self> {
        Ok(Element::Tomo { modes: [a.into(), b.into()], transmission: Probability::new(transmission, "Dp")?, theta })
    }

    pub fn phase(mode: &str, value: f64) -> Self {
        Element::Phase { mode: mode.into(), value }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Prep { modes: [a, b], reflection, phi } => {
                write!(f, "prep {a} {b} R={} phi={phi}", reflection.get())
            }
            Element::Sym { modes: [a, b] } => write!(f, "sym {a} {b}"),
            Element::Tomo { modes: [a, b], transmission, theta } => {
                write!(f, "tomo {a} {b} Dp={} theta={theta}", transmission.get())
            }
            Element::Phase { mode, value } => write!(f, "phase {mode} value={value}"),
        }
    }
}

fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// 2×2 splitter block, or the 1×1 phase factor for a phase shifter.
pub fn element_matrix(e: &Element) -> CMatrix {
    let i = Complex64::i();
    match e {
        Element::Prep { reflection, phi, .. } => {
            let r = reflection.get().sqrt();
            let d = reflection.complement().sqrt();
            let ph = cis(-phi);
            CMatrix::from_rows(&[[i * r * ph, d * ph], [Complex64::from(d), i * r]])
        }
        Element::Sym { .. } => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            CMatrix::from_rows(&[[i * h, Complex64::from(h)], [Complex64::from(h), i * h]])
        }
        Element::Tomo { transmission, theta, .. } => {
            let d = transmission.get().sqrt();
            let r = transmission.complement().sqrt();
            let ph = cis(-theta);
            CMatrix::from_rows(&[[d * ph, -i * r], [-i * r * ph, Complex64::from(d)]])
        }
        Element::Phase { value, .. } => CMatrix::from_rows(&[[cis(-value)]]),
    }
}

/// Parsed or programmatically built network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDescription {
    pub modes: Vec<String>,
    /// Names of the wires after the last element; `None` keeps `modes`.
    pub outputs: Option<Vec<String>>,
    /// Elements in application order.
    pub elements: Vec<Element>,
}

impl CircuitDescription {
    pub fn new<S: Into<String>>(modes: impl IntoIterator<Item = S>) -> Self {
        Self { modes: modes.into_iter().map(Into::into).collect(), outputs: None, elements: Vec::new() }
    }

    pub fn with_outputs<S: Into<String>>(mut self, outputs: impl IntoIterator<Item = S>) -> Self {
        self.outputs = Some(outputs.into_iter().map(Into::into).collect());
        self
    }

    pub fn push(&mut self, e: Element) -> &mut Self {
        self.elements.push(e);
        self
    }

    /// Embeds every element into the identity and multiplies in order.
    pub fn compose(&self) -> Result<SingleParticleUnitary> {
        compose(self)
    }
}

impl fmt::Display for CircuitDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modes {}", self.modes.join(" "))?;
        if let Some(out) = &self.outputs {
            writeln!(f, "outputs {}", out.join(" "))?;
        }
        for e in &self.elements {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn compose(c: &CircuitDescription) -> Result<SingleParticleUnitary> {
    let cols = Arc::new(ModeRegistry::new(c.modes.iter().cloned())?);
    let rows = match &c.outputs {
        None => cols.clone(),
        Some(out) => {
            if out.len() != cols.len() {
                return Err(Error::DimensionMismatch { expected: cols.len(), found: out.len() });
            }
            Arc::new(ModeRegistry::new(out.iter().cloned())?)
        }
    };
    let mut u = CMatrix::identity(cols.len());
    for e in &c.elements {
        let m = element_matrix(e);
        match e.modes().as_slice() {
            [a] => u.scale_row(cols.index_of(a)?, m[(0, 0)]),
            [a, b] => {
                let (ia, ib) = (cols.index_of(a)?, cols.index_of(b)?);
                if ia == ib {
                    return Err(Error::DuplicateMode((*a).to_owned()));
                }
                u.mix_rows(ia, ib, [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]);
            }
            _ => unreachable!("elements act on one or two modes"),
        }
    }
    SingleParticleUnitary::new(u, rows, cols)
}
