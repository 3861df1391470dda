//! Sparse fermionic Fock space at fixed particle number.
//!
//! A configuration is a bit field over the modes of a [`ModeRegistry`]; bit
//! `i` is the occupation of the mode with index `i`. The basis state of a
//! configuration is `a†_{i1} a†_{i2} … a†_{iN} |Ω⟩` with `i1 < i2 < … < iN`,
//! which fixes every relative sign.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Amplitudes smaller than this are dropped after lifting.
pub const PRUNE_THRESHOLD: f64 = 1e-14;
/// Largest tolerated max |U†U - I| for a [`SingleParticleUnitary`].
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Source-side modes, in the column order of the full teleportation network.
pub const INPUT6: [&str; 6] = ["S0phi", "G0phi", "S1phi", "G1phi", "Spsi", "Gpsi"];
/// Detector-side modes, in the row order of the full teleportation network.
pub const OUTPUT6: [&str; 6] = ["A0p", "A0m", "A1p", "A1m", "B0", "B1"];

const MAX_MODES: usize = 32;

/// Ordered, unique mode labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeRegistry {
    labels: Vec<String>,
}

impl ModeRegistry {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_MODES {
            return Err(Error::TooManyModes(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateMode(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn input6() -> Arc<Self> {
        Arc::new(Self::new(INPUT6).expect("static labels are unique"))
    }

    pub fn output6() -> Arc<Self> {
        Arc::new(Self::new(OUTPUT6).expect("static labels are unique"))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownMode(label.to_owned()))
    }

    /// Bit mask of the given labels; rejects duplicates.
    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<OccupationConfig> {
        let mut cfg = OccupationConfig::EMPTY;
        for l in labels {
            let i = self.index_of(l.as_ref())?;
            if cfg.is_occupied(i) {
                return Err(Error::DuplicateMode(l.as_ref().to_owned()));
            }
            cfg = cfg.with(i);
        }
        Ok(cfg)
    }
}

/// Occupation bit field, least-significant bit = registry index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OccupationConfig(pub u32);

impl OccupationConfig {
    pub const EMPTY: Self = Self(0);

    pub fn is_occupied(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn occupation(self, index: usize) -> u8 {
        (self.0 >> index & 1) as u8
    }

    pub fn with(self, index: usize) -> Self {
        Self(self.0 | 1 << index)
    }

    pub fn without(self, index: usize) -> Self {
        Self(self.0 & !(1 << index))
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Number of occupied modes with index below `index`.
    pub fn count_below(self, index: usize) -> usize {
        (self.0 & ((1u32 << index) - 1)).count_ones() as usize
    }

    /// Occupied indices in ascending order.
    pub fn occupied(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn intersects(self, mask: Self) -> bool {
        self.0 & mask.0 != 0
    }

    pub fn contains(self, mask: Self) -> bool {
        self.0 & mask.0 == mask.0
    }
}

/// All configurations of `particles` fermions in `modes` modes, ascending.
pub fn configurations(modes: usize, particles: usize) -> Vec<OccupationConfig> {
    if particles > modes {
        return Vec::new();
    }
    if particles == 0 {
        return vec![OccupationConfig::EMPTY];
    }
    let limit: u64 = 1 << modes;
    let mut out = Vec::new();
    let mut v: u64 = (1 << particles) - 1;
    while v < limit {
        out.push(OccupationConfig(v as u32));
        // Gosper's hack: next integer with the same popcount.
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Fixed-particle-number state with sparse amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    registry: Arc<ModeRegistry>,
    particles: usize,
    amplitudes: BTreeMap<OccupationConfig, Complex64>,
}

impl FockState {
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(OccupationConfig::EMPTY, Complex64::new(1.0, 0.0));
        Self { registry, particles: 0, amplitudes }
    }

    /// Product of creation operators on the vacuum, in ascending index order.
    pub fn create_sources<S: AsRef<str>>(registry: Arc<ModeRegistry>, occupied: &[S]) -> Result<Self> {
        let cfg = registry.mask_of(occupied)?;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(cfg, Complex64::new(1.0, 0.0));
        Ok(Self { registry, particles: occupied.len(), amplitudes })
    }

    /// Normalised `Σ_k c_k a†_{l_k1} a†_{l_k2} … |Ω⟩`, with the creation
    /// operators applied right to left as written.
    pub fn from_terms<S: AsRef<str>>(registry: Arc<ModeRegistry>, terms: &[(Complex64, Vec<S>)]) -> Result<Self> {
        let mut amplitudes: BTreeMap<OccupationConfig, Complex64> = BTreeMap::new();
        let mut particles = None;
        for (coeff, labels) in terms {
            match particles {
                None => particles = Some(labels.len()),
                Some(n) if n != labels.len() => {
                    return Err(Error::MixedParticleNumber(n, labels.len()));
                }
                _ => {}
            }
            let mut cfg = OccupationConfig::EMPTY;
            let mut amp = *coeff;
            let mut vanished = false;
            for l in labels.iter().rev() {
                let i = registry.index_of(l.as_ref())?;
                if cfg.is_occupied(i) {
                    vanished = true;
                    break;
                }
                if cfg.count_below(i) % 2 == 1 {
                    amp = -amp;
                }
                cfg = cfg.with(i);
            }
            if !vanished {
                *amplitudes.entry(cfg).or_default() += amp;
            }
        }
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let mut state = Self { registry, particles: particles.unwrap_or(0), amplitudes };
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        state.scale(1.0 / norm);
        Ok(state)
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn particle_number(&self) -> usize {
        self.particles
    }

    pub fn amplitude(&self, cfg: OccupationConfig) -> Complex64 {
        self.amplitudes.get(&cfg).copied().unwrap_or_default()
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (OccupationConfig, Complex64)> + '_ {
        self.amplitudes.iter().map(|(c, a)| (*c, *a))
    }

    /// Number of stored configurations.
    pub fn support_size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(Complex64::norm_sqr).sum()
    }

    fn scale(&mut self, factor: f64) {
        for a in self.amplitudes.values_mut() {
            *a *= factor;
        }
    }

    fn ensure_same_registry(&self, other: &Self) -> Result<()> {
        if self.registry.labels() != other.registry.labels() {
            return Err(Error::RegistryMismatch(format!(
                "{:?} vs {:?}",
                self.registry.labels(),
                other.registry.labels()
            )));
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.ensure_same_registry(other)?;
        Ok(self.amplitudes.iter().filter_map(|(c, a)| other.amplitudes.get(c).map(|b| a.conj() * b)).sum())
    }

    /// Largest amplitude difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.ensure_same_registry(other)?;
        let keys = self.amplitudes.keys().chain(other.amplitudes.keys());
        Ok(keys.map(|c| (self.amplitude(*c) - other.amplitude(*c)).norm()).fold(0.0, f64::max))
    }

    /// Evolves the state with the second-quantised lift of `u`.
    pub fn lift_apply(&self, u: &SingleParticleUnitary) -> Result<Self> {
        lift_apply(u, self)
    }

    /// Expectation of a diagonal operator given by its eigenvalue per configuration.
    pub fn expectation<F: Fn(OccupationConfig) -> f64>(&self, weight: F) -> f64 {
        self.amplitudes.iter().map(|(c, a)| a.norm_sqr() * weight(*c)).sum()
    }

    /// Keeps the configurations accepted by `keep` and renormalises.
    pub fn project_where<F: Fn(OccupationConfig) -> bool>(&self, keep: F) -> Projection {
        let amplitudes: BTreeMap<_, _> =
            self.amplitudes.iter().filter(|(c, _)| keep(**c)).map(|(c, a)| (*c, *a)).collect();
        let probability: f64 = amplitudes.values().map(Complex64::norm_sqr).sum();
        if probability == 0.0 {
            return Projection { probability, state: None };
        }
        let mut state = Self { registry: self.registry.clone(), particles: self.particles, amplitudes };
        state.scale(1.0 / probability.sqrt());
        Projection { probability, state: Some(state) }
    }

    /// Projective measurement of `N_mode` with result `n`.
    pub fn project_number(&self, mode: &str, n: u8) -> Result<Projection> {
        if n > 1 {
            return Err(Error::OutOfRange { name: "occupation", value: f64::from(n) });
        }
        let i = self.registry.index_of(mode)?;
        Ok(self.project_where(|c| c.occupation(i) == n))
    }

    /// ⟨N_α⟩, ⟨ΔN_α ΔN_β⟩ or ⟨ΔN_α ΔN_β ΔN_γ⟩ for one, two or three labels.
    pub fn occupation_moments<S: AsRef<str>>(&self, labels: &[S]) -> Result<f64> {
        if labels.is_empty() || labels.len() > 3 {
            return Err(Error::MomentOrder(labels.len()));
        }
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.registry.index_of(l.as_ref())?;
            if idx.contains(&i) {
                return Err(Error::RepeatedLabel(l.as_ref().to_owned()));
            }
            idx.push(i);
        }
        let means: Vec<f64> = idx.iter().map(|&i| self.expectation(|c| f64::from(c.occupation(i)))).collect();
        if idx.len() == 1 {
            return Ok(means[0]);
        }
        Ok(self.expectation(|c| idx.iter().zip(&means).map(|(&i, m)| f64::from(c.occupation(i)) - m).product()))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (cfg, amp)) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let labels: Vec<&str> = cfg.occupied().map(|k| self.registry.label(k)).collect();
            write!(f, "({:.6}{:+.6}i)|{}⟩", amp.re, amp.im, labels.join(","))?;
        }
        Ok(())
    }
}

/// Outcome of a projective measurement; `state` is `None` at zero probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    pub state: Option<FockState>,
}

/// Unitary single-particle scattering matrix between two labelled mode sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleUnitary {
    matrix: CMatrix,
    rows: Arc<ModeRegistry>,
    cols: Arc<ModeRegistry>,
}

impl SingleParticleUnitary {
    pub fn new(matrix: CMatrix, rows: Arc<ModeRegistry>, cols: Arc<ModeRegistry>) -> Result<Self> {
        if matrix.rows() != rows.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), found: matrix.rows() });
        }
        if matrix.cols() != cols.len() {
            return Err(Error::DimensionMismatch { expected: cols.len(), found: matrix.cols() });
        }
        let dev = matrix.unitarity_deviation();
        if dev.is_nan() || dev > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix, rows, cols })
    }

    pub fn identity(registry: Arc<ModeRegistry>) -> Self {
        Self { matrix: CMatrix::identity(registry.len()), rows: registry.clone(), cols: registry }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Output modes.
    pub fn rows(&self) -> &Arc<ModeRegistry> {
        &self.rows
    }

    /// Input modes.
    pub fn cols(&self) -> &Arc<ModeRegistry> {
        &self.cols
    }

    pub fn entry(&self, row: &str, col: &str) -> Result<Complex64> {
        Ok(self.matrix[(self.rows.index_of(row)?, self.cols.index_of(col)?)])
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.matrix.unitarity_deviation()
    }

    /// `next · self`: first `self`, then `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if next.cols.labels() != self.rows.labels() {
            return Err(Error::RegistryMismatch(format!("{:?} feeds {:?}", self.rows.labels(), next.cols.labels())));
        }
        Ok(Self { matrix: &next.matrix * &self.matrix, rows: next.rows.clone(), cols: self.cols.clone() })
    }

    /// Relabels the output side to `order`, which must be a permutation of the rows.
    pub fn reorder_rows(&self, order: Arc<ModeRegistry>) -> Result<Self> {
        if order.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), found: order.len() });
        }
        let perm = order.labels().iter().map(|l| self.rows.index_of(l)).collect::<Result<Vec<_>>>()?;
        Ok(Self { matrix: self.matrix.permute_rows(&perm), rows: order, cols: self.cols.clone() })
    }
}

/// Output amplitude = Σ_in det(U[out rows, in cols]) · amplitude_in.
pub fn lift_apply(u: &SingleParticleUnitary, s: &FockState) -> Result<FockState> {
    if u.cols.labels() != s.registry.labels() {
        return Err(Error::RegistryMismatch(format!(
            "unitary acts on {:?}, state lives on {:?}",
            u.cols.labels(),
            s.registry.labels()
        )));
    }
    let outputs = configurations(u.rows.len(), s.particles);
    let mut amplitudes = BTreeMap::new();
    let inputs: Vec<(Vec<usize>, Complex64)> = s.amplitudes.iter().map(|(c, a)| (c.occupied().collect(), *a)).collect();
    for out in outputs {
        let rows: Vec<usize> = out.occupied().collect();
        let amp: Complex64 = inputs.iter().map(|(cols, a)| u.matrix.submatrix(&rows, cols).determinant() * a).sum();
        if amp.norm() >= PRUNE_THRESHOLD {
            amplitudes.insert(out, amp);
        }
    }
    Ok(FockState { registry: u.rows.clone(), particles: s.particles, amplitudes })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_modes() -> Arc<ModeRegistry> {
        Arc::new(ModeRegistry::new(["a", "b"]).unwrap())
    }

    #[test]
    fn three_sources_give_a_single_configuration() {
        let s = FockState::create_sources(ModeRegistry::input6(), &["S0phi", "S1phi", "Spsi"]).unwrap();
        assert_eq!(s.particle_number(), 3);
        assert_eq!(s.support_size(), 1);
        assert_eq!(s.amplitude(OccupationConfig(0b010101)), c(1.0, 0.0));
    }

    #[test]
    fn no_sources_is_the_vacuum() {
        let s = FockState::create_sources::<&str>(ModeRegistry::input6(), &[]).unwrap();
        assert_eq!(s, FockState::vacuum(ModeRegistry::input6()));
        assert_eq!(s.amplitude(OccupationConfig::EMPTY), c(1.0, 0.0));
    }

    #[test]
    fn pauli_exclusion_rejects_duplicates() {
        let err = FockState::create_sources(ModeRegistry::input6(), &["S0phi", "S0phi"]).unwrap_err();
        assert_eq!(err, Error::DuplicateMode("S0phi".into()));
        let err = FockState::create_sources(ModeRegistry::input6(), &["nope"]).unwrap_err();
        assert_eq!(err, Error::UnknownMode("nope".into()));
    }

    #[test]
    fn registry_rejects_duplicate_labels() {
        assert!(ModeRegistry::new(["x", "y", "x"]).is_err());
    }

    #[test]
    fn identity_lift_is_exact() {
        let reg = ModeRegistry::input6();
        let s = FockState::from_terms(
            reg.clone(),
            &[(c(0.6, 0.0), vec!["S0phi", "Gpsi"]), (c(0.0, 0.8), vec!["G1phi", "S1phi"])],
        )
        .unwrap();
        let out = s.lift_apply(&SingleParticleUnitary::identity(reg)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn symmetric_splitter_on_one_particle() {
        let reg = two_modes();
        let m = CMatrix::from_rows(&[[c(0.0, SQRT_HALF), c(SQRT_HALF, 0.0)], [c(SQRT_HALF, 0.0), c(0.0, SQRT_HALF)]]);
        let u = SingleParticleUnitary::new(m, reg.clone(), reg.clone()).unwrap();
        let s = FockState::create_sources(reg, &["a"]).unwrap();
        let out = s.lift_apply(&u).unwrap();
        assert!((out.amplitude(OccupationConfig(0b01)) - c(0.0, SQRT_HALF)).norm() < 1e-15);
        assert!((out.amplitude(OccupationConfig(0b10)) - c(SQRT_HALF, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_fermions_on_a_symmetric_splitter_antibunch() {
        let reg = two_modes();
        let m = CMatrix::from_rows(&[[c(0.0, SQRT_HALF), c(SQRT_HALF, 0.0)], [c(SQRT_HALF, 0.0), c(0.0, SQRT_HALF)]]);
        let u = SingleParticleUnitary::new(m, reg.clone(), reg.clone()).unwrap();
        let s = FockState::create_sources(reg, &["a", "b"]).unwrap();
        let out = s.lift_apply(&u).unwrap();
        // det = i·i - 1 = -2 / 2
        assert!((out.amplitude(OccupationConfig(0b11)) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn creation_order_sign() {
        let reg = two_modes();
        let ab = FockState::from_terms(reg.clone(), &[(c(1.0, 0.0), vec!["a", "b"])]).unwrap();
        let ba = FockState::from_terms(reg, &[(c(1.0, 0.0), vec!["b", "a"])]).unwrap();
        assert_eq!(ab.inner(&ba).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let reg = two_modes();
        let m = CMatrix::from_rows(&[[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(SingleParticleUnitary::new(m, reg.clone(), reg), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn definite_occupation_projects_with_certainty() {
        let s = FockState::create_sources(ModeRegistry::input6(), &["S0phi", "S1phi", "Spsi"]).unwrap();
        let p = s.project_number("Spsi", 1).unwrap();
        assert_eq!(p.probability, 1.0);
        assert_eq!(p.state.unwrap(), s);
    }

    #[test]
    fn vacuum_projection_is_empty() {
        let p = FockState::vacuum(ModeRegistry::input6()).project_number("B0", 1);
        assert!(p.is_err());
        let p = FockState::vacuum(ModeRegistry::input6()).project_number("Gpsi", 1).unwrap();
        assert_eq!(p.probability, 0.0);
        assert!(p.state.is_none());
    }

    #[test]
    fn moments_reject_repeats_and_bad_orders() {
        let s = FockState::create_sources(ModeRegistry::input6(), &["S0phi"]).unwrap();
        assert_eq!(s.occupation_moments(&["S0phi", "S0phi"]), Err(Error::RepeatedLabel("S0phi".into())));
        assert_eq!(s.occupation_moments::<&str>(&[]), Err(Error::MomentOrder(0)));
        assert!(s.occupation_moments(&["S0phi", "G0phi", "S1phi", "G1phi"]).is_err());
    }

    #[test]
    fn third_moment_of_definite_occupation_vanishes() {
        let s = FockState::create_sources(ModeRegistry::input6(), &["S0phi", "S1phi"]).unwrap();
        assert_eq!(s.occupation_moments(&["S0phi", "S1phi", "Gpsi"]).unwrap(), 0.0);
        assert_eq!(s.occupation_moments(&["S0phi"]).unwrap(), 1.0);
    }

    #[test]
    fn configuration_enumeration() {
        let cfgs = configurations(6, 3);
        assert_eq!(cfgs.len(), 20);
        assert!(cfgs.iter().all(|c| c.count() == 3));
        assert!(cfgs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(configurations(4, 0), vec![OccupationConfig::EMPTY]);
        assert!(configurations(2, 3).is_empty());
    }
}
