//! Gaussian phase noise on the propagation arms.
//!
//! Each protocol run sees one fixed phase per arm. Averaging Bob's `++`
//! state over the Gaussian phases damps its coherences by `e^{-σ²/2}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circuit::ArmPhases;
use crate::exec::{compensated_sum, derive_seed, map_indexed, mean_and_stderr, Execution};
use crate::protocol::{
    condition_on, run_with_phases, BlochVector, MeasurementOutcome, QubitState, Stage, TeleportParams,
};
use crate::{Error, Result};

/// Per-arm phase variances, in arm order `A′0, A′1, A0, A1, B′0, B′1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DephasingParams {
    variances: [f64; 6],
}

impl DephasingParams {
    pub fn new(variances: [f64; 6]) -> Result<Self> {
        if let Some(&v) = variances.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::OutOfRange { name: "sigma_j^2", value: v });
        }
        Ok(Self { variances })
    }

    /// Total `σ²` split equally over the six arms.
    pub fn uniform(total: f64) -> Result<Self> {
        Self::new([total / 6.0; 6])
    }

    pub fn variances(&self) -> [f64; 6] {
        self.variances
    }

    pub fn total(&self) -> f64 {
        self.variances.iter().sum()
    }

    /// One phase per arm drawn from independent centred Gaussians.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ArmPhases {
        let mut p = [0.0; 6];
        for (slot, var) in p.iter_mut().zip(self.variances) {
            let z: f64 = rng.sample(StandardNormal);
            *slot = var.sqrt() * z;
        }
        ArmPhases::from_array(p)
    }
}

fn check_variance(sigma2: f64) -> Result<()> {
    if sigma2.is_finite() && sigma2 >= 0.0 || sigma2 == f64::INFINITY {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "sigma^2", value: sigma2 })
    }
}

/// Coherence damping factor `e^{-σ²/2}`.
pub fn damping(sigma2: f64) -> f64 {
    (-sigma2 / 2.0).exp()
}

/// Bob's phase-averaged `++` state.
pub fn dephased_state_analytic(p: &TeleportParams, sigma2: f64) -> Result<QubitState> {
    check_variance(sigma2)?;
    let mut q = p.input_state();
    let k = damping(sigma2);
    q.rho[0][1] *= k;
    q.rho[1][0] *= k;
    Ok(q)
}

/// Sample mean of Bob's `++` state over random arm phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloState {
    pub state: QubitState,
    pub stderr_re01: f64,
    pub stderr_im01: f64,
    /// max |p(++) − 1/16| over the samples.
    pub max_probability_deviation: f64,
    pub samples: usize,
}

/// Monte Carlo average of Bob's `++` state. Sample `i` uses its own
/// generator seeded from `(seed, i)`.
pub fn dephased_state_montecarlo(
    p: &TeleportParams,
    dephasing: &DephasingParams,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloState> {
    if samples == 0 {
        return Err(Error::OutOfRange { name: "samples", value: 0.0 });
    }
    let runs = map_indexed(samples, exec, |i| -> Result<(f64, QubitState)> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
        let phases = dephasing.sample(&mut rng);
        let s = run_with_phases(p, Stage::BeforeTomography, Some(&phases))?;
        let (prob, bob) = condition_on(&s, MeasurementOutcome::PLUS_PLUS)?;
        let q = *bob.qubit().ok_or_else(|| Error::ZeroProbability("++ without a qubit".into()))?;
        Ok((prob, q))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let n = runs.len() as f64;
    let entry = |i: usize, j: usize| -> Complex64 {
        let re = compensated_sum(runs.iter().map(|(_, q)| q.rho[i][j].re)) / n;
        let im = compensated_sum(runs.iter().map(|(_, q)| q.rho[i][j].im)) / n;
        Complex64::new(re, im)
    };
    let rho = [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]];
    let re: Vec<f64> = runs.iter().map(|(_, q)| q.rho[0][1].re).collect();
    let im: Vec<f64> = runs.iter().map(|(_, q)| q.rho[0][1].im).collect();
    let max_dev = runs.iter().map(|(prob, _)| (prob - 1.0 / 16.0).abs()).fold(0.0, f64::max);
    Ok(MonteCarloState {
        state: QubitState { rho },
        stderr_re01: mean_and_stderr(&re).1,
        stderr_im01: mean_and_stderr(&im).1,
        max_probability_deviation: max_dev,
        samples,
    })
}

/// `F = ½{1 + r·r′ + √((1−|r|²)(1−|r′|²))}`.
pub fn jozsa_fidelity(r: &BlochVector, r_prime: &BlochVector) -> Result<f64> {
    for v in [r, r_prime] {
        let n = v.norm();
        if n > 1.0 + 1e-10 {
            return Err(Error::NormExceeded(n));
        }
    }
    // Round-off purity deficits count as pure.
    let deficit = |v: &BlochVector| {
        let d = 1.0 - v.dot(v);
        if d < 1e-14 {
            0.0
        } else {
            d
        }
    };
    let mixed = (deficit(r) * deficit(r_prime)).sqrt();
    Ok((0.5 * (1.0 + r.dot(r_prime) + mixed)).clamp(0.0, 1.0))
}

/// `(1 + 4e^{-σ²/2}RD + (R − D)²)/2` for a pure input.
pub fn state_fidelity(p: &TeleportParams, sigma2: f64) -> f64 {
    let (r, d) = (p.reflection(), p.transmission());
    0.5 * (1.0 + 4.0 * damping(sigma2) * r * d + (r - d) * (r - d))
}

/// Bloch-sphere average `(2 + e^{-σ²/2})/3`.
pub fn average_fidelity(sigma2: f64) -> Result<f64> {
    check_variance(sigma2)?;
    Ok((2.0 + damping(sigma2)) / 3.0)
}

/// Uniformly distributed unit vector.
pub fn uniform_direction<R: Rng>(rng: &mut R) -> BlochVector {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let az: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    BlochVector::new(s * az.cos(), s * az.sin(), z)
}

/// Averages [`state_fidelity`] over `n_states` uniformly drawn pure inputs.
/// Returns the mean and its standard error.
pub fn average_fidelity_sampled(sigma2: f64, n_states: usize, seed: u64, exec: Execution) -> Result<(f64, f64)> {
    check_variance(sigma2)?;
    if n_states == 0 {
        return Err(Error::OutOfRange { name: "n_states", value: 0.0 });
    }
    let values = map_indexed(n_states, exec, |i| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
        let p = TeleportParams::from_bloch_direction(uniform_direction(&mut rng))?;
        Ok(state_fidelity(&p, sigma2))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_stderr(&values))
}
