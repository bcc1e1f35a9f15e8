//! Simulated single-qubit tomography: projective measurement with shot
//! noise, Stokes-vector reconstruction of the density matrix, and Monte
//! Carlo resampling for the error bars.
//!
//! Every source of randomness flows through an explicit seed; identical
//! inputs give identical outputs, and per-iteration seeds derive from
//! (seed, index) so concurrent evaluation cannot change results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::linalg::{fidelity_overlap, Density2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TomoError {
    #[error("shots must be positive")]
    ZeroShots,
    #[error("need at least 2 resamples, got {0}")]
    TooFewResamples(usize),
    #[error("axis counts do not sum to shots_per_axis")]
    InconsistentCounts,
}

/// Measurement basis: one Pauli axis per setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliSetting {
    X,
    Y,
    Z,
}

impl PauliSetting {
    pub const ALL: [PauliSetting; 3] = [PauliSetting::X, PauliSetting::Y, PauliSetting::Z];
}

/// Outcome counts for one measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisCounts {
    pub n_plus: u64,
    pub n_minus: u64,
}

/// Per-axis counts with a fixed number of shots per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountData {
    pub x: AxisCounts,
    pub y: AxisCounts,
    pub z: AxisCounts,
    pub shots_per_axis: u64,
}

impl CountData {
    pub fn new(
        x: AxisCounts,
        y: AxisCounts,
        z: AxisCounts,
        shots_per_axis: u64,
    ) -> Result<Self, TomoError> {
        if shots_per_axis == 0 {
            return Err(TomoError::ZeroShots);
        }
        for axis in [&x, &y, &z] {
            if axis.n_plus + axis.n_minus != shots_per_axis {
                return Err(TomoError::InconsistentCounts);
            }
        }
        Ok(CountData {
            x,
            y,
            z,
            shots_per_axis,
        })
    }

    pub fn axis(&self, setting: PauliSetting) -> AxisCounts {
        match setting {
            PauliSetting::X => self.x,
            PauliSetting::Y => self.y,
            PauliSetting::Z => self.z,
        }
    }

    /// Stokes components (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) estimated from the counts.
    pub fn stokes(&self) -> [f64; 3] {
        let shots = self.shots_per_axis as f64;
        let s = |a: AxisCounts| (a.n_plus as f64 - a.n_minus as f64) / shots;
        [s(self.x), s(self.y), s(self.z)]
    }

    /// CSV with columns `axis,n_plus,n_minus,shots`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,n_plus,n_minus,shots\n");
        for (label, counts) in [("X", self.x), ("Y", self.y), ("Z", self.z)] {
            out.push_str(&format!(
                "{},{},{},{}\n",
                label, counts.n_plus, counts.n_minus, self.shots_per_axis
            ));
        }
        out
    }
}

/// Reconstructed state with Monte Carlo uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct TomoEstimate {
    pub rho: Density2,
    /// Standard deviation of each complex entry (spread of the resampled
    /// entries about their mean, real and imaginary parts combined).
    pub element_std: [[f64; 2]; 2],
    /// Standard deviation of the fidelity against the reference state.
    pub fidelity_std: f64,
}

/// Born-rule outcome probabilities (p₊, p₋) = ((1 ± Tr(ρσ))/2, …).
pub fn born_probabilities(rho: &Density2, setting: PauliSetting) -> (f64, f64) {
    let bloch = rho.bloch();
    let expectation = match setting {
        PauliSetting::X => bloch[0],
        PauliSetting::Y => bloch[1],
        PauliSetting::Z => bloch[2],
    };
    let p_plus = ((1.0 + expectation) / 2.0).clamp(0.0, 1.0);
    (p_plus, 1.0 - p_plus)
}

/// Deterministic seed for work item `index` under the master `seed`
/// (splitmix-style mixing), so iterations stay independent of evaluation
/// order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn draw_binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p)
            .expect("probability in (0, 1)")
            .sample(rng)
    }
}

/// Independent binomial draws per axis from the Born probabilities of ρ.
pub fn sample_counts(rho: &Density2, shots: u64, seed: u64) -> Result<CountData, TomoError> {
    if shots == 0 {
        return Err(TomoError::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut axes = [AxisCounts {
        n_plus: 0,
        n_minus: 0,
    }; 3];
    for (slot, setting) in axes.iter_mut().zip(PauliSetting::ALL) {
        let (p_plus, _) = born_probabilities(rho, setting);
        let n_plus = draw_binomial(&mut rng, shots, p_plus);
        *slot = AxisCounts {
            n_plus,
            n_minus: shots - n_plus,
        };
    }
    CountData::new(axes[0], axes[1], axes[2], shots)
}

/// Stokes reconstruction ρ = (I + s·σ)/2 with physicality restoration.
///
/// When the estimated Bloch vector leaves the unit ball the raw matrix has a
/// negative eigenvalue; clipping that eigenvalue to zero and renormalizing
/// the trace is, for 2×2, the same as rescaling the Bloch vector onto the
/// sphere, which is how it is done here.
pub fn reconstruct(counts: &CountData) -> Density2 {
    let mut s = counts.stokes();
    let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    if norm > 1.0 {
        for component in s.iter_mut() {
            *component /= norm;
        }
    }
    Density2::from_bloch(s).expect("clipped Bloch vector is physical")
}

/// Resamples the counts from their empirical rates, reconstructs each draw,
/// and reports the entrywise standard deviation plus the standard deviation
/// of the fidelity against `rho_ref`.
pub fn monte_carlo(
    counts: &CountData,
    resamples: usize,
    seed: u64,
    rho_ref: &Density2,
) -> Result<TomoEstimate, TomoError> {
    if resamples < 2 {
        return Err(TomoError::TooFewResamples(resamples));
    }
    let shots = counts.shots_per_axis;
    let rates: Vec<f64> = PauliSetting::ALL
        .iter()
        .map(|&axis| counts.axis(axis).n_plus as f64 / shots as f64)
        .collect();

    let mut entries = Vec::with_capacity(resamples);
    let mut fidelities = Vec::with_capacity(resamples);
    for k in 0..resamples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
        let mut axes = [AxisCounts {
            n_plus: 0,
            n_minus: 0,
        }; 3];
        for (slot, &rate) in axes.iter_mut().zip(&rates) {
            let n_plus = draw_binomial(&mut rng, shots, rate);
            *slot = AxisCounts {
                n_plus,
                n_minus: shots - n_plus,
            };
        }
        let resampled = CountData::new(axes[0], axes[1], axes[2], shots)?;
        let rho_k = reconstruct(&resampled);
        entries.push(*rho_k.entries());
        fidelities
            .push(fidelity_overlap(&rho_k, rho_ref).expect("valid states have nonzero purity"));
    }

    let inv = 1.0 / resamples as f64;
    let mut element_std = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let mean = entries
                .iter()
                .map(|e| e[r][c])
                .sum::<num_complex::Complex64>()
                * inv;
            let var = entries
                .iter()
                .map(|e| (e[r][c] - mean).norm_sqr())
                .sum::<f64>()
                * inv;
            element_std[r][c] = var.sqrt();
        }
    }
    let f_mean = fidelities.iter().sum::<f64>() * inv;
    let f_var = fidelities.iter().map(|f| (f - f_mean).powi(2)).sum::<f64>() * inv;

    Ok(TomoEstimate {
        rho: reconstruct(counts),
        element_std,
        fidelity_std: f_var.sqrt(),
    })
}
