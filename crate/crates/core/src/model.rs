//! The PT-symmetric Hamiltonian family, its phase classification, and the
//! exact non-unitary evolution and observables that the dilation circuit must
//! reproduce.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = [ r·e^{iθ}   s        ]
//!     [ μ          r·e^{-iθ} ]
//! ```
//!
//! with ω = 2√(sμ − r²sin²θ). Real ω (sμ > r²sin²θ) is the unbroken phase
//! with oscillatory dynamics; imaginary ω is the broken phase with
//! exponential growth; ω = 0 is the exceptional point where the eigenvalues
//! and eigenvectors coalesce.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{expm2_closed, Density2, Ket2, LinalgError, Op2};

/// Default tolerance on ω² for separating the exceptional point from
/// roundoff.
pub const DEFAULT_PHASE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("evolved state has zero norm (degenerate input)")]
    DegenerateState,
}

/// Parameters (r, s, μ, θ, ħ) of the PT Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PTParams {
    pub r: f64,
    pub s: f64,
    pub mu: f64,
    /// Radians.
    pub theta: f64,
    /// Must be positive; 1 by default.
    pub hbar: f64,
}

impl PTParams {
    pub fn new(r: f64, s: f64, mu: f64, theta: f64) -> Self {
        PTParams {
            r,
            s,
            mu,
            theta,
            hbar: 1.0,
        }
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    /// The experimental setting r = 2, μ = s = 1, θ = π/8.
    pub fn reference() -> Self {
        PTParams::new(2.0, 1.0, 1.0, std::f64::consts::FRAC_PI_8)
    }

    /// sμ − r²sin²θ = ω²/4.
    pub fn omega_sqr_quarter(&self) -> f64 {
        let sin_theta = self.theta.sin();
        self.s * self.mu - self.r * self.r * sin_theta * sin_theta
    }
}

/// Spectral phase of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// ω² > 0: real spectrum, oscillatory dynamics.
    Unbroken,
    /// ω² < 0: complex-conjugate eigenvalue pair, exponential dynamics.
    Broken,
    /// ω² ≈ 0: coalescing eigenvalues.
    Exceptional,
}

/// ω (principal branch, purely imaginary in the broken phase) together with
/// the phase classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PTDerived {
    pub omega: C64,
    pub phase: Phase,
}

/// An evolution time, in the units fixed by ħ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePoint(pub f64);

impl From<f64> for TimePoint {
    fn from(t: f64) -> Self {
        TimePoint(t)
    }
}

/// The non-Hermitian matrix [[r·e^{iθ}, s], [μ, r·e^{−iθ}]]. Hermitian iff
/// θ ≡ 0 (mod π) and s = μ.
pub fn h_pt(p: &PTParams) -> Op2 {
    let diag = C64::from_polar(p.r, p.theta);
    Op2([
        [diag, C64::new(p.s, 0.0)],
        [C64::new(p.mu, 0.0), diag.conj()],
    ])
}

/// ω = 2√(sμ − r²sin²θ) and the phase classified against `tol` on ω².
pub fn derive(p: &PTParams, tol: f64) -> PTDerived {
    let quarter = p.omega_sqr_quarter();
    let omega_sqr = 4.0 * quarter;
    let omega = C64::new(omega_sqr, 0.0).sqrt();
    let phase = if omega_sqr > tol {
        Phase::Unbroken
    } else if omega_sqr < -tol {
        Phase::Broken
    } else {
        Phase::Exceptional
    };
    PTDerived { omega, phase }
}

/// e^{−i(t/ħ)H}·ψ. The output is generally unnormalized: the evolution is
/// non-unitary away from the Hermitian limit.
pub fn evolve(p: &PTParams, t: TimePoint, psi: &Ket2) -> Ket2 {
    let scale = C64::new(0.0, -t.0 / p.hbar);
    expm2_closed(&h_pt(p), scale).apply(psi)
}

/// Population of |0⟩ in the normalized evolved state,
/// |⟨0|e^{−iHt/ħ}|0⟩|² / ‖e^{−iHt/ħ}|0⟩‖².
pub fn p0(p: &PTParams, t: TimePoint) -> Result<f64, ModelError> {
    let psi = evolve(p, t, &Ket2::basis0());
    let n2 = psi.norm_sqr();
    if n2 <= 0.0 || !n2.is_finite() {
        return Err(ModelError::DegenerateState);
    }
    Ok(psi.0[0].norm_sqr() / n2)
}

/// Normalized projector onto the evolved state e^{−iHt/ħ}|0⟩.
pub fn rho_theory(p: &PTParams, t: TimePoint) -> Result<Density2, ModelError> {
    let psi = evolve(p, t, &Ket2::basis0());
    Density2::from_pure(&psi).map_err(|e| match e {
        LinalgError::ZeroNorm | LinalgError::UnphysicalDensity(_) => ModelError::DegenerateState,
        _ => ModelError::DegenerateState,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm2_taylor, SIGMA_X};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Frozen with the series oracle (expm2_taylor at tol 1e-14) for the
    // reference parameter set; re-derived below where cheap.
    const OMEGA_REFERENCE: f64 = 1.2871885058111652;
    const P0_T1: f64 = 0.7873827175750513;
    const P0_T3: f64 = 0.581842217477671;
    const EVOLVED_T1_RE0: f64 = 1.4515744595980777;
    const EVOLVED_T1_IM1: f64 = -0.7543026970802502;

    use crate::testutil::random_unbroken;

    #[test]
    fn h_pt_reference_matrix() {
        let h = h_pt(&PTParams::reference());
        let exp = C64::from_polar(2.0, std::f64::consts::FRAC_PI_8);
        assert!((h.0[0][0] - exp).norm() < 1e-15);
        assert!((h.0[1][1] - exp.conj()).norm() < 1e-15);
        assert!((h.0[0][1] - C64::new(1.0, 0.0)).norm() == 0.0);
        assert!((h.0[1][0] - C64::new(1.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn h_pt_hermitian_limit() {
        let h = h_pt(&PTParams::new(1.3, 0.7, 0.7, 0.0));
        assert!(h.sub(&h.adjoint()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn h_pt_commutes_with_pt_operation() {
        // With P = σ_x and T = complex conjugation, PT-symmetry of H reads
        // σ_x·conj(H)·σ_x = H whenever s = μ.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = rng.gen_range(0.1..2.0);
            let p = PTParams::new(rng.gen_range(0.0..3.0), s, s, rng.gen_range(-1.5..1.5));
            let h = h_pt(&p);
            let pt = SIGMA_X.mul(&h.conj()).mul(&SIGMA_X);
            assert!(pt.sub(&h).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn derive_reference_and_boundary_cases() {
        let d = derive(&PTParams::reference(), DEFAULT_PHASE_TOL);
        assert_eq!(d.phase, Phase::Unbroken);
        assert!((d.omega.re - OMEGA_REFERENCE).abs() < 1e-12);
        assert!(d.omega.im.abs() < 1e-15);

        // r·sinθ = 1 with s = μ = 1 sits exactly on the exceptional point.
        let ep = PTParams::new(2.0, 1.0, 1.0, (0.5f64).asin());
        assert_eq!(derive(&ep, DEFAULT_PHASE_TOL).phase, Phase::Exceptional);

        let broken = PTParams::new(2.0, 1.0, 1.0, std::f64::consts::FRAC_PI_2);
        let db = derive(&broken, DEFAULT_PHASE_TOL);
        assert_eq!(db.phase, Phase::Broken);
        assert!((db.omega * db.omega + C64::new(12.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn derive_omega_closed_form_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = PTParams::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-3.2..3.2),
            );
            let d = derive(&p, DEFAULT_PHASE_TOL);
            let omega_sqr = d.omega * d.omega;
            let expected = 4.0 * p.omega_sqr_quarter();
            assert!((omega_sqr - C64::new(expected, 0.0)).norm() < 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn evolve_identity_at_t_zero() {
        let psi = Ket2([C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let out = evolve(&PTParams::reference(), TimePoint(0.0), &psi);
        assert_eq!(out, psi);
    }

    #[test]
    fn evolve_reference_t1_amplitudes() {
        // Up to the global phase e^{−i·t·r·cosθ/ħ} the evolved |0⟩ is
        // (1.45157..., −0.75430...·i); frozen from the Taylor oracle.
        let p = PTParams::reference();
        let t = 0.7876;
        let psi = evolve(&p, TimePoint(t), &Ket2::basis0());
        let phase = C64::from_polar(1.0, t * p.r * p.theta.cos() / p.hbar);
        let unphased = psi.scale(phase);
        assert!((unphased.0[0] - C64::new(EVOLVED_T1_RE0, 0.0)).norm() < 1e-9);
        assert!((unphased.0[1] - C64::new(0.0, EVOLVED_T1_IM1)).norm() < 1e-9);

        // and the closed form agrees with the series oracle directly
        let taylor = expm2_taylor(&h_pt(&p), C64::new(0.0, -t), 1e-13)
            .unwrap()
            .apply(&Ket2::basis0());
        assert!((psi.0[0] - taylor.0[0]).norm() < 1e-11);
        assert!((psi.0[1] - taylor.0[1]).norm() < 1e-11);
    }

    #[test]
    fn evolve_hermitian_limit_preserves_norm() {
        let p = PTParams::new(1.7, 0.9, 0.9, 0.0);
        let psi = Ket2([C64::new(0.6, 0.1), C64::new(-0.3, 0.73)]);
        for k in 0..20 {
            let out = evolve(&p, TimePoint(0.3 * k as f64), &psi);
            assert!((out.norm() - psi.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn p0_examples() {
        let p = PTParams::reference();
        assert_eq!(p0(&p, TimePoint(0.0)).unwrap(), 1.0);
        assert!((p0(&p, TimePoint(0.7876)).unwrap() - P0_T1).abs() < 1e-12);
        assert!((p0(&p, TimePoint(1.5521)).unwrap() - P0_T3).abs() < 1e-12);
        // the spec-level check: four significant digits
        assert!((p0(&p, TimePoint(0.7876)).unwrap() - 0.7874).abs() < 1e-3);
        assert!((p0(&p, TimePoint(1.5521)).unwrap() - 0.5819).abs() < 1e-3);
    }

    #[test]
    fn p0_periodic_in_unbroken_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let p = random_unbroken(&mut rng);
            let omega = derive(&p, DEFAULT_PHASE_TOL).omega.re;
            if omega < 1e-2 {
                continue;
            }
            let period = 2.0 * std::f64::consts::PI * p.hbar / omega;
            let t = rng.gen_range(0.0..period);
            let a = p0(&p, TimePoint(t)).unwrap();
            let b = p0(&p, TimePoint(t + period)).unwrap();
            assert!((a - b).abs() < 1e-9, "p0 not periodic for {p:?}");
        }
    }

    #[test]
    fn broken_phase_norm_grows() {
        let p = PTParams::new(2.0, 1.0, 1.0, std::f64::consts::FRAC_PI_2);
        let mut prev = 0.0;
        for k in 0..40 {
            let n = evolve(&p, TimePoint(0.05 * k as f64), &Ket2::basis0()).norm();
            assert!(n >= prev - 1e-12, "norm decreased in the broken phase");
            prev = n;
        }
    }

    #[test]
    fn rho_theory_matches_p0_and_is_pure() {
        let p = PTParams::reference();
        let rho = rho_theory(&p, TimePoint(0.7876)).unwrap();
        assert!((rho.entry(0, 0).re - P0_T1).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-10);

        let rho0 = rho_theory(&p, TimePoint(0.0)).unwrap();
        assert_eq!(rho0.entry(0, 0).re, 1.0);
        assert_eq!(rho0.entry(1, 1).re, 0.0);
    }

    #[test]
    fn rho_theory_trace_one_for_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let p = PTParams::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-3.0..3.0),
            );
            let t = TimePoint(rng.gen_range(0.0..1.5));
            let rho = rho_theory(&p, t).unwrap();
            assert!((rho.entry(0, 0).re + rho.entry(1, 1).re - 1.0).abs() < 1e-12);
            assert!((rho.purity() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn h_pt_eigenvalues_closed_form() {
        // Eigenvalues are r·cosθ ± ω/2; checked against a direct 2×2 solver.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let p = PTParams::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-3.2..3.2),
            );
            let h = h_pt(&p);
            // direct eigensolver for [[a, b], [c, d]]
            let (a, b) = (h.0[0][0], h.0[0][1]);
            let (c_, d) = (h.0[1][0], h.0[1][1]);
            let mid = (a + d) / 2.0;
            let rad = ((a - d) * (a - d) / 4.0 + b * c_).sqrt();
            let direct = [mid + rad, mid - rad];

            let omega = derive(&p, DEFAULT_PHASE_TOL).omega;
            let rc = C64::new(p.r * p.theta.cos(), 0.0);
            let expected = [rc + omega / 2.0, rc - omega / 2.0];
            // match in either order
            let d1 = (direct[0] - expected[0]).norm() + (direct[1] - expected[1]).norm();
            let d2 = (direct[0] - expected[1]).norm() + (direct[1] - expected[0]).norm();
            assert!(d1.min(d2) < 1e-10);

            match derive(&p, DEFAULT_PHASE_TOL).phase {
                Phase::Unbroken => {
                    assert!(direct[0].im.abs() < 1e-10 && direct[1].im.abs() < 1e-10);
                }
                Phase::Broken => {
                    assert!((direct[0] - direct[1].conj()).norm() < 1e-10);
                    assert!(direct[0].im.abs() > 1e-8);
                }
                Phase::Exceptional => {}
            }
        }
    }
}
