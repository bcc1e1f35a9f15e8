//! Exact small-matrix complex arithmetic: closed-form matrix exponentials of
//! arbitrary 2×2 complex matrices (with an independent series oracle), tensor
//! products, partial trace over the ancilla, and the overlap metrics used to
//! compare density matrices.
//!
//! Everything here is a pure function over immutable values; no operation
//! allocates beyond its fixed-size return type.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Tolerance on Hermiticity and trace when validating a [`Density2`].
pub const DENSITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("density matrix has (near-)zero purity")]
    ZeroPurity,
    #[error("not a physical density matrix: {0}")]
    UnphysicalDensity(&'static str),
}

/// A 2×2 complex matrix acting on the work qubit, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op2(pub [[C64; 2]; 2]);

/// A 4×4 complex matrix on the ancilla⊗work pair.
///
/// Basis order is |a w⟩ = |00⟩, |01⟩, |10⟩, |11⟩ with the ancilla as the
/// left (most significant) qubit, so controlled gates are literal 2×2 blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op4(pub [[C64; 4]; 4]);

/// A length-2 complex amplitude vector. The norm is *not* constrained to 1:
/// non-unitary evolution produces unnormalized kets, and each operation
/// documents whether it normalizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket2(pub [C64; 2]);

/// A length-4 complex amplitude vector on the ancilla⊗work pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket4(pub [C64; 4]);

/// A validated single-qubit density matrix: Hermitian and unit-trace within
/// [`DENSITY_TOL`], with eigenvalues no lower than −[`DENSITY_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density2 {
    entries: [[C64; 2]; 2],
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// σ_x.
pub const SIGMA_X: Op2 = Op2([[ZERO, ONE], [ONE, ZERO]]);
/// σ_y.
pub const SIGMA_Y: Op2 = Op2([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]);
/// σ_z.
pub const SIGMA_Z: Op2 = Op2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]);

impl Op2 {
    pub fn zero() -> Self {
        Op2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Op2([[ONE, ZERO], [ZERO, ONE]])
    }

    /// The Hadamard gate H = (σ_x + σ_z)/√2.
    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Op2([[h, h], [h, -h]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Op2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Op2([
            [self.0[0][0].conj(), self.0[0][1].conj()],
            [self.0[1][0].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= k;
            }
        }
        out
    }

    pub fn add(&self, other: &Op2) -> Self {
        let mut out = *self;
        for (r, row) in out.0.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e += other.0[r][c];
            }
        }
        out
    }

    pub fn sub(&self, other: &Op2) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn mul(&self, other: &Op2) -> Self {
        let mut out = Op2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * other.0[0][c] + self.0[r][1] * other.0[1][c];
            }
        }
        out
    }

    pub fn apply(&self, ket: &Ket2) -> Ket2 {
        Ket2([
            self.0[0][0] * ket.0[0] + self.0[0][1] * ket.0[1],
            self.0[1][0] * ket.0[0] + self.0[1][1] * ket.0[1],
        ])
    }

    /// Deviation from unitarity, ‖A†A − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .sub(&Op2::identity())
            .frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }
}

impl Op4 {
    pub fn zero() -> Self {
        Op4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        for k in 0..4 {
            out.0[k][k] = ONE;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = self.0[c][r].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Op4) -> Self {
        let mut out = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = (0..4).map(|k| self.0[r][k] * other.0[k][c]).sum();
            }
        }
        out
    }

    pub fn apply(&self, ket: &Ket4) -> Ket4 {
        let mut out = Ket4([ZERO; 4]);
        for r in 0..4 {
            out.0[r] = (0..4).map(|k| self.0[r][k] * ket.0[k]).sum();
        }
        out
    }

    pub fn sub(&self, other: &Op4) -> Self {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] -= other.0[r][c];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .sub(&Op4::identity())
            .frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }
}

impl Ket2 {
    /// |0⟩.
    pub fn basis0() -> Self {
        Ket2([ONE, ZERO])
    }

    /// |1⟩.
    pub fn basis1() -> Self {
        Ket2([ZERO, ONE])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: C64) -> Self {
        Ket2([self.0[0] * k, self.0[1] * k])
    }

    pub fn normalized(&self) -> Result<Ket2, LinalgError> {
        let n = self.norm();
        if n <= 0.0 || n.is_nan() {
            return Err(LinalgError::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket2) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }
}

impl Ket4 {
    /// |a w⟩ basis ket for (a, w) ∈ {0,1}².
    pub fn basis(a: usize, w: usize) -> Self {
        let mut out = Ket4([ZERO; 4]);
        out.0[2 * a + w] = ONE;
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// |a⟩ ⊗ |ψ⟩ with the ancilla on the left.
    pub fn product(ancilla: usize, work: &Ket2) -> Self {
        let mut out = Ket4([ZERO; 4]);
        out.0[2 * ancilla] = work.0[0];
        out.0[2 * ancilla + 1] = work.0[1];
        out
    }
}

impl Density2 {
    /// Validates the physicality invariants and wraps the entries.
    pub fn new(entries: [[C64; 2]; 2]) -> Result<Self, LinalgError> {
        if entries
            .iter()
            .flatten()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(LinalgError::UnphysicalDensity("non-finite entry"));
        }
        if (entries[0][1] - entries[1][0].conj()).norm() > DENSITY_TOL
            || entries[0][0].im.abs() > DENSITY_TOL
            || entries[1][1].im.abs() > DENSITY_TOL
        {
            return Err(LinalgError::UnphysicalDensity("not Hermitian"));
        }
        let tr = entries[0][0].re + entries[1][1].re;
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(LinalgError::UnphysicalDensity("trace differs from 1"));
        }
        let rho = Density2 { entries };
        if rho.eigenvalues().0 < -DENSITY_TOL {
            return Err(LinalgError::UnphysicalDensity("negative eigenvalue"));
        }
        Ok(rho)
    }

    /// Projector onto `ket` after normalization.
    pub fn from_pure(ket: &Ket2) -> Result<Self, LinalgError> {
        let psi = ket.normalized()?;
        let mut entries = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                entries[r][c] = psi.0[r] * psi.0[c].conj();
            }
        }
        // symmetrize roundoff so validation cannot trip on the diagonal
        entries[0][0] = C64::new(entries[0][0].re, 0.0);
        entries[1][1] = C64::new(entries[1][1].re, 0.0);
        Self::new(entries)
    }

    /// ρ = (I + s·σ)/2 for a Bloch vector with ‖s‖ ≤ 1 (+[`DENSITY_TOL`]).
    pub fn from_bloch(s: [f64; 3]) -> Result<Self, LinalgError> {
        let entries = [
            [
                C64::new((1.0 + s[2]) / 2.0, 0.0),
                C64::new(s[0] / 2.0, -s[1] / 2.0),
            ],
            [
                C64::new(s[0] / 2.0, s[1] / 2.0),
                C64::new((1.0 - s[2]) / 2.0, 0.0),
            ],
        ];
        Self::new(entries)
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.entries
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.entries[r][c]
    }

    /// Bloch vector (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
    pub fn bloch(&self) -> [f64; 3] {
        let e = &self.entries;
        [2.0 * e[0][1].re, -2.0 * e[0][1].im, e[0][0].re - e[1][1].re]
    }

    /// Eigenvalues in ascending order; exact for the 2×2 Hermitian case.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let half_diff = (a - d) / 2.0;
        let rad = (half_diff * half_diff + self.entries[0][1].norm_sqr()).sqrt();
        let mid = (a + d) / 2.0;
        (mid - rad, mid + rad)
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        let e = &self.entries;
        let mut acc = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                acc += (e[r][c] * e[c][r]).re;
            }
        }
        acc
    }
}

/// e^{scale·M} for any 2×2 complex M, in closed form.
///
/// Splits M = (tr M/2)·I + M′ with M′ traceless, so M′² = −det(M′)·I, and
/// evaluates cosh(z)·I + sinhc(z)·scale·M′ with z² = −scale²·det(M′). Both
/// factors are even functions of z, so the square-root branch is immaterial,
/// and sinhc is evaluated by its series near z = 0 to cover the
/// exceptional-point limit.
pub fn expm2_closed(m: &Op2, scale: C64) -> Op2 {
    let half_tr = m.trace() / 2.0;
    let mp = m.sub(&Op2::identity().scale(half_tr));
    let z2 = -scale * scale * mp.det();
    let z = z2.sqrt();
    let (cosh_z, sinhc_z) = cosh_sinhc(z, z2);
    let prefactor = (scale * half_tr).exp();
    Op2::identity()
        .scale(cosh_z)
        .add(&mp.scale(scale * sinhc_z))
        .scale(prefactor)
}

// cosh(z) and sinh(z)/z, with the series used for sinhc when |z| is small
// enough that the direct quotient loses accuracy.
fn cosh_sinhc(z: C64, z2: C64) -> (C64, C64) {
    let cosh_z = z.cosh();
    let sinhc_z = if z.norm() < 1e-4 {
        ONE + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    };
    (cosh_z, sinhc_z)
}

/// e^{scale·M} by scaling-and-squaring Taylor summation, truncated below
/// `tol` in Frobenius norm. Independent of [`expm2_closed`]; serves as its
/// cross-validation oracle.
pub fn expm2_taylor(m: &Op2, scale: C64, tol: f64) -> Result<Op2, LinalgError> {
    if tol <= 0.0 || tol.is_nan() {
        return Err(LinalgError::NonPositiveTolerance(tol));
    }
    let a = m.scale(scale);
    let mut squarings = 0u32;
    let mut norm = a.frobenius_norm();
    while norm > 0.5 && squarings < 64 {
        norm /= 2.0;
        squarings += 1;
    }
    let b = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
    // headroom for error amplification by the repeated squaring
    let term_tol = tol / 2.0f64.powi(squarings as i32 + 2);

    let mut sum = Op2::identity();
    let mut term = Op2::identity();
    for n in 1..=64 {
        term = term.mul(&b).scale(C64::new(1.0 / n as f64, 0.0));
        sum = sum.add(&term);
        if term.frobenius_norm() < term_tol {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    Ok(sum)
}

/// Kronecker product A ⊗ B with A acting on the ancilla (left factor),
/// consistent with the [`Op4`] basis order.
pub fn kron2(a: &Op2, b: &Op2) -> Op4 {
    let mut out = Op4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Reduced work-qubit density matrix of Φ/‖Φ‖ after tracing out the ancilla.
pub fn partial_trace_ancilla(phi: &Ket4) -> Result<Density2, LinalgError> {
    let n2 = phi.norm_sqr();
    if n2 <= 0.0 || n2.is_nan() {
        return Err(LinalgError::ZeroNorm);
    }
    let mut entries = [[ZERO; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let mut acc = ZERO;
            for a in 0..2 {
                acc += phi.0[2 * a + k] * phi.0[2 * a + l].conj();
            }
            entries[k][l] = acc / n2;
        }
    }
    entries[0][0] = C64::new(entries[0][0].re, 0.0);
    entries[1][1] = C64::new(entries[1][1].re, 0.0);
    Density2::new(entries)
}

/// Normalized overlap Tr(ρ_a ρ_b) / (√Tr(ρ_a²)·√Tr(ρ_b²)).
pub fn fidelity_overlap(rho_a: &Density2, rho_b: &Density2) -> Result<f64, LinalgError> {
    let pa = rho_a.purity();
    let pb = rho_b.purity();
    if pa < 1e-12 || pb < 1e-12 {
        return Err(LinalgError::ZeroPurity);
    }
    let mut overlap = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            overlap += (rho_a.entry(r, c) * rho_b.entry(c, r)).re;
        }
    }
    Ok(overlap / (pa.sqrt() * pb.sqrt()))
}

/// Mean over the four entries of the complex-modulus entrywise difference.
pub fn avg_abs_diff(rho_a: &Density2, rho_b: &Density2) -> f64 {
    let mut acc = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            acc += (rho_a.entry(r, c) - rho_b.entry(r, c)).norm();
        }
    }
    acc / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_op2(rng: &mut impl Rng) -> Op2 {
        let mut m = Op2::zero();
        for r in 0..2 {
            for c_ in 0..2 {
                m.0[r][c_] = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            }
        }
        m
    }

    #[test]
    fn expm_closed_zero_matrix_is_identity() {
        let out = expm2_closed(&Op2::zero(), c(3.0, -1.0));
        assert!(out.sub(&Op2::identity()).frobenius_norm() == 0.0);
    }

    #[test]
    fn expm_closed_pauli_rotation() {
        // e^{-i(π/2)σ_x} = -i σ_x
        let out = expm2_closed(&SIGMA_X, c(0.0, -std::f64::consts::FRAC_PI_2));
        let expected = SIGMA_X.scale(c(0.0, -1.0));
        assert!(out.sub(&expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn expm_taylor_rejects_bad_tolerance() {
        assert_eq!(
            expm2_taylor(&SIGMA_X, c(1.0, 0.0), 0.0),
            Err(LinalgError::NonPositiveTolerance(0.0))
        );
        assert!(expm2_taylor(&SIGMA_X, c(1.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn expm_taylor_zero_matrix_is_identity() {
        let out = expm2_taylor(&Op2::zero(), c(1.0, 1.0), 1e-12).unwrap();
        assert!(out.sub(&Op2::identity()).frobenius_norm() == 0.0);
    }

    #[test]
    fn expm_taylor_diagonal_case() {
        let (a, b) = (c(0.3, -0.4), c(-1.1, 0.2));
        let scale = c(0.5, 0.7);
        let m = Op2([[a, ZERO], [ZERO, b]]);
        let out = expm2_taylor(&m, scale, 1e-13).unwrap();
        let expected = Op2([[(scale * a).exp(), ZERO], [ZERO, (scale * b).exp()]]);
        assert!(out.sub(&expected).frobenius_norm() < 1e-13);
    }

    #[test]
    fn expm_closed_agrees_with_taylor_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let scale = c(0.0, -0.7);
        for _ in 0..20 {
            let m = random_op2(&mut rng);
            let closed = expm2_closed(&m, scale);
            let taylor = expm2_taylor(&m, scale, 1e-12).unwrap();
            assert!(
                closed.sub(&taylor).frobenius_norm() < 1e-9,
                "closed and Taylor exponentials diverge on {m:?}"
            );
        }
    }

    #[test]
    fn expm_closed_agrees_with_taylor_near_exceptional_points() {
        // Matrices with (traceless part)² within ~1e-6 of zero: pick a
        // traceless [[a, b], [c, -a]] with c ≈ -a²/b, then perturb.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = c(rng.gen_range(0.3..2.0), rng.gen_range(-2.0..2.0));
            let eps = c(rng.gen_range(-1e-6..1e-6), rng.gen_range(-1e-6..1e-6));
            let m = Op2([[a, b], [-a * a / b + eps, -a]]);
            let closed = expm2_closed(&m, c(0.0, -0.7));
            let taylor = expm2_taylor(&m, c(0.0, -0.7), 1e-12).unwrap();
            assert!(closed.sub(&taylor).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn expm_closed_semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let m = random_op2(&mut rng);
            let s1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let s2 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let prod = expm2_closed(&m, s1).mul(&expm2_closed(&m, s2));
            let direct = expm2_closed(&m, s1 + s2);
            assert!(prod.sub(&direct).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn expm_closed_unitary_for_hermitian_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = rng.gen_range(-2.0..2.0);
            let d = rng.gen_range(-2.0..2.0);
            let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let m = Op2([[c(a, 0.0), b], [b.conj(), c(d, 0.0)]]);
            let t = rng.gen_range(-3.0..3.0);
            let u = expm2_closed(&m, c(0.0, -t));
            assert!(u.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn kron_identity_and_basis_order() {
        let id4 = kron2(&Op2::identity(), &Op2::identity());
        assert!(id4.sub(&Op4::identity()).frobenius_norm() == 0.0);

        // (σ_x ⊗ I)|00⟩ = |10⟩: the left factor flips the ancilla.
        let flipped = kron2(&SIGMA_X, &Op2::identity()).apply(&Ket4::basis(0, 0));
        assert!((flipped.0[2] - ONE).norm() == 0.0);
        assert_eq!(flipped.norm_sqr(), 1.0);
    }

    #[test]
    fn kron_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = random_op2(&mut rng);
        let b = random_op2(&mut rng);
        let k = kron2(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k.0[2 * i + p][2 * j + q], a.0[i][j] * b.0[p][q]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let (a, b) = (random_op2(&mut rng), random_op2(&mut rng));
            let (p, q) = (random_op2(&mut rng), random_op2(&mut rng));
            let lhs = kron2(&a, &b).mul(&kron2(&p, &q));
            let rhs = kron2(&a.mul(&p), &b.mul(&q));
            assert!(lhs.sub(&rhs).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let psi = Ket2([c(0.6, 0.0), c(0.0, 0.8)]);
        let phi = Ket4::product(0, &psi);
        let rho = partial_trace_ancilla(&phi).unwrap();
        let expected = Density2::from_pure(&psi).unwrap();
        assert!(avg_abs_diff(&rho, &expected) < 1e-15);
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        let inv = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let phi = Ket4([inv, ZERO, ZERO, inv]);
        let rho = partial_trace_ancilla(&phi).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-15);
        assert!(rho.entry(0, 1).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_initial_state() {
        let rho = partial_trace_ancilla(&Ket4::basis(0, 0)).unwrap();
        let expected = Density2::from_pure(&Ket2::basis0()).unwrap();
        assert!(avg_abs_diff(&rho, &expected) == 0.0);
    }

    #[test]
    fn partial_trace_rejects_zero_norm() {
        assert_eq!(
            partial_trace_ancilla(&Ket4([ZERO; 4])),
            Err(LinalgError::ZeroNorm)
        );
    }

    #[test]
    fn fidelity_identical_orthogonal_and_plus() {
        let rho0 = Density2::from_pure(&Ket2::basis0()).unwrap();
        let rho1 = Density2::from_pure(&Ket2::basis1()).unwrap();
        let plus = Density2::from_pure(&Ket2([ONE, ONE])).unwrap();
        assert!((fidelity_overlap(&rho0, &rho0).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity_overlap(&rho0, &rho1).unwrap().abs() < 1e-15);
        assert!((fidelity_overlap(&rho0, &plus).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_rejects_zero_purity() {
        // Not reachable through the validated constructors; exercise the
        // guard directly.
        let degenerate = Density2 {
            entries: [[ZERO; 2]; 2],
        };
        assert_eq!(
            fidelity_overlap(&degenerate, &degenerate),
            Err(LinalgError::ZeroPurity)
        );
    }

    #[test]
    fn avg_abs_diff_examples() {
        let a = Density2::from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(avg_abs_diff(&a, &a), 0.0);
        let b = Density2::from_bloch([0.0, 0.0, 0.8]).unwrap(); // diag(0.9, 0.1)
        assert!((avg_abs_diff(&a, &b) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn density_validation_rejects_unphysical_inputs() {
        // trace 2
        let bad_trace = [[ONE, ZERO], [ZERO, ONE]];
        assert!(Density2::new(bad_trace).is_err());
        // non-Hermitian
        let skew = [[c(0.5, 0.0), c(0.3, 0.0)], [c(-0.3, 0.0), c(0.5, 0.0)]];
        assert!(Density2::new(skew).is_err());
        // Hermitian, trace 1, but eigenvalue < 0
        let neg = [[c(1.2, 0.0), ZERO], [ZERO, c(-0.2, 0.0)]];
        assert!(Density2::new(neg).is_err());
    }

    proptest! {
        #[test]
        fn prop_expm_closed_matches_taylor(
            entries in proptest::array::uniform8(-2.0f64..2.0),
            sre in -1.0f64..1.0,
            sim in -1.0f64..1.0,
        ) {
            let m = Op2([
                [c(entries[0], entries[1]), c(entries[2], entries[3])],
                [c(entries[4], entries[5]), c(entries[6], entries[7])],
            ]);
            let scale = c(sre, sim);
            let closed = expm2_closed(&m, scale);
            let taylor = expm2_taylor(&m, scale, 1e-12).unwrap();
            prop_assert!(closed.sub(&taylor).frobenius_norm() < 1e-9);
        }

        #[test]
        fn prop_partial_trace_yields_valid_density(
            amps in proptest::array::uniform8(-1.0f64..1.0),
        ) {
            let phi = Ket4([
                c(amps[0], amps[1]),
                c(amps[2], amps[3]),
                c(amps[4], amps[5]),
                c(amps[6], amps[7]),
            ]);
            prop_assume!(phi.norm_sqr() > 1e-6);
            // Density2::new re-validates every invariant on construction.
            let rho = partial_trace_ancilla(&phi).unwrap();
            prop_assert!((rho.entry(0,0).re + rho.entry(1,1).re - 1.0).abs() < 1e-12);
            prop_assert!(rho.eigenvalues().0 >= -DENSITY_TOL);
        }

        #[test]
        fn prop_fidelity_symmetric(
            b1 in proptest::array::uniform3(-0.57f64..0.57),
            b2 in proptest::array::uniform3(-0.57f64..0.57),
        ) {
            let ra = Density2::from_bloch(b1).unwrap();
            let rb = Density2::from_bloch(b2).unwrap();
            let f_ab = fidelity_overlap(&ra, &rb).unwrap();
            let f_ba = fidelity_overlap(&rb, &ra).unwrap();
            prop_assert!((f_ab - f_ba).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f_ab));
        }
    }
}
