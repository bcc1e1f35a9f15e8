//! Photonic compilation of the dilation gates via Jones calculus.
//!
//! U₁ becomes a non-polarizing beam splitter with T = cos²θ_a and
//! R = sin²θ_a; U₂ and U₃ become wave-plate chains. Conventions (global
//! phases are always dropped):
//!
//! ```text
//! HWP(h) = [ cos2h   sin2h ]      QWP(0°) = diag(1, i)
//!          [ sin2h  −cos2h ]
//! ```
//!
//! with a general QWP angle obtained by rotation conjugation. These
//! conventions reproduce the published wave-plate settings from the angle
//! formulas, which is the strongest consistency check available.

use num_complex::Complex64 as C64;
use std::fmt;
use thiserror::Error;

use crate::dilation::{self, DilationAngles, DilationError};
use crate::linalg::Op2;
use crate::model::{PTParams, TimePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error(transparent)]
    Angles(#[from] DilationError),
    #[error("wave-plate decomposition failed: residual {residual:e} exceeds 1e-6")]
    DecompositionFailed { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Hwp,
    Qwp,
}

impl fmt::Display for WaveplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveplateKind::Hwp => write!(f, "HWP"),
            WaveplateKind::Qwp => write!(f, "QWP"),
        }
    }
}

/// A wave plate with its fast-axis angle from horizontal, in degrees,
/// normalized into (−90, 90].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSetting {
    pub kind: WaveplateKind,
    pub angle_deg: f64,
}

impl WaveplateSetting {
    pub fn hwp(angle_deg: f64) -> Self {
        WaveplateSetting {
            kind: WaveplateKind::Hwp,
            angle_deg: wrap_angle(angle_deg, 90.0),
        }
    }

    pub fn qwp(angle_deg: f64) -> Self {
        WaveplateSetting {
            kind: WaveplateKind::Qwp,
            angle_deg: wrap_angle(angle_deg, 90.0),
        }
    }
}

impl fmt::Display for WaveplateSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.angle_deg)
    }
}

/// Beam-splitter transmittance/reflectance pair with T + R = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpbsSpec {
    pub transmittance: f64,
    pub reflectance: f64,
}

/// An ordered wave-plate chain; the first element is applied first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElementChain(pub Vec<WaveplateSetting>);

impl fmt::Display for ElementChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join("->"))
    }
}

// map into (−half, half]
fn wrap_angle(deg: f64, half: f64) -> f64 {
    let span = 2.0 * half;
    let mut out = deg % span;
    if out > half {
        out -= span;
    } else if out <= -half {
        out += span;
    }
    out
}

/// Jones matrix of a single wave plate, global phase dropped.
pub fn jones(w: &WaveplateSetting) -> Op2 {
    let rad = w.angle_deg.to_radians();
    match w.kind {
        WaveplateKind::Hwp => {
            let (s2, c2) = (2.0 * rad).sin_cos();
            Op2([
                [C64::new(c2, 0.0), C64::new(s2, 0.0)],
                [C64::new(s2, 0.0), C64::new(-c2, 0.0)],
            ])
        }
        WaveplateKind::Qwp => {
            // R(q)·diag(1, i)·R(−q)
            let (s, c) = rad.sin_cos();
            let (cc, ss, sc) = (c * c, s * s, s * c);
            Op2([
                [C64::new(cc, ss), C64::new(sc, -sc)],
                [C64::new(sc, -sc), C64::new(ss, cc)],
            ])
        }
    }
}

/// Ordered product of the chain's Jones matrices, first element applied
/// first (so the product runs right-to-left).
pub fn chain_matrix(chain: &ElementChain) -> Op2 {
    chain
        .0
        .iter()
        .fold(Op2::identity(), |acc, w| jones(w).mul(&acc))
}

/// NPBS realization of U₁: T = cos²θ_a, R = sin²θ_a.
pub fn compile_u1(a: &DilationAngles) -> NpbsSpec {
    NpbsSpec {
        transmittance: a.theta_a.cos().powi(2),
        reflectance: a.theta_a.sin().powi(2),
    }
}

/// Central HWP angle of the U₂ chain in degrees, mapped into (−45°, 45°].
pub fn u2_central_angle_deg(a: &DilationAngles) -> f64 {
    wrap_angle(-a.theta_w1.to_degrees() / 2.0, 45.0)
}

/// Five-element realization of U₂: HWP(0) → QWP(0) → HWP(φ) → QWP(0) →
/// HWP(0) with φ = −θ_w1/2. The chain matrix equals U₂ up to global phase.
pub fn compile_u2(a: &DilationAngles) -> ElementChain {
    let phi = u2_central_angle_deg(a);
    ElementChain(vec![
        WaveplateSetting::hwp(0.0),
        WaveplateSetting::qwp(0.0),
        WaveplateSetting::hwp(phi),
        WaveplateSetting::qwp(0.0),
        WaveplateSetting::hwp(0.0),
    ])
}

/// Realization of U₃. For sin θ_w2 = 0 (equal couplings μ = s) this is the
/// fixed four-element chain QWP(0) → HWP(0) → QWP(0) → HWP(0), whose matrix
/// is σ_z. The general case is decomposed numerically over a
/// QWP(α) → HWP(β) → QWP(γ) template.
pub fn compile_u3(a: &DilationAngles) -> Result<ElementChain, OpticsError> {
    if a.theta_w2.sin().abs() < 1e-9 {
        return Ok(ElementChain(vec![
            WaveplateSetting::qwp(0.0),
            WaveplateSetting::hwp(0.0),
            WaveplateSetting::qwp(0.0),
            WaveplateSetting::hwp(0.0),
        ]));
    }
    decompose_qhq(&dilation::u3_gate(a.theta_w2))
}

/// Squared Frobenius distance between `a` and `b` minimized over a global
/// phase on `a`.
pub fn phase_dist_sq(a: &Op2, b: &Op2) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            tr += a.0[r][c].conj() * b.0[r][c];
        }
    }
    let phase = if tr.norm() > 1e-300 {
        tr / tr.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let d = a.scale(phase).sub(b).frobenius_norm();
    d * d
}

/// Phase-invariant distance of a chain from a target gate (Frobenius,
/// minimized over global phase).
pub fn chain_residual(chain: &ElementChain, target: &Op2) -> f64 {
    phase_dist_sq(&chain_matrix(chain), target).sqrt()
}

/// Decomposes an arbitrary single-qubit unitary (up to global phase) into
/// QWP(α) → HWP(β) → QWP(γ) by bounded derivative-free minimization of the
/// phase-invariant distance, multi-started from eight deterministic seeds.
pub fn decompose_qhq(target: &Op2) -> Result<ElementChain, OpticsError> {
    let objective = |p: &[f64; 3]| -> f64 {
        let chain = qhq_chain(p);
        phase_dist_sq(&chain_matrix(&chain), target)
    };

    let mut best = ([0.0; 3], f64::INFINITY);
    for i in 0..8 {
        // corners of a cube in angle space, slightly de-symmetrized
        let sa = if i & 1 == 0 { -0.6 } else { 0.6 };
        let sb = if i & 2 == 0 { -0.6 } else { 0.6 };
        let sc = if i & 4 == 0 { -0.6 } else { 0.6 };
        let start = [sa + 0.03 * i as f64, sb + 0.02 * i as f64, sc];
        let (p, f) = nelder_mead(&objective, start, 0.5, 400);
        if f < best.1 {
            best = (p, f);
        }
    }
    // polish from the best point with a tight simplex
    let (p, f) = nelder_mead(&objective, best.0, 1e-4, 200);
    if f < best.1 {
        best = (p, f);
    }

    let residual = best.1.sqrt();
    if residual > 1e-6 {
        return Err(OpticsError::DecompositionFailed { residual });
    }
    Ok(qhq_chain(&best.0))
}

fn qhq_chain(p: &[f64; 3]) -> ElementChain {
    ElementChain(vec![
        WaveplateSetting::qwp(p[0].to_degrees()),
        WaveplateSetting::hwp(p[1].to_degrees()),
        WaveplateSetting::qwp(p[2].to_degrees()),
    ])
}

// Plain Nelder–Mead on three parameters. The objective is smooth and
// periodic, so an unconstrained simplex with final angle wrapping is enough.
fn nelder_mead(
    f: &impl Fn(&[f64; 3]) -> f64,
    start: [f64; 3],
    scale: f64,
    max_iter: usize,
) -> ([f64; 3], f64) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for k in 0..3 {
        let mut p = start;
        p[k] += scale;
        simplex.push((p, f(&p)));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[3].1 - simplex[0].1;
        if spread < 1e-30 && simplex[0].1 < 1e-24 {
            break;
        }

        let mut centroid = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for k in 0..3 {
                centroid[k] += p[k] / 3.0;
            }
        }
        let worst = simplex[3];

        let mut reflected = [0.0; 3];
        for k in 0..3 {
            reflected[k] = centroid[k] + ALPHA * (centroid[k] - worst.0[k]);
        }
        let f_r = f(&reflected);

        if f_r < simplex[0].1 {
            let mut expanded = [0.0; 3];
            for k in 0..3 {
                expanded[k] = centroid[k] + GAMMA * (reflected[k] - centroid[k]);
            }
            let f_e = f(&expanded);
            simplex[3] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[2].1 {
            simplex[3] = (reflected, f_r);
        } else {
            let mut contracted = [0.0; 3];
            for k in 0..3 {
                contracted[k] = centroid[k] + RHO * (worst.0[k] - centroid[k]);
            }
            let f_c = f(&contracted);
            if f_c < worst.1 {
                simplex[3] = (contracted, f_c);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for k in 0..3 {
                        entry.0[k] = best[k] + SIGMA * (entry.0[k] - best[k]);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// One row of the optics report.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub time: f64,
    pub npbs: NpbsSpec,
    pub u2_chain: ElementChain,
    pub u2_phi_deg: f64,
    pub u3_chain: ElementChain,
}

/// The full optics report: one row per time with the NPBS split ratio and
/// both wave-plate chains. Deterministic in its inputs.
pub fn table1_report(p: &PTParams, times: &[TimePoint]) -> Result<Vec<Table1Row>, OpticsError> {
    times
        .iter()
        .map(|&t| {
            let a = dilation::angles(p, t)?;
            Ok(Table1Row {
                time: t.0,
                npbs: compile_u1(&a),
                u2_chain: compile_u2(&a),
                u2_phi_deg: u2_central_angle_deg(&a),
                u3_chain: compile_u3(&a)?,
            })
        })
        .collect()
}

/// CSV serialization of the report, chains rendered as `KIND@angle` strings
/// joined by `->`.
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("time,npbs_T,npbs_R,u2_chain,u2_phi_deg,u3_chain\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.time,
            row.npbs.transmittance,
            row.npbs.reflectance,
            row.u2_chain,
            row.u2_phi_deg,
            row.u3_chain,
        ));
    }
    out
}
