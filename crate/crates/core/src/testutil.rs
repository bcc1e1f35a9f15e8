//! Helpers shared by the unit tests of several modules.

use rand::Rng;

use crate::model::PTParams;

/// Random parameter set with ω² comfortably positive (unbroken phase).
pub(crate) fn random_unbroken(rng: &mut impl Rng) -> PTParams {
    let s: f64 = rng.gen_range(0.2..3.0);
    let mu: f64 = rng.gen_range(0.2..3.0);
    let theta: f64 = rng.gen_range(-1.2..1.2);
    let cap = (0.9 * (s * mu).sqrt() / theta.sin().abs().max(1e-3)).min(3.0);
    let r = rng.gen_range(0.0..cap);
    PTParams::new(r, s, mu, theta)
}

/// Random parameter set with ω² < 0 (broken phase).
pub(crate) fn random_broken(rng: &mut impl Rng) -> PTParams {
    let s: f64 = rng.gen_range(0.2..2.0);
    let mu: f64 = rng.gen_range(0.2..2.0);
    let theta: f64 = rng.gen_range(0.6..1.5);
    // r·sinθ above √(sμ) pushes ω² negative; keep a margin.
    let r = (1.1 * (s * mu).sqrt() / theta.sin().abs()) * rng.gen_range(1.05..2.0);
    PTParams::new(r, s, mu, theta)
}
