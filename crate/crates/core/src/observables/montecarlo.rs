//! Monte-Carlo evaluation of semiclassical momentum densities
//! `t(p) = (2 pi)^{-2} |{x : |p + alpha A(x)|^2 <= 4 pi rho(x)}|`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::momentum::MomentumProfile;
use crate::analytic::MtfModel;
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 10_000;
/// Samples per RNG stream; blocks are independent of the worker count.
const BLOCK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Uniform sampling of the support disk; the hit fraction times `pi R^2 / (2 pi)^2`.
pub fn tf_momentum_density_mc(model: &MtfModel, p: [f64; 2], samples: usize, seed: u64) -> Result<McEstimate> {
    estimate(model, p, samples, seed, 0)
}

fn estimate(model: &MtfModel, p: [f64; 2], samples: usize, seed: u64, stream_base: u64) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("at least {MIN_SAMPLES} samples are required, got {samples}")));
    }
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(Error::InvalidInput("momentum is not finite".into()));
    }
    let radius = model.radius;
    let alpha = model.alpha;
    let blocks = samples.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream_base + b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut hits = 0u64;
            for _ in 0..count {
                let r = radius * rng.gen::<f64>().sqrt();
                let theta = 2.0 * PI * rng.gen::<f64>();
                let x = [r * theta.cos(), r * theta.sin()];
                let a = model.vector_potential(x);
                let q = [p[0] + alpha * a[0], p[1] + alpha * a[1]];
                if q[0] * q[0] + q[1] * q[1] <= 4.0 * PI * model.density(x) {
                    hits += 1;
                }
            }
            hits
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let f = hits as f64 / samples as f64;
    let scale = PI * radius * radius / (4.0 * PI * PI);
    Ok(McEstimate { value: scale * f, stderr: scale * (f * (1.0 - f) / samples as f64).sqrt(), samples })
}

/// Radial profile at momenta `(p, 0)`, one independent stream family per momentum.
pub fn tf_momentum_profile_mc(model: &MtfModel, momenta: &[f64], samples: usize, seed: u64) -> Result<MomentumProfile> {
    let mut values = Vec::with_capacity(momenta.len());
    let mut errors = Vec::with_capacity(momenta.len());
    for (i, &p) in momenta.iter().enumerate() {
        let e = estimate(model, [p, 0.0], samples, seed, ((i as u64) + 1) << 32)?;
        values.push(e.value);
        errors.push(e.stderr);
    }
    Ok(MomentumProfile {
        momenta: momenta.to_vec(),
        values,
        errors: Some(errors),
        particles: model.particles,
        rescaled: false,
    })
}

/// Largest momentum with a non-empty indicator.
pub fn momentum_support_bound(model: &MtfModel) -> f64 {
    model.momentum_width(20_001)
}
