use std::f64::consts::PI;

use super::Grid;
use crate::analytic::MtfModel;
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;
pub const DEFAULT_MAX_POINTS: usize = 1024;

/// Radial samples used to locate the maximum momentum-space radius.
const WIDTH_SAMPLES: usize = 20_001;

/// Box and resolution chosen from the magnetic Thomas-Fermi profile.
#[derive(Clone, Debug)]
pub struct GridSizing {
    pub grid: Grid,
    /// Support radius `lambda^{1/s}` of the mTF density.
    pub support_radius: f64,
    /// `max_x (alpha |A(x)| + sqrt(4 pi rho(x)))` over the support.
    pub momentum_width: f64,
    /// Points per side before the floor was applied.
    pub requested_points: f64,
}

/// Box side `2 q_x R` and spacing `2 pi / (q_p W_p)`, rounded up to an even number of
/// points of at least [`MIN_POINTS`].
pub fn size_grid(
    particles: usize,
    alpha: f64,
    exponent: f64,
    q_x: f64,
    q_p: f64,
    max_points: usize,
) -> Result<GridSizing> {
    let plan = plan(particles, alpha, exponent, q_x, q_p, max_points)?;
    Ok(GridSizing {
        grid: Grid::new(plan.box_length, plan.points)?,
        support_radius: plan.radius,
        momentum_width: plan.momentum_width,
        requested_points: plan.requested,
    })
}

/// Points per side [`size_grid`] would choose, without building the grid.
pub fn planned_points(
    particles: usize,
    alpha: f64,
    exponent: f64,
    q_x: f64,
    q_p: f64,
    max_points: usize,
) -> Result<(usize, f64)> {
    let plan = plan(particles, alpha, exponent, q_x, q_p, max_points)?;
    Ok((plan.points, plan.box_length))
}

struct Plan {
    radius: f64,
    momentum_width: f64,
    box_length: f64,
    requested: f64,
    points: usize,
}

fn plan(particles: usize, alpha: f64, exponent: f64, q_x: f64, q_p: f64, max_points: usize) -> Result<Plan> {
    for (name, v) in [("alpha", alpha), ("exponent", exponent), ("q_x", q_x), ("q_p", q_p)] {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("{name} is not finite")));
        }
    }
    if particles == 0 {
        return Err(Error::InvalidInput("at least one particle is required".into()));
    }
    if q_x < 1.0 || q_p < 1.0 {
        return Err(Error::InvalidInput(format!(
            "quality factors must be at least 1 (q_x = {q_x}, q_p = {q_p})"
        )));
    }
    let model = MtfModel::new(particles as f64, alpha, exponent)?;
    let radius = model.radius;
    let momentum_width = model.momentum_width(WIDTH_SAMPLES);

    let box_length = 2.0 * q_x * radius;
    let spacing = 2.0 * PI / (q_p * momentum_width);
    let requested = box_length / spacing;
    let mut points = (requested - 1e-9).ceil().max(0.0) as usize;
    points += points % 2;
    let points = points.max(MIN_POINTS);
    if points > max_points {
        return Err(Error::GridTooLarge { needed: points, cap: max_points });
    }
    Ok(Plan { radius, momentum_width, box_length, requested, points })
}
