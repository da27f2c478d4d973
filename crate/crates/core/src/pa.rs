//! Polynomial annihilation jump detection and the α predictor built on it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::ConservedState;
use crate::limiters::mollify_interfaces;
use crate::mesh::{pad, BoundaryKind, Grid1D};

/// Annihilation coefficients of order `m` on `m + 1` points with the
/// normalisation over the points right of `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PaOperator {
    pub points: Vec<f64>,
    pub xi: f64,
    pub coeffs: Vec<f64>,
    pub q: f64,
}

impl PaOperator {
    pub fn order(&self) -> usize {
        self.points.len() - 1
    }
}

/// Solves `Σ_j c_j x_j^l = d^m/dx^m x^l |_ξ` for `l = 0..=m`.
///
/// The system is assembled in coordinates centred at `ξ` and scaled by the
/// stencil width, which keeps the Vandermonde matrix well conditioned.
pub fn annihilation_coefficients(points: &[f64], xi: f64) -> Result<PaOperator> {
    if points.len() < 2 {
        return Err(Error::Argument("annihilation needs at least two points".into()));
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("stencil points must be strictly increasing".into()));
    }
    let m = points.len() - 1;
    let (lo, hi) = (points[0], points[m]);
    if !(lo <= xi && xi <= hi) {
        return Err(Error::Argument(format!("ξ = {xi} outside the stencil [{lo}, {hi}]")));
    }
    let width = hi - lo;
    let t: Vec<f64> = points.iter().map(|x| (x - xi) / width).collect();
    let vandermonde = DMatrix::from_fn(m + 1, m + 1, |l, j| t[j].powi(l as i32));
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = factorial;
    let scaled = vandermonde
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Argument("singular annihilation system".into()))?;
    let unscale = width.powi(m as i32);
    let coeffs: Vec<f64> = scaled.iter().map(|c| c / unscale).collect();
    let q: f64 = points.iter().zip(&coeffs).filter(|(x, _)| **x >= xi).map(|(_, c)| c).sum();
    let magnitude: f64 = coeffs.iter().map(|c| c.abs()).sum();
    if !(q.abs() > 1e-12 * magnitude) {
        return Err(Error::DegenerateStencil(format!("normalisation q = {q} vanishes")));
    }
    Ok(PaOperator { points: points.to_vec(), xi, coeffs, q })
}

/// `L_m[s](ξ) = (1/q) Σ c_j s_j`.
pub fn pa_jump(op: &PaOperator, samples: &[f64]) -> Result<f64> {
    if samples.len() != op.coeffs.len() {
        return Err(Error::Argument(format!(
            "{} samples for a {}-point stencil",
            samples.len(),
            op.coeffs.len()
        )));
    }
    Ok(op.coeffs.iter().zip(samples).map(|(c, s)| c * s).sum::<f64>() / op.q)
}

/// Settings of the PA predictor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaParams {
    /// Half-width `p` of the cell window around an interface.
    pub half_width: usize,
    /// Operator order `m ≤ 2p − 1`.
    pub order: usize,
    pub c1: f64,
}

impl Default for PaParams {
    fn default() -> Self {
        Self { half_width: 4, order: 4, c1: 10.0 }
    }
}

/// Mollification kernel `max(1 − |x/Δx|/3, 0)` at integer offsets.
pub const PA_KERNEL: [f64; 5] = [1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0];

/// Uniform-grid operators for one interface, reused at every interface.
#[derive(Clone, Debug)]
pub struct PaLimiter {
    params: PaParams,
    /// `(first cell offset inside the window, c_j / q)` per sub-stencil.
    stencils: Vec<(usize, Vec<f64>)>,
}

impl PaLimiter {
    /// Builds the most centred `(m+1)`-point sub-stencils of the `2p`-cell
    /// window; for an even point count there is one, otherwise the two
    /// shifts with one extra cell on either side.
    pub fn new(params: PaParams) -> Result<Self> {
        let p = params.half_width;
        let m = params.order;
        if p == 0 || m == 0 || m > 2 * p - 1 {
            return Err(Error::Argument(format!("order {m} does not fit a window of {} cells", 2 * p)));
        }
        if !(params.c1 > 0.0) {
            return Err(Error::Argument("c1 must be positive".into()));
        }
        let points = m + 1;
        let mut stencils = Vec::new();
        for n_left in [points / 2, points.div_ceil(2)] {
            if stencils.iter().any(|(s, _)| *s == p - n_left) {
                continue;
            }
            let start = p - n_left;
            // Cell centres relative to the interface, in cell widths.
            let x: Vec<f64> = (start..start + points).map(|i| i as f64 - p as f64 + 0.5).collect();
            let op = annihilation_coefficients(&x, 0.0)?;
            stencils.push((start, op.coeffs.iter().map(|c| c / op.q).collect()));
        }
        Ok(Self { params, stencils })
    }

    pub fn params(&self) -> PaParams {
        self.params
    }

    /// Cells needed on each side of an interface.
    pub fn half_width(&self) -> usize {
        self.params.half_width
    }

    fn jump(&self, window: &[f64]) -> f64 {
        self.stencils
            .iter()
            .map(|(start, w)| w.iter().zip(&window[*start..]).map(|(c, s)| c * s).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Unmollified `min(1, max_components c1·|L| / (|z| + c2))` at every
    /// interface.
    pub fn raw_alpha(&self, states: &[ConservedState], grid: &Grid1D, bc: BoundaryKind) -> Result<Vec<f64>> {
        let n = states.len();
        let p = self.params.half_width;
        if n < 2 * p {
            return Err(Error::Argument(format!("{n} cells cannot host a {}-cell PA window", 2 * p)));
        }
        let padded = pad(states, bc, p);
        let components: [Vec<f64>; 3] = std::array::from_fn(|c| padded.iter().map(|u| u.to_array()[c]).collect());
        let c2: [f64; 3] = std::array::from_fn(|c| {
            states.iter().map(|u| u.to_array()[c].abs()).sum::<f64>() / n as f64 * grid.length()
        });
        Ok((0..=n)
            .map(|j| {
                components
                    .iter()
                    .zip(c2)
                    .map(|(values, c2)| {
                        let window = &values[j..j + 2 * p];
                        let l = self.jump(window);
                        let (lo, hi) = window
                            .iter()
                            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
                        // L applied to a max/min step across the interface is min − max.
                        let z = hi - lo;
                        self.params.c1 * l / (z + c2)
                    })
                    .fold(0.0, f64::max)
                    .min(1.0)
            })
            .collect())
    }

    /// Mollified α field on the `n + 1` interfaces.
    pub fn alpha_field(&self, states: &[ConservedState], grid: &Grid1D, bc: BoundaryKind) -> Result<Vec<f64>> {
        mollify_interfaces(&self.raw_alpha(states, grid, bc)?, &PA_KERNEL, bc)
    }
}

/// PA α on every interface with the default operator.
pub fn pa_alpha_field(
    states: &[ConservedState],
    grid: &Grid1D,
    bc: BoundaryKind,
    params: PaParams,
) -> Result<Vec<f64>> {
    PaLimiter::new(params)?.alpha_field(states, grid, bc)
}
