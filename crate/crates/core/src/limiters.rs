//! Blending parameters from provable cell conditions: the half-cell entropy
//! productions behind Condition F, the density and pressure Conditions ρ and
//! P, and the Dafermos entropy-rate predictor with its smoothstep and
//! sup-mollification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{ConservedState, FluxValue, GasModel};
use crate::flux::{CellData, InterfaceFluxes};
use crate::mesh::BoundaryKind;

/// Quarter of a cell adjacent to its left or right interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// `u_k + 2λ·(±)(f(u_k) − flux)`, the half-cell state of the proof.
pub fn half_state(u_k: &ConservedState, f_k: FluxValue, flux: FluxValue, lambda: f64, side: Side) -> ConservedState {
    u_k.add_flux(2.0 * lambda * side.sign(), f_k - flux)
}

/// Entropy production of one half-cell update, with a round-off scale for
/// sign decisions. `None` if the half state is inadmissible.
fn production(
    gas: &GasModel,
    cell: &CellData,
    flux: FluxValue,
    entropy_flux: f64,
    dt: f64,
    dx: f64,
    side: Side,
) -> Option<(f64, f64)> {
    let state = half_state(&cell.u, cell.f, flux, dt / dx, side);
    let u_half = gas.entropy(&state).ok()?;
    let time_part = (u_half - cell.entropy) / dt;
    let space_part = 2.0 * side.sign() * (entropy_flux - cell.entropy_flux) / dx;
    let scale = (u_half.abs() + cell.entropy.abs()) / dt + 2.0 * (entropy_flux.abs() + cell.entropy_flux.abs()) / dx;
    Some((time_part + space_part, 1e-12 * scale))
}

/// `[U(u_k + 2λ(±)(f(u_k) − flux)) − U(u_k)]/Δt + 2(±)(entropy_flux − F(u_k))/Δx`.
///
/// Fed a dissipative flux pair this is `s`, fed a conservative pair it is
/// `p`.
pub fn half_cell_production(
    gas: &GasModel,
    u_k: &ConservedState,
    flux: FluxValue,
    entropy_flux: f64,
    dt: f64,
    dx: f64,
    side: Side,
) -> Result<f64> {
    let cell = CellData::new(gas, u_k)?;
    production(gas, &cell, flux, entropy_flux, dt, dx, side)
        .map(|(value, _)| value)
        .ok_or_else(|| Error::Cfl("half-cell state left the admissible set".into()))
}

/// Smallest `α ∈ [0, 1]` with `α·s + (1−α)·p ≤ 0`.
pub fn alpha_condition_f(s: f64, p: f64) -> Result<f64> {
    if s > 0.0 || s.is_nan() || p.is_nan() {
        return Err(Error::Precondition(format!("dissipative entropy production s = {s} is positive")));
    }
    Ok(if p <= 0.0 {
        0.0
    } else if s < 0.0 {
        (p / (p - s)).min(1.0)
    } else {
        1.0
    })
}

/// `α_j = max(right demand of cell j−1, left demand of cell j)`.
fn combine_cell_demands(left: &[f64], right: &[f64], bc: BoundaryKind) -> Vec<f64> {
    let n = left.len();
    (0..=n)
        .map(|j| {
            let from_left_cell = match (j, bc) {
                (0, BoundaryKind::Periodic) => right[n - 1],
                (0, BoundaryKind::Extrapolation) => 0.0,
                _ => right[j - 1],
            };
            let from_right_cell = match (j == n, bc) {
                (true, BoundaryKind::Periodic) => left[0],
                (true, BoundaryKind::Extrapolation) => 0.0,
                _ => left[j],
            };
            from_left_cell.max(from_right_cell).clamp(0.0, 1.0)
        })
        .collect()
}

/// Per-interface α such that Condition F holds for both adjacent cells.
///
/// `g` carries the dissipative fluxes with their entropy fluxes, `h` the
/// entropy-conservative ones; both hold `n + 1` interfaces. A half-cell state
/// of `h` outside the admissible set demands `α = 1`.
pub fn alpha_field_condition_f(
    gas: &GasModel,
    states: &[ConservedState],
    bc: BoundaryKind,
    g: &InterfaceFluxes,
    h: &InterfaceFluxes,
    dt: f64,
    dx: f64,
) -> Result<Vec<f64>> {
    let n = states.len();
    check_lengths(n, g, h)?;
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    for (k, u) in states.iter().enumerate() {
        let cell = CellData::new(gas, u)?;
        for (side, j, slot) in [(Side::Left, k, &mut left[k]), (Side::Right, k + 1, &mut right[k])] {
            let (s, tol) = production(gas, &cell, g.flux[j], g.entropy_flux[j], dt, dx, side)
                .ok_or_else(|| Error::Cfl(format!("dissipative half-cell state of cell {k} is inadmissible")))?;
            if s > tol {
                return Err(Error::Precondition(format!(
                    "dissipative entropy production {s:e} > 0 in cell {k}"
                )));
            }
            *slot = match production(gas, &cell, h.flux[j], h.entropy_flux[j], dt, dx, side) {
                Some((p, _)) => alpha_condition_f(s.min(0.0), p)?,
                None => 1.0,
            };
        }
    }
    Ok(combine_cell_demands(&left, &right, bc))
}

fn check_lengths(n: usize, g: &InterfaceFluxes, h: &InterfaceFluxes) -> Result<()> {
    if [g.flux.len(), g.entropy_flux.len(), h.flux.len(), h.entropy_flux.len()]
        .iter()
        .any(|&len| len != n + 1)
    {
        return Err(Error::Argument(format!("expected {} interface values", n + 1)));
    }
    Ok(())
}

/// Which admissibility functional a positivity bound controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositivityFunctional {
    NegDensity,
    NegPressure,
}

/// Bound `c_h / (c_h − c_g)` on α from the functional values at the
/// high-order and dissipative half states; 0 when `c_h ≤ 0`.
pub fn positivity_ratio(c_h: f64, c_g: f64) -> Result<f64> {
    if !(c_g <= 0.0) {
        return Err(Error::Precondition(format!("dissipative half state violates the bound (c = {c_g})")));
    }
    if c_h <= 0.0 {
        return Ok(0.0);
    }
    Ok((c_h / (c_h - c_g)).clamp(0.0, 1.0))
}

/// `min(1e−10, q(g)/2)`: a floor strictly below the dissipative value.
fn floor_below(q_g: f64) -> f64 {
    (0.5 * q_g).min(1e-10)
}

/// `(γ−1)(E − m²/2ρ)`, or `−∞` without positive density.
fn pressure_or_vacuum(gas: &GasModel, u: &ConservedState) -> f64 {
    if u.rho > 0.0 {
        gas.pressure_unchecked(u)
    } else {
        f64::NEG_INFINITY
    }
}

/// Lower bound on α from Condition ρ or Condition P at one half cell.
///
/// The functional is `c = floor − q` with `q` the density or pressure and
/// the floor slightly below `q` at the dissipative half state.
#[allow(clippy::too_many_arguments)]
pub fn alpha_condition_positivity(
    gas: &GasModel,
    u_k: &ConservedState,
    g: FluxValue,
    h: FluxValue,
    lambda: f64,
    side: Side,
    functional: PositivityFunctional,
) -> Result<f64> {
    let f_k = gas.physical_flux(u_k)?;
    let sg = half_state(u_k, f_k, g, lambda, side);
    let sh = half_state(u_k, f_k, h, lambda, side);
    let (q_g, q_h) = match functional {
        PositivityFunctional::NegDensity => (sg.rho, sh.rho),
        PositivityFunctional::NegPressure => {
            if !(sh.rho > 0.0) {
                return Ok(1.0);
            }
            (pressure_or_vacuum(gas, &sg), pressure_or_vacuum(gas, &sh))
        }
    };
    if !(q_g > 0.0) {
        return Err(Error::Precondition(format!("dissipative half state has q = {q_g}")));
    }
    let floor = floor_below(q_g);
    positivity_ratio(floor - q_h, floor - q_g)
}

/// Density then pressure: α_ρ makes the blended density positive, after
/// which the pressure bound is taken between the dissipative state and the
/// α_ρ-blended state, where pressure is concave.
fn positivity_demand(gas: &GasModel, sg: &ConservedState, sh: &ConservedState) -> Result<f64> {
    let rho_floor = floor_below(sg.rho);
    let alpha_rho = positivity_ratio(rho_floor - sh.rho, rho_floor - sg.rho)?;
    let blend = *sg * alpha_rho + *sh * (1.0 - alpha_rho);
    let p_g = pressure_or_vacuum(gas, sg);
    if !(p_g > 0.0) {
        return Err(Error::Precondition(format!("dissipative half state has pressure {p_g}")));
    }
    let p_floor = floor_below(p_g);
    let ratio = positivity_ratio(p_floor - pressure_or_vacuum(gas, &blend), p_floor - p_g)?;
    Ok((alpha_rho + (1.0 - alpha_rho) * ratio).clamp(alpha_rho, 1.0))
}

/// Per-interface `max(α_ρ, α_p)` over both adjacent cells.
pub fn alpha_field_positivity(
    gas: &GasModel,
    states: &[ConservedState],
    bc: BoundaryKind,
    g: &[FluxValue],
    h: &[FluxValue],
    lambda: f64,
) -> Result<Vec<f64>> {
    let n = states.len();
    if g.len() != n + 1 || h.len() != n + 1 {
        return Err(Error::Argument(format!("expected {} interface fluxes", n + 1)));
    }
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    for (k, u) in states.iter().enumerate() {
        let f_k = gas.physical_flux(u)?;
        for (side, j, slot) in [(Side::Left, k, &mut left[k]), (Side::Right, k + 1, &mut right[k])] {
            let sg = half_state(u, f_k, g[j], lambda, side);
            let sh = half_state(u, f_k, h[j], lambda, side);
            *slot = positivity_demand(gas, &sg, &sh)?;
        }
    }
    Ok(combine_cell_demands(&left, &right, bc))
}

/// `6x⁵ − 15x⁴ + 10x³` on `[0, 1]`, constant outside.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

fn check_kernel(kernel: &[f64]) -> Result<usize> {
    if kernel.len().is_multiple_of(2) {
        return Err(Error::Argument("kernel needs an odd number of samples".into()));
    }
    if kernel.iter().any(|k| !(*k >= 0.0)) {
        return Err(Error::Argument("kernel samples must be nonnegative".into()));
    }
    Ok(kernel.len() / 2)
}

/// Discrete sup-mollification `out_i = max_j values_j · kernel_{i−j+c}`,
/// truncated at the ends.
pub fn sup_mollify(values: &[f64], kernel: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Argument("nothing to mollify".into()));
    }
    let c = check_kernel(kernel)? as isize;
    let n = values.len() as isize;
    Ok((0..n)
        .map(|i| {
            (-c..=c)
                .filter_map(|o| {
                    let j = i - o;
                    (0..n).contains(&j).then(|| values[j as usize] * kernel[(o + c) as usize])
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// Sup-mollification with periodic wrap-around.
pub fn sup_mollify_periodic(values: &[f64], kernel: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Argument("nothing to mollify".into()));
    }
    let c = check_kernel(kernel)? as isize;
    let n = values.len() as isize;
    Ok((0..n)
        .map(|i| {
            (-c..=c)
                .map(|o| values[(i - o).rem_euclid(n) as usize] * kernel[(o + c) as usize])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// Mollifies an interface field of `n + 1` entries; on periodic grids the
/// last entry duplicates the first.
pub(crate) fn mollify_interfaces(alpha: &[f64], kernel: &[f64], bc: BoundaryKind) -> Result<Vec<f64>> {
    match bc {
        BoundaryKind::Extrapolation => sup_mollify(alpha, kernel),
        BoundaryKind::Periodic => {
            let n = alpha.len() - 1;
            let mut out = sup_mollify_periodic(&alpha[..n], kernel)?;
            out.push(out[0]);
            Ok(out)
        }
    }
}

/// Samples of the cut hat `max(0, min(1, 2x+2, −2x+2))` on `[−1, 1]`.
pub fn cut_hat_kernel(width: usize) -> Result<Vec<f64>> {
    if width.is_multiple_of(2) {
        return Err(Error::Argument(format!("hat width {width} must be odd")));
    }
    if width == 1 {
        return Ok(vec![1.0]);
    }
    let step = 2.0 / (width - 1) as f64;
    Ok((0..width)
        .map(|i| {
            let x = -1.0 + i as f64 * step;
            (2.0 * x + 2.0).min(-2.0 * x + 2.0).clamp(0.0, 1.0)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DafermosParams {
    pub a: f64,
    pub b: f64,
    pub hat_width: usize,
}

impl Default for DafermosParams {
    fn default() -> Self {
        Self { a: 0.1, b: 0.4, hat_width: 5 }
    }
}

/// Interface α from per-cell entropy rates: cells dissipating a large share
/// of the strongest rate get α near one, spread by the cut hat.
pub fn dafermos_predictor(s_field: &[f64], params: DafermosParams, bc: BoundaryKind) -> Result<Vec<f64>> {
    if !(params.b > 0.0) {
        return Err(Error::Argument(format!("threshold width b = {} must be positive", params.b)));
    }
    if s_field.is_empty() {
        return Err(Error::Argument("empty entropy-rate field".into()));
    }
    let kernel = cut_hat_kernel(params.hat_width)?;
    let n = s_field.len();
    let s_ref = s_field.iter().copied().fold(f64::INFINITY, f64::min);
    if !(s_ref < 0.0) {
        return Ok(vec![0.0; n + 1]);
    }
    let raw: Vec<f64> = s_field.iter().map(|s| smoothstep((s / s_ref - params.a) / params.b)).collect();
    let cells = match bc {
        BoundaryKind::Periodic => sup_mollify_periodic(&raw, &kernel)?,
        BoundaryKind::Extrapolation => sup_mollify(&raw, &kernel)?,
    };
    Ok(combine_cell_demands(&cells, &cells, bc))
}

/// Per-cell entropy rate of the dissipative scheme: the mean of the two
/// half-cell productions.
pub fn dissipative_entropy_rates(
    gas: &GasModel,
    states: &[ConservedState],
    g: &InterfaceFluxes,
    dt: f64,
    dx: f64,
) -> Result<Vec<f64>> {
    states
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let cell = CellData::new(gas, u)?;
            let l = production(gas, &cell, g.flux[k], g.entropy_flux[k], dt, dx, Side::Left);
            let r = production(gas, &cell, g.flux[k + 1], g.entropy_flux[k + 1], dt, dx, Side::Right);
            match (l, r) {
                (Some((l, _)), Some((r, _))) => Ok(0.5 * (l + r)),
                _ => Err(Error::Cfl(format!("dissipative half-cell state of cell {k} is inadmissible"))),
            }
        })
        .collect()
}
