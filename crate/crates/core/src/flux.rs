//! Numerical fluxes: the dissipative local Lax-Friedrichs flux, second- and
//! fourth-order entropy-conservative fluxes, their numerical entropy fluxes,
//! the convex GT blend, and the SSP Runge-Kutta flux quadratures that turn a
//! multi-stage update into a single conservative step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{ConservedState, FluxValue, GasModel};
use crate::mesh::{pad, BoundaryKind, FieldSnapshot};

/// Per-cell quantities reused by every flux touching that cell.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CellData {
    pub u: ConservedState,
    pub rho: f64,
    pub v: f64,
    /// `ρ / (2p)`
    pub beta: f64,
    pub f: FluxValue,
    pub w: [f64; 3],
    pub psi: f64,
    pub entropy: f64,
    pub entropy_flux: f64,
    pub speed: f64,
}

impl CellData {
    pub fn new(gas: &GasModel, u: &ConservedState) -> Result<Self> {
        let p = gas.check_admissible(u)?;
        let g = gas.gamma();
        let rho = u.rho;
        let v = u.mom / rho;
        let s = p.ln() - g * rho.ln();
        let scaled = (g - 1.0) * rho / p;
        Ok(Self {
            u: *u,
            rho,
            v,
            beta: 0.5 * rho / p,
            f: FluxValue::new(u.mom, u.mom * v + p, v * (u.energy + p)),
            w: [g - s - 0.5 * scaled * v * v, scaled * v, -scaled],
            psi: (g - 1.0) * u.mom,
            entropy: -rho * s,
            entropy_flux: -u.mom * s,
            speed: v.abs() + (g * p / rho).sqrt(),
        })
    }
}

/// Logarithmic mean `(b − a) / ln(b/a)` with a series branch for nearly
/// equal arguments.
pub fn ln_mean(a: f64, b: f64) -> f64 {
    let xi = b / a;
    let f = (xi - 1.0) / (xi + 1.0);
    let u = f * f;
    if u < 1e-4 {
        (a + b) / (2.0 + u * (2.0 / 3.0 + u * (2.0 / 5.0 + u * (2.0 / 7.0))))
    } else {
        (b - a) / xi.ln()
    }
}

fn llf_cells(l: &CellData, r: &CellData) -> (FluxValue, f64) {
    let c = l.speed.max(r.speed);
    let flux = (l.f + r.f) * 0.5 - FluxValue::from_array((r.u - l.u).to_array()) * (0.5 * c);
    let entropy = 0.5 * (l.entropy_flux + r.entropy_flux) - 0.5 * c * (r.entropy - l.entropy);
    (flux, entropy)
}

fn ec2_cells(gamma: f64, l: &CellData, r: &CellData) -> FluxValue {
    let rho_ln = ln_mean(l.rho, r.rho);
    let beta_ln = ln_mean(l.beta, r.beta);
    let rho_avg = 0.5 * (l.rho + r.rho);
    let beta_avg = 0.5 * (l.beta + r.beta);
    let v_avg = 0.5 * (l.v + r.v);
    let v2_avg = 0.5 * (l.v * l.v + r.v * r.v);
    let p_hat = rho_avg / (2.0 * beta_avg);
    let mass = rho_ln * v_avg;
    let momentum = p_hat + v_avg * mass;
    let energy = mass * (1.0 / (2.0 * (gamma - 1.0) * beta_ln) - 0.5 * v2_avg) + v_avg * momentum;
    FluxValue::new(mass, momentum, energy)
}

/// Tadmor's consistent entropy flux `w̄ᵀh − ψ̄` for a two-point flux `h`.
fn tadmor_entropy_flux(l: &CellData, r: &CellData, h: FluxValue) -> f64 {
    let w_avg = [0.5 * (l.w[0] + r.w[0]), 0.5 * (l.w[1] + r.w[1]), 0.5 * (l.w[2] + r.w[2])];
    h.dot(w_avg) - 0.5 * (l.psi + r.psi)
}

fn ec2_pair(gamma: f64, l: &CellData, r: &CellData) -> (FluxValue, f64) {
    let h = ec2_cells(gamma, l, r);
    (h, tadmor_entropy_flux(l, r, h))
}

fn ec4_cells(gamma: f64, c: &[CellData]) -> (FluxValue, f64) {
    let (h_mid, e_mid) = ec2_pair(gamma, &c[1], &c[2]);
    let (h_left, e_left) = ec2_pair(gamma, &c[0], &c[2]);
    let (h_right, e_right) = ec2_pair(gamma, &c[1], &c[3]);
    (
        h_mid * (4.0 / 3.0) - (h_left + h_right) * (1.0 / 6.0),
        4.0 / 3.0 * e_mid - (e_left + e_right) / 6.0,
    )
}

/// Local Lax-Friedrichs (Rusanov) flux.
pub fn llf_flux(gas: &GasModel, ul: &ConservedState, ur: &ConservedState) -> Result<FluxValue> {
    Ok(llf_cells(&CellData::new(gas, ul)?, &CellData::new(gas, ur)?).0)
}

/// Two-point entropy-conservative flux (Chandrashekar's kinetic-energy
/// preserving form), built from logarithmic means of density and `ρ/(2p)`.
pub fn ec_flux2(gas: &GasModel, ul: &ConservedState, ur: &ConservedState) -> Result<FluxValue> {
    Ok(ec2_cells(gas.gamma(), &CellData::new(gas, ul)?, &CellData::new(gas, ur)?))
}

/// Fourth-order entropy-conservative flux on `u_{k-1}, u_k, u_{k+1}, u_{k+2}`.
pub fn ec_flux4(gas: &GasModel, window: &[ConservedState; 4]) -> Result<FluxValue> {
    let cells = cells_of(gas, window)?;
    Ok(ec4_cells(gas.gamma(), &cells).0)
}

/// Convex blend `α·g + (1−α)·h`.
pub fn gt_flux(alpha: f64, g: FluxValue, h: FluxValue) -> Result<FluxValue> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Argument(format!("blending parameter {alpha} outside [0, 1]")));
    }
    Ok(g * alpha + h * (1.0 - alpha))
}

fn cells_of(gas: &GasModel, states: &[ConservedState]) -> Result<Vec<CellData>> {
    states.iter().map(|u| CellData::new(gas, u)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxKind {
    Llf,
    Ec2,
    Ec4,
}

impl FluxKind {
    /// `p` of a `2p`-point flux.
    pub fn half_width(self) -> usize {
        match self {
            FluxKind::Llf | FluxKind::Ec2 => 1,
            FluxKind::Ec4 => 2,
        }
    }

    pub(crate) fn eval_cells(self, gamma: f64, cells: &[CellData]) -> (FluxValue, f64) {
        match self {
            FluxKind::Llf => llf_cells(&cells[0], &cells[1]),
            FluxKind::Ec2 => ec2_pair(gamma, &cells[0], &cells[1]),
            FluxKind::Ec4 => ec4_cells(gamma, cells),
        }
    }

    fn check_stencil(self, stencil: &[ConservedState]) -> Result<()> {
        if stencil.len() != 2 * self.half_width() {
            return Err(Error::Argument(format!(
                "{:?} needs a {}-point stencil, got {}",
                self,
                2 * self.half_width(),
                stencil.len()
            )));
        }
        Ok(())
    }

    /// Numerical flux at the centre interface of `stencil`.
    pub fn flux(self, gas: &GasModel, stencil: &[ConservedState]) -> Result<FluxValue> {
        self.check_stencil(stencil)?;
        Ok(self.eval_cells(gas.gamma(), &cells_of(gas, stencil)?).0)
    }
}

/// Numerical entropy flux paired with `kind`: `½(F_l+F_r) − ½c(U_r−U_l)` for
/// LLF, Tadmor's `w̄ᵀh − ψ̄` for the two-point EC flux, and the 4/3, −1/6
/// combination of the latter for the fourth-order flux.
pub fn numerical_entropy_flux(kind: FluxKind, stencil: &[ConservedState], gas: &GasModel) -> Result<f64> {
    kind.check_stencil(stencil)?;
    Ok(kind.eval_cells(gas.gamma(), &cells_of(gas, stencil)?).1)
}

/// Fluxes and numerical entropy fluxes on all `n_cells + 1` interfaces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InterfaceFluxes {
    pub flux: Vec<FluxValue>,
    pub entropy_flux: Vec<f64>,
}

impl InterfaceFluxes {
    pub fn zeros(n_interfaces: usize) -> Self {
        Self { flux: vec![FluxValue::ZERO; n_interfaces], entropy_flux: vec![0.0; n_interfaces] }
    }

    fn accumulate(&mut self, weight: f64, other: &InterfaceFluxes) {
        for (a, b) in self.flux.iter_mut().zip(&other.flux) {
            *a += *b * weight;
        }
        for (a, b) in self.entropy_flux.iter_mut().zip(&other.entropy_flux) {
            *a += weight * b;
        }
    }
}

/// Per-cell data of `states` padded with `ghosts` cells per side. A failing
/// cell is reported by its index inside the unpadded field.
pub(crate) fn padded_cells(
    gas: &GasModel,
    states: &[ConservedState],
    bc: BoundaryKind,
    ghosts: usize,
    time: f64,
) -> Result<Vec<CellData>> {
    let n = states.len();
    pad(states, bc, ghosts)
        .iter()
        .enumerate()
        .map(|(i, u)| {
            CellData::new(gas, u).map_err(|_| Error::Positivity {
                cell: i.saturating_sub(ghosts).min(n.saturating_sub(1)),
                time,
            })
        })
        .collect()
}

/// Interface `j` (left face of cell `j`) uses cells `j−p .. j+p−1`.
pub fn interface_fluxes(
    kind: FluxKind,
    states: &[ConservedState],
    bc: BoundaryKind,
    gas: &GasModel,
    time: f64,
) -> Result<InterfaceFluxes> {
    let p = kind.half_width();
    let cells = padded_cells(gas, states, bc, p, time)?;
    Ok(interface_fluxes_from_cells(kind, gas.gamma(), &cells, p, states.len()))
}

pub(crate) fn interface_fluxes_from_cells(
    kind: FluxKind,
    gamma: f64,
    cells: &[CellData],
    ghosts: usize,
    n: usize,
) -> InterfaceFluxes {
    let p = kind.half_width();
    let (flux, entropy_flux) = (0..=n)
        .map(|j| {
            let start = j + ghosts - p;
            kind.eval_cells(gamma, &cells[start..start + 2 * p])
        })
        .unzip();
    InterfaceFluxes { flux, entropy_flux }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeQuadrature {
    ForwardEuler,
    Ssprk22,
    Ssprk33,
}

impl TimeQuadrature {
    /// Weights of the stage fluxes in the effective one-step flux.
    pub fn weights(self) -> &'static [f64] {
        match self {
            TimeQuadrature::ForwardEuler => &[1.0],
            TimeQuadrature::Ssprk22 => &[0.5, 0.5],
            TimeQuadrature::Ssprk33 => &[1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        }
    }

    pub fn stages(self) -> usize {
        self.weights().len()
    }

    /// Butcher coefficients: stage `i` is `u + λ·D(Σ_j a_ij F_j)`.
    fn stage_coefficients(self, stage: usize) -> &'static [f64] {
        match (self, stage) {
            (_, 0) => &[],
            (TimeQuadrature::Ssprk22, 1) | (TimeQuadrature::Ssprk33, 1) => &[1.0],
            (TimeQuadrature::Ssprk33, 2) => &[0.25, 0.25],
            _ => unreachable!("stage {stage} out of range for {self:?}"),
        }
    }
}

/// Drives the stages of an SSP Runge-Kutta step and returns the weighted
/// interface fluxes whose single forward-Euler application reproduces the
/// full Runge-Kutta update. `stage_fluxes` receives the stage index and the
/// stage state and returns `n + 1` interface fluxes.
pub(crate) fn ssp_flux_quadrature<F>(
    scheme: TimeQuadrature,
    states: &[ConservedState],
    lambda: f64,
    gas: &GasModel,
    time: f64,
    mut stage_fluxes: F,
) -> Result<InterfaceFluxes>
where
    F: FnMut(usize, &[ConservedState]) -> Result<InterfaceFluxes>,
{
    let n = states.len();
    let weights = scheme.weights();
    let mut stage_results: Vec<InterfaceFluxes> = Vec::with_capacity(weights.len());
    let mut total = InterfaceFluxes::zeros(n + 1);
    for (stage, &weight) in weights.iter().enumerate() {
        let fluxes = if stage == 0 {
            stage_fluxes(0, states)?
        } else {
            let mut combined = vec![FluxValue::ZERO; n + 1];
            for (a, prev) in scheme.stage_coefficients(stage).iter().zip(&stage_results) {
                for (c, f) in combined.iter_mut().zip(&prev.flux) {
                    *c += *f * *a;
                }
            }
            let stage_states = crate::mesh::apply_fluxes(states, &combined, lambda);
            if let Some(cell) = stage_states.iter().position(|u| !gas.is_admissible(u)) {
                return Err(Error::Positivity { cell, time });
            }
            stage_fluxes(stage, &stage_states)?
        };
        if fluxes.flux.len() != n + 1 || fluxes.entropy_flux.len() != n + 1 {
            return Err(Error::Argument("stage flux callback returned wrong length".into()));
        }
        total.accumulate(weight, &fluxes);
        stage_results.push(fluxes);
    }
    Ok(total)
}

/// Effective interface fluxes (and entropy fluxes) of one SSP-RK step of
/// the semidiscrete scheme built on `kind`, expressed as a time quadrature
/// of the interface flux.
pub fn rk_quadrature_flux(
    kind: FluxKind,
    scheme: TimeQuadrature,
    field: &FieldSnapshot,
    bc: BoundaryKind,
    dt: f64,
    gas: &GasModel,
) -> Result<InterfaceFluxes> {
    let lambda = dt / field.grid.dx();
    ssp_flux_quadrature(scheme, &field.states, lambda, gas, field.time, |_, s| {
        interface_fluxes(kind, s, bc, gas, field.time)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::Primitive;
    use approx::assert_relative_eq;

    fn air() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn ln_mean_branches_agree() {
        for (a, b) in [(1.0, 1.0 + 1e-9), (2.0, 2.02), (1.0, 3.0), (0.5, 0.5)] {
            let exact: f64 = if a == b { a } else { (b - a) / (b / a).ln() };
            assert_relative_eq!(ln_mean(a, b), exact, max_relative = 1e-12);
        }
        assert_eq!(ln_mean(2.0, 2.0), 2.0);
    }

    #[test]
    fn consistency_of_two_point_fluxes() {
        let gas = air();
        let u = gas.to_conserved(&Primitive::new(1.3, -0.4, 2.2));
        let f = gas.physical_flux(&u).unwrap();
        for kind in [FluxKind::Llf, FluxKind::Ec2] {
            let h = kind.flux(&gas, &[u, u]).unwrap();
            assert!((h - f).max_abs() < 1e-14, "{kind:?}");
        }
        let h = ec_flux4(&gas, &[u; 4]).unwrap();
        assert!((h - f).max_abs() < 1e-14);
    }

    #[test]
    fn llf_sod_states() {
        let gas = air();
        let l = ConservedState::new(1.0, 0.0, 2.5);
        let r = ConservedState::new(0.125, 0.0, 0.25);
        let c = 1.4f64.sqrt().max((1.4 * 0.1 / 0.125f64).sqrt());
        let g = llf_flux(&gas, &l, &r).unwrap();
        assert_relative_eq!(g.mass, -0.5 * c * (0.125 - 1.0), epsilon = 1e-14);
        assert_relative_eq!(g.momentum, 0.5 * (1.0 + 0.1), epsilon = 1e-14);
        assert_relative_eq!(g.energy, -0.5 * c * (0.25 - 2.5), epsilon = 1e-14);

        // Swapping flips only the dissipation term.
        let swapped = llf_flux(&gas, &r, &l).unwrap();
        let central = (gas.physical_flux(&l).unwrap() + gas.physical_flux(&r).unwrap()) * 0.5;
        assert!(((g - central) + (swapped - central)).max_abs() < 1e-14);
    }

    #[test]
    fn gt_blend() {
        let g = FluxValue::new(0.0, 1.0, 0.0);
        let h = FluxValue::new(2.0, 1.0, 2.0);
        assert_eq!(gt_flux(1.0, g, h).unwrap(), g);
        assert_eq!(gt_flux(0.0, g, h).unwrap(), h);
        assert_eq!(gt_flux(0.5, g, h).unwrap(), FluxValue::new(1.0, 1.0, 1.0));
        assert!(gt_flux(1.5, g, h).is_err());
        assert!(gt_flux(-0.1, g, h).is_err());
    }

    #[test]
    fn entropy_flux_consistency() {
        let gas = air();
        let u = gas.to_conserved(&Primitive::new(0.9, 0.6, 1.7));
        let f = gas.entropy_pair(&u).unwrap().flux;
        for kind in [FluxKind::Llf, FluxKind::Ec2, FluxKind::Ec4] {
            let stencil = vec![u; 2 * kind.half_width()];
            assert_relative_eq!(numerical_entropy_flux(kind, &stencil, &gas).unwrap(), f, epsilon = 1e-13);
        }
        // Equal entropies: the LLF dissipation term vanishes.
        let a = gas.to_conserved(&Primitive::new(1.0, 0.5, 1.0));
        let b = gas.to_conserved(&Primitive::new(1.0, -0.5, 1.0));
        let fa = gas.entropy_pair(&a).unwrap().flux;
        let fb = gas.entropy_pair(&b).unwrap().flux;
        assert_relative_eq!(
            numerical_entropy_flux(FluxKind::Llf, &[a, b], &gas).unwrap(),
            0.5 * (fa + fb),
            epsilon = 1e-14
        );
    }

    #[test]
    fn stencil_length_is_checked() {
        let gas = air();
        let u = ConservedState::new(1.0, 0.0, 2.5);
        assert!(FluxKind::Ec4.flux(&gas, &[u, u]).is_err());
        assert!(numerical_entropy_flux(FluxKind::Llf, &[u, u, u], &gas).is_err());
    }

    #[test]
    fn ec4_is_linear_in_two_point_fluxes() {
        let gas = air();
        let w = [
            gas.to_conserved(&Primitive::new(1.0, 0.1, 1.0)),
            gas.to_conserved(&Primitive::new(1.2, 0.3, 1.1)),
            gas.to_conserved(&Primitive::new(0.8, 0.2, 0.9)),
            gas.to_conserved(&Primitive::new(1.1, -0.1, 1.3)),
        ];
        let expected = ec_flux2(&gas, &w[1], &w[2]).unwrap() * (4.0 / 3.0)
            - (ec_flux2(&gas, &w[0], &w[2]).unwrap() + ec_flux2(&gas, &w[1], &w[3]).unwrap()) * (1.0 / 6.0);
        assert!((ec_flux4(&gas, &w).unwrap() - expected).max_abs() < 1e-15);
    }

    #[test]
    fn quadrature_of_constant_field_is_physical_flux() {
        let gas = air();
        let u = gas.to_conserved(&Primitive::new(1.0, 0.7, 1.0));
        let grid = crate::mesh::Grid1D::new(8, 0.0, 1.0).unwrap();
        let field = FieldSnapshot::new(grid, 0.0, vec![u; 8]).unwrap();
        let f = gas.physical_flux(&u).unwrap();
        for kind in [FluxKind::Llf, FluxKind::Ec2, FluxKind::Ec4] {
            for q in [TimeQuadrature::ForwardEuler, TimeQuadrature::Ssprk22, TimeQuadrature::Ssprk33] {
                for bc in [BoundaryKind::Periodic, BoundaryKind::Extrapolation] {
                    let out = rk_quadrature_flux(kind, q, &field, bc, 0.01, &gas).unwrap();
                    assert_eq!(out.flux.len(), 9);
                    for v in &out.flux {
                        assert!((*v - f).max_abs() < 1e-13, "{kind:?} {q:?}");
                    }
                }
            }
        }
    }
}
