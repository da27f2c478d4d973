//! Blended schemes: a dissipative and an entropy-conservative quadrature
//! flux, a rule selecting α at every interface, and the time loop.

use std::str::FromStr;
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{FluxValue, GasModel};
use crate::flux::{interface_fluxes, rk_quadrature_flux, ssp_flux_quadrature, FluxKind, InterfaceFluxes, TimeQuadrature};
use crate::limiters::{
    alpha_field_condition_f, alpha_field_positivity, dafermos_predictor, dissipative_entropy_rates, DafermosParams,
};
use crate::mesh::{compute_dt, conservative_step, pad, BoundaryKind, FieldSnapshot, DEFAULT_CFL};
use crate::nn::{window_features, MlpModel, WINDOW_HALF};
use crate::pa::{PaLimiter, PaParams};

/// A numerical flux together with its time quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxChoice {
    pub kind: FluxKind,
    pub quadrature: TimeQuadrature,
}

impl FluxChoice {
    pub const fn new(kind: FluxKind, quadrature: TimeQuadrature) -> Self {
        Self { kind, quadrature }
    }
}

/// How α is chosen at each interface.
#[derive(Clone, Debug)]
pub enum AlphaStrategy {
    Constant(f64),
    /// Condition F on the half-cell entropy productions.
    ConditionF,
    /// Conditions ρ and P, recomputed at every Runge-Kutta stage.
    Positivity,
    Pa(PaLimiter),
    Network(Arc<MlpModel>),
    Dafermos(DafermosParams),
}

impl AlphaStrategy {
    /// Cells each side of an interface the rule looks at.
    fn reach(&self) -> usize {
        match self {
            AlphaStrategy::Constant(_) => 0,
            AlphaStrategy::ConditionF | AlphaStrategy::Positivity => 1,
            AlphaStrategy::Pa(l) => l.half_width(),
            AlphaStrategy::Network(_) => WINDOW_HALF,
            AlphaStrategy::Dafermos(p) => 1 + p.hat_width / 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemePreset {
    Delft,
    Pplft,
    Ddlft,
    Palft,
    Dafermos,
    /// First-order LLF with forward Euler.
    Llf,
}

impl SchemePreset {
    pub const ALL: [SchemePreset; 6] = [
        SchemePreset::Delft,
        SchemePreset::Pplft,
        SchemePreset::Ddlft,
        SchemePreset::Palft,
        SchemePreset::Dafermos,
        SchemePreset::Llf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemePreset::Delft => "delft",
            SchemePreset::Pplft => "pplft",
            SchemePreset::Ddlft => "ddlft",
            SchemePreset::Palft => "palft",
            SchemePreset::Dafermos => "dafermos",
            SchemePreset::Llf => "llf",
        }
    }
}

impl FromStr for SchemePreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchemePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Scheme {
    pub low: FluxChoice,
    pub high: FluxChoice,
    pub strategy: AlphaStrategy,
}

const LLF_FE: FluxChoice = FluxChoice::new(FluxKind::Llf, TimeQuadrature::ForwardEuler);
const LLF_SSP2: FluxChoice = FluxChoice::new(FluxKind::Llf, TimeQuadrature::Ssprk22);
const LLF_SSP3: FluxChoice = FluxChoice::new(FluxKind::Llf, TimeQuadrature::Ssprk33);
const EC2_SSP2: FluxChoice = FluxChoice::new(FluxKind::Ec2, TimeQuadrature::Ssprk22);
const EC4_SSP3: FluxChoice = FluxChoice::new(FluxKind::Ec4, TimeQuadrature::Ssprk33);

impl Scheme {
    /// Preset wiring. `weights` is required by the network-driven preset.
    pub fn preset(preset: SchemePreset, weights: Option<Arc<MlpModel>>) -> Result<Self> {
        Ok(match preset {
            SchemePreset::Delft => Self { low: LLF_FE, high: EC2_SSP2, strategy: AlphaStrategy::ConditionF },
            SchemePreset::Pplft => Self { low: LLF_SSP3, high: EC4_SSP3, strategy: AlphaStrategy::Positivity },
            SchemePreset::Ddlft => {
                let model = weights.ok_or_else(|| Error::Argument("ddlft needs network weights".into()))?;
                if model.dims().first() != Some(&(4 * 2 * WINDOW_HALF)) || model.dims().last() != Some(&1) {
                    return Err(Error::Argument(format!("network dims {:?} do not fit the input window", model.dims())));
                }
                Self { low: LLF_SSP2, high: EC4_SSP3, strategy: AlphaStrategy::Network(model) }
            }
            SchemePreset::Palft => {
                Self { low: LLF_SSP2, high: EC4_SSP3, strategy: AlphaStrategy::Pa(PaLimiter::new(PaParams::default())?) }
            }
            SchemePreset::Dafermos => {
                Self { low: LLF_SSP2, high: EC4_SSP3, strategy: AlphaStrategy::Dafermos(DafermosParams::default()) }
            }
            SchemePreset::Llf => Self { low: LLF_FE, high: LLF_FE, strategy: AlphaStrategy::Constant(1.0) },
        })
    }

    /// Fixed α with the given flux pair.
    pub fn constant(low: FluxChoice, high: FluxChoice, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Argument(format!("α = {alpha} outside [0, 1]")));
        }
        Ok(Self { low, high, strategy: AlphaStrategy::Constant(alpha) })
    }

    fn per_stage(&self) -> bool {
        matches!(self.strategy, AlphaStrategy::Positivity)
    }
}

/// Everything about the fluxes of one step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InterfaceBlend {
    pub time: f64,
    pub dt: f64,
    /// Effective α per interface (stage-weighted when α changes per stage).
    pub alpha: Vec<f64>,
    pub g: InterfaceFluxes,
    pub h: InterfaceFluxes,
    /// Blended fluxes and entropy fluxes actually applied.
    pub blended: InterfaceFluxes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub bc: BoundaryKind,
    pub cfl: f64,
    pub t_end: f64,
    pub max_steps: usize,
    /// Keep every snapshot and blend record.
    pub record: bool,
}

impl RunConfig {
    pub fn new(bc: BoundaryKind, t_end: f64) -> Self {
        Self { bc, cfl: DEFAULT_CFL, t_end, max_steps: 1_000_000, record: false }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// All time levels when recording, otherwise the initial and final one.
    pub snapshots: Vec<FieldSnapshot>,
    /// One record per step when recording.
    pub blends: Vec<InterfaceBlend>,
    /// α of the last step.
    pub last_alpha: Vec<f64>,
    pub steps: usize,
    pub min_density: f64,
    pub min_pressure: f64,
}

impl Trajectory {
    pub fn final_field(&self) -> &FieldSnapshot {
        self.snapshots.last().expect("trajectory holds the initial field")
    }
}

fn blend(alpha: &[f64], g: &InterfaceFluxes, h: &InterfaceFluxes) -> InterfaceFluxes {
    InterfaceFluxes {
        flux: alpha.iter().zip(&g.flux).zip(&h.flux).map(|((a, g), h)| *g * *a + *h * (1.0 - a)).collect(),
        entropy_flux: alpha
            .iter()
            .zip(&g.entropy_flux)
            .zip(&h.entropy_flux)
            .map(|((a, g), h)| a * g + (1.0 - a) * h)
            .collect(),
    }
}

/// α = 1 where the rule's window would reach past an extrapolated boundary.
fn force_boundary(alpha: &mut [f64], reach: usize, bc: BoundaryKind) {
    if bc == BoundaryKind::Periodic || reach == 0 {
        return;
    }
    let n = alpha.len() - 1;
    for (j, a) in alpha.iter_mut().enumerate() {
        if j < reach || j + reach > n {
            *a = 1.0;
        }
    }
}

fn network_alpha(gas: &GasModel, model: &MlpModel, field: &FieldSnapshot, bc: BoundaryKind) -> Result<Vec<f64>> {
    let n = field.len();
    let padded = pad(&field.states, bc, WINDOW_HALF);
    let mut inputs = Array2::zeros((n + 1, 4 * 2 * WINDOW_HALF));
    for j in 0..=n {
        let row = window_features(gas, &padded[j..j + 2 * WINDOW_HALF])
            .map_err(|_| Error::Positivity { cell: j.min(n - 1), time: field.time })?;
        inputs.row_mut(j).assign(&ndarray::ArrayView1::from(&row));
    }
    Ok(model.forward_batch(inputs.view())?.iter().map(|a| a.clamp(0.0, 1.0)).collect())
}

fn alpha_once(
    scheme: &Scheme,
    gas: &GasModel,
    field: &FieldSnapshot,
    bc: BoundaryKind,
    g: &InterfaceFluxes,
    h: &InterfaceFluxes,
    dt: f64,
) -> Result<Vec<f64>> {
    let n = field.len();
    let dx = field.grid.dx();
    match &scheme.strategy {
        AlphaStrategy::Constant(a) => Ok(vec![*a; n + 1]),
        AlphaStrategy::ConditionF => alpha_field_condition_f(gas, &field.states, bc, g, h, dt, dx),
        AlphaStrategy::Positivity => {
            alpha_field_positivity(gas, &field.states, bc, &g.flux, &h.flux, dt / dx)
        }
        AlphaStrategy::Pa(limiter) => limiter.alpha_field(&field.states, &field.grid, bc),
        AlphaStrategy::Network(model) => network_alpha(gas, model, field, bc),
        AlphaStrategy::Dafermos(params) => {
            let fe = interface_fluxes(FluxKind::Llf, &field.states, bc, gas, field.time)?;
            let rates = dissipative_entropy_rates(gas, &field.states, &fe, dt, dx)?;
            dafermos_predictor(&rates, *params, bc)
        }
    }
}

/// One step of `scheme` with time step `dt`.
pub fn step(
    scheme: &Scheme,
    gas: &GasModel,
    field: &FieldSnapshot,
    bc: BoundaryKind,
    dt: f64,
) -> Result<(FieldSnapshot, InterfaceBlend)> {
    let reach = scheme.strategy.reach();
    let (alpha, g, h, blended) = if scheme.per_stage() {
        if scheme.low.quadrature != scheme.high.quadrature {
            return Err(Error::Argument("stage-wise α needs one quadrature for both fluxes".into()));
        }
        let quadrature = scheme.low.quadrature;
        let weights = quadrature.weights();
        let n = field.len();
        let lambda = dt / field.grid.dx();
        let mut alpha = vec![0.0; n + 1];
        let mut g_acc = InterfaceFluxes::zeros(n + 1);
        let mut h_acc = InterfaceFluxes::zeros(n + 1);
        let blended = ssp_flux_quadrature(quadrature, &field.states, lambda, gas, field.time, |stage, states| {
            let g = interface_fluxes(scheme.low.kind, states, bc, gas, field.time)?;
            let h = interface_fluxes(scheme.high.kind, states, bc, gas, field.time)?;
            let stage_field = FieldSnapshot { grid: field.grid, time: field.time, states: states.to_vec() };
            let mut a = alpha_once(scheme, gas, &stage_field, bc, &g, &h, dt)?;
            force_boundary(&mut a, reach, bc);
            let w = weights[stage];
            for j in 0..=n {
                alpha[j] += w * a[j];
                g_acc.flux[j] += g.flux[j] * w;
                g_acc.entropy_flux[j] += w * g.entropy_flux[j];
                h_acc.flux[j] += h.flux[j] * w;
                h_acc.entropy_flux[j] += w * h.entropy_flux[j];
            }
            Ok(blend(&a, &g, &h))
        })?;
        (alpha, g_acc, h_acc, blended)
    } else {
        let g = rk_quadrature_flux(scheme.low.kind, scheme.low.quadrature, field, bc, dt, gas)?;
        let h = rk_quadrature_flux(scheme.high.kind, scheme.high.quadrature, field, bc, dt, gas)?;
        let mut alpha = alpha_once(scheme, gas, field, bc, &g, &h, dt)?;
        force_boundary(&mut alpha, reach, bc);
        let blended = blend(&alpha, &g, &h);
        (alpha, g, h, blended)
    };
    let next = conservative_step(field, &blended.flux, dt, gas)?;
    Ok((next, InterfaceBlend { time: field.time, dt, alpha, g, h, blended }))
}

fn extrema(gas: &GasModel, field: &FieldSnapshot) -> (f64, f64) {
    field.states.iter().fold((f64::INFINITY, f64::INFINITY), |(r, p), u| {
        (r.min(u.rho), p.min(gas.pressure_unchecked(u)))
    })
}

/// Runs `scheme` from `initial` to `cfg.t_end`, clipping the last step.
pub fn advance(scheme: &Scheme, gas: &GasModel, initial: FieldSnapshot, cfg: &RunConfig) -> Result<Trajectory> {
    if cfg.t_end < initial.time {
        return Err(Error::Argument(format!("t_end {} precedes the initial time {}", cfg.t_end, initial.time)));
    }
    initial.check_admissible(gas)?;
    let (mut min_density, mut min_pressure) = extrema(gas, &initial);
    let mut snapshots = vec![initial];
    let mut blends = Vec::new();
    let mut last_alpha = Vec::new();
    let mut steps = 0;
    let mut field = snapshots[0].clone();
    while field.time < cfg.t_end {
        if steps >= cfg.max_steps {
            return Err(Error::StepBudget(cfg.max_steps));
        }
        let mut dt = compute_dt(&field, gas, cfg.cfl)?;
        let last = field.time + dt >= cfg.t_end;
        if last {
            dt = cfg.t_end - field.time;
        }
        let (mut next, record) = step(scheme, gas, &field, cfg.bc, dt)?;
        if last {
            next.time = cfg.t_end;
        }
        let (r, p) = extrema(gas, &next);
        min_density = min_density.min(r);
        min_pressure = min_pressure.min(p);
        steps += 1;
        if cfg.record {
            snapshots.push(next.clone());
            blends.push(record);
        } else {
            last_alpha = record.alpha;
        }
        field = next;
    }
    if cfg.record {
        if let Some(b) = blends.last() {
            last_alpha = b.alpha.clone();
        }
    } else if steps > 0 {
        snapshots.push(field);
    }
    Ok(Trajectory { snapshots, blends, last_alpha, steps, min_density, min_pressure })
}

/// Applies a blended flux `α·g + (1−α)·h` to interface arrays.
pub fn blend_fluxes(alpha: &[f64], g: &[FluxValue], h: &[FluxValue]) -> Result<Vec<FluxValue>> {
    if alpha.len() != g.len() || g.len() != h.len() {
        return Err(Error::Argument("α, g and h differ in length".into()));
    }
    alpha.iter().zip(g).zip(h).map(|((a, g), h)| crate::flux::gt_flux(*a, *g, *h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{ConservedState, Primitive};
    use crate::mesh::Grid1D;

    fn smooth_field(n: usize) -> FieldSnapshot {
        let gas = GasModel::default();
        let grid = Grid1D::new(n, 0.0, std::f64::consts::PI).unwrap();
        FieldSnapshot::from_primitive_profile(grid, &gas, |x| Primitive::new(3.857153 + 0.2 * (2.0 * x).sin(), 2.0, 10.33333))
            .unwrap()
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("delft".parse::<SchemePreset>().unwrap(), SchemePreset::Delft);
        assert!("weno".parse::<SchemePreset>().is_err());
        assert!(Scheme::preset(SchemePreset::Ddlft, None).is_err());
    }

    #[test]
    fn zero_end_time_returns_initial_data() {
        let gas = GasModel::default();
        let f = smooth_field(16);
        let scheme = Scheme::preset(SchemePreset::Delft, None).unwrap();
        let traj = advance(&scheme, &gas, f.clone(), &RunConfig::new(BoundaryKind::Periodic, 0.0)).unwrap();
        assert_eq!(traj.steps, 0);
        assert_eq!(traj.final_field(), &f);
    }

    #[test]
    fn alpha_one_equals_llf_forward_euler() {
        let gas = GasModel::default();
        let f = smooth_field(32);
        let dt = compute_dt(&f, &gas, 0.45).unwrap();
        let all_low = Scheme::constant(LLF_FE, EC2_SSP2, 1.0).unwrap();
        let (a, _) = step(&all_low, &gas, &f, BoundaryKind::Periodic, dt).unwrap();
        let g = interface_fluxes(FluxKind::Llf, &f.states, BoundaryKind::Periodic, &gas, 0.0).unwrap();
        let b = conservative_step(&f, &g.flux, dt, &gas).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((*x - *y).max_abs() < 1e-14);
        }
    }

    #[test]
    fn pure_ec_step_matches_hand_assembly() {
        let gas = GasModel::default();
        let f = smooth_field(16);
        let dt = 1e-3;
        let scheme = Scheme::constant(LLF_FE, EC2_SSP2, 0.0).unwrap();
        let (a, _) = step(&scheme, &gas, &f, BoundaryKind::Periodic, dt).unwrap();
        // Direct two-stage integration of the semidiscrete EC scheme.
        let lambda = dt / f.grid.dx();
        let rhs = |s: &[ConservedState]| interface_fluxes(FluxKind::Ec2, s, BoundaryKind::Periodic, &gas, 0.0).unwrap().flux;
        let u1 = crate::mesh::apply_fluxes(&f.states, &rhs(&f.states), lambda);
        let u2 = crate::mesh::apply_fluxes(&u1, &rhs(&u1), lambda);
        for (k, x) in a.states.iter().enumerate() {
            let expect = (f.states[k] + u2[k]) * 0.5;
            assert!((*x - expect).max_abs() < 1e-13);
        }
    }

    #[test]
    fn last_step_is_clipped_and_mass_conserved() {
        let gas = GasModel::default();
        let f = smooth_field(32);
        let mass = f.totals();
        for preset in [SchemePreset::Delft, SchemePreset::Pplft, SchemePreset::Palft, SchemePreset::Dafermos] {
            let scheme = Scheme::preset(preset, None).unwrap();
            let traj = advance(&scheme, &gas, f.clone(), &RunConfig::new(BoundaryKind::Periodic, 0.0123)).unwrap();
            assert_eq!(traj.final_field().time, 0.0123);
            let drift = traj.final_field().totals() - mass;
            assert!(drift.max_abs() < 1e-12 * mass.max_abs(), "{preset:?}");
        }
    }

    #[test]
    fn step_budget() {
        let gas = GasModel::default();
        let scheme = Scheme::preset(SchemePreset::Llf, None).unwrap();
        let cfg = RunConfig { max_steps: 2, ..RunConfig::new(BoundaryKind::Periodic, 1.0) };
        assert!(matches!(advance(&scheme, &gas, smooth_field(16), &cfg), Err(Error::StepBudget(2))));
    }

    #[test]
    fn boundary_forcing() {
        let mut a = vec![0.0; 11];
        force_boundary(&mut a, 4, BoundaryKind::Extrapolation);
        assert_eq!(a, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        let mut b = vec![0.0; 5];
        force_boundary(&mut b, 4, BoundaryKind::Periodic);
        assert!(b.iter().all(|x| *x == 0.0));
    }
}
