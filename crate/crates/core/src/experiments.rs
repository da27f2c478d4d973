//! Benchmarks, error measurement and entropy-production diagnostics.

use std::f64::consts::PI;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::MusclSolver;
use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel, Primitive};
use crate::mesh::{BoundaryKind, FieldSnapshot, Grid1D};
use crate::scheme::{advance, RunConfig, Scheme, Trajectory};

pub const SHU_OSHER_EPS: f64 = 0.2;
pub const SMOOTH_EPS: f64 = 0.2;
pub const SMOOTH_VELOCITY: f64 = 2.0;
pub const SMOOTH_PRESSURE: f64 = 10.33333;
const SHOCK_DENSITY: f64 = 3.857153;

pub fn shu_osher_ic(x: f64) -> Primitive {
    if x < 1.0 {
        Primitive::new(SHOCK_DENSITY, 2.629, 10.333)
    } else {
        Primitive::new(1.0 + SHU_OSHER_EPS * (5.0 * x).sin(), 0.0, 1.0)
    }
}

pub fn smooth_transport_ic(x: f64) -> Primitive {
    Primitive::new(SHOCK_DENSITY + SMOOTH_EPS * (2.0 * x).sin(), SMOOTH_VELOCITY, SMOOTH_PRESSURE)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestCase {
    ShuOsher,
    SmoothTransport,
}

impl TestCase {
    pub fn domain(self) -> (f64, f64) {
        match self {
            TestCase::ShuOsher => (0.0, 10.0),
            TestCase::SmoothTransport => (0.0, PI),
        }
    }

    pub fn boundary(self) -> BoundaryKind {
        match self {
            TestCase::ShuOsher => BoundaryKind::Extrapolation,
            TestCase::SmoothTransport => BoundaryKind::Periodic,
        }
    }

    pub fn default_t_end(self) -> f64 {
        match self {
            TestCase::ShuOsher => 1.8,
            TestCase::SmoothTransport => 1.0,
        }
    }

    pub fn default_cells(self) -> usize {
        match self {
            TestCase::ShuOsher => 400,
            TestCase::SmoothTransport => 128,
        }
    }

    pub fn grid(self, n_cells: usize) -> Result<Grid1D> {
        let (a, b) = self.domain();
        Grid1D::new(n_cells, a, b)
    }

    /// Cell means of the initial data.
    pub fn initial_field(self, n_cells: usize, gas: &GasModel) -> Result<FieldSnapshot> {
        let grid = self.grid(n_cells)?;
        match self {
            TestCase::ShuOsher => FieldSnapshot::from_primitive_profile(grid, gas, shu_osher_ic),
            TestCase::SmoothTransport => smooth_transport_exact(grid, 0.0, gas),
        }
    }
}

impl FromStr for TestCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shu-osher" => Ok(TestCase::ShuOsher),
            "smooth-transport" | "smooth" => Ok(TestCase::SmoothTransport),
            _ => Err(Error::Argument(format!("unknown test case {s:?}"))),
        }
    }
}

/// Exact cell means of the transported density wave at time `t`.
pub fn smooth_transport_exact(grid: Grid1D, t: f64, gas: &GasModel) -> Result<FieldSnapshot> {
    let dx = grid.dx();
    let shift = SMOOTH_VELOCITY * t;
    let internal = SMOOTH_PRESSURE / (gas.gamma() - 1.0);
    let states = (0..grid.n_cells)
        .map(|k| {
            let a = grid.interface(k) - shift;
            let b = grid.interface(k + 1) - shift;
            let rho = SHOCK_DENSITY + SMOOTH_EPS * ((2.0 * a).cos() - (2.0 * b).cos()) / (2.0 * dx);
            ConservedState::new(rho, rho * SMOOTH_VELOCITY, internal + 0.5 * rho * SMOOTH_VELOCITY * SMOOTH_VELOCITY)
        })
        .collect();
    FieldSnapshot::new(grid, t, states)
}

/// Pairwise means of a field of even length.
pub fn downscale(values: &[f64]) -> Result<Vec<f64>> {
    if !values.len().is_multiple_of(2) {
        return Err(Error::Argument(format!("cannot halve {} values", values.len())));
    }
    Ok(values.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect())
}

/// Means over consecutive blocks of `ratio` values.
pub fn block_mean(values: &[f64], ratio: usize) -> Result<Vec<f64>> {
    if ratio == 0 || !values.len().is_multiple_of(ratio) {
        return Err(Error::Argument(format!("{} values are not divisible by {ratio}", values.len())));
    }
    Ok(values.chunks(ratio).map(|c| c.iter().sum::<f64>() / ratio as f64).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1Error {
    pub density: f64,
    pub momentum: f64,
    pub energy: f64,
}

impl L1Error {
    pub fn total(&self) -> f64 {
        self.density + self.momentum + self.energy
    }
}

fn component(states: &[ConservedState], i: usize) -> Vec<f64> {
    states.iter().map(|u| u.to_array()[i]).collect()
}

/// Componentwise `Δx Σ |u_k − ref_k|` after bringing the reference down
/// to the solution grid. Power-of-two ratios use repeated halving.
pub fn l1_error(solution: &FieldSnapshot, reference: &FieldSnapshot) -> Result<L1Error> {
    let n = solution.len();
    if n == 0 || !reference.len().is_multiple_of(n) {
        return Err(Error::Argument(format!("reference of {} cells does not refine {n}", reference.len())));
    }
    let ratio = reference.len() / n;
    let dx = solution.grid.dx();
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut r = component(&reference.states, i);
        if ratio.is_power_of_two() {
            while r.len() > n {
                r = downscale(&r)?;
            }
        } else {
            r = block_mean(&r, ratio)?;
        }
        *slot = dx * component(&solution.states, i).iter().zip(&r).map(|(a, b)| (a - b).abs()).sum::<f64>();
    }
    Ok(L1Error { density: out[0], momentum: out[1], energy: out[2] })
}

/// Orders between consecutive levels.
pub fn eoc(errors: &[f64], resolutions: &[usize]) -> Result<Vec<f64>> {
    if errors.len() != resolutions.len() || errors.len() < 2 {
        return Err(Error::Argument("need at least two matching levels".into()));
    }
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Argument("errors must be positive".into()));
    }
    Ok(errors
        .windows(2)
        .zip(resolutions.windows(2))
        .map(|(e, n)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect())
}

/// Least-squares slope of `−log e` against `log N`.
pub fn eoc_fit(errors: &[f64], resolutions: &[usize]) -> Result<f64> {
    eoc(errors, resolutions)?;
    let xs: Vec<f64> = resolutions.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub steps: usize,
    pub l1: L1Error,
    /// Density order against the previous row.
    pub eoc: Option<f64>,
}

/// Smooth-transport runs on each resolution, measured against the exact
/// cell means.
pub fn convergence_study(scheme: &Scheme, gas: &GasModel, levels: &[usize], t_end: f64, cfl: f64) -> Result<Vec<ConvergenceRow>> {
    let case = TestCase::SmoothTransport;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for &n in levels {
        let ic = case.initial_field(n, gas)?;
        let cfg = RunConfig { cfl, ..RunConfig::new(case.boundary(), t_end) };
        let traj = advance(scheme, gas, ic, &cfg)?;
        let exact = smooth_transport_exact(case.grid(n)?, t_end, gas)?;
        let l1 = l1_error(traj.final_field(), &exact)?;
        let eoc = match rows.last() {
            Some(prev) => Some(eoc(&[prev.l1.density, l1.density], &[prev.cells, n])?[0]),
            None => None,
        };
        rows.push(ConvergenceRow { cells: n, steps: traj.steps, l1, eoc });
    }
    Ok(rows)
}

/// Per-step, per-cell discrete entropy productions of a recorded run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductionReport {
    /// `values[n][k]` for step n and cell k.
    pub values: Vec<Vec<f64>>,
    /// max |U| over all recorded time levels.
    pub scale: f64,
}

impl ProductionReport {
    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn entries(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    /// Entries above `rel · scale`.
    pub fn count_above(&self, rel: f64) -> usize {
        let tol = rel * self.scale;
        self.values.iter().flatten().filter(|v| **v > tol).count()
    }

    pub fn fraction_above(&self, rel: f64) -> f64 {
        if self.entries() == 0 {
            0.0
        } else {
            self.count_above(rel) as f64 / self.entries() as f64
        }
    }
}

/// `[U(u^{n+1}) − U(u^n)]/Δt + [F_α(k+½) − F_α(k−½)]/Δx` with the blended
/// entropy fluxes the run applied. Needs a trajectory recorded with
/// `RunConfig::record`.
pub fn entropy_production_report(traj: &Trajectory, gas: &GasModel) -> Result<ProductionReport> {
    if traj.blends.len() + 1 != traj.snapshots.len() {
        return Err(Error::Argument("trajectory was not recorded step by step".into()));
    }
    let mut scale = 0.0f64;
    let entropies = traj
        .snapshots
        .iter()
        .map(|s| {
            s.states
                .iter()
                .map(|u| {
                    let e = gas.entropy(u)?;
                    scale = scale.max(e.abs());
                    Ok(e)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(traj.blends.len());
    for (n, blend) in traj.blends.iter().enumerate() {
        let dx = traj.snapshots[n].grid.dx();
        let flux = &blend.blended.entropy_flux;
        values.push(
            (0..entropies[n].len())
                .map(|k| (entropies[n + 1][k] - entropies[n][k]) / blend.dt + (flux[k + 1] - flux[k]) / dx)
                .collect(),
        );
    }
    Ok(ProductionReport { values, scale })
}

pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

pub fn density(field: &FieldSnapshot) -> Vec<f64> {
    component(&field.states, 0)
}

pub const SHU_OSHER_REFERENCE_CELLS: usize = 4000;

/// Fine-grid MUSCL solution of a test case.
pub fn muscl_reference(case: TestCase, n_cells: usize, t_end: f64, gas: &GasModel) -> Result<FieldSnapshot> {
    let mut solver = MusclSolver::new(case.initial_field(n_cells, gas)?, *gas, case.boundary());
    solver.advance_to(t_end, None)?;
    Ok(solver.field)
}

/// Runs a test case with `scheme`.
pub fn run_case(scheme: &Scheme, gas: &GasModel, case: TestCase, n_cells: usize, cfg: &RunConfig) -> Result<Trajectory> {
    advance(scheme, gas, case.initial_field(n_cells, gas)?, cfg)
}

/// Writes `x, rho, v, p, alpha` rows; α is taken at each cell's left face.
pub fn write_field_csv(field: &FieldSnapshot, alpha: &[f64], gas: &GasModel, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "rho", "v", "p", "alpha"])?;
    for (k, prim) in field.primitives(gas)?.iter().enumerate() {
        let a = alpha.get(k).copied().unwrap_or(f64::NAN);
        w.serialize((field.grid.center(k), prim.rho, prim.v, prim.p, a))?;
    }
    w.flush()?;
    Ok(())
}
