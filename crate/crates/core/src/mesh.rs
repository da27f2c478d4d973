//! Uniform grids, cell-mean fields, boundary treatment, CFL control and the
//! conservative update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{ConservedState, FluxValue, GasModel, Primitive};

/// Default CFL factor `λ·c_max`; strictly below the half-cell limit of 0.5.
pub const DEFAULT_CFL: f64 = 0.45;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub n_cells: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Grid1D {
    pub fn new(n_cells: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Argument("grid needs at least one cell".into()));
        }
        if !(x_max > x_min) {
            return Err(Error::Argument(format!("empty domain [{x_min}, {x_max}]")));
        }
        Ok(Self { n_cells, x_min, x_max })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn center(&self, k: usize) -> f64 {
        self.x_min + (k as f64 + 0.5) * self.dx()
    }

    /// Position of interface `j`, the left face of cell `j` (`0..=n_cells`).
    pub fn interface(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Periodic,
    /// Zeroth-order extrapolation: ghost cells copy the boundary cell.
    Extrapolation,
}

/// All cell means on a grid at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub grid: Grid1D,
    pub time: f64,
    pub states: Vec<ConservedState>,
}

// Five-point Gauss-Legendre rule on [-1/2, 1/2].
const GAUSS_NODES: [f64; 5] = [
    -0.453_089_922_969_332_1,
    -0.269_234_655_052_841_4,
    0.0,
    0.269_234_655_052_841_4,
    0.453_089_922_969_332_1,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_5,
    0.239_314_335_249_683_2,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_2,
    0.118_463_442_528_094_5,
];

impl FieldSnapshot {
    pub fn new(grid: Grid1D, time: f64, states: Vec<ConservedState>) -> Result<Self> {
        if states.len() != grid.n_cells {
            return Err(Error::Argument(format!(
                "{} states for a grid of {} cells",
                states.len(),
                grid.n_cells
            )));
        }
        Ok(Self { grid, time, states })
    }

    /// Cell means of the conserved variables of a primitive profile,
    /// integrated with a five-point Gauss rule per cell.
    pub fn from_primitive_profile<F>(grid: Grid1D, gas: &GasModel, profile: F) -> Result<Self>
    where
        F: Fn(f64) -> Primitive,
    {
        let dx = grid.dx();
        let states = (0..grid.n_cells)
            .map(|k| {
                let xc = grid.center(k);
                GAUSS_NODES
                    .iter()
                    .zip(GAUSS_WEIGHTS)
                    .fold(ConservedState::ZERO, |acc, (&s, w)| {
                        acc + gas.to_conserved(&profile(xc + s * dx)) * w
                    })
            })
            .collect();
        let field = Self { grid, time: 0.0, states };
        field.check_admissible(gas)?;
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn check_admissible(&self, gas: &GasModel) -> Result<()> {
        match self.states.iter().position(|u| !gas.is_admissible(u)) {
            Some(cell) => Err(Error::Positivity { cell, time: self.time }),
            None => Ok(()),
        }
    }

    /// Totals `Σ u_k Δx` of mass, momentum and energy.
    pub fn totals(&self) -> ConservedState {
        let dx = self.grid.dx();
        self.states.iter().fold(ConservedState::ZERO, |acc, u| acc + *u * dx)
    }

    pub fn primitives(&self, gas: &GasModel) -> Result<Vec<Primitive>> {
        self.states.iter().map(|u| gas.to_primitive(u)).collect()
    }
}

/// Copies `states` into a vector with `ghosts` extra cells on each side.
pub fn pad(states: &[ConservedState], bc: BoundaryKind, ghosts: usize) -> Vec<ConservedState> {
    let n = states.len();
    let mut out = Vec::with_capacity(n + 2 * ghosts);
    for g in 0..ghosts {
        let offset = ghosts - g;
        out.push(match bc {
            BoundaryKind::Periodic => states[(n - offset % n) % n],
            BoundaryKind::Extrapolation => states[0],
        });
    }
    out.extend_from_slice(states);
    for g in 0..ghosts {
        out.push(match bc {
            BoundaryKind::Periodic => states[g % n],
            BoundaryKind::Extrapolation => states[n - 1],
        });
    }
    out
}

/// `Δt = cfl · Δx / max_k (|v_k| + c_k)`.
pub fn compute_dt(field: &FieldSnapshot, gas: &GasModel, cfl_factor: f64) -> Result<f64> {
    if field.is_empty() {
        return Err(Error::Argument("cannot compute a time step for an empty field".into()));
    }
    if !(cfl_factor > 0.0 && cfl_factor < 0.5) {
        return Err(Error::Argument(format!("CFL factor {cfl_factor} outside (0, 0.5)")));
    }
    let mut c_max: f64 = 0.0;
    for (cell, u) in field.states.iter().enumerate() {
        let c = gas
            .max_wave_speed(u)
            .map_err(|_| Error::Positivity { cell, time: field.time })?;
        c_max = c_max.max(c);
    }
    Ok(cfl_factor * field.grid.dx() / c_max)
}

/// `u_k + λ(F_k − F_{k+1})` for every cell, without admissibility checks.
pub(crate) fn apply_fluxes(
    states: &[ConservedState],
    fluxes: &[FluxValue],
    lambda: f64,
) -> Vec<ConservedState> {
    states
        .iter()
        .enumerate()
        .map(|(k, u)| u.add_flux(lambda, fluxes[k] - fluxes[k + 1]))
        .collect()
}

/// One conservative update with `n_cells + 1` interface fluxes, interface
/// `k` being the left face of cell `k`.
pub fn conservative_step(
    field: &FieldSnapshot,
    interface_fluxes: &[FluxValue],
    dt: f64,
    gas: &GasModel,
) -> Result<FieldSnapshot> {
    if interface_fluxes.len() != field.len() + 1 {
        return Err(Error::Argument(format!(
            "{} interface fluxes for {} cells",
            interface_fluxes.len(),
            field.len()
        )));
    }
    let lambda = dt / field.grid.dx();
    let states = apply_fluxes(&field.states, interface_fluxes, lambda);
    let next = FieldSnapshot { grid: field.grid, time: field.time + dt, states };
    next.check_admissible(gas)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform(n: usize, u: ConservedState) -> FieldSnapshot {
        FieldSnapshot::new(Grid1D::new(n, 0.0, 1.0).unwrap(), 0.0, vec![u; n]).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(10, 0.0, 1.0).unwrap();
        assert_relative_eq!(g.dx(), 0.1);
        assert_relative_eq!(g.center(0), 0.05);
        assert_relative_eq!(g.interface(10), 1.0);
        assert!(Grid1D::new(0, 0.0, 1.0).is_err());
        assert!(Grid1D::new(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn padding() {
        let s: Vec<_> = (0..4).map(|i| ConservedState::new(i as f64 + 1.0, 0.0, 1.0)).collect();
        let p = pad(&s, BoundaryKind::Periodic, 2);
        let rho: Vec<f64> = p.iter().map(|u| u.rho).collect();
        assert_eq!(rho, vec![3.0, 4.0, 1.0, 2.0, 3.0, 4.0, 1.0, 2.0]);
        let p = pad(&s, BoundaryKind::Extrapolation, 2);
        let rho: Vec<f64> = p.iter().map(|u| u.rho).collect();
        assert_eq!(rho, vec![1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 4.0, 4.0]);
        // More ghosts than cells still wraps correctly.
        let p = pad(&s[..2], BoundaryKind::Periodic, 3);
        let rho: Vec<f64> = p.iter().map(|u| u.rho).collect();
        assert_eq!(rho, vec![2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn dt_examples() {
        let gas = GasModel::default();
        // c = sqrt(1.4 p / rho) = 2 with rho = 1.4, p = 4 at rest.
        let u = gas.to_conserved(&Primitive::new(1.4, 0.0, 4.0));
        let mut f = uniform(10, u);
        f.grid = Grid1D::new(10, 0.0, 1.0).unwrap();
        assert_relative_eq!(compute_dt(&f, &gas, 0.4).unwrap(), 0.02, epsilon = 1e-15);

        // Quadrupling pressure doubles the sound speed and halves dt.
        let fast = uniform(10, gas.to_conserved(&Primitive::new(1.4, 0.0, 16.0)));
        assert_relative_eq!(compute_dt(&fast, &gas, 0.4).unwrap(), 0.01, epsilon = 1e-15);

        assert!(compute_dt(&f, &gas, 0.5).is_err());
        assert!(compute_dt(&f, &gas, 0.0).is_err());
        let empty = FieldSnapshot { grid: f.grid, time: 0.0, states: vec![] };
        assert!(matches!(compute_dt(&empty, &gas, 0.4), Err(Error::Argument(_))));
    }

    #[test]
    fn conservative_step_examples() {
        let gas = GasModel::default();
        let u = ConservedState::new(1.0, 0.0, 2.5);
        let field = uniform(4, u);
        let same = vec![FluxValue::new(0.3, 1.0, -0.2); 5];
        let next = conservative_step(&field, &same, 0.01, &gas).unwrap();
        assert_eq!(next.states, field.states);
        assert_relative_eq!(next.time, 0.01);

        let mut fluxes = vec![FluxValue::ZERO; 5];
        fluxes[2] = FluxValue::new(0.5, 0.0, 0.0);
        let next = conservative_step(&field, &fluxes, 0.1, &gas).unwrap();
        let lambda = 0.1 / 0.25;
        assert_relative_eq!(next.states[1].rho, 1.0 - 0.5 * lambda);
        assert_relative_eq!(next.states[2].rho, 1.0 + 0.5 * lambda);
        assert_eq!(next.states[0], u);
        assert_eq!(next.states[3], u);

        assert!(conservative_step(&field, &fluxes[..4], 0.1, &gas).is_err());

        let mut drain = vec![FluxValue::ZERO; 5];
        drain[4] = FluxValue::new(10.0, 0.0, 0.0);
        assert!(matches!(
            conservative_step(&field, &drain, 0.1, &gas),
            Err(Error::Positivity { cell: 3, .. })
        ));
    }

    #[test]
    fn cell_averages_of_linear_profile() {
        let gas = GasModel::default();
        let grid = Grid1D::new(8, 0.0, 2.0).unwrap();
        let f = FieldSnapshot::from_primitive_profile(grid, &gas, |x| Primitive::new(1.0 + x, 0.0, 1.0))
            .unwrap();
        for (k, u) in f.states.iter().enumerate() {
            assert_relative_eq!(u.rho, 1.0 + grid.center(k), epsilon = 1e-14);
        }
    }
}
