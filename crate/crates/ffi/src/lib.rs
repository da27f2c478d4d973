//! C ABI for the blendfv solver.
//!
//! Every function returns a [`BlendfvStatus`]; on failure the message is kept
//! per thread and can be read with [`blendfv_last_error`]. Solvers are opaque
//! handles created by [`blendfv_solver_new`] and released with
//! [`blendfv_solver_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use blendfv::data::alpha_target;
use blendfv::experiments::TestCase;
use blendfv::mesh::DEFAULT_CFL;
use blendfv::nn::{bundled_model, MlpModel};
use blendfv::{
    advance, BoundaryKind, ConservedState, Error, FieldSnapshot, FluxKind, FluxValue, GasModel, RunConfig, Scheme,
    SchemePreset,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlendfvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    Positivity = 4,
    Cfl = 5,
    Precondition = 6,
    StepBudget = 7,
    Io = 8,
    Format = 9,
    Panic = 10,
    Other = 11,
}

/// Two- or four-point numerical fluxes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlendfvFlux {
    Llf = 0,
    Ec2 = 1,
    Ec4 = 2,
}

/// Opaque solver state.
pub struct BlendfvSolver {
    gas: GasModel,
    scheme: Scheme,
    bc: BoundaryKind,
    cfl: f64,
    field: FieldSnapshot,
    alpha: Vec<f64>,
    steps: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BlendfvStatus {
    match e {
        Error::Argument(_) => BlendfvStatus::InvalidArgument,
        Error::Domain(_) => BlendfvStatus::Inadmissible,
        Error::Positivity { .. } => BlendfvStatus::Positivity,
        Error::Cfl(_) => BlendfvStatus::Cfl,
        Error::Precondition(_) => BlendfvStatus::Precondition,
        Error::StepBudget(_) => BlendfvStatus::StepBudget,
        Error::Io(_) => BlendfvStatus::Io,
        Error::Format(_) => BlendfvStatus::Format,
        _ => BlendfvStatus::Other,
    }
}

enum Failure {
    Null(&'static str),
    Solver(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BlendfvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlendfvStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BlendfvStatus::NullPointer
        }
        Ok(Err(Failure::Solver(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            BlendfvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::Argument(format!("{what} is not UTF-8")).into())
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn triple(p: *const f64, what: &'static str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn write_triple(out: *mut f64, v: FluxValue) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&v.to_array());
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn blendfv_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a solver for a benchmark.
///
/// `scheme` is one of delft, pplft, ddlft, palft, dafermos, llf; `testcase`
/// is shu-osher or smooth-transport. `weights` (JSON file) may be null, in
/// which case ddlft uses the bundled network. `cfl <= 0` selects the default.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_new(
    scheme: *const c_char,
    testcase: *const c_char,
    cells: usize,
    cfl: f64,
    weights: *const c_char,
    out: *mut *mut BlendfvSolver,
) -> BlendfvStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = std::ptr::null_mut();
        let preset: SchemePreset = str_arg(scheme, "scheme")?.parse()?;
        let case: TestCase = str_arg(testcase, "testcase")?.parse()?;
        let model = if weights.is_null() {
            (preset == SchemePreset::Ddlft).then(bundled_model).transpose()?
        } else {
            Some(MlpModel::load(Path::new(str_arg(weights, "weights")?))?)
        };
        let gas = GasModel::default();
        let solver = BlendfvSolver {
            scheme: Scheme::preset(preset, model.map(Arc::new))?,
            bc: case.boundary(),
            cfl: if cfl > 0.0 { cfl } else { DEFAULT_CFL },
            field: case.initial_field(cells, &gas)?,
            alpha: Vec::new(),
            steps: 0,
            gas,
        };
        *out = Box::into_raw(Box::new(solver));
        Ok(())
    })
}

/// Releases a solver. Null is ignored.
///
/// # Safety
/// `solver` must come from [`blendfv_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_free(solver: *mut BlendfvSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Advances the solution to `t_end` taking at most `max_steps` steps. On
/// failure the solver keeps its previous state.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_advance(solver: *mut BlendfvSolver, t_end: f64, max_steps: usize) -> BlendfvStatus {
    guard(|| {
        let s = mut_arg(solver, "solver")?;
        let cfg = RunConfig { cfl: s.cfl, max_steps, ..RunConfig::new(s.bc, t_end) };
        let traj = advance(&s.scheme, &s.gas, s.field.clone(), &cfg)?;
        s.steps += traj.steps;
        if traj.steps > 0 {
            s.alpha = traj.last_alpha.clone();
        }
        s.field = traj.final_field().clone();
        Ok(())
    })
}

/// Number of cells.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_cells(solver: *const BlendfvSolver, out: *mut usize) -> BlendfvStatus {
    guard(|| {
        *mut_arg(out, "out")? = ref_arg(solver, "solver")?.field.len();
        Ok(())
    })
}

/// Current time and number of steps taken so far.
///
/// # Safety
/// `solver` must be a live handle; `time` and `steps` may be null.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_time(solver: *const BlendfvSolver, time: *mut f64, steps: *mut usize) -> BlendfvStatus {
    guard(|| {
        let s = ref_arg(solver, "solver")?;
        if let Some(t) = time.as_mut() {
            *t = s.field.time;
        }
        if let Some(n) = steps.as_mut() {
            *n = s.steps;
        }
        Ok(())
    })
}

/// Copies cell centers and primitive variables into caller buffers of `len`
/// entries each; any buffer may be null.
///
/// # Safety
/// Non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_copy_primitive(
    solver: *const BlendfvSolver,
    x: *mut f64,
    rho: *mut f64,
    v: *mut f64,
    p: *mut f64,
    len: usize,
) -> BlendfvStatus {
    guard(|| {
        let s = ref_arg(solver, "solver")?;
        let n = s.field.len();
        if len != n {
            return Err(Error::Argument(format!("buffers hold {len} entries, the solver has {n} cells")).into());
        }
        for (k, u) in s.field.states.iter().enumerate() {
            let w = s.gas.to_primitive(u)?;
            for (buf, val) in [(x, s.field.grid.center(k)), (rho, w.rho), (v, w.v), (p, w.p)] {
                if !buf.is_null() {
                    *buf.add(k) = val;
                }
            }
        }
        Ok(())
    })
}

/// Copies the interface α of the last step (`cells + 1` entries). Before the
/// first step the buffer is filled with zeros.
///
/// # Safety
/// `alpha` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn blendfv_solver_copy_alpha(solver: *const BlendfvSolver, alpha: *mut f64, len: usize) -> BlendfvStatus {
    guard(|| {
        let s = ref_arg(solver, "solver")?;
        let n = s.field.len() + 1;
        if len != n {
            return Err(Error::Argument(format!("buffer holds {len} entries, expected {n}")).into());
        }
        if alpha.is_null() {
            return Err(Failure::Null("alpha"));
        }
        let out = std::slice::from_raw_parts_mut(alpha, n);
        if s.alpha.len() == n {
            out.copy_from_slice(&s.alpha);
        } else {
            out.fill(0.0);
        }
        Ok(())
    })
}

/// Numerical flux between conserved states. `stencil` holds `width` states
/// of three doubles (ρ, m, E): two for LLF and ec2, four for ec4, with the
/// interface in the middle. Writes three doubles to `out`.
///
/// # Safety
/// `stencil` must hold `3 * width` doubles and `out` three.
#[no_mangle]
pub unsafe extern "C" fn blendfv_flux(kind: BlendfvFlux, stencil: *const f64, width: usize, out: *mut f64) -> BlendfvStatus {
    guard(|| {
        let kind = match kind {
            BlendfvFlux::Llf => FluxKind::Llf,
            BlendfvFlux::Ec2 => FluxKind::Ec2,
            BlendfvFlux::Ec4 => FluxKind::Ec4,
        };
        if width != 2 * kind.half_width() {
            return Err(Error::Argument(format!("{kind:?} needs {} states, got {width}", 2 * kind.half_width())).into());
        }
        let states = (0..width)
            .map(|i| triple(stencil.wrapping_add(3 * i), "stencil").map(ConservedState::from_array))
            .collect::<Result<Vec<_>, _>>()?;
        write_triple(out, kind.flux(&GasModel::default(), &states)?)
    })
}

/// Projection target `α = 1 − clamp((h−g)·(f−g)/|h−g|², 0, 1)` for three
/// interface fluxes of three doubles each.
///
/// # Safety
/// `f`, `g`, `h` must hold three doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn blendfv_alpha_target(f: *const f64, g: *const f64, h: *const f64, out: *mut f64) -> BlendfvStatus {
    guard(|| {
        let [f, g, h] = [triple(f, "f")?, triple(g, "g")?, triple(h, "h")?].map(FluxValue::from_array);
        *mut_arg(out, "out")? = alpha_target(f, g, h);
        Ok(())
    })
}
