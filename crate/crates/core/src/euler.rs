//! Ideal-gas Euler equations in one space dimension.
//!
//! Conserved variables are `u = (ρ, ρv, E)` with pressure
//! `p = (γ-1)(E - ρv²/2)`. The entropy pair used throughout the crate is
//! `U = -ρS`, `F = -ρvS` with the specific entropy `S = ln(p ρ^-γ)`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Density and pressure at or below this value are treated as inadmissible.
pub const ADMISSIBILITY_FLOOR: f64 = 1e-12;

macro_rules! triple_ops {
    ($name:ident, $a:ident, $b:ident, $c:ident) => {
        impl $name {
            pub const ZERO: Self = Self { $a: 0.0, $b: 0.0, $c: 0.0 };

            pub const fn new($a: f64, $b: f64, $c: f64) -> Self {
                Self { $a, $b, $c }
            }

            pub fn to_array(self) -> [f64; 3] {
                [self.$a, self.$b, self.$c]
            }

            pub fn from_array(a: [f64; 3]) -> Self {
                Self { $a: a[0], $b: a[1], $c: a[2] }
            }

            pub fn dot(self, other: [f64; 3]) -> f64 {
                self.$a * other[0] + self.$b * other[1] + self.$c * other[2]
            }

            pub fn max_abs(self) -> f64 {
                self.$a.abs().max(self.$b.abs()).max(self.$c.abs())
            }

            pub fn is_finite(self) -> bool {
                self.$a.is_finite() && self.$b.is_finite() && self.$c.is_finite()
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                Self { $a: self.$a + o.$a, $b: self.$b + o.$b, $c: self.$c + o.$c }
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, o: Self) {
                self.$a += o.$a;
                self.$b += o.$b;
                self.$c += o.$c;
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                Self { $a: self.$a - o.$a, $b: self.$b - o.$b, $c: self.$c - o.$c }
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self { $a: -self.$a, $b: -self.$b, $c: -self.$c }
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, s: f64) -> Self {
                Self { $a: self.$a * s, $b: self.$b * s, $c: self.$c * s }
            }
        }

        impl Mul<$name> for f64 {
            type Output = $name;
            fn mul(self, v: $name) -> $name {
                v * self
            }
        }
    };
}

/// Cell mean of the conserved variables `(ρ, ρv, E)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

triple_ops!(ConservedState, rho, mom, energy);

/// Numerical or physical flux through an interface (mass, momentum, energy).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FluxValue {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

triple_ops!(FluxValue, mass, momentum, energy);

impl ConservedState {
    /// `self + scale * flux`, the building block of every explicit update.
    pub fn add_flux(self, scale: f64, flux: FluxValue) -> Self {
        Self {
            rho: self.rho + scale * flux.mass,
            mom: self.mom + scale * flux.momentum,
            energy: self.energy + scale * flux.energy,
        }
    }
}

/// Primitive variables `(ρ, v, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

impl Primitive {
    pub const fn new(rho: f64, v: f64, p: f64) -> Self {
        Self { rho, v, p }
    }
}

/// Entropy density `U` and entropy flux `F` at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyPairValue {
    pub entropy: f64,
    pub flux: f64,
}

/// Polytropic ideal gas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasModel {
    gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Argument(format!("adiabatic exponent must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pressure(&self, u: &ConservedState) -> Result<f64> {
        if !(u.rho > ADMISSIBILITY_FLOOR) {
            return Err(Error::Domain(format!("density {} is not positive", u.rho)));
        }
        Ok(self.pressure_unchecked(u))
    }

    #[inline]
    pub(crate) fn pressure_unchecked(&self, u: &ConservedState) -> f64 {
        (self.gamma - 1.0) * (u.energy - 0.5 * u.mom * u.mom / u.rho)
    }

    /// Errors unless both density and pressure exceed [`ADMISSIBILITY_FLOOR`].
    pub fn check_admissible(&self, u: &ConservedState) -> Result<f64> {
        let p = self.pressure(u)?;
        if !(p > ADMISSIBILITY_FLOOR) {
            return Err(Error::Domain(format!("pressure {p} is not positive (rho = {})", u.rho)));
        }
        Ok(p)
    }

    pub fn is_admissible(&self, u: &ConservedState) -> bool {
        u.rho > ADMISSIBILITY_FLOOR && self.pressure_unchecked(u) > ADMISSIBILITY_FLOOR
    }

    pub fn physical_flux(&self, u: &ConservedState) -> Result<FluxValue> {
        let p = self.pressure(u)?;
        let v = u.mom / u.rho;
        Ok(FluxValue::new(u.mom, u.mom * v + p, v * (u.energy + p)))
    }

    /// `S = ln(p ρ^-γ)`, `U = -ρS`, `F = -ρvS`.
    pub fn entropy_pair(&self, u: &ConservedState) -> Result<EntropyPairValue> {
        let p = self.check_admissible(u)?;
        let s = p.ln() - self.gamma * u.rho.ln();
        Ok(EntropyPairValue { entropy: -u.rho * s, flux: -u.mom * s })
    }

    /// Entropy density alone.
    pub fn entropy(&self, u: &ConservedState) -> Result<f64> {
        Ok(self.entropy_pair(u)?.entropy)
    }

    /// Gradient of `U` with respect to the conserved variables.
    pub fn entropy_variables(&self, u: &ConservedState) -> Result<[f64; 3]> {
        let p = self.check_admissible(u)?;
        let g = self.gamma;
        let v = u.mom / u.rho;
        let s = p.ln() - g * u.rho.ln();
        let beta = (g - 1.0) * u.rho / p;
        Ok([g - s - 0.5 * beta * v * v, beta * v, -beta])
    }

    /// Entropy flux potential `ψ = wᵀf − F`; equals `(γ-1)ρv` for this pair.
    pub fn entropy_potential(&self, u: &ConservedState) -> Result<f64> {
        let w = self.entropy_variables(u)?;
        let f = self.physical_flux(u)?;
        let pair = self.entropy_pair(u)?;
        Ok(f.dot(w) - pair.flux)
    }

    pub fn sound_speed(&self, u: &ConservedState) -> Result<f64> {
        let p = self.check_admissible(u)?;
        Ok((self.gamma * p / u.rho).sqrt())
    }

    /// `|v| + c`.
    pub fn max_wave_speed(&self, u: &ConservedState) -> Result<f64> {
        let c = self.sound_speed(u)?;
        Ok((u.mom / u.rho).abs() + c)
    }

    pub fn to_conserved(&self, w: &Primitive) -> ConservedState {
        ConservedState::new(
            w.rho,
            w.rho * w.v,
            w.p / (self.gamma - 1.0) + 0.5 * w.rho * w.v * w.v,
        )
    }

    pub fn to_primitive(&self, u: &ConservedState) -> Result<Primitive> {
        let p = self.pressure(u)?;
        Ok(Primitive::new(u.rho, u.mom / u.rho, p))
    }
}
