//! Catalog of the supported scalar functions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionId {
    Exp,
    Inv,
    InvSqrt,
    Sqrt,
}

/// Which integral representation a function admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionClass {
    CauchyContour,
    Stieltjes,
    ZTimesStieltjes,
}

/// Where the spectrum of the argument must lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumConstraint {
    /// enclosed by a left-opening contour, typically the left half-plane
    LeftHalfPlane,
    /// away from the closed negative real axis
    PositiveRealAxis,
}

#[derive(Clone, Copy)]
pub struct ScalarFunction {
    pub id: FunctionId,
    pub f: fn(Complex64) -> Complex64,
    pub df: fn(Complex64) -> Complex64,
    pub d2f: fn(Complex64) -> Complex64,
    pub class: FunctionClass,
    pub constraint: SpectrumConstraint,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("id", &self.id)
            .field("class", &self.class)
            .field("constraint", &self.constraint)
            .finish()
    }
}

impl ScalarFunction {
    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    /// `f^{(k)}(z)` for any `k ≥ 0`.
    pub fn derivative(&self, k: usize, z: Complex64) -> Complex64 {
        match self.id {
            FunctionId::Exp => z.exp(),
            FunctionId::Inv => power_derivative(-1.0, k, z),
            FunctionId::InvSqrt => power_derivative(-0.5, k, z),
            FunctionId::Sqrt => power_derivative(0.5, k, z),
        }
    }
}

/// `d^k/dz^k z^a` on the principal branch.
fn power_derivative(a: f64, k: usize, z: Complex64) -> Complex64 {
    let coeff: f64 = (0..k).map(|j| a - j as f64).product();
    z.powf(a - k as f64) * coeff
}

impl FunctionId {
    pub const ALL: [FunctionId; 4] = [FunctionId::Exp, FunctionId::Inv, FunctionId::InvSqrt, FunctionId::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Exp => "exp",
            FunctionId::Inv => "inv",
            FunctionId::InvSqrt => "invsqrt",
            FunctionId::Sqrt => "sqrt",
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp" => Ok(FunctionId::Exp),
            "inv" => Ok(FunctionId::Inv),
            "invsqrt" => Ok(FunctionId::InvSqrt),
            "sqrt" => Ok(FunctionId::Sqrt),
            _ => Err(Error::UnknownFunction(s.to_string())),
        }
    }
}

fn exp(z: Complex64) -> Complex64 {
    z.exp()
}

fn inv(z: Complex64) -> Complex64 {
    z.inv()
}

fn inv_d1(z: Complex64) -> Complex64 {
    -(z * z).inv()
}

fn inv_d2(z: Complex64) -> Complex64 {
    (z * z * z).inv() * 2.0
}

fn invsqrt(z: Complex64) -> Complex64 {
    z.sqrt().inv()
}

fn invsqrt_d1(z: Complex64) -> Complex64 {
    power_derivative(-0.5, 1, z)
}

fn invsqrt_d2(z: Complex64) -> Complex64 {
    power_derivative(-0.5, 2, z)
}

fn sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

fn sqrt_d1(z: Complex64) -> Complex64 {
    power_derivative(0.5, 1, z)
}

fn sqrt_d2(z: Complex64) -> Complex64 {
    power_derivative(0.5, 2, z)
}

pub fn catalog_lookup(id: FunctionId) -> ScalarFunction {
    match id {
        FunctionId::Exp => ScalarFunction {
            id,
            f: exp,
            df: exp,
            d2f: exp,
            class: FunctionClass::CauchyContour,
            constraint: SpectrumConstraint::LeftHalfPlane,
        },
        FunctionId::Inv => ScalarFunction {
            id,
            f: inv,
            df: inv_d1,
            d2f: inv_d2,
            class: FunctionClass::Stieltjes,
            constraint: SpectrumConstraint::PositiveRealAxis,
        },
        FunctionId::InvSqrt => ScalarFunction {
            id,
            f: invsqrt,
            df: invsqrt_d1,
            d2f: invsqrt_d2,
            class: FunctionClass::Stieltjes,
            constraint: SpectrumConstraint::PositiveRealAxis,
        },
        FunctionId::Sqrt => ScalarFunction {
            id,
            f: sqrt,
            df: sqrt_d1,
            d2f: sqrt_d2,
            class: FunctionClass::ZTimesStieltjes,
            constraint: SpectrumConstraint::PositiveRealAxis,
        },
    }
}

/// Looks a function up by its textual identifier.
pub fn catalog_lookup_name(name: &str) -> Result<ScalarFunction> {
    name.parse().map(catalog_lookup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn inverse_values() {
        let f = catalog_lookup(FunctionId::Inv);
        assert_eq!((f.f)(c(2.0)), c(0.5));
        assert_eq!((f.df)(c(2.0)), c(-0.25));
        assert_eq!((f.d2f)(c(2.0)), c(0.25));
    }

    #[test]
    fn invsqrt_second_derivative() {
        let f = catalog_lookup(FunctionId::InvSqrt);
        assert!(((f.d2f)(c(4.0)) - c(0.0234375)).norm() < 1e-16);
    }

    #[test]
    fn classes() {
        assert_eq!(catalog_lookup(FunctionId::Exp).class, FunctionClass::CauchyContour);
        assert_eq!(catalog_lookup(FunctionId::Inv).class, FunctionClass::Stieltjes);
        assert_eq!(catalog_lookup(FunctionId::InvSqrt).class, FunctionClass::Stieltjes);
        assert_eq!(catalog_lookup(FunctionId::Sqrt).class, FunctionClass::ZTimesStieltjes);
    }

    #[test]
    fn names_round_trip() {
        for id in FunctionId::ALL {
            assert_eq!(id.name().parse::<FunctionId>().unwrap(), id);
        }
        assert!(matches!(catalog_lookup_name("log"), Err(Error::UnknownFunction(_))));
    }

    #[test]
    fn general_derivative_matches_named() {
        let z = Complex64::new(1.3, 0.4);
        for id in FunctionId::ALL {
            let f = catalog_lookup(id);
            assert!((f.derivative(0, z) - (f.f)(z)).norm() < 1e-14);
            assert!((f.derivative(1, z) - (f.df)(z)).norm() < 1e-14);
            assert!((f.derivative(2, z) - (f.d2f)(z)).norm() < 1e-14);
        }
        let inv = catalog_lookup(FunctionId::Inv);
        // d³/dz³ z⁻¹ = −6 z⁻⁴
        assert!((inv.derivative(3, c(2.0)) - c(-6.0 / 16.0)).norm() < 1e-15);
    }

    fn central(g: fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
        let h = 1e-5 * z.norm();
        (g(z + h) - g(z - h)) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(re in 0.2f64..10.0, im in -3.0f64..3.0) {
            let z = Complex64::new(re, im);
            for id in FunctionId::ALL {
                let f = catalog_lookup(id);
                let d1 = central(f.f, z);
                prop_assert!((d1 - (f.df)(z)).norm() <= 1e-6 * (f.df)(z).norm());
                let d2 = central(f.df, z);
                prop_assert!((d2 - (f.d2f)(z)).norm() <= 1e-6 * (f.d2f)(z).norm());
            }
        }

        #[test]
        fn stieltjes_sign_pattern(x in 1e-3f64..1e3) {
            for id in [FunctionId::Inv, FunctionId::InvSqrt] {
                let f = catalog_lookup(id);
                prop_assert!((f.df)(c(x)).re < 0.0);
                prop_assert!((f.d2f)(c(x)).re > 0.0);
            }
            let s = catalog_lookup(FunctionId::Sqrt);
            prop_assert!((s.df)(c(x)).re > 0.0);
            prop_assert!((s.df)(c(x * 1.01)).re < (s.df)(c(x)).re);
        }
    }
}
