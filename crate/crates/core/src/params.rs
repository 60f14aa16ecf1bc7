//! Physical parameters of the Mexican-hat potential and their reduction to the
//! single dimensionless coupling `lambda = -beta phi0^2 ell^2 / pi^2`.

use crate::error::{Error, Result};
use crate::num::Real;

/// Physical parameters in natural units (`c = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    /// Nonlinearity strength, any sign.
    pub beta: T,
    /// Location of the potential minimum.
    pub phi0: T,
    /// Length of the spatial domain.
    pub ell: T,
}

/// The only free parameter of the reduced theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams<T> {
    pub lambda: T,
    pub sign_lambda: i8,
}

impl<T: Real> DimensionlessParams<T> {
    pub fn new(lambda: T) -> Self {
        let sign_lambda = if lambda > T::zero() {
            1
        } else if lambda < T::zero() {
            -1
        } else {
            0
        };
        Self {
            lambda,
            sign_lambda,
        }
    }

    /// `sgn(lambda)` as a scalar.
    pub fn sign(&self) -> T {
        T::from_i8(self.sign_lambda).unwrap()
    }
}

impl<T: Real> PhysicalParams<T> {
    pub fn new(beta: T, phi0: T, ell: T) -> Self {
        Self { beta, phi0, ell }
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.phi0.is_finite() && self.ell.is_finite()) {
            return Err(Error::Domain("physical parameters must be finite".into()));
        }
        if self.ell <= T::zero() {
            return Err(Error::Domain(format!(
                "ell must be positive, got {}",
                self.ell
            )));
        }
        if self.beta == T::zero() {
            return Err(Error::Domain(
                "beta = 0 has no amplitude scale; pass lambda directly".into(),
            ));
        }
        if self.phi0 < T::zero() {
            return Err(Error::Domain(format!(
                "phi0 must be non-negative, got {}",
                self.phi0
            )));
        }
        Ok(())
    }

    /// Reconstruct the physical `beta` reproducing `lambda` for given `phi0` and `ell`.
    pub fn beta_from_lambda(lambda: T, phi0: T, ell: T) -> Result<T> {
        if ell <= T::zero() || phi0 == T::zero() {
            return Err(Error::Domain(
                "beta is undetermined unless phi0 != 0 and ell > 0".into(),
            ));
        }
        Ok(-lambda * T::PI() * T::PI() / (phi0 * phi0 * ell * ell))
    }
}

/// `lambda = -beta phi0^2 ell^2 / pi^2`.
pub fn nondimensionalize<T: Real>(p: &PhysicalParams<T>) -> Result<DimensionlessParams<T>> {
    p.validate()?;
    let lambda = -p.beta * p.phi0 * p.phi0 * p.ell * p.ell / (T::PI() * T::PI());
    // -0.0 would otherwise leak into printed output
    let lambda = if lambda == T::zero() {
        T::zero()
    } else {
        lambda
    };
    Ok(DimensionlessParams::new(lambda))
}

/// Field amplitude scale `a = pi / sqrt(ell |beta|)`, so that `B_n = a A_n`.
pub fn scale_amplitude<T: Real>(p: &PhysicalParams<T>) -> Result<T> {
    p.validate()?;
    Ok(T::PI() / (p.ell * p.beta.abs()).sqrt())
}
