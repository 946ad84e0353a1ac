use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Sign convention for lossy material parameters.
///
/// Internally every formula assumes `exp(-i omega t)` time dependence, under which
/// a lossy permittivity or density has a non-negative imaginary part and a lossy
/// bulk or shear modulus a non-positive one. Values supplied in the opposite
/// convention are conjugated on the way in and out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossConvention {
    #[default]
    ExpMinusIOmegaT,
    ExpPlusIOmegaT,
}

impl LossConvention {
    /// Convert a value given in this convention to the internal one.
    pub fn to_internal(self, z: Complex64) -> Complex64 {
        match self {
            LossConvention::ExpMinusIOmegaT => z,
            LossConvention::ExpPlusIOmegaT => z.conj(),
        }
    }

    /// Convert an internal value back to this convention (the map is an involution).
    pub fn from_internal(self, z: Complex64) -> Complex64 {
        self.to_internal(z)
    }
}

/// Whether loss-sign checks are applied to material inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCheck {
    #[default]
    Enforce,
    Skip,
}

/// Tolerance below which an imaginary part counts as zero when checking signs.
pub(crate) const SIGN_SLACK: f64 = 1e-15;

pub(crate) fn check_passive(
    name: &str,
    z: Complex64,
    imag_nonneg: bool,
    check: SignCheck,
) -> crate::Result<()> {
    if check == SignCheck::Skip {
        return Ok(());
    }
    let slack = SIGN_SLACK * (1.0 + z.norm());
    let ok = if imag_nonneg { z.im >= -slack } else { z.im <= slack };
    if ok {
        Ok(())
    } else {
        Err(crate::Error::domain(format!(
            "{name} = {z} has an imaginary part of the wrong sign for a passive medium"
        )))
    }
}
