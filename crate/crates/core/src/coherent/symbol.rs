use serde::{Deserialize, Serialize};

use crate::linalg::{norm3, Vec3};
use crate::spin_algebra::{Axis, ClassicalSymbol, PolynomialSymbol};

/// Continuous classical symbol quantized through coherent states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoherentSymbol {
    Polynomial { polynomial: PolynomialSymbol },
    /// `coeff |m|`
    Norm { coeff: f64 },
    /// `coeff |m_axis|`
    AbsComponent { axis: Axis, coeff: f64 },
}

impl CoherentSymbol {
    /// Bound on `sup_{|m| <= 1} |f(m)|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            CoherentSymbol::Polynomial { polynomial } => polynomial.abs_coeff_sum(),
            CoherentSymbol::Norm { coeff } | CoherentSymbol::AbsComponent { coeff, .. } => coeff.abs(),
        }
    }

    /// Degree for polynomial symbols, used to size quadratures.
    pub fn degree(&self) -> Option<u32> {
        match self {
            CoherentSymbol::Polynomial { polynomial } => Some(polynomial.degree()),
            _ => None,
        }
    }
}

impl ClassicalSymbol for CoherentSymbol {
    fn value(&self, m: Vec3) -> f64 {
        match self {
            CoherentSymbol::Polynomial { polynomial } => polynomial.eval(m),
            CoherentSymbol::Norm { coeff } => coeff * norm3(m),
            CoherentSymbol::AbsComponent { axis, coeff } => coeff * m[axis.index()].abs(),
        }
    }

    fn gradient(&self, m: Vec3) -> Option<Vec3> {
        match self {
            CoherentSymbol::Polynomial { polynomial } => polynomial.gradient(m),
            _ => None,
        }
    }

    fn hessian(&self, m: Vec3) -> Option<[[f64; 3]; 3]> {
        match self {
            CoherentSymbol::Polynomial { polynomial } => polynomial.hessian(m),
            _ => None,
        }
    }
}
