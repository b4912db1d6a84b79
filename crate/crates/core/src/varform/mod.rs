//! Limiting variational formulas: `Lambda`, its Legendre transform and the pressures built on them.

mod lambda;
mod legendre;
mod micro;
mod pressure;

pub use lambda::{
    annealed_lambda, lambda_gradient, lambda_value, log2cosh, AnnealedLambda, ConvexPotential,
    LambdaEvaluator, LambdaMethod, Mat3, DEFAULT_QUADRATURE_ORDER,
};
pub use legendre::{
    binary_entropy, legendre_transform, LegendreSolution, BOUNDARY_MARGIN, MAX_NEWTON_ITERATIONS,
    RESIDUAL_TOLERANCE,
};
pub use micro::{micro_audit, micro_gap, term_gap, MicroGap, MicroGapTerm};
pub use pressure::{
    annealed_pressure, deterministic_pressure, linear_pressure_finite_n, quadratic_inf_pressure,
    variational_pressure, variational_sup, DeterministicResult, DualityResult, OptimizationTrace,
    OptimizerOptions, RestartRecord, VariationalResult,
};

#[cfg(test)]
mod tests;
