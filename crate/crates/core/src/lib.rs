//! Mollified Moebius sums, Dirichlet character closed forms and the
//! fractional-part distance integral.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom fix the scalar to `f64`.

pub mod arith;
pub mod characters;
pub mod criterion;
pub mod error;
pub mod scalar;
pub mod series;
pub mod special;

pub use arith::{
    build_tables, build_tables_capped, convergents, divisors, frac, sawtooth, sawtooth2,
    totient, ArithTables, ConvergentList, RationalPoint, MAX_SIEVE_LIMIT,
};
pub use characters::{
    character_group, gauss_sum, induced_primitive, lemma2_sum, CharacterGroup,
    DirichletCharacter, Parity,
};
pub use criterion::{
    criterion_report, lhs_quadrature, mollifier_coeffs, pair_kernel, rhs_piecewise,
    rhs_piecewise_with, rhs_via_pairs, weighted_mertens, zeta_critical, CriterionConfig,
    CriterionReport, CriterionRow, LhsValue, MollifierCoeffs, PiecewiseIntegral,
    PiecewiseOptions, TailedValue,
};
pub use error::{Error, Result};
pub use scalar::{CompensatedSum, Real, EULER_GAMMA};
pub use series::{
    boundedness_monitor, convergence_scan, jump_probe, s_exponential, tsum_partial,
    u_partial, v_partial, vstar_partial, w_partial, Alpha, JumpReport, MonitorReport,
    SeriesKind, SeriesScan,
};
pub use special::{
    hurwitz_zeta_zero, l_at_one, l_at_zero, log_deriv_l_at_one, log_gamma, prime_power_tail,
    prop2_target, prop3_target, prop4_target, ClosedFormTarget,
};

pub type Tables = ArithTables<f64>;
pub type Character = DirichletCharacter<f64>;
pub type Group = CharacterGroup<f64>;
pub type Point = Alpha<f64>;
pub type Scan = SeriesScan<f64>;
pub type Coeffs = MollifierCoeffs<f64>;
pub type Piecewise = PiecewiseIntegral<f64>;
