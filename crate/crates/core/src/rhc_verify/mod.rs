//! Numerical checks of the analytic machinery behind the bounds:
//! semigroup operators and their reverse hypercontractive norm inequalities,
//! and exact entropy-gap computations on small relay codes.

pub mod brute_force;
pub mod ou;
pub mod quadrature;
pub mod semigroup;
pub mod suite;

pub use brute_force::{brute_force_entropy_gap, gaussian_quantizer_gap, RelayInstance};
pub use ou::{borell_critical_time, check_borell_exponential, ou_apply};
pub use quadrature::QuadratureRule;
pub use semigroup::{
    apply_semisimple, check_mossel, check_mossel_log, lp_norm, ProductFunction, ProductMeasure, SemiSimpleSemigroup,
};
pub use suite::{run_suite, SuiteConfig, SuiteKind, SuiteReport, TimeChoice, VerifyRecord};
