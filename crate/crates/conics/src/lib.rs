//! Exact counting of primitive integer points of bounded height on
//! nonsingular ternary conics.
//!
//! The crate follows the two-route design throughout: a direct
//! enumeration and a parametrization-based pipeline compute every count,
//! and the identity batteries check the lattice decompositions exactly.
//!
//! * [`quadform`] — integer ternary quadratic forms, invariants,
//!   unimodular transformation.
//! * [`norms`] — norms `||x|| = ||g x||_inf` with exact rational `g` and
//!   the comparison constant `K0`.
//! * [`zeros`] — primitive zeros within the Cassels-type search bound.
//! * [`unimodular`] — completion of a primitive vector to SL3(Z).
//! * [`parametrize`] — the conic parametrization `Pi`, `q(s, t)`,
//!   `rho_star`, and the point/parameter correspondence.
//! * [`counting`] — `N(Q, B)` both ways, the lattice counters `M`, `M*`,
//!   `script N`, and `vol(V)`.
//! * [`densities`] — local densities, the archimedean density, and the
//!   two leading constants `c_Q`, `c'_Q`.
//! * [`harness`] — corpus generation, identity batteries, sweeps.
//! * [`io`] — JSON formats for forms and norms.

pub mod counting;
pub mod densities;
pub mod error;
pub mod harness;
pub mod intmath;
pub mod io;
pub mod norms;
pub mod parametrize;
pub mod quadform;
pub mod unimodular;
pub mod zeros;

pub use counting::{
    bounding_box, count_m, count_m_star, count_n_brute, count_n_param, count_n_script,
    count_report, volume_v, CountMethod, CountReport, RegionV, SPEC_VERSION, VECTORS_PER_POINT,
};
pub use densities::{
    count_nstar_mod, density_report, peyre_constant, sigma_infinity, sigma_p, sigma_p_prime,
    DensityReport,
};
pub use error::{Error, Result};
pub use harness::{generate_corpus, run_sweep, verify_identities, CorpusSpec, Shape, SweepRow};
pub use norms::IsometricNorm;
pub use parametrize::{
    parameter_from_point, point_from_parameter, rho_star, rho_star_direct, ParamPoint, ParamSystem,
    ParameterOfPoint,
};
pub use quadform::{SpecialConic, TernaryQuadraticForm, UnimodularMatrix};
pub use unimodular::complete_to_sl3;
pub use zeros::{default_zero_cap, find_primitive_zero, PrimitiveZero};
