//! Classification, nilpotency, density ODEs, positivity domains and geodesics.

mod classify;
mod domain;
mod geodesic;
mod nilpotency;
pub mod ode;

pub use classify::{analyse_point, classify, Branch, ClassificationReport, ClassifyError, PointReport, Tolerances};
pub use domain::{positivity_domain, DomainError, PositivityOutcome, Ray, BOUNDARY_TOL};
pub use geodesic::{geodesic_integrate, GeodesicRun, GeodesicState, GeodesicTermination, BLOWUP};
pub use nilpotency::{nilpotency_index, Nilpotency};
pub use ode::{solve_density_ode, DensityProfile, OdeError, OdeOptions};
