//! Trajectories `t -> (u(t), v(t))`, integration of `w' = H w` along them,
//! sweep area, catenary fits, measure dissipation and section geometry.

mod analysis;
mod integrate;
mod section;
mod trajectory;

pub use analysis::{
    arclength_relation, catenary_check, collinearity_angles, dissipation, gram_ranks,
    uniqueness_check, ArclengthReport, CatenaryFit, Classification, DissipationReport,
};
pub use integrate::{integrate, integrate_fixed, IntegratorOptions, PathSample, PathSolution};
pub use section::{section_geometry, SectionGeometry};
pub use trajectory::{SampledPath, Trajectory, TrajectoryKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("coordinate `{name}` reaches zero near t = {t}")]
    ZeroCrossing { name: &'static str, t: f64 },
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("initial vector is zero")]
    ZeroInitial,
    #[error("empty or reversed domain [{0}, {1}]")]
    BadDomain(f64, f64),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("sweep area is not monotone near t = {0}")]
    NonMonotone(f64),
    #[error("no sweep area; the path is a Goldschmidt line")]
    NoSweepArea,
    #[error("trajectory has no closed-form solution")]
    NoClosedForm,
    #[error("{0}")]
    Operator(#[from] crate::operator::OperatorError),
}
