//! Domain types shared by every evaluator: marginals, copulas, joint
//! models, samples, finite laws and reports.

mod copula;
mod discrete;
mod joint;
mod marginal;
mod report;
mod sample;

pub use copula::{egm3_admissible, Copula, CopulaKind, GaussianCopula};
pub use discrete::DiscreteJoint;
pub use joint::{CopulaModel, GaussianJoint, JointModel, ParetoII3};
pub use marginal::{EmpiricalColumn, Marginal, MarginalKind};
pub use report::{Diagnostics, Measure, MeasureReport, Variant};
pub use sample::SampleMatrix;

pub use crate::quadrature::{QuadratureSpec, Scheme, UnitPoint};
