//! Spectral data of distance-regular graphs with classical parameters,
//! Gibbs-state spectral distributions, quantum-decomposition moments and
//! their limiting measures, plus a brute-force graph oracle.

pub mod error;
pub mod families;
pub mod fock;
pub mod gibbs;
pub mod limits;
pub mod oracle;
pub mod params;
pub mod qseries;

pub use error::{Error, Result};
pub use families::{ConvergenceRow, DualPolarType, FamilyDescriptor, FamilyMember, Size, TRule};
pub use fock::{Epsilon, EpsilonWord, FockCoefficients};
pub use gibbs::{DiscreteMeasure, GibbsPoint};
pub use limits::{LimitKind, LimitRegime, Preset};
pub use oracle::{GraphInstance, GraphSpec, OracleReport};
pub use params::{ClassicalParams, FeasibilityReport, IntersectionArray, SpectralTable};
pub use qseries::{Approx, Rational};
