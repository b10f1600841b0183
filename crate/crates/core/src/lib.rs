//! Numerical analysis of isometric Lie group actions given by matrix data:
//! canonical fat sections, copolarity, fat Weyl groups, reductions, slice
//! representations, symmetric pairs and resolution bookkeeping.

pub mod catalog;
pub mod check;
mod descent;
pub mod error;
pub mod liealg;
pub mod numkernel;
pub mod orbits;
pub mod resolution;
pub mod sections;
pub mod symmpair;

pub use error::{Error, Result};
pub use liealg::{check_closure, killing_value, sample_element, LieRep, StructureConstants};
pub use numkernel::{Matrix, Subspace, TolerancePolicy, Vector};
pub use orbits::{
    analyze_point, find_regular, jacobi_split, orbit_distance, shape_operator, slice_rep,
    DistanceEstimate, JacobiTriple, PointContext, RegularityCertificate, SearchConfig,
};
pub use sections::{
    canonical_section, copolarity, reduction, ReductionData, SectionCandidate,
    SectionSource,
};
pub use check::Check;
pub use symmpair::{SymPair, TripleSystem};
pub use resolution::{gw_metric, metric_isometry_check, MetricSolution, TripleDatum};
