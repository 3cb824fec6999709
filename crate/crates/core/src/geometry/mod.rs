//! Metric assembly, curvature and pr-wave structure checks.

mod curvature;
mod metric;
mod structure;

pub use curvature::{christoffel_at, curvature_at, CurvatureBundle, LocalGeometry, Tensor3, Tensor4, Tensor5};
pub(crate) use metric::values;
pub use metric::{prwave_metric, JetMatrix, MetricField, SINGULAR_DET};
pub use structure::{
    check_pr_structure, codazzi_component, codazzi_defect, codazzi_defect_of, pr_structure_of,
    recurrent_curvature_defect, recurrent_fit_of, ricci_operator_image, PrStructure, RecurrentFit, RicciImage,
    RANK_TOL, STRUCTURE_TOL, ZERO_CURVATURE,
};
