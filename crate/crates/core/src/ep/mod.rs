//! Eigenvalue monodromy: branches are followed around closed contours in a
//! complexified parameter and the permutation they undergo is classified.

pub mod appendix;
mod contour;
mod gpe_provider;
mod provider;

pub use appendix::{appendix_expansion_check, appendix_linear_response, appendix_matrix, appendix_slope, ExpansionFit};
pub use contour::{
    classify, cycle_structure, trace_contour, BranchTrace, Classification, ContourParameter, ContourSpec, Orientation,
    PermutationResult, AMBIGUITY_RATIO, MAX_REFINEMENTS,
};
pub use gpe_provider::{GpeProvider, GpeProviderOptions};
pub use provider::{
    matrix_eigenvector_mapping, AppendixEpsProvider, AppendixProvider, FnProvider, MatrixProvider, SpectrumProvider,
};
