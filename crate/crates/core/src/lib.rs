//! Analytics core for country-level scientific subject profiles.
//!
//! Given a countries x subject-areas matrix of output shares, this crate
//! computes Q-mode principal-component factor models (with optional varimax
//! rotation), specialization indices against a world profile, 2D embeddings
//! (classical MDS initialisation refined by SMACOF stress majorization) and
//! deterministic SVG/ASCII renderings of the resulting country map.
//!
//! The crate is `no_std` (with `alloc`); file formats, fixtures and the CLI
//! live in the companion `sciprofile` crate.

#![cfg_attr(not(test), no_std)]
// index loops over symmetric matrices read better than iterator chains here
#![allow(clippy::needless_range_loop)]

extern crate alloc;

mod math;

pub mod eigen;
pub mod mds;
pub mod model;
pub mod oracle;
pub mod pca;
pub mod render;
pub mod report;

pub use eigen::{jacobi_eigh, EigenError, EigenResult};
pub use mds::{
    add_factor_poles, classical_mds, distance_matrix, embedding_to_csv, procrustes, smacof,
    stress1, Dissimilarity, Embedding, MdsError, Metric, SmacofInit,
};
pub use model::{
    specialization_index, validate_profile, world_profile, CountryProfile, MatrixKind, ModelError,
    ProfileMatrix, Specialization, SubjectScheme, ValidationReport, WORLD_CODE,
};
pub use pca::{
    correlation_matrix, extract_factors, variance_table, varimax, FactorCount, FactorMode,
    FactorModel, PcaError, VarianceRow,
};
pub use render::{render_ascii, render_svg, MapStyle, RenderError, SvgMap};
pub use report::{
    compare_schemes, compare_variance_rows, membership, profile_table, rank_by_factor,
    LoadingTable, ReportError, ReportTable,
};
