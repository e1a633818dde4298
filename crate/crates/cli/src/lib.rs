//! File formats, bundled fixtures and the command-line pipeline for country
//! subject-profile analysis. The numeric core lives in `sciprofile-core`.

pub mod cli;
pub mod ingest;
