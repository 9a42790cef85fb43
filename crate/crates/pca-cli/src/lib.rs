//! Brute-force oracle and Monte Carlo estimation layer on top of the
//! `pca-core` model, shared by the `pca` binary and the test suites.

pub mod manifest;
pub mod montecarlo;
pub mod oracle;
