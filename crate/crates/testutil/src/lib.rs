//! Test-only oracles and fixture generators.
//!
//! Everything here recomputes results from first principles, independently
//! of the implementation paths under test: the HOTA oracle enumerates
//! per-frame matchings exhaustively and applies the metric definitions
//! verbatim, and the assignment oracle enumerates partial matchings. Used
//! as a dev-dependency only.

pub mod fixtures;
pub mod hota_oracle;
pub mod lap_oracle;
