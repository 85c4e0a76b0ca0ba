//! Diversity indices for categorized populations and the conference-level
//! indicators built on them.
//!
//! The base indices ([`indices`]) are Shannon, Pielou, Simpson and
//! Rao-Stirling. A conference edition is split into three communities
//! (keynotes, authors, organisers); each indicator evaluates one
//! [`measure::CommunityMeasure`] per community and blends the results with a
//! [`aggregate::WeightVector`]:
//!
//! | indicator          | dimension | measure                    |
//! |--------------------|-----------|----------------------------|
//! | GDI                | gender    | Pielou, richness 2         |
//! | GeoDI              | country   | Shannon                    |
//! | GeoDI (continents) | continent | Pielou, observed richness  |
//! | BDI                | sector    | Pielou, richness 3         |
//!
//! CDI averages GDI, GeoDI / 3.5 (capped at 1) and BDI.
//!
//! ```
//! use divindex::distribution::CategoryDistribution;
//! use divindex::indices::{pielou_index, shannon_index};
//!
//! let d = CategoryDistribution::from_counts([("female", 3), ("male", 4)]).unwrap();
//! let h = shannon_index(&d).unwrap();
//! let j = pielou_index(&d, 2).unwrap();
//! assert!((j - h / 2f64.ln()).abs() < 1e-12);
//! ```

pub mod aggregate;
pub mod cohort;
pub mod dataset;
pub mod distribution;
pub mod error;
pub mod gender;
pub mod geo;
pub mod indices;
pub mod measure;
pub mod output;
pub mod pipeline;
pub mod sector;

pub use aggregate::{bdi, cdi, cdi_with_norm, gdi, geodi, geodi_continents, IndexReport, ReportConfig, WeightVector};
pub use cohort::{
    breakdown, sample_authors, BreakdownOptions, CommunityBreakdown, ConferenceEdition, Dimension, GenderLabel,
    ParticipantRecord, Role, SectorLabel, UnknownPolicy,
};
pub use distribution::{CategoryDistribution, DisparityMatrix};
pub use error::{AggregateError, CohortError, IndexError, IngestError};
pub use indices::{h_max, pielou_index, rao_stirling, shannon_index, simpson_index, Simpson};
