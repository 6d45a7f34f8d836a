//! Simulation and analysis of a real-time auction in which every arriving
//! bid executes the highest remaining bid, unless it exceeds it.
//!
//! * [`engine`]: the selling rules and a quadratic reference implementation.
//! * [`distributions`]: bid-price laws, seeded inverse-transform sampling,
//!   truncated moments.
//! * [`analytics`]: critical price and income predictions, distribution
//!   checks, avalanche segmentation and tail fitting.
//! * [`montecarlo`]: replica runs and estimators of the limit constants.

pub mod analytics;
pub mod distributions;
pub mod engine;
pub mod montecarlo;
pub mod numeric;

pub use analytics::{AvalancheSet, TailFit, TheorySummary};
pub use distributions::{PriceModel, SeedSpec, DEFAULT_PC};
pub use engine::{run_sequence, Bid, Engine, Rule, RunOutcome, SaleRecord};
pub use montecarlo::{EstimateWithCI, ReplicaConfig, ReplicaResult};
