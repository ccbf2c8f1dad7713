//! Domain types shared by every other module: points, data sets,
//! distributions with their moments, fold partitions, seeded RNG streams and
//! the handful of sample statistics the estimators rely on.

mod distribution;
mod moments;
mod partition;
mod point;
mod rng;
pub mod stats;

pub use distribution::Distribution;
pub use moments::{MomentTable, CoordinateLaw, MAX_MOMENT};
pub use partition::FoldPartition;
pub use point::{DataSet, Point};
pub use rng::RngStream;
pub use stats::{mean, sample_cov, sample_var};
