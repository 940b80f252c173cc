//! Periodic broadcast schedules for the harmonic broadcasting family (HB,
//! CHB, QHB, AHB, AQHB), a byte-exact client simulator, and bandwidth and
//! comparison metrics. All arithmetic is exact.

pub mod client_sim;
pub mod harmonic;
pub mod json;
pub mod metrics;
pub mod params;
pub mod ratio;
pub mod schedule;
pub mod schemes;

pub use harmonic::harmonic;
pub use params::{make_params, ParamsError, VideoParams};
pub use ratio::{r, Ratio, RatioError};
pub use schedule::{schedule_validate, BroadcastSchedule, Rule, Scheme, Transmission, Violation};
