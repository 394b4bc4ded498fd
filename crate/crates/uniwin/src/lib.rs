//! Sliding-window universal sketches.
//!
//! Maintains polylogarithmic-size summaries over a timestamped stream that
//! can be queried *after* ingestion with any function from a broad tractable
//! class: for the current window's frequency vector `(m_1, ..., m_n)`, a
//! query with `G` returns a `(1 +/- eps)`-approximation of `sum_i G(m_i)`
//! without `G` having been known while the stream was processed.
//!
//! The pipeline, bottom to top:
//!
//! * [`hashing`] — seeded k-wise independent hash families;
//! * [`ams`] — second-moment sketches, the atom inside smooth histograms;
//! * [`smooth`] — sliding-window F2/L2 via smooth histograms, plus heavy
//!   index recovery;
//! * [`residual`] — residual second moment of the window;
//! * [`hybrid`] — per-substream heavy-element summaries (the `(a, b, j)`
//!   cells);
//! * [`ucore`] — the bucketed universal core structure and its G-aware
//!   wrapper;
//! * [`usum`] — the recursive subsampling estimator answering G-sum queries,
//!   plus its G-aware wrapper;
//! * [`gfunc`] — the function class, local jumps, and the tractability
//!   probe;
//! * [`oracle`] / [`streamgen`] — exact reference and seeded test streams.
//!
//! ```
//! use uniwin::prelude::*;
//!
//! let spec = WindowSpec::new(64, 256);
//! let stream = streamgen::random_stream(64, 2000, streamgen::Distribution::Uniform, 1, 1);
//! let mut s = UniversalSumStructure::new(spec, &Profile::relaxed(), 0.3, None, 42).unwrap();
//! s.ingest_all(&stream).unwrap();
//! let at = stream.last().unwrap().time;
//! let snap = s.snapshot(at);
//! let f2 = snap.evaluate(&GFunction::parse("power:2").unwrap(), 0.3);
//! let f0 = snap.evaluate(&GFunction::parse("indicator").unwrap(), 0.3);
//! assert!(f2.value >= 0.0 && f0.value >= 0.0);
//! ```

pub mod ams;
pub mod gfunc;
pub mod hashing;
pub mod hybrid;
pub mod oracle;
mod par;
pub mod profile;
pub mod residual;
pub mod seed;
pub mod smooth;
pub mod stream;
pub mod streamgen;
pub mod ucore;
pub mod usum;
pub mod wire;

pub use gfunc::{local_jump, probe_tractability, GFunction, ProbeGrid, ProbeMode, ProbeReport};
pub use profile::{Profile, ProfileKind};
pub use stream::{Error, Result, TimedItem, WindowSpec};

/// The common imports.
pub mod prelude {
    pub use crate::gfunc::GFunction;
    pub use crate::oracle::ExactWindow;
    pub use crate::profile::Profile;
    pub use crate::stream::{TimedItem, WindowSpec};
    pub use crate::streamgen;
    pub use crate::ucore::UniversalCoreStructure;
    pub use crate::usum::{GSum, UniversalSumStructure};
}
