//! Stream model: timestamped items over a bounded universe, timestamp-based
//! sliding windows.

use serde::{Deserialize, Serialize};

/// One stream event: an element id observed at a timestamp.
///
/// Timestamps are non-decreasing along a stream; any number of items may
/// share a timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedItem {
    pub time: u64,
    pub id: u64,
}

impl TimedItem {
    pub fn new(time: u64, id: u64) -> Self {
        TimedItem { time, id }
    }
}

/// Universe size and window length for a sliding-window computation.
///
/// An item with timestamp `t` is active at time `now` iff
/// `now - window < t <= now`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    /// Universe size: element ids live in `[0, universe)`.
    pub universe: u64,
    /// Window length in time units.
    pub window: u64,
}

impl WindowSpec {
    pub fn new(universe: u64, window: u64) -> Self {
        WindowSpec { universe, window }
    }

    /// Activity rule for the timestamp-based window.
    #[inline]
    pub fn active(&self, item_time: u64, now: u64) -> bool {
        item_time <= now && now - item_time < self.window
    }
}

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("out-of-order timestamp: got {got} after {last}")]
    OutOfOrder { last: u64, got: u64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unknown function: {0}")]
    UnknownFunction(String),
    #[error("stream parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("element id {id} outside universe {universe}")]
    IdOutOfRange { id: u64, universe: u64 },
    #[error("serialization: {0}")]
    Wire(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tracks stream order for single-writer structures.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OrderGuard {
    last: Option<u64>,
}

impl OrderGuard {
    /// Admits `time` if it does not precede anything already seen.
    pub fn admit(&mut self, time: u64) -> Result<()> {
        match self.last {
            Some(last) if time < last => Err(Error::OutOfOrder { last, got: time }),
            _ => {
                self.last = Some(time);
                Ok(())
            }
        }
    }

    pub fn last(&self) -> Option<u64> {
        self.last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_activity_rule() {
        let spec = WindowSpec::new(16, 5);
        // items at t=1,2 expired at now=10 with N=5; t=9 active
        assert!(!spec.active(1, 10));
        assert!(!spec.active(2, 10));
        assert!(spec.active(9, 10));
        assert!(spec.active(6, 10));
        assert!(!spec.active(5, 10));
        // future items are not active
        assert!(!spec.active(11, 10));
    }

    #[test]
    fn order_guard_rejects_regression() {
        let mut g = OrderGuard::default();
        g.admit(3).unwrap();
        g.admit(3).unwrap();
        g.admit(7).unwrap();
        assert!(matches!(
            g.admit(5),
            Err(Error::OutOfOrder { last: 7, got: 5 })
        ));
    }
}
