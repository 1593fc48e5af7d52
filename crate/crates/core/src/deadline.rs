use std::time::{Duration, Instant};

/// Wall-clock cutoff shared by the searches in this crate.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    start: Instant,
    end: Option<Instant>,
}

impl Deadline {
    pub fn after(limit: Option<Duration>) -> Self {
        let start = Instant::now();
        Deadline {
            start,
            end: limit.map(|d| start + d),
        }
    }

    pub fn seconds(limit: f64) -> Self {
        if limit.is_finite() && limit >= 0.0 {
            Deadline::after(Some(Duration::from_secs_f64(limit)))
        } else {
            Deadline::after(None)
        }
    }

    pub fn none() -> Self {
        Deadline::after(None)
    }

    #[inline]
    pub fn expired(&self) -> bool {
        self.end.is_some_and(|e| Instant::now() >= e)
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.end.map(|e| e.saturating_duration_since(Instant::now()))
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
