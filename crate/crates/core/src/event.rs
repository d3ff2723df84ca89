//! Event model, canonical ordering, time windows and normalization.

use std::cmp::Ordering;
use std::ops::Range;

use crate::error::{Error, Result};

/// Sign of the log-intensity change that produced an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(i8)]
pub enum Polarity {
    Off = -1,
    On = 1,
}

impl Polarity {
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn sign(self) -> f64 {
        f64::from(self.as_i8())
    }

    pub fn from_i8(value: i8) -> Option<Self> {
        match value {
            -1 => Some(Polarity::Off),
            1 => Some(Polarity::On),
            _ => None,
        }
    }
}

/// One asynchronous brightness change: pixel column `x`, pixel row `y`,
/// timestamp `t` in microseconds and polarity `p`.
///
/// The ordering is the canonical stream order `(t, y, x, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t: u64,
    pub x: u16,
    pub y: u16,
    pub p: Polarity,
}

impl Event {
    pub fn new(t: u64, x: u16, y: u16, p: Polarity) -> Self {
        Event { t, x, y, p }
    }

    fn key(&self) -> (u64, u16, u16, Polarity) {
        (self.t, self.y, self.x, self.p)
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorts events by `(t, y, x, p)`. The key covers every field, so the
/// result does not depend on the input permutation.
pub fn sort_canonical(events: &mut [Event]) {
    events.sort_unstable();
}

/// A canonically sorted set of events from a `width` x `height` sensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    width: u16,
    height: u16,
    events: Vec<Event>,
}

impl EventStream {
    /// Validates sensor bounds and sorts the events canonically.
    pub fn new(width: u16, height: u16, mut events: Vec<Event>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "sensor geometry must be non-zero, got {width}x{height}"
            )));
        }
        if let Some(e) = events.iter().find(|e| e.x >= width || e.y >= height) {
            return Err(Error::invalid(format!(
                "event at (x={}, y={}, t={}) outside {width}x{height} sensor",
                e.x, e.y, e.t
            )));
        }
        if !events.is_sorted() {
            sort_canonical(&mut events);
        }
        Ok(EventStream {
            width,
            height,
            events,
        })
    }

    pub fn empty(width: u16, height: u16) -> Result<Self> {
        Self::new(width, height, Vec::new())
    }

    /// Caller guarantees bounds and canonical order.
    pub(crate) fn from_sorted(width: u16, height: u16, events: Vec<Event>) -> Self {
        debug_assert!(events.is_sorted());
        debug_assert!(events.iter().all(|e| e.x < width && e.y < height));
        EventStream {
            width,
            height,
            events,
        }
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// First and last timestamp, if any.
    pub fn span(&self) -> Option<(u64, u64)> {
        Some((self.events.first()?.t, self.events.last()?.t))
    }

    /// Index range of the events whose timestamps fall in `window`.
    pub fn window_range(&self, window: &TimeWindow) -> Range<usize> {
        let lo = self.events.partition_point(|e| e.t < window.start);
        let hi = self.events.partition_point(|e| e.t < window.end);
        lo..hi
    }

    pub fn events_in(&self, window: &TimeWindow) -> &[Event] {
        &self.events[self.window_range(window)]
    }

    /// Same sensor, subset of events; `keep` sees events in canonical order.
    pub fn filter(&self, mut keep: impl FnMut(&Event) -> bool) -> EventStream {
        let events = self.events.iter().copied().filter(|e| keep(e)).collect();
        EventStream::from_sorted(self.width, self.height, events)
    }
}

/// Half-open interval `[start, end)` in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeWindow {
    pub start: u64,
    pub end: u64,
}

impl TimeWindow {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if start >= end {
            return Err(Error::invalid(format!(
                "time window [{start}, {end}) is empty"
            )));
        }
        Ok(TimeWindow { start, end })
    }

    pub fn duration(&self) -> u64 {
        self.end - self.start
    }

    pub fn contains(&self, t: u64) -> bool {
        self.start <= t && t < self.end
    }
}

/// Sliding-window parameters shared by the windowed metrics and renderer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    pub len_us: u64,
    pub overlap: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            len_us: 50_000,
            overlap: 0.5,
        }
    }
}

impl WindowConfig {
    pub fn new(len_us: u64, overlap: f64) -> Result<Self> {
        let cfg = WindowConfig { len_us, overlap };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.len_us == 0 {
            return Err(Error::invalid("window length must be positive"));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::invalid(format!(
                "window overlap must lie in [0, 1), got {}",
                self.overlap
            )));
        }
        Ok(())
    }

    /// Distance between consecutive window starts, at least 1 µs.
    pub fn stride_us(&self) -> u64 {
        let stride = (self.len_us as f64 * (1.0 - self.overlap) + 0.5).floor() as u64;
        stride.max(1)
    }

    /// Windows starting at `first` and advancing by the stride until one
    /// reaches past `last`, so every timestamp in `[first, last]` is covered.
    pub fn bounds(&self, first: u64, last: u64) -> Result<Vec<TimeWindow>> {
        self.validate()?;
        let stride = self.stride_us();
        let mut windows = Vec::new();
        let mut start = first;
        loop {
            let end = start.saturating_add(self.len_us);
            windows.push(TimeWindow { start, end });
            if end > last || end == u64::MAX {
                break;
            }
            start += stride;
        }
        Ok(windows)
    }
}

/// Overlapping windows over the stream's span, each paired with the index
/// range of its events. An empty stream yields no windows.
pub fn slice_windows(
    stream: &EventStream,
    cfg: &WindowConfig,
) -> Result<Vec<(TimeWindow, Range<usize>)>> {
    cfg.validate()?;
    let Some((first, last)) = stream.span() else {
        return Ok(Vec::new());
    };
    Ok(cfg
        .bounds(first, last)?
        .into_iter()
        .map(|w| (w, stream.window_range(&w)))
        .collect())
}

/// Events of one window mapped into the unit cube, `(u, v, w)` per event in
/// source order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCloud {
    pub points: Vec<[f64; 3]>,
}

impl NormalizedCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Coordinate assigned along an axis whose extent within the window is zero.
pub const DEGENERATE_AXIS_VALUE: f64 = 0.5;

struct AxisRange {
    min: f64,
    extent: f64,
}

impl AxisRange {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        AxisRange {
            min,
            extent: max - min,
        }
    }

    fn map(&self, v: f64) -> f64 {
        if self.extent > 0.0 {
            (v - self.min) / self.extent
        } else {
            DEGENERATE_AXIS_VALUE
        }
    }
}

/// Normalizes `x`, `y` and `t` independently over the slice's own extrema.
pub fn normalize_events(events: &[Event]) -> Result<NormalizedCloud> {
    if events.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let xs = AxisRange::of(events.iter().map(|e| f64::from(e.x)));
    let ys = AxisRange::of(events.iter().map(|e| f64::from(e.y)));
    let ts = AxisRange::of(events.iter().map(|e| e.t as f64));
    let points = events
        .iter()
        .map(|e| [xs.map(f64::from(e.x)), ys.map(f64::from(e.y)), ts.map(e.t as f64)])
        .collect();
    Ok(NormalizedCloud { points })
}

pub fn normalize_window(stream: &EventStream, window: &TimeWindow) -> Result<NormalizedCloud> {
    normalize_events(stream.events_in(window))
}
