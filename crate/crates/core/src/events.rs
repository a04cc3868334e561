//! Event streams and time maps.
//!
//! A time map stores, per pixel, the timestamp of the last event seen during one scan
//! pass. The camera map is built from the event stream; the projector map is built
//! from the scan model, treating the projector as a camera that *emits* one
//! illumination event per pixel.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Deref;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{PinholeIntrinsics, Point2, ScanTiming, StereoRig};
use crate::grid::Grid;
use crate::scalar::Scalar;

const HEADER_MAGIC: &str = "# esl-events v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Polarity::Positive),
            -1 => Some(Polarity::Negative),
            _ => None,
        }
    }
}

/// One brightness-change event: pixel, timestamp in µs, polarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<T> {
    pub x: usize,
    pub y: usize,
    pub t: T,
    pub polarity: Polarity,
}

impl<T> Event<T> {
    pub fn positive(x: usize, y: usize, t: T) -> Self {
        Event {
            x,
            y,
            t,
            polarity: Polarity::Positive,
        }
    }
}

/// Events of one scan pass, sorted by timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream<T> {
    events: Vec<Event<T>>,
    pub width: usize,
    pub height: usize,
    /// Start of the scan interval, µs.
    pub t0: T,
    /// Length of the scan interval, µs.
    pub duration: T,
}

impl<T: Scalar> EventStream<T> {
    /// Rejects unsorted or non-finite timestamps. Pixel bounds are checked when the
    /// stream is turned into a time map.
    pub fn new(
        events: Vec<Event<T>>,
        width: usize,
        height: usize,
        t0: T,
        duration: T,
    ) -> Result<Self> {
        for (i, e) in events.iter().enumerate() {
            if !e.t.is_finite() {
                return Err(Error::Data {
                    index: i,
                    message: "non-finite timestamp".into(),
                });
            }
            if i > 0 && e.t < events[i - 1].t {
                return Err(Error::Data {
                    index: i,
                    message: format!("timestamp {} precedes {}", e.t, events[i - 1].t),
                });
            }
        }
        Ok(EventStream {
            events,
            width,
            height,
            t0,
            duration,
        })
    }

    pub fn empty(width: usize, height: usize, t0: T, duration: T) -> Self {
        EventStream {
            events: Vec::new(),
            width,
            height,
            t0,
            duration,
        }
    }

    pub fn events(&self) -> &[Event<T>] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Same stream with every timestamp (and the interval) moved by `offset` µs.
    pub fn shifted(&self, offset: T) -> Self {
        EventStream {
            events: self
                .events
                .iter()
                .map(|e| Event {
                    t: e.t + offset,
                    ..*e
                })
                .collect(),
            t0: self.t0 + offset,
            ..*self
        }
    }
}

/// Rounds a timestamp to the 1 ns resolution of the event file format.
pub fn quantize_timestamp<T: Scalar>(t: T) -> T {
    let scale = T::lit(1000.0);
    (t * scale).round() / scale
}

/// Per-pixel last-event timestamps (µs) over one scan interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMap<T> {
    grid: Grid<T>,
    pub t0: T,
    pub duration: T,
}

impl<T> Deref for TimeMap<T> {
    type Target = Grid<T>;
    fn deref(&self) -> &Grid<T> {
        &self.grid
    }
}

impl<T: Scalar> TimeMap<T> {
    pub fn from_grid(grid: Grid<T>, t0: T, duration: T) -> Self {
        TimeMap { grid, t0, duration }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn into_grid(self) -> Grid<T> {
        self.grid
    }

    /// Adds a constant to every valid timestamp.
    pub fn offset(&self, delta: T) -> Self {
        TimeMap {
            grid: self.grid.map(|t| Some(t + delta)),
            t0: self.t0 + delta,
            duration: self.duration,
        }
    }

    /// Multiplies every valid timestamp by a constant.
    pub fn scaled(&self, factor: T) -> Self {
        TimeMap {
            grid: self.grid.map(|t| Some(t * factor)),
            t0: self.t0 * factor,
            duration: self.duration * factor,
        }
    }

    /// Moves the map content `k` columns to the right; vacated cells become invalid.
    pub fn shift_columns(&self, k: isize) -> Self {
        let g = &self.grid;
        let grid = Grid::from_fn(g.width(), g.height(), |x, y| {
            g.get_signed(x as isize - k, y as isize)
        });
        TimeMap {
            grid,
            t0: self.t0,
            duration: self.duration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolarityFilter {
    /// Laser onset produces positive contrast; this is the default.
    #[default]
    PositiveOnly,
    Both,
}

impl PolarityFilter {
    fn accepts(self, p: Polarity) -> bool {
        match self {
            PolarityFilter::PositiveOnly => p == Polarity::Positive,
            PolarityFilter::Both => true,
        }
    }
}

pub fn build_camera_time_map<T: Scalar>(
    stream: &EventStream<T>,
    filter: PolarityFilter,
) -> Result<TimeMap<T>> {
    let mut grid = Grid::new(stream.width, stream.height);
    for (index, e) in stream.events.iter().enumerate() {
        if e.x >= stream.width || e.y >= stream.height {
            return Err(Error::Data {
                index,
                message: format!(
                    "event at ({}, {}) outside {}x{} sensor",
                    e.x, e.y, stream.width, stream.height
                ),
            });
        }
        if !filter.accepts(e.polarity) {
            continue;
        }
        let cell = match grid.get(e.x, e.y) {
            Some(prev) if prev > e.t => prev,
            _ => e.t,
        };
        grid.set(e.x, e.y, Some(cell));
    }
    Ok(TimeMap {
        grid,
        t0: stream.t0,
        duration: stream.duration,
    })
}

/// Illumination time of every projector pixel, on the physical projector grid.
///
/// Columns are raster lines (left to right), rows are positions within a line (top to
/// bottom), so the grid is `lines` wide and `pixels_per_line` tall.
pub fn build_projector_time_map<T: Scalar>(
    timing: &ScanTiming<T>,
    projector: &PinholeIntrinsics<T>,
) -> Result<TimeMap<T>> {
    timing.validate()?;
    if projector.width != timing.lines || projector.height != timing.pixels_per_line {
        return Err(Error::config(format!(
            "projector image {}x{} does not match a rotated raster of {} lines x {} pixels",
            projector.width, projector.height, timing.lines, timing.pixels_per_line
        )));
    }
    let grid = Grid::from_fn(projector.width, projector.height, |x, y| {
        Some(timing.timestamp_unchecked(x, y))
    });
    Ok(TimeMap {
        grid,
        t0: timing.t0,
        duration: timing.pass_duration_us(),
    })
}

/// Resamples a physical projector time map onto the camera's rectified grid
/// (nearest neighbour in projector pixel space). Cells outside the projector image are
/// invalid.
pub fn resample_projector_time_map<T: Scalar>(
    native: &TimeMap<T>,
    rig: &StereoRig<T>,
) -> Result<TimeMap<T>> {
    if native.width() != rig.projector.width || native.height() != rig.projector.height {
        return Err(Error::config(
            "projector time map does not match projector intrinsics",
        ));
    }
    let grid = Grid::from_fn(rig.camera.width, rig.camera.height, |u, v| {
        let q =
            rig.canonical_to_projector(Point2::new(T::from_usize_lossy(u), T::from_usize_lossy(v)));
        rig.projector
            .pixel_of(q)
            .and_then(|(x, y)| native.get(x, y))
    });
    Ok(TimeMap {
        grid,
        t0: native.t0,
        duration: native.duration,
    })
}

/// Projector time map on the camera grid, ready for matching against the camera map.
pub fn projector_time_map_on_camera_grid<T: Scalar>(
    timing: &ScanTiming<T>,
    rig: &StereoRig<T>,
) -> Result<TimeMap<T>> {
    let native = build_projector_time_map(timing, &rig.projector)?;
    resample_projector_time_map(&native, rig)
}

/// Writes the text event format: a header line, then `t_us x y p` per event with the
/// timestamp in fixed-point microseconds (3 decimals).
pub fn write_events_to<T: Scalar, W: Write>(
    stream: &EventStream<T>,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(
        out,
        "{HEADER_MAGIC} width={} height={} t0={} T={}",
        stream.width, stream.height, stream.t0, stream.duration
    )?;
    for e in &stream.events {
        writeln!(out, "{:.3} {} {} {}", e.t, e.x, e.y, e.polarity.sign())?;
    }
    Ok(())
}

pub fn write_events<T: Scalar>(stream: &EventStream<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_events_to(stream, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

fn parse_header<T: Scalar>(line: &str) -> Result<(usize, usize, T, T)> {
    let rest = line.strip_prefix(HEADER_MAGIC).ok_or_else(|| {
        Error::parse(1, format!("expected header starting with `{HEADER_MAGIC}`"))
    })?;
    let (mut w, mut h, mut t0, mut dur) = (None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("malformed header field `{field}`")))?;
        let bad = || Error::parse(1, format!("bad value for `{key}`: `{value}`"));
        match key {
            "width" => w = Some(value.parse::<usize>().map_err(|_| bad())?),
            "height" => h = Some(value.parse::<usize>().map_err(|_| bad())?),
            "t0" => t0 = Some(value.parse::<T>().map_err(|_| bad())?),
            "T" => dur = Some(value.parse::<T>().map_err(|_| bad())?),
            _ => return Err(Error::parse(1, format!("unknown header field `{key}`"))),
        }
    }
    match (w, h, t0, dur) {
        (Some(w), Some(h), Some(t0), Some(d)) => Ok((w, h, t0, d)),
        _ => Err(Error::parse(1, "header needs width, height, t0 and T")),
    }
}

pub fn read_events_from<T: Scalar, R: BufRead>(input: R) -> Result<EventStream<T>> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::parse(1, e.to_string()))?,
        None => return Err(Error::parse(1, "empty event file")),
    };
    let (width, height, t0, duration) = parse_header::<T>(header.trim_end())?;
    let mut events: Vec<Event<T>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                lineno,
                format!("expected `t x y p`, got `{line}`"),
            ));
        }
        let t: T = fields[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad timestamp `{}`", fields[0])))?;
        if !t.is_finite() {
            return Err(Error::parse(lineno, "non-finite timestamp"));
        }
        let x: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad x `{}`", fields[1])))?;
        let y: usize = fields[2]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad y `{}`", fields[2])))?;
        let polarity = fields[3]
            .parse::<i64>()
            .ok()
            .and_then(Polarity::from_sign)
            .ok_or_else(|| Error::parse(lineno, format!("bad polarity `{}`", fields[3])))?;
        if let Some(prev) = events.last() {
            if t < prev.t {
                return Err(Error::parse(lineno, "events are not sorted by timestamp"));
            }
        }
        events.push(Event { x, y, t, polarity });
    }
    Ok(EventStream {
        events,
        width,
        height,
        t0,
        duration,
    })
}

pub fn read_events<T: Scalar>(path: impl AsRef<Path>) -> Result<EventStream<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_events_from(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(events: Vec<Event<f64>>) -> EventStream<f64> {
        EventStream::new(events, 4, 3, 0.0, 100.0).unwrap()
    }

    #[test]
    fn empty_stream_gives_all_invalid_map() {
        let m = build_camera_time_map(&stream(vec![]), PolarityFilter::Both).unwrap();
        assert_eq!(m.valid_count(), 0);
    }

    #[test]
    fn last_event_wins() {
        let s = stream(vec![Event::positive(1, 2, 5.0), Event::positive(1, 2, 9.0)]);
        let m = build_camera_time_map(&s, PolarityFilter::PositiveOnly).unwrap();
        assert_eq!(m.get(1, 2), Some(9.0));
    }

    #[test]
    fn negative_events_filtered_by_default() {
        let s = stream(vec![
            Event::positive(0, 0, 1.0),
            Event {
                x: 0,
                y: 0,
                t: 2.0,
                polarity: Polarity::Negative,
            },
        ]);
        assert_eq!(
            build_camera_time_map(&s, PolarityFilter::default())
                .unwrap()
                .get(0, 0),
            Some(1.0)
        );
        assert_eq!(
            build_camera_time_map(&s, PolarityFilter::Both)
                .unwrap()
                .get(0, 0),
            Some(2.0)
        );
    }

    #[test]
    fn out_of_bounds_event_reports_index() {
        let s = stream(vec![Event::positive(0, 0, 1.0), Event::positive(4, 0, 2.0)]);
        match build_camera_time_map(&s, PolarityFilter::Both) {
            Err(Error::Data { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsorted_stream_rejected() {
        let r = EventStream::new(
            vec![Event::positive(0, 0, 2.0), Event::positive(0, 0, 1.0)],
            1,
            1,
            0.0,
            1.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn projector_map_two_by_two() {
        let timing = ScanTiming::new(1.0f64, 2, 2, 0.0).unwrap();
        let proj = PinholeIntrinsics::new(1.0, 1.0, 0.5, 0.5, 2, 2).unwrap();
        let m = build_projector_time_map(&timing, &proj).unwrap();
        // column-major: (0,0), (0,1), (1,0), (1,1) at quarter seconds
        assert_eq!(m.get(0, 0), Some(0.0));
        assert_eq!(m.get(0, 1), Some(250_000.0));
        assert_eq!(m.get(1, 0), Some(500_000.0));
        assert_eq!(m.get(1, 1), Some(750_000.0));
    }

    #[test]
    fn projector_map_dimension_mismatch() {
        let timing = ScanTiming::new(1.0f64, 2, 3, 0.0).unwrap();
        let proj = PinholeIntrinsics::new(1.0, 1.0, 0.5, 0.5, 3, 2).unwrap();
        assert!(matches!(
            build_projector_time_map(&timing, &proj),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn header_only_file_is_empty_stream() {
        let text = "# esl-events v1 width=8 height=6 t0=0 T=16666.666\n";
        let s: EventStream<f64> = read_events_from(text.as_bytes()).unwrap();
        assert!(s.is_empty());
        assert_eq!((s.width, s.height), (8, 6));
        assert_eq!(s.duration, 16666.666);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "# esl-events v1 width=8 height=6 t0=0 T=10\n1.000 1 1 1\n2.000 1 x 1\n";
        match read_events_from::<f64, _>(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsorted_file_rejected() {
        let text = "# esl-events v1 width=8 height=6 t0=0 T=10\n2.000 1 1 1\n1.000 1 1 1\n";
        assert!(matches!(
            read_events_from::<f64, _>(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn three_decimal_timestamps_preserved() {
        let text = "# esl-events v1 width=8 height=6 t0=0 T=10\n1234.567 1 1 1\n1234.568 2 1 -1\n";
        let s: EventStream<f64> = read_events_from(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_events_to(&s, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}
