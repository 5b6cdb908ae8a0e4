//! Speed records, road geometry, free-flow estimation and the traffic state
//! index (TSI) grid.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::ops::Deref;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One floating-vehicle observation: UTC seconds, segment, speed in km/h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRecord {
    pub timestamp: i64,
    pub segment_id: String,
    pub speed: f64,
}

impl SpeedRecord {
    pub fn new(timestamp: i64, segment_id: impl Into<String>, speed: f64) -> Result<Self> {
        let segment_id = segment_id.into();
        if segment_id.trim().is_empty() {
            return Err(Error::InvalidRecord("empty segment id".into()));
        }
        if !speed.is_finite() || speed < 0.0 {
            return Err(Error::InvalidRecord(format!("speed {speed} is not a nonnegative number")));
        }
        Ok(Self {
            timestamp,
            segment_id,
            speed,
        })
    }
}

/// Epoch seconds, RFC 3339, or a naive UTC date-time such as
/// `2024-05-01 08:15:00` / `2024-05-01T08:15`.
pub fn parse_timestamp(raw: &str) -> Result<i64> {
    let s = raw.trim();
    if let Ok(secs) = s.parse::<i64>() {
        return Ok(secs);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.timestamp());
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt.and_utc().timestamp());
        }
    }
    Err(Error::InvalidRecord(format!("unparseable timestamp `{s}`")))
}

/// Parsed speed file with the count of rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedFile {
    pub records: Vec<SpeedRecord>,
    pub malformed: usize,
    pub total_rows: usize,
}

impl SpeedFile {
    pub fn malformed_fraction(&self) -> f64 {
        if self.total_rows == 0 {
            0.0
        } else {
            self.malformed as f64 / self.total_rows as f64
        }
    }
}

/// Read a `timestamp,segment_id,speed_kmh` CSV. Malformed rows are logged
/// and counted rather than aborting the read.
pub fn read_speed_csv<R: Read>(reader: R) -> Result<SpeedFile> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyInput("speed file is empty".into()));
    }
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidRecord(format!("speed file lacks a `{name}` column")))
    };
    let (ts_col, seg_col, speed_col) = (column("timestamp")?, column("segment_id")?, column("speed_kmh")?);

    let mut records = Vec::new();
    let mut malformed = 0;
    let mut total_rows = 0;
    for (line, row) in csv.records().enumerate() {
        total_rows += 1;
        let parsed = row.map_err(Error::from).and_then(|row| {
            let field = |i: usize| row.get(i).unwrap_or("");
            let speed = field(speed_col)
                .parse::<f64>()
                .map_err(|_| Error::InvalidRecord(format!("bad speed `{}`", field(speed_col))))?;
            SpeedRecord::new(parse_timestamp(field(ts_col))?, field(seg_col), speed)
        });
        match parsed {
            Ok(rec) => records.push(rec),
            Err(err) => {
                malformed += 1;
                log::warn!("skipping speed row {}: {err}", line + 2);
            }
        }
    }
    Ok(SpeedFile {
        records,
        malformed,
        total_rows,
    })
}

pub fn read_speed_file(path: &Path) -> Result<SpeedFile> {
    read_speed_csv(File::open(path)?)
}

/// Write records as a `timestamp,segment_id,speed_kmh` CSV.
pub fn write_speed_csv(path: &Path, records: &[SpeedRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["timestamp", "segment_id", "speed_kmh"])?;
    for r in records {
        w.write_record([r.timestamp.to_string(), r.segment_id.clone(), r.speed.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Segments × uniform time bins with a presence mask. Rows are sorted by
/// segment id; bin `b` starts at `start + b * interval`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentGrid {
    segment_ids: Vec<String>,
    start: i64,
    interval: i64,
    bins: usize,
    values: Vec<f64>,
    present: Vec<bool>,
}

impl SegmentGrid {
    pub fn new(segment_ids: Vec<String>, start: i64, interval: i64, bins: usize) -> Result<Self> {
        if interval <= 0 {
            return Err(Error::InvalidArgument(format!("interval {interval} must be positive")));
        }
        if segment_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("segment ids must be sorted and unique".into()));
        }
        let cells = segment_ids.len() * bins;
        Ok(Self {
            segment_ids,
            start,
            interval,
            bins,
            values: vec![0.0; cells],
            present: vec![false; cells],
        })
    }

    pub fn segment_count(&self) -> usize {
        self.segment_ids.len()
    }

    pub fn bin_count(&self) -> usize {
        self.bins
    }

    pub fn interval(&self) -> i64 {
        self.interval
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn segment_ids(&self) -> &[String] {
        &self.segment_ids
    }

    pub fn segment_index(&self, id: &str) -> Option<usize> {
        self.segment_ids.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    pub fn bin_start(&self, bin: usize) -> i64 {
        self.start + bin as i64 * self.interval
    }

    /// Bin containing `timestamp`, if it falls inside the grid.
    pub fn bin_of(&self, timestamp: i64) -> Option<usize> {
        let offset = timestamp - self.start;
        if offset < 0 {
            return None;
        }
        let bin = (offset / self.interval) as usize;
        (bin < self.bins).then_some(bin)
    }

    pub fn get(&self, segment: usize, bin: usize) -> Option<f64> {
        let i = segment * self.bins + bin;
        self.present[i].then(|| self.values[i])
    }

    pub fn set(&mut self, segment: usize, bin: usize, value: f64) {
        let i = segment * self.bins + bin;
        self.values[i] = value;
        self.present[i] = true;
    }

    pub fn row(&self, segment: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        (0..self.bins).map(move |b| self.get(segment, b))
    }

    pub fn present_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    /// Share of cells holding a value.
    pub fn coverage(&self) -> f64 {
        if self.present.is_empty() {
            0.0
        } else {
            self.present_count() as f64 / self.present.len() as f64
        }
    }

    /// Values of `segment` over the `86400 / interval` bins of the UTC day
    /// containing `timestamp`; cells outside the grid or missing read as 0.
    pub fn day_series(&self, segment: usize, timestamp: i64) -> Result<Vec<f64>> {
        let per_day = bins_per_day(self.interval)?;
        let day_start = timestamp.div_euclid(86_400) * 86_400;
        Ok((0..per_day)
            .map(|k| {
                let t = day_start + k as i64 * self.interval;
                self.bin_of(t)
                    .and_then(|b| self.get(segment, b))
                    .unwrap_or(0.0)
            })
            .collect())
    }
}

pub fn bins_per_day(interval: i64) -> Result<usize> {
    if interval <= 0 || 86_400 % interval != 0 {
        return Err(Error::InvalidArgument(format!(
            "interval {interval}s does not divide a day evenly"
        )));
    }
    Ok((86_400 / interval) as usize)
}

/// Mean observed speed per (segment, bin), km/h.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedMatrix(pub SegmentGrid);

impl Deref for SpeedMatrix {
    type Target = SegmentGrid;
    fn deref(&self) -> &SegmentGrid {
        &self.0
    }
}

/// TSI per (segment, bin), every present value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsiMatrix(pub SegmentGrid);

impl Deref for TsiMatrix {
    type Target = SegmentGrid;
    fn deref(&self) -> &SegmentGrid {
        &self.0
    }
}

/// Average records into bins aligned to multiples of `interval` seconds
/// since the epoch. The result does not depend on record order.
pub fn aggregate_speeds(records: &[SpeedRecord], interval: i64) -> Result<SpeedMatrix> {
    if interval <= 0 {
        return Err(Error::InvalidArgument(format!("interval {interval} must be positive")));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("no speed records".into()));
    }
    let first = records.iter().map(|r| r.timestamp).min().unwrap().div_euclid(interval);
    let last = records.iter().map(|r| r.timestamp).max().unwrap().div_euclid(interval);
    let bins = (last - first + 1) as usize;

    let mut cells: BTreeMap<(&str, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        let bin = (r.timestamp.div_euclid(interval) - first) as usize;
        cells.entry((r.segment_id.as_str(), bin)).or_default().push(r.speed);
    }
    let mut ids: Vec<String> = cells.keys().map(|(s, _)| s.to_string()).collect();
    ids.dedup();
    let mut grid = SegmentGrid::new(ids, first * interval, interval, bins)?;
    let mut seg = 0;
    for ((id, bin), mut speeds) in cells {
        while grid.segment_ids[seg] != id {
            seg += 1;
        }
        speeds.sort_by(f64::total_cmp);
        let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
        grid.set(seg, bin, mean);
    }
    Ok(SpeedMatrix(grid))
}

/// Free-flow speed: nearest-rank value at rank `ceil(0.15 n)` of the speeds
/// sorted in descending order.
pub fn estimate_free_flow(speeds: &[f64]) -> Result<f64> {
    if speeds.is_empty() {
        return Err(Error::NoData);
    }
    let mut sorted = speeds.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let rank = (15 * sorted.len()).div_ceil(100).max(1);
    let v = sorted[rank - 1];
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::DegenerateFreeFlow(String::new()))
    }
}

/// Segment id → free-flow speed in km/h.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FreeFlowTable(pub BTreeMap<String, f64>);

impl FreeFlowTable {
    pub fn get(&self, segment_id: &str) -> Option<f64> {
        self.0.get(segment_id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries of `other` replace estimated ones.
    pub fn override_with(&mut self, other: &FreeFlowTable) {
        self.0.extend(other.0.iter().map(|(k, v)| (k.clone(), *v)));
    }
}

/// Estimate free flow from every raw observation of each segment. Segments
/// whose estimate is degenerate are returned separately.
pub fn free_flow_table(records: &[SpeedRecord]) -> (FreeFlowTable, Vec<String>) {
    let mut by_segment: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in records {
        by_segment.entry(&r.segment_id).or_default().push(r.speed);
    }
    let mut table = FreeFlowTable::default();
    let mut excluded = Vec::new();
    for (id, speeds) in by_segment {
        match estimate_free_flow(&speeds) {
            Ok(v) => {
                table.0.insert(id.to_string(), v);
            }
            Err(_) => {
                log::warn!("segment {id}: all observed speeds are zero, excluded");
                excluded.push(id.to_string());
            }
        }
    }
    (table, excluded)
}

/// Read a `segment_id,free_flow_kmh` override table.
pub fn read_free_flow_csv<R: Read>(reader: R) -> Result<FreeFlowTable> {
    #[derive(Deserialize)]
    struct Row {
        segment_id: String,
        free_flow_kmh: f64,
    }
    let mut table = FreeFlowTable::default();
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for row in csv.deserialize() {
        let row: Row = row?;
        if !(row.free_flow_kmh > 0.0 && row.free_flow_kmh.is_finite()) {
            return Err(Error::InvalidRecord(format!(
                "free-flow speed for {} must be positive",
                row.segment_id
            )));
        }
        table.0.insert(row.segment_id, row.free_flow_kmh);
    }
    Ok(table)
}

/// `(v_f - v) / v_f` clamped to `[0, 1]`.
pub fn tsi(free_flow: f64, speed: f64) -> f64 {
    ((free_flow - speed) / free_flow).clamp(0.0, 1.0)
}

/// TSI grid over the segments that have a positive free-flow speed. The
/// ids of dropped segments are returned alongside.
pub fn compute_tsi(speeds: &SpeedMatrix, free_flow: &FreeFlowTable) -> Result<(TsiMatrix, Vec<String>)> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, id) in speeds.segment_ids.iter().enumerate() {
        match free_flow.get(id) {
            Some(v) if v > 0.0 => kept.push((i, id.clone(), v)),
            _ => {
                log::warn!("segment {id} has no usable free-flow speed, dropped");
                dropped.push(id.clone());
            }
        }
    }
    let ids = kept.iter().map(|(_, id, _)| id.clone()).collect();
    let mut grid = SegmentGrid::new(ids, speeds.start, speeds.interval, speeds.bins)?;
    for (row, (src, _, vf)) in kept.iter().enumerate() {
        for bin in 0..speeds.bins {
            if let Some(v) = speeds.get(*src, bin) {
                grid.set(row, bin, tsi(*vf, v));
            }
        }
    }
    Ok((TsiMatrix(grid), dropped))
}

/// Write a wide TSI table: `segment_id` then one column per bin start.
pub fn write_tsi_csv(path: &Path, tsi: &TsiMatrix) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["segment_id".to_string()];
    header.extend((0..tsi.bin_count()).map(|b| tsi.bin_start(b).to_string()));
    w.write_record(&header)?;
    for (s, id) in tsi.segment_ids().iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(tsi.row(s).map(|v| v.map_or(String::new(), |x| x.to_string())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a table written by [`write_tsi_csv`].
pub fn read_tsi_csv(path: &Path) -> Result<TsiMatrix> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let starts: Vec<i64> = header
        .iter()
        .skip(1)
        .map(parse_timestamp)
        .collect::<Result<_>>()?;
    if starts.is_empty() {
        return Err(Error::EmptyInput(format!("{} has no bins", path.display())));
    }
    let interval = if starts.len() > 1 { starts[1] - starts[0] } else { 86_400 };
    if starts.windows(2).any(|w| w[1] - w[0] != interval) {
        return Err(Error::InvalidRecord("TSI bins are not uniform".into()));
    }
    let mut rows = Vec::new();
    for row in r.records() {
        let row = row?;
        let id = row.get(0).unwrap_or("").to_string();
        let values: Vec<Option<f64>> = row
            .iter()
            .skip(1)
            .map(|c| {
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::InvalidRecord(format!("bad TSI value `{c}`")))
                }
            })
            .collect::<Result<_>>()?;
        rows.push((id, values));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let ids = rows.iter().map(|(id, _)| id.clone()).collect();
    let mut grid = SegmentGrid::new(ids, starts[0], interval, starts.len())?;
    for (s, (_, values)) in rows.iter().enumerate() {
        for (b, v) in values.iter().enumerate() {
            if let Some(v) = v {
                grid.set(s, b, *v);
            }
        }
    }
    Ok(TsiMatrix(grid))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crs {
    pub name: String,
    pub units: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum JunctionId {
    Int(i64),
    Text(String),
}

impl JunctionId {
    fn into_string(self) -> String {
        match self {
            JunctionId::Int(i) => i.to_string(),
            JunctionId::Text(s) => s,
        }
    }
}

#[derive(Deserialize)]
struct RawSegment {
    id: JunctionId,
    junctions: Vec<JunctionId>,
    polyline: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawNetwork {
    crs: Crs,
    segments: Vec<RawSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub junctions: [String; 2],
    /// Projected coordinates in meters.
    pub polyline: Vec<[f64; 2]>,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.polyline
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Length-weighted mean of the polyline's piece midpoints.
    pub fn centroid(&self) -> [f64; 2] {
        let mut acc = [0.0, 0.0];
        let mut total = 0.0;
        for w in self.polyline.windows(2) {
            let len = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            acc[0] += len * 0.5 * (w[0][0] + w[1][0]);
            acc[1] += len * 0.5 * (w[0][1] + w[1][1]);
            total += len;
        }
        if total > 0.0 {
            [acc[0] / total, acc[1] / total]
        } else {
            self.polyline[0]
        }
    }
}

/// Road segments sorted by id; two segments are adjacent when they share a
/// junction.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    crs: Crs,
    segments: Vec<Segment>,
    adjacency: Vec<Vec<usize>>,
}

impl RoadNetwork {
    pub fn new(crs: Crs, mut segments: Vec<Segment>) -> Result<Self> {
        if !matches!(crs.units.to_ascii_lowercase().as_str(), "m" | "meter" | "meters" | "metre" | "metres") {
            return Err(Error::InvalidNetwork(format!(
                "coordinates must be in projected meters, CRS declares `{}`",
                crs.units
            )));
        }
        segments.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = segments.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidNetwork(format!("duplicate segment id {}", w[0].id)));
        }
        let mut by_junction: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, seg) in segments.iter().enumerate() {
            if seg.polyline.len() < 2 {
                return Err(Error::InvalidNetwork(format!("segment {} needs at least 2 points", seg.id)));
            }
            if seg.polyline.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::InvalidNetwork(format!("segment {} has a non-finite coordinate", seg.id)));
            }
            if seg.length() <= 0.0 {
                return Err(Error::InvalidNetwork(format!("segment {} has zero length", seg.id)));
            }
            for j in &seg.junctions {
                by_junction.entry(j).or_default().push(i);
            }
        }
        let mut adjacency = vec![Vec::new(); segments.len()];
        for members in by_junction.values() {
            for &a in members {
                for &b in members {
                    if a != b {
                        adjacency[a].push(b);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            crs,
            segments,
            adjacency,
        })
    }

    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        let raw: RawNetwork = serde_json::from_reader(reader)?;
        let segments = raw
            .segments
            .into_iter()
            .map(|s| {
                let id = s.id.into_string();
                let junctions: Vec<String> = s.junctions.into_iter().map(JunctionId::into_string).collect();
                let junctions: [String; 2] = junctions.try_into().map_err(|j: Vec<String>| {
                    Error::InvalidNetwork(format!("segment {id} has {} junctions, expected 2", j.len()))
                })?;
                Ok(Segment {
                    id,
                    junctions,
                    polyline: s.polyline,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(raw.crs, segments)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(File::open(path)?)
    }

    /// Write the JSON form accepted by [`RoadNetwork::from_json`].
    pub fn write(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Out<'a> {
            crs: &'a Crs,
            segments: &'a [Segment],
        }
        let file = std::io::BufWriter::new(File::create(path)?);
        serde_json::to_writer(file, &Out {
            crs: &self.crs,
            segments: &self.segments,
        })?;
        Ok(())
    }

    pub fn crs(&self) -> &Crs {
        &self.crs
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.segments.binary_search_by(|s| s.id.as_str().cmp(id)).ok()
    }

    pub fn segment(&self, id: &str) -> Option<&Segment> {
        self.index_of(id).map(|i| &self.segments[i])
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }
}
