//! Tick series: CSV ingestion, a seeded generator, and equal-width
//! elementary segments over the observation span.

use std::collections::BTreeMap;
use std::ops::Range;

use chrono::DateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// One observed price at an epoch-millisecond timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TickPoint {
    pub t: i64,
    pub price: f64,
}

/// Strictly time-ordered prices over the span `[a, b]`, at least two points.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    times: Vec<i64>,
    prices: Vec<f64>,
}

impl TickSeries {
    pub fn new(points: impl IntoIterator<Item = TickPoint>) -> Result<Self> {
        let (times, prices): (Vec<i64>, Vec<f64>) =
            points.into_iter().map(|p| (p.t, p.price)).unzip();
        Self::from_parts(times, prices)
    }

    /// Builds a series from parallel timestamp and price vectors.
    pub fn from_parts(times: Vec<i64>, prices: Vec<f64>) -> Result<Self> {
        if times.len() != prices.len() {
            return Err(Error::domain(
                "points",
                format!("{} timestamps but {} prices", times.len(), prices.len()),
            ));
        }
        if times.len() < 2 {
            return Err(Error::TooFewPoints(times.len()));
        }
        if let Some(w) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "points",
                format!("timestamps not strictly increasing at index {}", w + 1),
            ));
        }
        if let Some(i) = prices.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::NonPositivePrice {
                line: i + 1,
                price: prices[i],
            });
        }
        Ok(Self { times, prices })
    }

    /// Convenience constructor with ticks one second apart starting at 0.
    pub fn from_prices(prices: &[f64]) -> Result<Self> {
        let times = (0..prices.len() as i64).map(|i| i * 1000).collect();
        Self::from_parts(times, prices.to_vec())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn points(&self) -> impl Iterator<Item = TickPoint> + '_ {
        self.times
            .iter()
            .zip(&self.prices)
            .map(|(&t, &price)| TickPoint { t, price })
    }

    /// `(a, b)`: first and last timestamps.
    pub fn span(&self) -> (i64, i64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Sub-series over a range of tick indices.
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        Self::from_parts(
            self.times[range.clone()].to_vec(),
            self.prices[range].to_vec(),
        )
    }

    /// Canonical CSV: `timestamp,price` header, epoch-ms timestamps and
    /// shortest round-trip price formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("timestamp,price\n");
        for p in self.points() {
            out.push_str(&format!("{},{}\n", p.t, p.price));
        }
        out
    }
}

fn parse_timestamp(field: &str) -> Option<i64> {
    if let Ok(t) = field.parse::<i64>() {
        return Some(t);
    }
    DateTime::parse_from_rfc3339(field)
        .ok()
        .map(|dt| dt.timestamp_millis())
}

/// Parses `timestamp,price` rows. The header is optional; timestamps are
/// integer epoch milliseconds or RFC3339. Repeated timestamps keep the last
/// price seen.
pub fn parse_csv(text: &str) -> Result<TickSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut by_time: BTreeMap<i64, f64> = BTreeMap::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedRow {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let is_first = std::mem::replace(&mut first, false);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 2 fields, got {}", record.len()),
            });
        }
        let t = match parse_timestamp(&record[0]) {
            Some(t) => t,
            // header row
            None if is_first => continue,
            None => {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("bad timestamp {:?}", &record[0]),
                })
            }
        };
        let price: f64 = record[1].parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("bad price {:?}", &record[1]),
        })?;
        if !price.is_finite() {
            return Err(Error::MalformedRow {
                line,
                reason: format!("non-finite price {:?}", &record[1]),
            });
        }
        if price <= 0.0 {
            return Err(Error::NonPositivePrice { line, price });
        }
        by_time.insert(t, price);
    }
    if by_time.len() < 2 {
        return Err(Error::TooFewPoints(by_time.len()));
    }
    let (times, prices) = by_time.into_iter().unzip();
    TickSeries::from_parts(times, prices)
}

/// Parameters of the synthetic tick generator.
///
/// Prices live on a grid of `jump_scale` around `start_price`. Each tick moves
/// up with probability `(1 + drift) / 2` by a geometric number (≥ 1) of grid
/// steps, so consecutive prices always differ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthConfig {
    pub n_ticks: usize,
    pub drift: f64,
    pub jump_scale: f64,
    pub start_price: f64,
    pub interval_ms: i64,
}

impl SynthConfig {
    pub fn new(n_ticks: usize, drift: f64, jump_scale: f64) -> Self {
        Self {
            n_ticks,
            drift,
            jump_scale,
            start_price: 100.0,
            interval_ms: 1000,
        }
    }
}

const MAX_JUMP_STEPS: i64 = 16;

pub fn synthesize(config: &SynthConfig, seed: u64) -> Result<TickSeries> {
    if config.n_ticks < 2 {
        return Err(Error::domain("n_ticks", "must be at least 2"));
    }
    if !(config.jump_scale.is_finite() && config.jump_scale > 0.0) {
        return Err(Error::domain("jump_scale", "must be positive and finite"));
    }
    if !(config.drift.abs() <= 1.0) {
        return Err(Error::domain("drift", "must lie in [-1, 1]"));
    }
    if !(config.start_price.is_finite() && config.start_price > 0.0) {
        return Err(Error::domain("start_price", "must be positive and finite"));
    }
    if config.interval_ms <= 0 {
        return Err(Error::domain("interval_ms", "must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_up = (1.0 + config.drift) / 2.0;
    let price_at = |level: i64| config.start_price + level as f64 * config.jump_scale;

    let mut level = 0i64;
    let mut times = Vec::with_capacity(config.n_ticks);
    let mut prices = Vec::with_capacity(config.n_ticks);
    for i in 0..config.n_ticks {
        times.push(i as i64 * config.interval_ms);
        prices.push(price_at(level));

        let mut steps = 1;
        while steps < MAX_JUMP_STEPS && rng.random_bool(0.5) {
            steps += 1;
        }
        let up = rng.random::<f64>() < p_up;
        if up || price_at(level - steps) <= 0.0 {
            level += steps;
        } else {
            level -= steps;
        }
    }
    TickSeries::from_parts(times, prices)
}

/// Equal-width elementary segments over `[a, b]`.
///
/// `segment_count = n + 1` segments produce `n` transitions between
/// neighbouring segments. Segment 0 is closed `[b0, b1]`; every later
/// segment is `(b_i, b_{i+1}]`, so a tick on an interior boundary belongs to
/// the left segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentPartition {
    pub boundaries: Vec<i64>,
    pub segment_count: usize,
    /// Largest unobserved stretch inside any segment: width minus the time
    /// span of the ticks it contains, in milliseconds.
    pub cover_tolerance: f64,
}

impl SegmentPartition {
    /// Number of transitions `n` between neighbouring segments.
    pub fn transitions(&self) -> usize {
        self.segment_count - 1
    }

    pub fn widths(&self) -> impl Iterator<Item = i64> + '_ {
        self.boundaries.windows(2).map(|w| w[1] - w[0])
    }

    /// Tick-index ranges of `series` falling in each segment.
    pub fn assign(&self, series: &TickSeries) -> Result<Vec<Range<usize>>> {
        let times = series.times();
        let segments = self.segment_count;
        let mut ranges = Vec::with_capacity(segments);
        let mut start = times.partition_point(|&t| t < self.boundaries[0]);
        for (i, &right) in self.boundaries[1..].iter().enumerate() {
            let end = times.partition_point(|&t| t <= right);
            if end <= start {
                return Err(Error::EmptySegment {
                    segment: i,
                    segments,
                });
            }
            ranges.push(start..end);
            start = end;
        }
        Ok(ranges)
    }
}

/// Splits the series span into `transitions + 1` equal-width segments.
pub fn partition(series: &TickSeries, transitions: usize) -> Result<SegmentPartition> {
    if transitions == 0 {
        return Err(Error::domain("transitions", "must be at least 1"));
    }
    let segments = transitions + 1;
    if segments > series.len() {
        return Err(Error::EmptySegment {
            segment: series.len(),
            segments,
        });
    }
    let (a, b) = series.span();
    let span = (b - a) as i128;
    let boundaries: Vec<i64> = (0..=segments)
        .map(|i| a + (span * i as i128 / segments as i128) as i64)
        .collect();

    let mut part = SegmentPartition {
        boundaries,
        segment_count: segments,
        cover_tolerance: 0.0,
    };
    let ranges = part.assign(series)?;
    let times = series.times();
    part.cover_tolerance = ranges
        .iter()
        .zip(part.widths())
        .map(|(r, w)| (w - (times[r.end - 1] - times[r.start])) as f64)
        .fold(0.0, f64::max);
    Ok(part)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_two_rows() {
        let s = parse_csv("0,100\n1000,101").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.span(), (0, 1000));
        assert_eq!(s.prices(), &[100.0, 101.0]);
    }

    #[test]
    fn parse_header_and_dedup_last_wins() {
        let s = parse_csv("t,p\n0,100\n0,99\n1000,101").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.prices()[0], 99.0);
    }

    #[test]
    fn parse_crlf_and_rfc3339() {
        let s = parse_csv(
            "timestamp,price\r\n1970-01-01T00:00:00Z,5.5\r\n1970-01-01T00:00:01.500Z,6\r\n",
        )
        .unwrap();
        assert_eq!(s.times(), &[0, 1500]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_csv("0,100"), Err(Error::TooFewPoints(1)));
        assert_eq!(parse_csv("0,100\n0,101"), Err(Error::TooFewPoints(1)));
        assert!(matches!(
            parse_csv("0,100\n1000,-1"),
            Err(Error::NonPositivePrice { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("0,100\nxx,1\n2000,3"),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("0,100\n1000,abc"),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("0,100,7\n1000,1"),
            Err(Error::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn canonical_csv_round_trip() {
        let s = parse_csv("0,100.25\n1000,0.1\n1500,3e-7").unwrap();
        let text = s.to_csv();
        assert_eq!(
            text,
            "timestamp,price\n0,100.25\n1000,0.1\n1500,0.0000003\n"
        );
        assert_eq!(parse_csv(&text).unwrap(), s);
    }

    #[test]
    fn synthesize_contract() {
        let s = synthesize(&SynthConfig::new(2, 0.0, 1.0), 7).unwrap();
        assert_eq!(s.len(), 2);
        assert_ne!(s.prices()[0], s.prices()[1]);

        let cfg = SynthConfig::new(500, 0.2, 0.5);
        assert_eq!(synthesize(&cfg, 3).unwrap(), synthesize(&cfg, 3).unwrap());
        assert_ne!(synthesize(&cfg, 3).unwrap(), synthesize(&cfg, 4).unwrap());
    }

    #[test]
    fn synthesize_mixed_signs_and_positive() {
        let s = synthesize(&SynthConfig::new(10_000, 0.01, 0.05), 11).unwrap();
        let ups = s.prices().windows(2).filter(|w| w[1] > w[0]).count();
        let downs = s.prices().windows(2).filter(|w| w[1] < w[0]).count();
        assert!(ups > 0 && downs > 0);
        assert_eq!(ups + downs, s.len() - 1);
        assert!(s.prices().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn synthesize_rejects_bad_config() {
        assert!(synthesize(&SynthConfig::new(1, 0.0, 1.0), 0).is_err());
        assert!(synthesize(&SynthConfig::new(5, 0.0, 0.0), 0).is_err());
        assert!(synthesize(&SynthConfig::new(5, 1.5, 1.0), 0).is_err());
    }

    #[test]
    fn partition_equal_halves() {
        let s = TickSeries::from_parts(vec![0, 500, 1000, 1500, 2000], vec![1.0; 5]).unwrap();
        let p = partition(&s, 1).unwrap();
        assert_eq!(p.boundaries, vec![0, 1000, 2000]);
        assert_eq!(p.segment_count, 2);
        assert_eq!(p.assign(&s).unwrap(), vec![0..3, 3..5]);
        assert_eq!(p.cover_tolerance, 500.0);
    }

    #[test]
    fn partition_four_ticks_split_two_two() {
        let s = TickSeries::from_parts(vec![0, 1, 2, 3], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = partition(&s, 1).unwrap();
        let r = p.assign(&s).unwrap();
        assert_eq!(r.iter().map(|r| r.len()).collect::<Vec<_>>(), vec![2, 2]);
    }

    #[test]
    fn partition_pigeonhole() {
        let s = TickSeries::from_prices(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(matches!(partition(&s, 5), Err(Error::EmptySegment { .. })));
        // 4 transitions -> 5 segments of width 800 over [0, 4000]: one tick each
        assert!(partition(&s, 4).is_ok());
    }

    #[test]
    fn partition_sparse_gap() {
        let s = TickSeries::from_parts(vec![0, 1, 2, 100], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            partition(&s, 2),
            Err(Error::EmptySegment { segment: 1, .. })
        ));
    }
}
