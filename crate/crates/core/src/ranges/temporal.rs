//! Conversion of XSD temporal literals to Unix seconds, and back to
//! lexical bounds for query filters.
//!
//! Recurring and partial types (`gMonthDay`, `gMonth`, `gDay`) are anchored
//! in the leap year 1972 so that `--02-29` is representable. `time` values are
//! seconds since midnight. Durations use 365.2425-day years and 1/12 of that
//! per month.

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, NaiveTime, TimeZone, Utc};

use serde::{Deserialize, Serialize};

use crate::rdf::{Literal, XSD};

const DAY: f64 = 86_400.0;
const YEAR: f64 = 365.2425 * DAY;
const MONTH: f64 = YEAR / 12.0;
const ANCHOR_YEAR: i32 = 1972;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemporalKind {
    DateTime,
    Date,
    Time,
    GYear,
    GYearMonth,
    GMonthDay,
    GMonth,
    GDay,
    Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot read {lexical:?} as {datatype}")]
pub struct TemporalError {
    pub lexical: String,
    pub datatype: String,
}

impl TemporalKind {
    pub fn from_datatype(iri: &str) -> Option<Self> {
        Some(match iri.strip_prefix(XSD)? {
            "dateTime" | "dateTimeStamp" => TemporalKind::DateTime,
            "date" => TemporalKind::Date,
            "time" => TemporalKind::Time,
            "gYear" => TemporalKind::GYear,
            "gYearMonth" => TemporalKind::GYearMonth,
            "gMonthDay" => TemporalKind::GMonthDay,
            "gMonth" => TemporalKind::GMonth,
            "gDay" => TemporalKind::GDay,
            "duration" | "dayTimeDuration" | "yearMonthDuration" => TemporalKind::Duration,
            _ => return None,
        })
    }

    /// XSD datatype used for filter bounds of this kind.
    pub fn datatype(self) -> String {
        let local = match self {
            TemporalKind::DateTime => "dateTime",
            TemporalKind::Date => "date",
            TemporalKind::Time => "time",
            TemporalKind::GYear => "gYear",
            TemporalKind::GYearMonth => "gYearMonth",
            TemporalKind::GMonthDay => "gMonthDay",
            TemporalKind::GMonth => "gMonth",
            TemporalKind::GDay => "gDay",
            TemporalKind::Duration => "duration",
        };
        format!("{XSD}{local}")
    }

    pub fn name(self) -> &'static str {
        match self {
            TemporalKind::DateTime => "dateTime",
            TemporalKind::Date => "date",
            TemporalKind::Time => "time",
            TemporalKind::GYear => "gYear",
            TemporalKind::GYearMonth => "gYearMonth",
            TemporalKind::GMonthDay => "gMonthDay",
            TemporalKind::GMonth => "gMonth",
            TemporalKind::GDay => "gDay",
            TemporalKind::Duration => "duration",
        }
    }

    /// Continuous kinds get bounds rounded to 0.01 s; the rest take only
    /// whole calendar values.
    pub fn is_continuous(self) -> bool {
        matches!(self, TemporalKind::DateTime | TemporalKind::Time | TemporalKind::Duration)
    }
}

/// Seconds since 1970-01-01T00:00:00Z (or elapsed seconds for durations).
pub fn to_unix_seconds(literal: &Literal) -> Result<f64, TemporalError> {
    let err = || TemporalError {
        lexical: literal.lexical.clone(),
        datatype: literal.datatype.clone(),
    };
    let kind = TemporalKind::from_datatype(&literal.datatype).ok_or_else(err)?;
    parse_seconds(kind, literal.lexical.trim()).ok_or_else(err)
}

pub fn parse_seconds(kind: TemporalKind, s: &str) -> Option<f64> {
    match kind {
        TemporalKind::DateTime => parse_datetime(s),
        TemporalKind::Date => {
            let (body, offset) = split_tz(s)?;
            let date = NaiveDate::parse_from_str(body, "%Y-%m-%d").ok()?;
            Some(day_seconds(date) - offset)
        }
        TemporalKind::Time => {
            let (body, offset) = split_tz(s)?;
            let t = NaiveTime::parse_from_str(body, "%H:%M:%S%.f").ok()?;
            let secs = t.signed_duration_since(NaiveTime::MIN);
            Some(secs.num_microseconds()? as f64 / 1e6 - offset)
        }
        TemporalKind::GYear => {
            let (body, offset) = split_tz(s)?;
            let year = parse_year(body)?;
            Some(day_seconds(NaiveDate::from_ymd_opt(year, 1, 1)?) - offset)
        }
        TemporalKind::GYearMonth => {
            let (body, offset) = split_tz(s)?;
            let (y, m) = body.rsplit_once('-')?;
            let date = NaiveDate::from_ymd_opt(parse_year(y)?, two_digits(m)?, 1)?;
            Some(day_seconds(date) - offset)
        }
        TemporalKind::GMonthDay => {
            let (body, offset) = split_tz(s)?;
            let rest = body.strip_prefix("--")?;
            let (m, d) = rest.split_once('-')?;
            let date = NaiveDate::from_ymd_opt(ANCHOR_YEAR, two_digits(m)?, two_digits(d)?)?;
            Some(day_seconds(date) - offset)
        }
        TemporalKind::GMonth => {
            let (body, offset) = split_tz(s)?;
            let m = body.strip_prefix("--")?;
            let date = NaiveDate::from_ymd_opt(ANCHOR_YEAR, two_digits(m)?, 1)?;
            Some(day_seconds(date) - offset)
        }
        TemporalKind::GDay => {
            let (body, offset) = split_tz(s)?;
            let d = body.strip_prefix("---")?;
            let date = NaiveDate::from_ymd_opt(ANCHOR_YEAR, 1, two_digits(d)?)?;
            Some(day_seconds(date) - offset)
        }
        TemporalKind::Duration => parse_duration(s),
    }
}

fn parse_datetime(s: &str) -> Option<f64> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp_micros() as f64 / 1e6);
    }
    let naive = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f").ok()?;
    Some(naive.and_utc().timestamp_micros() as f64 / 1e6)
}

fn day_seconds(date: NaiveDate) -> f64 {
    date.and_time(NaiveTime::MIN).and_utc().timestamp() as f64
}

fn parse_year(s: &str) -> Option<i32> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.len() < 4 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn two_digits(s: &str) -> Option<u32> {
    if s.len() != 2 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Splits a trailing `Z` or `±hh:mm`; returns the offset in seconds.
fn split_tz(s: &str) -> Option<(&str, f64)> {
    if let Some(body) = s.strip_suffix('Z') {
        return Some((body, 0.0));
    }
    if s.len() > 6 {
        let (body, tz) = s.split_at(s.len() - 6);
        let b = tz.as_bytes();
        if (b[0] == b'+' || b[0] == b'-') && b[3] == b':' {
            let h = two_digits(&tz[1..3])? as f64;
            let m = two_digits(&tz[4..6])? as f64;
            let sign = if b[0] == b'-' { -1.0 } else { 1.0 };
            return Some((body, sign * (h * 3600.0 + m * 60.0)));
        }
    }
    Some((s, 0.0))
}

fn parse_duration(s: &str) -> Option<f64> {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s),
    };
    let rest = rest.strip_prefix('P')?;
    let (date, time) = match rest.split_once('T') {
        Some((d, t)) => {
            if t.is_empty() {
                return None;
            }
            (d, Some(t))
        }
        None => (rest, None),
    };
    if date.is_empty() && time.is_none() {
        return None;
    }
    let mut total = 0.0;
    total += components(date, &[('Y', YEAR), ('M', MONTH), ('D', DAY)])?;
    if let Some(t) = time {
        total += components(t, &[('H', 3600.0), ('M', 60.0), ('S', 1.0)])?;
    }
    Some(sign * total)
}

/// Sums `<number><designator>` pairs appearing in the given order.
fn components(mut s: &str, units: &[(char, f64)]) -> Option<f64> {
    let mut total = 0.0;
    let mut next_unit = 0;
    while !s.is_empty() {
        let end = s.find(|c: char| !(c.is_ascii_digit() || c == '.'))?;
        let (num, tail) = s.split_at(end);
        let designator = tail.chars().next()?;
        let pos = units[next_unit..].iter().position(|&(u, _)| u == designator)? + next_unit;
        if num.is_empty() || (num.contains('.') && designator != 'S') {
            return None;
        }
        total += num.parse::<f64>().ok()? * units[pos].1;
        next_unit = pos + 1;
        s = &tail[1..];
    }
    Some(total)
}

/// A filter bound: its comparison value in seconds and its lexical form.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalBound {
    pub seconds: f64,
    pub lexical: String,
}

/// Lower filter bound for values `>= seconds`: rounded to 0.01 s for
/// continuous kinds, otherwise the first calendar value not before it.
pub fn lower_bound(kind: TemporalKind, seconds: f64) -> TemporalBound {
    bound(kind, seconds, true)
}

/// Upper filter bound for values `<= seconds`.
pub fn upper_bound(kind: TemporalKind, seconds: f64) -> TemporalBound {
    bound(kind, seconds, false)
}

fn bound(kind: TemporalKind, seconds: f64, lower: bool) -> TemporalBound {
    if kind.is_continuous() {
        let text = format!("{seconds:.2}");
        let centis = centiseconds(&text);
        let value = centis as f64 / 100.0;
        let lexical = match kind {
            TemporalKind::Duration => duration_lexical(centis),
            TemporalKind::Time => {
                let clamped = centis.clamp(0, 86_400 * 100 - 1);
                let secs = clamped.div_euclid(100);
                format!(
                    "{:02}:{:02}:{:02}.{:02}",
                    secs / 3600,
                    secs % 3600 / 60,
                    secs % 60,
                    clamped.rem_euclid(100)
                )
            }
            _ => datetime_lexical(centis),
        };
        return TemporalBound {
            seconds: value,
            lexical,
        };
    }
    let (value, lexical) = calendar_point(kind, seconds, lower);
    TemporalBound {
        seconds: value,
        lexical,
    }
}

/// Parses a `{:.2}`-formatted decimal into exact hundredths.
fn centiseconds(text: &str) -> i64 {
    let negative = text.starts_with('-');
    let digits: String = text.chars().filter(|c| c.is_ascii_digit()).collect();
    let magnitude: i64 = digits.parse().unwrap_or(0);
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn datetime_lexical(centis: i64) -> String {
    let secs = centis.div_euclid(100);
    let frac = centis.rem_euclid(100);
    match Utc.timestamp_opt(secs, 0).single() {
        Some(dt) => format!("{}.{frac:02}Z", dt.format("%Y-%m-%dT%H:%M:%S")),
        None => format!("{secs}.{frac:02}"),
    }
}

fn duration_lexical(centis: i64) -> String {
    let sign = if centis < 0 { "-" } else { "" };
    let abs = centis.unsigned_abs();
    format!("{sign}PT{}.{:02}S", abs / 100, abs % 100)
}

fn calendar_point(kind: TemporalKind, seconds: f64, lower: bool) -> (f64, String) {
    let days = seconds / DAY;
    let day = if lower { days.ceil() } else { days.floor() };
    let clamp_days = day.clamp(-2_000_000.0, 2_000_000.0) as i64;
    let date = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap() + chrono::Duration::days(clamp_days);
    let (point, lexical) = match kind {
        TemporalKind::Date => (date, date.format("%Y-%m-%d").to_string()),
        TemporalKind::GYear => {
            let start = NaiveDate::from_ymd_opt(date.year(), 1, 1).unwrap();
            let year = if lower && start < date { date.year() + 1 } else { date.year() };
            let p = NaiveDate::from_ymd_opt(year, 1, 1).unwrap();
            (p, format_year(year))
        }
        TemporalKind::GYearMonth => {
            let start = NaiveDate::from_ymd_opt(date.year(), date.month(), 1).unwrap();
            let p = if lower && start < date {
                start.checked_add_months(chrono::Months::new(1)).unwrap()
            } else {
                start
            };
            (p, format!("{}-{:02}", format_year(p.year()), p.month()))
        }
        TemporalKind::GMonthDay | TemporalKind::GMonth | TemporalKind::GDay => {
            let first = NaiveDate::from_ymd_opt(ANCHOR_YEAR, 1, 1).unwrap();
            let last = NaiveDate::from_ymd_opt(ANCHOR_YEAR, 12, 31).unwrap();
            let d = date.clamp(first, last);
            let p = match kind {
                TemporalKind::GMonthDay => d,
                TemporalKind::GMonth => {
                    let start = NaiveDate::from_ymd_opt(ANCHOR_YEAR, d.month(), 1).unwrap();
                    if lower && start < d && d.month() < 12 {
                        NaiveDate::from_ymd_opt(ANCHOR_YEAR, d.month() + 1, 1).unwrap()
                    } else {
                        start
                    }
                }
                _ => {
                    let day = if d.month() > 1 { 31 } else { d.day() };
                    NaiveDate::from_ymd_opt(ANCHOR_YEAR, 1, day).unwrap()
                }
            };
            let lexical = match kind {
                TemporalKind::GMonthDay => format!("--{:02}-{:02}", p.month(), p.day()),
                TemporalKind::GMonth => format!("--{:02}", p.month()),
                _ => format!("---{:02}", p.day()),
            };
            (p, lexical)
        }
        _ => unreachable!("continuous kinds handled by caller"),
    };
    (day_seconds(point), lexical)
}

fn format_year(year: i32) -> String {
    if year < 0 {
        format!("-{:04}", -year)
    } else {
        format!("{year:04}")
    }
}
