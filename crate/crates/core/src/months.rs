//! Calendar-month cutoffs and duration parsing.
//!
//! A snapshot cutoff is the first second of the month *after* the snapshot
//! month: posts belong to a snapshot iff `timestamp < cutoff.instant()`.

use chrono::{Datelike, NaiveDate, TimeZone, Utc};

use crate::error::{Error, Result};

/// Seconds in the fixed-length "month" used for durations (30 days).
pub const MONTH_SECS: i64 = 30 * 86_400;
pub const DAY_SECS: i64 = 86_400;

/// End-of-month snapshot boundary (exclusive upper bound on post timestamps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cutoff {
    year: i32,
    month: u32,
    instant: i64,
}

impl Cutoff {
    /// Cutoff for snapshot month `year`-`month` (1-based month).
    pub fn for_month(year: i32, month: u32) -> Result<Cutoff> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidParameter(format!(
                "month {month} out of range 1..=12"
            )));
        }
        let (ny, nm) = if month == 12 {
            (year + 1, 1)
        } else {
            (year, month + 1)
        };
        let date = NaiveDate::from_ymd_opt(ny, nm, 1)
            .ok_or_else(|| Error::InvalidParameter(format!("invalid month {year}-{month:02}")))?;
        let instant = Utc
            .from_utc_datetime(&date.and_hms_opt(0, 0, 0).unwrap())
            .timestamp();
        Ok(Cutoff {
            year,
            month,
            instant,
        })
    }

    /// Cutoff of the calendar month containing `ts`.
    pub fn containing(ts: i64) -> Cutoff {
        let dt = Utc.timestamp_opt(ts, 0).unwrap();
        Cutoff::for_month(dt.year(), dt.month()).expect("valid month from timestamp")
    }

    /// First second of the following month; posts at or after this instant
    /// belong to later snapshots.
    pub fn instant(&self) -> i64 {
        self.instant
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        self.month
    }

    /// Snapshot month label, e.g. `2014-09`.
    pub fn label(&self) -> String {
        format!("{:04}-{:02}", self.year, self.month)
    }

    pub fn next(&self) -> Cutoff {
        let (y, m) = if self.month == 12 {
            (self.year + 1, 1)
        } else {
            (self.year, self.month + 1)
        };
        Cutoff::for_month(y, m).expect("valid successor month")
    }
}

/// Parse a `YYYY-MM` month label.
pub fn parse_month(s: &str) -> Result<(i32, u32)> {
    let bad = || Error::InvalidParameter(format!("expected YYYY-MM, got `{s}`"));
    let (y, m) = s.split_once('-').ok_or_else(bad)?;
    let year: i32 = y.parse().map_err(|_| bad())?;
    let month: u32 = m.parse().map_err(|_| bad())?;
    Cutoff::for_month(year, month)?;
    Ok((year, month))
}

/// Inclusive range of monthly cutoffs from `start` to `end`.
pub fn month_range(start: (i32, u32), end: (i32, u32)) -> Result<Vec<Cutoff>> {
    let first = Cutoff::for_month(start.0, start.1)?;
    let last = Cutoff::for_month(end.0, end.1)?;
    if last < first {
        return Err(Error::InvalidParameter(format!(
            "month range end {} precedes start {}",
            last.label(),
            first.label()
        )));
    }
    let mut out = Vec::new();
    let mut cur = first;
    while cur <= last {
        out.push(cur);
        cur = cur.next();
    }
    Ok(out)
}

/// Parse `YYYY-MM..YYYY-MM` (inclusive) into a cutoff list.
pub fn parse_month_range(s: &str) -> Result<Vec<Cutoff>> {
    let (a, b) = s.split_once("..").ok_or_else(|| {
        Error::InvalidParameter(format!("expected YYYY-MM..YYYY-MM, got `{s}`"))
    })?;
    month_range(parse_month(a.trim())?, parse_month(b.trim())?)
}

/// Parse a duration into seconds.
///
/// Accepts a bare second count or a value with one of the suffixes
/// `s`, `min`, `h`, `d`, `w`, `month`/`months`/`mo` (a month is 30 days).
pub fn parse_duration_secs(s: &str) -> Result<i64> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse duration `{s}`"));
    let split = s.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(s.len());
    let (num, suffix) = s.split_at(split);
    let value: f64 = num.parse().map_err(|_| bad())?;
    let unit: i64 = match suffix.trim() {
        "" | "s" | "sec" | "secs" => 1,
        "min" => 60,
        "h" | "hour" | "hours" => 3_600,
        "d" | "day" | "days" => DAY_SECS,
        "w" | "week" | "weeks" => 7 * DAY_SECS,
        "mo" | "month" | "months" => MONTH_SECS,
        _ => return Err(bad()),
    };
    let secs = (value * unit as f64).round() as i64;
    if secs < 0 {
        return Err(bad());
    }
    Ok(secs)
}

/// Render a second count back into the most compact suffix form accepted by
/// [`parse_duration_secs`].
pub fn format_duration_secs(secs: i64) -> String {
    if secs > 0 && secs % MONTH_SECS == 0 {
        format!("{}month", secs / MONTH_SECS)
    } else if secs > 0 && secs % DAY_SECS == 0 {
        format!("{}d", secs / DAY_SECS)
    } else if secs > 0 && secs % 3_600 == 0 {
        format!("{}h", secs / 3_600)
    } else {
        format!("{secs}s")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_first_second_of_next_month() {
        let c = Cutoff::for_month(2014, 1).unwrap();
        // 2014-02-01T00:00:00Z
        assert_eq!(c.instant(), 1_391_212_800);
        assert_eq!(c.label(), "2014-01");
        let dec = Cutoff::for_month(2014, 12).unwrap();
        assert_eq!(dec.next().label(), "2015-01");
    }

    #[test]
    fn evolution_span_has_fifteen_months() {
        let months = parse_month_range("2014-01..2015-03").unwrap();
        assert_eq!(months.len(), 15);
        assert_eq!(months[0].label(), "2014-01");
        assert_eq!(months[14].label(), "2015-03");
    }

    #[test]
    fn containing_boundary_is_exclusive() {
        let jan = Cutoff::for_month(2014, 1).unwrap();
        // the cutoff instant itself belongs to the following month
        assert_eq!(Cutoff::containing(jan.instant()).label(), "2014-02");
        assert_eq!(Cutoff::containing(jan.instant() - 1).label(), "2014-01");
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration_secs("7d").unwrap(), 604_800);
        assert_eq!(parse_duration_secs("1month").unwrap(), 2_592_000);
        assert_eq!(parse_duration_secs("3600").unwrap(), 3_600);
        assert_eq!(parse_duration_secs("12h").unwrap(), 43_200);
        assert_eq!(parse_duration_secs("1.5d").unwrap(), 129_600);
        assert!(parse_duration_secs("7parsecs").is_err());
        assert_eq!(format_duration_secs(604_800), "7d");
        assert_eq!(format_duration_secs(2_592_000), "1month");
    }
}
