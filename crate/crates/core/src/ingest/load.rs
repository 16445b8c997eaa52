use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};

use serde::Deserialize;

use crate::error::{Error, Result};

use super::{Post, SalesObservation};

/// Wire format of a posts file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostFormat {
    Csv,
    Jsonl,
}

impl PostFormat {
    /// Pick a format from a file extension, defaulting to CSV.
    pub fn from_path(path: &std::path::Path) -> PostFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") | Some("json") => PostFormat::Jsonl,
            _ => PostFormat::Csv,
        }
    }
}

#[derive(Debug, Deserialize)]
struct PostRow {
    post_id: String,
    topic_id: String,
    author: String,
    timestamp: i64,
    #[serde(default)]
    ordinal: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct SalesRow {
    user: String,
    observed_at: i64,
    cumulative_sales: u64,
}

/// Load posts from a byte stream.
///
/// Returns posts sorted by `(topic_id, timestamp, post_id)`. When the input
/// carries no ordinals they are assigned from that order within each topic;
/// when it does, the ordinals are validated as a contiguous `0..n-1` run per
/// topic consistent with nondecreasing timestamps.
pub fn load_posts<R: Read>(source: R, format: PostFormat) -> Result<Vec<Post>> {
    let rows = match format {
        PostFormat::Csv => read_post_rows_csv(source)?,
        PostFormat::Jsonl => read_post_rows_jsonl(source)?,
    };
    assemble_posts(rows)
}

fn read_post_rows_csv<R: Read>(source: R) -> Result<Vec<PostRow>> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(source);
    let mut rows = Vec::new();
    for (idx, rec) in reader.deserialize::<PostRow>().enumerate() {
        let row = rec.map_err(|e| malformed(idx as u64 + 2, &e))?;
        rows.push(row);
    }
    Ok(rows)
}

fn read_post_rows_jsonl<R: Read>(source: R) -> Result<Vec<PostRow>> {
    let reader = BufReader::new(source);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: PostRow = serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
            row: idx as u64 + 1,
            reason: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

fn malformed(row: u64, err: &csv::Error) -> Error {
    let row = match err.position() {
        Some(pos) => pos.line(),
        None => row,
    };
    Error::MalformedRow {
        row,
        reason: err.to_string(),
    }
}

fn assemble_posts(rows: Vec<PostRow>) -> Result<Vec<Post>> {
    let mut seen = HashSet::with_capacity(rows.len());
    for row in &rows {
        if !seen.insert(row.post_id.as_str()) {
            return Err(Error::DuplicatePostId(row.post_id.clone()));
        }
    }
    let with_ordinals = rows.iter().filter(|r| r.ordinal.is_some()).count();
    if with_ordinals != 0 && with_ordinals != rows.len() {
        return Err(Error::InvalidParameter(
            "ordinal column must be present on all rows or none".into(),
        ));
    }

    let mut posts: Vec<Post> = rows
        .into_iter()
        .map(|r| Post {
            post_id: r.post_id,
            topic_id: r.topic_id,
            author: r.author,
            timestamp: r.timestamp,
            ordinal: r.ordinal.unwrap_or(0),
        })
        .collect();

    if with_ordinals == 0 {
        posts.sort_by(|a, b| {
            (a.topic_id.as_str(), a.timestamp, a.post_id.as_str())
                .cmp(&(b.topic_id.as_str(), b.timestamp, b.post_id.as_str()))
        });
        let mut i = 0;
        while i < posts.len() {
            let mut j = i + 1;
            while j < posts.len() && posts[j].topic_id == posts[i].topic_id {
                j += 1;
            }
            for (k, p) in posts[i..j].iter_mut().enumerate() {
                p.ordinal = k as u32;
            }
            i = j;
        }
    } else {
        posts.sort_by(|a, b| {
            (a.topic_id.as_str(), a.ordinal).cmp(&(b.topic_id.as_str(), b.ordinal))
        });
        validate_ordinals(&posts)?;
    }
    Ok(posts)
}

fn validate_ordinals(posts: &[Post]) -> Result<()> {
    let mut i = 0;
    while i < posts.len() {
        let topic = posts[i].topic_id.as_str();
        let mut j = i;
        while j < posts.len() && posts[j].topic_id == topic {
            j += 1;
        }
        let slice = &posts[i..j];
        for (k, p) in slice.iter().enumerate() {
            if p.ordinal as usize != k {
                return Err(Error::BadOrdinals {
                    topic: topic.to_string(),
                    reason: format!("expected ordinal {k}, found {}", p.ordinal),
                });
            }
            if k > 0 && p.timestamp < slice[k - 1].timestamp {
                return Err(Error::BadOrdinals {
                    topic: topic.to_string(),
                    reason: format!(
                        "timestamps decrease along ordinals at position {k}"
                    ),
                });
            }
        }
        i = j;
    }
    Ok(())
}

/// Load sales observations, grouped per user and sorted by time.
///
/// Validates that each user's cumulative total is nondecreasing and that
/// observation times are strictly increasing.
pub fn load_sales<R: Read>(source: R) -> Result<Vec<SalesObservation>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let mut obs = Vec::new();
    for (idx, rec) in reader.deserialize::<SalesRow>().enumerate() {
        let row = rec.map_err(|e| malformed(idx as u64 + 2, &e))?;
        obs.push(SalesObservation {
            user: row.user,
            observed_at: row.observed_at,
            cumulative_sales: row.cumulative_sales,
        });
    }
    obs.sort_by(|a, b| (a.user.as_str(), a.observed_at).cmp(&(b.user.as_str(), b.observed_at)));
    for pair in obs.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.user != b.user {
            continue;
        }
        if b.observed_at == a.observed_at {
            return Err(Error::DuplicateObservation {
                user: a.user.clone(),
                at: a.observed_at,
            });
        }
        if b.cumulative_sales < a.cumulative_sales {
            return Err(Error::SalesNotMonotone {
                user: a.user.clone(),
                prev_at: a.observed_at,
                prev: a.cumulative_sales,
                next_at: b.observed_at,
                next: b.cumulative_sales,
            });
        }
    }
    Ok(obs)
}

/// Write posts in the canonical CSV layout (with ordinals).
pub fn write_posts_csv<W: Write>(posts: &[Post], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["post_id", "topic_id", "author", "timestamp", "ordinal"])?;
    for p in posts {
        w.write_record([
            p.post_id.as_str(),
            p.topic_id.as_str(),
            p.author.as_str(),
            &p.timestamp.to_string(),
            &p.ordinal.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write sales observations in the canonical CSV layout.
pub fn write_sales_csv<W: Write>(obs: &[SalesObservation], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["user", "observed_at", "cumulative_sales"])?;
    for o in obs {
        w.write_record([
            o.user.as_str(),
            &o.observed_at.to_string(),
            &o.cumulative_sales.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
