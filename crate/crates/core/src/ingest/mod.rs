//! Forum post and vendor sales ingestion.
//!
//! Input contracts:
//! - posts: CSV with header `post_id,topic_id,author,timestamp,ordinal`
//!   (ordinal optional) or JSONL with the same keys; timestamps are integer
//!   epoch seconds UTC.
//! - sales: CSV with header `user,observed_at,cumulative_sales`.
//!
//! Both accept LF or CRLF line endings and must be UTF-8.

mod corpus;
mod load;

pub use corpus::{Corpus, SalesAtCutoff, UserId};
pub use load::{
    load_posts, load_sales, write_posts_csv, write_sales_csv, PostFormat,
};

/// One forum message.
///
/// `ordinal` is the 0-based position of the post within its topic, ordered by
/// timestamp with ties broken by ascending `post_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub post_id: String,
    pub topic_id: String,
    pub author: String,
    pub timestamp: i64,
    pub ordinal: u32,
}

/// A dated cumulative-sales reading for one vendor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SalesObservation {
    pub user: String,
    pub observed_at: i64,
    pub cumulative_sales: u64,
}
