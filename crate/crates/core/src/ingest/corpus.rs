use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::months::{month_range, Cutoff};

use super::{Post, SalesObservation};

/// Interned user identifier.
///
/// Ids are assigned in ascending lexicographic order of the user name, so
/// ordering `UserId`s orders the underlying names. All deterministic
/// tiebreaks downstream rely on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId(pub u32);

impl UserId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Current and remaining sales for one vendor at a cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SalesAtCutoff {
    pub user: UserId,
    pub current: f64,
    pub future: f64,
}

/// A post with its author resolved to an interned id.
#[derive(Debug, Clone)]
pub struct CorpusPost {
    pub author: UserId,
    pub timestamp: i64,
    pub ordinal: u32,
}

#[derive(Debug, Clone)]
struct Topic {
    id: String,
    /// Range into `Corpus::posts`, in ordinal order.
    start: usize,
    end: usize,
}

#[derive(Debug, Clone, Default)]
struct SalesTimeline {
    /// (observed_at, cumulative_sales), strictly increasing times.
    obs: Vec<(i64, u64)>,
}

/// Immutable indexed view over a loaded forum corpus.
///
/// Construction validates everything once; afterwards the corpus is safe to
/// share across threads for read-only analysis.
#[derive(Debug, Clone)]
pub struct Corpus {
    names: Vec<String>,
    ids: HashMap<String, UserId>,
    posts: Vec<CorpusPost>,
    topics: Vec<Topic>,
    /// Per user: sorted post timestamps.
    post_times: Vec<Vec<i64>>,
    sales: Vec<Option<SalesTimeline>>,
    source_posts: Vec<Post>,
}

impl Corpus {
    pub fn new(mut posts: Vec<Post>, sales: Vec<SalesObservation>) -> Result<Corpus> {
        let mut seen = std::collections::HashSet::with_capacity(posts.len());
        for p in &posts {
            if !seen.insert(p.post_id.as_str()) {
                return Err(Error::DuplicatePostId(p.post_id.clone()));
            }
        }
        drop(seen);
        posts.sort_by(|a, b| {
            (a.topic_id.as_str(), a.ordinal).cmp(&(b.topic_id.as_str(), b.ordinal))
        });

        let mut names: Vec<String> = posts
            .iter()
            .map(|p| p.author.clone())
            .chain(sales.iter().map(|s| s.user.clone()))
            .collect();
        names.sort();
        names.dedup();
        let ids: HashMap<String, UserId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), UserId(i as u32)))
            .collect();

        let mut corpus_posts = Vec::with_capacity(posts.len());
        let mut topics = Vec::new();
        let mut post_times: Vec<Vec<i64>> = vec![Vec::new(); names.len()];
        let mut i = 0;
        while i < posts.len() {
            let mut j = i + 1;
            while j < posts.len() && posts[j].topic_id == posts[i].topic_id {
                j += 1;
            }
            topics.push(Topic {
                id: posts[i].topic_id.clone(),
                start: i,
                end: j,
            });
            i = j;
        }
        for p in &posts {
            let author = ids[&p.author];
            post_times[author.index()].push(p.timestamp);
            corpus_posts.push(CorpusPost {
                author,
                timestamp: p.timestamp,
                ordinal: p.ordinal,
            });
        }
        for times in &mut post_times {
            times.sort_unstable();
        }

        let mut timelines: Vec<Option<SalesTimeline>> = vec![None; names.len()];
        for o in &sales {
            let id = ids[&o.user];
            timelines[id.index()]
                .get_or_insert_with(SalesTimeline::default)
                .obs
                .push((o.observed_at, o.cumulative_sales));
        }
        for (idx, tl) in timelines.iter_mut().enumerate() {
            let Some(tl) = tl else { continue };
            tl.obs.sort_unstable();
            for pair in tl.obs.windows(2) {
                if pair[1].0 == pair[0].0 {
                    return Err(Error::DuplicateObservation {
                        user: names[idx].clone(),
                        at: pair[0].0,
                    });
                }
                if pair[1].1 < pair[0].1 {
                    return Err(Error::SalesNotMonotone {
                        user: names[idx].clone(),
                        prev_at: pair[0].0,
                        prev: pair[0].1,
                        next_at: pair[1].0,
                        next: pair[1].1,
                    });
                }
            }
        }

        Ok(Corpus {
            names,
            ids,
            posts: corpus_posts,
            topics,
            post_times,
            sales: timelines,
            source_posts: posts,
        })
    }

    pub fn n_users(&self) -> usize {
        self.names.len()
    }

    pub fn user_name(&self, id: UserId) -> &str {
        &self.names[id.index()]
    }

    pub fn user_id(&self, name: &str) -> Option<UserId> {
        self.ids.get(name).copied()
    }

    /// All user names in id (lexicographic) order.
    pub fn user_names(&self) -> &[String] {
        &self.names
    }

    /// The loaded posts in canonical `(topic_id, ordinal)` order.
    pub fn source_posts(&self) -> &[Post] {
        &self.source_posts
    }

    pub fn n_posts(&self) -> usize {
        self.posts.len()
    }

    /// Iterate topics as `(topic_id, posts-in-ordinal-order)`.
    pub fn topics(&self) -> impl Iterator<Item = (&str, &[CorpusPost])> {
        self.topics
            .iter()
            .map(move |t| (t.id.as_str(), &self.posts[t.start..t.end]))
    }

    pub fn first_post_time(&self, user: UserId) -> Option<i64> {
        self.post_times[user.index()].first().copied()
    }

    pub fn is_active(&self, user: UserId, cutoff: Cutoff) -> bool {
        self.first_post_time(user)
            .is_some_and(|t| t < cutoff.instant())
    }

    /// Users with at least one post strictly before the cutoff instant, in
    /// ascending id order.
    pub fn active_users(&self, cutoff: Cutoff) -> Vec<UserId> {
        (0..self.n_users() as u32)
            .map(UserId)
            .filter(|&u| self.is_active(u, cutoff))
            .collect()
    }

    /// Number of posts by `user` before the cutoff.
    pub fn post_count_at(&self, user: UserId, cutoff: Cutoff) -> u64 {
        let times = &self.post_times[user.index()];
        times.partition_point(|&t| t < cutoff.instant()) as u64
    }

    /// Whether the user ever records a positive sales total. Users with
    /// observations but an all-zero timeline count as non-vendors.
    pub fn is_vendor(&self, user: UserId) -> bool {
        self.final_sales_total(user).unwrap_or(0) > 0
    }

    pub fn has_sales_observations(&self, user: UserId) -> bool {
        self.sales[user.index()].is_some()
    }

    pub fn final_sales_total(&self, user: UserId) -> Option<u64> {
        self.sales[user.index()]
            .as_ref()
            .and_then(|tl| tl.obs.last())
            .map(|&(_, v)| v)
    }

    /// Interpolated cumulative sales at the cutoff instant.
    ///
    /// Between observations the value follows the average daily growth of the
    /// bracketing pair. After the last observation the final total holds.
    /// Before the first observation the series is anchored at zero sales at
    /// the user's first appearance (first post, or first observation if that
    /// is earlier).
    pub fn current_sales_at(&self, user: UserId, cutoff: Cutoff) -> Result<f64> {
        let tl = self.sales[user.index()]
            .as_ref()
            .ok_or_else(|| Error::NotAVendor(self.user_name(user).to_string()))?;
        let t = cutoff.instant();
        let obs = &tl.obs;
        let &(last_t, last_v) = obs.last().expect("timeline never empty");
        if t >= last_t {
            return Ok(last_v as f64);
        }
        let idx = obs.partition_point(|&(ot, _)| ot <= t);
        let (next_t, next_v) = obs[idx];
        let (prev_t, prev_v) = if idx > 0 {
            obs[idx - 1]
        } else {
            let anchor = match self.first_post_time(user) {
                Some(fp) => fp.min(next_t),
                None => next_t,
            };
            if t <= anchor {
                return Ok(0.0);
            }
            (anchor, 0)
        };
        Ok(lerp(prev_t, prev_v as f64, next_t, next_v as f64, t))
    }

    /// Final observed total minus current sales, clamped at zero.
    pub fn future_sales_at(&self, user: UserId, cutoff: Cutoff) -> Result<f64> {
        let current = self.current_sales_at(user, cutoff)?;
        let total = self.final_sales_total(user).expect("checked by current") as f64;
        Ok((total - current).max(0.0))
    }

    pub fn sales_at_cutoff(&self, user: UserId, cutoff: Cutoff) -> Result<SalesAtCutoff> {
        Ok(SalesAtCutoff {
            user,
            current: self.current_sales_at(user, cutoff)?,
            future: self.future_sales_at(user, cutoff)?,
        })
    }

    /// Monthly cutoffs spanning the posts, first month through last.
    pub fn span_months(&self) -> Option<Vec<Cutoff>> {
        let first = self.posts.iter().map(|p| p.timestamp).min()?;
        let last = self.posts.iter().map(|p| p.timestamp).max()?;
        let a = Cutoff::containing(first);
        let b = Cutoff::containing(last);
        month_range((a.year(), a.month()), (b.year(), b.month())).ok()
    }
}

fn lerp(t0: i64, v0: f64, t1: i64, v1: f64, t: i64) -> f64 {
    let frac = (t - t0) as f64 / (t1 - t0) as f64;
    v0 + (v1 - v0) * frac
}
