//! Seeded synthetic forum corpora with controllable vendor-success structure.
//!
//! Users carry a log-normal activity propensity; topics and replies arrive by
//! Poisson counts scaled by it, with log-normal reply delays so the edge
//! decay function is exercised across its range. Vendor sales growth is an
//! affine function of the engagement their topics receive plus seeded noise;
//! `sales_coupling = 0` severs that link entirely. Observations land at
//! irregular instants inside each month, never on the boundary.

use chrono::{NaiveDate, TimeZone, Utc};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Normal, Poisson};

use crate::error::{Error, Result};
use crate::ingest::{Post, SalesObservation};
use crate::months::Cutoff;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_users: u32,
    pub vendor_fraction: f64,
    pub months: u32,
    pub start_year: i32,
    pub start_month: u32,
    /// Mean topics started per user-month, scaled by user propensity.
    pub topic_start_rate: f64,
    /// Mean replies per topic, scaled by the starter's propensity.
    pub reply_rate: f64,
    /// Log-normal reply delay: mean in hours and shape parameter.
    pub reply_delay_mean_hours: f64,
    pub reply_delay_sigma: f64,
    /// Monthly sales growth per unit of topic engagement.
    pub sales_coupling: f64,
    /// Baseline monthly sales growth for every vendor.
    pub sales_base: f64,
    /// Standard deviation of the monthly sales noise.
    pub sales_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_users: 200,
            vendor_fraction: 0.25,
            months: 6,
            start_year: 2020,
            start_month: 1,
            topic_start_rate: 0.6,
            reply_rate: 3.0,
            reply_delay_mean_hours: 12.0,
            reply_delay_sigma: 1.0,
            sales_coupling: 1.0,
            sales_base: 2.0,
            sales_noise: 2.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_users == 0 || self.months == 0 {
            return fail("n_users and months must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.vendor_fraction) {
            return fail(format!(
                "vendor_fraction must be in [0, 1], got {}",
                self.vendor_fraction
            ));
        }
        for (name, v) in [
            ("topic_start_rate", self.topic_start_rate),
            ("reply_rate", self.reply_rate),
            ("reply_delay_mean_hours", self.reply_delay_mean_hours),
            ("reply_delay_sigma", self.reply_delay_sigma),
            ("sales_base", self.sales_base),
            ("sales_noise", self.sales_noise),
        ] {
            if v < 0.0 || !v.is_finite() {
                return fail(format!("{name} must be a nonnegative finite number, got {v}"));
            }
        }
        Cutoff::for_month(self.start_year, self.start_month)?;
        Ok(())
    }

    /// Cutoffs of the generated months, in order.
    pub fn cutoffs(&self) -> Vec<Cutoff> {
        let mut out = Vec::with_capacity(self.months as usize);
        let mut c = Cutoff::for_month(self.start_year, self.start_month).unwrap();
        for _ in 0..self.months {
            out.push(c);
            c = c.next();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub posts: Vec<Post>,
    pub sales: Vec<SalesObservation>,
}

struct TopicDraft {
    starter: usize,
    reply_times: Vec<i64>,
}

/// Generate a corpus; identical config and seed give identical output.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_users as usize;

    let propensity_dist = LogNormal::new(0.0, 0.7).expect("valid log-normal");
    let propensity: Vec<f64> = (0..n).map(|_| propensity_dist.sample(&mut rng)).collect();
    let author_pick = WeightedIndex::new(&propensity)
        .map_err(|e| Error::InvalidParameter(format!("propensity weights: {e}")))?;

    let n_vendors = (cfg.n_users as f64 * cfg.vendor_fraction).round() as usize;
    let mut shuffled: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        shuffled.swap(i, j);
    }
    let mut is_vendor = vec![false; n];
    for &i in shuffled.iter().take(n_vendors) {
        is_vendor[i] = true;
    }

    let cutoffs = cfg.cutoffs();
    let month_starts: Vec<i64> = {
        let first = Utc
            .from_utc_datetime(
                &NaiveDate::from_ymd_opt(cfg.start_year, cfg.start_month, 1)
                    .unwrap()
                    .and_hms_opt(0, 0, 0)
                    .unwrap(),
            )
            .timestamp();
        std::iter::once(first)
            .chain(cutoffs.iter().map(|c| c.instant()).take(cfg.months as usize - 1))
            .collect()
    };
    let global_end = cutoffs.last().unwrap().instant();

    let delay_secs = cfg.reply_delay_mean_hours * 3_600.0;
    let delay_dist = if delay_secs > 0.0 && cfg.reply_delay_sigma > 0.0 {
        let mu = delay_secs.ln() - cfg.reply_delay_sigma.powi(2) / 2.0;
        Some(LogNormal::new(mu, cfg.reply_delay_sigma).expect("valid log-normal"))
    } else {
        None
    };

    let mut drafts: Vec<TopicDraft> = Vec::new();
    for m in 0..cfg.months as usize {
        let (lo, hi) = (month_starts[m], cutoffs[m].instant());
        for (user, &lambda) in propensity.iter().enumerate() {
            let rate = cfg.topic_start_rate * lambda;
            for _ in 0..poisson_count(&mut rng, rate) {
                let t0 = rng.gen_range(lo..hi);
                let n_replies = poisson_count(&mut rng, cfg.reply_rate * lambda);
                let mut reply_times = Vec::with_capacity(n_replies as usize + 1);
                reply_times.push(t0);
                let mut t = t0;
                for _ in 0..n_replies {
                    let gap = match &delay_dist {
                        Some(d) => d.sample(&mut rng).round().max(1.0) as i64,
                        None => 1,
                    };
                    // clamp spill past the corpus end to the final second
                    t = (t + gap).min(global_end - 1);
                    reply_times.push(t);
                }
                drafts.push(TopicDraft {
                    starter: user,
                    reply_times,
                });
            }
        }
    }

    // materialize posts; reply authors drawn by propensity (self-replies allowed)
    let mut posts = Vec::new();
    let mut post_seq = 0u64;
    let mut engagement_inc = vec![vec![0u64; cfg.months as usize]; n];
    for (topic_idx, draft) in drafts.iter().enumerate() {
        let topic_id = format!("t{topic_idx:06}");
        for (ordinal, &ts) in draft.reply_times.iter().enumerate() {
            let author = if ordinal == 0 {
                draft.starter
            } else {
                let a = author_pick.sample(&mut rng);
                let month = month_index_of(&cutoffs, ts);
                engagement_inc[draft.starter][month] += 1;
                a
            };
            posts.push(Post {
                post_id: format!("p{post_seq:08}"),
                topic_id: topic_id.clone(),
                author: format!("user{author:05}"),
                timestamp: ts,
                ordinal: ordinal as u32,
            });
            post_seq += 1;
        }
    }

    // vendor sales: cumulative monthly increments, observed mid-month
    let noise_dist = if cfg.sales_noise > 0.0 {
        Some(Normal::new(0.0, cfg.sales_noise).expect("valid normal"))
    } else {
        None
    };
    let mut sales = Vec::new();
    for user in 0..n {
        if !is_vendor[user] {
            continue;
        }
        let mut cumulative = 0u64;
        for m in 0..cfg.months as usize {
            let noise = noise_dist.as_ref().map_or(0.0, |d| d.sample(&mut rng));
            let growth = cfg.sales_coupling * engagement_inc[user][m] as f64
                + cfg.sales_base
                + noise;
            cumulative += growth.max(0.0).round() as u64;
            let span = cutoffs[m].instant() - month_starts[m];
            let observed_at = month_starts[m] + rng.gen_range(span / 10..span - span / 10);
            sales.push(SalesObservation {
                user: format!("user{user:05}"),
                observed_at,
                cumulative_sales: cumulative,
            });
        }
    }

    Ok(SynthOutput { posts, sales })
}

fn poisson_count(rng: &mut ChaCha8Rng, rate: f64) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    Poisson::new(rate).expect("positive rate").sample(rng) as u64
}

fn month_index_of(cutoffs: &[Cutoff], ts: i64) -> usize {
    cutoffs
        .iter()
        .position(|c| ts < c.instant())
        .unwrap_or(cutoffs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Corpus;

    #[test]
    fn identical_seeds_reproduce_the_corpus() {
        let cfg = SynthConfig {
            n_users: 100,
            ..Default::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        let other = generate(&SynthConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn generated_corpus_passes_ingest_validation() {
        let out = generate(&SynthConfig::default()).unwrap();
        // round-trip through the writers and loaders
        let mut posts_csv = Vec::new();
        let mut sales_csv = Vec::new();
        crate::ingest::write_posts_csv(&out.posts, &mut posts_csv).unwrap();
        crate::ingest::write_sales_csv(&out.sales, &mut sales_csv).unwrap();
        let posts =
            crate::ingest::load_posts(posts_csv.as_slice(), crate::ingest::PostFormat::Csv)
                .unwrap();
        let sales = crate::ingest::load_sales(sales_csv.as_slice()).unwrap();
        let corpus = Corpus::new(posts, sales).unwrap();
        assert!(corpus.n_posts() > 0);
    }

    #[test]
    fn zero_reply_rate_leaves_single_post_topics() {
        let cfg = SynthConfig {
            reply_rate: 0.0,
            n_users: 50,
            months: 2,
            ..Default::default()
        };
        let out = generate(&cfg).unwrap();
        assert!(out.posts.iter().all(|p| p.ordinal == 0));
        let corpus = Corpus::new(out.posts, out.sales).unwrap();
        let g = crate::extraction::extract_snapshot(
            &corpus,
            &crate::extraction::ExtractionParams::default(),
            cfg.cutoffs()[1],
        )
        .unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn coupling_links_engagement_to_sales() {
        let cfg = SynthConfig {
            seed: 7,
            sales_coupling: 4.0,
            sales_base: 1.0,
            sales_noise: 1.0,
            ..Default::default()
        };
        let out = generate(&cfg).unwrap();
        let corpus = Corpus::new(out.posts, out.sales).unwrap();
        let last = *cfg.cutoffs().last().unwrap();
        let engagement = crate::measures::topic_engagement(&corpus, last);
        // Spearman rank correlation between engagement and current sales over
        // active vendors
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for u in corpus.active_users(last) {
            if corpus.is_vendor(u) {
                pairs.push((
                    engagement.get(u).unwrap(),
                    corpus.current_sales_at(u, last).unwrap(),
                ));
            }
        }
        let rho = spearman(&pairs);
        // seeded regression value, first recorded from this fixture
        assert!(rho > 0.5, "rank correlation {rho}");
    }

    fn ranks(values: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let mut out = vec![0.0; values.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j < idx.len() && values[idx[j]] == values[idx[i]] {
                j += 1;
            }
            let avg = (i + j - 1) as f64 / 2.0;
            for &k in &idx[i..j] {
                out[k] = avg;
            }
            i = j;
        }
        out
    }

    fn spearman(pairs: &[(f64, f64)]) -> f64 {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let rx = ranks(&xs);
        let ry = ranks(&ys);
        let n = pairs.len() as f64;
        let mean = (n - 1.0) / 2.0;
        let mut num = 0.0;
        let mut dx = 0.0;
        let mut dy = 0.0;
        for i in 0..pairs.len() {
            num += (rx[i] - mean) * (ry[i] - mean);
            dx += (rx[i] - mean).powi(2);
            dy += (ry[i] - mean).powi(2);
        }
        num / (dx * dy).sqrt()
    }
}
