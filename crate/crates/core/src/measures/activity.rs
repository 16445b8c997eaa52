//! Activity indicators computed straight from post metadata.

use crate::ingest::Corpus;
use crate::months::Cutoff;

use super::{Measure, ScoreTable};

/// Number of posts a user has placed before the cutoff.
pub fn post_activity(corpus: &Corpus, cutoff: Cutoff) -> ScoreTable {
    let entries = corpus
        .active_users(cutoff)
        .into_iter()
        .map(|u| (u, corpus.post_count_at(u, cutoff) as f64))
        .collect();
    ScoreTable::new(cutoff, Measure::PostActivity, entries)
}

/// Number of topics whose initial post the user placed before the cutoff.
pub fn topics_started(corpus: &Corpus, cutoff: Cutoff) -> ScoreTable {
    let mut counts = vec![0u64; corpus.n_users()];
    for (_, posts) in corpus.topics() {
        let first = &posts[0];
        if first.timestamp < cutoff.instant() {
            counts[first.author.index()] += 1;
        }
    }
    let entries = corpus
        .active_users(cutoff)
        .into_iter()
        .map(|u| (u, counts[u.index()] as f64))
        .collect();
    ScoreTable::new(cutoff, Measure::TopicsStarted, entries)
}

/// Total responses across all topics a user started: every non-initial post
/// before the cutoff counts, whoever wrote it (the starter's own follow-ups
/// included).
pub fn topic_engagement(corpus: &Corpus, cutoff: Cutoff) -> ScoreTable {
    let mut responses = vec![0u64; corpus.n_users()];
    for (_, posts) in corpus.topics() {
        let k = posts.partition_point(|p| p.timestamp < cutoff.instant());
        if k >= 1 {
            responses[posts[0].author.index()] += (k - 1) as u64;
        }
    }
    let entries = corpus
        .active_users(cutoff)
        .into_iter()
        .map(|u| (u, responses[u.index()] as f64))
        .collect();
    ScoreTable::new(cutoff, Measure::TopicEngagement, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{load_posts, load_sales, PostFormat};

    fn corpus(posts_csv: &str) -> Corpus {
        let posts = load_posts(posts_csv.as_bytes(), PostFormat::Csv).unwrap();
        let sales = load_sales("user,observed_at,cumulative_sales\n".as_bytes()).unwrap();
        Corpus::new(posts, sales).unwrap()
    }

    fn score_of(t: &ScoreTable, c: &Corpus, name: &str) -> f64 {
        t.get(c.user_id(name).unwrap()).unwrap()
    }

    #[test]
    fn post_activity_counts_only_before_cutoff() {
        // u has 3 posts in January 1970 and 2 in February
        let day = 86_400;
        let posts = format!(
            "post_id,topic_id,author,timestamp\n\
             p1,t1,u,{}\np2,t1,u,{}\np3,t1,u,{}\np4,t1,u,{}\np5,t1,u,{}\n",
            day,
            2 * day,
            3 * day,
            32 * day,
            33 * day
        );
        let c = corpus(&posts);
        let jan = Cutoff::for_month(1970, 1).unwrap();
        let feb = Cutoff::for_month(1970, 2).unwrap();
        assert_eq!(score_of(&post_activity(&c, jan), &c, "u"), 3.0);
        assert_eq!(score_of(&post_activity(&c, feb), &c, "u"), 5.0);
        // cumulative: a later month without posts keeps the count
        let mar = Cutoff::for_month(1970, 3).unwrap();
        assert_eq!(score_of(&post_activity(&c, mar), &c, "u"), 5.0);
    }

    #[test]
    fn post_activity_matches_hand_tally() {
        let posts = "post_id,topic_id,author,timestamp\n\
                     p1,t1,a,100\np2,t1,b,200\np3,t1,a,300\n\
                     p4,t2,c,400\np5,t2,d,500\np6,t3,e,600\np7,t3,a,700\n";
        let c = corpus(posts);
        let cut = Cutoff::for_month(1970, 1).unwrap();
        let t = post_activity(&c, cut);
        // hand tally: a=3, b=1, c=1, d=1, e=1
        for (name, n) in [("a", 3.0), ("b", 1.0), ("c", 1.0), ("d", 1.0), ("e", 1.0)] {
            assert_eq!(score_of(&t, &c, name), n);
        }
    }

    #[test]
    fn topics_started_ignores_replies_and_late_topics() {
        let feb_ts = 32 * 86_400;
        let posts = format!(
            "post_id,topic_id,author,timestamp\n\
             p1,t1,u,100\np2,t2,u,200\n\
             p3,t3,v,300\np4,t3,u,400\np5,t4,v,500\np6,t5,v,600\n\
             p7,t6,v,700\np8,t7,v,800\np9,t8,v,900\n\
             p10,t9,u,{feb_ts}\n"
        );
        let c = corpus(&posts);
        let jan = Cutoff::for_month(1970, 1).unwrap();
        let t = topics_started(&c, jan);
        // u starts t1, t2 and replies elsewhere; t9 starts after the cutoff
        assert_eq!(score_of(&t, &c, "u"), 2.0);
        assert_eq!(score_of(&t, &c, "v"), 6.0);
    }

    #[test]
    fn topic_engagement_counts_non_initial_posts() {
        // u starts one topic with 5 posts total -> 4 responses,
        // including u's own follow-up
        let posts = "post_id,topic_id,author,timestamp\n\
                     p1,t1,u,100\np2,t1,a,200\np3,t1,b,300\np4,t1,u,400\np5,t1,c,500\n";
        let c = corpus(posts);
        let cut = Cutoff::for_month(1970, 1).unwrap();
        assert_eq!(score_of(&topic_engagement(&c, cut), &c, "u"), 4.0);
    }

    #[test]
    fn topic_engagement_sums_over_started_topics() {
        // u starts topics with 3 and 1 posts: (3-1) + (1-1) = 2
        let posts = "post_id,topic_id,author,timestamp\n\
                     p1,t1,u,100\np2,t1,a,200\np3,t1,b,300\n\
                     p4,t2,u,400\n";
        let c = corpus(posts);
        let cut = Cutoff::for_month(1970, 1).unwrap();
        let t = topic_engagement(&c, cut);
        assert_eq!(score_of(&t, &c, "u"), 2.0);
        // a and b started nothing
        assert_eq!(score_of(&t, &c, "a"), 0.0);
        assert_eq!(score_of(&t, &c, "b"), 0.0);
    }
}
