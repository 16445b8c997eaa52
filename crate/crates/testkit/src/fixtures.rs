//! Hand-enumerated extraction fixtures.
//!
//! Every expected edge list was worked out on paper from the edge-formation
//! rules. Expected weights are written as explicit f64 expressions in the
//! exact order the extractor accumulates parallel contributions (topics in
//! id order, replying posts by ascending ordinal, regular partners by
//! ascending ordinal, then the initial-post edge), so comparisons are
//! bit-exact.

use forumrank_core::months::Cutoff;
use forumrank_core::ExtractionParams;

/// 2014-01-01T00:00:00Z
pub const T0: i64 = 1_388_534_400;
const HOUR: i64 = 3_600;
const DAY: i64 = 86_400;

pub struct ExtractionFixture {
    pub name: &'static str,
    /// (post_id, topic_id, author, timestamp)
    pub posts: Vec<(&'static str, &'static str, &'static str, i64)>,
    pub params: ExtractionParams,
    pub cutoff: Cutoff,
    /// (source, target, weight), any order; compared as a map.
    pub expected: Vec<(&'static str, &'static str, f64)>,
    pub expected_nodes: Vec<&'static str>,
}

/// Decay weight written out from the closed form.
fn d(gap_secs: f64) -> f64 {
    let t_lim = 7.0 * 86_400.0;
    if gap_secs >= t_lim {
        0.2
    } else {
        (0.2f64.ln() * (gap_secs / t_lim)).exp()
    }
}

fn jan() -> Cutoff {
    Cutoff::for_month(2014, 1).unwrap()
}

pub fn extraction_fixtures() -> Vec<ExtractionFixture> {
    let mut out = Vec::new();
    let p = ExtractionParams::default;

    // the canonical three-post topic
    out.push(ExtractionFixture {
        name: "three_post_topic",
        posts: vec![
            ("p1", "t1", "u1", T0),
            ("p2", "t1", "u2", T0 + HOUR),
            ("p3", "t1", "u3", T0 + 2 * HOUR),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![
            ("u2", "u1", 0.5),
            ("u3", "u1", 0.5),
            ("u3", "u2", d(3_600.0)),
        ],
        expected_nodes: vec!["u1", "u2", "u3"],
    });

    // alternating replies merge three parallel contributions in scan order
    out.push(ExtractionFixture {
        name: "alternating_pair_merges",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + HOUR),
            ("p3", "t1", "a", T0 + 2 * HOUR),
            ("p4", "t1", "b", T0 + 3 * HOUR),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![
            ("b", "a", 0.5 + d(3_600.0) + 0.5),
            ("a", "b", d(3_600.0)),
        ],
        expected_nodes: vec!["a", "b"],
    });

    // a reply placed beyond delta_t forms no regular edge, only the
    // initial-post link
    out.push(ExtractionFixture {
        name: "time_gap_exclusion",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + HOUR),
            ("p3", "t1", "c", T0 + HOUR + 30 * DAY + HOUR),
        ],
        params: ExtractionParams {
            delta_t: 30 * DAY,
            ..p()
        },
        cutoff: Cutoff::for_month(2014, 2).unwrap(),
        expected: vec![("b", "a", 0.5), ("c", "a", 0.5)],
        expected_nodes: vec!["a", "b", "c"],
    });

    // delta_o = 2 drops the pair three positions apart
    out.push(ExtractionFixture {
        name: "ordinal_distance_exclusion",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + HOUR),
            ("p3", "t1", "c", T0 + 2 * HOUR),
            ("p4", "t1", "d", T0 + 3 * HOUR),
            ("p5", "t1", "e", T0 + 4 * HOUR),
        ],
        params: ExtractionParams { delta_o: 2, ..p() },
        cutoff: jan(),
        expected: vec![
            ("b", "a", 0.5),
            ("c", "b", d(3_600.0)),
            ("c", "a", 0.5),
            ("d", "b", d(7_200.0)),
            ("d", "c", d(3_600.0)),
            ("d", "a", 0.5),
            ("e", "c", d(7_200.0)),
            ("e", "d", d(3_600.0)),
            ("e", "a", 0.5),
        ],
        expected_nodes: vec!["a", "b", "c", "d", "e"],
    });

    // the starter's own follow-up emits nothing; the reply to it merges its
    // regular edge with the initial-post edge
    out.push(ExtractionFixture {
        name: "starter_self_reply",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "a", T0 + HOUR),
            ("p3", "t1", "b", T0 + 2 * HOUR),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![("b", "a", d(3_600.0) + 0.5)],
        expected_nodes: vec!["a", "b"],
    });

    // gap of exactly delta_t qualifies (at the 0.2 floor); one second more
    // does not
    out.push(ExtractionFixture {
        name: "delta_t_boundary_inclusive",
        posts: vec![
            ("p1", "t1", "x", T0),
            ("p2", "t1", "a", T0 + HOUR),
            ("p3", "t1", "b", T0 + HOUR + 30 * DAY),
            ("p4", "t2", "y", T0),
            ("p5", "t2", "c", T0 + HOUR),
            ("p6", "t2", "e", T0 + HOUR + 30 * DAY + 1),
        ],
        params: ExtractionParams {
            delta_t: 30 * DAY,
            ..p()
        },
        cutoff: jan(),
        expected: vec![
            ("a", "x", 0.5),
            ("b", "x", 0.5),
            ("b", "a", 0.2),
            ("c", "y", 0.5),
            ("e", "y", 0.5),
        ],
        expected_nodes: vec!["a", "b", "c", "e", "x", "y"],
    });

    // equal timestamps: ordinals come from the post_id tiebreak, gap 0 gives
    // weight exactly 1
    out.push(ExtractionFixture {
        name: "equal_timestamps_tiebreak",
        posts: vec![
            ("q2", "t1", "b", T0),
            ("q1", "t1", "a", T0),
            ("q3", "t1", "c", T0),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![
            ("b", "a", 0.5),
            ("c", "b", 1.0),
            ("c", "a", 0.5),
        ],
        expected_nodes: vec!["a", "b", "c"],
    });

    // january cutoff keeps a prefix of the topic and an isolated active user
    out.push(ExtractionFixture {
        name: "cutoff_prefix_and_isolated_node",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + DAY),
            ("p3", "t1", "c", T0 + 31 * DAY), // 2014-02-01, outside January
            ("p4", "t2", "e", T0 + 4 * DAY),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![("b", "a", 0.5)],
        expected_nodes: vec!["a", "b", "e"],
    });

    // same fixture one month later: the february post joins, its gap to p2
    // is exactly 30 days (the floor region)
    out.push(ExtractionFixture {
        name: "cutoff_prefix_next_month",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + DAY),
            ("p3", "t1", "c", T0 + 31 * DAY),
            ("p4", "t2", "e", T0 + 4 * DAY),
        ],
        params: p(),
        cutoff: Cutoff::for_month(2014, 2).unwrap(),
        expected: vec![
            ("b", "a", 0.5),
            ("c", "b", 0.2),
            ("c", "a", 0.5),
        ],
        expected_nodes: vec!["a", "b", "c", "e"],
    });

    // two topics with the roles swapped produce opposite initial-post edges
    out.push(ExtractionFixture {
        name: "cross_topic_roles",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + HOUR),
            ("p3", "t2", "b", T0 + 2 * HOUR),
            ("p4", "t2", "a", T0 + 3 * HOUR),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![("b", "a", 0.5), ("a", "b", 0.5)],
        expected_nodes: vec!["a", "b"],
    });

    // wide-open limits: every non-initial pair forms a regular edge, so the
    // edge count is the hand-computed pair count
    out.push(ExtractionFixture {
        name: "wide_open_limits_pair_count",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + HOUR),
            ("p3", "t1", "c", T0 + 2 * HOUR),
            ("p4", "t1", "e", T0 + 3 * HOUR),
        ],
        params: ExtractionParams {
            delta_o: 100,
            delta_t: 1_000 * DAY,
            ..p()
        },
        cutoff: jan(),
        expected: vec![
            ("b", "a", 0.5),
            ("c", "b", d(3_600.0)),
            ("c", "a", 0.5),
            ("e", "b", d(7_200.0)),
            ("e", "c", d(3_600.0)),
            ("e", "a", 0.5),
        ],
        expected_nodes: vec!["a", "b", "c", "e"],
    });

    // initial-post edges are emitted once per responding post: three replies
    // by one user stack to exactly three omega_first
    out.push(ExtractionFixture {
        name: "per_post_initial_edges",
        posts: vec![
            ("p1", "t1", "a", T0),
            ("p2", "t1", "b", T0 + HOUR),
            ("p3", "t1", "b", T0 + 2 * HOUR),
            ("p4", "t1", "b", T0 + 3 * HOUR),
        ],
        params: p(),
        cutoff: jan(),
        expected: vec![("b", "a", 0.5 + 0.5 + 0.5)],
        expected_nodes: vec!["a", "b"],
    });

    out
}

impl ExtractionFixture {
    pub fn posts_csv(&self) -> String {
        let mut s = String::from("post_id,topic_id,author,timestamp\n");
        for (id, topic, author, ts) in &self.posts {
            s.push_str(&format!("{id},{topic},{author},{ts}\n"));
        }
        s
    }
}
