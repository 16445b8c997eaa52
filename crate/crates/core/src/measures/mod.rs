//! Per-user scores: network centralities and forum activity indicators.

mod activity;
mod centrality;

pub use activity::{post_activity, topic_engagement, topics_started};
pub use centrality::{betweenness, harmonic_closeness, in_degree, pagerank, PagerankOptions};

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::extraction::CommGraph;
use crate::ingest::{Corpus, UserId};
use crate::months::Cutoff;
use crate::sigfmt::sig;

/// The measures reported by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    InDegree,
    HarmonicCloseness,
    Betweenness,
    Pagerank,
    PostActivity,
    TopicsStarted,
    TopicEngagement,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::InDegree,
        Measure::HarmonicCloseness,
        Measure::Betweenness,
        Measure::Pagerank,
        Measure::PostActivity,
        Measure::TopicsStarted,
        Measure::TopicEngagement,
    ];

    pub const CENTRALITIES: [Measure; 4] = [
        Measure::InDegree,
        Measure::HarmonicCloseness,
        Measure::Betweenness,
        Measure::Pagerank,
    ];

    pub const INDICATORS: [Measure; 3] = [
        Measure::PostActivity,
        Measure::TopicsStarted,
        Measure::TopicEngagement,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::InDegree => "in_degree",
            Measure::HarmonicCloseness => "harmonic_closeness",
            Measure::Betweenness => "betweenness",
            Measure::Pagerank => "pagerank",
            Measure::PostActivity => "post_activity",
            Measure::TopicsStarted => "topics_started",
            Measure::TopicEngagement => "topic_engagement",
        }
    }

    pub fn parse(name: &str) -> Result<Measure> {
        Measure::ALL
            .iter()
            .copied()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownMeasure {
                name: name.to_string(),
                valid: Measure::ALL
                    .iter()
                    .map(|m| m.name())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }

    /// Centralities need the snapshot graph; indicators only the corpus.
    pub fn is_centrality(&self) -> bool {
        matches!(
            self,
            Measure::InDegree
                | Measure::HarmonicCloseness
                | Measure::Betweenness
                | Measure::Pagerank
        )
    }

    /// Score file name for one cutoff, e.g. `betweenness-2014-09.csv`.
    pub fn file_name(&self, cutoff: Cutoff) -> String {
        format!("{}-{}.csv", self.name(), cutoff.label())
    }
}

/// Compute one measure for the snapshot at `graph.cutoff()`.
pub fn compute(
    measure: Measure,
    corpus: &Corpus,
    graph: &CommGraph,
    opts: &PagerankOptions,
) -> Result<ScoreTable> {
    let cutoff = graph.cutoff();
    Ok(match measure {
        Measure::InDegree => in_degree(graph),
        Measure::HarmonicCloseness => harmonic_closeness(graph),
        Measure::Betweenness => betweenness(graph),
        Measure::Pagerank => pagerank(graph, opts)?,
        Measure::PostActivity => post_activity(corpus, cutoff),
        Measure::TopicsStarted => topics_started(corpus, cutoff),
        Measure::TopicEngagement => topic_engagement(corpus, cutoff),
    })
}

/// Scores of one measure at one cutoff: exactly one finite entry per active
/// user, stored in ascending [`UserId`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    cutoff: Cutoff,
    measure: Measure,
    entries: Vec<(UserId, f64)>,
}

impl ScoreTable {
    pub fn new(cutoff: Cutoff, measure: Measure, entries: Vec<(UserId, f64)>) -> ScoreTable {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, s)| s.is_finite()));
        ScoreTable {
            cutoff,
            measure,
            entries,
        }
    }

    fn from_graph(graph: &CommGraph, measure: Measure, scores: Vec<f64>) -> ScoreTable {
        debug_assert_eq!(scores.len(), graph.n_nodes());
        // graph nodes are already in ascending user order
        let entries = graph
            .nodes()
            .iter()
            .copied()
            .zip(scores)
            .collect();
        ScoreTable::new(graph.cutoff(), measure, entries)
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(UserId, f64)] {
        &self.entries
    }

    pub fn get(&self, user: UserId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&user, |&(u, _)| u)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.entries.iter().map(|&(u, _)| u)
    }

    /// Entries sorted by descending score, ties broken by ascending user id.
    pub fn ranked(&self) -> Vec<(UserId, f64)> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        v
    }
}

/// Write `user,score` rows in user-name order, 12 significant digits.
pub fn write_scores_csv<W: Write>(table: &ScoreTable, corpus: &Corpus, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["user", "score"])?;
    for &(u, s) in table.entries() {
        w.write_record([corpus.user_name(u), &sig(s, 12)])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a score file back; rows must be sorted by user name.
pub fn read_scores_csv<R: Read>(
    source: R,
    corpus: &Corpus,
    cutoff: Cutoff,
    measure: Measure,
) -> Result<ScoreTable> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let mut entries = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let err = || Error::GraphMismatch("bad score row".into());
        let name = rec.get(0).ok_or_else(err)?;
        let u = corpus
            .user_id(name)
            .ok_or_else(|| Error::UnknownUser(name.to_string()))?;
        let s: f64 = rec.get(1).ok_or_else(err)?.parse().map_err(|_| err())?;
        entries.push((u, s));
    }
    if !entries.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::GraphMismatch(
            "score rows are not in ascending user order".into(),
        ));
    }
    Ok(ScoreTable::new(cutoff, measure, entries))
}
