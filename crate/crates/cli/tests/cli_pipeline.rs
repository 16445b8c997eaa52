//! End-to-end checks of the command-line interface, driving the built
//! binary over temporary directories.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forumrank"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn forumrank");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Three-month fixture: the canonical three-post topic in January 2014 plus
/// later activity, with one vendor.
fn write_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let t0 = 1_388_534_400i64; // 2014-01-01T00:00:00Z
    let feb = 1_391_212_800i64;
    let mar = 1_393_632_000i64;
    let posts = format!(
        "post_id,topic_id,author,timestamp\n\
         p1,t1,u1,{t0}\n\
         p2,t1,u2,{}\n\
         p3,t1,u3,{}\n\
         p4,t2,u2,{feb}\n\
         p5,t2,u4,{}\n\
         p6,t3,u1,{mar}\n",
        t0 + 3_600,
        t0 + 7_200,
        feb + 1_800,
    );
    let sales = format!(
        "user,observed_at,cumulative_sales\n\
         u1,{t0},5\n\
         u1,{mar},50\n"
    );
    let posts_path = dir.join("posts.csv");
    let sales_path = dir.join("sales.csv");
    std::fs::write(&posts_path, posts).unwrap();
    std::fs::write(&sales_path, sales).unwrap();
    (posts_path, sales_path)
}

fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn extract_writes_one_graph_per_month_and_is_idempotent() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let args = [
        "extract",
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ];
    run_ok(&args);
    let graphs: Vec<String> = std::fs::read_dir(out.join("graphs"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(graphs.len(), 3, "{graphs:?}");

    let before = tree_bytes(&out);
    run_ok(&args);
    assert_eq!(before, tree_bytes(&out), "rerun changed bytes");
}

#[test]
fn out_of_span_month_range_is_clipped_with_warning() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let output = run_ok(&[
        "extract",
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--months",
        "2013-10..2014-12",
    ]);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("clipped"), "stderr: {stderr}");
    let graphs = std::fs::read_dir(out.join("graphs")).unwrap().count();
    assert_eq!(graphs, 6, "3 months, csv + meta each");
}

#[test]
fn measure_subset_writes_one_file_per_month() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&[
        "measure",
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--measures",
        "betweenness",
    ]);
    let scores: Vec<String> = std::fs::read_dir(out.join("scores"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(scores.len(), 3, "{scores:?}");
    assert!(scores.iter().all(|n| n.starts_with("betweenness-")));
}

#[test]
fn default_measures_give_seven_files_per_month() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&[
        "measure",
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--months",
        "2014-01..2014-02",
    ]);
    let scores = std::fs::read_dir(out.join("scores"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .count();
    assert_eq!(scores, 14);
}

#[test]
fn cli_scores_reproduce_the_canonical_fixture() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&[
        "measure",
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--months",
        "2014-01..2014-01",
    ]);
    let in_degree = std::fs::read_to_string(out.join("scores/in_degree-2014-01.csv")).unwrap();
    assert_eq!(in_degree, "user,score\nu1,2\nu2,1\nu3,0\n");
    let betweenness =
        std::fs::read_to_string(out.join("scores/betweenness-2014-01.csv")).unwrap();
    assert_eq!(betweenness, "user,score\nu1,0\nu2,0\nu3,0\n");
    let graph = std::fs::read_to_string(out.join("graphs/graph-2014-01.csv")).unwrap();
    assert_eq!(
        graph,
        "source,target,weight\nu2,u1,0.5\nu3,u1,0.5\nu3,u2,0.990465754321\n"
    );
}

#[test]
fn unknown_measure_exits_one_and_lists_names() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = bin()
        .args([
            "measure",
            "--posts",
            posts.to_str().unwrap(),
            "--sales",
            sales.to_str().unwrap(),
            "--out-dir",
            tmp.path().join("out").to_str().unwrap(),
            "--measures",
            "eigenvector",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("eigenvector"));
    assert!(stderr.contains("betweenness") && stderr.contains("topic_engagement"));
}

#[test]
fn missing_posts_file_exits_two() {
    let tmp = TempDir::new().unwrap();
    let out = bin()
        .args([
            "extract",
            "--posts",
            tmp.path().join("nope.csv").to_str().unwrap(),
            "--out-dir",
            tmp.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nope.csv"), "stderr: {stderr}");
}

#[test]
fn config_file_is_used_and_flags_override_it() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let config = tmp.path().join("run.conf");
    let mut f = std::fs::File::create(&config).unwrap();
    writeln!(f, "# pipeline settings").unwrap();
    writeln!(f, "posts = {}", posts.display()).unwrap();
    writeln!(f, "sales = {}", sales.display()).unwrap();
    writeln!(f, "out_dir = {}", out.display()).unwrap();
    writeln!(f, "delta_o = 5").unwrap();
    drop(f);

    run_ok(&[
        "extract",
        "--config",
        config.to_str().unwrap(),
        "--delta-o",
        "2",
    ]);
    let meta = std::fs::read_to_string(out.join("graphs/graph-2014-01.meta")).unwrap();
    assert!(meta.contains("delta_o=2"), "flag should beat file: {meta}");
}

#[test]
fn evaluate_single_month_flags_missing_deviation() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let common = [
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--months",
        "2014-03..2014-03",
    ];
    run_ok(&[&["measure"], &common[..]].concat());
    run_ok(&[&["evaluate"], &common[..]].concat());
    let summary = std::fs::read_to_string(out.join("eval/overlap_summary.csv")).unwrap();
    let data_rows: Vec<&str> = summary.lines().skip(1).collect();
    assert!(!data_rows.is_empty());
    for row in data_rows {
        let std_field = row.split(',').nth(4).unwrap();
        assert_eq!(std_field, "NA", "single month must flag std: {row}");
        assert!(row.ends_with(",1"));
    }
}

#[test]
fn evaluate_without_scores_names_the_missing_file() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = bin()
        .args([
            "evaluate",
            "--posts",
            posts.to_str().unwrap(),
            "--sales",
            sales.to_str().unwrap(),
            "--out-dir",
            tmp.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("in_degree-2014-01.csv"),
        "stderr: {stderr}"
    );
}

#[test]
fn roc_emits_four_group_files_when_groups_are_populated() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    // synthetic corpus large enough that all four groups are nonempty
    run_ok(&[
        "synth",
        "--out-dir",
        out.to_str().unwrap(),
        "--synth-users",
        "60",
        "--synth-months",
        "3",
        "--seed",
        "11",
    ]);
    let posts = out.join("posts.csv");
    let sales = out.join("sales.csv");
    let common = [
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--measures",
        "topic_engagement",
    ];
    run_ok(&[&["measure"], &common[..]].concat());
    run_ok(&[&["roc"], &common[..]].concat());
    let files: Vec<String> = std::fs::read_dir(out.join("roc"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let last_month = "2020-03";
    for group in [
        "top_percentile",
        "top_percentile_low_activity",
        "all_vendors",
        "all_vendors_low_activity",
    ] {
        let name = format!("roc-{group}-topic_engagement-{last_month}.csv");
        assert!(files.contains(&name), "missing {name} in {files:?}");
    }
    let auc = std::fs::read_to_string(out.join("roc/roc_auc.csv")).unwrap();
    assert!(auc.lines().count() > 1);
}

#[test]
fn sweep_requires_a_grid() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = bin()
        .args([
            "sweep",
            "--posts",
            posts.to_str().unwrap(),
            "--sales",
            sales.to_str().unwrap(),
            "--out-dir",
            tmp.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn sweep_leaves_indicator_metrics_unchanged_across_grid_points() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    run_ok(&[
        "synth",
        "--out-dir",
        out.to_str().unwrap(),
        "--synth-users",
        "60",
        "--synth-months",
        "3",
        "--seed",
        "5",
    ]);
    run_ok(&[
        "sweep",
        "--posts",
        out.join("posts.csv").to_str().unwrap(),
        "--sales",
        out.join("sales.csv").to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--grid-delta-o",
        "2,10,20",
        "--measures",
        "betweenness,post_activity,topics_started,topic_engagement",
    ]);
    let text = std::fs::read_to_string(out.join("sweep/sweep.csv")).unwrap();
    // indicator rows must agree across grid points; betweenness may differ
    let mut indicator_values: std::collections::HashMap<String, String> =
        std::collections::HashMap::new();
    let mut betweenness_varies = false;
    let mut betweenness_seen: std::collections::HashMap<String, String> =
        std::collections::HashMap::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (measure, value) = (cols[6], cols[9]);
        let series_key = format!("{}|{}|{}|{}", cols[5], cols[6], cols[7], cols[8]);
        if measure == "betweenness" {
            match betweenness_seen.get(&series_key) {
                Some(prev) if prev != value => betweenness_varies = true,
                _ => {
                    betweenness_seen.insert(series_key, value.to_string());
                }
            }
        } else {
            match indicator_values.get(&series_key) {
                Some(prev) => assert_eq!(
                    prev, value,
                    "indicator series {series_key} changed across grid points"
                ),
                None => {
                    indicator_values.insert(series_key, value.to_string());
                }
            }
        }
    }
    assert!(
        betweenness_varies,
        "grid had no effect on the network measure at all"
    );
}

#[test]
fn full_pipeline_on_bundled_fixture_stays_under_a_minute() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let started = std::time::Instant::now();
    run_ok(&[
        "synth",
        "--out-dir",
        out.to_str().unwrap(),
        "--synth-users",
        "300",
        "--synth-months",
        "6",
        "--seed",
        "42",
    ]);
    run_ok(&[
        "report",
        "--posts",
        out.join("posts.csv").to_str().unwrap(),
        "--sales",
        out.join("sales.csv").to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "pipeline took {elapsed:?}, budget is 60 s"
    );
    assert!(out.join("report.md").exists());
    assert!(out.join("eval/trends.csv").exists());
}

#[test]
fn joint_grid_runs_the_cartesian_product() {
    let tmp = TempDir::new().unwrap();
    let (posts, sales) = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&[
        "sweep",
        "--posts",
        posts.to_str().unwrap(),
        "--sales",
        sales.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--grid-delta-o",
        "2,10",
        "--grid-omega-first",
        "0.4,0.8",
        "--measures",
        "topic_engagement",
        "--months",
        "2014-03..2014-03",
    ]);
    let points = std::fs::read_dir(out.join("sweep"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().is_dir())
        .count();
    assert_eq!(points, 4);
}
