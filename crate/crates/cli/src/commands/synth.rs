

use forumrank_core::error::Result;
use forumrank_core::ingest::{write_posts_csv, write_sales_csv};
use forumrank_core::synthgen::generate;

use crate::config::RunConfig;
use crate::manifest::write_run_manifest;

pub fn run(cfg: &RunConfig) -> Result<()> {
    let out = generate(&cfg.synth)?;
    let posts_path = cfg
        .posts
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join("posts.csv"));
    let sales_path = cfg
        .sales
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join("sales.csv"));

    let mut posts_bytes = Vec::new();
    write_posts_csv(&out.posts, &mut posts_bytes)?;
    crate::write_file(&posts_path, &posts_bytes)?;
    let mut sales_bytes = Vec::new();
    write_sales_csv(&out.sales, &mut sales_bytes)?;
    crate::write_file(&sales_path, &sales_bytes)?;

    // manifest digests should describe the files just written
    let manifest_cfg = cfg.with_io_paths(posts_path.clone(), sales_path.clone());
    write_run_manifest("synth", &manifest_cfg)?;
    eprintln!(
        "synth: {} posts -> {}, {} observations -> {}",
        out.posts.len(),
        posts_path.display(),
        out.sales.len(),
        sales_path.display()
    );
    Ok(())
}
