//! Run configuration: defaults, the flat `key = value` config file, and
//! command-line overrides, merged in that order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use forumrank_core::error::{Error, Result};
use forumrank_core::months::{format_duration_secs, parse_duration_secs, parse_month_range};
use forumrank_core::{Cutoff, ExtractionParams, Measure, PagerankOptions, PostFormat, SynthConfig};

/// Flat string settings; later sources override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = crate::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::MalformedRow {
                row: lineno as u64 + 1,
                reason: format!("expected `key = value` in {}", path.display()),
            })?;
            self.map
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.map.insert(key.to_string(), value);
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidParameter(format!("cannot parse `{key} = {raw}`"))
            }),
        }
    }
}

/// Fully resolved configuration for one command run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub posts: Option<PathBuf>,
    pub sales: Option<PathBuf>,
    pub format: Option<PostFormat>,
    pub out_dir: PathBuf,
    /// Requested month range; `None` means the corpus span.
    pub months: Option<Vec<Cutoff>>,
    pub params: ExtractionParams,
    pub measures: Vec<Measure>,
    pub fraction: f64,
    pub roc_step: u32,
    pub pagerank: PagerankOptions,
    pub top_k: usize,
    pub activity_threshold: u64,
    pub seed: u64,
    pub grid: GridSpec,
    pub synth: SynthConfig,
    /// Canonical `key = value` rendering of every resolved setting.
    canonical: String,
}

/// Parameter-sweep grid: per-parameter value lists, combined as a Cartesian
/// product.
#[derive(Debug, Clone, Default)]
pub struct GridSpec {
    pub delta_o: Vec<u32>,
    pub delta_t: Vec<i64>,
    pub omega_lower: Vec<f64>,
    pub t_lim: Vec<i64>,
    pub omega_first: Vec<f64>,
}

impl GridSpec {
    pub fn is_empty(&self) -> bool {
        self.delta_o.is_empty()
            && self.delta_t.is_empty()
            && self.omega_lower.is_empty()
            && self.t_lim.is_empty()
            && self.omega_first.is_empty()
    }

    /// Cartesian product over the listed axes; unlisted parameters stay at
    /// the base value.
    pub fn points(&self, base: &ExtractionParams) -> Vec<ExtractionParams> {
        let delta_o = pick(&self.delta_o, base.delta_o);
        let delta_t = pick(&self.delta_t, base.delta_t);
        let omega_lower = pick(&self.omega_lower, base.omega_lower);
        let t_lim = pick(&self.t_lim, base.t_lim);
        let omega_first = pick(&self.omega_first, base.omega_first);
        let mut out = Vec::new();
        for &o in &delta_o {
            for &t in &delta_t {
                for &wl in &omega_lower {
                    for &tl in &t_lim {
                        for &wf in &omega_first {
                            out.push(ExtractionParams {
                                delta_o: o,
                                delta_t: t,
                                omega_lower: wl,
                                t_lim: tl,
                                omega_first: wf,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

fn pick<T: Copy>(grid: &[T], base: T) -> Vec<T> {
    if grid.is_empty() {
        vec![base]
    } else {
        grid.to_vec()
    }
}

fn parse_list<T>(raw: &str, key: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            f(s).map_err(|_| Error::InvalidParameter(format!("cannot parse `{key}` item `{s}`")))
        })
        .collect()
}

impl RunConfig {
    pub fn resolve(s: &Settings) -> Result<RunConfig> {
        let defaults = ExtractionParams::default();
        let params = ExtractionParams {
            delta_o: s.parse("delta_o")?.unwrap_or(defaults.delta_o),
            delta_t: s
                .get("delta_t")
                .map(parse_duration_secs)
                .transpose()?
                .unwrap_or(defaults.delta_t),
            omega_lower: s.parse("omega_lower")?.unwrap_or(defaults.omega_lower),
            t_lim: s
                .get("t_lim")
                .map(parse_duration_secs)
                .transpose()?
                .unwrap_or(defaults.t_lim),
            omega_first: s.parse("omega_first")?.unwrap_or(defaults.omega_first),
        };
        params.validate()?;

        let measures = match s.get("measures") {
            None => Measure::ALL.to_vec(),
            Some(raw) => raw
                .split(',')
                .map(str::trim)
                .filter(|m| !m.is_empty())
                .map(Measure::parse)
                .collect::<Result<Vec<_>>>()?,
        };
        if measures.is_empty() {
            return Err(Error::InvalidParameter("measure list is empty".into()));
        }

        let fraction = s.parse("fraction")?.unwrap_or(0.2);
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "fraction must be in (0, 1], got {fraction}"
            )));
        }
        let roc_step: u32 = s.parse("roc_step")?.unwrap_or(5);
        if roc_step == 0 || 100 % roc_step != 0 {
            return Err(Error::InvalidParameter(format!(
                "roc_step must divide 100, got {roc_step}"
            )));
        }

        let pagerank = PagerankOptions {
            damping: s.parse("damping")?.unwrap_or(0.85),
            tolerance: s.parse("tolerance")?.unwrap_or(1e-12),
            max_iters: s.parse("max_iters")?.unwrap_or(500),
        };

        let months = s.get("months").map(parse_month_range).transpose()?;

        let format = match s.get("format") {
            None => None,
            Some("csv") => Some(PostFormat::Csv),
            Some("jsonl") => Some(PostFormat::Jsonl),
            Some(other) => {
                return Err(Error::InvalidParameter(format!(
                    "format must be csv or jsonl, got `{other}`"
                )))
            }
        };

        let grid = GridSpec {
            delta_o: s
                .get("grid_delta_o")
                .map(|raw| {
                    parse_list(raw, "grid_delta_o", |x| {
                        x.parse().map_err(|_| Error::InvalidParameter(x.into()))
                    })
                })
                .transpose()?
                .unwrap_or_default(),
            delta_t: s
                .get("grid_delta_t")
                .map(|raw| parse_list(raw, "grid_delta_t", parse_duration_secs))
                .transpose()?
                .unwrap_or_default(),
            omega_lower: s
                .get("grid_omega_lower")
                .map(|raw| {
                    parse_list(raw, "grid_omega_lower", |x| {
                        x.parse().map_err(|_| Error::InvalidParameter(x.into()))
                    })
                })
                .transpose()?
                .unwrap_or_default(),
            t_lim: s
                .get("grid_t_lim")
                .map(|raw| parse_list(raw, "grid_t_lim", parse_duration_secs))
                .transpose()?
                .unwrap_or_default(),
            omega_first: s
                .get("grid_omega_first")
                .map(|raw| {
                    parse_list(raw, "grid_omega_first", |x| {
                        x.parse().map_err(|_| Error::InvalidParameter(x.into()))
                    })
                })
                .transpose()?
                .unwrap_or_default(),
        };

        let seed = s.parse("seed")?.unwrap_or(42);
        let synth_defaults = SynthConfig::default();
        let (start_year, start_month) = match s.get("synth_start") {
            None => (synth_defaults.start_year, synth_defaults.start_month),
            Some(raw) => forumrank_core::months::parse_month(raw)?,
        };
        let synth = SynthConfig {
            seed,
            n_users: s.parse("synth_users")?.unwrap_or(synth_defaults.n_users),
            vendor_fraction: s
                .parse("synth_vendor_fraction")?
                .unwrap_or(synth_defaults.vendor_fraction),
            months: s.parse("synth_months")?.unwrap_or(synth_defaults.months),
            start_year,
            start_month,
            topic_start_rate: s
                .parse("synth_topic_rate")?
                .unwrap_or(synth_defaults.topic_start_rate),
            reply_rate: s
                .parse("synth_reply_rate")?
                .unwrap_or(synth_defaults.reply_rate),
            reply_delay_mean_hours: s
                .parse("synth_delay_hours")?
                .unwrap_or(synth_defaults.reply_delay_mean_hours),
            reply_delay_sigma: s
                .parse("synth_delay_sigma")?
                .unwrap_or(synth_defaults.reply_delay_sigma),
            sales_coupling: s
                .parse("synth_coupling")?
                .unwrap_or(synth_defaults.sales_coupling),
            sales_base: s
                .parse("synth_sales_base")?
                .unwrap_or(synth_defaults.sales_base),
            sales_noise: s
                .parse("synth_sales_noise")?
                .unwrap_or(synth_defaults.sales_noise),
        };
        synth.validate()?;

        let mut cfg = RunConfig {
            posts: s.get("posts").map(PathBuf::from),
            sales: s.get("sales").map(PathBuf::from),
            format,
            out_dir: PathBuf::from(s.get("out_dir").unwrap_or("out")),
            months,
            params,
            measures,
            fraction,
            roc_step,
            pagerank,
            top_k: s.parse("top_k")?.unwrap_or(25),
            activity_threshold: s.parse("activity_threshold")?.unwrap_or(100),
            seed,
            grid,
            synth,
            canonical: String::new(),
        };
        cfg.canonical = cfg.render_canonical();
        Ok(cfg)
    }

    /// Path of the posts file, or a validation error naming the missing key.
    pub fn posts_path(&self) -> Result<&Path> {
        self.posts
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("no posts file configured (key `posts`)".into()))
    }

    pub fn sales_path(&self) -> Result<&Path> {
        self.sales
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("no sales file configured (key `sales`)".into()))
    }

    pub fn post_format(&self) -> PostFormat {
        match (self.format, &self.posts) {
            (Some(f), _) => f,
            (None, Some(p)) => PostFormat::from_path(p),
            (None, None) => PostFormat::Csv,
        }
    }

    /// Canonical settings rendering used for config hashing and manifests.
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    /// A copy with the input paths replaced (used when a command creates
    /// the input files itself).
    pub fn with_io_paths(&self, posts: PathBuf, sales: PathBuf) -> RunConfig {
        let mut cfg = self.clone();
        cfg.posts = Some(posts);
        cfg.sales = Some(sales);
        cfg.canonical = cfg.render_canonical();
        cfg
    }

    fn render_canonical(&self) -> String {
        use forumrank_core::sigfmt::sig;
        let mut lines: Vec<String> = vec![
            format!("activity_threshold = {}", self.activity_threshold),
            format!("damping = {}", sig(self.pagerank.damping, 12)),
            format!("delta_o = {}", self.params.delta_o),
            format!("delta_t = {}", format_duration_secs(self.params.delta_t)),
            format!("fraction = {}", sig(self.fraction, 12)),
            format!(
                "grid_delta_o = {}",
                join(&self.grid.delta_o, |v| v.to_string())
            ),
            format!(
                "grid_delta_t = {}",
                join(&self.grid.delta_t, |v| format_duration_secs(*v))
            ),
            format!(
                "grid_omega_first = {}",
                join(&self.grid.omega_first, |v| sig(*v, 12))
            ),
            format!(
                "grid_omega_lower = {}",
                join(&self.grid.omega_lower, |v| sig(*v, 12))
            ),
            format!(
                "grid_t_lim = {}",
                join(&self.grid.t_lim, |v| format_duration_secs(*v))
            ),
            format!("max_iters = {}", self.pagerank.max_iters),
            format!(
                "measures = {}",
                join(&self.measures, |m| m.name().to_string())
            ),
            format!(
                "months = {}",
                self.months
                    .as_ref()
                    .map(|m| format!(
                        "{}..{}",
                        m.first().unwrap().label(),
                        m.last().unwrap().label()
                    ))
                    .unwrap_or_else(|| "corpus-span".into())
            ),
            format!("omega_first = {}", sig(self.params.omega_first, 12)),
            format!("omega_lower = {}", sig(self.params.omega_lower, 12)),
            format!(
                "out_dir = {}",
                self.out_dir.display()
            ),
            format!(
                "posts = {}",
                self.posts.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            ),
            format!("roc_step = {}", self.roc_step),
            format!(
                "sales = {}",
                self.sales.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            ),
            format!("seed = {}", self.seed),
            format!("synth_coupling = {}", sig(self.synth.sales_coupling, 12)),
            format!("synth_delay_hours = {}", sig(self.synth.reply_delay_mean_hours, 12)),
            format!("synth_delay_sigma = {}", sig(self.synth.reply_delay_sigma, 12)),
            format!("synth_months = {}", self.synth.months),
            format!("synth_reply_rate = {}", sig(self.synth.reply_rate, 12)),
            format!("synth_sales_base = {}", sig(self.synth.sales_base, 12)),
            format!("synth_sales_noise = {}", sig(self.synth.sales_noise, 12)),
            format!(
                "synth_start = {:04}-{:02}",
                self.synth.start_year, self.synth.start_month
            ),
            format!("synth_topic_rate = {}", sig(self.synth.topic_start_rate, 12)),
            format!("synth_users = {}", self.synth.n_users),
            format!("synth_vendor_fraction = {}", sig(self.synth.vendor_fraction, 12)),
            format!("t_lim = {}", format_duration_secs(self.params.t_lim)),
            format!("tolerance = {:e}", self.pagerank.tolerance),
            format!("top_k = {}", self.top_k),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_the_reference_parameters() {
        let cfg = RunConfig::resolve(&Settings::default()).unwrap();
        assert_eq!(cfg.params.delta_o, 10);
        assert_eq!(cfg.params.delta_t, 30 * 86_400);
        assert_eq!(cfg.params.omega_lower, 0.2);
        assert_eq!(cfg.params.t_lim, 7 * 86_400);
        assert_eq!(cfg.params.omega_first, 0.5);
        assert_eq!(cfg.fraction, 0.2);
        assert_eq!(cfg.roc_step, 5);
        assert_eq!(cfg.pagerank.damping, 0.85);
        assert_eq!(cfg.measures.len(), 7);
        assert_eq!(cfg.top_k, 25);
        assert_eq!(cfg.activity_threshold, 100);
    }

    #[test]
    fn file_values_override_defaults_and_flags_override_file() {
        let mut s = Settings::default();
        s.set("delta_o", "5".into());
        s.set("fraction", "0.3".into());
        let cfg = RunConfig::resolve(&s).unwrap();
        assert_eq!(cfg.params.delta_o, 5);
        assert_eq!(cfg.fraction, 0.3);
        // a later set() wins, mirroring flag-over-file precedence
        s.set("delta_o", "7".into());
        let cfg = RunConfig::resolve(&s).unwrap();
        assert_eq!(cfg.params.delta_o, 7);
    }

    #[test]
    fn durations_accept_suffixes() {
        let mut s = Settings::default();
        s.set("delta_t", "14d".into());
        s.set("t_lim", "2d".into());
        let cfg = RunConfig::resolve(&s).unwrap();
        assert_eq!(cfg.params.delta_t, 14 * 86_400);
        assert_eq!(cfg.params.t_lim, 2 * 86_400);
    }

    #[test]
    fn unknown_measure_lists_valid_names() {
        let mut s = Settings::default();
        s.set("measures", "betweenness,nonsense".into());
        let err = RunConfig::resolve(&s).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nonsense") && msg.contains("topic_engagement"), "{msg}");
    }

    #[test]
    fn grid_points_form_cartesian_products() {
        let mut s = Settings::default();
        s.set("grid_delta_o", "2,5".into());
        s.set("grid_omega_first", "0.4,0.8".into());
        let cfg = RunConfig::resolve(&s).unwrap();
        let points = cfg.grid.points(&cfg.params);
        assert_eq!(points.len(), 4);
        assert!(points.iter().all(|p| p.delta_t == cfg.params.delta_t));
    }

    #[test]
    fn canonical_rendering_is_stable() {
        let cfg1 = RunConfig::resolve(&Settings::default()).unwrap();
        let cfg2 = RunConfig::resolve(&Settings::default()).unwrap();
        assert_eq!(cfg1.canonical(), cfg2.canonical());
        assert!(cfg1.canonical().contains("delta_t = 1month"));
    }
}
