//! Plain-text experiment configuration.
//!
//! One `key = value` pair per line; blank lines and `#` comments are
//! ignored. Recognised keys:
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `graph` | edge-list file, or `path:N`, `cycle:N`, `grid:RxC` | required unless `features` is set |
//! | `features` | CSV of feature vectors (one row per vertex) | |
//! | `class_column` | `auto`, `last` or `none` | `auto` |
//! | `k` | neighbours for the kNN ∪ MST graph | `3` |
//! | `vertices` | subsample this many feature rows | all rows |
//! | `labeling` | `class-split` or `voronoi` | `class-split` with features, else `voronoi` |
//! | `centers` | Voronoi centres per labeling | `4` |
//! | `algorithms` | comma list of `scs-f`, `scs-b`, `qbayes`, `sgp` | all four |
//! | `ensemble` | odd ensemble size | `1` |
//! | `trials` | number of trials | `1000` |
//! | `switch_period` | trials per labeling; must divide `trials` | `100` |
//! | `seed` | master seed | `0` |
//! | `output` | directory for `results.csv` and `meta.txt` | none |
//! | `scs_alpha` | `oracle`, `time-varying` or a number | `oracle` |
//! | `qbayes_alpha` | `oracle` or a number | `oracle` |
//! | `qbayes_theta` | `oracle` or a number | `oracle` |
//! | `sgp_gamma` | `oracle` or a number | `oracle` |
//! | `timing` | `true` to record per-trial microseconds | `false` |
//!
//! Relative paths are resolved against the directory of the config file
//! when it is loaded with [`ExperimentConfig::from_file`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::graph::ClassColumn;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    ScsF,
    ScsB,
    QBayes,
    Sgp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::ScsF, Algorithm::ScsB, Algorithm::QBayes, Algorithm::Sgp];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ScsF => "scs-f",
            Algorithm::ScsB => "scs-b",
            Algorithm::QBayes => "qbayes",
            Algorithm::Sgp => "sgp",
        }
    }

    /// Whether members run on a sampled spine (everything except SGP).
    pub fn uses_spine(self) -> bool {
        self != Algorithm::Sgp
    }

    pub(crate) fn tag(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// A synthetic graph family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphSpec {
    Path(usize),
    Cycle(usize),
    Grid(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Generated(GraphSpec),
    /// kNN ∪ MST graph built from the feature file.
    Features,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelingSpec {
    ClassSplit,
    Voronoi { centers: usize },
}

/// A parameter that is either fixed or tuned from the ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tuning {
    Oracle,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScsAlpha {
    Oracle,
    TimeVarying,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub features: Option<PathBuf>,
    pub class_column: ClassColumn,
    pub k: usize,
    pub vertices: Option<usize>,
    pub labeling: LabelingSpec,
    pub algorithms: Vec<Algorithm>,
    pub ensemble: usize,
    pub trials: usize,
    pub switch_period: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub scs_alpha: ScsAlpha,
    pub qbayes_alpha: Tuning,
    pub qbayes_theta: Tuning,
    pub sgp_gamma: Tuning,
    pub timing: bool,
}

const KEYS: &[&str] = &[
    "graph",
    "features",
    "class_column",
    "k",
    "vertices",
    "labeling",
    "centers",
    "algorithms",
    "ensemble",
    "trials",
    "switch_period",
    "seed",
    "output",
    "scs_alpha",
    "qbayes_alpha",
    "qbayes_theta",
    "sgp_gamma",
    "timing",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| invalid(key, format!("`{value}`: {e}")))
}

fn parse_probability(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_num(key, value)?;
    if !(0.0..1.0).contains(&x) {
        return Err(invalid(key, format!("{x} is not in [0, 1)")));
    }
    Ok(x)
}

fn parse_tuning(key: &str, value: &str) -> Result<Tuning, ConfigError> {
    if value == "oracle" {
        Ok(Tuning::Oracle)
    } else {
        Ok(Tuning::Fixed(parse_num(key, value)?))
    }
}

fn parse_graph_spec(value: &str) -> Option<GraphSpec> {
    let (family, size) = value.split_once(':')?;
    match family {
        "path" => size.parse().ok().filter(|&n| n >= 2).map(GraphSpec::Path),
        "cycle" => size.parse().ok().filter(|&n| n >= 3).map(GraphSpec::Cycle),
        "grid" => {
            let (r, c) = size.split_once('x')?;
            let (r, c) = (r.parse().ok()?, c.parse().ok()?);
            (r >= 1 && c >= 1 && r * c >= 2).then_some(GraphSpec::Grid(r, c))
        }
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_relative_to(text, None)
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn from_file(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(format!("reading config {}", path.display()), e))?;
        Ok(Self::parse_relative_to(&text, path.parent())?)
    }

    fn parse_relative_to(text: &str, base: Option<&Path>) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
                return Err(ConfigError::UnknownKey { line: i + 1, key: key.to_string() });
            };
            if map.insert(known, value).is_some() {
                return Err(ConfigError::DuplicateKey { line: i + 1, key: key.to_string() });
            }
        }
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };

        let features = map.get("features").map(|p| resolve(p));
        let graph = match map.get("graph") {
            Some(v) => match parse_graph_spec(v) {
                Some(spec) => GraphSource::Generated(spec),
                None if v.contains(':') && !Path::new(v).exists() && matches!(v.split(':').next(), Some("path" | "cycle" | "grid")) => {
                    return Err(invalid("graph", format!("malformed generator `{v}`")));
                }
                None => GraphSource::File(resolve(v)),
            },
            None if features.is_some() => GraphSource::Features,
            None => return Err(ConfigError::Missing("graph")),
        };
        let class_column = match map.get("class_column").copied().unwrap_or("auto") {
            "auto" => ClassColumn::Auto,
            "last" => ClassColumn::Last,
            "none" => ClassColumn::None,
            other => return Err(invalid("class_column", format!("`{other}` is not auto, last or none"))),
        };
        let k = map.get("k").map(|v| parse_num::<usize>("k", v)).transpose()?.unwrap_or(3);
        if k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        let vertices = map.get("vertices").map(|v| parse_num::<usize>("vertices", v)).transpose()?;
        if vertices == Some(0) {
            return Err(invalid("vertices", "must be at least 1"));
        }
        let centers = map.get("centers").map(|v| parse_num::<usize>("centers", v)).transpose()?.unwrap_or(4);
        if centers == 0 {
            return Err(invalid("centers", "must be at least 1"));
        }
        let labeling = match map.get("labeling").copied() {
            Some("class-split") => LabelingSpec::ClassSplit,
            Some("voronoi") => LabelingSpec::Voronoi { centers },
            Some(other) => return Err(invalid("labeling", format!("`{other}` is not class-split or voronoi"))),
            None if features.is_some() => LabelingSpec::ClassSplit,
            None => LabelingSpec::Voronoi { centers },
        };
        if labeling == LabelingSpec::ClassSplit && features.is_none() {
            return Err(invalid("labeling", "class-split needs a `features` file with class ids"));
        }
        let algorithms = match map.get("algorithms") {
            Some(v) => {
                let mut list = Vec::new();
                for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let a: Algorithm = name.parse().map_err(|e: String| invalid("algorithms", e))?;
                    if list.contains(&a) {
                        return Err(invalid("algorithms", format!("`{name}` listed twice")));
                    }
                    list.push(a);
                }
                if list.is_empty() {
                    return Err(invalid("algorithms", "empty list"));
                }
                list
            }
            None => Algorithm::ALL.to_vec(),
        };
        let ensemble = map.get("ensemble").map(|v| parse_num::<usize>("ensemble", v)).transpose()?.unwrap_or(1);
        if ensemble % 2 == 0 {
            return Err(invalid("ensemble", format!("{ensemble} is not odd")));
        }
        let trials = map.get("trials").map(|v| parse_num::<usize>("trials", v)).transpose()?.unwrap_or(1000);
        if trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        let switch_period = map.get("switch_period").map(|v| parse_num::<usize>("switch_period", v)).transpose()?.unwrap_or(100.min(trials));
        if switch_period == 0 || trials % switch_period != 0 {
            return Err(invalid("switch_period", format!("{switch_period} does not divide trials = {trials}")));
        }
        let seed = map.get("seed").map(|v| parse_num::<u64>("seed", v)).transpose()?.unwrap_or(0);
        let output = map.get("output").map(|p| resolve(p));
        let scs_alpha = match map.get("scs_alpha").copied() {
            None | Some("oracle") => ScsAlpha::Oracle,
            Some("time-varying") => ScsAlpha::TimeVarying,
            Some(v) => ScsAlpha::Fixed(parse_probability("scs_alpha", v)?),
        };
        let qbayes_alpha = match map.get("qbayes_alpha") {
            Some(v) if *v != "oracle" => Tuning::Fixed(parse_probability("qbayes_alpha", v)?),
            _ => Tuning::Oracle,
        };
        let qbayes_theta = map.get("qbayes_theta").map(|v| parse_tuning("qbayes_theta", v)).transpose()?.unwrap_or(Tuning::Oracle);
        if let Tuning::Fixed(t) = qbayes_theta {
            if !(t > 0.0 && t < 0.5) {
                return Err(invalid("qbayes_theta", format!("{t} is not in (0, 0.5)")));
            }
        }
        let sgp_gamma = map.get("sgp_gamma").map(|v| parse_tuning("sgp_gamma", v)).transpose()?.unwrap_or(Tuning::Oracle);
        if let Tuning::Fixed(g) = sgp_gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid("sgp_gamma", format!("{g} is not positive")));
            }
        }
        let timing = match map.get("timing").copied() {
            None | Some("false") => false,
            Some("true") => true,
            Some(other) => return Err(invalid("timing", format!("`{other}` is not true or false"))),
        };

        Ok(ExperimentConfig {
            graph,
            features,
            class_column,
            k,
            vertices,
            labeling,
            algorithms,
            ensemble,
            trials,
            switch_period,
            seed,
            output,
            scs_alpha,
            qbayes_alpha,
            qbayes_theta,
            sgp_gamma,
            timing,
        })
    }

    /// Number of labelings in the schedule.
    pub fn segments(&self) -> usize {
        self.trials / self.switch_period
    }

    /// Canonical `key = value` rendering; parsing it gives back an equal
    /// config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        match &self.graph {
            GraphSource::File(p) => put("graph", p.display().to_string()),
            GraphSource::Generated(GraphSpec::Path(n)) => put("graph", format!("path:{n}")),
            GraphSource::Generated(GraphSpec::Cycle(n)) => put("graph", format!("cycle:{n}")),
            GraphSource::Generated(GraphSpec::Grid(r, c)) => put("graph", format!("grid:{r}x{c}")),
            GraphSource::Features => {}
        }
        if let Some(p) = &self.features {
            put("features", p.display().to_string());
        }
        put(
            "class_column",
            match self.class_column {
                ClassColumn::Auto => "auto",
                ClassColumn::Last => "last",
                ClassColumn::None => "none",
            }
            .into(),
        );
        put("k", self.k.to_string());
        if let Some(v) = self.vertices {
            put("vertices", v.to_string());
        }
        match self.labeling {
            LabelingSpec::ClassSplit => put("labeling", "class-split".into()),
            LabelingSpec::Voronoi { centers } => {
                put("labeling", "voronoi".into());
                put("centers", centers.to_string());
            }
        }
        put("algorithms", self.algorithms.iter().map(|a| a.name()).collect::<Vec<_>>().join(","));
        put("ensemble", self.ensemble.to_string());
        put("trials", self.trials.to_string());
        put("switch_period", self.switch_period.to_string());
        put("seed", self.seed.to_string());
        if let Some(p) = &self.output {
            put("output", p.display().to_string());
        }
        put(
            "scs_alpha",
            match self.scs_alpha {
                ScsAlpha::Oracle => "oracle".into(),
                ScsAlpha::TimeVarying => "time-varying".into(),
                ScsAlpha::Fixed(a) => format!("{a:?}"),
            },
        );
        let tuning = |t: Tuning| match t {
            Tuning::Oracle => "oracle".to_string(),
            Tuning::Fixed(x) => format!("{x:?}"),
        };
        put("qbayes_alpha", tuning(self.qbayes_alpha));
        put("qbayes_theta", tuning(self.qbayes_theta));
        put("sgp_gamma", tuning(self.sgp_gamma));
        put("timing", self.timing.to_string());
        out
    }
}
