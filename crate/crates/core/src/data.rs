//! Datasets: the JSON file format, synthetic direction-motif generators and
//! stratified train/validation/test splits.
//!
//! File schema (UTF-8 JSON, any key order):
//!
//! ```json
//! {
//!   "vertices":   [{"name": "a", "features": [0.1, 2.0]}, ...],
//!   "hyperedges": [{"head": ["b", "c"], "tail": ["a"], "weight": 1.0, "label": "x"}, ...],
//!   "classes":    ["x", "y"],
//!   "folds":      [{"train": [0, 3], "val": [1], "test": [2]}],
//!   "meta":       {...}
//! }
//! ```
//!
//! `weight` defaults to 1, `tail` to empty; `label` is a class name or a
//! class index; `folds` and `meta` are optional.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{DirectedHypergraph, Hyperedge, HypergraphError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field {field}: {message}")]
    Field { field: String, message: String },
    #[error("hyperedge record {record}: {source}")]
    Hypergraph {
        record: usize,
        #[source]
        source: HypergraphError,
    },
    #[error("vertex {name:?} belongs to no hyperedge")]
    IsolatedVertex { name: String },
    #[error("{m} hyperedges are too few for {k} folds (need k >= 2 and at least {} hyperedges)", 4 * k)]
    TooFewSamples { m: usize, k: usize },
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> DataError {
    DataError::Field { field: field.into(), message: message.into() }
}

/// One train/validation/test partition of the hyperedge ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Which part of a [`Fold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Fold {
    pub fn ids(&self, split: Split) -> &[usize] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub hypergraph: DirectedHypergraph,
    pub vertex_names: Vec<String>,
    /// `n × c0` real vertex features.
    pub node_features: Array2<f64>,
    /// Class id per hyperedge.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub folds: Vec<Fold>,
    pub meta: Option<serde_json::Value>,
}

impl Dataset {
    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    /// `(hyperedge id, class)` pairs for the given ids.
    pub fn targets(&self, ids: &[usize]) -> Vec<(usize, usize)> {
        ids.iter().map(|&e| (e, self.labels[e])).collect()
    }

    pub fn to_json(&self) -> String {
        let file = DatasetFile {
            vertices: self
                .vertex_names
                .iter()
                .zip(self.node_features.rows())
                .map(|(name, row)| VertexRecord { name: name.clone(), features: row.to_vec() })
                .collect(),
            hyperedges: self
                .hypergraph
                .edges()
                .iter()
                .zip(&self.labels)
                .map(|(e, &label)| HyperedgeRecord {
                    head: e.head().iter().map(|&v| self.vertex_names[v].clone()).collect(),
                    tail: e.tail().iter().map(|&v| self.vertex_names[v].clone()).collect(),
                    weight: Some(e.weight()),
                    label: LabelRef::Name(self.class_names[label].clone()),
                })
                .collect(),
            classes: self.class_names.clone(),
            folds: (!self.folds.is_empty()).then(|| self.folds.clone()),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("dataset serializes")
    }

    pub fn write(&self, path: &Path) -> Result<(), DataError> {
        std::fs::write(path, self.to_json()).map_err(|source| DataError::Io { path: path.to_owned(), source })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetFile {
    vertices: Vec<VertexRecord>,
    hyperedges: Vec<HyperedgeRecord>,
    classes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    folds: Option<Vec<Fold>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexRecord {
    name: String,
    features: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct HyperedgeRecord {
    head: Vec<String>,
    #[serde(default)]
    tail: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    label: LabelRef,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum LabelRef {
    Index(usize),
    Name(String),
}

/// Reads and validates a dataset file.
pub fn parse_dataset(path: &Path) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io { path: path.to_owned(), source })?;
    parse_dataset_str(&text)
}

pub fn parse_dataset_str(text: &str) -> Result<Dataset, DataError> {
    let file: DatasetFile = serde_json::from_str(text).map_err(|e| DataError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    if file.vertices.is_empty() {
        return Err(field_err("vertices", "no vertices"));
    }
    if file.hyperedges.is_empty() {
        return Err(field_err("hyperedges", "no hyperedges"));
    }
    if file.classes.is_empty() {
        return Err(field_err("classes", "no classes"));
    }

    let mut ids = HashMap::new();
    let channels = file.vertices[0].features.len();
    if channels == 0 {
        return Err(field_err("vertices[0].features", "empty feature vector"));
    }
    let mut features = Array2::zeros((file.vertices.len(), channels));
    for (i, v) in file.vertices.iter().enumerate() {
        if ids.insert(v.name.clone(), i).is_some() {
            return Err(field_err(format!("vertices[{i}].name"), format!("duplicate vertex {:?}", v.name)));
        }
        if v.features.len() != channels {
            return Err(field_err(
                format!("vertices[{i}].features"),
                format!("expected {channels} values, got {}", v.features.len()),
            ));
        }
        if let Some(j) = v.features.iter().position(|x| !x.is_finite()) {
            return Err(field_err(format!("vertices[{i}].features[{j}]"), "not finite"));
        }
        features.row_mut(i).assign(&ndarray::ArrayView1::from(&v.features));
    }

    let class_ids: HashMap<&str, usize> = file.classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut edges = Vec::with_capacity(file.hyperedges.len());
    let mut labels = Vec::with_capacity(file.hyperedges.len());
    for (r, rec) in file.hyperedges.iter().enumerate() {
        let resolve = |side: &str, names: &[String]| -> Result<Vec<usize>, DataError> {
            names
                .iter()
                .enumerate()
                .map(|(k, name)| {
                    ids.get(name).copied().ok_or_else(|| {
                        field_err(format!("hyperedges[{r}].{side}[{k}]"), format!("unknown vertex {name:?}"))
                    })
                })
                .collect()
        };
        let head = resolve("head", &rec.head)?;
        let tail = resolve("tail", &rec.tail)?;
        let label = match &rec.label {
            LabelRef::Index(i) if *i < file.classes.len() => *i,
            LabelRef::Name(name) if class_ids.contains_key(name.as_str()) => class_ids[name.as_str()],
            LabelRef::Index(i) => {
                return Err(field_err(format!("hyperedges[{r}].label"), format!("class index {i} out of range")))
            }
            LabelRef::Name(name) => {
                return Err(field_err(format!("hyperedges[{r}].label"), format!("unknown class {name:?}")))
            }
        };
        labels.push(label);
        edges.push(Hyperedge::new(head, tail).with_weight(rec.weight.unwrap_or(1.0)).with_label(label));
    }

    let hypergraph = DirectedHypergraph::new(file.vertices.len(), edges).map_err(|e| match e {
        HypergraphError::IsolatedVertex { vertex } => {
            DataError::IsolatedVertex { name: file.vertices[vertex].name.clone() }
        }
        HypergraphError::OverlappingHeadTail { edge, .. }
        | HypergraphError::EmptyHead { edge }
        | HypergraphError::NonpositiveWeight { edge, .. }
        | HypergraphError::VertexOutOfRange { edge, .. } => DataError::Hypergraph { record: edge, source: e },
        HypergraphError::Empty => field_err("hyperedges", "no hyperedges"),
    })?;

    let folds = file.folds.unwrap_or_default();
    validate_folds(&folds, hypergraph.m())?;

    Ok(Dataset {
        hypergraph,
        vertex_names: file.vertices.into_iter().map(|v| v.name).collect(),
        node_features: features,
        labels,
        class_names: file.classes,
        folds,
        meta: file.meta,
    })
}

/// Checks that each fold's three splits are disjoint and in range.
pub fn validate_folds(folds: &[Fold], m: usize) -> Result<(), DataError> {
    for (f, fold) in folds.iter().enumerate() {
        let mut seen = vec![false; m];
        for (name, ids) in [("train", &fold.train), ("val", &fold.val), ("test", &fold.test)] {
            for &id in ids {
                if id >= m {
                    return Err(field_err(format!("folds[{f}].{name}"), format!("hyperedge id {id} out of range")));
                }
                if std::mem::replace(&mut seen[id], true) {
                    return Err(field_err(format!("folds[{f}].{name}"), format!("hyperedge id {id} appears twice")));
                }
            }
        }
    }
    Ok(())
}

/// Writes folds as a JSON array of `{"train", "val", "test"}` id lists.
pub fn write_folds(folds: &[Fold], path: &Path) -> Result<(), DataError> {
    let text = serde_json::to_string_pretty(folds).expect("folds serialize");
    std::fs::write(path, text).map_err(|source| DataError::Io { path: path.to_owned(), source })
}

pub fn read_folds(path: &Path, m: usize) -> Result<Vec<Fold>, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io { path: path.to_owned(), source })?;
    let folds: Vec<Fold> = serde_json::from_str(&text).map_err(|e| DataError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate_folds(&folds, m)?;
    Ok(folds)
}

/// Builds `k` stratified 50/25/25 train/validation/test splits, each from
/// its own seeded shuffle.
///
/// Hyperedges are shuffled within each class, classes are concatenated, and
/// position `p` in that order goes to train when `p % 4` is 0 or 2, to
/// validation when it is 1 and to test when it is 3. Every class therefore
/// lands within one sample of its exact share in each split.
pub fn make_folds(dataset: &Dataset, k: usize, seed: u64) -> Result<Dataset, DataError> {
    let m = dataset.hypergraph.m();
    if k < 2 || m < 4 * k {
        return Err(DataError::TooFewSamples { m, k });
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.classes()];
    for (e, &label) in dataset.labels.iter().enumerate() {
        by_class[label].push(e);
    }
    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::sub_seed(seed, &format!("fold-{f}")));
        let mut order = Vec::with_capacity(m);
        for members in &by_class {
            let mut members = members.clone();
            members.shuffle(&mut rng);
            order.extend(members);
        }
        let mut fold = Fold { train: Vec::new(), val: Vec::new(), test: Vec::new() };
        for (p, e) in order.into_iter().enumerate() {
            match p % 4 {
                0 | 2 => fold.train.push(e),
                1 => fold.val.push(e),
                _ => fold.test.push(e),
            }
        }
        for ids in [&mut fold.train, &mut fold.val, &mut fold.test] {
            ids.sort_unstable();
        }
        folds.push(fold);
    }
    let mut out = dataset.clone();
    out.folds = folds;
    Ok(out)
}

/// Parameters of the synthetic direction-motif generator.
///
/// The vertex pool is split into two halves, A and B. Every hyperedge draws
/// `s` vertices from A and `s` from B, where the side size `s` is uniform in
/// `side_size`. Heads and tails both have `s` vertices. With probability
/// `motif_strength` the class decides the roles: class `c` of `K` puts
/// `round(c * s / (K - 1))` of its A vertices into the head and the rest
/// into the tail (B fills the remaining slots). Otherwise the `2s` vertices
/// are split at random. Ignoring direction, every class has the same
/// distribution of vertex sets, so the label is visible only through roles.
///
/// Vertex features are `+signal` (A) or `-signal` (B) on every channel
/// plus Gaussian noise of scale `noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub classes: usize,
    pub per_class: usize,
    pub pool_size: usize,
    /// Inclusive range of the per-side vertex count.
    pub side_size: (usize, usize),
    pub feature_dim: usize,
    pub motif_strength: f64,
    pub noise: f64,
    pub signal: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            classes: 3,
            per_class: 200,
            pool_size: 60,
            side_size: (2, 2),
            feature_dim: 8,
            motif_strength: 1.0,
            noise: 1.0,
            signal: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Small noiseless two-class task (20 hyperedges) that a linear readout
    /// of the lifted features separates.
    pub fn separable(seed: u64) -> Self {
        Self {
            classes: 2,
            per_class: 10,
            pool_size: 8,
            side_size: (2, 2),
            feature_dim: 4,
            motif_strength: 1.0,
            noise: 0.0,
            signal: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let (lo, hi) = self.side_size;
        if self.classes == 0 || self.per_class == 0 || self.feature_dim == 0 {
            return Err(field_err("synth", "classes, per_class and feature_dim must be at least 1"));
        }
        if lo == 0 || hi < lo {
            return Err(field_err("synth.side_size", format!("invalid range {lo}..={hi}")));
        }
        if self.pool_size < 2 * hi {
            return Err(field_err("synth.pool_size", format!("need at least {} vertices for side size {hi}", 2 * hi)));
        }
        if !(0.0..=1.0).contains(&self.motif_strength) {
            return Err(field_err("synth.motif_strength", "must lie in [0, 1]"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite() && self.signal.is_finite()) {
            return Err(field_err("synth.noise", "must be finite and nonnegative"));
        }
        if self.classes > lo + 1 {
            return Err(field_err(
                "synth.side_size",
                format!("{} classes need side size at least {}", self.classes, self.classes - 1),
            ));
        }
        Ok(())
    }
}

/// Draws distinct vertices from a group, cycling through a reshuffled deck
/// so every vertex is used about equally often.
struct Deck {
    members: Vec<usize>,
    queue: Vec<usize>,
}

impl Deck {
    fn new(members: Vec<usize>) -> Self {
        Self { members, queue: Vec::new() }
    }

    fn draw<R: Rng>(&mut self, k: usize, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            if self.queue.is_empty() {
                self.queue = self.members.clone();
                self.queue.shuffle(rng);
            }
            let pos = self.queue.iter().rposition(|v| !out.contains(v));
            match pos {
                Some(p) => out.push(self.queue.swap_remove(p)),
                // every queued vertex is already drawn: start a fresh deck
                None => self.queue.clear(),
            }
        }
        out
    }
}

/// Generates a labeled dataset from a [`SynthConfig`]. Vertices never drawn
/// are dropped.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Dataset, DataError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = cfg.pool_size / 2;
    let mut deck_a = Deck::new((0..half).collect());
    let mut deck_b = Deck::new((half..cfg.pool_size).collect());

    let mut raw: Vec<(Vec<usize>, Vec<usize>, usize)> = Vec::with_capacity(cfg.classes * cfg.per_class);
    for class in 0..cfg.classes {
        for _ in 0..cfg.per_class {
            let s = rng.random_range(cfg.side_size.0..=cfg.side_size.1);
            let a = deck_a.draw(s, &mut rng);
            let b = deck_b.draw(s, &mut rng);
            let (head, tail) = if rng.random::<f64>() < cfg.motif_strength {
                let a_in_head =
                    if cfg.classes == 1 { s } else { ((class * s) as f64 / (cfg.classes - 1) as f64).round() as usize };
                let b_in_head = s - a_in_head;
                let head: Vec<usize> = a[..a_in_head].iter().chain(&b[..b_in_head]).copied().collect();
                let tail: Vec<usize> = a[a_in_head..].iter().chain(&b[b_in_head..]).copied().collect();
                (head, tail)
            } else {
                let mut all: Vec<usize> = a.into_iter().chain(b).collect();
                all.shuffle(&mut rng);
                let tail = all.split_off(s);
                (all, tail)
            };
            raw.push((head, tail, class));
        }
    }
    raw.shuffle(&mut rng);

    let mut features = Array2::zeros((cfg.pool_size, cfg.feature_dim));
    for ((v, _), x) in features.indexed_iter_mut() {
        let sign = if v < half { 1.0 } else { -1.0 };
        let z: f64 = StandardNormal.sample(&mut rng);
        *x = sign * cfg.signal + cfg.noise * z;
    }

    let mut used = vec![false; cfg.pool_size];
    for (head, tail, _) in &raw {
        for &v in head.iter().chain(tail) {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; cfg.pool_size];
    let mut kept = Vec::new();
    for v in 0..cfg.pool_size {
        if used[v] {
            remap[v] = kept.len();
            kept.push(v);
        }
    }
    let node_features = features.select(ndarray::Axis(0), &kept);
    let vertex_names =
        kept.iter().map(|&v| if v < half { format!("a{v}") } else { format!("b{}", v - half) }).collect();

    let mut labels = Vec::with_capacity(raw.len());
    let edges = raw
        .into_iter()
        .map(|(head, tail, class)| {
            labels.push(class);
            Hyperedge::new(head.into_iter().map(|v| remap[v]), tail.into_iter().map(|v| remap[v])).with_label(class)
        })
        .collect();
    let hypergraph = DirectedHypergraph::new(kept.len(), edges).expect("generated hypergraph is valid");

    Ok(Dataset {
        hypergraph,
        vertex_names,
        node_features,
        labels,
        class_names: (0..cfg.classes).map(|c| format!("class{c}")).collect(),
        folds: Vec::new(),
        meta: Some(serde_json::json!({ "generator": "direction-motif", "config": cfg })),
    })
}

/// The worked example as a dataset: one class per hyperedge and unit
/// features.
pub fn worked_example_dataset() -> Dataset {
    let h = crate::hypergraph::worked_example();
    Dataset {
        vertex_names: ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect(),
        node_features: Array2::ones((h.n(), 1)),
        labels: vec![0, 1, 2],
        class_names: ["e1", "e2", "e3"].iter().map(|s| s.to_string()).collect(),
        folds: Vec::new(),
        meta: None,
        hypergraph: h,
    }
}
