//! Downstream evaluation harness: geodesic k-NN and a linear softmax head,
//! run over multiple seeds with and without augmentation.

use crate::augment::{augment_with_counts, mixup_baseline};
use crate::dataset::{project_set, PreShapeSet, RawSet};
use crate::error::{Error, Result};
use crate::fit::{fit_all_classes, FitConfig};
use crate::par::par_map;
use crate::preshape::PreShapeVector;
use crate::rng::{class_stream, indexed_stream, StreamKind};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    None,
    Faagc,
    Mixup,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Faagc => "faagc",
            Method::Mixup => "mixup",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Method::None),
            "faagc" => Ok(Method::Faagc),
            "mixup" => Ok(Method::Mixup),
            other => Err(format!("unknown method {other:?} (none|faagc|mixup)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
    Linear,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Linear => "linear",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "knn" => Ok(ClassifierKind::Knn),
            "linear" => Ok(ClassifierKind::Linear),
            other => Err(format!("unknown classifier {other:?} (knn|linear)")),
        }
    }
}

/// Linear softmax head training protocol. `p_g` is the per-epoch probability
/// of training on the projected originals alone; otherwise the augmented
/// cross-entropy joins with weight `lambda`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeadConfig {
    pub p_g: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub lr: f64,
}

impl Default for HeadConfig {
    fn default() -> Self {
        Self {
            p_g: 0.3,
            lambda: 0.5,
            epochs: 200,
            lr: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub method: Method,
    pub classifier: ClassifierKind,
    pub k: usize,
    /// Augmented samples per class; `None` means match each class's own
    /// training count (the n = m protocol).
    pub n: Option<usize>,
    pub seeds: Vec<u64>,
    pub fit: FitConfig,
    pub head: HeadConfig,
    /// Project features to pre-shape space before classification. The raw
    /// variant (false) is only defined for the no-augmentation k-NN baseline
    /// and uses Euclidean distance.
    pub project: bool,
    pub threads: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            method: Method::None,
            classifier: ClassifierKind::Knn,
            k: 5,
            n: None,
            seeds: (0..6).collect(),
            fit: FitConfig::default(),
            head: HeadConfig::default(),
            project: true,
            threads: 1,
        }
    }
}

/// Per-seed accuracies plus their mean and (population) standard deviation,
/// with the configuration echoed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub classifier: String,
    pub k: usize,
    pub n: Option<usize>,
    pub project: bool,
    pub seeds: Vec<u64>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl EvalReport {
    /// Per-seed rows: `seed,method,classifier,accuracy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,method,classifier,accuracy\n");
        for (seed, acc) in self.seeds.iter().zip(self.accuracies.iter()) {
            out.push_str(&format!(
                "{seed},{},{},{acc}\n",
                self.method, self.classifier
            ));
        }
        out
    }
}

/// Flattened view of a pre-shape set for classification: stable sample
/// order, labels as indices into a sorted name table.
struct FlatSet {
    vectors: Vec<PreShapeVector>,
    labels: Vec<usize>,
    names: Vec<String>,
}

impl FlatSet {
    fn from_set(set: &PreShapeSet) -> Self {
        let names: Vec<String> = set.classes.keys().cloned().collect();
        let mut vectors = Vec::with_capacity(set.total());
        let mut labels = Vec::with_capacity(set.total());
        for (idx, members) in set.classes.values().enumerate() {
            for m in members {
                vectors.push(m.vector.clone());
                labels.push(idx);
            }
        }
        Self {
            vectors,
            labels,
            names,
        }
    }
}

/// Majority label among the k nearest neighbors under geodesic distance.
/// Distance ties break toward the smaller sample index, vote ties toward the
/// smallest label.
pub fn knn_predict(train: &PreShapeSet, query: &PreShapeVector, k: usize) -> Result<String> {
    if train.total() == 0 {
        return Err(Error::EmptyTrainSet);
    }
    if k < 1 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let flat = FlatSet::from_set(train);
    let idx = knn_vote(&flat, query.coords(), k, geodesic_distance_slices)?;
    Ok(flat.names[idx].clone())
}

fn geodesic_distance_slices(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        dot += x * y;
    }
    dot.clamp(-1.0, 1.0).acos()
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn knn_vote(
    flat: &FlatSet,
    query: &[f64],
    k: usize,
    dist: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<usize> {
    let mut scored: Vec<(f64, usize)> = flat
        .vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (dist(v.coords(), query), i))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut votes = vec![0usize; flat.names.len()];
    for (_, i) in scored.iter().take(k.min(scored.len())) {
        votes[flat.labels[*i]] += 1;
    }
    // Smallest label wins ties; names are sorted, so the first max works.
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    Ok(best)
}

/// Multinomial logistic weights plus bias, trained by Adam on cross-entropy.
#[derive(Debug, Clone)]
pub struct LinearHead {
    pub weights: Vec<f64>, // n_classes x dim, row-major
    pub bias: Vec<f64>,
    pub names: Vec<String>,
    dim: usize,
}

impl LinearHead {
    #[allow(clippy::needless_range_loop)]
    pub fn predict(&self, coords: &[f64]) -> &str {
        let nc = self.names.len();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for c in 0..nc {
            let mut score = self.bias[c];
            for i in 0..self.dim {
                score += self.weights[c * self.dim + i] * coords[i];
            }
            if score > best_score {
                best_score = score;
                best = c;
            }
        }
        &self.names[best]
    }
}

/// Trains the linear head on the projected originals and (per the weighted
/// protocol) the augmented set: each epoch, with probability `p_g` the loss
/// is cross-entropy on the originals alone, otherwise the augmented
/// cross-entropy is added with weight `lambda`.
pub fn train_linear_head(
    train_ps: &PreShapeSet,
    train_aug: &PreShapeSet,
    config: &HeadConfig,
    rng: &mut ChaCha12Rng,
) -> Result<LinearHead> {
    if train_ps.total() == 0 {
        return Err(Error::EmptyTrainSet);
    }
    if !(0.0..=1.0).contains(&config.p_g) || config.lambda < 0.0 {
        return Err(Error::InvalidConfig(
            "need 0 <= p_g <= 1 and lambda >= 0".into(),
        ));
    }
    if train_aug.total() > 0 {
        let ps_labels = train_ps.labels();
        let aug_labels = train_aug.labels();
        if ps_labels != aug_labels {
            return Err(Error::LabelMismatch {
                detail: format!("originals {ps_labels:?} vs augmented {aug_labels:?}"),
            });
        }
    }

    let ps = FlatSet::from_set(train_ps);
    let aug = FlatSet::from_set(train_aug);
    let nc = ps.names.len();
    let dim = ps.vectors[0].len();

    let mut weights = vec![0.0; nc * dim];
    let mut bias = vec![0.0; nc];
    let mut m_w = vec![0.0; nc * dim];
    let mut v_w = vec![0.0; nc * dim];
    let mut m_b = vec![0.0; nc];
    let mut v_b = vec![0.0; nc];
    let (b1, b2, eps) = (
        crate::adam::ADAM_BETA1,
        crate::adam::ADAM_BETA2,
        crate::adam::ADAM_EPS,
    );

    let mut g_w = vec![0.0; nc * dim];
    let mut g_b = vec![0.0; nc];

    for step in 1..=config.epochs {
        for g in g_w.iter_mut() {
            *g = 0.0;
        }
        for g in g_b.iter_mut() {
            *g = 0.0;
        }

        let ps_only = rng.gen::<f64>() < config.p_g;
        accumulate_ce_grad(&ps, &weights, &bias, nc, dim, 1.0, &mut g_w, &mut g_b);
        if !ps_only && !aug.vectors.is_empty() && config.lambda > 0.0 {
            accumulate_ce_grad(
                &aug,
                &weights,
                &bias,
                nc,
                dim,
                config.lambda,
                &mut g_w,
                &mut g_b,
            );
        }

        let bc1 = 1.0 - b1.powi(step as i32);
        let bc2 = 1.0 - b2.powi(step as i32);
        for i in 0..weights.len() {
            m_w[i] = b1 * m_w[i] + (1.0 - b1) * g_w[i];
            v_w[i] = b2 * v_w[i] + (1.0 - b2) * g_w[i] * g_w[i];
            weights[i] -= config.lr * (m_w[i] / bc1) / ((v_w[i] / bc2).sqrt() + eps);
        }
        for i in 0..bias.len() {
            m_b[i] = b1 * m_b[i] + (1.0 - b1) * g_b[i];
            v_b[i] = b2 * v_b[i] + (1.0 - b2) * g_b[i] * g_b[i];
            bias[i] -= config.lr * (m_b[i] / bc1) / ((v_b[i] / bc2).sqrt() + eps);
        }
    }

    Ok(LinearHead {
        weights,
        bias,
        names: ps.names,
        dim,
    })
}

/// Mean softmax cross-entropy gradient of one flat set, scaled by `weight`,
/// accumulated into the running gradients.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn accumulate_ce_grad(
    set: &FlatSet,
    weights: &[f64],
    bias: &[f64],
    nc: usize,
    dim: usize,
    weight: f64,
    g_w: &mut [f64],
    g_b: &mut [f64],
) {
    let n = set.vectors.len();
    if n == 0 {
        return;
    }
    let scale = weight / n as f64;
    let mut logits = vec![0.0; nc];
    for (x, &y) in set.vectors.iter().zip(set.labels.iter()) {
        let coords = x.coords();
        for c in 0..nc {
            let mut s = bias[c];
            for i in 0..dim {
                s += weights[c * dim + i] * coords[i];
            }
            logits[c] = s;
        }
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for l in logits.iter_mut() {
            *l = (*l - max).exp();
            denom += *l;
        }
        for c in 0..nc {
            let p = logits[c] / denom;
            let delta = scale * (p - if c == y { 1.0 } else { 0.0 });
            g_b[c] += delta;
            for i in 0..dim {
                g_w[c * dim + i] += delta * coords[i];
            }
        }
    }
}

fn label_sets_agree(train: &RawSet, test: &RawSet) -> Result<()> {
    let a = train.labels();
    let b = test.labels();
    if a != b {
        return Err(Error::LabelMismatch {
            detail: format!("train {a:?} vs test {b:?}"),
        });
    }
    Ok(())
}

/// Runs the full per-seed pipeline (project, optionally fit + augment, train
/// and score the classifier) and aggregates mean and standard deviation.
pub fn evaluate(train_raw: &RawSet, test_raw: &RawSet, config: &EvalConfig) -> Result<EvalReport> {
    train_raw.validate_nonempty()?;
    test_raw.validate_nonempty()?;
    label_sets_agree(train_raw, test_raw)?;
    if config.seeds.is_empty() {
        return Err(Error::InvalidConfig("need at least one seed".into()));
    }
    if !config.project
        && !(config.method == Method::None && config.classifier == ClassifierKind::Knn)
    {
        return Err(Error::InvalidConfig(
            "raw-space evaluation is only defined for the no-augmentation k-NN baseline".into(),
        ));
    }

    let jobs: Vec<u64> = config.seeds.clone();
    let outcomes = par_map(jobs, config.threads, |seed| {
        run_single_seed(train_raw, test_raw, config, seed)
    });

    let mut accuracies = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        accuracies.push(outcome?);
    }
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    let var = accuracies
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / accuracies.len() as f64;

    Ok(EvalReport {
        method: config.method.as_str().to_string(),
        classifier: config.classifier.as_str().to_string(),
        k: config.k,
        n: config.n,
        project: config.project,
        seeds: config.seeds.clone(),
        accuracies,
        mean,
        std: var.sqrt(),
    })
}

fn run_single_seed(
    train_raw: &RawSet,
    test_raw: &RawSet,
    config: &EvalConfig,
    seed: u64,
) -> Result<f64> {
    if !config.project {
        return raw_knn_accuracy(train_raw, test_raw, config.k);
    }

    let train_ps = project_set(train_raw)?;
    let test_ps = project_set(test_raw)?;

    let aug: PreShapeSet = match config.method {
        Method::None => PreShapeSet::new(),
        Method::Faagc => {
            let fit_config = FitConfig {
                seed,
                ..config.fit.clone()
            };
            // Class fits already parallelize across seeds here; keep each
            // seed's fit single-threaded for determinism bookkeeping.
            let curves = fit_all_classes(train_raw, &fit_config, 1)?;
            let counts: Vec<(String, usize)> = train_raw
                .classes
                .iter()
                .map(|(label, members)| (label.clone(), config.n.unwrap_or(members.len())))
                .collect();
            augment_with_counts(&curves, &counts, seed)?
        }
        Method::Mixup => {
            let mut out = PreShapeSet::new();
            for (label, members) in &train_ps.classes {
                let vectors: Vec<PreShapeVector> =
                    members.iter().map(|m| m.vector.clone()).collect();
                let n = config.n.unwrap_or(vectors.len());
                let mut rng = class_stream(seed, label, StreamKind::Augment);
                let generated = mixup_baseline(&vectors, n, &mut rng).map_err(|e| match e {
                    Error::TooFewSamples { count, need, .. } => Error::TooFewSamples {
                        label: label.clone(),
                        count,
                        need,
                    },
                    other => other,
                })?;
                for v in generated {
                    out.push(label.clone(), v, true);
                }
            }
            out
        }
    };

    match config.classifier {
        ClassifierKind::Knn => {
            let train_set = train_ps.merged(aug);
            let flat = FlatSet::from_set(&train_set);
            let mut correct = 0usize;
            let mut total = 0usize;
            for (label, members) in &test_ps.classes {
                for m in members {
                    let idx = knn_vote(&flat, m.vector.coords(), config.k, |a, b| {
                        geodesic_distance_slices(a, b)
                    })?;
                    if &flat.names[idx] == label {
                        correct += 1;
                    }
                    total += 1;
                }
            }
            Ok(correct as f64 / total as f64)
        }
        ClassifierKind::Linear => {
            let mut rng = indexed_stream(seed, 0, StreamKind::Eval);
            let head = train_linear_head(&train_ps, &aug, &config.head, &mut rng)?;
            let mut correct = 0usize;
            let mut total = 0usize;
            for (label, members) in &test_ps.classes {
                for m in members {
                    if head.predict(m.vector.coords()) == label {
                        correct += 1;
                    }
                    total += 1;
                }
            }
            Ok(correct as f64 / total as f64)
        }
    }
}

/// No-projection baseline: Euclidean k-NN directly on raw features.
fn raw_knn_accuracy(train_raw: &RawSet, test_raw: &RawSet, k: usize) -> Result<f64> {
    let names: Vec<String> = train_raw.labels();
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for (idx, members) in train_raw.classes.values().enumerate() {
        for m in members {
            vectors.push(m.values().to_vec());
            labels.push(idx);
        }
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    for (label, members) in &test_raw.classes {
        for m in members {
            let mut scored: Vec<(f64, usize)> = vectors
                .iter()
                .enumerate()
                .map(|(i, v)| (euclidean_distance(v, m.values()), i))
                .collect();
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut votes = vec![0usize; names.len()];
            for (_, i) in scored.iter().take(k.min(scored.len())) {
                votes[labels[*i]] += 1;
            }
            let mut best = 0;
            for (c, &v) in votes.iter().enumerate() {
                if v > votes[best] {
                    best = c;
                }
            }
            if names[best] == *label {
                correct += 1;
            }
            total += 1;
        }
    }
    Ok(correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preshape::{project, RawFeature};
    use crate::synth::{synth, SynthKind};

    fn two_cluster_set() -> PreShapeSet {
        // Class "a" near one pre-shape, class "b" near its antipode.
        let mut out = PreShapeSet::new();
        for i in 0..4 {
            let eps = i as f64 * 0.01;
            let a = project(&RawFeature::new(vec![1.0 + eps, 2.0, 4.0, 0.5]).unwrap()).unwrap();
            let b = project(&RawFeature::new(vec![-1.0 - eps, -2.0, -4.0, -0.5]).unwrap()).unwrap();
            out.push("a", a, false);
            out.push("b", b, false);
        }
        out
    }

    #[test]
    fn knn_identifies_clusters() {
        let train = two_cluster_set();
        let query = project(&RawFeature::new(vec![1.0, 2.1, 3.9, 0.55]).unwrap()).unwrap();
        assert_eq!(knn_predict(&train, &query, 1).unwrap(), "a");
        assert_eq!(knn_predict(&train, &query, 3).unwrap(), "a");

        // k = train size with one label only.
        let mut single = PreShapeSet::new();
        for m in train.classes["b"].iter() {
            single.push("b", m.vector.clone(), false);
        }
        assert_eq!(knn_predict(&single, &query, 4).unwrap(), "b");

        // Exact training member comes back with its own label.
        let member = train.classes["b"][0].vector.clone();
        assert_eq!(knn_predict(&train, &member, 1).unwrap(), "b");
    }

    #[test]
    fn knn_rejects_empty_train() {
        let query = project(&RawFeature::new(vec![1.0, 2.0, 4.0, 0.5]).unwrap()).unwrap();
        assert!(matches!(
            knn_predict(&PreShapeSet::new(), &query, 1),
            Err(Error::EmptyTrainSet)
        ));
    }

    #[test]
    fn linear_head_separates_linearly_separable_data() {
        let train = two_cluster_set();
        let config = HeadConfig {
            epochs: 300,
            ..HeadConfig::default()
        };
        let mut rng = indexed_stream(1, 0, StreamKind::Eval);
        let head = train_linear_head(&train, &PreShapeSet::new(), &config, &mut rng).unwrap();
        for (label, members) in &train.classes {
            for m in members {
                assert_eq!(head.predict(m.vector.coords()), label);
            }
        }
    }

    #[test]
    fn head_ignores_augmented_when_pg_is_one() {
        let train = two_cluster_set();
        // Two very different augmented sets; p_g = 1 must make them moot.
        let mut aug1 = PreShapeSet::new();
        let mut aug2 = PreShapeSet::new();
        for (i, m) in train.classes["a"].iter().enumerate() {
            aug1.push(if i % 2 == 0 { "a" } else { "b" }, m.vector.clone(), true);
            aug2.push(if i % 2 == 0 { "b" } else { "a" }, m.vector.clone(), true);
        }
        let config = HeadConfig {
            p_g: 1.0,
            epochs: 50,
            ..HeadConfig::default()
        };
        let mut rng1 = indexed_stream(7, 0, StreamKind::Eval);
        let mut rng2 = indexed_stream(7, 0, StreamKind::Eval);
        let h1 = train_linear_head(&train, &aug1, &config, &mut rng1).unwrap();
        let h2 = train_linear_head(&train, &aug2, &config, &mut rng2).unwrap();
        assert_eq!(h1.weights, h2.weights);
        assert_eq!(h1.bias, h2.bias);
    }

    #[test]
    fn head_with_zero_lambda_matches_ps_only() {
        let train = two_cluster_set();
        let mut aug = PreShapeSet::new();
        for m in train.classes["a"].iter() {
            aug.push("a", m.vector.clone(), true);
        }
        for m in train.classes["b"].iter() {
            aug.push("b", m.vector.clone(), true);
        }
        let zero_lambda = HeadConfig {
            lambda: 0.0,
            p_g: 0.0,
            epochs: 40,
            ..HeadConfig::default()
        };
        let mut rng1 = indexed_stream(9, 0, StreamKind::Eval);
        let mut rng2 = indexed_stream(9, 0, StreamKind::Eval);
        let with_aug = train_linear_head(&train, &aug, &zero_lambda, &mut rng1).unwrap();
        let without =
            train_linear_head(&train, &PreShapeSet::new(), &zero_lambda, &mut rng2).unwrap();
        assert_eq!(with_aug.weights, without.weights);
    }

    #[test]
    fn head_rejects_label_mismatch() {
        let train = two_cluster_set();
        let mut aug = PreShapeSet::new();
        aug.push("zzz", train.classes["a"][0].vector.clone(), true);
        let mut rng = indexed_stream(3, 0, StreamKind::Eval);
        assert!(matches!(
            train_linear_head(&train, &aug, &HeadConfig::default(), &mut rng),
            Err(Error::LabelMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_is_deterministic_and_seedwise() {
        let train = synth(SynthKind::Gaussian, 3, 4, 8, 0.05, 11).unwrap();
        let test = synth(SynthKind::Gaussian, 3, 12, 8, 0.05, 11).unwrap();
        let config = EvalConfig {
            seeds: vec![0, 1],
            ..EvalConfig::default()
        };
        let a = evaluate(&train, &test, &config).unwrap();
        let b = evaluate(&train, &test, &config).unwrap();
        assert_eq!(a.accuracies, b.accuracies);
        assert_eq!(a.seeds, vec![0, 1]);
        assert_eq!(a.accuracies.len(), 2);

        let single = EvalConfig {
            seeds: vec![0],
            ..EvalConfig::default()
        };
        let s = evaluate(&train, &test, &single).unwrap();
        assert_eq!(s.std, 0.0);
    }

    #[test]
    fn evaluate_faagc_runs_end_to_end() {
        let train = synth(SynthKind::Geodesic, 2, 5, 8, 0.02, 13).unwrap();
        let test = synth(SynthKind::Geodesic, 2, 10, 8, 0.02, 13).unwrap();
        let config = EvalConfig {
            method: Method::Faagc,
            seeds: vec![0],
            fit: FitConfig {
                epochs: 50,
                ..FitConfig::default()
            },
            ..EvalConfig::default()
        };
        let report = evaluate(&train, &test, &config).unwrap();
        assert!(report.mean >= 0.0 && report.mean <= 1.0);
        let csv = report.to_csv();
        assert!(csv.starts_with("seed,method,classifier,accuracy\n"));
        assert!(csv.contains("faagc"));
    }

    #[test]
    fn evaluate_rejects_raw_with_augmentation() {
        let train = synth(SynthKind::Gaussian, 2, 3, 8, 0.05, 1).unwrap();
        let test = synth(SynthKind::Gaussian, 2, 3, 8, 0.05, 1).unwrap();
        let config = EvalConfig {
            method: Method::Faagc,
            project: false,
            ..EvalConfig::default()
        };
        assert!(evaluate(&train, &test, &config).is_err());
    }

    #[test]
    fn evaluate_threaded_matches_sequential() {
        let train = synth(SynthKind::Gaussian, 3, 4, 8, 0.05, 17).unwrap();
        let test = synth(SynthKind::Gaussian, 3, 8, 8, 0.05, 17).unwrap();
        let base = EvalConfig {
            seeds: vec![0, 1, 2, 3],
            ..EvalConfig::default()
        };
        let threaded = EvalConfig {
            threads: 4,
            ..base.clone()
        };
        let a = evaluate(&train, &test, &base).unwrap();
        let b = evaluate(&train, &test, &threaded).unwrap();
        assert_eq!(a.accuracies, b.accuracies);
    }
}
