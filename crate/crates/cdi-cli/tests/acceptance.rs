//! Acceptance gate: one test per release criterion, each printing a
//! single `criterion NN <label>: PASS|FAIL` line.
//!
//! Criteria 4, 5, 7 and 8 drive the real `cdi` binary over the bundled
//! fixture corpus; the rest exercise the library crate directly.

use cdi_core::classifier::{featurize, loss_and_gradient, FeatureVector};
use cdi_core::eval::baselines::random_baseline;
use cdi_core::eval::{build_report, pearson, pearson_r, spearman_r, EvalRow};
use cdi_core::fabricate::{
    fabricate_negatives, AntonymLexicon, CollocationModel, LexiconTagger, PosTagger, SourceSentence,
};
use cdi_core::scoring::human_acceptance;
use cdi_core::types::{char_slice, LabeledSample, Lang};
use cdi_core::{ScorePair, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::Command;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap().to_path_buf()
}

fn fixtures() -> PathBuf {
    repo_root().join("fixtures")
}

/// Report the criterion verdict on one line, then enforce it.
fn verdict(num: u32, label: &str, pass: bool) {
    println!("criterion {num:02} {label}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {num:02} {label} failed");
}

// ------------------------------------------------------------------ harness

struct PipelineRun {
    dir: tempfile::TempDir,
    config: PathBuf,
}

impl PipelineRun {
    /// Write a config pointing at the bundled fixtures with an isolated
    /// work directory, mirroring `configs/fixture.toml`.
    fn new(rewrite_matrix: bool, baseline: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let fx = fixtures();
        let work = dir.path().join("work");
        let config = dir.path().join("cdi.toml");
        let body = format!(
            r#"seed = 42

[paths]
work_dir = "{work}"
pairs = "{fx}/pairs.jsonl"
annotations = "{fx}/annotations.jsonl"

[ingest]
source_mode = "fixture"
fixture_dir = "{fx}/wiki"
max_depth = 2
article_cap = 100

[ingest.roots]
en = ["Culture"]
cn = ["文化"]

[fabricate]
colloc_threshold = 0
resources_dir = "{fx}/resources"

[debias]
backend = "table"
mode = "both"
tables_dir = "{fx}/tables"

[train]
hash_bits = 18
epochs = 8

[evaluate]
permutations = 500
baseline = "{baseline}"
threshold = 0.5
rewrite_matrix = {rewrite_matrix}
min_gold_pass = 0.8
min_loo_corr = 0.0

[evaluate.gold.en]
gold-accept = 1
gold-reject = 0

[evaluate.gold.cn]
gold-accept = 1
gold-reject = 0
"#,
            work = work.display(),
            fx = fx.display(),
        );
        std::fs::write(&config, body).unwrap();
        PipelineRun { dir, config }
    }

    fn run(&self, args: &[&str]) {
        let status = Command::new(env!("CARGO_BIN_EXE_cdi"))
            .arg("--config")
            .arg(&self.config)
            .args(args)
            .env_remove("CDI_MT_ENDPOINT")
            .env_remove("CDI_SCORER_ENDPOINT")
            .env_remove("SOURCE_DATE_EPOCH")
            .env("RUST_LOG", "warn")
            .status()
            .unwrap();
        assert!(status.success(), "cdi {args:?} failed with {status}");
    }

    fn chain(&self) {
        for stage in ["ingest", "fabricate", "debias", "train", "score", "evaluate"] {
            self.run(&[stage]);
        }
    }

    fn work(&self) -> PathBuf {
        self.dir.path().join("work")
    }

    fn json(&self, name: &str) -> serde_json::Value {
        let body = std::fs::read_to_string(self.work().join(name)).unwrap();
        serde_json::from_str(&body).unwrap()
    }
}

fn difference_r(report: &serde_json::Value) -> f64 {
    report["difference"]["pearson"]["r"].as_f64().unwrap()
}

// ---------------------------------------------------------------- criteria

/// Difference scores must be the exact floating-point subtraction, and
/// acceptance ratios the exact division, across the JSONL round trip.
#[test]
fn criterion_01_difference_score_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut ok = true;
    for i in 0..1000 {
        let mp_en: f64 = rng.gen();
        let mp_cn: f64 = rng.gen();
        let rec = ScorePair { pair_id: format!("p{i}"), mp_en, mp_cn, d_model: mp_en - mp_cn };
        let line = serde_json::to_string(&rec).unwrap();
        let back: ScorePair = serde_json::from_str(&line).unwrap();
        ok &= back.d_model.to_bits() == (mp_en - mp_cn).to_bits();
        ok &= back.mp_en.to_bits() == mp_en.to_bits();
        ok &= back.d_model.to_bits() == (back.mp_en - back.mp_cn).to_bits();
    }
    ok &= human_acceptance(13, 20).unwrap() == 0.65;
    verdict(1, "difference score identity", ok);
}

/// Definitional re-implementations of both correlations, written
/// independently of the library internals.
mod oracle {
    pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for (a, b) in x.iter().zip(y) {
            cov += (a - mx) * (b - my);
            vx += (a - mx) * (a - mx);
            vy += (b - my) * (b - my);
        }
        cov / (vx.sqrt() * vy.sqrt())
    }

    /// Average ranks for ties, then Pearson over the ranks.
    pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
        pearson(&ranks(x), &ranks(y))
    }

    fn ranks(values: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let mut out = vec![0.0; values.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                out[idx] = avg;
            }
            i = j + 1;
        }
        out
    }
}

#[test]
fn criterion_02_correlations_match_definitions() {
    let started = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.gen_range(3..=50usize);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        ok &= (pearson_r(&x, &y).unwrap() - oracle::pearson(&x, &y)).abs() <= 1e-9;
        ok &= (spearman_r(&x, &y).unwrap() - oracle::spearman(&x, &y)).abs() <= 1e-9;
    }
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [1.0, 3.0, 2.0, 4.0];
    ok &= (pearson_r(&x, &y).unwrap() - 0.8).abs() <= 1e-12;
    let long_x: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
    let long_y: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
    let perm = pearson(&long_x, &long_y, 1000, 7).unwrap();
    ok &= perm.p_value > 0.0 && perm.p_value <= 1.0;
    ok &= started.elapsed().as_secs() < 10;
    verdict(2, "correlations match definitions", ok);
}

/// The four-adjective showcase sentence and the guard corpus, using the
/// bundled lexicons exactly as the pipeline loads them.
#[test]
fn criterion_03_fabrication_and_guards() {
    let res = fixtures().join("resources");
    let tagger = LexiconTagger::load(&res.join("adjectives.en.txt"), Lang::En).unwrap();
    let lexicon = AntonymLexicon::load(&res.join("antonyms.en.tsv"), Lang::En).unwrap();
    let guard_text =
        std::fs::read_to_string(fixtures().join("guard").join("guard.en.txt")).unwrap();
    let guard_sentences: Vec<&str> = guard_text.lines().filter(|l| !l.is_empty()).collect();

    let mut colloc = CollocationModel::new(Lang::En, 3);
    colloc.load_stoplist(&res.join("collocations.en.txt")).unwrap();
    colloc.observe_all(guard_sentences.iter().copied());

    let mut ok = guard_sentences.len() == 100;

    let showcase = SourceSentence {
        id: "fig".into(),
        lang: Lang::En,
        text: "Making safe abortion legal and accessible reduces maternal deaths.".into(),
    };
    let negatives = fabricate_negatives(&showcase, &lexicon, &colloc, &tagger).unwrap();
    ok &= negatives.len() == 4;
    let mut flipped: Vec<String> = Vec::new();
    for neg in &negatives {
        let span = neg.flipped_span.as_ref().unwrap();
        let (start, end) = (span.0 as usize, span.1 as usize);
        // Differs from the parent only at the flipped span.
        let neg_len = neg.text.chars().count();
        let parent_len = showcase.text.chars().count();
        ok &= char_slice(&neg.text, 0, start) == char_slice(&showcase.text, 0, start);
        let tail_parent = parent_len - (neg_len - end);
        ok &= char_slice(&neg.text, end, neg_len)
            == char_slice(&showcase.text, tail_parent, parent_len);
        ok &= char_slice(&neg.text, start, end) == span.2;
        flipped.push(span.2.clone());
    }
    ok &= flipped == ["unsafe", "illegal", "inaccessible", "paternal"];

    // Guard corpus: every sentence carries a flippable adjective, yet the
    // stoplist, frequency and temporal guards must block every one.
    let mut spans_seen = 0usize;
    let mut false_flips = 0usize;
    for (i, text) in guard_sentences.iter().enumerate() {
        spans_seen += tagger.adjective_spans(text).unwrap().len();
        let sentence =
            SourceSentence { id: format!("g{i}"), lang: Lang::En, text: (*text).to_string() };
        false_flips += fabricate_negatives(&sentence, &lexicon, &colloc, &tagger).unwrap().len();
    }
    ok &= spans_seen == 100;
    ok &= false_flips == 0;
    verdict(3, "fabrication showcase and guards", ok);
}

/// Fabricated datasets are balanced: equal class counts and every
/// negative's parent retained, checked on the pipeline's own output.
#[test]
fn criterion_04_dataset_balance() {
    let run = PipelineRun::new(false, "cdi");
    run.run(&["ingest", "--lang", "en"]);
    run.run(&["fabricate", "--lang", "en"]);
    let body = std::fs::read_to_string(run.work().join("samples.en.jsonl")).unwrap();
    let samples: Vec<LabeledSample> =
        body.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let positives: Vec<&LabeledSample> = samples.iter().filter(|s| s.label == 1).collect();
    let negatives: Vec<&LabeledSample> = samples.iter().filter(|s| s.label == 0).collect();
    let mut ok = !positives.is_empty();
    ok &= positives.len() == negatives.len();
    let pos_ids: std::collections::BTreeSet<&str> =
        positives.iter().map(|p| p.id.as_str()).collect();
    let mut parents_seen = std::collections::BTreeSet::new();
    for neg in &negatives {
        let parent = neg.parent_id.as_deref().unwrap_or("");
        ok &= pos_ids.contains(parent);
        ok &= parents_seen.insert(parent); // exactly one negative per parent
    }
    verdict(4, "fabricated dataset balance", ok);
}

/// The rewrite-mode grid: strong diagonals, a real drop for the
/// unrewritten model on rewritten data, and the both-rewrites row
/// weakly best in every test column.
#[test]
fn criterion_05_rewrite_matrix_directions() {
    let started = std::time::Instant::now();
    let run = PipelineRun::new(true, "cdi");
    run.chain();
    let table3 = run.json("table3.json");
    let mut ok = true;
    for lang in ["en", "cn"] {
        let grid = &table3[lang]["grid"];
        let f1 = |i: usize, j: usize, key: &str| grid[i][j][key].as_f64().unwrap();
        for metric in ["f1_negative", "f1_positive"] {
            // (a) in-setting diagonals are strong
            for i in 0..3 {
                ok &= f1(i, i, metric) >= 0.85;
            }
            // (b) none-trained on fully rewritten data drops >= 2 points
            ok &= f1(0, 2, metric) <= f1(0, 0, metric) - 0.02;
            // (c) both-trained row weakly best in every test column
            for j in 0..3 {
                let col_max = (0..3).map(|i| f1(i, j, metric)).fold(f64::NEG_INFINITY, f64::max);
                ok &= f1(2, j, metric) >= col_max - 0.01;
            }
        }
    }
    ok &= started.elapsed().as_secs() < 300;
    verdict(5, "rewrite matrix directions", ok);
}

/// Random difference scores carry no signal against a fixed reference
/// vector: the null stays null across 1000 seeds.
#[test]
fn criterion_06_random_baseline_null() {
    let started = std::time::Instant::now();
    let human: Vec<f64> =
        (0..128).map(|i| ((i as f64) * 0.37).sin() * 0.5 + ((i % 7) as f64 - 3.0) / 6.0).collect();
    let mut total = 0.0;
    for seed in 0..1000u64 {
        let (mp_en, mp_cn) = random_baseline(128, seed);
        let d: Vec<f64> = mp_en.iter().zip(&mp_cn).map(|(a, b)| a - b).collect();
        total += pearson_r(&d, &human).unwrap().abs();
    }
    let mean = total / 1000.0;
    let ok = mean <= 0.09 && started.elapsed().as_secs() < 30;
    verdict(6, "random baseline stays null", ok);
}

/// Full pipeline beats the unrewritten configuration, which beats
/// random chance, on the planted bilingual pair set.
#[test]
fn criterion_07_pipeline_ordering() {
    let started = std::time::Instant::now();
    let run = PipelineRun::new(false, "cdi");
    run.chain();
    let r_cdi = difference_r(&run.json("report.json"));

    // Same artifacts, models retrained without the rewrite pass.
    run.run(&["train", "--mode", "none"]);
    run.run(&["score"]);
    run.run(&["evaluate"]);
    let r_weak = difference_r(&run.json("report.json"));

    let random = PipelineRun::new(false, "random");
    std::fs::create_dir_all(random.work()).unwrap();
    for name in ["scores.jsonl", "human.jsonl"] {
        std::fs::copy(run.work().join(name), random.work().join(name)).unwrap();
    }
    random.run(&["evaluate"]);
    let r_random = difference_r(&random.json("report.json"));

    let ok = r_cdi > r_weak && r_weak > r_random && started.elapsed().as_secs() < 300;
    println!("criterion 07 detail: r_cdi={r_cdi:.3} r_weak={r_weak:.3} r_random={r_random:.3}");
    verdict(7, "pipeline beats ablations", ok);
}

/// Two runs with one seed must produce byte-identical artifacts,
/// including models, caches and reports.
#[test]
fn criterion_08_byte_identical_reruns() {
    let runs = [PipelineRun::new(true, "cdi"), PipelineRun::new(true, "cdi")];
    for run in &runs {
        run.chain();
        run.run(&["plotdata"]);
    }
    let list = |root: &Path| -> Vec<(String, PathBuf)> {
        let mut out = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(dir) = stack.pop() {
            for entry in std::fs::read_dir(&dir).unwrap() {
                let path = entry.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                    out.push((rel, path));
                }
            }
        }
        out.sort();
        out
    };
    let a = list(&runs[0].work());
    let b = list(&runs[1].work());
    let mut ok = !a.is_empty() && a.len() == b.len();
    for ((rel_a, path_a), (rel_b, path_b)) in a.iter().zip(&b) {
        ok &= rel_a == rel_b;
        ok &= std::fs::read(path_a).unwrap() == std::fs::read(path_b).unwrap();
    }
    println!("criterion 08 detail: compared {} artifacts", a.len());
    verdict(8, "byte-identical reruns", ok);
}

/// Analytic gradients match central finite differences on random
/// instances of the training objective.
#[test]
fn criterion_09_gradient_check() {
    let started = std::time::Instant::now();
    let config = TrainConfig { hash_bits: 10, ngram_max: 2, ..TrainConfig::default() };
    let dim = config.capacity();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let words = ["tea", "warm", "cold", "street", "clean", "late", "ferry", "hall"];
    let mut ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(2..=6usize);
        let batch: Vec<(FeatureVector, f64)> = (0..n)
            .map(|_| {
                let len = rng.gen_range(3..=8usize);
                let text: Vec<&str> =
                    (0..len).map(|_| words[rng.gen_range(0..words.len())]).collect();
                let fv = featurize(&text.join(" "), Lang::En, &config).unwrap();
                (fv, f64::from(rng.gen_range(0..=1u32)))
            })
            .collect();
        let mut weights = vec![0.0f64; dim];
        for w in weights.iter_mut() {
            *w = rng.gen_range(-1.0..1.0);
        }
        let bias: f64 = rng.gen_range(-0.5..0.5);
        let l2 = 1e-3;
        let (_, grad_w, grad_b) = loss_and_gradient(&batch, &weights, bias, l2);

        let h = 1e-5;
        let touched: std::collections::BTreeSet<usize> =
            batch.iter().flat_map(|(fv, _)| fv.iter().map(|(i, _)| i as usize)).collect();
        for &i in &touched {
            let mut plus = weights.clone();
            plus[i] += h;
            let mut minus = weights.clone();
            minus[i] -= h;
            let (lp, _, _) = loss_and_gradient(&batch, &plus, bias, l2);
            let (lm, _, _) = loss_and_gradient(&batch, &minus, bias, l2);
            let numeric = (lp - lm) / (2.0 * h);
            let rel = (grad_w[i] - numeric).abs() / grad_w[i].abs().max(1.0);
            ok &= rel <= 1e-6;
        }
        let (lp, _, _) = loss_and_gradient(&batch, &weights, bias + h, l2);
        let (lm, _, _) = loss_and_gradient(&batch, &weights, bias - h, l2);
        let numeric_b = (lp - lm) / (2.0 * h);
        ok &= (grad_b - numeric_b).abs() / grad_b.abs().max(1.0) <= 1e-6;
    }
    ok &= started.elapsed().as_secs() < 5;
    verdict(9, "analytic gradients", ok);
}

/// Binary accuracies reproduce an exact hand count, including the
/// strict-threshold boundary cases (0.5 within culture, 0 for the
/// difference).
#[test]
fn criterion_10_binary_accuracy_hand_count() {
    // (mp_en, mp_cn, ha_en, ha_cn); hand-derived matches:
    //   en 7/10, cn 8/10, difference 9/10 (row 4 is the lone mismatch).
    let data: &[(f64, f64, f64, f64)] = &[
        (0.90, 0.10, 0.80, 0.20),
        (0.50, 0.60, 0.60, 0.70), // mp_en 0.5 binarizes to 0 (strict >)
        (0.20, 0.50, 0.10, 0.40), // mp_cn 0.5 binarizes to 0
        (0.70, 0.20, 0.40, 0.60),
        (0.51, 0.49, 0.55, 0.45),
        (0.30, 0.90, 0.65, 0.85),
        (0.80, 0.30, 0.90, 0.10),
        (0.10, 0.55, 0.50, 0.50), // d_human exactly 0 binarizes to 0
        (0.60, 0.35, 0.75, 0.30),
        (0.45, 0.65, 0.20, 0.90),
    ];
    let rows: Vec<EvalRow> = data
        .iter()
        .enumerate()
        .map(|(i, &(mp_en, mp_cn, ha_en, ha_cn))| EvalRow {
            pair_id: format!("p{i}"),
            mp_en,
            mp_cn,
            ha_en,
            ha_cn,
        })
        .collect();
    let report = build_report("hand", &rows, 100, 5, 0.5).unwrap();
    let ok = report.binary_accuracy.en == 0.7
        && report.binary_accuracy.cn == 0.8
        && report.binary_accuracy.difference == 0.9;
    verdict(10, "binary accuracy hand count", ok);
}
