//! Deterministic synthetic workloads for the pipeline benchmarks.
//!
//! Benchmarks need inputs that are cheap to build, stable run to run,
//! and shaped like the real data (short opinionated sentences about
//! everyday practices). Everything here cycles fixed word lists instead
//! of drawing random numbers so every run measures the same bytes.

use cdi_core::types::{LabeledSample, Lang};

const EN_SUBJECTS: &[&str] =
    &["tea", "bathing", "greetings", "dining", "markets", "ferries", "archives", "festivals"];
const EN_ADJECTIVES: &[&str] =
    &["cold", "hot", "quick", "lengthy", "casual", "formal", "separate", "shared"];
const EN_TAILS: &[&str] = &[
    "is the usual choice for most families here",
    "remains common across the northern valleys",
    "is widespread in the river towns",
    "stays rare outside the harbor ward",
];

const CN_SUBJECTS: &[&str] = &["茶水", "沐浴", "问候", "用餐", "集市", "渡船", "档案", "庙会"];
const CN_ADJECTIVES: &[&str] = &["冰凉", "温热", "短暂", "漫长", "随意", "庄重", "独立", "共享"];
const CN_TAILS: &[&str] =
    &["是这里多数家庭的选择", "在北方山谷十分常见", "在河畔小镇相当普遍", "在港口城区比较罕见"];

/// The `i`-th synthetic sentence for a language, without terminal
/// punctuation so the adjective never collides with a period token.
pub fn sentence(lang: Lang, i: usize) -> String {
    match lang {
        Lang::En => format!(
            "The {} {} here {}",
            EN_ADJECTIVES[i % EN_ADJECTIVES.len()],
            EN_SUBJECTS[(i / 3) % EN_SUBJECTS.len()],
            EN_TAILS[(i / 7) % EN_TAILS.len()],
        ),
        Lang::Cn => format!(
            "{}的{}{}",
            CN_ADJECTIVES[i % CN_ADJECTIVES.len()],
            CN_SUBJECTS[(i / 3) % CN_SUBJECTS.len()],
            CN_TAILS[(i / 7) % CN_TAILS.len()],
        ),
    }
}

/// A balanced labeled dataset: even indices positive, odd negative.
pub fn samples(lang: Lang, n: usize) -> Vec<LabeledSample> {
    (0..n)
        .map(|i| {
            let mut sample = LabeledSample::positive(format!("s{i}"), lang, sentence(lang, i));
            sample.label = (i % 2 == 0) as u8;
            sample
        })
        .collect()
}

/// A multi-paragraph article body for segmentation benchmarks.
pub fn article(lang: Lang, sentences: usize) -> String {
    let mut body = String::new();
    for i in 0..sentences {
        let terminal = if lang == Lang::En { ". " } else { "。" };
        body.push_str(&sentence(lang, i));
        body.push_str(terminal);
        if i % 5 == 4 {
            body.push('\n');
        }
    }
    body
}
