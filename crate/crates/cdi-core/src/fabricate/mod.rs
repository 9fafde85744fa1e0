//! Negative-sample fabrication.
//!
//! Corpus sentences are presumed acceptable to the culture that wrote
//! them. Negatives are fabricated by replacing one adjective with its
//! antonym, guarded so the flip does not silently change a name ("New
//! York" must not become "Old York") or a period expression ("the early
//! 1850s"). Balancing then pairs every retained positive with exactly
//! one of its negatives.

mod collocation;
mod lexicon;
mod tagger;

pub use collocation::CollocationModel;
pub use lexicon::AntonymLexicon;
pub use tagger::{offset_tokens, AdjectiveSpan, LexiconTagger, OffsetToken, PosTagger};

use crate::classifier::fnv1a64;
use crate::types::{char_len, char_slice, LabeledSample, Lang, Origin};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum FabricateError {
    #[error("bad lexicon or stoplist entry: {0}")]
    LexiconFormat(String),
    #[error("cannot read resource {path}: {source}")]
    ResourceIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("tagger produced an invalid span {start}..{end} for sentence {id:?}")]
    InvalidSpan { id: String, start: usize, end: usize },
    #[error("tagger language {tagger} does not match sentence language {sentence}")]
    TaggerLangMismatch { tagger: Lang, sentence: Lang },
    #[error("balancing produced an empty dataset: no positive has a usable negative")]
    EmptyDataset,
}

/// English temporal modifiers that must not flip next to a date.
const TEMPORAL_EN: [&str; 3] = ["early", "late", "mid"];
/// Chinese equivalents (period prefixes/suffixes).
const TEMPORAL_CN: [&str; 4] = ["早期", "晚期", "中期", "初期"];

fn is_year_or_decade(token: &str) -> bool {
    match token.as_bytes() {
        d if d.len() == 4 && d.iter().all(u8::is_ascii_digit) => true,
        [d @ .., b's'] if (2..=4).contains(&d.len()) && d.iter().all(u8::is_ascii_digit) => true,
        _ => false,
    }
}

/// True iff the span takes part in a temporal pattern such as
/// "in the early 1850s": the span is a period modifier and a 4-digit
/// year or a decade token ("1850s", "90s") sits directly beside it.
pub fn is_temporal(sentence: &str, span: &AdjectiveSpan, lang: Lang) -> bool {
    match lang {
        Lang::En => {
            if !TEMPORAL_EN.contains(&span.lemma.as_str()) {
                return false;
            }
            let tokens = offset_tokens(sentence, Lang::En);
            let Some(pos) = tokens.iter().position(|t| t.start == span.start && t.end == span.end)
            else {
                return false;
            };
            let next = tokens.get(pos + 1).map(|t| t.text.as_str());
            let prev = pos.checked_sub(1).and_then(|p| tokens.get(p)).map(|t| t.text.as_str());
            next.is_some_and(is_year_or_decade) || prev.is_some_and(is_year_or_decade)
        }
        Lang::Cn => {
            if !TEMPORAL_CN.contains(&span.lemma.as_str()) {
                return false;
            }
            let chars: Vec<char> = sentence.chars().collect();
            // A digit run ending in 年 or 年代 directly before the span,
            // e.g. 1850年代早期, or directly after it.
            let before_is_period = {
                let mut i = span.start;
                if i >= 1 && chars[i - 1] == '代' {
                    i -= 1;
                }
                if i >= 1 && chars[i - 1] == '年' {
                    i -= 1;
                } else {
                    i = usize::MAX;
                }
                i != usize::MAX && i >= 1 && chars[i - 1].is_ascii_digit()
            };
            let after_is_period = {
                let rest = &chars[span.end.min(chars.len())..];
                let digits = rest.iter().take_while(|c| c.is_ascii_digit()).count();
                digits > 0 && rest.get(digits) == Some(&'年')
            };
            before_is_period || after_is_period
        }
    }
}

/// True iff flipping the span would break a protected collocation: the
/// span's boundary tokens form a stoplisted or corpus-frequent bigram
/// with either neighbor.
pub fn is_protected(sentence: &str, span: &AdjectiveSpan, model: &CollocationModel) -> bool {
    let tokens = offset_tokens(sentence, model.lang);
    let Some(first) = tokens.iter().position(|t| t.start >= span.start && t.end <= span.end) else {
        return false;
    };
    let mut last = first;
    while last + 1 < tokens.len() && tokens[last + 1].end <= span.end {
        last += 1;
    }
    if let Some(prev) = first.checked_sub(1).and_then(|p| tokens.get(p)) {
        if model.is_protected_pair(&prev.text, &tokens[first].text) {
            return true;
        }
    }
    if let Some(next) = tokens.get(last + 1) {
        if model.is_protected_pair(&tokens[last].text, &next.text) {
            return true;
        }
    }
    false
}

pub(crate) fn match_first_char_case(replacement: &str, surface: &str) -> String {
    let Some(first_surface) = surface.chars().next() else {
        return replacement.to_string();
    };
    if first_surface.is_uppercase() {
        let mut chars = replacement.chars();
        match chars.next() {
            Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
            None => String::new(),
        }
    } else {
        replacement.to_string()
    }
}

/// A sentence with identity, as fed to fabrication.
#[derive(Debug, Clone)]
pub struct SourceSentence {
    pub id: String,
    pub lang: Lang,
    pub text: String,
}

impl SourceSentence {
    /// The corpus positive for this sentence.
    pub fn positive(&self) -> LabeledSample {
        LabeledSample {
            id: self.id.clone(),
            lang: self.lang,
            text: self.text.clone(),
            label: 1,
            origin: Origin::Corpus,
            parent_id: None,
            flipped_span: None,
            bt_applied: false,
        }
    }
}

/// Fabricate one negative per eligible adjective span.
///
/// Eligible means: the lemma has an antonym and neither guard fires.
/// Each negative differs from its parent only at the flipped span; the
/// recorded span locates the replacement in the negative's own text, so
/// flipping it back with a symmetric lexicon restores the parent.
pub fn fabricate_negatives(
    sentence: &SourceSentence,
    lexicon: &AntonymLexicon,
    colloc: &CollocationModel,
    tagger: &dyn PosTagger,
) -> Result<Vec<LabeledSample>, FabricateError> {
    if tagger.lang() != sentence.lang {
        return Err(FabricateError::TaggerLangMismatch {
            tagger: tagger.lang(),
            sentence: sentence.lang,
        });
    }
    let text_chars = char_len(&sentence.text);
    let spans = tagger.adjective_spans(&sentence.text)?;
    let mut negatives = Vec::new();
    for (ordinal, span) in spans.iter().enumerate() {
        if span.start >= span.end
            || span.end > text_chars
            || char_slice(&sentence.text, span.start, span.end) != span.surface
        {
            return Err(FabricateError::InvalidSpan {
                id: sentence.id.clone(),
                start: span.start,
                end: span.end,
            });
        }
        let Some(antonym) = lexicon.first_antonym(&span.lemma) else {
            continue;
        };
        if is_protected(&sentence.text, span, colloc)
            || is_temporal(&sentence.text, span, sentence.lang)
        {
            continue;
        }
        let replacement = match_first_char_case(antonym, &span.surface);
        let mut text = char_slice(&sentence.text, 0, span.start);
        text.push_str(&replacement);
        text.push_str(&char_slice(&sentence.text, span.end, text_chars));
        let end = span.start + char_len(&replacement);
        negatives.push(LabeledSample {
            id: format!("{}-f{}", sentence.id, ordinal + 1),
            lang: sentence.lang,
            text,
            label: 0,
            origin: Origin::AntonymFlip,
            parent_id: Some(sentence.id.clone()),
            flipped_span: Some(crate::types::FlippedSpan(
                span.start as u32,
                end as u32,
                replacement,
            )),
            bt_applied: false,
        });
    }
    Ok(negatives)
}

/// Keep the positives that have at least one negative, pick exactly one
/// negative per positive with a seeded draw, and emit parent-then-child
/// in parent id order.
///
/// The draw for each parent is seeded by `seed ^ fnv1a64(parent_id)`, so
/// the outcome does not depend on input order.
pub fn balance_dataset(
    positives: &[LabeledSample],
    negatives: &[LabeledSample],
    seed: u64,
) -> Result<Vec<LabeledSample>, FabricateError> {
    let mut by_parent: BTreeMap<&str, Vec<&LabeledSample>> = BTreeMap::new();
    for n in negatives {
        if let Some(parent) = &n.parent_id {
            by_parent.entry(parent).or_default().push(n);
        }
    }
    // Canonical candidate order, so the seeded pick does not depend on
    // the caller's input order.
    for children in by_parent.values_mut() {
        children.sort_by(|a, b| a.id.cmp(&b.id));
    }
    let mut ordered: Vec<&LabeledSample> = positives.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::new();
    for pos in ordered {
        let Some(children) = by_parent.get(pos.id.as_str()) else {
            continue;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(pos.id.as_bytes()));
        let pick = children[rng.gen_range(0..children.len())];
        out.push(pos.clone());
        out.push(pick.clone());
    }
    if out.is_empty() {
        return Err(FabricateError::EmptyDataset);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn en_lexicon() -> AntonymLexicon {
        AntonymLexicon::new(
            Lang::En,
            vec![
                ("safe".into(), vec!["unsafe".into()]),
                ("unsafe".into(), vec!["safe".into()]),
                ("legal".into(), vec!["illegal".into()]),
                ("illegal".into(), vec!["legal".into()]),
                ("accessible".into(), vec!["inaccessible".into()]),
                ("inaccessible".into(), vec!["accessible".into()]),
                ("maternal".into(), vec!["paternal".into()]),
                ("paternal".into(), vec!["maternal".into()]),
                ("new".into(), vec!["old".into()]),
                ("old".into(), vec!["new".into()]),
                ("early".into(), vec!["late".into()]),
                ("late".into(), vec!["early".into()]),
            ],
        )
        .unwrap()
    }

    fn en_tagger() -> LexiconTagger {
        LexiconTagger::new(
            Lang::En,
            [
                "safe",
                "unsafe",
                "legal",
                "illegal",
                "accessible",
                "inaccessible",
                "maternal",
                "paternal",
                "new",
                "old",
                "early",
                "late",
            ]
            .iter()
            .map(|s| s.to_string()),
        )
    }

    fn colloc() -> CollocationModel {
        let mut model = CollocationModel::new(Lang::En, 10);
        model.add_phrase("New York").unwrap();
        model
    }

    fn sentence(id: &str, text: &str) -> SourceSentence {
        SourceSentence { id: id.into(), lang: Lang::En, text: text.into() }
    }

    #[test]
    fn flips_every_eligible_adjective_once() {
        let src =
            sentence("s1", "Making safe abortion legal and accessible reduces maternal deaths.");
        let negatives = fabricate_negatives(&src, &en_lexicon(), &colloc(), &en_tagger()).unwrap();
        assert_eq!(negatives.len(), 4);
        let texts: Vec<&str> = negatives.iter().map(|n| n.text.as_str()).collect();
        assert_eq!(
            texts,
            vec![
                "Making unsafe abortion legal and accessible reduces maternal deaths.",
                "Making safe abortion illegal and accessible reduces maternal deaths.",
                "Making safe abortion legal and inaccessible reduces maternal deaths.",
                "Making safe abortion legal and accessible reduces paternal deaths.",
            ]
        );
        for n in &negatives {
            assert_eq!(n.label, 0);
            assert_eq!(n.origin, Origin::AntonymFlip);
            assert_eq!(n.parent_id.as_deref(), Some("s1"));
            assert!(!n.bt_applied);
        }
    }

    #[test]
    fn negatives_differ_only_at_the_flipped_span() {
        let src = sentence("s2", "The safe path is legal.");
        let negatives = fabricate_negatives(&src, &en_lexicon(), &colloc(), &en_tagger()).unwrap();
        for n in &negatives {
            let span = n.flipped_span.as_ref().unwrap();
            let (start, end) = (span.start() as usize, span.end() as usize);
            assert_eq!(char_slice(&n.text, start, end), span.replacement());
            // Shared prefix.
            assert_eq!(char_slice(&n.text, 0, start), char_slice(&src.text, 0, start));
            // Shared suffix (may sit at different offsets in each text).
            let n_len = char_len(&n.text);
            let src_len = char_len(&src.text);
            let suffix_len = n_len - end;
            assert_eq!(
                char_slice(&n.text, end, n_len),
                char_slice(&src.text, src_len - suffix_len, src_len)
            );
        }
    }

    #[test]
    fn flipping_the_flip_restores_the_parent() {
        let src = sentence("s3", "Safe housing is accessible.");
        let lex = en_lexicon();
        let negatives = fabricate_negatives(&src, &lex, &colloc(), &en_tagger()).unwrap();
        for n in &negatives {
            let child = SourceSentence { id: "c".into(), lang: Lang::En, text: n.text.clone() };
            let restored = fabricate_negatives(&child, &lex, &colloc(), &en_tagger()).unwrap();
            assert!(
                restored.iter().any(|r| r.text == src.text),
                "no re-flip of {:?} restored {:?}",
                n.text,
                src.text
            );
        }
    }

    #[test]
    fn casing_follows_the_original_surface() {
        let src = sentence("s4", "Safe streets matter.");
        let negatives = fabricate_negatives(&src, &en_lexicon(), &colloc(), &en_tagger()).unwrap();
        assert_eq!(negatives[0].text, "Unsafe streets matter.");
    }

    #[test]
    fn collocation_guard_blocks_new_york() {
        let src = sentence("s5", "The New York subway is safe.");
        let negatives = fabricate_negatives(&src, &en_lexicon(), &colloc(), &en_tagger()).unwrap();
        // "New" is guarded; only "safe" flips.
        assert_eq!(negatives.len(), 1);
        assert_eq!(negatives[0].text, "The New York subway is unsafe.");
    }

    #[test]
    fn frequency_guard_blocks_common_pairs() {
        let mut model = CollocationModel::new(Lang::En, 3);
        for _ in 0..3 {
            model.observe("legal systems differ widely");
        }
        let src = sentence("s6", "Most legal systems evolve.");
        let negatives = fabricate_negatives(&src, &en_lexicon(), &model, &en_tagger()).unwrap();
        assert!(negatives.is_empty());
    }

    #[test]
    fn temporal_guard_blocks_decades() {
        let tagger = en_tagger();
        let lex = en_lexicon();
        let guard_cases = [
            "Railways expanded in the early 1850s.",
            "Industry boomed in the late 1850s.",
            "The late 1990s saw rapid growth.",
            "The mid 1970s brought reform.",
        ];
        for text in guard_cases {
            let src = sentence("s7", text);
            let negatives = fabricate_negatives(&src, &lex, &colloc(), &tagger).unwrap();
            assert!(negatives.is_empty(), "false flip in {text:?}: {negatives:?}");
        }
        // Plain usage still flips.
        let src = sentence("s8", "They made an early decision.");
        let negatives = fabricate_negatives(&src, &lex, &colloc(), &tagger).unwrap();
        assert_eq!(negatives.len(), 1);
        assert_eq!(negatives[0].text, "They made an late decision.".to_string());
    }

    #[test]
    fn temporal_guard_chinese_periods() {
        let tagger = LexiconTagger::new(Lang::Cn, ["早期", "安全"].iter().map(|s| s.to_string()));
        let lex = AntonymLexicon::new(
            Lang::Cn,
            vec![("早期".into(), vec!["晚期".into()]), ("安全".into(), vec!["危险".into()])],
        )
        .unwrap();
        let colloc = CollocationModel::new(Lang::Cn, 10);
        let guarded = SourceSentence {
            id: "c1".into(),
            lang: Lang::Cn,
            text: "铁路在1850年代早期迅速扩张。".into(),
        };
        let negatives = fabricate_negatives(&guarded, &lex, &colloc, &tagger).unwrap();
        assert!(negatives.is_empty(), "false flip: {negatives:?}");

        let plain =
            SourceSentence {
                id: "c2".into(), lang: Lang::Cn, text: "早期的决定往往安全。".into()
            };
        let negatives = fabricate_negatives(&plain, &lex, &colloc, &tagger).unwrap();
        assert_eq!(negatives.len(), 2);
    }

    #[test]
    fn unknown_lemmas_are_skipped_silently() {
        let lex =
            AntonymLexicon::new(Lang::En, vec![("safe".into(), vec!["unsafe".into()])]).unwrap();
        let src = sentence("s9", "A safe and legal plan.");
        let negatives = fabricate_negatives(&src, &lex, &colloc(), &en_tagger()).unwrap();
        assert_eq!(negatives.len(), 1);
        assert_eq!(negatives[0].text, "A unsafe and legal plan.");
    }

    #[test]
    fn invalid_tagger_spans_are_an_error() {
        struct BadTagger;
        impl PosTagger for BadTagger {
            fn lang(&self) -> Lang {
                Lang::En
            }
            fn adjective_spans(&self, _: &str) -> Result<Vec<AdjectiveSpan>, FabricateError> {
                Ok(vec![AdjectiveSpan {
                    start: 2,
                    end: 99,
                    surface: "x".into(),
                    lemma: "x".into(),
                }])
            }
        }
        let src = sentence("s10", "short text");
        assert!(matches!(
            fabricate_negatives(&src, &en_lexicon(), &colloc(), &BadTagger),
            Err(FabricateError::InvalidSpan { .. })
        ));
    }

    #[test]
    fn tagger_language_must_match() {
        let src = SourceSentence { id: "cn".into(), lang: Lang::Cn, text: "安全".into() };
        assert!(matches!(
            fabricate_negatives(&src, &en_lexicon(), &colloc(), &en_tagger()),
            Err(FabricateError::TaggerLangMismatch { .. })
        ));
    }

    fn balance_fixture() -> (Vec<LabeledSample>, Vec<LabeledSample>) {
        let lex = en_lexicon();
        let tagger = en_tagger();
        let model = colloc();
        let texts = [
            ("p1", "The safe road is legal."),
            ("p2", "An accessible park."),
            ("p3", "Numbers have no adjectives here."),
        ];
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for (id, text) in texts {
            let src = sentence(id, text);
            positives.push(src.positive());
            negatives.extend(fabricate_negatives(&src, &lex, &model, &tagger).unwrap());
        }
        (positives, negatives)
    }

    #[test]
    fn balance_pairs_each_retained_positive_with_one_negative() {
        let (positives, negatives) = balance_fixture();
        let balanced = balance_dataset(&positives, &negatives, 11).unwrap();
        let pos: Vec<_> = balanced.iter().filter(|s| s.label == 1).collect();
        let neg: Vec<_> = balanced.iter().filter(|s| s.label == 0).collect();
        assert_eq!(pos.len(), neg.len());
        // p3 had no negatives and is dropped.
        assert_eq!(pos.len(), 2);
        for n in &neg {
            let parent = n.parent_id.as_deref().unwrap();
            assert!(pos.iter().any(|p| p.id == parent));
        }
        // Ordered: parent immediately followed by its chosen negative.
        assert_eq!(balanced[0].id, "p1");
        assert_eq!(balanced[1].parent_id.as_deref(), Some("p1"));
        assert_eq!(balanced[2].id, "p2");
    }

    #[test]
    fn balance_is_seed_deterministic_and_order_independent() {
        let (positives, negatives) = balance_fixture();
        let a = balance_dataset(&positives, &negatives, 42).unwrap();
        let b = balance_dataset(&positives, &negatives, 42).unwrap();
        assert_eq!(a, b);
        let mut reversed_pos = positives.clone();
        reversed_pos.reverse();
        let mut reversed_neg = negatives.clone();
        reversed_neg.reverse();
        let c = balance_dataset(&reversed_pos, &reversed_neg, 42).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn different_seeds_can_pick_different_negatives() {
        let (positives, negatives) = balance_fixture();
        // p1 has two negatives; over a few seeds both picks should appear.
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..16 {
            let balanced = balance_dataset(&positives, &negatives, seed).unwrap();
            seen.insert(balanced[1].id.clone());
        }
        assert!(seen.len() > 1, "only ever picked {seen:?}");
    }

    #[test]
    fn balance_of_nothing_is_an_error() {
        let (positives, _) = balance_fixture();
        assert!(matches!(balance_dataset(&positives, &[], 1), Err(FabricateError::EmptyDataset)));
    }
}
