//! `cdi fabricate`: turn the sentence corpus into a balanced labeled
//! sample set by flipping adjectives to their antonyms, guarded against
//! collocations and temporal expressions.

use crate::config::{stage_seed, PipelineConfig};
use crate::error::CliError;
use cdi_core::fabricate::{
    balance_dataset, fabricate_negatives, AntonymLexicon, CollocationModel, LexiconTagger,
    SourceSentence,
};
use cdi_core::ingest::RawSentence;
use cdi_core::io::{read_jsonl, write_jsonl};
use cdi_core::types::Lang;

pub fn run(config: &PipelineConfig, lang: Lang, global_seed: u64) -> Result<(), CliError> {
    let section = &config.fabricate;
    let dir = section.resources_dir.as_ref().ok_or_else(|| {
        CliError::input(anyhow::anyhow!("fabricate needs [fabricate].resources_dir"))
    })?;

    let sentences_path = config.paths.sentences(lang);
    let sentences: Vec<RawSentence> = read_jsonl(&sentences_path)?;
    if let Some(stray) = sentences.iter().find(|s| s.lang != lang) {
        return Err(CliError::input(anyhow::anyhow!(
            "{} holds sentence {} with language {}, expected {lang}",
            sentences_path.display(),
            stray.id,
            stray.lang
        )));
    }

    let tagger = LexiconTagger::load(&dir.join(format!("adjectives.{}.txt", lang.code())), lang)?;
    let lexicon = AntonymLexicon::load(&dir.join(format!("antonyms.{}.tsv", lang.code())), lang)?;
    let mut colloc = CollocationModel::new(lang, section.colloc_threshold);
    colloc.load_stoplist(&dir.join(format!("collocations.{}.txt", lang.code())))?;
    colloc.observe_all(sentences.iter().map(|s| s.text.as_str()));

    let mut positives = Vec::with_capacity(sentences.len());
    let mut negatives = Vec::new();
    for sentence in &sentences {
        let source = SourceSentence { id: sentence.id.clone(), lang, text: sentence.text.clone() };
        negatives.extend(fabricate_negatives(&source, &lexicon, &colloc, &tagger)?);
        positives.push(source.positive());
    }

    let seed = section.seed.unwrap_or_else(|| stage_seed(global_seed, "fabricate"));
    let balanced = balance_dataset(&positives, &negatives, seed)?;
    let out_path = config.paths.samples(lang);
    write_jsonl(&out_path, &balanced)?;
    log::info!(
        "fabricate {lang}: {} sentences -> {} kept positives + {} negatives -> {}",
        sentences.len(),
        balanced.len() / 2,
        balanced.len() / 2,
        out_path.display()
    );
    Ok(())
}
