//! Locating and reading rule-pack files.

use std::path::{Path, PathBuf};

use lingcore::grammar::{compile_grammar, CompiledGrammar, GrammarError, PackSources, Source};
use unicode_normalization::UnicodeNormalization;

pub const PACK_DIR_ENV: &str = "LINGWARE_PACK_DIR";

/// `$LINGWARE_PACK_DIR` if set, else the packs shipped with this crate.
pub fn default_pack_dir() -> PathBuf {
    match std::env::var_os(PACK_DIR_ENV) {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("packs"),
    }
}

/// Composed (NFC) form; every string entering the engine goes through here.
pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

pub fn read_text(path: &Path) -> std::io::Result<String> {
    Ok(nfc(&std::fs::read_to_string(path)?))
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

fn read_required(path: &Path) -> Result<String, LoadError> {
    read_text(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn read_optional(path: &Path) -> Result<Option<String>, LoadError> {
    if path.exists() {
        read_required(path).map(Some)
    } else {
        Ok(None)
    }
}

/// Compile the pack in `dir`: `features`, `syntax` and `lexicon` are
/// required; `morph-rules`, `morphotax` and `sandhi` are optional.
pub fn load_pack(dir: &Path) -> Result<CompiledGrammar, LoadError> {
    let features = read_required(&dir.join("features"))?;
    let syntax = read_required(&dir.join("syntax"))?;
    let lexicon = read_required(&dir.join("lexicon"))?;
    let morph_rules = read_optional(&dir.join("morph-rules"))?;
    let morphotax = read_optional(&dir.join("morphotax"))?;
    let sandhi = read_optional(&dir.join("sandhi"))?;
    let src = PackSources {
        features: Source { name: "features", text: &features },
        syntax: vec![Source { name: "syntax", text: &syntax }],
        lexicon: vec![Source { name: "lexicon", text: &lexicon }],
        morph_rules: morph_rules.as_deref().map(|text| Source { name: "morph-rules", text }),
        morphotax: morphotax.as_deref().map(|text| Source { name: "morphotax", text }),
        sandhi: sandhi.as_deref().map(|text| Source { name: "sandhi", text }),
    };
    Ok(compile_grammar(&src)?)
}

pub fn load_french() -> Result<CompiledGrammar, LoadError> {
    load_pack(&default_pack_dir().join("fr"))
}

pub fn load_spanish() -> Result<CompiledGrammar, LoadError> {
    load_pack(&default_pack_dir().join("es"))
}
