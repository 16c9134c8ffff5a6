//! Shared fixtures: compiled packs, and pack copies with rules removed.
#![allow(dead_code)]

use std::path::Path;
use std::sync::OnceLock;

use lingcore::grammar::CompiledGrammar;
use lingcore::parser::{parse, Analysis, ParseOptions};
use lingware::pack::{default_pack_dir, load_french, load_pack, load_spanish};
use tempfile::TempDir;

pub fn french() -> &'static CompiledGrammar {
    static G: OnceLock<CompiledGrammar> = OnceLock::new();
    G.get_or_init(|| load_french().unwrap())
}

pub fn spanish() -> &'static CompiledGrammar {
    static G: OnceLock<CompiledGrammar> = OnceLock::new();
    G.get_or_init(|| load_spanish().unwrap())
}

pub fn analyses(g: &CompiledGrammar, s: &str) -> Vec<Analysis> {
    parse(s, g, ParseOptions::default()).unwrap()
}

/// Syntax text without the named rules (a rule runs to the next
/// unindented line).
pub fn drop_rules(syntax: &str, ids: &[&str]) -> String {
    let mut out = String::new();
    let mut skipping = false;
    for line in syntax.lines() {
        if !line.starts_with(char::is_whitespace) {
            skipping = ids.iter().any(|id| line.starts_with(&format!("rule {id}:")));
        }
        if !skipping {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// Copy of a shipped pack with some syntax rules removed.
pub fn ablated(lang: &str, ids: &[&str]) -> CompiledGrammar {
    let src = default_pack_dir().join(lang);
    let dir = TempDir::new().unwrap();
    for entry in std::fs::read_dir(&src).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let text = if name == "syntax" { drop_rules(&text, ids) } else { text };
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let g = load_pack(dir.path()).unwrap();
    let before = load_pack(&src).unwrap().rules().len();
    assert_eq!(g.rules().len() + ids.len(), before, "every named rule was removed");
    g
}

pub fn pack_file(lang: &str, file: &str) -> String {
    std::fs::read_to_string(Path::new(&default_pack_dir()).join(lang).join(file)).unwrap()
}
