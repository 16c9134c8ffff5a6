//! Inter-word spelling: elision, contraction, hyphen realization.
//!
//! A token sequence is rendered by running the two-level engine over the
//! tokens joined with the word-boundary symbol `##` (surface: a space, or
//! null where rules join words). Contractions (`de le` -> `du`) are table
//! data applied afterwards, and only between tokens the rules left
//! untouched; this gives elision precedence.
//!
//! Segmentation proposes candidate token sequences from the surface
//! variants of a vocabulary plus single content words, and keeps exactly
//! those that render back to the input.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::featstruct::FeatureStructure;
use crate::ruletext::{Contraction, SpellingFile};
use crate::symbol::Symbol;
use crate::twolevel::{char_symbol, compile_spelling, CompiledSpelling, LexicalString, SpellingError, EPSILON};

pub const WORD_BOUNDARY: Symbol = Symbol::lit("##");
/// Lexical symbol of the hyphen joining nouns, as in `Atlanta - Boston`.
pub const NOUN_HYPHEN: Symbol = Symbol::lit("nhyph");
pub const HYPHEN: &str = "-";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TokenKind {
    Word,
    /// Verb-clitic hyphen; a lexical item of its own.
    Hyphen,
    NounHyphen,
    /// Fixed expression such as `est-ce que`.
    Multiword,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexToken {
    pub form: String,
    pub kind: TokenKind,
}

impl LexToken {
    pub fn word(form: &str) -> Self {
        let kind = if form.contains(' ') { TokenKind::Multiword } else { TokenKind::Word };
        LexToken { form: form.to_string(), kind }
    }

    pub fn hyphen() -> Self {
        LexToken { form: HYPHEN.to_string(), kind: TokenKind::Hyphen }
    }

    pub fn noun_hyphen() -> Self {
        LexToken { form: HYPHEN.to_string(), kind: TokenKind::NounHyphen }
    }

    fn symbols(&self) -> Vec<Symbol> {
        match self.kind {
            TokenKind::Hyphen => vec![Symbol::lit(HYPHEN)],
            TokenKind::NounHyphen => vec![NOUN_HYPHEN],
            TokenKind::Word | TokenKind::Multiword => self
                .form
                .chars()
                .map(|c| if c == ' ' { WORD_BOUNDARY } else { char_symbol(c) })
                .collect(),
        }
    }
}

impl fmt::Display for LexToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Multiword => write!(f, "{}", self.form.replace(' ', "_")),
            TokenKind::NounHyphen => f.write_str("--"),
            _ => f.write_str(&self.form),
        }
    }
}

/// Parse a space-separated token list; `_` joins multiword parts, `-` is
/// the verb hyphen and `--` the noun hyphen.
pub fn tokens_from_text(text: &str) -> Vec<LexToken> {
    text.split_whitespace()
        .map(|w| match w {
            "-" => LexToken::hyphen(),
            "--" => LexToken::noun_hyphen(),
            _ => LexToken::word(&w.replace('_', " ")),
        })
        .collect()
}

/// Render a token list in the `tokens_from_text` notation.
pub fn tokens_to_text(tokens: &[LexToken]) -> String {
    let parts: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
    parts.join(" ")
}

#[derive(Clone, Debug)]
pub struct Sandhi {
    spelling: CompiledSpelling,
    contractions: Vec<Contraction>,
    /// Surface variant -> tokens that can realize it.
    variants: BTreeMap<String, BTreeSet<LexToken>>,
}

/// Rendered token with the boundary before it.
struct Piece {
    joined: bool,
    surface: String,
}

impl Sandhi {
    /// `vocabulary` lists the tokens whose surface may differ from their
    /// citation form; other words are segmented as written.
    pub fn new(file: SpellingFile, vocabulary: impl IntoIterator<Item = LexToken>) -> Result<Self, SpellingError> {
        let spelling = compile_spelling(file.rules, file.alphabet)?;
        let mut s = Sandhi { spelling, contractions: file.contractions, variants: BTreeMap::new() };
        let mut variants: BTreeMap<String, BTreeSet<LexToken>> = BTreeMap::new();
        for t in vocabulary {
            for v in s.surface_variants(&t) {
                variants.entry(v).or_default().insert(t.clone());
            }
        }
        for h in [LexToken::hyphen(), LexToken::noun_hyphen()] {
            for v in s.surface_variants(&h) {
                variants.entry(v).or_default().insert(h.clone());
            }
        }
        s.variants = variants;
        Ok(s)
    }

    pub fn spelling(&self) -> &CompiledSpelling {
        &self.spelling
    }

    /// Surfaces of `t` in a handful of probe contexts.
    fn surface_variants(&self, t: &LexToken) -> BTreeSet<String> {
        let probes = ["a", "ha", "b", "#b", "il"];
        let mut out = BTreeSet::new();
        let befores: [Vec<LexToken>; 3] =
            [vec![], vec![LexToken::word("a")], vec![LexToken::word("a"), LexToken::hyphen()]];
        for before in befores.iter() {
            let mut afters: Vec<Vec<LexToken>> = vec![vec![]];
            for p in probes {
                afters.push(vec![LexToken::word(p)]);
                afters.push(vec![LexToken::hyphen(), LexToken::word(p)]);
            }
            for after in afters {
                let mut seq = before.clone();
                seq.push(t.clone());
                seq.extend(after);
                if let Some(pieces) = self.pieces(&seq) {
                    out.insert(pieces[before.len()].surface.clone());
                }
            }
        }
        out
    }

    fn pieces(&self, tokens: &[LexToken]) -> Option<Vec<Piece>> {
        let empty = FeatureStructure::empty();
        let mut lex = LexicalString::new();
        for (i, t) in tokens.iter().enumerate() {
            let mut syms = Vec::new();
            if i > 0 {
                syms.push(WORD_BOUNDARY);
            }
            syms.extend(t.symbols());
            lex.push(syms, &empty);
        }
        let mut all = self.spelling.realizations(&lex);
        all.sort();
        let surf = all.into_iter().next()?;
        let mut pieces: Vec<Piece> = tokens.iter().map(|_| Piece { joined: false, surface: String::new() }).collect();
        let mut first_of = vec![true; tokens.len()];
        for (k, s) in surf.iter().enumerate() {
            let owner = lex.owner[k];
            let leading = first_of[owner] && owner > 0;
            first_of[owner] = false;
            if leading && lex.symbols[k] == WORD_BOUNDARY {
                pieces[owner].joined = *s == EPSILON;
                continue;
            }
            if *s == EPSILON {
                continue;
            }
            if *s == WORD_BOUNDARY {
                pieces[owner].surface.push(' ');
            } else {
                pieces[owner].surface.push_str(s.as_str());
            }
        }
        Some(pieces)
    }

    fn contraction(&self, a: &LexToken, b: &LexToken) -> Option<&Contraction> {
        if a.kind != TokenKind::Word || b.kind != TokenKind::Word {
            return None;
        }
        self.contractions.iter().find(|c| c.first == a.form && c.second == b.form)
    }

    pub fn render_surface(&self, tokens: &[LexToken]) -> String {
        let Some(pieces) = self.pieces(tokens) else {
            return tokens_to_text(tokens);
        };
        let mut out = String::new();
        let mut i = 0;
        while i < tokens.len() {
            if i > 0 && !pieces[i].joined {
                out.push(' ');
            }
            if i + 1 < tokens.len() && !pieces[i + 1].joined {
                if let Some(c) = self.contraction(&tokens[i], &tokens[i + 1]) {
                    if pieces[i].surface == tokens[i].form && pieces[i + 1].surface == tokens[i + 1].form {
                        out.push_str(&c.surface);
                        i += 2;
                        continue;
                    }
                }
            }
            out.push_str(&pieces[i].surface);
            i += 1;
        }
        out
    }

    /// All token sequences that render to `text` (whitespace-normalized).
    pub fn segment_surface(&self, text: &str) -> Vec<Vec<LexToken>> {
        let norm = normalize_space(text);
        if norm.is_empty() {
            return Vec::new();
        }
        let mut out = BTreeSet::new();
        let mut acc = Vec::new();
        self.segment_from(&norm, 0, &mut acc, &mut out);
        out.into_iter().collect()
    }

    fn segment_from(&self, text: &str, pos: usize, acc: &mut Vec<LexToken>, out: &mut BTreeSet<Vec<LexToken>>) {
        if acc.len() > 64 {
            return;
        }
        let pos = if text[pos..].starts_with(' ') { pos + 1 } else { pos };
        if pos >= text.len() {
            if !acc.is_empty() && self.render_surface(acc) == text {
                out.insert(acc.clone());
            }
            return;
        }
        let rest = &text[pos..];
        let mut steps: Vec<(usize, Vec<LexToken>)> = Vec::new();
        for (surf, toks) in self.variants.range::<str, _>(..).filter(|(s, _)| !s.is_empty() && rest.starts_with(s.as_str())) {
            for t in toks {
                steps.push((surf.len(), vec![t.clone()]));
            }
        }
        for c in &self.contractions {
            if rest.starts_with(c.surface.as_str()) {
                steps.push((c.surface.len(), vec![LexToken::word(&c.first), LexToken::word(&c.second)]));
            }
        }
        let run: usize = rest
            .char_indices()
            .find(|(_, c)| !(c.is_alphanumeric()))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        // Only vocabulary items follow the verb hyphen.
        let after_hyphen = acc.last().is_some_and(|t| t.kind == TokenKind::Hyphen);
        if run > 0 && !after_hyphen {
            let w = &rest[..run];
            let reserved = self.variants.contains_key(w) || self.contractions.iter().any(|c| c.surface == w);
            if !reserved {
                steps.push((run, vec![LexToken::word(w)]));
            }
        }
        for (len, toks) in steps {
            if !self.prefix_plausible(text, pos + len) {
                continue;
            }
            let n = toks.len();
            acc.extend(toks);
            self.segment_from(text, pos + len, acc, out);
            acc.truncate(acc.len() - n);
        }
    }

    /// A token may end only at a word edge.
    fn prefix_plausible(&self, text: &str, end: usize) -> bool {
        if end >= text.len() {
            return true;
        }
        let before = text[..end].chars().next_back();
        let after = text[end..].chars().next();
        let edge = |c: Option<char>| matches!(c, Some(' ' | '-' | '\''));
        edge(before) || edge(after)
    }
}

pub fn normalize_space(text: &str) -> String {
    let parts: Vec<&str> = text.split_whitespace().collect();
    parts.join(" ")
}

/// Sentence-final punctuation, stripped before segmentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punctuation {
    None,
    Question,
    Exclamation,
    Period,
}

pub fn strip_punctuation(text: &str) -> (String, Punctuation) {
    let t = text.trim_end();
    let (body, p) = match t.chars().next_back() {
        Some('?') => (&t[..t.len() - 1], Punctuation::Question),
        Some('!') => (&t[..t.len() - 1], Punctuation::Exclamation),
        Some('.') => (&t[..t.len() - 1], Punctuation::Period),
        _ => (t, Punctuation::None),
    };
    (normalize_space(body), p)
}

/// The text with its first letter lowered, when that differs.
pub fn fold_initial_capital(text: &str) -> Option<String> {
    let mut cs = text.chars();
    let first = cs.next()?;
    if !first.is_uppercase() {
        return None;
    }
    let mut s: String = first.to_lowercase().collect();
    s.push_str(cs.as_str());
    Some(s)
}
