//! Feature-augmented two-level morphology.
//!
//! Spelling rules relate a lexical and a surface string symbol by symbol.
//! Each lexical symbol is realized by exactly one surface symbol (possibly
//! the null symbol `ε`), so a candidate realization is an alignment of equal
//! length. Rules are checked interpretively against candidate alignments:
//!
//! * `=>` (context restriction): the focus pair may only appear where one
//!   of its rules' contexts matches;
//! * `<=` (surface coercion): where the context matches, the lexical focus
//!   symbol must be realized as the focus surface symbol;
//! * `<=>`: both.
//!
//! A rule only counts as matching when its feature constraint unifies with
//! the features of every morpheme its matched span overlaps, each morpheme
//! checked on its own.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::featstruct::FeatureStructure;
use crate::symbol::Symbol;

pub const EPSILON: Symbol = Symbol::lit("ε");
pub const MORPHEME_BOUNDARY: Symbol = Symbol::lit("+");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolPair {
    pub lexical: Symbol,
    pub surface: Symbol,
}

impl SymbolPair {
    pub fn new(lexical: Symbol, surface: Symbol) -> Self {
        SymbolPair { lexical, surface }
    }

    pub fn is_identity(&self) -> bool {
        self.lexical == self.surface
    }
}

impl fmt::Display for SymbolPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lexical == EPSILON { "0" } else { self.lexical.as_str() };
        let s = if self.surface == EPSILON { "0" } else { self.surface.as_str() };
        write!(f, "{}:{}", l, s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// `=>`
    ContextRestriction,
    /// `<=`
    SurfaceCoercion,
    /// `<=>`
    Composite,
}

impl Operator {
    fn restricts(self) -> bool {
        matches!(self, Operator::ContextRestriction | Operator::Composite)
    }

    fn coerces(self) -> bool {
        matches!(self, Operator::SurfaceCoercion | Operator::Composite)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymClass {
    Any,
    One(Symbol),
    OneOf(Vec<Symbol>),
    NoneOf(Vec<Symbol>),
}

impl SymClass {
    pub fn matches(&self, s: Symbol) -> bool {
        match self {
            SymClass::Any => true,
            SymClass::One(x) => *x == s,
            SymClass::OneOf(xs) => xs.contains(&s),
            SymClass::NoneOf(xs) => !xs.contains(&s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPattern {
    pub lexical: SymClass,
    pub surface: SymClass,
}

impl PairPattern {
    pub fn matches(&self, p: SymbolPair) -> bool {
        self.lexical.matches(p.lexical) && self.surface.matches(p.surface)
    }
}

/// Regular expression over symbol pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    Pair(PairPattern),
    Seq(Vec<Context>),
    Alt(Vec<Context>),
    Star(Box<Context>),
    Opt(Box<Context>),
    /// Start of the whole string.
    Start,
    /// End of the whole string.
    End,
}

impl Context {
    pub fn empty() -> Context {
        Context::Seq(Vec::new())
    }

    /// Longest span the context can match; `None` if unbounded.
    pub fn max_len(&self) -> Option<usize> {
        match self {
            Context::Pair(_) => Some(1),
            Context::Seq(xs) => xs.iter().try_fold(0, |acc, x| Some(acc + x.max_len()?)),
            Context::Alt(xs) => xs.iter().try_fold(0, |acc, x| Some(acc.max(x.max_len()?))),
            Context::Star(_) => None,
            Context::Opt(x) => x.max_len(),
            Context::Start | Context::End => Some(0),
        }
    }

    fn pairs(&self, out: &mut Vec<PairPattern>) {
        match self {
            Context::Pair(p) => out.push(p.clone()),
            Context::Seq(xs) | Context::Alt(xs) => xs.iter().for_each(|x| x.pairs(out)),
            Context::Star(x) | Context::Opt(x) => x.pairs(out),
            Context::Start | Context::End => {}
        }
    }

    /// All end positions of matches starting at `pos`.
    fn forward(&self, a: &dyn PairSeq, pos: usize, out: &mut Vec<usize>) {
        match self {
            Context::Pair(p) => {
                if pos < a.len() && p.matches(a.pair(pos)) {
                    out.push(pos + 1);
                }
            }
            Context::Seq(items) => {
                let mut cur = vec![pos];
                for it in items {
                    let mut next = Vec::new();
                    for c in cur {
                        it.forward(a, c, &mut next);
                    }
                    next.sort_unstable();
                    next.dedup();
                    if next.is_empty() {
                        return;
                    }
                    cur = next;
                }
                out.extend(cur);
            }
            Context::Alt(xs) => xs.iter().for_each(|x| x.forward(a, pos, out)),
            Context::Star(x) => {
                let mut seen = BTreeSet::new();
                let mut todo = vec![pos];
                while let Some(p) = todo.pop() {
                    if !seen.insert(p) {
                        continue;
                    }
                    out.push(p);
                    let mut next = Vec::new();
                    x.forward(a, p, &mut next);
                    todo.extend(next.into_iter().filter(|q| *q > p));
                }
            }
            Context::Opt(x) => {
                out.push(pos);
                x.forward(a, pos, out);
            }
            Context::Start => {
                if pos == 0 {
                    out.push(pos)
                }
            }
            Context::End => {
                if pos == a.full_len() {
                    out.push(pos)
                }
            }
        }
    }

    /// All start positions of matches ending at `pos`.
    fn backward(&self, a: &dyn PairSeq, pos: usize, out: &mut Vec<usize>) {
        match self {
            Context::Pair(p) => {
                if pos > 0 && pos <= a.len() && p.matches(a.pair(pos - 1)) {
                    out.push(pos - 1);
                }
            }
            Context::Seq(items) => {
                let mut cur = vec![pos];
                for it in items.iter().rev() {
                    let mut next = Vec::new();
                    for c in cur {
                        it.backward(a, c, &mut next);
                    }
                    next.sort_unstable();
                    next.dedup();
                    if next.is_empty() {
                        return;
                    }
                    cur = next;
                }
                out.extend(cur);
            }
            Context::Alt(xs) => xs.iter().for_each(|x| x.backward(a, pos, out)),
            Context::Star(x) => {
                let mut seen = BTreeSet::new();
                let mut todo = vec![pos];
                while let Some(p) = todo.pop() {
                    if !seen.insert(p) {
                        continue;
                    }
                    out.push(p);
                    let mut next = Vec::new();
                    x.backward(a, p, &mut next);
                    todo.extend(next.into_iter().filter(|q| *q < p));
                }
            }
            Context::Opt(x) => {
                out.push(pos);
                x.backward(a, pos, out);
            }
            Context::Start => {
                if pos == 0 {
                    out.push(pos)
                }
            }
            Context::End => {
                if pos == a.full_len() {
                    out.push(pos)
                }
            }
        }
    }
}

trait PairSeq {
    /// Number of assigned pairs.
    fn len(&self) -> usize;
    /// Length of the complete lexical string.
    fn full_len(&self) -> usize;
    fn pair(&self, i: usize) -> SymbolPair;
}

#[derive(Clone, Debug)]
pub struct SpellingRule {
    pub name: String,
    pub focus: SymbolPair,
    pub operator: Operator,
    pub left: Context,
    pub right: Context,
    pub optional: bool,
    pub constraint: FeatureStructure,
}

/// Feasible pairs. Identity pairs are feasible for every symbol that is not
/// a declared boundary; `defaults` are feasible everywhere without a rule.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    pub pairs: BTreeSet<SymbolPair>,
    pub defaults: BTreeSet<SymbolPair>,
    pub boundaries: BTreeSet<Symbol>,
}

impl Alphabet {
    pub fn identity() -> Self {
        Alphabet::default()
    }

    pub fn feasible(&self, p: SymbolPair) -> bool {
        (p.is_identity() && !self.boundaries.contains(&p.lexical))
            || self.pairs.contains(&p)
            || self.defaults.contains(&p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpellingError {
    #[error("rule `{rule}` uses pair {pair} which is not in the alphabet")]
    UndeclaredPair { rule: String, pair: String },
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error("optional rule `{0}` must use the context-restriction operator `=>`")]
    OptionalNotRestriction(String),
}

/// Compiled rule set. Independent of any lexicon.
#[derive(Clone, Debug)]
pub struct CompiledSpelling {
    rules: Vec<SpellingRule>,
    alphabet: Alphabet,
    /// Non-identity surfaces per lexical symbol.
    surfaces: BTreeMap<Symbol, Vec<Symbol>>,
    restricting: BTreeMap<SymbolPair, Vec<usize>>,
    coercing: BTreeMap<Symbol, Vec<usize>>,
    lookahead: Option<usize>,
}

pub fn compile_spelling(rules: Vec<SpellingRule>, alphabet: Alphabet) -> Result<CompiledSpelling, SpellingError> {
    let mut names = BTreeSet::new();
    for r in &rules {
        if !names.insert(r.name.clone()) {
            return Err(SpellingError::DuplicateRule(r.name.clone()));
        }
        if r.optional && r.operator != Operator::ContextRestriction {
            return Err(SpellingError::OptionalNotRestriction(r.name.clone()));
        }
        if !alphabet.feasible(r.focus) {
            return Err(SpellingError::UndeclaredPair { rule: r.name.clone(), pair: r.focus.to_string() });
        }
        let mut pats = Vec::new();
        r.left.pairs(&mut pats);
        r.right.pairs(&mut pats);
        for p in pats {
            if let (SymClass::One(l), SymClass::One(s)) = (&p.lexical, &p.surface) {
                let pair = SymbolPair::new(*l, *s);
                if !alphabet.feasible(pair) {
                    return Err(SpellingError::UndeclaredPair { rule: r.name.clone(), pair: pair.to_string() });
                }
            }
        }
    }
    let mut surfaces: BTreeMap<Symbol, Vec<Symbol>> = BTreeMap::new();
    for p in alphabet.pairs.iter().chain(alphabet.defaults.iter()) {
        if !p.is_identity() {
            let v = surfaces.entry(p.lexical).or_default();
            if !v.contains(&p.surface) {
                v.push(p.surface);
            }
        }
    }
    let mut restricting: BTreeMap<SymbolPair, Vec<usize>> = BTreeMap::new();
    let mut coercing: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
    let mut lookahead = Some(0usize);
    for (i, r) in rules.iter().enumerate() {
        if r.operator.restricts() {
            restricting.entry(r.focus).or_default().push(i);
        }
        if r.operator.coerces() {
            coercing.entry(r.focus.lexical).or_default().push(i);
        }
        lookahead = match (lookahead, r.right.max_len()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    Ok(CompiledSpelling { rules, alphabet, surfaces, restricting, coercing, lookahead })
}

/// A lexical string split into morphemes, each with its own features.
pub struct LexicalString<'a> {
    pub symbols: Vec<Symbol>,
    /// Morpheme index of every symbol.
    pub owner: Vec<usize>,
    pub features: Vec<&'a FeatureStructure>,
}

impl<'a> LexicalString<'a> {
    pub fn new() -> Self {
        LexicalString { symbols: Vec::new(), owner: Vec::new(), features: Vec::new() }
    }

    /// Append a morpheme given as a sequence of symbols.
    pub fn push(&mut self, symbols: impl IntoIterator<Item = Symbol>, features: &'a FeatureStructure) {
        let idx = self.features.len();
        self.features.push(features);
        for s in symbols {
            self.symbols.push(s);
            self.owner.push(idx);
        }
    }

    /// Append a morpheme whose symbols are the characters of `form`.
    pub fn push_chars(&mut self, form: &str, features: &'a FeatureStructure) {
        self.push(form.chars().map(char_symbol), features);
    }
}

impl Default for LexicalString<'_> {
    fn default() -> Self {
        Self::new()
    }
}

pub fn char_symbol(c: char) -> Symbol {
    let mut buf = [0u8; 4];
    Symbol::lit(c.encode_utf8(&mut buf))
}

struct Partial<'x> {
    lex: &'x [Symbol],
    surf: &'x [Symbol],
}

impl PairSeq for Partial<'_> {
    fn len(&self) -> usize {
        self.surf.len()
    }
    fn full_len(&self) -> usize {
        self.lex.len()
    }
    fn pair(&self, i: usize) -> SymbolPair {
        SymbolPair::new(self.lex[i], self.surf[i])
    }
}

/// Per-call checker state: caches rule/morpheme feature compatibility.
struct Checker<'c, 'l> {
    spelling: &'c CompiledSpelling,
    lexical: &'c LexicalString<'l>,
    feature_ok: Vec<Option<bool>>,
}

impl<'c, 'l> Checker<'c, 'l> {
    fn new(spelling: &'c CompiledSpelling, lexical: &'c LexicalString<'l>) -> Self {
        let n = spelling.rules.len() * lexical.features.len().max(1);
        Checker { spelling, lexical, feature_ok: vec![None; n] }
    }

    fn rule_fits_morpheme(&mut self, rule: usize, morph: usize) -> bool {
        let i = rule * self.lexical.features.len() + morph;
        if let Some(v) = self.feature_ok[i] {
            return v;
        }
        let v = self.spelling.rules[rule].constraint.unify(self.lexical.features[morph]).is_some();
        self.feature_ok[i] = Some(v);
        v
    }

    fn context_holds(&mut self, rule: usize, k: usize, surf: &[Symbol]) -> bool {
        let seq = Partial { lex: &self.lexical.symbols, surf };
        let r = &self.spelling.rules[rule];
        let mut starts = Vec::new();
        r.left.backward(&seq, k, &mut starts);
        if starts.is_empty() {
            return false;
        }
        let mut ends = Vec::new();
        r.right.forward(&seq, k + 1, &mut ends);
        if ends.is_empty() {
            return false;
        }
        starts.sort_unstable();
        starts.dedup();
        ends.sort_unstable();
        ends.dedup();
        for &s in &starts {
            for &e in &ends {
                let mut morphs: Vec<usize> = self.lexical.owner[s..e].to_vec();
                morphs.dedup();
                if morphs.iter().all(|&m| self.rule_fits_morpheme(rule, m)) {
                    return true;
                }
            }
        }
        false
    }

    /// Check position `k`; all positions its rules look at must be assigned.
    fn position_ok(&mut self, k: usize, surf: &[Symbol]) -> bool {
        let pair = SymbolPair::new(self.lexical.symbols[k], surf[k]);
        let restricting = self.spelling.restricting.get(&pair);
        let free = (pair.is_identity() && !self.spelling.alphabet.boundaries.contains(&pair.lexical))
            || self.spelling.alphabet.defaults.contains(&pair);
        match restricting {
            Some(rules) => {
                let rules = rules.clone();
                if !rules.iter().any(|&r| self.context_holds(r, k, surf)) {
                    return false;
                }
            }
            None if !free => return false,
            None => {}
        }
        if let Some(rules) = self.spelling.coercing.get(&pair.lexical) {
            for &r in rules.clone().iter() {
                if self.spelling.rules[r].focus.surface != pair.surface && self.context_holds(r, k, surf) {
                    return false;
                }
            }
        }
        true
    }
}

impl CompiledSpelling {
    pub fn rules(&self) -> &[SpellingRule] {
        &self.rules
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Surface symbols a lexical symbol may be realized as.
    pub fn surface_options(&self, lexical: Symbol) -> Vec<Symbol> {
        let mut out = Vec::new();
        if !self.alphabet.boundaries.contains(&lexical) {
            out.push(lexical);
        }
        if let Some(v) = self.surfaces.get(&lexical) {
            out.extend(v.iter().copied());
        }
        out
    }

    /// All surface symbol sequences licensed for `lexical`.
    pub fn realizations(&self, lexical: &LexicalString<'_>) -> Vec<Vec<Symbol>> {
        let n = lexical.symbols.len();
        let options: Vec<Vec<Symbol>> = lexical.symbols.iter().map(|s| self.surface_options(*s)).collect();
        let mut checker = Checker::new(self, lexical);
        let mut out = Vec::new();
        let mut surf = Vec::with_capacity(n);
        self.realize_from(0, &options, &mut surf, &mut checker, &mut out);
        out
    }

    fn realize_from(
        &self,
        p: usize,
        options: &[Vec<Symbol>],
        surf: &mut Vec<Symbol>,
        checker: &mut Checker<'_, '_>,
        out: &mut Vec<Vec<Symbol>>,
    ) {
        let n = options.len();
        if p == n {
            let from = match self.lookahead {
                Some(r) => n.saturating_sub(r),
                None => 0,
            };
            if (from..n).all(|k| checker.position_ok(k, surf)) {
                out.push(surf.clone());
            }
            return;
        }
        for &s in &options[p] {
            surf.push(s);
            let ok = match self.lookahead {
                Some(r) if p >= r => checker.position_ok(p - r, surf),
                _ => true,
            };
            if ok {
                self.realize_from(p + 1, options, surf, checker, out);
            }
            surf.pop();
        }
    }

    /// Full check of a complete alignment.
    pub fn accepts(&self, lexical: &LexicalString<'_>, surface: &[Symbol]) -> bool {
        if surface.len() != lexical.symbols.len() {
            return false;
        }
        let mut checker = Checker::new(self, lexical);
        (0..surface.len()).all(|k| checker.position_ok(k, surface))
    }

    /// Check positions `from..to` of a partial alignment whose rule windows
    /// are already assigned. Used to prune search.
    fn partial_ok(&self, lexical: &LexicalString<'_>, surface: &[Symbol], from: usize, to: usize) -> bool {
        let mut checker = Checker::new(self, lexical);
        (from..to).all(|k| checker.position_ok(k, surface))
    }

    pub fn lookahead(&self) -> Option<usize> {
        self.lookahead
    }
}

/// Join surface symbols, dropping nulls.
pub fn surface_text(surface: &[Symbol]) -> String {
    let mut s = String::new();
    for x in surface {
        if *x != EPSILON {
            s.push_str(x.as_str());
        }
    }
    s
}

/// A stem or affix. Affix forms start with `+`.
#[derive(Clone, Debug)]
pub struct MorphemeEntry {
    pub form: String,
    pub category: Symbol,
    pub features: FeatureStructure,
}

impl MorphemeEntry {
    pub fn is_affix(&self) -> bool {
        self.form.starts_with('+')
    }
}

/// Word-formation rule: mother category over a stem and a fixed affix
/// sequence. `body` holds the mother under `m` and daughters under `d1..`.
#[derive(Clone, Debug)]
pub struct ProductionRule {
    pub name: String,
    pub mother: Symbol,
    pub daughters: Vec<Symbol>,
    pub body: FeatureStructure,
}

pub fn daughter_attr(i: usize) -> Symbol {
    Symbol::lit(&format!("d{}", i + 1))
}

pub const MOTHER_ATTR: Symbol = Symbol::lit("m");

impl ProductionRule {
    /// Unify the morphemes into the daughters; the mother on success.
    pub fn apply(&self, morphemes: &[&MorphemeEntry]) -> Option<FeatureStructure> {
        if morphemes.len() != self.daughters.len() {
            return None;
        }
        let mut fs = self.body.clone();
        for (i, m) in morphemes.iter().enumerate() {
            if m.category != self.daughters[i] || (i == 0) == m.is_affix() {
                return None;
            }
            fs = fs.unify_and_drop(daughter_attr(i), &m.features)?;
        }
        fs.get(&[MOTHER_ATTR])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphError {
    #[error("no production rule admits the morpheme sequence {0}")]
    NoProduction(String),
    #[error("production `{0}` must have a stem daughter followed only by affixes")]
    BadProduction(String),
}

#[derive(Clone, Debug, Default)]
struct Trie {
    nodes: Vec<TrieNode>,
}

#[derive(Clone, Debug, Default)]
struct TrieNode {
    next: BTreeMap<Symbol, usize>,
    entries: Vec<usize>,
}

impl Trie {
    fn build<'a>(forms: impl Iterator<Item = &'a str>) -> Trie {
        let mut t = Trie { nodes: vec![TrieNode::default()] };
        for (i, f) in forms.enumerate() {
            let mut cur = 0;
            for c in f.chars() {
                let s = char_symbol(c);
                cur = match t.nodes[cur].next.get(&s) {
                    Some(&n) => n,
                    None => {
                        t.nodes.push(TrieNode::default());
                        let n = t.nodes.len() - 1;
                        t.nodes[cur].next.insert(s, n);
                        n
                    }
                };
            }
            t.nodes[cur].entries.push(i);
        }
        t
    }
}

/// Stems indexed for analysis. Built per lexicon; the spelling rules never
/// see it.
#[derive(Clone, Debug, Default)]
pub struct StemLexicon {
    entries: Vec<MorphemeEntry>,
    trie: Trie,
}

impl StemLexicon {
    pub fn new(entries: Vec<MorphemeEntry>) -> Self {
        let trie = Trie::build(entries.iter().map(|e| e.form.as_str()));
        StemLexicon { entries, trie }
    }

    pub fn entries(&self) -> &[MorphemeEntry] {
        &self.entries
    }
}

/// Spelling rules plus affixes and production rules.
#[derive(Clone, Debug)]
pub struct Morphology {
    pub spelling: CompiledSpelling,
    affixes: Vec<MorphemeEntry>,
    productions: Vec<ProductionRule>,
    affix_trie: Trie,
    /// Category sequences that are proper prefixes of some production.
    prefixes: BTreeSet<Vec<Symbol>>,
    max_affixes: usize,
}

/// One way of analysing a surface word.
#[derive(Clone, Debug)]
pub struct WordAnalysis {
    /// Index into the stem lexicon.
    pub stem: usize,
    /// Indices into the affix list.
    pub affixes: Vec<usize>,
    pub production: String,
    pub category: Symbol,
    pub features: FeatureStructure,
}

impl Morphology {
    pub fn new(
        spelling: CompiledSpelling,
        affixes: Vec<MorphemeEntry>,
        productions: Vec<ProductionRule>,
    ) -> Result<Self, MorphError> {
        let mut prefixes = BTreeSet::new();
        let mut max_affixes = 0;
        for p in &productions {
            if p.daughters.is_empty() {
                return Err(MorphError::BadProduction(p.name.clone()));
            }
            max_affixes = max_affixes.max(p.daughters.len() - 1);
            for k in 1..=p.daughters.len() {
                prefixes.insert(p.daughters[..k].to_vec());
            }
        }
        let affix_trie = Trie::build(affixes.iter().map(|e| e.form.as_str()));
        Ok(Morphology { spelling, affixes, productions, affix_trie, prefixes, max_affixes })
    }

    pub fn affixes(&self) -> &[MorphemeEntry] {
        &self.affixes
    }

    pub fn productions(&self) -> &[ProductionRule] {
        &self.productions
    }

    /// Every production that admits the sequence, with the mother features.
    pub fn morphotax_all(&self, morphemes: &[&MorphemeEntry]) -> Vec<(&ProductionRule, FeatureStructure)> {
        self.productions
            .iter()
            .filter_map(|p| p.apply(morphemes).map(|fs| (p, fs)))
            .collect()
    }

    pub fn check_morphotax(&self, morphemes: &[&MorphemeEntry]) -> Option<FeatureStructure> {
        self.morphotax_all(morphemes).into_iter().next().map(|(_, fs)| fs)
    }

    /// Surface forms for a morpheme sequence.
    pub fn synthesize_word(&self, morphemes: &[&MorphemeEntry]) -> Result<BTreeSet<String>, MorphError> {
        if self.morphotax_all(morphemes).is_empty() {
            let names: Vec<&str> = morphemes.iter().map(|m| m.form.as_str()).collect();
            return Err(MorphError::NoProduction(names.join("")));
        }
        Ok(self.realize(morphemes))
    }

    /// Spelling realization only, without the morphotax check.
    pub fn realize(&self, morphemes: &[&MorphemeEntry]) -> BTreeSet<String> {
        let mut lex = LexicalString::new();
        for m in morphemes {
            lex.push_chars(&m.form, &m.features);
        }
        self.spelling.realizations(&lex).iter().map(|s| surface_text(s)).collect()
    }

    /// All analyses of one surface word against `stems`.
    pub fn analyze_word(&self, surface: &str, stems: &StemLexicon) -> Vec<WordAnalysis> {
        let surface: Vec<char> = surface.chars().collect();
        let mut search = Search {
            morph: self,
            stems,
            surface: &surface,
            lex: Vec::new(),
            surf: Vec::new(),
            owner: Vec::new(),
            chosen: Vec::new(),
            out: Vec::new(),
        };
        search.walk(false, 0, 0);
        search.out
    }
}

struct Search<'a> {
    morph: &'a Morphology,
    stems: &'a StemLexicon,
    surface: &'a [char],
    lex: Vec<Symbol>,
    surf: Vec<Symbol>,
    owner: Vec<usize>,
    /// (is_affix, entry index)
    chosen: Vec<(bool, usize)>,
    out: Vec<WordAnalysis>,
}

impl<'a> Search<'a> {
    fn entry(&self, (affix, i): (bool, usize)) -> &'a MorphemeEntry {
        if affix {
            &self.morph.affixes[i]
        } else {
            &self.stems.entries[i]
        }
    }

    fn consumed(&self) -> usize {
        self.surf.iter().filter(|s| **s != EPSILON).map(|s| s.as_str().chars().count()).sum()
    }

    fn surface_matches(&self, at: usize, s: Symbol) -> Option<usize> {
        if s == EPSILON {
            return Some(at);
        }
        let mut pos = at;
        for c in s.as_str().chars() {
            if self.surface.get(pos) != Some(&c) {
                return None;
            }
            pos += 1;
        }
        Some(pos)
    }

    fn walk(&mut self, in_affix: bool, node: usize, at: usize) {
        let trie = if in_affix { &self.morph.affix_trie } else { &self.stems.trie };
        let here = &trie.nodes[node];
        let ends: Vec<usize> = here.entries.clone();
        let next: Vec<(Symbol, usize)> = here.next.iter().map(|(k, v)| (*k, *v)).collect();
        for e in ends {
            self.complete_morpheme(in_affix, e, at);
        }
        for (sym, child) in next {
            for s in self.morph.spelling.surface_options(sym) {
                if let Some(nat) = self.surface_matches(at, s) {
                    self.lex.push(sym);
                    self.surf.push(s);
                    self.owner.push(self.chosen.len());
                    self.walk(in_affix, child, nat);
                    self.lex.pop();
                    self.surf.pop();
                    self.owner.pop();
                }
            }
        }
    }

    fn complete_morpheme(&mut self, affix: bool, entry: usize, at: usize) {
        self.chosen.push((affix, entry));
        let cats: Vec<Symbol> = self.chosen.iter().map(|c| self.entry(*c).category).collect();
        if self.morph.prefixes.contains(&cats) && self.window_ok() {
            if at == self.surface.len() && self.consumed() == at {
                self.finish();
            }
            if self.chosen.len() <= self.morph.max_affixes {
                self.walk(true, 0, at);
            }
        }
        self.chosen.pop();
    }

    fn lexical_string(&self) -> LexicalString<'a> {
        let mut lex = LexicalString::new();
        lex.symbols = self.lex.clone();
        lex.owner = self.owner.clone();
        lex.features = self.chosen.iter().map(|c| &self.entry(*c).features).collect();
        lex
    }

    /// Prune: positions whose rule windows lie inside completed morphemes.
    fn window_ok(&self) -> bool {
        let Some(r) = self.morph.spelling.lookahead() else { return true };
        let n = self.lex.len();
        if n <= r {
            return true;
        }
        let lex = self.lexical_string();
        // Positions before the last morpheme were checked when it started.
        let start_of_last = self.owner.iter().position(|&o| o + 1 == self.chosen.len()).unwrap_or(n);
        let from = start_of_last.saturating_sub(r);
        self.morph.spelling.partial_ok(&lex, &self.surf, from, n - r)
    }

    fn finish(&mut self) {
        let lex = self.lexical_string();
        if !self.morph.spelling.accepts(&lex, &self.surf) {
            return;
        }
        let entries: Vec<&MorphemeEntry> = self.chosen.iter().map(|c| self.entry(*c)).collect();
        for (p, fs) in self.morph.morphotax_all(&entries) {
            self.out.push(WordAnalysis {
                stem: self.chosen[0].1,
                affixes: self.chosen[1..].iter().map(|c| c.1).collect(),
                production: p.name.clone(),
                category: p.mother,
                features: fs,
            });
        }
    }
}

impl fmt::Display for MorphemeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form)
    }
}

impl WordAnalysis {
    /// `stem+affix` lexical rendering.
    pub fn lexical_form(&self, morph: &Morphology, stems: &StemLexicon) -> String {
        let mut s = stems.entries[self.stem].form.to_string();
        for a in &self.affixes {
            s.push_str(&morph.affixes[*a].form);
        }
        s
    }
}
