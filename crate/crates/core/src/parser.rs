//! Chart parsing from surface text to analyses.
//!
//! Agenda-driven chart with category-level top-down prediction. Edges hold
//! feature structures; an active edge keeps the rule body with the
//! daughters it has consumed dropped, so its structure shrinks as it grows.
//! Complete edges equal up to renaming are merged (first derivation kept).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::featstruct::FeatureStructure;
use crate::grammar::CompiledGrammar;
use crate::sandhi::{fold_initial_capital, strip_punctuation, LexToken, Punctuation};
use crate::sem::SemTerm;
use crate::symbol::Symbol;
use crate::twolevel::{daughter_attr, MOTHER_ATTR};

pub const DEFAULT_MAX_EDGES: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    pub max_edges: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { max_edges: DEFAULT_MAX_EDGES }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("chart exceeded the edge limit of {0}")]
    EdgeLimit(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Leaf { category: Symbol, token: LexToken, source: String },
    /// A node without children is a gap.
    Node { category: Symbol, rule: String, children: Vec<Tree> },
}

impl Tree {
    pub fn category(&self) -> Symbol {
        match self {
            Tree::Leaf { category, .. } | Tree::Node { category, .. } => *category,
        }
    }

    pub fn is_gap(&self) -> bool {
        matches!(self, Tree::Node { children, .. } if children.is_empty())
    }

    /// Categories of the gaps, left to right.
    pub fn gaps(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_gaps(&mut out);
        out
    }

    fn collect_gaps(&self, out: &mut Vec<Symbol>) {
        if let Tree::Node { category, children, .. } = self {
            if children.is_empty() {
                out.push(*category);
            }
            for c in children {
                c.collect_gaps(out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<&LexToken> {
        match self {
            Tree::Leaf { token, .. } => vec![token],
            Tree::Node { children, .. } => children.iter().flat_map(|c| c.leaves()).collect(),
        }
    }

    /// Rule ids used, in pre-order.
    pub fn rules(&self) -> Vec<&str> {
        match self {
            Tree::Leaf { .. } => Vec::new(),
            Tree::Node { rule, children, .. } => {
                let mut v = vec![rule.as_str()];
                for c in children {
                    v.extend(c.rules());
                }
                v
            }
        }
    }

    /// Words and gaps with brackets on branching nodes: `[vous [le voulez]_V []_NP]_S`.
    pub fn bracketed(&self) -> String {
        match self {
            Tree::Leaf { token, .. } => token.form.clone(),
            Tree::Node { category, children, .. } => {
                if children.is_empty() {
                    return format!("[]_{}", category);
                }
                if children.len() == 1 {
                    return children[0].bracketed();
                }
                let parts: Vec<String> = children.iter().map(|c| c.bracketed()).collect();
                format!("[{}]_{}", parts.join(" "), category)
            }
        }
    }
}

/// `(Cat/rule child ...)`, leaves `(Cat form)`, gaps `(Cat/rule)`.
impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf { category, token, .. } => write!(f, "({} {})", category, token),
            Tree::Node { category, rule, children } => {
                write!(f, "({}/{}", category, rule)?;
                for c in children {
                    write!(f, " {}", c)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub tree: Tree,
    pub category: Symbol,
    /// Root features after unification with the start category.
    pub features: FeatureStructure,
    pub sem: SemTerm,
    pub tokens: Vec<LexToken>,
}

impl Analysis {
    /// Atomic value of a root feature, e.g. `inv`.
    pub fn root_value(&self, attr: &str) -> Option<Symbol> {
        self.features.atom_at(&[Symbol::new(attr).ok()?])
    }
}

pub fn semantics_of(a: &Analysis) -> &SemTerm {
    &a.sem
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tokenization {
    pub sequences: Vec<Vec<LexToken>>,
    pub punctuation: Punctuation,
}

/// Candidate token sequences for a sentence: punctuation stripped, the
/// text as written and with its initial capital folded.
pub fn tokenize(text: &str, grammar: &CompiledGrammar) -> Tokenization {
    let (body, punctuation) = strip_punctuation(text);
    let mut seqs = BTreeSet::new();
    let mut variants = vec![body.clone()];
    variants.extend(fold_initial_capital(&body));
    for v in variants {
        match grammar.sandhi() {
            Some(s) => seqs.extend(s.segment_surface(&v)),
            None => {
                let toks: Vec<LexToken> = v.split_whitespace().map(LexToken::word).collect();
                if !toks.is_empty() {
                    seqs.insert(toks);
                }
            }
        }
    }
    Tokenization { sequences: seqs.into_iter().collect(), punctuation }
}

pub fn parse(text: &str, grammar: &CompiledGrammar, opts: ParseOptions) -> Result<Vec<Analysis>, ParseError> {
    let mut out: Vec<Analysis> = Vec::new();
    for seq in tokenize(text, grammar).sequences {
        for a in parse_tokens(&seq, grammar, opts)? {
            if !out.iter().any(|b| b.sem.equal_mod_renaming(&a.sem)) {
                out.push(a);
            }
        }
    }
    Ok(out)
}

enum Deriv {
    Lex { token: usize, source: String },
    Rule { rule: usize, children: Vec<usize> },
}

struct Complete {
    cat: Symbol,
    fs: FeatureStructure,
    start: usize,
    end: usize,
    deriv: Deriv,
}

struct Active {
    rule: usize,
    dot: usize,
    start: usize,
    end: usize,
    fs: FeatureStructure,
    children: Vec<usize>,
}

enum Item {
    Complete(usize),
    Active(usize),
}

struct Chart<'g> {
    g: &'g CompiledGrammar,
    max_edges: usize,
    completes: Vec<Complete>,
    actives: Vec<Active>,
    complete_keys: BTreeSet<(Symbol, usize, usize, String)>,
    active_keys: BTreeSet<(usize, usize, usize, usize, String)>,
    /// (start, category) -> complete edges.
    by_start: BTreeMap<(usize, Symbol), Vec<usize>>,
    /// (end, needed category) -> active edges.
    waiting: BTreeMap<(usize, Symbol), Vec<usize>>,
    predicted: BTreeSet<(usize, Symbol)>,
    agenda: Vec<Item>,
}

impl<'g> Chart<'g> {
    fn edges(&self) -> usize {
        self.completes.len() + self.actives.len()
    }

    fn check(&self) -> Result<(), ParseError> {
        if self.edges() > self.max_edges {
            Err(ParseError::EdgeLimit(self.max_edges))
        } else {
            Ok(())
        }
    }

    fn add_complete(&mut self, c: Complete) -> Result<(), ParseError> {
        let key = (c.cat, c.start, c.end, c.fs.canonical());
        if !self.complete_keys.insert(key) {
            return Ok(());
        }
        let id = self.completes.len();
        self.by_start.entry((c.start, c.cat)).or_default().push(id);
        self.completes.push(c);
        self.agenda.push(Item::Complete(id));
        self.check()
    }

    fn add_active(&mut self, a: Active, keyed: bool) -> Result<(), ParseError> {
        let rule = self.g.rule(a.rule);
        if a.dot == rule.daughters.len() {
            let Some(m) = a.fs.get(&[MOTHER_ATTR]) else { return Ok(()) };
            return self.add_complete(Complete {
                cat: rule.mother,
                fs: m,
                start: a.start,
                end: a.end,
                deriv: Deriv::Rule { rule: a.rule, children: a.children },
            });
        }
        if keyed {
            let key = (a.rule, a.dot, a.start, a.end, a.fs.canonical());
            if !self.active_keys.insert(key) {
                return Ok(());
            }
        }
        let id = self.actives.len();
        let need = rule.daughters[a.dot];
        self.waiting.entry((a.end, need)).or_default().push(id);
        self.actives.push(a);
        self.agenda.push(Item::Active(id));
        self.check()
    }

    fn predict(&mut self, cat: Symbol, pos: usize) -> Result<(), ParseError> {
        if !self.predicted.insert((pos, cat)) {
            return Ok(());
        }
        for &r in self.g.rules_with_mother(cat) {
            let fs = self.g.rule(r).body.clone();
            self.add_active(Active { rule: r, dot: 0, start: pos, end: pos, fs, children: Vec::new() }, false)?;
        }
        Ok(())
    }

    fn combine(&mut self, a: usize, c: usize) -> Result<(), ParseError> {
        let (act, comp) = (&self.actives[a], &self.completes[c]);
        let Some(fs) = act.fs.unify_and_drop(daughter_attr(act.dot), &comp.fs) else { return Ok(()) };
        let mut children = act.children.clone();
        children.push(c);
        let next = Active { rule: act.rule, dot: act.dot + 1, start: act.start, end: comp.end, fs, children };
        self.add_active(next, true)
    }

    fn run(&mut self) -> Result<(), ParseError> {
        while let Some(item) = self.agenda.pop() {
            match item {
                Item::Complete(c) => {
                    let key = (self.completes[c].start, self.completes[c].cat);
                    let waiting = self.waiting.get(&key).cloned().unwrap_or_default();
                    for a in waiting {
                        self.combine(a, c)?;
                    }
                }
                Item::Active(a) => {
                    let need = self.g.rule(self.actives[a].rule).daughters[self.actives[a].dot];
                    let end = self.actives[a].end;
                    self.predict(need, end)?;
                    let ready = self.by_start.get(&(end, need)).cloned().unwrap_or_default();
                    for c in ready {
                        self.combine(a, c)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn tree(&self, c: usize, tokens: &[LexToken]) -> Tree {
        let e = &self.completes[c];
        match &e.deriv {
            Deriv::Lex { token, source } => {
                Tree::Leaf { category: e.cat, token: tokens[*token].clone(), source: source.clone() }
            }
            Deriv::Rule { rule, children } => Tree::Node {
                category: e.cat,
                rule: self.g.rule(*rule).id.clone(),
                children: children.iter().map(|&k| self.tree(k, tokens)).collect(),
            },
        }
    }
}

/// Parse one token sequence.
pub fn parse_tokens(
    tokens: &[LexToken],
    grammar: &CompiledGrammar,
    opts: ParseOptions,
) -> Result<Vec<Analysis>, ParseError> {
    let mut chart = Chart {
        g: grammar,
        max_edges: opts.max_edges,
        completes: Vec::new(),
        actives: Vec::new(),
        complete_keys: BTreeSet::new(),
        active_keys: BTreeSet::new(),
        by_start: BTreeMap::new(),
        waiting: BTreeMap::new(),
        predicted: BTreeSet::new(),
        agenda: Vec::new(),
    };
    if tokens.is_empty() {
        return Ok(Vec::new());
    }
    for (i, t) in tokens.iter().enumerate() {
        let items = grammar.lexical_lookup(t);
        if items.is_empty() {
            return Ok(Vec::new());
        }
        for item in items {
            chart.add_complete(Complete {
                cat: item.category,
                fs: item.features,
                start: i,
                end: i + 1,
                deriv: Deriv::Lex { token: i, source: item.source },
            })?;
        }
    }
    for (cat, _) in &grammar.inventory.start {
        chart.predict(*cat, 0)?;
    }
    chart.run()?;

    let result = grammar.inventory.result_attr();
    let mut out: Vec<Analysis> = Vec::new();
    for (cat, start_fs) in &grammar.inventory.start {
        let Some(ids) = chart.by_start.get(&(0, *cat)) else { continue };
        for &c in ids {
            let e = &chart.completes[c];
            if e.end != tokens.len() {
                continue;
            }
            let Some(fs) = e.fs.unify(start_fs) else { continue };
            let Some(node) = fs.child(fs.root(), result) else { continue };
            let Some(sem) = SemTerm::from_fs_node(&fs, node) else { continue };
            if out.iter().any(|a| a.sem.equal_mod_renaming(&sem)) {
                continue;
            }
            out.push(Analysis { tree: chart.tree(c, tokens), category: *cat, features: fs, sem, tokens: tokens.to_vec() });
        }
    }
    Ok(out)
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}", self.tree, self.sem)
    }
}

/// Words of a tree rendered through sandhi, for display.
pub fn surface_of(tree: &Tree, grammar: &CompiledGrammar) -> String {
    let toks: Vec<LexToken> = tree.leaves().into_iter().cloned().collect();
    match grammar.sandhi() {
        Some(s) => s.render_surface(&toks),
        None => toks.iter().map(|t| t.form.to_string()).collect::<Vec<_>>().join(" "),
    }
}
