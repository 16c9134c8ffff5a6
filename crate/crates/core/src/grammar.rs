//! Unification grammar: feature inventory, rules with semantic templates,
//! lexicon with macros, and compilation into an immutable indexed grammar.
//!
//! All files use one item per logical line (`//` comments; indented lines
//! continue the previous line).
//!
//! ```text
//! features:  category S VP NP ...
//!            feature inv: inverted uninverted ...   value list optional
//!            thread gi go: S VP NP ...             difference-list pair
//!            start S[...]
//!            semantics qsem                        root attribute read as result
//! syntax:    rule ID: M --> D1 ... Dn [= FS] {; ATTR: TERM}
//! lexicon:   lex FORM: Cat[FS] {; ATTR: TERM}      full form
//!            stem FORM: Cat[FS] {; ATTR: TERM}     stem for the morphology
//!            macro NAME(%A, ..) = ENTRY {| ENTRY}
//!            NAME(arg, ..)                         macro application
//! ```
//!
//! A rule's `; ATTR: TERM` clause sets that attribute of the mother; `$n` in
//! the term is the `sem` of daughter n, and `?X` shares with the categories.
//!
//! Thread pairs are wired automatically: in a rule that mentions neither
//! feature of a pair, the pair is chained left to right through the
//! threaded daughters (mother in = first in, each out = next in, last out =
//! mother out). Lexical items of a threaded category that mention neither
//! feature get in = out.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::featstruct::{FeatureStructure, Node, NodeId};
use crate::fstext::{FsBuilder, Reader};
use crate::ruletext::{logical_lines, read_morphotax_file, read_spelling_file};
use crate::sandhi::{LexToken, Sandhi};
use crate::sem;
use crate::symbol::Symbol;
use crate::twolevel::{compile_spelling, daughter_attr, MorphemeEntry, Morphology, StemLexicon, MOTHER_ATTR};

/// Daughter semantics referenced by `$n`.
pub const SEM_ATTR: Symbol = Symbol::lit("sem");

#[derive(Clone, Copy, Debug)]
pub struct Source<'a> {
    pub name: &'a str,
    pub text: &'a str,
}

/// Everything one language pack consists of.
#[derive(Clone, Debug)]
pub struct PackSources<'a> {
    pub features: Source<'a>,
    pub syntax: Vec<Source<'a>>,
    pub lexicon: Vec<Source<'a>>,
    pub morph_rules: Option<Source<'a>>,
    pub morphotax: Option<Source<'a>>,
    pub sandhi: Option<Source<'a>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{file}:{line}: {msg}")]
pub struct GrammarError {
    pub file: String,
    pub line: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadDecl {
    pub input: Symbol,
    pub output: Symbol,
    pub categories: BTreeSet<Symbol>,
}

#[derive(Clone, Debug, Default)]
pub struct FeatureInventory {
    pub categories: BTreeSet<Symbol>,
    /// Declared features; `Some` restricts atomic values.
    pub features: BTreeMap<Symbol, Option<BTreeSet<Symbol>>>,
    pub threads: Vec<ThreadDecl>,
    pub start: Vec<(Symbol, FeatureStructure)>,
    pub semantics: Option<Symbol>,
}

impl FeatureInventory {
    pub fn result_attr(&self) -> Symbol {
        self.semantics.unwrap_or(SEM_ATTR)
    }

    pub fn is_threaded(&self, cat: Symbol) -> bool {
        self.threads.iter().any(|t| t.categories.contains(&cat))
    }

    /// Undeclared attributes or values reachable from `node`.
    fn check(&self, fs: &FeatureStructure, node: NodeId) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            let Node::Map(m) = fs.node(n) else { continue };
            for (attr, child) in m {
                if is_term_attr(*attr) {
                    stack.push(*child);
                    continue;
                }
                match self.features.get(attr) {
                    None => return Err(format!("undeclared feature `{}`", attr)),
                    Some(Some(values)) => {
                        if let Node::Atoms(atoms) = fs.node(*child) {
                            if let Some(bad) = atoms.iter().find(|a| !values.contains(a)) {
                                return Err(format!("undeclared value `{}` for feature `{}`", bad, attr));
                            }
                        }
                    }
                    Some(None) => {}
                }
                stack.push(*child);
            }
        }
        Ok(())
    }
}

fn is_term_attr(a: Symbol) -> bool {
    let s = a.as_str();
    a == sem::ATTR_FUNCTOR
        || a == sem::ATTR_VAR
        || (s.len() > 1 && s.starts_with('a') && s[1..].chars().all(|c| c.is_ascii_digit()))
}

#[derive(Clone, Debug)]
pub struct GrammarRule {
    pub id: String,
    pub mother: Symbol,
    pub daughters: Vec<Symbol>,
    /// Mother under `m`, daughters under `d1..`, threads wired.
    pub body: FeatureStructure,
}

impl GrammarRule {
    pub fn is_empty(&self) -> bool {
        self.daughters.is_empty()
    }

    /// Re-readable syntax-file line.
    pub fn to_text(&self) -> String {
        let mut s = format!("rule {}: {} -->", self.id, self.mother);
        for d in &self.daughters {
            s.push(' ');
            s.push_str(d.as_str());
        }
        s.push_str(" = ");
        s.push_str(&self.body.to_string());
        s
    }
}

#[derive(Clone, Debug)]
pub struct LexEntry {
    pub form: String,
    pub category: Symbol,
    pub features: FeatureStructure,
    /// Stems go to the morphology; other entries are full forms.
    pub stem: bool,
}

impl LexEntry {
    pub fn token(&self) -> LexToken {
        token_for_form(&self.form)
    }
}

fn token_for_form(form: &str) -> LexToken {
    match form {
        "-" => LexToken::hyphen(),
        "--" => LexToken::noun_hyphen(),
        _ => LexToken::word(form),
    }
}

#[derive(Clone, Debug)]
pub struct LexMacro {
    pub name: String,
    pub params: Vec<String>,
    pub body: String,
}

impl LexMacro {
    pub fn expand(&self, args: &[&str]) -> Result<Vec<LexEntry>, String> {
        if args.len() != self.params.len() {
            return Err(format!(
                "macro `{}` takes {} arguments, got {}",
                self.name,
                self.params.len(),
                args.len()
            ));
        }
        let mut order: Vec<usize> = (0..args.len()).collect();
        order.sort_by_key(|&i| core::cmp::Reverse(self.params[i].len()));
        let mut text = self.body.clone();
        for i in order {
            text = text.replace(self.params[i].as_str(), args[i]);
        }
        text.split('|').map(|e| read_entry(e.trim())).collect()
    }
}

/// One lexical hit for a token.
#[derive(Clone, Debug)]
pub struct LexItem {
    pub category: Symbol,
    pub features: FeatureStructure,
    /// `le`, or the lexical form of a morphological analysis (`aim+e`).
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct CompiledGrammar {
    pub inventory: FeatureInventory,
    rules: Vec<GrammarRule>,
    by_mother: BTreeMap<Symbol, Vec<usize>>,
    by_first: BTreeMap<Symbol, Vec<usize>>,
    empty: Vec<usize>,
    entries: Vec<LexEntry>,
    by_token: BTreeMap<LexToken, Vec<usize>>,
    macros: BTreeMap<String, LexMacro>,
    stems: StemLexicon,
    morphology: Option<Morphology>,
    sandhi: Option<Sandhi>,
}

pub fn compile_grammar(src: &PackSources<'_>) -> Result<CompiledGrammar, GrammarError> {
    let inventory = read_features(src.features)?;

    let mut rules: Vec<GrammarRule> = Vec::new();
    let mut ids = BTreeSet::new();
    for file in &src.syntax {
        for (line, text) in logical_lines(file.text) {
            let err = |msg: String| GrammarError { file: file.name.to_string(), line, msg };
            let rule = read_rule(&text, &inventory).map_err(err)?;
            if !ids.insert(rule.id.clone()) {
                return Err(err(format!("duplicate rule id `{}`", rule.id)));
            }
            rules.push(rule);
        }
    }

    let mut macros: BTreeMap<String, LexMacro> = BTreeMap::new();
    for file in &src.lexicon {
        for (line, text) in logical_lines(file.text) {
            if let Some(rest) = text.strip_prefix("macro ") {
                let err = |msg: String| GrammarError { file: file.name.to_string(), line, msg };
                let m = read_macro(rest).map_err(err)?;
                if macros.insert(m.name.clone(), m).is_some() {
                    return Err(err("duplicate macro".into()));
                }
            }
        }
    }
    let mut entries: Vec<LexEntry> = Vec::new();
    for file in &src.lexicon {
        for (line, text) in logical_lines(file.text) {
            let err = |msg: String| GrammarError { file: file.name.to_string(), line, msg };
            if text.starts_with("macro ") {
                continue;
            }
            let new = if text.starts_with("lex ") || text.starts_with("stem ") {
                vec![read_entry(&text).map_err(err)?]
            } else {
                let (name, args) = parse_application(&text).map_err(err)?;
                let m = macros.get(name).ok_or_else(|| err(format!("unknown macro `{}`", name)))?;
                m.expand(&args).map_err(err)?
            };
            for e in new {
                if !inventory.categories.contains(&e.category) {
                    return Err(err(format!("undeclared category `{}`", e.category)));
                }
                inventory
                    .check(&e.features, e.features.root())
                    .map_err(|m| err(format!("entry `{}`: {}", e.form, m)))?;
                entries.push(e);
            }
        }
    }

    let morphology = match (src.morph_rules, src.morphotax) {
        (Some(rules_src), Some(tax_src)) => {
            let file = read_spelling_file(rules_src.text)
                .map_err(|e| GrammarError { file: rules_src.name.into(), line: e.line, msg: e.msg })?;
            let spelling = compile_spelling(file.rules, file.alphabet)
                .map_err(|e| GrammarError { file: rules_src.name.into(), line: 0, msg: e.to_string() })?;
            let tax = read_morphotax_file(tax_src.text)
                .map_err(|e| GrammarError { file: tax_src.name.into(), line: e.line, msg: e.msg })?;
            for a in &tax.affixes {
                inventory
                    .check(&a.features, a.features.root())
                    .map_err(|m| GrammarError { file: tax_src.name.into(), line: 0, msg: format!("affix `{}`: {}", a.form, m) })?;
            }
            Some(
                Morphology::new(spelling, tax.affixes, tax.productions)
                    .map_err(|e| GrammarError { file: tax_src.name.into(), line: 0, msg: e.to_string() })?,
            )
        }
        (None, None) => None,
        _ => {
            return Err(GrammarError {
                file: src.features.name.into(),
                line: 0,
                msg: "spelling rules and morphotax must be given together".into(),
            })
        }
    };

    let stems = StemLexicon::new(
        entries
            .iter()
            .filter(|e| e.stem)
            .map(|e| MorphemeEntry { form: e.form.clone(), category: e.category, features: e.features.clone() })
            .collect(),
    );
    if morphology.is_none() && !stems.entries().is_empty() {
        return Err(GrammarError {
            file: src.features.name.into(),
            line: 0,
            msg: "stem entries need a morphology".into(),
        });
    }

    let mut by_token: BTreeMap<LexToken, Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        if !e.stem {
            by_token.entry(e.token()).or_default().push(i);
        }
    }

    let sandhi = match src.sandhi {
        Some(s) => {
            let file = read_spelling_file(s.text).map_err(|e| GrammarError { file: s.name.into(), line: e.line, msg: e.msg })?;
            let vocab: Vec<LexToken> = by_token.keys().cloned().collect();
            Some(Sandhi::new(file, vocab).map_err(|e| GrammarError { file: s.name.into(), line: 0, msg: e.to_string() })?)
        }
        None => None,
    };

    let mut by_mother: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
    let mut by_first: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
    let mut empty = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        by_mother.entry(r.mother).or_default().push(i);
        match r.daughters.first() {
            Some(d) => by_first.entry(*d).or_default().push(i),
            None => empty.push(i),
        }
    }

    Ok(CompiledGrammar {
        inventory,
        rules,
        by_mother,
        by_first,
        empty,
        entries,
        by_token,
        macros,
        stems,
        morphology,
        sandhi,
    })
}

fn read_features(src: Source<'_>) -> Result<FeatureInventory, GrammarError> {
    let mut inv = FeatureInventory::default();
    let mut starts: Vec<(usize, String)> = Vec::new();
    for (line, text) in logical_lines(src.text) {
        let err = |msg: String| GrammarError { file: src.name.to_string(), line, msg };
        let sym = |s: &str| Symbol::new(s).map_err(|e| err(e.to_string()));
        let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text.as_str(), ""));
        let rest = rest.trim();
        match head {
            "category" => {
                for c in rest.split_whitespace() {
                    inv.categories.insert(sym(c)?);
                }
            }
            "feature" => {
                let (name, values) = match rest.split_once(':') {
                    Some((n, v)) => (n.trim(), Some(v)),
                    None => (rest, None),
                };
                let values = match values {
                    Some(v) => Some(v.split_whitespace().map(sym).collect::<Result<BTreeSet<_>, _>>()?),
                    None => None,
                };
                if inv.features.insert(sym(name)?, values).is_some() {
                    return Err(err(format!("feature `{}` declared twice", name)));
                }
            }
            "thread" => {
                let (pair, cats) = rest.split_once(':').ok_or_else(|| err("expected `thread IN OUT: CATS`".into()))?;
                let pair: Vec<&str> = pair.split_whitespace().collect();
                if pair.len() != 2 {
                    return Err(err("a thread names an input and an output feature".into()));
                }
                let categories = cats.split_whitespace().map(sym).collect::<Result<BTreeSet<_>, _>>()?;
                inv.threads.push(ThreadDecl { input: sym(pair[0])?, output: sym(pair[1])?, categories });
            }
            "start" => starts.push((line, rest.to_string())),
            "semantics" => inv.semantics = Some(sym(rest)?),
            _ => return Err(err(format!("unknown directive `{}`", head))),
        }
    }
    for t in &inv.threads {
        for c in &t.categories {
            if !inv.categories.contains(c) {
                return Err(GrammarError {
                    file: src.name.into(),
                    line: 0,
                    msg: format!("thread over undeclared category `{}`", c),
                });
            }
        }
        for f in [t.input, t.output] {
            if !inv.features.contains_key(&f) {
                return Err(GrammarError { file: src.name.into(), line: 0, msg: format!("undeclared feature `{}`", f) });
            }
        }
    }
    for (line, text) in starts {
        let err = |msg: String| GrammarError { file: src.name.to_string(), line, msg };
        let mut b = FsBuilder::new();
        let mut r = Reader::new(&text, &mut b);
        let (cat, node) = r.category().map_err(|e| err(e.to_string()))?;
        if !r.at_end() {
            return Err(err(format!("trailing input `{}`", r.rest())));
        }
        let fs = b.finish(node).ok_or_else(|| err("cyclic structure".into()))?;
        if !inv.categories.contains(&cat) {
            return Err(err(format!("undeclared category `{}`", cat)));
        }
        inv.check(&fs, fs.root()).map_err(err)?;
        inv.start.push((cat, fs));
    }
    Ok(inv)
}

/// Split `head ; attr: term ; ...` into the head and its clauses.
fn split_clauses(text: &str) -> (&str, Vec<(&str, &str)>, Option<String>) {
    let mut parts = text.split(';');
    let head = parts.next().unwrap_or("").trim();
    let mut clauses = Vec::new();
    for p in parts {
        match p.split_once(':') {
            Some((a, t)) => clauses.push((a.trim(), t.trim())),
            None => return (head, clauses, Some(format!("expected `ATTR: TERM` in `{}`", p.trim()))),
        }
    }
    (head, clauses, None)
}

/// Read each `ATTR: TERM` clause into `node`.
fn put_clauses(b: &mut FsBuilder, node: NodeId, clauses: &[(&str, &str)]) -> Result<(), String> {
    for (attr, term) in clauses {
        let a = Symbol::new(attr).map_err(|e| e.to_string())?;
        let mut r = Reader::new(term, b);
        let t = r.term().map_err(|e| format!("in `{}`: {}", term, e))?;
        if !r.at_end() {
            return Err(format!("trailing input in term `{}`", term));
        }
        if !b.put(node, &[a], t) {
            return Err(format!("`{}` clause clashes with the category", attr));
        }
    }
    Ok(())
}

fn read_rule(text: &str, inv: &FeatureInventory) -> Result<GrammarRule, String> {
    let rest = text.strip_prefix("rule ").ok_or("expected `rule ID: ...`")?;
    let (id, rest) = rest.split_once(':').ok_or("expected `rule ID: ...`")?;
    let id = id.trim().to_string();
    let (head, clauses, bad) = split_clauses(rest);
    if let Some(m) = bad {
        return Err(format!("rule `{}`: {}", id, m));
    }
    let e = |m: String| format!("rule `{}`: {}", id, m);
    let mut b = FsBuilder::new();
    let root = b.empty_map();
    let (mother, mnode, daughters, dnodes) = {
        let mut r = Reader::new(head, &mut b);
        let (mother, mnode) = r.category().map_err(|x| e(x.to_string()))?;
        if !r.eat_str("-->") {
            return Err(e("expected `-->`".into()));
        }
        let mut daughters = Vec::new();
        let mut dnodes = Vec::new();
        while !r.at_end() && r.peek() != Some('=') {
            let (c, n) = r.category().map_err(|x| e(x.to_string()))?;
            daughters.push(c);
            dnodes.push(n);
        }
        if r.eat('=') {
            let whole = r.value().map_err(|x| e(x.to_string()))?;
            if !r.at_end() {
                return Err(e(format!("trailing input `{}`", r.rest())));
            }
            // Categories are read first so that `m`/`dN` inside the body
            // unify with them below.
            (mother, mnode, daughters, (dnodes, Some(whole)))
        } else {
            (mother, mnode, daughters, (dnodes, None))
        }
    };
    let (dnodes, whole) = dnodes;
    b.put(root, &[MOTHER_ATTR], mnode);
    for (i, n) in dnodes.iter().enumerate() {
        b.put(root, &[daughter_attr(i)], *n);
    }
    if let Some(w) = whole {
        if !b.unify(root, w) {
            return Err(e("body clashes with the categories".into()));
        }
    }
    put_clauses(&mut b, mnode, &clauses).map_err(e)?;
    let holes: Vec<String> = b.var_names().filter(|v| v.starts_with('$')).map(|v| v.to_string()).collect();
    for h in holes {
        let k: usize = h[1..].parse().map_err(|_| e(format!("bad hole `{}`", h)))?;
        if k == 0 || k > daughters.len() {
            return Err(e(format!("template hole `{}` names no daughter", h)));
        }
        let v = b.var(&h);
        if !b.put(dnodes[k - 1], &[SEM_ATTR], v) {
            return Err(e(format!("template hole `{}` clashes with daughter {}", h, k)));
        }
    }
    for c in core::iter::once(&mother).chain(daughters.iter()) {
        if !inv.categories.contains(c) {
            return Err(e(format!("undeclared category `{}`", c)));
        }
    }
    // Thread wiring.
    let cats: Vec<(Symbol, NodeId)> =
        core::iter::once((mother, mnode)).chain(daughters.iter().copied().zip(dnodes.iter().copied())).collect();
    for t in &inv.threads {
        let threaded: Vec<usize> = (0..cats.len()).filter(|&i| t.categories.contains(&cats[i].0)).collect();
        if threaded.is_empty() {
            continue;
        }
        let mentioned = threaded.iter().any(|&i| {
            let n = cats[i].1;
            b.arena.child(n, t.input, false).is_some() || b.arena.child(n, t.output, false).is_some()
        });
        if !mentioned {
            let ds: Vec<NodeId> = threaded.iter().filter(|&&i| i > 0).map(|&i| cats[i].1).collect();
            let mut ok = true;
            if threaded[0] == 0 {
                let mut cur = b.any();
                ok &= b.put(mnode, &[t.input], cur);
                for d in &ds {
                    let i = b.any();
                    ok &= b.put(*d, &[t.input], i);
                    ok &= b.unify(i, cur);
                    let o = b.any();
                    ok &= b.put(*d, &[t.output], o);
                    cur = o;
                }
                ok &= b.put(mnode, &[t.output], cur);
            } else {
                // Unthreaded mother: the chain must close on itself.
                let start = b.any();
                let mut cur = start;
                for d in &ds {
                    ok &= b.put(*d, &[t.input], cur);
                    let o = b.any();
                    ok &= b.put(*d, &[t.output], o);
                    cur = o;
                }
                ok &= b.unify(cur, start);
            }
            if !ok {
                return Err(e("thread wiring clashes".into()));
            }
        }
        for &i in &threaded {
            let n = cats[i].1;
            for f in [t.input, t.output] {
                if b.arena.child(n, f, false).is_none() {
                    return Err(e(format!("category {} ({}) lacks thread feature `{}`", i, cats[i].0, f)));
                }
            }
        }
    }
    let body = b.finish(root).ok_or_else(|| e("cyclic structure".into()))?;
    for (i, _) in cats.iter().enumerate() {
        let attr = if i == 0 { MOTHER_ATTR } else { daughter_attr(i - 1) };
        let n = body.child(body.root(), attr).ok_or_else(|| e("missing category".into()))?;
        inv.check(&body, n).map_err(e)?;
    }
    Ok(GrammarRule { id, mother, daughters, body })
}

fn read_entry(text: &str) -> Result<LexEntry, String> {
    let (kw, rest) = text.split_once(' ').ok_or("expected `lex FORM: ...`")?;
    let stem = match kw {
        "lex" => false,
        "stem" => true,
        _ => return Err(format!("unknown directive `{}`", kw)),
    };
    let (form, body) = rest.split_once(": ").ok_or("expected `FORM: Category`")?;
    let form = form.trim().to_string();
    if form.is_empty() {
        return Err("empty form".into());
    }
    let e = |m: String| format!("entry `{}`: {}", form, m);
    let (head, clauses, bad) = split_clauses(body);
    if let Some(m) = bad {
        return Err(e(m));
    }
    let mut b = FsBuilder::new();
    let (category, node) = {
        let mut r = Reader::new(head, &mut b);
        let c = r.category().map_err(|x| e(x.to_string()))?;
        if !r.at_end() {
            return Err(e(format!("trailing input `{}`", r.rest())));
        }
        c
    };
    put_clauses(&mut b, node, &clauses).map_err(e)?;
    let features = b.finish(node).ok_or_else(|| e("cyclic structure".into()))?;
    Ok(LexEntry { form, category, features, stem })
}

fn read_macro(text: &str) -> Result<LexMacro, String> {
    let (sig, body) = text.split_once('=').ok_or("expected `macro NAME(%A, ..) = ENTRY`")?;
    let (name, params) = parse_application(sig.trim())?;
    for p in &params {
        if !p.starts_with('%') || p.len() < 2 {
            return Err(format!("macro parameter `{}` must start with `%`", p));
        }
    }
    Ok(LexMacro {
        name: name.to_string(),
        params: params.iter().map(|p| p.to_string()).collect(),
        body: body.trim().to_string(),
    })
}

fn parse_application(text: &str) -> Result<(&str, Vec<&str>), String> {
    let open = text.find('(').ok_or_else(|| format!("expected an entry or macro application, got `{}`", text))?;
    let inner = text[open + 1..].strip_suffix(')').ok_or("expected `)` at the end")?;
    let name = text[..open].trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(format!("bad macro name `{}`", name));
    }
    let args = if inner.trim().is_empty() { Vec::new() } else { split_top(inner) };
    Ok((name, args))
}

/// Split on commas outside brackets.
fn split_top(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' | '{' | '<' => depth += 1,
            ')' | ']' | '}' | '>' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

/// Add `in = out` for each thread pair the category carries but the
/// features do not mention.
fn thread_defaults(inv: &FeatureInventory, cat: Symbol, fs: &FeatureStructure) -> Option<FeatureStructure> {
    let mut out = fs.clone();
    for t in &inv.threads {
        if !t.categories.contains(&cat) {
            continue;
        }
        if fs.child(fs.root(), t.input).is_some() || fs.child(fs.root(), t.output).is_some() {
            continue;
        }
        let mut b = FsBuilder::new();
        let root = b.empty_map();
        let v = b.any();
        b.put(root, &[t.input], v);
        b.put(root, &[t.output], v);
        out = out.unify(&b.finish(root)?)?;
    }
    Some(out)
}

impl CompiledGrammar {
    pub fn rules(&self) -> &[GrammarRule] {
        &self.rules
    }

    pub fn rule(&self, i: usize) -> &GrammarRule {
        &self.rules[i]
    }

    pub fn rules_with_mother(&self, cat: Symbol) -> &[usize] {
        self.by_mother.get(&cat).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn rules_with_first(&self, cat: Symbol) -> &[usize] {
        self.by_first.get(&cat).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn empty_rules(&self) -> &[usize] {
        &self.empty
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn stems(&self) -> &StemLexicon {
        &self.stems
    }

    pub fn morphology(&self) -> Option<&Morphology> {
        self.morphology.as_ref()
    }

    pub fn sandhi(&self) -> Option<&Sandhi> {
        self.sandhi.as_ref()
    }

    pub fn macros(&self) -> impl Iterator<Item = &LexMacro> {
        self.macros.values()
    }

    pub fn expand_macro(&self, name: &str, args: &[&str]) -> Result<Vec<LexEntry>, String> {
        self.macros.get(name).ok_or_else(|| format!("unknown macro `{}`", name))?.expand(args)
    }

    /// Full-form entries plus morphological analyses mapped through stems.
    pub fn lexical_lookup(&self, token: &LexToken) -> Vec<LexItem> {
        let mut out = Vec::new();
        if let Some(ix) = self.by_token.get(token) {
            for &i in ix {
                let e = &self.entries[i];
                if let Some(fs) = thread_defaults(&self.inventory, e.category, &e.features) {
                    out.push(LexItem { category: e.category, features: fs, source: e.form.clone() });
                }
            }
        }
        if let (Some(m), crate::sandhi::TokenKind::Word) = (&self.morphology, token.kind) {
            for a in m.analyze_word(&token.form, &self.stems) {
                if let Some(fs) = thread_defaults(&self.inventory, a.category, &a.features) {
                    out.push(LexItem { category: a.category, features: fs, source: a.lexical_form(m, &self.stems) });
                }
            }
        }
        out
    }

    /// Every inflected word of one stem, with its surface forms.
    pub fn word_forms(&self, stem: usize) -> Vec<(BTreeSet<String>, LexItem)> {
        let Some(m) = &self.morphology else { return Vec::new() };
        let s = &self.stems.entries()[stem];
        let mut out = Vec::new();
        for p in m.productions() {
            if p.daughters[0] != s.category {
                continue;
            }
            let options: Vec<Vec<&MorphemeEntry>> = p.daughters[1..]
                .iter()
                .map(|c| m.affixes().iter().filter(|a| a.category == *c).collect())
                .collect();
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            let mut pick = vec![0usize; options.len()];
            'combos: loop {
                let mut seq: Vec<&MorphemeEntry> = vec![s];
                seq.extend(pick.iter().enumerate().map(|(i, &k)| options[i][k]));
                if let Some(fs) = p.apply(&seq) {
                    let surfaces = m.realize(&seq);
                    let fs = thread_defaults(&self.inventory, p.mother, &fs);
                    if let (false, Some(fs)) = (surfaces.is_empty(), fs) {
                        let source: String = seq.iter().map(|x| x.form.as_str()).collect();
                        out.push((surfaces, LexItem { category: p.mother, features: fs, source }));
                    }
                }
                let mut i = 0;
                loop {
                    if i == pick.len() {
                        break 'combos;
                    }
                    pick[i] += 1;
                    if pick[i] < options[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
            }
        }
        out
    }

    /// Full-form entries as lexical items.
    pub fn full_forms(&self) -> impl Iterator<Item = (&LexEntry, LexItem)> {
        self.entries.iter().filter(|e| !e.stem).filter_map(move |e| {
            let fs = thread_defaults(&self.inventory, e.category, &e.features)?;
            Some((e, LexItem { category: e.category, features: fs, source: e.form.clone() }))
        })
    }

    /// Syntax-file text of the compiled rules; compiling it again gives
    /// the same rule set.
    pub fn rules_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rules {
            s.push_str(&r.to_text());
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FEATURES: &str = "\
category S NP VP V Det N
feature agr
feature sem
feature num: sg pl
feature gi
feature go
thread gi go: S NP VP
start S[gi=none, go=none]
";

    fn pack<'a>(syntax: &'a str, lexicon: &'a str) -> PackSources<'a> {
        PackSources {
            features: Source { name: "features", text: FEATURES },
            syntax: vec![Source { name: "syntax", text: syntax }],
            lexicon: vec![Source { name: "lexicon", text: lexicon }],
            morph_rules: None,
            morphotax: None,
            sandhi: None,
        }
    }

    #[test]
    fn empty_grammar_compiles() {
        let g = compile_grammar(&pack("", "")).unwrap();
        assert!(g.rules().is_empty());
        assert!(g.lexical_lookup(&LexToken::word("xyzzy")).is_empty());
    }

    #[test]
    fn typo_feature_is_named() {
        let e = compile_grammar(&pack("rule s: S --> NP[agrr=?A] VP[agr=?A]", "")).unwrap_err();
        assert!(e.msg.contains("agrr"), "{}", e);
        assert_eq!(e.line, 1);
        let e = compile_grammar(&pack("rule s: S --> NP[num=sgg] VP", "")).unwrap_err();
        assert!(e.msg.contains("sgg"), "{}", e);
    }

    #[test]
    fn unbound_hole_and_duplicate_id() {
        let e = compile_grammar(&pack("rule s: S --> NP VP ; sem: p($3)", "")).unwrap_err();
        assert!(e.msg.contains("$3"), "{}", e);
        let e = compile_grammar(&pack("rule s: S --> NP VP\nrule s: S --> VP", "")).unwrap_err();
        assert!(e.msg.contains("duplicate"), "{}", e);
        assert_eq!(e.line, 2);
    }

    #[test]
    fn threads_are_chained() {
        let g = compile_grammar(&pack("rule s: S --> NP Det VP", "")).unwrap();
        let body = &g.rule(0).body;
        let p = |s: &str| -> Vec<Symbol> { s.split('.').map(Symbol::lit).collect() };
        assert_eq!(body.path_node(&p("m.gi")), body.path_node(&p("d1.gi")));
        assert_eq!(body.path_node(&p("d1.go")), body.path_node(&p("d3.gi")));
        assert_eq!(body.path_node(&p("d3.go")), body.path_node(&p("m.go")));
        assert!(!body.has_path(&p("d2.gi")));
    }

    #[test]
    fn template_fills_mother() {
        let g = compile_grammar(&pack("rule s: S --> NP VP[agr=?A] ; sem: p($1, $2, X)", "")).unwrap();
        let body = &g.rule(0).body;
        let a1 = Symbol::lit("a1");
        assert_eq!(body.path_node(&[MOTHER_ATTR, SEM_ATTR, a1]), body.path_node(&[daughter_attr(0), SEM_ATTR]));
        assert_eq!(body.atom_at(&[MOTHER_ATTR, SEM_ATTR, sem::ATTR_FUNCTOR]), Some(Symbol::lit("p/3")));
    }

    #[test]
    fn macros_expand() {
        let lex = "macro noun(%S, %G) = lex %S: N[agr=[gen=%G]] ; sem: %S | lex %Ss: N\nnoun(vol, masc)";
        let g = compile_grammar(&pack("", lex));
        let e = g.unwrap_err();
        assert!(e.msg.contains("gen"), "{}", e);
        let lex = "macro noun(%S) = lex %S: N ; sem: %S | lex %Ss: N ; sem: %S\nnoun(vol)";
        let g = compile_grammar(&pack("", lex)).unwrap();
        assert_eq!(g.entries().len(), 2);
        assert_eq!(g.entries()[1].form, "vols");
        assert!(g.expand_macro("nope", &[]).is_err());
        assert!(g.expand_macro("noun", &["a", "b"]).is_err());
        assert_eq!(split_top("a, p(x, y), [b=c, d=e]"), vec!["a", "p(x, y)", "[b=c, d=e]"]);
    }

    #[test]
    fn lexical_items_get_thread_defaults() {
        let g = compile_grammar(&pack("", "lex jean: NP ; sem: jean\nlex le: Det")).unwrap();
        let hits = g.lexical_lookup(&LexToken::word("jean"));
        assert_eq!(hits.len(), 1);
        let fs = &hits[0].features;
        assert_eq!(fs.child(fs.root(), Symbol::lit("gi")), fs.child(fs.root(), Symbol::lit("go")));
        assert!(fs.child(fs.root(), Symbol::lit("gi")).is_some());
        let d = g.lexical_lookup(&LexToken::word("le"));
        assert!(d[0].features.child(d[0].features.root(), Symbol::lit("gi")).is_none());
    }

    #[test]
    fn pretty_printed_rules_recompile() {
        let src = "rule s: S --> NP[agr=?A] VP[agr=?A] ; sem: p($1, $2)\nrule np: NP --> Det N";
        let g = compile_grammar(&pack(src, "")).unwrap();
        let text = g.rules_text();
        let g2 = compile_grammar(&pack(&text, "")).unwrap();
        for (a, b) in g.rules().iter().zip(g2.rules()) {
            assert_eq!(a.id, b.id);
            assert!(a.body.equal_mod_renaming(&b.body), "{}\n{}", a.to_text(), b.to_text());
        }
    }
}
