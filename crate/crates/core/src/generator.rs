//! Generation from a semantic term through the same grammar.
//!
//! Top-down expansion from the start category with the goal term in its
//! result attribute. Daughters are expanded in an order chosen per rule
//! instance: those whose `sem` is already bound first, so semantics flows
//! from the goal into every subgoal. Results are memoized on (category,
//! goal structure, remaining depth). Only lexical items whose functors all
//! occur in the goal or in some rule body are considered. Every candidate string is parsed back
//! and kept only if one of its analyses has the goal semantics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::featstruct::{FeatureStructure, Node};
use crate::grammar::{CompiledGrammar, GrammarRule, SEM_ATTR};
use crate::parser::{parse, ParseError, ParseOptions};
use crate::sandhi::{strip_punctuation, LexToken};
use crate::sem::{terms_closed, SemTerm, ATTR_FUNCTOR};
use crate::symbol::Symbol;
use crate::twolevel::{daughter_attr, MOTHER_ATTR};

pub const DEFAULT_MAX_DEPTH: usize = 12;
pub const DEFAULT_MAX_STEPS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    /// Rule applications on any root-to-leaf path.
    pub max_depth: usize,
    /// Subgoal expansions per call.
    pub max_steps: usize,
    pub parse: ParseOptions,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_depth: DEFAULT_MAX_DEPTH, max_steps: DEFAULT_MAX_STEPS, parse: ParseOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("generation exceeded the step limit of {0}")]
    StepLimit(usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

type Out = (FeatureStructure, Vec<LexToken>);

struct Gen<'g> {
    g: &'g CompiledGrammar,
    lex: BTreeMap<Symbol, Vec<(FeatureStructure, LexToken)>>,
    /// (category, goal) -> (depth computed at, results).
    memo: BTreeMap<(Symbol, String), (usize, Vec<Out>)>,
    steps: usize,
    max_steps: usize,
}

/// Functor names anywhere in a structure.
fn fs_functors(fs: &FeatureStructure) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    for id in 0..fs.node_count() as u32 {
        if let Node::Map(m) = fs.node(id) {
            for (k, v) in m {
                if *k == ATTR_FUNCTOR {
                    if let Node::Atoms(a) = fs.node(*v) {
                        for f in a {
                            let name = f.as_str().rsplit_once('/').map(|(n, _)| n).unwrap_or(f.as_str());
                            if let Ok(s) = Symbol::new(name) {
                                out.insert(s);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

impl<'g> Gen<'g> {
    fn new(g: &'g CompiledGrammar, goal: &SemTerm, max_steps: usize) -> Self {
        // Constants a rule or an inflection supplies itself (expletives,
        // understood subjects) may come from lexical items too.
        let mut allowed = goal.functors();
        for r in g.rules() {
            allowed.extend(fs_functors(&r.body));
        }
        if let Some(m) = g.morphology() {
            for a in m.affixes() {
                allowed.extend(fs_functors(&a.features));
            }
        }
        let mut lex: BTreeMap<Symbol, Vec<(FeatureStructure, LexToken)>> = BTreeMap::new();
        for (e, item) in g.full_forms() {
            if fs_functors(&item.features).is_subset(&allowed) {
                lex.entry(item.category).or_default().push((item.features, e.token()));
            }
        }
        for (i, s) in g.stems().entries().iter().enumerate() {
            if !fs_functors(&s.features).is_subset(&allowed) {
                continue;
            }
            for (surfaces, item) in g.word_forms(i) {
                for surf in surfaces {
                    lex.entry(item.category).or_default().push((item.features.clone(), LexToken::word(&surf)));
                }
            }
        }
        Gen { g, lex, memo: BTreeMap::new(), steps: 0, max_steps }
    }

    fn gen(&mut self, cat: Symbol, goal: &FeatureStructure, depth: usize) -> Result<Vec<Out>, GenError> {
        let key = (cat, goal.canonical());
        if let Some((d, v)) = self.memo.get(&key) {
            if *d >= depth {
                return Ok(v.clone());
            }
        }
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(GenError::StepLimit(self.max_steps));
        }
        self.memo.insert(key.clone(), (depth, Vec::new()));
        let mut out: Vec<Out> = Vec::new();
        if let Some(items) = self.lex.get(&cat) {
            for (fs, tok) in items {
                if let Some(u) = goal.unify(fs).filter(terms_closed) {
                    out.push((u, vec![tok.clone()]));
                }
            }
        }
        let g = self.g;
        for &r in g.rules_with_mother(cat) {
            let rule = g.rule(r);
            if !rule.is_empty() && depth == 0 {
                continue;
            }
            let Some(inst) = rule.body.unify_at(&[MOTHER_ATTR], goal).filter(terms_closed) else { continue };
            let sub = if rule.is_empty() { depth } else { depth - 1 };
            let toks = vec![None; rule.daughters.len()];
            self.expand(rule, inst, toks, sub, &mut out)?;
        }
        let mut seen = BTreeSet::new();
        out.retain(|(fs, t)| seen.insert((fs.canonical(), t.clone())));
        self.memo.insert(key, (depth, out.clone()));
        Ok(out)
    }

    fn expand(
        &mut self,
        rule: &GrammarRule,
        inst: FeatureStructure,
        toks: Vec<Option<Vec<LexToken>>>,
        depth: usize,
        out: &mut Vec<Out>,
    ) -> Result<(), GenError> {
        let Some(k) = next_daughter(&inst, &toks) else {
            if let Some(m) = inst.get(&[MOTHER_ATTR]) {
                out.push((m, toks.into_iter().flatten().flatten().collect()));
            }
            return Ok(());
        };
        let d = daughter_attr(k);
        let Some(goal) = inst.get(&[d]) else { return Ok(()) };
        for (res, t) in self.gen(rule.daughters[k], &goal, depth)? {
            if let Some(next) = inst.unify_at(&[d], &res).filter(terms_closed) {
                let mut toks2 = toks.clone();
                toks2[k] = Some(t);
                self.expand(rule, next, toks2, depth, out)?;
            }
        }
        Ok(())
    }
}

/// Leftmost pending daughter with bound semantics, else the leftmost.
fn next_daughter(inst: &FeatureStructure, toks: &[Option<Vec<LexToken>>]) -> Option<usize> {
    let pending: Vec<usize> = (0..toks.len()).filter(|&k| toks[k].is_none()).collect();
    let bound = |k: usize| match inst.path_node(&[daughter_attr(k), SEM_ATTR]) {
        Some(n) => !matches!(inst.node(n), Node::Any),
        None => false,
    };
    pending.iter().copied().find(|&k| bound(k)).or_else(|| pending.first().copied())
}

/// Token sequences whose derivation carries the goal semantics, before
/// the parse-back filter.
pub fn generate_tokens(sem: &SemTerm, g: &CompiledGrammar, opts: GenOptions) -> Result<Vec<Vec<LexToken>>, GenError> {
    let mut gen = Gen::new(g, sem, opts.max_steps);
    let target = sem.to_fs();
    let result = g.inventory.result_attr();
    let mut out = BTreeSet::new();
    for (cat, start) in &g.inventory.start {
        let Some(goal) = start.unify_at(&[result], &target) else { continue };
        for (_, toks) in gen.gen(*cat, &goal, opts.max_depth)? {
            out.insert(toks);
        }
    }
    Ok(out.into_iter().collect())
}

fn capitalize(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

pub fn render(tokens: &[LexToken], g: &CompiledGrammar) -> String {
    let text = match g.sandhi() {
        Some(s) => s.render_surface(tokens),
        None => tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" "),
    };
    capitalize(&text)
}

/// Sorted, deduplicated sentences for `sem`.
pub fn generate(sem: &SemTerm, g: &CompiledGrammar, opts: GenOptions) -> Result<Vec<String>, GenError> {
    let mut out = BTreeSet::new();
    for toks in generate_tokens(sem, g, opts)? {
        let s = render(&toks, g);
        if out.contains(&s) {
            continue;
        }
        let back = parse(&s, g, opts.parse)?;
        if back.iter().any(|a| a.sem.equal_mod_renaming(sem)) {
            out.insert(s);
        }
    }
    Ok(out.into_iter().collect())
}

/// True iff `text` is among the sentences generated from one of its own
/// readings. `None` when the text does not parse.
pub fn roundtrip_check(text: &str, g: &CompiledGrammar, opts: GenOptions) -> Result<Option<bool>, GenError> {
    let analyses = parse(text, g, opts.parse)?;
    if analyses.is_empty() {
        return Ok(None);
    }
    let (body, _) = strip_punctuation(text);
    let want = capitalize(&body);
    for a in &analyses {
        if generate(&a.sem, g, opts)?.contains(&want) {
            return Ok(Some(true));
        }
    }
    Ok(Some(false))
}
