//! Text formats for spelling/sandhi rule files and morphotax files.
//!
//! Both are line based. `//` starts a comment; a line that begins with
//! whitespace continues the previous one.
//!
//! Spelling rules:
//!
//! ```text
//! pairs    a:l u:l +:t          feasible non-identity pairs
//! default  +:0                  pairs allowed anywhere without a rule
//! boundary +                    symbols with no identity pair
//! set C  = b c d f g ...
//! rule NAME [optional] LEX:SURF OP LEFT _ RIGHT [where FS]
//! contract de le = du           sandhi files only
//! ```
//!
//! `OP` is `=>`, `<=` or `<=>`. Contexts are sequences of pair patterns
//! (`x:y`, `x` for any surface, `:y` for any lexical, `?` for any pair,
//! set names, `~x` for complement), groups `( .. | .. )`, postfix `*` and
//! `?`, and the anchors `<` (string start) and `>` (string end). `0` is
//! the null symbol.
//!
//! Morphotax:
//!
//! ```text
//! affix +e: Vafx[tense=pres, agr=[per={1,3}, num=sg], muet=y]
//! prod  verb_infl: V[agr=?A] --> Vstem[] Vafx[agr=?A]
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::featstruct::FeatureStructure;
use crate::fstext::{FsBuilder, Reader};
use crate::symbol::Symbol;
use crate::twolevel::{
    daughter_attr, Alphabet, Context, MorphemeEntry, Operator, PairPattern, ProductionRule, SpellingRule, SymClass,
    SymbolPair, EPSILON, MOTHER_ATTR,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct RuleFileError {
    pub line: usize,
    pub msg: String,
}

/// Join continuation lines and drop comments; yields (line number, text).
pub fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let continues = line.starts_with(|c: char| c.is_whitespace());
        match out.last_mut() {
            Some((_, prev)) if continues => {
                prev.push(' ');
                prev.push_str(line.trim());
            }
            _ => out.push((i + 1, line.trim().to_string())),
        }
    }
    out
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '/' && prev_ws && line[i..].starts_with("//") {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

/// Contraction of two adjacent tokens into one surface word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub first: String,
    pub second: String,
    pub surface: String,
}

#[derive(Clone, Debug, Default)]
pub struct SpellingFile {
    pub rules: Vec<SpellingRule>,
    pub alphabet: Alphabet,
    pub contractions: Vec<Contraction>,
}

fn symbol(tok: &str, line: usize) -> Result<Symbol, RuleFileError> {
    if tok == "0" {
        return Ok(EPSILON);
    }
    Symbol::new(tok).map_err(|e| RuleFileError { line, msg: e.to_string() })
}

fn concrete_pair(tok: &str, line: usize) -> Result<SymbolPair, RuleFileError> {
    let Some((l, s)) = tok.split_once(':').filter(|(l, s)| !l.is_empty() && !s.is_empty()) else {
        return Err(RuleFileError { line, msg: format!("expected a pair `x:y`, found `{}`", tok) });
    };
    let p = SymbolPair::new(symbol(l, line)?, symbol(s, line)?);
    if p.lexical == EPSILON && p.surface == EPSILON {
        return Err(RuleFileError { line, msg: "pair `0:0` is not allowed".into() });
    }
    Ok(p)
}

struct ContextParser<'a> {
    toks: Vec<String>,
    pos: usize,
    sets: &'a BTreeMap<String, Vec<Symbol>>,
    line: usize,
}

fn context_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut cur = String::new();
        let mut chars = word.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '(' | '|' => {
                    if !cur.is_empty() {
                        out.push(core::mem::take(&mut cur));
                    }
                    out.push(c.to_string());
                }
                ')' => {
                    if !cur.is_empty() {
                        out.push(core::mem::take(&mut cur));
                    }
                    let mut t = String::from(")");
                    while let Some(&p) = chars.peek() {
                        if p == '*' || p == '?' {
                            t.push(p);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push(t);
                }
                _ => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

impl ContextParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, RuleFileError> {
        Err(RuleFileError { line: self.line, msg: msg.into() })
    }

    fn alt(&mut self) -> Result<Context, RuleFileError> {
        let mut branches = alloc::vec![self.seq()?];
        while self.toks.get(self.pos).map(|s| s.as_str()) == Some("|") {
            self.pos += 1;
            branches.push(self.seq()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Context::Alt(branches) })
    }

    fn seq(&mut self) -> Result<Context, RuleFileError> {
        let mut items = Vec::new();
        while let Some(t) = self.toks.get(self.pos).cloned() {
            if t == "|" || t.starts_with(')') {
                break;
            }
            self.pos += 1;
            let item = match t.as_str() {
                "(" => {
                    let inner = self.alt()?;
                    let Some(close) = self.toks.get(self.pos).cloned().filter(|c| c.starts_with(')')) else {
                        return self.err("unclosed `(` in context");
                    };
                    self.pos += 1;
                    postfix(inner, &close[1..])
                }
                "<" => Context::Start,
                ">" => Context::End,
                _ => {
                    let (body, post) = split_postfix(&t);
                    postfix(Context::Pair(self.pattern(body)?), post)
                }
            };
            items.push(item);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Context::Seq(items) })
    }

    fn class(&self, side: &str) -> Result<SymClass, RuleFileError> {
        if side.is_empty() || side == "?" {
            return Ok(SymClass::Any);
        }
        if let Some(rest) = side.strip_prefix('~') {
            return Ok(match self.class(rest)? {
                SymClass::One(s) => SymClass::NoneOf(alloc::vec![s]),
                SymClass::OneOf(v) => SymClass::NoneOf(v),
                _ => return self.err(format!("cannot complement `{}`", rest)),
            });
        }
        if let Some(v) = self.sets.get(side) {
            return Ok(SymClass::OneOf(v.clone()));
        }
        Ok(SymClass::One(symbol(side, self.line)?))
    }

    fn pattern(&self, tok: &str) -> Result<PairPattern, RuleFileError> {
        match tok.split_once(':') {
            Some((l, s)) => Ok(PairPattern { lexical: self.class(l)?, surface: self.class(s)? }),
            None => Ok(PairPattern { lexical: self.class(tok)?, surface: SymClass::Any }),
        }
    }
}

fn split_postfix(t: &str) -> (&str, &str) {
    let bytes = t.as_bytes();
    let mut end = t.len();
    while end > 1 {
        let c = bytes[end - 1];
        let before = bytes[end - 2];
        if c == b'*' || (c == b'?' && before != b':') {
            end -= 1;
        } else {
            break;
        }
    }
    (&t[..end], &t[end..])
}

fn postfix(mut c: Context, ops: &str) -> Context {
    for op in ops.chars() {
        c = match op {
            '*' => Context::Star(alloc::boxed::Box::new(c)),
            _ => Context::Opt(alloc::boxed::Box::new(c)),
        };
    }
    c
}

pub fn read_spelling_file(text: &str) -> Result<SpellingFile, RuleFileError> {
    let mut file = SpellingFile::default();
    let mut sets: BTreeMap<String, Vec<Symbol>> = BTreeMap::new();
    for (line, l) in logical_lines(text) {
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l.as_str(), ""));
        let rest = rest.trim();
        match head {
            "pairs" | "default" => {
                for tok in rest.split_whitespace() {
                    let p = concrete_pair(tok, line)?;
                    if head == "pairs" {
                        file.alphabet.pairs.insert(p);
                    } else {
                        file.alphabet.defaults.insert(p);
                    }
                }
            }
            "boundary" => {
                for tok in rest.split_whitespace() {
                    file.alphabet.boundaries.insert(symbol(tok, line)?);
                }
            }
            "set" => {
                let Some((name, members)) = rest.split_once('=') else {
                    return Err(RuleFileError { line, msg: "expected `set NAME = symbols`".into() });
                };
                let mut v = Vec::new();
                for tok in members.split_whitespace() {
                    match sets.get(tok) {
                        Some(inner) => v.extend(inner.iter().copied()),
                        None => v.push(symbol(tok, line)?),
                    }
                }
                sets.insert(name.trim().to_string(), v);
            }
            "contract" => {
                let Some((lhs, rhs)) = rest.split_once('=') else {
                    return Err(RuleFileError { line, msg: "expected `contract A B = C`".into() });
                };
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                if parts.len() != 2 || rhs.trim().is_empty() {
                    return Err(RuleFileError { line, msg: "expected `contract A B = C`".into() });
                }
                file.contractions.push(Contraction {
                    first: parts[0].to_string(),
                    second: parts[1].to_string(),
                    surface: rhs.trim().to_string(),
                });
            }
            "rule" => file.rules.push(read_rule(rest, line, &sets)?),
            _ => return Err(RuleFileError { line, msg: format!("unknown directive `{}`", head) }),
        }
    }
    Ok(file)
}

fn read_rule(text: &str, line: usize, sets: &BTreeMap<String, Vec<Symbol>>) -> Result<SpellingRule, RuleFileError> {
    let err = |msg: String| RuleFileError { line, msg };
    let (body, constraint) = match text.find(" where ") {
        Some(i) => (&text[..i], Some(text[i + 7..].trim())),
        None => (text, None),
    };
    let mut words = body.split_whitespace();
    let name = words.next().ok_or_else(|| err("rule needs a name".into()))?.to_string();
    let mut next = words.next().ok_or_else(|| err(format!("rule `{}` needs a pair", name)))?;
    let optional = next == "optional";
    if optional {
        next = words.next().ok_or_else(|| err(format!("rule `{}` needs a pair", name)))?;
    }
    let focus = concrete_pair(next, line)?;
    let operator = match words.next() {
        Some("=>") => Operator::ContextRestriction,
        Some("<=") => Operator::SurfaceCoercion,
        Some("<=>") => Operator::Composite,
        other => return Err(err(format!("rule `{}`: expected `=>`, `<=` or `<=>`, found {:?}", name, other))),
    };
    let rest: Vec<&str> = words.collect();
    let Some(us) = rest.iter().position(|w| *w == "_") else {
        return Err(err(format!("rule `{}`: context needs `_`", name)));
    };
    let parse_ctx = |ws: &[&str]| -> Result<Context, RuleFileError> {
        let mut p = ContextParser { toks: context_tokens(&ws.join(" ")), pos: 0, sets, line };
        let c = p.alt()?;
        if p.pos != p.toks.len() {
            return p.err(format!("rule `{}`: unbalanced `)` in context", name));
        }
        Ok(c)
    };
    let left = parse_ctx(&rest[..us])?;
    let right = parse_ctx(&rest[us + 1..])?;
    let constraint = match constraint {
        Some(fs) => FeatureStructure::read(fs).map_err(|e| err(format!("rule `{}`: {}", name, e)))?,
        None => FeatureStructure::empty(),
    };
    Ok(SpellingRule { name, focus, operator, left, right, optional, constraint })
}

#[derive(Clone, Debug, Default)]
pub struct MorphotaxFile {
    pub affixes: Vec<MorphemeEntry>,
    pub productions: Vec<ProductionRule>,
}

pub fn read_morphotax_file(text: &str) -> Result<MorphotaxFile, RuleFileError> {
    let mut file = MorphotaxFile::default();
    for (line, l) in logical_lines(text) {
        let err = |msg: String| RuleFileError { line, msg };
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l.as_str(), ""));
        let Some((name, body)) = rest.split_once(": ") else {
            return Err(err(format!("expected `{} NAME: ...`", head)));
        };
        let name = name.trim();
        match head {
            "affix" => {
                if !name.starts_with('+') {
                    return Err(err(format!("affix `{}` must start with `+`", name)));
                }
                let (category, features) = read_category(body).map_err(&err)?;
                file.affixes.push(MorphemeEntry { form: name.to_string(), category, features });
            }
            "prod" => {
                let p = read_production(name, body).map_err(|m| err(format!("production `{}`: {}", name, m)))?;
                file.productions.push(p);
            }
            _ => return Err(err(format!("unknown directive `{}`", head))),
        }
    }
    Ok(file)
}

/// `Cat[FS]` on its own.
pub fn read_category(text: &str) -> Result<(Symbol, FeatureStructure), String> {
    let mut b = FsBuilder::new();
    let mut r = Reader::new(text, &mut b);
    let (cat, node) = r.category().map_err(|e| e.to_string())?;
    if !r.at_end() {
        return Err(format!("trailing input `{}`", r.rest()));
    }
    let fs = b.finish(node).ok_or("cyclic structure")?;
    Ok((cat, fs))
}

fn read_production(name: &str, text: &str) -> Result<ProductionRule, String> {
    let mut b = FsBuilder::new();
    let mut r = Reader::new(text, &mut b);
    let (mother, mnode) = r.category().map_err(|e| e.to_string())?;
    if !r.eat_str("-->") {
        return Err("expected `-->`".into());
    }
    let mut daughters = Vec::new();
    let mut nodes = Vec::new();
    while !r.at_end() {
        let (c, n) = r.category().map_err(|e| e.to_string())?;
        daughters.push(c);
        nodes.push(n);
    }
    if daughters.is_empty() {
        return Err("needs at least a stem daughter".into());
    }
    let root = b.empty_map();
    b.put(root, &[MOTHER_ATTR], mnode);
    for (i, n) in nodes.into_iter().enumerate() {
        b.put(root, &[daughter_attr(i)], n);
    }
    let body = b.finish(root).ok_or("cyclic structure")?;
    Ok(ProductionRule { name: name.to_string(), mother, daughters, body })
}
