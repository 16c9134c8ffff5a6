//! Textual syntax for feature structures and semantic terms.
//!
//! ```text
//! value := '?' NAME [':' value]          shared node (reentrancy)
//!        | '[' [path '=' value {',' path '=' value}] ']'
//!        | '{' ATOM {',' ATOM} '}'        disjunctive atom
//!        | ATOM
//!        | '<' term '>'                   semantic term (when enabled)
//! path  := NAME {'.' NAME}
//! term  := '?' NAME [':' value] | '$' DIGITS | '@' | UPPER_NAME
//!        | NAME ['(' term {',' term} ')']
//! ```
//!
//! `?_` is an anonymous fresh node. In terms, an upper-case name is a
//! logical variable and shares its node with the FS variable of the same
//! name; `$n` is the semantics of daughter `n` in a grammar rule.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::featstruct::{Arena, FeatureStructure, FsSyntaxError, Node, NodeId};
use crate::sem;
use crate::symbol::Symbol;

/// Accumulates nodes and named variables for one variable scope.
#[derive(Debug, Default, Clone)]
pub struct FsBuilder {
    pub arena: Arena,
    vars: BTreeMap<String, NodeId>,
}

impl FsBuilder {
    pub fn new() -> Self {
        FsBuilder::default()
    }

    pub fn any(&mut self) -> NodeId {
        self.arena.any()
    }

    pub fn var(&mut self, name: &str) -> NodeId {
        if name == "_" {
            return self.arena.any();
        }
        if let Some(&n) = self.vars.get(name) {
            return n;
        }
        let n = self.arena.any();
        self.vars.insert(name.to_string(), n);
        n
    }

    pub fn has_var(&self, name: &str) -> bool {
        self.vars.contains_key(name)
    }

    pub fn var_names(&self) -> impl Iterator<Item = &str> {
        self.vars.keys().map(|s| s.as_str())
    }

    pub fn atoms(&mut self, mut values: Vec<Symbol>) -> NodeId {
        values.sort();
        values.dedup();
        self.arena.push(Node::Atoms(values))
    }

    pub fn atom(&mut self, a: Symbol) -> NodeId {
        self.arena.push(Node::Atoms(alloc::vec![a]))
    }

    pub fn empty_map(&mut self) -> NodeId {
        self.arena.push(Node::Map(Vec::new()))
    }

    /// Unify `value` into `node` at `path`, creating intermediate maps.
    pub fn put(&mut self, node: NodeId, path: &[Symbol], value: NodeId) -> bool {
        let mut cur = node;
        for a in path {
            match self.arena.child(cur, *a, true) {
                Some(c) => cur = c,
                None => return false,
            }
        }
        self.arena.unify(cur, value)
    }

    pub fn unify(&mut self, a: NodeId, b: NodeId) -> bool {
        self.arena.unify(a, b)
    }

    pub fn import(&mut self, fs: &FeatureStructure) -> NodeId {
        self.arena.import_root(fs)
    }

    /// Encoded application node `functor(args..)`.
    pub fn app(&mut self, functor: &str, args: &[NodeId]) -> Result<NodeId, String> {
        let f = Symbol::new(&format!("{}/{}", functor, args.len())).map_err(|e| e.to_string())?;
        let n = self.empty_map();
        let fnode = self.atom(f);
        self.put(n, &[sem::ATTR_FUNCTOR], fnode);
        for (i, a) in args.iter().enumerate() {
            let attr = sem::arg_attr(i);
            if !self.put(n, &[attr], *a) {
                return Err("argument clash".into());
            }
        }
        Ok(n)
    }

    /// Logical variable node, shared with FS variable `?name` when named.
    pub fn logical_var(&mut self, name: Option<&str>) -> NodeId {
        let n = match name {
            Some(nm) => self.var(nm),
            None => self.arena.any(),
        };
        let marker = self.atom(sem::VAR_MARK);
        self.put(n, &[sem::ATTR_VAR], marker);
        n
    }

    pub fn finish(&mut self, root: NodeId) -> Option<FeatureStructure> {
        self.arena.compact(root, None)
    }
}

pub struct Reader<'t, 'b> {
    text: &'t str,
    pos: usize,
    pub builder: &'b mut FsBuilder,
    pub allow_terms: bool,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '/' | '+' | '*')
}

impl<'t, 'b> Reader<'t, 'b> {
    pub fn new(text: &'t str, builder: &'b mut FsBuilder) -> Self {
        Reader { text, pos: 0, builder, allow_terms: true }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'t str {
        &self.text[self.pos..]
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T, FsSyntaxError> {
        Err(FsSyntaxError { pos: self.pos, msg: msg.into() })
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), FsSyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c))
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn name(&mut self) -> Result<&'t str, FsSyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw() {
            if is_name_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(&self.text[start..self.pos])
    }

    pub fn symbol(&mut self) -> Result<Symbol, FsSyntaxError> {
        let start = self.pos;
        let n = self.name()?;
        Symbol::new(n).map_err(|e| FsSyntaxError { pos: start, msg: e.to_string() })
    }

    pub fn value(&mut self) -> Result<NodeId, FsSyntaxError> {
        match self.peek() {
            Some('?') => {
                self.pos += 1;
                let name = self.name()?;
                let n = self.builder.var(name);
                if self.eat(':') {
                    let v = self.value()?;
                    if !self.builder.unify(n, v) {
                        return self.err(format!("inconsistent values for ?{}", name));
                    }
                }
                Ok(n)
            }
            Some('[') => {
                self.pos += 1;
                self.map_body()
            }
            Some('{') => {
                self.pos += 1;
                let mut vals = Vec::new();
                loop {
                    if self.peek() == Some('[') || self.peek() == Some('<') {
                        return self.err("disjunction is only allowed over atoms");
                    }
                    vals.push(self.symbol()?);
                    if self.eat('}') {
                        break;
                    }
                    self.expect(',')?;
                }
                Ok(self.builder.atoms(vals))
            }
            Some('<') if self.allow_terms => {
                self.pos += 1;
                let t = self.term()?;
                self.expect('>')?;
                Ok(t)
            }
            Some(_) => {
                let s = self.symbol()?;
                Ok(self.builder.atom(s))
            }
            None => self.err("unexpected end of input"),
        }
    }

    /// Body of `[...]` after the opening bracket.
    pub fn map_body(&mut self) -> Result<NodeId, FsSyntaxError> {
        let node = self.builder.empty_map();
        if self.eat(']') {
            return Ok(node);
        }
        loop {
            let mut path = alloc::vec![self.symbol()?];
            while self.eat('.') {
                path.push(self.symbol()?);
            }
            self.expect('=')?;
            let start = self.pos;
            let v = self.value()?;
            if !self.builder.put(node, &path, v) {
                return Err(FsSyntaxError {
                    pos: start,
                    msg: format!("inconsistent values for `{}`", path[0]),
                });
            }
            if self.eat(']') {
                return Ok(node);
            }
            self.expect(',')?;
        }
    }

    /// `NAME`, `NAME[...]`, `NAME?X` or `NAME?X:[...]`: a category symbol
    /// and its feature node.
    pub fn category(&mut self) -> Result<(Symbol, NodeId), FsSyntaxError> {
        let cat = self.symbol()?;
        let node = match self.peek_raw() {
            Some('[') => {
                self.pos += 1;
                self.map_body()?
            }
            Some('?') => {
                let n = self.value()?;
                let m = self.builder.empty_map();
                if !self.builder.unify(n, m) {
                    return self.err("category features must be a map");
                }
                n
            }
            _ => self.builder.empty_map(),
        };
        Ok((cat, node))
    }

    pub fn term(&mut self) -> Result<NodeId, FsSyntaxError> {
        match self.peek() {
            Some('?') => self.value(),
            Some('$') => {
                self.pos += 1;
                let n = self.name()?;
                if !n.chars().all(|c| c.is_ascii_digit()) {
                    return self.err("daughter reference must be `$` followed by digits");
                }
                Ok(self.builder.var(&format!("${}", n)))
            }
            Some('@') => {
                self.pos += 1;
                Ok(self.builder.logical_var(None))
            }
            Some(c) if c.is_uppercase() => {
                let n = self.name()?;
                Ok(self.builder.logical_var(Some(n)))
            }
            Some(_) => {
                let start = self.pos;
                let f = self.name()?;
                let mut args = Vec::new();
                if self.eat('(') && !self.eat(')') {
                    loop {
                        args.push(self.term()?);
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                self.builder
                    .app(f, &args)
                    .map_err(|msg| FsSyntaxError { pos: start, msg })
            }
            None => self.err("unexpected end of input in term"),
        }
    }
}

pub fn read_fs(text: &str) -> Result<FeatureStructure, FsSyntaxError> {
    let mut b = FsBuilder::new();
    let mut r = Reader::new(text, &mut b);
    r.allow_terms = false;
    let root = r.value()?;
    if !r.at_end() {
        return r.err("trailing input");
    }
    let pos = r.pos();
    b.finish(root).ok_or(FsSyntaxError { pos, msg: "cyclic structure".into() })
}
