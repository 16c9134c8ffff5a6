//! Semantic terms: a compact predicate-argument language with question and
//! mood wrappers, encoded inside feature structures so that rules compose
//! meaning by unification alone.
//!
//! `aimer(jean, marie)` is stored as `[f=aimer/2, a1=[f=jean/0], a2=[f=marie/0]]`.
//! A logical variable is a node carrying `v=var`; every occurrence of the
//! variable is the same node.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::featstruct::{FeatureStructure, FsSyntaxError, Node, NodeId};
use crate::fstext::{FsBuilder, Reader};
use crate::symbol::Symbol;

pub const ATTR_FUNCTOR: Symbol = Symbol::lit("f");
pub const ATTR_VAR: Symbol = Symbol::lit("v");
pub const VAR_MARK: Symbol = Symbol::lit("var");

pub fn arg_attr(i: usize) -> Symbol {
    Symbol::lit(&format!("a{}", i + 1))
}

/// Position of an argument attribute: `a3` -> 3.
fn arg_position(a: Symbol) -> Option<usize> {
    let s = a.as_str();
    let digits = s.strip_prefix('a')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Open maps would let `[a1=?S, a2=?O]` extend a one-place term. False if
/// any term node has an argument beyond its functor's arity, or is both a
/// variable and an application.
pub fn terms_closed(fs: &FeatureStructure) -> bool {
    for id in 0..fs.node_count() as NodeId {
        let Node::Map(m) = fs.node(id) else { continue };
        let Some((_, f)) = m.iter().find(|(k, _)| *k == ATTR_FUNCTOR) else { continue };
        if m.iter().any(|(k, _)| *k == ATTR_VAR) {
            return false;
        }
        let Node::Atoms(names) = fs.node(*f) else { continue };
        let [name] = names.as_slice() else { continue };
        let Some(arity) = name.as_str().rsplit_once('/').and_then(|(_, n)| n.parse::<usize>().ok()) else { continue };
        if m.iter().any(|(k, _)| arg_position(*k).is_some_and(|p| p == 0 || p > arity)) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemTerm {
    Var(String),
    App(Symbol, Vec<SemTerm>),
}

impl SemTerm {
    pub fn atom(name: &str) -> SemTerm {
        SemTerm::App(Symbol::lit(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<SemTerm>) -> SemTerm {
        SemTerm::App(Symbol::lit(name), args)
    }

    pub fn parse(text: &str) -> Result<SemTerm, FsSyntaxError> {
        let mut b = FsBuilder::new();
        let mut r = Reader::new(text, &mut b);
        let root = r.term()?;
        if !r.at_end() {
            return r.err("trailing input after term");
        }
        let pos = r.pos();
        if b.var_names().any(|n| n.starts_with('$')) {
            return Err(FsSyntaxError { pos: 0, msg: "daughter references are only valid in rules".into() });
        }
        let fs = b.finish(root).ok_or(FsSyntaxError { pos, msg: "cyclic term".into() })?;
        SemTerm::from_fs(&fs).ok_or(FsSyntaxError { pos: 0, msg: "not a term".into() })
    }

    /// Encode as a feature structure; equal variable names share a node.
    pub fn to_fs(&self) -> FeatureStructure {
        let mut b = FsBuilder::new();
        let root = self.build(&mut b);
        b.finish(root).expect("terms are acyclic")
    }

    pub fn build(&self, b: &mut FsBuilder) -> NodeId {
        match self {
            SemTerm::Var(v) => b.logical_var(Some(&format!("@{}", v))),
            SemTerm::App(f, args) => {
                let ids: Vec<NodeId> = args.iter().map(|a| a.build(b)).collect();
                b.app(f.as_str(), &ids).expect("functor fits a symbol")
            }
        }
    }

    pub fn from_fs(fs: &FeatureStructure) -> Option<SemTerm> {
        Self::from_fs_node(fs, fs.root())
    }

    pub fn from_fs_node(fs: &FeatureStructure, node: NodeId) -> Option<SemTerm> {
        let mut d = Decoder { names: BTreeMap::new(), fresh: 0 };
        d.decode(fs, node, 0)
    }

    /// Functor names occurring anywhere in the term.
    pub fn functors(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_functors(&mut out);
        out
    }

    fn collect_functors(&self, out: &mut BTreeSet<Symbol>) {
        if let SemTerm::App(f, args) = self {
            out.insert(*f);
            for a in args {
                a.collect_functors(out);
            }
        }
    }

    /// Rename variables to `X1, X2, ...` in order of first occurrence.
    pub fn canonical(&self) -> SemTerm {
        let mut names = BTreeMap::new();
        self.rename(&mut names)
    }

    fn rename(&self, names: &mut BTreeMap<String, String>) -> SemTerm {
        match self {
            SemTerm::Var(v) => {
                let n = names.len() + 1;
                SemTerm::Var(names.entry(v.clone()).or_insert_with(|| format!("X{}", n)).clone())
            }
            SemTerm::App(f, args) => SemTerm::App(*f, args.iter().map(|a| a.rename(names)).collect()),
        }
    }

    pub fn equal_mod_renaming(&self, other: &SemTerm) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            SemTerm::Var(v) => {
                out.insert(v.clone());
            }
            SemTerm::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Outer mood/question wrapper, e.g. `ynq`.
    pub fn wrapper(&self) -> Option<&str> {
        match self {
            SemTerm::App(f, _) => Some(f.as_str()),
            SemTerm::Var(_) => None,
        }
    }

    /// Structural check: every `whq(V, Body)` binds a variable that occurs
    /// in its body.
    pub fn well_formed(&self) -> bool {
        match self {
            SemTerm::Var(_) => true,
            SemTerm::App(f, args) => {
                if f.as_str() == "whq" {
                    match args.as_slice() {
                        [SemTerm::Var(v), body] => body.vars().contains(v) && body.well_formed(),
                        _ => false,
                    }
                } else {
                    args.iter().all(|a| a.well_formed())
                }
            }
        }
    }
}

struct Decoder {
    names: BTreeMap<NodeId, String>,
    fresh: usize,
}

impl Decoder {
    fn name(&mut self, node: NodeId, prefix: &str) -> String {
        if let Some(n) = self.names.get(&node) {
            return n.clone();
        }
        self.fresh += 1;
        let n = format!("{}{}", prefix, self.fresh);
        self.names.insert(node, n.clone());
        n
    }

    fn decode(&mut self, fs: &FeatureStructure, node: NodeId, depth: usize) -> Option<SemTerm> {
        if depth > 64 {
            return None;
        }
        match fs.node(node) {
            Node::Any => Some(SemTerm::Var(self.name(node, "F"))),
            Node::Atoms(_) => None,
            Node::Map(_) => {
                if let Some(fnode) = fs.child(node, ATTR_FUNCTOR) {
                    let f = match fs.node(fnode) {
                        Node::Atoms(a) if a.len() == 1 => a[0],
                        _ => return None,
                    };
                    let (name, arity) = f.as_str().rsplit_once('/')?;
                    let arity: usize = arity.parse().ok()?;
                    let mut args = Vec::with_capacity(arity);
                    for i in 0..arity {
                        match fs.child(node, arg_attr(i)) {
                            Some(c) => args.push(self.decode(fs, c, depth + 1)?),
                            None => {
                                self.fresh += 1;
                                args.push(SemTerm::Var(format!("F{}", self.fresh)));
                            }
                        }
                    }
                    Some(SemTerm::App(Symbol::new(name).ok()?, args))
                } else if fs.child(node, ATTR_VAR).is_some() {
                    Some(SemTerm::Var(self.name(node, "X")))
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for SemTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemTerm::Var(v) => f.write_str(v),
            SemTerm::App(name, args) => {
                f.write_str(name.as_str())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl core::str::FromStr for SemTerm {
    type Err = FsSyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemTerm::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parse_print_roundtrip() {
        let t = SemTerm::parse("whq(X, aimer(pron(il), q(quel, X, femme)))").unwrap();
        assert_eq!(t.to_string(), "whq(X1,aimer(pron(il),q(quel,X1,femme)))");
        assert!(t.well_formed());
        let back = SemTerm::from_fs(&t.to_fs()).unwrap();
        assert!(back.equal_mod_renaming(&t));
    }

    #[test]
    fn variables_share_nodes() {
        let fs = SemTerm::parse("p(X, X, Y)").unwrap().to_fs();
        let a1 = fs.child(fs.root(), arg_attr(0)).unwrap();
        let a2 = fs.child(fs.root(), arg_attr(1)).unwrap();
        let a3 = fs.child(fs.root(), arg_attr(2)).unwrap();
        assert_eq!(a1, a2);
        assert_ne!(a1, a3);
    }

    #[test]
    fn renaming_equivalence() {
        let a = SemTerm::parse("whq(A, p(A))").unwrap();
        let b = SemTerm::parse("whq(B, p(B))").unwrap();
        assert!(a.equal_mod_renaming(&b));
        assert!(!SemTerm::parse("whq(A, p(B))").unwrap().well_formed());
    }

    #[test]
    fn holes_rejected_outside_rules() {
        assert!(SemTerm::parse("p($1)").is_err());
    }
}
