//! Feature structures: rooted acyclic attribute-value graphs with
//! reentrancy and disjunctive atomic leaves, plus non-destructive
//! unification and subsumption.
//!
//! A structure is stored compactly as a node vector. Reentrancy is node
//! sharing, so rule instances never need variable renaming: copying the
//! vector is a standardize-apart.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::symbol::Symbol;

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    /// Unconstrained. Written `?X` when shared, omitted inside maps otherwise.
    Any,
    /// Non-empty sorted set of atoms; more than one member is a disjunction.
    Atoms(Vec<Symbol>),
    /// Sorted attribute map.
    Map(Vec<(Symbol, NodeId)>),
}

#[derive(Clone, Debug)]
pub struct FeatureStructure {
    nodes: Vec<Node>,
    root: NodeId,
}

impl Default for FeatureStructure {
    fn default() -> Self {
        FeatureStructure::empty()
    }
}

impl FeatureStructure {
    /// `[]`, the identity of unification over complex structures.
    pub fn empty() -> Self {
        FeatureStructure { nodes: vec![Node::Map(Vec::new())], root: 0 }
    }

    /// A bare unconstrained node.
    pub fn any() -> Self {
        FeatureStructure { nodes: vec![Node::Any], root: 0 }
    }

    pub fn atom(a: Symbol) -> Self {
        FeatureStructure { nodes: vec![Node::Atoms(vec![a])], root: 0 }
    }

    /// Disjunctive atomic value. `None` for an empty set.
    pub fn atoms<I: IntoIterator<Item = Symbol>>(values: I) -> Option<Self> {
        let mut v: Vec<Symbol> = values.into_iter().collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            return None;
        }
        Some(FeatureStructure { nodes: vec![Node::Atoms(v)], root: 0 })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn child(&self, node: NodeId, attr: Symbol) -> Option<NodeId> {
        match self.node(node) {
            Node::Map(m) => m.binary_search_by(|(k, _)| k.cmp(&attr)).ok().map(|i| m[i].1),
            _ => None,
        }
    }

    pub fn path_node(&self, path: &[Symbol]) -> Option<NodeId> {
        let mut cur = self.root;
        for a in path {
            cur = self.child(cur, *a)?;
        }
        Some(cur)
    }

    /// Atom set at `path`, if the path ends in an atomic node.
    pub fn atoms_at(&self, path: &[Symbol]) -> Option<&[Symbol]> {
        match self.node(self.path_node(path)?) {
            Node::Atoms(a) => Some(a),
            _ => None,
        }
    }

    /// The single atom at `path`, if determined.
    pub fn atom_at(&self, path: &[Symbol]) -> Option<Symbol> {
        match self.atoms_at(path)? {
            [a] => Some(*a),
            _ => None,
        }
    }

    pub fn has_path(&self, path: &[Symbol]) -> bool {
        self.path_node(path).is_some()
    }

    pub fn is_map(&self) -> bool {
        matches!(self.node(self.root), Node::Map(_))
    }

    /// Copy of the sub-structure at `path`.
    pub fn get(&self, path: &[Symbol]) -> Option<FeatureStructure> {
        let n = self.path_node(path)?;
        let mut arena = Arena::default();
        let base = arena.import(self);
        arena.compact(base + n, None)
    }

    /// Most general structure subsumed by both, or `None` on clash.
    pub fn unify(&self, other: &FeatureStructure) -> Option<FeatureStructure> {
        let mut arena = Arena::default();
        let a = arena.import(self) + self.root;
        let b = arena.import(other) + other.root;
        if !arena.unify(a, b) {
            return None;
        }
        arena.compact(a, None)
    }

    /// Unify `other` into the node at `path` (created if absent), keeping
    /// `self`'s root.
    pub fn unify_at(&self, path: &[Symbol], other: &FeatureStructure) -> Option<FeatureStructure> {
        self.unify_at_inner(path, other, false)
    }

    /// As [`unify_at`](Self::unify_at) for a one-step path, then drop that
    /// attribute from the root. Used to discharge rule daughters.
    pub fn unify_and_drop(&self, attr: Symbol, other: &FeatureStructure) -> Option<FeatureStructure> {
        self.unify_at_inner(&[attr], other, true)
    }

    fn unify_at_inner(
        &self,
        path: &[Symbol],
        other: &FeatureStructure,
        drop_first: bool,
    ) -> Option<FeatureStructure> {
        let mut arena = Arena::default();
        let root = arena.import(self) + self.root;
        let b = arena.import(other) + other.root;
        let mut cur = root;
        for a in path {
            cur = arena.child(cur, *a, true)?;
        }
        if !arena.unify(cur, b) {
            return None;
        }
        let skip = if drop_first { path.first().copied() } else { None };
        arena.compact(root, skip)
    }

    /// Structure with `attr` removed from the root map.
    pub fn without(&self, attr: Symbol) -> FeatureStructure {
        let mut arena = Arena::default();
        let root = arena.import(self) + self.root;
        arena.compact(root, Some(attr)).unwrap_or_else(|| self.clone())
    }

    /// True iff every instance of `other` is an instance of `self`.
    pub fn subsumes(&self, other: &FeatureStructure) -> bool {
        #[derive(Clone, Copy, PartialEq, Eq)]
        enum Target {
            Real(NodeId),
            Virtual(u32),
        }
        let mut image: Vec<Option<Target>> = vec![None; self.nodes.len()];
        let mut fresh = 0u32;
        let mut stack = vec![(self.root, Target::Real(other.root))];
        while let Some((a, t)) = stack.pop() {
            match image[a as usize] {
                Some(prev) if prev == t => continue,
                Some(_) => return false,
                None => image[a as usize] = Some(t),
            }
            match (self.node(a), t) {
                (Node::Any, _) => {}
                (Node::Atoms(sa), Target::Real(b)) => match other.node(b) {
                    Node::Atoms(sb) => {
                        if !sb.iter().all(|x| sa.binary_search(x).is_ok()) {
                            return false;
                        }
                    }
                    _ => return false,
                },
                (Node::Map(ma), Target::Real(b)) => {
                    let mb = match other.node(b) {
                        Node::Map(mb) => mb,
                        _ => return false,
                    };
                    for (k, va) in ma {
                        let tb = match mb.binary_search_by(|(kb, _)| kb.cmp(k)) {
                            Ok(i) => Target::Real(mb[i].1),
                            Err(_) => {
                                fresh += 1;
                                Target::Virtual(fresh)
                            }
                        };
                        stack.push((*va, tb));
                    }
                }
                (_, Target::Virtual(_)) => return false,
            }
        }
        true
    }

    pub fn equal_mod_renaming(&self, other: &FeatureStructure) -> bool {
        self.subsumes(other) && other.subsumes(self)
    }

    /// Every attribute name used anywhere, with the path prefix leading to
    /// it; each node is visited once.
    pub fn attribute_names(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for n in &self.nodes {
            if let Node::Map(m) = n {
                out.extend(m.iter().map(|(k, _)| *k));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Attribute names appearing at reachable nodes, not descending below
    /// any attribute in `opaque`.
    pub fn attribute_names_except(&self, opaque: &[Symbol]) -> Vec<Symbol> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            if core::mem::replace(&mut seen[n as usize], true) {
                continue;
            }
            if let Node::Map(m) = self.node(n) {
                for (k, v) in m {
                    out.push(*k);
                    if !opaque.contains(k) {
                        stack.push(*v);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Canonical text: equal modulo renaming implies equal text.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = fmt::write(&mut s, format_args!("{}", self));
        s
    }

    pub fn read(text: &str) -> Result<FeatureStructure, FsSyntaxError> {
        crate::fstext::read_fs(text)
    }
}

/// Position-tagged syntax error from the textual reader.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at byte {pos}: {msg}")]
pub struct FsSyntaxError {
    pub pos: usize,
    pub msg: String,
}

/// Union-find workspace shared by unification, the reader and builders.
#[derive(Default, Debug, Clone)]
pub struct Arena {
    nodes: Vec<Node>,
    parent: Vec<NodeId>,
}

impl Arena {
    pub fn new() -> Self {
        Arena::default()
    }

    pub fn push(&mut self, n: Node) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n);
        self.parent.push(id);
        id
    }

    pub fn any(&mut self) -> NodeId {
        self.push(Node::Any)
    }

    /// Copy a structure in; returns the offset to add to its node ids.
    pub fn import(&mut self, fs: &FeatureStructure) -> NodeId {
        let base = self.nodes.len() as NodeId;
        for n in &fs.nodes {
            let n = match n {
                Node::Map(m) => Node::Map(m.iter().map(|(k, v)| (*k, v + base)).collect()),
                other => other.clone(),
            };
            self.push(n);
        }
        base
    }

    /// Import and return the imported root.
    pub fn import_root(&mut self, fs: &FeatureStructure) -> NodeId {
        self.import(fs) + fs.root
    }

    pub fn find(&mut self, mut x: NodeId) -> NodeId {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Follow or create `attr` under `node`. `None` if `node` is atomic, or
    /// if the attribute is absent and `create` is false.
    pub fn child(&mut self, node: NodeId, attr: Symbol, create: bool) -> Option<NodeId> {
        let n = self.find(node);
        if matches!(self.nodes[n as usize], Node::Any) {
            if !create {
                return None;
            }
            self.nodes[n as usize] = Node::Map(Vec::new());
        }
        let found = match &self.nodes[n as usize] {
            Node::Map(m) => m.binary_search_by(|(k, _)| k.cmp(&attr)),
            _ => return None,
        };
        match found {
            Ok(i) => match &self.nodes[n as usize] {
                Node::Map(m) => Some(m[i].1),
                _ => None,
            },
            Err(i) => {
                if !create {
                    return None;
                }
                let c = self.any();
                if let Node::Map(m) = &mut self.nodes[n as usize] {
                    m.insert(i, (attr, c));
                }
                Some(c)
            }
        }
    }

    pub fn unify(&mut self, a: NodeId, b: NodeId) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            let na = core::mem::replace(&mut self.nodes[a as usize], Node::Any);
            let nb = core::mem::replace(&mut self.nodes[b as usize], Node::Any);
            let merged = match (na, nb) {
                (Node::Any, other) | (other, Node::Any) => other,
                (Node::Atoms(x), Node::Atoms(y)) => {
                    let both: Vec<Symbol> = x.into_iter().filter(|s| y.binary_search(s).is_ok()).collect();
                    if both.is_empty() {
                        return false;
                    }
                    Node::Atoms(both)
                }
                (Node::Map(x), Node::Map(y)) => {
                    let mut out = Vec::with_capacity(x.len() + y.len());
                    let (mut i, mut j) = (0, 0);
                    while i < x.len() || j < y.len() {
                        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
                            out.push(x[i]);
                            i += 1;
                        } else if i == x.len() || y[j].0 < x[i].0 {
                            out.push(y[j]);
                            j += 1;
                        } else {
                            out.push(y[j]);
                            stack.push((x[i].1, y[j].1));
                            i += 1;
                            j += 1;
                        }
                    }
                    Node::Map(out)
                }
                _ => return false,
            };
            self.nodes[b as usize] = merged;
            self.parent[a as usize] = b;
        }
        true
    }

    /// Copy out the graph reachable from `root`, optionally dropping one
    /// root attribute. `None` if unification produced a cycle.
    pub fn compact(&mut self, root: NodeId, skip_root_attr: Option<Symbol>) -> Option<FeatureStructure> {
        const UNSEEN: u32 = u32::MAX;
        const OPEN: u32 = u32::MAX - 1;
        let mut newid: Vec<u32> = vec![UNSEEN; self.nodes.len()];
        let mut out: Vec<Node> = Vec::new();
        // Explicit DFS: (rep, next child index). Post-order assigns ids.
        let r = self.find(root);
        let mut stack: Vec<(NodeId, usize)> = vec![(r, 0)];
        newid[r as usize] = OPEN;
        while let Some(&mut (n, ref mut idx)) = stack.last_mut() {
            let kids: Option<(Symbol, NodeId)> = match &self.nodes[n as usize] {
                Node::Map(m) => {
                    let mut pick = None;
                    while *idx < m.len() {
                        let (k, v) = m[*idx];
                        *idx += 1;
                        if n == r && Some(k) == skip_root_attr {
                            continue;
                        }
                        pick = Some((k, v));
                        break;
                    }
                    pick
                }
                _ => None,
            };
            match kids {
                Some((_, v)) => {
                    let c = self.find(v);
                    match newid[c as usize] {
                        OPEN => return None,
                        UNSEEN => {
                            newid[c as usize] = OPEN;
                            stack.push((c, 0));
                        }
                        _ => {}
                    }
                }
                None => {
                    stack.pop();
                    let node = match &self.nodes[n as usize] {
                        Node::Map(m) => {
                            let mut entries = Vec::with_capacity(m.len());
                            for (k, v) in m.clone() {
                                if n == r && Some(k) == skip_root_attr {
                                    continue;
                                }
                                let c = self.find(v);
                                entries.push((k, newid[c as usize]));
                            }
                            Node::Map(entries)
                        }
                        other => other.clone(),
                    };
                    newid[n as usize] = out.len() as u32;
                    out.push(node);
                }
            }
        }
        let root = newid[r as usize];
        Some(FeatureStructure { nodes: out, root })
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut refs = vec![0u32; self.nodes.len()];
        refs[self.root as usize] += 1;
        for n in &self.nodes {
            if let Node::Map(m) = n {
                for (_, v) in m {
                    refs[*v as usize] += 1;
                }
            }
        }
        let mut names: BTreeMap<NodeId, u32> = BTreeMap::new();
        let mut w = Writer { fs: self, refs: &refs, names: &mut names };
        if matches!(self.node(self.root), Node::Any) && refs[self.root as usize] <= 1 {
            return f.write_str("?_");
        }
        w.write(f, self.root)
    }
}

struct Writer<'a> {
    fs: &'a FeatureStructure,
    refs: &'a [u32],
    names: &'a mut BTreeMap<NodeId, u32>,
}

impl Writer<'_> {
    fn omitted(&self, n: NodeId) -> bool {
        matches!(self.fs.node(n), Node::Any) && self.refs[n as usize] <= 1
    }

    fn write(&mut self, f: &mut fmt::Formatter<'_>, n: NodeId) -> fmt::Result {
        if self.refs[n as usize] > 1 {
            if let Some(k) = self.names.get(&n) {
                return write!(f, "?{}", k);
            }
            let k = self.names.len() as u32 + 1;
            self.names.insert(n, k);
            write!(f, "?{}", k)?;
            if matches!(self.fs.node(n), Node::Any) {
                return Ok(());
            }
            f.write_str(":")?;
        }
        match self.fs.node(n) {
            Node::Any => f.write_str("?_"),
            Node::Atoms(a) if a.len() == 1 => write!(f, "{}", a[0]),
            Node::Atoms(a) => {
                f.write_str("{")?;
                for (i, s) in a.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", s)?;
                }
                f.write_str("}")
            }
            Node::Map(m) => {
                f.write_str("[")?;
                let mut first = true;
                for (k, v) in m {
                    if self.omitted(*v) {
                        continue;
                    }
                    if !first {
                        f.write_str(", ")?;
                    }
                    first = false;
                    write!(f, "{}=", k)?;
                    self.write(f, *v)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Unify a sequence of structures left to right.
pub fn unify_all<'a, I: IntoIterator<Item = &'a FeatureStructure>>(items: I) -> Option<FeatureStructure> {
    let mut acc = FeatureStructure::any();
    for fs in items {
        acc = acc.unify(fs)?;
    }
    Some(acc)
}
