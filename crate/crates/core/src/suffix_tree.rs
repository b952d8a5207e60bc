//! Suffix tree over a padded working string.
//!
//! Nodes live in an arena. Internal nodes store their string depth counted in
//! live symbols; leaves store their id (the start position of their suffix).
//! Edge labels are not stored: the label of an edge into `v` is read from the
//! suffix of any leaf below `v`, skipping pads. This keeps labels valid while
//! replacements rewrite cells in place, since a leaf's own suffix always spells
//! its root path.
//!
//! Children are kept sorted by their first symbol, so lookups are
//! `O(log σ)` and traversals visit children in symbol order.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::ContractError;
use crate::workstr::{render, Symbol, WorkingString};

pub type NodeId = u32;

pub const ROOT: NodeId = 0;
const NONE: NodeId = NodeId::MAX;
const LEAF_DEPTH: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    children: Vec<(Symbol, NodeId)>,
    /// First symbol of the incoming edge.
    key: Symbol,
    parent: NodeId,
    slink: NodeId,
    /// String depth for internal nodes, `LEAF_DEPTH` for leaves.
    depth: u32,
    /// Leaf id, 0 for internal nodes (positions are 1-based).
    leaf: u32,
    alive: bool,
}

impl Node {
    fn internal(key: Symbol, parent: NodeId, depth: usize) -> Self {
        Node {
            children: Vec::new(),
            key,
            parent,
            slink: ROOT,
            depth: depth as u32,
            leaf: 0,
            alive: true,
        }
    }

    fn leaf(key: Symbol, parent: NodeId, id: usize) -> Self {
        Node {
            children: Vec::new(),
            key,
            parent,
            slink: NONE,
            depth: LEAF_DEPTH,
            leaf: id as u32,
            alive: true,
        }
    }

    fn is_leaf(&self) -> bool {
        self.depth == LEAF_DEPTH
    }
}

/// A point in the tree: an explicit node, or `offset` symbols down the edge
/// from `parent` to `child` (`0 < offset < edge length`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locus {
    Node(NodeId),
    Edge { parent: NodeId, child: NodeId, offset: usize },
}

/// Result of a skip/count walk: where it ended and how many edges it crossed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Descent {
    pub locus: Locus,
    pub edges: usize,
}

/// Structural side effects of one surgery, reported for bucket maintenance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Surgery {
    pub created: Option<NodeId>,
    pub spliced: Option<NodeId>,
}

/// Order-independent description of a tree's shape, for equality checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalTree {
    pub leaves: BTreeSet<(Vec<Symbol>, usize)>,
    pub internal: BTreeSet<Vec<Symbol>>,
}

#[derive(Debug, Clone)]
pub struct SuffixTree {
    nodes: Vec<Node>,
    /// Leaf node per position, `NONE` when the suffix is not represented.
    leaf_of: Vec<NodeId>,
    leaves: usize,
    /// Nodes that gained a child since the last `take_touched`.
    touched: Vec<NodeId>,
}

impl SuffixTree {
    /// Builds the tree of an all-live string with Ukkonen's online algorithm.
    pub fn build(w: &WorkingString) -> Self {
        let n = w.len();
        assert!(n >= 1 && w.get(n) == Symbol::Sentinel, "string must end with the sentinel");
        assert_eq!(w.live_len(), n, "construction needs a string without pads");

        let mut t = SuffixTree {
            nodes: Vec::with_capacity(2 * n + 1),
            leaf_of: vec![NONE; n + 2],
            leaves: 0,
            touched: Vec::new(),
        };
        t.nodes.push(Node::internal(Symbol::Pad, NONE, 0));
        // Edge start positions, only needed while building.
        let mut start: Vec<usize> = Vec::with_capacity(2 * n + 1);
        start.push(0);

        let mut active_node = ROOT;
        let mut active_edge = 0usize;
        let mut active_len = 0usize;
        let mut remaining = 0usize;

        for i in 1..=n {
            let c = w.get(i);
            remaining += 1;
            let mut last_new = NONE;
            while remaining > 0 {
                if active_len == 0 {
                    active_edge = i;
                }
                let edge_sym = w.get(active_edge);
                match t.child(active_node, edge_sym) {
                    None => {
                        let leaf = t.push_leaf(edge_sym, active_node, i - remaining + 1);
                        start.push(i);
                        t.insert_child(active_node, edge_sym, leaf);
                        if last_new != NONE {
                            t.nodes[last_new as usize].slink = active_node;
                            last_new = NONE;
                        }
                    }
                    Some(next) => {
                        let edge_len = if t.nodes[next as usize].is_leaf() {
                            i - start[next as usize] + 1
                        } else {
                            (t.nodes[next as usize].depth - t.nodes[active_node as usize].depth) as usize
                        };
                        if active_len >= edge_len {
                            active_edge += edge_len;
                            active_len -= edge_len;
                            active_node = next;
                            continue;
                        }
                        if w.get(start[next as usize] + active_len) == c {
                            if last_new != NONE && active_node != ROOT {
                                t.nodes[last_new as usize].slink = active_node;
                            }
                            active_len += 1;
                            break;
                        }
                        let depth = t.nodes[active_node as usize].depth as usize + active_len;
                        let mid = t.nodes.len() as NodeId;
                        t.nodes.push(Node::internal(edge_sym, active_node, depth));
                        start.push(start[next as usize]);
                        t.replace_child(active_node, edge_sym, mid);

                        start[next as usize] += active_len;
                        let next_key = w.get(start[next as usize]);
                        t.nodes[next as usize].key = next_key;
                        t.nodes[next as usize].parent = mid;
                        t.insert_child(mid, next_key, next);

                        let leaf = t.push_leaf(c, mid, i - remaining + 1);
                        start.push(i);
                        t.insert_child(mid, c, leaf);

                        if last_new != NONE {
                            t.nodes[last_new as usize].slink = mid;
                        }
                        last_new = mid;
                    }
                }
                remaining -= 1;
                if active_node == ROOT && active_len > 0 {
                    active_len -= 1;
                    active_edge = i - remaining + 1;
                } else if active_node != ROOT {
                    active_node = t.nodes[active_node as usize].slink;
                }
            }
        }
        t.touched = Vec::new();
        t
    }

    fn push_leaf(&mut self, key: Symbol, parent: NodeId, id: usize) -> NodeId {
        let v = self.nodes.len() as NodeId;
        self.nodes.push(Node::leaf(key, parent, id));
        self.leaf_of[id] = v;
        self.leaves += 1;
        v
    }

    // ---- accessors -------------------------------------------------------

    pub fn child(&self, v: NodeId, key: Symbol) -> Option<NodeId> {
        let ch = &self.nodes[v as usize].children;
        ch.binary_search_by(|e| e.0.cmp(&key)).ok().map(|i| ch[i].1)
    }

    /// Children of `v` in symbol order.
    pub fn children(&self, v: NodeId) -> &[(Symbol, NodeId)] {
        &self.nodes[v as usize].children
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v as usize].is_leaf()
    }

    pub fn is_alive(&self, v: NodeId) -> bool {
        self.nodes.get(v as usize).is_some_and(|n| n.alive)
    }

    pub fn leaf_id(&self, v: NodeId) -> Option<usize> {
        let n = &self.nodes[v as usize];
        n.is_leaf().then_some(n.leaf as usize)
    }

    pub fn leaf_node(&self, id: usize) -> Option<NodeId> {
        self.leaf_of.get(id).copied().filter(|&v| v != NONE)
    }

    /// String depth of an internal node; `None` for leaves.
    pub fn depth(&self, v: NodeId) -> Option<usize> {
        let n = &self.nodes[v as usize];
        (!n.is_leaf()).then_some(n.depth as usize)
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        let p = self.nodes[v as usize].parent;
        (p != NONE).then_some(p)
    }

    pub fn slink(&self, v: NodeId) -> Option<NodeId> {
        let s = self.nodes[v as usize].slink;
        (v != ROOT && s != NONE).then_some(s)
    }

    pub fn key(&self, v: NodeId) -> Symbol {
        self.nodes[v as usize].key
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    /// Ids of all live internal nodes, root included.
    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.alive && !n.is_leaf())
            .map(|(i, _)| i as NodeId)
    }

    /// Upper bound (exclusive) on node ids handed out so far.
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    /// Some leaf in the subtree of `v`, found by following first children.
    pub fn any_leaf_below(&self, mut v: NodeId) -> usize {
        while !self.is_leaf(v) {
            v = self.nodes[v as usize].children[0].1;
        }
        self.nodes[v as usize].leaf as usize
    }

    pub fn locus_depth(&self, locus: Locus) -> usize {
        match locus {
            Locus::Node(v) => self.nodes[v as usize].depth as usize,
            Locus::Edge { parent, offset, .. } => self.nodes[parent as usize].depth as usize + offset,
        }
    }

    /// The string spelled from the root to `v` (the full suffix for a leaf).
    pub fn path(&self, w: &WorkingString, v: NodeId) -> Vec<Symbol> {
        if let Some(id) = self.leaf_id(v) {
            return w.suffix(id).collect();
        }
        if v == ROOT {
            return Vec::new();
        }
        let d = self.nodes[v as usize].depth as usize;
        w.suffix(self.any_leaf_below(v)).take(d).collect()
    }

    /// Label of the edge into `v` as an inclusive pair of positions in the
    /// padded string. Pads inside the range are not part of the label.
    pub fn edge_label(&self, w: &WorkingString, v: NodeId) -> Option<(usize, usize)> {
        let parent = self.parent(v)?;
        let pd = self.nodes[parent as usize].depth as usize;
        let rep = self.leaf_id(v).unwrap_or_else(|| self.any_leaf_below(v));
        let from = w.advance(rep, pd);
        let to = match self.depth(v) {
            None => w.len(),
            Some(d) => w.advance(rep, d - 1),
        };
        Some((from, to))
    }

    // ---- raw child map edits ---------------------------------------------

    fn insert_child(&mut self, v: NodeId, key: Symbol, c: NodeId) {
        let ch = &mut self.nodes[v as usize].children;
        match ch.binary_search_by(|e| e.0.cmp(&key)) {
            Ok(_) => panic!("duplicate child key {key} under node {v}"),
            Err(i) => ch.insert(i, (key, c)),
        }
        self.touched.push(v);
    }

    fn try_insert_child(&mut self, v: NodeId, key: Symbol, c: NodeId) -> Result<(), ContractError> {
        let ch = &mut self.nodes[v as usize].children;
        match ch.binary_search_by(|e| e.0.cmp(&key)) {
            Ok(_) => Err(ContractError::DuplicateChild { node: v, symbol: key.to_string() }),
            Err(i) => {
                ch.insert(i, (key, c));
                self.touched.push(v);
                Ok(())
            }
        }
    }

    fn replace_child(&mut self, v: NodeId, key: Symbol, c: NodeId) {
        let ch = &mut self.nodes[v as usize].children;
        let i = ch.binary_search_by(|e| e.0.cmp(&key)).expect("child to replace");
        ch[i].1 = c;
        self.touched.push(v);
    }

    /// Drains the list of nodes that gained a child (or had one swapped)
    /// since the previous call. Used to keep per-node keys fresh.
    pub(crate) fn take_touched(&mut self) -> Vec<NodeId> {
        std::mem::take(&mut self.touched)
    }

    fn remove_child(&mut self, v: NodeId, key: Symbol) {
        let ch = &mut self.nodes[v as usize].children;
        let i = ch.binary_search_by(|e| e.0.cmp(&key)).expect("child to remove");
        ch.remove(i);
    }

    fn detach(&mut self, v: NodeId) -> NodeId {
        let (p, key) = (self.nodes[v as usize].parent, self.nodes[v as usize].key);
        self.remove_child(p, key);
        self.nodes[v as usize].parent = NONE;
        p
    }

    /// Merges a non-root internal node with a single child into its parent.
    fn splice_if_unary(&mut self, u: NodeId) -> Option<NodeId> {
        let node = &self.nodes[u as usize];
        if u == ROOT || node.is_leaf() || node.children.len() != 1 {
            return None;
        }
        let (c, p, key) = (node.children[0].1, node.parent, node.key);
        self.replace_child(p, key, c);
        let child = &mut self.nodes[c as usize];
        child.parent = p;
        child.key = key;
        let node = &mut self.nodes[u as usize];
        node.children.clear();
        node.alive = false;
        node.parent = NONE;
        Some(u)
    }

    /// Makes an implicit locus explicit. `continuation` is the symbol that
    /// follows the locus on the edge.
    fn split(&mut self, parent: NodeId, child: NodeId, offset: usize, continuation: Symbol) -> NodeId {
        let depth = self.nodes[parent as usize].depth as usize + offset;
        let key = self.nodes[child as usize].key;
        let m = self.nodes.len() as NodeId;
        let mut node = Node::internal(key, parent, depth);
        node.slink = NONE;
        node.children.push((continuation, child));
        self.nodes.push(node);
        self.replace_child(parent, key, m);
        let c = &mut self.nodes[child as usize];
        c.parent = m;
        c.key = continuation;
        m
    }

    pub(crate) fn set_slink(&mut self, v: NodeId, target: NodeId) {
        self.nodes[v as usize].slink = target;
    }

    // ---- surgery ---------------------------------------------------------

    /// Detaches the leaf for suffix `id`. A parent left with one child is
    /// spliced out and reported.
    pub fn remove_leaf(&mut self, id: usize) -> Result<Option<NodeId>, ContractError> {
        let v = self.leaf_node(id).ok_or(ContractError::UnknownLeaf(id))?;
        let p = self.detach(v);
        self.leaf_of[id] = NONE;
        self.nodes[v as usize].alive = false;
        self.leaves -= 1;
        Ok(self.splice_if_unary(p))
    }

    /// Re-hangs leaf `id` at `target`, reading the new edge key and, for an
    /// implicit target, the edge continuation from `w`.
    pub fn redirect_leaf_edge(
        &mut self,
        w: &WorkingString,
        id: usize,
        target: Locus,
    ) -> Result<Surgery, ContractError> {
        let v = self.leaf_node(id).ok_or(ContractError::UnknownLeaf(id))?;
        let depth = self.locus_depth(target);
        let leaf_key = w.get(w.advance(id, depth));
        let continuation = match target {
            Locus::Node(_) => Symbol::Pad,
            Locus::Edge { child, .. } => {
                let rep = self.leaf_below_except(child, id).ok_or(ContractError::BadRedirect)?;
                w.get(w.advance(rep, depth))
            }
        };
        self.hang_leaf(v, target, leaf_key, continuation)
    }

    fn leaf_below_except(&self, v: NodeId, id: usize) -> Option<usize> {
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            match self.leaf_id(x) {
                Some(l) if l != id => return Some(l),
                Some(_) => {}
                None => stack.extend(self.nodes[x as usize].children.iter().map(|e| e.1)),
            }
        }
        None
    }

    /// Moves leaf node `v` under `target` with edge key `leaf_key`.
    pub(crate) fn hang_leaf(
        &mut self,
        v: NodeId,
        target: Locus,
        leaf_key: Symbol,
        continuation: Symbol,
    ) -> Result<Surgery, ContractError> {
        let mut surgery = Surgery::default();
        let target_node = match target {
            Locus::Node(x) => {
                if x == v || !self.is_alive(x) || self.is_leaf(x) {
                    return Err(ContractError::BadRedirect);
                }
                if self.child(x, leaf_key).is_some_and(|c| c != v) {
                    return Err(ContractError::DuplicateChild { node: x, symbol: leaf_key.to_string() });
                }
                x
            }
            Locus::Edge { parent, child, offset } => {
                if child == v || continuation == leaf_key {
                    return Err(ContractError::BadRedirect);
                }
                let m = self.split(parent, child, offset, continuation);
                surgery.created = Some(m);
                m
            }
        };
        let old_parent = self.detach(v);
        self.nodes[v as usize].key = leaf_key;
        self.nodes[v as usize].parent = target_node;
        self.try_insert_child(target_node, leaf_key, v)?;
        if old_parent != target_node {
            surgery.spliced = self.splice_if_unary(old_parent);
        }
        Ok(surgery)
    }

    /// Changes the edge key of leaf `id` without moving it.
    pub(crate) fn rekey_leaf(&mut self, id: usize, key: Symbol) -> Result<(), ContractError> {
        let v = self.leaf_node(id).ok_or(ContractError::UnknownLeaf(id))?;
        let p = self.nodes[v as usize].parent;
        let old = self.nodes[v as usize].key;
        self.remove_child(p, old);
        self.nodes[v as usize].key = key;
        self.try_insert_child(p, key, v)
    }

    /// Moves the leaf of a just-replaced occurrence under the root child for
    /// `hash`, creating the depth-one hash node when a second leaf arrives.
    pub(crate) fn attach_replaced(
        &mut self,
        w: &WorkingString,
        id: usize,
        hash: Symbol,
    ) -> Result<Surgery, ContractError> {
        let v = self.leaf_node(id).ok_or(ContractError::UnknownLeaf(id))?;
        let mut surgery = Surgery::default();
        let old_parent = self.detach(v);
        match self.child(ROOT, hash) {
            None => {
                self.nodes[v as usize].key = hash;
                self.nodes[v as usize].parent = ROOT;
                self.insert_child(ROOT, hash, v);
            }
            Some(x) => {
                let group = if self.is_leaf(x) {
                    let g = self.nodes.len() as NodeId;
                    let mut node = Node::internal(hash, ROOT, 1);
                    node.slink = ROOT;
                    self.nodes.push(node);
                    self.replace_child(ROOT, hash, g);
                    let xid = self.nodes[x as usize].leaf as usize;
                    let follow = w.get(w.next_live(xid));
                    self.nodes[x as usize].key = follow;
                    self.nodes[x as usize].parent = g;
                    self.insert_child(g, follow, x);
                    surgery.created = Some(g);
                    g
                } else {
                    x
                };
                let follow = w.get(w.next_live(id));
                self.nodes[v as usize].key = follow;
                self.nodes[v as usize].parent = group;
                self.try_insert_child(group, follow, v)?;
            }
        }
        surgery.spliced = self.splice_if_unary(old_parent);
        Ok(surgery)
    }

    // ---- navigation ------------------------------------------------------

    /// Finds the locus spelling `s`, comparing every symbol against the text.
    pub fn locate(&self, w: &WorkingString, s: &[Symbol]) -> Option<Locus> {
        let mut node = ROOT;
        let mut d = 0usize;
        loop {
            if d == s.len() {
                return Some(Locus::Node(node));
            }
            let c = self.child(node, s[d])?;
            let end = self.depth(c).unwrap_or(usize::MAX);
            let rep = self.leaf_id(c).unwrap_or_else(|| self.any_leaf_below(c));
            let mut p = w.advance(rep, d);
            while d < end && d < s.len() {
                if p > w.len() || w.get(p) != s[d] {
                    return None;
                }
                p = w.next_live(p);
                d += 1;
            }
            if d < end {
                let pd = self.nodes[node as usize].depth as usize;
                return Some(Locus::Edge { parent: node, child: c, offset: d - pd });
            }
            node = c;
        }
    }

    /// Skip/count walk from `from` (whose path must be a prefix of `target`)
    /// down to the locus of `target`. Only first symbols are compared.
    pub fn descend(&self, from: NodeId, target: &[Symbol]) -> Result<Descent, ContractError> {
        let mut node = from;
        let mut edges = 0usize;
        loop {
            let d = self.nodes[node as usize].depth as usize;
            if d == target.len() {
                return Ok(Descent { locus: Locus::Node(node), edges });
            }
            if d > target.len() {
                return Err(ContractError::SuffixAbsent);
            }
            let c = self.child(node, target[d]).ok_or(ContractError::SuffixAbsent)?;
            edges += 1;
            let cd = self.nodes[c as usize].depth;
            if cd != LEAF_DEPTH && cd as usize <= target.len() {
                node = c;
                continue;
            }
            return Ok(Descent { locus: Locus::Edge { parent: node, child: c, offset: target.len() - d }, edges });
        }
    }

    /// Follows the suffix link of `prev_parent` and walks down to the locus
    /// of `target`, which must be a suffix reachable that way.
    pub fn slink_descend(&self, prev_parent: NodeId, target: &[Symbol]) -> Result<Descent, ContractError> {
        let s = self.slink(prev_parent).ok_or(ContractError::NoSuffixLink(prev_parent))?;
        if !self.is_alive(s) {
            return Err(ContractError::NoSuffixLink(prev_parent));
        }
        self.descend(s, target)
    }

    // ---- checking --------------------------------------------------------

    /// Checks every structural invariant against `w`; returns findings.
    pub fn validate(&self, w: &WorkingString) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen_leaves = 0usize;
        let mut stack = vec![ROOT];
        let mut reached = vec![false; self.nodes.len()];
        while let Some(v) = stack.pop() {
            reached[v as usize] = true;
            let node = &self.nodes[v as usize];
            if !node.alive {
                out.push(format!("node {v} is dead but reachable"));
                continue;
            }
            if node.is_leaf() {
                seen_leaves += 1;
                let id = node.leaf as usize;
                if !w.is_live(id) {
                    out.push(format!("leaf {id} starts at a dead position"));
                }
                if self.leaf_of.get(id) != Some(&v) {
                    out.push(format!("leaf index for {id} does not point at node {v}"));
                }
                let pd = self.nodes[node.parent as usize].depth as usize;
                if w.suffix_len(id) <= pd {
                    out.push(format!("leaf {id} is not deeper than its parent"));
                }
                continue;
            }
            if v != ROOT && node.children.len() < 2 {
                out.push(format!("internal node {v} has {} children", node.children.len()));
            }
            if node.children.windows(2).any(|p| p[0].0 >= p[1].0) {
                out.push(format!("children of node {v} do not begin with distinct symbols"));
            }
            let d = node.depth as usize;
            let path: Vec<Symbol> = if v == ROOT { Vec::new() } else { self.path(w, v) };
            if path.len() != d {
                out.push(format!("node {v} has depth {d} but spells {} symbols", path.len()));
            }
            for &(key, c) in &node.children {
                let child = &self.nodes[c as usize];
                if child.parent != v {
                    out.push(format!("child {c} of {v} has parent {}", child.parent));
                }
                if child.key != key {
                    out.push(format!("child {c} of {v} stored under {key} but keyed {}", child.key));
                }
                if !child.is_leaf() && child.depth as usize <= d {
                    out.push(format!("child {c} of {v} is not deeper"));
                }
                let rep = if child.is_leaf() { child.leaf as usize } else { self.any_leaf_below(c) };
                let prefix: Vec<Symbol> = w.suffix(rep).take(d + 1).collect();
                if prefix.len() <= d || prefix[..d] != path[..] {
                    out.push(format!("leaf {rep} below node {v} does not spell its path"));
                } else if prefix[d] != key {
                    out.push(format!("edge into {c} starts with {} but is keyed {key}", prefix[d]));
                }
                stack.push(c);
            }
            if v != ROOT {
                match self.slink(v) {
                    None => out.push(format!("node {v} has no suffix link")),
                    Some(s) if !self.is_alive(s) || self.is_leaf(s) => {
                        out.push(format!("suffix link of {v} points at a dead or leaf node"))
                    }
                    Some(s) => {
                        let sd = self.nodes[s as usize].depth as usize;
                        if sd + 1 != d {
                            out.push(format!("suffix link of {v} has depth {sd}, expected {}", d - 1));
                        } else if s != ROOT && self.path(w, s)[..] != path[1..] {
                            out.push(format!("suffix link of {v} spells the wrong string"));
                        }
                    }
                }
            }
        }
        if seen_leaves != self.leaves {
            out.push(format!("{} leaves reachable, {} recorded", seen_leaves, self.leaves));
        }
        for p in 1..=w.len() {
            let live = w.is_live(p);
            let has = self.leaf_node(p).is_some_and(|v| reached[v as usize]);
            if live && !has {
                out.push(format!("live position {p} has no leaf"));
            } else if !live && self.leaf_node(p).is_some() {
                out.push(format!("dead position {p} still has a leaf"));
            }
        }
        out
    }

    /// Path strings of all nodes. Leaf ids pass through `map` (1-based index
    /// into it) when given, to compare trees in different coordinates.
    pub fn canonicalize(&self, w: &WorkingString, map: Option<&[usize]>) -> CanonicalTree {
        let mut leaves = BTreeSet::new();
        let mut internal = BTreeSet::new();
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            match self.leaf_id(v) {
                Some(id) => {
                    let mapped = map.map_or(id, |m| m[id - 1]);
                    leaves.insert((self.path(w, v), mapped));
                }
                None => {
                    internal.insert(self.path(w, v));
                    stack.extend(self.children(v).iter().map(|e| e.1));
                }
            }
        }
        CanonicalTree { leaves, internal }
    }

    /// Compares shapes node by node: same child keys, same internal depths,
    /// and leaf ids equal after mapping `other`'s ids through `map`.
    /// Together with [`validate`](Self::validate) on both trees this is
    /// equivalent to comparing canonical forms, in linear time.
    pub fn same_shape(&self, other: &SuffixTree, map: &[usize]) -> Result<(), String> {
        let mut stack = vec![(ROOT, ROOT)];
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (&self.nodes[a as usize], &other.nodes[b as usize]);
            match (na.is_leaf(), nb.is_leaf()) {
                (true, true) => {
                    if na.leaf as usize != map[nb.leaf as usize - 1] {
                        return Err(format!("leaf {} vs rebuilt leaf {}", na.leaf, map[nb.leaf as usize - 1]));
                    }
                }
                (false, false) => {
                    if na.depth != nb.depth {
                        return Err(format!("node {a} depth {} vs {}", na.depth, nb.depth));
                    }
                    if na.children.len() != nb.children.len()
                        || na.children.iter().zip(&nb.children).any(|(x, y)| x.0 != y.0)
                    {
                        let keys = |n: &Node| render(&n.children.iter().map(|e| e.0).collect::<Vec<_>>());
                        return Err(format!(
                            "node {a} (depth {}) children [{}] vs [{}]",
                            na.depth,
                            keys(na),
                            keys(nb)
                        ));
                    }
                    stack.extend(na.children.iter().zip(&nb.children).map(|(x, y)| (x.1, y.1)));
                }
                _ => return Err(format!("node {a} leaf/internal mismatch")),
            }
        }
        Ok(())
    }

    /// Preorder dump, children in symbol order, one
    /// `depth<TAB>path<TAB>leaf-id-or-"-"` line per node.
    pub fn dump(&self, w: &WorkingString) -> String {
        let mut out = String::new();
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            let path = self.path(w, v);
            let leaf = self.leaf_id(v).map_or_else(|| "-".to_string(), |id| id.to_string());
            let _ = writeln!(out, "{}\t{}\t{}", path.len(), render(&path), leaf);
            stack.extend(self.children(v).iter().rev().map(|e| e.1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Vec<Symbol> {
        s.bytes().map(Symbol::Byte).collect()
    }

    /// Suffix tree by brute force: a node for every branching prefix.
    fn naive_internal_paths(text: &[Symbol]) -> BTreeSet<Vec<Symbol>> {
        let n = text.len();
        let mut out = BTreeSet::new();
        out.insert(Vec::new());
        for i in 0..n {
            for j in i + 1..=n {
                let x = &text[i..j];
                let mut next = BTreeSet::new();
                for s in 0..n {
                    if text[s..].starts_with(x) && s + x.len() < n {
                        next.insert(text[s + x.len()]);
                    }
                }
                if next.len() >= 2 {
                    out.insert(x.to_vec());
                }
            }
        }
        out
    }

    #[test]
    fn two_symbol_string_has_two_leaves() {
        let w = WorkingString::from_bytes(b"a");
        let t = SuffixTree::build(&w);
        assert_eq!(t.children(ROOT).len(), 2);
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.internal_nodes().count(), 1);
        assert!(t.validate(&w).is_empty());
    }

    #[test]
    fn abab_matches_naive_shape() {
        let w = WorkingString::from_bytes(b"abab");
        let t = SuffixTree::build(&w);
        assert!(t.validate(&w).is_empty(), "{:?}", t.validate(&w));
        let canon = t.canonicalize(&w, None);
        // "a" is always followed by "b", so it is not a node.
        let expected: BTreeSet<_> = [vec![], sym("b"), sym("ab")].into_iter().collect();
        assert_eq!(canon.internal, expected);
        assert_eq!(canon.internal, naive_internal_paths(&w.shrunk().symbols));
        let Some(Locus::Node(ab)) = t.locate(&w, &sym("ab")) else { panic!("ab should be explicit") };
        let ids: Vec<_> = t.children(ab).iter().filter_map(|e| t.leaf_id(e.1)).collect();
        assert_eq!(ids.len(), 2);
        assert!(ids.contains(&1) && ids.contains(&3));
    }

    #[test]
    fn appendix_tree_has_baa_node() {
        let w = WorkingString::from_bytes(b"abbaaccabccbaabcb");
        let t = SuffixTree::build(&w);
        assert!(t.validate(&w).is_empty());
        let Some(Locus::Node(v)) = t.locate(&w, &sym("baa")) else { panic!("baa should be explicit") };
        assert_eq!(t.depth(v), Some(3));
        let mut ids: Vec<_> = t.children(v).iter().filter_map(|e| t.leaf_id(e.1)).collect();
        ids.sort();
        assert_eq!(ids, vec![3, 12]);
    }

    #[test]
    fn build_matches_naive_on_small_strings() {
        for text in ["", "aaaa", "mississippi", "abcabxabcd", "abaababaabaab", "zzzyzzzyzz"] {
            let w = WorkingString::from_bytes(text.as_bytes());
            let t = SuffixTree::build(&w);
            assert!(t.validate(&w).is_empty(), "{text}: {:?}", t.validate(&w));
            assert_eq!(t.leaf_count(), w.len());
            assert!(t.internal_nodes().count() < w.len().max(2));
            assert_eq!(t.canonicalize(&w, None).internal, naive_internal_paths(&w.shrunk().symbols), "{text}");
        }
    }

    #[test]
    fn locate_examples() {
        let w = WorkingString::from_bytes(b"abab");
        let t = SuffixTree::build(&w);
        assert_eq!(t.locate(&w, &[]), Some(Locus::Node(ROOT)));
        assert_eq!(t.locate(&w, &sym("bb")), None);
        assert!(matches!(t.locate(&w, &sym("aba")), Some(Locus::Edge { offset: 1, .. })));
        assert_eq!(t.locate(&w, &sym("ababa")), None);
    }

    #[test]
    fn validate_reports_duplicate_first_symbols() {
        let w = WorkingString::from_bytes(b"abab");
        let mut t = SuffixTree::build(&w);
        // Force two root children to share the key 'a'.
        let b = t.child(ROOT, Symbol::Byte(b'b')).unwrap();
        t.nodes[ROOT as usize].children.iter_mut().find(|e| e.1 == b).unwrap().0 = Symbol::Byte(b'a');
        let findings = t.validate(&w);
        assert!(findings.iter().any(|f| f.contains("node 0") && f.contains("distinct")), "{findings:?}");
    }

    #[test]
    fn canonical_forms_distinguish_strings() {
        let w1 = WorkingString::from_bytes(b"ab");
        let w2 = WorkingString::from_bytes(b"ba");
        let c1 = SuffixTree::build(&w1).canonicalize(&w1, None);
        assert_eq!(c1, SuffixTree::build(&w1).canonicalize(&w1, None));
        assert_ne!(c1, SuffixTree::build(&w2).canonicalize(&w2, None));
    }

    #[test]
    fn removing_one_of_two_children_splices_parent() {
        let w = WorkingString::from_bytes(b"abab");
        let mut t = SuffixTree::build(&w);
        let Some(Locus::Node(ab)) = t.locate(&w, &sym("ab")) else { panic!() };
        assert_eq!(t.remove_leaf(3).unwrap(), Some(ab));
        assert!(!t.is_alive(ab));
        // Root is never spliced.
        assert_eq!(t.remove_leaf(5).unwrap(), None);
        assert_eq!(t.remove_leaf(5), Err(ContractError::UnknownLeaf(5)));
    }

    #[test]
    fn slink_descend_reaches_explicit_node() {
        let w = WorkingString::from_bytes(b"abab");
        let t = SuffixTree::build(&w);
        let Some(Locus::Node(ab)) = t.locate(&w, &sym("ab")) else { panic!() };
        let d = t.slink_descend(ab, &sym("b")).unwrap();
        assert_eq!(d.locus, t.locate(&w, &sym("b")).unwrap());
        assert_eq!(d.edges, 0);
        assert!(t.slink_descend(ROOT, &sym("b")).is_err());
    }

    #[test]
    fn dump_is_preorder_in_symbol_order() {
        let w = WorkingString::from_bytes(b"a");
        let t = SuffixTree::build(&w);
        assert_eq!(t.dump(&w), "0\t\t-\n1\t$\t2\n2\ta$\t1\n");
    }
}
