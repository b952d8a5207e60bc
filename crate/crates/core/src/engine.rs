//! Longest-first substitution driven by a suffix tree that is updated in
//! place after every replacement.
//!
//! Each step takes the deepest internal node (an LR: all its children are
//! leaves), classifies the occurrences, and replaces the selected ones one at
//! a time. For a replaced occurrence at `i` the tree changes only in three
//! places: the leaves of the up to `len` suffixes that start right before `i`
//! (the affected zone), the leaf of `i` itself, and the leaves inside the
//! occurrence (the dead zone).

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::encoding::{assemble, Encoding, Mark, OccType};
use crate::error::ContractError;
use crate::suffix_tree::{Locus, NodeId, SuffixTree, Surgery, ROOT};
use crate::workstr::{Symbol, WorkingString};
use crate::{Mode, TieBreak};

const NIL: NodeId = NodeId::MAX;

/// Live internal nodes of string depth ≥ 2, grouped by depth in intrusive
/// doubly linked lists so that removal is O(1).
#[derive(Debug, Clone)]
pub struct DepthBuckets {
    head: Vec<NodeId>,
    tail: Vec<NodeId>,
    prev: Vec<NodeId>,
    next: Vec<NodeId>,
    /// Bucket of each node, 0 when absent.
    depth: Vec<u32>,
    cursor: usize,
    count: usize,
}

impl DepthBuckets {
    pub fn new(max_depth: usize) -> Self {
        DepthBuckets {
            head: vec![NIL; max_depth + 1],
            tail: vec![NIL; max_depth + 1],
            prev: Vec::new(),
            next: Vec::new(),
            depth: Vec::new(),
            cursor: 0,
            count: 0,
        }
    }

    /// Buckets every internal node of depth ≥ 2, in node-id order.
    pub fn init(t: &SuffixTree) -> Self {
        let mut b = DepthBuckets::new(t.leaf_count());
        b.ensure(t.id_bound().max(1) as NodeId - 1);
        for v in 0..t.id_bound() as NodeId {
            if t.is_alive(v) && !t.is_leaf(v) {
                b.insert(v, t.depth(v).unwrap());
            }
        }
        b
    }

    fn ensure(&mut self, v: NodeId) {
        let need = v as usize + 1;
        if self.depth.len() < need {
            let n = need.max(self.depth.len() * 2);
            self.prev.resize(n, NIL);
            self.next.resize(n, NIL);
            self.depth.resize(n, 0);
        }
    }

    /// Appends `v` to the tail of bucket `d`. Depth-one nodes are ignored.
    pub fn insert(&mut self, v: NodeId, d: usize) {
        if d < 2 {
            return;
        }
        self.ensure(v);
        debug_assert_eq!(self.depth[v as usize], 0, "node {v} bucketed twice");
        let t = self.tail[d];
        self.prev[v as usize] = t;
        self.next[v as usize] = NIL;
        if t == NIL {
            self.head[d] = v;
        } else {
            self.next[t as usize] = v;
        }
        self.tail[d] = v;
        self.depth[v as usize] = d as u32;
        self.cursor = self.cursor.max(d);
        self.count += 1;
    }

    /// Unlinks `v`; returns whether it was present.
    pub fn remove(&mut self, v: NodeId) -> bool {
        if !self.contains(v) {
            return false;
        }
        let d = self.depth[v as usize] as usize;
        let (p, n) = (self.prev[v as usize], self.next[v as usize]);
        if p == NIL {
            self.head[d] = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail[d] = p;
        } else {
            self.prev[n as usize] = p;
        }
        self.depth[v as usize] = 0;
        self.count -= 1;
        true
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.depth.get(v as usize).is_some_and(|&d| d != 0)
    }

    /// Deepest non-empty bucket, or `None` when every bucket is empty.
    pub fn max_depth(&mut self) -> Option<usize> {
        while self.cursor >= 2 && self.head[self.cursor] == NIL {
            self.cursor -= 1;
        }
        (self.cursor >= 2).then_some(self.cursor)
    }

    /// Nodes of bucket `d` in list order.
    pub fn nodes(&self, d: usize) -> impl Iterator<Item = NodeId> + '_ {
        let mut v = self.head.get(d).copied().unwrap_or(NIL);
        std::iter::from_fn(move || {
            (v != NIL).then(|| {
                let cur = v;
                v = self.next[v as usize];
                cur
            })
        })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Partition of an LR's occurrences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OccurrenceReport {
    pub lr_length: usize,
    pub leftmost: usize,
    pub type1: Option<usize>,
    /// End of the Type-1 occurrence if there is one, else of the leftmost.
    pub e: usize,
    pub type2: Option<usize>,
    /// Type-3 occurrences in the order they were selected.
    pub type3: Vec<usize>,
    pub type4: Vec<usize>,
}

impl OccurrenceReport {
    /// Number of Type-2 and Type-3 occurrences.
    pub fn s(&self) -> usize {
        self.type2.is_some() as usize + self.type3.len()
    }

    /// Occurrences to replace, in processing order.
    pub fn replaced(&self) -> Vec<(usize, OccType)> {
        let mut out = Vec::with_capacity(2 + self.type3.len());
        out.extend(self.type1.map(|p| (p, OccType::T1)));
        out.extend(self.type2.map(|p| (p, OccType::T2)));
        out.extend(self.type3.iter().map(|&p| (p, OccType::T3)));
        out
    }

    /// The mark left at a replaced occurrence of the given type.
    pub fn mark(&self, p: usize, kind: OccType, step: u32) -> Mark {
        let value = match kind {
            OccType::T1 => p - self.leftmost,
            OccType::T2 | OccType::T3 => self.leftmost,
        };
        Mark { kind, value, len: self.lr_length, step }
    }
}

/// Leftmost occurrence, Type 1 and `e` from an unsorted occurrence list.
/// Shared by every classifier.
pub(crate) fn head_of(occ: &[usize], len: usize) -> Result<(usize, Option<usize>, usize), ContractError> {
    if occ.len() < 2 {
        return Err(ContractError::TooFewOccurrences(occ.len()));
    }
    let l = *occ.iter().min().unwrap();
    let second = occ.iter().copied().filter(|&p| p != l).min().unwrap();
    let type1 = (second <= l + len - 1).then_some(second);
    let e = type1.unwrap_or(l) + len - 1;
    Ok((l, type1, e))
}

/// Full classification with left-greedy Type-3 selection.
pub fn classify(leaf_ids: &[usize], len: usize) -> Result<OccurrenceReport, ContractError> {
    let (leftmost, type1, e) = head_of(leaf_ids, len)?;
    let mut sorted = leaf_ids.to_vec();
    sorted.sort_unstable();
    let mut greedy = Vec::new();
    let mut type4 = Vec::new();
    let mut end = e;
    for &p in &sorted {
        if p == leftmost || Some(p) == type1 {
            continue;
        }
        if p > end {
            greedy.push(p);
            end = p + len - 1;
        } else {
            type4.push(p);
        }
    }
    let (type2, type3) = if greedy.len() == 1 { (Some(greedy[0]), Vec::new()) } else { (None, greedy) };
    Ok(OccurrenceReport { lr_length: len, leftmost, type1, e, type2, type3, type4 })
}

/// Chooses which occurrences of a selected LR get replaced.
pub trait OccurrenceSelector {
    /// `occ` lists the LR's occurrences in the order of the node's children.
    fn classify(&self, occ: &[usize], len: usize) -> Result<OccurrenceReport, ContractError>;
    fn mode(&self) -> Mode;
}

/// The full method: Type 3 is the left-greedy set.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeftGreedy;

impl OccurrenceSelector for LeftGreedy {
    fn classify(&self, occ: &[usize], len: usize) -> Result<OccurrenceReport, ContractError> {
        classify(occ, len)
    }

    fn mode(&self) -> Mode {
        Mode::Full
    }
}

/// One compression step as reported in traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub k: u32,
    #[serde(serialize_with = "crate::trace::serialize_symbols")]
    pub lr: Vec<Symbol>,
    pub len: usize,
    /// Replaced positions in increasing order.
    pub replaced: Vec<(usize, OccType)>,
    #[serde(skip)]
    pub report: OccurrenceReport,
}

/// Incremental compressor state. Drive it with [`step`](Self::step) to
/// inspect the tree between steps, or call [`run`](Self::run).
#[derive(Debug, Clone)]
pub struct Compressor<S: OccurrenceSelector = LeftGreedy> {
    w: WorkingString,
    tree: SuffixTree,
    buckets: DepthBuckets,
    selector: S,
    tiebreak: TieBreak,
    marks: Vec<Option<Mark>>,
    input_len: usize,
    trace: Vec<StepRecord>,
    /// Per depth, candidates keyed by their smallest leaf child. Entries go
    /// stale as the tree changes and are checked when popped.
    by_first: Vec<BinaryHeap<Reverse<(usize, NodeId)>>>,
    /// Key of the latest heap entry per node; a touched node is re-pushed
    /// only when its key drops below this.
    pushed: Vec<usize>,
    /// Largest number of edges walked by suffix-link descents in one
    /// affected zone, with the LR length of that step.
    zone_walk_peak: (usize, usize),
}

impl Compressor<LeftGreedy> {
    pub fn new(input: &[u8], tiebreak: TieBreak) -> Self {
        Self::with_selector(input, LeftGreedy, tiebreak)
    }
}

impl<S: OccurrenceSelector> Compressor<S> {
    pub fn with_selector(input: &[u8], selector: S, tiebreak: TieBreak) -> Self {
        let w = WorkingString::from_bytes(input);
        let tree = SuffixTree::build(&w);
        let buckets = DepthBuckets::init(&tree);
        let mut c = Compressor {
            marks: vec![None; w.len() + 1],
            by_first: Vec::new(),
            pushed: Vec::new(),
            w,
            tree,
            buckets,
            selector,
            tiebreak,
            input_len: input.len(),
            trace: Vec::new(),
            zone_walk_peak: (0, 0),
        };
        if tiebreak == TieBreak::Leftmost {
            c.by_first = (0..=c.tree.leaf_count()).map(|_| BinaryHeap::new()).collect();
            for v in 0..c.tree.id_bound() as NodeId {
                c.push_first(v);
            }
        }
        c
    }

    /// Smallest leaf child of `v`.
    fn first_leaf(&self, v: NodeId) -> usize {
        self.tree.children(v).iter().filter_map(|e| self.tree.leaf_id(e.1)).min().unwrap_or(usize::MAX)
    }

    fn push_first(&mut self, v: NodeId) {
        if !self.buckets.contains(v) {
            return;
        }
        let key = self.first_leaf(v);
        let i = v as usize;
        if i >= self.pushed.len() {
            self.pushed.resize((i + 1).max(2 * self.pushed.len()), usize::MAX);
        }
        if key < self.pushed[i] {
            self.pushed[i] = key;
            self.by_first[self.tree.depth(v).unwrap()].push(Reverse((key, v)));
        }
    }

    pub fn tree(&self) -> &SuffixTree {
        &self.tree
    }

    pub fn working(&self) -> &WorkingString {
        &self.w
    }

    pub fn buckets(&self) -> &DepthBuckets {
        &self.buckets
    }

    pub fn mode(&self) -> Mode {
        self.selector.mode()
    }

    pub fn trace(&self) -> &[StepRecord] {
        &self.trace
    }

    pub fn zone_walk_peak(&self) -> (usize, usize) {
        self.zone_walk_peak
    }

    /// Picks the next LR node and takes it out of its bucket.
    pub fn select_lr(&mut self) -> Option<NodeId> {
        let d = self.buckets.max_depth()?;
        let v = match self.tiebreak {
            TieBreak::BucketOrder => self.buckets.nodes(d).next()?,
            TieBreak::Leftmost => loop {
                let Reverse((key, v)) = self.by_first[d].pop().expect("every bucketed node has a heap entry");
                if !self.buckets.contains(v) {
                    continue;
                }
                let now = self.first_leaf(v);
                if now == key {
                    break v;
                }
                // Only keys that grew are stale here; decreases were pushed
                // when they happened.
                self.pushed[v as usize] = now;
                self.by_first[d].push(Reverse((now, v)));
            },
        };
        self.buckets.remove(v);
        Some(v)
    }

    /// Performs one step; `None` once no repeat of length ≥ 2 is left.
    pub fn step(&mut self) -> Result<Option<&StepRecord>, ContractError> {
        let Some(v) = self.select_lr() else { return Ok(None) };
        let len = self.tree.depth(v).unwrap();
        let mut occ = Vec::with_capacity(self.tree.children(v).len());
        for &(_, c) in self.tree.children(v) {
            // An LR node has only leaf children.
            occ.push(self.tree.leaf_id(c).ok_or(ContractError::InternalChild(c))?);
        }
        let report = self.selector.classify(&occ, len)?;
        let lr = self.tree.path(&self.w, v);
        let k = self.trace.len() as u32 + 1;
        let order = report.replaced();
        for &(p, kind) in &order {
            self.replace(p, len, k)?;
            self.marks[p] = Some(report.mark(p, kind, k));
        }
        let mut replaced = order;
        replaced.sort_unstable();
        self.trace.push(StepRecord { k, lr, len, replaced, report });
        Ok(self.trace.last())
    }

    pub fn run(&mut self) -> Result<(), ContractError> {
        while self.step()?.is_some() {}
        Ok(())
    }

    /// Runs to completion and assembles the encoding.
    pub fn finish(mut self) -> Result<(Encoding, Vec<StepRecord>), ContractError> {
        self.run()?;
        let enc = assemble(&self.w, &self.marks, self.input_len);
        Ok((enc, self.trace))
    }

    fn note(&mut self, s: Surgery) {
        if let Some(m) = s.created {
            if let Some(d) = self.tree.depth(m) {
                self.buckets.insert(m, d);
            }
        }
        if let Some(u) = s.spliced {
            self.buckets.remove(u);
        }
        let touched = self.tree.take_touched();
        if self.tiebreak == TieBreak::Leftmost {
            for v in s.created.into_iter().chain(touched) {
                self.push_first(v);
            }
        }
    }

    /// Replaces the occurrence at `i` and repairs the tree.
    fn replace(&mut self, i: usize, len: usize, k: u32) -> Result<(), ContractError> {
        let hash = Symbol::Hash(k);
        let x1 = self.w.get(i);
        self.w.replace_occurrence(i, len, k)?;

        // Classify the zone on the tree as it was before the replacement.
        // Moving outwards from `i`, the leaves first hang below the locus of
        // their prefix before `i` (those must be redirected), then possibly
        // right at it (only their edge key changes), and from then on above.
        let mut redirect: Vec<usize> = Vec::new();
        let mut rekey: Vec<usize> = Vec::new();
        let mut p = i;
        for l in 1..=len {
            p = self.w.prev_live(p);
            if p == 0 {
                break;
            }
            let leaf = self.tree.leaf_node(p).ok_or(ContractError::UnknownLeaf(p))?;
            let d = self.tree.depth(self.tree.parent(leaf).unwrap()).unwrap();
            if d > l && rekey.is_empty() {
                redirect.push(p);
            } else if d == l {
                rekey.push(p);
            } else {
                break;
            }
        }
        for &p in &rekey {
            self.tree.rekey_leaf(p, hash)?;
        }
        if !redirect.is_empty() {
            self.redirect_zone(i, &redirect, hash, x1, len)?;
        }

        let s = self.tree.attach_replaced(&self.w, i, hash)?;
        self.note(s);
        let end = (i + len - 1).min(self.w.len());
        for p in i + 1..=end {
            let spliced = self.tree.remove_leaf(p)?;
            self.note(Surgery { created: None, spliced });
        }
        Ok(())
    }

    /// Re-hangs the leaves `i - l` for `l = |y'|, ..., 1` (where `y'` is the
    /// longest zone suffix that still needs surgery) at the locus of the
    /// `l` symbols before `i`, walking from one locus to the next by suffix
    /// links.
    fn redirect_zone(
        &mut self,
        i: usize,
        zone: &[usize],
        hash: Symbol,
        x1: Symbol,
        len: usize,
    ) -> Result<(), ContractError> {
        let top = zone.len();
        // Redirected suffixes never contain a hash, so the zone is contiguous.
        let ys: Vec<Symbol> = self.w.slice(i - top, i - 1).to_vec();
        let mut locus = self.tree.descend(ROOT, &ys)?.locus;
        let mut pending: Option<NodeId> = None;
        let mut walked = 0usize;
        for l in (1..=top).rev() {
            let leaf = self.tree.leaf_node(i - l).ok_or(ContractError::UnknownLeaf(i - l))?;
            let split_parent = match locus {
                Locus::Node(_) => None,
                Locus::Edge { parent, .. } => Some(parent),
            };
            let s = self.tree.hang_leaf(leaf, locus, hash, x1)?;
            let target = match (s.created, locus) {
                (Some(m), _) => m,
                (None, Locus::Node(u)) => u,
                (None, Locus::Edge { .. }) => unreachable!("edge loci are always split"),
            };
            if let Some(m) = pending {
                self.tree.set_slink(m, target);
            }
            pending = s.created;
            self.note(s);
            if l == 1 {
                break;
            }
            let next = &ys[top - l + 1..];
            locus = match split_parent {
                // The target existed: its suffix link leads straight to the
                // next locus.
                None => Locus::Node(self.tree.slink(target).ok_or(ContractError::NoSuffixLink(target))?),
                // The target was created: go through the link of the edge's
                // upper end and count down.
                Some(ROOT) => {
                    let d = self.tree.descend(ROOT, next)?;
                    walked += d.edges;
                    d.locus
                }
                Some(u) => {
                    let d = self.tree.slink_descend(u, next)?;
                    walked += d.edges;
                    d.locus
                }
            };
        }
        if let Some(m) = pending {
            self.tree.set_slink(m, ROOT);
        }
        debug_assert!(walked <= 2 * len, "zone walk of {walked} edges for len {len}");
        if walked * self.zone_walk_peak.1.max(1) > self.zone_walk_peak.0 * len {
            self.zone_walk_peak = (walked, len);
        }
        Ok(())
    }

    /// Internal nodes of depth ≥ 2 whose path contains a hash. Empty on a
    /// correct run.
    pub fn hashed_deep_nodes(&self) -> Vec<NodeId> {
        self.tree
            .internal_nodes()
            .filter(|&v| self.tree.depth(v).unwrap() >= 2)
            .filter(|&v| self.tree.path(&self.w, v).iter().any(|s| s.is_hash()))
            .collect()
    }

    /// Checks that the buckets hold exactly the live internal nodes of depth
    /// ≥ 2, apart from `exempt` (a node selected but not yet spliced).
    pub fn buckets_consistent(&self, exempt: Option<NodeId>) -> bool {
        let live: BTreeSet<NodeId> = self
            .tree
            .internal_nodes()
            .filter(|&v| self.tree.depth(v).unwrap() >= 2 && Some(v) != exempt)
            .collect();
        let mut bucketed = BTreeSet::new();
        for d in 2..self.buckets.head.len() {
            for v in self.buckets.nodes(d) {
                if self.tree.depth(v) != Some(d) || !bucketed.insert(v) {
                    return false;
                }
            }
        }
        live == bucketed
    }
}

/// Compresses `input` with the full method.
pub fn compress(input: &[u8], tiebreak: TieBreak) -> (Encoding, Vec<StepRecord>) {
    Compressor::new(input, tiebreak).finish().expect("compressor invariant violated")
}
