//! Involutive labeled pointed digraphs stored through their positive part.
//!
//! Only positively labeled arcs are stored; traversing an arc backwards reads
//! the inverse letter. Vertex and arc identifiers are dense non-negative
//! integers; deletions leave holes until [`Automaton::canonicalize`]
//! renumbers everything in BFS order.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::words::{free_reduce, Alphabet, Letter, Word};
use crate::{Error, Result};

/// Index of a vertex. Dense but possibly with holes after deletions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VertexId(pub usize);

/// Index of a positive arc.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ArcId(pub usize);

/// A positive arc `src --letter--> dst` with a 0-based generator index.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Arc {
    pub src: VertexId,
    pub dst: VertexId,
    pub letter: usize,
}

/// One directed crossing of a stored arc: forward reads the positive letter,
/// backward reads its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Traversal {
    pub arc: ArcId,
    pub back: bool,
}

impl Traversal {
    pub fn forward(arc: ArcId) -> Self {
        Traversal { arc, back: false }
    }

    pub fn backward(arc: ArcId) -> Self {
        Traversal { arc, back: true }
    }

    /// The same arc crossed the other way.
    pub fn reversed(self) -> Self {
        Traversal {
            arc: self.arc,
            back: !self.back,
        }
    }
}

/// A walk: a start vertex and a sequence of arc traversals, consecutive
/// steps incident.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub start: VertexId,
    pub steps: Vec<Traversal>,
}

impl Walk {
    pub fn trivial(at: VertexId) -> Self {
        Walk {
            start: at,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Removes backtracking (a traversal immediately followed by its
    /// reverse) until none remains.
    pub fn reduced(self) -> Walk {
        let mut stack: Vec<Traversal> = Vec::with_capacity(self.steps.len());
        for t in self.steps {
            if stack.last() == Some(&t.reversed()) {
                stack.pop();
            } else {
                stack.push(t);
            }
        }
        Walk {
            start: self.start,
            steps: stack,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Automaton {
    alphabet: Alphabet,
    alive: Vec<bool>,
    arcs: Vec<Option<Arc>>,
    incidence: Vec<Vec<Traversal>>,
    basepoint: VertexId,
    vertex_count: usize,
    arc_count: usize,
}

impl Automaton {
    /// A single basepoint vertex and no arcs.
    pub fn new(alphabet: Alphabet) -> Self {
        Automaton {
            alphabet,
            alive: vec![true],
            arcs: Vec::new(),
            incidence: vec![Vec::new()],
            basepoint: VertexId(0),
            vertex_count: 1,
            arc_count: 0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    pub fn set_basepoint(&mut self, v: VertexId) -> Result<()> {
        if !self.contains_vertex(v) {
            return Err(Error::NoSuchVertex(v.0));
        }
        self.basepoint = v;
        Ok(())
    }

    /// The same automaton pointed at `v`.
    pub fn rebased(&self, v: VertexId) -> Result<Automaton> {
        let mut out = self.clone();
        out.set_basepoint(v)?;
        Ok(out)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_count
    }

    pub fn num_arcs(&self) -> usize {
        self.arc_count
    }

    /// True when every vertex has been pruned away (possible only for strict
    /// cores of forests). The basepoint is meaningless in that case.
    pub fn is_empty(&self) -> bool {
        self.vertex_count == 0
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.0 < self.alive.len() && self.alive[v.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| VertexId(i))
    }

    pub fn arc(&self, id: ArcId) -> Option<Arc> {
        self.arcs.get(id.0).copied().flatten()
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_some())
            .map(|(i, _)| ArcId(i))
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.alive.push(true);
        self.incidence.push(Vec::new());
        self.vertex_count += 1;
        VertexId(self.alive.len() - 1)
    }

    /// Adds a positive arc; `letter` is a 0-based generator index.
    pub fn add_arc(&mut self, src: VertexId, dst: VertexId, letter: usize) -> ArcId {
        debug_assert!(self.contains_vertex(src) && self.contains_vertex(dst));
        debug_assert!(letter < self.alphabet.rank());
        let id = ArcId(self.arcs.len());
        self.arcs.push(Some(Arc { src, dst, letter }));
        self.incidence[src.0].push(Traversal::forward(id));
        self.incidence[dst.0].push(Traversal::backward(id));
        self.arc_count += 1;
        id
    }

    pub fn remove_arc(&mut self, id: ArcId) {
        let arc = self.arcs[id.0].take().expect("arc already removed");
        self.incidence[arc.src.0].retain(|t| t.arc != id);
        if arc.dst != arc.src {
            self.incidence[arc.dst.0].retain(|t| t.arc != id);
        }
        self.arc_count -= 1;
    }

    /// Removes an isolated vertex.
    fn remove_vertex(&mut self, v: VertexId) {
        debug_assert!(self.incidence[v.0].is_empty());
        self.alive[v.0] = false;
        self.vertex_count -= 1;
    }

    /// Re-attaches every arc endpoint at `absorbed` to `survivor` and deletes
    /// `absorbed`. The basepoint follows if it was absorbed.
    pub fn merge_vertices(&mut self, survivor: VertexId, absorbed: VertexId) {
        debug_assert_ne!(survivor, absorbed);
        let moved = std::mem::take(&mut self.incidence[absorbed.0]);
        for t in moved {
            let arc = self.arcs[t.arc.0].as_mut().expect("dangling incidence");
            if t.back {
                arc.dst = survivor;
            } else {
                arc.src = survivor;
            }
            self.incidence[survivor.0].push(t);
        }
        if self.basepoint == absorbed {
            self.basepoint = survivor;
        }
        self.alive[absorbed.0] = false;
        self.vertex_count -= 1;
    }

    /// Outgoing traversals at `v` (each loop contributes one forward and one
    /// backward entry).
    pub fn traversals_at(&self, v: VertexId) -> &[Traversal] {
        &self.incidence[v.0]
    }

    /// Undirected degree: number of incident arc endpoints (a loop counts
    /// twice).
    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.0].len()
    }

    /// Signed letter read by a traversal.
    pub fn traversal_letter(&self, t: Traversal) -> Letter {
        let arc = self.arcs[t.arc.0].expect("dangling traversal");
        if t.back {
            Letter::negative(arc.letter)
        } else {
            Letter::positive(arc.letter)
        }
    }

    /// Source of a traversal as a step out of a vertex.
    pub fn traversal_src(&self, t: Traversal) -> VertexId {
        let arc = self.arcs[t.arc.0].expect("dangling traversal");
        if t.back {
            arc.dst
        } else {
            arc.src
        }
    }

    /// Target of a traversal.
    pub fn traversal_dst(&self, t: Traversal) -> VertexId {
        let arc = self.arcs[t.arc.0].expect("dangling traversal");
        if t.back {
            arc.src
        } else {
            arc.dst
        }
    }

    /// All traversals out of `v` reading the signed letter `l`, sorted by
    /// arc id.
    pub fn steps(&self, v: VertexId, l: Letter) -> Vec<Traversal> {
        let mut out: Vec<Traversal> = self.incidence[v.0]
            .iter()
            .copied()
            .filter(|&t| self.traversal_letter(t) == l)
            .collect();
        out.sort_by_key(|t| (t.arc, t.back));
        out
    }

    /// The unique step out of `v` reading `l`, if any. Meaningful on
    /// deterministic automata; picks the smallest arc id otherwise.
    pub fn step(&self, v: VertexId, l: Letter) -> Option<Traversal> {
        self.steps(v, l).into_iter().next()
    }

    /// First pair of distinct traversals out of a common vertex reading the
    /// same signed letter, in the canonical order (vertex id, letter, arc
    /// id); `None` iff deterministic.
    pub fn deterministic_violation(&self) -> Option<(VertexId, Letter, Traversal, Traversal)> {
        self.vertices().find_map(|v| self.violation_at(v))
    }

    /// Like [`Automaton::deterministic_violation`] restricted to one vertex.
    pub fn violation_at(&self, v: VertexId) -> Option<(VertexId, Letter, Traversal, Traversal)> {
        for l in self.alphabet.letters() {
            let ts = self.steps(v, l);
            if ts.len() >= 2 {
                return Some((v, l, ts[0], ts[1]));
            }
        }
        None
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic_violation().is_none()
    }

    /// Number of vertices with no outgoing arc reading the signed letter.
    pub fn deficiency(&self, l: Letter) -> usize {
        self.vertices()
            .filter(|&v| self.step(v, l).is_none())
            .count()
    }

    /// Every vertex has an outgoing arc for every signed letter.
    pub fn is_saturated(&self) -> bool {
        self.alphabet.letters().all(|l| self.deficiency(l) == 0)
    }

    /// First `(vertex, letter)` with no outgoing arc, in canonical order.
    pub fn deficient_pair(&self) -> Option<(VertexId, Letter)> {
        for v in self.vertices() {
            for l in self.alphabet.letters() {
                if self.step(v, l).is_none() {
                    return Some((v, l));
                }
            }
        }
        None
    }

    /// Follows the unique walk spelling `w` from `start`; `Ok(end)` or
    /// `Err(position)` of the first unreadable letter.
    pub fn read(&self, start: VertexId, w: &Word) -> std::result::Result<VertexId, usize> {
        let mut cur = start;
        for (i, &l) in w.letters().iter().enumerate() {
            match self.step(cur, l) {
                Some(t) => cur = self.traversal_dst(t),
                None => return Err(i),
            }
        }
        Ok(cur)
    }

    /// Like [`Automaton::read`] but returns the walk taken.
    pub fn read_walk(&self, start: VertexId, w: &Word) -> std::result::Result<Walk, usize> {
        let mut walk = Walk::trivial(start);
        let mut cur = start;
        for (i, &l) in w.letters().iter().enumerate() {
            match self.step(cur, l) {
                Some(t) => {
                    cur = self.traversal_dst(t);
                    walk.steps.push(t);
                }
                None => return Err(i),
            }
        }
        Ok(walk)
    }

    /// Label of a walk (unreduced).
    pub fn walk_label(&self, walk: &Walk) -> Word {
        Word::from_letters(
            walk.steps
                .iter()
                .map(|&t| self.traversal_letter(t))
                .collect(),
        )
    }

    /// End vertex of a walk.
    pub fn walk_end(&self, walk: &Walk) -> VertexId {
        walk.steps
            .last()
            .map_or(walk.start, |&t| self.traversal_dst(t))
    }

    /// Checks incidence of consecutive steps.
    pub fn walk_is_valid(&self, walk: &Walk) -> bool {
        let mut cur = walk.start;
        if !self.contains_vertex(cur) {
            return false;
        }
        for &t in &walk.steps {
            if self.arcs.get(t.arc.0).copied().flatten().is_none() || self.traversal_src(t) != cur
            {
                return false;
            }
            cur = self.traversal_dst(t);
        }
        true
    }

    /// Vertices reachable from `start`.
    fn reachable(&self, start: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.alive.len()];
        if !self.contains_vertex(start) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen[start.0] = true;
        while let Some(v) = queue.pop_front() {
            for &t in &self.incidence[v.0] {
                let w = self.traversal_dst(t);
                if !seen[w.0] {
                    seen[w.0] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let start = self.vertices().next().unwrap();
        let seen = self.reachable(start);
        self.vertices().all(|v| seen[v.0])
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut assigned = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for v in self.vertices() {
            if assigned[v.0] {
                continue;
            }
            let seen = self.reachable(v);
            let comp: Vec<VertexId> = self.vertices().filter(|u| seen[u.0]).collect();
            for u in &comp {
                assigned[u.0] = true;
            }
            out.push(comp);
        }
        out
    }

    /// `1 - #V + #E⁺` for a connected automaton.
    pub fn rank(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        if self.is_empty() {
            return Ok(0);
        }
        Ok(1 + self.arc_count - self.vertex_count)
    }

    /// Prunes everything not lying on a reduced closed basepoint walk:
    /// restricts to the basepoint component, then repeatedly eliminates
    /// non-basepoint vertices of degree at most one.
    pub fn core(&self) -> Automaton {
        let mut out = self.clone();
        let seen = out.reachable(out.basepoint);
        let unreachable: Vec<VertexId> = out.vertices().filter(|v| !seen[v.0]).collect();
        for v in unreachable {
            let ts: Vec<Traversal> = out.incidence[v.0].clone();
            for t in ts {
                if out.arcs[t.arc.0].is_some() {
                    out.remove_arc(t.arc);
                }
            }
            out.remove_vertex(v);
        }
        out.prune_leaves(Some(out.basepoint));
        out
    }

    /// Prunes every hanging tree: repeatedly eliminates vertices of degree at
    /// most one, basepoint included. Empty exactly for forests. If the
    /// basepoint is pruned it moves to the smallest surviving vertex.
    pub fn strict_core(&self) -> Automaton {
        let mut out = self.clone();
        out.prune_leaves(None);
        if !out.is_empty() && !out.contains_vertex(out.basepoint) {
            let first = out.vertices().next().unwrap();
            out.basepoint = first;
        }
        out
    }

    fn prune_leaves(&mut self, keep: Option<VertexId>) {
        let mut queue: VecDeque<VertexId> = self
            .vertices()
            .filter(|&v| Some(v) != keep && self.degree(v) <= 1)
            .collect();
        while let Some(v) = queue.pop_front() {
            if !self.contains_vertex(v) || Some(v) == keep || self.degree(v) > 1 {
                continue;
            }
            if let Some(&t) = self.incidence[v.0].first() {
                let other = self.traversal_dst(t);
                self.remove_arc(t.arc);
                if other != v && Some(other) != keep && self.degree(other) <= 1 {
                    queue.push_back(other);
                }
            }
            self.remove_vertex(v);
        }
    }

    /// Breadth-first spanning tree rooted at the basepoint, exploring
    /// letters in canonical order. Fails if the automaton is not connected.
    pub fn spanning_tree(&self) -> Result<SpanningTree> {
        self.spanning_tree_from(self.basepoint)
    }

    /// BFS tree rooted at an arbitrary vertex.
    pub fn spanning_tree_from(&self, root: VertexId) -> Result<SpanningTree> {
        if !self.contains_vertex(root) {
            return Err(Error::NoSuchVertex(root.0));
        }
        let mut parent: Vec<Option<(VertexId, Traversal)>> = vec![None; self.alive.len()];
        let mut order = vec![root];
        let mut seen = vec![false; self.alive.len()];
        seen[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for l in self.alphabet.letters() {
                for t in self.steps(v, l) {
                    let w = self.traversal_dst(t);
                    if !seen[w.0] {
                        seen[w.0] = true;
                        parent[w.0] = Some((v, t));
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        if order.len() != self.vertex_count {
            return Err(Error::NotConnected);
        }
        Ok(SpanningTree {
            root,
            order,
            parent,
        })
    }

    /// Words labeling the `T`-petals of the positive arcs outside the
    /// spanning tree; a free basis of the recognized subgroup when `self`
    /// is reduced.
    pub fn basis_from_tree(&self, tree: &SpanningTree) -> Result<Vec<Word>> {
        if tree.root != self.basepoint || tree.order.len() != self.vertex_count {
            return Err(Error::InvalidTree);
        }
        let tree_arcs = tree.arc_set();
        let mut basis = Vec::new();
        for id in self.arc_ids() {
            if tree_arcs.contains(&id) {
                continue;
            }
            let arc = self.arc(id).unwrap();
            let mut letters = tree.path_word(self, arc.src)?.letters().to_vec();
            letters.push(Letter::positive(arc.letter));
            letters.extend(
                tree.path_word(self, arc.dst)?
                    .inverse()
                    .letters()
                    .iter()
                    .copied(),
            );
            basis.push(free_reduce(&Word::from_letters(letters)));
        }
        Ok(basis)
    }

    /// Reads `w` from the basepoint as far as possible, then grafts a fresh
    /// path spelling the unreadable suffix. Returns the vertex where the
    /// full reading of `w` now ends. Preserves determinism for reduced `w`.
    pub fn graft_thread(&mut self, w: &Word) -> VertexId {
        let mut cur = self.basepoint();
        for &l in w.letters() {
            match self.step(cur, l) {
                Some(t) => cur = self.traversal_dst(t),
                None => {
                    let next = self.add_vertex();
                    if l.is_positive() {
                        self.add_arc(cur, next, l.index());
                    } else {
                        self.add_arc(next, cur, l.index());
                    }
                    cur = next;
                }
            }
        }
        cur
    }

    /// Attaches a petal reading `w` as a closed walk at `at`, with fresh
    /// interior vertices.
    pub fn attach_petal(&mut self, at: VertexId, w: &Word) {
        debug_assert!(!w.is_empty());
        let mut cur = at;
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == w.len() { at } else { self.add_vertex() };
            if l.is_positive() {
                self.add_arc(cur, next, l.index());
            } else {
                self.add_arc(next, cur, l.index());
            }
            cur = next;
        }
    }

    /// Quotient by a vertex partition: vertices become blocks, arcs are
    /// re-attached, the basepoint becomes its block. Generally
    /// nondeterministic.
    pub fn quotient(&self, blocks: &[Vec<VertexId>]) -> Result<Automaton> {
        let mut block_of: HashMap<VertexId, usize> = HashMap::new();
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition);
            }
            for &v in block {
                if !self.contains_vertex(v) || block_of.insert(v, i).is_some() {
                    return Err(Error::InvalidPartition);
                }
            }
        }
        if block_of.len() != self.vertex_count {
            return Err(Error::InvalidPartition);
        }
        let mut out = Automaton::new(self.alphabet.clone());
        for _ in 1..blocks.len() {
            out.add_vertex();
        }
        out.basepoint = VertexId(block_of[&self.basepoint]);
        for id in self.arc_ids() {
            let arc = self.arc(id).unwrap();
            out.add_arc(
                VertexId(block_of[&arc.src]),
                VertexId(block_of[&arc.dst]),
                arc.letter,
            );
        }
        Ok(out)
    }

    /// Label- and basepoint-preserving isomorphism onto `other`, when one
    /// exists. Both automata must be deterministic and connected; the map is
    /// then unique.
    pub fn iso_rooted(&self, other: &Automaton) -> Option<HashMap<VertexId, VertexId>> {
        self.try_iso(self.basepoint, other, other.basepoint)
    }

    /// Label-preserving isomorphism ignoring basepoints: anchors this
    /// automaton's basepoint on each vertex of `other` in ascending id order
    /// and returns the first success.
    pub fn iso_unrooted(&self, other: &Automaton) -> Option<(VertexId, HashMap<VertexId, VertexId>)> {
        if self.is_empty() && other.is_empty() {
            return Some((VertexId(0), HashMap::new()));
        }
        if self.is_empty() || other.is_empty() {
            return None;
        }
        other
            .vertices()
            .find_map(|anchor| self.try_iso(self.basepoint, other, anchor).map(|m| (anchor, m)))
    }

    /// Label-preserving isomorphism sending this automaton's basepoint to
    /// `anchor` in `other`, if one exists.
    pub fn iso_anchored(
        &self,
        other: &Automaton,
        anchor: VertexId,
    ) -> Option<HashMap<VertexId, VertexId>> {
        self.try_iso(self.basepoint, other, anchor)
    }

    fn try_iso(
        &self,
        root1: VertexId,
        other: &Automaton,
        root2: VertexId,
    ) -> Option<HashMap<VertexId, VertexId>> {
        if self.alphabet != other.alphabet
            || self.vertex_count != other.vertex_count
            || self.arc_count != other.arc_count
        {
            return None;
        }
        if self.is_empty() {
            return Some(HashMap::new());
        }
        let mut map: HashMap<VertexId, VertexId> = HashMap::new();
        map.insert(root1, root2);
        let mut queue = VecDeque::from([root1]);
        while let Some(v) = queue.pop_front() {
            let w = map[&v];
            for l in self.alphabet.letters() {
                let here = self.steps(v, l);
                let there = other.steps(w, l);
                if here.len() != there.len() {
                    return None;
                }
                if here.len() > 1 {
                    // Only deterministic automata are supported.
                    return None;
                }
                if let (Some(&t1), Some(&t2)) = (here.first(), there.first()) {
                    let d1 = self.traversal_dst(t1);
                    let d2 = other.traversal_dst(t2);
                    match map.get(&d1) {
                        Some(&prev) if prev != d2 => return None,
                        Some(_) => {}
                        None => {
                            map.insert(d1, d2);
                            queue.push_back(d1);
                        }
                    }
                }
            }
        }
        if map.len() != self.vertex_count {
            return None; // not connected
        }
        // Arc counts match and every arc of self maps onto an arc of other,
        // so the map is an isomorphism.
        for id in self.arc_ids() {
            let arc = self.arc(id).unwrap();
            let t = other.step(map[&arc.src], Letter::positive(arc.letter))?;
            if other.traversal_dst(t) != map[&arc.dst] {
                return None;
            }
        }
        Some(map)
    }

    /// Renumbers vertices in BFS discovery order (basepoint first, letters
    /// in canonical order) and arcs by `(src, letter, dst)`. Two reduced
    /// automata recognize the same subgroup iff their canonical forms are
    /// structurally equal.
    pub fn canonicalize(&self) -> Result<Automaton> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let tree = self.spanning_tree()?;
        let mut renumber: HashMap<VertexId, usize> = HashMap::new();
        for (i, &v) in tree.order.iter().enumerate() {
            renumber.insert(v, i);
        }
        let mut out = Automaton::new(self.alphabet.clone());
        for _ in 1..self.vertex_count {
            out.add_vertex();
        }
        let mut arcs: Vec<(usize, usize, usize, ArcId)> = self
            .arc_ids()
            .map(|id| {
                let arc = self.arc(id).unwrap();
                (renumber[&arc.src], arc.letter, renumber[&arc.dst], id)
            })
            .collect();
        arcs.sort();
        for (src, letter, dst, _) in arcs {
            out.add_arc(VertexId(src), VertexId(dst), letter);
        }
        Ok(out)
    }

    /// Structural key for hashing canonical forms.
    pub fn canonical_key(&self) -> (usize, usize, Vec<(usize, usize, usize)>) {
        let mut arcs: Vec<(usize, usize, usize)> = self
            .arc_ids()
            .map(|id| {
                let a = self.arc(id).unwrap();
                (a.src.0, a.letter, a.dst.0)
            })
            .collect();
        arcs.sort_unstable();
        (self.vertex_count, self.basepoint.0, arcs)
    }

    /// Graphviz DOT rendering: one edge per positive arc, basepoint drawn as
    /// a double circle.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        for v in self.vertices() {
            if v == self.basepoint {
                out.push_str(&format!("  {} [shape=doublecircle];\n", v.0));
            } else {
                out.push_str(&format!("  {} [shape=circle];\n", v.0));
            }
        }
        for id in self.arc_ids() {
            let arc = self.arc(id).unwrap();
            out.push_str(&format!(
                "  {} -> {} [label=\"{}\"];\n",
                arc.src.0,
                arc.dst.0,
                self.alphabet.name(arc.letter)
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonAutomaton {
            alphabet: JsonAlphabet {
                rank: self.alphabet.rank(),
                names: self.alphabet.names().iter().map(|c| c.to_string()).collect(),
            },
            basepoint: self.basepoint.0,
            vertices: self.vertices().map(|v| v.0).collect(),
            arcs: self
                .arc_ids()
                .map(|id| {
                    let a = self.arc(id).unwrap();
                    JsonArc {
                        id: id.0,
                        src: a.src.0,
                        dst: a.dst.0,
                        letter: a.letter + 1,
                    }
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("automaton serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Automaton> {
        let doc: JsonAutomaton = serde_json::from_str(text)?;
        let alphabet = if doc.alphabet.names.is_empty() {
            Alphabet::new(doc.alphabet.rank)?
        } else {
            let names: Vec<char> = doc
                .alphabet
                .names
                .iter()
                .map(|s| {
                    let mut cs = s.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => Ok(c),
                        _ => Err(Error::BadAlphabetNames(format!(
                            "name {s:?} is not a single letter"
                        ))),
                    }
                })
                .collect::<Result<_>>()?;
            let alphabet = Alphabet::with_names(names)?;
            if alphabet.rank() != doc.alphabet.rank {
                return Err(Error::InvalidAutomaton(
                    "rank does not match the number of names".into(),
                ));
            }
            alphabet
        };
        if doc.vertices.is_empty() {
            return Err(Error::InvalidAutomaton("no vertices".into()));
        }
        let max = *doc.vertices.iter().max().unwrap();
        let mut alive = vec![false; max + 1];
        for &v in &doc.vertices {
            if alive[v] {
                return Err(Error::InvalidAutomaton(format!("duplicate vertex {v}")));
            }
            alive[v] = true;
        }
        if !alive.get(doc.basepoint).copied().unwrap_or(false) {
            return Err(Error::InvalidAutomaton("basepoint is not a vertex".into()));
        }
        let mut out = Automaton {
            alphabet,
            incidence: vec![Vec::new(); alive.len()],
            vertex_count: doc.vertices.len(),
            arc_count: 0,
            basepoint: VertexId(doc.basepoint),
            arcs: Vec::new(),
            alive,
        };
        let mut sorted = doc.arcs;
        sorted.sort_by_key(|a| a.id);
        for arc in sorted {
            if arc.id != out.arcs.len() {
                return Err(Error::InvalidAutomaton(format!(
                    "arc ids must be dense and unique, got {}",
                    arc.id
                )));
            }
            if !out.contains_vertex(VertexId(arc.src)) || !out.contains_vertex(VertexId(arc.dst)) {
                return Err(Error::InvalidAutomaton(format!(
                    "arc {} touches a missing vertex",
                    arc.id
                )));
            }
            if arc.letter == 0 || arc.letter > out.alphabet.rank() {
                return Err(Error::InvalidAutomaton(format!(
                    "arc {} letter out of range",
                    arc.id
                )));
            }
            out.add_arc(VertexId(arc.src), VertexId(arc.dst), arc.letter - 1);
        }
        Ok(out)
    }
}

impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.basepoint == other.basepoint
            && self.vertices().eq(other.vertices())
            && self.arc_ids().eq(other.arc_ids())
            && self.arc_ids().all(|id| self.arc(id) == other.arc(id))
    }
}

impl Eq for Automaton {}

impl std::hash::Hash for Automaton {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.alphabet.hash(state);
        self.basepoint.hash(state);
        for v in self.vertices() {
            v.hash(state);
        }
        for id in self.arc_ids() {
            let a = self.arc(id).unwrap();
            (id, a.src, a.dst, a.letter).hash(state);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonAutomaton {
    alphabet: JsonAlphabet,
    basepoint: usize,
    vertices: Vec<usize>,
    arcs: Vec<JsonArc>,
}

#[derive(Serialize, Deserialize)]
struct JsonAlphabet {
    rank: usize,
    #[serde(default)]
    names: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonArc {
    id: usize,
    src: usize,
    dst: usize,
    letter: usize,
}

/// BFS spanning tree rooted at a vertex, with deterministic discovery order.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    root: VertexId,
    order: Vec<VertexId>,
    parent: Vec<Option<(VertexId, Traversal)>>,
}

impl SpanningTree {
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Vertices in BFS discovery order; the root comes first.
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    /// Tree arcs as a set of arc ids.
    pub fn arc_set(&self) -> std::collections::BTreeSet<ArcId> {
        self.parent
            .iter()
            .flatten()
            .map(|(_, t)| t.arc)
            .collect()
    }

    pub fn arcs(&self) -> Vec<ArcId> {
        self.arc_set().into_iter().collect()
    }

    /// The tree walk from the root to `v`.
    pub fn path_walk(&self, aut: &Automaton, v: VertexId) -> Result<Walk> {
        if !aut.contains_vertex(v) {
            return Err(Error::NoSuchVertex(v.0));
        }
        let mut steps = Vec::new();
        let mut cur = v;
        while cur != self.root {
            let (p, t) = self.parent[cur.0].ok_or(Error::InvalidTree)?;
            steps.push(t);
            cur = p;
        }
        steps.reverse();
        Ok(Walk {
            start: self.root,
            steps,
        })
    }

    /// Label of the tree walk from the root to `v` (reduced, as tree walks
    /// in deterministic automata always are).
    pub fn path_word(&self, aut: &Automaton, v: VertexId) -> Result<Word> {
        let walk = self.path_walk(aut, v)?;
        Ok(free_reduce(&aut.walk_label(&walk)))
    }
}

/// One basepoint vertex with a loop per generator; recognizes the whole free
/// group.
pub fn bouquet(alphabet: Alphabet) -> Automaton {
    let mut aut = Automaton::new(alphabet);
    let bp = aut.basepoint();
    for letter in 0..aut.alphabet().rank() {
        aut.add_arc(bp, bp, letter);
    }
    aut
}

/// Flower automaton: one petal per generator, reading it as a closed
/// basepoint walk. Generators should be freely reduced and nonempty.
pub fn flower(generators: &[Word], alphabet: Alphabet) -> Automaton {
    flower_tagged(generators, alphabet).0
}

/// [`flower`] plus, per petal, its arc ids in reading order.
pub fn flower_tagged(generators: &[Word], alphabet: Alphabet) -> (Automaton, Vec<Vec<ArcId>>) {
    let mut aut = Automaton::new(alphabet);
    let bp = aut.basepoint();
    let mut petals = Vec::with_capacity(generators.len());
    for w in generators {
        debug_assert!(w.is_reduced() && !w.is_empty());
        let mut petal = Vec::with_capacity(w.len());
        let mut cur = bp;
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == w.len() { bp } else { aut.add_vertex() };
            let id = if l.is_positive() {
                aut.add_arc(cur, next, l.index())
            } else {
                aut.add_arc(next, cur, l.index())
            };
            petal.push(id);
            cur = next;
        }
        petals.push(petal);
    }
    (aut, petals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(text: &str) -> Word {
        parse_word(text, &ab()).unwrap()
    }

    fn ws(texts: &[&str]) -> Vec<Word> {
        texts.iter().map(|t| w(t)).collect()
    }

    #[test]
    fn flower_counts() {
        let aut = flower(&ws(&["aaa", "abaB", "AbaB"]), ab());
        assert_eq!(aut.num_vertices(), 9);
        assert_eq!(aut.num_arcs(), 11);

        let aut = flower(&ws(&["a"]), ab());
        assert_eq!((aut.num_vertices(), aut.num_arcs()), (1, 1));

        let aut = flower(&[], ab());
        assert_eq!((aut.num_vertices(), aut.num_arcs()), (1, 0));
    }

    #[test]
    fn bouquet_shape() {
        let aut = bouquet(Alphabet::new(3).unwrap());
        assert_eq!(aut.num_vertices(), 1);
        assert_eq!(aut.num_arcs(), 3);
        assert_eq!(aut.rank().unwrap(), 3);
        assert!(aut.is_saturated());
        assert!(aut.is_deterministic());
    }

    #[test]
    fn determinism_checks() {
        assert!(bouquet(ab()).is_deterministic());
        let aut = flower(&ws(&["aaa", "abaB"]), ab());
        let (v, l, _, _) = aut.deterministic_violation().unwrap();
        assert_eq!(v, aut.basepoint());
        assert_eq!(l, Letter::positive(0));
        assert!(Automaton::new(ab()).is_deterministic());
    }

    #[test]
    fn deficiency_counts() {
        let aut = bouquet(ab());
        assert_eq!(aut.deficiency(Letter::positive(1)), 0);

        // One a-loop over rank 2: no vertex reads b.
        let mut aut = Automaton::new(ab());
        let bp = aut.basepoint();
        aut.add_arc(bp, bp, 0);
        assert_eq!(aut.deficiency(Letter::positive(1)), 1);

        // Path reading ab: ends lack a and a⁻¹ respectively plus the middle.
        let mut path = Automaton::new(ab());
        let bp = path.basepoint();
        let v1 = path.add_vertex();
        let v2 = path.add_vertex();
        path.add_arc(bp, v1, 0);
        path.add_arc(v1, v2, 1);
        assert_eq!(path.deficiency(Letter::positive(0)), 2);
        assert_eq!(path.deficiency(Letter::negative(0)), 2);
    }

    #[test]
    fn core_prunes_paths() {
        let mut path = Automaton::new(ab());
        let bp = path.basepoint();
        let v1 = path.add_vertex();
        let v2 = path.add_vertex();
        path.add_arc(bp, v1, 0);
        path.add_arc(v1, v2, 1);
        let core = path.core();
        assert_eq!(core.num_vertices(), 1);
        assert_eq!(core.num_arcs(), 0);
        assert_eq!(core.basepoint(), bp);

        let b = bouquet(ab());
        assert_eq!(b.core(), b);
    }

    #[test]
    fn core_drops_dangling_thread() {
        // a-loop at bp plus a 2-arc thread: the thread is a hanging tree.
        let mut aut = Automaton::new(ab());
        let bp = aut.basepoint();
        aut.add_arc(bp, bp, 0);
        let t1 = aut.add_vertex();
        let t2 = aut.add_vertex();
        aut.add_arc(bp, t1, 1);
        aut.add_arc(t1, t2, 0);
        let core = aut.core();
        assert_eq!(core.num_vertices(), 1);
        assert_eq!(core.num_arcs(), 1);
    }

    #[test]
    fn strict_core_drops_basepoint_tail() {
        // b-arc from bp to v, a-loop at v: strict core is the loop alone.
        let mut aut = Automaton::new(ab());
        let bp = aut.basepoint();
        let v = aut.add_vertex();
        aut.add_arc(bp, v, 1);
        aut.add_arc(v, v, 0);
        let sc = aut.strict_core();
        assert_eq!(sc.num_vertices(), 1);
        assert_eq!(sc.num_arcs(), 1);
        assert_eq!(sc.basepoint(), v);

        let b = bouquet(ab());
        assert_eq!(b.strict_core(), b);

        // A tree has empty strict core.
        let mut tree = Automaton::new(ab());
        let bp = tree.basepoint();
        let u = tree.add_vertex();
        tree.add_arc(bp, u, 0);
        assert!(tree.strict_core().is_empty());
    }

    #[test]
    fn tree_and_rank() {
        let b = bouquet(ab());
        let tree = b.spanning_tree().unwrap();
        assert!(tree.arcs().is_empty());
        assert_eq!(b.rank().unwrap(), 2);

        // St of ⟨a, bab⁻¹⟩: two vertices, b-arc between, a-loops on both.
        let mut st = Automaton::new(ab());
        let bp = st.basepoint();
        let v = st.add_vertex();
        st.add_arc(bp, bp, 0);
        st.add_arc(bp, v, 1);
        st.add_arc(v, v, 0);
        let tree = st.spanning_tree().unwrap();
        assert_eq!(tree.arcs().len(), 1);
        assert_eq!(st.rank().unwrap(), 2);
        let basis = st.basis_from_tree(&tree).unwrap();
        assert_eq!(basis, ws(&["a", "baB"]));
    }

    #[test]
    fn read_membership_walks() {
        // St(⟨a³, abab⁻¹, a⁻¹bab⁻¹⟩) = a-loop at bp, b-arc, a-loop at v.
        let mut st = Automaton::new(ab());
        let bp = st.basepoint();
        let v = st.add_vertex();
        st.add_arc(bp, bp, 0);
        st.add_arc(bp, v, 1);
        st.add_arc(v, v, 0);
        assert_eq!(st.read(bp, &w("a")), Ok(bp));
        assert_eq!(st.read(bp, &w("b")), Ok(v));
        assert_eq!(st.read(bp, &w("baBaaB")), Err(5));
    }

    #[test]
    fn quotient_merging() {
        // St(⟨a²⟩) in F₁: merging both vertices gives one vertex with two
        // a-loops.
        let alphabet = Alphabet::new(1).unwrap();
        let mut st = Automaton::new(alphabet);
        let bp = st.basepoint();
        let v = st.add_vertex();
        st.add_arc(bp, v, 0);
        st.add_arc(v, bp, 0);
        let q = st.quotient(&[vec![bp, v]]).unwrap();
        assert_eq!(q.num_vertices(), 1);
        assert_eq!(q.num_arcs(), 2);
        assert!(!q.is_deterministic());

        let trivial = st.quotient(&[vec![bp], vec![v]]).unwrap();
        assert!(st.iso_rooted(&trivial).is_some());

        assert!(st.quotient(&[vec![bp]]).is_err());
        assert!(st.quotient(&[vec![bp, v], vec![v]]).is_err());
    }

    #[test]
    fn rooted_iso() {
        let b = bouquet(ab());
        let map = b.iso_rooted(&b).unwrap();
        assert_eq!(map[&b.basepoint()], b.basepoint());

        let mut la = Automaton::new(ab());
        let bp = la.basepoint();
        la.add_arc(bp, bp, 0);
        let mut lb = Automaton::new(ab());
        let bp = lb.basepoint();
        lb.add_arc(bp, bp, 1);
        assert!(la.iso_rooted(&lb).is_none());
    }

    #[test]
    fn unrooted_iso_rotations() {
        let alphabet = Alphabet::new(1).unwrap();
        // Cycle reading a², rooted at either vertex.
        let mut c1 = Automaton::new(alphabet.clone());
        let bp = c1.basepoint();
        let v = c1.add_vertex();
        c1.add_arc(bp, v, 0);
        c1.add_arc(v, bp, 0);
        let c2 = c1.rebased(v).unwrap();
        assert!(c1.iso_unrooted(&c2).is_some());

        let mut c3 = Automaton::new(alphabet);
        let bp = c3.basepoint();
        let v1 = c3.add_vertex();
        let v2 = c3.add_vertex();
        c3.add_arc(bp, v1, 0);
        c3.add_arc(v1, v2, 0);
        c3.add_arc(v2, bp, 0);
        assert!(c1.iso_unrooted(&c3).is_none());
    }

    #[test]
    fn canonical_form_is_stable() {
        let aut = flower(&ws(&["abaB"]), ab());
        let canon = aut.canonicalize().unwrap();
        assert_eq!(canon.canonicalize().unwrap(), canon);
        assert_eq!(canon.basepoint(), VertexId(0));
    }

    #[test]
    fn json_round_trip() {
        let aut = flower(&ws(&["aaa", "abaB"]), ab());
        let back = Automaton::from_json(&aut.to_json()).unwrap();
        assert_eq!(back, aut);

        let bad = r#"{"alphabet":{"rank":2,"names":["a","b"]},"basepoint":0,
                      "vertices":[0],"arcs":[{"id":0,"src":0,"dst":7,"letter":1}]}"#;
        assert!(Automaton::from_json(bad).is_err());
    }

    #[test]
    fn dot_output() {
        let dot = bouquet(ab()).to_dot();
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("doublecircle"));
    }

    #[test]
    fn read_composes() {
        let mut st = Automaton::new(ab());
        let bp = st.basepoint();
        let v = st.add_vertex();
        st.add_arc(bp, bp, 0);
        st.add_arc(bp, v, 1);
        st.add_arc(v, v, 0);
        let u = w("ab");
        let rest = w("aB");
        let mid = st.read(bp, &u).unwrap();
        let direct = st.read(bp, &u.concat(&rest)).unwrap();
        assert_eq!(st.read(mid, &rest).unwrap(), direct);
    }
}
