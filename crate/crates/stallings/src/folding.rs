//! Elementary foldings, the reduction process, and walk elevation.
//!
//! A folding identifies two arcs leaving a common vertex with the same
//! signed label. Open foldings (distinct far endpoints) merge a vertex and
//! keep the fundamental group intact; closed foldings (parallel arcs) each
//! destroy one relation's worth of rank. Replaying a [`FoldingTrace`]
//! backwards elevates walks of the folded automaton to the original one,
//! which is what turns membership certificates into words over the original
//! generators.

use std::collections::{BTreeSet, HashMap};

use crate::automaton::{flower_tagged, Arc, ArcId, Automaton, Traversal, VertexId, Walk};
use crate::words::{free_reduce, Alphabet, Letter, Word};
use crate::{Error, Result};

/// Whether a folding merged two distinct far endpoints (open) or two
/// parallel arcs (closed).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FoldKind {
    Open,
    Closed,
}

/// Which endpoints the folded pair shared, viewing both arcs as signed
/// traversals out of the violation vertex: positive letters share sources,
/// negative letters share targets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    Sources,
    Targets,
}

/// One elementary folding, as recorded in a trace.
#[derive(Clone, Debug)]
pub struct FoldRecord {
    pub step: usize,
    pub kind: FoldKind,
    pub kept_arc: ArcId,
    pub removed_arc: ArcId,
    /// `(survivor, absorbed)` for open foldings.
    pub merged_vertices: Option<(VertexId, VertexId)>,
    pub orientation: Orientation,
}

/// A fold record plus the pre-fold data needed to reconstruct the automaton
/// it acted on.
#[derive(Clone, Debug)]
struct FoldStep {
    record: FoldRecord,
    removed: Arc,
    prev_basepoint: VertexId,
}

/// A determinism violation: two traversals out of `vertex` reading `letter`.
#[derive(Clone, Copy, Debug)]
pub struct FoldablePair {
    pub vertex: VertexId,
    pub letter: Letter,
    pub kept: Traversal,
    pub removed: Traversal,
}

/// The first foldable pair in canonical order (vertex id, then letter, then
/// arc ids); `None` iff the automaton is deterministic.
pub fn find_fold(aut: &Automaton) -> Option<FoldablePair> {
    aut.deterministic_violation()
        .map(|(vertex, letter, kept, removed)| FoldablePair {
            vertex,
            letter,
            kept,
            removed,
        })
}

/// All foldable pairs, one per (vertex, letter) with a violation.
pub fn violations(aut: &Automaton) -> Vec<FoldablePair> {
    let mut out = Vec::new();
    for v in aut.vertices() {
        for l in aut.alphabet().letters() {
            let ts = aut.steps(v, l);
            if ts.len() >= 2 {
                out.push(FoldablePair {
                    vertex: v,
                    letter: l,
                    kept: ts[0],
                    removed: ts[1],
                });
            }
        }
    }
    out
}

/// Performs one elementary folding in place. The removed arc is deleted;
/// for an open folding the absorbed far endpoint is merged into the kept
/// one. The recognized subgroup is unchanged.
pub fn fold_step(aut: &mut Automaton, pair: &FoldablePair) -> Result<FoldRecord> {
    Ok(apply_pair(aut, pair, 0)?.record)
}

fn apply_pair(aut: &mut Automaton, pair: &FoldablePair, step: usize) -> Result<FoldStep> {
    let (t1, t2) = (pair.kept, pair.removed);
    if t1.arc == t2.arc
        || aut.arc(t1.arc).is_none()
        || aut.arc(t2.arc).is_none()
        || aut.traversal_src(t1) != pair.vertex
        || aut.traversal_src(t2) != pair.vertex
        || aut.traversal_letter(t1) != pair.letter
        || aut.traversal_letter(t2) != pair.letter
    {
        return Err(Error::NotFoldable);
    }
    let orientation = if pair.letter.is_positive() {
        Orientation::Sources
    } else {
        Orientation::Targets
    };
    let far_kept = aut.traversal_dst(t1);
    let far_removed = aut.traversal_dst(t2);
    let removed = aut.arc(t2.arc).unwrap();
    let prev_basepoint = aut.basepoint();
    aut.remove_arc(t2.arc);
    let (kind, merged_vertices) = if far_kept == far_removed {
        (FoldKind::Closed, None)
    } else {
        aut.merge_vertices(far_kept, far_removed);
        (FoldKind::Open, Some((far_kept, far_removed)))
    };
    Ok(FoldStep {
        record: FoldRecord {
            step,
            kind,
            kept_arc: t1.arc,
            removed_arc: t2.arc,
            merged_vertices,
            orientation,
        },
        removed,
        prev_basepoint,
    })
}

/// Replayable record of a reduction process: the initial automaton, every
/// elementary folding in order, and the vertices pruned by the final core
/// pass.
#[derive(Clone, Debug)]
pub struct FoldingTrace {
    initial: Automaton,
    steps: Vec<FoldStep>,
    core_pruned: Vec<VertexId>,
}

impl FoldingTrace {
    pub fn initial(&self) -> &Automaton {
        &self.initial
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn records(&self) -> Vec<FoldRecord> {
        self.steps.iter().map(|s| s.record.clone()).collect()
    }

    pub fn record(&self, step: usize) -> Option<&FoldRecord> {
        self.steps.get(step).map(|s| &s.record)
    }

    /// Vertices removed by the final core pass (empty when the input was a
    /// flower of reduced words).
    pub fn core_pruned(&self) -> &[VertexId] {
        &self.core_pruned
    }

    /// Number of closed foldings; equals the rank drop from the initial to
    /// the reduced automaton for connected inputs.
    pub fn loss(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.record.kind == FoldKind::Closed)
            .count()
    }

    /// The automaton after the first `upto` foldings (before the core pass).
    pub fn automaton_after(&self, upto: usize) -> Result<Automaton> {
        if upto > self.steps.len() {
            return Err(Error::StepOutOfRange(upto));
        }
        let mut aut = self.initial.clone();
        for step in &self.steps[..upto] {
            replay(&mut aut, step);
        }
        Ok(aut)
    }

    fn automata_through(&self, upto: usize) -> Result<Vec<Automaton>> {
        if upto > self.steps.len() {
            return Err(Error::StepOutOfRange(upto));
        }
        let mut out = Vec::with_capacity(upto + 1);
        let mut aut = self.initial.clone();
        out.push(aut.clone());
        for step in &self.steps[..upto] {
            replay(&mut aut, step);
            out.push(aut.clone());
        }
        Ok(out)
    }
}

fn replay(aut: &mut Automaton, step: &FoldStep) {
    debug_assert_eq!(aut.basepoint(), step.prev_basepoint);
    aut.remove_arc(step.record.removed_arc);
    if let Some((survivor, absorbed)) = step.record.merged_vertices {
        aut.merge_vertices(survivor, absorbed);
    }
}

/// Folds until deterministic, then takes the core. Returns the reduced
/// automaton together with the trace that produced it. The result is
/// independent of fold order up to rooted isomorphism.
pub fn reduce(aut: &Automaton) -> (Automaton, FoldingTrace) {
    reduce_with(aut, |pairs| {
        // Worklist discipline: pairs are offered one at a time in canonical
        // order, so always take the first.
        debug_assert!(!pairs.is_empty());
        0
    })
}

/// Like [`reduce`] but lets the caller pick which violation to fold at each
/// step, for confluence testing. The chooser receives every current
/// violation and returns an index into the slice.
pub fn reduce_with<F: FnMut(&[FoldablePair]) -> usize>(
    aut: &Automaton,
    mut choose: F,
) -> (Automaton, FoldingTrace) {
    let initial = aut.clone();
    let mut work = aut.clone();
    let mut steps: Vec<FoldStep> = Vec::new();
    loop {
        let pairs = violations(&work);
        if pairs.is_empty() {
            break;
        }
        let pick = choose(&pairs).min(pairs.len() - 1);
        let step = apply_pair(&mut work, &pairs[pick], steps.len()).expect("violation is foldable");
        steps.push(step);
    }
    finish_reduction(initial, work, steps)
}

/// Deterministic reduction driven by a worklist of dirty vertices; folds the
/// canonical first violation at the smallest pending vertex.
pub fn reduce_worklist(aut: &Automaton) -> (Automaton, FoldingTrace) {
    let initial = aut.clone();
    let mut work = aut.clone();
    let mut steps: Vec<FoldStep> = Vec::new();
    let mut pending: BTreeSet<VertexId> = work.vertices().collect();
    while let Some(&v) = pending.iter().next() {
        if !work.contains_vertex(v) {
            pending.remove(&v);
            continue;
        }
        match work.violation_at(v) {
            Some((vertex, letter, kept, removed)) => {
                let pair = FoldablePair {
                    vertex,
                    letter,
                    kept,
                    removed,
                };
                let step =
                    apply_pair(&mut work, &pair, steps.len()).expect("violation is foldable");
                if let Some((survivor, absorbed)) = step.record.merged_vertices {
                    pending.remove(&absorbed);
                    pending.insert(survivor);
                }
                steps.push(step);
            }
            None => {
                pending.remove(&v);
            }
        }
    }
    finish_reduction(initial, work, steps)
}

fn finish_reduction(
    initial: Automaton,
    folded: Automaton,
    steps: Vec<FoldStep>,
) -> (Automaton, FoldingTrace) {
    let cored = folded.core();
    let core_pruned = folded
        .vertices()
        .filter(|&v| !cored.contains_vertex(v))
        .collect();
    (
        cored,
        FoldingTrace {
            initial,
            steps,
            core_pruned,
        },
    )
}

/// The traversals of the folded pair out of the violation vertex, in the
/// automaton the step acted on.
fn pair_traversals(step: &FoldStep) -> (Traversal, Traversal, VertexId, VertexId) {
    let back = step.record.orientation == Orientation::Targets;
    let kept_t = Traversal {
        arc: step.record.kept_arc,
        back,
    };
    let removed_t = Traversal {
        arc: step.record.removed_arc,
        back,
    };
    let p = if back {
        step.removed.dst
    } else {
        step.removed.src
    };
    let q = if back {
        step.removed.src
    } else {
        step.removed.dst
    };
    (kept_t, removed_t, p, q)
}

/// The elementary walk of a closed folding: basepoint, tree path to the
/// violation vertex, across the removed arc, back over the kept arc, and
/// home. Its label freely reduces to a relation.
pub fn elementary_walk(trace: &FoldingTrace, step: usize) -> Result<Walk> {
    let fold = trace.steps.get(step).ok_or(Error::StepOutOfRange(step))?;
    if fold.record.kind != FoldKind::Closed {
        return Err(Error::NotClosedFold(step));
    }
    let pre = trace.automaton_after(step)?;
    let (kept_t, removed_t, p, _q) = pair_traversals(fold);
    let tree = pre.spanning_tree()?;
    let gamma = tree.path_walk(&pre, p)?;
    let crosses_fold = gamma
        .steps
        .last()
        .is_some_and(|t| t.arc == kept_t.arc || t.arc == removed_t.arc);
    let walk = if crosses_fold {
        // The tree path arrives over one of the folded arcs; route the
        // elementary walk through the far endpoint instead.
        let mut delta = gamma.clone();
        delta.steps.pop();
        let mut steps = delta.steps.clone();
        steps.push(removed_t.reversed());
        steps.push(kept_t);
        steps.extend(delta.steps.iter().rev().map(|t| t.reversed()));
        Walk {
            start: pre.basepoint(),
            steps,
        }
    } else {
        let mut steps = gamma.steps.clone();
        steps.push(removed_t);
        steps.push(kept_t.reversed());
        steps.extend(gamma.steps.iter().rev().map(|t| t.reversed()));
        Walk {
            start: pre.basepoint(),
            steps,
        }
    };
    debug_assert!(pre.walk_is_valid(&walk));
    debug_assert_eq!(walk.clone().reduced(), walk);
    Ok(walk)
}

/// Elevates a reduced closed basepoint walk of the automaton after `upto`
/// foldings back to the initial automaton, preserving the reduced label.
///
/// Through open foldings the elevation is forced; through closed foldings
/// every crossing of the folded arc elevates to the kept arc.
pub fn elevate(trace: &FoldingTrace, upto: usize, walk: &Walk) -> Result<Walk> {
    let autos = trace.automata_through(upto)?;
    let last = &autos[upto];
    if !last.walk_is_valid(walk)
        || walk.start != last.basepoint()
        || last.walk_end(walk) != last.basepoint()
    {
        return Err(Error::NotClosedWalk);
    }
    let mut cur = walk.clone().reduced();
    for i in (0..upto).rev() {
        cur = elevate_one(&autos[i], &trace.steps[i], &cur).reduced();
        debug_assert!(autos[i].walk_is_valid(&cur));
    }
    Ok(cur)
}

fn elevate_one(pre: &Automaton, step: &FoldStep, walk: &Walk) -> Walk {
    if step.record.kind == FoldKind::Closed {
        // All arcs of the folded automaton exist unchanged here; crossings
        // of the surviving arc elevate to it verbatim.
        return Walk {
            start: pre.basepoint(),
            steps: walk.steps.clone(),
        };
    }
    let (survivor, absorbed) = step.record.merged_vertices.unwrap();
    let (kept_t, removed_t, _p, _q) = pair_traversals(step);
    let t1 = pre.traversal_dst(kept_t);
    let t2 = pre.traversal_dst(removed_t);
    debug_assert_eq!((survivor, absorbed), (t1, t2));
    let twin = |v: VertexId| if v == t1 { t2 } else { t1 };
    // Detour between the two vertices identified by the fold; it projects to
    // a backtracking over the folded arc, so labels are unaffected.
    let detour = |from: VertexId| {
        if from == t1 {
            [kept_t.reversed(), removed_t]
        } else {
            [removed_t.reversed(), kept_t]
        }
    };
    let mut steps: Vec<Traversal> = Vec::with_capacity(walk.steps.len());
    let mut cur = pre.basepoint();
    for &st in &walk.steps {
        let candidates: &[Traversal] = if st.arc == step.record.kept_arc {
            &[
                Traversal {
                    arc: step.record.kept_arc,
                    back: st.back,
                },
                Traversal {
                    arc: step.record.removed_arc,
                    back: st.back,
                },
            ]
        } else {
            std::slice::from_ref(&st)
        };
        let chosen = match candidates.iter().find(|&&c| pre.traversal_src(c) == cur) {
            Some(&c) => c,
            None => {
                // The walk continues from the other vertex of the merged
                // pair; switch sides first.
                steps.extend(detour(cur));
                cur = twin(cur);
                *candidates
                    .iter()
                    .find(|&&c| pre.traversal_src(c) == cur)
                    .expect("elevated step must start at one of the merged vertices")
            }
        };
        steps.push(chosen);
        cur = pre.traversal_dst(chosen);
    }
    if cur != pre.basepoint() {
        debug_assert_eq!(twin(cur), pre.basepoint());
        steps.extend(detour(cur));
    }
    Walk {
        start: pre.basepoint(),
        steps,
    }
}

/// A flower automaton with its petals tagged: petal `i` reads generator `i`
/// as a closed basepoint walk, and its arcs are known in reading order.
#[derive(Clone, Debug)]
pub struct TaggedFlower {
    pub automaton: Automaton,
    pub petals: Vec<Vec<ArcId>>,
    pub generators: Vec<Word>,
}

impl TaggedFlower {
    /// Builds the flower of freely reduced nonempty generators.
    pub fn new(generators: Vec<Word>, alphabet: Alphabet) -> Self {
        debug_assert!(generators.iter().all(|w| w.is_reduced() && !w.is_empty()));
        let (automaton, petals) = flower_tagged(&generators, alphabet);
        TaggedFlower {
            automaton,
            petals,
            generators,
        }
    }

    /// Decomposes a reduced closed basepoint walk of the flower into
    /// complete petal traversals. Returns the word over the petal symbols
    /// (letter `i` stands for generator `i`).
    pub fn bracket(&self, walk: &Walk) -> Result<Word> {
        let mut arc_pos: HashMap<ArcId, (usize, usize)> = HashMap::new();
        for (p, petal) in self.petals.iter().enumerate() {
            for (k, &arc) in petal.iter().enumerate() {
                arc_pos.insert(arc, (p, k));
            }
        }
        let mut letters = Vec::new();
        let mut i = 0;
        while i < walk.steps.len() {
            let st = walk.steps[i];
            let &(p, pos) = arc_pos.get(&st.arc).ok_or(Error::NotPetalWalk)?;
            let gen = self.generators[p].letters();
            let len = gen.len();
            if i + len > walk.steps.len() {
                return Err(Error::NotPetalWalk);
            }
            if pos == 0 && st.back != gen[0].is_positive() {
                for (k, &l) in gen.iter().enumerate() {
                    let expect = Traversal {
                        arc: self.petals[p][k],
                        back: !l.is_positive(),
                    };
                    if walk.steps[i + k] != expect {
                        return Err(Error::NotPetalWalk);
                    }
                }
                letters.push(Letter::positive(p));
            } else if pos == len - 1 && st.back == gen[len - 1].is_positive() {
                for k in 0..len {
                    let l = gen[len - 1 - k];
                    let expect = Traversal {
                        arc: self.petals[p][len - 1 - k],
                        back: l.is_positive(),
                    };
                    if walk.steps[i + k] != expect {
                        return Err(Error::NotPetalWalk);
                    }
                }
                letters.push(Letter::negative(p));
            } else {
                return Err(Error::NotPetalWalk);
            }
            i += len;
        }
        Ok(Word::from_letters(letters))
    }
}

/// One relator per closed folding: the elementary walk elevated to the
/// flower and bracketed into petal symbols. Substituting the generators for
/// the symbols and reducing yields the empty word; together the relators
/// generate the kernel of the evaluation map as a normal subgroup.
pub fn relators(trace: &FoldingTrace, flower: &TaggedFlower) -> Result<Vec<Word>> {
    if *trace.initial() != flower.automaton {
        return Err(Error::InvalidAutomaton(
            "trace does not start at the given flower".into(),
        ));
    }
    let mut out = Vec::new();
    for (j, step) in trace.steps.iter().enumerate() {
        if step.record.kind == FoldKind::Closed {
            let walk = elementary_walk(trace, j)?;
            let lifted = elevate(trace, j, &walk)?;
            out.push(flower.bracket(&lifted)?);
        }
    }
    Ok(out)
}

/// Replaces symbol `i` by `generators[i]` and freely reduces.
pub fn substitute(symbols: &Word, generators: &[Word]) -> Word {
    let mut out = Word::empty();
    for &l in symbols.letters() {
        let g = &generators[l.index()];
        out = if l.is_positive() {
            out.concat(g)
        } else {
            out.concat(&g.inverse())
        };
    }
    free_reduce(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::flower;
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
    fn find_fold_examples() {
        assert!(find_fold(&crate::automaton::bouquet(ab())).is_none());

        let two_loops = flower(&ws(&["a", "a"]), ab());
        let pair = find_fold(&two_loops).unwrap();
        assert_eq!(pair.vertex, two_loops.basepoint());
        assert_eq!(pair.letter, Letter::positive(0));

        let fl = flower(&ws(&["aaa", "abaB"]), ab());
        let pair = find_fold(&fl).unwrap();
        assert_eq!(pair.vertex, fl.basepoint());
        assert_eq!(pair.letter, Letter::positive(0));
    }

    #[test]
    fn fold_step_kinds() {
        // Two a-loops: closed fold, one loop remains, rank drops by one.
        let mut aut = flower(&ws(&["a", "a"]), ab());
        let rank0 = aut.rank().unwrap();
        let pair = find_fold(&aut).unwrap();
        let record = fold_step(&mut aut, &pair).unwrap();
        assert_eq!(record.kind, FoldKind::Closed);
        assert_eq!(aut.num_arcs(), 1);
        assert_eq!(aut.rank().unwrap(), rank0 - 1);

        // Two a-arcs to distinct vertices: open fold merges the second
        // target into the first, rank unchanged.
        let mut aut = flower(&ws(&["ab", "ab"]), ab());
        let rank0 = aut.rank().unwrap();
        let pair = find_fold(&aut).unwrap();
        let record = fold_step(&mut aut, &pair).unwrap();
        assert_eq!(record.kind, FoldKind::Open);
        assert!(record.merged_vertices.is_some());
        assert_eq!(aut.rank().unwrap(), rank0);

        let bad = FoldablePair {
            vertex: aut.basepoint(),
            letter: Letter::positive(0),
            kept: Traversal::forward(ArcId(0)),
            removed: Traversal::forward(ArcId(0)),
        };
        assert!(fold_step(&mut aut, &bad).is_err());
    }

    #[test]
    fn reduce_worked_example() {
        // ⟨a³, abab⁻¹, a⁻¹bab⁻¹⟩ folds to two vertices with a-loops joined
        // by a b-arc.
        let fl = flower(&ws(&["aaa", "abaB", "AbaB"]), ab());
        let (reduced, trace) = reduce(&fl);
        assert!(reduced.is_deterministic());
        assert_eq!(reduced.num_vertices(), 2);
        assert_eq!(reduced.num_arcs(), 3);
        assert_eq!(reduced.rank().unwrap(), 2);
        assert_eq!(trace.loss(), 1);
        assert!(trace.core_pruned().is_empty());
    }

    #[test]
    fn reduce_already_reduced() {
        let b = crate::automaton::bouquet(ab());
        let (reduced, trace) = reduce(&b);
        assert_eq!(reduced, b);
        assert_eq!(trace.num_steps(), 0);
    }

    #[test]
    fn reduce_two_loops() {
        let fl = flower(&ws(&["a", "a"]), ab());
        let (reduced, trace) = reduce(&fl);
        assert_eq!(reduced.num_arcs(), 1);
        assert_eq!(trace.loss(), 1);
        assert_eq!(trace.records().len(), 1);
    }

    #[test]
    fn loss_counts() {
        let (_, trace) = reduce(&flower(&ws(&["aaa", "abaB", "AbaB"]), ab()));
        assert_eq!(trace.loss(), 1);

        let (_, trace) = reduce(&flower(&ws(&["a", "a", "a"]), ab()));
        assert_eq!(trace.loss(), 2);
    }

    #[test]
    fn elementary_walk_two_loops() {
        let fl = flower(&ws(&["a", "a"]), ab());
        let (_, trace) = reduce(&fl);
        let walk = elementary_walk(&trace, 0).unwrap();
        assert_eq!(walk.len(), 2);
        assert_eq!(walk.start, fl.basepoint());
        // Label reads a·a⁻¹, reducing to the trivial relation.
        let label = fl.walk_label(&walk);
        assert!(free_reduce(&label).is_empty());
    }

    #[test]
    fn elementary_walk_requires_closed() {
        let fl = flower(&ws(&["ab", "ab"]), ab());
        let (_, trace) = reduce(&fl);
        let open_step = trace
            .records()
            .iter()
            .position(|r| r.kind == FoldKind::Open)
            .unwrap();
        assert!(matches!(
            elementary_walk(&trace, open_step),
            Err(Error::NotClosedFold(_))
        ));
        assert!(matches!(
            elementary_walk(&trace, 99),
            Err(Error::StepOutOfRange(99))
        ));
    }

    #[test]
    fn elevate_identity_on_empty_trace() {
        let b = crate::automaton::bouquet(ab());
        let (reduced, trace) = reduce(&b);
        let walk = reduced.read_walk(reduced.basepoint(), &w("ab")).unwrap();
        let lifted = elevate(&trace, 0, &walk).unwrap();
        assert_eq!(lifted, walk);
    }

    #[test]
    fn elevate_preserves_reduced_labels() {
        let gens = ws(&["aaa", "abaB", "AbaB"]);
        let flower = TaggedFlower::new(gens, ab());
        let (reduced, trace) = reduce(&flower.automaton);
        for text in ["a", "aa", "abaB", "baB"] {
            let word = w(text);
            if let Ok(walk) = reduced.read_walk(reduced.basepoint(), &word) {
                if reduced.walk_end(&walk) != reduced.basepoint() {
                    continue;
                }
                let lifted = elevate(&trace, trace.num_steps(), &walk).unwrap();
                assert!(flower.automaton.walk_is_valid(&lifted));
                let label = free_reduce(&flower.automaton.walk_label(&lifted));
                assert_eq!(label, free_reduce(&word), "label mismatch for {text}");
            }
        }
    }

    #[test]
    fn relators_worked_example() {
        let gens = ws(&["aaa", "abaB", "AbaB"]);
        let flower = TaggedFlower::new(gens.clone(), ab());
        let (_, trace) = reduce(&flower.automaton);
        let rels = relators(&trace, &flower).unwrap();
        assert_eq!(rels.len(), 1);
        for r in &rels {
            assert!(!r.is_empty());
            assert!(substitute(r, &gens).is_empty());
        }
        // The classical relator for these generators also evaluates
        // trivially: s₂s₃⁻¹s₁⁻¹s₂s₃⁻¹s₁⁻¹s₂s₃⁻¹.
        let classical = Word::from_letters(vec![
            Letter::positive(1),
            Letter::negative(2),
            Letter::negative(0),
            Letter::positive(1),
            Letter::negative(2),
            Letter::negative(0),
            Letter::positive(1),
            Letter::negative(2),
        ]);
        assert!(substitute(&classical, &gens).is_empty());
    }

    #[test]
    fn relators_duplicate_generator() {
        let gens = ws(&["a", "a"]);
        let flower = TaggedFlower::new(gens.clone(), ab());
        let (_, trace) = reduce(&flower.automaton);
        let rels = relators(&trace, &flower).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].len(), 2);
        assert!(substitute(&rels[0], &gens).is_empty());
    }

    #[test]
    fn no_relators_for_free_basis() {
        let gens = ws(&["a", "baB"]);
        let flower = TaggedFlower::new(gens, ab());
        let (_, trace) = reduce(&flower.automaton);
        assert_eq!(relators(&trace, &flower).unwrap().len(), 0);
    }

    #[test]
    fn worklist_reduction_matches_canonical() {
        for gens in [
            ws(&["aaa", "abaB", "AbaB"]),
            ws(&["ab", "ba", "aabb"]),
            ws(&["a", "b", "ab"]),
        ] {
            let fl = flower(&gens, ab());
            let (r1, _) = reduce(&fl);
            let (r2, _) = reduce_worklist(&fl);
            let c1 = r1.canonicalize().unwrap();
            let c2 = r2.canonicalize().unwrap();
            assert_eq!(c1, c2);
        }
    }
}
