//! Finitely generated subgroups and the single-subgroup algorithm suite.
//!
//! A [`Subgroup`] owns the canonical reduced automaton recognizing it, the
//! original generators, and the folding trace from their flower. The trace
//! is what upgrades yes/no answers to certificates: membership comes with an
//! expression in the generators, non-freeness with explicit relations.

use std::collections::HashMap;

use crate::automaton::{Automaton, VertexId};
use crate::folding::{self, FoldingTrace, TaggedFlower};
use crate::words::{free_reduce, Alphabet, Letter, Word};
use crate::{Error, Result};

/// A finitely generated subgroup of the free group over its alphabet,
/// in canonical reduced-automaton form.
#[derive(Clone, Debug)]
pub struct Subgroup {
    alphabet: Alphabet,
    flower: TaggedFlower,
    trace: FoldingTrace,
    reduced_raw: Automaton,
    automaton: Automaton,
}

/// Outcome of the finite index test.
#[derive(Clone, Debug)]
pub enum IndexReport {
    /// Saturated automaton: index equals the vertex count and the
    /// transversal lists one coset representative per vertex, `ε` first.
    Finite {
        index: usize,
        transversal: Vec<Word>,
    },
    /// A vertex missing an outgoing letter witnesses infinite index.
    Infinite { witness: (VertexId, Letter) },
}

impl IndexReport {
    pub fn is_finite(&self) -> bool {
        matches!(self, IndexReport::Finite { .. })
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            IndexReport::Finite { index, .. } => Some(*index),
            IndexReport::Infinite { .. } => None,
        }
    }
}

/// Outcome of the dependence test for an element over a subgroup.
#[derive(Clone, Debug)]
pub enum Dependence {
    Independent,
    /// Equations over the symbols `h₁…h_n, X` (letters `0..n` and `n`):
    /// substituting a basis of the subgroup for the `hᵢ` and the element for
    /// `X` reduces every equation to the empty word.
    Dependent { equations: Vec<Word> },
}

impl Subgroup {
    /// The subgroup generated by `generators`: reduces them, drops trivial
    /// ones, folds the flower, and canonicalizes. The result is independent
    /// of generator order and redundancy.
    pub fn stallings(generators: &[Word], alphabet: Alphabet) -> Subgroup {
        let cleaned: Vec<Word> = generators
            .iter()
            .map(free_reduce)
            .filter(|w| !w.is_empty())
            .collect();
        for w in &cleaned {
            assert!(
                w.max_index().unwrap_or(0) < alphabet.rank(),
                "generator uses a letter outside the alphabet"
            );
        }
        let flower = TaggedFlower::new(cleaned, alphabet.clone());
        let (reduced_raw, trace) = folding::reduce(&flower.automaton);
        let automaton = reduced_raw
            .canonicalize()
            .expect("reduced flower is connected");
        Subgroup {
            alphabet,
            flower,
            trace,
            reduced_raw,
            automaton,
        }
    }

    /// The subgroup recognized by a deterministic connected automaton,
    /// regenerated from a basis of tree petals.
    pub fn from_automaton(aut: &Automaton) -> Result<Subgroup> {
        if aut.is_empty() {
            return Err(Error::InvalidAutomaton("empty automaton".into()));
        }
        if !aut.is_deterministic() {
            return Err(Error::NotDeterministic);
        }
        let tree = aut.spanning_tree()?;
        let basis = aut.basis_from_tree(&tree)?;
        Ok(Subgroup::stallings(&basis, aut.alphabet().clone()))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The cleaned generators (freely reduced, trivial ones dropped), in
    /// petal order.
    pub fn generators(&self) -> &[Word] {
        &self.flower.generators
    }

    /// The canonical reduced automaton.
    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    /// The folding trace from the generator flower to the reduced automaton.
    pub fn trace(&self) -> &FoldingTrace {
        &self.trace
    }

    pub fn is_trivial(&self) -> bool {
        self.automaton.num_arcs() == 0
    }

    /// Recognizes the whole ambient free group.
    pub fn is_whole_group(&self) -> bool {
        self.automaton.num_vertices() == 1 && self.automaton.num_arcs() == self.alphabet.rank()
    }

    /// Membership: does `w` read as a closed basepoint walk?
    pub fn contains(&self, w: &Word) -> bool {
        let red = free_reduce(w);
        self.automaton.read(self.automaton.basepoint(), &red) == Ok(self.automaton.basepoint())
    }

    /// Writes a member as a word over the generator symbols (letter `i`
    /// stands for generator `i`): realize it as a basepoint walk, elevate
    /// through the folding trace to the flower, and bracket into petals.
    ///
    /// Substituting the generators back and reducing returns the reduced
    /// input.
    pub fn express(&self, w: &Word) -> Result<Word> {
        let red = free_reduce(w);
        let bp = self.reduced_raw.basepoint();
        let walk = self
            .reduced_raw
            .read_walk(bp, &red)
            .map_err(|_| Error::NotAMember)?;
        if self.reduced_raw.walk_end(&walk) != bp {
            return Err(Error::NotAMember);
        }
        let lifted = folding::elevate(&self.trace, self.trace.num_steps(), &walk)?;
        self.flower.bracket(&lifted)
    }

    /// Free basis from the canonical BFS tree.
    pub fn basis(&self) -> Vec<Word> {
        let tree = self
            .automaton
            .spanning_tree()
            .expect("canonical form is connected");
        self.automaton
            .basis_from_tree(&tree)
            .expect("tree belongs to the automaton")
    }

    pub fn rank(&self) -> usize {
        self.automaton.rank().expect("canonical form is connected")
    }

    /// `max(0, rank − 1)`, the quantity appearing in intersection bounds.
    pub fn reduced_rank(&self) -> usize {
        self.rank().saturating_sub(1)
    }

    /// Same subgroup: canonical automata are structurally identical.
    pub fn equals(&self, other: &Subgroup) -> Result<bool> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        Ok(self.automaton == other.automaton)
    }

    /// The unique basepoint- and label-preserving automaton homomorphism
    /// into `other`, which exists iff `self ≤ other`.
    pub fn hom_into(&self, other: &Subgroup) -> Result<Option<HashMap<VertexId, VertexId>>> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let g = &self.automaton;
        let h = &other.automaton;
        let mut map: HashMap<VertexId, VertexId> = HashMap::new();
        map.insert(g.basepoint(), h.basepoint());
        let tree = g.spanning_tree().expect("canonical form is connected");
        for &v in tree.order() {
            for l in self.alphabet.letters() {
                if let Some(t) = g.step(v, l) {
                    let dst = g.traversal_dst(t);
                    match h.step(map[&v], l) {
                        Some(ht) => {
                            let image_dst = h.traversal_dst(ht);
                            match map.get(&dst) {
                                Some(&prev) if prev != image_dst => return Ok(None),
                                Some(_) => {}
                                None => {
                                    map.insert(dst, image_dst);
                                }
                            }
                        }
                        None => return Ok(None),
                    }
                }
            }
        }
        Ok(Some(map))
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        Ok(self.hom_into(other)?.is_some())
    }

    /// Finite index iff the automaton is saturated; then the index is the
    /// vertex count and the transversal reads the BFS tree geodesics.
    pub fn index(&self) -> IndexReport {
        match self.automaton.deficient_pair() {
            Some(witness) => IndexReport::Infinite { witness },
            None => {
                let tree = self
                    .automaton
                    .spanning_tree()
                    .expect("canonical form is connected");
                let transversal = tree
                    .order()
                    .iter()
                    .map(|&v| tree.path_word(&self.automaton, v).expect("tree path"))
                    .collect();
                IndexReport::Finite {
                    index: self.automaton.num_vertices(),
                    transversal,
                }
            }
        }
    }

    /// Normal iff trivial, or saturated and re-rooting at any vertex gives a
    /// basepoint-isomorphic automaton.
    pub fn is_normal(&self) -> bool {
        if self.is_trivial() {
            return true;
        }
        if !self.automaton.is_saturated() {
            return false;
        }
        self.automaton.vertices().all(|v| {
            v == self.automaton.basepoint()
                || self
                    .automaton
                    .rebased(v)
                    .expect("vertex exists")
                    .iso_rooted(&self.automaton)
                    .is_some()
        })
    }

    /// `w⁻¹ · self · w`, built by conjugating every generator.
    pub fn conjugate(&self, w: &Word) -> Subgroup {
        let gens: Vec<Word> = self
            .generators()
            .iter()
            .map(|s| s.conjugated_by(w))
            .collect();
        Subgroup::stallings(&gens, self.alphabet.clone())
    }

    /// A word `w` with `w⁻¹ · self · w = other`, or `None` when the
    /// subgroups are not conjugate. Conjugacy is decided on strict cores;
    /// the returned conjugator is verified before being returned.
    pub fn conjugator(&self, other: &Subgroup) -> Result<Option<Word>> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        match (self.is_trivial(), other.is_trivial()) {
            (true, true) => return Ok(Some(Word::empty())),
            (true, false) | (false, true) => return Ok(None),
            _ => {}
        }
        let sh = self.automaton.strict_core();
        let sk = other.automaton.strict_core();
        let (entry_h, tail_h) = attachment(&self.automaton, &sh);
        let (entry_k, tail_k) = attachment(&other.automaton, &sk);
        let mut found_iso = false;
        let mut verified: Option<Word> = None;
        'anchors: for anchor in sk.vertices().collect::<Vec<_>>() {
            let Some(map) = sh.iso_anchored(&sk, anchor) else {
                continue;
            };
            found_iso = true;
            let from = map[&entry_h];
            let tree = other
                .automaton
                .spanning_tree_from(from)
                .expect("canonical form is connected");
            let mid = tree.path_word(&other.automaton, entry_k)?;
            let candidate = free_reduce(&tail_h.concat(&mid).concat(&tail_k.inverse()));
            if self.conjugate(&candidate).equals(other)? {
                verified = Some(candidate);
                break;
            }
            // Fallback: scan tree paths to every strict-core vertex on the
            // other side.
            let home = other.automaton.spanning_tree().expect("connected");
            for q in sk.vertices() {
                let mid = tree.path_word(&other.automaton, q)?;
                let back = home.path_word(&other.automaton, q)?;
                let candidate = free_reduce(&tail_h.concat(&mid).concat(&back.inverse()));
                if self.conjugate(&candidate).equals(other)? {
                    verified = Some(candidate);
                    break 'anchors;
                }
            }
        }
        if !found_iso {
            return Ok(None);
        }
        debug_assert!(
            verified.is_some(),
            "isomorphic strict cores must yield a conjugator"
        );
        Ok(verified)
    }

    /// Relators over the generator symbols: one per closed folding, each
    /// evaluating to the empty word under substitution. Their number is the
    /// folding loss `#generators − rank`.
    pub fn presentation(&self) -> Vec<Word> {
        folding::relators(&self.trace, &self.flower).expect("trace comes from this flower")
    }

    /// Is `g` the solution of a nontrivial equation with coefficients in
    /// this subgroup? Builds the flower on a basis plus `g` and reads the
    /// relators off the folding; symbol `n` (for a rank-`n` subgroup) plays
    /// the unknown.
    pub fn dependence(&self, g: &Word) -> Dependence {
        let g = free_reduce(g);
        if g.is_empty() {
            // The trivial element satisfies X = 1.
            return Dependence::Dependent {
                equations: vec![Word::from_letters(vec![Letter::positive(self.rank())])],
            };
        }
        let mut petals = self.basis();
        petals.push(g);
        let flower = TaggedFlower::new(petals, self.alphabet.clone());
        let (_, trace) = folding::reduce(&flower.automaton);
        if trace.loss() == 0 {
            Dependence::Independent
        } else {
            let equations =
                folding::relators(&trace, &flower).expect("trace comes from this flower");
            Dependence::Dependent { equations }
        }
    }

    /// The subgroup recognized by the image of `self`'s automaton inside
    /// `other`'s. Contains `self`; lies in the fringe of `self`.
    pub fn image_in(&self, other: &Subgroup) -> Result<Subgroup> {
        let map = self.hom_into(other)?.ok_or(Error::NotASubgroup)?;
        let target = &other.automaton;
        let mut new_ids: HashMap<VertexId, VertexId> = HashMap::new();
        let mut image = Automaton::new(self.alphabet.clone());
        let mut targets: Vec<VertexId> = map.values().copied().collect();
        targets.sort();
        targets.dedup();
        for v in targets {
            let id = if v == target.basepoint() {
                image.basepoint()
            } else {
                image.add_vertex()
            };
            new_ids.insert(v, id);
        }
        let mut seen_arcs: Vec<(VertexId, usize)> = Vec::new();
        for id in self.automaton.arc_ids() {
            let arc = self.automaton.arc(id).unwrap();
            let src = map[&arc.src];
            if seen_arcs.contains(&(src, arc.letter)) {
                continue;
            }
            seen_arcs.push((src, arc.letter));
            image.add_arc(new_ids[&src], new_ids[&map[&arc.dst]], arc.letter);
        }
        Subgroup::from_automaton(&image)
    }
}

/// Where the basepoint tail meets the strict core: the first strict-core
/// vertex in BFS order, and the tree-path label leading to it.
fn attachment(aut: &Automaton, score: &Automaton) -> (VertexId, Word) {
    let tree = aut.spanning_tree().expect("canonical form is connected");
    let entry = tree
        .order()
        .iter()
        .copied()
        .find(|&v| score.contains_vertex(v))
        .expect("nontrivial subgroup has a nonempty strict core");
    let word = tree.path_word(aut, entry).expect("tree path");
    (entry, word)
}

/// Freely independent iff the flower folds with zero loss (equivalently the
/// flower and its reduction have the same rank). Words reducing to the
/// empty word are never part of a free basis.
pub fn is_free_basis(words: &[Word], alphabet: &Alphabet) -> bool {
    let reduced: Vec<Word> = words.iter().map(free_reduce).collect();
    if reduced.iter().any(|w| w.is_empty()) {
        return false;
    }
    let flower = crate::automaton::flower(&reduced, alphabet.clone());
    let (_, trace) = folding::reduce(&flower);
    trace.loss() == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folding::substitute;
    use crate::words::parse_word;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(text: &str) -> Word {
        parse_word(text, &ab()).unwrap()
    }

    fn sub(texts: &[&str]) -> Subgroup {
        let gens: Vec<Word> = texts.iter().map(|t| w(t)).collect();
        Subgroup::stallings(&gens, ab())
    }

    #[test]
    fn stallings_worked_example() {
        let h = sub(&["aaa", "abaB", "AbaB"]);
        assert_eq!(h.automaton().num_vertices(), 2);
        assert_eq!(h.automaton().num_arcs(), 3);
        assert_eq!(h.rank(), 2);

        let k = sub(&["a", "baB"]);
        assert!(h.equals(&k).unwrap());

        let trivial = sub(&[]);
        assert_eq!(trivial.automaton().num_vertices(), 1);
        assert!(trivial.is_trivial());
    }

    #[test]
    fn membership_triple() {
        let h = sub(&["aaa", "abaB", "AbaB"]);
        assert!(h.contains(&w("a")));
        assert!(!h.contains(&w("b")));
        assert!(!h.contains(&w("baBaaB")));
    }

    #[test]
    fn express_round_trips() {
        let h = sub(&["aaa", "abaB", "AbaB"]);
        let expr = h.express(&w("a")).unwrap();
        assert_eq!(substitute(&expr, h.generators()), w("a"));

        let cyc = sub(&["a"]);
        let expr = cyc.express(&w("a^5")).unwrap();
        assert_eq!(expr.len(), 5);
        assert!(expr
            .letters()
            .iter()
            .all(|l| l.index() == 0 && l.is_positive()));

        assert!(matches!(h.express(&w("b")), Err(Error::NotAMember)));
    }

    #[test]
    fn basis_and_rank() {
        let h = sub(&["aaa", "abaB", "AbaB"]);
        assert_eq!(h.basis(), vec![w("a"), w("baB")]);
        assert_eq!(h.rank(), 2);

        assert_eq!(sub(&[]).rank(), 0);
        assert_eq!(sub(&["a", "b"]).rank(), 2);
    }

    #[test]
    fn free_basis_test() {
        assert!(is_free_basis(&[w("a"), w("baB")], &ab()));
        assert!(!is_free_basis(&[w("aaa"), w("abaB"), w("AbaB")], &ab()));
        assert!(is_free_basis(&[], &ab()));
        assert!(!is_free_basis(&[w("aA")], &ab()));
    }

    #[test]
    fn inclusion_and_equality() {
        let h = sub(&["a", "baB"]);
        let k = sub(&["aaa", "abaB", "AbaB"]);
        assert!(h.equals(&k).unwrap());

        let sq = sub(&["aa"]);
        let full = sub(&["a"]);
        assert!(sq.is_subgroup_of(&full).unwrap());
        assert!(!full.is_subgroup_of(&sq).unwrap());

        let a = sub(&["a"]);
        let b = sub(&["b"]);
        assert!(!a.is_subgroup_of(&b).unwrap());
        assert!(!b.is_subgroup_of(&a).unwrap());
    }

    #[test]
    fn hom_into_examples() {
        let h = sub(&["a", "baB"]);
        let map = h.hom_into(&h).unwrap().unwrap();
        assert!(map.iter().all(|(k, v)| k == v));

        let sq = sub(&["aa"]);
        let full = sub(&["a"]);
        let map = sq.hom_into(&full).unwrap().unwrap();
        assert!(map.values().all(|&v| v == full.automaton().basepoint()));
        assert!(full.hom_into(&sq).unwrap().is_none());
    }

    #[test]
    fn index_example() {
        let h = sub(&["a", "bb", "baaB", "babAB"]);
        match h.index() {
            IndexReport::Finite { index, transversal } => {
                assert_eq!(index, 3);
                assert_eq!(transversal, vec![Word::empty(), w("b"), w("ba")]);
            }
            IndexReport::Infinite { .. } => panic!("index should be finite"),
        }

        let a = sub(&["a"]);
        match a.index() {
            IndexReport::Infinite { witness } => {
                assert_eq!(witness.1, Letter::positive(1));
            }
            IndexReport::Finite { .. } => panic!("⟨a⟩ has infinite index in F₂"),
        }

        let whole = sub(&["a", "b"]);
        assert_eq!(whole.index().index(), Some(1));
    }

    #[test]
    fn normality() {
        assert!(!sub(&["a"]).is_normal());
        assert!(sub(&["a", "bb", "bab"]).is_normal());
        assert!(!sub(&["a", "bb", "baaB", "babAB"]).is_normal());
        assert!(sub(&[]).is_normal());
        assert!(sub(&["a", "b"]).is_normal());
    }

    #[test]
    fn normality_matches_conjugation_oracle() {
        // A finite-index subgroup is normal iff conjugates of its
        // generators by the alphabet letters stay inside.
        for gens in [
            vec!["a", "bb", "bab"],
            vec!["a", "bb", "baaB", "babAB"],
            vec!["aa", "bb", "abAB", "ab"],
        ] {
            let words: Vec<Word> = gens.iter().map(|t| w(t)).collect();
            let h = Subgroup::stallings(&words, ab());
            let oracle = (0..2).all(|i| {
                [Letter::positive(i), Letter::negative(i)]
                    .iter()
                    .all(|&l| {
                        let u = Word::from_letters(vec![l]);
                        h.generators()
                            .iter()
                            .all(|s| h.contains(&s.conjugated_by(&u)))
                    })
            }) && h.index().is_finite();
            assert_eq!(h.is_normal(), oracle, "disagreement for {gens:?}");
        }
    }

    #[test]
    fn conjugacy_examples() {
        let a = sub(&["a"]);
        let bab = sub(&["baB"]);
        let conj = a.conjugator(&bab).unwrap().unwrap();
        assert!(a.conjugate(&conj).equals(&bab).unwrap());

        assert!(a.conjugator(&sub(&["b"])).unwrap().is_none());

        let self_conj = a.conjugator(&a).unwrap().unwrap();
        assert!(a.conjugate(&self_conj).equals(&a).unwrap());
    }

    #[test]
    fn conjugate_examples() {
        let a = sub(&["a"]);
        // b⁻¹ a b generates the conjugate of ⟨a⟩ by b.
        assert!(a.conjugate(&w("b")).equals(&sub(&["Bab"])).unwrap());
        assert!(a.conjugate(&Word::empty()).equals(&a).unwrap());
    }

    #[test]
    fn presentation_counts() {
        let h = sub(&["aaa", "abaB", "AbaB"]);
        let rels = h.presentation();
        assert_eq!(rels.len(), 1);
        assert!(substitute(&rels[0], h.generators()).is_empty());

        assert!(sub(&["a", "baB"]).presentation().is_empty());

        let dup = sub(&["a", "a"]);
        let rels = dup.presentation();
        assert_eq!(rels.len(), 1);
        assert!(substitute(&rels[0], dup.generators()).is_empty());
    }

    #[test]
    fn dependence_examples() {
        let a = sub(&["a"]);
        match a.dependence(&w("aa")) {
            Dependence::Dependent { equations } => {
                assert!(!equations.is_empty());
                // Substitute h₁ ↦ a, X ↦ a²: every equation vanishes.
                let assignment = vec![w("a"), w("aa")];
                for eq in &equations {
                    assert!(substitute(eq, &assignment).is_empty());
                    assert!(
                        eq.letters().iter().any(|l| l.index() == 1),
                        "must involve X"
                    );
                }
            }
            Dependence::Independent => panic!("a² depends on ⟨a⟩"),
        }

        assert!(matches!(a.dependence(&w("b")), Dependence::Independent));

        let h = sub(&["aa", "b"]);
        match h.dependence(&w("a")) {
            Dependence::Dependent { equations } => {
                let mut assignment = h.basis();
                assignment.push(w("a"));
                for eq in &equations {
                    assert!(substitute(eq, &assignment).is_empty());
                }
            }
            Dependence::Independent => panic!("a depends on ⟨a², b⟩"),
        }
    }

    #[test]
    fn image_examples() {
        let h = sub(&["a", "baB"]);
        let image = h.image_in(&h).unwrap();
        assert!(image.equals(&h).unwrap());

        let sq = sub(&["aa"]);
        let full = sub(&["a"]);
        let image = sq.image_in(&full).unwrap();
        assert!(image.equals(&full).unwrap());

        assert!(matches!(full.image_in(&sq), Err(Error::NotASubgroup)));
    }

    #[test]
    fn round_trip_through_basis() {
        for gens in [
            vec!["aaa", "abaB", "AbaB"],
            vec!["ab", "ba"],
            vec!["a", "bb", "baaB", "babAB"],
        ] {
            let words: Vec<Word> = gens.iter().map(|t| w(t)).collect();
            let h = Subgroup::stallings(&words, ab());
            let again = Subgroup::stallings(&h.basis(), ab());
            assert!(h.equals(&again).unwrap());
            assert!(is_free_basis(&h.basis(), &ab()));
        }
    }
}
