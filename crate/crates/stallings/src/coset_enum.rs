//! Coset enumeration for finitely presented quotients, by layered flower
//! attachment and folding.
//!
//! To enumerate the cosets of `⟨S⟩` in `⟨A | R⟩`, fold the flower of `S`,
//! then repeatedly attach a flower of the relators at every vertex and fold
//! again. When the subgroup has finite index the sequence stabilizes at the
//! full coset automaton of `⟨S⟩⟪R⟫ ≤ F(A)`; termination in general is
//! undecidable, so the iteration is capped.

use crate::automaton::{flower, Automaton};
use crate::folding;
use crate::words::{free_reduce, Alphabet, Word};
use crate::{Error, Result};

/// Default cap on attachment rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 64;

/// A finite presentation `⟨alphabet | relators⟩`. Relators are stored
/// freely reduced; words reducing to the empty word are dropped.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Self {
        let relators = relators
            .iter()
            .map(free_reduce)
            .filter(|w| !w.is_empty())
            .collect();
        Presentation { alphabet, relators }
    }

    /// Parses the presentation file format: the first nonempty line lists
    /// the generator names (juxtaposed or whitespace-separated), each
    /// following nonempty line is one relator word.
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(Error::EmptyAlphabet)?;
        let names: Vec<char> = header.chars().filter(|c| !c.is_whitespace()).collect();
        let alphabet = Alphabet::with_names(names)?;
        let relators = lines
            .map(|l| crate::words::parse_word(l, &alphabet))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation::new(alphabet, relators))
    }
}

/// Outcome of coset enumeration.
#[derive(Clone, Debug)]
pub enum CosetEnumOutcome {
    /// The iteration stabilized on a saturated automaton: the index of
    /// `⟨S⟩` in `⟨A | R⟩` is finite and the transversal lists coset
    /// representatives, `ε` first.
    Finite {
        index: usize,
        transversal: Vec<Word>,
        automaton: Automaton,
    },
    /// No stabilization within the round cap: the index may be infinite or
    /// the cap too small (undecidable in general).
    Exhausted {
        rounds: usize,
        last_vertex_count: usize,
    },
}

impl CosetEnumOutcome {
    pub fn index(&self) -> Option<usize> {
        match self {
            CosetEnumOutcome::Finite { index, .. } => Some(*index),
            CosetEnumOutcome::Exhausted { .. } => None,
        }
    }
}

/// Enumerates the cosets of the subgroup generated by `generators` in the
/// group presented by `presentation`.
///
/// Each round attaches the relator flower at every vertex and folds;
/// success requires consecutive iterates to be isomorphic *and* saturated
/// (petals just attached always leave unsaturated vertices mid-stream).
pub fn enumerate_cosets(
    presentation: &Presentation,
    generators: &[Word],
    max_rounds: usize,
) -> Result<CosetEnumOutcome> {
    assert!(max_rounds >= 1, "at least one round is required");
    let gens: Vec<Word> = generators
        .iter()
        .map(free_reduce)
        .filter(|w| !w.is_empty())
        .collect();
    let (folded, _) = folding::reduce(&flower(&gens, presentation.alphabet.clone()));
    let mut current = folded.canonicalize()?;
    for round in 1..=max_rounds {
        let mut next = current.clone();
        for v in current.vertices() {
            for r in &presentation.relators {
                next.attach_petal(v, r);
            }
        }
        let (folded, _) = folding::reduce(&next);
        let folded = folded.canonicalize()?;
        if folded == current && folded.is_saturated() {
            let tree = folded.spanning_tree()?;
            let transversal = tree
                .order()
                .iter()
                .map(|&v| tree.path_word(&folded, v))
                .collect::<Result<Vec<_>>>()?;
            return Ok(CosetEnumOutcome::Finite {
                index: folded.num_vertices(),
                transversal,
                automaton: folded,
            });
        }
        if round == max_rounds {
            return Ok(CosetEnumOutcome::Exhausted {
                rounds: round,
                last_vertex_count: folded.num_vertices(),
            });
        }
        current = folded;
    }
    unreachable!("loop returns on the last round")
}
