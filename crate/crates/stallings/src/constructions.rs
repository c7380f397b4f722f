//! Finite-index census, saturation constructions, and the fringe of a
//! subgroup.
//!
//! Finite-index subgroups are exactly the saturated reduced automata, which
//! for rank `n` and index `k` are `n`-tuples of permutations of the vertex
//! set acting transitively, taken up to relabelings fixing the basepoint.
//! This module counts them (Hall's recursion), enumerates them in canonical
//! form, and implements the two classical saturation constructions: a
//! finite-index subgroup avoiding a given word, and a finite-index envelope
//! containing a given subgroup as a free factor.

use std::collections::HashSet;

use num_bigint::BigUint;

use crate::automaton::{Automaton, VertexId};
use crate::folding;
use crate::subgroup::Subgroup;
use crate::words::{free_reduce, Alphabet, Letter, Word};
use crate::{Error, Result};

/// Default cap on `k!^(n−1)·k` for [`enumerate_index`].
pub const DEFAULT_ENUM_BOUND: u64 = 5_000_000;

/// Default cap on `|V(St(H))|` for [`fringe`] (partition count grows like a
/// Bell number).
pub const DEFAULT_FRINGE_BOUND: usize = 10;

/// One finite-index subgroup of the census: its saturated canonical
/// automaton with the derived index and rank. The full [`Subgroup`] is
/// built on demand.
#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub automaton: Automaton,
    pub index: usize,
    pub rank: usize,
}

impl CensusEntry {
    pub fn subgroup(&self) -> Subgroup {
        Subgroup::from_automaton(&self.automaton).expect("census automaton is reduced")
    }

    /// JSON-lines record: automaton plus derived data.
    pub fn to_json(&self) -> String {
        let automaton: serde_json::Value =
            serde_json::from_str(&self.automaton.to_json()).expect("valid json");
        serde_json::json!({
            "automaton": automaton,
            "index": self.index,
            "rank": self.rank,
        })
        .to_string()
    }
}

/// Number of subgroups of index `k` in the free group of rank `n`, by the
/// recursion `N₁ = 1`, `N_k = k·(k!)^(n−1) − Σ_{i<k} ((k−i)!)^(n−1)·N_i`.
pub fn count_index(n: usize, k: usize) -> BigUint {
    assert!(n >= 1 && k >= 1, "rank and index must be positive");
    let mut factorial: Vec<BigUint> = vec![BigUint::from(1u32)];
    for m in 1..=k {
        let next = &factorial[m - 1] * BigUint::from(m);
        factorial.push(next);
    }
    let mut counts: Vec<BigUint> = vec![BigUint::from(0u32); k + 1];
    counts[1] = BigUint::from(1u32);
    for m in 2..=k {
        let mut total = BigUint::from(m) * factorial[m].pow((n - 1) as u32);
        for i in 1..m {
            total -= factorial[m - i].pow((n - 1) as u32) * &counts[i];
        }
        counts[m] = total;
    }
    counts[k].clone()
}

/// Enumerates every index-`k` subgroup of the rank-`n` free group exactly
/// once, as canonical saturated automata: backtracking over the transition
/// table with vertices numbered in BFS discovery order.
pub fn enumerate_index(n: usize, k: usize, bound: u64) -> Result<Vec<CensusEntry>> {
    assert!(n >= 1 && k >= 1, "rank and index must be positive");
    let mut factorial = BigUint::from(1u32);
    for m in 2..=k {
        factorial *= BigUint::from(m);
    }
    let cost = BigUint::from(k) * factorial.pow((n - 1) as u32);
    if cost > BigUint::from(bound) {
        return Err(Error::BoundExceeded(format!(
            "k!^(n-1)·k = {cost} exceeds {bound}"
        )));
    }
    let slots = 2 * n;
    let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; slots]; k];
    let mut out = Vec::new();
    fill(&mut table, 0, 1, n, k, &mut out);
    Ok(out)
}

fn fill(
    table: &mut Vec<Vec<Option<usize>>>,
    position: usize,
    discovered: usize,
    n: usize,
    k: usize,
    out: &mut Vec<CensusEntry>,
) {
    let slots = 2 * n;
    if position == k * slots {
        if discovered == k {
            out.push(entry_from_table(table, n, k));
        }
        return;
    }
    let (v, s) = (position / slots, position % slots);
    if v >= discovered {
        // Vertex never reached: the action would not be transitive.
        return;
    }
    if table[v][s].is_some() {
        fill(table, position + 1, discovered, n, k, out);
        return;
    }
    let inv = s ^ 1;
    for w in 0..discovered.min(k) {
        if table[w][inv].is_none() {
            table[v][s] = Some(w);
            table[w][inv] = Some(v);
            fill(table, position + 1, discovered, n, k, out);
            table[v][s] = None;
            table[w][inv] = None;
        }
    }
    if discovered < k {
        let w = discovered;
        table[v][s] = Some(w);
        table[w][inv] = Some(v);
        fill(table, position + 1, discovered + 1, n, k, out);
        table[v][s] = None;
        table[w][inv] = None;
    }
}

fn entry_from_table(table: &[Vec<Option<usize>>], n: usize, k: usize) -> CensusEntry {
    let alphabet = Alphabet::new(n).expect("positive rank");
    let mut aut = Automaton::new(alphabet);
    for _ in 1..k {
        aut.add_vertex();
    }
    for (v, row) in table.iter().enumerate() {
        for letter in 0..n {
            let w = row[2 * letter].expect("complete table");
            aut.add_arc(VertexId(v), VertexId(w), letter);
        }
    }
    debug_assert!(aut.is_deterministic() && aut.is_saturated());
    debug_assert_eq!(aut.canonicalize().unwrap(), aut);
    let rank = aut.rank().expect("transitive action is connected");
    CensusEntry {
        automaton: aut,
        index: k,
        rank,
    }
}

/// A subgroup of index `|w|+1` not containing `w`: saturate the path
/// automaton reading `w` by pairing deficient vertices (ascending ids on
/// both sides).
pub fn avoid_element(w: &Word, alphabet: &Alphabet) -> Result<Subgroup> {
    let red = free_reduce(w);
    if red.is_empty() {
        return Err(Error::TrivialWord);
    }
    let mut aut = Automaton::new(alphabet.clone());
    let end = aut.graft_thread(&red);
    debug_assert_eq!(end.0, red.len());
    saturate_by_pairing(&mut aut);
    debug_assert!(aut.is_saturated() && aut.is_deterministic());
    debug_assert_ne!(aut.read(aut.basepoint(), &red), Ok(aut.basepoint()));
    Subgroup::from_automaton(&aut)
}

/// Adds one arc per (deficient source, deficient target) pair, per letter,
/// ascending vertex ids on both sides. Determinism is preserved and the
/// result is saturated.
fn saturate_by_pairing(aut: &mut Automaton) {
    for letter in 0..aut.alphabet().rank() {
        let sources: Vec<VertexId> = aut
            .vertices()
            .filter(|&v| aut.step(v, Letter::positive(letter)).is_none())
            .collect();
        let targets: Vec<VertexId> = aut
            .vertices()
            .filter(|&v| aut.step(v, Letter::negative(letter)).is_none())
            .collect();
        debug_assert_eq!(sources.len(), targets.len());
        for (&src, &dst) in sources.iter().zip(&targets) {
            aut.add_arc(src, dst, letter);
        }
    }
}

/// A finite-index subgroup containing `h` as a free factor and excluding
/// every word in `avoid`: graft threads spelling the avoided words, then
/// saturate by deficiency pairing, backtracking over pairings with an
/// exclusion check after every added arc.
pub fn finite_index_envelope(h: &Subgroup, avoid: &[Word]) -> Result<Subgroup> {
    let avoid: Vec<Word> = avoid.iter().map(free_reduce).collect();
    for s in &avoid {
        if h.contains(s) {
            return Err(Error::AvoidWordInSubgroup);
        }
    }
    let mut aut = h.automaton().clone();
    for s in &avoid {
        aut.graft_thread(s);
    }
    // Per-letter deficits; later arcs only fill them, never create more.
    let mut pairings: Vec<(usize, Vec<VertexId>, Vec<VertexId>)> = Vec::new();
    for letter in 0..aut.alphabet().rank() {
        let sources: Vec<VertexId> = aut
            .vertices()
            .filter(|&v| aut.step(v, Letter::positive(letter)).is_none())
            .collect();
        let targets: Vec<VertexId> = aut
            .vertices()
            .filter(|&v| aut.step(v, Letter::negative(letter)).is_none())
            .collect();
        debug_assert_eq!(sources.len(), targets.len());
        if !sources.is_empty() {
            pairings.push((letter, sources, targets));
        }
    }
    let mut used: Vec<Vec<bool>> = pairings
        .iter()
        .map(|(_, _, targets)| vec![false; targets.len()])
        .collect();
    if search_pairing(&mut aut, &pairings, &mut used, 0, 0, h, &avoid) {
        debug_assert!(aut.is_saturated());
        Subgroup::from_automaton(&aut)
    } else {
        Err(Error::PairingExhausted)
    }
}

fn search_pairing(
    aut: &mut Automaton,
    pairings: &[(usize, Vec<VertexId>, Vec<VertexId>)],
    used: &mut [Vec<bool>],
    group: usize,
    row: usize,
    h: &Subgroup,
    avoid: &[Word],
) -> bool {
    if group == pairings.len() {
        return avoid
            .iter()
            .all(|s| aut.read(aut.basepoint(), s) != Ok(aut.basepoint()));
    }
    let (letter, sources, targets) = &pairings[group];
    if row == sources.len() {
        return search_pairing(aut, pairings, used, group + 1, 0, h, avoid);
    }
    let src = sources[row];
    for j in 0..targets.len() {
        if used[group][j] {
            continue;
        }
        let id = aut.add_arc(src, targets[j], *letter);
        used[group][j] = true;
        let excluded = avoid
            .iter()
            .all(|s| aut.read(aut.basepoint(), s) != Ok(aut.basepoint()));
        if excluded && search_pairing(aut, pairings, used, group, row + 1, h, avoid) {
            return true;
        }
        used[group][j] = false;
        aut.remove_arc(id);
    }
    false
}

/// The fringe of `h`: for every partition of the vertex set of its
/// automaton, the subgroup recognized by the quotient. Finitely many
/// subgroups, each containing `h`; includes `h` (trivial partition) and
/// every image of `h` inside an overgroup.
pub fn fringe(h: &Subgroup, max_vertices: usize) -> Result<Vec<Subgroup>> {
    let aut = h.automaton();
    let m = aut.num_vertices();
    if m > max_vertices {
        return Err(Error::BoundExceeded(format!(
            "automaton has {m} vertices, fringe bound is {max_vertices}"
        )));
    }
    let vertices: Vec<VertexId> = aut.vertices().collect();
    let mut seen: HashSet<(usize, usize, Vec<(usize, usize, usize)>)> = HashSet::new();
    let mut out: Vec<Subgroup> = Vec::new();
    let mut assignment = vec![0usize; m];
    loop {
        let block_count = assignment.iter().copied().max().unwrap_or(0) + 1;
        let mut blocks: Vec<Vec<VertexId>> = vec![Vec::new(); block_count];
        for (i, &b) in assignment.iter().enumerate() {
            blocks[b].push(vertices[i]);
        }
        let quotient = aut.quotient(&blocks)?;
        let (reduced, _) = folding::reduce(&quotient);
        let canon = reduced.canonicalize()?;
        if seen.insert(canon.canonical_key()) {
            out.push(Subgroup::from_automaton(&canon)?);
        }
        if !next_partition(&mut assignment) {
            break;
        }
    }
    Ok(out)
}

/// Advances a restricted-growth string to the next set partition; false
/// when exhausted.
fn next_partition(assignment: &mut [usize]) -> bool {
    let m = assignment.len();
    for i in (1..m).rev() {
        let max_prefix = assignment[..i].iter().copied().max().unwrap_or(0);
        if assignment[i] <= max_prefix {
            assignment[i] += 1;
            for a in assignment[i + 1..].iter_mut() {
                *a = 0;
            }
            return true;
        }
    }
    false
}
