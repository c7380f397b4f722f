//! Alphabets, signed letters, and free-group words.
//!
//! A word is a finite sequence of signed letters over an alphabet of rank
//! `n`. Reduction (cancelling adjacent mutually inverse letters) is the only
//! nontrivial operation; everything downstream identifies group elements
//! with their unique reduced representatives.

use std::fmt;

use crate::{Error, Result};

/// The basis of the ambient free group: `rank` generators with single-letter
/// printable names (defaults `a, b, c, …`).
///
/// Inverses are written as the uppercase form of the generator name, so names
/// must be distinct lowercase ASCII letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    /// Rank-`n` alphabet with default names `a, b, c, …`.
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if rank > 26 {
            return Err(Error::BadAlphabetNames(
                "default names support rank at most 26".into(),
            ));
        }
        let names = (0..rank).map(|i| (b'a' + i as u8) as char).collect();
        Ok(Alphabet { names })
    }

    /// Alphabet with explicit generator names.
    pub fn with_names(names: Vec<char>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for &c in &names {
            if !c.is_ascii_lowercase() {
                return Err(Error::BadAlphabetNames(format!(
                    "name {c:?} is not a lowercase ascii letter"
                )));
            }
        }
        for (i, &c) in names.iter().enumerate() {
            if names[..i].contains(&c) {
                return Err(Error::BadAlphabetNames(format!("duplicate name {c:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Name of the 0-based generator `index`.
    pub fn name(&self, index: usize) -> char {
        self.names[index]
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    /// 0-based generator index of a lowercase name, if it belongs to the
    /// alphabet.
    pub fn index_of(&self, name: char) -> Option<usize> {
        self.names.iter().position(|&c| c == name)
    }

    /// All signed letters in canonical order `a, a⁻¹, b, b⁻¹, …`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.rank()).flat_map(|i| [Letter::positive(i), Letter::negative(i)])
    }
}

/// A signed generator: generator `index` (0-based) or its formal inverse.
///
/// The `Ord` instance follows the canonical letter order
/// `a < a⁻¹ < b < b⁻¹ < …` used for every tie-break in the crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    code: i32, // nonzero; +k is generator k-1, -k its inverse
}

impl Letter {
    pub fn positive(index: usize) -> Self {
        Letter {
            code: (index as i32) + 1,
        }
    }

    pub fn negative(index: usize) -> Self {
        Letter {
            code: -((index as i32) + 1),
        }
    }

    /// 0-based generator index, forgetting the sign.
    pub fn index(self) -> usize {
        (self.code.unsigned_abs() as usize) - 1
    }

    pub fn is_positive(self) -> bool {
        self.code > 0
    }

    pub fn inverse(self) -> Self {
        Letter { code: -self.code }
    }

    /// Dense slot in `0..2n`: generator `i` occupies `2i` (positive) and
    /// `2i + 1` (inverse). Slots order letters canonically.
    pub fn slot(self) -> usize {
        2 * self.index() + usize::from(!self.is_positive())
    }

    pub fn from_slot(slot: usize) -> Self {
        if slot % 2 == 0 {
            Letter::positive(slot / 2)
        } else {
            Letter::negative(slot / 2)
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.slot().cmp(&other.slot())
    }
}

/// A free-group word: a sequence of signed letters, together with a flag
/// recording whether it is known to be freely reduced.
///
/// The flag is a cache; equality and hashing look at the letters only.
#[derive(Clone, Debug)]
pub struct Word {
    letters: Vec<Letter>,
    reduced: bool,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Word {}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl Word {
    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
            reduced: true,
        }
    }

    /// A raw word from explicit letters. Marked reduced only if a scan says
    /// so.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let reduced = scan_reduced(&letters);
        Word { letters, reduced }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced || scan_reduced(&self.letters)
    }

    /// `w⁻¹`: reverse the letters and invert each.
    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            reduced: self.reduced,
        }
    }

    /// Raw concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::from_letters(letters)
    }

    /// `u⁻¹ · self · u`, freely reduced.
    pub fn conjugated_by(&self, u: &Word) -> Word {
        free_reduce(&u.inverse().concat(self).concat(u))
    }

    /// `self^k` for any integer exponent, freely reduced.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        free_reduce(&out)
    }

    /// Largest generator index used, if any.
    pub fn max_index(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.index()).max()
    }
}

fn scan_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

/// The unique freely reduced word equal to `w` in the free group.
///
/// Single left-to-right stack pass; idempotent.
pub fn free_reduce(w: &Word) -> Word {
    if w.reduced {
        return w.clone();
    }
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word {
        letters: stack,
        reduced: true,
    }
}

/// Cyclic reduction: returns `(core, u)` with `w = u · core · u⁻¹` after free
/// reduction and `core` cyclically reduced (i.e. `core²` is reduced).
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let red = free_reduce(w);
    let letters = red.letters;
    let mut lo = 0;
    let mut hi = letters.len();
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    let conjugator = Word {
        letters: letters[..lo].to_vec(),
        reduced: true,
    };
    let core = Word {
        letters: letters[lo..hi].to_vec(),
        reduced: true,
    };
    (core, conjugator)
}

/// Output style for [`format_word`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Style {
    /// `aB` — lowercase generators, uppercase inverses.
    Compact,
    /// `a b^-1` — whitespace-separated factors with collapsed exponents.
    Caret,
}

/// Parses a word in either style (they share one grammar: letters with
/// optional `^exponent`, whitespace separated or juxtaposed).
///
/// Uppercase letters denote inverses, `x^k` repeats, `x^-k` repeats the
/// inverse, and `x^0` contributes nothing. Returns the raw letter sequence;
/// no reduction is performed.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word> {
    let mut letters = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() || c == '*' || c == '.' {
            continue;
        }
        let (index, positive) = if c.is_ascii_lowercase() {
            match alphabet.index_of(c) {
                Some(i) => (i, true),
                None => return Err(Error::UnknownLetter(c)),
            }
        } else if c.is_ascii_uppercase() {
            let lower = c.to_ascii_lowercase();
            match alphabet.index_of(lower) {
                Some(i) => (i, false),
                None => return Err(Error::UnknownLetter(c)),
            }
        } else {
            return Err(Error::UnknownLetter(c));
        };
        let base = if positive {
            Letter::positive(index)
        } else {
            Letter::negative(index)
        };
        let mut exponent: i64 = 1;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            if chars.peek() == Some(&'-') || chars.peek() == Some(&'+') {
                digits.push(chars.next().unwrap());
            }
            while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                digits.push(chars.next().unwrap());
            }
            exponent = digits
                .parse()
                .map_err(|_| Error::MalformedExponent(text.to_string()))?;
        }
        let letter = if exponent >= 0 { base } else { base.inverse() };
        for _ in 0..exponent.unsigned_abs() {
            letters.push(letter);
        }
    }
    Ok(Word::from_letters(letters))
}

/// Formats a word; round-trips letter-for-letter through [`parse_word`] in
/// both styles.
pub fn format_word(w: &Word, style: Style, alphabet: &Alphabet) -> String {
    match style {
        Style::Compact => w
            .letters
            .iter()
            .map(|l| {
                let name = alphabet.name(l.index());
                if l.is_positive() {
                    name
                } else {
                    name.to_ascii_uppercase()
                }
            })
            .collect(),
        Style::Caret => {
            let mut parts: Vec<String> = Vec::new();
            let mut i = 0;
            while i < w.letters.len() {
                let l = w.letters[i];
                let mut run = 1;
                while i + run < w.letters.len() && w.letters[i + run] == l {
                    run += 1;
                }
                let name = alphabet.name(l.index());
                let exp = if l.is_positive() {
                    run as i64
                } else {
                    -(run as i64)
                };
                if exp == 1 {
                    parts.push(name.to_string());
                } else {
                    parts.push(format!("{name}^{exp}"));
                }
                i += run;
            }
            parts.join(" ")
        }
    }
}

/// Helper for displaying a word with its alphabet.
pub struct DisplayWord<'a> {
    pub word: &'a Word,
    pub alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self.word, Style::Compact, self.alphabet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(text: &str) -> Word {
        parse_word(text, &ab()).unwrap()
    }

    #[test]
    fn parse_compact() {
        let word = w("abA");
        assert_eq!(
            word.letters(),
            &[
                Letter::positive(0),
                Letter::positive(1),
                Letter::negative(0)
            ]
        );
    }

    #[test]
    fn parse_exponent() {
        assert_eq!(w("a^3").letters(), &[Letter::positive(0); 3]);
        assert_eq!(w("a^-2").letters(), &[Letter::negative(0); 2]);
        assert!(w("a^0").is_empty());
    }

    #[test]
    fn parse_unknown_letter() {
        assert!(matches!(
            parse_word("c", &ab()),
            Err(Error::UnknownLetter('c'))
        ));
        assert!(matches!(
            parse_word("a!", &ab()),
            Err(Error::UnknownLetter('!'))
        ));
    }

    #[test]
    fn parse_malformed_exponent() {
        assert!(matches!(
            parse_word("a^", &ab()),
            Err(Error::MalformedExponent(_))
        ));
        assert!(matches!(
            parse_word("a^-", &ab()),
            Err(Error::MalformedExponent(_))
        ));
    }

    #[test]
    fn reduce_examples() {
        assert!(free_reduce(&w("aA")).is_empty());
        assert!(free_reduce(&w("abBA")).is_empty());
        // (a⁻¹bab⁻¹)(ba⁻¹b⁻¹a⁻¹)(aaa) = a
        let prod = w("AbaB").concat(&w("BaBA").inverse()).concat(&w("aaa"));
        // The middle factor written directly: b a⁻¹ b⁻¹ a⁻¹.
        let prod2 = w("AbaB").concat(&w("bABA")).concat(&w("aaa"));
        assert_eq!(free_reduce(&prod2), w("a"));
        // Sanity: the other spelling reduces too, to a conjugate-free result.
        assert_eq!(free_reduce(&prod).len() % 2, 1);
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = cyclic_reduce(&w("abA"));
        assert_eq!(core, w("b"));
        assert_eq!(conj, w("a"));

        let (core, conj) = cyclic_reduce(&w("bb"));
        assert_eq!(core, w("bb"));
        assert!(conj.is_empty());

        let (core, conj) = cyclic_reduce(&w("Abba"));
        assert_eq!(core, w("bb"));
        assert_eq!(conj, w("A"));
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_word(&w("aB"), Style::Compact, &ab()), "aB");
        assert_eq!(format_word(&w("aaa"), Style::Caret, &ab()), "a^3");
        assert_eq!(format_word(&Word::empty(), Style::Compact, &ab()), "");
        assert_eq!(format_word(&w("aBB"), Style::Caret, &ab()), "a b^-2");
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::with_names(vec!['a', 'a']).is_err());
        assert!(Alphabet::with_names(vec!['A']).is_err());
        assert_eq!(Alphabet::new(3).unwrap().name(2), 'c');
    }

    #[test]
    fn letter_order_is_canonical() {
        let mut letters: Vec<Letter> = ab().letters().collect();
        letters.sort();
        assert_eq!(
            letters,
            vec![
                Letter::positive(0),
                Letter::negative(0),
                Letter::positive(1),
                Letter::negative(1)
            ]
        );
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..2, proptest::bool::ANY), 0..max_len).prop_map(|ls| {
            Word::from_letters(
                ls.into_iter()
                    .map(|(i, pos)| {
                        if pos {
                            Letter::positive(i)
                        } else {
                            Letter::negative(i)
                        }
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn reduce_idempotent(word in arb_word(40)) {
            let once = free_reduce(&word);
            prop_assert_eq!(free_reduce(&once), once.clone());
            prop_assert!(once.is_reduced());
        }

        #[test]
        fn reduce_cancels_inverse(word in arb_word(30)) {
            prop_assert!(free_reduce(&word.concat(&word.inverse())).is_empty());
        }

        #[test]
        fn reduce_shrinks_with_even_parity(word in arb_word(40)) {
            let red = free_reduce(&word);
            prop_assert!(red.len() <= word.len());
            prop_assert_eq!((word.len() - red.len()) % 2, 0);
        }

        #[test]
        fn cyclic_core_squares_reduced(word in arb_word(30)) {
            let (core, conj) = cyclic_reduce(&word);
            prop_assert!(core.len() <= free_reduce(&word).len());
            prop_assert!(core.concat(&core).is_reduced());
            let rebuilt = conj.concat(&core).concat(&conj.inverse());
            prop_assert_eq!(free_reduce(&rebuilt), free_reduce(&word));
        }

        #[test]
        fn format_parse_round_trip(word in arb_word(30)) {
            let alphabet = ab();
            for style in [Style::Compact, Style::Caret] {
                let text = format_word(&word, style, &alphabet);
                let back = parse_word(&text, &alphabet).unwrap();
                prop_assert_eq!(back.letters(), word.letters());
            }
        }
    }
}
