//! Letters, alphabets, finite words, lasso (ultimately periodic) words, and
//! symbolic block words used by the marker-coded embedding.
//!
//! Lasso words denote ultimately periodic omega-words `stem . cycle^omega` and
//! are the only omega-words handled explicitly; block words are presented
//! symbolically through their block function and finite prefixes because the
//! words they denote are not ultimately periodic.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

/// Reserved marker letter separating blocks in coded words.
pub const MARKER_TOKEN: &str = "A";
/// Padding letter used inside blocks of coded words.
pub const ZERO_TOKEN: &str = "0";

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum WordError {
    #[error("alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("letter `{0}` is not in the alphabet")]
    ForeignLetter(String),
    #[error("the marker letter `A` must not belong to a base alphabet")]
    MarkerInBase,
    #[error("a base alphabet for coded words must contain the padding letter `0`")]
    MissingZero,
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("malformed lasso literal `{0}`: expected `stem(loop)`")]
    BadLassoLiteral(String),
    #[error("block index must be at least 1")]
    BlockIndexZero,
}

// --- letter interning ------------------------------------------------------

struct Interner {
    by_name: std::collections::HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

fn interner() -> &'static RwLock<Interner> {
    static CELL: OnceLock<RwLock<Interner>> = OnceLock::new();
    CELL.get_or_init(|| {
        RwLock::new(Interner {
            by_name: std::collections::HashMap::new(),
            names: Vec::new(),
        })
    })
}

/// An interned letter token. Equality and hashing are O(1); ordering follows
/// the token string so that sorted collections are stable across processes.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(token: &str) -> Letter {
        debug_assert!(
            !token.is_empty() && !token.chars().any(|c| c.is_whitespace()),
            "letter tokens are non-empty and whitespace-free"
        );
        {
            let guard = interner().read().unwrap();
            if let Some(&id) = guard.by_name.get(token) {
                return Letter(id);
            }
        }
        let mut guard = interner().write().unwrap();
        if let Some(&id) = guard.by_name.get(token) {
            return Letter(id);
        }
        let leaked: &'static str = Box::leak(token.to_owned().into_boxed_str());
        let id = guard.names.len() as u32;
        guard.names.push(leaked);
        guard.by_name.insert(leaked, id);
        Letter(id)
    }

    pub fn as_str(&self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.0 == other.0 {
            std::cmp::Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// The block marker letter.
pub fn marker() -> Letter {
    Letter::new(MARKER_TOKEN)
}

/// The padding letter.
pub fn zero() -> Letter {
    Letter::new(ZERO_TOKEN)
}

// --- alphabets --------------------------------------------------------------

/// A finite, non-empty, duplicate-free set of letters with stable ordering.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<Letter>, // sorted by token
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = Letter>>(letters: I) -> Result<Alphabet, WordError> {
        let set: BTreeSet<Letter> = letters.into_iter().collect();
        if set.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        Ok(Alphabet {
            letters: set.into_iter().collect(),
        })
    }

    pub fn from_tokens<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Result<Alphabet, WordError> {
        Alphabet::new(tokens.into_iter().map(Letter::new))
    }

    pub fn contains(&self, l: Letter) -> bool {
        self.letters.binary_search(&l).is_ok()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters in token order.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Checks that this alphabet may serve as a base alphabet for coded
    /// words: it must contain `0` and must not contain the marker.
    pub fn check_base(&self) -> Result<(), WordError> {
        if self.contains(marker()) {
            return Err(WordError::MarkerInBase);
        }
        if !self.contains(zero()) {
            return Err(WordError::MissingZero);
        }
        Ok(())
    }

    /// The alphabet extended with the marker letter.
    pub fn with_marker(&self) -> Result<Alphabet, WordError> {
        if self.contains(marker()) {
            return Err(WordError::MarkerInBase);
        }
        let mut letters = self.letters.clone();
        letters.push(marker());
        Alphabet::new(letters)
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.letters.iter().all(|&l| other.contains(l))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

// --- finite words -----------------------------------------------------------

/// A finite word: a possibly empty sequence of letters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        Word(letters.into_iter().collect())
    }

    /// Parses each character of `text` as one letter.
    pub fn from_chars(text: &str) -> Word {
        Word(text.chars().map(|c| Letter::new(&c.to_string())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn repeated(&self, times: usize) -> Word {
        let mut out = Vec::with_capacity(self.len() * times);
        for _ in 0..times {
            out.extend_from_slice(&self.0);
        }
        Word(out)
    }

    pub fn is_over(&self, alphabet: &Alphabet) -> bool {
        self.0.iter().all(|&l| alphabet.contains(l))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A word of `count` padding letters.
pub fn zeros(count: usize) -> Word {
    Word::from_letters(std::iter::repeat(zero()).take(count))
}

// --- lasso words ------------------------------------------------------------

/// An ultimately periodic omega-word `stem . cycle^omega` with a non-empty
/// cycle. Letter positions are 1-based.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LassoWord {
    stem: Word,
    cycle: Word,
}

impl LassoWord {
    pub fn new(stem: Word, cycle: Word) -> Result<LassoWord, WordError> {
        if cycle.is_empty() {
            return Err(WordError::EmptyLoop);
        }
        Ok(LassoWord { stem, cycle })
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    /// `|stem| + |cycle|`, the size used to bound enumeration corpora.
    pub fn size(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// The letter at 1-based position `i`.
    pub fn letter_at(&self, i: usize) -> Letter {
        assert!(i >= 1, "letter positions are 1-based");
        let s = self.stem.len();
        if i <= s {
            self.stem.letters()[i - 1]
        } else {
            self.cycle.letters()[(i - s - 1) % self.cycle.len()]
        }
    }

    /// The finite word made of positions `1..=n`.
    pub fn prefix(&self, n: usize) -> Word {
        Word::from_letters((1..=n).map(|i| self.letter_at(i)))
    }

    pub fn is_over(&self, alphabet: &Alphabet) -> bool {
        self.stem.is_over(alphabet) && self.cycle.is_over(alphabet)
    }

    /// The canonical representation of the denoted omega-word: the cycle is
    /// primitive (not a proper power) and the stem is shortest, obtained by
    /// absorbing trailing stem letters equal to the cycle's last letter into
    /// a rotation of the cycle.
    pub fn normalize(&self) -> LassoWord {
        let mut cycle: Vec<Letter> = self.cycle.letters().to_vec();
        let root = primitive_root_len(&cycle);
        cycle.truncate(root);
        let mut stem: Vec<Letter> = self.stem.letters().to_vec();
        while let Some(&last) = stem.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            stem.pop();
            let wrapped = cycle.pop().unwrap();
            cycle.insert(0, wrapped);
        }
        LassoWord {
            stem: Word(stem),
            cycle: Word(cycle),
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.normalize()
    }

    /// Whether the two lassos denote the same omega-word, decided by comparing
    /// letters up to twice the combined representation sizes.
    pub fn same_omega_word(&self, other: &LassoWord) -> bool {
        let bound = 2 * (self.size() + other.size());
        (1..=bound).all(|i| self.letter_at(i) == other.letter_at(i))
    }

    /// Parses the compact literal `stem(loop)`, one character per letter,
    /// ignoring whitespace; the stem may be empty, the loop may not.
    pub fn parse(text: &str) -> Result<LassoWord, WordError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let open = compact
            .find('(')
            .ok_or_else(|| WordError::BadLassoLiteral(text.to_owned()))?;
        if !compact.ends_with(')') {
            return Err(WordError::BadLassoLiteral(text.to_owned()));
        }
        let stem_part = &compact[..open];
        let cycle_part = &compact[open + 1..compact.len() - 1];
        if cycle_part.is_empty()
            || stem_part.contains(')')
            || cycle_part.contains('(')
            || cycle_part.contains(')')
        {
            return Err(WordError::BadLassoLiteral(text.to_owned()));
        }
        LassoWord::new(Word::from_chars(stem_part), Word::from_chars(cycle_part))
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.stem, self.cycle)
    }
}

impl fmt::Debug for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Length of the shortest word `r` with `w = r^k`.
fn primitive_root_len(w: &[Letter]) -> usize {
    let n = w.len();
    'candidate: for p in 1..=n {
        if n % p != 0 {
            continue;
        }
        for i in p..n {
            if w[i] != w[i - p] {
                continue 'candidate;
            }
        }
        return p;
    }
    n
}

// --- symbolic block words ---------------------------------------------------

/// An omega-word presented as an infinite concatenation of marker-prefixed
/// blocks `A b(1) A b(2) A b(3) ...`, exposed only through its block function
/// and finite prefixes. The denoted words have strictly growing blocks and are
/// not ultimately periodic, so no letter-indexed omega-view is offered.
#[derive(Clone)]
pub struct BlockWord {
    base: Alphabet,
    label: String,
    blocks: std::sync::Arc<dyn Fn(usize) -> Word + Send + Sync>,
}

impl BlockWord {
    /// The base alphabet the block contents range over (marker excluded).
    pub fn base_alphabet(&self) -> &Alphabet {
        &self.base
    }

    /// The content of block `i >= 1`, markers excluded.
    pub fn block(&self, i: usize) -> Result<Word, WordError> {
        if i == 0 {
            return Err(WordError::BlockIndexZero);
        }
        Ok((self.blocks)(i))
    }

    /// The finite prefix `A b(1) A b(2) ... A b(n)`; `n = 0` gives the empty
    /// word.
    pub fn block_prefix(&self, n: usize) -> Word {
        let mut out = Word::empty();
        for i in 1..=n {
            out.push(marker());
            out.extend_from(&(self.blocks)(i));
        }
        out
    }
}

impl fmt::Debug for BlockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// The padded block encoding of a lasso word `x`: block `i` is `0^i x(i)`.
/// The encoding is injective and prefix-compatible: words agreeing on their
/// first `n` letters share their first `n` blocks.
pub fn block_encode(x: &LassoWord, base: &Alphabet) -> Result<BlockWord, WordError> {
    base.check_base()?;
    for i in 1..=x.size() {
        let l = x.letter_at(i);
        if !base.contains(l) {
            return Err(WordError::ForeignLetter(l.as_str().to_owned()));
        }
    }
    let x = x.clone();
    Ok(BlockWord {
        base: base.clone(),
        label: format!("encode({x})"),
        blocks: std::sync::Arc::new(move |i| {
            let mut w = zeros(i);
            w.push(x.letter_at(i));
            w
        }),
    })
}

/// The fixed reference word whose block `i` is `0^i`: a ruler of strictly
/// growing runs of padding letters.
pub fn zero_ruler(base: &Alphabet) -> Result<BlockWord, WordError> {
    base.check_base()?;
    Ok(BlockWord {
        base: base.clone(),
        label: "ruler".to_owned(),
        blocks: std::sync::Arc::new(zeros),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lasso(text: &str) -> LassoWord {
        LassoWord::parse(text).unwrap()
    }

    #[test]
    fn letter_interning_is_stable() {
        assert_eq!(Letter::new("a"), Letter::new("a"));
        assert_ne!(Letter::new("a"), Letter::new("b"));
        assert_eq!(Letter::new("ab").as_str(), "ab");
        assert!(Letter::new("a") < Letter::new("b"));
        assert!(Letter::new("0") < Letter::new("A"));
    }

    #[test]
    fn alphabet_rejects_empty_and_dedups() {
        assert_eq!(Alphabet::new([]), Err(WordError::EmptyAlphabet));
        let ab = Alphabet::from_tokens(["b", "a", "a"]).unwrap();
        assert_eq!(ab.len(), 2);
        assert_eq!(ab.letters()[0], Letter::new("a"));
    }

    #[test]
    fn marker_handling_in_base_alphabets() {
        let base = Alphabet::from_tokens(["0", "a"]).unwrap();
        base.check_base().unwrap();
        let full = base.with_marker().unwrap();
        assert!(full.contains(marker()));
        assert_eq!(full.with_marker(), Err(WordError::MarkerInBase));
        let no_zero = Alphabet::from_tokens(["a"]).unwrap();
        assert_eq!(no_zero.check_base(), Err(WordError::MissingZero));
    }

    #[test]
    fn lasso_letter_at_matches_naive_unrolling() {
        let w = lasso("ab(cab)");
        let mut unrolled = String::from("ab");
        while unrolled.len() < 1000 {
            unrolled.push_str("cab");
        }
        for (i, c) in unrolled.chars().enumerate().take(1000) {
            assert_eq!(w.letter_at(i + 1).as_str(), c.to_string());
        }
    }

    #[test]
    fn parse_and_render_lasso_literals() {
        assert_eq!(lasso("ab(c)").to_string(), "ab(c)");
        assert_eq!(lasso("(c)").stem().len(), 0);
        assert_eq!(lasso(" a b ( c ) ").to_string(), "ab(c)");
        assert!(LassoWord::parse("ab").is_err());
        assert!(LassoWord::parse("ab()").is_err());
        assert!(LassoWord::parse("a(b)c").is_err());
        assert!(LassoWord::parse("a((b)").is_err());
    }

    #[test]
    fn normalize_shrinks_power_loops_and_absorbs_stems() {
        // Loop reduced to its primitive root.
        assert_eq!(lasso("(abab)").normalize(), lasso("(ab)"));
        // Trailing stem letters equal to the loop's last letter rotate in.
        assert_eq!(lasso("ab(b)").normalize(), lasso("a(b)"));
        assert_eq!(lasso("abb(ab)").normalize(), lasso("ab(ba)"));
        // Both reductions together: aba(baba) spells out ababab...
        assert_eq!(lasso("aba(baba)").normalize(), lasso("(ab)"));
    }

    #[test]
    fn normalize_preserves_the_denoted_word() {
        let samples = [
            "ab(ba)", "(a)", "aaa(a)", "ab(b)", "abc(cc)", "a(ab)", "(ab)",
            "bbb(ab)", "0A(0A)", "A(0)",
        ];
        for s in samples {
            let w = lasso(s);
            let n = w.normalize();
            assert!(w.same_omega_word(&n), "{w} vs {n}");
            assert!(n.is_canonical(), "{n} not canonical");
        }
    }

    #[test]
    fn normalize_keeps_minimal_nonabsorbable_forms() {
        // The stem's last letter differs from the loop's last letter, so this
        // form is already the canonical one; the denoted word is not a(bb)^w.
        let w = lasso("ab(ba)");
        assert_eq!(w.normalize(), w);
        assert!(!w.same_omega_word(&lasso("a(bb)")));
    }

    #[test]
    fn distinct_canonical_forms_denote_distinct_words() {
        let ws = ["(a)", "(b)", "a(b)", "b(a)", "ab(a)", "(ab)", "(ba)", "aa(b)"];
        for (i, a) in ws.iter().enumerate() {
            for (j, b) in ws.iter().enumerate() {
                let wa = lasso(a).normalize();
                let wb = lasso(b).normalize();
                assert_eq!(wa == wb, i == j, "{a} vs {b}");
                assert_eq!(wa.same_omega_word(&wb), i == j, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn block_encode_produces_padded_blocks() {
        let base = Alphabet::from_tokens(["0", "a", "b", "c"]).unwrap();
        let h = block_encode(&lasso("ab(c)"), &base).unwrap();
        assert_eq!(h.block(1).unwrap().to_string(), "0a");
        assert_eq!(h.block(2).unwrap().to_string(), "00b");
        assert_eq!(h.block(3).unwrap().to_string(), "000c");
        assert_eq!(h.block_prefix(2).to_string(), "A0aA00b");
        assert_eq!(h.block_prefix(0), Word::empty());
        assert!(h.block(0).is_err());
    }

    #[test]
    fn zero_ruler_blocks_grow_one_per_index() {
        let base = Alphabet::from_tokens(["0", "a"]).unwrap();
        let r = zero_ruler(&base).unwrap();
        assert_eq!(r.block(3).unwrap().to_string(), "000");
        assert_eq!(r.block_prefix(2).to_string(), "A0A00");
    }

    #[test]
    fn block_encode_validates_the_base_alphabet() {
        let no_zero = Alphabet::from_tokens(["a", "b"]).unwrap();
        assert!(block_encode(&lasso("a(b)"), &no_zero).is_err());
        let with_marker = Alphabet::from_tokens(["0", "a", "A"]).unwrap();
        assert!(zero_ruler(&with_marker).is_err());
        let base = Alphabet::from_tokens(["0", "a"]).unwrap();
        assert!(block_encode(&lasso("a(q)"), &base).is_err());
    }
}
