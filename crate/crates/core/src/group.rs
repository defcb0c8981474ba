//! Free products of cyclic groups and their normal forms.
//!
//! Every built-in group is a free product `C_1 * ... * C_k` of cyclic
//! factors; the free group of rank `k` is the product of `k` infinite cyclic
//! factors. Elements are stored as reduced syllable sequences, which makes the
//! normal form unique and the word length the sum of the syllable lengths.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Generator names, one per factor. `e` is reserved for the identity.
const FACTOR_NAMES: &[u8; 25] = b"abcdfghijklmnopqrstuvwxyz";

/// Order of a cyclic factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CyclicOrder {
    Finite(u32),
    Infinite,
}

impl CyclicOrder {
    fn as_option(self) -> Option<u32> {
        match self {
            CyclicOrder::Finite(n) => Some(n),
            CyclicOrder::Infinite => None,
        }
    }
}

impl Serialize for CyclicOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CyclicOrder::Finite(n) => serializer.serialize_u32(*n),
            CyclicOrder::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CyclicOrder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(u32),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(n) => Ok(CyclicOrder::Finite(n)),
            Repr::Text(s) if s == "inf" || s == "infinity" => Ok(CyclicOrder::Infinite),
            Repr::Text(s) => {
                Err(serde::de::Error::custom(format!("cyclic order must be an integer or \"inf\", got {s:?}")))
            }
        }
    }
}

/// A finitely generated group with infinitely many ends, given by one of the
/// built-in presentation families.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Presentation {
    #[serde(rename = "free")]
    FreeGroup { rank: u32 },
    #[serde(rename = "free_product_cyclic")]
    FreeProductOfCyclics { orders: Vec<CyclicOrder> },
}

impl Presentation {
    pub fn free(rank: u32) -> Self {
        Presentation::FreeGroup { rank }
    }

    /// Free product of cyclic groups; `0` stands for an infinite cyclic factor.
    pub fn free_product(orders: &[u32]) -> Self {
        Presentation::FreeProductOfCyclics {
            orders: orders
                .iter()
                .map(|&n| if n == 0 { CyclicOrder::Infinite } else { CyclicOrder::Finite(n) })
                .collect(),
        }
    }

    fn factor_orders(&self) -> Vec<Option<u32>> {
        match self {
            Presentation::FreeGroup { rank } => vec![None; *rank as usize],
            Presentation::FreeProductOfCyclics { orders } => orders.iter().map(|o| o.as_option()).collect(),
        }
    }

    /// Checks the infinitely-many-ends condition.
    pub fn validate(&self) -> Result<()> {
        let reject = |reason: &str| {
            Err(Error::InvalidPresentation { presentation: self.to_string(), reason: reason.to_string() })
        };
        match self {
            Presentation::FreeGroup { rank } => {
                if *rank < 2 {
                    return reject("free groups need rank >= 2 to have infinitely many ends");
                }
            }
            Presentation::FreeProductOfCyclics { orders } => {
                if orders.len() < 2 {
                    return reject("a free product needs at least two factors");
                }
                if orders.iter().any(|o| matches!(o, CyclicOrder::Finite(n) if *n < 2)) {
                    return reject("finite cyclic factors need order >= 2");
                }
                if orders.len() == 2 && orders.iter().all(|o| *o == CyclicOrder::Finite(2)) {
                    return reject("Z/2 * Z/2 is two-ended");
                }
            }
        }
        if self.factor_orders().len() > FACTOR_NAMES.len() {
            return reject("at most 25 factors are supported");
        }
        Ok(())
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Presentation::FreeGroup { rank } => write!(f, "F{rank}"),
            Presentation::FreeProductOfCyclics { orders } => {
                for (i, o) in orders.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    match o {
                        CyclicOrder::Finite(n) => write!(f, "Z/{n}")?,
                        CyclicOrder::Infinite => write!(f, "Z")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// A generator or the inverse of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = FACTOR_NAMES[self.factor as usize] as char;
        if self.inverse {
            write!(f, "{}", c.to_ascii_uppercase())
        } else {
            write!(f, "{c}")
        }
    }
}

/// A maximal power of one generator inside a reduced word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: u8,
    pub exp: i32,
}

/// Group element in normal form: consecutive syllables use distinct factors
/// and exponents are canonical for their factor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Word length in the generating set.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|s| s.exp.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// Geodesic spelling of the normal form.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.syllables.iter().flat_map(|s| {
            let letter = Letter { factor: s.factor, inverse: s.exp < 0 };
            std::iter::repeat_n(letter, s.exp.unsigned_abs() as usize)
        })
    }

    pub fn first_letter(&self) -> Option<Letter> {
        self.letters().next()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Multiplication, inversion and parsing for one presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    presentation: Presentation,
    orders: Vec<Option<u32>>,
    letters: Vec<Letter>,
}

impl Group {
    pub fn new(presentation: Presentation) -> Result<Self> {
        presentation.validate()?;
        let orders = presentation.factor_orders();
        let mut letters = Vec::new();
        for (i, order) in orders.iter().enumerate() {
            let factor = i as u8;
            letters.push(Letter { factor, inverse: false });
            if *order != Some(2) {
                letters.push(Letter { factor, inverse: true });
            }
        }
        Ok(Group { presentation, orders, letters })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn factor_count(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self, factor: u8) -> Option<u32> {
        self.orders[factor as usize]
    }

    /// Generating letters in the fixed order used for vertex ids:
    /// `a, A, b, B, ...`, with involutions listed once.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Valence of the Cayley graph.
    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn letter_index(&self, letter: Letter) -> usize {
        let letter = self.normalize_letter(letter);
        self.letters.iter().position(|&l| l == letter).expect("letter belongs to the group")
    }

    fn normalize_letter(&self, letter: Letter) -> Letter {
        if self.order(letter.factor) == Some(2) {
            Letter { factor: letter.factor, inverse: false }
        } else {
            letter
        }
    }

    pub fn inverse_letter(&self, letter: Letter) -> Letter {
        self.normalize_letter(Letter { factor: letter.factor, inverse: !letter.inverse })
    }

    /// Representative of `exp` modulo the factor order in `(-n/2, n/2]`.
    pub fn canonical_exponent(&self, factor: u8, exp: i64) -> i64 {
        match self.order(factor) {
            None => exp,
            Some(n) => {
                let n = n as i64;
                let r = exp.rem_euclid(n);
                if 2 * r > n {
                    r - n
                } else {
                    r
                }
            }
        }
    }

    fn push_syllable(&self, word: &mut Word, factor: u8, exp: i64) {
        if let Some(last) = word.syllables.last_mut() {
            if last.factor == factor {
                let merged = self.canonical_exponent(factor, last.exp as i64 + exp);
                if merged == 0 {
                    word.syllables.pop();
                } else {
                    last.exp = merged as i32;
                }
                return;
            }
        }
        let exp = self.canonical_exponent(factor, exp);
        if exp != 0 {
            word.syllables.push(Syllable { factor, exp: exp as i32 });
        }
    }

    /// Right multiplication by a single letter, in place.
    pub fn mul_letter(&self, word: &mut Word, letter: Letter) {
        self.push_syllable(word, letter.factor, letter.sign() as i64);
    }

    pub fn multiply(&self, a: &Word, b: &Word) -> Word {
        let mut out = a.clone();
        for s in &b.syllables {
            self.push_syllable(&mut out, s.factor, s.exp as i64);
        }
        out
    }

    pub fn inverse(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for s in w.syllables.iter().rev() {
            self.push_syllable(&mut out, s.factor, -(s.exp as i64));
        }
        out
    }

    /// Word metric distance `|a^{-1} b|`.
    pub fn distance(&self, a: &Word, b: &Word) -> usize {
        self.multiply(&self.inverse(a), b).len()
    }

    pub fn word_from_letters(&self, letters: &[Letter]) -> Word {
        let mut w = Word::identity();
        for &l in letters {
            self.mul_letter(&mut w, l);
        }
        w
    }

    pub fn parse_letter(&self, c: char) -> Option<Letter> {
        let lower = c.to_ascii_lowercase() as u8;
        let factor = FACTOR_NAMES.iter().position(|&n| n == lower)?;
        if factor >= self.factor_count() {
            return None;
        }
        Some(self.normalize_letter(Letter { factor: factor as u8, inverse: c.is_ascii_uppercase() }))
    }

    /// Parses a product of generator letters (`aBa`; `e` or empty is the identity).
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Word::identity());
        }
        let mut w = Word::identity();
        for c in text.chars() {
            let letter = self.parse_letter(c).ok_or_else(|| Error::InvalidWord {
                word: text.to_string(),
                reason: format!("{c:?} is not a generator of {}", self.presentation),
            })?;
            self.mul_letter(&mut w, letter);
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Group {
        Group::new(Presentation::free(2)).unwrap()
    }

    fn z2z3() -> Group {
        Group::new(Presentation::free_product(&[2, 3])).unwrap()
    }

    #[test]
    fn rejects_two_ended_and_finite_presentations() {
        assert!(Group::new(Presentation::free(1)).is_err());
        assert!(Group::new(Presentation::free_product(&[2, 2])).is_err());
        assert!(Group::new(Presentation::free_product(&[0])).is_err());
        assert!(Group::new(Presentation::free_product(&[1, 3])).is_err());
        let err = Group::new(Presentation::free_product(&[2, 2])).unwrap_err();
        assert!(err.to_string().contains("Z/2*Z/2"), "{err}");
        assert!(Group::new(Presentation::free_product(&[2, 0])).is_ok());
        assert!(Group::new(Presentation::free_product(&[2, 2, 2])).is_ok());
    }

    #[test]
    fn letter_order_lists_involutions_once() {
        let g = z2z3();
        let names: Vec<String> = g.letters().iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["a", "b", "B"]);
        let names: Vec<String> = f2().letters().iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["a", "A", "b", "B"]);
    }

    #[test]
    fn normal_forms_reduce_relators() {
        let g = z2z3();
        assert!(g.parse_word("aa").unwrap().is_identity());
        assert!(g.parse_word("bbb").unwrap().is_identity());
        assert_eq!(g.parse_word("bb").unwrap().to_string(), "B");
        assert_eq!(g.parse_word("abbab").unwrap().to_string(), "aBab");
        let f = f2();
        assert!(f.parse_word("aA").unwrap().is_identity());
        assert_eq!(f.parse_word("abBa").unwrap().to_string(), "aa");
    }

    #[test]
    fn even_order_keeps_half_turn_positive() {
        let g = Group::new(Presentation::free_product(&[4, 0])).unwrap();
        let w = g.parse_word("AA").unwrap();
        assert_eq!(w.to_string(), "aa");
        assert_eq!(w.len(), 2);
        assert_eq!(g.parse_word("aaa").unwrap().to_string(), "A");
    }

    #[test]
    fn inverse_and_distance() {
        let g = f2();
        let w = g.parse_word("abAB").unwrap();
        assert!(g.multiply(&w, &g.inverse(&w)).is_identity());
        let a = g.parse_word("ab").unwrap();
        let b = g.parse_word("aB").unwrap();
        assert_eq!(g.distance(&a, &b), 2);
    }

    #[test]
    fn presentation_json_round_trips() {
        let p: Presentation = serde_json::from_str(r#"{"kind":"free","rank":2}"#).unwrap();
        assert_eq!(p, Presentation::free(2));
        let q: Presentation = serde_json::from_str(r#"{"kind":"free_product_cyclic","orders":[2,"inf"]}"#).unwrap();
        assert_eq!(q, Presentation::free_product(&[2, 0]));
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"kind":"free_product_cyclic","orders":[2,"inf"]}"#);
        assert!(serde_json::from_str::<Presentation>(r#"{"kind":"free","rank":2,"x":1}"#).is_err());
    }
}
