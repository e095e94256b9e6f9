//! Alphabets and the index of all words of bounded length.

use crate::error::{Error, Result};

/// A finite ordered alphabet of distinct letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: &[char]) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("alphabet must be nonempty".into()));
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(Error::InvalidInput(format!("duplicate letter {c:?}")));
            }
        }
        Ok(Alphabet {
            letters: letters.to_vec(),
        })
    }

    /// The distinct letters of `s` in order of first appearance.
    pub fn from_letters(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for c in s.chars() {
            if !letters.contains(&c) {
                letters.push(c);
            }
        }
        Alphabet::new(&letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, i: usize) -> char {
        self.letters[i]
    }

    pub fn index_of(&self, c: char) -> Result<usize> {
        self.letters
            .iter()
            .position(|&l| l == c)
            .ok_or(Error::UnknownLetter(c))
    }
}

/// Dense index of all words of length `1..=max_len` over an alphabet of size
/// `q`: shorter words first, then lexicographic in letter index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordIndex {
    q: usize,
    max_len: usize,
    // offsets[k] = number of words shorter than k + 1
    offsets: Vec<usize>,
}

impl WordIndex {
    pub fn new(q: usize, max_len: usize, cap: usize) -> Result<Self> {
        if q == 0 || max_len == 0 {
            return Err(Error::InvalidInput(
                "alphabet size and word length must be positive".into(),
            ));
        }
        let mut offsets = vec![0usize];
        let mut power = 1usize;
        for _ in 0..max_len {
            power = power.checked_mul(q).ok_or(Error::DimensionCap {
                dim: usize::MAX,
                cap,
            })?;
            let next = offsets.last().unwrap() + power;
            if next > cap {
                return Err(Error::DimensionCap { dim: next, cap });
            }
            offsets.push(next);
        }
        Ok(WordIndex {
            q,
            max_len,
            offsets,
        })
    }

    /// Number of indexed words.
    pub fn dim(&self) -> usize {
        self.offsets[self.max_len]
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Index of the word with the given letter indices.
    pub fn index(&self, word: &[usize]) -> usize {
        debug_assert!(!word.is_empty() && word.len() <= self.max_len);
        self.offsets[word.len() - 1] + word.iter().fold(0, |acc, &c| acc * self.q + c)
    }

    /// Letter indices of word `i`.
    pub fn word(&self, i: usize) -> Vec<usize> {
        let k = self.offsets.iter().rposition(|&o| o <= i).unwrap() + 1;
        let mut rest = i - self.offsets[k - 1];
        let mut word = vec![0; k];
        for slot in word.iter_mut().rev() {
            *slot = rest % self.q;
            rest /= self.q;
        }
        word
    }

    pub fn label(&self, i: usize, alphabet: &Alphabet) -> String {
        self.word(i)
            .into_iter()
            .map(|c| alphabet.letter(c))
            .collect()
    }
}
