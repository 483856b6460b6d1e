//! Ulam–Harris words: finite sequences of positive integers addressing nodes
//! of a plane tree. The empty word is the root; `u * j` is the `j`-th child
//! of `u`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, rejecting zero letters.
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(invalid("word letters must be positive"));
        }
        Ok(Word(letters))
    }

    /// Panics on a zero letter; intended for literals in tests and examples.
    pub fn from_slice(letters: &[u32]) -> Self {
        Word::new(letters.to_vec()).expect("word letters must be positive")
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the letters.
    pub fn weight(&self) -> u64 {
        self.0.iter().map(|&l| u64::from(l)).sum()
    }

    /// Number of letters.
    pub fn height(&self) -> usize {
        self.0.len()
    }

    /// Number of letters that are at least 2, i.e. steps that are not to an
    /// oldest child.
    pub fn non_oldest_steps(&self) -> usize {
        self.0.iter().filter(|&&l| l >= 2).count()
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// `self * j`.
    pub fn child(&self, j: u32) -> Word {
        assert!(j >= 1, "child index must be positive");
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.extend_from_slice(&self.0);
        letters.push(j);
        Word(letters)
    }

    /// Whether `self` is an ancestor of `other` or equal to it.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub(crate) fn push(&mut self, j: u32) {
        self.0.push(j);
    }

    pub(crate) fn pop(&mut self) -> Option<u32> {
        self.0.pop()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

/// All words of weight exactly `m` (the compositions of `m`), in
/// lexicographic order. There are `2^(m-1)` of them.
pub fn enumerate_weight_class(m: u32) -> Result<Vec<Word>> {
    if m == 0 {
        return Err(invalid("weight class m must be at least 1"));
    }
    if m > 30 {
        return Err(invalid("weight class m > 30 would hold more than 2^29 words"));
    }
    let mut out = Vec::with_capacity(1usize << (m - 1));
    let mut current = Vec::new();
    compositions(m, &mut current, &mut out);
    Ok(out)
}

fn compositions(remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Word>) {
    if remaining == 0 {
        out.push(Word(current.clone()));
        return;
    }
    for first in 1..=remaining {
        current.push(first);
        compositions(remaining - first, current, out);
        current.pop();
    }
}
