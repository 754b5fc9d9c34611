use std::cmp::Ordering;
use std::fmt;

/// A word in the noncommuting letters `x1, …, xd`, stored as 1-based letter
/// indices. The empty word is the unit `1`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The involution `w ↦ w*`: letters in reverse order.
    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `x_i · w`.
    pub fn prepend(&self, i: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// `w · x_i`.
    pub fn append(&self, i: usize) -> Word {
        let mut v = self.0.clone();
        v.push(i);
        Word(v)
    }

    /// Whether every letter lies in `1..=d`.
    pub fn fits(&self, d: usize) -> bool {
        self.0.iter().all(|&i| i >= 1 && i <= d)
    }

    /// All words over `d` letters with length in `min_len..=max_len`, in shortlex order.
    pub fn enumerate(d: usize, min_len: usize, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut layer = vec![Word::empty()];
        for len in 0..=max_len {
            if len >= min_len {
                out.extend(layer.iter().cloned());
            }
            if len == max_len {
                break;
            }
            layer = layer
                .iter()
                .flat_map(|w| (1..=d).map(move |i| w.append(i)))
                .collect();
        }
        out
    }
}

impl Ord for Word {
    /// Shortlex: shorter words first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for i in &self.0 {
            write!(f, "x{i}")?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl From<&[usize]> for Word {
    fn from(v: &[usize]) -> Self {
        Word(v.to_vec())
    }
}
