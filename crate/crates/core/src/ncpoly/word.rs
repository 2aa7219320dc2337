use std::cmp::Ordering;
use std::fmt;

/// Letter index into the variable alphabet `{0, .., d-1}`.
pub type Letter = u16;

/// A monomial of the free algebra: a finite sequence of letters.
///
/// Ordering is graded lexicographic (shorter words first, then lexicographic),
/// which is the canonical term order of [`NCPolynomial`](crate::NCPolynomial).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// `l` repeated `times` times.
    pub fn power(l: Letter, times: usize) -> Self {
        Word(vec![l; times])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn max_letter(&self) -> Option<Letter> {
        self.0.iter().copied().max()
    }

    /// All words of length `len` over `d` letters, in lexicographic order.
    pub fn all_of_length(d: usize, len: usize) -> Vec<Word> {
        let total = d.pow(len as u32);
        (0..total)
            .map(|mut idx| {
                let mut letters = vec![0; len];
                for slot in letters.iter_mut().rev() {
                    *slot = (idx % d) as Letter;
                    idx /= d;
                }
                Word(letters)
            })
            .collect()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NAMES: [char; 4] = ['x', 'y', 'z', 'w'];

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            match NAMES.get(l as usize) {
                Some(c) => write!(f, "{c}")?,
                None => write!(f, "x{l}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
