//! Permutations of {0, ..., d}: the finite Weyl group of type A_d.
//!
//! Generators are the adjacent transpositions s_i = (i-1, i) for 1 <= i <= d.
//! Composition is function composition, (a * b)(x) = a(b(x)), matching
//! multiplication of permutation matrices.  The (d+1)-cycle ubar = s_d ... s_1
//! sends 0 to d and j to j-1; its powers, together with the stabilizer of d,
//! coordinatize the group, and `mu` reads off the power.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use thiserror::Error;

/// Hard cap for full-group enumeration ((d+1)! elements).
pub const MAX_ENUM_D: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("images {0:?} are not a permutation of {{0, ..., {1}}}")]
    NotAPermutation(Vec<usize>, usize),
    #[error("degree mismatch: d = {0} vs d = {1}")]
    DegreeMismatch(usize, usize),
    #[error("generator index {index} outside 1..={d}")]
    BadGenerator { index: usize, d: usize },
    #[error("enumeration needs d <= {max}, got d = {d}")]
    DomainTooLarge { d: usize, max: usize },
    #[error("cannot parse permutation from {0:?}")]
    Parse(String),
}

/// A permutation w of {0, ..., d} in one-line notation: images[i] = w(i).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self, CoxeterError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(CoxeterError::NotAPermutation(images.clone(), n.max(1) - 1));
            }
            seen[x] = true;
        }
        if n == 0 {
            return Err(CoxeterError::NotAPermutation(images, 0));
        }
        Ok(Permutation { images })
    }

    pub fn identity(d: usize) -> Self {
        Permutation { images: (0..=d).collect() }
    }

    /// The generator s_i = (i-1, i), for 1 <= i <= d.
    pub fn s(d: usize, i: usize) -> Result<Self, CoxeterError> {
        if i == 0 || i > d {
            return Err(CoxeterError::BadGenerator { index: i, d });
        }
        let mut images: Vec<usize> = (0..=d).collect();
        images.swap(i - 1, i);
        Ok(Permutation { images })
    }

    /// ubar = s_d ... s_1: sends 0 to d and j to j-1 for j >= 1.
    pub fn ubar(d: usize) -> Self {
        Self::ubar_pow(d, 1)
    }

    /// ubar^power for any integer power; ubar^k(j) = j - k mod (d+1).
    pub fn ubar_pow(d: usize, power: i64) -> Self {
        let n = (d + 1) as i64;
        let k = power.rem_euclid(n);
        let images = (0..=d as i64).map(|j| ((j - k).rem_euclid(n)) as usize).collect();
        Permutation { images }
    }

    /// The longest element, images reversed.
    pub fn longest(d: usize) -> Self {
        Permutation { images: (0..=d).rev().collect() }
    }

    pub fn d(&self) -> usize {
        self.images.len() - 1
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Checked composition: (a.compose(b))(x) = a(b(x)).
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, CoxeterError> {
        if self.d() != other.d() {
            return Err(CoxeterError::DegreeMismatch(self.d(), other.d()));
        }
        Ok(Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// Right multiplication by s_i: swaps the images at positions i-1 and i.
    pub fn times_s(&self, i: usize) -> Result<Permutation, CoxeterError> {
        if i == 0 || i > self.d() {
            return Err(CoxeterError::BadGenerator { index: i, d: self.d() });
        }
        let mut images = self.images.clone();
        images.swap(i - 1, i);
        Ok(Permutation { images })
    }

    /// Inversion count; the Coxeter length for the generators s_1, ..., s_d.
    pub fn length(&self) -> usize {
        let n = self.images.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// True iff l(w s_i) > l(w), i.e. w(i-1) < w(i).
    pub fn ascends_at(&self, i: usize) -> bool {
        self.images[i - 1] < self.images[i]
    }

    /// mu(w) = d - w(d), the unique exponent with ubar^(-mu(w)) w fixing d.
    pub fn mu(&self) -> usize {
        self.d() - self.images[self.d()]
    }

    /// Canonical reduced word: repeatedly strip the smallest right descent.
    pub fn reduced_word(&self) -> ReducedWord {
        let d = self.d();
        let mut w = self.clone();
        let mut stripped = Vec::with_capacity(w.length());
        'outer: loop {
            for i in 1..=d {
                if !w.ascends_at(i) {
                    w = w.times_s(i).expect("generator index in range");
                    stripped.push(i);
                    continue 'outer;
                }
            }
            break;
        }
        stripped.reverse();
        ReducedWord { d, letters: stripped }
    }

    /// Rank in the lexicographic enumeration of Sym{0, ..., d}.
    pub fn lex_rank(&self) -> usize {
        let n = self.images.len();
        let mut rank = 0;
        let mut fact = 1;
        for k in 1..n {
            fact *= k;
        }
        let mut remaining = fact; // (n-1)!
        for i in 0..n - 1 {
            let smaller = self.images[i + 1..].iter().filter(|&&x| x < self.images[i]).count();
            rank += smaller * remaining;
            remaining /= n - 1 - i;
        }
        rank
    }

    /// All (d+1)! permutations in lexicographic order on images.
    pub fn enumerate(d: usize) -> Result<Vec<Permutation>, CoxeterError> {
        if d > MAX_ENUM_D {
            return Err(CoxeterError::DomainTooLarge { d, max: MAX_ENUM_D });
        }
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..=d).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next_permutation in lexicographic order
            let n = cur.len();
            let Some(i) = (0..n - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        Ok(out)
    }

    /// Extend to Sym{0, ..., d+1} by fixing the new top point.
    pub fn extend(&self) -> Permutation {
        let mut images = self.images.clone();
        images.push(self.images.len());
        Permutation { images }
    }

    /// Restrict a permutation fixing d to Sym{0, ..., d-1}.
    pub fn restrict(&self) -> Result<Permutation, CoxeterError> {
        let d = self.d();
        if d == 0 || self.images[d] != d {
            return Err(CoxeterError::NotAPermutation(self.images.clone(), d.max(1) - 1));
        }
        Ok(Permutation { images: self.images[..d].to_vec() })
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// Unchecked composition for same-degree elements; panics on mismatch.
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs).expect("degree mismatch in permutation product")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", strs.join(" "))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Permutation {
    type Err = CoxeterError;

    fn from_str(s: &str) -> Result<Self, CoxeterError> {
        let images: Result<Vec<usize>, _> = s.split_whitespace().map(str::parse).collect();
        let images = images.map_err(|_| CoxeterError::Parse(s.to_string()))?;
        if images.is_empty() {
            return Err(CoxeterError::Parse(s.to_string()));
        }
        Permutation::from_images(images)
    }
}

/// A word in the generators s_1, ..., s_d whose product is a group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedWord {
    d: usize,
    letters: Vec<usize>,
}

impl ReducedWord {
    pub fn new(d: usize, letters: Vec<usize>) -> Result<Self, CoxeterError> {
        if let Some(&i) = letters.iter().find(|&&i| i == 0 || i > d) {
            return Err(CoxeterError::BadGenerator { index: i, d });
        }
        Ok(ReducedWord { d, letters })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn product(&self) -> Permutation {
        let mut w = Permutation::identity(self.d);
        for &i in &self.letters {
            w = w.times_s(i).expect("letters validated at construction");
        }
        w
    }
}
