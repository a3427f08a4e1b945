//! Permutations of `{1..n}` (stored 0-based), closure of generating sets and
//! cycle notation.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &j in &images {
            if j >= n || seen[j] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection of 0..{n}")));
            }
            seen[j] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation of `0..n` from 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n {
                    return Err(Error::InvalidPermutation(format!("point {} out of range 1..{n}", a + 1)));
                }
                if used[a] {
                    return Err(Error::InvalidPermutation(format!("point {} repeated", a + 1)));
                }
                used[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degree");
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixes(&self, i: usize) -> bool {
        self.images[i] == i
    }

    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.degree()];
        let mut transpositions = 0;
        for start in 0..self.degree() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }

    /// Disjoint cycles of length ≥ 2, 0-based, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.fixes(start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }
}

/// 1-based cycle notation; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// Parses 1-based cycle notation such as `"(1 2)(3 4)"` into a permutation
/// of `{1..n}`. A symbol may appear in at most one cycle.
pub fn parse_cycles(text: &str, n: usize) -> Result<Permutation> {
    let err = |pos: usize, msg: &str| Error::CycleSyntax { pos, msg: msg.to_string() };
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && (bytes[*pos] as char).is_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty input"));
    }
    while pos < bytes.len() {
        if bytes[pos] != b'(' {
            return Err(err(pos, "expected '('"));
        }
        pos += 1;
        let mut cycle = Vec::new();
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(err(pos, "unterminated cycle"));
            }
            match bytes[pos] {
                b')' => {
                    pos += 1;
                    break;
                }
                b',' if !cycle.is_empty() => pos += 1,
                c if c.is_ascii_digit() => {
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let v: usize = text[start..pos].parse().map_err(|_| err(start, "bad number"))?;
                    if v == 0 || v > n {
                        return Err(err(start, &format!("symbol {v} out of range 1..{n}")));
                    }
                    if seen[v - 1] {
                        return Err(err(start, &format!("symbol {v} repeated")));
                    }
                    seen[v - 1] = true;
                    cycle.push(v - 1);
                }
                _ => return Err(err(pos, "unexpected character")),
            }
        }
        if cycle.len() == 1 {
            // (k) is accepted as a fixed point
            cycle.clear();
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        skip_ws(&mut pos);
    }
    let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
    Permutation::from_cycles(n, &refs)
}

/// Parses cycle notation with the degree inferred from the largest symbol.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        parse_cycles(s, max)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite permutation group, stored as its full sorted element list with a
/// multiplication table.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

impl PermGroup {
    /// Closure of `generators` under composition; the identity is always included.
    pub fn generate(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "generator {g} has degree {} but the group acts on {degree} points",
                    g.degree()
                )));
            }
        }
        let id = Permutation::identity(degree);
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        let mut found = vec![id.clone()];
        index.insert(id, 0);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(k) = queue.pop_front() {
            for g in &generators {
                let p = g.compose(&found[k]);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), found.len());
                    queue.push_back(found.len());
                    found.push(p);
                }
            }
        }
        found.sort();
        let index: HashMap<Permutation, usize> =
            found.iter().enumerate().map(|(k, p)| (p.clone(), k)).collect();
        let m = found.len();
        let mut mul = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                mul[a * m + b] = index[&found[a].compose(&found[b])];
            }
        }
        let inv = found.iter().map(|p| index[&p.inverse()]).collect();
        let identity = index[&Permutation::identity(degree)];
        Ok(PermGroup { degree, generators, elements: found, index, mul, inv, identity })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::generate(degree, vec![]).expect("trivial group")
    }

    /// The Klein four-group `⟨(1 2), (3 4)⟩` on four points: reflections of
    /// the coordinate cross in the two axes.
    pub fn klein_cross() -> Self {
        let sx = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        let sy = Permutation::from_cycles(4, &[&[2, 3]]).unwrap();
        Self::generate(4, vec![sx, sy]).unwrap()
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Permutation::from_cycles(n, &[&[0, 1]]).unwrap());
            let long: Vec<usize> = (0..n).collect();
            gens.push(Permutation::from_cycles(n, &[&long]).unwrap());
        }
        Self::generate(n, gens).unwrap()
    }

    /// Even permutations, generated by the 3-cycles `(1 2 k)`.
    pub fn alternating(n: usize) -> Self {
        let gens = (2..n).map(|k| Permutation::from_cycles(n, &[&[0, 1, k]]).unwrap()).collect();
        Self::generate(n, gens).unwrap()
    }

    /// `Z/n` acting by the rotation `(1 2 … n)`.
    pub fn cyclic(n: usize) -> Self {
        let gens = if n >= 2 {
            let long: Vec<usize> = (0..n).collect();
            vec![Permutation::from_cycles(n, &[&long]).unwrap()]
        } else {
            vec![]
        };
        Self::generate(n, gens).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &Permutation {
        &self.elements[k]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// Index of `elements[a] ∘ elements[b]`.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b]
    }

    pub fn inv_index(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|p| other.contains(p))
    }
}
