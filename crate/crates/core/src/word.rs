//! Signed letters, words over an ordered alphabet, free and cyclic reduction,
//! ShortLex and free-group roots.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::steps;

/// `2 * generator + (1 if inverse)`; the inverse of a letter is `l ^ 1`.
pub type Letter = u32;

#[inline]
pub fn letter(gen: usize, inverse: bool) -> Letter {
    (gen as u32) << 1 | inverse as u32
}

#[inline]
pub fn inv(l: Letter) -> Letter {
    l ^ 1
}

#[inline]
pub fn gen_of(l: Letter) -> usize {
    (l >> 1) as usize
}

#[inline]
pub fn is_inverse(l: Letter) -> bool {
    l & 1 == 1
}

/// Position of a letter in the signed order x_i^-1 < x_j^-1 < x_i < x_j (i < j).
#[inline]
pub fn shortlex_key(l: Letter) -> (u32, u32) {
    ((l & 1) ^ 1, l >> 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
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

    pub fn inverse(&self) -> Word {
        Word(inverse(&self.0))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    pub fn is_freely_reduced(&self) -> bool {
        is_freely_reduced(&self.0)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.0)
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|&l| gen_of(l)).max()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl std::ops::Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

/// Generator names in their fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut index = HashMap::new();
        let mut out = Vec::new();
        for n in names {
            let n = n.as_ref();
            if n.is_empty()
                || n == "1"
                || n.contains(|c: char| c.is_whitespace() || c == '^' || c == ',')
                || index.contains_key(n)
            {
                return Err(Error::BadGeneratorName(n.to_string()));
            }
            index.insert(n.to_string(), out.len());
            out.push(n.to_string());
        }
        Ok(Alphabet { names: out, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn gen(&self, name: &str) -> Result<Letter> {
        self.index_of(name)
            .map(|g| letter(g, false))
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Appends a generator, returning its index (existing index if present).
    pub fn push(&mut self, name: &str) -> Result<usize> {
        if let Some(i) = self.index_of(name) {
            return Ok(i);
        }
        let mut names = self.names.clone();
        names.push(name.to_string());
        *self = Alphabet::new(&names)?;
        Ok(self.names.len() - 1)
    }

    pub fn contains(&self, l: Letter) -> bool {
        gen_of(l) < self.names.len()
    }

    pub fn check(&self, w: &[Letter]) -> Result<()> {
        match w.iter().find(|&&l| !self.contains(l)) {
            Some(&l) => Err(Error::LetterOutOfRange(l)),
            None => Ok(()),
        }
    }

    /// Parses whitespace-separated tokens `g`, `g^-1`, `g^k`; `1` is the identity.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let k: i64 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?;
                    (n, k)
                }
                None => (tok, 1),
            };
            let g = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            let l = letter(g, exp < 0);
            for _ in 0..exp.unsigned_abs() {
                out.push(l);
            }
        }
        Ok(Word(out))
    }

    pub fn format(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let run = (j - i) as i64;
            let name = self
                .names
                .get(gen_of(w[i]))
                .cloned()
                .unwrap_or_else(|| format!("#{}", gen_of(w[i])));
            let e = if is_inverse(w[i]) { -run } else { run };
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
            i = j;
        }
        parts.join(" ")
    }

    pub fn display<'a>(&'a self, w: &'a [Letter]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Alphabet, &'a [Letter]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format(self.1))
            }
        }
        D(self, w)
    }
}

pub fn inverse(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&l| inv(l)).collect()
}

pub fn is_freely_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != inv(p[1]))
}

pub fn is_cyclically_reduced(w: &[Letter]) -> bool {
    is_freely_reduced(w) && (w.len() < 2 || w[0] != inv(w[w.len() - 1]))
}

pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        steps::cmp(1);
        if out.last() == Some(&inv(l)) {
            out.pop();
            steps::rewrite(2);
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Free product of a sequence of slices.
pub fn free_product(parts: &[&[Letter]]) -> Word {
    let v: Vec<Letter> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    free_reduce(&v)
}

pub fn freely_equal(a: &[Letter], b: &[Letter]) -> bool {
    free_reduce(a) == free_reduce(b)
}

/// Splits a word as `c · core · c⁻¹` with `core` cyclically reduced.
/// Returns `(c, core)`.
pub fn cyclic_decompose(w: &[Letter]) -> (Word, Word) {
    let r = free_reduce(w).0;
    let mut i = 0;
    let mut j = r.len();
    while j - i >= 2 && r[i] == inv(r[j - 1]) {
        i += 1;
        j -= 1;
    }
    (Word(r[..i].to_vec()), Word(r[i..j].to_vec()))
}

pub fn cyclic_reduce(w: &[Letter]) -> Word {
    cyclic_decompose(w).1
}

pub fn rotate(w: &[Letter], k: usize) -> Vec<Letter> {
    if w.is_empty() {
        return Vec::new();
    }
    let k = k % w.len();
    let mut v = w[k..].to_vec();
    v.extend_from_slice(&w[..k]);
    v
}

pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| lex_cmp(a, b))
}

pub fn lex_cmp(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = shortlex_key(*x).cmp(&shortlex_key(*y));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Start index of the lexicographically least rotation (signed-letter order), O(n).
pub fn least_rotation_index(w: &[Letter]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    let key = |i: usize| shortlex_key(w[i % n]);
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = key(i + k);
        let b = key(j + k);
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

pub fn least_rotation(w: &[Letter]) -> Vec<Letter> {
    rotate(w, least_rotation_index(w))
}

/// ShortLex-least rotation among the rotations of `r` and `r⁻¹`.
pub fn canonical_relator(r: &[Letter]) -> Vec<Letter> {
    let a = least_rotation(r);
    let b = least_rotation(&inverse(r));
    if lex_cmp(&b, &a).is_lt() {
        b
    } else {
        a
    }
}

/// All distinct cyclic shifts of `w` and `w⁻¹`.
pub fn symmetrize_one(w: &[Letter]) -> Result<BTreeSet<Word>> {
    if !is_cyclically_reduced(w) {
        return Err(Error::NotCyclicallyReduced(format!("{w:?}")));
    }
    let mut out = BTreeSet::new();
    let wi = inverse(w);
    for k in 0..w.len() {
        out.insert(Word(rotate(w, k)));
        out.insert(Word(rotate(&wi, k)));
    }
    Ok(out)
}

pub fn symmetrize<'a, I>(rs: I) -> Result<BTreeSet<Word>>
where
    I: IntoIterator<Item = &'a Word>,
{
    let mut out = BTreeSet::new();
    for r in rs {
        out.extend(symmetrize_one(r)?);
    }
    Ok(out)
}

pub fn shortlex_normal_form_free(w: &[Letter], alpha: &Alphabet) -> Result<Word> {
    alpha.check(w)?;
    Ok(free_reduce(w))
}

/// Smallest period `p` of `w` that divides `w.len()`.
pub fn primitive_period(w: &[Letter]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    // prefix function
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && w[i] != w[k] {
            k = pi[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeRootReport {
    pub root: Word,
    pub exponent: usize,
}

/// Root of the cyclically reduced core of `w`.
pub fn free_root(w: &[Letter]) -> Result<FreeRootReport> {
    let core = cyclic_reduce(w);
    if core.is_empty() {
        return Err(Error::TrivialWord);
    }
    let p = primitive_period(&core);
    Ok(FreeRootReport {
        root: Word(core[..p].to_vec()),
        exponent: core.len() / p,
    })
}

/// The primitive element `g` with `w = g^k`, `k > 0`.
pub fn primitive_element(w: &[Letter]) -> Result<Word> {
    let (c, core) = cyclic_decompose(w);
    if core.is_empty() {
        return Err(Error::TrivialWord);
    }
    let p = primitive_period(&core);
    Ok(free_product(&[&c, &core[..p], &inverse(&c)]))
}

pub fn in_same_elementary_free(u: &[Letter], v: &[Letter]) -> Result<bool> {
    let pu = primitive_element(u)?;
    let pv = primitive_element(v)?;
    Ok(pu == pv || pu == pv.inverse())
}

/// `w` is a cyclic shift of `v` (same length, occurs in `v v`).
pub fn is_cyclic_shift(w: &[Letter], v: &[Letter]) -> bool {
    if w.len() != v.len() {
        return false;
    }
    if w.is_empty() {
        return true;
    }
    let mut vv = v.to_vec();
    vv.extend_from_slice(v);
    find_subslice(&vv, w).is_some()
}

/// First occurrence of `pat` in `text` (KMP).
pub fn find_subslice(text: &[Letter], pat: &[Letter]) -> Option<usize> {
    if pat.is_empty() {
        return Some(0);
    }
    let m = pat.len();
    let mut pi = vec![0usize; m];
    for i in 1..m {
        let mut k = pi[i - 1];
        while k > 0 && pat[i] != pat[k] {
            k = pi[k - 1];
        }
        if pat[i] == pat[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let mut k = 0;
    for (i, &c) in text.iter().enumerate() {
        while k > 0 && c != pat[k] {
            k = pi[k - 1];
        }
        steps::cmp(1);
        if c == pat[k] {
            k += 1;
        }
        if k == m {
            return Some(i + 1 - m);
        }
    }
    None
}

/// A circular word with a rotation offset, per-position integer marks and a
/// list of special points (positions relative to the current rotation).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CyclicWord {
    letters: Vec<Letter>,
    marks: Vec<u32>,
    offset: usize,
    pub points: Vec<usize>,
}

impl CyclicWord {
    pub fn new(w: &[Letter]) -> Self {
        CyclicWord {
            letters: w.to_vec(),
            marks: vec![0; w.len()],
            offset: 0,
            points: Vec::new(),
        }
    }

    pub fn with_marks(w: &[Letter], marks: &[u32]) -> Self {
        assert_eq!(w.len(), marks.len());
        CyclicWord {
            letters: w.to_vec(),
            marks: marks.to_vec(),
            offset: 0,
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn phys(&self, i: usize) -> usize {
        (self.offset + i) % self.letters.len()
    }

    pub fn at(&self, i: usize) -> Letter {
        self.letters[self.phys(i)]
    }

    pub fn mark(&self, i: usize) -> u32 {
        self.marks[self.phys(i)]
    }

    /// O(1) cyclic shift: position `k` becomes position 0.
    pub fn rotate(&mut self, k: usize) {
        let n = self.letters.len();
        if n == 0 {
            return;
        }
        let k = k % n;
        self.offset = (self.offset + k) % n;
        for p in &mut self.points {
            *p = (*p + n - k) % n;
        }
    }

    /// Letters read clockwise from position 0.
    pub fn to_word(&self) -> Word {
        Word(self.marks_and_letters().0)
    }

    pub fn marks_and_letters(&self) -> (Vec<Letter>, Vec<u32>) {
        let n = self.letters.len();
        let mut l = Vec::with_capacity(n);
        let mut m = Vec::with_capacity(n);
        for i in 0..n {
            l.push(self.at(i));
            m.push(self.mark(i));
        }
        (l, m)
    }

    /// Clockwise arc length from point `a` to point `b`.
    pub fn d_fwd(&self, a: usize, b: usize) -> usize {
        let n = self.letters.len();
        if n == 0 {
            0
        } else {
            (b + n - a % n) % n
        }
    }

    /// Counterclockwise arc length from `a` to `b`.
    pub fn d_bwd(&self, a: usize, b: usize) -> usize {
        self.d_fwd(b, a)
    }

    /// Letters of the clockwise arc of length `len` starting at `a`.
    pub fn arc(&self, a: usize, len: usize) -> Vec<Letter> {
        (0..len).map(|i| self.at(a + i)).collect()
    }

    /// Replaces the clockwise arc `[a, a+len)` by `new`, tagging inserted letters
    /// with `tag`. Rotation is normalized so that the replacement starts at 0.
    /// Points inside the removed arc are dropped; others are shifted.
    pub fn splice(&mut self, a: usize, len: usize, new: &[Letter], tag: u32) {
        let n = self.letters.len();
        assert!(len <= n);
        if n > 0 {
            self.rotate(a);
        }
        let (l, m) = self.marks_and_letters();
        let mut letters = new.to_vec();
        letters.extend_from_slice(&l[len..]);
        let mut marks = vec![tag; new.len()];
        marks.extend_from_slice(&m[len..]);
        let shift = new.len() as isize - len as isize;
        let pts: Vec<usize> = self
            .points
            .iter()
            .filter(|&&p| p == 0 || p >= len)
            .map(|&p| {
                if p == 0 {
                    0
                } else {
                    (p as isize + shift) as usize
                }
            })
            .collect();
        let n2 = letters.len();
        self.letters = letters;
        self.marks = marks;
        self.offset = 0;
        self.points = pts.into_iter().filter(|&p| p < n2.max(1)).collect();
        self.points.sort_unstable();
        self.points.dedup();
    }

    /// True when the positions carrying `tag` form one connected arc (or none).
    pub fn tag_connected(&self, tag: u32) -> bool {
        let n = self.len();
        let hits: Vec<bool> = (0..n).map(|i| self.mark(i) == tag).collect();
        let count = hits.iter().filter(|&&h| h).count();
        if count == 0 || count == n {
            return true;
        }
        let starts = (0..n)
            .filter(|&i| hits[i] && !hits[(i + n - 1) % n])
            .count();
        starts == 1
    }
}
