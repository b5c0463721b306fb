//! HNN extensions of a free base with cyclic associated subgroups:
//! Britton reduction, cyclic t-reduction and Collins-style conjugacy.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::steps;
use crate::word::{
    cyclic_decompose, free_product, free_reduce, free_root, gen_of, inv, inverse, is_inverse,
    rotate, Alphabet, Letter, Word,
};

/// Stable letter `t` (generator index) with relation `t⁻¹ u t = v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableLetter {
    pub t: usize,
    pub u: Word,
    pub v: Word,
}

/// A base free group with one or more stable letters whose associated
/// subgroups are cyclic subgroups of the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnSpec {
    pub alphabet: Alphabet,
    pub letters: Vec<StableLetter>,
}

impl HnnSpec {
    pub fn new(alphabet: Alphabet, letters: Vec<StableLetter>) -> Result<Self> {
        let spec = HnnSpec { alphabet, letters };
        for s in &spec.letters {
            for w in [&s.u, &s.v] {
                spec.alphabet.check(w)?;
                if w.is_empty() || !w.is_cyclically_reduced() {
                    return Err(Error::NotCyclicallyReduced(spec.alphabet.format(w)));
                }
                if w.iter().any(|&l| spec.is_stable(l)) {
                    return Err(Error::InvalidParams(format!(
                        "associated word `{}` uses a stable letter",
                        spec.alphabet.format(w)
                    )));
                }
                if free_root(w)?.exponent != 1 {
                    return Err(Error::InvalidParams(format!(
                        "associated word `{}` is a proper power",
                        spec.alphabet.format(w)
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn single(alphabet: Alphabet, t: &str, u: Word, v: Word) -> Result<Self> {
        let t = alphabet
            .index_of(t)
            .ok_or_else(|| Error::UnknownGenerator(t.to_string()))?;
        HnnSpec::new(alphabet, vec![StableLetter { t, u, v }])
    }

    /// One line per level: `hnn t1: u = <word>, v = <word>`. Stable letter
    /// names are appended to the base alphabet.
    pub fn parse(mut alphabet: Alphabet, text: &str) -> Result<Self> {
        let mut levels = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let bad = || Error::Parse(format!("bad hnn line `{line}`"));
            let rest = line.strip_prefix("hnn").ok_or_else(bad)?.trim();
            let (t, rel) = rest.split_once(':').ok_or_else(bad)?;
            let (u, v) = rel.split_once(',').ok_or_else(bad)?;
            let u = u
                .trim()
                .strip_prefix("u")
                .ok_or_else(bad)?
                .trim()
                .strip_prefix('=')
                .ok_or_else(bad)?;
            let v = v
                .trim()
                .strip_prefix("v")
                .ok_or_else(bad)?
                .trim()
                .strip_prefix('=')
                .ok_or_else(bad)?;
            let t = t.trim();
            if alphabet.index_of(t).is_some() {
                return Err(Error::InvalidParams(format!(
                    "stable letter `{t}` already in use"
                )));
            }
            let ti = alphabet.push(t)?;
            levels.push((ti, u.trim().to_string(), v.trim().to_string()));
        }
        let mut letters = Vec::new();
        for (t, u, v) in levels {
            letters.push(StableLetter {
                t,
                u: alphabet.parse(&u)?,
                v: alphabet.parse(&v)?,
            });
        }
        HnnSpec::new(alphabet, letters)
    }

    pub fn stable(&self, l: Letter) -> Option<&StableLetter> {
        self.letters.iter().find(|s| s.t == gen_of(l))
    }

    pub fn is_stable(&self, l: Letter) -> bool {
        self.stable(l).is_some()
    }

    pub fn theta(&self, w: &[Letter]) -> usize {
        w.iter().filter(|&&l| self.is_stable(l)).count()
    }
}

/// `w = u^l` in the free base.
pub fn cyclic_subgroup_power(w: &[Letter], u: &[Letter]) -> Option<i64> {
    let (c, core) = cyclic_decompose(u);
    if core.is_empty() {
        return None;
    }
    let x = free_product(&[&inverse(&c), w, &c]);
    if x.is_empty() {
        return Some(0);
    }
    let k = core.len();
    if !x.len().is_multiple_of(k) {
        return None;
    }
    let l = (x.len() / k) as i64;
    steps::cmp(x.len() as u64);
    if x.iter().enumerate().all(|(i, &a)| a == core[i % k]) {
        return Some(l);
    }
    let ci = inverse(&core);
    if x.iter().enumerate().all(|(i, &a)| a == ci[i % k]) {
        return Some(-l);
    }
    None
}

/// `g₀ t^{e₁} g₁ … t^{eₙ} gₙ`; `stable[i]` sits between `segments[i]` and
/// `segments[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TDecomposition {
    pub segments: Vec<Word>,
    pub stable: Vec<Letter>,
}

impl TDecomposition {
    pub fn theta(&self) -> usize {
        self.stable.len()
    }

    pub fn to_word(&self) -> Word {
        let mut v = self.segments[0].0.clone();
        for (t, g) in self.stable.iter().zip(&self.segments[1..]) {
            v.push(*t);
            v.extend_from_slice(g);
        }
        Word(v)
    }

    /// No pinch `t⁻¹ u^l t` or `t v^l t⁻¹` between consecutive stable letters.
    pub fn is_t_reduced(&self, spec: &HnnSpec) -> bool {
        (1..self.stable.len())
            .all(|i| pinch(spec, self.stable[i - 1], &self.segments[i], self.stable[i]).is_none())
    }
}

/// One Britton pinch: the `index`-th stable letter (in the current word)
/// together with its partner was removed, and `u^l`/`v^l` exchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pinch {
    pub index: usize,
    pub t: usize,
    pub exponent: i64,
    /// true when `t⁻¹ u^l t → v^l`, false when `t v^l t⁻¹ → u^l`
    pub forward: bool,
}

/// Replacement for `left · g · right` when it is a pinch.
fn pinch(spec: &HnnSpec, left: Letter, g: &[Letter], right: Letter) -> Option<(Word, Pinch)> {
    if gen_of(left) != gen_of(right) || left != inv(right) {
        return None;
    }
    let s = spec.stable(left)?;
    if is_inverse(left) {
        let l = cyclic_subgroup_power(g, &s.u)?;
        Some((
            s.v.pow(l),
            Pinch {
                index: 0,
                t: s.t,
                exponent: l,
                forward: true,
            },
        ))
    } else {
        let l = cyclic_subgroup_power(g, &s.v)?;
        Some((
            s.u.pow(l),
            Pinch {
                index: 0,
                t: s.t,
                exponent: l,
                forward: false,
            },
        ))
    }
}

fn push_base(seg: &mut Vec<Letter>, w: &[Letter]) {
    for &l in w {
        steps::cmp(1);
        if seg.last() == Some(&inv(l)) {
            seg.pop();
            steps::rewrite(2);
        } else {
            seg.push(l);
        }
    }
}

pub fn britton_reduce_logged(w: &[Letter], spec: &HnnSpec) -> (TDecomposition, Vec<Pinch>) {
    let mut segments: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut stable: Vec<Letter> = Vec::new();
    let mut log = Vec::new();
    for &l in w {
        if !spec.is_stable(l) {
            push_base(segments.last_mut().unwrap(), &[l]);
            continue;
        }
        if let Some(&prev) = stable.last() {
            if let Some((rep, mut p)) = pinch(spec, prev, segments.last().unwrap(), l) {
                steps::rewrite(2);
                p.index = stable.len() - 1;
                log.push(p);
                stable.pop();
                segments.pop();
                push_base(segments.last_mut().unwrap(), &rep);
                continue;
            }
        }
        stable.push(l);
        segments.push(Vec::new());
    }
    (
        TDecomposition {
            segments: segments.into_iter().map(Word).collect(),
            stable,
        },
        log,
    )
}

pub fn britton_reduce(w: &[Letter], spec: &HnnSpec) -> TDecomposition {
    britton_reduce_logged(w, spec).0
}

/// Word problem in the HNN extension.
pub fn hnn_is_trivial(w: &[Letter], spec: &HnnSpec) -> bool {
    let d = britton_reduce(w, spec);
    d.theta() == 0 && d.segments[0].is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicTReduction {
    pub decomposition: TDecomposition,
    /// `T` with `T⁻¹ · input · T = output` in H
    pub conjugator: Word,
}

pub fn cyclically_t_reduce(w: &[Letter], spec: &HnnSpec) -> CyclicTReduction {
    let mut conj: Vec<Letter> = Vec::new();
    let mut cur = britton_reduce(w, spec).to_word();
    loop {
        let d = britton_reduce(&cur, spec);
        if d.theta() == 0 {
            let (c, core) = cyclic_decompose(&d.segments[0]);
            conj.extend_from_slice(&c);
            return CyclicTReduction {
                decomposition: TDecomposition {
                    segments: vec![core],
                    stable: vec![],
                },
                conjugator: free_reduce(&conj),
            };
        }
        // rotate so the word starts with its first stable letter
        let g0 = d.segments[0].clone();
        let mut rot: Vec<Letter> = d.to_word()[g0.len()..].to_vec();
        rot.extend_from_slice(&g0);
        conj.extend_from_slice(&g0);
        let rd = britton_reduce(&rot, spec);
        // rd = t^{e1} g1 … t^{en} gn, cyclic pinch across gn · (empty g0)
        let n = rd.theta();
        let first = rd.stable[0];
        let last = rd.stable[n - 1];
        let tail = &rd.segments[n];
        {
            if let Some((rep, _)) = pinch(spec, last, tail, first) {
                // conjugate by the last stable letter and its tail: move them to the front
                let mut moved = vec![last];
                moved.extend_from_slice(tail);
                let body_end = rd.to_word().len() - moved.len();
                let mut next = Vec::new();
                next.extend_from_slice(&rep);
                next.extend_from_slice(&rd.to_word()[1..body_end]);
                // conjugator: w' = M · rot · M⁻¹ with M = last · tail, i.e. conj by M⁻¹
                conj.extend_from_slice(&inverse(&moved));
                cur = Word(next);
                continue;
            }
        }
        return CyclicTReduction {
            decomposition: rd,
            conjugator: free_reduce(&conj),
        };
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conj {
    /// `T` with `T⁻¹ x T = y`
    Yes(Word),
    No,
    Unknown,
}

impl Conj {
    pub fn is_yes(&self) -> bool {
        matches!(self, Conj::Yes(_))
    }
}

/// Free-group conjugacy: `T` with `T⁻¹ a T = b`.
pub fn conj_free(a: &[Letter], b: &[Letter]) -> Option<Word> {
    let (ca, ka) = cyclic_decompose(a);
    let (cb, kb) = cyclic_decompose(b);
    if ka.len() != kb.len() {
        return None;
    }
    if ka.is_empty() {
        return Some(Word::empty());
    }
    let mut doubled = ka.0.clone();
    doubled.extend_from_slice(&ka);
    let k = crate::word::find_subslice(&doubled, &kb)?;
    Some(free_product(&[&ca, &ka[..k], &inverse(&cb)]))
}

/// Abelianization image of `w` modulo the relations `u = v`.
fn abelian_class(spec: &HnnSpec, w: &[Letter]) -> Vec<i64> {
    let mut v = vec![0i64; spec.alphabet.len()];
    for &l in w {
        v[gen_of(l)] += if is_inverse(l) { -1 } else { 1 };
    }
    v
}

fn abelian_compatible(spec: &HnnSpec, x: &[Letter], y: &[Letter]) -> bool {
    // x·y⁻¹ must lie in the span of the vectors u - v (integer combinations)
    let mut diff: Vec<i64> = abelian_class(spec, x)
        .iter()
        .zip(abelian_class(spec, y))
        .map(|(a, b)| a - b)
        .collect();
    let mut gens: Vec<Vec<i64>> = spec
        .letters
        .iter()
        .map(|s| {
            abelian_class(spec, &s.u)
                .iter()
                .zip(abelian_class(spec, &s.v))
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    // stable letters are free coordinates with no relation: compare directly
    for s in &spec.letters {
        if diff[s.t] != 0 {
            return false;
        }
    }
    // integer row reduction (Hermite-style elimination on columns)
    let cols = diff.len();
    let mut row = 0;
    for col in 0..cols {
        loop {
            let nz: Vec<usize> = (row..gens.len()).filter(|&r| gens[r][col] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| gens[r][col].abs()).unwrap();
            gens.swap(row, piv);
            let mut done = true;
            for r in row + 1..gens.len() {
                let f = gens[r][col] / gens[row][col];
                if f != 0 {
                    let pr = gens[row].clone();
                    for (x, p) in gens[r].iter_mut().zip(&pr) {
                        *x -= f * p;
                    }
                }
                if gens[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                if diff[col] % gens[row][col] != 0 {
                    return false;
                }
                let f = diff[col] / gens[row][col];
                let pr = gens[row].clone();
                for (x, p) in diff.iter_mut().zip(&pr) {
                    *x -= f * p;
                }
                row += 1;
                break;
            }
        }
        if diff[col] != 0 {
            return false;
        }
    }
    diff.iter().all(|&d| d == 0)
}

fn verify(x: &[Letter], y: &[Letter], t: &[Letter], spec: &HnnSpec) -> bool {
    let w: Vec<Letter> = [&inverse(t)[..], x, t, &inverse(y)[..]].concat();
    hnn_is_trivial(&w, spec)
}

/// Conjugacy of base words through the chain of associated subgroups.
fn conj_theta0(x: &[Letter], y: &[Letter], spec: &HnnSpec, max_exp: usize) -> Option<Word> {
    if let Some(t) = conj_free(x, y) {
        return Some(t);
    }
    // nodes: (stable index, side u=false/v=true, exponent)
    type Node = (usize, bool, i64);
    let word_of = |n: &Node| -> Word {
        let s = &spec.letters[n.0];
        if n.1 {
            s.v.pow(n.2)
        } else {
            s.u.pow(n.2)
        }
    };
    let mut all: Vec<Node> = Vec::new();
    for (i, s) in spec.letters.iter().enumerate() {
        for side in [false, true] {
            let base = if side { &s.v } else { &s.u };
            let core = cyclic_decompose(base).1.len().max(1);
            let l = (cyclic_decompose(x).1.len() / core) as i64;
            if l == 0 || l as usize > max_exp {
                continue;
            }
            all.push((i, side, l));
            all.push((i, side, -l));
        }
    }
    let mut prev: HashMap<Node, (Option<Node>, Word)> = HashMap::new();
    let mut queue = VecDeque::new();
    for n in &all {
        if let Some(t) = conj_free(x, &word_of(n)) {
            prev.insert(*n, (None, t));
            queue.push_back(*n);
        }
    }
    while let Some(n) = queue.pop_front() {
        if let Some(t2) = conj_free(&word_of(&n), y) {
            // rebuild the conjugator chain
            let mut parts = vec![t2];
            let mut cur = n;
            loop {
                let (p, t) = prev[&cur].clone();
                parts.push(t);
                match p {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            parts.reverse();
            let flat: Vec<Letter> = parts.iter().flat_map(|w| w.0.clone()).collect();
            return Some(free_reduce(&flat));
        }
        let s = &spec.letters[n.0];
        // t⁻¹ u^l t = v^l and t v^l t⁻¹ = u^l
        let hop: (Node, Word) = if n.1 {
            (
                (n.0, false, n.2),
                Word(vec![crate::word::letter(s.t, true)]),
            )
        } else {
            (
                (n.0, true, n.2),
                Word(vec![crate::word::letter(s.t, false)]),
            )
        };
        let mut nexts = vec![hop];
        for m in &all {
            if m != &n {
                if let Some(t) = conj_free(&word_of(&n), &word_of(m)) {
                    nexts.push((*m, t));
                }
            }
        }
        for (m, t) in nexts {
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(m) {
                e.insert((Some(n), t));
                queue.push_back(m);
            }
        }
    }
    None
}

fn conj_search(x: &[Letter], y: &[Letter], spec: &HnnSpec, max_exp: usize) -> Conj {
    let rx = cyclically_t_reduce(x, spec);
    let ry = cyclically_t_reduce(y, spec);
    let (dx, dy) = (&rx.decomposition, &ry.decomposition);
    if dx.theta() != dy.theta() {
        return Conj::No;
    }
    let xw = dx.to_word();
    let yw = dy.to_word();
    let finish = |tc: Word| -> Option<Word> {
        // x' = Tx⁻¹ x Tx, y' = Ty⁻¹ y Ty, tc⁻¹ x' tc = y'
        let t = free_product(&[&rx.conjugator, &tc, &inverse(&ry.conjugator)]);
        if verify(x, y, &t, spec) {
            Some(t)
        } else {
            None
        }
    };
    if dx.theta() == 0 {
        return match conj_theta0(&xw, &yw, spec, max_exp).and_then(finish) {
            Some(t) => Conj::Yes(t),
            None => Conj::No,
        };
    }
    // the cyclic sequence of stable letters is a conjugacy invariant
    if !crate::word::is_cyclic_shift(&dx.stable, &dy.stable) || !abelian_compatible(spec, &xw, &yw)
    {
        return Conj::No;
    }
    // rotations of y' starting at a stable letter, conjugated by c ∈ ⟨u⟩ ∪ ⟨v⟩
    let mut starts = Vec::new();
    let mut pos = dy.segments[0].len();
    for i in 0..dy.theta() {
        starts.push(pos);
        pos += 1 + dy.segments[i + 1].len();
    }
    let mut cands: Vec<Word> = vec![Word::empty()];
    for s in &spec.letters {
        for l in 1..=max_exp as i64 {
            for base in [&s.u, &s.v] {
                cands.push(base.pow(l));
                cands.push(base.pow(-l));
            }
        }
    }
    for &k in &starts {
        let p = &yw[..k];
        let ystar = rotate(&yw, k);
        for c in &cands {
            // x' = c · y* · c⁻¹  ⇒  (c p⁻¹)… conjugator from x' to y' is c · p⁻¹
            let lhs: Vec<Letter> =
                [&c[..], &ystar[..], &inverse(c)[..], &inverse(&xw)[..]].concat();
            if hnn_is_trivial(&lhs, spec) {
                let tc = free_product(&[c, &inverse(p)]);
                if let Some(t) = finish(tc) {
                    return Conj::Yes(t);
                }
            }
        }
    }
    Conj::Unknown
}

/// Collins-style conjugacy test. `max_exp` bounds the exponent of the
/// associated-subgroup conjugator; `None` uses `max(‖x‖, ‖y‖) + 8`.
pub fn hnn_conjugate(x: &[Letter], y: &[Letter], spec: &HnnSpec, max_exp: Option<usize>) -> Conj {
    let budget = max_exp.unwrap_or(x.len().max(y.len()) + 8);
    match conj_search(x, y, spec, budget) {
        Conj::Unknown => match conj_search(y, x, spec, budget) {
            Conj::Yes(t) => Conj::Yes(t.inverse()),
            other => other,
        },
        v => v,
    }
}
