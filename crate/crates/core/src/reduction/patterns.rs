//! Block partitions of relators, the deleted-block words Û, the search
//! dictionary E₀ and the direct (dictionary-free) arc detector.

use std::sync::OnceLock;

use aho_corasick::{AhoCorasick, AhoCorasickKind, MatchKind};
use num_traits::One;

use crate::error::{Error, Result};
use crate::smallcancel::{RelatorSystem, Q};
use crate::steps;
use crate::word::{find_subslice, free_product, inverse, least_rotation, Letter, Word};

use super::ReductionParams;

/// Block widths for a relator of length `len`: `s − 1` blocks of
/// `⌊(1−η)‖R‖⌋` and a last block taking the remainder.
pub fn block_widths(len: usize, eta: Q) -> Result<Vec<usize>> {
    let one_minus = Q::one() - eta;
    let b = (one_minus * Q::from_integer(len as i64))
        .floor()
        .to_integer() as usize;
    if b == 0 {
        return Err(Error::InvalidParams(format!(
            "relator of length {len} is too short for eta = {eta}: empty blocks"
        )));
    }
    let s_max = (Q::one() / one_minus).ceil().to_integer() as usize;
    let s = (len / b).min(s_max);
    if s < 3 {
        return Err(Error::InvalidParams(format!(
            "relator of length {len} splits into {s} < 3 blocks at eta = {eta}"
        )));
    }
    let mut w = vec![b; s - 1];
    w.push(len - (s - 1) * b);
    Ok(w)
}

/// `R = U¹ U² … Uˢ` for one orientation of one relator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub rel: usize,
    pub inverted: bool,
    pub word: Word,
    pub widths: Vec<usize>,
    starts: Vec<usize>,
}

impl Partition {
    pub fn new(rel: usize, inverted: bool, word: Word, eta: Q) -> Result<Self> {
        let widths = block_widths(word.len(), eta)?;
        let mut starts = Vec::with_capacity(widths.len());
        let mut acc = 0;
        for w in &widths {
            starts.push(acc);
            acc += w;
        }
        Ok(Partition {
            rel,
            inverted,
            word,
            widths,
            starts,
        })
    }

    pub fn s(&self) -> usize {
        self.widths.len()
    }

    /// 1-based block `U^j`; `U^0` is `U^s`.
    fn block_index(&self, j: usize) -> usize {
        if j == 0 {
            self.s() - 1
        } else {
            j - 1
        }
    }

    fn cyclic_arc(&self, start: usize, len: usize) -> Word {
        let n = self.word.len();
        Word((0..len).map(|i| self.word[(start + i) % n]).collect())
    }

    /// `U^{j−1} U^j`.
    pub fn pair(&self, j: usize) -> Word {
        let a = self.block_index(j - 1);
        let b = self.block_index(j);
        self.cyclic_arc(self.starts[a], self.widths[a] + self.widths[b])
    }

    /// `Û^j`: the relator with `U^{j−1} U^j` deleted, read cyclically from
    /// the end of `U^j`. `Û^j · U^{j−1}U^j` is a cyclic shift of the relator.
    pub fn hat(&self, j: usize) -> Word {
        let a = self.block_index(j - 1);
        let b = self.block_index(j);
        let end = self.starts[b] + self.widths[b];
        self.cyclic_arc(end, self.word.len() - self.widths[a] - self.widths[b])
    }
}

/// All freely reduced words of length ≤ `n` over `gens` generators, ShortLex order.
pub fn reduced_words_upto(gens: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    let mut letters: Vec<Letter> = (0..2 * gens as u32).collect();
    letters.sort_by_key(|&l| crate::word::shortlex_key(l));
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() == Some(&crate::word::inv(l)) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// One dictionary word `ShortLex(T₁⁻¹ Û T₂)` with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub partition: usize,
    pub rel: usize,
    pub inverted: bool,
    pub block: usize,
    pub t1: Word,
    pub t2: Word,
    pub text: Word,
    /// `ShortLex(T₁⁻¹ (U^{j−1}U^j)⁻¹ T₂)`, equal to `text` in the quotient
    pub replacement: Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionaryKind {
    /// every `ShortLex(T₁⁻¹ Û T₂)` with `‖T₁‖, ‖T₂‖ ≤ 3ε`
    Full,
    /// only the cores `Û[3ε .. ‖Û‖−3ε]`; same verdicts, smaller automaton
    Cores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub start: usize,
    pub len: usize,
    pub entry: usize,
}

/// Letters to bytes. One byte per letter when the alphabet is small,
/// otherwise two bytes with the high bit marking the first, so matches can
/// only start on letter boundaries.
#[derive(Debug, Clone, Copy)]
struct Encoder {
    wide: bool,
}

impl Encoder {
    fn encode(&self, w: &[Letter], out: &mut Vec<u8>) {
        out.clear();
        if self.wide {
            for &l in w {
                out.push(0x80 | (l >> 7) as u8);
                out.push((l & 0x7f) as u8);
            }
        } else {
            out.extend(w.iter().map(|&l| l as u8));
        }
    }

    fn width(&self) -> usize {
        if self.wide {
            2
        } else {
            1
        }
    }
}

#[derive(Debug)]
pub struct PatternSets {
    pub n: usize,
    /// indices (into the relator system) of `_nR`
    pub admitted: Vec<usize>,
    pub l_max: usize,
    pub l_min: usize,
    pub k_n: usize,
    /// `L̃_n = ⌈λ(ηL_n + 2ε) + c⌉`
    pub spacing: usize,
    /// half window: `max(L̃_n, longest entry)`
    pub half_width: usize,
    pub partitions: Vec<Partition>,
    pub entries: Vec<Entry>,
    pub kind: DictionaryKind,
    enc: Encoder,
    ac: Option<AhoCorasick>,
    overlapping: OnceLock<Option<AhoCorasick>>,
}

/// `L̃ = ⌈λ(η·l_max + 2ε) + c⌉`, at least 1.
pub fn spacing(lambda: Q, c: Q, eps: usize, eta: Q, l_max: usize) -> usize {
    (lambda * (eta * Q::from_integer(l_max as i64) + Q::from_integer(2 * eps as i64)) + c)
        .ceil()
        .to_integer()
        .max(1) as usize
}

/// Relator indices sorted by (length, index).
pub fn length_order(rs: &RelatorSystem) -> Vec<usize> {
    let mut v: Vec<usize> = (0..rs.relators().len()).collect();
    v.sort_by_key(|&i| (rs.relators()[i].len(), i));
    v
}

fn partitions_of(rs: &RelatorSystem, admitted: &[usize], eta: Q) -> Result<Vec<Partition>> {
    let mut parts = Vec::new();
    let mut seen: Vec<Word> = Vec::new();
    for &i in admitted {
        let r = &rs.relators()[i];
        for inverted in [false, true] {
            let w = if inverted {
                Word(least_rotation(&inverse(r)))
            } else {
                Word(least_rotation(r))
            };
            if seen.contains(&w) {
                continue;
            }
            seen.push(w.clone());
            parts.push(Partition::new(i, inverted, w, eta)?);
        }
    }
    Ok(parts)
}

/// Estimated total letters of E₀.
pub fn e0_cost(parts: &[Partition], gens: usize, eps: usize) -> u128 {
    let t = reduced_count(gens, 3 * eps) as u128;
    parts
        .iter()
        .map(|p| {
            (1..=p.s())
                .map(|j| (p.hat(j).len() + 6 * eps) as u128)
                .sum::<u128>()
                * t
                * t
        })
        .sum()
}

fn reduced_count(gens: usize, n: usize) -> u64 {
    let k = 2 * gens as u64;
    let mut total = 1u64;
    let mut layer = 1u64;
    for i in 0..n {
        layer = if i == 0 { k } else { layer.saturating_mul(k - 1) };
        total = total.saturating_add(layer);
    }
    total
}

impl PatternSets {
    /// `_nR` and its dictionary. `budget` caps the total letters of E₀;
    /// above it the build is refused with the estimate.
    pub fn build(
        rs: &RelatorSystem,
        n: usize,
        rp: &ReductionParams,
        budget: u128,
    ) -> Result<Self> {
        Self::build_kind(rs, n, rp, budget, DictionaryKind::Full)
    }

    pub fn build_kind(
        rs: &RelatorSystem,
        n: usize,
        rp: &ReductionParams,
        budget: u128,
        kind: DictionaryKind,
    ) -> Result<Self> {
        let bound = rp.truncation_bound(n);
        let admitted: Vec<usize> = length_order(rs)
            .into_iter()
            .filter(|&i| Q::from_integer(rs.relators()[i].len() as i64) <= bound)
            .collect();
        Self::from_admitted(rs, n, admitted, rp, budget, kind)
    }

    pub fn from_admitted(
        rs: &RelatorSystem,
        n: usize,
        admitted: Vec<usize>,
        rp: &ReductionParams,
        budget: u128,
        kind: DictionaryKind,
    ) -> Result<Self> {
        let eps = rp.sc.eps;
        let parts = partitions_of(rs, &admitted, rp.eta)?;
        for p in &parts {
            for j in 1..=p.s() {
                if p.hat(j).len() <= 6 * eps {
                    return Err(Error::InvalidParams(format!(
                        "deleted-block word of length {} not longer than 6*eps = {}",
                        p.hat(j).len(),
                        6 * eps
                    )));
                }
            }
        }
        if kind == DictionaryKind::Full {
            let cost = e0_cost(&parts, rs.alphabet.len(), eps);
            if cost > budget {
                return Err(Error::Budget(format!(
                    "E0 for n = {n} would hold about {cost} letters (budget {budget}); \
                     use the core dictionary or the direct detector"
                )));
            }
        }
        let ts = if kind == DictionaryKind::Full {
            reduced_words_upto(rs.alphabet.len(), 3 * eps)
        } else {
            Vec::new()
        };
        let mut entries: Vec<Entry> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (pi, p) in parts.iter().enumerate() {
            for j in 1..=p.s() {
                let hat = p.hat(j);
                let pair_inv = p.pair(j).inverse();
                let mut push = |t1: Word, t2: Word| {
                    let text = free_product(&[&inverse(&t1), &hat, &t2]);
                    if text.is_empty() || !seen.insert(text.clone()) {
                        return;
                    }
                    let replacement = free_product(&[&inverse(&t1), &pair_inv, &t2]);
                    entries.push(Entry {
                        partition: pi,
                        rel: p.rel,
                        inverted: p.inverted,
                        block: j,
                        t1,
                        t2,
                        text,
                        replacement,
                    });
                };
                match kind {
                    DictionaryKind::Full => {
                        for t1 in &ts {
                            for t2 in &ts {
                                push(t1.clone(), t2.clone());
                            }
                        }
                    }
                    DictionaryKind::Cores => {
                        let a = 3 * eps;
                        let t1 = Word(hat[..a].to_vec());
                        let t2 = Word(inverse(&hat[hat.len() - a..]));
                        push(t1, t2);
                    }
                }
            }
        }
        let l_max = admitted
            .iter()
            .map(|&i| rs.relators()[i].len())
            .max()
            .unwrap_or(0);
        let l_min = admitted
            .iter()
            .map(|&i| rs.relators()[i].len())
            .min()
            .unwrap_or(0);
        let spacing = spacing(rp.sc.lambda, rp.sc.c, eps, rp.eta, l_max);
        let longest = entries.iter().map(|e| e.text.len()).max().unwrap_or(0);
        let enc = Encoder {
            wide: 2 * rs.alphabet.len() > 256,
        };
        let ac = if entries.is_empty() {
            None
        } else {
            let mut buf = Vec::new();
            let pats: Vec<Vec<u8>> = entries
                .iter()
                .map(|e| {
                    enc.encode(&e.text, &mut buf);
                    buf.clone()
                })
                .collect();
            Some(
                AhoCorasick::builder()
                    .match_kind(MatchKind::LeftmostLongest)
                    .kind(Some(AhoCorasickKind::ContiguousNFA))
                    .build(&pats)
                    .map_err(|e| Error::Budget(format!("automaton: {e}")))?,
            )
        };
        steps::rewrite(entries.iter().map(|e| e.text.len() as u64).sum());
        Ok(PatternSets {
            n,
            k_n: admitted.len(),
            admitted,
            l_max,
            l_min,
            spacing,
            half_width: spacing.max(longest),
            partitions: parts,
            entries,
            kind,
            enc,
            ac,
            overlapping: OnceLock::new(),
        })
    }

    /// `_nR′`: the deleted-block words, in enumeration order.
    pub fn hats(&self) -> Vec<Word> {
        self.partitions
            .iter()
            .flat_map(|p| (1..=p.s()).map(move |j| p.hat(j)))
            .collect()
    }

    /// `_nR″`: the block pairs `U^{j−1}U^j`.
    pub fn pairs(&self) -> Vec<Word> {
        self.partitions
            .iter()
            .flat_map(|p| (1..=p.s()).map(move |j| p.pair(j)))
            .collect()
    }

    pub fn total_entry_len(&self) -> usize {
        self.entries.iter().map(|e| e.text.len()).sum()
    }

    /// Leftmost, then longest dictionary hit in `w`.
    pub fn find(&self, w: &[Letter]) -> Option<Hit> {
        let ac = self.ac.as_ref()?;
        let mut buf = Vec::new();
        self.enc.encode(w, &mut buf);
        steps::cmp(w.len() as u64);
        let m = ac.find(&buf[..])?;
        let k = self.enc.width();
        Some(Hit {
            start: m.start() / k,
            len: (m.end() - m.start()) / k,
            entry: m.pattern().as_usize(),
        })
    }

    /// Hit on the cyclic word `w` (matches of length at most `‖w‖`), with
    /// start positions taken mod `‖w‖`.
    pub fn find_cyclic(&self, w: &[Letter]) -> Option<Hit> {
        let n = w.len();
        if n == 0 {
            return None;
        }
        let mut text = w.to_vec();
        text.extend_from_slice(&w[..n - 1]);
        self.find_in_doubled(&text, n)
    }

    /// `text` is a cyclic word of length `n` read twice (minus one letter).
    pub(crate) fn find_in_doubled(&self, text: &[Letter], n: usize) -> Option<Hit> {
        let ac = self.ac.as_ref()?;
        let mut buf = Vec::new();
        self.enc.encode(text, &mut buf);
        steps::cmp(text.len() as u64);
        let k = self.enc.width();
        let first = ac.find(&buf[..])?;
        let hit = Hit {
            start: first.start() / k,
            len: (first.end() - first.start()) / k,
            entry: first.pattern().as_usize(),
        };
        if hit.len <= n {
            return Some(Hit {
                start: hit.start % n,
                ..hit
            });
        }
        // an entry longer than the circle wraps onto itself; look for the
        // leftmost-longest one that fits
        let ov = self
            .overlapping
            .get_or_init(|| {
                let mut b = Vec::new();
                let pats: Vec<Vec<u8>> = self
                    .entries
                    .iter()
                    .map(|e| {
                        self.enc.encode(&e.text, &mut b);
                        b.clone()
                    })
                    .collect();
                AhoCorasick::builder()
                    .match_kind(MatchKind::Standard)
                    .build(&pats)
                    .ok()
            })
            .as_ref()?;
        let best = ov
            .find_overlapping_iter(&buf[..])
            .map(|m| Hit {
                start: m.start() / k,
                len: (m.end() - m.start()) / k,
                entry: m.pattern().as_usize(),
            })
            .filter(|h| h.len <= n && h.start < n)
            .min_by_key(|h| (h.start, std::cmp::Reverse(h.len), h.entry))?;
        Some(best)
    }
}

/// A detected arc: `w[start..start+len]` is the trimmed core of `Û^block`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcHit {
    pub rel: usize,
    pub inverted: bool,
    pub block: usize,
    pub start: usize,
    pub len: usize,
}

/// Direct scan for `(ε₀, η)`-arcs in block form: `w` contains
/// `ShortLex(T₁⁻¹ Û T₂)` with `‖T₁‖, ‖T₂‖ ≤ ε₀` exactly when it contains the
/// core of `Û` with `ε₀` letters trimmed on each side, so each core is
/// searched for directly. With `ε₀ = 3ε` the verdict matches E₀.
pub fn detect_eta_arc_direct(
    w: &[Letter],
    rs: &RelatorSystem,
    eps0: usize,
    eta: Q,
) -> Result<Option<ArcHit>> {
    detect(w, rs, eps0, eta, false)
}

/// As [`detect_eta_arc_direct`] on the cyclic word `w`.
pub fn detect_eta_arc_cyclic(
    w: &[Letter],
    rs: &RelatorSystem,
    eps0: usize,
    eta: Q,
) -> Result<Option<ArcHit>> {
    detect(w, rs, eps0, eta, true)
}

fn detect(
    w: &[Letter],
    rs: &RelatorSystem,
    eps0: usize,
    eta: Q,
    cyclic: bool,
) -> Result<Option<ArcHit>> {
    if w.is_empty() {
        return Ok(None);
    }
    let all: Vec<usize> = (0..rs.relators().len()).collect();
    let parts = partitions_of(rs, &all, eta)?;
    let text: Vec<Letter> = if cyclic {
        let mut t = w.to_vec();
        t.extend_from_slice(&w[..w.len() - 1]);
        t
    } else {
        w.to_vec()
    };
    let mut best: Option<(usize, ArcHit)> = None;
    for p in &parts {
        for j in 1..=p.s() {
            let hat = p.hat(j);
            if hat.len() <= 2 * eps0 {
                return Err(Error::InvalidParams(format!(
                    "deleted-block word of length {} not longer than 2*eps0",
                    hat.len()
                )));
            }
            let core = &hat[eps0..hat.len() - eps0];
            if core.len() > w.len() && cyclic {
                continue;
            }
            steps::cmp(text.len() as u64);
            if let Some(s) = find_subslice(&text, core) {
                let h = ArcHit {
                    rel: p.rel,
                    inverted: p.inverted,
                    block: j,
                    start: s % w.len(),
                    len: core.len(),
                };
                let better = best.as_ref().is_none_or(|(bs, b)| {
                    (s, std::cmp::Reverse(core.len())) < (*bs, std::cmp::Reverse(b.len))
                });
                if better {
                    best = Some((s, h));
                }
            }
        }
    }
    Ok(best.map(|(_, h)| h))
}
