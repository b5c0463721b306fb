//! Deliberately naive reference implementations used as cross-checks.

use crate::smallcancel::{PieceKind, PieceReport, RelatorSystem};
use crate::word::{free_reduce, inv, inverse, rotate, Letter, Word};

/// Freely reduced words of length at most `n` over `gens` generators.
pub fn reduced_words_upto(gens: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Vec::<Letter>::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &frontier {
            for l in 0..(2 * gens as u32) {
                if w.last() == Some(&(l ^ 1)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Word));
        frontier = next;
    }
    out
}

/// All rotations of `r` (sign false) and of `r⁻¹` (sign true), with offsets.
fn symmetrized_elements(r: &[Letter]) -> Vec<(bool, usize, Vec<Letter>)> {
    let ri = inverse(r);
    let mut out = Vec::new();
    for (inv, w) in [(false, r), (true, &ri[..])] {
        for q in 0..w.len() {
            out.push((inv, q, rotate(w, q)));
        }
    }
    out
}

type Best = Option<((isize, usize, bool, usize), PieceReport)>;

fn consider(best: &mut Best, rep: PieceReport, eps: usize) {
    if rep.piece.is_empty() {
        return;
    }
    let key = (
        -(rep.piece.len() as isize),
        rep.offset,
        rep.partner_inverted,
        if eps == 0 { rep.partner_offset } else { 0 },
    );
    if best.as_ref().is_none_or(|b| key < b.0) {
        *best = Some((key, rep));
    }
}

fn lcp(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Longest ε-piece per ordered relator pair (or ε′-piece per relator),
/// leftmost on ties, by direct enumeration of symmetrized elements and of
/// conjugators `Y, Z` with `‖Y‖, ‖Z‖ ≤ ε`.
pub fn naive_pieces(rs: &RelatorSystem, eps: usize, kind: PieceKind) -> Vec<PieceReport> {
    let gens = rs.alphabet.len();
    let short: Vec<Word> = reduced_words_upto(gens, eps);
    let rels = rs.relators();
    let mut out = Vec::new();
    let piece = |kind, i, p, j, inv, q, u: &[Letter], up: Word, y: &Word, z: &Word| PieceReport {
        kind,
        rel: i,
        offset: p,
        partner: j,
        partner_inverted: inv,
        partner_offset: q,
        piece: Word(u.to_vec()),
        partner_piece: up,
        y: y.clone(),
        z: z.clone(),
    };
    let empty = Word::empty();
    match kind {
        PieceKind::Eps => {
            for i in 0..rels.len() {
                let n = rels[i].len();
                let rots: Vec<Vec<Letter>> = (0..n).map(|p| rotate(&rels[i], p)).collect();
                for j in 0..rels.len() {
                    let partners = symmetrized_elements(&rels[j]);
                    let mut best = None;
                    for (p, r) in rots.iter().enumerate() {
                        for (inv, q, r2) in &partners {
                            if eps == 0 {
                                if r == r2 {
                                    continue;
                                }
                                let len = lcp(r, r2);
                                let up = Word(r[..len].to_vec());
                                consider(
                                    &mut best,
                                    piece(kind, i, p, j, *inv, *q, &r[..len], up, &empty, &empty),
                                    eps,
                                );
                                continue;
                            }
                            for y in &short {
                                // partner condition Y R Y⁻¹ ≠ R′ with Y = y⁻¹
                                let conj = free_reduce(&[&inverse(y)[..], &r[..], &y[..]].concat());
                                if &conj.0 == r2 {
                                    continue;
                                }
                                for len in 1..=n {
                                    let u = &r[..len];
                                    for z in &short {
                                        let up =
                                            free_reduce(&[&inverse(y)[..], u, &z[..]].concat());
                                        if r2.starts_with(&up) {
                                            consider(
                                                &mut best,
                                                piece(kind, i, p, j, *inv, *q, u, up, y, z),
                                                eps,
                                            );
                                        }
                                    }
                                }
                            }
                        }
                    }
                    out.extend(best.map(|b| b.1));
                }
            }
        }
        PieceKind::EpsPrime => {
            for (i, rel) in rels.iter().enumerate() {
                let n = rel.len();
                let mut best = None;
                if eps == 0 {
                    for p in 0..n {
                        for s in 0..n {
                            // U = R[p..p+len), U′ = U at [s, s+len)
                            let mut len = 0;
                            while len < n
                                && rel[(p + len) % n] == rel[(s + len) % n]
                                && disjoint(p, len + 1, s, len + 1, n)
                            {
                                len += 1;
                            }
                            let u: Vec<Letter> = (0..len).map(|t| rel[(p + t) % n]).collect();
                            let up = Word(u.clone());
                            consider(
                                &mut best,
                                piece(kind, i, p, i, false, s, &u, up, &empty, &empty),
                                eps,
                            );
                            // U′ = U⁻¹ ending at e
                            let e = s;
                            let mut len = 0;
                            while len < n
                                && rel[(e + 2 * n - 1 - len) % n] == inv(rel[(p + len) % n])
                                && disjoint(p, len + 1, (e + 2 * n - len - 1) % n, len + 1, n)
                            {
                                len += 1;
                            }
                            let u: Vec<Letter> = (0..len).map(|t| rel[(p + t) % n]).collect();
                            let up = Word(inverse(&u));
                            let qs = (e + 2 * n - len) % n;
                            consider(
                                &mut best,
                                piece(kind, i, p, i, true, qs, &u, up, &empty, &empty),
                                eps,
                            );
                        }
                    }
                } else {
                    for p in 0..n {
                        let r = rotate(rel, p);
                        for len in 1..=n {
                            let u = &r[..len];
                            // R = U V U′ V′: U′ lies inside the complement of U
                            let rest = &r[len..];
                            for inv in [false, true] {
                                let base: Vec<Letter> = if inv { inverse(u) } else { u.to_vec() };
                                for y in &short {
                                    for z in &short {
                                        let up = free_reduce(
                                            &[&inverse(y)[..], &base[..], &z[..]].concat(),
                                        );
                                        if up.len() > rest.len() {
                                            continue;
                                        }
                                        for s in 0..=rest.len() - up.len() {
                                            if rest[s..].starts_with(&up) {
                                                let q = (p + len + s) % n;
                                                consider(
                                                    &mut best,
                                                    piece(
                                                        kind,
                                                        i,
                                                        p,
                                                        i,
                                                        inv,
                                                        q,
                                                        u,
                                                        up.clone(),
                                                        y,
                                                        z,
                                                    ),
                                                    eps,
                                                );
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                out.extend(best.map(|b| b.1));
            }
        }
    }
    out
}

fn disjoint(a: usize, x: usize, b: usize, y: usize, n: usize) -> bool {
    if x + y > n {
        return false;
    }
    // every position of the first arc lies outside the second
    (0..x).all(|t| {
        let pos = (a + t) % n;
        (pos + n - b) % n >= y
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_word_len: usize,
    pub max_conjugator_len: usize,
    pub max_applications: usize,
    pub max_frontier: usize,
}

impl OracleBudget {
    /// Length cap `3 · max relator length`, modest search limits.
    pub fn for_system(rs: &RelatorSystem) -> Self {
        OracleBudget {
            max_word_len: 3 * rs.max_len(),
            max_conjugator_len: 8,
            max_applications: 2_000_000,
            max_frontier: 200_000,
        }
    }
}

/// A trivial word with its decomposition `∏ u_i r_i^{±1} u_i⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureSample {
    pub word: Word,
    /// (conjugator, relator index, inverted, rotation)
    pub factors: Vec<(Word, usize, bool, usize)>,
}

impl ClosureSample {
    /// Rebuilds the word from its factors.
    pub fn product(&self, rs: &RelatorSystem) -> Word {
        let mut v = Vec::new();
        for (u, i, inverted, rot) in &self.factors {
            let r = &rs.relators()[*i];
            let r = if *inverted { inverse(r) } else { r.0.clone() };
            v.extend_from_slice(u);
            v.extend(rotate(&r, *rot));
            v.extend(inverse(u));
        }
        free_reduce(&v)
    }
}

/// `count` random products of 1..=`conjugates` conjugates of relators
/// (random rotation and sign) by conjugators of length ≤ `conjugator_len`.
pub fn oracle_normal_closure_sample(
    rs: &RelatorSystem,
    conjugates: usize,
    conjugator_len: usize,
    count: usize,
    seed: u64,
) -> Vec<ClosureSample> {
    use rand::Rng;
    if conjugates == 0 || rs.is_empty() {
        return Vec::new();
    }
    let mut rng = super::gen::rng(seed);
    let gens = rs.alphabet.len();
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=conjugates);
            let factors: Vec<(Word, usize, bool, usize)> = (0..k)
                .map(|_| {
                    let n = rng.gen_range(0..=conjugator_len);
                    let u = super::gen::random_reduced(&mut rng, gens, n);
                    let i = rng.gen_range(0..rs.relators().len());
                    let rot = if conjugator_len == 0 {
                        0
                    } else {
                        rng.gen_range(0..rs.relators()[i].len())
                    };
                    (u, i, rng.gen_bool(0.5), rot)
                })
                .collect();
            let mut s = ClosureSample {
                word: Word::empty(),
                factors,
            };
            s.word = s.product(rs);
            s
        })
        .collect()
}

fn canonical_state(w: &[Letter]) -> Vec<Letter> {
    let c = crate::word::cyclic_reduce(&free_reduce(w));
    crate::word::least_rotation(&c)
}

/// Bidirectional breadth-first search over cyclic words of length at most
/// `max_word_len`, moving by relator applications (replace a prefix `p` of a
/// cyclic shift `p q` of `R^{±1}` by `q⁻¹`). "Yes"/"no" only when the search
/// closes within budget; otherwise "unknown".
pub fn oracle_exhaustive_wp(rs: &RelatorSystem, w: &[Letter], budget: &OracleBudget) -> Verdict {
    use std::collections::{HashSet, VecDeque};
    let start = canonical_state(w);
    if start.is_empty() {
        return Verdict::Yes;
    }
    if rs.is_empty() {
        return Verdict::No;
    }
    let sym_count: usize = rs.relators().iter().map(|r| 2 * r.len()).sum();
    // the first expansion alone would exceed the budget
    if start.len().max(1).saturating_mul(sym_count) > budget.max_applications {
        return Verdict::Unknown;
    }
    // cyclic shifts of R^{±1}, read lazily as (base word, rotation)
    let bases: Vec<Vec<Letter>> = rs
        .relators()
        .iter()
        .flat_map(|r| [r.0.clone(), inverse(r)])
        .collect();
    let mut apps = 0usize;
    let mut seen = [HashSet::new(), HashSet::new()];
    let mut queue = [VecDeque::new(), VecDeque::new()];
    seen[0].insert(start.clone());
    queue[0].push_back(start);
    seen[1].insert(Vec::new());
    queue[1].push_back(Vec::new());
    loop {
        // expand the smaller frontier
        let side = if queue[0].len() <= queue[1].len() { 0 } else { 1 };
        let Some(s) = queue[side].pop_front() else {
            return Verdict::No;
        };
        let n = s.len();
        let positions = n.max(1);
        if apps.saturating_add(positions.saturating_mul(sym_count)) > budget.max_applications {
            return Verdict::Unknown;
        }
        for i in 0..positions {
            for (base, rot) in bases.iter().flat_map(|b| (0..b.len()).map(move |q| (b, q))) {
                let r = rotate(base, rot);
                let mut k = 0;
                loop {
                    apps += 1;
                    // replace s[i..i+k] (cyclic) by (r[k..])⁻¹
                    let mut v: Vec<Letter> = inverse(&r[k..]);
                    for t in k..n {
                        v.push(s[(i + t) % n]);
                    }
                    if v.len() <= budget.max_word_len + r.len() {
                        let c = canonical_state(&v);
                        if c.len() <= budget.max_word_len && !seen[side].contains(&c) {
                            if seen[1 - side].contains(&c) {
                                return Verdict::Yes;
                            }
                            seen[side].insert(c.clone());
                            queue[side].push_back(c);
                            if seen[side].len() > budget.max_frontier {
                                return Verdict::Unknown;
                            }
                        }
                    }
                    if k >= n || k >= r.len() || s[(i + k) % n] != r[k] {
                        break;
                    }
                    k += 1;
                }
            }
        }
    }
}
