//! Pieces, the C / C′ conditions, the exponent-schedule relator family and
//! quasi-geodesic constants for powers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::steps;
use crate::word::{
    canonical_relator, free_product, in_same_elementary_free, inverse, is_cyclically_reduced,
    primitive_period, Alphabet, Letter, Word,
};

pub type Q = Rational64;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SCParams {
    pub lambda: Q,
    pub c: Q,
    pub eps: usize,
    pub mu: Q,
    pub rho: usize,
}

impl SCParams {
    pub fn new(lambda: Q, c: Q, eps: usize, mu: Q, rho: usize) -> Result<Self> {
        if lambda < Q::one() {
            return Err(Error::InvalidParams(format!("lambda = {lambda} < 1")));
        }
        if c < Q::zero() {
            return Err(Error::InvalidParams(format!("c = {c} < 0")));
        }
        if mu <= Q::zero() || mu >= Q::one() {
            return Err(Error::InvalidParams(format!("mu = {mu} outside (0,1)")));
        }
        if rho == 0 {
            return Err(Error::InvalidParams("rho must be positive".into()));
        }
        Ok(SCParams {
            lambda,
            c,
            eps,
            mu,
            rho,
        })
    }

    /// λ=1, c=0, ε=0 over a free base.
    pub fn free(mu: Q, rho: usize) -> Self {
        SCParams::new(Q::one(), Q::zero(), 0, mu, rho).expect("valid free params")
    }

    pub fn eta_wp(&self) -> Q {
        Q::one() - Q::from_integer(23) * self.mu
    }

    pub fn eta_conj(&self) -> Q {
        Q::one() - Q::from_integer(121) * self.lambda * self.mu
    }

    pub fn eta_prime(eta: Q) -> Q {
        Q::from_integer(3) * eta - Q::from_integer(2)
    }

    pub fn conj_ok(&self) -> bool {
        self.eta_conj() > Q::zero()
    }
}

/// Cyclically reduced relators stored as canonical representatives
/// (ShortLex-least rotation of R or R⁻¹); the symmetrized closure is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorSystem {
    pub alphabet: Alphabet,
    relators: Vec<Word>,
    pub params: SCParams,
}

impl RelatorSystem {
    pub fn new(alphabet: Alphabet, rels: &[Word], params: SCParams) -> Result<Self> {
        let mut out: Vec<Word> = Vec::new();
        for r in rels {
            alphabet.check(r)?;
            if r.is_empty() {
                continue;
            }
            if !is_cyclically_reduced(r) {
                return Err(Error::NotCyclicallyReduced(alphabet.format(r)));
            }
            let c = Word(canonical_relator(r));
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(RelatorSystem {
            alphabet,
            relators: out,
            params,
        })
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).min().unwrap_or(0)
    }

    pub fn total_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }

    /// Full symmetrized set. Quadratic size; meant for small systems.
    pub fn symmetrized(&self) -> std::collections::BTreeSet<Word> {
        crate::word::symmetrize(self.relators.iter())
            .expect("stored relators are cyclically reduced")
    }

    pub fn with_params(&self, params: SCParams) -> Self {
        RelatorSystem {
            params,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceKind {
    /// shared by two distinct elements of the symmetrized set
    Eps,
    /// two disjoint occurrences inside one relator
    EpsPrime,
}

/// A piece `U` starting at `offset` of relator `rel`, and its partner `U′`
/// starting at `partner_offset` of relator `partner` (read in the inverse
/// orientation when `partner_inverted`). Verifies `Y⁻¹ U Z = U′` freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceReport {
    pub kind: PieceKind,
    pub rel: usize,
    pub offset: usize,
    pub partner: usize,
    pub partner_inverted: bool,
    pub partner_offset: usize,
    pub piece: Word,
    pub partner_piece: Word,
    pub y: Word,
    pub z: Word,
}

impl PieceReport {
    pub fn len(&self) -> usize {
        self.piece.len()
    }

    pub fn is_empty(&self) -> bool {
        self.piece.is_empty()
    }

    /// Checks `Y⁻¹ U Z = U′`, or `Y⁻¹ U⁻¹ Z = U′` for an inverted ε′-piece.
    pub fn verify(&self) -> bool {
        let u = if self.kind == PieceKind::EpsPrime && self.partner_inverted {
            self.piece.inverse()
        } else {
            self.piece.clone()
        };
        free_product(&[
            &self.y.inverse(),
            &u,
            &self.z,
            &self.partner_piece.inverse(),
        ])
        .is_empty()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cyc(w: &[Letter], start: usize, len: usize) -> Vec<Letter> {
    let n = w.len();
    (0..len).map(|k| w[(start + k) % n]).collect()
}

/// Visits every cell `(p, q)` of the torus `|a| × |b|` with the length of the
/// common run starting there (capped at `min(|a|, |b|)`).
fn for_each_run(a: &[Letter], b: &[Letter], mut f: impl FnMut(usize, usize, usize)) {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return;
    }
    let cap = n.min(m);
    let g = gcd(n, m);
    let cycle = n / g * m;
    for p0 in 0..g {
        // find a mismatch on this diagonal to anchor the backward pass
        let mut anchor = None;
        let (mut p, mut q) = (p0, 0usize);
        for t in 0..cycle {
            steps::cmp(1);
            if a[p] != b[q] {
                anchor = Some(t);
                break;
            }
            p = if p + 1 == n { 0 } else { p + 1 };
            q = if q + 1 == m { 0 } else { q + 1 };
        }
        let Some(_) = anchor else {
            let (mut p, mut q) = (p0, 0usize);
            for _ in 0..cycle {
                f(p, q, cap);
                p = (p + 1) % n;
                q = (q + 1) % m;
            }
            continue;
        };
        // (p, q) is the mismatch; walk backwards from it.
        let mut run = 0usize;
        for _ in 0..cycle {
            steps::cmp(1);
            run = if a[p] == b[q] { (run + 1).min(cap) } else { 0 };
            f(p, q, run);
            p = if p == 0 { n - 1 } else { p - 1 };
            q = if q == 0 { m - 1 } else { q - 1 };
        }
    }
}

/// Ordering key for leftmost-longest selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    neg_len: isize,
    offset: usize,
    inverted: bool,
    partner_offset: usize,
}

fn min_residue(p: usize, k_lo: usize, k_hi: usize, n: usize) -> (usize, usize) {
    // smallest (p - k) mod n for k in [k_lo, k_hi]; returns (residue, k)
    let p = p as isize;
    let (lo, hi) = (p - k_hi as isize, p - k_lo as isize);
    if lo >= 0 {
        (lo as usize, k_hi)
    } else if hi >= 0 {
        (0, p as usize)
    } else {
        ((lo + n as isize) as usize, k_hi)
    }
}

/// Longest ε-piece located in relator `i` whose partner is an element of the
/// symmetrized closure of relator `j` (leftmost on ties). `None` when the
/// longest piece is empty.
fn pair_piece(rs: &[Word], i: usize, j: usize, eps: usize) -> Option<PieceReport> {
    let a = &rs[i];
    let n = a.len();
    let period = primitive_period(a);
    let mut best: Option<(Key, usize, usize, bool, usize, usize)> = None; // key, p, q, inv, k, r
    for inverted in [false, true] {
        let b: Vec<Letter> = if inverted {
            inverse(&rs[j])
        } else {
            rs[j].0.clone()
        };
        let self_plus = i == j && !inverted;
        for_each_run(a, &b, |p, q, r| {
            if self_plus && ((q + n - p) % n).is_multiple_of(period) {
                return;
            }
            let len = (r + 2 * eps).min(n);
            if len == 0 {
                return;
            }
            let k_lo = len.saturating_sub(eps + r);
            let (off, k) = min_residue(p, k_lo, eps.min(len), n);
            let key = Key {
                neg_len: -(len as isize),
                offset: off,
                inverted,
                partner_offset: if eps == 0 { q } else { 0 },
            };
            if best.as_ref().is_none_or(|b| key < b.0) {
                best = Some((key, p, q, inverted, k, r));
            }
        });
    }
    let (key, p, q, inverted, k, r) = best?;
    let len = (-key.neg_len) as usize;
    let r_used = r.min(len - k);
    let piece = Word(cyc(a, key.offset, len));
    let left = Word(piece[..k].to_vec());
    let right = Word(piece[k + r_used..].to_vec());
    Some(PieceReport {
        kind: PieceKind::Eps,
        rel: i,
        offset: key.offset,
        partner: j,
        partner_inverted: inverted,
        partner_offset: q,
        partner_piece: Word(cyc(a, p, r_used)),
        piece,
        y: left,
        z: right.inverse(),
    })
}

fn arcs_disjoint(a: usize, x: usize, b: usize, y: usize, n: usize) -> bool {
    if x == 0 || y == 0 {
        return x + y <= n;
    }
    x + y <= n && (b + n - a) % n >= x && (a + n - b) % n >= y
}

/// Longest ε′-piece of relator `i`: `R = U V U′ V′` with `U′ = Y U^{±1} Z`.
fn self_piece(rs: &[Word], i: usize, eps: usize) -> Option<PieceReport> {
    let a = &rs[i];
    let n = a.len();
    // key, p (start of M), r' (|M|), k, q (start of U′ = M^{±1}), inverted
    let mut best: Option<(Key, usize, usize, usize, usize, bool)> = None;
    for inverted in [false, true] {
        let b: Vec<Letter> = if inverted { inverse(a) } else { a.0.clone() };
        for_each_run(a, &b, |p, qb, r| {
            let r = r.min(n / 2);
            let mut consider = |rp: usize| {
                // U′ occupies an arc of length rp; find its start in `a`
                let qs = if inverted { (2 * n - qb - rp) % n } else { qb };
                if !inverted && (qs + n - p).is_multiple_of(n) {
                    return;
                }
                for k in (0..=eps).rev() {
                    for kp in (0..=eps).rev() {
                        let ulen = rp + k + kp;
                        if ulen == 0 || ulen > n {
                            continue;
                        }
                        let us = (p + n - k % n) % n;
                        if !arcs_disjoint(us, ulen, qs, rp, n) {
                            continue;
                        }
                        let key = Key {
                            neg_len: -(ulen as isize),
                            offset: us,
                            inverted,
                            partner_offset: if eps == 0 { qs } else { 0 },
                        };
                        if best.as_ref().is_none_or(|b| key < b.0) {
                            best = Some((key, p, rp, k, qs, inverted));
                        }
                    }
                }
            };
            if eps == 0 {
                let bound = if inverted {
                    let d = (n - qb + n - p) % n;
                    let d = if d == 0 { n } else { d };
                    d / 2
                } else {
                    let d = (qb + n - p) % n;
                    d.min(n - d)
                };
                consider(r.min(bound));
            } else {
                for rp in 0..=r {
                    consider(rp);
                }
            }
        });
    }
    let (key, p, rp, k, qs, inverted) = best?;
    let len = (-key.neg_len) as usize;
    let piece = Word(cyc(a, key.offset, len));
    let m = Word(cyc(a, p, rp));
    let left = Word(piece[..k].to_vec());
    let right = Word(piece[k + rp..].to_vec());
    // U⁻¹ = right⁻¹ M⁻¹ left⁻¹, so M⁻¹ = right · U⁻¹ · left
    let (y, z, partner_piece) = if inverted {
        (right.inverse(), left, m.inverse())
    } else {
        (left, right.inverse(), m)
    };
    Some(PieceReport {
        kind: PieceKind::EpsPrime,
        rel: i,
        offset: key.offset,
        partner: i,
        partner_inverted: inverted,
        partner_offset: qs,
        piece,
        partner_piece,
        y,
        z,
    })
}

/// Leftmost-longest pieces per relator pair, ordered by (relator, partner).
///
/// `Eps`: one report per ordered pair `(i, j)` with the piece located in
/// relator `i`. `EpsPrime`: one report per relator. Empty pieces are omitted.
/// For `eps = 0` the partner position is the leftmost one; for `eps > 0` the
/// partner data is a witness (one valid choice among several).
pub fn find_pieces(rs: &RelatorSystem, eps: usize, kind: PieceKind) -> Vec<PieceReport> {
    let rels = rs.relators();
    let mut out = Vec::new();
    match kind {
        PieceKind::Eps => {
            for i in 0..rels.len() {
                for j in 0..rels.len() {
                    out.extend(pair_piece(rels, i, j, eps));
                }
            }
        }
        PieceKind::EpsPrime => {
            for i in 0..rels.len() {
                out.extend(self_piece(rels, i, eps));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    C,
    CPrime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TooShort {
        rel: usize,
        len: usize,
        rho: usize,
    },
    NotQuasiGeodesic {
        rel: usize,
        offset: usize,
        len: usize,
        reduced: usize,
    },
    LongPiece {
        piece: PieceReport,
        bound: Q,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooShort { rel, len, rho } => {
                write!(f, "relator {rel}: length {len} < rho {rho}")
            }
            Violation::NotQuasiGeodesic {
                rel,
                offset,
                len,
                reduced,
            } => write!(
                f,
                "relator {rel}: subword at {offset} of length {len} reduces to {reduced}"
            ),
            Violation::LongPiece { piece, bound } => write!(
                f,
                "relator {}: {:?} piece at {} of length {} not below {}",
                piece.rel,
                piece.kind,
                piece.offset,
                piece.len(),
                bound
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

/// First subword of the cyclic word violating `‖s‖ ≤ λ|s|_free + c`.
pub fn quasi_geodesic_violation(w: &[Letter], lambda: Q, c: Q) -> Option<(usize, usize, usize)> {
    let n = w.len();
    let ok = |len: usize, red: usize| {
        Q::from_integer(len as i64) <= lambda * Q::from_integer(red as i64) + c
    };
    if is_cyclically_reduced(w) {
        // every cyclic subword is already reduced
        return (1..=n).find(|&len| !ok(len, len)).map(|len| (0, len, len));
    }
    for start in 0..n {
        let mut stack: Vec<Letter> = Vec::new();
        for len in 1..=n {
            let l = w[(start + len - 1) % n];
            if stack.last() == Some(&crate::word::inv(l)) {
                stack.pop();
            } else {
                stack.push(l);
            }
            if !ok(len, stack.len()) {
                return Some((start, len, stack.len()));
            }
        }
    }
    None
}

pub fn check_condition(rs: &RelatorSystem, variant: Condition) -> ConditionReport {
    let p = &rs.params;
    let mut violations = Vec::new();
    for (i, r) in rs.relators().iter().enumerate() {
        if r.len() < p.rho {
            violations.push(Violation::TooShort {
                rel: i,
                len: r.len(),
                rho: p.rho,
            });
        }
        if let Some((offset, len, reduced)) = quasi_geodesic_violation(r, p.lambda, p.c) {
            violations.push(Violation::NotQuasiGeodesic {
                rel: i,
                offset,
                len,
                reduced,
            });
        }
    }
    let mut kinds = vec![PieceKind::Eps];
    if variant == Condition::CPrime {
        kinds.push(PieceKind::EpsPrime);
    }
    for kind in kinds {
        for piece in find_pieces(rs, p.eps, kind) {
            let bound = p.mu * Q::from_integer(rs.relators()[piece.rel].len() as i64);
            let longest = piece.len().max(piece.partner_piece.len());
            if Q::from_integer(longest as i64) >= bound {
                violations.push(Violation::LongPiece { piece, bound });
            }
        }
    }
    ConditionReport {
        pass: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorFamilySpec {
    pub z: Vec<Word>,
    pub u: Word,
    pub v: Word,
    pub m11: usize,
    pub k: usize,
}

impl RelatorFamilySpec {
    pub fn first_exponent(&self, i: usize) -> usize {
        self.m11 << (i - 1)
    }

    /// Exponents `m_{i,1}, …, m_{i,j_i}` for 1-based `i`.
    pub fn exponents(&self, i: usize) -> Vec<usize> {
        let m1 = self.first_exponent(i);
        (0..m1.saturating_sub(1)).map(|t| m1 + t).collect()
    }

    pub fn max_exponent(&self, i: usize) -> usize {
        self.exponents(i).last().copied().unwrap_or(0)
    }

    /// L: the longest of U, V and the z-words.
    pub fn max_piece_len(&self) -> usize {
        self.z
            .iter()
            .map(|w| w.len())
            .chain([self.u.len(), self.v.len()])
            .max()
            .unwrap_or(0)
    }

    pub fn relator(&self, i: usize) -> Word {
        let mut w = self.z[i - 1].0.clone();
        for (t, &e) in self.exponents(i).iter().enumerate() {
            if t > 0 {
                w.extend_from_slice(&self.v);
            }
            for _ in 0..e {
                w.extend_from_slice(&self.u);
            }
        }
        Word(w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    /// R_1, …, R_k as generated
    pub relators: Vec<Word>,
    pub system: RelatorSystem,
    pub violations: Vec<String>,
}

pub fn generate_relator_family(
    alphabet: &Alphabet,
    spec: &RelatorFamilySpec,
    params: &SCParams,
) -> Result<FamilyReport> {
    if spec.z.is_empty() || spec.k == 0 {
        return Ok(FamilyReport {
            relators: Vec::new(),
            system: RelatorSystem::new(alphabet.clone(), &[], params.clone())?,
            violations: Vec::new(),
        });
    }
    if spec.k > spec.z.len() {
        return Err(Error::InvalidParams(format!(
            "k = {} exceeds the {} supplied z-words",
            spec.k,
            spec.z.len()
        )));
    }
    if spec.m11 < 2 {
        return Err(Error::InvalidParams("m11 must be at least 2".into()));
    }
    for w in spec.z.iter().chain([&spec.u, &spec.v]) {
        alphabet.check(w)?;
        if !w.is_freely_reduced() {
            return Err(Error::InvalidParams(format!(
                "`{}` is not freely reduced",
                alphabet.format(w)
            )));
        }
    }
    if spec.u.is_empty() {
        return Err(Error::TrivialWord);
    }
    let root = crate::word::primitive_element(&spec.u)?;
    for w in std::iter::once(&spec.v).chain(spec.z.iter().take(spec.k)) {
        if w.is_empty() || in_same_elementary_free(w, &spec.u)? {
            return Err(Error::ElementaryWitness {
                word: alphabet.format(w),
                root: alphabet.format(&root),
            });
        }
    }
    let mut relators = Vec::new();
    let mut violations = Vec::new();
    let big_l = spec.max_piece_len() as i64;
    for i in 1..=spec.k {
        let r = spec.relator(i);
        steps::rewrite(r.len() as u64);
        let len = r.len() as i64;
        let need = Q::from_integer(6 * big_l * (spec.max_exponent(i) as i64 + 1));
        if params.mu * Q::from_integer(len) < need {
            violations.push(format!(
                "R_{i}: mu*|R| = {} < 6L(m_bar+1) = {}",
                params.mu * Q::from_integer(len),
                need
            ));
        }
        if r.len() < params.rho {
            violations.push(format!("R_{i}: |R| = {} < rho = {}", r.len(), params.rho));
        }
        if !r.is_cyclically_reduced() {
            violations.push(format!("R_{i} is not cyclically reduced"));
        }
        relators.push(r);
    }
    let cyc: Vec<Word> = relators
        .iter()
        .map(|r| crate::word::cyclic_reduce(r))
        .collect();
    let system = RelatorSystem::new(alphabet.clone(), &cyc, params.clone())?;
    Ok(FamilyReport {
        relators,
        system,
        violations,
    })
}

/// Keeps relators with `‖R‖ ≤ bound(n)`; `None` means no bound.
pub fn truncate_family(
    rs: &RelatorSystem,
    n: usize,
    bound: impl Fn(usize) -> Option<usize>,
) -> RelatorSystem {
    let b = bound(n);
    let kept: Vec<Word> = rs
        .relators()
        .iter()
        .filter(|r| {
            steps::cmp(1);
            b.is_none_or(|b| r.len() <= b)
        })
        .cloned()
        .collect();
    RelatorSystem {
        alphabet: rs.alphabet.clone(),
        relators: kept,
        params: rs.params.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerQGConstants {
    pub lambda: BigRational,
    pub c: BigRational,
    pub alpha: u64,
}

pub fn power_qg_constants(
    w: &[Letter],
    delta: u64,
    alphabet_size: u64,
    cyclically_minimal: bool,
) -> Result<PowerQGConstants> {
    if w.is_empty() {
        return Err(Error::TrivialWord);
    }
    let alpha = 180 * delta;
    let len = w.len() as u64;
    if cyclically_minimal && len >= alpha {
        return Ok(PowerQGConstants {
            lambda: BigRational::from_integer(BigInt::from(4)),
            c: BigRational::from_integer(BigInt::from(2520 * delta)),
            alpha,
        });
    }
    let x = BigInt::from(alphabet_size);
    let xa = num_traits::pow(x, alpha as usize);
    let lambda = BigInt::from(4) * &xa * BigInt::from(len);
    let c = BigInt::from(5) * &xa * &xa * BigInt::from(len * len);
    Ok(PowerQGConstants {
        lambda: BigRational::from_integer(lambda),
        c: BigRational::from_integer(c),
        alpha,
    })
}

/// Compares two piece reports on the fields that are canonical for every ε.
pub fn same_piece(a: &PieceReport, b: &PieceReport, eps: usize) -> bool {
    let base = a.kind == b.kind
        && a.rel == b.rel
        && a.offset == b.offset
        && a.piece == b.piece
        && (a.kind == PieceKind::EpsPrime || a.partner == b.partner);
    if eps > 0 {
        return base;
    }
    base && a.partner_inverted == b.partner_inverted && a.partner_offset == b.partner_offset
}
