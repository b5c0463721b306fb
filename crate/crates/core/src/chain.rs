//! Graded chains G₀ ↪ H₁ ↠ G₁ ↪ H₂ ↠ …: per-level data, the cost counter Φ,
//! the index I(n), the ξ̄/ζ thresholds, the limit word problem and
//! G-conjugacy.
//!
//! Every level is either a plain quotient (H_i = G_{i−1}) or one cyclic HNN
//! extension by a new stable letter, followed by a quotient by one relator
//! family. Relator words are kept as descriptors and only spelled out when a
//! query is long enough to admit them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hnn::{conj_free, cyclically_t_reduce, hnn_conjugate, Conj, HnnSpec, StableLetter};
use crate::reduction::{ReductionEngine, ReductionParams, RewriteCertificate};
use crate::smallcancel::{RelatorSystem, SCParams, Q};
use crate::steps;
use crate::word::{
    cyclic_decompose, cyclic_reduce, free_reduce, gen_of, is_cyclic_shift, Alphabet, Letter, Word,
};

fn big_q(q: Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// `ξ̄ = ((1 − 23μ)ρ − c)/λ − 2ε`.
pub fn xi(lambda: Q, c: Q, eps: usize, mu: Q, rho: &BigUint) -> BigRational {
    let rho = BigRational::from_integer(BigInt::from(rho.clone()));
    let k = big_q(Q::one() - Q::from_integer(23) * mu);
    (k * rho - big_q(c)) / big_q(lambda) - BigRational::from_integer(BigInt::from(2 * eps))
}

/// `ζ = ((1 − 121λμ)ρ − 2c)/λ − 4ε`.
pub fn zeta(lambda: Q, c: Q, eps: usize, mu: Q, rho: &BigUint) -> BigRational {
    let rho = BigRational::from_integer(BigInt::from(rho.clone()));
    let k = big_q(Q::one() - Q::from_integer(121) * lambda * mu);
    (k * rho - big_q(Q::from_integer(2) * c)) / big_q(lambda)
        - BigRational::from_integer(BigInt::from(4 * eps))
}

/// Largest `i` with `Φ(i) ≤ n`, given the strictly increasing cumulative
/// costs `Φ(1), Φ(2), …` (Φ(0) = 0).
pub fn index_from_phi(phi: &[u64], n: u64) -> usize {
    phi.partition_point(|&p| p <= n)
}

/// Chain-wide constants. Every level uses the same λ, c, ε, μ and η; the
/// relator length floor ρ̄ grows geometrically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainParams {
    pub lambda: Q,
    pub c: Q,
    pub eps: usize,
    pub mu: Q,
    /// arc threshold of the reduction engine
    pub eta: Q,
    /// ρ̄ floor of level 1; level i uses `rho0 · growth^(i−1)`
    pub rho0: u64,
    pub growth: u32,
    /// lower bound on the first exponent of a family relator
    pub m_min: u64,
    /// recorded δ′_i of HNN levels; it sizes the H-conjugacy search
    pub delta_prime: usize,
    /// refuse levels with ξ̄(i) < Φ(i)
    pub enforce_xi: bool,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            lambda: Q::one(),
            c: Q::zero(),
            eps: 0,
            mu: Q::new(1, 40),
            eta: Q::new(23, 25),
            rho0: 1,
            growth: 4,
            m_min: 2,
            delta_prime: 0,
            enforce_xi: true,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        SCParams::new(self.lambda, self.c, self.eps, self.mu, 1)?;
        ReductionParams::new(SCParams::free(self.mu, 1), self.eta).map(|_| ())?;
        if self.growth == 0 {
            return Err(Error::InvalidParams("growth must be positive".into()));
        }
        if self.enforce_xi && Q::from_integer(23) * self.mu >= Q::one() {
            return Err(Error::InvalidParams(format!(
                "1 - 23*mu = {} must be positive for xi(i) >= Phi(i)",
                Q::one() - Q::from_integer(23) * self.mu
            )));
        }
        Ok(())
    }

    fn sc(&self, rho: usize) -> SCParams {
        SCParams {
            lambda: self.lambda,
            c: self.c,
            eps: self.eps,
            mu: self.mu,
            rho: rho.max(1),
        }
    }

    pub fn reduction_params(&self) -> ReductionParams {
        ReductionParams::new(self.sc(1), self.eta).expect("validated chain parameters")
    }

    fn xi(&self, rho: &BigUint) -> BigRational {
        xi(self.lambda, self.c, self.eps, self.mu, rho)
    }

    fn rho_floor(&self, i: usize) -> BigUint {
        BigUint::from(self.rho0) * BigUint::from(self.growth).pow((i - 1) as u32)
    }
}

/// Relators of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelRelator {
    /// `z u^m v u^(m+1) v … v u^(2m−2)`
    Family { z: Word, u: Word, v: Word, m: BigUint },
    Explicit(Vec<Word>),
}

/// `|z| + |u|·(m−1)(3m−2)/2 + |v|·(m−2)`.
pub fn family_len(z: usize, u: usize, v: usize, m: &BigUint) -> BigUint {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if *m < two {
        return BigUint::from(z);
    }
    let s = (m - &one) * (m * 3u32 - &two) / &two;
    BigUint::from(z) + s * u + (m - &two) * v
}

/// Spells out the family relator with first exponent `m`.
pub fn family_word(z: &[Letter], u: &[Letter], v: &[Letter], m: usize) -> Word {
    let mut w = z.to_vec();
    for e in m..=(2 * m).saturating_sub(2) {
        if e > m {
            w.extend_from_slice(v);
        }
        for _ in 0..e {
            w.extend_from_slice(u);
        }
    }
    Word(w)
}

impl LevelRelator {
    pub fn min_len(&self) -> BigUint {
        match self {
            LevelRelator::Family { z, u, v, m } => family_len(z.len(), u.len(), v.len(), m),
            LevelRelator::Explicit(ws) => {
                BigUint::from(ws.iter().map(|w| w.len()).min().unwrap_or(0))
            }
        }
    }

    pub fn max_len(&self) -> BigUint {
        match self {
            LevelRelator::Family { .. } => self.min_len(),
            LevelRelator::Explicit(ws) => {
                BigUint::from(ws.iter().map(|w| w.len()).max().unwrap_or(0))
            }
        }
    }

    /// The relator words; fails when a family relator is too long to hold.
    pub fn words(&self) -> Result<Vec<Word>> {
        match self {
            LevelRelator::Family { z, u, v, m } => {
                let len = self.min_len().to_usize().filter(|&l| l <= 1 << 34);
                let m = m.to_usize();
                match (len, m) {
                    (Some(_), Some(m)) => Ok(vec![family_word(z, u, v, m)]),
                    _ => Err(Error::Budget(format!(
                        "relator of length {} is too long to spell out",
                        self.min_len()
                    ))),
                }
            }
            LevelRelator::Explicit(ws) => Ok(ws.clone()),
        }
    }
}

/// What a level source hands the chain: optional HNN data and the relator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSeed {
    /// new stable letter, already pushed into the alphabet, with
    /// `t⁻¹ u t = v` in the convention of [`StableLetter`]
    pub stable: Option<StableLetter>,
    pub relator: SeedRelator,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedRelator {
    /// first exponent chosen by the chain
    Family { z: Word, u: Word, v: Word },
    Explicit(Vec<Word>),
}

/// Deterministic producer of level seeds. May push new generator names
/// into the alphabet it is handed. `None` ends the chain.
pub trait LevelSource: Send + fmt::Debug {
    fn next_seed(&mut self, i: usize, alphabet: &mut Alphabet) -> Result<Option<LevelSeed>>;
}

/// Plain quotient levels `z u^m v … u^(2m−2)` with the same z, u, v at
/// every level and m at least doubling.
#[derive(Debug, Clone)]
pub struct FamilySource {
    pub z: Word,
    pub u: Word,
    pub v: Word,
}

impl LevelSource for FamilySource {
    fn next_seed(&mut self, i: usize, _alphabet: &mut Alphabet) -> Result<Option<LevelSeed>> {
        steps::cmp((self.z.len() + self.u.len() + self.v.len()) as u64);
        Ok(Some(LevelSeed {
            stable: None,
            relator: SeedRelator::Family {
                z: self.z.clone(),
                u: self.u.clone(),
                v: self.v.clone(),
            },
            label: format!("family level {i}"),
        }))
    }
}

/// Optional `(name, u, v)` with `t⁻¹ u t = v`, then relator texts.
pub type ExplicitLevel = (Option<(String, String, String)>, Vec<String>);

/// A fixed list of levels.
#[derive(Debug, Clone)]
pub struct ExplicitSource {
    /// per level: optional `(name, u, v)` with `t⁻¹ u t = v`, then relator
    /// texts; words are parsed once the stable letter exists
    pub levels: Vec<ExplicitLevel>,
}

impl LevelSource for ExplicitSource {
    fn next_seed(&mut self, i: usize, alphabet: &mut Alphabet) -> Result<Option<LevelSeed>> {
        let Some((hnn, rels)) = self.levels.get(i - 1) else {
            return Ok(None);
        };
        let stable = match hnn {
            Some((name, u, v)) => {
                let u = alphabet.parse(u)?;
                let v = alphabet.parse(v)?;
                let t = alphabet.push(name)?;
                Some(StableLetter { t, u, v })
            }
            None => None,
        };
        let words = rels
            .iter()
            .map(|r| alphabet.parse(r))
            .collect::<Result<Vec<_>>>()?;
        // a table lookup
        steps::cmp(1);
        Ok(Some(LevelSeed {
            stable,
            relator: SeedRelator::Explicit(words),
            label: format!("explicit level {i}"),
        }))
    }
}

/// The i-th level data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelData {
    pub index: usize,
    /// generators of H_i (base, then stable letters of levels ≤ i)
    pub alphabet: Alphabet,
    pub stable: Option<StableLetter>,
    pub relator: LevelRelator,
    pub lambda: Q,
    pub c: Q,
    pub eps: usize,
    pub mu: Q,
    pub delta_prev: usize,
    pub delta_prime: usize,
    /// configured floor `rho0 · growth^(i−1)`
    pub rho_floor: BigUint,
    /// shortest relator length of the level, at least the floor
    pub rho_bar: BigUint,
    pub xi_bar: BigRational,
    /// steps spent generating this level
    pub phi: u64,
    /// Φ(i)
    pub phi_total: u64,
    pub label: String,
}

impl LevelData {
    /// Recomputes ξ̄ and ρ̄ and compares them with the stored values.
    pub fn verify(&self) -> Result<()> {
        let xi_now = xi(self.lambda, self.c, self.eps, self.mu, &self.rho_bar);
        if xi_now != self.xi_bar {
            return Err(Error::Chain(format!(
                "level {}: stored xi {} but recomputed {}",
                self.index, self.xi_bar, xi_now
            )));
        }
        if self.relator.min_len() != self.rho_bar || self.rho_bar < self.rho_floor {
            return Err(Error::Chain(format!(
                "level {}: rho_bar {} does not match relators (floor {})",
                self.index, self.rho_bar, self.rho_floor
            )));
        }
        Ok(())
    }

    pub fn zeta(&self) -> BigRational {
        zeta(self.lambda, self.c, self.eps, self.mu, &self.rho_bar)
    }

    /// Presentation of H_i as text: generators, stable relation, and this
    /// level's relator descriptor.
    pub fn describe(&self) -> String {
        let al = &self.alphabet;
        let mut s = format!("level {} ({})\n  generators: {}\n", self.index, self.label, al.names().join(" "));
        if let Some(st) = &self.stable {
            s += &format!(
                "  hnn {}: {}^-1 ({}) {} = {}\n",
                al.names()[st.t],
                al.names()[st.t],
                al.format(&st.u),
                al.names()[st.t],
                al.format(&st.v)
            );
        }
        match &self.relator {
            LevelRelator::Family { z, u, v, m } => {
                s += &format!(
                    "  relator: family z = {}, u = {}, v = {}, m = {}, length {}\n",
                    al.format(z),
                    al.format(u),
                    al.format(v),
                    m,
                    self.rho_bar
                );
            }
            LevelRelator::Explicit(ws) => {
                for w in ws {
                    s += &format!("  relator: {}\n", al.format(w));
                }
            }
        }
        s += &format!(
            "  xi_bar = {}, phi = {}, Phi = {}\n",
            self.xi_bar, self.phi, self.phi_total
        );
        s
    }
}

#[derive(Debug)]
struct GenState {
    source: Box<dyn LevelSource>,
    alphabet: Alphabet,
    ended: bool,
    m_prev: BigUint,
}

/// A graded chain with lazily generated, cached levels.
pub struct GroupChain {
    pub base: Alphabet,
    pub params: ChainParams,
    levels: RwLock<Vec<Arc<LevelData>>>,
    gen: Mutex<GenState>,
    engines: Mutex<HashMap<(usize, usize, usize), Arc<ReductionEngine>>>,
}

impl fmt::Debug for GroupChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupChain")
            .field("base", &self.base)
            .field("params", &self.params)
            .field("levels", &self.levels.read().map(|l| l.len()).unwrap_or(0))
            .finish()
    }
}

fn lock_err<T>(_: T) -> Error {
    Error::Chain("poisoned chain lock".into())
}

/// Smallest m ≥ `lo` with `pred(m)`, for a monotone predicate. One step
/// per probe.
fn least_m(lo: BigUint, pred: impl Fn(&BigUint) -> bool) -> BigUint {
    steps::cmp(1);
    if pred(&lo) {
        return lo;
    }
    let mut bad = lo.clone();
    let mut step = BigUint::one();
    let mut good = loop {
        steps::cmp(1);
        let cand = &lo + &step;
        if pred(&cand) {
            break cand;
        }
        bad = cand;
        step <<= 1;
    };
    while &good - &bad > BigUint::one() {
        steps::cmp(1);
        let mid = (&good + &bad) >> 1;
        if pred(&mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

impl GroupChain {
    pub fn new(base: Alphabet, params: ChainParams, source: Box<dyn LevelSource>) -> Result<Self> {
        params.validate()?;
        Ok(GroupChain {
            gen: Mutex::new(GenState {
                source,
                alphabet: base.clone(),
                ended: false,
                m_prev: BigUint::zero(),
            }),
            base,
            params,
            levels: RwLock::new(Vec::new()),
            engines: Mutex::new(HashMap::new()),
        })
    }

    /// Levels generated so far.
    pub fn generated(&self) -> usize {
        self.levels.read().map(|l| l.len()).unwrap_or(0)
    }

    fn cached(&self, i: usize) -> Option<Arc<LevelData>> {
        self.levels.read().ok().and_then(|l| l.get(i - 1).cloned())
    }

    fn last_phi(&self) -> u64 {
        self.levels
            .read()
            .ok()
            .and_then(|l| l.last().map(|d| d.phi_total))
            .unwrap_or(0)
    }

    /// Generates one more level; `Ok(false)` when the chain has ended.
    fn extend(&self) -> Result<bool> {
        let mut g = self.gen.lock().map_err(lock_err)?;
        if g.ended {
            return Ok(false);
        }
        let i = self.generated() + 1;
        let phi_before = self.last_phi();
        let p = &self.params;
        let GenState {
            source,
            alphabet,
            ended,
            m_prev,
        } = &mut *g;
        let start = steps::snapshot().total();
        let (made, cost) = steps::measure(|| -> Result<Option<(LevelSeed, LevelRelator)>> {
            let Some(seed) = source.next_seed(i, alphabet)? else {
                return Ok(None);
            };
            if let Some(st) = &seed.stable {
                steps::cmp((st.u.len() + st.v.len()) as u64);
                if st.u.len() != st.v.len() {
                    return Err(Error::Chain(format!(
                        "level {i}: associated words of unequal length {} and {}",
                        st.u.len(),
                        st.v.len()
                    )));
                }
            }
            let floor = p.rho_floor(i);
            let relator = match &seed.relator {
                SeedRelator::Family { z, u, v } => {
                    let (lz, lu, lv) = (z.len(), u.len(), v.len());
                    // pieces of the family stay below 4m·max(|u|,|v|) + |z|
                    let piece_ok = |m: &BigUint| {
                        let piece = BigRational::from_integer(BigInt::from(
                            m * 4u32 * lu.max(lv) + lz,
                        ));
                        piece < big_q(p.mu) * BigRational::from_integer(BigInt::from(family_len(lz, lu, lv, m)))
                    };
                    let lo = (m_prev.clone() * 2u32)
                        .max(BigUint::from(p.m_min.max(2)));
                    // the Φ target includes a margin for the search itself
                    let spent = steps::snapshot().total() - start;
                    let target = phi_before + spent + 64 + 4 * lo.bits();
                    let m = least_m(lo, |m| {
                        let len = family_len(lz, lu, lv, m);
                        piece_ok(m)
                            && len >= floor
                            && (!p.enforce_xi
                                || p.xi(&len) >= BigRational::from_integer(BigInt::from(target)))
                    });
                    *m_prev = m.clone();
                    LevelRelator::Family {
                        z: z.clone(),
                        u: u.clone(),
                        v: v.clone(),
                        m,
                    }
                }
                SeedRelator::Explicit(ws) => {
                    for w in ws {
                        if w.is_empty() || !w.is_cyclically_reduced() {
                            return Err(Error::NotCyclicallyReduced(alphabet.format(w)));
                        }
                    }
                    LevelRelator::Explicit(ws.clone())
                }
            };
            Ok(Some((seed, relator)))
        });
        let Some((seed, relator)) = made? else {
            *ended = true;
            return Ok(false);
        };
        let delta_prime = if seed.stable.is_some() { p.delta_prime } else { 0 };
        let phi = cost.total().max(1);
        let phi_total = phi_before + phi;
        let rho_floor = p.rho_floor(i);
        let rho_bar = relator.min_len();
        if rho_bar < rho_floor {
            return Err(Error::Chain(format!(
                "level {i}: rho_i = {rho_bar} below the floor {rho_floor}"
            )));
        }
        let xi_bar = p.xi(&rho_bar);
        if p.enforce_xi && xi_bar < BigRational::from_integer(BigInt::from(phi_total)) {
            return Err(Error::Chain(format!(
                "level {i}: xi_bar(i) = {xi_bar} < Phi(i) = {phi_total}"
            )));
        }
        let data = LevelData {
            index: i,
            alphabet: alphabet.clone(),
            stable: seed.stable,
            relator,
            lambda: p.lambda,
            c: p.c,
            eps: p.eps,
            mu: p.mu,
            delta_prev: 0,
            delta_prime,
            rho_floor,
            rho_bar,
            xi_bar,
            phi,
            phi_total,
            label: seed.label,
        };
        self.levels.write().map_err(lock_err)?.push(Arc::new(data));
        Ok(true)
    }

    /// Level `i ≥ 1`, generating up to it; `None` past the end of a
    /// finite chain.
    pub fn level(&self, i: usize) -> Result<Option<Arc<LevelData>>> {
        if i == 0 {
            return Err(Error::InvalidParams("levels are numbered from 1".into()));
        }
        loop {
            if let Some(d) = self.cached(i) {
                return Ok(Some(d));
            }
            if !self.extend()? {
                return Ok(None);
            }
        }
    }

    /// Φ(i); `None` beyond the last level.
    pub fn phi(&self, i: usize) -> Result<Option<u64>> {
        if i == 0 {
            return Ok(Some(0));
        }
        Ok(self.level(i)?.map(|d| d.phi_total))
    }

    /// `I(n)`: the i with Φ(i) ≤ n < Φ(i+1).
    pub fn index_i(&self, n: u64) -> Result<usize> {
        while self.last_phi() <= n {
            if !self.extend()? {
                break;
            }
        }
        let levels = self.levels.read().map_err(lock_err)?;
        let phis: Vec<u64> = levels.iter().map(|d| d.phi_total).collect();
        Ok(index_from_phi(&phis, n))
    }

    /// Alphabet of H_i (the base for i = 0).
    pub fn alphabet_at(&self, i: usize) -> Result<Alphabet> {
        if i == 0 {
            return Ok(self.base.clone());
        }
        self.level(i)?
            .map(|d| d.alphabet.clone())
            .ok_or_else(|| Error::Chain(format!("chain has no level {i}")))
    }

    /// Alphabet of the highest generated level.
    pub fn current_alphabet(&self) -> Alphabet {
        self.levels
            .read()
            .ok()
            .and_then(|l| l.last().map(|d| d.alphabet.clone()))
            .unwrap_or_else(|| self.base.clone())
    }

    /// Parses `text`, generating up to `max_new` further levels while it
    /// names stable letters not yet introduced.
    pub fn parse_word_extending(&self, text: &str, max_new: usize) -> Result<Word> {
        let mut left = max_new;
        loop {
            match self.current_alphabet().parse(text) {
                Err(Error::UnknownGenerator(g)) if left > 0 => {
                    left -= 1;
                    if !self.extend()? {
                        return Err(Error::UnknownGenerator(g));
                    }
                }
                other => return other,
            }
        }
    }

    /// Level introducing generator `g` (0 for base generators).
    pub fn level_of_gen(&self, g: usize) -> Result<usize> {
        if g < self.base.len() {
            return Ok(0);
        }
        let levels = self.levels.read().map_err(lock_err)?;
        levels
            .iter()
            .find(|d| d.stable.as_ref().is_some_and(|s| s.t == g))
            .map(|d| d.index)
            .ok_or(Error::LetterOutOfRange(g as u32))
    }

    /// Highest level whose stable letter occurs in `w`.
    pub fn word_level(&self, w: &[Letter]) -> Result<usize> {
        let mut top = 0;
        let mut seen = std::collections::BTreeSet::new();
        for &l in w {
            let g = gen_of(l);
            if g >= self.base.len() && seen.insert(g) {
                top = top.max(self.level_of_gen(g)?);
            }
        }
        Ok(top)
    }

    /// Word-problem solver of G_i for inputs of length up to `n`: relators
    /// of levels ≤ i are admitted when no longer than the truncation bound.
    pub fn solver(&self, i: usize, n: usize) -> Result<LevelSolver> {
        let rp = self.params.reduction_params();
        let bound = rp.truncation_bound(n).floor().to_integer().max(0) as u64;
        let bound = BigUint::from(bound);
        let mut letters = Vec::new();
        let mut admitted = Vec::new();
        let mut count = 0;
        for j in 1..=i {
            let d = self
                .level(j)?
                .ok_or_else(|| Error::Chain(format!("chain has no level {j}")))?;
            if let Some(s) = &d.stable {
                letters.push(s.clone());
            }
            let k = match &d.relator {
                LevelRelator::Family { .. } => usize::from(d.relator.min_len() <= bound),
                LevelRelator::Explicit(ws) => ws
                    .iter()
                    .filter(|w| BigUint::from(w.len()) <= bound)
                    .count(),
            };
            if k > 0 {
                count += k;
                admitted.push(d);
            }
        }
        let alphabet = self.alphabet_at(i)?;
        let hnn = if letters.is_empty() {
            None
        } else {
            Some(HnnSpec::new(alphabet.clone(), letters)?)
        };
        let engine = match admitted.last() {
            None => None,
            Some(top) => {
                let key = (top.index, count, alphabet.len());
                let mut cache = self.engines.lock().map_err(lock_err)?;
                if let Some(e) = cache.get(&key) {
                    Some(e.clone())
                } else {
                    let mut rels = Vec::new();
                    for d in &admitted {
                        rels.extend(
                            d.relator
                                .words()?
                                .into_iter()
                                .filter(|w| BigUint::from(w.len()) <= bound),
                        );
                    }
                    let min = rels.iter().map(|w| w.len()).min().unwrap_or(1);
                    let rs = RelatorSystem::new(alphabet.clone(), &rels, self.params.sc(min))?;
                    let e = Arc::new(ReductionEngine::new(rs, rp));
                    cache.insert(key, e.clone());
                    Some(e)
                }
            }
        };
        Ok(LevelSolver {
            level: i,
            alphabet,
            hnn,
            engine,
        })
    }

    /// Decides `w = 1` in the limit group from the level data: level
    /// `i₁ = max{i ≤ I(‖w‖) : ξ̄(i) ≤ ‖w‖}`, raised to the highest level
    /// whose stable letter occurs in `w`.
    pub fn limit_word_problem(&self, w: &[Letter]) -> Result<LimitAnswer> {
        let n = w.len();
        if free_reduce(w).is_empty() {
            return Ok(LimitAnswer {
                trivial: true,
                level: 0,
                i0: 0,
                certificate: LevelCertificate {
                    level: 0,
                    input: Word(w.to_vec()),
                    stages: Vec::new(),
                },
            });
        }
        let i0 = self.index_i(n as u64)?;
        let nq = BigRational::from_integer(BigInt::from(n));
        let mut i1 = 0;
        for i in (1..=i0).rev() {
            let d = self.level(i)?.expect("level below I(n) exists");
            if d.xi_bar <= nq {
                i1 = i;
                break;
            }
        }
        let level = i1.max(self.word_level(w)?);
        let solver = self.solver(level, n)?;
        let (trivial, certificate) = solver.decide(w)?;
        Ok(LimitAnswer {
            trivial,
            level,
            i0,
            certificate,
        })
    }

    /// Decides `w = 1` by testing it in `G_Υ(‖w‖)`.
    pub fn limit_word_problem_supradius(&self, ups: &SupradiusFn, w: &[Letter]) -> Result<bool> {
        let n = w.len();
        let level = ups.eval(self, n)?.max(self.word_level(w)?);
        let level = self.clamp_level(level)?;
        Ok(self.solver(level, n)?.decide(w)?.0)
    }

    fn clamp_level(&self, i: usize) -> Result<usize> {
        if i == 0 || self.level(i)?.is_some() {
            return Ok(i);
        }
        Ok(self.generated())
    }

    /// `max{i : ξ̄(i) ≤ n}`, generating levels until ξ̄ exceeds n.
    pub fn honest_supradius(&self, n: usize) -> Result<usize> {
        let nq = BigRational::from_integer(BigInt::from(n));
        let mut best = 0;
        let mut i = 1;
        while let Some(d) = self.level(i)? {
            if d.xi_bar <= nq {
                best = i;
            } else {
                break;
            }
            i += 1;
        }
        Ok(best)
    }

    /// Tri-state G-conjugacy test with verified witnesses.
    pub fn g_conjugacy(&self, x: &[Letter], y: &[Letter], budget: &ConjBudget) -> Result<GConj> {
        let (cx, x) = cyclic_decompose(x);
        let (cy, y) = cyclic_decompose(y);
        Ok(match self.g_conjugacy_reduced(x, y, budget)? {
            // x = cx·x′·cx⁻¹ and y = cy·y′·cy⁻¹
            GConj::Yes { conjugator, level } => GConj::Yes {
                conjugator: free_reduce(&[cx.0, conjugator.0, cy.inverse().0].concat()),
                level,
            },
            other => other,
        })
    }

    fn g_conjugacy_reduced(&self, x: Word, y: Word, budget: &ConjBudget) -> Result<GConj> {
        if let Some(t) = conj_free(&x, &y) {
            return Ok(GConj::Yes {
                conjugator: t,
                level: 0,
            });
        }
        if x.is_empty() || y.is_empty() {
            let other = if x.is_empty() { &y } else { &x };
            let a = self.limit_word_problem(other)?;
            return Ok(if a.trivial {
                GConj::Yes {
                    conjugator: Word::empty(),
                    level: a.level,
                }
            } else {
                GConj::No
            });
        }
        let n = x.len() + y.len();
        let top = self.index_i(n as u64)?.max(self.word_level(&x)?).max(self.word_level(&y)?);
        let nq = BigRational::from_integer(BigInt::from(n));
        let rp = self.params.reduction_params();
        let mut unknown: Option<String> = None;
        let mut candidates = 0usize;
        let mut has_stable = false;
        for i in 1..=top {
            let d = match self.level(i)? {
                Some(d) => d,
                None => break,
            };
            has_stable |= d.stable.is_some();
            if d.zeta() > nq {
                continue;
            }
            if has_stable {
                let spec = self.solver(i, 0)?.hnn.expect("stable letters present");
                let radius = 2 * (8 * d.delta_prime + 1) + n;
                match hnn_conjugate(&x, &y, &spec, Some(radius)) {
                    Conj::Yes(_) => return Ok(GConj::No),
                    Conj::Unknown => {
                        unknown.get_or_insert_with(|| format!("H_{i} conjugacy search exhausted"));
                    }
                    Conj::No => {}
                }
            }
            // conjugators T₁·W·T₂ with W a relator subword of length ≤ λμ‖R‖
            let wmax = (self.params.lambda * self.params.mu
                * Q::from_integer(d.rho_bar.to_i64().unwrap_or(i64::MAX / 1024)))
            .floor()
            .to_integer()
            .max(0) as usize;
            let longest = n + 2 * (4 * self.params.eps + wmax);
            let bound = rp.truncation_bound(longest).floor().to_integer().max(0) as u64;
            if d.relator.min_len() > BigUint::from(bound) {
                continue;
            }
            let solver = self.solver(i, longest)?;
            let ts = short_words(d.alphabet.len(), 2 * self.params.eps);
            for r in d.relator.words()? {
                for r in [r.clone(), r.inverse()] {
                    let m = r.len();
                    for start in 0..m {
                        for len in 0..=wmax.min(m) {
                            let w: Vec<Letter> = (0..len).map(|k| r[(start + k) % m]).collect();
                            for t1 in &ts {
                                for t2 in &ts {
                                    candidates += 1;
                                    if candidates > budget.max_candidates {
                                        return Ok(GConj::Unknown(
                                            "conjugator candidate budget exhausted".into(),
                                        ));
                                    }
                                    let t = free_reduce(&[t1.as_slice(), &w, t2].concat());
                                    let check = free_reduce(
                                        &[t.inverse().0, x.0.clone(), t.0.clone(), y.inverse().0]
                                            .concat(),
                                    );
                                    if solver.decide(&check)?.0 {
                                        return Ok(GConj::Yes {
                                            conjugator: t,
                                            level: i,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(match unknown {
            Some(why) => GConj::Unknown(why),
            None => GConj::No,
        })
    }
}

/// All freely reduced words of length ≤ `n` over `gens` generators.
fn short_words(gens: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for l in 0..(2 * gens) as Letter {
                if w.last().is_some_and(|&p| p == l ^ 1) {
                    continue;
                }
                let mut v: Vec<Letter> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjBudget {
    pub max_candidates: usize,
}

impl Default for ConjBudget {
    fn default() -> Self {
        ConjBudget {
            max_candidates: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GConj {
    /// `T⁻¹ x T = y` in G_level
    Yes { conjugator: Word, level: usize },
    No,
    Unknown(String),
}

impl GConj {
    pub fn is_yes(&self) -> bool {
        matches!(self, GConj::Yes { .. })
    }
}

/// Υ: ℕ → ℕ, evaluated through its running maximum so that it is
/// non-decreasing.
pub struct SupradiusFn {
    f: Box<dyn Fn(&GroupChain, usize) -> Result<usize> + Send + Sync>,
    memo: Mutex<Vec<usize>>,
}

impl fmt::Debug for SupradiusFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SupradiusFn")
    }
}

impl SupradiusFn {
    pub fn new(f: impl Fn(&GroupChain, usize) -> Result<usize> + Send + Sync + 'static) -> Self {
        SupradiusFn {
            f: Box::new(f),
            memo: Mutex::new(Vec::new()),
        }
    }

    pub fn constant(i: usize) -> Self {
        SupradiusFn::new(move |_, _| Ok(i))
    }

    /// `Υ(n) = max{i : ξ̄(i) ≤ n}`.
    pub fn honest() -> Self {
        SupradiusFn::new(|chain, n| chain.honest_supradius(n))
    }

    pub fn eval(&self, chain: &GroupChain, n: usize) -> Result<usize> {
        let mut memo = self.memo.lock().map_err(lock_err)?;
        while memo.len() <= n {
            let k = memo.len();
            let v = (self.f)(chain, k)?;
            let prev = memo.last().copied().unwrap_or(0);
            memo.push(v.max(prev));
        }
        Ok(memo[n])
    }
}

/// One stage of a level certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    /// cyclic t-reduction (pinches and rotations) in the HNN tower
    Britton { input: Word, output: Word },
    Rewrite(RewriteCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCertificate {
    pub level: usize,
    pub input: Word,
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitAnswer {
    pub trivial: bool,
    /// level the solver ran at
    pub level: usize,
    /// I(‖w‖)
    pub i0: usize,
    pub certificate: LevelCertificate,
}

/// Word problem of one level: alternate cyclic t-reduction and the
/// reduction engine until neither changes the word.
#[derive(Debug, Clone)]
pub struct LevelSolver {
    pub level: usize,
    pub alphabet: Alphabet,
    pub hnn: Option<HnnSpec>,
    pub engine: Option<Arc<ReductionEngine>>,
}

impl LevelSolver {
    /// Reduces `w` to a cyclic normal form; returns it with the stages.
    pub fn reduce(&self, w: &[Letter]) -> Result<(Word, LevelCertificate)> {
        let mut stages = Vec::new();
        let mut cur = free_reduce(w);
        steps::cmp(w.len() as u64);
        // each productive round shortens the word, so this cap is never hit
        for _ in 0..=(2 * w.len() + 2) {
            let mut changed = false;
            if let Some(h) = &self.hnn {
                steps::cmp(cur.len() as u64);
                let out = cyclically_t_reduce(&cur, h).decomposition.to_word();
                if out.len() < cur.len() {
                    changed = true;
                }
                if out != cur {
                    stages.push(Stage::Britton {
                        input: cur.clone(),
                        output: out.clone(),
                    });
                }
                cur = out;
            } else {
                cur = cyclic_reduce(&cur);
            }
            if let Some(e) = &self.engine {
                let rep = e.reduce(&cur)?;
                let out = rep.output.to_word();
                if !rep.replacements.is_empty() {
                    changed = true;
                }
                if !rep.certificate.steps.is_empty() {
                    stages.push(Stage::Rewrite(rep.certificate));
                }
                cur = out;
            }
            if !changed {
                break;
            }
        }
        Ok((
            cur,
            LevelCertificate {
                level: self.level,
                input: Word(w.to_vec()),
                stages,
            },
        ))
    }

    pub fn decide(&self, w: &[Letter]) -> Result<(bool, LevelCertificate)> {
        let (out, cert) = self.reduce(w)?;
        Ok((out.is_empty(), cert))
    }

    /// Replays a certificate stage by stage; returns the final word.
    pub fn replay(&self, cert: &LevelCertificate) -> std::result::Result<Word, String> {
        let mut cur = free_reduce(&cert.input);
        for (k, st) in cert.stages.iter().enumerate() {
            match st {
                Stage::Britton { input, output } => {
                    if !is_cyclic_shift(&cyclic_reduce(input), &cyclic_reduce(&cur)) {
                        return Err(format!("stage {k}: input does not continue the previous stage"));
                    }
                    let h = self.hnn.as_ref().ok_or(format!("stage {k}: no HNN data"))?;
                    let again = cyclically_t_reduce(input, h).decomposition.to_word();
                    if &again != output {
                        return Err(format!("stage {k}: t-reduction does not reproduce"));
                    }
                    cur = output.clone();
                }
                Stage::Rewrite(rc) => {
                    if !is_cyclic_shift(&cyclic_reduce(&rc.input), &cyclic_reduce(&cur)) {
                        return Err(format!("stage {k}: input does not continue the previous stage"));
                    }
                    let e = self.engine.as_ref().ok_or(format!("stage {k}: no relators"))?;
                    cur = rc
                        .replay(&e.rs)
                        .map_err(|err| format!("stage {k}: {}", err.reason))?;
                }
            }
        }
        Ok(cyclic_reduce(&cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_m_finds_threshold() {
        let m = least_m(BigUint::from(3u32), |m| *m >= BigUint::from(1000u32));
        assert_eq!(m, BigUint::from(1000u32));
        let m = least_m(BigUint::from(3u32), |_| true);
        assert_eq!(m, BigUint::from(3u32));
    }

    #[test]
    fn family_len_matches_word() {
        for m in 2..12usize {
            let w = family_word(&[4], &[0], &[2], m);
            assert_eq!(BigUint::from(w.len()), family_len(1, 1, 1, &BigUint::from(m)));
        }
    }
}
