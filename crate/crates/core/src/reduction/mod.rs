//! Smoothing over cyclic words, the (λ,c,ε,η)-cyclic-reduction and the
//! quotient word problem, with replayable rewrite certificates.

pub mod patterns;

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::smallcancel::{RelatorSystem, SCParams, Q};
use crate::steps;
use crate::word::{
    cyclic_reduce, free_product, free_reduce, inv, inverse, is_cyclic_shift, rotate, Alphabet,
    CyclicWord, Letter, Word,
};

pub use patterns::{
    block_widths, detect_eta_arc_cyclic, detect_eta_arc_direct, ArcHit, DictionaryKind, Entry,
    spacing, Hit, Partition, PatternSets,
};

/// Default cap on the total letters of E₀.
pub const DEFAULT_E0_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionParams {
    pub sc: SCParams,
    pub eta: Q,
    /// hyperbolicity constant of the base; only free bases (δ = 0) are supported
    pub delta: usize,
}

impl ReductionParams {
    pub fn new(sc: SCParams, eta: Q) -> Result<Self> {
        if eta <= Q::zero() || eta >= Q::one() {
            return Err(Error::InvalidParams(format!("eta = {eta} outside (0,1)")));
        }
        let lhs = Q::from_integer(2) * eta - Q::new(3, 2);
        let rhs = Q::from_integer(3) * sc.lambda * (Q::one() - eta);
        if lhs <= rhs {
            return Err(Error::InvalidParams(format!(
                "2*eta - 3/2 = {lhs} must exceed 3*lambda*(1 - eta) = {rhs}"
            )));
        }
        Ok(ReductionParams { sc, eta, delta: 0 })
    }

    pub fn eta_prime(&self) -> Q {
        SCParams::eta_prime(self.eta)
    }

    /// Window of the local-geodesic test, `8δ + 1`.
    pub fn local(&self) -> usize {
        8 * self.delta + 1
    }

    /// Relators longer than this cannot carry an arc in a word of length
    /// `n`: `(λ(n + 2ε) + c) / d` with `d = 1 − 23μ` when positive (and
    /// below η), else `d = η`.
    pub fn truncation_bound(&self, n: usize) -> Q {
        let sc = &self.sc;
        let d = sc.eta_wp();
        let d = if d > Q::zero() && d < self.eta { d } else { self.eta };
        (sc.lambda * Q::from_integer((n + 2 * sc.eps) as i64) + sc.c) / d
    }
}

/// One rewrite. Positions index the current cyclic word read from its
/// current origin; after each splice the origin moves to the splice point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// free and cyclic reduction of the whole word (origin: start of the core)
    FreeReduce { before: usize, after: usize },
    /// the arc `[at, at+len)` is freely trivial and is removed
    Cancel { at: usize, len: usize },
    /// the arc `[at, at+‖removed‖)` is replaced by `inserted`;
    /// `removed · inserted⁻¹` is a conjugate of a cyclic shift of the relator
    Relator {
        at: usize,
        rel: usize,
        inverted: bool,
        block: usize,
        removed: Word,
        inserted: Word,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RewriteCertificate {
    pub input: Word,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate step {step} does not apply: {reason}")]
pub struct ReplayError {
    pub step: usize,
    pub reason: String,
}

fn splice_vec(v: &mut Vec<Letter>, at: usize, len: usize, new: &[Letter]) {
    if !v.is_empty() {
        *v = rotate(v, at % v.len());
    }
    v.splice(0..len, new.iter().copied());
}

impl RewriteCertificate {
    /// Re-applies every step from the input and returns the final word.
    pub fn replay(&self, rs: &RelatorSystem) -> std::result::Result<Word, ReplayError> {
        let mut v = self.input.0.clone();
        for (k, st) in self.steps.iter().enumerate() {
            let fail = |reason: String| ReplayError { step: k, reason };
            match st {
                Step::FreeReduce { before, after } => {
                    if v.len() != *before {
                        return Err(fail(format!("length {} != {before}", v.len())));
                    }
                    v = cyclic_reduce(&free_reduce(&v)).0;
                    if v.len() != *after {
                        return Err(fail(format!("reduced length {} != {after}", v.len())));
                    }
                }
                Step::Cancel { at, len } => {
                    if *len > v.len() {
                        return Err(fail("arc longer than word".into()));
                    }
                    let arc: Vec<Letter> = rotate(&v, at % v.len().max(1))[..*len].to_vec();
                    if !free_reduce(&arc).is_empty() {
                        return Err(fail("cancelled arc is not freely trivial".into()));
                    }
                    splice_vec(&mut v, *at, *len, &[]);
                }
                Step::Relator {
                    at,
                    rel,
                    inverted: _,
                    block: _,
                    removed,
                    inserted,
                } => {
                    if removed.len() > v.len() {
                        return Err(fail("arc longer than word".into()));
                    }
                    let arc: Vec<Letter> = rotate(&v, at % v.len())[..removed.len()].to_vec();
                    if arc != removed.0 {
                        return Err(fail("removed arc does not match".into()));
                    }
                    let r = rs
                        .relators()
                        .get(*rel)
                        .ok_or_else(|| fail(format!("no relator {rel}")))?;
                    let c = cyclic_reduce(&free_product(&[removed, &inverse(inserted)]));
                    if !(is_cyclic_shift(&c, r) || is_cyclic_shift(&c, &inverse(r))) {
                        return Err(fail("rewrite is not a relator application".into()));
                    }
                    splice_vec(&mut v, *at, removed.len(), inserted);
                }
            }
        }
        Ok(Word(v))
    }

    /// Line-oriented text form: one step per line.
    pub fn to_text(&self, al: &Alphabet) -> String {
        let mut s = format!("input {}\n", al.format(&self.input));
        for st in &self.steps {
            match st {
                Step::FreeReduce { before, after } => {
                    let _ = writeln!(s, "free-reduce {before} {after}");
                }
                Step::Cancel { at, len } => {
                    let _ = writeln!(s, "cancel {at} {len}");
                }
                Step::Relator {
                    at,
                    rel,
                    inverted,
                    block,
                    removed,
                    inserted,
                } => {
                    let _ = writeln!(
                        s,
                        "relator {at} R{rel}{} block {block} : {} -> {}",
                        if *inverted { "^-1" } else { "" },
                        al.format(removed),
                        al.format(inserted)
                    );
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub output: CyclicWord,
    pub certificate: RewriteCertificate,
    /// (old length, new length) of every relator replacement
    pub replacements: Vec<(usize, usize)>,
    /// largest new/old ratio over the replacements (0 when there were none)
    pub shortening_coefficient: Q,
    /// replacements refused because they would not shorten
    pub non_shortening: Vec<String>,
    /// iterations where neither the circle nor the point list shrank
    pub metric_violations: usize,
    pub checks: usize,
    pub dictionary: Option<DictionaryKind>,
}

/// Free cancellation across the point before position `p`.
fn cancel_at(sigma: &mut CyclicWord, p: usize, log: &mut Vec<Step>) -> usize {
    let n = sigma.len();
    if n < 2 {
        return 0;
    }
    let mut k = 0;
    while 2 * (k + 1) <= n {
        steps::cmp(1);
        let l = sigma.at((p + 2 * n - 1 - k) % n);
        let r = sigma.at((p + k) % n);
        if l == inv(r) {
            k += 1;
        } else {
            break;
        }
    }
    if k > 0 {
        let at = (p + 2 * n - k) % n;
        log.push(Step::Cancel { at, len: 2 * k });
        steps::rewrite(2 * k as u64);
        sigma.splice(at, 2 * k, &[], 0);
    }
    k
}

/// Free-base smoothing: cancels across each breakpoint until the cyclic word
/// is freely cyclically reduced (arcs between breakpoints must already be
/// freely reduced). Marks of surviving letters are kept.
pub fn smoothing(sigma: &CyclicWord, breakpoints: &[usize]) -> CyclicWord {
    let mut s = sigma.clone();
    let n = s.len();
    s.points = breakpoints.iter().map(|&p| p % n.max(1)).collect();
    s.points.sort_unstable();
    s.points.dedup();
    let mut log = Vec::new();
    while let Some(p) = s.points.pop() {
        cancel_at(&mut s, p, &mut log);
    }
    s.points.clear();
    s
}

/// Start and length of the arc carrying `tag`.
fn tagged_arc(sigma: &CyclicWord, tag: u32) -> Option<(usize, usize)> {
    let n = sigma.len();
    let count = (0..n).filter(|&i| sigma.mark(i) == tag).count();
    if count == 0 {
        return None;
    }
    if count == n {
        return Some((0, n));
    }
    let s = (0..n).find(|&i| sigma.mark(i) == tag && sigma.mark((i + n - 1) % n) != tag)?;
    Some((s, count))
}

/// Precomputed pattern sets per truncation level, shared across queries.
#[derive(Debug)]
pub struct ReductionEngine {
    pub rs: RelatorSystem,
    pub rp: ReductionParams,
    pub budget: u128,
    order: Vec<usize>,
    sets: Vec<OnceLock<std::result::Result<Arc<PatternSets>, Error>>>,
}

#[derive(Debug, Clone)]
pub struct WpAnswer {
    pub trivial: bool,
    pub report: ReductionReport,
}

impl ReductionEngine {
    pub fn new(rs: RelatorSystem, rp: ReductionParams) -> Self {
        Self::with_budget(rs, rp, DEFAULT_E0_BUDGET)
    }

    pub fn with_budget(rs: RelatorSystem, rp: ReductionParams, budget: u128) -> Self {
        let order = patterns::length_order(&rs);
        let sets = (0..=order.len()).map(|_| OnceLock::new()).collect();
        ReductionEngine {
            rs,
            rp,
            budget,
            order,
            sets,
        }
    }

    fn admitted_count(&self, n: usize) -> usize {
        let bound = self.rp.truncation_bound(n);
        self.order
            .iter()
            .take_while(|&&i| Q::from_integer(self.rs.relators()[i].len() as i64) <= bound)
            .count()
    }

    /// `_nR` as a relator system.
    pub fn admitted_system(&self, n: usize) -> RelatorSystem {
        let k = self.admitted_count(n);
        let mut idx: Vec<usize> = self.order[..k].to_vec();
        idx.sort_unstable();
        let rels: Vec<Word> = idx.iter().map(|&i| self.rs.relators()[i].clone()).collect();
        RelatorSystem::new(self.rs.alphabet.clone(), &rels, self.rs.params.clone())
            .expect("subsystem of a valid system")
    }

    /// Pattern sets for inputs of length `n`. Falls back to the core
    /// dictionary when E₀ exceeds the budget.
    pub fn pattern_sets(&self, n: usize) -> Result<Arc<PatternSets>> {
        let k = self.admitted_count(n);
        self.sets[k]
            .get_or_init(|| {
                let admitted = self.order[..k].to_vec();
                let full = PatternSets::from_admitted(
                    &self.rs,
                    n,
                    admitted.clone(),
                    &self.rp,
                    self.budget,
                    DictionaryKind::Full,
                );
                match full {
                    Err(Error::Budget(_)) => PatternSets::from_admitted(
                        &self.rs,
                        n,
                        admitted,
                        &self.rp,
                        self.budget,
                        DictionaryKind::Cores,
                    ),
                    other => other,
                }
                .map(Arc::new)
            })
            .clone()
    }

    /// The (λ,c,ε,η)-cyclic-reduction of `w`.
    pub fn reduce(&self, w: &[Letter]) -> Result<ReductionReport> {
        let mut log = Vec::new();
        let core = cyclic_reduce(&free_reduce(w));
        log.push(Step::FreeReduce {
            before: w.len(),
            after: core.len(),
        });
        let mut sigma = CyclicWord::new(&core);
        let mut report = ReductionReport {
            output: CyclicWord::default(),
            certificate: RewriteCertificate::default(),
            replacements: Vec::new(),
            shortening_coefficient: Q::zero(),
            non_shortening: Vec::new(),
            metric_violations: 0,
            checks: 0,
            dictionary: None,
        };
        let ps = if core.is_empty() || self.admitted_count(w.len()) == 0 {
            None
        } else {
            Some(self.pattern_sets(w.len())?)
        };
        if let Some(ps) = ps.as_deref().filter(|p| !p.entries.is_empty()) {
            report.dictionary = Some(ps.kind);
            self.main_loop(&mut sigma, ps, &mut log, &mut report);
        }
        report.output = sigma;
        report.certificate = RewriteCertificate {
            input: Word(w.to_vec()),
            steps: log,
        };
        Ok(report)
    }

    fn main_loop(
        &self,
        sigma: &mut CyclicWord,
        ps: &PatternSets,
        log: &mut Vec<Step>,
        report: &mut ReductionReport,
    ) {
        let lt = ps.spacing;
        let h = ps.half_width;
        let m = sigma.len();
        sigma.points = if m >= 2 * lt {
            (0..m).step_by(lt).collect()
        } else {
            vec![0, m / 2]
        };
        sigma.points.dedup();
        let mut tag: u32 = 0;
        while let Some(&a) = sigma.points.first() {
            let m = sigma.len();
            if m == 0 {
                break;
            }
            report.checks += 1;
            let before = (m, sigma.points.len());
            let (b1, hit) = if m < 2 * h {
                let b1 = (a + m / 2) % m;
                let text = sigma.arc(b1, 2 * m - 1);
                (b1, ps.find_in_doubled(&text, m))
            } else {
                let b1 = (a + m - h) % m;
                let text = sigma.arc(b1, 2 * h);
                (b1, ps.find(&text))
            };
            let Some(hit) = hit else {
                sigma.points.remove(0);
                continue;
            };
            let e = &ps.entries[hit.entry];
            if e.replacement.len() >= hit.len {
                report.non_shortening.push(format!(
                    "R{} block {}: {} -> {}",
                    e.rel,
                    e.block,
                    hit.len,
                    e.replacement.len()
                ));
                sigma.points.remove(0);
                continue;
            }
            tag += 1;
            let start = (b1 + hit.start) % m;
            log.push(Step::Relator {
                at: start,
                rel: e.rel,
                inverted: e.inverted,
                block: e.block,
                removed: e.text.clone(),
                inserted: e.replacement.clone(),
            });
            steps::rewrite((hit.len + e.replacement.len()) as u64);
            sigma.splice(start, hit.len, &e.replacement, tag);
            report.replacements.push((hit.len, e.replacement.len()));
            let ratio = Q::new(e.replacement.len() as i64, hit.len as i64);
            if ratio > report.shortening_coefficient {
                report.shortening_coefficient = ratio;
            }
            // smoothing at the two ends of the new arc
            if !sigma.is_empty() {
                let right = e.replacement.len() % sigma.len();
                cancel_at(sigma, right, log);
            }
            if !sigma.is_empty() {
                let left = tagged_arc(sigma, tag).map_or(0, |(s, _)| s);
                cancel_at(sigma, left, log);
            }
            // new special points along the surviving arc, L̃ apart
            let n2 = sigma.len();
            if n2 > 0 {
                match tagged_arc(sigma, tag) {
                    Some((s, len)) => {
                        let mut d = 0;
                        while d < len {
                            sigma.points.push((s + d) % n2);
                            d += lt;
                        }
                        sigma.points.push((s + len) % n2);
                    }
                    None => sigma.points.push(0),
                }
                sigma.points.sort_unstable();
                sigma.points.dedup();
            }
            if !(sigma.len() < before.0 || sigma.points.len() < before.1) {
                report.metric_violations += 1;
            }
        }
        sigma.points.clear();
    }

    /// `w = 1` in the quotient iff the reduction empties the circle.
    pub fn word_problem(&self, w: &[Letter]) -> Result<WpAnswer> {
        let report = self.reduce(w)?;
        Ok(WpAnswer {
            trivial: report.output.is_empty(),
            report,
        })
    }
}

pub fn build_pattern_sets(
    rs: &RelatorSystem,
    n: usize,
    rp: &ReductionParams,
) -> Result<PatternSets> {
    PatternSets::build(rs, n, rp, DEFAULT_E0_BUDGET)
}

pub fn find_eta_subword(w: &[Letter], ps: &PatternSets) -> Option<Hit> {
    ps.find(w)
}

pub fn cyclic_reduce_lceh(
    sigma: &CyclicWord,
    rs: &RelatorSystem,
    rp: &ReductionParams,
) -> Result<ReductionReport> {
    ReductionEngine::new(rs.clone(), rp.clone()).reduce(&sigma.to_word())
}

pub fn word_problem_quotient(
    w: &[Letter],
    rs: &RelatorSystem,
    rp: &ReductionParams,
) -> Result<WpAnswer> {
    ReductionEngine::new(rs.clone(), rp.clone()).word_problem(w)
}
