//! The group G_L of a language L ⊆ A*: the encodings Λ₀ and Λ, the HNN
//! tower over the free group on x₁ x₂ x₃ y₁ y₂ y₃ z₁ z₂, Λ-pair detection,
//! the conjugacy solver, and the two reductions between membership in L
//! and conjugacy in G_L.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex};

use crate::chain::{
    ChainParams, ConjBudget, GConj, GroupChain, LevelSeed, LevelSource, SeedRelator,
};
use crate::error::{Error, Result};
use crate::hnn::StableLetter;
use crate::smallcancel::Q;
use crate::steps;
use crate::word::{
    cyclic_reduce, free_root, gen_of, is_cyclic_shift, is_inverse, letter, rotate, Alphabet,
    Letter, Word,
};

pub const X1: usize = 0;
pub const X2: usize = 1;
pub const X3: usize = 2;
pub const Y1: usize = 3;
pub const Y2: usize = 4;
pub const Y3: usize = 5;
pub const Z1: usize = 6;
pub const Z2: usize = 7;

/// x₁ x₂ x₃ y₁ y₂ y₃ z₁ z₂, in generator order.
pub fn gl_base() -> Alphabet {
    Alphabet::new(&["x1", "x2", "x3", "y1", "y2", "y3", "z1", "z2"]).expect("fixed names")
}

/// A word over A as symbol indices.
pub type AWord = Vec<usize>;

pub enum Backend {
    Finite(BTreeSet<AWord>),
    Regex(regex::Regex),
    /// decider program: reads the word and a newline on stdin, exit status 0
    /// means member
    Cmd { program: String, args: Vec<String> },
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Finite(s) => write!(f, "Finite({} words)", s.len()),
            Backend::Regex(r) => write!(f, "Regex({})", r.as_str()),
            Backend::Cmd { program, args } => write!(f, "Cmd({program} {args:?})"),
        }
    }
}

/// A language over a finite alphabet with a membership backend.
#[derive(Debug)]
pub struct LanguageSpec {
    pub alphabet: Vec<String>,
    pub backend: Backend,
    /// enumeration of non-finite backends stops after this length
    pub max_enum_len: usize,
    /// the spec file text, kept so that a built chain can be persisted
    pub source: String,
    queries: Mutex<()>,
}

fn shortlex(a: &AWord, b: &AWord) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl LanguageSpec {
    pub fn new(alphabet: Vec<String>, backend: Backend) -> Result<Self> {
        let set: BTreeSet<&String> = alphabet.iter().collect();
        if alphabet.is_empty() || set.len() != alphabet.len() || alphabet.iter().any(|s| s.is_empty()) {
            return Err(Error::Language(format!("bad alphabet {alphabet:?}")));
        }
        if matches!(backend, Backend::Regex(_)) && alphabet.iter().any(|s| s.chars().count() != 1) {
            return Err(Error::Language(
                "regex backends need single-character symbols".into(),
            ));
        }
        Ok(LanguageSpec {
            alphabet,
            backend,
            max_enum_len: 16,
            source: String::new(),
            queries: Mutex::new(()),
        })
    }

    pub fn finite(alphabet: &[&str], words: &[&str]) -> Result<Self> {
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        let mut spec = LanguageSpec::new(alphabet, Backend::Finite(BTreeSet::new()))?;
        let mut set = BTreeSet::new();
        for w in words {
            set.insert(spec.parse_word(w)?);
        }
        spec.backend = Backend::Finite(set);
        spec.source = format!(
            "alphabet: {}\nwords: {}\n",
            spec.alphabet.join(" "),
            words
                .iter()
                .map(|w| if w.is_empty() { "-" } else { w })
                .collect::<Vec<_>>()
                .join(" ")
        );
        Ok(spec)
    }

    /// Parses a spec file: `alphabet: 0 1`, then `finite: path`,
    /// `words: w1 w2 …` (`-` is the empty word), `regex: pattern` or
    /// `cmd: program args`; optionally `max-length: n`.
    pub fn parse(text: &str, dir: Option<&Path>) -> Result<Self> {
        let mut alphabet = None;
        let mut backend_line = None;
        let mut max_len = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, val) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad language line `{line}`")))?;
            let val = val.trim();
            match key.trim() {
                "alphabet" => {
                    alphabet = Some(val.split_whitespace().map(String::from).collect::<Vec<_>>())
                }
                "max-length" => {
                    max_len = Some(
                        val.parse::<usize>()
                            .map_err(|e| Error::Parse(format!("max-length: {e}")))?,
                    )
                }
                k @ ("finite" | "words" | "regex" | "cmd") => {
                    if backend_line.is_some() {
                        return Err(Error::Parse("more than one backend".into()));
                    }
                    backend_line = Some((k.to_string(), val.to_string()));
                }
                k => return Err(Error::Parse(format!("unknown language key `{k}`"))),
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::Parse("missing `alphabet:`".into()))?;
        let (kind, val) = backend_line.ok_or_else(|| Error::Parse("missing backend".into()))?;
        let mut spec = LanguageSpec::new(alphabet, Backend::Finite(BTreeSet::new()))?;
        spec.backend = match kind.as_str() {
            "finite" | "words" => {
                let body = if kind == "finite" {
                    let path = match dir {
                        Some(d) => d.join(&val),
                        None => val.clone().into(),
                    };
                    std::fs::read_to_string(&path)
                        .map_err(|e| Error::Language(format!("{}: {e}", path.display())))?
                } else {
                    val.clone()
                };
                let mut set = BTreeSet::new();
                for w in body.split_whitespace() {
                    set.insert(spec.parse_word(if w == "-" { "" } else { w })?);
                }
                Backend::Finite(set)
            }
            "regex" => Backend::Regex(
                regex::Regex::new(&format!("^(?:{val})$"))
                    .map_err(|e| Error::Language(e.to_string()))?,
            ),
            _ => {
                let mut parts = val.split_whitespace().map(String::from);
                let program = parts
                    .next()
                    .ok_or_else(|| Error::Parse("cmd needs a program".into()))?;
                Backend::Cmd {
                    program,
                    args: parts.collect(),
                }
            }
        };
        if matches!(spec.backend, Backend::Regex(_))
            && spec.alphabet.iter().any(|s| s.chars().count() != 1)
        {
            return Err(Error::Language(
                "regex backends need single-character symbols".into(),
            ));
        }
        if let Some(m) = max_len {
            spec.max_enum_len = m;
        }
        spec.source = text.to_string();
        Ok(spec)
    }

    fn single_chars(&self) -> bool {
        self.alphabet.iter().all(|s| s.chars().count() == 1)
    }

    /// Reads a word: character by character when every symbol is one
    /// character, else whitespace-separated symbols.
    pub fn parse_word(&self, text: &str) -> Result<AWord> {
        let sym = |s: &str| {
            self.alphabet
                .iter()
                .position(|a| a == s)
                .ok_or_else(|| Error::Language(format!("symbol `{s}` not in the alphabet")))
        };
        if self.single_chars() {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| sym(&c.to_string()))
                .collect()
        } else {
            text.split_whitespace().map(sym).collect()
        }
    }

    pub fn format_word(&self, w: &[usize]) -> String {
        let sep = if self.single_chars() { "" } else { " " };
        w.iter()
            .map(|&k| self.alphabet[k].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Membership; queries are serialized per spec.
    pub fn member(&self, w: &[usize]) -> Result<bool> {
        let _guard = self
            .queries
            .lock()
            .map_err(|_| Error::Language("poisoned query lock".into()))?;
        steps::cmp(w.len() as u64 + 1);
        match &self.backend {
            Backend::Finite(s) => Ok(s.contains(w)),
            Backend::Regex(r) => Ok(r.is_match(&self.format_word(w))),
            Backend::Cmd { program, args } => {
                let mut child = Command::new(program)
                    .args(args)
                    .stdin(Stdio::piped())
                    .stdout(Stdio::null())
                    .stderr(Stdio::null())
                    .spawn()
                    .map_err(|e| Error::Language(format!("{program}: {e}")))?;
                if let Some(mut stdin) = child.stdin.take() {
                    // a decider may exit before reading its input
                    let _ = stdin.write_all(format!("{}\n", self.format_word(w)).as_bytes());
                }
                let status = child
                    .wait()
                    .map_err(|e| Error::Language(format!("{program}: {e}")))?;
                Ok(status.success())
            }
        }
    }

    /// Members in (length, lexicographic) order; non-finite backends stop
    /// after `max_enum_len`.
    pub fn enumerate(self: &Arc<Self>) -> Enumerator {
        Enumerator {
            lang: self.clone(),
            finite: match &self.backend {
                Backend::Finite(s) => {
                    let mut v: Vec<AWord> = s.iter().cloned().collect();
                    v.sort_by(shortlex);
                    Some(v)
                }
                _ => None,
            },
            pos: 0,
            next: Some(Vec::new()),
        }
    }
}

#[derive(Debug)]
pub struct Enumerator {
    lang: Arc<LanguageSpec>,
    finite: Option<Vec<AWord>>,
    pos: usize,
    /// next candidate of a decider-backed enumeration
    next: Option<AWord>,
}

impl Enumerator {
    pub fn next_member(&mut self) -> Result<Option<AWord>> {
        if let Some(list) = &self.finite {
            let out = list.get(self.pos).cloned();
            if let Some(w) = &out {
                steps::cmp(w.len() as u64 + 1);
                self.pos += 1;
            }
            return Ok(out);
        }
        let k = self.lang.alphabet.len();
        while let Some(cand) = self.next.take() {
            if cand.len() > self.lang.max_enum_len {
                return Ok(None);
            }
            // shortlex successor
            let mut succ = cand.clone();
            let mut i = succ.len();
            loop {
                steps::cmp(1);
                if i == 0 {
                    succ = vec![0; cand.len() + 1];
                    break;
                }
                i -= 1;
                if succ[i] + 1 < k {
                    succ[i] += 1;
                    break;
                }
                succ[i] = 0;
            }
            self.next = Some(succ);
            if self.lang.member(&cand)? {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }
}

/// Block width of Λ₀: `max(1, ⌈log₂|A|⌉)`.
pub fn block_width(alphabet_size: usize) -> usize {
    let mut w = 0;
    while (1usize << w) < alphabet_size {
        w += 1;
    }
    w.max(1)
}

/// Λ₀: each symbol becomes its index in binary, most significant bit
/// first, with 0 ↦ x₁ and 1 ↦ x₂.
pub fn lambda0_encode(alphabet_size: usize, w: &[usize]) -> Word {
    let width = block_width(alphabet_size);
    let mut out = Vec::with_capacity(w.len() * width);
    for &s in w {
        for b in (0..width).rev() {
            out.push(letter(if (s >> b) & 1 == 0 { X1 } else { X2 }, false));
        }
    }
    Word(out)
}

pub fn lambda0_decode(alphabet_size: usize, w: &[Letter]) -> Result<AWord> {
    let width = block_width(alphabet_size);
    let bad = || Error::NotInImage(format!("{w:?}"));
    if !w.len().is_multiple_of(width) {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(w.len() / width);
    for block in w.chunks(width) {
        let mut s = 0usize;
        for &l in block {
            let bit = match l {
                l if l == letter(X1, false) => 0,
                l if l == letter(X2, false) => 1,
                _ => return Err(bad()),
            };
            s = 2 * s + bit;
        }
        if s >= alphabet_size {
            return Err(bad());
        }
        out.push(s);
    }
    Ok(out)
}

/// ς: x_j ↦ y_j.
pub fn varsigma(w: &[Letter]) -> Word {
    Word(
        w.iter()
            .map(|&l| {
                let g = gen_of(l);
                debug_assert!(g <= X3);
                letter(g + 3, is_inverse(l))
            })
            .collect(),
    )
}

/// Λ(ω) = (Λ₀(ω)x₃, ς(Λ₀(ω))y₃).
pub fn lambda_encode(alphabet_size: usize, w: &[usize]) -> (Word, Word) {
    let a = lambda0_encode(alphabet_size, w);
    let mut u = a.0.clone();
    u.push(letter(X3, false));
    let mut v = varsigma(&a).0;
    v.push(letter(Y3, false));
    (Word(u), Word(v))
}

/// Level source of G_L: level i takes the i-th member ω of L, adds t_i
/// with `t_i⁻¹ v t_i = u` for (u, v) = Λ(ω), and the relator family
/// `t_i z₁^m z₂ z₁^(m+1) … z₁^(2m−2)`.
#[derive(Debug)]
pub struct GlSource {
    lang: Arc<LanguageSpec>,
    members: Enumerator,
    /// ω of each generated level
    pub omegas: Arc<Mutex<Vec<AWord>>>,
}

impl LevelSource for GlSource {
    fn next_seed(&mut self, i: usize, alphabet: &mut Alphabet) -> Result<Option<LevelSeed>> {
        let Some(omega) = self.members.next_member()? else {
            return Ok(None);
        };
        let (u, v) = lambda_encode(self.lang.alphabet.len(), &omega);
        steps::cmp((u.len() + v.len()) as u64);
        let t = alphabet.push(&format!("t{i}"))?;
        self.omegas
            .lock()
            .map_err(|_| Error::Chain("poisoned omega list".into()))?
            .push(omega.clone());
        Ok(Some(LevelSeed {
            stable: Some(StableLetter { t, u: v, v: u }),
            relator: SeedRelator::Family {
                z: Word(vec![letter(t, false)]),
                u: Word(vec![letter(Z1, false)]),
                v: Word(vec![letter(Z2, false)]),
            },
            label: format!("omega = \"{}\"", self.lang.format_word(&omega)),
        }))
    }
}

#[derive(Debug)]
pub struct GLChain {
    pub chain: GroupChain,
    pub lang: Arc<LanguageSpec>,
    omegas: Arc<Mutex<Vec<AWord>>>,
    pub budget: ConjBudget,
}

pub fn build_gl_chain(lang: LanguageSpec, params: ChainParams) -> Result<GLChain> {
    let lang = Arc::new(lang);
    let omegas = Arc::new(Mutex::new(Vec::new()));
    let source = GlSource {
        lang: lang.clone(),
        members: lang.enumerate(),
        omegas: omegas.clone(),
    };
    Ok(GLChain {
        chain: GroupChain::new(gl_base(), params, Box::new(source))?,
        lang,
        omegas,
        budget: ConjBudget::default(),
    })
}

impl GLChain {
    /// ω of generated levels, in level order.
    pub fn omegas(&self) -> Vec<AWord> {
        self.omegas.lock().map(|v| v.clone()).unwrap_or_default()
    }

    pub fn alphabet_size(&self) -> usize {
        self.lang.alphabet.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaVerdict {
    CyclicShift,
    /// `x ~ u^l`, `y ~ v^l` for (u, v) = Λ(omega) (`swapped` when x is the
    /// Y₀ side)
    LambdaPair { omega: AWord, exponent: i64, swapped: bool },
    NotAPair,
    Unknown(String),
}

impl LambdaVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, LambdaVerdict::CyclicShift | LambdaVerdict::LambdaPair { .. })
    }
}

/// What remains of the Λ-pair test once the words have been matched: at
/// most one membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaCandidate {
    CyclicShift,
    Query { omega: AWord, exponent: i64, swapped: bool },
    NotAPair,
}

fn side(w: &[Letter]) -> Option<bool> {
    let gens: BTreeSet<usize> = w.iter().map(|&l| gen_of(l)).collect();
    if gens.iter().all(|&g| g <= X3) {
        Some(true)
    } else if gens.iter().all(|&g| (Y1..=Y3).contains(&g)) {
        Some(false)
    } else {
        None
    }
}

/// Matches `(x, y)` against the shape `(u^l, v^l)` of a Λ-pair without
/// consulting L.
pub fn lambda_candidate(alphabet_size: usize, x: &[Letter], y: &[Letter]) -> LambdaCandidate {
    let x = cyclic_reduce(x);
    let y = cyclic_reduce(y);
    steps::cmp((x.len() + y.len()) as u64);
    if is_cyclic_shift(&x, &y) {
        return LambdaCandidate::CyclicShift;
    }
    if x.is_empty() || y.is_empty() {
        return LambdaCandidate::NotAPair;
    }
    let (xs, ys, swapped) = match (side(&x), side(&y)) {
        (Some(true), Some(false)) => (x, y, false),
        (Some(false), Some(true)) => (y, x, true),
        _ => return LambdaCandidate::NotAPair,
    };
    let Ok(root) = free_root(&xs) else {
        return LambdaCandidate::NotAPair;
    };
    let (mut p, mut l) = (root.root.0, root.exponent as i64);
    if p.iter().all(|&q| is_inverse(q)) {
        p = crate::word::inverse(&p);
        l = -l;
    } else if p.iter().any(|&q| is_inverse(q)) {
        return LambdaCandidate::NotAPair;
    }
    let x3 = letter(X3, false);
    let marks: Vec<usize> = (0..p.len()).filter(|&k| p[k] == x3).collect();
    if marks.len() != 1 {
        return LambdaCandidate::NotAPair;
    }
    let u = rotate(&p, (marks[0] + 1) % p.len());
    let alpha = &u[..u.len() - 1];
    let Ok(omega) = lambda0_decode(alphabet_size, alpha) else {
        return LambdaCandidate::NotAPair;
    };
    let mut v = varsigma(alpha).0;
    v.push(letter(Y3, false));
    if !is_cyclic_shift(&ys, &Word(v).pow(l)) {
        return LambdaCandidate::NotAPair;
    }
    LambdaCandidate::Query {
        omega,
        exponent: l,
        swapped,
    }
}

/// Λ-pair test; the second component counts membership queries (≤ 1).
pub fn is_lambda_pair(x: &[Letter], y: &[Letter], lang: &LanguageSpec) -> (LambdaVerdict, usize) {
    match lambda_candidate(lang.alphabet.len(), x, y) {
        LambdaCandidate::CyclicShift => (LambdaVerdict::CyclicShift, 0),
        LambdaCandidate::NotAPair => (LambdaVerdict::NotAPair, 0),
        LambdaCandidate::Query {
            omega,
            exponent,
            swapped,
        } => match lang.member(&omega) {
            Ok(true) => (
                LambdaVerdict::LambdaPair {
                    omega,
                    exponent,
                    swapped,
                },
                1,
            ),
            Ok(false) => (LambdaVerdict::NotAPair, 1),
            Err(e) => (LambdaVerdict::Unknown(e.to_string()), 1),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlVia {
    /// conjugate in G₀ or G-conjugate at some level
    GConjugate { conjugator: Word, level: usize },
    LambdaPair { omega: AWord, exponent: i64 },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlAnswer {
    pub conjugate: bool,
    pub via: GlVia,
    /// the reduced pair (x′, y′)
    pub reduced: (Word, Word),
    pub g: GConj,
    pub lambda: LambdaVerdict,
    pub membership_queries: usize,
    /// false when a "no" rests on an exhausted budget
    pub certain: bool,
}

/// Conjugacy in G_L: reduce both words at level I(‖x‖+‖y‖), then combine
/// G-conjugacy with the Λ-pair test. The two positive branches exclude each
/// other; seeing both is reported as an error.
pub fn gl_conjugacy(gl: &GLChain, x: &[Letter], y: &[Letter]) -> Result<GlAnswer> {
    let chain = &gl.chain;
    let n = x.len() + y.len();
    let i = chain
        .index_i(n as u64)?
        .max(chain.word_level(x)?)
        .max(chain.word_level(y)?);
    let solver = chain.solver(i, n)?;
    let xr = solver.reduce(x)?.0;
    let yr = solver.reduce(y)?.0;
    let (lambda, queries) = is_lambda_pair(&xr, &yr, &gl.lang);
    let g = chain.g_conjugacy(&xr, &yr, &gl.budget)?;
    if g.is_yes() && matches!(lambda, LambdaVerdict::LambdaPair { .. }) {
        return Err(Error::Chain(format!(
            "G-conjugacy and a non-shift Lambda-pair both hold for ({}, {})",
            solver.alphabet.format(&xr),
            solver.alphabet.format(&yr)
        )));
    }
    let via = match (&g, &lambda) {
        (GConj::Yes { conjugator, level }, _) => GlVia::GConjugate {
            conjugator: conjugator.clone(),
            level: *level,
        },
        (_, LambdaVerdict::CyclicShift) => GlVia::GConjugate {
            conjugator: crate::hnn::conj_free(&xr, &yr).unwrap_or_default(),
            level: 0,
        },
        (_, LambdaVerdict::LambdaPair {
            omega, exponent, ..
        }) => GlVia::LambdaPair {
            omega: omega.clone(),
            exponent: *exponent,
        },
        _ => GlVia::None,
    };
    let conjugate = via != GlVia::None;
    let certain = conjugate
        || (!matches!(g, GConj::Unknown(_)) && !matches!(lambda, LambdaVerdict::Unknown(_)));
    Ok(GlAnswer {
        conjugate,
        via,
        reduced: (xr, yr),
        g,
        lambda,
        membership_queries: queries,
        certain,
    })
}

/// Forward reduction: ω ∈ L iff Λ(ω) is a conjugate pair.
pub fn reduce_membership_to_conjugacy(alphabet_size: usize, w: &[usize]) -> (Word, Word) {
    lambda_encode(alphabet_size, w)
}

/// Backward reduction of a conjugacy query: the G-conjugacy bit and at
/// most one membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReduction {
    pub reduced: (Word, Word),
    pub g_conjugate: bool,
    pub cyclic_shift: bool,
    pub query: Option<AWord>,
}

impl MembershipReduction {
    /// The answer given the membership answer (ignored without a query).
    pub fn combine(&self, member: bool) -> bool {
        self.g_conjugate || self.cyclic_shift || (self.query.is_some() && member)
    }
}

pub fn reduce_conjugacy_to_membership(
    gl: &GLChain,
    x: &[Letter],
    y: &[Letter],
) -> Result<MembershipReduction> {
    let chain = &gl.chain;
    let n = x.len() + y.len();
    let i = chain
        .index_i(n as u64)?
        .max(chain.word_level(x)?)
        .max(chain.word_level(y)?);
    let solver = chain.solver(i, n)?;
    let xr = solver.reduce(x)?.0;
    let yr = solver.reduce(y)?.0;
    let cand = lambda_candidate(gl.alphabet_size(), &xr, &yr);
    let g = chain.g_conjugacy(&xr, &yr, &gl.budget)?;
    Ok(MembershipReduction {
        g_conjugate: g.is_yes(),
        cyclic_shift: cand == LambdaCandidate::CyclicShift,
        query: match cand {
            LambdaCandidate::Query { omega, .. } => Some(omega),
            _ => None,
        },
        reduced: (xr, yr),
    })
}

/// G-conjugacy of reduced words by a ladder search: a cyclic sequence of
/// relator cells, each with an arc on both words, joined by rungs that are
/// relator pieces. The search visits at most `max_states` states and
/// answers false past that.
pub fn gl_g_conjugacy_banded(gl: &GLChain, x: &[Letter], y: &[Letter]) -> Result<bool> {
    let x = cyclic_reduce(x);
    let y = cyclic_reduce(y);
    if is_cyclic_shift(&x, &y) {
        return Ok(true);
    }
    let chain = &gl.chain;
    let n = x.len() + y.len();
    let top = chain
        .index_i(n as u64)?
        .max(chain.word_level(&x)?)
        .max(chain.word_level(&y)?);
    let mu = chain.params.mu;
    let mut rels = Vec::new();
    for i in 1..=top {
        let Some(d) = chain.level(i)? else { break };
        // a cell needs arcs of total length ≥ (1 − 2μ)‖R‖ on the two words
        let len = d.relator.min_len();
        let need = (Q::from_integer(1) - Q::from_integer(2) * mu)
            * Q::from_integer(num_traits::ToPrimitive::to_i64(&len).unwrap_or(i64::MAX / 4));
        if need > Q::from_integer(n as i64) {
            continue;
        }
        for r in d.relator.words()? {
            rels.push(r.clone());
            rels.push(r.inverse());
        }
    }
    if rels.is_empty() || x.is_empty() || y.is_empty() {
        return Ok(false);
    }
    Ok(ladder_search(&x, &y, &rels, mu, 1_000_000))
}

fn ladder_search(x: &[Letter], y: &[Letter], rels: &[Word], mu: Q, max_states: usize) -> bool {
    let mut budget = max_states;
    // rungs: relator subwords shorter than μ‖R‖, plus the empty rung
    let mut rungs: BTreeSet<Vec<Letter>> = BTreeSet::new();
    rungs.insert(Vec::new());
    for r in rels {
        let lim = (mu * Q::from_integer(r.len() as i64)).ceil().to_integer() as usize;
        for s in 0..r.len() {
            for l in 1..lim.min(r.len()) {
                rungs.insert((0..l).map(|k| r[(s + k) % r.len()]).collect());
            }
        }
    }
    let rungs: Vec<Vec<Letter>> = rungs.into_iter().collect();
    for p0 in 0..x.len() {
        let xr = rotate(x, p0);
        for q0 in 0..y.len() {
            let yr = rotate(y, q0);
            for r0 in &rungs {
                if ladder_dfs(&xr, &yr, 0, 0, r0, r0, rels, &rungs, &mut budget, false) {
                    return true;
                }
                if budget == 0 {
                    return false;
                }
            }
        }
    }
    false
}

/// Cell boundary read from the upper-left corner: `r⁻¹ · a · r′ · b⁻¹`
/// with `a` on x, `b` on y.
#[allow(clippy::too_many_arguments)]
fn ladder_dfs(
    x: &[Letter],
    y: &[Letter],
    p: usize,
    q: usize,
    r: &[Letter],
    r0: &[Letter],
    rels: &[Word],
    rungs: &[Vec<Letter>],
    budget: &mut usize,
    used_cell: bool,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    if p == x.len() && q == y.len() {
        return used_cell && r == r0;
    }
    // a common letter under an empty rung
    if r.is_empty() && p < x.len() && q < y.len() && x[p] == y[q] && ladder_dfs(x, y, p + 1, q + 1, r, r0, rels, rungs, budget, used_cell) {
        return true;
    }
    let rinv = crate::word::inverse(r);
    for rel in rels {
        let m = rel.len();
        for s in 0..m {
            let cyc = |k: usize| rel[(s + k) % m];
            if (0..rinv.len()).any(|k| cyc(k) != rinv[k]) {
                continue;
            }
            let mut la = 0;
            while p + la < x.len() && rinv.len() + la < m && cyc(rinv.len() + la) == x[p + la] {
                la += 1;
                for r2 in rungs {
                    let off = rinv.len() + la;
                    if off + r2.len() > m {
                        continue;
                    }
                    if (0..r2.len()).any(|k| cyc(off + k) != r2[k]) {
                        continue;
                    }
                    let rest = m - off - r2.len();
                    if q + rest > y.len() {
                        continue;
                    }
                    // the remaining letters spell b⁻¹
                    if (0..rest).any(|k| cyc(off + r2.len() + k) ^ 1 != y[q + rest - 1 - k]) {
                        continue;
                    }
                    if ladder_dfs(x, y, p + la, q + rest, r2, r0, rels, rungs, budget, true) {
                        return true;
                    }
                }
            }
        }
    }
    false
}
