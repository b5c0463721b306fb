//! Text formats: presentations, chain specs and persisted G_L chains.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{ChainParams, ExplicitLevel, ExplicitSource, FamilySource, GroupChain};
use crate::error::{Error, Result};
use crate::glang::{build_gl_chain, Backend, GLChain, LanguageSpec};
use crate::smallcancel::{generate_relator_family, RelatorFamilySpec, SCParams, Q};
use crate::word::{Alphabet, Word};

/// `3`, `-2`, `1/40` or a decimal like `0.92`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || fp.len() > 12 || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip: i64 = if ip.is_empty() || ip == "-" { 0 } else { ip.parse().map_err(|_| bad())? };
        let d = 10i64.pow(fp.len() as u32);
        let f: i64 = fp.parse().map_err(|_| bad())?;
        let n = ip.abs() * d + f;
        return Ok(Q::new(if neg { -n } else { n }, d));
    }
    Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
}

/// A finite presentation. Either a relator list
///
/// ```text
/// gens: a b
/// a b a^2 b a^3
/// ```
///
/// (`generators:` and `relator: <word>` are accepted too) or a relator
/// family, `family Z=z1,z2 U=a V=b m11=4 k=2`, whose words may use `_` for
/// spaces. Either form may carry a `params` line of [`parse_sc_params`]
/// keys.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
    pub family: Option<RelatorFamilySpec>,
    pub params: Option<SCParams>,
}

pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut names: Option<Vec<String>> = None;
    let mut rels = Vec::new();
    let mut family = None;
    let mut params = None;
    for line in content_lines(text) {
        if let Some(rest) = line.strip_prefix("family ") {
            // commas separate the Z list here, not pairs
            family = Some(key_values(&rest.replace(',', ";"))?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("params ") {
            params = Some(parse_sc_params(rest, SCParams::free(Q::new(1, 6), 1))?);
            continue;
        }
        match line.split_once(':') {
            Some((k, val)) if matches!(k.trim(), "gens" | "generators") => {
                names = Some(val.split_whitespace().map(String::from).collect());
            }
            Some((k, val)) if k.trim() == "relator" => rels.push(val.trim().to_string()),
            Some((k, _)) => return Err(Error::Parse(format!("unknown presentation key `{}`", k.trim()))),
            None => rels.push(line.to_string()),
        }
    }
    let Some(kv) = family else {
        let names = names.ok_or_else(|| Error::Parse("missing `gens:`".into()))?;
        let alphabet = Alphabet::new(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
        let relators = rels
            .iter()
            .map(|r| alphabet.parse(r))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Presentation { alphabet, relators, family: None, params });
    };
    if !rels.is_empty() {
        return Err(Error::Parse("a family file takes no relator lines".into()));
    }
    let get = |k: &str| {
        kv.iter()
            .find(|(a, _)| a.eq_ignore_ascii_case(k))
            .map(|(_, v)| v.replace('_', " "))
            .ok_or_else(|| Error::Parse(format!("family needs `{k}=`")))
    };
    let (z, u, v) = (get("Z")?, get("U")?, get("V")?);
    let z: Vec<&str> = z.split(';').map(str::trim).collect();
    let names = names.unwrap_or_else(|| {
        // generators in order of first use: U, V, then Z
        let mut out: Vec<String> = Vec::new();
        for w in [u.as_str(), v.as_str()].into_iter().chain(z.iter().copied()) {
            for tok in w.split_whitespace() {
                let g = tok.split('^').next().unwrap_or(tok).to_string();
                if !out.contains(&g) {
                    out.push(g);
                }
            }
        }
        out
    });
    let alphabet = Alphabet::new(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
    let num = |k: &str| -> Result<usize> {
        get(k)?
            .parse()
            .map_err(|_| Error::Parse(format!("family `{k}` needs a positive integer")))
    };
    let spec = RelatorFamilySpec {
        z: z.iter().map(|w| alphabet.parse(w)).collect::<Result<_>>()?,
        u: alphabet.parse(&u)?,
        v: alphabet.parse(&v)?,
        m11: num("m11")?,
        k: num("k")?,
    };
    let p = params.clone().unwrap_or_else(|| SCParams::free(Q::new(1, 6), 1));
    let relators = generate_relator_family(&alphabet, &spec, &p)?.relators;
    Ok(Presentation { alphabet, relators, family: Some(spec), params })
}

/// Small-cancellation parameters from `lambda c eps mu rho` pairs (the Greek
/// `λ ε μ ρ` also work), on top of `base`.
pub fn parse_sc_params(text: &str, base: SCParams) -> Result<SCParams> {
    let mut p = base;
    for (k, v) in key_values(text)? {
        let int = || -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Parse(format!("`{k}` needs a non-negative integer, got `{v}`")))
        };
        match k.as_str() {
            "lambda" | "λ" => p.lambda = parse_rational(&v)?,
            "c" => p.c = parse_rational(&v)?,
            "eps" | "ε" => p.eps = int()?,
            "mu" | "μ" => p.mu = parse_rational(&v)?,
            "rho" | "ρ" => p.rho = int()?,
            _ => return Err(Error::Parse(format!("unknown parameter `{k}`"))),
        }
    }
    SCParams::new(p.lambda, p.c, p.eps, p.mu, p.rho)
}

/// `key = value` pairs separated by commas or whitespace.
fn key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let norm = text.replace(',', " ");
    let toks: Vec<&str> = norm.split_whitespace().collect();
    let mut i = 0;
    while i < toks.len() {
        // accept `k=v`, `k = v`, `k= v` and `k =v`
        let t = toks[i];
        let (k, v) = if let Some((k, v)) = t.split_once('=') {
            if v.is_empty() {
                i += 1;
                (k, *toks.get(i).ok_or_else(|| Error::Parse(format!("`{k}` has no value")))?)
            } else {
                (k, v)
            }
        } else {
            let next = toks.get(i + 1).copied().unwrap_or("");
            if next == "=" {
                i += 2;
                (t, *toks.get(i).ok_or_else(|| Error::Parse(format!("`{t}` has no value")))?)
            } else if let Some(v) = next.strip_prefix('=') {
                i += 1;
                (t, v)
            } else {
                return Err(Error::Parse(format!("expected `key = value` at `{t}`")));
            }
        };
        out.push((k.to_string(), v.to_string()));
        i += 1;
    }
    Ok(out)
}

/// Schedule keys: lambda, c, eps, mu, eta, rho0, growth, m_min,
/// delta_prime, enforce_xi. `rho_i = A * G^i` sets rho0 and growth at once.
pub fn parse_schedule(text: &str, base: ChainParams) -> Result<ChainParams> {
    let mut p = base;
    let text = text.replace(" *", "*").replace("* ", "*");
    let int = |k: &str, v: &str| -> Result<u64> {
        v.parse()
            .map_err(|_| Error::Parse(format!("`{k}` needs a non-negative integer, got `{v}`")))
    };
    for (k, v) in key_values(&text)? {
        match k.as_str() {
            "rho_i" => {
                // `rho_i = A * G^i`, with A an integer or `rho0`
                let bad = || Error::Parse(format!("rho_i: expected `A * G^i`, got `{v}`"));
                let (a, g) = v.split_once('*').unwrap_or(("1", &v));
                let g = int(&k, g.strip_suffix("^i").ok_or_else(bad)?)?;
                let a = if a == "rho0" { p.rho0 } else { int(&k, a)? };
                p.growth = u32::try_from(g).map_err(|_| bad())?;
                p.rho0 = a.checked_mul(g).ok_or_else(bad)?;
            }
            "lambda" => p.lambda = parse_rational(&v)?,
            "c" => p.c = parse_rational(&v)?,
            "mu" => p.mu = parse_rational(&v)?,
            "eta" => p.eta = parse_rational(&v)?,
            "eps" => p.eps = int(&k, &v)? as usize,
            "rho0" => p.rho0 = int(&k, &v)?,
            "growth" => {
                p.growth = u32::try_from(int(&k, &v)?)
                    .map_err(|_| Error::Parse("growth too large".into()))?
            }
            "m_min" => p.m_min = int(&k, &v)?,
            "delta_prime" => p.delta_prime = int(&k, &v)? as usize,
            "enforce_xi" => {
                p.enforce_xi = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("enforce_xi: `{v}`")))?
            }
            _ => return Err(Error::Parse(format!("unknown schedule key `{k}`"))),
        }
    }
    p.validate()?;
    Ok(p)
}

pub fn format_schedule(p: &ChainParams) -> String {
    format!(
        "lambda={} c={} eps={} mu={} eta={} rho0={} growth={} m_min={} delta_prime={} enforce_xi={}",
        p.lambda, p.c, p.eps, p.mu, p.eta, p.rho0, p.growth, p.m_min, p.delta_prime, p.enforce_xi
    )
}

#[derive(Debug, Clone)]
pub enum LevelsSpec {
    /// G_L over the language spec at this path
    Gl(PathBuf),
    Family { z: String, u: String, v: String },
    /// per level: optional `(t, u, v)` and relator texts
    Explicit(Vec<ExplicitLevel>),
}

/// A chain spec file:
///
/// ```text
/// base: a b c d
/// schedule: mu = 1/40, rho0 = 1, growth = 4
/// levels: auto-family z=c u=a v=b
/// ```
///
/// `levels:` may also be `auto-gl <language spec path>` or `explicit`,
/// followed by blocks opened with a `level` line and holding an optional
/// `hnn t1: u = <word>, v = <word>` and any number of `relator: <word>` or
/// comma-separated `relators: <word>, <word>` lines.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub base: Alphabet,
    pub params: ChainParams,
    pub levels: LevelsSpec,
}

pub fn parse_chain_spec(text: &str, dir: Option<&Path>) -> Result<ChainSpec> {
    let mut base = None;
    let mut params = ChainParams::default();
    let mut levels = None;
    let mut explicit: Option<Vec<ExplicitLevel>> = None;
    for line in content_lines(text) {
        if line == "level" {
            explicit
                .as_mut()
                .ok_or_else(|| Error::Parse("`level` outside `levels: explicit`".into()))?
                .push((None, Vec::new()));
            continue;
        }
        if let Some(rest) = line.strip_prefix("hnn ") {
            let cur = explicit
                .as_mut()
                .and_then(|l| l.last_mut())
                .ok_or_else(|| Error::Parse("`hnn` outside a `level` block".into()))?;
            let bad = || Error::Parse(format!("bad hnn line `{line}`"));
            let (t, rel) = rest.split_once(':').ok_or_else(bad)?;
            let (u, v) = rel.split_once(',').ok_or_else(bad)?;
            let side = |s: &str, k: &str| -> Result<String> {
                Ok(s.trim()
                    .strip_prefix(k)
                    .and_then(|s| s.trim().strip_prefix('='))
                    .ok_or_else(bad)?
                    .trim()
                    .to_string())
            };
            if cur.0.is_some() {
                return Err(Error::Parse("two hnn lines in one level".into()));
            }
            cur.0 = Some((t.trim().to_string(), side(u, "u")?, side(v, "v")?));
            continue;
        }
        let (key, val) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad chain line `{line}`")))?;
        let val = val.trim();
        match key.trim() {
            "base" => {
                let names: Vec<&str> = val.split_whitespace().collect();
                base = Some(Alphabet::new(&names)?);
            }
            "schedule" => params = parse_schedule(val, params)?,
            "levels" => {
                let (kind, rest) = val.split_once(char::is_whitespace).unwrap_or((val, ""));
                levels = Some(match kind {
                    "auto-gl" => {
                        let p = PathBuf::from(rest.trim());
                        LevelsSpec::Gl(match dir {
                            Some(d) if p.is_relative() => d.join(p),
                            _ => p,
                        })
                    }
                    "auto-family" => {
                        let kv = key_values(rest)?;
                        let get = |k: &str| {
                            kv.iter()
                                .find(|(a, _)| a == k)
                                .map(|(_, v)| v.replace('_', " "))
                                .ok_or_else(|| Error::Parse(format!("auto-family needs `{k}=`")))
                        };
                        LevelsSpec::Family {
                            z: get("z")?,
                            u: get("u")?,
                            v: get("v")?,
                        }
                    }
                    "explicit" => {
                        explicit = Some(Vec::new());
                        LevelsSpec::Explicit(Vec::new())
                    }
                    k => return Err(Error::Parse(format!("unknown levels kind `{k}`"))),
                });
            }
            k @ ("relator" | "relators") => {
                let cur = &mut explicit
                    .as_mut()
                    .and_then(|l| l.last_mut())
                    .ok_or_else(|| Error::Parse(format!("`{k}` outside a `level` block")))?
                    .1;
                if k == "relator" {
                    cur.push(val.to_string());
                } else {
                    cur.extend(val.split(',').map(|w| w.trim().to_string()).filter(|w| !w.is_empty()));
                }
            }
            k => return Err(Error::Parse(format!("unknown chain key `{k}`"))),
        }
    }
    let mut levels = levels.ok_or_else(|| Error::Parse("missing `levels:`".into()))?;
    if let (LevelsSpec::Explicit(l), Some(e)) = (&mut levels, explicit) {
        *l = e;
    }
    let base = match (&levels, base) {
        (_, Some(b)) => b,
        (LevelsSpec::Gl(_), None) => crate::glang::gl_base(),
        _ => return Err(Error::Parse("missing `base:`".into())),
    };
    Ok(ChainSpec {
        base,
        params,
        levels,
    })
}

/// A chain ready for queries.
#[derive(Debug)]
pub enum LoadedChain {
    Plain(GroupChain),
    Gl(GLChain),
}

impl LoadedChain {
    pub fn chain(&self) -> &GroupChain {
        match self {
            LoadedChain::Plain(c) => c,
            LoadedChain::Gl(g) => &g.chain,
        }
    }
}

fn load_language(path: &Path) -> Result<LanguageSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    LanguageSpec::parse(&text, path.parent())
}

impl ChainSpec {
    pub fn build(self) -> Result<LoadedChain> {
        match self.levels {
            LevelsSpec::Gl(path) => {
                if self.base != crate::glang::gl_base() {
                    return Err(Error::Parse("auto-gl chains use the fixed G_L base".into()));
                }
                Ok(LoadedChain::Gl(build_gl_chain(load_language(&path)?, self.params)?))
            }
            LevelsSpec::Family { z, u, v } => {
                let src = FamilySource {
                    z: self.base.parse(&z)?,
                    u: self.base.parse(&u)?,
                    v: self.base.parse(&v)?,
                };
                Ok(LoadedChain::Plain(GroupChain::new(self.base, self.params, Box::new(src))?))
            }
            LevelsSpec::Explicit(levels) => Ok(LoadedChain::Plain(GroupChain::new(
                self.base,
                self.params,
                Box::new(ExplicitSource { levels }),
            )?)),
        }
    }
}

/// On-disk form of a built G_L chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlChainFile {
    pub kind: String,
    /// language spec text, self-contained for finite languages
    pub language: String,
    /// directory that relative paths in `language` refer to
    pub language_dir: Option<PathBuf>,
    pub schedule: String,
    /// ω of each generated level, formatted over the language alphabet
    pub omegas: Vec<String>,
}

const GL_KIND: &str = "scgroup-gl-chain";

pub fn save_gl_chain(gl: &GLChain, language_dir: Option<&Path>) -> String {
    let lang = &gl.lang;
    let language = match &lang.backend {
        Backend::Finite(set) => {
            let words: Vec<String> = set
                .iter()
                .map(|w| if w.is_empty() { "-".into() } else { lang.format_word(w) })
                .collect();
            format!(
                "alphabet: {}\nwords: {}\nmax-length: {}\n",
                lang.alphabet.join(" "),
                words.join(" "),
                lang.max_enum_len
            )
        }
        _ => lang.source.clone(),
    };
    let file = GlChainFile {
        kind: GL_KIND.into(),
        language,
        language_dir: language_dir.map(Path::to_path_buf),
        schedule: format_schedule(&gl.chain.params),
        omegas: gl.omegas().iter().map(|w| lang.format_word(w)).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain record") + "\n"
}

/// Rebuilds a saved G_L chain, regenerating its levels and checking that
/// they carry the recorded ω.
pub fn load_gl_chain(text: &str) -> Result<GLChain> {
    let file: GlChainFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.kind != GL_KIND {
        return Err(Error::Parse(format!("not a G_L chain file (kind `{}`)", file.kind)));
    }
    let lang = LanguageSpec::parse(&file.language, file.language_dir.as_deref())?;
    let params = parse_schedule(&file.schedule, ChainParams::default())?;
    let gl = build_gl_chain(lang, params)?;
    for (i, want) in file.omegas.iter().enumerate() {
        if gl.chain.level(i + 1)?.is_none() {
            return Err(Error::Chain(format!("saved level {} no longer generated", i + 1)));
        }
        let got = gl.omegas().get(i).map(|w| gl.lang.format_word(w));
        if got.as_deref() != Some(want.as_str()) {
            return Err(Error::Chain(format!(
                "level {} carries {:?}, file says {want:?}",
                i + 1,
                got
            )));
        }
    }
    Ok(gl)
}

/// A chain spec file or a saved G_L chain.
pub fn load_chain(path: &Path) -> Result<LoadedChain> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        return Ok(LoadedChain::Gl(load_gl_chain(&text)?));
    }
    parse_chain_spec(&text, path.parent())?.build()
}
