use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scgroup::chain::{ChainParams, GConj, Stage};
use scgroup::glang::{build_gl_chain, gl_conjugacy, lambda_encode, GlVia, LanguageSpec};
use scgroup::harness::bench::bench_wp;
use scgroup::parse::{
    load_chain, load_gl_chain, parse_presentation, parse_rational, parse_sc_params, parse_schedule,
    save_gl_chain,
    LoadedChain,
};
use scgroup::smallcancel::{
    check_condition, find_pieces, generate_relator_family, q, Condition, PieceKind,
    RelatorFamilySpec, SCParams,
};
use scgroup::{Alphabet, Error, Result};

#[derive(Parser)]
#[command(name = "scgroup", version, about = "Small-cancellation word and conjugacy problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ScArgs {
    /// all parameters at once, e.g. "mu=1/6 rho=8"
    #[arg(long)]
    params: Option<String>,
    /// piece bound factor [default: 1/6]
    #[arg(long)]
    mu: Option<String>,
    /// minimal relator length [default: 1]
    #[arg(long)]
    rho: Option<usize>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    eps: Option<usize>,
}

impl ScArgs {
    /// Defaults, then the file's `params` line, then `--params`, then the
    /// single flags.
    fn params(&self, file: Option<&SCParams>) -> Result<SCParams> {
        let mut p = file.cloned().unwrap_or_else(|| SCParams::free(q(1, 6), 1));
        if let Some(t) = &self.params {
            p = parse_sc_params(t, p)?;
        }
        if let Some(x) = &self.lambda {
            p.lambda = parse_rational(x)?;
        }
        if let Some(x) = &self.c {
            p.c = parse_rational(x)?;
        }
        if let Some(x) = &self.mu {
            p.mu = parse_rational(x)?;
        }
        if let Some(x) = self.eps {
            p.eps = x;
        }
        if let Some(x) = self.rho {
            p.rho = x;
        }
        SCParams::new(p.lambda, p.c, p.eps, p.mu, p.rho)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check C(μ) or C′ on a presentation or family file and list the
    /// longest pieces
    CheckSc {
        presentation: PathBuf,
        #[command(flatten)]
        sc: ScArgs,
        /// also require the quasi-geodesic and ε′-piece conditions
        #[arg(long)]
        prime: bool,
    },
    /// Print the first k relators of a relator family
    Gen {
        /// family file; replaces the word and size flags below
        #[arg(long)]
        family: Option<PathBuf>,
        /// generator names, space separated
        #[arg(long, default_value = "a b z z2")]
        generators: String,
        /// the z-words, one per relator
        #[arg(long = "z", num_args = 1.., default_values_t = ["z".to_string(), "z2".to_string()])]
        z: Vec<String>,
        #[arg(long, default_value = "a")]
        u: String,
        #[arg(long, default_value = "b")]
        v: String,
        #[arg(long, default_value_t = 4)]
        m11: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// keep only relators of length at most this
        #[arg(long)]
        truncate: Option<usize>,
        #[command(flatten)]
        sc: ScArgs,
    },
    /// Limit word problem on a chain spec or saved G_L chain
    Wp {
        chain: PathBuf,
        word: String,
        /// print the certificate stages
        #[arg(long)]
        certificate: bool,
    },
    /// Conjugacy of two words in the limit group
    Conj {
        chain: PathBuf,
        u: String,
        v: String,
    },
    /// G_L construction
    Gl {
        #[command(subcommand)]
        cmd: GlCmd,
    },
    /// Step-count scaling of the limit word problem
    Bench {
        #[arg(long)]
        chain: PathBuf,
        /// `lo:hi` for powers of two, or a comma list
        #[arg(long, default_value = "1024:65536")]
        sizes: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        words: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GlCmd {
    /// Build levels for a language spec and save the chain
    Build {
        #[arg(long)]
        lang: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// levels to generate before saving
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// schedule overrides, e.g. "mu=1/40 growth=4"
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Decide conjugacy of a pair in a saved chain
    Ask {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        pair: Vec<String>,
    },
    /// Print Λ(ω)
    Encode {
        #[arg(long)]
        word: String,
        /// language spec supplying the alphabet (default {0, 1})
        #[arg(long)]
        lang: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad sizes `{s}`"));
    if let Some((lo, hi)) = s.split_once(':') {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n = n.checked_mul(2).ok_or_else(bad)?;
        }
        return Ok(out);
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn check_sc(path: &Path, sc: &ScArgs, prime: bool) -> Result<bool> {
    let p = parse_presentation(&read(path)?)?;
    let params = sc.params(p.params.as_ref())?;
    let relators = match &p.family {
        // regenerate so that family checks see the final parameters
        Some(spec) => generate_relator_family(&p.alphabet, spec, &params)?.relators,
        None => p.relators.clone(),
    };
    let rs = scgroup::smallcancel::RelatorSystem::new(p.alphabet.clone(), &relators, params)?;
    for kind in [PieceKind::Eps, PieceKind::EpsPrime] {
        let pieces = find_pieces(&rs, rs.params.eps, kind);
        match pieces.iter().max_by_key(|x| x.len()) {
            Some(x) => println!(
                "{kind:?}: {} pieces, longest `{}` (length {}) in relator {}",
                pieces.len(),
                p.alphabet.format(&x.piece),
                x.len(),
                x.rel
            ),
            None => println!("{kind:?}: no pieces"),
        }
    }
    let rep = check_condition(&rs, if prime { Condition::CPrime } else { Condition::C });
    for v in &rep.violations {
        println!("violation: {v}");
    }
    println!("{}", if rep.pass { "PASS" } else { "FAIL" });
    Ok(rep.pass)
}

#[allow(clippy::too_many_arguments)]
fn gen(
    family: Option<&Path>,
    generators: &str,
    z: &[String],
    u: &str,
    v: &str,
    m11: usize,
    k: usize,
    truncate: Option<usize>,
    sc: &ScArgs,
) -> Result<()> {
    let (al, spec, file_params) = match family {
        Some(path) => {
            let p = parse_presentation(&read(path)?)?;
            let spec = p
                .family
                .ok_or_else(|| Error::Parse(format!("{}: no `family` line", path.display())))?;
            (p.alphabet, spec, p.params)
        }
        None => {
            let names: Vec<&str> = generators.split_whitespace().collect();
            let al = Alphabet::new(&names)?;
            let spec = RelatorFamilySpec {
                z: z.iter().map(|w| al.parse(w)).collect::<Result<_>>()?,
                u: al.parse(u)?,
                v: al.parse(v)?,
                m11,
                k,
            };
            (al, spec, None)
        }
    };
    let f = generate_relator_family(&al, &spec, &sc.params(file_params.as_ref())?)?;
    for r in f.relators.iter().filter(|r| truncate.is_none_or(|b| r.len() <= b)) {
        println!("relator: {}", al.format(r));
    }
    for v in &f.violations {
        eprintln!("warning: {v}");
    }
    Ok(())
}

fn wp(path: &Path, word: &str, show: bool) -> Result<()> {
    let lc = load_chain(path)?;
    let ch = lc.chain();
    let w = ch.parse_word_extending(word, 256)?;
    let a = ch.limit_word_problem(&w)?;
    println!(
        "{} (level {}, I(n) = {})",
        if a.trivial { "trivial" } else { "nontrivial" },
        a.level,
        a.i0
    );
    if show {
        let al = ch.alphabet_at(a.level)?;
        for s in &a.certificate.stages {
            match s {
                Stage::Britton { input, output } => {
                    println!("britton: {} -> {}", al.format(input), al.format(output))
                }
                Stage::Rewrite(c) => print!("{}", c.to_text(&al)),
            }
        }
    }
    Ok(())
}

fn conj(path: &Path, u: &str, v: &str) -> Result<()> {
    let lc = load_chain(path)?;
    match &lc {
        LoadedChain::Gl(gl) => {
            let x = gl.chain.parse_word_extending(u, 256)?;
            let y = gl.chain.parse_word_extending(v, 256)?;
            print_gl_answer(gl, &x, &y)
        }
        LoadedChain::Plain(ch) => {
            let x = ch.parse_word_extending(u, 256)?;
            let y = ch.parse_word_extending(v, 256)?;
            let g = ch.g_conjugacy(&x, &y, &Default::default())?;
            match g {
                GConj::Yes { conjugator, level } => {
                    let al = ch.alphabet_at(level)?;
                    println!("conjugate at level {level}, conjugator `{}`", al.format(&conjugator));
                }
                GConj::No => println!("not G-conjugate (conjugacy first witnessed in an HNN step is reported as no)"),
                GConj::Unknown(why) => println!("unknown: {why}"),
            }
            Ok(())
        }
    }
}

fn print_gl_answer(gl: &scgroup::glang::GLChain, x: &[scgroup::Letter], y: &[scgroup::Letter]) -> Result<()> {
    let a = gl_conjugacy(gl, x, y)?;
    let verdict = if a.conjugate { "conjugate" } else { "not conjugate" };
    let via = match &a.via {
        GlVia::GConjugate { level, .. } => format!("G-conjugate at level {level}"),
        GlVia::LambdaPair { omega, .. } => {
            format!("Lambda-pair of `{}`", gl.lang.format_word(omega))
        }
        other => format!("{other:?}"),
    };
    println!(
        "{verdict} ({via}; {} membership queries{})",
        a.membership_queries,
        if a.certain { "" } else { "; no within budget" }
    );
    Ok(())
}

fn gl(cmd: &GlCmd) -> Result<()> {
    match cmd {
        GlCmd::Build {
            lang,
            out,
            levels,
            schedule,
        } => {
            let spec = LanguageSpec::parse(&read(lang)?, lang.parent())?;
            let params = match schedule {
                Some(s) => parse_schedule(s, ChainParams::default())?,
                None => ChainParams::default(),
            };
            let g = build_gl_chain(spec, params)?;
            let mut built = 0;
            for i in 1..=*levels {
                if g.chain.level(i)?.is_none() {
                    break;
                }
                built = i;
            }
            let dir = lang
                .parent()
                .map(|d| std::fs::canonicalize(if d.as_os_str().is_empty() { Path::new(".") } else { d }))
                .transpose()?;
            std::fs::write(out, save_gl_chain(&g, dir.as_deref()))?;
            println!("{built} levels written to {}", out.display());
            Ok(())
        }
        GlCmd::Ask { chain, pair } => {
            let g = load_gl_chain(&read(chain)?)?;
            let x = g.chain.parse_word_extending(&pair[0], 256)?;
            let y = g.chain.parse_word_extending(&pair[1], 256)?;
            print_gl_answer(&g, &x, &y)
        }
        GlCmd::Encode { word, lang } => {
            let spec = match lang {
                Some(p) => LanguageSpec::parse(&read(p)?, p.parent())?,
                None => LanguageSpec::finite(&["0", "1"], &[])?,
            };
            let w = spec.parse_word(word)?;
            let (u, v) = lambda_encode(spec.alphabet.len(), &w);
            let al = scgroup::glang::gl_base();
            println!("u = {}", al.format(&u));
            println!("v = {}", al.format(&v));
            Ok(())
        }
    }
}

fn bench(chain: &Path, sizes: &str, seed: u64, words: usize, out: Option<&Path>) -> Result<()> {
    let lc = load_chain(chain)?;
    let rep = bench_wp(lc.chain(), &parse_sizes(sizes)?, words, seed)?;
    let text = rep.to_jsonl();
    match out {
        Some(p) => std::fs::write(p, &text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "slope {:.3} (95% CI {:.3}..{:.3})",
        rep.slope, rep.ci.0, rep.ci.1
    );
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::CheckSc {
            presentation,
            sc,
            prime,
        } => check_sc(&presentation, &sc, prime),
        Cmd::Gen {
            family,
            generators,
            z,
            u,
            v,
            m11,
            k,
            truncate,
            sc,
        } => gen(family.as_deref(), &generators, &z, &u, &v, m11, k, truncate, &sc).map(|_| true),
        Cmd::Wp {
            chain,
            word,
            certificate,
        } => wp(&chain, &word, certificate).map(|_| true),
        Cmd::Conj { chain, u, v } => conj(&chain, &u, &v).map(|_| true),
        Cmd::Gl { cmd } => gl(&cmd).map(|_| true),
        Cmd::Bench {
            chain,
            sizes,
            seed,
            words,
            out,
        } => bench(&chain, &sizes, seed, words, out.as_deref()).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
