use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scgroup::chain::ChainParams;
use scgroup::glang::{build_gl_chain, LanguageSpec};
use scgroup::parse::*;
use scgroup::smallcancel::q;

fn samples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("samples")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scgroup"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("scgroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn rationals() {
    assert_eq!(parse_rational("1/40").unwrap(), q(1, 40));
    assert_eq!(parse_rational(" 3 ").unwrap(), q(3, 1));
    assert_eq!(parse_rational("0.92").unwrap(), q(23, 25));
    assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
    for bad in ["", "1/0", "x", "1.", "1/2/3"] {
        assert!(parse_rational(bad).is_err(), "{bad}");
    }
}

#[test]
fn schedules() {
    let p = parse_schedule("mu = 1/40, rho0=3 growth= 8 enforce_xi = false", ChainParams::default())
        .unwrap();
    assert_eq!((p.mu, p.rho0, p.growth, p.enforce_xi), (q(1, 40), 3, 8, false));
    let back = parse_schedule(&format_schedule(&p), ChainParams::default()).unwrap();
    assert_eq!(format_schedule(&back), format_schedule(&p));
    assert!(parse_schedule("nu = 1", ChainParams::default()).is_err());
    assert!(parse_schedule("mu", ChainParams::default()).is_err());
    // the engine invariant rejects a large μ
    assert!(parse_schedule("mu = 1/2", ChainParams::default()).is_err());
    let p = parse_schedule("rho0 = 2, rho_i = rho0 * 8^i", ChainParams::default()).unwrap();
    assert_eq!((p.rho0, p.growth), (16, 8));
    let p = parse_schedule("rho_i = 4^i", ChainParams::default()).unwrap();
    assert_eq!((p.rho0, p.growth), (4, 4));
    assert!(parse_schedule("rho_i = 4^j", ChainParams::default()).is_err());
}

#[test]
fn presentations_and_chain_specs() {
    let p = parse_presentation("generators: a b\nrelator: a b a^2 b a^3 # comment\n").unwrap();
    assert_eq!(p.relators.len(), 1);
    assert_eq!(p.relators[0].len(), 8);
    assert!(parse_presentation("relator: a\n").is_err());
    assert!(parse_presentation("generators: a\nrelator: b\n").is_err());
    let p = parse_presentation("gens: a b z\na b a^2 b a^3\nz a z^-1 b\n").unwrap();
    assert_eq!(p.relators.len(), 2);

    let f = parse_presentation("family Z=z,z2 U=a V=b m11=4 k=2\nparams μ=1/5 ρ=10\n").unwrap();
    assert_eq!(p.alphabet.len(), 3);
    assert_eq!(f.alphabet.len(), 4);
    assert_eq!(f.alphabet.format(&f.relators[0]), "z a^4 b a^5 b a^6");
    assert_eq!(f.relators[1].len(), 1 + 77 + 6);
    let sc = f.params.unwrap();
    assert_eq!((sc.mu, sc.rho), (q(1, 5), 10));
    assert_eq!(f.family.unwrap().z.len(), 2);
    assert!(parse_presentation("family Z=z U=a m11=4 k=1\n").is_err());
    assert!(parse_presentation("family Z=z U=a V=b m11=4 k=1\nz a\n").is_err());
    assert!(parse_presentation("gens: a\nparams nu=1\n").is_err());

    let s = parse_chain_spec(
        "base: a b c\nlevels: explicit\nlevel\nhnn t1: u = a b, v = c a\nrelator: t1 a\nlevel\nrelator: a b\n",
        None,
    )
    .unwrap();
    match &s.levels {
        LevelsSpec::Explicit(l) => {
            assert_eq!(l.len(), 2);
            assert_eq!(l[0].0, Some(("t1".into(), "a b".into(), "c a".into())));
            assert_eq!(l[1].1, vec!["a b".to_string()]);
        }
        other => panic!("{other:?}"),
    }
    let s = parse_chain_spec("base: a b\nlevels: explicit\nlevel\nrelators: a b, b a^2\n", None).unwrap();
    assert!(matches!(&s.levels, LevelsSpec::Explicit(l) if l[0].1 == ["a b", "b a^2"]));
    let s = parse_chain_spec("base: a b c\nlevels: auto-family z=c u=a v=b_a\n", None).unwrap();
    assert!(matches!(&s.levels, LevelsSpec::Family { v, .. } if v == "b a"));
    assert!(parse_chain_spec("base: a\n", None).is_err());
    assert!(parse_chain_spec("base: a\nlevels: magic\n", None).is_err());
    assert!(parse_chain_spec("base: a\nrelator: a\nlevels: explicit\n", None).is_err());
}

#[test]
fn gl_chain_round_trip() {
    let g = build_gl_chain(
        LanguageSpec::finite(&["0", "1"], &["1", "01", ""]).unwrap(),
        ChainParams::default(),
    )
    .unwrap();
    for i in 1..=3 {
        assert!(g.chain.level(i).unwrap().is_some());
    }
    let text = save_gl_chain(&g, None);
    let h = load_gl_chain(&text).unwrap();
    assert_eq!(h.omegas(), g.omegas());
    // a file whose ω list disagrees with the language is refused
    let bad = text.replace("\"01\"", "\"10\"");
    assert!(load_gl_chain(&bad).is_err());
    assert!(load_gl_chain("{\"kind\": \"other\"}").is_err());
}

#[test]
fn check_sc_command() {
    let pres = samples().join("aba.pres");
    let o = run(&["check-sc", pres.to_str().unwrap(), "--mu", "1/2", "--rho", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("length 5"));
    let o = run(&["check-sc", pres.to_str().unwrap(), "--mu", "7/10", "--rho", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
    let o = run(&["check-sc", pres.to_str().unwrap(), "--params", "mu=7/10 rho=8"]);
    assert_eq!(o.status.code(), Some(0));
    // the file's params line applies unless overridden
    let fam = samples().join("family.fam");
    let o = run(&["check-sc", fam.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not below 18/5"));
    let o = run(&["check-sc", fam.to_str().unwrap(), "--params", "mu=9/10 rho=20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation: relator 0: length 18 < rho 20"));
}

#[test]
fn gen_command() {
    let o = run(&["gen", "--m11", "4", "--k", "2", "--mu", "1/5", "--rho", "10"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "relator: z a^4 b a^5 b a^6\nrelator: z2 a^8 b a^9 b a^10 b a^11 b a^12 b a^13 b a^14\n"
    );
    let o = run(&["gen", "--m11", "4", "--k", "2", "--truncate", "20"]);
    assert_eq!(stdout(&o).lines().count(), 1);
    let fam = samples().join("family.fam");
    let o = run(&["gen", "--family", fam.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "relator: z a^4 b a^5 b a^6\nrelator: z2 a^8 b a^9 b a^10 b a^11 b a^12 b a^13 b a^14\n"
    );
}

#[test]
fn wp_and_conj_commands() {
    let fam = samples().join("family.chain");
    let fam = fam.to_str().unwrap();
    assert!(stdout(&run(&["wp", fam, "a b a^-1 b^-1"])).starts_with("nontrivial"));
    assert!(stdout(&run(&["wp", fam, "a a^-1"])).starts_with("trivial"));
    assert!(stdout(&run(&["conj", fam, "a b c", "c a b"])).starts_with("conjugate"));
    let tower = samples().join("tower.chain");
    let tower = tower.to_str().unwrap();
    assert!(stdout(&run(&["wp", tower, "t1^-1 a b t1 a^-1 c^-1"])).starts_with("trivial"));
    assert!(stdout(&run(&["wp", tower, "t1 a^6 b^6 c"])).starts_with("trivial"));
    assert!(stdout(&run(&["wp", tower, "t1 a^6 b^6"])).starts_with("nontrivial"));
    let o = run(&["wp", tower, "q"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gl_commands() {
    let o = run(&["gl", "encode", "--word", "01"]);
    assert_eq!(stdout(&o), "u = x1 x2 x3\nv = y1 y2 y3\n");
    let out = tmp("g.json");
    let lang = samples().join("small.lang");
    let o = run(&[
        "gl",
        "build",
        "--lang",
        lang.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--levels",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let chain = out.to_str().unwrap();
    let ask = |u: &str, v: &str| stdout(&run(&["gl", "ask", "--chain", chain, "--pair", u, v]));
    assert!(ask("x1 x2 x3", "y1 y2 y3").starts_with("conjugate"));
    assert!(ask("x1 x1 x3", "y1 y1 y3").starts_with("not conjugate"));
    assert!(ask("x1 z1 z2", "z1 z2 x1").starts_with("conjugate"));
    // the saved chain also serves wp and conj
    assert!(stdout(&run(&["wp", chain, "t1^-1 y2 y3 t1 x3^-1 x2^-1"])).starts_with("trivial"));
    assert!(stdout(&run(&["conj", chain, "x2 x3", "y2 y3"])).starts_with("conjugate"));
    let spec = samples().join("gl.chain");
    assert!(stdout(&run(&["wp", spec.to_str().unwrap(), "t2 t2^-1"])).starts_with("trivial"));
}

#[test]
fn bench_command() {
    let out = tmp("bench.jsonl");
    let spec = samples().join("gl.chain");
    let args = [
        "bench",
        "--chain",
        spec.to_str().unwrap(),
        "--sizes",
        "64:1024",
        "--seed",
        "5",
        "--words",
        "2",
        "--out",
        out.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let a = std::fs::read_to_string(&out).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), a);
    let lines: Vec<serde_json::Value> = a.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5]["kind"], "fit");
    assert!(lines[..5].iter().all(|l| l["kind"] == "size" && l["seed"] == 5));
    let thin = run(&["bench", "--chain", spec.to_str().unwrap(), "--sizes", "64,128"]);
    assert_eq!(thin.status.code(), Some(2));
}
