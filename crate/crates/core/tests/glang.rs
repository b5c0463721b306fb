use std::sync::Arc;

use scgroup::chain::{ChainParams, GConj};
use scgroup::glang::{
    build_gl_chain, gl_conjugacy, gl_g_conjugacy_banded, is_lambda_pair, lambda0_decode,
    lambda0_encode, lambda_encode, reduce_conjugacy_to_membership, reduce_membership_to_conjugacy,
    GlVia, LambdaVerdict, LanguageSpec, X1, X2,
};
use scgroup::word::{letter, rotate};
use scgroup::{Error, Word};

fn gl(words: &[&str]) -> scgroup::glang::GLChain {
    build_gl_chain(
        LanguageSpec::finite(&["0", "1"], words).unwrap(),
        ChainParams::default(),
    )
    .unwrap()
}

fn parse(g: &scgroup::glang::GLChain, s: &str) -> Word {
    g.chain.current_alphabet().parse(s).unwrap()
}

/// All binary words of length ≤ n in (length, lex) order.
fn binary_upto(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for len in 1..=n {
        for k in 0..(1usize << len) {
            out.push((0..len).rev().map(|b| (k >> b) & 1).collect());
        }
    }
    out
}

#[test]
fn lambda0_examples() {
    let x = |g| letter(g, false);
    assert_eq!(lambda0_encode(2, &[0, 1]).0, vec![x(X1), x(X2)]);
    assert!(lambda0_encode(2, &[]).is_empty());
    // p q r with block width 2
    assert_eq!(lambda0_encode(3, &[2]).0, vec![x(X2), x(X1)]);
    assert_eq!(lambda0_encode(3, &[0]).0, vec![x(X1), x(X1)]);
    assert_eq!(lambda0_encode(3, &[1]).0, vec![x(X1), x(X2)]);
    assert_eq!(lambda0_encode(1, &[0, 0]).0, vec![x(X1), x(X1)]);
}

#[test]
fn lambda0_round_trip() {
    for w in binary_upto(10) {
        let e = lambda0_encode(2, &w);
        assert_eq!(e.len(), w.len());
        assert_eq!(lambda0_decode(2, &e).unwrap(), w);
    }
    for w in [vec![0, 1, 2], vec![2, 2], vec![]] {
        assert_eq!(lambda0_decode(3, &lambda0_encode(3, &w)).unwrap(), w);
    }
}

#[test]
fn lambda0_rejects_non_image() {
    let x = |g, i| letter(g, i);
    assert!(matches!(lambda0_decode(2, &[x(X1, true)]), Err(Error::NotInImage(_))));
    assert!(matches!(lambda0_decode(2, &[x(2, false)]), Err(Error::NotInImage(_))));
    // odd length for width 2, and the unused block x₂x₂
    assert!(lambda0_decode(3, &[x(X1, false)]).is_err());
    assert!(lambda0_decode(3, &[x(X2, false), x(X2, false)]).is_err());
}

#[test]
fn lambda_examples() {
    let g = gl(&[]);
    let (u, v) = lambda_encode(2, &[0, 1]);
    assert_eq!(u, parse(&g, "x1 x2 x3"));
    assert_eq!(v, parse(&g, "y1 y2 y3"));
    let (u, v) = lambda_encode(2, &[]);
    assert_eq!(u, parse(&g, "x3"));
    assert_eq!(v, parse(&g, "y3"));
    for w in binary_upto(6) {
        let (u, v) = lambda_encode(2, &w);
        assert_eq!(u.len(), w.len() + 1);
        assert_eq!(v.len(), w.len() + 1);
    }
}

#[test]
fn lambda_pair_examples() {
    let g = gl(&["01"]);
    let l = &g.lang;
    let (v, q) = is_lambda_pair(&parse(&g, "x1 x2 x3"), &parse(&g, "y1 y2 y3"), l);
    assert_eq!(
        v,
        LambdaVerdict::LambdaPair {
            omega: vec![0, 1],
            exponent: 1,
            swapped: false
        }
    );
    assert_eq!(q, 1);
    let (v, q) = is_lambda_pair(&parse(&g, "z1 z2 z1 z2"), &parse(&g, "z2 z1 z2 z1"), l);
    assert_eq!(v, LambdaVerdict::CyclicShift);
    assert_eq!(q, 0);
    let (v, q) = is_lambda_pair(&parse(&g, "x1 x3"), &parse(&g, "y2 y3"), l);
    assert_eq!(v, LambdaVerdict::NotAPair);
    assert_eq!(q, 0);
    // rotated powers, inverted powers and the swapped order
    let (v, _) = is_lambda_pair(
        &parse(&g, "x2 x3 x1 x2 x3 x1"),
        &parse(&g, "y3 y1 y2 y3 y1 y2"),
        l,
    );
    assert!(matches!(v, LambdaVerdict::LambdaPair { exponent: 2, .. }));
    let (v, _) = is_lambda_pair(&parse(&g, "y3^-1 y2^-1 y1^-1"), &parse(&g, "x2^-1 x1^-1 x3^-1"), l);
    assert!(matches!(
        v,
        LambdaVerdict::LambdaPair {
            exponent: -1,
            swapped: true,
            ..
        }
    ));
    // exponent mismatch
    let (v, _) = is_lambda_pair(&parse(&g, "x1 x2 x3 x1 x2 x3"), &parse(&g, "y1 y2 y3"), l);
    assert_eq!(v, LambdaVerdict::NotAPair);
    // well-formed but not in L
    let (v, q) = is_lambda_pair(&parse(&g, "x1 x3"), &parse(&g, "y1 y3"), l);
    assert_eq!((v, q), (LambdaVerdict::NotAPair, 1));
}

#[test]
fn build_examples() {
    let g = gl(&["01"]);
    let d = g.chain.level(1).unwrap().unwrap();
    let st = d.stable.as_ref().unwrap();
    // t⁻¹ v t = u in the level's convention
    assert_eq!(st.u, parse(&g, "y1 y2 y3"));
    assert_eq!(st.v, parse(&g, "x1 x2 x3"));
    assert!(g.chain.level(2).unwrap().is_none());

    let empty = gl(&[]);
    assert!(empty.chain.level(1).unwrap().is_none());
    assert_eq!(empty.chain.index_i(1_000_000).unwrap(), 0);

    let two = gl(&["1", "0"]);
    let _ = two.chain.level(2).unwrap().unwrap();
    assert_eq!(two.omegas(), vec![vec![0], vec![1]]);
    assert!(two.chain.level(3).unwrap().is_none());
}

#[test]
fn gl_conjugacy_examples() {
    let g = gl(&["01", "1"]);
    let (u, v) = lambda_encode(2, &[0, 1]);
    let a = gl_conjugacy(&g, &u, &v).unwrap();
    assert!(a.conjugate);
    assert!(matches!(a.via, GlVia::LambdaPair { .. }));
    assert_eq!(a.g, GConj::No);
    assert_eq!(a.membership_queries, 1);

    let (u, v) = lambda_encode(2, &[0]);
    let a = gl_conjugacy(&g, &u, &v).unwrap();
    assert!(!a.conjugate);
    assert!(a.certain);

    let w = parse(&g, "x1 z2 y3^-1 z1");
    let a = gl_conjugacy(&g, &w, &Word(rotate(&w, 2))).unwrap();
    assert!(a.conjugate);
    assert!(matches!(a.via, GlVia::GConjugate { level: 0, .. }));
    assert_eq!(a.membership_queries, 0);
}

#[test]
fn conjugacy_matches_membership_exhaustively() {
    let members = ["", "0", "11", "010", "0110", "10101"];
    let g = gl(&members);
    let lang = LanguageSpec::finite(&["0", "1"], &members).unwrap();
    for w in binary_upto(7) {
        let (u, v) = reduce_membership_to_conjugacy(2, &w);
        let a = gl_conjugacy(&g, &u, &v).unwrap();
        assert_eq!(a.conjugate, lang.member(&w).unwrap(), "{w:?}");
        assert!(a.membership_queries <= 1);
        // also with the pair swapped and raised to a power
        let a = gl_conjugacy(&g, &v.pow(2), &u.pow(2)).unwrap();
        assert_eq!(a.conjugate, lang.member(&w).unwrap(), "{w:?}");
    }
}

#[test]
fn backward_reduction() {
    let g = gl(&["0"]);
    let w = parse(&g, "x1 z1 z2");
    let r = reduce_conjugacy_to_membership(&g, &w, &Word(rotate(&w, 1))).unwrap();
    assert_eq!(r.query, None);
    assert!(r.combine(false));
    let (u, v) = lambda_encode(2, &[0]);
    let r = reduce_conjugacy_to_membership(&g, &u, &v).unwrap();
    assert_eq!(r.query, Some(vec![0]));
    assert!(r.combine(true));
    assert!(!r.combine(false));
    let r = reduce_conjugacy_to_membership(&g, &parse(&g, "x1"), &parse(&g, "x2")).unwrap();
    assert_eq!(r.query, None);
    assert!(!r.combine(true));
}

#[test]
fn banded_examples() {
    let g = gl(&["0"]);
    let w = parse(&g, "x1 x2 z1");
    assert!(gl_g_conjugacy_banded(&g, &w, &w).unwrap());
    assert!(!gl_g_conjugacy_banded(&g, &w, &parse(&g, "x1 x2 z1 z1 z2")).unwrap());
}

#[test]
fn language_spec_backends() {
    let spec = LanguageSpec::parse("alphabet: 0 1\nregex: (01)*\n", None).unwrap();
    assert!(spec.member(&[0, 1, 0, 1]).unwrap());
    assert!(!spec.member(&[1, 0]).unwrap());
    let spec = Arc::new(LanguageSpec::parse("alphabet: 0 1\nregex: 0*1\nmax-length: 4\n", None).unwrap());
    let mut e = spec.enumerate();
    let mut got = Vec::new();
    while let Some(w) = e.next_member().unwrap() {
        got.push(w);
    }
    assert_eq!(got, vec![vec![1], vec![0, 1], vec![0, 0, 1], vec![0, 0, 0, 1]]);

    let spec = LanguageSpec::parse("alphabet: p q r\nwords: pq - r\n", None).unwrap();
    assert!(spec.member(&[]).unwrap());
    assert!(spec.member(&[0, 1]).unwrap());
    assert!(!spec.member(&[1]).unwrap());

    let dir = std::env::temp_dir().join(format!("scgroup-lang-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("words.txt"), "01\n110\n").unwrap();
    let spec = LanguageSpec::parse("alphabet: 0 1\nfinite: words.txt\n", Some(&dir)).unwrap();
    assert!(spec.member(&[1, 1, 0]).unwrap());
    assert!(LanguageSpec::parse("alphabet: 0 1\n", None).is_err());
    assert!(LanguageSpec::parse("alphabet: 0 1\nregex: (\n", None).is_err());
}

#[test]
fn command_backend() {
    if std::process::Command::new("grep").arg("--version").output().is_err() {
        return;
    }
    let spec = LanguageSpec::parse("alphabet: 0 1\ncmd: grep -qxE (01)*\n", None).unwrap();
    assert!(spec.member(&[0, 1, 0, 1]).unwrap());
    assert!(!spec.member(&[1]).unwrap());
    assert!(spec.member(&[]).unwrap());
    let spec = LanguageSpec::parse("alphabet: 0 1\ncmd: /nonexistent/decider\n", None).unwrap();
    assert!(spec.member(&[1]).is_err());
}
