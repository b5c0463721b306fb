use num_traits::One;
use rand::Rng;
use scgroup::harness::gen::{random_cyclically_reduced, random_reduced, rng};
use scgroup::harness::oracle::naive_pieces;
use scgroup::smallcancel::*;
use scgroup::word::*;

fn al() -> Alphabet {
    Alphabet::new(&["a", "b", "z", "z2"]).unwrap()
}

fn w(s: &str) -> Word {
    al().parse(s).unwrap()
}

fn family(k: usize, m11: usize) -> FamilyReport {
    let spec = RelatorFamilySpec {
        z: vec![w("z"), w("z2")],
        u: w("a"),
        v: w("b"),
        m11,
        k,
    };
    generate_relator_family(&al(), &spec, &SCParams::free(q(1, 5), 10)).unwrap()
}

fn system(rels: &[&str], mu: Q, rho: usize) -> RelatorSystem {
    let ws: Vec<Word> = rels.iter().map(|r| w(r)).collect();
    RelatorSystem::new(al(), &ws, SCParams::free(mu, rho)).unwrap()
}

#[test]
fn family_exponent_schedule() {
    let f = family(2, 4);
    assert_eq!(f.relators[0], w("z a^4 b a^5 b a^6"));
    assert_eq!(
        f.relators[1],
        w("z2 a^8 b a^9 b a^10 b a^11 b a^12 b a^13 b a^14")
    );
    assert_eq!(f.relators[0].len(), 18);
    assert_eq!(f.relators[1].len(), 84);
    let sym = f.system.symmetrized();
    assert_eq!(sym, symmetrize(f.relators.iter()).unwrap());
    assert!(sym.contains(&f.relators[0]) && sym.contains(&f.relators[1]));
}

#[test]
fn family_exponents_distinct() {
    let spec = RelatorFamilySpec {
        z: vec![w("z"), w("z2")],
        u: w("a"),
        v: w("b"),
        m11: 4,
        k: 2,
    };
    let mut all: Vec<usize> = (1..=2).flat_map(|i| spec.exponents(i)).collect();
    let n = all.len();
    all.sort();
    all.dedup();
    assert_eq!(all.len(), n);
    assert_eq!(spec.max_exponent(1), 2 * 4 - 2);
}

#[test]
fn family_empty_and_rejections() {
    let spec = RelatorFamilySpec {
        z: vec![],
        u: w("a"),
        v: w("b"),
        m11: 4,
        k: 0,
    };
    let f = generate_relator_family(&al(), &spec, &SCParams::free(q(1, 5), 10)).unwrap();
    assert!(f.system.is_empty());
    let spec = RelatorFamilySpec {
        z: vec![w("z")],
        u: w("a"),
        v: w("a^2"),
        m11: 4,
        k: 1,
    };
    match generate_relator_family(&al(), &spec, &SCParams::free(q(1, 5), 10)) {
        Err(scgroup::Error::ElementaryWitness { word, root }) => {
            assert_eq!(word, "a^2");
            assert_eq!(root, "a");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
    let spec = RelatorFamilySpec {
        z: vec![w("z")],
        u: w("a b"),
        v: w("b^-1 a^-1"),
        m11: 4,
        k: 1,
    };
    assert!(generate_relator_family(&al(), &spec, &SCParams::free(q(1, 5), 10)).is_err());
}

#[test]
fn family_validator_reports_inequalities() {
    // m11 = 4: mu|R| = 3.6 is far below 6L(m_bar+1) = 42
    let f = family(1, 4);
    assert_eq!(f.violations.len(), 1);
    assert!(f.violations[0].contains("6L(m_bar+1)"));
}

#[test]
fn truncation() {
    let f = family(2, 4);
    let t = truncate_family(&f.system, 5, |_| Some(20));
    assert_eq!(t.relators().len(), 1);
    assert_eq!(t.relators()[0].len(), 18);
    assert!(truncate_family(&f.system, 5, |_| Some(0)).is_empty());
    assert_eq!(truncate_family(&f.system, 5, |_| None).relators().len(), 2);
}

#[test]
fn pieces_example_aba2ba3() {
    let rs = system(&["a b a^2 b a^3"], q(1, 2), 8);
    let ps = find_pieces(&rs, 0, PieceKind::Eps);
    let longest = ps.iter().max_by_key(|p| p.len()).unwrap();
    // cyclically the relator is b a^2 b a^4, so a^2 b a^2 occurs at two alignments
    assert_eq!(longest.len(), 5);
    let canon = &rs.relators()[0];
    assert!(is_cyclic_shift(canon, &w("a b a^2 b a^3").inverse()));
    assert_eq!(longest.piece, w("a a b a a").inverse());
    // the linear word alone only repeats a b a a
    let lin = w("a b a^2 b a^3");
    assert_eq!(find_subslice(&lin[1..], &w("a b a a")), Some(2));
}

#[test]
fn pieces_ab_none() {
    let rs = system(&["a b"], q(1, 2), 1);
    assert!(find_pieces(&rs, 0, PieceKind::Eps).is_empty());
}

#[test]
fn pieces_family_m4_longest() {
    let f = family(1, 4);
    // longest self-piece a^{2m-4} b a^{2m-3} has length 4m - 6 = 10, above 0.2 * 18
    let ps = find_pieces(&f.system, 0, PieceKind::Eps);
    let longest = ps.iter().max_by_key(|p| p.len()).unwrap();
    assert_eq!(longest.len(), 10);
    assert!(
        is_cyclic_shift(&longest.piece, &w("a^4 b a^5"))
            || longest.piece.inverse() == w("a^4 b a^5")
    );
    assert!(!check_condition(&f.system, Condition::C).pass);
}

#[test]
fn pieces_match_oracle_on_family() {
    let f = family(2, 4);
    for kind in [PieceKind::Eps, PieceKind::EpsPrime] {
        let fast = find_pieces(&f.system, 0, kind);
        let slow = naive_pieces(&f.system, 0, kind);
        assert_eq!(fast, slow, "{kind:?}");
        assert!(fast.iter().all(|p| p.verify()));
    }
}

fn random_system(seed: u64, total: usize, gens: usize) -> RelatorSystem {
    let mut r = rng(seed);
    let names: Vec<String> = (0..gens).map(|g| format!("g{g}")).collect();
    let alpha = Alphabet::new(&names).unwrap();
    let count = r.gen_range(1..=4);
    let mut rels = Vec::new();
    let mut left = total;
    for _ in 0..count {
        if left < 2 {
            break;
        }
        let n = r.gen_range(1..=left.min(total / count + 1));
        rels.push(random_cyclically_reduced(&mut r, gens, n));
        left -= n;
    }
    RelatorSystem::new(alpha, &rels, SCParams::free(q(1, 6), 1)).unwrap()
}

#[test]
fn pieces_match_oracle_random_eps0() {
    for seed in 0..200u64 {
        let total = 20 + (seed as usize * 37) % 481;
        let rs = random_system(seed, total, 2 + (seed % 2) as usize);
        assert!(rs.total_len() <= 500);
        for kind in [PieceKind::Eps, PieceKind::EpsPrime] {
            let fast = find_pieces(&rs, 0, kind);
            let slow = naive_pieces(&rs, 0, kind);
            assert_eq!(fast, slow, "seed {seed} {kind:?}");
            assert!(fast.iter().all(|p| p.verify()), "seed {seed}");
        }
    }
}

#[test]
fn pieces_match_oracle_random_eps1() {
    for seed in 0..40u64 {
        let rs = random_system(1000 + seed, 14 + (seed as usize % 10), 2);
        for kind in [PieceKind::Eps, PieceKind::EpsPrime] {
            let fast = find_pieces(&rs, 1, kind);
            let slow = naive_pieces(&rs, 1, kind);
            assert_eq!(fast.len(), slow.len(), "seed {seed} {kind:?}");
            for (a, b) in fast.iter().zip(&slow) {
                assert!(same_piece(a, b, 1), "seed {seed} {kind:?}\n{a:?}\n{b:?}");
                assert!(a.verify() && b.verify());
            }
        }
    }
}

#[test]
fn pieces_inverse_orientation_adds_nothing() {
    // a piece located in a rotation of R⁻¹ has its inverse located in R
    for seed in 0..30u64 {
        let rs = random_system(500 + seed, 40, 2);
        let rels = rs.relators();
        let inv_rels: Vec<Word> = rels.iter().map(|r| r.inverse()).collect();
        let rs_inv = RelatorSystem::new(rs.alphabet.clone(), &inv_rels, rs.params.clone()).unwrap();
        let a: Vec<usize> = find_pieces(&rs, 0, PieceKind::Eps)
            .iter()
            .map(|p| p.len())
            .collect();
        let mut b: Vec<usize> = find_pieces(&rs_inv, 0, PieceKind::Eps)
            .iter()
            .map(|p| p.len())
            .collect();
        let mut a2 = a.clone();
        a2.sort();
        b.sort();
        assert_eq!(a2, b);
    }
}

#[test]
fn check_condition_examples() {
    let rs = system(&["a b a^2 b a^3"], q(1, 2), 8);
    let rep = check_condition(&rs, Condition::C);
    assert!(!rep.pass);
    assert_eq!(rep.violations.len(), 1);
    match &rep.violations[0] {
        Violation::LongPiece { piece, bound } => {
            assert_eq!(piece.len(), 5);
            assert_eq!(*bound, Q::from_integer(4));
            assert_eq!(piece.piece, w("a a b a a").inverse());
        }
        v => panic!("unexpected {v:?}"),
    }
    // 5 >= 0.6 * 8 still fails; 0.7 * 8 = 5.6 passes
    let rs = system(&["a b a^2 b a^3"], q(3, 5), 8);
    assert!(!check_condition(&rs, Condition::C).pass);
    let rs = system(&["a b a^2 b a^3"], q(7, 10), 8);
    assert!(check_condition(&rs, Condition::C).pass);
    assert!(check_condition(&rs, Condition::CPrime).pass);
    let empty = system(&[], q(1, 2), 8);
    assert!(check_condition(&empty, Condition::CPrime).pass);
}

#[test]
fn check_condition_short_relator() {
    let rs = system(&["a b a^2 b a^3"], q(7, 10), 9);
    let rep = check_condition(&rs, Condition::C);
    assert_eq!(
        rep.violations,
        vec![Violation::TooShort {
            rel: 0,
            len: 8,
            rho: 9
        }]
    );
}

#[test]
fn quasi_geodesic_free_relators() {
    let mut r = rng(9);
    for n in 1..60 {
        let x = random_cyclically_reduced(&mut r, 3, n);
        assert_eq!(quasi_geodesic_violation(&x, Q::one(), q(0, 1)), None);
    }
    // a word that is not freely reduced fails (1,0) but passes with c = 2
    let x = w("a b b^-1 a");
    assert!(quasi_geodesic_violation(&x, Q::one(), q(0, 1)).is_some());
    assert_eq!(quasi_geodesic_violation(&x, Q::one(), q(2, 1)), None);
    let _ = random_reduced(&mut r, 2, 3);
}

#[test]
fn power_constants() {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let big = |x: BigInt| BigRational::from_integer(x);
    let c = power_qg_constants(&w("a b"), 0, 4, true).unwrap();
    assert_eq!(
        (c.lambda.clone(), c.c.clone()),
        (big(4.into()), big(0.into()))
    );
    let c = power_qg_constants(&w("a b a"), 0, 4, false).unwrap();
    assert_eq!((c.lambda, c.c), (big(12.into()), big(45.into())));
    let c = power_qg_constants(&w("a"), 1, 2, false).unwrap();
    assert_eq!(c.lambda, big(BigInt::from(4) * BigInt::from(2).pow(180)));
    assert_eq!(c.c, big(BigInt::from(5) * BigInt::from(2).pow(360)));
    assert!(power_qg_constants(&[], 0, 2, true).is_err());
}

#[test]
fn large_family_passes_cprime() {
    // m11 = 32: the longest piece 4m-6 = 122 is below |R|/10 = 148.8
    let spec = RelatorFamilySpec {
        z: vec![w("z")],
        u: w("a"),
        v: w("b"),
        m11: 32,
        k: 1,
    };
    let f = generate_relator_family(&al(), &spec, &SCParams::free(q(1, 10), 100)).unwrap();
    assert_eq!(f.relators[0].len(), 1 + 31 * 94 / 2 + 30);
    let rep = check_condition(&f.system, Condition::CPrime);
    assert!(rep.pass, "{:?}", rep.violations);
}
