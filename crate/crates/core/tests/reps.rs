mod common;

use std::collections::BTreeSet;

use common::{oracle_extensions, oracle_refactor, oracle_sigma, pattern, rewrite_class};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twograph::fixtures;
use twograph::lattice::{Angle, Sublattice};
use twograph::reps::{
    apply_gauge, build_3bi, build_3bii, build_ring_by_tail, compatible_tails, cycle_squared, decompose,
    equivalent_reps, from_commuting_pair, from_theta_cycle, is_irreducible, normalize_scalars, repeat_words,
    scalar_character, symmetry_group, Decomposition, Domain, GroupConstructionRep, Scalars,
};
use twograph::semigroup::{Color, Letter, Word};
use twograph::tails::{build_inductive_window, tail_symmetry, window_symmetry, TailSpec};
use twograph::Error;

fn blue(s: &str) -> Word {
    Word::parse_blue(s).unwrap()
}

fn red(s: &str) -> Word {
    Word::parse_red(s).unwrap()
}

fn z() -> Angle {
    Angle::ZERO
}

#[test]
fn fixed_point_rep_has_two_loops() {
    let t = fixtures::reverse3();
    let rep = from_theta_cycle(&t, &[(2, 2)], z(), z()).unwrap();
    assert_eq!(rep.elements().unwrap(), vec![(0, 0)]);
    assert_eq!(rep.labels((0, 0)), (2, 2));
    assert_eq!(rep.labels((1, 0)), (2, 2));
    assert_eq!(rep.labels((0, 1)), (2, 2));
}

#[test]
fn cycle_reps_are_irreducible_with_trivial_symmetry() {
    for (name, t) in fixtures::all() {
        for cycle in t.cycles() {
            let rep = from_theta_cycle(&t, &cycle, z(), z()).unwrap();
            assert_eq!(rep.elements().unwrap().len(), cycle.len(), "{name}");
            assert_eq!(symmetry_group(&rep).lattice, *rep.kernel(), "{name} {cycle:?}");
            assert!(is_irreducible(&rep));
        }
    }
}

#[test]
fn perturbed_labels_fail_validation() {
    let t = fixtures::forward3();
    let rep = from_theta_cycle(&t, &[(1, 1), (1, 2), (2, 1)], z(), z()).unwrap();
    let Domain::Full { imap, jmap } = rep.domain.clone() else { panic!() };
    let (a, b) = (0..imap.len())
        .flat_map(|a| (a + 1..imap.len()).map(move |b| (a, b)))
        .find(|&(a, b)| imap[a] != imap[b])
        .unwrap();
    let mut bad = imap.clone();
    bad.swap(a, b);
    let broken = GroupConstructionRep::new(t, rep.group.clone(), Domain::Full { imap: bad, jmap }, rep.scalars.clone()).unwrap();
    assert!(matches!(broken.validate(), Err(Error::InconsistentCommutation(_))));
}

#[test]
fn trivial_pair_under_identity() {
    let rep = from_commuting_pair(&fixtures::identity2(), &blue("1"), &red("1"), z(), z()).unwrap();
    assert_eq!(rep.elements().unwrap().len(), 1);
    assert_eq!(rep.labels((0, 0)), (1, 1));
}

#[test]
fn long_pair_grid_matches_rewriter() {
    let t = fixtures::forward3();
    let (u, v) = (blue("1121212"), red("1222212"));
    let rep = from_commuting_pair(&t, &u, &v, z(), z()).unwrap();
    assert_eq!(rep.elements().unwrap().len(), 49);
    assert_eq!(rep.blue_word_from((0, 0), 7), u);
    assert_eq!(rep.red_word_from((0, 0), 7), v);
    let w = v.concat(&u);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let (s, tt) = (rng.gen_range(0..7usize), rng.gen_range(0..7usize));
        let r = oracle_refactor(&t, &w, &pattern(&[(Color::Red, 7 - tt), (Color::Blue, 7), (Color::Red, tt)]));
        let mid = Word(r.letters()[7 - tt..14 - tt].to_vec());
        assert_eq!(rep.labels((s as i64, tt as i64)).0, mid.letter_from_right(s).index);
        let r = oracle_refactor(&t, &w, &pattern(&[(Color::Blue, 7 - s), (Color::Red, 7), (Color::Blue, s)]));
        let mid = Word(r.letters()[7 - s..14 - s].to_vec());
        assert_eq!(rep.labels((s as i64, tt as i64)).1, mid.letter_from_right(tt).index);
    }
}

#[test]
fn grid_identity_holds_through_rewriter() {
    let t = fixtures::forward3();
    let rep = from_commuting_pair(&t, &blue("1121212"), &red("1222212"), z(), z()).unwrap();
    for (s, tt) in rep.elements().unwrap() {
        let (i, j) = rep.labels((s, tt));
        let i_up = rep.labels((s, tt + 1)).0;
        let j_right = rep.labels((s + 1, tt)).1;
        let lhs = Word(vec![Letter::f(j_right), Letter::e(i)]);
        let rhs = Word(vec![Letter::e(i_up), Letter::f(j)]);
        assert!(rewrite_class(&t, &lhs).contains(&rhs), "({s},{tt})");
    }
}

#[test]
fn cycle_squared_has_diagonal_symmetry() {
    let t = fixtures::forward3();
    let rep = cycle_squared(&t, &[(1, 1), (1, 2), (2, 1)], z(), z()).unwrap();
    let h = symmetry_group(&rep).lattice;
    assert_eq!(h, Sublattice::from_gens(&[(1, 1), (0, 3)]));
    assert!(!is_irreducible(&rep));
}

#[test]
fn ring_by_tail_examples() {
    let id = fixtures::identity2();
    let rep = build_ring_by_tail(&id, &blue("12"), &TailSpec::red("", "12").unwrap(), z()).unwrap();
    rep.validate().unwrap();
    let t = fixtures::forward3();
    let rep = build_ring_by_tail(&t, &blue("1121212"), &TailSpec::red("", "1222212").unwrap(), z()).unwrap();
    rep.validate().unwrap();
    assert!(symmetry_group(&rep).lattice.contains((0, 7)));
}

#[test]
fn ring_by_tail_of_cycle_is_periodic() {
    // blue ring of a theta-cycle, red tail repeating the matching red word
    let t = fixtures::forward3();
    let cycle = [(1, 1), (1, 2), (2, 1)];
    let (u, v) = twograph::reps::cycle_pair(&cycle);
    let rep = build_ring_by_tail(&t, &u, &TailSpec::new(Word::empty(), v.clone()).unwrap(), z()).unwrap();
    assert!(symmetry_group(&rep).lattice.contains((0, v.len() as i64)));
}

#[test]
fn three_bi_examples() {
    let t = fixtures::forward3();
    let rep = build_3bi(&t, &blue("1"), &red("1"), z()).unwrap();
    let h = symmetry_group(&rep).lattice;
    assert!(h.contains((3, 0)));
    assert!(h.contains((1, 1)));
    assert!(!is_irreducible(&rep));
    let id = fixtures::identity2();
    let rep = build_3bi(&id, &blue("12"), &red("2"), z()).unwrap();
    assert!(symmetry_group(&rep).lattice.contains((2, 0)));
    // p = 1: same labels as the commuting-pair torus
    let torus = from_commuting_pair(&id, &blue("12"), &red("2"), z(), z()).unwrap();
    for s in 0..4 {
        for tt in 0..4 {
            assert_eq!(rep.labels((s, tt)), torus.labels((s, tt)));
        }
    }
}

#[test]
fn three_bii_constant_blocks() {
    // theta'(u0,v0) = (u0,v0) gives constant block tails
    let t = fixtures::forward3();
    let (u, v) = (blue("1121212"), red("1222212"));
    let te = TailSpec::new(Word::empty(), u.clone()).unwrap();
    let tf = TailSpec::new(Word::empty(), v.clone()).unwrap();
    let rep = build_3bii(&t, &te, &tf, 7, 7, z()).unwrap();
    rep.validate().unwrap();
    let (a, b) = twograph::reps::first_block_repeat(&te, &tf, 7, 7);
    assert_eq!((a, b), (0, 1));
}

#[test]
fn three_bii_generated_tails_commute_at_repeat() {
    let t = fixtures::forward3();
    for (u0, v0) in [("1", "1"), ("12", "1"), ("1", "12"), ("12", "12")] {
        let (te, tf) = compatible_tails(&t, &blue(u0), &red(v0)).unwrap();
        let (k, l) = (u0.len(), v0.len());
        let rep = build_3bii(&t, &te, &tf, k, l, z()).unwrap();
        rep.validate().unwrap();
        let (uu, vv) = repeat_words(&te, &tf, k, l);
        let ef = uu.concat(&vv);
        let fe = vv.concat(&uu);
        assert!(rewrite_class(&t, &ef).contains(&fe), "{u0} {v0}");
    }
}

#[test]
fn identity_tails_need_constant_blocks() {
    // theta' is the identity, so f_{v'} e_u = e_{u'} f_v forces u' = u and v' = v
    let id = fixtures::identity2();
    let te = TailSpec::blue("", "21").unwrap();
    let tf = TailSpec::red("", "2").unwrap();
    build_3bii(&id, &te, &tf, 2, 1, z()).unwrap().validate().unwrap();
    let te = TailSpec::blue("21", "1122").unwrap();
    let tf = TailSpec::red("2", "21").unwrap();
    assert!(matches!(build_3bii(&id, &te, &tf, 2, 1, z()), Err(Error::Compatibility(_))));
}

#[test]
fn identity_window_separates_coordinates() {
    let id = fixtures::identity2();
    let tau = TailSpec::alternating(&[(1, 2), (2, 1), (2, 2)], &[(1, 1), (2, 1)]).unwrap();
    let w = build_inductive_window(&id, &tau, 5, 5).unwrap();
    for (s, t) in w.points() {
        assert_eq!(w.i_at((s, t)), w.i_at((s, 0)));
        assert_eq!(w.j_at((s, t)), w.j_at((0, t)));
    }
}

#[test]
fn flip_window_matches_rewriter() {
    let flip = fixtures::flip();
    let tau = TailSpec::alternating(&[(1, 2), (2, 2)], &[(1, 1), (2, 1), (2, 2)]).unwrap();
    let w = build_inductive_window(&flip, &tau, 4, 4).unwrap();
    w.check_cells(&flip).unwrap();
    let prefix: Vec<(usize, usize)> = (0..6).map(|n| tau.pair(n)).collect();
    for (s, t) in w.points() {
        assert_eq!(oracle_sigma(&flip, &prefix, s, t), (w.i_at((s, t)), w.j_at((s, t))), "({s},{t})");
    }
}

#[test]
fn random_windows_satisfy_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, t) in fixtures::all() {
        for _ in 0..10 {
            let pre: Vec<(usize, usize)> = (0..rng.gen_range(0..3)).map(|_| (rng.gen_range(1..=t.m()), rng.gen_range(1..=t.n()))).collect();
            let per: Vec<(usize, usize)> = (0..rng.gen_range(1..4)).map(|_| (rng.gen_range(1..=t.m()), rng.gen_range(1..=t.n()))).collect();
            let tau = TailSpec::alternating(&pre, &per).unwrap();
            let w = build_inductive_window(&t, &tau, 4, 3).unwrap();
            w.check_cells(&t).unwrap();
            let prefix: Vec<(usize, usize)> = (0..5).map(|n| tau.pair(n)).collect();
            let (s, tt) = (-rng.gen_range(0..=3), -rng.gen_range(0..=3));
            assert_eq!(oracle_sigma(&t, &prefix, s, tt), (w.i_at((s, tt)), w.j_at((s, tt))), "{name}");
        }
    }
}

#[test]
fn aperiodic_letters_give_trivial_window_symmetry() {
    let id = fixtures::identity2();
    let seq = [1, 1, 2, 1, 2, 2, 2, 1, 1];
    let pairs: Vec<(usize, usize)> = seq.iter().map(|&x| (x, x)).collect();
    let tau = TailSpec::alternating(&pairs, &[(1, 1)]).unwrap();
    let w = build_inductive_window(&id, &tau, 8, 8).unwrap();
    assert!(window_symmetry(&w, 4, None).is_empty());
}

#[test]
fn fixed_point_tail_is_fully_symmetric() {
    let t = fixtures::forward3();
    let tau = TailSpec::alternating(&[], &[(2, 2)]).unwrap();
    let h = tail_symmetry(&t, &tau, 6).unwrap();
    assert!(h.lattice.contains((1, -1)));
    assert!(h.lattice.contains((1, 0)));
}

#[test]
fn flip_tails_are_periodic() {
    let flip = fixtures::flip();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let pre: Vec<(usize, usize)> = (0..rng.gen_range(0..3)).map(|_| (rng.gen_range(1..=2), rng.gen_range(1..=2))).collect();
        let per: Vec<(usize, usize)> = (0..rng.gen_range(1..4)).map(|_| (rng.gen_range(1..=2), rng.gen_range(1..=2))).collect();
        let tau = TailSpec::alternating(&pre, &per).unwrap();
        let w = build_inductive_window(&flip, &tau, 10, 10).unwrap();
        assert!(!window_symmetry(&w, 5, None).is_empty(), "{pre:?} {per:?}");
    }
}

#[test]
fn psi_of_commuting_pair() {
    let t = fixtures::forward3();
    let (a, b) = (Angle::new(1, 5), Angle::new(2, 3));
    let rep = from_commuting_pair(&t, &blue("1121212"), &red("1222212"), a, b).unwrap();
    let psi = scalar_character(&rep).unwrap();
    assert_eq!(psi.eval((7, 0)).unwrap(), a.times(7));
    assert_eq!(psi.eval((0, 7)).unwrap(), b.times(7));
    let zero = from_commuting_pair(&t, &blue("1121212"), &red("1222212"), z(), z()).unwrap();
    assert!(scalar_character(&zero).unwrap().values.iter().all(|v| v.is_zero()));
}

/// Phase of a closed path walked red-first, read directly off the edges.
fn red_first_phase(rep: &GroupConstructionRep, (a, b): (i64, i64)) -> Angle {
    let mut p = (0, 0);
    let mut acc = Angle::ZERO;
    for _ in 0..b.abs() {
        if b > 0 {
            acc = acc + rep.beta_at(p);
            p.1 += 1;
        } else {
            p.1 -= 1;
            acc = acc - rep.beta_at(p);
        }
    }
    for _ in 0..a.abs() {
        if a > 0 {
            acc = acc + rep.alpha_at(p);
            p.0 += 1;
        } else {
            p.0 -= 1;
            acc = acc - rep.alpha_at(p);
        }
    }
    acc
}

fn random_angle<R: Rng>(rng: &mut R) -> Angle {
    let q = rng.gen_range(1..13);
    Angle::new(rng.gen_range(0..q), q)
}

#[test]
fn psi_is_path_independent_under_random_gauge() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = fixtures::forward3();
    let base = from_commuting_pair(&t, &blue("1121212"), &red("1222212"), Angle::new(1, 4), Angle::new(1, 6)).unwrap();
    for _ in 0..20 {
        let gamma: Vec<Angle> = (0..49).map(|_| random_angle(&mut rng)).collect();
        let rep = apply_gauge(&base, &gamma).unwrap();
        rep.validate().unwrap();
        let psi = scalar_character(&rep).unwrap();
        for &v in rep.kernel().basis() {
            assert_eq!(psi.eval(v).unwrap(), red_first_phase(&rep, v));
        }
        assert_eq!(psi, scalar_character(&base).unwrap());
    }
}

#[test]
fn normalize_examples() {
    let t = fixtures::forward3();
    let rep = from_commuting_pair(&t, &blue("11"), &red("11"), Angle::new(1, 3), z());
    // (11, 11) is not commuting under forward3; use identity for the ring
    assert!(rep.is_err());
    let id = fixtures::identity2();
    let ring = from_commuting_pair(&id, &blue("12"), &red("1"), z(), z()).unwrap();
    let same = normalize_scalars(&ring).unwrap();
    assert_eq!(same.rep, ring);
    assert!(same.gamma.iter().all(|g| g.is_zero()));
    let q = Angle::new(2, 5);
    let mut alpha = vec![Angle::ZERO; 2];
    alpha[ring.group.index_of((0, 0))] = q;
    let mut one_edge = ring.clone();
    one_edge.scalars = Scalars::PerEdge { alpha, beta: vec![Angle::ZERO; 2] };
    one_edge.validate().unwrap();
    let n = normalize_scalars(&one_edge).unwrap();
    assert_eq!(n.rep.constants(), Some((q.div(2), Angle::ZERO)));
    let gam = |p: (i64, i64)| n.gamma[ring.group.index_of(p)];
    for g in ring.elements().unwrap() {
        let next = (g.0 + 1, g.1);
        assert_eq!(one_edge.alpha_at(g) - gam(g) + gam(next), q.div(2));
        let up = (g.0, g.1 + 1);
        assert_eq!(one_edge.beta_at(g) - gam(g) + gam(up), Angle::ZERO);
    }
}

#[test]
fn decomposition_of_cycle_square() {
    let t = fixtures::forward3();
    let rep = cycle_squared(&t, &[(1, 1), (1, 2), (2, 1)], z(), z()).unwrap();
    let Decomposition::Summands { symmetry, summands } = decompose(&rep).unwrap() else { panic!() };
    assert_eq!(symmetry.index(), Some(3));
    assert_eq!(summands.len(), 3);
    let omegas: BTreeSet<Angle> = summands.iter().map(|s| s.psi.eval((1, 1)).unwrap()).collect();
    let expect: BTreeSet<Angle> = [0, 1, 2].iter().map(|&x| Angle::new(x, 3)).collect();
    assert_eq!(omegas, expect);
    for s in &summands {
        s.summand.validate().unwrap();
        let n = normalize_scalars(&s.summand).unwrap();
        assert!(is_irreducible(&n.rep));
    }
}

#[test]
fn decomposition_characters_match_numeric_extensions() {
    let t = fixtures::forward3();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..6 {
        let (a, b) = (random_angle(&mut rng), random_angle(&mut rng));
        let rep = cycle_squared(&t, &[(1, 1), (1, 2), (2, 1)], a, b).unwrap();
        let psi = scalar_character(&rep).unwrap();
        let Decomposition::Summands { symmetry, summands } = decompose(&rep).unwrap() else { panic!() };
        let d = 3 * psi.values.iter().fold(1, |acc, v| num_integer::lcm(acc, v.den()));
        let k_basis = rep.kernel().basis().to_vec();
        let targets: Vec<(i64, i64)> = psi.values.iter().map(|v| (v.num(), v.den())).collect();
        let expect = oracle_extensions(symmetry.basis(), &k_basis, &targets, d);
        let got: BTreeSet<(i64, i64)> = summands
            .iter()
            .map(|s| {
                let v1 = s.psi.values[0];
                let v2 = s.psi.values[1];
                (v1.num() * d / v1.den(), v2.num() * d / v2.den())
            })
            .collect();
        assert_eq!(got.len(), summands.len());
        assert_eq!(got, expect);
    }
}

#[test]
fn trivial_symmetry_gives_one_summand() {
    let t = fixtures::forward3();
    let rep = from_theta_cycle(&t, &[(1, 1), (1, 2), (2, 1)], z(), z()).unwrap();
    let Decomposition::Summands { summands, .. } = decompose(&rep).unwrap() else { panic!() };
    assert_eq!(summands.len(), 1);
}

fn c2_grid(alpha: Angle) -> GroupConstructionRep {
    from_commuting_pair(&fixtures::identity2(), &blue("12"), &red("21"), alpha, z()).unwrap()
}

/// Same rep with every coset shifted by c.
fn translated(rep: &GroupConstructionRep, c: (i64, i64)) -> GroupConstructionRep {
    let els = rep.elements().unwrap();
    let mut imap = vec![0; els.len()];
    let mut jmap = vec![0; els.len()];
    for &g in &els {
        let (i, j) = rep.labels((g.0 + c.0, g.1 + c.1));
        imap[rep.group.index_of(g)] = i;
        jmap[rep.group.index_of(g)] = j;
    }
    GroupConstructionRep::new(rep.theta.clone(), rep.group.clone(), Domain::Full { imap, jmap }, rep.scalars.clone()).unwrap()
}

#[test]
fn scalar_equivalence_on_c2_grid() {
    let base = c2_grid(z());
    assert!(equivalent_reps(&base, &base).unwrap());
    assert!(equivalent_reps(&c2_grid(Angle::new(1, 2)), &base).unwrap());
    assert!(!equivalent_reps(&c2_grid(Angle::new(1, 4)), &base).unwrap());
    let moved = translated(&base, (1, 0));
    moved.validate().unwrap();
    assert_ne!(moved, base);
    assert!(equivalent_reps(&moved, &base).unwrap());
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    let mut reps = Vec::new();
    for alpha in [z(), Angle::new(1, 2), Angle::new(1, 4), Angle::new(3, 4)] {
        let r = c2_grid(alpha);
        reps.push(translated(&r, (0, 1)));
        reps.push(r);
    }
    let eq = |a: &GroupConstructionRep, b: &GroupConstructionRep| equivalent_reps(a, b).unwrap();
    for a in &reps {
        assert!(eq(a, a));
        for b in &reps {
            assert_eq!(eq(a, b), eq(b, a));
            for c in &reps {
                if eq(a, b) && eq(b, c) {
                    assert!(eq(a, c));
                }
            }
        }
    }
}

#[test]
fn rep_json_round_trip() {
    let t = fixtures::forward3();
    let reps = vec![
        cycle_squared(&t, &[(1, 1), (1, 2), (2, 1)], Angle::new(1, 3), z()).unwrap(),
        build_3bi(&t, &blue("1"), &red("1"), Angle::new(1, 2)).unwrap(),
        build_ring_by_tail(&t, &blue("1121212"), &TailSpec::red("", "1222212").unwrap(), z()).unwrap(),
    ];
    for r in reps {
        assert_eq!(GroupConstructionRep::from_json(&r.to_json()).unwrap(), r);
    }
}
