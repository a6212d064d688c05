use proptest::prelude::*;
use twograph::fixtures;
use twograph::graphs::{closed_loop_violations, dilate, graph_of, parallel_violations, verify, RepGraph, VerifyMode};
use twograph::lattice::{Angle, CharOnSublattice, CharZ2, Sublattice};
use twograph::reps::{
    apply_gauge, build_3bi, decompose, equivalent_reps, from_commuting_pair, from_theta_cycle, is_irreducible,
    normalize_scalars, scalar_character, symmetry_group, Decomposition, Domain, GroupConstructionRep,
};
use twograph::search::iso_classes;
use twograph::semigroup::{
    decode_pair, multiply, refactor, tabulate_theta_prime, theta_prime_cycle, theta_prime_inv_raw, theta_prime_raw, Color,
    Letter, Theta, Word,
};

fn theta(ix: usize) -> Theta {
    fixtures::all()[ix % 6].1.clone()
}

fn word_of(t: &Theta, raw: &[(bool, usize)]) -> Word {
    Word(
        raw.iter()
            .map(|&(b, x)| if b { Letter::e(1 + x % t.m()) } else { Letter::f(1 + x % t.n()) })
            .collect(),
    )
}

fn angle() -> impl Strategy<Value = Angle> {
    (1i64..13).prop_flat_map(|q| (0..q).prop_map(move |p| Angle::new(p, q)))
}

/// Ring-by-ring rep from the `pick`-th theta'-cycle on (k, l) blocks.
fn cycle_rep(t: &Theta, k: usize, l: usize, pick: usize, a: Angle, b: Angle) -> GroupConstructionRep {
    let tab = tabulate_theta_prime(t, k, l, 1 << 16).unwrap();
    let cycles = tab.cycles();
    let cyc = &cycles[pick % cycles.len()];
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = cyc.iter().map(|&x| decode_pair(t.m(), t.n(), k, l, x)).collect();
    let u: Vec<usize> = pairs.iter().rev().flat_map(|p| p.0.clone()).collect();
    let v: Vec<usize> = pairs.iter().flat_map(|p| p.1.clone()).collect();
    from_commuting_pair(t, &Word::blue(&u), &Word::red(&v), a, b).unwrap()
}

fn translate(rep: &GroupConstructionRep, c: (i64, i64)) -> GroupConstructionRep {
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

fn coinvariant(g: &RepGraph) -> bool {
    g.edges().iter().all(|e| !g.vertices()[e.dst].original || g.vertices()[e.src].original)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refactor_round_trips(ix in 0usize..6, raw in prop::collection::vec((any::<bool>(), 0usize..3), 0..12), seed in any::<u64>()) {
        let t = theta(ix);
        let w = word_of(&t, &raw);
        let d = w.degree();
        let mut pat = w.pattern();
        let n = pat.len();
        if n > 1 {
            pat.rotate_left((seed as usize) % n);
            pat.swap(0, (seed as usize >> 8) % n);
        }
        let r = refactor(&t, &w, &pat).unwrap();
        prop_assert_eq!(r.pattern(), pat);
        prop_assert_eq!(r.degree(), d);
        prop_assert_eq!(refactor(&t, &r, &w.pattern()).unwrap(), w);
    }

    #[test]
    fn multiplication_is_associative_and_graded(ix in 0usize..6,
        a in prop::collection::vec((any::<bool>(), 0usize..3), 0..6),
        b in prop::collection::vec((any::<bool>(), 0usize..3), 0..6),
        c in prop::collection::vec((any::<bool>(), 0usize..3), 0..6)) {
        let t = theta(ix);
        let (a, b, c) = (word_of(&t, &a), word_of(&t, &b), word_of(&t, &c));
        let left = multiply(&t, &multiply(&t, &a, &b), &c);
        let right = multiply(&t, &a, &multiply(&t, &b, &c));
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.degree(), a.degree() + b.degree() + c.degree());
    }

    #[test]
    fn theta_prime_is_invertible(ix in 0usize..6, u in prop::collection::vec(0usize..3, 1..6), v in prop::collection::vec(0usize..3, 1..6)) {
        let t = theta(ix);
        let u: Vec<usize> = u.iter().map(|x| 1 + x % t.m()).collect();
        let v: Vec<usize> = v.iter().map(|x| 1 + x % t.n()).collect();
        let (u2, v2) = theta_prime_raw(&t, &u, &v);
        prop_assert_eq!(theta_prime_inv_raw(&t, &u2, &v2), (u, v));
    }

    #[test]
    fn hnf_is_canonical(a in -6i64..7, b in -6i64..7, c in -6i64..7, d in -6i64..7, x in -3i64..4, y in -3i64..4) {
        let l = Sublattice::from_gens(&[(a, b), (c, d)]);
        // unimodular change of generators and a redundant combination
        let l2 = Sublattice::from_gens(&[(a + x * c, b + x * d), (c, d), (y * a, y * b)]);
        prop_assert_eq!(&l, &l2);
        let det = (a * d - b * c).abs();
        if det != 0 {
            let g = num_integer::gcd(num_integer::gcd(a, b), num_integer::gcd(c, d));
            prop_assert_eq!(l.invariant_factors(), Some((g, det / g)));
            prop_assert_eq!(l.index(), Some(det as u64));
        }
    }

    #[test]
    fn characters_add_and_extend(x1 in angle(), y1 in angle(), x2 in angle(), y2 in angle(), a in 1i64..5, b in -4i64..5, c in 1i64..5, p in -9i64..10, q in -9i64..10) {
        let (f, g) = (CharZ2 { x: x1, y: y1 }, CharZ2 { x: x2, y: y2 });
        prop_assert_eq!((f + g).eval((p, q)), f.eval((p, q)) + g.eval((p, q)));
        let k = Sublattice::from_gens(&[(a, b), (0, c)]);
        let psi = f.restrict(&k);
        let phi = psi.extend();
        for &v in k.basis() {
            prop_assert_eq!(phi.eval(v), psi.eval(v).unwrap());
        }
        let line = Sublattice::from_gens(&[(a, b)]);
        let psi = CharOnSublattice::new(line.clone(), vec![x1]);
        prop_assert_eq!(psi.extend().eval((a, b)), x1);
    }

    #[test]
    fn ring_reps_satisfy_grid_and_loop_identities(ix in 0usize..6, k in 1usize..3, l in 1usize..3, pick in any::<usize>()) {
        let t = theta(ix);
        let rep = cycle_rep(&t, k, l, pick, Angle::ZERO, Angle::ZERO);
        rep.validate().unwrap();
        let (kk, ll) = match rep.kernel().basis() {
            [(a, _), (_, d)] => (*a, *d),
            _ => unreachable!(),
        };
        for (s, tt) in rep.elements().unwrap() {
            let (i, j) = rep.labels((s, tt));
            let lhs = Word(vec![Letter::f(rep.labels((s + 1, tt)).1), Letter::e(i)]);
            let rhs = Word(vec![Letter::e(rep.labels((s, tt + 1)).0), Letter::f(j)]);
            prop_assert_eq!(refactor(&t, &lhs, &[Color::Blue, Color::Red]).unwrap(), rhs);
            let u = rep.blue_word_from((s, tt), kk);
            let v = rep.red_word_from((s, tt), ll);
            prop_assert!(twograph::semigroup::commutes(&t, &u, &v).unwrap());
        }
    }

    #[test]
    fn decomposition_counts_and_irreducibility(ix in 0usize..6, k in 1usize..3, pick in any::<usize>(), a in angle(), b in angle()) {
        let t = theta(ix);
        let rep = cycle_rep(&t, k, k, pick, a, b);
        let h = symmetry_group(&rep).lattice;
        let psi = scalar_character(&rep).unwrap();
        let Decomposition::Summands { summands, .. } = decompose(&rep).unwrap() else { unreachable!() };
        let order = rep.group.order().unwrap() / h.index().unwrap();
        prop_assert_eq!(summands.len() as u64, order);
        let mut seen = std::collections::BTreeSet::new();
        for s in &summands {
            s.summand.validate().unwrap();
            prop_assert!(is_irreducible(&normalize_scalars(&s.summand).unwrap().rep));
            for &v in rep.kernel().basis() {
                prop_assert_eq!(s.psi.eval(v).unwrap(), psi.eval(v).unwrap());
            }
            prop_assert!(seen.insert(s.psi.values.clone()));
        }
    }

    #[test]
    fn three_bi_contains_cycle_shift(ix in 0usize..6, u in prop::collection::vec(0usize..3, 1..3), v in prop::collection::vec(0usize..3, 1..3)) {
        let t = theta(ix);
        let u = Word::blue(&u.iter().map(|x| 1 + x % t.m()).collect::<Vec<_>>());
        let v = Word::red(&v.iter().map(|x| 1 + x % t.n()).collect::<Vec<_>>());
        let p = theta_prime_cycle(&t, &u, &v, 1 << 16).unwrap().len() as i64;
        let rep = build_3bi(&t, &u, &v, Angle::ZERO).unwrap();
        prop_assert!(symmetry_group(&rep).lattice.contains((p * u.len() as i64, 0)));
        prop_assert!(!is_irreducible(&rep));
    }

    #[test]
    fn normalization_preserves_psi(ix in 0usize..6, k in 1usize..3, pick in any::<usize>(), a in angle(), b in angle(), gam in prop::collection::vec(angle(), 64)) {
        let t = theta(ix);
        let rep = cycle_rep(&t, k, k, pick, a, b);
        let n = rep.elements().unwrap().len();
        let gauged = apply_gauge(&rep, &gam[..n.min(64)].iter().cycle().take(n).copied().collect::<Vec<_>>()).unwrap();
        gauged.validate().unwrap();
        let before = scalar_character(&gauged).unwrap();
        let out = normalize_scalars(&gauged).unwrap();
        prop_assert!(out.rep.constants().is_some());
        prop_assert_eq!(scalar_character(&out.rep).unwrap(), before.clone());
        prop_assert_eq!(before, scalar_character(&rep).unwrap());
        prop_assert!(equivalent_reps(&out.rep, &rep).unwrap());
    }

    #[test]
    fn equivalence_ignores_relabeling(ix in 0usize..6, k in 1usize..3, pick in any::<usize>(), a in angle(), s in -3i64..4, q in -3i64..4) {
        let t = theta(ix);
        let rep = cycle_rep(&t, k, k, pick, a, Angle::ZERO);
        let moved = translate(&rep, (s, q));
        moved.validate().unwrap();
        prop_assert!(equivalent_reps(&rep, &moved).unwrap());
        prop_assert!(equivalent_reps(&moved, &rep).unwrap());
    }

    #[test]
    fn rep_json_round_trip(ix in 0usize..6, k in 1usize..3, pick in any::<usize>(), a in angle(), b in angle()) {
        let rep = cycle_rep(&theta(ix), k, k, pick, a, b);
        prop_assert_eq!(GroupConstructionRep::from_json(&rep.to_json()).unwrap(), rep);
        let t = theta(ix);
        prop_assert_eq!(Theta::from_toml_str(&t.to_toml_string()).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dilation_properties(ix in 0usize..6, pick in any::<usize>(), seed in any::<u64>(), depth in 2usize..5) {
        let t = theta(ix);
        let cycles = t.cycles();
        let cycle = &cycles[pick % cycles.len()];
        let g = graph_of(&from_theta_cycle(&t, cycle, Angle::ZERO, Angle::ZERO).unwrap(), None);
        let d = dilate(&t, &g, depth, None).unwrap().graph;
        prop_assert!(coinvariant(&d));
        prop_assert!(verify(&t, &d, VerifyMode::StarInterior).passed());
        prop_assert_eq!(d.compress(), g.clone());
        prop_assert!(parallel_violations(&d).is_empty());
        prop_assert!(closed_loop_violations(&t, &d).unwrap().is_empty());
        let shuffled = dilate(&t, &g, depth, Some(seed)).unwrap().graph;
        prop_assert_eq!(&shuffled, &d);
        prop_assert_eq!(RepGraph::from_json(&d.to_json()).unwrap(), d);
    }
}

#[test]
fn orbit_sizes_partition_all_permutations() {
    for (m, n, swap) in [(1, 1, false), (1, 2, true), (2, 2, true), (2, 2, false), (2, 3, false), (1, 3, false)] {
        let r = iso_classes(m, n, swap, None).unwrap();
        let total: usize = (1..=m * n).product();
        assert_eq!(r.orbit_sizes.iter().sum::<usize>(), total, "({m},{n})");
    }
}
