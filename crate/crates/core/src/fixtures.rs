//! The permutations used as running examples.

use crate::semigroup::Theta;

/// theta = ((1,1),(1,2),(2,1)) on 2x2: e1f1 = f2e1, e1f2 = f1e2, e2f1 = f1e1, e2f2 = f2e2.
pub fn forward3() -> Theta {
    Theta::from_cycles(2, 2, &[&[(1, 1), (1, 2), (2, 1)]]).expect("fixture")
}

/// theta = ((1,1),(2,1),(1,2)) on 2x2.
pub fn reverse3() -> Theta {
    Theta::from_cycles(2, 2, &[&[(1, 1), (2, 1), (1, 2)]]).expect("fixture")
}

/// theta(i,j) = (j,i) on 2x2: e_i f_j = f_i e_j.
pub fn flip() -> Theta {
    flip_n(2)
}

pub fn flip_n(n: usize) -> Theta {
    let raw: Vec<[usize; 4]> = (1..=n).flat_map(|i| (1..=n).map(move |j| [i, j, j, i])).collect();
    crate::semigroup::validate_theta(&raw, n, n).expect("fixture")
}

pub fn identity2() -> Theta {
    Theta::identity(2, 2)
}

/// ((1,1),(1,3))((1,2),(2,1)) on 3x3.
pub fn two_cycles33() -> Theta {
    Theta::from_cycles(3, 3, &[&[(1, 1), (1, 3)], &[(1, 2), (2, 1)]]).expect("fixture")
}

/// ((1,2),(2,1)) on 3x3, all other pairs commute.
pub fn swap33() -> Theta {
    Theta::from_cycles(3, 3, &[&[(1, 2), (2, 1)]]).expect("fixture")
}

pub fn all() -> Vec<(&'static str, Theta)> {
    vec![
        ("forward3", forward3()),
        ("reverse3", reverse3()),
        ("flip", flip()),
        ("identity2", identity2()),
        ("two-cycles33", two_cycles33()),
        ("swap33", swap33()),
    ]
}

pub fn by_name(name: &str) -> Option<Theta> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, t)| t)
}
