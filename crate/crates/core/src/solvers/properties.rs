use crate::{Coalition, Tolerance, TuGame};

/// Outcome of a pairwise property check. `witness` is the first violating
/// pair `(S1, S2)` in ascending mask order, present iff the property fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropertyReport {
    pub holds: bool,
    pub witness: Option<(Coalition, Coalition)>,
}

impl PropertyReport {
    fn holds() -> Self {
        PropertyReport {
            holds: true,
            witness: None,
        }
    }

    fn violated(s1: Coalition, s2: Coalition) -> Self {
        PropertyReport {
            holds: false,
            witness: Some((s1, s2)),
        }
    }
}

/// `v(S1 ∪ S2) >= v(S1) + v(S2)` for all disjoint nonempty `S1`, `S2`.
pub fn check_superadditive(game: &TuGame) -> PropertyReport {
    check_superadditive_with(game, Tolerance::DEFAULT)
}

pub fn check_superadditive_with(game: &TuGame, tol: Tolerance) -> PropertyReport {
    let full = game.grand().mask();
    for s1 in 1..=full {
        let rest = full & !s1;
        if rest == 0 {
            continue;
        }
        // Ascending walk over the nonempty submasks of `rest`.
        let mut s2 = rest & rest.wrapping_neg();
        loop {
            let a = Coalition::from_mask(s1);
            let b = Coalition::from_mask(s2);
            let lhs = game.value(a.union(b));
            if !tol.geq(lhs, game.value(a) + game.value(b)) {
                return PropertyReport::violated(a, b);
            }
            if s2 == rest {
                break;
            }
            s2 = ((s2 | !rest).wrapping_add(1)) & rest;
        }
    }
    PropertyReport::holds()
}

/// `v(S1) + v(S2) <= v(S1 ∪ S2) + v(S1 ∩ S2)` for all `S1`, `S2`.
pub fn check_convex(game: &TuGame) -> PropertyReport {
    check_convex_with(game, Tolerance::DEFAULT)
}

pub fn check_convex_with(game: &TuGame, tol: Tolerance) -> PropertyReport {
    let violates = |a: Coalition, b: Coalition| {
        let lhs = game.value(a) + game.value(b);
        let rhs = game.value(a.union(b)) + game.value(a.intersection(b));
        !tol.geq(rhs, lhs)
    };
    // Supermodularity is equivalent to the local condition on every S and
    // pair i, j outside S; that scan is O(n² 2^n) instead of O(4^n).
    let n = game.n();
    let mut local_ok = true;
    'scan: for s in game.coalitions() {
        for i in (0..n).filter(|&i| !s.contains(i)) {
            for j in (i + 1..n).filter(|&j| !s.contains(j)) {
                if violates(s.with(i), s.with(j)) {
                    local_ok = false;
                    break 'scan;
                }
            }
        }
    }
    if local_ok {
        return PropertyReport::holds();
    }
    let full = game.grand().mask();
    for m1 in 0..=full {
        for m2 in 0..=full {
            let (a, b) = (Coalition::from_mask(m1), Coalition::from_mask(m2));
            if violates(a, b) {
                return PropertyReport::violated(a, b);
            }
        }
    }
    // The local scan found a violating pair, so the full scan cannot miss it.
    unreachable!("local supermodularity violation without a global witness")
}
