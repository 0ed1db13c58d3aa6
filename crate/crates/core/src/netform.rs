//! Myopic best-response formation of an uplink relay tree.
//!
//! Relays pick a parent (the base station or another relay). A hop of length
//! `d` succeeds with probability `exp(-ν (d / d0)²)`; a path succeeds with the
//! product of its hops. Relay `i` earns
//!
//! ```text
//! u_i = T_i · PSR(i → BS) + ρ · (T_i - t_i) - c · links_i
//! ```
//!
//! where `t_i` is its own traffic, `T_i` the traffic of its whole subtree and
//! `links_i` its uplink plus accepted children. A relay with `max_links`
//! children accepts a newcomer only by dropping its lowest-traffic child back
//! to the base station, and only when that raises its own utility.

use crate::scenarios::distance;
use crate::{GameError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parent {
    BaseStation,
    Relay(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetformParams {
    /// Hop length `d0` at which success falls to `exp(-ν)`, meters.
    pub hop_scale: f64,
    /// Decay `ν`.
    pub decay: f64,
    /// Utility cost `c` per maintained link.
    pub link_cost: f64,
    /// Reward `ρ` per unit of relayed traffic.
    pub child_reward: f64,
    /// Most children a relay accepts.
    pub max_links: usize,
}

impl Default for NetformParams {
    fn default() -> Self {
        NetformParams {
            hop_scale: 250.0,
            decay: 1.0,
            link_cost: 0.01,
            child_reward: 0.05,
            max_links: 3,
        }
    }
}

impl NetformParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.hop_scale > 0.0
            && self.decay > 0.0
            && self.link_cost >= 0.0
            && self.child_reward >= 0.0
            && self.max_links >= 1
            && self.hop_scale.is_finite()
            && self.decay.is_finite()
            && self.link_cost.is_finite()
            && self.child_reward.is_finite();
        if ok {
            Ok(())
        } else {
            Err(GameError::InvalidParameter(format!("{self:?}")))
        }
    }

    /// Success probability of one hop of `d` meters.
    pub fn hop_success(&self, d: f64) -> f64 {
        (-(d / self.hop_scale).powi(2) * self.decay).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    positions: Vec<[f64; 2]>,
    base_station: [f64; 2],
    parents: Vec<Parent>,
    traffic: Vec<f64>,
}

impl NetworkState {
    /// Every relay connected straight to the base station.
    pub fn star(
        positions: Vec<[f64; 2]>,
        base_station: [f64; 2],
        traffic: Vec<f64>,
    ) -> Result<Self> {
        let parents = vec![Parent::BaseStation; positions.len()];
        Self::with_parents(positions, base_station, traffic, parents)
    }

    pub fn with_parents(
        positions: Vec<[f64; 2]>,
        base_station: [f64; 2],
        traffic: Vec<f64>,
        parents: Vec<Parent>,
    ) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(GameError::InvalidParameter(
                "need at least one relay".into(),
            ));
        }
        if traffic.len() != n || parents.len() != n {
            return Err(GameError::InvalidParameter(
                "positions, traffic and parents differ in length".into(),
            ));
        }
        if traffic.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(GameError::InvalidParameter(
                "traffic must be nonnegative".into(),
            ));
        }
        let all = positions.iter().chain(std::iter::once(&base_station));
        if all.clone().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(GameError::InvalidParameter("non-finite position".into()));
        }
        for i in 0..n {
            if positions[i] == base_station || positions[..i].contains(&positions[i]) {
                return Err(GameError::InvalidParameter(format!(
                    "relay {i} shares its position"
                )));
            }
            if let Parent::Relay(j) = parents[i] {
                if j >= n || j == i {
                    return Err(GameError::InvalidParameter(format!(
                        "relay {i} has invalid parent {j}"
                    )));
                }
            }
        }
        let state = NetworkState {
            positions,
            base_station,
            parents,
            traffic,
        };
        state.check_forest()?;
        Ok(state)
    }

    pub fn relay_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn base_station(&self) -> [f64; 2] {
        self.base_station
    }

    pub fn parents(&self) -> &[Parent] {
        &self.parents
    }

    pub fn traffic(&self) -> &[f64] {
        &self.traffic
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.relay_count())
            .filter(|&k| self.parents[k] == Parent::Relay(i))
            .collect()
    }

    /// Fails if following parent pointers from some relay never reaches the base station.
    pub fn check_forest(&self) -> Result<()> {
        let n = self.relay_count();
        for start in 0..n {
            let mut at = start;
            for _ in 0..=n {
                match self.parents[at] {
                    Parent::BaseStation => break,
                    Parent::Relay(j) => {
                        if j == start {
                            return Err(GameError::CycleDetected(start));
                        }
                        at = j;
                    }
                }
            }
            if let Parent::Relay(_) = self.parents[at] {
                return Err(GameError::CycleDetected(start));
            }
        }
        Ok(())
    }

    /// Whether `node` lies in the subtree rooted at `root` (including `root`).
    pub fn in_subtree(&self, node: usize, root: usize) -> bool {
        let mut at = node;
        loop {
            if at == root {
                return true;
            }
            match self.parents[at] {
                Parent::BaseStation => return false,
                Parent::Relay(j) => at = j,
            }
        }
    }

    /// Own traffic plus everything relayed through `i`.
    pub fn subtree_traffic(&self, i: usize) -> f64 {
        (0..self.relay_count())
            .filter(|&k| self.in_subtree(k, i))
            .map(|k| self.traffic[k])
            .sum()
    }

    fn parent_position(&self, i: usize) -> [f64; 2] {
        match self.parents[i] {
            Parent::BaseStation => self.base_station,
            Parent::Relay(j) => self.positions[j],
        }
    }

    /// Product of hop successes from `i` up to the base station.
    pub fn path_success(&self, i: usize, params: &NetformParams) -> f64 {
        let mut at = i;
        let mut psr = 1.0;
        loop {
            psr *= params.hop_success(distance(self.positions[at], self.parent_position(at)));
            match self.parents[at] {
                Parent::BaseStation => return psr,
                Parent::Relay(j) => at = j,
            }
        }
    }

    pub fn distance_to_bs(&self, i: usize) -> f64 {
        distance(self.positions[i], self.base_station)
    }
}

pub fn relay_utility(state: &NetworkState, params: &NetformParams, relay: usize) -> Result<f64> {
    state.check_forest()?;
    if relay >= state.relay_count() {
        return Err(GameError::InvalidParameter(format!("no relay {relay}")));
    }
    Ok(utility_unchecked(state, params, relay))
}

fn utility_unchecked(state: &NetworkState, params: &NetformParams, relay: usize) -> f64 {
    let total = state.subtree_traffic(relay);
    let relayed = total - state.traffic[relay];
    let links = 1 + state.children(relay).len();
    total * state.path_success(relay, params) + params.child_reward * relayed
        - params.link_cost * links as f64
}

const IMPROVEMENT_TOL: f64 = 1e-12;

fn improves(new: f64, old: f64) -> bool {
    new > old + IMPROVEMENT_TOL * old.abs().max(1.0)
}

/// State after `relay` asks to connect to `target`, or `None` if the target refuses.
fn attach(
    state: &NetworkState,
    params: &NetformParams,
    relay: usize,
    target: Parent,
) -> Option<NetworkState> {
    let mut next = state.clone();
    next.parents[relay] = target;
    let Parent::Relay(j) = target else {
        return Some(next);
    };
    let children = state.children(j);
    if children.len() < params.max_links {
        return Some(next);
    }
    let worst = children
        .iter()
        .copied()
        .min_by(|&a, &b| {
            state
                .subtree_traffic(a)
                .total_cmp(&state.subtree_traffic(b))
                .then(a.cmp(&b))
        })
        .expect("full relay has children");
    next.parents[worst] = Parent::BaseStation;
    let before = utility_unchecked(state, params, j);
    let after = utility_unchecked(&next, params, j);
    improves(after, before).then_some(next)
}

/// Feasible alternatives to `relay`'s current parent, base station first.
fn deviations<'a>(
    state: &'a NetworkState,
    params: &'a NetformParams,
    relay: usize,
) -> impl Iterator<Item = NetworkState> + 'a {
    let current = state.parents[relay];
    std::iter::once(Parent::BaseStation)
        .chain((0..state.relay_count()).map(Parent::Relay))
        .filter(move |&p| p != current)
        .filter(move |&p| match p {
            Parent::BaseStation => true,
            Parent::Relay(j) => !state.in_subtree(j, relay),
        })
        .filter_map(move |p| attach(state, params, relay, p))
}

fn best_response(
    state: &NetworkState,
    params: &NetformParams,
    relay: usize,
) -> Option<NetworkState> {
    let mut best_utility = utility_unchecked(state, params, relay);
    let mut best = None;
    for candidate in deviations(state, params, relay) {
        let u = utility_unchecked(&candidate, params, relay);
        if improves(u, best_utility) {
            best_utility = u;
            best = Some(candidate);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetformOutcome {
    pub state: NetworkState,
    /// Rounds played, including the final round without changes.
    pub rounds: usize,
    pub converged: bool,
}

/// Relays sorted farthest-from-BS first, ties by index.
pub fn priority_order(state: &NetworkState) -> Vec<usize> {
    let mut order: Vec<usize> = (0..state.relay_count()).collect();
    order.sort_by(|&a, &b| {
        state
            .distance_to_bs(b)
            .total_cmp(&state.distance_to_bs(a))
            .then(a.cmp(&b))
    });
    order
}

/// Prioritised round-robin best response from the star topology.
///
/// Stops after a round without changes, or after `100 · n` rounds with
/// `converged = false`.
pub fn run_network_formation(
    positions: Vec<[f64; 2]>,
    base_station: [f64; 2],
    traffic: Vec<f64>,
    params: &NetformParams,
) -> Result<NetformOutcome> {
    params.validate()?;
    let mut state = NetworkState::star(positions, base_station, traffic)?;
    let order = priority_order(&state);
    let max_rounds = 100 * state.relay_count();
    let mut rounds = 0;
    while rounds < max_rounds {
        rounds += 1;
        let mut changed = false;
        for &i in &order {
            if let Some(next) = best_response(&state, params, i) {
                next.check_forest()?;
                state = next;
                changed = true;
            }
        }
        if !changed {
            return Ok(NetformOutcome {
                state,
                rounds,
                converged: true,
            });
        }
    }
    Ok(NetformOutcome {
        state,
        rounds,
        converged: false,
    })
}

/// No relay gains by unilaterally switching parent.
pub fn nash_network_check(state: &NetworkState, params: &NetformParams) -> Result<bool> {
    params.validate()?;
    state.check_forest()?;
    Ok((0..state.relay_count()).all(|i| best_response(state, params, i).is_none()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NetformParams {
        NetformParams {
            hop_scale: 100.0,
            decay: 1.0,
            link_cost: 0.0,
            child_reward: 0.0,
            max_links: 3,
        }
    }

    #[test]
    fn single_hop_utility() {
        let s = NetworkState::star(vec![[100.0, 0.0]], [0.0, 0.0], vec![1.0]).unwrap();
        let u = relay_utility(&s, &params(), 0).unwrap();
        assert!((u - (-1f64).exp()).abs() < 1e-12);
        let idle = NetworkState::star(vec![[100.0, 0.0]], [0.0, 0.0], vec![0.0]).unwrap();
        assert_eq!(relay_utility(&idle, &params(), 0).unwrap(), 0.0);
    }

    #[test]
    fn two_hop_product() {
        let p = params();
        // Hop lengths chosen so successes are 0.9 and 0.8.
        let d1 = 100.0 * (-(0.8f64).ln()).sqrt();
        let d2 = 100.0 * (-(0.9f64).ln()).sqrt();
        let s = NetworkState::with_parents(
            vec![[d1, 0.0], [d1 + d2, 0.0]],
            [0.0, 0.0],
            vec![1.0, 1.0],
            vec![Parent::BaseStation, Parent::Relay(0)],
        )
        .unwrap();
        assert!((s.path_success(1, &p) - 0.72).abs() < 1e-12);
    }

    #[test]
    fn cycles_are_rejected() {
        let r = NetworkState::with_parents(
            vec![[1.0, 0.0], [2.0, 0.0]],
            [0.0, 0.0],
            vec![1.0, 1.0],
            vec![Parent::Relay(1), Parent::Relay(0)],
        );
        assert!(matches!(r, Err(GameError::CycleDetected(_))));
    }

    #[test]
    fn lone_relay_stays_on_bs() {
        let out =
            run_network_formation(vec![[50.0, 0.0]], [0.0, 0.0], vec![1.0], &params()).unwrap();
        assert!(out.converged);
        assert_eq!(out.rounds, 1);
        assert_eq!(out.state.parents(), &[Parent::BaseStation]);
        assert!(nash_network_check(&out.state, &params()).unwrap());
    }

    #[test]
    fn far_relay_uses_midpoint() {
        let p = params();
        let pos = vec![[100.0, 0.0], [200.0, 0.0]];
        let out = run_network_formation(pos.clone(), [0.0, 0.0], vec![1.0, 1.0], &p).unwrap();
        assert!(out.converged);
        assert_eq!(
            out.state.parents(),
            &[Parent::BaseStation, Parent::Relay(0)]
        );
        assert!(nash_network_check(&out.state, &p).unwrap());

        let direct = NetworkState::star(pos, [0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!((direct.path_success(1, &p) - (-4f64).exp()).abs() < 1e-12);
        assert!((out.state.path_success(1, &p) - (-2f64).exp()).abs() < 1e-12);
        assert!(!nash_network_check(&direct, &p).unwrap());
    }

    #[test]
    fn full_relay_replaces_weakest_child() {
        let p = NetformParams {
            max_links: 1,
            child_reward: 0.1,
            ..params()
        };
        // Relay 0 near the BS already carries relay 1 (traffic 1); relay 2
        // (traffic 5) asks to join and displaces it.
        let s = NetworkState::with_parents(
            vec![[100.0, 0.0], [200.0, 0.0], [200.0, 10.0]],
            [0.0, 0.0],
            vec![1.0, 1.0, 5.0],
            vec![Parent::BaseStation, Parent::Relay(0), Parent::BaseStation],
        )
        .unwrap();
        let next = attach(&s, &p, 2, Parent::Relay(0)).unwrap();
        assert_eq!(next.parents()[1], Parent::BaseStation);
        assert_eq!(next.parents()[2], Parent::Relay(0));
        // The weaker relay cannot displace the stronger one.
        assert!(attach(&next, &p, 1, Parent::Relay(0)).is_none());
    }

    #[test]
    fn layout_validation() {
        assert!(NetworkState::star(vec![], [0.0, 0.0], vec![]).is_err());
        assert!(
            NetworkState::star(vec![[1.0, 1.0], [1.0, 1.0]], [0.0, 0.0], vec![1.0, 1.0]).is_err()
        );
        assert!(NetformParams {
            hop_scale: 0.0,
            ..params()
        }
        .validate()
        .is_err());
    }
}
