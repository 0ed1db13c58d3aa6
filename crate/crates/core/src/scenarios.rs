//! Value generators for worked examples and wireless cooperation settings.

use crate::{Coalition, GameError, Result, TuGame};

/// Largest player count accepted by the wireless generators.
pub const MAX_SCENARIO_PLAYERS: usize = 12;

/// Three-player majority vote: singletons 0, pairs 2/3, grand coalition 1.
pub fn majority_voting_game(n: usize) -> Result<TuGame> {
    if n != 3 {
        return Err(GameError::UnsupportedSize(n));
    }
    TuGame::from_fn(3, |s| match s.len() {
        1 => 0.0,
        2 => 2.0 / 3.0,
        _ => 1.0,
    })
}

/// Claims on an estate.
#[derive(Debug, Clone, PartialEq)]
pub struct BankruptcyParams {
    pub claims: Vec<f64>,
    pub estate: f64,
}

/// `v(S) = max(0, estate - Σ_{i∉S} c_i)`.
pub fn bankruptcy_game(params: &BankruptcyParams) -> Result<TuGame> {
    let claims = &params.claims;
    if claims.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(GameError::InvalidParameter(
            "claims must be positive".into(),
        ));
    }
    if !(params.estate >= 0.0 && params.estate.is_finite()) {
        return Err(GameError::InvalidParameter(
            "estate must be nonnegative".into(),
        ));
    }
    let total: f64 = claims.iter().sum();
    if params.estate > total {
        return Err(GameError::EstateExceedsClaims {
            estate: params.estate,
            claims: total,
        });
    }
    let n = claims.len();
    TuGame::from_fn(n, |s| {
        let outside: f64 = Coalition::full(n)
            .difference(s)
            .members()
            .map(|i| claims[i])
            .sum();
        (params.estate - outside).max(0.0)
    })
}

/// Gaussian multiple-access channel with the complement acting as jammers.
#[derive(Debug, Clone, PartialEq)]
pub struct MacParams {
    /// Transmit power per user, watts.
    pub powers: Vec<f64>,
    /// Receiver noise variance, watts.
    pub noise: f64,
}

/// `v(S) = log2(1 + P_S / (σ² + P_{N\S}))` in bits/s/Hz.
pub fn gaussian_mac_game(params: &MacParams) -> Result<TuGame> {
    if params.powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
        return Err(GameError::InvalidParameter(
            "powers must be positive".into(),
        ));
    }
    if !(params.noise > 0.0 && params.noise.is_finite()) {
        return Err(GameError::InvalidParameter("noise must be positive".into()));
    }
    let n = params.powers.len();
    let total: f64 = params.powers.iter().sum();
    TuGame::from_fn(n, |s| {
        let inside: f64 = s.members().map(|i| params.powers[i]).sum();
        (1.0 + inside / (params.noise + total - inside)).log2()
    })
}

/// Virtual MIMO: single-antenna users pool their slot power once they have
/// exchanged data locally.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoParams {
    /// User positions, meters.
    pub positions: Vec<[f64; 2]>,
    /// Power budget per slot (and so per coalition), watts.
    pub budget: f64,
    /// Path-loss exponent of the exchange links.
    pub exponent: f64,
    /// Power needed to reach a partner at unit distance, watts.
    pub exchange_scale: f64,
    /// Receive antennas at the base station.
    pub rx_antennas: usize,
    /// Receiver noise variance, watts.
    pub noise: f64,
}

impl MimoParams {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GameError::InvalidParameter(m.into()));
        // Comparisons phrased so that NaN fails them.
        let positive = |x: f64| x > 0.0;
        let at_least = |x: f64, lo: f64| x >= lo;
        if !positive(self.budget) {
            return bad("budget must be positive");
        }
        if !at_least(self.exponent, 2.0) {
            return bad("path-loss exponent must be at least 2");
        }
        if self.rx_antennas == 0 {
            return bad("need at least one receive antenna");
        }
        if !positive(self.noise) || !at_least(self.exchange_scale, 0.0) {
            return bad("noise must be positive and exchange scale nonnegative");
        }
        Ok(())
    }

    /// `Σ_{i∈S} P0 · (max_{j∈S} d(i, j))^κ`.
    pub fn exchange_power(&self, s: Coalition) -> f64 {
        s.members()
            .map(|i| {
                let far = s
                    .members()
                    .map(|j| distance(self.positions[i], self.positions[j]))
                    .fold(0.0, f64::max);
                self.exchange_scale * far.powf(self.exponent)
            })
            .sum()
    }
}

pub(crate) fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `v(S) = min(|S|, M) · log2(1 + (P̃ - P_ex(S)) / σ²)`, or 0 once the
/// exchange power reaches the budget.
pub fn virtual_mimo_game(params: &MimoParams) -> Result<TuGame> {
    params.validate()?;
    let n = params.positions.len();
    if n > MAX_SCENARIO_PLAYERS {
        return Err(GameError::UnsupportedSize(n));
    }
    TuGame::from_fn(n, |s| {
        let spent = params.exchange_power(s);
        if spent >= params.budget {
            0.0
        } else {
            let streams = s.len().min(params.rx_antennas) as f64;
            streams * (1.0 + (params.budget - spent) / params.noise).log2()
        }
    })
}

/// Cooperative spectrum sensing among secondary users.
#[derive(Debug, Clone, PartialEq)]
pub struct CssParams {
    /// Miss probability per user.
    pub miss: Vec<f64>,
    /// False-alarm probability per user.
    pub false_alarm: Vec<f64>,
    /// Upper bound on the coalition false-alarm probability.
    pub alpha: f64,
    /// Weight of the false-alarm penalty.
    pub beta: f64,
}

impl CssParams {
    /// Identical users.
    pub fn uniform(n: usize, miss: f64, false_alarm: f64, alpha: f64, beta: f64) -> Self {
        CssParams {
            miss: vec![miss; n],
            false_alarm: vec![false_alarm; n],
            alpha,
            beta,
        }
    }

    /// OR-rule coalition miss probability `Π P_m,i`.
    pub fn coalition_miss(&self, s: Coalition) -> f64 {
        s.members().map(|i| self.miss[i]).product()
    }

    /// OR-rule coalition false-alarm probability `1 - Π (1 - P_f,i)`.
    pub fn coalition_false_alarm(&self, s: Coalition) -> f64 {
        1.0 - s
            .members()
            .map(|i| 1.0 - self.false_alarm[i])
            .product::<f64>()
    }
}

/// `v(S) = (1 - Q_m) - β (Q_f / α)²` when `Q_f <= α`, else 0.
///
/// Each member of `S` receives `v(S)` itself, so formation on this game
/// should use the Pareto order with the identity payoff rule.
pub fn css_sensing_game(params: &CssParams) -> Result<TuGame> {
    let n = params.miss.len();
    if params.false_alarm.len() != n {
        return Err(GameError::InvalidParameter(
            "miss and false-alarm lists differ in length".into(),
        ));
    }
    if n > MAX_SCENARIO_PLAYERS {
        return Err(GameError::UnsupportedSize(n));
    }
    let prob = |p: f64| p > 0.0 && p < 1.0;
    if !params
        .miss
        .iter()
        .chain(&params.false_alarm)
        .all(|&p| prob(p))
        || !prob(params.alpha)
    {
        return Err(GameError::InvalidParameter(
            "probabilities must lie in (0, 1)".into(),
        ));
    }
    if params.beta.is_nan() || params.beta < 0.0 {
        return Err(GameError::InvalidParameter(
            "beta must be nonnegative".into(),
        ));
    }
    if let Some(i) = params.false_alarm.iter().position(|&p| p > params.alpha) {
        return Err(GameError::InvalidParameter(format!(
            "user {i} alone violates the false-alarm bound"
        )));
    }
    TuGame::from_fn(n, |s| {
        let qf = params.coalition_false_alarm(s);
        if qf <= params.alpha {
            (1.0 - params.coalition_miss(s)) - params.beta * (qf / params.alpha).powi(2)
        } else {
            0.0
        }
    })
}
