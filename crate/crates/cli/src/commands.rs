//! Command dispatch and report payloads.

use std::fmt::Write as _;

use coopgame::formation::count_partitions;
use coopgame::formation::{
    dc_candidate, max_welfare_partition, run_merge_split, social_welfare, ComparisonOrder,
    Operation, PayoffRule,
};
use coopgame::graph::{connected_components, myerson_value};
use coopgame::netform::{
    nash_network_check, relay_utility, run_network_formation, NetformParams, NetworkState, Parent,
};
use coopgame::scenarios::{
    bankruptcy_game, css_sensing_game, gaussian_mac_game, majority_voting_game, virtual_mimo_game,
    BankruptcyParams, CssParams, MacParams, MimoParams,
};
use coopgame::solvers::{
    check_balanced, check_convex_with, check_superadditive_with, core_nonempty, kernel_check_with,
    nucleolus_detailed, shapley_exact, shapley_sampled, PropertyReport,
};
use coopgame::{
    is_imputation_with, Allocation, Coalition, GameError, Partition, Tolerance, TuGame,
};
use serde::{Deserialize, Serialize};

use crate::files::{self, NetworkFile};
use crate::render::{self, fmt_g};
use crate::{
    CheckCmd, Cli, CliError, Command, FormCmd, InitArg, NetformCmd, OrderArg, OrderArgs,
    PartitionsCmd, PayoffArg, ScenarioCmd, SolveCmd,
};

/// Machine-readable envelope printed by `--json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<R> {
    pub command: String,
    pub result: R,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_solves: Option<usize>,
}

impl Diagnostics {
    fn tol(t: Tolerance) -> Self {
        Diagnostics {
            tolerance: Some(t.0),
            ..Default::default()
        }
    }

    fn human(&self) -> String {
        let mut parts = Vec::new();
        if let Some(t) = self.tolerance {
            parts.push(format!("tolerance {}", fmt_g(t)));
        }
        if let Some(k) = self.lp_solves {
            parts.push(format!("LP solves {k}"));
        }
        if let Some(k) = self.lp_iterations {
            parts.push(format!("LP pivots {k}"));
        }
        if parts.is_empty() {
            String::new()
        } else {
            parts.join(", ") + "\n"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub allocation: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NucleolusReport {
    pub allocation: Vec<f64>,
    /// Excess level fixed at each stage.
    pub stage_levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreReport {
    pub nonempty: bool,
    pub point: Option<Vec<f64>>,
    /// Minimum of `Σ x_i` subject to `x(S) >= v(S)` for all `S`.
    pub min_total: f64,
    pub grand_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MyersonReport {
    pub allocation: Vec<f64>,
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub holds: bool,
    pub witness: Option<[Vec<usize>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub coalition: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedReport {
    pub balanced: bool,
    pub max_weighted_value: f64,
    pub grand_value: f64,
    /// Balanced collection with weighted worth above `v(N)`, when unbalanced.
    pub certificate: Option<Vec<WeightEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldsReport {
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub operation: String,
    pub before: Vec<Vec<usize>>,
    pub after: Vec<Vec<usize>>,
    pub welfare: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeSplitReport {
    pub order: String,
    pub initial: Vec<Vec<usize>>,
    pub steps: Vec<StepReport>,
    #[serde(rename = "final")]
    pub final_partition: Vec<Vec<usize>>,
    pub welfare: f64,
    /// Per-player payoffs under the Pareto division rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcReport {
    pub order: String,
    /// Common outcome of every merge-and-split run, if there is one.
    pub dc_partition: Option<Vec<Vec<usize>>>,
    pub max_welfare: f64,
    pub max_welfare_partition: Vec<Vec<usize>>,
    pub dc_maximizes_welfare: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetformRunReport {
    pub converged: bool,
    pub rounds: usize,
    pub nash: bool,
    pub utilities: Vec<f64>,
    pub path_success: Vec<f64>,
    pub network: NetworkFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetformCheckReport {
    pub nash: bool,
    pub utilities: Vec<f64>,
    pub path_success: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub count: u64,
}

fn members(c: Coalition) -> Vec<usize> {
    c.members().collect()
}

fn block_lists(bs: &[Coalition]) -> Vec<Vec<usize>> {
    bs.iter().map(|&b| members(b)).collect()
}

/// Renders either the JSON envelope or the human text.
struct Emit {
    json: bool,
    command: String,
}

impl Emit {
    fn out<R: Serialize>(&self, result: R, diagnostics: Diagnostics, human: String) -> String {
        if self.json {
            let report = SolveReport {
                command: self.command.clone(),
                result,
                diagnostics,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
            s.push('\n');
            s
        } else {
            format!("{}\n{human}{}", self.command, diagnostics.human())
        }
    }
}

fn command_name(cmd: &Command) -> String {
    let (a, b) = match cmd {
        Command::Solve(c) => (
            "solve",
            match c {
                SolveCmd::Shapley { .. } => "shapley",
                SolveCmd::Nucleolus { .. } => "nucleolus",
                SolveCmd::Core { .. } => "core",
                SolveCmd::Myerson { .. } => "myerson",
            },
        ),
        Command::Check(c) => (
            "check",
            match c {
                CheckCmd::Superadditive { .. } => "superadditive",
                CheckCmd::Convex { .. } => "convex",
                CheckCmd::Balanced { .. } => "balanced",
                CheckCmd::Imputation(_) => "imputation",
                CheckCmd::Kernel(_) => "kernel",
            },
        ),
        Command::Form(c) => (
            "form",
            match c {
                FormCmd::MergeSplit { .. } => "merge-split",
                FormCmd::DcCheck { .. } => "dc-check",
            },
        ),
        Command::Netform(c) => (
            "netform",
            match c {
                NetformCmd::Run { .. } => "run",
                NetformCmd::Check { .. } => "check",
            },
        ),
        Command::Scenario(_) => ("scenario", ""),
        Command::Partitions(_) => ("partitions", "count"),
    };
    format!("{a} {b}").trim_end().to_string()
}

pub fn execute(cli: &Cli, tol: Option<Tolerance>) -> Result<String, CliError> {
    let emit = Emit {
        json: cli.json,
        command: command_name(&cli.command),
    };
    match &cli.command {
        Command::Solve(c) => solve(&emit, c),
        Command::Check(c) => check(&emit, c, tol),
        Command::Form(c) => form(&emit, c),
        Command::Netform(c) => netform(&emit, c),
        Command::Scenario(c) => scenario(c),
        Command::Partitions(PartitionsCmd::Count { n }) => {
            let count = count_partitions(*n)?;
            let human = format!("partitions of {n} players: {count}\n");
            Ok(emit.out(CountReport { n: *n, count }, Diagnostics::default(), human))
        }
    }
}

fn solve(emit: &Emit, cmd: &SolveCmd) -> Result<String, CliError> {
    match cmd {
        SolveCmd::Shapley {
            game,
            samples,
            seed,
        } => {
            let g = files::load_game(game)?;
            let (x, samples, seed) = match samples {
                None => (shapley_exact(&g), None, None),
                Some(k) => (shapley_sampled(&g, *k, *seed)?, Some(*k), Some(*seed)),
            };
            let human = render::allocation_table(x.payoffs());
            let result = AllocationResult {
                allocation: x.into_inner(),
                samples,
                seed,
            };
            Ok(emit.out(result, Diagnostics::tol(Tolerance::DEFAULT), human))
        }
        SolveCmd::Nucleolus { game } => {
            let g = files::load_game(game)?;
            let r = nucleolus_detailed(&g)?;
            let human = render::allocation_table(r.allocation.payoffs());
            let diagnostics = Diagnostics {
                tolerance: Some(Tolerance::LP.0),
                lp_iterations: Some(r.lp_iterations),
                lp_solves: Some(r.lp_solves),
            };
            let result = NucleolusReport {
                allocation: r.allocation.into_inner(),
                stage_levels: r.stage_levels,
            };
            Ok(emit.out(result, diagnostics, human))
        }
        SolveCmd::Core { game } => {
            let g = files::load_game(game)?;
            let r = core_nonempty(&g)?;
            let mut human = format!("core nonempty: {}\n", render::yes_no(r.nonempty));
            if let Some(x) = &r.sample_point {
                human.push_str(&render::allocation_table(x.payoffs()));
            }
            let diagnostics = Diagnostics {
                tolerance: Some(Tolerance::LP.0),
                lp_iterations: Some(r.lp_iterations),
                lp_solves: None,
            };
            let result = CoreReport {
                nonempty: r.nonempty,
                point: r.sample_point.map(Allocation::into_inner),
                min_total: r.lp_value,
                grand_value: g.grand_value(),
            };
            Ok(emit.out(result, diagnostics, human))
        }
        SolveCmd::Myerson { game, graph } => {
            let g = files::load_game(game)?;
            let graph = files::load_graph(graph)?;
            let x = myerson_value(&g, &graph)?;
            let comps = connected_components(g.grand(), &graph);
            let human = format!(
                "components: {}\n{}",
                render::blocks(&comps),
                render::allocation_table(x.payoffs())
            );
            let result = MyersonReport {
                allocation: x.into_inner(),
                components: block_lists(&comps),
            };
            Ok(emit.out(result, Diagnostics::tol(Tolerance::DEFAULT), human))
        }
    }
}

fn property(emit: &Emit, r: PropertyReport, tol: Tolerance) -> String {
    let mut human = format!("holds: {}\n", render::yes_no(r.holds));
    if let Some((a, b)) = r.witness {
        let _ = writeln!(
            human,
            "witness: {} {}",
            render::coalition(a),
            render::coalition(b)
        );
    }
    let result = PropertyResult {
        holds: r.holds,
        witness: r.witness.map(|(a, b)| [members(a), members(b)]),
    };
    emit.out(result, Diagnostics::tol(tol), human)
}

fn check(emit: &Emit, cmd: &CheckCmd, tol: Option<Tolerance>) -> Result<String, CliError> {
    let default = tol.unwrap_or(Tolerance::DEFAULT);
    match cmd {
        CheckCmd::Superadditive { game } => {
            let g = files::load_game(game)?;
            Ok(property(
                emit,
                check_superadditive_with(&g, default),
                default,
            ))
        }
        CheckCmd::Convex { game } => {
            let g = files::load_game(game)?;
            Ok(property(emit, check_convex_with(&g, default), default))
        }
        CheckCmd::Balanced { game } => {
            let g = files::load_game(game)?;
            let r = check_balanced(&g)?;
            let mut human = format!(
                "balanced: {}\nmax weighted worth: {}\ngrand worth: {}\n",
                render::yes_no(r.balanced),
                fmt_g(r.max_weighted_value),
                fmt_g(g.grand_value())
            );
            let certificate = r.certificate.as_ref().map(|w| {
                w.weights()
                    .iter()
                    .map(|(&c, &weight)| WeightEntry {
                        coalition: members(c),
                        weight,
                    })
                    .collect::<Vec<_>>()
            });
            if let Some(entries) = &certificate {
                let rows: Vec<Vec<String>> = entries
                    .iter()
                    .map(|e| {
                        vec![
                            render::coalition(Coalition::from_members(e.coalition.iter().copied())),
                            fmt_g(e.weight),
                        ]
                    })
                    .collect();
                human.push_str(&render::table(&["coalition", "weight"], &rows));
            }
            let diagnostics = Diagnostics {
                tolerance: Some(Tolerance::LP.0),
                lp_iterations: Some(r.lp_iterations),
                lp_solves: None,
            };
            let result = BalancedReport {
                balanced: r.balanced,
                max_weighted_value: r.max_weighted_value,
                grand_value: g.grand_value(),
                certificate,
            };
            Ok(emit.out(result, diagnostics, human))
        }
        CheckCmd::Imputation(a) => {
            let g = files::load_game(&a.game)?;
            let holds = is_imputation_with(&g, &Allocation::new(a.x.clone()), default)?;
            let human = format!("holds: {}\n", render::yes_no(holds));
            Ok(emit.out(HoldsReport { holds }, Diagnostics::tol(default), human))
        }
        CheckCmd::Kernel(a) => {
            let g = files::load_game(&a.game)?;
            let t = tol.unwrap_or(Tolerance::LP);
            let holds = kernel_check_with(&g, &Allocation::new(a.x.clone()), t)?;
            let human = format!("holds: {}\n", render::yes_no(holds));
            Ok(emit.out(HoldsReport { holds }, Diagnostics::tol(t), human))
        }
    }
}

fn comparison(o: &OrderArgs) -> (ComparisonOrder, String) {
    match o.order {
        OrderArg::Utilitarian => (ComparisonOrder::Utilitarian, "utilitarian".into()),
        OrderArg::Pareto => {
            let (rule, name) = match o.payoff {
                PayoffArg::Equal => (PayoffRule::EqualSplit, "equal"),
                PayoffArg::Shapley => (PayoffRule::Shapley, "shapley"),
                PayoffArg::Nucleolus => (PayoffRule::Nucleolus, "nucleolus"),
                PayoffArg::Identity => (PayoffRule::Identity, "identity"),
            };
            (ComparisonOrder::Pareto(rule), format!("pareto/{name}"))
        }
    }
}

fn player_payoffs(g: &TuGame, p: &Partition, rule: PayoffRule) -> Result<Vec<f64>, GameError> {
    let mut x = vec![0.0; g.n()];
    for &b in p.blocks() {
        for (i, v) in b.members().zip(rule.payoffs(g, b)?) {
            x[i] = v;
        }
    }
    Ok(x)
}

fn form(emit: &Emit, cmd: &FormCmd) -> Result<String, CliError> {
    match cmd {
        FormCmd::MergeSplit {
            game,
            order,
            init,
            partition,
        } => {
            let g = files::load_game(game)?;
            let n = g.n();
            let start = match init {
                InitArg::Singletons => Partition::singletons(n),
                InitArg::Grand => Partition::grand(n),
                InitArg::File => {
                    let path = partition
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("--init file needs --partition".into()))?;
                    files::load_partition(path, n)?
                }
            };
            let (cmp, name) = comparison(order);
            let trace = run_merge_split(&g, cmp, &start)?;
            let path = trace.partitions();
            let steps: Vec<StepReport> = trace
                .steps
                .iter()
                .zip(path.iter().skip(1))
                .map(|(s, p)| StepReport {
                    operation: match s.operation {
                        Operation::Merge => "merge".into(),
                        Operation::Split => "split".into(),
                    },
                    before: block_lists(&s.before),
                    after: block_lists(&s.after),
                    welfare: social_welfare(&g, p),
                })
                .collect();
            let payoffs = match cmp {
                ComparisonOrder::Pareto(rule) => {
                    Some(player_payoffs(&g, &trace.final_partition, rule)?)
                }
                ComparisonOrder::Utilitarian => None,
            };
            let welfare = social_welfare(&g, &trace.final_partition);

            let mut human = format!(
                "order: {name}\ninitial: {}\n",
                render::blocks(trace.initial.blocks())
            );
            let rows: Vec<Vec<String>> = steps
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let show = |b: &Vec<Vec<usize>>| {
                        b.iter()
                            .map(|m| render::coalition(Coalition::from_members(m.iter().copied())))
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    vec![
                        (k + 1).to_string(),
                        s.operation.clone(),
                        show(&s.before),
                        show(&s.after),
                        fmt_g(s.welfare),
                    ]
                })
                .collect();
            if !rows.is_empty() {
                human.push_str(&render::table(
                    &["step", "rule", "from", "to", "welfare"],
                    &rows,
                ));
            }
            let _ = writeln!(
                human,
                "final: {}\nwelfare: {}",
                render::blocks(trace.final_partition.blocks()),
                fmt_g(welfare)
            );
            if let Some(x) = &payoffs {
                human.push_str(&render::allocation_table(x));
            }
            let result = MergeSplitReport {
                order: name,
                initial: block_lists(trace.initial.blocks()),
                steps,
                final_partition: block_lists(trace.final_partition.blocks()),
                welfare,
                payoffs,
            };
            Ok(emit.out(result, Diagnostics::tol(Tolerance::DEFAULT), human))
        }
        FormCmd::DcCheck { game, order } => {
            let g = files::load_game(game)?;
            let (cmp, name) = comparison(order);
            let dc = dc_candidate(&g, cmp)?;
            let (best, best_w) = max_welfare_partition(&g)?;
            let maximizes = dc
                .as_ref()
                .map(|p| Tolerance::DEFAULT.geq(social_welfare(&g, p), best_w));
            let human = format!(
                "order: {name}\ncommon outcome: {}\nmax welfare: {} at {}\ncommon outcome maximizes welfare: {}\n",
                dc.as_ref().map_or_else(|| "none".to_string(), |p| render::blocks(p.blocks())),
                fmt_g(best_w),
                render::blocks(best.blocks()),
                maximizes.map_or("n/a", render::yes_no)
            );
            let result = DcReport {
                order: name,
                dc_partition: dc.map(|p| block_lists(p.blocks())),
                max_welfare: best_w,
                max_welfare_partition: block_lists(best.blocks()),
                dc_maximizes_welfare: maximizes,
            };
            Ok(emit.out(result, Diagnostics::tol(Tolerance::DEFAULT), human))
        }
    }
}

fn relay_rows(
    state: &NetworkState,
    params: &NetformParams,
) -> Result<(Vec<f64>, Vec<f64>, String), CliError> {
    let n = state.relay_count();
    let mut utilities = Vec::with_capacity(n);
    let mut psr = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let u = relay_utility(state, params, i)?;
        let p = state.path_success(i, params);
        let parent = match state.parents()[i] {
            Parent::BaseStation => "bs".to_string(),
            Parent::Relay(j) => j.to_string(),
        };
        rows.push(vec![i.to_string(), parent, fmt_g(p), fmt_g(u)]);
        utilities.push(u);
        psr.push(p);
    }
    let table = render::table(&["relay", "parent", "path_success", "utility"], &rows);
    Ok((utilities, psr, table))
}

fn netform(emit: &Emit, cmd: &NetformCmd) -> Result<String, CliError> {
    match cmd {
        NetformCmd::Run { layout } => {
            let file = files::load_network(layout)?;
            let params = NetformParams::from(&file.params);
            let out =
                run_network_formation(file.positions, file.base_station, file.traffic, &params)?;
            let nash = nash_network_check(&out.state, &params)?;
            let (utilities, path_success, table) = relay_rows(&out.state, &params)?;
            let human = format!(
                "converged: {} after {} rounds\nnash network: {}\n{table}",
                render::yes_no(out.converged),
                out.rounds,
                render::yes_no(nash)
            );
            let result = NetformRunReport {
                converged: out.converged,
                rounds: out.rounds,
                nash,
                utilities,
                path_success,
                network: NetworkFile::from_state(&out.state, &params),
            };
            Ok(emit.out(result, Diagnostics::default(), human))
        }
        NetformCmd::Check { network } => {
            let file = files::load_network(network)?;
            let params = NetformParams::from(&file.params);
            let parents = file.parents.ok_or_else(|| {
                CliError::Validation(GameError::InvalidParameter(
                    "network file has no \"parents\"".into(),
                ))
            })?;
            let parents = parents
                .into_iter()
                .map(|p| p.map_or(Parent::BaseStation, Parent::Relay))
                .collect();
            let state = NetworkState::with_parents(
                file.positions,
                file.base_station,
                file.traffic,
                parents,
            )
            .map_err(CliError::Validation)?;
            let nash = nash_network_check(&state, &params)?;
            let (utilities, path_success, table) = relay_rows(&state, &params)?;
            let human = format!("nash network: {}\n{table}", render::yes_no(nash));
            let result = NetformCheckReport {
                nash,
                utilities,
                path_success,
            };
            Ok(emit.out(result, Diagnostics::default(), human))
        }
    }
}

fn scenario(cmd: &ScenarioCmd) -> Result<String, CliError> {
    let game = match cmd {
        ScenarioCmd::Majority => majority_voting_game(3)?,
        ScenarioCmd::Bankruptcy { claims, estate } => bankruptcy_game(&BankruptcyParams {
            claims: claims.clone(),
            estate: *estate,
        })?,
        ScenarioCmd::Mac { powers, noise } => gaussian_mac_game(&MacParams {
            powers: powers.clone(),
            noise: *noise,
        })?,
        ScenarioCmd::Mimo {
            positions,
            budget,
            exponent,
            exchange_scale,
            rx_antennas,
            noise,
        } => virtual_mimo_game(&MimoParams {
            positions: positions.clone(),
            budget: *budget,
            exponent: *exponent,
            exchange_scale: *exchange_scale,
            rx_antennas: *rx_antennas,
            noise: *noise,
        })?,
        ScenarioCmd::Css {
            miss,
            false_alarm,
            alpha,
            beta,
        } => css_sensing_game(&CssParams {
            miss: miss.clone(),
            false_alarm: false_alarm.clone(),
            alpha: *alpha,
            beta: *beta,
        })?,
    };
    Ok(files::write_game_file(&game))
}
