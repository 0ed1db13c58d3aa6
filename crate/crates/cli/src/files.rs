//! On-disk formats: game, graph, partition and relay network files.

use std::path::Path;

use coopgame::graph::GameGraph;
use coopgame::netform::{NetformParams, NetworkState, Parent};
use coopgame::{Coalition, Partition, PlayerSet, TuGame};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub players: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(default = "defaults::hop_scale")]
    pub hop_scale: f64,
    #[serde(default = "defaults::decay")]
    pub decay: f64,
    #[serde(default = "defaults::link_cost")]
    pub link_cost: f64,
    #[serde(default = "defaults::child_reward")]
    pub child_reward: f64,
    #[serde(default = "defaults::max_links")]
    pub max_links: usize,
}

mod defaults {
    use coopgame::netform::NetformParams;

    pub fn hop_scale() -> f64 {
        NetformParams::default().hop_scale
    }
    pub fn decay() -> f64 {
        NetformParams::default().decay
    }
    pub fn link_cost() -> f64 {
        NetformParams::default().link_cost
    }
    pub fn child_reward() -> f64 {
        NetformParams::default().child_reward
    }
    pub fn max_links() -> usize {
        NetformParams::default().max_links
    }
}

impl Default for ParamsFile {
    fn default() -> Self {
        NetformParams::default().into()
    }
}

impl From<NetformParams> for ParamsFile {
    fn from(p: NetformParams) -> Self {
        ParamsFile {
            hop_scale: p.hop_scale,
            decay: p.decay,
            link_cost: p.link_cost,
            child_reward: p.child_reward,
            max_links: p.max_links,
        }
    }
}

impl From<&ParamsFile> for NetformParams {
    fn from(p: &ParamsFile) -> Self {
        NetformParams {
            hop_scale: p.hop_scale,
            decay: p.decay,
            link_cost: p.link_cost,
            child_reward: p.child_reward,
            max_links: p.max_links,
        }
    }
}

/// Relay layout; `parents` is required by `netform check` and ignored by
/// `netform run`. A `null` parent is the base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub base_station: [f64; 2],
    pub positions: Vec<[f64; 2]>,
    pub traffic: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<Vec<Option<usize>>>,
    #[serde(default)]
    pub params: ParamsFile,
}

impl NetworkFile {
    pub fn from_state(state: &NetworkState, params: &NetformParams) -> Self {
        NetworkFile {
            base_station: state.base_station(),
            positions: state.positions().to_vec(),
            traffic: state.traffic().to_vec(),
            parents: Some(state.parents().iter().map(|&p| parent_to_file(p)).collect()),
            params: (*params).into(),
        }
    }
}

pub fn parent_to_file(p: Parent) -> Option<usize> {
    match p {
        Parent::BaseStation => None,
        Parent::Relay(j) => Some(j),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses a game file. Structural problems (bad JSON, wrong table length)
/// are parse errors; a well-formed table that is not a game is a
/// validation error.
pub fn parse_game_file(text: &str, origin: &str) -> Result<TuGame, CliError> {
    let file: GameFile = parse_json(text, origin)?;
    let expected = 1usize
        .checked_shl(file.players as u32)
        .filter(|_| file.players < 64);
    if expected != Some(file.values.len()) {
        return Err(CliError::Parse {
            origin: origin.to_string(),
            line: 0,
            column: 0,
            message: format!(
                "\"values\" has {} entries, expected 2^{} = {}",
                file.values.len(),
                file.players,
                expected.map_or_else(|| "too many".to_string(), |e| e.to_string())
            ),
        });
    }
    coopgame::game_from_table(file.players, file.values).map_err(CliError::Validation)
}

pub fn load_game(path: &Path) -> Result<TuGame, CliError> {
    parse_game_file(&read(path)?, &path.display().to_string())
}

/// Pretty-printed game file with a trailing newline.
pub fn write_game_file(game: &TuGame) -> String {
    let file = GameFile {
        players: game.n(),
        values: game.values().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("game files serialize");
    s.push('\n');
    s
}

pub fn load_graph(path: &Path) -> Result<GameGraph, CliError> {
    let file: GraphFile = parse_json(&read(path)?, &path.display().to_string())?;
    let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
    GameGraph::new(file.players, &edges).map_err(CliError::Validation)
}

pub fn load_partition(path: &Path, n: usize) -> Result<Partition, CliError> {
    let file: PartitionFile = parse_json(&read(path)?, &path.display().to_string())?;
    partition_from_blocks(&file.blocks, n)
}

pub fn partition_from_blocks(blocks: &[Vec<usize>], n: usize) -> Result<Partition, CliError> {
    let players = PlayerSet::new(n).map_err(CliError::Validation)?;
    let mut coalitions = Vec::with_capacity(blocks.len());
    for b in blocks {
        if let Some(&i) = b.iter().find(|&&i| i >= n) {
            return Err(CliError::Validation(
                coopgame::GameError::CoalitionOutOfRange {
                    mask: if i < 32 { 1 << i } else { u32::MAX },
                    players: n,
                },
            ));
        }
        let c = Coalition::from_members(b.iter().copied());
        if c.len() != b.len() {
            return Err(CliError::Validation(coopgame::GameError::Overlap(c.mask())));
        }
        coalitions.push(c);
    }
    Partition::new(coalitions, players).map_err(CliError::Validation)
}

pub fn load_network(path: &Path) -> Result<NetworkFile, CliError> {
    parse_json(&read(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{"players": 3, "values": [0, 0, 0, 0.6667, 0, 0.6667, 0.6667, 1]}"#;

    #[test]
    fn example_table_loads() {
        let g = parse_game_file(EXAMPLE, "inline").unwrap();
        assert_eq!(g.value(Coalition::from_members([0, 1])), 0.6667);
        assert_eq!(g.value(Coalition::from_members([2])), 0.0);
    }

    #[test]
    fn wrong_length_is_a_parse_error() {
        let r = parse_game_file(r#"{"players": 3, "values": [0, 1]}"#, "inline");
        assert!(matches!(r, Err(CliError::Parse { .. })));
        let r = parse_game_file(r#"{"players": 3, "values": "#, "inline");
        assert!(matches!(r, Err(CliError::Parse { line: 1, .. })));
        let r = parse_game_file(r#"{"players": 1, "values": [0, 1], "extra": 2}"#, "inline");
        assert!(matches!(r, Err(CliError::Parse { .. })));
    }

    #[test]
    fn nonzero_empty_worth_is_a_validation_error() {
        let r = parse_game_file(r#"{"players": 1, "values": [0.5, 1]}"#, "inline");
        assert!(matches!(r, Err(CliError::Validation(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        let g = coopgame::scenarios::majority_voting_game(3).unwrap();
        let text = write_game_file(&g);
        let back = parse_game_file(&text, "inline").unwrap();
        assert_eq!(back.values(), g.values());
        for (a, b) in back.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn partitions_from_lists() {
        let p = partition_from_blocks(&[vec![2], vec![1, 0]], 3).unwrap();
        assert_eq!(p.to_string(), "[{0,1} {2}]");
        assert!(partition_from_blocks(&[vec![0, 0], vec![1]], 2).is_err());
        assert!(partition_from_blocks(&[vec![0, 5]], 2).is_err());
        assert!(partition_from_blocks(&[vec![0]], 2).is_err());
    }
}
