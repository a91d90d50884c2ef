//! Declarative gridworld specs compiled into turn-based game graphs.
//!
//! A robot-turn state is labeled with the colored-cell proposition under the
//! robot plus the proposition of every agent it meets. Agents marked
//! `capture` fire their proposition once, at the robot-turn state following
//! the meeting, and are frozen afterwards. Environment-turn states carry the
//! empty label. Without agents the game has robot states only.

use std::collections::{HashMap, VecDeque};

use serde::Deserialize;

use super::{GameEdge, GameError, GameGraph, GameState, Owner};
use crate::symbols::{Alphabet, Symbol};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub width: i32,
    pub height: i32,
    /// Proposition order; defaults to first appearance in cells then agents.
    #[serde(default)]
    pub alphabet: Option<Vec<String>>,
    #[serde(default)]
    pub cells: Vec<CellSpec>,
    pub robot: RobotSpec,
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub x: i32,
    pub y: i32,
    pub prop: String,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub start: [i32; 2],
    pub moves: Vec<MoveSpec>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MoveSpec {
    pub name: String,
    pub dx: i32,
    pub dy: i32,
    /// Cost vector; robot moves only. Every robot move needs the same length.
    #[serde(default)]
    pub cost: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub name: String,
    pub start: [i32; 2],
    /// Inclusive bounding box of the agent's movement region.
    #[serde(default)]
    pub region: Option<RegionSpec>,
    /// Cells inside the region the agent may not enter.
    #[serde(default)]
    pub exclude: Vec<[i32; 2]>,
    pub prop: String,
    #[serde(default)]
    pub capture: bool,
    pub moves: Vec<MoveSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub min: [i32; 2],
    pub max: [i32; 2],
}

impl GridSpec {
    pub fn parse_toml(text: &str) -> Result<GridSpec, GameError> {
        toml::from_str(text).map_err(|e| GameError::Spec {
            path: e.span().map(|s| format!("byte {}", s.start)).unwrap_or_default(),
            message: e.message().to_string(),
        })
    }
}

type Pos = (i32, i32);

const CAUGHT: Pos = (-1, -1);

fn park(mut agents: Vec<Pos>, captured: u32) -> Vec<Pos> {
    for (i, p) in agents.iter_mut().enumerate() {
        if captured & (1 << i) != 0 {
            *p = CAUGHT;
        }
    }
    agents
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    robot: Pos,
    /// Captured agents are parked at [`CAUGHT`].
    agents: Vec<Pos>,
    captured: u32,
    fresh: u32,
    robot_turn: bool,
}

fn spec_err(path: impl Into<String>, message: impl Into<String>) -> GameError {
    GameError::Spec {
        path: path.into(),
        message: message.into(),
    }
}

struct Compiled<'a> {
    spec: &'a GridSpec,
    alphabet: Alphabet,
    cell_label: HashMap<Pos, Symbol>,
    agent_prop: Vec<Symbol>,
    regions: Vec<RegionSpec>,
}

impl Compiled<'_> {
    fn clamp_grid(&self, p: Pos) -> Pos {
        (p.0.clamp(0, self.spec.width - 1), p.1.clamp(0, self.spec.height - 1))
    }

    fn agent_step(&self, i: usize, p: Pos, m: &MoveSpec) -> Pos {
        let r = self.regions[i];
        let q = (
            (p.0 + m.dx).clamp(r.min[0], r.max[0]),
            (p.1 + m.dy).clamp(r.min[1], r.max[1]),
        );
        if self.spec.agents[i].exclude.iter().any(|c| (c[0], c[1]) == q) {
            p
        } else {
            q
        }
    }

    fn label(&self, k: &Key) -> Symbol {
        if !k.robot_turn {
            return Symbol::EMPTY;
        }
        let mut s = self.cell_label.get(&k.robot).copied().unwrap_or(Symbol::EMPTY);
        for (i, a) in self.spec.agents.iter().enumerate() {
            let hit = if a.capture {
                k.fresh & (1 << i) != 0
            } else {
                k.agents[i] == k.robot
            };
            if hit {
                s = s.union(self.agent_prop[i]);
            }
        }
        s
    }

    fn met(&self, robot: Pos, agents: &[Pos], captured: u32) -> u32 {
        let mut m = 0;
        for (i, a) in self.spec.agents.iter().enumerate() {
            if a.capture && captured & (1 << i) == 0 && agents[i] == robot {
                m |= 1 << i;
            }
        }
        m
    }

    fn name(&self, k: &Key) -> String {
        let mut n = format!("{}:r{}_{}", if k.robot_turn { "R" } else { "E" }, k.robot.0, k.robot.1);
        for (i, a) in self.spec.agents.iter().enumerate() {
            if k.captured & (1 << i) != 0 {
                n.push_str(&format!(",{}*", a.name));
                if k.fresh & (1 << i) != 0 {
                    n.push('!');
                }
            } else {
                n.push_str(&format!(",{}{}_{}", a.name, k.agents[i].0, k.agents[i].1));
            }
        }
        n
    }

    /// Successors of `k` in move order: `(action, successor, weight)`.
    fn successors(&self, k: &Key, dims: usize) -> Vec<(String, Key, Vec<f64>)> {
        let agents = &self.spec.agents;
        if k.robot_turn {
            self.spec
                .robot
                .moves
                .iter()
                .map(|m| {
                    let r = self.clamp_grid((k.robot.0 + m.dx, k.robot.1 + m.dy));
                    let next = if agents.is_empty() {
                        Key {
                            robot: r,
                            agents: Vec::new(),
                            captured: 0,
                            fresh: 0,
                            robot_turn: true,
                        }
                    } else {
                        let newly = self.met(r, &k.agents, k.captured);
                        Key {
                            robot: r,
                            agents: park(k.agents.clone(), k.captured | newly),
                            captured: k.captured | newly,
                            fresh: newly,
                            robot_turn: false,
                        }
                    };
                    (m.name.clone(), next, m.cost.clone())
                })
                .collect()
        } else {
            // joint moves of the free agents, odometer order
            let free: Vec<usize> = (0..agents.len()).filter(|&i| k.captured & (1 << i) == 0).collect();
            let mut out = Vec::new();
            let mut idx = vec![0usize; free.len()];
            loop {
                let mut pos = k.agents.clone();
                let mut names = Vec::new();
                for (j, &i) in free.iter().enumerate() {
                    let m = &agents[i].moves[idx[j]];
                    pos[i] = self.agent_step(i, pos[i], m);
                    names.push(format!("{}.{}", agents[i].name, m.name));
                }
                let newly = self.met(k.robot, &pos, k.captured);
                let action = if names.is_empty() { "wait".to_string() } else { names.join("+") };
                out.push((
                    action,
                    Key {
                        robot: k.robot,
                        agents: park(pos, k.captured | newly),
                        captured: k.captured | newly,
                        fresh: k.fresh | newly,
                        robot_turn: true,
                    },
                    vec![0.0; dims],
                ));
                let mut j = free.len();
                loop {
                    if j == 0 {
                        return out;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < agents[free[j]].moves.len() {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        }
    }
}

fn validate(spec: &GridSpec) -> Result<(Alphabet, usize, Vec<RegionSpec>), GameError> {
    if spec.width < 1 || spec.height < 1 {
        return Err(spec_err("width/height", "grid must be at least 1x1"));
    }
    let inside = |p: [i32; 2]| p[0] >= 0 && p[1] >= 0 && p[0] < spec.width && p[1] < spec.height;
    for (i, c) in spec.cells.iter().enumerate() {
        if !inside([c.x, c.y]) {
            return Err(spec_err(format!("cells[{i}]"), "cell outside the grid"));
        }
    }
    if !inside(spec.robot.start) {
        return Err(spec_err("robot.start", "start outside the grid"));
    }
    if spec.robot.moves.is_empty() {
        return Err(spec_err("robot.moves", "robot needs at least one move"));
    }
    let dims = spec.robot.moves[0].cost.len().max(1);
    for (i, m) in spec.robot.moves.iter().enumerate() {
        let path = format!("robot.moves[{i}].cost");
        if m.cost.len() != dims {
            return Err(spec_err(path, format!("expected {dims} cost components")));
        }
        if m.cost.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(spec_err(path, "costs must be finite and nonnegative"));
        }
    }
    if spec.agents.len() > 16 {
        return Err(spec_err("agents", "at most 16 agents"));
    }
    let mut regions = Vec::new();
    for (i, a) in spec.agents.iter().enumerate() {
        let r = a.region.unwrap_or(RegionSpec {
            min: [0, 0],
            max: [spec.width - 1, spec.height - 1],
        });
        if !(inside(r.min) && inside(r.max) && r.min[0] <= r.max[0] && r.min[1] <= r.max[1]) {
            return Err(spec_err(format!("agents[{i}].region"), "region must be a box inside the grid"));
        }
        let in_region = |p: [i32; 2]| p[0] >= r.min[0] && p[0] <= r.max[0] && p[1] >= r.min[1] && p[1] <= r.max[1];
        if !in_region(a.start) || a.exclude.contains(&a.start) {
            return Err(spec_err(format!("agents[{i}].start"), "start outside the agent's region"));
        }
        if a.moves.is_empty() {
            return Err(spec_err(format!("agents[{i}].moves"), "agent needs at least one move"));
        }
        regions.push(r);
    }
    let mut names: Vec<String> = Vec::new();
    for p in spec.cells.iter().map(|c| &c.prop).chain(spec.agents.iter().map(|a| &a.prop)) {
        if !names.contains(p) {
            names.push(p.clone());
        }
    }
    let alphabet = match &spec.alphabet {
        Some(list) => {
            let a = Alphabet::new(list.iter().cloned()).map_err(|e| spec_err("alphabet", e.to_string()))?;
            if let Some(missing) = names.iter().find(|n| a.index_of(n).is_none()) {
                return Err(spec_err("alphabet", format!("missing proposition `{missing}`")));
            }
            a
        }
        None => Alphabet::new(names).map_err(|e| spec_err("alphabet", e.to_string()))?,
    };
    Ok((alphabet, dims, regions))
}

/// Compile a grid spec. States are numbered in breadth-first order from the
/// start configuration, following moves in declaration order.
pub fn build_gridworld(spec: &GridSpec) -> Result<GameGraph, GameError> {
    let (alphabet, dims, regions) = validate(spec)?;
    let mut cell_label: HashMap<Pos, Symbol> = HashMap::new();
    for c in &spec.cells {
        let s = alphabet.symbol(&[c.prop.as_str()]).expect("validated");
        let e = cell_label.entry((c.x, c.y)).or_insert(Symbol::EMPTY);
        *e = e.union(s);
    }
    let agent_prop = spec
        .agents
        .iter()
        .map(|a| alphabet.symbol(&[a.prop.as_str()]).expect("validated"))
        .collect();
    let mut spec_padded = spec.clone();
    for m in &mut spec_padded.robot.moves {
        if m.cost.is_empty() {
            m.cost = vec![0.0; dims];
        }
    }
    let c = Compiled {
        spec: &spec_padded,
        alphabet,
        cell_label,
        agent_prop,
        regions,
    };

    let robot = (spec.robot.start[0], spec.robot.start[1]);
    let agents: Vec<Pos> = spec.agents.iter().map(|a| (a.start[0], a.start[1])).collect();
    let met = c.met(robot, &agents, 0);
    let start = Key {
        robot,
        agents: park(agents, met),
        captured: met,
        fresh: met,
        robot_turn: true,
    };

    let mut ids: HashMap<Key, u32> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(start.clone(), 0);
    keys.push(start.clone());
    queue.push_back(start);
    let mut edges: Vec<Vec<GameEdge>> = vec![Vec::new()];
    while let Some(k) = queue.pop_front() {
        let src = ids[&k] as usize;
        let mut out = Vec::new();
        for (action, next, weight) in c.successors(&k, dims) {
            let t = match ids.get(&next) {
                Some(&t) => t,
                None => {
                    let t = keys.len() as u32;
                    ids.insert(next.clone(), t);
                    keys.push(next.clone());
                    edges.push(Vec::new());
                    queue.push_back(next);
                    t
                }
            };
            out.push(GameEdge {
                action,
                target: t,
                weight,
            });
        }
        edges[src] = out;
    }
    let states = keys
        .iter()
        .map(|k| GameState {
            name: c.name(k),
            owner: if k.robot_turn { Owner::Robot } else { Owner::Environment },
            label: c.label(k),
        })
        .collect();
    GameGraph::new(c.alphabet, dims, states, edges, 0)
}
