//! Small worked scenarios used by tests, the CLI and the acceptance suite.

use crate::automata::Pdfa;
use crate::game::{GameGraph, GridSpec, NodeKind, Owner, ProductEdge, ProductGame, ProductNode};
use crate::safety_spec::{parse_safe_ltl, Dfa, SafeLtl};
use crate::symbols::{parse_demos, Alphabet, DemoSet, Symbol};

/// Propositions of the underwater two-goal task.
pub const REEF_PROPS: &str = "shipwreck,fish,coral-reefs";

fn sym(a: &Alphabet, props: &[&str]) -> Symbol {
    a.symbol(props).expect("fixture propositions exist")
}

/// DFA for "visit shipwreck and fish in any order", every other symbol
/// leading to a rejecting sink.
pub fn two_goal_dfa() -> Dfa {
    let a = Alphabet::parse(REEF_PROPS).unwrap();
    let (e, s, f) = (Symbol::EMPTY, sym(&a, &["shipwreck"]), sym(&a, &["fish"]));
    Dfa::from_fn(a, 5, 0, |q| q == 3, move |q, x| match (q, x) {
        (0, x) if x == e => 0,
        (0, x) if x == s => 1,
        (0, x) if x == f => 2,
        (1, x) if x == e => 1,
        (1, x) if x == f => 3,
        (2, x) if x == e => 2,
        (2, x) if x == s => 3,
        _ => 4,
    })
    .unwrap()
}

/// Probabilistic version of [`two_goal_dfa`].
pub fn two_goal_pdfa() -> Pdfa {
    let a = Alphabet::parse(REEF_PROPS).unwrap();
    let (e, s, f) = (Symbol::EMPTY, sym(&a, &["shipwreck"]), sym(&a, &["fish"]));
    Pdfa::new(
        a,
        0,
        vec![
            (0, e, 0, 0.8),
            (0, s, 1, 0.15),
            (0, f, 2, 0.05),
            (1, e, 1, 0.8),
            (1, f, 3, 0.2),
            (2, e, 2, 0.8),
            (2, s, 3, 0.2),
        ],
        vec![0.0, 0.0, 0.0, 1.0],
    )
    .unwrap()
}

/// Ground truth for the non-Markovian learning experiment, over
/// `{ship, fish}`. Shipwreck first is preferred.
pub fn ship_fish_truth() -> Pdfa {
    let a = Alphabet::parse("ship,fish").unwrap();
    let (e, s, f) = (Symbol::EMPTY, sym(&a, &["ship"]), sym(&a, &["fish"]));
    Pdfa::new(
        a,
        0,
        vec![
            (0, e, 0, 0.5),
            (0, s, 1, 0.4),
            (0, f, 2, 0.1),
            (1, e, 1, 0.5),
            (1, f, 3, 0.5),
            (2, e, 2, 0.5),
            (2, s, 3, 0.5),
        ],
        vec![0.0, 0.0, 0.0, 1.0],
    )
    .unwrap()
}

/// Three-state chain game (two environment steps into an `o1` state).
pub const CHAIN_GAME: &str = "\
alphabet: o1
dims: 1
initial s0
state s0 env {}
state s1 env {}
state s2 robot {o1}
edge s0 E s1 1
edge s1 E s2 1
edge s2 stay s2 0
";

pub fn chain_game() -> GameGraph {
    GameGraph::parse_text(CHAIN_GAME).unwrap()
}

/// Two-state PDFA waiting for `o1`.
pub fn chain_pdfa() -> Pdfa {
    let a = Alphabet::parse("o1").unwrap();
    Pdfa::new(a, 0, vec![(0, Symbol(0), 0, 0.6), (0, Symbol(1), 1, 0.4)], vec![0.0, 1.0]).unwrap()
}

/// Propositions of the lava/water/carpet/charging gridworld.
pub const CHARGE_PROPS: &str = "lava,water,carpet,charge";

/// Never lava; after water, no charging until carpet or ten dry steps.
pub const CHARGE_SAFETY: &str = "G !lava & G(water -> X visit_until(!charge, carpet, 10))";

pub fn charge_safety() -> SafeLtl {
    parse_safe_ltl(CHARGE_SAFETY, &Alphabet::parse(CHARGE_PROPS).unwrap()).unwrap()
}

/// Five demonstrations in the lava/water/carpet gridworld.
pub const CHARGE_DEMOS: &str = "\
alphabet: lava,water,carpet,charge
{} {} {} {} {} {} {} {charge}
{} {} {} {} {carpet} {} {charge}
{} {} {water} {} {} {carpet} {} {charge}
{} {water} {water} {} {carpet} {carpet} {} {charge}
{} {} {} {water} {water} {water} {water} {} {carpet} {carpet} {} {charge}
";

pub fn charge_demos() -> DemoSet {
    parse_demos(CHARGE_DEMOS, None).unwrap()
}

/// Safe ground truth for the charging task, used to sample demonstration
/// sets of any size. Wet states never emit `charge`.
pub fn charge_truth() -> Pdfa {
    let a = Alphabet::parse(CHARGE_PROPS).unwrap();
    let (e, w, c, g) = (
        Symbol::EMPTY,
        sym(&a, &["water"]),
        sym(&a, &["carpet"]),
        sym(&a, &["charge"]),
    );
    Pdfa::new(
        a,
        0,
        vec![
            (0, e, 0, 0.55),
            (0, w, 1, 0.2),
            (0, c, 2, 0.1),
            (0, g, 3, 0.15),
            (1, w, 1, 0.3),
            (1, e, 1, 0.3),
            (1, c, 2, 0.4),
            (2, c, 2, 0.3),
            (2, e, 4, 0.3),
            (2, g, 3, 0.4),
            (4, e, 4, 0.5),
            (4, g, 3, 0.5),
        ],
        vec![0.0, 0.0, 0.0, 1.0, 0.0],
    )
    .unwrap()
}

/// The twelve-node product game of the worked value-iteration example,
/// with integer weights `(cost, preference)`.
pub fn worked_product_game() -> ProductGame {
    use Owner::{Environment as E, Robot as R};
    let spec: [(&str, Option<Owner>); 12] = [
        ("(init,q0)", Some(R)),
        ("(s0,q0)", Some(R)),
        ("(s1,q0)", Some(E)),
        ("(s2,q0)", Some(R)),
        ("(s3,q0)", Some(R)),
        ("(s4,q0)", Some(E)),
        ("(s5,q0)", Some(E)),
        ("(s6,q0)", Some(E)),
        ("(s7,q0)", Some(E)),
        ("(s8,q0)", Some(E)),
        ("(s9,q1)", Some(R)),
        ("terminal", None),
    ];
    let nodes = spec
        .iter()
        .map(|(n, o)| ProductNode {
            name: n.to_string(),
            owner: *o,
            kind: if o.is_some() { NodeKind::Raw } else { NodeKind::Terminal },
        })
        .collect();
    let e = |a: &str, t: u32, w: [f64; 2]| ProductEdge {
        action: a.into(),
        target: t,
        weight: w.to_vec(),
    };
    let z = [0.0, 0.0];
    let edges = vec![
        vec![e("start", 1, z)],
        vec![e("a0", 2, z)],
        vec![e("e1", 3, z), e("e2", 4, z)],
        vec![e("a1", 5, z), e("a2", 6, [5.0, 5.0]), e("a3", 7, [5.0, 5.0])],
        vec![e("a4", 8, [10.0, 1.0]), e("a5", 9, [1.0, 10.0])],
        vec![e("e3", 5, z), e("e4", 10, z)],
        vec![e("e5", 10, z)],
        vec![e("e6", 10, z)],
        vec![e("e7", 10, z)],
        vec![e("e8", 10, z)],
        vec![e("finish", 11, z)],
        vec![],
    ];
    ProductGame::from_parts(2, nodes, edges, 0, 11).unwrap()
}

/// Desk-scale dynamic fish/shipwreck gridworld: the fish roams a corridor
/// and must be caught; the robot may move one or two cells per turn.
pub const FISH_GRID: &str = r#"
width = 5
height = 4
alphabet = ["ship", "fish"]

[[cells]]
x = 4
y = 3
prop = "ship"

[robot]
start = [0, 0]
moves = [
  { name = "N", dx = 0, dy = 1, cost = [1.0] },
  { name = "S", dx = 0, dy = -1, cost = [1.0] },
  { name = "E", dx = 1, dy = 0, cost = [1.0] },
  { name = "W", dx = -1, dy = 0, cost = [1.0] },
  { name = "N2", dx = 0, dy = 2, cost = [3.0] },
  { name = "S2", dx = 0, dy = -2, cost = [3.0] },
  { name = "E2", dx = 2, dy = 0, cost = [3.0] },
  { name = "W2", dx = -2, dy = 0, cost = [3.0] },
]

[[agents]]
name = "fish"
start = [3, 1]
region = { min = [1, 1], max = [4, 1] }
prop = "fish"
capture = true
moves = [
  { name = "stay", dx = 0, dy = 0 },
  { name = "E", dx = 1, dy = 0 },
  { name = "W", dx = -1, dy = 0 },
]
"#;

pub fn fish_grid() -> GridSpec {
    GridSpec::parse_toml(FISH_GRID).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_gridworld;

    #[test]
    fn fixtures_build() {
        assert_eq!(two_goal_dfa().num_states(), 5);
        assert_eq!(two_goal_pdfa().num_states(), 4);
        assert_eq!(ship_fish_truth().num_states(), 4);
        assert_eq!(chain_game().num_states(), 3);
        assert_eq!(charge_demos().total(), 5);
        assert_eq!(charge_truth().num_states(), 5);
        assert_eq!(worked_product_game().num_states(), 12);
        assert!(build_gridworld(&fish_grid()).is_ok());
        charge_safety();
    }
}
