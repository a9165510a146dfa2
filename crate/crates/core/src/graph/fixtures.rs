//! Named graph pairs with known (co)spectrality relations.
//!
//! Edge lists are kept verbatim in 1-indexed `i,j;…` notation; repeated pairs
//! collapse when parsed. `G27` as listed has 34 distinct edges against 35 for
//! `G27p`, so the two cannot share an adjacency spectrum. `G27r` is `G27` with
//! the single edge `{8,12}` restored; it is the only one-edge addition that
//! makes the pair adjacency-cospectral, and with it the pair is also
//! longitudinal co-Ising while `(e, m, Ω²)` still separates them.

use super::{parse_edge_list, Graph};
use crate::error::{Error, Result};

const G27_EDGES: &str = "1,14;1,17;2,14;2,22;3,4;3,5;4,3;4,10;4,12;5,3;5,11;5,13;6,7;6,8;6,15;\
7,10;7,11;8,13;9,12;9,13;9,14;10,15;11,15;14,15;16,17;16,21;17,18;18,19;\
19,20;20,21;22,23;22,27;23,24;24,25;25,26;26,27";

const TABLE: &[(&str, usize, &str)] = &[
    ("G1", 7, "1,5;1,7;2,6;2,7;3,7"),
    ("G2", 7, "1,5;2,6;2,7;3,6;3,7"),
    ("G3", 4, "1,4;2,4"),
    ("G4", 4, "1,3;2,4"),
    ("G13", 13, "1,8;1,10;1,11;1,13;2,9;2,11;2,13;3,10;3,13;4,10;5,11;6,12;7,12;9,12;12,13"),
    ("G13p", 13, "1,8;1,10;1,11;1,13;2,9;2,11;2,13;3,10;3,11;4,10;5,12;6,12;7,13;8,12;12,13"),
    ("G27", 27, G27_EDGES),
    (
        "G27p",
        27,
        "1,14;1,17;2,14;2,23;3,4;3,5;4,3;4,10;4,11;5,12;5,13;6,7;6,8;6,15;7,10;\
7,12;8,11;8,13;9,12;9,13;9,14;10,15;11,15;14,15;16,17;16,21;17,18;18,19;\
19,20;20,21;22,23;22,27;23,24;24,25;25,26;26,27",
    ),
    ("G27r", 27, concat!(
        "1,14;1,17;2,14;2,22;3,4;3,5;4,3;4,10;4,12;5,3;5,11;5,13;6,7;6,8;6,15;",
        "7,10;7,11;8,12;8,13;9,12;9,13;9,14;10,15;11,15;14,15;16,17;16,21;17,18;18,19;",
        "19,20;20,21;22,23;22,27;23,24;24,25;25,26;26,27"
    )),
];

pub const FIXTURE_NAMES: &[&str] = &["G1", "G2", "G3", "G4", "G13", "G13p", "G27", "G27p", "G27r"];

/// Looks up a fixture graph by name (`G13p` is G13′, and so on).
pub fn fixture(name: &str) -> Result<Graph> {
    let (_, n, edges) = TABLE
        .iter()
        .find(|(k, _, _)| k.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    parse_edge_list(edges, *n)
}

/// The printed edge list of a fixture, before deduplication.
pub fn fixture_edge_text(name: &str) -> Result<&'static str> {
    TABLE
        .iter()
        .find(|(k, _, _)| k.eq_ignore_ascii_case(name))
        .map(|(_, _, e)| *e)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}
