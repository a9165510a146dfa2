//! Graph sources, coupling flags and atomic output.

use std::io::Write;
use std::path::Path;

use clap::Args;
use cospec::classical::{Observable, ObservableSet};
use cospec::graph::{fixture, parse_edge_list, parse_graph6};
use cospec::quantum::IsingParams;
use cospec::{Coupling, Error, Graph};
use serde::Serialize;

use crate::Failure;

#[derive(Args, Debug, Clone, Default)]
pub struct GraphArgs {
    /// Built-in graph by name (see `fixtures`); repeatable. No default.
    #[arg(long = "fixture", value_name = "NAME")]
    pub fixture: Vec<String>,
    /// Several built-in graphs at once, e.g. `--fixtures G13 G13p`. No default.
    #[arg(long = "fixtures", value_name = "NAME", num_args = 1..)]
    pub fixtures: Vec<String>,
    /// Graph as a graph6 record; repeatable. No default.
    #[arg(long = "graph6", value_name = "GRAPH6")]
    pub graph6: Vec<String>,
    /// Graph as 1-indexed `i,j;i,j` edge text; repeatable, needs --n. No default.
    #[arg(long = "edges", value_name = "EDGES", allow_hyphen_values = true)]
    pub edges: Vec<String>,
    /// Vertex count for --edges (vertices). No default.
    #[arg(long = "n", value_name = "VERTICES")]
    pub n: Option<usize>,
}

impl GraphArgs {
    /// Graphs in flag order: fixtures, graph6 records, edge lists.
    pub fn load(&self) -> Result<Vec<(String, Graph)>, Failure> {
        let mut out = Vec::new();
        for name in self.fixture.iter().chain(&self.fixtures) {
            out.push((name.clone(), fixture(name)?));
        }
        for rec in &self.graph6 {
            out.push((rec.clone(), parse_graph6(rec)?));
        }
        if !self.edges.is_empty() {
            let n = self.n.ok_or_else(|| Failure::usage("--edges needs --n"))?;
            for text in &self.edges {
                out.push((text.clone(), parse_edge_list(text, n)?));
            }
        } else if self.n.is_some() {
            return Err(Failure::usage("--n is only used with --edges"));
        }
        Ok(out)
    }

    pub fn exactly(&self, count: usize) -> Result<Vec<(String, Graph)>, Failure> {
        let gs = self.load()?;
        if gs.len() != count {
            let what = if count == 1 { "one graph" } else { "two graphs" };
            return Err(Failure::usage(format!("expected {what} from --fixture/--fixtures/--graph6/--edges, got {}", gs.len())));
        }
        Ok(gs)
    }
}

#[derive(Args, Debug, Clone)]
pub struct CouplingArgs {
    /// Ising coupling J (energy units; integer, p/q or decimal, kept exact).
    #[arg(long = "J", value_name = "RATIONAL", default_value = "1", allow_hyphen_values = true)]
    pub j: Coupling,
    /// Longitudinal field h (energy units; integer, p/q or decimal).
    #[arg(long = "h", value_name = "RATIONAL", default_value = "1", allow_hyphen_values = true)]
    pub h: Coupling,
}

#[derive(Args, Debug, Clone)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub couplings: CouplingArgs,
    /// Transverse field Delta (energy units; integer, p/q or decimal).
    #[arg(long = "Delta", value_name = "RATIONAL", default_value = "1", allow_hyphen_values = true)]
    pub delta: Coupling,
}

/// Couplings echoed into reports as exact strings.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingEcho {
    #[serde(rename = "J")]
    pub j: Coupling,
    pub h: Coupling,
    #[serde(rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub delta: Option<Coupling>,
}

impl QuantumArgs {
    pub fn params(&self) -> IsingParams<f64> {
        IsingParams::new(self.couplings.j.to_scalar(), self.couplings.h.to_scalar(), self.delta.to_scalar())
    }

    pub fn echo(&self) -> CouplingEcho {
        CouplingEcho { j: self.couplings.j, h: self.couplings.h, delta: Some(self.delta) }
    }
}

impl CouplingArgs {
    pub fn echo(&self) -> CouplingEcho {
        CouplingEcho { j: self.j, h: self.h, delta: None }
    }
}

pub fn parse_observables(text: &str) -> Result<ObservableSet, Error> {
    let list = text.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect::<Result<Vec<Observable>, _>>()?;
    ObservableSet::from_list(list)
}

/// Writes via a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}
