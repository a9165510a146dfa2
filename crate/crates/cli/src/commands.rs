use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use cospec::classical::{compare_invariants, signature_polynomial, InvariantReport, ObservableSet, Term};
use cospec::graph::{char_poly, encode_graph6, fixture, FIXTURE_NAMES};
use cospec::quantum::{
    annealing_sweep, full_spectrum_dense, lowest_k_eigenvalues, quantum_cospectral_probe, uniform_grid, LanczosOptions, ProbeOptions,
    ProbeReport, QuantumOperator, Spectrum,
};
use cospec::sampler::{bootstrap_ci, exact_distribution, fit_temperature, metropolis_sample_with, GibbsModel, MetropolisOptions, SignatureHistogram, TemperatureFit};
use cospec::scan::{enumerate_graphs, enumerate_trees, read_graph6_stream, scan_graphs, ScanLevel, ScanOptions, ScanResult};
use cospec::{Coupling, Graph, IntPolynomial};
use serde::Serialize;

use crate::input::{parse_observables, write_atomic, CouplingEcho};
use crate::{Command, Failure, Format, LevelArg};

/// Machine output goes to `out` or stdout; the summary always goes to stderr.
fn emit(out: Option<&Path>, body: &str, summary: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, body)?,
        None => print!("{body}"),
    }
    eprintln!("{summary}");
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

#[derive(Serialize)]
struct GraphInfo {
    source: String,
    n: usize,
    edges: usize,
    graph6: String,
}

impl GraphInfo {
    fn new(source: &str, g: &Graph) -> Self {
        GraphInfo { source: source.to_string(), n: g.n(), edges: g.edge_count(), graph6: encode_graph6(g) }
    }
}

pub fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Invariants { graphs, observables, out } => {
            let (src, g) = graphs.exactly(1)?.remove(0);
            let obs = parse_observables(&observables)?;
            invariants(&src, &g, &obs, out.as_deref())
        }
        Command::Compare { graphs, observables, probe, quantum, tol, out } => {
            let gs = graphs.exactly(2)?;
            let obs = parse_observables(&observables)?;
            let classical = compare_invariants(&gs[0].1, &gs[1].1, &obs)?;
            let quantum_report = if probe {
                let opts = ProbeOptions { tol, ..ProbeOptions::default() };
                Some(quantum_cospectral_probe(&gs[0].1, &gs[1].1, &[quantum.params()], &opts)?)
            } else {
                None
            };
            compare(&gs, classical, quantum_report.map(|r| (quantum.echo(), r)), out.as_deref())
        }
        Command::Qspectrum { graphs, quantum, s, k, tol, seed, format, out } => {
            let (src, g) = graphs.exactly(1)?.remove(0);
            let p = quantum.params();
            p.validate()?;
            let op = match s {
                Some(s) => QuantumOperator::annealing(&g, &p, s)?,
                None => QuantumOperator::transverse(&g, &p)?,
            };
            let spectrum = match k {
                Some(k) => lowest_k_eigenvalues(&op, k, &LanczosOptions { tol, seed, ..LanczosOptions::default() })?,
                None => full_spectrum_dense(&op)?,
            };
            qspectrum(&src, &g, quantum.echo(), s, spectrum, format, out.as_deref())
        }
        Command::Sweep { graphs, quantum, k, grid, tol, seed, format, out } => {
            let (src, g) = graphs.exactly(1)?.remove(0);
            let p = quantum.params();
            let grid = uniform_grid::<f64>(grid)?;
            let table = annealing_sweep(&g, &p, &grid, k, &LanczosOptions { tol, seed, ..LanczosOptions::default() })?;
            let continuity = table.check_continuity();
            let failures = table.failures();
            let body = match format {
                Format::Csv => table.to_csv(),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Report<'a> {
                        graph: GraphInfo,
                        couplings: CouplingEcho,
                        table: &'a cospec::quantum::SweepTable<f64>,
                        continuity: cospec::quantum::ContinuityReport<f64>,
                    }
                    json(&Report { graph: GraphInfo::new(&src, &g), couplings: quantum.echo(), table: &table, continuity: continuity.clone() })?
                }
            };
            let summary = format!(
                "sweep {src}: {} points, k={k}, {} failed, continuity {} (worst ratio {:.3})",
                table.points.len(),
                failures.len(),
                if continuity.ok { "ok" } else { "VIOLATED" },
                continuity.worst_ratio
            );
            emit(out.as_deref(), &body, &summary)?;
            if let Some((s, e)) = failures.first() {
                return Err(Failure { code: 1, msg: format!("solver failed at s = {s}: {e}") });
            }
            Ok(())
        }
        Command::Sample { graphs, couplings, beta, observables, sweeps, chains, burn_in, bootstrap, seed, exact, format, out } => {
            let (src, g) = graphs.exactly(1)?.remove(0);
            let obs = parse_observables(&observables)?;
            let model = GibbsModel::new(g, couplings.j.to_scalar(), couplings.h.to_scalar(), beta.to_scalar::<f64>(), obs)?;
            if exact {
                let d = exact_distribution(&model)?;
                let body = match format {
                    Format::Csv => d.to_csv(),
                    Format::Json => json(&d)?,
                };
                let summary = format!("exact distribution {src}: {} bins, beta={beta}", d.probabilities.len());
                return emit(out.as_deref(), &body, &summary);
            }
            let seed = seed.ok_or_else(|| Failure::usage("--seed is required for sampling"))?;
            let opts = MetropolisOptions { sweeps, chains, seed, burn_in };
            let mut h = metropolis_sample_with(&model, &opts)?;
            if bootstrap > 0 {
                h = bootstrap_ci(&h, bootstrap, seed.wrapping_add(1))?;
            }
            let body = match format {
                Format::Csv => h.to_csv(),
                Format::Json => json(&h)?,
            };
            let summary = format!("sampled {src}: {} samples in {} bins, beta={beta}, seed={seed}", h.total, h.bins.len());
            emit(out.as_deref(), &body, &summary)
        }
        Command::Fit { graphs, couplings, target, beta_grid, out } => {
            let (src, g) = graphs.exactly(1)?.remove(0);
            let h = read_histogram_csv(&target)?;
            let grid = parse_beta_grid(&beta_grid)?;
            let model = GibbsModel::new(g, couplings.j.to_scalar(), couplings.h.to_scalar(), 0.0, h.observables.clone())?;
            let fit = fit_temperature(&model, &h, &grid)?;
            #[derive(Serialize)]
            struct Report {
                graph: GraphInfo,
                couplings: CouplingEcho,
                target: String,
                samples: u64,
                grid_points: usize,
                fit: TemperatureFit<f64>,
            }
            let report = Report {
                graph: GraphInfo::new(&src, &model.graph),
                couplings: couplings.echo(),
                target: target.display().to_string(),
                samples: h.total,
                grid_points: grid.len(),
                fit,
            };
            let summary = format!("fit {src}: beta={} (total variation {:.4})", fit.beta, fit.total_variation);
            emit(out.as_deref(), &json(&report)?, &summary)
        }
        Command::Scan { input, trees, all_graphs, level, observables, quantum, tol, out } => {
            let (family, gs) = match (input, trees, all_graphs) {
                (Some(p), None, None) => {
                    let gs = if p.as_os_str() == "-" {
                        read_graph6_stream(std::io::stdin().lock())?
                    } else {
                        let f = File::open(&p).map_err(|e| Failure::io(&p, e))?;
                        read_graph6_stream(BufReader::new(f))?
                    };
                    (p.display().to_string(), gs)
                }
                (None, Some(n), None) => (format!("trees n={n}"), enumerate_trees(n)?),
                (None, None, Some(n)) => (format!("graphs n={n}"), enumerate_graphs(n)?),
                _ => return Err(Failure::usage("give exactly one of --input, --trees, --graphs")),
            };
            let level = match level {
                LevelArg::CoIsing => ScanLevel::EnergyMarginal,
                LevelArg::Longitudinal => ScanLevel::Bivariate,
                LevelArg::Multivariate => ScanLevel::Multivariate { observables: parse_observables(&observables)? },
                LevelArg::QuantumExtremal => ScanLevel::QuantumExtremal { params: quantum.params() },
                LevelArg::QuantumFull => ScanLevel::QuantumFull { params: quantum.params() },
            };
            let r = scan_graphs(&gs, &family, &level, &ScanOptions { tol, ..ScanOptions::default() })?;
            scan(&r, out.as_deref())
        }
        Command::Fixtures { out } => {
            let list: Vec<GraphInfo> = FIXTURE_NAMES.iter().map(|n| Ok(GraphInfo::new(n, &fixture(n)?))).collect::<Result<_, Failure>>()?;
            let summary = format!("{} fixtures: {}", list.len(), FIXTURE_NAMES.join(" "));
            emit(out.as_deref(), &json(&list)?, &summary)
        }
    }
}

fn invariants(src: &str, g: &Graph, obs: &ObservableSet, out: Option<&Path>) -> Result<(), Failure> {
    let p = signature_polynomial(g, obs)?;
    let marginal = p.marginal(2)?.energy_spectrum();
    #[derive(Serialize)]
    struct Report {
        graph: GraphInfo,
        char_poly: IntPolynomial,
        energy_marginal: BTreeMap<i64, u64>,
        observables: Vec<String>,
        polynomial: Vec<Term>,
    }
    let summary = format!(
        "{src}: n={}, |E|={}, energy marginal {{{}}}",
        g.n(),
        g.edge_count(),
        marginal.levels.iter().map(|(e, c)| format!("{e}:{c}")).collect::<Vec<_>>().join(", ")
    );
    let report = Report {
        graph: GraphInfo::new(src, g),
        char_poly: char_poly(&g.adjacency()),
        energy_marginal: marginal.levels,
        observables: obs.labels(),
        polynomial: p.canonical_terms(),
    };
    emit(out, &json(&report)?, &summary)
}

fn compare(
    gs: &[(String, Graph)],
    classical: InvariantReport,
    quantum: Option<(CouplingEcho, ProbeReport<f64>)>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct QuantumPart {
        couplings: CouplingEcho,
        #[serde(flatten)]
        report: ProbeReport<f64>,
    }
    #[derive(Serialize)]
    struct Report {
        graphs: [GraphInfo; 2],
        #[serde(flatten)]
        classical: InvariantReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        quantum: Option<QuantumPart>,
    }
    let mut summary = format!(
        "{} vs {}: co_ising={} longitudinal_co_ising={}",
        gs[0].0, gs[1].0, classical.co_ising, classical.longitudinal_co_ising
    );
    if let Some(m) = classical.multivariate_equal {
        summary += &format!(" multivariate_equal={m}");
    }
    if let Some((_, r)) = &quantum {
        summary += &format!(" quantum: {}", r.verdict);
    }
    let report = Report {
        graphs: [GraphInfo::new(&gs[0].0, &gs[0].1), GraphInfo::new(&gs[1].0, &gs[1].1)],
        classical,
        quantum: quantum.map(|(couplings, report)| QuantumPart { couplings, report }),
    };
    emit(out, &json(&report)?, &summary)
}

fn qspectrum(src: &str, g: &Graph, couplings: CouplingEcho, s: Option<f64>, spectrum: Spectrum<f64>, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let body = match format {
        Format::Csv => {
            let mut b = String::from("index,eigenvalue\n");
            for (i, v) in spectrum.eigenvalues.iter().enumerate() {
                b += &format!("{},{v}\n", i + 1);
            }
            b
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                graph: GraphInfo,
                couplings: CouplingEcho,
                #[serde(skip_serializing_if = "Option::is_none")]
                s: Option<f64>,
                spectrum: &'a Spectrum<f64>,
            }
            json(&Report { graph: GraphInfo::new(src, g), couplings, s, spectrum: &spectrum })?
        }
    };
    let summary = format!(
        "{src}: {} eigenvalues, lowest {:.10}, residual bound {:.1e}",
        spectrum.len(),
        spectrum.min().unwrap_or(f64::NAN),
        spectrum.residual
    );
    emit(out, &body, &summary)
}

fn scan(r: &ScanResult, out: Option<&Path>) -> Result<(), Failure> {
    let body = json(r)?;
    match out {
        Some(p) => write_atomic(p, &body)?,
        None => print!("{body}"),
    }
    eprint!("{}", r.summary());
    Ok(())
}

/// Reads the CSV written by `sample`: `bin_index,<labels>,count,...`.
pub fn read_histogram_csv(path: &PathBuf) -> Result<SignatureHistogram, Failure> {
    let mut text = String::new();
    File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(|e| Failure::io(path, e))?;
    parse_histogram_csv(&text).map_err(|m| Failure::usage(format!("{}: {m}", path.display())))
}

pub fn parse_histogram_csv(text: &str) -> Result<SignatureHistogram, String> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let count_col = cols.iter().position(|&c| c == "count").ok_or("header has no count column")?;
    if cols.first() != Some(&"bin_index") || count_col < 2 {
        return Err("expected header bin_index,<observables>,count,...".into());
    }
    let obs = parse_observables(&cols[1..count_col].join(",")).map_err(|e| e.to_string())?;
    if obs.labels() != cols[1..count_col] {
        return Err(format!("observable columns {:?} must start with e,m", &cols[1..count_col]));
    }
    let mut h = SignatureHistogram::new(obs);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = i + 2;
        let field = |k: usize| rec.get(k).ok_or_else(|| format!("line {line}: missing column {k}"));
        let tuple = (1..count_col)
            .map(|k| field(k)?.trim().parse::<i64>().map_err(|e| format!("line {line}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let count: u64 = field(count_col)?.trim().parse().map_err(|e| format!("line {line}: {e}"))?;
        h.add_count(tuple, count).map_err(|e| e.to_string())?;
    }
    Ok(h)
}

/// `START:STOP:STEP` (inclusive of STOP up to rounding) or a comma list.
pub fn parse_beta_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::usage(format!("invalid beta grid {text:?}: expected START:STOP:STEP or a comma list"));
    let num = |s: &str| s.parse::<Coupling>().map(|c| c.to_scalar::<f64>()).map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0 && b >= a) {
                return Err(bad());
            }
            let steps = ((b - a) / step + 1e-9).floor() as usize;
            (0..=steps).map(|i| a + i as f64 * step).collect()
        }
        [list] => list.split(',').map(|s| num(s.trim())).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|&b| b < 0.0) {
        return Err(bad());
    }
    Ok(grid)
}
