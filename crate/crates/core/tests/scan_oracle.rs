mod common;

use common::{all_pairs_oracle, scan_equal_pairs};
use cospec::classical::ObservableSet;
use cospec::graph::{fixture, Graph};
use cospec::quantum::IsingParams;
use cospec::scan::{enumerate_graphs, enumerate_trees, scan_graphs, ScanLevel, ScanOptions};

fn families() -> Vec<(String, Vec<Graph>)> {
    let mut out = Vec::new();
    for n in 3..=6 {
        out.push((format!("graphs n={n}"), enumerate_graphs(n).unwrap()));
    }
    for n in [6, 7, 8] {
        out.push((format!("trees n={n}"), enumerate_trees(n).unwrap()));
    }
    let mut mixed: Vec<Graph> = ["G1", "G2", "G3", "G4"].iter().map(|f| fixture(f).unwrap()).collect();
    mixed.extend(enumerate_trees(5).unwrap());
    mixed.extend(enumerate_graphs(4).unwrap());
    out.push(("fixtures and small graphs".into(), mixed));
    out
}

#[test]
fn classical_levels_match_all_pairs_oracle() {
    let levels = [
        ScanLevel::EnergyMarginal,
        ScanLevel::Bivariate,
        ScanLevel::Multivariate { observables: ObservableSet::with_omegas(&[2]).unwrap() },
        ScanLevel::Multivariate { observables: ObservableSet::with_omegas(&[2, 3]).unwrap() },
    ];
    for (name, gs) in families() {
        assert!(gs.len() <= 200);
        for level in &levels {
            let r = scan_graphs(&gs, &name, level, &ScanOptions::default()).unwrap();
            assert_eq!(scan_equal_pairs(&r), all_pairs_oracle(&gs, level, 0.0), "{name} / {}", level.name());
            assert!(r.pairs.windows(2).all(|w| (w[0].first, w[0].second) < (w[1].first, w[1].second)));
        }
    }
}

#[test]
fn quantum_levels_match_all_pairs_oracle() {
    let params = [IsingParams::unit(), IsingParams::new(1.0, 0.0, 0.0), IsingParams::new(0.5, -1.0, 0.8)];
    for (name, gs) in families().into_iter().filter(|(_, gs)| gs.iter().all(|g| g.n() <= 6)) {
        for p in params {
            for level in [ScanLevel::QuantumExtremal { params: p }, ScanLevel::QuantumFull { params: p }] {
                let opts = ScanOptions::default();
                let r = scan_graphs(&gs, &name, &level, &opts).unwrap();
                assert_eq!(scan_equal_pairs(&r), all_pairs_oracle(&gs, &level, opts.tol), "{name} / {} / {p:?}", level.name());
            }
        }
    }
}

#[test]
fn unit_quantum_probe_finds_no_counterexample_on_small_graphs() {
    for n in 2..=6 {
        let gs = enumerate_graphs(n).unwrap();
        let r = scan_graphs(&gs, "graphs", &ScanLevel::QuantumExtremal { params: IsingParams::unit() }, &ScanOptions::default()).unwrap();
        assert_eq!(r.non_isomorphic_pairs, 0, "n = {n}");
    }
}

#[test]
fn all_trees_are_co_ising() {
    for n in 2..=8 {
        let ts = enumerate_trees(n).unwrap();
        let r = scan_graphs(&ts, "trees", &ScanLevel::EnergyMarginal, &ScanOptions::default()).unwrap();
        let k = ts.len();
        assert_eq!(r.buckets, 1);
        assert_eq!(r.non_isomorphic_pairs, k * (k - 1) / 2);
    }
}
