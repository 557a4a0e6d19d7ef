//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The process fails when a
//! criterion outside `KNOWN_RED` fails, or when a `KNOWN_RED` criterion
//! starts passing, so the list has to be kept honest either way.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ricci_core::curvature::{
    all_edge_curvatures, forman_ricci_unweighted, haantjes_ricci_edge, menger_ricci_edge, ollivier_ricci_edge,
    CurvatureConfig, FormanWeighting,
};
use ricci_core::graph::{DistanceMode, Graph};
use ricci_core::indicators::{
    garch11_fit, garch11_loglik, indicator_correlogram, min_risk_portfolio, simulate_garch11, IndicatorSeries,
};
use ricci_core::market::{log_returns, pearson_window, rolling_epochs, threshold_network, Epoch, ReturnWindow};
use ricci_core::measures::{
    communication_efficiency, louvain_modularity, modularity, network_entropy, LouvainConfig,
};
use ricci_core::pipeline::{compute_indicators, run_pipeline, Perturbation, PipelineConfig, INDICATORS_FILE};
use ricci_core::synthetic::{factor_panel, FactorPanelConfig};

use common::*;

/// Criteria that cannot hold under the required definitions.
const KNOWN_RED: &[u32] = &[5, 11];

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "worked-example fidelity", c1_worked_examples),
        (2, "Ollivier oracle equivalence", c2_ollivier_oracle),
        (3, "Forman unit-weight reduction", c3_forman_reduction),
        (4, "Haantjes/Menger constant ratio", c4_constant_ratio),
        (5, "Ollivier cycle contributions", c5_cycles),
        (6, "closed-form network measures", c6_network_measures),
        (7, "GARCH(1,1) recovery", c7_garch),
        (8, "Markowitz oracle", c8_markowitz),
        (9, "regime detection", c9_regimes),
        (10, "correlogram directionality", c10_correlogram),
        (11, "perturbation robustness", c11_perturbation),
        (12, "determinism", c12_determinism),
        (13, "performance envelope", c13_performance),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, check) in &criteria {
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id:>2} ({name}): {} [{secs:.2}s]", out.detail);
        if out.pass {
            passed += 1;
        }
        if out.pass == KNOWN_RED.contains(id) {
            unexpected.push(*id);
        }
    }
    println!("{passed} of {} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        println!("unexpected verdicts for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn c1_worked_examples() -> Outcome {
    let (n, e) = forman_example();
    let g = Graph::unweighted(n, &e).unwrap();
    let f01 = forman_ricci_unweighted(&g, 0, 1).unwrap();
    let f79 = forman_ricci_unweighted(&g, 7, 9).unwrap();
    let (n, e) = metric_example();
    let g = Graph::unweighted(n, &e).unwrap();
    let mr = menger_ricci_edge(&g, 1, 2).unwrap();
    let hr = haantjes_ricci_edge(&g, 1, 2, None).unwrap();
    let hr_expected = 1.0 + 3f64.sqrt() + 4f64.sqrt();
    let pass = close(f01, -2.0, 1e-12)
        && close(f79, -4.0, 1e-12)
        && close(mr, 3f64.sqrt() / 2.0, 1e-12)
        && close(hr, hr_expected, 1e-12);
    outcome(
        pass,
        format!("FR(v0,v1)={f01} FR(v7,v9)={f79} MR(v1,v2)={mr:.15} HR(v1,v2)={hr:.15} (expected {hr_expected:.15})"),
    )
}

fn c2_ollivier_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut edges_checked = 0;
    for k in 0..200 {
        let n = rng.gen_range(2..=8);
        let pairs = random_connected(&mut rng, n, 0.35);
        let weighted = k % 2 == 1;
        let lengths: Vec<(usize, usize, f64)> = pairs
            .iter()
            .map(|&(u, v)| (u, v, if weighted { rng.gen_range(0.1..2.0) } else { 1.0 }))
            .collect();
        let (g, mode) = if weighted {
            (Graph::with_lengths(n, &lengths).unwrap(), DistanceMode::Weighted)
        } else {
            (Graph::unweighted(n, &pairs).unwrap(), DistanceMode::Hop)
        };
        for &(u, v, _) in &lengths {
            let got = ollivier_ricci_edge(&g, u, v, mode).unwrap();
            let want = oracle_ollivier(n, &lengths, u, v);
            worst = worst.max((got - want).abs());
            edges_checked += 1;
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{edges_checked} edges on 200 graphs (hop and weighted), max |diff| = {worst:.2e}"),
    )
}

fn c3_forman_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut total = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=20);
        let p = rng.gen_range(0.05..0.6);
        let pairs = random_connected(&mut rng, n, p);
        let g = Graph::unweighted(n, &pairs).unwrap();
        let cfg = CurvatureConfig {
            forman_weighting: FormanWeighting::Unit,
            ..CurvatureConfig::unweighted()
        };
        let all = all_edge_curvatures(&g, &cfg).unwrap().forman.unwrap();
        for (id, &(u, v)) in g.edges().iter().map(|e| (e.u, e.v)).collect::<Vec<_>>().iter().enumerate() {
            let expected = 4.0 - g.degree(u) as f64 - g.degree(v) as f64;
            let direct = forman_ricci_unweighted(&g, u, v).unwrap();
            if direct != expected || all[id] != expected {
                mismatches += 1;
            }
            total += 1;
        }
    }
    outcome(mismatches == 0, format!("{total} edges on 100 graphs, {mismatches} inexact"))
}

fn c4_constant_ratio() -> Outcome {
    let target = 2.0 / 3f64.sqrt();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    // book graphs: spine (0, 1) with k pages, each page a node joined to both
    for k in 1..=12 {
        let mut e = vec![(0, 1)];
        for p in 0..k {
            e.push((0, 2 + p));
            e.push((1, 2 + p));
        }
        let g = Graph::unweighted(k + 2, &e).unwrap();
        let ratio = haantjes_ricci_edge(&g, 0, 1, None).unwrap() / menger_ricci_edge(&g, 0, 1).unwrap();
        worst = worst.max((ratio - target).abs());
        checked += 1;
    }
    // triangle fans (hub 0 over the path 1..k): the two rim end edges have
    // only their triangle as a detour once the fan is a single triangle;
    // in general, every edge of K3 and every edge of a triangle with pendant
    // trees qualifies
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let extra = rng.gen_range(0..10);
        let mut e = vec![(0, 1), (1, 2), (0, 2)];
        for v in 3..3 + extra {
            e.push((rng.gen_range(0..v), v));
        }
        let g = Graph::unweighted(3 + extra, &e).unwrap();
        for &(u, v) in &[(0, 1), (1, 2), (0, 2)] {
            let ratio = haantjes_ricci_edge(&g, u, v, None).unwrap() / menger_ricci_edge(&g, u, v).unwrap();
            worst = worst.max((ratio - target).abs());
            checked += 1;
        }
    }
    outcome(worst <= 1e-12, format!("{checked} edges, max |HR/MR - 2/sqrt(3)| = {worst:.2e}"))
}

fn c5_cycles() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in 3..=6 {
        let lengths: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        let pairs: Vec<(usize, usize)> = lengths.iter().map(|&(u, v, _)| (u, v)).collect();
        let g = Graph::unweighted(n, &pairs).unwrap();
        let mut values = Vec::new();
        for &(u, v) in &pairs {
            let got = ollivier_ricci_edge(&g, u, v, DistanceMode::Hop).unwrap();
            let want = oracle_ollivier(n, &lengths, u, v);
            pass &= close(got, want, 1e-9);
            values.push(got);
        }
        let ok = if n < 6 {
            values.iter().all(|&k| k > 0.0)
        } else {
            values.iter().all(|&k| k <= 0.0)
        };
        pass &= ok;
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &k| (a.min(k), b.max(k)));
        let want = if n < 6 { "> 0" } else { "<= 0" };
        parts.push(format!("C{n} in [{lo}, {hi}] (need {want}: {})", if ok { "ok" } else { "no" }));
    }
    outcome(pass, parts.join("; "))
}

fn c6_network_measures() -> Outcome {
    let p3 = Graph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
    let ce = communication_efficiency(&p3, DistanceMode::Hop).unwrap();
    let star = Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    let h = network_entropy(&star).unwrap();
    let two_k3 = Graph::unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
    let q = modularity(&two_k3, &[1.0; 6], &[0, 0, 0, 1, 1, 1]).unwrap();

    let mut e = Vec::new();
    for block in [[0, 1, 2, 3], [4, 5, 6, 7]] {
        for a in 0..4 {
            for b in a + 1..4 {
                e.push((block[a], block[b]));
            }
        }
    }
    e.push((3, 4));
    let bridge = Graph::unweighted(8, &e).unwrap();
    let w = vec![1.0; bridge.edge_count()];
    let part = louvain_modularity(&bridge, &w, &LouvainConfig::default()).unwrap();
    let (best_q, _) = exhaustive_best_modularity(&adjacency(&bridge, &w));
    let recovered = part.communities == vec![0, 0, 0, 0, 1, 1, 1, 1];
    let pass = close(ce, 5.0 / 6.0, 1e-12)
        && close(h, 2f64.ln(), 1e-12)
        && close(q, 0.5, 1e-12)
        && recovered
        && close(part.modularity, best_q, 1e-9);
    outcome(
        pass,
        format!(
            "CE(P3)={ce:.15} H(K1,3)={h:.15} Q(2xK3)={q} Louvain K4-K4 {:?} Q={:.12} exhaustive Q={best_q:.12}",
            part.communities, part.modularity
        ),
    )
}

fn c7_garch() -> Outcome {
    let (a0, a1, b1) = (0.1, 0.1, 0.8);
    let x = simulate_garch11(a0, a1, b1, 10_000, 7);
    let fit = match garch11_fit(&x, None) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("fit failed: {e}")),
    };
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let xd: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let true_ll = garch11_loglik(&xd, a0, a1, b1);
    let pass = close(fit.alpha0, a0, 0.05)
        && close(fit.alpha1, a1, 0.05)
        && close(fit.beta1, b1, 0.05)
        && fit.loglik >= true_ll - 1e-6;
    outcome(
        pass,
        format!(
            "alpha0={:.4} alpha1={:.4} beta1={:.4}, loglik {:.4} vs true-parameter {:.4}",
            fit.alpha0, fit.alpha1, fit.beta1, fit.loglik, true_ll
        ),
    )
}

fn c8_markowitz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let rank = 1 + k % 4;
        let a = DMatrix::from_fn(3, rank, |_, _| rng.gen_range(-1.0..1.0));
        let s = &a * a.transpose();
        let arr = [
            [s[(0, 0)], s[(0, 1)], s[(0, 2)]],
            [s[(1, 0)], s[(1, 1)], s[(1, 2)]],
            [s[(2, 0)], s[(2, 1)], s[(2, 2)]],
        ];
        let got = min_risk_portfolio(&s).unwrap().risk;
        worst = worst.max((got - grid_min_variance3(&arr)).abs());
    }
    let mut identity_exact = true;
    for n in 1..=50 {
        let p = min_risk_portfolio(&DMatrix::identity(n, n)).unwrap();
        identity_exact &= p.weights.iter().all(|&w| w == 1.0 / n as f64);
    }
    outcome(
        worst <= 1e-4 && identity_exact,
        format!("50 covariances, max |sigma_P - grid| = {worst:.2e}; identity 1/N exact for N=1..50: {identity_exact}"),
    )
}

struct RegimeRun {
    series: IndicatorSeries,
    perturbed: IndicatorSeries,
    crash: Vec<usize>,
    normal: Vec<usize>,
    seconds: f64,
}

fn regime_panel_config() -> FactorPanelConfig {
    FactorPanelConfig {
        tickers: 50,
        rows: 600,
        crash_start: 300,
        crash_len: 60,
        ..Default::default()
    }
}

fn regime_run() -> &'static RegimeRun {
    static RUN: OnceLock<RegimeRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let pcfg = regime_panel_config();
        let panel = factor_panel(&pcfg).unwrap();
        let cfg = PipelineConfig::default();
        let start = Instant::now();
        let series = compute_indicators(&cfg, &panel).unwrap().series;
        let seconds = start.elapsed().as_secs_f64();
        let perturbed_cfg = PipelineConfig {
            perturbation: Some(Perturbation { sigma: 0.01, seed: 11 }),
            ..Default::default()
        };
        let perturbed = compute_indicators(&perturbed_cfg, &panel).unwrap().series;
        let epochs = rolling_epochs(panel.rows() - 1, cfg.tau, cfg.delta).unwrap();
        let crash_rows = pcfg.crash_rows();
        let inside = |e: &Epoch| e.start >= crash_rows.start && e.end <= crash_rows.end;
        let outside = |e: &Epoch| e.end <= crash_rows.start || e.start >= crash_rows.end;
        RegimeRun {
            series,
            perturbed,
            crash: (0..epochs.len()).filter(|&k| inside(&epochs[k])).collect(),
            normal: (0..epochs.len()).filter(|&k| outside(&epochs[k])).collect(),
            seconds,
        }
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0).max(1.0);
    (m, var.sqrt())
}

fn c9_regimes() -> Outcome {
    let run = regime_run();
    let pick = |name: &str, idx: &[usize]| -> Vec<f64> {
        let col = run.series.column(name).unwrap();
        idx.iter().map(|&k| col[k]).collect()
    };
    let (ce, ne) = (pick("edge_count", &run.crash), pick("edge_count", &run.normal));
    let (cc, nc) = (pick("community_count", &run.crash), pick("community_count", &run.normal));
    let (cf, nf) = (pick("FRE", &run.crash), pick("FRE", &run.normal));
    let (cm, nm) = (pick("mu", &run.crash), pick("mu", &run.normal));
    let min_crash_edges = ce.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_normal_edges = ne.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (ce_mean, _) = mean_sd(&ce);
    let (ne_mean, _) = mean_sd(&ne);
    let (cc_mean, _) = mean_sd(&cc);
    let (nc_mean, _) = mean_sd(&nc);
    let (cf_mean, _) = mean_sd(&cf);
    let (nf_mean, nf_sd) = mean_sd(&nf);
    let (cm_mean, _) = mean_sd(&cm);
    let (nm_mean, _) = mean_sd(&nm);
    let edges_ok = min_crash_edges > max_normal_edges && ce_mean >= 5.0 * ne_mean;
    let comm_ok = cc_mean < nc_mean;
    let fre_ok = cf_mean <= nf_mean - 3.0 * nf_sd;
    let mu_ok = cm_mean > nm_mean;
    let time_ok = run.seconds < 120.0;
    outcome(
        edges_ok && comm_ok && fre_ok && mu_ok && time_ok,
        format!(
            "{} crash / {} normal epochs; edges {ce_mean:.1} vs {ne_mean:.1} (min crash {min_crash_edges}, max normal {max_normal_edges}); \
             communities {cc_mean:.2} vs {nc_mean:.2}; FRE {cf_mean:.3} vs {nf_mean:.3} (sd {nf_sd:.3}); \
             mu {cm_mean:.3} vs {nm_mean:.3}; pipeline {:.1}s",
            run.crash.len(),
            run.normal.len(),
            run.seconds
        ),
    )
}

fn c10_correlogram() -> Outcome {
    let run = regime_run();
    let c = indicator_correlogram(&run.series, &["FRE", "mu", "sigma_p"]).unwrap();
    let (fm, fs) = (c[(0, 1)], c[(0, 2)]);
    outcome(
        fm.abs() >= 0.5 && fs.abs() >= 0.3,
        format!("Pearson(FRE, mu) = {fm:.4}, Pearson(FRE, sigma_P) = {fs:.4}"),
    )
}

fn c11_perturbation() -> Outcome {
    let run = regime_run();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["mu", "NE", "CE", "FRE", "ORE"] {
        let a = run.series.column(name).unwrap();
        let b = run.perturbed.column(name).unwrap();
        let within = a
            .iter()
            .zip(&b)
            .filter(|&(x, y)| (y - x).abs() < 0.1 * x.abs())
            .count();
        let frac = within as f64 / a.len() as f64;
        pass &= frac >= 0.95;
        parts.push(format!("{name} {:.1}%", 100.0 * frac));
    }
    outcome(
        pass,
        format!("epochs within 10% relative change under sigma=0.01: {}", parts.join(", ")),
    )
}

fn c12_determinism() -> Outcome {
    let panel = factor_panel(&regime_panel_config()).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    for d in &dirs {
        let cfg = PipelineConfig {
            out_dir: Some(d.path().to_path_buf()),
            ..Default::default()
        };
        run_pipeline(&cfg, &panel).unwrap();
        files.push(std::fs::read(d.path().join(INDICATORS_FILE)).unwrap());
    }
    outcome(
        files[0] == files[1] && !files[0].is_empty(),
        format!("two runs, indicators.csv of {} bytes, identical: {}", files[0].len(), files[0] == files[1]),
    )
}

fn c13_performance() -> Outcome {
    let pcfg = FactorPanelConfig {
        tickers: 200,
        rows: 8001,
        crash_start: 4000,
        crash_len: 60,
        seed: 13,
        ..Default::default()
    };
    let panel = factor_panel(&pcfg).unwrap();
    let mut cfg = PipelineConfig {
        delta: 22,
        ..Default::default()
    };
    cfg.curvature.ollivier = false;
    let start = Instant::now();
    let out = compute_indicators(&cfg, &panel);
    let full = start.elapsed();
    let epochs = match out {
        Ok(o) => o.series.len(),
        Err(e) => return outcome(false, format!("pipeline failed: {e}")),
    };

    // one crash epoch, threshold tuned so MST + threshold edges number about 2000
    let returns = log_returns(&panel.prices).unwrap();
    let block = returns.rows(4010, 22).into_owned();
    let window = ReturnWindow::new(block, "crash", panel.tickers.clone()).unwrap();
    let frame = pearson_window(&window).unwrap();
    let mut upper: Vec<f64> = (0..200).flat_map(|i| (i + 1..200).map(move |j| (i, j))).map(|(i, j)| frame.corr[(i, j)]).collect();
    upper.sort_by(|a, b| b.total_cmp(a));
    let graph = threshold_network(&frame, upper[1999]).unwrap();
    let ore_cfg = CurvatureConfig {
        ollivier: true,
        forman: false,
        menger: false,
        haantjes: false,
        ..Default::default()
    };
    let start = Instant::now();
    let ore = all_edge_curvatures(&graph, &ore_cfg);
    let ore_time = start.elapsed();
    let pass = full < Duration::from_secs(600) && ore.is_ok() && ore_time < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "N=200, T=8001, delta=22: {epochs} epochs with FRE/MRE/HRE in {:.1}s; ORE on {} edges in {:.2}s",
            full.as_secs_f64(),
            graph.edge_count(),
            ore_time.as_secs_f64()
        ),
    )
}
