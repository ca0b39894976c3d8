//! Experiment runner: per seed, draw one graph, feed it to each configured
//! analysis, and serialize the collected rows. Row order is (seed, analysis,
//! row) in config order, so reruns of the same config are byte-identical.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{AnalysisKind, ExperimentConfig};
use crate::error::{Error, Result};
use crate::expansion::{
    cheeger_bounds, hyperplane_cut_edges, spectral_gap, theorem_check, InducedMode,
};
use crate::graph::{Graph, SubgraphView};
use crate::io::{
    format_real, write_results_csv, write_results_json, write_summary_json, ResultRow,
};
use crate::processes::{estimate_mixing_time, push_rumor_rounds, si_spread_rounds};
use crate::sampler::{sample_graph_bucketed, sample_graph_naive};
use crate::strips::{empirical_cover_probability, strip_spread, strip_width, StripIndex};
use crate::{Real, VertexId};

/// Serialization of the results table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Where the runner put its output.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub results_path: PathBuf,
    pub summary_path: PathBuf,
    pub rows: usize,
}

/// Draw the graph for one seed. The bucketed sampler is the default; when
/// the strip decomposition degenerates (tiny n for the given gamma) the
/// naive sampler steps in, which draws the exact same graph.
pub fn sample_for_run(config: &ExperimentConfig, seed: u64) -> Result<(Graph, &'static str)> {
    let params = config.params_for_seed(seed);
    match sample_graph_bucketed(&params, config.gamma) {
        Ok(g) => Ok((g, "bucketed")),
        Err(Error::DegenerateStrips(_)) => Ok((sample_graph_naive(&params)?, "naive")),
        Err(e) => Err(e),
    }
}

/// Run every configured analysis for every seed and write
/// `results.csv` (or `.json`) plus `summary.json` into `out_dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<RunArtifacts> {
    // Full validation happens before any sampling; an unknown analysis can
    // never reach this point because the config parser rejects it.
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;

    let mut rows: Vec<ResultRow> = Vec::new();
    let mut sampler_used = "bucketed";
    for &seed in &config.seeds {
        let (graph, sampler) = sample_for_run(config, seed)?;
        sampler_used = sampler;
        for &kind in &config.experiments {
            rows.extend(run_analysis(kind, &graph, config, seed)?);
        }
    }

    let results_path = match format {
        OutputFormat::Csv => {
            let p = out_dir.join("results.csv");
            write_results_csv(&p, &rows)?;
            p
        }
        OutputFormat::Json => {
            let p = out_dir.join("results.json");
            write_results_json(&p, &rows)?;
            p
        }
    };
    let summary_path = out_dir.join("summary.json");
    let summary = serde_json::json!({
        "config": config,
        "sampler": sampler_used,
        "row_count": rows.len(),
        "results": results_path.file_name().and_then(|s| s.to_str()),
    });
    write_summary_json(&summary_path, &summary)?;
    Ok(RunArtifacts {
        results_path,
        summary_path,
        rows: rows.len(),
    })
}

/// Rows of a single analysis on one sampled graph.
pub fn run_analysis(
    kind: AnalysisKind,
    graph: &Graph,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<ResultRow>> {
    match kind {
        AnalysisKind::Strips => strips_rows(graph, config, seed),
        AnalysisKind::CoverBound => cover_rows(config, seed),
        AnalysisKind::Expansion => expansion_rows(graph, config, seed),
        AnalysisKind::Spectral => spectral_rows(graph, config, seed),
        AnalysisKind::Walk => walk_rows(graph, config, seed),
        AnalysisKind::Rumor => rumor_rows(graph, config, seed),
        AnalysisKind::Si => si_rows(graph, config, seed),
        AnalysisKind::CutContrast => cut_rows(graph, seed),
    }
}

/// The subgraph the config points the analyses at.
fn induced_view<'g>(graph: &'g Graph, config: &ExperimentConfig) -> Result<SubgraphView<'g>> {
    let n = graph.vertex_count();
    let scale = (n as Real).ln().powf(config.gamma);
    match config.mode {
        InducedMode::WeightThreshold => {
            graph.induced_by_weight(config.c_prime * scale, f64::INFINITY)
        }
        InducedMode::WeightBand => {
            graph.induced_by_weight(config.c1_prime * scale, config.c2_prime * scale)
        }
        InducedMode::DegreeThreshold => {
            graph.induced_by_degree((config.c_prime * scale).ceil() as usize, usize::MAX)
        }
        InducedMode::DegreeBand => graph.induced_by_degree(
            (config.c1_prime * scale).ceil() as usize,
            (config.c2_prime * scale).floor() as usize,
        ),
    }
}

/// Materialize the largest connected component with dense new ids.
fn largest_component(g: &Graph) -> Result<(Graph, usize)> {
    let comps = crate::graph::connected_components(g);
    let count = comps.members.len();
    let mut members: Vec<VertexId> = comps.largest().to_vec();
    members.sort_unstable();
    let mut new_of_old = vec![VertexId::MAX; g.vertex_count()];
    for (new, &old) in members.iter().enumerate() {
        new_of_old[old as usize] = new as VertexId;
    }
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        let (nu, nv) = (new_of_old[u as usize], new_of_old[v as usize]);
        if nu != VertexId::MAX && nv != VertexId::MAX {
            edges.push((nu, nv));
        }
    }
    let data = g
        .vertex_data()
        .map(|data| members.iter().map(|&v| data[v as usize].clone()).collect());
    Ok((Graph::from_edges(members.len(), &edges, data)?, count))
}

fn int_row(name: &str, seed: u64, metric: &str, key: String, value: usize) -> ResultRow {
    ResultRow::new(name, seed, metric, key, value.to_string())
}

fn real_row(name: &str, seed: u64, metric: &str, key: String, value: Real) -> ResultRow {
    ResultRow::new(name, seed, metric, key, format_real(value))
}

fn strips_rows(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::Strips.to_string();
    let n = graph.vertex_count();
    let (m, ell) = strip_width(n, config.gamma)?;
    let data = graph
        .vertex_data()
        .ok_or_else(|| Error::param("strip analysis needs vertex positions"))?;
    let positions: Vec<_> = data.iter().map(|d| d.position.clone()).collect();
    let idx = StripIndex::with_count(&positions, m)?;
    let view = induced_view(graph, config)?;
    let kept = view.kept();

    let mut rows = vec![
        int_row(&name, seed, "m", String::new(), m),
        real_row(&name, seed, "ell", String::new(), ell),
        int_row(&name, seed, "v_prime", String::new(), kept.len()),
    ];
    if !kept.is_empty() {
        let (k_star, coord) = strip_spread(&idx, kept)?;
        rows.push(int_row(&name, seed, "k_star", String::new(), k_star));
        rows.push(int_row(&name, seed, "k_star_coord", String::new(), coord));
    }
    for i in 0..idx.dim() {
        let mut occupied = vec![false; m];
        for &v in kept {
            occupied[idx.strip_id(i, v) as usize] = true;
        }
        rows.push(int_row(
            &name,
            seed,
            "occupied",
            format!("coord={i}"),
            occupied.iter().filter(|&&b| b).count(),
        ));
    }
    Ok(rows)
}

fn cover_rows(config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::CoverBound.to_string();
    let params = config.params_for_seed(seed);
    let outcome = empirical_cover_probability(
        &params,
        config.gamma,
        config.cover_s,
        config.cover_k,
        config.cover_trials,
    )?;
    Ok(vec![
        real_row(&name, seed, "frequency", String::new(), outcome.frequency),
        real_row(&name, seed, "mean_bound", String::new(), outcome.mean_bound),
        int_row(&name, seed, "exact", String::new(), outcome.exact as usize),
        int_row(&name, seed, "trials", String::new(), outcome.trials),
    ])
}

fn expansion_rows(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::Expansion.to_string();
    let mut plan = config.probes.clone();
    plan.seed ^= seed;
    let report = theorem_check(
        graph,
        config.model.tau,
        config.gamma,
        &config.induced_spec(),
        &plan,
    )?;
    let mut rows = Vec::new();
    for row in &report.rows {
        let key = format!("s={}", row.s);
        rows.push(real_row(&name, seed, "worst_ratio", key.clone(), row.worst_ratio));
        rows.push(real_row(
            &name,
            seed,
            "predicted_shape",
            key.clone(),
            row.predicted_shape,
        ));
        rows.push(ResultRow::new(name.as_str(), seed, "method", key, row.method.to_string()));
    }
    rows.push(real_row(&name, seed, "fitted_epsilon", String::new(), report.fitted_epsilon));
    rows.push(real_row(&name, seed, "fitted_c_d", String::new(), report.fitted_c_d));
    rows.push(int_row(&name, seed, "induced_size", String::new(), report.induced_size));
    rows.push(real_row(&name, seed, "log_branch", String::new(), report.log_branch));
    rows.push(int_row(&name, seed, "connected", String::new(), report.connected as usize));
    rows.push(int_row(
        &name,
        seed,
        "component_count",
        String::new(),
        report.component_count,
    ));
    Ok(rows)
}

fn spectral_rows(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::Spectral.to_string();
    let (induced, _) = induced_view(graph, config)?.to_graph()?;
    if induced.vertex_count() < 2 {
        return Ok(vec![int_row(&name, seed, "skipped", String::new(), 1)]);
    }
    let gap = spectral_gap(&induced, true)?;
    let (lo, hi) = cheeger_bounds(gap.lambda2)?;
    Ok(vec![
        real_row(&name, seed, "lambda2", String::new(), gap.lambda2),
        int_row(&name, seed, "connected", String::new(), gap.connected as usize),
        int_row(&name, seed, "dense", String::new(), gap.dense as usize),
        real_row(&name, seed, "cheeger_lo", String::new(), lo),
        real_row(&name, seed, "cheeger_hi", String::new(), hi),
        int_row(&name, seed, "n", String::new(), induced.vertex_count()),
    ])
}

fn walk_rows(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::Walk.to_string();
    let (induced, _) = induced_view(graph, config)?.to_graph()?;
    if induced.vertex_count() < 2 || induced.edge_count() == 0 {
        return Ok(vec![int_row(&name, seed, "skipped", String::new(), 1)]);
    }
    let (comp, count) = largest_component(&induced)?;
    if comp.vertex_count() > config.walk_max_vertices {
        // Exact powering holds an n x n matrix; refuse quadratic blowups.
        return Ok(vec![
            int_row(&name, seed, "skipped", String::new(), 1),
            int_row(&name, seed, "component_size", String::new(), comp.vertex_count()),
        ]);
    }
    let est = estimate_mixing_time(&comp, config.walk_eps, config.walk_max_steps)?;
    Ok(vec![
        int_row(&name, seed, "steps", String::new(), est.steps),
        int_row(&name, seed, "converged", String::new(), est.converged as usize),
        real_row(&name, seed, "tv", String::new(), est.tv),
        int_row(&name, seed, "component_size", String::new(), comp.vertex_count()),
        int_row(&name, seed, "component_count", String::new(), count),
    ])
}

fn rumor_rows(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::Rumor.to_string();
    let (induced, _) = induced_view(graph, config)?.to_graph()?;
    if induced.vertex_count() < 2 || induced.edge_count() == 0 {
        return Ok(vec![int_row(&name, seed, "skipped", String::new(), 1)]);
    }
    let (comp, count) = largest_component(&induced)?;
    let st = push_rumor_rounds(&comp, 0, config.spread_coverage, seed, config.spread_max_rounds)?;
    Ok(vec![
        int_row(&name, seed, "rounds", String::new(), st.rounds),
        int_row(&name, seed, "informed", String::new(), st.informed),
        int_row(&name, seed, "reached", String::new(), st.reached as usize),
        int_row(&name, seed, "component_size", String::new(), comp.vertex_count()),
        int_row(&name, seed, "component_count", String::new(), count),
    ])
}

fn si_rows(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::Si.to_string();
    let (induced, _) = induced_view(graph, config)?.to_graph()?;
    if induced.vertex_count() < 2 || induced.edge_count() == 0 {
        return Ok(vec![int_row(&name, seed, "skipped", String::new(), 1)]);
    }
    let (comp, count) = largest_component(&induced)?;
    let st = si_spread_rounds(
        &comp,
        0,
        config.spread_beta,
        config.spread_coverage,
        seed,
        config.spread_max_rounds,
    )?;
    Ok(vec![
        int_row(&name, seed, "rounds", String::new(), st.rounds),
        int_row(&name, seed, "informed", String::new(), st.informed),
        int_row(&name, seed, "reached", String::new(), st.reached as usize),
        int_row(&name, seed, "component_size", String::new(), comp.vertex_count()),
        int_row(&name, seed, "component_count", String::new(), count),
    ])
}

fn cut_rows(graph: &Graph, seed: u64) -> Result<Vec<ResultRow>> {
    let name = AnalysisKind::CutContrast.to_string();
    let d = graph
        .vertex_data()
        .and_then(|data| data.first())
        .map(|v| v.position.dim())
        .ok_or_else(|| Error::param("cut contrast needs vertex positions"))?;
    let mut rows = vec![
        int_row(&name, seed, "n", String::new(), graph.vertex_count()),
        int_row(&name, seed, "m", String::new(), graph.edge_count()),
    ];
    let mut min_cut = usize::MAX;
    for i in 0..d {
        let cut = hyperplane_cut_edges(graph, i)?;
        min_cut = min_cut.min(cut);
        rows.push(int_row(&name, seed, "cut", format!("coord={i}"), cut));
    }
    rows.push(int_row(&name, seed, "min_cut", String::new(), min_cut));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelSection;
    use crate::expansion::ProbePlan;
    use crate::geometry::Geometry;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            model: ModelSection {
                n: 300,
                d: 2,
                tau: 2.5,
                alpha: 1.5,
                kernel_c: 1.0,
                geometry: Geometry::Mcd,
            },
            gamma: 0.8,
            c_prime: 0.5,
            c1_prime: 1.0,
            c2_prime: 2.0,
            mode: InducedMode::WeightThreshold,
            probes: ProbePlan {
                samples_per_size: 5,
                grid_points: 4,
                greedy_restarts: 2,
                ..ProbePlan::default()
            },
            seeds: vec![1, 2],
            experiments: vec![
                AnalysisKind::Strips,
                AnalysisKind::CoverBound,
                AnalysisKind::Expansion,
                AnalysisKind::Spectral,
                AnalysisKind::Walk,
                AnalysisKind::Rumor,
                AnalysisKind::Si,
                AnalysisKind::CutContrast,
            ],
            allow_subcritical: true,
            walk_eps: 0.25,
            walk_max_steps: 1000,
            walk_max_vertices: 4000,
            spread_coverage: 0.5,
            spread_beta: 1.0,
            spread_max_rounds: 1000,
            cover_s: 3,
            cover_k: 1,
            cover_trials: 20,
        }
    }

    #[test]
    fn full_run_is_deterministic() {
        let config = small_config();
        let dir = tempfile::tempdir().unwrap();
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        let a = run_experiment(&config, &out_a, OutputFormat::Csv).unwrap();
        let b = run_experiment(&config, &out_b, OutputFormat::Csv).unwrap();
        assert!(a.rows > 0);
        let bytes_a = std::fs::read(&a.results_path).unwrap();
        let bytes_b = std::fs::read(&b.results_path).unwrap();
        assert_eq!(bytes_a, bytes_b);
        let sum_a = std::fs::read(&a.summary_path).unwrap();
        let sum_b = std::fs::read(&b.summary_path).unwrap();
        assert_eq!(sum_a, sum_b);
    }

    #[test]
    fn json_format_writes_results_json() {
        let mut config = small_config();
        config.seeds = vec![1];
        config.experiments = vec![AnalysisKind::Strips];
        let dir = tempfile::tempdir().unwrap();
        let art = run_experiment(&config, dir.path(), OutputFormat::Json).unwrap();
        assert!(art.results_path.ends_with("results.json"));
        let text = std::fs::read_to_string(&art.results_path).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(parsed.as_array().unwrap().len() > 0);
    }

    #[test]
    fn invalid_config_fails_before_sampling() {
        let mut config = small_config();
        config.experiments.clear();
        let dir = tempfile::tempdir().unwrap();
        let err = run_experiment(&config, dir.path(), OutputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("experiments"));
        assert!(!dir.path().join("results.csv").exists());
    }

    #[test]
    fn degenerate_strips_fall_back_to_the_naive_sampler() {
        let mut config = small_config();
        config.model.n = 40; // far below the bucketed minimum at this gamma
        config.gamma = 2.0;
        let (g, sampler) = sample_for_run(&config, 7).unwrap();
        assert_eq!(sampler, "naive");
        assert_eq!(g.vertex_count(), 40);
    }
}
