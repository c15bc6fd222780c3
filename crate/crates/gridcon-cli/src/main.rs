//! gridcon: command-line front end for the smart-grid contingency engine.
//!
//! Subcommands: simulate, contingency, events, export-ilp, game, dataset.
//! Every run prints a self-describing JSON report (command echo, input
//! digests, solver/metric/model/seed, per-phase wall-clock). Domain errors
//! exit 1; usage errors exit 2. GRIDCON_THREADS caps solver parallelism.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use gridcon::cascade::{damage, operational_count, run_cascade, DamageMetric};
use gridcon::contingency::{
    exact_k_contingency, export_ilp, heuristic_k_contingency, parse_events_csv,
    self_updating_list, SolverKind,
};
use gridcon::datasets::{build_ieee118, build_ieee14};
use gridcon::entity::EntityId;
use gridcon::hardening::{run_game, GameScenario};
use gridcon::network::{load_network, save_network, Network};
use gridcon::state::EvalModel;

#[derive(Parser)]
#[command(name = "gridcon", version, about = "Smart-grid interdependency and contingency engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a cascade from injected failures and report the trace and damage.
    Simulate {
        #[arg(long)]
        network: PathBuf,
        /// Comma-separated entity tokens to fail at t=0 (may be empty).
        #[arg(long, default_value = "")]
        fail: String,
        #[arg(long, value_parser = parse_model, default_value = "miim")]
        model: EvalModel,
        /// Comma-separated entity tokens to harden before the cascade.
        #[arg(long, default_value = "")]
        harden: String,
        #[arg(long, value_parser = parse_metric, default_value = "state-loss")]
        metric: DamageMetric,
        /// Also emit the trace as t,entity,state CSV.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the K-contingency list.
    Contingency {
        #[arg(long)]
        network: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, value_parser = parse_solver, default_value = "heuristic")]
        solver: SolverKind,
        #[arg(long, value_parser = parse_metric, default_value = "state-loss")]
        metric: DamageMetric,
        #[arg(long, value_parser = parse_model, default_value = "miim")]
        model: EvalModel,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay an event stream and emit the self-updating list per tick.
    Events {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, value_parser = parse_solver, default_value = "heuristic")]
        solver: SolverKind,
        #[arg(long, value_parser = parse_metric, default_value = "state-loss")]
        metric: DamageMetric,
        #[arg(long, value_parser = parse_model, default_value = "miim")]
        model: EvalModel,
        /// Latency budget per recompute in milliseconds.
        #[arg(long, default_value_t = 33)]
        budget_ms: u64,
        /// Keep simulating this many milliseconds past the last event.
        #[arg(long, default_value_t = 0)]
        horizon_ms: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the K-contingency integer program in LP format.
    ExportIlp {
        #[arg(long)]
        network: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play a leader-follower hardening game scenario.
    Game {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[arg(long, value_parser = parse_model, default_value = "miim")]
        model: EvalModel,
        /// Also emit the operational-count triple as CSV.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a bundled dataset as a network file.
    Dataset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_model(s: &str) -> Result<EvalModel, String> {
    match s {
        "miim" => Ok(EvalModel::Miim),
        "iim" => Ok(EvalModel::Iim),
        other => Err(format!("unknown model `{other}` (expected miim or iim)")),
    }
}

fn parse_metric(s: &str) -> Result<DamageMetric, String> {
    match s {
        "state-loss" => Ok(DamageMetric::StateLoss),
        "failed-count" => Ok(DamageMetric::FailedCount),
        other => Err(format!("unknown metric `{other}` (expected state-loss or failed-count)")),
    }
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    match s {
        "exact" => Ok(SolverKind::Exact),
        "heuristic" => Ok(SolverKind::Heuristic),
        other => Err(format!("unknown solver `{other}` (expected exact or heuristic)")),
    }
}

/// FNV-1a over file bytes; stable digest for report provenance.
fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn read_network(path: &Path) -> Result<(Network, String)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read network file {}", path.display()))?;
    let net = load_network(&text)?;
    Ok((net, digest(text.as_bytes())))
}

fn parse_entity_list(s: &str) -> Result<Vec<EntityId>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        out.push(tok.parse::<EntityId>()?);
    }
    Ok(out)
}

fn emit(report: &serde_json::Value, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("GRIDCON_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = gridcon::init_parallelism(n.max(1));
        }
    }
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { network, fail, model, harden, metric, csv, out } => {
            let started = Instant::now();
            let (net, net_digest) = read_network(&network)?;
            let failures: BTreeSet<EntityId> = parse_entity_list(&fail)?.into_iter().collect();
            let hardened: BTreeSet<EntityId> = parse_entity_list(&harden)?.into_iter().collect();
            let load_ms = started.elapsed().as_secs_f64() * 1e3;

            let phase = Instant::now();
            let trace = run_cascade(&net, &failures, &hardened, model)?;
            let cascade_ms = phase.elapsed().as_secs_f64() * 1e3;

            let mut report = serde_json::json!({
                "command": "simulate",
                "inputs": { "network": network.display().to_string(), "digest": net_digest },
                "model": model,
                "metric": metric,
                "failures": failures.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "hardened": hardened.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "results": {
                    "steps": trace.steps(),
                    "damage": damage(&trace, metric),
                    "damage_failed_count": damage(&trace, DamageMetric::FailedCount),
                    "damage_state_loss": damage(&trace, DamageMetric::StateLoss),
                    "operational_before": operational_count(&trace.pre_failure),
                    "operational_after": operational_count(trace.final_states()),
                    "trace": trace.to_json(&net),
                },
                "elapsed_ms": { "load": load_ms, "cascade": cascade_ms },
            });
            if csv {
                report["results"]["trace_csv"] = serde_json::Value::String(trace.to_csv(&net));
            }
            emit(&report, out.as_ref())
        }
        Command::Contingency { network, k, solver, metric, model, out } => {
            let (net, net_digest) = read_network(&network)?;
            let phase = Instant::now();
            let result = match solver {
                SolverKind::Exact => exact_k_contingency(&net, k, metric, model)?,
                SolverKind::Heuristic => heuristic_k_contingency(&net, k, metric, model)?,
            };
            let solve_ms = phase.elapsed().as_secs_f64() * 1e3;
            let report = serde_json::json!({
                "command": "contingency",
                "inputs": { "network": network.display().to_string(), "digest": net_digest },
                "model": model,
                "results": result.to_json(solve_ms),
                "elapsed_ms": { "solve": solve_ms },
            });
            emit(&report, out.as_ref())
        }
        Command::Events {
            network,
            events,
            k,
            solver,
            metric,
            model,
            budget_ms,
            horizon_ms,
            out,
        } => {
            let (net, net_digest) = read_network(&network)?;
            let text = fs::read_to_string(&events)
                .with_context(|| format!("cannot read events file {}", events.display()))?;
            let stream = parse_events_csv(&text)?;
            let ticks = self_updating_list(&net, &stream, k, solver, metric, model, horizon_ms)?;
            let budget = budget_ms as f64;
            let violations: Vec<u64> = ticks
                .iter()
                .filter(|t| t.recompute_ms > budget)
                .map(|t| t.t_ms)
                .collect();
            let rows: Vec<serde_json::Value> = ticks
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "t_ms": t.t_ms,
                        "events": t.applied.iter().map(|e| format!("{},{},{}", e.time_ms, e.entity, e.new_state.value())).collect::<Vec<_>>(),
                        "list": t.list.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                        "k_sets": t.result.best_sets.iter().map(|s| s.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                        "damage": t.result.damage_value,
                        "recompute_ms": t.recompute_ms,
                        "within_budget": t.recompute_ms <= budget,
                    })
                })
                .collect();
            let report = serde_json::json!({
                "command": "events",
                "inputs": {
                    "network": network.display().to_string(), "digest": net_digest,
                    "events": events.display().to_string(), "events_digest": digest(text.as_bytes()),
                },
                "k": k,
                "solver": solver,
                "metric": metric,
                "model": model,
                "budget_ms": budget_ms,
                "budget_violations": violations,
                "results": rows,
            });
            emit(&report, out.as_ref())
        }
        Command::ExportIlp { network, k, out } => {
            let (net, net_digest) = read_network(&network)?;
            let phase = Instant::now();
            let lp = export_ilp(&net, k)?;
            fs::write(&out, &lp)
                .with_context(|| format!("cannot write model to {}", out.display()))?;
            let report = serde_json::json!({
                "command": "export-ilp",
                "inputs": { "network": network.display().to_string(), "digest": net_digest },
                "k": k,
                "out": out.display().to_string(),
                "bytes": lp.len(),
                "elapsed_ms": { "export": phase.elapsed().as_secs_f64() * 1e3 },
            });
            emit(&report, None)
        }
        Command::Game { scenario, network, model, csv, out } => {
            let (net, net_digest) = read_network(&network)?;
            let text = fs::read_to_string(&scenario)
                .with_context(|| format!("cannot read scenario {}", scenario.display()))?;
            let sc: GameScenario = serde_json::from_str(&text)?;
            let phase = Instant::now();
            let outcome = run_game(&net, &sc, model)?;
            let game_ms = phase.elapsed().as_secs_f64() * 1e3;
            let mut report = serde_json::json!({
                "command": "game",
                "inputs": {
                    "network": network.display().to_string(), "digest": net_digest,
                    "scenario": scenario.display().to_string(), "scenario_digest": digest(text.as_bytes()),
                },
                "model": model,
                "results": outcome.to_json(&sc),
                "elapsed_ms": { "game": game_ms },
            });
            if csv {
                report["results"]["operational_csv"] = serde_json::Value::String(format!(
                    "before,after_hardened,after_unhardened\n{},{},{}\n",
                    outcome.operational_before,
                    outcome.operational_after_hardened,
                    outcome.operational_after_unhardened
                ));
            }
            emit(&report, out.as_ref())
        }
        Command::Dataset { name, out } => {
            let net = match name.as_str() {
                "ieee14" => build_ieee14(),
                "ieee118" => build_ieee118(),
                other => bail!("unknown dataset `{other}` (expected ieee14 or ieee118)"),
            };
            let text = save_network(&net);
            match out {
                Some(path) => {
                    fs::write(&path, &text)
                        .with_context(|| format!("cannot write dataset to {}", path.display()))?;
                    let report = serde_json::json!({
                        "command": "dataset",
                        "name": name,
                        "out": path.display().to_string(),
                        "digest": digest(text.as_bytes()),
                        "entities": net.len(),
                    });
                    emit(&report, None)
                }
                None => {
                    println!("{text}");
                    Ok(())
                }
            }
        }
    }
}
