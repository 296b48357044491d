use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use blockade_core::blockade::Blockade;
use blockade_core::cograph;
use blockade_core::comb;
use blockade_core::harness::{self, derive_seed, GeneratorSpec, SuiteConfig};
use blockade_core::k2::{self, K2Caps, RainbowReading, WitnessOptions};
use blockade_core::lemma::{self, LemmaError, LemmaParams, Mode, ProcedureOptions, RelaxFactors};
use blockade_core::{Graph, VertexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "blockade",
    version,
    about = "Blockades, combs, cographs and rainbow (k choose 2)-freeness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate instances from a JSON generator spec.
    Gen {
        /// Inline JSON, or `@path` to read it from a file.
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Rainbow and strong (k choose 2)-freeness checks.
    #[command(subcommand)]
    K2(K2Cmd),
    /// Comb-or-bound construction and W_G.
    #[command(subcommand)]
    Comb(CombCmd),
    /// Cograph recognition and largest induced cograph.
    #[command(subcommand)]
    Cograph(CographCmd),
    /// Run the blockade procedure or print its constants.
    #[command(subcommand)]
    Lemma(LemmaCmd),
    /// Run every suite in a TOML config; exits with status 1 if any trial fails.
    Suite {
        config: PathBuf,
        /// Override every suite's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override every suite's trial count.
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum K2Cmd {
    /// Search for a (k choose 2)-tuple, rainbow when a blockade is given.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        blockade: Option<PathBuf>,
        /// Check the graph and its complement over all vertices.
        #[arg(long, conflicts_with = "blockade")]
        strong: bool,
        /// Require witnesses distinct from each other and from the tuple.
        #[arg(long)]
        distinct: bool,
        /// Let tuple entries share a block.
        #[arg(long)]
        membership_only: bool,
        #[arg(long, default_value_t = K2Caps::default().max_tuples)]
        max_tuples: u128,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum CombCmd {
    /// A comb in (A, B) or a certificate bounding |B|.
    Build {
        #[arg(long)]
        graph: PathBuf,
        /// Vertex list such as `0,1,4-7`.
        #[arg(long = "A", value_name = "VERTICES")]
        a: String,
        #[arg(long = "B", value_name = "VERTICES")]
        b: String,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        out: Output,
    },
    /// The quantity W_G, by exhaustive search.
    Wg {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 12)]
        limit: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum CographCmd {
    /// Print the cotree, or NOT COGRAPH.
    Check {
        graph: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// A largest vertex set inducing a cograph.
    Largest {
        graph: PathBuf,
        #[arg(long, default_value_t = 24)]
        limit: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum LemmaCmd {
    /// Run the comb-extraction procedure and print its trace.
    Run {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        blockade: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        tau: f64,
        /// Threshold multipliers such as `width=0.5,len=0.5`.
        #[arg(long, conflicts_with = "strict")]
        relax: Option<RelaxFactors>,
        /// Refuse unless every hypothesis is met.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = ProcedureOptions::default().work_limit)]
        work_limit: usize,
        /// Run the key-observation oracle on a returned comb.
        #[arg(long)]
        keyob: bool,
        #[command(flatten)]
        out: Output,
    },
    /// K, L0, tau0 and the D_s table.
    Constants {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        out: Output,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::from_json(&text).with_context(|| format!("parsing graph {}", path.display()))
}

fn read_blockade(path: &Path, n: usize) -> Result<Blockade> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Blockade::from_json(&text, n).with_context(|| format!("parsing blockade {}", path.display()))
}

/// Parses `0,1,4-7` into a vertex set on `n` vertices.
fn parse_vertices(text: &str, n: usize) -> Result<VertexSet> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi): (usize, usize) = (lo.trim().parse()?, hi.trim().parse()?);
                if lo > hi {
                    bail!("empty range {part}");
                }
                out.extend(lo..=hi);
            }
            None => out.push(
                part.parse()
                    .with_context(|| format!("bad vertex `{part}`"))?,
            ),
        }
    }
    VertexSet::try_from_iter(n, out).map_err(|v| anyhow::anyhow!("vertex {v} is outside the graph"))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: &Output, v: &impl serde::Serialize) -> Result<()> {
    if out.format == Format::Csv {
        bail!("this command has no CSV form; use --format json");
    }
    emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen {
            spec,
            seed,
            trials,
            out,
        } => {
            let text = match spec.strip_prefix('@') {
                Some(p) => fs::read_to_string(p).with_context(|| format!("reading {p}"))?,
                None => spec,
            };
            let spec: GeneratorSpec =
                serde_json::from_str(&text).context("parsing generator spec")?;
            let mut made = Vec::new();
            for index in 0..trials {
                let s = derive_seed(seed, index);
                let inst = harness::generate(&spec, s)
                    .with_context(|| format!("instance {index} (seed {s})"))?;
                made.push((index, s, inst));
            }
            match out.format {
                Format::Json => {
                    let mut text = String::new();
                    for (index, s, inst) in &made {
                        text += &serde_json::to_string(
                            &json!({ "index": index, "seed": s, "instance": inst }),
                        )?;
                        text.push('\n');
                    }
                    emit(&out, &text)?;
                }
                Format::Csv => {
                    let rows = made.iter().flat_map(|(index, s, inst)| {
                        inst.graph.edges().into_iter().map(move |(u, v)| {
                            vec![
                                index.to_string(),
                                s.to_string(),
                                u.to_string(),
                                v.to_string(),
                            ]
                        })
                    });
                    emit(&out, &csv_text(&["index", "seed", "u", "v"], rows)?)?;
                }
            }
        }
        Cmd::K2(K2Cmd::Check {
            graph,
            k,
            blockade,
            strong,
            distinct,
            membership_only,
            max_tuples,
            out,
        }) => {
            let g = read_graph(&graph)?;
            let opts = WitnessOptions { distinct };
            let caps = K2Caps { max_tuples };
            let v = if strong {
                serde_json::to_value(k2::is_strongly_k2_free(&g, k, opts, caps)?)?
            } else if let Some(bp) = blockade {
                let b = read_blockade(&bp, g.n())?;
                let reading = if membership_only {
                    RainbowReading::MembershipOnly
                } else {
                    RainbowReading::DistinctBlocks
                };
                let found = k2::is_rainbow_k2_free(&g, &b, k, opts, reading, caps)?;
                json!({ "rainbow_free": found.is_none(), "violation": found })
            } else {
                let found = k2::find_k2_tuple(&g, k, opts, caps)?;
                json!({ "free": found.is_none(), "violation": found })
            };
            emit_json(&out, &v)?;
        }
        Cmd::Comb(CombCmd::Build {
            graph,
            a,
            b,
            gamma,
            d,
            out,
        }) => {
            let g = read_graph(&graph)?;
            let (a, b) = (parse_vertices(&a, g.n())?, parse_vertices(&b, g.n())?);
            let res = comb::comb_or_bound(&g, &a, &b, gamma, d)?;
            let valid = comb::verify_comb_or_bound(&g, &a, &b, gamma, d, &res);
            emit_json(&out, &json!({ "result": res, "verified": valid }))?;
        }
        Cmd::Comb(CombCmd::Wg { graph, limit, out }) => {
            let g = read_graph(&graph)?;
            emit_json(
                &out,
                &json!({ "n": g.n(), "w_g": comb::compute_w_g(&g, limit)? }),
            )?;
        }
        Cmd::Cograph(CographCmd::Check { graph, out }) => {
            let g = read_graph(&graph)?;
            match cograph::is_cograph(&g)? {
                Some(tree) => emit_json(&out, &tree)?,
                None => emit(&out, "NOT COGRAPH\n")?,
            }
        }
        Cmd::Cograph(CographCmd::Largest { graph, limit, out }) => {
            let g = read_graph(&graph)?;
            let set = cograph::largest_cograph(&g, limit)?;
            emit_json(
                &out,
                &json!({ "size": set.len(), "vertices": set.to_vec() }),
            )?;
        }
        Cmd::Lemma(LemmaCmd::Run {
            graph,
            blockade,
            k,
            d,
            tau,
            relax,
            strict,
            work_limit,
            keyob,
            out,
        }) => {
            let g = read_graph(&graph)?;
            let b = read_blockade(&blockade, g.n())?;
            let params = LemmaParams::new(k, d, tau, b.len())?;
            let mode = if strict {
                Mode::Strict
            } else {
                Mode::Relaxed(relax.unwrap_or_default())
            };
            let opts = ProcedureOptions {
                mode,
                work_limit,
                check_keyob: keyob,
                ..ProcedureOptions::default()
            };
            match lemma::main_lemma_procedure(&g, &b, &params, &opts) {
                Ok(trace) => emit_json(&out, &trace)?,
                Err(LemmaError::Refused {
                    unmet,
                    unverifiable,
                }) => {
                    emit_json(
                        &out,
                        &json!({ "refused": { "unmet": unmet, "unverifiable": unverifiable } }),
                    )?;
                    return Ok(ExitCode::from(3));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Cmd::Lemma(LemmaCmd::Constants { k, d, out }) => {
            let c = lemma::compute_constants(k, d)?;
            match out.format {
                Format::Json => emit_json(&out, &c)?,
                Format::Csv => {
                    let rows = c
                        .d_table
                        .iter()
                        .map(|(s, ds)| vec![s.to_string(), ds.clone()]);
                    emit(&out, &csv_text(&["s", "d_s"], rows)?)?;
                }
            }
        }
        Cmd::Suite {
            config,
            seed,
            trials,
            out,
        } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = SuiteConfig::from_toml(&text)
                .with_context(|| format!("in {}", config.display()))?;
            let mut failed = false;
            let mut lines: Vec<Value> = Vec::new();
            let mut rows = Vec::new();
            for mut spec in cfg.suite {
                spec.seed = seed.unwrap_or(spec.seed);
                spec.trials = trials.or(spec.trials);
                let report = harness::run_suite(&spec)?;
                failed |= report.failed();
                let a = &report.aggregate;
                eprintln!(
                    "{}: {}/{} passed, outcomes {:?}, {} ms",
                    a.suite, a.passed, a.trials, a.outcomes, a.wall_ms
                );
                for l in &report.lines {
                    rows.push(vec![
                        l.suite.clone(),
                        l.index.to_string(),
                        l.seed.to_string(),
                        l.pass.to_string(),
                        l.outcome.clone(),
                        l.detail.to_string(),
                    ]);
                    lines.push(serde_json::to_value(l)?);
                }
                lines.push(json!({ "aggregate": report.aggregate }));
            }
            let text = match out.format {
                Format::Json => lines
                    .iter()
                    .map(|l| l.to_string() + "\n")
                    .collect::<String>(),
                Format::Csv => csv_text(
                    &["suite", "index", "seed", "pass", "outcome", "detail"],
                    rows,
                )?,
            };
            emit(&out, &text)?;
            if failed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
