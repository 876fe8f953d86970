//! The `cgm` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::attention::{verify_locality, EmbeddingTable};
use crate::builder::build_from_dir;
use crate::chunk::{build_mask, chunk_graph, ApproxTokenizer, AttentionMask};
use crate::config::{Config, Overrides};
use crate::error::{Error, Result};
use crate::graph::{read_graph_file, to_json, validate_graph, write_graph_file, CodeGraph};
use crate::linearizer::{
    linearize, make_issuefix_sample, make_reconstruction_sample, IssueFixOptions,
};
use crate::metrics::{edit_similarity, exact_match, file_recall};
use crate::rag::{
    assemble_reader_input, expand_subgraph, match_anchors, rerank, rewrite, skeleton,
    HttpBackend, ModelBackend, RetrievalSubgraph,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTRACT: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const BACKEND_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Parser)]
#[command(name = "cgm", version, about = "Repository code graphs and graph retrieval")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML file with configuration values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true)]
    chunk_size: Option<usize>,

    #[arg(long, global = true)]
    recon_budget: Option<usize>,

    #[arg(long, global = true)]
    p_add: Option<f64>,

    #[arg(long, global = true)]
    p_omit: Option<f64>,

    #[arg(long, global = true)]
    rerank_k1: Option<usize>,

    #[arg(long, global = true)]
    rerank_k2: Option<usize>,

    #[arg(long, global = true)]
    top_k_semantic: Option<usize>,

    /// Base URL of a completion/embedding service.
    #[arg(long, global = true)]
    backend: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a code graph from a source directory.
    Build {
        #[arg(long)]
        repo: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a graph file; prints one line per violation.
    Validate {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Chunks of every node as JSON lines.
    Chunk {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attention mask over the graph's chunks and a text span.
    Mask {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        text_tokens: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric check that attention output follows the mask.
    SimulateAttention {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 8)]
        dim: usize,
    },
    /// Graph back to source text with file banners.
    Linearize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One reconstruction sample as a JSON line.
    Sample {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Many training samples as JSON lines.
    DatasetGen {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: DatasetKind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// JSON lines of {"issue", "oracle_files", "patch"}; required for issuefix.
        #[arg(long)]
        issues: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entities, keywords and query extracted from an issue.
    Rewrite {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        issue: PathBuf,
    },
    /// Write the retrieval subgraph; prints each node with how it was reached.
    Retrieve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        issue: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the selected files, best first.
    Rerank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        issue: PathBuf,
        /// File ids or paths, one per line; defaults to every file of the graph.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
    /// Class and function declarations of one file.
    Skeleton {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        file: String,
    },
    /// Prompt, chunks and mask for the patch model.
    ReaderInput {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        issue: PathBuf,
        /// File ids or paths, one per line.
        #[arg(long)]
        files: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a prediction against a reference.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, value_enum)]
        metric: Metric,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DatasetKind {
    Recon,
    Issuefix,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Metric {
    Em,
    Es,
    Recall,
}

#[derive(Debug, Deserialize)]
struct IssueRecord {
    issue: String,
    oracle_files: Vec<String>,
    #[serde(default)]
    patch: String,
}

fn effective_config(g: &Global) -> Result<Config> {
    let file = match &g.config {
        Some(p) => Overrides::from_file(p)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        chunk_size: g.chunk_size,
        recon_budget: g.recon_budget,
        p_add: g.p_add,
        p_omit: g.p_omit,
        rerank_k1: g.rerank_k1,
        rerank_k2: g.rerank_k2,
        top_k_semantic: g.top_k_semantic,
        backend_url: g.backend.clone(),
    };
    Config::layered(&[file, Overrides::from_env(), flags])
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_list(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Reads a graph file and rejects it unless it validates.
fn load_graph(path: &Path) -> Result<CodeGraph> {
    let g = read_graph_file(path)?;
    let report = validate_graph(&g);
    if !report.is_valid() {
        let first = &report.violations[0];
        return Err(Error::contract(format!(
            "{} fails validation with {} violation(s), first: {first}",
            path.display(),
            report.len()
        )));
    }
    Ok(g)
}

fn file_ids(graph: &CodeGraph, refs: &[String]) -> Result<Vec<String>> {
    refs.iter()
        .map(|r| {
            graph
                .find_file(r)
                .map(|n| n.id.clone())
                .ok_or_else(|| Error::UnknownNode(r.clone()))
        })
        .collect()
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

struct Ctx<'a> {
    config: Config,
    seed: u64,
    backend: Option<HttpBackend>,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn backend(&self) -> Option<&dyn ModelBackend> {
        self.backend.as_ref().map(|b| b as &dyn ModelBackend)
    }

    fn say(&mut self, text: &str) -> Result<()> {
        emit(self.out, None, text)
    }
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Result<i32> {
    let tok = ApproxTokenizer::default();
    let cfg = ctx.config.clone();
    match cmd {
        Command::Build { repo, out } => {
            let built = build_from_dir(&repo)?;
            for w in &built.warnings {
                let _ = writeln!(ctx.err, "{w}");
            }
            match out {
                Some(p) => {
                    write_graph_file(&built.graph, &p)?;
                    ctx.say(&format!(
                        "nodes {} edges {} warnings {}\n",
                        built.graph.node_count(),
                        built.graph.edge_count(),
                        built.warnings.len()
                    ))?;
                }
                None => ctx.say(&to_json(&built.graph))?,
            }
        }
        Command::Validate { graph } => {
            let g = read_graph_file(&graph)?;
            let report = validate_graph(&g);
            ctx.say(&report.to_string())?;
            if !report.is_valid() {
                return Ok(EXIT_CONTRACT);
            }
        }
        Command::Chunk { graph, out } => {
            let g = load_graph(&graph)?;
            let cg = chunk_graph(&g, &tok, cfg.chunk_size)?;
            let mut text = String::new();
            for c in &cg.chunks {
                text.push_str(&serde_json::to_string(c).expect("chunk serializes"));
                text.push('\n');
            }
            emit(ctx.out, out.as_deref(), &text)?;
        }
        Command::Mask {
            graph,
            text_tokens,
            out,
        } => {
            let g = load_graph(&graph)?;
            let cg = chunk_graph(&g, &tok, cfg.chunk_size)?;
            emit(ctx.out, out.as_deref(), &build_mask(&cg, text_tokens).to_text())?;
        }
        Command::SimulateAttention { mask, dim } => {
            let m = AttentionMask::parse(&read_text(&mask)?)?;
            let emb = EmbeddingTable::random(m.size(), dim, ctx.seed)?;
            let report = verify_locality(&emb, &m)?;
            ctx.say(&format!("{report}\n"))?;
            if !report.passed {
                return Ok(EXIT_CONTRACT);
            }
        }
        Command::Linearize { graph, out } => {
            let g = load_graph(&graph)?;
            emit(ctx.out, out.as_deref(), &linearize(&g)?)?;
        }
        Command::Sample { graph } => {
            let g = load_graph(&graph)?;
            let s = make_reconstruction_sample(&g, &tok, cfg.recon_budget, ctx.seed)?;
            ctx.say(&(s.to_json_line() + "\n"))?;
        }
        Command::DatasetGen {
            graph,
            kind,
            count,
            issues,
            out,
        } => {
            let g = load_graph(&graph)?;
            let mut text = String::new();
            match kind {
                DatasetKind::Recon => {
                    for i in 0..count as u64 {
                        let s = make_reconstruction_sample(
                            &g,
                            &tok,
                            cfg.recon_budget,
                            ctx.seed.wrapping_add(i),
                        )?;
                        text.push_str(&s.to_json_line());
                        text.push('\n');
                    }
                }
                DatasetKind::Issuefix => {
                    let path = issues
                        .ok_or_else(|| Error::contract("issuefix datasets need --issues"))?;
                    let records: Vec<IssueRecord> = read_text(&path)?
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(|l| {
                            serde_json::from_str(l).map_err(|e| Error::Json {
                                what: path.display().to_string(),
                                source: e,
                            })
                        })
                        .collect::<Result<_>>()?;
                    if records.is_empty() {
                        return Err(Error::contract("issue file has no records"));
                    }
                    for i in 0..count {
                        let r = &records[i % records.len()];
                        let oracle: Vec<&str> = r.oracle_files.iter().map(String::as_str).collect();
                        let opts = IssueFixOptions {
                            seed: ctx.seed.wrapping_add(i as u64),
                            p_add: cfg.p_add,
                            p_omit: cfg.p_omit,
                        };
                        let s = make_issuefix_sample(&g, &oracle, &r.issue, &r.patch, opts)?;
                        text.push_str(&s.to_json_line());
                        text.push('\n');
                    }
                }
            }
            emit(ctx.out, out.as_deref(), &text)?;
        }
        Command::Rewrite { graph, issue } => {
            let g = load_graph(&graph)?;
            let rw = rewrite(&read_text(&issue)?, &g, ctx.backend())?;
            let mut text = serde_json::to_string_pretty(&rw).expect("rewrite serializes");
            text.push('\n');
            ctx.say(&text)?;
        }
        Command::Retrieve { graph, issue, out } => {
            let g = load_graph(&graph)?;
            let rw = rewrite(&read_text(&issue)?, &g, ctx.backend())?;
            let anchors = match_anchors(&g, &rw, ctx.backend(), cfg.top_k_semantic);
            let sub = expand_subgraph(&g, &anchors)?;
            write_graph_file(&sub.graph, &out)?;
            let mut text = String::new();
            for (id, p) in &sub.provenance {
                text.push_str(&format!("{id}\t{}\n", p.label()));
            }
            ctx.say(&text)?;
        }
        Command::Rerank {
            graph,
            issue,
            candidates,
        } => {
            let g = load_graph(&graph)?;
            let cands = match candidates {
                Some(p) => file_ids(&g, &read_list(&p)?)?,
                None => g
                    .nodes_of_kind(crate::graph::NodeKind::File)
                    .into_iter()
                    .map(|n| n.id.clone())
                    .collect(),
            };
            let r = rerank(
                &read_text(&issue)?,
                &cands,
                &g,
                ctx.backend(),
                cfg.rerank_k1,
                cfg.rerank_k2,
            )?;
            ctx.say(&r.stage2.iter().map(|id| format!("{id}\n")).collect::<String>())?;
        }
        Command::Skeleton { graph, file } => {
            let g = load_graph(&graph)?;
            let id = g
                .find_file(&file)
                .map(|n| n.id.clone())
                .ok_or(Error::UnknownNode(file))?;
            ctx.say(&skeleton(&g, &id)?.text)?;
        }
        Command::ReaderInput {
            graph,
            issue,
            files,
            out,
        } => {
            let g = load_graph(&graph)?;
            let selected = read_list(&files)?;
            let sub = RetrievalSubgraph {
                graph: g,
                provenance: BTreeMap::new(),
            };
            let input =
                assemble_reader_input(&sub, &selected, &read_text(&issue)?, &tok, cfg.chunk_size)?;
            emit(ctx.out, out.as_deref(), &input.to_json())?;
        }
        Command::Eval {
            pred,
            reference,
            metric,
        } => {
            let line = match metric {
                Metric::Em => exact_match(&read_text(&pred)?, &read_text(&reference)?).to_string(),
                Metric::Es => edit_similarity(&read_text(&pred)?, &read_text(&reference)?).to_string(),
                Metric::Recall => file_recall(&read_list(&pred)?, &read_list(&reference)?)?.to_string(),
            };
            ctx.say(&format!("{line}\n"))?;
        }
    }
    Ok(EXIT_OK)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_io() {
        EXIT_IO
    } else {
        EXIT_CONTRACT
    }
}

/// Runs one invocation; `args` includes the program name. Returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let config = match effective_config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    if cli.global.print_config {
        let _ = out.write_all(config.to_toml().as_bytes());
        return EXIT_OK;
    }
    let Some(command) = cli.command else {
        let _ = writeln!(err, "error: no subcommand given\n\nusage: cgm [OPTIONS] <COMMAND>\nrun `cgm --help` for the list of commands");
        return EXIT_USAGE;
    };
    let backend = match &config.backend_url {
        Some(url) => match HttpBackend::new(url, BACKEND_TIMEOUT) {
            Ok(b) => Some(b),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_CONTRACT;
            }
        },
        None => None,
    };
    let mut ctx = Ctx {
        config,
        seed: cli.global.seed,
        backend,
        out,
        err,
    };
    match execute(command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            exit_code(&e)
        }
    }
}
