//! The `gdh` command line. [`dispatch`] is the whole program minus process
//! exit, so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::GdhError;
use crate::extremal::{chain_pattern, extremal_number, langlois_construction, SearchConfig};
use crate::graph::{count_copies, find_embedding, is_family_free, Family, Gdh, Theory};
use crate::io::{
    parse_family, parse_gdh, parse_theory, serialize_family, serialize_gdh, sha256_hex, GraphRecord,
    InputDigest, RunManifest,
};
use crate::jump::{certify_jump, degenerate_witness, jump_interval, nonjump_catalog};
use crate::lagrangian::{blowup, blowup_density, blowup_density_sequence, LagrangianConfig};
use crate::lattice::{expand_all, min_container, orient_k, project_family, TheoryPair};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gdh", version, about = "Extremal computations on generalized directed hypergraphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Print the JSON record instead of the human-readable summary
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Node budget for exact searches
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget: u64,
    /// Optimizer starting points
    #[arg(long, global = true, default_value_t = 100)]
    starts: usize,
    /// Write the run manifest here instead of standard error
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Edge density of a graph
    Density {
        graph: PathBuf,
        #[arg(long)]
        theory: PathBuf,
    },
    /// Blow up a graph, or list the exact single-edge blowup densities
    Blowup {
        graph: Option<PathBuf>,
        #[arg(long)]
        theory: PathBuf,
        /// Clones per vertex, comma separated
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Print t = 1..=T of the single-edge blowup density sequence
        #[arg(long, conflicts_with_all = ["graph", "sizes"])]
        sequence: Option<usize>,
    },
    /// Blowup density (Lagrangian) of a graph
    Lagrangian { theory: PathBuf, graph: PathBuf },
    /// Whether `host` contains `pattern`
    Contains {
        pattern: PathBuf,
        host: PathBuf,
        #[arg(long)]
        theory: PathBuf,
    },
    /// Copies of `pattern` in `host`
    CountCopies {
        pattern: PathBuf,
        host: PathBuf,
        #[arg(long)]
        theory: PathBuf,
    },
    /// Exact extremal number by branch and bound
    Exsearch {
        theory: PathBuf,
        family: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Move a graph or family between a finer and a coarser theory
    Transform {
        op: TransformOp,
        fine: PathBuf,
        coarse: PathBuf,
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Try to certify a jump with a finite family
    CertifyJump {
        theory: PathBuf,
        family: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
    },
    /// Known jump interval and nonjumps
    Catalog { theory: PathBuf },
    /// Look for a member inside a blowup of a single edge
    Degenerate {
        theory: PathBuf,
        family: PathBuf,
        /// Largest balanced blowup tried (default: largest member size)
        #[arg(long)]
        t_cap: Option<usize>,
    },
    /// Chain-free 2→1 graph with heads H = ⌊n/3⌋ vertices and tails the rest
    ConstructLanglois {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformOp {
    MinContainer,
    Expand,
    OrientK,
    Project,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Outcome {
    json: Value,
    text: String,
    inconclusive: bool,
}

impl Outcome {
    fn new(json: Value, text: String) -> Self {
        Self { json, text, inconclusive: false }
    }
}

/// Reads inputs and remembers their digests for the manifest.
#[derive(Default)]
struct Inputs {
    digests: Vec<InputDigest>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, String> {
        let bytes = fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|_| format!("{} is not valid UTF-8", path.display()))
    }

    fn theory(&mut self, path: &Path) -> Result<Theory, String> {
        let text = self.read(path)?;
        parse_theory(&text).map_err(|e| in_file(path, e))
    }

    fn graph(&mut self, path: &Path, theory: &Theory) -> Result<Gdh, String> {
        let text = self.read(path)?;
        parse_gdh(&text, theory).map_err(|e| in_file(path, e))
    }

    fn family(&mut self, path: &Path, theory: &Theory) -> Result<Family, String> {
        let text = self.read(path)?;
        parse_family(&text, theory).map_err(|e| in_file(path, e))
    }
}

fn in_file(path: &Path, e: GdhError) -> String {
    format!("{}: {e}", path.display())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn family_json(fam: &Family) -> Value {
    json!({ "members": fam.members().iter().map(GraphRecord::from).collect::<Vec<_>>() })
}

/// Parse `argv` (program name first), run, and collect the outputs.
pub fn dispatch<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return CliOutput {
                status: e.exit_code(),
                stdout,
                stderr,
            };
        }
    };
    let started = Instant::now();
    let mut inputs = Inputs::default();
    let result = match cli.global.threads {
        Some(0) => Err("--threads must be at least 1".to_string()),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| e.to_string())
            .and_then(|pool| pool.install(|| run(&cli, &mut inputs))),
        None => run(&cli, &mut inputs),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(msg) => {
            return CliOutput {
                status: EXIT_INVALID,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
    };
    let json_text = serde_json::to_string_pretty(&outcome.json).expect("serializable") + "\n";
    let manifest = RunManifest {
        argv: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        inputs: inputs.digests,
        seed: cli.global.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_secs: started.elapsed().as_secs_f64(),
        result_sha256: sha256_hex(json_text.as_bytes()),
    };
    let manifest_text = serde_json::to_string(&manifest).expect("serializable") + "\n";
    let mut stderr = String::new();
    match &cli.global.manifest {
        Some(path) => {
            if let Err(e) = fs::write(path, &manifest_text) {
                stderr.push_str(&format!("warning: cannot write manifest {}: {e}\n", path.display()));
            }
        }
        None => stderr.push_str(&manifest_text),
    }
    CliOutput {
        status: if outcome.inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK },
        stdout: if cli.global.json { json_text } else { outcome.text },
        stderr,
    }
}

fn lagrangian_config(g: &Global) -> LagrangianConfig {
    LagrangianConfig {
        starts: g.starts,
        seed: g.seed,
        ..Default::default()
    }
}

fn search_config(g: &Global) -> SearchConfig {
    SearchConfig {
        budget: g.budget,
        ..Default::default()
    }
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome, String> {
    let g = &cli.global;
    let err = |e: GdhError| e.to_string();
    match &cli.command {
        Command::Density { graph, theory } => {
            let t = inputs.theory(theory)?;
            let gr = inputs.graph(graph, &t)?;
            let d = gr.density().map_err(err)?;
            Ok(Outcome::new(
                json!({ "n": gr.vertex_count(), "edge_count": gr.edge_count(), "density": d }),
                format!("{d:?}\n"),
            ))
        }
        Command::Blowup { graph, theory, sizes, sequence } => {
            let t = inputs.theory(theory)?;
            if let Some(max_t) = sequence {
                let terms = (1..=*max_t)
                    .map(|k| blowup_density_sequence(&t, k))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                let text = terms
                    .iter()
                    .map(|s| format!("t={} {} {:?}\n", s.t, s.exact, s.value))
                    .collect();
                return Ok(Outcome::new(to_json(&terms), text));
            }
            let path = graph.as_ref().ok_or("blowup needs a graph file or --sequence")?;
            let gr = inputs.graph(path, &t)?;
            let out = blowup(&gr, sizes).map_err(err)?;
            Ok(Outcome::new(to_json(&GraphRecord::from(&out)), serialize_gdh(&out)))
        }
        Command::Lagrangian { theory, graph } => {
            let t = inputs.theory(theory)?;
            let gr = inputs.graph(graph, &t)?;
            let res = blowup_density(&gr, &lagrangian_config(g)).map_err(err)?;
            let weights: Vec<String> = res.argmax.as_slice().iter().map(|w| format!("{w:.6}")).collect();
            let text = format!(
                "value {:?}\nargmax {}\nconverged {}\n",
                res.value,
                weights.join(" "),
                res.converged
            );
            Ok(Outcome::new(to_json(&res), text))
        }
        Command::Contains { pattern, host, theory } => {
            let t = inputs.theory(theory)?;
            let p = inputs.graph(pattern, &t)?;
            let h = inputs.graph(host, &t)?;
            let emb = find_embedding(&p, &h).map_err(err)?;
            let text = match &emb {
                None => "embedding: NONE\n".to_string(),
                Some(map) => {
                    let pairs: Vec<String> = map.iter().enumerate().map(|(i, v)| format!("{i}->{v}")).collect();
                    format!("embedding: {}\n", pairs.join(" "))
                }
            };
            Ok(Outcome::new(json!({ "contains": emb.is_some(), "embedding": emb }), text))
        }
        Command::CountCopies { pattern, host, theory } => {
            let t = inputs.theory(theory)?;
            let p = inputs.graph(pattern, &t)?;
            let h = inputs.graph(host, &t)?;
            let c = count_copies(&p, &h).map_err(err)?;
            let text = format!(
                "copies {}\ninjective homomorphisms {}\nautomorphisms {}\n",
                c.copies, c.injective_homs, c.automorphisms
            );
            Ok(Outcome::new(to_json(&c), text))
        }
        Command::Exsearch { theory, family, n } => {
            let t = inputs.theory(theory)?;
            let fam = inputs.family(family, &t)?;
            let res = extremal_number(&t, *n, &fam, &search_config(g)).map_err(err)?;
            let witness_text = serialize_gdh(&res.witness);
            let mut js = to_json(&res);
            js["witness_text"] = Value::String(witness_text.clone());
            let text = format!(
                "ex({n}) {} {}\ndensity bound {:?}\nnodes {}\nwitness:\n{witness_text}",
                if res.exhaustive { "=" } else { ">=" },
                res.best_edge_count,
                res.density_bound,
                res.nodes_explored,
            );
            Ok(Outcome {
                json: js,
                text,
                inconclusive: !res.exhaustive,
            })
        }
        Command::Transform { op, fine, coarse, input, k } => {
            let f = inputs.theory(fine)?;
            let c = inputs.theory(coarse)?;
            let pair = TheoryPair::new(&f, &c).map_err(err)?;
            let graph_out = |gr: Gdh| Outcome::new(to_json(&GraphRecord::from(&gr)), serialize_gdh(&gr));
            match op {
                TransformOp::MinContainer => {
                    let gr = inputs.graph(input, &f)?;
                    Ok(graph_out(min_container(&gr, &pair).map_err(err)?))
                }
                TransformOp::Expand => {
                    let gr = inputs.graph(input, &c)?;
                    Ok(graph_out(expand_all(&gr, &pair).map_err(err)?))
                }
                TransformOp::OrientK => {
                    let gr = inputs.graph(input, &c)?;
                    Ok(graph_out(orient_k(&gr, &pair, *k, g.seed).map_err(err)?))
                }
                TransformOp::Project => {
                    let fam = inputs.family(input, &c)?;
                    let out = project_family(&fam, &pair).map_err(err)?;
                    Ok(Outcome::new(family_json(&out), serialize_family(&out)))
                }
            }
        }
        Command::CertifyJump { theory, family, alpha, n } => {
            let t = inputs.theory(theory)?;
            let fam = inputs.family(family, &t)?;
            let cert = certify_jump(*alpha, &fam, *n, &search_config(g), &lagrangian_config(g)).map_err(err)?;
            let lbs: Vec<String> = cert.member_blowup_lbs.iter().map(|b| format!("{b:?}")).collect();
            let text = format!(
                "valid {}\nreason {}\nextremal density at n = {} {:?}\nmember blowup densities {}\n",
                cert.valid,
                cert.reason,
                cert.n_used,
                cert.pi_upper,
                lbs.join(" ")
            );
            let mut js = to_json(&cert);
            js["family"] = family_json(&fam);
            Ok(Outcome {
                json: js,
                text,
                inconclusive: !cert.exhaustive,
            })
        }
        Command::Catalog { theory } => {
            let t = inputs.theory(theory)?;
            let interval = jump_interval(&t);
            let nonjumps = nonjump_catalog(&t).ok();
            let mut text = format!("[0, {:?}) jump interval (upper = {})\n", interval.upper, interval.upper_exact);
            match &nonjumps {
                Some(list) => {
                    for e in list {
                        text.push_str(&format!("nonjump {} = {:?} (k = {})\n", e.exact, e.value, e.k));
                    }
                }
                None => text.push_str("no nonjumps: every density in [0, 1) is a jump\n"),
            }
            Ok(Outcome::new(
                json!({ "jump_interval": interval, "nonjumps": nonjumps }),
                text,
            ))
        }
        Command::Degenerate { theory, family, t_cap } => {
            let t = inputs.theory(theory)?;
            let fam = inputs.family(family, &t)?;
            let largest = fam.members().iter().map(|m| m.vertex_count()).max().unwrap_or(1).max(1);
            let cap = t_cap.unwrap_or(largest);
            let w = degenerate_witness(&fam, cap).map_err(err)?;
            let interval = jump_interval(&t);
            let text = match &w {
                Some(w) => format!(
                    "member {} embeds in the {:?}-blowup of a single edge: Turán density 0\n",
                    w.member, w.blowup
                ),
                None if cap >= largest => format!(
                    "NONE: no member embeds in a blowup of a single edge; Turán density >= {}\n",
                    interval.upper_exact
                ),
                None => format!("NONE up to t = {cap} (inconclusive below t = {largest})\n"),
            };
            Ok(Outcome::new(
                json!({ "witness": w, "t_cap": cap, "complete": cap >= largest }),
                text,
            ))
        }
        Command::ConstructLanglois { n } => {
            let gr = langlois_construction(*n).map_err(err)?;
            let fam = Family::new(gr.theory(), vec![chain_pattern()]).map_err(err)?;
            let free = is_family_free(&gr, &fam).map_err(err)?;
            let density = gr.density().map_err(err)?;
            let mut js = to_json(&GraphRecord::from(&gr));
            js["edge_count"] = json!(gr.edge_count());
            js["density"] = json!(density);
            js["chain_free"] = json!(free);
            Ok(Outcome::new(js, serialize_gdh(&gr)))
        }
    }
}
