//! Command-line interface for coupled LDPC ensemble construction, density
//! evolution analysis, protograph tooling, and finite-length simulation.
//!
//! Results print to stdout by default; `--out` writes them to a file
//! instead. All randomized commands are deterministic given their seeds;
//! the `COUPLED_LDPC_SEED` environment variable overrides the default
//! master seed.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use coupled_ldpc::alist;
use coupled_ldpc::density_evolution::{self as de, DeSettings};
use coupled_ldpc::ensembles::{DegreeLaw, EnsembleSpec};
use coupled_ldpc::finite_length::{
    self as fl, derive_seed, sample_tanner_graph, TannerGraph,
};
use coupled_ldpc::protograph::{
    self as proto, base_circular, base_oc, base_ocp, base_sc, lift, BaseMatrix, EdgeSpreading,
    ParityCheck, PrecodeBlock,
};

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ensemble { cmd } => match cmd {
            EnsembleCmd::Info { spec, out } => ensemble_info(&spec.build()?, out.as_deref()),
        },
        Command::De { cmd } => run_de(cmd),
        Command::Proto { cmd } => run_proto(cmd),
        Command::Sim { cmd } => run_sim(cmd),
        Command::Tables { cmd } => run_tables(cmd),
    }
}

#[derive(Parser)]
#[command(
    name = "coupled-ldpc",
    version,
    about = "Coupled LDPC ensembles over the BEC: construction, density evolution, protographs, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect ensemble constructions
    Ensemble {
        #[command(subcommand)]
        cmd: EnsembleCmd,
    },
    /// Density evolution analysis
    De {
        #[command(subcommand)]
        cmd: DeCmd,
    },
    /// Protograph base matrices, precoding checks, and lifting
    Proto {
        #[command(subcommand)]
        cmd: ProtoCmd,
    },
    /// Finite-length Monte Carlo simulation
    Sim {
        #[command(subcommand)]
        cmd: SimCmd,
    },
    /// Reproduce the published comparison tables
    Tables {
        #[command(subcommand)]
        cmd: TablesCmd,
    },
}

// ---------------------------------------------------------------------------
// Shared argument blocks
// ---------------------------------------------------------------------------

#[derive(Args, Clone)]
struct SpecArgs {
    /// Ensemble family: sc, circular, loop, or oc
    #[arg(long)]
    family: String,
    /// Regular variable node degree
    #[arg(long)]
    dl: Option<u32>,
    /// Check node degree
    #[arg(long)]
    dr: u32,
    /// Chain length L (variable node positions)
    #[arg(long = "L")]
    chain_len: usize,
    /// Coupling length w
    #[arg(long = "w", default_value_t = 3)]
    coupling: usize,
    /// Irregular node-perspective degree law, e.g. "3:0.95,23:0.05";
    /// replaces --dl
    #[arg(long)]
    irregular: Option<String>,
}

impl SpecArgs {
    fn build(&self) -> Result<EnsembleSpec> {
        let spec = match (self.family.as_str(), &self.irregular) {
            ("sc", None) => EnsembleSpec::sc(self.require_dl()?, self.dr, self.chain_len, self.coupling)?,
            ("circular", None) => {
                EnsembleSpec::circular(self.require_dl()?, self.dr, self.chain_len, self.coupling)?
            }
            ("loop", None) => EnsembleSpec::loop_ensemble(self.require_dl()?, self.dr, self.chain_len)?,
            ("oc", None) => EnsembleSpec::oc(self.require_dl()?, self.dr, self.chain_len, self.coupling)?,
            ("sc", Some(law)) => {
                EnsembleSpec::sc_irregular(parse_law(law)?, self.dr, self.chain_len, self.coupling)?
            }
            ("oc", Some(law)) => {
                EnsembleSpec::oc_irregular(parse_law(law)?, self.dr, self.chain_len, self.coupling)?
            }
            (fam, Some(_)) => bail!("irregular laws are supported for sc and oc, not {fam}"),
            (fam, None) => bail!("unknown family {fam:?}; expected sc, circular, loop, or oc"),
        };
        Ok(spec)
    }

    fn require_dl(&self) -> Result<u32> {
        self.dl.ok_or_else(|| anyhow!("--dl is required for regular ensembles"))
    }
}

fn parse_law(text: &str) -> Result<DegreeLaw> {
    let entries = text
        .split(',')
        .map(|pair| {
            let (d, p) = pair
                .split_once(':')
                .ok_or_else(|| anyhow!("bad degree law entry {pair:?}, expected deg:frac"))?;
            Ok((d.trim().parse::<u32>()?, p.trim().parse::<f64>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegreeLaw::new(entries)?)
}

fn default_seed() -> u64 {
    std::env::var("COUPLED_LDPC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1)
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            f.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn init_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

// ---------------------------------------------------------------------------
// ensemble
// ---------------------------------------------------------------------------

#[derive(Subcommand)]
enum EnsembleCmd {
    /// Print connectivity, degree profile, and design rate as JSON
    Info {
        #[command(flatten)]
        spec: SpecArgs,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn ensemble_info(spec: &EnsembleSpec, out: Option<&Path>) -> Result<()> {
    let t = spec.connectivity();
    let doc = json!({
        "spec": spec,
        "label": spec.to_string(),
        "check_positions": t.rows(),
        "variable_positions": t.cols(),
        "design_rate": spec.design_rate::<f64>(),
        "connectivity": t,
        "degree_profile": spec.degree_profile(),
    });
    emit(out, &serde_json::to_string_pretty(&doc)?)
}

// ---------------------------------------------------------------------------
// de
// ---------------------------------------------------------------------------

#[derive(Subcommand)]
enum DeCmd {
    /// BP threshold by bisection
    Threshold {
        #[command(flatten)]
        spec: SpecArgs,
        /// Final bisection bracket width
        #[arg(long, default_value_t = 1e-5)]
        eps_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Required iterations to decode at a fixed erasure probability
    Iterations {
        #[command(flatten)]
        spec: SpecArgs,
        /// Channel erasure probability
        #[arg(long)]
        eps_r: f64,
        /// Decode tolerance on the position erasures
        #[arg(long, default_value_t = 1e-6)]
        decode_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run density evolution once and optionally dump the trajectory
    Evolve {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        decode_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        stall_tol: f64,
        /// Write the trajectory as CSV (columns l, x_1..x_Q)
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Splitting predicate and its necessary condition for an OC chain
    SplitCheck {
        #[arg(long)]
        dl: u32,
        #[arg(long)]
        dr: u32,
        /// OC chain length L = 2*Ls + w - 1
        #[arg(long = "L")]
        chain_len: usize,
        #[arg(long = "w", default_value_t = 3)]
        coupling: usize,
        /// Threshold-coincidence tolerance
        #[arg(long, default_value_t = 1e-4)]
        delta_s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_de(cmd: DeCmd) -> Result<()> {
    match cmd {
        DeCmd::Threshold { spec, eps_tol, out } => {
            let spec = spec.build()?;
            let result = de::bp_threshold::<f64>(&spec, eps_tol)?;
            let doc = json!({
                "spec": spec,
                "label": spec.to_string(),
                "threshold": result.threshold,
                "bracket_width": result.bracket_width,
                "settings": result.settings,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&doc)?)
        }
        DeCmd::Iterations { spec, eps_r, decode_tol, out } => {
            let spec = spec.build()?;
            let iterations = de::required_iterations(&spec, eps_r, decode_tol)?;
            let doc = json!({
                "spec": spec,
                "label": spec.to_string(),
                "epsilon": eps_r,
                "decode_tol": decode_tol,
                "decoded": iterations.is_some(),
                "iterations": iterations,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&doc)?)
        }
        DeCmd::Evolve { spec, eps, max_iter, decode_tol, stall_tol, dump, out } => {
            let spec = spec.build()?;
            let settings = DeSettings { max_iter, decode_tol, stall_tol };
            let outcome = if dump.is_some() {
                de::evolve_traced(&spec, eps, &settings)?
            } else {
                de::evolve(&spec, eps, &settings)?
            };
            if let (Some(path), Some(trajectory)) = (dump.as_deref(), outcome.trajectory.as_ref()) {
                let mut csv = String::new();
                let q = trajectory[0].len();
                csv.push('l');
                for i in 1..=q {
                    csv.push_str(&format!(",x_{i}"));
                }
                csv.push('\n');
                for (l, x) in trajectory.iter().enumerate() {
                    csv.push_str(&l.to_string());
                    for v in x {
                        csv.push_str(&format!(",{v:.12e}"));
                    }
                    csv.push('\n');
                }
                emit(Some(path), &csv)?;
            }
            let doc = json!({
                "spec": spec,
                "label": spec.to_string(),
                "epsilon": eps,
                "converged": outcome.converged,
                "iterations": outcome.iterations,
                "final_max_erasure": outcome.final_max_erasure,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&doc)?)
        }
        DeCmd::SplitCheck { dl, dr, chain_len, coupling, delta_s, out } => {
            let oc = EnsembleSpec::oc(dl, dr, chain_len, coupling)?;
            let half_len = oc.oc_half_len().expect("oc spec");
            let sc = EnsembleSpec::sc(dl, dr, half_len, coupling)?;
            let eps_tol = delta_s / 10.0;
            let thr_oc = de::bp_threshold::<f64>(&oc, eps_tol)?.threshold;
            let thr_sc = de::bp_threshold::<f64>(&sc, eps_tol)?.threshold;
            let thr_protected = de::regular_bp_threshold::<f64>(2 * dl, dr, eps_tol)?;
            let occurs = de::splitting_occurs(dl, dr, chain_len, coupling, delta_s)?;
            let necessary = de::splitting_necessary_condition(dl, dr, half_len, coupling, delta_s)?;
            let doc = json!({
                "dl": dl, "dr": dr, "L": chain_len, "w": coupling, "half_len": half_len,
                "delta_s": delta_s,
                "threshold_oc": thr_oc,
                "threshold_sc_half": thr_sc,
                "threshold_protected_region": thr_protected,
                "splitting_occurs": occurs,
                "necessary_condition": necessary,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&doc)?)
        }
    }
}

// ---------------------------------------------------------------------------
// proto
// ---------------------------------------------------------------------------

#[derive(Args, Clone)]
struct ProtoBuildArgs {
    /// Base family: sc, circular, oc, or ocp
    #[arg(long)]
    family: String,
    /// Chain length L
    #[arg(long = "L")]
    chain_len: usize,
    /// Coupling length w (number of components)
    #[arg(long = "w", default_value_t = 3)]
    coupling: usize,
    /// One component shared by all w slots, rows separated by ';',
    /// e.g. "1 1" or "1 0;0 1"
    #[arg(long, default_value = "1 1")]
    component: String,
    /// Distinct components separated by '|' (overrides --component)
    #[arg(long)]
    components: Option<String>,
    /// Precode rows for ocp, e.g. "0 1 1 0;0 1 1 0"
    #[arg(long)]
    precode: Option<String>,
}

impl ProtoBuildArgs {
    fn spreading(&self) -> Result<EdgeSpreading> {
        let comps: Vec<Vec<Vec<u32>>> = match &self.components {
            Some(list) => list.split('|').map(parse_int_matrix).collect::<Result<_>>()?,
            None => vec![parse_int_matrix(&self.component)?; self.coupling],
        };
        let b = comps[0].len();
        let c = comps[0].first().map_or(0, Vec::len);
        let flat: Vec<Vec<u32>> = comps
            .into_iter()
            .map(|m| m.into_iter().flatten().collect())
            .collect();
        Ok(EdgeSpreading::new(b, c, flat)?)
    }

    fn build(&self) -> Result<BaseMatrix> {
        let spreading = self.spreading()?;
        let base = match self.family.as_str() {
            "sc" => base_sc(&spreading, self.chain_len)?,
            "circular" => base_circular(&spreading, self.chain_len)?,
            "oc" => base_oc(&spreading, self.chain_len)?,
            "ocp" => {
                let text = self
                    .precode
                    .as_deref()
                    .ok_or_else(|| anyhow!("--precode is required for ocp"))?;
                let rows = parse_int_matrix(text)?;
                let p = rows.len();
                let cols = rows.first().map_or(0, Vec::len);
                let precode = PrecodeBlock::new(p, cols, rows.into_iter().flatten().collect())?;
                base_ocp(&spreading, self.chain_len, &precode)?
            }
            fam => bail!("unknown protograph family {fam:?}"),
        };
        Ok(base)
    }
}

/// Build flags with the family optional, for subcommands that also accept a
/// base matrix file.
#[derive(Args, Clone)]
struct ProtoBuildOptArgs {
    /// Base family: sc, circular, oc, or ocp
    #[arg(long)]
    family: Option<String>,
    /// Chain length L
    #[arg(long = "L")]
    chain_len: Option<usize>,
    /// Coupling length w (number of components)
    #[arg(long = "w", default_value_t = 3)]
    coupling: usize,
    /// One component shared by all w slots, rows separated by ';'
    #[arg(long, default_value = "1 1")]
    component: String,
    /// Distinct components separated by '|' (overrides --component)
    #[arg(long)]
    components: Option<String>,
    /// Precode rows for ocp, e.g. "0 1 1 0;0 1 1 0"
    #[arg(long)]
    precode: Option<String>,
}

impl ProtoBuildOptArgs {
    fn build(&self) -> Result<Option<BaseMatrix>> {
        let (Some(family), Some(chain_len)) = (&self.family, self.chain_len) else {
            return Ok(None);
        };
        let args = ProtoBuildArgs {
            family: family.clone(),
            chain_len,
            coupling: self.coupling,
            component: self.component.clone(),
            components: self.components.clone(),
            precode: self.precode.clone(),
        };
        Ok(Some(args.build()?))
    }
}

fn parse_int_matrix(text: &str) -> Result<Vec<Vec<u32>>> {
    let rows: Vec<Vec<u32>> = text
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| anyhow!("bad integer {t:?}")))
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        bail!("matrix rows must be non-empty and equally long");
    }
    Ok(rows)
}

fn read_base(path: &Path) -> Result<BaseMatrix> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BaseMatrix::read_text(BufReader::new(file))?)
}

#[derive(Subcommand)]
enum ProtoCmd {
    /// Construct a base matrix and write its text form
    Build {
        #[command(flatten)]
        args: ProtoBuildArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a base matrix for a stopping set among its punctured columns
    Check {
        /// Base matrix text file
        #[arg(long)]
        base: PathBuf,
    },
    /// BP threshold of a protograph via edge-wise density evolution
    Threshold {
        /// Base matrix text file; alternatively use the build flags
        #[arg(long)]
        base: Option<PathBuf>,
        #[command(flatten)]
        build: ProtoBuildOptArgs,
        #[arg(long, default_value_t = 1e-5)]
        eps_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a base matrix to a parity-check matrix in alist format
    Lift {
        #[arg(long)]
        base: PathBuf,
        /// Lifting factor
        #[arg(long)]
        z: usize,
        /// Permutation seed; defaults to COUPLED_LDPC_SEED or 1
        #[arg(long)]
        seed: Option<u64>,
        /// Output alist file
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_proto(cmd: ProtoCmd) -> Result<()> {
    match cmd {
        ProtoCmd::Build { args, out } => {
            let base = args.build()?;
            let mut buf = Vec::new();
            base.write_text(&mut buf)?;
            emit(out.as_deref(), &String::from_utf8(buf)?)
        }
        ProtoCmd::Check { base } => {
            let base = read_base(&base)?;
            if proto::punctured_stopping_set_exists(&base) {
                println!("punctured stopping set exists");
            } else {
                println!("no punctured stopping set");
            }
            Ok(())
        }
        ProtoCmd::Threshold { base, build, eps_tol, out } => {
            let base = match (base, build.build()?) {
                (Some(path), _) => read_base(&path)?,
                (None, Some(base)) => base,
                (None, None) => bail!("provide --base or the build flags (--family, --L, ...)"),
            };
            let result = proto::protograph_bp_threshold::<f64>(&base, eps_tol);
            let doc = json!({
                "rows": base.rows(),
                "cols": base.cols(),
                "punctured": base.punctured().iter().map(|&j| j + 1).collect::<Vec<_>>(),
                "design_rate": base.design_rate::<f64>(),
                "threshold": result.threshold,
                "bracket_width": result.bracket_width,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&doc)?)
        }
        ProtoCmd::Lift { base, z, seed, out } => {
            let base = read_base(&base)?;
            let seed = seed.unwrap_or_else(default_seed);
            let pc = lift(&base, z, seed)?;
            let file = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            pc.write_alist(file)?;
            let doc = json!({
                "rows": pc.rows(),
                "cols": pc.cols(),
                "z": z,
                "seed": seed,
                "transmitted_bits": pc.num_transmitted(),
                "punctured_bits": pc.cols() - pc.num_transmitted(),
                "alist": out,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// sim
// ---------------------------------------------------------------------------

#[derive(Args, Clone)]
struct CodeSource {
    /// Decode a code read from an alist file
    #[arg(long)]
    alist: Option<PathBuf>,
    /// Lift this base matrix text file (with --z)
    #[arg(long)]
    base: Option<PathBuf>,
    /// Lifting factor for --base
    #[arg(long)]
    z: Option<usize>,
    /// Lift seed; per-copy seeds derive from it
    #[arg(long)]
    lift_seed: Option<u64>,
    /// Random-ensemble family (with --dl/--dr/--L/--w and --M)
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    dl: Option<u32>,
    #[arg(long)]
    dr: Option<u32>,
    #[arg(long = "L")]
    chain_len: Option<usize>,
    #[arg(long = "w")]
    coupling: Option<usize>,
    /// Variable nodes per position for random-ensemble codes
    #[arg(long = "M")]
    m: Option<usize>,
    /// Graph sampling seed; per-copy seeds derive from it
    #[arg(long)]
    graph_seed: Option<u64>,
    /// Number of independent code instances decoded jointly (block fails
    /// if any fails)
    #[arg(long, default_value_t = 1)]
    copies: usize,
}

impl CodeSource {
    fn build(&self) -> Result<Vec<TannerGraph>> {
        if self.copies == 0 {
            bail!("--copies must be at least 1");
        }
        if let Some(path) = &self.alist {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let matrix = alist::read_alist(BufReader::new(file))?;
            let pc = ParityCheck::from_rows(matrix.cols, matrix.row_adj)?;
            return Ok(vec![TannerGraph::from_parity_check(&pc); self.copies]);
        }
        if let Some(path) = &self.base {
            let z = self.z.ok_or_else(|| anyhow!("--z is required with --base"))?;
            let base = read_base(path)?;
            let seed = self.lift_seed.unwrap_or_else(default_seed);
            return (0..self.copies)
                .map(|k| {
                    let pc = lift(&base, z, derive_seed(seed, 4, k as u64))?;
                    Ok(TannerGraph::from_parity_check(&pc))
                })
                .collect();
        }
        if let Some(family) = &self.family {
            let spec = SpecArgs {
                family: family.clone(),
                dl: self.dl,
                dr: self.dr.ok_or_else(|| anyhow!("--dr is required with --family"))?,
                chain_len: self.chain_len.ok_or_else(|| anyhow!("--L is required with --family"))?,
                coupling: self.coupling.unwrap_or(3),
                irregular: None,
            }
            .build()?;
            let m = self.m.ok_or_else(|| anyhow!("--M is required with --family"))?;
            let seed = self.graph_seed.unwrap_or_else(default_seed);
            return (0..self.copies)
                .map(|k| Ok(sample_tanner_graph(&spec, m, derive_seed(seed, 5, k as u64))?))
                .collect();
        }
        bail!("provide a code via --alist, --base --z, or --family ...");
    }
}

#[derive(Subcommand)]
enum SimCmd {
    /// Block error rate over a list of erasure probabilities
    Fer {
        #[command(flatten)]
        source: CodeSource,
        /// Comma-separated erasure probabilities, e.g. "0.44,0.46"
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// BP iteration cap; unlimited when omitted
        #[arg(long)]
        i_max: Option<usize>,
        /// Master seed for per-trial erasures
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for trials
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean peeling-evolution curves r1(tau) and overlap occupancy
    PeelEvolution {
        #[command(flatten)]
        spec: SpecArgs,
        /// Variable nodes per position
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// Decode this many independent instances jointly per trial
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_sim(cmd: SimCmd) -> Result<()> {
    match cmd {
        SimCmd::Fer { source, eps, trials, i_max, seed, jobs, out } => {
            init_jobs(jobs);
            let codes = source.build()?;
            let eps_list: Vec<f64> = eps
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("bad epsilon {t:?}")))
                .collect::<Result<_>>()?;
            let seed = seed.unwrap_or_else(default_seed);
            let points = fl::fer_experiment(&codes, &eps_list, trials, i_max, seed)?;
            let mut csv = String::from("epsilon,trials,failures,fer,ci95,mean_iters\n");
            for p in &points {
                csv.push_str(&format!(
                    "{},{},{},{:.6e},{:.6e},{:.3}\n",
                    p.epsilon, p.trials, p.failures, p.fer, p.ci95, p.mean_iterations
                ));
            }
            emit(out.as_deref(), &csv)
        }
        SimCmd::PeelEvolution { spec, m, eps, trials, copies, seed, jobs, out } => {
            init_jobs(jobs);
            let spec = spec.build()?;
            let specs = vec![spec; copies.max(1)];
            let seed = seed.unwrap_or_else(default_seed);
            let curves = fl::graph_evolution_union(&specs, m, eps, trials, seed)?;
            let mut csv = String::from("tau,r1_mean,r1_std,vstar_mean\n");
            for k in 0..curves.len() {
                let vstar = curves
                    .vstar_mean
                    .as_ref()
                    .map_or(String::new(), |vs| format!("{:.6e}", vs[k]));
                csv.push_str(&format!(
                    "{:.6},{:.6e},{:.6e},{}\n",
                    curves.tau(k),
                    curves.r1_mean[k],
                    curves.r1_std[k],
                    vstar
                ));
            }
            emit(out.as_deref(), &csv)
        }
    }
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

#[derive(Subcommand)]
enum TablesCmd {
    /// Recompute a published table: I, II, III, or IV
    Reproduce {
        #[arg(value_enum)]
        table: TableId,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum TableId {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
    #[value(name = "III")]
    Iii,
    #[value(name = "IV")]
    Iv,
}

fn run_tables(cmd: TablesCmd) -> Result<()> {
    let TablesCmd::Reproduce { table, out } = cmd;
    let csv = match table {
        TableId::I => family_comparison_table(&[8, 9, 10, 12, 14, 15, 16, 18, 20])?,
        TableId::Ii => family_comparison_table(&[30, 40, 50, 100])?,
        TableId::Iii => oc48_table(&[10, 14, 18, 22, 50])?,
        TableId::Iv => proto_table(&[12, 14, 18, 20, 50])?,
    };
    emit(out.as_deref(), &csv)
}

const TABLE_EPS_R: f64 = 0.48;
const TABLE_EPS_TOL: f64 = 1e-5;
const TABLE_DECODE_TOL: f64 = 1e-6;

fn family_comparison_table(chain_lengths: &[usize]) -> Result<String> {
    let mut csv =
        String::from("L,R_sc,eps_sc,I_sc,R_loop,eps_loop,I_loop,R_oc,eps_oc,I_oc\n");
    for &l in chain_lengths {
        let mut cells: Vec<String> = vec![l.to_string()];
        let specs = [
            Some(EnsembleSpec::sc(3, 6, l, 3)?),
            EnsembleSpec::loop_ensemble(3, 6, l).ok(),
            EnsembleSpec::oc(3, 6, l, 3).ok(),
        ];
        for spec in specs.iter() {
            match spec {
                Some(spec) => {
                    let rate: f64 = spec.design_rate();
                    let thr = de::bp_threshold::<f64>(spec, TABLE_EPS_TOL)?.threshold;
                    let iters = de::required_iterations(spec, TABLE_EPS_R, TABLE_DECODE_TOL)?;
                    cells.push(format!("{rate:.4}"));
                    cells.push(format!("{thr:.4}"));
                    cells.push(iters.map_or("".into(), |n| n.to_string()));
                }
                None => cells.extend(["", "", ""].map(String::from)),
            }
        }
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

fn oc48_table(chain_lengths: &[usize]) -> Result<String> {
    let mut csv = String::from("L,R_oc,eps_oc\n");
    for &l in chain_lengths {
        let spec = EnsembleSpec::oc(4, 8, l, 3)?;
        let rate: f64 = spec.design_rate();
        let thr = de::bp_threshold::<f64>(&spec, TABLE_EPS_TOL)?.threshold;
        csv.push_str(&format!("{l},{rate:.4},{thr:.4}\n"));
    }
    Ok(csv)
}

fn proto_table(chain_lengths: &[usize]) -> Result<String> {
    let spreading = EdgeSpreading::repeated(1, 2, vec![1, 1], 3)?;
    let precode = PrecodeBlock::new(2, 4, vec![0, 1, 1, 0, 0, 1, 1, 0])?;
    let mut csv = String::from("L,eps_proto_sc,eps_proto_oc,eps_proto_ocp\n");
    for &l in chain_lengths {
        let thr_sc = proto::protograph_bp_threshold::<f64>(&base_sc(&spreading, l)?, TABLE_EPS_TOL).threshold;
        let thr_oc = proto::protograph_bp_threshold::<f64>(&base_oc(&spreading, l)?, TABLE_EPS_TOL).threshold;
        let thr_ocp =
            proto::protograph_bp_threshold::<f64>(&base_ocp(&spreading, l, &precode)?, TABLE_EPS_TOL).threshold;
        csv.push_str(&format!("{l},{thr_sc:.4},{thr_oc:.4},{thr_ocp:.4}\n"));
    }
    Ok(csv)
}
