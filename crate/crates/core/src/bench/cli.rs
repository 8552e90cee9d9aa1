use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::{
    load_graph, load_report, prepare, recompute_p_true, run_experiment, sweep, verify_manifest,
    ExperimentConfig, ExperimentReport, SweepPoint,
};
use crate::circuit::{gate_counts, CdTerm, Flavor};
use crate::error::{Error, Result};
use crate::ligraph::Profile;
use crate::oracle;

#[derive(Debug, Parser)]
#[command(name = "qdock", version, about = "Docking as weighted max-clique on a simulated QAOA / DC-QAOA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the binding interaction graph and print or save it.
    BuildGraph(Flags),
    /// Exact max-weight clique and clique ranking.
    SolveExact(Flags),
    /// Ising Hamiltonian and circuit for the configured ansatz.
    Encode(Flags),
    /// Multi-restart optimization campaign.
    Run(Flags),
    /// One campaign per value along an axis.
    Sweep {
        #[command(flatten)]
        flags: Flags,
        /// layers, penalty or noise
        #[arg(long)]
        axis: String,
        /// Comma list; noise values are p1:p2
        #[arg(long)]
        values: String,
    },
    /// Check a report directory and print its metrics.
    Report {
        dir: PathBuf,
    },
}

fn parse_flavor(s: &str) -> std::result::Result<Flavor, String> {
    match s.to_ascii_lowercase().as_str() {
        "qaoa" => Ok(Flavor::Qaoa),
        "dcqaoa" | "dc-qaoa" => Ok(Flavor::DcQaoa),
        _ => Err(format!("expected qaoa or dcqaoa, got {s:?}")),
    }
}

fn parse_pool(s: &str) -> std::result::Result<Vec<CdTerm>, String> {
    s.split(',')
        .map(|t| match t.trim().to_ascii_uppercase().as_str() {
            "Y" => Ok(CdTerm::Y),
            "ZY" => Ok(CdTerm::ZY),
            "YZ" => Ok(CdTerm::YZ),
            "XY" => Ok(CdTerm::XY),
            "YX" => Ok(CdTerm::YX),
            other => Err(format!("unknown CD term {other:?}")),
        })
        .collect()
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat JSON config; flags given here override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Binding interaction graph JSON
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Ligand pharmacophore spec JSON
    #[arg(long, value_name = "FILE")]
    pub ligand: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub ligand_pdb: Option<PathBuf>,
    /// Protein pharmacophore spec JSON
    #[arg(long, value_name = "FILE")]
    pub protein: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub protein_pdb: Option<PathBuf>,
    /// Synthetic instance with this many vertices
    #[arg(long, value_name = "N")]
    pub synthetic: Option<usize>,
    /// Top-two clique gap for the synthetic instance
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub synthetic_seed: Option<u64>,

    #[arg(long, value_parser = clap::value_parser!(Profile))]
    pub profile: Option<Profile>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps_s: Option<f64>,
    #[arg(long)]
    pub allow_shared_points: bool,

    #[arg(long)]
    pub penalty: Option<f64>,
    /// on or off
    #[arg(long, value_parser = super::parse_on_off)]
    pub normalize: Option<bool>,

    /// qaoa or dcqaoa
    #[arg(long, value_parser = parse_flavor)]
    pub ansatz: Option<Flavor>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// on or off
    #[arg(long, value_parser = super::parse_on_off)]
    pub multi_angle: Option<bool>,
    /// Comma list of Y, ZY, YZ, XY, YX
    #[arg(long, value_parser = parse_pool)]
    pub cd_pool: Option<Vec<CdTerm>>,

    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub iters_qaoa: Option<usize>,
    #[arg(long)]
    pub iters_dcqaoa: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,

    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub noise_p1: Option<f64>,
    #[arg(long)]
    pub noise_p2: Option<f64>,
    #[arg(long)]
    pub trajectories: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outraw {
    ($s:expr) => {{
        use std::io::Write;
        let _ = std::io::stdout().write_all($s.as_bytes());
    }};
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident; $($f:ident => $g:ident),* $(,)?) => {
        $(if let Some(v) = $flags.$f.clone() { $cfg.$g = v; })*
    };
}

macro_rules! overlay_opt {
    ($cfg:ident, $flags:ident; $($f:ident => $g:ident),* $(,)?) => {
        $(if let Some(v) = $flags.$f.clone() { $cfg.$g = Some(v); })*
    };
}

impl Flags {
    /// File config (or defaults) with the given flags laid over it.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let f = self;
        overlay_opt!(cfg, f;
            graph => graph, ligand => ligand, ligand_pdb => ligand_pdb, protein => protein,
            protein_pdb => protein_pdb, synthetic => synthetic_vertices, gap => synthetic_gap,
            synthetic_seed => synthetic_seed, tau => tau, eps => eps, eps_s => eps_s,
            cd_pool => cd_pool, max_iters => max_iters, grad_tol => grad_tol, workers => workers, out => out,
        );
        overlay!(cfg, f;
            density => synthetic_density, profile => profile, penalty => penalty, normalize => normalize,
            ansatz => ansatz, layers => layers, multi_angle => multi_angle, eta => eta,
            iters_qaoa => iters_qaoa, iters_dcqaoa => iters_dcqaoa, restarts => restarts, shots => shots,
            noise_p1 => noise_p1, noise_p2 => noise_p2, trajectories => trajectories, seed => seed,
        );
        if f.allow_shared_points {
            cfg.allow_shared_points = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn save(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))
}

fn print_metrics(report: &ExperimentReport) {
    if let Some(p) = &report.problem {
        out!(
            "vertices {}  targets {}  params {}  gates {}/{}  budget {}",
            p.vertices,
            p.targets.join(","),
            p.n_params,
            p.single_qubit_gates,
            p.two_qubit_gates,
            p.iteration_budget
        );
    }
    if let Some(m) = &report.metrics {
        let n = report.restarts.len();
        out!("restarts {n}");
        out!("p_true {:.4} ± {:.4}", m.p_true, m.p_true_stderr(n));
        out!("overlap {:.4} ± {:.4}", m.mean_overlap, m.overlap_stderr(n));
        out!("success_probability {:.4}", m.mean_success_probability);
        match m.median_iters_to_threshold {
            Some(t) => out!("median_iters_to_threshold {t} ({} misses)", m.threshold_misses),
            None => out!("median_iters_to_threshold none"),
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildGraph(flags) => {
            let cfg = flags.resolve()?;
            let big = load_graph(&cfg)?;
            out!(
                "vertices {}  edges {}  complement {}",
                big.len(),
                big.edges().len(),
                big.complement_edges().len()
            );
            match &cfg.out {
                Some(dir) => {
                    save(dir, "big.json", &big.to_json())?;
                    save(dir, "adjacency.txt", &big.adjacency_text())?;
                }
                None => outraw!(big.adjacency_text()),
            }
        }
        Command::SolveExact(flags) => {
            let cfg = flags.resolve()?;
            let big = load_graph(&cfg)?;
            let sol = oracle::max_weight_clique(&big)?;
            let labels = big.labels();
            let names: Vec<&str> = sol.vertices.iter().map(|&v| labels[v]).collect();
            out!("max clique {}  weight {:.6}", names.join(" "), sol.total_weight);
            out!("unique {}  optima {}", sol.is_unique_max, sol.optima.len());
            match sol.runner_up_weight {
                Some(r) => out!("runner-up {r:.6}  gap {:.6}", sol.total_weight - r),
                None => out!("runner-up none"),
            }
            if let Some(dir) = &cfg.out {
                save(dir, "clique.json", &serde_json::to_string_pretty(&sol)?)?;
                if big.len() <= oracle::EXHAUSTIVE_CAP {
                    let ranked = oracle::enumerate_cliques(&big, 3, false)?;
                    save(dir, "cliques.csv", &oracle::cliques_csv(&big, &ranked)?)?;
                }
            }
        }
        Command::Encode(flags) => {
            let cfg = flags.resolve()?;
            let p = prepare(&cfg)?;
            let (single, two) = gate_counts(&p.circuit);
            let h = &p.hamiltonian;
            out!(
                "qubits {}  couplings {}  constant {:.6}  scale {:.6}",
                h.n_qubits,
                h.couplings.len(),
                h.constant,
                h.scale
            );
            out!("params {}  single {}  two {}", p.circuit.n_params, single, two);
            if let Some(dir) = &cfg.out {
                save(dir, "hamiltonian.json", &h.to_json())?;
                save(dir, "circuit.json", &p.circuit.to_json())?;
                save(dir, "circuit.txt", &p.circuit.text_dump())?;
            }
        }
        Command::Run(flags) => {
            let cfg = flags.resolve()?;
            let report = run_experiment(&cfg)?;
            print_metrics(&report);
        }
        Command::Sweep { flags, axis, values } => {
            let cfg = flags.resolve()?;
            let points = SweepPoint::parse_list(&axis, &values)?;
            let (table, _) = sweep(&cfg, &points)?;
            outraw!(table.to_csv()?);
        }
        Command::Report { dir } => {
            let bad = verify_manifest(&dir)?;
            if !bad.is_empty() {
                return Err(Error::InvalidArgument(format!("hash mismatch: {}", bad.join(", "))));
            }
            let report = load_report(&dir)?;
            print_metrics(&report);
            if report.metrics.is_some() {
                out!("p_true from samples.csv {:.4}", recompute_p_true(&dir)?);
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
