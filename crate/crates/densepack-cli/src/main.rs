//! `densepack` command-line front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Invalid, ProtocolOverrides};

#[derive(Parser, Debug)]
#[command(name = "densepack", version, about = "Hard-core packing experiments on periodic lattices")]
pub struct Cli {
    /// Base random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with experiment settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the lattice catalog with reference values.
    ListLattices,
    /// Run structural checks on catalog lattices or a lattice file.
    Validate {
        lattices: Vec<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Write a catalog lattice in the text format.
    ExportLattice { lattice: String },
    /// Run the automaton and record a density trace.
    Simulate {
        lattice: Option<String>,
        #[command(flatten)]
        pressure: PressureArgs,
        #[arg(long, num_args = 2)]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        cycles: Option<u64>,
        /// empty | full | class:K | optimal:K | bernoulli:RHO | snapshot:PATH
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        thinning: Option<u64>,
        /// Also write the final configuration.
        #[arg(long)]
        snapshot: bool,
    },
    /// Bracket the critical update probability.
    Bracket {
        lattice: Option<String>,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Critical p_high against p4 on UJ or Q.
    Curve {
        lattice: Option<String>,
        #[arg(long, value_delimiter = ',')]
        p4_grid: Option<Vec<f64>>,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Exact counts of legal and densest configurations on a torus.
    Enumerate {
        lattice: Option<String>,
        dims: Vec<usize>,
        /// Also write every densest configuration.
        #[arg(long)]
        maximizers: bool,
        /// Count densest packings on a family of tori and classify the growth.
        #[arg(long)]
        growth: bool,
        /// Largest torus in the growth family.
        #[arg(long, default_value_t = 256)]
        max_sites: usize,
    },
    /// Voter curve of the two-step update at p = 1.
    Voter {
        lattice: Option<String>,
        /// exhaustive | empirical
        #[arg(long)]
        mode: Option<String>,
        /// single | restricted | doublet
        #[arg(long)]
        form: Option<String>,
        /// Seeds for empirical mode.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Residual entropies: the kagome integral and closed forms.
    Entropy {
        /// `kagome`, a lattice name, or nothing for all.
        target: Option<String>,
        #[arg(long)]
        bits: bool,
    },
}

#[derive(Args, Debug, Default)]
pub struct PressureArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p4: Option<f64>,
    #[arg(long)]
    p_high: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct ProtocolArgs {
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    window: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    max_cycles: Option<u64>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    coarse_sites: Option<usize>,
    #[arg(long)]
    fine_sites: Option<usize>,
}

impl ProtocolArgs {
    fn overrides(&self) -> ProtocolOverrides {
        ProtocolOverrides {
            burn_in: self.burn_in,
            window: self.window,
            epsilon: self.epsilon,
            delta: self.delta,
            seeds: self.seeds.clone(),
            resolution: self.resolution,
            max_cycles: self.max_cycles,
            rho0: self.rho0,
            coarse_sites: self.coarse_sites,
            fine_sites: self.fine_sites,
            coarse_grid: None,
        }
    }
}

fn dims_of(v: &Option<Vec<usize>>) -> Result<Option<[usize; 2]>, anyhow::Error> {
    match v.as_deref() {
        None | Some([]) => Ok(None),
        Some(&[a, b]) => Ok(Some([a, b])),
        Some(_) => Err(config::invalid("dims take exactly two values")),
    }
}

/// Settings given on the command line, in config-file shape.
fn flag_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut c = ExperimentConfig {
        seed: cli.seed,
        out: cli.out.clone(),
        ..Default::default()
    };
    match &cli.command {
        Command::Simulate {
            lattice,
            pressure,
            dims,
            cycles,
            init,
            thinning,
            ..
        } => {
            c.lattice = lattice.clone();
            c.p = pressure.p;
            c.p4 = pressure.p4;
            c.p_high = pressure.p_high;
            c.dims = dims_of(dims)?;
            c.cycles = *cycles;
            c.init = init.clone();
            c.thinning = *thinning;
        }
        Command::Bracket { lattice, protocol } => {
            c.lattice = lattice.clone();
            c.protocol = protocol.overrides();
        }
        Command::Curve {
            lattice,
            p4_grid,
            protocol,
        } => {
            c.lattice = lattice.clone();
            c.p4_grid = p4_grid.clone();
            c.protocol = protocol.overrides();
        }
        Command::Enumerate { lattice, dims, .. } => {
            c.lattice = lattice.clone();
            c.dims = dims_of(&Some(dims.clone()))?;
        }
        Command::Voter {
            lattice, mode, samples, ..
        } => {
            c.lattice = lattice.clone();
            c.mode = mode.clone();
            c.samples = *samples;
        }
        _ => {}
    }
    Ok(c)
}

/// 2 for bad input, 3 for exhausted budgets and undecided brackets.
fn exit_code(e: &anyhow::Error) -> u8 {
    use densepack::Error as E;
    if e.downcast_ref::<Invalid>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(E::BudgetExhausted(_) | E::Undecidable(_) | E::InsufficientSizes { .. }) => 3,
        Some(E::Io(_)) | None => 1,
        Some(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> anyhow::Result<u8> {
        if let Some(n) = cli.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| config::invalid(e.to_string()))?;
        }
        let file = match &cli.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let cfg = file.overlay(flag_config(&cli)?);
        commands::run(&cli.command, &cfg)
    })();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
