use clap::{Parser, Subcommand};
use roadfield_cli::{run, CliError, Command, Format, RunConfig};
use roadfield::ModelParams;
use std::io::Write;
use std::path::PathBuf;

/// Front-propagation predictions for the road-field model and a
/// finite-difference cross-validation simulator.
#[derive(Parser, Debug)]
#[command(name = "roadfield", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,

    /// Road diffusivity D (> 1)
    #[arg(long = "D", global = true)]
    d: Option<f64>,
    /// Road decay rate mu
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Field-to-road exchange rate nu
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Boundary exchange coefficient kappa
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Second road diffusivity D-tilde (cone case; >= D)
    #[arg(long = "Dtilde", global = true)]
    dtilde: Option<f64>,
    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Read the full run configuration from a JSON file (as emitted in the
    /// `config` field of JSON output); explicit flags override its params
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the Hamiltonians at one (q, p)
    Hamiltonian {
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Evaluate the road Lagrangian at one velocity
    Legendre {
        #[arg(long, allow_hyphen_values = true)]
        v: f64,
    },
    /// Value function J and its minimizing-path data at (t, x, y)
    Value {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Sample the minimizing path to (t, x, y)
    Path {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 65)]
        n: usize,
    },
    /// Road speed, critical angle, and optionally one directional speed
    Speed {
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Sample the Wulff shape boundary
    Wulff {
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// Conical-domain Wulff shape, speeds, and convexity
    Cone {
        /// Cone half-angle a in (0, pi/2]
        #[arg(long)]
        angle: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Bisect the convexity threshold diffusivity D_a
        #[arg(long)]
        estimate_threshold: bool,
        /// Evaluate unequal-diffusivity bounds outside the proved a < pi/4 regime
        #[arg(long)]
        force: bool,
    },
    /// Explicit finite-difference run of the PDE system
    Simulate {
        #[arg(long, default_value_t = 0.2)]
        h: f64,
        #[arg(long = "Lx", default_value_t = 160.0)]
        lx: f64,
        #[arg(long = "Ly", default_value_t = 20.0)]
        ly: f64,
        #[arg(long = "tmax", default_value_t = 40.0)]
        tmax: f64,
        /// Front-extraction level in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        level: f64,
        /// Cone half-angle (pi/4 or pi/2); half-plane when omitted
        #[arg(long)]
        angle: Option<f64>,
        /// Rays to track (angle from the y-axis; repeatable)
        #[arg(long = "theta", allow_hyphen_values = true)]
        thetas: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        sample_dt: f64,
        /// Write a binary state snapshot here at the end of the run
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Run the property and acceptance check battery
    Verify {
        /// Skip the simulation-backed checks
        #[arg(long)]
        quick: bool,
    },
}

fn to_command(cmd: Cmd) -> Command {
    match cmd {
        Cmd::Hamiltonian { q, p } => Command::Hamiltonian { q, p },
        Cmd::Legendre { v } => Command::Legendre { v },
        Cmd::Value { t, x, y } => Command::Value { t, x, y },
        Cmd::Path { t, x, y, n } => Command::Path { t, x, y, n },
        Cmd::Speed { theta } => Command::Speed { theta },
        Cmd::Wulff { n } => Command::Wulff { n },
        Cmd::Cone { angle, n, theta, estimate_threshold, force } => {
            Command::Cone { angle, n, theta, estimate_threshold, force }
        }
        Cmd::Simulate { h, lx, ly, tmax, level, angle, thetas, sample_dt, snapshot } => {
            Command::Simulate { h, lx, ly, tmax, level, angle, thetas, sample_dt, snapshot }
        }
        Cmd::Verify { quick } => Command::Verify { quick },
    }
}

fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let mut config = if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError {
            code: "E_CONFIG",
            exit: 2,
            message: format!("cannot read config {}: {e}", path.display()),
        })?;
        let mut from_file = serde_json::from_str::<RunConfig>(&text).map_err(|e| CliError {
            code: "E_CONFIG",
            exit: 2,
            message: format!("invalid config file: {e}"),
        })?;
        if let Some(cmd) = cli.command {
            from_file.command = to_command(cmd);
        }
        from_file
    } else {
        let cmd = cli.command.ok_or(CliError {
            code: "E_CONFIG",
            exit: 2,
            message: "a subcommand (or --config) is required".into(),
        })?;
        RunConfig {
            command: to_command(cmd),
            params: ModelParams::default(),
            format: Format::default(),
        }
    };
    if let Some(d) = cli.d {
        config.params.d = d;
    }
    if let Some(mu) = cli.mu {
        config.params.mu = mu;
    }
    if let Some(nu) = cli.nu {
        config.params.nu = nu;
    }
    if let Some(kappa) = cli.kappa {
        config.params.kappa = kappa;
    }
    if let Some(dt) = cli.dtilde {
        config.params.d_tilde = Some(dt);
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    Ok(config)
}

fn main() {
    if let Ok(threads) = std::env::var("RF_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let output = cli.output.clone();
    let status = build_config(cli).and_then(|config| {
        let mut sink: Box<dyn Write> = match &output {
            Some(path) => match std::fs::File::create(path) {
                Ok(f) => Box::new(f),
                Err(e) => {
                    eprintln!("error[E_IO]: cannot create {}: {e}", path.display());
                    std::process::exit(3);
                }
            },
            None => Box::new(std::io::stdout().lock()),
        };
        run(&config, &mut sink)
    });
    if let Err(e) = status {
        eprintln!("error[{}]: {}", e.code, e.message);
        std::process::exit(e.exit);
    }
}
